//! Screen geometry on the normalized `[0, 1000]` grid.
//!
//! All spatial annotations are expressed on a relative integer scale of
//! `[0, 1000]` per axis, independent of the physical screen resolution.
//! The origin `{"x": 0, "y": 0}` is the screen's top-left corner, the
//! x-axis extends rightward, the y-axis downward, and the bottom-right
//! screen corner corresponds to `{"x": 1000, "y": 1000}` (see
//! [`normalize_boundary`] for the corner convention).
//!
//! Conversions use round-half-up everywhere; ties like `999.5` round to
//! `1000`. Denormalization clamps to `width - 1` / `height - 1` so that
//! `1000` maps to the last addressable pixel.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound of the normalized coordinate scale.
pub const NORM_MAX: u16 = 1000;

/// Screen axis, used to name the offending coordinate in errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("screen dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDims { width: u32, height: u32 },
    #[error("normalized {axis} coordinate {value} out of range 0..={max}", max = NORM_MAX)]
    OutOfRange { axis: Axis, value: i64 },
    #[error("pixel {axis} coordinate {value} outside screen extent {extent}")]
    OutOfBounds { axis: Axis, value: u32, extent: u32 },
    #[error("box corners disordered: ({x1},{y1})-({x2},{y2}), expected x1<=x2 and y1<=y2")]
    DisorderedCorners { x1: u32, y1: u32, x2: u32, y2: u32 },
    #[error("invalid {kind}: {message}")]
    Json { kind: &'static str, message: String },
}

/// Pixel dimensions of a screen. Both extents are at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDims")]
pub struct ScreenDims {
    width: u32,
    height: u32,
}

#[derive(Deserialize)]
struct RawDims {
    width: u32,
    height: u32,
}

impl TryFrom<RawDims> for ScreenDims {
    type Error = GeometryError;

    fn try_from(raw: RawDims) -> Result<Self, Self::Error> {
        ScreenDims::new(raw.width, raw.height)
    }
}

impl ScreenDims {
    pub fn new(width: u32, height: u32) -> Result<Self, GeometryError> {
        if width == 0 || height == 0 {
            return Err(GeometryError::EmptyDims { width, height });
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }
}

impl std::fmt::Display for ScreenDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// A point on the normalized `[0, 1000]` grid.
///
/// JSON encoding: `{"x": 500, "y": 500}`. Fractional or out-of-range
/// values are rejected when deserializing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct NormPoint {
    x: u16,
    y: u16,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    x: i64,
    y: i64,
}

impl TryFrom<RawPoint> for NormPoint {
    type Error = GeometryError;

    fn try_from(raw: RawPoint) -> Result<Self, Self::Error> {
        let x = check_norm(raw.x, Axis::X)?;
        let y = check_norm(raw.y, Axis::Y)?;
        Ok(Self { x, y })
    }
}

fn check_norm(value: i64, axis: Axis) -> Result<u16, GeometryError> {
    if value < 0 || value > i64::from(NORM_MAX) {
        return Err(GeometryError::OutOfRange { axis, value });
    }
    Ok(value as u16)
}

impl NormPoint {
    pub fn new(x: u16, y: u16) -> Result<Self, GeometryError> {
        let x = check_norm(i64::from(x), Axis::X)?;
        let y = check_norm(i64::from(y), Axis::Y)?;
        Ok(Self { x, y })
    }

    pub fn x(&self) -> u16 {
        self.x
    }

    pub fn y(&self) -> u16 {
        self.y
    }
}

/// An axis-aligned box on the normalized grid with ordered corners.
///
/// JSON encoding: `{"x1": 0, "y1": 0, "x2": 1000, "y2": 1000}`.
/// Degenerate (zero-area) boxes are legal; point annotations are often
/// promoted to boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct NormBox {
    x1: u16,
    y1: u16,
    x2: u16,
    y2: u16,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    x1: i64,
    y1: i64,
    x2: i64,
    y2: i64,
}

impl TryFrom<RawBox> for NormBox {
    type Error = GeometryError;

    fn try_from(raw: RawBox) -> Result<Self, Self::Error> {
        let x1 = check_norm(raw.x1, Axis::X)?;
        let y1 = check_norm(raw.y1, Axis::Y)?;
        let x2 = check_norm(raw.x2, Axis::X)?;
        let y2 = check_norm(raw.y2, Axis::Y)?;
        if x1 > x2 || y1 > y2 {
            return Err(GeometryError::DisorderedCorners {
                x1: u32::from(x1),
                y1: u32::from(y1),
                x2: u32::from(x2),
                y2: u32::from(y2),
            });
        }
        Ok(Self { x1, y1, x2, y2 })
    }
}

impl NormBox {
    pub fn new(x1: u16, y1: u16, x2: u16, y2: u16) -> Result<Self, GeometryError> {
        NormBox::try_from(RawBox {
            x1: i64::from(x1),
            y1: i64::from(y1),
            x2: i64::from(x2),
            y2: i64::from(y2),
        })
    }

    pub fn x1(&self) -> u16 {
        self.x1
    }

    pub fn y1(&self) -> u16 {
        self.y1
    }

    pub fn x2(&self) -> u16 {
        self.x2
    }

    pub fn y2(&self) -> u16 {
        self.y2
    }

    /// Center of the box (round-half-up per axis).
    pub fn center(&self) -> NormPoint {
        NormPoint {
            x: round_half_up(u64::from(self.x1) + u64::from(self.x2), 2) as u16,
            y: round_half_up(u64::from(self.y1) + u64::from(self.y2), 2) as u16,
        }
    }

    /// Box grown by `margin` normalized units per edge, clamped to the grid.
    pub fn inflate(&self, margin: u16) -> NormBox {
        NormBox {
            x1: self.x1.saturating_sub(margin),
            y1: self.y1.saturating_sub(margin),
            x2: (self.x2 + margin).min(NORM_MAX),
            y2: (self.y2 + margin).min(NORM_MAX),
        }
    }
}

/// A point in raw pixel coordinates. Validity is relative to a
/// [`ScreenDims`] and checked by the operations that take one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PixelPoint {
    pub x: u32,
    pub y: u32,
}

/// A box in raw pixel coordinates. Corner ordering is validated by
/// [`normalize_box`], never silently repaired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PixelBox {
    pub x1: u32,
    pub y1: u32,
    pub x2: u32,
    pub y2: u32,
}

/// Integer round-half-up of `n / d` for non-negative operands.
fn round_half_up(n: u64, d: u64) -> u64 {
    (2 * n + d) / (2 * d)
}

/// Maps a pixel point inside `dims` onto the normalized grid.
///
/// Each axis maps as `round_half_up(p * 1000 / extent)`. Pixels outside
/// the screen are rejected with the offending axis named.
pub fn normalize_point(p: PixelPoint, dims: ScreenDims) -> Result<NormPoint, GeometryError> {
    if p.x >= dims.width {
        return Err(GeometryError::OutOfBounds {
            axis: Axis::X,
            value: p.x,
            extent: dims.width,
        });
    }
    if p.y >= dims.height {
        return Err(GeometryError::OutOfBounds {
            axis: Axis::Y,
            value: p.y,
            extent: dims.height,
        });
    }
    Ok(NormPoint {
        x: round_half_up(u64::from(p.x) * u64::from(NORM_MAX), u64::from(dims.width)) as u16,
        y: round_half_up(u64::from(p.y) * u64::from(NORM_MAX), u64::from(dims.height)) as u16,
    })
}

/// Maps a normalized point back onto the pixel grid of `dims`.
///
/// Each axis maps as `min(extent - 1, round_half_up(v * extent / 1000))`;
/// the clamp makes `1000` land on the last addressable pixel.
pub fn denormalize_point(p: NormPoint, dims: ScreenDims) -> PixelPoint {
    let x = round_half_up(u64::from(p.x) * u64::from(dims.width), u64::from(NORM_MAX));
    let y = round_half_up(u64::from(p.y) * u64::from(dims.height), u64::from(NORM_MAX));
    PixelPoint {
        x: (x as u32).min(dims.width - 1),
        y: (y as u32).min(dims.height - 1),
    }
}

/// Normalizes a pixel box corner-by-corner.
///
/// Corners must be ordered (`x1 <= x2`, `y1 <= y2`) and inside `dims`;
/// disordered corners are an error, never swapped. Ordering is preserved
/// by monotonicity of the per-axis mapping.
pub fn normalize_box(b: PixelBox, dims: ScreenDims) -> Result<NormBox, GeometryError> {
    if b.x1 > b.x2 || b.y1 > b.y2 {
        return Err(GeometryError::DisorderedCorners {
            x1: b.x1,
            y1: b.y1,
            x2: b.x2,
            y2: b.y2,
        });
    }
    let tl = normalize_point(PixelPoint { x: b.x1, y: b.y1 }, dims)?;
    let br = normalize_point(PixelPoint { x: b.x2, y: b.y2 }, dims)?;
    Ok(NormBox {
        x1: tl.x,
        y1: tl.y,
        x2: br.x,
        y2: br.y,
    })
}

/// Maps a boundary coordinate in `[0, extent]` onto `[0, 1000]`.
///
/// Boundary coordinates address the edges between pixels rather than the
/// pixels themselves: `0` is the screen's left/top edge and `extent` its
/// right/bottom edge. Under this corner convention the screen's top-left
/// corner maps to `0` and its bottom-right corner to exactly `1000`,
/// which is how annotations that state box corners as exclusive bounds
/// are brought onto the grid.
pub fn normalize_boundary(value: u32, extent: u32, axis: Axis) -> Result<u16, GeometryError> {
    if extent == 0 {
        return Err(GeometryError::EmptyDims {
            width: extent,
            height: extent,
        });
    }
    if value > extent {
        return Err(GeometryError::OutOfBounds {
            axis,
            value,
            extent,
        });
    }
    Ok(round_half_up(u64::from(value) * u64::from(NORM_MAX), u64::from(extent)) as u16)
}

/// Containment test with inclusive edges.
pub fn point_in_box(p: NormPoint, b: NormBox) -> bool {
    b.x1 <= p.x && p.x <= b.x2 && b.y1 <= p.y && p.y <= b.y2
}

/// How JSON parsers treat unknown keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Unknown keys are rejected.
    #[default]
    Strict,
    /// Unknown keys are ignored.
    Lenient,
}

/// Parses a point from its JSON encoding `{"x": ..., "y": ...}`.
pub fn parse_point(text: &str, mode: ParseMode) -> Result<NormPoint, GeometryError> {
    #[derive(Deserialize)]
    struct LenientPoint {
        x: i64,
        y: i64,
    }

    let raw = match mode {
        ParseMode::Strict => serde_json::from_str::<RawPoint>(text).map_err(|e| {
            GeometryError::Json {
                kind: "point",
                message: e.to_string(),
            }
        })?,
        ParseMode::Lenient => {
            let lenient: LenientPoint =
                serde_json::from_str(text).map_err(|e| GeometryError::Json {
                    kind: "point",
                    message: e.to_string(),
                })?;
            RawPoint {
                x: lenient.x,
                y: lenient.y,
            }
        }
    };
    NormPoint::try_from(raw)
}

/// Parses a box from its JSON encoding `{"x1": ..., "y1": ..., "x2": ..., "y2": ...}`.
pub fn parse_box(text: &str, mode: ParseMode) -> Result<NormBox, GeometryError> {
    #[derive(Deserialize)]
    struct LenientBox {
        x1: i64,
        y1: i64,
        x2: i64,
        y2: i64,
    }

    let raw = match mode {
        ParseMode::Strict => {
            serde_json::from_str::<RawBox>(text).map_err(|e| GeometryError::Json {
                kind: "box",
                message: e.to_string(),
            })?
        }
        ParseMode::Lenient => {
            let lenient: LenientBox =
                serde_json::from_str(text).map_err(|e| GeometryError::Json {
                    kind: "box",
                    message: e.to_string(),
                })?;
            RawBox {
                x1: lenient.x1,
                y1: lenient.y1,
                x2: lenient.x2,
                y2: lenient.y2,
            }
        }
    };
    NormBox::try_from(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent float-based route used to cross-check the integer
    /// arithmetic. Kept deliberately naive.
    fn oracle_normalize(p: u32, extent: u32) -> u16 {
        (f64::from(p) * 1000.0 / f64::from(extent) + 0.5).floor() as u16
    }

    fn oracle_denormalize(v: u16, extent: u32) -> u32 {
        let raw = (f64::from(v) * f64::from(extent) / 1000.0 + 0.5).floor() as u32;
        raw.min(extent - 1)
    }

    fn dims(w: u32, h: u32) -> ScreenDims {
        ScreenDims::new(w, h).unwrap()
    }

    #[test]
    fn origin_maps_to_origin() {
        let p = normalize_point(PixelPoint { x: 0, y: 0 }, dims(1920, 1080)).unwrap();
        assert_eq!((p.x(), p.y()), (0, 0));
    }

    #[test]
    fn midpoint_maps_to_500() {
        let p = normalize_point(PixelPoint { x: 960, y: 540 }, dims(1920, 1080)).unwrap();
        assert_eq!((p.x(), p.y()), (500, 500));
    }

    #[test]
    fn pixel_one_matches_oracle() {
        // Frozen from oracle_normalize: round_half_up(1000/1920) = 1,
        // round_half_up(1000/1080) = 1.
        assert_eq!(oracle_normalize(1, 1920), 1);
        assert_eq!(oracle_normalize(1, 1080), 1);
        let p = normalize_point(PixelPoint { x: 1, y: 1 }, dims(1920, 1080)).unwrap();
        assert_eq!((p.x(), p.y()), (1, 1));
    }

    #[test]
    fn out_of_bounds_pixel_names_axis() {
        let err = normalize_point(PixelPoint { x: 1920, y: 0 }, dims(1920, 1080)).unwrap_err();
        assert!(matches!(err, GeometryError::OutOfBounds { axis: Axis::X, .. }));
        let err = normalize_point(PixelPoint { x: 0, y: 1080 }, dims(1920, 1080)).unwrap_err();
        assert!(matches!(err, GeometryError::OutOfBounds { axis: Axis::Y, .. }));
    }

    #[test]
    fn denormalize_clamps_at_extremity() {
        let p = denormalize_point(NormPoint::new(1000, 1000).unwrap(), dims(1920, 1080));
        assert_eq!((p.x, p.y), (1919, 1079));
    }

    #[test]
    fn denormalize_zero_and_unit_scale() {
        let p = denormalize_point(NormPoint::new(0, 0).unwrap(), dims(640, 480));
        assert_eq!((p.x, p.y), (0, 0));
        let p = denormalize_point(NormPoint::new(500, 500).unwrap(), dims(1000, 1000));
        assert_eq!((p.x, p.y), (500, 500));
    }

    #[test]
    fn full_screen_box_matches_oracle() {
        // Frozen from the oracle: 1919*1000/1920 = 999.479 -> 999,
        // 1079*1000/1080 = 999.074 -> 999.
        assert_eq!(oracle_normalize(1919, 1920), 999);
        assert_eq!(oracle_normalize(1079, 1080), 999);
        let b = normalize_box(
            PixelBox { x1: 0, y1: 0, x2: 1919, y2: 1079 },
            dims(1920, 1080),
        )
        .unwrap();
        assert_eq!((b.x1(), b.y1(), b.x2(), b.y2()), (0, 0, 999, 999));
    }

    #[test]
    fn degenerate_box_unit_scale() {
        let b = normalize_box(
            PixelBox { x1: 10, y1: 10, x2: 10, y2: 10 },
            dims(1000, 1000),
        )
        .unwrap();
        assert_eq!((b.x1(), b.y1(), b.x2(), b.y2()), (10, 10, 10, 10));
    }

    #[test]
    fn screen_corners_under_boundary_convention() {
        // Top-left corner is 0, bottom-right boundary coordinate maps to
        // exactly 1000 regardless of resolution.
        for extent in [1u32, 3, 7, 100, 1080, 1920, 4096] {
            assert_eq!(normalize_boundary(0, extent, Axis::X).unwrap(), 0);
            assert_eq!(normalize_boundary(extent, extent, Axis::X).unwrap(), 1000);
        }
    }

    #[test]
    fn disordered_corners_rejected() {
        let err = normalize_box(
            PixelBox { x1: 20, y1: 0, x2: 10, y2: 5 },
            dims(100, 100),
        )
        .unwrap_err();
        assert!(matches!(err, GeometryError::DisorderedCorners { .. }));
    }

    #[test]
    fn point_in_box_interior_and_edges() {
        let b = NormBox::new(0, 0, 1000, 1000).unwrap();
        assert!(point_in_box(NormPoint::new(500, 500).unwrap(), b));
        let b = NormBox::new(0, 0, 10, 10).unwrap();
        assert!(point_in_box(NormPoint::new(0, 0).unwrap(), b));
        assert!(point_in_box(NormPoint::new(10, 10).unwrap(), b));
        assert!(!point_in_box(NormPoint::new(11, 10).unwrap(), b));
    }

    #[test]
    fn point_in_box_agrees_with_comparator() {
        // Independent comparator re-deriving the four inequalities.
        fn comparator(px: u16, py: u16, b: NormBox) -> bool {
            let inside_x = px >= b.x1() && px <= b.x2();
            let inside_y = py >= b.y1() && py <= b.y2();
            inside_x && inside_y
        }

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let p = NormPoint::new(rng.random_range(0..=1000), rng.random_range(0..=1000)).unwrap();
            let xa = rng.random_range(0..=1000);
            let xb = rng.random_range(0..=1000);
            let ya = rng.random_range(0..=1000);
            let yb = rng.random_range(0..=1000);
            let b = NormBox::new(xa.min(xb), ya.min(yb), xa.max(xb), ya.max(yb)).unwrap();
            assert_eq!(point_in_box(p, b), comparator(p.x(), p.y(), b));
        }
    }

    #[test]
    fn parse_point_modes() {
        let strict = parse_point(r#"{"x": 5, "y": 6}"#, ParseMode::Strict).unwrap();
        assert_eq!((strict.x(), strict.y()), (5, 6));
        assert!(parse_point(r#"{"x": 5, "y": 6, "z": 7}"#, ParseMode::Strict).is_err());
        let lenient = parse_point(r#"{"x": 5, "y": 6, "z": 7}"#, ParseMode::Lenient).unwrap();
        assert_eq!((lenient.x(), lenient.y()), (5, 6));
    }

    #[test]
    fn parse_rejects_fractional_and_out_of_range() {
        assert!(parse_point(r#"{"x": 5.5, "y": 6}"#, ParseMode::Strict).is_err());
        let err = parse_point(r#"{"x": 1001, "y": 0}"#, ParseMode::Strict).unwrap_err();
        assert!(matches!(err, GeometryError::OutOfRange { axis: Axis::X, value: 1001 }));
        assert!(parse_box(r#"{"x1": 0, "y1": 0, "x2": -1, "y2": 0}"#, ParseMode::Strict).is_err());
    }

    #[test]
    fn parse_box_rejects_disordered() {
        let err = parse_box(r#"{"x1": 9, "y1": 0, "x2": 3, "y2": 0}"#, ParseMode::Strict)
            .unwrap_err();
        assert!(matches!(err, GeometryError::DisorderedCorners { .. }));
    }

    #[test]
    fn box_center() {
        let b = NormBox::new(10, 10, 20, 21).unwrap();
        let c = b.center();
        assert_eq!((c.x(), c.y()), (15, 16));
    }

    #[test]
    fn zero_dims_rejected() {
        assert!(ScreenDims::new(0, 10).is_err());
        assert!(ScreenDims::new(10, 0).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_within_one_grid_cell(
            w in 1u32..=4096,
            h in 1u32..=4096,
            fx in 0.0f64..1.0,
            fy in 0.0f64..1.0,
        ) {
            let d = dims(w, h);
            let p = PixelPoint {
                x: (fx * f64::from(w)) as u32,
                y: (fy * f64::from(h)) as u32,
            };
            let back = denormalize_point(normalize_point(p, d).unwrap(), d);
            let tol_x = w.div_ceil(1000);
            let tol_y = h.div_ceil(1000);
            prop_assert!(back.x.abs_diff(p.x) <= tol_x);
            prop_assert!(back.y.abs_diff(p.y) <= tol_y);
        }

        #[test]
        fn normalization_is_monotone(
            w in 1u32..=4096,
            h in 1u32..=4096,
            fa in 0.0f64..1.0,
            fb in 0.0f64..1.0,
        ) {
            let d = dims(w, h);
            let ax = (fa * f64::from(w)) as u32;
            let bx = (fb * f64::from(w)) as u32;
            let ay = (fa * f64::from(h)) as u32;
            let by = (fb * f64::from(h)) as u32;
            let pa = normalize_point(PixelPoint { x: ax.min(bx), y: ay.min(by) }, d).unwrap();
            let pb = normalize_point(PixelPoint { x: ax.max(bx), y: ay.max(by) }, d).unwrap();
            prop_assert!(pa.x() <= pb.x());
            prop_assert!(pa.y() <= pb.y());
        }

        #[test]
        fn normalization_closed_over_grid(
            w in 1u32..=4096,
            h in 1u32..=4096,
            fx in 0.0f64..1.0,
            fy in 0.0f64..1.0,
        ) {
            let d = dims(w, h);
            let p = PixelPoint {
                x: (fx * f64::from(w)) as u32,
                y: (fy * f64::from(h)) as u32,
            };
            let n = normalize_point(p, d).unwrap();
            prop_assert!(n.x() <= NORM_MAX && n.y() <= NORM_MAX);
        }

        #[test]
        fn containment_survives_normalization(
            w in 1u32..=4096,
            h in 1u32..=4096,
            fx1 in 0.0f64..1.0,
            fy1 in 0.0f64..1.0,
            fx2 in 0.0f64..1.0,
            fy2 in 0.0f64..1.0,
            fpx in 0.0f64..1.0,
            fpy in 0.0f64..1.0,
        ) {
            let d = dims(w, h);
            let (x1, x2) = {
                let a = (fx1 * f64::from(w)) as u32;
                let b = (fx2 * f64::from(w)) as u32;
                (a.min(b), a.max(b))
            };
            let (y1, y2) = {
                let a = (fy1 * f64::from(h)) as u32;
                let b = (fy2 * f64::from(h)) as u32;
                (a.min(b), a.max(b))
            };
            let px = x1 + ((fpx * f64::from(x2 - x1 + 1)) as u32).min(x2 - x1);
            let py = y1 + ((fpy * f64::from(y2 - y1 + 1)) as u32).min(y2 - y1);
            let nb = normalize_box(PixelBox { x1, y1, x2, y2 }, d).unwrap();
            let np = normalize_point(PixelPoint { x: px, y: py }, d).unwrap();
            // Independent rounding of point and corners can disagree by at
            // most one grid unit per edge.
            prop_assert!(point_in_box(np, nb.inflate(1)));
        }

        #[test]
        fn matches_float_oracle(p in 0u32..4096, extent in 1u32..=4096) {
            prop_assume!(p < extent);
            let d = dims(extent, extent);
            let n = normalize_point(PixelPoint { x: p, y: p }, d).unwrap();
            prop_assert_eq!(n.x(), oracle_normalize(p, extent));
            let back = denormalize_point(n, d);
            prop_assert_eq!(back.x, oracle_denormalize(n.x(), extent));
        }
    }
}
