//! Report aggregation and rendering.
//!
//! The grounding report has exactly the cell structure of the benchmark
//! tables it mirrors: Mobile/Desktop/Web platforms crossed with
//! Text/Icon element types plus a micro average. The success report has
//! Easy/Middle/Hard/Overall columns. Both serialize to JSON and render
//! as aligned text tables; aggregation is order-independent.

use super::{ElementType, Platform};
use crate::mockenv::Difficulty;
use serde::{Deserialize, Serialize};

/// One accuracy cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GroundingCell {
    pub hits: usize,
    pub total: usize,
}

impl GroundingCell {
    pub fn accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| self.hits as f64 / self.total as f64)
    }

    fn render(&self) -> String {
        match self.accuracy() {
            Some(a) => format!("{:5.1}", a * 100.0),
            None => "    -".to_string(),
        }
    }

    fn add(&mut self, hit: bool) {
        self.total += 1;
        if hit {
            self.hits += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PlatformCells {
    pub text: GroundingCell,
    pub icon: GroundingCell,
}

/// Grounding accuracy keyed by (platform, element type), plus average.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroundingReport {
    pub mobile: PlatformCells,
    pub desktop: PlatformCells,
    pub web: PlatformCells,
    pub parse_misses: usize,
}

impl GroundingReport {
    pub(super) fn tally(
        &mut self,
        platform: Platform,
        element_type: ElementType,
        hit: bool,
        parse_miss: bool,
    ) {
        let cells = match platform {
            Platform::Mobile => &mut self.mobile,
            Platform::Desktop => &mut self.desktop,
            Platform::Web => &mut self.web,
        };
        match element_type {
            ElementType::Text => cells.text.add(hit),
            ElementType::Icon => cells.icon.add(hit),
        }
        if parse_miss {
            self.parse_misses += 1;
        }
    }

    pub fn cells(&self) -> [(Platform, ElementType, GroundingCell); 6] {
        [
            (Platform::Mobile, ElementType::Text, self.mobile.text),
            (Platform::Mobile, ElementType::Icon, self.mobile.icon),
            (Platform::Desktop, ElementType::Text, self.desktop.text),
            (Platform::Desktop, ElementType::Icon, self.desktop.icon),
            (Platform::Web, ElementType::Text, self.web.text),
            (Platform::Web, ElementType::Icon, self.web.icon),
        ]
    }

    pub fn total(&self) -> GroundingCell {
        let mut total = GroundingCell::default();
        for (_, _, cell) in self.cells() {
            total.hits += cell.hits;
            total.total += cell.total;
        }
        total
    }

    /// Micro average over all cases; equals the cell-size-weighted mean
    /// of the six cell accuracies.
    pub fn average(&self) -> Option<f64> {
        self.total().accuracy()
    }

    /// Aligned text table: one accuracy row under platform/type headers.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str("            Mobile        Desktop       Web           \n");
        out.push_str("            Text   Icon   Text   Icon   Text   Icon   Avg.\n");
        out.push_str("accuracy   ");
        for (_, _, cell) in self.cells() {
            out.push_str(&format!("{}  ", cell.render()));
        }
        match self.average() {
            Some(a) => out.push_str(&format!("{:5.1}\n", a * 100.0)),
            None => out.push_str("    -\n"),
        }
        out
    }
}

/// One success-rate cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RateCell {
    pub successes: usize,
    pub total: usize,
}

impl RateCell {
    pub fn rate(&self) -> Option<f64> {
        (self.total > 0).then(|| self.successes as f64 / self.total as f64)
    }

    fn render(&self) -> String {
        match self.rate() {
            Some(r) => format!("{r:5.2}"),
            None => "    -".to_string(),
        }
    }

    fn add(&mut self, success: bool) {
        self.total += 1;
        if success {
            self.successes += 1;
        }
    }
}

/// Success rates per difficulty plus overall. A difficulty with no
/// results is reported as absent (`None`), not as zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SuccessReport {
    pub easy: Option<RateCell>,
    pub middle: Option<RateCell>,
    pub hard: Option<RateCell>,
    pub overall: RateCell,
}

impl SuccessReport {
    pub(super) fn tally(&mut self, difficulty: Difficulty, success: bool) {
        let cell = match difficulty {
            Difficulty::Easy => self.easy.get_or_insert_with(RateCell::default),
            Difficulty::Middle => self.middle.get_or_insert_with(RateCell::default),
            Difficulty::Hard => self.hard.get_or_insert_with(RateCell::default),
        };
        cell.add(success);
        self.overall.add(success);
    }

    /// Aligned text table with Easy/Middle/Hard/Overall columns.
    pub fn render_table(&self) -> String {
        let cell = |value: Option<RateCell>| match value {
            Some(cell) => cell.render(),
            None => "    -".to_string(),
        };
        format!(
            "              Easy   Middle Hard   Overall\nsuccess rate {}  {}  {}  {}\n",
            cell(self.easy),
            cell(self.middle),
            cell(self.hard),
            self.overall.render(),
        )
    }
}
