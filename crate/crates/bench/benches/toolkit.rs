//! Criterion benchmarks for the hot paths: coordinate conversion,
//! envelope parsing, annotation parsing, step-output round-trips, and
//! environment stepping.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use guiact::actions::{parse_action, serialize_action, Action};
use guiact::geometry::{
    denormalize_point, normalize_point, NormPoint, PixelPoint, ScreenDims,
};
use guiact::mockenv::{scripts, MockEnv};
use guiact::protocol::{parse_step_output, render_step_output, ReasoningRecord};
use guiact::raa::{parse_raa, ParseMode};
use std::hint::black_box;

fn bench_geometry(c: &mut Criterion) {
    let dims = ScreenDims::new(1920, 1080).unwrap();
    c.bench_function("normalize_denormalize_point", |b| {
        b.iter(|| {
            let p = black_box(PixelPoint { x: 963, y: 541 });
            let n = normalize_point(p, dims).unwrap();
            black_box(denormalize_point(n, dims))
        })
    });
}

fn bench_actions(c: &mut Criterion) {
    let action = Action::PointInput {
        point: NormPoint::new(120, 860).unwrap(),
        text: "hello world".into(),
    };
    let text = serialize_action(&action);
    c.bench_function("serialize_action", |b| {
        b.iter(|| black_box(serialize_action(black_box(&action))))
    });
    c.bench_function("parse_action", |b| {
        b.iter(|| black_box(parse_action(black_box(&text)).unwrap()))
    });
}

fn bench_raa(c: &mut Criterion) {
    let text = "Tap <ref type=\"point\" x=\"500\" y=\"500\" note=\"submit\">the Submit \
                button</ref> to continue, then check <ref type=\"box\" x1=\"120\" y1=\"80\" \
                x2=\"480\" y2=\"140\">the search field</ref> above.";
    c.bench_function("parse_raa", |b| {
        b.iter(|| black_box(parse_raa(black_box(text), ParseMode::Strict).unwrap()))
    });
}

fn bench_protocol(c: &mut Criterion) {
    let record = ReasoningRecord {
        reflection: Some("the tap worked and the form appeared".into()),
        strategic_summary: "two fields remain before the contact can be saved".into(),
        strategic_planning: "fill the name field, then the phone field".into(),
        tactical: "type into the name field at its center".into(),
        expectation: "the name field should show the typed text".into(),
    };
    let action = Action::Input { text: "Alice".into() };
    let rendered = render_step_output(&record, &action);
    c.bench_function("parse_step_output", |b| {
        b.iter(|| black_box(parse_step_output(black_box(&rendered), 3, ParseMode::Strict).unwrap()))
    });
}

fn bench_mockenv(c: &mut Criterion) {
    let script = scripts::contacts_app();
    let tap = Action::Tap { point: NormPoint::new(180, 915).unwrap() };
    c.bench_function("mockenv_reset_and_step", |b| {
        b.iter_batched(
            || MockEnv::reset(script.clone(), "open_contacts").unwrap(),
            |mut env| black_box(env.step(&tap).unwrap()),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    bench_geometry,
    bench_actions,
    bench_raa,
    bench_protocol,
    bench_mockenv
);
criterion_main!(benches);
