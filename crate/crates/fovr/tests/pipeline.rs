//! Cross-module properties of the generate -> predict -> schedule ->
//! simulate pipeline that no single module can check on its own.

use fovr::catalog::{load_manifest, save_manifest, synth_catalog};
use fovr::geometry::TileGrid;
use fovr::qoe::AreaClass;
use fovr::simulator::{
    emit_report, simulate, BandwidthModel, ReportFormat, Scheme, SimConfig,
};
use fovr::trace::{gen_synthetic, load_trace, serialize_trace, SyntheticKind, SyntheticParams};

fn pursuit(seed: u64, duration_s: f64) -> fovr::trace::Trace {
    let params = SyntheticParams::new(SyntheticKind::pursuit_default(), duration_s, 30.0);
    gen_synthetic(&params, seed).unwrap()
}

/// Delivered rung classes versus the ground-truth area map: whenever the
/// two coincide, the realized QoE can never beat the scheduled one.
#[test]
fn coincident_maps_never_beat_the_schedule() {
    let cat = synth_catalog(TileGrid::default(), 6, 40_000.0, &[0.66], &[0.12], 0.15, 21).unwrap();
    let bw = BandwidthModel::constant(20e6).unwrap();
    let mut coincident = 0usize;
    for seed in 0..5u64 {
        // Jittery but mostly still viewer: most clips match their
        // prediction, a few drift off the tile.
        let params = SyntheticParams::new(SyntheticKind::Static { sigma_deg: 1.0 }, 12.0, 30.0);
        let trace = gen_synthetic(&params, seed).unwrap();
        let report = simulate(&trace, &cat, &bw, &SimConfig::default(), Scheme::Fovr).unwrap();
        for rec in &report.records {
            let delivered: Vec<AreaClass> = rec.plan.choice.iter().map(|r| r.class).collect();
            if delivered == rec.actual_areas.classes() {
                coincident += 1;
                assert!(
                    rec.qoe_actual <= rec.plan.scheduled_qoe + 1e-9,
                    "seed {seed} clip {}: actual {} > scheduled {}",
                    rec.clip_index,
                    rec.qoe_actual,
                    rec.plan.scheduled_qoe
                );
            }
        }
    }
    assert!(coincident > 0, "no clip ever matched its prediction");
}

/// A manifest written to bytes and read back drives the simulator to the
/// exact same report as the in-memory catalog.
#[test]
fn manifest_round_trip_preserves_simulation() {
    let cat = synth_catalog(TileGrid::default(), 4, 40_000.0, &[0.66, 0.33], &[0.12], 0.3, 7)
        .unwrap();
    let mut bytes = Vec::new();
    save_manifest(&cat, &mut bytes).unwrap();
    let reloaded = load_manifest(&bytes[..]).unwrap();
    let trace = pursuit(3, 10.0);
    let bw = BandwidthModel::from_steps(vec![(0.0, 8e6), (7000.0, 30e6)]).unwrap();
    let cfg = SimConfig::default();
    for scheme in [Scheme::Fovr, Scheme::Full, Scheme::HeadOnly, Scheme::GazeOnly] {
        let a = simulate(&trace, &cat, &bw, &cfg, scheme).unwrap();
        let b = simulate(&trace, &reloaded, &bw, &cfg, scheme).unwrap();
        assert_eq!(
            emit_report(&a, ReportFormat::Rows),
            emit_report(&b, ReportFormat::Rows),
            "{scheme:?}"
        );
    }
}

/// Same for traces: serialized and reloaded head/gaze paths replay into an
/// identical playout.
#[test]
fn trace_round_trip_preserves_simulation() {
    let params = SyntheticParams::new(SyntheticKind::saccade_default(), 10.0, 25.0);
    let trace = gen_synthetic(&params, 17).unwrap();
    let mut bytes = Vec::new();
    serialize_trace(&trace, &mut bytes).unwrap();
    let reloaded = load_trace(&bytes[..]).unwrap();
    assert_eq!(trace, reloaded);
    let cat = synth_catalog(TileGrid::default(), 4, 40_000.0, &[0.66], &[0.12], 0.0, 0).unwrap();
    let bw = BandwidthModel::constant(15e6).unwrap();
    let a = simulate(&trace, &cat, &bw, &SimConfig::default(), Scheme::Fovr).unwrap();
    let b = simulate(&reloaded, &cat, &bw, &SimConfig::default(), Scheme::Fovr).unwrap();
    assert_eq!(
        emit_report(&a, ReportFormat::Summary),
        emit_report(&b, ReportFormat::Summary)
    );
}

/// Every scheme keeps the playback clock conserved and the per-record
/// invariants intact on an erratic saccade viewer.
#[test]
fn all_schemes_survive_a_saccade_viewer() {
    let params = SyntheticParams::new(SyntheticKind::saccade_default(), 11.0, 30.0);
    let trace = gen_synthetic(&params, 29).unwrap();
    let cat = synth_catalog(TileGrid::default(), 5, 40_000.0, &[0.66], &[0.12], 0.0, 0).unwrap();
    let bw = BandwidthModel::constant(25e6).unwrap();
    let cfg = SimConfig::default();
    for scheme in [Scheme::Fovr, Scheme::Full, Scheme::HeadOnly, Scheme::GazeOnly] {
        let report = simulate(&trace, &cat, &bw, &cfg, scheme).unwrap();
        assert_eq!(report.records.len(), 5);
        let r0 = &report.records[0];
        let playback_start = r0.display_start_ms - r0.stall_ms;
        let mut before = 0.0;
        for (k, rec) in report.records.iter().enumerate() {
            assert!(rec.stall_ms >= 0.0);
            assert!(rec.ready_t_ms >= rec.request_t_ms);
            assert!(rec.qoe_actual >= 0.0 && rec.qoe_actual <= 1.0);
            assert!((0.0..=1.0).contains(&rec.compression_ratio));
            let deadline = playback_start + k as f64 * 1000.0 + before;
            assert!(
                (rec.display_start_ms - (deadline + rec.stall_ms)).abs() <= 1e-9,
                "{scheme:?} clip {k}"
            );
            before += rec.stall_ms;
        }
    }
}

/// Budget scaling through the whole pipeline: more bandwidth never yields
/// a worse scheduled plan for any clip of the same playout.
#[test]
fn per_clip_plans_improve_with_bandwidth() {
    let cat = synth_catalog(
        TileGrid::default(),
        4,
        40_000.0,
        &[0.66, 0.33],
        &[0.12, 0.03],
        0.0,
        0,
    )
    .unwrap();
    let params = SyntheticParams::new(SyntheticKind::Static { sigma_deg: 0.0 }, 10.0, 30.0);
    let trace = gen_synthetic(&params, 0).unwrap();
    let cfg = SimConfig::default();
    let mut prev: Option<Vec<f64>> = None;
    for bps in [1e6, 3e6, 8e6, 40e6] {
        let bw = BandwidthModel::constant(bps).unwrap();
        let report = simulate(&trace, &cat, &bw, &cfg, Scheme::Fovr).unwrap();
        let qoes: Vec<f64> = report.records.iter().map(|r| r.plan.scheduled_qoe).collect();
        if let Some(prev) = &prev {
            for (k, (lo, hi)) in prev.iter().zip(&qoes).enumerate() {
                assert!(hi + 1e-12 >= *lo, "clip {k} got worse at {bps} bps");
            }
        }
        prev = Some(qoes);
    }
}
