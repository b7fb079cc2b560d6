//! Classifies viewing areas around an attention point, then walks the
//! greedy bitrate descent across shrinking budgets and compares the result
//! against the exhaustive search and the non-adaptive baselines.

use fovr::catalog::synth_catalog;
use fovr::geometry::{SpherePoint, TileGrid};
use fovr::qoe::AreaClass;
use fovr::scheduler::{
    baseline_plan, classify_areas, compression_ratio, exhaustive_schedule, schedule_clip,
    BandwidthBudget, BaselineScheme,
};

fn main() {
    let grid = TileGrid::new(12, 6).unwrap();
    let attention = SpherePoint::new(40.0, 15.0).unwrap();
    let areas = classify_areas(&attention, &grid);
    println!(
        "attention at ({}, {}) lands on tile ({}, {})",
        40.0,
        15.0,
        areas.attention_tile().col,
        areas.attention_tile().row
    );
    println!(
        "areas: {} hd / {} sd / {} ld over {} tiles",
        areas.count(AreaClass::Hd),
        areas.count(AreaClass::Sd),
        areas.count(AreaClass::Ld),
        grid.tile_count()
    );

    let cat = synth_catalog(grid, 1, 14400.0, &[0.66, 0.4], &[0.12, 0.05], 0.0, 0).unwrap();

    // Plans shrink rung by rung: LD steps down first, then SD, and the HD
    // tile never drops. Below the lowest rung sum the plan is infeasible.
    println!("\n  budget_mbit     bits  feasible      qoe  matches_exhaustive");
    for w_mbit in [3.0, 2.5, 2.0, 1.6, 1.2] {
        let budget = BandwidthBudget::from_bits(w_mbit * 1e6).unwrap();
        let plan = schedule_clip(&areas, &cat, 0, &budget).unwrap();
        let oracle = exhaustive_schedule(&areas, &cat, 0, &budget).unwrap();
        println!(
            "  {:11.1}  {:7.0}  {:>8}  {:.5}  {:>18}",
            w_mbit,
            plan.total_bits,
            plan.feasible,
            plan.scheduled_qoe,
            plan == oracle
        );
    }

    println!("\nbaselines at their own full cost:");
    for scheme in [
        BaselineScheme::Full,
        BaselineScheme::HeadOnly,
        BaselineScheme::GazeOnly,
    ] {
        let plan = baseline_plan(scheme, &attention, &attention, &cat, 0).unwrap();
        let ratio = compression_ratio(&plan, &cat, 0).unwrap();
        println!(
            "  {:?}: {:.0} bits, compression ratio {:.4}",
            scheme, plan.total_bits, ratio
        );
    }
    let budget = BandwidthBudget::from_bits(3.0 * 1e6).unwrap();
    let fovr = schedule_clip(&areas, &cat, 0, &budget).unwrap();
    println!(
        "  gaze-adaptive at 3 Mbit: {:.0} bits, compression ratio {:.4}",
        fovr.total_bits,
        compression_ratio(&fovr, &cat, 0).unwrap()
    );
}
