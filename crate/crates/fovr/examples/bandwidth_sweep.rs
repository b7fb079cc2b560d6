//! Sweeps the link rate for one trace and catalog and tabulates how stalls
//! vanish and quality saturates as capacity grows.

use fovr::catalog::synth_catalog;
use fovr::geometry::TileGrid;
use fovr::simulator::{simulate, BandwidthModel, Scheme, SimConfig};
use fovr::trace::{gen_synthetic, SyntheticKind, SyntheticParams};

fn main() {
    let params = SyntheticParams::new(SyntheticKind::Static { sigma_deg: 0.0 }, 18.0, 30.0);
    let trace = gen_synthetic(&params, 0).unwrap();
    let grid = TileGrid::new(36, 36).unwrap();
    let cat = synth_catalog(grid, 10, 40_000.0, &[0.66, 0.33], &[0.12, 0.03], 0.0, 0).unwrap();
    let cfg = SimConfig::default();

    // Stalls are not monotone in the link rate: the budget is rate x clip
    // duration, so a rate that barely admits a richer plan leaves no slack
    // for the fixed latency and processing delays until the rate grows.
    println!("  mbps  stalls  total_stall_ms  mean_qoe  mean_compression");
    for mbps in [1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 40.0] {
        let bw = BandwidthModel::constant(mbps * 1e6).unwrap();
        let report = simulate(&trace, &cat, &bw, &cfg, Scheme::Fovr).unwrap();
        println!(
            "  {:4.0}  {:6}  {:14.3}  {:.6}  {:16.6}",
            mbps,
            report.stall_count,
            report.total_stall_ms,
            report.mean_qoe,
            report.mean_compression_ratio
        );
    }
}
