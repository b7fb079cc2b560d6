//! Generates one trace per motion regime and prints where the gaze ends up.

use fovr::trace::{gen_synthetic, ground_truth_attention, SyntheticKind, SyntheticParams};

fn main() {
    for (name, kind) in [
        ("static", SyntheticKind::static_default()),
        ("pursuit", SyntheticKind::pursuit_default()),
        ("saccade", SyntheticKind::saccade_default()),
    ] {
        let params = SyntheticParams::new(kind, 10.0, 30.0);
        let trace = gen_synthetic(&params, 42).unwrap();
        println!(
            "{name}: {} samples over {} ms at {:.1} Hz",
            trace.samples().len(),
            trace.span_ms(),
            trace.nominal_rate_hz()
        );
        for t_ms in [0.0, 2500.0, 5000.0, 7500.0, 10000.0] {
            let p = ground_truth_attention(&trace, t_ms).unwrap();
            println!("  t={t_ms:7.0} ms  yaw {:8.3}  pitch {:7.3}", p.yaw_deg(), p.pitch_deg());
        }
    }
}
