//! Accuracy of the SVR predictor against the linear baseline as the
//! prediction horizon grows, averaged over pursuit viewers.

use fovr::prediction::{
    eval_accuracy, linear_predict_attention, predict_attention, PredictorConfig,
};
use fovr::svr::SvrConfig;
use fovr::trace::{gen_synthetic, SyntheticKind, SyntheticParams, Trace};

fn sliding_accuracy(trace: &Trace, cfg: &PredictorConfig, svr: Option<&SvrConfig>) -> f64 {
    let (window, horizon) = (cfg.window_s * 1000.0, cfg.horizon_s * 1000.0);
    let mut estimates = Vec::new();
    let mut t_end = trace.start_ms() as f64 + window;
    while t_end + horizon <= trace.end_ms() as f64 + 1e-9 {
        let w = trace.segment(t_end - window, t_end).unwrap();
        estimates.push(match svr {
            Some(s) => predict_attention(&w, cfg, s).unwrap(),
            None => linear_predict_attention(&w, cfg).unwrap(),
        });
        t_end += horizon;
    }
    eval_accuracy(&estimates, trace, cfg.tolerance_deg).unwrap().accuracy
}

fn main() {
    let svr = SvrConfig::default();
    let cfg = PredictorConfig::default();
    let params = SyntheticParams::new(SyntheticKind::Static { sigma_deg: 0.5 }, 12.0, 30.0);
    let still = gen_synthetic(&params, 0).unwrap();
    println!(
        "still viewer, 1 s horizon: svr {:.3}, linear {:.3}",
        sliding_accuracy(&still, &cfg, Some(&svr)),
        sliding_accuracy(&still, &cfg, None)
    );

    // Accuracy is the fraction of horizon instants within tolerance of the
    // one predicted point, so a moving viewer punishes any flat forecast.
    println!("\nhorizon_s  svr_accuracy  linear_accuracy   (20 seeds, 5 deg tolerance)");
    for horizon in [0.5, 1.0, 2.0, 3.0] {
        let cfg = PredictorConfig { horizon_s: horizon, ..PredictorConfig::default() };
        let (mut acc_svr, mut acc_lin) = (0.0, 0.0);
        for seed in 0..20 {
            let params = SyntheticParams::new(SyntheticKind::pursuit_default(), 12.0, 30.0);
            let trace = gen_synthetic(&params, seed).unwrap();
            acc_svr += sliding_accuracy(&trace, &cfg, Some(&svr)) / 20.0;
            acc_lin += sliding_accuracy(&trace, &cfg, None) / 20.0;
        }
        println!("{horizon:9.1}  {acc_svr:12.3}  {acc_lin:15.3}");
    }
}
