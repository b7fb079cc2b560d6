//! Online attention prediction over a sliding window.
//!
//! Two independent scalar regressors map normalized window time to
//! unwrapped yaw and to pitch of the gaze attention path; evaluating them
//! past the window end gives one predicted point per upcoming sample
//! instant, and the spherical mean of those points is the attention
//! estimate for the next clip. A least-squares variant serves as the
//! comparison baseline.

use crate::error::{Error, Result};
use crate::geometry::{angular_distance, dir_to_sphere, spherical_mean, wrap_yaw_deg, SpherePoint};
use crate::svr::{svr_predict, svr_train, SvrConfig};
use crate::trace::{ground_truth_attention, resample, Trace};

/// Prediction window/horizon shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictorConfig {
    pub window_s: f64,
    pub horizon_s: f64,
    pub rate_hz: f64,
    pub tolerance_deg: f64,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        PredictorConfig {
            window_s: 5.0,
            horizon_s: 1.0,
            rate_hz: 10.0,
            tolerance_deg: 5.0,
        }
    }
}

impl PredictorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_s > 0.0 && self.window_s.is_finite()) {
            return Err(Error::invalid(format!(
                "window must be positive, got {} s",
                self.window_s
            )));
        }
        if !(self.horizon_s > 0.0 && self.horizon_s.is_finite()) {
            return Err(Error::invalid(format!(
                "horizon must be positive, got {} s",
                self.horizon_s
            )));
        }
        if !(self.rate_hz > 0.0 && self.rate_hz.is_finite()) {
            return Err(Error::invalid(format!(
                "rate must be positive, got {} Hz",
                self.rate_hz
            )));
        }
        if !(self.tolerance_deg >= 0.0 && self.tolerance_deg.is_finite()) {
            return Err(Error::invalid(format!(
                "tolerance must be non-negative, got {}",
                self.tolerance_deg
            )));
        }
        if (self.window_s * self.rate_hz).round() < 1.0 {
            return Err(Error::invalid(
                "window must cover at least 2 samples at the prediction rate",
            ));
        }
        Ok(())
    }
}

/// Prediction for one upcoming clip.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionEstimate {
    /// Clustered attention over the horizon.
    pub mean: SpherePoint,
    /// Per-instant predicted points, timestamps strictly increasing.
    pub horizon_points: Vec<(i64, SpherePoint)>,
    pub tolerance_deg: f64,
    /// True when the horizon points spread so evenly that their spherical
    /// mean was undefined and the last point was used instead.
    pub degenerate_mean: bool,
}

/// Tolerance-based accuracy over a batch of estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    /// Fraction of correct horizon instants, one entry per estimate.
    pub per_estimate: Vec<f64>,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

/// Window time normalized to [0,1] plus unwrapped-yaw and pitch series of
/// the gaze attention path.
fn window_series(window: &Trace, cfg: &PredictorConfig) -> Result<(Trace, Vec<f64>, Vec<f64>, Vec<f64>)> {
    let span_s = window.span_ms() as f64 / 1000.0;
    if (span_s - cfg.window_s).abs() > 0.1 * cfg.window_s {
        return Err(Error::invalid(format!(
            "window spans {span_s} s, more than 10% off the configured {} s",
            cfg.window_s
        )));
    }
    let rs = resample(window, cfg.rate_hz)?;
    let span = rs.span_ms() as f64;
    let t0 = rs.start_ms();
    let mut ts = Vec::with_capacity(rs.samples().len());
    let mut yaws = Vec::with_capacity(rs.samples().len());
    let mut pitches = Vec::with_capacity(rs.samples().len());
    let mut prev_yaw: Option<f64> = None;
    let mut offset = 0.0;
    for s in rs.samples() {
        let p = dir_to_sphere(&s.gaze_dir);
        let yaw = p.yaw_deg();
        if let Some(prev) = prev_yaw {
            // Unwrap: accumulate the wrapped increment so the series has
            // no ±180° seam jumps.
            offset += wrap_yaw_deg(yaw - prev) - (yaw - prev);
        }
        prev_yaw = Some(yaw);
        ts.push((s.t_ms - t0) as f64 / span);
        yaws.push(yaw + offset);
        pitches.push(p.pitch_deg());
    }
    Ok((rs, ts, yaws, pitches))
}

/// Horizon sample instants `t_end + k/rate`, `k = 1..round(horizon·rate)`.
fn horizon_instants(rs: &Trace, cfg: &PredictorConfig) -> Result<Vec<i64>> {
    let count = (cfg.horizon_s * cfg.rate_hz).round() as i64;
    if count < 1 {
        return Err(Error::invalid(format!(
            "horizon {} s is shorter than one sample interval at {} Hz",
            cfg.horizon_s, cfg.rate_hz
        )));
    }
    let t_end = rs.end_ms();
    Ok((1..=count)
        .map(|k| t_end + (k as f64 * 1000.0 / cfg.rate_hz).round() as i64)
        .collect())
}

/// Spherical mean with the documented fallback: an undefined mean yields
/// the last point and a raised flag.
fn cluster(points: &[SpherePoint]) -> Result<(SpherePoint, bool)> {
    match spherical_mean(points) {
        Ok(mean) => Ok((mean, false)),
        Err(Error::DegenerateMean(_)) => {
            let last = *points.last().ok_or_else(|| Error::invalid("no horizon points"))?;
            Ok((last, true))
        }
        Err(e) => Err(e),
    }
}

fn estimate_from_fits(
    rs: &Trace,
    cfg: &PredictorConfig,
    yaw_at: impl Fn(f64) -> f64,
    pitch_at: impl Fn(f64) -> f64,
) -> Result<AttentionEstimate> {
    let span = rs.span_ms() as f64;
    let t0 = rs.start_ms();
    let instants = horizon_instants(rs, cfg)?;
    let mut horizon_points = Vec::with_capacity(instants.len());
    for t in instants {
        let x = (t - t0) as f64 / span;
        let yaw = wrap_yaw_deg(yaw_at(x));
        let pitch = pitch_at(x).clamp(-90.0, 90.0);
        horizon_points.push((t, SpherePoint::new(yaw, pitch)?));
    }
    let pts: Vec<SpherePoint> = horizon_points.iter().map(|(_, p)| *p).collect();
    let (mean, degenerate_mean) = cluster(&pts)?;
    Ok(AttentionEstimate {
        mean,
        horizon_points,
        tolerance_deg: cfg.tolerance_deg,
        degenerate_mean,
    })
}

/// Predicts the attention over the next horizon from a trailing window.
///
/// Each axis is fitted as a linear trend plus an RBF-SVR trained on the
/// trend residuals. The split matters for extrapolation: an RBF machine
/// evaluated past its support decays toward its bias, so the trend carries
/// the drift across the horizon while the kernel shapes the pattern around
/// it. On a uniform drift the residuals vanish and the continuation is
/// exact.
pub fn predict_attention(
    window: &Trace,
    cfg: &PredictorConfig,
    svr_cfg: &SvrConfig,
) -> Result<AttentionEstimate> {
    cfg.validate()?;
    let (rs, ts, yaws, pitches) = window_series(window, cfg)?;
    let (ya, yb) = ols(&ts, &yaws);
    let (pa, pb) = ols(&ts, &pitches);
    let yaw_res: Vec<f64> = ts.iter().zip(&yaws).map(|(x, y)| y - (ya + yb * x)).collect();
    let pitch_res: Vec<f64> = ts.iter().zip(&pitches).map(|(x, y)| y - (pa + pb * x)).collect();
    let yaw_model = svr_train(&ts, &yaw_res, svr_cfg)?;
    let pitch_model = svr_train(&ts, &pitch_res, svr_cfg)?;
    estimate_from_fits(
        &rs,
        cfg,
        |x| ya + yb * x + svr_predict(&yaw_model, x),
        |x| pa + pb * x + svr_predict(&pitch_model, x),
    )
}

/// Ordinary least squares `y = a + b·x`.
fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let b = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (my - b * mx, b)
}

/// The least-squares baseline of the same pipeline.
pub fn linear_predict_attention(
    window: &Trace,
    cfg: &PredictorConfig,
) -> Result<AttentionEstimate> {
    cfg.validate()?;
    let (rs, ts, yaws, pitches) = window_series(window, cfg)?;
    let (ya, yb) = ols(&ts, &yaws);
    let (pa, pb) = ols(&ts, &pitches);
    estimate_from_fits(&rs, cfg, |x| ya + yb * x, |x| pa + pb * x)
}

/// Scores estimates against ground truth: a horizon instant is correct
/// when the estimate mean is within `tolerance_deg` (closed inequality) of
/// the true attention at that instant.
pub fn eval_accuracy(
    estimates: &[AttentionEstimate],
    truth: &Trace,
    tolerance_deg: f64,
) -> Result<AccuracyReport> {
    if estimates.is_empty() {
        return Err(Error::invalid("no estimates to evaluate"));
    }
    let mut per_estimate = Vec::with_capacity(estimates.len());
    let mut correct = 0usize;
    let mut total = 0usize;
    for est in estimates {
        let mut est_correct = 0usize;
        for (t, _) in &est.horizon_points {
            let actual = ground_truth_attention(truth, *t as f64)?;
            if angular_distance(&est.mean, &actual) <= tolerance_deg + 1e-9 {
                est_correct += 1;
            }
        }
        per_estimate.push(est_correct as f64 / est.horizon_points.len() as f64);
        correct += est_correct;
        total += est.horizon_points.len();
    }
    Ok(AccuracyReport {
        per_estimate,
        correct,
        total,
        accuracy: correct as f64 / total as f64,
    })
}
