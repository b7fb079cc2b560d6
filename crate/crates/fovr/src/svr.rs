//! Scalar ε-support-vector regression with an RBF kernel.
//!
//! The dual problem is solved by maximal-violating-pair coordinate ascent
//! over the combined coefficients `β_i = α_i* − α_i ∈ [−C, C]` with the
//! equality constraint `Σ β_i = 0` kept invariant by every pair update.
//! Problems here are tiny (a sliding window of at most a few dozen
//! samples), so the full kernel matrix is materialized up front.

use crate::error::{Error, Result};

/// Solver and model hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvrConfig {
    /// Regularization weight; bounds the dual coefficients to `[-c, c]`.
    pub c: f64,
    /// Half-width of the insensitive tube, in output units.
    pub epsilon: f64,
    /// RBF kernel sharpness.
    pub gamma: f64,
    /// KKT gap below which the solver stops.
    pub tol: f64,
    /// Pair-update budget before giving up unconverged.
    pub max_iter: usize,
}

impl Default for SvrConfig {
    fn default() -> Self {
        SvrConfig {
            c: 100.0,
            epsilon: 0.5,
            gamma: 10.0,
            tol: 1e-4,
            max_iter: 10_000,
        }
    }
}

impl SvrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid(format!("c must be positive, got {}", self.c)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be positive"));
        }
        Ok(())
    }
}

/// Trained model: exact zeros are dropped, so only support vectors remain.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    pub support_inputs: Vec<f64>,
    pub dual_coeffs: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    /// False when the solver hit its iteration budget before the KKT gap
    /// closed; the model is still usable, just not optimal.
    pub converged: bool,
}

/// Gaussian radial basis kernel `exp(-gamma * (x1 - x2)^2)`.
///
/// Underflows to 0 for far-apart inputs rather than erroring.
pub fn rbf_kernel(x1: f64, x2: f64, gamma: f64) -> f64 {
    let d = x1 - x2;
    (-gamma * d * d).exp()
}

/// Fit an ε-SVR to scalar samples.
///
/// Runs pairwise dual ascent until the KKT gap drops below `cfg.tol` or
/// `cfg.max_iter` updates have been spent. The bias is the mean of the
/// per-vector estimates over unbounded support vectors when any exist,
/// otherwise the midpoint of the feasible bias interval.
pub fn svr_train(xs: &[f64], ys: &[f64], cfg: &SvrConfig) -> Result<SvrModel> {
    cfg.validate()?;
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "training set must be non-empty with equal lengths, got {} xs and {} ys",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
        return Err(Error::invalid("training data must be finite"));
    }

    let n = xs.len();
    let c = cfg.c;
    let eps = cfg.epsilon;

    let mut kernel = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            kernel[i * n + j] = rbf_kernel(xs[i], xs[j], cfg.gamma);
        }
    }

    let mut beta = vec![0.0; n];
    // g_i = y_i - Σ_j beta_j K_ij, the bias-free residual.
    let mut g: Vec<f64> = ys.to_vec();
    let mut converged = false;

    for _ in 0..cfg.max_iter {
        // Most violating pair: the largest "push up" candidate against the
        // smallest "push down" candidate.
        let mut up: Option<(usize, f64)> = None;
        let mut down: Option<(usize, f64)> = None;
        for i in 0..n {
            if beta[i] < c {
                let v = g[i] - eps;
                if up.map_or(true, |(_, best)| v > best) {
                    up = Some((i, v));
                }
            }
            if beta[i] > -c {
                let v = g[i] + eps;
                if down.map_or(true, |(_, best)| v < best) {
                    down = Some((i, v));
                }
            }
        }
        let ((i, up_v), (j, down_v)) = match (up, down) {
            (Some(u), Some(d)) => (u, d),
            // Σβ = 0 guarantees both sets are non-empty, but stop cleanly
            // rather than trust that in release builds.
            _ => {
                converged = true;
                break;
            }
        };
        let gap = up_v - down_v;
        if gap <= cfg.tol {
            converged = true;
            break;
        }

        let eta = (kernel[i * n + i] + kernel[j * n + j] - 2.0 * kernel[i * n + j]).max(1e-12);
        let lambda = (gap / eta).min(c - beta[i]).min(beta[j] + c);
        beta[i] += lambda;
        beta[j] -= lambda;
        for k in 0..n {
            g[k] -= lambda * (kernel[i * n + k] - kernel[j * n + k]);
        }
    }

    // Bias. Unbounded support vectors pin it exactly; otherwise take the
    // midpoint of the interval every KKT condition leaves feasible.
    let edge = 1e-9 * c;
    let mut unbounded_sum = 0.0;
    let mut unbounded_count = 0usize;
    for i in 0..n {
        if beta[i].abs() > edge && beta[i].abs() < c - edge {
            unbounded_sum += g[i] - beta[i].signum() * eps;
            unbounded_count += 1;
        }
    }
    let bias = if unbounded_count > 0 {
        unbounded_sum / unbounded_count as f64
    } else {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for i in 0..n {
            if beta[i] < c {
                lo = lo.max(g[i] - eps);
            }
            if beta[i] > -c {
                hi = hi.min(g[i] + eps);
            }
        }
        (lo + hi) / 2.0
    };

    let mut support_inputs = Vec::new();
    let mut dual_coeffs = Vec::new();
    for i in 0..n {
        if beta[i] != 0.0 {
            support_inputs.push(xs[i]);
            dual_coeffs.push(beta[i]);
        }
    }

    Ok(SvrModel {
        support_inputs,
        dual_coeffs,
        bias,
        gamma: cfg.gamma,
        converged,
    })
}

/// Evaluate `f(x) = Σ coeff_i · K(x_i, x) + bias`.
pub fn svr_predict(m: &SvrModel, x: f64) -> f64 {
    assert_eq!(
        m.support_inputs.len(),
        m.dual_coeffs.len(),
        "malformed model"
    );
    let mut acc = m.bias;
    for (xi, coeff) in m.support_inputs.iter().zip(m.dual_coeffs.iter()) {
        acc += coeff * rbf_kernel(*xi, x, m.gamma);
    }
    acc
}
