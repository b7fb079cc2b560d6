//! Head/gaze movement traces: file I/O, validation, resampling, synthesis,
//! and ground-truth attention lookup.
//!
//! File format: UTF-8, one record per line, `t_ms qw qx qy qz gx gy gz`
//! separated by single spaces, timestamps in integer milliseconds, reals
//! with at most 9 fractional digits. Lines starting with `#` are ignored.
//! A record may carry three extra trailing fields (gaze ray origin in
//! meters); the origin must be the sphere center and is not retained.
//!
//! Every stored sample is canonicalized to a fixed point of
//! normalize-then-round-to-9-decimals, so serializing a `Trace` is
//! lossless and `load(serialize(t)) == t` holds exactly.

use std::io::{self, BufRead, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal, UnitSphere};

use crate::error::{Error, Result};
use crate::geometry::{
    dir_to_sphere, sphere_to_dir, wrap_yaw_deg, Quaternion, SpherePoint, UnitVec3,
};

pub const DEFAULT_STATIC_SIGMA_DEG: f64 = 0.5;
pub const DEFAULT_PURSUIT_YAW_AMP_DEG: f64 = 30.0;
pub const DEFAULT_PURSUIT_PITCH_AMP_DEG: f64 = 10.0;
pub const DEFAULT_PURSUIT_PERIOD_S: f64 = 8.0;
pub const DEFAULT_PURSUIT_SIGMA_DEG: f64 = 0.5;
pub const DEFAULT_SACCADE_DWELL_S: f64 = 2.0;

/// One timed head-orientation + gaze-direction record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t_ms: i64,
    pub head: Quaternion,
    pub gaze_dir: UnitVec3,
}

/// An ordered movement recording with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    samples: Vec<TraceSample>,
    nominal_rate_hz: f64,
}

fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// Fixed point of normalize-then-round over the vector components.
/// Converges in one or two rounds for anything already near unit norm.
fn canon_components(v: &mut [f64]) {
    for _ in 0..4 {
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        let mut stable = true;
        for c in v.iter_mut() {
            let r = round9(*c / n);
            if r != *c {
                stable = false;
            }
            *c = r;
        }
        if stable {
            return;
        }
    }
}

fn canon_quat(q: &Quaternion) -> Result<Quaternion> {
    let u = q.normalized()?;
    let mut c = [u.w, u.x, u.y, u.z];
    canon_components(&mut c);
    Ok(Quaternion::new(c[0], c[1], c[2], c[3]))
}

fn canon_dir(d: &UnitVec3) -> UnitVec3 {
    let mut c = [d.x, d.y, d.z];
    canon_components(&mut c);
    UnitVec3 {
        x: c[0],
        y: c[1],
        z: c[2],
    }
}

impl Trace {
    /// Validates ordering, canonicalizes every sample, and infers the
    /// nominal rate from the sample count and span.
    pub fn new(samples: Vec<TraceSample>) -> Result<Trace> {
        if samples.len() < 2 {
            return Err(Error::validation(format!(
                "a trace needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if samples[0].t_ms < 0 {
            return Err(Error::validation(format!(
                "timestamps must be non-negative, got {}",
                samples[0].t_ms
            )));
        }
        let mut canon = Vec::with_capacity(samples.len());
        let mut prev_t = i64::MIN;
        for s in &samples {
            if s.t_ms <= prev_t {
                return Err(Error::validation(format!(
                    "timestamps must be strictly increasing, got {} after {}",
                    s.t_ms, prev_t
                )));
            }
            prev_t = s.t_ms;
            canon.push(TraceSample {
                t_ms: s.t_ms,
                head: canon_quat(&s.head)?,
                gaze_dir: canon_dir(&s.gaze_dir),
            });
        }
        let span = (canon[canon.len() - 1].t_ms - canon[0].t_ms) as f64;
        let nominal_rate_hz = (canon.len() - 1) as f64 * 1000.0 / span;
        Ok(Trace {
            samples: canon,
            nominal_rate_hz,
        })
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn nominal_rate_hz(&self) -> f64 {
        self.nominal_rate_hz
    }

    pub fn start_ms(&self) -> i64 {
        self.samples[0].t_ms
    }

    pub fn end_ms(&self) -> i64 {
        self.samples[self.samples.len() - 1].t_ms
    }

    pub fn span_ms(&self) -> i64 {
        self.end_ms() - self.start_ms()
    }

    /// Sub-trace of all samples inside `[from_ms, to_ms]`.
    pub fn segment(&self, from_ms: f64, to_ms: f64) -> Result<Trace> {
        let picked: Vec<TraceSample> = self
            .samples
            .iter()
            .filter(|s| {
                let t = s.t_ms as f64;
                t >= from_ms - 1e-9 && t <= to_ms + 1e-9
            })
            .copied()
            .collect();
        if picked.len() < 2 {
            return Err(Error::invalid(format!(
                "segment [{from_ms}, {to_ms}] ms holds {} samples, need at least 2",
                picked.len()
            )));
        }
        Trace::new(picked)
    }
}

/// Parses a trace file. Quaternions and gaze directions are normalized
/// after a norm gate: anything off unit length by more than 1e-3 before
/// normalization is rejected.
pub fn load_trace<R: io::Read>(reader: R) -> Result<Trace> {
    let buf = io::BufReader::new(reader);
    let mut samples = Vec::new();
    let mut prev_t: Option<i64> = None;
    for (idx, line) in buf.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 8 && fields.len() != 11 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 8 or 11 fields, got {}", fields.len()),
            });
        }
        let t_ms: i64 = fields[0].parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad timestamp {:?}", fields[0]),
        })?;
        let mut reals = [0.0f64; 10];
        for (i, raw) in fields[1..].iter().enumerate() {
            let v: f64 = raw.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad real {raw:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("non-finite value {raw:?}"),
                });
            }
            reals[i] = v;
        }
        if t_ms < 0 {
            return Err(Error::validation(format!(
                "line {lineno}: timestamp {t_ms} is negative"
            )));
        }
        if let Some(p) = prev_t {
            if t_ms <= p {
                return Err(Error::validation(format!(
                    "line {lineno}: timestamp {t_ms} does not increase past {p}"
                )));
            }
        }
        prev_t = Some(t_ms);

        let q = Quaternion::new(reals[0], reals[1], reals[2], reals[3]);
        if (q.norm() - 1.0).abs() > 1e-3 {
            return Err(Error::validation(format!(
                "line {lineno}: quaternion norm {} is outside the 1e-3 gate",
                q.norm()
            )));
        }
        let gnorm = (reals[4] * reals[4] + reals[5] * reals[5] + reals[6] * reals[6]).sqrt();
        if (gnorm - 1.0).abs() > 1e-3 {
            return Err(Error::validation(format!(
                "line {lineno}: gaze direction norm {gnorm} is outside the 1e-3 gate"
            )));
        }
        if fields.len() == 11 {
            let onorm = (reals[7] * reals[7] + reals[8] * reals[8] + reals[9] * reals[9]).sqrt();
            if onorm > 1e-6 {
                return Err(Error::validation(format!(
                    "line {lineno}: gaze origin is {onorm} m off the sphere center"
                )));
            }
        }
        samples.push(TraceSample {
            t_ms,
            head: q,
            gaze_dir: UnitVec3::new(reals[4], reals[5], reals[6])?,
        });
    }
    Trace::new(samples)
}

pub fn load_trace_path(path: &Path) -> Result<Trace> {
    load_trace(std::fs::File::open(path)?)
}

/// Writes the canonical 8-field format, reals with exactly 9 fractional
/// digits. Byte-stable: the same trace always serializes identically.
pub fn serialize_trace<W: Write>(tr: &Trace, mut w: W) -> Result<()> {
    for s in tr.samples() {
        writeln!(
            w,
            "{} {:.9} {:.9} {:.9} {:.9} {:.9} {:.9} {:.9}",
            s.t_ms, s.head.w, s.head.x, s.head.y, s.head.z, s.gaze_dir.x, s.gaze_dir.y, s.gaze_dir.z
        )?;
    }
    Ok(())
}

/// Head orientation and gaze direction interpolated at `t_ms`, spherically
/// on both. Errors outside the trace span.
pub fn interpolate(tr: &Trace, t_ms: f64) -> Result<(Quaternion, UnitVec3)> {
    let samples = tr.samples();
    let (t0, t1) = (tr.start_ms() as f64, tr.end_ms() as f64);
    if !(t_ms >= t0 && t_ms <= t1) {
        return Err(Error::Range(format!(
            "t={t_ms} ms outside trace span [{t0}, {t1}] ms"
        )));
    }
    // Last sample with t <= t_ms, capped to leave a right neighbor.
    let idx = samples
        .partition_point(|s| (s.t_ms as f64) <= t_ms)
        .saturating_sub(1)
        .min(samples.len() - 2);
    let (a, b) = (&samples[idx], &samples[idx + 1]);
    let u = (t_ms - a.t_ms as f64) / ((b.t_ms - a.t_ms) as f64);
    let head = Quaternion::slerp(&a.head, &b.head, u)?;
    let gaze = UnitVec3::slerp(&a.gaze_dir, &b.gaze_dir, u);
    Ok((head, gaze))
}

/// Ground-truth attention: the interpolated gaze direction as a sphere
/// point.
pub fn ground_truth_attention(tr: &Trace, t_ms: f64) -> Result<SpherePoint> {
    let (_, gaze) = interpolate(tr, t_ms)?;
    Ok(dir_to_sphere(&gaze))
}

/// Resamples onto a uniform grid at `rate_hz` over the original span,
/// endpoints preserved.
pub fn resample(tr: &Trace, rate_hz: f64) -> Result<Trace> {
    if !(rate_hz > 0.0 && rate_hz.is_finite()) {
        return Err(Error::invalid(format!(
            "resample rate must be positive, got {rate_hz}"
        )));
    }
    let span = tr.span_ms();
    let k_max = ((span as f64 * rate_hz / 1000.0).round() as i64).max(1);
    if k_max > span {
        return Err(Error::invalid(format!(
            "rate {rate_hz} Hz needs sub-millisecond timestamps over a {span} ms span"
        )));
    }
    let t0 = tr.start_ms();
    let mut samples = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let t = t0 + (k as f64 * span as f64 / k_max as f64).round() as i64;
        let (head, gaze) = interpolate(tr, t as f64)?;
        samples.push(TraceSample {
            t_ms: t,
            head,
            gaze_dir: gaze,
        });
    }
    Trace::new(samples)
}

/// Synthetic motion regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticKind {
    /// Fixed attention plus Gaussian angular noise.
    Static { sigma_deg: f64 },
    /// Sinusoidal yaw with a quarter-phase-shifted sinusoidal pitch, plus
    /// Gaussian angular noise; the deterministic path starts at phase 0.
    Pursuit {
        yaw_amp_deg: f64,
        pitch_amp_deg: f64,
        period_s: f64,
        sigma_deg: f64,
    },
    /// Piecewise-constant attention: exponential dwell times, uniform
    /// jumps over the sphere.
    Saccade { mean_dwell_s: f64 },
}

impl SyntheticKind {
    pub fn static_default() -> SyntheticKind {
        SyntheticKind::Static {
            sigma_deg: DEFAULT_STATIC_SIGMA_DEG,
        }
    }

    pub fn pursuit_default() -> SyntheticKind {
        SyntheticKind::Pursuit {
            yaw_amp_deg: DEFAULT_PURSUIT_YAW_AMP_DEG,
            pitch_amp_deg: DEFAULT_PURSUIT_PITCH_AMP_DEG,
            period_s: DEFAULT_PURSUIT_PERIOD_S,
            sigma_deg: DEFAULT_PURSUIT_SIGMA_DEG,
        }
    }

    pub fn saccade_default() -> SyntheticKind {
        SyntheticKind::Saccade {
            mean_dwell_s: DEFAULT_SACCADE_DWELL_S,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SyntheticKind::Static { sigma_deg } => {
                if !(*sigma_deg >= 0.0 && sigma_deg.is_finite()) {
                    return Err(Error::invalid(format!("sigma must be >= 0, got {sigma_deg}")));
                }
            }
            SyntheticKind::Pursuit {
                yaw_amp_deg,
                pitch_amp_deg,
                period_s,
                sigma_deg,
            } => {
                if !(yaw_amp_deg.is_finite() && pitch_amp_deg.is_finite()) {
                    return Err(Error::invalid("pursuit amplitudes must be finite"));
                }
                if !(*period_s > 0.0 && period_s.is_finite()) {
                    return Err(Error::invalid(format!(
                        "pursuit period must be positive, got {period_s}"
                    )));
                }
                if !(*sigma_deg >= 0.0 && sigma_deg.is_finite()) {
                    return Err(Error::invalid(format!("sigma must be >= 0, got {sigma_deg}")));
                }
            }
            SyntheticKind::Saccade { mean_dwell_s } => {
                if !(*mean_dwell_s > 0.0 && mean_dwell_s.is_finite()) {
                    return Err(Error::invalid(format!(
                        "mean dwell must be positive, got {mean_dwell_s}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Generator parameters shared by all kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticParams {
    pub kind: SyntheticKind,
    pub duration_s: f64,
    pub rate_hz: f64,
    /// Path center (static point, pursuit midpoint, saccade start).
    pub center: SpherePoint,
}

impl SyntheticParams {
    pub fn new(kind: SyntheticKind, duration_s: f64, rate_hz: f64) -> SyntheticParams {
        SyntheticParams {
            kind,
            duration_s,
            rate_hz,
            center: SpherePoint::new(0.0, 0.0).unwrap(),
        }
    }
}

fn head_at(point: &SpherePoint) -> Quaternion {
    let yaw = Quaternion::from_axis_angle(UnitVec3::Z, point.yaw_deg());
    let pitch = Quaternion::from_axis_angle(UnitVec3::Y, -point.pitch_deg());
    yaw.mul(&pitch)
}

/// Gaussian perturbation in the tangent plane at `dir`, then renormalized.
fn perturb(dir: &UnitVec3, sigma_deg: f64, rng: &mut ChaCha8Rng) -> UnitVec3 {
    if sigma_deg <= 0.0 {
        return *dir;
    }
    let (px, py, pz) = if dir.z.abs() < 0.9 {
        UnitVec3::Z.cross(dir)
    } else {
        UnitVec3::X.cross(dir)
    };
    let e1 = UnitVec3::new(px, py, pz).expect("perpendicular of a non-parallel pair");
    let (qx, qy, qz) = dir.cross(&e1);
    let s = sigma_deg.to_radians();
    let n1: f64 = rng.sample(StandardNormal);
    let n2: f64 = rng.sample(StandardNormal);
    UnitVec3::new(
        dir.x + s * (n1 * e1.x + n2 * qx),
        dir.y + s * (n1 * e1.y + n2 * qy),
        dir.z + s * (n1 * e1.z + n2 * qz),
    )
    .expect("perturbed direction keeps positive norm")
}

/// Generates a synthetic trace, a pure function of `(params, seed)`.
pub fn gen_synthetic(p: &SyntheticParams, seed: u64) -> Result<Trace> {
    if !(p.duration_s > 0.0 && p.duration_s.is_finite()) {
        return Err(Error::invalid(format!(
            "duration must be positive, got {}",
            p.duration_s
        )));
    }
    if !(p.rate_hz > 0.0 && p.rate_hz.is_finite()) {
        return Err(Error::invalid(format!(
            "rate must be positive, got {}",
            p.rate_hz
        )));
    }
    p.kind.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k_max = ((p.duration_s * p.rate_hz).round() as i64).max(1);
    let mut samples = Vec::with_capacity(k_max as usize + 1);

    // Saccade state; unused by the other kinds.
    let mut current = p.center;
    let mut next_jump_s = f64::INFINITY;
    if let SyntheticKind::Saccade { mean_dwell_s } = p.kind {
        let exp = Exp::new(1.0 / mean_dwell_s).expect("positive rate");
        next_jump_s = rng.sample(exp);
    }

    for k in 0..=k_max {
        let t_ms = (k as f64 * 1000.0 / p.rate_hz).round() as i64;
        let t_s = t_ms as f64 / 1000.0;
        let (point, gaze) = match p.kind {
            SyntheticKind::Static { sigma_deg } => {
                let dir = sphere_to_dir(&p.center);
                (p.center, perturb(&dir, sigma_deg, &mut rng))
            }
            SyntheticKind::Pursuit {
                yaw_amp_deg,
                pitch_amp_deg,
                period_s,
                sigma_deg,
            } => {
                let phase = std::f64::consts::TAU * t_s / period_s;
                let yaw = wrap_yaw_deg(p.center.yaw_deg() + yaw_amp_deg * phase.sin());
                let pitch = (p.center.pitch_deg() + pitch_amp_deg * phase.cos())
                    .clamp(-90.0, 90.0);
                let point = SpherePoint::new(yaw, pitch)?;
                let dir = sphere_to_dir(&point);
                (point, perturb(&dir, sigma_deg, &mut rng))
            }
            SyntheticKind::Saccade { mean_dwell_s } => {
                let exp = Exp::new(1.0 / mean_dwell_s).expect("positive rate");
                while t_s >= next_jump_s {
                    let v: [f64; 3] = rng.sample(UnitSphere);
                    current = dir_to_sphere(&UnitVec3::new(v[0], v[1], v[2])?);
                    next_jump_s += rng.sample(exp);
                }
                (current, sphere_to_dir(&current))
            }
        };
        samples.push(TraceSample {
            t_ms,
            head: head_at(&point),
            gaze_dir: gaze,
        });
    }
    Trace::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{angular_distance, quat_to_forward};
    use approx::assert_relative_eq;

    fn static_params(sigma: f64, duration: f64, rate: f64) -> SyntheticParams {
        SyntheticParams::new(SyntheticKind::Static { sigma_deg: sigma }, duration, rate)
    }

    #[test]
    fn loads_two_well_formed_lines() {
        let text = "# comment\n0 1 0 0 0 1 0 0\n100 1 0 0 0 0 1 0\n";
        let tr = load_trace(text.as_bytes()).unwrap();
        assert_eq!(tr.samples().len(), 2);
        assert_eq!(tr.start_ms(), 0);
        assert_eq!(tr.end_ms(), 100);
        assert_relative_eq!(tr.nominal_rate_hz(), 10.0);
        assert_eq!(tr.samples()[1].gaze_dir, UnitVec3::Y);
    }

    #[test]
    fn rejects_bad_quaternion_norm() {
        let text = "0 0.5 0 0 0 1 0 0\n100 1 0 0 0 1 0 0\n";
        let err = load_trace(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn rejects_non_monotone_timestamps() {
        let text = "100 1 0 0 0 1 0 0\n100 1 0 0 0 1 0 0\n";
        assert!(matches!(
            load_trace(text.as_bytes()).unwrap_err(),
            Error::Validation(_)
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "0 1 0 0 0 1 0 0\n100 1 0 0 0 1 0\n";
        match load_trace(text.as_bytes()).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
        let text = "0 1 0 0 0 one 0 0\n";
        assert!(matches!(
            load_trace(text.as_bytes()).unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn gaze_origin_must_be_centered() {
        let ok = "0 1 0 0 0 1 0 0 0 0 0\n100 1 0 0 0 1 0 0 0.0000005 0 0\n";
        assert_eq!(load_trace(ok.as_bytes()).unwrap().samples().len(), 2);
        let bad = "0 1 0 0 0 1 0 0 0.1 0 0\n100 1 0 0 0 1 0 0 0 0 0\n";
        assert!(matches!(
            load_trace(bad.as_bytes()).unwrap_err(),
            Error::Validation(_)
        ));
    }

    #[test]
    fn rejects_single_sample_and_negative_time() {
        assert!(load_trace("0 1 0 0 0 1 0 0\n".as_bytes()).is_err());
        assert!(load_trace("-5 1 0 0 0 1 0 0\n0 1 0 0 0 1 0 0\n".as_bytes()).is_err());
    }

    #[test]
    fn serialize_then_load_is_identity() {
        for seed in [0u64, 3, 9] {
            let tr = gen_synthetic(&static_params(0.7, 3.0, 10.0), seed).unwrap();
            let mut bytes = Vec::new();
            serialize_trace(&tr, &mut bytes).unwrap();
            let back = load_trace(bytes.as_slice()).unwrap();
            assert_eq!(tr, back);
            let mut again = Vec::new();
            serialize_trace(&back, &mut again).unwrap();
            assert_eq!(bytes, again);
        }
    }

    #[test]
    fn exact_trace_round_trips_bit_for_bit() {
        let tr = gen_synthetic(&static_params(0.0, 1.0, 10.0), 0).unwrap();
        let mut b1 = Vec::new();
        serialize_trace(&tr, &mut b1).unwrap();
        assert_eq!(load_trace(b1.as_slice()).unwrap(), tr);
    }

    #[test]
    fn static_zero_sigma_has_constant_attention() {
        let p = SyntheticParams {
            center: SpherePoint::new(20.0, -10.0).unwrap(),
            ..static_params(0.0, 10.0, 10.0)
        };
        let tr = gen_synthetic(&p, 42).unwrap();
        assert_eq!(tr.samples().len(), 101);
        for s in tr.samples() {
            let pt = dir_to_sphere(&s.gaze_dir);
            assert!(angular_distance(&pt, &p.center) < 1e-6);
            let fwd = quat_to_forward(&s.head).unwrap();
            assert!(angular_distance(&dir_to_sphere(&fwd), &p.center) < 1e-6);
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        for kind in [
            SyntheticKind::static_default(),
            SyntheticKind::pursuit_default(),
            SyntheticKind::saccade_default(),
        ] {
            let p = SyntheticParams::new(kind, 5.0, 10.0);
            let a = gen_synthetic(&p, 7).unwrap();
            let b = gen_synthetic(&p, 7).unwrap();
            assert_eq!(a, b);
            let c = gen_synthetic(&p, 8).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn pursuit_peaks_at_quarter_period() {
        let p = SyntheticParams::new(
            SyntheticKind::Pursuit {
                yaw_amp_deg: 30.0,
                pitch_amp_deg: 0.0,
                period_s: 8.0,
                sigma_deg: 0.0,
            },
            4.0,
            10.0,
        );
        let tr = gen_synthetic(&p, 0).unwrap();
        let at_2s = ground_truth_attention(&tr, 2000.0).unwrap();
        assert_relative_eq!(at_2s.yaw_deg(), 30.0, epsilon = 1e-6);
        assert_relative_eq!(at_2s.pitch_deg(), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn saccade_dwells_then_jumps() {
        let p = SyntheticParams::new(SyntheticKind::Saccade { mean_dwell_s: 2.0 }, 30.0, 10.0);
        let tr = gen_synthetic(&p, 5).unwrap();
        let mut jumps = 0;
        let mut still = 0;
        for w in tr.samples().windows(2) {
            let step = w[0].gaze_dir.angle_deg(&w[1].gaze_dir);
            if step > 1.0 {
                jumps += 1;
            } else {
                still += 1;
            }
        }
        // 30 s at mean dwell 2 s: roughly a dozen jumps, far more dwells.
        assert!(jumps >= 3, "expected jumps, saw {jumps}");
        assert!(still > 10 * jumps, "dwell should dominate: {still} vs {jumps}");
    }

    #[test]
    fn resample_is_a_fixed_point_on_uniform_traces() {
        let tr = gen_synthetic(&static_params(0.4, 2.0, 10.0), 1).unwrap();
        let rs = resample(&tr, 10.0).unwrap();
        assert_eq!(tr.samples().len(), rs.samples().len());
        for (a, b) in tr.samples().iter().zip(rs.samples()) {
            assert_eq!(a.t_ms, b.t_ms);
            assert!((a.gaze_dir.x - b.gaze_dir.x).abs() < 1e-9);
            assert!((a.gaze_dir.y - b.gaze_dir.y).abs() < 1e-9);
            assert!((a.gaze_dir.z - b.gaze_dir.z).abs() < 1e-9);
            assert!(a.head.dot(&b.head).abs() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn resample_builds_the_arithmetic_grid() {
        let two = Trace::new(vec![
            TraceSample {
                t_ms: 0,
                head: Quaternion::IDENTITY,
                gaze_dir: UnitVec3::X,
            },
            TraceSample {
                t_ms: 1000,
                head: Quaternion::IDENTITY,
                gaze_dir: UnitVec3::X,
            },
        ])
        .unwrap();
        let rs = resample(&two, 10.0).unwrap();
        let ts: Vec<i64> = rs.samples().iter().map(|s| s.t_ms).collect();
        assert_eq!(ts, (0..=10).map(|k| k * 100).collect::<Vec<_>>());
    }

    #[test]
    fn resample_interpolates_a_quarter_turn() {
        let a = TraceSample {
            t_ms: 0,
            head: Quaternion::IDENTITY,
            gaze_dir: UnitVec3::X,
        };
        let b = TraceSample {
            t_ms: 1000,
            head: Quaternion::from_axis_angle(UnitVec3::Z, 90.0),
            gaze_dir: UnitVec3::Y,
        };
        let tr = Trace::new(vec![a, b]).unwrap();
        let rs = resample(&tr, 4.0).unwrap();
        let yaws: Vec<f64> = rs
            .samples()
            .iter()
            .map(|s| dir_to_sphere(&s.gaze_dir).yaw_deg())
            .collect();
        for (got, want) in yaws.iter().zip([0.0, 22.5, 45.0, 67.5, 90.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-6);
        }
    }

    #[test]
    fn resample_rejects_bad_rates() {
        let tr = gen_synthetic(&static_params(0.0, 1.0, 10.0), 0).unwrap();
        assert!(resample(&tr, 0.0).is_err());
        assert!(resample(&tr, -1.0).is_err());
        assert!(resample(&tr, 5000.0).is_err());
    }

    #[test]
    fn ground_truth_at_samples_and_midpoints() {
        let mk = |t_ms, yaw| TraceSample {
            t_ms,
            head: Quaternion::IDENTITY,
            gaze_dir: sphere_to_dir(&SpherePoint::new(yaw, 0.0).unwrap()),
        };
        let tr = Trace::new(vec![mk(0, 0.0), mk(100, 10.0)]).unwrap();
        let at0 = ground_truth_attention(&tr, 0.0).unwrap();
        assert_relative_eq!(at0.yaw_deg(), 0.0, epsilon = 1e-7);
        let mid = ground_truth_attention(&tr, 50.0).unwrap();
        assert_relative_eq!(mid.yaw_deg(), 5.0, epsilon = 1e-6);
        assert!(matches!(
            ground_truth_attention(&tr, -1.0).unwrap_err(),
            Error::Range(_)
        ));
        assert!(ground_truth_attention(&tr, 101.0).is_err());
    }

    #[test]
    fn segment_selects_a_closed_interval() {
        let tr = gen_synthetic(&static_params(0.0, 10.0, 10.0), 0).unwrap();
        let seg = tr.segment(2000.0, 7000.0).unwrap();
        assert_eq!(seg.start_ms(), 2000);
        assert_eq!(seg.end_ms(), 7000);
        assert_eq!(seg.samples().len(), 51);
        assert!(tr.segment(9990.0, 9999.0).is_err());
    }
}
