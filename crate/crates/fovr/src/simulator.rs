//! Prefetch streaming playout over a bandwidth model.
//!
//! Each clip runs predict -> classify -> schedule -> download -> display.
//! Clip k's request fires one clip duration ahead of its playback deadline
//! (prefetch depth 1); if the download misses the deadline playback pauses
//! and every later deadline shifts by the accumulated stall. Delivered
//! quality is scored against the area map re-derived from ground-truth
//! attention at the display midpoint, so a mispredicted attention tile is
//! paid for with the slow-saturating HD coefficient on an LD bitrate.

use std::fmt::Write as FmtWrite;
use std::fs;
use std::path::Path;

use crate::catalog::TileCatalog;
use crate::error::{Error, Result};
use crate::geometry::{angular_distance, dir_to_sphere, quat_to_forward, SpherePoint};
use crate::prediction::{predict_attention, PredictorConfig};
use crate::qoe::{bvqa, clip_qoe, QoeWeights};
use crate::scheduler::{
    baseline_plan, classify_areas, compression_ratio, schedule_clip, AreaMap, BandwidthBudget,
    BaselineScheme, ClipPlan,
};
use crate::svr::SvrConfig;
use crate::trace::{ground_truth_attention, interpolate, Trace};

/// Link rate over wall time.
#[derive(Debug, Clone, PartialEq)]
pub enum BandwidthModel {
    Constant(f64),
    /// `(t_ms, bps)` step function; timestamps strictly increase from 0.
    Steps(Vec<(f64, f64)>),
}

impl BandwidthModel {
    pub fn constant(bps: f64) -> Result<BandwidthModel> {
        if !(bps > 0.0 && bps.is_finite()) {
            return Err(Error::invalid(format!(
                "bandwidth must be positive, got {bps} bps"
            )));
        }
        Ok(BandwidthModel::Constant(bps))
    }

    pub fn from_steps(steps: Vec<(f64, f64)>) -> Result<BandwidthModel> {
        if steps.is_empty() {
            return Err(Error::invalid("bandwidth trace has no steps"));
        }
        if steps[0].0 != 0.0 {
            return Err(Error::invalid(format!(
                "bandwidth trace must start at t=0, got {}",
                steps[0].0
            )));
        }
        for w in steps.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::invalid(format!(
                    "bandwidth timestamps must strictly increase, got {} after {}",
                    w[1].0, w[0].0
                )));
            }
        }
        for (t, bps) in &steps {
            if !(*bps > 0.0 && bps.is_finite()) {
                return Err(Error::invalid(format!(
                    "bandwidth must be positive, got {bps} bps at t={t}"
                )));
            }
        }
        Ok(BandwidthModel::Steps(steps))
    }

    /// Parses comma-separated `t_ms,bps` lines; `#` comments and blank
    /// lines are skipped.
    pub fn load<R: std::io::Read>(reader: R) -> Result<BandwidthModel> {
        use std::io::BufRead;
        let mut steps = Vec::new();
        for (idx, line) in std::io::BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let parse = |s: &str, what: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("bad {what} value {s:?}"),
                })
            };
            let mut parts = trimmed.split(',');
            let t = parts.next().unwrap_or("");
            let bps = parts.next().ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: "expected t_ms,bps".into(),
            })?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "expected exactly two fields".into(),
                });
            }
            steps.push((parse(t, "t_ms")?, parse(bps, "bps")?));
        }
        BandwidthModel::from_steps(steps)
    }

    pub fn load_path(path: &Path) -> Result<BandwidthModel> {
        BandwidthModel::load(fs::File::open(path)?)
    }

    /// Instantaneous rate at wall time `t_ms`.
    pub fn rate_at(&self, t_ms: f64) -> f64 {
        match self {
            BandwidthModel::Constant(bps) => *bps,
            BandwidthModel::Steps(steps) => {
                let idx = steps.partition_point(|(t, _)| *t <= t_ms);
                steps[idx.saturating_sub(1)].1
            }
        }
    }

    /// Wall time at which a transfer of `bits` starting at `start_ms`
    /// completes, integrating the step function.
    pub fn transfer_end(&self, start_ms: f64, bits: f64) -> f64 {
        match self {
            BandwidthModel::Constant(bps) => start_ms + bits / bps * 1000.0,
            BandwidthModel::Steps(steps) => {
                let mut t = start_ms;
                let mut left = bits;
                let mut idx = steps.partition_point(|(st, _)| *st <= t).saturating_sub(1);
                loop {
                    let rate = steps[idx].1;
                    match steps.get(idx + 1) {
                        Some((next_t, _)) if *next_t > t => {
                            let seg_bits = rate * (next_t - t) / 1000.0;
                            if seg_bits >= left {
                                return t + left / rate * 1000.0;
                            }
                            left -= seg_bits;
                            t = *next_t;
                            idx += 1;
                        }
                        Some(_) => idx += 1,
                        None => return t + left / rate * 1000.0,
                    }
                }
            }
        }
    }
}

/// Delivery scheme under simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Predict, classify, schedule against the budget.
    Fovr,
    /// Every tile at HD, no prediction.
    Full,
    /// HD at the head-forward tile, top SD elsewhere.
    HeadOnly,
    /// HD at the predicted gaze tile, top SD elsewhere.
    GazeOnly,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Fovr => "fovr",
            Scheme::Full => "full",
            Scheme::HeadOnly => "head_only",
            Scheme::GazeOnly => "gaze_only",
        }
    }
}

/// Playout timing model.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub predictor: PredictorConfig,
    pub svr: SvrConfig,
    /// Decode/render pipeline delay after the download completes.
    pub processing_delay_ms: f64,
    /// Attention inference cost at request time.
    pub prediction_delay_ms: f64,
    /// One-way request latency before the first byte.
    pub network_latency_ms: f64,
    /// Clips downloaded back-to-back before playback starts.
    pub startup_clips: usize,
}

impl Default for SimConfig {
    fn default() -> SimConfig {
        SimConfig {
            predictor: PredictorConfig::default(),
            svr: SvrConfig::default(),
            processing_delay_ms: 90.0,
            prediction_delay_ms: 0.066,
            network_latency_ms: 20.0,
            startup_clips: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.predictor.validate()?;
        self.svr.validate()?;
        for (v, what) in [
            (self.processing_delay_ms, "processing delay"),
            (self.prediction_delay_ms, "prediction delay"),
            (self.network_latency_ms, "network latency"),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!(
                    "{what} must be non-negative, got {v} ms"
                )));
            }
        }
        if self.startup_clips < 1 {
            return Err(Error::invalid("startup buffering needs at least 1 clip"));
        }
        Ok(())
    }
}

/// One clip's playout outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipRecord {
    pub clip_index: usize,
    pub request_t_ms: f64,
    pub ready_t_ms: f64,
    pub display_start_ms: f64,
    pub stall_ms: f64,
    pub plan: ClipPlan,
    /// Classified from ground-truth attention at the display midpoint.
    pub actual_areas: AreaMap,
    pub qoe_actual: f64,
    pub prediction_correct: bool,
    pub compression_ratio: f64,
}

/// Simulation outcome with aggregates derived from the records.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub records: Vec<ClipRecord>,
    pub mean_qoe: f64,
    pub stddev_qoe: f64,
    pub total_stall_ms: f64,
    pub stall_count: usize,
    pub total_bits: f64,
    pub mean_compression_ratio: f64,
    pub prediction_accuracy: f64,
}

impl SimReport {
    /// Computes every aggregate from the records (population stddev).
    pub fn from_records(records: Vec<ClipRecord>) -> SimReport {
        let n = records.len() as f64;
        let mut r = SimReport {
            records,
            mean_qoe: 0.0,
            stddev_qoe: 0.0,
            total_stall_ms: 0.0,
            stall_count: 0,
            total_bits: 0.0,
            mean_compression_ratio: 0.0,
            prediction_accuracy: 0.0,
        };
        if r.records.is_empty() {
            return r;
        }
        let mut correct = 0usize;
        for rec in &r.records {
            r.mean_qoe += rec.qoe_actual;
            r.total_stall_ms += rec.stall_ms;
            if rec.stall_ms > 0.0 {
                r.stall_count += 1;
            }
            r.total_bits += rec.plan.total_bits;
            r.mean_compression_ratio += rec.compression_ratio;
            if rec.prediction_correct {
                correct += 1;
            }
        }
        r.mean_qoe /= n;
        r.mean_compression_ratio /= n;
        r.prediction_accuracy = correct as f64 / n;
        let var = r
            .records
            .iter()
            .map(|rec| (rec.qoe_actual - r.mean_qoe).powi(2))
            .sum::<f64>()
            / n;
        r.stddev_qoe = var.sqrt();
        r
    }
}

/// Attention feeding the scheduler for one clip, per scheme.
fn predicted_attention(
    trace: &Trace,
    t_end_ms: f64,
    cfg: &SimConfig,
    scheme: Scheme,
) -> Result<Option<SpherePoint>> {
    match scheme {
        Scheme::Full => Ok(None),
        Scheme::HeadOnly => {
            let (head, _) = interpolate(trace, t_end_ms)?;
            Ok(Some(dir_to_sphere(&quat_to_forward(&head)?)))
        }
        Scheme::Fovr | Scheme::GazeOnly => {
            let from = t_end_ms - cfg.predictor.window_s * 1000.0;
            let window = trace.segment(from, t_end_ms)?;
            let est = predict_attention(&window, &cfg.predictor, &cfg.svr)?;
            Ok(Some(est.mean))
        }
    }
}

/// Plays the whole catalog over the trace and scores each clip.
///
/// Wall time 0 is the trace start; the first request fires once a full
/// prediction window of the trace has elapsed. The prediction window (and
/// the ground-truth lookup) clamps to the trace end, so a playout stretched
/// by stalls keeps scoring against the final pose.
pub fn simulate(
    trace: &Trace,
    cat: &TileCatalog,
    bw: &BandwidthModel,
    cfg: &SimConfig,
    scheme: Scheme,
) -> Result<SimReport> {
    cfg.validate()?;
    let clips = cat.clip_count();
    let dur = cat.clip_duration_ms() as f64;
    let window_ms = cfg.predictor.window_s * 1000.0;
    let needed = window_ms + clips as f64 * dur;
    if (trace.span_ms() as f64) < needed {
        return Err(Error::invalid(format!(
            "trace spans {} ms but the playout needs {} ms (window + {} clips of {} ms)",
            trace.span_ms(),
            needed,
            clips,
            dur
        )));
    }
    let trace_end = trace.end_ms() as f64;
    let startup = cfg.startup_clips.min(clips);

    struct Staged {
        request: f64,
        ready: f64,
        plan: ClipPlan,
        predicted: Option<SpherePoint>,
    }
    let mut staged: Vec<Staged> = Vec::with_capacity(clips);
    let mut stalls: Vec<f64> = Vec::with_capacity(clips);
    let mut playback_start = 0.0;
    let mut stall_acc = 0.0;
    for k in 0..clips {
        let request = if k == 0 {
            window_ms
        } else if k < startup {
            staged[k - 1].ready
        } else {
            let deadline = playback_start + k as f64 * dur + stall_acc;
            (deadline - dur).max(staged[k - 1].ready)
        };
        let t_end = request.min(trace_end);
        let predicted = predicted_attention(trace, t_end, cfg, scheme)?;
        let plan = match scheme {
            Scheme::Fovr => {
                let areas = classify_areas(predicted.as_ref().unwrap(), cat.grid());
                let budget = BandwidthBudget::from_bandwidth_bps(
                    bw.rate_at(request),
                    cat.clip_duration_ms(),
                )?;
                schedule_clip(&areas, cat, k, &budget)?
            }
            Scheme::Full => {
                let center = SpherePoint::new(0.0, 0.0).unwrap();
                baseline_plan(BaselineScheme::Full, &center, &center, cat, k)?
            }
            Scheme::HeadOnly => {
                let head = predicted.as_ref().unwrap();
                baseline_plan(BaselineScheme::HeadOnly, head, head, cat, k)?
            }
            Scheme::GazeOnly => {
                let gaze = predicted.as_ref().unwrap();
                baseline_plan(BaselineScheme::GazeOnly, gaze, gaze, cat, k)?
            }
        };
        let download_start = request + cfg.prediction_delay_ms + cfg.network_latency_ms;
        let ready = bw.transfer_end(download_start, plan.total_bits) + cfg.processing_delay_ms;
        if k == startup - 1 {
            playback_start = ready;
        }
        let stall = if k < startup {
            0.0
        } else {
            let deadline = playback_start + k as f64 * dur + stall_acc;
            (ready - deadline).max(0.0)
        };
        stall_acc += stall;
        stalls.push(stall);
        staged.push(Staged {
            request,
            ready,
            plan,
            predicted,
        });
    }

    let mut records = Vec::with_capacity(clips);
    let mut before = 0.0;
    for (k, st) in staged.into_iter().enumerate() {
        let deadline = playback_start + k as f64 * dur + before;
        let display = deadline + stalls[k];
        before += stalls[k];
        let t_mid = (display + dur / 2.0).min(trace_end);
        let truth = ground_truth_attention(trace, t_mid)?;
        let actual_areas = classify_areas(&truth, cat.grid());
        let mut scores = Vec::with_capacity(st.plan.choice.len());
        for (flat, rung) in st.plan.choice.iter().enumerate() {
            scores.push(bvqa(rung.bitrate_kbps, actual_areas.classes()[flat])?);
        }
        let qoe_actual = clip_qoe(
            cat.grid(),
            &scores,
            actual_areas.classes(),
            &QoeWeights::default(),
        )?;
        let prediction_correct = match &st.predicted {
            None => true,
            Some(p) => angular_distance(p, &truth) <= cfg.predictor.tolerance_deg + 1e-9,
        };
        let ratio = compression_ratio(&st.plan, cat, k)?;
        records.push(ClipRecord {
            clip_index: k,
            request_t_ms: st.request,
            ready_t_ms: st.ready,
            display_start_ms: display,
            stall_ms: stalls[k],
            plan: st.plan,
            actual_areas,
            qoe_actual,
            prediction_correct,
            compression_ratio: ratio,
        });
    }
    Ok(SimReport::from_records(records))
}

/// Report layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Rows,
    Summary,
}

pub const ROWS_HEADER: &str =
    "clip,request_ms,ready_ms,display_ms,stall_ms,bits,scheduled_qoe,actual_qoe,correct";

/// Byte-stable report emission: per-clip rows or a one-line aggregate
/// object with keys in sorted order.
pub fn emit_report(r: &SimReport, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Rows => {
            out.push_str(ROWS_HEADER);
            out.push('\n');
            for rec in &r.records {
                writeln!(
                    out,
                    "{},{:.3},{:.3},{:.3},{:.3},{:.0},{:.6},{:.6},{}",
                    rec.clip_index,
                    rec.request_t_ms,
                    rec.ready_t_ms,
                    rec.display_start_ms,
                    rec.stall_ms,
                    rec.plan.total_bits,
                    rec.plan.scheduled_qoe,
                    rec.qoe_actual,
                    u8::from(rec.prediction_correct)
                )
                .expect("string write");
            }
        }
        ReportFormat::Summary => {
            writeln!(
                out,
                concat!(
                    "{{\"clips\":{},\"mean_compression_ratio\":{:.6},\"mean_qoe\":{:.6},",
                    "\"prediction_accuracy\":{:.6},\"stall_count\":{},\"stddev_qoe\":{:.6},",
                    "\"total_bits\":{:.0},\"total_stall_ms\":{:.3}}}"
                ),
                r.records.len(),
                r.mean_compression_ratio,
                r.mean_qoe,
                r.prediction_accuracy,
                r.stall_count,
                r.stddev_qoe,
                r.total_bits,
                r.total_stall_ms
            )
            .expect("string write");
        }
    }
    out
}
