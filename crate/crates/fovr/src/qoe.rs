//! Quality models: bitrate-based per-tile quality (BVQA), area-weighted
//! per-clip QoE, mean opinion score, and a correlation utility.
//!
//! BVQA maps a tile bitrate to a `[0, 1)` quality score through a
//! saturating exponential whose rate constant depends on the vision area
//! the tile occupies. The constant is a property of the *area*, not of the
//! delivered rung: a tile inside the attention (HD) area saturates slowly,
//! so serving it a low bitrate is punished hard, while the same bitrate in
//! a peripheral (LD) area scores well.

use crate::error::{Error, Result};
use crate::geometry::TileGrid;

/// Vision hierarchy class of a tile: attention (HD), sub-attention (SD),
/// non-attention (LD).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AreaClass {
    Hd,
    Sd,
    Ld,
}

impl AreaClass {
    /// Exponential rate constant of the BVQA curve, per kbps.
    fn bvqa_coefficient(&self) -> f64 {
        match self {
            AreaClass::Ld => 0.648e-3,
            AreaClass::Sd => 0.324e-3,
            AreaClass::Hd => 0.081e-3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AreaClass::Hd => "hd",
            AreaClass::Sd => "sd",
            AreaClass::Ld => "ld",
        }
    }
}

/// Per-area QoE weights. Must be non-negative and sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QoeWeights {
    pub hd: f64,
    pub sd: f64,
    pub ld: f64,
}

impl QoeWeights {
    pub fn new(hd: f64, sd: f64, ld: f64) -> Result<QoeWeights> {
        if hd < 0.0 || sd < 0.0 || ld < 0.0 {
            return Err(Error::invalid("QoE weights must be non-negative"));
        }
        if (hd + sd + ld - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "QoE weights must sum to 1, got {}",
                hd + sd + ld
            )));
        }
        Ok(QoeWeights { hd, sd, ld })
    }

    fn class_weight(&self, class: AreaClass) -> f64 {
        match class {
            AreaClass::Hd => self.hd,
            AreaClass::Sd => self.sd,
            AreaClass::Ld => self.ld,
        }
    }
}

impl Default for QoeWeights {
    fn default() -> Self {
        QoeWeights {
            hd: 0.5,
            sd: 0.3,
            ld: 0.2,
        }
    }
}

/// Bitrate-based video quality of one tile: `1 - exp(-k * bitrate_kbps)`
/// with the area-dependent rate constant `k`.
pub fn bvqa(bitrate_kbps: f64, area: AreaClass) -> Result<f64> {
    if !bitrate_kbps.is_finite() || bitrate_kbps < 0.0 {
        return Err(Error::invalid(format!(
            "bitrate must be finite and non-negative, got {bitrate_kbps}"
        )));
    }
    Ok(1.0 - (-area.bvqa_coefficient() * bitrate_kbps).exp())
}

/// Per-tile QoE weights for an area partition: each class's weight is split
/// evenly among that class's tiles. Classes with no tiles contribute
/// nothing and their weight is renormalized across the remaining classes,
/// so the weights always sum to 1.
pub fn area_weights(areas: &[AreaClass], w: &QoeWeights) -> Vec<f64> {
    let mut counts = [0usize; 3];
    for a in areas {
        counts[*a as usize] += 1;
    }
    let mut present_total = 0.0;
    for class in [AreaClass::Hd, AreaClass::Sd, AreaClass::Ld] {
        if counts[class as usize] > 0 {
            present_total += w.class_weight(class);
        }
    }
    areas
        .iter()
        .map(|a| w.class_weight(*a) / present_total / counts[*a as usize] as f64)
        .collect()
}

/// Weighted QoE of one clip: the sum over tiles of `bvqa * weight`, with
/// per-tile weights from [`area_weights`]. Both slices are row-major over
/// the grid and must cover it completely.
pub fn clip_qoe(
    grid: &TileGrid,
    tile_bvqa: &[f64],
    areas: &[AreaClass],
    w: &QoeWeights,
) -> Result<f64> {
    let n = grid.tile_count();
    if tile_bvqa.len() != n || areas.len() != n {
        return Err(Error::invalid(format!(
            "incomplete tile coverage: grid has {n} tiles, got {} bvqa values and {} areas",
            tile_bvqa.len(),
            areas.len()
        )));
    }
    let weights = area_weights(areas, w);
    Ok(tile_bvqa
        .iter()
        .zip(weights.iter())
        .map(|(q, wt)| q * wt)
        .sum())
}

/// Mean opinion score: arithmetic mean of subjective scores.
pub fn mos(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::invalid("MOS of an empty score list"));
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::invalid("pearson needs at least 2 points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::invalid("pearson is undefined for zero variance"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}
