//! Area classification and per-clip bitrate selection.
//!
//! The attention tile is served HD, its 8-neighborhood SD, everything else
//! LD. Rungs are chosen per class: the greedy scheduler starts every class
//! at its top rung and walks the LD ladder down, then the SD ladder, until
//! the clip fits the bandwidth budget; the HD rung is never lowered. An
//! exhaustive oracle enumerates every class-rung assignment for small
//! instances, and composition baselines (all-HD, head-only, gaze-only)
//! cover the comparison schemes.

use crate::catalog::{selection_bits, Rung, TileCatalog};
use crate::error::{Error, Result};
use crate::geometry::{point_to_tile, SpherePoint, TileGrid, TileIndex};
use crate::qoe::{area_weights, bvqa, clip_qoe, AreaClass, QoeWeights};

/// Complete tile-class partition with exactly one HD tile.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaMap {
    grid: TileGrid,
    classes: Vec<AreaClass>,
    attention_tile: TileIndex,
}

impl AreaMap {
    /// Builds a map from an explicit partition. The attention tile must be
    /// the single HD entry.
    pub fn from_classes(
        grid: TileGrid,
        classes: Vec<AreaClass>,
        attention_tile: TileIndex,
    ) -> Result<AreaMap> {
        if classes.len() != grid.tile_count() {
            return Err(Error::invalid(format!(
                "partition covers {} tiles, grid has {}",
                classes.len(),
                grid.tile_count()
            )));
        }
        let hd_count = classes.iter().filter(|c| **c == AreaClass::Hd).count();
        if hd_count != 1 {
            return Err(Error::invalid(format!(
                "partition must have exactly one hd tile, got {hd_count}"
            )));
        }
        if classes[grid.flat_index(attention_tile)] != AreaClass::Hd {
            return Err(Error::invalid(
                "attention tile is not the partition's hd tile",
            ));
        }
        Ok(AreaMap {
            grid,
            classes,
            attention_tile,
        })
    }

    pub fn grid(&self) -> &TileGrid {
        &self.grid
    }

    pub fn classes(&self) -> &[AreaClass] {
        &self.classes
    }

    pub fn attention_tile(&self) -> TileIndex {
        self.attention_tile
    }

    pub fn count(&self, class: AreaClass) -> usize {
        self.classes.iter().filter(|c| **c == class).count()
    }
}

/// HD at the attention tile, SD on its 8-neighborhood (columns wrap around
/// the yaw seam, rows clamp at the poles, clipped neighbors are dropped),
/// LD everywhere else.
pub fn classify_areas(attention: &SpherePoint, grid: &TileGrid) -> AreaMap {
    let hd = point_to_tile(attention, grid);
    let mut classes = vec![AreaClass::Ld; grid.tile_count()];
    let (cols, rows) = (grid.cols() as i64, grid.rows() as i64);
    for dr in -1..=1i64 {
        for dc in -1..=1i64 {
            if dr == 0 && dc == 0 {
                continue;
            }
            let row = hd.row as i64 + dr;
            if row < 0 || row >= rows {
                continue;
            }
            let col = (hd.col as i64 + dc).rem_euclid(cols);
            let tile = TileIndex::new(col as u32, row as u32);
            if tile != hd {
                classes[grid.flat_index(tile)] = AreaClass::Sd;
            }
        }
    }
    classes[grid.flat_index(hd)] = AreaClass::Hd;
    AreaMap {
        grid: *grid,
        classes,
        attention_tile: hd,
    }
}

/// Bits available for one clip interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthBudget {
    w_bits: f64,
}

impl BandwidthBudget {
    pub fn from_bits(w_bits: f64) -> Result<BandwidthBudget> {
        if !(w_bits > 0.0 && w_bits.is_finite()) {
            return Err(Error::invalid(format!(
                "budget must be positive, got {w_bits} bits"
            )));
        }
        Ok(BandwidthBudget { w_bits })
    }

    /// Budget of one clip interval at a constant link rate.
    pub fn from_bandwidth_bps(bps: f64, clip_duration_ms: u64) -> Result<BandwidthBudget> {
        BandwidthBudget::from_bits(bps * clip_duration_ms as f64 / 1000.0)
    }

    pub fn bits(&self) -> f64 {
        self.w_bits
    }
}

/// A scheduled clip: the per-tile rung choice with its size and QoE.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipPlan {
    pub clip_index: usize,
    /// Row-major over the grid.
    pub choice: Vec<Rung>,
    pub total_bits: f64,
    pub scheduled_qoe: f64,
    /// False when even the lowest rungs exceed the budget (the plan is
    /// still returned so a player can stall through it).
    pub feasible: bool,
}

/// Per-class bit and weighted-QoE sums, indexed by rung, so rung descent
/// and enumeration cost O(1) per combination.
struct ClassSums {
    hd_bits: f64,
    hd_qoe: f64,
    sd_bits: Vec<f64>,
    sd_qoe: Vec<f64>,
    ld_bits: Vec<f64>,
    ld_qoe: Vec<f64>,
}

fn class_sums(cat: &TileCatalog, clip: usize, classes: &[AreaClass]) -> Result<ClassSums> {
    let weights = area_weights(classes, &QoeWeights::default());
    let dur = cat.clip_duration_ms() as f64;
    let ladder = cat.ladder();
    let mut s = ClassSums {
        hd_bits: 0.0,
        hd_qoe: 0.0,
        sd_bits: vec![0.0; ladder.rung_count(AreaClass::Sd)],
        sd_qoe: vec![0.0; ladder.rung_count(AreaClass::Sd)],
        ld_bits: vec![0.0; ladder.rung_count(AreaClass::Ld)],
        ld_qoe: vec![0.0; ladder.rung_count(AreaClass::Ld)],
    };
    for (flat, class) in classes.iter().enumerate() {
        for idx in 0..ladder.rung_count(*class) {
            let rate = cat.bitrate(clip, flat, *class, idx)?;
            let bits = rate * dur;
            let q = weights[flat] * bvqa(rate, *class)?;
            match class {
                AreaClass::Hd => {
                    s.hd_bits += bits;
                    s.hd_qoe += q;
                }
                AreaClass::Sd => {
                    s.sd_bits[idx] += bits;
                    s.sd_qoe[idx] += q;
                }
                AreaClass::Ld => {
                    s.ld_bits[idx] += bits;
                    s.ld_qoe[idx] += q;
                }
            }
        }
    }
    Ok(s)
}

/// Materializes the plan for one (SD rung, LD rung) assignment.
fn plan_at(
    cat: &TileCatalog,
    clip: usize,
    classes: &[AreaClass],
    sd_idx: usize,
    ld_idx: usize,
    feasible: bool,
) -> Result<ClipPlan> {
    let choice = cat.class_selection(clip, classes, |class| match class {
        AreaClass::Hd => 0,
        AreaClass::Sd => sd_idx,
        AreaClass::Ld => ld_idx,
    })?;
    let total_bits = selection_bits(cat, clip, &choice)?;
    let scheduled_qoe = plan_qoe(cat.grid(), &choice)?;
    Ok(ClipPlan {
        clip_index: clip,
        choice,
        total_bits,
        scheduled_qoe,
        feasible,
    })
}

/// QoE of a delivered choice scored against its own class partition.
pub fn plan_qoe(grid: &TileGrid, choice: &[Rung]) -> Result<f64> {
    let classes: Vec<AreaClass> = choice.iter().map(|r| r.class).collect();
    let mut scores = Vec::with_capacity(choice.len());
    for r in choice {
        scores.push(bvqa(r.bitrate_kbps, r.class)?);
    }
    clip_qoe(grid, &scores, &classes, &QoeWeights::default())
}

fn check_same_grid(areas: &AreaMap, cat: &TileCatalog) -> Result<()> {
    if areas.grid() != cat.grid() {
        return Err(Error::invalid(format!(
            "area map grid {}x{} does not match catalog grid {}x{}",
            areas.grid().cols(),
            areas.grid().rows(),
            cat.grid().cols(),
            cat.grid().rows()
        )));
    }
    Ok(())
}

/// Greedy rung descent: start all classes at the top; while over budget,
/// lower LD one rung, then (LD exhausted) lower SD one rung; HD stays. If
/// both ladders run out the lowest plan is returned flagged infeasible.
pub fn schedule_clip(
    areas: &AreaMap,
    cat: &TileCatalog,
    clip: usize,
    budget: &BandwidthBudget,
) -> Result<ClipPlan> {
    check_same_grid(areas, cat)?;
    let sums = class_sums(cat, clip, areas.classes())?;
    let (sd_n, ld_n) = (sums.sd_bits.len(), sums.ld_bits.len());
    let (mut sd_idx, mut ld_idx) = (0usize, 0usize);
    let mut feasible = true;
    loop {
        let total = sums.hd_bits + sums.sd_bits[sd_idx] + sums.ld_bits[ld_idx];
        if total <= budget.bits() {
            break;
        }
        if ld_idx + 1 < ld_n {
            ld_idx += 1;
        } else if sd_idx + 1 < sd_n {
            sd_idx += 1;
        } else {
            feasible = false;
            break;
        }
    }
    plan_at(cat, clip, areas.classes(), sd_idx, ld_idx, feasible)
}

/// Exact optimum by enumerating every class-rung assignment. Ties go to
/// fewer bits, then the lexicographically smallest (LD rung, SD rung).
pub fn exhaustive_schedule(
    areas: &AreaMap,
    cat: &TileCatalog,
    clip: usize,
    budget: &BandwidthBudget,
) -> Result<ClipPlan> {
    check_same_grid(areas, cat)?;
    let ladder = cat.ladder();
    let combos = ladder.rung_count(AreaClass::Sd) as u64 * ladder.rung_count(AreaClass::Ld) as u64;
    if combos > 1_000_000 {
        return Err(Error::Capacity(format!(
            "{combos} class-rung assignments exceed the enumeration bound of 1e6"
        )));
    }
    let sums = class_sums(cat, clip, areas.classes())?;
    let mut best: Option<(f64, f64, usize, usize)> = None;
    for ld_idx in 0..sums.ld_bits.len() {
        for sd_idx in 0..sums.sd_bits.len() {
            let bits = sums.hd_bits + sums.sd_bits[sd_idx] + sums.ld_bits[ld_idx];
            if bits > budget.bits() {
                continue;
            }
            let qoe = sums.hd_qoe + sums.sd_qoe[sd_idx] + sums.ld_qoe[ld_idx];
            let better = match &best {
                None => true,
                Some((bq, bb, bl, bs)) => {
                    qoe > *bq
                        || (qoe == *bq && bits < *bb)
                        || (qoe == *bq && bits == *bb && (ld_idx, sd_idx) < (*bl, *bs))
                }
            };
            if better {
                best = Some((qoe, bits, ld_idx, sd_idx));
            }
        }
    }
    match best {
        Some((_, _, ld_idx, sd_idx)) => plan_at(cat, clip, areas.classes(), sd_idx, ld_idx, true),
        None => plan_at(
            cat,
            clip,
            areas.classes(),
            sums.sd_bits.len() - 1,
            sums.ld_bits.len() - 1,
            false,
        ),
    }
}

/// Composition baselines; these deliver a fixed shape with no budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineScheme {
    /// Every tile at HD.
    Full,
    /// HD at the head-direction tile, top SD everywhere else.
    HeadOnly,
    /// HD at the gaze tile, top SD everywhere else.
    GazeOnly,
}

/// Builds a baseline composition plan for one clip.
pub fn baseline_plan(
    scheme: BaselineScheme,
    head_attention: &SpherePoint,
    gaze_attention: &SpherePoint,
    cat: &TileCatalog,
    clip: usize,
) -> Result<ClipPlan> {
    let grid = cat.grid();
    let classes: Vec<AreaClass> = match scheme {
        BaselineScheme::Full => vec![AreaClass::Hd; grid.tile_count()],
        BaselineScheme::HeadOnly | BaselineScheme::GazeOnly => {
            let attention = match scheme {
                BaselineScheme::HeadOnly => head_attention,
                _ => gaze_attention,
            };
            let hd = point_to_tile(attention, grid);
            let mut classes = vec![AreaClass::Sd; grid.tile_count()];
            classes[grid.flat_index(hd)] = AreaClass::Hd;
            classes
        }
    };
    let choice = cat.class_selection(clip, &classes, |_| 0)?;
    let total_bits = selection_bits(cat, clip, &choice)?;
    let scheduled_qoe = plan_qoe(grid, &choice)?;
    Ok(ClipPlan {
        clip_index: clip,
        choice,
        total_bits,
        scheduled_qoe,
        feasible: true,
    })
}

/// `1 - plan bits / all-HD bits` for the clip.
pub fn compression_ratio(plan: &ClipPlan, cat: &TileCatalog, clip: usize) -> Result<f64> {
    let all_hd: Vec<AreaClass> = vec![AreaClass::Hd; cat.grid().tile_count()];
    let hd_choice = cat.class_selection(clip, &all_hd, |_| 0)?;
    let hd_bits = selection_bits(cat, clip, &hd_choice)?;
    Ok(1.0 - plan.total_bits / hd_bits)
}
