//! The tile-bitrate catalog standing in for offline-sliced video:
//! definition ladders, per-clip per-tile rung bitrates, canonical manifest
//! I/O, and synthetic catalog generation.
//!
//! Manifest format: one JSON document with keys in sorted order
//! (`clip_count`, `clip_duration_ms`, `grid`, `ladder`, `table`). The
//! table is nested `[clip][tile][slot]` with tiles row-major over the grid
//! and slots ordered HD, SD rungs descending, LD rungs descending. All
//! bitrates are quantized to 3 decimals at construction, which makes
//! save/load round-trips byte-identical.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TileGrid;
use crate::qoe::AreaClass;

/// One selectable (class, bitrate) option.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rung {
    pub class: AreaClass,
    pub bitrate_kbps: f64,
}

impl Rung {
    pub fn new(class: AreaClass, bitrate_kbps: f64) -> Result<Rung> {
        if !(bitrate_kbps > 0.0 && bitrate_kbps.is_finite()) {
            return Err(Error::invalid(format!(
                "rung bitrate must be positive, got {bitrate_kbps}"
            )));
        }
        Ok(Rung {
            class,
            bitrate_kbps,
        })
    }
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn check_descending(class: AreaClass, rates: &[f64]) -> Result<()> {
    if rates.is_empty() {
        return Err(Error::validation(format!(
            "{} ladder needs at least one rung",
            class.name()
        )));
    }
    for v in rates {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(Error::validation(format!(
                "{} rung bitrate must be positive, got {v}",
                class.name()
            )));
        }
    }
    for w in rates.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::validation(format!(
                "{} rungs must strictly decrease, got {} then {}",
                class.name(),
                w[0],
                w[1]
            )));
        }
    }
    Ok(())
}

/// Nominal per-class bitrates: one HD rung, descending SD and LD rungs.
#[derive(Debug, Clone, PartialEq)]
pub struct DefinitionLadder {
    hd_kbps: f64,
    sd_kbps: Vec<f64>,
    ld_kbps: Vec<f64>,
}

impl DefinitionLadder {
    pub fn new(hd_kbps: f64, sd_kbps: Vec<f64>, ld_kbps: Vec<f64>) -> Result<DefinitionLadder> {
        let hd_kbps = round3(hd_kbps);
        let sd_kbps: Vec<f64> = sd_kbps.into_iter().map(round3).collect();
        let ld_kbps: Vec<f64> = ld_kbps.into_iter().map(round3).collect();
        check_descending(AreaClass::Hd, std::slice::from_ref(&hd_kbps))?;
        check_descending(AreaClass::Sd, &sd_kbps)?;
        check_descending(AreaClass::Ld, &ld_kbps)?;
        Ok(DefinitionLadder {
            hd_kbps,
            sd_kbps,
            ld_kbps,
        })
    }

    pub fn hd_kbps(&self) -> f64 {
        self.hd_kbps
    }

    pub fn sd_kbps(&self) -> &[f64] {
        &self.sd_kbps
    }

    pub fn ld_kbps(&self) -> &[f64] {
        &self.ld_kbps
    }

    pub fn rung_count(&self, class: AreaClass) -> usize {
        match class {
            AreaClass::Hd => 1,
            AreaClass::Sd => self.sd_kbps.len(),
            AreaClass::Ld => self.ld_kbps.len(),
        }
    }

    pub fn slot_count(&self) -> usize {
        1 + self.sd_kbps.len() + self.ld_kbps.len()
    }

    /// Flat slot of a class rung in a table row: HD, then SD, then LD.
    pub fn slot(&self, class: AreaClass, rung_idx: usize) -> Result<usize> {
        if rung_idx >= self.rung_count(class) {
            return Err(Error::Range(format!(
                "{} has {} rungs, index {rung_idx} is out of range",
                class.name(),
                self.rung_count(class)
            )));
        }
        Ok(match class {
            AreaClass::Hd => 0,
            AreaClass::Sd => 1 + rung_idx,
            AreaClass::Ld => 1 + self.sd_kbps.len() + rung_idx,
        })
    }

    fn class_of_slot(&self, slot: usize) -> (AreaClass, usize) {
        if slot == 0 {
            (AreaClass::Hd, 0)
        } else if slot <= self.sd_kbps.len() {
            (AreaClass::Sd, slot - 1)
        } else {
            (AreaClass::Ld, slot - 1 - self.sd_kbps.len())
        }
    }
}

/// Complete per-clip per-tile per-rung bitrate table.
#[derive(Debug, Clone, PartialEq)]
pub struct TileCatalog {
    grid: TileGrid,
    clip_duration_ms: u64,
    ladder: DefinitionLadder,
    /// `[clip][tile row-major][slot]`, kbps, 3-decimal quantized.
    table: Vec<Vec<Vec<f64>>>,
}

impl TileCatalog {
    pub fn new(
        grid: TileGrid,
        clip_duration_ms: u64,
        ladder: DefinitionLadder,
        table: Vec<Vec<Vec<f64>>>,
    ) -> Result<TileCatalog> {
        if clip_duration_ms == 0 {
            return Err(Error::validation("clip duration must be positive"));
        }
        if table.is_empty() {
            return Err(Error::validation("catalog needs at least one clip"));
        }
        let tiles = grid.tile_count();
        let slots = ladder.slot_count();
        let mut quantized = Vec::with_capacity(table.len());
        for (clip, rows) in table.into_iter().enumerate() {
            if rows.len() != tiles {
                let tile = grid.tile_at(rows.len().min(tiles - 1));
                return Err(Error::validation(format!(
                    "clip {clip} covers {} tiles, expected {tiles}; first missing tile ({}, {})",
                    rows.len(),
                    tile.col,
                    tile.row
                )));
            }
            let mut qrows = Vec::with_capacity(tiles);
            for (flat, row) in rows.into_iter().enumerate() {
                let tile = grid.tile_at(flat);
                if row.len() != slots {
                    let (class, idx) = ladder.class_of_slot(row.len().min(slots - 1));
                    return Err(Error::validation(format!(
                        "clip {clip} tile ({}, {}): {} rung entries, expected {slots}; first missing {} rung {idx}",
                        tile.col,
                        tile.row,
                        row.len(),
                        class.name()
                    )));
                }
                let q: Vec<f64> = row.into_iter().map(round3).collect();
                check_descending(AreaClass::Hd, &q[0..1]).map_err(|e| at_tile(clip, flat, &grid, e))?;
                check_descending(AreaClass::Sd, &q[1..1 + ladder.sd_kbps.len()])
                    .map_err(|e| at_tile(clip, flat, &grid, e))?;
                check_descending(AreaClass::Ld, &q[1 + ladder.sd_kbps.len()..])
                    .map_err(|e| at_tile(clip, flat, &grid, e))?;
                qrows.push(q);
            }
            quantized.push(qrows);
        }
        Ok(TileCatalog {
            grid,
            clip_duration_ms,
            ladder,
            table: quantized,
        })
    }

    pub fn grid(&self) -> &TileGrid {
        &self.grid
    }

    pub fn clip_count(&self) -> usize {
        self.table.len()
    }

    pub fn clip_duration_ms(&self) -> u64 {
        self.clip_duration_ms
    }

    pub fn ladder(&self) -> &DefinitionLadder {
        &self.ladder
    }

    fn check_clip(&self, clip: usize) -> Result<()> {
        if clip >= self.clip_count() {
            return Err(Error::Range(format!(
                "clip {clip} out of range, catalog has {}",
                self.clip_count()
            )));
        }
        Ok(())
    }

    /// Bitrate of one tile at one class rung.
    pub fn bitrate(&self, clip: usize, tile_flat: usize, class: AreaClass, rung_idx: usize) -> Result<f64> {
        self.check_clip(clip)?;
        if tile_flat >= self.grid.tile_count() {
            return Err(Error::Range(format!(
                "tile {tile_flat} out of range, grid has {}",
                self.grid.tile_count()
            )));
        }
        let slot = self.ladder.slot(class, rung_idx)?;
        Ok(self.table[clip][tile_flat][slot])
    }

    /// The chosen rung of every tile, row-major.
    pub fn class_selection(&self, clip: usize, classes: &[AreaClass], rung_of: impl Fn(AreaClass) -> usize) -> Result<Vec<Rung>> {
        self.check_clip(clip)?;
        if classes.len() != self.grid.tile_count() {
            return Err(Error::invalid(format!(
                "area list covers {} tiles, grid has {}",
                classes.len(),
                self.grid.tile_count()
            )));
        }
        let mut out = Vec::with_capacity(classes.len());
        for (flat, class) in classes.iter().enumerate() {
            let bitrate = self.bitrate(clip, flat, *class, rung_of(*class))?;
            out.push(Rung {
                class: *class,
                bitrate_kbps: bitrate,
            });
        }
        Ok(out)
    }
}

fn at_tile(clip: usize, flat: usize, grid: &TileGrid, e: Error) -> Error {
    let tile = grid.tile_at(flat);
    Error::validation(format!("clip {clip} tile ({}, {}): {e}", tile.col, tile.row))
}

/// Total bits of a complete per-tile selection for one clip:
/// `Σ bitrate_kbps · 1000 · duration_s`.
pub fn selection_bits(cat: &TileCatalog, clip: usize, choice: &[Rung]) -> Result<f64> {
    cat.check_clip(clip)?;
    if choice.len() != cat.grid().tile_count() {
        return Err(Error::invalid(format!(
            "selection covers {} tiles, grid has {}",
            choice.len(),
            cat.grid().tile_count()
        )));
    }
    let kbps: f64 = choice.iter().map(|r| r.bitrate_kbps).sum();
    Ok(kbps * cat.clip_duration_ms() as f64)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDoc {
    cols: u32,
    rows: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LadderDoc {
    hd: Vec<f64>,
    ld: Vec<f64>,
    sd: Vec<f64>,
}

/// Field order is the canonical (sorted) key order of the manifest.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestDoc {
    clip_count: usize,
    clip_duration_ms: u64,
    grid: GridDoc,
    ladder: LadderDoc,
    table: Vec<Vec<Vec<f64>>>,
}

/// Parses and validates a manifest.
pub fn load_manifest<R: io::Read>(reader: R) -> Result<TileCatalog> {
    let doc: ManifestDoc = serde_json::from_reader(reader).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    if doc.ladder.hd.len() != 1 {
        return Err(Error::validation(format!(
            "hd must have exactly one rung, got {}",
            doc.ladder.hd.len()
        )));
    }
    if doc.table.len() != doc.clip_count {
        return Err(Error::validation(format!(
            "table has {} clips, clip_count says {}",
            doc.table.len(),
            doc.clip_count
        )));
    }
    let grid = TileGrid::new(doc.grid.cols, doc.grid.rows)?;
    let ladder = DefinitionLadder::new(doc.ladder.hd[0], doc.ladder.sd, doc.ladder.ld)?;
    TileCatalog::new(grid, doc.clip_duration_ms, ladder, doc.table)
}

pub fn load_manifest_path(path: &std::path::Path) -> Result<TileCatalog> {
    load_manifest(std::fs::File::open(path)?)
}

/// Writes the canonical manifest form; byte-stable for a given catalog.
pub fn save_manifest<W: Write>(cat: &TileCatalog, mut w: W) -> Result<()> {
    let doc = ManifestDoc {
        clip_count: cat.clip_count(),
        clip_duration_ms: cat.clip_duration_ms(),
        grid: GridDoc {
            cols: cat.grid().cols(),
            rows: cat.grid().rows(),
        },
        ladder: LadderDoc {
            hd: vec![cat.ladder().hd_kbps()],
            ld: cat.ladder().ld_kbps().to_vec(),
            sd: cat.ladder().sd_kbps().to_vec(),
        },
        table: cat.table.clone(),
    };
    serde_json::to_writer(&mut w, &doc)
        .map_err(|e| Error::validation(format!("manifest serialization failed: {e}")))?;
    writeln!(w)?;
    Ok(())
}

/// Builds a catalog with per-tile HD bitrates `base_kbps / tile_count`,
/// multiplicatively jittered by up to `±jitter`, and SD/LD rungs at the
/// given ratios of each tile's HD rate. Deterministic per seed.
pub fn synth_catalog(
    grid: TileGrid,
    clips: usize,
    base_kbps: f64,
    sd_ratios: &[f64],
    ld_ratios: &[f64],
    jitter: f64,
    seed: u64,
) -> Result<TileCatalog> {
    if !(base_kbps > 0.0 && base_kbps.is_finite()) {
        return Err(Error::invalid(format!(
            "base bitrate must be positive, got {base_kbps}"
        )));
    }
    if clips == 0 {
        return Err(Error::invalid("need at least one clip"));
    }
    if !(0.0..0.5).contains(&jitter) {
        return Err(Error::invalid(format!(
            "jitter must be in [0, 0.5), got {jitter}"
        )));
    }
    for ratios in [sd_ratios, ld_ratios] {
        if ratios.is_empty() {
            return Err(Error::invalid("each class needs at least one ratio"));
        }
        for r in ratios {
            if !(*r > 0.0 && *r < 1.0) {
                return Err(Error::invalid(format!("ratios must lie in (0,1), got {r}")));
            }
        }
        if ratios.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("ratios must strictly decrease"));
        }
    }

    let hd_nominal = base_kbps / grid.tile_count() as f64;
    let ladder = DefinitionLadder::new(
        hd_nominal,
        sd_ratios.iter().map(|r| r * hd_nominal).collect(),
        ld_ratios.iter().map(|r| r * hd_nominal).collect(),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Vec::with_capacity(clips);
    for _ in 0..clips {
        let mut rows = Vec::with_capacity(grid.tile_count());
        for _ in 0..grid.tile_count() {
            let factor = if jitter > 0.0 {
                1.0 + jitter * rng.gen_range(-1.0..1.0)
            } else {
                1.0
            };
            let hd = round3(hd_nominal * factor);
            let mut row = Vec::with_capacity(ladder.slot_count());
            row.push(hd);
            row.extend(sd_ratios.iter().map(|r| round3(hd * r)));
            row.extend(ld_ratios.iter().map(|r| round3(hd * r)));
            rows.push(row);
        }
        table.push(rows);
    }
    TileCatalog::new(grid, 1000, ladder, table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_catalog() -> TileCatalog {
        synth_catalog(
            TileGrid::new(2, 2).unwrap(),
            1,
            400.0,
            &[0.66],
            &[0.12],
            0.0,
            0,
        )
        .unwrap()
    }

    #[test]
    fn jitter_zero_divides_base_evenly() {
        let cat = synth_catalog(
            TileGrid::default(),
            2,
            1296.0,
            &[0.66],
            &[0.12],
            0.0,
            0,
        )
        .unwrap();
        for clip in 0..2 {
            for flat in 0..cat.grid().tile_count() {
                assert_eq!(cat.bitrate(clip, flat, AreaClass::Hd, 0).unwrap(), 1.0);
                assert_eq!(cat.bitrate(clip, flat, AreaClass::Sd, 0).unwrap(), 0.66);
                assert_eq!(cat.bitrate(clip, flat, AreaClass::Ld, 0).unwrap(), 0.12);
            }
        }
    }

    #[test]
    fn synth_is_deterministic_and_jitter_varies_tiles() {
        let grid = TileGrid::new(4, 3).unwrap();
        let a = synth_catalog(grid, 3, 1200.0, &[0.66, 0.33], &[0.12], 0.2, 9).unwrap();
        let b = synth_catalog(grid, 3, 1200.0, &[0.66, 0.33], &[0.12], 0.2, 9).unwrap();
        assert_eq!(a, b);
        let c = synth_catalog(grid, 3, 1200.0, &[0.66, 0.33], &[0.12], 0.2, 10).unwrap();
        assert_ne!(a, c);
        let h0 = a.bitrate(0, 0, AreaClass::Hd, 0).unwrap();
        let spread = (0..12).any(|f| a.bitrate(0, f, AreaClass::Hd, 0).unwrap() != h0);
        assert!(spread, "jitter should vary per-tile bitrates");
    }

    #[test]
    fn synth_rejects_bad_parameters() {
        let grid = TileGrid::new(2, 2).unwrap();
        assert!(synth_catalog(grid, 1, 400.0, &[1.5], &[0.12], 0.0, 0).is_err());
        assert!(synth_catalog(grid, 1, 400.0, &[0.66], &[0.12, 0.2], 0.0, 0).is_err());
        assert!(synth_catalog(grid, 1, 400.0, &[0.66], &[0.12], 0.5, 0).is_err());
        assert!(synth_catalog(grid, 1, 400.0, &[0.66], &[], 0.0, 0).is_err());
        assert!(synth_catalog(grid, 0, 400.0, &[0.66], &[0.12], 0.0, 0).is_err());
        assert!(synth_catalog(grid, 1, 0.0, &[0.66], &[0.12], 0.0, 0).is_err());
    }

    #[test]
    fn selection_bits_sums_kilobits_times_duration() {
        let cat = small_catalog();
        let all_100: Vec<Rung> = (0..4)
            .map(|_| Rung::new(AreaClass::Hd, 100.0).unwrap())
            .collect();
        assert_eq!(selection_bits(&cat, 0, &all_100).unwrap(), 400_000.0);

        let mixed = [
            Rung::new(AreaClass::Hd, 100.0).unwrap(),
            Rung::new(AreaClass::Sd, 66.0).unwrap(),
            Rung::new(AreaClass::Ld, 12.0).unwrap(),
            Rung::new(AreaClass::Ld, 12.0).unwrap(),
        ];
        assert_eq!(selection_bits(&cat, 0, &mixed).unwrap(), 190_000.0);

        assert!(selection_bits(&cat, 0, &mixed[..3]).is_err());
        assert!(selection_bits(&cat, 9, &mixed).is_err());
    }

    #[test]
    fn zero_duration_is_rejected_at_construction() {
        let ladder = DefinitionLadder::new(1.0, vec![0.66], vec![0.12]).unwrap();
        let table = vec![vec![vec![1.0, 0.66, 0.12]; 4]];
        let err = TileCatalog::new(TileGrid::new(2, 2).unwrap(), 0, ladder, table).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn manifest_round_trip_is_byte_identical() {
        for cat in [
            small_catalog(),
            synth_catalog(
                TileGrid::new(3, 2).unwrap(),
                2,
                600.0,
                &[0.66, 0.33],
                &[0.12, 0.05],
                0.3,
                7,
            )
            .unwrap(),
        ] {
            let mut b1 = Vec::new();
            save_manifest(&cat, &mut b1).unwrap();
            let back = load_manifest(b1.as_slice()).unwrap();
            assert_eq!(back, cat);
            let mut b2 = Vec::new();
            save_manifest(&back, &mut b2).unwrap();
            assert_eq!(b1, b2);
        }
    }

    #[test]
    fn minimal_manifest_parses() {
        let text = r#"{"clip_count":1,"clip_duration_ms":1000,"grid":{"cols":2,"rows":2},"ladder":{"hd":[100.0],"ld":[12.0],"sd":[66.0]},"table":[[[100.0,66.0,12.0],[100.0,66.0,12.0],[100.0,66.0,12.0],[100.0,66.0,12.0]]]}"#;
        let cat = load_manifest(text.as_bytes()).unwrap();
        assert_eq!(cat.grid().tile_count(), 4);
        assert_eq!(cat.clip_count(), 1);
        assert_eq!(cat.ladder().rung_count(AreaClass::Sd), 1);
    }

    #[test]
    fn missing_entries_are_named() {
        let text = r#"{"clip_count":1,"clip_duration_ms":1000,"grid":{"cols":2,"rows":2},"ladder":{"hd":[100.0],"ld":[12.0],"sd":[66.0]},"table":[[[100.0,66.0,12.0],[100.0,66.0,12.0],[100.0,66.0,12.0],[100.0,66.0]]]}"#;
        let err = load_manifest(text.as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("tile (1, 1)"), "{msg}");
        assert!(msg.contains("ld rung 0"), "{msg}");

        let text = r#"{"clip_count":2,"clip_duration_ms":1000,"grid":{"cols":2,"rows":2},"ladder":{"hd":[100.0],"ld":[12.0],"sd":[66.0]},"table":[[[100.0,66.0,12.0],[100.0,66.0,12.0],[100.0,66.0,12.0],[100.0,66.0,12.0]]]}"#;
        assert!(load_manifest(text.as_bytes()).is_err());

        let garbage = "{ not json";
        assert!(matches!(
            load_manifest(garbage.as_bytes()).unwrap_err(),
            Error::Parse { .. }
        ));
    }

    #[test]
    fn non_descending_rungs_rejected() {
        let err = DefinitionLadder::new(100.0, vec![50.0, 60.0], vec![10.0]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        let ladder = DefinitionLadder::new(100.0, vec![66.0], vec![12.0]).unwrap();
        let table = vec![vec![
            vec![100.0, 66.0, 12.0],
            vec![100.0, 66.0, 12.0],
            vec![100.0, 66.0, 120.0],
            vec![100.0, 66.0, 12.0],
        ]];
        // Single-rung classes cannot be non-descending; corrupt a 2-rung row.
        let ladder2 = DefinitionLadder::new(100.0, vec![66.0], vec![12.0, 6.0]).unwrap();
        let bad = vec![vec![
            vec![100.0, 66.0, 12.0, 6.0],
            vec![100.0, 66.0, 6.0, 12.0],
            vec![100.0, 66.0, 12.0, 6.0],
            vec![100.0, 66.0, 12.0, 6.0],
        ]];
        assert!(TileCatalog::new(TileGrid::new(2, 2).unwrap(), 1000, ladder2, bad).is_err());
        // A 3-slot row under a 3-slot ladder with positive values passes.
        assert!(TileCatalog::new(TileGrid::new(2, 2).unwrap(), 1000, ladder, table).is_ok());
    }

    #[test]
    fn ladder_slot_arithmetic() {
        let ladder = DefinitionLadder::new(100.0, vec![66.0, 33.0], vec![12.0, 5.0]).unwrap();
        assert_eq!(ladder.slot_count(), 5);
        assert_eq!(ladder.slot(AreaClass::Hd, 0).unwrap(), 0);
        assert_eq!(ladder.slot(AreaClass::Sd, 1).unwrap(), 2);
        assert_eq!(ladder.slot(AreaClass::Ld, 0).unwrap(), 3);
        assert!(ladder.slot(AreaClass::Hd, 1).is_err());
        assert!(ladder.slot(AreaClass::Ld, 2).is_err());
    }
}
