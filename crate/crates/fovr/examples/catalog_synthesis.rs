//! Builds a jittered catalog, shows its ladder, and proves the manifest
//! byte round trip.

use fovr::catalog::{load_manifest, save_manifest, synth_catalog};
use fovr::geometry::TileGrid;
use fovr::qoe::AreaClass;

fn main() {
    let grid = TileGrid::new(6, 4).unwrap();
    let cat = synth_catalog(grid, 3, 4800.0, &[0.66, 0.33], &[0.12], 0.2, 9).unwrap();
    let ladder = cat.ladder();
    println!(
        "{} clips of {} ms on a {}x{} grid",
        cat.clip_count(),
        cat.clip_duration_ms(),
        grid.cols(),
        grid.rows()
    );
    println!("ladder: hd {} kbps, sd {:?}, ld {:?}", ladder.hd_kbps(), ladder.sd_kbps(), ladder.ld_kbps());
    print!("clip 0 hd rates (kbps):");
    for flat in 0..grid.tile_count() {
        print!(" {:.1}", cat.bitrate(0, flat, AreaClass::Hd, 0).unwrap());
    }
    println!();

    let mut bytes = Vec::new();
    save_manifest(&cat, &mut bytes).unwrap();
    let reloaded = load_manifest(&bytes[..]).unwrap();
    let mut again = Vec::new();
    save_manifest(&reloaded, &mut again).unwrap();
    println!(
        "manifest is {} bytes, round trip identical: {}",
        bytes.len(),
        bytes == again
    );
}
