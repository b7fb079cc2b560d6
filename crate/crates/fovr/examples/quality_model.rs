//! BVQA saturation per area class, and what a missed attention prediction
//! costs once tile weights are spread over a real grid.

use fovr::geometry::{SpherePoint, TileGrid};
use fovr::qoe::{bvqa, clip_qoe, AreaClass, QoeWeights};
use fovr::scheduler::{classify_areas, AreaMap};

fn main() {
    println!("bitrate_kbps    ld_score    sd_score    hd_score");
    for kbps in [100.0, 500.0, 1000.0, 2000.0, 4529.0, 10000.0] {
        println!(
            "{kbps:12.0}{:12.4}{:12.4}{:12.4}",
            bvqa(kbps, AreaClass::Ld).unwrap(),
            bvqa(kbps, AreaClass::Sd).unwrap(),
            bvqa(kbps, AreaClass::Hd).unwrap(),
        );
    }

    // Deliver a graded plan for a predicted attention point, then score it
    // against where the viewer actually looked.
    let grid = TileGrid::new(12, 6).unwrap();
    let predicted = classify_areas(&SpherePoint::new(40.0, 15.0).unwrap(), &grid);
    let delivered: Vec<f64> = predicted
        .classes()
        .iter()
        .map(|c| match c {
            AreaClass::Hd => 4000.0,
            AreaClass::Sd => 2000.0,
            AreaClass::Ld => 500.0,
        })
        .collect();
    let score = |areas: &AreaMap| {
        let scores: Vec<f64> = delivered
            .iter()
            .zip(areas.classes())
            .map(|(kbps, c)| bvqa(*kbps, *c).unwrap())
            .collect();
        clip_qoe(&grid, &scores, areas.classes(), &QoeWeights::default()).unwrap()
    };

    println!("\nviewer looked where predicted:  qoe {:.4}", score(&predicted));
    let missed = classify_areas(&SpherePoint::new(-140.0, -15.0).unwrap(), &grid);
    println!("viewer moved across the sphere: qoe {:.4}", score(&missed));
}
