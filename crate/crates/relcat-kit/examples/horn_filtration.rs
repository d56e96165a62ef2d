//! The anodyne filtration of a product of simplices relative to a horn:
//! every stage attaches cells along inner horns, or special horns whose
//! required edge is marked in the product marking.
//!
//! Run with: cargo run --example horn_filtration

use relcat_kit::simplicial::{filtration_check, HornKind, Side};

fn main() {
    // inner case
    let report = filtration_check(2, 1, 1, Side::Left).unwrap();
    println!(
        "n=2 m=1 k=1 (left): {} start cells, {} attachments, universe {}",
        report.totals.start_cells, report.totals.new_cells, report.totals.universe
    );
    for stage in &report.stages {
        println!("  stage i={} t={}: {} cells", stage.i, stage.t, stage.cells.len());
    }

    // the outer case produces special left horns with marked first edges
    let report = filtration_check(1, 1, 0, Side::Left).unwrap();
    let specials = report
        .stages
        .iter()
        .flat_map(|s| &s.cells)
        .filter(|c| c.horn_kind == HornKind::SpecialLeft)
        .count();
    println!("n=1 m=1 k=0 (left): {specials} special left horns, all marked edges verified");

    // the right case runs through the column-reversal duality
    let report = filtration_check(2, 1, 2, Side::Right).unwrap();
    println!(
        "n=2 m=1 k=2 (right): verdict {}, totals {:?}",
        report.verdict, report.totals
    );
    println!("\nfull JSON of the last report:");
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
