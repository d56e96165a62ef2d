//! Extending a relative diagram over the cone poset: the original values on
//! the 0-copy, the fibrant replacement on the 1-copy, and the homotopy limit
//! at the extra element, with the transported marking respected.
//!
//! Run with: cargo run --example cone_extension

use std::sync::Arc;

use relcat_kit::fibcat::checks::{check_extension, check_thomason};
use relcat_kit::fibcat::generate::GenProfile;
use relcat_kit::relposet::build_simplex;
use relcat_kit::subdivision::{kappa_horn, sd2_region, Region};

fn main() {
    let st = Arc::new(build_simplex(2, &[(0, 1)]).unwrap());
    let cone = kappa_horn(2, 0, &st).unwrap();
    let profile = GenProfile::for_index_size(cone.horn.len(), 6);
    let report = check_extension(&cone, 7, &profile, None).unwrap();
    println!("extension over the cone of horn(0) at n=2:");
    println!("  units are weak equivalences:      {}", report.units_are_we);
    println!("  marking matches the projection:   {}", report.marking_matches_projection);
    println!(
        "  marked extra arrows ({}) are weak equivalences: {}",
        report.extra_arrows_checked, report.marked_extra_arrows_we
    );
    println!(
        "  marked 1-copy pairs checked ({}): {}",
        report.one_copy_pairs_checked, report.marked_one_copy_pairs_we
    );

    // the top-horn lifting instance: a diagram of weak equivalences extends
    // with every new arrow a weak equivalence
    let top = Arc::new(build_simplex(2, &[(1, 2)]).unwrap());
    let horn = sd2_region(2, Region::Horn(2), &top).unwrap();
    let report = check_thomason(&horn, 7, &GenProfile::for_index_size(horn.len(), 6)).unwrap();
    println!(
        "top-horn lifting at n=2: units {}, projections {}",
        report.all_units_we, report.all_projections_we
    );
}
