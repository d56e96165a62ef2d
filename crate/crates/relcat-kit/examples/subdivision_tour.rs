//! Double subdivision of marked linear posets and the region posets it
//! generates.
//!
//! Run with: cargo run --example subdivision_tour

use std::sync::Arc;

use relcat_kit::relposet::{build_simplex, is_relative_map};
use relcat_kit::subdivision::{
    sd2_region, subdivide, Region, SubdivisionMode,
};

fn main() {
    // the linear poset 0 <= 1 <= 2 with the step 0 -> 1 marked
    let base = Arc::new(build_simplex(2, &[(0, 1)]).unwrap());
    println!("base marks: {:?}", base.marked_pairs());

    for (name, mode) in [
        ("terminal", SubdivisionMode::Terminal),
        ("initial", SubdivisionMode::Initial),
        ("double", SubdivisionMode::Double),
    ] {
        let xi = subdivide(&base, mode);
        let f = xi.vertex_map();
        println!(
            "{name:<8} subdivision: {} elements, vertex map relative: {}",
            xi.len(),
            is_relative_map(&f)
        );
    }

    // the flat model: ascending chains of nonempty subsets
    let full = sd2_region(2, Region::Full, &base).unwrap();
    let boundary = sd2_region(2, Region::Boundary, &base).unwrap();
    let horn = sd2_region(2, Region::Horn(1), &base).unwrap();
    println!(
        "regions at n=2: full {} / boundary {} / horn(1) {}",
        full.len(),
        boundary.len(),
        horn.len()
    );

    // the projection reads off the smallest element of the bottom set
    let e = full.index_of(&[0b110, 0b111]).unwrap();
    println!(
        "phi({}) = {}",
        full.result.label(e),
        full.phi(e)
    );

    // every marked pair of chains projects to a marked pair downstairs
    let phi = full.phi_map();
    assert!(is_relative_map(&phi));
    let marked = full.result.marked_pairs();
    println!("marked chain pairs: {} (all detected by phi)", marked.len());
    for &(a, b) in marked.iter().take(3) {
        println!("  {}  ->  {}", full.result.label(a), full.result.label(b));
    }
}
