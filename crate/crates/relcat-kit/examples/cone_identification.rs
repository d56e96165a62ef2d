//! The cone poset over the boundary region is the full region: two copies of
//! every boundary chain plus one extra element, matched with chains, extended
//! chains and the full-set chain.
//!
//! Run with: cargo run --example cone_identification

use std::sync::Arc;

use relcat_kit::relposet::build_simplex;
use relcat_kit::subdivision::{identify_kappa_boundary, kappa_horn};

fn main() {
    let st = Arc::new(build_simplex(2, &[(0, 1)]).unwrap());
    let ident = identify_kappa_boundary(2, &st).unwrap();
    println!(
        "cone over the boundary: 2*{} + 1 = {} elements, matching the full region ({})",
        ident.boundary.len(),
        ident.cone.len(),
        ident.full.len()
    );

    // where the three kinds of cone elements land
    let b = 0usize;
    println!(
        "({}, 0) -> {}",
        ident.boundary.result.label(b),
        ident.full.result.label(ident.to_full[ident.cone.zero(b)])
    );
    println!(
        "({}, 1) -> {}",
        ident.boundary.result.label(b),
        ident.full.result.label(ident.to_full[ident.cone.one(b)])
    );
    println!(
        "extra element -> {}",
        ident.full.result.label(ident.to_full[ident.cone.k_elem()])
    );

    // transported marking: units always, extra arrows exactly over marked 0 -> phi
    let mut unit_marks = 0;
    let mut extra_marks = 0;
    for b in 0..ident.boundary.len() {
        if ident.relposet.marked(ident.cone.zero(b), ident.cone.one(b)) {
            unit_marks += 1;
        }
        if ident.relposet.marked(ident.cone.k_elem(), ident.cone.one(b)) {
            extra_marks += 1;
        }
    }
    println!("marked units: {unit_marks} / {}", ident.boundary.len());
    println!("marked extra arrows: {extra_marks}");

    // the same structure restricted over a horn
    let over_horn = kappa_horn(2, 0, &st).unwrap();
    println!(
        "cone over horn(0): {} elements embedding into P_0",
        over_horn.relposet.len()
    );
}
