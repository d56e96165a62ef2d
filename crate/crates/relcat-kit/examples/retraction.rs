//! The retraction of the full region onto P_k: chains containing the
//! k-opposite face drop it and gain the full set; everything else is fixed.
//!
//! Run with: cargo run --example retraction

use std::sync::Arc;

use relcat_kit::relposet::build_simplex;
use relcat_kit::subdivision::retraction_r;

fn main() {
    // k = 0 requires the step 0 -> 1 to be marked
    let st = Arc::new(build_simplex(2, &[(0, 1)]).unwrap());
    let r = retraction_r(2, 0, &st).unwrap();
    println!(
        "full region: {} elements, P_0: {} elements",
        r.full.len(),
        r.p_k.len()
    );

    for e in 0..r.full.len() {
        let image = r.map.apply(e);
        if image != e {
            println!(
                "  {}  |->  {}",
                r.full.result.label(e),
                r.full.result.label(image)
            );
        }
    }

    // an unmarked structure is rejected for the outer horns
    let unmarked = Arc::new(build_simplex(2, &[]).unwrap());
    match retraction_r(2, 0, &unmarked) {
        Err(e) => println!("k = 0 without the mark: {e}"),
        Ok(_) => unreachable!("the precondition must fail"),
    }
    // and the inner horn needs no marks at all
    assert!(retraction_r(2, 1, &unmarked).is_ok());
    println!("inner horn retraction needs no marked steps");
}
