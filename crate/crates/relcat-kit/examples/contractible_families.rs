//! Contractibility certificates for the subposet families of a horn region:
//! projection preimages, reachable slices, and the top-horn family, each
//! certified by explicit collapse or exact integral homology.
//!
//! Run with: cargo run --example contractible_families

use std::sync::Arc;

use relcat_kit::homology::contractibility_verdict;
use relcat_kit::relposet::{check_galois_connection, Poset, RelPoset};
use relcat_kit::simplicial::nerve;
use relcat_kit::subdivision::{
    pi_preimage_members, sd2_region, x_family_members, xbar_family, y_family_members, Region,
};

fn main() {
    let n = 3;
    let st = Arc::new(RelPoset::minimal(Poset::linear(n + 1)));

    for k in 0..=n {
        let horn = sd2_region(n, Region::Horn(k), &st).unwrap();
        println!("horn(k={k}) with {} chains", horn.len());

        // preimages of intervals
        for (a, b) in [(0, 0), (0, 1), (0, n)] {
            let members = pi_preimage_members(&horn, &(a..=b).collect::<Vec<_>>());
            let complex = nerve(horn.result.full_subposet(&members).poset());
            let verdict = contractibility_verdict(&complex).unwrap();
            println!(
                "  preimage of {a}..{b}: {} elements, nerve {} cells -> {}",
                members.len(),
                complex.total_cells(),
                verdict.kind()
            );
        }

        // the reachable slice at level i, reflected onto singleton-bottom chains
        for i in 1..=n {
            if k == n && i >= n - 1 {
                continue; // outside the contractible range for the top horn
            }
            let x = x_family_members(&horn, i);
            let fam = xbar_family(&horn, i).unwrap();
            let adjoint = check_galois_connection(&fam.lambda, &fam.inclusion);
            let verdict =
                contractibility_verdict(&nerve(fam.x.subposet.poset())).unwrap();
            println!(
                "  X_{i}: {} elements (X-bar {}), reflection adjoint: {adjoint}, {}",
                x.len(),
                fam.xbar.members.len(),
                verdict.kind()
            );
        }

        // the top-horn family
        if k == n {
            let y = y_family_members(&horn, k).unwrap();
            let complex = nerve(horn.result.full_subposet(&y).poset());
            let verdict = contractibility_verdict(&complex).unwrap();
            println!("  Y: {} elements -> {}", y.len(), verdict.kind());
        }
    }
}
