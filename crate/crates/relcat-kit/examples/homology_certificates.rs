//! Exact integral homology and collapse certificates: Smith normal form with
//! transforms, sphere sanity checks, and certificate replay.
//!
//! Run with: cargo run --example homology_certificates

use std::sync::Arc;

use num_bigint::BigInt;
use relcat_kit::homology::{
    collapse_search, reduced_homology, replay_certificate, smith_normal_form, CollapseOutcome,
};
use relcat_kit::relposet::{Poset, RelPoset};
use relcat_kit::simplicial::{nerve, SimComplex};
use relcat_kit::subdivision::{sd2_region, Region};

fn main() {
    // Smith normal form with unimodular transforms
    let m: Vec<Vec<BigInt>> = vec![
        vec![BigInt::from(2), BigInt::from(4), BigInt::from(4)],
        vec![BigInt::from(-6), BigInt::from(6), BigInt::from(12)],
        vec![BigInt::from(10), BigInt::from(4), BigInt::from(16)],
    ];
    let snf = smith_normal_form(&m);
    println!("diagonal: {:?} (each divides the next)", snf.diag);

    // sphere homology through the double-subdivided boundary
    let minimal = |n: usize| Arc::new(RelPoset::minimal(Poset::linear(n + 1)));
    for n in 1..=3usize {
        let boundary = sd2_region(n, Region::Boundary, &minimal(n)).unwrap();
        let sphere = nerve(boundary.result.poset());
        let report = reduced_homology(&sphere).unwrap();
        println!(
            "subdivided boundary at n={n}: f-vector {:?}, reduced Betti {:?}",
            sphere.f_vector(),
            report.dims.iter().map(|d| d.betti).collect::<Vec<_>>()
        );
    }

    // collapse certificates replay against the original complex
    let horn = sd2_region(2, Region::Horn(1), &minimal(2)).unwrap();
    let complex = nerve(horn.result.poset());
    match collapse_search(&complex) {
        CollapseOutcome::Collapsed(cert) => {
            println!(
                "horn nerve collapses in {} steps; replay: {}",
                cert.steps.len(),
                replay_certificate(&complex, &cert)
            );
        }
        CollapseOutcome::Stuck => unreachable!("horn nerves collapse"),
    }

    // the circle has no free face at all
    assert!(matches!(collapse_search(&SimComplex::boundary(2)), CollapseOutcome::Stuck));
    println!("the circle is stuck, as it must be");
}
