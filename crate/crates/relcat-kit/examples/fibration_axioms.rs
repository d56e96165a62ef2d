//! The chain-complex instance of a fibration category on random data:
//! factorizations, base change, and the two-out-of-six property.
//!
//! Run with: cargo run --example fibration_axioms

use relcat_kit::fibcat::checks::check_axioms;
use relcat_kit::fibcat::generate::{random_chain_map, random_complex, rng_for, GenProfile};
use relcat_kit::fibcat::{factorize, is_quasi_iso, ChainMap};

fn main() {
    let mut rng = rng_for(11);
    let profile = GenProfile::small();

    let a = random_complex(&mut rng, &profile);
    let c = random_complex(&mut rng, &profile);
    println!("A: dims {:?}, homology {:?}", a.total_dim(), a.homology_dims());
    println!("C: dims {:?}, homology {:?}", c.total_dim(), c.homology_dims());

    let f = random_chain_map(&mut rng, &a, &c);
    let fac = factorize(&f);
    println!(
        "factorization A -> B -> C: dim B = {}, section is we: {}, projection surjective: {}",
        fac.mid.total_dim(),
        is_quasi_iso(&fac.s),
        fac.p.is_surjective()
    );
    let ps = ChainMap::compose(&fac.p, &fac.s);
    let agrees = (a.lo()..=a.hi()).all(|k| ps.at(k) == f.at(k));
    println!("p after s equals f exactly: {agrees}");

    let report = check_axioms(11, 20);
    println!("axiom suite over 20 seeded rounds:");
    println!("  isomorphisms are weak equivalences: {}", report.isomorphisms_are_we);
    println!("  two-out-of-six:                     {}", report.two_out_of_six);
    println!("  factorization:                      {}", report.factorization);
    println!("  base change along fibrations:       {}", report.base_change);
}
