//! Executable checks for the homotopy-limit statements: contractible-index
//! invariance, cofinality, cosieve decomposition, the zero-corner limit over
//! horn regions, the cone extension, and the fibration-category axioms on
//! seeded random data.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::QMat;
use crate::relposet::{vplus, Poset, RelPoset};
use crate::subdivision::{pi_preimage_members, ConeOverHorn, SubsetChainPoset};

use super::diagram::{
    cosieve_limit, diagram_limit, extend_to_kappa, holim, holim_restriction, limit_restriction,
    Diagram, InverseStructure,
};
use super::generate::{
    gen_all_we_diagram, gen_relative_diagram, random_chain_map, random_complex, rng_for,
    GenProfile,
};
use super::{
    factorize, homotopy_pullback, is_quasi_iso, pullback, ChainComplexQ, ChainMap, FibcatError,
    QuasiIsoProbe,
};

// ---------------------------------------------------------------------------
// contractible-index invariance
// ---------------------------------------------------------------------------

/// Small posets with contractible nerves used by the canonical-map check.
pub fn small_contractible_indexes() -> Vec<(&'static str, Arc<RelPoset>)> {
    let make = |labels: Vec<&str>, pairs: &[(usize, usize)]| {
        let poset =
            Poset::from_pairs(labels.into_iter().map(String::from).collect(), pairs).unwrap();
        Arc::new(RelPoset::minimal(poset))
    };
    vec![
        ("point", make(vec!["*"], &[])),
        ("arrow", make(vec!["0", "1"], &[(0, 1)])),
        ("cospan", make(vec!["a", "b", "c"], &[(0, 2), (1, 2)])),
        (
            "diamond",
            make(vec!["bot", "l", "r", "top"], &[(0, 1), (0, 2), (1, 3), (2, 3)]),
        ),
        (
            "zigzag",
            make(vec!["a", "b", "c", "d"], &[(0, 1), (2, 1), (2, 3)]),
        ),
    ]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContractibleHolimReport {
    pub index: String,
    pub elements: usize,
    pub holim_dim: usize,
    pub all_canonical_maps_we: bool,
}

/// Over an index with contractible nerve, a diagram of quasi-isomorphisms has
/// every canonical map a quasi-isomorphism.
pub fn check_contractible_holim(
    name: &str,
    index: &Arc<RelPoset>,
    seed: u64,
    profile: &GenProfile,
) -> Result<ContractibleHolimReport, FibcatError> {
    let d = gen_all_we_diagram(index, seed, profile);
    let inv = InverseStructure::from_index(index);
    let h = holim(&d, &inv)?;
    let probe = QuasiIsoProbe::new(h.complex());
    let all = index.elements().all(|e| probe.check(&h.canonical(e)));
    Ok(ContractibleHolimReport {
        index: name.to_string(),
        elements: index.len(),
        holim_dim: h.complex().total_dim(),
        all_canonical_maps_we: all,
    })
}

// ---------------------------------------------------------------------------
// cofinality
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CofinalReport {
    pub i: usize,
    pub j: usize,
    pub envelope_size: usize,
    pub sub_size: usize,
    pub restriction_is_we: bool,
}

/// The inclusion of the preimage of 0..=j into its reachable envelope inside
/// the preimage of 0..=i is cofinal: the canonical restriction map between
/// the homotopy limits is a quasi-isomorphism.
pub fn check_cofinal(
    horn: &SubsetChainPoset,
    i: usize,
    j: usize,
    seed: u64,
    profile: &GenProfile,
) -> Result<CofinalReport, FibcatError> {
    assert!(j < i && i <= horn.n);
    let f = gen_relative_diagram(horn, seed, profile);
    let lower = pi_preimage_members(horn, &(0..=j).collect::<Vec<_>>());
    let env_all = vplus(&horn.result, &lower);
    let upto_i = pi_preimage_members(horn, &(0..=i).collect::<Vec<_>>());
    let envelope: Vec<usize> =
        env_all.into_iter().filter(|e| upto_i.binary_search(e).is_ok()).collect();
    let f_env = f.restrict(&envelope);
    let inv = InverseStructure::from_index(&f_env.index);
    let h_env = holim(&f_env, &inv)?;
    // local positions of the lower preimage inside the envelope
    let sub_locals: Vec<usize> = envelope
        .iter()
        .enumerate()
        .filter(|(_, &g)| lower.binary_search(&g).is_ok())
        .map(|(local, _)| local)
        .collect();
    let restricted = holim_restriction(&h_env, &sub_locals)?;
    Ok(CofinalReport {
        i,
        j,
        envelope_size: envelope.len(),
        sub_size: sub_locals.len(),
        restriction_is_we: is_quasi_iso(&restricted.map),
    })
}

// ---------------------------------------------------------------------------
// cosieve decomposition
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub i: usize,
    pub j: usize,
    pub ambient_size: usize,
    pub comparison_is_we: bool,
    pub projections_compatible: bool,
}

/// Inside the preimage of 0..=i, the homotopy limit agrees with the homotopy
/// pullback of its restrictions to the two covering cosieves, compatibly
/// with the canonical maps.
pub fn check_decomposition(
    horn: &SubsetChainPoset,
    i: usize,
    j: usize,
    seed: u64,
    profile: &GenProfile,
) -> Result<DecompositionReport, FibcatError> {
    assert!(j < i && i <= horn.n);
    let f = gen_relative_diagram(horn, seed, profile);
    let ambient = pi_preimage_members(horn, &(0..=i).collect::<Vec<_>>());
    let f_i = f.restrict(&ambient);
    let inv = InverseStructure::from_index(&f_i.index);
    let h = holim(&f_i, &inv)?;
    let all_locals: Vec<usize> = (0..ambient.len()).collect();

    // cosieves inside the ambient subposet
    let lower: Vec<usize> = all_locals
        .iter()
        .copied()
        .filter(|&l| horn.phi(ambient[l]) <= j)
        .collect();
    let a_members = crate::relposet::vplus(&f_i.index, &lower);
    let b_members: Vec<usize> = all_locals
        .iter()
        .copied()
        .filter(|&l| horn.phi(ambient[l]) > j)
        .collect();
    let ab_members: Vec<usize> =
        a_members.iter().copied().filter(|l| b_members.binary_search(l).is_ok()).collect();

    let l_a = cosieve_limit(&h, &a_members);
    let l_b = cosieve_limit(&h, &b_members);
    let l_ab = cosieve_limit(&h, &ab_members);
    let ra = limit_restriction(&h, &l_a, &a_members, &l_ab, &ab_members);
    let rb = limit_restriction(&h, &l_b, &b_members, &l_ab, &ab_members);
    let hp = homotopy_pullback(&ra, &rb);

    let to_a = limit_restriction(&h, &h.limit, &all_locals, &l_a, &a_members);
    let to_b = limit_restriction(&h, &h.limit, &all_locals, &l_b, &b_members);
    // comparison: v |-> (restriction to A, 0, restriction to B)
    let lo = hp.complex.lo();
    let mats: Vec<QMat> = (lo..=hp.complex.hi())
        .map(|k| {
            let mut m = QMat::zeros(hp.complex.dim(k), h.limit.complex.dim(k));
            m.set_block(0, 0, &to_a.at(k));
            let off = l_a.complex.dim(k) + l_ab.complex.dim(k + 1);
            m.set_block(off, 0, &to_b.at(k));
            m
        })
        .collect();
    let comparison = ChainMap::new(h.limit.complex.clone(), hp.complex.clone(), lo, mats);
    let compatible = {
        let pa = ChainMap::compose(&hp.to_a, &comparison);
        let pb = ChainMap::compose(&hp.to_b, &comparison);
        (lo..=hp.complex.hi()).all(|k| pa.at(k) == to_a.at(k) && pb.at(k) == to_b.at(k))
    };
    Ok(DecompositionReport {
        i,
        j,
        ambient_size: ambient.len(),
        comparison_is_we: is_quasi_iso(&comparison),
        projections_compatible: compatible,
    })
}

// ---------------------------------------------------------------------------
// the zero-corner limit over horn regions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MainLemmaReport {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub holim_dim: usize,
    pub zero_corner_is_we: bool,
    /// per projection level i: the holim over its preimage contracts onto the
    /// singleton value
    pub level_checks: Vec<bool>,
    pub pass: bool,
}

/// For a relative diagram over the horn region, the canonical map from the
/// homotopy limit to the value at the zero corner is a quasi-isomorphism;
/// the per-level preimages contract onto their corners along the way.
pub fn check_holim_prop(
    horn: &SubsetChainPoset,
    k: usize,
    seed: u64,
    profile: &GenProfile,
) -> Result<MainLemmaReport, FibcatError> {
    let n = horn.n;
    let f = gen_relative_diagram(horn, seed, profile);
    let inv = InverseStructure::from_index(&horn.result);
    let h = holim(&f, &inv)?;
    let zero = horn.index_of(&[1u32]).expect("zero corner present");
    let zero_ok = is_quasi_iso(&h.canonical(zero));

    let mut level_checks = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let members = pi_preimage_members(horn, &[i]);
        let f_i = f.restrict(&members);
        let inv_i = InverseStructure::from_index(&f_i.index);
        let h_i = holim(&f_i, &inv_i)?;
        let corner = members
            .iter()
            .position(|&e| horn.chain(e) == [1u32 << i])
            .expect("corner singleton present");
        level_checks.push(is_quasi_iso(&h_i.canonical(corner)));
    }
    let pass = zero_ok && level_checks.iter().all(|&b| b);
    Ok(MainLemmaReport {
        n,
        k,
        seed,
        holim_dim: h.complex().total_dim(),
        zero_corner_is_we: zero_ok,
        level_checks,
        pass,
    })
}

// ---------------------------------------------------------------------------
// the cone extension
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub units_are_we: bool,
    pub marking_matches_projection: bool,
    pub marked_one_copy_pairs_we: bool,
    pub one_copy_pairs_checked: usize,
    pub marked_extra_arrows_we: bool,
    pub extra_arrows_checked: usize,
    pub pass: bool,
}

/// Extends a relative diagram over the horn to the cone poset and validates
/// the transported relative structure: units and marked arrows must be
/// quasi-isomorphisms, and the extra element's marked arrows are exactly the
/// ones hitting projections with contractible-corner projection value.
pub fn check_extension(
    cone: &ConeOverHorn,
    seed: u64,
    profile: &GenProfile,
    one_copy_pair_cap: Option<usize>,
) -> Result<ExtensionReport, FibcatError> {
    let horn = &cone.horn;
    let n = horn.n;
    let k = cone.k;
    let m = horn.len();
    let f = gen_relative_diagram(horn, seed, profile);
    let inv = InverseStructure::from_index(&horn.result);
    let ext = extend_to_kappa(&f, &inv)?;

    // layout agreement between the marked cone and the extension
    let mk = &cone.relposet;
    assert_eq!(mk.len(), 2 * m + 1);

    // (a) every unit (d,0) -> (d,1) is marked and a quasi-isomorphism
    let units_ok = (0..m).all(|e| {
        assert!(mk.marked(e, m + e), "units must be marked");
        is_quasi_iso(&ext.arrows[&(e, m + e)])
    });

    // (b) the marking of extra-element arrows matches the projection rule
    let marking_ok = (0..m).all(|e| {
        mk.marked(2 * m, m + e) == horn.structure.marked(0, horn.phi(e))
    });

    // (c) marked extra-element arrows are quasi-isomorphisms
    let probe = QuasiIsoProbe::new(ext.holim.complex());
    let mut extra_checked = 0;
    let extra_ok = (0..m).all(|e| {
        if !mk.marked(2 * m, m + e) {
            return true;
        }
        extra_checked += 1;
        probe.check(&ext.holim.limit.projection(e))
    });

    // (d) marked 1-copy pairs are quasi-isomorphisms (capped sample when the
    // index is large; the cap keeps a deterministic prefix after seeding)
    let mut marked_pairs: Vec<(usize, usize)> = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if a != b && mk.marked(m + a, m + b) {
                marked_pairs.push((a, b));
            }
        }
    }
    if let Some(cap) = one_copy_pair_cap {
        if marked_pairs.len() > cap {
            let mut rng = rng_for(seed ^ 0x9e37);
            let mut picked = Vec::with_capacity(cap);
            for _ in 0..cap {
                picked.push(marked_pairs[rng.gen_range(0..marked_pairs.len())]);
            }
            picked.sort_unstable();
            picked.dedup();
            marked_pairs = picked;
        }
    }
    let one_copy_ok = marked_pairs
        .iter()
        .all(|&(a, b)| is_quasi_iso(&ext.holim.replacement.arrow(a, b)));

    let pass = units_ok && marking_ok && extra_ok && one_copy_ok;
    Ok(ExtensionReport {
        n,
        k,
        seed,
        units_are_we: units_ok,
        marking_matches_projection: marking_ok,
        marked_one_copy_pairs_we: one_copy_ok,
        one_copy_pairs_checked: marked_pairs.len(),
        marked_extra_arrows_we: extra_ok,
        extra_arrows_checked: extra_checked,
        pass,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThomasonReport {
    pub n: usize,
    pub seed: u64,
    pub all_units_we: bool,
    pub all_projections_we: bool,
    pub pass: bool,
}

/// Lifting instance over the top horn: a diagram of weak equivalences
/// extends over the cone poset with every new arrow a weak equivalence, the
/// projections because the horn's nerve is contractible.
pub fn check_thomason(
    horn: &SubsetChainPoset,
    seed: u64,
    profile: &GenProfile,
) -> Result<ThomasonReport, FibcatError> {
    let d = gen_all_we_diagram(&horn.result, seed, profile);
    let inv = InverseStructure::from_index(&horn.result);
    let ext = extend_to_kappa(&d, &inv)?;
    let m = horn.len();
    let units = (0..m).all(|e| is_quasi_iso(&ext.arrows[&(e, m + e)]));
    let probe = QuasiIsoProbe::new(ext.holim.complex());
    let projections = (0..m).all(|e| probe.check(&ext.holim.limit.projection(e)));
    Ok(ThomasonReport {
        n: horn.n,
        seed,
        all_units_we: units,
        all_projections_we: projections,
        pass: units && projections,
    })
}

// ---------------------------------------------------------------------------
// axioms on seeded random data
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomsReport {
    pub isomorphisms_are_we: bool,
    pub two_out_of_six: bool,
    pub factorization: bool,
    pub base_change: bool,
    pub pass: bool,
}

/// Spot-checks the fibration-category axioms in the chain-complex instance:
/// isomorphisms are weak equivalences, the two-out-of-six property on
/// composable triples with invertible double composites, mapping-path-space
/// factorizations, and base change along (trivial) fibrations.
pub fn check_axioms(seed: u64, rounds: usize) -> AxiomsReport {
    let mut rng = rng_for(seed);
    let profile = GenProfile::small();
    let mut iso_ok = true;
    let mut six_ok = true;
    let mut fact_ok = true;
    let mut base_ok = true;
    for _ in 0..rounds {
        // isomorphisms: a random basis change is a quasi-isomorphism
        let a = random_complex(&mut rng, &profile);
        let (b, iso) = super::generate::random_iso(&mut rng, &a);
        iso_ok &= is_quasi_iso(&iso);

        // 2-out-of-6 on a triple with quasi-iso double composites
        let (c, g0) = super::generate::random_iso(&mut rng, &b);
        let (d, h0) = super::generate::random_iso(&mut rng, &c);
        let gf = ChainMap::compose(&g0, &iso);
        let hg = ChainMap::compose(&h0, &g0);
        if is_quasi_iso(&gf) && is_quasi_iso(&hg) {
            six_ok &= is_quasi_iso(&iso) && is_quasi_iso(&g0) && is_quasi_iso(&h0);
        } else {
            six_ok = false;
        }
        let _ = d;

        // factorization: s we, p fibration, p s = f
        let x = random_complex(&mut rng, &profile);
        let y = random_complex(&mut rng, &profile);
        let f = random_chain_map(&mut rng, &x, &y);
        let fac = factorize(&f);
        let ps = ChainMap::compose(&fac.p, &fac.s);
        fact_ok &= is_quasi_iso(&fac.s) && fac.p.is_surjective();
        fact_ok &= (x.lo()..=x.hi()).all(|kk| ps.at(kk) == f.at(kk));

        // base change: pull a factorization's fibration back along a random map
        let z = random_complex(&mut rng, &profile);
        let g = random_chain_map(&mut rng, &z, &y);
        match pullback(&g, &fac.p) {
            Ok(pb) => {
                base_ok &= pb.to_a.is_surjective();
                // when p is also a we, so is the base change
                if is_quasi_iso(&fac.p) {
                    base_ok &= is_quasi_iso(&pb.to_a);
                }
            }
            Err(_) => base_ok = false,
        }
    }
    let pass = iso_ok && six_ok && fact_ok && base_ok;
    AxiomsReport {
        isomorphisms_are_we: iso_ok,
        two_out_of_six: six_ok,
        factorization: fact_ok,
        base_change: base_ok,
        pass,
    }
}

// ---------------------------------------------------------------------------
// cross-validation of the homotopy pullback against a cospan limit
// ---------------------------------------------------------------------------

/// The homotopy pullback of a cospan has the homology of the homotopy limit
/// over the three-element cospan index.
pub fn homotopy_pullback_matches_cospan_holim(seed: u64) -> Result<bool, FibcatError> {
    let idx = {
        let poset = Poset::from_pairs(
            vec!["a".into(), "b".into(), "c".into()],
            &[(0, 2), (1, 2)],
        )
        .unwrap();
        Arc::new(RelPoset::minimal(poset))
    };
    let d = gen_all_we_diagram(&idx, seed, &GenProfile::small());
    let inv = InverseStructure::from_index(&idx);
    let h = holim(&d, &inv)?;
    let hp = homotopy_pullback(&d.arrows[&(0, 2)], &d.arrows[&(1, 2)]);
    let lim_h: Vec<(i32, usize)> = h.complex().homology_dims();
    let hp_h: Vec<(i32, usize)> = hp.complex.homology_dims();
    let lookup = |v: &Vec<(i32, usize)>, k: i32| {
        v.iter().find(|&&(kk, _)| kk == k).map_or(0, |&(_, d)| d)
    };
    let lo = h.complex().lo().min(hp.complex.lo());
    let hi = h.complex().hi().max(hp.complex.hi());
    Ok((lo..=hi).all(|k| lookup(&lim_h, k) == lookup(&hp_h, k)))
}

// ---------------------------------------------------------------------------
// diagram limit exposed on the original functor (exact, not homotopical)
// ---------------------------------------------------------------------------

/// Exact limit of the original diagram, with the universal cone verified
/// against every arrow.
pub fn verified_diagram_limit(f: &Diagram) -> (Arc<ChainComplexQ>, bool) {
    let lim = diagram_limit(f);
    let ok = f.index.elements().all(|a| {
        f.index.elements().all(|b| {
            if a == b || !f.index.leq(a, b) {
                return true;
            }
            let via = ChainMap::compose(&f.arrow_between(a, b), &lim.projection(a));
            let direct = lim.projection(b);
            (lim.complex.lo()..=lim.complex.hi().max(0)).all(|k| via.at(k) == direct.at(k))
        })
    });
    (lim.complex.clone(), ok)
}
