//! The check harness: every statement the crate verifies is reachable from a
//! named check with reproducible parameters and a machine-readable report.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::fibcat::checks::{
    check_axioms, check_cofinal, check_contractible_holim, check_decomposition, check_extension,
    check_holim_prop, check_thomason, homotopy_pullback_matches_cospan_holim,
    small_contractible_indexes,
};
use crate::fibcat::generate::GenProfile;
use crate::homology::{contractibility_verdict, reduced_homology, HomologyReport, Verdict};
use crate::relposet::{
    all_structures, build_simplex, check_galois_connection, MonotoneMap, Poset,
    RelPoset, StructureHypotheses,
};
use crate::simplicial::{filtration_check, filtration_check_with_order, nerve, Side};
use crate::subdivision::{
    double_subdivision_matches_region, identify_kappa_boundary, kappa_horn, pi_preimage_members,
    retraction_r, sd2_region, xbar_family, xbar_model_iso_check, y_family_members, Region,
    SubsetChainPoset,
};

#[derive(Debug, Error)]
pub enum UsageError {
    #[error("unknown check name {0:?}; known checks: {1}")]
    UnknownCheck(String, String),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    pub max_n: usize,
    pub max_m: usize,
    pub max_nm_sum: usize,
    pub max_dim: usize,
    /// horn regions larger than this are skipped by the diagram checks
    pub max_index_elements: usize,
    /// sample cap for marked 1-copy pairs in the extension check
    pub one_copy_pair_cap: usize,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps {
            max_n: 3,
            max_m: 4,
            max_nm_sum: 5,
            max_dim: 6,
            max_index_elements: 64,
            one_copy_pair_cap: 24,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureMode {
    /// every composition-closed marking, filtered by the hypothesis set
    All,
    /// explicit `we = i-j, ...` strings
    List(Vec<String>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub checks: Vec<String>,
    pub n_range: (usize, usize),
    pub m_range: (usize, usize),
    pub k_range: Option<(usize, usize)>,
    pub structures: StructureMode,
    pub seeds: Vec<u64>,
    pub caps: Caps,
    pub timings: bool,
    pub out: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            checks: CHECK_TABLE.iter().map(|c| c.name.to_string()).collect(),
            n_range: (1, 2),
            m_range: (0, 2),
            k_range: None,
            structures: StructureMode::All,
            seeds: vec![1, 2],
            caps: Caps::default(),
            timings: false,
            out: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), UsageError> {
        if self.seeds.is_empty() {
            return Err(UsageError::BadConfig("seeds must be explicit and nonempty".into()));
        }
        if self.n_range.0 > self.n_range.1 || self.n_range.0 == 0 {
            return Err(UsageError::BadConfig("n range must be nonempty and start at 1".into()));
        }
        if self.m_range.0 > self.m_range.1 {
            return Err(UsageError::BadConfig("m range must be nonempty".into()));
        }
        for name in &self.checks {
            if !CHECK_TABLE.iter().any(|c| c.name == name) {
                return Err(UsageError::UnknownCheck(name.clone(), known_checks()));
            }
        }
        Ok(())
    }
}

/// Parameters for a single named check.
#[derive(Debug, Clone)]
pub struct CheckParams {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub we: Option<Vec<(usize, usize)>>,
    pub seeds: Vec<u64>,
    pub family: Option<String>,
    pub i: Option<usize>,
    pub range: Option<(usize, usize)>,
    pub caps: Caps,
    pub timings: bool,
}

impl Default for CheckParams {
    fn default() -> CheckParams {
        CheckParams {
            n: None,
            m: None,
            k: None,
            we: None,
            seeds: vec![1],
            family: None,
            i: None,
            range: None,
            caps: Caps::default(),
            timings: false,
        }
    }
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportEntry {
    pub check: String,
    pub params: Value,
    pub verdict: String,
    pub evidence: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl ReportEntry {
    pub fn is_fail(&self) -> bool {
        self.verdict == "fail"
    }

    fn pass(check: String, params: Value, evidence: Value) -> ReportEntry {
        ReportEntry { check, params, verdict: "pass".into(), evidence, timing_ms: None }
    }

    fn fail(check: String, params: Value, evidence: Value) -> ReportEntry {
        ReportEntry { check, params, verdict: "fail".into(), evidence, timing_ms: None }
    }

    fn skipped(check: String, params: Value, reason: &str) -> ReportEntry {
        ReportEntry {
            check,
            params,
            verdict: format!("skipped:{reason}"),
            evidence: Value::Null,
            timing_ms: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub entries: Vec<ReportEntry>,
    pub fail_count: usize,
}

impl Report {
    pub fn from_entries(mut entries: Vec<ReportEntry>) -> Report {
        entries.sort_by(|a, b| a.check.cmp(&b.check));
        let fail_count = entries.iter().filter(|e| e.is_fail()).count();
        Report { entries, fail_count }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!("{:<60} {}\n", e.check, e.verdict));
        }
        out.push_str(&format!("total: {} entries, {} failures\n", self.entries.len(), self.fail_count));
        out
    }
}

// ---------------------------------------------------------------------------
// the dispatch table
// ---------------------------------------------------------------------------

pub struct CheckInfo {
    pub name: &'static str,
    pub summary: &'static str,
    /// verified statements reachable from this check
    pub capabilities: &'static [&'static str],
}

pub const CHECK_TABLE: &[CheckInfo] = &[
    CheckInfo {
        name: "iso",
        summary: "double subdivision agrees with the subset-chain model, marks included",
        capabilities: &["double-subdivision-identification", "vertex-maps-detect-marks"],
    },
    CheckInfo {
        name: "kappa-id",
        summary: "the cone over the boundary region is the full region, marks transported",
        capabilities: &["cone-poset-identification", "transported-marking"],
    },
    CheckInfo {
        name: "retraction",
        summary: "the three-case retraction onto P_k is monotone, relative and fixes P_k",
        capabilities: &["retraction-onto-p-k"],
    },
    CheckInfo {
        name: "filtration",
        summary: "the pushout-product inclusion fills by inner and special horns",
        capabilities: &["box-product-filtration", "marked-horn-taxonomy"],
    },
    CheckInfo {
        name: "contractible",
        summary: "preimage families are contractible; their reductions are adjunctions",
        capabilities: &[
            "contractible-preimage-families",
            "galois-adjunctions",
            "open-star-complement-model",
            "top-horn-family",
        ],
    },
    CheckInfo {
        name: "holim",
        summary: "the homotopy limit over a horn region contracts onto the zero corner",
        capabilities: &["zero-corner-holim", "level-preimage-contractions", "reedy-replacement"],
    },
    CheckInfo {
        name: "extension",
        summary: "diagrams extend over the cone poset respecting the transported marking",
        capabilities: &["cone-extension", "transported-marking"],
    },
    CheckInfo {
        name: "thomason",
        summary: "weak-equivalence diagrams over the top horn lift over the cone poset",
        capabilities: &["top-horn-lifting"],
    },
    CheckInfo {
        name: "axioms",
        summary: "the chain-complex instance satisfies the fibration-category axioms",
        capabilities: &["fibration-axioms", "factorization"],
    },
    CheckInfo {
        name: "decomposition",
        summary: "holim invariance under contractible indexes, cofinality and cosieve pullbacks",
        capabilities: &[
            "contractible-index-invariance",
            "cofinal-invariance",
            "cosieve-decomposition",
        ],
    },
];

/// Every verified statement must stay reachable from some check.
pub const REQUIRED_CAPABILITIES: &[&str] = &[
    "double-subdivision-identification",
    "vertex-maps-detect-marks",
    "cone-poset-identification",
    "retraction-onto-p-k",
    "box-product-filtration",
    "marked-horn-taxonomy",
    "contractible-preimage-families",
    "galois-adjunctions",
    "open-star-complement-model",
    "top-horn-family",
    "zero-corner-holim",
    "level-preimage-contractions",
    "reedy-replacement",
    "cone-extension",
    "transported-marking",
    "top-horn-lifting",
    "fibration-axioms",
    "factorization",
    "contractible-index-invariance",
    "cofinal-invariance",
    "cosieve-decomposition",
];

fn known_checks() -> String {
    CHECK_TABLE.iter().map(|c| c.name).collect::<Vec<_>>().join(", ")
}

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

fn minimal_structure(n: usize) -> Arc<RelPoset> {
    Arc::new(RelPoset::minimal(Poset::linear(n + 1)))
}

fn structures_for(n: usize, mode: &StructureMode) -> Vec<Arc<RelPoset>> {
    match mode {
        StructureMode::All => all_structures(n).into_iter().map(Arc::new).collect(),
        StructureMode::List(list) => list
            .iter()
            .map(|s| {
                let gens = crate::relposet::parse_we(s).expect("valid we syntax");
                Arc::new(build_simplex(n, &gens).expect("in-range generators"))
            })
            .collect(),
    }
}

fn we_label(st: &RelPoset) -> String {
    let pairs = st.marked_pairs();
    if pairs.is_empty() {
        return "none".into();
    }
    pairs
        .iter()
        .map(|(i, j)| format!("{i}-{j}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn profile_for(horn_len: usize, caps: &Caps) -> GenProfile {
    GenProfile::for_index_size(horn_len, caps.max_dim)
}

fn n_values(params: &CheckParams, top: usize) -> Vec<usize> {
    match params.n {
        Some(n) => vec![n],
        None => (1..=top.min(params.caps.max_n)).collect(),
    }
}

fn k_values(params: &CheckParams, n: usize) -> Vec<usize> {
    match params.k {
        Some(k) => vec![k],
        None => (0..=n).collect(),
    }
}

// ---------------------------------------------------------------------------
// individual checks
// ---------------------------------------------------------------------------

fn run_iso(params: &CheckParams) -> Vec<ReportEntry> {
    n_values(params, 3)
        .into_par_iter()
        .map(|n| {
            let check = format!("iso[n={n}]");
            let p = json!({ "n": n });
            let structures = match &params.we {
                Some(gens) => vec![Arc::new(build_simplex(n, gens).expect("valid marks"))],
                None => structures_for(n, &StructureMode::All),
            };
            let mut count = 0usize;
            for st in &structures {
                match double_subdivision_matches_region(n, st) {
                    Ok(true) => count += 1,
                    _ => {
                        return ReportEntry::fail(
                            check,
                            p,
                            json!({ "structure": we_label(st), "reason": "not isomorphic" }),
                        )
                    }
                }
            }
            let elements = sd2_region(n, Region::Full, &minimal_structure(n)).unwrap().len();
            ReportEntry::pass(check, p, json!({ "structures": count, "elements": elements }))
        })
        .collect()
}

fn run_kappa_id(params: &CheckParams) -> Vec<ReportEntry> {
    n_values(params, 3)
        .into_par_iter()
        .map(|n| {
            let check = format!("kappa-id[n={n}]");
            let p = json!({ "n": n });
            let structures = match &params.we {
                Some(gens) => vec![Arc::new(build_simplex(n, gens).expect("valid marks"))],
                None => structures_for(n, &StructureMode::All),
            };
            for st in &structures {
                // the construction panics loudly on an order mismatch
                let ident = identify_kappa_boundary(n, st).expect("region construction");
                let cone = &ident.cone;
                for b in 0..ident.boundary.len() {
                    if !ident.relposet.marked(cone.zero(b), cone.one(b)) {
                        return ReportEntry::fail(
                            check,
                            p,
                            json!({ "structure": we_label(st), "reason": "unit pair unmarked" }),
                        );
                    }
                    let expected = st.marked(0, ident.boundary.phi(b));
                    if ident.relposet.marked(cone.k_elem(), cone.one(b)) != expected {
                        return ReportEntry::fail(
                            check,
                            p,
                            json!({ "structure": we_label(st), "reason": "extra-element marking" }),
                        );
                    }
                }
            }
            ReportEntry::pass(check, p, json!({ "structures": structures.len() }))
        })
        .collect()
}

fn run_retraction(params: &CheckParams) -> Vec<ReportEntry> {
    let mut jobs = Vec::new();
    for n in n_values(params, 3) {
        for k in k_values(params, n) {
            jobs.push((n, k));
        }
    }
    jobs.into_par_iter()
        .map(|(n, k)| {
            let check = format!("retraction[n={n},k={k}]");
            let p = json!({ "n": n, "k": k, "hypotheses": StructureHypotheses::Retraction.label() });
            let structures = match &params.we {
                Some(gens) => vec![Arc::new(build_simplex(n, gens).expect("valid marks"))],
                None => structures_for(n, &StructureMode::All),
            };
            let admissible: Vec<&Arc<RelPoset>> = structures
                .iter()
                .filter(|st| StructureHypotheses::Retraction.admits(n, k, st))
                .collect();
            if admissible.is_empty() {
                return ReportEntry::skipped(check, p, "no admissible structure");
            }
            for st in &admissible {
                if let Err(e) = retraction_r(n, k, st) {
                    return ReportEntry::fail(
                        check,
                        p,
                        json!({ "structure": we_label(st), "error": e.to_string() }),
                    );
                }
            }
            ReportEntry::pass(check, p, json!({ "structures": admissible.len() }))
        })
        .collect()
}

fn run_filtration(params: &CheckParams) -> Vec<ReportEntry> {
    let mut jobs = Vec::new();
    let (m_lo, m_hi) = (params.m.unwrap_or(0), params.m.unwrap_or(params.caps.max_m));
    let ns: Vec<usize> = match params.n {
        Some(n) => vec![n],
        None => (1..=params.caps.max_nm_sum).collect(),
    };
    for n in ns {
        for m in m_lo..=m_hi {
            if n + m > params.caps.max_nm_sum {
                continue;
            }
            for k in k_values(params, n) {
                for side in [Side::Left, Side::Right] {
                    let applicable = match side {
                        Side::Left => k < n,
                        Side::Right => k > 0,
                    };
                    if applicable {
                        jobs.push((n, m, k, side));
                    }
                }
            }
        }
    }
    jobs.into_par_iter()
        .map(|(n, m, k, side)| {
            let side_name = match side {
                Side::Left => "left",
                Side::Right => "right",
            };
            let check = format!("filtration[n={n},m={m},k={k},side={side_name}]");
            let p = json!({ "n": n, "m": m, "k": k, "side": side_name });
            match filtration_check(n, m, k, side) {
                Ok(report) => {
                    // order independence: one seeded permutation run must agree
                    let shuffled =
                        filtration_check_with_order(n, m, k, side, Some(0xC0FFEE ^ params.seeds[0]));
                    let stable = matches!(&shuffled, Ok(r2)
                        if serde_json::to_string(r2).unwrap() == serde_json::to_string(&report).unwrap());
                    if !stable {
                        return ReportEntry::fail(check, p, json!({ "reason": "order dependence" }));
                    }
                    ReportEntry::pass(check, p, serde_json::to_value(&report.totals).unwrap())
                }
                Err(e) => ReportEntry::fail(check, p, json!({ "error": e.to_string() })),
            }
        })
        .collect()
}

/// Intervals [a, b] of 0..=n whose preimage the contractibility statement
/// covers: connected, nonempty, not the complement of the horn vertex.
fn admissible_intervals(n: usize, k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..=n {
        for b in a..=n {
            if k == 0 && (a, b) == (1, n) {
                continue;
            }
            if k == n && (a, b) == (0, n - 1) {
                continue;
            }
            out.push((a, b));
        }
    }
    out
}

fn verdict_entry(check: String, p: Value, verdict: &Verdict, cells: usize) -> ReportEntry {
    match verdict {
        Verdict::Collapsible(cert) => ReportEntry::pass(
            check,
            p,
            json!({ "verdict": "collapsible", "steps": cert.steps.len(), "cells": cells }),
        ),
        Verdict::AcyclicOnly(report) => ReportEntry {
            check,
            params: p,
            verdict: "downgraded:acyclic-only".into(),
            evidence: json!({ "cells": cells, "homology": report }),
            timing_ms: None,
        },
        Verdict::NonAcyclic(report) => ReportEntry::fail(
            check,
            p,
            json!({ "cells": cells, "homology": report }),
        ),
    }
}

/// Reports agree when the Betti numbers and torsion coincide in every
/// dimension, padding the shorter report with zeros.
fn reports_equivalent(a: &HomologyReport, b: &HomologyReport) -> bool {
    let top = a.dims.len().max(b.dims.len());
    for d in 0..top {
        let (ba, ta) = a.dims.get(d).map_or((0, Vec::new()), |x| (x.betti, x.torsion.clone()));
        let (bb, tb) = b.dims.get(d).map_or((0, Vec::new()), |x| (x.betti, x.torsion.clone()));
        if ba != bb || ta != tb {
            return false;
        }
    }
    true
}

fn run_contractible(params: &CheckParams) -> Vec<ReportEntry> {
    let mut jobs: Vec<(usize, usize)> = Vec::new();
    for n in n_values(params, 4) {
        for k in k_values(params, n) {
            jobs.push((n, k));
        }
    }
    let selected_family = params.family.clone();
    jobs.into_par_iter()
        .flat_map(|(n, k)| {
            contractible_family_entries(n, k, selected_family.as_deref(), params.range, params.i)
        })
        .collect()
}

fn contractible_family_entries(
    n: usize,
    k: usize,
    family: Option<&str>,
    range: Option<(usize, usize)>,
    i_param: Option<usize>,
) -> Vec<ReportEntry> {
    let st = minimal_structure(n);
    let horn = match sd2_region(n, Region::Horn(k), &st) {
        Ok(h) => h,
        Err(e) => {
            return vec![ReportEntry::skipped(
                format!("contractible[n={n},k={k}]"),
                json!({ "n": n, "k": k }),
                &e.to_string(),
            )]
        }
    };
    let mut entries = Vec::new();
    let run_pi = family.is_none() || family == Some("pi-preimage");
    let run_x = family.is_none() || family == Some("x");
    let run_y = family.is_none() || family == Some("y");
    let run_xbar = family.is_none() || family == Some("xbar");

    if run_pi {
        let intervals = match range {
            Some(r) => vec![r],
            None => admissible_intervals(n, k),
        };
        for (a, b) in intervals {
            let check = format!("contractible[n={n},k={k},family=pi-preimage,range={a}..{b}]");
            let p = json!({ "n": n, "k": k, "family": "pi-preimage", "range": [a, b] });
            let members = pi_preimage_members(&horn, &(a..=b).collect::<Vec<_>>());
            let sub = horn.result.full_subposet(&members);
            let complex = nerve(sub.poset());
            match contractibility_verdict(&complex) {
                Ok(v) => entries.push(verdict_entry(check, p, &v, complex.total_cells())),
                Err(e) => entries.push(ReportEntry::fail(check, p, json!({ "error": e.to_string() }))),
            }
        }
        // the reduction chain behind each admissible proper interval
        if family.is_none() || family == Some("pi-preimage") {
            entries.extend(galois_entries(n, k, &horn));
        }
    }
    if run_x {
        let is = match i_param {
            Some(i) => vec![i],
            None => (1..=n).collect(),
        };
        for i in is {
            if k == n && i >= n.saturating_sub(1) {
                entries.push(ReportEntry::skipped(
                    format!("contractible[n={n},k={k},family=X,i={i}]"),
                    json!({ "n": n, "k": k, "family": "X", "i": i }),
                    "outside the contractible range for the top horn",
                ));
                continue;
            }
            let check = format!("contractible[n={n},k={k},family=X,i={i}]");
            let p = json!({ "n": n, "k": k, "family": "X", "i": i });
            let members = crate::subdivision::x_family_members(&horn, i);
            if members.is_empty() {
                entries.push(ReportEntry::skipped(check, p, "empty family"));
                continue;
            }
            let sub = horn.result.full_subposet(&members);
            let complex = nerve(sub.poset());
            match contractibility_verdict(&complex) {
                Ok(v) => entries.push(verdict_entry(check, p, &v, complex.total_cells())),
                Err(e) => entries.push(ReportEntry::fail(check, p, json!({ "error": e.to_string() }))),
            }
        }
    }
    if run_y {
        let check = format!("contractible[n={n},k={k},family=Y]");
        let p = json!({ "n": n, "k": k, "family": "Y" });
        if k == n && n >= 2 {
            let members = y_family_members(&horn, k).expect("top horn");
            let sub = horn.result.full_subposet(&members);
            let complex = nerve(sub.poset());
            match contractibility_verdict(&complex) {
                Ok(v) => entries.push(verdict_entry(check, p, &v, complex.total_cells())),
                Err(e) => entries.push(ReportEntry::fail(check, p, json!({ "error": e.to_string() }))),
            }
        } else if family == Some("y") {
            entries.push(ReportEntry::skipped(check, p, "the Y family needs k = n >= 2"));
        }
    }
    if run_xbar {
        for i in match i_param {
            Some(i) => vec![i],
            None => (1..=n).collect(),
        } {
            entries.push(xbar_entry(n, k, i, &horn));
        }
    }
    entries
}

/// The reflection onto chains starting at the singleton: a true adjunction
/// with matching nerve homology, plus the deletion model identification.
fn xbar_entry(n: usize, k: usize, i: usize, horn: &SubsetChainPoset) -> ReportEntry {
    let check = format!("contractible[n={n},k={k},family=Xbar,i={i}]");
    let p = json!({ "n": n, "k": k, "family": "Xbar", "i": i });
    let fam = match xbar_family(horn, i) {
        Ok(f) => f,
        Err(e) => return ReportEntry::skipped(check, p, &e.to_string()),
    };
    if fam.x.members.is_empty() {
        return ReportEntry::skipped(check, p, "empty family");
    }
    if !check_galois_connection(&fam.lambda, &fam.inclusion) {
        return ReportEntry::fail(check, p, json!({ "reason": "reflection is not an adjunction" }));
    }
    let nx = nerve(fam.x.subposet.poset());
    let nxbar = nerve(fam.xbar.subposet.poset());
    let (vx, vxbar) = (
        contractibility_verdict(&nx).unwrap(),
        contractibility_verdict(&nxbar).unwrap(),
    );
    let equal = if vx.certifies_contractible() && vxbar.certifies_contractible() {
        true
    } else {
        reports_equivalent(&reduced_homology(&nx).unwrap(), &reduced_homology(&nxbar).unwrap())
    };
    if !equal {
        return ReportEntry::fail(check, p, json!({ "reason": "nerve homology differs" }));
    }
    let model_ok = if n >= 2 { xbar_model_iso_check(n, k, i).unwrap_or(false) } else { true };
    if !model_ok {
        return ReportEntry::fail(check, p, json!({ "reason": "deletion model mismatch" }));
    }
    ReportEntry::pass(
        check,
        p,
        json!({
            "x_size": fam.x.members.len(),
            "xbar_size": fam.xbar.members.len(),
            "verdicts": [vx.kind(), vxbar.kind()],
            "deletion_model": model_ok,
        }),
    )
}

/// Per admissible proper interval: the bottom-set reduction is a reflective
/// adjunction instance at every element of the preimage, the truncation onto
/// chains inside the interval is coreflective, and the nerve homologies of
/// the two sides of each adjunction agree.
fn galois_entries(n: usize, k: usize, horn: &SubsetChainPoset) -> Vec<ReportEntry> {
    let mut entries = Vec::new();
    for (a, b) in admissible_intervals(n, k) {
        if (a, b) == (0, n) {
            continue; // whole poset: nothing to reduce
        }
        let check = format!("contractible[n={n},k={k},family=galois,range={a}..{b}]");
        let p = json!({ "n": n, "k": k, "family": "galois", "range": [a, b] });
        let e_mask: u32 = ((1u32 << (b + 1)) - 1) & !((1u32 << a) - 1);
        let members = pi_preimage_members(horn, &(a..=b).collect::<Vec<_>>());
        if members.is_empty() {
            entries.push(ReportEntry::skipped(check, p, "empty preimage"));
            continue;
        }
        match galois_instance(horn, &members, e_mask) {
            Ok((instances, truncation_ok)) => {
                if truncation_ok {
                    entries.push(ReportEntry::pass(
                        check,
                        p,
                        json!({ "elements": members.len(), "adjunction_instances": instances }),
                    ));
                } else {
                    entries.push(ReportEntry::fail(check, p, json!({ "reason": "truncation adjunction" })));
                }
            }
            Err(reason) => entries.push(ReportEntry::fail(check, p, json!({ "reason": reason }))),
        }
    }
    entries
}

/// Chains of nonempty subsets of `mask`, as a poset under refinement. The
/// element order matches `mask_chains`.
fn chains_of_mask_poset(mask: u32) -> Poset {
    let chains = mask_chains(mask);
    let mut pairs = Vec::new();
    let is_subchain = |x: &[u32], y: &[u32]| {
        let mut it = y.iter();
        x.iter().all(|v| it.any(|w| w == v))
    };
    for (i, x) in chains.iter().enumerate() {
        for (j, y) in chains.iter().enumerate() {
            if i != j && x.len() <= y.len() && is_subchain(x, y) {
                pairs.push((i, j));
            }
        }
    }
    Poset::from_pairs(
        chains.iter().map(|c| crate::subdivision::format_chain(c)).collect(),
        &pairs,
    )
    .expect("chain refinement is a poset")
}

/// Verdict cache for the bottom-reduction target, which depends only on the
/// number of elements of the bottom intersection.
fn mask_poset_contractible(cache: &mut BTreeMap<u32, bool>, mask: u32) -> bool {
    let size_key = mask.count_ones();
    if let Some(&v) = cache.get(&size_key) {
        return v;
    }
    let poset = chains_of_mask_poset(mask);
    let ok = contractibility_verdict(&nerve(&poset))
        .map(|v| v.certifies_contractible())
        .unwrap_or(false);
    cache.insert(size_key, ok);
    ok
}

fn galois_instance(
    horn: &SubsetChainPoset,
    members: &[usize],
    e_mask: u32,
) -> Result<(usize, bool), String> {
    // the full subcategory of chains whose bottom set sits inside the interval
    let c_members: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&e| horn.chain(e)[0] & !e_mask == 0)
        .collect();
    // and the one whose top set does
    let d_members: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&e| horn.top_mask(e) & !e_mask == 0)
        .collect();

    // truncation: C -> D', right adjoint to the inclusion
    let c_sub = Arc::new(horn.result.full_subposet(&c_members));
    let d_sub = Arc::new(horn.result.full_subposet(&d_members));
    let truncate = |e: usize| -> usize {
        let chain = horn.chain(e);
        let cut = chain.iter().take_while(|&&m| m & !e_mask == 0).count();
        horn.index_of(&chain[..cut]).expect("truncated chain exists")
    };
    let incl_map = MonotoneMap::new(
        d_sub.clone(),
        c_sub.clone(),
        d_members
            .iter()
            .map(|&e| c_members.binary_search(&e).expect("D' inside C"))
            .collect(),
    )
    .map_err(|e| e.to_string())?;
    let trunc_map = MonotoneMap::new(
        c_sub.clone(),
        d_sub.clone(),
        c_members
            .iter()
            .map(|&e| d_members.binary_search(&truncate(e)).expect("truncation lands in D'"))
            .collect(),
    )
    .map_err(|e| e.to_string())?;
    let truncation_ok = check_galois_connection(&incl_map, &trunc_map)
        && nerves_agree(&c_sub, &d_sub)?;

    // bottom reduction at every element of the preimage
    let mut cache: BTreeMap<u32, bool> = BTreeMap::new();
    let mut instances = 0usize;
    for &w in members {
        let w_chain: Vec<u32> = horn.chain(w).to_vec();
        let bottom_mask = w_chain[0] & e_mask;
        if bottom_mask == 0 {
            return Err("element with empty bottom intersection".into());
        }
        // the undercategory of w inside C
        let under: Vec<usize> = c_members
            .iter()
            .copied()
            .filter(|&v| horn.result.leq(w, v))
            .collect();
        if under.is_empty() {
            return Err("empty undercategory".into());
        }
        let under_sub = Arc::new(horn.result.full_subposet(&under));
        // chains of nonempty subsets of the bottom intersection
        let model = chains_of_mask_poset(bottom_mask);
        let model_chains = mask_chains(bottom_mask);
        let model_sub = Arc::new(RelPoset::minimal(model));
        // lambda: concatenate with w; rho: largest prefix inside the intersection
        let lambda_assign: Vec<usize> = model_chains
            .iter()
            .map(|v_chain| {
                let mut merged: Vec<u32> = v_chain.clone();
                for &m in &w_chain {
                    if !merged.contains(&m) {
                        merged.push(m);
                    }
                }
                merged.sort_by_key(|m| (m.count_ones(), *m));
                let global = horn.index_of(&merged).expect("concatenation stays in the region");
                under
                    .binary_search(&global)
                    .map_err(|_| "concatenation not under w")
                    .expect("concatenation lands in the undercategory")
            })
            .collect();
        let rho_assign: Vec<usize> = under
            .iter()
            .map(|&v| {
                let chain = horn.chain(v);
                let prefix: Vec<u32> = chain
                    .iter()
                    .take_while(|&&m| m & !bottom_mask == 0)
                    .copied()
                    .collect();
                model_chains
                    .iter()
                    .position(|c| c == &prefix)
                    .expect("prefix is a chain of the intersection")
            })
            .collect();
        let lambda = MonotoneMap::new(model_sub.clone(), under_sub.clone(), lambda_assign)
            .map_err(|e| format!("lambda not monotone: {e}"))?;
        let rho = MonotoneMap::new(under_sub.clone(), model_sub.clone(), rho_assign)
            .map_err(|e| format!("rho not monotone: {e}"))?;
        if !check_galois_connection(&lambda, &rho) {
            return Err(format!("bottom reduction fails at {}", horn.result.label(w)));
        }
        // equal homology on both nerves
        let under_ok = contractibility_verdict(&nerve(under_sub.poset()))
            .map(|v| v.certifies_contractible())
            .unwrap_or(false);
        let model_ok = mask_poset_contractible(&mut cache, bottom_mask);
        if !(under_ok && model_ok) {
            let ra = reduced_homology(&nerve(model_sub.poset())).map_err(|e| e.to_string())?;
            let rb = reduced_homology(&nerve(under_sub.poset())).map_err(|e| e.to_string())?;
            if !reports_equivalent(&ra, &rb) {
                return Err(format!("nerve homology differs at {}", horn.result.label(w)));
            }
        }
        instances += 1;
    }
    Ok((instances, truncation_ok))
}

/// Ascending chains of nonempty subsets of `mask`, in the same order the
/// chain poset uses for its elements.
fn mask_chains(mask: u32) -> Vec<Vec<u32>> {
    let mut subsets: Vec<u32> = Vec::new();
    let mut s = mask;
    loop {
        if s != 0 {
            subsets.push(s);
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & mask;
    }
    subsets.sort_unstable();
    let mut chains: Vec<Vec<u32>> = Vec::new();
    fn rec(subsets: &[u32], stack: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(stack.clone());
        let top = *stack.last().unwrap();
        for &t in subsets {
            if t & top == top && t != top {
                stack.push(t);
                rec(subsets, stack, out);
                stack.pop();
            }
        }
    }
    for &bot in &subsets {
        let mut stack = vec![bot];
        rec(&subsets, &mut stack, &mut chains);
    }
    chains.sort();
    chains
}

fn nerves_agree(a: &Arc<RelPoset>, b: &Arc<RelPoset>) -> Result<bool, String> {
    let na = nerve(a.poset());
    let nb = nerve(b.poset());
    if na.is_empty() || nb.is_empty() {
        return Ok(na.is_empty() == nb.is_empty());
    }
    let va = contractibility_verdict(&na).map_err(|e| e.to_string())?;
    let vb = contractibility_verdict(&nb).map_err(|e| e.to_string())?;
    if va.certifies_contractible() && vb.certifies_contractible() {
        return Ok(true);
    }
    let ra = reduced_homology(&na).map_err(|e| e.to_string())?;
    let rb = reduced_homology(&nb).map_err(|e| e.to_string())?;
    Ok(reports_equivalent(&ra, &rb))
}

fn run_holim(params: &CheckParams) -> Vec<ReportEntry> {
    let mut jobs = Vec::new();
    for n in n_values(params, 3) {
        if n < 2 {
            continue; // the statement is immediate for a single step
        }
        for k in k_values(params, n) {
            let structures = match &params.we {
                Some(gens) => vec![Arc::new(build_simplex(n, gens).expect("valid marks"))],
                None => structures_for(n, &StructureMode::All),
            };
            for st in structures {
                if !StructureHypotheses::ConeExtension.admits(n, k, &st) {
                    continue;
                }
                for &seed in &params.seeds {
                    jobs.push((n, k, st.clone(), seed));
                }
            }
        }
    }
    jobs.into_par_iter()
        .map(|(n, k, st, seed)| {
            let check = format!("holim[n={n},k={k},we={},seed={seed}]", we_label(&st));
            let p = json!({
                "n": n, "k": k, "we": we_label(&st), "seed": seed,
                "hypotheses": StructureHypotheses::ConeExtension.label(),
            });
            let horn = sd2_region(n, Region::Horn(k), &st).expect("horn construction");
            if horn.len() > params.caps.max_index_elements {
                return ReportEntry::skipped(check, p, "index exceeds the element cap");
            }
            let profile = profile_for(horn.len(), &params.caps);
            match check_holim_prop(&horn, k, seed, &profile) {
                Ok(rep) if rep.pass => {
                    ReportEntry::pass(check, p, serde_json::to_value(&rep).unwrap())
                }
                Ok(rep) => ReportEntry::fail(check, p, serde_json::to_value(&rep).unwrap()),
                Err(e) => ReportEntry::fail(check, p, json!({ "error": e.to_string() })),
            }
        })
        .collect()
}

fn run_extension(params: &CheckParams) -> Vec<ReportEntry> {
    let mut jobs = Vec::new();
    for n in n_values(params, 3) {
        if n < 2 {
            continue;
        }
        for k in k_values(params, n) {
            let structures = match &params.we {
                Some(gens) => vec![Arc::new(build_simplex(n, gens).expect("valid marks"))],
                None => structures_for(n, &StructureMode::All),
            };
            for st in structures {
                if !StructureHypotheses::ConeExtension.admits(n, k, &st) {
                    continue;
                }
                for &seed in &params.seeds {
                    jobs.push((n, k, st.clone(), seed));
                }
            }
        }
    }
    jobs.into_par_iter()
        .map(|(n, k, st, seed)| {
            let check = format!("extension[n={n},k={k},we={},seed={seed}]", we_label(&st));
            let p = json!({
                "n": n, "k": k, "we": we_label(&st), "seed": seed,
                "hypotheses": StructureHypotheses::ConeExtension.label(),
            });
            let cone = match kappa_horn(n, k, &st) {
                Ok(c) => c,
                Err(e) => return ReportEntry::fail(check, p, json!({ "error": e.to_string() })),
            };
            if cone.horn.len() > params.caps.max_index_elements {
                return ReportEntry::skipped(check, p, "index exceeds the element cap");
            }
            let profile = profile_for(cone.horn.len(), &params.caps);
            let cap = if cone.horn.len() > 16 { Some(params.caps.one_copy_pair_cap) } else { None };
            match check_extension(&cone, seed, &profile, cap) {
                Ok(rep) if rep.pass => {
                    ReportEntry::pass(check, p, serde_json::to_value(&rep).unwrap())
                }
                Ok(rep) => ReportEntry::fail(check, p, serde_json::to_value(&rep).unwrap()),
                Err(e) => ReportEntry::fail(check, p, json!({ "error": e.to_string() })),
            }
        })
        .collect()
}

fn run_thomason(params: &CheckParams) -> Vec<ReportEntry> {
    let mut jobs = Vec::new();
    for n in n_values(params, 3) {
        for &seed in &params.seeds {
            jobs.push((n, seed));
        }
    }
    jobs.into_par_iter()
        .map(|(n, seed)| {
            let check = format!("thomason[n={n},seed={seed}]");
            let p = json!({ "n": n, "seed": seed });
            // top horn with the last step marked, as the lifting problem requires
            let st = Arc::new(build_simplex(n, &[(n.saturating_sub(1), n)]).expect("marks"));
            let horn = match sd2_region(n, Region::Horn(n), &st) {
                Ok(h) => h,
                Err(e) => return ReportEntry::skipped(check, p, &e.to_string()),
            };
            if horn.len() > params.caps.max_index_elements {
                return ReportEntry::skipped(check, p, "index exceeds the element cap");
            }
            let profile = profile_for(horn.len(), &params.caps);
            match check_thomason(&horn, seed, &profile) {
                Ok(rep) if rep.pass => {
                    ReportEntry::pass(check, p, serde_json::to_value(&rep).unwrap())
                }
                Ok(rep) => ReportEntry::fail(check, p, serde_json::to_value(&rep).unwrap()),
                Err(e) => ReportEntry::fail(check, p, json!({ "error": e.to_string() })),
            }
        })
        .collect()
}

fn run_axioms(params: &CheckParams) -> Vec<ReportEntry> {
    params
        .seeds
        .par_iter()
        .map(|&seed| {
            let check = format!("axioms[seed={seed}]");
            let p = json!({ "seed": seed });
            let rep = check_axioms(seed, 12);
            if rep.pass {
                ReportEntry::pass(check, p, serde_json::to_value(&rep).unwrap())
            } else {
                ReportEntry::fail(check, p, serde_json::to_value(&rep).unwrap())
            }
        })
        .collect()
}

fn run_decomposition(params: &CheckParams) -> Vec<ReportEntry> {
    let mut entries: Vec<ReportEntry> = Vec::new();

    // invariance over small contractible indexes
    let mut index_jobs = Vec::new();
    for (name, idx) in small_contractible_indexes() {
        for &seed in &params.seeds {
            index_jobs.push((name, idx.clone(), seed));
        }
    }
    let contractible: Vec<ReportEntry> = index_jobs
        .into_par_iter()
        .map(|(name, idx, seed)| {
            let check = format!("decomposition[index={name},seed={seed}]");
            let p = json!({ "index": name, "seed": seed });
            match check_contractible_holim(name, &idx, seed, &GenProfile::small()) {
                Ok(rep) if rep.all_canonical_maps_we => {
                    ReportEntry::pass(check, p, serde_json::to_value(&rep).unwrap())
                }
                Ok(rep) => ReportEntry::fail(check, p, serde_json::to_value(&rep).unwrap()),
                Err(e) => ReportEntry::fail(check, p, json!({ "error": e.to_string() })),
            }
        })
        .collect();
    entries.extend(contractible);

    // the homotopy pullback against the cospan holim
    let seed = params.seeds[0];
    {
        let check = format!("decomposition[cross-validation,seed={seed}]");
        let p = json!({ "cross_validation": "cospan", "seed": seed });
        match homotopy_pullback_matches_cospan_holim(seed) {
            Ok(true) => entries.push(ReportEntry::pass(check, p, json!({ "agrees": true }))),
            Ok(false) => entries.push(ReportEntry::fail(check, p, json!({ "agrees": false }))),
            Err(e) => entries.push(ReportEntry::fail(check, p, json!({ "error": e.to_string() }))),
        }
    }

    // cofinal inclusions and cosieve pullbacks at n = 2
    let n = params.n.unwrap_or(2);
    let mut jobs: Vec<(usize, usize, usize, &str)> = Vec::new();
    for k in k_values(params, n) {
        for (i, j) in [(n, 0), (n, 1), (1, 0)] {
            if j < i && i <= n {
                jobs.push((k, i, j, "cofinal"));
                jobs.push((k, i, j, "pullback"));
            }
        }
    }
    let st = minimal_structure(n);
    let horn_per_k: BTreeMap<usize, SubsetChainPoset> = k_values(params, n)
        .into_iter()
        .filter_map(|k| sd2_region(n, Region::Horn(k), &st).ok().map(|h| (k, h)))
        .collect();
    jobs.retain(|(k, _, _, _)| horn_per_k.contains_key(k));
    let sub_entries: Vec<ReportEntry> = jobs
        .into_par_iter()
        .map(|(k, i, j, kind)| {
            let check = format!("decomposition[kind={kind},n={n},k={k},i={i},j={j},seed={seed}]");
            let p = json!({ "kind": kind, "n": n, "k": k, "i": i, "j": j, "seed": seed });
            let horn = &horn_per_k[&k];
            let profile = profile_for(horn.len(), &params.caps);
            if kind == "cofinal" {
                match check_cofinal(horn, i, j, seed, &profile) {
                    Ok(rep) if rep.restriction_is_we => {
                        ReportEntry::pass(check, p, serde_json::to_value(&rep).unwrap())
                    }
                    Ok(rep) => ReportEntry::fail(check, p, serde_json::to_value(&rep).unwrap()),
                    Err(e) => ReportEntry::fail(check, p, json!({ "error": e.to_string() })),
                }
            } else {
                match check_decomposition(horn, i, j, seed, &profile) {
                    Ok(rep) if rep.comparison_is_we && rep.projections_compatible => {
                        ReportEntry::pass(check, p, serde_json::to_value(&rep).unwrap())
                    }
                    Ok(rep) => ReportEntry::fail(check, p, serde_json::to_value(&rep).unwrap()),
                    Err(e) => ReportEntry::fail(check, p, json!({ "error": e.to_string() })),
                }
            }
        })
        .collect();
    entries.extend(sub_entries);
    entries
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

pub fn run_check(name: &str, params: &CheckParams) -> Result<Vec<ReportEntry>, UsageError> {
    let mut entries = match name {
        "iso" => run_iso(params),
        "kappa-id" => run_kappa_id(params),
        "retraction" => run_retraction(params),
        "filtration" => run_filtration(params),
        "contractible" => run_contractible(params),
        "holim" => run_holim(params),
        "extension" => run_extension(params),
        "thomason" => run_thomason(params),
        "axioms" => run_axioms(params),
        "decomposition" => run_decomposition(params),
        other => return Err(UsageError::UnknownCheck(other.to_string(), known_checks())),
    };
    if !params.timings {
        for e in &mut entries {
            e.timing_ms = None;
        }
    }
    Ok(entries)
}

pub fn run_suite(config: &SuiteConfig) -> Result<Report, UsageError> {
    config.validate()?;
    let we_lists: Vec<Option<Vec<(usize, usize)>>> = match &config.structures {
        StructureMode::All => vec![None],
        StructureMode::List(list) => list
            .iter()
            .map(|s| {
                crate::relposet::parse_we(s)
                    .map(Some)
                    .map_err(UsageError::BadConfig)
            })
            .collect::<Result<_, _>>()?,
    };
    let mut entries = Vec::new();
    for name in &config.checks {
        for we in &we_lists {
            let params = CheckParams {
                n: None,
                m: None,
                k: match config.k_range {
                    Some((lo, hi)) if lo == hi => Some(lo),
                    _ => None,
                },
                we: we.clone(),
                seeds: config.seeds.clone(),
                family: None,
                i: None,
                range: None,
                caps: Caps {
                    max_n: config.n_range.1,
                    max_m: config.m_range.1,
                    ..config.caps.clone()
                },
                timings: config.timings,
            };
            entries.extend(run_check(name, &params)?);
        }
    }
    let mut report = Report::from_entries(entries);
    report.entries.dedup_by(|a, b| a.check == b.check);
    report.fail_count = report.entries.iter().filter(|e| e.is_fail()).count();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coverage_self_test() {
        let mut provided: Vec<&str> = CHECK_TABLE
            .iter()
            .flat_map(|c| c.capabilities.iter().copied())
            .collect();
        provided.sort_unstable();
        provided.dedup();
        for cap in REQUIRED_CAPABILITIES {
            assert!(
                provided.contains(cap),
                "capability {cap:?} not reachable from any check"
            );
        }
    }

    #[test]
    fn unknown_check_rejected() {
        let err = run_check("nope", &CheckParams::default());
        assert!(matches!(err, Err(UsageError::UnknownCheck(_, _))));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SuiteConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.seeds.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = SuiteConfig::default();
        cfg.checks = vec!["bogus".into()];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn small_checks_pass() {
        let params = CheckParams {
            n: Some(2),
            seeds: vec![7],
            ..CheckParams::default()
        };
        for name in ["iso", "kappa-id", "retraction"] {
            let entries = run_check(name, &params).unwrap();
            assert!(!entries.is_empty());
            assert!(entries.iter().all(|e| !e.is_fail()), "{name} failed: {entries:?}");
        }
    }

    #[test]
    fn report_determinism() {
        let params = CheckParams { n: Some(2), seeds: vec![3], ..CheckParams::default() };
        let a = Report::from_entries(run_check("axioms", &params).unwrap());
        let b = Report::from_entries(run_check("axioms", &params).unwrap());
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn empty_report_is_valid() {
        let r = Report::from_entries(Vec::new());
        assert_eq!(r.fail_count, 0);
        assert!(r.to_json().contains("entries"));
    }
}
