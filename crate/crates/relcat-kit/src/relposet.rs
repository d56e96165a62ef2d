//! Finite posets and relative posets.
//!
//! A relative poset is a finite poset with a composition-closed marking of
//! order pairs, the weak equivalences. Elements are opaque integer ids with a
//! side table of labels; all order queries go through a precomputed
//! reachability matrix stored as bitset rows.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("relation is not reflexive at {0}")]
    NotReflexive(usize),
    #[error("relation is not antisymmetric on ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("relation is not transitive: ({0}, {1}) and ({1}, {2}) but not ({0}, {2})")]
    NotTransitive(usize, usize, usize),
    #[error("marked pair ({0}, {1}) is not an order pair")]
    MarkNotLeq(usize, usize),
    #[error("pair ({0}, {1}) out of range for n = {2}")]
    PairOutOfRange(usize, usize, usize),
    #[error("map is not monotone on ({0}, {1})")]
    NotMonotone(usize, usize),
    #[error("map assignment has wrong length or out-of-range values")]
    BadAssignment,
    #[error("element {0} out of range")]
    ElementOutOfRange(usize),
}

/// Square binary relation stored as bitset rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitRel {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitRel {
    pub fn new(n: usize) -> BitRel {
        let words = n.div_ceil(64);
        BitRel { n, words, bits: vec![0; n * words] }
    }

    pub fn identity(n: usize) -> BitRel {
        let mut r = BitRel::new(n);
        for i in 0..n {
            r.set(i, i);
        }
        r
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize) {
        self.bits[a * self.words + b / 64] |= 1 << (b % 64);
    }

    fn row(&self, a: usize) -> &[u64] {
        &self.bits[a * self.words..(a + 1) * self.words]
    }

    fn row_subset_of(&self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.row(a), self.row(b));
        ra.iter().zip(rb).all(|(x, y)| x & !y == 0)
    }

    /// In-place reflexive-transitive closure (Floyd–Warshall over bitset rows).
    pub fn close(&mut self) {
        for i in 0..self.n {
            self.set(i, i);
        }
        for b in 0..self.n {
            let row_b: Vec<u64> = self.row(b).to_vec();
            for a in 0..self.n {
                if self.get(a, b) {
                    let ra = &mut self.bits[a * self.words..(a + 1) * self.words];
                    for (x, y) in ra.iter_mut().zip(&row_b) {
                        *x |= y;
                    }
                }
            }
        }
    }

    pub fn iter_row(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.row(a);
        (0..self.n).filter(move |&b| row[b / 64] >> (b % 64) & 1 == 1)
    }
}

/// A finite poset over elements 0..len with a label per element.
#[derive(Clone, PartialEq)]
pub struct Poset {
    labels: Vec<String>,
    leq: BitRel,
}

impl std::fmt::Debug for Poset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Poset({} elements)", self.len())
    }
}

impl Poset {
    /// Builds a poset from an already reflexive-transitive relation.
    pub fn from_closed(labels: Vec<String>, leq: BitRel) -> Result<Poset, PosetError> {
        let n = labels.len();
        assert_eq!(leq.n, n);
        for a in 0..n {
            if !leq.get(a, a) {
                return Err(PosetError::NotReflexive(a));
            }
        }
        for a in 0..n {
            for b in leq.iter_row(a) {
                if a != b && leq.get(b, a) {
                    return Err(PosetError::NotAntisymmetric(a, b));
                }
            }
        }
        // transitive: the row of any b reachable from a stays inside a's row
        for a in 0..n {
            for b in leq.iter_row(a) {
                if !leq.row_subset_of(b, a) {
                    let c = leq.iter_row(b).find(|&c| !leq.get(a, c)).unwrap();
                    return Err(PosetError::NotTransitive(a, b, c));
                }
            }
        }
        Ok(Poset { labels, leq })
    }

    /// Builds a poset by closing the given pairs reflexively and transitively.
    pub fn from_pairs(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Poset, PosetError> {
        let n = labels.len();
        let mut rel = BitRel::new(n);
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(PosetError::PairOutOfRange(a, b, n));
            }
            rel.set(a, b);
        }
        rel.close();
        Poset::from_closed(labels, rel)
    }

    /// The linear poset 0 <= 1 <= ... <= n.
    pub fn linear(len: usize) -> Poset {
        let labels = (0..len).map(|i| i.to_string()).collect();
        let pairs: Vec<(usize, usize)> = (1..len).map(|i| (i - 1, i)).collect();
        Poset::from_pairs(labels, &pairs).expect("linear order is a poset")
    }

    pub fn empty() -> Poset {
        Poset { labels: Vec::new(), leq: BitRel::new(0) }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq.get(a, b)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq.get(a, b)
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn up_set(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.leq.iter_row(a)
    }

    /// All covering relations a < b with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.up_set(a) {
                if b == a {
                    continue;
                }
                let between = self
                    .up_set(a)
                    .any(|c| c != a && c != b && self.leq(c, b));
                if !between {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Covering relations of the full subposet on `members`, in local indices.
    pub fn sub_covers(&self, members: &[usize]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                if a == b || !self.leq(a, b) {
                    continue;
                }
                let between = members
                    .iter()
                    .any(|&c| c != a && c != b && self.leq(a, c) && self.leq(c, b));
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Full subposet on the given (sorted, distinct) members.
    pub fn full_subposet(&self, members: &[usize]) -> Poset {
        let mut rel = BitRel::new(members.len());
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                if self.leq(a, b) {
                    rel.set(i, j);
                }
            }
        }
        let labels = members.iter().map(|&a| self.labels[a].clone()).collect();
        Poset { labels, leq: rel }
    }

    /// All nonempty chains, each listed ascending; deterministic order.
    pub fn chains(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        fn rec(p: &Poset, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let last = *stack.last().unwrap();
            out.push(stack.clone());
            for next in p.up_set(last) {
                if next != last {
                    stack.push(next);
                    rec(p, stack, out);
                    stack.pop();
                }
            }
        }
        for start in self.elements() {
            stack.push(start);
            rec(self, &mut stack, &mut out);
            stack.pop();
        }
        out.sort();
        out
    }

    /// Length of the longest chain ending at each element (a 1-chain counts 1).
    pub fn chain_length_ending(&self) -> Vec<usize> {
        let n = self.len();
        let mut depth = vec![0usize; n];
        fn visit(p: &Poset, b: usize, depth: &mut [usize]) -> usize {
            if depth[b] != 0 {
                return depth[b];
            }
            let mut best = 1;
            for a in p.elements() {
                if p.lt(a, b) {
                    best = best.max(visit(p, a, depth) + 1);
                }
            }
            depth[b] = best;
            best
        }
        for b in 0..n {
            visit(self, b, &mut depth);
        }
        depth
    }
}

/// A poset with a composition-closed marking of order pairs.
#[derive(Clone, PartialEq)]
pub struct RelPoset {
    poset: Poset,
    marks: BitRel,
}

impl std::fmt::Debug for RelPoset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RelPoset({} elements, {} marked pairs)", self.len(), self.marked_pairs().len())
    }
}

impl RelPoset {
    /// Marks = composition closure of `generators` plus all identities.
    pub fn new(poset: Poset, generators: &[(usize, usize)]) -> Result<RelPoset, PosetError> {
        let n = poset.len();
        let mut marks = BitRel::new(n);
        for &(a, b) in generators {
            if a >= n || b >= n {
                return Err(PosetError::PairOutOfRange(a, b, n));
            }
            if !poset.leq(a, b) {
                return Err(PosetError::MarkNotLeq(a, b));
            }
            marks.set(a, b);
        }
        marks.close();
        RelPoset::from_closed(poset, marks)
    }

    /// Validates an already-closed marking.
    pub fn from_closed(poset: Poset, marks: BitRel) -> Result<RelPoset, PosetError> {
        let n = poset.len();
        for a in 0..n {
            if !marks.get(a, a) {
                return Err(PosetError::NotReflexive(a));
            }
            for b in marks.iter_row(a) {
                if !poset.leq(a, b) {
                    return Err(PosetError::MarkNotLeq(a, b));
                }
                if !marks.row_subset_of(b, a) {
                    let c = marks.iter_row(b).find(|&c| !marks.get(a, c)).unwrap();
                    return Err(PosetError::NotTransitive(a, b, c));
                }
            }
        }
        Ok(RelPoset { poset, marks })
    }

    /// Only identities marked.
    pub fn minimal(poset: Poset) -> RelPoset {
        let marks = BitRel::identity(poset.len());
        RelPoset { poset, marks }
    }

    /// Every order pair marked.
    pub fn maximal(poset: Poset) -> RelPoset {
        let marks = poset.leq.clone();
        RelPoset { poset, marks }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.poset.leq(a, b)
    }

    #[inline]
    pub fn marked(&self, a: usize, b: usize) -> bool {
        self.marks.get(a, b)
    }

    pub fn label(&self, a: usize) -> &str {
        self.poset.label(a)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        self.poset.elements()
    }

    /// Non-identity marked pairs, sorted.
    pub fn marked_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.marks.iter_row(a) {
                if a != b {
                    out.push((a, b));
                }
            }
        }
        out.sort();
        out
    }

    pub fn full_subposet(&self, members: &[usize]) -> RelPoset {
        let poset = self.poset.full_subposet(members);
        let mut marks = BitRel::new(members.len());
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                if self.marked(a, b) {
                    marks.set(i, j);
                }
            }
        }
        RelPoset { poset, marks }
    }
}

/// The linear poset 0 <= ... <= n with marks generated by `generator_marks`.
pub fn build_simplex(n: usize, generator_marks: &[(usize, usize)]) -> Result<RelPoset, PosetError> {
    for &(i, j) in generator_marks {
        if i > j || j > n {
            return Err(PosetError::PairOutOfRange(i, j, n + 1));
        }
    }
    RelPoset::new(Poset::linear(n + 1), generator_marks)
}

/// An order-preserving map of relative posets.
#[derive(Clone)]
pub struct MonotoneMap {
    pub source: Arc<RelPoset>,
    pub target: Arc<RelPoset>,
    map: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(
        source: Arc<RelPoset>,
        target: Arc<RelPoset>,
        map: Vec<usize>,
    ) -> Result<MonotoneMap, PosetError> {
        if map.len() != source.len() || map.iter().any(|&v| v >= target.len()) {
            return Err(PosetError::BadAssignment);
        }
        for a in source.elements() {
            for b in source.poset().up_set(a) {
                if !target.leq(map[a], map[b]) {
                    return Err(PosetError::NotMonotone(a, b));
                }
            }
        }
        Ok(MonotoneMap { source, target, map })
    }

    pub fn identity(p: Arc<RelPoset>) -> MonotoneMap {
        let map = (0..p.len()).collect();
        MonotoneMap { source: p.clone(), target: p, map }
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.map
    }
}

/// True iff every marked pair of the source maps to a marked pair of the target.
pub fn is_relative_map(f: &MonotoneMap) -> bool {
    let src = &f.source;
    src.elements().all(|a| {
        src.marks
            .iter_row(a)
            .all(|b| f.target.marked(f.apply(a), f.apply(b)))
    })
}

/// Elementwise product order; a pair is marked iff both coordinates are.
pub fn product(p: &RelPoset, q: &RelPoset) -> RelPoset {
    let (np, nq) = (p.len(), q.len());
    let n = np * nq;
    let mut labels = Vec::with_capacity(n);
    for a in 0..np {
        for x in 0..nq {
            labels.push(format!("({},{})", p.label(a), q.label(x)));
        }
    }
    let idx = |a: usize, x: usize| a * nq + x;
    let mut leq = BitRel::new(n);
    let mut marks = BitRel::new(n);
    for a in 0..np {
        for x in 0..nq {
            for b in 0..np {
                for y in 0..nq {
                    if p.leq(a, b) && q.leq(x, y) {
                        leq.set(idx(a, x), idx(b, y));
                        if p.marked(a, b) && q.marked(x, y) {
                            marks.set(idx(a, x), idx(b, y));
                        }
                    }
                }
            }
        }
    }
    let poset = Poset::from_closed(labels, leq).expect("product of posets is a poset");
    RelPoset::from_closed(poset, marks).expect("product marking is closed")
}

/// {d : exists c in C with c <= d}; always a superset of C.
pub fn vplus(d: &RelPoset, c: &[usize]) -> Vec<usize> {
    let mut hit = vec![false; d.len()];
    for &a in c {
        for b in d.poset().up_set(a) {
            hit[b] = true;
        }
    }
    (0..d.len()).filter(|&x| hit[x]).collect()
}

/// True iff a in A and a <= d imply d in A.
pub fn is_cosieve(d: &RelPoset, a: &[usize]) -> bool {
    let members: BTreeSet<usize> = a.iter().copied().collect();
    a.iter().all(|&x| d.poset().up_set(x).all(|y| members.contains(&y)))
}

/// The comma poset i/d for a poset map: the full subposet of the source on
/// {a : i(a) <= d}, together with its member ids.
pub fn comma_fiber(f: &MonotoneMap, d: usize) -> (Poset, Vec<usize>) {
    assert!(d < f.target.len(), "fiber target out of range");
    let members: Vec<usize> = f
        .source
        .elements()
        .filter(|&a| f.target.leq(f.apply(a), d))
        .collect();
    (f.source.poset().full_subposet(&members), members)
}

/// True iff lambda(p) <= q exactly when p <= rho(q), for all p, q.
pub fn check_galois_connection(lambda: &MonotoneMap, rho: &MonotoneMap) -> bool {
    let p = &lambda.source;
    let q = &lambda.target;
    if !Arc::ptr_eq(&rho.source, q) && rho.source.as_ref() != q.as_ref() {
        return false;
    }
    if !Arc::ptr_eq(&rho.target, p) && rho.target.as_ref() != p.as_ref() {
        return false;
    }
    p.elements().all(|x| {
        q.elements()
            .all(|y| q.leq(lambda.apply(x), y) == p.leq(x, rho.apply(y)))
    })
}

/// Every composition-closed marking on the linear poset 0..=n, deduplicated,
/// in a deterministic order. Exponential in n; intended for n <= 4.
pub fn all_structures(n: usize) -> Vec<RelPoset> {
    let pairs: Vec<(usize, usize)> = (0..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let gens: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let rp = build_simplex(n, &gens).expect("in-range generators");
        let key = rp.marked_pairs();
        if seen.insert(key) {
            out.push(rp);
        }
    }
    out
}

/// Side conditions a marking on the linear poset must satisfy for a given
/// horn index. The cone-extension set asks only that the last step be marked
/// for the top horn; the retraction set also pins the first step for the
/// bottom horn; the horn-filling set additionally wants a non-identity mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureHypotheses {
    ConeExtension,
    Retraction,
    HornFilling,
}

impl StructureHypotheses {
    pub fn admits(&self, n: usize, k: usize, structure: &RelPoset) -> bool {
        let last_ok = k != n || structure.marked(n - 1, n);
        match self {
            StructureHypotheses::ConeExtension => last_ok,
            StructureHypotheses::Retraction => last_ok && (k != 0 || structure.marked(0, 1)),
            StructureHypotheses::HornFilling => {
                last_ok
                    && (k != 0 || structure.marked(0, 1))
                    && !structure.marked_pairs().is_empty()
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            StructureHypotheses::ConeExtension => "cone-extension",
            StructureHypotheses::Retraction => "retraction",
            StructureHypotheses::HornFilling => "horn-filling",
        }
    }
}

/// Parses `we = i-j, k-l, ...` (the `we =` prefix is optional) into generator
/// pairs for `build_simplex`.
pub fn parse_we(input: &str) -> Result<Vec<(usize, usize)>, String> {
    let body = input.trim();
    let body = body.strip_prefix("we").map(str::trim_start).unwrap_or(body);
    let body = body.strip_prefix('=').map(str::trim_start).unwrap_or(body);
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|part| {
            let part = part.trim();
            let (i, j) = part
                .split_once('-')
                .ok_or_else(|| format!("expected i-j, got {part:?}"))?;
            let i: usize = i.trim().parse().map_err(|e| format!("{part:?}: {e}"))?;
            let j: usize = j.trim().parse().map_err(|e| format!("{part:?}: {e}"))?;
            Ok((i, j))
        })
        .collect()
}

pub fn format_we(pairs: &[(usize, usize)]) -> String {
    let mut s = String::from("we =");
    if pairs.is_empty() {
        return s;
    }
    for (k, (i, j)) in pairs.iter().enumerate() {
        let sep = if k == 0 { " " } else { ", " };
        let _ = write!(s, "{sep}{i}-{j}");
    }
    s
}

/// JSON mirror used by the golden-test serialization of relative posets.
#[derive(Serialize, Deserialize)]
pub struct RelPosetJson {
    pub elements: Vec<String>,
    pub leq_pairs: Vec<(usize, usize)>,
    pub marked_pairs: Vec<(usize, usize)>,
}

impl RelPoset {
    pub fn to_json(&self) -> RelPosetJson {
        let mut leq_pairs = Vec::new();
        for a in self.elements() {
            for b in self.poset.up_set(a) {
                if a != b {
                    leq_pairs.push((a, b));
                }
            }
        }
        leq_pairs.sort();
        RelPosetJson {
            elements: self.poset.labels.clone(),
            leq_pairs,
            marked_pairs: self.marked_pairs(),
        }
    }

    pub fn from_json(json: &RelPosetJson) -> Result<RelPoset, PosetError> {
        let poset = Poset::from_pairs(json.elements.clone(), &json.leq_pairs)?;
        RelPoset::new(poset, &json.marked_pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn build_simplex_examples() {
        let p = build_simplex(1, &[(0, 1)]).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.marked(0, 1));

        let p = build_simplex(2, &[(0, 1), (1, 2)]).unwrap();
        assert!(p.marked(0, 2), "closure forces (0,2)");

        let p = build_simplex(2, &[]).unwrap();
        assert_eq!(p.marked_pairs(), vec![]);

        assert!(build_simplex(2, &[(1, 3)]).is_err());
        assert!(build_simplex(2, &[(2, 1)]).is_err());
    }

    #[test]
    fn identity_map_is_relative() {
        let p = Arc::new(build_simplex(3, &[(1, 2)]).unwrap());
        let id = MonotoneMap::identity(p);
        assert!(is_relative_map(&id));
    }

    #[test]
    fn mark_violation_detected() {
        // source marks 0-1; target is 0 <= 1 with nothing marked
        let src = Arc::new(build_simplex(1, &[(0, 1)]).unwrap());
        let tgt = Arc::new(build_simplex(1, &[]).unwrap());
        let f = MonotoneMap::new(src, tgt, vec![0, 1]).unwrap();
        assert!(!is_relative_map(&f));
    }

    #[test]
    fn product_of_minimal_and_maximal() {
        let one = Poset::linear(2);
        let p = RelPoset::minimal(one.clone());
        let q = RelPoset::maximal(one);
        let prod = product(&p, &q);
        assert_eq!(prod.len(), 4);
        // marked non-identity pairs are exactly those with constant first coordinate
        for (a, b) in prod.marked_pairs() {
            assert_eq!(prod.label(a).as_bytes()[1], prod.label(b).as_bytes()[1]);
        }
        assert_eq!(prod.marked_pairs().len(), 2);
    }

    #[test]
    fn product_unit_law_and_size() {
        let p = build_simplex(2, &[(0, 1)]).unwrap();
        let point = RelPoset::minimal(Poset::linear(1));
        let prod = product(&p, &point);
        assert_eq!(prod.len(), p.len());
        assert_eq!(prod.marked_pairs().len(), p.marked_pairs().len());
        let q = build_simplex(1, &[]).unwrap();
        assert_eq!(product(&p, &q).len(), p.len() * q.len());
    }

    #[test]
    fn vplus_basics() {
        let d = build_simplex(3, &[]).unwrap();
        let all: Vec<usize> = d.elements().collect();
        assert_eq!(vplus(&d, &all), all);
        assert_eq!(vplus(&d, &[]), Vec::<usize>::new());
        assert_eq!(vplus(&d, &[1]), vec![1, 2, 3]);
    }

    #[test]
    fn cosieve_basics() {
        let d = build_simplex(3, &[]).unwrap();
        let all: Vec<usize> = d.elements().collect();
        assert!(is_cosieve(&d, &all));
        assert!(is_cosieve(&d, &[2, 3]));
        assert!(!is_cosieve(&d, &[0, 1])); // 1 <= 2 leaves the subset
    }

    #[test]
    fn comma_fiber_basics() {
        let p = Arc::new(build_simplex(3, &[]).unwrap());
        let id = MonotoneMap::identity(p.clone());
        let (fiber, members) = comma_fiber(&id, 2);
        assert_eq!(members, vec![0, 1, 2]);
        assert_eq!(fiber.len(), 3);
        // map with image above d = 1 gives an empty fiber
        let f = MonotoneMap::new(p.clone(), p.clone(), vec![2, 2, 3, 3]).unwrap();
        let (fiber, members) = comma_fiber(&f, 1);
        assert!(members.is_empty());
        assert!(fiber.is_empty());
    }

    #[test]
    fn galois_identity_and_violation() {
        let p = Arc::new(build_simplex(2, &[]).unwrap());
        let id = MonotoneMap::identity(p.clone());
        assert!(check_galois_connection(&id, &id));
        // lambda = const 2, rho = const 0 is not an adjunction on 0<=1<=2
        let lam = MonotoneMap::new(p.clone(), p.clone(), vec![2, 2, 2]).unwrap();
        let rho = MonotoneMap::new(p.clone(), p.clone(), vec![0, 0, 0]).unwrap();
        assert!(!check_galois_connection(&lam, &rho));
    }

    #[test]
    fn structure_enumeration_counts() {
        assert_eq!(all_structures(1).len(), 2);
        assert_eq!(all_structures(2).len(), 7);
        assert_eq!(all_structures(3).len(), 40);
    }

    #[test]
    fn we_parsing() {
        assert_eq!(parse_we("we = 0-1, 1-2").unwrap(), vec![(0, 1), (1, 2)]);
        assert_eq!(parse_we("0-1,2-3").unwrap(), vec![(0, 1), (2, 3)]);
        assert_eq!(parse_we("we =").unwrap(), vec![]);
        assert_eq!(parse_we("").unwrap(), vec![]);
        assert!(parse_we("0:1").is_err());
        let pairs = vec![(0, 1), (1, 2)];
        assert_eq!(parse_we(&format_we(&pairs)).unwrap(), pairs);
    }

    #[test]
    fn json_roundtrip() {
        let p = build_simplex(2, &[(0, 1)]).unwrap();
        let json = p.to_json();
        let back = RelPoset::from_json(&json).unwrap();
        assert_eq!(back.marked_pairs(), p.marked_pairs());
        assert_eq!(back.len(), p.len());
    }

    /// Random small poset: a random DAG on 0..n closed transitively.
    fn arb_poset(n: usize) -> impl Strategy<Value = Poset> {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |edges| {
            let mut rel = BitRel::new(n);
            for a in 0..n {
                for b in (a + 1)..n {
                    if edges[a * n + b] {
                        rel.set(a, b);
                    }
                }
            }
            rel.close();
            Poset::from_closed((0..n).map(|i| i.to_string()).collect(), rel).unwrap()
        })
    }

    proptest! {
        #[test]
        fn mark_closure_is_idempotent(poset in arb_poset(5), mask in any::<u32>()) {
            let pairs: Vec<(usize,usize)> = poset
                .elements()
                .flat_map(|a| poset.up_set(a).map(move |b| (a, b)))
                .filter(|(a, b)| a != b)
                .collect();
            let gens: Vec<(usize,usize)> = pairs
                .iter().enumerate()
                .filter(|(i, _)| mask >> (i % 32) & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            let rp = RelPoset::new(poset, &gens).unwrap();
            let again = RelPoset::new(rp.poset().clone(), &rp.marked_pairs()).unwrap();
            prop_assert_eq!(again.marked_pairs(), rp.marked_pairs());
        }

        #[test]
        fn vplus_monotone_idempotent_cosieve(poset in arb_poset(6), sub in any::<u8>(), sub2 in any::<u8>()) {
            let rp = RelPoset::minimal(poset);
            let c: Vec<usize> = rp.elements().filter(|&i| sub >> i & 1 == 1).collect();
            let c_big: Vec<usize> = rp.elements().filter(|&i| (sub | sub2) >> i & 1 == 1).collect();
            let v = vplus(&rp, &c);
            let v_big = vplus(&rp, &c_big);
            // monotone
            prop_assert!(v.iter().all(|x| v_big.contains(x)));
            // idempotent
            prop_assert_eq!(vplus(&rp, &v), v.clone());
            // result is a cosieve and contains C
            prop_assert!(is_cosieve(&rp, &v));
            prop_assert!(c.iter().all(|x| v.contains(x)));
        }

        #[test]
        fn galois_implies_unit_counit(n in 2usize..5, shift in 0usize..3) {
            // lambda(x) = min(x + shift, top), rho = identity-ish floor adjoint
            let p = Arc::new(RelPoset::minimal(Poset::linear(n)));
            let lam_map: Vec<usize> = (0..n).map(|x| (x + shift).min(n - 1)).collect();
            let rho_map: Vec<usize> = (0..n).map(|y| y.saturating_sub(shift)).collect();
            let lam = MonotoneMap::new(p.clone(), p.clone(), lam_map).unwrap();
            let rho = MonotoneMap::new(p.clone(), p.clone(), rho_map).unwrap();
            if check_galois_connection(&lam, &rho) {
                for x in 0..n {
                    prop_assert!(p.leq(x, rho.apply(lam.apply(x))));
                    prop_assert!(p.leq(lam.apply(rho.apply(x)), x));
                }
            }
        }
    }
}
