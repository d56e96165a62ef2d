//! Exact integral homology of simplicial complexes via Smith normal form,
//! plus a free-face collapsing search that certifies contractibility
//! constructively when it succeeds.

use std::collections::{BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::simplicial::SimComplex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("homology of the empty complex is rejected")]
    EmptyComplex,
}

// ---------------------------------------------------------------------------
// integral chain complex of a simplicial complex
// ---------------------------------------------------------------------------

/// Sparse integer matrix in triplet form, entries small at construction time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMat {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, i64)>,
}

impl SparseIntMat {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&(_, _, v)| v == 0)
    }
}

/// Per-dimension ordered bases and boundary operators with alternating signs;
/// the composite of consecutive boundaries is checked to vanish.
pub struct ChainComplexZ {
    pub bases: Vec<Vec<Vec<usize>>>,
    /// boundaries[d] maps d-chains to (d-1)-chains; boundaries[0] is empty.
    pub boundaries: Vec<SparseIntMat>,
}

pub fn boundary_matrices(k: &SimComplex) -> ChainComplexZ {
    let top = k.dim().map_or(0, |d| d + 1);
    let mut bases = Vec::with_capacity(top);
    for d in 0..top {
        bases.push(k.simplices(d).to_vec());
    }
    let mut boundaries = Vec::with_capacity(top);
    for d in 0..top {
        if d == 0 {
            boundaries.push(SparseIntMat { rows: 0, cols: bases[0].len(), entries: Vec::new() });
            continue;
        }
        let mut entries = Vec::new();
        for (col, simplex) in bases[d].iter().enumerate() {
            let mut sign = 1i64;
            for skip in 0..simplex.len() {
                let face: Vec<usize> = simplex
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let row = k.index_of(&face).expect("complex closed under faces");
                entries.push((row, col, sign));
                sign = -sign;
            }
        }
        boundaries.push(SparseIntMat { rows: bases[d - 1].len(), cols: bases[d].len(), entries });
    }
    let cc = ChainComplexZ { bases, boundaries };
    debug_assert!(cc.squares_to_zero());
    cc
}

impl ChainComplexZ {
    /// d(d(x)) = 0 for every basis simplex.
    pub fn squares_to_zero(&self) -> bool {
        for d in 2..self.boundaries.len() {
            let hi = &self.boundaries[d];
            let lo = &self.boundaries[d - 1];
            let mut lo_rows: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
            for &(r, c, v) in &lo.entries {
                lo_rows.entry(c).or_default().push((r, v));
            }
            let mut acc: HashMap<(usize, usize), i64> = HashMap::new();
            for &(mid, col, v) in &hi.entries {
                if let Some(rows) = lo_rows.get(&mid) {
                    for &(r, w) in rows {
                        *acc.entry((r, col)).or_insert(0) += v * w;
                    }
                }
            }
            if acc.values().any(|&v| v != 0) {
                return false;
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

/// Dense Smith normal form D = U * M * V with unimodular transforms.
pub struct SmithForm {
    pub rows: usize,
    pub cols: usize,
    /// Nonzero diagonal entries, positive, each dividing the next.
    pub diag: Vec<BigInt>,
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal_matrix(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (i, x) in self.diag.iter().enumerate() {
            d[i][i] = x.clone();
        }
        d
    }
}

pub fn smith_normal_form(m: &[Vec<BigInt>]) -> SmithForm {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut u: Vec<Vec<BigInt>> = identity(rows);
    let mut v: Vec<Vec<BigInt>> = identity(cols);

    let mut t = 0;
    'outer: while t < rows && t < cols {
        // smallest nonzero entry in the remaining block becomes the pivot
        let mut pivot: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if a[r][c].is_zero() {
                    continue;
                }
                match pivot {
                    None => pivot = Some((r, c)),
                    Some((pr, pc)) => {
                        if a[r][c].abs() < a[pr][pc].abs() {
                            pivot = Some((r, c));
                        }
                    }
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        a.swap(t, pr);
        u.swap(t, pr);
        swap_cols(&mut a, t, pc);
        swap_cols(&mut v, t, pc);

        // reduce the pivot row and column until the pivot divides everything there
        loop {
            let mut done = true;
            for r in t + 1..rows {
                if a[r][t].is_zero() {
                    continue;
                }
                let q = div_round(&a[r][t], &a[t][t]);
                if !q.is_zero() {
                    row_sub(&mut a, r, t, &q);
                    row_sub(&mut u, r, t, &q);
                }
                if !a[r][t].is_zero() {
                    // remainder strictly smaller; swap it into pivot position
                    a.swap(t, r);
                    u.swap(t, r);
                    done = false;
                }
            }
            for c in t + 1..cols {
                if a[t][c].is_zero() {
                    continue;
                }
                let q = div_round(&a[t][c], &a[t][t]);
                if !q.is_zero() {
                    col_sub(&mut a, c, t, &q);
                    col_sub(&mut v, c, t, &q);
                }
                if !a[t][c].is_zero() {
                    swap_cols(&mut a, t, c);
                    swap_cols(&mut v, t, c);
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        // divisibility: the pivot must divide every remaining entry
        for r in t + 1..rows {
            for c in t + 1..cols {
                if !(&a[r][c] % &a[t][t]).is_zero() {
                    // add row r to row t and restart this position
                    let one = BigInt::one();
                    row_add(&mut a, t, r, &one);
                    row_add(&mut u, t, r, &one);
                    continue 'outer;
                }
            }
        }
        t += 1;
    }
    // positive diagonal
    for i in 0..t {
        if a[i][i].is_negative() {
            for c in 0..cols {
                a[i][c] = -a[i][c].clone();
            }
            for c in 0..u[i].len() {
                u[i][c] = -u[i][c].clone();
            }
        }
    }
    let diag: Vec<BigInt> = (0..t).map(|i| a[i][i].clone()).filter(|x| !x.is_zero()).collect();
    SmithForm { rows, cols, diag, u, v }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a == b {
        return;
    }
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn row_sub(m: &mut [Vec<BigInt>], r: usize, from: usize, q: &BigInt) {
    let src: Vec<BigInt> = m[from].clone();
    for (x, s) in m[r].iter_mut().zip(src) {
        *x -= q * s;
    }
}

fn row_add(m: &mut [Vec<BigInt>], r: usize, from: usize, q: &BigInt) {
    let src: Vec<BigInt> = m[from].clone();
    for (x, s) in m[r].iter_mut().zip(src) {
        *x += q * s;
    }
}

fn col_sub(m: &mut [Vec<BigInt>], c: usize, from: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let s = row[from].clone();
        row[c] -= q * s;
    }
}

/// Rounded division keeps remainders at most half the divisor in size, so the
/// Euclidean passes terminate quickly.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let double: BigInt = &r * 2;
    if double.abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Rank and elementary divisors of a sparse integer matrix.
///
/// Unit pivots are eliminated first with Markowitz-style pivot selection,
/// which keeps subdivision boundary matrices sparse; the residual block,
/// usually empty, goes through the dense Smith normal form.
pub fn elementary_divisors(m: &SparseIntMat) -> (usize, Vec<BigInt>) {
    let mut rows: Vec<HashMap<usize, BigInt>> = vec![HashMap::new(); m.rows];
    let mut col_rows: Vec<HashSet<usize>> = vec![HashSet::new(); m.cols];
    for &(r, c, v) in &m.entries {
        if v != 0 {
            let e = rows[r].entry(c).or_insert_with(BigInt::zero);
            *e += v;
            if e.is_zero() {
                rows[r].remove(&c);
            } else {
                col_rows[c].insert(r);
            }
        }
    }
    for (c, set) in col_rows.iter_mut().enumerate() {
        set.retain(|&r| rows[r].contains_key(&c));
    }

    let mut active_row = vec![true; m.rows];
    let mut active_col = vec![true; m.cols];
    let mut heap: BinaryHeap<Reverse<(usize, usize, usize)>> = BinaryHeap::new();
    let push_units = |rows: &Vec<HashMap<usize, BigInt>>,
                      col_rows: &Vec<HashSet<usize>>,
                      heap: &mut BinaryHeap<Reverse<(usize, usize, usize)>>,
                      r: usize| {
        for (&c, v) in &rows[r] {
            if v.abs().is_one() {
                let cost = (rows[r].len() - 1) * (col_rows[c].len().saturating_sub(1));
                heap.push(Reverse((cost, r, c)));
            }
        }
    };
    for r in 0..m.rows {
        push_units(&rows, &col_rows, &mut heap, r);
    }

    let mut rank = 0usize;
    while let Some(Reverse((_, pr, pc))) = heap.pop() {
        if !active_row[pr] || !active_col[pc] {
            continue;
        }
        let Some(pv) = rows[pr].get(&pc).cloned() else { continue };
        if !pv.abs().is_one() {
            continue;
        }
        // eliminate column pc using row pr
        let pivot_row: Vec<(usize, BigInt)> =
            rows[pr].iter().map(|(&c, v)| (c, v.clone())).collect();
        let victims: Vec<usize> = col_rows[pc].iter().copied().filter(|&r| r != pr).collect();
        for r in victims {
            let factor = {
                let e = rows[r].get(&pc).expect("index consistent");
                e * &pv // pv = ±1, so e/pv = e*pv
            };
            for (c, v) in &pivot_row {
                if !active_col[*c] {
                    continue;
                }
                let entry = rows[r].entry(*c).or_insert_with(BigInt::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    rows[r].remove(c);
                    col_rows[*c].remove(&r);
                } else {
                    col_rows[*c].insert(r);
                }
            }
            push_units(&rows, &col_rows, &mut heap, r);
        }
        // retire pivot row and column
        active_row[pr] = false;
        active_col[pc] = false;
        for (c, _) in &pivot_row {
            col_rows[*c].remove(&pr);
        }
        rows[pr].clear();
        rank += 1;
    }

    // residual block without unit entries
    let rem_rows: Vec<usize> = (0..m.rows).filter(|&r| active_row[r] && !rows[r].is_empty()).collect();
    let mut rem_cols: HashSet<usize> = HashSet::new();
    for &r in &rem_rows {
        for (&c, _) in &rows[r] {
            rem_cols.insert(c);
        }
    }
    let mut divisors = vec![BigInt::one(); rank];
    if !rem_rows.is_empty() {
        let mut rem_cols: Vec<usize> = rem_cols.into_iter().collect();
        rem_cols.sort_unstable();
        let col_index: HashMap<usize, usize> =
            rem_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut dense = vec![vec![BigInt::zero(); rem_cols.len()]; rem_rows.len()];
        for (i, &r) in rem_rows.iter().enumerate() {
            for (&c, v) in &rows[r] {
                dense[i][col_index[&c]] = v.clone();
            }
        }
        let snf = smith_normal_form(&dense);
        rank += snf.rank();
        divisors.extend(snf.diag);
    }
    (rank, divisors)
}

// ---------------------------------------------------------------------------
// homology reports
// ---------------------------------------------------------------------------

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(BigInt::to_string).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        strings
            .into_iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimReport {
    pub dim: usize,
    pub betti: usize,
    #[serde(with = "bigint_string")]
    pub torsion: Vec<BigInt>,
}

/// Reduced Betti numbers and torsion coefficients per dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub dims: Vec<DimReport>,
}

impl HomologyReport {
    pub fn is_acyclic(&self) -> bool {
        self.dims.iter().all(|d| d.betti == 0 && d.torsion.is_empty())
    }

    /// Reduced Betti number in the given dimension.
    pub fn betti(&self, dim: usize) -> usize {
        self.dims.iter().find(|d| d.dim == dim).map_or(0, |d| d.betti)
    }
}

/// Reduced homology from Smith normal form ranks, using the augmented
/// complex; the empty complex is rejected.
pub fn reduced_homology(k: &SimComplex) -> Result<HomologyReport, HomologyError> {
    if k.is_empty() {
        return Err(HomologyError::EmptyComplex);
    }
    let cc = boundary_matrices(k);
    let top = cc.bases.len() - 1;
    // rank and divisors of each boundary; dimension 0 uses the augmentation,
    // an all-ones row of rank 1 with trivial divisors
    let mut ranks = vec![0usize; top + 2];
    let mut divisors: Vec<Vec<BigInt>> = vec![Vec::new(); top + 2];
    ranks[0] = 1;
    for d in 1..=top {
        let (r, div) = elementary_divisors(&cc.boundaries[d]);
        ranks[d] = r;
        divisors[d] = div;
    }
    let mut dims = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let cells = cc.bases[d].len();
        let betti = cells - ranks[d] - ranks[d + 1];
        let torsion: Vec<BigInt> = divisors[d + 1]
            .iter()
            .filter(|x| !x.is_one())
            .cloned()
            .collect();
        dims.push(DimReport { dim: d, betti, torsion });
    }
    Ok(HomologyReport { dims })
}

// ---------------------------------------------------------------------------
// collapsing
// ---------------------------------------------------------------------------

/// An ordered list of elementary collapses ending at a single vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseCertificate {
    pub steps: Vec<(Vec<usize>, Vec<usize>)>,
    pub final_vertex: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CollapseOutcome {
    Collapsed(CollapseCertificate),
    /// Inconclusive: the bounded search found no full collapse.
    Stuck,
}

struct CollapseState {
    vertices: usize,
    cells: HashSet<Vec<usize>>,
    /// number of (dim+1)-cofaces per simplex; a simplex with exactly one is free
    coface_count: HashMap<Vec<usize>, usize>,
    by_dim: Vec<HashSet<Vec<usize>>>,
    /// free faces per dimension, kept in sync with the counts
    free_by_dim: Vec<std::collections::BTreeSet<Vec<usize>>>,
}

impl CollapseState {
    fn new(k: &SimComplex) -> CollapseState {
        let top = k.dim().map_or(0, |d| d + 1);
        let mut cells = HashSet::new();
        let mut by_dim = vec![HashSet::new(); top];
        for d in 0..top {
            for s in k.simplices(d) {
                cells.insert(s.clone());
                by_dim[d].insert(s.clone());
            }
        }
        let mut coface_count: HashMap<Vec<usize>, usize> = HashMap::new();
        for d in 0..top {
            for s in k.simplices(d) {
                coface_count.insert(s.clone(), 0);
            }
        }
        for d in 1..top {
            for s in k.simplices(d) {
                for q in 0..s.len() {
                    let mut f = s.clone();
                    f.remove(q);
                    *coface_count.get_mut(&f).unwrap() += 1;
                }
            }
        }
        let mut free_by_dim = vec![std::collections::BTreeSet::new(); top];
        for (s, &c) in &coface_count {
            if c == 1 {
                free_by_dim[s.len() - 1].insert(s.clone());
            }
        }
        CollapseState { vertices: k.vertices(), cells, coface_count, by_dim, free_by_dim }
    }

    fn sync_free(&mut self, f: &[usize]) {
        let is_free = self.coface_count.get(f) == Some(&1);
        let level = &mut self.free_by_dim[f.len() - 1];
        if is_free {
            level.insert(f.to_vec());
        } else {
            level.remove(f);
        }
    }

    fn bump(&mut self, f: &[usize], delta: isize) {
        if let Some(c) = self.coface_count.get_mut(f) {
            *c = (*c as isize + delta) as usize;
            self.sync_free(f);
        }
    }

    /// The unique coface of a free simplex, if the simplex is free.
    fn unique_coface(&self, s: &[usize]) -> Option<Vec<usize>> {
        if self.coface_count.get(s) != Some(&1) {
            return None;
        }
        for v in 0..self.vertices {
            if s.contains(&v) {
                continue;
            }
            let mut t = s.to_vec();
            let pos = t.partition_point(|&x| x < v);
            t.insert(pos, v);
            if self.cells.contains(&t) {
                return Some(t);
            }
        }
        None
    }

    fn drop_cell(&mut self, s: &[usize]) {
        self.cells.remove(s);
        self.by_dim[s.len() - 1].remove(s);
        self.coface_count.remove(s);
        self.free_by_dim[s.len() - 1].remove(s);
    }

    fn remove_pair(&mut self, s: &[usize], t: &[usize]) {
        self.drop_cell(s);
        self.drop_cell(t);
        for q in 0..t.len() {
            let mut f = t.to_vec();
            f.remove(q);
            self.bump(&f, -1);
        }
        if s.len() > 1 {
            for q in 0..s.len() {
                let mut f = s.to_vec();
                f.remove(q);
                self.bump(&f, -1);
            }
        }
    }

    fn insert_pair(&mut self, s: &[usize], t: &[usize]) {
        self.cells.insert(s.to_vec());
        self.cells.insert(t.to_vec());
        self.by_dim[s.len() - 1].insert(s.to_vec());
        self.by_dim[t.len() - 1].insert(t.to_vec());
        self.coface_count.insert(s.to_vec(), 1);
        self.sync_free(s);
        let mut t_count = 0;
        if t.len() < self.by_dim.len() {
            for u in &self.by_dim[t.len()] {
                if is_face(t, u) {
                    t_count += 1;
                }
            }
        }
        self.coface_count.insert(t.to_vec(), t_count);
        self.sync_free(t);
        for q in 0..t.len() {
            let mut f = t.to_vec();
            f.remove(q);
            if f.as_slice() == s {
                continue;
            }
            self.bump(&f, 1);
        }
        if s.len() > 1 {
            for q in 0..s.len() {
                let mut f = s.to_vec();
                f.remove(q);
                self.bump(&f, 1);
            }
        }
    }

    /// First free face in (top dimension, lexicographic) order, skipping the
    /// given prefix of already-tried candidates.
    fn next_free_after(&self, tried: &[Vec<usize>]) -> Option<Vec<usize>> {
        for d in (0..self.free_by_dim.len()).rev() {
            for s in &self.free_by_dim[d] {
                if !tried.contains(s) {
                    return Some(s.clone());
                }
            }
        }
        None
    }
}

fn is_face(s: &[usize], t: &[usize]) -> bool {
    if s.len() + 1 != t.len() {
        return false;
    }
    let mut it = t.iter();
    s.iter().all(|x| it.any(|y| y == x))
}

/// Greedy free-face collapsing with lexicographic tie-breaking and bounded
/// backtracking. `Stuck` is inconclusive, not a refutation.
pub fn collapse_search(k: &SimComplex) -> CollapseOutcome {
    collapse_search_with_budget(k, 64)
}

pub fn collapse_search_with_budget(k: &SimComplex, backtrack_budget: usize) -> CollapseOutcome {
    if k.is_empty() {
        return CollapseOutcome::Stuck;
    }
    let mut state = CollapseState::new(k);
    let mut steps: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    // per depth: candidates already tried at this point
    let mut tried_stack: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut backtracks = 0usize;

    loop {
        if state.cells.len() == 1 {
            let v = state.cells.iter().next().unwrap().clone();
            if v.len() == 1 {
                return CollapseOutcome::Collapsed(CollapseCertificate {
                    steps,
                    final_vertex: v,
                });
            }
        }
        let mut tried: Vec<Vec<usize>> = Vec::new();
        loop {
            if let Some(s) = state.next_free_after(&tried) {
                let t = state.unique_coface(&s).expect("candidate is free");
                state.remove_pair(&s, &t);
                steps.push((s.clone(), t));
                tried.push(s);
                tried_stack.push(tried);
                break;
            }
            // dead end: backtrack
            if backtracks >= backtrack_budget {
                return CollapseOutcome::Stuck;
            }
            backtracks += 1;
            match (steps.pop(), tried_stack.pop()) {
                (Some((s, t)), Some(prev_tried)) => {
                    state.insert_pair(&s, &t);
                    tried = prev_tried;
                }
                _ => return CollapseOutcome::Stuck,
            }
        }
    }
}

/// Replays a certificate against the complex it claims to collapse.
pub fn replay_certificate(k: &SimComplex, cert: &CollapseCertificate) -> bool {
    let mut state = CollapseState::new(k);
    for (s, t) in &cert.steps {
        if !state.cells.contains(s) || !state.cells.contains(t) {
            return false;
        }
        match state.unique_coface(s) {
            Some(u) if &u == t => state.remove_pair(s, t),
            _ => return false,
        }
    }
    state.cells.len() == 1 && state.cells.contains(&cert.final_vertex) && cert.final_vertex.len() == 1
}

// ---------------------------------------------------------------------------
// the verdict
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Collapsible(CollapseCertificate),
    AcyclicOnly(HomologyReport),
    NonAcyclic(HomologyReport),
}

impl Verdict {
    pub fn certifies_contractible(&self) -> bool {
        matches!(self, Verdict::Collapsible(_) | Verdict::AcyclicOnly(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Collapsible(_) => "collapsible",
            Verdict::AcyclicOnly(_) => "acyclic-only",
            Verdict::NonAcyclic(_) => "non-acyclic",
        }
    }
}

/// Collapsible when the search succeeds; otherwise classified by reduced
/// homology. Nonempty input required.
pub fn contractibility_verdict(k: &SimComplex) -> Result<Verdict, HomologyError> {
    if k.is_empty() {
        return Err(HomologyError::EmptyComplex);
    }
    match collapse_search(k) {
        CollapseOutcome::Collapsed(cert) => {
            debug_assert!(replay_certificate(k, &cert));
            Ok(Verdict::Collapsible(cert))
        }
        CollapseOutcome::Stuck => {
            let report = reduced_homology(k)?;
            if report.is_acyclic() {
                Ok(Verdict::AcyclicOnly(report))
            } else {
                Ok(Verdict::NonAcyclic(report))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relposet::Poset;
    use crate::simplicial::nerve;
    use proptest::prelude::*;

    fn int_matrix(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let n = a.len();
        let m = b[0].len();
        let k = b.len();
        let mut out = vec![vec![BigInt::zero(); m]; n];
        for i in 0..n {
            for j in 0..m {
                for l in 0..k {
                    let prod = &a[i][l] * &b[l][j];
                    out[i][j] += prod;
                }
            }
        }
        out
    }

    #[test]
    fn boundary_of_edge() {
        let k = SimComplex::simplex(1);
        let cc = boundary_matrices(&k);
        assert_eq!(cc.boundaries[1].entries.len(), 2);
        let vals: Vec<i64> = cc.boundaries[1].entries.iter().map(|e| e.2).collect();
        assert_eq!(vals.iter().sum::<i64>(), 0);
        assert!(cc.squares_to_zero());
    }

    #[test]
    fn snf_examples() {
        let id = smith_normal_form(&int_matrix(&[&[1, 0], &[0, 1]]));
        assert_eq!(id.diag, vec![BigInt::from(1), BigInt::from(1)]);

        let m = int_matrix(&[&[2, 0], &[0, 3]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diag, vec![BigInt::from(1), BigInt::from(6)]);
        // U * M * V = D
        let umv = mat_mul(&mat_mul(&snf.u, &m), &snf.v);
        assert_eq!(umv, snf.diagonal_matrix());

        let z = smith_normal_form(&int_matrix(&[&[0, 0], &[0, 0]]));
        assert!(z.diag.is_empty());
    }

    /// gcd-of-minors oracle for elementary divisors of tiny matrices.
    fn minor_gcd_divisors(m: &[Vec<BigInt>]) -> Vec<BigInt> {
        let rows = m.len();
        let cols = m[0].len();
        let max = rows.min(cols);
        fn det(m: &[Vec<BigInt>], rs: &[usize], cs: &[usize]) -> BigInt {
            if rs.is_empty() {
                return BigInt::one();
            }
            let mut acc = BigInt::zero();
            for (i, &c) in cs.iter().enumerate() {
                let sub_rs = &rs[1..];
                let sub_cs: Vec<usize> =
                    cs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &x)| x).collect();
                let minor = det(m, sub_rs, &sub_cs);
                let term = &m[rs[0]][c] * minor;
                if i % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if cur.len() == k {
                    out.push(cur.clone());
                    return;
                }
                for i in start..n {
                    cur.push(i);
                    rec(i + 1, n, k, cur, out);
                    cur.pop();
                }
            }
            rec(0, n, k, &mut Vec::new(), &mut out);
            out
        }
        let mut d_prev = BigInt::one();
        let mut out = Vec::new();
        for k in 1..=max {
            let mut g = BigInt::zero();
            for rs in combos(rows, k) {
                for cs in combos(cols, k) {
                    g = g.gcd(&det(m, &rs, &cs));
                }
            }
            if g.is_zero() {
                break;
            }
            out.push(&g / &d_prev);
            d_prev = g;
        }
        out
    }

    proptest! {
        #[test]
        fn snf_matches_minor_gcd_oracle(vals in proptest::collection::vec(-4i64..5, 9)) {
            let m: Vec<Vec<BigInt>> = (0..3)
                .map(|r| (0..3).map(|c| BigInt::from(vals[r * 3 + c])).collect())
                .collect();
            let snf = smith_normal_form(&m);
            prop_assert_eq!(&snf.diag, &minor_gcd_divisors(&m));
            // chain property
            for w in snf.diag.windows(2) {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
            let umv = mat_mul(&mat_mul(&snf.u, &m), &snf.v);
            prop_assert_eq!(umv, snf.diagonal_matrix());
            // sparse route agrees
            let mut entries: Vec<(usize, usize, i64)> = Vec::new();
            for r in 0..3 {
                for c in 0..3 {
                    entries.push((r, c, vals[r * 3 + c]));
                }
            }
            let sparse = SparseIntMat { rows: 3, cols: 3, entries };
            let (rank, div) = elementary_divisors(&sparse);
            prop_assert_eq!(rank, snf.diag.len());
            prop_assert_eq!(div, snf.diag);
        }
    }

    #[test]
    fn homology_of_spheres_and_cones() {
        // a cone: nerve of a poset with a minimum
        let p = Poset::from_pairs(
            (0..4).map(|i| i.to_string()).collect(),
            &[(0, 1), (0, 2), (0, 3), (1, 3)],
        )
        .unwrap();
        let report = reduced_homology(&nerve(&p)).unwrap();
        assert!(report.is_acyclic());

        // circle
        let circle = SimComplex::boundary(2);
        let report = reduced_homology(&circle).unwrap();
        assert_eq!(report.betti(1), 1);
        assert_eq!(report.betti(0), 0);

        // 2-sphere
        let sphere = SimComplex::boundary(3);
        let report = reduced_homology(&sphere).unwrap();
        assert_eq!(report.betti(2), 1);
        assert!(report.dims.iter().all(|d| d.torsion.is_empty()));

        assert!(reduced_homology(&SimComplex::empty()).is_err());
    }

    #[test]
    fn torsion_of_projective_plane() {
        // minimal 6-vertex triangulation
        let faces: Vec<Vec<usize>> = vec![
            vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 4], vec![0, 4, 5], vec![0, 1, 5],
            vec![1, 2, 4], vec![1, 3, 4], vec![1, 3, 5], vec![2, 3, 5], vec![2, 4, 5],
        ];
        let rp2 = SimComplex::from_simplices(6, faces);
        assert_eq!(rp2.f_vector(), vec![6, 15, 10]);
        let report = reduced_homology(&rp2).unwrap();
        assert_eq!(report.betti(0), 0);
        assert_eq!(report.betti(1), 0);
        assert_eq!(report.betti(2), 0);
        assert_eq!(report.dims[1].torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn euler_characteristic_consistency() {
        for k in [SimComplex::simplex(3), SimComplex::boundary(3), SimComplex::boundary(2)] {
            let report = reduced_homology(&k).unwrap();
            let chi: i64 = 1 + report
                .dims
                .iter()
                .map(|d| {
                    let sign = if d.dim % 2 == 0 { 1i64 } else { -1 };
                    sign * d.betti as i64
                })
                .sum::<i64>();
            assert_eq!(chi, k.euler_characteristic());
        }
    }

    #[test]
    fn collapse_simplex_and_obstructions() {
        let k = SimComplex::simplex(2);
        match collapse_search(&k) {
            CollapseOutcome::Collapsed(cert) => {
                assert!(replay_certificate(&k, &cert));
                assert_eq!(cert.steps.len(), 3);
            }
            CollapseOutcome::Stuck => panic!("a simplex collapses"),
        }
        // no free face on a closed circle
        assert_eq!(collapse_search(&SimComplex::boundary(2)), CollapseOutcome::Stuck);
    }

    #[test]
    fn verdicts() {
        match contractibility_verdict(&SimComplex::simplex(3)).unwrap() {
            Verdict::Collapsible(_) => {}
            other => panic!("expected collapsible, got {}", other.kind()),
        }
        match contractibility_verdict(&SimComplex::boundary(3)).unwrap() {
            Verdict::NonAcyclic(report) => assert_eq!(report.betti(2), 1),
            other => panic!("expected non-acyclic, got {}", other.kind()),
        }
    }

    #[test]
    fn report_json_shape() {
        let report = reduced_homology(&SimComplex::boundary(2)).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert!(json["dims"][1]["betti"].is_number());
        let back: HomologyReport = serde_json::from_value(json).unwrap();
        assert_eq!(back, report);
    }
}
