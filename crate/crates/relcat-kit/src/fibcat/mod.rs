//! A concrete fibration category: bounded chain complexes of
//! finite-dimensional rational vector spaces, with quasi-isomorphisms as weak
//! equivalences and degreewise surjections as fibrations. All arithmetic is
//! exact.

pub mod diagram;
pub mod generate;
pub mod checks;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, kernel_basis, rank, QMat};
use crate::rational::Q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FibcatError {
    #[error("pullback needs a degreewise surjection; fails in degree {0}")]
    NotSurjective(i32),
    #[error("diagram arrows missing or mismatched on cover ({0}, {1})")]
    BadArrow(usize, usize),
    #[error("diagram not functorial between elements {0} and {1}")]
    NotFunctorial(usize, usize),
    #[error("marked pair ({0}, {1}) does not map to a quasi-isomorphism")]
    MarkedPairNotWe(usize, usize),
    #[error("inverse structure does not strictly decrease along ({0}, {1})")]
    BadInverseStructure(usize, usize),
}

// ---------------------------------------------------------------------------
// chain complexes
// ---------------------------------------------------------------------------

/// A bounded chain complex of finite-dimensional rational vector spaces.
/// `dims[i]` is the dimension in degree `lo + i` and `diffs[i]` the boundary
/// map out of that degree; consecutive boundaries compose to zero exactly.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainComplexQ {
    lo: i32,
    dims: Vec<usize>,
    diffs: Vec<QMat>,
}

impl std::fmt::Debug for ChainComplexQ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ChainComplexQ(lo={}, dims={:?})", self.lo, self.dims)
    }
}

impl ChainComplexQ {
    pub fn new(lo: i32, dims: Vec<usize>, diffs: Vec<QMat>) -> ChainComplexQ {
        assert_eq!(dims.len(), diffs.len(), "one boundary per degree");
        for (i, d) in diffs.iter().enumerate() {
            let expected_rows = if i == 0 { 0 } else { dims[i - 1] };
            assert_eq!(d.cols(), dims[i], "boundary {i} has wrong column count");
            assert_eq!(d.rows(), expected_rows, "boundary {i} has wrong row count");
        }
        let c = ChainComplexQ { lo, dims, diffs };
        c.assert_squares_to_zero();
        c
    }

    fn assert_squares_to_zero(&self) {
        for i in 1..self.diffs.len() {
            assert!(
                self.diffs[i - 1].mul(&self.diffs[i]).is_zero(),
                "boundaries do not compose to zero at degree {}",
                self.lo + i as i32
            );
        }
    }

    pub fn zero() -> ChainComplexQ {
        ChainComplexQ { lo: 0, dims: Vec::new(), diffs: Vec::new() }
    }

    /// A complex concentrated in the given degrees with zero differential.
    pub fn with_zero_differential(lo: i32, dims: Vec<usize>) -> ChainComplexQ {
        let diffs = dims
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let rows = if i == 0 { 0 } else { dims[i - 1] };
                QMat::zeros(rows, d)
            })
            .collect();
        ChainComplexQ::new(lo, dims, diffs)
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn dim(&self, k: i32) -> usize {
        if k < self.lo {
            return 0;
        }
        self.dims.get((k - self.lo) as usize).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// The boundary map out of degree k, materialized with the right shape.
    pub fn d(&self, k: i32) -> QMat {
        let idx = k - self.lo;
        if idx >= 0 && (idx as usize) < self.diffs.len() {
            if idx == 0 {
                // stored with zero rows; shape against the true dim below
                return QMat::zeros(self.dim(k - 1), self.dim(k));
            }
            return self.diffs[idx as usize].clone();
        }
        QMat::zeros(self.dim(k - 1), self.dim(k))
    }

    pub fn is_zero_object(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Homology dimensions per degree, exact.
    pub fn homology_dims(&self) -> Vec<(i32, usize)> {
        let mut out = Vec::new();
        for k in self.lo..=self.hi() {
            let z = self.dim(k) - rank(&self.d(k));
            let b = rank(&self.d(k + 1));
            out.push((k, z - b));
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology_dims().iter().all(|&(_, h)| h == 0)
    }
}

// ---------------------------------------------------------------------------
// chain maps
// ---------------------------------------------------------------------------

/// A degreewise linear map commuting exactly with the boundaries.
#[derive(Clone, Serialize, Deserialize)]
pub struct ChainMap {
    pub source: Arc<ChainComplexQ>,
    pub target: Arc<ChainComplexQ>,
    lo: i32,
    mats: Vec<QMat>,
}

impl std::fmt::Debug for ChainMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ChainMap({:?} -> {:?})",
            self.source.dims, self.target.dims
        )
    }
}

impl ChainMap {
    /// Validates shapes and exact commutation with the boundaries.
    pub fn new(
        source: Arc<ChainComplexQ>,
        target: Arc<ChainComplexQ>,
        lo: i32,
        mats: Vec<QMat>,
    ) -> ChainMap {
        let f = ChainMap { source, target, lo, mats };
        f.assert_shapes();
        f.assert_commutes();
        f
    }

    /// Skips the commutation check; for maps correct by construction in hot
    /// paths. Shape errors still panic.
    pub fn new_unchecked(
        source: Arc<ChainComplexQ>,
        target: Arc<ChainComplexQ>,
        lo: i32,
        mats: Vec<QMat>,
    ) -> ChainMap {
        let f = ChainMap { source, target, lo, mats };
        f.assert_shapes();
        debug_assert!({
            f.assert_commutes();
            true
        });
        f
    }

    fn assert_shapes(&self) {
        for (i, m) in self.mats.iter().enumerate() {
            let k = self.lo + i as i32;
            assert_eq!(m.cols(), self.source.dim(k), "map at degree {k}: bad cols");
            assert_eq!(m.rows(), self.target.dim(k), "map at degree {k}: bad rows");
        }
    }

    fn assert_commutes(&self) {
        let lo = self.source.lo().min(self.target.lo());
        let hi = self.source.hi().max(self.target.hi()) + 1;
        for k in lo..=hi {
            let lhs = self.target.d(k).mul(&self.at(k));
            let rhs = self.at(k - 1).mul(&self.source.d(k));
            assert!(
                lhs == rhs,
                "chain map does not commute with boundaries at degree {k}"
            );
        }
    }

    pub fn at(&self, k: i32) -> QMat {
        let idx = k - self.lo;
        if idx >= 0 && (idx as usize) < self.mats.len() {
            self.mats[idx as usize].clone()
        } else {
            QMat::zeros(self.target.dim(k), self.source.dim(k))
        }
    }

    pub fn identity(c: &Arc<ChainComplexQ>) -> ChainMap {
        let lo = c.lo();
        let mats = (lo..=c.hi()).map(|k| QMat::identity(c.dim(k))).collect();
        ChainMap { source: c.clone(), target: c.clone(), lo, mats }
    }

    pub fn zero(source: &Arc<ChainComplexQ>, target: &Arc<ChainComplexQ>) -> ChainMap {
        ChainMap {
            source: source.clone(),
            target: target.clone(),
            lo: 0,
            mats: Vec::new(),
        }
    }

    pub fn compose(g: &ChainMap, f: &ChainMap) -> ChainMap {
        assert!(
            g.source.as_ref() == f.target.as_ref(),
            "composition endpoint mismatch"
        );
        let lo = f.source.lo();
        let mats = (lo..=f.source.hi()).map(|k| g.at(k).mul(&f.at(k))).collect();
        ChainMap {
            source: f.source.clone(),
            target: g.target.clone(),
            lo,
            mats,
        }
    }

    pub fn is_surjective(&self) -> bool {
        let lo = self.target.lo();
        (lo..=self.target.hi()).all(|k| {
            let m = self.at(k);
            linalg::rank(&m) == self.target.dim(k)
        })
    }
}

// ---------------------------------------------------------------------------
// weak equivalences
// ---------------------------------------------------------------------------

/// True iff the induced maps on all homology groups are isomorphisms,
/// checked exactly through acyclicity of the mapping cone.
pub fn is_quasi_iso(f: &ChainMap) -> bool {
    // cone degrees: C_k = S_{k-1} (+) T_k, d(s, t) = (-d s, f s + d t)
    let lo = f.source.lo().min(f.target.lo());
    let hi = (f.source.hi() + 1).max(f.target.hi());
    let dim = |k: i32| f.source.dim(k - 1) + f.target.dim(k);
    let mut prev_rank = 0usize;
    // acyclic iff rank d_k + rank d_{k+1} = dim C_k for all k; walk downward
    let cone_d = |k: i32| {
        let (sr, tr) = (f.source.dim(k - 2), f.target.dim(k - 1));
        let (sc, tc) = (f.source.dim(k - 1), f.target.dim(k));
        let mut m = QMat::zeros(sr + tr, sc + tc);
        m.set_block(0, 0, &f.source.d(k - 1).neg());
        m.set_block(sr, 0, &f.at(k - 1));
        m.set_block(sr, sc, &f.target.d(k));
        m
    };
    for k in (lo..=hi).rev() {
        let r = rank(&cone_d(k));
        if r + prev_rank != dim(k) {
            return false;
        }
        prev_rank = r;
    }
    prev_rank == 0
}

/// Caches the source homology data so many maps out of one (possibly large)
/// complex can be tested cheaply.
pub struct QuasiIsoProbe {
    source: Arc<ChainComplexQ>,
    /// per degree: cycle basis and the cycle columns spanning homology mod boundaries
    data: Vec<(i32, QMat, Vec<usize>, QMat)>,
}

impl QuasiIsoProbe {
    pub fn new(source: &Arc<ChainComplexQ>) -> QuasiIsoProbe {
        let mut data = Vec::new();
        for k in source.lo()..=source.hi() {
            let (cycles, h_cols, boundaries) = homology_basis(source, k);
            data.push((k, cycles, h_cols, boundaries));
        }
        QuasiIsoProbe { source: source.clone(), data }
    }

    pub fn source(&self) -> &Arc<ChainComplexQ> {
        &self.source
    }

    pub fn homology_dim(&self, k: i32) -> usize {
        self.data
            .iter()
            .find(|(kk, ..)| *kk == k)
            .map_or(0, |(_, _, h, _)| h.len())
    }

    /// Exact check that `f` (out of the cached source) is a quasi-isomorphism.
    pub fn check(&self, f: &ChainMap) -> bool {
        assert!(f.source.as_ref() == self.source.as_ref(), "probe source mismatch");
        let lo = self.source.lo().min(f.target.lo());
        let hi = self.source.hi().max(f.target.hi());
        for k in lo..=hi {
            let (src_h, src_cycles) = match self.data.iter().find(|(kk, ..)| *kk == k) {
                Some((_, cycles, h_cols, _)) => {
                    let cols: Vec<Vec<Q>> = h_cols.iter().map(|&c| cycles.col(c)).collect();
                    (cols.len(), cols)
                }
                None => (0, Vec::new()),
            };
            let (t_cycles, t_h_cols, t_bound) = homology_basis(&f.target, k);
            if src_h != t_h_cols.len() {
                return false;
            }
            if src_h == 0 {
                continue;
            }
            // express images of source homology classes in the target basis
            // [boundaries | homology representatives]
            let reps = QMat::from_fn(f.target.dim(k), t_h_cols.len(), |r, c| {
                t_cycles.at(r, t_h_cols[c]).clone()
            });
            let basis = QMat::hstack(&[&t_bound, &reps]);
            let fk = f.at(k);
            let images = QMat::from_fn(f.target.dim(k), src_h, |r, c| {
                let src = &src_cycles[c];
                let mut acc = Q::zero();
                for (j, v) in src.iter().enumerate() {
                    if !v.is_zero() {
                        acc += &(fk.at(r, j) * v);
                    }
                }
                acc
            });
            let Some(coords) = linalg::solve(&basis, &images) else {
                return false; // image not even a cycle-compatible combination
            };
            // induced matrix: homology coordinates only
            let induced = QMat::from_fn(t_h_cols.len(), src_h, |r, c| {
                coords.at(t_bound.cols() + r, c).clone()
            });
            if linalg::rank(&induced) != src_h {
                return false;
            }
        }
        true
    }
}

/// Cycle basis, the cycle columns complementing the boundaries, and a
/// boundary basis in degree k.
fn homology_basis(c: &ChainComplexQ, k: i32) -> (QMat, Vec<usize>, QMat) {
    let cycles = kernel_basis(&c.d(k)).basis;
    let d_in = c.d(k + 1);
    let ech = linalg::rref(&d_in);
    let b_cols: Vec<usize> = ech.pivot_cols.clone();
    let boundaries = QMat::from_fn(c.dim(k), b_cols.len(), |r, i| d_in.at(r, b_cols[i]).clone());
    // choose cycle columns extending the boundary basis
    let stacked = QMat::hstack(&[&boundaries, &cycles]);
    let ech2 = linalg::rref(&stacked);
    let h_cols: Vec<usize> = ech2
        .pivot_cols
        .iter()
        .filter(|&&c| c >= boundaries.cols())
        .map(|&c| c - boundaries.cols())
        .collect();
    (cycles, h_cols, boundaries)
}

// ---------------------------------------------------------------------------
// factorization and pullbacks
// ---------------------------------------------------------------------------

/// Mapping-path-space factorization of f: A -> C into a quasi-isomorphism
/// followed by a degreewise surjection. The middle object is A x_C C^I with
/// the path object C_k (+) C_k (+) C_{k+1}, one endpoint fused with f.
pub struct Factorization {
    pub mid: Arc<ChainComplexQ>,
    pub s: ChainMap,
    pub p: ChainMap,
}

pub fn factorize(f: &ChainMap) -> Factorization {
    let a = &f.source;
    let c = &f.target;
    let lo = a.lo().min(c.lo() - 1);
    let hi = a.hi().max(c.hi());
    let mut dims = Vec::new();
    for k in lo..=hi {
        dims.push(a.dim(k) + c.dim(k) + c.dim(k + 1));
    }
    // coordinates per degree k: (x in A_k, c1 in C_k, z in C_{k+1})
    // d(x, c1, z) = (dx, d c1, f x - c1 - dz)
    let mut diffs = Vec::new();
    for (i, _) in dims.iter().enumerate() {
        let k = lo + i as i32;
        let (ra, rc, rz) = (a.dim(k - 1), c.dim(k - 1), c.dim(k));
        let (ca, cc, cz) = (a.dim(k), c.dim(k), c.dim(k + 1));
        let mut m = QMat::zeros(ra + rc + rz, ca + cc + cz);
        if i > 0 {
            m.set_block(0, 0, &a.d(k));
            m.set_block(ra, ca, &c.d(k));
        }
        m.set_block(ra + rc, 0, &f.at(k));
        for j in 0..cc.min(rz) {
            m.set(ra + rc + j, ca + j, -&Q::one());
        }
        m.set_block(ra + rc, ca + cc, &c.d(k + 1).neg());
        diffs.push(m);
    }
    let mid = Arc::new(ChainComplexQ::new(lo, dims, diffs));

    // s: x |-> (x, f x, 0)
    let s_mats: Vec<QMat> = (a.lo()..=a.hi())
        .map(|k| {
            let mut m = QMat::zeros(mid.dim(k), a.dim(k));
            m.set_block(0, 0, &QMat::identity(a.dim(k)));
            m.set_block(a.dim(k), 0, &f.at(k));
            m
        })
        .collect();
    let s = ChainMap::new_unchecked(a.clone(), mid.clone(), a.lo(), s_mats);

    // p: (x, c1, z) |-> c1
    let p_mats: Vec<QMat> = (lo..=hi)
        .map(|k| {
            let mut m = QMat::zeros(c.dim(k), mid.dim(k));
            for j in 0..c.dim(k) {
                m.set(j, a.dim(k) + j, Q::one());
            }
            m
        })
        .collect();
    let p = ChainMap::new_unchecked(mid.clone(), c.clone(), lo, p_mats);
    Factorization { mid, s, p }
}

/// Degreewise fiber product along a degreewise surjection.
pub struct Pullback {
    pub complex: Arc<ChainComplexQ>,
    pub to_a: ChainMap,
    pub to_b: ChainMap,
}

pub fn pullback(f: &ChainMap, p: &ChainMap) -> Result<Pullback, FibcatError> {
    assert!(f.target.as_ref() == p.target.as_ref(), "cospan endpoint mismatch");
    let (a, b, c) = (&f.source, &p.source, &f.target);
    for k in c.lo()..=c.hi() {
        if linalg::rank(&p.at(k)) != c.dim(k) {
            return Err(FibcatError::NotSurjective(k));
        }
    }
    let lo = a.lo().min(b.lo());
    let hi = a.hi().max(b.hi());
    // kernel of [f, -p] per degree
    let mut kernels = Vec::new();
    let mut dims = Vec::new();
    for k in lo..=hi {
        let mut m = QMat::zeros(c.dim(k), a.dim(k) + b.dim(k));
        m.set_block(0, 0, &f.at(k));
        m.set_block(0, a.dim(k), &p.at(k).neg());
        let kb = kernel_basis(&m);
        dims.push(kb.dim());
        kernels.push(kb);
    }
    let mut diffs = Vec::new();
    for (i, _) in dims.iter().enumerate() {
        let k = lo + i as i32;
        if i == 0 {
            diffs.push(QMat::zeros(0, dims[0]));
            continue;
        }
        let kb = &kernels[i];
        let prev = &kernels[i - 1];
        let mut cols = Vec::with_capacity(kb.dim());
        for j in 0..kb.dim() {
            let v = kb.basis.col(j);
            let (va, vb) = v.split_at(a.dim(k));
            let da = a.d(k).mul_vec(va);
            let db = b.d(k).mul_vec(vb);
            let w: Vec<Q> = da.into_iter().chain(db).collect();
            cols.push(prev.express(&w));
        }
        diffs.push(QMat::from_fn(dims[i - 1], dims[i], |r, c2| cols[c2][r].clone()));
    }
    let complex = Arc::new(ChainComplexQ::new(lo, dims, diffs));
    let to_a_mats: Vec<QMat> = (lo..=hi)
        .map(|k| {
            let kb = &kernels[(k - lo) as usize];
            QMat::from_fn(a.dim(k), kb.dim(), |r, c2| kb.basis.at(r, c2).clone())
        })
        .collect();
    let to_b_mats: Vec<QMat> = (lo..=hi)
        .map(|k| {
            let kb = &kernels[(k - lo) as usize];
            QMat::from_fn(b.dim(k), kb.dim(), |r, c2| kb.basis.at(a.dim(k) + r, c2).clone())
        })
        .collect();
    let to_a = ChainMap::new_unchecked(complex.clone(), a.clone(), lo, to_a_mats);
    let to_b = ChainMap::new_unchecked(complex.clone(), b.clone(), lo, to_b_mats);
    Ok(Pullback { complex, to_a, to_b })
}

/// The homotopy pullback A x_C C^I x_C B of a cospan, with its projections.
pub struct HomotopyPullback {
    pub complex: Arc<ChainComplexQ>,
    pub to_a: ChainMap,
    pub to_b: ChainMap,
}

pub fn homotopy_pullback(a_map: &ChainMap, b_map: &ChainMap) -> HomotopyPullback {
    assert!(
        a_map.target.as_ref() == b_map.target.as_ref(),
        "cospan endpoint mismatch"
    );
    let (a, b, c) = (&a_map.source, &b_map.source, &a_map.target);
    let lo = a.lo().min(b.lo()).min(c.lo() - 1);
    let hi = a.hi().max(b.hi()).max(c.hi());
    // coordinates per degree k: (x in A_k, z in C_{k+1}, y in B_k)
    // d(x, z, y) = (dx, a x - b y - dz, dy)
    let mut dims = Vec::new();
    for k in lo..=hi {
        dims.push(a.dim(k) + c.dim(k + 1) + b.dim(k));
    }
    let mut diffs = Vec::new();
    for (i, _) in dims.iter().enumerate() {
        let k = lo + i as i32;
        let (ra, rz, rb) = (a.dim(k - 1), c.dim(k), b.dim(k - 1));
        let (ca, cz, cb) = (a.dim(k), c.dim(k + 1), b.dim(k));
        let mut m = QMat::zeros(ra + rz + rb, ca + cz + cb);
        if i > 0 {
            m.set_block(0, 0, &a.d(k));
            m.set_block(ra + rz, ca + cz, &b.d(k));
        }
        m.set_block(ra, 0, &a_map.at(k));
        m.set_block(ra, ca, &c.d(k + 1).neg());
        m.set_block(ra, ca + cz, &b_map.at(k).neg());
        diffs.push(m);
    }
    let complex = Arc::new(ChainComplexQ::new(lo, dims, diffs));
    let to_a_mats: Vec<QMat> = (lo..=hi)
        .map(|k| {
            let mut m = QMat::zeros(a.dim(k), complex.dim(k));
            m.set_block(0, 0, &QMat::identity(a.dim(k)));
            m
        })
        .collect();
    let to_b_mats: Vec<QMat> = (lo..=hi)
        .map(|k| {
            let mut m = QMat::zeros(b.dim(k), complex.dim(k));
            for j in 0..b.dim(k) {
                m.set(j, a.dim(k) + c.dim(k + 1) + j, Q::one());
            }
            m
        })
        .collect();
    let to_a = ChainMap::new_unchecked(complex.clone(), a.clone(), lo, to_a_mats);
    let to_b = ChainMap::new_unchecked(complex.clone(), b.clone(), lo, to_b_mats);
    HomotopyPullback { complex, to_a, to_b }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibcat::generate::{random_chain_map, random_complex, GenProfile};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_torus_like() -> Arc<ChainComplexQ> {
        // 0 -> Q -> Q^2 -> Q -> 0 with zero maps: homology (1, 2, 1)
        Arc::new(ChainComplexQ::with_zero_differential(0, vec![1, 2, 1]))
    }

    #[test]
    fn identity_and_zero_quasi_iso() {
        let c = two_torus_like();
        assert!(is_quasi_iso(&ChainMap::identity(&c)));
        let z = Arc::new(ChainComplexQ::zero());
        assert!(is_quasi_iso(&ChainMap::identity(&z)));
        // zero map between complexes with nonzero homology is not
        let f = ChainMap::zero(&c, &c);
        assert!(!is_quasi_iso(&f));
        // projection off an exact summand is one
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let profile = GenProfile::small();
        let a = random_complex(&mut rng, &profile);
        let sum = direct_sum_with_acyclic(&a, 2);
        assert!(is_quasi_iso(&sum.1));
    }

    /// (A (+) acyclic, projection to A)
    fn direct_sum_with_acyclic(a: &Arc<ChainComplexQ>, pad: usize) -> (Arc<ChainComplexQ>, ChainMap) {
        // acyclic: cone on Q^pad concentrated in degree 0
        let lo = a.lo().min(0);
        let hi = a.hi().max(1);
        let acy_dim = |k: i32| if k == 0 || k == 1 { pad } else { 0 };
        let dims: Vec<usize> = (lo..=hi).map(|k| a.dim(k) + acy_dim(k)).collect();
        let mut diffs = Vec::new();
        for (i, _) in dims.iter().enumerate() {
            let k = lo + i as i32;
            let mut m = QMat::zeros(a.dim(k - 1) + acy_dim(k - 1), a.dim(k) + acy_dim(k));
            if i > 0 {
                m.set_block(0, 0, &a.d(k));
                if k == 1 {
                    m.set_block(a.dim(0), a.dim(1), &QMat::identity(pad));
                }
            }
            diffs.push(m);
        }
        let sum = Arc::new(ChainComplexQ::new(lo, dims, diffs));
        let mats: Vec<QMat> = (lo..=hi)
            .map(|k| {
                let mut m = QMat::zeros(a.dim(k), sum.dim(k));
                m.set_block(0, 0, &QMat::identity(a.dim(k)));
                m
            })
            .collect();
        let proj = ChainMap::new(sum.clone(), a.clone(), lo, mats);
        (sum, proj)
    }

    #[test]
    fn factorization_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let profile = GenProfile::small();
        for _ in 0..8 {
            let a = random_complex(&mut rng, &profile);
            let c = random_complex(&mut rng, &profile);
            let f = random_chain_map(&mut rng, &a, &c);
            let fac = factorize(&f);
            // p s = f
            let ps = ChainMap::compose(&fac.p, &fac.s);
            for k in a.lo()..=a.hi() {
                assert_eq!(ps.at(k), f.at(k));
            }
            assert!(is_quasi_iso(&fac.s), "section must be a quasi-isomorphism");
            assert!(fac.p.is_surjective(), "projection must be a fibration");
        }
    }

    #[test]
    fn factorize_identity_dimensions() {
        let c = two_torus_like();
        let fac = factorize(&ChainMap::identity(&c));
        for k in c.lo() - 1..=c.hi() {
            assert_eq!(fac.mid.dim(k), 2 * c.dim(k) + c.dim(k + 1));
        }
        // f = 0 still yields a surjection
        let z = ChainMap::zero(&c, &c);
        assert!(factorize(&z).p.is_surjective());
    }

    #[test]
    fn pullback_contract() {
        let c = two_torus_like();
        // pullback of identity along f recovers the source
        let f = ChainMap::identity(&c);
        let pb = pullback(&f, &ChainMap::identity(&c)).unwrap();
        for k in c.lo()..=c.hi() {
            assert_eq!(pb.complex.dim(k), c.dim(k));
        }
        // over the zero complex the pullback is the direct sum
        let z = Arc::new(ChainComplexQ::zero());
        let a = two_torus_like();
        let fz = ChainMap::zero(&a, &z);
        let pz = ChainMap::zero(&a, &z);
        let pb = pullback(&fz, &pz).unwrap();
        for k in a.lo()..=a.hi() {
            assert_eq!(pb.complex.dim(k), 2 * a.dim(k));
        }
        // non-surjective p rejected
        let bad = ChainMap::zero(&a, &c);
        assert!(matches!(pullback(&f, &bad), Err(FibcatError::NotSurjective(_))));
    }

    #[test]
    fn acyclic_fibration_base_change() {
        // p: A (+) acyclic -> A is a surjective quasi-iso; its pullback along
        // any map stays one
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let profile = GenProfile::small();
        for _ in 0..5 {
            let a = random_complex(&mut rng, &profile);
            let (_, p) = direct_sum_with_acyclic(&a, 2);
            let x = random_complex(&mut rng, &profile);
            let f = random_chain_map(&mut rng, &x, &a);
            let pb = pullback(&f, &p).unwrap();
            assert!(pb.to_a.is_surjective());
            assert!(is_quasi_iso(&pb.to_a));
        }
    }

    #[test]
    fn homotopy_pullback_over_zero_is_sum() {
        let a = two_torus_like();
        let b = two_torus_like();
        let z = Arc::new(ChainComplexQ::zero());
        let hp = homotopy_pullback(&ChainMap::zero(&a, &z), &ChainMap::zero(&b, &z));
        let h: usize = hp.complex.homology_dims().iter().map(|&(_, d)| d).sum();
        let ha: usize = a.homology_dims().iter().map(|&(_, d)| d).sum();
        let hb: usize = b.homology_dims().iter().map(|&(_, d)| d).sum();
        assert_eq!(h, ha + hb);
    }

    #[test]
    fn homotopy_pullback_along_iso_recovers_other_leg() {
        let a = two_torus_like();
        let c = two_torus_like();
        let f = ChainMap::identity(&c);
        let g = ChainMap::zero(&a, &c);
        let hp = homotopy_pullback(&g, &f);
        assert!(is_quasi_iso(&hp.to_a));
    }

    #[test]
    fn probe_agrees_with_cone_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let profile = GenProfile::small();
        for _ in 0..10 {
            let a = random_complex(&mut rng, &profile);
            let b = random_complex(&mut rng, &profile);
            let f = random_chain_map(&mut rng, &a, &b);
            let probe = QuasiIsoProbe::new(&a);
            assert_eq!(probe.check(&f), is_quasi_iso(&f));
        }
        let c = two_torus_like();
        let probe = QuasiIsoProbe::new(&c);
        assert!(probe.check(&ChainMap::identity(&c)));
    }

    #[test]
    fn two_out_of_six_on_quasi_iso_triples() {
        // composable triples whose double composites are quasi-isomorphisms
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        for seed in 0..6 {
            let _ = seed;
            let x = random_complex(&mut rng, &GenProfile::small());
            let (y, py) = direct_sum_with_acyclic(&x, 1);
            let (z, pz) = direct_sum_with_acyclic(&x, 2);
            // f: y -> x, g: x -> z section? use sections and projections
            let f = py.clone();
            let g = section_into_sum(&x, &z);
            let h = pz.clone();
            let gf = ChainMap::compose(&g, &f);
            let hg = ChainMap::compose(&h, &g);
            if is_quasi_iso(&gf) && is_quasi_iso(&hg) {
                assert!(is_quasi_iso(&f));
                assert!(is_quasi_iso(&g));
                assert!(is_quasi_iso(&h));
                assert!(is_quasi_iso(&ChainMap::compose(&h, &gf)));
            } else {
                panic!("triple construction should satisfy the hypothesis");
            }
        }
    }

    fn section_into_sum(a: &Arc<ChainComplexQ>, sum: &Arc<ChainComplexQ>) -> ChainMap {
        let lo = sum.lo();
        let mats: Vec<QMat> = (lo..=sum.hi())
            .map(|k| {
                let mut m = QMat::zeros(sum.dim(k), a.dim(k));
                m.set_block(0, 0, &QMat::identity(a.dim(k)));
                m
            })
            .collect();
        ChainMap::new(a.clone(), sum.clone(), lo, mats)
    }

    #[test]
    fn complex_json_roundtrip() {
        let c = two_torus_like();
        let json = serde_json::to_string(c.as_ref()).unwrap();
        let back: ChainComplexQ = serde_json::from_str(&json).unwrap();
        assert_eq!(&back, c.as_ref());
    }
}
