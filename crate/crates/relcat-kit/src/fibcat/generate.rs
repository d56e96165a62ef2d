//! Seeded random generators for complexes, chain maps and relative diagrams.
//!
//! Relative diagrams over a horn region are built from interval summands on
//! the base linear poset: an interval contributes one homology generator to
//! every object it contains and the identity between neighbouring copies.
//! Intervals are chosen so that no marked pair of the base structure is
//! separated, which makes every marked composite an isomorphism on homology
//! regardless of which pairs the closure contains. Acyclic cone summands and
//! random basis changes hide this block structure.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rand::{Rng, SeedableRng};

use crate::linalg::QMat;
use crate::rational::Q;
use crate::relposet::RelPoset;
use crate::subdivision::SubsetChainPoset;

use super::diagram::Diagram;
use super::{ChainComplexQ, ChainMap};

/// Size bounds for generated objects.
#[derive(Debug, Clone)]
pub struct GenProfile {
    pub lo: i32,
    pub hi: i32,
    /// max homology generators added per degree
    pub max_h: usize,
    /// max rank of the acyclic padding per degree
    pub max_pad: usize,
    /// hard cap on the dimension of any object in any degree
    pub max_dim: usize,
}

impl GenProfile {
    pub fn small() -> GenProfile {
        GenProfile { lo: 0, hi: 2, max_h: 2, max_pad: 2, max_dim: 6 }
    }

    /// Scales object sizes down as the index poset grows; the Reedy
    /// replacement inflates dimensions level by level.
    pub fn for_index_size(elements: usize, max_dim: usize) -> GenProfile {
        if elements <= 16 {
            GenProfile { lo: 0, hi: 3, max_h: 2, max_pad: 2, max_dim }
        } else if elements <= 32 {
            GenProfile { lo: 0, hi: 2, max_h: 1, max_pad: 1, max_dim }
        } else {
            GenProfile { lo: 0, hi: 1, max_h: 1, max_pad: 1, max_dim }
        }
    }
}

fn small_entry(rng: &mut ChaCha8Rng) -> Q {
    Q::from_int(rng.gen_range(-2i64..=2))
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> QMat {
    QMat::from_fn(rows, cols, |_, _| small_entry(rng))
}

/// Random invertible matrix: a product of shear and sign operations.
fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> QMat {
    let mut m = QMat::identity(n);
    if n == 0 {
        return m;
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let c = Q::from_int(rng.gen_range(-2i64..=2));
        // row_i += c * row_j
        for col in 0..n {
            let v = m.at(i, col) + &(&c * m.at(j, col));
            m.set(i, col, v);
        }
    }
    m
}

/// Canonical-form complex: homology generators plus an acyclic cone.
/// Coordinates per degree: (h, x, y) with d(h, x, y) = (0, y, 0).
struct CanonicalShape {
    lo: i32,
    h: Vec<usize>,
    pad: Vec<usize>,
}

impl CanonicalShape {
    fn len(&self) -> usize {
        self.h.len()
    }

    fn h_at(&self, k: i32) -> usize {
        let i = k - self.lo;
        if i < 0 {
            0
        } else {
            self.h.get(i as usize).copied().unwrap_or(0)
        }
    }

    fn pad_at(&self, k: i32) -> usize {
        let i = k - self.lo;
        if i < 0 {
            0
        } else {
            self.pad.get(i as usize).copied().unwrap_or(0)
        }
    }

    fn dim_at(&self, k: i32) -> usize {
        self.h_at(k) + self.pad_at(k) + self.pad_at(k - 1)
    }

    fn complex(&self) -> ChainComplexQ {
        // one degree above the top: the shifted copy of the last padding rank
        let n = self.len() + 1;
        let dims: Vec<usize> = (0..n).map(|i| self.dim_at(self.lo + i as i32)).collect();
        let mut diffs = Vec::new();
        for i in 0..n {
            let k = self.lo + i as i32;
            let rows = if i == 0 { 0 } else { dims[i - 1] };
            let mut m = QMat::zeros(rows, dims[i]);
            if i > 0 {
                // y-slot of degree k maps identically onto the x-slot of k-1
                let y_off = self.h_at(k) + self.pad_at(k);
                let x_off_below = self.h_at(k - 1);
                for j in 0..self.pad_at(k - 1) {
                    m.set(x_off_below + j, y_off + j, Q::one());
                }
            }
            diffs.push(m);
        }
        ChainComplexQ::new(self.lo, dims, diffs)
    }
}

/// A random bounded complex with controlled homology, in a random basis.
pub fn random_complex(rng: &mut ChaCha8Rng, profile: &GenProfile) -> Arc<ChainComplexQ> {
    let len = (profile.hi - profile.lo + 1) as usize;
    let shape = CanonicalShape {
        lo: profile.lo,
        h: (0..len).map(|_| rng.gen_range(0..=profile.max_h)).collect(),
        pad: (0..len).map(|_| rng.gen_range(0..=profile.max_pad)).collect(),
    };
    let canonical = shape.complex();
    Arc::new(conjugate(rng, &canonical))
}

/// Rewrites the complex in a random basis per degree.
fn conjugate(rng: &mut ChaCha8Rng, c: &ChainComplexQ) -> ChainComplexQ {
    let lo = c.lo();
    let hi = c.hi();
    let basis: Vec<QMat> = (lo..=hi).map(|k| random_invertible(rng, c.dim(k))).collect();
    let inv: Vec<QMat> = basis
        .iter()
        .map(|u| crate::linalg::invert(u).expect("shears are invertible"))
        .collect();
    let dims: Vec<usize> = (lo..=hi).map(|k| c.dim(k)).collect();
    let mut diffs = Vec::new();
    for (i, _) in dims.iter().enumerate() {
        let k = lo + i as i32;
        if i == 0 {
            diffs.push(QMat::zeros(0, dims[0]));
        } else {
            diffs.push(basis[i - 1].mul(&c.d(k)).mul(&inv[i]));
        }
    }
    ChainComplexQ::new(lo, dims, diffs)
}

/// A random isomorphism: the same complex rewritten in a random basis,
/// together with the comparison map.
pub fn random_iso(
    rng: &mut ChaCha8Rng,
    a: &Arc<ChainComplexQ>,
) -> (Arc<ChainComplexQ>, ChainMap) {
    let lo = a.lo();
    let hi = a.hi();
    let basis: Vec<QMat> = (lo..=hi).map(|k| random_invertible(rng, a.dim(k))).collect();
    let inv: Vec<QMat> = basis
        .iter()
        .map(|u| crate::linalg::invert(u).expect("shears are invertible"))
        .collect();
    let dims: Vec<usize> = (lo..=hi).map(|k| a.dim(k)).collect();
    let mut diffs = Vec::new();
    for (i, _) in dims.iter().enumerate() {
        let k = lo + i as i32;
        if i == 0 {
            diffs.push(QMat::zeros(0, dims[0]));
        } else {
            diffs.push(basis[i - 1].mul(&a.d(k)).mul(&inv[i]));
        }
    }
    let target = Arc::new(ChainComplexQ::new(lo, dims, diffs));
    let map = ChainMap::new_unchecked(a.clone(), target.clone(), lo, basis);
    (target, map)
}

/// A random (null-homotopic) chain map d S + S d between any two complexes.
pub fn random_chain_map(
    rng: &mut ChaCha8Rng,
    a: &Arc<ChainComplexQ>,
    b: &Arc<ChainComplexQ>,
) -> ChainMap {
    let lo = a.lo().min(b.lo());
    let hi = a.hi().max(b.hi());
    let s: Vec<QMat> = (lo..=hi).map(|k| random_matrix(rng, b.dim(k + 1), a.dim(k))).collect();
    let mats: Vec<QMat> = (lo..=hi)
        .map(|k| {
            let i = (k - lo) as usize;
            let ds = b.d(k + 1).mul(&s[i]);
            let sd = if i == 0 {
                QMat::zeros(b.dim(k), a.dim(k))
            } else {
                s[i - 1].mul(&a.d(k))
            };
            ds.add(&sd)
        })
        .collect();
    ChainMap::new_unchecked(a.clone(), b.clone(), lo, mats)
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// relative diagrams over a horn region
// ---------------------------------------------------------------------------

/// Intervals [a, b] of the base poset that do not separate any marked pair.
fn safe_intervals(n: usize, structure: &RelPoset) -> Vec<(usize, usize)> {
    let marked = structure.marked_pairs();
    (0..=n)
        .flat_map(|a| (a..=n).map(move |b| (a, b)))
        .filter(|&(a, b)| {
            marked.iter().all(|&(i, j)| {
                let contains_i = a <= i && i <= b;
                let contains_j = a <= j && j <= b;
                contains_i == contains_j
            })
        })
        .collect()
}

struct BaseDiagram {
    objects: Vec<Arc<ChainComplexQ>>,
    /// composite arrows arrow[i][j - i]: G(i) -> G(j), including identities
    arrows: Vec<Vec<ChainMap>>,
}

/// A functor from the marked linear poset to complexes sending every marked
/// pair to a quasi-isomorphism.
fn base_diagram(rng: &mut ChaCha8Rng, n: usize, structure: &RelPoset, profile: &GenProfile) -> BaseDiagram {
    let intervals = safe_intervals(n, structure);
    let len = (profile.hi - profile.lo + 1) as usize;
    // per degree, a multiset of chosen intervals
    let mut chosen: Vec<Vec<(usize, usize)>> = Vec::with_capacity(len);
    for _ in 0..len {
        let count = rng.gen_range(0..=profile.max_h);
        let mut picks = Vec::new();
        for _ in 0..count {
            picks.push(intervals[rng.gen_range(0..intervals.len())]);
        }
        chosen.push(picks);
    }
    // padding ranks per object per degree, capped so dims stay within bounds
    let mut pad: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
    let mut h_dims: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
    for obj in 0..=n {
        let h: Vec<usize> = (0..len)
            .map(|i| chosen[i].iter().filter(|&&(a, b)| a <= obj && obj <= b).count())
            .collect();
        let p: Vec<usize> = (0..len)
            .map(|i| {
                let room = profile.max_dim.saturating_sub(h[i]) / 2;
                rng.gen_range(0..=profile.max_pad.min(room))
            })
            .collect();
        h_dims.push(h);
        pad.push(p);
    }
    let shapes: Vec<CanonicalShape> = (0..=n)
        .map(|obj| CanonicalShape { lo: profile.lo, h: h_dims[obj].clone(), pad: pad[obj].clone() })
        .collect();

    // basis change per object per degree
    let lo = profile.lo;
    let hi = profile.hi;
    let basis: Vec<Vec<QMat>> = shapes
        .iter()
        .map(|sh| (lo..=hi + 1).map(|k| random_invertible(rng, sh.dim_at(k))).collect())
        .collect();
    let basis_inv: Vec<Vec<QMat>> = basis
        .iter()
        .map(|bs| bs.iter().map(|u| crate::linalg::invert(u).expect("invertible")).collect())
        .collect();

    let objects: Vec<Arc<ChainComplexQ>> = shapes
        .iter()
        .zip(&basis)
        .zip(&basis_inv)
        .map(|((sh, bs), binv)| {
            let canonical = sh.complex();
            let dims: Vec<usize> = (lo..=hi + 1).map(|k| sh.dim_at(k)).collect();
            let mut diffs = Vec::new();
            for (i, _) in dims.iter().enumerate() {
                let k = lo + i as i32;
                if i == 0 {
                    diffs.push(QMat::zeros(0, dims[0]));
                } else {
                    diffs.push(bs[i - 1].mul(&canonical.d(k)).mul(&binv[i]));
                }
            }
            Arc::new(ChainComplexQ::new(lo, dims, diffs))
        })
        .collect();

    // canonical cover maps G(i) -> G(i+1)
    let mut cover_canonical: Vec<Vec<QMat>> = Vec::new();
    for i in 0..n {
        let (src, tgt) = (&shapes[i], &shapes[i + 1]);
        // per degree k: blocks (h, x, y) -> (h', x', y')
        // h' = B h (interval matching), x' = C h + P x + Q y, y' = P_{k-1} y
        let p_mats: Vec<QMat> = (lo..=hi + 1)
            .map(|k| random_matrix(rng, tgt.pad_at(k), src.pad_at(k)))
            .collect();
        let mut mats = Vec::new();
        for k in lo..=hi + 1 {
            let ki = (k - lo) as usize;
            let rows = tgt.dim_at(k);
            let cols = src.dim_at(k);
            let mut m = QMat::zeros(rows, cols);
            // interval matching: copies at the same position in the chosen list
            let deg_idx = (k - profile.lo) as usize;
            if deg_idx < chosen.len() {
                let alive: Vec<usize> = chosen[deg_idx]
                    .iter()
                    .enumerate()
                    .filter(|(_, &(a, b))| a <= i && i <= b)
                    .map(|(idx, _)| idx)
                    .collect();
                let alive_next: Vec<usize> = chosen[deg_idx]
                    .iter()
                    .enumerate()
                    .filter(|(_, &(a, b))| a <= i + 1 && i + 1 <= b)
                    .map(|(idx, _)| idx)
                    .collect();
                for (row, &iv) in alive_next.iter().enumerate() {
                    if let Some(col) = alive.iter().position(|&x| x == iv) {
                        m.set(row, col, Q::one());
                    }
                }
            }
            // C: homology part into the cycle slot (x) of the padding
            let c_blk = random_matrix(rng, tgt.pad_at(k), src.h_at(k));
            m.set_block(tgt.h_at(k), 0, &c_blk);
            // P on x, P_{k-1} on y
            m.set_block(tgt.h_at(k), src.h_at(k), &p_mats[ki]);
            if ki > 0 {
                m.set_block(
                    tgt.h_at(k) + tgt.pad_at(k),
                    src.h_at(k) + src.pad_at(k),
                    &p_mats[ki - 1],
                );
            }
            mats.push(m);
        }
        cover_canonical.push(mats);
    }

    // composite arrows in the actual bases
    let mut arrows: Vec<Vec<ChainMap>> = Vec::new();
    for i in 0..=n {
        let mut row = vec![ChainMap::identity(&objects[i])];
        let mut acc: Option<Vec<QMat>> = None;
        for j in i..n {
            let step = &cover_canonical[j];
            acc = Some(match acc {
                None => step.clone(),
                Some(prev) => step.iter().zip(&prev).map(|(s, p)| s.mul(p)).collect(),
            });
            let canon = acc.as_ref().unwrap();
            let mats: Vec<QMat> = (lo..=hi + 1)
                .map(|k| {
                    let ki = (k - lo) as usize;
                    basis[j + 1][ki].mul(&canon[ki]).mul(&basis_inv[i][ki])
                })
                .collect();
            row.push(ChainMap::new_unchecked(
                objects[i].clone(),
                objects[j + 1].clone(),
                lo,
                mats,
            ));
        }
        arrows.push(row);
    }
    BaseDiagram { objects, arrows }
}

/// A relative diagram over the horn region: the composite of a base functor
/// on the marked linear poset with the projection, so that marked pairs land
/// on quasi-isomorphisms by construction. Determinism: a fixed seed yields a
/// byte-identical diagram.
pub fn gen_relative_diagram(
    horn: &SubsetChainPoset,
    seed: u64,
    profile: &GenProfile,
) -> Diagram {
    let mut rng = rng_for(seed);
    let base = base_diagram(&mut rng, horn.n, &horn.structure, profile);
    let objects: Vec<Arc<ChainComplexQ>> = (0..horn.len())
        .map(|e| base.objects[horn.phi(e)].clone())
        .collect();
    let covers = horn.result.poset().covers();
    let arrows = covers
        .iter()
        .map(|&(x, y)| {
            let (i, j) = (horn.phi(x), horn.phi(y));
            ((x, y), base.arrows[i][j - i].clone())
        })
        .collect();
    Diagram::new(horn.result.clone(), objects, arrows, true).expect("generated diagram is valid")
}

/// A diagram over an arbitrary index in which every arrow is a
/// quasi-isomorphism: a shared homology block plus per-object acyclic
/// padding, with target-determined connecting blocks so composites agree.
pub fn gen_all_we_diagram(
    index: &Arc<RelPoset>,
    seed: u64,
    profile: &GenProfile,
) -> Diagram {
    let mut rng = rng_for(seed);
    let len = (profile.hi - profile.lo + 1) as usize;
    let h: Vec<usize> = (0..len).map(|_| rng.gen_range(0..=profile.max_h)).collect();
    let lo = profile.lo;
    let hi = profile.hi;

    let shapes: Vec<CanonicalShape> = (0..index.len())
        .map(|_| CanonicalShape {
            lo,
            h: h.clone(),
            pad: (0..len).map(|_| rng.gen_range(0..=profile.max_pad)).collect(),
        })
        .collect();
    let basis: Vec<Vec<QMat>> = shapes
        .iter()
        .map(|sh| (lo..=hi + 1).map(|k| random_invertible(&mut rng, sh.dim_at(k))).collect())
        .collect();
    let basis_inv: Vec<Vec<QMat>> = basis
        .iter()
        .map(|bs| bs.iter().map(|u| crate::linalg::invert(u).expect("invertible")).collect())
        .collect();
    let objects: Vec<Arc<ChainComplexQ>> = shapes
        .iter()
        .zip(&basis)
        .zip(&basis_inv)
        .map(|((sh, bs), binv)| {
            let canonical = sh.complex();
            let dims: Vec<usize> = (lo..=hi + 1).map(|k| sh.dim_at(k)).collect();
            let mut diffs = Vec::new();
            for (i, _) in dims.iter().enumerate() {
                let k = lo + i as i32;
                if i == 0 {
                    diffs.push(QMat::zeros(0, dims[0]));
                } else {
                    diffs.push(bs[i - 1].mul(&canonical.d(k)).mul(&binv[i]));
                }
            }
            Arc::new(ChainComplexQ::new(lo, dims, diffs))
        })
        .collect();

    // target-determined connecting block: h -> x slot of the target padding
    let c_blocks: Vec<Vec<QMat>> = shapes
        .iter()
        .map(|sh| {
            (lo..=hi + 1)
                .map(|k| random_matrix(&mut rng, sh.pad_at(k), sh.h_at(k)))
                .collect()
        })
        .collect();
    let canonical_arrow = |src: usize, tgt: usize, k: i32| -> QMat {
        let (s, t) = (&shapes[src], &shapes[tgt]);
        let mut m = QMat::zeros(t.dim_at(k), s.dim_at(k));
        let hk = s.h_at(k); // == t.h_at(k)
        m.set_block(0, 0, &QMat::identity(hk));
        let ki = (k - lo) as usize;
        m.set_block(t.h_at(k), 0, &c_blocks[tgt][ki]);
        m
    };
    let covers = index.poset().covers();
    let arrows = covers
        .iter()
        .map(|&(x, y)| {
            let mats: Vec<QMat> = (lo..=hi + 1)
                .map(|k| {
                    let ki = (k - lo) as usize;
                    basis[y][ki].mul(&canonical_arrow(x, y, k)).mul(&basis_inv[x][ki])
                })
                .collect();
            ((x, y), ChainMap::new_unchecked(objects[x].clone(), objects[y].clone(), lo, mats))
        })
        .collect();
    Diagram::new(index.clone(), objects, arrows, true).expect("all-we diagram is valid")
}
