//! Diagrams of chain complexes over relative posets, their exact limits, the
//! Reedy fibrant replacement, homotopy limits with canonical maps, and the
//! extension of a diagram over the cone poset.
//!
//! Limits are computed by substitution: values at non-minimal elements are
//! expressed through one covering path down to a minimal element, remaining
//! covering arrows become linear constraints, and the limit is the kernel of
//! the constraint map inside the product over minimal elements.

use std::collections::HashMap;
use std::sync::Arc;

use crate::linalg::{kernel_basis, KernelBasis, QMat};
use crate::rational::Q;
use crate::relposet::RelPoset;
use crate::subdivision::{kappa, ConePoset};

use super::{factorize, is_quasi_iso, ChainComplexQ, ChainMap, FibcatError};

// ---------------------------------------------------------------------------
// diagrams
// ---------------------------------------------------------------------------

/// A functor from a finite relative poset to chain complexes, with arrows
/// stored on covering relations.
pub struct Diagram {
    pub index: Arc<RelPoset>,
    pub objects: Vec<Arc<ChainComplexQ>>,
    pub arrows: HashMap<(usize, usize), ChainMap>,
    pub relative: bool,
}

impl Diagram {
    /// Validates cover arrows, functoriality (path independence of
    /// composites), and, when `relative` is set, that every marked pair maps
    /// to a quasi-isomorphism.
    pub fn new(
        index: Arc<RelPoset>,
        objects: Vec<Arc<ChainComplexQ>>,
        arrows: HashMap<(usize, usize), ChainMap>,
        relative: bool,
    ) -> Result<Diagram, FibcatError> {
        assert_eq!(objects.len(), index.len());
        let d = Diagram { index, objects, arrows, relative };
        d.validate()?;
        Ok(d)
    }

    /// Skips validation; for diagrams correct by construction.
    pub fn new_unchecked(
        index: Arc<RelPoset>,
        objects: Vec<Arc<ChainComplexQ>>,
        arrows: HashMap<(usize, usize), ChainMap>,
        relative: bool,
    ) -> Diagram {
        assert_eq!(objects.len(), index.len());
        Diagram { index, objects, arrows, relative }
    }

    fn validate(&self) -> Result<(), FibcatError> {
        let covers = self.index.poset().covers();
        for &(x, y) in &covers {
            match self.arrows.get(&(x, y)) {
                Some(f)
                    if f.source.as_ref() == self.objects[x].as_ref()
                        && f.target.as_ref() == self.objects[y].as_ref() => {}
                _ => return Err(FibcatError::BadArrow(x, y)),
            }
        }
        // path independence of composites out of every element
        for a in self.index.elements() {
            let composites = self.composites_from(a);
            for (&b, f) in &composites {
                for &(x, y) in &covers {
                    if x == b {
                        if let Some(g) = composites.get(&y) {
                            let via = ChainMap::compose(&self.arrows[&(x, y)], f);
                            if !maps_equal(&via, g) {
                                return Err(FibcatError::NotFunctorial(a, y));
                            }
                        }
                    }
                }
            }
        }
        if self.relative {
            for (a, b) in self.index.marked_pairs() {
                if !is_quasi_iso(&self.arrow_between(a, b)) {
                    return Err(FibcatError::MarkedPairNotWe(a, b));
                }
            }
        }
        Ok(())
    }

    /// Composites from `a` to every element above it, along cover paths.
    fn composites_from(&self, a: usize) -> HashMap<usize, ChainMap> {
        let mut out: HashMap<usize, ChainMap> = HashMap::new();
        out.insert(a, ChainMap::identity(&self.objects[a]));
        // process in topological order of the up-set
        let mut ups: Vec<usize> = self.index.poset().up_set(a).collect();
        ups.sort_by_key(|&x| self.index.poset().chain_length_ending()[x]);
        for &b in &ups {
            if out.contains_key(&b) {
                continue;
            }
            // find any cover predecessor of b inside the up-set with a map
            let pred = ups
                .iter()
                .chain(std::iter::once(&a))
                .find(|&&x| x != b && self.arrows.contains_key(&(x, b)) && out.contains_key(&x));
            if let Some(&x) = pred {
                let f = ChainMap::compose(&self.arrows[&(x, b)], &out[&x]);
                out.insert(b, f);
            }
        }
        out
    }

    /// The composite arrow for any order pair a <= b.
    pub fn arrow_between(&self, a: usize, b: usize) -> ChainMap {
        assert!(self.index.leq(a, b));
        if a == b {
            return ChainMap::identity(&self.objects[a]);
        }
        if let Some(f) = self.arrows.get(&(a, b)) {
            return f.clone();
        }
        // compose along any cover path; functoriality makes the choice irrelevant
        let next = self
            .index
            .poset()
            .up_set(a)
            .find(|&m| {
                m != a && self.index.leq(m, b) && self.arrows.contains_key(&(a, m))
            })
            .expect("cover path exists");
        ChainMap::compose(&self.arrow_between(next, b), &self.arrows[&(a, next)])
    }

    /// The restriction to a full subposet, with composite arrows on its covers.
    pub fn restrict(&self, members: &[usize]) -> Diagram {
        let sub_index = Arc::new(self.index.full_subposet(members));
        let objects: Vec<Arc<ChainComplexQ>> =
            members.iter().map(|&m| self.objects[m].clone()).collect();
        let arrows = self
            .index
            .poset()
            .sub_covers(members)
            .into_iter()
            .map(|(i, j)| ((i, j), self.arrow_between(members[i], members[j])))
            .collect();
        Diagram::new_unchecked(sub_index, objects, arrows, self.relative)
    }
}

fn maps_equal(f: &ChainMap, g: &ChainMap) -> bool {
    let lo = f.source.lo().min(g.source.lo());
    let hi = f.source.hi().max(g.source.hi());
    (lo..=hi).all(|k| f.at(k) == g.at(k))
}

// ---------------------------------------------------------------------------
// inverse structure
// ---------------------------------------------------------------------------

/// Colength per element: maximal chain length of the index minus the length
/// of the longest chain ending at the element. Strict relations strictly
/// decrease it, so matching data live strictly above in the order.
pub struct InverseStructure {
    pub colength: Vec<usize>,
}

impl InverseStructure {
    pub fn from_index(index: &RelPoset) -> InverseStructure {
        let depth = index.poset().chain_length_ending();
        let max = depth.iter().copied().max().unwrap_or(0);
        InverseStructure { colength: depth.iter().map(|&d| max - d).collect() }
    }

    pub fn validate(&self, index: &RelPoset) -> Result<(), FibcatError> {
        for a in index.elements() {
            for b in index.poset().up_set(a) {
                if a != b && self.colength[a] <= self.colength[b] {
                    return Err(FibcatError::BadInverseStructure(a, b));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// limits
// ---------------------------------------------------------------------------

/// A finite diagram presented by objects and cover arrows only; this is all
/// the limit computation needs.
pub struct LimitInput {
    pub objects: Vec<Arc<ChainComplexQ>>,
    pub covers: Vec<(usize, usize)>,
    pub maps: Vec<ChainMap>,
}

/// An exact limit: the limit complex, and enough data to produce the
/// projection to every element and to induce maps from cones.
pub struct Limit {
    pub complex: Arc<ChainComplexQ>,
    objects: Vec<Arc<ChainComplexQ>>,
    lo: i32,
    minimals: Vec<usize>,
    /// offsets[deg][i] = column offset of minimal element minimals[i]
    offsets: Vec<Vec<usize>>,
    /// exprs[local][deg]: value of the element in terms of the minimal variables
    exprs: Vec<Vec<QMat>>,
    kernels: Vec<KernelBasis>,
}

pub fn limit(input: &LimitInput) -> Limit {
    let n = input.objects.len();
    if n == 0 {
        return Limit {
            complex: Arc::new(ChainComplexQ::zero()),
            objects: Vec::new(),
            lo: 0,
            minimals: Vec::new(),
            offsets: Vec::new(),
            exprs: Vec::new(),
            kernels: Vec::new(),
        };
    }
    let lo = input.objects.iter().map(|o| o.lo()).min().unwrap();
    let hi = input.objects.iter().map(|o| o.hi()).max().unwrap();
    let degs = (hi - lo + 1).max(0) as usize;

    // predecessors by covers; Kahn order
    let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (pred, cover idx)
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, &(x, y)) in input.covers.iter().enumerate() {
        preds[y].push((x, ci));
        succs[x].push(ci);
    }
    for p in &mut preds {
        p.sort();
    }
    let mut order: Vec<usize> = Vec::with_capacity(n);
    {
        let mut indeg: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        queue.sort_unstable();
        let mut qi = 0;
        while qi < queue.len() {
            let x = queue[qi];
            qi += 1;
            order.push(x);
            for &ci in &succs[x] {
                let y = input.covers[ci].1;
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    queue.push(y);
                }
            }
        }
        assert_eq!(order.len(), n, "covers contain a cycle");
    }
    let minimals: Vec<usize> = (0..n).filter(|&i| preds[i].is_empty()).collect();

    let mut offsets: Vec<Vec<usize>> = Vec::with_capacity(degs);
    let mut nvars: Vec<usize> = Vec::with_capacity(degs);
    for d in 0..degs {
        let k = lo + d as i32;
        let mut offs = Vec::with_capacity(minimals.len());
        let mut acc = 0;
        for &m in &minimals {
            offs.push(acc);
            acc += input.objects[m].dim(k);
        }
        offsets.push(offs);
        nvars.push(acc);
    }

    // expressions in terms of the minimal variables
    let mut exprs: Vec<Vec<QMat>> = vec![Vec::new(); n];
    for d in 0..degs {
        let k = lo + d as i32;
        for &e in &order {
            let dim_e = input.objects[e].dim(k);
            let mat = if let Some(pos) = minimals.iter().position(|&m| m == e) {
                let mut m = QMat::zeros(dim_e, nvars[d]);
                for j in 0..dim_e {
                    m.set(j, offsets[d][pos] + j, Q::one());
                }
                m
            } else {
                let (p, ci) = preds[e][0];
                input.maps[ci].at(k).mul(&exprs[p][d])
            };
            exprs[e].push(mat);
        }
    }
    // constraints from the non-defining covers
    let mut kernels: Vec<KernelBasis> = Vec::with_capacity(degs);
    for d in 0..degs {
        let k = lo + d as i32;
        let mut rows: Vec<QMat> = Vec::new();
        for &e in &order {
            for &(p, ci) in preds[e].iter().skip(1) {
                let lhs = input.maps[ci].at(k).mul(&exprs[p][d]);
                rows.push(lhs.sub(&exprs[e][d]));
            }
        }
        let kb = if rows.is_empty() {
            KernelBasis {
                basis: QMat::identity(nvars[d]),
                free_cols: (0..nvars[d]).collect(),
            }
        } else {
            let refs: Vec<&QMat> = rows.iter().collect();
            kernel_basis(&QMat::vstack(&refs))
        };
        kernels.push(kb);
    }

    // the limit complex: differential induced blockwise on minimal variables
    let dims: Vec<usize> = kernels.iter().map(KernelBasis::dim).collect();
    let mut diffs: Vec<QMat> = Vec::with_capacity(degs);
    for d in 0..degs {
        let k = lo + d as i32;
        if d == 0 {
            diffs.push(QMat::zeros(0, dims[0]));
            continue;
        }
        let kb = &kernels[d];
        let prev = &kernels[d - 1];
        let mut cols: Vec<Vec<Q>> = Vec::with_capacity(kb.dim());
        for j in 0..kb.dim() {
            let v = kb.basis.col(j);
            let mut w = vec![Q::zero(); prev.basis.rows()];
            for (mi, &m) in minimals.iter().enumerate() {
                let obj = &input.objects[m];
                let dim_k = obj.dim(k);
                if dim_k == 0 {
                    continue;
                }
                let block = &v[offsets[d][mi]..offsets[d][mi] + dim_k];
                let img = obj.d(k).mul_vec(block);
                let off = offsets[d - 1][mi];
                for (r, val) in img.into_iter().enumerate() {
                    w[off + r] = val;
                }
            }
            cols.push(prev.express(&w));
        }
        diffs.push(QMat::from_fn(dims[d - 1], dims[d], |r, c| cols[c][r].clone()));
    }
    let complex = Arc::new(ChainComplexQ::new(lo, dims, diffs));
    Limit {
        complex,
        objects: input.objects.clone(),
        lo,
        minimals,
        offsets,
        exprs,
        kernels,
    }
}

impl Limit {
    pub fn dim(&self) -> usize {
        self.complex.total_dim()
    }

    /// The projection of the limit to the value at a (local) element.
    pub fn projection(&self, local: usize) -> ChainMap {
        let degs = self.kernels.len();
        let mats: Vec<QMat> = (0..degs)
            .map(|d| self.exprs[local][d].mul(&self.kernels[d].basis))
            .collect();
        ChainMap::new_unchecked(
            self.complex.clone(),
            self.objects[local].clone(),
            self.lo,
            mats,
        )
    }

    /// Induces the map into the limit from a cone: `components[i]` is the
    /// cone leg at the i-th minimal element. The legs must commute with the
    /// diagram, which makes the stacked image land in the kernel.
    pub fn induce(&self, source: &Arc<ChainComplexQ>, components: &[ChainMap]) -> ChainMap {
        assert_eq!(components.len(), self.minimals.len());
        let degs = self.kernels.len();
        let mut mats = Vec::with_capacity(degs);
        for d in 0..degs {
            let k = self.lo + d as i32;
            let nv = self.kernels[d].basis.rows();
            let mut stacked = QMat::zeros(nv, source.dim(k));
            for (mi, comp) in components.iter().enumerate() {
                stacked.set_block(self.offsets[d][mi], 0, &comp.at(k));
            }
            let mut m = QMat::zeros(self.kernels[d].dim(), source.dim(k));
            for c in 0..source.dim(k) {
                let col = stacked.col(c);
                let coords = self.kernels[d].express(&col);
                debug_assert_eq!(
                    self.kernels[d].basis.mul_vec(&coords),
                    col,
                    "cone does not land in the limit"
                );
                for (r, v) in coords.into_iter().enumerate() {
                    m.set(r, c, v);
                }
            }
            mats.push(m);
        }
        ChainMap::new_unchecked(source.clone(), self.complex.clone(), self.lo, mats)
    }

    pub fn minimals(&self) -> &[usize] {
        &self.minimals
    }
}

/// Exact limit of a diagram over its whole index.
pub fn diagram_limit(f: &Diagram) -> Limit {
    let covers = f.index.poset().covers();
    let maps = covers.iter().map(|&(x, y)| f.arrows[&(x, y)].clone()).collect();
    limit(&LimitInput { objects: f.objects.clone(), covers, maps })
}

// ---------------------------------------------------------------------------
// Reedy replacement
// ---------------------------------------------------------------------------

/// A Reedy fibrant replacement: objectwise quasi-isomorphic, with every
/// structure map to the matching object a degreewise surjection.
pub struct ReedyReplacement {
    pub index: Arc<RelPoset>,
    pub objects: Vec<Arc<ChainComplexQ>>,
    pub eta: Vec<ChainMap>,
    pub matching: Vec<Arc<ChainComplexQ>>,
    pub matching_map: Vec<ChainMap>,
    /// arrows for every strict order pair
    arrows: HashMap<(usize, usize), ChainMap>,
}

impl ReedyReplacement {
    pub fn arrow(&self, a: usize, b: usize) -> ChainMap {
        if a == b {
            ChainMap::identity(&self.objects[a])
        } else {
            self.arrows[&(a, b)].clone()
        }
    }

    /// The replaced diagram with arrows on covers.
    pub fn diagram(&self) -> Diagram {
        let covers = self.index.poset().covers();
        let arrows = covers.iter().map(|&(x, y)| ((x, y), self.arrow(x, y))).collect();
        Diagram::new_unchecked(self.index.clone(), self.objects.clone(), arrows, false)
    }
}

/// Processes elements from the longest chains downward (ascending colength):
/// at each element the matching object is the limit of the already replaced
/// diagram over its strict successors, and the canonical cone out of the
/// original value is factorized into a quasi-isomorphism followed by a
/// surjection.
pub fn reedy_replace(
    f: &Diagram,
    inv: &InverseStructure,
) -> Result<ReedyReplacement, FibcatError> {
    inv.validate(&f.index)?;
    let n = f.index.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&d| (inv.colength[d], d));

    let mut objects: Vec<Option<Arc<ChainComplexQ>>> = vec![None; n];
    let mut eta: Vec<Option<ChainMap>> = vec![None; n];
    let mut matching: Vec<Option<Arc<ChainComplexQ>>> = vec![None; n];
    let mut matching_map: Vec<Option<ChainMap>> = vec![None; n];
    let mut arrows: HashMap<(usize, usize), ChainMap> = HashMap::new();

    for &d in &order {
        let succs: Vec<usize> = f
            .index
            .poset()
            .up_set(d)
            .filter(|&x| x != d)
            .collect();
        let sub_covers = f.index.poset().sub_covers(&succs);
        let maps: Vec<ChainMap> = sub_covers
            .iter()
            .map(|&(i, j)| arrows[&(succs[i], succs[j])].clone())
            .collect();
        let m_limit = limit(&LimitInput {
            objects: succs.iter().map(|&x| objects[x].clone().unwrap()).collect(),
            covers: sub_covers,
            maps,
        });
        // cone out of F(d): through the original arrows and the finished etas
        let components: Vec<ChainMap> = m_limit
            .minimals()
            .iter()
            .map(|&mi| {
                let x = succs[mi];
                ChainMap::compose(eta[x].as_ref().unwrap(), &f.arrow_between(d, x))
            })
            .collect();
        let cone = m_limit.induce(&f.objects[d], &components);
        let fac = factorize(&cone);
        objects[d] = Some(fac.mid.clone());
        eta[d] = Some(fac.s);
        matching[d] = Some(m_limit.complex.clone());
        matching_map[d] = Some(fac.p.clone());
        for (local, &x) in succs.iter().enumerate() {
            let proj = m_limit.projection(local);
            arrows.insert((d, x), ChainMap::compose(&proj, &fac.p));
        }
    }

    Ok(ReedyReplacement {
        index: f.index.clone(),
        objects: objects.into_iter().map(Option::unwrap).collect(),
        eta: eta.into_iter().map(Option::unwrap).collect(),
        matching: matching.into_iter().map(Option::unwrap).collect(),
        matching_map: matching_map.into_iter().map(Option::unwrap).collect(),
        arrows,
    })
}

// ---------------------------------------------------------------------------
// homotopy limits
// ---------------------------------------------------------------------------

/// A homotopy limit: the limit of a Reedy fibrant replacement, with the
/// canonical projection to every element.
pub struct Holim {
    pub replacement: ReedyReplacement,
    pub limit: Limit,
}

pub fn holim(f: &Diagram, inv: &InverseStructure) -> Result<Holim, FibcatError> {
    let replacement = reedy_replace(f, inv)?;
    let covers = f.index.poset().covers();
    let maps = covers.iter().map(|&(x, y)| replacement.arrow(x, y)).collect();
    let lim = limit(&LimitInput {
        objects: replacement.objects.clone(),
        covers,
        maps,
    });
    Ok(Holim { replacement, limit: lim })
}

impl Holim {
    /// The canonical map to the replaced value at an element.
    pub fn canonical(&self, d: usize) -> ChainMap {
        self.limit.projection(d)
    }

    pub fn complex(&self) -> &Arc<ChainComplexQ> {
        &self.limit.complex
    }
}

/// Limit of the replaced diagram over a subset of the index. When the subset
/// is a cosieve the restriction is still Reedy fibrant, so this computes the
/// homotopy limit of the restriction on the nose.
pub fn cosieve_limit(h: &Holim, members: &[usize]) -> Limit {
    let covers = h.replacement.index.poset().sub_covers(members);
    let maps = covers
        .iter()
        .map(|&(i, j)| h.replacement.arrow(members[i], members[j]))
        .collect();
    limit(&LimitInput {
        objects: members.iter().map(|&m| h.replacement.objects[m].clone()).collect(),
        covers,
        maps,
    })
}

/// The restriction map between limits of the same replaced diagram over
/// nested subsets: the cone of the big limit restricted to the small one.
pub fn limit_restriction(
    h: &Holim,
    big: &Limit,
    big_members: &[usize],
    small: &Limit,
    small_members: &[usize],
) -> ChainMap {
    let components: Vec<ChainMap> = small
        .minimals()
        .iter()
        .map(|&mi| {
            let global = small_members[mi];
            let big_local = big_members
                .iter()
                .position(|&g| g == global)
                .expect("small subset inside big subset");
            big.projection(big_local)
        })
        .collect();
    let _ = h;
    small.induce(&big.complex, &components)
}

/// The canonical map from a homotopy limit to the homotopy limit of the
/// restriction to an arbitrary full subposet: restrict the replaced diagram,
/// replace again over the subposet, and induce from the restricted cone.
pub struct RestrictedHolim {
    pub members: Vec<usize>,
    pub replacement: ReedyReplacement,
    pub limit: Limit,
    pub map: ChainMap,
}

pub fn holim_restriction(h: &Holim, members: &[usize]) -> Result<RestrictedHolim, FibcatError> {
    let restricted = restricted_diagram(h, members);
    let inv = InverseStructure::from_index(&restricted.index);
    let replacement = reedy_replace(&restricted, &inv)?;
    let covers = restricted.index.poset().covers();
    let maps = covers.iter().map(|&(x, y)| replacement.arrow(x, y)).collect();
    let lim = limit(&LimitInput {
        objects: replacement.objects.clone(),
        covers,
        maps,
    });
    let components: Vec<ChainMap> = lim
        .minimals()
        .iter()
        .map(|&mi| {
            // big-holim projection followed by the new replacement's eta
            let global = members[mi];
            ChainMap::compose(&replacement.eta[mi], &h.limit.projection(global))
        })
        .collect();
    let map = lim.induce(&h.limit.complex, &components);
    Ok(RestrictedHolim { members: members.to_vec(), replacement, limit: lim, map })
}

fn restricted_diagram(h: &Holim, members: &[usize]) -> Diagram {
    let sub_index = Arc::new(h.replacement.index.full_subposet(members));
    let objects: Vec<Arc<ChainComplexQ>> =
        members.iter().map(|&m| h.replacement.objects[m].clone()).collect();
    let arrows = h
        .replacement
        .index
        .poset()
        .sub_covers(members)
        .into_iter()
        .map(|(i, j)| ((i, j), h.replacement.arrow(members[i], members[j])))
        .collect();
    Diagram::new_unchecked(sub_index, objects, arrows, false)
}

// ---------------------------------------------------------------------------
// extension over the cone poset
// ---------------------------------------------------------------------------

/// A diagram over the cone poset K(D): the original diagram on the 0-copy,
/// its Reedy replacement on the 1-copy, the limit of the replacement at the
/// extra element, with the connecting arrows.
pub struct KappaExtension {
    pub holim: Holim,
    pub cone: ConePoset,
    pub index: Arc<RelPoset>,
    pub objects: Vec<Arc<ChainComplexQ>>,
    pub arrows: HashMap<(usize, usize), ChainMap>,
}

pub fn extend_to_kappa(f: &Diagram, inv: &InverseStructure) -> Result<KappaExtension, FibcatError> {
    let h = holim(f, inv)?;
    let cone = kappa(f.index.poset());
    let index = Arc::new(RelPoset::minimal(cone.poset.clone()));
    let m = f.index.len();
    let mut objects: Vec<Arc<ChainComplexQ>> = Vec::with_capacity(2 * m + 1);
    for d in 0..m {
        objects.push(f.objects[d].clone());
    }
    for d in 0..m {
        objects.push(h.replacement.objects[d].clone());
    }
    objects.push(h.limit.complex.clone());

    let mut arrows: HashMap<(usize, usize), ChainMap> = HashMap::new();
    let minimals: Vec<usize> = f
        .index
        .elements()
        .filter(|&d| f.index.elements().all(|x| x == d || !f.index.leq(x, d)))
        .collect();
    for &(x, y) in &index.poset().covers() {
        let map = if x == cone.k_elem() {
            // k is below exactly the 1-copies of minimal elements
            let d = y - m;
            debug_assert!(minimals.contains(&d));
            h.limit.projection(d)
        } else if x < m && y < m {
            f.arrows[&(x, y)].clone()
        } else if x < m && y == m + x {
            h.replacement.eta[x].clone()
        } else {
            h.replacement.arrow(x - m, y - m)
        };
        arrows.insert((x, y), map);
    }
    // full functoriality check: the glued square and cone compatibilities
    let ext = Diagram::new(index.clone(), objects, arrows, false)?;
    Ok(KappaExtension {
        holim: h,
        cone,
        index,
        objects: ext.objects,
        arrows: ext.arrows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibcat::generate::{gen_all_we_diagram, gen_relative_diagram, GenProfile};
    use crate::linalg::rank;
    use crate::relposet::{build_simplex, Poset};
    use crate::subdivision::{sd2_region, Region};

    fn arrow_index() -> Arc<RelPoset> {
        Arc::new(build_simplex(1, &[]).unwrap())
    }

    fn cospan_index() -> Arc<RelPoset> {
        // 0 -> 2 <- 1
        let poset = Poset::from_pairs(
            vec!["a".into(), "b".into(), "c".into()],
            &[(0, 2), (1, 2)],
        )
        .unwrap();
        Arc::new(RelPoset::minimal(poset))
    }

    #[test]
    fn limit_over_minimum_is_that_value() {
        let idx = arrow_index();
        let d = gen_all_we_diagram(&idx, 3, &GenProfile::small());
        let lim = diagram_limit(&d);
        // the index has minimum 0; the projection there is an isomorphism
        let proj = lim.projection(0);
        for k in lim.complex.lo()..=lim.complex.hi() {
            assert_eq!(lim.complex.dim(k), d.objects[0].dim(k));
            assert_eq!(rank(&proj.at(k)), lim.complex.dim(k));
        }
    }

    #[test]
    fn limit_universal_cone() {
        let idx = cospan_index();
        let d = gen_all_we_diagram(&idx, 5, &GenProfile::small());
        let lim = diagram_limit(&d);
        // projections commute with every arrow
        for a in 0..3usize {
            for b in 0..3usize {
                if a != b && idx.leq(a, b) {
                    let via = ChainMap::compose(&d.arrow_between(a, b), &lim.projection(a));
                    let direct = lim.projection(b);
                    assert!(maps_equal(&via, &direct));
                }
            }
        }
    }

    #[test]
    fn limit_of_cospan_is_fiber_product() {
        let idx = cospan_index();
        let d = gen_all_we_diagram(&idx, 9, &GenProfile::small());
        let lim = diagram_limit(&d);
        let f = d.arrows[&(0, 2)].clone();
        let g = d.arrows[&(1, 2)].clone();
        for k in lim.complex.lo()..=lim.complex.hi() {
            // kernel of [f, -g] has the same dimension degreewise
            let mut m = QMat::zeros(f.target.dim(k), f.source.dim(k) + g.source.dim(k));
            m.set_block(0, 0, &f.at(k));
            m.set_block(0, f.source.dim(k), &g.at(k).neg());
            assert_eq!(lim.complex.dim(k), kernel_basis(&m).dim());
        }
    }

    #[test]
    fn reedy_replacement_contract() {
        let idx = cospan_index();
        let d = gen_all_we_diagram(&idx, 11, &GenProfile::small());
        let inv = InverseStructure::from_index(&idx);
        let rep = reedy_replace(&d, &inv).unwrap();
        for x in 0..3usize {
            assert!(is_quasi_iso(&rep.eta[x]), "eta at {x} must be a quasi-iso");
            assert!(rep.matching_map[x].is_surjective(), "matching map at {x}");
        }
        // eta is natural on covers
        for &(x, y) in &idx.poset().covers() {
            let lhs = ChainMap::compose(&rep.eta[y], &d.arrows[&(x, y)]);
            let rhs = ChainMap::compose(&rep.arrow(x, y), &rep.eta[x]);
            assert!(maps_equal(&lhs, &rhs));
        }
        // the replaced diagram is functorial
        let dia = rep.diagram();
        assert!(Diagram::new(dia.index.clone(), dia.objects.clone(), dia.arrows.clone(), false).is_ok());
    }

    #[test]
    fn holim_of_single_point() {
        let idx = Arc::new(build_simplex(0, &[]).unwrap());
        let d = gen_all_we_diagram(&idx, 17, &GenProfile::small());
        let inv = InverseStructure::from_index(&idx);
        let h = holim(&d, &inv).unwrap();
        assert!(is_quasi_iso(&h.canonical(0)));
        let eta_then = ChainMap::compose(&h.canonical(0), &h.limit.induce(
            &d.objects[0],
            &[h.replacement.eta[0].clone()],
        ));
        assert!(is_quasi_iso(&eta_then));
    }

    #[test]
    fn constant_diagram_over_arrow() {
        let idx = arrow_index();
        let d = gen_all_we_diagram(&idx, 23, &GenProfile::small());
        let inv = InverseStructure::from_index(&idx);
        let rep = reedy_replace(&d, &inv).unwrap();
        assert!(is_quasi_iso(&rep.eta[0]));
        assert!(is_quasi_iso(&rep.eta[1]));
        assert!(rep.matching_map[0].is_surjective());
    }

    #[test]
    fn inverse_structure_on_horn() {
        let st = Arc::new(build_simplex(2, &[(0, 1)]).unwrap());
        let horn = sd2_region(2, Region::Horn(1), &st).unwrap();
        let inv = InverseStructure::from_index(&horn.result);
        assert!(inv.validate(&horn.result).is_ok());
        // chains of length l have colength (max chain length - l); the horn
        // at n = 2 has no chain of three subsets, so the maximum is 2
        for e in 0..horn.len() {
            assert_eq!(inv.colength[e], 2 - horn.chain(e).len());
        }
    }

    #[test]
    fn generated_relative_diagram_is_deterministic() {
        let st = Arc::new(build_simplex(2, &[(0, 1)]).unwrap());
        let horn = sd2_region(2, Region::Horn(1), &st).unwrap();
        let profile = GenProfile::small();
        let d1 = gen_relative_diagram(&horn, 42, &profile);
        let d2 = gen_relative_diagram(&horn, 42, &profile);
        for e in 0..horn.len() {
            assert_eq!(
                serde_json::to_string(d1.objects[e].as_ref()).unwrap(),
                serde_json::to_string(d2.objects[e].as_ref()).unwrap()
            );
        }
        let d3 = gen_relative_diagram(&horn, 43, &profile);
        let same = (0..horn.len()).all(|e| {
            serde_json::to_string(d1.objects[e].as_ref()).unwrap()
                == serde_json::to_string(d3.objects[e].as_ref()).unwrap()
        });
        assert!(!same, "different seeds should differ");
    }

    #[test]
    fn functoriality_validation_catches_bad_squares() {
        // a commuting-square index with one arrow broken
        let poset = Poset::from_pairs(
            vec!["00".into(), "01".into(), "10".into(), "11".into()],
            &[(0, 1), (0, 2), (1, 3), (2, 3)],
        )
        .unwrap();
        let idx = Arc::new(RelPoset::minimal(poset));
        let d = gen_all_we_diagram(&idx, 3, &GenProfile::small());
        // breaking one arrow destroys path independence
        let mut arrows = d.arrows.clone();
        let c = Arc::new(ChainComplexQ::with_zero_differential(0, vec![1]));
        let broken_obj: Vec<Arc<ChainComplexQ>> = vec![
            c.clone(),
            c.clone(),
            c.clone(),
            c.clone(),
        ];
        let one = |s: &Arc<ChainComplexQ>, t: &Arc<ChainComplexQ>, v: i64| {
            ChainMap::new_unchecked(
                s.clone(),
                t.clone(),
                0,
                vec![QMat::from_int_rows(&[&[v]])],
            )
        };
        arrows.clear();
        arrows.insert((0, 1), one(&c, &c, 1));
        arrows.insert((0, 2), one(&c, &c, 1));
        arrows.insert((1, 3), one(&c, &c, 1));
        arrows.insert((2, 3), one(&c, &c, 2));
        let bad = Diagram::new(idx, broken_obj, arrows, false);
        assert!(matches!(bad, Err(FibcatError::NotFunctorial(_, _))));
    }

    #[test]
    fn kappa_extension_on_tiny_horn() {
        let st = Arc::new(build_simplex(1, &[(0, 1)]).unwrap());
        let horn = sd2_region(1, Region::Horn(0), &st).unwrap();
        let d = gen_relative_diagram(&horn, 5, &GenProfile::small());
        let inv = InverseStructure::from_index(&horn.result);
        let ext = extend_to_kappa(&d, &inv).unwrap();
        let m = horn.len();
        // every 0-copy to 1-copy arrow is the (quasi-iso) replacement unit
        for e in 0..m {
            assert!(is_quasi_iso(&ext.arrows[&(e, m + e)]));
        }
    }
}
