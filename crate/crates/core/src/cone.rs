//! Polyhedral cones with synchronized H- and V-descriptions.
//!
//! A cone is `{x : u(x) <= 0 for every halfspace u}`. The V-side stores the
//! extreme rays of the line-free part `C ∩ l(C)^⊥` together with a basis of
//! the lineality space `l(C) = C ∩ -C`.

use std::cmp::Ordering;

use crate::linalg::{mat_vec, nullspace, rank, vec_mat, Matrix, Subspace};
use crate::lp;
use crate::scalar::{canon_line, canon_ray, dot, is_zero_vec, lex_cmp, neg_vec, vec_eq, Scalar, Q};

#[derive(Clone, Debug)]
pub struct Cone<S: Scalar> {
    pub ambient: usize,
    /// Irredundant: facet covectors (taken inside the span of the cone)
    /// followed by `±w` pairs cutting out the span when it is proper.
    pub halfspaces: Vec<Vec<S>>,
    pub generators: Vec<Vec<S>>,
    pub lineality: Vec<Vec<S>>,
}

pub type RationalCone = Cone<Q>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConeError {
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
}

// small bitset over processed halfspaces
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new() -> Self {
        Bits(Vec::new())
    }
    fn set(&mut self, i: usize) {
        let w = i / 64;
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, a)| a & !o.0.get(i).copied().unwrap_or(0) == 0)
    }
}

struct Ray<S> {
    v: Vec<S>,
    zero: Bits,
}

/// Double description: incremental insertion of halfspaces into the full
/// space. Returns (extreme rays modulo lineality, lineality basis).
fn double_description<S: Scalar>(ambient: usize, hs: &[Vec<S>]) -> (Matrix<S>, Matrix<S>) {
    let mut lin: Matrix<S> = crate::linalg::identity(ambient);
    let mut rays: Vec<Ray<S>> = Vec::new();
    let mut processed = 0usize;

    for u in hs {
        if is_zero_vec(u) {
            continue;
        }
        let idx = processed;
        processed += 1;
        let lv: Vec<S> = lin.iter().map(|l| dot(u, l)).collect();
        if let Some(k) = lv.iter().position(|x| !x.is_zero()) {
            // u cuts a line of the current lineality space into a ray
            let lk = lin[k].clone();
            let uk = lv[k].clone();
            let mut new_lin = Vec::new();
            for (i, l) in lin.iter().enumerate() {
                if i != k {
                    let f = lv[i].over(&uk);
                    let w: Vec<S> = l.iter().zip(&lk).map(|(a, b)| a.minus(&f.times(b))).collect();
                    new_lin.push(w);
                }
            }
            for r in rays.iter_mut() {
                let f = dot(u, &r.v).over(&uk);
                if !f.is_zero() {
                    let w: Vec<S> = r.v.iter().zip(&lk).map(|(a, b)| a.minus(&f.times(b))).collect();
                    r.v = canon_ray(&w);
                }
                r.zero.set(idx);
            }
            let dir = if uk.is_pos() { neg_vec(&lk) } else { lk };
            // it came from the lineality space, so every earlier halfspace
            // is tight on it
            let mut zero = Bits::new();
            for j in 0..idx {
                zero.set(j);
            }
            rays.push(Ray { v: canon_ray(&dir), zero });
            lin = new_lin;
            continue;
        }

        let vals: Vec<S> = rays.iter().map(|r| dot(u, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_pos()).collect();
        if pos.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    r.zero.set(idx);
                }
            }
            continue;
        }
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_neg()).collect();
        let need = (ambient - lin.len()).saturating_sub(2);
        let mut fresh: Vec<Ray<S>> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zero.and(&rays[n].zero);
                if common.count() < need {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&r| r != p && r != n)
                    .all(|r| !common.subset_of(&rays[r].zero));
                if !adjacent {
                    continue;
                }
                // vals[p] > 0 > vals[n]
                let a = vals[p].clone();
                let b = vals[n].neg();
                let w: Vec<S> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(x, y)| x.times(&a).plus(&y.times(&b)))
                    .collect();
                let mut zero = common;
                zero.set(idx);
                fresh.push(Ray { v: canon_ray(&w), zero });
            }
        }
        let mut kept: Vec<Ray<S>> = Vec::new();
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i].is_pos() {
                continue;
            }
            if vals[i].is_zero() {
                r.zero.set(idx);
            }
            kept.push(r);
        }
        kept.extend(fresh);
        rays = kept;
    }
    (rays.into_iter().map(|r| r.v).collect(), lin)
}

fn sort_dedup<S: Scalar>(mut v: Matrix<S>) -> Matrix<S> {
    v.sort_by(|a, b| lex_cmp(a, b));
    v.dedup_by(|a, b| vec_eq(a, b));
    v
}

impl<S: Scalar> Cone<S> {
    /// `dd_convert`: the cone cut out by `hs`, with both descriptions.
    pub fn from_halfspaces(ambient: usize, hs: &[Vec<S>]) -> Self {
        assert!(ambient >= 1);
        for u in hs {
            assert_eq!(u.len(), ambient, "covector length");
        }
        let (rays, lin) = double_description(ambient, hs);
        Self::assemble(ambient, hs, rays, lin)
    }

    /// The cone generated by `rays` and the lines spanned by `lines`.
    pub fn from_generators(ambient: usize, rays: &[Vec<S>], lines: &[Vec<S>]) -> Self {
        let mut dual_hs: Matrix<S> = rays.to_vec();
        for l in lines {
            dual_hs.push(l.clone());
            dual_hs.push(neg_vec(l));
        }
        let dual = Self::from_halfspaces(ambient, &dual_hs);
        let mut hs = dual.generators.clone();
        for l in &dual.lineality {
            hs.push(l.clone());
            hs.push(neg_vec(l));
        }
        Self::from_halfspaces(ambient, &hs)
    }

    fn assemble(ambient: usize, hs: &[Vec<S>], rays: Matrix<S>, lin: Matrix<S>) -> Self {
        let lin_space = Subspace::span(ambient, &lin);
        let perp = lin_space.orthogonal_complement();
        let generators: Matrix<S> = sort_dedup(
            rays.iter()
                .map(|r| if lin_space.dim() == 0 { r.clone() } else { perp.project(r) })
                .filter(|r| !is_zero_vec(r))
                .map(|r| canon_ray(&r))
                .collect(),
        );
        let mut span_rows = lin_space.basis.clone();
        span_rows.extend(generators.iter().cloned());
        let span = Subspace::span(ambient, &span_rows);
        let d = span.dim();
        let full = d == ambient;
        let mut facets = Vec::new();
        for u in hs {
            let w = if full { u.clone() } else { span.project(u) };
            if is_zero_vec(&w) {
                continue;
            }
            let w = canon_ray(&w);
            let mut tight = lin_space.basis.clone();
            tight.extend(generators.iter().filter(|g| dot(&w, g).is_zero()).cloned());
            if rank(&tight) + 1 == d {
                facets.push(w);
            }
        }
        let mut halfspaces = sort_dedup(facets);
        if !full {
            for w in span.orthogonal_complement().basis {
                halfspaces.push(neg_vec(&w));
                halfspaces.push(w);
            }
        }
        Cone { ambient, halfspaces, generators, lineality: lin_space.basis }
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_halfspaces(ambient, &[])
    }

    pub fn zero(ambient: usize) -> Self {
        let hs: Matrix<S> = crate::linalg::identity(ambient)
            .into_iter()
            .flat_map(|e| [neg_vec(&e), e])
            .collect();
        Self::from_halfspaces(ambient, &hs)
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty() && self.lineality.is_empty()
    }

    pub fn lineality_dim(&self) -> usize {
        self.lineality.len()
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn span(&self) -> Subspace<S> {
        let mut rows = self.lineality.clone();
        rows.extend(self.generators.iter().cloned());
        Subspace::span(self.ambient, &rows)
    }

    /// Dimension of the linear span `L(C)`.
    pub fn dim(&self) -> usize {
        let mut rows = self.lineality.clone();
        rows.extend(self.generators.iter().cloned());
        rank(&rows)
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Facet covectors only, without the equality pairs.
    pub fn facets(&self) -> &[Vec<S>] {
        let n_eq = 2 * (self.ambient - self.dim());
        &self.halfspaces[..self.halfspaces.len() - n_eq]
    }

    pub fn lineality_space(&self) -> Subspace<S> {
        Subspace::span(self.ambient, &self.lineality)
    }

    pub fn contains(&self, x: &[S]) -> bool {
        assert_eq!(x.len(), self.ambient);
        self.halfspaces.iter().all(|u| !dot(u, x).is_pos())
    }

    pub fn contains_cone(&self, other: &Cone<S>) -> bool {
        assert_eq!(other.ambient, self.ambient);
        other.generators.iter().all(|g| self.contains(g))
            && other
                .lineality
                .iter()
                .all(|l| self.contains(l) && self.contains(&neg_vec(l)))
    }

    pub fn equal(&self, other: &Cone<S>) -> bool {
        self.ambient == other.ambient && self.contains_cone(other) && other.contains_cone(self)
    }

    pub fn try_intersect(&self, other: &Cone<S>) -> Result<Self, ConeError> {
        if self.ambient != other.ambient {
            return Err(ConeError::Dimension(self.ambient, other.ambient));
        }
        Ok(self.intersect(other))
    }

    pub fn intersect(&self, other: &Cone<S>) -> Self {
        assert_eq!(self.ambient, other.ambient);
        let mut hs = self.halfspaces.clone();
        hs.extend(other.halfspaces.iter().cloned());
        Self::from_halfspaces(self.ambient, &hs)
    }

    /// `conv(C ∪ D)`, by the union of generators.
    pub fn hull_union(&self, other: &Cone<S>) -> Self {
        assert_eq!(self.ambient, other.ambient);
        let mut rays = self.generators.clone();
        rays.extend(other.generators.iter().cloned());
        let mut lines = self.lineality.clone();
        lines.extend(other.lineality.iter().cloned());
        Self::from_generators(self.ambient, &rays, &lines)
    }

    /// `C* = {u : u(x) <= 0 for all x in C}`.
    pub fn dual(&self) -> Self {
        let mut hs = self.generators.clone();
        for l in &self.lineality {
            hs.push(l.clone());
            hs.push(neg_vec(l));
        }
        Self::from_halfspaces(self.ambient, &hs)
    }

    /// `(l(C), C ∩ l(C)^⊥)`.
    pub fn lineality_decomposition(&self) -> (Subspace<S>, Cone<S>) {
        let l = self.lineality_space();
        let mut hs = self.halfspaces.clone();
        for b in &l.basis {
            hs.push(b.clone());
            hs.push(neg_vec(b));
        }
        (l, Self::from_halfspaces(self.ambient, &hs))
    }

    pub fn neg(&self) -> Self {
        Cone {
            ambient: self.ambient,
            halfspaces: {
                let f = self.facets().len();
                let mut h = sort_dedup(self.halfspaces[..f].iter().map(|u| neg_vec(u)).collect());
                h.extend(self.halfspaces[f..].iter().cloned());
                h
            },
            generators: sort_dedup(self.generators.iter().map(|g| neg_vec(g)).collect()),
            lineality: self.lineality.clone(),
        }
    }

    /// Image under `x -> M x`, with `m_inv` the inverse of `M`.
    pub fn transform(&self, m: &[Vec<S>], m_inv: &[Vec<S>]) -> Self {
        let gens: Matrix<S> = self.generators.iter().map(|g| canon_ray(&mat_vec(m, g))).collect();
        let hs: Matrix<S> = self.halfspaces.iter().map(|u| vec_mat(u, m_inv)).collect();
        if self.is_pointed() && self.is_full_dimensional() {
            Cone {
                ambient: self.ambient,
                halfspaces: sort_dedup(hs.iter().map(|u| canon_ray(u)).collect()),
                generators: sort_dedup(gens),
                lineality: Vec::new(),
            }
        } else {
            Self::from_halfspaces(self.ambient, &hs)
        }
    }

    /// Whether the interiors of two full-dimensional cones meet.
    pub fn interiors_overlap(&self, other: &Cone<S>) -> bool {
        if !self.is_full_dimensional() || !other.is_full_dimensional() {
            return false;
        }
        let mut lt = self.halfspaces.clone();
        lt.extend(other.halfspaces.iter().cloned());
        lp::homogeneous(self.ambient, &lt, &[], &[]).is_some()
    }

    /// Interior-point membership for a full-dimensional cone.
    pub fn contains_in_interior(&self, x: &[S]) -> bool {
        self.is_full_dimensional() && self.halfspaces.iter().all(|u| dot(u, x).is_neg())
    }

    /// Sign pattern of a covector on the cone: does it take a positive or
    /// negative value somewhere.
    pub fn covector_range(&self, u: &[S]) -> (bool, bool) {
        let mut pos = false;
        let mut neg = false;
        for g in &self.generators {
            match dot(u, g).sign() {
                Ordering::Greater => pos = true,
                Ordering::Less => neg = true,
                Ordering::Equal => {}
            }
        }
        for l in &self.lineality {
            if !dot(u, l).is_zero() {
                pos = true;
                neg = true;
            }
        }
        (pos, neg)
    }
}

/// Removability of `hs[j]` from a family: the remaining halfspaces already
/// force `hs[j]`. Decided by exact LP.
pub fn is_removable<S: Scalar>(ambient: usize, hs: &[Vec<S>], j: usize) -> bool {
    let others: Matrix<S> = hs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, u)| u.clone())
        .collect();
    let ub: Vec<(Vec<S>, S)> = others.into_iter().map(|u| (u, S::zero())).collect();
    let eq = vec![(hs[j].clone(), S::one())];
    lp::feasible(ambient, &ub, &eq).is_none()
}

/// Lines are stored up to sign; this canonicalizes a lineality basis for
/// comparisons.
pub fn canonical_lines<S: Scalar>(ambient: usize, lines: &[Vec<S>]) -> Matrix<S> {
    Subspace::span(ambient, lines).basis.iter().map(|l| canon_line(l)).collect()
}

/// Kernel of a family of covectors, i.e. `∩ {u = 0}`.
pub fn common_kernel<S: Scalar>(ambient: usize, covectors: &[Vec<S>]) -> Subspace<S> {
    Subspace::span(ambient, &nullspace(covectors, ambient))
}
