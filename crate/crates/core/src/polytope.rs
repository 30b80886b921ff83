//! Spherical polytopes: pointed cones with their face lattice, links,
//! polar duals and the combinatorial classifiers.

use std::collections::{BTreeSet, HashSet};

use crate::cone::Cone;
use crate::linalg::{nullspace, rank, Matrix, Subspace};
use crate::lp;
use crate::scalar::{canon_ray, dot, lex_cmp, neg_vec, vec_eq, Scalar};

pub type Mask = u128;
pub const MAX_VERTICES: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error("not a polytope: the cone contains a line")]
    NotPointed,
    #[error("not a polytope: the cone is {0}")]
    Degenerate(&'static str),
    #[error("empty interior: the halfspaces cut out a cone of dimension {got}, expected {want}")]
    EmptyInterior { got: usize, want: usize },
    #[error("too many vertices ({0}); the face lattice supports at most {MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("face {0} is the polytope itself")]
    Improper(usize),
    #[error("face {0} is not a vertex")]
    NotAVertex(usize),
    #[error("face {0} is not contained in face {1}")]
    NotNested(usize, usize),
    #[error("polytope is not full-dimensional")]
    LowerDimensional,
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("no such face {0}")]
    NoFace(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    /// Spherical dimension; vertices have dimension 0.
    pub dim: usize,
    pub vertices: Mask,
    pub facets: Mask,
}

#[derive(Debug, Clone)]
pub struct Polytope<S: Scalar> {
    pub cone: Cone<S>,
    pub dim: usize,
    pub vertices: Vec<Vec<S>>,
    pub facets: Vec<Vec<S>>,
    pub faces: Vec<Face>,
    facet_face: Vec<usize>,
    vertex_face: Vec<usize>,
}

pub fn bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..MAX_VERTICES).filter(move |&i| m >> i & 1 == 1)
}

fn subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

impl<S: Scalar> Polytope<S> {
    /// An `n`-polytope in `S^n` from covectors in `S^(n+1)`.
    pub fn from_halfspaces(n: usize, hs: &[Vec<S>]) -> Result<Self, PolytopeError> {
        for h in hs {
            if h.len() != n + 1 {
                return Err(PolytopeError::Dimension(h.len(), n + 1));
            }
        }
        let cone = Cone::from_halfspaces(n + 1, hs);
        if !cone.is_pointed() {
            return Err(PolytopeError::NotPointed);
        }
        let got = cone.dim();
        if got != n + 1 {
            return Err(PolytopeError::EmptyInterior { got, want: n + 1 });
        }
        Self::from_cone(cone)
    }

    /// The polytope spanned by vertex rays; it may be lower-dimensional in
    /// its ambient space.
    pub fn from_vertices(rays: &[Vec<S>]) -> Result<Self, PolytopeError> {
        let Some(first) = rays.first() else {
            return Err(PolytopeError::Degenerate("empty"));
        };
        let ambient = first.len();
        if let Some(r) = rays.iter().find(|r| r.len() != ambient) {
            return Err(PolytopeError::Dimension(r.len(), ambient));
        }
        Self::from_cone(Cone::from_generators(ambient, rays, &[]))
    }

    pub fn from_cone(cone: Cone<S>) -> Result<Self, PolytopeError> {
        if !cone.is_pointed() {
            return Err(PolytopeError::NotPointed);
        }
        if cone.is_zero() {
            return Err(PolytopeError::Degenerate("the origin"));
        }
        let vertices = cone.generators.clone();
        if vertices.len() > MAX_VERTICES {
            return Err(PolytopeError::TooManyVertices(vertices.len()));
        }
        let dim = cone.dim() - 1;
        let all: Mask = if vertices.len() == MAX_VERTICES { !0 } else { (1 << vertices.len()) - 1 };
        let mut facets = Vec::new();
        let mut facet_masks = Vec::new();
        for u in cone.facets() {
            let m = mask_of(&vertices, |v| dot(u, v).is_zero());
            if m != 0 {
                facets.push(u.clone());
                facet_masks.push(m);
            }
        }
        let mut seen: HashSet<Mask> = facet_masks.iter().copied().collect();
        let mut queue: Vec<Mask> = facet_masks.clone();
        while let Some(m) = queue.pop() {
            for &f in &facet_masks {
                let x = m & f;
                if x != 0 && seen.insert(x) {
                    queue.push(x);
                }
            }
        }
        seen.insert(all);
        let mut faces: Vec<Face> = seen
            .into_iter()
            .map(|m| {
                let rows: Matrix<S> = bits(m).map(|i| vertices[i].clone()).collect();
                let fm = facet_masks
                    .iter()
                    .enumerate()
                    .filter(|(_, &f)| subset(m, f))
                    .fold(0 as Mask, |acc, (i, _)| acc | 1 << i);
                Face { dim: rank(&rows) - 1, vertices: m, facets: fm }
            })
            .collect();
        faces.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then_with(|| bits(a.vertices).collect::<Vec<_>>().cmp(&bits(b.vertices).collect()))
        });
        let facet_face = facet_masks
            .iter()
            .map(|&m| faces.iter().position(|f| f.vertices == m).unwrap())
            .collect();
        let vertex_face = (0..vertices.len())
            .map(|i| faces.iter().position(|f| f.vertices == 1 << i).unwrap())
            .collect();
        Ok(Polytope { cone, dim, vertices, facets, faces, facet_face, vertex_face })
    }

    pub fn ambient(&self) -> usize {
        self.cone.ambient
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim + 1 == self.ambient()
    }

    pub fn top(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn face(&self, f: usize) -> Result<&Face, PolytopeError> {
        self.faces.get(f).ok_or(PolytopeError::NoFace(f))
    }

    pub fn facet_face(&self, i: usize) -> usize {
        self.facet_face[i]
    }

    pub fn vertex_face(&self, i: usize) -> usize {
        self.vertex_face[i]
    }

    pub fn facet_mask(&self, i: usize) -> Mask {
        self.faces[self.facet_face[i]].vertices
    }

    /// Face ids of a given spherical dimension.
    pub fn faces_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.faces.len()).filter(|&i| self.faces[i].dim == d && i != self.top()).collect()
    }

    pub fn ridges(&self) -> Vec<usize> {
        if self.dim < 2 {
            return Vec::new();
        }
        self.faces_of_dim(self.dim - 2)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        if self.dim == 1 {
            return vec![(0, 1)];
        }
        self.faces_of_dim(1)
            .into_iter()
            .map(|f| {
                let v: Vec<usize> = bits(self.faces[f].vertices).collect();
                (v[0], v[1])
            })
            .collect()
    }

    /// Counts of proper faces by dimension `0..dim`.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..self.dim).map(|d| self.faces_of_dim(d).len()).collect()
    }

    /// The face with exactly this vertex set.
    pub fn face_by_mask(&self, m: Mask) -> Option<usize> {
        self.faces.iter().position(|f| f.vertices == m)
    }

    /// Facet indices containing the face.
    pub fn facets_of(&self, f: usize) -> Vec<usize> {
        bits(self.faces[f].facets).collect()
    }

    pub fn vertex_rays(&self, f: usize) -> Matrix<S> {
        bits(self.faces[f].vertices).map(|i| self.vertices[i].clone()).collect()
    }

    /// `L(f)`.
    pub fn face_span(&self, f: usize) -> Subspace<S> {
        Subspace::span(self.ambient(), &self.vertex_rays(f))
    }

    pub fn edge_neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (a, b) in self.edges() {
            if a == v {
                out.push(b);
            } else if b == v {
                out.push(a);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn vertex_index(&self, ray: &[S]) -> Option<usize> {
        let r = canon_ray(ray);
        self.vertices.iter().position(|v| vec_eq(v, &r))
    }

    /// `Lk(f;P) = P_f ∩ L(f)^⊥`, computed as the projection of `P` onto
    /// `L(f)^⊥`.
    pub fn link(&self, f: usize) -> Result<Polytope<S>, PolytopeError> {
        self.face(f)?;
        if f == self.top() {
            return Err(PolytopeError::Improper(f));
        }
        let perp = self.face_span(f).orthogonal_complement();
        let rays: Matrix<S> = (0..self.vertices.len())
            .filter(|&i| self.faces[f].vertices >> i & 1 == 0)
            .map(|i| perp.project(&self.vertices[i]))
            .collect();
        Polytope::from_cone(Cone::from_generators(self.ambient(), &rays, &[]))
    }

    /// `f_(e;P) = Lk(e;P) ∩ L(f)` as a face id of `link(e)`.
    pub fn face_in_link(&self, e: usize, f: usize) -> Result<usize, PolytopeError> {
        let fe = self.face(e)?.vertices;
        let ff = self.face(f)?.vertices;
        if e == self.top() {
            return Err(PolytopeError::Improper(e));
        }
        if !subset(fe, ff) || fe == ff {
            return Err(PolytopeError::NotNested(e, f));
        }
        let lk = self.link(e)?;
        let perp = self.face_span(e).orthogonal_complement();
        let rays: Matrix<S> = bits(ff & !fe).map(|i| perp.project(&self.vertices[i])).collect();
        let sub = Cone::from_generators(self.ambient(), &rays, &[]);
        let mut m: Mask = 0;
        for g in &sub.generators {
            let i = lk.vertex_index(g).expect("projected extreme ray is a vertex of the link");
            m |= 1 << i;
        }
        Ok(lk.face_by_mask(m).expect("face of the link"))
    }

    /// Polar dual `P*`; vertices of `P*` are the facet covectors of `P`.
    pub fn dual(&self) -> Result<Polytope<S>, PolytopeError> {
        if !self.is_full_dimensional() {
            return Err(PolytopeError::LowerDimensional);
        }
        Polytope::from_cone(self.cone.dual())
    }

    /// A triangularity pair `(e, f)`: a ridge `e` and a face `f` with
    /// `res(e;∂P) ∩ f` disconnected.
    pub fn is_triangular(&self) -> Option<(usize, usize)> {
        if self.dim < 2 {
            return None;
        }
        let top = self.top();
        for e in self.ridges() {
            let fs = self.facets_of(e);
            debug_assert_eq!(fs.len(), 2);
            let (s1, s2) = (self.facet_mask(fs[0]), self.facet_mask(fs[1]));
            for f in 0..top {
                let fm = self.faces[f].vertices;
                // cells of the subcomplex (σ1 ∪ σ2) ∩ f
                let cells: Vec<usize> = (0..top)
                    .filter(|&g| {
                        let gm = self.faces[g].vertices;
                        subset(gm, fm) && (subset(gm, s1) || subset(gm, s2))
                    })
                    .collect();
                if components(&cells, |a, b| {
                    let (ma, mb) = (self.faces[a].vertices, self.faces[b].vertices);
                    subset(ma, mb) || subset(mb, ma)
                }) >= 2
                {
                    return Some((e, f));
                }
            }
        }
        None
    }

    /// A facet meeting every facet.
    pub fn is_cone_like(&self) -> Option<usize> {
        if self.dim < 2 {
            return None;
        }
        let m = self.facets.len();
        (0..m).find(|&s| (0..m).all(|t| self.facet_mask(s) & self.facet_mask(t) != 0))
    }

    /// A cutting covector `u`: no vertex on `u = 0` and every vertex has an
    /// edge-neighbour on the other side.
    pub fn is_thin(&self) -> Option<Vec<S>> {
        let nv = self.vertices.len();
        let nbr: Vec<Mask> = (0..nv)
            .map(|v| self.edge_neighbors(v).into_iter().fold(0, |a, w| a | 1 << w))
            .collect();
        let edge_ok = |s: Mask| {
            (0..nv).all(|v| {
                if s >> v & 1 == 1 {
                    nbr[v] & !s != 0
                } else {
                    nbr[v] & s != 0
                }
            })
        };
        let full: Mask = (1 << nv) - 1;
        let mut tried: HashSet<Mask> = HashSet::new();
        let mut check = |s: Mask| -> Option<Vec<S>> {
            let s = if s & 1 == 0 { full & !s } else { s };
            if s == full || !tried.insert(s) || !edge_ok(s) {
                return None;
            }
            self.separate(s)
        };
        if nv <= 20 {
            for s in 1..full {
                if s & 1 == 1 {
                    if let Some(u) = check(s) {
                        return Some(u);
                    }
                }
            }
            return None;
        }
        // Every strictly separable split is a perturbation of a hyperplane
        // through `dim` independent vertex rays.
        let n = self.dim;
        let mut combo: Vec<usize> = (0..n).collect();
        loop {
            let rows: Matrix<S> = combo.iter().map(|&i| self.vertices[i].clone()).collect();
            if rank(&rows) == n {
                let h = &nullspace(&rows, self.ambient())[0];
                let mut base: Mask = 0;
                let mut on: Vec<usize> = Vec::new();
                for (i, v) in self.vertices.iter().enumerate() {
                    let d = dot(h, v);
                    if d.is_neg() {
                        base |= 1 << i;
                    } else if d.is_zero() {
                        on.push(i);
                    }
                }
                if on.len() <= 16 {
                    for pick in 0u32..1 << on.len() {
                        let mut s = base;
                        for (k, &i) in on.iter().enumerate() {
                            if pick >> k & 1 == 1 {
                                s |= 1 << i;
                            }
                        }
                        if s != 0 && s != full {
                            if let Some(u) = check(s) {
                                return Some(u);
                            }
                        }
                    }
                }
            }
            if !next_combination(&mut combo, nv) {
                return None;
            }
        }
    }

    /// A covector negative on the vertices in `s` and positive elsewhere.
    pub fn separate(&self, s: Mask) -> Option<Vec<S>> {
        let minus_one = S::one().neg();
        let ub: Vec<(Vec<S>, S)> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if s >> i & 1 == 1 {
                    (v.clone(), minus_one.clone())
                } else {
                    (neg_vec(v), minus_one.clone())
                }
            })
            .collect();
        lp::feasible(self.ambient(), &ub, &[])
    }

    /// For each edge `e*` of `P*`, `st(e*;∂P*) \ res(e*;∂P*)` must be
    /// disconnected. Equals `!is_triangular()`.
    pub fn dual_triangularity_criterion(&self) -> Result<bool, PolytopeError> {
        let d = self.dual()?;
        let top = d.top();
        for e in d.faces_of_dim(1) {
            let em = d.faces[e].vertices;
            let st: Vec<Mask> =
                (0..d.facets.len()).map(|i| d.facet_mask(i)).filter(|&m| m & em != 0).collect();
            let res: Vec<Mask> = st.iter().copied().filter(|&m| subset(em, m)).collect();
            let open: Vec<usize> = (0..top)
                .filter(|&g| {
                    let gm = d.faces[g].vertices;
                    st.iter().any(|&m| subset(gm, m)) && !res.iter().any(|&m| subset(gm, m))
                })
                .collect();
            let c = components(&open, |a, b| {
                let (ma, mb) = (d.faces[a].vertices, d.faces[b].vertices);
                subset(ma, mb) || subset(mb, ma)
            });
            if c < 2 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn pavilion(&self, v: usize) -> Result<Pavilion<S>, PolytopeError> {
        if v >= self.faces.len() {
            return Err(PolytopeError::NoFace(v));
        }
        if self.faces[v].dim != 0 || v == self.top() {
            return Err(PolytopeError::NotAVertex(v));
        }
        if !self.is_full_dimensional() {
            return Err(PolytopeError::LowerDimensional);
        }
        let vi = bits(self.faces[v].vertices).next().unwrap();
        let neighbors = self.edge_neighbors(vi);
        let mut gens = vec![neg_vec(&self.vertices[vi])];
        gens.extend(neighbors.iter().map(|&w| self.vertices[w].clone()));
        let pv = Cone::from_generators(self.ambient(), &gens, &[]);
        Ok(Pavilion { vertex: vi, neighbors, degenerate: !pv.is_full_dimensional(), p_v: pv })
    }

    /// Does the hyperplane `h = 0` meet every pavilion.
    pub fn pavilion_hyperplane_test(&self, h: &[S]) -> Result<bool, PolytopeError> {
        for v in self.faces_of_dim(0) {
            if !self.pavilion(v)?.meets_hyperplane(self, h) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `pv(v;P) = P° \ P(v)°` with `P(v) = conv({-v} ∪ V(v))`.
#[derive(Debug, Clone)]
pub struct Pavilion<S: Scalar> {
    pub vertex: usize,
    pub neighbors: Vec<usize>,
    pub p_v: Cone<S>,
    /// `P(v)` has empty interior, so the pavilion is all of `P°`.
    pub degenerate: bool,
}

impl<S: Scalar> Pavilion<S> {
    pub fn contains(&self, p: &Polytope<S>, x: &[S]) -> bool {
        p.cone.contains_in_interior(x) && !(!self.degenerate && self.p_v.contains_in_interior(x))
    }

    /// Points of `P°` lying on `∂P(v)`.
    pub fn base_contains(&self, p: &Polytope<S>, x: &[S]) -> bool {
        p.cone.contains_in_interior(x)
            && self.p_v.contains(x)
            && !self.p_v.contains_in_interior(x)
    }

    /// Closure membership. The closure of `P° \ P(v)°` is the union of the
    /// pieces `P ∩ {g >= 0}` over facets `g` of `P(v)` that meet `P°`
    /// on their positive side.
    pub fn closure_contains(&self, p: &Polytope<S>, x: &[S]) -> bool {
        if !p.cone.contains(x) {
            return false;
        }
        if self.degenerate {
            return true;
        }
        self.p_v.halfspaces.iter().any(|g| {
            !dot(g, x).is_neg() && {
                let mut lt = p.cone.halfspaces.clone();
                lt.push(neg_vec(g));
                lp::homogeneous(p.ambient(), &lt, &[], &[]).is_some()
            }
        })
    }

    pub fn meets_hyperplane(&self, p: &Polytope<S>, h: &[S]) -> bool {
        let lt = p.cone.halfspaces.clone();
        if self.degenerate {
            return lp::homogeneous(p.ambient(), &lt, &[], &[h.to_vec()]).is_some();
        }
        self.p_v.halfspaces.iter().any(|g| {
            lp::homogeneous(p.ambient(), &lt, &[neg_vec(g)], &[h.to_vec()]).is_some()
        })
    }
}

fn mask_of<S: Scalar>(vs: &[Vec<S>], pred: impl Fn(&Vec<S>) -> bool) -> Mask {
    vs.iter().enumerate().filter(|(_, v)| pred(v)).fold(0, |a, (i, _)| a | 1 << i)
}

/// Number of connected components of `items` under `adj`, by union-find.
pub fn components(items: &[usize], adj: impl Fn(usize, usize) -> bool) -> usize {
    let mut parent: Vec<usize> = (0..items.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for a in 0..items.len() {
        for b in a + 1..items.len() {
            if adj(items[a], items[b]) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let roots: BTreeSet<usize> = (0..items.len()).map(|i| find(&mut parent, i)).collect();
    roots.len()
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Sorted comparison helper used by callers that key faces by rays.
pub fn sort_rays<S: Scalar>(mut rays: Matrix<S>) -> Matrix<S> {
    rays.sort_by(|a, b| lex_cmp(a, b));
    rays
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::linalg::solve;
    use crate::scalar::{qvec, Q};

    // Brute-force face lattice straight from a halfspace list: a vertex
    // set is a face iff it is the tight set of the facets tight on it.
    fn brute_f_vector(hs: &[Vec<Q>], n: usize) -> Vec<usize> {
        let verts = brute_vertices(hs, n);
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for sub in 1u32..1 << hs.len() {
            let tight: Vec<usize> = (0..verts.len())
                .filter(|&v| (0..hs.len()).all(|i| sub >> i & 1 == 0 || dot(&hs[i], &verts[v]).is_zero()))
                .collect();
            if !tight.is_empty() && tight.len() < verts.len() {
                faces.insert(tight);
            }
        }
        let mut fv = vec![0; n];
        for f in faces {
            let rows: Vec<Vec<Q>> = f.iter().map(|&v| verts[v].clone()).collect();
            fv[rank(&rows) - 1] += 1;
        }
        fv
    }

    // Vertices as solutions of every n-subset of the facet equations.
    fn brute_vertices(hs: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
        let mut out: Vec<Vec<Q>> = Vec::new();
        let mut c: Vec<usize> = (0..n).collect();
        loop {
            let mut a: Vec<Vec<Q>> = c.iter().map(|&i| hs[i].clone()).collect();
            let mut e = vec![Q::zero(); n + 1];
            e[n] = Q::one();
            a.push(e);
            let mut b = vec![Q::zero(); n];
            b.push(Q::one());
            if let Some(x) = solve(&a, &b) {
                if hs.iter().all(|u| !dot(u, &x).is_pos()) && !out.contains(&x) {
                    out.push(x);
                }
            }
            if !next_combination(&mut c, hs.len()) {
                break;
            }
        }
        out
    }

    fn cube_halfspaces() -> Vec<Vec<Q>> {
        let mut hs = Vec::new();
        for i in 0..3 {
            let mut lo = qvec(&[0, 0, 0, 0]);
            lo[i] = Q::from_i64(-1);
            let mut hi = qvec(&[0, 0, 0, -1]);
            hi[i] = Q::from_i64(1);
            hs.push(lo);
            hs.push(hi);
        }
        hs
    }

    #[test]
    fn square_from_halfspaces() {
        let hs = vec![qvec(&[-1, 0, 0]), qvec(&[0, -1, 0]), qvec(&[1, 0, -1]), qvec(&[0, 1, -1])];
        let p = Polytope::from_halfspaces(2, &hs).unwrap();
        assert_eq!(p.facets.len(), 4);
        assert_eq!(p.vertices.len(), 4);
        assert_eq!(triangle().f_vector(), vec![3, 3]);
    }

    #[test]
    fn cube_f_vector_matches_brute_force() {
        let hs = cube_halfspaces();
        let p = Polytope::from_halfspaces(3, &hs).unwrap();
        assert_eq!(p.f_vector(), brute_f_vector(&hs, 3));
        assert_eq!(p.f_vector(), vec![8, 12, 6]);
    }

    #[test]
    fn pentagon_vertices_match_brute_force() {
        let p = pentagon();
        let brute = brute_vertices(&p.facets, 2);
        assert_eq!(brute.len(), 5);
        for v in brute {
            assert!(p.vertex_index(&v).is_some());
        }
    }

    #[test]
    fn rejects_bad_input() {
        let half = vec![qvec(&[-1, 0, 0])];
        assert_eq!(Polytope::from_halfspaces(2, &half).unwrap_err(), PolytopeError::NotPointed);
        let flat = vec![qvec(&[1, 0, 0]), qvec(&[-1, 0, 0]), qvec(&[0, -1, 0]), qvec(&[0, 0, -1])];
        assert!(matches!(
            Polytope::from_halfspaces(2, &flat),
            Err(PolytopeError::EmptyInterior { .. })
        ));
    }

    #[test]
    fn links() {
        let sq = square();
        let lk = sq.link(sq.facet_face(0)).unwrap();
        assert_eq!(lk.dim, 0);
        let lk = sq.link(sq.vertex_face(0)).unwrap();
        assert_eq!(lk.dim, 1);
        assert_eq!(lk.vertices.len(), 2);
        assert!(sq.link(sq.top()).is_err());
        let c = cube();
        let e = c.faces_of_dim(1)[0];
        let lk = c.link(e).unwrap();
        assert_eq!((lk.dim, lk.vertices.len()), (1, 2));
        // the arc endpoints are the projections of the two incident squares
        for s in c.facets_of(e) {
            let f = c.facet_face(s);
            let fe = c.face_in_link(e, f).unwrap();
            assert_eq!(lk.faces[fe].dim, 0);
            assert!(lk.facets.len() == 2 && lk.faces[fe].facets.count_ones() == 1);
        }
    }

    #[test]
    fn face_in_link_square() {
        let sq = square();
        let v = sq.vertex_face(0);
        let lk = sq.link(v).unwrap();
        for e in sq.faces_of_dim(1) {
            if sq.faces[e].vertices & 1 == 1 {
                let fe = sq.face_in_link(v, e).unwrap();
                assert_eq!(lk.faces[fe].dim, 0);
            }
        }
        let far = sq.faces_of_dim(1).into_iter().find(|&e| sq.faces[e].vertices & 1 == 0).unwrap();
        assert_eq!(sq.face_in_link(v, far), Err(PolytopeError::NotNested(v, far)));
    }

    #[test]
    fn duals() {
        let d = cube().dual().unwrap();
        assert_eq!(d.f_vector(), vec![6, 12, 8]);
        assert_eq!(pentagon().dual().unwrap().f_vector(), vec![5, 5]);
        let d = square_pyramid().dual().unwrap();
        assert_eq!((d.vertices.len(), d.facets.len()), (5, 5));
        let p = square_pyramid();
        let dd = d.dual().unwrap();
        assert!(dd.cone.equal(&p.cone));
        // incidence anti-isomorphism: vertex i of P* lies on facet j of P*
        // iff facet i of P contains vertex j of P
        for i in 0..p.facets.len() {
            let vi = d.vertex_index(&p.facets[i]).unwrap();
            for j in 0..p.vertices.len() {
                let fj = d.facets.iter().position(|u| vec_eq(u, &p.vertices[j])).unwrap();
                assert_eq!(d.facet_mask(fj) >> vi & 1, p.facet_mask(i) >> j & 1);
            }
        }
        assert_eq!(square().link(0).unwrap().dual().unwrap_err(), PolytopeError::LowerDimensional);
    }

    #[test]
    fn classifiers_2d() {
        assert!(triangle().is_triangular().is_some());
        assert!(triangle().is_cone_like().is_some());
        assert!(triangle().is_thin().is_some());
        assert!(square().is_triangular().is_none());
        assert!(square().is_cone_like().is_none());
        assert!(square().is_thin().is_some());
        for p in [pentagon(), hexagon()] {
            assert!(p.is_triangular().is_none());
            assert!(p.is_thin().is_none());
        }
    }

    #[test]
    fn classifiers_3d() {
        let pyr = square_pyramid();
        assert!(pyr.is_triangular().is_some());
        assert!(pyr.is_cone_like().is_some());
        let base = (0..5).find(|&i| pyr.facet_mask(i).count_ones() == 4).unwrap();
        assert!((0..5).all(|i| pyr.facet_mask(i) & pyr.facet_mask(base) != 0));
        for p in [cube(), octahedron(), pentagonal_prism()] {
            assert!(p.is_triangular().is_none());
            assert!(p.is_thin().is_some());
        }
        assert!(pyr.is_thin().is_some());
        assert!(tetrahedron().is_thin().is_some());
    }

    #[test]
    fn truncated_cube_is_triangular_not_cone_like() {
        let t = truncated_cube();
        assert_eq!(t.f_vector(), vec![24, 36, 14]);
        assert!(t.is_cone_like().is_none());
        assert!(t.is_triangular().is_some());
    }

    // A pair (e, f) is triangular iff f meets both facets through e but
    // not e itself.
    fn triangular_oracle(p: &Polytope<Q>) -> bool {
        p.ridges().into_iter().any(|e| {
            let fs = p.facets_of(e);
            let (a, b) = (p.facet_mask(fs[0]), p.facet_mask(fs[1]));
            (0..p.top()).any(|f| {
                let m = p.faces[f].vertices;
                m & a & !b != 0 && m & b & !a != 0 && m & a & b == 0
            })
        })
    }

    #[test]
    fn triangularity_and_dual_criterion_agree() {
        for (name, p) in polytope_catalog() {
            let t = p.is_triangular().is_some();
            assert_eq!(t, triangular_oracle(&p), "{name}");
            assert_eq!(p.dual_triangularity_criterion().unwrap(), !t, "{name}");
            if p.is_cone_like().is_some() {
                assert!(t, "{name}");
            }
        }
    }

    #[test]
    fn thin_witness_is_a_cutting_plane() {
        for (name, p) in polytope_catalog() {
            if let Some(u) = p.is_thin() {
                let side: Vec<bool> = p.vertices.iter().map(|v| dot(&u, v).is_neg()).collect();
                assert!(p.vertices.iter().all(|v| !dot(&u, v).is_zero()), "{name}");
                for v in 0..p.vertices.len() {
                    assert!(p.edge_neighbors(v).iter().any(|&w| side[w] != side[v]), "{name}");
                }
            }
        }
    }

    #[test]
    fn pavilions_square() {
        let sq = square();
        for v in sq.faces_of_dim(0) {
            let pv = sq.pavilion(v).unwrap();
            let vi = pv.vertex;
            assert!(pv.closure_contains(&sq, &sq.vertices[vi]));
            let (a, b) = (&sq.vertices[pv.neighbors[0]], &sq.vertices[pv.neighbors[1]]);
            // chord through the neighbours, positive on the side of v
            let mut chord = crate::linalg::nullspace(&[a.clone(), b.clone()], 3).remove(0);
            if dot(&chord, &sq.vertices[vi]).is_neg() {
                chord = neg_vec(&chord);
            }
            for x in 0..=8 {
                for y in 0..=8 {
                    let pt = vec![Q::new(x.into(), 8.into()), Q::new(y.into(), 8.into()), Q::one()];
                    let want = sq.cone.contains_in_interior(&pt) && !dot(&chord, &pt).is_neg();
                    assert_eq!(pv.contains(&sq, &pt), want, "{pt:?}");
                }
            }
        }
        assert!(sq.pavilion(sq.facet_face(0)).is_err());
    }

    #[test]
    fn pavilion_hyperplanes() {
        let sq = square();
        // the line x = y meets the pavilions at (1,0) and (0,1) only if it
        // passes their interiors; x + y = 1 does
        let h = qvec(&[1, 1, -1]);
        assert!(sq.pavilion_hyperplane_test(&h).unwrap());
        assert!(sq.is_thin().is_some());
        let eq = qvec(&[0, 0, 1]);
        assert!(!sq.pavilion_hyperplane_test(&eq).unwrap());
        // pentagon: no separable-bipartition hyperplane meets every pavilion
        let p = pentagon();
        let full: Mask = (1 << 5) - 1;
        for s in 1..full {
            if let Some(u) = p.separate(s) {
                assert!(!p.pavilion_hyperplane_test(&u).unwrap());
            }
        }
    }

    #[test]
    fn pentagon_pavilion_is_beyond_the_chord() {
        let p = pentagon();
        let pv = p.pavilion(p.vertex_face(0)).unwrap();
        assert!(!pv.degenerate);
        let c = p.vertices.iter().fold(vec![Q::zero(); 3], |a, v| crate::scalar::add(&a, v));
        assert!(!pv.contains(&p, &c));
        let near = crate::scalar::add(&crate::scalar::scale(&p.vertices[pv.vertex], &Q::from_i64(50)), &c);
        assert!(pv.contains(&p, &near));
    }
}
