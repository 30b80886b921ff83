//! Gluing specifications: polytopes with a projective facet-pairing, their
//! validity, ridge cycles, the Poincaré-type conditions and residual
//! convexity of the facet unions.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cone::Cone;
use crate::linalg::{Matrix, Subspace};
use crate::polytope::{bits, Mask, Polytope};
use crate::scalar::{canon_ray, dot, lex_cmp, vec_eq, Scalar};
use crate::transform::{Transform, TransformError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FacetId {
    pub polytope: usize,
    pub facet: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RidgeId {
    pub polytope: usize,
    /// Face id in the polytope's lattice.
    pub face: usize,
}

#[derive(Debug, Clone)]
pub struct Pairing<S: Scalar> {
    pub target: FacetId,
    pub map: Transform<S>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("polytope {0} has dimension {1}, expected {2}")]
    Dimension(usize, usize, usize),
    #[error("no polytope {0}")]
    UnknownPolytope(usize),
    #[error("polytope {0} has no facet {1}")]
    UnknownFacet(usize, usize),
    #[error("pairing from {0:?}: {1}")]
    Transform(FacetId, TransformError),
    #[error("spec is not valid: {0} violation(s)")]
    Invalid(usize),
    #[error("ridge cycle through {0:?} does not close")]
    OpenCycle(RidgeId),
}

#[derive(Debug, Clone)]
pub struct GluingSpec<S: Scalar> {
    pub dimension: usize,
    pub names: Vec<String>,
    pub polytopes: Vec<Polytope<S>>,
    pub pairings: BTreeMap<FacetId, Pairing<S>>,
    /// Facets listed more than once with disagreeing data.
    pub duplicates: BTreeSet<FacetId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "facet", rename_all = "snake_case")]
pub enum Violation {
    Unpaired(FacetId),
    Duplicate(FacetId),
    /// `φ_σ(σ) ≠ σ'`.
    FacetMismatch(FacetId),
    /// `φ_σ(P) ∩ P' ≠ σ'`.
    NotAdjacent(FacetId),
    /// `φ_σ' ≠ φ_σ^{-1}`.
    NotInverse(FacetId),
    /// `φ_σ(σ) = σ`: an orbifold point, not a manifold.
    Orbifold(FacetId),
}

impl<S: Scalar> GluingSpec<S> {
    /// Pairings given as `(σ, σ', M)`. A missing reverse direction is
    /// filled with `M^{-1}`.
    pub fn new(
        dimension: usize,
        polytopes: Vec<(String, Polytope<S>)>,
        pairings: Vec<(FacetId, FacetId, Matrix<S>)>,
    ) -> Result<Self, SpecError> {
        let mut names = Vec::new();
        let mut ps = Vec::new();
        for (i, (name, p)) in polytopes.into_iter().enumerate() {
            if p.dim != dimension || !p.is_full_dimensional() {
                return Err(SpecError::Dimension(i, p.dim, dimension));
            }
            names.push(name);
            ps.push(p);
        }
        let check = |f: FacetId| -> Result<(), SpecError> {
            let p = ps.get(f.polytope).ok_or(SpecError::UnknownPolytope(f.polytope))?;
            if f.facet >= p.facets.len() {
                return Err(SpecError::UnknownFacet(f.polytope, f.facet));
            }
            Ok(())
        };
        let mut map: BTreeMap<FacetId, Pairing<S>> = BTreeMap::new();
        let mut duplicates = BTreeSet::new();
        let mut given = Vec::new();
        for (from, to, m) in pairings {
            check(from)?;
            check(to)?;
            let t = Transform::new(m).map_err(|e| SpecError::Transform(from, e))?;
            if t.size() != dimension + 1 {
                return Err(SpecError::Transform(from, TransformError::NotSquare(t.size(), dimension + 1)));
            }
            match map.get(&from) {
                Some(old) if old.target != to || !old.map.equals(&t) => {
                    duplicates.insert(from);
                }
                Some(_) => {}
                None => {
                    map.insert(from, Pairing { target: to, map: t.clone() });
                }
            }
            given.push((from, to, t));
        }
        for (from, to, t) in given {
            map.entry(to).or_insert(Pairing { target: from, map: t.inverse() });
        }
        Ok(GluingSpec { dimension, names, polytopes: ps, pairings: map, duplicates })
    }

    pub fn facets(&self) -> Vec<FacetId> {
        let mut out = Vec::new();
        for (p, poly) in self.polytopes.iter().enumerate() {
            for f in 0..poly.facets.len() {
                out.push(FacetId { polytope: p, facet: f });
            }
        }
        out
    }

    pub fn ridges(&self) -> Vec<RidgeId> {
        let mut out = Vec::new();
        for (p, poly) in self.polytopes.iter().enumerate() {
            for e in poly.ridges() {
                out.push(RidgeId { polytope: p, face: e });
            }
        }
        out
    }

    pub fn polytope_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for s in self.facets() {
            if self.duplicates.contains(&s) {
                out.push(Violation::Duplicate(s));
            }
            let Some(pair) = self.pairings.get(&s) else {
                out.push(Violation::Unpaired(s));
                continue;
            };
            let t = pair.target;
            if t == s {
                out.push(Violation::Orbifold(s));
            }
            let (p, q) = (&self.polytopes[s.polytope], &self.polytopes[t.polytope]);
            let img: Vec<Vec<S>> =
                bits(p.facet_mask(s.facet)).map(|i| pair.map.apply(&p.vertices[i])).collect();
            if image_mask(q, &img) != Some(q.facet_mask(t.facet)) {
                out.push(Violation::FacetMismatch(s));
            } else {
                let moved = pair.map.apply_cone(&p.cone);
                let sigma = Cone::from_generators(q.ambient(), &q.vertex_rays(q.facet_face(t.facet)), &[]);
                if !moved.intersect(&q.cone).equal(&sigma) {
                    out.push(Violation::NotAdjacent(s));
                }
            }
            match self.pairings.get(&t) {
                Some(back) if back.target == s && back.map.equals(&pair.map.inverse()) => {}
                _ => out.push(Violation::NotInverse(s)),
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// The face of the target polytope that `φ_σ` carries `f` onto.
    pub fn carry(&self, s: FacetId, f: usize) -> Option<usize> {
        let pair = &self.pairings[&s];
        let p = &self.polytopes[s.polytope];
        let q = &self.polytopes[pair.target.polytope];
        let img: Vec<Vec<S>> =
            bits(p.faces[f].vertices).map(|i| pair.map.apply(&p.vertices[i])).collect();
        q.face_by_mask(image_mask(q, &img)?)
    }

    /// Ridge cycles, one per class, each seeded at its least ridge crossing
    /// its lexicographically smaller facet first.
    pub fn ridge_cycles(&self) -> Result<Vec<RidgeCycle<S>>, SpecError> {
        let v = self.validate();
        if !v.is_empty() {
            return Err(SpecError::Invalid(v.len()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for r in self.ridges() {
            if seen.contains(&r) {
                continue;
            }
            let s = self.polytopes[r.polytope].facets_of(r.face)[0];
            let c = self.cycle_from(r, FacetId { polytope: r.polytope, facet: s })?;
            seen.extend(c.steps.iter().map(|st| st.ridge));
            out.push(c);
        }
        Ok(out)
    }

    /// The cycle through ridge `e`, starting by crossing facet `s ∋ e`.
    pub fn cycle_from(&self, e: RidgeId, s: FacetId) -> Result<RidgeCycle<S>, SpecError> {
        let limit = 2 * self.ridges().len() + 2;
        let mut steps: Vec<CycleStep> = Vec::new();
        let (mut ridge, mut exit) = (e, s);
        let mut h = Transform::identity(self.dimension + 1);
        loop {
            let pair = &self.pairings[&exit];
            let face = self.carry(exit, ridge.face).ok_or(SpecError::OpenCycle(e))?;
            steps.push(CycleStep { ridge, exit, entry: pair.target });
            h = pair.map.compose(&h);
            let q = pair.target.polytope;
            let next_ridge = RidgeId { polytope: q, face };
            let others: Vec<usize> = self.polytopes[q]
                .facets_of(face)
                .into_iter()
                .filter(|&f| f != pair.target.facet)
                .collect();
            let next_exit = FacetId { polytope: q, facet: *others.first().ok_or(SpecError::OpenCycle(e))? };
            if next_ridge == e && next_exit == s {
                break;
            }
            ridge = next_ridge;
            exit = next_exit;
            if steps.len() > limit {
                return Err(SpecError::OpenCycle(e));
            }
        }
        Ok(RidgeCycle { steps, holonomy: h })
    }

    pub fn poincare_check(&self) -> Result<Vec<PoincareReport>, SpecError> {
        Ok(self.ridge_cycles()?.iter().map(|c| self.poincare_cycle(c)).collect())
    }

    /// Conditions (1) `h(e) = id` and (2) the developed link cones tile the
    /// plane `L(e)^⊥`.
    pub fn poincare_cycle(&self, c: &RidgeCycle<S>) -> PoincareReport {
        let seed = c.steps[0].ridge;
        let p0 = &self.polytopes[seed.polytope];
        let plane = plane_basis(&p0.face_span(seed.face));
        let e_rays = sorted(p0.vertex_rays(seed.face));
        let mut g = Transform::identity(self.dimension + 1);
        let mut wedges = Vec::new();
        let mut aligned = true;
        for st in &c.steps {
            let p = &self.polytopes[st.ridge.polytope];
            let here = sorted(p.vertex_rays(st.ridge.face).iter().map(|v| g.apply(v)).collect());
            aligned &= here.len() == e_rays.len() && here.iter().zip(&e_rays).all(|(a, b)| vec_eq(a, b));
            let gens: Vec<Vec<S>> = p.vertices.iter().map(|v| to_plane(&plane, &g.apply(v))).collect();
            wedges.push(Cone::from_generators(2, &gens, &[]));
            g = g.compose(&self.pairings[&st.exit].map.inverse());
        }
        PoincareReport {
            seed,
            period: c.steps.len(),
            holonomy_identity: c.holonomy.is_identity(),
            link_is_circle: aligned && tiles_plane(&wedges),
        }
    }

    /// Convexity of `φ_σ(P) ∪ P'` for every facet, by ridge links and by
    /// the direct supporting-facet test.
    pub fn residual_convexity(&self) -> Vec<FacetConvexity> {
        let mut out = Vec::new();
        for s in self.facets() {
            let Some(pair) = self.pairings.get(&s) else { continue };
            let t = pair.target;
            let p = &self.polytopes[s.polytope];
            let q = &self.polytopes[t.polytope];
            let a_gens: Vec<Vec<S>> = p.vertices.iter().map(|v| pair.map.apply(v)).collect();
            let a_facets: Vec<Vec<S>> = (0..p.facets.len())
                .filter(|&i| i != s.facet)
                .map(|i| pair.map.apply_covector(&p.facets[i]))
                .collect();
            let sig = q.facet_mask(t.facet);
            let mut ridge_link = true;
            for e in q.ridges() {
                if q.faces[e].vertices & !sig != 0 {
                    continue;
                }
                let plane = plane_basis(&q.face_span(e));
                let mut pts: Vec<Vec<S>> = a_gens.iter().map(|v| to_plane(&plane, v)).collect();
                pts.extend(q.vertices.iter().map(|v| to_plane(&plane, v)));
                ridge_link &= !is_whole_plane(&pts);
            }
            let direct = a_facets.iter().all(|u| q.vertices.iter().all(|v| !dot(u, v).is_pos()))
                && (0..q.facets.len())
                    .filter(|&j| j != t.facet)
                    .all(|j| a_gens.iter().all(|v| !dot(&q.facets[j], v).is_pos()));
            out.push(FacetConvexity { facet: s, ridge_link, direct });
        }
        out
    }

    /// Hypothesis (I): triangular cells with their witnesses.
    pub fn triangular_scan(&self) -> Vec<(usize, Option<(usize, usize)>)> {
        self.polytopes.iter().enumerate().map(|(i, p)| (i, p.is_triangular())).collect()
    }

    /// Hypothesis (II): which cells have a thick dual.
    pub fn thickness_scan(&self) -> Vec<(usize, bool)> {
        self.polytopes
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.dual().map(|d| d.is_thin().is_none()).unwrap_or(false)))
            .collect()
    }

    /// The same complex seen through `g`: polytopes moved by `g`, pairings
    /// conjugated.
    pub fn conjugate(&self, g: &Transform<S>) -> Self {
        let polytopes: Vec<Polytope<S>> = self
            .polytopes
            .iter()
            .map(|p| Polytope::from_cone(g.apply_cone(&p.cone)).expect("image of a polytope"))
            .collect();
        let renum = |f: FacetId| -> FacetId {
            let u = g.apply_covector(&self.polytopes[f.polytope].facets[f.facet]);
            let facet = polytopes[f.polytope]
                .facets
                .iter()
                .position(|w| vec_eq(w, &u))
                .expect("facet image");
            FacetId { polytope: f.polytope, facet }
        };
        let gi = g.inverse();
        let duplicates = self.duplicates.iter().map(|&f| renum(f)).collect();
        let pairings = self
            .pairings
            .iter()
            .map(|(s, pr)| {
                (renum(*s), Pairing { target: renum(pr.target), map: g.compose(&pr.map).compose(&gi) })
            })
            .collect();
        GluingSpec {
            dimension: self.dimension,
            names: self.names.clone(),
            polytopes,
            pairings,
            duplicates,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CycleStep {
    pub ridge: RidgeId,
    pub exit: FacetId,
    pub entry: FacetId,
}

#[derive(Debug, Clone)]
pub struct RidgeCycle<S: Scalar> {
    pub steps: Vec<CycleStep>,
    /// `h(e) = φ_{σ_r} ∘ ⋯ ∘ φ_{σ_1}`.
    pub holonomy: Transform<S>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoincareReport {
    pub seed: RidgeId,
    pub period: usize,
    pub holonomy_identity: bool,
    pub link_is_circle: bool,
}

impl PoincareReport {
    pub fn passes(&self) -> bool {
        self.holonomy_identity && self.link_is_circle
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FacetConvexity {
    pub facet: FacetId,
    pub ridge_link: bool,
    pub direct: bool,
}

/// Vertex mask of `q` hit exactly by the rays `img`, if every ray is a
/// vertex of `q`.
pub fn image_mask<S: Scalar>(q: &Polytope<S>, img: &[Vec<S>]) -> Option<Mask> {
    let mut m: Mask = 0;
    for r in img {
        m |= 1 << q.vertex_index(r)?;
    }
    Some(m)
}

fn sorted<S: Scalar>(mut v: Matrix<S>) -> Matrix<S> {
    v.sort_by(|a, b| lex_cmp(a, b));
    v
}

/// Rows spanning `L^⊥`, which is 2-dimensional for a ridge.
pub fn plane_basis<S: Scalar>(l: &Subspace<S>) -> Matrix<S> {
    l.orthogonal_complement().basis
}

/// Coordinates `(b_1 · x, b_2 · x)`: a linear isomorphism of `L^⊥` onto
/// the plane that kills `L`.
pub fn to_plane<S: Scalar>(basis: &[Vec<S>], x: &[S]) -> Vec<S> {
    basis.iter().map(|b| dot(b, x)).collect()
}

/// Does the cone spanned by planar points fill the plane.
pub fn is_whole_plane<S: Scalar>(pts: &[Vec<S>]) -> bool {
    Cone::from_generators(2, pts, &[]).halfspaces.is_empty()
}

/// Start and end rays of a pointed 2-dimensional planar cone,
/// counter-clockwise.
pub fn wedge_ends<S: Scalar>(w: &Cone<S>) -> Option<(Vec<S>, Vec<S>)> {
    if !w.is_pointed() || !w.is_full_dimensional() || w.generators.len() != 2 {
        return None;
    }
    let (a, b) = (&w.generators[0], &w.generators[1]);
    let det = a[0].times(&b[1]).minus(&a[1].times(&b[0]));
    if det.is_pos() {
        Some((a.clone(), b.clone()))
    } else {
        Some((b.clone(), a.clone()))
    }
}

/// Pairwise disjoint interiors and every end ray is a start ray: the
/// wedges go once around the origin.
pub fn tiles_plane<S: Scalar>(wedges: &[Cone<S>]) -> bool {
    let ends: Option<Vec<_>> = wedges.iter().map(wedge_ends).collect();
    let Some(ends) = ends else { return false };
    for i in 0..wedges.len() {
        for j in i + 1..wedges.len() {
            if wedges[i].interiors_overlap(&wedges[j]) {
                return false;
            }
        }
    }
    ends.iter().all(|(_, t)| ends.iter().any(|(s, _)| vec_eq(&canon_ray(s), &canon_ray(t))))
}
