//! Development of the universal cover of a glued complex.
//!
//! Cells of the cover are explored by iterated vertex stars of a base cell.
//! A cell is keyed by `(polytope, g)` where `g` realizes it in the base
//! frame, but keys do not identify cells: when the holonomy has torsion two
//! different cells of the cover can develop onto the same key. A crossing
//! reuses an existing cell only when the two already share a vertex of the
//! cover, tracked by union-find over vertex slots; any other coincidence is
//! reported as an overlap of the developing map.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::complex::{is_whole_plane, plane_basis, tiles_plane, to_plane, FacetId, GluingSpec};
use crate::cone::Cone;
use crate::linalg::{rank, Matrix, Subspace};
use crate::lp;
use crate::polytope::{bits, Polytope};
use crate::scalar::{dot, lex_cmp, neg_vec, Scalar};
use crate::transform::Transform;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DevelopError {
    #[error("spec is not valid ({0} violation(s))")]
    InvalidSpec(usize),
    #[error("no polytope {0}")]
    UnknownBase(usize),
    #[error("cell cap of {0} reached")]
    CellCap(usize),
}

/// A frozen query touched an unexplored neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error, Serialize)]
#[error("needs deeper development (cell {cell}, facet {facet})")]
pub struct NeedsDeeper {
    pub cell: usize,
    pub facet: usize,
}

#[derive(Debug, Clone)]
pub struct Cell<S: Scalar> {
    pub polytope: usize,
    pub g: Transform<S>,
    pub cone: Cone<S>,
    /// Realized vertex rays, indexed like the polytope's vertices.
    pub vertices: Vec<Vec<S>>,
    /// Realized facet covectors, indexed like the polytope's facets.
    pub facets: Vec<Vec<S>>,
    pub depth: usize,
    pub nbr: Vec<Option<usize>>,
    pub overlapping: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapKind {
    /// Crossing `from` lands on the key of an existing cell that is a
    /// different cell of the cover.
    SameKey,
    /// A new cell's interior meets an existing cell's interior.
    Interior,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Overlap {
    pub kind: OverlapKind,
    pub depth: usize,
    /// `(cell, facet)` being crossed.
    pub from: (usize, usize),
    pub existing: usize,
    /// Number of cells when the overlap was found.
    pub cells: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct DevelopOptions {
    pub max_cells: usize,
    pub halt_on_overlap: bool,
}

impl Default for DevelopOptions {
    fn default() -> Self {
        DevelopOptions { max_cells: 20_000, halt_on_overlap: true }
    }
}

#[derive(Debug, Clone)]
struct Key<S: Scalar>(usize, Transform<S>);

impl<S: Scalar> Ord for Key<S> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.cmp(&o.0).then_with(|| self.1.key_cmp(&o.1))
    }
}
impl<S: Scalar> PartialOrd for Key<S> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<S: Scalar> PartialEq for Key<S> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<S: Scalar> Eq for Key<S> {}

/// A realized point or face, ordered lexicographically so it can key maps.
#[derive(Debug, Clone)]
pub struct RayKey<S: Scalar>(pub Vec<S>);

impl<S: Scalar> Ord for RayKey<S> {
    fn cmp(&self, o: &Self) -> Ordering {
        lex_cmp(&self.0, &o.0)
    }
}
impl<S: Scalar> PartialOrd for RayKey<S> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<S: Scalar> PartialEq for RayKey<S> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<S: Scalar> Eq for RayKey<S> {}

type FaceKey<S> = Vec<RayKey<S>>;

#[derive(Debug, Clone)]
pub struct Developed<S: Scalar> {
    pub spec: GluingSpec<S>,
    pub cells: Vec<Cell<S>>,
    /// Star depth explored: cells of depth `< depth` have complete stars.
    pub depth: usize,
    pub overlaps: Vec<Overlap>,
    keys: BTreeMap<Key<S>, Vec<usize>>,
    slot_base: Vec<usize>,
    parent: Vec<usize>,
    vmap: BTreeMap<FacetId, Vec<usize>>,
    opts: DevelopOptions,
}

impl<S: Scalar> Developed<S> {
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn slot(&self, c: usize, v: usize) -> usize {
        self.slot_base[c] + v
    }

    fn poly(&self, c: usize) -> &Polytope<S> {
        &self.spec.polytopes[self.cells[c].polytope]
    }

    fn new_cell(&mut self, pid: usize, g: Transform<S>, depth: usize) -> usize {
        let p = &self.spec.polytopes[pid];
        let cell = Cell {
            polytope: pid,
            cone: g.apply_cone(&p.cone),
            vertices: p.vertices.iter().map(|v| g.apply(v)).collect(),
            facets: p.facets.iter().map(|u| g.apply_covector(u)).collect(),
            depth,
            nbr: vec![None; p.facets.len()],
            overlapping: false,
            g: g.clone(),
        };
        let id = self.cells.len();
        self.slot_base.push(self.parent.len());
        for _ in 0..p.vertices.len() {
            self.parent.push(self.parent.len());
        }
        self.cells.push(cell);
        self.keys.entry(Key(pid, g)).or_default().push(id);
        id
    }

    fn link(&mut self, a: usize, f: usize, b: usize, f2: usize) {
        self.cells[a].nbr[f] = Some(b);
        self.cells[b].nbr[f2] = Some(a);
        let fid = FacetId { polytope: self.cells[a].polytope, facet: f };
        let map = self.vmap[&fid].clone();
        for j in bits(self.poly(a).facet_mask(f)) {
            let (x, y) = (self.slot(a, j), self.slot(b, map[j]));
            let (rx, ry) = (self.find(x), self.find(y));
            self.parent[rx] = ry;
        }
    }

    fn shares_vertex(&mut self, a: usize, f: usize, b: usize) -> bool {
        let fid = FacetId { polytope: self.cells[a].polytope, facet: f };
        let map = self.vmap[&fid].clone();
        let verts: Vec<usize> = bits(self.poly(a).facet_mask(f)).collect();
        verts.into_iter().any(|j| {
            let (x, y) = (self.slot(a, j), self.slot(b, map[j]));
            self.find(x) == self.find(y)
        })
    }

    /// Interiors of two realized cells meet.
    pub fn cells_overlap(&self, a: usize, b: usize) -> bool {
        let (ca, cb) = (&self.cells[a], &self.cells[b]);
        let separated = |x: &Cell<S>, y: &Cell<S>| {
            x.facets.iter().any(|u| y.vertices.iter().all(|v| !dot(u, v).is_neg()))
        };
        if separated(ca, cb) || separated(cb, ca) {
            return false;
        }
        ca.cone.interiors_overlap(&cb.cone)
    }

    /// Crosses facet `f` of cell `a`; `None` when the branch halts.
    fn cross(&mut self, a: usize, f: usize, depth: usize) -> Result<Option<usize>, DevelopError> {
        if let Some(n) = self.cells[a].nbr[f] {
            return Ok(Some(n));
        }
        if self.cells[a].overlapping {
            return Ok(None);
        }
        let fid = FacetId { polytope: self.cells[a].polytope, facet: f };
        let pair = self.spec.pairings[&fid].clone();
        let g = self.cells[a].g.compose(&pair.map.inverse());
        let (pid, f2) = (pair.target.polytope, pair.target.facet);
        let cands = self.keys.get(&Key(pid, g.clone())).cloned().unwrap_or_default();
        for &b in &cands {
            if self.cells[b].nbr[f2].is_none() && self.shares_vertex(a, f, b) {
                self.link(a, f, b, f2);
                return Ok(Some(b));
            }
        }
        if let Some(&b) = cands.first() {
            self.overlaps.push(Overlap {
                kind: OverlapKind::SameKey,
                depth,
                from: (a, f),
                existing: b,
                cells: self.cells.len(),
            });
            return Ok(None);
        }
        if self.cells.len() >= self.opts.max_cells {
            return Err(DevelopError::CellCap(self.opts.max_cells));
        }
        let c = self.new_cell(pid, g, depth);
        self.link(a, f, c, f2);
        for d in 0..c {
            if d != a && self.cells_overlap(c, d) {
                self.cells[c].overlapping = true;
                self.overlaps.push(Overlap {
                    kind: OverlapKind::Interior,
                    depth,
                    from: (a, f),
                    existing: d,
                    cells: self.cells.len(),
                });
                return Ok(None);
            }
        }
        Ok(Some(c))
    }

    fn explore_vertex(&mut self, c: usize, v: usize, depth: usize) -> Result<(), DevelopError> {
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut queue = VecDeque::from([(c, v)]);
        seen.insert((c, v));
        while let Some((a, j)) = queue.pop_front() {
            let facets: Vec<usize> =
                (0..self.poly(a).facets.len()).filter(|&f| self.poly(a).facet_mask(f) >> j & 1 == 1).collect();
            for f in facets {
                if self.halted() {
                    return Ok(());
                }
                if let Some(b) = self.cross(a, f, depth)? {
                    let fid = FacetId { polytope: self.cells[a].polytope, facet: f };
                    let j2 = self.vmap[&fid][j];
                    if seen.insert((b, j2)) {
                        queue.push_back((b, j2));
                    }
                }
            }
        }
        Ok(())
    }

    fn halted(&self) -> bool {
        self.opts.halt_on_overlap && !self.overlaps.is_empty()
    }

    /// Grows the explored region by one star.
    pub fn extend(&mut self) -> Result<(), DevelopError> {
        let k = self.depth + 1;
        let layer: Vec<usize> = (0..self.cells.len()).filter(|&c| self.cells[c].depth + 1 == k).collect();
        for c in layer {
            for v in 0..self.poly(c).vertices.len() {
                if self.halted() {
                    return Ok(());
                }
                self.explore_vertex(c, v, k)?;
            }
        }
        self.depth = k;
        Ok(())
    }

    // ---- frozen queries -------------------------------------------------

    /// Cells of `st^k(P_0)`.
    pub fn star_layer(&self, k: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&c| self.cells[c].depth <= k).collect()
    }

    /// Cells containing face `f` of cell `c`.
    pub fn residue(&self, c: usize, f: usize) -> Result<Vec<usize>, NeedsDeeper> {
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::from([(c, f)]);
        let mut queue = VecDeque::from([(c, f)]);
        let mut out = BTreeSet::from([c]);
        while let Some((a, face)) = queue.pop_front() {
            let p = self.poly(a);
            for s in p.facets_of(face) {
                let b = self.cells[a].nbr[s].ok_or(NeedsDeeper { cell: a, facet: s })?;
                let fid = FacetId { polytope: self.cells[a].polytope, facet: s };
                let face2 = self.spec.carry(fid, face).expect("paired faces");
                out.insert(b);
                if seen.insert((b, face2)) {
                    queue.push_back((b, face2));
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    /// The residue of a ridge in cyclic order `P_1, ..., P_d`.
    pub fn ridge_residue(&self, c: usize, e: usize) -> Result<Vec<usize>, NeedsDeeper> {
        let mut out = vec![c];
        let (mut a, mut face) = (c, e);
        let mut exit = self.poly(c).facets_of(e)[0];
        loop {
            let b = self.cells[a].nbr[exit].ok_or(NeedsDeeper { cell: a, facet: exit })?;
            let fid = FacetId { polytope: self.cells[a].polytope, facet: exit };
            let entry = self.spec.pairings[&fid].target.facet;
            face = self.spec.carry(fid, face).expect("paired faces");
            if b == c {
                return Ok(out);
            }
            out.push(b);
            exit = *self.poly(b).facets_of(face).iter().find(|&&s| s != entry).expect("ridge in two facets");
            a = b;
            if out.len() > self.cells.len() {
                return Ok(out);
            }
        }
    }

    /// `st(S)`: all cells meeting a cell of `S`.
    pub fn star(&self, s: &[usize]) -> Result<Vec<usize>, NeedsDeeper> {
        let mut out = BTreeSet::new();
        for &c in s {
            let p = self.poly(c);
            for v in 0..p.vertices.len() {
                out.extend(self.residue(c, p.vertex_face(v))?);
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Every face residue of the cell is recorded.
    pub fn fully_explored(&self, c: usize) -> bool {
        let p = self.poly(c);
        (0..p.vertices.len()).all(|v| self.residue(c, p.vertex_face(v)).is_ok())
    }

    fn face_key(&self, c: usize, f: usize) -> FaceKey<S> {
        let mut k: FaceKey<S> =
            bits(self.poly(c).faces[f].vertices).map(|i| RayKey(self.cells[c].vertices[i].clone())).collect();
        k.sort();
        k
    }

    // ---- polyballs and convexity -----------------------------------------

    /// Boundary facets `(cell, facet)` of the union of `s`.
    pub fn boundary_facets(&self, s: &[usize]) -> Vec<(usize, usize)> {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        let mut out = Vec::new();
        for &c in s {
            for (f, n) in self.cells[c].nbr.iter().enumerate() {
                if !n.is_some_and(|n| set.contains(&n)) {
                    out.push((c, f));
                }
            }
        }
        out
    }

    /// Pairwise interior-disjoint cells, connected through shared facets,
    /// whose boundary is a combinatorial sphere.
    pub fn polyball_check(&self, s: &[usize]) -> bool {
        if s.is_empty() {
            return false;
        }
        for (i, &a) in s.iter().enumerate() {
            for &b in &s[i + 1..] {
                if self.cells[a].nbr.contains(&Some(b)) {
                    continue;
                }
                if self.cells_overlap(a, b) {
                    return false;
                }
            }
        }
        let set: BTreeSet<usize> = s.iter().copied().collect();
        let mut reach = BTreeSet::from([s[0]]);
        let mut stack = vec![s[0]];
        while let Some(c) = stack.pop() {
            for n in self.cells[c].nbr.iter().flatten() {
                if set.contains(n) && reach.insert(*n) {
                    stack.push(*n);
                }
            }
        }
        if reach.len() != set.len() {
            return false;
        }
        self.boundary_is_sphere(s)
    }

    fn boundary_is_sphere(&self, s: &[usize]) -> bool {
        let n = self.spec.dimension;
        let bnd = self.boundary_facets(s);
        if bnd.is_empty() {
            return false;
        }
        // faces of the boundary complex by dimension, each with the
        // boundary facets containing it
        let mut faces: Vec<BTreeMap<FaceKey<S>, BTreeSet<usize>>> = vec![BTreeMap::new(); n];
        for (i, &(c, f)) in bnd.iter().enumerate() {
            let p = self.poly(c);
            let fm = p.facet_mask(f);
            for g in 0..p.top() {
                if p.faces[g].vertices & !fm == 0 {
                    faces[p.faces[g].dim].entry(self.face_key(c, g)).or_default().insert(i);
                }
            }
        }
        if n >= 2 && faces[n - 2].values().any(|fs| fs.len() != 2) {
            return false;
        }
        // connected through ridges
        let mut parent: Vec<usize> = (0..bnd.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        if n >= 2 {
            for fs in faces[n - 2].values() {
                let v: Vec<usize> = fs.iter().copied().collect();
                let (a, b) = (find(&mut parent, v[0]), find(&mut parent, v[1]));
                parent[a] = b;
            }
        }
        let roots: BTreeSet<usize> = (0..bnd.len()).map(|i| find(&mut parent, i)).collect();
        if roots.len() != 1 {
            return false;
        }
        if n == 3 {
            // vertex links are single cycles
            for (vk, fs) in &faces[0] {
                let edges: Vec<&BTreeSet<usize>> = faces[1]
                    .iter()
                    .filter(|(ek, _)| ek.iter().any(|r| r == &vk[0]))
                    .map(|(_, s)| s)
                    .collect();
                let mut p2: BTreeMap<usize, usize> = fs.iter().map(|&i| (i, i)).collect();
                fn f2(p: &mut BTreeMap<usize, usize>, mut i: usize) -> usize {
                    while p[&i] != i {
                        i = p[&i];
                    }
                    i
                }
                for e in &edges {
                    let v: Vec<usize> = e.iter().copied().collect();
                    let (a, b) = (f2(&mut p2, v[0]), f2(&mut p2, v[1]));
                    p2.insert(a, b);
                }
                let comps: BTreeSet<usize> = fs.iter().map(|&i| f2(&mut p2, i)).collect();
                if comps.len() != 1 || edges.len() != fs.len() {
                    return false;
                }
            }
        }
        let chi: i64 =
            faces.iter().enumerate().map(|(d, m)| if d % 2 == 0 { m.len() as i64 } else { -(m.len() as i64) }).sum();
        chi == 1 + if (n - 1) % 2 == 0 { 1 } else { -1 }
    }

    /// Convexity of the union of `s` at a boundary ridge, given as a face
    /// `e` of cell `c`: the link cones of all cells of `s` through `e` lie
    /// in a closed half-plane of `L(e)^⊥`.
    pub fn ridge_link_convexity(&self, s: &[usize], c: usize, e: usize) -> bool {
        let key = self.face_key(c, e);
        let rays: Matrix<S> = key.iter().map(|r| r.0.clone()).collect();
        let plane = plane_basis(&Subspace::span(self.spec.polytopes[0].ambient(), &rays));
        let mut pts = Vec::new();
        for &d in s {
            let vs: BTreeSet<RayKey<S>> = self.cells[d].vertices.iter().map(|v| RayKey(v.clone())).collect();
            if key.iter().all(|r| vs.contains(r)) {
                pts.extend(self.cells[d].vertices.iter().map(|v| to_plane(&plane, v)));
            }
        }
        !is_whole_plane(&pts)
    }

    /// `(ridge_link, direct)` convexity verdicts for the union of `s`.
    pub fn union_convexity(&self, s: &[usize]) -> (bool, bool) {
        let n = self.spec.dimension;
        let bnd = self.boundary_facets(s);
        let mut ridges: BTreeMap<FaceKey<S>, (usize, usize)> = BTreeMap::new();
        for &(c, f) in &bnd {
            let p = self.poly(c);
            for e in p.ridges() {
                if p.faces[e].vertices & !p.facet_mask(f) == 0 {
                    ridges.entry(self.face_key(c, e)).or_insert((c, e));
                }
            }
        }
        let by_links = n < 2 || ridges.values().all(|&(c, e)| self.ridge_link_convexity(s, c, e));
        let verts: BTreeSet<RayKey<S>> =
            s.iter().flat_map(|&c| self.cells[c].vertices.iter().map(|v| RayKey(v.clone()))).collect();
        let direct = bnd
            .iter()
            .all(|&(c, f)| verts.iter().all(|v| !dot(&self.cells[c].facets[f], &v.0).is_pos()));
        (by_links, direct)
    }

    /// Both convexity methods pass and `s` is a polyball.
    pub fn convex_polyball(&self, s: &[usize]) -> bool {
        if !self.polyball_check(s) {
            return false;
        }
        let (a, b) = self.union_convexity(s);
        debug_assert_eq!(a, b, "convexity methods disagree");
        a && b
    }

    /// The union of `s` misses `-P_0`.
    pub fn proper(&self, s: &[usize]) -> bool {
        let base = &self.cells[0];
        let mut w = vec![S::zero(); base.vertices[0].len()];
        for u in &base.facets {
            w = crate::scalar::add(&w, u);
        }
        s.iter().all(|&c| {
            let cell = &self.cells[c];
            if cell.vertices.iter().all(|v| !dot(&w, v).is_pos()) {
                return true;
            }
            let mut ub: Vec<(Vec<S>, S)> = cell.cone.halfspaces.iter().map(|u| (u.clone(), S::zero())).collect();
            ub.extend(base.cone.halfspaces.iter().map(|u| (neg_vec(u), S::zero())));
            lp::feasible(w.len(), &ub, &[(w.clone(), S::one())]).is_none()
        })
    }

    // ---- audits ----------------------------------------------------------

    /// Conditions (1) vertex stars, (2) residues of middle-dimensional
    /// faces and (3) facet residues, on every fully explored cell.
    pub fn residual_convexity_audit(&self) -> AuditReport {
        let n = self.spec.dimension;
        let mut cache: BTreeMap<Vec<usize>, bool> = BTreeMap::new();
        let mut cells = Vec::new();
        let mut skipped = Vec::new();
        for c in 0..self.cells.len() {
            if !self.fully_explored(c) {
                skipped.push(c);
                continue;
            }
            let p = self.poly(c);
            let mut verdict = |faces: Vec<usize>| -> bool {
                faces.into_iter().all(|f| {
                    let r = self.residue(c, f).expect("fully explored");
                    *cache.entry(r.clone()).or_insert_with(|| self.convex_polyball(&r))
                })
            };
            let c1 = verdict(p.faces_of_dim(0));
            let c2 = if n >= 3 { Some(verdict((1..=n - 2).flat_map(|k| p.faces_of_dim(k)).collect())) } else { None };
            let c3 = verdict((0..p.facets.len()).map(|i| p.facet_face(i)).collect());
            cells.push(CellAudit { cell: c, vertex_stars: c1, middle_residues: c2, facet_residues: c3 });
        }
        AuditReport { cells, skipped }
    }

    /// Fully explored ridges as `(cell, face)`, one per ridge of the cover.
    pub fn explored_ridges(&self) -> Vec<(usize, usize)> {
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut out = Vec::new();
        for c in 0..self.cells.len() {
            for e in self.poly(c).ridges() {
                if let Ok(r) = self.residue(c, e) {
                    // a ridge of the cover is fixed by its residue together
                    // with its realized vertices
                    let mut key = r.clone();
                    key.extend(bits(self.poly(c).faces[e].vertices).map(|i| self.find_ro(self.slot(c, i))));
                    if seen.insert(key) {
                        out.push((c, e));
                    }
                }
            }
        }
        out
    }

    fn find_ro(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    /// Good-ridge test: for every convex subcomplex `F` of `∂res(e)`
    /// missing `e`, `st(F) ∩ res(e)` is a convex polyball.
    pub fn good_ridge_check(&self, c: usize, e: usize, cap: usize) -> Result<RidgeVerdict<S>, NeedsDeeper> {
        let res = self.residue(c, e)?;
        let e_rays: BTreeSet<RayKey<S>> =
            bits(self.poly(c).faces[e].vertices).map(|i| RayKey(self.cells[c].vertices[i].clone())).collect();
        let verts: Vec<Vec<S>> = {
            let s: BTreeSet<RayKey<S>> =
                res.iter().flat_map(|&d| self.cells[d].vertices.iter().map(|v| RayKey(v.clone()))).collect();
            s.into_iter().map(|r| r.0).collect()
        };
        let ambient = verts[0].len();
        let hull = Cone::from_generators(ambient, &verts, &[]);
        // boundary faces of res(e), deduplicated, with their vertex sets
        let mut bfaces: BTreeMap<FaceKey<S>, ()> = BTreeMap::new();
        for (d, f) in self.boundary_facets(&res) {
            let p = self.poly(d);
            let fm = p.facet_mask(f);
            for g in 0..p.top() {
                if p.faces[g].vertices & !fm == 0 {
                    bfaces.insert(self.face_key(d, g), ());
                }
            }
        }
        let mut checked: BTreeMap<Vec<usize>, bool> = BTreeMap::new();
        let mut candidates = 0usize;
        for u in hull.facets() {
            let all_on: Vec<&FaceKey<S>> =
                bfaces.keys().filter(|k| k.iter().all(|r| dot(u, &r.0).is_zero())).collect();
            let on: Vec<&FaceKey<S>> =
                all_on.iter().copied().filter(|k| !k.iter().any(|r| e_rays.contains(r))).collect();
            if on.is_empty() {
                continue;
            }
            let pts: Vec<RayKey<S>> = {
                let s: BTreeSet<RayKey<S>> = on.iter().flat_map(|k| k.iter().cloned()).collect();
                s.into_iter().collect()
            };
            let all_pts: Vec<RayKey<S>> = {
                let s: BTreeSet<RayKey<S>> = all_on.iter().flat_map(|k| k.iter().cloned()).collect();
                s.into_iter().collect()
            };
            let idx = |r: &RayKey<S>| pts.binary_search(r).expect("point on facet");
            let face_sets: Vec<BTreeSet<usize>> = on.iter().map(|k| k.iter().map(idx).collect()).collect();
            // vertex sets of connected unions of boundary faces
            let mut states: BTreeSet<BTreeSet<usize>> = face_sets.iter().cloned().collect();
            let mut queue: VecDeque<BTreeSet<usize>> = states.iter().cloned().collect();
            while let Some(w) = queue.pop_front() {
                for fs in &face_sets {
                    if fs.is_subset(&w) || fs.is_disjoint(&w) {
                        continue;
                    }
                    let mut w2 = w.clone();
                    w2.extend(fs.iter().copied());
                    if states.insert(w2.clone()) {
                        if states.len() > cap {
                            return Ok(RidgeVerdict::Undecided);
                        }
                        queue.push_back(w2);
                    }
                }
            }
            for w in states {
                candidates += 1;
                if candidates > cap {
                    return Ok(RidgeVerdict::Undecided);
                }
                let wr: Vec<Vec<S>> = w.iter().map(|&i| pts[i].0.clone()).collect();
                if !convex_subcomplex(&wr, &all_pts, &all_on) {
                    continue;
                }
                let sub: Vec<usize> = res
                    .iter()
                    .copied()
                    .filter(|&d| {
                        let vs: BTreeSet<RayKey<S>> =
                            self.cells[d].vertices.iter().map(|v| RayKey(v.clone())).collect();
                        w.iter().any(|&i| vs.contains(&pts[i]))
                    })
                    .collect();
                let ok = *checked.entry(sub.clone()).or_insert_with(|| self.convex_polyball(&sub));
                if !ok {
                    return Ok(RidgeVerdict::Bad { witness: wr, cells: sub });
                }
            }
        }
        Ok(RidgeVerdict::Good)
    }

    /// Good-ridge checks over all fully explored ridges, with the
    /// consistency assertion that no triangular cells means no bad ridges.
    pub fn strong_residual_convexity(&self, cap: usize) -> StrongReport {
        let mut bad = Vec::new();
        let mut undecided = Vec::new();
        let ridges = self.explored_ridges();
        for &(c, e) in &ridges {
            match self.good_ridge_check(c, e, cap) {
                Ok(RidgeVerdict::Good) => {}
                Ok(RidgeVerdict::Bad { .. }) => bad.push((c, e)),
                Ok(RidgeVerdict::Undecided) | Err(_) => undecided.push((c, e)),
            }
        }
        let triangular = self.cells.iter().any(|c| self.spec.polytopes[c.polytope].is_triangular().is_some());
        StrongReport {
            ridges: ridges.len(),
            theorem_consistent: triangular || bad.is_empty(),
            bad,
            undecided,
        }
    }

    /// The developed cones around a fully explored ridge tile its normal
    /// plane.
    pub fn ridge_link_tiles(&self, c: usize, e: usize) -> Result<bool, NeedsDeeper> {
        let cyc = self.ridge_residue(c, e)?;
        let rays: Matrix<S> = self.face_key(c, e).into_iter().map(|r| r.0).collect();
        let plane = plane_basis(&Subspace::span(rays[0].len(), &rays));
        let wedges: Vec<Cone<S>> = cyc
            .iter()
            .map(|&d| {
                let pts: Vec<Vec<S>> = self.cells[d].vertices.iter().map(|v| to_plane(&plane, v)).collect();
                Cone::from_generators(2, &pts, &[])
            })
            .collect();
        Ok(tiles_plane(&wedges))
    }

    // ---- galleries -------------------------------------------------------

    /// Directed gallery from the base cell through facet `sigma`: `s_j` is
    /// the least facet of `P_j` disjoint from `s_{j-1}`.
    pub fn gallery_trace(&self, sigma: usize, steps: usize) -> Result<Gallery<S>, GalleryError> {
        let mut cells = vec![0usize];
        let mut facets = vec![sigma];
        let mut realized = vec![self.cells[0].facets[sigma].clone()];
        for _ in 0..steps {
            let (a, s) = (*cells.last().unwrap(), *facets.last().unwrap());
            let b = self.cells[a].nbr[s].ok_or(GalleryError::NeedsDeeper(NeedsDeeper { cell: a, facet: s }))?;
            let fid = FacetId { polytope: self.cells[a].polytope, facet: s };
            let entry = self.spec.pairings[&fid].target.facet;
            let next = *self.eligible_next(b, entry).first().ok_or(GalleryError::ConeLike { cell: b })?;
            cells.push(b);
            facets.push(next);
            realized.push(self.cells[b].facets[next].clone());
        }
        Ok(Gallery { cells, facets, hyperplanes: realized })
    }

    /// Facets of cell `c` disjoint from facet `entry`, in index order; the
    /// traced gallery takes the first.
    pub fn eligible_next(&self, c: usize, entry: usize) -> Vec<usize> {
        let p = self.poly(c);
        let em = p.facet_mask(entry);
        (0..p.facets.len()).filter(|&t| p.facet_mask(t) & em == 0).collect()
    }

    /// Angle between each `⟨s_j⟩` and the last `⟨s_K⟩`.
    pub fn stabilization(&self, gal: &Gallery<S>) -> Vec<f64> {
        let last = gal.hyperplanes.last().expect("nonempty gallery");
        gal.hyperplanes.iter().map(|h| hyperplane_angle(h, last)).collect()
    }

    /// Invariants of a traced gallery for `1 <= j <= K`.
    pub fn gallery_checks(&self, gal: &Gallery<S>) -> GalleryChecks {
        let k = gal.cells.len() - 1;
        let mut disjoint = true;
        let mut in_boundary = true;
        let mut convex = true;
        for j in 1..=k {
            let (b, s) = (gal.cells[j], gal.facets[j]);
            let prev = &self.cells[gal.cells[j - 1]];
            let entry = (0..self.poly(b).facets.len()).find(|&t| self.cells[b].nbr[t] == Some(gal.cells[j - 1]));
            let _ = prev;
            if let Some(t) = entry {
                disjoint &= self.poly(b).facet_mask(t) & self.poly(b).facet_mask(s) == 0;
            }
            in_boundary &= match self.cells[b].nbr[s] {
                None => self.cells[b].depth <= j,
                Some(n) => self.cells[n].depth > j,
            };
            convex &= self.convex_polyball(&gal.cells[..=j]);
        }
        let q = &self.cells[0];
        let sigma = gal.facets[0];
        let q_sigma = self.q_sigma(sigma);
        let mut misses_q = true;
        let mut meets_q_sigma = true;
        for h in &gal.hyperplanes[1..] {
            misses_q &= hyperplane_misses(&q.cone, h);
            let mut hs = q_sigma.halfspaces.clone();
            hs.push(h.clone());
            hs.push(neg_vec(h));
            meets_q_sigma &= !Cone::from_halfspaces(q.cone.ambient, &hs).is_zero();
        }
        GalleryChecks { disjoint, in_boundary, convex, misses_q, meets_q_sigma }
    }

    /// `Q(σ) = {u_σ >= 0} ∩ {u_j <= 0}` over facets `j` adjacent to `σ`
    /// along ridges.
    pub fn q_sigma(&self, sigma: usize) -> Cone<S> {
        let p = self.poly(0);
        let q = &self.cells[0];
        let sm = p.facet_mask(sigma);
        let mut hs = vec![neg_vec(&q.facets[sigma])];
        for j in 0..p.facets.len() {
            if j == sigma {
                continue;
            }
            let common = sm & p.facet_mask(j);
            if common != 0 {
                let rows: Matrix<S> = bits(common).map(|i| p.vertices[i].clone()).collect();
                if rank(&rows) + 1 == p.dim {
                    hs.push(q.facets[j].clone());
                }
            }
        }
        Cone::from_halfspaces(q.cone.ambient, &hs)
    }

    /// One gallery per facet of the base cell; a general-position subset of
    /// `n + 1` stabilized hyperplanes bounds a simplex containing the
    /// explored region.
    pub fn proper_convexity_certificate(&self, steps: usize, tol: f64) -> Result<SupportCertificate<S>, GalleryError> {
        let q = self.poly(0);
        let mut entries = Vec::new();
        for s in 0..q.facets.len() {
            let gal = self.gallery_trace(s, steps)?;
            let k = gal.hyperplanes.len() - 1;
            let angle = if k >= 1 { hyperplane_angle(&gal.hyperplanes[k - 1], &gal.hyperplanes[k]) } else { f64::INFINITY };
            let dual_ok = q
                .dual()
                .ok()
                .and_then(|d| {
                    let v = d.vertex_index(&q.facets[s])?;
                    let pv = d.pavilion(d.vertex_face(v)).ok()?;
                    Some(pv.contains(&d, &self.to_base_dual(&gal.hyperplanes[k])))
                })
                .unwrap_or(false);
            entries.push(CertificateEntry {
                facet: s,
                hyperplane: gal.hyperplanes[k].clone(),
                depth: k,
                angle,
                stable: angle <= tol,
                dual_in_pavilion: dual_ok,
            });
        }
        let thick_dual = q.dual().map(|d| d.is_thin().is_none()).unwrap_or(false);
        let n = self.spec.dimension;
        let stable: Vec<&CertificateEntry<S>> = entries.iter().filter(|e| e.stable).collect();
        let mut simplex = None;
        if stable.len() > n {
            let mut combo: Vec<usize> = (0..=n).collect();
            loop {
                let rows: Matrix<S> = combo.iter().map(|&i| stable[i].hyperplane.clone()).collect();
                if rank(&rows) == n + 1 {
                    let region = self.star_layer(self.depth);
                    let inside = region
                        .iter()
                        .all(|&c| self.cells[c].vertices.iter().all(|v| rows.iter().all(|h| !dot(h, v).is_pos())));
                    if inside {
                        simplex = Some(combo.iter().map(|&i| stable[i].facet).collect());
                        break;
                    }
                }
                if !next_combo(&mut combo, stable.len()) {
                    break;
                }
            }
        }
        Ok(SupportCertificate { entries, simplex, thick_dual })
    }

    /// Covectors are realized in the base frame already; the base cell's
    /// dual lives in the same coordinates because `g_0 = id`.
    fn to_base_dual(&self, h: &[S]) -> Vec<S> {
        h.to_vec()
    }
}

fn next_combo(c: &mut [usize], n: usize) -> bool {
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

/// The hyperplane `h = 0` avoids the pointed cone `c` away from the apex.
pub fn hyperplane_misses<S: Scalar>(c: &Cone<S>, h: &[S]) -> bool {
    let (pos, neg) = c.covector_range(h);
    if pos != neg {
        // strictly one-sided unless some generator lies on the hyperplane
        return c.generators.iter().all(|g| !dot(h, g).is_zero());
    }
    false
}

/// Angle between two hyperplanes through the origin, from their normals.
pub fn hyperplane_angle<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    let fa: Vec<f64> = a.iter().map(|x| x.to_f64()).collect();
    let fb: Vec<f64> = b.iter().map(|x| x.to_f64()).collect();
    let na = fa.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = fb.iter().map(|x| x * x).sum::<f64>().sqrt();
    let c = fa.iter().zip(&fb).map(|(x, y)| x * y).sum::<f64>() / (na * nb);
    c.clamp(-1.0, 1.0).acos()
}

/// `conv(W)` is a union of boundary faces: it contains no other point of
/// the facet and every face whose relative interior meets it has all its
/// vertices in `W`.
fn convex_subcomplex<S: Scalar>(w: &[Vec<S>], pts: &[RayKey<S>], faces: &[&FaceKey<S>]) -> bool {
    let ambient = w[0].len();
    let hull = Cone::from_generators(ambient, w, &[]);
    let inw = |r: &RayKey<S>| w.iter().any(|x| crate::scalar::vec_eq(x, &r.0));
    if pts.iter().any(|p| !inw(p) && hull.contains(&p.0)) {
        return false;
    }
    for f in faces {
        if f.iter().all(inw) {
            continue;
        }
        // cheap separation first: a hull halfspace nonnegative on the face
        // and positive somewhere keeps the relative interior outside
        let separated = hull.halfspaces.iter().any(|u| {
            f.iter().all(|r| !dot(u, &r.0).is_neg()) && f.iter().any(|r| dot(u, &r.0).is_pos())
        });
        if separated {
            continue;
        }
        if relint_meets(f, &hull) {
            return false;
        }
    }
    true
}

/// Some strictly positive combination of the face's rays lies in `hull`.
fn relint_meets<S: Scalar>(f: &FaceKey<S>, hull: &Cone<S>) -> bool {
    let k = f.len();
    let n = hull.ambient;
    // variables: coefficients a_1..a_k >= 1; x = Σ a_i r_i must satisfy the
    // hull's halfspaces
    let mut ub: Vec<(Vec<S>, S)> = Vec::new();
    for i in 0..k {
        let mut row = vec![S::zero(); k];
        row[i] = S::one().neg();
        ub.push((row, S::one().neg()));
    }
    for u in &hull.halfspaces {
        let row: Vec<S> = f.iter().map(|r| dot(u, &r.0)).collect();
        ub.push((row, S::zero()));
    }
    let _ = n;
    lp::feasible(k, &ub, &[]).is_some()
}

pub fn develop<S: Scalar>(
    spec: &GluingSpec<S>,
    base: usize,
    depth: usize,
    opts: DevelopOptions,
) -> Result<Developed<S>, DevelopError> {
    let v = spec.validate();
    if !v.is_empty() {
        return Err(DevelopError::InvalidSpec(v.len()));
    }
    if base >= spec.polytopes.len() {
        return Err(DevelopError::UnknownBase(base));
    }
    let mut vmap = BTreeMap::new();
    for (fid, pair) in &spec.pairings {
        let p = &spec.polytopes[fid.polytope];
        let q = &spec.polytopes[pair.target.polytope];
        let m: Vec<usize> = p
            .vertices
            .iter()
            .map(|v| q.vertex_index(&pair.map.apply(v)).unwrap_or(usize::MAX))
            .collect();
        vmap.insert(*fid, m);
    }
    let mut dc = Developed {
        spec: spec.clone(),
        cells: Vec::new(),
        depth: 0,
        overlaps: Vec::new(),
        keys: BTreeMap::new(),
        slot_base: Vec::new(),
        parent: Vec::new(),
        vmap,
        opts,
    };
    dc.new_cell(base, Transform::identity(spec.dimension + 1), 0);
    for _ in 0..depth {
        dc.extend()?;
        if dc.halted() {
            break;
        }
    }
    Ok(dc)
}

/// Breadth-first facet crossings from the base cell until the developing
/// map is seen to be non-injective or `max_cells` cells exist. Cell depths
/// are gallery distances here, not star depths.
pub fn injectivity_probe<S: Scalar>(
    spec: &GluingSpec<S>,
    base: usize,
    max_cells: usize,
) -> Result<(Option<Overlap>, Developed<S>), DevelopError> {
    let mut dc = develop(spec, base, 0, DevelopOptions { max_cells: usize::MAX, halt_on_overlap: true })?;
    let mut next = 0;
    while next < dc.cells.len() && dc.cells.len() < max_cells {
        let d = dc.cells[next].depth + 1;
        for f in 0..dc.cells[next].nbr.len() {
            dc.cross(next, f, d)?;
            if let Some(o) = dc.overlaps.first() {
                return Ok((Some(o.clone()), dc));
            }
        }
        next += 1;
    }
    Ok((None, dc))
}

/// A closed gallery `γ` in the quotient whose holonomy `h` has finite order
/// `m > 1` while `γ` has infinite order in `H_1`. Developing `γ^m` from the
/// base cell ends on a different cell of the cover with the same image as
/// the base cell, so the developing map is not injective.
#[derive(Debug, Clone)]
pub struct WrapCertificate<S: Scalar> {
    /// Facets crossed, in order.
    pub facets: Vec<FacetId>,
    pub holonomy: Transform<S>,
    pub order: usize,
    /// Cells of the developed gallery `γ^m`, counting both ends.
    pub cells: usize,
}

/// Least `m` in `2..=max` with `g^m = id`, screened in floating point and
/// confirmed in the scalar type.
fn finite_order<S: Scalar>(g: &Transform<S>, max: usize) -> Option<usize> {
    let a: Vec<Vec<f64>> = g.matrix().iter().map(|r| r.iter().map(|x| x.to_f64()).collect()).collect();
    let n = a.len();
    let mut p = a.clone();
    for m in 2..=max {
        p = (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| p[i][k] * a[k][j]).sum()).collect()).collect();
        let s = p[0][0];
        let scalar = s > 0.0
            && (0..n).all(|i| (0..n).all(|j| {
                let want = if i == j { s } else { 0.0 };
                (p[i][j] - want).abs() <= 1e-9 * s.abs().max(1.0)
            }));
        if scalar {
            let mut e = g.clone();
            for _ in 1..m {
                e = e.compose(g);
            }
            if e.is_identity() {
                return Some(m);
            }
        }
        let norm = p.iter().flatten().fold(0.0f64, |x, y| x.max(y.abs()));
        if !norm.is_finite() {
            return None;
        }
        p.iter_mut().flatten().for_each(|x| *x /= norm);
    }
    None
}

fn pairing_class(spec_pairs: &[FacetId], s: FacetId, t: FacetId) -> (usize, i64) {
    let (lo, sign) = if s <= t { (s, 1) } else { (t, -1) };
    (spec_pairs.binary_search(&lo).expect("pairing class"), sign)
}

/// Searches closed galleries of length at most `max_len` through the base
/// polytope for a [`WrapCertificate`], trying holonomy orders up to
/// `max_order`.
pub fn wrap_certificate<S: Scalar>(
    spec: &GluingSpec<S>,
    base: usize,
    max_len: usize,
    max_order: usize,
) -> Option<WrapCertificate<S>> {
    // H_1 of the quotient: pairing classes modulo ridge cycles
    let classes: Vec<FacetId> =
        spec.pairings.iter().filter(|(s, p)| **s <= p.target).map(|(s, _)| *s).collect();
    let chain = |walk: &[FacetId]| -> Vec<S> {
        let mut v = vec![S::zero(); classes.len()];
        for s in walk {
            let (i, sign) = pairing_class(&classes, *s, spec.pairings[s].target);
            v[i] = v[i].plus(&S::from_i64(sign));
        }
        v
    };
    let relations: Matrix<S> = spec
        .ridge_cycles()
        .ok()?
        .iter()
        .map(|c| chain(&c.steps.iter().map(|st| st.exit).collect::<Vec<_>>()))
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .collect();
    let rel_rank = rank(&relations);
    let id = Transform::identity(spec.dimension + 1);
    // breadth-first over non-backtracking walks, so shorter loops come first
    let mut queue: VecDeque<(Vec<FacetId>, usize, Option<usize>, Transform<S>)> =
        VecDeque::from([(Vec::new(), base, None, id)]);
    while let Some((walk, at, entered, g)) = queue.pop_front() {
        if !walk.is_empty() && at == base && !g.is_identity() {
            if let Some(m) = finite_order(&g, max_order) {
                let mut rows = relations.clone();
                rows.push(chain(&walk));
                if rank(&rows) > rel_rank {
                    return Some(WrapCertificate { cells: m * walk.len() + 1, facets: walk, holonomy: g, order: m });
                }
            }
        }
        if walk.len() == max_len {
            continue;
        }
        for f in 0..spec.polytopes[at].facets.len() {
            if Some(f) == entered {
                continue;
            }
            let s = FacetId { polytope: at, facet: f };
            let pair = &spec.pairings[&s];
            let mut w = walk.clone();
            w.push(s);
            queue.push_back((w, pair.target.polytope, Some(pair.target.facet), g.compose(&pair.map.inverse())));
        }
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct CellAudit {
    pub cell: usize,
    pub vertex_stars: bool,
    /// Vacuous in dimension 2.
    pub middle_residues: Option<bool>,
    pub facet_residues: bool,
}

impl CellAudit {
    pub fn agree(&self) -> bool {
        self.vertex_stars == self.facet_residues && self.middle_residues.is_none_or(|m| m == self.facet_residues)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub cells: Vec<CellAudit>,
    /// Cells touching the frontier, never used as evidence.
    pub skipped: Vec<usize>,
}

#[derive(Debug, Clone)]
pub enum RidgeVerdict<S: Scalar> {
    Good,
    Bad { witness: Vec<Vec<S>>, cells: Vec<usize> },
    Undecided,
}

impl<S: Scalar> RidgeVerdict<S> {
    pub fn is_good(&self) -> bool {
        matches!(self, RidgeVerdict::Good)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StrongReport {
    pub ridges: usize,
    pub bad: Vec<(usize, usize)>,
    pub undecided: Vec<(usize, usize)>,
    pub theorem_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GalleryError {
    #[error(transparent)]
    NeedsDeeper(NeedsDeeper),
    #[error("cell {cell} is cone-like: no facet is disjoint from the incoming one")]
    ConeLike { cell: usize },
}

#[derive(Debug, Clone)]
pub struct Gallery<S: Scalar> {
    pub cells: Vec<usize>,
    pub facets: Vec<usize>,
    /// Realized covectors of `s_j`; the explored region is on the `<= 0`
    /// side.
    pub hyperplanes: Vec<Vec<S>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GalleryChecks {
    pub disjoint: bool,
    pub in_boundary: bool,
    pub convex: bool,
    pub misses_q: bool,
    pub meets_q_sigma: bool,
}

impl GalleryChecks {
    pub fn all(&self) -> bool {
        self.disjoint && self.in_boundary && self.convex && self.misses_q && self.meets_q_sigma
    }
}

#[derive(Debug, Clone)]
pub struct CertificateEntry<S: Scalar> {
    pub facet: usize,
    pub hyperplane: Vec<S>,
    pub depth: usize,
    pub angle: f64,
    pub stable: bool,
    pub dual_in_pavilion: bool,
}

#[derive(Debug, Clone)]
pub struct SupportCertificate<S: Scalar> {
    pub entries: Vec<CertificateEntry<S>>,
    /// Facets of the base cell whose hyperplanes bound the simplex.
    pub simplex: Option<Vec<usize>>,
    pub thick_dual: bool,
}

/// Hyperplanes through the origin in general position: their common zero
/// set is trivial.
pub fn general_position<S: Scalar>(hs: &[Vec<S>]) -> bool {
    !hs.is_empty() && rank(hs) == hs[0].len()
}

// ---- certification ---------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct DepthReport {
    pub depth: usize,
    pub cells: usize,
    pub polyball: bool,
    pub convex_ridge_link: bool,
    pub convex_direct: bool,
    pub proper: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityVerdict {
    /// `Some(true)`: residual convexity and no triangular cells.
    /// `None`: a hypothesis fails, so the theorem says nothing.
    pub theorem_path: Option<bool>,
    pub direct_path: bool,
    pub per_depth: Vec<DepthReport>,
    pub overlaps: Vec<Overlap>,
    /// The theorem certified but the direct path did not.
    pub disagreement: bool,
}

impl ConvexityVerdict {
    pub fn certified(&self) -> bool {
        self.direct_path && !self.disagreement
    }
}

/// Per-depth direct checks of `st^k(P_0)`.
pub fn depth_reports<S: Scalar>(dc: &Developed<S>) -> Vec<DepthReport> {
    (1..=dc.depth)
        .map(|k| {
            let s = dc.star_layer(k);
            let polyball = dc.polyball_check(&s);
            let (a, b) = dc.union_convexity(&s);
            DepthReport { depth: k, cells: s.len(), polyball, convex_ridge_link: a, convex_direct: b, proper: dc.proper(&s) }
        })
        .collect()
}

pub fn certify_convexity<S: Scalar>(
    spec: &GluingSpec<S>,
    base: usize,
    depth: usize,
) -> Result<(ConvexityVerdict, Developed<S>), DevelopError> {
    let residual = spec.residual_convexity().iter().all(|f| f.ridge_link);
    let no_triangles = spec.triangular_scan().iter().all(|(_, w)| w.is_none());
    let theorem_path = if residual && no_triangles { Some(true) } else { None };
    let dc = develop(spec, base, depth, DevelopOptions::default())?;
    let per_depth = if dc.overlaps.is_empty() { depth_reports(&dc) } else { Vec::new() };
    let direct_path = dc.overlaps.is_empty()
        && per_depth.iter().all(|d| d.polyball && d.convex_ridge_link && d.convex_direct && d.proper);
    let disagreement = theorem_path == Some(true) && !direct_path
        || per_depth.iter().any(|d| d.convex_ridge_link != d.convex_direct);
    Ok((ConvexityVerdict { theorem_path, direct_path, per_depth, overlaps: dc.overlaps.clone(), disagreement }, dc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::scalar::Q;

    fn dev(spec: &GluingSpec<Q>, k: usize) -> Developed<Q> {
        develop(spec, 0, k, DevelopOptions::default()).unwrap()
    }

    #[test]
    fn square_torus_star_counts() {
        let dc = dev(&square_torus(), 3);
        assert!(dc.overlaps.is_empty());
        for k in 0..=3 {
            assert_eq!(dc.star_layer(k).len(), (2 * k + 1) * (2 * k + 1), "st^{k}");
        }
        // translations realize distinct cells
        let p = &dc.spec.polytopes[0];
        let v = p.vertex_face(0);
        assert_eq!(dc.residue(0, v).unwrap().len(), 4);
        for e in p.ridges() {
            assert_eq!(dc.ridge_residue(0, e).unwrap().len(), 4);
        }
    }

    #[test]
    fn cube_torus_star_counts() {
        let dc = dev(&cube_torus(), 2);
        assert!(dc.overlaps.is_empty());
        assert_eq!(dc.star_layer(1).len(), 27);
        assert_eq!(dc.star_layer(2).len(), 125);
        let p = &dc.spec.polytopes[0];
        assert_eq!(dc.residue(0, p.vertex_face(0)).unwrap().len(), 8);
        for e in p.ridges() {
            assert_eq!(dc.ridge_residue(0, e).unwrap().len(), 4);
        }
    }

    #[test]
    fn star_identities() {
        let dc = dev(&square_torus(), 3);
        let p = &dc.spec.polytopes[0];
        let stars: Vec<Vec<usize>> =
            (0..p.vertices.len()).map(|v| dc.residue(0, p.vertex_face(v)).unwrap()).collect();
        let mut meet: BTreeSet<usize> = stars[0].iter().copied().collect();
        let mut join = meet.clone();
        for s in &stars[1..] {
            let s: BTreeSet<usize> = s.iter().copied().collect();
            meet = meet.intersection(&s).copied().collect();
            join.extend(s);
        }
        assert_eq!(meet, BTreeSet::from([0]));
        assert_eq!(join.into_iter().collect::<Vec<_>>(), dc.star(&[0]).unwrap());
        // st^2(P_0) is the union of st(P) over P in st(P_0)
        let st1 = dc.star(&[0]).unwrap();
        let mut u = BTreeSet::new();
        for &c in &st1 {
            u.extend(dc.star(&[c]).unwrap());
        }
        assert_eq!(u.into_iter().collect::<Vec<_>>(), dc.star_layer(2));
        assert_eq!(dc.star(&st1).unwrap(), dc.star_layer(2));
        // convex vertex stars make every explored st(P) a polyball
        for c in dc.star_layer(1) {
            let p = dc.poly(c);
            assert!((0..p.vertices.len()).all(|v| dc.convex_polyball(&dc.residue(c, p.vertex_face(v)).unwrap())));
            assert!(dc.polyball_check(&dc.star(&[c]).unwrap()));
        }
    }

    #[test]
    fn frontier_queries_need_deeper() {
        let dc = dev(&square_torus(), 1);
        let outer = *dc.star_layer(1).last().unwrap();
        assert!(!dc.fully_explored(outer));
        assert!(dc.fully_explored(0));
        assert!(matches!(dc.star(&[outer]), Err(NeedsDeeper { .. })));
        assert_eq!(dc.star(&[0]).unwrap().len(), 9);
    }

    #[test]
    fn benoist_overlaps_quickly() {
        let dc = dev(&benoist_triangles(), 6);
        assert!(!dc.overlaps.is_empty());
        let w = wrap_certificate(&benoist_triangles(), 0, 6, 12).expect("wraps");
        assert!(w.cells <= 40, "{w:?}");
        assert_eq!(w.order, 4);
        // the quarter turn is the holonomy, up to direction
        let r = Transform::new(crate::fixtures::m(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 1]])).unwrap();
        assert!(w.holonomy.equals(&r) || w.holonomy.equals(&r.inverse()));
    }

    #[test]
    fn probe_finds_no_overlap_on_tori() {
        for spec in [square_torus(), cube_torus(), hexagon_torus(), wallpaper()] {
            let (o, dc) = injectivity_probe(&spec, 0, 150).unwrap();
            assert!(o.is_none(), "{o:?}");
            assert!(dc.cell_count() >= 150);
            // torsion-free holonomy: nothing to certify
            assert!(wrap_certificate(&spec, 0, 4, 12).is_none());
        }
    }

    #[test]
    fn polyball_and_tromino() {
        let dc = dev(&square_torus(), 2);
        for k in 0..=2 {
            let s = dc.star_layer(k);
            assert!(dc.polyball_check(&s));
            assert_eq!(dc.union_convexity(&s), (true, true));
            assert!(dc.proper(&s));
        }
        // an L of three squares around a vertex is a non-convex polyball
        let v = dc.spec.polytopes[0].vertex_face(0);
        let star = dc.residue(0, v).unwrap();
        let l = &star[..3];
        assert!(dc.polyball_check(l));
        assert_eq!(dc.union_convexity(l), (false, false));
        // two squares touching only at a vertex are not a polyball
        let a = star[0];
        let diag = star.iter().copied().find(|&b| b != a && !dc.cells[a].nbr.contains(&Some(b))).unwrap();
        assert!(!dc.polyball_check(&[a, diag]));
    }

    #[test]
    fn ridge_links_tile() {
        for spec in [square_torus(), wallpaper(), hexagon_torus()] {
            let dc = dev(&spec, 2);
            let ridges = dc.explored_ridges();
            assert!(!ridges.is_empty());
            for (c, e) in ridges {
                assert!(dc.ridge_link_tiles(c, e).unwrap());
            }
        }
    }

    #[test]
    fn audits_agree_with_residual_convexity() {
        let dc = dev(&square_torus(), 2);
        let a = dc.residual_convexity_audit();
        assert!(!a.cells.is_empty());
        assert!(a.cells.iter().all(|c| c.agree() && c.facet_residues));
        let dc = dev(&hexagon_torus(), 2);
        let a = dc.residual_convexity_audit();
        assert!(a.cells.iter().all(|c| c.agree() && !c.facet_residues));
    }

    #[test]
    fn wallpaper_has_bad_ridges_at_centres() {
        let dc = dev(&wallpaper(), 2);
        let centre = ray(&[1, 1, 2]);
        let rep = dc.strong_residual_convexity(10_000);
        assert!(rep.theorem_consistent);
        assert!(!rep.bad.is_empty());
        for (c, e) in dc.explored_ridges() {
            let through_centre = bits(dc.poly(c).faces[e].vertices).any(|i| dc.cells[c].vertices[i] == centre);
            let good = dc.good_ridge_check(c, e, 10_000).unwrap().is_good();
            if through_centre {
                assert!(!good);
            }
        }
        let sq = dev(&square_torus(), 2);
        let rep = sq.strong_residual_convexity(10_000);
        assert!(rep.bad.is_empty() && rep.undecided.is_empty() && rep.ridges > 0);
    }

    #[test]
    fn cube_ridges_are_good() {
        // an L of boundary edges around a corner of the 2x2 end face is not
        // convex even though the square it cuts through touches the ridge
        let dc = dev(&cube_torus(), 2);
        let ridges = dc.explored_ridges();
        assert!(!ridges.is_empty());
        for &(c, e) in ridges.iter().take(6) {
            assert!(dc.good_ridge_check(c, e, 10_000).unwrap().is_good());
        }
    }

    #[test]
    fn certification_paths() {
        let (v, _) = certify_convexity(&square_torus(), 0, 2).unwrap();
        assert_eq!(v.theorem_path, Some(true));
        assert!(v.certified());
        let (v, _) = certify_convexity(&cube_torus(), 0, 1).unwrap();
        assert!(v.certified());
        let (v, _) = certify_convexity(&hexagon_torus(), 0, 2).unwrap();
        assert_eq!(v.theorem_path, None);
        assert!(!v.direct_path && !v.disagreement);
        let (v, _) = certify_convexity(&benoist_triangles(), 0, 6).unwrap();
        assert!(!v.overlaps.is_empty() && !v.certified());
    }

    #[test]
    fn galleries_on_the_square_torus() {
        let dc = dev(&square_torus(), 4);
        for s in 0..4 {
            let g = dc.gallery_trace(s, 4).unwrap();
            assert_eq!(g.cells.len(), 5);
            let checks = dc.gallery_checks(&g);
            assert!(checks.all(), "{checks:?}");
            let angles = dc.stabilization(&g);
            assert!(angles.windows(2).all(|w| w[0] > w[1]) && *angles.last().unwrap() == 0.0);
            // the square has exactly one facet opposite each facet
            assert_eq!(dc.eligible_next(g.cells[1], dc.spec.pairings[&FacetId { polytope: 0, facet: s }].target.facet).len(), 1);
        }
        let cert = dc.proper_convexity_certificate(4, 1e-3).unwrap();
        assert!(cert.simplex.is_none());
        assert!(cert.entries.iter().all(|e| !e.stable && e.angle > 0.03 && e.angle < 0.1));
    }

    #[test]
    fn q_sigma_of_the_square() {
        let dc = dev(&square_torus(), 0);
        let p = &dc.spec.polytopes[0];
        let s = facet_through(p, &[&[1, 0], &[1, 1]]);
        let qs = dc.q_sigma(s);
        // the strip x >= 1, 0 <= y <= 1 of the chart, closed up on the sphere
        assert!(qs.contains(&ray(&[2, 0, 1])));
        assert!(qs.contains(&ray(&[5, 1, 1])));
        assert!(!qs.contains(&ray(&[1, 2, 2])));
        assert!(!qs.contains(&ray(&[1, 1, 2])));
    }

    #[test]
    fn general_position_needs_full_rank() {
        assert!(general_position(&[ray(&[1, 0, 0]), ray(&[0, 1, 0]), ray(&[0, 0, 1])]));
        assert!(!general_position(&[ray(&[1, 0, 0]), ray(&[0, 1, 0]), ray(&[1, 1, 0])]));
    }
}
