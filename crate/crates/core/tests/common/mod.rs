#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use polyglue::scalar::qvec;
use polyglue::{Cone, Subspace, Q};

/// A handful of small integer vectors in dimension 3 or 4.
pub fn vectors() -> impl Strategy<Value = (usize, Vec<Vec<Q>>)> {
    (3usize..=4).prop_flat_map(|n| {
        (Just(n), prop::collection::vec(prop::collection::vec(-3i64..=3, n), 1..=7))
            .prop_map(|(n, vs)| (n, vs.iter().map(|v| qvec(v)).collect()))
    })
}

pub fn two_families() -> impl Strategy<Value = (usize, Vec<Vec<Q>>, Vec<Vec<Q>>)> {
    (3usize..=4).prop_flat_map(|n| {
        let fam = || prop::collection::vec(prop::collection::vec(-3i64..=3, n), 1..=5);
        (Just(n), fam(), fam()).prop_map(|(n, a, b)| {
            (n, a.iter().map(|v| qvec(v)).collect(), b.iter().map(|v| qvec(v)).collect())
        })
    })
}

fn ensure(ok: bool, what: &str) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

/// Generators -> halfspaces -> generators gives the same cone, and the
/// input rays lie in it.
pub fn dd_roundtrip(n: usize, rays: &[Vec<Q>]) -> Result<(), TestCaseError> {
    let c = Cone::from_generators(n, rays, &[]);
    ensure(rays.iter().all(|r| c.contains(r)), "input ray outside")?;
    let h = Cone::from_halfspaces(n, &c.halfspaces);
    ensure(h.equal(&c), "V -> H -> V changed the cone")?;
    ensure(h.generators.len() == c.generators.len(), "extreme ray count changed")?;
    // the halfspace description is reproduced as well
    let back = Cone::from_halfspaces(n, &c.halfspaces);
    ensure(back.halfspaces.len() == c.halfspaces.len(), "facet count changed")
}

pub fn biduality(n: usize, rays: &[Vec<Q>]) -> Result<(), TestCaseError> {
    let c = Cone::from_generators(n, rays, &[]);
    ensure(c.dual().dual().equal(&c), "C** != C")
}

/// `(A ∩ B)* = A* + B*`.
pub fn dual_of_intersection(n: usize, a: &[Vec<Q>], b: &[Vec<Q>]) -> Result<(), TestCaseError> {
    let (ca, cb) = (Cone::from_halfspaces(n, a), Cone::from_halfspaces(n, b));
    let lhs = ca.intersect(&cb).dual();
    let rhs = ca.dual().hull_union(&cb.dual());
    ensure(lhs.equal(&rhs), "(A ∩ B)* != A* + B*")
}

/// `C = L + K` with `K` pointed and orthogonal to `L`.
pub fn decomposition(n: usize, rays: &[Vec<Q>]) -> Result<(), TestCaseError> {
    let c = Cone::from_generators(n, rays, &[]);
    let (l, k) = c.lineality_decomposition();
    ensure(k.is_pointed(), "line-free part has lines")?;
    let perp = l.orthogonal_complement();
    ensure(k.generators.iter().all(|g| perp.contains(g)), "line-free part not orthogonal")?;
    let back = Cone::from_generators(n, &k.generators, &l.basis);
    ensure(back.equal(&c), "L + K != C")?;
    ensure(l.dim() == c.lineality_dim(), "lineality dimension")
}

pub fn complement_involution(n: usize, vs: &[Vec<Q>]) -> Result<(), TestCaseError> {
    let s = Subspace::span(n, vs);
    let cc = s.orthogonal_complement().orthogonal_complement();
    ensure(cc.equals(&s), "complement is not an involution")?;
    ensure(s.dim() + s.orthogonal_complement().dim() == n, "dimensions do not add up")
}

/// `Lk(f;P) = Lk(f_(e;P); Lk(e;P))` for every nested pair of proper faces
/// `e ⊊ f` of every catalog polytope. Returns the number of pairs checked.
pub fn link_identity_catalog() -> Result<usize, String> {
    let mut checked = 0;
    for (name, p) in polyglue::fixtures::polytope_catalog() {
        let top = p.top();
        for e in 0..top {
            let lk_e = p.link(e).map_err(|x| format!("{name}: {x}"))?;
            for f in 0..top {
                let (ve, vf) = (p.faces[e].vertices, p.faces[f].vertices);
                if e == f || ve & !vf != 0 {
                    continue;
                }
                let fe = p.face_in_link(e, f).map_err(|x| format!("{name}: {x}"))?;
                let direct = p.link(f).map_err(|x| format!("{name}: {x}"))?;
                let iterated = lk_e.link(fe).map_err(|x| format!("{name}: {x}"))?;
                if !direct.cone.equal(&iterated.cone) {
                    return Err(format!("{name}: faces {e} < {f}"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}
