//! Named polytopes and gluing specifications used by tests, benches and the
//! CLI `fixtures` command.
//!
//! Polytopes are given in the affine chart `x_{n+1} = 1`.

use crate::polytope::Polytope;
use crate::scalar::{q, Approx, Scalar, Q};

/// Rays `(p, 1)` over chart points with rational coordinates `num/den`.
pub fn chart<S: Scalar>(points: &[&[(i64, i64)]]) -> Vec<Vec<S>> {
    points
        .iter()
        .map(|p| {
            let mut r: Vec<S> = p.iter().map(|&(n, d)| S::from_q(&q(n, d))).collect();
            r.push(S::one());
            r
        })
        .collect()
}

fn int_chart(points: &[&[i64]]) -> Vec<Vec<Q>> {
    points
        .iter()
        .map(|p| {
            let mut r: Vec<Q> = p.iter().map(|&x| Q::from_i64(x)).collect();
            r.push(Q::from_i64(1));
            r
        })
        .collect()
}

fn build(rays: Vec<Vec<Q>>) -> Polytope<Q> {
    Polytope::from_vertices(&rays).expect("fixture polytope")
}

pub fn triangle() -> Polytope<Q> {
    build(int_chart(&[&[0, 0], &[1, 0], &[0, 1]]))
}

pub fn square() -> Polytope<Q> {
    build(int_chart(&[&[0, 0], &[1, 0], &[1, 1], &[0, 1]]))
}

/// A rational pentagon; thinness and triangularity are combinatorial
/// enough that the regular one is not needed.
pub fn pentagon() -> Polytope<Q> {
    build(int_chart(&[&[0, 0], &[2, 0], &[3, 2], &[1, 3], &[-1, 2]]))
}

pub fn hexagon() -> Polytope<Q> {
    build(int_chart(&[&[1, 0], &[2, 0], &[3, 1], &[2, 2], &[1, 2], &[0, 1]]))
}

pub fn tetrahedron() -> Polytope<Q> {
    build(int_chart(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]))
}

pub fn square_pyramid() -> Polytope<Q> {
    build(int_chart(&[&[1, 1, 0], &[1, -1, 0], &[-1, 1, 0], &[-1, -1, 0], &[0, 0, 1]]))
}

pub fn cube() -> Polytope<Q> {
    let mut pts = Vec::new();
    for i in 0..8i64 {
        pts.push(vec![i & 1, i >> 1 & 1, i >> 2 & 1]);
    }
    let refs: Vec<&[i64]> = pts.iter().map(|p| p.as_slice()).collect();
    build(int_chart(&refs))
}

pub fn octahedron() -> Polytope<Q> {
    build(int_chart(&[
        &[1, 0, 0],
        &[-1, 0, 0],
        &[0, 1, 0],
        &[0, -1, 0],
        &[0, 0, 1],
        &[0, 0, -1],
    ]))
}

pub fn pentagonal_prism() -> Polytope<Q> {
    let base = [[0, 0], [2, 0], [3, 2], [1, 3], [-1, 2]];
    let pts: Vec<[i64; 3]> =
        (0..2).flat_map(|z| base.iter().map(move |p| [p[0], p[1], z])).collect();
    let refs: Vec<&[i64]> = pts.iter().map(|p| p.as_slice()).collect();
    build(int_chart(&refs))
}

/// All permutations of `(±2/3, ±1, ±1)`: 24 vertices, 8 triangles and 6
/// octagons.
pub fn truncated_cube() -> Polytope<Q> {
    let mut rays = Vec::new();
    for pos in 0..3 {
        for s in 0..8 {
            let mut p = [q(1, 1), q(1, 1), q(1, 1)];
            p[pos] = q(2, 3);
            for (k, x) in p.iter_mut().enumerate() {
                if s >> k & 1 == 1 {
                    *x = -x.clone();
                }
            }
            let mut r = p.to_vec();
            r.push(Q::from_i64(1));
            rays.push(r);
        }
    }
    build(rays)
}

const PHI: f64 = 1.618_033_988_749_895;

fn float_build(pts: Vec<[f64; 3]>) -> Polytope<Approx> {
    let rays: Vec<Vec<Approx>> =
        pts.iter().map(|p| vec![Approx(p[0]), Approx(p[1]), Approx(p[2]), Approx(2.0)]).collect();
    Polytope::from_vertices(&rays).expect("fixture polytope")
}

fn cyclic(p: [f64; 3]) -> [[f64; 3]; 3] {
    [p, [p[2], p[0], p[1]], [p[1], p[2], p[0]]]
}

fn signs(p: [f64; 3]) -> Vec<[f64; 3]> {
    let mut out: Vec<[f64; 3]> = Vec::new();
    for s in 0..8 {
        let mut x = p;
        for (k, c) in x.iter_mut().enumerate() {
            if s >> k & 1 == 1 {
                *c = -*c;
            }
        }
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Float backend: coordinates involve the golden ratio.
pub fn icosahedron() -> Polytope<Approx> {
    let pts = cyclic([0.0, 1.0, PHI]).iter().flat_map(|&p| signs(p)).collect();
    float_build(pts)
}

pub fn dodecahedron() -> Polytope<Approx> {
    let mut pts = signs([1.0, 1.0, 1.0]);
    pts.extend(cyclic([0.0, 1.0 / PHI, PHI]).iter().flat_map(|&p| signs(p)));
    float_build(pts)
}

/// The exact catalog by name.
pub fn polytope_catalog() -> Vec<(&'static str, Polytope<Q>)> {
    vec![
        ("triangle", triangle()),
        ("square", square()),
        ("pentagon", pentagon()),
        ("hexagon", hexagon()),
        ("tetrahedron", tetrahedron()),
        ("square-pyramid", square_pyramid()),
        ("cube", cube()),
        ("octahedron", octahedron()),
        ("pentagonal-prism", pentagonal_prism()),
        ("truncated-cube", truncated_cube()),
    ]
}

pub fn float_catalog() -> Vec<(&'static str, Polytope<Approx>)> {
    vec![("icosahedron", icosahedron()), ("dodecahedron", dodecahedron())]
}


// ---- gluing specifications ------------------------------------------------

use crate::complex::{FacetId, GluingSpec};
use crate::linalg::Matrix;
use crate::scalar::canon_ray;

/// Homogeneous integer ray.
pub fn ray(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| Q::from_i64(x)).collect()
}

fn poly(rays: &[&[i64]]) -> Polytope<Q> {
    build(rays.iter().map(|r| ray(r)).collect())
}

/// Index of the facet whose vertices are exactly the given rays.
pub fn facet_through_rays(p: &Polytope<Q>, rays: &[Vec<Q>]) -> usize {
    let mut want: Vec<usize> =
        rays.iter().map(|r| p.vertex_index(&canon_ray(r)).expect("vertex")).collect();
    want.sort_unstable();
    (0..p.facets.len())
        .find(|&i| crate::polytope::bits(p.facet_mask(i)).collect::<Vec<_>>() == want)
        .expect("facet through the given vertices")
}

/// Index of the facet through the given chart points.
pub fn facet_through(p: &Polytope<Q>, pts: &[&[i64]]) -> usize {
    facet_through_rays(p, &int_chart(pts))
}

pub fn m(rows: &[&[i64]]) -> Matrix<Q> {
    rows.iter().map(|r| ray(r)).collect()
}

fn translation(t: &[i64]) -> Matrix<Q> {
    let n = t.len();
    (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| {
                    if i == j {
                        Q::from_i64(1)
                    } else if j == n && i < n {
                        Q::from_i64(t[i])
                    } else {
                        Q::from_i64(0)
                    }
                })
                .collect()
        })
        .collect()
}

struct Builder {
    polys: Vec<(String, Polytope<Q>)>,
    pairs: Vec<(FacetId, FacetId, Matrix<Q>)>,
}

impl Builder {
    fn new(polys: Vec<(&str, Polytope<Q>)>) -> Self {
        Builder { polys: polys.into_iter().map(|(n, p)| (n.to_string(), p)).collect(), pairs: Vec::new() }
    }

    fn facet(&self, p: usize, rays: &[&[i64]]) -> FacetId {
        let rs: Vec<Vec<Q>> = rays.iter().map(|r| ray(r)).collect();
        FacetId { polytope: p, facet: facet_through_rays(&self.polys[p].1, &rs) }
    }

    fn pair(mut self, a: (usize, &[&[i64]]), b: (usize, &[&[i64]]), mat: Matrix<Q>) -> Self {
        let (fa, fb) = (self.facet(a.0, a.1), self.facet(b.0, b.1));
        self.pairs.push((fa, fb, mat));
        self
    }

    fn done(self, n: usize) -> GluingSpec<Q> {
        GluingSpec::new(n, self.polys, self.pairs).expect("fixture spec")
    }
}

/// Unit square with opposite edges glued by translations.
pub fn square_torus() -> GluingSpec<Q> {
    Builder::new(vec![("Q", square())])
        .pair((0, &[&[0, 0, 1], &[1, 0, 1]]), (0, &[&[0, 1, 1], &[1, 1, 1]]), translation(&[0, 1]))
        .pair((0, &[&[0, 0, 1], &[0, 1, 1]]), (0, &[&[1, 0, 1], &[1, 1, 1]]), translation(&[1, 0]))
        .done(2)
}

/// Unit cube with opposite faces glued by translations.
pub fn cube_torus() -> GluingSpec<Q> {
    let c = cube();
    let mut b = Builder::new(vec![("C", c)]);
    for axis in 0..3 {
        let face = |v: i64| -> Vec<Vec<i64>> {
            (0..4)
                .map(|k| {
                    let mut p = vec![0i64; 4];
                    let others: Vec<usize> = (0..3).filter(|&a| a != axis).collect();
                    p[others[0]] = k & 1;
                    p[others[1]] = k >> 1 & 1;
                    p[axis] = v;
                    p[3] = 1;
                    p
                })
                .collect()
        };
        let (lo, hi) = (face(0), face(1));
        let lo: Vec<&[i64]> = lo.iter().map(|v| v.as_slice()).collect();
        let hi: Vec<&[i64]> = hi.iter().map(|v| v.as_slice()).collect();
        let mut t = vec![0i64; 3];
        t[axis] = 1;
        b = b.pair((0, &lo), (0, &hi), translation(&t));
    }
    b.done(3)
}

fn rot90() -> Matrix<Q> {
    m(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 1]])
}

/// The quadrilateral `(1,0),(2,0),(0,2),(0,1)` cut into four triangles,
/// glued by the homothety by 2 and the rotation by a quarter turn. The
/// developed image is the punctured plane.
pub fn benoist_triangles() -> GluingSpec<Q> {
    let (a, b, c, d, e, f): (&[i64], &[i64], &[i64], &[i64], &[i64], &[i64]) =
        (&[1, 0, 1], &[2, 0, 1], &[1, 1, 1], &[1, 1, 2], &[0, 1, 1], &[0, 2, 1]);
    let h = m(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 1]]);
    let h_inv = m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]]);
    let id = translation(&[0, 0]);
    Builder::new(vec![
        ("T1", poly(&[a, b, c])),
        ("T2", poly(&[a, c, d])),
        ("T3", poly(&[d, c, e])),
        ("T4", poly(&[e, c, f])),
    ])
    .pair((0, &[a, b]), (3, &[e, f]), rot90())
    .pair((0, &[a, c]), (1, &[a, c]), id.clone())
    .pair((0, &[b, c]), (1, &[a, d]), h_inv)
    .pair((1, &[c, d]), (2, &[c, d]), id.clone())
    .pair((2, &[c, e]), (3, &[c, e]), id)
    .pair((2, &[d, e]), (3, &[c, f]), h)
    .done(2)
}

/// An affine regular hexagon with opposite edges glued by translations.
/// Unions of neighbours have reflex angles.
pub fn hexagon_torus() -> GluingSpec<Q> {
    let v: [&[i64]; 6] = [&[1, 0, 1], &[2, 0, 1], &[3, 1, 1], &[2, 2, 1], &[1, 2, 1], &[0, 1, 1]];
    Builder::new(vec![("H", hexagon())])
        .pair((0, &[v[0], v[1]]), (0, &[v[3], v[4]]), translation(&[0, 2]))
        .pair((0, &[v[1], v[2]]), (0, &[v[4], v[5]]), translation(&[-2, 1]))
        .pair((0, &[v[2], v[3]]), (0, &[v[5], v[0]]), translation(&[-2, -1]))
        .done(2)
}

/// The unit square cut by both diagonals into four right isosceles
/// triangles, with the torus gluing on the outer edges. Centres are
/// 4-valent, corners 8-valent.
pub fn wallpaper() -> GluingSpec<Q> {
    let (o, x, xy, y, c): (&[i64], &[i64], &[i64], &[i64], &[i64]) =
        (&[0, 0, 1], &[1, 0, 1], &[1, 1, 1], &[0, 1, 1], &[1, 1, 2]);
    let id = translation(&[0, 0]);
    Builder::new(vec![
        ("B", poly(&[o, x, c])),
        ("R", poly(&[x, xy, c])),
        ("T", poly(&[xy, y, c])),
        ("L", poly(&[y, o, c])),
    ])
    .pair((0, &[x, c]), (1, &[x, c]), id.clone())
    .pair((1, &[xy, c]), (2, &[xy, c]), id.clone())
    .pair((2, &[y, c]), (3, &[y, c]), id.clone())
    .pair((3, &[o, c]), (0, &[o, c]), id)
    .pair((0, &[o, x]), (2, &[y, xy]), translation(&[0, 1]))
    .pair((3, &[o, y]), (1, &[x, xy]), translation(&[1, 0]))
    .done(2)
}

/// Three unit squares with only three around one vertex class: a valid
/// pairing that fails the link condition.
pub fn three_squares() -> GluingSpec<Q> {
    let (o, x, xy, y): (&[i64], &[i64], &[i64], &[i64]) = (&[0, 0, 1], &[1, 0, 1], &[1, 1, 1], &[0, 1, 1]);
    let r_inv = m(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 1]]);
    let turn = m(&[&[0, 1, 0], &[-1, 0, 2], &[0, 0, 1]]);
    let mut b = Builder::new(vec![("A", square()), ("B", square()), ("C", square())]);
    for i in 0..3 {
        b = b.pair((i, &[o, y]), ((i + 1) % 3, &[o, x]), r_inv.clone());
        b = b.pair((i, &[x, xy]), (i, &[y, xy]), turn.clone());
    }
    b.done(2)
}

/// Gluing specifications by name.
pub fn spec_catalog() -> Vec<(&'static str, GluingSpec<Q>)> {
    vec![
        ("square-torus", square_torus()),
        ("cube-3-torus", cube_torus()),
        ("benoist-triangles", benoist_triangles()),
        ("hexagon-torus", hexagon_torus()),
        ("right-isosceles-wallpaper", wallpaper()),
        ("three-squares", three_squares()),
    ]
}
