//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use proptest::test_runner::{Config, TestRunner};

use polyglue::developer::{certify_convexity, develop, wrap_certificate, DevelopOptions, RidgeVerdict};
use polyglue::fixtures::*;
use polyglue::scalar::with_eps;
use polyglue::{Approx, Polytope, Scalar, Q};

/// Float tolerances over which float verdicts must not change.
const EPS_SWEEP: [f64; 4] = [1e-12, 1e-9, 1e-7, 1e-6];
const CLASSIFY_BUDGET: Duration = Duration::from_secs(10);
const CERTIFY_BUDGET: Duration = Duration::from_secs(60);
const PROPERTY_CASES: u32 = 1000;
const OVERLAP_CELLS: usize = 40;
const STABLE_ANGLE: f64 = 1e-3;
const GOOD_RIDGE_CAP: usize = 10_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(n: usize, o: &Outcome) {
    println!("criterion {n}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
}

/// (triangular, cone-like, thin)
fn verdict<S: Scalar>(p: &Polytope<S>) -> (bool, bool, bool) {
    (p.is_triangular().is_some(), p.is_cone_like().is_some(), p.is_thin().is_some())
}

fn criterion_1() -> Outcome {
    // None: the table does not constrain cone-likeness
    let exact: Vec<(&str, Polytope<Q>, bool, Option<bool>, bool)> = vec![
        ("triangle", triangle(), true, Some(true), true),
        ("square", square(), false, None, true),
        ("pentagon", pentagon(), false, None, false),
        ("hexagon", hexagon(), false, None, false),
        ("tetrahedron", tetrahedron(), true, Some(true), true),
        ("square-pyramid", square_pyramid(), true, Some(true), true),
        ("cube", cube(), false, None, true),
        ("octahedron", octahedron(), false, None, true),
    ];
    let float: Vec<(&str, Polytope<Approx>, bool, bool)> =
        vec![("icosahedron", icosahedron(), false, true), ("dodecahedron", dodecahedron(), false, false)];
    let start = Instant::now();
    let mut bad = Vec::new();
    for (name, p, tri, cone, thin) in &exact {
        let (t, c, h) = verdict(p);
        if t != *tri || cone.is_some_and(|x| x != c) || h != *thin {
            bad.push(name.to_string());
        }
    }
    for (name, p, tri, thin) in &float {
        let (t, _, h) = verdict(p);
        if t != *tri || h != *thin {
            bad.push(name.to_string());
        }
    }
    let elapsed = start.elapsed();
    // stability of float verdicts, polytopes rebuilt under each tolerance
    for eps in EPS_SWEEP {
        with_eps(eps, || {
            for (name, build, tri, thin) in
                [("icosahedron", icosahedron as fn() -> Polytope<Approx>, false, true), ("dodecahedron", dodecahedron, false, false)]
            {
                let p = build();
                let (t, _, h) = verdict(&p);
                if t != tri || h != thin {
                    bad.push(format!("{name}@{eps:e}"));
                }
            }
        });
    }
    Outcome {
        pass: bad.is_empty() && elapsed < CLASSIFY_BUDGET,
        detail: format!(
            "{} polytopes, table in {:.2}s (budget {}s), float eps sweep {:?}{}",
            exact.len() + float.len(),
            elapsed.as_secs_f64(),
            CLASSIFY_BUDGET.as_secs(),
            EPS_SWEEP,
            if bad.is_empty() { String::new() } else { format!(", mismatches: {bad:?}") }
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut total = 0;
    let mut disagree = 0;
    for spec in [square_torus(), cube_torus()] {
        let dc = develop(&spec, 0, 3, DevelopOptions::default()).expect("develops");
        let audit = dc.residual_convexity_audit();
        total += audit.cells.len();
        disagree += audit.cells.iter().filter(|c| !c.agree()).count();
    }
    Outcome {
        pass: total > 0 && disagree == 0,
        detail: format!("{total} fully explored cells, {disagree} disagreements"),
    }
}

fn criterion_3() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (name, spec) in spec_catalog() {
        let poincare = spec.poincare_check().is_ok_and(|r| r.iter().all(|c| c.passes()));
        if !spec.is_valid() || !poincare {
            continue;
        }
        let rc = spec.residual_convexity().iter().all(|f| f.ridge_link);
        let no_tri = spec.triangular_scan().iter().all(|(_, w)| w.is_none());
        if !(rc && no_tri) {
            continue;
        }
        let depth = if spec.dimension == 2 { 3 } else { 2 };
        let dc = develop(&spec, 0, depth, DevelopOptions::default()).expect("develops");
        let rep = dc.strong_residual_convexity(GOOD_RIDGE_CAP);
        pass &= rep.bad.is_empty() && rep.undecided.is_empty() && rep.ridges > 0;
        notes.push(format!("{name}: {} ridges, {} bad", rep.ridges, rep.bad.len()));
    }
    let spec = wallpaper();
    let dc = develop(&spec, 0, 3, DevelopOptions::default()).expect("develops");
    let (mut four, mut four_bad) = (0, 0);
    for (c, e) in dc.explored_ridges() {
        if dc.residue(c, e).map(|r| r.len()) == Ok(4) {
            four += 1;
            if matches!(dc.good_ridge_check(c, e, GOOD_RIDGE_CAP), Ok(RidgeVerdict::Bad { .. })) {
                four_bad += 1;
            }
        }
    }
    pass &= four > 0 && four == four_bad;
    notes.push(format!("wallpaper: {four_bad}/{four} 4-valent vertices bad"));
    Outcome { pass, detail: notes.join("; ") }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, spec, depth) in [("square-torus", square_torus(), 5), ("cube-3-torus", cube_torus(), 3)] {
        let (v, dc) = certify_convexity(&spec, 0, depth).expect("develops");
        let all = v.per_depth.len() == depth
            && v.per_depth.iter().all(|d| d.polyball && d.convex_ridge_link && d.convex_direct && d.proper);
        pass &= v.theorem_path == Some(true) && v.direct_path && all && !v.disagreement;
        notes.push(format!("{name} depth {depth}: {} cells", dc.cell_count()));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < CERTIFY_BUDGET;
    notes.push(format!("{:.2}s (budget {}s)", elapsed.as_secs_f64(), CERTIFY_BUDGET.as_secs()));
    Outcome { pass, detail: notes.join("; ") }
}

fn criterion_5() -> Outcome {
    let spec = benoist_triangles();
    let rc = spec.residual_convexity().iter().all(|f| f.ridge_link && f.direct);
    let dc = develop(&spec, 0, 6, DevelopOptions::default()).expect("develops");
    let star_overlap = dc.overlaps.first().map(|o| (o.depth, o.cells));
    let wrap = wrap_certificate(&spec, 0, 6, 12);
    let cells = wrap.as_ref().map(|w| w.cells);
    Outcome {
        pass: rc && star_overlap.is_some() && cells.is_some_and(|c| c <= OVERLAP_CELLS),
        detail: format!(
            "residually convex: {rc}; developed gallery around the origin closes up on another sheet after {} cells (limit {OVERLAP_CELLS}); star development overlap at (depth, cells) = {:?}",
            cells.map_or("no".into(), |c| c.to_string()),
            star_overlap
        ),
    }
}

fn criterion_6() -> Outcome {
    let spec = square_torus();
    let dc = develop(&spec, 0, 5, DevelopOptions::default()).expect("develops");
    let mut pass = true;
    for s in 0..4 {
        match dc.gallery_trace(s, 5) {
            Ok(g) => pass &= g.cells.len() == 6 && dc.gallery_checks(&g).all(),
            Err(_) => pass = false,
        }
    }
    let cert = dc.proper_convexity_certificate(5, STABLE_ANGLE).expect("galleries");
    let thick = spec.thickness_scan();
    let hyp_ii_fails = thick.iter().all(|(_, t)| !t);
    pass &= cert.simplex.is_none() && !cert.thick_dual && hyp_ii_fails;
    let min_angle = cert.entries.iter().map(|e| e.angle).fold(f64::INFINITY, f64::min);
    Outcome {
        pass,
        detail: format!(
            "4 directions, K = 5; no certificate (smallest last-step angle {min_angle:.4} > {STABLE_ANGLE}); dual thick: {}",
            !hyp_ii_fails
        ),
    }
}

fn criterion_7() -> Outcome {
    let cfg = Config { cases: PROPERTY_CASES, failure_persistence: None, ..Config::default() };
    let mut failures = Vec::new();
    let mut run = |name: &str, r: Result<(), String>| {
        if let Err(e) = r {
            failures.push(format!("{name}: {e}"));
        }
    };
    run("dd-roundtrip", TestRunner::new(cfg.clone()).run(&common::vectors(), |(n, v)| common::dd_roundtrip(n, &v)).map_err(|e| e.to_string()));
    run("biduality", TestRunner::new(cfg.clone()).run(&common::vectors(), |(n, v)| common::biduality(n, &v)).map_err(|e| e.to_string()));
    run(
        "dual-of-intersection",
        TestRunner::new(cfg.clone())
            .run(&common::two_families(), |(n, a, b)| common::dual_of_intersection(n, &a, &b))
            .map_err(|e| e.to_string()),
    );
    run("decomposition", TestRunner::new(cfg.clone()).run(&common::vectors(), |(n, v)| common::decomposition(n, &v)).map_err(|e| e.to_string()));
    let links = common::link_identity_catalog();
    let pairs = links.as_ref().copied().unwrap_or(0);
    run("link-identity", links.map(|_| ()));
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "4 properties x {PROPERTY_CASES} cases, link identity on {pairs} face pairs{}",
            if failures.is_empty() { String::new() } else { format!(", failures: {failures:?}") }
        ),
    }
}

fn criterion_8() -> Outcome {
    let mut n = 0;
    let mut bad = Vec::new();
    for (name, p) in polytope_catalog() {
        n += 1;
        if p.dual_triangularity_criterion() != Ok(p.is_triangular().is_none()) {
            bad.push(name);
        }
    }
    for (name, p) in float_catalog() {
        n += 1;
        if p.dual_triangularity_criterion() != Ok(p.is_triangular().is_none()) {
            bad.push(name);
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{n} polytopes, disagreements: {bad:?}") }
}

fn main() {
    let criteria: [fn() -> Outcome; 8] =
        [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let o = c();
        report(i + 1, &o);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        eprintln!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
