//! `polyglue`: classify polytopes, check gluings, develop and certify.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 undecided or needs
//! deeper development, 3 input error.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polyglue::developer::{
    certify_convexity, depth_reports, develop, wrap_certificate, DevelopOptions, Developed, GalleryError,
    RidgeVerdict,
};
use polyglue::io::{self, parse_polytope, parse_spec, render_svg, Backend, DocError, RenderOptions, SpecDocument};
use polyglue::scalar::with_eps;
use polyglue::{Approx, GluingSpec, Polytope, Scalar, Q};

#[derive(Parser)]
#[command(name = "polyglue", version, about = "Gluings of spherical polytopes and their convexity")]
struct Cli {
    /// Arithmetic backend; defaults to the document's, else exact.
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    /// Tolerance of the float backend.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Also write the JSON report here.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Write an SVG picture here (dimension 2).
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Leave timings out of the report.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Cmd {
    /// Triangular, cone-like and thin tests of one polytope.
    Classify { input: String },
    /// Pairing validity, ridge cycles, residual convexity and scans.
    Check { input: String },
    /// Develop the universal cover and audit the explored region.
    Develop {
        input: String,
        #[arg(long, default_value = "0")]
        base: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Search cap for the good-ridge enumeration.
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
    },
    /// Certify convexity of the stars of the base cell.
    Certify {
        input: String,
        #[arg(long, default_value = "0")]
        base: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Trace a directed gallery and its supporting hyperplane estimate.
    Gallery {
        input: String,
        #[arg(long, default_value = "0")]
        base: String,
        #[arg(long)]
        facet: usize,
        #[arg(long, default_value_t = 5)]
        steps: usize,
    },
    /// Draw the developed cells in the chart z = 1.
    Render {
        input: String,
        #[arg(long, default_value = "0")]
        base: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Highlight the gallery through this facet of the base cell.
        #[arg(long)]
        gallery: Option<usize>,
        /// Mark bad ridges.
        #[arg(long)]
        mark_bad: bool,
    },
    /// List the shipped fixtures, or print one as a document.
    Fixtures { name: Option<String> },
}

enum Outcome {
    Pass,
    Fail,
    Undecided,
}

struct Failure(u8, String);

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        Failure(3, e.to_string())
    }
}

fn read_input(input: &str) -> Result<String, Failure> {
    if Path::new(input).exists() {
        return std::fs::read_to_string(input).map_err(|e| Failure(3, format!("{input}: {e}")));
    }
    io::fixture_documents()
        .into_iter()
        .find(|(n, _)| n == input)
        .map(|(_, v)| serde_json::to_string(&v).expect("json"))
        .ok_or_else(|| Failure(3, format!("{input}: no such file or fixture")))
}

fn base_index<S: Scalar>(spec: &GluingSpec<S>, base: &str) -> Result<usize, Failure> {
    spec.polytope_index(base)
        .or_else(|| base.parse::<usize>().ok().filter(|&i| i < spec.polytopes.len()))
        .ok_or_else(|| Failure(3, format!("unknown base polytope {base:?}")))
}

fn texts<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_text())).collect())
}

fn classify<S: Scalar>(p: &Polytope<S>) -> (Value, Outcome) {
    let tri = p.is_triangular();
    let thin = p.is_thin();
    let report = json!({
        "dimension": p.dim,
        "f_vector": p.f_vector(),
        "triangular": tri.is_some(),
        "triangular_witness": tri.map(|(e, f)| json!({"ridge": p.vertex_rays(e).iter().map(|v| texts(v)).collect::<Vec<_>>(),
                                                       "face": p.vertex_rays(f).iter().map(|v| texts(v)).collect::<Vec<_>>()})),
        "cone_like": p.is_cone_like().is_some(),
        "thin": thin.is_some(),
        "thin_witness": thin.map(|h| texts(&h)),
        "dual_criterion_non_triangular": p.dual_triangularity_criterion().ok(),
    });
    (report, Outcome::Pass)
}

fn check<S: Scalar>(spec: &GluingSpec<S>) -> (Value, Outcome) {
    let violations = spec.validate();
    if !violations.is_empty() {
        return (json!({"valid": false, "violations": violations}), Outcome::Fail);
    }
    let poincare = spec.poincare_check().unwrap_or_default();
    let residual = spec.residual_convexity();
    let tri = spec.triangular_scan();
    let thick = spec.thickness_scan();
    let ok = poincare.iter().all(|r| r.passes()) && residual.iter().all(|f| f.ridge_link && f.direct);
    let report = json!({
        "valid": true,
        "poincare": poincare,
        "poincare_passes": poincare.iter().all(|r| r.passes()),
        "residual_convexity": residual,
        "residually_convex": residual.iter().all(|f| f.ridge_link),
        "triangular": tri.iter().map(|(i, w)| json!({"polytope": spec.names[*i], "triangular": w.is_some()})).collect::<Vec<_>>(),
        "thick_dual": thick.iter().map(|(i, t)| json!({"polytope": spec.names[*i], "thick": t})).collect::<Vec<_>>(),
    });
    (report, if ok { Outcome::Pass } else { Outcome::Fail })
}

fn develop_report<S: Scalar>(dc: &Developed<S>, cap: usize) -> (Value, Outcome) {
    let wrap = wrap_certificate(&dc.spec, dc.cells[0].polytope, 4, 12);
    let per_depth = if dc.overlaps.is_empty() { depth_reports(dc) } else { Vec::new() };
    let audit = dc.residual_convexity_audit();
    let strong = dc.strong_residual_convexity(cap);
    let fails = !dc.overlaps.is_empty()
        || wrap.is_some()
        || per_depth.iter().any(|d| !(d.polyball && d.convex_ridge_link && d.convex_direct && d.proper))
        || audit.cells.iter().any(|c| !c.agree() || !c.facet_residues)
        || !strong.bad.is_empty();
    let outcome = if fails {
        Outcome::Fail
    } else if !strong.undecided.is_empty() {
        Outcome::Undecided
    } else {
        Outcome::Pass
    };
    let report = json!({
        "cells": dc.cell_count(),
        "depth": dc.depth,
        "overlaps": dc.overlaps,
        "injective": dc.overlaps.is_empty() && wrap.is_none(),
        "wrap_certificate": wrap.map(|w| json!({
            "facets": w.facets, "order": w.order, "cells": w.cells,
            "holonomy": w.holonomy.matrix().iter().map(|r| texts(r)).collect::<Vec<_>>(),
        })),
        "per_depth": per_depth,
        "audit": audit,
        "strong_audit": strong,
    });
    (report, outcome)
}

fn run_spec<S: Scalar>(cli: &Cli, doc: &SpecDocument) -> Result<(Value, Outcome), Failure> {
    let spec: GluingSpec<S> = doc.build()?;
    match &cli.cmd {
        Cmd::Check { .. } => Ok(check(&spec)),
        Cmd::Develop { base, depth, cap, .. } => {
            let b = base_index(&spec, base)?;
            let dc = develop(&spec, b, *depth, DevelopOptions::default()).map_err(|e| Failure(1, e.to_string()))?;
            write_svg(cli, &dc, &RenderOptions::default())?;
            Ok(develop_report(&dc, *cap))
        }
        Cmd::Certify { base, depth, .. } => {
            let b = base_index(&spec, base)?;
            let (v, dc) = certify_convexity(&spec, b, *depth).map_err(|e| Failure(1, e.to_string()))?;
            let wrap = wrap_certificate(&spec, b, 4, 12);
            let cert = dc.proper_convexity_certificate(dc.depth, 1e-3).ok();
            write_svg(cli, &dc, &RenderOptions::default())?;
            let ok = v.certified() && wrap.is_none();
            let report = json!({
                "certified": ok,
                "theorem_path": v.theorem_path,
                "direct_path": v.direct_path,
                "disagreement": v.disagreement,
                "per_depth": v.per_depth,
                "overlaps": v.overlaps,
                "wrap_certificate": wrap.map(|w| json!({"order": w.order, "cells": w.cells})),
                "proper_convexity": cert.map(|c| json!({
                    "simplex": c.simplex,
                    "thick_dual": c.thick_dual,
                    "hyperplanes": c.entries.iter().map(|e| json!({
                        "facet": e.facet, "hyperplane": texts(&e.hyperplane), "depth": e.depth,
                        "angle": e.angle, "stable": e.stable, "dual_in_pavilion": e.dual_in_pavilion,
                    })).collect::<Vec<_>>(),
                })),
            });
            Ok((report, if ok { Outcome::Pass } else { Outcome::Fail }))
        }
        Cmd::Gallery { base, facet, steps, .. } => {
            let b = base_index(&spec, base)?;
            if *facet >= spec.polytopes[b].facets.len() {
                return Err(Failure(3, format!("base polytope has no facet {facet}")));
            }
            let dc = develop(&spec, b, *steps, DevelopOptions::default()).map_err(|e| Failure(1, e.to_string()))?;
            let gal = match dc.gallery_trace(*facet, *steps) {
                Ok(g) => g,
                Err(GalleryError::NeedsDeeper(n)) => {
                    return Ok((json!({"error": "needs deeper development", "at": n}), Outcome::Undecided));
                }
                Err(e @ GalleryError::ConeLike { .. }) => return Ok((json!({"error": e.to_string()}), Outcome::Fail)),
            };
            let checks = dc.gallery_checks(&gal);
            write_svg(cli, &dc, &RenderOptions { gallery: gal.cells.clone(), bad_ridges: Vec::new() })?;
            let report = json!({
                "cells": gal.cells,
                "facets": gal.facets,
                "hyperplanes": gal.hyperplanes.iter().map(|h| texts(h)).collect::<Vec<_>>(),
                "estimate": texts(gal.hyperplanes.last().expect("nonempty")),
                "stabilization": dc.stabilization(&gal),
                "checks": checks,
            });
            Ok((report, if checks.all() { Outcome::Pass } else { Outcome::Fail }))
        }
        Cmd::Render { base, depth, gallery, mark_bad, .. } => {
            if spec.dimension != 2 {
                return Err(Failure(3, "render needs dimension 2".into()));
            }
            let b = base_index(&spec, base)?;
            let dc = develop(&spec, b, *depth, DevelopOptions::default()).map_err(|e| Failure(1, e.to_string()))?;
            let mut opts = RenderOptions::default();
            if let Some(f) = gallery {
                if let Ok(g) = dc.gallery_trace(*f, depth.saturating_sub(1)) {
                    opts.gallery = g.cells;
                }
            }
            if *mark_bad {
                opts.bad_ridges = dc
                    .explored_ridges()
                    .into_iter()
                    .filter(|&(c, e)| matches!(dc.good_ridge_check(c, e, 10_000), Ok(RidgeVerdict::Bad { .. })))
                    .collect();
            }
            let (svg, warnings) = render_svg(&dc, &opts);
            match &cli.svg {
                Some(p) => std::fs::write(p, &svg).map_err(|e| Failure(3, format!("{}: {e}", p.display())))?,
                None => {
                    let _ = write!(std::io::stdout(), "{svg}");
                }
            }
            Ok((json!({"cells": dc.cell_count(), "warnings": warnings}), Outcome::Pass))
        }
        Cmd::Classify { .. } | Cmd::Fixtures { .. } => unreachable!("not a spec command"),
    }
}

fn write_svg<S: Scalar>(cli: &Cli, dc: &Developed<S>, opts: &RenderOptions) -> Result<(), Failure> {
    if let Some(p) = &cli.svg {
        if dc.spec.dimension == 2 {
            let (svg, _) = render_svg(dc, opts);
            std::fs::write(p, svg).map_err(|e| Failure(3, format!("{}: {e}", p.display())))?;
        }
    }
    Ok(())
}

fn with_backend<R>(backend: Backend, eps: Option<f64>, exact: impl FnOnce() -> R, float: impl FnOnce() -> R) -> R {
    match backend {
        Backend::Exact => exact(),
        Backend::Float => with_eps(eps.unwrap_or(1e-9), float),
    }
}

fn run(cli: &Cli) -> Result<(Value, Outcome), Failure> {
    let pick = |doc: Backend| match cli.backend {
        Some(BackendArg::Exact) => Backend::Exact,
        Some(BackendArg::Float) => Backend::Float,
        None => doc,
    };
    match &cli.cmd {
        Cmd::Fixtures { name: None } => {
            let names: Vec<String> = io::fixture_documents().into_iter().map(|(n, _)| n).collect();
            Ok((json!({ "fixtures": names }), Outcome::Pass))
        }
        Cmd::Fixtures { name: Some(n) } => io::fixture_documents()
            .into_iter()
            .find(|(m, _)| m == n)
            .map(|(_, v)| (v, Outcome::Pass))
            .ok_or_else(|| Failure(3, format!("no fixture {n:?}"))),
        Cmd::Classify { input } => {
            let text = read_input(input)?;
            let (doc, b, eps) = parse_polytope(&text)?;
            let eps = cli.eps.or(eps);
            let backend = pick(b);
            let (report, outcome) = with_backend(
                backend,
                eps,
                || doc.build::<Q>().map(|p| classify(&p)),
                || doc.build::<Approx>().map(|p| classify(&p)),
            )
            .map_err(|e| Failure(3, format!("$: {e}")))?;
            Ok((json!({"backend": backend.name(), "classification": report}), outcome))
        }
        Cmd::Check { input }
        | Cmd::Develop { input, .. }
        | Cmd::Certify { input, .. }
        | Cmd::Gallery { input, .. }
        | Cmd::Render { input, .. } => {
            let text = read_input(input)?;
            let doc = parse_spec(&text)?;
            let backend = pick(doc.backend);
            let eps = cli.eps.or(doc.eps);
            let (report, outcome) = with_backend(backend, eps, || run_spec::<Q>(cli, &doc), || run_spec::<Approx>(cli, &doc))?;
            Ok((json!({"backend": backend.name(), "report": report}), outcome))
        }
    }
}

fn command_name(c: &Cmd) -> &'static str {
    match c {
        Cmd::Classify { .. } => "classify",
        Cmd::Check { .. } => "check",
        Cmd::Develop { .. } => "develop",
        Cmd::Certify { .. } => "certify",
        Cmd::Gallery { .. } => "gallery",
        Cmd::Render { .. } => "render",
        Cmd::Fixtures { .. } => "fixtures",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    let (mut report, code) = match result {
        Ok((r, o)) => {
            let code = match o {
                Outcome::Pass => 0,
                Outcome::Fail => 1,
                Outcome::Undecided => 2,
            };
            (r, code)
        }
        Err(Failure(code, msg)) => {
            eprintln!("polyglue: {msg}");
            (json!({ "error": msg }), code)
        }
    };
    if let Value::Object(o) = &mut report {
        o.insert("command".into(), json!(command_name(&cli.cmd)));
        o.insert("exit_code".into(), json!(code));
        if !cli.no_timing {
            o.insert("timing_ms".into(), json!(start.elapsed().as_millis() as u64));
        }
    }
    let text = serde_json::to_string_pretty(&report).expect("json");
    let is_render_stdout = matches!(cli.cmd, Cmd::Render { .. }) && cli.svg.is_none() && code == 0;
    if !is_render_stdout {
        // a closed pipe is not an error worth reporting
        let _ = writeln!(std::io::stdout(), "{text}");
    }
    if let Some(p) = &cli.json_out {
        if let Err(e) = std::fs::write(p, format!("{text}\n")) {
            eprintln!("polyglue: {}: {e}", p.display());
            return ExitCode::from(3);
        }
    }
    ExitCode::from(code)
}
