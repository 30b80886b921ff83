//! JSON documents for polytopes and gluing specs, and SVG rendering of
//! developed surfaces in the affine chart `z = 1`.
//!
//! Numbers are strings `"p/q"`, `"p"` or finite decimals, or JSON integers.
//! A facet is referenced as `[polytope, index]` or as
//! `{"polytope": name, "vertices": [...]}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::complex::{FacetId, GluingSpec};
use crate::developer::Developed;
use crate::linalg::Matrix;
use crate::polytope::{Polytope, PolytopeError};
use crate::scalar::{canon_ray, parse_rational, Scalar, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct DocError {
    pub path: String,
    pub message: String,
}

fn err(path: &str, message: impl Into<String>) -> DocError {
    DocError { path: path.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Exact,
    Float,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(Backend::Exact),
            "float" => Some(Backend::Float),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolytopeSource {
    Vertices(Matrix<Q>),
    Halfspaces { dim: usize, rows: Matrix<Q> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeDoc {
    pub name: String,
    pub source: PolytopeSource,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FacetSel {
    Index(usize),
    Vertices(Matrix<Q>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FacetRef {
    pub polytope: String,
    pub facet: FacetSel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingDoc {
    pub from: FacetRef,
    pub to: FacetRef,
    pub matrix: Matrix<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecDocument {
    pub dimension: usize,
    pub backend: Backend,
    pub eps: Option<f64>,
    pub polytopes: Vec<PolytopeDoc>,
    pub pairings: Vec<PairingDoc>,
}

// ---- parsing ---------------------------------------------------------------

fn number(v: &Value, path: &str) -> Result<Q, DocError> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| err(path, e.to_string())),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Q::from_integer(i.into())),
            None => parse_rational(&n.to_string()).map_err(|_| err(path, "use a \"p/q\" string for non-integers")),
        },
        _ => Err(err(path, "expected a number or a \"p/q\" string")),
    }
}

fn row(v: &Value, path: &str) -> Result<Vec<Q>, DocError> {
    let a = v.as_array().ok_or_else(|| err(path, "expected an array"))?;
    a.iter().enumerate().map(|(i, x)| number(x, &format!("{path}[{i}]"))).collect()
}

fn rows(v: &Value, path: &str, width: Option<usize>) -> Result<Matrix<Q>, DocError> {
    let a = v.as_array().ok_or_else(|| err(path, "expected an array of rows"))?;
    let out: Matrix<Q> =
        a.iter().enumerate().map(|(i, r)| row(r, &format!("{path}[{i}]"))).collect::<Result<_, _>>()?;
    let w = width.or_else(|| out.first().map(|r| r.len()));
    if let Some(w) = w {
        if let Some((i, r)) = out.iter().enumerate().find(|(_, r)| r.len() != w) {
            return Err(err(&format!("{path}[{i}]"), format!("expected {w} entries, got {}", r.len())));
        }
    }
    Ok(out)
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, DocError> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn backend_field(o: &Map<String, Value>, path: &str) -> Result<(Backend, Option<f64>), DocError> {
    let backend = match o.get("backend") {
        None => Backend::Exact,
        Some(Value::String(s)) => {
            Backend::parse(s).ok_or_else(|| err(&format!("{path}.backend"), "expected \"exact\" or \"float\""))?
        }
        Some(_) => return Err(err(&format!("{path}.backend"), "expected a string")),
    };
    let eps = match o.get("eps") {
        None => None,
        Some(v) => Some(v.as_f64().filter(|e| *e > 0.0).ok_or_else(|| err(&format!("{path}.eps"), "expected a positive number"))?),
    };
    Ok((backend, eps))
}

fn polytope_doc(v: &Value, path: &str, dimension: Option<usize>) -> Result<PolytopeDoc, DocError> {
    let o = object(v, path)?;
    let name = match o.get("name") {
        None => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(err(&format!("{path}.name"), "expected a string")),
    };
    let width = dimension.map(|n| n + 1);
    let source = match (o.get("vertices"), o.get("halfspaces")) {
        (Some(vs), None) => PolytopeSource::Vertices(rows(vs, &format!("{path}.vertices"), width)?),
        (None, Some(hs)) => {
            let dim = match (o.get("dim"), dimension) {
                (Some(d), _) => d.as_u64().ok_or_else(|| err(&format!("{path}.dim"), "expected an integer"))? as usize,
                (None, Some(n)) => n,
                (None, None) => return Err(err(path, "halfspaces need \"dim\"")),
            };
            if dimension.is_some_and(|n| n != dim) {
                return Err(err(&format!("{path}.dim"), format!("dimension mismatch: {dim} vs {}", dimension.unwrap())));
            }
            PolytopeSource::Halfspaces { dim, rows: rows(hs, &format!("{path}.halfspaces"), Some(dim + 1))? }
        }
        (Some(_), Some(_)) => return Err(err(path, "give either \"vertices\" or \"halfspaces\", not both")),
        (None, None) => return Err(err(path, "missing \"vertices\" or \"halfspaces\"")),
    };
    if let (PolytopeSource::Vertices(vs), Some(w)) = (&source, width) {
        if vs.is_empty() {
            return Err(err(&format!("{path}.vertices"), format!("expected rays with {w} entries")));
        }
    }
    Ok(PolytopeDoc { name, source })
}

fn facet_ref(v: &Value, path: &str, width: usize) -> Result<FacetRef, DocError> {
    match v {
        Value::Array(a) if a.len() == 2 => {
            let polytope = a[0].as_str().ok_or_else(|| err(&format!("{path}[0]"), "expected a polytope name"))?;
            let i = a[1].as_u64().ok_or_else(|| err(&format!("{path}[1]"), "expected a facet index"))?;
            Ok(FacetRef { polytope: polytope.to_string(), facet: FacetSel::Index(i as usize) })
        }
        Value::Object(o) => {
            let polytope = o
                .get("polytope")
                .and_then(Value::as_str)
                .ok_or_else(|| err(&format!("{path}.polytope"), "expected a polytope name"))?;
            let vs = o.get("vertices").ok_or_else(|| err(path, "missing \"vertices\""))?;
            Ok(FacetRef {
                polytope: polytope.to_string(),
                facet: FacetSel::Vertices(rows(vs, &format!("{path}.vertices"), Some(width))?),
            })
        }
        _ => Err(err(path, "expected [polytope, facet] or {\"polytope\", \"vertices\"}")),
    }
}

pub fn parse_spec(text: &str) -> Result<SpecDocument, DocError> {
    let v: Value = serde_json::from_str(text).map_err(|e| err("$", e.to_string()))?;
    spec_from_value(&v)
}

pub fn spec_from_value(v: &Value) -> Result<SpecDocument, DocError> {
    let o = object(v, "$")?;
    let dimension = o
        .get("dimension")
        .and_then(Value::as_u64)
        .filter(|&d| d >= 1)
        .ok_or_else(|| err("$.dimension", "expected a positive integer"))? as usize;
    let (backend, eps) = backend_field(o, "$")?;
    let ps = o.get("polytopes").and_then(Value::as_array).ok_or_else(|| err("$.polytopes", "expected an array"))?;
    let polytopes: Vec<PolytopeDoc> = ps
        .iter()
        .enumerate()
        .map(|(i, p)| polytope_doc(p, &format!("$.polytopes[{i}]"), Some(dimension)))
        .collect::<Result<_, _>>()?;
    for (i, p) in polytopes.iter().enumerate() {
        if p.name.is_empty() {
            return Err(err(&format!("$.polytopes[{i}].name"), "missing name"));
        }
        if polytopes[..i].iter().any(|q| q.name == p.name) {
            return Err(err(&format!("$.polytopes[{i}].name"), format!("duplicate name {:?}", p.name)));
        }
    }
    let prs = match o.get("pairings") {
        None => Vec::new(),
        Some(a) => a.as_array().ok_or_else(|| err("$.pairings", "expected an array"))?.clone(),
    };
    let mut pairings = Vec::new();
    for (i, p) in prs.iter().enumerate() {
        let path = format!("$.pairings[{i}]");
        let po = object(p, &path)?;
        let get = |k: &str| po.get(k).ok_or_else(|| err(&path, format!("missing \"{k}\"")));
        let from = facet_ref(get("from")?, &format!("{path}.from"), dimension + 1)?;
        let to = facet_ref(get("to")?, &format!("{path}.to"), dimension + 1)?;
        for (side, r) in [("from", &from), ("to", &to)] {
            if !polytopes.iter().any(|q| q.name == r.polytope) {
                return Err(err(&format!("{path}.{side}"), format!("unknown polytope {:?}", r.polytope)));
            }
        }
        let matrix = rows(get("matrix")?, &format!("{path}.matrix"), Some(dimension + 1))?;
        if matrix.len() != dimension + 1 {
            return Err(err(
                &format!("{path}.matrix"),
                format!("expected {} rows, got {}", dimension + 1, matrix.len()),
            ));
        }
        pairings.push(PairingDoc { from, to, matrix });
    }
    Ok(SpecDocument { dimension, backend, eps, polytopes, pairings })
}

/// A single polytope: `{"dim", "halfspaces"}` or `{"vertices"}`.
pub fn parse_polytope(text: &str) -> Result<(PolytopeDoc, Backend, Option<f64>), DocError> {
    let v: Value = serde_json::from_str(text).map_err(|e| err("$", e.to_string()))?;
    let o = object(&v, "$")?;
    let (b, eps) = backend_field(o, "$")?;
    Ok((polytope_doc(&v, "$", None)?, b, eps))
}

// ---- building --------------------------------------------------------------

fn convert<S: Scalar>(m: &[Vec<Q>]) -> Matrix<S> {
    m.iter().map(|r| r.iter().map(S::from_q).collect()).collect()
}

impl PolytopeDoc {
    pub fn build<S: Scalar>(&self) -> Result<Polytope<S>, PolytopeError> {
        match &self.source {
            PolytopeSource::Vertices(vs) => Polytope::from_vertices(&convert::<S>(vs)),
            PolytopeSource::Halfspaces { dim, rows } => Polytope::from_halfspaces(*dim, &convert::<S>(rows)),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut o = Map::new();
        if !self.name.is_empty() {
            o.insert("name".into(), json!(self.name));
        }
        match &self.source {
            PolytopeSource::Vertices(vs) => {
                o.insert("vertices".into(), matrix_json(vs));
            }
            PolytopeSource::Halfspaces { dim, rows } => {
                o.insert("dim".into(), json!(dim));
                o.insert("halfspaces".into(), matrix_json(rows));
            }
        }
        Value::Object(o)
    }
}

fn matrix_json<S: Scalar>(m: &[Vec<S>]) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(|x| Value::String(x.to_text())).collect())).collect())
}

impl SpecDocument {
    pub fn build<S: Scalar>(&self) -> Result<GluingSpec<S>, DocError> {
        let mut polys = Vec::new();
        for (i, p) in self.polytopes.iter().enumerate() {
            let built = p.build::<S>().map_err(|e| err(&format!("$.polytopes[{i}]"), e.to_string()))?;
            polys.push((p.name.clone(), built));
        }
        let index: BTreeMap<&str, usize> =
            self.polytopes.iter().enumerate().map(|(i, p)| (p.name.as_str(), i)).collect();
        let mut pairs = Vec::new();
        for (i, pd) in self.pairings.iter().enumerate() {
            let mut ends = Vec::new();
            for (side, r) in [("from", &pd.from), ("to", &pd.to)] {
                let path = format!("$.pairings[{i}].{side}");
                let pid = *index.get(r.polytope.as_str()).ok_or_else(|| err(&path, "unknown polytope"))?;
                let p = &polys[pid].1;
                let facet = match &r.facet {
                    FacetSel::Index(k) if *k < p.facets.len() => *k,
                    FacetSel::Index(k) => {
                        return Err(err(&path, format!("facet {k} out of range ({} facets)", p.facets.len())));
                    }
                    FacetSel::Vertices(vs) => {
                        let mut want = Vec::new();
                        for v in convert::<S>(vs) {
                            want.push(p.vertex_index(&canon_ray(&v)).ok_or_else(|| err(&path, "not a vertex"))?);
                        }
                        want.sort_unstable();
                        (0..p.facets.len())
                            .find(|&f| crate::polytope::bits(p.facet_mask(f)).collect::<Vec<_>>() == want)
                            .ok_or_else(|| err(&path, "vertices do not span a facet"))?
                    }
                };
                ends.push(FacetId { polytope: pid, facet });
            }
            pairs.push((ends[0], ends[1], convert::<S>(&pd.matrix)));
        }
        GluingSpec::new(self.dimension, polys, pairs).map_err(|e| err("$", e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        let mut o = Map::new();
        o.insert("dimension".into(), json!(self.dimension));
        if self.backend == Backend::Float {
            o.insert("backend".into(), json!("float"));
        }
        if let Some(e) = self.eps {
            o.insert("eps".into(), json!(e));
        }
        o.insert("polytopes".into(), Value::Array(self.polytopes.iter().map(PolytopeDoc::to_json).collect()));
        let facet = |r: &FacetRef| match &r.facet {
            FacetSel::Index(k) => json!([r.polytope, k]),
            FacetSel::Vertices(vs) => json!({"polytope": r.polytope, "vertices": matrix_json(vs)}),
        };
        o.insert(
            "pairings".into(),
            Value::Array(
                self.pairings
                    .iter()
                    .map(|p| json!({"from": facet(&p.from), "to": facet(&p.to), "matrix": matrix_json(&p.matrix)}))
                    .collect(),
            ),
        );
        Value::Object(o)
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("json")
    }
}

fn to_q<S: Scalar>(m: &[Vec<S>]) -> Matrix<Q> {
    m.iter().map(|r| r.iter().map(|x| parse_rational(&x.to_text()).expect("own text form")).collect()).collect()
}

/// Document for a spec: polytopes by vertices, each pairing listed once
/// in the direction of the smaller facet.
pub fn spec_document<S: Scalar>(spec: &GluingSpec<S>) -> SpecDocument {
    let polytopes = spec
        .names
        .iter()
        .zip(&spec.polytopes)
        .map(|(n, p)| PolytopeDoc { name: n.clone(), source: PolytopeSource::Vertices(to_q(&p.vertices)) })
        .collect();
    let fref = |f: FacetId| FacetRef { polytope: spec.names[f.polytope].clone(), facet: FacetSel::Index(f.facet) };
    let pairings = spec
        .pairings
        .iter()
        .filter(|(s, p)| **s <= p.target)
        .map(|(s, p)| PairingDoc { from: fref(*s), to: fref(p.target), matrix: to_q(p.map.matrix()) })
        .collect();
    SpecDocument {
        dimension: spec.dimension,
        backend: if S::EXACT { Backend::Exact } else { Backend::Float },
        eps: None,
        polytopes,
        pairings,
    }
}

pub fn polytope_document<S: Scalar>(name: &str, p: &Polytope<S>) -> Value {
    let mut v = PolytopeDoc { name: name.to_string(), source: PolytopeSource::Vertices(to_q(&p.vertices)) }.to_json();
    if !S::EXACT {
        v["backend"] = json!("float");
    }
    v
}

/// Every shipped fixture as a JSON document, by name.
pub fn fixture_documents() -> Vec<(String, Value)> {
    let mut out: Vec<(String, Value)> =
        crate::fixtures::spec_catalog().into_iter().map(|(n, s)| (n.to_string(), spec_document(&s).to_json())).collect();
    out.extend(crate::fixtures::polytope_catalog().into_iter().map(|(n, p)| (n.to_string(), polytope_document(n, &p))));
    out.extend(crate::fixtures::float_catalog().into_iter().map(|(n, p)| (n.to_string(), polytope_document(n, &p))));
    out
}

// ---- rendering -------------------------------------------------------------

#[derive(Debug, Clone, Default)]
pub struct ScenePolygon {
    pub points: Vec<[f64; 2]>,
    pub depth: usize,
    pub highlight: bool,
}

/// Planar picture in the chart `z = 1`.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    pub polygons: Vec<ScenePolygon>,
    pub marked: Vec<[[f64; 2]; 2]>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct RenderOptions {
    /// Cells stroked as a gallery.
    pub gallery: Vec<usize>,
    /// Ridges `(cell, face)` to mark.
    pub bad_ridges: Vec<(usize, usize)>,
}

/// Minimum `z / |x|` kept when clipping to the chart.
const CLIP: f64 = 1e-3;

fn clip_polygon(poly: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let inside = |p: &[f64; 3]| p[2] >= CLIP * (p[0].hypot(p[1]));
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (ia, ib) = (inside(&a), inside(&b));
        if ia {
            out.push(a);
        }
        if ia != ib {
            // solve z = CLIP * r along the segment by bisection
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let at = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])];
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if inside(&at(mid)) == ia {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(at(0.5 * (lo + hi)));
        }
    }
    out
}

/// Vertex indices of a polygon in boundary order.
fn cyclic_order<S: Scalar>(p: &Polytope<S>) -> Vec<usize> {
    let mut order = vec![0];
    let mut prev = usize::MAX;
    loop {
        let cur = *order.last().unwrap();
        let next = p.edge_neighbors(cur).into_iter().find(|&w| w != prev && (order.len() < 2 || w != order[order.len() - 2]));
        match next {
            Some(w) if w != order[0] => {
                prev = cur;
                order.push(w);
            }
            _ => return order,
        }
    }
}

pub fn scene<S: Scalar>(dc: &Developed<S>, opts: &RenderOptions) -> Scene {
    let mut sc = Scene::default();
    if dc.spec.dimension != 2 {
        sc.warnings.push(format!("rendering needs dimension 2, got {}", dc.spec.dimension));
        return sc;
    }
    for (i, c) in dc.cells.iter().enumerate() {
        let p = &dc.spec.polytopes[c.polytope];
        let pts: Vec<[f64; 3]> = cyclic_order(p)
            .into_iter()
            .map(|v| {
                let r = &c.vertices[v];
                [r[0].to_f64(), r[1].to_f64(), r[2].to_f64()]
            })
            .collect();
        let clipped = clip_polygon(&pts);
        if clipped.len() != pts.len() || clipped.iter().zip(&pts).any(|(a, b)| a != b) {
            sc.warnings.push(format!("cell {i} leaves the chart and is clipped"));
        }
        if clipped.len() < 3 {
            continue;
        }
        sc.polygons.push(ScenePolygon {
            points: clipped.iter().map(|q| [q[0] / q[2], q[1] / q[2]]).collect(),
            depth: c.depth,
            highlight: opts.gallery.contains(&i),
        });
    }
    for &(c, e) in &opts.bad_ridges {
        let p = &dc.spec.polytopes[dc.cells[c].polytope];
        let r = crate::polytope::bits(p.faces[e].vertices)
            .map(|v| {
                let x = &dc.cells[c].vertices[v];
                let z = x[2].to_f64();
                [x[0].to_f64() / z, x[1].to_f64() / z]
            })
            .next();
        if let Some(pt) = r {
            sc.marked.push([pt, pt]);
        }
    }
    sc
}

impl Scene {
    pub fn to_svg(&self) -> String {
        let all: Vec<[f64; 2]> = self.polygons.iter().flat_map(|p| p.points.iter().copied()).collect();
        let (mut x0, mut y0, mut x1, mut y1) = (-1.0f64, -1.0f64, 1.0f64, 1.0f64);
        if !all.is_empty() {
            x0 = all.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            x1 = all.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            y0 = all.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
            y1 = all.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
        }
        let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-9);
        let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
        let stroke = 0.004 * w.max(h);
        let max_depth = self.polygons.iter().map(|p| p.depth).max().unwrap_or(0).max(1);
        let mut s = String::new();
        // y points up in the chart
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
            x0 - pad,
            -(y1 + pad),
            w,
            h
        );
        let _ = writeln!(s, r#"<g transform="scale(1,-1)" stroke="black" stroke-width="{stroke:.6}">"#);
        for p in &self.polygons {
            let light = 35 + 55 * p.depth / max_depth;
            let pts: Vec<String> = p.points.iter().map(|q| format!("{:.6},{:.6}", q[0], q[1])).collect();
            let extra = if p.highlight {
                format!(r#" stroke="crimson" stroke-width="{:.6}""#, 3.0 * stroke)
            } else {
                String::new()
            };
            let _ = writeln!(
                s,
                r#"<polygon points="{}" fill="hsl(210,40%,{}%)" data-depth="{}"{}/>"#,
                pts.join(" "),
                light,
                p.depth,
                extra
            );
        }
        for m in &self.marked {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="orange"/>"#,
                m[0][0],
                m[0][1],
                3.0 * stroke
            );
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}

pub fn render_svg<S: Scalar>(dc: &Developed<S>, opts: &RenderOptions) -> (String, Vec<String>) {
    let sc = scene(dc, opts);
    (sc.to_svg(), sc.warnings)
}
