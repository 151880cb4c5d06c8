//! Versioned JSON envelope `{version, kind, payload}` for algebras, domains,
//! field lists and parameter batches. Structure constants are sparse triples
//! `[i, j, k, c]` with `i < j`; a real `c` is written `"p/q"`, a complex one
//! as `{"re": .., "im": ..}`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builtins::{build_from_fields, BuiltinExample, FieldData};
use crate::classify::XiParam;
use crate::exact::{poly::var_list, scalar::rat_serde, Gauss, Matrix, Rat};
use crate::lie::LieAlgebra;
use crate::normal_j::{koszul_form, validate_normal_j, NormalJAlgebra};
use crate::siegel::SiegelDomainSpec;
use crate::suite::CheckResult;

pub const ENVELOPE_VERSION: u32 = 1;

pub const KINDS: &[&str] = &["lie_algebra", "normal_j", "domain", "fields", "xi_batch"];

#[derive(Debug, Error)]
pub enum EnvelopeError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported envelope version {0}")]
    Version(u32),
    #[error("unknown kind {0:?}")]
    Kind(String),
    #[error("invalid payload: {0}")]
    Payload(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalJData {
    pub b: LieAlgebra,
    pub j: Matrix,
    pub omega: Vec<Gauss>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainData {
    pub algebra: NormalJData,
    pub vars: Vec<String>,
    pub u_basis: Vec<Vec<Gauss>>,
    pub v_basis: Vec<Vec<Gauss>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Envelope {
    LieAlgebra(LieAlgebra),
    NormalJ(NormalJData),
    Domain(DomainData),
    Fields(FieldData),
    XiBatch(Vec<XiParam>),
}

// ---------------------------------------------------------------------------
// Wire types.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnvelope {
    version: u32,
    kind: String,
    payload: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Const {
    Real(#[serde(with = "rat_serde")] Rat),
    Complex(Gauss),
}

impl Const {
    fn of(g: &Gauss) -> Const {
        if g.im.is_zero() {
            Const::Real(g.re.clone())
        } else {
            Const::Complex(g.clone())
        }
    }

    fn gauss(self) -> Gauss {
        match self {
            Const::Real(r) => Gauss::real(r),
            Const::Complex(g) => g,
        }
    }
}

fn consts(v: &[Gauss]) -> Vec<Const> {
    v.iter().map(Const::of).collect()
}

fn gausses(v: Vec<Const>) -> Vec<Gauss> {
    v.into_iter().map(Const::gauss).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LieJson {
    labels: Vec<String>,
    triples: Vec<(usize, usize, usize, Const)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormalJJson {
    labels: Vec<String>,
    triples: Vec<(usize, usize, usize, Const)>,
    /// Dense, `j[row][col]`, acting on coordinate columns.
    j: Vec<Vec<Const>>,
    /// Defaults to the Koszul form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    omega: Option<Vec<Const>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainJson {
    algebra: NormalJJson,
    vars: Vec<String>,
    u_basis: Vec<Vec<Const>>,
    v_basis: Vec<Vec<Const>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldsJson {
    name: String,
    vars: Vec<String>,
    labels: Vec<String>,
    fields: Vec<Vec<String>>,
    b_dim: usize,
    reference: Vec<Gauss>,
}

#[derive(Serialize, Deserialize)]
struct RatJson(#[serde(with = "rat_serde")] Rat);

type XiJson = (RatJson, RatJson, i64, i64);

fn lie_json(b: &LieAlgebra) -> LieJson {
    LieJson {
        labels: b.labels().to_vec(),
        triples: b.triples().into_iter().map(|(i, j, k, c)| (i, j, k, Const::of(&c))).collect(),
    }
}

fn lie_from(labels: Vec<String>, triples: Vec<(usize, usize, usize, Const)>) -> Result<LieAlgebra, EnvelopeError> {
    let t: Vec<_> = triples.into_iter().map(|(i, j, k, c)| (i, j, k, c.gauss())).collect();
    LieAlgebra::from_triples(labels, &t).map_err(|e| EnvelopeError::Payload(e.to_string()))
}

fn normal_j_json(d: &NormalJData) -> NormalJJson {
    let l = lie_json(&d.b);
    NormalJJson {
        labels: l.labels,
        triples: l.triples,
        j: (0..d.j.rows()).map(|r| consts(d.j.row(r))).collect(),
        omega: Some(consts(&d.omega)),
    }
}

fn normal_j_from(p: NormalJJson) -> Result<NormalJData, EnvelopeError> {
    let b = lie_from(p.labels, p.triples)?;
    let n = b.dim();
    let rows: Vec<Vec<Gauss>> = p.j.into_iter().map(gausses).collect();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(EnvelopeError::Payload(format!("j must be {n} x {n}")));
    }
    let j = Matrix::from_rows(rows);
    let omega = match p.omega {
        Some(w) if w.len() != n => return Err(EnvelopeError::Payload(format!("omega must have length {n}"))),
        Some(w) => gausses(w),
        None => koszul_form(&b, &j),
    };
    Ok(NormalJData { b, j, omega })
}

fn payload<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T, EnvelopeError> {
    serde_json::from_value(v).map_err(|e| EnvelopeError::Payload(e.to_string()))
}

impl Envelope {
    pub fn kind(&self) -> &'static str {
        match self {
            Envelope::LieAlgebra(_) => "lie_algebra",
            Envelope::NormalJ(_) => "normal_j",
            Envelope::Domain(_) => "domain",
            Envelope::Fields(_) => "fields",
            Envelope::XiBatch(_) => "xi_batch",
        }
    }

    pub fn from_json(src: &str) -> Result<Envelope, EnvelopeError> {
        let raw: RawEnvelope = serde_json::from_str(src)?;
        if raw.version != ENVELOPE_VERSION {
            return Err(EnvelopeError::Version(raw.version));
        }
        Ok(match raw.kind.as_str() {
            "lie_algebra" => {
                let p: LieJson = payload(raw.payload)?;
                Envelope::LieAlgebra(lie_from(p.labels, p.triples)?)
            }
            "normal_j" => Envelope::NormalJ(normal_j_from(payload(raw.payload)?)?),
            "domain" => {
                let p: DomainJson = payload(raw.payload)?;
                let algebra = normal_j_from(p.algebra)?;
                let n = algebra.b.dim();
                let u_basis: Vec<Vec<Gauss>> = p.u_basis.into_iter().map(gausses).collect();
                let v_basis: Vec<Vec<Gauss>> = p.v_basis.into_iter().map(gausses).collect();
                if u_basis.iter().chain(&v_basis).any(|x| x.len() != n) {
                    return Err(EnvelopeError::Payload(format!("basis vectors must have length {n}")));
                }
                Envelope::Domain(DomainData { algebra, vars: p.vars, u_basis, v_basis })
            }
            "fields" => {
                let p: FieldsJson = payload(raw.payload)?;
                Envelope::Fields(FieldData {
                    name: p.name,
                    vars: p.vars,
                    labels: p.labels,
                    fields: p.fields,
                    b_dim: p.b_dim,
                    reference: p.reference,
                })
            }
            "xi_batch" => {
                let p: Vec<XiJson> = payload(raw.payload)?;
                Envelope::XiBatch(p.into_iter().map(|(x, y, n, np)| XiParam::new(x.0, y.0, n, np)).collect())
            }
            other => return Err(EnvelopeError::Kind(other.to_string())),
        })
    }

    pub fn to_json(&self) -> String {
        let payload = match self {
            Envelope::LieAlgebra(b) => serde_json::to_value(lie_json(b)),
            Envelope::NormalJ(d) => serde_json::to_value(normal_j_json(d)),
            Envelope::Domain(d) => serde_json::to_value(DomainJson {
                algebra: normal_j_json(&d.algebra),
                vars: d.vars.clone(),
                u_basis: d.u_basis.iter().map(|x| consts(x)).collect(),
                v_basis: d.v_basis.iter().map(|x| consts(x)).collect(),
            }),
            Envelope::Fields(d) => serde_json::to_value(FieldsJson {
                name: d.name.clone(),
                vars: d.vars.clone(),
                labels: d.labels.clone(),
                fields: d.fields.clone(),
                b_dim: d.b_dim,
                reference: d.reference.clone(),
            }),
            Envelope::XiBatch(xs) => serde_json::to_value(
                xs.iter().map(|x| (RatJson(x.x.clone()), RatJson(x.y.clone()), x.n, x.np)).collect::<Vec<XiJson>>(),
            ),
        }
        .expect("envelope payloads serialize");
        let raw = RawEnvelope { version: ENVELOPE_VERSION, kind: self.kind().to_string(), payload };
        serde_json::to_string_pretty(&raw).expect("envelope serializes")
    }

    /// Exports a built example. The `fields` kind re-renders every component
    /// from the parsed polynomials.
    pub fn export(ex: &BuiltinExample, kind: &str) -> Result<Envelope, EnvelopeError> {
        let nj = &ex.spec.nj;
        let algebra = || NormalJData { b: nj.b.clone(), j: nj.j.clone(), omega: nj.omega.clone() };
        Ok(match kind {
            "lie_algebra" => Envelope::LieAlgebra(ex.g.algebra.clone()),
            "normal_j" => Envelope::NormalJ(algebra()),
            "domain" => Envelope::Domain(DomainData {
                algebra: algebra(),
                vars: ex.spec.vars.to_vec(),
                u_basis: ex.spec.u_basis.clone(),
                v_basis: ex.spec.v_basis.clone(),
            }),
            "fields" => Envelope::Fields(FieldData {
                fields: ex.g.fields.iter().map(|f| f.component_strings()).collect(),
                ..ex.data.clone()
            }),
            other => return Err(EnvelopeError::Kind(other.to_string())),
        })
    }
}

fn result(name: &str, outcome: Result<String, String>) -> CheckResult {
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckResult { name: name.to_string(), passed, detail }
}

fn jacobi_check(name: &str, b: &LieAlgebra) -> CheckResult {
    result(
        name,
        match b.check_jacobi() {
            Ok(n) => Ok(format!("{n} triples")),
            Err(w) => {
                let l = b.labels();
                let (i, j, k) = w.triple;
                Err(format!("fails on ({}, {}, {}): residual {}", l[i], l[j], l[k], b.format(&w.residual)))
            }
        },
    )
}

fn normal_j_checks(d: &NormalJData, out: &mut Vec<CheckResult>) -> Option<NormalJAlgebra> {
    out.push(jacobi_check("jacobi b", &d.b));
    let report = validate_normal_j(&d.b, &d.j, &d.omega);
    for c in &report.checks {
        out.push(result(c.name, if c.passed { Ok(String::new()) } else { Err(c.witness.clone().unwrap_or_default()) }));
    }
    if !report.all_passed() || d.b.check_jacobi().is_err() {
        out.push(result("grading shape", Err("not attempted".into())));
        return None;
    }
    match NormalJAlgebra::new(d.b.clone(), d.j.clone(), d.omega.clone()) {
        Ok(nj) => {
            let g = &nj.grading;
            out.push(result(
                "grading shape",
                Ok(format!("rank {}, dims ({}, {}, {})", nj.rank, g.zero.dim(), g.half.dim(), g.one.dim())),
            ));
            Some(nj)
        }
        Err(e) => {
            out.push(result("grading shape", Err(e.to_string())));
            None
        }
    }
}

/// Structural checks for an envelope. Every failure is a validation failure;
/// schema problems were already rejected by [`Envelope::from_json`].
pub fn validate(env: &Envelope) -> Vec<CheckResult> {
    let mut out = Vec::new();
    match env {
        Envelope::LieAlgebra(b) => {
            let mut c = jacobi_check("jacobi", b);
            if c.passed {
                c.detail = format!(
                    "{}, dim {}, {}",
                    c.detail,
                    b.dim(),
                    if b.is_solvable() { "solvable" } else { "not solvable" }
                );
            }
            out.push(c);
        }
        Envelope::NormalJ(d) => {
            normal_j_checks(d, &mut out);
        }
        Envelope::Domain(d) => {
            let coords = match normal_j_checks(&d.algebra, &mut out) {
                Some(nj) => {
                    SiegelDomainSpec::with_coordinates(nj, var_list(&d.vars), d.u_basis.clone(), d.v_basis.clone())
                        .map(|s| format!("{} u and {} v coordinates", s.n_u(), s.n_v()))
                        .map_err(|e| e.to_string())
                }
                None => Err("not attempted".into()),
            };
            out.push(result("coordinates", coords));
        }
        Envelope::Fields(d) => match build_from_fields(d.clone()) {
            Ok(ex) => {
                out.push(result(
                    "build",
                    Ok(format!("dim g = {}, dim b = {}, dim k = {}", ex.g.dim(), ex.b_dim(), ex.k.dim())),
                ));
                out.push(jacobi_check("jacobi g", &ex.g.algebra));
                let nj = &ex.spec.nj;
                normal_j_checks(&NormalJData { b: nj.b.clone(), j: nj.j.clone(), omega: nj.omega.clone() }, &mut out);
            }
            Err(e) => out.push(result("build", Err(e.to_string()))),
        },
        Envelope::XiBatch(xs) => out.push(result("parameters", Ok(format!("{} parameters", xs.len())))),
    }
    out
}
