//! Shipped examples, each given by a list of polynomial vector fields whose
//! first `b_dim` entries span the simply transitive subalgebra `b`.
//!
//! - `vinberg5`: the tube domain over the five-dimensional cone of positive
//!   definite matrices `[[z1, 0, z4], [0, z2, z5], [z4, z5, z3]]`.
//! - `dI21`: the Siegel domain `{Im u - |v|^2/2 > 0}` in `C^2`.
//! - `rank1`: the upper half-plane.

use std::sync::Arc;

use thiserror::Error;

use crate::exact::{poly::var_list, vector, Gauss, Matrix, Subspace};
use crate::lie::LieAlgebra;
use crate::normal_j::{NormalJAlgebra, NormalJError};
use crate::siegel::{SiegelDomainSpec, SiegelError};
use crate::vfields::{FieldAlgebra, FieldError, PolyVectorField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    NormalJ(#[from] NormalJError),
    #[error(transparent)]
    Siegel(#[from] SiegelError),
    #[error("Jacobi identity fails on ({}, {}, {})", .0 .0, .0 .1, .0 .2)]
    Jacobi((usize, usize, usize)),
    #[error("{0}")]
    Shape(String),
}

/// Input data: coordinates, labeled fields, the size of the `b` prefix and
/// the reference point.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldData {
    pub name: String,
    pub vars: Vec<String>,
    pub labels: Vec<String>,
    pub fields: Vec<Vec<String>>,
    pub b_dim: usize,
    pub reference: Vec<Gauss>,
}

#[derive(Clone, Debug)]
pub struct BuiltinExample {
    pub name: String,
    pub data: FieldData,
    pub g: FieldAlgebra,
    pub b: LieAlgebra,
    pub spec: SiegelDomainSpec,
    /// Isotropy at the reference point, in `g` coordinates.
    pub k: Subspace,
}

impl BuiltinExample {
    pub fn b_dim(&self) -> usize {
        self.data.b_dim
    }

    pub fn reference(&self) -> &[Gauss] {
        &self.data.reference
    }

    /// Embeds an element of `b` into `g`.
    pub fn b_to_g(&self, x: &[Gauss]) -> Vec<Gauss> {
        vector::pad(x, self.g.dim())
    }

    /// `b` as a subspace of `g`.
    pub fn b_span(&self) -> Subspace {
        Subspace::span(self.g.dim(), (0..self.b_dim()).map(|i| vector::unit(self.g.dim(), i)))
    }

    pub fn field(&self, label: &str) -> Option<&PolyVectorField> {
        self.g.labels.iter().position(|l| l == label).map(|i| &self.g.fields[i])
    }
}

/// Field algebra, then `j` from the reference point, the Koszul form, the
/// root grading, and Siegel coordinates with `u_i`, `v_a` the elements of `b`
/// whose fields equal `∂/∂z` at the reference point.
pub fn build_from_fields(data: FieldData) -> Result<BuiltinExample, BuildError> {
    let vars: Arc<[String]> = var_list(&data.vars);
    if data.reference.len() != vars.len() {
        return Err(BuildError::Shape("reference point has the wrong length".into()));
    }
    if data.fields.len() != data.labels.len() || data.b_dim == 0 || data.b_dim > data.fields.len() {
        return Err(BuildError::Shape("inconsistent field list".into()));
    }
    let fields = data.fields.iter().map(|c| PolyVectorField::parse(&vars, c)).collect::<Result<Vec<_>, _>>()?;
    let g = FieldAlgebra::new(data.labels.clone(), fields)?;
    g.algebra.check_jacobi().map_err(|w| BuildError::Jacobi(w.triple))?;
    let b = g.algebra.prefix_subalgebra(data.b_dim).map_err(NormalJError::from)?;
    let p = &data.reference;
    let j = g.infer_j(data.b_dim, p)?;
    let nj = NormalJAlgebra::with_koszul(b.clone(), j)?;
    let n = nj.grading.one.dim();
    let m = nj.grading.half.dim() / 2;
    if n + m != vars.len() {
        return Err(BuildError::Shape(format!("{} coordinates but dim b(1) + dim b(1/2)/2 = {}", vars.len(), n + m)));
    }
    let dimc = vars.len();
    let u_basis =
        (0..n).map(|i| g.preimage_at(data.b_dim, p, &vector::unit(dimc, i))).collect::<Result<Vec<_>, _>>()?;
    let v_basis =
        (0..m).map(|a| g.preimage_at(data.b_dim, p, &vector::unit(dimc, n + a))).collect::<Result<Vec<_>, _>>()?;
    let spec = SiegelDomainSpec::with_coordinates(nj, vars, u_basis, v_basis)?;
    if spec.reference_point().concat() != *p {
        return Err(BuildError::Shape("reference point is not (iE, 0)".into()));
    }
    let k = g.isotropy(p);
    Ok(BuiltinExample { name: data.name.clone(), data, g, b, spec, k })
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn field_data(
    name: &str,
    vars: &[&str],
    entries: &[(&str, &[&str])],
    b_dim: usize,
    reference: Vec<Gauss>,
) -> FieldData {
    FieldData {
        name: name.into(),
        vars: strings(vars),
        labels: entries.iter().map(|(l, _)| l.to_string()).collect(),
        fields: entries.iter().map(|(_, c)| strings(c)).collect(),
        b_dim,
        reference,
    }
}

pub fn vinberg5_data() -> FieldData {
    let i = Gauss::i();
    let z = Gauss::zero();
    field_data(
        "vinberg5",
        &["z1", "z2", "z3", "z4", "z5"],
        &[
            ("A1", &["z1", "0", "0", "z4/2", "0"]),
            ("A2", &["0", "z2", "0", "0", "z5/2"]),
            ("A3", &["0", "0", "z3", "z4/2", "z5/2"]),
            ("A31", &["0", "0", "2*z4", "z1", "0"]),
            ("A32", &["0", "0", "2*z5", "0", "z2"]),
            ("E1", &["1", "0", "0", "0", "0"]),
            ("E2", &["0", "1", "0", "0", "0"]),
            ("E3", &["0", "0", "1", "0", "0"]),
            ("E31", &["0", "0", "0", "1", "0"]),
            ("E32", &["0", "0", "0", "0", "1"]),
            ("W1", &["-z1^2 - 1", "0", "-z4^2", "-z1*z4", "0"]),
            ("W2", &["0", "-z2^2 - 1", "-z5^2", "0", "-z2*z5"]),
        ],
        10,
        vec![i.clone(), i.clone(), i, z.clone(), z],
    )
}

pub fn di21_data() -> FieldData {
    field_data(
        "dI21",
        &["u", "v"],
        &[
            ("A", &["u", "v/2"]),
            ("V1", &["i*v", "1"]),
            ("V2", &["v", "i"]),
            ("E", &["1", "0"]),
            ("P", &["0", "i*v"]),
            ("Y1", &["i*v*u", "u + i*v^2"]),
            ("Yi", &["v*u", "i*u + v^2"]),
            ("Z", &["u^2", "v*u"]),
        ],
        4,
        vec![Gauss::i(), Gauss::zero()],
    )
}

pub fn rank1_data() -> FieldData {
    field_data("rank1", &["u"], &[("A", &["u"]), ("E", &["1"]), ("W", &["-u^2 - 1"])], 2, vec![Gauss::i()])
}

pub fn builtin_names() -> &'static [&'static str] {
    &["vinberg5", "dI21", "rank1"]
}

pub fn builtin_data(name: &str) -> Option<FieldData> {
    match name {
        "vinberg5" => Some(vinberg5_data()),
        "dI21" => Some(di21_data()),
        "rank1" => Some(rank1_data()),
        _ => None,
    }
}

pub fn build_builtin(name: &str) -> Option<Result<BuiltinExample, BuildError>> {
    builtin_data(name).map(build_from_fields)
}

pub fn build_vinberg5() -> BuiltinExample {
    build_from_fields(vinberg5_data()).expect("vinberg5 builds")
}

pub fn build_di21() -> BuiltinExample {
    build_from_fields(di21_data()).expect("dI21 builds")
}

pub fn build_rank1() -> BuiltinExample {
    build_from_fields(rank1_data()).expect("rank1 builds")
}

/// Coordinates of an element of `g` given as `[(label, coefficient)]`.
pub fn element(alg: &LieAlgebra, terms: &[(&str, Gauss)]) -> Vec<Gauss> {
    let mut out = vector::zeros(alg.dim());
    for (l, c) in terms {
        let i = alg.index_of(l).unwrap_or_else(|| panic!("unknown label {l}"));
        out[i] = &out[i] + c;
    }
    out
}

/// `j` as a matrix, for inspection.
pub fn j_matrix(ex: &BuiltinExample) -> &Matrix {
    &ex.spec.nj.j
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_j::RootKind;

    #[test]
    fn vinberg5_shape() {
        let ex = build_vinberg5();
        assert_eq!(ex.g.dim(), 12);
        assert_eq!(ex.spec.rank(), 3);
        assert_eq!(ex.spec.n_u(), 5);
        assert_eq!(ex.spec.n_v(), 0);
        assert_eq!(ex.k.dim(), 2);
        let b = &ex.b;
        let a: Vec<Vec<Gauss>> = ["A1", "A2", "A3"].iter().map(|l| b.basis_vector(l).unwrap()).collect();
        let a_space = Subspace::span(10, a);
        assert_eq!(Subspace::span(10, ex.spec.nj.a_basis.clone()), a_space);
        for (k, l) in ["E1", "E2", "E3"].iter().enumerate() {
            assert_eq!(ex.spec.nj.e_basis[k], b.basis_vector(l).unwrap());
        }
        let d31 = ex.spec.nj.root_space(RootKind::Diff { l: 2, k: 0 }).unwrap();
        assert!(d31.contains(&b.basis_vector("A31").unwrap()));
        assert_eq!(ex.spec.nj.root_space(RootKind::Diff { l: 1, k: 0 }).map(Subspace::dim).unwrap_or(0), 0);
        assert_eq!(ex.spec.nj.apply_j(&b.basis_vector("E1").unwrap()), b.basis_vector("A1").unwrap());
    }

    #[test]
    fn di21_shape() {
        let ex = build_di21();
        assert_eq!(ex.spec.rank(), 1);
        assert_eq!(ex.spec.n_u(), 1);
        assert_eq!(ex.spec.n_v(), 1);
        assert_eq!(ex.spec.nj.grading.half.dim(), 2);
        assert_eq!(ex.spec.q[0][0], vec![Gauss::from_ratio(1, 2)]);
        assert_eq!(ex.k.dim(), 4);
    }

    #[test]
    fn rank1_shape() {
        let ex = build_rank1();
        assert_eq!(ex.spec.rank(), 1);
        assert_eq!(ex.k.dim(), 1);
    }
}
