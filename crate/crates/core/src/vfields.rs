//! Polynomial holomorphic vector fields, their brackets `[X, Y] = D_X Y - D_Y X`,
//! the grading by `ad(∂)` for the Euler field `∂ = (u, v/2)`, the standard
//! families on a Siegel domain, and the real Lie algebra spanned by a list of
//! fields.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::exact::{rat, vector, ExactError, Gauss, Matrix, Monomial, MultiPoly, Rat, Subspace};
use crate::lie::{LieAlgebra, LieError};
use crate::normal_j::{AxiomCheck, ValidationReport};
use crate::siegel::SiegelDomainSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("fields live on different coordinate systems")]
    DomainMismatch,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("bracket of {0} and {1} leaves the span")]
    NotClosed(String, String),
    #[error("fields are linearly dependent")]
    Dependent,
    #[error("expected a field of grade {expected}, found {found}")]
    WrongGrade { expected: Rat, found: String },
    #[error("evaluation at the reference point is not injective")]
    NotInvertibleAtReference,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// `Σ comps[i] ∂/∂z_i`; components are holomorphic polynomials.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyVectorField {
    comps: Vec<MultiPoly>,
}

impl PolyVectorField {
    pub fn new(comps: Vec<MultiPoly>) -> Result<Self, FieldError> {
        let Some(first) = comps.first() else {
            return Err(FieldError::Shape("a field needs at least one component".into()));
        };
        if comps.len() != first.nvars() {
            return Err(FieldError::Shape(format!("{} components for {} variables", comps.len(), first.nvars())));
        }
        if comps.iter().any(|c| c.vars() != first.vars()) {
            return Err(FieldError::DomainMismatch);
        }
        Ok(PolyVectorField { comps })
    }

    pub fn parse<S: AsRef<str>>(vars: &Arc<[String]>, comps: &[S]) -> Result<Self, FieldError> {
        let polys = comps.iter().map(|s| MultiPoly::parse(s.as_ref(), vars.clone())).collect::<Result<Vec<_>, _>>()?;
        PolyVectorField::new(polys)
    }

    pub fn zero(vars: &Arc<[String]>) -> Self {
        PolyVectorField { comps: vec![MultiPoly::zero(vars.clone()); vars.len()] }
    }

    pub fn constant(vars: &Arc<[String]>, c: &[Gauss]) -> Self {
        PolyVectorField { comps: c.iter().map(|x| MultiPoly::constant(vars.clone(), x.clone())).collect() }
    }

    pub fn vars(&self) -> &Arc<[String]> {
        self.comps[0].vars()
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[MultiPoly] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(MultiPoly::is_zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.comps.iter().filter_map(MultiPoly::degree).max()
    }

    fn same_domain(&self, other: &PolyVectorField) -> Result<(), FieldError> {
        if self.vars() == other.vars() {
            Ok(())
        } else {
            Err(FieldError::DomainMismatch)
        }
    }

    pub fn try_add(&self, other: &PolyVectorField) -> Result<Self, FieldError> {
        self.same_domain(other)?;
        Ok(PolyVectorField { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect() })
    }

    pub fn add(&self, other: &PolyVectorField) -> Self {
        self.try_add(other).expect("fields on the same domain")
    }

    pub fn sub(&self, other: &PolyVectorField) -> Self {
        self.add(&other.scale(&-Gauss::one()))
    }

    pub fn scale(&self, c: &Gauss) -> Self {
        PolyVectorField { comps: self.comps.iter().map(|p| p.scale(c)).collect() }
    }

    /// `D_self Y`: the derivative of `Y` along `self`.
    pub fn directional(&self, y: &PolyVectorField) -> Self {
        let comps = y
            .comps
            .iter()
            .map(|yc| {
                let mut acc = MultiPoly::zero(yc.vars().clone());
                for (i, xi) in self.comps.iter().enumerate() {
                    if xi.is_zero() {
                        continue;
                    }
                    let d = yc.partial(i);
                    if !d.is_zero() {
                        acc = &acc + &(xi * &d);
                    }
                }
                acc
            })
            .collect();
        PolyVectorField { comps }
    }

    pub fn try_bracket(&self, other: &PolyVectorField) -> Result<Self, FieldError> {
        self.same_domain(other)?;
        Ok(self.directional(other).sub(&other.directional(self)))
    }

    /// `[X, Y] = D_X Y - D_Y X`.
    pub fn bracket(&self, other: &PolyVectorField) -> Self {
        self.try_bracket(other).expect("fields on the same domain")
    }

    pub fn eval(&self, p: &[Gauss]) -> Vec<Gauss> {
        self.comps.iter().map(|c| c.eval(p)).collect()
    }

    pub fn eval_c64(&self, p: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
        self.comps.iter().map(|c| c.eval_c64(p)).collect()
    }

    pub fn component_strings(&self) -> Vec<String> {
        self.comps.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.component_strings().join(", "))
    }
}

impl fmt::Debug for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// Grading by ad(∂).

/// `u` coordinates weigh 1 and `v` coordinates 1/2.
pub fn coordinate_weights(nvars: usize, n_u: usize) -> Vec<Rat> {
    (0..nvars).map(|i| if i < n_u { rat(1, 1) } else { rat(1, 2) }).collect()
}

/// `∂ = (u, v/2)`, generating `t ↦ (e^t u, e^{t/2} v)`.
pub fn euler_field(vars: &Arc<[String]>, n_u: usize) -> PolyVectorField {
    let w = coordinate_weights(vars.len(), n_u);
    let comps = (0..vars.len()).map(|i| MultiPoly::var(vars.clone(), i).scale(&Gauss::real(w[i].clone()))).collect();
    PolyVectorField { comps }
}

/// Splits a field into its `ad(∂)` eigencomponents; a term `c z^m ∂/∂z_i`
/// has eigenvalue `weight(m) - weight(z_i)`.
pub fn decompose_by_grade(f: &PolyVectorField, n_u: usize) -> BTreeMap<Rat, PolyVectorField> {
    let w = coordinate_weights(f.dim(), n_u);
    let mut out: BTreeMap<Rat, PolyVectorField> = BTreeMap::new();
    for (i, comp) in f.comps.iter().enumerate() {
        for (m, c) in comp.terms() {
            let deg: Rat = m.0.iter().zip(&w).map(|(&e, wi)| wi * rat(e as i64, 1)).sum();
            let g = deg - &w[i];
            let entry = out.entry(g).or_insert_with(|| PolyVectorField::zero(f.vars()));
            entry.comps[i].add_term(m.clone(), c.clone());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GradeClass {
    Zero,
    Homogeneous(Rat),
    NotHomogeneous(Vec<Rat>),
}

impl fmt::Display for GradeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradeClass::Zero => write!(f, "zero"),
            GradeClass::Homogeneous(g) => write!(f, "{}", crate::exact::rat_to_string(g)),
            GradeClass::NotHomogeneous(gs) => {
                let parts: Vec<String> = gs.iter().map(crate::exact::rat_to_string).collect();
                write!(f, "mixed({})", parts.join(","))
            }
        }
    }
}

/// Solves `[∂, X] = γ X`.
pub fn grade_classify(f: &PolyVectorField, n_u: usize) -> GradeClass {
    if f.is_zero() {
        return GradeClass::Zero;
    }
    let parts = decompose_by_grade(f, n_u);
    if parts.len() != 1 {
        return GradeClass::NotHomogeneous(parts.into_keys().collect());
    }
    let g = parts.into_keys().next().expect("one grade");
    let lhs = euler_field(f.vars(), n_u).bracket(f);
    assert_eq!(lhs, f.scale(&Gauss::real(g.clone())), "ad(euler) eigenvalue mismatch");
    GradeClass::Homogeneous(g)
}

// ---------------------------------------------------------------------------
// Standard families on a Siegel domain.

/// `Φ: U_C → V` (an `m × n` complex matrix) and symmetric `c: V × V → V`
/// with `c[a][b]` the image of `(e_a, e_b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct YData {
    pub phi: Matrix,
    pub c: Vec<Vec<Vec<Gauss>>>,
}

/// Symmetric real `a: U × U → U` (`a[i][j]`) and `b: U_C × V → V` (`b[i][a]`).
#[derive(Clone, Debug, PartialEq)]
pub struct ZData {
    pub a: Vec<Vec<Vec<Gauss>>>,
    pub b: Vec<Vec<Vec<Gauss>>>,
}

fn uvar(spec: &SiegelDomainSpec, i: usize) -> MultiPoly {
    MultiPoly::var(spec.vars.clone(), i)
}

fn vvar(spec: &SiegelDomainSpec, a: usize) -> MultiPoly {
    MultiPoly::var(spec.vars.clone(), spec.n_u() + a)
}

fn lin_form(spec: &SiegelDomainSpec, coeffs: &[(usize, Gauss)]) -> MultiPoly {
    let mut c = vector::zeros(spec.vars.len());
    for (i, x) in coeffs {
        c[*i] = &c[*i] + x;
    }
    MultiPoly::linear(spec.vars.clone(), &c)
}

/// `∂_{u0}`: the constant field `(u0, 0)`.
pub fn d_u(spec: &SiegelDomainSpec, u0: &[Gauss]) -> PolyVectorField {
    PolyVectorField::constant(&spec.vars, &vector::pad(u0, spec.vars.len()))
}

/// `∂̃_{v0}(u, v) = (2i Q(v, v0), v0)`.
pub fn dtilde_v(spec: &SiegelDomainSpec, v0: &[Gauss]) -> PolyVectorField {
    let (n, m) = (spec.n_u(), spec.n_v());
    let two_i = Gauss::new(rat(0, 1), rat(2, 1));
    let mut comps = Vec::with_capacity(n + m);
    for i in 0..n {
        let mut terms = Vec::new();
        for a in 0..m {
            for b in 0..m {
                let c = &(&two_i * &v0[b].conj()) * &spec.q[a][b][i];
                if !c.is_zero() {
                    terms.push((n + a, c));
                }
            }
        }
        comps.push(lin_form(spec, &terms));
    }
    for x in v0 {
        comps.push(MultiPoly::constant(spec.vars.clone(), x.clone()));
    }
    PolyVectorField { comps }
}

/// `X(A, B)(u, v) = (A u, B v)`.
pub fn linear_field(spec: &SiegelDomainSpec, a: &Matrix, b: &Matrix) -> PolyVectorField {
    let (n, m) = (spec.n_u(), spec.n_v());
    let mut comps = Vec::with_capacity(n + m);
    for i in 0..n {
        comps.push(lin_form(spec, &(0..n).map(|j| (j, a[(i, j)].clone())).collect::<Vec<_>>()));
    }
    for x in 0..m {
        comps.push(lin_form(spec, &(0..m).map(|y| (n + y, b[(x, y)].clone())).collect::<Vec<_>>()));
    }
    PolyVectorField { comps }
}

/// `∂ = X(id, id/2)`.
pub fn euler(spec: &SiegelDomainSpec) -> PolyVectorField {
    euler_field(&spec.vars, spec.n_u())
}

/// `∂'(u, v) = (0, i v)`.
pub fn partial_prime(spec: &SiegelDomainSpec) -> PolyVectorField {
    let (n, m) = (spec.n_u(), spec.n_v());
    linear_field(spec, &Matrix::zeros(n, n), &Matrix::identity(m).scale(&Gauss::i()))
}

/// `Y_{Φ,c}(u, v) = (2i Q(v, Φ(ū)), Φ(u) + c(v, v))`; the first entry is
/// holomorphic since `Q` is antilinear in its second slot.
pub fn y_field(spec: &SiegelDomainSpec, y: &YData) -> PolyVectorField {
    let (n, m) = (spec.n_u(), spec.n_v());
    let two_i = Gauss::new(rat(0, 1), rat(2, 1));
    let zero = MultiPoly::zero(spec.vars.clone());
    let mut comps = vec![zero; n + m];
    for (i, comp) in comps.iter_mut().enumerate().take(n) {
        for a in 0..m {
            for b in 0..m {
                let qi = &spec.q[a][b][i];
                if qi.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let coef = &(&two_i * &y.phi[(b, c)].conj()) * qi;
                    if !coef.is_zero() {
                        *comp = &*comp + &(&vvar(spec, a) * &uvar(spec, c)).scale(&coef);
                    }
                }
            }
        }
    }
    for a in 0..m {
        let mut p = lin_form(spec, &(0..n).map(|c| (c, y.phi[(a, c)].clone())).collect::<Vec<_>>());
        for b in 0..m {
            for b2 in 0..m {
                let coef = &y.c[b][b2][a];
                if !coef.is_zero() {
                    p = &p + &(&vvar(spec, b) * &vvar(spec, b2)).scale(coef);
                }
            }
        }
        comps[n + a] = p;
    }
    PolyVectorField { comps }
}

/// `Z_{a,b}(u, v) = (a(u, u), b(u, v))`.
pub fn z_field(spec: &SiegelDomainSpec, z: &ZData) -> PolyVectorField {
    let (n, m) = (spec.n_u(), spec.n_v());
    let mut comps = vec![MultiPoly::zero(spec.vars.clone()); n + m];
    for (k, comp) in comps.iter_mut().enumerate().take(n) {
        for i in 0..n {
            for j in 0..n {
                let c = &z.a[i][j][k];
                if !c.is_zero() {
                    *comp = &*comp + &(&uvar(spec, i) * &uvar(spec, j)).scale(c);
                }
            }
        }
    }
    for x in 0..m {
        for i in 0..n {
            for b in 0..m {
                let c = &z.b[i][b][x];
                if !c.is_zero() {
                    comps[n + x] = &comps[n + x] + &(&uvar(spec, i) * &vvar(spec, b)).scale(c);
                }
            }
        }
    }
    PolyVectorField { comps }
}

// ---------------------------------------------------------------------------
// Conditions on the tableaux.

/// The linear Lie algebra generated by `ad(T)|_{b(1)}`, `T ∈ b(0)`, stored as
/// flattened `n × n` matrices in `u` coordinates.
#[derive(Clone, Debug)]
pub struct ConeAlgebra {
    pub space: Subspace,
    pub n: usize,
}

impl ConeAlgebra {
    pub fn new(spec: &SiegelDomainSpec) -> Result<Self, FieldError> {
        let n = spec.n_u();
        let mut mats = Vec::new();
        for x in spec.nj.grading.zero.basis() {
            mats.push(spec.ad_on_u(x).map_err(|e| FieldError::Shape(e.to_string()))?);
        }
        let mut space = Subspace::span(n * n, mats.iter().map(Matrix::flatten));
        loop {
            let mut grown = space.clone();
            let basis: Vec<Matrix> =
                space.basis().iter().map(|f| Matrix::from_rows(f.chunks(n).map(<[Gauss]>::to_vec).collect())).collect();
            for (i, a) in basis.iter().enumerate() {
                for b in &basis[i + 1..] {
                    let c = a.commutator(b).flatten();
                    if !grown.contains(&c) {
                        grown = grown.sum(&Subspace::span(n * n, vec![c]));
                    }
                }
            }
            if grown.dim() == space.dim() {
                break;
            }
            space = grown;
        }
        Ok(ConeAlgebra { space, n })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        m.is_real() && self.space.contains(&m.flatten())
    }
}

/// Real basis `e_a, i e_a` of `V`.
fn real_basis_v(m: usize) -> Vec<Vec<Gauss>> {
    let mut out: Vec<Vec<Gauss>> = (0..m).map(|a| vector::unit(m, a)).collect();
    out.extend((0..m).map(|a| vector::mul_i(&vector::unit(m, a))));
    out
}

/// Real basis plus pairwise sums; enough to pin down a real quadratic form.
fn polarization_points(basis: &[Vec<Gauss>]) -> Vec<Vec<Gauss>> {
    let mut out = basis.to_vec();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            out.push(vector::add(&basis[i], &basis[j]));
        }
    }
    out
}

fn fmt_vec(v: &[Gauss]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn im_vec(v: &[Gauss]) -> Vec<Gauss> {
    vector::im(v)
}

fn c_apply(c: &[Vec<Vec<Gauss>>], x: &[Gauss], y: &[Gauss], m: usize) -> Vec<Gauss> {
    let mut out = vector::zeros(m);
    for (a, xa) in x.iter().enumerate() {
        for (b, yb) in y.iter().enumerate() {
            let f = xa * yb;
            if !f.is_zero() {
                vector::axpy(&mut out, &f, &c[a][b]);
            }
        }
    }
    out
}

fn b_apply(b: &[Vec<Vec<Gauss>>], u: &[Gauss], v: &[Gauss], m: usize) -> Vec<Gauss> {
    c_apply(b, u, v, m)
}

fn check(name: &'static str, witness: Option<String>) -> AxiomCheck {
    AxiomCheck { name, passed: witness.is_none(), witness }
}

fn y2_lhs_rhs(spec: &SiegelDomainSpec, y: &YData, v: &[Gauss], vp: &[Gauss]) -> (Vec<Gauss>, Vec<Gauss>) {
    let m = spec.n_v();
    let lhs = spec.q_form(&c_apply(&y.c, vp, vp, m), v);
    let inner = y.phi.mul_vec(&spec.q_form(v, vp));
    let rhs = vector::scale(&Gauss::new(rat(0, 1), rat(2, 1)), &spec.q_form(vp, &inner));
    (lhs, rhs)
}

fn y2_points(m: usize) -> Vec<(Vec<Gauss>, Vec<Gauss>)> {
    let units: Vec<Vec<Gauss>> = (0..m).map(|a| vector::unit(m, a)).collect();
    let mut out = Vec::new();
    for v in &units {
        for vp in polarization_points(&units) {
            out.push((v.clone(), vp));
        }
    }
    out
}

/// Conditions (Y1) and (Y2) for a pair `(Φ, c)`.
pub fn check_y_conditions(spec: &SiegelDomainSpec, cone: &ConeAlgebra, y: &YData) -> ValidationReport {
    let (n, m) = (spec.n_u(), spec.n_v());
    let mut y1 = None;
    for v0 in real_basis_v(m) {
        let cols: Vec<Vec<Gauss>> = (0..n).map(|j| im_vec(&spec.q_form(&y.phi.col(j), &v0))).collect();
        let mat = Matrix::from_cols(n, &cols);
        if !cone.contains(&mat) {
            y1 = Some(format!("v0 = {}", fmt_vec(&v0)));
            break;
        }
    }
    let mut y2 = None;
    for (v, vp) in y2_points(m) {
        let (lhs, rhs) = y2_lhs_rhs(spec, y, &v, &vp);
        if lhs != rhs {
            y2 = Some(format!("v = {}, v' = {}: {} != {}", fmt_vec(&v), fmt_vec(&vp), fmt_vec(&lhs), fmt_vec(&rhs)));
            break;
        }
    }
    ValidationReport { checks: vec![check("Y1", y1), check("Y2", y2)] }
}

/// The symmetric `c` making `(Φ, c)` satisfy (Y2), if one exists.
pub fn solve_c_for_phi(spec: &SiegelDomainSpec, phi: &Matrix) -> Result<YData, FieldError> {
    let m = spec.n_v();
    let zero_c = vec![vec![vector::zeros(m); m]; m];
    let points = y2_points(m);
    let mut unknowns = Vec::new();
    for a in 0..m {
        for b in a..m {
            for x in 0..m {
                unknowns.push((a, b, x));
            }
        }
    }
    let base = YData { phi: phi.clone(), c: zero_c.clone() };
    let mut rhs = Vec::new();
    for (v, vp) in &points {
        let (lhs0, r) = y2_lhs_rhs(spec, &base, v, vp);
        debug_assert!(vector::is_zero(&lhs0));
        rhs.extend(r);
    }
    let mut cols = Vec::new();
    for &(a, b, x) in &unknowns {
        let mut c = zero_c.clone();
        c[a][b][x] = Gauss::one();
        c[b][a][x] = Gauss::one();
        let yd = YData { phi: phi.clone(), c };
        let mut col = Vec::new();
        for (v, vp) in &points {
            col.extend(y2_lhs_rhs(spec, &yd, v, vp).0);
        }
        cols.push(col);
    }
    let mut c = zero_c;
    if !unknowns.is_empty() {
        let sol = Matrix::from_cols(rhs.len(), &cols).solve(&rhs)?;
        for (&(a, b, x), val) in unknowns.iter().zip(&sol.particular) {
            c[a][b][x] = val.clone();
            c[b][a][x] = val.clone();
        }
    }
    Ok(YData { phi: phi.clone(), c })
}

/// `A_{u0} = a(u0, ·)` as an `n × n` matrix.
pub fn a_map(z: &ZData, u0: &[Gauss], n: usize) -> Matrix {
    let cols: Vec<Vec<Gauss>> = (0..n).map(|j| c_apply(&z.a, u0, &vector::unit(n, j), n)).collect();
    Matrix::from_cols(n, &cols)
}

/// `B_{u0} = b(u0, ·) / 2` as an `m × m` matrix.
pub fn b_map(z: &ZData, u0: &[Gauss], m: usize) -> Matrix {
    let cols: Vec<Vec<Gauss>> =
        (0..m).map(|a| vector::scale(&Gauss::from_ratio(1, 2), &b_apply(&z.b, u0, &vector::unit(m, a), m))).collect();
    Matrix::from_cols(m, &cols)
}

/// Whether `X(A, B)` preserves `Q`: `A Q(v, v') = Q(Bv, v') + Q(v, Bv')`.
pub fn is_associated(spec: &SiegelDomainSpec, a: &Matrix, b: &Matrix) -> Option<String> {
    let m = spec.n_v();
    for x in 0..m {
        for y in 0..m {
            let ex = vector::unit(m, x);
            let ey = vector::unit(m, y);
            let lhs = a.mul_vec(&spec.q[x][y]);
            let rhs = vector::add(&spec.q_form(&b.mul_vec(&ex), &ey), &spec.q_form(&ex, &b.mul_vec(&ey)));
            if lhs != rhs {
                return Some(format!("v = e{}, v' = e{}", x + 1, y + 1));
            }
        }
    }
    None
}

/// Conditions (Z1)-(Z4) for a pair `(a, b)`.
pub fn check_z_conditions(spec: &SiegelDomainSpec, cone: &ConeAlgebra, z: &ZData) -> ValidationReport {
    let (n, m) = (spec.n_u(), spec.n_v());
    let units_u: Vec<Vec<Gauss>> = (0..n).map(|i| vector::unit(n, i)).collect();
    let mut z1 = None;
    let mut z2 = None;
    for u0 in &units_u {
        let a = a_map(z, u0, n);
        if z1.is_none() && !cone.contains(&a) {
            z1 = Some(format!("u0 = {}", fmt_vec(u0)));
        }
        let b = b_map(z, u0, m);
        if z2.is_none() {
            if let Some(w) = is_associated(spec, &a, &b) {
                z2 = Some(format!("u0 = {}: not associated at {w}", fmt_vec(u0)));
            } else if !b.trace().im.eq(&rat(0, 1)) {
                z2 = Some(format!("u0 = {}: Im tr B = {}", fmt_vec(u0), b.trace()));
            }
        }
    }
    let rb = real_basis_v(m);
    let mut z3 = None;
    'z3: for v in &rb {
        for vp in &rb {
            let cols: Vec<Vec<Gauss>> =
                units_u.iter().map(|e| im_vec(&spec.q_form(&b_apply(&z.b, e, v, m), vp))).collect();
            if !cone.contains(&Matrix::from_cols(n, &cols)) {
                z3 = Some(format!("v = {}, v' = {}", fmt_vec(v), fmt_vec(vp)));
                break 'z3;
            }
        }
    }
    let mut z4 = None;
    'z4: for v in &rb {
        for vp in &rb {
            for vpp in polarization_points(&rb) {
                let lhs = spec.q_form(&b_apply(&z.b, &spec.q_form(&vpp, vp), &vpp, m), v);
                let rhs = spec.q_form(&vpp, &b_apply(&z.b, &spec.q_form(v, &vpp), vp, m));
                if lhs != rhs {
                    z4 = Some(format!("v = {}, v' = {}, v'' = {}", fmt_vec(v), fmt_vec(vp), fmt_vec(&vpp)));
                    break 'z4;
                }
            }
        }
    }
    ValidationReport { checks: vec![check("Z1", z1), check("Z2", z2), check("Z3", z3), check("Z4", z4)] }
}

// ---------------------------------------------------------------------------
// ψ_e and φ_e.

fn expect_grade(spec: &SiegelDomainSpec, f: &PolyVectorField, g: Rat) -> Result<(), FieldError> {
    match grade_classify(f, spec.n_u()) {
        GradeClass::Zero => Ok(()),
        GradeClass::Homogeneous(h) if h == g => Ok(()),
        other => Err(FieldError::WrongGrade { expected: g, found: other.to_string() }),
    }
}

/// `ψ_e = ad(∂') ad(∂_e)` on grade 1/2, with `e = E`.
pub fn psi_e(spec: &SiegelDomainSpec, y: &PolyVectorField) -> Result<PolyVectorField, FieldError> {
    expect_grade(spec, y, rat(1, 2))?;
    let de = d_u(spec, &spec.e_coords);
    Ok(partial_prime(spec).bracket(&de.bracket(y)))
}

/// `φ_e = ad(∂_e)^2 / 2` on grade 1.
pub fn phi_e(spec: &SiegelDomainSpec, z: &PolyVectorField) -> Result<PolyVectorField, FieldError> {
    expect_grade(spec, z, rat(1, 1))?;
    let de = d_u(spec, &spec.e_coords);
    Ok(de.bracket(&de.bracket(z)).scale(&Gauss::from_ratio(1, 2)))
}

// ---------------------------------------------------------------------------
// Real Lie algebras of fields.

/// Real-linear coordinates for a fixed list of fields.
#[derive(Clone, Debug)]
struct FieldCoords {
    keys: BTreeMap<(usize, Monomial), usize>,
    left_inverse: Matrix,
    frame: Matrix,
}

fn realify_field(keys: &BTreeMap<(usize, Monomial), usize>, f: &PolyVectorField) -> Option<Vec<Gauss>> {
    let k = keys.len();
    let mut out = vector::zeros(2 * k);
    for (i, comp) in f.comps.iter().enumerate() {
        for (m, c) in comp.terms() {
            let &row = keys.get(&(i, m.clone()))?;
            out[row] = Gauss::real(c.re.clone());
            out[k + row] = Gauss::real(c.im.clone());
        }
    }
    Some(out)
}

impl FieldCoords {
    fn new(fields: &[PolyVectorField]) -> Result<Self, FieldError> {
        let mut keys = BTreeMap::new();
        for f in fields {
            for (i, comp) in f.comps.iter().enumerate() {
                for (m, _) in comp.terms() {
                    let next = keys.len();
                    keys.entry((i, m.clone())).or_insert(next);
                }
            }
        }
        let cols: Vec<Vec<Gauss>> = fields.iter().map(|f| realify_field(&keys, f).expect("own keys")).collect();
        let frame = Matrix::from_cols(2 * keys.len(), &cols);
        let ft = frame.transpose();
        let left_inverse = ft.mul(&frame).inverse().map_err(|_| FieldError::Dependent)?.mul(&ft);
        Ok(FieldCoords { keys, left_inverse, frame })
    }

    fn coords(&self, f: &PolyVectorField) -> Option<Vec<Gauss>> {
        let r = realify_field(&self.keys, f)?;
        let x = self.left_inverse.mul_vec(&r);
        (self.frame.mul_vec(&x) == r).then_some(x)
    }
}

/// A real Lie algebra `g` realized by fields `X ↦ X^#` with
/// `[X, Y]^# = [Y^#, X^#]`.
#[derive(Clone, Debug)]
pub struct FieldAlgebra {
    pub labels: Vec<String>,
    pub fields: Vec<PolyVectorField>,
    pub algebra: LieAlgebra,
    coords: FieldCoords,
}

impl FieldAlgebra {
    /// Fails unless the fields are real-linearly independent and their span
    /// is closed under the bracket.
    pub fn new(labels: Vec<String>, fields: Vec<PolyVectorField>) -> Result<Self, FieldError> {
        if labels.len() != fields.len() || fields.is_empty() {
            return Err(FieldError::Shape("one label per field".into()));
        }
        for f in &fields[1..] {
            fields[0].same_domain(f)?;
        }
        let coords = FieldCoords::new(&fields)?;
        let d = fields.len();
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
        let results: Vec<Result<Vec<(usize, usize, usize, Gauss)>, FieldError>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let f = fields[j].bracket(&fields[i]);
                let c = coords.coords(&f).ok_or_else(|| FieldError::NotClosed(labels[i].clone(), labels[j].clone()))?;
                Ok(c.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(k, x)| (i, j, k, x)).collect())
            })
            .collect();
        let mut triples = Vec::new();
        for r in results {
            triples.extend(r?);
        }
        let algebra = LieAlgebra::from_triples(labels.clone(), &triples)?;
        Ok(FieldAlgebra { labels, fields, algebra, coords })
    }

    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    pub fn vars(&self) -> &Arc<[String]> {
        self.fields[0].vars()
    }

    /// `Σ x_i X_i^#` for complex coefficients.
    pub fn field_of(&self, x: &[Gauss]) -> PolyVectorField {
        let mut out = PolyVectorField::zero(self.vars());
        for (xi, f) in x.iter().zip(&self.fields) {
            if !xi.is_zero() {
                out = out.add(&f.scale(xi));
            }
        }
        out
    }

    /// Real coordinates of a field in the span.
    pub fn coords_of(&self, f: &PolyVectorField) -> Option<Vec<Gauss>> {
        self.coords.coords(f)
    }

    /// `N × dim` complex matrix of values at `p`.
    pub fn eval_matrix(&self, p: &[Gauss], count: usize) -> Matrix {
        let cols: Vec<Vec<Gauss>> = self.fields[..count].iter().map(|f| f.eval(p)).collect();
        Matrix::from_cols(p.len(), &cols)
    }

    /// Real subspace of `g` whose fields vanish at `p`.
    pub fn isotropy(&self, p: &[Gauss]) -> Subspace {
        let m = realify_matrix(&self.eval_matrix(p, self.dim()));
        Subspace::span(self.dim(), m.kernel())
    }

    /// `g_- = {X + iY : X^#_p + i Y^#_p = 0}`, the kernel of the complex-linear
    /// extension of evaluation at `p`.
    pub fn g_minus(&self, p: &[Gauss]) -> Subspace {
        Subspace::span(self.dim(), self.eval_matrix(p, self.dim()).kernel())
    }

    /// `j` on the prefix `b` determined by `(jX)^#_p = i X^#_p`.
    pub fn infer_j(&self, b_dim: usize, p: &[Gauss]) -> Result<Matrix, FieldError> {
        let ev = self.eval_matrix(p, b_dim);
        let r = realify_matrix(&ev);
        if r.rank() != b_dim {
            return Err(FieldError::NotInvertibleAtReference);
        }
        let mut cols = Vec::with_capacity(b_dim);
        for k in 0..b_dim {
            let target = realify_vec(&vector::mul_i(&ev.col(k)));
            let x = r.solve_unique(&target).map_err(|_| FieldError::NotInvertibleAtReference)?;
            cols.push(x);
        }
        let j = Matrix::from_cols(b_dim, &cols);
        assert_eq!(j.mul(&j), Matrix::identity(b_dim).scale(&-Gauss::one()), "j^2 = -1");
        Ok(j)
    }

    /// Real element of the prefix `b` whose field takes the value `target` at `p`.
    pub fn preimage_at(&self, b_dim: usize, p: &[Gauss], target: &[Gauss]) -> Result<Vec<Gauss>, FieldError> {
        let r = realify_matrix(&self.eval_matrix(p, b_dim));
        r.solve_unique(&realify_vec(target)).map_err(|_| FieldError::NotInvertibleAtReference)
    }
}

/// Stacks real and imaginary parts of a complex vector.
pub fn realify_vec(v: &[Gauss]) -> Vec<Gauss> {
    v.iter().map(|x| Gauss::real(x.re.clone())).chain(v.iter().map(|x| Gauss::real(x.im.clone()))).collect()
}

/// `[Re M; Im M]`.
pub fn realify_matrix(m: &Matrix) -> Matrix {
    let mut rows: Vec<Vec<Gauss>> =
        (0..m.rows()).map(|i| m.row(i).iter().map(|x| Gauss::real(x.re.clone())).collect()).collect();
    rows.extend((0..m.rows()).map(|i| m.row(i).iter().map(|x| Gauss::real(x.im.clone())).collect::<Vec<_>>()));
    Matrix::from_rows(rows)
}

/// Checks that every isotropy field splits as `X_0 + (Z + φ_e Z) + (Y + ψ_e Y)`
/// with `X_0` of grade 0 vanishing at the reference point.
pub fn check_isotropy_structure(spec: &SiegelDomainSpec, alg: &FieldAlgebra, iso: &Subspace) -> Result<(), String> {
    let p = spec.reference_point().concat();
    let n_u = spec.n_u();
    for x in iso.basis() {
        let f = alg.field_of(x);
        let parts = decompose_by_grade(&f, n_u);
        let get = |g: Rat| parts.get(&g).cloned().unwrap_or_else(|| PolyVectorField::zero(f.vars()));
        let z = get(rat(1, 1));
        let y = get(rat(1, 2));
        let x0 = get(rat(0, 1));
        let phi = phi_e(spec, &z).map_err(|e| e.to_string())?;
        let psi = psi_e(spec, &y).map_err(|e| e.to_string())?;
        if phi != get(rat(-1, 1)) {
            return Err(format!("grade -1 part of {f} is not phi_e of its grade 1 part"));
        }
        if psi != get(rat(-1, 2)) {
            return Err(format!("grade -1/2 part of {f} is not psi_e of its grade 1/2 part"));
        }
        if !vector::is_zero(&x0.eval(&p)) {
            return Err(format!("grade 0 part of {f} does not vanish at the reference point"));
        }
    }
    Ok(())
}

fn realify_all(fields: &[&PolyVectorField]) -> Vec<Vec<Gauss>> {
    let mut keys = BTreeMap::new();
    for f in fields {
        for (i, comp) in f.comps.iter().enumerate() {
            for (m, _) in comp.terms() {
                let next = keys.len();
                keys.entry((i, m.clone())).or_insert(next);
            }
        }
    }
    fields.iter().map(|f| realify_field(&keys, f).expect("own keys")).collect()
}

/// Whether `f` is a real linear combination of `basis`.
pub fn in_real_span(basis: &[PolyVectorField], f: &PolyVectorField) -> bool {
    if f.is_zero() {
        return true;
    }
    let mut all: Vec<&PolyVectorField> = basis.iter().collect();
    all.push(f);
    let rows = realify_all(&all);
    let n = rows[0].len();
    let base = Subspace::span(n, rows[..basis.len()].to_vec());
    base.contains(&rows[basis.len()])
}

/// A real basis of the Lie algebra generated by `gens`; fails with
/// `NotClosed` once the dimension exceeds `max_dim`.
pub fn generated_subalgebra(gens: &[PolyVectorField], max_dim: usize) -> Result<Vec<PolyVectorField>, FieldError> {
    let mut basis: Vec<PolyVectorField> = Vec::new();
    let mut queue: Vec<PolyVectorField> = gens.to_vec();
    while let Some(f) = queue.pop() {
        if in_real_span(&basis, &f) {
            continue;
        }
        for b in &basis {
            queue.push(b.bracket(&f));
        }
        basis.push(f);
        if basis.len() > max_dim {
            return Err(FieldError::NotClosed(format!("{} generators", gens.len()), format!("dimension > {max_dim}")));
        }
    }
    Ok(basis)
}

fn mono(nvars: usize, idx: &[usize]) -> Monomial {
    let mut e = vec![0; nvars];
    for &i in idx {
        e[i] += 1;
    }
    Monomial(e)
}

/// Recovers `(Φ, c)` from a grade-1/2 field and checks `f = Y_{Φ,c}`.
pub fn y_data_of(spec: &SiegelDomainSpec, f: &PolyVectorField) -> Result<YData, FieldError> {
    expect_grade(spec, f, rat(1, 2))?;
    let (n, m) = (spec.n_u(), spec.n_v());
    let nv = n + m;
    let phi = Matrix::from_rows(
        (0..m).map(|a| (0..n).map(|c| f.comps[n + a].coefficient(&mono(nv, &[c]))).collect()).collect(),
    );
    let mut c = vec![vec![vector::zeros(m); m]; m];
    for a in 0..m {
        for b in 0..m {
            for (x, cx) in c[a][b].iter_mut().enumerate() {
                let coef = f.comps[n + x].coefficient(&mono(nv, &[n + a, n + b]));
                *cx = if a == b { coef } else { &coef * &Gauss::from_ratio(1, 2) };
            }
        }
    }
    let y = YData { phi, c };
    if y_field(spec, &y) != *f {
        return Err(FieldError::Shape(format!("{f} is not of the form Y_(Phi,c)")));
    }
    Ok(y)
}

/// Recovers `(a, b)` from a grade-1 field and checks `f = Z_{a,b}`.
pub fn z_data_of(spec: &SiegelDomainSpec, f: &PolyVectorField) -> Result<ZData, FieldError> {
    expect_grade(spec, f, rat(1, 1))?;
    let (n, m) = (spec.n_u(), spec.n_v());
    let nv = n + m;
    let mut a = vec![vec![vector::zeros(n); n]; n];
    for i in 0..n {
        for j in 0..n {
            for (k, ak) in a[i][j].iter_mut().enumerate() {
                let coef = f.comps[k].coefficient(&mono(nv, &[i, j]));
                *ak = if i == j { coef } else { &coef * &Gauss::from_ratio(1, 2) };
            }
        }
    }
    let b = (0..n)
        .map(|i| (0..m).map(|y| (0..m).map(|x| f.comps[n + x].coefficient(&mono(nv, &[i, n + y]))).collect()).collect())
        .collect();
    let z = ZData { a, b };
    if z_field(spec, &z) != *f {
        return Err(FieldError::Shape(format!("{f} is not of the form Z_(a,b)")));
    }
    Ok(z)
}
