//! One-dimensional representations: the projection `τ: b → b_-`, characters
//! `θ` of `g_-`, the multiplier `χ^θ` on `B`, the relatively invariant
//! functions `Δ_ξ` on the cone and the kernels `K^ξ`.

use num_complex::Complex64;

use crate::builtins::BuiltinExample;
use crate::exact::{vector, Gauss, Matrix, Subspace};
use crate::normal_j::NormalJAlgebra;
use crate::siegel::{BWord, PeelError, Point, SiegelDomainSpec};
use crate::vfields::realify_matrix;

/// `τ(U + V + T) = (V + ijV)/2 + T + ijT` for `U ∈ b(1)`, `V ∈ b(1/2)`,
/// `T ∈ b(0)`, extended complex-linearly.
#[derive(Clone, Debug)]
pub struct Tau {
    j: Matrix,
    frame: Matrix,
    proj: Matrix,
    d0: usize,
    dh: usize,
}

impl Tau {
    pub fn new(nj: &NormalJAlgebra) -> Self {
        let g = &nj.grading;
        let cols: Vec<Vec<Gauss>> = g.zero.basis().iter().chain(g.half.basis()).chain(g.one.basis()).cloned().collect();
        let frame = Matrix::from_cols(nj.dim(), &cols);
        let proj = frame.inverse().expect("grading is a direct sum");
        Tau { j: nj.j.clone(), frame, proj, d0: g.zero.dim(), dh: g.half.dim() }
    }

    /// The `b(0)`, `b(1/2)`, `b(1)` components.
    pub fn split(&self, x: &[Gauss]) -> [Vec<Gauss>; 3] {
        let c = self.proj.mul_vec(x);
        let part = |lo: usize, hi: usize| {
            let mut cc = vector::zeros(c.len());
            cc[lo..hi].clone_from_slice(&c[lo..hi]);
            self.frame.mul_vec(&cc)
        };
        let n = c.len();
        [part(0, self.d0), part(self.d0, self.d0 + self.dh), part(self.d0 + self.dh, n)]
    }

    pub fn apply(&self, x: &[Gauss]) -> Vec<Gauss> {
        let [t, v, _] = self.split(x);
        let ijt = vector::mul_i(&self.j.mul_vec(&t));
        let ijv = vector::mul_i(&self.j.mul_vec(&v));
        let half = Gauss::from_ratio(1, 2);
        let mut out = vector::add(&t, &ijt);
        vector::axpy(&mut out, &half, &v);
        vector::axpy(&mut out, &half, &ijv);
        out
    }
}

/// `b_- = g_- ∩ b_C`, in `g` coordinates.
pub fn b_minus(ex: &BuiltinExample, g_minus: &Subspace) -> Subspace {
    let b_c = Subspace::span(ex.g.dim(), (0..ex.b_dim()).map(|i| vector::unit(ex.g.dim(), i)));
    g_minus.intersect(&b_c)
}

/// Real covectors `ξ ∈ g^*` with `ξ([g_-, g_-]) = 0`, as rows.
pub fn characters_space(g: &crate::lie::LieAlgebra, g_minus: &Subspace) -> Vec<Vec<Gauss>> {
    let basis = g_minus.basis();
    let mut rows = Vec::new();
    for (i, x) in basis.iter().enumerate() {
        for y in &basis[i + 1..] {
            let w = g.bracket(x, y);
            rows.push(vector::re(&w));
            rows.push(vector::im(&w));
        }
    }
    if rows.is_empty() {
        return (0..g.dim()).map(|i| vector::unit(g.dim(), i)).collect();
    }
    Matrix::from_rows(rows).kernel()
}

/// A character of `g_-` stored as a complex-linear covector on `g_C`; only
/// its values on `g_-` are meaningful.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaChar {
    pub covector: Vec<Gauss>,
}

impl ThetaChar {
    /// `θ = iξ` for a real covector `ξ`.
    pub fn from_xi(xi: &[Gauss]) -> Self {
        ThetaChar { covector: vector::mul_i(xi) }
    }

    pub fn scaled(&self, c: &Gauss) -> Self {
        ThetaChar { covector: vector::scale(c, &self.covector) }
    }

    pub fn value(&self, w: &[Gauss]) -> Gauss {
        vector::dot(&self.covector, w)
    }

    /// Checks that `θ` vanishes on `[g_-, g_-]`; returns an offending pair.
    pub fn check_character(&self, g: &crate::lie::LieAlgebra, g_minus: &Subspace) -> Result<(), (usize, usize)> {
        let b = g_minus.basis();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                if !self.value(&g.bracket(&b[i], &b[j])).is_zero() {
                    return Err((i, j));
                }
            }
        }
        Ok(())
    }
}

/// `θ ∘ τ` as a covector on `b` (complex values on real elements).
pub fn theta_tau(ex: &BuiltinExample, tau: &Tau, theta: &ThetaChar) -> Vec<Gauss> {
    (0..ex.b_dim())
        .map(|i| {
            let t = tau.apply(&vector::unit(ex.b_dim(), i));
            theta.value(&ex.b_to_g(&t))
        })
        .collect()
}

/// `χ^θ(word) = Π e^{θ(τ(X))}` over the letters `exp(X)` of the word.
pub fn chi(spec: &SiegelDomainSpec, theta_tau: &[Gauss], word: &BWord) -> Complex64 {
    let mut out = Complex64::new(1.0, 0.0);
    for letter in &word.0 {
        let (x, t) = spec.letter_generator(letter);
        let c = vector::dot(theta_tau, &x);
        if c.is_zero() || t == 0.0 {
            continue;
        }
        out *= (c.to_c64() * t).exp();
    }
    out
}

/// Exponents `s_k` with `Δ(Σ p_k E_k) = Π p_k^{s_k}` for `Δ_ξ`: `s_k = 2 ξ(E_k)`.
pub fn delta_exponents(nj: &NormalJAlgebra, xi_b: &[Gauss]) -> Vec<Gauss> {
    nj.e_basis.iter().map(|e| &Gauss::from_int(2) * &vector::dot(xi_b, e)).collect()
}

/// Exponents for `Δ_{ξ,ξ'}`: `s_k = conj(a_k(iξ) + a_k(-iξ'))` with
/// `a_k(θ) = θ(τ(A_k))`.
pub fn delta_exponents_pair(nj: &NormalJAlgebra, xi_b: &[Gauss], xi2_b: &[Gauss]) -> Vec<Gauss> {
    let tau = Tau::new(nj);
    nj.a_basis
        .iter()
        .map(|a| {
            let ta = tau.apply(a);
            let s = &vector::dot(&vector::mul_i(xi_b), &ta) + &vector::dot(&vector::scale(&-Gauss::i(), xi2_b), &ta);
            s.conj()
        })
        .collect()
}

/// `Π p_k^{s_k}` from the complex peel of `w`, principal branch.
pub fn delta_eval(spec: &SiegelDomainSpec, exponents: &[Gauss], w: &[Complex64]) -> Result<Complex64, PeelError> {
    let dec = spec.peel(w, false)?;
    Ok(dec
        .pivots
        .iter()
        .zip(exponents)
        .map(|(p, s)| if s.is_zero() { Complex64::new(1.0, 0.0) } else { (s.to_c64() * p.ln()).exp() })
        .product())
}

/// `(U - conj(U'))/i - 2 Q(V, V')`.
pub fn kernel_argument(spec: &SiegelDomainSpec, z: &Point<Complex64>, w: &Point<Complex64>) -> Vec<Complex64> {
    let q = spec.q_form(&z.v, &w.v);
    z.u.iter().zip(&w.u).zip(&q).map(|((a, b), c)| (a - b.conj()) / Complex64::new(0.0, 1.0) - 2.0 * c).collect()
}

/// `K^ξ(z, w) = Δ_ξ((U - conj(U'))/i - 2Q(V, V'))`.
pub fn kernel_eval(
    spec: &SiegelDomainSpec,
    exponents: &[Gauss],
    z: &Point<Complex64>,
    w: &Point<Complex64>,
) -> Result<Complex64, PeelError> {
    delta_eval(spec, exponents, &kernel_argument(spec, z, w))
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroExtension {
    /// The functional extended by zero on `k` kills `[g, g]`.
    Passes,
    /// `θ(k) ≠ 0`; the precondition fails at this isotropy basis vector.
    NonzeroOnK(usize),
    /// The extension fails on `[e_i, e_j]`.
    Fails { i: usize, j: usize, value: Gauss },
}

/// `λ(X_b + X_k) = θ(τ(X_b))` on `g = b ⊕ k`; checks `λ([g, g]) = 0`.
pub fn check_zero_extension(ex: &BuiltinExample, theta: &ThetaChar) -> ZeroExtension {
    for (i, x) in ex.k.basis().iter().enumerate() {
        if !theta.value(x).is_zero() {
            return ZeroExtension::NonzeroOnK(i);
        }
    }
    let d = ex.g.dim();
    let bd = ex.b_dim();
    let tau = Tau::new(&ex.spec.nj);
    let tt = theta_tau(ex, &tau, theta);
    let mut cols: Vec<Vec<Gauss>> = (0..bd).map(|i| vector::unit(d, i)).collect();
    cols.extend(ex.k.basis().iter().cloned());
    let split = Matrix::from_cols(d, &cols).inverse().expect("g = b + k");
    let lambda = |x: &[Gauss]| -> Gauss {
        let c = split.mul_vec(x);
        vector::dot(&tt, &c[..bd])
    };
    for i in 0..d {
        for j in i + 1..d {
            let v = lambda(&ex.g.algebra.basis_bracket(i, j));
            if !v.is_zero() {
                return ZeroExtension::Fails { i, j, value: v };
            }
        }
    }
    ZeroExtension::Passes
}

/// `b_triv = {X ∈ b : [X, k] ⊂ k}`, in `g` coordinates.
pub fn b_triv(ex: &BuiltinExample) -> Subspace {
    ex.g.algebra.relative_normalizer(&ex.b_span(), &ex.k)
}

/// Real evaluation rank of the prefix, used to certify simple transitivity.
pub fn b_evaluation_rank(ex: &BuiltinExample) -> usize {
    realify_matrix(&ex.g.eval_matrix(ex.reference(), ex.b_dim())).rank()
}
