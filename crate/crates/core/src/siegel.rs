//! The homogeneous Siegel domain attached to a normal j-algebra.
//!
//! Points are `(U, V)` with `U ∈ b(1)_C` written in a basis of root vectors
//! (the `u` coordinates) and `V ∈ b(1/2)` written in complex coordinates
//! `ζ_a`, where the real vector `Σ Re ζ_a v_a + Im ζ_a j v_a` is identified
//! with `ζ`. The domain is `{Im U - Q(V, V) ∈ Ω}` with
//! `Q(V, V') = ([jV, V'] + i[V, V']) / 4` and `Ω = Ad(B(0)) E`.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::exact::{poly::var_list, rat, vector, ExactError, Gauss, Matrix, Rat, Scalar, Subspace};
use crate::normal_j::{NormalJAlgebra, RootKind};

/// Pivots at or below this are rejected when peeling floating-point points.
pub const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PeelError {
    #[error("pivot {k} is not positive ({value})")]
    PivotNotPositive { k: usize, value: String },
    #[error("pivot {k} vanishes")]
    PivotZero { k: usize },
    #[error("point has a component outside b(1)")]
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SiegelError {
    #[error(transparent)]
    Peel(#[from] PeelError),
    #[error("point is not in the domain: {0}")]
    DomainViolation(String),
    #[error("scale letters need floating-point evaluation")]
    NotExact,
    #[error("invalid coordinates: {0}")]
    Coordinates(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `U = Ad(exp N_1 ... exp N_r)(Σ p_k E_k)`; `lower[k]` holds the
/// coordinates of `N_k` in the stage-`k` generators `(α_l - α_k)/2, l > k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeDecomposition<S> {
    pub pivots: Vec<S>,
    pub lower: Vec<Vec<S>>,
}

impl ConeDecomposition<Complex64> {
    /// `λ_k` with `t_0 = exp(N) exp(Σ log λ_k A_k)`; this is `p_k` itself, taken
    /// with the principal logarithm for complex points.
    pub fn log_pivots(&self) -> Vec<Complex64> {
        self.pivots.iter().map(|p| p.ln()).collect()
    }
}

type Mat<S> = Vec<Vec<S>>;

fn matvec<S: Scalar>(m: &Mat<S>, v: &[S]) -> Vec<S> {
    m.iter()
        .map(|row| {
            row.iter().zip(v).fold(S::zero(), |acc, (a, x)| if a.is_zero() { acc } else { acc + a.clone() * x.clone() })
        })
        .collect()
}

fn to_mat<S: Scalar>(m: &Matrix) -> Mat<S> {
    (0..m.rows()).map(|i| m.row(i).iter().map(S::from_gauss).collect()).collect()
}

/// `exp(s M) v` for nilpotent `M`.
fn exp_nilpotent_apply<S: Scalar>(m: &Mat<S>, s: &S, v: &[S], order: usize) -> Vec<S> {
    let mut acc = v.to_vec();
    let mut term = v.to_vec();
    for i in 1..=order {
        let scaled = matvec(m, &term);
        let f = s.clone().divide(&S::from_gauss(&Gauss::from_int(i as i64)));
        term = scaled.into_iter().map(|x| x * f.clone()).collect();
        if term.iter().all(Scalar::is_zero) {
            break;
        }
        for (a, t) in acc.iter_mut().zip(&term) {
            *a = a.clone() + t.clone();
        }
    }
    acc
}

/// A generator of `exp(s X)` for `X` in a `(α_l - α_k)/2` root space.
#[derive(Clone, Debug)]
pub struct LowerGenerator {
    pub l: usize,
    pub k: usize,
    /// Element of `b` (coordinates in the algebra basis).
    pub x: Vec<Gauss>,
    pub ad_u: Matrix,
    pub ad_v: Matrix,
}

#[derive(Clone, Debug)]
struct Stage<S> {
    pivot: usize,
    gens: Vec<usize>,
    targets: Vec<usize>,
    solve: Mat<S>,
}

#[derive(Clone, Debug)]
pub struct Plan<S> {
    stages: Vec<Stage<S>>,
    ad_u: Vec<Mat<S>>,
    ad_v: Vec<Mat<S>>,
    q: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> Plan<S> {
    fn from_exact(p: &Plan<Gauss>) -> Self {
        let conv = |m: &Mat<Gauss>| -> Mat<S> { m.iter().map(|r| r.iter().map(S::from_gauss).collect()).collect() };
        Plan {
            stages: p
                .stages
                .iter()
                .map(|s| Stage {
                    pivot: s.pivot,
                    gens: s.gens.clone(),
                    targets: s.targets.clone(),
                    solve: conv(&s.solve),
                })
                .collect(),
            ad_u: p.ad_u.iter().map(conv).collect(),
            ad_v: p.ad_v.iter().map(conv).collect(),
            q: p.q.iter().map(|row| row.iter().map(|v| v.iter().map(S::from_gauss).collect()).collect()).collect(),
        }
    }
}

/// Scalars for which the domain keeps a precomputed plan.
pub trait DomainScalar: Scalar + std::fmt::Display {
    fn plan(spec: &SiegelDomainSpec) -> &Plan<Self>;
}

impl DomainScalar for Gauss {
    fn plan(spec: &SiegelDomainSpec) -> &Plan<Gauss> {
        &spec.plan_exact
    }
}

impl DomainScalar for Complex64 {
    fn plan(spec: &SiegelDomainSpec) -> &Plan<Complex64> {
        &spec.plan_float
    }
}

/// Point `(U, V)` of `b(1)_C × b(1/2)` in coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<S> {
    pub u: Vec<S>,
    pub v: Vec<S>,
}

impl<S: Scalar> Point<S> {
    pub fn concat(&self) -> Vec<S> {
        self.u.iter().chain(&self.v).cloned().collect()
    }
}

impl Point<Gauss> {
    pub fn to_c64(&self) -> Point<Complex64> {
        Point { u: self.u.iter().map(Gauss::to_c64).collect(), v: self.v.iter().map(Gauss::to_c64).collect() }
    }
}

#[derive(Clone, Debug)]
pub struct SiegelDomainSpec {
    pub nj: NormalJAlgebra,
    pub vars: Arc<[String]>,
    pub u_basis: Vec<Vec<Gauss>>,
    pub u_kinds: Vec<RootKind>,
    pub v_basis: Vec<Vec<Gauss>>,
    pub v_kinds: Vec<RootKind>,
    /// `q[a][b] = Q(e_a, e_b)` in `u` coordinates.
    pub q: Vec<Vec<Vec<Gauss>>>,
    pub e_coords: Vec<Gauss>,
    pub lower_gens: Vec<LowerGenerator>,
    /// `u_weight[k][i]`: eigenvalue of `ad(A_k)` on `u_i`; likewise for `v`.
    pub u_weight: Vec<Vec<Rat>>,
    pub v_weight: Vec<Vec<Rat>>,
    u_proj: Matrix,
    v_proj: Matrix,
    plan_exact: Plan<Gauss>,
    plan_float: Plan<Complex64>,
}

fn left_inverse(frame: &Matrix) -> Result<Matrix, SiegelError> {
    let ft = frame.transpose();
    let gram = ft.mul(frame);
    Ok(gram.inverse().map_err(|_| SiegelError::Coordinates("basis is linearly dependent".into()))?.mul(&ft))
}

impl SiegelDomainSpec {
    /// Default coordinates: `u` = `E_1..E_r` followed by the `(α_l+α_k)/2`
    /// root vectors, `v` = a complex basis of each `α_k/2` root space.
    pub fn new(nj: NormalJAlgebra) -> Result<Self, SiegelError> {
        let mut u_basis = nj.e_basis.clone();
        for rs in &nj.roots {
            if let RootKind::Sum { .. } = rs.kind {
                u_basis.extend(rs.space.basis().iter().cloned());
            }
        }
        let mut v_basis = Vec::new();
        for rs in &nj.roots {
            if let RootKind::Half(_) = rs.kind {
                let mut spanned = Subspace::zero(nj.dim());
                for x in rs.space.basis() {
                    if !spanned.contains(x) {
                        spanned = spanned.sum(&Subspace::span(nj.dim(), vec![x.clone(), nj.apply_j(x)]));
                        v_basis.push(x.clone());
                    }
                }
            }
        }
        let n = u_basis.len();
        let m = v_basis.len();
        let names: Vec<String> = (1..=n).map(|i| format!("u{i}")).chain((1..=m).map(|a| format!("v{a}"))).collect();
        SiegelDomainSpec::with_coordinates(nj, var_list(&names), u_basis, v_basis)
    }

    pub fn with_coordinates(
        nj: NormalJAlgebra,
        vars: Arc<[String]>,
        u_basis: Vec<Vec<Gauss>>,
        v_basis: Vec<Vec<Gauss>>,
    ) -> Result<Self, SiegelError> {
        let nb = nj.dim();
        let n = u_basis.len();
        let m = v_basis.len();
        let bad = |s: String| SiegelError::Coordinates(s);
        if vars.len() != n + m {
            return Err(bad(format!("{} variable names for {} coordinates", vars.len(), n + m)));
        }
        if n != nj.grading.one.dim() || 2 * m != nj.grading.half.dim() {
            return Err(bad("coordinate counts do not match dim b(1), dim b(1/2)".into()));
        }
        let kind_of = |x: &[Gauss]| nj.roots.iter().find(|rs| rs.space.contains(x)).map(|rs| rs.kind);
        let u_kinds = u_basis
            .iter()
            .map(|x| match kind_of(x) {
                Some(k @ (RootKind::Alpha(_) | RootKind::Sum { .. })) if vector::is_real(x) => Ok(k),
                _ => Err(bad("u basis vectors must be real root vectors in b(1)".into())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let v_kinds = v_basis
            .iter()
            .map(|x| match kind_of(x) {
                Some(k @ RootKind::Half(_)) if vector::is_real(x) => Ok(k),
                _ => Err(bad("v basis vectors must be real root vectors in b(1/2)".into())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let u_frame = Matrix::from_cols(nb, &u_basis);
        let u_proj = left_inverse(&u_frame)?;
        let mut v_cols = v_basis.clone();
        v_cols.extend(v_basis.iter().map(|x| nj.apply_j(x)));
        let v_proj = left_inverse(&Matrix::from_cols(nb, &v_cols))?;

        let mut e_coords = vector::zeros(n);
        let mut pivots = Vec::new();
        for (k, e) in nj.e_basis.iter().enumerate() {
            let i =
                u_basis.iter().position(|x| x == e).ok_or_else(|| bad(format!("u basis must contain E_{}", k + 1)))?;
            e_coords[i] = Gauss::one();
            pivots.push(i);
        }

        let r = nj.rank;
        let weight_of = |kind: RootKind, k: usize| kind.coefficients(r)[k].clone();
        let u_weight: Vec<Vec<Rat>> = (0..r).map(|k| u_kinds.iter().map(|&kd| weight_of(kd, k)).collect()).collect();
        let v_weight: Vec<Vec<Rat>> = (0..r).map(|k| v_kinds.iter().map(|&kd| weight_of(kd, k)).collect()).collect();

        let mut spec = SiegelDomainSpec {
            nj,
            vars,
            u_basis,
            u_kinds,
            v_basis,
            v_kinds,
            q: Vec::new(),
            e_coords,
            lower_gens: Vec::new(),
            u_weight,
            v_weight,
            u_proj,
            v_proj,
            plan_exact: Plan { stages: Vec::new(), ad_u: Vec::new(), ad_v: Vec::new(), q: Vec::new() },
            plan_float: Plan { stages: Vec::new(), ad_u: Vec::new(), ad_v: Vec::new(), q: Vec::new() },
        };

        // Q tableau.
        let mut q = vec![vec![vector::zeros(n); m]; m];
        for a in 0..m {
            let ja = spec.nj.apply_j(&spec.v_basis[a]);
            for b in 0..m {
                let r1 = spec.nj.b.bracket(&ja, &spec.v_basis[b]);
                let r2 = spec.nj.b.bracket(&spec.v_basis[a], &spec.v_basis[b]);
                let c1 = spec.u_coords(&r1)?;
                let c2 = spec.u_coords(&r2)?;
                q[a][b] = c1.iter().zip(&c2).map(|(x, y)| &(x + &y.mul_i()) * &Gauss::from_ratio(1, 4)).collect();
            }
        }
        for a in 0..m {
            for b in 0..m {
                if q[a][b] != vector::conj(&q[b][a]) {
                    return Err(bad("Q is not Hermitian".into()));
                }
            }
        }
        spec.q = q;

        // One-parameter generators in the (α_l - α_k)/2 root spaces.
        let mut gens = Vec::new();
        for rs in &spec.nj.roots {
            if let RootKind::Diff { l, k } = rs.kind {
                for x in rs.space.basis() {
                    let ad_u = spec.ad_on_u(x)?;
                    let ad_v = spec.ad_on_v(x)?;
                    gens.push(LowerGenerator { l, k, x: x.clone(), ad_u, ad_v });
                }
            }
        }
        spec.lower_gens = gens;

        let mut stages = Vec::new();
        for (k, &pivot) in pivots.iter().enumerate() {
            let gens: Vec<usize> = (0..spec.lower_gens.len()).filter(|&g| spec.lower_gens[g].k == k).collect();
            let targets: Vec<usize> =
                (0..n).filter(|&i| matches!(spec.u_kinds[i], RootKind::Sum { k: kk, .. } if kk == k)).collect();
            if gens.len() != targets.len() {
                return Err(bad("lower and upper root spaces have different dimensions".into()));
            }
            let solve = if gens.is_empty() {
                Vec::new()
            } else {
                let mut mtx = Matrix::zeros(targets.len(), gens.len());
                for (c, &g) in gens.iter().enumerate() {
                    let col = spec.lower_gens[g].ad_u.col(pivot);
                    for (rix, &t) in targets.iter().enumerate() {
                        mtx[(rix, c)] = col[t].clone();
                    }
                }
                let inv = mtx.inverse().map_err(|_| bad("ad(E_k) is singular on a lower root space".into()))?;
                to_mat(&inv)
            };
            stages.push(Stage { pivot, gens, targets, solve });
        }
        spec.plan_exact = Plan {
            stages,
            ad_u: spec.lower_gens.iter().map(|g| to_mat(&g.ad_u)).collect(),
            ad_v: spec.lower_gens.iter().map(|g| to_mat(&g.ad_v)).collect(),
            q: spec.q.clone(),
        };
        spec.plan_float = Plan::from_exact(&spec.plan_exact);

        for a in 0..m {
            let qaa = spec.q[a][a].clone();
            if vector::is_zero(&qaa) || spec.peel_closed(&qaa).is_err() {
                return Err(bad(format!("Q(v{0}, v{0}) is not in the closed cone", a + 1)));
            }
        }
        Ok(spec)
    }

    pub fn n_u(&self) -> usize {
        self.u_basis.len()
    }

    pub fn n_v(&self) -> usize {
        self.v_basis.len()
    }

    pub fn rank(&self) -> usize {
        self.nj.rank
    }

    /// Coordinates of an element of `b(1)` (or `b(1)_C`).
    pub fn u_coords(&self, x: &[Gauss]) -> Result<Vec<Gauss>, SiegelError> {
        let c = self.u_proj.mul_vec(x);
        if self.u_to_b(&c) != x {
            return Err(SiegelError::Coordinates("element is not in b(1)".into()));
        }
        Ok(c)
    }

    pub fn u_to_b(&self, c: &[Gauss]) -> Vec<Gauss> {
        let mut out = vector::zeros(self.nj.dim());
        for (ci, b) in c.iter().zip(&self.u_basis) {
            vector::axpy(&mut out, ci, b);
        }
        out
    }

    /// Complex coordinates of a real element of `b(1/2)`.
    pub fn v_coords(&self, x: &[Gauss]) -> Result<Vec<Gauss>, SiegelError> {
        let m = self.n_v();
        let c = self.v_proj.mul_vec(x);
        let z: Vec<Gauss> = (0..m).map(|a| &c[a] + &c[m + a].mul_i()).collect();
        if self.v_to_b(&z) != x {
            return Err(SiegelError::Coordinates("element is not in b(1/2)".into()));
        }
        Ok(z)
    }

    /// The real vector `Σ Re ζ_a v_a + Im ζ_a j v_a`.
    pub fn v_to_b(&self, z: &[Gauss]) -> Vec<Gauss> {
        let mut out = vector::zeros(self.nj.dim());
        for (za, va) in z.iter().zip(&self.v_basis) {
            vector::axpy(&mut out, &Gauss::real(za.re.clone()), va);
            vector::axpy(&mut out, &Gauss::real(za.im.clone()), &self.nj.apply_j(va));
        }
        out
    }

    /// `ad(x)` restricted to `b(1)` in `u` coordinates.
    pub fn ad_on_u(&self, x: &[Gauss]) -> Result<Matrix, SiegelError> {
        let cols =
            self.u_basis.iter().map(|u| self.u_coords(&self.nj.b.bracket(x, u))).collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::from_cols(self.n_u(), &cols))
    }

    /// `ad(x)` restricted to `b(1/2)` as a complex matrix; fails unless it
    /// commutes with `j` there.
    pub fn ad_on_v(&self, x: &[Gauss]) -> Result<Matrix, SiegelError> {
        let m = self.n_v();
        let mut cols = Vec::with_capacity(m);
        for va in &self.v_basis {
            let c = self.v_coords(&self.nj.b.bracket(x, va))?;
            let cj = self.v_coords(&self.nj.b.bracket(x, &self.nj.apply_j(va)))?;
            if cj != vector::mul_i(&c) {
                return Err(SiegelError::Coordinates("ad does not commute with j on b(1/2)".into()));
            }
            cols.push(c);
        }
        Ok(Matrix::from_cols(m, &cols))
    }

    /// `Q(v, w)`: complex-linear in `v`, antilinear in `w`.
    pub fn q_form<S: DomainScalar>(&self, v: &[S], w: &[S]) -> Vec<S> {
        let plan = S::plan(self);
        let mut out = vec![S::zero(); self.n_u()];
        for (a, va) in v.iter().enumerate() {
            if va.is_zero() {
                continue;
            }
            for (b, wb) in w.iter().enumerate() {
                if wb.is_zero() {
                    continue;
                }
                let f = va.clone() * wb.conj();
                for (o, qi) in out.iter_mut().zip(&plan.q[a][b]) {
                    if !qi.is_zero() {
                        *o = o.clone() + f.clone() * qi.clone();
                    }
                }
            }
        }
        out
    }

    pub fn reference_point(&self) -> Point<Gauss> {
        Point { u: self.e_coords.iter().map(Gauss::mul_i).collect(), v: vector::zeros(self.n_v()) }
    }

    /// Inverse of the orbit map `B(0) → Ω`; also accepts complex points,
    /// where only nonvanishing pivots are required.
    pub fn peel<S: DomainScalar>(&self, u: &[S], positive: bool) -> Result<ConeDecomposition<S>, PeelError> {
        self.peel_impl(u, if positive { PivotRule::Positive } else { PivotRule::NonZero })
    }

    /// Peels a point of the closed cone: zero pivots are allowed when the
    /// entries they would eliminate vanish too.
    pub fn peel_closed<S: DomainScalar>(&self, u: &[S]) -> Result<ConeDecomposition<S>, PeelError> {
        self.peel_impl(u, PivotRule::Closed)
    }

    fn peel_impl<S: DomainScalar>(&self, u: &[S], rule: PivotRule) -> Result<ConeDecomposition<S>, PeelError> {
        let plan = S::plan(self);
        let n = self.n_u();
        let mut cur = u.to_vec();
        let mut pivots = Vec::new();
        let mut lower = Vec::new();
        for (k, st) in plan.stages.iter().enumerate() {
            let p = cur[st.pivot].clone();
            let targets: Vec<S> = st.targets.iter().map(|&t| cur[t].clone()).collect();
            let zero_allowed = match rule {
                PivotRule::Positive => {
                    if !p.is_positive_real(PIVOT_TOL) {
                        return Err(PeelError::PivotNotPositive { k, value: p.to_string() });
                    }
                    false
                }
                PivotRule::NonZero => {
                    if p.is_negligible(PIVOT_TOL) {
                        return Err(PeelError::PivotZero { k });
                    }
                    false
                }
                PivotRule::Closed => {
                    if p.is_negligible(PIVOT_TOL) {
                        if !targets.iter().all(|t| t.is_negligible(PIVOT_TOL)) {
                            return Err(PeelError::PivotNotPositive { k, value: p.to_string() });
                        }
                        true
                    } else if !p.is_positive_real(PIVOT_TOL) {
                        return Err(PeelError::PivotNotPositive { k, value: p.to_string() });
                    } else {
                        false
                    }
                }
            };
            let coeffs: Vec<S> = if zero_allowed || st.gens.is_empty() {
                vec![S::zero(); st.gens.len()]
            } else {
                matvec(&st.solve, &targets).into_iter().map(|c| c.divide(&p)).collect()
            };
            let nmat = combine(&plan.ad_u, &st.gens, &coeffs, n);
            cur = exp_nilpotent_apply(&nmat, &-S::one(), &cur, n);
            cur[st.pivot] = cur[st.pivot].clone() - p.clone();
            let zero_scale = rule_scale(&p);
            if !cur[st.pivot].is_negligible(zero_scale) || !st.targets.iter().all(|&t| cur[t].is_negligible(zero_scale))
            {
                return Err(PeelError::Inconsistent);
            }
            cur[st.pivot] = S::zero();
            for &t in &st.targets {
                cur[t] = S::zero();
            }
            pivots.push(p);
            lower.push(coeffs);
        }
        if !cur.iter().all(|c| c.is_negligible(PIVOT_TOL)) {
            return Err(PeelError::Inconsistent);
        }
        Ok(ConeDecomposition { pivots, lower })
    }

    /// `Ad(exp N_1 ... exp N_r)(Σ p_k E_k)`.
    pub fn replay<S: DomainScalar>(&self, dec: &ConeDecomposition<S>) -> Vec<S> {
        let plan = S::plan(self);
        let n = self.n_u();
        let mut u = vec![S::zero(); n];
        for (st, p) in plan.stages.iter().zip(&dec.pivots) {
            u[st.pivot] = p.clone();
        }
        for (st, coeffs) in plan.stages.iter().zip(&dec.lower).rev() {
            let nmat = combine(&plan.ad_u, &st.gens, coeffs, n);
            u = exp_nilpotent_apply(&nmat, &S::one(), &u, n);
        }
        u
    }

    /// `Im U - Q(V, V)`, real by construction.
    pub fn cone_part<S: DomainScalar>(&self, p: &Point<S>) -> Vec<S> {
        let q = self.q_form(&p.v, &p.v);
        p.u.iter().zip(&q).map(|(u, qv)| u.im_part() - qv.clone()).collect()
    }

    pub fn contains<S: DomainScalar>(&self, p: &Point<S>) -> bool {
        self.peel(&self.cone_part(p), true).is_ok()
    }

    /// Applies a word of `B` letters; the rightmost letter acts first.
    pub fn act<S: DomainScalar>(&self, word: &BWord, p: &Point<S>) -> Result<Point<S>, SiegelError> {
        if !self.contains(p) {
            return Err(SiegelError::DomainViolation("input point".into()));
        }
        let mut cur = p.clone();
        for letter in word.0.iter().rev() {
            cur = self.act_letter(letter, &cur)?;
        }
        if !self.contains(&cur) {
            return Err(SiegelError::DomainViolation("image point".into()));
        }
        Ok(cur)
    }

    pub fn act_letter<S: DomainScalar>(&self, letter: &Letter, p: &Point<S>) -> Result<Point<S>, SiegelError> {
        let plan = S::plan(self);
        Ok(match letter {
            Letter::Translate(u0) => {
                Point { u: p.u.iter().zip(u0).map(|(a, b)| a.clone() + S::from_gauss(b)).collect(), v: p.v.clone() }
            }
            Letter::Shear(v0) => {
                let v0s: Vec<S> = v0.iter().map(S::from_gauss).collect();
                let two_i = S::from_gauss(&Gauss::new(rat(0, 1), rat(2, 1)));
                let q1 = self.q_form(&p.v, &v0s);
                let q2 = self.q_form(&v0s, &v0s);
                Point {
                    u: p.u
                        .iter()
                        .zip(q1.iter().zip(&q2))
                        .map(|(u, (a, b))| u.clone() + two_i.clone() * a.clone() + S::i() * b.clone())
                        .collect(),
                    v: p.v.iter().zip(&v0s).map(|(a, b)| a.clone() + b.clone()).collect(),
                }
            }
            Letter::Scale { k, t } => {
                let fac = |w: &Rat| scale_by::<S>(*t, w).ok_or(SiegelError::NotExact);
                let mut u = Vec::with_capacity(p.u.len());
                for (x, w) in p.u.iter().zip(&self.u_weight[*k]) {
                    u.push(x.clone() * fac(w)?);
                }
                let mut v = Vec::with_capacity(p.v.len());
                for (x, w) in p.v.iter().zip(&self.v_weight[*k]) {
                    v.push(x.clone() * fac(w)?);
                }
                Point { u, v }
            }
            Letter::Lower { gen, s } => {
                let s = S::from_gauss(s);
                let (n, m) = (self.n_u(), self.n_v());
                Point {
                    u: exp_nilpotent_apply(&plan.ad_u[*gen], &s, &p.u, n),
                    v: exp_nilpotent_apply(&plan.ad_v[*gen], &s, &p.v, m.max(1)),
                }
            }
        })
    }

    /// The word as one complex affine map of `C^{n+m}`.
    pub fn affine_map(&self, word: &BWord) -> AffineMap {
        let dim = self.n_u() + self.n_v();
        let mut acc = AffineMap::identity(dim);
        for letter in &word.0 {
            acc = acc.compose(&self.letter_map(letter));
        }
        acc
    }

    fn letter_map(&self, letter: &Letter) -> AffineMap {
        let (n, m) = (self.n_u(), self.n_v());
        let dim = n + m;
        let mut map = AffineMap::identity(dim);
        match letter {
            Letter::Translate(u0) => {
                for (i, x) in u0.iter().enumerate() {
                    map.shift[i] = x.to_c64();
                }
            }
            Letter::Shear(v0) => {
                let v0c: Vec<Complex64> = v0.iter().map(Gauss::to_c64).collect();
                for a in 0..m {
                    let mut e = vec![Complex64::new(0.0, 0.0); m];
                    e[a] = Complex64::new(1.0, 0.0);
                    let col = self.q_form(&e, &v0c);
                    for i in 0..n {
                        map.lin[i][n + a] = Complex64::new(0.0, 2.0) * col[i];
                    }
                }
                let q2 = self.q_form(&v0c, &v0c);
                for i in 0..n {
                    map.shift[i] = Complex64::new(0.0, 1.0) * q2[i];
                }
                map.shift[n..n + m].copy_from_slice(&v0c[..m]);
            }
            Letter::Scale { k, t } => {
                for i in 0..n {
                    map.lin[i][i] = scale_by::<Complex64>(*t, &self.u_weight[*k][i]).expect("float");
                }
                for a in 0..m {
                    map.lin[n + a][n + a] = scale_by::<Complex64>(*t, &self.v_weight[*k][a]).expect("float");
                }
            }
            Letter::Lower { gen, s } => {
                let g = &self.lower_gens[*gen];
                let eu = g.ad_u.scale(s).exp_nilpotent().expect("nilpotent");
                let ev = g.ad_v.scale(s).exp_nilpotent().expect("nilpotent");
                for i in 0..n {
                    for j in 0..n {
                        map.lin[i][j] = eu[(i, j)].to_c64();
                    }
                }
                for a in 0..m {
                    for b in 0..m {
                        map.lin[n + a][n + b] = ev[(a, b)].to_c64();
                    }
                }
            }
        }
        map
    }

    /// The real `b` element whose exponential a letter denotes, scaled by its parameter.
    pub fn letter_generator(&self, letter: &Letter) -> (Vec<Gauss>, f64) {
        match letter {
            Letter::Translate(u0) => (self.u_to_b(u0), 1.0),
            Letter::Shear(v0) => (self.v_to_b(v0), 1.0),
            Letter::Scale { k, t } => (self.nj.a_basis[*k].clone(), *t),
            Letter::Lower { gen, s } => (vector::scale(s, &self.lower_gens[*gen].x), 1.0),
        }
    }
}

#[derive(Clone, Copy)]
enum PivotRule {
    Positive,
    NonZero,
    Closed,
}

fn rule_scale<S: Scalar>(p: &S) -> f64 {
    PIVOT_TOL.max(1e-9 * p.to_c64().norm())
}

fn combine<S: Scalar>(mats: &[Mat<S>], gens: &[usize], coeffs: &[S], n: usize) -> Mat<S> {
    let mut out = vec![vec![S::zero(); n]; n];
    for (&g, c) in gens.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let x = &mats[g][i][j];
                if !x.is_zero() {
                    out[i][j] = out[i][j].clone() + c.clone() * x.clone();
                }
            }
        }
    }
    out
}

/// `e^{t w}`; `None` for exact scalars unless the factor is 1.
fn scale_by<S: Scalar>(t: f64, w: &Rat) -> Option<S> {
    if t == 0.0 || *w == rat(0, 1) {
        return Some(S::one());
    }
    S::from_c64(Complex64::new((t * crate::exact::rat_to_f64(w)).exp(), 0.0))
}

/// Element of `B` as a product of letters; the rightmost letter acts first.
#[derive(Clone, Debug, PartialEq)]
pub struct BWord(pub Vec<Letter>);

#[derive(Clone, Debug, PartialEq)]
pub enum Letter {
    /// `exp(U_0)` with `U_0` real, in `u` coordinates.
    Translate(Vec<Gauss>),
    /// `exp(V_0)` with `V_0` in complex `v` coordinates.
    Shear(Vec<Gauss>),
    /// `exp(t A_k)`.
    Scale { k: usize, t: f64 },
    /// `exp(s X)` for the `gen`-th lower generator.
    Lower { gen: usize, s: Gauss },
}

impl BWord {
    pub fn identity() -> Self {
        BWord(Vec::new())
    }

    pub fn then(&self, other: &BWord) -> BWord {
        BWord(self.0.iter().chain(&other.0).cloned().collect())
    }
}

#[derive(Clone, Debug)]
pub struct AffineMap {
    pub lin: Vec<Vec<Complex64>>,
    pub shift: Vec<Complex64>,
}

impl AffineMap {
    pub fn identity(dim: usize) -> Self {
        let mut lin = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for (i, row) in lin.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        AffineMap { lin, shift: vec![Complex64::new(0.0, 0.0); dim] }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let dim = self.shift.len();
        let mut lin = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                lin[i][j] = (0..dim).map(|k| self.lin[i][k] * other.lin[k][j]).sum();
            }
        }
        let shift = self.apply(&other.shift);
        AffineMap { lin, shift }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.lin
            .iter()
            .zip(&self.shift)
            .map(|(row, s)| row.iter().zip(x).map(|(a, b)| a * b).sum::<Complex64>() + s)
            .collect()
    }
}
