//! Normal j-algebras `(b, j, ω)`: axiom checks, the Koszul form, the root
//! decomposition with respect to `a = [b, b]^⊥`, and the grading
//! `b = b(0) ⊕ b(1/2) ⊕ b(1)` by eigenvalues of `ad(jE)`.

use std::fmt;

use thiserror::Error;

use crate::exact::{rat, vector, Gauss, Matrix, Rat, Subspace};
use crate::lie::{LieAlgebra, LieError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormalJError {
    #[error("axioms fail: {0}")]
    Validation(ValidationReport),
    #[error("root decomposition has the wrong shape: {0}")]
    GradingShape(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{}: {}", c.name, if c.passed { "pass" } else { "FAIL" })?;
            if let Some(w) = &c.witness {
                write!(f, " ({w})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `ω'(X) = tr(ad(jX) - j ad(X))` on each basis vector.
pub fn koszul_form(b: &LieAlgebra, j: &Matrix) -> Vec<Gauss> {
    let n = b.dim();
    (0..n)
        .map(|i| {
            let x = vector::unit(n, i);
            let jx = j.mul_vec(&x);
            b.ad(&jx).sub(&j.mul(&b.ad(&x))).trace()
        })
        .collect()
}

/// Gram matrix of `<X, Y> = ω([jX, Y])`.
pub fn gram_matrix(b: &LieAlgebra, j: &Matrix, omega: &[Gauss]) -> Matrix {
    let n = b.dim();
    let mut g = Matrix::zeros(n, n);
    for a in 0..n {
        let ja = j.col(a);
        for c in 0..n {
            g[(a, c)] = vector::dot(omega, &b.bracket(&ja, &vector::unit(n, c)));
        }
    }
    g
}

fn label_pair(b: &LieAlgebra, i: usize, k: usize) -> String {
    format!("X={}, Y={}", b.labels()[i], b.labels()[k])
}

/// Checks the axioms one by one and records a witness for each failure.
pub fn validate_normal_j(b: &LieAlgebra, j: &Matrix, omega: &[Gauss]) -> ValidationReport {
    let n = b.dim();
    let mut checks = Vec::new();
    if j.rows() != n || j.cols() != n || omega.len() != n {
        checks.push(AxiomCheck {
            name: "dimensions",
            passed: false,
            witness: Some(format!("dim b = {n}, j is {}x{}, ω has {} entries", j.rows(), j.cols(), omega.len())),
        });
        return ValidationReport { checks };
    }
    let real = j.is_real() && vector::is_real(omega) && b.is_real();
    checks.push(AxiomCheck {
        name: "real data",
        passed: real,
        witness: (!real).then(|| "structure constants, j and ω must be real".to_string()),
    });

    let j2 = j.mul(j);
    let bad = (0..n).find(|&i| j2.col(i) != vector::neg(&vector::unit(n, i)));
    checks.push(AxiomCheck {
        name: "j^2 = -1",
        passed: bad.is_none(),
        witness: bad.map(|i| format!("j^2 {} = {}", b.labels()[i], b.format(&j2.col(i)))),
    });

    let mut witness = None;
    'outer: for x in 0..n {
        for y in x + 1..n {
            let (ex, ey) = (vector::unit(n, x), vector::unit(n, y));
            let (jx, jy) = (j.col(x), j.col(y));
            let lhs = vector::add(
                &vector::add(&b.bracket(&ex, &ey), &j.mul_vec(&b.bracket(&jx, &ey))),
                &j.mul_vec(&b.bracket(&ex, &jy)),
            );
            if lhs != b.bracket(&jx, &jy) {
                witness = Some(label_pair(b, x, y));
                break 'outer;
            }
        }
    }
    checks.push(AxiomCheck { name: "integrability", passed: witness.is_none(), witness });

    let g = gram_matrix(b, j, omega);
    let asym = (0..n).flat_map(|a| (a + 1..n).map(move |c| (a, c))).find(|&(a, c)| g[(a, c)] != g[(c, a)]);
    checks.push(AxiomCheck {
        name: "<,> symmetric",
        passed: asym.is_none(),
        witness: asym.map(|(a, c)| label_pair(b, a, c)),
    });

    let jgj = j.transpose().mul(&g).mul(j);
    let noninv = (0..n).flat_map(|a| (0..n).map(move |c| (a, c))).find(|&(a, c)| jgj[(a, c)] != g[(a, c)]);
    checks.push(AxiomCheck {
        name: "<,> j-invariant",
        passed: noninv.is_none(),
        witness: noninv.map(|(a, c)| label_pair(b, a, c)),
    });

    let minors = g.leading_minors();
    let bad_minor = minors.iter().position(|d| !(d.is_real() && d.re > Rat::from_integer(0.into())));
    checks.push(AxiomCheck {
        name: "<,> positive definite",
        passed: bad_minor.is_none(),
        witness: bad_minor.map(|k| format!("leading minor {} = {}", k + 1, minors[k])),
    });

    let split = b.is_split_solvable();
    checks.push(AxiomCheck {
        name: "split solvable",
        passed: split,
        witness: (!split).then(|| "b is not solvable or some ad has non-rational spectrum".to_string()),
    });
    ValidationReport { checks }
}

/// Position of a root space in the decomposition; indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RootKind {
    /// The abelian part `a` (weight zero).
    Cartan,
    /// `(α_l - α_k)/2` with `k < l`.
    Diff { l: usize, k: usize },
    /// `α_k / 2`.
    Half(usize),
    /// `α_k`.
    Alpha(usize),
    /// `(α_l + α_k)/2` with `k < l`.
    Sum { l: usize, k: usize },
}

impl RootKind {
    /// Eigenvalue of `ad(jE)` on the root space.
    pub fn grade(&self) -> Rat {
        match self {
            RootKind::Cartan | RootKind::Diff { .. } => rat(0, 1),
            RootKind::Half(_) => rat(1, 2),
            RootKind::Alpha(_) | RootKind::Sum { .. } => rat(1, 1),
        }
    }

    /// Coefficients in the basis `α_1, ..., α_r`.
    pub fn coefficients(&self, r: usize) -> Vec<Rat> {
        let mut c = vec![rat(0, 1); r];
        match *self {
            RootKind::Cartan => {}
            RootKind::Diff { l, k } => {
                c[l] = rat(1, 2);
                c[k] = rat(-1, 2);
            }
            RootKind::Half(k) => c[k] = rat(1, 2),
            RootKind::Alpha(k) => c[k] = rat(1, 1),
            RootKind::Sum { l, k } => {
                c[l] = rat(1, 2);
                c[k] = rat(1, 2);
            }
        }
        c
    }
}

impl fmt::Display for RootKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RootKind::Cartan => write!(f, "0"),
            RootKind::Diff { l, k } => write!(f, "(alpha{}-alpha{})/2", l + 1, k + 1),
            RootKind::Half(k) => write!(f, "alpha{}/2", k + 1),
            RootKind::Alpha(k) => write!(f, "alpha{}", k + 1),
            RootKind::Sum { l, k } => write!(f, "(alpha{}+alpha{})/2", l + 1, k + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootSpace {
    pub kind: RootKind,
    pub space: Subspace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grading {
    pub zero: Subspace,
    pub half: Subspace,
    pub one: Subspace,
}

/// A validated normal j-algebra together with its root data.
#[derive(Clone, Debug)]
pub struct NormalJAlgebra {
    pub b: LieAlgebra,
    pub j: Matrix,
    pub omega: Vec<Gauss>,
    pub gram: Matrix,
    pub rank: usize,
    /// `A_1, ..., A_r` with `[A_k, E_l] = δ_kl E_l`.
    pub a_basis: Vec<Vec<Gauss>>,
    /// `E_k = -j A_k`.
    pub e_basis: Vec<Vec<Gauss>>,
    /// Nonzero root spaces plus the Cartan part, sorted by kind.
    pub roots: Vec<RootSpace>,
    pub grading: Grading,
}

impl NormalJAlgebra {
    /// Validates the axioms and computes the root decomposition.
    pub fn new(b: LieAlgebra, j: Matrix, omega: Vec<Gauss>) -> Result<Self, NormalJError> {
        let report = validate_normal_j(&b, &j, &omega);
        if !report.all_passed() {
            return Err(NormalJError::Validation(report));
        }
        compute_grading(b, j, omega)
    }

    /// Uses the Koszul form as `ω`.
    pub fn with_koszul(b: LieAlgebra, j: Matrix) -> Result<Self, NormalJError> {
        let omega = koszul_form(&b, &j);
        NormalJAlgebra::new(b, j, omega)
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn inner(&self, x: &[Gauss], y: &[Gauss]) -> Gauss {
        vector::dot(x, &self.gram.mul_vec(y))
    }

    pub fn apply_j(&self, x: &[Gauss]) -> Vec<Gauss> {
        self.j.mul_vec(x)
    }

    /// `E = E_1 + ... + E_r`.
    pub fn e_total(&self) -> Vec<Gauss> {
        self.e_basis.iter().fold(vector::zeros(self.dim()), |acc, e| vector::add(&acc, e))
    }

    /// `jE = A_1 + ... + A_r`.
    pub fn j_e(&self) -> Vec<Gauss> {
        self.apply_j(&self.e_total())
    }

    pub fn root_space(&self, kind: RootKind) -> Option<&Subspace> {
        self.roots.iter().find(|r| r.kind == kind).map(|r| &r.space)
    }

    /// `ad(jE)`-eigenvalue of a homogeneous element, if it is homogeneous.
    pub fn grade_of(&self, x: &[Gauss]) -> Option<Rat> {
        if vector::is_zero(x) {
            return None;
        }
        let adx = self.b.bracket(&self.j_e(), x);
        for (g, s) in [(rat(0, 1), &self.grading.zero), (rat(1, 2), &self.grading.half), (rat(1, 1), &self.grading.one)]
        {
            if s.contains(x) {
                debug_assert_eq!(adx, vector::scale_rat(&g, x));
                return Some(g);
            }
        }
        None
    }

    /// Levi-Civita type connection `∇̃_X Y` defined through
    /// `-2<∇̃_X Y, Z> = <[X,Y],Z> - <[Z,X],Y> - <X,[Z,Y]>`.
    pub fn nabla(&self, x: &[Gauss], y: &[Gauss]) -> Vec<Gauss> {
        let n = self.dim();
        let xy = self.b.bracket(x, y);
        let rhs: Vec<Gauss> = (0..n)
            .map(|m| {
                let z = vector::unit(n, m);
                let v = &(&self.inner(&xy, &z) - &self.inner(&self.b.bracket(&z, x), y))
                    - &self.inner(x, &self.b.bracket(&z, y));
                &v * &Gauss::from_ratio(-1, 2)
            })
            .collect();
        self.gram.transpose().solve_unique(&rhs).expect("Gram matrix is nondegenerate")
    }

    /// Rows `(kind, dim)` of the root table, including the empty `(α_l ± α_k)/2`.
    pub fn root_table(&self) -> Vec<(RootKind, usize)> {
        let r = self.rank;
        let dim = |k: RootKind| self.root_space(k).map_or(0, Subspace::dim);
        let mut rows = vec![(RootKind::Cartan, dim(RootKind::Cartan))];
        for k in 0..r {
            rows.push((RootKind::Alpha(k), dim(RootKind::Alpha(k))));
            rows.push((RootKind::Half(k), dim(RootKind::Half(k))));
        }
        for l in 0..r {
            for k in 0..l {
                rows.push((RootKind::Diff { l, k }, dim(RootKind::Diff { l, k })));
                rows.push((RootKind::Sum { l, k }, dim(RootKind::Sum { l, k })));
            }
        }
        rows
    }
}

fn shape(msg: impl Into<String>) -> NormalJError {
    NormalJError::GradingShape(msg.into())
}

fn first_pivot(s: &Subspace) -> usize {
    s.basis()[0].iter().position(|c| !c.is_zero()).unwrap_or(usize::MAX)
}

fn classify_weight(c: &[Rat]) -> Option<RootKind> {
    let half = rat(1, 2);
    let nz: Vec<usize> = (0..c.len()).filter(|&i| c[i] != rat(0, 1)).collect();
    match nz.as_slice() {
        [] => Some(RootKind::Cartan),
        [k] if c[*k] == rat(1, 1) => Some(RootKind::Alpha(*k)),
        [k] if c[*k] == half => Some(RootKind::Half(*k)),
        [a, b] if c[*a] == half && c[*b] == half => Some(RootKind::Sum { l: *b, k: *a }),
        [a, b] if c[*a] == half && c[*b] == -&half => Some(RootKind::Diff { l: *a, k: *b }),
        [a, b] if c[*a] == -&half && c[*b] == half => Some(RootKind::Diff { l: *b, k: *a }),
        _ => None,
    }
}

/// Root decomposition with respect to `a = [b, b]^⊥`, ordered so that every
/// `(α_l - α_k)/2` root has `k < l`. Ties are broken by the position of the
/// first nonzero coordinate of `E_k`.
pub fn compute_grading(b: LieAlgebra, j: Matrix, omega: Vec<Gauss>) -> Result<NormalJAlgebra, NormalJError> {
    let n = b.dim();
    let gram = gram_matrix(&b, &j, &omega);
    let derived = b.derived_algebra();
    let a = if derived.dim() == 0 {
        Subspace::full(n)
    } else {
        let rows: Vec<Vec<Gauss>> = derived.basis().iter().map(|d| gram.mul_vec(d)).collect();
        Subspace::span(n, Matrix::from_rows(rows).kernel())
    };
    let r = a.dim();
    let weights = b.simultaneous_eigenspaces(a.basis())?;
    let zero_w = vec![rat(0, 1); r];
    let cartan = weights.iter().find(|w| w.weight == zero_w).ok_or_else(|| shape("no zero weight space"))?;
    if cartan.space != a {
        return Err(shape(format!("zero weight space has dimension {}, expected {r}", cartan.space.dim())));
    }
    let eval_weight = |w: &[Rat], h: &[Gauss]| -> Result<Rat, NormalJError> {
        let c = a.coordinates(h).ok_or_else(|| shape("element is not in a"))?;
        let mut s = rat(0, 1);
        for (ci, wi) in c.iter().zip(w) {
            if !ci.is_real() {
                return Err(shape("complex coordinate in a"));
            }
            s += &ci.re * wi;
        }
        Ok(s)
    };

    // Root spaces b_{α_k}: one-dimensional with j-image inside a.
    let mut alphas: Vec<(usize, Vec<Rat>, Vec<Gauss>, Vec<Gauss>)> = Vec::new();
    for w in &weights {
        if w.weight == zero_w || w.space.dim() != 1 {
            continue;
        }
        let e = w.space.basis()[0].clone();
        let je = j.mul_vec(&e);
        if !a.contains(&je) {
            continue;
        }
        let lam = eval_weight(&w.weight, &je)?;
        if lam == rat(0, 1) {
            return Err(shape("α(jE) vanishes"));
        }
        let s = Gauss::real(rat(1, 1) / lam);
        let e_k = vector::scale(&s, &e);
        let a_k = j.mul_vec(&e_k);
        alphas.push((first_pivot(&w.space), w.weight.clone(), e_k, a_k));
    }
    if alphas.len() != r {
        return Err(shape(format!("found {} roots of type α_k, rank is {r}", alphas.len())));
    }
    alphas.sort_by_key(|t| t.0);

    // Weight of each space in α-coordinates, via evaluation on the A_k.
    let mut kinds: Vec<(RootKind, Subspace)> = Vec::new();
    for w in &weights {
        let coeffs = alphas.iter().map(|(_, _, _, a_k)| eval_weight(&w.weight, a_k)).collect::<Result<Vec<_>, _>>()?;
        let kind = classify_weight(&coeffs).ok_or_else(|| {
            shape(format!(
                "weight with α-coordinates ({}) is not of the form α_k, α_k/2, (α_l±α_k)/2",
                coeffs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
            ))
        })?;
        kinds.push((kind, w.space.clone()));
    }
    for (k, (_, _, e_k, _)) in alphas.iter().enumerate() {
        let found = kinds.iter().find(|(_, s)| s.contains(e_k)).map(|(kind, _)| *kind);
        if found != Some(RootKind::Alpha(k)) {
            return Err(shape(format!("A_{} is not dual to α_{}", k + 1, k + 1)));
        }
    }

    // Order so that (α_l - α_k)/2 has k < l.
    let mut preds = vec![Vec::new(); r];
    for (kind, _) in &kinds {
        if let RootKind::Diff { l, k } = kind {
            preds[*l].push(*k);
        }
    }
    let mut order: Vec<usize> = Vec::new();
    let mut placed = vec![false; r];
    while order.len() < r {
        let next = (0..r)
            .find(|&i| !placed[i] && preds[i].iter().all(|&p| placed[p]))
            .ok_or_else(|| shape("root order has a cycle"))?;
        placed[next] = true;
        order.push(next);
    }
    let mut pos = vec![0; r];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let relabel = |k: RootKind| match k {
        RootKind::Cartan => RootKind::Cartan,
        RootKind::Alpha(i) => RootKind::Alpha(pos[i]),
        RootKind::Half(i) => RootKind::Half(pos[i]),
        RootKind::Diff { l, k } => RootKind::Diff { l: pos[l], k: pos[k] },
        RootKind::Sum { l, k } => {
            let (x, y) = (pos[l], pos[k]);
            RootKind::Sum { l: x.max(y), k: x.min(y) }
        }
    };
    let mut roots: Vec<RootSpace> = kinds.into_iter().map(|(k, s)| RootSpace { kind: relabel(k), space: s }).collect();
    roots.sort_by_key(|rs| rs.kind);
    let e_basis: Vec<Vec<Gauss>> = order.iter().map(|&i| alphas[i].2.clone()).collect();
    let a_basis: Vec<Vec<Gauss>> = order.iter().map(|&i| alphas[i].3.clone()).collect();

    let mut zero = Subspace::zero(n);
    let mut half = Subspace::zero(n);
    let mut one = Subspace::zero(n);
    for rs in &roots {
        match rs.kind {
            RootKind::Cartan | RootKind::Diff { .. } => zero = zero.sum(&rs.space),
            RootKind::Half(_) => half = half.sum(&rs.space),
            RootKind::Alpha(_) | RootKind::Sum { .. } => one = one.sum(&rs.space),
        }
    }
    if zero.dim() + half.dim() + one.dim() != n {
        return Err(shape("root spaces do not span b"));
    }

    let nj =
        NormalJAlgebra { b, j, omega, gram, rank: r, a_basis, e_basis, roots, grading: Grading { zero, half, one } };
    check_j_on_roots(&nj)?;
    Ok(nj)
}

/// `j b_{(α_l-α_k)/2} = b_{(α_l+α_k)/2}` and `j b_{α_k/2} = b_{α_k/2}`.
fn check_j_on_roots(nj: &NormalJAlgebra) -> Result<(), NormalJError> {
    let n = nj.dim();
    let image = |s: &Subspace| Subspace::span(n, s.basis().iter().map(|v| nj.apply_j(v)));
    for rs in &nj.roots {
        match rs.kind {
            RootKind::Diff { l, k } => {
                let target = nj.root_space(RootKind::Sum { l, k }).cloned().unwrap_or(Subspace::zero(n));
                if image(&rs.space) != target {
                    return Err(shape(format!("j does not map {} onto {}", rs.kind, RootKind::Sum { l, k })));
                }
            }
            RootKind::Sum { l, k } if nj.root_space(RootKind::Diff { l, k }).is_none() => {
                return Err(shape(format!("{} has no partner {}", rs.kind, RootKind::Diff { l, k })));
            }
            RootKind::Half(_) if image(&rs.space) != rs.space => {
                return Err(shape(format!("{} is not j-invariant", rs.kind)));
            }
            _ => {}
        }
    }
    Ok(())
}
