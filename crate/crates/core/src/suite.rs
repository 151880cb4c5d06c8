//! One report covering every generic check on a built-in example, plus the
//! golden facts recorded for `vinberg5`.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builtins::{element, BuiltinExample};
use crate::classify::{is_unitarizable, partition_label, Level, XiParam};
use crate::exact::{rat, vector, Gauss, Matrix, Rat, Subspace};
use crate::normal_j::{validate_normal_j, RootKind};
use crate::reps::{
    b_minus, characters_space, check_zero_extension, chi, delta_eval, delta_exponents, kernel_eval, theta_tau, Tau,
    ThetaChar, ZeroExtension,
};
use crate::sampling::{self, WordKind};
use crate::siegel::{BWord, Point, SiegelDomainSpec};
use crate::vfields::{
    a_map, b_map, check_isotropy_structure, check_y_conditions, check_z_conditions, d_u, dtilde_v, euler,
    generated_subalgebra, grade_classify, in_real_span, linear_field, psi_e, solve_c_for_phi, y_data_of, y_field,
    z_data_of, ConeAlgebra, GradeClass, PolyVectorField,
};

/// Relative tolerance for `χ` multiplicativity.
pub const CHI_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    /// Relative tolerance for the `Δ` and kernel identities.
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { tolerance: 1e-9, samples: 200, seed: 0x5eed }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteReport {
    pub example: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}", self.example)?;
        for c in &self.checks {
            writeln!(f, "  {:<22} {}  {}", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail)?;
        }
        write!(f, "{}", if self.all_passed() { "all checks passed" } else { "some checks failed" })
    }
}

type Outcome = Result<String, String>;
type Check = fn(&BuiltinExample, &SuiteOptions) -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn run_suite(ex: &BuiltinExample, opts: &SuiteOptions) -> SuiteReport {
    let mut checks: Vec<(&str, Check)> = vec![
        ("jacobi", check_jacobi),
        ("normal_j", check_normal_j),
        ("grading", check_grading),
        ("field_grades", check_field_grades),
        ("isotropy", check_isotropy),
        ("b_minus", check_b_minus),
        ("characters", check_characters),
        ("tableaux", check_tableaux),
        ("half_from_one", check_one_kills_half),
        ("rotated_y", check_rotated_y),
        ("peel_replay", check_peel_replay),
        ("chi", check_chi),
        ("delta_law", check_delta_law),
        ("kernel_invariance", check_kernel_invariance),
    ];
    if ex.name == "vinberg5" {
        checks.extend([
            ("quoted_brackets", check_quoted_brackets as Check),
            ("b_minus_basis", check_b_minus_basis),
            ("root_signature", check_root_signature),
            ("xi_family", check_xi_family),
            ("classification", check_classification),
        ]);
    }
    let results = checks
        .par_iter()
        .map(|(name, check)| {
            let outcome = catch_unwind(AssertUnwindSafe(|| check(ex, opts)))
                .unwrap_or_else(|e| Err(format!("panicked: {}", panic_message(&e))));
            let (passed, detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult { name: name.to_string(), passed, detail }
        })
        .collect();
    SuiteReport { example: ex.name.clone(), checks: results }
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown".into())
}

fn check_jacobi(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let alg = &ex.g.algebra;
    match alg.check_jacobi() {
        Ok(n) => Ok(format!("{n} triples")),
        Err(w) => {
            let (i, j, k) = w.triple;
            let l = alg.labels();
            Err(format!("Jacobi fails on ({}, {}, {}): residual {}", l[i], l[j], l[k], alg.format(&w.residual)))
        }
    }
}

fn check_normal_j(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let nj = &ex.spec.nj;
    let report = validate_normal_j(&nj.b, &nj.j, &nj.omega);
    let failure = report.failures().next().map(|c| format!("{}: {}", c.name, c.witness.clone().unwrap_or_default()));
    match failure {
        None => Ok(format!("{} axioms, rank {}", report.checks.len(), nj.rank)),
        Some(f) => Err(f),
    }
}

fn graded_parts(ex: &BuiltinExample) -> [(Rat, &Subspace); 3] {
    let g = &ex.spec.nj.grading;
    [(rat(0, 1), &g.zero), (rat(1, 2), &g.half), (rat(1, 1), &g.one)]
}

fn check_grading(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let nj = &ex.spec.nj;
    let parts = graded_parts(ex);
    let je = nj.j_e();
    for (g1, s1) in &parts {
        for x in s1.basis() {
            ensure(nj.b.bracket(&je, x) == vector::scale_rat(g1, x), || {
                format!("ad(jE) is not {g1} on {}", nj.b.format(x))
            })?;
            for (g2, s2) in &parts {
                let sum = g1 + g2;
                let target = parts.iter().find(|(g, _)| *g == sum);
                for y in s2.basis() {
                    let z = nj.b.bracket(x, y);
                    let ok = match target {
                        Some((_, t)) => t.contains(&z),
                        None => vector::is_zero(&z),
                    };
                    ensure(ok, || format!("[b({g1}), b({g2})] leaves b({sum})"))?;
                }
            }
        }
    }
    Ok(format!("dims ({}, {}, {})", parts[0].1.dim(), parts[1].1.dim(), parts[2].1.dim()))
}

fn check_field_grades(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let n_u = ex.spec.n_u();
    for (g, s) in graded_parts(ex) {
        for x in s.basis() {
            let c = grade_classify(&ex.g.field_of(&ex.b_to_g(x)), n_u);
            ensure(c == GradeClass::Homogeneous(-g.clone()), || format!("element of b({g}) has field grade {c}"))?;
        }
    }
    let homogeneous: Vec<(usize, Rat)> =
        ex.g.fields
            .iter()
            .enumerate()
            .filter_map(|(i, f)| match grade_classify(f, n_u) {
                GradeClass::Homogeneous(g) => Some((i, g)),
                _ => None,
            })
            .collect();
    for (i, gi) in &homogeneous {
        for (j, gj) in &homogeneous {
            let br = ex.g.fields[*i].bracket(&ex.g.fields[*j]);
            let sum = gi + gj;
            let c = grade_classify(&br, n_u);
            let ok = c == GradeClass::Zero
                || (sum <= rat(1, 1) && sum >= rat(-1, 1) && c == GradeClass::Homogeneous(sum.clone()));
            ensure(ok, || format!("[{}, {}] has grade {c}", ex.g.labels[*i], ex.g.labels[*j]))?;
        }
    }
    Ok(format!("{} of {} fields homogeneous", homogeneous.len(), ex.g.dim()))
}

fn check_isotropy(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let iso = ex.g.isotropy(ex.reference());
    ensure(iso == ex.k, || "isotropy differs from k".into())?;
    ensure(iso.intersect(&ex.b_span()).dim() == 0, || "b meets the isotropy".into())?;
    ensure(iso.dim() + ex.b_dim() == ex.g.dim(), || "g != b + k".into())?;
    check_isotropy_structure(&ex.spec, &ex.g, &iso)?;
    let names: Vec<String> = iso.basis().iter().map(|x| ex.g.algebra.format(x)).collect();
    Ok(format!("k = span{{{}}}", names.join("; ")))
}

fn check_b_minus(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let gm = ex.g.g_minus(ex.reference());
    ensure(gm.contains_space(&ex.k), || "k is not in g_-".into())?;
    let bm = b_minus(ex, &gm);
    let tau = Tau::new(&ex.spec.nj);
    let bd = ex.b_dim();
    for i in 0..bd {
        let x = vector::unit(bd, i);
        ensure(bm.contains(&ex.b_to_g(&tau.apply(&x))), || format!("tau({}) is not in b_-", ex.b.labels()[i]))?;
        for j in i + 1..bd {
            let y = vector::unit(bd, j);
            let ok = tau.apply(&ex.b.bracket(&x, &y)) == ex.b.bracket(&tau.apply(&x), &tau.apply(&y));
            ensure(ok, || format!("tau is not a homomorphism on ({}, {})", ex.b.labels()[i], ex.b.labels()[j]))?;
        }
    }
    for x in bm.basis() {
        ensure(tau.apply(&x[..bd]) == x[..bd], || "tau is not the identity on b_-".into())?;
    }
    Ok(format!("dim g_- = {}, dim b_- = {}", gm.dim(), bm.dim()))
}

/// Real characters of `g_-`, as covectors on `g`.
pub fn character_basis(ex: &BuiltinExample) -> Vec<Vec<Gauss>> {
    characters_space(&ex.g.algebra, &ex.g.g_minus(ex.reference()))
}

fn check_characters(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let gm = ex.g.g_minus(ex.reference());
    let basis = character_basis(ex);
    for xi in &basis {
        ThetaChar::from_xi(xi)
            .check_character(&ex.g.algebra, &gm)
            .map_err(|(i, j)| format!("not a character on pair ({i}, {j})"))?;
    }
    // Characters killing k.
    let rows: Vec<Vec<Gauss>> =
        basis.iter().map(|xi| ex.k.basis().iter().map(|w| vector::dot(xi, w)).collect()).collect();
    let flat = if ex.k.dim() == 0 {
        (0..basis.len()).map(|i| vector::unit(basis.len(), i)).collect()
    } else if basis.is_empty() {
        Vec::new()
    } else {
        Matrix::from_rows(rows).transpose().kernel()
    };
    for c in &flat {
        let mut xi = vector::zeros(ex.g.dim());
        for (ci, b) in c.iter().zip(&basis) {
            vector::axpy(&mut xi, ci, b);
        }
        match check_zero_extension(ex, &ThetaChar::from_xi(&xi)) {
            ZeroExtension::Passes => {}
            other => return Err(format!("zero extension fails: {other:?}")),
        }
    }
    if flat.len() < basis.len() {
        let bad = basis.iter().find(|xi| ex.k.basis().iter().any(|w| !vector::dot(xi, w).is_zero())).expect("exists");
        let r = check_zero_extension(ex, &ThetaChar::from_xi(bad));
        ensure(matches!(r, ZeroExtension::NonzeroOnK(_)), || "θ(k) ≠ 0 not reported".into())?;
    }
    Ok(format!("dim {}, {} vanish on k", basis.len(), flat.len()))
}

fn fields_of_grade(ex: &BuiltinExample, g: Rat) -> Vec<PolyVectorField> {
    let n_u = ex.spec.n_u();
    let parts = ex.g.fields.iter().map(|f| crate::vfields::decompose_by_grade(f, n_u));
    let mut out: Vec<PolyVectorField> = Vec::new();
    for p in parts {
        if let Some(f) = p.get(&g) {
            if !in_real_span(&out, f) {
                out.push(f.clone());
            }
        }
    }
    out
}

/// Bracket formulas, tableau conditions and `ψ_e` on the example's own
/// grade 1/2 and grade 1 fields.
fn check_tableaux(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let spec = &ex.spec;
    let (n, m) = (spec.n_u(), spec.n_v());
    let cone = ConeAlgebra::new(spec).map_err(|e| e.to_string())?;
    let ys = fields_of_grade(ex, rat(1, 2));
    let zs = fields_of_grade(ex, rat(1, 1));
    let units_u: Vec<Vec<Gauss>> = (0..n).map(|i| vector::unit(n, i)).collect();
    for y in &ys {
        let yd = y_data_of(spec, y).map_err(|e| e.to_string())?;
        let report = check_y_conditions(spec, &cone, &yd);
        ensure(report.all_passed(), || format!("{y}: {:?}", report.failures().next()))?;
        ensure(solve_c_for_phi(spec, &yd.phi).map_err(|e| e.to_string())? == yd, || "c is not determined by Φ".into())?;
        for u in &units_u {
            ensure(d_u(spec, u).bracket(y) == dtilde_v(spec, &yd.phi.mul_vec(u)), || format!("[∂_u, {y}]"))?;
        }
        for a in 0..m {
            for v in [vector::unit(m, a), vector::mul_i(&vector::unit(m, a))] {
                let cols: Vec<Vec<Gauss>> = (0..n).map(|j| vector::im(&spec.q_form(&yd.phi.col(j), &v))).collect();
                let big_a = Matrix::from_cols(n, &cols).scale(&Gauss::from_int(4));
                let bcols: Vec<Vec<Gauss>> = (0..m)
                    .map(|b| {
                        let e = vector::unit(m, b);
                        let q = spec.q_form(&e, &v);
                        let mut col = vector::scale(&Gauss::new(rat(0, 1), rat(2, 1)), &yd.phi.mul_vec(&q));
                        for (x, vx) in v.iter().enumerate() {
                            vector::axpy(&mut col, &(&Gauss::from_int(2) * vx), &yd.c[x][b]);
                        }
                        col
                    })
                    .collect();
                let expected = linear_field(spec, &big_a, &Matrix::from_cols(m, &bcols));
                ensure(dtilde_v(spec, &v).bracket(y) == expected, || format!("[∂̃_v, {y}]"))?;
            }
        }
        let target = vector::scale(&-Gauss::i(), &yd.phi.mul_vec(&spec.e_coords));
        ensure(psi_e(spec, y).map_err(|e| e.to_string())? == dtilde_v(spec, &target), || format!("ψ_e({y})"))?;
    }
    for z in &zs {
        let zd = z_data_of(spec, z).map_err(|e| e.to_string())?;
        let report = check_z_conditions(spec, &cone, &zd);
        ensure(report.all_passed(), || format!("{z}: {:?}", report.failures().next()))?;
        for u in &units_u {
            let expected = linear_field(spec, &a_map(&zd, u, n), &b_map(&zd, u, m)).scale(&Gauss::from_int(2));
            ensure(d_u(spec, u).bracket(z) == expected, || format!("[∂_u, {z}]"))?;
        }
    }
    Ok(format!("{} grade-1/2 and {} grade-1 fields", ys.len(), zs.len()))
}

/// `[∂_{u0}, X(1)] = 0 ⇒ [∂_{u0}, X(1/2)] = 0` over the example's own fields.
fn check_one_kills_half(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let spec = &ex.spec;
    let n = spec.n_u();
    let zs = fields_of_grade(ex, rat(1, 1));
    let ys = fields_of_grade(ex, rat(1, 2));
    // [∂_{u0}, Z] is linear in u0; collect the real u0 killing all Z.
    let mut rows = Vec::new();
    for z in &zs {
        let cols: Vec<Vec<Gauss>> = (0..n)
            .map(|i| {
                let f = d_u(spec, &vector::unit(n, i)).bracket(z);
                let pts = probe_points(spec);
                pts.iter().flat_map(|p| crate::vfields::realify_vec(&f.eval(p))).collect()
            })
            .collect();
        if let Some(len) = cols.first().map(Vec::len) {
            let m = Matrix::from_cols(len, &cols);
            rows.extend((0..m.rows()).map(|r| m.row(r).to_vec()));
        }
    }
    let kernel =
        if rows.is_empty() { (0..n).map(|i| vector::unit(n, i)).collect() } else { Matrix::from_rows(rows).kernel() };
    for u0 in &kernel {
        for y in &ys {
            ensure(d_u(spec, u0).bracket(y).is_zero(), || {
                format!("[∂_u0, {y}] ≠ 0 for u0 = {}", ex.g.algebra.format(u0))
            })?;
        }
    }
    Ok(format!("{}-dim set of u0, {} grade-1/2 fields", kernel.len(), ys.len()))
}

/// Points where a polynomial field of degree ≤ 2 is determined by its values.
fn probe_points(spec: &SiegelDomainSpec) -> Vec<Vec<Gauss>> {
    let nv = spec.vars.len();
    let mut pts = vec![vector::zeros(nv)];
    for i in 0..nv {
        for s in [1, 2] {
            let mut p = vector::zeros(nv);
            p[i] = Gauss::from_int(s);
            pts.push(p);
        }
        for j in i + 1..nv {
            let mut p = vector::zeros(nv);
            p[i] = Gauss::one();
            p[j] = Gauss::one();
            pts.push(p);
        }
    }
    pts
}

/// For `dim U = 1`: a subalgebra containing `X(-1/2)`, `∂` and `Y_Φ` contains `Y_{iΦ}`.
fn check_rotated_y(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let spec = &ex.spec;
    if spec.n_u() != 1 {
        return Ok("not applicable (dim U > 1)".into());
    }
    let ys = fields_of_grade(ex, rat(1, 2));
    let m = spec.n_v();
    let mut gens: Vec<PolyVectorField> = Vec::new();
    for a in 0..m {
        gens.push(dtilde_v(spec, &vector::unit(m, a)));
        gens.push(dtilde_v(spec, &vector::mul_i(&vector::unit(m, a))));
    }
    gens.push(euler(spec));
    for y in &ys {
        let yd = y_data_of(spec, y).map_err(|e| e.to_string())?;
        let mut g = gens.clone();
        g.push(y.clone());
        let f = generated_subalgebra(&g, 4 * (1 + m) * (1 + m) + 8).map_err(|e| e.to_string())?;
        let rotated = solve_c_for_phi(spec, &yd.phi.scale(&Gauss::i())).map_err(|e| e.to_string())?;
        ensure(in_real_span(&f, &y_field(spec, &rotated)), || format!("Y_(iΦ) missing for {y}"))?;
    }
    Ok(format!("{} grade-1/2 fields", ys.len()))
}

fn check_peel_replay(ex: &BuiltinExample, opts: &SuiteOptions) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    peel_replay_samples(&ex.spec, &mut rng, opts.samples)
}

fn check_chi(ex: &BuiltinExample, opts: &SuiteOptions) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 1);
    chi_samples(ex, &mut rng, opts.samples, CHI_TOLERANCE)
}

fn check_delta_law(ex: &BuiltinExample, opts: &SuiteOptions) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 2);
    delta_law_samples(ex, &mut rng, opts.samples, opts.tolerance)
}

fn check_kernel_invariance(ex: &BuiltinExample, opts: &SuiteOptions) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 3);
    kernel_samples(ex, &mut rng, opts.samples, opts.tolerance)
}

// ---------------------------------------------------------------------------
// Numeric sampling checks.

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn within(worst: f64, tol: f64, what: &str, count: usize) -> Outcome {
    if worst <= tol {
        Ok(format!("{count} samples, max rel err {worst:.2e}"))
    } else {
        Err(format!("{what}: max rel err {worst:.2e} > {tol:.0e}"))
    }
}

pub fn peel_replay_samples<R: Rng>(spec: &SiegelDomainSpec, rng: &mut R, count: usize) -> Outcome {
    for i in 0..count {
        let dec = sampling::cone_decomposition(spec, rng);
        let u = spec.replay(&dec);
        let back = spec.peel(&u, true).map_err(|e| format!("sample {i}: {e}"))?;
        ensure(back == dec, || format!("sample {i}: peel(replay(d)) != d"))?;
    }
    Ok(format!("{count} exact samples"))
}

/// A random real combination of the character basis.
pub fn random_character<R: Rng>(basis: &[Vec<Gauss>], dim: usize, rng: &mut R) -> Vec<Gauss> {
    let mut xi = vector::zeros(dim);
    for row in basis {
        vector::axpy(&mut xi, &Gauss::real(sampling::small_rat(rng, 3, 2)), row);
    }
    xi
}

struct Weight {
    exps: Vec<Gauss>,
    tt: Vec<Gauss>,
}

fn weight(ex: &BuiltinExample, tau: &Tau, xi: &[Gauss]) -> Weight {
    Weight { exps: delta_exponents(&ex.spec.nj, &xi[..ex.b_dim()]), tt: theta_tau(ex, tau, &ThetaChar::from_xi(xi)) }
}

pub fn chi_samples<R: Rng>(ex: &BuiltinExample, rng: &mut R, count: usize, tol: f64) -> Outcome {
    within(chi_error(ex, rng, count)?, tol, "chi(ab) vs chi(a)chi(b)", count)
}

/// Worst relative error of `χ(ab) = χ(a) χ(b)` over random splits.
pub fn chi_error<R: Rng>(ex: &BuiltinExample, rng: &mut R, count: usize) -> Result<f64, String> {
    let spec = &ex.spec;
    let tau = Tau::new(&spec.nj);
    let basis = character_basis(ex);
    let xi = random_character(&basis, ex.g.dim(), rng);
    let w = weight(ex, &tau, &xi);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let len = rng.gen_range(2..8);
        let word = sampling::word(spec, rng, len, WordKind::Full);
        let cut = rng.gen_range(0..=len);
        let (a, b) = (BWord(word.0[..cut].to_vec()), BWord(word.0[cut..].to_vec()));
        worst = worst.max(rel_err(chi(spec, &w.tt, &word), chi(spec, &w.tt, &a) * chi(spec, &w.tt, &b)));
    }
    Ok(worst)
}

/// `Ad(t0) W` for a word of `B(0)` letters, through the action on `(iW, 0)`.
pub fn ad_linear(spec: &SiegelDomainSpec, word: &BWord, w: &[Complex64]) -> Result<Vec<Complex64>, String> {
    let i = Complex64::new(0.0, 1.0);
    let p = Point { u: w.iter().map(|z| i * z).collect(), v: vec![Complex64::new(0.0, 0.0); spec.n_v()] };
    let out = spec.act(word, &p).map_err(|e| e.to_string())?;
    Ok(out.u.iter().map(|z| -i * z).collect())
}

/// `Δ_ξ(Ad(t0) W) = |χ^{iξ}(t0)|^2 Δ_ξ(W)` on `W ∈ Ω + i b(1)`.
pub fn delta_law_samples<R: Rng>(ex: &BuiltinExample, rng: &mut R, count: usize, tol: f64) -> Outcome {
    within(delta_law_error(ex, rng, count)?, tol, "delta transformation law", count)
}

pub fn delta_law_error<R: Rng>(ex: &BuiltinExample, rng: &mut R, count: usize) -> Result<f64, String> {
    let spec = &ex.spec;
    let tau = Tau::new(&spec.nj);
    let basis = character_basis(ex);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let w = weight(ex, &tau, &random_character(&basis, ex.g.dim(), rng));
        let t0 = sampling::word(spec, rng, 4, WordKind::Linear);
        let u: Vec<Complex64> = sampling::to_c64(&sampling::cone_point(spec, rng))
            .into_iter()
            .map(|y| y + Complex64::new(0.0, rng.gen_range(-2.0..2.0)))
            .collect();
        let lhs = delta_eval(spec, &w.exps, &ad_linear(spec, &t0, &u)?).map_err(|e| e.to_string())?;
        let rhs = chi(spec, &w.tt, &t0).norm_sqr() * delta_eval(spec, &w.exps, &u).map_err(|e| e.to_string())?;
        worst = worst.max(rel_err(lhs, rhs));
    }
    Ok(worst)
}

/// `K(bz, bw) = χ(b) K(z, w) conj(χ(b))` for random `b ∈ B`.
pub fn kernel_samples<R: Rng>(ex: &BuiltinExample, rng: &mut R, count: usize, tol: f64) -> Outcome {
    within(kernel_error(ex, rng, count)?, tol, "kernel invariance", count)
}

pub fn kernel_error<R: Rng>(ex: &BuiltinExample, rng: &mut R, count: usize) -> Result<f64, String> {
    let spec = &ex.spec;
    let tau = Tau::new(&spec.nj);
    let basis = character_basis(ex);
    let reference = spec.reference_point().to_c64();
    let two_e: Vec<Complex64> = sampling::to_c64(&spec.e_coords).iter().map(|z| z * 2.0).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let w = weight(ex, &tau, &random_character(&basis, ex.g.dim(), rng));
        let k0 = kernel_eval(spec, &w.exps, &reference, &reference).map_err(|e| e.to_string())?;
        worst = worst.max(rel_err(k0, delta_eval(spec, &w.exps, &two_e).map_err(|e| e.to_string())?));
        let z = sampling::domain_point(spec, rng).to_c64();
        let zw = sampling::domain_point(spec, rng).to_c64();
        let b = sampling::word(spec, rng, 5, WordKind::Full);
        let c = chi(spec, &w.tt, &b);
        let bz = spec.act(&b, &z).map_err(|e| e.to_string())?;
        let bw = spec.act(&b, &zw).map_err(|e| e.to_string())?;
        let lhs = kernel_eval(spec, &w.exps, &bz, &bw).map_err(|e| e.to_string())?;
        let rhs = c * kernel_eval(spec, &w.exps, &z, &zw).map_err(|e| e.to_string())? * c.conj();
        worst = worst.max(rel_err(lhs, rhs));
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Golden facts for vinberg5.

fn g(re: i64, im: i64) -> Gauss {
    Gauss::new(rat(re, 1), rat(im, 1))
}

fn check_quoted_brackets(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let alg = &ex.g.algebra;
    let e = |t: &[(&str, Gauss)]| element(alg, t);
    let cases = [
        ("W1", "E1", "A1", e(&[("A1", g(-2, 0)), ("E1", g(0, 2)), ("W1", g(0, 1))])),
        ("W1", "E31", "A31", e(&[("E31", g(0, 1)), ("A31", g(-1, 0))])),
        ("W2", "E2", "A2", e(&[("A2", g(-2, 0)), ("W2", g(0, 1)), ("E2", g(0, 2))])),
        ("W2", "E32", "A32", e(&[("E32", g(0, 1)), ("A32", g(-1, 0))])),
    ];
    for (w, el, a, expected) in &cases {
        let got = alg.bracket(&e(&[(w, g(1, 0))]), &e(&[(el, g(1, 0)), (a, g(0, 1))]));
        ensure(got == *expected, || format!("[{w}, {el} + i{a}] = {}", alg.format(&got)))?;
    }
    let kk = alg.bracket(&e(&[("W1", g(1, 0))]), &e(&[("W2", g(1, 0))]));
    ensure(vector::is_zero(&kk), || "[k, k] != 0".into())?;
    Ok("4 brackets and [k, k] = 0".into())
}

fn check_b_minus_basis(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let alg = &ex.g.algebra;
    let quoted = Subspace::span(
        ex.g.dim(),
        [("E1", "A1"), ("E2", "A2"), ("E3", "A3"), ("E31", "A31"), ("E32", "A32")]
            .iter()
            .map(|(e, a)| element(alg, &[(e, g(1, 0)), (a, g(0, 1))])),
    );
    let bm = b_minus(ex, &ex.g.g_minus(ex.reference()));
    ensure(bm == quoted, || "b_- differs from span{E + iA}".into())?;
    Ok("b_- = span{Ek + iAk, E3k + iA3k}".into())
}

fn check_root_signature(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let nj = &ex.spec.nj;
    let dim = |k| nj.root_space(k).map_or(0, Subspace::dim);
    ensure(nj.rank == 3, || format!("rank {}", nj.rank))?;
    ensure(dim(RootKind::Diff { l: 1, k: 0 }) == 0 && dim(RootKind::Sum { l: 1, k: 0 }) == 0, || {
        "(α2±α1)/2 nonzero".into()
    })?;
    for (l, k) in [(2, 0), (2, 1)] {
        ensure(dim(RootKind::Diff { l, k }) == 1 && dim(RootKind::Sum { l, k }) == 1, || {
            format!("(α{}±α{})/2", l + 1, k + 1)
        })?;
    }
    Ok("r = 3, (α2±α1)/2 empty".into())
}

fn check_xi_family(ex: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let alg = &ex.g.algebra;
    let space = Subspace::span(ex.g.dim(), character_basis(ex));
    let family = Subspace::span(
        ex.g.dim(),
        [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
            .iter()
            .map(|&(x, y, n, np)| XiParam::new(rat(x, 1), rat(y, 1), n, np).covector(alg)),
    );
    ensure(space == family, || "characters differ from the xi family".into())?;
    Ok("characters = span of xi(x, y, n, n')".into())
}

fn check_classification(_: &BuiltinExample, _: &SuiteOptions) -> Outcome {
    let xi = |x: i64, y: i64, n: i64, np: i64| XiParam::new(rat(x, 1), rat(y, 1), n, np);
    let flags = [(xi(-1, 0, 1, 1), true), (xi(0, 5, 0, 0), true), (xi(-1, 0, 0, 1), false), (xi(1, 0, 1, 1), false)];
    for (p, expected) in &flags {
        ensure(is_unitarizable(p) == *expected, || format!("unitarizable{p} should be {expected}"))?;
    }
    let label = |p: &XiParam, l| partition_label(p, l).map_err(|e| e.to_string());
    ensure(label(&xi(-1, 0, 2, 3), Level::G)? == label(&xi(-2, 7, 2, 3), Level::G)?, || "G-level minus class".into())?;
    ensure(label(&xi(-1, 0, 1, 1), Level::B)? == label(&xi(-2, 3, 4, 5), Level::B)?, || "B-level minus class".into())?;
    for l in [Level::B, Level::G] {
        ensure(label(&xi(0, 1, 0, 0), l)? != label(&xi(0, 2, 0, 0), l)?, || "x = 0 singletons".into())?;
    }
    Ok("4 flags, 3 pairs".into())
}
