//! Acceptance run: one pass/fail line per criterion, with timings. Exits
//! nonzero if any criterion fails or exceeds its time budget.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use jdomain::builtins::{build_di21, build_rank1, build_vinberg5, element};
use jdomain::classify::{classify_batch, default_grid, is_unitarizable, partition_label, Level, XiParam};
use jdomain::exact::{rat, vector, Gauss, Matrix, Rat, Subspace};
use jdomain::normal_j::{koszul_form, validate_normal_j, RootKind};
use jdomain::reps::{b_minus, check_zero_extension, Tau, ThetaChar, ZeroExtension};
use jdomain::sampling;
use jdomain::suite::{chi_error, delta_law_error, kernel_error, peel_replay_samples};
use jdomain::vfields::{
    a_map, b_map, d_u, dtilde_v, euler, generated_subalgebra, grade_classify, in_real_span, linear_field, phi_e, psi_e,
    y_field, z_field, GradeClass, YData, ZData,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Check = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn g(re: i64, im: i64) -> Gauss {
    Gauss::new(rat(re, 1), rat(im, 1))
}

// ---------------------------------------------------------------------------
// 1. Reconstruction of the five-dimensional example.

fn criterion_1() -> Check {
    let ex = build_vinberg5();
    let alg = &ex.g.algebra;
    ensure(alg.check_jacobi() == Ok(220), || "Jacobi does not hold on all 220 triples".into())?;
    let dims = (ex.g.dim(), ex.b_dim(), ex.k.dim());
    ensure(dims == (12, 10, 2), || format!("dims {dims:?}"))?;
    let p = [g(0, 1), g(0, 1), g(0, 1), g(0, 0), g(0, 0)];
    ensure(ex.reference() == p, || "reference point is not iI3".into())?;
    let e = |t: &[(&str, Gauss)]| element(alg, t);
    let k = Subspace::span(12, [e(&[("W1", g(1, 0))]), e(&[("W2", g(1, 0))])]);
    ensure(ex.g.isotropy(&p) == k, || "isotropy at iI3 is not span{W1, W2}".into())?;
    let quoted = [
        ("W1", "E1", "A1", e(&[("A1", g(-2, 0)), ("E1", g(0, 2)), ("W1", g(0, 1))])),
        ("W1", "E31", "A31", e(&[("E31", g(0, 1)), ("A31", g(-1, 0))])),
        ("W2", "E2", "A2", e(&[("A2", g(-2, 0)), ("E2", g(0, 2)), ("W2", g(0, 1))])),
        ("W2", "E32", "A32", e(&[("E32", g(0, 1)), ("A32", g(-1, 0))])),
    ];
    for (w, el, a, expected) in &quoted {
        let got = alg.bracket(&e(&[(w, g(1, 0))]), &e(&[(el, g(1, 0)), (a, g(0, 1))]));
        ensure(got == *expected, || format!("[{w}, {el} + i{a}] = {}", alg.format(&got)))?;
    }
    ensure(vector::is_zero(&alg.bracket(&e(&[("W1", g(1, 0))]), &e(&[("W2", g(1, 0))]))), || "[k, k] != 0".into())?;
    let display = Subspace::span(
        12,
        [("E1", "A1"), ("E2", "A2"), ("E3", "A3"), ("E31", "A31"), ("E32", "A32")]
            .iter()
            .map(|(x, a)| e(&[(x, g(1, 0)), (a, g(0, 1))])),
    );
    ensure(b_minus(&ex, &ex.g.g_minus(&p)) == display, || "b_- differs from span{E + iA}".into())?;
    Ok("220 triples, dims (12, 10, 2), k = span{W1, W2}, 4 brackets, b_- basis".into())
}

// ---------------------------------------------------------------------------
// 2. Normal j-algebra axioms.

fn criterion_2() -> Check {
    let mut total = 0;
    for ex in [build_vinberg5(), build_rank1(), build_di21()] {
        let nj = &ex.spec.nj;
        let omega = koszul_form(&nj.b, &nj.j);
        let report = validate_normal_j(&nj.b, &nj.j, &omega);
        if let Some(c) = report.failures().next() {
            return Err(format!("{}: {} fails", ex.name, c.name));
        }
        for axiom in ["j^2 = -1", "integrability", "<,> j-invariant", "<,> positive definite"] {
            ensure(report.checks.iter().any(|c| c.name == axiom), || format!("axiom {axiom} not checked"))?;
        }
        total += report.checks.len();
    }
    Ok(format!("3 examples, {total} checks, Koszul form"))
}

// ---------------------------------------------------------------------------
// 3. Root decomposition and grading.

fn criterion_3() -> Check {
    let ex = build_vinberg5();
    let nj = &ex.spec.nj;
    ensure(nj.rank == 3, || format!("rank {}", nj.rank))?;
    let dim = |k| nj.root_space(k).map_or(0, Subspace::dim);
    ensure(dim(RootKind::Diff { l: 1, k: 0 }) == 0 && dim(RootKind::Sum { l: 1, k: 0 }) == 0, || {
        "(α2±α1)/2 nonzero".into()
    })?;
    for (l, k) in [(2, 0), (2, 1)] {
        ensure(dim(RootKind::Diff { l, k }) == 1 && dim(RootKind::Sum { l, k }) == 1, || {
            format!("(α{}±α{})/2", l + 1, k + 1)
        })?;
    }
    let mut pairs = 0;
    for ex in [build_vinberg5(), build_di21(), build_rank1()] {
        let nj = &ex.spec.nj;
        let parts = [(rat(0, 1), &nj.grading.zero), (rat(1, 2), &nj.grading.half), (rat(1, 1), &nj.grading.one)];
        for (g1, s1) in &parts {
            for (g2, s2) in &parts {
                let target = parts.iter().find(|(g, _)| *g == g1 + g2);
                for x in s1.basis() {
                    for y in s2.basis() {
                        let z = nj.b.bracket(x, y);
                        let ok = target.map_or(vector::is_zero(&z), |(_, t)| t.contains(&z));
                        ensure(ok, || format!("{}: [b({g1}), b({g2})] outside b({})", ex.name, g1 + g2))?;
                        pairs += 1;
                    }
                }
            }
        }
    }
    // A's in b(0), E's in b(1), checked through ad(jE) directly.
    let je = nj.j_e();
    for (label, grade) in [
        ("A1", 0),
        ("A2", 0),
        ("A3", 0),
        ("A31", 0),
        ("A32", 0),
        ("E1", 1),
        ("E2", 1),
        ("E3", 1),
        ("E31", 1),
        ("E32", 1),
    ] {
        let x = nj.b.basis_vector(label).unwrap();
        ensure(nj.b.bracket(&je, &x) == vector::scale_rat(&rat(grade, 1), &x), || format!("ad(jE) {label}"))?;
        ensure(nj.grade_of(&x) == Some(rat(grade, 1)), || format!("grade_of({label})"))?;
    }
    Ok(format!("r = 3, (α2±α1)/2 empty, {pairs} basis pairs, 10 generator grades"))
}

// ---------------------------------------------------------------------------
// 4. Vector-field calculus on the rank-one Siegel domain.

fn y_di21(phi: &Gauss) -> YData {
    YData { phi: Matrix::from_rows(vec![vec![phi.clone()]]), c: vec![vec![vec![&Gauss::i() * &phi.conj()]]] }
}

fn z_di21(a: &Rat) -> ZData {
    let a = Gauss::real(a.clone());
    ZData { a: vec![vec![vec![a.clone()]]], b: vec![vec![vec![a]]] }
}

fn criterion_4() -> Check {
    let ex = build_di21();
    let spec = &ex.spec;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let one = [Gauss::one()];
    let minus = -Gauss::one();
    let mut identities = 0;
    for _ in 0..50 {
        let r = |rng: &mut ChaCha8Rng| sampling::small_gauss(rng, 4, 3);
        let m = |rng: &mut ChaCha8Rng| Matrix::from_rows(vec![vec![r(rng)]]);
        let (a, b, a2, b2) = (m(&mut rng), m(&mut rng), m(&mut rng), m(&mut rng));
        let x = linear_field(spec, &a, &b);
        let u0 = [Gauss::real(sampling::small_rat(&mut rng, 4, 3))];
        let v0 = [r(&mut rng)];
        ensure(x.bracket(&d_u(spec, &u0)) == d_u(spec, &a.mul_vec(&u0)).scale(&minus), || "[X, ∂_u]".into())?;
        let rhs = linear_field(spec, &a.commutator(&a2), &b.commutator(&b2)).scale(&minus);
        ensure(x.bracket(&linear_field(spec, &a2, &b2)) == rhs, || "[X, X']".into())?;
        // ∂̃_v brackets need an associated pair: take ad of a b(0) element.
        let mut t = vector::zeros(spec.nj.dim());
        for w in spec.nj.grading.zero.basis() {
            vector::axpy(&mut t, &Gauss::real(sampling::small_rat(&mut rng, 4, 3)), w);
        }
        let (at, bt) = (spec.ad_on_u(&t).unwrap(), spec.ad_on_v(&t).unwrap());
        let xt = linear_field(spec, &at, &bt);
        ensure(xt.bracket(&dtilde_v(spec, &v0)) == dtilde_v(spec, &bt.mul_vec(&v0)).scale(&minus), || {
            "[X, ∂̃_v]".into()
        })?;

        let phi = r(&mut rng);
        let yd = y_di21(&phi);
        let y = y_field(spec, &yd);
        ensure(d_u(spec, &u0).bracket(&y) == dtilde_v(spec, &yd.phi.mul_vec(&u0)), || "[∂_u, Y]".into())?;
        let q = spec.q_form(&one, &v0);
        let phi_v = Matrix::from_rows(vec![vector::im(&spec.q_form(&yd.phi.col(0), &v0))]).scale(&Gauss::from_int(4));
        let bcol = &(&g(0, 2) * &(&phi * &q[0])) + &(&Gauss::from_int(2) * &(&v0[0] * &yd.c[0][0][0]));
        let expected = linear_field(spec, &phi_v, &Matrix::from_rows(vec![vec![bcol]]));
        ensure(dtilde_v(spec, &v0).bracket(&y) == expected, || "[∂̃_v, Y]".into())?;

        let zd = z_di21(&sampling::small_rat(&mut rng, 4, 3));
        let z = z_field(spec, &zd);
        let expected = linear_field(spec, &a_map(&zd, &u0, 1), &b_map(&zd, &u0, 1)).scale(&Gauss::from_int(2));
        ensure(d_u(spec, &u0).bracket(&z) == expected, || "[∂_u, Z]".into())?;

        let target = vector::scale(&-Gauss::i(), &yd.phi.mul_vec(&spec.e_coords));
        ensure(psi_e(spec, &y).map_err(|e| e.to_string())? == dtilde_v(spec, &target), || "ψ_e(Y_Φ)".into())?;
        identities += 7;

        // [Y_Φ, Y_iΦ] lies in X(1) with a(e, e) = 4 Q(Φe, Φe).
        let yi = y_field(spec, &y_di21(&(&phi * &Gauss::i())));
        let zz = y.bracket(&yi);
        ensure(grade_classify(&zz, 1) == GradeClass::Homogeneous(rat(1, 1)) || phi.is_zero(), || {
            "[Y, Y_i] grade".into()
        })?;
        let aee = phi_e(spec, &zz).map_err(|e| e.to_string())?.eval(&[Gauss::zero(), Gauss::zero()])[0].clone();
        let fe = [&phi * &spec.e_coords[0]];
        ensure(aee == &Gauss::from_int(4) * &spec.q_form(&fe, &fe)[0], || "a(e, e) != 4 Q(Φe, Φe)".into())?;
    }
    // If ∂_u0 commutes with X(1) it commutes with X(1/2).
    let zs = [z_field(spec, &z_di21(&rat(1, 1)))];
    let ys = [y_field(spec, &y_di21(&Gauss::one())), y_field(spec, &y_di21(&Gauss::i()))];
    for k in -3..=3 {
        let du = d_u(spec, &[Gauss::from_int(k)]);
        if zs.iter().all(|z| du.bracket(z).is_zero()) {
            ensure(ys.iter().all(|y| du.bracket(y).is_zero()), || format!("u0 = {k}"))?;
        }
    }
    // A subalgebra containing X(-1/2), the Euler field and Y_Φ contains Y_iΦ.
    for _ in 0..10 {
        let phi = sampling::small_gauss(&mut rng, 4, 3);
        if phi.is_zero() {
            continue;
        }
        let y = y_field(spec, &y_di21(&phi));
        let gens = vec![dtilde_v(spec, &one), dtilde_v(spec, &[Gauss::i()]), euler(spec), y];
        let f = generated_subalgebra(&gens, 20).map_err(|e| e.to_string())?;
        ensure(in_real_span(&f, &y_field(spec, &y_di21(&(&phi * &Gauss::i())))), || {
            format!("Y_iΦ missing, Φ = {phi}")
        })?;
    }
    let table = [
        (d_u(spec, &one), rat(-1, 1)),
        (dtilde_v(spec, &one), rat(-1, 2)),
        (euler(spec), rat(0, 1)),
        (y_field(spec, &y_di21(&Gauss::one())), rat(1, 2)),
        (z_field(spec, &z_di21(&rat(1, 1))), rat(1, 1)),
    ];
    for (f, gr) in &table {
        ensure(grade_classify(f, 1) == GradeClass::Homogeneous(gr.clone()), || format!("grade of {f}"))?;
    }
    Ok(format!("{identities} bracket identities, Y bracket and subalgebra properties, 5-row grade table"))
}

// ---------------------------------------------------------------------------
// 5. τ and χ.

fn criterion_5() -> Check {
    let mut pairs = 0;
    for ex in [build_vinberg5(), build_di21()] {
        let tau = Tau::new(&ex.spec.nj);
        let bd = ex.b_dim();
        let bm = b_minus(&ex, &ex.g.g_minus(ex.reference()));
        for i in 0..bd {
            let x = vector::unit(bd, i);
            ensure(bm.contains(&ex.b_to_g(&tau.apply(&x))), || format!("{}: τ(e{i}) not in b_-", ex.name))?;
            for j in 0..bd {
                let y = vector::unit(bd, j);
                let ok = tau.apply(&ex.b.bracket(&x, &y)) == ex.b.bracket(&tau.apply(&x), &tau.apply(&y));
                ensure(ok, || format!("{}: τ not a homomorphism on ({i}, {j})", ex.name))?;
                pairs += 1;
            }
        }
    }
    let mut details = vec![format!("τ on {pairs} pairs")];
    for (ex, seed) in [(build_vinberg5(), 51), (build_di21(), 52)] {
        let worst = chunked(seed, 10_000, |rng, n| chi_error(&ex, rng, n))?;
        details.push(bounded(&format!("{} χ splits", ex.name), worst, 1e-12, 10_000)?);
    }
    let ex = build_vinberg5();
    let xi = |x, y, n, np| ThetaChar::from_xi(&XiParam::new(rat(x, 1), rat(y, 1), n, np).covector(&ex.g.algebra));
    for (x, y) in [(-1, 0), (0, 3), (-2, 5)] {
        ensure(check_zero_extension(&ex, &xi(x, y, 0, 0)) == ZeroExtension::Passes, || {
            format!("zero extension ({x}, {y}, 0, 0)")
        })?;
    }
    for (n, np) in [(1, 0), (0, 2), (3, 3)] {
        let r = check_zero_extension(&ex, &xi(-1, 0, n, np));
        ensure(matches!(r, ZeroExtension::NonzeroOnK(_)), || format!("no witness for n = {n}, n' = {np}: {r:?}"))?;
    }
    details.push("zero extension".into());
    Ok(details.join("; "))
}

// ---------------------------------------------------------------------------
// 6. Cone and kernel numerics.

/// Positive definiteness of `[[z1, 0, z4], [0, z2, z5], [z4, z5, z3]]` by its
/// leading minors, written out.
fn sylvester(z: &[Rat]) -> bool {
    let zero = rat(0, 1);
    let m3 = &z[0] * &z[1] * &z[2] - &z[0] * &z[4] * &z[4] - &z[1] * &z[3] * &z[3];
    z[0] > zero && &z[0] * &z[1] > zero && m3 > zero
}

const SAMPLES: usize = 1000;
const CHUNKS: usize = 10;

/// Splits `count` samples across chunks with independent seeds; returns the
/// largest per-chunk value.
fn chunked(
    seed: u64,
    count: usize,
    f: impl Fn(&mut ChaCha8Rng, usize) -> Result<f64, String> + Sync,
) -> Result<f64, String> {
    let results: Vec<Result<f64, String>> = (0..CHUNKS as u64)
        .into_par_iter()
        .map(|c| f(&mut ChaCha8Rng::seed_from_u64(seed * 1000 + c), count / CHUNKS))
        .collect();
    results.into_iter().try_fold(0.0, |acc: f64, r| r.map(|w| acc.max(w)))
}

fn bounded(what: &str, worst: f64, tol: f64, count: usize) -> Check {
    ensure(worst <= tol, || format!("{what}: max rel err {worst:.2e} > {tol:.0e}"))?;
    Ok(format!("{what} on {count}, max rel err {worst:.2e}"))
}

fn criterion_6() -> Check {
    let v5 = build_vinberg5();
    let di = build_di21();
    let mut details = Vec::new();
    for ex in [&v5, &di] {
        chunked(61, SAMPLES, |rng, n| peel_replay_samples(&ex.spec, rng, n).map(|_| 0.0))
            .map_err(|e| format!("{}: {e}", ex.name))?;
    }
    details.push(format!("peel∘replay {SAMPLES} per example"));

    let agree = (0..CHUNKS as u64)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(62_000 + c);
            let mut positive = 0;
            for _ in 0..SAMPLES / CHUNKS {
                let z: Vec<Rat> = (0..5)
                    .map(|i| {
                        if i < 3 && rand::Rng::gen_bool(&mut rng, 0.8) {
                            sampling::positive_rat(&mut rng, 6, 2)
                        } else {
                            sampling::small_rat(&mut rng, 6, 2)
                        }
                    })
                    .collect();
                let u: Vec<Gauss> = z.iter().cloned().map(Gauss::real).collect();
                let peeled = v5.spec.peel(&u, true).is_ok();
                if peeled != sylvester(&z) {
                    return Err(format!("disagreement at {z:?}"));
                }
                positive += peeled as usize;
            }
            Ok(positive)
        })
        .collect::<Result<Vec<usize>, String>>()?;
    let positive: usize = agree.iter().sum();
    ensure(positive > 50 && positive < SAMPLES - 50, || format!("unbalanced sample: {positive} positive"))?;
    details.push(format!("Sylvester agreement on {SAMPLES} ({positive} inside)"));

    for ex in [&v5, &di] {
        let d = chunked(63, SAMPLES, |rng, n| delta_law_error(ex, rng, n))?;
        details.push(bounded(&format!("{} Δ law", ex.name), d, 1e-9, SAMPLES)?);
        let k = chunked(64, SAMPLES, |rng, n| kernel_error(ex, rng, n))?;
        details.push(bounded(&format!("{} kernel invariance", ex.name), k, 1e-9, SAMPLES)?);
    }
    Ok(details.join("; "))
}

// ---------------------------------------------------------------------------
// 7. Classification.

fn criterion_7() -> Check {
    let xi = |x: i64, y: i64, n: i64, np: i64| XiParam::new(rat(x, 1), rat(y, 1), n, np);
    for (p, expected) in
        [(xi(-1, 0, 1, 1), true), (xi(0, 5, 0, 0), true), (xi(-1, 0, 0, 1), false), (xi(1, 0, 1, 1), false)]
    {
        ensure(is_unitarizable(&p) == expected, || format!("unitarizable{p} should be {expected}"))?;
    }
    let half = XiParam::new(rat(1, 2), rat(0, 1), 1, 1);
    ensure(!is_unitarizable(&half), || "x = 1/2 must not be unitarizable".into())?;
    let label = |p: &XiParam, l| partition_label(p, l).map_err(|e| e.to_string());
    ensure(label(&xi(-1, 0, 2, 3), Level::G)? == label(&xi(-2, 7, 2, 3), Level::G)?, || "G-level x < 0 pair".into())?;
    ensure(label(&xi(-1, 0, 1, 1), Level::B)? == label(&xi(-2, 3, 4, 5), Level::B)?, || "B-level x < 0 pair".into())?;
    ensure(label(&xi(-1, 0, 1, 1), Level::G)? != label(&xi(-1, 0, 1, 2), Level::G)?, || "G separates (n, n')".into())?;
    for l in [Level::B, Level::G] {
        ensure(label(&xi(0, 1, 0, 0), l)? != label(&xi(0, 2, 0, 0), l)?, || "x = 0 singletons".into())?;
    }
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/classify_grid.jsonl");
    let golden = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let grid = default_grid();
    ensure(grid.len() == 10_000, || "grid is not 10^4".into())?;
    let lines: String = classify_batch(&grid).iter().map(|i| serde_json::to_string(i).unwrap() + "\n").collect();
    ensure(lines == golden, || "grid report differs from the golden file".into())?;
    Ok("display cases and 10^4 grid golden".into())
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("reconstruction of the five-dimensional example", Some(Duration::from_secs(10)), criterion_1),
        ("normal j-algebra axioms", Some(Duration::from_secs(5)), criterion_2),
        ("root decomposition and grading", None, criterion_3),
        ("vector-field calculus", None, criterion_4),
        ("tau and chi", None, criterion_5),
        ("cone and kernel numerics", Some(Duration::from_secs(30)), criterion_6),
        ("classification", None, criterion_7),
    ];
    let mut failed = 0;
    for (i, (title, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let over = budget.is_some_and(|b| elapsed > b);
        let passed = outcome.is_ok() && !over;
        failed += !passed as usize;
        let budget = budget.map(|b| format!(" (limit {}s)", b.as_secs())).unwrap_or_default();
        let detail = match &outcome {
            Ok(d) if over => format!("{d}; over time budget"),
            Ok(d) => d.clone(),
            Err(e) => e.clone(),
        };
        println!(
            "criterion {} {}: {} [{:.2}s{}] {}",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            title,
            elapsed.as_secs_f64(),
            budget,
            detail
        );
    }
    if failed == 0 {
        println!("acceptance: all 7 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 7 criteria failed");
        ExitCode::FAILURE
    }
}
