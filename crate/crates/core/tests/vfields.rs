use jdomain::builtins::{build_di21, build_rank1, build_vinberg5, BuiltinExample};
use jdomain::exact::{rat, vector, Gauss, Matrix, Rat};
use jdomain::sampling;
use jdomain::siegel::SiegelDomainSpec;
use jdomain::vfields::{
    a_map, b_map, check_isotropy_structure, check_y_conditions, check_z_conditions, d_u, decompose_by_grade, dtilde_v,
    euler, generated_subalgebra, grade_classify, in_real_span, linear_field, phi_e, psi_e, solve_c_for_phi, y_field,
    z_field, ConeAlgebra, GradeClass, PolyVectorField, YData, ZData,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn g(re: i64, im: i64) -> Gauss {
    Gauss::new(rat(re, 1), rat(im, 1))
}

fn scalar(x: Gauss) -> Matrix {
    Matrix::from_rows(vec![vec![x]])
}

/// The `Y_Φ` family on the rank-one example: `c(v, v) = i conj(Φ) v^2`.
fn y_di21(phi: &Gauss) -> YData {
    YData { phi: scalar(phi.clone()), c: vec![vec![vec![&Gauss::i() * &phi.conj()]]] }
}

/// `Z_a(u, v) = (a u^2, a v u)`.
fn z_di21(a: &Rat) -> ZData {
    let a = Gauss::real(a.clone());
    ZData { a: vec![vec![vec![a.clone()]]], b: vec![vec![vec![a]]] }
}

fn c_apply(c: &[Vec<Vec<Gauss>>], x: &[Gauss], y: &[Gauss]) -> Vec<Gauss> {
    let m = c.len();
    let mut out = vector::zeros(m);
    for (a, xa) in x.iter().enumerate() {
        for (b, yb) in y.iter().enumerate() {
            vector::axpy(&mut out, &(xa * yb), &c[a][b]);
        }
    }
    out
}

/// `(ad T|_U, ad T|_V)` for a random `T ∈ b(0)`; an associated pair.
fn random_x0<R: Rng>(spec: &SiegelDomainSpec, rng: &mut R) -> (Matrix, Matrix) {
    let mut t = vector::zeros(spec.nj.dim());
    for x in spec.nj.grading.zero.basis() {
        vector::axpy(&mut t, &Gauss::real(sampling::small_rat(rng, 4, 3)), x);
    }
    (spec.ad_on_u(&t).unwrap(), spec.ad_on_v(&t).unwrap())
}

fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    Matrix::from_rows((0..n).map(|_| (0..n).map(|_| sampling::small_gauss(rng, 3, 2)).collect()).collect())
}

fn random_real<R: Rng>(rng: &mut R, n: usize) -> Vec<Gauss> {
    (0..n).map(|_| Gauss::real(sampling::small_rat(rng, 4, 3))).collect()
}

fn random_complex<R: Rng>(rng: &mut R, n: usize) -> Vec<Gauss> {
    (0..n).map(|_| sampling::small_gauss(rng, 4, 3)).collect()
}

#[test]
fn grade_zero_bracket_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for ex in [build_vinberg5(), build_di21()] {
        let spec = &ex.spec;
        let (n, m) = (spec.n_u(), spec.n_v());
        for _ in 0..20 {
            let (a, b) = (random_matrix(&mut rng, n), random_matrix(&mut rng, m));
            let (a2, b2) = (random_matrix(&mut rng, n), random_matrix(&mut rng, m));
            let x = linear_field(spec, &a, &b);
            let u0 = random_real(&mut rng, n);
            assert_eq!(x.bracket(&d_u(spec, &u0)), d_u(spec, &a.mul_vec(&u0)).scale(&-Gauss::one()));
            let rhs = linear_field(spec, &a.commutator(&a2), &b.commutator(&b2)).scale(&-Gauss::one());
            assert_eq!(x.bracket(&linear_field(spec, &a2, &b2)), rhs);

            let (a, b) = random_x0(spec, &mut rng);
            let x = linear_field(spec, &a, &b);
            let v0 = random_complex(&mut rng, m);
            assert_eq!(x.bracket(&dtilde_v(spec, &v0)), dtilde_v(spec, &b.mul_vec(&v0)).scale(&-Gauss::one()));
        }
    }
}

#[test]
fn half_and_one_bracket_formulas() {
    let ex = build_di21();
    let spec = &ex.spec;
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let two_i = g(0, 2);
    for _ in 0..40 {
        let phi = sampling::small_gauss(&mut rng, 4, 3);
        let yd = y_di21(&phi);
        let y = y_field(spec, &yd);
        let u0 = random_real(&mut rng, 1);
        assert_eq!(d_u(spec, &u0).bracket(&y), dtilde_v(spec, &yd.phi.mul_vec(&u0)));

        // [∂̃_v, Y_Φ] = X(4 Φ_v, v' ↦ 2iΦ(Q(v', v)) + 2c(v, v')).
        let v = random_complex(&mut rng, 1);
        let phi_v = Matrix::from_cols(1, &[vector::im(&spec.q_form(&yd.phi.col(0), &v))]);
        let bcol = vector::add(
            &vector::scale(&two_i, &yd.phi.mul_vec(&spec.q_form(&[Gauss::one()], &v))),
            &vector::scale(&Gauss::from_int(2), &c_apply(&yd.c, &v, &[Gauss::one()])),
        );
        let expected = linear_field(spec, &phi_v.scale(&Gauss::from_int(4)), &Matrix::from_cols(1, &[bcol]));
        assert_eq!(dtilde_v(spec, &v).bracket(&y), expected);

        let zd = z_di21(&sampling::small_rat(&mut rng, 4, 3));
        let z = z_field(spec, &zd);
        let lhs = d_u(spec, &u0).bracket(&z);
        assert_eq!(lhs, linear_field(spec, &a_map(&zd, &u0, 1), &b_map(&zd, &u0, 1)).scale(&Gauss::from_int(2)));
    }
}

#[test]
fn brackets_with_grade_zero_transform_tableaux() {
    let ex = build_di21();
    let spec = &ex.spec;
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..30 {
        let (a, b) = (random_matrix(&mut rng, 1), random_matrix(&mut rng, 1));
        let x = linear_field(spec, &a, &b);
        let yd = y_di21(&sampling::small_gauss(&mut rng, 4, 3));
        // Φ' = BΦ - ΦA, c'(v, v) = B c(v, v) - 2 c(Bv, v).
        let phi2 = b.mul(&yd.phi).sub(&yd.phi.mul(&a));
        let e = [Gauss::one()];
        let cvv = c_apply(&yd.c, &e, &e);
        let c2 =
            vector::sub(&b.mul_vec(&cvv), &vector::scale(&Gauss::from_int(2), &c_apply(&yd.c, &b.mul_vec(&e), &e)));
        let y2 = YData { phi: phi2, c: vec![vec![c2]] };
        let lhs = y_field(spec, &yd).bracket(&x);
        // The `u` component of Y_{Φ'} uses conj(Φ'), which is only holomorphic-consistent for associated pairs.
        assert_eq!(lhs.comps()[1], y_field(spec, &y2).comps()[1]);

        let zd = z_di21(&sampling::small_rat(&mut rng, 4, 3));
        let (ae, be) = (a[(0, 0)].clone(), b[(0, 0)].clone());
        let av = zd.a[0][0][0].clone();
        let bv = zd.b[0][0][0].clone();
        let a2 = &(&ae * &av) - &(&(&Gauss::from_int(2) * &av) * &ae);
        let b2 = &(&(&be * &bv) - &(&bv * &ae)) - &(&bv * &be);
        let z2 = ZData { a: vec![vec![vec![a2]]], b: vec![vec![vec![b2]]] };
        assert_eq!(z_field(spec, &zd).bracket(&x), z_field(spec, &z2));
    }
    for _ in 0..30 {
        let (a, b) = random_x0(spec, &mut rng);
        let x = linear_field(spec, &a, &b);
        let yd = y_di21(&sampling::small_gauss(&mut rng, 4, 3));
        let phi2 = b.mul(&yd.phi).sub(&yd.phi.mul(&a));
        let y2 = solve_c_for_phi(spec, &phi2).unwrap();
        assert_eq!(y_field(spec, &yd).bracket(&x), y_field(spec, &y2));
    }
}

#[test]
fn psi_and_phi_at_e() {
    let ex = build_di21();
    let spec = &ex.spec;
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let e = spec.e_coords.clone();
    for _ in 0..30 {
        let yd = y_di21(&sampling::small_gauss(&mut rng, 4, 3));
        let target = vector::scale(&-Gauss::i(), &yd.phi.mul_vec(&e));
        assert_eq!(psi_e(spec, &y_field(spec, &yd)).unwrap(), dtilde_v(spec, &target));
        let zd = z_di21(&sampling::small_rat(&mut rng, 4, 3));
        let aee = a_map(&zd, &e, 1).mul_vec(&e);
        assert_eq!(phi_e(spec, &z_field(spec, &zd)).unwrap(), d_u(spec, &aee));
    }
    assert!(psi_e(spec, &d_u(spec, &e)).is_err());
}

#[test]
fn tableau_conditions() {
    let ex = build_di21();
    let spec = &ex.spec;
    let cone = ConeAlgebra::new(spec).unwrap();
    assert_eq!(cone.dim(), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..20 {
        let phi = sampling::small_gauss(&mut rng, 4, 3);
        let yd = y_di21(&phi);
        assert!(check_y_conditions(spec, &cone, &yd).all_passed());
        assert_eq!(solve_c_for_phi(spec, &yd.phi).unwrap(), yd);
        let zd = z_di21(&sampling::small_rat(&mut rng, 4, 3));
        assert!(check_z_conditions(spec, &cone, &zd).all_passed());
    }
    let bad = YData { phi: scalar(Gauss::one()), c: vec![vec![vec![Gauss::zero()]]] };
    let report = check_y_conditions(spec, &cone, &bad);
    assert!(report.checks[0].passed);
    let y2 = &report.checks[1];
    assert_eq!(y2.name, "Y2");
    assert!(!y2.passed);
    assert!(y2.witness.as_deref().unwrap().starts_with("v = [1], v' = [1]"));

    let one = Gauss::one();
    let no_b = ZData { a: vec![vec![vec![one.clone()]]], b: vec![vec![vec![Gauss::zero()]]] };
    let report = check_z_conditions(spec, &cone, &no_b);
    assert!(!report.checks[1].passed && report.checks[1].name == "Z2");
    let complex_a = ZData { a: vec![vec![vec![Gauss::i()]]], b: vec![vec![vec![Gauss::i()]]] };
    assert!(!check_z_conditions(spec, &cone, &complex_a).checks[0].passed);
}

#[test]
fn grade_table() {
    let ex = build_di21();
    let spec = &ex.spec;
    let one = [Gauss::one()];
    let rows: Vec<(PolyVectorField, Rat)> = vec![
        (d_u(spec, &one), rat(-1, 1)),
        (dtilde_v(spec, &one), rat(-1, 2)),
        (euler(spec), rat(0, 1)),
        (y_field(spec, &y_di21(&Gauss::one())), rat(1, 2)),
        (z_field(spec, &z_di21(&rat(1, 1))), rat(1, 1)),
    ];
    for (f, gr) in &rows {
        assert_eq!(grade_classify(f, 1), GradeClass::Homogeneous(gr.clone()), "{f}");
    }
    let mixed = rows[0].0.add(&rows[4].0);
    assert_eq!(grade_classify(&mixed, 1), GradeClass::NotHomogeneous(vec![rat(-1, 1), rat(1, 1)]));
    assert_eq!(grade_classify(&PolyVectorField::zero(&spec.vars), 1), GradeClass::Zero);

    let expect =
        [("A", 0, 1), ("V1", -1, 2), ("V2", -1, 2), ("E", -1, 1), ("P", 0, 1), ("Y1", 1, 2), ("Yi", 1, 2), ("Z", 1, 1)];
    for (label, p, q) in expect {
        assert_eq!(grade_classify(ex.field(label).unwrap(), 1), GradeClass::Homogeneous(rat(p, q)), "{label}");
    }
    let v5 = build_vinberg5();
    let w1 = grade_classify(v5.field("W1").unwrap(), 5);
    assert_eq!(w1, GradeClass::NotHomogeneous(vec![rat(-1, 1), rat(1, 1)]));
    assert_eq!(w1.to_string(), "mixed(-1,1)");
    assert_eq!(grade_classify(v5.field("A1").unwrap(), 5), GradeClass::Homogeneous(rat(0, 1)));
    assert_eq!(grade_classify(v5.field("E1").unwrap(), 5), GradeClass::Homogeneous(rat(-1, 1)));
}

#[test]
fn builtin_half_and_one_parts_are_the_families() {
    let ex = build_di21();
    let spec = &ex.spec;
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let by_grade = |gr: Rat| -> Vec<PolyVectorField> {
        ex.g.fields.iter().filter(|f| grade_classify(f, 1) == GradeClass::Homogeneous(gr.clone())).cloned().collect()
    };
    let half = by_grade(rat(1, 2));
    let one = by_grade(rat(1, 1));
    assert_eq!((half.len(), one.len()), (2, 1));
    for _ in 0..10 {
        assert!(in_real_span(&half, &y_field(spec, &y_di21(&sampling::small_gauss(&mut rng, 4, 3)))));
        assert!(in_real_span(&one, &z_field(spec, &z_di21(&sampling::small_rat(&mut rng, 4, 3)))));
    }
    assert!(!in_real_span(
        &one,
        &z_field(spec, &ZData { a: vec![vec![vec![Gauss::i()]]], b: vec![vec![vec![Gauss::i()]]] })
    ));
}

/// `[Y_Φ, Y_{iΦ}] = Z_{a,b}` with `a(u, u) = 4 Q(Φu, Φu)`, and the implication
/// `[∂_{u0}, X(1)] = 0 ⇒ [∂_{u0}, X(1/2)] = 0`.
#[test]
fn one_kills_half() {
    let ex = build_di21();
    let spec = &ex.spec;
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..20 {
        let phi = sampling::small_gauss(&mut rng, 4, 3);
        let y = y_field(spec, &y_di21(&phi));
        let yi = y_field(spec, &y_di21(&(&phi * &Gauss::i())));
        let z = y.bracket(&yi);
        assert_eq!(grade_classify(&z, 1), GradeClass::Homogeneous(rat(1, 1)));
        // a(e, e) is the u-component of φ_e(Z).
        let e = &spec.e_coords;
        let a_ee = phi_e(spec, &z).unwrap().eval(&[Gauss::zero(), Gauss::zero()])[0].clone();
        let fe = vec![&phi * &e[0]];
        assert_eq!(a_ee, &Gauss::from_int(4) * &spec.q_form(&fe, &fe)[0]);
    }
    let one: Vec<PolyVectorField> = vec![z_field(spec, &z_di21(&rat(1, 1)))];
    let half = [y_field(spec, &y_di21(&Gauss::one())), y_field(spec, &y_di21(&Gauss::i()))];
    for k in -3..=3 {
        let du = d_u(spec, &[Gauss::from_int(k)]);
        if one.iter().all(|z| du.bracket(z).is_zero()) {
            assert!(half.iter().all(|y| du.bracket(y).is_zero()));
        }
    }
}

/// With `dim U = 1`, a subalgebra containing `X(-1/2)`, `∂` and `Y_Φ` contains `Y_{iΦ}`.
#[test]
fn subalgebra_contains_rotated_y() {
    let ex = build_di21();
    let spec = &ex.spec;
    let mut rng = ChaCha8Rng::seed_from_u64(38);
    for _ in 0..10 {
        let phi = loop {
            let p = sampling::small_gauss(&mut rng, 4, 3);
            if !p.is_zero() {
                break p;
            }
        };
        let yd = y_di21(&phi);
        let y = y_field(spec, &yd);
        let gens = vec![dtilde_v(spec, &[Gauss::one()]), dtilde_v(spec, &[Gauss::i()]), euler(spec), y.clone()];
        let f = generated_subalgebra(&gens, 20).unwrap();
        assert!(in_real_span(&f, &y_field(spec, &y_di21(&(&phi * &Gauss::i())))));

        // Φ'(e) = 6 q0(v0, v0) i Φ(e) for v0 = Φ(e).
        let v0 = yd.phi.mul_vec(&spec.e_coords);
        let x = dtilde_v(spec, &v0).bracket(&y);
        let y2 = y.bracket(&x);
        let q00 = spec.q_form(&v0, &v0)[0].clone();
        let expected = y_field(spec, &y_di21(&(&(&Gauss::from_int(6) * &q00) * &(&Gauss::i() * &v0[0]))));
        assert_eq!(y2, expected);
    }
    let only_y = generated_subalgebra(&[y_field(spec, &y_di21(&Gauss::one()))], 20).unwrap();
    assert_eq!(only_y.len(), 1);
}

fn check_realization(ex: &BuiltinExample) {
    let spec = &ex.spec;
    for i in 0..spec.n_u() {
        let e = vector::unit(spec.n_u(), i);
        assert_eq!(ex.g.field_of(&ex.b_to_g(&spec.u_to_b(&e))), d_u(spec, &e), "{}", ex.name);
    }
    for a in 0..spec.n_v() {
        for e in [vector::unit(spec.n_v(), a), vector::mul_i(&vector::unit(spec.n_v(), a))] {
            assert_eq!(ex.g.field_of(&ex.b_to_g(&spec.v_to_b(&e))), dtilde_v(spec, &e), "{}", ex.name);
        }
    }
    for t in spec.nj.grading.zero.basis() {
        let expected = linear_field(spec, &spec.ad_on_u(t).unwrap(), &spec.ad_on_v(t).unwrap());
        assert_eq!(ex.g.field_of(&ex.b_to_g(t)), expected, "{}", ex.name);
    }
    let je = spec.nj.j_e();
    assert_eq!(ex.g.field_of(&ex.b_to_g(&je)), euler(spec), "{}", ex.name);
}

#[test]
fn b_realizes_the_affine_fields() {
    for ex in [build_vinberg5(), build_di21(), build_rank1()] {
        check_realization(&ex);
    }
}

#[test]
fn isotropy_structure() {
    for ex in [build_vinberg5(), build_di21(), build_rank1()] {
        check_isotropy_structure(&ex.spec, &ex.g, &ex.k).unwrap();
        let parts = |label: &str| decompose_by_grade(ex.field(label).unwrap(), ex.spec.n_u()).len();
        if ex.name == "vinberg5" {
            assert_eq!(parts("W1"), 2);
        }
    }
    let ex = build_di21();
    let j = jdomain::builtins::j_matrix(&ex);
    assert_eq!(j.mul(j), Matrix::identity(4).scale(&-Gauss::one()));
}
