use jdomain::builtins::{build_di21, build_rank1, build_vinberg5, BuiltinExample};
use jdomain::exact::{rat, vector, Gauss, Subspace};
use jdomain::normal_j::{koszul_form, validate_normal_j, RootKind};
use jdomain::reps::{b_minus, Tau};
use jdomain::vfields::{grade_classify, GradeClass};

fn all() -> Vec<BuiltinExample> {
    vec![build_vinberg5(), build_di21(), build_rank1()]
}

#[test]
fn jacobi_on_every_triple() {
    for ex in all() {
        let d = ex.g.dim();
        assert_eq!(ex.g.algebra.check_jacobi(), Ok(d * (d - 1) * (d - 2) / 6), "{}", ex.name);
        let b = &ex.spec.nj.b;
        assert!(b.check_jacobi().is_ok());
        assert!(b.is_split_solvable());
    }
}

#[test]
fn koszul_form_passes_the_axioms() {
    for ex in all() {
        let nj = &ex.spec.nj;
        let omega = koszul_form(&nj.b, &nj.j);
        assert_eq!(omega, nj.omega);
        let report = validate_normal_j(&nj.b, &nj.j, &omega);
        assert!(report.all_passed(), "{}: {:?}", ex.name, report);
        let names: Vec<&str> = report.checks.iter().map(|c| c.name).collect();
        for axiom in ["j^2 = -1", "integrability", "<,> j-invariant", "<,> positive definite"] {
            assert!(names.contains(&axiom));
        }
    }
}

#[test]
fn eigenspaces_form_a_direct_sum() {
    for ex in all() {
        let nj = &ex.spec.nj;
        let spaces = nj.b.simultaneous_eigenspaces(&nj.a_basis).unwrap();
        let total: usize = spaces.iter().map(|w| w.space.dim()).sum();
        assert_eq!(total, nj.dim());
        let mut acc = Subspace::zero(nj.dim());
        for w in &spaces {
            assert_eq!(acc.intersect(&w.space).dim(), 0);
            acc = acc.sum(&w.space);
        }
        assert_eq!(acc, Subspace::full(nj.dim()));
    }
}

#[test]
fn grading_multiplication_law() {
    for ex in all() {
        let nj = &ex.spec.nj;
        let parts = [(rat(0, 1), &nj.grading.zero), (rat(1, 2), &nj.grading.half), (rat(1, 1), &nj.grading.one)];
        for (g1, s1) in &parts {
            for (g2, s2) in &parts {
                let target = parts.iter().find(|(g, _)| *g == g1 + g2).map(|(_, s)| (*s).clone());
                for x in s1.basis() {
                    for y in s2.basis() {
                        let z = nj.b.bracket(x, y);
                        match &target {
                            Some(t) => assert!(t.contains(&z)),
                            None => assert!(vector::is_zero(&z)),
                        }
                    }
                }
            }
        }
        for x in nj.grading.one.basis().iter().chain(nj.grading.half.basis()).chain(nj.grading.zero.basis()) {
            let g = nj.grade_of(x).unwrap();
            assert_eq!(nj.b.bracket(&nj.j_e(), x), vector::scale_rat(&g, x));
        }
    }
}

#[test]
fn root_spaces_are_orthogonal() {
    for ex in all() {
        let nj = &ex.spec.nj;
        let derived: Vec<_> = nj.roots.iter().filter(|r| r.kind != RootKind::Cartan).collect();
        let sum = derived.iter().fold(Subspace::zero(nj.dim()), |acc, r| acc.sum(&r.space));
        assert_eq!(sum, nj.b.derived_algebra());
        for (i, r) in derived.iter().enumerate() {
            for s in &derived[i + 1..] {
                for x in r.space.basis() {
                    for y in s.space.basis() {
                        assert!(nj.inner(x, y).is_zero(), "{}: {} vs {}", ex.name, r.kind, s.kind);
                    }
                }
            }
        }
    }
}

#[test]
fn nabla_along_e_k() {
    for ex in all() {
        let nj = &ex.spec.nj;
        for (a, e) in nj.a_basis.iter().zip(&nj.e_basis) {
            for x in nj.grading.one.basis() {
                assert_eq!(nj.nabla(e, x), nj.apply_j(&nj.b.bracket(a, x)), "{}", ex.name);
            }
        }
    }
}

#[test]
fn field_grades_add_under_brackets() {
    for ex in all() {
        let n_u = ex.spec.n_u();
        let homogeneous: Vec<(usize, _)> =
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
                if sum > rat(1, 1) || sum < rat(-1, 1) {
                    assert!(br.is_zero());
                } else {
                    let c = grade_classify(&br, n_u);
                    assert!(c == GradeClass::Zero || c == GradeClass::Homogeneous(sum.clone()), "{c}");
                }
            }
        }
        // b(γ) elements realize fields of grade -γ.
        let nj = &ex.spec.nj;
        for (g, s) in [(rat(0, 1), &nj.grading.zero), (rat(1, 2), &nj.grading.half), (rat(1, 1), &nj.grading.one)] {
            for x in s.basis() {
                assert_eq!(grade_classify(&ex.g.field_of(&ex.b_to_g(x)), n_u), GradeClass::Homogeneous(-g.clone()));
            }
        }
    }
}

#[test]
fn tau_is_a_homomorphism_and_fixes_b_minus() {
    for ex in all() {
        let tau = Tau::new(&ex.spec.nj);
        let bd = ex.b_dim();
        let bm = b_minus(&ex, &ex.g.g_minus(ex.reference()));
        for i in 0..bd {
            let x = vector::unit(bd, i);
            assert!(bm.contains(&ex.b_to_g(&tau.apply(&x))), "{}", ex.name);
            for j in 0..bd {
                let y = vector::unit(bd, j);
                assert_eq!(tau.apply(&ex.b.bracket(&x, &y)), ex.b.bracket(&tau.apply(&x), &tau.apply(&y)));
            }
        }
        for x in bm.basis() {
            assert_eq!(tau.apply(&x[..bd]), x[..bd].to_vec());
        }
    }
}

#[test]
fn isotropy_fields_vanish_at_the_reference_point() {
    let ex = build_vinberg5();
    let p = [Gauss::i(), Gauss::i(), Gauss::i(), Gauss::zero(), Gauss::zero()];
    assert_eq!(ex.reference(), p);
    for label in ["W1", "W2"] {
        assert!(vector::is_zero(&ex.field(label).unwrap().eval(&p)));
    }
    for ex in all() {
        for x in ex.k.basis() {
            assert!(vector::is_zero(&ex.g.field_of(x).eval(ex.reference())));
        }
    }
}
