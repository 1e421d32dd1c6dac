use std::collections::BTreeMap;

use proptest::prelude::*;

use pimanifold::classifier::ClassLabel;
use pimanifold::examples::{build_section5, standard_structure, ExampleParams};
use pimanifold::levi_civita::Connection;
use pimanifold::pi_manifold::{ensure_valid, LieAlgebra, PiManifoldInstance};
use pimanifold::spec_file::{emit_spec, parse_spec};
use pimanifold::tensor::{covariant_derivative, flat, int, kulkarni_nomizu, metric_inverse, sharp, Rational, Tensor};
use pimanifold::verify::{recorded_findings, run_suites, Category, Status, Suite};

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| int(n) / int(d))
}

fn symmetric(d: usize) -> impl Strategy<Value = Tensor> {
    prop::collection::vec(-4i64..=4, d * d).prop_map(move |v| {
        Tensor::from_fn(d, 0, 2, |ix| {
            let (i, j) = (ix[0].min(ix[1]), ix[0].max(ix[1]));
            int(v[i * d + j])
        })
    })
}

/// Symmetric and strictly diagonally dominant, hence invertible.
fn metric(d: usize) -> impl Strategy<Value = Tensor> {
    prop::collection::vec(-4i64..=4, d * d).prop_map(move |v| {
        let entry = |i: usize, j: usize| v[i.min(j) * d + i.max(j)];
        Tensor::from_fn(d, 0, 2, |ix| {
            if ix[0] == ix[1] {
                int((0..d).filter(|&k| k != ix[0]).map(|k| entry(ix[0], k).abs()).sum::<i64>() + 1)
            } else {
                int(entry(ix[0], ix[1]))
            }
        })
    })
}

fn connection(d: usize) -> impl Strategy<Value = Connection> {
    prop::collection::vec(-3i64..=3, d * d * d)
        .prop_map(move |v| Connection::new(d, v.into_iter().map(int).collect(), "random").unwrap())
}

fn covariant2(d: usize) -> impl Strategy<Value = Tensor> {
    prop::collection::vec(rational(), d * d).prop_map(move |v| Tensor::from_components(d, 0, 2, v).unwrap())
}

/// `R ⋉ R^{d-1}`: only brackets with the distinguished direction `p` are nonzero,
/// and they stay inside the complement of `p`, so Jacobi holds.
fn semidirect(n: usize) -> impl Strategy<Value = PiManifoldInstance> {
    let d = 2 * n + 1;
    (0..d, prop::collection::vec(-2i64..=2, d * d)).prop_map(move |(p, coeffs)| {
        let mut brackets = BTreeMap::new();
        for q in (0..d).filter(|&q| q != p) {
            let v: Vec<Rational> = (0..d).map(|r| if r == p { int(0) } else { int(coeffs[q * d + r]) }).collect();
            if p < q {
                brackets.insert((p, q), v);
            } else {
                brackets.insert((q, p), v.into_iter().map(|x| -x).collect());
            }
        }
        let algebra = LieAlgebra::from_brackets(d, &brackets).unwrap();
        PiManifoldInstance::new("semidirect", algebra, standard_structure(n)).unwrap()
    })
}

/// `ξ` acting on the horizontal part by `aI + bφ`, optionally leaking into `ξ`;
/// combinations violating Jacobi are dropped.
fn xi_action(n: usize) -> impl Strategy<Value = PiManifoldInstance> {
    let d = 2 * n + 1;
    (-2i64..=2, -2i64..=2, -1i64..=1).prop_filter_map("jacobi", move |(a, b, c)| {
        let mut brackets = BTreeMap::new();
        for q in 1..d {
            let partner = if q <= n { q + n } else { q - n };
            let mut v = vec![int(0); d];
            v[q] = int(a);
            v[partner] = &v[partner] + int(b);
            if q == 1 {
                v[0] = int(c);
            }
            brackets.insert((0, q), v);
        }
        let algebra = LieAlgebra::from_brackets(d, &brackets).unwrap();
        let inst = PiManifoldInstance::new("xi-action", algebra, standard_structure(n)).unwrap();
        ensure_valid(&inst).is_ok().then_some(inst)
    })
}

/// One horizontal direction scaling the other horizontal ones, `ξ` central.
fn horizontal_scaling(n: usize) -> impl Strategy<Value = PiManifoldInstance> {
    let d = 2 * n + 1;
    (1..d, prop_oneof![-3i64..=-1, 1i64..=3]).prop_map(move |(p, lambda)| {
        let mut brackets = BTreeMap::new();
        for q in (1..d).filter(|&q| q != p) {
            let mut v = vec![int(0); d];
            v[q] = int(lambda);
            if p < q {
                brackets.insert((p, q), v);
            } else {
                brackets.insert((q, p), v.into_iter().map(|x| -x).collect());
            }
        }
        let algebra = LieAlgebra::from_brackets(d, &brackets).unwrap();
        PiManifoldInstance::new("horizontal-scaling", algebra, standard_structure(n)).unwrap()
    })
}

fn assert_hard_invariants(inst: &PiManifoldInstance) -> Result<(), TestCaseError> {
    let (_, reports) = run_suites(inst, Suite::Core).unwrap();
    for r in reports {
        prop_assert!(r.holds(), "{} has residual {:?}", r.id, r.components());
    }
    Ok(())
}

/// The connection, torsion and torsion-form closed forms hold whenever the
/// class is a main class.
fn assert_structural_crosschecks(inst: &PiManifoldInstance) -> Result<(), TestCaseError> {
    let (a, reports) = run_suites(inst, Suite::All).unwrap();
    for r in &reports {
        prop_assert!(r.category == Category::PaperCrosscheck || r.holds(), "{} has a residual", r.id);
    }
    let label = a.classification.label;
    if label.is_main() {
        for prefix in ["thm4.2.", "thm4.3.", "cor4.4."] {
            let id = format!("{prefix}{label}");
            let r = reports.iter().find(|r| r.id == id).unwrap();
            prop_assert!(r.holds(), "{id} has residual {:?}", r.components());
        }
    }
    Ok(())
}

proptest! {
    #[test]
    fn kulkarni_nomizu_is_an_algebraic_curvature_tensor(s in symmetric(4), p in symmetric(4)) {
        let sp = kulkarni_nomizu(&s, &p).unwrap();
        prop_assert_eq!(&sp, &kulkarni_nomizu(&p, &s).unwrap());
        for ix in (0..256usize).map(|f| [f / 64, f / 16 % 4, f / 4 % 4, f % 4]) {
            let [x, y, z, w] = ix;
            let v = sp.get(&ix);
            prop_assert_eq!(v, &-sp.get(&[y, x, z, w]));
            prop_assert_eq!(v, &-sp.get(&[x, y, w, z]));
            prop_assert_eq!(v, sp.get(&[z, w, x, y]));
            let bianchi = v + sp.get(&[y, z, x, w]) + sp.get(&[z, x, y, w]);
            prop_assert_eq!(bianchi, int(0));
        }
    }

    #[test]
    fn metric_inverse_is_exact(g in metric(5)) {
        let m = metric_inverse(&g).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let prod: Rational = (0..5).map(|k| m.g.get(&[i, k]) * m.g_inv.get(&[k, j])).sum();
                prop_assert_eq!(prod, int(i64::from(i == j)));
            }
        }
    }

    #[test]
    fn sharp_and_flat_are_inverse(g in metric(4), v in prop::collection::vec(rational(), 4)) {
        let m = metric_inverse(&g).unwrap();
        let x = Tensor::vector(v.clone());
        let lowered = flat(&x, &m).unwrap();
        prop_assert_eq!(sharp(&lowered, &m).unwrap(), x);
        let form = Tensor::covector(v);
        prop_assert_eq!(flat(&sharp(&form, &m).unwrap(), &m).unwrap(), form);
    }

    #[test]
    fn covariant_derivative_is_linear(
        conn in connection(3),
        s in covariant2(3),
        t in covariant2(3),
        a in rational(),
        b in rational(),
    ) {
        let combo = s.scaled(&a).plus(&t.scaled(&b));
        let lhs = covariant_derivative(&combo, &conn).unwrap();
        let rhs = covariant_derivative(&s, &conn).unwrap().scaled(&a)
            .plus(&covariant_derivative(&t, &conn).unwrap().scaled(&b));
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn example_is_f4_prime_for_every_parameter(lambda in rational(), mu in rational()) {
        let inst = build_section5(&ExampleParams::new(lambda, mu));
        let (a, reports) = run_suites(&inst, Suite::All).unwrap();
        prop_assert_eq!(a.classification.label, ClassLabel::F4);
        prop_assert_eq!(&a.classification.theta_xi, &int(-4));
        prop_assert!(a.classification.f4_prime && a.classification.para_sasaki);
        let findings: BTreeMap<_, _> = recorded_findings().into_iter().map(|f| (f.id, f.entries)).collect();
        for r in &reports {
            match findings.get(r.id.as_str()) {
                Some(entries) => {
                    prop_assert_eq!(r.status, Status::Residual);
                    prop_assert_eq!(&r.components(), entries);
                }
                None => prop_assert!(r.holds(), "{} does not hold", r.id),
            }
        }
    }

    #[test]
    fn hard_invariants_hold_on_semidirect_products_3(inst in semidirect(1)) {
        assert_hard_invariants(&inst)?;
    }

    #[test]
    fn hard_invariants_hold_on_semidirect_products_5(inst in semidirect(2)) {
        assert_hard_invariants(&inst)?;
    }

    #[test]
    fn main_class_closed_forms_hold_under_xi_action(inst in xi_action(1)) {
        assert_structural_crosschecks(&inst)?;
    }

    #[test]
    fn main_class_closed_forms_hold_under_xi_action_5(inst in xi_action(2)) {
        assert_structural_crosschecks(&inst)?;
    }

    #[test]
    fn horizontal_scaling_is_f1(inst in horizontal_scaling(2)) {
        let (a, _) = run_suites(&inst, Suite::Core).unwrap();
        prop_assert_eq!(a.classification.label, ClassLabel::F1);
        assert_structural_crosschecks(&inst)?;
    }

    #[test]
    fn emitted_spec_parses_back(inst in semidirect(2), value in rational()) {
        let mut params = BTreeMap::new();
        params.insert("k".to_string(), value);
        let inst = inst.with_params(params);
        let parsed = parse_spec(&emit_spec(&inst), &BTreeMap::new()).unwrap();
        prop_assert_eq!(parsed, inst);
    }
}
