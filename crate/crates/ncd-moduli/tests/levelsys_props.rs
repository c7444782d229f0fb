mod support;

use ncd_moduli::exactnum::{rational_nullspace, ExactNonzeroComplex, Rational};
use ncd_moduli::fixtures::{fixture, names};
use ncd_moduli::levelsys::{
    beta_relations, build_system, feasible_positive, solve_gluing, torus_dim, GluingDirection, GluingNode, GluingProblem,
    LevelEquation, LevelSystem,
};
use num_bigint::BigUint;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use support::{parts, power_candidates, rank_oracle, small_coeff};

fn rows(m: &ncd_moduli::exactnum::RationalMatrix) -> Vec<Vec<Rational>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

/// `nullity(A) − nullity(A restricted to the α columns)`.
fn torus_oracle(sys: &LevelSystem) -> usize {
    let a = rows(&sys.matrix());
    let n = sys.unknown_count();
    let na = sys.alpha_count();
    let alpha_only: Vec<Vec<Rational>> = a.iter().map(|r| r[..na].to_vec()).collect();
    (n - rank_oracle(&a, n)) - (na - rank_oracle(&alpha_only, na))
}

fn check_relations(sys: &LevelSystem) {
    let t = torus_dim(sys);
    assert_eq!(t, torus_oracle(sys));
    let rel = beta_relations(sys);
    assert_eq!(rel.len(), sys.beta_count() - t);
    let off = sys.alpha_count();
    for v in rational_nullspace(&sys.matrix()) {
        for r in &rel {
            let total: Rational = sys.betas().iter().enumerate().map(|(k, &(g, l))| r.coefficient(g, l) * &v[off + k]).sum();
            assert!(total.is_zero());
        }
    }
}

#[test]
fn fixture_systems() {
    for name in names() {
        let mt = fixture(name).unwrap();
        let sys = build_system(&mt).unwrap();
        check_relations(&sys);
        let w = feasible_positive(&sys).unwrap_or_else(|| panic!("{name} infeasible"));
        assert!(w.values.iter().all(|x| x.is_positive()));
        let a = sys.matrix();
        for scale in [Rational::new(3.into(), 2.into()), Rational::from_integer(7.into())] {
            let v: Vec<Rational> = w.values.iter().map(|x| x * &scale).collect();
            assert!(a.mul_vec(&v).iter().all(Zero::is_zero), "{name}");
        }
    }
}

#[test]
fn log_form_matches_level_system_without_trivial_components() {
    let mut cases: Vec<String> = (1..=4).map(|k| format!("rescaled-disk-{k}")).collect();
    cases.push("ex4dim-b".into());
    for name in cases {
        let mt = fixture(&name).unwrap();
        assert!(mt.components.iter().all(|c| !c.trivial));
        let mut a = rows(&build_system(&mt).unwrap().matrix());
        let mut b = rows(&GluingProblem::from_map_type(&mt).unwrap().log_matrix());
        a.sort();
        b.sort();
        assert_eq!(a, b, "{name}");
    }
}

fn arb_system() -> impl Strategy<Value = LevelSystem> {
    (1usize..=4, 1u32..=3).prop_flat_map(|(n, m)| {
        proptest::collection::vec((proptest::collection::btree_set(0..n, 1..=n), 1u32..=4, 1..=m), 1..=6).prop_map(
            move |eqs| {
                let equations = eqs
                    .into_iter()
                    .map(|(nodes, s, level)| LevelEquation {
                        base: "x".into(),
                        direction: 0,
                        s,
                        nodes: nodes.into_iter().collect(),
                        group: 0,
                        level,
                    })
                    .collect();
                LevelSystem::new((0..n).map(|i| format!("z{i}")).collect(), vec![m], equations)
            },
        )
    })
}

fn one_node(dirs: Vec<GluingDirection>) -> GluingProblem {
    GluingProblem { levels: 1, nodes: vec![GluingNode { name: "x".into(), directions: dirs }] }
}

proptest! {
    #[test]
    fn random_systems(sys in arb_system()) {
        check_relations(&sys);
        if let Some(w) = feasible_positive(&sys) {
            prop_assert!(w.values.iter().all(|x| x.is_positive()));
            prop_assert!(sys.matrix().mul_vec(&w.values).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn one_direction_has_s_solutions(s in 1u32..=8, p in small_coeff(), lambda in small_coeff()) {
        let gp = one_node(vec![GluingDirection { s, p, l_minus: 1, l_plus: 1 }]);
        let sol = solve_gluing(&gp, &[lambda]).unwrap();
        prop_assert_eq!(sol.total(), BigUint::from(s));
        prop_assert_eq!(sol.nodes[0].solutions.len(), s as usize);
    }
}

/// Right-hand sides `μ₀^{s_i}·ζ_i` with `ζ_i` of order dividing 6, so
/// every solution has argument denominator at most 24.
fn arb_two_direction() -> impl Strategy<Value = (u32, u32, ExactNonzeroComplex, i64, i64, bool)> {
    (1u32..=4, 1u32..=4, small_coeff(), 0i64..6, 0i64..6, any::<bool>())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, ..ProptestConfig::default() })]

    #[test]
    fn two_directions_match_root_enumeration((s1, s2, mu, j1, j2, shared) in arb_two_direction()) {
        let lambda = ExactNonzeroComplex::prime(11).unwrap();
        let zeta = |j: i64| ExactNonzeroComplex::unit_root(Rational::new(j.into(), 6.into()));
        let base = ExactNonzeroComplex::from_parts(mu.magnitude().iter().map(|(p, e)| (*p, e.clone())), Rational::zero()).unwrap();
        let mu = if shared { mu } else { base };
        let r1 = mu.pow_int(s1 as i64).mul(&zeta(j1));
        let r2 = mu.pow_int(s2 as i64).mul(&zeta(j2));
        let dir = |s: u32, r: &ExactNonzeroComplex| GluingDirection { s, p: lambda.div(r), l_minus: 1, l_plus: 1 };
        let gp = one_node(vec![dir(s1, &r1), dir(s2, &r2)]);
        let sol = solve_gluing(&gp, &[lambda.clone()]).unwrap();
        let want = power_candidates(&[(s1, parts(&r1)), (s2, parts(&r2))], 24).len();
        prop_assert_eq!(sol.total(), BigUint::from(want));
        prop_assert_eq!(sol.consistent(), want > 0);
    }
}

#[test]
fn every_small_pair_of_orders() {
    let lambda = ExactNonzeroComplex::one();
    for s1 in 1..=4u32 {
        for s2 in 1..=4u32 {
            for j in 0..6 {
                let r1 = ExactNonzeroComplex::prime(2).unwrap().pow_int(s1 as i64);
                let r2 = ExactNonzeroComplex::prime(2).unwrap().pow_int(s2 as i64).mul(&ExactNonzeroComplex::unit_root(Rational::new(j.into(), 6.into())));
                let dir = |s: u32, r: &ExactNonzeroComplex| GluingDirection { s, p: r.inv(), l_minus: 1, l_plus: 1 };
                let gp = one_node(vec![dir(s1, &r1), dir(s2, &r2)]);
                let sol = solve_gluing(&gp, &[lambda.clone()]).unwrap();
                let want = power_candidates(&[(s1, parts(&r1)), (s2, parts(&r2))], 24).len();
                assert_eq!(sol.total(), BigUint::from(want), "s=({s1},{s2}) j={j}");
            }
        }
    }
}
