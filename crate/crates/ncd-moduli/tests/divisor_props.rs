mod support;

use ncd_moduli::divisor::{local_model, simple_crossings, CrossingPoset, DivisorError, Intersection};
use proptest::prelude::*;
use std::collections::BTreeSet;
use support::{pointed_subsets, subsets};

#[test]
fn local_model_counts_match_subset_enumeration() {
    for n in 1..=6 {
        let d = local_model(n);
        assert!(d.validate().is_empty());
        for k in 0..=n {
            let c = d.stratum_counts(k).unwrap();
            assert_eq!(c.resolution_of_vk, subsets(n, k), "n={n} k={k}");
            assert_eq!(c.double_resolution, pointed_subsets(n, k), "n={n} k={k}");
            let next = if k < n { pointed_subsets(n, k + 1) } else { 0 };
            assert_eq!(c.resolution_of_wk1, next, "n={n} k={k}");
        }
        assert!(matches!(d.stratum_counts(n + 1), Err(DivisorError::NoStrataAtDepth(_))));
    }
}

/// Downward-closed families of subsets of `{H0..H(n-1)}` with at least two
/// elements, drawn as random generating sets.
fn arb_poset() -> impl Strategy<Value = CrossingPoset> {
    (2usize..=4).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::btree_set(0..n, 2..=n), 0..4).prop_map(move |gens| {
            let mut family: BTreeSet<Vec<usize>> = BTreeSet::new();
            for g in gens {
                let g: Vec<usize> = g.into_iter().collect();
                for mask in 0u32..1 << g.len() {
                    let sub: Vec<usize> = (0..g.len()).filter(|i| mask >> i & 1 == 1).map(|i| g[i]).collect();
                    if sub.len() >= 2 {
                        family.insert(sub);
                    }
                }
            }
            let name = |i: usize| format!("H{i}");
            CrossingPoset {
                dim_x: 2 * n as u32,
                components: (0..n).map(name).collect(),
                intersections: family
                    .into_iter()
                    .map(|s| Intersection { components: s.into_iter().map(name).collect(), count: 1, id: None })
                    .collect(),
            }
        })
    })
}

proptest! {
    #[test]
    fn closed_posets_give_valid_divisors(poset in arb_poset()) {
        let d = simple_crossings(&poset).unwrap();
        prop_assert!(d.validate().is_empty(), "{:?}", d.validate());
        prop_assert_eq!(d.strata.len(), 1 + poset.components.len() + poset.intersections.len());
        for s in &d.strata {
            prop_assert_eq!(s.slots.len(), s.depth);
        }
    }

    #[test]
    fn dropping_a_face_breaks_closure(poset in arb_poset()) {
        let deep: Vec<usize> = (0..poset.intersections.len()).filter(|&i| poset.intersections[i].components.len() >= 3).collect();
        prop_assume!(!deep.is_empty());
        let top = &poset.intersections[deep[0]].components;
        let face: Vec<String> = top[1..].to_vec();
        let mut broken = poset.clone();
        broken.intersections.retain(|i| i.components != face);
        let err = simple_crossings(&broken).unwrap_err();
        prop_assert!(matches!(err, DivisorError::NotClosed { .. }), "{:?}", err);
    }
}
