use diamlab_core::catalog::{catalog, resolve_group};
use diamlab_core::gensets::{
    abelianization_rank, enumerate_minimal_gensets, is_generating, pgroup_rank, rank,
};
use diamlab_core::group::{
    closure, commutator_subgroup, derived_series, normal_subgroups, quotient, ElemId, FiniteGroup,
    Subgroup,
};
use diamlab_core::wordlen::{diameter, eval_word, length_table, shortest_word};
use proptest::prelude::*;

const NAMES: &[&str] = &[
    "Z6", "S3", "Q8", "D4", "Z4xZ2", "A4", "D5", "Z2xS3", "Z3xZ3", "Z2xQ8",
];

fn group(i: usize) -> FiniteGroup {
    resolve_group(NAMES[i % NAMES.len()]).unwrap()
}

fn subset(g: &FiniteGroup, raw: &[u32]) -> Vec<ElemId> {
    raw.iter().map(|r| r % g.order()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_ignores_inverses(gi in 0usize..10, raw in prop::collection::vec(any::<u32>(), 0..4)) {
        let g = group(gi);
        let s = subset(&g, &raw);
        let mut with_inv = s.clone();
        with_inv.extend(s.iter().map(|&x| g.inv(x)));
        prop_assert_eq!(closure(&g, &s), closure(&g, &with_inv));
    }

    #[test]
    fn shortest_words_evaluate(gi in 0usize..10, raw in prop::collection::vec(any::<u32>(), 1..4), symmetric: bool) {
        let g = group(gi);
        let s = subset(&g, &raw);
        let table = length_table(&g, &s, symmetric);
        let reach = closure(&g, &s);
        prop_assert_eq!(table.reached(), reach.order());
        for &x in reach.elements() {
            let w = shortest_word(&g, &table, x).unwrap();
            prop_assert_eq!(eval_word(&g, &s, &w).unwrap(), x);
            prop_assert_eq!(w.len() as u32, table.length(x).unwrap());
            prop_assert_eq!(w.is_positive(), !symmetric || w.is_positive());
        }
    }

    #[test]
    fn symmetric_never_longer(gi in 0usize..10, raw in prop::collection::vec(any::<u32>(), 1..4)) {
        let g = group(gi);
        let s = subset(&g, &raw);
        let pos = length_table(&g, &s, false);
        let sym = length_table(&g, &s, true);
        for x in g.elements() {
            prop_assert_eq!(pos.length(x).is_some(), sym.length(x).is_some());
            if let (Some(a), Some(b)) = (pos.length(x), sym.length(x)) {
                prop_assert!(b <= a);
            }
        }
    }

    #[test]
    fn more_generators_never_increase_lengths(gi in 0usize..10, raw in prop::collection::vec(any::<u32>(), 1..4), extra: u32) {
        let g = group(gi);
        let s = subset(&g, &raw);
        let mut t = s.clone();
        t.push(extra % g.order());
        for symmetric in [false, true] {
            let small = length_table(&g, &s, symmetric);
            let big = length_table(&g, &t, symmetric);
            for x in g.elements() {
                if let Some(a) = small.length(x) {
                    prop_assert!(big.length(x).unwrap() <= a);
                }
            }
        }
    }

    #[test]
    fn quotients_contract(gi in 0usize..10, raw in prop::collection::vec(any::<u32>(), 1..4)) {
        let g = group(gi);
        let s = subset(&g, &raw);
        prop_assume!(is_generating(&g, &s));
        for n in normal_subgroups(&g) {
            let q = quotient(&g, &n).unwrap();
            let images: Vec<ElemId> = s.iter().map(|&x| q.project(x)).collect();
            for symmetric in [false, true] {
                let dq = diameter(q.group(), &images, symmetric).unwrap();
                let dg = diameter(&g, &s, symmetric).unwrap();
                prop_assert!(dq <= dg);
            }
        }
    }
}

#[test]
fn power_derived_series_is_termwise() {
    for name in ["S3", "Q8", "D4", "A4", "D5", "Z2xS3"] {
        let g = resolve_group(name).unwrap();
        let base: Vec<usize> = derived_series(&g).orders();
        for n in 1..=3u32 {
            if (g.order() as u64).pow(n) > 4096 {
                break;
            }
            let p = FiniteGroup::direct_power(&g, n, 4096).unwrap();
            let expected: Vec<usize> = base.iter().map(|o| o.pow(n)).collect();
            assert_eq!(derived_series(&p).orders(), expected, "{name}^{n}");
        }
    }
}

#[test]
fn pgroup_minimal_gensets_share_size() {
    for name in ["Q8", "D4", "Z4xZ2", "Z2^3", "Z3xZ3", "Z9", "Z2xQ8", "Z4xZ4"] {
        let g = resolve_group(name).unwrap();
        let d = pgroup_rank(&g).unwrap();
        let cap = g.order().ilog2();
        let sizes: std::collections::BTreeSet<usize> = enumerate_minimal_gensets(&g, cap)
            .map(|s| s.len())
            .collect();
        assert_eq!(
            sizes.into_iter().collect::<Vec<_>>(),
            vec![d as usize],
            "{name}"
        );
        assert_eq!(rank(&g), d);
    }
}

#[test]
fn abelianization_rank_is_at_most_rank() {
    for entry in catalog().iter().filter(|e| e.expected.order <= 24) {
        let g = entry.build().unwrap();
        assert!(
            abelianization_rank(&g).unwrap() <= rank(&g),
            "{}",
            entry.name
        );
        let derived = commutator_subgroup(&g, &Subgroup::whole(&g));
        assert_eq!(derived.is_trivial(), g.is_abelian());
    }
}
