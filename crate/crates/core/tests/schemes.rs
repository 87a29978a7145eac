use std::collections::BTreeSet;

use eulerflow_core::scheme::sides::SideSpace;
use eulerflow_core::scheme::{enumerate_schemes, partitions_of, Label};
use eulerflow_core::DemandId;
use proptest::prelude::*;

/// Labelings of `0..r` by A, B, C, D that read A* B* C* D* from some start.
fn brute_partitions(r: u32) -> BTreeSet<Vec<Label>> {
    let mut out = BTreeSet::new();
    for code in 0..4u32.pow(r) {
        let labels: Vec<Label> = (0..r).map(|i| Label::ALL[((code >> (2 * i)) & 3) as usize]).collect();
        let sorted_from = |s: u32| (0..r - 1).all(|i| labels[((s + i) % r) as usize] <= labels[((s + i + 1) % r) as usize]);
        if (0..r).any(sorted_from) {
            out.insert(labels);
        }
    }
    out
}

#[test]
fn partitions_match_brute_force_set() {
    for r in 1..=5 {
        let ours: Vec<Vec<Label>> = partitions_of(r).iter().map(|p| p.labels()).collect();
        let set: BTreeSet<Vec<Label>> = ours.iter().cloned().collect();
        assert_eq!(set.len(), ours.len(), "duplicates for r = {r}");
        assert_eq!(set, brute_partitions(r), "r = {r}");
    }
}

fn request_vectors(k: usize, max_r: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out.into_iter().flat_map(|v| (1..=max_r).map(move |r| [v.clone(), vec![r]].concat())).collect();
    }
    out
}

#[test]
fn counts_respect_the_bound() {
    let sizes: Vec<u128> = (0..=4).map(|r| if r == 0 { 0 } else { brute_partitions(r).len() as u128 }).collect();
    for k in 1..=3 {
        for req in request_vectors(k, 4) {
            let space = enumerate_schemes(&req);
            let expected: u128 =
                (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).map(|(a, b)| sizes[req[a] as usize] * sizes[req[b] as usize]).product();
            assert_eq!(space.count(), Some(expected), "{req:?}");
            let big_r = *req.iter().max().unwrap() as u128 + 1;
            let bound = big_r.pow(4 * k as u32 * (k as u32 - 1));
            assert!(expected <= bound, "{req:?}: {expected} > {bound}");
        }
    }
}

#[test]
fn count_grows_polynomially_in_r() {
    for k in 2..=3u32 {
        let count = |r: u32| enumerate_schemes(&vec![r; k as usize]).count().unwrap() as f64;
        let slope = (count(16) / count(8)).ln() / 2f64.ln();
        assert!(slope <= (4 * k * (k - 1)) as f64, "k = {k}: slope {slope}");
    }
}

#[test]
fn iteration_is_duplicate_free() {
    let space = enumerate_schemes(&[2, 1, 2]);
    let all: Vec<_> = space.iter().collect();
    assert_eq!(all.len() as u128, space.count().unwrap());
    let set: BTreeSet<Vec<u32>> = all.iter().map(|s| s.digits.clone()).collect();
    assert_eq!(set.len(), all.len());
}

fn side_case() -> impl Strategy<Value = (Vec<u32>, Vec<u32>, (u32, u32, u32, u32))> {
    proptest::collection::vec(1u32..=3, 2..=3).prop_flat_map(|req| {
        let space = SideSpace::new(&req);
        let values: Vec<_> = (0..space.component_count()).map(|c| 0..space.radix(c)).collect();
        let k = req.len() as u32;
        let meeting = (0..k, 0..k - 1).prop_flat_map({
            let req = req.clone();
            move |(a, b)| {
                let b = if b >= a { b + 1 } else { b };
                (Just(a), 0..req[a as usize], Just(b), 0..req[b as usize])
            }
        });
        (Just(req), values, meeting)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Narrowing by an observed outcome keeps exactly the values that, put in
    /// place of one component, still produce that outcome.
    #[test]
    fn narrowing_keeps_exactly_the_consistent_values((req, values, (a, i, b, j)) in side_case()) {
        let space = SideSpace::new(&req);
        let (a, b) = (DemandId(a), DemandId(b));
        let outcome = space.lookup(&values, a, i, b, j);
        prop_assert_eq!(space.lookup(&values, b, j, a, i), outcome.swapped());
        let mut cands: Vec<Vec<u32>> = (0..space.component_count()).map(|c| (0..space.radix(c)).collect()).collect();
        prop_assert!(space.narrow(&mut cands, a, i, b, j, outcome).is_some());
        for (c, kept) in cands.iter().enumerate() {
            for v in 0..space.radix(c) {
                let mut w = values.clone();
                w[c] = v;
                prop_assert_eq!(kept.contains(&v), space.lookup(&w, a, i, b, j) == outcome, "component {}", c);
            }
        }
    }
}
