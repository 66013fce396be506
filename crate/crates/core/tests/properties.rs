use std::collections::BTreeSet;

use dilates::bounds::{self, Verdict};
use dilates::components::{
    decompose, marginal_set, marginal_split, stabilizer, ModulusPolicy,
};
use dilates::intset::{canonicalize, dilate, dilate_sum, minkowski_sum, sum_of_dilates};
use dilates::{DilateSpec, IntSet};
use proptest::prelude::*;

fn naive_sum(a: &IntSet, b: &IntSet) -> BTreeSet<i64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect()
}

fn small_set(max_len: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntSet> {
    prop::collection::btree_set(lo..=hi, 1..=max_len)
        .prop_map(|s| IntSet::new(s.into_iter().collect()).unwrap())
}

fn nonzero(bound: i64) -> impl Strategy<Value = i64> {
    (-bound..=bound).prop_filter("nonzero", |x| *x != 0)
}

proptest! {
    #[test]
    fn minkowski_matches_pairwise_oracle(a in small_set(12, -300, 300), b in small_set(12, -300, 300)) {
        let s = minkowski_sum(&a, &b).unwrap();
        let expected: Vec<i64> = naive_sum(&a, &b).into_iter().collect();
        prop_assert_eq!(s.as_slice(), expected.as_slice());
        prop_assert!(s.len() + 1 >= a.len() + b.len());
    }

    #[test]
    fn minkowski_wide_sets_match_oracle(a in small_set(6, -(1 << 40), 1 << 40), b in small_set(30, 0, 5000)) {
        let expected: Vec<i64> = naive_sum(&a, &b).into_iter().collect();
        let got = minkowski_sum(&a, &b).unwrap();
        prop_assert_eq!(got.as_slice(), expected.as_slice());
    }

    #[test]
    fn minkowski_commutes_and_associates(
        a in small_set(6, -50, 50),
        b in small_set(6, -50, 50),
        c in small_set(6, -50, 50),
    ) {
        prop_assert_eq!(minkowski_sum(&a, &b).unwrap(), minkowski_sum(&b, &a).unwrap());
        let left = minkowski_sum(&minkowski_sum(&a, &b).unwrap(), &c).unwrap();
        let right = minkowski_sum(&a, &minkowski_sum(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn dilate_preserves_size(a in small_set(10, -1000, 1000), r in nonzero(50)) {
        prop_assert_eq!(dilate(&a, r).unwrap().len(), a.len());
    }

    #[test]
    fn affine_transforms_preserve_two_dilate_sums(
        a in small_set(8, -40, 40),
        r in nonzero(9),
        s in nonzero(9),
        u in nonzero(9),
        v in -1000i64..=1000,
    ) {
        let base = sum_of_dilates(&a, &[r, s]).unwrap().len();
        let shifted = sum_of_dilates(&a.translate(v).unwrap(), &[r, s]).unwrap().len();
        let scaled = sum_of_dilates(&dilate(&a, u).unwrap(), &[r, s]).unwrap().len();
        prop_assert_eq!(base, shifted);
        prop_assert_eq!(base, scaled);
        let report = bounds::check_affine_invariance(&a, r, s, u, v).unwrap();
        prop_assert_eq!(report.verdict, Verdict::Holds);
    }

    #[test]
    fn canonicalize_is_idempotent_and_invertible(
        a in small_set(8, -500, 500),
        coeffs in prop::collection::btree_set(-7i64..=7, 1..=3),
    ) {
        let (canon, map) = canonicalize(&a).unwrap();
        prop_assert_eq!(canon.min_element(), 0);
        if canon.len() >= 2 {
            prop_assert_eq!(canon.gcd(), 1);
        }
        let (again, map2) = canonicalize(&canon).unwrap();
        prop_assert_eq!(&again, &canon);
        prop_assert!(map2.is_identity());
        prop_assert_eq!(map.invert(&canon).unwrap(), a.clone());

        let coeffs: Vec<i64> = coeffs.into_iter().filter(|m| *m != 0).collect();
        if let Ok(spec) = DilateSpec::new(coeffs) {
            prop_assert_eq!(
                dilate_sum(&canon, &spec).unwrap().len(),
                dilate_sum(&a, &spec).unwrap().len()
            );
        }
    }

    #[test]
    fn decomposition_partitions_the_set(a in small_set(15, -100, 100), n in 2i64..12) {
        let d = decompose(&a, n).unwrap();
        let mut union = Vec::new();
        for (r, c) in d.blocks() {
            prop_assert!(c.iter().all(|x| x.rem_euclid(n) == r));
            union.extend(c.iter());
        }
        union.sort_unstable();
        prop_assert_eq!(union.as_slice(), a.as_slice());
        prop_assert!(d.count() >= 1 && d.count() <= a.len().min(n as usize));
    }

    #[test]
    fn marginal_set_completes_own_sumset(a in small_set(10, -30, 30), k in prop::sample::select(vec![3i64, 5, 7])) {
        let d = decompose(&a, k).unwrap();
        for c in d.components() {
            let m = marginal_set(c, &a, k).unwrap();
            let own: BTreeSet<i64> = naive_sum(&dilate(c, 2).unwrap(), &dilate(c, k).unwrap());
            let big: BTreeSet<i64> = naive_sum(&dilate(c, 2).unwrap(), &dilate(&a, k).unwrap());
            prop_assert!(m.iter().all(|x| !own.contains(x)));
            let mut joined: BTreeSet<i64> = m.iter().copied().collect();
            joined.extend(own.iter().copied());
            prop_assert_eq!(&joined, &big);

            let split = marginal_split(c, &a, k).unwrap();
            let (lo, hi) = (*own.first().unwrap(), *own.last().unwrap());
            prop_assert!(split.low.iter().all(|x| *x < lo));
            prop_assert!(split.high.iter().all(|x| *x > hi));
            prop_assert!(split.interior.iter().all(|x| *x > lo && *x < hi));
            prop_assert_eq!(split.total(), m.len());
        }
    }

    #[test]
    fn marginal_total_lower_bound(a in small_set(10, -30, 30), k in prop::sample::select(vec![3i64, 5, 7])) {
        let r = bounds::bound_marginal_total(&a, k).unwrap();
        prop_assert_eq!(r.verdict, Verdict::Holds);
        let c = decompose(&a, k).unwrap().count() as i64;
        prop_assert_eq!(r.rhs, (c - 1) * c);
    }

    #[test]
    fn stabilizer_is_a_subgroup_dividing_sizes(
        m in 1i64..40,
        raw in prop::collection::btree_set(0i64..40, 1..12),
    ) {
        let x: Vec<i64> = raw.into_iter().map(|r| r % m).collect::<BTreeSet<_>>().into_iter().collect();
        let st = stabilizer(&x, m).unwrap();
        prop_assert!(st.contains(&0));
        prop_assert_eq!(x.len() % st.len(), 0);
        prop_assert_eq!(m as usize % st.len(), 0);
        for &s in &st {
            for &t in &st {
                prop_assert!(st.contains(&((s + t) % m)));
            }
        }
    }

    #[test]
    fn reports_respect_verdict_discipline(a in small_set(8, -20, 20), k in prop::sample::select(vec![3i64, 5, 7, 11])) {
        for r in bounds::check_suite(&a, k).unwrap() {
            prop_assert_eq!(r.slack, r.lhs - r.rhs);
            if !r.hypotheses_met {
                prop_assert_eq!(r.verdict, Verdict::NotApplicable);
            }
            prop_assert!(r.verdict != Verdict::Fails, "{:?}", r);
        }
    }
}

/// Components of `n·A + m·B` coming from different m-components of A are
/// disjoint when gcd(n, m) = 1.
#[test]
fn components_of_mixed_sums_are_disjoint() {
    let pairs = [(2i64, 3i64), (3, 2), (2, 5), (3, 4), (4, 3), (3, 5), (5, 7)];
    let universe: Vec<i64> = (0..9).collect();
    let subsets: Vec<IntSet> = (1u32..(1 << universe.len()))
        .filter(|mask| mask.count_ones() <= 4)
        .map(|mask| {
            let v = universe.iter().copied().filter(|i| mask >> i & 1 == 1).collect();
            IntSet::new(v).unwrap()
        })
        .collect();
    let bs = [IntSet::new(vec![0, 1]).unwrap(), IntSet::new(vec![0, 2, 3, 7]).unwrap()];
    for (n, m) in pairs {
        for a in &subsets {
            for b in &bs {
                let d = decompose(a, m).unwrap();
                let parts: Vec<BTreeSet<i64>> = d
                    .components()
                    .map(|c| naive_sum(&dilate(c, n).unwrap(), &dilate(b, m).unwrap()))
                    .collect();
                for i in 0..parts.len() {
                    for j in (i + 1)..parts.len() {
                        assert!(parts[i].is_disjoint(&parts[j]), "A={a} B={b} n={n} m={m}");
                    }
                }
                let union: BTreeSet<i64> = parts.iter().flatten().copied().collect();
                let whole = naive_sum(&dilate(a, n).unwrap(), &dilate(b, m).unwrap());
                assert_eq!(union, whole);
            }
        }
    }
}

#[test]
fn relaxed_modulus_policy_runs_outside_primes() {
    let a = IntSet::new(vec![0, 1, 2, 5, 6]).unwrap();
    for k in [4, 6, 8, 9] {
        let r = bounds::bound_marginal_total_with(&a, k, ModulusPolicy::Any).unwrap();
        assert!(r.hypotheses_met);
        assert!(bounds::bound_marginal_total(&a, k).is_err());
    }
}
