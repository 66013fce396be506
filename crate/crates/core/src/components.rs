//! Congruence-class structure: n-components, fullness, marginal sets and
//! translation stabilizers in `Z/mZ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intset::{dilate, minkowski_sum, IntSet};

/// Euclidean residue in `[0, n)`, also for negative `x`.
pub fn residue(x: i64, n: i64) -> i64 {
    x.rem_euclid(n)
}

fn check_modulus(n: i64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidModulus {
            modulus: n,
            reason: "modulus must be at least 2",
        });
    }
    Ok(())
}

/// Trial division.
pub fn is_odd_prime(k: i64) -> bool {
    if k < 3 || k % 2 == 0 {
        return false;
    }
    let mut d = 3i64;
    while d <= k / d {
        if k % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn require_odd_prime(k: i64) -> Result<()> {
    if is_odd_prime(k) {
        Ok(())
    } else {
        Err(Error::NotOddPrime(k))
    }
}

/// Which moduli the marginal-set machinery accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusPolicy {
    /// Only odd primes, as the marginal-set statements assume.
    #[default]
    OddPrime,
    /// Any modulus `>= 2`; for experiments outside the stated hypotheses.
    Any,
}

impl ModulusPolicy {
    pub fn check(self, k: i64) -> Result<()> {
        match self {
            ModulusPolicy::OddPrime => require_odd_prime(k),
            ModulusPolicy::Any => check_modulus(k),
        }
    }
}

/// Partition of a set into its n-components, keyed by residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    modulus: i64,
    blocks: BTreeMap<i64, IntSet>,
}

impl Decomposition {
    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    /// `c_n(A)`.
    pub fn count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, residue: i64) -> Option<&IntSet> {
        self.blocks.get(&residue)
    }

    /// `(residue, component)` pairs in ascending residue order.
    pub fn blocks(&self) -> impl Iterator<Item = (i64, &IntSet)> + '_ {
        self.blocks.iter().map(|(r, c)| (*r, c))
    }

    pub fn components(&self) -> impl Iterator<Item = &IntSet> + '_ {
        self.blocks.values()
    }

    pub fn is_full(&self) -> bool {
        self.count() as i64 == self.modulus
    }

    fn satisfies_invariants(&self, source: &IntSet) -> bool {
        let mut total = 0;
        for (r, c) in &self.blocks {
            if !(0..self.modulus).contains(r) || c.iter().any(|x| residue(x, self.modulus) != *r) {
                return false;
            }
            if c.iter().any(|x| !source.contains(x)) {
                return false;
            }
            total += c.len();
        }
        total == source.len()
            && self.count() >= 1
            && self.count() <= source.len().min(self.modulus as usize)
    }
}

/// Splits `a` into its n-components.
pub fn decompose(a: &IntSet, n: i64) -> Result<Decomposition> {
    check_modulus(n)?;
    let mut buckets: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for x in a.iter() {
        buckets.entry(residue(x, n)).or_default().push(x);
    }
    let blocks = buckets
        .into_iter()
        .map(|(r, v)| (r, IntSet::from_sorted_unchecked(v)))
        .collect();
    let d = Decomposition { modulus: n, blocks };
    debug_assert!(d.satisfies_invariants(a));
    Ok(d)
}

/// `c_n(A)`: the number of residues mod `n` that `a` meets.
pub fn component_count(a: &IntSet, n: i64) -> Result<usize> {
    check_modulus(n)?;
    let mut residues: Vec<i64> = a.iter().map(|x| residue(x, n)).collect();
    residues.sort_unstable();
    residues.dedup();
    Ok(residues.len())
}

/// `c_n(a) = n`.
pub fn is_full(a: &IntSet, n: i64) -> Result<bool> {
    Ok(component_count(a, n)? as i64 == n)
}

/// Every n-component `C` of `a` meets exactly `n` classes mod `n²`.
pub fn is_semi_full(a: &IntSet, n: i64) -> Result<bool> {
    check_modulus(n)?;
    let square = n.checked_mul(n).ok_or(Error::Overflow("n squared"))?;
    let d = decompose(a, n)?;
    for c in d.components() {
        if component_count(c, square)? as i64 != n {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `c_{n²}(c)` for a single component.
pub fn square_class_count(c: &IntSet, n: i64) -> Result<usize> {
    check_modulus(n)?;
    let square = n.checked_mul(n).ok_or(Error::Overflow("n squared"))?;
    component_count(c, square)
}

fn require_component(c: &IntSet, a: &IntSet, k: i64) -> Result<()> {
    let r = residue(c.min_element(), k);
    let d = decompose(a, k)?;
    match d.block(r) {
        Some(block) if block == c => Ok(()),
        _ => Err(Error::NotAComponent { modulus: k }),
    }
}

/// Sorted difference `big \ small` of two sorted slices.
fn sorted_difference(big: &[i64], small: &[i64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(big.len().saturating_sub(small.len()));
    let mut j = 0;
    for &x in big {
        while j < small.len() && small[j] < x {
            j += 1;
        }
        if j < small.len() && small[j] == x {
            continue;
        }
        out.push(x);
    }
    out
}

/// `M_C = (2·c + k·a) \ (2·c + k·c)` for a k-component `c` of `a`, with `k` an odd prime.
pub fn marginal_set(c: &IntSet, a: &IntSet, k: i64) -> Result<Vec<i64>> {
    marginal_set_with(c, a, k, ModulusPolicy::OddPrime)
}

pub fn marginal_set_with(c: &IntSet, a: &IntSet, k: i64, policy: ModulusPolicy) -> Result<Vec<i64>> {
    let (_, marginal) = marginal_parts(c, a, k, policy)?;
    Ok(marginal)
}

/// Returns `2·c + k·c` alongside the marginal set.
fn marginal_parts(c: &IntSet, a: &IntSet, k: i64, policy: ModulusPolicy) -> Result<(IntSet, Vec<i64>)> {
    policy.check(k)?;
    require_component(c, a, k)?;
    let own = sum_of_dilates_pair(c, c, k)?;
    let big = sum_of_dilates_pair(c, a, k)?;
    let marginal = sorted_difference(big.as_slice(), own.as_slice());
    Ok((own, marginal))
}

/// `2·x + k·y`.
fn sum_of_dilates_pair(x: &IntSet, y: &IntSet, k: i64) -> Result<IntSet> {
    minkowski_sum(&dilate(x, 2)?, &dilate(y, k)?)
}

/// `M_C` split by position relative to `2·C + k·C`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MarginalSplit {
    /// Below `min(2·C + k·C)`.
    pub low: Vec<i64>,
    /// Between the extremes of `2·C + k·C`.
    pub interior: Vec<i64>,
    /// Above `max(2·C + k·C)`.
    pub high: Vec<i64>,
}

impl MarginalSplit {
    pub fn total(&self) -> usize {
        self.low.len() + self.interior.len() + self.high.len()
    }
}

pub fn marginal_split(c: &IntSet, a: &IntSet, k: i64) -> Result<MarginalSplit> {
    marginal_split_with(c, a, k, ModulusPolicy::OddPrime)
}

pub fn marginal_split_with(
    c: &IntSet,
    a: &IntSet,
    k: i64,
    policy: ModulusPolicy,
) -> Result<MarginalSplit> {
    let (own, marginal) = marginal_parts(c, a, k, policy)?;
    let (lo, hi) = (own.min_element(), own.max_element());
    let mut split = MarginalSplit::default();
    for x in marginal {
        if x < lo {
            split.low.push(x);
        } else if x > hi {
            split.high.push(x);
        } else {
            split.interior.push(x);
        }
    }
    Ok(split)
}

/// Translations of `Z/mZ` fixing the residue set `x`.
pub fn stabilizer(x: &[i64], m: i64) -> Result<Vec<i64>> {
    if m < 1 {
        return Err(Error::InvalidModulus {
            modulus: m,
            reason: "modulus must be positive",
        });
    }
    if let Some(&bad) = x.iter().find(|&&r| !(0..m).contains(&r)) {
        return Err(Error::InvalidResidue { residue: bad, modulus: m });
    }
    let mut set = x.to_vec();
    set.sort_unstable();
    set.dedup();
    let Some(&anchor) = set.first() else {
        return Err(Error::EmptySet);
    };

    // Any stabilizing t sends the anchor into the set, so t = y - anchor.
    let mut out: Vec<i64> = set
        .iter()
        .map(|&y| residue(y - anchor, m))
        .filter(|&t| {
            set.iter()
                .all(|&r| set.binary_search(&((r + t) % m)).is_ok())
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> IntSet {
        IntSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&set(&[0, 1, 2]), 3).unwrap();
        assert_eq!(d.count(), 3);
        assert_eq!(d.block(0), Some(&set(&[0])));
        assert_eq!(d.block(1), Some(&set(&[1])));
        assert_eq!(d.block(2), Some(&set(&[2])));

        let d = decompose(&set(&[0, 3, 6]), 3).unwrap();
        assert_eq!(d.count(), 1);
        assert_eq!(d.block(0), Some(&set(&[0, 3, 6])));

        let d = decompose(&set(&[0, 1, 3]), 2).unwrap();
        assert_eq!(d.count(), 2);
        assert_eq!(d.block(0), Some(&set(&[0])));
        assert_eq!(d.block(1), Some(&set(&[1, 3])));
    }

    #[test]
    fn negative_elements_use_euclidean_residues() {
        let d = decompose(&set(&[-4, -1, 2, 5]), 3).unwrap();
        assert_eq!(d.count(), 1);
        assert_eq!(d.block(2), Some(&set(&[-4, -1, 2, 5])));
    }

    #[test]
    fn invalid_modulus() {
        assert!(matches!(
            decompose(&set(&[0]), 1),
            Err(Error::InvalidModulus { modulus: 1, .. })
        ));
        assert!(is_full(&set(&[0]), 0).is_err());
    }

    #[test]
    fn fullness_examples() {
        assert!(is_full(&set(&[0, 1, 2]), 3).unwrap());
        assert!(!is_full(&set(&[0, 3, 6]), 3).unwrap());
        assert!(is_full(&set(&[0, 1, 3]), 2).unwrap());

        assert!(is_semi_full(&set(&[0, 3, 6]), 3).unwrap());
        assert!(!is_semi_full(&set(&[0, 1, 2]), 3).unwrap());
        assert!(!is_semi_full(&set(&[0, 9, 18]), 3).unwrap());
    }

    #[test]
    fn odd_primes() {
        let primes: Vec<i64> = (-5..40).filter(|&k| is_odd_prime(k)).collect();
        assert_eq!(primes, vec![3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
    }

    #[test]
    fn marginal_set_examples() {
        let a = set(&[0, 1, 2]);
        assert_eq!(marginal_set(&set(&[0]), &a, 3).unwrap(), vec![3, 6]);
        assert_eq!(marginal_set(&set(&[1]), &a, 3).unwrap(), vec![2, 8]);
        let b = set(&[0, 3, 6]);
        assert!(marginal_set(&b, &b, 3).unwrap().is_empty());
    }

    #[test]
    fn marginal_set_rejects_non_components() {
        let a = set(&[0, 1, 3]);
        // {0} is only part of the 0-class {0, 3}.
        assert_eq!(
            marginal_set(&set(&[0]), &a, 3),
            Err(Error::NotAComponent { modulus: 3 })
        );
        assert_eq!(marginal_set(&set(&[0]), &a, 4), Err(Error::NotOddPrime(4)));
        assert_eq!(marginal_set(&set(&[0]), &set(&[0, 1]), 9), Err(Error::NotOddPrime(9)));
        assert!(marginal_set_with(&set(&[0]), &set(&[0, 1]), 4, ModulusPolicy::Any).is_ok());
    }

    #[test]
    fn marginal_split_examples() {
        let a = set(&[0, 1, 2]);
        let s = marginal_split(&set(&[0]), &a, 3).unwrap();
        assert_eq!(s, MarginalSplit { low: vec![], interior: vec![], high: vec![3, 6] });
        let s = marginal_split(&set(&[1]), &a, 3).unwrap();
        assert_eq!(s, MarginalSplit { low: vec![2], interior: vec![], high: vec![8] });
        let s = marginal_split(&set(&[2]), &a, 3).unwrap();
        assert_eq!(s, MarginalSplit { low: vec![4, 7], interior: vec![], high: vec![] });
    }

    #[test]
    fn marginal_split_keeps_interior_points() {
        // C = {0, 9}: 2C + 3C = {0, 18, 27, 45}; 2C + 3·{1} adds 3 and 21.
        let a = set(&[0, 1, 9]);
        let s = marginal_split(&set(&[0, 9]), &a, 3).unwrap();
        assert_eq!(s.interior, vec![3, 21]);
        assert!(s.low.is_empty() && s.high.is_empty());
        assert_eq!(s.total(), marginal_set(&set(&[0, 9]), &a, 3).unwrap().len());
    }

    #[test]
    fn stabilizer_examples() {
        assert_eq!(stabilizer(&[0, 3, 6], 9).unwrap(), vec![0, 3, 6]);
        assert_eq!(stabilizer(&[0, 1], 9).unwrap(), vec![0]);
        let all: Vec<i64> = (0..9).collect();
        assert_eq!(stabilizer(&all, 9).unwrap(), all);
        assert_eq!(
            stabilizer(&[0, 9], 9),
            Err(Error::InvalidResidue { residue: 9, modulus: 9 })
        );
        assert_eq!(stabilizer(&[], 9), Err(Error::EmptySet));
    }
}
