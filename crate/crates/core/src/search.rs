//! Exhaustive minimization of `|Σ m·A|` over canonical sets `A ⊆ [0, R]`.
//!
//! Sizes of dilate sums are invariant under translation, positive and
//! negative scaling, so it suffices to search sets with minimum 0 and gcd 1,
//! optionally keeping only the lexicographically smaller of `A` and its
//! reflection.
//!
//! The pruned search is a depth-first branch and bound. Work is split into
//! independent tasks keyed by the first two elements after 0, and each task
//! prunes against its own incumbent, seeded with the value of the
//! progression `{0, ..., n-1}`. Results, including the node counters, are
//! therefore the same for every thread count.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::components::component_count;
use crate::error::{Error, Result};
use crate::intset::{dilate_sum, DilateSpec, IntSet};

pub const DEFAULT_WITNESS_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub spec: DilateSpec,
    pub cardinality: usize,
    pub range_max: i64,
    pub reflection_quotient: bool,
    pub pruning: bool,
    /// Prune leaves whose component-count lower bound already exceeds the
    /// incumbent. Only used for two coprime coefficients, both at least 2.
    pub component_pruning: bool,
    pub parallel_width: usize,
    pub witness_cap: usize,
}

impl SearchConfig {
    pub fn new(spec: DilateSpec, cardinality: usize, range_max: i64) -> Self {
        SearchConfig {
            spec,
            cardinality,
            range_max,
            reflection_quotient: true,
            pruning: true,
            component_pruning: false,
            parallel_width: 1,
            witness_cap: DEFAULT_WITNESS_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.require_coprime()?;
        if self.cardinality == 0 {
            return Err(Error::InvalidConfig("cardinality must be at least 1".into()));
        }
        if self.range_max < 0 || (self.cardinality - 1) as u128 > self.range_max as u128 {
            return Err(Error::InvalidConfig(format!(
                "range {} cannot hold {} elements starting at 0",
                self.range_max, self.cardinality
            )));
        }
        if self.parallel_width == 0 {
            return Err(Error::InvalidConfig("thread count must be at least 1".into()));
        }
        if self.witness_cap == 0 {
            return Err(Error::InvalidConfig("witness cap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub minimum: usize,
    /// Lexicographically smallest witnesses, at most `witness_cap` of them.
    pub witnesses: Vec<IntSet>,
    /// Exact number of sets in the family attaining the minimum.
    pub witness_count: u64,
    pub nodes_visited: u64,
    pub nodes_pruned: u64,
    pub range_max: i64,
    /// Some retained witness has `max == range_max`, so a larger range might
    /// lower the minimum.
    pub touches_range: bool,
}

/// Sets `A ⊆ [0, range_max]` with `|A| = cardinality`, `min A = 0` and
/// `gcd A = 1`, in ascending lexicographic order.
pub fn enumerate_canonical(
    cardinality: usize,
    range_max: i64,
    reflection_quotient: bool,
) -> Result<impl Iterator<Item = IntSet>> {
    if cardinality == 0 || range_max < 0 || (cardinality - 1) as u128 > range_max as u128 {
        return Err(Error::InvalidConfig(format!(
            "no {cardinality}-subsets of [0, {range_max}] contain 0"
        )));
    }
    let iter = (1..=range_max)
        .combinations(cardinality - 1)
        .map(|rest| {
            let mut v = Vec::with_capacity(rest.len() + 1);
            v.push(0);
            v.extend(rest);
            IntSet::from_sorted_unchecked(v)
        })
        .filter(move |a| is_canonical(a.as_slice(), reflection_quotient));
    Ok(iter)
}

/// `a` is sorted with `a[0] == 0`.
fn is_canonical(a: &[i64], reflection_quotient: bool) -> bool {
    if a.len() == 1 {
        return true;
    }
    let g = a.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
    if g != 1 {
        return false;
    }
    !reflection_quotient || !reflection_is_smaller(a)
}

fn reflection_is_smaller(a: &[i64]) -> bool {
    let top = a[a.len() - 1];
    let reflected = a.iter().rev().map(|x| top - x);
    reflected.cmp(a.iter().copied()) == std::cmp::Ordering::Less
}

/// Running minimum with its witnesses. `merge` is associative and
/// commutative, so any reduction order gives the same value.
#[derive(Debug, Clone, Default)]
struct Best {
    minimum: Option<usize>,
    witnesses: Vec<IntSet>,
    count: u64,
    visited: u64,
    pruned: u64,
}

impl Best {
    fn record(&mut self, value: usize, set: &[i64], cap: usize) {
        match self.minimum {
            Some(m) if value > m => return,
            Some(m) if value == m => {}
            _ => {
                self.minimum = Some(value);
                self.witnesses.clear();
                self.count = 0;
            }
        }
        self.count += 1;
        if self.witnesses.len() < cap {
            self.witnesses.push(IntSet::from_sorted_unchecked(set.to_vec()));
        } else if let Some(last) = self.witnesses.last() {
            // Keep the smallest `cap` witnesses whatever the visiting order.
            if set < last.as_slice() {
                self.witnesses.pop();
                self.witnesses.push(IntSet::from_sorted_unchecked(set.to_vec()));
            }
        }
        self.witnesses.sort_unstable();
    }

    fn merge(mut self, other: Best, cap: usize) -> Best {
        self.visited += other.visited;
        self.pruned += other.pruned;
        match (self.minimum, other.minimum) {
            (_, None) => {}
            (None, Some(_)) => {
                self.minimum = other.minimum;
                self.witnesses = other.witnesses;
                self.count = other.count;
            }
            (Some(a), Some(b)) if b < a => {
                self.minimum = other.minimum;
                self.witnesses = other.witnesses;
                self.count = other.count;
            }
            (Some(a), Some(b)) if a == b => {
                self.count += other.count;
                self.witnesses.extend(other.witnesses);
                self.witnesses.sort_unstable();
                self.witnesses.dedup();
                self.witnesses.truncate(cap);
            }
            _ => {}
        }
        self
    }
}

/// Exact minimum of `|Σ m·A|` over the canonical family of `config`.
pub fn min_dilate_sum(config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let best = if config.pruning {
        pruned_search(config)?
    } else {
        exhaustive_search(config)?
    };
    let minimum = best
        .minimum
        .ok_or_else(|| Error::InvalidConfig("canonical family is empty".into()))?;
    let touches_range = best.witnesses.iter().any(|w| w.max_element() == config.range_max);
    Ok(SearchResult {
        minimum,
        witnesses: best.witnesses,
        witness_count: best.count,
        nodes_visited: best.visited,
        nodes_pruned: best.pruned,
        range_max: config.range_max,
        touches_range,
    })
}

/// Evaluates every member of the canonical family; the reference path for
/// the pruned search.
fn exhaustive_search(config: &SearchConfig) -> Result<Best> {
    let cap = config.witness_cap;
    let family = enumerate_canonical(config.cardinality, config.range_max, config.reflection_quotient)?;
    let eval = |a: IntSet| -> Result<Best> {
        let mut b = Best { visited: 1, ..Best::default() };
        let value = dilate_sum(&a, &config.spec)?.len();
        b.record(value, a.as_slice(), cap);
        Ok(b)
    };
    let reduce = |x: Result<Best>, y: Result<Best>| Ok(x?.merge(y?, cap));

    #[cfg(feature = "parallel")]
    if config.parallel_width > 1 {
        use rayon::prelude::*;
        let pool = thread_pool(config.parallel_width)?;
        return pool.install(|| {
            family
                .par_bridge()
                .map(eval)
                .reduce(|| Ok(Best::default()), reduce)
        });
    }

    family.map(eval).fold(Ok(Best::default()), reduce)
}

#[cfg(feature = "parallel")]
fn thread_pool(width: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(width)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

/// Task prefixes: `[0]`, `[0, a]` or `[0, a, b]` depending on cardinality.
fn task_prefixes(n: usize, range_max: i64) -> Vec<Vec<i64>> {
    // Largest value allowed at position `idx` with room left for the rest.
    let room = |idx: usize| range_max - (n - 1 - idx) as i64;
    match n {
        1 => vec![vec![0]],
        2 => (1..=room(1)).map(|a| vec![0, a]).collect(),
        _ => (1..=room(1))
            .flat_map(|a| ((a + 1)..=room(2)).map(move |b| vec![0, a, b]))
            .collect(),
    }
}

struct Searcher<'a> {
    config: &'a SearchConfig,
    /// Coefficients `(n, m)` when the component-count bound applies.
    component_pair: Option<(i64, i64)>,
}

impl Searcher<'_> {
    fn value(&self, prefix: &[i64]) -> Result<usize> {
        Ok(dilate_sum(&IntSet::from_sorted_unchecked(prefix.to_vec()), &self.config.spec)?.len())
    }

    fn run_task(&self, prefix: &[i64], seed: usize) -> Result<Best> {
        let mut best = Best::default();
        let mut incumbent = seed;
        let mut stack = prefix.to_vec();
        self.descend(&mut stack, &mut incumbent, &mut best)?;
        Ok(best)
    }

    /// Adding an element above the current maximum while the minimum stays 0
    /// moves an extreme of `Σ m·A`, so each remaining element adds at least
    /// one to the size. A branch is cut when that bound exceeds the incumbent.
    fn descend(&self, prefix: &mut Vec<i64>, incumbent: &mut usize, best: &mut Best) -> Result<()> {
        let n = self.config.cardinality;
        best.visited += 1;
        let remaining = n - prefix.len();
        if remaining == 0 && !is_canonical(prefix, self.config.reflection_quotient) {
            return Ok(());
        }
        if remaining == 0 && self.component_bound_exceeds(prefix, *incumbent)? {
            best.pruned += 1;
            return Ok(());
        }
        let value = self.value(prefix)?;
        if value + remaining > *incumbent {
            best.pruned += 1;
            return Ok(());
        }
        if remaining == 0 {
            best.record(value, prefix, self.config.witness_cap);
            *incumbent = (*incumbent).min(value);
            return Ok(());
        }
        let last = *prefix.last().expect("prefix starts with 0");
        let top = self.config.range_max - (remaining as i64 - 1);
        for x in (last + 1)..=top {
            prefix.push(x);
            self.descend(prefix, incumbent, best)?;
            prefix.pop();
        }
        Ok(())
    }

    fn component_bound_exceeds(&self, a: &[i64], incumbent: usize) -> Result<bool> {
        let Some((n, m)) = self.component_pair else {
            return Ok(false);
        };
        let set = IntSet::from_sorted_unchecked(a.to_vec());
        let size = a.len();
        let cn = component_count(&set, n)?;
        let cm = component_count(&set, m)?;
        let bound = cn * size + cm * size - cn * cm;
        Ok(bound > incumbent)
    }
}

fn component_pair(config: &SearchConfig) -> Option<(i64, i64)> {
    if !config.component_pruning {
        return None;
    }
    match config.spec.coefficients() {
        &[n, m] if n >= 2 && m >= 2 && num_integer::gcd(n, m) == 1 => Some((n, m)),
        _ => None,
    }
}

fn pruned_search(config: &SearchConfig) -> Result<Best> {
    let cap = config.witness_cap;
    let searcher = Searcher { config, component_pair: component_pair(config) };
    // The progression {0, ..., n-1} is canonical and symmetric, so it is in
    // every family and its value bounds the minimum.
    let seed = dilate_sum(&IntSet::interval(config.cardinality)?, &config.spec)?.len();
    let tasks = task_prefixes(config.cardinality, config.range_max);
    let run = |prefix: &Vec<i64>| searcher.run_task(prefix, seed);
    let reduce = |x: Result<Best>, y: Result<Best>| Ok(x?.merge(y?, cap));

    #[cfg(feature = "parallel")]
    if config.parallel_width > 1 {
        use rayon::prelude::*;
        let pool = thread_pool(config.parallel_width)?;
        return pool.install(|| {
            tasks
                .par_iter()
                .map(run)
                .reduce(|| Ok(Best::default()), reduce)
        });
    }

    tasks.iter().map(run).fold(Ok(Best::default()), reduce)
}

/// One row of a conjecture probe table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: usize,
    pub minimum: usize,
    /// `(Σ|m|)·n - minimum`.
    pub deficiency: i64,
    /// Lexicographically smallest extremal set.
    pub witness: IntSet,
    pub witness_count: u64,
    /// `{0, ..., n-1}` attains the minimum.
    pub ap_extremal: bool,
    pub touches_range: bool,
}

/// Minima and deficiencies of `|Σ m·A|` for `n` in `n_from..=n_to`.
pub fn conjecture_probe(
    spec: &DilateSpec,
    n_from: usize,
    n_to: usize,
    range_max: i64,
    parallel_width: usize,
) -> Result<Vec<ProbeRow>> {
    spec.require_coprime()?;
    if n_from > n_to {
        return Err(Error::InvalidConfig(format!("empty cardinality range {n_from}..={n_to}")));
    }
    let weight = spec.abs_sum()?;
    (n_from..=n_to)
        .map(|n| {
            let mut config = SearchConfig::new(spec.clone(), n, range_max);
            config.parallel_width = parallel_width;
            let result = min_dilate_sum(&config)?;
            let ap_value = dilate_sum(&IntSet::interval(n)?, spec)?.len();
            let deficiency = (n as i64)
                .checked_mul(weight)
                .and_then(|w| w.checked_sub(result.minimum as i64))
                .ok_or(Error::Overflow("deficiency"))?;
            Ok(ProbeRow {
                n,
                minimum: result.minimum,
                deficiency,
                witness: result.witnesses[0].clone(),
                witness_count: result.witness_count,
                ap_extremal: ap_value == result.minimum,
                touches_range: result.touches_range,
            })
        })
        .collect()
}
