//! Checkers for the lower bounds and exact values on sums of dilates.
//!
//! Each checker computes the true size of a sumset exactly, evaluates the
//! bound on the same input and returns a [`BoundReport`]. Inputs outside a
//! statement's hypotheses produce [`Verdict::NotApplicable`], never a pass.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::components::{
    component_count, decompose, is_full, is_odd_prime, is_semi_full, marginal_set_with,
    marginal_split_with, require_odd_prime, residue, square_class_count, ModulusPolicy,
};
use crate::error::{Error, Result};
use crate::intset::{canonicalize, dilate, dilate_sum, minkowski_sum, sum_of_dilates, DilateSpec, IntSet};

/// One label per verified statement. Ordering is the report order of
/// [`check_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementId {
    /// `|r·(A+v) + s·(A+v)| = |r·A + s·A| = |r·(uA) + s·(uA)|`.
    AffineInvariance,
    /// `|n·A + m·B| >= c_n(B)|A| + c_m(A)|B| - c_m(A)c_n(B)` for coprime n, m.
    ComponentCount,
    /// `|n·A + m·A| >= 4|A| - 4` for coprime `2 <= n < m`.
    FourBound,
    /// `|2·A + m·A| >= (m+2)|A| - 2m` (m-full) or `- 2m·c_m(A)` (m-semi-full).
    FullSemiFull,
    /// `Σ_C |M_C| >= (c_k(A) - 1)·c_k(A)`.
    MarginalTotal,
    /// `|M_C| >= |C'|`, and `|M_C| >= |C|` under the sufficient conditions.
    Faithful,
    /// `|2·A + k·A| >= (k+2)|A| - 4k^(k-1)`.
    GeneralLower,
    /// `|2·A + k·A| > (k+2)|A|` for large normalized sets that are not k-semi-full.
    StrictNonSemiFull,
    /// `|2·A + k·A| >= (k+2)|A| - k² - k + 2` for `|A| > 8k^k`.
    LargeSetLower,
    /// `|2·P + k·P| = (k+2)|P| - 2k` for an arithmetic progression P.
    ApExact,
}

impl StatementId {
    pub fn relation(self) -> Relation {
        match self {
            StatementId::AffineInvariance | StatementId::ApExact => Relation::Equal,
            StatementId::StrictNonSemiFull => Relation::Greater,
            _ => Relation::AtLeast,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StatementId::AffineInvariance => "affine_invariance",
            StatementId::ComponentCount => "component_count",
            StatementId::FourBound => "four_bound",
            StatementId::FullSemiFull => "full_semi_full",
            StatementId::MarginalTotal => "marginal_total",
            StatementId::Faithful => "faithful",
            StatementId::GeneralLower => "general_lower",
            StatementId::StrictNonSemiFull => "strict_non_semi_full",
            StatementId::LargeSetLower => "large_set_lower",
            StatementId::ApExact => "ap_exact",
        }
    }
}

impl fmt::Display for StatementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtLeast,
    Greater,
    Equal,
}

impl Relation {
    fn test(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::AtLeast => lhs >= rhs,
            Relation::Greater => lhs > rhs,
            Relation::Equal => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    NotApplicable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::NotApplicable => "not_applicable",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A named precondition. Non-required entries are informational conditions
/// that select which form of a statement is asserted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub met: bool,
    #[serde(default = "default_true")]
    pub required: bool,
}

fn default_true() -> bool {
    true
}

impl Hypothesis {
    pub fn required(name: impl Into<String>, met: bool) -> Self {
        Hypothesis { name: name.into(), met, required: true }
    }

    pub fn condition(name: impl Into<String>, met: bool) -> Self {
        Hypothesis { name: name.into(), met, required: false }
    }
}

/// Verdict of one statement on one input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub statement_id: StatementId,
    pub hypotheses_met: bool,
    pub hypotheses: Vec<Hypothesis>,
    pub lhs: i64,
    pub rhs: i64,
    pub slack: i64,
    pub verdict: Verdict,
    /// The checker ran on the canonical representative of the input.
    #[serde(default)]
    pub normalized: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub context: String,
}

impl BoundReport {
    pub fn evaluate(
        statement_id: StatementId,
        hypotheses: Vec<Hypothesis>,
        lhs: i64,
        rhs: i64,
    ) -> Result<Self> {
        let hypotheses_met = hypotheses.iter().filter(|h| h.required).all(|h| h.met);
        let slack = lhs.checked_sub(rhs).ok_or(Error::Overflow("slack"))?;
        let verdict = if !hypotheses_met {
            Verdict::NotApplicable
        } else if statement_id.relation().test(lhs, rhs) {
            Verdict::Holds
        } else {
            Verdict::Fails
        };
        Ok(BoundReport {
            statement_id,
            hypotheses_met,
            hypotheses,
            lhs,
            rhs,
            slack,
            verdict,
            normalized: false,
            context: String::new(),
        })
    }

    /// A not-applicable entry standing in for a checker that refused its input.
    pub fn refused(statement_id: StatementId, err: &Error) -> Self {
        BoundReport {
            statement_id,
            hypotheses_met: false,
            hypotheses: vec![Hypothesis::required(err.to_string(), false)],
            lhs: 0,
            rhs: 0,
            slack: 0,
            verdict: Verdict::NotApplicable,
            normalized: false,
            context: String::new(),
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn fails(&self) -> bool {
        self.verdict == Verdict::Fails
    }

    pub fn is_applicable(&self) -> bool {
        self.verdict != Verdict::NotApplicable
    }

    /// Names of the required hypotheses that were not met.
    pub fn failed_hypotheses(&self) -> Vec<&str> {
        self.hypotheses
            .iter()
            .filter(|h| h.required && !h.met)
            .map(|h| h.name.as_str())
            .collect()
    }

    fn with_context(mut self, context: impl Into<String>) -> Self {
        self.context = context.into();
        self
    }

    fn normalized(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }
}

fn size(n: usize) -> Result<i64> {
    i64::try_from(n).map_err(|_| Error::Overflow("set size"))
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow("bound"))
}

fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow("bound"))
}

fn sub(a: i64, b: i64) -> Result<i64> {
    a.checked_sub(b).ok_or(Error::Overflow("bound"))
}

/// `factor · k^exp`, refusing values outside 64 bits.
fn power_constant(factor: i64, k: i64, exp: u32) -> Result<i64> {
    u32::try_from(k)
        .ok()
        .and_then(|_| k.checked_pow(exp))
        .and_then(|p| p.checked_mul(factor))
        .ok_or_else(|| Error::ConstantRange(format!("{factor}·{k}^{exp}")))
}

fn pair_size(a: &IntSet, b: &IntSet, n: i64, m: i64) -> Result<i64> {
    size(minkowski_sum(&dilate(a, n)?, &dilate(b, m)?)?.len())
}

fn two_k_size(a: &IntSet, k: i64) -> Result<i64> {
    size(sum_of_dilates(a, &[2, k])?.len())
}

fn coprime(n: i64, m: i64) -> bool {
    n.gcd(&m) == 1
}

/// Both translation and scaling leave `|r·A + s·A|` unchanged.
pub fn check_affine_invariance(a: &IntSet, r: i64, s: i64, u: i64, v: i64) -> Result<BoundReport> {
    for c in [r, s, u] {
        if c == 0 {
            return Err(Error::ZeroCoefficient(c));
        }
    }
    let base = size(sum_of_dilates(a, &[r, s])?.len())?;
    let translated = size(sum_of_dilates(&a.translate(v)?, &[r, s])?.len())?;
    let scaled = size(sum_of_dilates(&dilate(a, u)?, &[r, s])?.len())?;
    let rhs = if translated != base { translated } else { scaled };
    let report = BoundReport::evaluate(
        StatementId::AffineInvariance,
        vec![Hypothesis::required("r, s, u nonzero", true)],
        base,
        rhs,
    )?;
    Ok(report.with_context(format!(
        "|r·A+s·A|={base}, translated by {v}: {translated}, scaled by {u}: {scaled}"
    )))
}

/// `|n·a + m·b| >= c_n(b)|a| + c_m(a)|b| - c_m(a)c_n(b)`.
pub fn bound_basic(a: &IntSet, b: &IntSet, n: i64, m: i64) -> Result<BoundReport> {
    let moduli_ok = n >= 2 && m >= 2;
    let hyps = vec![
        Hypothesis::required("n >= 2 and m >= 2", moduli_ok),
        Hypothesis::required("gcd(n, m) = 1", coprime(n, m)),
    ];
    if !moduli_ok {
        return BoundReport::evaluate(StatementId::ComponentCount, hyps, 0, 0);
    }
    let lhs = pair_size(a, b, n, m)?;
    let cn_b = size(component_count(b, n)?)?;
    let cm_a = size(component_count(a, m)?)?;
    let rhs = sub(add(mul(cn_b, size(a.len())?)?, mul(cm_a, size(b.len())?)?)?, mul(cm_a, cn_b)?)?;
    let report = BoundReport::evaluate(StatementId::ComponentCount, hyps, lhs, rhs)?;
    Ok(report.with_context(format!("n={n}, m={m}, c_n(B)={cn_b}, c_m(A)={cm_a}")))
}

/// `|n·a + m·a| >= 4|a| - 4` for coprime `2 <= n < m`.
pub fn bound_four(a: &IntSet, n: i64, m: i64) -> Result<BoundReport> {
    let hyps = vec![
        Hypothesis::required("2 <= n < m", 2 <= n && n < m),
        Hypothesis::required("gcd(n, m) = 1", coprime(n, m)),
    ];
    let lhs = if n != 0 && m != 0 { pair_size(a, a, n, m)? } else { 0 };
    let rhs = sub(mul(4, size(a.len())?)?, 4)?;
    let report = BoundReport::evaluate(StatementId::FourBound, hyps, lhs, rhs)?;
    Ok(report.with_context(format!("n={n}, m={m}")))
}

/// `|2·a + m·a| >= (m+2)|a| - 2m` when a is m-full, else
/// `(m+2)|a| - 2m·c_m(a)` when a is m-semi-full.
pub fn bound_full_semifull(a: &IntSet, m: i64) -> Result<BoundReport> {
    if m < 3 || m % 2 == 0 {
        return Err(Error::InvalidModulus {
            modulus: m,
            reason: "expected an odd modulus of at least 3",
        });
    }
    let full = is_full(a, m)?;
    let semi = is_semi_full(a, m)?;
    let hyps = vec![
        Hypothesis::required("A is m-full or m-semi-full", full || semi),
        Hypothesis::condition("A is m-full", full),
        Hypothesis::condition("A is m-semi-full", semi),
    ];
    let lhs = two_k_size(a, m)?;
    let base = mul(add(m, 2)?, size(a.len())?)?;
    let (rhs, case) = if full {
        (sub(base, mul(2, m)?)?, "full case")
    } else if semi {
        let cm = size(component_count(a, m)?)?;
        (sub(base, mul(mul(2, m)?, cm)?)?, "semi-full case")
    } else {
        (0, "neither full nor semi-full")
    };
    let report = BoundReport::evaluate(StatementId::FullSemiFull, hyps, lhs, rhs)?;
    Ok(report.with_context(format!("m={m}, {case}")))
}

/// `Σ_C |M_C| >= (c_k(a) - 1)·c_k(a)` with k an odd prime.
pub fn bound_marginal_total(a: &IntSet, k: i64) -> Result<BoundReport> {
    bound_marginal_total_with(a, k, ModulusPolicy::OddPrime)
}

/// As [`bound_marginal_total`]; [`ModulusPolicy::Any`] lifts the primality requirement.
pub fn bound_marginal_total_with(a: &IntSet, k: i64, policy: ModulusPolicy) -> Result<BoundReport> {
    policy.check(k)?;
    let d = decompose(a, k)?;
    let mut total = 0usize;
    let mut outside = 0usize;
    for c in d.components() {
        let split = marginal_split_with(c, a, k, policy)?;
        total += split.total();
        outside += split.low.len() + split.high.len();
    }
    let count = size(d.count())?;
    let hyps = vec![Hypothesis {
        name: "k odd prime".into(),
        met: is_odd_prime(k),
        required: policy == ModulusPolicy::OddPrime,
    }];
    let report = BoundReport::evaluate(
        StatementId::MarginalTotal,
        hyps,
        size(total)?,
        mul(count - 1, count)?,
    )?;
    Ok(report.with_context(format!(
        "k={k}, c_k(A)={count}, below/above extremes {outside}, interior {}",
        total - outside
    )))
}

/// Lower bounds on `|M_C|` for a component `C` that is not k-semi-full.
///
/// Always asserts `|M_C| >= |C'|` for every other component `C'`. When some
/// other component is at least as large as `C`, or `C` is not 2-full, also
/// asserts faithfulness `|M_C| >= |C|`.
pub fn check_faithful(a: &IntSet, k: i64, c_residue: i64) -> Result<BoundReport> {
    if k < 2 {
        return Err(Error::InvalidModulus { modulus: k, reason: "modulus must be at least 2" });
    }
    if !(0..k).contains(&c_residue) {
        return Err(Error::InvalidResidue { residue: c_residue, modulus: k });
    }
    let d = decompose(a, k)?;
    let prime = is_odd_prime(k);
    let mut hyps = vec![
        Hypothesis::required("0 in A", a.contains(0)),
        Hypothesis::required("gcd(A) = 1", a.gcd() == 1),
        Hypothesis::required("k odd prime", prime),
    ];
    let Some(c) = d.block(c_residue) else {
        hyps.push(Hypothesis::required(format!("A meets residue {c_residue} mod {k}"), false));
        return BoundReport::evaluate(StatementId::Faithful, hyps, 0, 0);
    };

    let classes = square_class_count(c, k)?;
    let others: Vec<usize> = d
        .blocks()
        .filter(|(r, _)| *r != c_residue)
        .map(|(_, other)| other.len())
        .collect();
    let max_other = others.iter().copied().max().unwrap_or(0);
    let larger_other = max_other >= c.len();
    let not_two_full = component_count(c, 2)? < 2;
    hyps.push(Hypothesis::required("C is not k-semi-full", (classes as i64) < k));
    hyps.push(Hypothesis::required("another component exists", !others.is_empty()));
    hyps.push(Hypothesis::condition("another component has size >= |C|", larger_other));
    hyps.push(Hypothesis::condition("C is not 2-full", not_two_full));

    let marginal = size(marginal_set_with(c, a, k, ModulusPolicy::Any)?.len())?;
    let faithful_asserted = larger_other || not_two_full;
    let mut rhs = size(max_other)?;
    if faithful_asserted {
        rhs = rhs.max(size(c.len())?);
    }
    let report = BoundReport::evaluate(StatementId::Faithful, hyps, marginal, rhs)?;
    Ok(report.with_context(format!(
        "k={k}, C=residue {c_residue}, |C|={}, max |C'|={max_other}, faithfulness {}",
        c.len(),
        if faithful_asserted { "asserted" } else { "not asserted" }
    )))
}

/// `|2·a + k·a| >= (k+2)|a| - 4k^(k-1)`; constants are exact up to k = 13.
pub fn bound_main_small(a: &IntSet, k: i64) -> Result<BoundReport> {
    let prime = is_odd_prime(k);
    let hyps = vec![Hypothesis::required("k odd prime", prime)];
    if !prime {
        return BoundReport::evaluate(StatementId::GeneralLower, hyps, 0, 0);
    }
    let constant = power_constant(4, k, (k - 1) as u32)?;
    let lhs = two_k_size(a, k)?;
    let rhs = sub(mul(k + 2, size(a.len())?)?, constant)?;
    let report = BoundReport::evaluate(StatementId::GeneralLower, hyps, lhs, rhs)?;
    Ok(report.with_context(format!("k={k}")))
}

/// Both large-set verdicts for `|2·A + k·A|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainLargeReport {
    /// Strict `> (k+2)|A|`, needs 0 ∈ A, gcd(A) = 1 and A not k-semi-full.
    pub strict: BoundReport,
    /// `>= (k+2)|A| - k² - k + 2`.
    pub lower: BoundReport,
}

impl MainLargeReport {
    pub fn into_reports(self) -> [BoundReport; 2] {
        [self.strict, self.lower]
    }
}

/// Checks the strict and the additive-constant bounds for `|a| > 8k^k`.
///
/// A k-component meeting at most `k - 1` classes mod k² exists exactly when
/// `a` is not k-semi-full, so that is the gate for the strict bound.
pub fn bound_main_large(a: &IntSet, k: i64) -> Result<MainLargeReport> {
    let prime = is_odd_prime(k);
    if !prime {
        let hyps = || vec![Hypothesis::required("k odd prime", false)];
        return Ok(MainLargeReport {
            strict: BoundReport::evaluate(StatementId::StrictNonSemiFull, hyps(), 0, 0)?,
            lower: BoundReport::evaluate(StatementId::LargeSetLower, hyps(), 0, 0)?,
        });
    }
    let threshold = power_constant(8, k, k as u32)?;
    let n = size(a.len())?;
    let large = n > threshold;
    let lhs = two_k_size(a, k)?;
    let base = mul(k + 2, n)?;
    let size_hyp = || Hypothesis::required(format!("|A| > 8k^k = {threshold}"), large);

    let lower = BoundReport::evaluate(
        StatementId::LargeSetLower,
        vec![Hypothesis::required("k odd prime", true), size_hyp()],
        lhs,
        add(sub(sub(base, mul(k, k)?)?, k)?, 2)?,
    )?
    .with_context(format!("k={k}"));

    let semi = is_semi_full(a, k)?;
    let strict = BoundReport::evaluate(
        StatementId::StrictNonSemiFull,
        vec![
            Hypothesis::required("k odd prime", true),
            size_hyp(),
            Hypothesis::required("0 in A", a.contains(0)),
            Hypothesis::required("gcd(A) = 1", a.gcd() == 1),
            Hypothesis::required("A is not k-semi-full", !semi),
        ],
        lhs,
        base,
    )?
    .with_context(format!("k={k}"));

    Ok(MainLargeReport { strict, lower })
}

/// `(k+2)n - 2k` for n >= 2, and 1 for a singleton.
pub fn ap_exact_size(n: usize, k: i64) -> Result<i64> {
    require_odd_prime(k)?;
    match n {
        0 => Err(Error::EmptySet),
        1 => Ok(1),
        _ => sub(mul(add(k, 2)?, size(n)?)?, mul(2, k)?),
    }
}

/// Recomputes `|2·P + k·P|` for `P = {0, ..., n-1}` and compares it with
/// [`ap_exact_size`].
pub fn verify_ap_exact(n: usize, k: i64) -> Result<BoundReport> {
    let expected = ap_exact_size(n, k)?;
    let p = IntSet::interval(n)?;
    let actual = two_k_size(&p, k)?;
    let report = BoundReport::evaluate(
        StatementId::ApExact,
        vec![Hypothesis::required("k odd prime", true)],
        actual,
        expected,
    )?;
    Ok(report.with_context(format!("n={n}, k={k}")))
}

/// `(Σ|m|)·|a| - |Σ m·a|`, reported as-is (may be any sign).
pub fn deficiency(a: &IntSet, spec: &DilateSpec) -> Result<i64> {
    spec.require_coprime()?;
    let actual = size(dilate_sum(a, spec)?.len())?;
    sub(mul(spec.abs_sum()?, size(a.len())?)?, actual)
}

/// Runs every checker that takes `(a, k)` and returns the reports sorted by
/// statement.
///
/// Checkers that need 0 ∈ A and gcd(A) = 1 run on the canonical form of
/// `a` and are marked `normalized` when that differs from `a`. Refusals on
/// hypothesis grounds and out-of-range k constants become not-applicable
/// entries; overflow in the set arithmetic itself is returned as an error.
pub fn check_suite(a: &IntSet, k: i64) -> Result<Vec<BoundReport>> {
    require_odd_prime(k)?;
    let (canon, _) = canonicalize(a)?;
    let normalized = &canon != a;

    let mut reports = Vec::new();
    let mut push = |id: StatementId, r: Result<BoundReport>| -> Result<()> {
        reports.push(absorb(id, r)?);
        Ok(())
    };
    push(StatementId::ComponentCount, bound_basic(a, a, 2, k))?;
    push(StatementId::FourBound, bound_four(a, 2, k))?;
    push(StatementId::FullSemiFull, bound_full_semifull(a, k))?;
    push(StatementId::MarginalTotal, bound_marginal_total(a, k))?;

    let eligible = faithful_candidates(&canon, k)?;
    if eligible.is_empty() {
        let hyps = vec![Hypothesis::required(
            "a component that is not k-semi-full, alongside another component",
            false,
        )];
        push(
            StatementId::Faithful,
            BoundReport::evaluate(StatementId::Faithful, hyps, 0, 0).map(|r| r.normalized(normalized)),
        )?;
    }
    for r in eligible {
        push(
            StatementId::Faithful,
            check_faithful(&canon, k, r).map(|rep| rep.normalized(normalized)),
        )?;
    }

    push(StatementId::GeneralLower, bound_main_small(a, k))?;
    match bound_main_large(&canon, k) {
        Ok(large) => {
            for rep in large.into_reports() {
                reports.push(rep.normalized(normalized));
            }
        }
        Err(e) => {
            reports.push(absorb(StatementId::StrictNonSemiFull, Err(e.clone()))?);
            reports.push(absorb(StatementId::LargeSetLower, Err(e))?);
        }
    }

    reports.sort_by_key(|r| r.statement_id);
    Ok(reports)
}

fn absorb(id: StatementId, r: Result<BoundReport>) -> Result<BoundReport> {
    match r {
        Ok(rep) => Ok(rep),
        Err(e @ Error::Overflow(_)) => Err(e),
        Err(e) => Ok(BoundReport::refused(id, &e)),
    }
}

/// Residues of the k-components of `a` on which [`check_faithful`] has its
/// hypotheses about the component met.
pub fn faithful_candidates(a: &IntSet, k: i64) -> Result<Vec<i64>> {
    let d = decompose(a, k)?;
    if d.count() < 2 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (r, c) in d.blocks() {
        if (square_class_count(c, k)? as i64) < k {
            out.push(r);
        }
    }
    debug_assert!(out.iter().all(|&r| r == residue(r, k)));
    Ok(out)
}
