//! Finite sets of integers and the sumset arithmetic built on them.
//!
//! Every operation is exact: products and sums go through checked 64-bit
//! arithmetic and report [`Error::Overflow`] instead of wrapping.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Above this many bits the dense shift-or kernel is not used.
const DENSE_SPAN_LIMIT: u128 = 1 << 26;

/// A nonempty, strictly increasing set of integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct IntSet(Vec<i64>);

impl IntSet {
    /// Builds a set from arbitrary elements, sorting and merging repeats.
    pub fn new(mut elements: Vec<i64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptySet);
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(IntSet(elements))
    }

    /// Like [`IntSet::new`] but rejects repeated elements instead of merging them.
    pub fn try_from_distinct(mut elements: Vec<i64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptySet);
        }
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateElement(w[0]));
        }
        Ok(IntSet(elements))
    }

    /// Caller guarantees `elements` is nonempty and strictly increasing.
    pub(crate) fn from_sorted_unchecked(elements: Vec<i64>) -> Self {
        debug_assert!(!elements.is_empty());
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        IntSet(elements)
    }

    pub fn singleton(x: i64) -> Self {
        IntSet(vec![x])
    }

    /// The arithmetic progression `first, first + step, ..., first + (len - 1) * step`.
    pub fn progression(first: i64, step: i64, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptySet);
        }
        if step == 0 && len > 1 {
            return Err(Error::ZeroCoefficient(0));
        }
        let mut out = Vec::with_capacity(len);
        let mut x = first;
        out.push(x);
        for _ in 1..len {
            x = x.checked_add(step).ok_or(Error::Overflow("progression"))?;
            out.push(x);
        }
        if step < 0 {
            out.reverse();
        }
        Ok(IntSet(out))
    }

    /// `{0, 1, ..., len - 1}`.
    pub fn interval(len: usize) -> Result<Self> {
        Self::progression(0, 1, len)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; present for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_element(&self) -> i64 {
        self.0[0]
    }

    pub fn max_element(&self) -> i64 {
        self.0[self.0.len() - 1]
    }

    pub fn contains(&self, x: i64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = i64> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    /// Gcd of the absolute values of the elements; 0 for `{0}`.
    pub fn gcd(&self) -> u64 {
        self.0.iter().fold(0u64, |g, x| g.gcd(&x.unsigned_abs()))
    }

    /// `self + v`.
    pub fn translate(&self, v: i64) -> Result<Self> {
        let out = self
            .0
            .iter()
            .map(|x| x.checked_add(v).ok_or(Error::Overflow("translation")))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntSet(out))
    }

    /// `{max - a : a in self}`.
    pub fn reflect(&self) -> Result<Self> {
        let top = self.max_element();
        let out = self
            .0
            .iter()
            .rev()
            .map(|x| top.checked_sub(*x).ok_or(Error::Overflow("reflection")))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntSet(out))
    }

    /// Whether the set is an arithmetic progression (singletons count).
    pub fn is_progression(&self) -> bool {
        if self.0.len() <= 2 {
            return true;
        }
        let step = self.0[1] as i128 - self.0[0] as i128;
        self.0.windows(2).all(|w| w[1] as i128 - w[0] as i128 == step)
    }
}

impl TryFrom<Vec<i64>> for IntSet {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        IntSet::try_from_distinct(v)
    }
}

impl From<IntSet> for Vec<i64> {
    fn from(s: IntSet) -> Self {
        s.0
    }
}

impl fmt::Debug for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

/// An affine change of coordinates `x -> (x - shift) / scale`.
///
/// `scale` is always at least 1; canonicalization only ever divides by a
/// positive gcd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    pub shift: i64,
    pub scale: i64,
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap { shift: 0, scale: 1 };

    pub fn new(shift: i64, scale: i64) -> Result<Self> {
        if scale < 1 {
            return Err(Error::Hypothesis(format!(
                "affine scale must be at least 1, got {scale}"
            )));
        }
        Ok(AffineMap { shift, scale })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Forward map. Fails if some translated element is not divisible by `scale`.
    pub fn apply(&self, a: &IntSet) -> Result<IntSet> {
        let out = a
            .iter()
            .map(|x| {
                let d = x.checked_sub(self.shift).ok_or(Error::Overflow("affine map"))?;
                if d % self.scale != 0 {
                    return Err(Error::Hypothesis(format!(
                        "{x} - {} is not divisible by {}",
                        self.shift, self.scale
                    )));
                }
                Ok(d / self.scale)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntSet::from_sorted_unchecked(out))
    }

    /// Inverse map `y -> y * scale + shift`.
    pub fn invert(&self, a: &IntSet) -> Result<IntSet> {
        let out = a
            .iter()
            .map(|y| {
                y.checked_mul(self.scale)
                    .and_then(|p| p.checked_add(self.shift))
                    .ok_or(Error::Overflow("inverse affine map"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntSet::from_sorted_unchecked(out))
    }
}

/// The coefficient set of a sum of dilates, e.g. `{2, k}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct DilateSpec {
    coefficients: Vec<i64>,
}

impl DilateSpec {
    pub fn new(mut coefficients: Vec<i64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::NoCoefficients);
        }
        if let Some(&z) = coefficients.iter().find(|&&m| m == 0) {
            return Err(Error::ZeroCoefficient(z));
        }
        coefficients.sort_unstable();
        if let Some(w) = coefficients.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateCoefficient(w[0]));
        }
        Ok(DilateSpec { coefficients })
    }

    /// `{2, k}`.
    pub fn two_and(k: i64) -> Result<Self> {
        Self::new(vec![2, k])
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn gcd_abs(&self) -> u64 {
        self.coefficients
            .iter()
            .fold(0u64, |g, m| g.gcd(&m.unsigned_abs()))
    }

    /// Sum of the absolute values of the coefficients.
    pub fn abs_sum(&self) -> Result<i64> {
        self.coefficients.iter().try_fold(0i64, |acc, m| {
            let m = i64::try_from(m.unsigned_abs()).map_err(|_| Error::Overflow("coefficient"))?;
            acc.checked_add(m).ok_or(Error::Overflow("coefficient sum"))
        })
    }

    pub fn require_coprime(&self) -> Result<()> {
        match self.gcd_abs() {
            1 => Ok(()),
            g => Err(Error::Hypothesis(format!(
                "gcd of coefficients {:?} is {g}, expected 1",
                self.coefficients
            ))),
        }
    }
}

impl TryFrom<Vec<i64>> for DilateSpec {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        DilateSpec::new(v)
    }
}

impl From<DilateSpec> for Vec<i64> {
    fn from(s: DilateSpec) -> Self {
        s.coefficients
    }
}

/// `r·a`.
pub fn dilate(a: &IntSet, r: i64) -> Result<IntSet> {
    if r == 0 {
        return Err(Error::ZeroCoefficient(r));
    }
    let mut out = a
        .iter()
        .map(|x| x.checked_mul(r).ok_or(Error::Overflow("dilate")))
        .collect::<Result<Vec<_>>>()?;
    if r < 0 {
        out.reverse();
    }
    Ok(IntSet::from_sorted_unchecked(out))
}

/// `a + b`.
pub fn minkowski_sum(a: &IntSet, b: &IntSet) -> Result<IntSet> {
    let lo = a
        .min_element()
        .checked_add(b.min_element())
        .ok_or(Error::Overflow("minkowski sum"))?;
    a.max_element()
        .checked_add(b.max_element())
        .ok_or(Error::Overflow("minkowski sum"))?;
    // Both extreme sums fit, so every pairwise sum does.

    if a.len() == 1 {
        return b.translate(a.min_element());
    }
    if b.len() == 1 {
        return a.translate(b.min_element());
    }

    let span = |s: &IntSet| (s.max_element() as i128 - s.min_element() as i128) as u128 + 1;
    let (span_a, span_b) = (span(a), span(b));
    let total_span = span_a + span_b - 1;
    if total_span <= DENSE_SPAN_LIMIT {
        // Shift copies of the set with the narrower span; iterate the other.
        let (outer, inner) = if span_a <= span_b { (b, a) } else { (a, b) };
        let words = (span(inner) as usize).div_ceil(64);
        if (outer.len() * words) as u128 <= (a.len() * b.len()) as u128 {
            return Ok(shift_or_sum(outer, inner, lo, total_span as usize));
        }
    }

    let mut sums = Vec::with_capacity(a.len() * b.len());
    for x in a.iter() {
        sums.extend(b.iter().map(|y| x + y));
    }
    sums.sort_unstable();
    sums.dedup();
    Ok(IntSet::from_sorted_unchecked(sums))
}

/// Dense kernel: OR together `|outer|` shifted copies of the bitset of `inner`.
fn shift_or_sum(outer: &IntSet, inner: &IntSet, lo: i64, total_span: usize) -> IntSet {
    let inner_min = inner.min_element();
    let outer_min = outer.min_element();
    let mut pattern = vec![0u64; (inner.max_element().abs_diff(inner_min) as usize) / 64 + 1];
    for y in inner.iter() {
        let off = y.abs_diff(inner_min) as usize;
        pattern[off / 64] |= 1 << (off % 64);
    }

    let mut acc = vec![0u64; total_span / 64 + 2];
    for x in outer.iter() {
        let shift = x.abs_diff(outer_min) as usize;
        let (word, bit) = (shift / 64, shift % 64);
        if bit == 0 {
            for (i, &p) in pattern.iter().enumerate() {
                acc[word + i] |= p;
            }
        } else {
            for (i, &p) in pattern.iter().enumerate() {
                acc[word + i] |= p << bit;
                acc[word + i + 1] |= p >> (64 - bit);
            }
        }
    }

    let mut out = Vec::new();
    for (w, &bits) in acc.iter().enumerate() {
        let mut bits = bits;
        while bits != 0 {
            let t = bits.trailing_zeros() as usize;
            out.push(lo + (w * 64 + t) as i64);
            bits &= bits - 1;
        }
    }
    IntSet::from_sorted_unchecked(out)
}

/// `Σ m·a` over the given coefficients, which may repeat.
pub fn sum_of_dilates(a: &IntSet, coefficients: &[i64]) -> Result<IntSet> {
    let (first, rest) = coefficients.split_first().ok_or(Error::NoCoefficients)?;
    let mut acc = dilate(a, *first)?;
    for &m in rest {
        acc = minkowski_sum(&acc, &dilate(a, m)?)?;
    }
    Ok(acc)
}

/// `Σ_{m ∈ spec} m·a`.
pub fn dilate_sum(a: &IntSet, spec: &DilateSpec) -> Result<IntSet> {
    sum_of_dilates(a, spec.coefficients())
}

/// `|Σ_{m ∈ spec} m·a|`.
pub fn dilate_sum_size(a: &IntSet, spec: &DilateSpec) -> Result<usize> {
    dilate_sum(a, spec).map(|s| s.len())
}

/// Representative of the affine orbit of `a` with minimum 0 and gcd 1.
///
/// Returns the map that sends `a` to the representative; `map.invert`
/// recovers `a`. A singleton maps to `{0}` with scale 1.
pub fn canonicalize(a: &IntSet) -> Result<(IntSet, AffineMap)> {
    let shift = a.min_element();
    let diffs = a
        .iter()
        .map(|x| x.checked_sub(shift).ok_or(Error::Overflow("canonicalize")))
        .collect::<Result<Vec<_>>>()?;
    let g = diffs.iter().fold(0i64, |g, d| g.gcd(d));
    let scale = if g == 0 { 1 } else { g };
    let canon = diffs.into_iter().map(|d| d / scale).collect();
    Ok((IntSet::from_sorted_unchecked(canon), AffineMap { shift, scale }))
}
