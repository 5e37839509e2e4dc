//! Closed-form upper and lower bounds on the maximum code size B_q(n,k,δ;α).
//!
//! Every evaluator works in exact integer or rational arithmetic and floors
//! only at the end.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::code::CodeSpec;
use crate::subspace::gaussian_binomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("{id} does not apply: {reason}")]
    NotApplicable { id: &'static str, reason: String },
}

fn na(id: &'static str, reason: impl Into<String>) -> BoundError {
    BoundError::NotApplicable {
        id,
        reason: reason.into(),
    }
}

fn gb(n: usize, k: usize, q: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    gaussian_binomial(n, k, q).expect("k <= n")
}

fn pow(q: u64, e: usize) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

fn big(x: usize) -> BigUint {
    BigUint::from(x)
}

fn alpha_in_range(id: &'static str, s: &CodeSpec) -> Result<(), BoundError> {
    let top = gb(s.k + s.delta - 1, s.k, s.q) + 1u32;
    if big(s.alpha) > top {
        return Err(na(id, format!("alpha = {} exceeds [k+delta-1, k]_q + 1 = {top}", s.alpha)));
    }
    Ok(())
}

/// ⌊(α−1)·[n, δ+k−1]_q / [n−k, δ−1]_q⌋ for 1 < k, α ≤ [k+δ−1, k]_q + 1.
pub fn etzion_bound(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "etzion";
    if s.k < 2 {
        return Err(na(ID, "needs k > 1"));
    }
    alpha_in_range(ID, s)?;
    let num = big(s.alpha - 1) * gb(s.n, s.delta + s.k - 1, s.q);
    Ok(num / gb(s.n - s.k, s.delta - 1, s.q))
}

/// [n−δ, k]_q·((α − ⌊(k+δ)/k⌋ + 1)·[k,1]_q − 1) + ⌊(k+δ)/k⌋ − 1 for
/// δ ≤ min(k, n−k).
pub fn liu_bound(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "liu";
    if s.k < 2 {
        return Err(na(ID, "needs k > 1"));
    }
    if s.delta > s.k.min(s.n - s.k) {
        return Err(na(ID, "needs delta <= min(k, n-k)"));
    }
    alpha_in_range(ID, s)?;
    let r = (s.k + s.delta) / s.k;
    // α ≥ 2 and r ≤ 2, so the multiplier is at least 1
    let factor = big(s.alpha + 1 - r) * gb(s.k, 1, s.q) - 1u32;
    Ok(gb(s.n - s.delta, s.k, s.q) * factor + big(r - 1))
}

/// (q^(n−αk+2k) − 1)/(q^k − 1) + α − 2 for k | n and δ = (α−1)k.
pub fn ic_bound(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "independent-configuration";
    if s.n % s.k != 0 {
        return Err(na(ID, "needs k | n"));
    }
    if s.delta != (s.alpha - 1) * s.k {
        return Err(na(ID, "needs delta = (alpha-1)k"));
    }
    let e = s.n + 2 * s.k - s.alpha * s.k;
    Ok((pow(s.q, e) - 1u32) / (pow(s.q, s.k) - 1u32) + big(s.alpha - 2))
}

/// Minimum over m of ⌊[n,1]_q·m(m+1)/(2(q+1)m − [n−2,1]_q)⌋ for k = δ = 2,
/// α = 3.
pub fn bonferroni_bound(q: u64, n: usize) -> Result<BigUint, BoundError> {
    const ID: &str = "bonferroni";
    if n < 3 {
        return Err(na(ID, "needs n >= 3"));
    }
    let points = gb(n, 1, q);
    let g = gb(n - 2, 1, q);
    let step = BigUint::from(2 * (q + 1));
    let mut m = &g / &step + 1u32;
    let mut best: Option<BigUint> = None;
    let mut prev: Option<BigRational> = None;
    let mut rises = 0;
    while rises < 2 {
        let den = &step * &m - &g;
        let value = BigRational::new((&points * &m * (&m + 1u32)).into(), den.into());
        let floor = value.floor().to_integer().to_biguint().expect("positive");
        if best.as_ref().is_none_or(|b| floor < *b) {
            best = Some(floor);
        }
        if prev.as_ref().is_some_and(|p| value > *p) {
            rises += 1;
        } else {
            rises = 0;
        }
        prev = Some(value);
        m += 1u32;
    }
    Ok(best.expect("loop runs at least twice"))
}

/// h = ⌊k + 1 − δ/(α−1)⌋.
fn counting_h(k: usize, delta: usize, alpha: usize) -> usize {
    k + 1 - delta.div_ceil(alpha - 1)
}

/// ⌊(α−1)·[n,h]_q / [k,h]_q⌋ for δ ≤ (α−1)k.
pub fn counting_bound(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "h-subspace-counting";
    if s.delta > (s.alpha - 1) * s.k {
        return Err(na(ID, "needs delta <= (alpha-1)k"));
    }
    let h = counting_h(s.k, s.delta, s.alpha);
    Ok(big(s.alpha - 1) * gb(s.n, h, s.q) / gb(s.k, h, s.q))
}

/// ⌊(1 + 1/(2[k,h]_q − 1))·[n,h]_q/[k,h]_q⌋ for α = 3, δ ≤ 2k.
pub fn refined_counting_bound(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "refined-counting";
    if s.alpha != 3 {
        return Err(na(ID, "needs alpha = 3"));
    }
    if s.delta > 2 * s.k {
        return Err(na(ID, "needs delta <= 2k"));
    }
    let h = counting_h(s.k, s.delta, 3);
    let kh = gb(s.k, h, s.q);
    let two_kh_minus_one = &kh * 2u32 - 1u32;
    let factor = BigRational::new((&two_kh_minus_one + 1u32).into(), two_kh_minus_one.into());
    let value = factor * BigRational::new(gb(s.n, h, s.q).into(), kh.into());
    Ok(value.floor().to_integer().to_biguint().expect("positive"))
}

/// ⌊(α−1)·[n,1]_q / ([k,1]_q + 1)⌋ for 3 ≤ α ≤ [k,1]_q and
/// δ ≥ (α−1)(k−1) + 1.
pub fn berge_path_bound(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "berge-path";
    let k1 = gb(s.k, 1, s.q);
    if s.alpha < 3 || big(s.alpha) > k1 {
        return Err(na(ID, "needs 3 <= alpha <= [k,1]_q"));
    }
    if s.delta < (s.alpha - 1) * (s.k - 1) + 1 {
        return Err(na(ID, "needs delta >= (alpha-1)(k-1)+1"));
    }
    Ok(big(s.alpha - 1) * gb(s.n, 1, s.q) / (k1 + 1u32))
}

/// The full Grassmannian: codewords are distinct k-subspaces.
pub fn trivial_bound(s: &CodeSpec) -> BigUint {
    gb(s.n, s.k, s.q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        })
    }
}

/// A numeric bound, or a marker for a result that is only asymptotic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundValue {
    Exact(BigUint),
    AsymptoticOnly(&'static str),
}

impl BoundValue {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            BoundValue::Exact(v) => Some(v),
            BoundValue::AsymptoticOnly(_) => None,
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Exact(v) => write!(f, "{v}"),
            BoundValue::AsymptoticOnly(rate) => write!(f, "asymptotic-only {rate}"),
        }
    }
}

impl Serialize for BoundValue {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundEntry {
    pub id: &'static str,
    pub side: Side,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<BoundValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl BoundEntry {
    fn from_result(id: &'static str, side: Side, r: Result<BigUint, BoundError>) -> Self {
        match r {
            Ok(v) => BoundEntry {
                id,
                side,
                applicable: true,
                value: Some(BoundValue::Exact(v)),
                reason: None,
            },
            Err(BoundError::NotApplicable { reason, .. }) => BoundEntry {
                id,
                side,
                applicable: false,
                value: None,
                reason: Some(reason),
            },
        }
    }

    fn marker(id: &'static str, side: Side, applies: Result<&'static str, String>) -> Self {
        match applies {
            Ok(rate) => BoundEntry {
                id,
                side,
                applicable: true,
                value: Some(BoundValue::AsymptoticOnly(rate)),
                reason: None,
            },
            Err(reason) => BoundEntry {
                id,
                side,
                applicable: false,
                value: None,
                reason: Some(reason),
            },
        }
    }

    pub fn exact(&self) -> Option<&BigUint> {
        if self.applicable {
            self.value.as_ref().and_then(BoundValue::exact)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub spec: CodeSpec,
    pub entries: Vec<BoundEntry>,
    /// Whether every applicable numeric lower bound is at most every
    /// applicable numeric upper bound.
    pub consistent: bool,
}

impl BoundReport {
    pub fn entry(&self, id: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn value(&self, id: &str) -> Option<&BigUint> {
        self.entry(id).and_then(BoundEntry::exact)
    }

    fn best(&self, side: Side) -> Option<(&'static str, &BigUint)> {
        let vals = self
            .entries
            .iter()
            .filter(|e| e.side == side)
            .filter_map(|e| e.exact().map(|v| (e.id, v)));
        match side {
            Side::Upper => vals.min_by(|a, b| a.1.cmp(b.1)),
            Side::Lower => vals.max_by(|a, b| a.1.cmp(b.1)),
        }
    }

    /// Smallest applicable numeric upper bound with its id.
    pub fn min_upper(&self) -> Option<(&'static str, &BigUint)> {
        self.best(Side::Upper)
    }

    /// Largest applicable numeric lower bound with its id.
    pub fn max_lower(&self) -> Option<(&'static str, &BigUint)> {
        self.best(Side::Lower)
    }
}

/// max(k, n−k)·(min(k, n−k) − δ + 1), or None when δ > min(k, n−k).
fn rank_metric_exponent(s: &CodeSpec) -> Option<usize> {
    let lo = s.k.min(s.n - s.k);
    let hi = s.k.max(s.n - s.k);
    (s.delta <= lo).then(|| hi * (lo + 1 - s.delta))
}

/// (α−1)·q^(max(k,n−k)(min(k,n−k)−δ+1)) for δ ≤ k, δ + k ≤ n.
pub fn rank_metric_lower_bound(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "rank-metric";
    if s.delta > s.k {
        return Err(na(ID, "needs delta <= k"));
    }
    let e = rank_metric_exponent(s).ok_or_else(|| na(ID, "needs delta <= n-k"))?;
    Ok(big(s.alpha - 1) * pow(s.q, e))
}

/// Best value of the recursive lower bound for ambient dimension `m`.
///
/// With m < k+δ no α codewords can span k+δ dimensions, so exactly the codes
/// with at most α−1 words are valid and the value is min(α−1, [m,k]_q).
/// Otherwise the closed form and every recursive step are tried and the
/// largest value is kept.
fn recursive_value(s: &CodeSpec, m: usize, memo: &mut Vec<Option<BigUint>>) -> BigUint {
    if let Some(v) = &memo[m] {
        return v.clone();
    }
    let (k, d) = (s.k, s.delta);
    let v = if m < k + d {
        gb(m, k, s.q).min(big(s.alpha - 1))
    } else {
        let sub = CodeSpec { n: m, ..*s };
        let mut best = rank_metric_lower_bound(&sub).unwrap_or_default();
        if m >= k + 2 * d {
            for t in d..=m - k - d {
                let cand = if t < k {
                    big(s.alpha - 1) * pow(s.q, k * (t + 1 - d)) * recursive_value(s, m - t, memo)
                } else {
                    big(s.alpha - 1) * pow(s.q, t * (k + 1 - d)) * recursive_value(s, m - t, memo)
                        + recursive_value(s, t + k - d, memo)
                };
                best = best.max(cand);
            }
        }
        best
    };
    memo[m] = Some(v.clone());
    v
}

/// Recursive lower bound for δ ≤ k, n ≥ k + 2δ and α ≤ q^k + 1.
pub fn recursive_lower_bound(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "rank-metric-recursive";
    if s.delta > s.k {
        return Err(na(ID, "needs delta <= k"));
    }
    if s.n < s.k + 2 * s.delta {
        return Err(na(ID, "needs n >= k + 2 delta"));
    }
    if big(s.alpha) > pow(s.q, s.k) + 1u32 {
        return Err(na(ID, "needs alpha <= q^k + 1"));
    }
    let mut memo = vec![None; s.n + 1];
    Ok(recursive_value(s, s.n, &mut memo))
}

fn gamma_of(s: &CodeSpec) -> Option<usize> {
    (s.delta > s.k).then(|| s.delta - s.k)
}

fn block_count(n: usize, k: usize) -> usize {
    (n + 1).saturating_sub(2 * k) / (k + 1)
}

fn needs_q2_alpha3(id: &'static str, s: &CodeSpec) -> Result<(), BoundError> {
    if s.q != 2 || s.alpha != 3 {
        return Err(na(id, "needs q = 2 and alpha = 3"));
    }
    Ok(())
}

/// 2^(n−2k+1) for q = 2, α = 3, δ = k+1, k ≥ 2, n ≥ 2k+1.
pub fn construction1_size(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "lifted-identity-shifts";
    needs_q2_alpha3(ID, s)?;
    if s.delta != s.k + 1 || s.k < 2 || s.n < 2 * s.k + 1 {
        return Err(na(ID, "needs delta = k+1, k >= 2, n >= 2k+1"));
    }
    Ok(pow(2, s.n - 2 * s.k + 1))
}

/// 2^(tℓ) for q = 2, α = 3, k ≥ 3⌈γ/2⌉, n ≥ 2k+γ.
pub fn construction2_size(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "shifted-indicator-blocks";
    needs_q2_alpha3(ID, s)?;
    let g = gamma_of(s).ok_or_else(|| na(ID, "needs delta > k"))?;
    let m = g.div_ceil(2);
    if s.k < 3 * m || s.n < 2 * s.k + g {
        return Err(na(ID, "needs k >= 3 ceil(gamma/2), n >= 2k+gamma"));
    }
    Ok(pow(2, block_count(s.n, s.k) * (s.k / m)))
}

/// 2^(2t) for q = 2, α = 3, γ+1 ≤ k < 3⌈γ/2⌉, n ≥ 2k+γ.
pub fn construction3_size(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "two-generator-blocks";
    needs_q2_alpha3(ID, s)?;
    let g = gamma_of(s).ok_or_else(|| na(ID, "needs delta > k"))?;
    if !(g < s.k && s.k < 3 * g.div_ceil(2)) || s.n < 2 * s.k + g {
        return Err(na(ID, "needs gamma+1 <= k < 3 ceil(gamma/2), n >= 2k+gamma"));
    }
    Ok(pow(2, 2 * block_count(s.n, s.k)))
}

/// 2^⌊(n−k)/k⌋ for q = 2, α = 3, δ = 2k, n ≥ 3k.
pub fn construction4_size(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "identity-blocks";
    needs_q2_alpha3(ID, s)?;
    if s.delta != 2 * s.k || s.n < 3 * s.k {
        return Err(na(ID, "needs delta = 2k, n >= 3k"));
    }
    Ok(pow(2, (s.n - s.k) / s.k))
}

/// q^(tℓ), ℓ = ⌊k/γ⌋, for q > 2, α = 3, n ≥ 2k+γ.
pub fn construction5_size(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "squared-indicator-blocks";
    if s.q <= 2 || s.alpha != 3 {
        return Err(na(ID, "needs q > 2 and alpha = 3"));
    }
    let g = gamma_of(s).ok_or_else(|| na(ID, "needs delta > k"))?;
    if g > s.k || s.n < 2 * s.k + g {
        return Err(na(ID, "needs gamma <= k, n >= 2k+gamma"));
    }
    Ok(pow(s.q, block_count(s.n, s.k) * (s.k / g)))
}

/// ⌈q^((n−αk+1)/(α−1))⌉ for k | n, α ≥ 3, n ≥ αk, δ = (α−1)k.
pub fn greedy_spread_bound(s: &CodeSpec) -> Result<BigUint, BoundError> {
    const ID: &str = "greedy-spread";
    if s.n % s.k != 0 || s.alpha < 3 || s.n < s.alpha * s.k || s.delta != (s.alpha - 1) * s.k {
        return Err(na(ID, "needs k | n, alpha >= 3, n >= alpha k, delta = (alpha-1)k"));
    }
    let x = pow(s.q, s.n + 1 - s.alpha * s.k);
    let d = (s.alpha - 1) as u32;
    let r = x.nth_root(d);
    Ok(if r.pow(d) < x { r + 1u32 } else { r })
}

/// Every applicable numeric lower bound.
pub fn lower_bound_formulas(s: &CodeSpec) -> Vec<BoundEntry> {
    vec![
        BoundEntry::from_result("rank-metric", Side::Lower, rank_metric_lower_bound(s)),
        BoundEntry::from_result("rank-metric-recursive", Side::Lower, recursive_lower_bound(s)),
        BoundEntry::from_result("lifted-identity-shifts", Side::Lower, construction1_size(s)),
        BoundEntry::from_result("shifted-indicator-blocks", Side::Lower, construction2_size(s)),
        BoundEntry::from_result("two-generator-blocks", Side::Lower, construction3_size(s)),
        BoundEntry::from_result("identity-blocks", Side::Lower, construction4_size(s)),
        BoundEntry::from_result("squared-indicator-blocks", Side::Lower, construction5_size(s)),
        BoundEntry::from_result("greedy-spread", Side::Lower, greedy_spread_bound(s)),
    ]
}

/// Evaluates every bound and asymptotic marker for `s`.
pub fn bound_report(s: &CodeSpec) -> BoundReport {
    let mut entries = vec![
        BoundEntry::from_result("etzion", Side::Upper, etzion_bound(s)),
        BoundEntry::from_result("liu", Side::Upper, liu_bound(s)),
        BoundEntry::from_result("independent-configuration", Side::Upper, ic_bound(s)),
        BoundEntry::from_result(
            "bonferroni",
            Side::Upper,
            if s.k == 2 && s.delta == 2 && s.alpha == 3 {
                bonferroni_bound(s.q, s.n)
            } else {
                Err(na("bonferroni", "needs k = delta = 2, alpha = 3"))
            },
        ),
        BoundEntry::from_result("h-subspace-counting", Side::Upper, counting_bound(s)),
        BoundEntry::from_result("refined-counting", Side::Upper, refined_counting_bound(s)),
        BoundEntry::from_result("berge-path", Side::Upper, berge_path_bound(s)),
        BoundEntry::from_result("trivial-grassmannian", Side::Upper, Ok(trivial_bound(s))),
        BoundEntry::marker(
            "berge-cycle",
            Side::Upper,
            if s.alpha >= 3 && s.delta >= (s.alpha - 1) * (s.k - 1) {
                Ok(berge_cycle_rate(s.alpha))
            } else {
                Err("needs alpha >= 3, delta >= (alpha-1)(k-1)".into())
            },
        ),
        BoundEntry::marker(
            "six-three",
            Side::Upper,
            if s.k == 2 && s.delta == 2 && s.alpha == 3 {
                Ok("o(q^(2n))")
            } else {
                Err("needs k = delta = 2, alpha = 3".into())
            },
        ),
        BoundEntry::marker(
            "linear-cycle",
            Side::Upper,
            if s.alpha >= 3 && s.delta + 2 > s.alpha {
                Ok(linear_cycle_rate(s.alpha))
            } else {
                Err("needs alpha >= 3, delta > alpha-2".into())
            },
        ),
    ];
    entries.extend(lower_bound_formulas(s));
    entries.push(BoundEntry::marker(
        "random-deletion-rate",
        Side::Lower,
        Ok("Omega(q^((k-(delta-1)/(alpha-1))n))"),
    ));
    entries.push(BoundEntry::marker(
        "two-stage-rate",
        Side::Lower,
        if s.alpha >= 3 && (s.alpha - 1).gcd(&(s.delta - 1)) == 1 {
            Ok("Omega(q^((k-(delta-1)/(alpha-1))n) n^(1/(alpha-1)))")
        } else {
            Err("needs alpha >= 3, gcd(alpha-1, delta-1) = 1".into())
        },
    ));
    let mut report = BoundReport {
        spec: *s,
        entries,
        consistent: true,
    };
    report.consistent = match (report.max_lower(), report.min_upper()) {
        (Some((_, lo)), Some((_, hi))) => lo <= hi,
        _ => true,
    };
    report
}

fn berge_cycle_rate(alpha: usize) -> &'static str {
    match alpha / 2 {
        1 => "O(q^(2n))",
        2 => "O(q^((1+1/2)n))",
        3 => "O(q^((1+1/3)n))",
        _ => "O(q^((1+1/floor(alpha/2))n))",
    }
}

fn linear_cycle_rate(alpha: usize) -> &'static str {
    match alpha / 2 {
        1 => "O(q^(2(k-1)n))",
        2 => "O(q^((1+1/2)(k-1)n))",
        _ => "O(q^((1+1/floor(alpha/2))(k-1)n))",
    }
}

/// Ratio [n,k]_q / q^(k(n−k)), exactly.
pub fn gaussian_ratio(n: usize, k: usize, q: u64) -> BigRational {
    BigRational::new(gb(n, k, q).into(), pow(q, k * (n - k)).into())
}

/// Upper constant in q^(k(n−k)) ≤ [n,k]_q < τ·q^(k(n−k)).
pub fn tau() -> BigRational {
    BigRational::new(348.into(), 100.into())
}

/// Whether the exact ratio lies in [1, τ).
pub fn gaussian_sandwich_holds(n: usize, k: usize, q: u64) -> bool {
    let r = gaussian_ratio(n, k, q);
    r >= BigRational::one() && r < tau()
}

/// Convenience for tables: value as u128 when it fits.
pub fn as_u128(v: &BigUint) -> Option<u128> {
    v.to_u128()
}
