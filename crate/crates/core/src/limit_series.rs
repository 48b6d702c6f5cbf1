//! Limits `n -> infinity` of the law of `S_n` as truncated series.
//!
//! With `D_2(i,k)` the level masses of words of length `i`,
//!
//! ```text
//! lim P(S_n >= k) = m_2^k + a_k,   a_k = sum_{i>k} sum_{j<k} D_2(i,j)
//! lim P(S_n  = k) = m_2^k - b_k,   b_k = sum_{i>k} D_2(i,k)
//! ```
//!
//! The `i`-th term of `a_k` is the mass of `R_{2i}(i)` minus overlaps of size
//! `k..i`, so it never exceeds `P(R_{2i}(i)) = m_2^i`. The `i`-th term of `b_k`
//! lives inside `R_{2i}(i) & R_{2i}(k)`, of mass `m_4^k m_2^{i-2k}` once
//! `i >= 2k`. Summing these majorants over the omitted indices gives the tail
//! bounds reported with every value, and the truncation point is the first
//! index where that bound drops below the requested tolerance.

use serde::Serialize;

use crate::alphabet::Theta;
use crate::census::{Budget, LevelCensus, Weigher};
use crate::error::{Error, Result};
use crate::exact_dist::{Exhaustive, FiniteTerms, LevelMass};
use crate::scalar::Scalar;

/// Which majorant of the omitted terms produced a tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    /// `sum_{i>I} m_2^i`.
    HalfOverlapMass,
    /// `sum_{i>I, i<2k} m_2^i + sum_{i>=max(I+1,2k)} m_4^k m_2^{i-2k}`.
    DoubleOverlapMass,
}

/// Side of the computed value on which the omitted mass lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailSide {
    /// The omitted terms are added: the limit lies in `[value, value + tail]`.
    Above,
    /// The omitted terms are subtracted: the limit lies in `[value - tail, value]`.
    Below,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    pub k: usize,
    pub value: T,
    /// Largest series index `I` included.
    pub terms_used: usize,
    pub tail_bound: f64,
    pub bound_source: BoundSource,
    pub tail_side: TailSide,
    /// Letter mass dropped when truncating a countable alphabet. The series
    /// are evaluated for the truncated law; this is reported, not folded into
    /// `tail_bound`.
    pub extra_error: f64,
    /// Set when the requested tolerance could not be reached within the
    /// enumeration budget.
    pub flagged: bool,
}

impl<T: Scalar> TruncatedSeries<T> {
    /// Interval certified to contain the limit.
    pub fn interval(&self) -> (f64, f64) {
        let v = self.value.as_f64();
        match self.tail_side {
            TailSide::Above => (v, v + self.tail_bound),
            TailSide::Below => (v - self.tail_bound, v),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "value": self.value.to_json(),
            "value_f64": self.value.as_f64(),
            "terms_used": self.terms_used,
            "tail_bound": self.tail_bound,
            "bound_source": self.bound_source,
            "tail_side": self.tail_side,
            "extra_error": self.extra_error,
            "flagged": self.flagged,
        })
    }
}

/// Bound on `sum_{i>I}` of the `a_k` terms.
pub fn cdf_tail_bound(theta: &Theta, terms: usize) -> f64 {
    let m2 = theta.moment(2);
    m2.powi(terms as i32 + 1) / (1.0 - m2)
}

/// Bound on `sum_{i>I}` of the `b_k` terms.
pub fn pmf_tail_bound(theta: &Theta, k: usize, terms: usize) -> f64 {
    let m2 = theta.moment(2);
    let m4 = theta.moment(4);
    let head: f64 = (terms + 1..2 * k).map(|i| m2.powi(i as i32)).sum();
    let start = (terms + 1).max(2 * k);
    head + m4.powi(k as i32) * m2.powi((start - 2 * k) as i32) / (1.0 - m2)
}

/// Evaluates the limit series from one shared level-mass census, rebuilt
/// only when a deeper truncation is requested.
pub struct SeriesEngine<'a> {
    theta: &'a Theta,
    budget: Budget,
    census: Option<LevelCensus>,
}

impl<'a> SeriesEngine<'a> {
    pub fn new(theta: &'a Theta, budget: Budget) -> Self {
        SeriesEngine {
            theta,
            budget,
            census: None,
        }
    }

    pub fn theta(&self) -> &Theta {
        self.theta
    }

    /// Deepest truncation index the budget allows.
    pub fn max_terms(&self) -> usize {
        self.budget.max_length(self.theta.size()).min(63)
    }

    fn census(&mut self, depth: usize) -> Result<&LevelCensus> {
        let stale = self.census.as_ref().is_none_or(|c| c.max_len < depth);
        if stale {
            self.census = Some(LevelCensus::build(self.theta, 1, depth, self.budget)?);
        }
        Ok(self.census.as_ref().unwrap())
    }

    /// `D_q(i,k)` for `k <= k_max` and every `i` the shared census covers (at least `i_max`).
    pub fn level_mass<T: Scalar>(&mut self, q: u32, i_max: usize, k_max: usize) -> Result<LevelMass<T>> {
        let theta = self.theta;
        let census = self.census(i_max)?;
        LevelMass::from_census(census, theta, q, k_max)
    }

    /// `sum_{i=from}^{to} sum_{k in levels} D_2(i,k)`.
    fn sum_rows<T: Scalar>(&mut self, from: usize, to: usize, levels: std::ops::Range<usize>) -> Result<T> {
        if from > to {
            return Ok(T::zero());
        }
        let theta = self.theta;
        let census = self.census(to)?;
        let weigher = Weigher::<T>::new(theta, &census.composer, 2)?;
        let mut total = T::zero();
        for i in from..=to {
            for k in levels.clone() {
                total = total + weigher.mass(census.counts(i, k), i);
            }
        }
        Ok(total)
    }

    fn require_positive(k: usize) -> Result<()> {
        if k == 0 {
            return Err(Error::InvalidArgument("limit series are indexed by k >= 1".into()));
        }
        Ok(())
    }

    /// `m_2^k + sum_{i=k+1}^{I} sum_{j<k} D_2(i,j)`.
    pub fn cdf_tail_at<T: Scalar>(&mut self, k: usize, terms: usize) -> Result<TruncatedSeries<T>> {
        Self::require_positive(k)?;
        let terms = terms.max(k);
        let partial: T = self.sum_rows(k + 1, terms, 0..k)?;
        Ok(TruncatedSeries {
            k,
            value: self.theta.moment_in::<T>(2)?.powu(k as u32) + partial,
            terms_used: terms,
            tail_bound: cdf_tail_bound(self.theta, terms),
            bound_source: BoundSource::HalfOverlapMass,
            tail_side: TailSide::Above,
            extra_error: self.theta.tail_mass(),
            flagged: false,
        })
    }

    /// `m_2^k - sum_{i=k+1}^{I} D_2(i,k)`.
    pub fn pmf_at<T: Scalar>(&mut self, k: usize, terms: usize) -> Result<TruncatedSeries<T>> {
        Self::require_positive(k)?;
        let terms = terms.max(k);
        let partial: T = self.sum_rows(k + 1, terms, k..k + 1)?;
        Ok(TruncatedSeries {
            k,
            value: self.theta.moment_in::<T>(2)?.powu(k as u32) - partial,
            terms_used: terms,
            tail_bound: pmf_tail_bound(self.theta, k, terms),
            bound_source: BoundSource::DoubleOverlapMass,
            tail_side: TailSide::Below,
            extra_error: self.theta.tail_mass(),
            flagged: false,
        })
    }

    /// `1 - m_2 - sum_{i=2}^{I} D_2(i,0)`, the limit of `P(S_n = 0)`.
    pub fn zero_at<T: Scalar>(&mut self, terms: usize) -> Result<TruncatedSeries<T>> {
        let terms = terms.max(1);
        let partial: T = self.sum_rows(2, terms, 0..1)?;
        Ok(TruncatedSeries {
            k: 0,
            value: T::one() - self.theta.moment_in::<T>(2)? - partial,
            terms_used: terms,
            tail_bound: cdf_tail_bound(self.theta, terms),
            bound_source: BoundSource::HalfOverlapMass,
            tail_side: TailSide::Below,
            extra_error: self.theta.tail_mass(),
            flagged: false,
        })
    }

    /// Smallest `I >= floor` whose tail bound is at most `tol`, capped by the budget.
    fn choose_terms(&self, floor: usize, tol: f64, bound: impl Fn(usize) -> f64) -> (usize, bool) {
        let cap = self.max_terms().max(floor);
        match (floor..=cap).find(|&i| bound(i) <= tol) {
            Some(i) => (i, false),
            None => (cap, true),
        }
    }

    pub fn limit_cdf_tail<T: Scalar>(&mut self, k: usize, tol: f64) -> Result<TruncatedSeries<T>> {
        Self::require_positive(k)?;
        let theta = self.theta;
        let (terms, flagged) = self.choose_terms(k, tol, |i| cdf_tail_bound(theta, i));
        let mut series = self.cdf_tail_at(k, terms)?;
        series.flagged = flagged;
        Ok(series)
    }

    pub fn limit_pmf<T: Scalar>(&mut self, k: usize, tol: f64) -> Result<TruncatedSeries<T>> {
        Self::require_positive(k)?;
        let theta = self.theta;
        let (terms, flagged) = self.choose_terms(k, tol, |i| pmf_tail_bound(theta, k, i));
        let mut series = self.pmf_at(k, terms)?;
        series.flagged = flagged;
        Ok(series)
    }

    pub fn limit_zero<T: Scalar>(&mut self, tol: f64) -> Result<TruncatedSeries<T>> {
        let theta = self.theta;
        let (terms, flagged) = self.choose_terms(1, tol, |i| cdf_tail_bound(theta, i));
        let mut series = self.zero_at(terms)?;
        series.flagged = flagged;
        Ok(series)
    }
}

/// `lim P(S_n >= k)` with a certified tail bound.
pub fn limit_cdf_tail<T: Scalar>(k: usize, theta: &Theta, tol: f64, budget: Budget) -> Result<TruncatedSeries<T>> {
    SeriesEngine::new(theta, budget).limit_cdf_tail(k, tol)
}

/// `lim P(S_n = k)` with a certified tail bound.
pub fn limit_pmf<T: Scalar>(k: usize, theta: &Theta, tol: f64, budget: Budget) -> Result<TruncatedSeries<T>> {
    SeriesEngine::new(theta, budget).limit_pmf(k, tol)
}

/// `(a_{k,n}, b_{k,n})` from their set-algebra definitions.
pub fn finite_n_terms<T: Scalar>(k: usize, n: usize, theta: &Theta, budget: Budget) -> Result<FiniteTerms<T>> {
    Exhaustive::new(theta, budget).finite_terms(k, n)
}
