//! Convergence rates and bounds on the correction terms.
//!
//! * velocity: `|P(S_n = k) - lim P(S_n = k)| <= C m_2^{n/2} r^k` for
//!   `n >= 4k`, with `r = m_3 / m_2^{3/2} < 1` and `C = 2 m_2 / (m_2 - rho^2)`;
//!   summing over `j >= k` gives the tail version `C m_2^{n/2} r^k / (1 - r)`.
//! * closed-form majorants of `a_{k,n}`, `b_{k,n}`, `a_k`, `b_k`, in the general
//!   form and in the two-letter and uniform specialisations.
//! * the sandwich `m_2^{k+1}/(1-m_2) - A(k) <= a_k <= m_2^{k+1}/(1-m_2)` with
//!   `A(k) = m_4^k/(1-m_4) (m_4 + 1/(1-m_2))`, which decides whether `m_2^k`
//!   or `a_k` dominates `P(S >= k)` in the limit.
//!
//! Every comparison against a limit uses the certified interval of the
//! truncated series, so a verdict is either proven or reported inconclusive.

use std::ops::RangeInclusive;

use num_rational::BigRational;
use serde::Serialize;

use crate::alphabet::Theta;
use crate::census::Budget;
use crate::error::{Error, Result};
use crate::exact_dist::{Exhaustive, FiniteTerms};
use crate::limit_series::{SeriesEngine, TruncatedSeries};
use crate::scalar::Scalar;
use crate::zero_words::limit_zero;

/// `C = 2 m_2 / (m_2 - rho^2)`.
pub fn velocity_constant(theta: &Theta) -> f64 {
    let m2 = theta.moment(2);
    let rho = theta.rho();
    2.0 * m2 / (m2 - rho * rho)
}

/// `r = m_3 / m_2^{3/2}`, below one for every valid alphabet.
pub fn moment_ratio(theta: &Theta) -> f64 {
    theta.moment(3) / theta.moment(2).powf(1.5)
}

fn check_velocity_range(n: usize, k: usize) -> Result<()> {
    if n == 0 || n < 4 * k {
        return Err(Error::InvalidArgument(format!(
            "velocity bounds need n >= max(1, 4k), got n={n}, k={k}"
        )));
    }
    Ok(())
}

/// `C m_2^{n/2} r^k`, bounding `|P(S_n = k) - lim P(S_n = k)|`.
pub fn velocity_bound(n: usize, k: usize, theta: &Theta) -> Result<f64> {
    check_velocity_range(n, k)?;
    Ok(velocity_constant(theta) * theta.moment(2).powf(n as f64 / 2.0) * moment_ratio(theta).powi(k as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdfVelocityBound {
    /// `C m_2^{n/2} r^k / (1 - r)`: the pmf bound summed over `j >= k`.
    pub summed: f64,
    /// `C m_2^{n/2} r^k m_2^{3/2} / (m_3 - m_2^{3/2})` as usually quoted.
    pub quoted: f64,
    /// The quoted form is only meaningful when positive, which needs
    /// `m_3 > m_2^{3/2}`; that never happens for a valid alphabet.
    pub quoted_usable: bool,
}

/// Bound on `|P(S_n >= k) - lim P(S_n >= k)|`.
pub fn velocity_bound_cdf(n: usize, k: usize, theta: &Theta) -> Result<CdfVelocityBound> {
    let pmf = velocity_bound(n, k, theta)?;
    let m2_32 = theta.moment(2).powf(1.5);
    let quoted = pmf * m2_32 / (theta.moment(3) - m2_32);
    Ok(CdfVelocityBound {
        summed: pmf / (1.0 - moment_ratio(theta)),
        quoted,
        quoted_usable: quoted.is_finite() && quoted > 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Pmf,
    Tail,
}

/// One `(n, k)` cell of a velocity report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VelocityCell {
    pub quantity: Quantity,
    pub n: usize,
    pub k: usize,
    pub exact: f64,
    /// Truncated limit value and the width of its certified interval.
    pub limit: f64,
    pub limit_tail: f64,
    /// `|exact - limit|`.
    pub measured: f64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VelocityReport {
    pub cells: Vec<VelocityCell>,
}

impl VelocityReport {
    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    pub fn max_ratio(&self, quantity: Quantity) -> f64 {
        self.cells
            .iter()
            .filter(|c| c.quantity == quantity)
            .map(|c| c.ratio)
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,n,k,measured,bound,ratio\n");
        for c in &self.cells {
            let q = match c.quantity {
                Quantity::Pmf => "pmf",
                Quantity::Tail => "tail",
            };
            out.push_str(&format!(
                "{q},{},{},{:e},{:e},{:e}\n",
                c.n, c.k, c.measured, c.bound, c.ratio
            ));
        }
        out
    }
}

/// Exact law values as `f64`, computed in rational arithmetic when possible.
fn exact_pmf(ex: &mut Exhaustive<'_>, n: usize) -> Result<Vec<f64>> {
    if ex.theta().is_exact() {
        Ok(ex
            .distribution::<BigRational>(n)?
            .pmf
            .iter()
            .map(Scalar::as_f64)
            .collect())
    } else {
        Ok(ex.distribution::<f64>(n)?.pmf)
    }
}

fn finite_terms_f64(ex: &mut Exhaustive<'_>, k: usize, n: usize) -> Result<(f64, f64)> {
    if ex.theta().is_exact() {
        let t: FiniteTerms<BigRational> = ex.finite_terms(k, n)?;
        Ok((t.a.as_f64(), t.b.as_f64()))
    } else {
        let t: FiniteTerms<f64> = ex.finite_terms(k, n)?;
        Ok((t.a, t.b))
    }
}

/// Velocity bounds on every cell `n in lengths`, `k_min <= k <= n/4`.
///
/// A cell passes when `|exact - limit| <= bound + tail`, `limit` being the
/// truncated series value and `tail` its certified error.
pub fn velocity_report(
    theta: &Theta,
    lengths: RangeInclusive<usize>,
    k_min: usize,
    tol: f64,
    budget: Budget,
) -> Result<VelocityReport> {
    let mut ex = Exhaustive::new(theta, budget);
    let mut engine = SeriesEngine::new(theta, budget);
    let k_top = lengths.end() / 4;
    let mut pmf_limits = Vec::new();
    let mut tail_limits = Vec::new();
    for k in k_min..=k_top {
        if k == 0 {
            let zero = limit_zero::<f64>(theta, tol, budget)?.series;
            pmf_limits.push((zero.value, zero.tail_bound));
            tail_limits.push((1.0, 0.0));
        } else {
            let p: TruncatedSeries<f64> = engine.limit_pmf(k, tol)?;
            let t: TruncatedSeries<f64> = engine.limit_cdf_tail(k, tol)?;
            pmf_limits.push((p.value, p.tail_bound));
            tail_limits.push((t.value, t.tail_bound));
        }
    }
    let mut cells = Vec::new();
    for n in lengths {
        if n == 0 || n / 4 < k_min {
            continue;
        }
        let pmf = exact_pmf(&mut ex, n)?;
        for k in k_min..=n / 4 {
            let (p_lim, p_tail) = pmf_limits[k - k_min];
            let (t_lim, t_tail) = tail_limits[k - k_min];
            let pmf_bound = velocity_bound(n, k, theta)?;
            let tail_bound = velocity_bound_cdf(n, k, theta)?.summed;
            let exact_tail: f64 = pmf[k..].iter().sum();
            for (quantity, exact, limit, tail, bound) in [
                (Quantity::Pmf, pmf[k], p_lim, p_tail, pmf_bound),
                (Quantity::Tail, exact_tail, t_lim, t_tail, tail_bound),
            ] {
                let measured = (exact - limit).abs();
                cells.push(VelocityCell {
                    quantity,
                    n,
                    k,
                    exact,
                    limit,
                    limit_tail: tail,
                    measured,
                    bound,
                    ratio: measured / bound,
                    pass: measured <= bound + tail,
                });
            }
        }
    }
    Ok(VelocityReport { cells })
}

/// Which set of closed-form majorants to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundFamily {
    /// Stated for every alphabet.
    General,
    /// Written out in `p_1, p_2` for two-letter alphabets.
    TwoLetter,
    /// Written out in `s` for the uniform law on `s` letters.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

/// `lhs <= rhs`, with `lhs` known to lie in `[lhs_lo, lhs_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub lhs_lo: f64,
    pub lhs_hi: f64,
    pub rhs: f64,
    /// `rhs - lhs_hi`; negative when the bound is not certified.
    pub slack: f64,
    pub verdict: Verdict,
}

impl BoundCheck {
    fn new(name: &'static str, (lhs_lo, lhs_hi): (f64, f64), rhs: f64) -> Self {
        let verdict = if lhs_hi <= rhs {
            Verdict::Holds
        } else if lhs_lo > rhs {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        };
        BoundCheck {
            name,
            lhs_lo,
            lhs_hi,
            rhs,
            slack: rhs - lhs_hi,
            verdict,
        }
    }
}

/// Right-hand sides `[a_{k,n}, b_{k,n}, a_k, b_k]` of one bound family.
pub fn correction_majorants(family: BoundFamily, theta: &Theta, k: usize, n: usize) -> Result<[f64; 4]> {
    let m2 = theta.moment(2);
    let m4 = theta.moment(4);
    let r = moment_ratio(theta);
    let (k32, n32) = (k as i32, n as i32);
    match family {
        BoundFamily::General => {
            let rho = theta.rho();
            Ok([
                (m2.powi(k32 + 1) - m2.powi(n32)) / (1.0 - m2),
                m4.powi(k32 + 1) / (1.0 - m2) + 2.0 * m2.powf(n as f64 / 2.0 + 1.0) / (m2 - rho * rho) * r.powi(k32),
                m2.powi(k32 + 1) / (1.0 - m2),
                m4.powi(k32 + 1) / (1.0 - m2),
            ])
        }
        BoundFamily::TwoLetter => {
            if theta.size() != 2 {
                return Err(Error::InvalidArgument(
                    "two-letter bounds need exactly two letters".into(),
                ));
            }
            let p2 = theta.probs()[1];
            Ok([
                (m2.powi(k32 + 1) + m2.powi(n32)) / (1.0 - m2),
                m4.powi(k32 + 1) / (1.0 - m2) + 2.0 * m2.powi(n32 + 1) / (p2 * p2) * r.powi(k32),
                m2.powi(k32 + 1) / (1.0 - m2),
                m4.powi(k32 + 1) / (1.0 - m2),
            ])
        }
        BoundFamily::Uniform => {
            if !theta.is_uniform() {
                return Err(Error::InvalidArgument("uniform bounds need a uniform alphabet".into()));
            }
            let s = theta.size() as f64;
            let (k, n) = (k as f64, n as f64);
            Ok([
                s.powf(n - k) / (s.powf(n) * (s - 1.0)),
                (s.powf(-(3.0 * k + 2.0)) + 2.0 * s.powf(-(n + k) / 2.0 + 1.0)) / (s - 1.0),
                1.0 / (s.powf(k) * (s - 1.0)),
                s.powf(-(3.0 * k + 2.0)) / (s - 1.0),
            ])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionReport {
    pub family: BoundFamily,
    pub k: usize,
    pub n: usize,
    pub checks: Vec<BoundCheck>,
}

impl CorrectionReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Holds)
    }
}

/// Evaluates one family of majorants at `(k, n)`: the finite-`n` terms
/// exactly, the limits through certified series intervals.
pub fn correction_bounds(
    family: BoundFamily,
    k: usize,
    n: usize,
    ex: &mut Exhaustive<'_>,
    engine: &mut SeriesEngine<'_>,
    tol: f64,
) -> Result<CorrectionReport> {
    let theta = ex.theta().clone();
    let rhs = correction_majorants(family, &theta, k, n)?;
    let (a_kn, b_kn) = finite_terms_f64(ex, k, n)?;
    let m2k = theta.moment(2).powi(k as i32);
    let tail: TruncatedSeries<f64> = engine.limit_cdf_tail(k, tol)?;
    let pmf: TruncatedSeries<f64> = engine.limit_pmf(k, tol)?;
    // a_k = lim P(S >= k) - m_2^k and b_k = m_2^k - lim P(S = k)
    let (t_lo, t_hi) = tail.interval();
    let (p_lo, p_hi) = pmf.interval();
    let a_k = (t_lo - m2k, t_hi - m2k);
    let b_k = (m2k - p_hi, m2k - p_lo);
    Ok(CorrectionReport {
        family,
        k,
        n,
        checks: vec![
            BoundCheck::new("a_kn", (a_kn, a_kn), rhs[0]),
            BoundCheck::new("b_kn", (b_kn, b_kn), rhs[1]),
            BoundCheck::new("a_k", a_k, rhs[2]),
            BoundCheck::new("b_k", b_k, rhs[3]),
        ],
    })
}

/// How `m_2^k > a_k` was established for one `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// `m_2^{k+1}/(1-m_2) < m_2^k`, i.e. `m_2 < 1/2`.
    ClosedForm,
    /// The upper end of the series interval for `a_k` is below `m_2^k`.
    Series,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeadRow {
    pub k: usize,
    pub m2_k: f64,
    /// `m_2^{k+1}/(1-m_2) - A(k)`.
    pub lower: f64,
    /// `m_2^{k+1}/(1-m_2)`.
    pub upper: f64,
    pub a_k: Option<(f64, f64)>,
    pub leading: Certificate,
    /// Whether the series interval for `a_k` reaches up to `lower`;
    /// `Some(false)` means the sandwich's lower end is refuted at this `k`.
    pub lower_consistent: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeadTermReport {
    pub m2: f64,
    pub m4: f64,
    pub rows: Vec<LeadRow>,
    /// Smallest `k` with `lower(k) > m_2^k` (from then on `a_k > m_2^k`);
    /// `None` when `m_2 <= 1/2`.
    pub k0_analytic: Option<usize>,
    /// Smallest `k0` such that the series intervals show `a_k > m_2^k` for
    /// every `k0 < k <= k_max`, if the series resolve it.
    pub k0_observed: Option<usize>,
    /// Rows `k > k0_analytic` where the series prove `m_2^k > a_k`, i.e.
    /// counterexamples to the crossing the sandwich predicts.
    pub k0_counterexamples: Vec<usize>,
    /// For `m_2 > 1/2`: whether `a_1 <= p_1 (1 - m_2) < m_2` holds in closed form.
    pub a1_below_m2: Option<bool>,
    /// `|log((1-m_4)^2 / (2 m_2 - 1))| / |log(m_4 / m_2)|`, quoted for two-letter
    /// alphabets with `m_2 > 1/2`. Informational.
    pub two_letter_k0_formula: Option<f64>,
}

/// `A(k) = m_4^k / (1 - m_4) * (m_4 + 1 / (1 - m_2))`.
pub fn sandwich_gap<T: Scalar>(theta: &Theta, k: usize) -> Result<T> {
    let m2 = theta.moment_in::<T>(2)?;
    let m4 = theta.moment_in::<T>(4)?;
    let one = T::one();
    Ok(m4.powu(k as u32) / (one.clone() - m4.clone()) * (m4 + one.clone() / (one - m2)))
}

/// `(lower(k), upper(k), m_2^k)` of the sandwich.
pub fn sandwich<T: Scalar>(theta: &Theta, k: usize) -> Result<(T, T, T)> {
    let m2 = theta.moment_in::<T>(2)?;
    let m2k = m2.powu(k as u32);
    let upper = m2k.clone() * m2.clone() / (T::one() - m2);
    let lower = upper.clone() - sandwich_gap::<T>(theta, k)?;
    Ok((lower, upper, m2k))
}

const K0_SEARCH_LIMIT: usize = 100_000;

fn analytic_k0<T: Scalar>(theta: &Theta) -> Result<Option<usize>> {
    let m2 = theta.moment_in::<T>(2)?;
    let half = T::one() / T::from_u64(2);
    if m2 <= half {
        return Ok(None);
    }
    // lower(k) > m_2^k  <=>  (m_2/m_4)^k (2 m_2 - 1)/(1 - m_2) > (m_4 + 1/(1-m_2))/(1 - m_4)
    let m4 = theta.moment_in::<T>(4)?;
    let one = T::one();
    let lhs_coeff = (m2.clone() + m2.clone() - one.clone()) / (one.clone() - m2.clone());
    let rhs = (m4.clone() + one.clone() / (one.clone() - m2.clone())) / (one - m4.clone());
    let growth = m2 / m4;
    let mut lhs = lhs_coeff * growth.clone();
    for k in 1..=K0_SEARCH_LIMIT {
        if lhs > rhs {
            return Ok(Some(k));
        }
        lhs = lhs * growth.clone();
    }
    Ok(None)
}

fn lead_analysis<T: Scalar>(theta: &Theta, k_max: usize, engine: &mut SeriesEngine<'_>) -> Result<LeadTermReport> {
    let m2 = theta.moment(2);
    let m4 = theta.moment(4);
    let m2_exact = theta.moment_in::<T>(2)?;
    let half = T::one() / T::from_u64(2);
    let terms = engine.max_terms();
    let mut rows = Vec::new();
    for k in 1..=k_max {
        let (lower, upper, m2k) = sandwich::<T>(theta, k)?;
        let a_k = if terms > k {
            let s: TruncatedSeries<f64> = engine.cdf_tail_at(k, terms)?;
            let (lo, hi) = s.interval();
            let m2k = m2.powi(k as i32);
            Some((lo - m2k, hi - m2k))
        } else {
            None
        };
        let leading = if m2_exact < half {
            Certificate::ClosedForm
        } else if a_k.is_some_and(|(_, hi)| hi < m2k.as_f64()) {
            Certificate::Series
        } else {
            Certificate::None
        };
        let lower = lower.as_f64();
        rows.push(LeadRow {
            k,
            m2_k: m2k.as_f64(),
            lower,
            upper: upper.as_f64(),
            a_k,
            leading,
            lower_consistent: a_k.map(|(_, hi)| hi >= lower),
        });
    }
    let resolved_above = |row: &LeadRow| row.a_k.is_some_and(|(lo, _)| lo > row.m2_k);
    let k0_observed = if m2_exact > half {
        let unresolved = rows.iter().rev().find(|r| !resolved_above(r)).map(|r| r.k);
        match unresolved {
            Some(k) if k == k_max => None,
            Some(k) => Some(k),
            None => Some(0),
        }
    } else {
        None
    };
    let a1_below_m2 = if m2_exact > half {
        let p1 = T::letter_probs(theta)?[0].clone();
        Some(p1 * (T::one() - m2_exact.clone()) < m2_exact.clone())
    } else {
        None
    };
    let two_letter_k0_formula = (theta.size() == 2 && m2 > 0.5)
        .then(|| ((1.0 - m4).powi(2) / (2.0 * m2 - 1.0)).ln().abs() / (m4 / m2).ln().abs());
    let k0_analytic = analytic_k0::<T>(theta)?;
    let k0_counterexamples = match k0_analytic {
        Some(k0) => rows
            .iter()
            .filter(|r| r.k > k0 && r.leading == Certificate::Series)
            .map(|r| r.k)
            .collect(),
        None => Vec::new(),
    };
    Ok(LeadTermReport {
        m2,
        m4,
        rows,
        k0_analytic,
        k0_observed,
        k0_counterexamples,
        a1_below_m2,
        two_letter_k0_formula,
    })
}

/// Which of `m_2^k` and `a_k` leads `lim P(S_n >= k)`, for `k <= k_max`.
/// Closed-form comparisons run in exact arithmetic when the alphabet is rational.
pub fn leadterm_analysis(theta: &Theta, k_max: usize, budget: Budget) -> Result<LeadTermReport> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let mut engine = SeriesEngine::new(theta, budget);
    if theta.is_exact() {
        lead_analysis::<BigRational>(theta, k_max, &mut engine)
    } else {
        lead_analysis::<f64>(theta, k_max, &mut engine)
    }
}

/// Velocity grid, correction majorants and leading-term analysis for one
/// alphabet, as emitted by `overlap bounds`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub velocity: VelocityReport,
    pub max_ratio_pmf: f64,
    pub max_ratio_tail: f64,
    pub corrections: Vec<CorrectionReport>,
    pub lead: LeadTermReport,
}

impl BoundsReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serialises")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# bounds\n\n## velocity\n\n");
        out.push_str(&format!(
            "{} cells, all pass: {}, max ratio pmf {:.3e}, tail {:.3e}\n\n",
            self.velocity.cells.len(),
            self.velocity.all_pass(),
            self.max_ratio_pmf,
            self.max_ratio_tail
        ));
        out.push_str("## correction terms\n\n| family | n | k | term | lhs | rhs | slack | verdict |\n|---|---|---|---|---|---|---|---|\n");
        for r in &self.corrections {
            for c in &r.checks {
                out.push_str(&format!(
                    "| {:?} | {} | {} | {} | [{:.6e}, {:.6e}] | {:.6e} | {:.3e} | {:?} |\n",
                    r.family, r.n, r.k, c.name, c.lhs_lo, c.lhs_hi, c.rhs, c.slack, c.verdict
                ));
            }
        }
        out.push_str(&format!(
            "\n## leading term\n\nm_2 = {}, m_4 = {}, analytic k0 = {:?}, observed k0 = {:?}\n\n| k | m_2^k | lower | upper | certificate |\n|---|---|---|---|---|\n",
            self.lead.m2, self.lead.m4, self.lead.k0_analytic, self.lead.k0_observed
        ));
        for row in &self.lead.rows {
            out.push_str(&format!(
                "| {} | {:.6e} | {:.6e} | {:.6e} | {:?} |\n",
                row.k, row.m2_k, row.lower, row.upper, row.leading
            ));
        }
        out
    }
}

/// Runs every bound over `n in lengths`: velocity cells with `k <= n/4`,
/// correction majorants with `1 <= k <= n/2` for each family that applies,
/// and the leading-term rows up to `k_max`.
pub fn bounds_report(
    theta: &Theta,
    lengths: RangeInclusive<usize>,
    k_max: usize,
    tol: f64,
    budget: Budget,
) -> Result<BoundsReport> {
    let velocity = velocity_report(theta, lengths.clone(), 0, tol, budget)?;
    let mut families = vec![BoundFamily::General];
    if theta.size() == 2 {
        families.push(BoundFamily::TwoLetter);
    }
    if theta.is_uniform() {
        families.push(BoundFamily::Uniform);
    }
    let mut ex = Exhaustive::new(theta, budget);
    let mut engine = SeriesEngine::new(theta, budget);
    let mut corrections = Vec::new();
    for n in lengths.filter(|&n| n >= 2) {
        for k in 1..=n / 2 {
            for &family in &families {
                corrections.push(correction_bounds(family, k, n, &mut ex, &mut engine, tol)?);
            }
        }
    }
    Ok(BoundsReport {
        max_ratio_pmf: velocity.max_ratio(Quantity::Pmf),
        max_ratio_tail: velocity.max_ratio(Quantity::Tail),
        velocity,
        corrections,
        lead: leadterm_analysis(theta, k_max, budget)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::strategies::rational_theta;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn small() -> Budget {
        Budget(1 << 16)
    }

    #[test]
    fn velocity_constant_examples() {
        let u2 = Theta::uniform(2).unwrap();
        assert!((velocity_constant(&u2) - 4.0).abs() < 1e-12);
        let expected = 4.0 / 16.0 * (0.25 / 0.5f64.powf(1.5));
        assert!((velocity_bound(8, 1, &u2).unwrap() - expected).abs() < 1e-15);
        assert!(velocity_bound(7, 2, &u2).is_err());
        let mut prev = f64::INFINITY;
        for n in 4..30 {
            let b = velocity_bound(n, 1, &u2).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn quoted_tail_factor_is_negative() {
        for theta in [
            Theta::uniform(2).unwrap(),
            Theta::from_literals(&["0.7", "0.3"]).unwrap(),
        ] {
            let b = velocity_bound_cdf(8, 1, &theta).unwrap();
            assert!(!b.quoted_usable);
            assert!(b.summed > 0.0);
        }
    }

    #[test]
    fn uniform_family_is_the_general_one() {
        let u3 = Theta::uniform(3).unwrap();
        for k in 1..4 {
            for n in 2 * k..12 {
                let g = correction_majorants(BoundFamily::General, &u3, k, n).unwrap();
                let u = correction_majorants(BoundFamily::Uniform, &u3, k, n).unwrap();
                assert!(u[0] >= g[0] - 1e-15);
                for i in 1..4 {
                    assert!((u[i] - g[i]).abs() < 1e-12 * g[i].max(1e-300), "k={k} n={n} i={i}");
                }
            }
        }
        assert!(correction_majorants(
            BoundFamily::Uniform,
            &Theta::from_literals(&["0.7", "0.3"]).unwrap(),
            1,
            2
        )
        .is_err());
        assert!(correction_majorants(BoundFamily::TwoLetter, &u3, 1, 2).is_err());
    }

    #[test]
    fn sandwich_gap_is_geometric() {
        let t = Theta::from_literals(&["0.9", "0.1"]).unwrap();
        let m4 = t.moment_exact(4).unwrap();
        for k in 1..10 {
            let a = sandwich_gap::<BigRational>(&t, k).unwrap();
            let b = sandwich_gap::<BigRational>(&t, k + 1).unwrap();
            assert_eq!(b / a, m4);
            let (lo, hi, _) = sandwich::<BigRational>(&t, k).unwrap();
            assert!(lo <= hi);
        }
    }

    #[test]
    fn skewed_binary_crossing() {
        let t = Theta::from_literals(&["0.9", "0.1"]).unwrap();
        let report = leadterm_analysis(&t, 12, small()).unwrap();
        assert_eq!(report.k0_analytic, Some(8));
        assert_eq!(report.a1_below_m2, Some(true));
        let formula = report.two_letter_k0_formula.unwrap();
        assert!(formula > 7.0 && formula < 8.0);
        for row in &report.rows {
            assert!(row.lower <= row.upper);
        }
    }

    #[test]
    fn uniform_leading_term() {
        let u3 = Theta::uniform(3).unwrap();
        let report = leadterm_analysis(&u3, 6, small()).unwrap();
        assert!(report.rows.iter().all(|r| r.leading == Certificate::ClosedForm));
        assert_eq!(report.k0_analytic, None);
        let u2 = Theta::uniform(2).unwrap();
        let report = leadterm_analysis(&u2, 6, small()).unwrap();
        assert!(
            report.rows.iter().all(|r| r.leading == Certificate::Series),
            "{report:?}"
        );
    }

    #[test]
    fn finite_n_majorant_of_a_holds() {
        let t = Theta::from_literals(&["0.7", "0.3"]).unwrap();
        let mut ex = Exhaustive::new(&t, small());
        let mut engine = SeriesEngine::new(&t, small());
        for n in 2..=10 {
            for k in 1..=n / 2 {
                let r = correction_bounds(BoundFamily::General, k, n, &mut ex, &mut engine, 1e-6).unwrap();
                assert_eq!(r.checks[0].verdict, Verdict::Holds, "n={n} k={k}");
                assert_eq!(r.checks[2].verdict, Verdict::Holds, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn small_velocity_grid() {
        let u2 = Theta::uniform(2).unwrap();
        let report = velocity_report(&u2, 4..=12, 1, 1e-6, small()).unwrap();
        assert!(report.all_pass());
        assert!(report.max_ratio(Quantity::Pmf) < 1.0);
        assert!(report.to_csv().starts_with("quantity,n,k,measured,bound,ratio\n"));
    }

    proptest! {
        #[test]
        fn sandwich_is_ordered_and_geometric(theta in rational_theta(2..6), k in 1usize..=30) {
            let (lower, upper, _) = sandwich::<BigRational>(&theta, k).unwrap();
            prop_assert!(lower <= upper);
            let a0 = sandwich_gap::<BigRational>(&theta, k).unwrap();
            let a1 = sandwich_gap::<BigRational>(&theta, k + 1).unwrap();
            prop_assert_eq!(a1 / a0, theta.moment_exact(4).unwrap());
        }

        #[test]
        fn velocity_bound_decreases_in_n(theta in rational_theta(2..6), k in 0usize..=4, n in 4usize..=40) {
            let n = n.max(4 * k).max(1);
            let b0 = velocity_bound(n, k, &theta).unwrap();
            let b1 = velocity_bound(n + 1, k, &theta).unwrap();
            prop_assert!(b1 < b0 && b1 > 0.0);
        }
    }
}
