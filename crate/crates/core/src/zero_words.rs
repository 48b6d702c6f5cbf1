//! Words without self-overlap, `{S_n = 0}`.
//!
//! Squaring an unbordered word `w` of length `i` gives the part of
//! `R_{2i}(i)` with no shorter overlap, which yields
//!
//! ```text
//! P(S_2n = 0) = P(S_{2n-2} = 0) - sum_{S_n(w) = 0} P(w)^2,   P(S_{2n+1} = 0) = P(S_2n = 0)
//! ```
//!
//! Under the uniform law on `s` letters the subtracted sum is
//! `P(S_n = 0) / s^n`, and the unbordered counts `u(n) = s^n P(S_n = 0)`
//! obey the integer recursion `u(2n) = s^2 u(2n-2) - u(n)`, `u(2n+1) = s u(2n)`
//! from `u(1) = s`, `u(2) = s^2 - s`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::alphabet::Theta;
use crate::census::Budget;
use crate::error::{Error, Result};
use crate::exact_dist::Exhaustive;
use crate::limit_series::{cdf_tail_bound, BoundSource, SeriesEngine, TailSide, TruncatedSeries};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroProducer {
    Recursion,
    Enumeration,
}

/// `P(S_n = 0)` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSequence<T> {
    values: Vec<T>,
    pub producer: ZeroProducer,
}

impl<T: Scalar> ZeroSequence<T> {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> &T {
        assert!(n >= 1 && n <= self.n_max(), "length {n} outside 1..={}", self.n_max());
        &self.values[n]
    }

    /// `P(S_{2n+1} = 0) == P(S_2n = 0)` for every pair in range.
    pub fn parity_holds(&self) -> bool {
        (1..)
            .map(|n| (2 * n, 2 * n + 1))
            .take_while(|&(_, odd)| odd <= self.n_max())
            .all(|(even, odd)| self.values[even].same(&self.values[odd]))
    }

    /// Strictly decreasing along even lengths.
    pub fn even_decreasing(&self) -> bool {
        let evens: Vec<&T> = (1..=self.n_max() / 2).map(|n| &self.values[2 * n]).collect();
        evens.windows(2).all(|w| w[1] < w[0])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,p_zero\n");
        for n in 1..=self.n_max() {
            out.push_str(&format!("{n},{:e}\n", self.values[n].as_f64()));
        }
        out
    }
}

/// Exact numbers `u(n)` of unbordered words of length `n` over `s` letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnborderedCount {
    pub s: usize,
    counts: Vec<BigUint>,
}

impl UnborderedCount {
    pub fn n_max(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn get(&self, n: usize) -> &BigUint {
        assert!(n >= 1 && n <= self.n_max(), "length {n} outside 1..={}", self.n_max());
        &self.counts[n]
    }

    /// `u(n) / s^n`.
    pub fn probability(&self, n: usize) -> BigRational {
        let s = BigUint::from(self.s);
        BigRational::new(self.get(n).clone().into(), s.pow(n as u32).into())
    }

    /// One count per line, for lookup in integer-sequence tables.
    pub fn to_lines(&self) -> String {
        self.counts[1..].iter().map(|u| format!("{u}\n")).collect()
    }
}

pub fn unbordered_count(n_max: usize, s: usize) -> Result<UnborderedCount> {
    if s < 2 {
        return Err(Error::InvalidArgument(format!(
            "alphabet size must be at least 2, got {s}"
        )));
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let s_big = BigUint::from(s);
    let s2 = &s_big * &s_big;
    let mut u = vec![BigUint::one(), s_big.clone()];
    for n in 2..=n_max {
        let next = if n == 2 {
            &s2 - &s_big
        } else if n % 2 == 1 {
            &s_big * &u[n - 1]
        } else {
            &s2 * &u[n - 2] - &u[n / 2]
        };
        u.push(next);
    }
    Ok(UnborderedCount { s, counts: u })
}

/// `P(S_n = 0) = 1 - m_2 - a_{1,n}`, with `a_{1,n}` from its set-algebra definition.
pub fn p_zero<T: Scalar>(n: usize, theta: &Theta, budget: Budget) -> Result<T> {
    match n {
        0 => Err(Error::InvalidArgument("words have length at least 1".into())),
        1 => Ok(T::one()),
        _ => {
            let tail: T = Exhaustive::new(theta, budget).decomposed_cdf(1, n)?;
            Ok(T::one() - tail)
        }
    }
}

/// `P(S_n = 0)` for `n <= n_max` by the squaring recursion. The subtracted
/// masses come from the sequence itself for uniform alphabets and from a
/// level-mass census up to `n_max / 2` otherwise.
pub fn zero_recursion<T: Scalar>(n_max: usize, theta: &Theta, budget: Budget) -> Result<ZeroSequence<T>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let m2 = theta.moment_in::<T>(2)?;
    let squares = if theta.is_uniform() || n_max < 4 {
        None
    } else {
        Some(SeriesEngine::new(theta, budget).level_mass::<T>(2, n_max / 2, 0)?)
    };
    let inv_s = T::one() / T::from_u64(theta.size() as u64);
    let mut values = vec![T::one(), T::one()];
    for n in 2..=n_max {
        let next = if n % 2 == 1 {
            values[n - 1].clone()
        } else if n == 2 {
            T::one() - m2.clone()
        } else {
            let half = n / 2;
            let square_mass = match &squares {
                Some(mass) => mass.get(half, 0),
                None => values[half].clone() * inv_s.powu(half as u32),
            };
            values[n - 2].clone() - square_mass
        };
        values.push(next);
    }
    Ok(ZeroSequence {
        values,
        producer: ZeroProducer::Recursion,
    })
}

/// The limit of `P(S_n = 0)` with the strict lower bound `(1 - p_1)(1 - m_2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroLimit<T> {
    pub series: TruncatedSeries<T>,
    /// `(1 - p_1)(1 - m_2)`.
    pub lower_bound: f64,
    /// Lower end of the certified interval minus `lower_bound`.
    pub margin: f64,
}

impl<T: Scalar> ZeroLimit<T> {
    /// The limit exceeds the lower bound even after removing the tail bound.
    pub fn strictly_above(&self) -> bool {
        self.margin > 0.0
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut json = self.series.to_json();
        json["lower_bound"] = self.lower_bound.into();
        json["margin"] = self.margin.into();
        json["strictly_above"] = self.strictly_above().into();
        json
    }
}

fn with_lower_bound<T: Scalar>(theta: &Theta, series: TruncatedSeries<T>) -> ZeroLimit<T> {
    let lower_bound = (1.0 - theta.rho()) * (1.0 - theta.moment(2));
    let margin = series.interval().0 - lower_bound;
    ZeroLimit {
        series,
        lower_bound,
        margin,
    }
}

/// Uniform law on `s` letters: `(s-1)/s - sum_{i=2}^{I} u(i) / s^{2i}`, evaluated exactly.
pub fn limit_zero_uniform<T: Scalar>(s: usize, terms: usize) -> Result<ZeroLimit<T>> {
    let theta = Theta::uniform(s)?;
    let terms = terms.max(1);
    let u = unbordered_count(terms, s)?;
    let s_big = BigUint::from(s);
    let mut value = BigRational::new((s - 1).into(), s.into());
    for i in 2..=terms {
        value -= BigRational::new(u.get(i).clone().into(), s_big.pow(2 * i as u32).into());
    }
    let series = TruncatedSeries {
        k: 0,
        value: T::from_rational(&value),
        terms_used: terms,
        tail_bound: cdf_tail_bound(&theta, terms),
        bound_source: BoundSource::HalfOverlapMass,
        tail_side: TailSide::Below,
        extra_error: 0.0,
        flagged: false,
    };
    Ok(with_lower_bound(&theta, series))
}

/// Terms beyond which uniform counting stops; the tail bound there is far
/// below anything representable in `f64`.
const UNIFORM_TERMS_CAP: usize = 4096;

/// `lim P(S_n = 0)` with a certified tail bound at most `tol` when reachable.
pub fn limit_zero<T: Scalar>(theta: &Theta, tol: f64, budget: Budget) -> Result<ZeroLimit<T>> {
    if theta.is_uniform() && theta.tail_mass() == 0.0 {
        let terms = (1..UNIFORM_TERMS_CAP)
            .find(|&i| cdf_tail_bound(theta, i) <= tol)
            .unwrap_or(UNIFORM_TERMS_CAP);
        return limit_zero_uniform(theta.size(), terms);
    }
    let series = SeriesEngine::new(theta, budget).limit_zero::<T>(tol)?;
    Ok(with_lower_bound(theta, series))
}
