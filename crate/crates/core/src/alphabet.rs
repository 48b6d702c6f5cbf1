//! Letter distributions and their power sums.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Mode, Scalar, FLOAT_TOL};

/// Orders for which power sums are computed eagerly.
const CACHED_ORDERS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Source {
    ExplicitFinite,
    Uniform { size: usize },
    Geometric { ratio: f64, trunc_eps: f64 },
}

/// What the caller asked for, before validation.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphabetSpec {
    /// Exact probabilities; the sum must be exactly one.
    Rational(Vec<BigRational>),
    /// Floating probabilities; the sum must be one within [`FLOAT_TOL`].
    Float(Vec<f64>),
    Uniform(usize),
    /// `p_a = (1 - ratio) ratio^a`, truncated at the first `A` with `ratio^A <= trunc_eps`.
    Geometric {
        ratio: f64,
        trunc_eps: f64,
    },
}

impl AlphabetSpec {
    /// Parses a comma separated list such as `0.7,0.3` or `1/3,2/3`.
    ///
    /// Lists whose literals sum exactly to one become [`AlphabetSpec::Rational`];
    /// the rest fall back to floating point.
    pub fn parse_list(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        let exact: Result<Vec<BigRational>> = parts.iter().map(|p| parse_rational(p)).collect();
        let exact = exact?;
        let total: BigRational = exact.iter().cloned().fold(BigRational::zero(), |a, b| a + b);
        if total.is_one() {
            Ok(AlphabetSpec::Rational(exact))
        } else {
            Ok(AlphabetSpec::Float(
                exact
                    .iter()
                    .map(|p| ToPrimitive::to_f64(p).unwrap_or(f64::NAN))
                    .collect(),
            ))
        }
    }
}

/// Power sums `m_q` of the letter distribution, together with the largest
/// letter probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Moments {
    pub by_order: BTreeMap<u32, f64>,
    pub rho: f64,
}

/// A run of letters sharing the same probability. Words are tallied by how
/// many letters they draw from each class.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbClass {
    pub first_letter: usize,
    pub size: usize,
}

/// Validated letter distribution, sorted so that `probs[0]` is the largest.
#[derive(Debug, Clone, PartialEq)]
pub struct Theta {
    probs: Vec<f64>,
    exact: Option<Vec<BigRational>>,
    source: Source,
    tail_mass: f64,
    classes: Vec<ProbClass>,
    letter_class: Vec<usize>,
    moments: Moments,
}

/// Builds a [`Theta`] from a specification.
pub fn make_theta(spec: AlphabetSpec) -> Result<Theta> {
    match spec {
        AlphabetSpec::Rational(probs) => Theta::rational(probs),
        AlphabetSpec::Float(probs) => Theta::float(probs),
        AlphabetSpec::Uniform(s) => Theta::uniform(s),
        AlphabetSpec::Geometric { ratio, trunc_eps } => Theta::geometric(ratio, trunc_eps),
    }
}

impl Theta {
    pub fn uniform(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidTheta(format!(
                "uniform alphabet needs at least 2 letters, got {size}"
            )));
        }
        let p = BigRational::new(1.into(), (size as u64).into());
        Self::build(vec![p; size], Source::Uniform { size })
    }

    pub fn rational(probs: Vec<BigRational>) -> Result<Self> {
        let total = probs.iter().cloned().fold(BigRational::zero(), |a, b| a + b);
        if !total.is_one() {
            return Err(Error::InvalidTheta(format!("probabilities sum to {total}, not 1")));
        }
        Self::build(probs, Source::ExplicitFinite)
    }

    /// Convenience for literals like `&["0.7", "0.3"]`.
    pub fn from_literals(literals: &[&str]) -> Result<Self> {
        let probs = literals.iter().map(|l| parse_rational(l)).collect::<Result<Vec<_>>>()?;
        Self::rational(probs)
    }

    pub fn float(probs: Vec<f64>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > FLOAT_TOL {
            return Err(Error::InvalidTheta(format!("probabilities sum to {total}, not 1")));
        }
        Self::build_float(probs, Source::ExplicitFinite, 0.0)
    }

    pub fn geometric(ratio: f64, trunc_eps: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidTheta(format!(
                "geometric ratio must lie in (0,1), got {ratio}"
            )));
        }
        if !(trunc_eps > 0.0 && trunc_eps < 1.0) {
            return Err(Error::InvalidTheta(format!(
                "truncation tolerance must lie in (0,1), got {trunc_eps}"
            )));
        }
        let mut probs = Vec::new();
        let mut tail = 1.0f64;
        while tail > trunc_eps {
            probs.push((1.0 - ratio) * tail);
            tail *= ratio;
        }
        if probs.len() < 2 {
            return Err(Error::InvalidTheta(format!(
                "geometric({ratio}) truncated at {trunc_eps} keeps fewer than 2 letters"
            )));
        }
        Self::build_float(probs, Source::Geometric { ratio, trunc_eps }, tail)
    }

    fn build(mut exact: Vec<BigRational>, source: Source) -> Result<Self> {
        for p in &exact {
            if !(p.is_positive() && *p < BigRational::one()) {
                return Err(Error::InvalidTheta(format!("probability {p} outside (0,1)")));
            }
        }
        exact.sort_by(|a, b| b.cmp(a));
        let probs = exact
            .iter()
            .map(|p| ToPrimitive::to_f64(p).unwrap_or(f64::NAN))
            .collect();
        Self::assemble(probs, Some(exact), source, 0.0)
    }

    fn build_float(mut probs: Vec<f64>, source: Source, tail_mass: f64) -> Result<Self> {
        for &p in &probs {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidTheta(format!("probability {p} outside (0,1)")));
            }
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        Self::assemble(probs, None, source, tail_mass)
    }

    fn assemble(probs: Vec<f64>, exact: Option<Vec<BigRational>>, source: Source, tail_mass: f64) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidTheta("at least 2 letters are required".into()));
        }
        let mut by_order = BTreeMap::new();
        for q in 1..=CACHED_ORDERS {
            by_order.insert(q, probs.iter().map(|p| p.powi(q as i32)).sum());
        }
        let moments = Moments {
            by_order,
            rho: probs[0],
        };
        let mut theta = Theta {
            letter_class: Vec::new(),
            classes: Vec::new(),
            probs,
            exact,
            source,
            tail_mass,
            moments,
        };
        theta.regroup();
        theta.check_moment_relations()?;
        Ok(theta)
    }

    fn regroup(&mut self) {
        let mut classes: Vec<ProbClass> = Vec::new();
        let mut letter_class = Vec::with_capacity(self.probs.len());
        for letter in 0..self.probs.len() {
            let joins = classes.last().is_some_and(|c| self.same_prob(c.first_letter, letter));
            if joins {
                classes.last_mut().unwrap().size += 1;
            } else {
                classes.push(ProbClass {
                    first_letter: letter,
                    size: 1,
                });
            }
            letter_class.push(classes.len() - 1);
        }
        self.classes = classes;
        self.letter_class = letter_class;
    }

    fn same_prob(&self, a: usize, b: usize) -> bool {
        match &self.exact {
            Some(exact) => exact[a] == exact[b],
            None => self.probs[a].to_bits() == self.probs[b].to_bits(),
        }
    }

    fn check_moment_relations(&self) -> Result<()> {
        let (m2, m3, m4, rho) = (self.moment(2), self.moment(3), self.moment(4), self.rho());
        let mut problems = Vec::new();
        if m2 - rho * rho <= 0.0 {
            problems.push("m2 - rho^2 must be positive");
        }
        if m3 / m2.powf(1.5) >= 1.0 {
            problems.push("m3 / m2^(3/2) must be below 1");
        }
        if m4 > m3 * m2.sqrt() * (1.0 + 1e-12) {
            problems.push("m4 <= m3 m2^(1/2) violated");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidTheta(problems.join("; ")))
        }
    }

    pub fn size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn exact_probs(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// The finest arithmetic mode this alphabet supports.
    pub fn mode(&self) -> Mode {
        if self.is_exact() {
            Mode::ExactRational
        } else {
            Mode::Float
        }
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn classes(&self) -> &[ProbClass] {
        &self.classes
    }

    pub fn letter_class(&self) -> &[usize] {
        &self.letter_class
    }

    pub fn is_uniform(&self) -> bool {
        self.classes.len() == 1
    }

    /// Largest letter probability.
    pub fn rho(&self) -> f64 {
        self.moments.rho
    }

    /// Second largest letter probability (with multiplicity).
    pub fn second(&self) -> f64 {
        self.probs[1]
    }

    pub fn moments(&self) -> &Moments {
        &self.moments
    }

    /// `m_q = sum_a p_a^q` over the stored (possibly truncated) letters.
    pub fn moment(&self, q: u32) -> f64 {
        assert!(q >= 1, "moment order must be positive");
        match self.moments.by_order.get(&q) {
            Some(&m) => m,
            None => self.probs.iter().map(|p| p.powi(q as i32)).sum(),
        }
    }

    /// `m_q` in the requested arithmetic mode.
    pub fn moment_in<T: Scalar>(&self, q: u32) -> Result<T> {
        assert!(q >= 1, "moment order must be positive");
        let probs = T::letter_probs(self)?;
        Ok(probs.iter().fold(T::zero(), |acc, p| acc + p.powu(q)))
    }

    pub fn moment_exact(&self, q: u32) -> Option<BigRational> {
        self.moment_in::<BigRational>(q).ok()
    }

    /// `m_q` of the untruncated law. Differs from [`Theta::moment`] only for
    /// geometric alphabets, where the closed form `(1-r)^q / (1-r^q)` is used.
    pub fn full_law_moment(&self, q: u32) -> f64 {
        match self.source {
            Source::Geometric { ratio, .. } => (1.0 - ratio).powi(q as i32) / (1.0 - ratio.powi(q as i32)),
            _ => self.moment(q),
        }
    }

    /// JSON echo embedded in every output artifact.
    pub fn echo(&self) -> serde_json::Value {
        let mut value = serde_json::json!({
            "probs": self.probs,
            "tail_mass": self.tail_mass,
            "mode": self.mode(),
            "source": self.source,
        });
        if let Some(exact) = &self.exact {
            value["exact_probs"] = exact.iter().map(|p| p.to_string()).collect::<Vec<_>>().into();
        }
        value
    }
}
