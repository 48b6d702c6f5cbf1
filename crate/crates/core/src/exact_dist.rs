//! Exact law of `S_n` by enumeration, and everything built from it.
//!
//! Besides the plain distribution this module evaluates the probability of
//! any set-algebraic combination of the overlap events
//! `R_n(j) = { x : x_1..x_j == x_{n-j+1}..x_n }`, which is what the
//! correction terms `a_{k,n}` and `b_{k,n}` are made of:
//!
//! ```text
//! P(S_n >= k) = m_2^k + a_{k,n}        P(S_n = k) = m_2^k - b_{k,n}      (n >= 2k)
//! ```
//!
//! With `h = floor(n/2)` and the split point `c = max(h, k+1)`:
//!
//! ```text
//! a_{k,n} = P(U_{j=c}^{n-1} R_n(j) \ U_{j=k}^{c-1} R_n(j))
//!         + sum_{i=k+1}^{h-1} P(R_{2i}(i) \ U_{j=k}^{i-1} R_{2i}(j))
//! b_{k,n} = P(U_{j=c}^{n-1} R_n(j) & R_n(k) \ U_{j=k+1}^{c-1} R_n(j))
//!         + sum_{i=k+1}^{h-1} P(R_{2i}(i) & R_{2i}(k) \ U_{j=k+1}^{i-1} R_{2i}(j))
//! ```
//!
//! The commonly printed form splits at `h` and runs the `b` sum up to `h`;
//! that version is available through [`Exhaustive::printed_terms`] and differs
//! from the true correction whenever `n < 2k + 2` (for `a`) or always (for
//! `b`), see the tests.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::alphabet::Theta;
use crate::census::{BorderCensus, Budget, LevelCensus, Weigher};
use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar, FLOAT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Producer {
    Enumeration,
    /// `m_2^k - b_{k,n}` with `b_{k,n}` evaluated from its set-algebra definition.
    Decomposition,
    MonteCarlo,
}

/// Distribution of `S_n` over `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistTable<T> {
    pub n: usize,
    pub pmf: Vec<T>,
    pub producer: Producer,
}

impl<T: Scalar> DistTable<T> {
    pub fn mode(&self) -> Mode {
        T::MODE
    }

    /// `G_n(k) = P(S_n >= k)`.
    pub fn tail(&self, k: usize) -> T {
        self.pmf.iter().skip(k).cloned().fold(T::zero(), |a, b| a + b)
    }

    pub fn total(&self) -> T {
        self.tail(0)
    }

    /// Checks non-negativity, normalisation and monotone tails.
    pub fn is_consistent(&self) -> bool {
        let nonneg = self.pmf.iter().all(|p| *p >= T::zero());
        let normalised = self.total().same(&T::one());
        let tails: Vec<f64> = (0..self.n).map(|k| self.tail(k).as_f64()).collect();
        let monotone = tails.windows(2).all(|w| w[1] <= w[0] + FLOAT_TOL);
        nonneg && normalised && monotone
    }

    pub fn to_json(&self, theta: &Theta) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "mode": self.mode(),
            "producer": self.producer,
            "pmf": self.pmf.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "pmf_f64": self.pmf.iter().map(Scalar::as_f64).collect::<Vec<_>>(),
            "theta": theta.echo(),
        })
    }

    /// Two-column CSV `k,probability` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,probability\n");
        for (k, p) in self.pmf.iter().enumerate() {
            out.push_str(&format!("{k},{:e}\n", p.as_f64()));
        }
        out
    }
}

/// `table[i][k] = D_q(i,k) = sum over words w of length i with S_i(w) = k of P(w)^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelMass<T> {
    pub q: u32,
    pub i_max: usize,
    pub k_max: usize,
    table: Vec<Vec<T>>,
}

impl<T: Scalar> LevelMass<T> {
    pub fn from_census(census: &LevelCensus, theta: &Theta, q: u32, k_max: usize) -> Result<Self> {
        let weigher = Weigher::<T>::new(theta, &census.composer, q)?;
        let mut table = vec![Vec::new(); census.max_len + 1];
        for (i, row) in table.iter_mut().enumerate().skip(census.min_len) {
            *row = (0..i.min(k_max + 1))
                .map(|k| weigher.mass(census.counts(i, k), i))
                .collect();
        }
        Ok(LevelMass {
            q,
            i_max: census.max_len,
            k_max,
            table,
        })
    }

    /// `D_q(i,k)`; zero for `k >= i`.
    pub fn get(&self, i: usize, k: usize) -> T {
        assert!(
            i <= self.i_max && k <= self.k_max,
            "D({i},{k}) outside the tabulated range"
        );
        self.table[i].get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn row_sum(&self, i: usize) -> T {
        self.table[i].iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    /// `sum_{k < below} D_q(i,k)`.
    pub fn below(&self, i: usize, below: usize) -> T {
        self.table[i].iter().take(below).cloned().fold(T::zero(), |a, b| a + b)
    }
}

/// Exact distribution of `S_n` by enumeration of `C^n`.
pub fn enumerate_distribution<T: Scalar>(n: usize, theta: &Theta, budget: Budget) -> Result<DistTable<T>> {
    let census = LevelCensus::build(theta, n, n, budget)?;
    let weigher = Weigher::<T>::new(theta, &census.composer, 1)?;
    let pmf = (0..n).map(|k| weigher.mass(census.counts(n, k), n)).collect();
    Ok(DistTable {
        n,
        pmf,
        producer: Producer::Enumeration,
    })
}

/// `D_q(i,k)` for every `i <= i_max` and `k <= k_max`.
pub fn level_mass<T: Scalar>(
    i_max: usize,
    k_max: usize,
    q: u32,
    theta: &Theta,
    budget: Budget,
) -> Result<LevelMass<T>> {
    let census = LevelCensus::build(theta, 1, i_max, budget)?;
    LevelMass::from_census(&census, theta, q, k_max)
}

/// Set-algebra over the overlap events of words of one fixed length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    /// `R_n(k)`: the word has an overlap (border) of size `k`.
    Overlap(usize),
    /// `B_n(j)`: the word is the `j`-periodic extension of its first `j` letters.
    Periodic(usize),
    Union(Vec<Event>),
    Intersection(Vec<Event>),
    Difference(Box<Event>, Box<Event>),
}

impl Event {
    /// `U_{j in range} R_n(j)`; an empty range gives the empty event.
    pub fn any_overlap(range: RangeInclusive<usize>) -> Event {
        Event::Union(range.map(Event::Overlap).collect())
    }

    pub fn any_periodic(range: RangeInclusive<usize>) -> Event {
        Event::Union(range.map(Event::Periodic).collect())
    }

    pub fn and(self, other: Event) -> Event {
        Event::Intersection(vec![self, other])
    }

    pub fn minus(self, other: Event) -> Event {
        Event::Difference(Box::new(self), Box::new(other))
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Event::Overlap(k) | Event::Periodic(k) => {
                if *k == 0 || *k >= n {
                    return Err(Error::InvalidArgument(format!(
                        "index {k} outside [1, {}] for length {n}",
                        n - 1
                    )));
                }
                Ok(())
            }
            Event::Union(parts) | Event::Intersection(parts) => parts.iter().try_for_each(|e| e.validate(n)),
            Event::Difference(a, b) => {
                a.validate(n)?;
                b.validate(n)
            }
        }
    }

    /// Whether a word of length `n` whose border set is `mask` lies in the event.
    pub fn contains(&self, n: usize, mask: u64) -> bool {
        match self {
            Event::Overlap(k) => mask >> k & 1 == 1,
            Event::Periodic(j) => mask >> (n - j) & 1 == 1,
            Event::Union(parts) => parts.iter().any(|e| e.contains(n, mask)),
            Event::Intersection(parts) => parts.iter().all(|e| e.contains(n, mask)),
            Event::Difference(a, b) => a.contains(n, mask) && !b.contains(n, mask),
        }
    }
}

/// Correction terms of the finite-`n` decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteTerms<T> {
    pub k: usize,
    pub n: usize,
    pub a: T,
    pub b: T,
}

/// Enumeration oracle with a cache of border censuses per word length.
pub struct Exhaustive<'a> {
    theta: &'a Theta,
    budget: Budget,
    censuses: BTreeMap<usize, BorderCensus>,
}

impl<'a> Exhaustive<'a> {
    pub fn new(theta: &'a Theta, budget: Budget) -> Self {
        Exhaustive {
            theta,
            budget,
            censuses: BTreeMap::new(),
        }
    }

    pub fn theta(&self) -> &Theta {
        self.theta
    }

    fn census(&mut self, n: usize) -> Result<&BorderCensus> {
        if !self.censuses.contains_key(&n) {
            let census = BorderCensus::build(self.theta, n, self.budget)?;
            self.censuses.insert(n, census);
        }
        Ok(&self.censuses[&n])
    }

    /// Probability of `event` among words of length `n`.
    pub fn event_prob<T: Scalar>(&mut self, n: usize, event: &Event) -> Result<T> {
        event.validate(n)?;
        let theta = self.theta;
        let census = self.census(n)?;
        let weigher = Weigher::<T>::new(theta, &census.composer, 1)?;
        Ok(census
            .masks()
            .filter(|(mask, _)| event.contains(n, *mask))
            .fold(T::zero(), |acc, (_, counts)| acc + weigher.mass(counts, n)))
    }

    /// `P(U_{j in indices} R_n(j))`; zero for an empty index set.
    pub fn union_prob<T: Scalar>(&mut self, n: usize, indices: impl IntoIterator<Item = usize>) -> Result<T> {
        let event = Event::Union(indices.into_iter().map(Event::Overlap).collect());
        self.event_prob(n, &event)
    }

    /// Distribution of `S_n`, read off the border census.
    pub fn distribution<T: Scalar>(&mut self, n: usize) -> Result<DistTable<T>> {
        let theta = self.theta;
        let census = self.census(n)?;
        let weigher = Weigher::<T>::new(theta, &census.composer, 1)?;
        let mut pmf = vec![T::zero(); n];
        for (mask, counts) in census.masks() {
            let s = if mask == 0 {
                0
            } else {
                63 - mask.leading_zeros() as usize
            };
            pmf[s] = pmf[s].clone() + weigher.mass(counts, n);
        }
        Ok(DistTable {
            n,
            pmf,
            producer: Producer::Enumeration,
        })
    }

    fn check_range(k: usize, n: usize) -> Result<()> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "the decomposition covers k >= 1; use the zero-overlap routines for k = 0".into(),
            ));
        }
        if n < 2 * k {
            return Err(Error::InvalidArgument(format!(
                "the decomposition needs n >= 2k, got n={n}, k={k}"
            )));
        }
        Ok(())
    }

    /// `P(R_{2i}(i) \ U_{j=k}^{i-1} R_{2i}(j))`.
    pub fn cdf_series_term<T: Scalar>(&mut self, k: usize, i: usize) -> Result<T> {
        let event = Event::Overlap(i).minus(Event::any_overlap(k..=i - 1));
        self.event_prob(2 * i, &event)
    }

    /// `P(R_{2i}(i) & R_{2i}(k) \ U_{j=k+1}^{i-1} R_{2i}(j))`.
    pub fn pmf_series_term<T: Scalar>(&mut self, k: usize, i: usize) -> Result<T> {
        let event = Event::Overlap(i)
            .and(Event::Overlap(k))
            .minus(Event::any_overlap(k + 1..=i - 1));
        self.event_prob(2 * i, &event)
    }

    fn terms_split_at<T: Scalar>(
        &mut self,
        k: usize,
        n: usize,
        split: usize,
        b_sum_to: usize,
    ) -> Result<FiniteTerms<T>> {
        let half = n / 2;
        let large = Event::any_overlap(split..=n - 1);
        let a_head = self.event_prob::<T>(n, &large.clone().minus(Event::any_overlap(k..=split - 1)))?;
        let b_head = self.event_prob::<T>(
            n,
            &large
                .and(Event::Overlap(k))
                .minus(Event::any_overlap(k + 1..=split - 1)),
        )?;
        let mut a = a_head;
        for i in k + 1..half {
            a = a + self.cdf_series_term::<T>(k, i)?;
        }
        let mut b = b_head;
        for i in k + 1..=b_sum_to {
            b = b + self.pmf_series_term::<T>(k, i)?;
        }
        Ok(FiniteTerms { k, n, a, b })
    }

    /// `(a_{k,n}, b_{k,n})`, each evaluated from its set-algebra definition.
    pub fn finite_terms<T: Scalar>(&mut self, k: usize, n: usize) -> Result<FiniteTerms<T>> {
        Self::check_range(k, n)?;
        let half = n / 2;
        self.terms_split_at(k, n, half.max(k + 1), half.saturating_sub(1))
    }

    /// The same terms in their commonly printed form: split at `floor(n/2)`
    /// and the `b` sum running to `floor(n/2)`. Kept for comparison only.
    pub fn printed_terms<T: Scalar>(&mut self, k: usize, n: usize) -> Result<FiniteTerms<T>> {
        Self::check_range(k, n)?;
        let half = n / 2;
        self.terms_split_at(k, n, half, half)
    }

    /// `m_2^k + a_{k,n}`.
    pub fn decomposed_cdf<T: Scalar>(&mut self, k: usize, n: usize) -> Result<T> {
        let terms = self.finite_terms::<T>(k, n)?;
        Ok(self.theta.moment_in::<T>(2)?.powu(k as u32) + terms.a)
    }

    /// `m_2^k - b_{k,n}`.
    pub fn decomposed_pmf<T: Scalar>(&mut self, k: usize, n: usize) -> Result<T> {
        let terms = self.finite_terms::<T>(k, n)?;
        Ok(self.theta.moment_in::<T>(2)?.powu(k as u32) - terms.b)
    }

    /// Distribution of `S_n` assembled from the decomposition: entries
    /// `1..=n/2` from `m_2^k - b_{k,n}`, the rest from enumeration.
    pub fn decomposed_distribution<T: Scalar>(&mut self, n: usize) -> Result<DistTable<T>> {
        let mut table = self.distribution::<T>(n)?;
        for k in 1..=n / 2 {
            table.pmf[k] = self.decomposed_pmf::<T>(k, n)?;
        }
        table.producer = Producer::Decomposition;
        Ok(table)
    }
}

/// `P(U_{j in indices} R_n(j))` by enumeration.
pub fn union_prob<T: Scalar>(
    n: usize,
    indices: impl IntoIterator<Item = usize>,
    theta: &Theta,
    budget: Budget,
) -> Result<T> {
    Exhaustive::new(theta, budget).union_prob(n, indices)
}

/// `P(S_n = k) = m_2^k - b_{k,n}` for `k >= 1`, `n >= 2k`.
pub fn decomposed_pmf<T: Scalar>(n: usize, k: usize, theta: &Theta, budget: Budget) -> Result<T> {
    Exhaustive::new(theta, budget).decomposed_pmf(k, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::strategies::rational_theta;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn budget() -> Budget {
        Budget::default()
    }

    #[test]
    fn small_distributions() {
        let u2 = Theta::uniform(2).unwrap();
        let d = enumerate_distribution::<BigRational>(2, &u2, budget()).unwrap();
        assert_eq!(d.pmf, vec![q(1, 2), q(1, 2)]);
        let d = enumerate_distribution::<BigRational>(4, &u2, budget()).unwrap();
        assert_eq!(d.pmf, vec![q(6, 16), q(6, 16), q(2, 16), q(2, 16)]);
        assert!(d.is_consistent());

        let t = Theta::from_literals(&["0.7", "0.3"]).unwrap();
        let d = enumerate_distribution::<BigRational>(2, &t, budget()).unwrap();
        assert_eq!(d.pmf, vec![q(42, 100), q(58, 100)]);
        let f = enumerate_distribution::<f64>(2, &t, budget()).unwrap();
        assert!((f.pmf[1] - 0.58).abs() < 1e-15);
    }

    #[test]
    fn overlaps_below_half_only_see_the_central_cut() {
        // P(U_{j=k}^{h-1} R_n(j)) does not change when n shrinks to 2(h-1), h = n/2
        for theta in [
            Theta::uniform(2).unwrap(),
            Theta::from_literals(&["0.7", "0.3"]).unwrap(),
        ] {
            let mut ex = Exhaustive::new(&theta, budget());
            for n in 4..=13 {
                let h = n / 2;
                for k in 1..h {
                    let full: BigRational = ex.union_prob(n, k..=h - 1).unwrap();
                    let cut: BigRational = ex.union_prob(2 * (h - 1), k..=h - 1).unwrap();
                    assert_eq!(full, cut, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn large_overlaps_are_rare() {
        for theta in [
            Theta::uniform(3).unwrap(),
            Theta::from_literals(&["0.7", "0.3"]).unwrap(),
        ] {
            let m2 = theta.moment_exact(2).unwrap();
            let mut ex = Exhaustive::new(&theta, budget());
            for n in 2..=11 {
                let h = n / 2;
                let p: BigRational = ex.union_prob(n, h..=n - 1).unwrap();
                assert!(p <= m2.pow(h as i32) * q(n as i64, 2), "n={n}");
            }
        }
    }

    #[test]
    fn level_mass_examples() {
        let u2 = Theta::uniform(2).unwrap();
        let d2 = level_mass::<BigRational>(8, 7, 2, &u2, budget()).unwrap();
        assert_eq!(d2.get(2, 0), q(1, 8));
        assert_eq!(d2.get(3, 0), q(1, 16));
        for i in 1..=8 {
            assert_eq!(d2.row_sum(i), q(1, 2).pow(i as i32));
        }
        let d1 = level_mass::<BigRational>(6, 5, 1, &u2, budget()).unwrap();
        for i in 1..=6 {
            assert_eq!(d1.row_sum(i), q(1, 1));
        }
    }

    #[test]
    fn power_sum_identity() {
        for theta in [
            Theta::uniform(3).unwrap(),
            Theta::from_literals(&["0.7", "0.3"]).unwrap(),
        ] {
            for l in 2..=4u32 {
                let mass = level_mass::<BigRational>(7, 6, l, &theta, budget()).unwrap();
                let m = theta.moment_exact(l).unwrap();
                for j in 1..=7 {
                    assert_eq!(mass.row_sum(j), m.pow(j as i32));
                }
            }
        }
    }

    #[test]
    fn union_examples() {
        let u2 = Theta::uniform(2).unwrap();
        let p: BigRational = union_prob(6, 1..=5, &u2, budget()).unwrap();
        assert_eq!(p, q(1, 1) - q(20, 64));
        let empty: BigRational = union_prob(6, std::iter::empty(), &u2, budget()).unwrap();
        assert_eq!(empty, q(0, 1));
        let mut ex = Exhaustive::new(&u2, budget());
        let dist = ex.distribution::<BigRational>(7).unwrap();
        for k in 1..7 {
            assert_eq!(ex.union_prob::<BigRational>(7, k..=6).unwrap(), dist.tail(k));
        }
    }

    #[test]
    fn invalid_event_indices() {
        let u2 = Theta::uniform(2).unwrap();
        let mut ex = Exhaustive::new(&u2, budget());
        assert!(ex.event_prob::<f64>(4, &Event::Overlap(4)).is_err());
        assert!(ex.event_prob::<f64>(4, &Event::Periodic(0)).is_err());
    }

    #[test]
    fn periodic_and_overlap_events_are_dual() {
        let t = Theta::from_literals(&["0.7", "0.3"]).unwrap();
        let mut ex = Exhaustive::new(&t, budget());
        for n in 2..=9 {
            for k in 1..n {
                let r = ex.event_prob::<BigRational>(n, &Event::Overlap(k)).unwrap();
                let b = ex.event_prob::<BigRational>(n, &Event::Periodic(n - k)).unwrap();
                assert_eq!(r, b);
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let u2 = Theta::uniform(2).unwrap();
        assert_eq!(decomposed_pmf::<BigRational>(4, 1, &u2, budget()).unwrap(), q(6, 16));
        let t = Theta::from_literals(&["0.7", "0.3"]).unwrap();
        let exact = enumerate_distribution::<BigRational>(6, &t, budget()).unwrap();
        assert_eq!(decomposed_pmf::<BigRational>(6, 2, &t, budget()).unwrap(), exact.pmf[2]);
        assert!(decomposed_pmf::<BigRational>(6, 0, &t, budget()).is_err());
        assert!(decomposed_pmf::<BigRational>(5, 3, &t, budget()).is_err());
    }

    #[test]
    fn overlap_of_half_length_has_mass_m2_power() {
        let t = Theta::from_literals(&["0.7", "0.3"]).unwrap();
        let mut ex = Exhaustive::new(&t, budget());
        let m2 = t.moment_exact(2).unwrap();
        for k in 1..=5 {
            let p = ex.event_prob::<BigRational>(2 * k, &Event::Overlap(k)).unwrap();
            assert_eq!(p, m2.pow(k as i32));
        }
    }

    #[test]
    fn printed_terms_disagree_with_enumeration() {
        let u2 = Theta::uniform(2).unwrap();
        let mut ex = Exhaustive::new(&u2, budget());
        let m2 = q(1, 2);
        // printed a_{k,n} is off exactly at n = 2k and n = 2k + 1
        let printed = ex.printed_terms::<BigRational>(2, 4).unwrap();
        let dist = ex.distribution::<BigRational>(4).unwrap();
        assert_ne!(m2.pow(2) + printed.a, dist.tail(2));
        let printed = ex.printed_terms::<BigRational>(1, 8).unwrap();
        let dist = ex.distribution::<BigRational>(8).unwrap();
        assert_eq!(m2.clone() + printed.a, dist.tail(1));
        // printed b_{k,n} double counts the i = floor(n/2) term
        assert_ne!(m2 - printed.b, dist.pmf[1]);
    }

    #[test]
    fn series_terms_reduce_to_level_masses() {
        for theta in [
            Theta::uniform(2).unwrap(),
            Theta::uniform(3).unwrap(),
            Theta::from_literals(&["0.7", "0.3"]).unwrap(),
        ] {
            let max_i = if theta.size() == 3 { 6 } else { 7 };
            let d2 = level_mass::<BigRational>(max_i, max_i, 2, &theta, budget()).unwrap();
            let mut ex = Exhaustive::new(&theta, budget());
            for i in 2..=max_i {
                for k in 1..i {
                    assert_eq!(
                        ex.cdf_series_term::<BigRational>(k, i).unwrap(),
                        d2.below(i, k),
                        "cdf i={i} k={k}"
                    );
                    assert_eq!(
                        ex.pmf_series_term::<BigRational>(k, i).unwrap(),
                        d2.get(i, k),
                        "pmf i={i} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn json_and_csv_shapes() {
        let u2 = Theta::uniform(2).unwrap();
        let d = enumerate_distribution::<BigRational>(4, &u2, budget()).unwrap();
        let json = d.to_json(&u2);
        assert_eq!(json["n"], 4);
        assert_eq!(json["mode"], "exact-rational");
        assert_eq!(json["pmf"][0], "3/8");
        assert_eq!(json["theta"]["tail_mass"], 0.0);
        let csv = d.to_csv();
        assert!(csv.starts_with("k,probability\n0,3.75e-1\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn decomposition_matches_enumeration(theta in rational_theta(2..4), n in 2usize..=8) {
            let mut ex = Exhaustive::new(&theta, budget());
            let direct: DistTable<BigRational> = ex.distribution(n).unwrap();
            prop_assert_eq!(direct.total(), q(1, 1));
            let split: DistTable<BigRational> = ex.decomposed_distribution(n).unwrap();
            prop_assert_eq!(split.pmf, direct.pmf);
        }

        #[test]
        fn separated_overlap_has_power_sum_mass(theta in rational_theta(2..4), k in 1usize..=4, extra in 0usize..=2) {
            let n = 2 * k + extra;
            let p: BigRational = union_prob(n, [k], &theta, budget()).unwrap();
            prop_assert_eq!(p, theta.moment_exact(2).unwrap().pow(k as i32));
        }
    }
}
