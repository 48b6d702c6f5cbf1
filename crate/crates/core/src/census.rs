//! Exhaustive enumeration of `C^n`.
//!
//! The engine walks the `|C|`-ary prefix tree depth first, extending the
//! prefix function by one entry per edge, so every node knows the longest
//! border of its word. Words are never weighted during the walk: they are
//! tallied by *composition*, the number of letters drawn from each
//! probability class of the alphabet. A tally can later be turned into
//! `sum P(w)^q` for any `q` and in any arithmetic mode, and integer tallies
//! make the result independent of how the walk was split across threads.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::alphabet::Theta;
use crate::border::border_mask;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_BUDGET: u64 = 100_000_000;
/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "OVERLAP_BUDGET";

/// Number of leaf words an exhaustive computation may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        let from_env = std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok());
        Budget(from_env.unwrap_or(DEFAULT_BUDGET))
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget(u64::MAX)
    }

    pub fn allows(&self, alphabet: usize, length: usize) -> bool {
        words_in(alphabet, length).is_some_and(|w| w <= self.0)
    }

    pub fn check(&self, alphabet: usize, length: usize) -> Result<()> {
        if self.allows(alphabet, length) {
            return Ok(());
        }
        let required = match words_in(alphabet, length) {
            Some(w) => w.to_string(),
            None => format!("{alphabet}^{length}"),
        };
        Err(Error::BudgetExceeded {
            alphabet,
            length,
            required,
            budget: self.0,
        })
    }

    /// Longest word length whose full enumeration fits.
    pub fn max_length(&self, alphabet: usize) -> usize {
        (1..64).take_while(|&n| self.allows(alphabet, n)).last().unwrap_or(0)
    }
}

fn words_in(alphabet: usize, length: usize) -> Option<u64> {
    (alphabet as u64).checked_pow(length as u32)
}

/// Word counts keyed by composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompCounts {
    Dense(Vec<u64>),
    Sparse(BTreeMap<u64, u64>),
}

const DENSE_LIMIT: u64 = 1 << 12;

impl CompCounts {
    pub(crate) fn new(space: Option<u64>) -> Self {
        match space {
            Some(space) if space <= DENSE_LIMIT => CompCounts::Dense(vec![0; space as usize]),
            _ => CompCounts::Sparse(BTreeMap::new()),
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, key: u64, count: u64) {
        match self {
            CompCounts::Dense(v) => v[key as usize] += count,
            CompCounts::Sparse(m) => *m.entry(key).or_insert(0) += count,
        }
    }

    pub(crate) fn merge(&mut self, other: &CompCounts) {
        for (key, count) in other.iter() {
            self.add(key, count);
        }
    }

    /// Non-zero entries in ascending key order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = (u64, u64)> + '_> {
        match self {
            CompCounts::Dense(v) => Box::new(
                v.iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(k, &c)| (k as u64, c)),
            ),
            CompCounts::Sparse(m) => Box::new(m.iter().map(|(&k, &c)| (k, c)).filter(|&(_, c)| c > 0)),
        }
    }

    pub fn total(&self) -> u64 {
        self.iter().map(|(_, c)| c).sum()
    }
}

/// Mixed-radix encoding of compositions: digit `c` counts letters of class
/// `c`, the last class is implied by the word length.
#[derive(Debug, Clone)]
pub struct Composer {
    classes: usize,
    radix: u64,
    letter_step: Vec<u64>,
    space: Option<u64>,
}

impl Composer {
    pub fn new(theta: &Theta, max_len: usize) -> Result<Self> {
        let classes = theta.classes().len();
        let radix = max_len as u64 + 1;
        let mut place = Vec::with_capacity(classes);
        let mut acc: Option<u64> = Some(1);
        for _ in 0..classes.saturating_sub(1) {
            let value = acc.ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "{classes} distinct letter probabilities are too many to enumerate words of length {max_len}; \
                     raise --trunc-eps or sample with --mc"
                ))
            })?;
            place.push(value);
            acc = value.checked_mul(radix);
        }
        place.push(0);
        let letter_step = theta.letter_class().iter().map(|&c| place[c]).collect();
        Ok(Composer {
            classes,
            radix,
            letter_step,
            space: acc,
        })
    }

    /// Class counts of the composition `key` for a word of length `len`.
    pub fn decode(&self, mut key: u64, len: usize) -> Vec<usize> {
        let mut counts = Vec::with_capacity(self.classes);
        let mut used = 0;
        for _ in 0..self.classes - 1 {
            let d = (key % self.radix) as usize;
            key /= self.radix;
            used += d;
            counts.push(d);
        }
        counts.push(len - used);
        counts
    }

    pub(crate) fn empty_counts(&self) -> CompCounts {
        CompCounts::new(self.space)
    }
}

/// A node of the prefix tree: the word `word[..len]` and its prefix function.
pub struct Node<'a> {
    pub len: usize,
    pub word: &'a [u32],
    pub pi: &'a [usize],
    pub key: u64,
}

impl Node<'_> {
    /// Longest border of the node's word.
    #[inline]
    pub fn overlap(&self) -> usize {
        self.pi[self.len - 1]
    }
}

/// Something that can be fed every node of the walk.
pub trait Accumulate: Send {
    fn record(&mut self, node: &Node<'_>);
    fn merge(&mut self, other: Self);
}

struct Walker<'a, A> {
    alphabet: u32,
    max_len: usize,
    visit_above: usize,
    step: &'a [u64],
    word: Vec<u32>,
    pi: Vec<usize>,
    acc: &'a mut A,
}

impl<A: Accumulate> Walker<'_, A> {
    fn push(&mut self, len: usize, x: u32) {
        self.word[len] = x;
        let pi = if len == 0 {
            0
        } else {
            let mut j = self.pi[len - 1];
            while j > 0 && self.word[j] != x {
                j = self.pi[j - 1];
            }
            if self.word[j] == x {
                j + 1
            } else {
                0
            }
        };
        self.pi[len] = pi;
    }

    fn descend(&mut self, len: usize, key: u64) {
        if len == self.max_len {
            return;
        }
        for x in 0..self.alphabet {
            self.push(len, x);
            let key = key + self.step[x as usize];
            if len + 1 > self.visit_above {
                self.acc.record(&Node {
                    len: len + 1,
                    word: &self.word[..len + 1],
                    pi: &self.pi[..len + 1],
                    key,
                });
            }
            self.descend(len + 1, key);
        }
    }
}

/// Smallest prefix depth giving enough independent subtrees to spread over
/// the worker pool.
fn split_depth(alphabet: usize, max_len: usize) -> usize {
    let mut depth = 0;
    let mut parts = 1usize;
    while parts < 64 && depth < max_len {
        parts = parts.saturating_mul(alphabet);
        depth += 1;
    }
    depth
}

/// Visits every word of length `1..=max_len` over the alphabet of `theta`.
///
/// The tree is cut at a fixed prefix depth; each subtree gets its own
/// accumulator and the partial results are merged in lexicographic order of
/// their prefixes, so the outcome does not depend on the thread count.
pub fn walk<A, F>(theta: &Theta, max_len: usize, budget: Budget, composer: &Composer, make: F) -> Result<A>
where
    A: Accumulate,
    F: Fn() -> A + Sync,
{
    if max_len == 0 || max_len >= 64 {
        return Err(Error::InvalidArgument(format!(
            "word length must lie in [1, 63], got {max_len}"
        )));
    }
    budget.check(theta.size(), max_len)?;
    let alphabet = theta.size() as u32;
    let depth = split_depth(theta.size(), max_len);

    // nodes up to the split depth, sequentially
    let mut head = make();
    {
        let mut walker = Walker {
            alphabet,
            max_len: depth,
            visit_above: 0,
            step: &composer.letter_step,
            word: vec![0; max_len],
            pi: vec![0; max_len],
            acc: &mut head,
        };
        walker.descend(0, 0);
    }
    if depth == max_len {
        return Ok(head);
    }

    let prefixes = (alphabet as u64).pow(depth as u32);
    let parts: Vec<A> = (0..prefixes)
        .into_par_iter()
        .map(|code| {
            let mut acc = make();
            let mut walker = Walker {
                alphabet,
                max_len,
                visit_above: depth,
                step: &composer.letter_step,
                word: vec![0; max_len],
                pi: vec![0; max_len],
                acc: &mut acc,
            };
            let mut key = 0;
            let mut rest = code;
            let mut digits = vec![0u32; depth];
            for slot in digits.iter_mut().rev() {
                *slot = (rest % alphabet as u64) as u32;
                rest /= alphabet as u64;
            }
            for (len, &x) in digits.iter().enumerate() {
                walker.push(len, x);
                key += composer.letter_step[x as usize];
            }
            walker.descend(depth, key);
            acc
        })
        .collect();
    for part in parts {
        head.merge(part);
    }
    Ok(head)
}

/// Per-length, per-overlap word tallies: `counts[len][k]` holds the words of
/// length `len` whose longest border is `k`.
#[derive(Debug, Clone)]
pub struct LevelCensus {
    pub min_len: usize,
    pub max_len: usize,
    pub composer: Composer,
    counts: Vec<Vec<CompCounts>>,
}

impl LevelCensus {
    /// Tallies every word with length in `min_len..=max_len`.
    pub fn build(theta: &Theta, min_len: usize, max_len: usize, budget: Budget) -> Result<Self> {
        let composer = Composer::new(theta, max_len)?;
        let empty = LevelCensus {
            min_len: min_len.max(1),
            max_len,
            counts: (0..=max_len)
                .map(|len| (0..len.max(1)).map(|_| composer.empty_counts()).collect())
                .collect(),
            composer: composer.clone(),
        };
        walk(theta, max_len, budget, &composer, || empty.clone())
    }

    pub fn counts(&self, len: usize, overlap: usize) -> &CompCounts {
        assert!(len >= self.min_len && len <= self.max_len, "length {len} not tallied");
        &self.counts[len][overlap]
    }

    /// Number of words of length `len` with longest border `overlap`.
    pub fn word_count(&self, len: usize, overlap: usize) -> u64 {
        self.counts(len, overlap).total()
    }
}

impl Accumulate for LevelCensus {
    #[inline]
    fn record(&mut self, node: &Node<'_>) {
        if node.len >= self.min_len {
            self.counts[node.len][node.overlap()].add(node.key, 1);
        }
    }

    fn merge(&mut self, other: Self) {
        for (mine, theirs) in self.counts.iter_mut().zip(other.counts.iter()) {
            for (a, b) in mine.iter_mut().zip(theirs.iter()) {
                a.merge(b);
            }
        }
    }
}

/// Tallies of the words of one length grouped by their complete border set
/// (bit `k` of the mask set iff `k` is a border).
#[derive(Debug, Clone)]
pub struct BorderCensus {
    pub n: usize,
    pub composer: Composer,
    by_mask: BTreeMap<u64, CompCounts>,
}

impl BorderCensus {
    pub fn build(theta: &Theta, n: usize, budget: Budget) -> Result<Self> {
        let composer = Composer::new(theta, n)?;
        let empty = BorderCensus {
            n,
            composer: composer.clone(),
            by_mask: BTreeMap::new(),
        };
        walk(theta, n, budget, &composer, || empty.clone())
    }

    /// Border masks present, ascending, with their tallies.
    pub fn masks(&self) -> impl Iterator<Item = (u64, &CompCounts)> {
        self.by_mask.iter().map(|(&m, c)| (m, c))
    }
}

impl Accumulate for BorderCensus {
    fn record(&mut self, node: &Node<'_>) {
        if node.len == self.n {
            let mask = border_mask(node.pi, node.len);
            let space = self.composer.space;
            self.by_mask
                .entry(mask)
                .or_insert_with(|| CompCounts::new(space))
                .add(node.key, 1);
        }
    }

    fn merge(&mut self, other: Self) {
        for (mask, counts) in other.by_mask {
            match self.by_mask.get_mut(&mask) {
                Some(mine) => mine.merge(&counts),
                None => {
                    self.by_mask.insert(mask, counts);
                }
            }
        }
    }
}

/// Converts composition tallies into `sum P(w)^q` in a chosen arithmetic mode.
#[derive(Debug, Clone)]
pub struct Weigher<T: Scalar> {
    composer: Composer,
    q: u32,
    /// `powers[c][e] = p_c^e`.
    powers: Vec<Vec<T>>,
}

impl<T: Scalar> Weigher<T> {
    pub fn new(theta: &Theta, composer: &Composer, q: u32) -> Result<Self> {
        let probs = T::letter_probs(theta)?;
        let max_exp = q as usize * (composer.radix as usize - 1);
        let powers = theta
            .classes()
            .iter()
            .map(|class| {
                let p = probs[class.first_letter].clone();
                let mut row = Vec::with_capacity(max_exp + 1);
                let mut acc = T::one();
                for _ in 0..=max_exp {
                    row.push(acc.clone());
                    acc = acc * p.clone();
                }
                row
            })
            .collect();
        Ok(Weigher {
            composer: composer.clone(),
            q,
            powers,
        })
    }

    /// `P(w)^q` for any word of length `len` with composition `key`.
    pub fn weight(&self, key: u64, len: usize) -> T {
        self.composer
            .decode(key, len)
            .iter()
            .enumerate()
            .fold(T::one(), |acc, (c, &n)| {
                acc * self.powers[c][n * self.q as usize].clone()
            })
    }

    pub fn mass(&self, counts: &CompCounts, len: usize) -> T {
        counts.iter().fold(T::zero(), |acc, (key, count)| {
            acc + T::from_u64(count) * self.weight(key, len)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn level_counts_for_binary_words() {
        let theta = Theta::uniform(2).unwrap();
        let census = LevelCensus::build(&theta, 1, 6, Budget::default()).unwrap();
        let row = |n: usize| (0..n).map(|k| census.word_count(n, k)).collect::<Vec<_>>();
        assert_eq!(row(1), vec![2]);
        assert_eq!(row(2), vec![2, 2]);
        assert_eq!(row(4), vec![6, 6, 2, 2]);
        assert_eq!(row(6)[0], 20);
    }

    #[test]
    fn split_walk_matches_small_walk() {
        // depth-limited sequential pass vs. full parallel split must agree
        let theta = Theta::uniform(3).unwrap();
        let a = LevelCensus::build(&theta, 7, 7, Budget::default()).unwrap();
        let b = LevelCensus::build(&theta, 1, 7, Budget::default()).unwrap();
        for k in 0..7 {
            assert_eq!(a.word_count(7, k), b.word_count(7, k));
        }
        assert_eq!((0..7).map(|k| a.word_count(7, k)).sum::<u64>(), 3u64.pow(7));
    }

    #[test]
    fn composition_weights() {
        let theta = Theta::from_literals(&["0.7", "0.3"]).unwrap();
        let census = LevelCensus::build(&theta, 2, 2, Budget::default()).unwrap();
        let w1 = Weigher::<BigRational>::new(&theta, &census.composer, 1).unwrap();
        assert_eq!(w1.mass(census.counts(2, 0), 2), q(42, 100));
        assert_eq!(w1.mass(census.counts(2, 1), 2), q(58, 100));
        let w2 = Weigher::<BigRational>::new(&theta, &census.composer, 2).unwrap();
        // aa and bb squared
        assert_eq!(w2.mass(census.counts(2, 1), 2), q(7, 10).pow(4) + q(3, 10).pow(4));
    }

    #[test]
    fn border_census_masks() {
        let theta = Theta::uniform(2).unwrap();
        let census = BorderCensus::build(&theta, 4, Budget::default()).unwrap();
        let total: u64 = census.masks().map(|(_, c)| c.total()).sum();
        assert_eq!(total, 16);
        // aaaa and bbbb: borders {1,2,3}
        let full = census.masks().find(|(m, _)| *m == 0b1110).unwrap().1.total();
        assert_eq!(full, 2);
    }

    #[test]
    fn budget_is_enforced() {
        let theta = Theta::uniform(2).unwrap();
        let err = LevelCensus::build(&theta, 1, 10, Budget(1000)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { required, .. } if required == "1024"));
        assert_eq!(Budget(1024).max_length(2), 10);
    }

    #[test]
    fn many_classes_use_sparse_counts() {
        let theta = Theta::geometric(0.5, 1e-4).unwrap();
        assert!(theta.classes().len() > 10);
        let census = LevelCensus::build(&theta, 1, 3, Budget::default()).unwrap();
        let w = Weigher::<f64>::new(&theta, &census.composer, 1).unwrap();
        let total: f64 = (0..3).map(|k| w.mass(census.counts(3, k), 3)).sum();
        let expected = (1.0 - theta.tail_mass()).powi(3);
        assert!((total - expected).abs() < 1e-12);
    }
}
