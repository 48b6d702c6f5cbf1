//! Borders, periods and the maximum self-overlap of a single word.
//!
//! A border of `w = x_1..x_n` is a length `k` in `1..n` with
//! `x_1..x_k == x_{n-k+1}..x_n`. The first return (smallest period) is
//! `T_n = n - S_n` where `S_n` is the longest border, or `0` when the word is
//! unbordered. Everything here goes through the prefix function, which yields
//! `S_n` directly and the full border set by following the failure chain.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A finite word over letters `0..alphabet_size`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    symbols: Vec<u32>,
}

impl Word {
    pub fn new(symbols: Vec<u32>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidArgument("words have length at least 1".into()));
        }
        Ok(Word { symbols })
    }

    /// Checks every letter against the alphabet size.
    pub fn over(symbols: Vec<u32>, alphabet_size: usize) -> Result<Self> {
        if let Some(bad) = symbols.iter().find(|&&x| x as usize >= alphabet_size) {
            return Err(Error::InvalidArgument(format!(
                "letter {bad} outside alphabet of size {alphabet_size}"
            )));
        }
        Self::new(symbols)
    }

    /// Parses `abab` (letters `a`..`z`) or `0,1,12,3` (integer lists).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let symbols = if text.contains(',') {
            text.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad letter {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            text.chars()
                .map(|c| match c {
                    'a'..='z' => Ok(c as u32 - 'a' as u32),
                    _ => Err(Error::Parse(format!("bad letter {c:?}"))),
                })
                .collect::<Result<Vec<_>>>()?
        };
        Self::new(symbols)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.iter().all(|&x| x < 26) {
            for &x in &self.symbols {
                write!(f, "{}", char::from(b'a' + x as u8))?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(u32::to_string).collect();
            f.write_str(&parts.join(","))
        }
    }
}

/// Full border structure of a word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BorderProfile {
    pub n: usize,
    pub first_return: usize,
    pub max_overlap: usize,
    /// All proper border lengths, ascending.
    pub borders: BTreeSet<usize>,
}

impl BorderProfile {
    pub fn of(word: &Word) -> Self {
        let n = word.len();
        let pi = prefix_function(word.symbols());
        let borders = border_chain(&pi, n).collect::<BTreeSet<_>>();
        let max_overlap = pi[n - 1];
        BorderProfile {
            n,
            first_return: n - max_overlap,
            max_overlap,
            borders,
        }
    }
}

/// `pi[i]` is the length of the longest proper border of `s[..=i]`.
pub fn prefix_function<T: PartialEq>(s: &[T]) -> Vec<usize> {
    let mut pi = vec![0; s.len()];
    for i in 1..s.len() {
        let mut j = pi[i - 1];
        while j > 0 && s[i] != s[j] {
            j = pi[j - 1];
        }
        if s[i] == s[j] {
            j += 1;
        }
        pi[i] = j;
    }
    pi
}

/// Border lengths of `s[..len]` from longest to shortest, read off a prefix
/// function table.
pub fn border_chain(pi: &[usize], len: usize) -> impl Iterator<Item = usize> + '_ {
    let mut b = if len == 0 { 0 } else { pi[len - 1] };
    std::iter::from_fn(move || {
        if b == 0 {
            None
        } else {
            let out = b;
            b = pi[b - 1];
            Some(out)
        }
    })
}

/// Bitmask with bit `k` set for every border length `k` (requires `n < 64`).
pub fn border_mask(pi: &[usize], len: usize) -> u64 {
    border_chain(pi, len).fold(0u64, |m, b| m | (1u64 << b))
}

/// Smallest shift `k >= 1` under which the word overlaps itself; `n` when there is none.
pub fn first_return(w: &Word) -> usize {
    w.len() - max_overlap(w)
}

/// Length of the longest proper border, `0` for unbordered words.
pub fn max_overlap(w: &Word) -> usize {
    *prefix_function(w.symbols()).last().unwrap()
}

pub fn borders(w: &Word) -> BTreeSet<usize> {
    let pi = prefix_function(w.symbols());
    border_chain(&pi, w.len()).collect()
}

fn check_proper(w: &Word, k: usize, what: &str) -> Result<()> {
    if k == 0 || k >= w.len() {
        return Err(Error::InvalidArgument(format!(
            "{what} must lie in [1, {}] for a word of length {}, got {k}",
            w.len().saturating_sub(1),
            w.len()
        )));
    }
    Ok(())
}

/// Whether the word has an overlap of size `k`, i.e. lies in `R_n(k)`.
pub fn in_r(w: &Word, k: usize) -> Result<bool> {
    check_proper(w, k, "overlap size")?;
    let s = w.symbols();
    Ok(s[..k] == s[s.len() - k..])
}

/// Whether the word is the `j`-periodic extension of its first `j` letters,
/// i.e. lies in `B_n(j)`.
pub fn in_b(w: &Word, j: usize) -> Result<bool> {
    check_proper(w, j, "block length")?;
    let s = w.symbols();
    Ok((j..s.len()).all(|i| s[i] == s[i - j]))
}

/// Literal transcriptions of the definitions, quadratic time. Used as the
/// reference the prefix-function routines are checked against.
pub mod naive {
    use super::Word;

    pub fn first_return(w: &Word) -> usize {
        let s = w.symbols();
        let n = s.len();
        (1..n).find(|&k| s[..n - k] == s[k..]).unwrap_or(n)
    }

    pub fn max_overlap(w: &Word) -> usize {
        w.len() - first_return(w)
    }

    pub fn borders(w: &Word) -> Vec<usize> {
        let s = w.symbols();
        let n = s.len();
        (1..n).filter(|&k| s[..k] == s[n - k..]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(text: &str) -> Word {
        Word::parse(text).unwrap()
    }

    fn all_words(n: usize, s: u32) -> impl Iterator<Item = Word> {
        let total = (s as u64).pow(n as u32);
        (0..total).map(move |mut code| {
            let mut symbols = vec![0; n];
            for slot in symbols.iter_mut().rev() {
                *slot = (code % s as u64) as u32;
                code /= s as u64;
            }
            Word::new(symbols).unwrap()
        })
    }

    #[test]
    fn first_return_examples() {
        assert_eq!(first_return(&w("abab")), 2);
        assert_eq!(first_return(&w("aaaa")), 1);
        assert_eq!(first_return(&w("aab")), 3);
        assert_eq!(naive::first_return(&w("aab")), 3);
    }

    #[test]
    fn max_overlap_examples() {
        assert_eq!(max_overlap(&w("abab")), 2);
        assert_eq!(max_overlap(&w("aab")), 0);
        assert_eq!(max_overlap(&w("aabaa")), 2);
    }

    #[test]
    fn border_set_examples() {
        assert_eq!(borders(&w("aabaa")), BTreeSet::from([1, 2]));
        assert!(borders(&w("abc")).is_empty());
        assert_eq!(borders(&w("aaaa")), BTreeSet::from([1, 2, 3]));
    }

    #[test]
    fn single_letter_word() {
        let p = BorderProfile::of(&w("a"));
        assert_eq!(p.first_return, 1);
        assert_eq!(p.max_overlap, 0);
        assert!(p.borders.is_empty());
    }

    #[test]
    fn membership_examples() {
        assert!(in_r(&w("abab"), 2).unwrap());
        assert!(!in_r(&w("abab"), 1).unwrap());
        assert!(in_r(&w("aabaa"), 1).unwrap());
        assert!(in_b(&w("ababa"), 2).unwrap());
        assert!(!in_b(&w("aab"), 2).unwrap());
        assert!(in_r(&w("abab"), 0).is_err());
        assert!(in_r(&w("abab"), 4).is_err());
        assert!(in_b(&w("abab"), 4).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(w("abca").symbols(), &[0, 1, 2, 0]);
        assert_eq!(w("abca").to_string(), "abca");
        let big = Word::parse("0,27,3").unwrap();
        assert_eq!(big.symbols(), &[0, 27, 3]);
        assert_eq!(big.to_string(), "0,27,3");
        assert!(Word::parse("aB").is_err());
        assert!(Word::parse("").is_err());
        assert!(Word::over(vec![0, 3], 3).is_err());
    }

    #[test]
    fn profile_invariants() {
        let p = BorderProfile::of(&w("abaababa"));
        assert_eq!(p.max_overlap, p.n - p.first_return);
        assert_eq!(p.max_overlap, *p.borders.iter().max().unwrap());
        // the longest border's own longest border is the next one down
        let longest = Word::new(w("abaababa").symbols()[..p.max_overlap].to_vec()).unwrap();
        let second = p.borders.iter().rev().nth(1).copied().unwrap_or(0);
        assert_eq!(max_overlap(&longest), second);
    }

    #[test]
    fn exhaustive_agreement_with_definitions() {
        for (s, max_n) in [(2u32, 12usize), (3, 12)] {
            for n in 1..=max_n {
                for word in all_words(n, s) {
                    assert_eq!(first_return(&word), naive::first_return(&word), "{word}");
                    let fast: Vec<usize> = borders(&word).into_iter().collect();
                    assert_eq!(fast, naive::borders(&word), "{word}");
                }
            }
        }
    }

    #[test]
    fn random_long_words_agree_with_definitions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100_000 {
            let n = rng.random_range(13..=200);
            let s = rng.random_range(2..=4);
            // a short random seed repeated with noise keeps long borders common
            let period = rng.random_range(1..=n);
            let base: Vec<u32> = (0..period).map(|_| rng.random_range(0..s)).collect();
            let symbols: Vec<u32> = (0..n)
                .map(|i| {
                    if rng.random_bool(0.02) {
                        rng.random_range(0..s)
                    } else {
                        base[i % period]
                    }
                })
                .collect();
            let word = Word::new(symbols).unwrap();
            assert_eq!(first_return(&word), naive::first_return(&word), "{word}");
        }
    }

    #[test]
    fn exhaustive_duality() {
        for n in 2..=12 {
            for word in all_words(n, 2) {
                for k in 1..n {
                    assert_eq!(in_b(&word, n - k).unwrap(), in_r(&word, k).unwrap());
                }
            }
        }
    }

    #[test]
    fn short_borders_suffice() {
        // a bordered word always has a border no longer than ceil(n/2)
        for n in 2..=14 {
            for word in all_words(n, 2) {
                let b = borders(&word);
                let has_any = !b.is_empty();
                let has_short = b.iter().any(|&k| k <= n.div_ceil(2));
                assert_eq!(has_any, has_short);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn random_words_agree_with_definitions(symbols in prop::collection::vec(0u32..3, 1..60)) {
            let word = Word::new(symbols).unwrap();
            prop_assert_eq!(first_return(&word), naive::first_return(&word));
            prop_assert_eq!(max_overlap(&word), naive::max_overlap(&word));
        }

        #[test]
        fn period_is_monotone_along_prefixes(symbols in prop::collection::vec(0u32..2, 2..80)) {
            let mut prev = 1;
            for len in 1..=symbols.len() {
                let t = first_return(&Word::new(symbols[..len].to_vec()).unwrap());
                prop_assert!(t >= prev);
                prev = t;
            }
        }
    }
}
