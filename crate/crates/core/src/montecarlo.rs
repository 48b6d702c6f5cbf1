//! Seeded simulation of `S_n`, and the step-coupling probability
//! `P(S_{n+1} = S_n + 1)` on nested prefixes of one word.
//!
//! Samples are grouped in fixed blocks of [`BLOCK`] words. Block `b` draws
//! from a ChaCha8 generator keyed by the seed and set to stream `b`, so every
//! sample is a function of `(seed, index)` alone and the thread count never
//! changes the output. Block tallies are integers and are merged in block
//! order.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::alphabet::{Source, Theta};
use crate::census::{walk, Accumulate, Budget, CompCounts, Composer, Node, Weigher};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Samples per random stream.
pub const BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(n: usize, samples: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("word length must be at least 1".into()));
        }
        if samples == 0 {
            return Err(Error::InvalidArgument("need at least one sample".into()));
        }
        Ok(McConfig { n, samples, seed })
    }
}

/// Draws letters by inverse CDF. Geometric alphabets sample the full law,
/// not its truncation.
#[derive(Debug, Clone)]
enum LetterSampler {
    Uniform(u32),
    Table(Vec<f64>),
    Geometric { ln_ratio: f64 },
}

impl LetterSampler {
    fn for_theta(theta: &Theta) -> Self {
        match theta.source() {
            Source::Geometric { ratio, .. } => LetterSampler::Geometric { ln_ratio: ratio.ln() },
            _ if theta.is_uniform() => LetterSampler::Uniform(theta.size() as u32),
            _ => {
                let mut acc = 0.0;
                let cdf = theta
                    .probs()
                    .iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect();
                LetterSampler::Table(cdf)
            }
        }
    }

    #[inline]
    fn draw(&self, rng: &mut ChaCha8Rng) -> u32 {
        match self {
            LetterSampler::Uniform(s) => rng.random_range(0..*s),
            LetterSampler::Table(cdf) => {
                let u: f64 = rng.random();
                cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1) as u32
            }
            LetterSampler::Geometric { ln_ratio } => {
                let u: f64 = rng.random();
                ((1.0 - u).ln() / ln_ratio).floor().min(u32::MAX as f64) as u32
            }
        }
    }
}

/// Reusable buffers for drawing a word and its prefix function.
struct WordDraw {
    word: Vec<u32>,
    pi: Vec<usize>,
}

impl WordDraw {
    fn new(len: usize) -> Self {
        WordDraw {
            word: vec![0; len],
            pi: vec![0; len],
        }
    }

    fn fill(&mut self, sampler: &LetterSampler, rng: &mut ChaCha8Rng) {
        for i in 0..self.word.len() {
            let x = sampler.draw(rng);
            self.word[i] = x;
            self.pi[i] = if i == 0 {
                0
            } else {
                let mut j = self.pi[i - 1];
                while j > 0 && self.word[j] != x {
                    j = self.pi[j - 1];
                }
                if self.word[j] == x {
                    j + 1
                } else {
                    0
                }
            };
        }
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Runs `per_word` on every sampled word of length `len`, block by block,
/// and folds the per-block states in block order.
fn run_blocks<S, F, M>(
    cfg: &McConfig,
    len: usize,
    theta: &Theta,
    init: impl Fn() -> S + Sync,
    per_word: F,
    merge: M,
) -> S
where
    S: Send,
    F: Fn(&mut S, &WordDraw) + Sync,
    M: Fn(&mut S, S),
{
    let sampler = LetterSampler::for_theta(theta);
    let blocks = cfg.samples.div_ceil(BLOCK);
    let parts: Vec<S> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(cfg.seed, b);
            let mut draw = WordDraw::new(len);
            let mut state = init();
            let count = BLOCK.min(cfg.samples - b * BLOCK);
            for _ in 0..count {
                draw.fill(&sampler, &mut rng);
                per_word(&mut state, &draw);
            }
            state
        })
        .collect();
    let mut total = init();
    for part in parts {
        merge(&mut total, part);
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McResult {
    pub config: McConfig,
    /// `counts[k]` samples had `S_n = k`.
    pub counts: Vec<u64>,
    pub pmf: Vec<f64>,
    /// `sqrt(p (1 - p) / N)` per bin.
    pub std_errors: Vec<f64>,
    /// Empirical mean of `S_n / n`.
    pub mean_overlap_ratio: f64,
    #[serde(skip)]
    pub runtime: Duration,
}

impl McResult {
    /// `|empirical - exact| / sqrt(exact (1 - exact) / N)` per bin, `0` where
    /// both vanish. The standard error comes from the exact law so that rare
    /// bins with no samples are scored sensibly.
    pub fn z_scores(&self, exact: &[f64]) -> Vec<f64> {
        let n = self.config.samples as f64;
        self.pmf
            .iter()
            .zip(exact)
            .map(|(p, e)| {
                let se = (e * (1.0 - e) / n).sqrt();
                if se > 0.0 {
                    (p - e).abs() / se
                } else if (p - e).abs() == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .collect()
    }

    pub fn to_json(&self, theta: &Theta) -> serde_json::Value {
        let mut json = serde_json::to_value(self).expect("plain data serialises");
        json["mode"] = "montecarlo".into();
        json["theta"] = theta.echo();
        json
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,probability,std_error\n");
        for (k, (p, se)) in self.pmf.iter().zip(&self.std_errors).enumerate() {
            out.push_str(&format!("{k},{p:e},{se:e}\n"));
        }
        out
    }
}

/// Empirical law of `S_n` from `cfg.samples` independent words.
pub fn sample_distribution(cfg: &McConfig, theta: &Theta) -> McResult {
    let start = Instant::now();
    let n = cfg.n;
    let (counts, overlap_sum) = run_blocks(
        cfg,
        n,
        theta,
        || (vec![0u64; n], 0u64),
        |(counts, sum), draw| {
            let s = draw.pi[n - 1];
            counts[s] += 1;
            *sum += s as u64;
        },
        |(counts, sum), (c, s)| {
            for (a, b) in counts.iter_mut().zip(c) {
                *a += b;
            }
            *sum += s;
        },
    );
    let total = cfg.samples as f64;
    let pmf: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let std_errors = pmf.iter().map(|p| (p * (1.0 - p) / total).sqrt()).collect();
    McResult {
        config: *cfg,
        counts,
        pmf,
        std_errors,
        mean_overlap_ratio: overlap_sum as f64 / (total * n as f64),
        runtime: start.elapsed(),
    }
}

/// Tallies words of length `n + 1` whose longest border grows by one at
/// the last letter.
#[derive(Clone)]
struct StepCensus {
    n: usize,
    hits: CompCounts,
}

impl Accumulate for StepCensus {
    fn record(&mut self, node: &Node<'_>) {
        if node.len == self.n + 1 && node.pi[self.n] == node.pi[self.n - 1] + 1 {
            self.hits.add(node.key, 1);
        }
    }

    fn merge(&mut self, other: Self) {
        self.hits.merge(&other.hits);
    }
}

/// `P(S_{n+1} = S_n + 1)` with both overlaps read on prefixes of one word,
/// by enumeration of `C^{n+1}`.
pub fn step_coupling_exact<T: Scalar>(n: usize, theta: &Theta, budget: Budget) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidArgument("step coupling needs n >= 1".into()));
    }
    let composer = Composer::new(theta, n + 1)?;
    let empty = StepCensus {
        n,
        hits: composer.empty_counts(),
    };
    let census = walk(theta, n + 1, budget, &composer, || empty.clone())?;
    Ok(Weigher::<T>::new(theta, &composer, 1)?.mass(&census.hits, n + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingEstimate {
    pub hits: u64,
    pub samples: u64,
    pub value: f64,
    pub std_error: f64,
}

/// Frequency of `S_{n+1} = S_n + 1` among sampled words of length `n + 1`.
pub fn step_coupling_sampled(cfg: &McConfig, theta: &Theta) -> CouplingEstimate {
    let n = cfg.n;
    let hits = run_blocks(
        cfg,
        n + 1,
        theta,
        || 0u64,
        |hits, draw| {
            if draw.pi[n] == draw.pi[n - 1] + 1 {
                *hits += 1;
            }
        },
        |total, part| *total += part,
    );
    let value = hits as f64 / cfg.samples as f64;
    CouplingEstimate {
        hits,
        samples: cfg.samples,
        value,
        std_error: (value * (1.0 - value) / cfg.samples as f64).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::strategies::rational_theta;
    use crate::exact_dist::enumerate_distribution;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(0, 10, 1).is_err());
        assert!(McConfig::new(4, 0, 1).is_err());
    }

    #[test]
    fn reproducible_and_normalised() {
        let u2 = Theta::uniform(2).unwrap();
        let cfg = McConfig::new(12, 10_000, 7).unwrap();
        let a = sample_distribution(&cfg, &u2);
        let b = sample_distribution(&cfg, &u2);
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.counts.iter().sum::<u64>(), 10_000);
        assert_eq!(a.to_json(&u2).to_string(), b.to_json(&u2).to_string());
        let other = sample_distribution(&McConfig::new(12, 10_000, 8).unwrap(), &u2);
        assert_ne!(a.counts, other.counts);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let t = Theta::from_literals(&["0.7", "0.3"]).unwrap();
        let cfg = McConfig::new(10, 20_000, 3).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sample_distribution(&cfg, &t));
        let b = four.install(|| sample_distribution(&cfg, &t));
        assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn agrees_with_enumeration() {
        let t = Theta::from_literals(&["0.7", "0.3"]).unwrap();
        let cfg = McConfig::new(10, 200_000, 11).unwrap();
        let mc = sample_distribution(&cfg, &t);
        let exact = enumerate_distribution::<f64>(10, &t, Budget::default()).unwrap();
        assert!(mc.z_scores(&exact.pmf).iter().all(|&z| z < 5.0));
    }

    #[test]
    fn geometric_letters_follow_full_law() {
        let g = Theta::geometric(0.5, 1e-6).unwrap();
        let cfg = McConfig::new(2, 100_000, 5).unwrap();
        let mc = sample_distribution(&cfg, &g);
        // P(S_2 = 1) = P(x_1 = x_2) = m_2 of the untruncated law, 1/3 for r = 1/2
        let m2 = g.full_law_moment(2);
        assert!((mc.pmf[1] - m2).abs() < 5.0 * mc.std_errors[1]);
    }

    #[test]
    fn exact_step_coupling() {
        let u3 = Theta::uniform(3).unwrap();
        for n in 1..=5 {
            assert_eq!(
                step_coupling_exact::<BigRational>(n, &u3, Budget::default()).unwrap(),
                q(1, 3)
            );
        }
        let t = Theta::from_literals(&["0.7", "0.3"]).unwrap();
        assert_eq!(
            step_coupling_exact::<BigRational>(2, &t, Budget::default()).unwrap(),
            q(58, 100)
        );
        assert_eq!(
            step_coupling_exact::<BigRational>(3, &t, Budget::default()).unwrap(),
            q(683, 1250)
        );
        assert!(step_coupling_exact::<f64>(0, &t, Budget::default()).is_err());
    }

    #[test]
    fn sampled_step_coupling() {
        let t = Theta::from_literals(&["0.7", "0.3"]).unwrap();
        let est = step_coupling_sampled(&McConfig::new(3, 100_000, 2).unwrap(), &t);
        assert!((est.value - 0.5464).abs() < 5.0 * est.std_error);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn empirical_pmf_is_normalised(theta in rational_theta(2..5), n in 1usize..=30, seed in any::<u64>()) {
            let cfg = McConfig::new(n, 5000, seed).unwrap();
            let r = sample_distribution(&cfg, &theta);
            prop_assert_eq!(r.counts.iter().sum::<u64>(), 5000);
            prop_assert!((r.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert_eq!(sample_distribution(&cfg, &theta).counts, r.counts);
        }

        #[test]
        fn step_coupling_is_bounded_by_extreme_letters(theta in rational_theta(2..4), n in 2usize..=7) {
            let v: BigRational = step_coupling_exact(n, &theta, Budget(1 << 16)).unwrap();
            let probs = theta.exact_probs().unwrap();
            let lo = probs.iter().min().unwrap();
            let hi = probs.iter().max().unwrap();
            prop_assert!(&v >= lo && &v <= hi);
        }
    }
}
