//! The full self-check suite behind `overlap verify`.
//!
//! Each check either states an identity or inequality that is proven and
//! must hold ([`Expectation::Holds`]), or tests a claim taken at face value
//! ([`Expectation::Claim`]). A failing claim is reported as refuted with its
//! first counterexamples; a failing proven statement is a bug.

use std::fmt::Write as _;
use std::time::Instant;

use num_rational::BigRational;
use serde::Serialize;

use crate::alphabet::Theta;
use crate::border::{first_return, in_b, in_r, naive, prefix_function, Word};
use crate::bounds::{
    correction_bounds, leadterm_analysis, velocity_bound_cdf, velocity_report, BoundFamily, Certificate, Verdict,
};
use crate::census::{Budget, LevelCensus};
use crate::error::Result;
use crate::exact_dist::{enumerate_distribution, level_mass, DistTable, Exhaustive};
use crate::limit_series::SeriesEngine;
use crate::montecarlo::step_coupling_exact;
use crate::scalar::Scalar;
use crate::zero_words::{limit_zero, unbordered_count, zero_recursion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Depth {
    /// Exhaustive checks up to length 10.
    Quick,
    /// Exhaustive checks up to length 14.
    Full,
}

impl Depth {
    pub fn n_max(self) -> usize {
        match self {
            Depth::Quick => 10,
            Depth::Full => 14,
        }
    }

    fn series_budget(self) -> Budget {
        match self {
            Depth::Quick => Budget(1 << 20),
            Depth::Full => Budget::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Holds,
    Claim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Refuted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expectation: Expectation,
    pub status: Status,
    pub cases: usize,
    pub failures: usize,
    /// First few failing cases.
    pub examples: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub depth: Depth,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub seconds: f64,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Any proven statement failed, or with `strict` any claim was refuted.
    pub fn failed(&self, strict: bool) -> bool {
        self.checks
            .iter()
            .any(|c| c.status == Status::Fail || (strict && c.status == Status::Refuted))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serialises")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "# verify ({:?})\n\n| check | expectation | status | cases | failures |\n|---|---|---|---|---|\n",
            self.depth
        );
        for c in &self.checks {
            let _ = writeln!(
                out,
                "| {} | {:?} | {:?} | {} | {} |",
                c.name, c.expectation, c.status, c.cases, c.failures
            );
        }
        for c in self.checks.iter().filter(|c| !c.examples.is_empty()) {
            let _ = writeln!(out, "\n## {}\n", c.name);
            for e in &c.examples {
                let _ = writeln!(out, "- {e}");
            }
        }
        out
    }
}

const EXAMPLES_KEPT: usize = 5;

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn case(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(describe());
        }
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn push(&mut self, name: &str, expectation: Expectation, tally: Tally) {
        let status = match (tally.failures.is_empty(), expectation) {
            (true, _) => Status::Pass,
            (false, Expectation::Holds) => Status::Fail,
            (false, Expectation::Claim) => Status::Refuted,
        };
        self.checks.push(Check {
            name: name.to_string(),
            expectation,
            status,
            cases: tally.cases,
            failures: tally.failures.len(),
            examples: tally.failures.into_iter().take(EXAMPLES_KEPT).collect(),
        });
    }
}

fn all_words(n: usize, s: u32) -> impl Iterator<Item = Word> {
    (0..(s as u64).pow(n as u32)).map(move |mut code| {
        let mut symbols = vec![0; n];
        for slot in symbols.iter_mut().rev() {
            *slot = (code % s as u64) as u32;
            code /= s as u64;
        }
        Word::new(symbols).unwrap()
    })
}

pub fn reference_alphabets() -> Vec<(&'static str, Theta)> {
    vec![
        ("uniform(2)", Theta::uniform(2).unwrap()),
        ("uniform(3)", Theta::uniform(3).unwrap()),
        ("(0.7,0.3)", Theta::from_literals(&["0.7", "0.3"]).unwrap()),
    ]
}

fn word_checks(suite: &mut Suite, n_max: usize) {
    let mut prefix = Tally::default();
    let mut dual = Tally::default();
    let mut short = Tally::default();
    for (s, top) in [(2u32, n_max), (3, n_max.min(9))] {
        for n in 1..=top {
            for w in all_words(n, s) {
                prefix.case(first_return(&w) == naive::first_return(&w), || format!("{w}"));
                let pi = prefix_function(w.symbols());
                let longest = pi[n - 1];
                for k in 1..n {
                    let r = in_r(&w, k).unwrap();
                    dual.case(r == in_b(&w, n - k).unwrap(), || format!("{w} k={k}"));
                }
                let has_short = (1..=n.div_ceil(2)).filter(|&k| k < n).any(|k| in_r(&w, k).unwrap());
                short.case((longest > 0) == has_short, || format!("{w}"));
            }
        }
    }
    suite.push("prefix-function-matches-definition", Expectation::Holds, prefix);
    suite.push("overlap-periodic-duality", Expectation::Holds, dual);
    suite.push("short-border-suffices", Expectation::Holds, short);
}

fn moment_checks(suite: &mut Suite, alphabets: &[(&str, Theta)]) {
    let mut norm = Tally::default();
    let mut rel = Tally::default();
    let extra = [
        Theta::geometric(0.5, 1e-9).unwrap(),
        Theta::from_literals(&["0.5", "0.3", "0.2"]).unwrap(),
    ];
    for theta in alphabets.iter().map(|(_, t)| t).chain(extra.iter()) {
        for q in 1..=5u32 {
            for p in 1..=5u32 {
                let ok = match (theta.moment_exact(q * p), theta.moment_exact(q)) {
                    (Some(lhs), Some(m)) => lhs <= m.pow(p as i32),
                    _ => theta.moment(q * p) <= theta.moment(q).powi(p as i32) * (1.0 + 1e-12),
                };
                norm.case(ok, || format!("{:?} q={q} p={p}", theta.probs()));
            }
        }
        let (m2, m3, m4, rho) = (theta.moment(2), theta.moment(3), theta.moment(4), theta.rho());
        rel.case(rho * rho < m2 && m4 <= m3 * m2.sqrt() && m3 < m2.powf(1.5), || {
            format!("{:?}", theta.probs())
        });
    }
    suite.push("power-sum-norm-inequality", Expectation::Holds, norm);
    suite.push("moment-relations", Expectation::Holds, rel);
}

fn exact_checks(suite: &mut Suite, alphabets: &[(&str, Theta)], n_max: usize, budget: Budget) -> Result<()> {
    let mut power_sum = Tally::default();
    let mut cut = Tally::default();
    let mut large = Tally::default();
    let mut decomposition = Tally::default();
    let mut quoted = Tally::default();
    let mut reduction = Tally::default();
    for (label, theta) in alphabets {
        for l in 2..=4u32 {
            let mass = level_mass::<BigRational>(10, 9, l, theta, budget)?;
            let m = theta.moment_exact(l).unwrap();
            for j in 1..=10 {
                power_sum.case(mass.row_sum(j) == m.pow(j as i32), || format!("{label} l={l} j={j}"));
            }
        }
        let mut ex = Exhaustive::new(theta, budget);
        let m2 = theta.moment_exact(2).unwrap();
        for n in 2..=n_max {
            let dist: DistTable<BigRational> = ex.distribution(n)?;
            let h = n / 2;
            for k in 1..h {
                let lhs: BigRational = ex.union_prob(n, k..=h - 1)?;
                let rhs: BigRational = ex.union_prob(2 * (h - 1), k..=h - 1)?;
                cut.case(lhs == rhs, || format!("{label} n={n} k={k}"));
            }
            let big: BigRational = ex.union_prob(n, h..=n - 1)?;
            let bound = theta.moment(2).powi(h as i32) * n as f64 / 2.0;
            large.case(big.as_f64() <= bound, || {
                format!("{label} n={n}: {} > {bound}", big.as_f64())
            });
            for k in 1..=h {
                let t = ex.finite_terms::<BigRational>(k, n)?;
                let m2k = m2.pow(k as i32);
                let ok = m2k.clone() + t.a == dist.tail(k) && m2k.clone() - t.b == dist.pmf[k];
                decomposition.case(ok, || format!("{label} n={n} k={k}"));
                let p = ex.printed_terms::<BigRational>(k, n)?;
                let ok = m2k.clone() + p.a == dist.tail(k) && m2k - p.b == dist.pmf[k];
                quoted.case(ok, || format!("{label} n={n} k={k}"));
            }
        }
        let i_top = if theta.size() == 2 { 7 } else { 6 };
        let d2 = level_mass::<BigRational>(i_top, i_top, 2, theta, budget)?;
        for i in 2..=i_top {
            for k in 1..i {
                let ok = ex.cdf_series_term::<BigRational>(k, i)? == d2.below(i, k)
                    && ex.pmf_series_term::<BigRational>(k, i)? == d2.get(i, k);
                reduction.case(ok, || format!("{label} i={i} k={k}"));
            }
        }
    }
    suite.push("power-sum-identity", Expectation::Holds, power_sum);
    suite.push("central-cut", Expectation::Holds, cut);
    suite.push("large-overlap-mass", Expectation::Holds, large);
    suite.push("decomposition-matches-enumeration", Expectation::Holds, decomposition);
    suite.push("decomposition-as-quoted", Expectation::Claim, quoted);
    suite.push("series-term-reduction", Expectation::Holds, reduction);
    Ok(())
}

fn parity_checks(suite: &mut Suite, alphabets: &[(&str, Theta)], n_max: usize, budget: Budget) -> Result<()> {
    let mut zero = Tally::default();
    let mut tail = Tally::default();
    let mut pmf = Tally::default();
    for (label, theta) in alphabets {
        for half in 1..=n_max / 2 {
            let even = enumerate_distribution::<BigRational>(2 * half, theta, budget)?;
            let odd = enumerate_distribution::<BigRational>(2 * half + 1, theta, budget)?;
            zero.case(even.pmf[0] == odd.pmf[0], || format!("{label} n={half}"));
            for k in 1..=half / 2 {
                tail.case(even.tail(k) == odd.tail(k), || {
                    format!(
                        "{label} P(S_{} >= {k}) = {} vs P(S_{} >= {k}) = {}",
                        2 * half,
                        even.tail(k),
                        2 * half + 1,
                        odd.tail(k)
                    )
                });
                pmf.case(even.pmf[k] == odd.pmf[k], || {
                    format!(
                        "{label} P(S_{} = {k}) = {} vs P(S_{} = {k}) = {}",
                        2 * half,
                        even.pmf[k],
                        2 * half + 1,
                        odd.pmf[k]
                    )
                });
            }
        }
    }
    suite.push("zero-overlap-parity", Expectation::Holds, zero);
    suite.push("tail-parity", Expectation::Claim, tail);
    suite.push("pmf-parity", Expectation::Claim, pmf);
    Ok(())
}

fn zero_checks(suite: &mut Suite, alphabets: &[(&str, Theta)], n_max: usize, budget: Budget) -> Result<()> {
    let mut counts = Tally::default();
    let u = unbordered_count(6, 2)?;
    let first: Vec<String> = (1..=6).map(|n| u.get(n).to_string()).collect();
    counts.case(first == ["2", "2", "4", "6", "12", "20"], || {
        format!("u(1..6) = {first:?}")
    });
    for s in [2usize, 3] {
        let top = if s == 2 { n_max } else { n_max.min(10) };
        let u = unbordered_count(top, s)?;
        let census = LevelCensus::build(&Theta::uniform(s)?, top, top, budget)?;
        counts.case(*u.get(top) == census.word_count(top, 0).into(), || {
            format!("s={s} n={top}")
        });
        for n in 1..top {
            let census = LevelCensus::build(&Theta::uniform(s)?, n, n, budget)?;
            counts.case(*u.get(n) == census.word_count(n, 0).into(), || format!("s={s} n={n}"));
        }
    }
    suite.push("unbordered-counts", Expectation::Holds, counts);

    let mut recursion = Tally::default();
    let mut limit = Tally::default();
    for (label, theta) in alphabets {
        let seq = zero_recursion::<BigRational>(n_max, theta, budget)?;
        for n in 1..=n_max {
            let exact = enumerate_distribution::<BigRational>(n, theta, budget)?;
            recursion.case(*seq.get(n) == exact.pmf[0], || format!("{label} n={n}"));
        }
        recursion.case(seq.parity_holds() && seq.even_decreasing(), || {
            format!("{label} monotonicity")
        });
        let z = limit_zero::<f64>(theta, 1e-9, budget)?;
        limit.case(z.strictly_above(), || format!("{label} margin {}", z.margin));
    }
    suite.push("zero-overlap-recursion", Expectation::Holds, recursion);
    suite.push("zero-overlap-limit-bound", Expectation::Holds, limit);
    Ok(())
}

fn bound_checks(
    suite: &mut Suite,
    alphabets: &[(&str, Theta)],
    n_max: usize,
    budget: Budget,
    series_budget: Budget,
) -> Result<()> {
    let mut velocity = Tally::default();
    let mut quoted_cdf = Tally::default();
    let mut majorants: Vec<(String, Expectation, Tally)> = Vec::new();
    for (label, theta) in alphabets {
        let report = velocity_report(theta, 4..=n_max, 1, 1e-10, series_budget)?;
        for c in &report.cells {
            velocity.case(c.pass, || {
                format!(
                    "{label} {:?} n={} k={}: {} > {}",
                    c.quantity, c.n, c.k, c.measured, c.bound
                )
            });
        }
        let q = velocity_bound_cdf(8, 1, theta)?;
        quoted_cdf.case(q.quoted_usable, || format!("{label}: factor gives {}", q.quoted));

        let mut ex = Exhaustive::new(theta, budget);
        let mut engine = SeriesEngine::new(theta, series_budget);
        let mut families = vec![BoundFamily::General];
        if theta.size() == 2 {
            families.push(BoundFamily::TwoLetter);
        }
        if theta.is_uniform() {
            families.push(BoundFamily::Uniform);
        }
        for n in 2..=n_max {
            for k in 1..=n / 2 {
                for &family in &families {
                    let r = correction_bounds(family, k, n, &mut ex, &mut engine, 1e-10)?;
                    for c in &r.checks {
                        let name = format!("{}-majorant-{}", family_label(family), c.name.replace('_', "-"));
                        let slot = match majorants.iter().position(|(n, _, _)| *n == name) {
                            Some(i) => i,
                            None => {
                                let expectation = match (family, c.name) {
                                    (BoundFamily::General, "a_kn" | "a_k") => Expectation::Holds,
                                    _ => Expectation::Claim,
                                };
                                majorants.push((name, expectation, Tally::default()));
                                majorants.len() - 1
                            }
                        };
                        majorants[slot].2.case(c.verdict == Verdict::Holds, || {
                            format!(
                                "{label} {} n={n} k={k}: [{:.6e}, {:.6e}] vs {:.6e} ({:?})",
                                c.name, c.lhs_lo, c.lhs_hi, c.rhs, c.verdict
                            )
                        });
                    }
                }
            }
        }
    }
    suite.push("velocity-grid", Expectation::Holds, velocity);
    suite.push("tail-velocity-quoted-factor", Expectation::Claim, quoted_cdf);
    for (name, expectation, tally) in majorants {
        suite.push(&name, expectation, tally);
    }

    let mut lead = Tally::default();
    let mut lower = Tally::default();
    let mut crossing = Tally::default();
    let skewed = Theta::from_literals(&["0.9", "0.1"])?;
    let mut laws: Vec<(&str, &Theta)> = alphabets.iter().map(|(l, t)| (*l, t)).collect();
    laws.push(("(0.9,0.1)", &skewed));
    for (label, theta) in laws {
        let report = leadterm_analysis(theta, 11, series_budget)?;
        for row in &report.rows {
            if theta.moment(2) <= 0.5 {
                lead.case(row.leading != Certificate::None, || format!("{label} k={}", row.k));
            }
            if let Some(ok) = row.lower_consistent {
                lower.case(ok, || {
                    format!(
                        "{label} k={}: a_k <= {:.6} < lower {:.6}",
                        row.k,
                        row.a_k.unwrap().1,
                        row.lower
                    )
                });
            }
        }
        if theta.moment(2) > 0.5 {
            lead.case(report.a1_below_m2 == Some(true), || format!("{label} a_1 < m_2"));
            crossing.case(report.k0_counterexamples.is_empty(), || {
                format!(
                    "{label} sandwich k0 = {:?} but m_2^k > a_k at k = {:?}",
                    report.k0_analytic, report.k0_counterexamples
                )
            });
        }
    }
    suite.push("leading-term", Expectation::Holds, lead);
    suite.push("sandwich-lower-bound", Expectation::Claim, lower);
    suite.push("sandwich-crossing-point", Expectation::Claim, crossing);
    Ok(())
}

fn family_label(family: BoundFamily) -> &'static str {
    match family {
        BoundFamily::General => "general",
        BoundFamily::TwoLetter => "two-letter",
        BoundFamily::Uniform => "uniform",
    }
}

fn coupling_checks(suite: &mut Suite, n_max: usize, budget: Budget) -> Result<()> {
    let mut uniform = Tally::default();
    let mut range = Tally::default();
    let mut equality = Tally::default();
    let top = n_max.min(8);
    for s in [2usize, 3] {
        let theta = Theta::uniform(s)?;
        for n in 2..=top {
            let v = step_coupling_exact::<BigRational>(n, &theta, budget)?;
            uniform.case(v == BigRational::new(1.into(), s.into()), || {
                format!("s={s} n={n}: {v}")
            });
        }
    }
    let theta = Theta::from_literals(&["0.7", "0.3"])?;
    let m2 = theta.moment_exact(2).unwrap();
    for n in 2..=top {
        let v = step_coupling_exact::<BigRational>(n, &theta, budget)?;
        let f = v.as_f64();
        range.case((0.3..=0.7).contains(&f), || format!("n={n}: {f}"));
        equality.case(v == m2, || format!("n={n}: {v} vs m_2 = {m2}"));
    }
    suite.push("step-coupling-uniform", Expectation::Holds, uniform);
    suite.push("step-coupling-range", Expectation::Holds, range);
    suite.push("step-coupling-equals-m2", Expectation::Claim, equality);
    Ok(())
}

/// Runs every check at the given depth.
pub fn run_verify(depth: Depth, budget: Budget) -> Result<VerifyReport> {
    let start = Instant::now();
    let n_max = depth.n_max();
    let alphabets = reference_alphabets();
    let mut suite = Suite { checks: Vec::new() };
    word_checks(&mut suite, n_max);
    moment_checks(&mut suite, &alphabets);
    exact_checks(&mut suite, &alphabets, n_max, budget)?;
    parity_checks(&mut suite, &alphabets, n_max, budget)?;
    zero_checks(&mut suite, &alphabets, n_max, budget)?;
    bound_checks(&mut suite, &alphabets, n_max, budget, depth.series_budget())?;
    coupling_checks(&mut suite, n_max, budget)?;
    Ok(VerifyReport {
        depth,
        checks: suite.checks,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_statuses() {
        let report = run_verify(Depth::Quick, Budget::default()).unwrap();
        for c in &report.checks {
            eprintln!(
                "{:40} {:?} {}/{} {:?}",
                c.name,
                c.status,
                c.failures,
                c.cases,
                c.examples.first()
            );
        }
        eprintln!("{:.2}s", report.seconds);
        let refuted: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| c.status == Status::Refuted)
            .map(|c| c.name.as_str())
            .collect();
        assert!(!report.failed(false), "{}", report.to_markdown());
        assert!(report.failed(true));
        for name in [
            "tail-parity",
            "pmf-parity",
            "decomposition-as-quoted",
            "general-majorant-b-k",
            "step-coupling-equals-m2",
        ] {
            assert!(refuted.contains(&name), "{name}");
        }
        assert_eq!(report.check("zero-overlap-parity").unwrap().status, Status::Pass);
    }

    #[test]
    fn markdown_lists_every_check() {
        let report = VerifyReport {
            depth: Depth::Quick,
            checks: vec![Check {
                name: "x".into(),
                expectation: Expectation::Claim,
                status: Status::Refuted,
                cases: 3,
                failures: 1,
                examples: vec!["n=4".into()],
            }],
            seconds: 0.0,
        };
        let md = report.to_markdown();
        assert!(md.contains("| x | Claim | Refuted | 3 | 1 |"));
        assert!(md.contains("- n=4"));
        assert_eq!(report.to_json()["checks"][0]["status"], "refuted");
    }
}
