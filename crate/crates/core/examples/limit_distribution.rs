//! Limits of P(S_n = k) and P(S_n >= k) as n grows, each with the number of
//! series terms used and a certified bound on the neglected tail.
//!
//! ```text
//! cargo run --example limit_distribution -- 0.7,0.3
//! ```

use overlap_dist::limit_series::{SeriesEngine, TruncatedSeries};
use overlap_dist::zero_words::limit_zero;
use overlap_dist::{make_theta, AlphabetSpec, Budget};

fn main() -> Result<(), overlap_dist::Error> {
    let spec = std::env::args().nth(1).unwrap_or("1/2,1/2".into());
    let theta = make_theta(AlphabetSpec::parse_list(&spec)?)?;
    let budget = Budget::default();
    let tol = 1e-8;

    let zero = limit_zero::<f64>(&theta, tol, budget)?;
    println!(
        "k=0  pmf {:.10}  (+- {:.1e}, bound (1-rho)(1-m_2) = {:.4})",
        zero.series.value, zero.series.tail_bound, zero.lower_bound
    );
    let mut engine = SeriesEngine::new(&theta, budget);
    let mut total = zero.series.value;
    for k in 1..=8 {
        let pmf: TruncatedSeries<f64> = engine.limit_pmf(k, tol)?;
        let tail: TruncatedSeries<f64> = engine.limit_cdf_tail(k, tol)?;
        total += pmf.value;
        println!(
            "k={k}  pmf {:.10}  tail {:.10}  terms {:>2}  bound {:.1e}{}",
            pmf.value,
            tail.value,
            pmf.terms_used,
            pmf.tail_bound,
            if pmf.flagged { "  (tolerance not reached)" } else { "" }
        );
    }
    println!("mass on k <= 8: {total:.10}");
    Ok(())
}
