//! Unbordered words: counts on s letters, P(S_n = 0) for a general law and
//! its limit against the lower bound (1 - rho)(1 - m_2).
//!
//! ```text
//! cargo run --example unbordered_words
//! ```

use std::time::Instant;

use num_rational::BigRational;
use overlap_dist::zero_words::{limit_zero_uniform, unbordered_count, zero_recursion};
use overlap_dist::{Budget, Theta};

fn main() -> Result<(), overlap_dist::Error> {
    let u = unbordered_count(16, 2)?;
    let head: Vec<String> = (1..=16).map(|n| u.get(n).to_string()).collect();
    println!("binary unbordered words, n = 1..16: {}", head.join(", "));

    let start = Instant::now();
    let big = unbordered_count(10_000, 2)?;
    println!(
        "u(10000) has {} decimal digits ({:.0} ms)",
        big.get(10_000).to_string().len(),
        start.elapsed().as_secs_f64() * 1e3
    );

    let theta = Theta::from_literals(&["0.7", "0.3"])?;
    let seq = zero_recursion::<BigRational>(12, &theta, Budget::default())?;
    for n in 1..=12 {
        println!("P(S_{n} = 0) = {}", seq.get(n));
    }

    let limit = limit_zero_uniform::<f64>(2, 128)?;
    println!(
        "binary limit {:.9} +- {:.1e}, lower bound {}, margin {:.4}",
        limit.series.value, limit.series.tail_bound, limit.lower_bound, limit.margin
    );
    Ok(())
}
