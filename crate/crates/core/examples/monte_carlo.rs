//! Sampling S_n beyond enumeration range, checked against the exact table
//! where one exists, and the one-step coupling P(S_{n+1} = S_n + 1).
//!
//! ```text
//! cargo run --release --example monte_carlo
//! ```

use num_rational::BigRational;
use overlap_dist::exact_dist::enumerate_distribution;
use overlap_dist::montecarlo::{sample_distribution, step_coupling_exact, step_coupling_sampled, McConfig};
use overlap_dist::{Budget, Scalar, Theta};

fn main() -> Result<(), overlap_dist::Error> {
    let theta = Theta::uniform(2)?;
    let cfg = McConfig::new(20, 1_000_000, 1)?;
    let sampled = sample_distribution(&cfg, &theta);
    let exact = enumerate_distribution::<f64>(20, &theta, Budget::default())?;
    let z = sampled.z_scores(&exact.pmf);
    println!(
        "n=20, N=1e6: worst |z| = {:.2}",
        z.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    );

    let long = sample_distribution(&McConfig::new(200, 100_000, 2)?, &theta);
    println!("n=200: mean S_n/n = {:.4}", long.mean_overlap_ratio);
    for k in 0..6 {
        println!("  P(S_200 = {k}) ~ {:.4} +- {:.4}", long.pmf[k], long.std_errors[k]);
    }

    let skewed = Theta::from_literals(&["0.7", "0.3"])?;
    println!("step coupling for (0.7, 0.3), m_2 = {}", skewed.moment(2));
    for n in 2..=8 {
        let v: BigRational = step_coupling_exact(n, &skewed, Budget::default())?;
        println!("  n={n}: {v} = {:.6}", v.as_f64());
    }
    let est = step_coupling_sampled(&McConfig::new(3, 1_000_000, 3)?, &skewed);
    println!("  n=3 sampled: {:.4} +- {:.4}", est.value, est.std_error);
    Ok(())
}
