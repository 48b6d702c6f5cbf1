//! How fast P(S_n = k) settles, and which of m_2^k and the correction a_k
//! dominates the limiting tail.
//!
//! ```text
//! cargo run --example convergence_bounds
//! ```

use overlap_dist::bounds::{leadterm_analysis, velocity_report, Quantity};
use overlap_dist::{Budget, Theta};

fn main() -> Result<(), overlap_dist::Error> {
    let budget = Budget::default();
    for spec in [&["1/2", "1/2"][..], &["0.7", "0.3"], &["1/3", "1/3", "1/3"]] {
        let theta = Theta::from_literals(spec)?;
        let report = velocity_report(&theta, 4..=14, 1, 1e-10, budget)?;
        println!(
            "{spec:?}: {} cells, all within bound: {}, worst ratio pmf {:.3}, tail {:.3}",
            report.cells.len(),
            report.all_pass(),
            report.max_ratio(Quantity::Pmf),
            report.max_ratio(Quantity::Tail)
        );
    }

    let skewed = Theta::from_literals(&["0.9", "0.1"])?;
    let lead = leadterm_analysis(&skewed, 12, budget)?;
    println!("\n(0.9, 0.1): m_2 = {}, m_4 = {}", lead.m2, lead.m4);
    println!("  k   m_2^k     sandwich [lower, upper]   series interval for a_k");
    for row in &lead.rows {
        let (lo, hi) = row.a_k.unwrap_or((f64::NAN, f64::NAN));
        println!(
            "{:>3}  {:.6}  [{:>9.6}, {:.6}]  [{:.6}, {:.6}]  m_2^k proven larger: {:?}",
            row.k, row.m2_k, row.lower, row.upper, lo, hi, row.leading
        );
    }
    // the sandwich's lower end predicts a_k > m_2^k beyond k0; the series
    // intervals disagree on the rows listed here
    println!(
        "sandwich k0 = {:?}, contradicted at k = {:?}",
        lead.k0_analytic, lead.k0_counterexamples
    );
    Ok(())
}
