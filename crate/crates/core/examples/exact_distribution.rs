//! Exact law of S_n by enumeration and by the overlap decomposition
//! `P(S_n >= k) = m_2^k + a_{k,n}`, `P(S_n = k) = m_2^k - b_{k,n}`.
//!
//! ```text
//! cargo run --example exact_distribution -- 10 0.7,0.3
//! ```

use num_rational::BigRational;
use overlap_dist::exact_dist::{enumerate_distribution, DistTable, Exhaustive};
use overlap_dist::{make_theta, AlphabetSpec, Budget};

fn main() -> Result<(), overlap_dist::Error> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(8), |a| a.parse()).expect("length");
    let theta = make_theta(AlphabetSpec::parse_list(&args.next().unwrap_or("1/2,1/2".into()))?)?;
    let budget = Budget::default();

    let table: DistTable<BigRational> = enumerate_distribution(n, &theta, budget)?;
    let mut ex = Exhaustive::new(&theta, budget);
    let m2 = theta.moment_exact(2).expect("rational alphabet");
    println!("n = {n}, m_2 = {m2}");
    println!("{:>3} {:>24} {:>24} {:>24}", "k", "P(S_n = k)", "a_kn", "b_kn");
    for k in 0..n {
        if k == 0 || 2 * k > n {
            println!("{k:>3} {:>24}", table.pmf[k].to_string());
            continue;
        }
        let terms = ex.finite_terms::<BigRational>(k, n)?;
        assert_eq!(m2.pow(k as i32) - terms.b.clone(), table.pmf[k]);
        assert_eq!(m2.pow(k as i32) + terms.a.clone(), table.tail(k));
        println!(
            "{k:>3} {:>24} {:>24} {:>24}",
            table.pmf[k].to_string(),
            terms.a.to_string(),
            terms.b.to_string()
        );
    }
    Ok(())
}
