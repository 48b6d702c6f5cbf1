//! Borders, first return and the overlap/periodicity duality of a few words.
//!
//! ```text
//! cargo run --example border_profile -- abaababa aabaa
//! ```

use overlap_dist::border::{in_b, in_r};
use overlap_dist::{BorderProfile, Word};

fn main() -> Result<(), overlap_dist::Error> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let words = if args.is_empty() {
        vec!["abab".to_string(), "aab".into(), "aabaa".into(), "abaababaab".into()]
    } else {
        args
    };
    for text in words {
        let word = Word::parse(&text)?;
        let p = BorderProfile::of(&word);
        println!(
            "{word}: n={} T_n={} S_n={} borders={:?}",
            p.n, p.first_return, p.max_overlap, p.borders
        );
        for k in 1..p.n {
            // R_n(k) and B_n(n-k) are the same set
            assert_eq!(in_r(&word, k)?, in_b(&word, p.n - k)?);
        }
    }
    Ok(())
}
