//! Enumerates small closed terms, classifies them with the normalization
//! oracle and compares with the outcome of inference.
//!
//! ```text
//! cargo run --release --example corpus -- 7
//! ```

use intertype::corpus::closed_terms;
use intertype::infer::infer;
use intertype::reduce::{is_strongly_normalizing, SnVerdict};

fn main() {
    let max: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(6);
    let (mut typed, mut diverging, mut disagreements) = (0, 0, 0);
    let terms = closed_terms(max);
    for t in &terms {
        let sn = is_strongly_normalizing(t, 20_000);
        let success = infer(t, 200).map(|o| o.is_success()).unwrap_or(false);
        match sn {
            SnVerdict::StronglyNormalizing => typed += 1,
            SnVerdict::NotStronglyNormalizing => diverging += 1,
            SnVerdict::BudgetExceeded => continue,
        }
        if success != (sn == SnVerdict::StronglyNormalizing) {
            disagreements += 1;
            println!("disagreement: {t}");
        }
    }
    println!("{} closed terms up to size {max}: {typed} SN, {diverging} not SN, {disagreements} disagreements", terms.len());
}
