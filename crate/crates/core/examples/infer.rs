//! Principal typings by expansion and unification, with the round-by-round
//! trace.
//!
//! ```text
//! cargo run --example infer -- '\f.\x.f (f x)'
//! ```

use intertype::infer::{final_typing, infer_strong, render_trace, InferConfig, InferOutcome};
use intertype::parse::parse;

fn main() {
    let sources: Vec<String> = match std::env::args().nth(1) {
        Some(src) => vec![src],
        None => [
            r"\x.x",
            r"\x.\y.x",
            r"\x.x x",
            r"(\x.x x) (\y.y)",
            r"\f.\x.f (f x)",
            r"(\x.\y.y) (\z.z z)",
        ]
        .map(String::from)
        .to_vec(),
    };
    for src in sources {
        let t = parse(&src).expect("valid term");
        match infer_strong(&t, &InferConfig::default().with_fuel(100).traced()) {
            Ok(InferOutcome::Success(s)) => {
                println!("{}", final_typing(&s).render(&t));
                if !s.edits.is_empty() {
                    print!("{}", render_trace(&s.trace));
                }
            }
            Ok(InferOutcome::FuelExhausted { rounds, .. }) => {
                println!("{t}: no typing after {rounds} rounds")
            }
            Ok(InferOutcome::Cancelled) => unreachable!("no cancellation flag"),
            Err(e) => println!("{t}: {e}"),
        }
    }

    // no typing exists for terms without a normal form
    let omega = parse(r"(\x.x x) (\x.x x)").unwrap();
    let out = infer_strong(&omega, &InferConfig::default().with_fuel(30)).unwrap();
    println!("{omega}: success = {}", out.is_success());
}
