//! Parsing, printing, reduction strategies and the strong-normalization
//! oracle.
//!
//! ```text
//! cargo run --example terms
//! ```

use intertype::parse::parse;
use intertype::reduce::{is_strongly_normalizing, reduce_with, Strategy};
use intertype::term::{find_redexes, one_step_reducts, Printer};

fn main() {
    let t = parse(r"(\x.\y.y) ((\z.z z) (\z.z z)) (\w.w)").expect("valid term");
    println!("term      {t}");
    println!("ascii     {}", Printer { ascii: true }.render(&t));
    println!("size      {}", t.size());
    for r in find_redexes(&t) {
        println!("redex     {:?} at {:?}", r.kind, r.path);
    }

    // normal order finds the normal form; the perpetual strategy keeps
    // reducing the diverging argument of the K-redex
    for strategy in [Strategy::LeftmostOutermost, Strategy::FInfinity] {
        println!(
            "{strategy:?}: {:?}",
            reduce_with(strategy, &t, 20)
                .normal_form()
                .map(ToString::to_string)
        );
    }

    println!("one-step reducts:");
    for n in one_step_reducts(&t) {
        println!("  {n}");
    }

    for src in [
        r"\f.\x.f (f x)",
        r"(\x.x x) (\x.x x)",
        r"(\y.x) ((\z.z z) (\z.z z))",
        r"(\x.x x) (\y.y)",
    ] {
        let t = parse(src).unwrap();
        println!("{t:<32} {:?}", is_strongly_normalizing(&t, 10_000));
    }
}
