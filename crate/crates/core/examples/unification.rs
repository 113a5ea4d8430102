//! The two unification relations on equation sets: `→u` substitutes
//! everywhere, `→o` only outside lists.
//!
//! ```text
//! cargo run --example unification
//! ```

use intertype::types::TypeReader;
use intertype::unify::{
    classify, extract_mgu, normalize_bounded, normalize_o, normalize_u, Equation, EquationSet,
    Relation,
};

fn main() {
    let mut r = TypeReader::new();
    let mut eq = |a: &str, b: &str| Equation::Type(r.pretype(a).unwrap(), r.pretype(b).unwrap());

    let s = EquationSet::from_iter([eq("a", "b"), eq("c", "<a>→a"), eq("d", "<c>→c")]);
    println!("S       = {s}");
    println!("nfo(S)  = {}", normalize_o(&s));
    let nf = normalize_u(&s);
    println!("nf(S)   = {nf}");
    let mgu = extract_mgu(&nf).unwrap();
    println!(
        "mgu     = {{{}}}",
        mgu.iter()
            .map(|(v, t)| format!("{v} ↦ {t}"))
            .collect::<Vec<_>>()
            .join(", ")
    );

    // a circular equation: no solution
    let circ = EquationSet::from_iter([eq("a", "<b>→c"), eq("b", "<a>→d")]);
    println!("\n{circ} ⇒ {}", normalize_u(&circ));
    println!(
        "unsolvable: {}",
        classify(&normalize_u(&circ)).is_unsolvable()
    );

    // lists of different lengths block
    let blocked = EquationSet::from_iter([eq("<a>→b", "<c,d>→e")]);
    println!("\n{blocked} ⇒ {}", normalize_u(&blocked));

    // →o need not terminate on sets that no pseudo-derivation produces
    let cycling = EquationSet::from_iter([
        eq("c", "<e>→d"),
        eq("a", "<a,e>→d"),
        eq("<<c>→b>→b", "e"),
        eq("e", "<c>→d"),
    ]);
    match normalize_bounded(&cycling, Relation::O, 10_000) {
        Ok((nf, steps)) => println!("\n→o normal form after {steps} steps: {nf}"),
        Err(d) => println!("\n→o still rewriting after {} steps", d.steps),
    }
    println!("→u: {}", normalize_u(&cycling));
}
