//! Minimal pseudo-derivations, their equation sets, and the structural edits
//! (expansion and erasure) that grow and shrink them.
//!
//! ```text
//! cargo run --example pseudo_derivations
//! ```

use intertype::parse::parse;
use intertype::pseudo::{reconstruct, Mode, PseudoDerivation};
use intertype::unify::{classify, normalize_u};

fn main() {
    let t = parse(r"(\x.x) y").unwrap();
    let pd = PseudoDerivation::minimal(&t, Mode::Weak);
    print!("{}", pd.render());
    println!("E      = {}", pd.equations());
    println!("nf(E)  = {}", normalize_u(&pd.equations()));

    // one more premise for y: the argument list now has two elements
    let y = pd.env().get("y");
    let grown = pd.expand(&y, 1, false).unwrap();
    let nf = normalize_u(&grown.equations());
    println!("\nexpand {y} by 1");
    println!("nf     = {nf}");
    println!(
        "blocked: {}",
        classify(&nf)
            .blocked
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    );

    // no premise at all (weak system only)
    let shrunk = pd.erase(&y, 1).unwrap();
    println!("\nerase {y} by 1");
    println!("nf     = {}", normalize_u(&shrunk.equations()));

    // every pseudo-derivation is reachable from the minimal one
    let (rebuilt, edits) = reconstruct(&grown, false).unwrap();
    println!(
        "\nreconstructed with {} edit(s): {}",
        edits.len(),
        rebuilt.equal_modulo_renaming(&grown)
    );

    // the shared JSON schema
    println!(
        "\n{}",
        serde_json::to_string_pretty(&grown.to_json()).unwrap()
    );
}
