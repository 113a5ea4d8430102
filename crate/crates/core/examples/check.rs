//! The independent derivation checker: validating inferred derivations,
//! their images under substitutions, and hand-edited trees.
//!
//! ```text
//! cargo run --example check
//! ```

use intertype::checker::{derive_normal_form, validate, Derivation, Judged};
use intertype::infer::{build_checked_derivation, infer};
use intertype::parse::parse;
use intertype::pseudo::Mode;
use intertype::types::{TyVar, TypeReader, TypeSubst};

fn main() {
    let t = parse(r"(\x.x x) (\y.y)").unwrap();
    let out = infer(&t, 100).unwrap();
    let d = build_checked_derivation(out.success().unwrap()).unwrap();
    println!(
        "inferred derivation of {t}: {} nodes, {}",
        d.size(),
        validate(&d, Mode::Strong).render().trim_end()
    );

    // JSON round trip
    let json = serde_json::to_string(&d.to_json()).unwrap();
    let back = Derivation::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
    println!("round trip: {}", back == d);

    // derivations are closed under substitution
    let mut phi = TypeSubst::new();
    for v in 0..8 {
        phi.bind(TyVar(v), TypeReader::new().itype("[a,b]→a").unwrap());
    }
    println!(
        "substituted: {}",
        validate(&d.substitute(&phi), Mode::Strong)
            .render()
            .trim_end()
    );

    // a broken tree: the root claims the wrong type
    let mut broken = d.clone();
    broken.conclusion = Judged::Type(TypeReader::new().itype("[a]→b").unwrap());
    print!("broken:\n{}", validate(&broken, Mode::Strong).render());

    // normal forms are typed directly
    let k = parse(r"\x.\y.x").unwrap();
    let d = derive_normal_form(&k).unwrap();
    println!(
        "{k} : {} ({} in the weak system, {} in the strong one)",
        d.conclusion,
        verdict(&d, Mode::Weak),
        verdict(&d, Mode::Strong)
    );
}

fn verdict(d: &Derivation, m: Mode) -> &'static str {
    if validate(d, m).is_valid() {
        "valid"
    } else {
        "invalid"
    }
}
