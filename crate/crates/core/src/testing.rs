//! Generators shared by unit tests.

use proptest::prelude::*;

use crate::term::Term;

/// Terms with at most `max_size` nodes over the names `x`, `y`, `z`.
pub fn arb_term(max_size: usize) -> impl Strategy<Value = Term> {
    let name = prop::sample::select(vec!["x", "y", "z"]);
    let leaf = name.clone().prop_map(Term::var);
    leaf.prop_recursive(6, max_size as u32, 2, move |inner| {
        prop_oneof![
            (name.clone(), inner.clone()).prop_map(|(x, b)| Term::abs(x, b)),
            (inner.clone(), inner).prop_map(|(f, a)| Term::app(f, a)),
        ]
    })
    .prop_filter("size bound", move |t| t.size() <= max_size)
}
