//! Term corpora: exhaustive enumerations, named combinators, non-normalizing
//! witnesses and seeded random generators for terms, equation sets and
//! structural edits.

use std::collections::HashSet;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::parse::parse;
use crate::pseudo::{Mode, PseudoDerivation, StructuralEdit};
use crate::reduce::{is_strongly_normalizing, SnVerdict};
use crate::term::Term;
use crate::types::{PreList, PreType, TyVar};
use crate::unify::{Equation, EquationSet};

/// Name of the binder introduced at nesting depth `depth`.
pub fn binder_name(depth: usize) -> String {
    const NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
    NAMES
        .get(depth)
        .map_or_else(|| format!("x{depth}"), |s| s.to_string())
}

fn closed_of_size(n: usize, scope: usize, f: &mut dyn FnMut(Term)) {
    if n == 0 {
        return;
    }
    if n == 1 {
        for d in 0..scope {
            f(Term::var(binder_name(d)));
        }
        return;
    }
    let x = binder_name(scope);
    closed_of_size(n - 1, scope + 1, &mut |body| f(Term::abs(x.clone(), body)));
    for i in 1..n - 1 {
        closed_of_size(i, scope, &mut |m| {
            closed_of_size(n - 1 - i, scope, &mut |a| f(Term::app(m.clone(), a)));
        });
    }
}

/// Calls `f` on every closed term of exactly `size` nodes, one per
/// α-class, binders named by depth.
pub fn for_each_closed_term(size: usize, mut f: impl FnMut(Term)) {
    closed_of_size(size, 0, &mut f);
}

/// Every closed term with at most `max_size` nodes, smallest first.
pub fn closed_terms(max_size: usize) -> Vec<Term> {
    let mut out = Vec::new();
    for n in 1..=max_size {
        for_each_closed_term(n, |t| out.push(t));
    }
    out
}

/// `k` closed terms drawn uniformly from those with `min..=max` nodes.
pub fn sample_closed_terms(min: usize, max: usize, k: usize, seed: u64) -> Vec<Term> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = Vec::with_capacity(k);
    let mut seen = 0usize;
    for n in min..=max {
        for_each_closed_term(n, |t| {
            seen += 1;
            if sample.len() < k {
                sample.push(t);
            } else {
                let j = rng.random_range(0..seen);
                if j < k {
                    sample[j] = t;
                }
            }
        });
    }
    sample
}

fn normal_of_size(n: usize, names: &[&str], f: &mut dyn FnMut(Term)) {
    if n == 0 {
        return;
    }
    for x in names {
        normal_of_size(n - 1, names, &mut |body| f(Term::abs(*x, body)));
    }
    neutral_of_size(n, names, f);
}

fn neutral_of_size(n: usize, names: &[&str], f: &mut dyn FnMut(Term)) {
    if n == 1 {
        for x in names {
            f(Term::var(*x));
        }
        return;
    }
    for i in 1..n.saturating_sub(1) {
        neutral_of_size(i, names, &mut |h| {
            normal_of_size(n - 1 - i, names, &mut |a| f(Term::app(h.clone(), a)));
        });
    }
}

/// Every β-normal form with at most `max_size` nodes whose variables (free
/// and bound) are drawn from `names`, one per α-class.
pub fn normal_forms(max_size: usize, names: &[&str]) -> Vec<Term> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for n in 1..=max_size {
        normal_of_size(n, names, &mut |t| {
            if seen.insert(t.alpha_key()) {
                out.push(t.hygienic());
            }
        });
    }
    out
}

fn p(src: &str) -> Term {
    parse(src).expect("built-in term parses")
}

/// The Church numeral `n`.
pub fn church(n: usize) -> Term {
    let mut body = Term::var("x");
    for _ in 0..n {
        body = Term::app(Term::var("f"), body);
    }
    Term::abs("f", Term::abs("x", body))
}

pub const SUCC: &str = "\\n.\\f.\\x.f (n f x)";
pub const ADD: &str = "\\m.\\n.\\f.\\x.m f (n f x)";
pub const S: &str = "\\x.\\y.\\z.x z (y z)";
pub const K: &str = "\\x.\\y.x";
pub const I: &str = "\\x.x";
pub const DELTA: &str = "\\x.x x";

/// Named strongly normalizing terms: numerals, successor and addition
/// applied to numerals, and combinations of S, K and I.
pub fn named_terms() -> Vec<(String, Term)> {
    let mut out = Vec::new();
    for n in 0..=3 {
        out.push((format!("c{n}"), church(n)));
    }
    out.push(("succ".into(), p(SUCC)));
    out.push(("add".into(), p(ADD)));
    for n in 0..=3 {
        out.push((format!("succ c{n}"), Term::app(p(SUCC), church(n))));
    }
    for m in 0..=2 {
        for n in 0..=2 {
            out.push((
                format!("add c{m} c{n}"),
                Term::apps(p(ADD), [church(m), church(n)]),
            ));
        }
    }
    let (s, k, i) = (p(S), p(K), p(I));
    let combos: Vec<(&str, Term)> = vec![
        ("S", s.clone()),
        ("K", k.clone()),
        ("I", i.clone()),
        ("S K K", Term::apps(s.clone(), [k.clone(), k.clone()])),
        ("S K I", Term::apps(s.clone(), [k.clone(), i.clone()])),
        ("K I", Term::app(k.clone(), i.clone())),
        (
            "S (K S) K",
            Term::apps(s.clone(), [Term::app(k.clone(), s.clone()), k.clone()]),
        ),
        ("S I I", Term::apps(s.clone(), [i.clone(), i.clone()])),
        (
            "S K K I",
            Term::apps(s.clone(), [k.clone(), k.clone(), i.clone()]),
        ),
        ("K I K", Term::apps(k.clone(), [i.clone(), k.clone()])),
        (
            "S (K I) I",
            Term::apps(s.clone(), [Term::app(k.clone(), i.clone()), i.clone()]),
        ),
        (
            "S I I I",
            Term::apps(s.clone(), [i.clone(), i.clone(), i.clone()]),
        ),
    ];
    out.extend(combos.into_iter().map(|(n, t)| (n.to_string(), t)));
    out.push(("δ I".into(), Term::app(p(DELTA), i.clone())));
    out.push(("(λy.x) (δ I)".into(), p("(\\y.x) ((\\z.z z) (\\w.w))")));
    out.into_iter().map(|(n, t)| (n, t.hygienic())).collect()
}

/// Terms with an infinite reduction.
pub fn non_normalizing_witnesses() -> Vec<(String, Term)> {
    let s_ii = "(\\x.\\y.\\z.x z (y z)) (\\x.x) (\\x.x)";
    vec![
        ("Ω".into(), p("(\\x.x x) (\\x.x x)")),
        ("(λy.x) Ω".into(), p("(\\y.x) ((\\z.z z) (\\z.z z))")),
        ("S I I (S I I)".into(), p(&format!("({s_ii}) ({s_ii})"))),
        ("λx.Ω".into(), p("\\x.(\\y.y y) (\\y.y y)")),
        (
            "K I Ω".into(),
            p("(\\x.\\y.x) (\\x.x) ((\\z.z z) (\\z.z z))"),
        ),
    ]
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub term: Term,
    pub verdict: SnVerdict,
}

impl Entry {
    pub fn is_sn(&self) -> bool {
        self.verdict == SnVerdict::StronglyNormalizing
    }

    pub fn is_definite(&self) -> bool {
        self.verdict != SnVerdict::BudgetExceeded
    }
}

/// How the standard corpus is assembled.
#[derive(Clone, Debug)]
pub struct CorpusSpec {
    /// All closed terms up to this size.
    pub exhaustive_up_to: usize,
    /// Plus this many closed terms sampled from the sizes above it.
    pub sampled: usize,
    pub sample_max_size: usize,
    pub seed: u64,
    /// Reduction-graph budget of the normalization oracle.
    pub oracle_budget: usize,
}

impl Default for CorpusSpec {
    fn default() -> CorpusSpec {
        CorpusSpec {
            exhaustive_up_to: 9,
            sampled: 400,
            sample_max_size: 12,
            seed: 2024,
            oracle_budget: 20_000,
        }
    }
}

/// Enumerated closed terms, a sample of larger ones, the named terms and
/// the non-normalizing witnesses, each classified by the oracle.
pub fn standard_corpus(spec: &CorpusSpec) -> Vec<Entry> {
    let mut terms: Vec<(String, Term)> = Vec::new();
    for t in closed_terms(spec.exhaustive_up_to) {
        terms.push((t.to_string(), t));
    }
    if spec.sampled > 0 {
        for t in sample_closed_terms(
            spec.exhaustive_up_to + 1,
            spec.sample_max_size,
            spec.sampled,
            spec.seed,
        ) {
            terms.push((t.to_string(), t));
        }
    }
    terms.extend(named_terms());
    terms.extend(non_normalizing_witnesses());
    terms
        .into_iter()
        .map(|(name, term)| {
            let verdict = is_strongly_normalizing(&term, spec.oracle_budget);
            Entry {
                name,
                term,
                verdict,
            }
        })
        .collect()
}

/// A random term with at most `max_size` nodes over `names`.
pub fn random_term(rng: &mut ChaCha8Rng, max_size: usize, names: &[&str]) -> Term {
    let size = rng.random_range(1..=max_size.max(1));
    fn go(rng: &mut ChaCha8Rng, n: usize, names: &[&str]) -> Term {
        let name = |rng: &mut ChaCha8Rng| names[rng.random_range(0..names.len())];
        match n {
            0 | 1 => Term::var(name(rng)),
            2 => Term::abs(name(rng), Term::var(name(rng))),
            _ if rng.random_bool(0.4) => Term::abs(name(rng), go(rng, n - 1, names)),
            _ => {
                let i = rng.random_range(1..n - 1);
                Term::app(go(rng, i, names), go(rng, n - 1 - i, names))
            }
        }
    }
    go(rng, size, names).hygienic()
}

fn random_pretype(rng: &mut ChaCha8Rng, depth: usize, vars: u32) -> PreType {
    if depth == 0 || rng.random_bool(0.45) {
        return PreType::Var(TyVar(rng.random_range(0..vars)));
    }
    let list = random_prelist(rng, depth - 1, vars);
    PreType::arrow(list, random_pretype(rng, depth - 1, vars))
}

fn random_prelist(rng: &mut ChaCha8Rng, depth: usize, vars: u32) -> PreList {
    let n = rng.random_range(0..=3);
    PreList((0..n).map(|_| random_pretype(rng, depth, vars)).collect())
}

/// A random set of up to 8 equations over pre-types of depth at most 4.
pub fn random_equation_set(rng: &mut ChaCha8Rng) -> EquationSet {
    let vars = rng.random_range(3..=8);
    let n = rng.random_range(1..=8);
    (0..n)
        .map(|_| match rng.random_range(0..8) {
            0 => Equation::List(random_prelist(rng, 3, vars), random_prelist(rng, 3, vars)),
            1..=4 => {
                let a = PreType::Var(TyVar(rng.random_range(0..vars)));
                Equation::Type(a, random_pretype(rng, 4, vars))
            }
            _ => Equation::Type(random_pretype(rng, 4, vars), random_pretype(rng, 4, vars)),
        })
        .collect()
}

/// Up to `max_edits` random edits applied one after the other to the
/// minimal pseudo-derivation of `t`: expansions, and in the weak system
/// also erasures. Returns the final tree, the edits and every intermediate
/// tree.
pub fn random_edits(
    rng: &mut ChaCha8Rng,
    t: &Term,
    mode: Mode,
    max_edits: usize,
    refined: bool,
) -> (PseudoDerivation, Vec<StructuralEdit>, Vec<PseudoDerivation>) {
    let mut pd = PseudoDerivation::minimal(t, mode);
    let mut edits = Vec::new();
    let mut steps = Vec::new();
    for _ in 0..rng.random_range(0..=max_edits) {
        let anchors: Vec<PreList> = pd
            .many_conclusions()
            .into_iter()
            .filter(|l| !l.is_empty())
            .collect();
        if anchors.is_empty() {
            break;
        }
        let anchor = anchors[rng.random_range(0..anchors.len())].clone();
        let delta = rng.random_range(1..=2);
        let edit = if mode == Mode::Weak && rng.random_bool(0.4) {
            StructuralEdit::erasure(anchor, delta)
        } else {
            StructuralEdit::expansion(anchor, delta)
        };
        pd = pd
            .apply_edit(&edit, refined)
            .expect("anchors come from the tree");
        edits.push(edit);
        steps.push(pd.clone());
    }
    (pd, edits, steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_term_counts() {
        let counts: Vec<usize> = (1..=8).map(|n| closed_terms(n).len()).collect();
        assert_eq!(counts, [0, 1, 3, 7, 20, 62, 201, 707]);
        assert!(closed_terms(6).iter().all(|t| t.free_vars().is_empty()));
    }

    #[test]
    fn normal_form_enumeration() {
        let nfs = normal_forms(4, &["x", "y", "z"]);
        assert!(nfs.iter().all(Term::is_normal_form));
        // size 1: three variables; size 2: λx.x and λx.y (two classes per
        // free name pattern)
        let small: Vec<String> = normal_forms(2, &["x", "y"])
            .iter()
            .map(|t| t.to_string())
            .collect();
        assert_eq!(small.len(), 5, "{small:?}");
        let keys: HashSet<_> = nfs.iter().map(Term::alpha_key).collect();
        assert_eq!(keys.len(), nfs.len());
    }

    #[test]
    fn named_and_witnesses_classify() {
        for (name, t) in named_terms() {
            assert_eq!(
                is_strongly_normalizing(&t, 20_000),
                SnVerdict::StronglyNormalizing,
                "{name}"
            );
        }
        for (name, t) in non_normalizing_witnesses() {
            assert_eq!(
                is_strongly_normalizing(&t, 20_000),
                SnVerdict::NotStronglyNormalizing,
                "{name}"
            );
        }
    }

    #[test]
    fn samples_are_reproducible() {
        let a = sample_closed_terms(10, 10, 20, 7);
        let b = sample_closed_terms(10, 10, 20, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|t| t.size() == 10));
    }

    #[test]
    fn random_sets_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let s = random_equation_set(&mut rng);
            assert!(s.len() <= 8 && !s.is_empty());
        }
    }
}
