//! Reduction strategies and the reduction-graph strong-normalization oracle.

use std::collections::HashMap;

use crate::term::{f_infinity_step, leftmost_outermost_step, one_step_reducts, Nameless, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Barendregt's perpetual strategy.
    #[default]
    FInfinity,
    /// Normal order.
    LeftmostOutermost,
}

impl Strategy {
    /// One step, or `None` on a normal form.
    pub fn step(self, t: &Term) -> Option<Term> {
        if t.is_normal_form() {
            return None;
        }
        match self {
            Strategy::FInfinity => Some(f_infinity_step(t)),
            Strategy::LeftmostOutermost => leftmost_outermost_step(t),
        }
    }

    /// The (possibly infinite) reduction sequence starting after `t`.
    pub fn sequence(self, t: Term) -> impl Iterator<Item = Term> {
        let mut current = Some(t);
        std::iter::from_fn(move || {
            let next = self.step(current.as_ref()?);
            current = next.clone();
            next
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NormalFormResult {
    Normal { term: Term, steps: usize },
    FuelExhausted { last: Term, steps: usize },
}

impl NormalFormResult {
    pub fn normal_form(&self) -> Option<&Term> {
        match self {
            NormalFormResult::Normal { term, .. } => Some(term),
            NormalFormResult::FuelExhausted { .. } => None,
        }
    }
}

/// Iterates F∞ for at most `fuel` contraction steps.
pub fn reduce_to_nf(t: &Term, fuel: usize) -> NormalFormResult {
    reduce_with(Strategy::FInfinity, t, fuel)
}

pub fn reduce_with(strategy: Strategy, t: &Term, fuel: usize) -> NormalFormResult {
    let mut current = t.clone();
    for steps in 0..=fuel {
        if current.is_normal_form() {
            return NormalFormResult::Normal {
                term: current,
                steps,
            };
        }
        if steps == fuel {
            break;
        }
        current = strategy.step(&current).expect("not a normal form");
    }
    NormalFormResult::FuelExhausted {
        last: current,
        steps: fuel,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnVerdict {
    StronglyNormalizing,
    NotStronglyNormalizing,
    BudgetExceeded,
}

/// Terms larger than this make [`is_strongly_normalizing`] give up.
pub const MAX_ORACLE_TERM_SIZE: usize = 400;

fn sorted_reducts(t: &Term) -> Vec<Term> {
    let mut succ = one_step_reducts(t);
    succ.sort_by_key(Term::size);
    succ
}

/// Explores the whole reduction graph of `t` (α-equivalent terms identified).
/// A path that revisits a term proves the existence of an infinite reduction;
/// exhausting a finite acyclic graph proves strong normalization. Exploring
/// more than `node_budget` distinct terms, or meeting a term larger than
/// [`MAX_ORACLE_TERM_SIZE`], gives up. Smaller reducts are explored first,
/// which finds short cycles before runaway growth.
pub fn is_strongly_normalizing(t: &Term, node_budget: usize) -> SnVerdict {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        OnPath,
        Done,
    }
    struct Frame {
        key: Nameless,
        succ: Vec<Term>,
        next: usize,
    }

    let mut marks: HashMap<Nameless, Mark> = HashMap::new();
    let root_key = t.alpha_key();
    marks.insert(root_key.clone(), Mark::OnPath);
    let mut stack = vec![Frame {
        key: root_key,
        succ: sorted_reducts(t),
        next: 0,
    }];

    while let Some(top) = stack.last_mut() {
        if top.next == top.succ.len() {
            let done = stack.pop().expect("non-empty");
            marks.insert(done.key, Mark::Done);
            continue;
        }
        let child = top.succ[top.next].clone();
        top.next += 1;
        let key = child.alpha_key();
        match marks.get(&key) {
            Some(Mark::OnPath) => return SnVerdict::NotStronglyNormalizing,
            Some(Mark::Done) => {}
            None => {
                if marks.len() >= node_budget || child.size() > MAX_ORACLE_TERM_SIZE {
                    return SnVerdict::BudgetExceeded;
                }
                marks.insert(key.clone(), Mark::OnPath);
                let succ = sorted_reducts(&child);
                stack.push(Frame { key, succ, next: 0 });
            }
        }
    }
    SnVerdict::StronglyNormalizing
}

/// Every normal form reachable from `t`, or `None` when the graph exceeds
/// the budget or contains a cycle.
pub fn reachable_normal_forms(t: &Term, node_budget: usize) -> Option<Vec<Term>> {
    if is_strongly_normalizing(t, node_budget) != SnVerdict::StronglyNormalizing {
        return None;
    }
    let mut seen: HashMap<Nameless, ()> = HashMap::new();
    let mut out: Vec<Term> = Vec::new();
    let mut todo = vec![t.clone()];
    while let Some(u) = todo.pop() {
        if seen.insert(u.alpha_key(), ()).is_some() {
            continue;
        }
        let succ = one_step_reducts(&u);
        if succ.is_empty() && !out.contains(&u) {
            out.push(u);
        }
        todo.extend(succ);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(
            reduce_to_nf(&p("(\\x.x) y"), 10),
            NormalFormResult::Normal {
                term: p("y"),
                steps: 1
            }
        );
        assert!(matches!(
            reduce_to_nf(&p("(\\z.z z) (\\z.z z)"), 100),
            NormalFormResult::FuelExhausted { steps: 100, .. }
        ));
        // (λx.xx)(λy.y) → (λy.y)(λy'.y') → λy'.y'
        assert_eq!(
            reduce_to_nf(&p("(\\x.x x) (\\y.y)"), 10),
            NormalFormResult::Normal {
                term: p("\\y.y"),
                steps: 2
            }
        );
    }

    #[test]
    fn zero_fuel_on_normal_form() {
        assert_eq!(
            reduce_to_nf(&p("x"), 0),
            NormalFormResult::Normal {
                term: p("x"),
                steps: 0
            }
        );
    }

    #[test]
    fn strategies_differ_on_erased_loops() {
        let t = p("(\\y.x) ((\\z.z z) (\\z.z z))");
        assert_eq!(
            reduce_with(Strategy::LeftmostOutermost, &t, 5).normal_form(),
            Some(&p("x"))
        );
        assert!(reduce_to_nf(&t, 50).normal_form().is_none());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(
            is_strongly_normalizing(&p("\\x.x"), 10),
            SnVerdict::StronglyNormalizing
        );
        assert_eq!(
            is_strongly_normalizing(&p("(\\z.z z) (\\z.z z)"), 10),
            SnVerdict::NotStronglyNormalizing
        );
        assert_eq!(
            is_strongly_normalizing(&p("(\\y.x) ((\\z.z z) (\\z.z z))"), 100),
            SnVerdict::NotStronglyNormalizing
        );
        assert_eq!(
            is_strongly_normalizing(&p("(\\x.x x x) (\\x.x x x)"), 50),
            SnVerdict::BudgetExceeded
        );
        assert_eq!(
            is_strongly_normalizing(&p("(\\x.x x) (\\y.y)"), 10),
            SnVerdict::StronglyNormalizing
        );
    }

    #[test]
    fn sequence_stops_at_normal_form() {
        let steps: Vec<Term> = Strategy::FInfinity
            .sequence(p("(\\x.x x) (\\y.y)"))
            .collect();
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[1], p("\\y.y"));
    }
}
