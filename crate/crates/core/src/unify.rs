//! Equations between pre-types and the two unification relations: `→u`
//! (Robinson-style rules over pre-types) and `→o`, where substitution only
//! reaches variable occurrences outside lists.
//!
//! Scheduling is deterministic: rules are tried in the order erase, swap,
//! arrow, list, subs (subs-out), and for each rule the equations are scanned
//! in set order. Rewritten equations stay in the position of the equation
//! they replace, so the order of a set is stable along a normalization.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

mod indexed;
pub use indexed::{normalize_indexed, summarize_indexed, FormSummary};

use crate::types::{HasVars, PreList, PreSubst, PreType, TyVar};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Equation {
    Type(PreType, PreType),
    List(PreList, PreList),
}

impl Equation {
    pub fn types(a: PreType, b: PreType) -> Equation {
        Equation::Type(a, b)
    }

    pub fn lists(a: PreList, b: PreList) -> Equation {
        Equation::List(a, b)
    }

    pub fn is_blocked(&self) -> bool {
        matches!(self, Equation::List(s, t) if s.len() != t.len())
    }

    /// `a ≐ A` (in either orientation) with `a` occurring in `A ≠ a`.
    pub fn is_circular(&self) -> bool {
        match self {
            Equation::Type(PreType::Var(a), rhs) | Equation::Type(rhs, PreType::Var(a)) => {
                rhs.as_var() != Some(*a) && rhs.mentions(*a)
            }
            _ => false,
        }
    }
}

impl HasVars for Equation {
    fn visit_vars(&self, f: &mut dyn FnMut(TyVar)) {
        match self {
            Equation::Type(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Equation::List(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equation::Type(a, b) => write!(f, "{a} = {b}"),
            Equation::List(a, b) => write!(f, "{a} = {b}"),
        }
    }
}

/// An ordered collection of equations with set semantics: inserting an
/// equation already present is a no-op, so the first occurrence wins.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquationSet(Vec<Equation>);

impl EquationSet {
    pub fn new() -> EquationSet {
        EquationSet::default()
    }

    pub fn insert(&mut self, e: Equation) -> bool {
        if self.0.contains(&e) {
            false
        } else {
            self.0.push(e);
            true
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Equation> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Equation] {
        &self.0
    }

    pub fn contains(&self, e: &Equation) -> bool {
        self.0.contains(e)
    }

    pub fn apply(&self, s: &PreSubst) -> EquationSet {
        use crate::types::ApplySubst;
        self.iter()
            .map(|e| match e {
                Equation::Type(a, b) => Equation::Type(a.apply(s), b.apply(s)),
                Equation::List(a, b) => Equation::List(a.apply(s), b.apply(s)),
            })
            .collect()
    }

    /// True when `s` makes both sides of every equation syntactically equal.
    pub fn solved_by(&self, s: &PreSubst) -> bool {
        self.apply(s).iter().all(|e| match e {
            Equation::Type(a, b) => a == b,
            Equation::List(a, b) => a == b,
        })
    }

    /// One equation per line.
    pub fn render(&self) -> String {
        self.iter().map(|e| format!("{e}\n")).collect()
    }
}

impl FromIterator<Equation> for EquationSet {
    fn from_iter<I: IntoIterator<Item = Equation>>(iter: I) -> EquationSet {
        let mut out = EquationSet::new();
        let mut seen = HashSet::new();
        for e in iter {
            if seen.insert(e.clone()) {
                out.0.push(e);
            }
        }
        out
    }
}

impl<'a> IntoIterator for &'a EquationSet {
    type Item = &'a Equation;
    type IntoIter = std::slice::Iter<'a, Equation>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl HasVars for EquationSet {
    fn visit_vars(&self, f: &mut dyn FnMut(TyVar)) {
        for e in &self.0 {
            e.visit_vars(f);
        }
    }
}

impl fmt::Display for EquationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

// ---------------------------------------------------------------------------
// Classification

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormReport {
    pub solved: bool,
    pub circular: Vec<Equation>,
    pub blocked: Vec<Equation>,
}

impl FormReport {
    pub fn is_unsolvable(&self) -> bool {
        !self.circular.is_empty()
    }

    pub fn is_blocked(&self) -> bool {
        !self.blocked.is_empty()
    }
}

pub fn is_solved(s: &EquationSet) -> bool {
    let mut lhs = HashSet::new();
    for e in s {
        match e {
            Equation::Type(PreType::Var(a), _) if lhs.insert(*a) => {}
            _ => return false,
        }
    }
    s.iter().all(|e| match e {
        Equation::Type(_, rhs) => rhs.vars().is_disjoint(&lhs.iter().copied().collect()),
        Equation::List(..) => false,
    })
}

pub fn classify(s: &EquationSet) -> FormReport {
    FormReport {
        solved: is_solved(s),
        circular: s.iter().filter(|e| e.is_circular()).cloned().collect(),
        blocked: s.iter().filter(|e| e.is_blocked()).cloned().collect(),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("equation set is not in solved form: {0}")]
pub struct NotSolved(pub String);

/// `mgu(S)(aᵢ) = Bᵢ` for `S` in solved form.
pub fn extract_mgu(s: &EquationSet) -> Result<PreSubst, NotSolved> {
    if !is_solved(s) {
        return Err(NotSolved(s.to_string()));
    }
    Ok(s.iter()
        .map(|e| match e {
            Equation::Type(PreType::Var(a), rhs) => (*a, rhs.clone()),
            _ => unreachable!("solved forms only contain variable equations"),
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Rewriting

/// `→u` or `→o`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    U,
    O,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Erase,
    Swap,
    Arrow,
    List,
    Subs,
}

/// A rule application: the rule and the index of the equation it rewrites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Redex {
    pub rule: Rule,
    pub index: usize,
}

fn count_vars(t: &PreType, outside_only: bool, counts: &mut HashMap<TyVar, usize>) {
    match t {
        PreType::Var(v) => *counts.entry(*v).or_insert(0) += 1,
        PreType::Arrow(d, c) => {
            if !outside_only {
                for x in d.iter() {
                    count_vars(x, false, counts);
                }
            }
            count_vars(c, outside_only, counts);
        }
    }
}

fn count_equation(e: &Equation, outside_only: bool, counts: &mut HashMap<TyVar, usize>) {
    match e {
        Equation::Type(a, b) => {
            count_vars(a, outside_only, counts);
            count_vars(b, outside_only, counts);
        }
        Equation::List(a, b) => {
            if !outside_only {
                for x in a.iter().chain(b.iter()) {
                    count_vars(x, false, counts);
                }
            }
        }
    }
}

fn rule_applies(rule: Rule, e: &Equation) -> bool {
    match (rule, e) {
        (Rule::Erase, Equation::Type(a, b)) => a == b,
        (Rule::Swap, Equation::Type(PreType::Arrow(..), PreType::Var(_))) => true,
        (Rule::Arrow, Equation::Type(PreType::Arrow(..), PreType::Arrow(..))) => true,
        (Rule::List, Equation::List(a, b)) => a.len() == b.len(),
        _ => false,
    }
}

/// Variable-occurrence totals across a set, used to decide the side
/// condition `a ∈ Var(S)` (resp. `a ∈ OutVar(S)`) of subs.
struct Occurrences {
    total: HashMap<TyVar, usize>,
}

impl Occurrences {
    fn of(s: &EquationSet, outside_only: bool) -> Occurrences {
        let mut total = HashMap::new();
        for e in s {
            count_equation(e, outside_only, &mut total);
        }
        Occurrences { total }
    }

    /// Does `v` occur in the set outside equation `e`?
    fn elsewhere(&self, v: TyVar, e: &Equation, outside_only: bool) -> bool {
        let mut own = HashMap::new();
        count_equation(e, outside_only, &mut own);
        self.total.get(&v).copied().unwrap_or(0) > own.get(&v).copied().unwrap_or(0)
    }
}

fn subs_applies(e: &Equation, occ: &Occurrences, outside_only: bool) -> bool {
    match e {
        Equation::Type(PreType::Var(a), rhs) => {
            !rhs.mentions(*a) && occ.elsewhere(*a, e, outside_only)
        }
        _ => false,
    }
}

/// Every rule application available in `s` under `rel`, in scheduling order.
pub fn applicable(s: &EquationSet, rel: Relation) -> Vec<Redex> {
    let mut out = Vec::new();
    for rule in [Rule::Erase, Rule::Swap, Rule::Arrow, Rule::List] {
        for (index, e) in s.iter().enumerate() {
            if rule_applies(rule, e) {
                out.push(Redex { rule, index });
            }
        }
    }
    let outside_only = rel == Relation::O;
    let occ = Occurrences::of(s, outside_only);
    for (index, e) in s.iter().enumerate() {
        if subs_applies(e, &occ, outside_only) {
            out.push(Redex {
                rule: Rule::Subs,
                index,
            });
        }
    }
    out
}

/// The first applicable rule under the deterministic schedule.
pub fn first_redex(s: &EquationSet, rel: Relation) -> Option<Redex> {
    for rule in [Rule::Erase, Rule::Swap, Rule::Arrow, Rule::List] {
        if let Some(index) = s.iter().position(|e| rule_applies(rule, e)) {
            return Some(Redex { rule, index });
        }
    }
    let outside_only = rel == Relation::O;
    let occ = Occurrences::of(s, outside_only);
    s.iter()
        .position(|e| subs_applies(e, &occ, outside_only))
        .map(|index| Redex {
            rule: Rule::Subs,
            index,
        })
}

/// Replaces outside-list occurrences of `a` (the tail variable of an
/// arrow chain) by `by`.
fn replace_outside(t: &PreType, a: TyVar, by: &PreType) -> PreType {
    match t {
        PreType::Var(v) if *v == a => by.clone(),
        PreType::Var(_) => t.clone(),
        PreType::Arrow(d, c) => PreType::Arrow(d.clone(), Box::new(replace_outside(c, a, by))),
    }
}

/// Rebuilds `s` with equation `index` replaced by `with` and every other
/// equation mapped through `map`, collapsing duplicates (first one wins).
fn rebuild(
    s: &EquationSet,
    index: usize,
    with: Vec<Equation>,
    map: impl Fn(&Equation) -> Equation,
) -> EquationSet {
    let mut out = Vec::with_capacity(s.len() + with.len());
    let mut with = Some(with);
    for (i, e) in s.iter().enumerate() {
        if i == index {
            out.extend(with.take().expect("index visited once"));
        } else {
            out.push(map(e));
        }
    }
    out.into_iter().collect()
}

/// Applies one rule at the given equation. The redex must come from
/// [`applicable`] on the same set.
pub fn apply_redex(s: &EquationSet, redex: Redex, rel: Relation) -> EquationSet {
    let e = &s.as_slice()[redex.index];
    let keep = |x: &Equation| x.clone();
    match (redex.rule, e) {
        (Rule::Erase, _) => rebuild(s, redex.index, vec![], keep),
        (Rule::Swap, Equation::Type(a, b)) => rebuild(
            s,
            redex.index,
            vec![Equation::Type(b.clone(), a.clone())],
            keep,
        ),
        (Rule::Arrow, Equation::Type(PreType::Arrow(s1, a), PreType::Arrow(t1, b))) => rebuild(
            s,
            redex.index,
            vec![
                Equation::List(s1.clone(), t1.clone()),
                Equation::Type((**a).clone(), (**b).clone()),
            ],
            keep,
        ),
        (Rule::List, Equation::List(a, b)) => rebuild(
            s,
            redex.index,
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| Equation::Type(x.clone(), y.clone()))
                .collect(),
            keep,
        ),
        (Rule::Subs, Equation::Type(PreType::Var(a), rhs)) => {
            let a = *a;
            match rel {
                Relation::U => {
                    let sub = PreSubst::singleton(a, rhs.clone());
                    rebuild(s, redex.index, vec![e.clone()], |x| {
                        EquationSet(vec![x.clone()])
                            .apply(&sub)
                            .0
                            .pop()
                            .expect("one equation")
                    })
                }
                Relation::O => rebuild(s, redex.index, vec![e.clone()], |x| match x {
                    Equation::Type(l, r) => {
                        Equation::Type(replace_outside(l, a, rhs), replace_outside(r, a, rhs))
                    }
                    Equation::List(..) => x.clone(),
                }),
            }
        }
        _ => panic!("rule {:?} does not apply to {e}", redex.rule),
    }
}

pub fn step(s: &EquationSet, rel: Relation) -> Option<EquationSet> {
    first_redex(s, rel).map(|r| apply_redex(s, r, rel))
}

/// One `→u` step, or `None` on a normal form.
pub fn step_u(s: &EquationSet) -> Option<EquationSet> {
    step(s, Relation::U)
}

/// One `→o` step, or `None` on a normal form.
pub fn step_o(s: &EquationSet) -> Option<EquationSet> {
    step(s, Relation::O)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("no normal form within {steps} rewriting steps")]
pub struct Diverged {
    pub steps: usize,
    pub last: EquationSet,
}

/// A generous step budget for normalizing `s`: far above what any
/// equation set of a pseudo-derivation needs, so only genuinely cycling
/// `→o` runs hit it.
pub fn step_budget(s: &EquationSet) -> usize {
    let size: usize = s
        .iter()
        .map(|e| match e {
            Equation::Type(a, b) => a.size() + b.size(),
            Equation::List(a, b) => a.iter().chain(b.iter()).map(PreType::size).sum::<usize>() + 1,
        })
        .sum();
    (size + 1)
        .saturating_mul(s.vars().len() + 2)
        .saturating_mul(8)
        .max(1000)
}

/// Like [`normalize`], but gives up after `max_steps`. `→u` always
/// terminates; `→o` can cycle on sets that do not come from
/// pseudo-derivations (subs-out may fire again on a variable that a later
/// list decomposition brings back out of a list).
pub fn normalize_bounded(
    s: &EquationSet,
    rel: Relation,
    max_steps: usize,
) -> Result<(EquationSet, usize), Diverged> {
    let mut cur = s.clone();
    for steps in 0..=max_steps {
        match step(&cur, rel) {
            None => return Ok((cur, steps)),
            Some(next) if steps < max_steps => cur = next,
            Some(_) => break,
        }
    }
    Err(Diverged {
        steps: max_steps,
        last: cur,
    })
}

/// Iterates [`step`] to the normal form. May not return for `→o` on sets
/// that cannot arise from pseudo-derivations; see [`normalize_bounded`].
pub fn normalize(s: &EquationSet, rel: Relation) -> EquationSet {
    let mut cur = s.clone();
    while let Some(next) = step(&cur, rel) {
        cur = next;
    }
    cur
}

/// `nf(S)`.
pub fn normalize_u(s: &EquationSet) -> EquationSet {
    normalize(s, Relation::U)
}

/// `nfo(S)`.
pub fn normalize_o(s: &EquationSet) -> EquationSet {
    normalize(s, Relation::O)
}

/// Normalizes by repeatedly letting `choose` pick among all applicable
/// steps; returns the normal form and the number of steps taken.
pub fn normalize_with(
    s: &EquationSet,
    rel: Relation,
    mut choose: impl FnMut(&[Redex]) -> usize,
) -> (EquationSet, usize) {
    let mut cur = s.clone();
    let mut steps = 0;
    loop {
        let options = applicable(&cur, rel);
        if options.is_empty() {
            return (cur, steps);
        }
        let pick = options[choose(&options) % options.len()];
        cur = apply_redex(&cur, pick, rel);
        steps += 1;
    }
}

// ---------------------------------------------------------------------------
// Equality modulo renaming

fn match_type(
    a: &PreType,
    b: &PreType,
    fwd: &mut HashMap<TyVar, TyVar>,
    bwd: &mut HashMap<TyVar, TyVar>,
) -> bool {
    match (a, b) {
        (PreType::Var(x), PreType::Var(y)) => match (fwd.get(x), bwd.get(y)) {
            (None, None) => {
                fwd.insert(*x, *y);
                bwd.insert(*y, *x);
                true
            }
            (Some(y2), Some(x2)) => y2 == y && x2 == x,
            _ => false,
        },
        (PreType::Arrow(d1, c1), PreType::Arrow(d2, c2)) => {
            match_list(d1, d2, fwd, bwd) && match_type(c1, c2, fwd, bwd)
        }
        _ => false,
    }
}

fn match_list(
    a: &PreList,
    b: &PreList,
    fwd: &mut HashMap<TyVar, TyVar>,
    bwd: &mut HashMap<TyVar, TyVar>,
) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b.iter())
            .all(|(x, y)| match_type(x, y, fwd, bwd))
}

fn match_equation(
    a: &Equation,
    b: &Equation,
    fwd: &mut HashMap<TyVar, TyVar>,
    bwd: &mut HashMap<TyVar, TyVar>,
) -> bool {
    match (a, b) {
        (Equation::Type(l1, r1), Equation::Type(l2, r2)) => {
            match_type(l1, l2, fwd, bwd) && match_type(r1, r2, fwd, bwd)
        }
        (Equation::List(l1, r1), Equation::List(l2, r2)) => {
            match_list(l1, l2, fwd, bwd) && match_list(r1, r2, fwd, bwd)
        }
        _ => false,
    }
}

/// Whether some bijective variable renaming maps `a` onto `b` as sets.
pub fn equal_modulo_renaming(a: &EquationSet, b: &EquationSet) -> bool {
    if a.len() != b.len() {
        return false;
    }
    fn search(
        a: &[Equation],
        b: &[Equation],
        used: &mut Vec<bool>,
        fwd: &HashMap<TyVar, TyVar>,
        bwd: &HashMap<TyVar, TyVar>,
    ) -> bool {
        let Some((first, rest)) = a.split_first() else {
            return true;
        };
        for j in 0..b.len() {
            if used[j] {
                continue;
            }
            let (mut f, mut g) = (fwd.clone(), bwd.clone());
            if match_equation(first, &b[j], &mut f, &mut g) {
                used[j] = true;
                if search(rest, b, used, &f, &g) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    let mut used = vec![false; b.len()];
    search(
        a.as_slice(),
        b.as_slice(),
        &mut used,
        &HashMap::new(),
        &HashMap::new(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(n: u32) -> PreType {
        PreType::Var(TyVar(n))
    }

    fn l(items: Vec<PreType>) -> PreList {
        PreList(items)
    }

    fn arr(d: Vec<PreType>, c: PreType) -> PreType {
        PreType::arrow(l(d), c)
    }

    fn ty(a: PreType, b: PreType) -> Equation {
        Equation::Type(a, b)
    }

    fn set(es: Vec<Equation>) -> EquationSet {
        es.into_iter().collect()
    }

    const A: u32 = 0;
    const B: u32 = 1;
    const C: u32 = 2;
    const D: u32 = 3;
    const C2: u32 = 4;

    fn example_set() -> EquationSet {
        set(vec![
            ty(v(B), arr(vec![v(A)], v(A))),
            ty(v(B), arr(vec![v(C)], v(D))),
        ])
    }

    #[test]
    fn identity_example_solves() {
        let nf = normalize_u(&example_set());
        let expected = set(vec![
            ty(v(B), arr(vec![v(A)], v(A))),
            ty(v(C), v(A)),
            ty(v(D), v(A)),
        ]);
        assert!(equal_modulo_renaming(&nf, &expected), "{nf}");
        assert!(classify(&nf).solved);
        let mgu = extract_mgu(&nf).unwrap();
        let b = mgu.lookup(TyVar(B));
        assert!(
            matches!(&b, PreType::Arrow(d, c) if d.0 == vec![(**c).clone()]),
            "{b}"
        );
        assert!(example_set().solved_by(&mgu));
    }

    #[test]
    fn expanded_example_blocks() {
        let s = set(vec![
            ty(v(B), arr(vec![v(A)], v(A))),
            ty(v(B), arr(vec![v(C), v(C2)], v(D))),
        ]);
        let nf = normalize_u(&s);
        let r = classify(&nf);
        assert!(r.is_blocked() && !r.solved);
        assert_eq!(r.blocked.len(), 1);
        let expected = set(vec![
            ty(v(B), arr(vec![v(A)], v(A))),
            Equation::List(l(vec![v(A)]), l(vec![v(C), v(C2)])),
            ty(v(D), v(A)),
        ]);
        assert!(equal_modulo_renaming(&nf, &expected), "{nf}");
    }

    #[test]
    fn classify_examples() {
        let solved = set(vec![
            ty(v(B), arr(vec![v(A)], v(A))),
            ty(v(C), v(A)),
            ty(v(D), v(A)),
        ]);
        assert!(classify(&solved).solved);
        let blocked = set(vec![Equation::List(l(vec![v(A)]), l(vec![v(C), v(C2)]))]);
        assert_eq!(classify(&blocked).blocked.len(), 1);
        let circ = set(vec![ty(v(A), arr(vec![v(B)], v(A)))]);
        let r = classify(&circ);
        assert!(r.is_unsolvable() && !r.solved);
        assert!(classify(&EquationSet::new()).solved);
        // lhs occurring in a rhs
        assert!(!classify(&set(vec![ty(v(A), v(B)), ty(v(B), v(C))])).solved);
    }

    #[test]
    fn out_normal_but_unclassified() {
        let s = set(vec![
            ty(v(A), arr(vec![v(B)], v(C))),
            ty(v(B), arr(vec![v(A)], v(D))),
        ]);
        assert!(step_o(&s).is_none());
        let r = classify(&s);
        assert!(!r.solved && !r.is_blocked() && !r.is_unsolvable());
        // →u does go on and exposes the circularity
        assert!(classify(&normalize_u(&s)).is_unsolvable());
    }

    #[test]
    fn erase_and_empty_lists() {
        let s = set(vec![ty(arr(vec![], v(A)), arr(vec![], v(A)))]);
        assert_eq!(step_u(&s), Some(EquationSet::new()));
        let s = set(vec![Equation::List(l(vec![]), l(vec![]))]);
        assert_eq!(step_u(&s), Some(EquationSet::new()));
        assert_eq!(normalize_u(&EquationSet::new()), EquationSet::new());
    }

    #[test]
    fn mgu_examples() {
        assert_eq!(extract_mgu(&EquationSet::new()).unwrap(), PreSubst::new());
        let s = set(vec![ty(v(A), arr(vec![v(B)], v(C)))]);
        assert_eq!(
            extract_mgu(&s).unwrap().lookup(TyVar(A)),
            arr(vec![v(B)], v(C))
        );
        assert!(extract_mgu(&set(vec![ty(v(A), v(B)), ty(v(A), v(C))])).is_err());
    }

    #[test]
    fn subs_out_leaves_lists_alone() {
        let s = set(vec![ty(v(A), v(B)), ty(v(C), arr(vec![v(A)], v(A)))]);
        let nfo = normalize_o(&s);
        assert!(nfo.contains(&ty(v(C), arr(vec![v(A)], v(B)))), "{nfo}");
        let nf = normalize_u(&s);
        assert!(nf.contains(&ty(v(C), arr(vec![v(B)], v(B)))), "{nf}");
    }

    #[test]
    fn renaming_matcher() {
        let s1 = set(vec![ty(v(0), arr(vec![v(1)], v(2))), ty(v(3), v(2))]);
        let s2 = set(vec![ty(v(9), v(7)), ty(v(5), arr(vec![v(6)], v(7)))]);
        assert!(equal_modulo_renaming(&s1, &s2));
        let s3 = set(vec![ty(v(9), v(7)), ty(v(5), arr(vec![v(6)], v(6)))]);
        assert!(!equal_modulo_renaming(&s1, &s3));
        // not injective
        let s4 = set(vec![ty(v(0), v(1))]);
        let s5 = set(vec![ty(v(0), v(0))]);
        assert!(!equal_modulo_renaming(&s4, &s5));
    }

    // Random equation sets in the shape produced by pseudo-derivations:
    // variable left-hand sides against arrows over lists of variables, plus
    // the occasional variable-variable or list equation.
    pub(crate) fn random_set(rng: &mut ChaCha8Rng, nvars: u32) -> EquationSet {
        let n = rng.random_range(1..6);
        let var = |rng: &mut ChaCha8Rng| v(rng.random_range(0..nvars));
        let mut out = Vec::new();
        for _ in 0..n {
            let lhs = var(rng);
            let e = match rng.random_range(0..6) {
                0 => ty(lhs, var(rng)),
                1 => {
                    let k = rng.random_range(0..3);
                    let j = rng.random_range(0..3);
                    Equation::List(
                        l((0..k).map(|_| var(rng)).collect()),
                        l((0..j).map(|_| var(rng)).collect()),
                    )
                }
                2 => {
                    let inner = arr(vec![var(rng)], var(rng));
                    ty(arr(vec![inner], var(rng)), lhs)
                }
                _ => {
                    let k = rng.random_range(1..3);
                    let dom = (0..k).map(|_| var(rng)).collect();
                    ty(lhs, arr(dom, var(rng)))
                }
            };
            out.push(e);
        }
        set(out)
    }

    /// Solved normal forms agree modulo renaming. Stuck (unsolvable or
    /// blocked) forms only have to agree on being stuck: which circular or
    /// length-mismatched equation surfaces depends on the order of
    /// substitutions.
    fn same_outcome(x: &EquationSet, y: &EquationSet) -> bool {
        let (rx, ry) = (classify(x), classify(y));
        if rx.solved || ry.solved {
            rx.solved && ry.solved && equal_modulo_renaming(x, y)
        } else {
            true
        }
    }

    fn bound(s: &EquationSet) -> usize {
        // every rule application removes a constructor or a variable
        // occurrence from the pool of unsolved positions
        let size: usize = s
            .iter()
            .map(|e| match e {
                Equation::Type(a, b) => a.size() + b.size(),
                Equation::List(a, b) => {
                    a.iter().chain(b.iter()).map(PreType::size).sum::<usize>() + 1
                }
            })
            .sum();
        let vars = s.vars().len();
        (size + 1) * (vars + 2) * 2
    }

    fn random_order(s: &EquationSet, rel: Relation, seed: u64) -> (EquationSet, usize) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut left = step_budget(s);
        normalize_with(s, rel, |opts| {
            left = left.checked_sub(1).expect("bounded");
            r.random_range(0..opts.len())
        })
    }

    #[test]
    fn u_confluence_under_random_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let s = random_set(&mut rng, 5);
            let canonical = normalize_u(&s);
            for seed in 0..4u64 {
                let (nf, steps) = random_order(&s, Relation::U, seed);
                assert!(steps <= bound(&s), "{s}: {steps} steps");
                assert!(same_outcome(&nf, &canonical), "{s}: {nf} vs {canonical}");
            }
        }
    }

    /// On arbitrary sets, different `→o` orders may stop at normal forms that
    /// differ beyond renaming, but `→u` always brings them back together.
    #[test]
    fn o_normal_forms_agree_after_u() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut checked = 0;
        for _ in 0..400 {
            let s = random_set(&mut rng, 5);
            if normalize_bounded(&s, Relation::O, step_budget(&s)).is_err() {
                continue;
            }
            checked += 1;
            let nf = normalize_u(&s);
            for seed in 0..4u64 {
                let (nfo, _) = random_order(&s, Relation::O, seed);
                assert!(same_outcome(&normalize_u(&nfo), &nf), "{s}: {nfo}");
            }
        }
        assert!(checked >= 200, "{checked}");
    }

    #[test]
    fn o_orders_can_disagree_on_variable_cycles() {
        let (a, b, c, d, e) = (0, 1, 2, 3, 4);
        let s = set(vec![
            ty(v(c), v(e)),
            ty(v(e), v(a)),
            ty(v(a), v(c)),
            ty(v(d), arr(vec![v(c)], v(b))),
        ]);
        let mut forms: Vec<EquationSet> = Vec::new();
        for seed in 0..32 {
            let (nfo, _) = random_order(&s, Relation::O, seed);
            if !forms.iter().any(|f| equal_modulo_renaming(f, &nfo)) {
                forms.push(nfo);
            }
        }
        assert!(forms.len() > 1);
        let nf = normalize_u(&s);
        assert!(forms
            .iter()
            .all(|f| equal_modulo_renaming(&normalize_u(f), &nf)));
    }

    #[test]
    fn nfo_then_u_reaches_nf() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        for _ in 0..400 {
            let s = random_set(&mut rng, 5);
            let Ok((nfo, _)) = normalize_bounded(&s, Relation::O, step_budget(&s)) else {
                continue;
            };
            checked += 1;
            let nf = normalize_u(&s);
            assert!(same_outcome(&normalize_u(&nfo), &nf), "{s}");
            if !classify(&nfo).is_blocked() {
                assert!(!classify(&nf).is_blocked(), "{s}");
            }
        }
        assert!(checked >= 200, "only {checked} sets had an →o normal form");
    }

    #[test]
    fn indexed_normalizer_matches_stepwise_schedule() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut compared = 0;
        for _ in 0..2000 {
            let s = random_set(&mut rng, 5);
            for rel in [Relation::U, Relation::O] {
                if let Ok((nf, _)) = normalize_bounded(&s, rel, step_budget(&s)) {
                    assert_eq!(
                        normalize_indexed(&s, rel, step_budget(&s)).unwrap(),
                        nf,
                        "{rel:?} {s}"
                    );
                    let c = classify(&nf);
                    let summary = summarize_indexed(&s, rel, step_budget(&s)).unwrap();
                    assert_eq!(
                        (
                            summary.equations,
                            summary.solved,
                            summary.circular,
                            summary.blocked
                        ),
                        (nf.len(), c.solved, c.circular.len(), c.blocked.len()),
                        "{rel:?} {s}"
                    );
                    compared += 1;
                }
            }
        }
        assert!(compared > 3000);
    }

    #[test]
    fn subs_out_cycles_on_some_arbitrary_sets() {
        let (a, b, c, d, e) = (0, 1, 2, 3, 4);
        let s = set(vec![
            ty(v(c), arr(vec![v(e)], v(d))),
            ty(v(a), arr(vec![v(a), v(e)], v(d))),
            ty(arr(vec![arr(vec![v(c)], v(b))], v(b)), v(e)),
            ty(v(e), arr(vec![v(c)], v(d))),
        ]);
        let err = normalize_bounded(&s, Relation::O, 10_000).unwrap_err();
        assert!(normalize_indexed(&s, Relation::O, 10_000).is_err());
        assert_eq!(err.steps, 10_000);
        // →u has no such problem
        let (nf, _) = normalize_bounded(&s, Relation::U, step_budget(&s)).unwrap();
        assert!(!classify(&nf).solved);
    }

    #[test]
    fn nf_is_solved_or_stuck() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let s = random_set(&mut rng, 4);
            let nf = normalize_u(&s);
            let r = classify(&nf);
            assert!(
                r.solved || r.is_blocked() || r.is_unsolvable(),
                "{s} -> {nf}"
            );
            if r.solved {
                assert!(s.solved_by(&extract_mgu(&nf).unwrap()), "{s}");
            }
        }
    }

    proptest! {
        #[test]
        fn renaming_is_reflexive(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_set(&mut rng, 5);
            let shift: PreSubst = s.vars().into_iter().map(|x| (x, PreType::Var(TyVar(x.0 + 100)))).collect();
            prop_assert!(equal_modulo_renaming(&s, &s.apply(&shift)));
        }
    }
}
