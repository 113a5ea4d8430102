//! Untyped λ-terms: hygiene, α-equivalence, capture-free substitution and
//! redex addressing.
//!
//! Every `Term` produced by this module (the parser, [`substitute`],
//! [`beta_step`]) is *hygienic*: distinct binders carry distinct names and no
//! bound name coincides with a free one. Equality and hashing are up to
//! α-equivalence.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

#[derive(Clone, Debug)]
pub enum Term {
    Var(String),
    Abs(String, Box<Term>),
    App(Box<Term>, Box<Term>),
}

/// Child selector used to address a subterm from the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    /// Body of an abstraction.
    Body,
    /// Function part of an application.
    Func,
    /// Argument part of an application.
    Arg,
}

pub type Path = Vec<Step>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RedexKind {
    /// The binder occurs free in the body.
    I,
    /// The binder does not occur in the body; contraction erases the argument.
    K,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RedexOccurrence {
    pub path: Path,
    pub kind: RedexKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("path {0:?} does not address a subterm")]
    InvalidPath(Path),
    #[error("subterm at {0:?} is not a β-redex")]
    NotARedex(Path),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    /// Builds `λx.body` and re-establishes hygiene.
    pub fn abs(binder: impl Into<String>, body: Term) -> Term {
        Term::Abs(binder.into(), Box::new(body)).hygienic()
    }

    /// Builds `f a` and re-establishes hygiene.
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a)).hygienic()
    }

    /// Left-nested application `head a1 ... an`.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter()
            .fold(head, |f, a| Term::App(Box::new(f), Box::new(a)))
            .hygienic()
    }

    /// Number of nodes (variables, abstractions and applications).
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match t {
                Term::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Term::Abs(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Term::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => y == x,
            Term::Abs(y, b) => y != x && b.occurs_free(x),
            Term::App(f, a) => f.occurs_free(x) || a.occurs_free(x),
        }
    }

    /// All names occurring in the term, bound or free.
    pub fn all_names(&self) -> HashSet<String> {
        fn go(t: &Term, out: &mut HashSet<String>) {
            match t {
                Term::Var(x) => {
                    out.insert(x.clone());
                }
                Term::Abs(x, b) => {
                    out.insert(x.clone());
                    go(b, out);
                }
                Term::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
            }
        }
        let mut out = HashSet::new();
        go(self, &mut out);
        out
    }

    /// True when distinct binders have distinct names and no binder shares a
    /// name with a free variable.
    pub fn is_hygienic(&self) -> bool {
        fn go(t: &Term, seen: &mut HashSet<String>) -> bool {
            match t {
                Term::Var(_) => true,
                Term::Abs(x, b) => seen.insert(x.clone()) && go(b, seen),
                Term::App(f, a) => go(f, seen) && go(a, seen),
            }
        }
        let mut seen: HashSet<String> = self.free_vars().into_iter().collect();
        go(self, &mut seen)
    }

    /// Renames binders so that the hygiene convention holds. Binders that are
    /// already unique keep their names.
    pub fn hygienic(self) -> Term {
        if self.is_hygienic() {
            return self;
        }
        let mut used: HashSet<String> = self.free_vars().into_iter().collect();
        let mut scope: Vec<(String, String)> = Vec::new();
        rename_binders(self, &mut used, &mut scope)
    }

    /// Renames binders deterministically (`v0`, `v1`, ... in preorder),
    /// skipping names that clash with free variables. Two terms are
    /// α-equivalent iff their canonical forms are syntactically identical.
    pub fn canonical(&self) -> Term {
        fn go(
            t: &Term,
            free: &BTreeSet<String>,
            next: &mut usize,
            scope: &mut Vec<(String, String)>,
        ) -> Term {
            match t {
                Term::Var(x) => match scope.iter().rev().find(|(old, _)| old == x) {
                    Some((_, new)) => Term::Var(new.clone()),
                    None => Term::Var(x.clone()),
                },
                Term::Abs(x, b) => {
                    let name = loop {
                        let candidate = format!("v{next}");
                        *next += 1;
                        if !free.contains(&candidate) {
                            break candidate;
                        }
                    };
                    scope.push((x.clone(), name.clone()));
                    let body = go(b, free, next, scope);
                    scope.pop();
                    Term::Abs(name, Box::new(body))
                }
                Term::App(f, a) => Term::App(
                    Box::new(go(f, free, next, scope)),
                    Box::new(go(a, free, next, scope)),
                ),
            }
        }
        go(self, &self.free_vars(), &mut 0, &mut Vec::new())
    }

    /// Syntactic equality, names included. `==` on terms is α-equivalence.
    pub fn same_syntax(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Var(x), Term::Var(y)) => x == y,
            (Term::Abs(x, b), Term::Abs(y, c)) => x == y && b.same_syntax(c),
            (Term::App(f, a), Term::App(g, b)) => f.same_syntax(g) && a.same_syntax(b),
            _ => false,
        }
    }

    /// Nameless representation; equal keys iff α-equivalent terms.
    pub fn alpha_key(&self) -> Nameless {
        fn go(t: &Term, scope: &mut Vec<String>) -> Nameless {
            match t {
                Term::Var(x) => match scope.iter().rev().position(|y| y == x) {
                    Some(i) => Nameless::Bound(i),
                    None => Nameless::Free(x.clone()),
                },
                Term::Abs(x, b) => {
                    scope.push(x.clone());
                    let body = go(b, scope);
                    scope.pop();
                    Nameless::Abs(Box::new(body))
                }
                Term::App(f, a) => Nameless::App(Box::new(go(f, scope)), Box::new(go(a, scope))),
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn subterm(&self, path: &[Step]) -> Option<&Term> {
        let mut t = self;
        for step in path {
            t = match (t, step) {
                (Term::Abs(_, b), Step::Body) => b,
                (Term::App(f, _), Step::Func) => f,
                (Term::App(_, a), Step::Arg) => a,
                _ => return None,
            };
        }
        Some(t)
    }

    /// Replaces the subterm at `path`. Hygiene is not re-established.
    fn replace_at(&self, path: &[Step], f: &mut dyn FnMut(&Term) -> Term) -> Option<Term> {
        let Some((step, rest)) = path.split_first() else {
            return Some(f(self));
        };
        Some(match (self, step) {
            (Term::Abs(x, b), Step::Body) => Term::Abs(x.clone(), Box::new(b.replace_at(rest, f)?)),
            (Term::App(g, a), Step::Func) => Term::App(Box::new(g.replace_at(rest, f)?), a.clone()),
            (Term::App(g, a), Step::Arg) => Term::App(g.clone(), Box::new(a.replace_at(rest, f)?)),
            _ => return None,
        })
    }

    pub fn is_redex(&self) -> bool {
        matches!(self, Term::App(f, _) if matches!(**f, Term::Abs(..)))
    }

    /// β-normal form: `K ::= λx.K | x K1 ... Kn`.
    pub fn is_normal_form(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Abs(_, b) => b.is_normal_form(),
            Term::App(f, a) => {
                !matches!(**f, Term::Abs(..)) && f.is_normal_form() && a.is_normal_form()
            }
        }
    }

    /// Head normal form: `H ::= λx.H | x M1 ... Mn`.
    pub fn is_head_normal_form(&self) -> bool {
        let mut t = self;
        while let Term::Abs(_, b) = t {
            t = b;
        }
        while let Term::App(f, _) = t {
            t = f;
        }
        matches!(t, Term::Var(_))
    }
}

/// Nameless (de Bruijn) form of a term, used for α-equivalence and hashing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nameless {
    Free(String),
    Bound(usize),
    Abs(Box<Nameless>),
    App(Box<Nameless>, Box<Nameless>),
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        fn go<'a>(s: &'a Term, t: &'a Term, env: &mut Vec<(&'a str, &'a str)>) -> bool {
            match (s, t) {
                (Term::Var(x), Term::Var(y)) => {
                    let bx = env.iter().rev().position(|(l, _)| *l == x);
                    let by = env.iter().rev().position(|(_, r)| *r == y);
                    match (bx, by) {
                        (Some(i), Some(j)) => i == j,
                        (None, None) => x == y,
                        _ => false,
                    }
                }
                (Term::Abs(x, b), Term::Abs(y, c)) => {
                    env.push((x, y));
                    let r = go(b, c, env);
                    env.pop();
                    r
                }
                (Term::App(f, a), Term::App(g, b)) => go(f, g, env) && go(a, b, env),
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.alpha_key().hash(state);
    }
}

fn fresh_name(base: &str, used: &HashSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|k| format!("{stem}{k}"))
        .find(|n| !used.contains(n))
        .expect("unbounded name supply")
}

fn rename_binders(t: Term, used: &mut HashSet<String>, scope: &mut Vec<(String, String)>) -> Term {
    match t {
        Term::Var(x) => match scope.iter().rev().find(|(old, _)| *old == x) {
            Some((_, new)) => Term::Var(new.clone()),
            None => Term::Var(x),
        },
        Term::Abs(x, b) => {
            let name = if used.contains(&x) {
                fresh_name(&x, used)
            } else {
                x.clone()
            };
            used.insert(name.clone());
            scope.push((x, name.clone()));
            let body = rename_binders(*b, used, scope);
            scope.pop();
            Term::Abs(name, Box::new(body))
        }
        Term::App(f, a) => {
            let f = rename_binders(*f, used, scope);
            let a = rename_binders(*a, used, scope);
            Term::App(Box::new(f), Box::new(a))
        }
    }
}

/// Capture-free substitution `body[replacement/target]`; the result is hygienic.
pub fn substitute(body: &Term, target: &str, replacement: &Term) -> Term {
    let repl_free = replacement.free_vars();
    let mut avoid: HashSet<String> = body.all_names();
    avoid.extend(replacement.all_names());
    subst_rec(body, target, replacement, &repl_free, &mut avoid).hygienic()
}

fn subst_rec(
    t: &Term,
    target: &str,
    repl: &Term,
    repl_free: &BTreeSet<String>,
    avoid: &mut HashSet<String>,
) -> Term {
    match t {
        Term::Var(x) if x == target => repl.clone(),
        Term::Var(_) => t.clone(),
        Term::Abs(x, _) if x == target => t.clone(),
        Term::Abs(x, b) => {
            if !b.occurs_free(target) {
                return t.clone();
            }
            if repl_free.contains(x) {
                let fresh = fresh_name(x, avoid);
                avoid.insert(fresh.clone());
                let renamed = subst_rec(b, x, &Term::Var(fresh.clone()), &BTreeSet::new(), avoid);
                let body = subst_rec(&renamed, target, repl, repl_free, avoid);
                Term::Abs(fresh, Box::new(body))
            } else {
                Term::Abs(
                    x.clone(),
                    Box::new(subst_rec(b, target, repl, repl_free, avoid)),
                )
            }
        }
        Term::App(f, a) => Term::App(
            Box::new(subst_rec(f, target, repl, repl_free, avoid)),
            Box::new(subst_rec(a, target, repl, repl_free, avoid)),
        ),
    }
}

/// All redex occurrences in leftmost-outermost (preorder) order.
pub fn find_redexes(t: &Term) -> Vec<RedexOccurrence> {
    fn go(t: &Term, path: &mut Path, out: &mut Vec<RedexOccurrence>) {
        match t {
            Term::Var(_) => {}
            Term::Abs(_, b) => {
                path.push(Step::Body);
                go(b, path, out);
                path.pop();
            }
            Term::App(f, a) => {
                if let Term::Abs(x, p) = &**f {
                    let kind = if p.occurs_free(x) {
                        RedexKind::I
                    } else {
                        RedexKind::K
                    };
                    out.push(RedexOccurrence {
                        path: path.clone(),
                        kind,
                    });
                }
                path.push(Step::Func);
                go(f, path, out);
                path.pop();
                path.push(Step::Arg);
                go(a, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// The leftmost-outermost redex, if any.
pub fn leftmost_outermost(t: &Term) -> Option<RedexOccurrence> {
    fn go(t: &Term, path: &mut Path) -> Option<RedexOccurrence> {
        match t {
            Term::Var(_) => None,
            Term::Abs(_, b) => {
                path.push(Step::Body);
                let r = go(b, path);
                path.pop();
                r
            }
            Term::App(f, a) => {
                if let Term::Abs(x, p) = &**f {
                    let kind = if p.occurs_free(x) {
                        RedexKind::I
                    } else {
                        RedexKind::K
                    };
                    return Some(RedexOccurrence {
                        path: path.clone(),
                        kind,
                    });
                }
                path.push(Step::Func);
                if let Some(r) = go(f, path) {
                    return Some(r);
                }
                path.pop();
                path.push(Step::Arg);
                let r = go(a, path);
                path.pop();
                r
            }
        }
    }
    go(t, &mut Vec::new())
}

/// Contracts the redex at `path`.
pub fn beta_step(t: &Term, path: &[Step]) -> Result<Term, TermError> {
    let sub = t
        .subterm(path)
        .ok_or_else(|| TermError::InvalidPath(path.to_vec()))?;
    if !sub.is_redex() {
        return Err(TermError::NotARedex(path.to_vec()));
    }
    let out = t
        .replace_at(path, &mut |s| match s {
            Term::App(f, a) => match &**f {
                Term::Abs(x, p) => substitute(p, x, a),
                _ => unreachable!(),
            },
            _ => unreachable!(),
        })
        .expect("path checked above");
    Ok(out.hygienic())
}

/// Barendregt's perpetual strategy F∞. Returns `t` unchanged on normal forms.
pub fn f_infinity_step(t: &Term) -> Term {
    let Some(redex) = leftmost_outermost(t) else {
        return t.clone();
    };
    let out = t
        .replace_at(&redex.path, &mut |s| {
            let (x, p, q) = match s {
                Term::App(f, q) => match &**f {
                    Term::Abs(x, p) => (x, p, q),
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            };
            if p.occurs_free(x) {
                substitute(p, x, q)
            } else if q.is_normal_form() {
                (**p).clone()
            } else {
                Term::App(
                    Box::new(Term::Abs(x.clone(), p.clone())),
                    Box::new(f_infinity_step(q)),
                )
            }
        })
        .expect("redex path is valid");
    out.hygienic()
}

/// Contracts the leftmost-outermost redex (normal-order reduction).
pub fn leftmost_outermost_step(t: &Term) -> Option<Term> {
    let r = leftmost_outermost(t)?;
    Some(beta_step(t, &r.path).expect("leftmost-outermost path addresses a redex"))
}

/// All one-step β-reducts, in leftmost-outermost order of the contracted redex.
pub fn one_step_reducts(t: &Term) -> Vec<Term> {
    find_redexes(t)
        .iter()
        .map(|r| beta_step(t, &r.path).expect("redex from find_redexes"))
        .collect()
}

/// Binder names in preorder.
pub fn binder_names(t: &Term) -> Vec<String> {
    let mut out = Vec::new();
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        match t {
            Term::Var(_) => {}
            Term::Abs(x, b) => {
                out.push(x.clone());
                stack.push(b);
            }
            Term::App(f, a) => {
                stack.push(a);
                stack.push(f);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct Printer {
    pub ascii: bool,
}

impl Printer {
    pub fn render(&self, t: &Term) -> String {
        let mut s = String::new();
        self.write(t, &mut s);
        s
    }

    fn write(&self, t: &Term, out: &mut String) {
        match t {
            Term::Var(x) => out.push_str(x),
            Term::Abs(x, b) => {
                out.push_str(if self.ascii { "\\" } else { "λ" });
                out.push_str(x);
                out.push('.');
                self.write(b, out);
            }
            Term::App(f, a) => {
                match **f {
                    Term::Abs(..) => self.parens(f, out),
                    _ => self.write(f, out),
                }
                out.push(' ');
                match **a {
                    Term::Var(_) => self.write(a, out),
                    _ => self.parens(a, out),
                }
            }
        }
    }

    fn parens(&self, t: &Term, out: &mut String) {
        out.push('(');
        self.write(t, out);
        out.push(')');
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Printer { ascii: false }.render(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn alpha_equivalence_ignores_bound_names() {
        assert_eq!(p("\\x.x"), p("\\y.y"));
        assert_ne!(p("\\x.y"), p("\\x.z"));
        assert_ne!(p("\\x.\\y.x"), p("\\x.\\y.y"));
        assert_eq!(p("\\x.\\y.x").alpha_key(), p("\\a.\\b.a").alpha_key());
    }

    #[test]
    fn substitution_examples() {
        let id = p("\\y.y");
        assert_eq!(substitute(&p("x"), "x", &id), id);

        let out = substitute(
            &Term::Abs("y".into(), Box::new(Term::var("x"))),
            "x",
            &Term::var("y"),
        );
        match &out {
            Term::Abs(b, body) => {
                assert_ne!(b, "y");
                assert!(body.same_syntax(&Term::var("y")));
            }
            other => panic!("unexpected {other}"),
        }

        let m = p("a b");
        let t = Term::Abs("y".into(), Box::new(Term::var("z")));
        assert!(substitute(&t, "x", &m).same_syntax(&t));
    }

    #[test]
    fn substitution_is_hygienic() {
        let t = p("\\y.x y");
        let r = substitute(&t, "x", &p("\\z.z y"));
        assert!(r.is_hygienic());
        assert_eq!(r, p("\\w.(\\z.z y) w"));
    }

    #[test]
    fn redex_classification() {
        let r = find_redexes(&p("(\\x.x) y"));
        assert_eq!(
            r,
            vec![RedexOccurrence {
                path: vec![],
                kind: RedexKind::I
            }]
        );
        let r = find_redexes(&p("(\\y.x) z"));
        assert_eq!(
            r,
            vec![RedexOccurrence {
                path: vec![],
                kind: RedexKind::K
            }]
        );
        assert!(find_redexes(&p("\\x.x")).is_empty());
    }

    #[test]
    fn redexes_in_preorder() {
        let t = p("(\\x.x) ((\\y.y) z) ((\\u.u) w)");
        let paths: Vec<Path> = find_redexes(&t).into_iter().map(|r| r.path).collect();
        assert_eq!(
            paths,
            vec![
                vec![Step::Func],
                vec![Step::Func, Step::Arg],
                vec![Step::Arg],
            ]
        );
        assert_eq!(leftmost_outermost(&t).unwrap().path, paths[0]);
    }

    #[test]
    fn beta_step_examples() {
        assert_eq!(beta_step(&p("(\\x.x) y"), &[]).unwrap(), p("y"));
        assert_eq!(beta_step(&p("(\\y.x) z"), &[]).unwrap(), p("x"));
        let out = beta_step(&p("(\\x.x x) (\\y.y)"), &[]).unwrap();
        assert_eq!(out, p("(\\y.y) (\\y.y)"));
        assert!(out.is_hygienic());
        match &out {
            Term::App(f, a) => match (&**f, &**a) {
                (Term::Abs(x, _), Term::Abs(y, _)) => assert_ne!(x, y),
                _ => panic!(),
            },
            _ => panic!(),
        }
    }

    #[test]
    fn beta_step_rejects_bad_paths() {
        let t = p("x y");
        assert_eq!(beta_step(&t, &[]), Err(TermError::NotARedex(vec![])));
        assert_eq!(
            beta_step(&t, &[Step::Body]),
            Err(TermError::InvalidPath(vec![Step::Body]))
        );
    }

    #[test]
    fn normal_form_predicates() {
        let cases = [
            ("\\x.x", true, true),
            ("x ((\\y.y) z)", false, true),
            ("(\\x.x) y", false, false),
            ("\\x.x (\\y.y y)", true, true),
        ];
        for (src, nf, hnf) in cases {
            let t = p(src);
            assert_eq!(t.is_normal_form(), nf, "{src}");
            assert_eq!(t.is_head_normal_form(), hnf, "{src}");
        }
    }

    #[test]
    fn f_infinity_cases() {
        assert_eq!(f_infinity_step(&p("(\\x.x) y")), p("y"));
        assert_eq!(f_infinity_step(&p("(\\y.x) z")), p("x"));
        let loop_arg = p("(\\y.x) ((\\z.z z) (\\z.z z))");
        assert_eq!(f_infinity_step(&loop_arg), loop_arg);
        let nf = p("\\x.x");
        assert!(f_infinity_step(&nf).same_syntax(&nf));
    }

    #[test]
    fn canonical_form_decides_alpha_equivalence() {
        let a = p("\\x.\\y.x y z");
        let b = p("\\u.\\w.u w z");
        assert!(a.canonical().same_syntax(&b.canonical()));
        assert!(!p("\\x.x v0")
            .canonical()
            .same_syntax(&p("\\x.x v1").canonical()));
    }
}
