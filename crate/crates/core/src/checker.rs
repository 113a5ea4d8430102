//! An independent checker for type derivations of the weak and strong
//! systems. It knows nothing about pseudo-derivations or unification; it
//! re-checks each rule instance from scratch.
//!
//! Rules (weak: var, abs, many, app; strong: var, abs-I, abs-K, many, app):
//!
//! ```text
//! var    x:[A] ⊢ x : A
//! abs    Γ ⊢ M : A                       ⟹  Γ\x ⊢ λx.M : Γ(x)→A
//! abs-I  Γ ⊢ M : A,  Γ(x) ≠ [ ]          ⟹  Γ\x ⊢ λx.M : Γ(x)→A
//! abs-K  Γ ⊢ M : A,  x ∉ dom(Γ), B       ⟹  Γ ⊢ λx.M : [B]→A
//! many   (Γᵢ ⊢ N : Aᵢ)ᵢ                   ⟹  ⊎Γᵢ ⊢ N : [A₁,…,Aₙ]
//! app    Γ ⊢ M : μ→A,  Δ ⊢ N : μ         ⟹  Γ⊎Δ ⊢ M N : A
//! ```
//!
//! In the strong system `many` needs at least one premise and no type
//! anywhere may contain the empty multiset.

use std::fmt;

use thiserror::Error;

use crate::json::TreeJson;
use crate::parse::parse;
use crate::pseudo::Mode;
use crate::term::Term;
use crate::types::{IMultiset, IType, TyVar, TypeEnv, TypeReader, TypeSubst, VarSupply};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DerivRule {
    Var,
    Abs,
    AbsI,
    AbsK,
    Many,
    App,
}

impl DerivRule {
    pub fn tag(self) -> &'static str {
        match self {
            DerivRule::Var => "var",
            DerivRule::Abs => "abs",
            DerivRule::AbsI => "abs-I",
            DerivRule::AbsK => "abs-K",
            DerivRule::Many => "many",
            DerivRule::App => "app",
        }
    }

    pub fn from_tag(tag: &str) -> Option<DerivRule> {
        Some(match tag {
            "var" => DerivRule::Var,
            "abs" => DerivRule::Abs,
            "abs-I" => DerivRule::AbsI,
            "abs-K" => DerivRule::AbsK,
            "many" => DerivRule::Many,
            "app" => DerivRule::App,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Judged {
    Type(IType),
    Multiset(IMultiset),
}

impl fmt::Display for Judged {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judged::Type(t) => write!(f, "{t}"),
            Judged::Multiset(m) => write!(f, "{m}"),
        }
    }
}

/// A derivation tree. Nothing about it is trusted: any tree can be built
/// and [`validate`] decides whether it is a derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: DerivRule,
    pub subject: Term,
    pub env: TypeEnv,
    pub conclusion: Judged,
    pub children: Vec<Derivation>,
}

impl Derivation {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Derivation::size).sum::<usize>()
    }

    /// The root judgement's type, if it is a single type.
    pub fn ty(&self) -> Option<&IType> {
        match &self.conclusion {
            Judged::Type(t) => Some(t),
            Judged::Multiset(_) => None,
        }
    }

    /// `φ` applied to every type in the tree.
    pub fn substitute(&self, phi: &TypeSubst) -> Derivation {
        Derivation {
            rule: self.rule,
            subject: self.subject.clone(),
            env: phi.apply_env(&self.env),
            conclusion: match &self.conclusion {
                Judged::Type(t) => Judged::Type(phi.apply_type(t)),
                Judged::Multiset(m) => Judged::Multiset(phi.apply_multiset(m)),
            },
            children: self.children.iter().map(|c| c.substitute(phi)).collect(),
        }
    }

    pub fn to_json(&self) -> TreeJson {
        TreeJson {
            rule: self.rule.tag().to_string(),
            subject: self.subject.to_string(),
            env: self
                .env
                .iter()
                .map(|(x, m)| (x.clone(), m.to_string()))
                .collect(),
            conclusion: self.conclusion.to_string(),
            children: self.children.iter().map(Derivation::to_json).collect(),
            equations: vec![],
        }
    }

    /// Reads a tree in the shared JSON schema. Variable names are read
    /// consistently across the whole tree.
    pub fn from_json(j: &TreeJson) -> Result<Derivation, ReadError> {
        fn go(
            j: &TreeJson,
            reader: &mut TypeReader,
            path: &mut Vec<usize>,
        ) -> Result<Derivation, ReadError> {
            let at = |message: String| ReadError {
                path: path.clone(),
                message,
            };
            let rule = DerivRule::from_tag(&j.rule)
                .ok_or_else(|| at(format!("unknown rule {:?}", j.rule)))?;
            let subject = parse(&j.subject).map_err(|e| at(format!("subject: {e}")))?;
            let mut env = TypeEnv::new();
            for (x, m) in &j.env {
                let mu = reader
                    .multiset(m)
                    .map_err(|e| at(format!("env {x}: {e}")))?;
                if mu.is_empty() {
                    return Err(at(format!(
                        "env {x}: empty multisets are left out of environments"
                    )));
                }
                env.set(x.clone(), mu);
            }
            let text = j.conclusion.trim_start();
            let conclusion = if text.starts_with('[') && !looks_like_arrow(text) {
                Judged::Multiset(
                    reader
                        .multiset(text)
                        .map_err(|e| at(format!("conclusion: {e}")))?,
                )
            } else {
                Judged::Type(
                    reader
                        .itype(text)
                        .map_err(|e| at(format!("conclusion: {e}")))?,
                )
            };
            let mut children = Vec::with_capacity(j.children.len());
            for (i, c) in j.children.iter().enumerate() {
                path.push(i);
                children.push(go(c, reader, path)?);
                path.pop();
            }
            Ok(Derivation {
                rule,
                subject,
                env,
                conclusion,
                children,
            })
        }
        go(j, &mut TypeReader::new(), &mut Vec::new())
    }
}

/// A bracketed conclusion is a multiset unless the brackets are followed
/// by an arrow.
fn looks_like_arrow(s: &str) -> bool {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '[' | '<' => depth += 1,
            ']' | '>' if depth > 0 => {
                depth -= 1;
                if depth == 0 {
                    let rest = s[i + c.len_utf8()..].trim_start();
                    return rest.starts_with('→') || rest.starts_with("->");
                }
            }
            _ => {}
        }
    }
    false
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("node {path:?}: {message}")]
pub struct ReadError {
    pub path: Vec<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Child indices from the root.
    pub path: Vec<usize>,
    pub rule: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
        write!(f, "/{} [{}] {}", path.join("/"), self.rule, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// `valid`, or one violation per line.
    pub fn render(&self) -> String {
        if self.is_valid() {
            "valid\n".to_string()
        } else {
            self.violations.iter().map(|v| format!("{v}\n")).collect()
        }
    }
}

fn multiset_is_strong(m: &IMultiset) -> bool {
    m.iter().all(IType::is_strong)
}

fn check_node(d: &Derivation, system: Mode, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    let mut fail = |message: String| {
        out.push(Violation {
            path: path.clone(),
            rule: d.rule.tag().to_string(),
            message,
        });
    };

    let allowed = match system {
        Mode::Weak => !matches!(d.rule, DerivRule::AbsI | DerivRule::AbsK),
        Mode::Strong => d.rule != DerivRule::Abs,
    };
    if !allowed {
        fail(format!(
            "rule {} is not part of the {:?} system",
            d.rule.tag(),
            system
        ));
    }

    if system == Mode::Strong {
        let bad_env = d.env.iter().any(|(_, m)| !multiset_is_strong(m));
        let bad_concl = match &d.conclusion {
            Judged::Type(t) => !t.is_strong(),
            Judged::Multiset(m) => !multiset_is_strong(m),
        };
        if bad_env || bad_concl {
            fail("empty multiset inside a type".into());
        }
    }

    let ty_of = |c: &Derivation| c.ty().cloned();
    let arity = |n: usize, fail: &mut dyn FnMut(String)| {
        if d.children.len() != n {
            fail(format!("expects {n} premises, has {}", d.children.len()));
            false
        } else {
            true
        }
    };

    match d.rule {
        DerivRule::Var => {
            if !arity(0, &mut fail) {
                return;
            }
            let Term::Var(x) = &d.subject else {
                fail(format!("subject {} is not a variable", d.subject));
                return;
            };
            match &d.conclusion {
                Judged::Type(a) => {
                    let expected = TypeEnv::singleton(x.clone(), IMultiset::new(vec![a.clone()]));
                    if d.env != expected {
                        fail(format!(
                            "environment must be exactly {expected}, found {}",
                            d.env
                        ));
                    }
                }
                Judged::Multiset(_) => fail("conclusion must be a type".into()),
            }
        }
        DerivRule::Abs | DerivRule::AbsI | DerivRule::AbsK => {
            if !arity(1, &mut fail) {
                return;
            }
            let Term::Abs(x, body) = &d.subject else {
                fail(format!("subject {} is not an abstraction", d.subject));
                return;
            };
            let child = &d.children[0];
            if child.subject != **body {
                fail(format!(
                    "premise subject {} should be {}",
                    child.subject, body
                ));
            }
            let Some(a) = ty_of(child) else {
                fail("premise must conclude a type".into());
                return;
            };
            let Judged::Type(concl) = &d.conclusion else {
                fail("conclusion must be a type".into());
                return;
            };
            let sigma = child.env.get(x);
            match d.rule {
                DerivRule::Abs | DerivRule::AbsI => {
                    if d.rule == DerivRule::AbsI && sigma.is_empty() {
                        fail(format!(
                            "binder {x} unused in the premise; abs-K applies instead"
                        ));
                    }
                    let expected = IType::arrow(sigma, a);
                    if *concl != expected {
                        fail(format!("conclusion should be {expected}, found {concl}"));
                    }
                    let env = child.env.without(x);
                    if d.env != env {
                        fail(format!("environment should be {env}, found {}", d.env));
                    }
                }
                _ => {
                    if !sigma.is_empty() {
                        fail(format!("binder {x} occurs in the premise environment"));
                    }
                    match concl {
                        IType::Arrow(dom, cod) if dom.len() == 1 && **cod == a => {
                            if !dom.iter().all(IType::is_strong) {
                                fail("weakened type is not strong".into());
                            }
                        }
                        _ => fail(format!("conclusion should be [B]→{a}, found {concl}")),
                    }
                    if d.env != child.env {
                        fail(format!(
                            "environment should be {}, found {}",
                            child.env, d.env
                        ));
                    }
                }
            }
        }
        DerivRule::Many => {
            if system == Mode::Strong && d.children.is_empty() {
                fail("needs at least one premise".into());
            }
            let Judged::Multiset(mu) = &d.conclusion else {
                fail("conclusion must be a multiset".into());
                return;
            };
            let mut types = Vec::new();
            let mut env = TypeEnv::new();
            for (i, c) in d.children.iter().enumerate() {
                if c.subject != d.subject {
                    fail(format!(
                        "premise {i} has subject {}, expected {}",
                        c.subject, d.subject
                    ));
                }
                match ty_of(c) {
                    Some(t) => types.push(t),
                    None => fail(format!("premise {i} must conclude a type")),
                }
                env = env.union(&c.env);
            }
            let collected = IMultiset::new(types);
            if collected != *mu {
                fail(format!("conclusion should be {collected}, found {mu}"));
            }
            if env != d.env {
                fail(format!("environment should be {env}, found {}", d.env));
            }
        }
        DerivRule::App => {
            if !arity(2, &mut fail) {
                return;
            }
            let Term::App(m, n) = &d.subject else {
                fail(format!("subject {} is not an application", d.subject));
                return;
            };
            let (fun, arg) = (&d.children[0], &d.children[1]);
            if fun.subject != **m {
                fail(format!(
                    "function premise subject {} should be {}",
                    fun.subject, m
                ));
            }
            if arg.rule != DerivRule::Many {
                fail("argument premise must be a many rule".into());
            }
            if arg.subject != **n {
                fail(format!(
                    "argument premise subject {} should be {}",
                    arg.subject, n
                ));
            }
            match (&fun.conclusion, &arg.conclusion, &d.conclusion) {
                (Judged::Type(IType::Arrow(dom, cod)), Judged::Multiset(nu), Judged::Type(a)) => {
                    if dom != nu {
                        fail(format!(
                            "argument multiset {nu} does not match the domain {dom}"
                        ));
                    }
                    if **cod != *a {
                        fail(format!("conclusion should be {cod}, found {a}"));
                    }
                }
                (Judged::Type(t @ IType::Var(_)), _, _) => {
                    fail(format!("function type {t} is not an arrow"))
                }
                _ => fail("ill-formed premises or conclusion".into()),
            }
            let env = fun.env.union(&arg.env);
            if env != d.env {
                fail(format!("environment should be {env}, found {}", d.env));
            }
        }
    }

    for (i, c) in d.children.iter().enumerate() {
        path.push(i);
        check_node(c, system, path, out);
        path.pop();
    }
}

/// Checks every node of `d` against the rules of `system`.
pub fn validate(d: &Derivation, system: Mode) -> ValidationReport {
    let mut violations = Vec::new();
    check_node(d, system, &mut Vec::new(), &mut violations);
    ValidationReport { violations }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0} is not a normal form")]
pub struct NotNormal(pub String);

/// A strong derivation for a β-normal form, built along its structure:
/// abstractions by abs-I or abs-K, spines `x K₁…Kₙ` by typing every
/// argument and giving the head `[A₁]→…→[Aₙ]→c` for a fresh `c`.
pub fn derive_normal_form(k: &Term) -> Result<Derivation, NotNormal> {
    if !k.is_normal_form() {
        return Err(NotNormal(k.to_string()));
    }
    fn go(t: &Term, supply: &mut VarSupply) -> Derivation {
        match t {
            Term::Abs(x, body) => {
                let child = go(body, supply);
                let a = child.ty().expect("type").clone();
                let sigma = child.env.get(x);
                if sigma.is_empty() {
                    let b = IType::Var(supply.fresh());
                    Derivation {
                        rule: DerivRule::AbsK,
                        subject: t.clone(),
                        env: child.env.clone(),
                        conclusion: Judged::Type(IType::arrow(IMultiset::new(vec![b]), a)),
                        children: vec![child],
                    }
                } else {
                    Derivation {
                        rule: DerivRule::AbsI,
                        subject: t.clone(),
                        env: child.env.without(x),
                        conclusion: Judged::Type(IType::arrow(sigma, a)),
                        children: vec![child],
                    }
                }
            }
            _ => {
                let mut args = Vec::new();
                let mut head = t;
                while let Term::App(f, a) = head {
                    args.push(&**a);
                    head = f;
                }
                args.reverse();
                let Term::Var(x) = head else {
                    unreachable!("normal forms have variable heads")
                };
                let typed: Vec<Derivation> = args.iter().map(|a| go(a, supply)).collect();
                let c = IType::Var(supply.fresh());
                let head_ty = typed.iter().rev().fold(c, |acc, d| {
                    IType::arrow(IMultiset::new(vec![d.ty().expect("type").clone()]), acc)
                });
                let mut cur = Derivation {
                    rule: DerivRule::Var,
                    subject: head.clone(),
                    env: TypeEnv::singleton(x.clone(), IMultiset::new(vec![head_ty.clone()])),
                    conclusion: Judged::Type(head_ty),
                    children: vec![],
                };
                for (arg, d) in args.iter().zip(typed) {
                    let arg_ty = d.ty().expect("type").clone();
                    let many = Derivation {
                        rule: DerivRule::Many,
                        subject: (*arg).clone(),
                        env: d.env.clone(),
                        conclusion: Judged::Multiset(IMultiset::new(vec![arg_ty])),
                        children: vec![d],
                    };
                    let IType::Arrow(_, cod) = cur.ty().expect("type").clone() else {
                        unreachable!()
                    };
                    cur = Derivation {
                        rule: DerivRule::App,
                        subject: Term::App(Box::new(cur.subject.clone()), Box::new((*arg).clone())),
                        env: cur.env.union(&many.env),
                        conclusion: Judged::Type(*cod),
                        children: vec![cur, many],
                    };
                }
                cur
            }
        }
    }
    Ok(go(k, &mut VarSupply::new()))
}

/// Renames the type variables of `d` to `a`, `b`, ... in order of first
/// appearance in the root type, then the root environment, then the rest.
pub fn canonical_names(d: &Derivation) -> Derivation {
    use crate::types::HasVars;
    let mut order: Vec<TyVar> = Vec::new();
    let mut push = |v: TyVar| {
        if !order.contains(&v) {
            order.push(v);
        }
    };
    fn walk(d: &Derivation, f: &mut dyn FnMut(TyVar)) {
        match &d.conclusion {
            Judged::Type(t) => t.visit_vars(f),
            Judged::Multiset(m) => m.visit_vars(f),
        }
        d.env.visit_vars(f);
        for c in &d.children {
            walk(c, f);
        }
    }
    walk(d, &mut push);
    let mut phi = TypeSubst::new();
    for (i, v) in order.iter().enumerate() {
        phi.bind(*v, IType::Var(TyVar(i as u32)));
    }
    // the renaming is a permutation, so apply it in one simultaneous pass
    d.substitute(&phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn r() -> TypeReader {
        TypeReader::new()
    }

    fn ty(s: &str) -> IType {
        r().itype(s).unwrap()
    }

    fn ms(s: &str) -> IMultiset {
        r().multiset(s).unwrap()
    }

    fn var(x: &str, a: &str) -> Derivation {
        Derivation {
            rule: DerivRule::Var,
            subject: p(x),
            env: TypeEnv::singleton(x, IMultiset::new(vec![ty(a)])),
            conclusion: Judged::Type(ty(a)),
            children: vec![],
        }
    }

    fn env(pairs: &[(&str, &str)]) -> TypeEnv {
        let mut e = TypeEnv::new();
        for (x, m) in pairs {
            e.set(*x, ms(m));
        }
        e
    }

    #[test]
    fn var_axiom() {
        for sys in [Mode::Weak, Mode::Strong] {
            assert!(validate(&var("x", "[a]→b"), sys).is_valid());
        }
        let mut bad = var("x", "a");
        bad.env = env(&[("x", "[a,b]")]);
        let rep = validate(&bad, Mode::Strong);
        assert!(!rep.is_valid());
        assert_eq!(rep.violations[0].path, Vec::<usize>::new());
    }

    /// x:[a,b] ⊢ₛ (λy.x)x : a
    fn weakening_under_application() -> Derivation {
        let body = var("x", "a");
        let abs = Derivation {
            rule: DerivRule::AbsK,
            subject: p("\\y.x"),
            env: env(&[("x", "[a]")]),
            conclusion: Judged::Type(ty("[b]→a")),
            children: vec![body],
        };
        let arg = Derivation {
            rule: DerivRule::Many,
            subject: p("x"),
            env: env(&[("x", "[b]")]),
            conclusion: Judged::Multiset(ms("[b]")),
            children: vec![var("x", "b")],
        };
        Derivation {
            rule: DerivRule::App,
            subject: p("(\\y.x) x"),
            env: env(&[("x", "[a,b]")]),
            conclusion: Judged::Type(ty("a")),
            children: vec![abs, arg],
        }
    }

    #[test]
    fn strong_weakening_example() {
        let d = weakening_under_application();
        assert!(
            validate(&d, Mode::Strong).is_valid(),
            "{}",
            validate(&d, Mode::Strong).render()
        );
        // abs-K does not exist in the weak system
        assert!(!validate(&d, Mode::Weak).is_valid());
        // environment order within a multiset is irrelevant
        let mut swapped = d.clone();
        swapped.env = env(&[("x", "[b,a]")]);
        assert!(validate(&swapped, Mode::Strong).is_valid());
        // wrong multiplicity
        let mut dup = d;
        dup.env = env(&[("x", "[a,a,b]")]);
        assert!(!validate(&dup, Mode::Strong).is_valid());
    }

    #[test]
    fn weak_abs_with_empty_domain() {
        let d = Derivation {
            rule: DerivRule::Abs,
            subject: p("\\y.x"),
            env: env(&[("x", "[a]")]),
            conclusion: Judged::Type(ty("[]→a")),
            children: vec![var("x", "a")],
        };
        assert!(validate(&d, Mode::Weak).is_valid());
        let strong = validate(&d, Mode::Strong);
        assert!(strong
            .violations
            .iter()
            .any(|v| v.message.contains("empty multiset")));
    }

    #[test]
    fn many_is_permutation_blind() {
        let d = Derivation {
            rule: DerivRule::Many,
            subject: p("x"),
            env: env(&[("x", "[b,a]")]),
            conclusion: Judged::Multiset(ms("[a,b]")),
            children: vec![var("x", "b"), var("x", "a")],
        };
        assert!(validate(&d, Mode::Strong).is_valid());
        let empty = Derivation {
            rule: DerivRule::Many,
            subject: p("x"),
            env: TypeEnv::new(),
            conclusion: Judged::Multiset(IMultiset::empty()),
            children: vec![],
        };
        assert!(validate(&empty, Mode::Weak).is_valid());
        assert!(!validate(&empty, Mode::Strong).is_valid());
    }

    #[test]
    fn app_domain_mismatch_is_reported_with_path() {
        let mut d = weakening_under_application();
        d.children[1].conclusion = Judged::Multiset(ms("[c]"));
        let rep = validate(&d, Mode::Strong);
        assert!(!rep.is_valid());
        assert!(
            rep.render().lines().any(|l| l.starts_with("/1 [many]")),
            "{}",
            rep.render()
        );
        assert!(
            rep.render().lines().any(|l| l.starts_with("/ [app]")),
            "{}",
            rep.render()
        );
    }

    #[test]
    fn normal_form_derivations() {
        for (src, expected) in [
            ("\\x.x", "[a]→a"),
            ("\\x.\\y.x", "[a]→[b]→a"),
            ("x y", "a"),
            ("\\x.x x", "[[a]→b,a]→b"),
            ("\\f.\\x.f (f x)", "[[a]→b,[c]→a]→[c]→b"),
        ] {
            let d = derive_normal_form(&p(src)).unwrap();
            let rep = validate(&d, Mode::Strong);
            assert!(rep.is_valid(), "{src}: {}", rep.render());
            assert_eq!(
                canonical_names(&d).ty().unwrap().to_string(),
                expected,
                "{src}"
            );
        }
        let xy = derive_normal_form(&p("x y")).unwrap();
        assert_eq!(xy.env.get("x").len(), 1);
        assert!(matches!(
            xy.env.get("x").iter().next(),
            Some(IType::Arrow(..))
        ));
        assert!(derive_normal_form(&p("(\\x.x) y")).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = weakening_under_application();
        let j = d.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back = Derivation::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, d);
        assert!(validate(&back, Mode::Strong).is_valid());
    }

    #[test]
    fn json_reader_errors() {
        let mut j = var("x", "a").to_json();
        j.rule = "cut".into();
        assert!(Derivation::from_json(&j).is_err());
        let mut j = var("x", "a").to_json();
        j.conclusion = "[a]→".into();
        assert!(Derivation::from_json(&j).is_err());
    }

    #[test]
    fn substitution_closure_on_examples() {
        let d = weakening_under_application();
        let mut phi = TypeSubst::new();
        phi.bind(TyVar(0), ty("[c,c]→d"));
        phi.bind(TyVar(1), ty("[a]→a"));
        assert!(validate(&d.substitute(&phi), Mode::Strong).is_valid());
    }
}
