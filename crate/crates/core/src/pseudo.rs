//! Pseudo-derivations: judgement trees over pre-type variables whose
//! equation set records what must hold for the tree to become a real
//! derivation. Expansion and erasure grow or shrink `many` nodes.
//!
//! Fresh variables are allocated in post-order (children before parents),
//! so the minimal pseudo-derivation of `(λx.x)y` is
//!
//! ```text
//! x:<a> ⊢ x : a          (var)
//! ⊢ λx.x : b             (abs)       b = <a>→a
//! y:<c> ⊢ y : c          (var)
//! y:<c> ⊢ y : <c>        (many)
//! y:<c> ⊢ (λx.x) y : d   (app)       b = <c>→d
//! ```
//!
//! Trees are immutable and share unchanged subtrees between versions.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json::TreeJson;
use crate::term::Term;
use crate::types::{ApplySubst, HasVars, PreEnv, PreList, PreSubst, PreType, TyVar, VarSupply};
use crate::unify::{Equation, EquationSet};

/// Weak (`𝒩`) or strong (`𝒩ₛ`) system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Weak,
    #[default]
    Strong,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PdRule {
    Var,
    /// Weak-mode abstraction.
    Abs,
    AbsI,
    AbsK,
    Many,
    App,
}

impl PdRule {
    pub fn tag(self) -> &'static str {
        match self {
            PdRule::Var => "var",
            PdRule::Abs => "abs",
            PdRule::AbsI => "abs-I",
            PdRule::AbsK => "abs-K",
            PdRule::Many => "many",
            PdRule::App => "app",
        }
    }
}

/// A pre-type, or a list at `many` nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Conclusion {
    Type(PreType),
    List(PreList),
}

impl Conclusion {
    pub fn as_type(&self) -> Option<&PreType> {
        match self {
            Conclusion::Type(t) => Some(t),
            Conclusion::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&PreList> {
        match self {
            Conclusion::List(l) => Some(l),
            Conclusion::Type(_) => None,
        }
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conclusion::Type(t) => write!(f, "{t}"),
            Conclusion::List(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdNode {
    pub rule: PdRule,
    pub subject: Term,
    pub env: PreEnv,
    pub conclusion: Conclusion,
    /// The pre-type `b` introduced by abs-K for the unused binder.
    pub weakened: Option<PreType>,
    pub children: Vec<Arc<PdNode>>,
    /// Equations contributed by this node alone.
    pub equations: Vec<Equation>,
}

impl PdNode {
    fn conclusion_type(&self) -> &PreType {
        self.conclusion
            .as_type()
            .expect("a single pre-type conclusion")
    }

    fn conclusion_list(&self) -> &PreList {
        self.conclusion.as_list().expect("a list conclusion")
    }

    /// Recomputes environment, conclusion and local equations from the
    /// children and the node's own variables.
    fn assemble(
        rule: PdRule,
        subject: Term,
        children: Vec<Arc<PdNode>>,
        own: PreType,
        weakened: Option<PreType>,
    ) -> PdNode {
        let (env, conclusion, equations) = match rule {
            PdRule::Var => {
                let Term::Var(x) = &subject else {
                    panic!("var rule on {subject}")
                };
                (
                    PreEnv::singleton(x.clone(), PreList(vec![own.clone()])),
                    Conclusion::Type(own),
                    vec![],
                )
            }
            PdRule::Abs | PdRule::AbsI => {
                let Term::Abs(x, _) = &subject else {
                    panic!("abs rule on {subject}")
                };
                let body = &children[0];
                let eq = Equation::Type(
                    own.clone(),
                    PreType::arrow(body.env.get(x), body.conclusion_type().clone()),
                );
                (body.env.without(x), Conclusion::Type(own), vec![eq])
            }
            PdRule::AbsK => {
                let body = &children[0];
                let b = weakened
                    .clone()
                    .expect("abs-K carries its weakened variable");
                let eq = Equation::Type(
                    own.clone(),
                    PreType::arrow(PreList(vec![b]), body.conclusion_type().clone()),
                );
                (body.env.clone(), Conclusion::Type(own), vec![eq])
            }
            PdRule::Many => {
                let env = children
                    .iter()
                    .fold(PreEnv::new(), |acc, c| acc.concat(&c.env));
                let list = PreList(
                    children
                        .iter()
                        .map(|c| c.conclusion_type().clone())
                        .collect(),
                );
                (env, Conclusion::List(list), vec![])
            }
            PdRule::App => {
                let (fun, arg) = (&children[0], &children[1]);
                let eq = Equation::Type(
                    fun.conclusion_type().clone(),
                    PreType::arrow(arg.conclusion_list().clone(), own.clone()),
                );
                (fun.env.concat(&arg.env), Conclusion::Type(own), vec![eq])
            }
        };
        PdNode {
            rule,
            subject,
            env,
            conclusion,
            weakened,
            children,
            equations,
        }
    }

    /// Same node over new children.
    fn with_children(&self, children: Vec<Arc<PdNode>>) -> PdNode {
        let own = match self.rule {
            PdRule::Many => PreType::Var(TyVar(0)),
            _ => self.conclusion_type().clone(),
        };
        PdNode::assemble(
            self.rule,
            self.subject.clone(),
            children,
            own,
            self.weakened.clone(),
        )
    }

    fn visit_post<'a>(&'a self, f: &mut impl FnMut(&'a PdNode)) {
        for c in &self.children {
            c.visit_post(f);
        }
        f(self);
    }

    fn visit_pre<'a>(&'a self, f: &mut impl FnMut(&'a PdNode)) {
        f(self);
        for c in &self.children {
            c.visit_pre(f);
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.size()).sum::<usize>()
    }
}

impl HasVars for PdNode {
    fn visit_vars(&self, f: &mut dyn FnMut(TyVar)) {
        // post-order, weakened before conclusion: the allocation order of
        // minimal pseudo-derivations
        self.visit_post(&mut |n: &PdNode| {
            if let Some(w) = &n.weakened {
                w.visit_vars(f);
            }
            match &n.conclusion {
                Conclusion::Type(t) => t.visit_vars(f),
                Conclusion::List(l) => l.visit_vars(f),
            }
            n.env.visit_vars(f);
            for e in &n.equations {
                e.visit_vars(f);
            }
        });
    }
}

impl ApplySubst for PdNode {
    fn apply(&self, s: &PreSubst) -> PdNode {
        PdNode {
            rule: self.rule,
            subject: self.subject.clone(),
            env: self.env.apply(s),
            conclusion: match &self.conclusion {
                Conclusion::Type(t) => Conclusion::Type(t.apply(s)),
                Conclusion::List(l) => Conclusion::List(l.apply(s)),
            },
            weakened: self.weakened.as_ref().map(|w| w.apply(s)),
            children: self.children.iter().map(|c| Arc::new(c.apply(s))).collect(),
            equations: EquationSet::from_iter(self.equations.iter().cloned())
                .apply(s)
                .iter()
                .cloned()
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Construction

fn minimal_node(t: &Term, mode: Mode, supply: &mut VarSupply, root: Option<TyVar>) -> PdNode {
    let own = |supply: &mut VarSupply| PreType::Var(root.unwrap_or_else(|| supply.fresh()));
    match t {
        Term::Var(_) => PdNode::assemble(PdRule::Var, t.clone(), vec![], own(supply), None),
        Term::Abs(x, body) => {
            let child = Arc::new(minimal_node(body, mode, supply, None));
            match mode {
                Mode::Weak => {
                    PdNode::assemble(PdRule::Abs, t.clone(), vec![child], own(supply), None)
                }
                Mode::Strong if child.env.contains(x) => {
                    PdNode::assemble(PdRule::AbsI, t.clone(), vec![child], own(supply), None)
                }
                Mode::Strong => {
                    let b = PreType::Var(supply.fresh());
                    PdNode::assemble(PdRule::AbsK, t.clone(), vec![child], own(supply), Some(b))
                }
            }
        }
        Term::App(m, n) => {
            let fun = Arc::new(minimal_node(m, mode, supply, None));
            let arg = Arc::new(many_node(n, mode, supply, &[None]));
            PdNode::assemble(PdRule::App, t.clone(), vec![fun, arg], own(supply), None)
        }
    }
}

/// A `many` node over fresh minimal premises, the i-th one concluding
/// `roots[i]` when given.
fn many_node(t: &Term, mode: Mode, supply: &mut VarSupply, roots: &[Option<TyVar>]) -> PdNode {
    let premises = roots
        .iter()
        .map(|r| Arc::new(minimal_node(t, mode, supply, *r)))
        .collect();
    PdNode::assemble(
        PdRule::Many,
        t.clone(),
        premises,
        PreType::Var(TyVar(0)),
        None,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditKind {
    Expansion,
    Erasure,
}

/// An expansion or erasure of the `many` node concluding `anchor`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructuralEdit {
    pub kind: EditKind,
    pub anchor: PreList,
    pub delta: usize,
}

impl StructuralEdit {
    pub fn expansion(anchor: PreList, delta: usize) -> StructuralEdit {
        StructuralEdit {
            kind: EditKind::Expansion,
            anchor,
            delta,
        }
    }

    pub fn erasure(anchor: PreList, delta: usize) -> StructuralEdit {
        StructuralEdit {
            kind: EditKind::Erasure,
            anchor,
            delta,
        }
    }
}

impl fmt::Display for StructuralEdit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.kind {
            EditKind::Expansion => '+',
            EditKind::Erasure => '-',
        };
        write!(f, "{}{sign}{}", self.anchor, self.delta)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EditError {
    #[error("edit anchor must be a non-empty list")]
    EmptyAnchor,
    #[error("edit count must be at least 1")]
    ZeroDelta,
    #[error("erasure is not defined for strong pseudo-derivations")]
    ErasureInStrongMode,
    #[error("anchor {0} concludes more than one many-node")]
    AmbiguousAnchor(String),
}

/// Child indices from the root.
pub type NodePath = Vec<usize>;

/// A pseudo-derivation together with the system it lives in and the
/// next unused variable.
#[derive(Clone, Debug)]
pub struct PseudoDerivation {
    mode: Mode,
    root: Arc<PdNode>,
    next_var: u32,
}

impl PartialEq for PseudoDerivation {
    fn eq(&self, other: &PseudoDerivation) -> bool {
        self.mode == other.mode && self.root == other.root
    }
}

impl PseudoDerivation {
    /// `PD_min(t)` (resp. `PDₛ_min(t)`), variables numbered from `a`.
    pub fn minimal(t: &Term, mode: Mode) -> PseudoDerivation {
        PseudoDerivation::minimal_from(t, mode, &mut VarSupply::new())
    }

    /// Minimal pseudo-derivation drawing variables from `supply`.
    pub fn minimal_from(t: &Term, mode: Mode, supply: &mut VarSupply) -> PseudoDerivation {
        let root = Arc::new(minimal_node(t, mode, supply, None));
        PseudoDerivation {
            mode,
            root,
            next_var: supply.peek().0,
        }
    }

    fn from_root(mode: Mode, root: PdNode) -> PseudoDerivation {
        let next_var = root.vars().iter().next_back().map_or(0, |v| v.0 + 1);
        PseudoDerivation {
            mode,
            root: Arc::new(root),
            next_var,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn root(&self) -> &PdNode {
        &self.root
    }

    pub fn subject(&self) -> &Term {
        &self.root.subject
    }

    pub fn env(&self) -> &PreEnv {
        &self.root.env
    }

    pub fn conclusion(&self) -> &PreType {
        self.root.conclusion_type()
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    /// `E_Π`: local equations gathered in post-order.
    pub fn equations(&self) -> EquationSet {
        let mut all = Vec::new();
        self.root
            .visit_post(&mut |n: &PdNode| all.extend(n.equations.iter().cloned()));
        all.into_iter().collect()
    }

    /// Conclusions of all `many` nodes, in pre-order.
    pub fn many_conclusions(&self) -> Vec<PreList> {
        let mut out = Vec::new();
        self.root.visit_pre(&mut |n: &PdNode| {
            if n.rule == PdRule::Many {
                out.push(n.conclusion_list().clone());
            }
        });
        out
    }

    /// The path to the unique `many` node concluding `anchor`, if any.
    pub fn find_many(&self, anchor: &PreList) -> Result<Option<NodePath>, EditError> {
        fn walk(n: &PdNode, anchor: &PreList, path: &mut NodePath, found: &mut Vec<NodePath>) {
            if n.rule == PdRule::Many && n.conclusion_list() == anchor {
                found.push(path.clone());
            }
            for (i, c) in n.children.iter().enumerate() {
                path.push(i);
                walk(c, anchor, path, found);
                path.pop();
            }
        }
        let mut found = Vec::new();
        walk(&self.root, anchor, &mut Vec::new(), &mut found);
        match found.len() {
            0 => Ok(None),
            1 => Ok(found.pop()),
            _ => Err(EditError::AmbiguousAnchor(anchor.to_string())),
        }
    }

    pub fn node_at(&self, path: &[usize]) -> Option<&PdNode> {
        let mut n: &PdNode = &self.root;
        for &i in path {
            n = n.children.get(i)?;
        }
        Some(n)
    }

    /// Replaces the node at `path` and reassembles its ancestors.
    fn replace_at(
        &self,
        path: &[usize],
        f: impl FnOnce(&PdNode, &mut VarSupply) -> PdNode,
    ) -> PseudoDerivation {
        fn go(
            n: &PdNode,
            path: &[usize],
            supply: &mut VarSupply,
            f: impl FnOnce(&PdNode, &mut VarSupply) -> PdNode,
        ) -> PdNode {
            match path.split_first() {
                None => f(n, supply),
                Some((&i, rest)) => {
                    let mut children = n.children.clone();
                    children[i] = Arc::new(go(&n.children[i], rest, supply, f));
                    n.with_children(children)
                }
            }
        }
        let mut supply = VarSupply::starting_at(self.next_var);
        let root = go(&self.root, path, &mut supply, f);
        PseudoDerivation {
            mode: self.mode,
            root: Arc::new(root),
            next_var: supply.peek().0,
        }
    }

    fn validate_edit(anchor: &PreList, n: usize) -> Result<(), EditError> {
        if anchor.is_empty() {
            return Err(EditError::EmptyAnchor);
        }
        if n == 0 {
            return Err(EditError::ZeroDelta);
        }
        Ok(())
    }

    /// Adds `n` premises to the `many` node concluding `anchor`.
    ///
    /// With `refined`, the existing premises are kept and `n` fresh minimal
    /// premises are appended; otherwise every premise is replaced by a fresh
    /// minimal copy (keeping the conclusion variables already in `anchor`).
    /// Returns the input unchanged when no node concludes `anchor`.
    pub fn expand(
        &self,
        anchor: &PreList,
        n: usize,
        refined: bool,
    ) -> Result<PseudoDerivation, EditError> {
        Self::validate_edit(anchor, n)?;
        let Some(path) = self.find_many(anchor)? else {
            return Ok(self.clone());
        };
        let mode = self.mode;
        Ok(self.replace_at(&path, |node, supply| {
            if refined {
                let mut premises = node.children.clone();
                for _ in 0..n {
                    premises.push(Arc::new(minimal_node(&node.subject, mode, supply, None)));
                }
                node.with_children(premises)
            } else {
                let roots: Vec<Option<TyVar>> = anchor
                    .iter()
                    .map(|t| t.as_var())
                    .chain(std::iter::repeat_n(None, n))
                    .collect();
                many_node(&node.subject, mode, supply, &roots)
            }
        }))
    }

    /// Removes `n` premises from the `many` node concluding `anchor`; the
    /// remaining ones become fresh minimal copies. Weak mode only.
    pub fn erase(&self, anchor: &PreList, n: usize) -> Result<PseudoDerivation, EditError> {
        if self.mode == Mode::Strong {
            return Err(EditError::ErasureInStrongMode);
        }
        Self::validate_edit(anchor, n)?;
        let Some(path) = self.find_many(anchor)? else {
            return Ok(self.clone());
        };
        let mode = self.mode;
        Ok(self.replace_at(&path, |node, supply| {
            let keep = anchor.len().saturating_sub(n);
            let roots: Vec<Option<TyVar>> = anchor.iter().take(keep).map(|t| t.as_var()).collect();
            many_node(&node.subject, mode, supply, &roots)
        }))
    }

    pub fn apply_edit(
        &self,
        edit: &StructuralEdit,
        refined: bool,
    ) -> Result<PseudoDerivation, EditError> {
        match edit.kind {
            EditKind::Expansion => self.expand(&edit.anchor, edit.delta, refined),
            EditKind::Erasure => self.erase(&edit.anchor, edit.delta),
        }
    }

    /// Left-to-right composition of edits.
    pub fn apply_edits<'a>(
        &self,
        edits: impl IntoIterator<Item = &'a StructuralEdit>,
        refined: bool,
    ) -> Result<PseudoDerivation, EditError> {
        edits
            .into_iter()
            .try_fold(self.clone(), |pd, e| pd.apply_edit(e, refined))
    }

    /// `ψ(Π)`: the tree with `s` applied everywhere.
    pub fn substitute(&self, s: &PreSubst) -> PseudoDerivation {
        PseudoDerivation::from_root(self.mode, self.root.apply(s))
    }

    /// Variables renamed `a`, `b`, ... in order of first occurrence in a
    /// post-order walk; minimal pseudo-derivations are their own canonical
    /// form.
    pub fn canonical(&self) -> PseudoDerivation {
        let map = crate::types::first_occurrence_renaming([&*self.root as &dyn HasVars]);
        let s: PreSubst = map.iter().map(|(k, v)| (*k, PreType::Var(*v))).collect();
        self.substitute(&s)
    }

    pub fn equal_modulo_renaming(&self, other: &PseudoDerivation) -> bool {
        self.canonical() == other.canonical()
    }

    /// Structural invariants: rule shapes, subjects, environments, local
    /// equations, variable-disjoint siblings and the strong-mode side
    /// conditions. Returns the first violation found.
    pub fn check_structure(&self) -> Result<(), String> {
        fn vars_of(n: &PdNode) -> BTreeSet<TyVar> {
            n.vars()
        }
        fn go(n: &PdNode, mode: Mode, path: &mut NodePath) -> Result<(), String> {
            let fail = |msg: String| Err(format!("at {path:?} ({}): {msg}", n.rule.tag()));
            let arity = match n.rule {
                PdRule::Var => 0,
                PdRule::Abs | PdRule::AbsI | PdRule::AbsK => 1,
                PdRule::App => 2,
                PdRule::Many => n.children.len(),
            };
            if n.children.len() != arity {
                return fail(format!("{} premises", n.children.len()));
            }
            match (mode, n.rule) {
                (Mode::Weak, PdRule::AbsI | PdRule::AbsK) | (Mode::Strong, PdRule::Abs) => {
                    return fail("rule not available in this system".into())
                }
                _ => {}
            }
            let subjects_ok = match (&n.subject, n.rule) {
                (Term::Var(_), PdRule::Var) => true,
                (Term::Abs(_, body), PdRule::Abs | PdRule::AbsI | PdRule::AbsK) => {
                    n.children[0].subject.same_syntax(body)
                }
                (Term::App(m, a), PdRule::App) => {
                    n.children[0].subject.same_syntax(m)
                        && n.children[1].rule == PdRule::Many
                        && n.children[1].subject.same_syntax(a)
                }
                (_, PdRule::Many) => n
                    .children
                    .iter()
                    .all(|c| c.subject.same_syntax(&n.subject) && c.rule != PdRule::Many),
                _ => false,
            };
            if !subjects_ok {
                return fail(format!("subject {} does not match the premises", n.subject));
            }
            if n.rule != PdRule::Many && !matches!(n.conclusion, Conclusion::Type(PreType::Var(_)))
            {
                return fail(format!("conclusion {} is not a variable", n.conclusion));
            }
            if n.rule == PdRule::App && n.children[0].rule == PdRule::Many {
                return fail("function premise is a many node".into());
            }
            if mode == Mode::Strong && n.rule == PdRule::Many && n.children.is_empty() {
                return fail("empty many node in a strong pseudo-derivation".into());
            }
            if let (Term::Abs(x, _), PdRule::Abs | PdRule::AbsI | PdRule::AbsK) =
                (&n.subject, n.rule)
            {
                let has = n.children[0].env.contains(x);
                if (n.rule == PdRule::AbsI && !has) || (n.rule == PdRule::AbsK && has) {
                    return fail(format!("binder {x} and premise environment disagree"));
                }
                if (n.rule == PdRule::AbsK) != n.weakened.is_some() {
                    return fail("weakened variable misplaced".into());
                }
            }
            let rebuilt = n.with_children(n.children.clone());
            if rebuilt.env != n.env {
                return fail(format!("environment {} should be {}", n.env, rebuilt.env));
            }
            if rebuilt.conclusion != n.conclusion || rebuilt.equations != n.equations {
                return fail("conclusion or local equations out of date".into());
            }
            // disjoint siblings
            let sets: Vec<BTreeSet<TyVar>> = n.children.iter().map(|c| vars_of(c)).collect();
            for i in 0..sets.len() {
                for j in i + 1..sets.len() {
                    if !sets[i].is_disjoint(&sets[j]) {
                        return fail(format!("premises {i} and {j} share variables"));
                    }
                }
            }
            let own_vars: Vec<TyVar> = match n.rule {
                PdRule::Many => vec![],
                _ => n
                    .conclusion
                    .as_type()
                    .map(|t| t.vars().into_iter().collect())
                    .unwrap_or_default(),
            };
            for v in own_vars
                .iter()
                .copied()
                .chain(n.weakened.iter().flat_map(|w| w.vars()))
            {
                if n.rule != PdRule::Var && sets.iter().any(|s| s.contains(&v)) {
                    return fail(format!("variable {v} is not fresh"));
                }
            }
            for (i, c) in n.children.iter().enumerate() {
                path.push(i);
                go(c, mode, path)?;
                path.pop();
            }
            Ok(())
        }
        go(&self.root, self.mode, &mut Vec::new())
    }

    /// Pretty tree, one judgement per line, premises indented below.
    pub fn render(&self) -> String {
        fn go(n: &PdNode, depth: usize, out: &mut String) {
            use std::fmt::Write;
            let env = n.env.to_string();
            let _ = write!(
                out,
                "{:indent$}{env}{}⊢ {} : {}  [{}]",
                "",
                if env.is_empty() { "" } else { " " },
                n.subject,
                n.conclusion,
                n.rule.tag(),
                indent = depth * 2
            );
            if !n.equations.is_empty() {
                let eqs: Vec<String> = n.equations.iter().map(|e| e.to_string()).collect();
                let _ = write!(out, "  {{{}}}", eqs.join(", "));
            }
            out.push('\n');
            for c in &n.children {
                go(c, depth + 1, out);
            }
        }
        let mut out = String::new();
        go(&self.root, 0, &mut out);
        out
    }

    pub fn to_json(&self) -> TreeJson {
        node_json(&self.root)
    }
}

impl fmt::Display for PseudoDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn node_json(n: &PdNode) -> TreeJson {
    TreeJson {
        rule: n.rule.tag().to_string(),
        subject: n.subject.to_string(),
        env: n
            .env
            .iter()
            .map(|(x, l)| (x.clone(), l.to_string()))
            .collect(),
        conclusion: n.conclusion.to_string(),
        children: n.children.iter().map(|c| node_json(c)).collect(),
        equations: n.equations.iter().map(|e| e.to_string()).collect(),
    }
}

/// Edits that rebuild `target` from the minimal pseudo-derivation of its
/// subject: walking `target` top-down, each `many` node is expanded (or
/// erased) to its premise count before its premises are visited.
/// `target` must itself come from edits on a minimal pseudo-derivation
/// (non-refined edits make every premise of a grown node fresh and
/// minimal, so top-down is the only order that works).
pub fn reconstruct(
    target: &PseudoDerivation,
    refined: bool,
) -> Result<(PseudoDerivation, Vec<StructuralEdit>), EditError> {
    let mut work = PseudoDerivation::minimal(target.subject(), target.mode());
    let mut edits = Vec::new();
    let mut todo: Vec<(NodePath, NodePath)> = vec![(vec![], vec![])];
    while let Some((tpath, wpath)) = todo.pop() {
        let t = target.node_at(&tpath).expect("target path");
        let w = work.node_at(&wpath).expect("work path");
        if t.rule == PdRule::Many {
            let (want, have) = (t.children.len(), w.children.len());
            let anchor = w.conclusion_list().clone();
            let edit = match want.cmp(&have) {
                std::cmp::Ordering::Greater => Some(StructuralEdit::expansion(anchor, want - have)),
                std::cmp::Ordering::Less => Some(StructuralEdit::erasure(anchor, have - want)),
                std::cmp::Ordering::Equal => None,
            };
            if let Some(e) = edit {
                work = work.apply_edit(&e, refined)?;
                edits.push(e);
            }
        }
        let n = target.node_at(&tpath).expect("target path").children.len();
        for i in (0..n).rev() {
            let mut tp = tpath.clone();
            tp.push(i);
            let mut wp = wpath.clone();
            wp.push(i);
            todo.push((tp, wp));
        }
    }
    Ok((work, edits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::types::TyVar;
    use crate::unify::{classify, equal_modulo_renaming, normalize_u};
    use proptest::prelude::*;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

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

    const A: u32 = 0;
    const B: u32 = 1;
    const C: u32 = 2;
    const D: u32 = 3;

    #[test]
    fn identity_application_minimal() {
        let pd = PseudoDerivation::minimal(&p("(\\x.x) y"), Mode::Weak);
        let e = pd.equations();
        assert_eq!(
            e,
            EquationSet::from_iter([
                ty(v(B), arr(vec![v(A)], v(A))),
                ty(v(B), arr(vec![v(C)], v(D)))
            ])
        );
        assert_eq!(pd.env().get("y"), l(vec![v(C)]));
        assert_eq!(pd.conclusion(), &v(D));
        pd.check_structure().unwrap();
        assert_eq!(pd.canonical(), pd);
    }

    #[test]
    fn variable_alone() {
        for mode in [Mode::Weak, Mode::Strong] {
            let pd = PseudoDerivation::minimal(&p("x"), mode);
            assert!(pd.equations().is_empty());
            assert_eq!(pd.env().get("x"), l(vec![v(A)]));
            assert_eq!(pd.root().rule, PdRule::Var);
        }
    }

    #[test]
    fn strong_weakening() {
        let pd = PseudoDerivation::minimal(&p("\\x.y"), Mode::Strong);
        assert_eq!(pd.root().rule, PdRule::AbsK);
        assert_eq!(
            pd.equations(),
            EquationSet::from_iter([ty(v(C), arr(vec![v(B)], v(A)))])
        );
        let weak = PseudoDerivation::minimal(&p("\\x.y"), Mode::Weak);
        assert_eq!(
            weak.equations(),
            EquationSet::from_iter([ty(v(B), arr(vec![], v(A)))])
        );
    }

    #[test]
    fn self_application_equations() {
        let pd = PseudoDerivation::minimal(&p("\\x.x x"), Mode::Strong);
        // x:a, x:b, many <b>, app c, abs d
        let expected = EquationSet::from_iter([
            ty(v(A), arr(vec![v(B)], v(C))),
            ty(v(D), arr(vec![v(A), v(B)], v(C))),
        ]);
        assert!(
            equal_modulo_renaming(&pd.equations(), &expected),
            "{}",
            pd.equations()
        );
    }

    #[test]
    fn expansion_and_erasure_of_the_argument() {
        let pd = PseudoDerivation::minimal(&p("(\\x.x) y"), Mode::Weak);
        let c = l(vec![v(C)]);

        let grown = pd.expand(&c, 1, false).unwrap();
        grown.check_structure().unwrap();
        let ys = grown.env().get("y");
        assert_eq!(ys.len(), 2);
        assert_eq!(ys.0[0], v(C));
        let expected = EquationSet::from_iter([
            ty(v(B), arr(vec![v(A)], v(A))),
            ty(v(B), PreType::arrow(ys.clone(), v(D))),
        ]);
        assert_eq!(grown.equations(), expected);
        let nf = normalize_u(&grown.equations());
        let blocked = classify(&nf).blocked;
        assert_eq!(blocked.len(), 1);
        assert!(
            matches!(&blocked[0], Equation::List(one, two) if one.len() == 1 && *two == ys),
            "{nf}"
        );

        let shrunk = pd.erase(&c, 1).unwrap();
        shrunk.check_structure().unwrap();
        assert!(shrunk.env().is_empty());
        let expected =
            EquationSet::from_iter([ty(v(B), arr(vec![v(A)], v(A))), ty(v(B), arr(vec![], v(D)))]);
        assert_eq!(shrunk.equations(), expected);
        let blocked = classify(&normalize_u(&shrunk.equations())).blocked;
        assert!(
            matches!(&blocked[..], [Equation::List(one, none)] if one.len() == 1 && none.is_empty())
        );

        // unblocking by erasing the grown list again
        let back = grown.erase(&ys, 1).unwrap();
        assert!(classify(&normalize_u(&back.equations())).solved);
    }

    #[test]
    fn unmatched_anchor_is_a_no_op() {
        let pd = PseudoDerivation::minimal(&p("(\\x.x) y"), Mode::Weak);
        let a = l(vec![v(A)]);
        assert_eq!(pd.expand(&a, 1, false).unwrap(), pd);
        assert_eq!(pd.erase(&a, 1).unwrap(), pd);
        assert_eq!(pd.expand(&l(vec![v(25)]), 1, true).unwrap(), pd);
    }

    #[test]
    fn repeated_expansion() {
        let pd = PseudoDerivation::minimal(&p("(\\x.x) y"), Mode::Strong);
        let once = pd.expand(&l(vec![v(C)]), 1, true).unwrap();
        let grown = once.env().get("y");
        let twice = once.expand(&grown, 1, true).unwrap();
        assert_eq!(twice.env().get("y").len(), 3);
        twice.check_structure().unwrap();
        assert_eq!(twice.many_conclusions()[0].len(), 3);
    }

    #[test]
    fn erase_below_zero_floors() {
        let pd = PseudoDerivation::minimal(&p("(\\x.x) y"), Mode::Weak);
        let grown = pd.expand(&l(vec![v(C)]), 1, false).unwrap();
        let all = grown.env().get("y");
        let gone = grown.erase(&all, 5).unwrap();
        assert_eq!(gone.many_conclusions(), vec![PreList::default()]);
    }

    #[test]
    fn edit_errors() {
        let pd = PseudoDerivation::minimal(&p("(\\x.x) y"), Mode::Strong);
        assert_eq!(
            pd.erase(&l(vec![v(C)]), 1),
            Err(EditError::ErasureInStrongMode)
        );
        assert_eq!(
            pd.expand(&PreList::default(), 1, true),
            Err(EditError::EmptyAnchor)
        );
        assert_eq!(
            pd.expand(&l(vec![v(C)]), 0, true),
            Err(EditError::ZeroDelta)
        );
        let edits = [
            StructuralEdit::expansion(l(vec![v(C)]), 1),
            StructuralEdit::erasure(l(vec![v(C)]), 1),
        ];
        assert_eq!(
            pd.apply_edits(&edits, true),
            Err(EditError::ErasureInStrongMode)
        );
        assert_eq!(pd.apply_edits(&[], true).unwrap(), pd);
    }

    #[test]
    fn non_refined_expansion_resets_premises() {
        // expanding the outer argument replaces the already expanded inner one
        let t = p("(\\f.f) ((\\x.x) y)");
        let pd = PseudoDerivation::minimal(&t, Mode::Strong);
        let lists = pd.many_conclusions();
        let inner = lists
            .iter()
            .find(|l| pd.find_many(l).unwrap().unwrap().len() > 2)
            .unwrap()
            .clone();
        let outer = lists.iter().find(|l| **l != inner).unwrap().clone();
        let pd2 = pd.expand(&inner, 2, true).unwrap();
        assert_eq!(pd2.env().get("y").len(), 3);
        let refined = pd2.expand(&outer, 1, true).unwrap();
        assert_eq!(refined.env().get("y").len(), 4);
        let plain = pd2.expand(&outer, 1, false).unwrap();
        assert_eq!(plain.env().get("y").len(), 2);
        for x in [&refined, &plain] {
            x.check_structure().unwrap();
        }
    }

    #[test]
    fn json_shape() {
        let pd = PseudoDerivation::minimal(&p("(\\x.x) y"), Mode::Weak);
        let j = serde_json::to_value(pd.to_json()).unwrap();
        assert_eq!(j["rule"], "app");
        assert_eq!(j["conclusion"], "d");
        assert_eq!(j["env"]["y"], "<c>");
        assert_eq!(j["equations"][0], "b = <c>→d");
        assert_eq!(j["children"][0]["equations"][0], "b = <a>→a");
        assert_eq!(j["children"][1]["rule"], "many");
        assert_eq!(j["children"][1]["conclusion"], "<c>");
    }

    #[test]
    fn substitution_reaches_every_node() {
        let pd = PseudoDerivation::minimal(&p("(\\x.x) y"), Mode::Weak);
        let s: PreSubst = [(TyVar(C), v(A)), (TyVar(D), v(A))].into_iter().collect();
        let q = pd.substitute(&s);
        assert_eq!(q.env().get("y"), l(vec![v(A)]));
        assert_eq!(q.conclusion(), &v(A));
        assert!(q.equations().contains(&ty(v(B), arr(vec![v(A)], v(A)))));
    }

    fn random_edits(
        pd: &PseudoDerivation,
        choices: &[(usize, usize, bool)],
    ) -> (PseudoDerivation, Vec<StructuralEdit>) {
        let mut cur = pd.clone();
        let mut edits = Vec::new();
        for &(which, delta, erase) in choices {
            let lists: Vec<PreList> = cur
                .many_conclusions()
                .into_iter()
                .filter(|l| !l.is_empty())
                .collect();
            if lists.is_empty() {
                break;
            }
            let anchor = lists[which % lists.len()].clone();
            let e = if erase && cur.mode() == Mode::Weak {
                StructuralEdit::erasure(anchor, delta)
            } else {
                StructuralEdit::expansion(anchor, delta)
            };
            cur = cur.apply_edit(&e, false).unwrap();
            cur.check_structure().unwrap();
            edits.push(e);
        }
        (cur, edits)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn edits_keep_structure_and_replay(
            t in crate::testing::arb_term(8),
            weak in any::<bool>(),
            choices in prop::collection::vec((0usize..8, 1usize..3, any::<bool>()), 0..4),
        ) {
            let mode = if weak { Mode::Weak } else { Mode::Strong };
            let pd = PseudoDerivation::minimal(&t, mode);
            pd.check_structure().unwrap();
            let (edited, edits) = random_edits(&pd, &choices);
            prop_assert!(edited.subject().same_syntax(&t));
            let replay = pd.apply_edits(&edits, false).unwrap();
            prop_assert!(replay.equal_modulo_renaming(&edited));
            let (rebuilt, _) = reconstruct(&edited, false).unwrap();
            prop_assert!(rebuilt.equal_modulo_renaming(&edited), "{}\nvs\n{}", rebuilt, edited);
        }
    }
}
