//! Intersection types over multisets, pre-types over ordered lists, their
//! environments and substitutions, and the `m` translation collapsing lists
//! into multisets.
//!
//! Pre-type variables and type variables share one namespace of numbered
//! [`TyVar`]s; `m` is the identity on variables.
//!
//! Rendering: multisets `[A1,...,An]`, lists `<A1,...,An>`, arrows `→`
//! (right-associative; a domain is always bracketed so no parentheses are
//! ever needed). Variable `n` prints as a letter `a`..`z` followed by
//! `n / 26` when that is non-zero: `a`, ..., `z`, `a1`, ..., `z1`, `a2`, ...

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TyVar(pub u32);

impl TyVar {
    pub fn name(self) -> String {
        let letter = (b'a' + (self.0 % 26) as u8) as char;
        match self.0 / 26 {
            0 => letter.to_string(),
            k => format!("{letter}{k}"),
        }
    }

    /// Inverse of [`TyVar::name`] on canonical names.
    pub fn from_name(name: &str) -> Option<TyVar> {
        let mut chars = name.chars();
        let letter = chars.next()?;
        if !letter.is_ascii_lowercase() {
            return None;
        }
        let digits = chars.as_str();
        let k: u32 = if digits.is_empty() {
            0
        } else if digits.starts_with('0') || !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        } else {
            digits.parse().ok()?
        };
        Some(TyVar(k.checked_mul(26)? + (letter as u32 - 'a' as u32)))
    }
}

impl fmt::Display for TyVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Counter-based supply of fresh variables.
#[derive(Clone, Debug, Default)]
pub struct VarSupply {
    next: u32,
}

impl VarSupply {
    pub fn new() -> VarSupply {
        VarSupply::default()
    }

    /// A supply whose variables are all strictly above every variable in `used`.
    pub fn above<'a>(used: impl IntoIterator<Item = &'a TyVar>) -> VarSupply {
        let next = used.into_iter().map(|v| v.0 + 1).max().unwrap_or(0);
        VarSupply { next }
    }

    pub fn starting_at(next: u32) -> VarSupply {
        VarSupply { next }
    }

    pub fn fresh(&mut self) -> TyVar {
        let v = TyVar(self.next);
        self.next += 1;
        v
    }

    pub fn peek(&self) -> TyVar {
        TyVar(self.next)
    }
}

// ---------------------------------------------------------------------------
// Pre-types

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PreType {
    Var(TyVar),
    Arrow(PreList, Box<PreType>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PreList(pub Vec<PreType>);

impl PreType {
    pub fn arrow(domain: PreList, codomain: PreType) -> PreType {
        PreType::Arrow(domain, Box::new(codomain))
    }

    pub fn as_var(&self) -> Option<TyVar> {
        match self {
            PreType::Var(v) => Some(*v),
            PreType::Arrow(..) => None,
        }
    }

    pub fn contains_empty_list(&self) -> bool {
        match self {
            PreType::Var(_) => false,
            PreType::Arrow(d, c) => {
                d.is_empty() || d.contains_empty_list() || c.contains_empty_list()
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            PreType::Var(_) => 1,
            PreType::Arrow(d, c) => 1 + d.0.iter().map(PreType::size).sum::<usize>() + c.size(),
        }
    }
}

impl PreList {
    pub fn new(items: Vec<PreType>) -> PreList {
        PreList(items)
    }

    pub fn vars(vars: impl IntoIterator<Item = TyVar>) -> PreList {
        PreList(vars.into_iter().map(PreType::Var).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PreType> {
        self.0.iter()
    }

    /// List concatenation `σ·τ`.
    pub fn concat(&self, other: &PreList) -> PreList {
        PreList(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    pub fn contains_empty_list(&self) -> bool {
        self.0.iter().any(PreType::contains_empty_list)
    }
}

/// Pre-type environment: finitely many term variables mapped to non-empty
/// lists; every other variable implicitly maps to `⟨⟩`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PreEnv(BTreeMap<String, PreList>);

impl PreEnv {
    pub fn new() -> PreEnv {
        PreEnv::default()
    }

    pub fn singleton(x: impl Into<String>, list: PreList) -> PreEnv {
        let mut env = PreEnv::new();
        env.set(x, list);
        env
    }

    /// `Γ(x)`, the empty list outside the domain.
    pub fn get(&self, x: &str) -> PreList {
        self.0.get(x).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, x: impl Into<String>, list: PreList) {
        let x = x.into();
        if list.is_empty() {
            self.0.remove(&x);
        } else {
            self.0.insert(x, list);
        }
    }

    pub fn contains(&self, x: &str) -> bool {
        self.0.contains_key(x)
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &PreList)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pointwise concatenation `(Γ·Δ)(x) = Γ(x)·Δ(x)`.
    pub fn concat(&self, other: &PreEnv) -> PreEnv {
        let mut out = self.clone();
        for (x, l) in &other.0 {
            let joined = out.get(x).concat(l);
            out.set(x.clone(), joined);
        }
        out
    }

    /// `Γ \ x`.
    pub fn without(&self, x: &str) -> PreEnv {
        let mut out = self.clone();
        out.0.remove(x);
        out
    }
}

// ---------------------------------------------------------------------------
// Types

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IType {
    Var(TyVar),
    Arrow(IMultiset, Box<IType>),
}

/// A finite multiset of types. Elements keep the order they were built in
/// (for display); equality, ordering and hashing ignore that order.
#[derive(Clone, Debug, Default)]
pub struct IMultiset(Vec<IType>);

impl IMultiset {
    fn sorted(&self) -> Vec<&IType> {
        let mut v: Vec<&IType> = self.0.iter().collect();
        v.sort();
        v
    }
}

impl PartialEq for IMultiset {
    fn eq(&self, other: &IMultiset) -> bool {
        self.0.len() == other.0.len() && self.sorted() == other.sorted()
    }
}

impl Eq for IMultiset {}

impl PartialOrd for IMultiset {
    fn partial_cmp(&self, other: &IMultiset) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IMultiset {
    fn cmp(&self, other: &IMultiset) -> std::cmp::Ordering {
        self.sorted().cmp(&other.sorted())
    }
}

impl std::hash::Hash for IMultiset {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.sorted().hash(state)
    }
}

impl IType {
    pub fn arrow(domain: IMultiset, codomain: IType) -> IType {
        IType::Arrow(domain, Box::new(codomain))
    }

    /// Membership in the strong type set: no empty multiset anywhere inside.
    pub fn is_strong(&self) -> bool {
        match self {
            IType::Var(_) => true,
            IType::Arrow(d, c) => !d.is_empty() && d.is_strong() && c.is_strong(),
        }
    }
}

impl IMultiset {
    pub fn new(items: Vec<IType>) -> IMultiset {
        IMultiset(items)
    }

    pub fn empty() -> IMultiset {
        IMultiset::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Elements in construction order.
    pub fn iter(&self) -> std::slice::Iter<'_, IType> {
        self.0.iter()
    }

    /// Multiset union `μ ⊎ ν`.
    pub fn union(&self, other: &IMultiset) -> IMultiset {
        IMultiset::new(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    /// Every element is a strong type (the multiset itself may be empty).
    pub fn is_strong(&self) -> bool {
        self.0.iter().all(IType::is_strong)
    }
}

impl FromIterator<IType> for IMultiset {
    fn from_iter<I: IntoIterator<Item = IType>>(iter: I) -> IMultiset {
        IMultiset::new(iter.into_iter().collect())
    }
}

/// Type environment: term variables to non-empty multisets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TypeEnv(BTreeMap<String, IMultiset>);

impl TypeEnv {
    pub fn new() -> TypeEnv {
        TypeEnv::default()
    }

    pub fn singleton(x: impl Into<String>, mu: IMultiset) -> TypeEnv {
        let mut env = TypeEnv::new();
        env.set(x, mu);
        env
    }

    pub fn get(&self, x: &str) -> IMultiset {
        self.0.get(x).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, x: impl Into<String>, mu: IMultiset) {
        let x = x.into();
        if mu.is_empty() {
            self.0.remove(&x);
        } else {
            self.0.insert(x, mu);
        }
    }

    pub fn contains(&self, x: &str) -> bool {
        self.0.contains_key(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &IMultiset)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(Γ ⊎ Δ)(x) = Γ(x) ⊎ Δ(x)`.
    pub fn union(&self, other: &TypeEnv) -> TypeEnv {
        let mut out = self.clone();
        for (x, mu) in &other.0 {
            let joined = out.get(x).union(mu);
            out.set(x.clone(), joined);
        }
        out
    }

    pub fn without(&self, x: &str) -> TypeEnv {
        let mut out = self.clone();
        out.0.remove(x);
        out
    }
}

// ---------------------------------------------------------------------------
// Variables, substitution, translation

/// Anything whose pre-type variables can be enumerated in occurrence order.
pub trait HasVars {
    fn visit_vars(&self, f: &mut dyn FnMut(TyVar));

    fn vars(&self) -> BTreeSet<TyVar> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v);
        });
        out
    }

    fn mentions(&self, v: TyVar) -> bool {
        let mut found = false;
        self.visit_vars(&mut |w| found |= w == v);
        found
    }
}

/// `A * B`: no shared variables.
pub fn disjoint(a: &impl HasVars, b: &impl HasVars) -> bool {
    a.vars().is_disjoint(&b.vars())
}

impl HasVars for PreType {
    fn visit_vars(&self, f: &mut dyn FnMut(TyVar)) {
        match self {
            PreType::Var(v) => f(*v),
            PreType::Arrow(d, c) => {
                d.visit_vars(f);
                c.visit_vars(f);
            }
        }
    }
}

impl HasVars for PreList {
    fn visit_vars(&self, f: &mut dyn FnMut(TyVar)) {
        for t in &self.0 {
            t.visit_vars(f);
        }
    }
}

impl HasVars for PreEnv {
    fn visit_vars(&self, f: &mut dyn FnMut(TyVar)) {
        for l in self.0.values() {
            l.visit_vars(f);
        }
    }
}

impl HasVars for IType {
    fn visit_vars(&self, f: &mut dyn FnMut(TyVar)) {
        match self {
            IType::Var(v) => f(*v),
            IType::Arrow(d, c) => {
                d.visit_vars(f);
                c.visit_vars(f);
            }
        }
    }
}

impl HasVars for IMultiset {
    fn visit_vars(&self, f: &mut dyn FnMut(TyVar)) {
        for t in &self.0 {
            t.visit_vars(f);
        }
    }
}

impl HasVars for TypeEnv {
    fn visit_vars(&self, f: &mut dyn FnMut(TyVar)) {
        for mu in self.0.values() {
            mu.visit_vars(f);
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstError {
    #[error("substitutions disagree on {var}: {left} vs {right}")]
    Conflict {
        var: TyVar,
        left: String,
        right: String,
    },
}

/// Finitely supported substitution on pre-type variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PreSubst(BTreeMap<TyVar, PreType>);

impl PreSubst {
    pub fn new() -> PreSubst {
        PreSubst::default()
    }

    pub fn singleton(v: TyVar, t: PreType) -> PreSubst {
        let mut s = PreSubst::new();
        s.bind(v, t);
        s
    }

    /// Adds `v ↦ t`; identity bindings are dropped so that `dom` stays exact.
    pub fn bind(&mut self, v: TyVar, t: PreType) {
        if t == PreType::Var(v) {
            self.0.remove(&v);
        } else {
            self.0.insert(v, t);
        }
    }

    pub fn get(&self, v: TyVar) -> Option<&PreType> {
        self.0.get(&v)
    }

    pub fn lookup(&self, v: TyVar) -> PreType {
        self.0.get(&v).cloned().unwrap_or(PreType::Var(v))
    }

    pub fn domain(&self) -> impl Iterator<Item = TyVar> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TyVar, &PreType)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// No domain variable occurs in the codomain.
    pub fn is_idempotent(&self) -> bool {
        self.0
            .values()
            .all(|t| t.vars().iter().all(|v| !self.0.contains_key(v)))
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &PreSubst) -> PreSubst {
        let mut out = PreSubst::new();
        for (v, t) in &other.0 {
            out.bind(*v, t.apply(self));
        }
        for (v, t) in &self.0 {
            if !other.0.contains_key(v) {
                out.bind(*v, t.clone());
            }
        }
        out
    }

    /// `ψ₁ ∪ ψ₂` for compatible substitutions.
    pub fn union(&self, other: &PreSubst) -> Result<PreSubst, SubstError> {
        let mut out = self.clone();
        for (v, t) in &other.0 {
            match self.0.get(v) {
                Some(u) if u != t => {
                    return Err(SubstError::Conflict {
                        var: *v,
                        left: u.to_string(),
                        right: t.to_string(),
                    })
                }
                _ => out.bind(*v, t.clone()),
            }
        }
        Ok(out)
    }
}

impl FromIterator<(TyVar, PreType)> for PreSubst {
    fn from_iter<I: IntoIterator<Item = (TyVar, PreType)>>(iter: I) -> PreSubst {
        let mut s = PreSubst::new();
        for (v, t) in iter {
            s.bind(v, t);
        }
        s
    }
}

/// Things a pre-type substitution can be applied to.
pub trait ApplySubst {
    fn apply(&self, s: &PreSubst) -> Self;
}

impl ApplySubst for PreType {
    fn apply(&self, s: &PreSubst) -> PreType {
        match self {
            PreType::Var(v) => s.lookup(*v),
            PreType::Arrow(d, c) => PreType::Arrow(d.apply(s), Box::new(c.apply(s))),
        }
    }
}

impl ApplySubst for PreList {
    fn apply(&self, s: &PreSubst) -> PreList {
        PreList(self.0.iter().map(|t| t.apply(s)).collect())
    }
}

impl ApplySubst for PreEnv {
    fn apply(&self, s: &PreSubst) -> PreEnv {
        PreEnv(
            self.0
                .iter()
                .map(|(x, l)| (x.clone(), l.apply(s)))
                .collect(),
        )
    }
}

/// Renames variables; variables outside the map are kept.
pub fn rename_pretype(t: &PreType, map: &HashMap<TyVar, TyVar>) -> PreType {
    match t {
        PreType::Var(v) => PreType::Var(*map.get(v).unwrap_or(v)),
        PreType::Arrow(d, c) => PreType::Arrow(
            PreList(d.0.iter().map(|x| rename_pretype(x, map)).collect()),
            Box::new(rename_pretype(c, map)),
        ),
    }
}

/// Finitely supported substitution on type variables (`φ`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeSubst(BTreeMap<TyVar, IType>);

impl TypeSubst {
    pub fn new() -> TypeSubst {
        TypeSubst::default()
    }

    pub fn bind(&mut self, v: TyVar, t: IType) {
        if t == IType::Var(v) {
            self.0.remove(&v);
        } else {
            self.0.insert(v, t);
        }
    }

    pub fn apply_type(&self, t: &IType) -> IType {
        match t {
            IType::Var(v) => self.0.get(v).cloned().unwrap_or(IType::Var(*v)),
            IType::Arrow(d, c) => {
                IType::Arrow(self.apply_multiset(d), Box::new(self.apply_type(c)))
            }
        }
    }

    pub fn apply_multiset(&self, mu: &IMultiset) -> IMultiset {
        mu.iter().map(|t| self.apply_type(t)).collect()
    }

    pub fn apply_env(&self, env: &TypeEnv) -> TypeEnv {
        let mut out = TypeEnv::new();
        for (x, mu) in env.iter() {
            out.set(x.clone(), self.apply_multiset(mu));
        }
        out
    }
}

/// The `m` translation from pre-types to types.
pub trait Collapse {
    type Output;
    fn collapse(&self) -> Self::Output;
}

impl Collapse for PreType {
    type Output = IType;
    fn collapse(&self) -> IType {
        match self {
            PreType::Var(v) => IType::Var(*v),
            PreType::Arrow(d, c) => IType::Arrow(d.collapse(), Box::new(c.collapse())),
        }
    }
}

impl Collapse for PreList {
    type Output = IMultiset;
    fn collapse(&self) -> IMultiset {
        self.0.iter().map(PreType::collapse).collect()
    }
}

impl Collapse for PreEnv {
    type Output = TypeEnv;
    fn collapse(&self) -> TypeEnv {
        let mut out = TypeEnv::new();
        for (x, l) in &self.0 {
            out.set(x.clone(), l.collapse());
        }
        out
    }
}

/// `m(p)`.
pub fn m_translate<T: Collapse>(p: &T) -> T::Output {
    p.collapse()
}

/// Renaming sending variables to `a`, `b`, `c`, ... in order of first
/// occurrence across `items`.
pub fn first_occurrence_renaming<'a>(
    items: impl IntoIterator<Item = &'a dyn HasVars>,
) -> HashMap<TyVar, TyVar> {
    let mut map = HashMap::new();
    for item in items {
        item.visit_vars(&mut |v| {
            let n = map.len() as u32;
            map.entry(v).or_insert(TyVar(n));
        });
    }
    map
}

pub fn rename_itype(t: &IType, map: &HashMap<TyVar, TyVar>) -> IType {
    match t {
        IType::Var(v) => IType::Var(*map.get(v).unwrap_or(v)),
        IType::Arrow(d, c) => IType::Arrow(
            d.iter().map(|x| rename_itype(x, map)).collect(),
            Box::new(rename_itype(c, map)),
        ),
    }
}

pub fn rename_env(env: &TypeEnv, map: &HashMap<TyVar, TyVar>) -> TypeEnv {
    let mut out = TypeEnv::new();
    for (x, mu) in env.iter() {
        out.set(x.clone(), mu.iter().map(|t| rename_itype(t, map)).collect());
    }
    out
}

// ---------------------------------------------------------------------------
// Rendering

fn write_seq<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    open: char,
    items: &[T],
    close: char,
) -> fmt::Result {
    write!(f, "{open}")?;
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{t}")?;
    }
    write!(f, "{close}")
}

impl fmt::Display for PreType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PreType::Var(v) => write!(f, "{v}"),
            PreType::Arrow(d, c) => write!(f, "{d}→{c}"),
        }
    }
}

impl fmt::Display for PreList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_seq(f, '<', &self.0, '>')
    }
}

impl fmt::Display for IType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IType::Var(v) => write!(f, "{v}"),
            IType::Arrow(d, c) => write!(f, "{d}→{c}"),
        }
    }
}

impl fmt::Display for IMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_seq(f, '[', &self.0, ']')
    }
}

/// `x:[a,b], y:[c]`; empty string for the empty environment.
impl fmt::Display for TypeEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, mu)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:{mu}")?;
        }
        Ok(())
    }
}

impl fmt::Display for PreEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, l)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:{l}")?;
        }
        Ok(())
    }
}

/// Replaces `→` by `->` and `λ` by `\`.
pub fn asciify(s: &str) -> String {
    s.replace('→', "->").replace('λ', "\\")
}

// ---------------------------------------------------------------------------
// Parsing of rendered types

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed type at offset {position}: {message}")]
pub struct TypeParseError {
    pub position: usize,
    pub message: String,
}

/// Reads rendered types back. Canonical variable names map to their own
/// numbers; other names are interned above them, consistently across calls
/// on the same reader.
#[derive(Debug, Default)]
pub struct TypeReader {
    interned: HashMap<String, TyVar>,
}

const INTERN_BASE: u32 = 1 << 30;

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    reader: &'a mut TypeReader,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn err<T>(&self, message: &str) -> Result<T, TypeParseError> {
        Err(TypeParseError {
            position: self.pos,
            message: message.to_string(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_arrow(&mut self) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&'→') {
            self.pos += 1;
            true
        } else if self.chars.get(self.pos) == Some(&'-')
            && self.chars.get(self.pos + 1) == Some(&'>')
        {
            self.pos += 2;
            true
        } else {
            false
        }
    }

    fn var(&mut self) -> Result<TyVar, TypeParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a type variable or a bracketed domain");
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        if let Some(v) = TyVar::from_name(&name) {
            return Ok(v);
        }
        let n = self.reader.interned.len() as u32;
        Ok(*self
            .reader
            .interned
            .entry(name)
            .or_insert(TyVar(INTERN_BASE + n)))
    }

    fn items(&mut self, close: char) -> Result<Vec<PreType>, TypeParseError> {
        let mut items = Vec::new();
        if self.eat(close) {
            return Ok(items);
        }
        loop {
            items.push(self.pretype()?);
            if self.eat(close) {
                return Ok(items);
            }
            if !self.eat(',') {
                return self.err("expected ',' or a closing bracket");
            }
        }
    }

    /// Parses either syntax into a pre-type; `[...]` and `<...>` both become lists.
    fn pretype(&mut self) -> Result<PreType, TypeParseError> {
        self.skip_ws();
        let open = self.chars.get(self.pos).copied();
        match open {
            Some('[') | Some('<') => {
                self.pos += 1;
                let close = if open == Some('[') { ']' } else { '>' };
                let items = self.items(close)?;
                if !self.eat_arrow() {
                    return self.err("expected '→' after a domain");
                }
                let codomain = self.pretype()?;
                Ok(PreType::Arrow(PreList(items), Box::new(codomain)))
            }
            _ => Ok(PreType::Var(self.var()?)),
        }
    }

    fn finish(&mut self) -> Result<(), TypeParseError> {
        self.skip_ws();
        if self.pos != self.chars.len() {
            return self.err("unexpected trailing input");
        }
        Ok(())
    }
}

impl TypeReader {
    pub fn new() -> TypeReader {
        TypeReader::default()
    }

    fn cursor(&mut self, src: &str) -> Cursor<'_> {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            reader: self,
        }
    }

    pub fn pretype(&mut self, src: &str) -> Result<PreType, TypeParseError> {
        let mut c = self.cursor(src);
        let t = c.pretype()?;
        c.finish()?;
        Ok(t)
    }

    pub fn prelist(&mut self, src: &str) -> Result<PreList, TypeParseError> {
        let mut c = self.cursor(src);
        if !c.eat('<') && !c.eat('[') {
            return c.err("expected '<' or '['");
        }
        let close = if c.chars[c.pos - 1] == '<' { '>' } else { ']' };
        let items = c.items(close)?;
        c.finish()?;
        Ok(PreList(items))
    }

    pub fn itype(&mut self, src: &str) -> Result<IType, TypeParseError> {
        Ok(self.pretype(src)?.collapse())
    }

    pub fn multiset(&mut self, src: &str) -> Result<IMultiset, TypeParseError> {
        Ok(self.prelist(src)?.collapse())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(n: u32) -> PreType {
        PreType::Var(TyVar(n))
    }

    fn l(items: Vec<PreType>) -> PreList {
        PreList(items)
    }

    #[test]
    fn variable_names_round_trip() {
        for n in [0, 1, 25, 26, 27, 51, 52, 700] {
            assert_eq!(TyVar::from_name(&TyVar(n).name()), Some(TyVar(n)));
        }
        assert_eq!(TyVar(0).name(), "a");
        assert_eq!(TyVar(26).name(), "a1");
        assert_eq!(TyVar::from_name("a0"), None);
        assert_eq!(TyVar::from_name("alpha"), None);
    }

    #[test]
    fn m_examples() {
        let a = TyVar(0);
        let b = TyVar(1);
        assert_eq!(
            l(vec![v(0), v(1)]).collapse(),
            IMultiset::new(vec![IType::Var(a), IType::Var(b)])
        );
        assert_eq!(
            PreType::arrow(PreList::default(), v(0)).collapse(),
            IType::arrow(IMultiset::empty(), IType::Var(a))
        );
        let twice = l(vec![v(0), v(0)]).collapse();
        assert_eq!(twice.len(), 2);
        assert_ne!(twice, l(vec![v(0)]).collapse());
    }

    #[test]
    fn multiset_equality_is_order_blind() {
        assert_eq!(
            l(vec![v(0), v(1)]).collapse(),
            l(vec![v(1), v(0)]).collapse()
        );
        assert_ne!(l(vec![v(0), v(1)]), l(vec![v(1), v(0)]));
    }

    #[test]
    fn apply_examples() {
        let (a, b, c, d) = (TyVar(0), TyVar(1), TyVar(2), TyVar(3));
        let s = PreSubst::singleton(a, PreType::arrow(l(vec![v(1)]), v(2)));
        let t = PreType::arrow(l(vec![v(0)]), v(0));
        let bc = PreType::arrow(l(vec![v(1)]), v(2));
        assert_eq!(t.apply(&s), PreType::arrow(l(vec![bc.clone()]), bc));
        assert_eq!(t.apply(&PreSubst::new()), t);

        let s: PreSubst = [(c, PreType::Var(a)), (d, PreType::Var(a))]
            .into_iter()
            .collect();
        assert_eq!(
            PreType::arrow(l(vec![v(2)]), v(3)).apply(&s),
            PreType::arrow(l(vec![v(0)]), v(0))
        );
        let _ = b;
    }

    #[test]
    fn vars_and_disjointness() {
        let t = PreType::arrow(l(vec![v(0)]), v(1));
        assert_eq!(t.vars(), [TyVar(0), TyVar(1)].into_iter().collect());
        assert!(disjoint(&v(0), &v(1)));
        assert!(!disjoint(
            &PreType::arrow(l(vec![v(0)]), v(2)),
            &PreType::arrow(l(vec![v(1)]), v(2))
        ));
    }

    #[test]
    fn rendering() {
        let t = PreType::arrow(l(vec![PreType::arrow(l(vec![v(0)]), v(1)), v(0)]), v(1));
        assert_eq!(t.to_string(), "<<a>→b,a>→b");
        assert_eq!(t.collapse().to_string(), "[[a]→b,a]→b");
        assert_eq!(asciify(&t.collapse().to_string()), "[[a]->b,a]->b");
    }

    #[test]
    fn union_rejects_conflicts() {
        let s1 = PreSubst::singleton(TyVar(0), v(1));
        let s2 = PreSubst::singleton(TyVar(0), v(2));
        assert!(s1.union(&s2).is_err());
        let s3 = PreSubst::singleton(TyVar(3), v(2));
        assert_eq!(s1.union(&s3).unwrap().len(), 2);
        assert_eq!(s1.union(&s1).unwrap(), s1);
    }

    #[test]
    fn compose_applies_right_first() {
        let s1 = PreSubst::singleton(TyVar(1), v(2));
        let s2 = PreSubst::singleton(TyVar(0), v(1));
        let c = s1.compose(&s2);
        assert_eq!(v(0).apply(&c), v(2));
        assert_eq!(v(1).apply(&c), v(2));
    }

    #[test]
    fn reader_accepts_both_notations() {
        let mut r = TypeReader::new();
        let t = r.itype("[[a]→b, a] -> b").unwrap();
        assert_eq!(t.to_string(), "[[a]→b,a]→b");
        let p = r.pretype("<foo>→foo").unwrap();
        let x = p.as_var();
        assert!(x.is_none());
        assert_eq!(r.multiset("[]").unwrap(), IMultiset::empty());
        assert!(r.itype("[a]").is_err());
        assert!(r.itype("[a]→").is_err());
    }

    #[test]
    fn env_union_and_concat() {
        let e1 = PreEnv::singleton("x", l(vec![v(0)]));
        let e2 = PreEnv::singleton("x", l(vec![v(1)]));
        assert_eq!(e1.concat(&e2).get("x"), l(vec![v(0), v(1)]));
        assert_eq!(e1.concat(&e2).collapse(), e2.concat(&e1).collapse());
        assert!(e1.without("x").is_empty());
        assert!(e1.get("y").is_empty());
    }

    fn arb_pretype() -> impl Strategy<Value = PreType> {
        let leaf = (0u32..6).prop_map(|n| PreType::Var(TyVar(n)));
        leaf.prop_recursive(4, 32, 3, |inner| {
            (prop::collection::vec(inner.clone(), 0..3), inner)
                .prop_map(|(d, c)| PreType::Arrow(PreList(d), Box::new(c)))
        })
    }

    fn arb_list() -> impl Strategy<Value = PreList> {
        prop::collection::vec(arb_pretype(), 0..4).prop_map(PreList)
    }

    proptest! {
        #[test]
        fn m_commutes_with_concatenation(s in arb_list(), t in arb_list()) {
            prop_assert_eq!(s.concat(&t).collapse(), s.collapse().union(&t.collapse()));
        }

        #[test]
        fn substitution_distributes(d in arb_list(), c in arb_pretype(), img in arb_pretype(), n in 0u32..6) {
            let s = PreSubst::singleton(TyVar(n), img);
            let whole = PreType::arrow(d.clone(), c.clone()).apply(&s);
            prop_assert_eq!(whole, PreType::arrow(d.apply(&s), c.apply(&s)));
            let joined = d.concat(&PreList(vec![c.clone()])).apply(&s);
            prop_assert_eq!(joined, d.apply(&s).concat(&PreList(vec![c.apply(&s)])));
        }

        #[test]
        fn strong_types_come_from_lists_without_empties(t in arb_pretype()) {
            prop_assert_eq!(t.collapse().is_strong(), !t.contains_empty_list());
        }

        #[test]
        fn rendering_round_trips(t in arb_pretype()) {
            let mut r = TypeReader::new();
            prop_assert_eq!(r.pretype(&t.to_string()).unwrap(), t.clone());
            prop_assert_eq!(r.itype(&t.collapse().to_string()).unwrap(), t.collapse());
        }
    }
}
