//! An indexed normalizer producing exactly the result of the stepwise
//! deterministic schedule, without rescanning the whole set at each step.
//!
//! Pre-types are hash-consed, so substitution results share structure and
//! equations compare in constant time; normal forms whose types are
//! exponentially large as trees stay small here.
//!
//! Positions are paths: an equation rewritten in place into several
//! equations gives child paths to its parts, so path order is the order of
//! the stepwise set. Local rules (erase, swap, arrow, list) are applied
//! eagerly at insertion, which is what the schedule does before every subs
//! step; duplicates keep the smallest path.

use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use super::{Diverged, Equation, EquationSet, Relation};
use crate::types::{PreList, PreType, TyVar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct T(u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct L(u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Var(TyVar),
    Arrow(L, T),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Eqn {
    Type(T, T),
    List(L, L),
}

type Vars = Rc<[TyVar]>;

fn union(a: &Vars, b: &Vars) -> Vars {
    if a.is_empty() || a == b {
        return b.clone();
    }
    if b.is_empty() {
        return a.clone();
    }
    let mut out: Vec<TyVar> = a.iter().chain(b.iter()).copied().collect();
    out.sort_unstable();
    out.dedup();
    out.into()
}

#[derive(Default)]
struct Store {
    nodes: Vec<Node>,
    node_ids: HashMap<Node, T>,
    lists: Vec<Rc<[T]>>,
    list_ids: HashMap<Rc<[T]>, L>,
    type_vars: Vec<Vars>,
    list_vars: Vec<Vars>,
}

impl Store {
    fn node(&mut self, n: Node) -> T {
        if let Some(t) = self.node_ids.get(&n) {
            return *t;
        }
        let vars = match n {
            Node::Var(v) => Rc::from([v]),
            Node::Arrow(l, c) => {
                union(&self.list_vars[l.0 as usize], &self.type_vars[c.0 as usize])
            }
        };
        let t = T(self.nodes.len() as u32);
        self.nodes.push(n);
        self.type_vars.push(vars);
        self.node_ids.insert(n, t);
        t
    }

    fn list(&mut self, items: Vec<T>) -> L {
        let items: Rc<[T]> = items.into();
        if let Some(l) = self.list_ids.get(&items) {
            return *l;
        }
        let empty: Vars = Rc::from([]);
        let vars = items
            .iter()
            .fold(empty, |acc, t| union(&acc, &self.type_vars[t.0 as usize]));
        let l = L(self.lists.len() as u32);
        self.lists.push(items.clone());
        self.list_vars.push(vars);
        self.list_ids.insert(items, l);
        l
    }

    fn get(&self, t: T) -> Node {
        self.nodes[t.0 as usize]
    }

    fn items(&self, l: L) -> Rc<[T]> {
        self.lists[l.0 as usize].clone()
    }

    fn vars(&self, t: T) -> &[TyVar] {
        &self.type_vars[t.0 as usize]
    }

    fn mentions(&self, t: T, a: TyVar) -> bool {
        self.vars(t).binary_search(&a).is_ok()
    }

    fn as_var(&self, t: T) -> Option<TyVar> {
        match self.get(t) {
            Node::Var(v) => Some(v),
            Node::Arrow(..) => None,
        }
    }

    fn tail(&self, mut t: T) -> TyVar {
        loop {
            match self.get(t) {
                Node::Var(v) => return v,
                Node::Arrow(_, c) => t = c,
            }
        }
    }

    fn import(&mut self, t: &PreType) -> T {
        match t {
            PreType::Var(v) => self.node(Node::Var(*v)),
            PreType::Arrow(d, c) => {
                let d = self.import_list(d);
                let c = self.import(c);
                self.node(Node::Arrow(d, c))
            }
        }
    }

    fn import_list(&mut self, l: &PreList) -> L {
        let items = l.iter().map(|t| self.import(t)).collect();
        self.list(items)
    }

    fn import_eq(&mut self, e: &Equation) -> Eqn {
        match e {
            Equation::Type(a, b) => Eqn::Type(self.import(a), self.import(b)),
            Equation::List(s, t) => Eqn::List(self.import_list(s), self.import_list(t)),
        }
    }

    fn export(&self, t: T) -> PreType {
        match self.get(t) {
            Node::Var(v) => PreType::Var(v),
            Node::Arrow(d, c) => PreType::Arrow(self.export_list(d), Box::new(self.export(c))),
        }
    }

    fn export_list(&self, l: L) -> PreList {
        PreList(
            self.lists[l.0 as usize]
                .iter()
                .map(|t| self.export(*t))
                .collect(),
        )
    }

    fn export_eq(&self, e: Eqn) -> Equation {
        match e {
            Eqn::Type(a, b) => Equation::Type(self.export(a), self.export(b)),
            Eqn::List(s, t) => Equation::List(self.export_list(s), self.export_list(t)),
        }
    }
}

/// Memoized `[a := by]` for one substitution step.
struct Subst {
    a: TyVar,
    by: T,
    types: HashMap<T, T>,
    lists: HashMap<L, L>,
}

impl Subst {
    fn new(a: TyVar, by: T) -> Subst {
        Subst {
            a,
            by,
            types: HashMap::default(),
            lists: HashMap::default(),
        }
    }

    fn everywhere(&mut self, st: &mut Store, t: T) -> T {
        if !st.mentions(t, self.a) {
            return t;
        }
        if let Some(r) = self.types.get(&t) {
            return *r;
        }
        let r = match st.get(t) {
            Node::Var(_) => self.by,
            Node::Arrow(d, c) => {
                let d = self.everywhere_list(st, d);
                let c = self.everywhere(st, c);
                st.node(Node::Arrow(d, c))
            }
        };
        self.types.insert(t, r);
        r
    }

    fn everywhere_list(&mut self, st: &mut Store, l: L) -> L {
        if st.list_vars[l.0 as usize].binary_search(&self.a).is_err() {
            return l;
        }
        if let Some(r) = self.lists.get(&l) {
            return *r;
        }
        let items: Vec<T> = st
            .items(l)
            .iter()
            .map(|t| self.everywhere(st, *t))
            .collect();
        let r = st.list(items);
        self.lists.insert(l, r);
        r
    }

    fn outside(&mut self, st: &mut Store, t: T) -> T {
        match st.get(t) {
            Node::Var(v) if v == self.a => self.by,
            Node::Var(_) => t,
            Node::Arrow(d, c) => {
                let c = self.outside(st, c);
                st.node(Node::Arrow(d, c))
            }
        }
    }
}

type Key = Vec<u32>;

/// Paths longer than this trigger relabelling before the next rewrite.
const MAX_DEPTH: usize = 32;

fn child(key: &Key, i: usize) -> Key {
    let mut k = Vec::with_capacity(key.len() + 1);
    k.extend_from_slice(key);
    k.push(i as u32);
    k
}

type Slot = u32;

struct Engine {
    rel: Relation,
    st: Store,
    /// Settled equations with their keys; freed slots are reused.
    slots: Vec<Option<(Key, Eqn)>>,
    free: Vec<Slot>,
    eqs: BTreeMap<Key, Slot>,
    pos: HashMap<Eqn, Slot>,
    /// Number of equations with an occurrence of the variable in scope
    /// (anywhere for `→u`, outside lists for `→o`), by variable index.
    occ: Vec<u32>,
    /// Equations `a ≐ A` with `a` not in `A`, by `a`.
    by_lhs: HashMap<TyVar, HashSet<Slot>>,
    eligible: BTreeSet<Key>,
    dirty: HashSet<TyVar>,
}

impl Engine {
    fn new(rel: Relation, st: Store) -> Engine {
        Engine {
            rel,
            st,
            slots: Vec::new(),
            free: Vec::new(),
            eqs: BTreeMap::new(),
            pos: HashMap::default(),
            occ: Vec::new(),
            by_lhs: HashMap::default(),
            eligible: BTreeSet::new(),
            dirty: HashSet::default(),
        }
    }

    fn eqn(&self, slot: Slot) -> Eqn {
        self.slots[slot as usize].as_ref().expect("live slot").1
    }

    fn key(&self, slot: Slot) -> &Key {
        &self.slots[slot as usize].as_ref().expect("live slot").0
    }

    /// Variables in scope in `e`, sorted and without repetitions.
    fn scoped_vars(&self, e: Eqn) -> Vec<TyVar> {
        let st = &self.st;
        let (x, y): (&[TyVar], &[TyVar]) = match (self.rel, e) {
            (Relation::U, Eqn::Type(a, b)) => (st.vars(a), st.vars(b)),
            (Relation::U, Eqn::List(s, t)) => {
                (&st.list_vars[s.0 as usize], &st.list_vars[t.0 as usize])
            }
            (Relation::O, Eqn::Type(a, b)) => {
                let (a, b) = (st.tail(a), st.tail(b));
                return if a == b {
                    vec![a]
                } else {
                    vec![a.min(b), a.max(b)]
                };
            }
            (Relation::O, Eqn::List(..)) => return vec![],
        };
        let mut out = Vec::with_capacity(x.len() + y.len());
        let (mut i, mut j) = (0, 0);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => {
                    out.push(x[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(y[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(x[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&x[i..]);
        out.extend_from_slice(&y[j..]);
        out
    }

    fn in_scope(&self, a: TyVar, e: Eqn) -> bool {
        let st = &self.st;
        match (self.rel, e) {
            (Relation::U, Eqn::Type(l, r)) => st.mentions(l, a) || st.mentions(r, a),
            (Relation::U, Eqn::List(l, r)) => [l, r]
                .iter()
                .any(|l| st.list_vars[l.0 as usize].binary_search(&a).is_ok()),
            (Relation::O, Eqn::Type(l, r)) => st.tail(l) == a || st.tail(r) == a,
            (Relation::O, Eqn::List(..)) => false,
        }
    }

    fn subs_lhs(&self, e: Eqn) -> Option<TyVar> {
        match e {
            Eqn::Type(a, rhs) => self.st.as_var(a).filter(|v| !self.st.mentions(rhs, *v)),
            Eqn::List(..) => None,
        }
    }

    /// Adds `e` at `key`, rewriting it with the local rules first. An
    /// equation met twice in one batch is skipped the second time: the first
    /// copy has the smaller key, so everything the second would produce
    /// collapses into it.
    fn add(&mut self, key: Key, e: Eqn, batch: &mut HashSet<Eqn>) {
        if !batch.insert(e) {
            return;
        }
        match e {
            Eqn::Type(a, b) if a == b => {}
            Eqn::Type(a, b) => match (self.st.get(a), self.st.get(b)) {
                (Node::Arrow(..), Node::Var(_)) => self.add(key, Eqn::Type(b, a), batch),
                (Node::Arrow(s, a), Node::Arrow(t, b)) => {
                    self.add(child(&key, 0), Eqn::List(s, t), batch);
                    self.add(child(&key, 1), Eqn::Type(a, b), batch);
                }
                _ => self.settle(key, e),
            },
            Eqn::List(s, t) => {
                let (s, t) = (self.st.items(s), self.st.items(t));
                if s.len() == t.len() {
                    for (i, (x, y)) in s.iter().zip(t.iter()).enumerate() {
                        self.add(child(&key, i), Eqn::Type(*x, *y), batch);
                    }
                } else {
                    self.settle(key, e);
                }
            }
        }
    }

    fn settle(&mut self, key: Key, e: Eqn) {
        if let Some(&existing) = self.pos.get(&e) {
            if *self.key(existing) < key {
                return;
            }
            self.remove(existing);
        }
        let slot = match self.free.pop() {
            Some(slot) => slot,
            None => {
                self.slots.push(None);
                (self.slots.len() - 1) as Slot
            }
        };
        self.slots[slot as usize] = Some((key.clone(), e));
        self.index(slot, e, true);
        self.pos.insert(e, slot);
        self.eqs.insert(key, slot);
    }

    fn remove(&mut self, slot: Slot) -> (Key, Eqn) {
        let e = self.eqn(slot);
        self.index(slot, e, false);
        let (key, e) = self.slots[slot as usize].take().expect("live slot");
        self.eqs.remove(&key);
        self.pos.remove(&e);
        self.free.push(slot);
        (key, e)
    }

    fn index(&mut self, slot: Slot, e: Eqn, add: bool) {
        for v in self.scoped_vars(e) {
            let i = v.0 as usize;
            if i >= self.occ.len() {
                self.occ.resize(i + 1, 0);
            }
            let before = self.occ[i];
            self.occ[i] = if add { before + 1 } else { before - 1 };
            // eligibility only asks whether a left-hand side occurs twice
            if before.max(self.occ[i]) == 2 && self.by_lhs.get(&v).is_some_and(|s| !s.is_empty()) {
                self.dirty.insert(v);
            }
        }
        if let Some(a) = self.subs_lhs(e) {
            let set = self.by_lhs.entry(a).or_default();
            if add {
                set.insert(slot);
            } else {
                set.remove(&slot);
                let key = self.key(slot).clone();
                self.eligible.remove(&key);
            }
            self.dirty.insert(a);
        }
    }

    fn refresh(&mut self) {
        for v in std::mem::take(&mut self.dirty) {
            let Some(slots) = self.by_lhs.get(&v) else {
                continue;
            };
            let elsewhere = self.occ.get(v.0 as usize).is_some_and(|n| *n >= 2);
            for &slot in slots {
                let key = &self.slots[slot as usize].as_ref().expect("live slot").0;
                if elsewhere {
                    if !self.eligible.contains(key) {
                        self.eligible.insert(key.clone());
                    }
                } else {
                    self.eligible.remove(key);
                }
            }
        }
    }

    /// One subs step at the first eligible equation; false on a normal form.
    fn subs(&mut self) -> bool {
        self.refresh();
        let Some(key) = self.eligible.first() else {
            return false;
        };
        let at = self.eqs[key];
        let Eqn::Type(a, by) = self.eqn(at) else {
            unreachable!()
        };
        let a = self
            .st
            .as_var(a)
            .expect("eligible equations have a variable side");
        let targets: Vec<Slot> = self
            .eqs
            .values()
            .copied()
            .filter(|s| *s != at && self.in_scope(a, self.eqn(*s)))
            .collect();
        if targets.iter().any(|s| self.key(*s).len() > MAX_DEPTH) {
            self.relabel();
            return self.subs();
        }
        let mut sub = Subst::new(a, by);
        // all targets leave before any returns, as in a simultaneous rewrite
        let rewritten: Vec<(Key, Eqn)> = targets
            .into_iter()
            .map(|slot| {
                let (k, e) = self.remove(slot);
                let e = match (self.rel, e) {
                    (Relation::U, Eqn::Type(l, r)) => Eqn::Type(
                        sub.everywhere(&mut self.st, l),
                        sub.everywhere(&mut self.st, r),
                    ),
                    (Relation::U, Eqn::List(l, r)) => Eqn::List(
                        sub.everywhere_list(&mut self.st, l),
                        sub.everywhere_list(&mut self.st, r),
                    ),
                    (Relation::O, Eqn::Type(l, r)) => {
                        Eqn::Type(sub.outside(&mut self.st, l), sub.outside(&mut self.st, r))
                    }
                    (Relation::O, e) => e,
                };
                (k, e)
            })
            .collect();
        let mut batch = HashSet::default();
        for (k, e) in rewritten {
            self.add(k, e, &mut batch);
        }
        true
    }

    /// Renumbers the current equations with single-step paths, in order.
    fn relabel(&mut self) {
        let current: Vec<Eqn> = self.eqs.values().map(|s| self.eqn(*s)).collect();
        let st = std::mem::take(&mut self.st);
        *self = Engine::new(self.rel, st);
        for (i, e) in current.into_iter().enumerate() {
            self.settle(vec![i as u32], e);
        }
    }

    fn run(&mut self, max_subs: usize) -> bool {
        for _ in 0..max_subs {
            if !self.subs() {
                return true;
            }
        }
        self.refresh();
        self.eligible.is_empty()
    }

    fn snapshot(&self) -> EquationSet {
        EquationSet(
            self.eqs
                .values()
                .map(|s| self.st.export_eq(self.eqn(*s)))
                .collect(),
        )
    }

    fn summary(&self) -> FormSummary {
        let mut lhs = HashSet::default();
        let mut solved = true;
        let (mut circular, mut blocked) = (0, 0);
        for e in self.eqs.values().map(|s| self.eqn(*s)) {
            match e {
                Eqn::Type(l, r) => {
                    match self.st.as_var(l) {
                        Some(a) => solved &= lhs.insert(a),
                        None => solved = false,
                    }
                    let circ = |x: T, y: T| {
                        self.st
                            .as_var(x)
                            .is_some_and(|a| y != x && self.st.mentions(y, a))
                    };
                    if circ(l, r) || circ(r, l) {
                        circular += 1;
                    }
                }
                Eqn::List(s, t) => {
                    solved = false;
                    if self.st.items(s).len() != self.st.items(t).len() {
                        blocked += 1;
                    }
                }
            }
        }
        solved = solved
            && self.eqs.values().all(|s| match self.eqn(*s) {
                Eqn::Type(_, r) => self.st.vars(r).iter().all(|v| !lhs.contains(v)),
                Eqn::List(..) => false,
            });
        FormSummary {
            equations: self.eqs.len(),
            solved,
            circular,
            blocked,
        }
    }
}

/// The shape of a normal form, computed without materializing its types.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FormSummary {
    pub equations: usize,
    pub solved: bool,
    pub circular: usize,
    pub blocked: usize,
}

impl FormSummary {
    pub fn is_unsolvable(&self) -> bool {
        self.circular > 0
    }

    pub fn is_blocked(&self) -> bool {
        self.blocked > 0
    }
}

fn start(s: &EquationSet, rel: Relation) -> Engine {
    let mut engine = Engine::new(rel, Store::default());
    let mut batch = HashSet::default();
    for (i, e) in s.iter().enumerate() {
        let e = engine.st.import_eq(e);
        engine.add(vec![i as u32], e, &mut batch);
    }
    engine
}

/// Normal form of `s` under `rel` with the deterministic schedule, giving
/// up after `max_subs` substitution steps.
pub fn normalize_indexed(
    s: &EquationSet,
    rel: Relation,
    max_subs: usize,
) -> Result<EquationSet, Diverged> {
    let mut engine = start(s, rel);
    if engine.run(max_subs) {
        Ok(engine.snapshot())
    } else {
        Err(Diverged {
            steps: max_subs,
            last: engine.snapshot(),
        })
    }
}

/// Like [`normalize_indexed`], but reports only the shape of the normal
/// form; cheap even when its types are huge as trees.
pub fn summarize_indexed(
    s: &EquationSet,
    rel: Relation,
    max_subs: usize,
) -> Result<FormSummary, Diverged> {
    let mut engine = start(s, rel);
    if engine.run(max_subs) {
        Ok(engine.summary())
    } else {
        Err(Diverged {
            steps: max_subs,
            last: engine.snapshot(),
        })
    }
}
