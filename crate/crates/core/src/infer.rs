//! Principal typings for the strong system by expansion-driven unification.
//!
//! Starting from the minimal pseudo-derivation, each round normalizes the
//! equations with `→o`; while some list equation is blocked, the many-node
//! concluding its shorter side gets the missing number of premises
//! (refined expansion) and the round starts over. Once nothing is blocked
//! the set is normalized with `→u` and the mgu read off the solved form.
//!
//! The procedure only terminates on strongly normalizing terms, so a run
//! carries a fuel budget counted in expansion rounds.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::checker::{self, DerivRule, Derivation, Judged};
use crate::pseudo::{
    Conclusion, EditError, Mode, PdNode, PdRule, PseudoDerivation, StructuralEdit,
};
use crate::term::Term;
use crate::types::{
    first_occurrence_renaming, m_translate, ApplySubst, HasVars, IType, PreList, PreSubst, PreType,
    TypeEnv,
};
use crate::unify::{
    classify, extract_mgu, normalize_indexed, step_budget, summarize_indexed, Equation,
    EquationSet, Relation,
};

#[derive(Clone, Debug)]
pub struct InferConfig {
    /// Maximum number of expansion rounds.
    pub fuel: usize,
    pub choice_seed: u64,
    /// Always pick the first blocked equation; otherwise pick at random.
    pub deterministic: bool,
    pub trace: bool,
    /// Extra per-round checks on the intermediate equation sets.
    pub audit: bool,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for InferConfig {
    fn default() -> InferConfig {
        InferConfig {
            fuel: 1000,
            choice_seed: 0,
            deterministic: true,
            trace: false,
            audit: false,
            cancel: None,
        }
    }
}

impl InferConfig {
    pub fn with_fuel(mut self, fuel: usize) -> InferConfig {
        self.fuel = fuel.max(1);
        self
    }

    pub fn seeded(mut self, seed: u64) -> InferConfig {
        self.choice_seed = seed;
        self.deterministic = false;
        self
    }

    pub fn traced(mut self) -> InferConfig {
        self.trace = true;
        self
    }

    pub fn audited(mut self) -> InferConfig {
        self.audit = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Normalized {
        equations: Vec<String>,
    },
    BlockedChosen {
        equation: String,
        lengths: (usize, usize),
    },
    Expanded {
        anchor: String,
        delta: usize,
    },
    FinalUnification {
        equations: Vec<String>,
    },
}

impl TraceEvent {
    fn normalized(s: &EquationSet) -> TraceEvent {
        TraceEvent::Normalized {
            equations: s.iter().map(|e| e.to_string()).collect(),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trace events serialize")
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Normalized { equations } => {
                write!(f, "normalized {{{}}}", equations.join(", "))
            }
            TraceEvent::BlockedChosen {
                equation,
                lengths: (l, r),
            } => write!(f, "blocked {equation} ({l} vs {r})"),
            TraceEvent::Expanded { anchor, delta } => write!(f, "expand {anchor} by {delta}"),
            TraceEvent::FinalUnification { equations } => {
                write!(f, "solved {{{}}}", equations.join(", "))
            }
        }
    }
}

/// One event per line.
pub fn render_trace(trace: &[TraceEvent]) -> String {
    trace.iter().map(|e| format!("{e}\n")).collect()
}

pub fn render_trace_json(trace: &[TraceEvent]) -> String {
    trace
        .iter()
        .map(|e| format!("{}\n", e.to_json_line()))
        .collect()
}

/// What the audit saw across a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Audit {
    pub rounds: usize,
    /// Rounds whose full `→u` normal form was unsolvable.
    pub unsolvable: Vec<String>,
    /// Many-node lists that shrank or lost their prefix between rounds.
    pub shrunk: Vec<String>,
    /// A blocked `→u` normal form reached from an unblocked `→o` one.
    pub blocked_after_unblocked: bool,
}

impl Audit {
    pub fn is_clean(&self) -> bool {
        self.unsolvable.is_empty() && self.shrunk.is_empty() && !self.blocked_after_unblocked
    }
}

#[derive(Clone, Debug)]
pub struct Success {
    pub pd: PseudoDerivation,
    pub psi: PreSubst,
    pub edits: Vec<StructuralEdit>,
    pub trace: Vec<TraceEvent>,
    pub audit: Option<Audit>,
}

#[derive(Clone, Debug)]
pub enum InferOutcome {
    Success(Box<Success>),
    FuelExhausted {
        rounds: usize,
        trace: Vec<TraceEvent>,
        audit: Option<Audit>,
    },
    Cancelled,
}

impl InferOutcome {
    pub fn success(&self) -> Option<&Success> {
        match self {
            InferOutcome::Success(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_success(&self) -> bool {
        self.success().is_some()
    }

    pub fn trace(&self) -> &[TraceEvent] {
        match self {
            InferOutcome::Success(s) => &s.trace,
            InferOutcome::FuelExhausted { trace, .. } => trace,
            InferOutcome::Cancelled => &[],
        }
    }

    pub fn audit(&self) -> Option<&Audit> {
        match self {
            InferOutcome::Success(s) => s.audit.as_ref(),
            InferOutcome::FuelExhausted { audit, .. } => audit.as_ref(),
            InferOutcome::Cancelled => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InferError {
    #[error("equations have no solution: {0}")]
    Unsolvable(String),
    #[error("blocked equations whose shorter side concludes no many-node: {0}")]
    Stuck(String),
    #[error(transparent)]
    Edit(#[from] EditError),
    #[error("unification did not terminate within {steps} steps")]
    UnificationDiverged { steps: usize },
    #[error("checker rejected the inferred derivation:\n{0}")]
    CheckerRejected(String),
}

fn normalize(s: &EquationSet, rel: Relation) -> Result<EquationSet, InferError> {
    normalize_indexed(s, rel, step_budget(s))
        .map_err(|d| InferError::UnificationDiverged { steps: d.steps })
}

fn blocked(s: &EquationSet) -> Vec<(PreList, PreList)> {
    s.iter()
        .filter_map(|e| match e {
            Equation::List(l, r) if l.len() != r.len() => Some((l.clone(), r.clone())),
            _ => None,
        })
        .collect()
}

fn audit_round(
    audit: &mut Audit,
    pd: &PseudoDerivation,
    prev: &[PreList],
) -> Result<(), InferError> {
    audit.rounds += 1;
    let eqs = pd.equations();
    let nf = summarize_indexed(&eqs, Relation::U, step_budget(&eqs))
        .map_err(|d| InferError::UnificationDiverged { steps: d.steps })?;
    if nf.is_unsolvable() {
        audit.unsolvable.push(format!(
            "{} after {} rounds: {} circular equations",
            pd.subject(),
            audit.rounds - 1,
            nf.circular
        ));
    }
    let now = pd.many_conclusions();
    for old in prev {
        let kept = now
            .iter()
            .any(|l| l.len() >= old.len() && l.0[..old.len()] == old.0[..]);
        if !kept {
            audit.shrunk.push(format!("{}: {old}", pd.subject()));
        }
    }
    Ok(())
}

/// Runs the inference loop on `t`.
pub fn infer_strong(t: &Term, cfg: &InferConfig) -> Result<InferOutcome, InferError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.choice_seed);
    let mut pd = PseudoDerivation::minimal(t, Mode::Strong);
    let mut edits = Vec::new();
    let mut trace = Vec::new();
    let mut audit = cfg.audit.then(Audit::default);
    let mut rounds = 0;
    let mut lists = pd.many_conclusions();
    let cancelled = || {
        cfg.cancel
            .as_ref()
            .is_some_and(|c| c.load(Ordering::Relaxed))
    };

    let o_normal = loop {
        if cancelled() {
            return Ok(InferOutcome::Cancelled);
        }
        if let Some(a) = audit.as_mut() {
            audit_round(a, &pd, &lists)?;
            lists = pd.many_conclusions();
        }
        let e = normalize(&pd.equations(), Relation::O)?;
        if cfg.trace {
            trace.push(TraceEvent::normalized(&e));
        }
        let mut candidates = blocked(&e);
        if candidates.is_empty() {
            break e;
        }
        if rounds >= cfg.fuel {
            return Ok(InferOutcome::FuelExhausted {
                rounds,
                trace,
                audit,
            });
        }
        // equations whose expansion would be a no-op are dropped for the
        // rest of the round
        let mut expanded = None;
        while !candidates.is_empty() {
            let i = if cfg.deterministic {
                0
            } else {
                rng.random_range(0..candidates.len())
            };
            let (l, r) = candidates.remove(i);
            let (short, delta) = if l.len() < r.len() {
                (&l, r.len() - l.len())
            } else {
                (&r, l.len() - r.len())
            };
            if short.is_empty() || pd.find_many(short)?.is_none() {
                continue;
            }
            if cfg.trace {
                trace.push(TraceEvent::BlockedChosen {
                    equation: Equation::List(l.clone(), r.clone()).to_string(),
                    lengths: (l.len(), r.len()),
                });
                trace.push(TraceEvent::Expanded {
                    anchor: short.to_string(),
                    delta,
                });
            }
            let edit = StructuralEdit::expansion(short.clone(), delta);
            expanded = Some(pd.apply_edit(&edit, true)?);
            edits.push(edit);
            break;
        }
        match expanded {
            Some(next) => {
                pd = next;
                rounds += 1;
            }
            None => {
                return Err(InferError::Stuck(
                    blocked(&e)
                        .iter()
                        .map(|(l, r)| format!("{l} = {r}"))
                        .collect::<Vec<_>>()
                        .join(", "),
                ))
            }
        }
    };

    let nf = normalize(&o_normal, Relation::U)?;
    if let Some(a) = audit.as_mut() {
        a.blocked_after_unblocked = classify(&nf).is_blocked();
    }
    if cfg.trace {
        trace.push(TraceEvent::FinalUnification {
            equations: nf.iter().map(|e| e.to_string()).collect(),
        });
    }
    let psi = extract_mgu(&nf).map_err(|_| InferError::Unsolvable(nf.to_string()))?;
    Ok(InferOutcome::Success(Box::new(Success {
        pd,
        psi,
        edits,
        trace,
        audit,
    })))
}

/// Infers with the given fuel and default choices.
pub fn infer(t: &Term, fuel: usize) -> Result<InferOutcome, InferError> {
    infer_strong(t, &InferConfig::default().with_fuel(fuel))
}

/// A typing `Γ ⊢ A`, variables renamed `a`, `b`, ... in order of first
/// appearance in `A` and then in `Γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Typing {
    pub env: TypeEnv,
    pub ty: IType,
}

impl Typing {
    pub fn render(&self, t: &Term) -> String {
        if self.env.is_empty() {
            format!("⊢ {t} : {}", self.ty)
        } else {
            format!("{} ⊢ {t} : {}", self.env, self.ty)
        }
    }
}

/// `m(ψ(Γ)) ⊢ m(ψ(a))` for the root of a successful run.
pub fn final_typing(s: &Success) -> Typing {
    let env = m_translate(&s.pd.env().apply(&s.psi));
    let ty = m_translate(&s.pd.conclusion().apply(&s.psi));
    let map = first_occurrence_renaming([&ty as &dyn HasVars, &env as &dyn HasVars]);
    Typing {
        ty: crate::types::rename_itype(&ty, &map),
        env: crate::types::rename_env(&env, &map),
    }
}

fn to_derivation(n: &PdNode, psi: &PreSubst) -> Derivation {
    let rule = match n.rule {
        PdRule::Var => DerivRule::Var,
        PdRule::Abs => DerivRule::Abs,
        PdRule::AbsI => DerivRule::AbsI,
        PdRule::AbsK => DerivRule::AbsK,
        PdRule::Many => DerivRule::Many,
        PdRule::App => DerivRule::App,
    };
    let conclusion = match &n.conclusion {
        Conclusion::Type(t) => Judged::Type(m_translate(&t.apply(psi))),
        Conclusion::List(l) => Judged::Multiset(m_translate(&l.apply(psi))),
    };
    Derivation {
        rule,
        subject: n.subject.clone(),
        env: m_translate(&n.env.apply(psi)),
        conclusion,
        children: n.children.iter().map(|c| to_derivation(c, psi)).collect(),
    }
}

/// The derivation `m(ψ(Π))`, validated by the independent checker.
pub fn build_checked_derivation(s: &Success) -> Result<Derivation, InferError> {
    let d = to_derivation(s.pd.root(), &s.psi);
    let report = checker::validate(&d, Mode::Strong);
    if report.is_valid() {
        Ok(d)
    } else {
        Err(InferError::CheckerRejected(report.render()))
    }
}

/// `(Π, ψ)` with variables renamed in order of first occurrence in `Π`,
/// for comparing runs.
pub fn canonical_result(s: &Success) -> (PseudoDerivation, PreSubst) {
    let extra: Vec<PreType> = s
        .psi
        .iter()
        .flat_map(|(v, t)| [PreType::Var(*v), t.clone()])
        .collect();
    let mut items: Vec<&dyn HasVars> = vec![s.pd.root() as &dyn HasVars];
    items.extend(extra.iter().map(|t| t as &dyn HasVars));
    let map = first_occurrence_renaming(items);
    let rename: PreSubst = map.iter().map(|(k, v)| (*k, PreType::Var(*v))).collect();
    let psi = s
        .psi
        .iter()
        .map(|(v, t)| (map[v], t.apply(&rename)))
        .collect();
    (s.pd.substitute(&rename), psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn run(src: &str) -> Box<Success> {
        match infer_strong(
            &parse(src).unwrap(),
            &InferConfig::default().traced().audited(),
        )
        .unwrap()
        {
            InferOutcome::Success(s) => s,
            other => panic!("{src}: {other:?}"),
        }
    }

    fn typing(src: &str) -> String {
        let s = run(src);
        build_checked_derivation(&s).unwrap();
        final_typing(&s).render(&parse(src).unwrap())
    }

    #[test]
    fn named_typings() {
        assert_eq!(typing("\\x.x"), "⊢ λx.x : [a]→a");
        assert_eq!(typing("\\x.\\y.x"), "⊢ λx.λy.x : [a]→[b]→a");
        assert_eq!(typing("\\x.x x"), "⊢ λx.x x : [[a]→b,a]→b");
        assert_eq!(typing("x"), "x:[a] ⊢ x : a");
        assert_eq!(typing("(\\x.x x)(\\y.y)"), "⊢ (λx.x x) (λy.y) : [a]→a");
    }

    #[test]
    fn one_expansion_for_self_application_of_identity() {
        let s = run("(\\x.x x)(\\y.y)");
        assert_eq!(s.edits.len(), 1);
        assert_eq!(s.edits[0].delta, 1);
        let d = build_checked_derivation(&s).unwrap();
        // the argument many-node now has two premises
        assert_eq!(d.children[1].children.len(), 2);
        let kinds: Vec<&str> = s
            .trace
            .iter()
            .map(|e| match e {
                TraceEvent::Normalized { .. } => "n",
                TraceEvent::BlockedChosen { .. } => "b",
                TraceEvent::Expanded { .. } => "e",
                TraceEvent::FinalUnification { .. } => "f",
            })
            .collect();
        assert_eq!(kinds, ["n", "b", "e", "n", "f"]);
        assert!(s.audit.as_ref().unwrap().is_clean());
    }

    #[test]
    fn self_application_of_self_application_runs_out_of_fuel() {
        let t = parse("(\\z.z z)(\\z.z z)").unwrap();
        let out = infer_strong(&t, &InferConfig::default().with_fuel(50)).unwrap();
        assert!(
            matches!(out, InferOutcome::FuelExhausted { rounds: 50, .. }),
            "{out:?}"
        );
    }

    #[test]
    fn cancellation_is_observed() {
        let flag = Arc::new(AtomicBool::new(true));
        let cfg = InferConfig {
            cancel: Some(flag),
            ..InferConfig::default()
        };
        let out = infer_strong(&parse("(\\z.z z)(\\z.z z)").unwrap(), &cfg).unwrap();
        assert!(matches!(out, InferOutcome::Cancelled));
    }

    #[test]
    fn seeds_agree_after_renaming() {
        for src in [
            "(\\x.x x)(\\y.y)",
            "(\\f.\\x.f (f x)) (\\y.y)",
            "(\\x.\\y.y) (\\z.z) (\\w.w)",
        ] {
            let t = parse(src).unwrap();
            let base = canonical_result(&run(src));
            for seed in 0..10 {
                let out = infer_strong(&t, &InferConfig::default().seeded(seed)).unwrap();
                assert_eq!(
                    canonical_result(out.success().unwrap()),
                    base,
                    "{src} seed {seed}"
                );
            }
        }
    }

    #[test]
    fn trace_serializations() {
        let s = run("(\\x.x x)(\\y.y)");
        let text = render_trace(&s.trace);
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().nth(2).unwrap().starts_with("expand <"));
        let json = render_trace_json(&s.trace);
        for line in json.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v["event"].is_string());
        }
        assert!(
            json.lines().nth(1).unwrap().contains("\"lengths\":[2,1]")
                || json.lines().nth(1).unwrap().contains("\"lengths\":[1,2]")
        );
    }
}
