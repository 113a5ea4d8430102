//! The acceptance suite: each criterion is a named check reporting a
//! one-line verdict. Inference runs are shared between the criteria that
//! look at the same corpus.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::checker::{canonical_names, derive_normal_form, validate, Derivation, Judged};
use crate::corpus::{
    normal_forms, random_edits, random_equation_set, random_term, standard_corpus, CorpusSpec,
    Entry,
};
use crate::infer::{
    build_checked_derivation, canonical_result, final_typing, infer_strong, Audit, InferConfig,
    InferError, InferOutcome, Success, TraceEvent,
};
use crate::parse::parse;
use crate::pseudo::{reconstruct, Mode, PseudoDerivation};
use crate::term::{one_step_reducts, Term};
use crate::types::{HasVars, IMultiset, IType, TyVar, TypeReader, TypeSubst};
use crate::unify::{
    applicable, apply_redex, classify, equal_modulo_renaming, normalize_bounded, normalize_u,
    step_budget, Equation, EquationSet, Relation,
};

/// Sizes, seeds and tolerances of the suite.
#[derive(Clone, Debug)]
pub struct Settings {
    pub corpus: CorpusSpec,
    /// Fuel of every corpus run.
    pub fuel: usize,
    /// Choice seeds compared per term.
    pub seeds: u64,
    pub min_sn_terms: usize,
    /// Time limit for inferring and checking the SN part of the corpus.
    pub soundness_limit: Duration,
    pub golden_limit: Duration,
    pub normal_form_size: usize,
    pub unification_sets: usize,
    /// Random rule orders tried per equation set.
    pub rule_orders: u64,
    pub reconstruction_cases: usize,
    pub closure_successes: usize,
    pub closure_substitutions: usize,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Settings {
        Settings {
            corpus: CorpusSpec::default(),
            fuel: 500,
            seeds: 10,
            min_sn_terms: 200,
            soundness_limit: Duration::from_secs(60),
            golden_limit: Duration::from_secs(1),
            normal_form_size: 10,
            unification_sets: 250,
            rule_orders: 4,
            reconstruction_cases: 100,
            closure_successes: 50,
            closure_substitutions: 5,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{:>2} {verdict} {:<26} {} [{:.2}s]",
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// The reports as a table, one line per criterion.
pub fn render(reports: &[CriterionReport]) -> String {
    reports.iter().map(|r| format!("{r}\n")).collect()
}

struct Run {
    result: Result<InferOutcome, InferError>,
    elapsed: Duration,
}

impl Run {
    fn success(&self) -> Option<&Success> {
        self.result.as_ref().ok().and_then(InferOutcome::success)
    }

    fn audit(&self) -> Option<&Audit> {
        self.result.as_ref().ok().and_then(InferOutcome::audit)
    }
}

fn run(t: &Term, cfg: &InferConfig) -> Run {
    let start = Instant::now();
    let result = infer_strong(t, cfg);
    Run {
        result,
        elapsed: start.elapsed(),
    }
}

fn describe(o: &InferOutcome) -> String {
    match o {
        InferOutcome::Success(_) => "success".into(),
        InferOutcome::FuelExhausted { rounds, .. } => {
            format!("fuel exhausted after {rounds} rounds")
        }
        InferOutcome::Cancelled => "cancelled".into(),
    }
}

fn outcome_name(r: &Result<InferOutcome, InferError>) -> String {
    match r {
        Ok(o) => describe(o),
        Err(e) => format!("error: {e}"),
    }
}

/// Audits collected for the unsolvable-form criterion.
#[derive(Default)]
struct AuditTally {
    runs: usize,
    rounds: usize,
    unsolvable: Vec<String>,
    missing: usize,
}

impl AuditTally {
    fn add(&mut self, r: &Run) {
        self.runs += 1;
        match r.audit() {
            Some(a) => {
                self.rounds += a.rounds;
                self.unsolvable.extend(a.unsolvable.iter().cloned());
            }
            None => self.missing += 1,
        }
    }
}

fn timed(id: usize, name: &'static str, f: impl FnOnce() -> (bool, String)) -> CriterionReport {
    let start = Instant::now();
    let (passed, detail) = f();
    CriterionReport {
        id,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

fn examples(items: &[String], n: usize) -> String {
    let mut s = items.iter().take(n).cloned().collect::<Vec<_>>().join("; ");
    if items.len() > n {
        s.push_str(&format!("; … {} more", items.len() - n));
    }
    s
}

/// Runs every criterion, in order.
pub fn run_all(settings: &Settings) -> Vec<CriterionReport> {
    let mut reports = vec![golden_example(settings)];

    let start = Instant::now();
    let corpus = standard_corpus(&settings.corpus);
    let classify_time = start.elapsed();
    let cfg = InferConfig::default().with_fuel(settings.fuel).audited();
    let runs: Vec<Option<Run>> = corpus
        .par_iter()
        .map(|e| e.is_definite().then(|| run(&e.term, &cfg)))
        .collect();
    let mut tally = AuditTally::default();
    runs.iter().flatten().for_each(|r| tally.add(r));

    reports.push(soundness(settings, &corpus, &runs));
    reports.push(dichotomy(&corpus, &runs, classify_time));
    reports.push(normal_form_shortcut(settings, &mut tally));
    reports.push(confluence(settings, &corpus, &mut tally));
    reports.push(unification_properties(settings));
    reports.push(timed(7, "no unsolvable forms", || {
        let passed = tally.unsolvable.is_empty() && tally.missing == 0 && tally.runs > 0;
        let mut detail = format!(
            "{} runs, {} audited rounds, {} unsolvable →u-normal forms",
            tally.runs,
            tally.rounds,
            tally.unsolvable.len()
        );
        if tally.missing > 0 {
            detail.push_str(&format!(", {} runs without an audit", tally.missing));
        }
        if !tally.unsolvable.is_empty() {
            detail.push_str(&format!(": {}", examples(&tally.unsolvable, 3)));
        }
        (passed, detail)
    }));
    reports.push(reconstruction(settings));
    reports.push(closure(settings, &corpus, &runs));
    reports.push(subject_reduction(settings, &corpus));
    reports.push(named_typings());
    reports
}

// ---------------------------------------------------------------------------
// 1

fn golden_example(settings: &Settings) -> CriterionReport {
    let limit = settings.golden_limit;
    let mut report = timed(1, "golden example", || {
        let mut r = TypeReader::new();
        let mut ty =
            |a: &str, b: &str| Equation::Type(r.pretype(a).unwrap(), r.pretype(b).unwrap());
        let e0 = EquationSet::from_iter([ty("b", "<a>→a"), ty("b", "<c>→d")]);
        let solved = EquationSet::from_iter([ty("b", "<a>→a"), ty("c", "a"), ty("d", "a")]);
        let mut grown_nf = EquationSet::from_iter([ty("b", "<a>→a"), ty("d", "a")]);
        grown_nf.insert(Equation::List(
            r.prelist("<a>").unwrap(),
            r.prelist("<c,e>").unwrap(),
        ));

        let t = parse("(\\x.x) y").expect("parses");
        let mut failures = Vec::new();
        let mut check = |ok: bool, what: String| {
            if !ok {
                failures.push(what);
            }
        };
        let strong = PseudoDerivation::minimal(&t, Mode::Strong);
        let weak = PseudoDerivation::minimal(&t, Mode::Weak);
        let e = weak.equations();
        check(equal_modulo_renaming(&e, &e0), format!("E = {e}"));
        check(
            equal_modulo_renaming(&strong.equations(), &e0),
            format!("strong E = {}", strong.equations()),
        );
        let nf = normalize_u(&e);
        check(equal_modulo_renaming(&nf, &solved), format!("nf(E) = {nf}"));

        // expanding ⟨c⟩ keeps c and adds a fresh c′
        let c = weak.env().get("y");
        match strong.expand(&c, 1, false) {
            Ok(grown) => {
                let ys = grown.env().get("y");
                let nf = normalize_u(&grown.equations());
                let blocked = nf
                    .iter()
                    .any(|e| matches!(e, Equation::List(l, r) if l.len() == 1 && *r == ys));
                let kept = ys.len() == 2 && ys.0[0] == c.0[0];
                check(
                    kept && blocked && equal_modulo_renaming(&nf, &grown_nf),
                    format!("after expansion nf = {nf}"),
                );
            }
            Err(e) => check(false, format!("expansion failed: {e}")),
        }
        match weak.erase(&c, 1) {
            Ok(shrunk) => {
                let nf = normalize_u(&shrunk.equations());
                let blocked: Vec<&Equation> = nf.iter().filter(|e| e.is_blocked()).collect();
                let exposed =
                    matches!(&blocked[..], [Equation::List(l, r)] if l.len() == 1 && r.is_empty());
                check(exposed, format!("after erasure nf = {nf}"));
            }
            Err(e) => check(false, format!("erasure failed: {e}")),
        }
        if failures.is_empty() {
            (
                true,
                "E, nf(E), expansion and erasure match up to renaming".to_string(),
            )
        } else {
            (false, failures.join("; "))
        }
    });
    if report.elapsed >= limit {
        report.passed = false;
        report.detail.push_str(&format!("; slower than {limit:?}"));
    }
    report
}

// ---------------------------------------------------------------------------
// 2, 3

fn soundness(settings: &Settings, corpus: &[Entry], runs: &[Option<Run>]) -> CriterionReport {
    timed(2, "soundness", || {
        let sn: Vec<(&Entry, &Run)> = corpus
            .iter()
            .zip(runs)
            .filter_map(|(e, r)| r.as_ref().filter(|_| e.is_sn()).map(|r| (e, r)))
            .collect();
        let start = Instant::now();
        let rejected: Vec<String> = sn
            .par_iter()
            .filter_map(|(e, r)| {
                let s = r.success()?;
                build_checked_derivation(s)
                    .err()
                    .map(|err| format!("{}: {err}", e.name))
            })
            .collect();
        let checking = start.elapsed();
        let inferring: Duration = sn.iter().map(|(_, r)| r.elapsed).sum();
        let successes = sn.iter().filter(|(_, r)| r.success().is_some()).count();
        let total = inferring + checking;
        let passed = sn.len() >= settings.min_sn_terms
            && rejected.is_empty()
            && total < settings.soundness_limit;
        let mut detail = format!(
            "{} SN terms, {successes} successes, {} checker rejections; infer {:.2}s + check {:.2}s (limit {}s)",
            sn.len(),
            rejected.len(),
            inferring.as_secs_f64(),
            checking.as_secs_f64(),
            settings.soundness_limit.as_secs()
        );
        if !rejected.is_empty() {
            detail.push_str(&format!(": {}", examples(&rejected, 3)));
        }
        (passed, detail)
    })
}

fn dichotomy(corpus: &[Entry], runs: &[Option<Run>], classify_time: Duration) -> CriterionReport {
    timed(3, "termination dichotomy", || {
        let mut wrong = Vec::new();
        let (mut sn, mut non_sn, mut undecided) = (0, 0, 0);
        let mut slowest = Duration::ZERO;
        for (e, r) in corpus.iter().zip(runs) {
            let Some(r) = r else {
                undecided += 1;
                continue;
            };
            slowest = slowest.max(r.elapsed);
            if e.is_sn() {
                sn += 1;
            } else {
                non_sn += 1;
            }
            let success = r.success().is_some();
            let exhausted = matches!(r.result, Ok(InferOutcome::FuelExhausted { .. }));
            if (e.is_sn() && !success) || (!e.is_sn() && !exhausted) {
                wrong.push(format!(
                    "{} ({:?}): {}",
                    e.name,
                    e.verdict,
                    outcome_name(&r.result)
                ));
            }
        }
        let witness = |name: &str| {
            corpus
                .iter()
                .any(|e| e.name == name && e.is_definite() && !e.is_sn())
        };
        let witnesses = witness("Ω") && witness("(λy.x) Ω");
        let passed = wrong.is_empty() && witnesses;
        let mut detail = format!(
            "{} terms ({sn} SN, {non_sn} not SN, {undecided} undecided by the oracle in {:.2}s), {} misclassified, slowest run {:.2}s",
            corpus.len(),
            classify_time.as_secs_f64(),
            wrong.len(),
            slowest.as_secs_f64()
        );
        if !witnesses {
            detail.push_str("; witnesses Ω and (λy.x) Ω missing");
        }
        if !wrong.is_empty() {
            detail.push_str(&format!(": {}", examples(&wrong, 3)));
        }
        (passed, detail)
    })
}

// ---------------------------------------------------------------------------
// 4, 5

fn normal_form_shortcut(settings: &Settings, tally: &mut AuditTally) -> CriterionReport {
    timed(4, "normal-form shortcut", || {
        let terms = normal_forms(settings.normal_form_size, &["x", "y", "z"]);
        let cfg = InferConfig::default()
            .with_fuel(settings.fuel)
            .traced()
            .audited();
        let runs: Vec<Run> = terms.par_iter().map(|t| run(t, &cfg)).collect();
        let mut bad = Vec::new();
        for (t, r) in terms.iter().zip(&runs) {
            tally.add(r);
            match r.success() {
                Some(s)
                    if s.edits.is_empty()
                        && !r.result.as_ref().unwrap().trace().iter().any(is_expansion) => {}
                Some(s) => bad.push(format!("{t}: {} expansions", s.edits.len())),
                None => bad.push(format!("{t}: {}", outcome_name(&r.result))),
            }
        }
        let detail =
            format!(
            "{} normal forms of at most {} nodes over {{x,y,z}}, {} with expansions or failures{}",
            terms.len(),
            settings.normal_form_size,
            bad.len(),
            if bad.is_empty() { String::new() } else { format!(": {}", examples(&bad, 3)) }
        );
        (bad.is_empty() && !terms.is_empty(), detail)
    })
}

fn is_expansion(e: &TraceEvent) -> bool {
    matches!(e, TraceEvent::Expanded { .. })
}

fn confluence(settings: &Settings, corpus: &[Entry], tally: &mut AuditTally) -> CriterionReport {
    timed(5, "confluence over seeds", || {
        let sn: Vec<&Entry> = corpus.iter().filter(|e| e.is_sn()).collect();
        let per_term: Vec<(Vec<Run>, Option<String>)> = sn
            .par_iter()
            .map(|e| {
                let runs: Vec<Run> = (0..settings.seeds)
                    .map(|seed| {
                        run(
                            &e.term,
                            &InferConfig::default()
                                .with_fuel(settings.fuel)
                                .seeded(seed)
                                .audited(),
                        )
                    })
                    .collect();
                let results: Vec<_> = runs
                    .iter()
                    .map(|r| r.success().map(canonical_result))
                    .collect();
                let problem = match results.first() {
                    Some(Some(first)) if results.iter().all(|r| r.as_ref() == Some(first)) => None,
                    _ => Some(e.name.clone()),
                };
                (runs, problem)
            })
            .collect();
        let mut divergent = Vec::new();
        for (runs, problem) in per_term {
            runs.iter().for_each(|r| tally.add(r));
            divergent.extend(problem);
        }
        let detail = format!(
            "{} SN terms × {} seeds, {} with differing (Π, ψ){}",
            sn.len(),
            settings.seeds,
            divergent.len(),
            if divergent.is_empty() {
                String::new()
            } else {
                format!(": {}", examples(&divergent, 3))
            }
        );
        (divergent.is_empty(), detail)
    })
}

// ---------------------------------------------------------------------------
// 6

/// Normalizes with rule applications picked at random; `None` when the
/// budget runs out.
fn random_order(
    s: &EquationSet,
    rel: Relation,
    rng: &mut ChaCha8Rng,
    budget: usize,
) -> Option<EquationSet> {
    let mut cur = s.clone();
    for _ in 0..=budget {
        let options = applicable(&cur, rel);
        if options.is_empty() {
            return Some(cur);
        }
        let pick = options[rng.random_range(0..options.len())];
        cur = apply_redex(&cur, pick, rel);
    }
    None
}

/// Counts of unification properties failing over a batch of equation sets.
#[derive(Clone, Debug, Default)]
pub struct UnificationTally {
    pub sets: usize,
    pub u_diverged: usize,
    pub o_diverged: usize,
    /// Sets where a random rule order ends in a normal form that differs
    /// beyond renaming.
    pub u_orders: usize,
    pub o_orders: usize,
    /// Of those, sets where every differing pair is stuck (not solved).
    pub u_orders_stuck: usize,
    pub o_orders_stuck: usize,
    /// Sets where `nf(nfo(S))` differs from `nf(S)`.
    pub o_then_u: usize,
    pub o_then_u_stuck: usize,
    /// Sets whose `→o` form has no blocked equation while the `→u` form does.
    pub unblocked: usize,
}

impl UnificationTally {
    pub fn violations(&self) -> usize {
        self.u_diverged
            + self.o_diverged
            + self.u_orders
            + self.o_orders
            + self.o_then_u
            + self.unblocked
    }

    fn check(&mut self, s: &EquationSet, rng: &mut ChaCha8Rng, orders: u64) {
        self.sets += 1;
        let budget = step_budget(s);
        let stuck = |x: &EquationSet, y: &EquationSet| !classify(x).solved && !classify(y).solved;
        let nf = match normalize_bounded(s, Relation::U, budget) {
            Ok((nf, _)) => Some(nf),
            Err(_) => {
                self.u_diverged += 1;
                None
            }
        };
        let nfo = match normalize_bounded(s, Relation::O, budget) {
            Ok((nfo, _)) => Some(nfo),
            Err(_) => {
                self.o_diverged += 1;
                None
            }
        };
        let (mut u_bad, mut u_stuck, mut o_bad, mut o_stuck) = (false, true, false, true);
        for _ in 0..orders {
            if let Some(nf) = &nf {
                match random_order(s, Relation::U, rng, budget) {
                    Some(other) if equal_modulo_renaming(&other, nf) => {}
                    Some(other) => {
                        u_bad = true;
                        u_stuck &= stuck(&other, nf);
                    }
                    None => self.u_diverged += 1,
                }
            }
            if let Some(nfo) = &nfo {
                match random_order(s, Relation::O, rng, budget) {
                    Some(other) if equal_modulo_renaming(&other, nfo) => {}
                    Some(other) => {
                        o_bad = true;
                        o_stuck &= stuck(&other, nfo);
                    }
                    None => self.o_diverged += 1,
                }
            }
        }
        if u_bad {
            self.u_orders += 1;
            self.u_orders_stuck += usize::from(u_stuck);
        }
        if o_bad {
            self.o_orders += 1;
            self.o_orders_stuck += usize::from(o_stuck);
        }
        if let (Some(nf), Some(nfo)) = (&nf, &nfo) {
            let completed = normalize_u(nfo);
            if !equal_modulo_renaming(&completed, nf) {
                self.o_then_u += 1;
                self.o_then_u_stuck += usize::from(stuck(&completed, nf));
            }
            if !classify(nfo).is_blocked() && classify(nf).is_blocked() {
                self.unblocked += 1;
            }
        }
    }

    fn summary(&self) -> String {
        format!(
            "{} sets: →u diverged {}, →o diverged {}, →u orders disagree {} ({} stuck-only), →o orders disagree {} ({} stuck-only), nf(nfo) ≠ nf {} ({} stuck-only), unblocked nfo with blocked nf {}",
            self.sets,
            self.u_diverged,
            self.o_diverged,
            self.u_orders,
            self.u_orders_stuck,
            self.o_orders,
            self.o_orders_stuck,
            self.o_then_u,
            self.o_then_u_stuck,
            self.unblocked
        )
    }
}

/// Tallies over random equation sets and, for comparison, over equation
/// sets of randomly edited pseudo-derivations.
pub fn unification_tallies(settings: &Settings) -> (UnificationTally, UnificationTally) {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut random = UnificationTally::default();
    for _ in 0..settings.unification_sets {
        let s = random_equation_set(&mut rng);
        random.check(&s, &mut rng, settings.rule_orders);
    }
    let mut derived = UnificationTally::default();
    for _ in 0..settings.unification_sets {
        let t = random_term(&mut rng, 8, &["x", "y", "z"]);
        let (pd, _, _) = random_edits(&mut rng, &t, Mode::Strong, 4, true);
        derived.check(&pd.equations(), &mut rng, settings.rule_orders);
    }
    (random, derived)
}

fn unification_properties(settings: &Settings) -> CriterionReport {
    timed(6, "unification properties", || {
        let (random, derived) = unification_tallies(settings);
        let detail = format!(
            "{} violations on random {}; for context, pseudo-derivation {}",
            random.violations(),
            random.summary(),
            derived.summary()
        );
        (random.violations() == 0, detail)
    })
}

// ---------------------------------------------------------------------------
// 8

fn reconstruction(settings: &Settings) -> CriterionReport {
    timed(8, "reconstruction", || {
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
        let mut failures = Vec::new();
        let mut edits_applied = 0;
        let variants = [
            (Mode::Strong, true),
            (Mode::Strong, false),
            (Mode::Weak, true),
            (Mode::Weak, false),
        ];
        for (mode, refined) in variants {
            for _ in 0..settings.reconstruction_cases {
                let t = random_term(&mut rng, 8, &["x", "y", "z"]);
                let (pd, edits, steps) = random_edits(&mut rng, &t, mode, 4, refined);
                edits_applied += edits.len();
                let label = format!("{t} ({mode:?}, refined {refined})");
                if let Some(e) = steps.iter().find_map(|p| p.check_structure().err()) {
                    failures.push(format!("{label}: {e}"));
                    continue;
                }
                match PseudoDerivation::minimal(&t, mode).apply_edits(&edits, refined) {
                    Ok(replayed) if replayed.equal_modulo_renaming(&pd) => {}
                    Ok(_) => failures.push(format!("{label}: replay differs")),
                    Err(e) => failures.push(format!("{label}: replay failed: {e}")),
                }
                match reconstruct(&pd, refined) {
                    Ok((rebuilt, _)) if rebuilt.equal_modulo_renaming(&pd) => {}
                    Ok(_) => failures.push(format!("{label}: reconstruction differs")),
                    Err(e) => failures.push(format!("{label}: reconstruction failed: {e}")),
                }
            }
        }
        let detail = format!(
            "{} cases per mode (strong and weak, refined and not), {edits_applied} edits, {} failures{}",
            settings.reconstruction_cases,
            failures.len(),
            if failures.is_empty() { String::new() } else { format!(": {}", examples(&failures, 3)) }
        );
        (failures.is_empty(), detail)
    })
}

// ---------------------------------------------------------------------------
// 9

fn random_strong_type(rng: &mut ChaCha8Rng, depth: usize) -> IType {
    if depth == 0 || rng.random_bool(0.4) {
        return IType::Var(TyVar(rng.random_range(0..6)));
    }
    let n = rng.random_range(1..=2);
    let domain = IMultiset::new((0..n).map(|_| random_strong_type(rng, depth - 1)).collect());
    IType::arrow(domain, random_strong_type(rng, depth - 1))
}

fn derivation_vars(d: &Derivation, out: &mut std::collections::BTreeSet<TyVar>) {
    out.extend(d.env.vars());
    match &d.conclusion {
        Judged::Type(t) => out.extend(t.vars()),
        Judged::Multiset(m) => out.extend(m.vars()),
    }
    d.children.iter().for_each(|c| derivation_vars(c, out));
}

fn closure(settings: &Settings, corpus: &[Entry], runs: &[Option<Run>]) -> CriterionReport {
    timed(9, "closure under substitution", || {
        let mut successes: Vec<(&Entry, &Success)> = corpus
            .iter()
            .zip(runs)
            .filter_map(|(e, r)| r.as_ref().and_then(Run::success).map(|s| (e, s)))
            .collect();
        // the largest derivations first: they have the most to break
        successes.sort_by_key(|(_, s)| std::cmp::Reverse(s.pd.size()));
        successes.truncate(settings.closure_successes);
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
        let mut failures = Vec::new();
        let mut checked = 0;
        for (e, s) in &successes {
            let d = match build_checked_derivation(s) {
                Ok(d) => d,
                Err(err) => {
                    failures.push(format!("{}: {err}", e.name));
                    continue;
                }
            };
            let mut vars = Default::default();
            derivation_vars(&d, &mut vars);
            for _ in 0..settings.closure_substitutions {
                let mut phi = TypeSubst::new();
                for v in &vars {
                    phi.bind(*v, random_strong_type(&mut rng, 3));
                }
                let report = validate(&d.substitute(&phi), Mode::Strong);
                checked += 1;
                if !report.is_valid() {
                    failures.push(format!("{}: {}", e.name, report.render().trim_end()));
                }
            }
        }
        let passed = failures.is_empty() && successes.len() >= settings.closure_successes;
        let detail = format!(
            "{} successes × {} substitutions = {checked} derivations, {} invalid{}",
            successes.len(),
            settings.closure_substitutions,
            failures.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!(": {}", examples(&failures, 3))
            }
        );
        (passed, detail)
    })
}

// ---------------------------------------------------------------------------
// 10

fn subject_reduction(settings: &Settings, corpus: &[Entry]) -> CriterionReport {
    timed(10, "weak subject reduction", || {
        let cfg = InferConfig::default().with_fuel(settings.fuel);
        let pairs: Vec<(&Entry, Term)> = corpus
            .iter()
            .filter(|e| e.is_sn())
            .flat_map(|e| one_step_reducts(&e.term).into_iter().map(move |n| (e, n)))
            .collect();
        let failures: Vec<String> = pairs
            .par_iter()
            .filter_map(|(e, n)| {
                let r = run(n, &cfg);
                r.success()
                    .is_none()
                    .then(|| format!("{} → {n}: {}", e.name, outcome_name(&r.result)))
            })
            .collect();
        let detail = format!(
            "{} one-step reducts of SN terms, {} without a typing{}",
            pairs.len(),
            failures.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!(": {}", examples(&failures, 3))
            }
        );
        (failures.is_empty(), detail)
    })
}

// ---------------------------------------------------------------------------
// 11

/// Named terms, their principal types and their number of expansions.
pub const NAMED_TYPINGS: [(&str, &str, usize); 4] = [
    ("\\x.x", "[a]→a", 0),
    ("\\x.\\y.x", "[a]→[b]→a", 0),
    ("\\x.x x", "[[a]→b,a]→b", 0),
    ("(\\x.x x) (\\y.y)", "[a]→a", 1),
];

fn named_typings() -> CriterionReport {
    timed(11, "named typings", || {
        let mut failures = Vec::new();
        for (src, expected, expansions) in NAMED_TYPINGS {
            let t = parse(src).expect("named terms parse");
            let outcome = match infer_strong(&t, &InferConfig::default().traced()) {
                Ok(o) => o,
                Err(e) => {
                    failures.push(format!("{src}: {e}"));
                    continue;
                }
            };
            let Some(s) = outcome.success() else {
                failures.push(format!("{src}: {}", describe(&outcome)));
                continue;
            };
            let typing = final_typing(s);
            let got = typing.ty.to_string();
            let expanded = outcome.trace().iter().filter(|e| is_expansion(e)).count();
            if got != expected || !typing.env.is_empty() || expanded != expansions {
                failures.push(format!("{src}: {got} with {expanded} expansions"));
            }
            if let Err(e) = build_checked_derivation(s) {
                failures.push(format!("{src}: {e}"));
            }
            // normal forms are cross-checked against the checker's own typing
            if t.is_normal_form() {
                match derive_normal_form(&t) {
                    Ok(d) => {
                        let d = canonical_names(&d);
                        if d.ty().map(ToString::to_string).as_deref() != Some(expected) {
                            failures.push(format!("{src}: checker derives {}", d.conclusion));
                        }
                    }
                    Err(e) => failures.push(format!("{src}: {e}")),
                }
            }
        }
        let detail = if failures.is_empty() {
            format!("{} typings match and validate", NAMED_TYPINGS.len())
        } else {
            failures.join("; ")
        };
        (failures.is_empty(), detail)
    })
}
