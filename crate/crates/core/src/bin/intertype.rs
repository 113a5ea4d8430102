//! Command-line front end: `intertype <parse|reduce|infer|check|trace|corpus>`.
//!
//! Exit status is 0 on success or a valid derivation, 1 when fuel runs out
//! or a derivation is invalid, 2 on usage and input errors.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use intertype::acceptance::{self, Settings};
use intertype::checker::{validate, Derivation};
use intertype::infer::{
    build_checked_derivation, final_typing, infer_strong, render_trace, InferConfig, InferOutcome,
};
use intertype::json::TreeJson;
use intertype::parse::parse;
use intertype::pseudo::Mode;
use intertype::reduce::Strategy;
use intertype::term::{Printer, Term};
use intertype::types::asciify;

#[derive(Parser)]
#[command(
    name = "intertype",
    version,
    about = "Principal intersection typings for λ-terms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Expansion rounds (inference) or reduction steps (reduce).
    #[arg(long, global = true, default_value_t = 1000)]
    fuel: usize,
    /// Seed for choosing among blocked equations.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Always expand the first blocked equation (the default unless --seed is given).
    #[arg(long, global = true)]
    deterministic: bool,
    #[arg(long, global = true, value_enum, default_value_t = System::Strong)]
    system: System,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, value_enum, default_value_t = StrategyArg::Finf)]
    strategy: StrategyArg,
    /// Print `\` and `->` instead of `λ` and `→`.
    #[arg(long, global = true)]
    ascii: bool,
    /// Read the input from a file instead of the command line.
    #[arg(long, global = true)]
    file: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Echo the canonical pretty-print of a term.
    Parse { input: Option<String> },
    /// Reduce with the chosen strategy, printing each step.
    Reduce { input: Option<String> },
    /// Infer the principal typing.
    Infer { input: Option<String> },
    /// Validate a JSON derivation.
    Check { input: Option<String> },
    /// Infer, printing every round.
    Trace { input: Option<String> },
    /// Run the acceptance suite and print a pass/fail table.
    Corpus,
}

#[derive(Clone, Copy, ValueEnum)]
enum System {
    Weak,
    Strong,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Finf,
    Lo,
}

/// A failure mapped to exit status 2.
struct UsageError(String);

type Outcome = Result<(String, u8), UsageError>;

impl Cli {
    fn text(&self, s: String) -> String {
        if self.ascii {
            asciify(&s)
        } else {
            s
        }
    }

    fn source(&self, input: &Option<String>) -> Result<String, UsageError> {
        match (input, &self.file) {
            (Some(_), Some(_)) => Err(UsageError(
                "give the input inline or with --file, not both".into(),
            )),
            (Some(s), None) => Ok(s.clone()),
            (None, Some(path)) => std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("{}: {e}", path.display()))),
            (None, None) => {
                let mut s = String::new();
                std::io::stdin()
                    .read_to_string(&mut s)
                    .map_err(|e| UsageError(format!("stdin: {e}")))?;
                Ok(s)
            }
        }
    }

    fn term(&self, input: &Option<String>) -> Result<Term, UsageError> {
        let src = self.source(input)?;
        parse(src.trim()).map_err(|e| UsageError(e.to_string()))
    }

    fn infer_config(&self) -> Result<InferConfig, UsageError> {
        if matches!(self.system, System::Weak) {
            return Err(UsageError(
                "inference is defined for the strong system only".into(),
            ));
        }
        let cfg = InferConfig::default().with_fuel(self.fuel);
        Ok(match self.seed {
            Some(seed) if !self.deterministic => cfg.seeded(seed),
            _ => cfg,
        })
    }

    fn run(&self) -> Outcome {
        match &self.command {
            Command::Parse { input } => self.parse(input),
            Command::Reduce { input } => self.reduce(input),
            Command::Infer { input } => self.infer(input, false),
            Command::Trace { input } => self.infer(input, true),
            Command::Check { input } => self.check(input),
            Command::Corpus => self.corpus(),
        }
    }

    fn parse(&self, input: &Option<String>) -> Outcome {
        let t = self.term(input)?;
        let printed = Printer { ascii: self.ascii }.render(&t);
        Ok(match self.format {
            Format::Text => (printed, 0),
            Format::Json => (json!({ "term": printed, "size": t.size() }).to_string(), 0),
        })
    }

    fn reduce(&self, input: &Option<String>) -> Outcome {
        let t = self.term(input)?;
        let strategy = match self.strategy {
            StrategyArg::Finf => Strategy::FInfinity,
            StrategyArg::Lo => Strategy::LeftmostOutermost,
        };
        let printer = Printer { ascii: self.ascii };
        let terms: Vec<Term> = strategy.sequence(t.clone()).take(self.fuel).collect();
        let normal = terms.last().unwrap_or(&t).is_normal_form();
        let steps: Vec<String> = terms.iter().map(|s| printer.render(s)).collect();
        let code = if normal { 0 } else { 1 };
        Ok(match self.format {
            Format::Text => {
                let mut out: Vec<String> = steps.iter().map(|s| format!("→ {s}")).collect();
                if !normal {
                    out.push("FUEL-EXHAUSTED".into());
                }
                (self.text(out.join("\n")), code)
            }
            Format::Json => (
                json!({ "steps": steps, "normal": normal }).to_string(),
                code,
            ),
        })
    }

    fn infer(&self, input: &Option<String>, traced: bool) -> Outcome {
        let t = self.term(input)?;
        let mut cfg = self.infer_config()?;
        if traced {
            cfg = cfg.traced();
        }
        let outcome = match infer_strong(&t, &cfg) {
            Ok(o) => o,
            Err(e) => return Ok((format!("error: {e}"), 1)),
        };
        let trace = outcome.trace().to_vec();
        let (result, code): (serde_json::Value, u8) = match &outcome {
            InferOutcome::Success(s) => match build_checked_derivation(s) {
                Ok(d) => {
                    let typing = final_typing(s).render(&t);
                    let tree = serde_json::to_value(d.to_json()).expect("trees serialize");
                    (json!({ "typing": typing, "derivation": tree }), 0)
                }
                Err(e) => (json!({ "error": e.to_string() }), 1),
            },
            InferOutcome::FuelExhausted { rounds, .. } => {
                (json!({ "outcome": "FUEL-EXHAUSTED", "rounds": rounds }), 1)
            }
            InferOutcome::Cancelled => (json!({ "outcome": "CANCELLED" }), 1),
        };
        Ok(match self.format {
            Format::Json if traced => {
                let events = serde_json::to_value(&trace).expect("events serialize");
                (
                    json!({ "trace": events, "result": result }).to_string(),
                    code,
                )
            }
            Format::Json => match result.get("derivation") {
                // a bare tree, so that the output can be fed to `check`
                Some(tree) => (tree.to_string(), code),
                None => (result.to_string(), code),
            },
            Format::Text => {
                let last = match (&result["typing"], &result["error"], &result["outcome"]) {
                    (serde_json::Value::String(typing), _, _) => typing.clone(),
                    (_, serde_json::Value::String(e), _) => format!("error: {e}"),
                    (_, _, o) => o.as_str().unwrap_or_default().to_string(),
                };
                let body = if traced {
                    format!("{}{last}", render_trace(&trace))
                } else {
                    last
                };
                (self.text(body), code)
            }
        })
    }

    fn check(&self, input: &Option<String>) -> Outcome {
        let src = self.source(input)?;
        let value: serde_json::Value =
            serde_json::from_str(&src).map_err(|e| UsageError(format!("invalid JSON: {e}")))?;
        // accept either a bare tree or the object printed by `trace`
        let tree = value
            .get("derivation")
            .or_else(|| value.get("result").and_then(|r| r.get("derivation")))
            .unwrap_or(&value);
        let tree: TreeJson = serde_json::from_value(tree.clone())
            .map_err(|e| UsageError(format!("not a derivation: {e}")))?;
        let d = Derivation::from_json(&tree).map_err(|e| UsageError(e.to_string()))?;
        let system = match self.system {
            System::Weak => Mode::Weak,
            System::Strong => Mode::Strong,
        };
        let report = validate(&d, system);
        let code = if report.is_valid() { 0 } else { 1 };
        Ok(match self.format {
            Format::Text => (self.text(report.render().trim_end().to_string()), code),
            Format::Json => {
                let violations: Vec<_> = report
                    .violations
                    .iter()
                    .map(|v| json!({ "path": v.path, "rule": v.rule, "message": v.message }))
                    .collect();
                (
                    json!({ "valid": report.is_valid(), "violations": violations }).to_string(),
                    code,
                )
            }
        })
    }

    fn corpus(&self) -> Outcome {
        let mut settings = Settings::default();
        if let Some(seed) = self.seed {
            settings.seed = seed;
        }
        let reports = acceptance::run_all(&settings);
        let code = if reports.iter().all(|r| r.passed) {
            0
        } else {
            1
        };
        Ok(match self.format {
            Format::Text => (
                self.text(acceptance::render(&reports).trim_end().to_string()),
                code,
            ),
            Format::Json => {
                let rows: Vec<_> = reports
                    .iter()
                    .map(|r| {
                        json!({
                            "id": r.id,
                            "name": r.name,
                            "passed": r.passed,
                            "detail": r.detail,
                            "seconds": r.elapsed.as_secs_f64(),
                        })
                    })
                    .collect();
                (serde_json::Value::Array(rows).to_string(), code)
            }
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.run() {
        Ok((out, code)) => {
            println!("{out}");
            ExitCode::from(code)
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
