//! Command-line front end: model checking, priority synthesis (optionally
//! through alphabet abstraction), assume-guarantee synthesis and model
//! generators.

mod input;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use prisyn_core::abstraction::synthesize_with_abstraction;
use prisyn_core::ag::{ag_synthesize, AgOptions, AgOutcome, AgProblem};
use prisyn_core::encode::{Encoded, Ordering};
use prisyn_core::explicit::{self, ExplicitError, Mode, Reason, Verdict};
use prisyn_core::game;
use prisyn_core::model::System;
use prisyn_core::monitor::{product_with_monitors, Dfa, RiskRule};
use prisyn_core::resolve::{synthesize, Outcome, SynthOptions, Synthesis};

use report::{AbstractionInfo, EncodingStats, Report, Stats, Step};

#[derive(Parser)]
#[command(
    name = "prisyn",
    version,
    about = "Priority synthesis for component-based systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model for deadlocks or risk configurations.
    Check {
        /// Model file, or a builtin name such as `phil-5`, `fig3`, `dpu`.
        model: String,
        #[command(flatten)]
        common: Common,
    },
    /// Synthesize priorities that make the model safe.
    Synth {
        model: String,
        #[command(flatten)]
        common: Common,
        /// Variable ordering of the symbolic encoding.
        #[arg(long, value_enum, default_value_t = OrderingArg::Force)]
        ordering: OrderingArg,
        /// How many priorities may be committed when the clauses conflict.
        #[arg(long, default_value_t = 0)]
        repush_depth: usize,
        /// Components to keep; the rest are abstracted away.
        #[arg(long, value_delimiter = ',')]
        keep: Vec<String>,
        /// Write the last round's clauses in DIMACS form.
        #[arg(long, value_name = "PATH")]
        emit_cnf: Option<String>,
    },
    /// Assume-guarantee synthesis against a risk automaton.
    Agsynth {
        model: String,
        #[command(flatten)]
        common: Common,
        /// Components of the first side.
        #[arg(long, value_delimiter = ',', required = true)]
        split: Vec<String>,
        /// Risk automaton file, or `fig6-spec`.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 50)]
        max_conjectures: usize,
    },
    /// Print a generated model.
    Generate {
        /// `philosophers`, `random`, `fig6-spec`, or a fixture name.
        family: String,
        /// Size for `philosophers`, seed for `random`.
        param: Option<u64>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Defaults to `both` when the model declares risk configurations and
    /// to `deadlock` otherwise.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Explicit state budget.
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
    #[arg(long)]
    stats: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Explicit,
    Symbolic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Deadlock,
    Risk,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderingArg {
    Decl,
    Force,
}

impl From<OrderingArg> for Ordering {
    fn from(o: OrderingArg) -> Ordering {
        match o {
            OrderingArg::Decl => Ordering::Decl,
            OrderingArg::Force => Ordering::Force,
        }
    }
}

impl Common {
    fn mode(&self, s: &System) -> Mode {
        match self.mode {
            Some(ModeArg::Deadlock) => Mode::Deadlock,
            Some(ModeArg::Risk) => Mode::Risk,
            Some(ModeArg::Both) => Mode::Both,
            None if s.risk_states().is_empty() => Mode::Deadlock,
            None => Mode::Both,
        }
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Deadlock => "deadlock",
        Mode::Risk => "risk",
        Mode::Both => "both",
    }
}

/// Verdict with the engine that produced it and a witness.
struct Checked {
    safe: bool,
    engine: &'static str,
    reason: Option<Reason>,
    trace: Vec<Step>,
}

fn check_explicit(s: &System, mode: Mode, budget: usize) -> Result<Checked, ExplicitError> {
    Ok(match explicit::verdict(s, mode, budget)? {
        Verdict::Safe => Checked {
            safe: true,
            engine: "explicit",
            reason: None,
            trace: Vec::new(),
        },
        Verdict::Unsafe { trace, reason } => {
            let mut steps = vec![Step {
                interaction: "init".to_string(),
                configuration: Some(s.format_configuration(&trace.initial)),
            }];
            steps.extend(trace.steps.iter().map(|(sigma, c)| Step {
                interaction: s.interaction_name(*sigma).to_string(),
                configuration: Some(s.format_configuration(c)),
            }));
            Checked {
                safe: false,
                engine: "explicit",
                reason: Some(reason),
                trace: steps,
            }
        }
    })
}

fn check_symbolic(s: &System, mode: Mode, ordering: Ordering) -> Checked {
    let mut e = Encoded::new(s, ordering);
    match game::violation_word(&mut e, mode.into()) {
        None => Checked {
            safe: true,
            engine: "symbolic",
            reason: None,
            trace: Vec::new(),
        },
        Some(w) => Checked {
            safe: false,
            engine: "symbolic",
            reason: match mode {
                Mode::Deadlock => Some(Reason::Deadlock),
                Mode::Risk => Some(Reason::Risk),
                Mode::Both => None,
            },
            trace: w
                .iter()
                .map(|&sigma| Step {
                    interaction: s.interaction_name(sigma).to_string(),
                    configuration: None,
                })
                .collect(),
        },
    }
}

/// Explicit when the reachable set fits the budget, symbolic otherwise,
/// unless an engine is forced.
fn check_with(
    s: &System,
    mode: Mode,
    engine: Option<EngineArg>,
    budget: usize,
    ordering: Ordering,
) -> Result<Checked> {
    match engine {
        Some(EngineArg::Explicit) => Ok(check_explicit(s, mode, budget)?),
        Some(EngineArg::Symbolic) => Ok(check_symbolic(s, mode, ordering)),
        None => match check_explicit(s, mode, budget) {
            Ok(c) => Ok(c),
            Err(ExplicitError::Budget(_)) => Ok(check_symbolic(s, mode, ordering)),
            Err(e) => Err(e.into()),
        },
    }
}

fn verification_line(c: &Checked) -> String {
    if c.safe {
        format!("safe ({})", c.engine)
    } else {
        format!("unsafe ({})", c.engine)
    }
}

fn encoding_stats(s: &System, ordering: Ordering) -> EncodingStats {
    let e = Encoded::new(s, ordering);
    EncodingStats {
        order: e.vars.names.clone(),
        nodes: e
            .stats()
            .into_iter()
            .map(|(k, n)| (k.to_string(), n))
            .collect(),
    }
}

fn cmd_check(model: &str, common: &Common) -> Result<(Report, u8)> {
    let start = Instant::now();
    let s = input::load_model(model)?;
    let mode = common.mode(&s);
    let c = check_with(&s, mode, common.engine, common.budget, Ordering::Force)?;
    let detail = match c.reason {
        Some(Reason::Deadlock) => "deadlock reachable".to_string(),
        Some(Reason::Risk) => "risk configuration reachable".to_string(),
        None if c.safe => format!("no {} violation reachable", mode_name(mode)),
        None => "violation reachable".to_string(),
    };
    let report = Report {
        command: "check",
        model: model.to_string(),
        outcome: if c.safe { "safe" } else { "unsafe" },
        detail: Some(detail),
        engine: Some(c.engine),
        trace: c.trace,
        stats: common.stats.then(|| Stats {
            encoding: Some(encoding_stats(&s, Ordering::Force)),
            millis: start.elapsed().as_millis(),
            ..Stats::default()
        }),
        ..Report::default()
    };
    Ok((report, if c.safe { 0 } else { 1 }))
}

struct SynthArgs<'a> {
    ordering: Ordering,
    repush_depth: usize,
    keep: &'a [String],
    emit_cnf: Option<&'a str>,
}

fn conflict_lines(s: &System, syn: &Synthesis) -> Vec<String> {
    match &syn.outcome {
        Outcome::Failure(prisyn_core::resolve::Failure::Unsat { conflict }) => conflict
            .iter()
            .map(|c| {
                let en: Vec<&str> = c.enabled.iter().map(|&i| s.interaction_name(i)).collect();
                format!(
                    "risk {} enabled {{{}}}",
                    s.interaction_name(c.risk),
                    en.join(",")
                )
            })
            .collect(),
        _ => Vec::new(),
    }
}

fn cmd_synth(model: &str, common: &Common, args: SynthArgs<'_>) -> Result<(Report, u8)> {
    let start = Instant::now();
    let s = input::load_model(model)?;
    let mode = common.mode(&s);
    let mut report = Report {
        command: "synth",
        model: model.to_string(),
        ..Report::default()
    };
    let (synthesis, encoded_system, concrete) = if args.keep.is_empty() {
        let opts = SynthOptions::new(mode)
            .ordering(args.ordering)
            .repush_depth(args.repush_depth);
        let syn = synthesize(&s, &opts);
        let p = syn.outcome.priorities().cloned().map(Ok);
        (syn, s.clone(), p)
    } else {
        if mode != Mode::Deadlock {
            bail!("--keep synthesizes against deadlocks only; drop --mode or use --mode deadlock");
        }
        let keep = s.component_set(args.keep)?;
        let run = synthesize_with_abstraction(&s, &keep, args.ordering, args.repush_depth)?;
        let a = &run.abstraction;
        report.abstraction = Some(AbstractionInfo {
            kept: keep.iter().map(|&c| s.component(c).name.clone()).collect(),
            eliminated: a.eliminated.clone(),
            abstract_alphabet: a.system.interactions().len(),
            abstracted: a.abstracted.len(),
        });
        (run.synthesis, a.system.clone(), run.concrete)
    };
    report.variables = synthesis.rounds.first().map(|r| r.variables);
    if let (Some(path), Some(cnf)) = (args.emit_cnf, &synthesis.cnf) {
        std::fs::write(path, cnf.to_dimacs(&encoded_system))
            .with_context(|| format!("writing {path}"))?;
    }
    let code = match (&synthesis.outcome, concrete) {
        (Outcome::Success { repushed, .. }, Some(Ok(p))) => {
            let fixed = s.with_priorities(s.priorities().union(&p))?;
            report.outcome = "success";
            report.priorities = report::priorities(&s, &p, None);
            if args.keep.is_empty() {
                report.repushed = report::priorities(&s, repushed, None);
            } else {
                report.repushed = report::priorities(&encoded_system, repushed, None);
            }
            let c = check_with(&fixed, mode, common.engine, common.budget, args.ordering)?;
            report.verification = Some(verification_line(&c));
            report.trace = c.trace;
            report.output_model = Some(fixed.to_string());
            if c.safe {
                0
            } else {
                1
            }
        }
        (Outcome::Success { .. }, Some(Err(e))) => {
            report.outcome = "failure";
            report.detail = Some(format!("abstract priorities do not concretize: {e}"));
            1
        }
        (Outcome::Failure(f), _) => {
            report.outcome = "failure";
            report.detail = Some(f.to_string());
            report.conflict = conflict_lines(&encoded_system, &synthesis);
            1
        }
        (Outcome::Success { .. }, None) => unreachable!("success always yields priorities"),
    };
    if common.stats {
        report.stats = Some(Stats {
            rounds: synthesis.rounds.clone(),
            encoding: Some(encoding_stats(&encoded_system, args.ordering)),
            millis: start.elapsed().as_millis(),
        });
    }
    Ok((report, code))
}

fn whole_system_safe(s: &System, risk: &Dfa, budget: usize) -> Result<Checked> {
    let prod = product_with_monitors(s, std::slice::from_ref(risk), RiskRule::Replace)?;
    check_with(&prod, Mode::Risk, None, budget, Ordering::Decl)
}

fn cmd_agsynth(
    model: &str,
    common: &Common,
    split: &[String],
    spec: &str,
    max_conjectures: usize,
) -> Result<(Report, u8)> {
    let start = Instant::now();
    if matches!(common.mode, Some(ModeArg::Deadlock | ModeArg::Both)) {
        bail!("the assume-guarantee rule is unsound for deadlock freedom; agsynth supports --mode risk only");
    }
    let s = input::load_model(model)?;
    let risk = input::load_dfa(spec)?;
    let first = s.component_set(split)?;
    let problem = AgProblem::new(s.clone(), first, risk.clone())?;
    let rep = ag_synthesize(
        &problem,
        AgOptions {
            max_conjectures,
            budget: common.budget,
        },
    )?;
    let mut report = Report {
        command: "agsynth",
        model: model.to_string(),
        conjectures: rep.conjecture_sizes(),
        ..Report::default()
    };
    let code = match &rep.outcome {
        AgOutcome::ProvedSafe => {
            report.outcome = "proved-safe";
            report.detail = Some("both rule conditions hold without new priorities".into());
            0
        }
        AgOutcome::Success(r) => {
            let all = r.first.union(&r.second);
            let fixed = s.with_priorities(s.priorities().union(&all))?;
            report.outcome = "success";
            report.priorities = report::priorities(&s, &r.first, Some("P1"));
            report
                .priorities
                .extend(report::priorities(&s, &r.second, Some("P2")));
            let c = whole_system_safe(&fixed, &risk, common.budget)?;
            report.verification = Some(verification_line(&c));
            report.output_model = Some(fixed.to_string());
            if c.safe {
                0
            } else {
                1
            }
        }
        AgOutcome::Fail { counterexample } => {
            report.outcome = "fail";
            report.detail = Some(
                "a risk word of the first side is also a word of the second side; \
                 try another split"
                    .into(),
            );
            report.trace = counterexample
                .iter()
                .map(|&sigma| Step {
                    interaction: s.interaction_name(sigma).to_string(),
                    configuration: None,
                })
                .collect();
            1
        }
    };
    if common.stats {
        report.stats = Some(Stats {
            millis: start.elapsed().as_millis(),
            ..Stats::default()
        });
    }
    Ok((report, code))
}

/// Writes to stdout, ignoring a closed pipe.
fn out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit(report: &Report, json: bool) {
    if json {
        out(&format!("{}\n", report.json()));
    } else {
        out(&report.text());
    }
}

fn run(cli: Cli) -> Result<u8> {
    let (report, code, json) = match &cli.command {
        Command::Check { model, common } => {
            let (r, c) = cmd_check(model, common)?;
            (r, c, common.json)
        }
        Command::Synth {
            model,
            common,
            ordering,
            repush_depth,
            keep,
            emit_cnf,
        } => {
            let args = SynthArgs {
                ordering: (*ordering).into(),
                repush_depth: *repush_depth,
                keep,
                emit_cnf: emit_cnf.as_deref(),
            };
            let (r, c) = cmd_synth(model, common, args)?;
            (r, c, common.json)
        }
        Command::Agsynth {
            model,
            common,
            split,
            spec,
            max_conjectures,
        } => {
            let (r, c) = cmd_agsynth(model, common, split, spec, *max_conjectures)?;
            (r, c, common.json)
        }
        Command::Generate { family, param } => {
            out(&input::generate(family, *param)?);
            return Ok(0);
        }
    };
    emit(&report, json);
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
