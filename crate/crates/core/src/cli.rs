//! Command-line front end. Exit codes: 0 on success (a violated verdict is a
//! result, not a failure), 1 on data errors, 2 on usage errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::boole::{boole_margins, check_pair_dataset, check_triple_dataset, exhaustive_lemma, SignPattern};
use crate::error::{Error, Result};
use crate::exact::{parse_rational, render_decimal, to_f64};
use crate::experiments::context_free::context_free_property_run;
use crate::experiments::doctors::doctors_scenario_with;
use crate::experiments::search::{violation_search_context_free, violation_search_deterministic};
use crate::experiments::telegraph::{telegraph_scenario, SignSchedule, TelegraphParams};
use crate::experiments::ExperimentReport;
use crate::io::dataset::{pairs_to_string, parse_pairs, parse_triples, triples_to_string};
use crate::io::report::{RationalDoc, ReportDocument, TOOL_VERSION};
use crate::model::{correlations_from_triples, CorrelationTriple, Outcome};
use crate::representability::{find_joint_distribution, synthesize_triples, FeasibilityResult};

#[derive(Debug, Parser)]
#[command(name = "boole", version, about = "Boole inequality checks for dichotomic data")]
struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report on a triple dataset CSV.
    CheckTriples { file: PathBuf },
    /// Report on a pair dataset CSV.
    CheckPairs { file: PathBuf },
    /// Find a joint distribution for the targets, or a violated facet.
    Feasible(Targets),
    /// Write a triple dataset approximating the targets.
    Synthesize {
        #[command(flatten)]
        targets: Targets,
        #[arg(long)]
        m: usize,
    },
    /// Run a built-in scenario.
    Scenario {
        #[arg(value_enum)]
        name: ScenarioName,
        #[arg(long, default_value_t = 3)]
        dates: usize,
        #[arg(long, default_value_t = 1)]
        patients: usize,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, default_value_t = 0.5)]
        dt: f64,
        /// Runs per group (telegraph default 100000, context-free default 10000).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Apparatus signs for the telegraph scenario.
        #[arg(long, value_enum, default_value_t = SignChoice::G23Flip)]
        schedule: SignChoice,
    },
    /// Exhaustive search over deterministic group-contextual strategies.
    Search,
    /// Print the per-run proof table.
    Lemma,
}

#[derive(Debug, clap::Args)]
struct Targets {
    #[arg(long, allow_hyphen_values = true)]
    f12: String,
    #[arg(long, allow_hyphen_values = true)]
    f13: String,
    #[arg(long, allow_hyphen_values = true)]
    f23: String,
}

impl Targets {
    fn parse(&self) -> Result<CorrelationTriple> {
        Ok(CorrelationTriple::Rational([
            parse_rational(&self.f12)?,
            parse_rational(&self.f13)?,
            parse_rational(&self.f23)?,
        ]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioName {
    Doctors,
    Telegraph,
    ContextFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SignChoice {
    Identity,
    G23Flip,
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let rendered = err.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return if code == 0 { 0 } else { 2 };
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            1
        }
    }
}

fn emit(cli: &Cli, stdout: &mut dyn Write, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => File::create(path)?.write_all(text.as_bytes())?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn render_report(format: Format, doc: &ReportDocument) -> String {
    match format {
        Format::Json => doc.to_json(),
        Format::Text => doc.to_text(),
        Format::Csv => doc.to_csv(),
    }
}

fn triple_label(t: &[Outcome; 3]) -> String {
    format!("{},{},{}", t[0], t[1], t[2])
}

fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::CheckTriples { file } => {
            let ds = parse_triples(file)?;
            let c = correlations_from_triples(&ds)?;
            let doc = ReportDocument::new(&c, &check_triple_dataset(&ds)?, "check-triples", None)?;
            emit(cli, stdout, &render_report(cli.format, &doc))
        }
        Command::CheckPairs { file } => {
            let ds = parse_pairs(file)?;
            let report = ExperimentReport::from_pairs(&ds, "check-pairs", None)?;
            debug_assert_eq!(report.boole, check_pair_dataset(&ds)?);
            let doc = ReportDocument::from_experiment(&report, "check-pairs")?;
            emit(cli, stdout, &render_report(cli.format, &doc))
        }
        Command::Feasible(targets) => feasible(cli, stdout, &targets.parse()?),
        Command::Synthesize { targets, m } => {
            let ds = synthesize_triples(&targets.parse()?, *m)?;
            let csv = triples_to_string(&ds);
            match &cli.out {
                Some(path) => {
                    File::create(path)?.write_all(csv.as_bytes())?;
                    let c = correlations_from_triples(&ds)?;
                    let doc = ReportDocument::new(&c, &boole_margins(&c)?, "synthesize", None)?;
                    stdout.write_all(render_report(cli.format, &doc).as_bytes())?;
                }
                None => stdout.write_all(csv.as_bytes())?,
            }
            Ok(())
        }
        Command::Scenario {
            name,
            dates,
            patients,
            gamma,
            dt,
            m,
            trials,
            schedule,
        } => match name {
            ScenarioName::Doctors => {
                let (ds, report) = doctors_scenario_with(
                    crate::experiments::doctors::doctor_rule,
                    "doctors",
                    *dates,
                    *patients,
                    cli.seed,
                )?;
                scenario_output(cli, stdout, &ds, &report, "doctors")
            }
            ScenarioName::Telegraph => {
                let signs = match schedule {
                    SignChoice::Identity => SignSchedule::identity(),
                    SignChoice::G23Flip => SignSchedule::flip_in_g23(),
                };
                let params = TelegraphParams {
                    gamma: *gamma,
                    delta: *dt,
                    signs,
                };
                let (ds, report) = telegraph_scenario(params, m.unwrap_or(100_000), cli.seed)?;
                scenario_output(cli, stdout, &ds, &report, "telegraph")
            }
            ScenarioName::ContextFree => {
                let summary = context_free_property_run(m.unwrap_or(10_000), *trials, cli.seed)?;
                let pair = RationalDoc::from(&summary.worst_pair_margin);
                let triple = RationalDoc::from(&summary.worst_triple_margin);
                let text = match cli.format {
                    Format::Json => json_text(&json!({
                        "scenario": "context-free",
                        "seed": summary.seed,
                        "trials": summary.trials,
                        "m_per_group": summary.m_per_group,
                        "worst_pair_margin": pair,
                        "worst_triple_margin": triple,
                        "pair_margin_bound": format!("{:.15}", summary.bound),
                        "within_bound": summary.within_bound(),
                        "tool_version": TOOL_VERSION,
                    })),
                    Format::Csv => format!(
                        "key,value\ntrials,{}\nm_per_group,{}\nworst_pair_margin,{}\nworst_triple_margin,{}\npair_margin_bound,{:.15}\nwithin_bound,{}\n",
                        summary.trials, summary.m_per_group, pair.decimal, triple.decimal, summary.bound, summary.within_bound()
                    ),
                    Format::Text => format!(
                        "scenario: context-free\nseed: {}\ntrials: {}\nm per group: {}\nworst pair-mode margin: {}\nworst triple-mode margin: {}\nbound: {:.15}\nwithin bound: {}\n",
                        summary.seed, summary.trials, summary.m_per_group, pair.decimal, triple.decimal, summary.bound, summary.within_bound()
                    ),
                };
                emit(cli, stdout, &text)
            }
        },
        Command::Search => search(cli, stdout),
        Command::Lemma => lemma(cli, stdout),
    }
}

fn scenario_output(
    cli: &Cli,
    stdout: &mut dyn Write,
    ds: &crate::model::PairDataset,
    report: &ExperimentReport,
    scenario: &str,
) -> Result<()> {
    let text = match cli.format {
        Format::Csv => pairs_to_string(ds),
        other => render_report(other, &ReportDocument::from_experiment(report, scenario)?),
    };
    emit(cli, stdout, &text)
}

fn feasible(cli: &Cli, stdout: &mut dyn Write, targets: &CorrelationTriple) -> Result<()> {
    let report = boole_margins(targets)?;
    let result = find_joint_distribution(targets)?;
    let ratios = targets.ratios().expect("cli targets are exact");
    let margins = SignPattern::ALL.map(|p| report.margin(p).exact().expect("exact"));

    let weights: Vec<([Outcome; 3], RationalDoc)> = match &result {
        FeasibilityResult::Distribution(d) => crate::boole::all_sign_triples()
            .into_iter()
            .zip(d.exact_weights().expect("exact targets"))
            .map(|(t, w)| (t, RationalDoc::from(w)))
            .collect(),
        FeasibilityResult::Certificate(_) => Vec::new(),
    };
    let certificate = result.certificate();

    let text = match cli.format {
        Format::Json => {
            let mut m = serde_json::Map::new();
            for (p, v) in SignPattern::ALL.iter().zip(&margins) {
                m.insert(p.key().to_string(), json!(RationalDoc::from(v)));
            }
            json_text(&json!({
                "targets": {
                    "f12": RationalDoc::from(&ratios[0]),
                    "f13": RationalDoc::from(&ratios[1]),
                    "f23": RationalDoc::from(&ratios[2]),
                },
                "feasible": certificate.is_none(),
                "certificate": certificate.map(|p| p.key()),
                "margins": Value::Object(m),
                "distribution": weights.iter().map(|(t, w)| json!({
                    "triple": triple_label(t),
                    "weight": w,
                })).collect::<Vec<_>>(),
                "tool_version": TOOL_VERSION,
            }))
        }
        Format::Csv => match certificate {
            Some(p) => format!("certificate\n{p}\n"),
            None => {
                let mut s = String::from("a1,a2,a3,num,den,decimal\n");
                for (t, w) in &weights {
                    s.push_str(&format!("{},{},{},{}\n", triple_label(t), w.num, w.den, w.decimal));
                }
                s
            }
        },
        Format::Text => {
            let mut s = String::new();
            for (p, v) in SignPattern::ALL.iter().zip(&margins) {
                s.push_str(&format!("margin {p} = {}\n", render_decimal(v)));
            }
            match certificate {
                Some(p) => s.push_str(&format!("infeasible: facet {p} is violated\n")),
                None => {
                    s.push_str("feasible; joint distribution:\n");
                    for (t, w) in weights.iter().filter(|(_, w)| w.num != 0) {
                        s.push_str(&format!("  ({}) {}/{}\n", triple_label(t), w.num, w.den));
                    }
                }
            }
            s
        }
    };
    emit(cli, stdout, &text)
}

fn strategy_json(s: &crate::experiments::search::DeterministicStrategy) -> Value {
    let pair = |i: usize| json!([s.answers[i][0].to_string(), s.answers[i][1].to_string()]);
    json!({ "g12": pair(0), "g13": pair(1), "g23": pair(2) })
}

fn search(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let all = violation_search_deterministic();
    let free = violation_search_context_free();
    let best = all.best.correlations().values();
    let text = match cli.format {
        Format::Json => json_text(&json!({
            "strategies_evaluated": all.evaluated,
            "violation_amount": RationalDoc::from(&all.violation),
            "maximizers": all.maximizers.len(),
            "best_strategy": strategy_json(&all.best),
            "best_correlations": best,
            "best_worst_facet": all.best.report().worst_pattern.key(),
            "context_free_strategies": free.evaluated,
            "context_free_violation_amount": RationalDoc::from(&free.violation),
            "tool_version": TOOL_VERSION,
        })),
        Format::Csv => {
            let mut s = String::from("g12_first,g12_second,g13_first,g13_second,g23_first,g23_second,violation\n");
            for m in &all.maximizers {
                let a = m.answers;
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    a[0][0], a[0][1], a[1][0], a[1][1], a[2][0], a[2][1], render_decimal(&all.violation)
                ));
            }
            s
        }
        Format::Text => format!(
            "strategies evaluated: {}\nmaximal violation: {}\nmaximizers: {}\nbest correlations: ({}, {}, {})\ncontext-free maximum: {}\n",
            all.evaluated,
            to_f64(&all.violation),
            all.maximizers.len(),
            best[0],
            best[1],
            best[2],
            to_f64(&free.violation)
        ),
    };
    emit(cli, stdout, &text)
}

fn lemma(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let rows = exhaustive_lemma();
    let text = match cli.format {
        Format::Json => json_text(&json!({
            "rows": rows.iter().map(|r| json!({
                "a1": r.triple[0].to_string(),
                "a2": r.triple[1].to_string(),
                "a3": r.triple[2].to_string(),
                "pattern": r.pattern.key(),
                "value": r.value,
            })).collect::<Vec<_>>(),
            "max": rows.iter().map(|r| r.value).max(),
            "min": rows.iter().map(|r| r.value).min(),
            "tool_version": TOOL_VERSION,
        })),
        Format::Csv => {
            let mut s = String::from("a1,a2,a3,pattern,value\n");
            for r in &rows {
                s.push_str(&format!("{},{},{}\n", triple_label(&r.triple), r.pattern, r.value));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &rows {
                s.push_str(&format!("({}) {} -> {}\n", triple_label(&r.triple), r.pattern, r.value));
            }
            s
        }
    };
    emit(cli, stdout, &text)
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Io(err.to_string())
    }
}
