//! Command-line front end. Each positional input is read from a file when
//! it names one, and taken as literal text otherwise.
//!
//! Exit codes: 0 for true or success, 1 for false or a differential
//! mismatch, 2 for any error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::bisim::{EquivChecker, Mode, TAU};
use crate::frontend::{
    gcs_to_text, parse_formula, parse_gcs, parse_guard, parse_lts, parse_qbf, parse_set,
    parse_valuation, set_to_json_string, valuation_to_text, SetText,
};
use crate::logic::Checker;
use crate::oracle::differential_run;
use crate::reductions::qbf_to_gcs;
use crate::symbolic::{Metrics, PreStar};

#[derive(Parser, Debug)]
#[command(name = "gapcheck", version, about = "Symbolic model checking of gap-order constraint systems")]
struct Cli {
    /// Print evaluation metrics as JSON after the result.
    #[arg(long, global = true)]
    metrics: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a valuation satisfies a formula.
    Check {
        gcs: String,
        valuation: String,
        formula: String,
    },
    /// Print the set of valuations satisfying a formula.
    Denote {
        gcs: String,
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Print the predecessors (reflexive, transitive) of a set.
    Prestar {
        gcs: String,
        /// JSON array of graphs, or a formula without modalities.
        set: String,
        /// Comma-separated actions the steps may use.
        #[arg(long, value_delimiter = ',')]
        actions: Option<Vec<String>>,
        /// Clauses every step must satisfy.
        #[arg(long)]
        guard: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether a system state is bisimilar to an LTS state.
    Bisim {
        gcs: String,
        valuation: String,
        lts: String,
        state: String,
        #[arg(long, default_value = "strong")]
        mode: Mode,
        #[arg(long, default_value = TAU)]
        tau: String,
    },
    /// Write the system, start valuation and target formula encoding a QBF.
    GenQbf {
        qbf: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check the engine against the explicit-state oracle.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Random systems and formulas compared state by state.
    Diff {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

type Failure = Box<dyn std::error::Error>;

fn input(arg: &str) -> Result<String, Failure> {
    let p = Path::new(arg);
    if p.is_file() {
        Ok(fs::read_to_string(p).map_err(|e| format!("{arg}: {e}"))?)
    } else {
        Ok(arg.to_string())
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

struct Outcome {
    code: i32,
    metrics: Option<String>,
}

fn verdict(b: bool, out: &mut dyn Write, metrics: &Metrics) -> Result<Outcome, Failure> {
    writeln!(out, "{b}")?;
    Ok(Outcome {
        code: if b { 0 } else { 1 },
        metrics: Some(json(metrics)),
    })
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<Outcome, Failure> {
    match cmd {
        Command::Check {
            gcs,
            valuation,
            formula,
        } => {
            let g = parse_gcs(&input(&gcs)?)?;
            let v = parse_valuation(&input(&valuation)?, &g)?;
            let f = parse_formula(&input(&formula)?, &g)?;
            let mut checker = Checker::new(&g);
            let b = checker.check(&v, &f)?;
            verdict(b, out, checker.metrics())
        }
        Command::Denote { gcs, formula, json: as_json } => {
            let g = parse_gcs(&input(&gcs)?)?;
            let f = parse_formula(&input(&formula)?, &g)?;
            let mut checker = Checker::new(&g);
            let s = checker.denote_set(&f)?;
            if as_json {
                writeln!(out, "{}", set_to_json_string(&s))?;
            } else {
                write!(out, "{}", SetText(&s))?;
            }
            Ok(Outcome {
                code: 0,
                metrics: Some(json(checker.metrics())),
            })
        }
        Command::Prestar {
            gcs,
            set,
            actions,
            guard,
            json: as_json,
        } => {
            let g = parse_gcs(&input(&gcs)?)?;
            let s = parse_set(&input(&set)?, &g)?;
            let guard = match guard {
                Some(text) => parse_guard(&text, &g)?,
                None => Vec::new(),
            };
            let mut metrics = Metrics::for_system(&g);
            let result = PreStar::new(&g).guard(guard).actions(actions).run(&s, &mut metrics)?;
            if as_json {
                writeln!(out, "{}", set_to_json_string(&result))?;
            } else {
                write!(out, "{}", SetText(&result))?;
            }
            Ok(Outcome {
                code: 0,
                metrics: Some(json(&metrics)),
            })
        }
        Command::Bisim {
            gcs,
            valuation,
            lts,
            state,
            mode,
            tau,
        } => {
            let g = parse_gcs(&input(&gcs)?)?;
            let v = parse_valuation(&input(&valuation)?, &g)?;
            let l = parse_lts(&input(&lts)?)?;
            let ec = EquivChecker::new(&g, &l, mode, &tau)?;
            let idx = ec.state(&state)?;
            let mut checker = ec.checker();
            let b = checker.check(&v, &ec.formula(idx))?;
            verdict(b, out, checker.metrics())
        }
        Command::GenQbf { qbf, out: dir } => {
            let q = parse_qbf(&input(&qbf)?)?;
            let inst = qbf_to_gcs(&q);
            for d in &inst.diagnostics {
                eprintln!("note: {d}");
            }
            fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            let files = [
                ("instance.gcs", gcs_to_text(&inst.gcs)),
                ("initial.val", format!("{}\n", valuation_to_text(&inst.initial))),
                ("target.formula", format!("{}\n", inst.target)),
            ];
            for (name, body) in files {
                let path = dir.join(name);
                fs::write(&path, body).map_err(|e| format!("{}: {e}", path.display()))?;
                writeln!(out, "{}", path.display())?;
            }
            Ok(Outcome {
                code: 0,
                metrics: Some(json(&Metrics::for_system(&inst.gcs))),
            })
        }
        Command::Oracle {
            command: OracleCommand::Diff { seed, cases },
        } => {
            let report = differential_run(seed, cases);
            writeln!(out, "{}", json(&report))?;
            Ok(Outcome {
                code: if report.passed() { 0 } else { 1 },
                metrics: Some(json(&report.metrics)),
            })
        }
    }
}

/// Runs one invocation and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return if code == 0 { 0 } else { 2 };
        }
    };
    match execute(cli.command, out) {
        Ok(outcome) => {
            if cli.metrics {
                if let Some(m) = outcome.metrics {
                    let _ = writeln!(out, "{m}");
                }
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COUNTDOWN: &str = "gcs { vars: x, y; consts: 0; acts: a, b; }
        rule CX [a]: x > x' & x' >= 0 & y = y';
        rule CY [b]: y > y' & x' >= x & y' >= 0;";

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("gapcheck").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn check_and_denote() {
        let (code, out, _) = call(&["check", COUNTDOWN, "x=3,y=1", "EF (x=0 & y=0)"]);
        assert_eq!((code, out.as_str()), (0, "true\n"));
        let (code, out, _) = call(&["check", COUNTDOWN, "x=0,y=0", "<a> true"]);
        assert_eq!((code, out.as_str()), (1, "false\n"));
        let (code, out, _) = call(&["denote", COUNTDOWN, "<a> true"]);
        assert_eq!((code, out.as_str()), (0, "x - 0 >= 1\n"));
    }

    #[test]
    fn undecidable_operators_exit_2() {
        let (code, out, err) = call(&["check", COUNTDOWN, "x=0,y=0", "EG true"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(err.contains("undecidable"), "{err}");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["check", COUNTDOWN, "x=1", "true"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn metrics_follow_the_result() {
        let (code, out, _) = call(&["--metrics", "prestar", COUNTDOWN, "x = 0 & y = 0"]);
        assert_eq!(code, 0);
        let json_start = out.find('{').unwrap();
        let m: serde_json::Value = serde_json::from_str(&out[json_start..]).unwrap();
        assert_eq!(m["prestar_runs"].as_array().unwrap().len(), 1);
    }
}
