//! Command-line front end.
//!
//! Exit codes: 0 for a positive outcome (provable for `decide`/`prove`,
//! refuted for `refute`, proof found for `oracle`, check passed for
//! `check`), 1 for the negative outcome, 2 for any parse or contract
//! error. Output is deterministic: identical inputs give byte-identical
//! output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::atom::Atom;
use crate::certify::Refuter;
use crate::complement::{build_negation_extension, tilde};
use crate::decide::Decider;
use crate::normalize::to_small_step;
use crate::parse::{parse_atom, parse_system};
use crate::proof::{check_proof, eliminate_cuts, measure, ProofTree, ReductionStep};
use crate::rule::{Provenance, SatStep};
use crate::saturate::saturate;
use crate::system::{Mode, System, SystemClass};

#[derive(Parser)]
#[command(name = "apds", version, about = "Decide provability in alternating pushdown systems")]
struct Cli {
    /// Machine-readable JSON output on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a proof against a system.
    Check {
        system: PathBuf,
        proof: PathBuf,
        /// Accept hypothesis and continuation leaves.
        #[arg(long)]
        admit_hypotheses: bool,
    },
    /// Transform a system into an equivalent small-step one.
    Normalize {
        input: PathBuf,
        /// Output file; also writes the erasure map to `<out>.erase`.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Close a small-step system under the saturation rules.
    Saturate {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write `satN <= case2(n1; i1,i3)`-style provenance lines.
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
    /// Decide provability of a configuration.
    Decide {
        system: PathBuf,
        config: String,
        /// Write the positive certificate here when provable.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Write the negative certificate here when not provable.
        #[arg(long)]
        refute: Option<PathBuf>,
        /// Keep the certificate over the saturated system instead of
        /// replaying it into the original one.
        #[arg(long)]
        saturated: bool,
    },
    /// Decide and print the positive certificate.
    Prove {
        system: PathBuf,
        config: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Keep the certificate over the saturated system.
        #[arg(long)]
        saturated: bool,
    },
    /// Refute a configuration: counterexample proof prefix in the negation
    /// extension of the (small-step form of the) system.
    Refute {
        system: PathBuf,
        config: String,
        /// Unfolding depth of the co-inductive proof prefix.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the expansion map as JSON.
        #[arg(long)]
        expansion_map: Option<PathBuf>,
    },
    /// Rewrite a proof over a saturated system into a cut-free one.
    EliminateCuts {
        system: PathBuf,
        proof: PathBuf,
        /// Print one line per reduction step.
        #[arg(long)]
        trace: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Instantiate conclusions and build the negation extension.
    Complement {
        system: PathBuf,
        /// Write the instantiated (~) system here.
        #[arg(long)]
        tilde: Option<PathBuf>,
        /// Write the negation extension here.
        #[arg(long)]
        negation: Option<PathBuf>,
    },
    /// Bounded exhaustive proof search (testing aid; exponential).
    Oracle {
        system: PathBuf,
        config: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        word_bound: usize,
    },
}

pub fn run() -> u8 {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn load_system(path: &Path) -> Result<System, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_system(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_proof(path: &Path) -> Result<ProofTree, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    ProofTree::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_config(text: &str) -> Result<Atom, String> {
    let atom = parse_atom(text).map_err(|e| e.to_string())?;
    if atom.is_open() {
        return Err(format!("configuration {atom} must be closed"));
    }
    Ok(atom)
}

fn write_file(path: &Path, content: &str) -> Result<(), String> {
    fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn emit(path: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => write_file(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn require_small_step(s: &System, what: &str) -> Result<(), String> {
    match s.class() {
        SystemClass::SmallStep | SystemClass::Saturated | SystemClass::MultiAutomaton => Ok(()),
        other => Err(format!("{what} expects a small-step system, got a {other} one")),
    }
}

fn provenance_lines(s: &System) -> String {
    let mut out = String::new();
    for r in s.rules() {
        let Provenance::Saturation(step) = r.provenance() else {
            continue;
        };
        let line = match step {
            SatStep::IntroElim { intro, elim } => format!("case1({elim}; {intro})"),
            SatStep::IntroNeutral { neutral, intros, .. } => {
                if intros.is_empty() {
                    format!("case2({neutral})")
                } else {
                    format!("case2({neutral}; {})", intros.join(","))
                }
            }
            SatStep::EpsNeutral { neutral, eps_intros } => {
                if eps_intros.is_empty() {
                    format!("case3({neutral})")
                } else {
                    format!("case3({neutral}; {})", eps_intros.join(","))
                }
            }
        };
        out.push_str(&format!("{} <= {line}\n", r.id()));
    }
    out
}

fn proof_json_value(p: &ProofTree) -> serde_json::Value {
    serde_json::from_str(&p.to_json()).expect("proof JSON is valid")
}

fn steps_json(steps: &[ReductionStep]) -> serde_json::Value {
    serde_json::Value::Array(
        steps
            .iter()
            .map(|s| {
                serde_json::json!({
                    "position": s.position,
                    "shape": s.shape.to_string(),
                    "rule": s.rule,
                    "measure": [s.measure_after.0, s.measure_after.1],
                })
            })
            .collect(),
    )
}

fn print_json(value: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&value).expect("JSON output"));
}

fn dispatch(cli: &Cli) -> Result<u8, String> {
    match &cli.command {
        Command::Check { system, proof, admit_hypotheses } => {
            let s = load_system(system)?;
            let p = load_proof(proof)?;
            match check_proof(&s, &p, *admit_hypotheses) {
                Ok(()) => {
                    if cli.json {
                        print_json(serde_json::json!({"ok": true, "issues": []}));
                    } else {
                        println!("ok");
                    }
                    Ok(0)
                }
                Err(issues) => {
                    if cli.json {
                        let list: Vec<String> = issues.iter().map(|i| i.to_string()).collect();
                        print_json(serde_json::json!({"ok": false, "issues": list}));
                    } else {
                        for issue in &issues {
                            println!("{issue}");
                        }
                    }
                    Ok(1)
                }
            }
        }
        Command::Normalize { input, output } => {
            let s = load_system(input)?;
            if s.mode() != Mode::Strict {
                return Err("normalize expects a strict system".into());
            }
            let (normalized, erasure) = to_small_step(&s);
            if cli.json {
                let map: BTreeMap<String, String> = erasure
                    .fresh_states()
                    .map(|(f, o, w)| (f.to_string(), format!("{o}({w})")))
                    .collect();
                print_json(serde_json::json!({
                    "system": normalized.to_text(),
                    "erasure": map,
                }));
            } else {
                emit(output, &normalized.to_text())?;
            }
            if let Some(out) = output {
                let mut erase_path = out.as_os_str().to_owned();
                erase_path.push(".erase");
                write_file(Path::new(&erase_path), &erasure.to_text())?;
            }
            Ok(0)
        }
        Command::Saturate { input, output, provenance } => {
            let s = load_system(input)?;
            require_small_step(&s, "saturate")?;
            let saturated = saturate(&s);
            if cli.json {
                print_json(serde_json::json!({
                    "system": saturated.to_text(),
                    "added": saturated.rules().len() - s.rules().len(),
                }));
            } else {
                emit(output, &saturated.to_text())?;
            }
            if let Some(path) = provenance {
                write_file(path, &provenance_lines(&saturated))?;
            }
            Ok(0)
        }
        Command::Decide { system, config, certificate, refute, saturated } => {
            let s = load_system(system)?;
            let atom = load_config(config)?;
            let decider = Decider::new(&s).map_err(|e| e.to_string())?;
            let verdict = decider
                .decide(&atom, refute.is_some() || cli.json)
                .map_err(|e| e.to_string())?;
            let cert = if verdict.provable && *saturated {
                decider.cut_free_proof(&atom).map_err(|e| e.to_string())?
            } else {
                verdict.certificate.clone()
            };
            if let (Some(path), Some(proof)) = (certificate, &cert) {
                write_file(path, &proof.to_json())?;
            }
            if let (Some(path), Some(proof)) = (refute, &verdict.refutation) {
                write_file(path, &proof.to_json())?;
            }
            if cli.json {
                print_json(serde_json::json!({
                    "provable": verdict.provable,
                    "certificate": cert.as_ref().map(proof_json_value),
                    "refutation": verdict.refutation.as_ref().map(proof_json_value),
                }));
            } else if verdict.provable {
                println!("provable");
            } else {
                println!("not provable");
            }
            Ok(if verdict.provable { 0 } else { 1 })
        }
        Command::Prove { system, config, output, saturated } => {
            let s = load_system(system)?;
            let atom = load_config(config)?;
            let decider = Decider::new(&s).map_err(|e| e.to_string())?;
            let verdict = decider.decide(&atom, false).map_err(|e| e.to_string())?;
            if !verdict.provable {
                if cli.json {
                    print_json(serde_json::json!({"provable": false}));
                } else {
                    println!("not provable");
                }
                return Ok(1);
            }
            let proof = if *saturated {
                decider
                    .cut_free_proof(&atom)
                    .map_err(|e| e.to_string())?
                    .expect("provable")
            } else {
                verdict.certificate.expect("provable")
            };
            if cli.json {
                print_json(serde_json::json!({
                    "provable": true,
                    "certificate": proof_json_value(&proof),
                }));
            } else {
                emit(output, &proof.to_json())?;
            }
            Ok(0)
        }
        Command::Refute { system, config, depth, output, expansion_map } => {
            let s = load_system(system)?;
            let atom = load_config(config)?;
            let refuter = Refuter::new(&s).map_err(|e| e.to_string())?;
            if let Some(path) = expansion_map {
                write_file(path, &refuter.expansion().to_json())?;
            }
            match refuter.unfold(&atom, *depth) {
                Ok(prefix) => {
                    if cli.json {
                        print_json(serde_json::json!({
                            "provable": false,
                            "refutation": proof_json_value(&prefix),
                        }));
                    } else {
                        emit(output, &prefix.to_json())?;
                    }
                    Ok(0)
                }
                Err(crate::certify::RefuteError::Provable(_)) => {
                    if cli.json {
                        print_json(serde_json::json!({"provable": true}));
                    } else {
                        println!("provable");
                    }
                    Ok(1)
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::EliminateCuts { system, proof, trace, output } => {
            let s = load_system(system)?;
            match s.class() {
                SystemClass::Saturated | SystemClass::MultiAutomaton => {}
                other => {
                    return Err(format!(
                        "eliminate-cuts expects a saturated system, got a {other} one"
                    ))
                }
            }
            let p = load_proof(proof)?;
            if let Err(issues) = check_proof(&s, &p, false) {
                return Err(format!("input proof does not check: {}", issues[0]));
            }
            let initial = measure(&s, &p);
            let (result, steps) = eliminate_cuts(&s, &p).map_err(|e| e.to_string())?;
            if cli.json {
                print_json(serde_json::json!({
                    "initial_measure": [initial.0, initial.1],
                    "steps": steps_json(&steps),
                    "proof": proof_json_value(&result),
                }));
            } else {
                if *trace {
                    println!("measure {initial}");
                    for (i, step) in steps.iter().enumerate() {
                        println!(
                            "step {}: {} cut at {:?} -> rule {}, measure {}",
                            i + 1,
                            step.shape,
                            step.position,
                            step.rule,
                            step.measure_after
                        );
                    }
                }
                emit(output, &result.to_json())?;
            }
            Ok(0)
        }
        Command::Complement { system, tilde: tilde_out, negation } => {
            let s = load_system(system)?;
            if s.mode() != Mode::Strict {
                return Err("complement expects a strict system".into());
            }
            require_small_step(&s, "complement")?;
            let t = tilde(&s);
            let neg = build_negation_extension(&s);
            if let Some(path) = tilde_out {
                write_file(path, &t.to_text())?;
            }
            if let Some(path) = negation {
                write_file(path, &neg.system().to_text())?;
            }
            if cli.json {
                print_json(serde_json::json!({
                    "tilde": t.to_text(),
                    "negation": neg.system().to_text(),
                }));
            } else if tilde_out.is_none() && negation.is_none() {
                print!("{}", neg.system().to_text());
            }
            Ok(0)
        }
        Command::Oracle { system, config, depth, word_bound } => {
            let s = load_system(system)?;
            let atom = load_config(config)?;
            match crate::oracle::search(&s, &atom, *depth, *word_bound) {
                Some(proof) => {
                    if cli.json {
                        print_json(serde_json::json!({
                            "found": true,
                            "proof": proof_json_value(&proof),
                        }));
                    } else {
                        print!("{}", proof.to_json());
                    }
                    Ok(0)
                }
                None => {
                    if cli.json {
                        print_json(serde_json::json!({"found": false, "proof": null}));
                    } else {
                        println!("no proof found within bounds");
                    }
                    Ok(1)
                }
            }
        }
    }
}
