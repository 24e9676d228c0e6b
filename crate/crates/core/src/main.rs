use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kmod::harness::schema::{element_json, operator_json, parse_element, parse_operator};
use kmod::harness::{self, SuiteConfig};
use kmod::modspace::ModuleElement;
use kmod::opspace::{identity_parallel_op, op_parallel_def, op_parallel_witness};
use kmod::parallelcore::{bj_min, is_parallel_def, is_parallel_eig, parallel_witness, DEFAULT_TOL};
use kmod::Error;

#[derive(Parser)]
#[command(
    name = "kmod",
    version,
    about = "Norm-parallelism and Birkhoff-James orthogonality checks for d×m complex matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Def,
    Eig,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Element,
    ParallelPair,
    BjPair,
    Operator,
}

#[derive(Subcommand)]
enum Command {
    /// Decide x ‖ y and print the certificate(s).
    CheckParallel {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, env = "KMOD_DEFAULT_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value = "def")]
        method: Method,
    },
    /// Decide x ⊥ y (Birkhoff-James) and print the minimizer.
    CheckBj {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, env = "KMOD_DEFAULT_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Print a vector-state witness for a parallel pair.
    Witness {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, env = "KMOD_DEFAULT_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Decide T ‖ S for operators, or T ‖ I with --identity.
    OpCheck {
        t: PathBuf,
        s: Option<PathBuf>,
        #[arg(long)]
        identity: bool,
        #[arg(long, env = "KMOD_DEFAULT_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Generate a seeded instance as JSON.
    Gen {
        #[arg(long, value_enum, default_value = "element")]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Property suites.
    Suite {
        #[command(subcommand)]
        action: SuiteAction,
    },
}

#[derive(Subcommand)]
enum SuiteAction {
    /// Run the property suite and write its JSON report.
    Run {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Largest d drawn.
        #[arg(long, default_value_t = 4)]
        d: usize,
        /// Largest m drawn.
        #[arg(long, default_value_t = 6)]
        m: usize,
        #[arg(long, env = "KMOD_DEFAULT_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        margin: f64,
        /// Comma-separated property names; all when omitted.
        #[arg(long, value_delimiter = ',')]
        properties: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the property names.
    List,
}

enum Outcome {
    Verdict(bool),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Verdict(true)) => ExitCode::SUCCESS,
        Ok(Outcome::Verdict(false)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_element(path: &Path) -> Result<ModuleElement, Error> {
    parse_element(&read(path)?, &path.display().to_string())
}

fn emit(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("JSON output")
    );
}

fn write_out(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n"))
            .map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("certificate serializes")
}

fn run(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::CheckParallel { x, y, tol, method } => {
            let (x, y) = (load_element(&x)?, load_element(&y)?);
            let mut verdict = true;
            let mut certs = Vec::new();
            if matches!(method, Method::Def | Method::Both) {
                let (p, c) = is_parallel_def(&x, &y, tol)?;
                verdict &= p;
                certs.push(to_value(&c));
            }
            if matches!(method, Method::Eig | Method::Both) {
                let (p, c) = is_parallel_eig(&x, &y, tol)?;
                verdict &= p;
                certs.push(to_value(&c));
            }
            emit(&json!({"verdict": verdict, "tol": tol, "certificates": certs}));
            Ok(Outcome::Verdict(verdict))
        }
        Command::CheckBj { x, y, tol } => {
            let (x, y) = (load_element(&x)?, load_element(&y)?);
            let c = bj_min(&x, &y)?;
            let verdict = c.gap >= -tol * (x.norm() + 1.0);
            let mut cert = to_value(&c);
            cert["kind"] = json!("birkhoff-james");
            emit(&json!({"verdict": verdict, "tol": tol, "certificate": cert}));
            Ok(Outcome::Verdict(verdict))
        }
        Command::Witness { x, y, tol } => {
            let (x, y) = (load_element(&x)?, load_element(&y)?);
            match parallel_witness(&x, &y, tol) {
                Ok(w) => {
                    emit(&json!({"verdict": true, "tol": tol, "witness": to_value(&w)}));
                    Ok(Outcome::Verdict(true))
                }
                Err(Error::Precondition(msg)) => {
                    eprintln!("{msg}");
                    emit(&json!({"verdict": false, "tol": tol}));
                    Ok(Outcome::Verdict(false))
                }
                Err(e) => Err(e),
            }
        }
        Command::OpCheck {
            t,
            s,
            identity,
            tol,
        } => {
            let t = parse_operator(&read(&t)?, &t.display().to_string())?;
            if identity {
                let w = identity_parallel_op(&t, tol)?;
                let mut cert = to_value(&w);
                cert["kind"] = json!("identity");
                emit(&json!({"verdict": w.parallel, "tol": tol, "certificate": cert}));
                return Ok(Outcome::Verdict(w.parallel));
            }
            let s_path = s.ok_or_else(|| {
                Error::Config("op-check needs a second operator unless --identity is given".into())
            })?;
            let s = parse_operator(&read(&s_path)?, &s_path.display().to_string())?;
            let (p, lambda) = op_parallel_def(&t, &s, tol)?;
            if !p {
                emit(&json!({"verdict": false, "tol": tol, "lambda": [lambda.re, lambda.im]}));
                return Ok(Outcome::Verdict(false));
            }
            let c = op_parallel_witness(&t, &s, tol)?;
            let mut cert = to_value(&c);
            cert["kind"] = json!("operator-basic-vector");
            emit(&json!({"verdict": true, "tol": tol, "certificate": cert}));
            Ok(Outcome::Verdict(true))
        }
        Command::Gen {
            kind,
            seed,
            d,
            m,
            out,
        } => {
            let text = match kind {
                Kind::Element => element_json(&harness::gen_element(seed, d, m)?),
                Kind::ParallelPair => pair_json(harness::gen_parallel_pair(seed, d, m)?),
                Kind::BjPair => pair_json(harness::gen_bj_pair(seed, d, m)?),
                Kind::Operator => operator_json(&harness::gen_operator(seed, d, m)?),
            };
            write_out(&text, out.as_deref())?;
            Ok(Outcome::Verdict(true))
        }
        Command::Suite { action } => match action {
            SuiteAction::List => {
                for p in harness::registry() {
                    println!("{}", p.name);
                }
                Ok(Outcome::Verdict(true))
            }
            SuiteAction::Run {
                seed,
                trials,
                d,
                m,
                tol,
                margin,
                properties,
                out,
            } => {
                let config = SuiteConfig {
                    seed,
                    trials,
                    d,
                    m,
                    tol,
                    margin,
                    properties,
                };
                let report = harness::run_suite(&config)?;
                for (name, r) in &report.properties {
                    eprintln!(
                        "{} {name}: {}/{} passed, {} skipped, max deviation {:e}",
                        if r.failed == 0 { "PASS" } else { "FAIL" },
                        r.passed,
                        r.evaluated,
                        r.skipped_knife_edge,
                        r.max_deviation
                    );
                }
                write_out(&report.to_json(), out.as_deref())?;
                Ok(Outcome::Verdict(report.all_passed))
            }
        },
    }
}

fn pair_json((x, y): (ModuleElement, ModuleElement)) -> String {
    let doc = harness::schema::PairDoc {
        x: harness::schema::ElementDoc::from_element(&x),
        y: harness::schema::ElementDoc::from_element(&y),
    };
    serde_json::to_string(&doc).expect("pair serializes")
}
