//! `zxw`: command-line front end for building, checking and exporting ZXW diagrams.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zxw::controlled::{
    controlled_matrix, controlled_product, controlled_state_normal_form, controlled_sum_matrices,
    controlled_sum_states, ControlledDiagram, ControlledKind,
};
use zxw::expm::{
    cayley_hamilton_diagram, commuting_circuit, commuting_exponential, extract_axz_circuit, taylor_diagram,
    trotter_circuit, trotter_diagram, Evolution,
};
use zxw::hamiltonian::{build_hamiltonian_diagram, oracle_matrix_with_cap, parse_pauli_sum, PauliSum};
use zxw::matrix::parse_complex;
use zxw::rules::{check_soundness, summarize, templates};
use zxw::{equal_up_to_scalar, eval_with, io, DenseMatrix, Diagram, EvalOptions};

#[derive(Parser)]
#[command(name = "zxw", version, about = "Build, evaluate and check ZXW diagrams")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Config {
    /// Largest number of boundary wires a dense evaluation may have.
    #[arg(long, global = true, env = "ZXW_CAP", default_value_t = 12)]
    cap: usize,
    /// Residual tolerance for verification checks.
    #[arg(long, global = true, env = "ZXW_TOL", default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Taylor,
    Trotter,
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Soundness table for the rewrite-rule templates.
    CheckRules {
        #[arg(long)]
        rule: Option<String>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Dense matrix of a JSON diagram.
    Eval {
        file: PathBuf,
        /// Value for time-dependent labels.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Controlled diagram for matrices or states given as text files.
    Controlled {
        #[arg(long, conflicts_with = "state", required_unless_present = "state")]
        matrix: Vec<PathBuf>,
        #[arg(long)]
        state: Vec<PathBuf>,
        /// Comma-separated coefficients, one per input file; without it several
        /// matrices are multiplied in the given order.
        #[arg(long)]
        sum: Option<String>,
        #[arg(long)]
        verify: bool,
    },
    /// Hamiltonian tools.
    Ham {
        #[command(subcommand)]
        action: HamAction,
    },
    /// Diagram for `exp(−iHt/2)`.
    Expm {
        file: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long)]
        emit_circuit: bool,
        #[arg(long)]
        compare_oracle: bool,
        #[arg(long, value_enum)]
        export: Option<Format>,
    },
    /// Re-serializes a JSON diagram.
    Export {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
    /// Circuit for `exp(−i(aX+bZ)t/2)`; unset values are drawn from the seed.
    ExtractDemo {
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        b: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
    },
}

#[derive(Subcommand)]
enum HamAction {
    /// Controlled diagram of a Pauli-sum file.
    Build {
        file: PathBuf,
        #[arg(long, value_enum)]
        export: Option<Format>,
        #[arg(long)]
        verify: bool,
    },
}

enum Failure {
    Usage(String),
    Verify(String),
}

impl From<zxw::Error> for Failure {
    fn from(e: zxw::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn render(d: &Diagram, f: Format) -> String {
    match f {
        Format::Json => io::to_json_pretty(d),
        Format::Dot => io::to_dot(d),
    }
}

impl Config {
    fn check(&self) -> Outcome {
        if self.cap == 0 {
            return Err(Failure::Usage("--cap must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Failure::Usage("--tol must be positive".into()));
        }
        Ok(())
    }

    fn eval(&self, d: &Diagram, t: Option<f64>) -> Result<DenseMatrix, Failure> {
        let opts = EvalOptions {
            qubit_cap: self.cap,
            t,
            ..EvalOptions::default()
        };
        Ok(eval_with(d, &opts)?)
    }
}

fn check_rules(cfg: &Config, rule: Option<String>, samples: usize) -> Outcome {
    let names: Vec<String> = match rule {
        Some(r) => vec![r],
        None => templates().iter().map(|t| t.name.to_string()).collect(),
    };
    println!("{:<18} {:>7} {:>8} {:>14} {:>12}", "rule", "samples", "exact%", "up-to-scalar%", "max-resid");
    let mut failed = Vec::new();
    for name in names {
        let reports = check_soundness(&name, samples, cfg.seed)?;
        let Some(s) = summarize(&reports) else {
            continue;
        };
        let pct = |k: usize| 100.0 * k as f64 / s.samples as f64;
        println!(
            "{:<18} {:>7} {:>8.1} {:>14.1} {:>12.2e}{}",
            s.rule,
            s.samples,
            pct(s.exact),
            pct(s.up_to_scalar),
            s.max_residual,
            if s.fail > 0 { format!("  FAIL x{}", s.fail) } else { String::new() }
        );
        if s.fail > 0 {
            failed.push(s.rule);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(format!("unsound: {}", failed.join(", "))))
    }
}

fn parse_coeffs(spec: &str) -> Result<Vec<C64>, Failure> {
    spec.split(',')
        .map(|tok| parse_complex(tok).map_err(Failure::Usage))
        .collect()
}

fn read_matrix(path: &Path) -> Result<DenseMatrix, Failure> {
    DenseMatrix::from_text(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_state(path: &Path) -> Result<Vec<C64>, Failure> {
    let m = read_matrix(path)?;
    if m.rows() != 1 && m.cols() != 1 {
        return Err(Failure::Usage(format!("{}: expected a single row or column", path.display())));
    }
    Ok(m.into_data())
}

fn controlled(cfg: &Config, matrices: &[PathBuf], states: &[PathBuf], sum: Option<&str>, verify: bool) -> Outcome {
    let coeffs = sum.map(parse_coeffs).transpose()?;
    let files = if states.is_empty() { matrices } else { states };
    if let Some(c) = &coeffs {
        if c.len() != files.len() {
            return Err(Failure::Usage(format!("{} coefficients for {} files", c.len(), files.len())));
        }
    }
    let (ctrl, expected): (ControlledDiagram, DenseMatrix) = if states.is_empty() {
        let mats = files.iter().map(|p| read_matrix(p)).collect::<Result<Vec<_>, _>>()?;
        let parts = mats.iter().map(controlled_matrix).collect::<zxw::Result<Vec<_>>>()?;
        match &coeffs {
            Some(c) => {
                let mut want = DenseMatrix::zeros(mats[0].rows(), mats[0].cols());
                for (m, &a) in mats.iter().zip(c) {
                    want = want.add(&m.scale(a))?;
                }
                (controlled_sum_matrices(&parts, c)?, want)
            }
            None => {
                let want = mats[1..].iter().try_fold(mats[0].clone(), |acc, m| acc.matmul(m))?;
                let ctrl = if parts.len() == 1 { parts[0].clone() } else { controlled_product(&parts)? };
                (ctrl, want)
            }
        }
    } else {
        let vs = files.iter().map(|p| read_state(p)).collect::<Result<Vec<_>, _>>()?;
        let parts = vs
            .iter()
            .map(|v| controlled_state_normal_form(v))
            .collect::<zxw::Result<Vec<_>>>()?;
        let c = coeffs.unwrap_or_else(|| vec![C64::new(1.0, 0.0); vs.len()]);
        let mut want = vec![C64::new(0.0, 0.0); vs[0].len()];
        for (v, &a) in vs.iter().zip(&c) {
            if v.len() != want.len() {
                return Err(Failure::Usage("states differ in length".into()));
            }
            for (w, x) in want.iter_mut().zip(v) {
                *w += a * x;
            }
        }
        let ctrl = if parts.len() == 1 { parts[0].clone() } else { controlled_sum_states(&parts, &c)? };
        (ctrl, DenseMatrix::column(&want)?)
    };
    println!("{}", io::to_json(&ctrl.diagram));
    if verify {
        let dim = 1usize << ctrl.m;
        let idle_want = match ctrl.kind {
            ControlledKind::Matrix => DenseMatrix::identity(dim),
            ControlledKind::State => {
                let mut e = vec![C64::new(0.0, 0.0); dim];
                e[0] = C64::new(1.0, 0.0);
                DenseMatrix::column(&e)?
            }
        };
        let idle = cfg.eval(&ctrl.idle(), None)?.max_abs_diff(&idle_want);
        let discharged = cfg.eval(&ctrl.discharge(), None)?.max_abs_diff(&expected);
        // Report to stderr so stdout stays valid JSON.
        let ok = idle <= cfg.tol && discharged <= cfg.tol;
        eprintln!("idle residual {idle:.3e}, discharge residual {discharged:.3e}");
        if !ok {
            return Err(Failure::Verify(format!("plug checks exceed {:e}", cfg.tol)));
        }
    }
    Ok(())
}

fn load_ham(cfg: &Config, path: &Path) -> Result<PauliSum, Failure> {
    let h = parse_pauli_sum(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if h.m > cfg.cap {
        return Err(zxw::Error::CapExceeded { found: h.m, cap: cfg.cap }.into());
    }
    Ok(h)
}

fn ham_build(cfg: &Config, file: &Path, export: Option<Format>, verify: bool) -> Outcome {
    let h = load_ham(cfg, file)?;
    let ctrl = build_hamiltonian_diagram(&h)?;
    let summary = format!(
        "{} terms on {} qubits; diagram has {} generators",
        h.len(),
        h.m,
        ctrl.diagram.generator_count()
    );
    match export {
        Some(f) => {
            eprintln!("{summary}");
            print!("{}", render(&ctrl.diagram, f));
        }
        None => println!("{summary}"),
    }
    if verify {
        let oracle = oracle_matrix_with_cap(&h, cfg.cap)?;
        let got = cfg.eval(&ctrl.discharge(), None)?;
        let r = got.max_abs_diff(&oracle);
        let idle = cfg.eval(&ctrl.idle(), None)?.max_abs_diff(&DenseMatrix::identity(oracle.rows()));
        let n = oracle.rows();
        if r <= cfg.tol && idle <= cfg.tol {
            let line = format!("oracle match: {n}×{n}, residual < {:e} ({r:.2e})", cfg.tol);
            if export.is_some() {
                eprintln!("{line}");
            } else {
                println!("{line}");
            }
        } else {
            return Err(Failure::Verify(format!(
                "oracle mismatch: {n}×{n}, residual {r:.3e}, idle residual {idle:.3e}"
            )));
        }
    }
    Ok(())
}

fn expm_oracle(h: &PauliSum, cap: usize, t: f64) -> Result<DenseMatrix, Failure> {
    Ok(oracle_matrix_with_cap(h, cap)?.scale(C64::new(0.0, -t / 2.0)).expm()?)
}

#[allow(clippy::too_many_arguments)]
fn expm(
    cfg: &Config,
    file: &Path,
    method: Method,
    t: f64,
    order: usize,
    steps: usize,
    emit_circuit: bool,
    compare_oracle: bool,
    export: Option<Format>,
) -> Outcome {
    let h = load_ham(cfg, file)?;
    let commuting = h.is_real() && h.non_commuting_pair().is_none();
    let evolution = match method {
        Method::Taylor => Evolution::constant(taylor_diagram(&h, order, t)?),
        Method::Trotter => trotter_diagram(&h, steps)?.resolved(t),
        Method::Exact if commuting => commuting_exponential(&h)?.resolved(t),
        Method::Exact => Evolution::constant(cayley_hamilton_diagram(&h, t)?),
    };
    eprintln!(
        "{} generators, global phase {:.6}",
        evolution.diagram.generator_count(),
        evolution.phase.angle(t)
    );
    if let Some(f) = export {
        print!("{}", render(&evolution.diagram, f));
    }
    if emit_circuit {
        let circuit = match method {
            Method::Trotter => trotter_circuit(&h, steps, t)?,
            Method::Exact if commuting => commuting_circuit(&h, t)?,
            Method::Exact => axz_circuit(&h, t)?,
            Method::Taylor => {
                return Err(Failure::Usage("a truncated series is not unitary; no circuit".into()));
            }
        };
        print!("{circuit}");
    }
    if compare_oracle {
        let want = expm_oracle(&h, cfg.cap, t)?;
        let got = cfg.eval(&evolution.diagram, None)?.scale(evolution.phase.value(t));
        let err = got.sub(&want)?.op_norm();
        println!("operator-norm error: {err:.6e}");
    }
    Ok(())
}

/// Single-qubit `aX + bZ` with real coefficients, in any term order.
fn axz_circuit(h: &PauliSum, t: f64) -> Result<zxw::circuit::Circuit, Failure> {
    let mut ab = [0.0, 0.0];
    for (alpha, s) in &h.terms {
        let slot = match s.to_string().as_str() {
            "X" => 0,
            "Z" => 1,
            _ => return Err(Failure::Usage("circuit extraction needs a one-qubit aX + bZ".into())),
        };
        if alpha.im != 0.0 {
            return Err(zxw::Error::NonRealCoefficient(0).into());
        }
        ab[slot] += alpha.re;
    }
    Ok(extract_axz_circuit(ab[0], ab[1], t)?)
}

fn export(file: &Path, format: Format) -> Outcome {
    let d = io::from_json(&read(file)?)?;
    print!("{}", render(&d, format));
    Ok(())
}

fn extract_demo(cfg: &Config, a: Option<f64>, b: Option<f64>, t: Option<f64>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let a = a.unwrap_or_else(|| rng.gen_range(-2.0..2.0));
    let b = b.unwrap_or_else(|| rng.gen_range(-2.0..2.0));
    let t = t.unwrap_or_else(|| rng.gen_range(-3.0..3.0));
    println!("# exp(-i({a}X + {b}Z)t/2) at t = {t}");
    let circuit = extract_axz_circuit(a, b, t)?;
    print!("{circuit}");
    let h = PauliSum::from_pairs(&[(a, "X"), (b, "Z")])?;
    let want = expm_oracle(&h, cfg.cap, t)?;
    let cmp = equal_up_to_scalar(&circuit.unitary(), &want, cfg.tol)?;
    if cmp.equal {
        println!("# matches up to global phase {:.6} (residual {:.2e})", cmp.scalar.arg(), cmp.residual);
        Ok(())
    } else {
        Err(Failure::Verify(format!("circuit differs from the exponential: residual {:.3e}", cmp.residual)))
    }
}

fn eval_file(cfg: &Config, file: &Path, t: Option<f64>) -> Outcome {
    let d = io::from_json(&read(file)?)?;
    print!("{}", cfg.eval(&d, t)?);
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let cfg = &cli.config;
    cfg.check()?;
    match cli.command {
        Command::CheckRules { rule, samples } => check_rules(cfg, rule, samples),
        Command::Eval { file, t } => eval_file(cfg, &file, t),
        Command::Controlled {
            matrix,
            state,
            sum,
            verify,
        } => controlled(cfg, &matrix, &state, sum.as_deref(), verify),
        Command::Ham {
            action: HamAction::Build { file, export, verify },
        } => ham_build(cfg, &file, export, verify),
        Command::Expm {
            file,
            method,
            t,
            order,
            steps,
            emit_circuit,
            compare_oracle,
            export: fmt,
        } => expm(cfg, &file, method, t, order, steps, emit_circuit, compare_oracle, fmt),
        Command::Export { file, format } => export(&file, format),
        Command::ExtractDemo { a, b, t } => extract_demo(cfg, a, b, t),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("usage: zxw <check-rules|eval|controlled|ham build|expm|export|extract-demo> [options]");
            ExitCode::from(2)
        }
    }
}
