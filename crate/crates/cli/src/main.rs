use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lcas_core::lca::{fixture, LCAlgebra};
use lcas_core::poly::Rational;
use lcas_core::solver::{
    cinn_span, oracle_check, quasi_embed, residual, solve_space, AbgParams, DegreeBound,
    DerivationKind, SolverError,
};
use serde_json::json;

use lcas_cli::file::AlgebraFile;
use lcas_cli::report;

/// Exact computations with finite-rank Lie conformal algebras: axiom
/// checking, degree-bounded derivation-type solution spaces, module
/// theory, and the quasiderivation embedding.
#[derive(Parser)]
#[command(name = "lcas", version, max_term_width = 100)]
struct Cli {
    /// Emit machine-readable JSON (reports and errors)
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BoundArgs {
    /// Maximum degree in del for every ansatz entry
    #[arg(long = "deg-del")]
    deg_del: u16,
    /// Maximum degree in lam for every ansatz entry
    #[arg(long = "deg-lam")]
    deg_lam: u16,
}

#[derive(Subcommand)]
enum Command {
    /// Verify skew symmetry and the Jacobi identity of an algebra file
    Check { file: PathBuf },
    /// Solve a derivation-type identity and print the canonical basis
    Solve {
        /// One of: cder, qder, gder, centroid, qc, zder, abg, cinn
        kind: String,
        file: PathBuf,
        #[command(flatten)]
        bounds: BoundArgs,
        /// alpha parameter (abg only), e.g. 2 or -1/2
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        /// beta parameter (abg only)
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        /// gamma parameter (abg only)
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
    },
    /// Compute the center of the algebra up to a coordinate degree
    Center {
        file: PathBuf,
        #[arg(long = "deg-del")]
        deg_del: u16,
    },
    /// Print derived-submodule generators, invariant factors, and the
    /// free complement if one exists
    Derived { file: PathBuf },
    /// Emit the algebra file of the truncated extension
    Extend { file: PathBuf },
    /// Embed the quasiderivation space into the extension and re-verify
    /// the derivation identity there
    Embed {
        file: PathBuf,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Cross-check a solved space against the evaluation oracle
    Oracle {
        kind: String,
        file: PathBuf,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
    },
    /// Emit a built-in algebra file: vir, cur_sl2, rank2_LW,
    /// solvable_d1, or abelian(n)
    Fixture { name: String },
}

struct CliError {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { code: 2, message: message.into() }
}

fn precondition(message: impl Into<String>) -> CliError {
    CliError { code: 3, message: message.into() }
}

fn load_algebra(path: &PathBuf) -> Result<LCAlgebra, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let file: AlgebraFile = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: invalid JSON: {e}", path.display())))?;
    file.to_algebra()
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_rational(label: &str, value: &Option<String>) -> Result<Rational, CliError> {
    let Some(text) = value else {
        return Err(usage(format!("kind `abg` requires --{label}")));
    };
    let parse_int = |s: &str| -> Result<Rational, CliError> {
        if s.is_empty() || s.contains('/') || s.parse::<Rational>().is_err() {
            Err(usage(format!("--{label}: `{text}` is not a rational")))
        } else {
            Ok(s.parse().unwrap())
        }
    };
    match text.split_once('/') {
        None => parse_int(text),
        Some((n, d)) => {
            let denom = parse_int(d)?;
            if denom == lcas_core::poly::rat_int(0) {
                return Err(usage(format!("--{label}: zero denominator")));
            }
            Ok(parse_int(n)? / denom)
        }
    }
}

fn parse_kind(
    kind: &str,
    alpha: &Option<String>,
    beta: &Option<String>,
    gamma: &Option<String>,
) -> Result<DerivationKind, CliError> {
    let plain = |k: DerivationKind| {
        if alpha.is_some() || beta.is_some() || gamma.is_some() {
            Err(usage(format!("--alpha/--beta/--gamma only apply to kind `abg`, not `{kind}`")))
        } else {
            Ok(k)
        }
    };
    match kind {
        "cder" => plain(DerivationKind::Conformal),
        "qder" => plain(DerivationKind::Quasi),
        "gder" => plain(DerivationKind::Generalized),
        "centroid" => plain(DerivationKind::Centroid),
        "qc" => plain(DerivationKind::Quasicentroid),
        "zder" => plain(DerivationKind::Central),
        "abg" => Ok(DerivationKind::AlphaBetaGamma(AbgParams::new(
            parse_rational("alpha", alpha)?,
            parse_rational("beta", beta)?,
            parse_rational("gamma", gamma)?,
        ))),
        "center" => Err(usage("use the `center` subcommand for the center")),
        other => Err(usage(format!(
            "unknown kind `{other}` (expected cder, qder, gder, centroid, qc, zder, or abg)"
        ))),
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Check { file } => {
            let alg = load_algebra(file)?;
            let report = alg.check_axioms();
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report::axiom_report_json(&alg, &report))
                        .unwrap()
                );
            } else {
                print!("{}", report::axiom_report_text(&alg, &report));
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Solve { kind, file, bounds, alpha, beta, gamma } => {
            let alg = load_algebra(file)?;
            let b = DegreeBound::new(bounds.deg_del, bounds.deg_lam);
            let space = if kind == "cinn" {
                if alpha.is_some() || beta.is_some() || gamma.is_some() {
                    return Err(usage("--alpha/--beta/--gamma only apply to kind `abg`, not `cinn`"));
                }
                cinn_span(&alg, b)
            } else {
                let kind = parse_kind(kind, alpha, beta, gamma)?;
                solve_space(&kind, &alg, b)
            };
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report::space_json(&space)).unwrap());
            } else {
                print!("{}", report::space_text(&space, &alg));
            }
            Ok(0)
        }
        Command::Center { file, deg_del } => {
            let alg = load_algebra(file)?;
            let space = solve_space(&DerivationKind::Center, &alg, DegreeBound::new(*deg_del, 0));
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report::space_json(&space)).unwrap());
            } else {
                print!("{}", report::space_text(&space, &alg));
            }
            Ok(0)
        }
        Command::Derived { file } => {
            let alg = load_algebra(file)?;
            let derived = alg.derived_subalgebra();
            let smith = alg.complement_test(&derived).expect("submodule of own algebra");
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report::derived_json(
                        &alg,
                        &smith,
                        derived.generator_rows()
                    ))
                    .unwrap()
                );
            } else {
                print!("{}", report::derived_text(&alg, &smith, derived.generator_rows()));
            }
            Ok(0)
        }
        Command::Extend { file } => {
            let alg = load_algebra(file)?;
            let ext = alg.truncated_extension();
            let out = AlgebraFile::from_algebra(&ext);
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(0)
        }
        Command::Embed { file, bounds } => {
            let alg = load_algebra(file)?;
            let b = DegreeBound::new(bounds.deg_del, bounds.deg_lam);
            let qder = solve_space(&DerivationKind::Quasi, &alg, b);
            let ext = alg.truncated_extension();
            let mut verified = 0usize;
            for tuple in qder.basis_tuples().expect("map layout") {
                let image = match quasi_embed(&alg, &tuple[0], &tuple[1]) {
                    Ok(image) => image,
                    Err(SolverError::NoFreeComplement { factor }) => {
                        return Err(precondition(format!(
                            "no free complement of the derived submodule: invariant factor `{factor}`"
                        )));
                    }
                    Err(e) => return Err(usage(e.to_string())),
                };
                let res = residual(&DerivationKind::Conformal, &[image], &ext)
                    .expect("image lives on the extension");
                if !res.is_zero() {
                    if cli.json {
                        println!("{}", json!({"verified": false, "dimension": qder.dimension()}));
                    } else {
                        println!("embed: fail");
                    }
                    return Ok(1);
                }
                verified += 1;
            }
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "verified": true,
                        "dimension": qder.dimension(),
                        "images_checked": verified,
                    }))
                    .unwrap()
                );
            } else {
                println!("embed: pass ({verified} basis images verified)");
            }
            Ok(0)
        }
        Command::Oracle { kind, file, bounds, alpha, beta, gamma } => {
            let alg = load_algebra(file)?;
            let kind = parse_kind(kind, alpha, beta, gamma)?;
            let b = DegreeBound::new(bounds.deg_del, bounds.deg_lam);
            let agree = oracle_check(&kind, &alg, b);
            if cli.json {
                println!("{}", json!({"kind": kind.label(), "agree": agree}));
            } else {
                println!("oracle: {}", if agree { "agree" } else { "disagree" });
            }
            Ok(if agree { 0 } else { 1 })
        }
        Command::Fixture { name } => {
            let alg = fixture(name).map_err(|e| usage(e.to_string()))?;
            let out = AlgebraFile::from_algebra(&alg);
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if cli.json {
                println!("{}", json!({"error": {"code": e.code, "message": e.message}}));
            } else {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}
