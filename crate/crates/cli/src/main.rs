use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hyperlag::binomials::{check_lemma, BoundContext, LemmaGrid, LemmaId};
use hyperlag::extremal::{
    frankl_furedi_report, stanley_check, verify_bound_with_progress, verify_degree_lemma_with_progress,
    verify_shadow_bound_with_progress, Claim, FailureKind, VerificationReport, VerifyConfig,
};
use hyperlag::hypergraph::parse_hypergraph;
use hyperlag::spectral::{lagrangian, solve_rho};
use hyperlag::{nikiforov_bound, Error, Hypergraph, SolverConfig};
use serde_json::json;

const EXIT_FAILURES: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_NONCONVERGED: u8 = 5;

/// p-spectral radii and Lagrangians of uniform hypergraphs.
#[derive(Parser, Debug)]
#[command(name = "hyperlag", version, about)]
struct Cli {
    /// Solver seed; overrides the config file
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads
    #[arg(long, global = true, env = "HYPERLAG_THREADS")]
    threads: Option<usize>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Print instance counts to stderr
    #[arg(long, global = true)]
    progress: bool,

    /// Solver config, JSON or TOML: {p, restarts, seed, max_iters, tol, residual_tol}
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve rho_p(H) and print the certified solution
    Rho {
        file: PathBuf,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Lagrangian rho_1(H) / r
    Lagrangian { file: PathBuf },
    /// The bound rm / s^{r/p} with s = p_r^{-1}(m)
    Bound {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Shadow of the edge family
    Shadow { file: PathBuf },
    /// First m r-sets in colex order, as a hypergraph file
    Colex {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: usize,
    },
    /// Exhaustive verification over enumerated hypergraphs
    Verify {
        #[arg(long, value_parser = parse_claim)]
        claim: Claim,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 6)]
        m_max: usize,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Largest clique size for the stanley claim
        #[arg(long, default_value_t = 8)]
        s_max: usize,
        /// Enumeration budget in labeled candidates
        #[arg(long)]
        budget: Option<u64>,
        /// Skip the grid-oracle cross-check
        #[arg(long)]
        no_oracle: bool,
    },
    /// Grid check of the analytic lemmas
    Lemmas {
        #[arg(long, value_parser = parse_lemma)]
        which: LemmaId,
        #[arg(long, default_value_t = 2)]
        r_min: usize,
        #[arg(long, default_value_t = 8)]
        r_max: usize,
        #[arg(long, default_value_t = 30)]
        s_max: usize,
        #[arg(long, default_value_t = 257)]
        points: usize,
    },
}

fn parse_claim(s: &str) -> Result<Claim, String> {
    Claim::parse(s).ok_or_else(|| format!("unknown claim {s:?}; expected theorem2, degree, shadow, stanley or ff"))
}

fn parse_lemma(s: &str) -> Result<LemmaId, String> {
    LemmaId::parse(s).ok_or_else(|| format!("unknown lemma {s:?}; expected 1, 2, 3, 4, derivatives or h"))
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::Parse { .. } | Error::Json(_) => EXIT_INPUT,
            Error::Numerical(_) => EXIT_FAILURES,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

/// What a command prints, and the status it exits with.
struct Output {
    body: String,
    code: u8,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, code: 0 }
    }
}

fn read_hypergraph(path: &Path) -> Result<Hypergraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_hypergraph(&text).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })
}

fn solver_config(cli: &Cli) -> Result<SolverConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            SolverConfig::parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
        }
        None => SolverConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn pretty(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

fn json_only(cli: &Cli, what: &str) -> Result<(), Failure> {
    match cli.format {
        Format::Json => Ok(()),
        _ => Err(Failure::usage(format!("{what} only supports --format json"))),
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::usage("--threads must be >= 1"));
        }
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let cfg = solver_config(cli)?;

    match &cli.command {
        Command::Rho { file, p } => {
            json_only(cli, "rho")?;
            let h = read_hypergraph(file)?;
            let sol = solve_rho(&h, p.unwrap_or(cfg.p), &cfg)?;
            let code = if sol.converged { 0 } else { EXIT_NONCONVERGED };
            Ok(Output {
                body: pretty(&sol),
                code,
            })
        }
        Command::Lagrangian { file } => {
            json_only(cli, "lagrangian")?;
            let h = read_hypergraph(file)?;
            let mu = lagrangian(&h, &cfg)?;
            let sol = solve_rho(&h, 1.0, &cfg)?;
            let code = if sol.converged { 0 } else { EXIT_NONCONVERGED };
            Ok(Output {
                body: pretty(&json!({
                    "mu": mu,
                    "rho_1": sol.rho,
                    "r": h.r(),
                    "residual": sol.residual,
                    "converged": sol.converged,
                })),
                code,
            })
        }
        Command::Bound { r, m, p } => {
            json_only(cli, "bound")?;
            let ctx = BoundContext::new(*r, *m, *p)?;
            Ok(Output::ok(pretty(&json!({
                "r": ctx.r,
                "m": ctx.m,
                "p": ctx.p,
                "s": ctx.s,
                "d0": ctx.d0,
                "bound": nikiforov_bound(&ctx),
            }))))
        }
        Command::Shadow { file } => {
            let h = read_hypergraph(file)?;
            if h.r() < 2 {
                return Err(Failure::usage("shadow needs r >= 2"));
            }
            let shadow = h.edge_family().shadow();
            match cli.format {
                Format::Text => Ok(Output::ok(shadow.to_text())),
                Format::Json => Ok(Output::ok(pretty(&json!({
                    "k": shadow.arity(),
                    "size": shadow.len(),
                    "members": shadow.members(),
                })))),
                Format::Csv => Err(Failure::usage("shadow supports --format json or text")),
            }
        }
        Command::Colex { r, m } => {
            let h = Hypergraph::colex_prefix(*m, *r)?;
            match cli.format {
                Format::Text => Ok(Output::ok(h.to_text())),
                Format::Json => Ok(Output::ok(h.to_json() + "\n")),
                Format::Csv => Err(Failure::usage("colex supports --format json or text")),
            }
        }
        Command::Verify {
            claim,
            r,
            m_max,
            n_max,
            p,
            s_max,
            budget,
            no_oracle,
        } => {
            let mut vcfg = VerifyConfig {
                solver: cfg,
                ..VerifyConfig::default()
            };
            if let Some(b) = budget {
                vcfg.budget = *b;
            }
            if *no_oracle {
                vcfg.oracle = None;
            }
            let progress = |done: usize, total: usize| eprintln!("progress: {done}/{total}");
            let cb: Option<&(dyn Fn(usize, usize) + Sync)> = if cli.progress { Some(&progress) } else { None };
            let report = match claim {
                Claim::RhoBound => verify_bound_with_progress(*r, *p, *m_max, *n_max, &vcfg, cb)?,
                Claim::Degree => verify_degree_lemma_with_progress(*r, *m_max, *n_max, &vcfg, cb)?,
                Claim::Shadow => verify_shadow_bound_with_progress(*r, *m_max, *n_max, &vcfg, cb)?,
                Claim::Stanley => stanley_check(*s_max, &vcfg)?,
                Claim::FranklFuredi => frankl_furedi_report(*r, *m_max, &vcfg)?,
            };
            if cli.progress {
                eprintln!(
                    "progress: {} instances, {} failures, {:.2}s",
                    report.instances,
                    report.failures.len(),
                    report.wall_time_secs
                );
            }
            let body = match cli.format {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json() + "\n",
                Format::Text => return Err(Failure::usage("verify supports --format json or csv")),
            };
            Ok(Output {
                body,
                code: verify_status(&report),
            })
        }
        Command::Lemmas {
            which,
            r_min,
            r_max,
            s_max,
            points,
        } => {
            json_only(cli, "lemmas")?;
            let grid = LemmaGrid {
                r_min: *r_min,
                r_max: *r_max,
                s_max: *s_max,
                points: *points,
            };
            let report = check_lemma(&grid, *which)?;
            let code = if report.passed() { 0 } else { EXIT_FAILURES };
            Ok(Output {
                body: pretty(&report),
                code,
            })
        }
    }
}

fn verify_status(report: &VerificationReport) -> u8 {
    if report
        .failures
        .iter()
        .any(|f| f.kind != FailureKind::NonConverged)
    {
        EXIT_FAILURES
    } else if !report.failures.is_empty() {
        EXIT_NONCONVERGED
    } else {
        0
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.body);
            if !out.body.ends_with('\n') {
                println!();
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
