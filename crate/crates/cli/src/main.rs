//! `skewform`: exterior-calculus engine front end.
//!
//! Operates on a workspace file of DSL statements (charts, forms,
//! connections, metrics, relations) and emits deterministic text or JSON
//! reports. Exit codes: 0 success, 2 input error, 3 internal verification
//! failure.

mod casespec;
mod ops;
mod workspace;

use clap::{Parser, Subcommand};
use ops::{CliError, Context};
use skewform::ZeroConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "skewform", version, about = "symbolic-numeric exterior calculus engine")]
struct Cli {
    /// Workspace file with chart/form/relation declarations
    #[arg(short, long, global = true)]
    file: Option<PathBuf>,

    /// Emit the report as JSON on standard output
    #[arg(long, global = true)]
    json: bool,

    /// Attach finite-difference cross-checks to form and relation reports
    #[arg(long, global = true)]
    verify_numeric: bool,

    /// Seed for the randomized zero-test sampler
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Operations on a named form
    Form {
        #[command(subcommand)]
        op: FormOp,
    },
    /// Operations on a named relation d(psi) = omega
    Relation {
        #[command(subcommand)]
        op: RelationOp,
    },
    /// Geometry reports for a named connection or metric
    Geometry {
        #[command(subcommand)]
        op: GeometryOp,
    },
    /// Structure-table lookup for a (p, k, n) triple
    Classify {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
    },
    /// Bundled case studies driven by a spec file
    Case {
        /// thermo | gas | em | maxwell | hamiltonian
        which: String,
        /// spec file with key = value statements
        specfile: PathBuf,
    },
}

#[derive(Subcommand)]
enum FormOp {
    /// Exterior derivative
    D { name: String },
    /// Closure classification with optional potential recovery
    Closed {
        name: String,
        /// base point as comma-separated rationals, defaults to all ones
        #[arg(long)]
        base: Option<String>,
    },
    /// Radial-homotopy potential
    Potential {
        name: String,
        #[arg(long)]
        base: Option<String>,
    },
    /// Commutator with an optional connection
    Commutator {
        name: String,
        #[arg(long)]
        connection: Option<String>,
    },
    /// Euclidean Hodge dual (interpretation)
    Dual { name: String },
}

#[derive(Subcommand)]
enum RelationOp {
    /// Identical / nonidentical with per-component verdicts
    Classify { name: String },
    /// Frobenius integrability of the right side
    Frobenius { name: String },
    /// Monomial integrating-factor search
    Factor { name: String },
    /// Degenerate-transformation loci of a nonidentical relation
    Loci { name: String },
    /// Restrict onto a locus or along a parametrization and re-classify
    Restrict {
        name: String,
        /// locus clause, e.g. "x = 0"
        #[arg(long)]
        on: Option<String>,
        /// parametrization, e.g. "(t) -> (c*t + k, t)"
        #[arg(long)]
        along: Option<String>,
    },
    /// One degree-descent step of an identical relation
    Descend {
        name: String,
        #[arg(long)]
        base: Option<String>,
    },
}

#[derive(Subcommand)]
enum GeometryOp {
    /// Closure statuses of the metric-form commutators plus components
    Report { name: String },
}

fn load_context(cli: &Cli, needs_file: bool) -> Result<Context, CliError> {
    let workspace = match &cli.file {
        Some(path) => {
            let src = std::fs::read_to_string(path).map_err(|e| {
                CliError::Input(format!("cannot read workspace '{}': {e}", path.display()))
            })?;
            workspace::parse_workspace(&src).map_err(|e| CliError::Input(e.to_string()))?
        }
        None if needs_file => {
            return Err(CliError::Input(
                "this subcommand needs a workspace file (--file)".into(),
            ));
        }
        None => workspace::Workspace::default(),
    };
    let domain = workspace.effective_domain();
    let mut cfg = ZeroConfig::default();
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(Context {
        workspace,
        domain,
        cfg,
        verify_numeric: cli.verify_numeric,
    })
}

fn dispatch(cli: &Cli) -> Result<String, CliError> {
    // classify needs no workspace and has its own compact JSON shape
    if let Cmd::Classify { p, k, n } = &cli.cmd {
        let out = ops::classify(*p, *k, *n)?;
        return Ok(if cli.json {
            serde_json::to_string(&out).expect("classify output serializes")
        } else {
            format!(
                "interaction: {}\npseudostructure_dim: {}\nmetric_dim: {}\n",
                out.interaction, out.pseudostructure_dim, out.metric_dim
            )
        });
    }

    let report = match &cli.cmd {
        Cmd::Form { op } => {
            let ctx = load_context(cli, true)?;
            match op {
                FormOp::D { name } => ops::form_d(&ctx, name)?,
                FormOp::Closed { name, base } => ops::form_closed(&ctx, name, base)?,
                FormOp::Potential { name, base } => ops::form_potential(&ctx, name, base)?,
                FormOp::Commutator { name, connection } => {
                    ops::form_commutator(&ctx, name, connection)?
                }
                FormOp::Dual { name } => ops::form_dual(&ctx, name)?,
            }
        }
        Cmd::Relation { op } => {
            let ctx = load_context(cli, true)?;
            match op {
                RelationOp::Classify { name } => ops::relation_classify(&ctx, name)?,
                RelationOp::Frobenius { name } => ops::relation_frobenius(&ctx, name)?,
                RelationOp::Factor { name } => ops::relation_factor(&ctx, name)?,
                RelationOp::Loci { name } => ops::relation_loci(&ctx, name)?,
                RelationOp::Restrict { name, on, along } => {
                    ops::relation_restrict(&ctx, name, on, along)?
                }
                RelationOp::Descend { name, base } => ops::relation_descend(&ctx, name, base)?,
            }
        }
        Cmd::Geometry { op } => {
            let ctx = load_context(cli, true)?;
            match op {
                GeometryOp::Report { name } => ops::geometry_report(&ctx, name)?,
            }
        }
        Cmd::Case { which, specfile } => {
            let ctx = load_context(cli, false)?;
            let src = std::fs::read_to_string(specfile).map_err(|e| {
                CliError::Input(format!("cannot read spec '{}': {e}", specfile.display()))
            })?;
            ops::run_case(&ctx, which, &src)?
        }
        Cmd::Classify { .. } => unreachable!("handled above"),
    };

    Ok(if cli.json {
        serde_json::to_string(&report).expect("report serializes")
    } else {
        ops::render_text(&report)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // internal invariant violations (e.g. the FORMS_MAX_TERMS cap) panic;
    // report them as verification failures, not crashes
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(&cli)));
    match outcome {
        Ok(Ok(text)) => {
            if cli.json {
                println!("{text}");
            } else {
                print!("{text}");
            }
            ExitCode::SUCCESS
        }
        Ok(Err(e @ CliError::Input(_))) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Ok(Err(e @ CliError::Internal(_))) => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            eprintln!("internal verification failure: {msg}");
            ExitCode::from(3)
        }
    }
}
