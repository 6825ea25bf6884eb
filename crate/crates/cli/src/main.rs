//! `eigenlocal` command-line front end. Every command prints a JSON report on
//! stdout; errors go to stderr with a distinguishing exit code.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use eigenlocal::{SolveOptions, C64, DEFAULT_RANK_TOL, DEFAULT_SOLVE_TOL};
use serde_json::json;

use commands::{HexArgs, SymmetryKind};
use io::parse_complex;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot infer operator width: {0}")]
    Inference(String),
    #[error("size cap exceeded: {0} (raise EIGENLOCAL_MAX_STATE to allow larger rings)")]
    Cap(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Inference(_) => 4,
            CliError::Cap(_) => 5,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "eigenlocal", version, about = "Local eigenstate certificates for matrix product states")]
struct Cli {
    /// Solvability / pass threshold on normalized residuals.
    #[arg(long, global = true, default_value_t = DEFAULT_SOLVE_TOL)]
    tol: f64,

    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,

    /// Seed for randomly generated fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Where to write the produced tensor (solve: B, zerosum: Q, roundtrip:
    /// O, xxz: the MPO) or, for other commands, a copy of the report.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// Pinned `eps`, or `None` to solve for it.
#[derive(Clone, Copy, Debug)]
struct Epsilon(Option<C64>);

/// `auto` or a complex number such as `0.7`, `-0.5+0.1i` or `0.3,-1`.
fn parse_epsilon(s: &str) -> Result<Epsilon, String> {
    if s.eq_ignore_ascii_case("auto") {
        Ok(Epsilon(None))
    } else {
        parse_complex(s).map(|z| Epsilon(Some(z)))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transfer matrix, injectivity and fixed points of an MPS tensor.
    Analyze {
        mps: PathBuf,
        #[arg(long)]
        lmax: Option<usize>,
    },
    /// Solve the local identity for (B, eps).
    Solve {
        mps: PathBuf,
        op: PathBuf,
        #[arg(long, default_value = "auto", value_parser = parse_epsilon, allow_hyphen_values = true)]
        epsilon: Epsilon,
    },
    /// Dense check of O_N psi = N eps psi on a ring.
    Verify {
        mps: PathBuf,
        op: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        epsilon: C64,
        #[arg(long)]
        n: usize,
    },
    /// Random (A, B, eps) -> O -> solve -> dense check.
    Roundtrip {
        #[arg(long, default_value_t = 2)]
        bond: usize,
        #[arg(long, default_value_t = 5)]
        phys: usize,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Quantum-group MPO symmetry of the XXZ chain.
    Xxz {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        delta: C64,
        #[arg(long, default_value_t = 2)]
        n_rep: usize,
        #[arg(long, default_value_t = 6)]
        n_sites: usize,
    },
    /// Decompose a two-site operator as Q (x) Id - Id (x) Q.
    Zerosum {
        op: PathBuf,
        /// Site dimension; inferred from the matrix size by default.
        #[arg(long)]
        phys: Option<usize>,
    },
    /// Steady-state check of an MPDO under a local Lindbladian.
    Lindblad {
        mpo: PathBuf,
        /// Superoperator on fused (out, in) sites.
        #[arg(long, conflicts_with = "hamiltonian")]
        lsuper: Option<PathBuf>,
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
        #[arg(long = "jump")]
        jumps: Vec<PathBuf>,
    },
    /// MPO symmetry, or weak/strong symmetry of an MPDO.
    Symmetry {
        mpo: PathBuf,
        op: PathBuf,
        #[arg(long, value_enum, default_value = "mpo")]
        kind: SymmetryKind,
        /// Also compute the dense commutator on this many sites (mpo kind).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Local check that dA generates the Schrodinger evolution of A under h.
    Schrodinger {
        mps: PathBuf,
        da: PathBuf,
        h: PathBuf,
        /// Also run the finite-difference ring check on this many sites.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1e-5)]
        dt: f64,
    },
    /// Solve the 2x2 plaquette identity for (X, Y, eps).
    PepsSolve {
        peps: PathBuf,
        op: PathBuf,
        #[arg(long, default_value = "auto", value_parser = parse_epsilon, allow_hyphen_values = true)]
        epsilon: Epsilon,
    },
    /// Dense torus check for a square-lattice PEPS.
    PepsVerify {
        peps: PathBuf,
        op: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        epsilon: C64,
        #[arg(long, default_value_t = 3)]
        nx: usize,
        #[arg(long, default_value_t = 3)]
        ny: usize,
    },
    /// Hexagonal-lattice sufficient condition, optionally with a torus check.
    HexCheck {
        a1: PathBuf,
        a2: PathBuf,
        op: PathBuf,
        r_tensor: PathBuf,
        b_tensor: PathBuf,
        #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
        r: Vec<C64>,
        #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
        b: Vec<C64>,
        #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
        epsilon: C64,
        /// Torus size in unit cells, e.g. `--torus 2,2`.
        #[arg(long, value_delimiter = ',')]
        torus: Option<Vec<usize>>,
    },
}

fn coeffs(v: &[C64], name: &str) -> Result<[C64; 3], CliError> {
    <[C64; 3]>::try_from(v).map_err(|_| CliError::Input(format!("--{name} needs three coefficients")))
}

fn run(cli: &Cli) -> Result<commands::Report, CliError> {
    let mut opts = SolveOptions {
        tol: cli.tol,
        rank_tol: cli.rank_tol,
        ..SolveOptions::default()
    };
    if !(opts.tol > 0.0 && opts.rank_tol > 0.0) {
        return Err(CliError::Input("tolerances must be positive".into()));
    }
    match &cli.command {
        Command::Analyze { mps, lmax } => commands::analyze(mps, *lmax, &opts),
        Command::Solve { mps, op, epsilon } => {
            opts.epsilon = epsilon.0;
            commands::solve_cmd(mps, op, &opts)
        }
        Command::Verify { mps, op, epsilon, n } => commands::verify(mps, op, *epsilon, *n, &opts),
        Command::Roundtrip { bond, phys, n } => commands::roundtrip(*bond, *phys, *n, cli.seed, &opts),
        Command::Xxz { delta, n_rep, n_sites } => commands::xxz(*delta, *n_rep, *n_sites, &opts),
        Command::Zerosum { op, phys } => commands::zerosum(op, *phys, &opts),
        Command::Lindblad {
            mpo,
            lsuper,
            hamiltonian,
            jumps,
        } => commands::lindblad(mpo, lsuper.as_deref(), hamiltonian.as_deref(), jumps, &opts),
        Command::Symmetry { mpo, op, kind, n } => commands::symmetry(mpo, op, *kind, *n, &opts),
        Command::Schrodinger { mps, da, h, n, dt } => commands::schrodinger(mps, da, h, *n, *dt, &opts),
        Command::PepsSolve { peps, op, epsilon } => {
            opts.epsilon = epsilon.0;
            commands::peps_solve(peps, op, &opts)
        }
        Command::PepsVerify {
            peps,
            op,
            epsilon,
            nx,
            ny,
        } => commands::peps_verify(peps, op, *epsilon, *nx, *ny, &opts),
        Command::HexCheck {
            a1,
            a2,
            op,
            r_tensor,
            b_tensor,
            r,
            b,
            epsilon,
            torus,
        } => {
            let args = HexArgs {
                a1,
                a2,
                op,
                r_tensor,
                b_tensor,
                r: coeffs(r, "r")?,
                b: coeffs(b, "b")?,
                eps: *epsilon,
                torus: match torus.as_deref() {
                    None => None,
                    Some(&[x, y]) => Some((x, y)),
                    Some(_) => return Err(CliError::Input("--torus needs two sizes, e.g. 2,2".into())),
                },
            };
            commands::hex_check(&args, &opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = run(&cli).and_then(|report| {
        let doc = json!({
            "command": report.command,
            "inputs": report.inputs,
            "results": report.results,
            "tolerances": report.tolerances,
            "wall_time_s": start.elapsed().as_secs_f64(),
        });
        if let Some(path) = &cli.json_out {
            match &report.artifact {
                Some(t) => io::write_json(path, t)?,
                None => io::write_json(path, &doc)?,
            }
        }
        println!("{}", io::to_json(&doc));
        Ok(())
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eigenlocal: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
