use std::path::Path;

use eigenlocal::apps::{
    build_xxz_mpo_solution, lindblad_steady_solve, lindblad_superoperator, mpo_symmetry_solve, qdeform_params,
    quantum_plane_check, schrodinger_oracle, schrodinger_residual, strong_symmetry_operator, symmetry_solve,
    weak_symmetry_operator, xxz_component_residuals, xxz_hamiltonian, zero_sum_decompose,
};
use eigenlocal::fixtures::{gaussian, random_mps, random_tensor, seeded};
use eigenlocal::localsolve::{gauge_distance, solve};
use eigenlocal::oracle::{commutator_check, construct_operator, eigencheck};
use eigenlocal::peps2d::{hex_sufficient_check, hex_torus_eigencheck, solve_plaquette, torus_eigencheck, PepsTensor};
use eigenlocal::{Error, LocalOperator, Matrix, SolveOptions, TelescopicSolution, Tensor, UniformMps, C64};
use serde_json::{json, Value};

use crate::io::{as_operator_matrix, complex, load, Loaded, TensorFile};
use crate::CliError;

/// Everything a command produces except the wall time.
pub struct Report {
    pub command: &'static str,
    pub inputs: Vec<Value>,
    pub results: Value,
    pub tolerances: Value,
    /// Tensor written by `--json-out` instead of the report, where a command
    /// has one.
    pub artifact: Option<TensorFile>,
}

impl Report {
    fn new(command: &'static str, inputs: &[&Loaded], results: Value, opts: &SolveOptions) -> Self {
        Self {
            command,
            inputs: inputs.iter().map(|l| l.input_record()).collect(),
            results,
            tolerances: json!({ "tol": opts.tol, "rank_tol": opts.rank_tol }),
            artifact: None,
        }
    }

    fn with_artifact(mut self, t: TensorFile) -> Self {
        self.artifact = Some(t);
        self
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SizeCap { .. } => CliError::Cap(e.to_string()),
            Error::NoConvergence { .. }
            | Error::DegenerateSpectrum { .. }
            | Error::NotInjective { .. }
            | Error::EmptyMatrix => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn mps(l: &Loaded) -> Result<UniformMps, CliError> {
    if l.tensor.rank() != 3 {
        return Err(CliError::Input(format!(
            "{}: MPS tensor must have rank 3 (left, physical, right), got shape {:?}",
            l.path.display(),
            l.tensor.shape()
        )));
    }
    Ok(UniformMps::new(l.tensor.clone())?)
}

fn mpo(l: &Loaded) -> Result<Tensor, CliError> {
    let s = l.tensor.shape();
    if s.len() != 4 || s[1] != s[2] {
        return Err(CliError::Input(format!(
            "{}: MPO tensor must have shape (D, d, d, D'), got {s:?}",
            l.path.display()
        )));
    }
    Ok(l.tensor.clone())
}

/// Operator on sites of dimension `phys`, its width read off the matrix size.
fn operator(l: &Loaded, phys: usize) -> Result<LocalOperator, CliError> {
    let m = as_operator_matrix(&l.tensor)?;
    LocalOperator::infer(phys, m).map_err(|e| CliError::Inference(format!("{}: {e}", l.path.display())))
}

fn two_site_phys(l: &Loaded) -> Result<usize, CliError> {
    let n = as_operator_matrix(&l.tensor)?.nrows();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n || d < 2 {
        return Err(CliError::Inference(format!(
            "{}: size {n} is not d^2 for a two-site operator",
            l.path.display()
        )));
    }
    Ok(d)
}

fn telescopic(sol: &TelescopicSolution) -> Value {
    json!({
        "epsilon": complex(sol.epsilon),
        "residual": sol.residual,
        "gauge_dim": sol.gauge_dim,
        "solvable": sol.solvable,
        "width": sol.width,
        "b_norm": sol.b.norm(),
        "warnings": sol.warnings,
    })
}

pub fn analyze(path: &Path, l_max: Option<usize>, opts: &SolveOptions) -> Result<Report, CliError> {
    let file = load(path)?;
    let m = mps(&file)?;
    let inj = m.injectivity_length(l_max);
    let radius = m.spectral_radius()?;
    let fixed = match m.normalize()?.fixed_points() {
        Ok(fp) => {
            let normalized = m.normalize()?;
            let (right, left) = fp.residuals(&normalized);
            let (min_left, min_right) = fp.min_eigenvalues();
            json!({
                "residual_right": right,
                "residual_left": left,
                "overlap": complex(fp.overlap()),
                "min_eigenvalue_left": min_left,
                "min_eigenvalue_right": min_right,
                "positive_definite": min_left > opts.rank_tol && min_right > opts.rank_tol,
            })
        }
        // Non-injective inputs are a valid answer; report why instead of failing.
        Err(e @ Error::DegenerateSpectrum { .. }) => json!({ "error": e.to_string() }),
        Err(e) => return Err(e.into()),
    };
    let results = json!({
        "bond_dim": m.bond_dim(),
        "phys_dim": m.phys_dim(),
        "spectral_radius": radius,
        "injective": inj.injective,
        "injectivity_length": inj.length,
        "ranks": inj.ranks,
        "l_max": l_max.unwrap_or_else(|| m.default_l_max()),
        "fixed_points": fixed,
    });
    Ok(Report::new("analyze", &[&file], results, opts))
}

pub fn solve_cmd(mps_path: &Path, op_path: &Path, opts: &SolveOptions) -> Result<Report, CliError> {
    let (mf, of) = (load(mps_path)?, load(op_path)?);
    let m = mps(&mf)?;
    let o = operator(&of, m.phys_dim())?;
    let sol = solve(&m, &o, opts)?;
    let b = TensorFile::from_tensor(&sol.b);
    Ok(Report::new("solve", &[&mf, &of], telescopic(&sol), opts).with_artifact(b))
}

pub fn verify(mps_path: &Path, op_path: &Path, eps: C64, n: usize, opts: &SolveOptions) -> Result<Report, CliError> {
    let (mf, of) = (load(mps_path)?, load(op_path)?);
    let m = mps(&mf)?;
    let o = operator(&of, m.phys_dim())?;
    let rep = eigencheck(&m, &o, eps, n, opts.tol)?;
    let results = json!({
        "n": n,
        "epsilon": complex(eps),
        "energy": complex(eps * n as f64),
        "state_norm": rep.state_norm,
        "eigen_residual": rep.eigen_residual,
        "passed": rep.passed,
    });
    Ok(Report::new("verify", &[&mf, &of], results, opts))
}

pub fn roundtrip(bond: usize, phys: usize, n: usize, seed: u64, opts: &SolveOptions) -> Result<Report, CliError> {
    let mut rng = seeded(seed);
    let m = random_mps(&mut rng, bond, phys);
    let b = random_tensor(&mut rng, &[bond, phys, bond]);
    let eps = gaussian(&mut rng);
    let o = construct_operator(&m, &b, eps)?;
    let sol = solve(&m, &o, opts)?;
    let ring = eigencheck(&m, &o, sol.epsilon, n, opts.tol)?;
    let results = json!({
        "seed": seed,
        "bond_dim": bond,
        "phys_dim": phys,
        "epsilon_true": complex(eps),
        "solve": telescopic(&sol),
        "epsilon_error": (sol.epsilon - eps).norm(),
        "gauge_distance": gauge_distance(&m, &sol.b, &b)?,
        "n": n,
        "eigen_residual": ring.eigen_residual,
        "passed": sol.solvable && ring.passed,
    });
    Ok(Report::new("roundtrip", &[], results, opts).with_artifact(TensorFile::from_matrix(o.matrix())))
}

pub fn xxz(delta: C64, n_rep: usize, n_sites: usize, opts: &SolveOptions) -> Result<Report, CliError> {
    let (q, lambda) = qdeform_params(delta);
    let (t, bt) = build_xxz_mpo_solution(n_rep, q)?;
    let comps = xxz_component_residuals(&t, &bt, delta)?;
    let plane = quantum_plane_check(&t, q);
    let comm = commutator_check(&xxz_hamiltonian(delta), &t.to_tensor(), n_sites)?;
    let max = |xs: &[f64]| xs.iter().copied().fold(0.0, f64::max);
    let results = json!({
        "delta": complex(delta),
        "q": complex(q),
        "lambda": complex(lambda),
        "n_rep": n_rep,
        "component_residuals": comps.to_vec(),
        "max_component_residual": max(&comps),
        "quantum_plane_residuals": plane.to_vec(),
        "max_quantum_plane_residual": max(&plane),
        "n_sites": n_sites,
        "commutator": comm,
        "passed": max(&comps) < opts.tol && comm < opts.tol,
    });
    Ok(Report::new("xxz", &[], results, opts).with_artifact(TensorFile::from_tensor(&t.to_tensor())))
}

pub fn zerosum(op_path: &Path, phys: Option<usize>, opts: &SolveOptions) -> Result<Report, CliError> {
    let of = load(op_path)?;
    let d = match phys {
        Some(d) => d,
        None => two_site_phys(&of)?,
    };
    let o = operator(&of, d)?;
    let zs = zero_sum_decompose(&o, opts)?;
    let results = json!({
        "residual": zs.residual,
        "solvable": zs.solvable,
        "q": TensorFile::from_matrix(&zs.q),
    });
    Ok(Report::new("zerosum", &[&of], results, opts).with_artifact(TensorFile::from_matrix(&zs.q)))
}

pub fn lindblad(
    mpo_path: &Path,
    lsuper: Option<&Path>,
    hamiltonian: Option<&Path>,
    jumps: &[std::path::PathBuf],
    opts: &SolveOptions,
) -> Result<Report, CliError> {
    let mf = load(mpo_path)?;
    let t = mpo(&mf)?;
    let d = t.shape()[1];
    let mut files = vec![mf];
    let l = match (lsuper, hamiltonian) {
        (Some(p), None) if jumps.is_empty() => {
            let lf = load(p)?;
            let l = operator(&lf, d * d)?;
            files.push(lf);
            l
        }
        (None, Some(p)) => {
            let hf = load(p)?;
            let h = operator(&hf, d)?;
            files.push(hf);
            let mut ls = Vec::new();
            for j in jumps {
                let jf = load(j)?;
                ls.push(operator(&jf, d)?);
                files.push(jf);
            }
            lindblad_superoperator(&h, &ls)?
        }
        _ => {
            return Err(CliError::Input(
                "give either --lsuper, or --hamiltonian with optional --jump operators".into(),
            ))
        }
    };
    let sol = lindblad_steady_solve(&l, &t, opts)?;
    let refs: Vec<&Loaded> = files.iter().collect();
    Ok(Report::new("lindblad", &refs, telescopic(&sol), opts))
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum SymmetryKind {
    /// `[H, O] = 0` for an MPO `O`; the operator file is the Hamiltonian density.
    Mpo,
    /// `G rho - rho G = 0`; the operator file is the generator density.
    Weak,
    /// `G rho = 0`.
    Strong,
}

pub fn symmetry(
    mpo_path: &Path,
    op_path: &Path,
    kind: SymmetryKind,
    n: Option<usize>,
    opts: &SolveOptions,
) -> Result<Report, CliError> {
    let (mf, of) = (load(mpo_path)?, load(op_path)?);
    let t = mpo(&mf)?;
    let g = operator(&of, t.shape()[1])?;
    let sol = match kind {
        SymmetryKind::Mpo => mpo_symmetry_solve(&t, &g, opts)?,
        SymmetryKind::Weak => symmetry_solve(&weak_symmetry_operator(&g), &t, opts)?,
        SymmetryKind::Strong => symmetry_solve(&strong_symmetry_operator(&g), &t, opts)?,
    };
    let mut results = telescopic(&sol);
    if let (SymmetryKind::Mpo, Some(n)) = (kind, n) {
        results["n"] = json!(n);
        results["commutator"] = json!(commutator_check(&g, &t, n)?);
    }
    Ok(Report::new("symmetry", &[&mf, &of], results, opts))
}

pub fn schrodinger(
    mps_path: &Path,
    da_path: &Path,
    h_path: &Path,
    n: Option<usize>,
    dt: f64,
    opts: &SolveOptions,
) -> Result<Report, CliError> {
    let (mf, df, hf) = (load(mps_path)?, load(da_path)?, load(h_path)?);
    let m = mps(&mf)?;
    let h = operator(&hf, m.phys_dim())?;
    let sol = schrodinger_residual(&m, &df.tensor, &h, opts)?;
    let mut results = telescopic(&sol);
    if let Some(n) = n {
        results["n"] = json!(n);
        results["dense_residual"] = json!(schrodinger_oracle(&m, &df.tensor, &h, n, dt)?);
        results["dt"] = json!(dt);
    }
    Ok(Report::new("schrodinger", &[&mf, &df, &hf], results, opts))
}

fn square_peps(l: &Loaded) -> Result<PepsTensor, CliError> {
    PepsTensor::square(l.tensor.clone()).map_err(|e| CliError::Input(format!("{}: {e}", l.path.display())))
}

fn hex_peps(l: &Loaded) -> Result<PepsTensor, CliError> {
    PepsTensor::hex(l.tensor.clone()).map_err(|e| CliError::Input(format!("{}: {e}", l.path.display())))
}

pub fn peps_solve(peps_path: &Path, op_path: &Path, opts: &SolveOptions) -> Result<Report, CliError> {
    let (pf, of) = (load(peps_path)?, load(op_path)?);
    let a = square_peps(&pf)?;
    let o = operator(&of, a.phys_dim())?;
    let sol = solve_plaquette(&a, &o, opts)?;
    let results = json!({
        "epsilon": complex(sol.epsilon),
        "residual": sol.residual,
        "solvable": sol.solvable,
        "gauge_dim": sol.gauge_dim,
        "x": TensorFile::from_tensor(&sol.x),
        "y": TensorFile::from_tensor(&sol.y),
    });
    Ok(Report::new("peps-solve", &[&pf, &of], results, opts))
}

pub fn peps_verify(
    peps_path: &Path,
    op_path: &Path,
    eps: C64,
    nx: usize,
    ny: usize,
    opts: &SolveOptions,
) -> Result<Report, CliError> {
    let (pf, of) = (load(peps_path)?, load(op_path)?);
    let a = square_peps(&pf)?;
    let o = operator(&of, a.phys_dim())?;
    let rep = torus_eigencheck(&a, &o, eps, nx, ny, opts.tol)?;
    let results = json!({
        "nx": nx,
        "ny": ny,
        "epsilon": complex(eps),
        "eigen_residual": rep.eigen_residual,
        "state_norm": rep.state_norm,
        "passed": rep.passed,
    });
    Ok(Report::new("peps-verify", &[&pf, &of], results, opts))
}

pub struct HexArgs<'a> {
    pub a1: &'a Path,
    pub a2: &'a Path,
    pub op: &'a Path,
    pub r_tensor: &'a Path,
    pub b_tensor: &'a Path,
    pub r: [C64; 3],
    pub b: [C64; 3],
    pub eps: C64,
    pub torus: Option<(usize, usize)>,
}

pub fn hex_check(args: &HexArgs<'_>, opts: &SolveOptions) -> Result<Report, CliError> {
    let files = [args.a1, args.a2, args.op, args.r_tensor, args.b_tensor]
        .into_iter()
        .map(load)
        .collect::<Result<Vec<_>, _>>()?;
    let (a1, a2) = (hex_peps(&files[0])?, hex_peps(&files[1])?);
    let (rt, bt) = (hex_peps(&files[3])?, hex_peps(&files[4])?);
    let o = operator(&files[2], a1.phys_dim())?;
    let n = o.matrix().nrows();
    let h = LocalOperator::new(2, a1.phys_dim(), o.matrix() - Matrix::identity(n, n) * args.eps)?;
    let rep = hex_sufficient_check(&a1, &a2, &h, &rt, &bt, args.r, args.b)?;
    let mut results = json!({
        "epsilon": complex(args.eps),
        "identity_residuals": rep.identities.to_vec(),
        "r_sum": rep.r_sum,
        "b_sum": rep.b_sum,
        "max_residual": rep.max_residual(),
        "certified": rep.certified(opts.tol),
    });
    if let Some((lx, ly)) = args.torus {
        let ring = hex_torus_eigencheck(&a1, &a2, &o, args.eps, lx, ly, opts.tol)?;
        results["torus"] = json!({
            "lx": lx,
            "ly": ly,
            "sites": ring.n,
            "eigen_residual": ring.eigen_residual,
            "passed": ring.passed,
        });
    }
    let refs: Vec<&Loaded> = files.iter().collect();
    Ok(Report::new("hex-check", &refs, results, opts))
}
