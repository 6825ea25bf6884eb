//! Square lattice: the open 2x2 patch identity
//!
//! ```text
//! (O - eps) . patch = X_top - X_bottom + Y_left - Y_right
//! ```
//!
//! where `X` replaces a horizontal pair of sites (top or bottom row of the
//! patch) and `Y` a vertical pair (left or right column). Summed over all
//! plaquettes of a torus the right-hand side cancels pairwise.
//!
//! Site tensors are `(left, right, up, down, physical)`. The patch sites are
//! numbered row-major: top-left, top-right, bottom-left, bottom-right. `X`
//! has legs `(left, right, up_1, up_2, down_1, down_2, p_1, p_2)` and `Y` has
//! `(up, down, left_1, left_2, right_1, right_2, p_top, p_bottom)`. Compared
//! patches keep every virtual leg open, ordered
//! `(left_top, left_bottom, right_top, right_bottom, up_left, up_right,
//! down_left, down_right, physical)`.

use super::PepsTensor;
use crate::error::{Error, Result};
use crate::localsolve::{LocalOperator, SolveOptions};
use crate::oracle::{apply_on_sites, RingReport};
use crate::tncore::{contract_all, least_squares, pseudo_inverse, rank, Labeled};
use crate::{Matrix, Tensor, Vector, C64, DEFAULT_RANK_TOL};

const ORDER: [&str; 12] = ["lt", "lb", "rt", "rb", "ul", "ur", "dl", "dr", "p_tl", "p_tr", "p_bl", "p_br"];

fn dims(a: &PepsTensor) -> Result<[usize; 5]> {
    let s = a.tensor().shape();
    if s.len() != 5 {
        return Err(Error::Shape(format!("square PEPS tensor must have rank 5, got {s:?}")));
    }
    Ok([s[0], s[1], s[2], s[3], s[4]])
}

fn site(a: &PepsTensor, labels: [&str; 5]) -> Result<Labeled<C64>> {
    Labeled::new(a.tensor().clone(), labels)
}

fn finish(parts: &[Labeled<C64>], a: &PepsTensor) -> Result<Tensor> {
    let [l, r, u, dn, d] = dims(a)?;
    contract_all(parts)?
        .into_order(&ORDER)?
        .reshape(&[l, l, r, r, u, u, dn, dn, d.pow(4)])
}

pub fn x_shape(a: &PepsTensor) -> Result<Vec<usize>> {
    let [l, r, u, dn, d] = dims(a)?;
    Ok(vec![l, r, u, u, dn, dn, d, d])
}

pub fn y_shape(a: &PepsTensor) -> Result<Vec<usize>> {
    let [l, r, u, dn, d] = dims(a)?;
    Ok(vec![u, dn, l, l, r, r, d, d])
}

fn check(t: &Tensor, shape: Vec<usize>, name: &str) -> Result<()> {
    if t.shape() != shape.as_slice() {
        return Err(Error::Shape(format!("{name} has shape {:?}, expected {shape:?}", t.shape())));
    }
    Ok(())
}

/// The open 2x2 patch of `A`.
pub fn patch(a: &PepsTensor) -> Result<Tensor> {
    finish(
        &[
            site(a, ["lt", "ht", "ul", "vl", "p_tl"])?,
            site(a, ["ht", "rt", "ur", "vr", "p_tr"])?,
            site(a, ["lb", "hb", "vl", "dl", "p_bl"])?,
            site(a, ["hb", "rb", "vr", "dr", "p_br"])?,
        ],
        a,
    )
}

pub fn patch_x_top(a: &PepsTensor, x: &Tensor) -> Result<Tensor> {
    check(x, x_shape(a)?, "X")?;
    finish(
        &[
            Labeled::new(x.clone(), ["lt", "rt", "ul", "ur", "vl", "vr", "p_tl", "p_tr"])?,
            site(a, ["lb", "hb", "vl", "dl", "p_bl"])?,
            site(a, ["hb", "rb", "vr", "dr", "p_br"])?,
        ],
        a,
    )
}

pub fn patch_x_bottom(a: &PepsTensor, x: &Tensor) -> Result<Tensor> {
    check(x, x_shape(a)?, "X")?;
    finish(
        &[
            site(a, ["lt", "ht", "ul", "vl", "p_tl"])?,
            site(a, ["ht", "rt", "ur", "vr", "p_tr"])?,
            Labeled::new(x.clone(), ["lb", "rb", "vl", "vr", "dl", "dr", "p_bl", "p_br"])?,
        ],
        a,
    )
}

pub fn patch_y_left(a: &PepsTensor, y: &Tensor) -> Result<Tensor> {
    check(y, y_shape(a)?, "Y")?;
    finish(
        &[
            Labeled::new(y.clone(), ["ul", "dl", "lt", "lb", "ht", "hb", "p_tl", "p_bl"])?,
            site(a, ["ht", "rt", "ur", "vr", "p_tr"])?,
            site(a, ["hb", "rb", "vr", "dr", "p_br"])?,
        ],
        a,
    )
}

pub fn patch_y_right(a: &PepsTensor, y: &Tensor) -> Result<Tensor> {
    check(y, y_shape(a)?, "Y")?;
    finish(
        &[
            site(a, ["lt", "ht", "ul", "vl", "p_tl"])?,
            site(a, ["lb", "hb", "vl", "dl", "p_bl"])?,
            Labeled::new(y.clone(), ["ur", "dr", "ht", "hb", "rt", "rb", "p_tr", "p_br"])?,
        ],
        a,
    )
}

fn apply_phys(o: &Matrix, t: &Tensor) -> Result<Tensor> {
    let s = t.shape().to_vec();
    let p = *s.last().unwrap();
    if o.shape() != (p, p) {
        return Err(Error::Shape(format!("operator of shape {:?} on a patch of {p} physical states", o.shape())));
    }
    let rows = t.len() / p;
    let m = t.reshape(&[rows, p])?.to_matrix(1)? * o.transpose();
    Tensor::from_matrix(&m).reshape(&s)
}

fn rhs(a: &PepsTensor, x: &Tensor, y: &Tensor) -> Result<Tensor> {
    patch_x_top(a, x)?
        .sub(&patch_x_bottom(a, x)?)?
        .add(&patch_y_left(a, y)?)?
        .sub(&patch_y_right(a, y)?)
}

fn check_op(a: &PepsTensor, o: &LocalOperator) -> Result<()> {
    if o.width() != 4 || o.phys() != a.phys_dim() {
        return Err(Error::Shape(format!(
            "plaquette operator must act on 4 sites of dimension {}",
            a.phys_dim()
        )));
    }
    Ok(())
}

/// `||(O - eps) patch - (X_top - X_bottom + Y_left - Y_right)||`.
pub fn plaquette_identity_residual(a: &PepsTensor, o: &LocalOperator, eps: C64, x: &Tensor, y: &Tensor) -> Result<f64> {
    check_op(a, o)?;
    let p = patch(a)?;
    let n = o.matrix().nrows();
    let lhs = apply_phys(&(o.matrix() - Matrix::identity(n, n) * eps), &p)?;
    lhs.distance(&rhs(a, x, y)?)
}

/// Output of [`solve_plaquette`].
#[derive(Clone, Debug)]
pub struct PlaquetteSolution {
    pub x: Tensor,
    pub y: Tensor,
    /// Per plaquette, which is per site on a torus.
    pub epsilon: C64,
    /// Mismatch normalized by `||O patch|| + 1`.
    pub residual: f64,
    pub solvable: bool,
    pub gauge_dim: usize,
}

/// Joint least squares in `(X, Y, eps)`.
pub fn solve_plaquette(a: &PepsTensor, o: &LocalOperator, opts: &SolveOptions) -> Result<PlaquetteSolution> {
    check_op(a, o)?;
    let (xs, ys) = (x_shape(a)?, y_shape(a)?);
    let (nx, ny): (usize, usize) = (xs.iter().product(), ys.iter().product());
    let p = patch(a)?;
    let o_p = apply_phys(o.matrix(), &p)?;
    let rows = p.len();
    let free_eps = opts.epsilon.is_none();
    let mut mat = Matrix::zeros(rows, nx + ny + usize::from(free_eps));
    let unit = |shape: &[usize], k: usize| {
        let mut t = Tensor::zeros(shape);
        t.data_mut()[k] = C64::new(1.0, 0.0);
        t
    };
    for k in 0..nx {
        let e = unit(&xs, k);
        let col = patch_x_top(a, &e)?.sub(&patch_x_bottom(a, &e)?)?;
        mat.set_column(k, &col.to_vector());
    }
    for k in 0..ny {
        let e = unit(&ys, k);
        let col = patch_y_left(a, &e)?.sub(&patch_y_right(a, &e)?)?;
        mat.set_column(nx + k, &col.to_vector());
    }
    let y_vec = match opts.epsilon {
        Some(eps) => o_p.sub(&p.scale(eps))?.to_vector(),
        None => {
            mat.set_column(nx + ny, &p.to_vector());
            o_p.to_vector()
        }
    };
    let gauge_dim = nx + ny - rank(&mat.columns(0, nx + ny).into_owned(), opts.rank_tol);
    let sol = least_squares(&mat, &y_vec, opts.rank_tol)?.solution;
    let x = Tensor::from_vector(&xs, &sol.rows(0, nx).into_owned())?;
    let y = Tensor::from_vector(&ys, &sol.rows(nx, ny).into_owned())?;
    let epsilon = opts.epsilon.unwrap_or_else(|| sol[nx + ny]);
    let residual = plaquette_identity_residual(a, o, epsilon, &x, &y)? / (o_p.norm() + 1.0);
    Ok(PlaquetteSolution {
        x,
        y,
        epsilon,
        residual,
        solvable: residual < opts.tol,
        gauge_dim,
    })
}

/// Plaquette operator satisfying the identity for prescribed `(X, Y, eps)`:
/// `O = eps Id + R V^+` with `V` the patch as a map from its virtual legs.
/// Requires that map to be injective.
pub fn construct_plaquette_operator(a: &PepsTensor, x: &Tensor, y: &Tensor, eps: C64) -> Result<LocalOperator> {
    let p = patch(a)?;
    let phys = *p.shape().last().unwrap();
    let virt = p.len() / phys;
    let as_matrix = |t: &Tensor| -> Result<Matrix> { Ok(t.reshape(&[virt, phys])?.to_matrix(1)?.transpose()) };
    let v = as_matrix(&p)?;
    let r = rank(&v, DEFAULT_RANK_TOL);
    if r < virt {
        return Err(Error::NotInjective {
            length: 2,
            rank: r,
            required: virt,
        });
    }
    let o = Matrix::identity(phys, phys) * eps + as_matrix(&rhs(a, x, y)?)? * pseudo_inverse(&v, DEFAULT_RANK_TOL)?;
    LocalOperator::new(4, a.phys_dim(), o)
}

/// Dense state of the `nx x ny` torus; sites row-major, `(x, y)` at
/// `y * nx + x`, with `y` growing downwards.
pub fn torus_state(a: &PepsTensor, nx: usize, ny: usize) -> Result<Vector> {
    let [l, r, u, dn, d] = dims(a)?;
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument("torus sides must be at least 2".into()));
    }
    if l != r || u != dn {
        return Err(Error::Shape("torus needs matching left/right and up/down bond dimensions".into()));
    }
    let sites = nx * ny;
    let cap = crate::oracle::state_cap();
    let size = (d as f64).powi(sites as i32);
    if size > cap as f64 {
        return Err(Error::SizeCap {
            requested: size.min(usize::MAX as f64) as usize,
            cap,
        });
    }
    let mut parts = Vec::with_capacity(sites);
    for yy in 0..ny {
        for xx in 0..nx {
            parts.push(Labeled::new(
                a.tensor().clone(),
                [
                    format!("h{xx}_{yy}"),
                    format!("h{}_{yy}", (xx + 1) % nx),
                    format!("v{xx}_{yy}"),
                    format!("v{xx}_{}", (yy + 1) % ny),
                    format!("p{xx}_{yy}"),
                ],
            )?);
        }
    }
    let order: Vec<String> = (0..ny).flat_map(|yy| (0..nx).map(move |xx| format!("p{xx}_{yy}"))).collect();
    Ok(contract_all(&parts)?.into_order(&order)?.to_vector())
}

/// Checks `sum_plaquettes O psi = nx ny eps psi` on the torus.
pub fn torus_eigencheck(a: &PepsTensor, o: &LocalOperator, eps: C64, nx: usize, ny: usize, tol: f64) -> Result<RingReport> {
    check_op(a, o)?;
    let psi = torus_state(a, nx, ny)?;
    let dims = vec![a.phys_dim(); nx * ny];
    let mut image = Vector::zeros(psi.len());
    for yy in 0..ny {
        for xx in 0..nx {
            let at = |dx: usize, dy: usize| ((yy + dy) % ny) * nx + (xx + dx) % nx;
            image += apply_on_sites(&psi, &dims, o.matrix(), &[at(0, 0), at(1, 0), at(0, 1), at(1, 1)])?;
        }
    }
    let state_norm = psi.norm();
    if state_norm == 0.0 {
        return Err(Error::InvalidArgument("the torus state vanishes".into()));
    }
    let energy = eps * (nx * ny) as f64;
    let eigen_residual = (image - &psi * energy).norm() / state_norm;
    Ok(RingReport {
        n: nx * ny,
        state_norm,
        eigen_residual,
        passed: eigen_residual < tol,
    })
}

#[cfg(test)]
mod tests {
    use super::super::Lattice;
    use super::*;
    use crate::fixtures::{pauli_z, random_hermitian, random_tensor, seeded};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn zero_state() -> PepsTensor {
        PepsTensor::product(Lattice::Square, &[c(1.0), c(0.0)]).unwrap()
    }

    fn zzzz() -> LocalOperator {
        let z = pauli_z();
        LocalOperator::new(4, 2, z.kronecker(&z).kronecker(&z).kronecker(&z)).unwrap()
    }

    #[test]
    fn frustration_free_product() {
        let a = zero_state();
        let (x, y) = (Tensor::zeros(&x_shape(&a).unwrap()), Tensor::zeros(&y_shape(&a).unwrap()));
        assert!(plaquette_identity_residual(&a, &zzzz(), c(1.0), &x, &y).unwrap() == 0.0);
        let sol = solve_plaquette(&a, &zzzz(), &SolveOptions::default()).unwrap();
        assert!((sol.epsilon - c(1.0)).norm() < 1e-12 && sol.residual < 1e-12);
        assert!(torus_eigencheck(&a, &zzzz(), c(1.0), 3, 3, 1e-13).unwrap().passed);
        // With zero X, Y the residual is the norm of (O - eps) on the patch.
        assert!((plaquette_identity_residual(&a, &zzzz(), c(0.0), &x, &y).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn torus_state_of_product_is_product() {
        let a = PepsTensor::product(Lattice::Square, &[c(0.6), c(0.8)]).unwrap();
        let psi = torus_state(&a, 2, 2).unwrap();
        assert!((psi[0] - c(0.6f64.powi(4))).norm() < 1e-15);
        assert!((psi[15] - c(0.8f64.powi(4))).norm() < 1e-15);
    }

    #[test]
    fn torus_state_matches_ring_for_trivial_vertical_bonds() {
        // With D_up = D_down = 1 each row is an MPS ring.
        let mut rng = seeded(3);
        let t = random_tensor(&mut rng, &[2, 2, 1, 1, 2]);
        let a = PepsTensor::square(t.clone()).unwrap();
        let m = crate::UniformMps::new(t.reshape(&[2, 2, 2]).unwrap().permute(&[0, 2, 1]).unwrap()).unwrap();
        let row = crate::oracle::mps_state(&m, 3).unwrap();
        let want = row.kronecker(&row);
        assert!((torus_state(&a, 3, 2).unwrap() - want).norm() < 1e-12);
    }

    #[test]
    fn roundtrip_with_nonzero_x() {
        let mut rng = seeded(5);
        let a = PepsTensor::product(Lattice::Square, &[c(0.8), C64::new(0.0, 0.6)]).unwrap();
        let x = random_tensor(&mut rng, &x_shape(&a).unwrap());
        let y = Tensor::zeros(&y_shape(&a).unwrap());
        let eps = c(-0.4);
        let o = construct_plaquette_operator(&a, &x, &y, eps).unwrap();
        assert!(plaquette_identity_residual(&a, &o, eps, &x, &y).unwrap() < 1e-12);
        let sol = solve_plaquette(&a, &o, &SolveOptions::default()).unwrap();
        assert!((sol.epsilon - eps).norm() < 1e-10);
        assert!(sol.residual < 1e-10);
        assert!(torus_eigencheck(&a, &o, eps, 3, 3, 1e-10).unwrap().passed);
    }

    #[test]
    fn random_pair_fails() {
        let mut rng = seeded(7);
        let a = PepsTensor::square(random_tensor(&mut rng, &[1, 1, 1, 1, 2])).unwrap();
        let o = LocalOperator::new(4, 2, random_hermitian(&mut rng, 16)).unwrap();
        let sol = solve_plaquette(&a, &o, &SolveOptions::default()).unwrap();
        assert!(sol.residual > 1e-3);
        let rep = torus_eigencheck(&a, &o, sol.epsilon, 3, 3, 1e-4).unwrap();
        assert!(rep.eigen_residual > 1e-4);
    }

    #[test]
    fn gauge_directions_are_null() {
        let mut rng = seeded(9);
        let a = PepsTensor::square(random_tensor(&mut rng, &[2, 2, 2, 2, 2])).unwrap();
        // X equal to the horizontal pair of A cancels between top and bottom.
        let pair = Labeled::new(a.tensor().clone(), ["l", "h", "u1", "d1", "p1"])
            .unwrap()
            .contract(&Labeled::new(a.tensor().clone(), ["h", "r", "u2", "d2", "p2"]).unwrap())
            .unwrap()
            .into_order(&["l", "r", "u1", "u2", "d1", "d2", "p1", "p2"])
            .unwrap();
        let d = patch_x_top(&a, &pair).unwrap().sub(&patch_x_bottom(&a, &pair).unwrap()).unwrap();
        assert!(d.norm() < 1e-12 * pair.norm().powi(2));
        assert!(patch_x_top(&a, &pair).unwrap().distance(&patch(&a).unwrap()).unwrap() < 1e-12 * pair.norm().powi(2));
    }
}
