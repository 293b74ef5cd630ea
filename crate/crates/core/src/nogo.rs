//! The local-unitary attack on a quantum bit commitment.
//!
//! If the two commitments `|psi0>` and `|psi1>` on `A ⊗ B` leave Bob with
//! the same reduced state, a unitary acting on Alice's side alone maps one to
//! the other. [`cheating_unitary`] builds it.
//!
//! A pure state is stored as its coefficient matrix `M` (`dim_a × dim_b`,
//! row-major amplitudes `psi[i * dim_b + j]`). Bob's marginal is `M^T M*`
//! and a local unitary `U ⊗ I` acts as `M -> U M`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Default tolerance on the trace distance between the two marginals.
pub const DEFAULT_TOL: f64 = 1e-8;

const NORM_TOL: f64 = 1e-10;
const RANK_TOL: f64 = 1e-12;

type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// A normalized state; fails on wrong length or a norm off by more than 1e-10.
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dims(dim_a, dim_b, amplitudes.len())?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    /// Normalize `amplitudes` and build the state.
    pub fn normalized(dim_a: usize, dim_b: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dims(dim_a, dim_b, amplitudes.len())?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    fn from_coefficients(m: &CMatrix) -> Result<Self> {
        let (dim_a, dim_b) = m.shape();
        let amplitudes = (0..dim_a).flat_map(|i| (0..dim_b).map(move |j| m[(i, j)])).collect();
        Self::normalized(dim_a, dim_b, amplitudes)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Coefficient matrix, `dim_a × dim_b`.
    pub fn coefficients(&self) -> CMatrix {
        CMatrix::from_row_slice(self.dim_a, self.dim_b, &self.amplitudes)
    }
}

fn check_dims(dim_a: usize, dim_b: usize, len: usize) -> Result<()> {
    if dim_a == 0 || dim_b == 0 {
        return Err(Error::DimensionMismatch("dimensions must be positive".into()));
    }
    if len != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "{len} amplitudes for a {dim_a} x {dim_b} system"
        )));
    }
    Ok(())
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::DimensionMismatch("density matrix must be square".into()));
        }
        let herm = (&entries - entries.adjoint()).norm();
        if herm > 1e-10 {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:.2e})")));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let min = hermitian_eigen(&entries).0.min();
        if min < -1e-10 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.2e}")));
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = hermitian_eigen(&self.entries).0.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > RANK_TOL).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    entries: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch("unitary must be square".into()));
        }
        let u = Self { entries };
        let defect = u.unitarity_defect();
        if defect > NORM_TOL {
            return Err(Error::InvalidState(format!("not unitary (defect {defect:.2e})")));
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Largest entry of `|U†U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let d = self.entries.adjoint() * &self.entries - CMatrix::identity(n, n);
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Apply `U ⊗ I` to `state`.
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        if state.dim_a != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "unitary of dimension {} on a subsystem of dimension {}",
                self.dim(),
                state.dim_a
            )));
        }
        PureState::from_coefficients(&(&self.entries * state.coefficients()))
    }
}

fn hermitian_eigen(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

/// Bob's reduced state: `rho_B[j, j'] = sum_i psi[i, j] conj(psi[i, j'])`.
pub fn partial_trace_a(state: &PureState) -> Result<DensityMatrix> {
    check_dims(state.dim_a, state.dim_b, state.amplitudes.len())?;
    let m = state.coefficients();
    let rho = m.transpose() * m.map(|z| z.conj());
    Ok(DensityMatrix { entries: rho })
}

/// `|<psi|phi>|`.
pub fn fidelity(psi: &PureState, phi: &PureState) -> Result<f64> {
    if psi.dim_a != phi.dim_a || psi.dim_b != phi.dim_b {
        return Err(Error::DimensionMismatch("states live on different spaces".into()));
    }
    let overlap: Complex64 = psi
        .amplitudes
        .iter()
        .zip(&phi.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(overlap.norm().min(1.0))
}

/// Half the trace norm of `rho - sigma`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch("density matrices of different size".into()));
    }
    let diff = &rho.entries - &sigma.entries;
    Ok(0.5 * hermitian_eigen(&diff).0.iter().map(|l| l.abs()).sum::<f64>())
}

/// Schmidt form `|psi> = sum_k c_k |a_k> ⊗ |b_k>` with `c_k` descending.
#[derive(Debug, Clone)]
pub struct Schmidt {
    pub coefficients: Vec<f64>,
    /// Columns are the `|a_k>`.
    pub a_vectors: CMatrix,
    /// Columns are the `|b_k>`.
    pub b_vectors: CMatrix,
}

pub fn schmidt_decomposition(state: &PureState) -> Schmidt {
    let svd = state.coefficients().svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let k = order.len();
    let mut a = CMatrix::zeros(state.dim_a, k);
    let mut b = CMatrix::zeros(state.dim_b, k);
    for (col, &idx) in order.iter().enumerate() {
        a.set_column(col, &u.column(idx));
        // M = U S V^†, so the B-side vector is the row of V^† read as a column.
        b.set_column(col, &v_t.row(idx).transpose());
    }
    Schmidt {
        coefficients: order.iter().map(|&i| svd.singular_values[i]).collect(),
        a_vectors: a,
        b_vectors: b,
    }
}

/// A unitary `U` on A with `(U ⊗ I)|psi0> = |psi1>` whenever both states
/// leave B in the same reduced state.
///
/// Writes `M1 M0^† = W S V^†` and returns the polar factor `U = W V^†`,
/// which is the unitary maximizing `Re tr(U^† M1 M0^†)`. For equal marginals
/// that maximum is reached with `U M0 = M1`, including for degenerate or
/// rank-deficient Schmidt spectra.
pub fn cheating_unitary(psi0: &PureState, psi1: &PureState, tol: f64) -> Result<UnitaryMatrix> {
    if psi0.dim_a != psi1.dim_a || psi0.dim_b != psi1.dim_b {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} versus {}x{}",
            psi0.dim_a, psi0.dim_b, psi1.dim_a, psi1.dim_b
        )));
    }
    let d = trace_distance(&partial_trace_a(psi0)?, &partial_trace_a(psi1)?)?;
    if d > tol {
        return Err(Error::NotEquallyConcealing { trace_distance: d, tol });
    }
    let c = psi1.coefficients() * psi0.coefficients().adjoint();
    let svd = c.svd(true, true);
    let u = svd.u.expect("requested") * svd.v_t.expect("requested");
    Ok(UnitaryMatrix { entries: u })
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    UnitaryMatrix { entries: q }
}

/// Random density matrix of the given rank, `G G^† / tr` with `G` complex Gaussian.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidParams(format!("rank {rank} must lie in 1..={dim}")));
    }
    let g = ginibre(dim, rank, rng);
    let mut rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho /= Complex64::new(tr, 0.0);
    // Exact Hermitian symmetry.
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(DensityMatrix { entries: rho })
}

/// A purification of `rho` on `C^dim_a ⊗ C^dim(rho)`, randomized by a
/// Haar unitary on A. Fails when `dim_a` is below the rank of `rho`.
pub fn random_purification<R: Rng + ?Sized>(rho: &DensityMatrix, dim_a: usize, rng: &mut R) -> Result<PureState> {
    let dim_b = rho.dim();
    let (values, vectors) = hermitian_eigen(&rho.entries);
    let kept: Vec<usize> = (0..dim_b).filter(|&k| values[k] > RANK_TOL).collect();
    if kept.len() > dim_a {
        return Err(Error::InsufficientAncilla {
            rank: kept.len(),
            dim_a,
        });
    }
    // psi[i, j] = sum_k sqrt(l_k) V[i, k] e_k[j]
    let v = random_unitary(dim_a, rng).entries;
    let mut m = CMatrix::zeros(dim_a, dim_b);
    for (col, &k) in kept.iter().enumerate() {
        let s = values[k].sqrt();
        for i in 0..dim_a {
            for j in 0..dim_b {
                m[(i, j)] += v[(i, col)] * vectors[(j, k)] * s;
            }
        }
    }
    PureState::from_coefficients(&m)
}

/// `(|00> + |11>) / sqrt 2`.
pub fn bell_phi_plus() -> PureState {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    PureState::new(2, 2, vec![s, z, z, s]).expect("normalized")
}

/// `(|01> + |10>) / sqrt 2`.
pub fn bell_psi_plus() -> PureState {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    PureState::new(2, 2, vec![z, s, s, z]).expect("normalized")
}
