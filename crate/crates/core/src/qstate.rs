//! State representations for qubits, qubit pairs and single prime-`d` qudits.
//!
//! [`PureState`] and [`DensityMatrix`] validate their invariants on
//! construction and are immutable afterwards, so every function here is pure.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

use crate::{tolerance, CMatrix, Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A normalised state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: DVector<C64>,
}

impl PureState {
    /// Wraps amplitudes that must already have unit norm.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidDimension(format!(
                "state vector of length {}",
                amps.len()
            )));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tolerance::NORM || !norm_sq.is_finite() {
            return Err(Error::NotAState(format!("squared norm {norm_sq}")));
        }
        Ok(Self {
            amps: DVector::from_vec(amps),
        })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotAState("zero or non-finite vector".into()));
        }
        Self::new(amps.into_iter().map(|a| a / norm).collect())
    }

    /// Computational basis state `|k>` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if dim < 2 || k >= dim {
            return Err(Error::InvalidDimension(format!("basis |{k}> in dim {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[k] = ONE;
        Self::new(amps)
    }

    pub(crate) fn from_vector_unchecked(amps: DVector<C64>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `<self|op|self>`.
    pub fn expectation(&self, op: &CMatrix) -> Result<C64> {
        check_square(op, self.dim())?;
        Ok(self.amps.dotc(&(op * &self.amps)))
    }

    /// Projector `|self><self|`.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            mat: &self.amps * self.amps.adjoint(),
        }
    }

    /// Same ray with the first non-negligible amplitude made real positive.
    pub fn canonical_phase(&self) -> PureState {
        let pivot = self
            .amps
            .iter()
            .find(|a| a.norm() > tolerance::AMPLITUDE_ZERO)
            .copied()
            .unwrap_or(ONE);
        let phase = pivot.conj() / pivot.norm();
        Self::from_vector_unchecked(self.amps.map(|a| a * phase))
    }

    /// `|<self|other>| >= 1 - tol`.
    pub fn same_ray(&self, other: &PureState, tol: f64) -> bool {
        self.inner(other)
            .map(|z| z.norm() >= 1.0 - tol)
            .unwrap_or(false)
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(mat: CMatrix) -> Result<Self> {
        let dim = mat.nrows();
        if dim < 2 || mat.ncols() != dim {
            return Err(Error::InvalidDimension(format!(
                "{}x{} density matrix",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let herm = (&mat - mat.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > tolerance::HERMITIAN {
            return Err(Error::NotAState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tolerance::TRACE || tr.im.abs() > tolerance::TRACE {
            return Err(Error::NotAState(format!("trace {tr}")));
        }
        // Symmetrise before the eigen-solve so round-off cannot leak in.
        let sym = (&mat + mat.adjoint()).map(|z| z * 0.5);
        let min_eig = sym.symmetric_eigenvalues().min();
        if min_eig < tolerance::EIGENVALUE {
            return Err(Error::NotAState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_matrix_unchecked(mat: CMatrix) -> Self {
        Self { mat }
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(format!("dim {dim}")));
        }
        Ok(Self {
            mat: CMatrix::identity(dim, dim).map(|z| z / dim as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// `Tr(op rho)`.
    pub fn expectation(&self, op: &CMatrix) -> Result<C64> {
        check_square(op, self.dim())?;
        // Tr(A B) = sum_ij A_ij B_ji
        let mut acc = ZERO;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += op[(i, j)] * self.mat[(j, i)];
            }
        }
        Ok(acc)
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    /// Convex combination `w_self * self + w_other * other`.
    pub fn mix(&self, w_self: f64, other: &DensityMatrix, w_other: f64) -> Result<DensityMatrix> {
        check_same_dim(self.dim(), other.dim())?;
        if w_self < 0.0 || w_other < 0.0 || (w_self + w_other - 1.0).abs() > tolerance::COEFFICIENTS {
            return Err(Error::InvalidInput(format!(
                "mixture weights {w_self}, {w_other}"
            )));
        }
        Ok(Self {
            mat: self.mat.map(|z| z * w_self) + other.mat.map(|z| z * w_other),
        })
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.mat - &other.mat).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Magnetizations `m_j = Tr(sigma_j rho)` of a qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    m: [f64; 3],
}

impl BlochVector {
    pub fn new(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        let b = Self { m: [m1, m2, m3] };
        if !b.m.iter().all(|x| x.is_finite()) || b.norm() > 1.0 + tolerance::BLOCH_RADIUS {
            return Err(Error::NotAState(format!("Bloch vector {:?} outside the ball", b.m)));
        }
        Ok(b)
    }

    pub fn from_array(m: [f64; 3]) -> Result<Self> {
        Self::new(m[0], m[1], m[2])
    }

    pub fn origin() -> Self {
        Self { m: [0.0; 3] }
    }

    pub fn components(&self) -> [f64; 3] {
        self.m
    }

    pub fn norm(&self) -> f64 {
        self.m.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `sum_j |m_j|`; the polytope level the vector sits on.
    pub fn l1_norm(&self) -> f64 {
        self.m.iter().map(|x| x.abs()).sum()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.m.iter().zip(other.m.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(s * self.m[0], s * self.m[1], s * self.m[2])
    }

    /// `(1 - t) self + t other`, which stays in the ball for `t` in [0, 1].
    pub fn lerp(&self, other: &BlochVector, t: f64) -> BlochVector {
        let mut m = [0.0; 3];
        for (j, mj) in m.iter_mut().enumerate() {
            *mj = (1.0 - t) * self.m[j] + t * other.m[j];
        }
        BlochVector { m }
    }

    pub fn max_abs_diff(&self, other: &BlochVector) -> f64 {
        (0..3).map(|j| (self.m[j] - other.m[j]).abs()).fold(0.0, f64::max)
    }
}

impl std::ops::Neg for BlochVector {
    type Output = BlochVector;

    fn neg(self) -> BlochVector {
        BlochVector {
            m: [-self.m[0], -self.m[1], -self.m[2]],
        }
    }
}

/// Which tensor factor of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Haar-random pure state in dimension `dim`, deterministic in `seed`.
pub fn haar_random_pure(dim: usize, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_random_pure_with(dim, &mut rng)
}

/// Normalised vector of i.i.d. standard complex Gaussians.
pub fn haar_random_pure_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("Haar sampling needs dim >= 2, got {dim}")));
    }
    loop {
        let amps: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return PureState::new(amps.into_iter().map(|a| a / norm).collect());
        }
    }
}

/// Hilbert–Schmidt random density matrix `G G^dagger / Tr(G G^dagger)`.
pub fn random_mixed_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("dim {dim}")));
    }
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    let mut mat = w.map(|z| z / tr);
    hermitize(&mut mat);
    Ok(DensityMatrix::from_matrix_unchecked(mat))
}

/// `m_j = Tr(sigma_j rho)` for a qubit density matrix.
pub fn bloch_from_density(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::InvalidDimension(format!(
            "Bloch vector needs a qubit, got dim {}",
            rho.dim()
        )));
    }
    let r = rho.matrix();
    // Tr(X rho) = r10 + r01, Tr(Y rho) = i (r01 - r10), Tr(Z rho) = r00 - r11
    let m1 = r[(1, 0)] + r[(0, 1)];
    let m2 = C64::i() * (r[(0, 1)] - r[(1, 0)]);
    let m3 = r[(0, 0)] - r[(1, 1)];
    Ok(BlochVector {
        m: [m1.re, m2.re, m3.re],
    })
}

/// `(I + sum_j m_j sigma_j) / 2`.
pub fn density_from_bloch(b: &BlochVector) -> DensityMatrix {
    let [m1, m2, m3] = b.m;
    let mat = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.5 * (1.0 + m3), 0.0),
            C64::new(0.5 * m1, -0.5 * m2),
            C64::new(0.5 * m1, 0.5 * m2),
            C64::new(0.5 * (1.0 - m3), 0.0),
        ],
    );
    DensityMatrix::from_matrix_unchecked(mat)
}

/// Half-angle `gamma` of the T state, `cos(2 gamma) = 1/sqrt(3)`.
pub fn t_state_angle() -> f64 {
    0.5 * (1.0 / 3f64.sqrt()).acos()
}

/// `|T> = cos(g)|0> + e^{i pi/4} sin(g)|1>`, Bloch vector `(1,1,1)/sqrt(3)`.
pub fn t_state() -> PureState {
    let g = t_state_angle();
    PureState::from_vector_unchecked(DVector::from_vec(vec![
        C64::new(g.cos(), 0.0),
        C64::from_polar(g.sin(), FRAC_PI_4),
    ]))
}

/// `|T_perp> = -sin(g)|0> + e^{i pi/4} cos(g)|1>`.
///
/// The sign fixes the relative phase used by [`superpose`] when it builds
/// `cos(theta/2)|T> + e^{i zeta} sin(theta/2)|T_perp>`.
pub fn t_perp_state() -> PureState {
    let g = t_state_angle();
    PureState::from_vector_unchecked(DVector::from_vec(vec![
        C64::new(-g.sin(), 0.0),
        C64::from_polar(g.cos(), FRAC_PI_4),
    ]))
}

/// H-type state with robustness `sqrt(2)`, written in the `{|T>, |T_perp>}`
/// basis. The fourth root of the negative number `sqrt(3) - 2` takes the
/// principal branch.
pub fn h_state() -> PureState {
    let s3 = 3f64.sqrt();
    let (sp, cp) = (FRAC_PI_8.sin(), FRAC_PI_8.cos());
    let root = C64::new(s3 - 2.0, 0.0).powf(0.25);
    let alpha = root * (6f64.powf(-0.25) * sp) + C64::new((s3 + 3.0).sqrt() / 6f64.sqrt() * cp, 0.0);
    let beta = (C64::new(-(18.0 - 6.0 * s3).sqrt() * cp, 0.0)
        + C64::new(1.0, 1.0) * ((3.0 * s3 + 9.0).sqrt() * sp))
        / 6.0;
    let t = t_state();
    let tp = t_perp_state();
    let amps = t.amps.map(|a| a * alpha) + tp.amps.map(|a| a * beta);
    PureState::normalized(amps.iter().copied().collect()).expect("H state is non-zero")
}

/// Stabilizer labels accepted by [`named_stabilizer_state`].
pub const STABILIZER_LABELS: [&str; 6] = ["0", "1", "+", "-", "+i", "-i"];

/// Single-qubit Pauli eigenstates by label (`0`, `1`, `+`, `-`, `+i`, `-i`,
/// or the words `zero`, `one`, `plus`, `minus`, `plusi`, `minusi`).
pub fn named_stabilizer_state(label: &str) -> Option<PureState> {
    let h = FRAC_1_SQRT_2;
    let amps = match label {
        "0" | "zero" => [ONE, ZERO],
        "1" | "one" => [ZERO, ONE],
        "+" | "plus" => [C64::new(h, 0.0), C64::new(h, 0.0)],
        "-" | "minus" => [C64::new(h, 0.0), C64::new(-h, 0.0)],
        "+i" | "plusi" => [C64::new(h, 0.0), C64::new(0.0, h)],
        "-i" | "minusi" => [C64::new(h, 0.0), C64::new(0.0, -h)],
        _ => return None,
    };
    Some(PureState::from_vector_unchecked(DVector::from_vec(amps.to_vec())))
}

/// `cos(theta/2)|psi> + e^{i zeta} sin(theta/2)|psi_perp>`.
pub fn superpose(psi: &PureState, psi_perp: &PureState, theta: f64, zeta: f64) -> Result<PureState> {
    let overlap = psi.inner(psi_perp)?.norm();
    if overlap > tolerance::ORTHOGONAL {
        return Err(Error::InvalidBasis(overlap));
    }
    let a = C64::new((0.5 * theta).cos(), 0.0);
    let b = C64::from_polar((0.5 * theta).sin(), zeta);
    let amps = psi.amps.map(|x| x * a) + psi_perp.amps.map(|x| x * b);
    // Orthogonality leaves the norm within round-off of 1; renormalise anyway.
    PureState::normalized(amps.iter().copied().collect())
}

/// Inverse of [`superpose`]: the `(theta, zeta)` with
/// `phi = e^{i chi} (cos(theta/2)|psi> + e^{i zeta} sin(theta/2)|psi_perp>)`.
pub fn basis_angles(phi: &PureState, psi: &PureState, psi_perp: &PureState) -> Result<(f64, f64)> {
    let overlap = psi.inner(psi_perp)?.norm();
    if overlap > tolerance::ORTHOGONAL {
        return Err(Error::InvalidBasis(overlap));
    }
    let a = psi.inner(phi)?;
    let b = psi_perp.inner(phi)?;
    let theta = 2.0 * b.norm().atan2(a.norm());
    let zeta = if b.norm() < tolerance::AMPLITUDE_ZERO || a.norm() < tolerance::AMPLITUDE_ZERO {
        0.0
    } else {
        (b.arg() - a.arg()).rem_euclid(std::f64::consts::TAU)
    };
    Ok((theta, zeta))
}

/// Kronecker product of pure states.
pub fn tensor_pure(a: &PureState, b: &PureState) -> PureState {
    PureState::from_vector_unchecked(a.amps.kronecker(&b.amps))
}

/// Kronecker product of density matrices.
pub fn tensor_density(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_matrix_unchecked(a.mat.kronecker(&b.mat))
}

/// Reduced state of one factor of a `dims[0] x dims[1]` bipartite system.
pub fn partial_trace(rho: &DensityMatrix, dims: [usize; 2], keep: Subsystem) -> Result<DensityMatrix> {
    let [da, db] = dims;
    if da < 2 || db < 2 || da * db != rho.dim() {
        return Err(Error::InvalidDimension(format!(
            "cannot split dim {} as {da} x {db}",
            rho.dim()
        )));
    }
    let r = rho.matrix();
    let mat = match keep {
        Subsystem::First => CMatrix::from_fn(da, da, |i, k| {
            (0..db).map(|j| r[(i * db + j, k * db + j)]).sum()
        }),
        Subsystem::Second => CMatrix::from_fn(db, db, |j, l| {
            (0..da).map(|i| r[(i * db + j, i * db + l)]).sum()
        }),
    };
    Ok(DensityMatrix::from_matrix_unchecked(mat))
}

/// Reduced state of a pure bipartite state without forming the projector.
pub fn reduce_pure(psi: &PureState, dims: [usize; 2], keep: Subsystem) -> Result<DensityMatrix> {
    let [da, db] = dims;
    if da < 2 || db < 2 || da * db != psi.dim() {
        return Err(Error::InvalidDimension(format!(
            "cannot split dim {} as {da} x {db}",
            psi.dim()
        )));
    }
    let v = &psi.amps;
    let mat = match keep {
        Subsystem::First => CMatrix::from_fn(da, da, |i, k| {
            (0..db).map(|j| v[i * db + j] * v[k * db + j].conj()).sum()
        }),
        Subsystem::Second => CMatrix::from_fn(db, db, |j, l| {
            (0..da).map(|i| v[i * db + j] * v[i * db + l].conj()).sum()
        }),
    };
    Ok(DensityMatrix::from_matrix_unchecked(mat))
}

/// `U |psi>`. Unitarity is the caller's responsibility.
pub fn apply_unitary(u: &CMatrix, psi: &PureState) -> Result<PureState> {
    check_square(u, psi.dim())?;
    let out = u * &psi.amps;
    // Re-normalise away accumulated round-off of a near-unitary U.
    let norm = out.norm();
    Ok(PureState::from_vector_unchecked(out / C64::new(norm, 0.0)))
}

/// `U rho U^dagger`.
pub fn apply_unitary_density(u: &CMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_square(u, rho.dim())?;
    let mut mat = u * &rho.mat * u.adjoint();
    hermitize(&mut mat);
    Ok(DensityMatrix::from_matrix_unchecked(mat))
}

/// `<psi|rho|psi>`, clamped to [0, 1].
pub fn fidelity_pure_mixed(psi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    check_same_dim(psi.dim(), rho.dim())?;
    let f = psi.amps.dotc(&(&rho.mat * &psi.amps)).re;
    Ok(f.clamp(0.0, 1.0))
}

/// Max entry of `|U^dagger U - I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn hermitize(mat: &mut CMatrix) {
    let sym = (&*mat + mat.adjoint()).map(|z| z * 0.5);
    *mat = sym;
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidDimension(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

fn check_square(op: &CMatrix, dim: usize) -> Result<()> {
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::InvalidDimension(format!(
            "{}x{} operator on dim {dim}",
            op.nrows(),
            op.ncols()
        )));
    }
    Ok(())
}
