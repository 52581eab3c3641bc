//! Fifteen-angle chart of two-qubit unitaries,
//! `U = (U3 (x) U4) . exp[i(a XX + b YY + d ZZ)] . (U1 (x) U2)`,
//! each local factor in Z–Y–Z Euler angles.

use serde::{Deserialize, Serialize};

use crate::{CMatrix, Error, Result, C64};

/// Fixed-size 4x4 complex matrix, row-major.
pub(crate) type M4 = [[C64; 4]; 4];
type M2 = [[C64; 2]; 2];

/// Angles for [`build_unitary`]. `su2_angles[k]` is `(kappa, lambda, nu)` of `U(k+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitaryParams15 {
    pub su2_angles: [[f64; 3]; 4],
    pub core_angles: [f64; 3],
}

impl UnitaryParams15 {
    pub const DIM: usize = 15;

    pub fn identity() -> Self {
        Self { su2_angles: [[0.0; 3]; 4], core_angles: [0.0; 3] }
    }

    /// Layout: the four local triples in order, then `(alpha, beta, delta)`.
    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() != Self::DIM {
            return Err(Error::InvalidInput(format!("expected 15 angles, got {}", x.len())));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite angle".into()));
        }
        let mut p = Self::identity();
        for (k, triple) in p.su2_angles.iter_mut().enumerate() {
            triple.copy_from_slice(&x[3 * k..3 * k + 3]);
        }
        p.core_angles.copy_from_slice(&x[12..15]);
        Ok(p)
    }

    pub fn to_array(&self) -> [f64; 15] {
        let mut x = [0.0; 15];
        for (k, triple) in self.su2_angles.iter().enumerate() {
            x[3 * k..3 * k + 3].copy_from_slice(triple);
        }
        x[12..15].copy_from_slice(&self.core_angles);
        x
    }

    /// Every angle reduced to `[0, 2 pi)`.
    pub fn canonical(&self) -> Self {
        let x = self.to_array().map(|v| v.rem_euclid(std::f64::consts::TAU));
        Self::from_slice(&x).expect("finite")
    }
}

/// `e^{-i kappa Z/2} e^{-i lambda Y/2} e^{-i nu Z/2}`.
pub fn su2_zyz(kappa: f64, lambda: f64, nu: f64) -> CMatrix {
    let m = su2_array(kappa, lambda, nu);
    CMatrix::from_fn(2, 2, |i, j| m[i][j])
}

fn su2_array(kappa: f64, lambda: f64, nu: f64) -> M2 {
    let (c, s) = ((0.5 * lambda).cos(), (0.5 * lambda).sin());
    let sum = 0.5 * (kappa + nu);
    let diff = 0.5 * (kappa - nu);
    [
        [C64::from_polar(c, -sum), C64::from_polar(-s, -diff)],
        [C64::from_polar(s, diff), C64::from_polar(c, sum)],
    ]
}

/// `exp[i(alpha XX + beta YY + delta ZZ)]`, diagonal in the Bell basis.
pub fn core_unitary(alpha: f64, beta: f64, delta: f64) -> CMatrix {
    let m = core_array(alpha, beta, delta);
    CMatrix::from_fn(4, 4, |i, j| m[i][j])
}

fn core_array(alpha: f64, beta: f64, delta: f64) -> M4 {
    // (XX, YY, ZZ) eigenvalues: Phi+ (1,-1,1), Phi- (-1,1,1), Psi+ (1,1,-1), Psi- (-1,-1,-1).
    let phase = |x: f64| C64::from_polar(0.5, x);
    let (pp, pm) = (phase(alpha - beta + delta), phase(-alpha + beta + delta));
    let (qp, qm) = (phase(alpha + beta - delta), phase(-alpha - beta - delta));
    let z = C64::new(0.0, 0.0);
    [
        [pp + pm, z, z, pp - pm],
        [z, qp + qm, qp - qm, z],
        [z, qp - qm, qp + qm, z],
        [pp - pm, z, z, pp + pm],
    ]
}

fn kron(a: &M2, b: &M2) -> M4 {
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn mul(a: &M4, b: &M4) -> M4 {
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub(crate) fn unitary_array(p: &UnitaryParams15) -> M4 {
    let local = |k: usize| {
        let [a, b, c] = p.su2_angles[k];
        su2_array(a, b, c)
    };
    let [alpha, beta, delta] = p.core_angles;
    let first = kron(&local(0), &local(1));
    let last = kron(&local(2), &local(3));
    mul(&last, &mul(&core_array(alpha, beta, delta), &first))
}

/// `U = (U3 (x) U4) . U_core . (U1 (x) U2)`, first qubit most significant.
pub fn build_unitary(p: &UnitaryParams15) -> CMatrix {
    let m = unitary_array(p);
    CMatrix::from_fn(4, 4, |i, j| m[i][j])
}
