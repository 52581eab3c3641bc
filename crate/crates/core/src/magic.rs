//! Magic quantifiers.
//!
//! - [`witness_d`]: `D = 2^-n sum_P |Tr(P rho)|`.
//! - [`rom_qubit`]: single-qubit robustness of magic `max{1, sum_j |m_j|}`,
//!   equal to `2D - 1` whenever that exceeds one.
//! - [`rom_lp_oracle`]: the same quantity as the optimum of the pseudomixture
//!   linear program over the six stabilizer states, solved exactly.
//! - [`sre2_pure`], [`sre2_extended`], [`sre2_qudit`]: stabilizer Rényi
//!   entropies of order 2, base-2 logarithm.
//! - [`magic_power`]: mean `M2` a two-qubit unitary creates from the 60
//!   stabilizer states.

use std::sync::OnceLock;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::qstate::{bloch_from_density, unitarity_defect, BlochVector, DensityMatrix, PureState};
use crate::stabkit::{pauli_matrices, stabilizer_states, weyl_group, WeylOperator};
use crate::{tolerance, CMatrix, Error, Result};

/// `D(rho) = (1 / 2^n) sum_P |Tr(P rho)|` over all `4^n` Pauli strings.
pub fn witness_d(rho: &DensityMatrix, n: usize) -> Result<f64> {
    let paulis = pauli_matrices(n)?;
    check_qubit_dim(rho.dim(), n)?;
    let mut sum = 0.0;
    for p in paulis {
        sum += rho.expectation(p)?.re.abs();
    }
    Ok(sum / rho.dim() as f64)
}

/// `max{1, |m1| + |m2| + |m3|}`.
pub fn rom_qubit(rho: &DensityMatrix) -> Result<f64> {
    Ok(rom_from_bloch(&bloch_from_density(rho)?))
}

pub fn rom_from_bloch(b: &BlochVector) -> f64 {
    b.l1_norm().max(1.0)
}

/// Minimum of `sum_i |x_i|` over real `x` with `rho = sum_i x_i |s_i><s_i|`,
/// `s_i` ranging over the six single-qubit stabilizer states.
///
/// Splitting `x = x+ - x-` gives a standard-form program with 12 non-negative
/// variables and 4 equality rows (trace and three magnetizations). Its optimum
/// is attained at a basic feasible solution, so every non-singular 4-column
/// basis is tried and the best feasible one kept.
pub fn rom_lp_oracle(rho: &DensityMatrix) -> Result<f64> {
    rom_lp_decomposition(rho).map(|(value, _)| value)
}

/// Optimal value together with the weights `x_i`, indexed like
/// [`stabilizer_states(1)`](crate::stabkit::stabilizer_states).
pub fn rom_lp_decomposition(rho: &DensityMatrix) -> Result<(f64, [f64; 6])> {
    let b = bloch_from_density(rho)?.components();
    let rhs = Vector4::new(1.0, b[0], b[1], b[2]);
    let mut best: Option<(f64, [f64; 6])> = None;
    for basis in lp_bases() {
        let y = basis.inverse * rhs;
        if y.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let value: f64 = y.iter().sum();
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            let mut x = [0.0; 6];
            for (k, &col) in basis.columns.iter().enumerate() {
                if col < 6 {
                    x[col] += y[k];
                } else {
                    x[col - 6] -= y[k];
                }
            }
            best = Some((value, x));
        }
    }
    best.ok_or_else(|| Error::Internal("pseudomixture program infeasible".into()))
}

struct LpBasis {
    columns: [usize; 4],
    inverse: Matrix4<f64>,
}

fn lp_bases() -> &'static [LpBasis] {
    static BASES: OnceLock<Vec<LpBasis>> = OnceLock::new();
    BASES.get_or_init(|| {
        // Column i < 6 is (1, m(s_i)); column i + 6 is its negation.
        let cols: Vec<[f64; 4]> = stabilizer_states(1)
            .expect("one-qubit stabilizers")
            .states()
            .iter()
            .map(|s| {
                let m = bloch_from_density(&s.density()).unwrap().components();
                [1.0, m[0], m[1], m[2]]
            })
            .collect();
        let column = |k: usize| -> [f64; 4] {
            let c = cols[k % 6];
            if k < 6 {
                c
            } else {
                c.map(|v| -v)
            }
        };
        let mut out = Vec::new();
        for a in 0..12 {
            for b in a + 1..12 {
                for c in b + 1..12 {
                    for d in c + 1..12 {
                        let idx = [a, b, c, d];
                        let m = Matrix4::from_fn(|r, k| column(idx[k])[r]);
                        if m.determinant().abs() < 1e-9 {
                            continue;
                        }
                        if let Some(inverse) = m.try_inverse() {
                            out.push(LpBasis { columns: idx, inverse });
                        }
                    }
                }
            }
        }
        out
    })
}

/// `M2 = -log2( sum_P <psi|P|psi>^4 / 2^n )`.
pub fn sre2_pure(psi: &PureState, n: usize) -> Result<f64> {
    let paulis = pauli_matrices(n)?;
    check_qubit_dim(psi.dim(), n)?;
    let mut sum = 0.0;
    for p in paulis {
        sum += psi.expectation(p)?.re.powi(4);
    }
    Ok(neg_log2(sum / psi.dim() as f64))
}

/// `-log2( sum_P Tr(P rho)^4 / sum_P Tr(P rho)^2 )`, which reduces to
/// [`sre2_pure`] on pure states.
pub fn sre2_extended(rho: &DensityMatrix, n: usize) -> Result<f64> {
    let paulis = pauli_matrices(n)?;
    check_qubit_dim(rho.dim(), n)?;
    let (mut quartic, mut quadratic) = (0.0, 0.0);
    for p in paulis {
        let e = rho.expectation(p)?.re;
        let e2 = e * e;
        quadratic += e2;
        quartic += e2 * e2;
    }
    Ok(neg_log2(quartic / quadratic))
}

/// `M2 = -log2( sum_W |<psi|W|psi>|^4 / d )` over the `d^2` Weyl operators
/// of a single prime-dimensional qudit.
pub fn sre2_qudit(psi: &PureState, d: usize) -> Result<f64> {
    let ops = weyl_group(d)?;
    if psi.dim() != d {
        return Err(Error::InvalidDimension(format!(
            "qudit state of dim {} for d = {d}",
            psi.dim()
        )));
    }
    let mut sum = 0.0;
    for w in ops.iter().map(WeylOperator::matrix) {
        sum += psi.expectation(&w)?.norm_sqr().powi(2);
    }
    Ok(neg_log2(sum / d as f64))
}

/// Average [`sre2_pure`] of `U|phi>` over the 60 two-qubit stabilizer states.
pub fn magic_power(u: &CMatrix) -> Result<f64> {
    if u.nrows() != 4 || u.ncols() != 4 {
        return Err(Error::InvalidDimension(format!(
            "magic power needs a 4x4 unitary, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let defect = unitarity_defect(u);
    if defect > tolerance::UNITARY {
        return Err(Error::InvalidUnitary(defect));
    }
    let stab = stabilizer_states(2)?;
    let mut total = 0.0;
    for phi in stab.states() {
        total += sre2_pure(&crate::qstate::apply_unitary(u, phi)?, 2)?;
    }
    Ok(total / stab.len() as f64)
}

/// All magic quantifiers of one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagicReport {
    pub n: usize,
    /// Witness `D`.
    pub d: f64,
    /// Robustness of magic; single qubits only.
    pub rom: Option<f64>,
    /// `M2`; pure states only.
    pub sre2: Option<f64>,
    pub extended_sre2: f64,
}

impl MagicReport {
    pub fn for_pure(psi: &PureState) -> Result<Self> {
        let n = qubits_for_dim(psi.dim())?;
        let mut report = Self::for_density(&psi.density())?;
        report.sre2 = Some(sre2_pure(psi, n)?);
        Ok(report)
    }

    pub fn for_density(rho: &DensityMatrix) -> Result<Self> {
        let n = qubits_for_dim(rho.dim())?;
        Ok(Self {
            n,
            d: witness_d(rho, n)?,
            rom: if n == 1 { Some(rom_qubit(rho)?) } else { None },
            sre2: None,
            extended_sre2: sre2_extended(rho, n)?,
        })
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    match dim {
        2 => Ok(1),
        4 => Ok(2),
        _ => Err(Error::InvalidDimension(format!("dim {dim} is not 1 or 2 qubits"))),
    }
}

fn check_qubit_dim(dim: usize, n: usize) -> Result<()> {
    if dim != 1 << n {
        return Err(Error::InvalidDimension(format!("dim {dim} for {n} qubits")));
    }
    Ok(())
}

/// `-log2(x)`, with round-off above 1 mapped to exactly zero.
fn neg_log2(x: f64) -> f64 {
    (-x.log2()).max(0.0)
}
