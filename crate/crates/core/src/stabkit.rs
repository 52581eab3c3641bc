//! Pauli/Weyl operators, stabilizer states, the single-qubit Clifford group,
//! and the octahedral "magic polytopes" `sum_j |m_j| = r` inside the Bloch
//! ball.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::qstate::{BlochVector, PureState};
use crate::{tolerance, CMatrix, Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Tensor product of single-qubit Paulis, `code` read base 4 with the first
/// qubit in the most significant digit (0 = I, 1 = X, 2 = Y, 3 = Z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    n: usize,
    code: usize,
}

impl PauliString {
    pub fn new(n: usize, code: usize) -> Result<Self> {
        check_qubits(n)?;
        if code >= 4usize.pow(n as u32) {
            return Err(Error::InvalidInput(format!("Pauli code {code} for {n} qubits")));
        }
        Ok(Self { n, code })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn code(&self) -> usize {
        self.code
    }

    /// Single-site factors, first qubit first.
    pub fn factors(&self) -> Vec<usize> {
        (0..self.n)
            .rev()
            .map(|site| (self.code / 4usize.pow(site as u32)) % 4)
            .collect()
    }

    pub fn label(&self) -> String {
        self.factors().iter().map(|&f| ['I', 'X', 'Y', 'Z'][f]).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.code == 0
    }

    pub fn matrix(&self) -> CMatrix {
        self.factors()
            .iter()
            .map(|&f| single_pauli(f))
            .reduce(|acc, m| acc.kronecker(&m))
            .expect("n >= 1")
    }
}

/// `I, X, Y, Z` by index.
pub fn single_pauli(index: usize) -> CMatrix {
    let entries = match index {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -I, I, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => panic!("Pauli index {index} out of range"),
    };
    CMatrix::from_row_slice(2, 2, &entries)
}

/// All `4^n` Pauli strings in code order, identity first.
pub fn pauli_group(n: usize) -> Result<Vec<PauliString>> {
    check_qubits(n)?;
    Ok((0..4usize.pow(n as u32)).map(|code| PauliString { n, code }).collect())
}

/// Cached materialised Pauli matrices for `n` qubits, in code order.
pub fn pauli_matrices(n: usize) -> Result<&'static [CMatrix]> {
    static ONE_QUBIT: OnceLock<Vec<CMatrix>> = OnceLock::new();
    static TWO_QUBIT: OnceLock<Vec<CMatrix>> = OnceLock::new();
    let build = |n| pauli_group(n).unwrap().iter().map(PauliString::matrix).collect();
    match n {
        1 => Ok(ONE_QUBIT.get_or_init(|| build(1))),
        2 => Ok(TWO_QUBIT.get_or_init(|| build(2))),
        _ => Err(unsupported_qubits(n)),
    }
}

/// Weyl–Heisenberg operator `X^a Z^b` on a prime-dimensional qudit, with
/// `X|j> = |j+1>` and `Z|j> = w^j |j>`, `w = exp(2 pi i / d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylOperator {
    d: usize,
    a: usize,
    b: usize,
}

impl WeylOperator {
    pub fn new(d: usize, a: usize, b: usize) -> Result<Self> {
        check_prime(d)?;
        Ok(Self { d, a: a % d, b: b % d })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn exponents(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn matrix(&self) -> CMatrix {
        let d = self.d;
        let omega = |k: usize| C64::from_polar(1.0, std::f64::consts::TAU * (k % d) as f64 / d as f64);
        // (X^a Z^b)|j> = w^{b j} |j + a>
        CMatrix::from_fn(d, d, |row, col| {
            if row == (col + self.a) % d {
                omega(self.b * col)
            } else {
                ZERO
            }
        })
    }
}

/// The `d^2` Weyl operators, `(a, b)` in row-major order.
pub fn weyl_group(d: usize) -> Result<Vec<WeylOperator>> {
    check_prime(d)?;
    Ok((0..d)
        .flat_map(|a| (0..d).map(move |b| WeylOperator { d, a, b }))
        .collect())
}

/// Pure stabilizer states of `n` qubits, one representative per ray.
#[derive(Debug, Clone)]
pub struct StabilizerSet {
    n: usize,
    states: Vec<PureState>,
}

impl StabilizerSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Whether `psi` is (up to phase) one of the set.
    pub fn contains(&self, psi: &PureState, tol: f64) -> bool {
        self.states.iter().any(|s| s.same_ray(psi, tol))
    }
}

/// 6 states for one qubit, 60 for two; built as the Clifford orbit of `|0..0>`.
pub fn stabilizer_states(n: usize) -> Result<&'static StabilizerSet> {
    static ONE_QUBIT: OnceLock<StabilizerSet> = OnceLock::new();
    static TWO_QUBIT: OnceLock<StabilizerSet> = OnceLock::new();
    match n {
        1 => Ok(ONE_QUBIT.get_or_init(|| StabilizerSet {
            n: 1,
            states: orbit(&PureState::basis(2, 0).unwrap(), &clifford_generators(1)),
        })),
        2 => Ok(TWO_QUBIT.get_or_init(|| StabilizerSet {
            n: 2,
            states: orbit(&PureState::basis(4, 0).unwrap(), &clifford_generators(2)),
        })),
        _ => Err(unsupported_qubits(n)),
    }
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)])
}

pub fn phase_gate() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, I])
}

/// `pi/8` gate `diag(1, e^{i pi/4})`.
pub fn t_gate() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)])
}

/// CNOT with the first qubit as control.
pub fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[(r, c)] = ONE;
    }
    m
}

/// `{H, S}` for one qubit, `{H x I, I x H, S x I, I x S, CNOT}` for two.
pub fn clifford_generators(n: usize) -> Vec<CMatrix> {
    let id = CMatrix::identity(2, 2);
    match n {
        1 => vec![hadamard(), phase_gate()],
        2 => vec![
            hadamard().kronecker(&id),
            id.kronecker(&hadamard()),
            phase_gate().kronecker(&id),
            id.kronecker(&phase_gate()),
            cnot(),
        ],
        _ => Vec::new(),
    }
}

/// The 24 single-qubit Cliffords modulo global phase, each normalised so its
/// first non-zero entry (row-major) is real positive.
pub fn clifford_group_1q() -> &'static [CMatrix] {
    static GROUP: OnceLock<Vec<CMatrix>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let gens = clifford_generators(1);
        let start = CMatrix::identity(2, 2);
        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(matrix_key(&start), ());
        out.push(start.clone());
        queue.push_back(start);
        while let Some(g) = queue.pop_front() {
            for h in &gens {
                let next = canonical_matrix(&(h * &g));
                let key = matrix_key(&next);
                if seen.insert(key, ()).is_none() {
                    out.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        out
    })
}

/// Breadth-first orbit of `seed` under `gens`, deduplicated up to phase.
fn orbit(seed: &PureState, gens: &[CMatrix]) -> Vec<PureState> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    let start = seed.canonical_phase();
    seen.insert(vector_key(&start), ());
    out.push(start.clone());
    queue.push_back(start);
    while let Some(psi) = queue.pop_front() {
        for g in gens {
            let next = crate::qstate::apply_unitary(g, &psi)
                .expect("generator dims match")
                .canonical_phase();
            if seen.insert(vector_key(&next), ()).is_none() {
                out.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    out
}

fn quantize(x: f64) -> i64 {
    (x * 1e8).round() as i64
}

fn vector_key(psi: &PureState) -> Vec<i64> {
    psi.amps().iter().flat_map(|a| [quantize(a.re), quantize(a.im)]).collect()
}

fn canonical_matrix(m: &CMatrix) -> CMatrix {
    // Row-major scan for the pivot.
    let pivot = (0..m.nrows())
        .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
        .map(|rc| m[rc])
        .find(|z| z.norm() > tolerance::AMPLITUDE_ZERO)
        .unwrap_or(ONE);
    let phase = pivot.conj() / pivot.norm();
    m.map(|z| z * phase)
}

fn matrix_key(m: &CMatrix) -> Vec<i64> {
    (0..m.nrows())
        .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
        .flat_map(|rc| [quantize(m[rc].re), quantize(m[rc].im)])
        .collect()
}

/// Position of a Bloch vector relative to the level-`r` polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolytopeRegion {
    Inside,
    OnSurface,
    Outside,
}

/// Surface `sum_j |m_j| = level`; `level = 1` is the stabilizer octahedron and
/// `level = sqrt(3)` touches the Bloch sphere only at the eight T-type points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagicPolytope {
    level: f64,
}

impl MagicPolytope {
    pub fn new(level: f64) -> Result<Self> {
        if !level.is_finite() || level < 1.0 {
            return Err(Error::InvalidLevel(level));
        }
        Ok(Self { level })
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn classify(&self, b: &BlochVector) -> PolytopeRegion {
        let gap = b.l1_norm() - self.level;
        if gap.abs() <= tolerance::SURFACE {
            PolytopeRegion::OnSurface
        } else if gap < 0.0 {
            PolytopeRegion::Inside
        } else {
            PolytopeRegion::Outside
        }
    }

    /// Parameters `t` in [0, 1] where `(1 - t) b0 + t b1` crosses the surface.
    ///
    /// `t -> sum_j |(1 - t) b0_j + t b1_j|` is piecewise linear with kinks at
    /// the coordinate zero crossings, so each piece is solved exactly. A piece
    /// lying entirely on the surface contributes both of its endpoints.
    pub fn line_intersections(&self, b0: &BlochVector, b1: &BlochVector) -> Vec<f64> {
        let p = b0.components();
        let q = b1.components();
        let mut knots = vec![0.0, 1.0];
        for j in 0..3 {
            let slope = q[j] - p[j];
            if slope != 0.0 {
                let t = -p[j] / slope;
                if t > 0.0 && t < 1.0 {
                    knots.push(t);
                }
            }
        }
        knots.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut roots: Vec<f64> = Vec::new();
        for w in knots.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mid = 0.5 * (lo + hi);
            // On this piece f(t) = intercept + slope * t.
            let (mut intercept, mut slope) = (0.0, 0.0);
            for j in 0..3 {
                let c = p[j] + mid * (q[j] - p[j]);
                let s = if c > 0.0 {
                    1.0
                } else if c < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                intercept += s * p[j];
                slope += s * (q[j] - p[j]);
            }
            let at_lo = intercept + slope * lo - self.level;
            let at_hi = intercept + slope * hi - self.level;
            if at_lo.abs() <= tolerance::INTERSECTION && at_hi.abs() <= tolerance::INTERSECTION {
                roots.push(lo);
                roots.push(hi);
            } else if slope != 0.0 {
                let t = (self.level - intercept) / slope;
                let span = (hi - lo).max(0.0);
                let slack = 1e-12 * (1.0 + span);
                if t >= lo - slack && t <= hi + slack {
                    roots.push(t.clamp(lo, hi));
                }
            }
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        roots
            .into_iter()
            .filter(|&t| (b0.lerp(b1, t).l1_norm() - self.level).abs() <= tolerance::INTERSECTION)
            .collect()
    }
}

/// Classifies `b` against the level-`r` polytope.
pub fn polytope_membership(b: &BlochVector, r: f64) -> Result<PolytopeRegion> {
    Ok(MagicPolytope::new(r)?.classify(b))
}

/// See [`MagicPolytope::line_intersections`].
pub fn line_polytope_intersections(b0: &BlochVector, b1: &BlochVector, r: f64) -> Result<Vec<f64>> {
    Ok(MagicPolytope::new(r)?.line_intersections(b0, b1))
}

/// Outcome of the equal-ratio test for a broadcaster's output lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BroadcastCertificate {
    pub level: f64,
    pub reference_level: f64,
    pub broadcastable: bool,
    /// Shared mixing weights; each is a `|beta|^2` that broadcasts level `r`.
    pub common_t: Vec<f64>,
    pub system_t: Vec<f64>,
    pub auxiliary_t: Vec<f64>,
}

/// Checks whether the system line `sys0 -> sys1` and the auxiliary line
/// `aux0 -> aux1` cross the level-`r` polytope at a common mixing weight.
///
/// All four endpoints must sit on one reference level. The certificate only
/// reports this geometric condition.
pub fn broadcast_geometry_certificate(
    sys0: &BlochVector,
    sys1: &BlochVector,
    aux0: &BlochVector,
    aux1: &BlochVector,
    r: f64,
) -> Result<BroadcastCertificate> {
    let polytope = MagicPolytope::new(r)?;
    let levels = [sys0.l1_norm(), sys1.l1_norm(), aux0.l1_norm(), aux1.l1_norm()];
    let lo = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = levels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > tolerance::REFERENCE_LEVEL {
        return Err(Error::InconsistentReference(levels));
    }
    let system_t = polytope.line_intersections(sys0, sys1);
    let auxiliary_t = polytope.line_intersections(aux0, aux1);
    let common_t: Vec<f64> = system_t
        .iter()
        .copied()
        .filter(|t| auxiliary_t.iter().any(|u| (t - u).abs() <= tolerance::COMMON_T))
        .collect();
    Ok(BroadcastCertificate {
        level: r,
        reference_level: levels.iter().sum::<f64>() / 4.0,
        broadcastable: !common_t.is_empty(),
        common_t,
        system_t,
        auxiliary_t,
    })
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 1 || n == 2 {
        Ok(())
    } else {
        Err(unsupported_qubits(n))
    }
}

fn unsupported_qubits(n: usize) -> Error {
    Error::Unsupported(format!("{n} qubits (only 1 or 2 supported)"))
}

/// Primes up to 7.
fn check_prime(d: usize) -> Result<()> {
    match d {
        2 | 3 | 5 | 7 => Ok(()),
        _ => Err(Error::Unsupported(format!("qudit dimension {d} (need a prime <= 7)"))),
    }
}
