//! Shell syntax for single-qubit (or two-qubit amplitude) states.
//!
//! ```text
//! T | Tperp | H | 0 | 1 | + | - | +i | -i | plus | minus | ...
//! theta,zeta[,basis=T|computational]
//! amps:a0,a1[,a2,a3]          complex entries such as 0.6, -0.8i, 0.3+0.4i
//! ```

use magicast::qstate::{h_state, named_stabilizer_state, superpose, t_perp_state, t_state, BlochVector, PureState};
use magicast::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    T,
    Computational,
}

pub fn parse_state(spec: &str) -> Result<PureState, String> {
    let s = spec.trim();
    if let Some(list) = s.strip_prefix("amps:") {
        return parse_amps(list);
    }
    if let Some(psi) = named(s) {
        return Ok(psi);
    }
    if s.contains(',') {
        let (theta, zeta, basis) = parse_angles(s)?;
        let (psi, perp) = match basis {
            Basis::T => (t_state(), t_perp_state()),
            Basis::Computational => (PureState::basis(2, 0).unwrap(), PureState::basis(2, 1).unwrap()),
        };
        return superpose(&psi, &perp, theta, zeta).map_err(|e| e.to_string());
    }
    Err(format!(
        "cannot parse state '{spec}': expected a name (T, Tperp, H, 0, 1, +, -, +i, -i), \
         'theta,zeta[,basis=T|computational]' or 'amps:a0,a1,...'"
    ))
}

fn named(s: &str) -> Option<PureState> {
    match s.to_ascii_lowercase().as_str() {
        "t" => Some(t_state()),
        "tperp" | "t_perp" => Some(t_perp_state()),
        "h" => Some(h_state()),
        other => named_stabilizer_state(other),
    }
}

fn parse_angles(s: &str) -> Result<(f64, f64, Basis), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let basis = match parts.get(2) {
        None => Basis::Computational,
        Some(b) => match b.strip_prefix("basis=").map(str::to_ascii_lowercase).as_deref() {
            Some("t") => Basis::T,
            Some("computational") | Some("z") => Basis::Computational,
            _ => return Err(format!("bad basis '{b}', expected basis=T or basis=computational")),
        },
    };
    if parts.len() < 2 || parts.len() > 3 {
        return Err(format!("expected 'theta,zeta[,basis=...]', got '{s}'"));
    }
    let theta = parse_f64(parts[0])?;
    let zeta = parse_f64(parts[1])?;
    Ok((theta, zeta, basis))
}

fn parse_amps(list: &str) -> Result<PureState, String> {
    let amps = list
        .split(',')
        .map(|a| a.trim().parse::<C64>().map_err(|_| format!("bad amplitude '{a}'")))
        .collect::<Result<Vec<_>, _>>()?;
    if amps.len() != 2 && amps.len() != 4 {
        return Err(format!("expected 2 or 4 amplitudes, got {}", amps.len()));
    }
    if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err("amplitudes must be finite".into());
    }
    PureState::normalized(amps).map_err(|e| e.to_string())
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: '{s}'"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: '{s}'"))
    }
}

/// `x,y,z` as a Bloch vector.
pub fn parse_bloch(s: &str) -> Result<BlochVector, String> {
    let v = s.split(',').map(parse_f64).collect::<Result<Vec<_>, _>>()?;
    let [x, y, z] = v[..] else {
        return Err(format!("expected three components 'x,y,z', got '{s}'"));
    };
    BlochVector::new(x, y, z).map_err(|e| e.to_string())
}

pub fn amps_of(psi: &PureState) -> Vec<[f64; 2]> {
    psi.amps().iter().map(|a| [a.re, a.im]).collect()
}
