use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dim::{root_of_unity, Dim};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    /// Quantum Fourier transform, `|y⟩ → d^{-1/2} Σ_z e^{2πi zy/d}|z⟩`.
    H,
    /// Bit rotation, `|y⟩ → |y ⊞ 1⟩`.
    X,
    /// Phase, `|y⟩ → e^{-2πi y/d}|y⟩`.
    Z,
    /// Controlled bit rotation, `|x,y⟩ → |x, y ⊞ x⟩`.
    CX,
    /// Controlled phase, `|x,y⟩ → e^{-2πi xy/d}|x,y⟩`.
    CZ,
}

impl GateKind {
    pub const ALL: [GateKind; 5] = [GateKind::H, GateKind::X, GateKind::Z, GateKind::CX, GateKind::CZ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Z => 1,
            GateKind::CX | GateKind::CZ => 2,
        }
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(self) -> bool {
        matches!(self, GateKind::Z | GateKind::CZ)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "H" => Ok(GateKind::H),
            "X" => Ok(GateKind::X),
            "Z" => Ok(GateKind::Z),
            "CX" => Ok(GateKind::CX),
            "CZ" => Ok(GateKind::CZ),
            other => Err(format!("unknown gate kind {other:?}")),
        }
    }
}

/// A gate placed on specific wires. Two-wire gates list control then target.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Gate {
    pub kind: GateKind,
    pub wires: Vec<usize>,
    pub dagger: bool,
}

impl Gate {
    /// Builds a gate after checking arity and wire distinctness.
    pub fn new(kind: GateKind, wires: Vec<usize>, dagger: bool) -> Result<Self> {
        if wires.len() != kind.arity() {
            return Err(Error::Arity {
                kind: kind.name(),
                expected: kind.arity(),
                got: wires.len(),
            });
        }
        if wires.len() == 2 && wires[0] == wires[1] {
            return Err(Error::RepeatedWire(wires));
        }
        Ok(Gate { kind, wires, dagger })
    }

    pub fn h(wire: usize) -> Self {
        Gate {
            kind: GateKind::H,
            wires: vec![wire],
            dagger: false,
        }
    }

    pub fn x(wire: usize) -> Self {
        Gate {
            kind: GateKind::X,
            wires: vec![wire],
            dagger: false,
        }
    }

    pub fn z(wire: usize) -> Self {
        Gate {
            kind: GateKind::Z,
            wires: vec![wire],
            dagger: false,
        }
    }

    /// # Panics
    /// If `control == target`.
    pub fn cx(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "cX needs distinct wires");
        Gate {
            kind: GateKind::CX,
            wires: vec![control, target],
            dagger: false,
        }
    }

    /// # Panics
    /// If `control == target`.
    pub fn cz(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "cZ needs distinct wires");
        Gate {
            kind: GateKind::CZ,
            wires: vec![control, target],
            dagger: false,
        }
    }

    /// The conjugate transpose: flips the dagger flag.
    pub fn adjoint(&self) -> Self {
        Gate {
            dagger: !self.dagger,
            ..self.clone()
        }
    }

    /// Builder form of [`Gate::adjoint`].
    pub fn dag(self) -> Self {
        self.adjoint()
    }

    /// Drops the dagger flag where it carries no meaning: at `d = 2` every
    /// gate in the set is self-adjoint.
    pub fn normalized(self, dim: Dim) -> Self {
        if dim.is_qubit() {
            Gate { dagger: false, ..self }
        } else {
            self
        }
    }

    pub fn control(&self) -> Option<usize> {
        (self.wires.len() == 2).then(|| self.wires[0])
    }

    pub fn target(&self) -> usize {
        *self.wires.last().expect("gate has at least one wire")
    }

    pub fn touches(&self, wire: usize) -> bool {
        self.wires.contains(&wire)
    }

    /// Checks that the gate fits a register of `wires` qudits.
    pub fn validate(&self, wires: usize) -> Result<()> {
        Gate::new(self.kind, self.wires.clone(), self.dagger)?;
        for &w in &self.wires {
            if w >= wires {
                return Err(Error::WireOutOfRange { wire: w, wires });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            GateKind::CX => "cX",
            GateKind::CZ => "cZ",
            k => k.name(),
        };
        let dag = if self.dagger { "†" } else { "" };
        match self.kind {
            GateKind::CX => write!(f, "{name}{dag}({}→{})", self.wires[0], self.wires[1]),
            GateKind::CZ => write!(f, "{name}{dag}({},{})", self.wires[0], self.wires[1]),
            _ => write!(f, "{name}{dag}({})", self.wires[0]),
        }
    }
}

/// Dense local matrix of `gate`, of size `d^arity`, written out from the
/// closed-form entries. Two-wire gates index rows and columns as
/// `control * d + target`.
pub fn gate_matrix(gate: &Gate, dim: Dim) -> Array2<Complex64> {
    let d = dim.get();
    let size = dim.pow(gate.kind.arity());
    let mut m = Array2::<Complex64>::zeros((size, size));
    let one = Complex64::new(1.0, 0.0);
    match gate.kind {
        GateKind::H => {
            let norm = 1.0 / (d as f64).sqrt();
            for z in 0..d {
                for y in 0..d {
                    m[[z, y]] = root_of_unity(dim, (z * y) as i64) * norm;
                }
            }
        }
        GateKind::X => {
            for y in 0..d {
                m[[(y + 1) % d, y]] = one;
            }
        }
        GateKind::Z => {
            for y in 0..d {
                m[[y, y]] = root_of_unity(dim, -(y as i64));
            }
        }
        GateKind::CX => {
            for x in 0..d {
                for y in 0..d {
                    m[[x * d + (x + y) % d, x * d + y]] = one;
                }
            }
        }
        GateKind::CZ => {
            for x in 0..d {
                for y in 0..d {
                    m[[x * d + y, x * d + y]] = root_of_unity(dim, -((x * y) as i64));
                }
            }
        }
    }
    if gate.dagger {
        m = m.t().mapv(|c| c.conj());
    }
    m
}
