use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dim::{root_of_unity, Dim};
use super::gate::{Gate, GateKind};
use crate::error::{Error, Result};

pub type Amplitude = Complex64;

/// Computational basis state, one digit per wire, wire 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BasisState {
    digits: Vec<usize>,
}

impl BasisState {
    pub fn new(dim: Dim, digits: Vec<usize>) -> Result<Self> {
        for &digit in &digits {
            dim.check_digit(digit)?;
        }
        Ok(BasisState { digits })
    }

    pub fn zeros(wires: usize) -> Self {
        BasisState { digits: vec![0; wires] }
    }

    /// Inverse of [`BasisState::index`].
    pub fn from_index(dim: Dim, wires: usize, mut index: usize) -> Self {
        let d = dim.get();
        let mut digits = vec![0; wires];
        for slot in digits.iter_mut().rev() {
            *slot = index % d;
            index /= d;
        }
        BasisState { digits }
    }

    /// Big-endian position in the amplitude array: `Σ digit[i]·d^(n-1-i)`.
    pub fn index(&self, dim: Dim) -> usize {
        self.digits.iter().fold(0, |acc, &digit| acc * dim.get() + digit)
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.digits.iter().any(|&v| v > 9) { "," } else { "" };
        let body: Vec<String> = self.digits.iter().map(usize::to_string).collect();
        write!(f, "|{}⟩", body.join(sep))
    }
}

/// Dense pure state of `wires` qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dim: Dim,
    wires: usize,
    amps: Vec<Amplitude>,
}

impl StateVector {
    pub fn basis(dim: Dim, state: &BasisState) -> Self {
        let wires = state.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); dim.pow(wires)];
        amps[state.index(dim)] = Complex64::new(1.0, 0.0);
        StateVector { dim, wires, amps }
    }

    pub fn zero(dim: Dim, wires: usize) -> Self {
        StateVector::basis(dim, &BasisState::zeros(wires))
    }

    pub fn from_amplitudes(dim: Dim, wires: usize, amps: Vec<Amplitude>) -> Result<Self> {
        if amps.len() != dim.pow(wires) {
            return Err(Error::LengthMismatch {
                expected: dim.pow(wires),
                got: amps.len(),
            });
        }
        if let Some(i) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(StateVector { dim, wires, amps })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn amplitude(&self, state: &BasisState) -> Amplitude {
        self.amps[state.index(self.dim)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born-rule probabilities of the computational-basis outcomes.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Largest entry-wise `|self − other|`.
    pub fn max_deviation(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Index of the largest-magnitude amplitude, lowest index on ties.
    pub fn dominant_index(&self) -> usize {
        let mut best = 0;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() > self.amps[best].norm_sqr() {
                best = i;
            }
        }
        best
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        StateVector {
            dim: self.dim,
            wires: self.wires,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Returns the state with `gate` applied on its wires and the identity
    /// elsewhere.
    pub fn apply(&self, gate: &Gate) -> Result<StateVector> {
        gate.validate(self.wires)?;
        let d = self.dim.get();
        let n = self.wires;
        let len = self.amps.len();
        let stride = |w: usize| self.dim.pow(n - 1 - w);
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; len];
        let sign: i64 = if gate.dagger { -1 } else { 1 };
        // phases[k] = ω^{sign·k}
        let phases: Vec<Complex64> = (0..d as i64).map(|k| root_of_unity(self.dim, sign * k)).collect();

        match gate.kind {
            GateKind::X => {
                let s = stride(gate.wires[0]);
                let shift = if gate.dagger { d - 1 } else { 1 };
                for base in single_bases(len, s, d) {
                    for y in 0..d {
                        let to = if y + shift >= d { y + shift - d } else { y + shift };
                        out[base + to * s] = self.amps[base + y * s];
                    }
                }
            }
            GateKind::Z => {
                let s = stride(gate.wires[0]);
                for base in single_bases(len, s, d) {
                    for y in 0..d {
                        let i = base + y * s;
                        out[i] = self.amps[i] * phases[(d - y) % d];
                    }
                }
            }
            GateKind::CX => {
                let (sc, st) = (stride(gate.wires[0]), stride(gate.wires[1]));
                for base in pair_bases(len, sc, st, d) {
                    for x in 0..d {
                        let shift = if gate.dagger { (d - x) % d } else { x };
                        let row = base + x * sc;
                        for y in 0..d {
                            let to = if y + shift >= d { y + shift - d } else { y + shift };
                            out[row + to * st] = self.amps[row + y * st];
                        }
                    }
                }
            }
            GateKind::CZ => {
                let (sc, st) = (stride(gate.wires[0]), stride(gate.wires[1]));
                for base in pair_bases(len, sc, st, d) {
                    for x in 0..d {
                        for y in 0..d {
                            let i = base + x * sc + y * st;
                            out[i] = self.amps[i] * phases[(d - (x * y) % d) % d];
                        }
                    }
                }
            }
            GateKind::H => {
                let s = stride(gate.wires[0]);
                let norm = 1.0 / (d as f64).sqrt();
                for base in single_bases(len, s, d) {
                    for y in 0..d {
                        let a = self.amps[base + y * s];
                        if a == zero {
                            continue;
                        }
                        let a = a * norm;
                        for z in 0..d {
                            out[base + z * s] += a * phases[(z * y) % d];
                        }
                    }
                }
            }
        }

        Ok(StateVector {
            dim: self.dim,
            wires: n,
            amps: out,
        })
    }
}

/// Indices whose digit at stride `s` is zero.
fn single_bases(len: usize, s: usize, d: usize) -> impl Iterator<Item = usize> {
    (0..len).step_by(s * d).flat_map(move |outer| outer..outer + s)
}

/// Indices whose digits at strides `a` and `b` (distinct) are both zero.
fn pair_bases(len: usize, a: usize, b: usize, d: usize) -> impl Iterator<Item = usize> {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    (0..len)
        .step_by(hi * d)
        .flat_map(move |outer| (outer..outer + hi).step_by(lo * d).flat_map(move |mid| mid..mid + lo))
}
