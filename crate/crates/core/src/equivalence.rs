//! Operator equality of circuits by brute force over basis inputs.
//!
//! Unitaries are compared column by column (column `b` is the output for
//! basis input `b`), so no full matrix is ever held in memory. Inputs are
//! checked in parallel; the witness on failure is always the lowest-index
//! failing input regardless of scheduling.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::qudit::{BasisState, Dim, StateVector};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseMode {
    #[default]
    Exact,
    GlobalPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    GlobalPhase,
    Constrained,
    ConstrainedGlobalPhase,
}

/// Wires pinned to fixed input digits.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InputConstraint {
    assignments: BTreeMap<usize, usize>,
}

impl InputConstraint {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Self {
        InputConstraint {
            assignments: pairs.into_iter().collect(),
        }
    }

    pub fn with(mut self, wire: usize, digit: usize) -> Self {
        self.assignments.insert(wire, digit);
        self
    }

    pub fn get(&self, wire: usize) -> Option<usize> {
        self.assignments.get(&wire).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assignments.iter().map(|(&w, &v)| (w, v))
    }

    pub fn validate(&self, dim: Dim, wires: usize) -> Result<()> {
        for (w, v) in self.iter() {
            if w >= wires {
                return Err(Error::InvalidConstraint(format!(
                    "wire {w} outside {wires}-wire register"
                )));
            }
            if v >= dim.get() {
                return Err(Error::InvalidConstraint(format!(
                    "digit {v} on wire {w} not below d={dim}"
                )));
            }
        }
        Ok(())
    }

    /// All basis inputs consistent with the constraint, in ascending index
    /// order.
    pub fn inputs(&self, dim: Dim, wires: usize) -> impl Iterator<Item = BasisState> + '_ {
        (0..dim.pow(wires))
            .map(move |i| BasisState::from_index(dim, wires, i))
            .filter(move |b| self.iter().all(|(w, v)| b.digits()[w] == v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub mode: Mode,
    pub max_deviation: f64,
    pub pass: bool,
    pub witness: Option<BasisState>,
}

/// Unit phase `e^{iθ}` with `e^{iθ}·b ≈ a`; 1 when either is zero.
fn align_phase(a: Complex64, b: Complex64) -> Complex64 {
    let p = a * b.conj();
    let n = p.norm();
    if n == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        p / n
    }
}

struct Tally {
    tol: f64,
    max_deviation: f64,
    witness: Option<BasisState>,
}

impl Tally {
    fn new(tol: f64) -> Self {
        Tally {
            tol,
            max_deviation: 0.0,
            witness: None,
        }
    }

    fn record(&mut self, input: impl FnOnce() -> BasisState, deviation: f64) {
        // NaN deviation must fail too
        let nan = deviation.is_nan();
        if nan || deviation > self.max_deviation {
            self.max_deviation = deviation;
        }
        if (nan || deviation > self.tol) && self.witness.is_none() {
            self.witness = Some(input());
        }
    }

    fn finish(self, mode: Mode) -> EquivalenceReport {
        EquivalenceReport {
            mode,
            max_deviation: self.max_deviation,
            pass: self.witness.is_none(),
            witness: self.witness,
        }
    }
}

/// Compares the full operators of two circuits.
///
/// In global-phase mode the phase is fixed by the largest-magnitude entry of
/// `c2`'s unitary (lowest row-major index on ties).
pub fn unitary_equal(c1: &Circuit, c2: &Circuit, tol: f64, phase: PhaseMode) -> Result<EquivalenceReport> {
    c1.same_shape(c2)?;
    let (dim, wires) = (c1.dim(), c1.wires());
    let size = dim.pow(wires);
    let (sim1, sim2) = (c1.columns(), c2.columns());

    let factor = match phase {
        PhaseMode::Exact => Complex64::new(1.0, 0.0),
        PhaseMode::GlobalPhase => {
            let mut best: Option<(f64, usize, usize)> = None;
            for col in 0..size {
                let out = sim2.run(col);
                for (row, a) in out.amplitudes().iter().enumerate() {
                    let mag = a.norm_sqr();
                    let better = match best {
                        None => true,
                        Some((m, r, c)) => mag > m || (mag == m && (row, col) < (r, c)),
                    };
                    if better {
                        best = Some((mag, row, col));
                    }
                }
            }
            let (_, row, col) = best.expect("register has at least one basis state");
            align_phase(sim1.run(col).amplitudes()[row], sim2.run(col).amplitudes()[row])
        }
    };

    let mut tally = Tally::new(tol);
    for col in 0..size {
        let dev = sim1.run(col).max_deviation(&sim2.run(col).scaled(factor));
        tally.record(|| BasisState::from_index(dim, wires, col), dev);
    }
    let mode = match phase {
        PhaseMode::Exact => Mode::Exact,
        PhaseMode::GlobalPhase => Mode::GlobalPhase,
    };
    Ok(tally.finish(mode))
}

/// Compares the circuits only on basis inputs that satisfy `constraint`.
///
/// In global-phase mode each input gets its own phase alignment.
pub fn constrained_equal(
    c1: &Circuit,
    c2: &Circuit,
    constraint: &InputConstraint,
    tol: f64,
    phase: PhaseMode,
) -> Result<EquivalenceReport> {
    c1.same_shape(c2)?;
    constraint.validate(c1.dim(), c1.wires())?;

    let (sim1, sim2) = (c1.columns(), c2.columns());
    let mut tally = Tally::new(tol);
    for input in constraint.inputs(c1.dim(), c1.wires()) {
        let a = sim1.run(input.index(c1.dim()));
        let mut b = sim2.run(input.index(c1.dim()));
        if phase == PhaseMode::GlobalPhase {
            let k = b.dominant_index();
            b = b.scaled(align_phase(a.amplitudes()[k], b.amplitudes()[k]));
        }
        tally.record(|| input.clone(), a.max_deviation(&b));
    }
    let mode = match phase {
        PhaseMode::Exact => Mode::Constrained,
        PhaseMode::GlobalPhase => Mode::ConstrainedGlobalPhase,
    };
    Ok(tally.finish(mode))
}

/// Independent re-simulation of one input: deviation between the two
/// circuit outputs, phase-aligned if requested.
pub fn deviation_at(c1: &Circuit, c2: &Circuit, input: &BasisState, phase: PhaseMode) -> Result<f64> {
    c1.same_shape(c2)?;
    let a: StateVector = c1.run(input)?;
    let mut b = c2.run(input)?;
    if phase == PhaseMode::GlobalPhase {
        let k = b.dominant_index();
        b = b.scaled(align_phase(a.amplitudes()[k], b.amplitudes()[k]));
    }
    Ok(a.max_deviation(&b))
}
