//! The dense-coding protocol run message by message, and its agreement with
//! the automated four-wire circuit.
//!
//! In the two-wire protocol register wire 0 is the qudit Alice sends and
//! wire 1 the one Bob already holds. A message `(x, y)` is encoded as `y`
//! applications of `X†` followed by `x` applications of `Z†`, which is what
//! the controlled gates `cX†(1→2)` and `cZ†(0,2)` of the automated circuit do
//! for control digits `y` and `x`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::Result;
use crate::qudit::{BasisState, Dim, Gate, StateVector};
use crate::rewrite::deconstruct_pipeline;

/// Two classical digits: `x` selects a phase, `y` a bit rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub x: usize,
    pub y: usize,
}

impl Message {
    pub fn new(dim: Dim, x: usize, y: usize) -> Result<Self> {
        dim.check_digit(x)?;
        dim.check_digit(y)?;
        Ok(Message { x, y })
    }

    /// All `d²` messages ordered by `(x, y)`.
    pub fn all(dim: Dim) -> impl Iterator<Item = Message> {
        let d = dim.get();
        (0..d * d).map(move |i| Message { x: i / d, y: i % d })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub message: Message,
    pub decoded: Message,
    pub probability: f64,
    pub final_state: StateVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeJson {
    pub d: usize,
    pub x: usize,
    pub y: usize,
    pub decoded_x: usize,
    pub decoded_y: usize,
    pub probability: f64,
}

impl ProtocolOutcome {
    pub fn to_json_value(&self) -> OutcomeJson {
        OutcomeJson {
            d: self.final_state.dim().get(),
            x: self.message.x,
            y: self.message.y,
            decoded_x: self.decoded.x,
            decoded_y: self.decoded.y,
            probability: self.probability,
        }
    }

    /// Amplitude on the decoded ket; exactly 1 when no phase is left over.
    pub fn decoded_amplitude(&self) -> Complex64 {
        let dim = self.final_state.dim();
        let ket = BasisState::from_index(dim, 2, self.decoded.x * dim.get() + self.decoded.y);
        self.final_state.amplitude(&ket)
    }
}

fn two_wire(dim: Dim, gates: Vec<Gate>) -> Circuit {
    Circuit::from_gates(dim, 2, gates).expect("two-wire protocol gates")
}

/// `d^{-1/2} Σ_z |z,z⟩`.
pub fn bell_state(dim: Dim) -> StateVector {
    let d = dim.get();
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for z in 0..d {
        amps[z * d + z] = amp;
    }
    StateVector::from_amplitudes(dim, 2, amps).expect("finite amplitudes")
}

/// Alice's local gates for `m`, acting on wire 0.
pub fn encode(dim: Dim, m: Message) -> Vec<Gate> {
    let rotations = std::iter::repeat_n(Gate::x(0).dag().normalized(dim), m.y);
    let phases = std::iter::repeat_n(Gate::z(0).dag().normalized(dim), m.x);
    rotations.chain(phases).collect()
}

/// The `d²` states `encode(m)` applied to the Bell state, ordered by `(x, y)`.
pub fn bell_basis(dim: Dim) -> Vec<StateVector> {
    let bell = bell_state(dim);
    Message::all(dim)
        .map(|m| {
            two_wire(dim, encode(dim, m))
                .run_state(bell.clone())
                .expect("shape matches")
        })
        .collect()
}

/// Bob's decoding gates on the pair: `cX†(0→1)` then `H†(0)`.
pub fn decode_gates(dim: Dim) -> Vec<Gate> {
    vec![Gate::cx(0, 1).dag().normalized(dim), Gate::h(0).dag().normalized(dim)]
}

/// Prepares the Bell pair, encodes `m` on wire 0, decodes, and reads out the
/// most probable computational-basis outcome.
pub fn run_protocol(dim: Dim, m: Message) -> ProtocolOutcome {
    let mut gates = encode(dim, m);
    gates.extend(decode_gates(dim));
    let final_state = two_wire(dim, gates).run_state(bell_state(dim)).expect("shape matches");
    let k = final_state.dominant_index();
    let decoded = Message {
        x: k / dim.get(),
        y: k % dim.get(),
    };
    let probability = final_state.amplitudes()[k].norm_sqr();
    ProtocolOutcome {
        message: m,
        decoded,
        probability,
        final_state,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckCase {
    pub x: usize,
    pub y: usize,
    /// Largest entry-wise distance of the stage-f output from `|x,y,x,y⟩`.
    pub deviation: f64,
    pub automated_decoded: (usize, usize),
    pub operational_decoded: (usize, usize),
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub d: usize,
    pub matched: usize,
    pub total: usize,
    pub pass: bool,
    pub cases: Vec<CrosscheckCase>,
}

/// Runs the automated circuit on `|x,y,0,0⟩` and the operational protocol
/// for the same message and compares them.
pub fn crosscheck_message(stage_f: &Circuit, m: Message, tol: f64) -> Result<CrosscheckCase> {
    let dim = stage_f.dim();
    let input = BasisState::new(dim, vec![m.x, m.y, 0, 0])?;
    let expected_ket = BasisState::new(dim, vec![m.x, m.y, m.x, m.y])?;
    let out = stage_f.run(&input)?;
    let deviation = out.max_deviation(&StateVector::basis(dim, &expected_ket));
    let top = BasisState::from_index(dim, 4, out.dominant_index());
    let automated_decoded = (top.digits()[2], top.digits()[3]);
    let op = run_protocol(dim, m);
    let operational_decoded = (op.decoded.x, op.decoded.y);
    let pass = deviation <= tol
        && automated_decoded == operational_decoded
        && automated_decoded == (m.x, m.y)
        && (op.decoded_amplitude() - Complex64::new(1.0, 0.0)).norm() <= tol;
    Ok(CrosscheckCase {
        x: m.x,
        y: m.y,
        deviation,
        automated_decoded,
        operational_decoded,
        pass,
    })
}

/// Checks every message against the stage-f circuit produced by the
/// deconstruction pipeline.
pub fn crosscheck_automated(dim: Dim, tol: f64) -> Result<CrosscheckReport> {
    let trace = deconstruct_pipeline(dim)?;
    let stage_f = trace.stage('f').expect("pipeline has six stages");
    let cases = Message::all(dim)
        .map(|m| crosscheck_message(stage_f, m, tol))
        .collect::<Result<Vec<_>>>()?;
    let matched = cases.iter().filter(|c| c.pass).count();
    Ok(CrosscheckReport {
        d: dim.get(),
        matched,
        total: cases.len(),
        pass: matched == cases.len(),
        cases,
    })
}

/// `G[i][j] = ⟨s_i|s_j⟩`.
pub fn gram_matrix(states: &[StateVector]) -> Vec<Vec<Complex64>> {
    states
        .iter()
        .map(|a| states.iter().map(|b| a.inner(b)).collect())
        .collect()
}

/// Largest `|G[i][j]|` with `i ≠ j`, and largest `|G[i][i] − 1|`.
pub fn gram_deviation(states: &[StateVector]) -> (f64, f64) {
    let g = gram_matrix(states);
    let mut off = 0.0f64;
    let mut diag = 0.0f64;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i == j {
                diag = diag.max((v - Complex64::new(1.0, 0.0)).norm());
            } else {
                off = off.max(v.norm());
            }
        }
    }
    (off, diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::GateKind;

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    #[test]
    fn bell_state_matches_circuit() {
        for d in 2..=6 {
            let prepared = Circuit::from_gates(dim(d), 2, vec![Gate::h(0), Gate::cx(0, 1)])
                .unwrap()
                .run(&BasisState::zeros(2))
                .unwrap();
            let bell = bell_state(dim(d));
            assert!(prepared.max_deviation(&bell) < 1e-15, "d={d}");
            assert!((bell.inner(&bell).re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn qubit_encodings() {
        assert!(encode(dim(2), Message { x: 0, y: 0 }).is_empty());
        assert_eq!(encode(dim(2), Message { x: 1, y: 1 }), vec![Gate::x(0), Gate::z(0)]);
        assert_eq!(encode(dim(2), Message { x: 1, y: 0 }), vec![Gate::z(0)]);
        assert_eq!(
            encode(dim(3), Message { x: 1, y: 2 }),
            vec![Gate::x(0).dag(), Gate::x(0).dag(), Gate::z(0).dag()]
        );
        assert!(encode(dim(5), Message { x: 3, y: 4 }).iter().all(|g| g.dagger));
        assert!(encode(dim(5), Message { x: 3, y: 4 })[..4]
            .iter()
            .all(|g| g.kind == GateKind::X));
    }

    #[test]
    fn qubit_phase_flip_bell_state() {
        let basis = bell_basis(dim(2));
        // (x=1, y=0) is index 2
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [s, 0.0, 0.0, -s];
        for (a, e) in basis[2].amplitudes().iter().zip(expected) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-15);
        }
        assert_eq!(basis[0], bell_state(dim(2)));
    }

    #[test]
    fn protocol_decodes_every_qubit_message() {
        for m in Message::all(dim(2)) {
            let out = run_protocol(dim(2), m);
            assert_eq!(out.decoded, m);
            assert!((out.probability - 1.0).abs() < 1e-9);
        }
        let out = run_protocol(dim(3), Message { x: 2, y: 1 });
        assert_eq!(out.decoded, Message { x: 2, y: 1 });
        assert!((out.decoded_amplitude() - Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn message_validation() {
        assert!(Message::new(dim(3), 3, 0).is_err());
        assert!(Message::new(dim(3), 2, 2).is_ok());
        assert_eq!(Message::all(dim(4)).count(), 16);
    }

    #[test]
    fn outcome_json_fields() {
        let out = run_protocol(dim(2), Message { x: 1, y: 0 });
        let text = serde_json::to_string(&out.to_json_value()).unwrap();
        assert!(text.starts_with(r#"{"d":2,"x":1,"y":0,"decoded_x":1,"decoded_y":0,"probability":"#));
    }

    #[test]
    fn crosscheck_small() {
        for d in 2..=4 {
            let r = crosscheck_automated(dim(d), 1e-9).unwrap();
            assert_eq!(r.matched, d * d);
            assert!(r.pass);
        }
    }
}
