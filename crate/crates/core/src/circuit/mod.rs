//! Flat gate-list circuits.
//!
//! `gates[0]` acts first. Operator products read right to left, so the
//! product `(H)₂(cX)₁₂` is the circuit `[cX(0→1), H(1)]`.

mod render;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::{gate_matrix, BasisState, Dim, Gate, GateKind, StateVector};

pub use render::{render_ascii, AsciiStyle};

/// Largest register, in basis states, for which a full unitary is built.
pub const UNITARY_CAP: usize = 65536;

/// Sparse simulation of basis inputs.
///
/// Only nonzero amplitudes are tracked; a basis input fans out by a factor
/// of `d` per H gate and is a permutation or phase otherwise. Local gate
/// matrices are built once per circuit.
pub(crate) struct ColumnSim {
    dim: Dim,
    wires: usize,
    steps: Vec<LocalStep>,
}

struct LocalStep {
    /// Strides of the gate wires, in gate-wire order.
    strides: Vec<usize>,
    /// Nonzero `(row, value)` pairs of each local column.
    columns: Vec<Vec<(usize, Complex64)>>,
}

impl ColumnSim {
    fn new(c: &Circuit) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let steps = c
            .gates
            .iter()
            .map(|g| {
                let m = gate_matrix(g, c.dim);
                let columns = (0..m.ncols())
                    .map(|col| {
                        (0..m.nrows())
                            .filter(|&row| m[[row, col]] != zero)
                            .map(|row| (row, m[[row, col]]))
                            .collect()
                    })
                    .collect();
                let strides = g.wires.iter().map(|&w| c.dim.pow(c.wires - 1 - w)).collect();
                LocalStep { strides, columns }
            })
            .collect();
        ColumnSim {
            dim: c.dim,
            wires: c.wires,
            steps,
        }
    }

    /// Output for the basis input with the given big-endian index.
    pub(crate) fn run(&self, index: usize) -> StateVector {
        let d = self.dim.get();
        let mut entries = vec![(index, Complex64::new(1.0, 0.0))];
        let mut next = Vec::new();
        for step in &self.steps {
            next.clear();
            for &(i, a) in &entries {
                let mut local = 0;
                let mut base = i;
                for &s in &step.strides {
                    let digit = (i / s) % d;
                    local = local * d + digit;
                    base -= digit * s;
                }
                for &(row, v) in &step.columns[local] {
                    let mut j = base;
                    let mut r = row;
                    for &s in step.strides.iter().rev() {
                        j += (r % d) * s;
                        r /= d;
                    }
                    next.push((j, a * v));
                }
            }
            next.sort_by_key(|e| e.0);
            entries.clear();
            for &(j, v) in &next {
                match entries.last_mut() {
                    Some((k, acc)) if *k == j => *acc += v,
                    _ => entries.push((j, v)),
                }
            }
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim.pow(self.wires)];
        for (j, v) in entries {
            amps[j] = v;
        }
        StateVector::from_amplitudes(self.dim, self.wires, amps).expect("unitary gates keep amplitudes finite")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    dim: Dim,
    wires: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(dim: Dim, wires: usize) -> Self {
        Circuit {
            dim,
            wires,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(dim: Dim, wires: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate(wires)?;
        }
        Ok(Circuit { dim, wires, gates })
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.wires)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Same register, different gate list. Gates are assumed valid.
    pub(crate) fn with_gates(&self, gates: Vec<Gate>) -> Circuit {
        Circuit {
            dim: self.dim,
            wires: self.wires,
            gates,
        }
    }

    /// The first `len` gates.
    pub fn prefix(&self, len: usize) -> Circuit {
        self.with_gates(self.gates[..len.min(self.gates.len())].to_vec())
    }

    pub fn same_shape(&self, other: &Circuit) -> Result<()> {
        if self.dim != other.dim || self.wires != other.wires {
            return Err(Error::ShapeMismatch {
                d1: self.dim.get(),
                n1: self.wires,
                d2: other.dim.get(),
                n2: other.wires,
            });
        }
        Ok(())
    }

    pub fn run(&self, input: &BasisState) -> Result<StateVector> {
        if input.len() != self.wires {
            return Err(Error::LengthMismatch {
                expected: self.wires,
                got: input.len(),
            });
        }
        for &digit in input.digits() {
            self.dim.check_digit(digit)?;
        }
        self.run_state(StateVector::basis(self.dim, input))
    }

    pub fn run_state(&self, state: StateVector) -> Result<StateVector> {
        if state.dim() != self.dim || state.wires() != self.wires {
            return Err(Error::ShapeMismatch {
                d1: self.dim.get(),
                n1: self.wires,
                d2: state.dim().get(),
                n2: state.wires(),
            });
        }
        self.gates.iter().try_fold(state, |s, g| s.apply(g))
    }

    /// Reusable simulator for many basis columns of this circuit.
    pub(crate) fn columns(&self) -> ColumnSim {
        ColumnSim::new(self)
    }

    /// Full `d^n × d^n` unitary; column `b` is `run(b)`.
    pub fn unitary(&self) -> Result<Array2<Complex64>> {
        let size = self.dim.pow(self.wires);
        if size > UNITARY_CAP {
            return Err(Error::TooLarge { size, cap: UNITARY_CAP });
        }
        let mut u = Array2::<Complex64>::zeros((size, size));
        let sim = self.columns();
        for col in 0..size {
            let out = sim.run(col);
            for (row, &a) in out.amplitudes().iter().enumerate() {
                u[[row, col]] = a;
            }
        }
        Ok(u)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CircuitRepr::from(self)).expect("circuit serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&CircuitRepr::from(self)).expect("circuit serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: CircuitRepr = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        repr.try_into()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateRepr {
    kind: String,
    wires: Vec<usize>,
    #[serde(default)]
    dagger: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct CircuitRepr {
    d: usize,
    wires: usize,
    gates: Vec<GateRepr>,
}

impl From<&Circuit> for CircuitRepr {
    fn from(c: &Circuit) -> Self {
        CircuitRepr {
            d: c.dim.get(),
            wires: c.wires,
            gates: c
                .gates
                .iter()
                .map(|g| GateRepr {
                    kind: g.kind.name().to_string(),
                    wires: g.wires.clone(),
                    dagger: g.dagger,
                })
                .collect(),
        }
    }
}

impl TryFrom<CircuitRepr> for Circuit {
    type Error = Error;

    fn try_from(repr: CircuitRepr) -> Result<Self> {
        let dim = Dim::new(repr.d)?;
        let mut gates = Vec::with_capacity(repr.gates.len());
        for (index, g) in repr.gates.into_iter().enumerate() {
            let invalid = |reason: String| Error::InvalidGate { index, reason };
            let kind: GateKind = g.kind.parse().map_err(invalid)?;
            let gate = Gate::new(kind, g.wires, g.dagger).map_err(|e| invalid(e.to_string()))?;
            gate.validate(repr.wires).map_err(|e| invalid(e.to_string()))?;
            gates.push(gate);
        }
        Ok(Circuit {
            dim,
            wires: repr.wires,
            gates,
        })
    }
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CircuitRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = CircuitRepr::deserialize(de)?;
        Circuit::try_from(repr).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    fn stage_a(d: usize) -> Circuit {
        Circuit::from_gates(dim(d), 4, vec![Gate::cx(0, 2), Gate::cx(1, 3)]).unwrap()
    }

    #[test]
    fn classical_circuit_copies_digits() {
        let c = stage_a(2);
        let out = c.run(&BasisState::new(dim(2), vec![1, 0, 0, 0]).unwrap()).unwrap();
        let expected = StateVector::basis(dim(2), &BasisState::new(dim(2), vec![1, 0, 1, 0]).unwrap());
        assert_eq!(out, expected);
    }

    #[test]
    fn empty_circuit() {
        let c = Circuit::new(dim(3), 2);
        let b = BasisState::new(dim(3), vec![2, 1]).unwrap();
        assert_eq!(c.run(&b).unwrap(), StateVector::basis(dim(3), &b));
        let u = c.unitary().unwrap();
        assert_eq!(u, Array2::from_diag_elem(9, Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn run_rejects_bad_input() {
        let c = stage_a(3);
        assert!(matches!(
            c.run(&BasisState::zeros(3)),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(c.run(&BasisState::new(dim(4), vec![3, 0, 0, 0]).unwrap()).is_err());
    }

    #[test]
    fn single_hadamard_unitary() {
        let c = Circuit::from_gates(dim(2), 1, vec![Gate::h(0)]).unwrap();
        let u = c.unitary().unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let signs = [[1.0, 1.0], [1.0, -1.0]];
        for r in 0..2 {
            for col in 0..2 {
                assert!((u[[r, col]] - Complex64::new(signs[r][col] * s, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn doubled_cnot_is_identity() {
        let c = Circuit::from_gates(dim(2), 2, vec![Gate::cx(0, 1), Gate::cx(0, 1)]).unwrap();
        assert_eq!(
            c.unitary().unwrap(),
            Array2::from_diag_elem(4, Complex64::new(1.0, 0.0))
        );
    }

    #[test]
    fn sparse_columns_match_dense_run() {
        for d in [2, 3, 4] {
            let gates = vec![
                Gate::h(1),
                Gate::cx(1, 3),
                Gate::h(3).dag(),
                Gate::cz(3, 0).dag(),
                Gate::x(2),
                Gate::z(1),
                Gate::cx(2, 0).dag(),
                Gate::h(1),
            ];
            let c = Circuit::from_gates(dim(d), 4, gates).unwrap();
            let sim = c.columns();
            for col in 0..dim(d).pow(4) {
                let dense = c.run(&BasisState::from_index(dim(d), 4, col)).unwrap();
                assert!(sim.run(col).max_deviation(&dense) <= 1e-14, "d={d} col={col}");
            }
        }
    }

    #[test]
    fn unitary_cap() {
        let c = Circuit::new(dim(16), 5);
        assert!(matches!(c.unitary(), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn json_round_trip() {
        let c = stage_a(3);
        let text = c.to_json();
        assert_eq!(
            text,
            r#"{"d":3,"wires":4,"gates":[{"kind":"CX","wires":[0,2],"dagger":false},{"kind":"CX","wires":[1,3],"dagger":false}]}"#
        );
        assert_eq!(Circuit::from_json(&text).unwrap(), c);
    }

    #[test]
    fn json_validation() {
        let bad_kind = r#"{"d":2,"wires":2,"gates":[{"kind":"CY","wires":[0,1],"dagger":false}]}"#;
        assert!(matches!(
            Circuit::from_json(bad_kind),
            Err(Error::InvalidGate { index: 0, .. })
        ));

        let repeated = r#"{"d":2,"wires":2,"gates":[{"kind":"CX","wires":[1,1],"dagger":false}]}"#;
        assert!(matches!(
            Circuit::from_json(repeated),
            Err(Error::InvalidGate { index: 0, .. })
        ));

        let out_of_range = r#"{"d":2,"wires":2,"gates":[{"kind":"H","wires":[2],"dagger":false}]}"#;
        assert!(matches!(
            Circuit::from_json(out_of_range),
            Err(Error::InvalidGate { .. })
        ));

        let bad_dim = r#"{"d":1,"wires":2,"gates":[]}"#;
        assert!(matches!(Circuit::from_json(bad_dim), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn json_parse_error_has_position() {
        let text = "{\"d\":2,\n\"wires\":2,\n\"gates\":[oops]}";
        match Circuit::from_json(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
