//! Qudit states and the five gate families `H`, `X`, `Z`, `cX`, `cZ`.
//!
//! Wires are numbered top to bottom from 0 and the amplitude array is
//! big-endian in the wire digits. `H` carries a positive phase exponent;
//! `Z` and `cZ` carry negative ones, so that `cZ` is `Z` raised to the
//! control digit.

mod dim;
mod gate;
mod state;

pub use dim::{root_of_unity, Dim, MAX_DIM, MIN_DIM};
pub use gate::{gate_matrix, Gate, GateKind};
pub use state::{Amplitude, BasisState, StateVector};

/// Free-function form of [`StateVector::apply`].
pub fn apply(state: &StateVector, gate: &Gate) -> crate::Result<StateVector> {
    state.apply(gate)
}

/// Free-function form of [`Gate::adjoint`].
pub fn adjoint(gate: &Gate) -> Gate {
    gate.adjoint()
}
