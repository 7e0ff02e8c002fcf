//! Qudit circuit simulation, equivalence checking and rewriting, built around
//! one derivation: turning the classical circuit that copies two digits over
//! two direct couplings into the dense-coding circuit, for any dimension
//! `d ≥ 2`.
//!
//! - [`qudit`]: states and the `H`, `X`, `Z`, `cX`, `cZ` gate families.
//! - [`circuit`]: gate lists, simulation, unitaries, JSON and ASCII output.
//! - [`equivalence`]: exact, global-phase and input-constrained equality.
//! - [`rewrite`]: the five rewrite rules and the scripted a–f pipeline.
//! - [`densecoding`]: Bell states, encoding, decoding and cross-checks.
//! - [`cli`]: the `qudense` command line.

pub mod circuit;
pub mod cli;
pub mod densecoding;
pub mod equivalence;
mod error;
pub mod qudit;
pub mod rewrite;

pub use circuit::{render_ascii, AsciiStyle, Circuit};
pub use equivalence::{constrained_equal, unitary_equal, EquivalenceReport, InputConstraint, PhaseMode};
pub use error::{Error, Result};
pub use qudit::{BasisState, Dim, Gate, GateKind, StateVector};
pub use rewrite::{deconstruct_pipeline, DeconstructionTrace, RuleId};
