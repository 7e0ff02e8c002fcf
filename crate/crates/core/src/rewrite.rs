//! Rewrite rules and the scripted deconstruction of the classical two-cX
//! circuit into the dense-coding circuit.
//!
//! Every rule is local and checked: R1–R4 must preserve the full unitary,
//! R5 only preserves outputs on a constrained input family and proves that
//! before removing anything. At `d = 2` the rules emit undaggered gates,
//! since every gate in the set is then self-adjoint.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::equivalence::{
    constrained_equal, unitary_equal, EquivalenceReport, InputConstraint, PhaseMode, DEFAULT_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::qudit::{Dim, Gate, GateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleId {
    #[serde(rename = "R1_EXPAND_CX")]
    ExpandCx,
    #[serde(rename = "R2_INSERT_PAIR")]
    InsertPair,
    #[serde(rename = "R3_COMMUTE")]
    Commute,
    #[serde(rename = "R4_SPLIT_SHARED_TARGET")]
    SplitSharedTarget,
    #[serde(rename = "R5_DROP_CONSTRAINED_IDENTITY")]
    DropConstrainedIdentity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Soundness {
    /// Preserves the full unitary.
    Unconditional,
    /// Preserves outputs only on inputs satisfying an [`InputConstraint`].
    Conditional,
}

impl RuleId {
    pub fn soundness(self) -> Soundness {
        match self {
            RuleId::DropConstrainedIdentity => Soundness::Conditional,
            _ => Soundness::Unconditional,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleId::ExpandCx => "R1_EXPAND_CX",
            RuleId::InsertPair => "R2_INSERT_PAIR",
            RuleId::Commute => "R3_COMMUTE",
            RuleId::SplitSharedTarget => "R4_SPLIT_SHARED_TARGET",
            RuleId::DropConstrainedIdentity => "R5_DROP_CONSTRAINED_IDENTITY",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn not_applicable(rule: RuleId, pos: usize, reason: impl Into<String>) -> Error {
    Error::RuleNotApplicable {
        rule: rule.name(),
        pos,
        reason: reason.into(),
    }
}

fn gate_at(c: &Circuit, rule: RuleId, pos: usize) -> Result<&Gate> {
    c.gates()
        .get(pos)
        .ok_or_else(|| not_applicable(rule, pos, format!("circuit has {} gates", c.len())))
}

fn splice(c: &Circuit, range: std::ops::Range<usize>, with: Vec<Gate>) -> Circuit {
    let mut gates = c.gates().to_vec();
    gates.splice(range, with);
    c.with_gates(gates)
}

/// R1: `cX(c→t)` becomes `[H(t), cZ†(c,t), H†(t)]`.
pub fn expand_cx(c: &Circuit, pos: usize) -> Result<Circuit> {
    let rule = RuleId::ExpandCx;
    let g = gate_at(c, rule, pos)?;
    if g.kind != GateKind::CX || g.dagger {
        return Err(not_applicable(rule, pos, format!("{g} is not an undaggered cX")));
    }
    let (ctrl, tgt) = (g.wires[0], g.wires[1]);
    let dim = c.dim();
    let replacement = vec![
        Gate::h(tgt).normalized(dim),
        Gate::cz(ctrl, tgt).dag().normalized(dim),
        Gate::h(tgt).dag().normalized(dim),
    ];
    Ok(splice(c, pos..pos + 1, replacement))
}

/// R2: inserts `[g, g†]` before position `pos`.
pub fn insert_pair(c: &Circuit, pos: usize, g: &Gate) -> Result<Circuit> {
    let rule = RuleId::InsertPair;
    if pos > c.len() {
        return Err(not_applicable(rule, pos, format!("circuit has {} gates", c.len())));
    }
    g.validate(c.wires())?;
    let dim = c.dim();
    let pair = vec![g.clone().normalized(dim), g.adjoint().normalized(dim)];
    Ok(splice(c, pos..pos, pair))
}

/// Inverse of R2: removes `gates[pos], gates[pos+1]` when the second is the
/// adjoint of the first.
pub fn cancel_pair(c: &Circuit, pos: usize) -> Result<Circuit> {
    let rule = RuleId::InsertPair;
    let a = gate_at(c, rule, pos)?;
    let b = gate_at(c, rule, pos + 1)?;
    let dim = c.dim();
    if a.adjoint().normalized(dim) != b.clone().normalized(dim) {
        return Err(not_applicable(rule, pos, format!("{a} and {b} are not adjoint")));
    }
    Ok(splice(c, pos..pos + 2, Vec::new()))
}

/// Reason two neighbouring gates may be swapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// No wire in common.
    DisjointWires,
    /// One gate is diagonal and touches the other only on its control.
    DiagonalOnControl,
    /// Both are controlled bit rotations (either direction) onto the same
    /// target from distinct controls; target shifts add and so commute.
    SharedTargetShifts,
}

pub fn commutation_criterion(a: &Gate, b: &Gate) -> Option<Criterion> {
    let shared: Vec<usize> = a.wires.iter().copied().filter(|&w| b.touches(w)).collect();
    if shared.is_empty() {
        return Some(Criterion::DisjointWires);
    }
    let diagonal_on_control = |diag: &Gate, other: &Gate| {
        diag.kind.is_diagonal() && other.kind == GateKind::CX && shared.iter().all(|&w| Some(w) == other.control())
    };
    if diagonal_on_control(a, b) || diagonal_on_control(b, a) {
        return Some(Criterion::DiagonalOnControl);
    }
    if a.kind == GateKind::CX && b.kind == GateKind::CX && a.target() == b.target() && a.control() != b.control() {
        return Some(Criterion::SharedTargetShifts);
    }
    None
}

/// R3: swaps `gates[pos]` and `gates[pos+1]` if they commute by one of the
/// admitted criteria.
pub fn commute(c: &Circuit, pos: usize) -> Result<Circuit> {
    let rule = RuleId::Commute;
    let a = gate_at(c, rule, pos)?;
    let b = gate_at(c, rule, pos + 1)?;
    if commutation_criterion(a, b).is_none() {
        return Err(not_applicable(
            rule,
            pos,
            format!("{a} and {b} do not commute by an admitted criterion"),
        ));
    }
    let mut gates = c.gates().to_vec();
    gates.swap(pos, pos + 1);
    Ok(c.with_gates(gates))
}

/// R4: `[cX(a→t), cX(b→t)]` becomes `[cX(a→b), cX(b→t), cX†(a→b)]`.
///
/// Both forms leave `a` and `b` unchanged and add `a ⊞ b` to `t`.
pub fn split_shared_target(c: &Circuit, pos: usize) -> Result<Circuit> {
    let rule = RuleId::SplitSharedTarget;
    let g1 = gate_at(c, rule, pos)?;
    let g2 = gate_at(c, rule, pos + 1)?;
    let plain_cx = |g: &Gate| g.kind == GateKind::CX && !g.dagger;
    if !plain_cx(g1) || !plain_cx(g2) {
        return Err(not_applicable(
            rule,
            pos,
            format!("{g1}, {g2} are not two undaggered cX gates"),
        ));
    }
    let (a, t) = (g1.wires[0], g1.wires[1]);
    let b = g2.wires[0];
    if g2.wires[1] != t {
        return Err(not_applicable(rule, pos, "targets differ"));
    }
    if a == b {
        return Err(not_applicable(rule, pos, "controls coincide"));
    }
    let dim = c.dim();
    let replacement = vec![Gate::cx(a, b), Gate::cx(b, t), Gate::cx(a, b).dag().normalized(dim)];
    Ok(splice(c, pos..pos + 2, replacement))
}

/// R5: removes the cX or cX† at `pos` after checking that, on every input
/// allowed by `constraint`, the circuit prefix ending at `pos` produces the
/// same state with and without it.
pub fn drop_constrained_identity(c: &Circuit, pos: usize, constraint: &InputConstraint, tol: f64) -> Result<Circuit> {
    let rule = RuleId::DropConstrainedIdentity;
    let g = gate_at(c, rule, pos)?;
    if g.kind != GateKind::CX {
        return Err(not_applicable(rule, pos, format!("{g} is not a cX or cX†")));
    }
    let with = c.prefix(pos + 1);
    let without = c.prefix(pos);
    let report = constrained_equal(&with, &without, constraint, tol, PhaseMode::Exact)?;
    if !report.pass {
        return Err(Error::NotDroppable {
            pos,
            report: Box::new(report),
        });
    }
    Ok(splice(c, pos..pos + 1, Vec::new()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub rule: RuleId,
    pub positions: Vec<usize>,
    pub report: EquivalenceReport,
}

/// Stages a–f of the deconstruction and the verified steps between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeconstructionTrace {
    pub d: Dim,
    pub stages: Vec<Circuit>,
    pub steps: Vec<Step>,
}

pub const STAGE_LABELS: [char; 6] = ['a', 'b', 'c', 'd', 'e', 'f'];

impl DeconstructionTrace {
    pub fn stage(&self, label: char) -> Option<&Circuit> {
        STAGE_LABELS
            .iter()
            .position(|&l| l == label)
            .and_then(|i| self.stages.get(i))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Constraint under which R5 drops the leftmost cX: Bob's first qudit
/// starts in `|0⟩`.
pub fn drop_constraint() -> InputConstraint {
    InputConstraint::none().with(2, 0)
}

/// Both of Bob's qudits start in `|0⟩`.
pub fn bob_constraint() -> InputConstraint {
    InputConstraint::none().with(2, 0).with(3, 0)
}

/// The adjacent swaps taking stage c to stage d: cX†(2→3) past cZ†(0,2),
/// then cX(1→3) leftwards to just after H(2).
pub const STAGE_D_SWAPS: [usize; 5] = [2, 4, 3, 2, 1];

/// The six stages written out directly, for cross-checking the pipeline.
pub fn canonical_stages(dim: Dim) -> [Circuit; 6] {
    let n = |g: Gate| g.normalized(dim);
    let (h, hd) = (Gate::h(2), n(Gate::h(2).dag()));
    let czd = n(Gate::cz(0, 2).dag());
    let cx23d = n(Gate::cx(2, 3).dag());
    let cx12d = n(Gate::cx(1, 2).dag());
    let build = |gates: Vec<Gate>| Circuit::from_gates(dim, 4, gates).expect("fixed stage layout");
    [
        build(vec![Gate::cx(0, 2), Gate::cx(1, 3)]),
        build(vec![h.clone(), czd.clone(), hd.clone(), Gate::cx(1, 3)]),
        build(vec![
            h.clone(),
            Gate::cx(2, 3),
            cx23d.clone(),
            czd.clone(),
            hd.clone(),
            Gate::cx(1, 3),
        ]),
        build(vec![
            h.clone(),
            Gate::cx(1, 3),
            Gate::cx(2, 3),
            czd.clone(),
            cx23d.clone(),
            hd.clone(),
        ]),
        build(vec![
            h.clone(),
            Gate::cx(1, 2),
            Gate::cx(2, 3),
            cx12d.clone(),
            czd.clone(),
            cx23d.clone(),
            hd.clone(),
        ]),
        build(vec![h, Gate::cx(2, 3), cx12d, czd, cx23d, hd]),
    ]
}

fn require(step: &str, report: EquivalenceReport) -> Result<EquivalenceReport> {
    if report.pass {
        Ok(report)
    } else {
        Err(Error::VerificationFailed {
            step: step.to_string(),
            report: Box::new(report),
        })
    }
}

fn exact(before: &Circuit, after: &Circuit, tol: f64) -> Result<EquivalenceReport> {
    unitary_equal(before, after, tol, PhaseMode::Exact)
}

/// Runs the scripted deconstruction at the default tolerance.
pub fn deconstruct_pipeline(dim: Dim) -> Result<DeconstructionTrace> {
    deconstruct_pipeline_with(dim, DEFAULT_TOLERANCE)
}

/// Runs the scripted deconstruction, verifying every rule application.
///
/// Steps a→b through d→e are checked for exact unitary equality; e→f for
/// equality on inputs with wire 2 in `|0⟩`. Any failed check aborts with
/// its report.
pub fn deconstruct_pipeline_with(dim: Dim, tol: f64) -> Result<DeconstructionTrace> {
    let a = Circuit::from_gates(dim, 4, vec![Gate::cx(0, 2), Gate::cx(1, 3)])?;

    let b = expand_cx(&a, 0)?;
    let ab = require("a→b", exact(&a, &b, tol)?)?;

    let c = insert_pair(&b, 1, &Gate::cx(2, 3))?;
    let bc = require("b→c", exact(&b, &c, tol)?)?;

    let mut d = c.clone();
    for &pos in &STAGE_D_SWAPS {
        let next = commute(&d, pos)?;
        require("c→d", exact(&d, &next, tol)?)?;
        d = next;
    }
    let cd = require("c→d", exact(&c, &d, tol)?)?;

    let e = split_shared_target(&d, 1)?;
    let de = require("d→e", exact(&d, &e, tol)?)?;

    let constraint = drop_constraint();
    let f = drop_constrained_identity(&e, 1, &constraint, tol)?;
    let ef = require("e→f", constrained_equal(&e, &f, &constraint, tol, PhaseMode::Exact)?)?;

    let step = |rule, positions: &[usize], report| Step {
        rule,
        positions: positions.to_vec(),
        report,
    };
    Ok(DeconstructionTrace {
        d: dim,
        stages: vec![a, b, c, d, e, f],
        steps: vec![
            step(RuleId::ExpandCx, &[0], ab),
            step(RuleId::InsertPair, &[1], bc),
            step(RuleId::Commute, &STAGE_D_SWAPS, cd),
            step(RuleId::SplitSharedTarget, &[1], de),
            step(RuleId::DropConstrainedIdentity, &[1], ef),
        ],
    })
}
