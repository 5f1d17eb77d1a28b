//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered list of one- and two-qubit [`Gate`]s over
//! `width` virtual qubits. Program order is the gate list order; the
//! per-qubit subsequences define the dependencies captured by
//! [`DependencyDag`].
//!
//! The text format is a strict subset of cQASM 1.0, handled by
//! [`parse_circuit`] and [`serialize_circuit`].

mod dag;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use dag::{dependency_dag, DependencyDag};
pub use parse::{
    format_real, parse_circuit, parse_lines, serialize_circuit, write_gate_line, Directive,
    ParseError, ParsedLine,
};

/// Gate mnemonic without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateTag {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    Cnot,
    Cz,
    Cphase,
    Swap,
    Teleswap,
}

impl GateTag {
    pub const ALL: [GateTag; 16] = [
        GateTag::H,
        GateTag::X,
        GateTag::Y,
        GateTag::Z,
        GateTag::S,
        GateTag::Sdg,
        GateTag::T,
        GateTag::Tdg,
        GateTag::Rx,
        GateTag::Ry,
        GateTag::Rz,
        GateTag::Cnot,
        GateTag::Cz,
        GateTag::Cphase,
        GateTag::Swap,
        GateTag::Teleswap,
    ];

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateTag::H => "h",
            GateTag::X => "x",
            GateTag::Y => "y",
            GateTag::Z => "z",
            GateTag::S => "s",
            GateTag::Sdg => "sdg",
            GateTag::T => "t",
            GateTag::Tdg => "tdg",
            GateTag::Rx => "rx",
            GateTag::Ry => "ry",
            GateTag::Rz => "rz",
            GateTag::Cnot => "cnot",
            GateTag::Cz => "cz",
            GateTag::Cphase => "cphase",
            GateTag::Swap => "swap",
            GateTag::Teleswap => "teleswap",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<GateTag> {
        GateTag::ALL.iter().copied().find(|t| t.mnemonic() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            GateTag::Cnot | GateTag::Cz | GateTag::Cphase | GateTag::Swap | GateTag::Teleswap => 2,
            _ => 1,
        }
    }

    pub fn has_angle(self) -> bool {
        matches!(
            self,
            GateTag::Rx | GateTag::Ry | GateTag::Rz | GateTag::Cphase
        )
    }

    pub fn is_single_qubit(self) -> bool {
        self.arity() == 1
    }
}

impl fmt::Display for GateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

/// A gate kind together with its rotation angle, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Cnot,
    Cz,
    Cphase(f64),
    Swap,
    /// Inter-core teleportation realised as an exchange of two qubits.
    /// Only the mapper emits it.
    TeleSwap,
}

impl GateKind {
    pub fn tag(&self) -> GateTag {
        match self {
            GateKind::H => GateTag::H,
            GateKind::X => GateTag::X,
            GateKind::Y => GateTag::Y,
            GateKind::Z => GateTag::Z,
            GateKind::S => GateTag::S,
            GateKind::Sdg => GateTag::Sdg,
            GateKind::T => GateTag::T,
            GateKind::Tdg => GateTag::Tdg,
            GateKind::Rx(_) => GateTag::Rx,
            GateKind::Ry(_) => GateTag::Ry,
            GateKind::Rz(_) => GateTag::Rz,
            GateKind::Cnot => GateTag::Cnot,
            GateKind::Cz => GateTag::Cz,
            GateKind::Cphase(_) => GateTag::Cphase,
            GateKind::Swap => GateTag::Swap,
            GateKind::TeleSwap => GateTag::Teleswap,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::Rx(a) | GateKind::Ry(a) | GateKind::Rz(a) | GateKind::Cphase(a) => Some(a),
            _ => None,
        }
    }

    /// Builds a kind from its tag and optional angle. Returns `None` when
    /// the angle presence does not match the tag.
    pub fn from_parts(tag: GateTag, angle: Option<f64>) -> Option<GateKind> {
        let kind = match (tag, angle) {
            (GateTag::Rx, Some(a)) => GateKind::Rx(a),
            (GateTag::Ry, Some(a)) => GateKind::Ry(a),
            (GateTag::Rz, Some(a)) => GateKind::Rz(a),
            (GateTag::Cphase, Some(a)) => GateKind::Cphase(a),
            (_, Some(_)) => return None,
            (t, None) if t.has_angle() => return None,
            (GateTag::H, None) => GateKind::H,
            (GateTag::X, None) => GateKind::X,
            (GateTag::Y, None) => GateKind::Y,
            (GateTag::Z, None) => GateKind::Z,
            (GateTag::S, None) => GateKind::S,
            (GateTag::Sdg, None) => GateKind::Sdg,
            (GateTag::T, None) => GateKind::T,
            (GateTag::Tdg, None) => GateKind::Tdg,
            (GateTag::Cnot, None) => GateKind::Cnot,
            (GateTag::Cz, None) => GateKind::Cz,
            (GateTag::Swap, None) => GateKind::Swap,
            (GateTag::Teleswap, None) => GateKind::TeleSwap,
            (_, None) => unreachable!(),
        };
        Some(kind)
    }

    pub fn arity(&self) -> usize {
        self.tag().arity()
    }
}

/// A gate applied to one or two virtual qubits.
#[derive(Debug, Clone)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    /// Line of the source file the gate was read from, if parsed.
    pub source_line: Option<usize>,
}

/// Equality ignores `source_line`.
impl PartialEq for Gate {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.qubits == other.qubits
    }
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Self {
        Gate {
            kind,
            qubits,
            source_line: None,
        }
    }

    pub fn single(kind: GateKind, q: usize) -> Self {
        Gate::new(kind, vec![q])
    }

    pub fn pair(kind: GateKind, a: usize, b: usize) -> Self {
        Gate::new(kind, vec![a, b])
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits.len() == 2
    }

    pub fn touches(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_gate_line(&mut s, self);
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("circuit width must be at least 1")]
    ZeroWidth,
    #[error("gate {index}: {tag} expects {expected} operand(s), got {got}")]
    Arity {
        index: usize,
        tag: GateTag,
        expected: usize,
        got: usize,
    },
    #[error("gate {index}: qubit index {qubit} out of range for width {width}")]
    QubitOutOfRange {
        index: usize,
        qubit: usize,
        width: usize,
    },
    #[error("gate {index}: duplicate operand q[{qubit}]")]
    DuplicateOperand { index: usize, qubit: usize },
    #[error("gate {index}: angle must be finite")]
    NonFiniteAngle { index: usize },
    #[error("gate {index}: teleswap is not allowed in a source circuit")]
    TeleswapInSource { index: usize },
}

/// An ordered list of gates over `width` virtual qubits.
///
/// Equality compares `width` and `gates`; `name` is only a label.
#[derive(Debug, Clone)]
pub struct Circuit {
    pub name: String,
    pub width: usize,
    pub gates: Vec<Gate>,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.gates == other.gates
    }
}

impl Circuit {
    pub fn new(name: impl Into<String>, width: usize) -> Self {
        Circuit {
            name: name.into(),
            width,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Checks every gate invariant. TELESWAP is rejected: source circuits
    /// never carry it.
    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.width == 0 {
            return Err(CircuitError::ZeroWidth);
        }
        for (index, gate) in self.gates.iter().enumerate() {
            validate_gate(index, gate, self.width)?;
            if gate.kind == GateKind::TeleSwap {
                return Err(CircuitError::TeleswapInSource { index });
            }
        }
        Ok(())
    }

    /// Field-wise equality with angles compared to within `tol`.
    pub fn approx_eq(&self, other: &Circuit, tol: f64) -> bool {
        self.width == other.width
            && self.gates.len() == other.gates.len()
            && self.gates.iter().zip(&other.gates).all(|(a, b)| {
                a.qubits == b.qubits
                    && a.kind.tag() == b.kind.tag()
                    && match (a.kind.angle(), b.kind.angle()) {
                        (Some(x), Some(y)) => (x - y).abs() <= tol,
                        (None, None) => true,
                        _ => false,
                    }
            })
    }

    /// Appends idle qubits until the circuit is `width` wide.
    pub fn padded(&self, width: usize) -> Circuit {
        let mut c = self.clone();
        c.width = c.width.max(width);
        c
    }
}

pub(crate) fn validate_gate(index: usize, gate: &Gate, width: usize) -> Result<(), CircuitError> {
    let tag = gate.kind.tag();
    if gate.qubits.len() != tag.arity() {
        return Err(CircuitError::Arity {
            index,
            tag,
            expected: tag.arity(),
            got: gate.qubits.len(),
        });
    }
    for &q in &gate.qubits {
        if q >= width {
            return Err(CircuitError::QubitOutOfRange {
                index,
                qubit: q,
                width,
            });
        }
    }
    if gate.qubits.len() == 2 && gate.qubits[0] == gate.qubits[1] {
        return Err(CircuitError::DuplicateOperand {
            index,
            qubit: gate.qubits[0],
        });
    }
    if let Some(a) = gate.kind.angle() {
        if !a.is_finite() {
            return Err(CircuitError::NonFiniteAngle { index });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateStats {
    pub total: usize,
    pub two_qubit: usize,
    pub per_kind: BTreeMap<GateTag, usize>,
    pub two_qubit_fraction: f64,
}

pub fn gate_stats(c: &Circuit) -> GateStats {
    let mut per_kind = BTreeMap::new();
    let mut two_qubit = 0;
    for g in &c.gates {
        *per_kind.entry(g.kind.tag()).or_insert(0) += 1;
        if g.is_two_qubit() {
            two_qubit += 1;
        }
    }
    let total = c.gates.len();
    GateStats {
        total,
        two_qubit,
        per_kind,
        two_qubit_fraction: if total == 0 {
            0.0
        } else {
            two_qubit as f64 / total as f64
        },
    }
}
