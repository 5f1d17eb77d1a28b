//! Multi-core compilation: time slicing, per-slice qubit-to-core
//! partitioning with lookahead, and teleport-swap insertion between slices.

mod compiled;
mod lookahead;
mod oracle;
mod partition;
mod slicing;
mod teleport;

use serde::{Deserialize, Serialize};

use crate::arch::Architecture;
use crate::circuit::{Circuit, CircuitError};

pub use compiled::{parse_compiled, write_compiled, CompiledParseError};
pub use lookahead::{lookahead_graph, Edge, InteractionGraph};
pub use oracle::{optimal_oracle, ORACLE_MAX_CORES, ORACLE_MAX_QUBITS, ORACLE_MAX_SLICES};
pub use partition::{block_assignment, initial_partition, refine_partition};
pub use slicing::{slice_circuit, slice_pairs, Timeslice};
pub use teleport::{apply_teleports, insert_teleports, TeleportOp};

pub const DEFAULT_LOOKAHEAD: usize = 16;
pub const DEFAULT_DECAY: f64 = 0.5;
pub const DEFAULT_MIGRATION_PENALTY: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MapperOptions {
    /// Number of slices after the current one that contribute weight.
    pub lookahead: usize,
    /// Weight factor per slice of distance.
    pub decay: f64,
    pub migration_penalty: f64,
    /// Exchange limit per slice; `None` means ten times the width.
    pub max_passes: Option<usize>,
    /// Recorded for reproducibility. The heuristic itself is deterministic.
    pub seed: u64,
    /// Append idle qubits so the circuit fills every core.
    pub pad: bool,
}

impl Default for MapperOptions {
    fn default() -> Self {
        MapperOptions {
            lookahead: DEFAULT_LOOKAHEAD,
            decay: DEFAULT_DECAY,
            migration_penalty: DEFAULT_MIGRATION_PENALTY,
            max_passes: None,
            seed: 0,
            pad: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MapperError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("circuit width {width} does not match platform size {total} (use padding to fill)")]
    WidthMismatch { width: usize, total: usize },
    #[error("cannot co-locate q[{a}] and q[{b}]")]
    Unsatisfiable { a: usize, b: usize },
    #[error("no balanced placement co-locates the pairs of slice {0}")]
    NoPlacement(usize),
    #[error("assignments are not balanced over the same qubits")]
    Unbalanced,
    #[error(
        "instance too large for the exact oracle ({qubits} qubits, {cores} cores, {slices} slices)"
    )]
    OracleGuard {
        qubits: usize,
        cores: usize,
        slices: usize,
    },
    #[error("invalid mapper option: {0}")]
    Options(String),
    #[error("inconsistent program: {0}")]
    Inconsistent(String),
}

/// Per-slice placement of virtual qubits on cores, stored as the slice-0
/// placement; later slices follow by replaying the teleports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub initial: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledProgram {
    pub source: Circuit,
    pub slices: Vec<Timeslice>,
    pub assignment: Assignment,
    /// Ordered by slice boundary, then by execution order.
    pub teleports: Vec<TeleportOp>,
    pub options: MapperOptions,
    pub num_cores: usize,
    pub capacity: usize,
}

impl CompiledProgram {
    pub fn width(&self) -> usize {
        self.source.width
    }

    /// Teleports executed between slices `s` and `s + 1`.
    pub fn teleports_after(&self, s: usize) -> &[TeleportOp] {
        let lo = self.teleports.partition_point(|op| op.between.0 < s);
        let hi = self.teleports.partition_point(|op| op.between.0 <= s);
        &self.teleports[lo..hi]
    }

    /// Number of teleports between slice `k - 1` and `k`, indexed by `k`;
    /// entry 0 is always 0.
    pub fn teleports_per_slice(&self) -> Vec<usize> {
        let mut v = vec![0; self.slices.len()];
        for op in &self.teleports {
            v[op.between.1] += 1;
        }
        v
    }

    /// Calls `f(s, placement)` for every slice in order.
    pub fn for_each_placement(&self, mut f: impl FnMut(usize, &[usize])) {
        let mut cur = self.assignment.initial.clone();
        for s in 0..self.slices.len() {
            if s > 0 {
                apply_teleports(&mut cur, self.teleports_after(s - 1));
            }
            f(s, &cur);
        }
    }

    pub fn placement_at(&self, s: usize) -> Vec<usize> {
        let mut cur = self.assignment.initial.clone();
        let hi = self.teleports.partition_point(|op| op.between.1 <= s);
        apply_teleports(&mut cur, &self.teleports[..hi]);
        cur
    }

    /// Checks co-location, conservation, order preservation and teleport
    /// soundness.
    pub fn verify(&self) -> Result<(), MapperError> {
        let bad = |m: String| Err(MapperError::Inconsistent(m));
        let n = self.width();
        if n != self.num_cores * self.capacity {
            return bad(format!(
                "width {n} differs from {} cores x {} qubits",
                self.num_cores, self.capacity
            ));
        }
        if self.assignment.initial.len() != n {
            return bad(format!(
                "initial placement covers {} qubits, expected {n}",
                self.assignment.initial.len()
            ));
        }

        // Every gate exactly once, per-qubit order kept.
        let mut seen = vec![false; self.source.gates.len()];
        let mut last: Vec<Option<usize>> = vec![None; n];
        for (k, slice) in self.slices.iter().enumerate() {
            if slice.index != k {
                return bad(format!("slice {} found at position {k}", slice.index));
            }
            let mut partner: Vec<Option<usize>> = vec![None; n];
            for &gi in &slice.gates {
                let Some(g) = self.source.gates.get(gi) else {
                    return bad(format!("slice {k}: gate index {gi} out of range"));
                };
                if std::mem::replace(&mut seen[gi], true) {
                    return bad(format!("gate {gi} appears twice"));
                }
                for &q in &g.qubits {
                    if last[q].is_some_and(|l| l > gi) {
                        return bad(format!("slice {k}: gate {gi} reorders q[{q}]"));
                    }
                    last[q] = Some(gi);
                }
                if let &[a, b] = g.qubits.as_slice() {
                    for (q, p) in [(a, b), (b, a)] {
                        if partner[q].replace(p).is_some_and(|old| old != p) {
                            return bad(format!("slice {k}: q[{q}] interacts with two qubits"));
                        }
                    }
                }
            }
        }
        if let Some(gi) = seen.iter().position(|s| !s) {
            return bad(format!("gate {gi} is not in any slice"));
        }

        for (i, op) in self.teleports.iter().enumerate() {
            if op.between.1 != op.between.0 + 1 || op.between.1 >= self.slices.len() {
                return bad(format!(
                    "teleport {i}: invalid slice boundary {:?}",
                    op.between
                ));
            }
            if i > 0 && self.teleports[i - 1].between.0 > op.between.0 {
                return bad(format!("teleport {i}: out of order"));
            }
            if op.qubits.0 >= n || op.qubits.1 >= n || op.qubits.0 == op.qubits.1 {
                return bad(format!("teleport {i}: invalid qubits {:?}", op.qubits));
            }
        }

        let mut cur = self.assignment.initial.clone();
        for s in 0..self.slices.len() {
            if s > 0 {
                for op in self.teleports_after(s - 1) {
                    let (a, b) = op.qubits;
                    if (cur[a], cur[b]) != op.cores || cur[a] == cur[b] {
                        return bad(format!(
                            "teleport q[{a}], q[{b}] before slice {s}: recorded cores {:?}, actual ({}, {})",
                            op.cores, cur[a], cur[b]
                        ));
                    }
                    cur.swap(a, b);
                }
            }
            let mut load = vec![0usize; self.num_cores];
            for (q, &c) in cur.iter().enumerate() {
                if c >= self.num_cores {
                    return bad(format!("slice {s}: q[{q}] on missing core {c}"));
                }
                load[c] += 1;
            }
            if let Some(c) = load.iter().position(|&l| l != self.capacity) {
                return bad(format!("slice {s}: core {c} holds {} qubits", load[c]));
            }
            for &gi in &self.slices[s].gates {
                if let &[a, b] = self.source.gates[gi].qubits.as_slice() {
                    if cur[a] != cur[b] {
                        return bad(format!(
                            "slice {s}: q[{a}] and q[{b}] interact across cores {} and {}",
                            cur[a], cur[b]
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Compiles `c` onto `arch`.
pub fn compile(
    c: &Circuit,
    arch: &Architecture,
    opts: &MapperOptions,
) -> Result<CompiledProgram, MapperError> {
    c.validate()?;
    if !(opts.decay > 0.0 && opts.decay <= 1.0) {
        return Err(MapperError::Options(format!(
            "decay must be in (0, 1], got {}",
            opts.decay
        )));
    }
    if !(opts.migration_penalty >= 0.0 && opts.migration_penalty.is_finite()) {
        return Err(MapperError::Options(format!(
            "migration penalty must be a non-negative number, got {}",
            opts.migration_penalty
        )));
    }
    let total = arch.total_qubits();
    let source = if c.width == total {
        c.clone()
    } else if opts.pad && c.width < total {
        c.padded(total)
    } else {
        return Err(MapperError::WidthMismatch {
            width: c.width,
            total,
        });
    };

    let slices = slice_circuit(&source);
    let pairs = slice_pairs(&source, &slices);
    let graph = |s| lookahead_graph(&pairs, s, opts.lookahead, opts.decay);
    let initial = if slices.is_empty() {
        block_assignment(arch)
    } else {
        initial_partition(&graph(0), arch, opts)?
    };
    let mut cur = initial.clone();
    let mut teleports = Vec::new();
    for s in 1..slices.len() {
        let next = refine_partition(&cur, &graph(s), arch, opts)?;
        teleports.extend(insert_teleports(&cur, &next, s - 1)?);
        cur = next;
    }
    Ok(CompiledProgram {
        source,
        slices,
        assignment: Assignment { initial },
        teleports,
        options: opts.clone(),
        num_cores: arch.num_cores,
        capacity: arch.capacity,
    })
}
