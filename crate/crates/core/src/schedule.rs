//! ASAP list scheduling of a compiled program.
//!
//! Operations are issued in slice order: the gates of slice `k` in program
//! order, then the teleports between slice `k` and `k + 1`. Each starts as
//! soon as its operands are free. Teleports only wait for the two qubits they
//! move and may overlap each other and unrelated gates.

use std::fmt::Write;
use std::ops::Deref;

use crate::arch::Architecture;
use crate::circuit::{GateKind, GateTag};
use crate::mapper::CompiledProgram;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScheduleError {
    #[error("no duration for gate '{0}' in the architecture")]
    MissingDuration(GateTag),
    #[error("program compiled for {program} cores x {capacity}, architecture has {arch_cores} x {arch_capacity}")]
    ArchMismatch {
        program: usize,
        capacity: usize,
        arch_cores: usize,
        arch_capacity: usize,
    },
}

/// One or two qubit indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Operands {
    q: [usize; 2],
    len: u8,
}

impl Operands {
    pub fn one(a: usize) -> Self {
        Operands { q: [a, 0], len: 1 }
    }

    pub fn two(a: usize, b: usize) -> Self {
        Operands { q: [a, b], len: 2 }
    }

    fn from_slice(s: &[usize]) -> Self {
        match *s {
            [a] => Operands::one(a),
            [a, b] => Operands::two(a, b),
            _ => unreachable!("gates have one or two operands"),
        }
    }
}

impl Deref for Operands {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.q[..self.len as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedOp {
    pub kind: GateKind,
    pub virtual_qubits: Operands,
    pub physical_qubits: Operands,
    pub start_ns: u64,
    pub duration_ns: u64,
    /// Slice of a gate; for a teleport, the slice it precedes.
    pub slice: usize,
}

impl TimedOp {
    pub fn end_ns(&self) -> u64 {
        self.start_ns + self.duration_ns
    }

    pub fn is_teleport(&self) -> bool {
        self.kind == GateKind::TeleSwap
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// Sorted by start time, ties in issue order.
    pub ops: Vec<TimedOp>,
    pub makespan_ns: u64,
    pub num_cores: usize,
    pub capacity: usize,
    pub cycle_ns: u64,
    pub width: usize,
}

impl Schedule {
    pub fn core_of_physical(&self, p: usize) -> usize {
        p / self.capacity
    }

    pub fn teleports(&self) -> impl Iterator<Item = &TimedOp> {
        self.ops.iter().filter(|o| o.is_teleport())
    }

    /// Serial upper bound: the sum of all durations.
    pub fn total_duration_ns(&self) -> u64 {
        self.ops.iter().map(|o| o.duration_ns).sum()
    }

    /// CSV with one row per operation.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 + self.ops.len() * 48);
        out.push_str("op_index,kind,slice,v_operands,p_operands,cores,start_ns,duration_ns\n");
        let join = |xs: &[usize]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(";")
        };
        for (i, op) in self.ops.iter().enumerate() {
            let cores: Vec<usize> = op
                .physical_qubits
                .iter()
                .map(|&p| self.core_of_physical(p))
                .collect();
            let _ = writeln!(
                out,
                "{i},{},{},{},{},{},{},{}",
                op.kind.tag().mnemonic(),
                op.slice,
                join(&op.virtual_qubits),
                join(&op.physical_qubits),
                join(&cores),
                op.start_ns,
                op.duration_ns
            );
        }
        out
    }
}

/// Physical site of every virtual qubit at slice 0: inside each core,
/// virtual qubits take offsets in ascending index order.
pub fn initial_physical(p: &CompiledProgram) -> Vec<usize> {
    let mut next_offset = vec![0usize; p.num_cores];
    p.assignment
        .initial
        .iter()
        .map(|&c| {
            let phys = c * p.capacity + next_offset[c];
            next_offset[c] += 1;
            phys
        })
        .collect()
}

fn check_arch(p: &CompiledProgram, a: &Architecture) -> Result<(), ScheduleError> {
    if p.num_cores != a.num_cores || p.capacity != a.capacity {
        return Err(ScheduleError::ArchMismatch {
            program: p.num_cores,
            capacity: p.capacity,
            arch_cores: a.num_cores,
            arch_capacity: a.capacity,
        });
    }
    Ok(())
}

fn duration_table(a: &Architecture) -> impl Fn(GateTag) -> Result<u64, ScheduleError> + '_ {
    move |tag| a.duration(tag).ok_or(ScheduleError::MissingDuration(tag))
}

/// Visits operations in issue order as `(kind, virtual operands, slice)`.
fn for_each_issued(p: &CompiledProgram, mut f: impl FnMut(GateKind, Operands, usize)) {
    for slice in &p.slices {
        for &gi in &slice.gates {
            let g = &p.source.gates[gi];
            f(g.kind, Operands::from_slice(&g.qubits), slice.index);
        }
        for op in p.teleports_after(slice.index) {
            f(
                GateKind::TeleSwap,
                Operands::two(op.qubits.0, op.qubits.1),
                op.between.1,
            );
        }
    }
}

pub fn schedule_asap(p: &CompiledProgram, a: &Architecture) -> Result<Schedule, ScheduleError> {
    check_arch(p, a)?;
    let duration = duration_table(a);
    let cycle = a.cycle_ns;
    let mut phys = initial_physical(p);
    let mut ready = vec![0u64; p.width()];
    let mut ops = Vec::with_capacity(p.source.gates.len() + p.teleports.len());
    let mut result = Ok(());
    for_each_issued(p, |kind, vq, slice| {
        if result.is_err() {
            return;
        }
        let d = match duration(kind.tag()) {
            Ok(d) => d,
            Err(e) => {
                result = Err(e);
                return;
            }
        };
        let earliest = vq.iter().map(|&q| ready[q]).max().unwrap_or(0);
        let start = earliest.div_ceil(cycle) * cycle;
        let mut pq = vq;
        for i in 0..vq.len as usize {
            pq.q[i] = phys[vq.q[i]];
        }
        for &q in vq.iter() {
            ready[q] = start + d;
        }
        if kind == GateKind::TeleSwap {
            phys.swap(vq[0], vq[1]);
        }
        ops.push(TimedOp {
            kind,
            virtual_qubits: vq,
            physical_qubits: pq,
            start_ns: start,
            duration_ns: d,
            slice,
        });
    });
    result?;
    ops.sort_by_key(|o| o.start_ns);
    let makespan_ns = ops.iter().map(TimedOp::end_ns).max().unwrap_or(0);
    Ok(Schedule {
        ops,
        makespan_ns,
        num_cores: p.num_cores,
        capacity: p.capacity,
        cycle_ns: cycle,
        width: p.width(),
    })
}

/// Longest duration-weighted path through the per-qubit dependency graph of
/// gates and teleports.
pub fn critical_path_ns(p: &CompiledProgram, a: &Architecture) -> Result<u64, ScheduleError> {
    check_arch(p, a)?;
    let duration = duration_table(a);
    // Node i depends on the previous node of each operand; finish[i] is the
    // longest path ending at node i.
    let mut last: Vec<Option<usize>> = vec![None; p.width()];
    let mut finish: Vec<u64> = Vec::with_capacity(p.source.gates.len() + p.teleports.len());
    let mut result = Ok(());
    for_each_issued(p, |kind, vq, _| {
        if result.is_err() {
            return;
        }
        match duration(kind.tag()) {
            Ok(d) => {
                let i = finish.len();
                let before = vq
                    .iter()
                    .filter_map(|&q| last[q].map(|j| finish[j]))
                    .max()
                    .unwrap_or(0);
                finish.push(before + d);
                for &q in vq.iter() {
                    last[q] = Some(i);
                }
            }
            Err(e) => result = Err(e),
        }
    });
    result?;
    Ok(finish.into_iter().max().unwrap_or(0))
}
