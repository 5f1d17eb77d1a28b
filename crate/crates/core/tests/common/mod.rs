//! Invariant checkers written against the public data model only, so they
//! do not share code with the library's own consistency checks.

#![allow(dead_code)]

use qtraffic::circuit::GateKind;
use qtraffic::mapper::CompiledProgram;
use qtraffic::schedule::Schedule;
use qtraffic::traffic::TimeFractions;

/// Walks the slices, replaying teleports, and checks co-location, capacity
/// conservation, teleport soundness and per-qubit order preservation.
/// Returns the placement at every slice.
pub fn check_program(p: &CompiledProgram) -> Result<Vec<Vec<usize>>, String> {
    let n = p.source.width;
    let mut placement = p.assignment.initial.clone();
    if placement.len() != n {
        return Err(format!(
            "placement covers {} of {n} qubits",
            placement.len()
        ));
    }
    if p.teleports
        .windows(2)
        .any(|w| w[0].between.0 > w[1].between.0)
    {
        return Err("teleports not sorted by slice boundary".into());
    }
    let mut seen = vec![false; p.source.gates.len()];
    let mut last_gate: Vec<Option<usize>> = vec![None; n];
    let mut out = Vec::with_capacity(p.slices.len());
    let mut t = 0;
    for (s, slice) in p.slices.iter().enumerate() {
        if slice.index != s {
            return Err(format!("slice {s} carries index {}", slice.index));
        }
        while t < p.teleports.len() && p.teleports[t].between.1 == s {
            let op = &p.teleports[t];
            let (a, b) = op.qubits;
            if op.between.0 + 1 != s || s == 0 {
                return Err(format!("teleport {t} has boundary {:?}", op.between));
            }
            if a == b || (placement[a], placement[b]) != op.cores || op.cores.0 == op.cores.1 {
                return Err(format!(
                    "teleport {t} records {:?} but qubits sit in {:?}",
                    op.cores,
                    (placement[a], placement[b])
                ));
            }
            placement.swap(a, b);
            t += 1;
        }
        let mut load = vec![0usize; p.num_cores];
        for &c in &placement {
            load[c] += 1;
        }
        if load.iter().any(|&l| l != p.capacity) {
            return Err(format!("slice {s}: core loads {load:?}"));
        }
        let mut partner: Vec<Option<usize>> = vec![None; n];
        for &g in &slice.gates {
            if std::mem::replace(&mut seen[g], true) {
                return Err(format!("gate {g} scheduled twice"));
            }
            let qs = &p.source.gates[g].qubits;
            for &q in qs {
                if last_gate[q].is_some_and(|prev| prev > g) {
                    return Err(format!("qubit {q}: gate {g} after a later gate"));
                }
                last_gate[q] = Some(g);
            }
            if let [a, b] = qs[..] {
                if placement[a] != placement[b] {
                    return Err(format!(
                        "slice {s}: gate {g} on ({a},{b}) split across cores"
                    ));
                }
                for (x, y) in [(a, b), (b, a)] {
                    if partner[x].is_some_and(|z| z != y) {
                        return Err(format!("slice {s}: qubit {x} has two partners"));
                    }
                    partner[x] = Some(y);
                }
            }
        }
        out.push(placement.clone());
    }
    if t != p.teleports.len() {
        return Err(format!(
            "{} teleports point past the last slice",
            p.teleports.len() - t
        ));
    }
    if let Some(g) = seen.iter().position(|&x| !x) {
        return Err(format!("gate {g} missing from slices"));
    }
    Ok(out)
}

/// Checks that no qubit (virtual or physical) runs two operations at once
/// and that each virtual qubit sees its operations in program order.
pub fn check_schedule(p: &CompiledProgram, s: &Schedule) -> Result<(), String> {
    let n = p.source.width;
    // Expected per-qubit sequence of (is_teleport, slice).
    let mut expected: Vec<Vec<(bool, usize)>> = vec![Vec::new(); n];
    let mut t = 0;
    for (k, slice) in p.slices.iter().enumerate() {
        while t < p.teleports.len() && p.teleports[t].between.1 == k {
            let (a, b) = p.teleports[t].qubits;
            expected[a].push((true, k));
            expected[b].push((true, k));
            t += 1;
        }
        for &g in &slice.gates {
            for &q in &p.source.gates[g].qubits {
                expected[q].push((false, k));
            }
        }
    }
    let mut by_virtual: Vec<Vec<(u64, u64, bool, usize)>> = vec![Vec::new(); n];
    let mut by_physical: Vec<Vec<(u64, u64)>> = vec![Vec::new(); n];
    for op in &s.ops {
        if op.duration_ns == 0 {
            return Err("zero-duration operation".into());
        }
        for &v in op.virtual_qubits.iter() {
            by_virtual[v].push((op.start_ns, op.end_ns(), op.is_teleport(), op.slice));
        }
        for &q in op.physical_qubits.iter() {
            by_physical[q].push((op.start_ns, op.end_ns()));
        }
        if op.is_teleport() != (op.kind == GateKind::TeleSwap) {
            return Err("teleport flag disagrees with kind".into());
        }
    }
    for (q, ops) in by_virtual.iter().enumerate() {
        let got: Vec<(bool, usize)> = ops.iter().map(|o| (o.2, o.3)).collect();
        if got != expected[q] {
            return Err(format!(
                "virtual qubit {q}: operation order differs from the program"
            ));
        }
        if ops.windows(2).any(|w| w[0].1 > w[1].0) {
            return Err(format!("virtual qubit {q}: overlapping operations"));
        }
    }
    for (q, ops) in by_physical.iter_mut().enumerate() {
        ops.sort_unstable();
        if ops.windows(2).any(|w| w[0].1 > w[1].0) {
            return Err(format!("physical qubit {q}: overlapping operations"));
        }
    }
    let end = s.ops.iter().map(|o| o.end_ns()).max().unwrap_or(0);
    if end != s.makespan_ns {
        return Err(format!(
            "makespan {} but last op ends at {end}",
            s.makespan_ns
        ));
    }
    Ok(())
}

pub fn check_fractions(f: &TimeFractions) -> Result<(), String> {
    let parts = [f.compute_only, f.comm_only, f.both, f.idle];
    if parts.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(format!("fraction outside [0,1]: {f:?}"));
    }
    let sum: f64 = parts.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(format!("fractions sum to {sum}"));
    }
    Ok(())
}

/// Population coefficient of variation, computed the long way.
pub fn cov(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}
