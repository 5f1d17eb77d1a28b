use serde::Serialize;

use super::MapperError;

/// Exchange of two virtual qubits between cores, performed between slices
/// `between.0` and `between.1 = between.0 + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TeleportOp {
    pub between: (usize, usize),
    pub qubits: (usize, usize),
    /// Cores of `qubits.0` and `qubits.1` when the exchange starts.
    pub cores: (usize, usize),
}

/// Decomposes the migration from `prev` to `next` into transpositions.
///
/// Migrating qubits form cycles over cores. Each cycle `a1 -> a2 -> ... ->
/// ak` (qubit `ai` moves into the core that `a(i+1)` leaves) is realised as
/// the `k - 1` exchanges `(a1,a2), (a2,a3), ...`. Cycles start at the
/// lowest-index misplaced qubit and close as early as possible.
pub fn insert_teleports(
    prev: &[usize],
    next: &[usize],
    slice: usize,
) -> Result<Vec<TeleportOp>, MapperError> {
    if prev.len() != next.len() {
        return Err(MapperError::Unbalanced);
    }
    let cores = prev.iter().chain(next).copied().max().map_or(0, |m| m + 1);
    let mut load = vec![0isize; cores];
    for (&p, &n) in prev.iter().zip(next) {
        load[p] += 1;
        load[n] -= 1;
    }
    if load.iter().any(|&l| l != 0) {
        return Err(MapperError::Unbalanced);
    }

    // Misplaced qubits leaving each core, ascending.
    let mut leaving: Vec<Vec<usize>> = vec![Vec::new(); cores];
    for q in 0..prev.len() {
        if prev[q] != next[q] {
            leaving[prev[q]].push(q);
        }
    }
    let mut done = vec![false; prev.len()];
    let mut ops = Vec::new();
    let take = |leaving: &mut Vec<Vec<usize>>, done: &[bool], core: usize, prefer_to: usize| {
        let list = &mut leaving[core];
        list.retain(|&q| !done[q]);
        let idx = list.iter().position(|&q| next[q] == prefer_to).unwrap_or(0);
        list.remove(idx)
    };

    for start in 0..prev.len() {
        if done[start] || prev[start] == next[start] {
            continue;
        }
        let home = prev[start];
        leaving[home].retain(|&q| q != start);
        done[start] = true;
        let mut cycle = vec![start];
        let mut at = next[start];
        while at != home {
            let q = take(&mut leaving, &done, at, home);
            done[q] = true;
            cycle.push(q);
            at = next[q];
        }
        // After each exchange the qubit about to move on sits in `home`.
        for w in cycle.windows(2) {
            ops.push(TeleportOp {
                between: (slice, slice + 1),
                qubits: (w[0], w[1]),
                cores: (home, prev[w[1]]),
            });
        }
    }
    Ok(ops)
}

/// Applies `ops` to `placement` in order.
pub fn apply_teleports(placement: &mut [usize], ops: &[TeleportOp]) {
    for op in ops {
        placement.swap(op.qubits.0, op.qubits.1);
    }
}
