//! Exact minimum teleport count for tiny instances, used to bound the
//! heuristic. Independent of the cycle decomposition: the distance between
//! two placements is a breadth-first search over single cross-core
//! exchanges.

use std::collections::{HashMap, VecDeque};

use crate::arch::Architecture;
use crate::circuit::Circuit;

use super::slicing::{slice_circuit, slice_pairs};
use super::MapperError;

pub const ORACLE_MAX_QUBITS: usize = 8;
pub const ORACLE_MAX_CORES: usize = 3;
pub const ORACLE_MAX_SLICES: usize = 8;

fn balanced_placements(n: usize, cores: usize, cap: usize) -> Vec<Vec<usize>> {
    fn rec(
        q: usize,
        cur: &mut Vec<usize>,
        load: &mut [usize],
        cap: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if q == cur.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..load.len() {
            if load[c] < cap {
                load[c] += 1;
                cur[q] = c;
                rec(q + 1, cur, load, cap, out);
                load[c] -= 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, &mut vec![0; n], &mut vec![0; cores], cap, &mut out);
    out
}

fn exchange_distances(states: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let index: HashMap<&[usize], usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let n = states.first().map_or(0, Vec::len);
    states
        .iter()
        .enumerate()
        .map(|(src, _)| {
            let mut dist = vec![usize::MAX; states.len()];
            dist[src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(i) = queue.pop_front() {
                for a in 0..n {
                    for b in a + 1..n {
                        if states[i][a] == states[i][b] {
                            continue;
                        }
                        let mut s = states[i].clone();
                        s.swap(a, b);
                        let j = index[s.as_slice()];
                        if dist[j] == usize::MAX {
                            dist[j] = dist[i] + 1;
                            queue.push_back(j);
                        }
                    }
                }
            }
            dist
        })
        .collect()
}

/// Minimum total number of teleport-swaps over all per-slice placements
/// that co-locate every two-qubit gate.
pub fn optimal_oracle(c: &Circuit, arch: &Architecture) -> Result<usize, MapperError> {
    let slices = slice_circuit(c);
    if c.width > ORACLE_MAX_QUBITS
        || arch.num_cores > ORACLE_MAX_CORES
        || slices.len() > ORACLE_MAX_SLICES
    {
        return Err(MapperError::OracleGuard {
            qubits: c.width,
            cores: arch.num_cores,
            slices: slices.len(),
        });
    }
    if c.width != arch.total_qubits() {
        return Err(MapperError::WidthMismatch {
            width: c.width,
            total: arch.total_qubits(),
        });
    }
    let pairs = slice_pairs(c, &slices);
    let states = balanced_placements(c.width, arch.num_cores, arch.capacity);
    let dist = exchange_distances(&states);
    let feasible = |s: usize, st: &[usize]| pairs[s].iter().all(|&(a, b)| st[a] == st[b]);
    if let Some(s) = (0..slices.len()).find(|&s| !states.iter().any(|st| feasible(s, st))) {
        return Err(MapperError::NoPlacement(s));
    }

    let mut cost: Vec<Option<usize>> = states
        .iter()
        .map(|st| (slices.is_empty() || feasible(0, st)).then_some(0))
        .collect();
    for s in 1..slices.len() {
        cost = states
            .iter()
            .enumerate()
            .map(|(j, st)| {
                if !feasible(s, st) {
                    return None;
                }
                cost.iter()
                    .enumerate()
                    .filter_map(|(i, c)| c.map(|c| c + dist[i][j]))
                    .min()
            })
            .collect();
    }
    Ok(cost
        .into_iter()
        .flatten()
        .min()
        .expect("every slice has a feasible placement"))
}
