use serde::Serialize;

use crate::circuit::Circuit;

/// A layer of the circuit in which each qubit interacts with at most one
/// partner. `gates` index into the source circuit, in program order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Timeslice {
    pub index: usize,
    pub gates: Vec<usize>,
}

/// Greedy ASAP layering.
///
/// A two-qubit gate goes to the earliest slice not before the slice of the
/// previous gate on either operand, skipping a slice where an operand
/// already interacts with another qubit. A gate repeating the pair its
/// operands already form in their current slice joins that slice.
/// Single-qubit gates join the current slice of their qubit. Within a slice
/// gates keep program order.
pub fn slice_circuit(c: &Circuit) -> Vec<Timeslice> {
    let mut current = vec![0usize; c.width];
    let mut partner: Vec<Option<usize>> = vec![None; c.width];
    let mut slice_of = Vec::with_capacity(c.gates.len());
    let mut count = 0usize;
    for g in &c.gates {
        let s = match *g.qubits.as_slice() {
            [q] => current[q],
            [a, b] => {
                if partner[a] == Some(b) && partner[b] == Some(a) && current[a] == current[b] {
                    current[a]
                } else {
                    let lb = |q: usize| current[q] + usize::from(partner[q].is_some());
                    let s = lb(a).max(lb(b));
                    for (q, p) in [(a, b), (b, a)] {
                        current[q] = s;
                        partner[q] = Some(p);
                    }
                    s
                }
            }
            _ => unreachable!("validated circuits have arity 1 or 2"),
        };
        slice_of.push(s);
        count = count.max(s + 1);
    }
    let mut slices: Vec<Timeslice> = (0..count)
        .map(|index| Timeslice {
            index,
            gates: Vec::new(),
        })
        .collect();
    for (gi, s) in slice_of.into_iter().enumerate() {
        slices[s].gates.push(gi);
    }
    slices
}

/// Distinct interacting pairs `(min, max)` of every slice, in order of
/// first appearance.
pub fn slice_pairs(c: &Circuit, slices: &[Timeslice]) -> Vec<Vec<(usize, usize)>> {
    slices
        .iter()
        .map(|s| {
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for &gi in &s.gates {
                if let &[a, b] = c.gates[gi].qubits.as_slice() {
                    let p = (a.min(b), a.max(b));
                    if !pairs.contains(&p) {
                        pairs.push(p);
                    }
                }
            }
            pairs
        })
        .collect()
}
