use super::Circuit;

/// Gate dependency graph: an edge `(i, j)` means gates `i < j` share an
/// operand and no gate between them touches that operand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyDag {
    pub num_nodes: usize,
    /// Sorted, de-duplicated `(earlier, later)` pairs.
    pub edges: Vec<(usize, usize)>,
}

impl DependencyDag {
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.num_nodes];
        for &(a, b) in &self.edges {
            preds[b].push(a);
        }
        preds
    }

    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.num_nodes];
        for &(a, b) in &self.edges {
            succ[a].push(b);
        }
        succ
    }
}

pub fn dependency_dag(c: &Circuit) -> DependencyDag {
    let mut last: Vec<Option<usize>> = vec![None; c.width];
    let mut edges = Vec::new();
    for (j, g) in c.gates.iter().enumerate() {
        let mut preds: Vec<usize> = g.qubits.iter().filter_map(|&q| last[q]).collect();
        preds.sort_unstable();
        preds.dedup();
        edges.extend(preds.into_iter().map(|i| (i, j)));
        for &q in &g.qubits {
            last[q] = Some(j);
        }
    }
    edges.sort_unstable();
    DependencyDag {
        num_nodes: c.gates.len(),
        edges,
    }
}
