use serde::Serialize;

/// Interaction edge between two virtual qubits, `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
    /// The pair interacts in the current slice and must share a core.
    pub must: bool,
}

/// Weighted interaction graph seen from one slice.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct InteractionGraph {
    /// Sorted by `(a, b)`, one entry per pair.
    pub edges: Vec<Edge>,
}

impl InteractionGraph {
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        let (a, b) = (a.min(b), a.max(b));
        self.edges
            .binary_search_by(|e| (e.a, e.b).cmp(&(a, b)))
            .map(|i| self.edges[i].weight)
            .unwrap_or(0.0)
    }

    pub fn must_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.must)
    }

    pub fn from_edges(mut edges: Vec<Edge>) -> Self {
        edges.sort_by_key(|e| (e.a, e.b));
        let mut merged: Vec<Edge> = Vec::with_capacity(edges.len());
        for e in edges {
            match merged.last_mut() {
                Some(last) if last.a == e.a && last.b == e.b => {
                    last.weight += e.weight;
                    last.must |= e.must;
                }
                _ => merged.push(e),
            }
        }
        InteractionGraph { edges: merged }
    }
}

/// Builds the graph for slice `s`: every pair interacting in slice
/// `t` in `[s, s + window]` gets weight `decay^(t - s)`; pairs of slice `s`
/// itself are marked `must`.
pub fn lookahead_graph(
    pairs: &[Vec<(usize, usize)>],
    s: usize,
    window: usize,
    decay: f64,
) -> InteractionGraph {
    let end = (s + window).min(pairs.len().saturating_sub(1));
    let mut edges = Vec::new();
    let mut w = 1.0;
    for (t, slice) in pairs.iter().enumerate().take(end + 1).skip(s) {
        for &(a, b) in slice {
            edges.push(Edge {
                a: a.min(b),
                b: a.max(b),
                weight: w,
                must: t == s,
            });
        }
        w *= decay;
    }
    InteractionGraph::from_edges(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(s: usize, len: usize, pair: (usize, usize)) -> Vec<Vec<(usize, usize)>> {
        let mut v = vec![Vec::new(); len];
        v[s].push(pair);
        v
    }

    #[test]
    fn current_slice_pair_is_must() {
        let g = lookahead_graph(&at(0, 4, (0, 1)), 0, 16, 0.5);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].weight, 1.0);
        assert!(g.edges[0].must);
    }

    #[test]
    fn decays_with_distance() {
        let g = lookahead_graph(&at(3, 6, (1, 0)), 0, 16, 0.5);
        assert_eq!(g.weight(0, 1), 0.125);
        assert!(!g.edges[0].must);

        let mut p = vec![Vec::new(); 5];
        p[1].push((0, 1));
        p[2].push((1, 0));
        let g = lookahead_graph(&p, 0, 16, 0.5);
        assert_eq!(g.weight(1, 0), 0.75);
        assert_eq!(g.must_edges().count(), 0);
    }

    #[test]
    fn window_is_inclusive_and_bounded() {
        let g = lookahead_graph(&at(16, 20, (2, 3)), 0, 16, 0.5);
        assert_eq!(g.weight(2, 3), 2f64.powi(-16));
        let g = lookahead_graph(&at(17, 20, (2, 3)), 0, 16, 0.5);
        assert!(g.edges.is_empty());
        let g = lookahead_graph(&at(2, 3, (2, 3)), 1, 16, 0.5);
        assert_eq!(g.weight(2, 3), 0.5);
    }
}
