//! Balanced qubit-to-core partitioning with Kernighan-Lin style pairwise
//! exchanges.
//!
//! A pass first repairs every split MUST edge, moving whichever endpoint
//! has the better exchange into the other's core, then greedily applies the
//! best positive-gain exchange until none is left. The gain of exchanging
//! `p` (core A) with `q` (core B) is the change of intra-core edge weight
//! minus `migration_penalty` times the change in the number of qubits that
//! sit outside their previous core.

use crate::arch::Architecture;

use super::lookahead::InteractionGraph;
use super::{MapperError, MapperOptions};

const EPS: f64 = 1e-9;

/// Qubits `0..capacity` on core 0, the next `capacity` on core 1, and so on.
pub fn block_assignment(arch: &Architecture) -> Vec<usize> {
    (0..arch.total_qubits())
        .map(|q| q / arch.capacity)
        .collect()
}

pub fn initial_partition(
    graph: &InteractionGraph,
    arch: &Architecture,
    opts: &MapperOptions,
) -> Result<Vec<usize>, MapperError> {
    refine_partition(&block_assignment(arch), graph, arch, opts)
}

pub fn refine_partition(
    prev: &[usize],
    graph: &InteractionGraph,
    arch: &Architecture,
    opts: &MapperOptions,
) -> Result<Vec<usize>, MapperError> {
    let mut st = State::new(prev, graph, arch, opts.migration_penalty);
    st.repair()?;
    let cap = opts.max_passes.unwrap_or(10 * prev.len());
    let mut passes = 0;
    while passes < cap {
        match st.best_exchange() {
            Some((p, q, _)) => st.exchange(p, q),
            None => break,
        }
        passes += 1;
    }
    Ok(st.cur)
}

struct State<'a> {
    prev: &'a [usize],
    cur: Vec<usize>,
    graph: &'a InteractionGraph,
    cores: usize,
    mu: f64,
    /// CSR adjacency over the graph edges.
    offsets: Vec<usize>,
    adj: Vec<(usize, f64)>,
    /// `conn[v * cores + c]`: weight from `v` to qubits on core `c`.
    conn: Vec<f64>,
    partner: Vec<Option<usize>>,
    members: Vec<Vec<usize>>,
}

impl<'a> State<'a> {
    fn new(prev: &'a [usize], graph: &'a InteractionGraph, arch: &Architecture, mu: f64) -> Self {
        let n = prev.len();
        let cores = arch.num_cores;
        let mut offsets = vec![0usize; n + 1];
        for e in &graph.edges {
            offsets[e.a + 1] += 1;
            offsets[e.b + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![(0usize, 0f64); offsets[n]];
        let mut partner = vec![None; n];
        for e in &graph.edges {
            adj[fill[e.a]] = (e.b, e.weight);
            fill[e.a] += 1;
            adj[fill[e.b]] = (e.a, e.weight);
            fill[e.b] += 1;
            if e.must {
                partner[e.a] = Some(e.b);
                partner[e.b] = Some(e.a);
            }
        }
        let cur = prev.to_vec();
        let mut conn = vec![0.0; n * cores];
        for e in &graph.edges {
            conn[e.a * cores + cur[e.b]] += e.weight;
            conn[e.b * cores + cur[e.a]] += e.weight;
        }
        let mut members = vec![Vec::new(); cores];
        for (q, &c) in cur.iter().enumerate() {
            members[c].push(q);
        }
        State {
            prev,
            cur,
            graph,
            cores,
            mu,
            offsets,
            adj,
            conn,
            partner,
            members,
        }
    }

    fn conn(&self, v: usize, c: usize) -> f64 {
        self.conn[v * self.cores + c]
    }

    fn mig(&self, v: usize, c: usize) -> f64 {
        if self.prev[v] != c {
            1.0
        } else {
            0.0
        }
    }

    /// Gain of moving `v` from its core to `c`, ignoring the exchange partner.
    fn move_value(&self, v: usize, c: usize) -> f64 {
        let from = self.cur[v];
        self.conn(v, c) - self.conn(v, from) - self.mu * (self.mig(v, c) - self.mig(v, from))
    }

    fn gain(&self, p: usize, q: usize) -> f64 {
        let (a, b) = (self.cur[p], self.cur[q]);
        let w = if self.offsets[p] == self.offsets[p + 1] {
            0.0
        } else {
            self.graph.weight(p, q)
        };
        self.move_value(p, b) + self.move_value(q, a) - 2.0 * w
    }

    fn locked(&self, v: usize) -> bool {
        self.partner[v].is_some_and(|p| self.cur[p] == self.cur[v])
    }

    fn exchange(&mut self, p: usize, q: usize) {
        let (a, b) = (self.cur[p], self.cur[q]);
        debug_assert_ne!(a, b);
        let cores = self.cores;
        for (v, from, to) in [(p, a, b), (q, b, a)] {
            let (lo, hi) = (self.offsets[v], self.offsets[v + 1]);
            for i in lo..hi {
                let (u, w) = self.adj[i];
                self.conn[u * cores + from] -= w;
                self.conn[u * cores + to] += w;
            }
        }
        self.cur[p] = b;
        self.cur[q] = a;
        let pa = self.members[a]
            .iter()
            .position(|&x| x == p)
            .expect("member");
        self.members[a][pa] = q;
        let qb = self.members[b]
            .iter()
            .position(|&x| x == q)
            .expect("member");
        self.members[b][qb] = p;
    }

    /// Best exchange partner for `mover` inside core `dest`, skipping
    /// `keep` and locked qubits.
    fn best_candidate(&self, mover: usize, dest: usize, keep: usize) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut cands: Vec<usize> = self.members[dest]
            .iter()
            .copied()
            .filter(|&r| r != keep && !self.locked(r))
            .collect();
        cands.sort_unstable();
        for r in cands {
            let g = self.gain(mover, r);
            if best.is_none_or(|(_, bg)| g > bg + EPS) {
                best = Some((r, g));
            }
        }
        best
    }

    fn repair(&mut self) -> Result<(), MapperError> {
        let musts: Vec<(usize, usize)> = self.graph.must_edges().map(|e| (e.a, e.b)).collect();
        for (a, b) in musts {
            if self.cur[a] == self.cur[b] {
                continue;
            }
            let x = self
                .best_candidate(a, self.cur[b], b)
                .map(|(r, g)| (a, r, g));
            let y = self
                .best_candidate(b, self.cur[a], a)
                .map(|(r, g)| (b, r, g));
            let choice = match (x, y) {
                (Some(x), Some(y)) => Some(if y.2 > x.2 + EPS { y } else { x }),
                (x, y) => x.or(y),
            }
            .map(|(m, r, _)| (m, r));
            match choice {
                Some((mover, r)) => self.exchange(mover, r),
                None => return Err(MapperError::Unsatisfiable { a, b }),
            }
        }
        Ok(())
    }

    /// Highest-gain exchange among unlocked qubits, if its gain is positive.
    fn best_exchange(&self) -> Option<(usize, usize, f64)> {
        let n = self.cur.len();
        let cores = self.cores;
        // val[v * cores + c] = move_value(v, c) for movable v, c != cur[v].
        let mut val = vec![f64::NEG_INFINITY; n * cores];
        let mut any_positive = false;
        for v in 0..n {
            if self.locked(v) {
                continue;
            }
            for c in 0..cores {
                if c != self.cur[v] {
                    let x = self.move_value(v, c);
                    any_positive |= x > EPS;
                    val[v * cores + c] = x;
                }
            }
        }
        if !any_positive {
            return None;
        }
        let mut best: Option<(usize, usize, f64)> = None;
        let mut best_gain = EPS;
        for a in 0..cores {
            for b in a + 1..cores {
                let mut ps: Vec<(f64, usize)> = self.members[a]
                    .iter()
                    .filter(|&&p| val[p * cores + b].is_finite())
                    .map(|&p| (val[p * cores + b], p))
                    .collect();
                let mut qs: Vec<(f64, usize)> = self.members[b]
                    .iter()
                    .filter(|&&q| val[q * cores + a].is_finite())
                    .map(|&q| (val[q * cores + a], q))
                    .collect();
                if ps.is_empty() || qs.is_empty() {
                    continue;
                }
                let desc = |x: &(f64, usize), y: &(f64, usize)| {
                    y.0.partial_cmp(&x.0).expect("finite").then(x.1.cmp(&y.1))
                };
                ps.sort_by(desc);
                qs.sort_by(desc);
                if ps[0].0 + qs[0].0 <= best_gain {
                    continue;
                }
                for &(vp, p) in &ps {
                    if vp + qs[0].0 <= best_gain {
                        break;
                    }
                    for &(vq, q) in &qs {
                        if vp + vq <= best_gain {
                            break;
                        }
                        let g = self.gain(p, q);
                        if g > best_gain + EPS {
                            best_gain = g;
                            best = Some((p, q, g));
                        }
                    }
                }
            }
        }
        best.filter(|&(_, _, g)| g > EPS)
    }
}
