//! Execution traces and spatial/temporal traffic metrics.
//!
//! Burstiness is the coefficient of variation of teleports per timeslice,
//! hotspotness the coefficient of variation of per-core teleport
//! participation. A teleport counts once for its core pair in the traffic
//! matrix and once for each of its two cores in the participation series, so
//! that series sums to twice the number of teleports.

use serde::{Deserialize, Serialize};

use crate::mapper::CompiledProgram;
use crate::schedule::Schedule;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrafficError {
    #[error("moving-average window must be at least 1")]
    ZeroWindow,
    #[error("coefficient of variation of an empty series")]
    EmptySeries,
    #[error("schedule has zero makespan")]
    ZeroMakespan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceAxis {
    Physical,
    Virtual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum CellState {
    Idle = 0,
    Compute = 1,
    Comm = 2,
}

/// Qubit by cycle raster of the execution.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceGrid {
    pub axis: TraceAxis,
    pub rows: usize,
    pub cols: usize,
    /// Row-major `CellState` values.
    pub cells: Vec<u8>,
}

impl TraceGrid {
    pub fn get(&self, row: usize, col: usize) -> CellState {
        match self.cells[row * self.cols + col] {
            1 => CellState::Compute,
            2 => CellState::Comm,
            _ => CellState::Idle,
        }
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn count(&self, row: usize, state: CellState) -> usize {
        self.row(row).iter().filter(|&&c| c == state as u8).count()
    }
}

pub fn build_trace(s: &Schedule, axis: TraceAxis) -> TraceGrid {
    let cols = s.makespan_ns.div_ceil(s.cycle_ns) as usize;
    let rows = s.width;
    let mut cells = vec![CellState::Idle as u8; rows * cols];
    for op in &s.ops {
        let state = if op.is_teleport() {
            CellState::Comm
        } else {
            CellState::Compute
        };
        let lo = (op.start_ns / s.cycle_ns) as usize;
        let hi = op.end_ns().div_ceil(s.cycle_ns) as usize;
        let qubits = match axis {
            TraceAxis::Physical => &op.physical_qubits,
            TraceAxis::Virtual => &op.virtual_qubits,
        };
        for &q in qubits.iter() {
            cells[q * cols + lo..q * cols + hi].fill(state as u8);
        }
    }
    TraceGrid {
        axis,
        rows,
        cols,
        cells,
    }
}

/// Teleport counts per unordered core pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrafficMatrix {
    /// Symmetric, zero diagonal.
    pub counts: Vec<Vec<u64>>,
    /// `counts / total`; all zero when there is no traffic.
    pub ratios: Vec<Vec<f64>>,
    pub total: u64,
}

pub fn traffic_matrix(s: &Schedule) -> TrafficMatrix {
    let n = s.num_cores;
    let mut counts = vec![vec![0u64; n]; n];
    let mut total = 0;
    for op in s.teleports() {
        let a = s.core_of_physical(op.physical_qubits[0]);
        let b = s.core_of_physical(op.physical_qubits[1]);
        counts[a][b] += 1;
        counts[b][a] += 1;
        total += 1;
    }
    let ratios = counts
        .iter()
        .map(|row| {
            row.iter()
                .map(|&c| {
                    if total > 0 {
                        c as f64 / total as f64
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    TrafficMatrix {
        counts,
        ratios,
        total,
    }
}

/// Teleports per timeslice: entry `k` counts the teleports executed right
/// before slice `k` (entry 0 is always 0). Returns the series and its mean.
pub fn temporal_series(p: &CompiledProgram) -> (Vec<u64>, f64) {
    let series: Vec<u64> = p
        .teleports_per_slice()
        .into_iter()
        .map(|x| x as u64)
        .collect();
    let mean = if series.is_empty() {
        0.0
    } else {
        series.iter().sum::<u64>() as f64 / series.len() as f64
    };
    (series, mean)
}

/// Teleports started in consecutive wall-clock bins of `bin_ns`.
pub fn wallclock_series(s: &Schedule, bin_ns: u64) -> Vec<u64> {
    let bins = s.makespan_ns.div_ceil(bin_ns.max(1)) as usize;
    let mut out = vec![0; bins];
    for op in s.teleports() {
        out[(op.start_ns / bin_ns.max(1)) as usize] += 1;
    }
    out
}

/// Trailing moving average: `out[k]` is the mean of
/// `series[max(0, k - w + 1)..=k]`.
pub fn moving_average(series: &[f64], w: usize) -> Result<Vec<f64>, TrafficError> {
    if w == 0 {
        return Err(TrafficError::ZeroWindow);
    }
    let mut prefix = Vec::with_capacity(series.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &x in series {
        acc += x;
        prefix.push(acc);
    }
    Ok((0..series.len())
        .map(|k| {
            let lo = (k + 1).saturating_sub(w);
            (prefix[k + 1] - prefix[lo]) / (k + 1 - lo) as f64
        })
        .collect())
}

/// Population coefficient of variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cov {
    pub value: f64,
    /// The mean was zero; `value` is reported as 0.
    pub zero_mean: bool,
}

pub fn coefficient_of_variation(series: &[f64]) -> Result<Cov, TrafficError> {
    if series.is_empty() {
        return Err(TrafficError::EmptySeries);
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Ok(Cov {
            value: 0.0,
            zero_mean: true,
        });
    }
    let var = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Ok(Cov {
        value: var.sqrt() / mean,
        zero_mean: false,
    })
}

/// Per-core teleport participation: row sums of the traffic matrix.
pub fn hotspot_series(m: &TrafficMatrix) -> Vec<u64> {
    m.counts.iter().map(|row| row.iter().sum()).collect()
}

/// Share of the makespan spent in each global activity state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeFractions {
    pub compute_only: f64,
    pub comm_only: f64,
    pub both: f64,
    pub idle: f64,
}

pub fn time_distribution(s: &Schedule) -> Result<TimeFractions, TrafficError> {
    if s.makespan_ns == 0 {
        return Err(TrafficError::ZeroMakespan);
    }
    let cols = s.makespan_ns.div_ceil(s.cycle_ns) as usize;
    let mut gates = vec![0i64; cols + 1];
    let mut comms = vec![0i64; cols + 1];
    for op in &s.ops {
        let lo = (op.start_ns / s.cycle_ns) as usize;
        let hi = op.end_ns().div_ceil(s.cycle_ns) as usize;
        let d = if op.is_teleport() {
            &mut comms
        } else {
            &mut gates
        };
        d[lo] += 1;
        d[hi] -= 1;
    }
    let (mut g, mut c) = (0i64, 0i64);
    let mut counts = [0u64; 4];
    for k in 0..cols {
        g += gates[k];
        c += comms[k];
        let idx = match (g > 0, c > 0) {
            (true, false) => 0,
            (false, true) => 1,
            (true, true) => 2,
            (false, false) => 3,
        };
        counts[idx] += 1;
    }
    let f = |i: usize| counts[i] as f64 / cols as f64;
    Ok(TimeFractions {
        compute_only: f(0),
        comm_only: f(1),
        both: f(2),
        idle: f(3),
    })
}

/// Gates executed on each core (teleports excluded).
pub fn per_core_gates(s: &Schedule) -> Vec<u64> {
    let mut out = vec![0; s.num_cores];
    for op in s.ops.iter().filter(|o| !o.is_teleport()) {
        out[s.core_of_physical(op.physical_qubits[0])] += 1;
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportOptions {
    /// Moving-average window; `None` picks 5% of the slice count.
    pub window: Option<usize>,
}

pub fn default_window(slices: usize) -> usize {
    (slices as f64 * 0.05).ceil().max(1.0) as usize
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Totals {
    pub qubits: usize,
    pub gates: u64,
    pub two_qubit_gates: u64,
    pub teleports: u64,
    pub slices: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub traffic_matrix: TrafficMatrix,
    pub per_core_teleports: Vec<u64>,
    pub per_core_gates: Vec<u64>,
    pub teleports_per_slice: Vec<u64>,
    pub moving_avg: Vec<f64>,
    pub window: usize,
    pub mean_teleports_per_slice: f64,
    pub burstiness_cov: f64,
    pub hotspotness_cov: f64,
    pub time_fractions: TimeFractions,
    pub makespan_ns: u64,
    pub totals: Totals,
    pub zero_traffic: bool,
}

fn as_f64(xs: &[u64]) -> Vec<f64> {
    xs.iter().map(|&x| x as f64).collect()
}

pub fn build_report(
    p: &CompiledProgram,
    s: &Schedule,
    opts: &ReportOptions,
) -> Result<MetricsReport, TrafficError> {
    let matrix = traffic_matrix(s);
    let per_core_teleports = hotspot_series(&matrix);
    let (series, mean) = temporal_series(p);
    let window = opts.window.unwrap_or_else(|| default_window(series.len()));
    let moving_avg = moving_average(&as_f64(&series), window)?;
    let burst = if series.is_empty() {
        Cov {
            value: 0.0,
            zero_mean: true,
        }
    } else {
        coefficient_of_variation(&as_f64(&series))?
    };
    let hot = coefficient_of_variation(&as_f64(&per_core_teleports))?;
    let time_fractions = time_distribution(s)?;
    let two_qubit_gates = p.source.gates.iter().filter(|g| g.is_two_qubit()).count() as u64;
    Ok(MetricsReport {
        per_core_gates: per_core_gates(s),
        totals: Totals {
            qubits: p.width(),
            gates: p.source.gates.len() as u64,
            two_qubit_gates,
            teleports: matrix.total,
            slices: p.slices.len(),
        },
        zero_traffic: matrix.total == 0,
        traffic_matrix: matrix,
        per_core_teleports,
        teleports_per_slice: series,
        moving_avg,
        window,
        mean_teleports_per_slice: mean,
        burstiness_cov: burst.value,
        hotspotness_cov: hot.value,
        time_fractions,
        makespan_ns: s.makespan_ns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::Architecture;
    use crate::bench::gen_qft;
    use crate::circuit::{Circuit, Gate, GateKind};
    use crate::mapper::{compile, MapperOptions};
    use crate::schedule::schedule_asap;

    fn pipeline(c: &Circuit, cores: usize, cap: usize) -> (CompiledProgram, Schedule) {
        let a = Architecture::new(cores, cap).unwrap();
        let p = compile(c, &a, &MapperOptions::default()).unwrap();
        let s = schedule_asap(&p, &a).unwrap();
        (p, s)
    }

    fn one_teleport() -> Circuit {
        let mut c = Circuit::new("t", 4);
        c.push(Gate::pair(GateKind::Cnot, 0, 1));
        c.push(Gate::pair(GateKind::Cnot, 2, 3));
        c.push(Gate::pair(GateKind::Cnot, 0, 2));
        c
    }

    #[test]
    fn cov_examples() {
        assert_eq!(coefficient_of_variation(&[1.0; 4]).unwrap().value, 0.0);
        assert!((coefficient_of_variation(&[0.0, 2.0]).unwrap().value - 1.0).abs() < 1e-12);
        let v = coefficient_of_variation(&[0.0, 0.0, 4.0, 0.0])
            .unwrap()
            .value;
        assert!((v - 3f64.sqrt()).abs() < 1e-12);
        let z = coefficient_of_variation(&[0.0, 0.0]).unwrap();
        assert!(z.zero_mean && z.value == 0.0);
        assert_eq!(
            coefficient_of_variation(&[]),
            Err(TrafficError::EmptySeries)
        );
    }

    #[test]
    fn moving_average_examples() {
        assert_eq!(
            moving_average(&[0.0, 2.0, 4.0], 2).unwrap(),
            vec![0.0, 1.0, 3.0]
        );
        assert_eq!(
            moving_average(&[3.0, 1.0, 7.0], 1).unwrap(),
            vec![3.0, 1.0, 7.0]
        );
        assert_eq!(moving_average(&[5.0; 6], 4).unwrap(), vec![5.0; 6]);
        assert_eq!(moving_average(&[1.0], 0), Err(TrafficError::ZeroWindow));
    }

    #[test]
    fn hotspot_examples() {
        let mut m = TrafficMatrix {
            counts: vec![vec![0; 4]; 4],
            ratios: vec![],
            total: 0,
        };
        m.counts[0][1] = 5;
        m.counts[1][0] = 5;
        assert_eq!(hotspot_series(&m), vec![5, 5, 0, 0]);
        let uniform = TrafficMatrix {
            counts: (0..4)
                .map(|i| (0..4).map(|j| u64::from(i != j) * 2).collect())
                .collect(),
            ratios: vec![],
            total: 12,
        };
        let h = as_f64(&hotspot_series(&uniform));
        assert_eq!(coefficient_of_variation(&h).unwrap().value, 0.0);
    }

    #[test]
    fn single_gate_trace() {
        let mut c = Circuit::new("t", 2);
        c.push(Gate::single(GateKind::H, 0));
        let (_, s) = pipeline(&c, 1, 2);
        let g = build_trace(&s, TraceAxis::Physical);
        assert_eq!((g.rows, g.cols), (2, 1));
        assert_eq!(g.get(0, 0), CellState::Compute);
        assert_eq!(g.get(1, 0), CellState::Idle);
    }

    #[test]
    fn teleport_trace_cells() {
        let (p, s) = pipeline(&one_teleport(), 2, 2);
        assert_eq!(p.teleports.len(), 1);
        for axis in [TraceAxis::Physical, TraceAxis::Virtual] {
            let g = build_trace(&s, axis);
            let comm: usize = (0..g.rows).map(|r| g.count(r, CellState::Comm)).sum();
            assert_eq!(comm, 2 * 50);
            for r in 0..g.rows {
                assert!(matches!(g.count(r, CellState::Comm), 0 | 50));
            }
        }
        let m = traffic_matrix(&s);
        assert_eq!(m.total, 1);
        assert_eq!(m.counts[0][1], 1);
        assert_eq!(m.ratios[1][0], 1.0);
    }

    #[test]
    fn time_fractions_disjoint() {
        // Gates 0..40, teleport 40..1040, gate 1040..1080.
        let (_, s) = pipeline(&one_teleport(), 2, 2);
        let f = time_distribution(&s).unwrap();
        assert_eq!(f.both, 0.0);
        assert!((f.compute_only - 80.0 / 1080.0).abs() < 1e-12);
        assert!((f.comm_only - 1000.0 / 1080.0).abs() < 1e-12);
        assert_eq!(f.idle, 0.0);
    }

    #[test]
    fn report_consistency() {
        let (p, s) = pipeline(&gen_qft(16).unwrap(), 4, 4);
        let r = build_report(&p, &s, &ReportOptions::default()).unwrap();
        let series_total: u64 = r.teleports_per_slice.iter().sum();
        assert_eq!(r.traffic_matrix.total, series_total);
        assert_eq!(r.per_core_teleports.iter().sum::<u64>(), 2 * series_total);
        assert_eq!(r.per_core_gates.iter().sum::<u64>(), r.totals.gates);
        let f = r.time_fractions;
        assert!((f.compute_only + f.comm_only + f.both + f.idle - 1.0).abs() < 1e-9);
        assert_eq!(r.window, default_window(p.slices.len()));
        assert_eq!(r.moving_avg.len(), r.teleports_per_slice.len());
    }

    #[test]
    fn single_core_report_is_quiet() {
        let (p, s) = pipeline(&gen_qft(8).unwrap(), 1, 8);
        let r = build_report(&p, &s, &ReportOptions::default()).unwrap();
        assert!(r.zero_traffic);
        assert_eq!(r.burstiness_cov, 0.0);
        assert_eq!(r.hotspotness_cov, 0.0);
        assert_eq!(r.time_fractions.comm_only, 0.0);
        assert_eq!(r.time_fractions.both, 0.0);
    }

    #[test]
    fn window_default() {
        assert_eq!(default_window(0), 1);
        assert_eq!(default_window(10), 1);
        assert_eq!(default_window(21), 2);
        assert_eq!(default_window(200), 10);
    }
}
