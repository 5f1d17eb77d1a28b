//! Seeded generators for the benchmark families: QFT, Grover, Cuccaro
//! adder, quantum volume and uniform random circuits.
//!
//! Randomness comes from [`crate::seed::stream_rng`]; quantum volume draws
//! one stream per layer and random circuits one stream per gate.

mod decompose;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::seed::stream_rng;
use decompose::Emitter;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BenchError {
    #[error("{family} needs at least {min} qubits, got {got}")]
    TooNarrow {
        family: BenchFamily,
        min: usize,
        got: usize,
    },
    #[error("cuccaro width must be even, got {0}")]
    OddWidth(usize),
    #[error("marked bitstring has length {got}, expected {expected}")]
    MarkedLength { expected: usize, got: usize },
    #[error("marked bitstring may only contain '0' and '1'")]
    MarkedChars,
    #[error("{0} must be at least 1")]
    ZeroParam(&'static str),
    #[error("two-qubit fraction must lie in [0, 1], got {0}")]
    Fraction(f64),
    #[error("unknown benchmark '{0}'")]
    UnknownFamily(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchFamily {
    Qft,
    Grover,
    Cuccaro,
    #[serde(rename = "qv")]
    QVolume,
    Random,
}

impl BenchFamily {
    pub const ALL: [BenchFamily; 5] = [
        BenchFamily::Qft,
        BenchFamily::Grover,
        BenchFamily::Cuccaro,
        BenchFamily::QVolume,
        BenchFamily::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchFamily::Qft => "qft",
            BenchFamily::Grover => "grover",
            BenchFamily::Cuccaro => "cuccaro",
            BenchFamily::QVolume => "qv",
            BenchFamily::Random => "random",
        }
    }

    pub fn min_width(self) -> usize {
        match self {
            BenchFamily::Qft => 1,
            BenchFamily::Cuccaro => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for BenchFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchFamily {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qft" => Ok(BenchFamily::Qft),
            "grover" => Ok(BenchFamily::Grover),
            "cuccaro" => Ok(BenchFamily::Cuccaro),
            "qv" | "qvolume" | "quantum_volume" => Ok(BenchFamily::QVolume),
            "random" => Ok(BenchFamily::Random),
            _ => Err(BenchError::UnknownFamily(s.to_string())),
        }
    }
}

/// Family-specific parameters. `None` selects the default.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchParams {
    /// Grover iterations (default 1).
    pub iterations: Option<usize>,
    /// Grover marked bitstring, qubit 0 first (default all ones).
    pub marked: Option<String>,
    /// Quantum volume layers (default: width).
    pub depth: Option<usize>,
    /// Random circuit gate count (default: [`DEFAULT_RANDOM_GATES_PER_QUBIT`] x width).
    pub gates: Option<usize>,
    /// Random circuit two-qubit probability (default 0.5).
    pub two_qubit_fraction: Option<f64>,
}

pub const DEFAULT_RANDOM_GATES_PER_QUBIT: usize = 10;
pub const DEFAULT_TWO_QUBIT_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub family: BenchFamily,
    pub width: usize,
    pub seed: u64,
    #[serde(default)]
    pub params: BenchParams,
}

impl BenchSpec {
    pub fn new(family: BenchFamily, width: usize, seed: u64) -> Self {
        BenchSpec {
            family,
            width,
            seed,
            params: BenchParams::default(),
        }
    }

    pub fn generate(&self) -> Result<Circuit, BenchError> {
        let n = self.width;
        let p = &self.params;
        let mut c = match self.family {
            BenchFamily::Qft => gen_qft(n)?,
            BenchFamily::Grover => {
                let marked = p.marked.clone().unwrap_or_else(|| "1".repeat(n));
                gen_grover(n, p.iterations.unwrap_or(1), &marked)?
            }
            BenchFamily::Cuccaro => gen_cuccaro(n)?,
            BenchFamily::QVolume => gen_qvolume(n, p.depth.unwrap_or(n), self.seed)?,
            BenchFamily::Random => gen_random(
                n,
                p.gates.unwrap_or(DEFAULT_RANDOM_GATES_PER_QUBIT * n),
                p.two_qubit_fraction.unwrap_or(DEFAULT_TWO_QUBIT_FRACTION),
                self.seed,
            )?,
        };
        c.name = format!("{}_{}", self.family, n);
        Ok(c)
    }
}

fn check_width(family: BenchFamily, n: usize) -> Result<(), BenchError> {
    if n < family.min_width() {
        return Err(BenchError::TooNarrow {
            family,
            min: family.min_width(),
            got: n,
        });
    }
    Ok(())
}

/// QFT without the final reversal swaps: `n + n(n-1)/2` gates.
pub fn gen_qft(n: usize) -> Result<Circuit, BenchError> {
    check_width(BenchFamily::Qft, n)?;
    let mut c = Circuit::new(format!("qft_{n}"), n);
    c.gates.reserve(n + n * (n - 1) / 2);
    for t in 0..n {
        c.push(Gate::single(GateKind::H, t));
        for k in t + 1..n {
            let angle = PI / 2f64.powi((k - t) as i32);
            c.push(Gate::pair(GateKind::Cphase(angle), k, t));
        }
    }
    Ok(c)
}

/// Grover search over all `n` qubits. `marked[i]` is the bit of qubit `i`.
pub fn gen_grover(n: usize, iterations: usize, marked: &str) -> Result<Circuit, BenchError> {
    check_width(BenchFamily::Grover, n)?;
    if iterations == 0 {
        return Err(BenchError::ZeroParam("iterations"));
    }
    if marked.chars().count() != n {
        return Err(BenchError::MarkedLength {
            expected: n,
            got: marked.chars().count(),
        });
    }
    let bits: Vec<bool> = marked
        .chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(BenchError::MarkedChars),
        })
        .collect::<Result<_, _>>()?;

    let all: Vec<usize> = (0..n).collect();
    let mut e = Emitter::default();
    for &q in &all {
        e.one(GateKind::H, q);
    }
    for _ in 0..iterations {
        let flips: Vec<usize> = all.iter().copied().filter(|&q| !bits[q]).collect();
        for &q in &flips {
            e.one(GateKind::X, q);
        }
        e.mcz(&all);
        for &q in &flips {
            e.one(GateKind::X, q);
        }

        for kind in [GateKind::H, GateKind::X] {
            for &q in &all {
                e.one(kind, q);
            }
        }
        e.mcz(&all);
        for kind in [GateKind::X, GateKind::H] {
            for &q in &all {
                e.one(kind, q);
            }
        }
    }
    Ok(Circuit {
        name: format!("grover_{n}"),
        width: n,
        gates: e.gates,
    })
}

/// Qubit layout of the Cuccaro adder of total width `w`: registers
/// `a[0..n]`, `b[0..n]`, then carry-in and carry-out.
#[derive(Debug, Clone, Copy)]
pub struct CuccaroLayout {
    pub n: usize,
}

impl CuccaroLayout {
    pub fn a(&self, i: usize) -> usize {
        i
    }
    pub fn b(&self, i: usize) -> usize {
        self.n + i
    }
    pub fn carry_in(&self) -> usize {
        2 * self.n
    }
    pub fn carry_out(&self) -> usize {
        2 * self.n + 1
    }
}

/// Cuccaro ripple-carry adder on `w = 2n + 2` qubits.
pub fn gen_cuccaro(w: usize) -> Result<Circuit, BenchError> {
    check_width(BenchFamily::Cuccaro, w)?;
    if !w.is_multiple_of(2) {
        return Err(BenchError::OddWidth(w));
    }
    let l = CuccaroLayout { n: (w - 2) / 2 };
    let mut e = Emitter::default();
    let maj = |e: &mut Emitter, c: usize, b: usize, a: usize| {
        e.two(GateKind::Cnot, a, b);
        e.two(GateKind::Cnot, a, c);
        e.toffoli(c, b, a);
    };
    let uma = |e: &mut Emitter, c: usize, b: usize, a: usize| {
        e.toffoli(c, b, a);
        e.two(GateKind::Cnot, a, c);
        e.two(GateKind::Cnot, c, b);
    };
    maj(&mut e, l.carry_in(), l.b(0), l.a(0));
    for i in 1..l.n {
        maj(&mut e, l.a(i - 1), l.b(i), l.a(i));
    }
    e.two(GateKind::Cnot, l.a(l.n - 1), l.carry_out());
    for i in (1..l.n).rev() {
        uma(&mut e, l.a(i - 1), l.b(i), l.a(i));
    }
    uma(&mut e, l.carry_in(), l.b(0), l.a(0));
    Ok(Circuit {
        name: format!("cuccaro_{w}"),
        width: w,
        gates: e.gates,
    })
}

/// Quantum volume model circuit: each layer pairs qubits through a random
/// permutation and applies a fixed-shape generic two-qubit block with
/// random angles to each pair.
pub fn gen_qvolume(n: usize, depth: usize, seed: u64) -> Result<Circuit, BenchError> {
    check_width(BenchFamily::QVolume, n)?;
    if depth == 0 {
        return Err(BenchError::ZeroParam("depth"));
    }
    let mut c = Circuit::new(format!("qv_{n}"), n);
    for layer in 0..depth {
        let mut rng = stream_rng(seed, "qvolume", layer as u64);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        for pair in perm.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            let mut angle = || rng.gen_range(0.0..TAU);
            let mut rot = |c: &mut Circuit, shape: &[fn(f64) -> GateKind]| {
                for q in [a, b] {
                    for mk in shape {
                        c.push(Gate::single(mk(angle()), q));
                    }
                }
            };
            rot(&mut c, &[GateKind::Rz, GateKind::Ry, GateKind::Rz]);
            c.push(Gate::pair(GateKind::Cnot, a, b));
            rot(&mut c, &[GateKind::Rz, GateKind::Ry]);
            c.push(Gate::pair(GateKind::Cnot, a, b));
            rot(&mut c, &[GateKind::Ry]);
            c.push(Gate::pair(GateKind::Cnot, a, b));
            rot(&mut c, &[GateKind::Rz, GateKind::Ry, GateKind::Rz]);
        }
    }
    Ok(c)
}

/// Uniform random circuit over {H, X, RZ, CNOT}; each gate is a CNOT with
/// probability `p`.
pub fn gen_random(n: usize, g: usize, p: f64, seed: u64) -> Result<Circuit, BenchError> {
    check_width(BenchFamily::Random, n)?;
    if g == 0 {
        return Err(BenchError::ZeroParam("gate count"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(BenchError::Fraction(p));
    }
    let mut c = Circuit::new(format!("random_{n}"), n);
    c.gates.reserve(g);
    for i in 0..g {
        let mut rng = stream_rng(seed, "random", i as u64);
        let two = rng.gen::<f64>() < p;
        if two {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            c.push(Gate::pair(GateKind::Cnot, a, b));
        } else {
            let q = rng.gen_range(0..n);
            let kind = match rng.gen_range(0..3) {
                0 => GateKind::H,
                1 => GateKind::X,
                _ => GateKind::Rz(rng.gen_range(0.0..TAU)),
            };
            c.push(Gate::single(kind, q));
        }
    }
    Ok(c)
}
