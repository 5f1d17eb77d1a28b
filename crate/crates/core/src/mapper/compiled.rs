//! Text form of a compiled program: the circuit grammar with `slice <k>`
//! directives and `teleswap` instructions. A comment header after the
//! `qubits` line records the platform and the slice-0 placement:
//!
//! ```text
//! version 1.0
//! qubits 4
//! # cores 2
//! # capacity 2
//! # place v0 -> c0
//! ...
//! slice 0
//! cnot q[0], q[1]
//! teleswap q[1], q[2]
//! slice 1
//! ...
//! ```
//!
//! Teleswaps close the block of slice `k` and run between slice `k` and
//! slice `k + 1`.

use std::fmt::Write;

use crate::circuit::{
    format_real, parse_lines, write_gate_line, Circuit, Directive, GateKind, ParseError,
};

use super::{Assignment, CompiledProgram, MapperOptions, TeleportOp, Timeslice};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompiledParseError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Header(String),
    #[error("{0}")]
    Inconsistent(String),
}

pub fn write_compiled(p: &CompiledProgram) -> String {
    let mut out = String::with_capacity(64 + p.source.gates.len() * 16);
    let _ = writeln!(out, "version 1.0");
    let _ = writeln!(out, "qubits {}", p.width());
    let _ = writeln!(out, "# cores {}", p.num_cores);
    let _ = writeln!(out, "# capacity {}", p.capacity);
    let o = &p.options;
    let _ = writeln!(
        out,
        "# options lookahead={} decay={} migration_penalty={} max_passes={} seed={} pad={}",
        o.lookahead,
        format_real(o.decay),
        format_real(o.migration_penalty),
        o.max_passes
            .map_or("default".to_string(), |m| m.to_string()),
        o.seed,
        o.pad
    );
    for (v, c) in p.assignment.initial.iter().enumerate() {
        let _ = writeln!(out, "# place v{v} -> c{c}");
    }
    for slice in &p.slices {
        let _ = writeln!(out, "slice {}", slice.index);
        for &gi in &slice.gates {
            write_gate_line(&mut out, &p.source.gates[gi]);
            out.push('\n');
        }
        for op in p.teleports_after(slice.index) {
            let _ = writeln!(out, "teleswap q[{}], q[{}]", op.qubits.0, op.qubits.1);
        }
    }
    out
}

fn parse_options(text: &str) -> Result<MapperOptions, String> {
    let mut o = MapperOptions::default();
    for item in text.split_whitespace() {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("malformed option '{item}'"))?;
        let bad = || format!("bad value for option '{k}': '{v}'");
        match k {
            "lookahead" => o.lookahead = v.parse().map_err(|_| bad())?,
            "decay" => o.decay = v.parse().map_err(|_| bad())?,
            "migration_penalty" => o.migration_penalty = v.parse().map_err(|_| bad())?,
            "max_passes" => {
                o.max_passes = if v == "default" {
                    None
                } else {
                    Some(v.parse().map_err(|_| bad())?)
                }
            }
            "seed" => o.seed = v.parse().map_err(|_| bad())?,
            "pad" => o.pad = v.parse().map_err(|_| bad())?,
            _ => return Err(format!("unknown option '{k}'")),
        }
    }
    Ok(o)
}

fn parse_place(text: &str) -> Option<(usize, usize)> {
    let (v, c) = text.split_once("->")?;
    let v = v.trim().strip_prefix('v')?.parse().ok()?;
    let c = c.trim().strip_prefix('c')?.parse().ok()?;
    Some((v, c))
}

/// Parses and validates a compiled program. The reconstructed source
/// circuit lists the gates in file order.
pub fn parse_compiled(text: &str) -> Result<CompiledProgram, CompiledParseError> {
    let (width, lines) = parse_lines(text)?;
    let at = |line: usize, message: String| CompiledParseError::Line { line, message };

    let mut cores = None;
    let mut capacity = None;
    let mut options = MapperOptions::default();
    let mut place: Vec<Option<usize>> = vec![None; width];
    let mut source = Circuit::new("", width);
    let mut slices: Vec<Timeslice> = Vec::new();
    // (line, slice, a, b)
    let mut swaps: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut swapping = false;

    for pl in lines {
        let line = pl.line;
        match pl.directive {
            Directive::Comment(c) => {
                if let Some(v) = c.strip_prefix("cores ") {
                    cores = Some(
                        v.trim()
                            .parse::<usize>()
                            .map_err(|_| at(line, format!("bad core count '{v}'")))?,
                    );
                } else if let Some(v) = c.strip_prefix("capacity ") {
                    capacity = Some(
                        v.trim()
                            .parse::<usize>()
                            .map_err(|_| at(line, format!("bad capacity '{v}'")))?,
                    );
                } else if let Some(v) = c.strip_prefix("options ") {
                    options = parse_options(v).map_err(|m| at(line, m))?;
                } else if let Some(v) = c.strip_prefix("place ") {
                    let (q, core) = parse_place(v)
                        .ok_or_else(|| at(line, format!("malformed placement '{v}'")))?;
                    let slot = place.get_mut(q).ok_or_else(|| {
                        at(line, format!("placement of v{q} outside width {width}"))
                    })?;
                    if slot.replace(core).is_some() {
                        return Err(at(line, format!("v{q} placed twice")));
                    }
                }
            }
            Directive::Slice(k) => {
                if k != slices.len() {
                    return Err(at(
                        line,
                        format!("expected slice {}, found slice {k}", slices.len()),
                    ));
                }
                slices.push(Timeslice {
                    index: k,
                    gates: Vec::new(),
                });
                swapping = false;
            }
            Directive::Gate(g) => {
                let Some(current) = slices.last_mut() else {
                    return Err(at(
                        line,
                        "instruction before the first slice directive".into(),
                    ));
                };
                if g.kind == GateKind::TeleSwap {
                    swaps.push((line, current.index, g.qubits[0], g.qubits[1]));
                    swapping = true;
                } else {
                    if swapping {
                        return Err(at(
                            line,
                            format!("gate after teleswap in slice {}", current.index),
                        ));
                    }
                    current.gates.push(source.gates.len());
                    source.push(g);
                }
            }
        }
    }

    let num_cores =
        cores.ok_or_else(|| CompiledParseError::Header("missing '# cores' header".into()))?;
    let capacity =
        capacity.ok_or_else(|| CompiledParseError::Header("missing '# capacity' header".into()))?;
    let initial = place
        .iter()
        .enumerate()
        .map(|(q, c)| {
            c.ok_or_else(|| CompiledParseError::Header(format!("missing placement of v{q}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if num_cores * capacity != width {
        return Err(CompiledParseError::Header(format!(
            "{num_cores} cores x {capacity} qubits does not match width {width}"
        )));
    }
    if let Some(q) = initial.iter().position(|&c| c >= num_cores) {
        return Err(CompiledParseError::Header(format!(
            "v{q} placed on missing core {}",
            initial[q]
        )));
    }

    let mut cur = initial.clone();
    let mut teleports = Vec::with_capacity(swaps.len());
    for (line, s, a, b) in swaps {
        if s + 1 >= slices.len() {
            return Err(at(line, format!("teleswap after the last slice {s}")));
        }
        if cur[a] == cur[b] {
            return Err(at(
                line,
                format!("teleswap q[{a}], q[{b}] within core {}", cur[a]),
            ));
        }
        teleports.push(TeleportOp {
            between: (s, s + 1),
            qubits: (a, b),
            cores: (cur[a], cur[b]),
        });
        cur.swap(a, b);
    }

    let p = CompiledProgram {
        source,
        slices,
        assignment: Assignment { initial },
        teleports,
        options,
        num_cores,
        capacity,
    };
    p.verify()
        .map_err(|e| CompiledParseError::Inconsistent(e.to_string()))?;
    Ok(p)
}
