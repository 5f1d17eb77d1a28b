//! Ancilla-free decompositions of multi-controlled gates into one- and
//! two-qubit gates.
//!
//! Multi-controlled phases use the controlled-rotation ladder
//! `C^m P(l) = CP(l/2)(c,t) . C^{m-1}X(rest; c) . CP(-l/2)(c,t) .
//! C^{m-1}X(rest; c) . C^{m-1}P(l/2)(rest; t)`. The multi-controlled X
//! gates borrow the idle qubits as dirty ancillas (Toffoli V-chain, or a
//! split into four smaller gates when only one ancilla is available), so
//! the gate count stays quadratic in the number of controls.

use std::f64::consts::PI;

use crate::circuit::{Gate, GateKind};

#[derive(Debug, Default)]
pub(crate) struct Emitter {
    pub gates: Vec<Gate>,
}

impl Emitter {
    pub fn one(&mut self, kind: GateKind, q: usize) {
        self.gates.push(Gate::single(kind, q));
    }

    pub fn two(&mut self, kind: GateKind, a: usize, b: usize) {
        self.gates.push(Gate::pair(kind, a, b));
    }

    /// Standard 6-CNOT Toffoli with target `c`.
    pub fn toffoli(&mut self, a: usize, b: usize, c: usize) {
        use GateKind::*;
        self.one(H, c);
        self.two(Cnot, b, c);
        self.one(Tdg, c);
        self.two(Cnot, a, c);
        self.one(T, c);
        self.two(Cnot, b, c);
        self.one(Tdg, c);
        self.two(Cnot, a, c);
        self.one(T, b);
        self.one(T, c);
        self.one(H, c);
        self.two(Cnot, a, b);
        self.one(T, a);
        self.one(Tdg, b);
        self.two(Cnot, a, b);
    }

    /// Z controlled on every other qubit of `qubits`.
    pub fn mcz(&mut self, qubits: &[usize]) {
        match qubits {
            [] => {}
            [q] => self.one(GateKind::Z, *q),
            [a, b] => self.two(GateKind::Cz, *a, *b),
            _ => {
                let (t, controls) = qubits.split_last().expect("non-empty");
                self.mcp(PI, controls, *t, &[]);
            }
        }
    }

    /// Phase `angle` on `target` controlled by `controls`, with `free`
    /// qubits usable as dirty ancillas.
    pub fn mcp(&mut self, angle: f64, controls: &[usize], target: usize, free: &[usize]) {
        match controls {
            [] => self.one(GateKind::Rz(angle), target),
            [c] if angle == PI => self.two(GateKind::Cz, *c, target),
            [c] => self.two(GateKind::Cphase(angle), *c, target),
            _ => {
                let (&c, rest) = controls.split_last().expect("len >= 2");
                let mut dirty = Vec::with_capacity(free.len() + 1);
                dirty.push(target);
                dirty.extend_from_slice(free);
                self.two(GateKind::Cphase(angle / 2.0), c, target);
                self.mcx(rest, c, &dirty);
                self.two(GateKind::Cphase(-angle / 2.0), c, target);
                self.mcx(rest, c, &dirty);
                let mut free2 = free.to_vec();
                free2.push(c);
                self.mcp(angle / 2.0, rest, target, &free2);
            }
        }
    }

    /// X on `target` controlled by `controls`; `dirty` qubits may be
    /// borrowed in any state and are restored.
    pub fn mcx(&mut self, controls: &[usize], target: usize, dirty: &[usize]) {
        let m = controls.len();
        match m {
            0 => self.one(GateKind::X, target),
            1 => self.two(GateKind::Cnot, controls[0], target),
            2 => self.toffoli(controls[0], controls[1], target),
            _ if dirty.len() >= m - 2 => self.v_chain(controls, target, &dirty[..m - 2]),
            _ if !dirty.is_empty() => {
                let a = dirty[0];
                let (c1, c2) = controls.split_at(m.div_ceil(2));
                let mut first_dirty: Vec<usize> = c2.to_vec();
                first_dirty.push(target);
                first_dirty.extend_from_slice(&dirty[1..]);
                let mut second_ctrl: Vec<usize> = c2.to_vec();
                second_ctrl.push(a);
                let mut second_dirty: Vec<usize> = c1.to_vec();
                second_dirty.extend_from_slice(&dirty[1..]);
                for _ in 0..2 {
                    self.mcx(c1, a, &first_dirty);
                    self.mcx(&second_ctrl, target, &second_dirty);
                }
            }
            _ => {
                self.one(GateKind::H, target);
                self.mcp(PI, controls, target, &[]);
                self.one(GateKind::H, target);
            }
        }
    }

    /// Toffoli V-chain with `m - 2` dirty ancillas: 4(m-2) Toffolis.
    fn v_chain(&mut self, c: &[usize], t: usize, a: &[usize]) {
        let m = c.len();
        debug_assert!(m >= 3 && a.len() == m - 2);
        let down = |e: &mut Self| {
            for i in (2..m - 1).rev() {
                e.toffoli(c[i], a[i - 2], a[i - 1]);
            }
        };
        let up = |e: &mut Self| {
            for i in 2..m - 1 {
                e.toffoli(c[i], a[i - 2], a[i - 1]);
            }
        };
        self.toffoli(c[m - 1], a[m - 3], t);
        down(self);
        self.toffoli(c[0], c[1], a[0]);
        up(self);
        self.toffoli(c[m - 1], a[m - 3], t);
        down(self);
        self.toffoli(c[0], c[1], a[0]);
        up(self);
    }
}
