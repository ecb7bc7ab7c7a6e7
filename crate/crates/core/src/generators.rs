//! Derived generators, expanded into primitives at construction time.
//!
//! Each expansion is tagged with its name so exports can group the nodes.
//!
//! | derived            | expansion                                         | matrix                 |
//! |--------------------|---------------------------------------------------|------------------------|
//! | green phase α      | Z-box `e^{iα}`                                    | `diag(1, e^{iα})`      |
//! | triangle           | W 1→2 with one fan leg closed by Z-box(1) effect  | `[[1,1],[0,1]]`        |
//! | inverse triangle   | as above with Z-box(−1)                           | `[[1,−1],[0,1]]`       |
//! | pink τ∈{0,π}       | Hadamard on every leg of Z-box `e^{iτ}`, rescaled | parity indicator       |
//! | V / V†             | `H·S·H` / `H·S†·H`                                |                        |
//! | And-box            | `T⁻¹ ∘ Z(2→1) ∘ (T ⊗ T)`                          | `|x∧y⟩⟨xy|`            |
//! | W spider 1→m       | chain of m−1 W generators                         | one-hot fan            |

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::diagram::{Builder, Diagram, Label, Port};
use crate::error::{Error, Result};

const ONE: C64 = C64::new(1.0, 0.0);

/// Phase of a pink spider; only 0 and π are defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pink {
    Zero,
    Pi,
}

impl Pink {
    pub fn from_angle(tau: f64) -> Result<Self> {
        let r = tau.rem_euclid(2.0 * PI);
        if r.abs() < 1e-12 || (2.0 * PI - r).abs() < 1e-12 {
            Ok(Pink::Zero)
        } else if (r - PI).abs() < 1e-12 {
            Ok(Pink::Pi)
        } else {
            Err(Error::PinkPhase(tau))
        }
    }

    pub fn angle(self) -> f64 {
        match self {
            Pink::Zero => 0.0,
            Pink::Pi => PI,
        }
    }

    pub fn bit(self) -> bool {
        self == Pink::Pi
    }

    pub fn plus(self, other: Pink) -> Pink {
        if self == other {
            Pink::Zero
        } else {
            Pink::Pi
        }
    }
}

/// Association shape for building a W spider from binary W nodes.
#[derive(Clone, Debug, PartialEq)]
pub enum WTree {
    Leaf,
    Fork(Box<WTree>, Box<WTree>),
}

impl WTree {
    pub fn leaves(&self) -> usize {
        match self {
            WTree::Leaf => 1,
            WTree::Fork(l, r) => l.leaves() + r.leaves(),
        }
    }

    /// Right-nested chain with `m` leaves.
    pub fn chain(m: usize) -> WTree {
        if m <= 1 {
            WTree::Leaf
        } else {
            WTree::Fork(Box::new(WTree::Leaf), Box::new(WTree::chain(m - 1)))
        }
    }
}

impl Builder {
    pub fn green(&mut self, alpha: f64, ins: &[Port], n_out: usize) -> Vec<Port> {
        self.tagged("green", |b| b.zbox_c(C64::from_polar(1.0, alpha), ins, n_out))
    }

    fn triangle_with(&mut self, c: C64, p: Port, tag: &str) -> Port {
        self.tagged(tag, |b| {
            let (closed, open) = b.w(p);
            b.zbox_effect(c, &[closed]);
            open
        })
    }

    fn triangle_t_with(&mut self, c: C64, p: Port, tag: &str) -> Port {
        self.tagged(tag, |b| {
            let s = b.zbox_state(c, 1)[0];
            b.w_merge(s, p)
        })
    }

    /// `[[1,1],[0,1]]`
    pub fn triangle(&mut self, p: Port) -> Port {
        self.triangle_with(ONE, p, "triangle")
    }

    /// `[[1,−1],[0,1]]`
    pub fn triangle_inv(&mut self, p: Port) -> Port {
        self.triangle_with(-ONE, p, "triangle_inv")
    }

    /// `[[1,0],[1,1]]`
    pub fn triangle_t(&mut self, p: Port) -> Port {
        self.triangle_t_with(ONE, p, "triangle_t")
    }

    /// `[[1,0],[−1,1]]`
    pub fn triangle_inv_t(&mut self, p: Port) -> Port {
        self.triangle_t_with(-ONE, p, "triangle_inv_t")
    }

    /// Pink spider: entries are 1 exactly where the parity of all legs equals `tau`.
    pub fn pink(&mut self, tau: Pink, ins: &[Port], n_out: usize) -> Vec<Port> {
        let legs = ins.len() + n_out;
        let tag = match tau {
            Pink::Zero => "pink0",
            Pink::Pi => "pinkpi",
        };
        self.tagged(tag, |b| match (ins.len(), n_out, tau) {
            // One-legged cases have exact integer expansions.
            (0, 1, Pink::Zero) => b.zbox_state(C64::new(0.0, 0.0), 1),
            (0, 1, Pink::Pi) => {
                let s = b.zbox_state(ONE, 1)[0];
                vec![b.triangle_inv(s)]
            }
            (1, 0, Pink::Zero) => {
                b.zbox_effect(C64::new(0.0, 0.0), ins);
                vec![]
            }
            (1, 0, Pink::Pi) => {
                let p = b.triangle_inv_t(ins[0]);
                b.zbox_effect(ONE, &[p]);
                vec![]
            }
            _ => {
                let hs: Vec<Port> = ins.iter().map(|&p| b.had(p)).collect();
                let centre = b.zbox_c(C64::from_polar(1.0, tau.angle()), &hs, n_out);
                let outs = centre.into_iter().map(|p| b.had(p)).collect();
                // H^{⊗n} on a Z spider leaves a factor 2^{1 − n/2}.
                b.scalar(C64::new(2f64.powf(legs as f64 / 2.0 - 1.0), 0.0));
                outs
            }
        })
    }

    pub fn not(&mut self, p: Port) -> Port {
        self.pink(Pink::Pi, &[p], 1)[0]
    }

    pub fn xor(&mut self, a: Port, b: Port) -> Port {
        self.pink(Pink::Zero, &[a, b], 1)[0]
    }

    /// `|bit⟩`
    pub fn basis_state(&mut self, bit: bool) -> Port {
        self.pink(if bit { Pink::Pi } else { Pink::Zero }, &[], 1)[0]
    }

    /// `⟨bit|`
    pub fn basis_effect(&mut self, p: Port, bit: bool) {
        self.pink(if bit { Pink::Pi } else { Pink::Zero }, &[p], 0);
    }

    pub fn v_gate(&mut self, p: Port) -> Port {
        self.tagged("V", |b| {
            let h = b.had(p);
            let s = b.zbox1(C64::new(0.0, 1.0), h);
            b.had(s)
        })
    }

    pub fn v_dag(&mut self, p: Port) -> Port {
        self.tagged("Vdag", |b| {
            let h = b.had(p);
            let s = b.zbox1(C64::new(0.0, -1.0), h);
            b.had(s)
        })
    }

    pub fn and_box(&mut self, x: Port, y: Port) -> Port {
        self.tagged("and", |b| {
            let tx = b.triangle(x);
            let ty = b.triangle(y);
            let z = b.zbox_c(ONE, &[tx, ty], 1)[0];
            b.triangle_inv(z)
        })
    }

    /// Conjunction of any number of wires (an And-box tree). Empty input gives `|1⟩`.
    pub fn and_all(&mut self, ps: &[Port]) -> Port {
        match ps {
            [] => self.basis_state(true),
            [p] => *p,
            [first, rest @ ..] => rest.iter().fold(*first, |acc, &p| self.and_box(acc, p)),
        }
    }

    /// W spider 1→m built with the given association shape.
    pub fn w_tree(&mut self, p: Port, shape: &WTree) -> Vec<Port> {
        match shape {
            WTree::Leaf => vec![p],
            WTree::Fork(l, r) => {
                let (a, b) = self.w(p);
                let mut out = self.w_tree(a, l);
                out.extend(self.w_tree(b, r));
                out
            }
        }
    }

    /// W spider 1→m; `m = 1` is a plain wire.
    pub fn w_spider(&mut self, p: Port, m: usize) -> Result<Vec<Port>> {
        if m == 0 {
            return Err(Error::EmptyWSpider);
        }
        Ok(self.tagged("wspider", |b| b.w_tree(p, &WTree::chain(m))))
    }

    /// Flipped W spider m→1.
    pub fn w_merge_all(&mut self, ps: &[Port]) -> Result<Port> {
        let (&last, rest) = ps.split_last().ok_or(Error::EmptyWSpider)?;
        Ok(self.tagged("wspider", |b| {
            rest.iter().rev().fold(last, |acc, &p| b.w_merge(p, acc))
        }))
    }
}

fn unary(f: impl FnOnce(&mut Builder, Port) -> Port) -> Diagram {
    let mut b = Builder::new();
    let i = b.input();
    let o = f(&mut b, i);
    b.output(o);
    b.finish().expect("well-formed unary generator")
}

/// Z-box with `n_in` inputs and `n_out` outputs (0→0 is allowed here: a scalar `1 + a`).
pub fn zbox(a: C64, n_in: usize, n_out: usize) -> Diagram {
    let mut b = Builder::new();
    let ins = b.inputs(n_in);
    let outs = b.zbox_c(a, &ins, n_out);
    b.outputs(outs);
    b.finish().expect("well-formed z-box")
}

pub fn zbox_label(label: Label, n_in: usize, n_out: usize) -> Diagram {
    let mut b = Builder::new();
    let ins = b.inputs(n_in);
    let outs = b.zbox(label, &ins, n_out);
    b.outputs(outs);
    b.finish().expect("well-formed z-box")
}

/// Green spider with phase α: a Z-box labelled `e^{iα}`.
pub fn green(alpha: f64, n_in: usize, n_out: usize) -> Diagram {
    let mut b = Builder::new();
    let ins = b.inputs(n_in);
    let outs = b.green(alpha, &ins, n_out);
    b.outputs(outs);
    b.finish().expect("well-formed green spider")
}

pub fn hadamard() -> Diagram {
    unary(|b, p| b.had(p))
}

/// The 1→2 W generator.
pub fn w() -> Diagram {
    let mut b = Builder::new();
    let i = b.input();
    let (x, y) = b.w(i);
    b.outputs([x, y]);
    b.finish().expect("well-formed W")
}

/// The 2→1 W generator.
pub fn w_merge() -> Diagram {
    w().transpose()
}

pub fn triangle() -> Diagram {
    unary(|b, p| b.triangle(p))
}

pub fn triangle_inv() -> Diagram {
    unary(|b, p| b.triangle_inv(p))
}

pub fn triangle_t() -> Diagram {
    unary(|b, p| b.triangle_t(p))
}

pub fn triangle_inv_t() -> Diagram {
    unary(|b, p| b.triangle_inv_t(p))
}

/// Pink spider; rejects any phase other than 0 or π.
pub fn pink(tau: f64, n_in: usize, n_out: usize) -> Result<Diagram> {
    let tau = Pink::from_angle(tau)?;
    Ok(pink_of(tau, n_in, n_out))
}

pub fn pink_of(tau: Pink, n_in: usize, n_out: usize) -> Diagram {
    let mut b = Builder::new();
    let ins = b.inputs(n_in);
    let outs = b.pink(tau, &ins, n_out);
    b.outputs(outs);
    b.finish().expect("well-formed pink spider")
}

pub fn v_gate() -> Diagram {
    unary(|b, p| b.v_gate(p))
}

pub fn v_dag() -> Diagram {
    unary(|b, p| b.v_dag(p))
}

/// And-box, 2→1.
pub fn and_box() -> Diagram {
    let mut b = Builder::new();
    let ins = b.inputs(2);
    let o = b.and_box(ins[0], ins[1]);
    b.output(o);
    b.finish().expect("well-formed and-box")
}

/// W spider 1→m; `m = 0` is rejected.
pub fn w_spider(m: usize) -> Result<Diagram> {
    if m == 0 {
        return Err(Error::EmptyWSpider);
    }
    w_spider_shaped(&WTree::chain(m))
}

pub fn w_spider_shaped(shape: &WTree) -> Result<Diagram> {
    let mut b = Builder::new();
    let i = b.input();
    let outs = b.w_tree(i, shape);
    b.outputs(outs);
    b.finish()
}

/// `n` parallel plain wires.
pub fn identity(n: usize) -> Diagram {
    let mut d = Diagram::new();
    let ins: Vec<_> = (0..n).map(|_| d.add_input()).collect();
    let outs: Vec<_> = (0..n).map(|_| d.add_output()).collect();
    for (i, o) in ins.into_iter().zip(outs) {
        d.connect(Port::new(i, 0), Port::new(o, 0));
    }
    d
}

pub fn swap() -> Diagram {
    let mut d = Diagram::new();
    let i0 = d.add_input();
    let i1 = d.add_input();
    let o0 = d.add_output();
    let o1 = d.add_output();
    d.connect(Port::new(i0, 0), Port::new(o1, 0));
    d.connect(Port::new(i1, 0), Port::new(o0, 0));
    d
}

/// 0→2 bent wire, `|00⟩ + |11⟩`.
pub fn cap() -> Diagram {
    let mut d = Diagram::new();
    let a = d.add_output();
    let b = d.add_output();
    d.connect(Port::new(a, 0), Port::new(b, 0));
    d
}

/// 2→0 bent wire, `⟨00| + ⟨11|`.
pub fn cup() -> Diagram {
    cap().transpose()
}

pub fn basis_state(bit: bool) -> Diagram {
    let mut b = Builder::new();
    let o = b.basis_state(bit);
    b.output(o);
    b.finish().expect("well-formed basis state")
}

/// 0→0 diagram worth `s`.
pub fn scalar(s: C64) -> Diagram {
    let mut b = Builder::new();
    b.scalar(s);
    b.finish().expect("well-formed scalar")
}

/// Pauli-X as a pink π 1→1 spider.
pub fn not_gate() -> Diagram {
    pink_of(Pink::Pi, 1, 1)
}
