//! Gate-list circuits, as produced by extraction.
//!
//! Qubit 0 is the most significant bit. Gates act in list order.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::diagram::{Builder, Diagram, Label};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    /// `exp(−iθZ/2)`
    Rz(usize, f64),
    /// `exp(−iθX/2)`
    Rx(usize, f64),
    Cnot(usize, usize),
    Cz(usize, usize),
    /// Global phase `e^{iγ}`.
    Phase(f64),
}

impl Gate {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::Rz(q, _) | Gate::Rx(q, _) => vec![q],
            Gate::Cnot(a, b) | Gate::Cz(a, b) => vec![a, b],
            Gate::Phase(_) => vec![],
        }
    }

    fn single(&self) -> Option<(usize, [C64; 4])> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = |x: f64| C64::new(x, 0.0);
        match *self {
            Gate::H(q) => Some((q, [r(h), r(h), r(h), r(-h)])),
            Gate::Rz(q, t) => Some((
                q,
                [C64::from_polar(1.0, -t / 2.0), r(0.0), r(0.0), C64::from_polar(1.0, t / 2.0)],
            )),
            Gate::Rx(q, t) => {
                let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
                Some((q, [r(c), C64::new(0.0, -s), C64::new(0.0, -s), r(c)]))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::Rz(q, t) => write!(f, "RZ {q} {t}"),
            Gate::Rx(q, t) => write!(f, "RX {q} {t}"),
            Gate::Cnot(a, b) => write!(f, "CNOT {a},{b}"),
            Gate::Cz(a, b) => write!(f, "CZ {a},{b}"),
            Gate::Phase(g) => write!(f, "PHASE {g}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        let qs = g.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::IndexOutOfRange {
                index: q,
                bound: self.n_qubits,
            });
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Precondition(format!("two-qubit gate on a single wire: {g}")));
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn unitary(&self) -> DenseMatrix {
        let n = self.n_qubits;
        let dim = 1usize << n;
        let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
        let mut u = DenseMatrix::identity(dim);
        for g in &self.gates {
            let step = match (g.single(), *g) {
                (Some((q, m)), _) => DenseMatrix::from_fn(dim, dim, |r, c| {
                    let rest = (r ^ c) & !(1 << (n - 1 - q));
                    if rest != 0 {
                        return C64::new(0.0, 0.0);
                    }
                    m[2 * bit(r, q) + bit(c, q)]
                }),
                (None, Gate::Cnot(a, b)) => DenseMatrix::from_fn(dim, dim, |r, c| {
                    let target = if bit(c, a) == 1 { c ^ (1 << (n - 1 - b)) } else { c };
                    C64::new(if r == target { 1.0 } else { 0.0 }, 0.0)
                }),
                (None, Gate::Cz(a, b)) => DenseMatrix::from_fn(dim, dim, |r, c| {
                    let v = if r != c {
                        0.0
                    } else if bit(c, a) & bit(c, b) == 1 {
                        -1.0
                    } else {
                        1.0
                    };
                    C64::new(v, 0.0)
                }),
                (None, Gate::Phase(gamma)) => DenseMatrix::identity(dim).scale(C64::from_polar(1.0, gamma)),
                _ => unreachable!("single-qubit gates handled above"),
            };
            u = step.matmul(&u).expect("square");
        }
        u
    }

    /// The circuit as a diagram, together with the global phase `γ` such that
    /// the unitary equals `e^{iγ}` times the diagram's matrix.
    pub fn to_diagram(&self) -> (Diagram, f64) {
        let mut b = Builder::new();
        let mut w = b.inputs(self.n_qubits);
        let mut phase = 0.0;
        let rz = |b: &mut Builder, p, t: f64| b.zbox(Label::constant(C64::from_polar(1.0, t)), &[p], 1)[0];
        for g in &self.gates {
            match *g {
                Gate::H(q) => w[q] = b.had(w[q]),
                Gate::Rz(q, t) => {
                    w[q] = rz(&mut b, w[q], t);
                    phase -= t / 2.0;
                }
                Gate::Rx(q, t) => {
                    let x = b.had(w[q]);
                    let x = rz(&mut b, x, t);
                    w[q] = b.had(x);
                    phase -= t / 2.0;
                }
                Gate::Cnot(c, t) => {
                    let legs = b.copy(w[c], 2);
                    w[c] = legs[0];
                    w[t] = b.xor(w[t], legs[1]);
                }
                Gate::Cz(x, y) => {
                    let lx = b.copy(w[x], 2);
                    let ly = b.copy(w[y], 2);
                    let tx = b.triangle(lx[1]);
                    let ty = b.triangle(ly[1]);
                    b.zbox_effect(C64::new(-2.0, 0.0), &[tx, ty]);
                    w[x] = lx[0];
                    w[y] = ly[0];
                }
                Gate::Phase(gamma) => phase += gamma,
            }
        }
        b.outputs(w);
        (b.finish().expect("circuit wiring is well-formed"), phase)
    }

    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let mut c = Circuit::new(n_qubits);
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line, msg };
            let parts: Vec<&str> = body.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad angle '{s}'")));
            let qubit = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad qubit '{s}'")));
            let pair = |s: &str| {
                let (a, b) = s.split_once(',').ok_or_else(|| err(format!("expected 'a,b', got '{s}'")))?;
                Ok::<_, Error>((qubit(a)?, qubit(b)?))
            };
            let g = match parts.as_slice() {
                ["H", q] => Gate::H(qubit(q)?),
                ["RZ", q, t] => Gate::Rz(qubit(q)?, num(t)?),
                ["RX", q, t] => Gate::Rx(qubit(q)?, num(t)?),
                ["CNOT", qs] => {
                    let (a, b) = pair(qs)?;
                    Gate::Cnot(a, b)
                }
                ["CZ", qs] => {
                    let (a, b) = pair(qs)?;
                    Gate::Cz(a, b)
                }
                ["PHASE", t] => Gate::Phase(num(t)?),
                _ => return Err(err(format!("unknown gate line '{body}'"))),
            };
            c.push(g).map_err(|e| err(e.to_string()))?;
        }
        Ok(c)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.gates.iter().try_for_each(|g| writeln!(f, "{g}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval;

    fn sample() -> Circuit {
        let mut c = Circuit::new(2);
        for g in [
            Gate::H(0),
            Gate::Rz(1, 0.3),
            Gate::Cnot(0, 1),
            Gate::Rx(0, -1.2),
            Gate::Cz(1, 0),
            Gate::Phase(0.4),
        ] {
            c.push(g).unwrap();
        }
        c
    }

    #[test]
    fn cnot_matrix() {
        let mut c = Circuit::new(2);
        c.push(Gate::Cnot(0, 1)).unwrap();
        let want = DenseMatrix::from_real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(c.unitary(), want);
    }

    #[test]
    fn diagram_agrees_with_unitary() {
        let c = sample();
        let (d, phase) = c.to_diagram();
        let got = eval(&d).unwrap().scale(C64::from_polar(1.0, phase));
        assert!(got.max_abs_diff(&c.unitary()) < 1e-12);
    }

    #[test]
    fn text_round_trip() {
        let c = sample();
        assert_eq!(Circuit::parse(&c.to_string(), 2).unwrap(), c);
        assert!(Circuit::parse("CNOT 0,0", 2).is_err());
        assert!(matches!(Circuit::parse("H 0\nFOO 1", 2), Err(Error::Parse { line: 2, .. })));
        assert!(Circuit::parse("H 5", 2).is_err());
    }
}
