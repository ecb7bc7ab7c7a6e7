//! Pauli-sum Hamiltonians and their controlled-diagram encodings.
//!
//! Qubit 1 is the leftmost letter of a Pauli string and the most significant
//! bit of a basis index.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::controlled::{controlled_sum_matrices, controlled_zero, sum_normal_forms, ControlledDiagram, ControlledKind};
use crate::diagram::{Builder, Port};
use crate::error::{Error, Result};
use crate::eval::{eval, DEFAULT_QUBIT_CAP};
use crate::matrix::{parse_complex, DenseMatrix};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> DenseMatrix {
        let (o, l) = (ZERO, ONE);
        let data = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -I, I, o],
            Pauli::Z => [l, o, o, -l],
        };
        DenseMatrix::new(2, 2, data.to_vec()).expect("2×2")
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_letter(c: char) -> Option<Pauli> {
        Some(match c {
            'I' => Pauli::I,
            'X' => Pauli::X,
            'Y' => Pauli::Y,
            'Z' => Pauli::Z,
            _ => return None,
        })
    }

    /// `(x, z)` bits of the symplectic representation.
    fn symplectic(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// Basis change `C` with `C†·Z·C` equal to this Pauli.
    pub fn conjugation(self) -> Conjugation {
        match self {
            Pauli::I | Pauli::Z => Conjugation::None,
            Pauli::X => Conjugation::Hadamard,
            Pauli::Y => Conjugation::YBasis,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::Precondition("a Pauli string needs at least one qubit".into()));
        }
        Ok(Self { ops })
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == Pauli::I)
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&q| self.ops[q] != Pauli::I).collect()
    }

    /// True when the strings commute, i.e. they anticommute on an even
    /// number of qubits.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let odd = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(p, q)| {
                let (px, pz) = p.symplectic();
                let (qx, qz) = q.symplectic();
                (px & qz) ^ (pz & qx)
            })
            .count();
        odd % 2 == 0
    }

    pub fn matrix(&self) -> DenseMatrix {
        self.ops
            .iter()
            .fold(DenseMatrix::identity(1), |acc, p| acc.kron(&p.matrix()))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ops.iter().try_for_each(|p| write!(f, "{}", p.letter()))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .chars()
            .map(|c| {
                Pauli::from_letter(c).ok_or_else(|| Error::Parse {
                    line: 1,
                    msg: format!("bad Pauli letter '{c}'"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(ops)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    pub terms: Vec<(C64, PauliString)>,
    pub m: usize,
}

impl PauliSum {
    pub fn new(terms: Vec<(C64, PauliString)>) -> Result<Self> {
        let m = terms
            .first()
            .map(|t| t.1.len())
            .ok_or_else(|| Error::Precondition("a Pauli sum needs at least one term".into()))?;
        if let Some((_, s)) = terms.iter().find(|(_, s)| s.len() != m) {
            return Err(Error::LengthMismatch { left: m, right: s.len() });
        }
        Ok(Self { terms, m })
    }

    /// Builds a sum from `(coefficient, string)` pairs written as text.
    pub fn from_pairs(pairs: &[(f64, &str)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|&(a, s)| Ok((C64::new(a, 0.0), s.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficients(&self) -> Vec<C64> {
        self.terms.iter().map(|t| t.0).collect()
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.0.im == 0.0)
    }

    /// Reorders the terms: term `k` of the result is term `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        for &p in perm {
            if p >= self.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Precondition(format!("{perm:?} is not a permutation of the terms")));
            }
        }
        if perm.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: perm.len(),
                right: self.len(),
            });
        }
        Ok(Self {
            terms: perm.iter().map(|&p| self.terms[p].clone()).collect(),
            m: self.m,
        })
    }

    /// First pair of terms that do not commute.
    pub fn non_commuting_pair(&self) -> Option<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| (i + 1..self.len()).map(move |j| (i, j)))
            .find(|&(i, j)| !self.terms[i].1.commutes_with(&self.terms[j].1))
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, s) in &self.terms {
            writeln!(f, "{} {s}", crate::matrix::format_complex(*a))?;
        }
        Ok(())
    }
}

/// Parses one term per line: `COEFF STRING`, with `#` starting a comment.
pub fn parse_pauli_sum(text: &str) -> Result<PauliSum> {
    let mut terms: Vec<(C64, PauliString)> = Vec::new();
    let mut m = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line, msg };
        let mut parts = body.split_whitespace();
        let (Some(coeff), Some(letters), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(format!("expected 'COEFF STRING', got '{body}'")));
        };
        let alpha = parse_complex(coeff).map_err(err)?;
        let ops = letters
            .chars()
            .map(|c| Pauli::from_letter(c).ok_or_else(|| err(format!("bad Pauli letter '{c}'"))))
            .collect::<Result<Vec<_>>>()?;
        if let Some(m) = m {
            if ops.len() != m {
                return Err(err(format!("string '{letters}' has {} qubits, expected {m}", ops.len())));
            }
        }
        m = Some(ops.len());
        terms.push((alpha, PauliString { ops }));
    }
    if terms.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            msg: "no terms".into(),
        });
    }
    PauliSum::new(terms)
}

fn check_cap(m: usize, cap: usize) -> Result<()> {
    if m > cap {
        return Err(Error::CapExceeded { found: m, cap });
    }
    Ok(())
}

/// `Σ αᵢ ⊗ⱼ Pᵢⱼ` by Kronecker products.
pub fn oracle_matrix(h: &PauliSum) -> Result<DenseMatrix> {
    oracle_matrix_with_cap(h, DEFAULT_QUBIT_CAP)
}

pub fn oracle_matrix_with_cap(h: &PauliSum, cap: usize) -> Result<DenseMatrix> {
    check_cap(h.m, cap)?;
    let dim = 1 << h.m;
    h.terms
        .iter()
        .try_fold(DenseMatrix::zeros(dim, dim), |acc, (a, s)| acc.add(&s.matrix().scale(*a)))
}

fn hadamard_matrix() -> DenseMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DenseMatrix::from_real(&[&[h, h], &[h, -h]]).expect("2×2")
}

/// Single-qubit basis changes allowed around a diagonal factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conjugation {
    None,
    Hadamard,
    /// `V = H·S·H`, so that `V†·Z·V = Y`.
    YBasis,
}

impl Conjugation {
    pub fn matrix(self) -> DenseMatrix {
        match self {
            Conjugation::None => DenseMatrix::identity(2),
            Conjugation::Hadamard => hadamard_matrix(),
            Conjugation::YBasis => {
                let h = hadamard_matrix();
                let s = DenseMatrix::diagonal(&[ONE, I]).expect("square");
                h.matmul(&s).and_then(|x| x.matmul(&h)).expect("2×2")
            }
        }
    }

    pub(crate) fn enter(self, b: &mut Builder, p: Port) -> Port {
        match self {
            Conjugation::None => p,
            Conjugation::Hadamard => b.had(p),
            Conjugation::YBasis => b.v_gate(p),
        }
    }

    pub(crate) fn leave(self, b: &mut Builder, p: Port) -> Port {
        match self {
            Conjugation::None => p,
            Conjugation::Hadamard => b.had(p),
            Conjugation::YBasis => b.v_dag(p),
        }
    }
}

/// One term of a [`DiagonalFactorSum`]: `α · C† (⊗ diag(1, aⱼ)) C`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalTerm {
    pub alpha: C64,
    pub labels: Vec<C64>,
    pub conj: Vec<Conjugation>,
}

impl DiagonalTerm {
    pub fn from_pauli(alpha: C64, s: &PauliString) -> Self {
        Self {
            alpha,
            labels: s.ops().iter().map(|&p| if p == Pauli::I { ONE } else { -ONE }).collect(),
            conj: s.ops().iter().map(|p| p.conjugation()).collect(),
        }
    }

    pub fn matrix(&self) -> DenseMatrix {
        let per_qubit = self.labels.iter().zip(&self.conj).map(|(&a, c)| {
            let d = DenseMatrix::diagonal(&[ONE, a]).expect("square");
            let cm = c.matrix();
            cm.adjoint().matmul(&d).and_then(|x| x.matmul(&cm)).expect("2×2")
        });
        per_qubit
            .fold(DenseMatrix::identity(1), |acc, m| acc.kron(&m))
            .scale(self.alpha)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalFactorSum {
    pub terms: Vec<DiagonalTerm>,
    pub m: usize,
}

impl DiagonalFactorSum {
    pub fn new(terms: Vec<DiagonalTerm>) -> Result<Self> {
        let m = terms
            .first()
            .map(|t| t.labels.len())
            .ok_or_else(|| Error::Precondition("a sum needs at least one term".into()))?;
        for t in &terms {
            if t.labels.len() != m || t.conj.len() != m {
                return Err(Error::LengthMismatch {
                    left: m,
                    right: t.labels.len().max(t.conj.len()),
                });
            }
        }
        Ok(Self { terms, m })
    }

    pub fn from_pauli_sum(h: &PauliSum) -> Self {
        Self {
            terms: h.terms.iter().map(|(a, s)| DiagonalTerm::from_pauli(*a, s)).collect(),
            m: h.m,
        }
    }

    pub fn oracle(&self) -> Result<DenseMatrix> {
        let dim = 1 << self.m;
        self.terms
            .iter()
            .try_fold(DenseMatrix::zeros(dim, dim), |acc, t| acc.add(&t.matrix()))
    }
}

/// Controlled `⊗ⱼ C†ⱼ diag(1, aⱼ) Cⱼ`. Only qubits with `aⱼ ≠ 1` get a leg.
fn controlled_diagonal(labels: &[C64], conj: &[Conjugation]) -> Result<ControlledDiagram> {
    let m = labels.len();
    let mut b = Builder::new();
    let c = b.input();
    let mut data = b.inputs(m);
    let touched: Vec<usize> = (0..m).filter(|&q| labels[q] != ONE).collect();
    let controls = match touched.len() {
        0 => {
            b.zbox_effect(ONE, &[c]);
            vec![]
        }
        1 => vec![c],
        k => b.copy(c, k),
    };
    for (&q, ctl) in touched.iter().zip(controls) {
        let x = conj[q].enter(&mut b, data[q]);
        // ⟨c, x| ↦ 1 + (a − 1)·c·x
        let legs = b.copy(x, 2);
        let tc = b.triangle(ctl);
        let tx = b.triangle(legs[1]);
        b.zbox_effect(labels[q] - ONE, &[tc, tx]);
        data[q] = conj[q].leave(&mut b, legs[0]);
    }
    b.outputs(data);
    Ok(ControlledDiagram {
        diagram: b.finish()?,
        kind: ControlledKind::Matrix,
        m,
    })
}

/// Controlled diagram discharging to `Σ αᵢ Cᵢ† (⊗ⱼ diag(1, aᵢⱼ)) Cᵢ`.
pub fn build_diagonal_sum_diagram(d: &DiagonalFactorSum) -> Result<ControlledDiagram> {
    check_cap(d.m, DEFAULT_QUBIT_CAP)?;
    if d.terms.is_empty() {
        return Ok(controlled_zero(d.m));
    }
    let branches = d
        .terms
        .iter()
        .map(|t| controlled_diagonal(&t.labels, &t.conj))
        .collect::<Result<Vec<_>>>()?;
    let coeffs: Vec<C64> = d.terms.iter().map(|t| t.alpha).collect();
    controlled_sum_matrices(&branches, &coeffs)
}

/// Controlled diagram discharging to the Hamiltonian. Each term becomes one
/// W branch weighted by its coefficient; duplicates stay separate.
pub fn build_hamiltonian_diagram(h: &PauliSum) -> Result<ControlledDiagram> {
    build_diagonal_sum_diagram(&DiagonalFactorSum::from_pauli_sum(h))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutativityReport {
    pub discharged_residual: f64,
    pub idle_residual: f64,
    pub equal: bool,
}

/// Builds `h` in its given order and in the order `perm`, and compares both
/// plug values of the two controlled diagrams.
pub fn check_sum_commutativity(h: &PauliSum, perm: &[usize]) -> Result<CommutativityReport> {
    let a = build_hamiltonian_diagram(h)?;
    let b = build_hamiltonian_diagram(&h.permuted(perm)?)?;
    let discharged_residual = eval(&a.discharge())?.max_abs_diff(&eval(&b.discharge())?);
    let idle_residual = eval(&a.idle())?.max_abs_diff(&eval(&b.idle())?);
    Ok(CommutativityReport {
        discharged_residual,
        idle_residual,
        equal: discharged_residual <= 1e-12 && idle_residual <= 1e-12,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearityPoint {
    pub t: f64,
    /// `‖i·χ′(t) − H·χ(t)‖` for the combination `χ = aΨ + bΦ`.
    pub residual: f64,
    pub psi_residual: f64,
    pub phi_residual: f64,
    pub chi_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearityReport {
    pub points: Vec<LinearityPoint>,
    pub h_norm: f64,
    pub max_residual: f64,
    /// `1e-5 · ‖H‖ · ‖χ‖`, the largest over the grid.
    pub bound: f64,
    pub pass: bool,
}

fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖i·(f(t+dt) − f(t−dt))/(2dt) − H·f(t)‖`
fn schrodinger_residual(h: &DenseMatrix, at: impl Fn(f64) -> Result<Vec<C64>>, t: f64, dt: f64) -> Result<f64> {
    let (plus, minus, now) = (at(t + dt)?, at(t - dt)?, at(t)?);
    let hv = h.apply(&now)?;
    let diff: Vec<C64> = plus
        .iter()
        .zip(&minus)
        .zip(&hv)
        .map(|((p, m), x)| I * (p - m) / (2.0 * dt) - x)
        .collect();
    Ok(vector_norm(&diff))
}

/// Evolves `psi0` and `phi0` under `i·∂ₜΨ = H·Ψ` with the exact exponential,
/// forms `aΨ + bΦ` as a diagram at every time it needs, and measures how
/// well the combination satisfies the same equation.
pub fn verify_schrodinger_linearity(
    h: &PauliSum,
    psi0: &[C64],
    phi0: &[C64],
    a: C64,
    b: C64,
    t_grid: &[f64],
    dt: f64,
) -> Result<LinearityReport> {
    let hm = oracle_matrix(h)?;
    let dim = hm.rows();
    for v in [psi0, phi0] {
        if v.len() != dim {
            return Err(Error::LengthMismatch { left: dim, right: v.len() });
        }
    }
    let evolve = |v: &[C64], t: f64| -> Result<Vec<C64>> { hm.scale(-I * t).expm()?.apply(v) };
    let chi = |t: f64| -> Result<Vec<C64>> {
        let d = sum_normal_forms(&evolve(psi0, t)?, &evolve(phi0, t)?, a, b)?;
        Ok(eval(&d)?.into_data())
    };
    let h_norm = hm.op_norm();
    let points = t_grid
        .iter()
        .map(|&t| {
            Ok(LinearityPoint {
                t,
                residual: schrodinger_residual(&hm, chi, t, dt)?,
                psi_residual: schrodinger_residual(&hm, |s| evolve(psi0, s), t, dt)?,
                phi_residual: schrodinger_residual(&hm, |s| evolve(phi0, s), t, dt)?,
                chi_norm: vector_norm(&chi(t)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_residual = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    let bound = points.iter().map(|p| 1e-5 * h_norm * p.chi_norm).fold(0.0, f64::max);
    let pass = points.iter().all(|p| p.residual <= 1e-5 * h_norm * p.chi_norm);
    Ok(LinearityReport {
        points,
        h_norm,
        max_residual,
        bound,
        pass,
    })
}
