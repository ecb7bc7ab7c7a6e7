//! Controlled matrices and states.
//!
//! A controlled diagram has the control as its first input. Plugging `|0⟩`
//! into the control gives the identity (matrix case) or `|0…0⟩` (state
//! case); plugging `|1⟩` gives the encoded matrix or state.

use num_complex::Complex64 as C64;

use crate::diagram::{Builder, Diagram, Port};
use crate::error::{Error, Result};
use crate::eval::plug_basis;
use crate::matrix::DenseMatrix;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlledKind {
    Matrix,
    State,
}

impl ControlledKind {
    fn name(self) -> &'static str {
        match self {
            ControlledKind::Matrix => "matrix",
            ControlledKind::State => "state",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ControlledDiagram {
    /// Inputs: control, then `m` data wires (matrix case only). Outputs: `m` wires.
    pub diagram: Diagram,
    pub kind: ControlledKind,
    pub m: usize,
}

impl ControlledDiagram {
    /// Control plugged with `|1⟩`.
    pub fn discharge(&self) -> Diagram {
        plug_basis(&self.diagram, 0, true).expect("control wire exists")
    }

    /// Control plugged with `|0⟩`.
    pub fn idle(&self) -> Diagram {
        plug_basis(&self.diagram, 0, false).expect("control wire exists")
    }

    /// The controlled operation as a gate: the control is copied through as
    /// the first output, so a controlled X becomes CNOT.
    pub fn as_gate(&self) -> Diagram {
        let mut b = Builder::new();
        let ins = b.inputs(self.diagram.n_inputs());
        let c = b.copy(ins[0], 2);
        let mut feed = vec![c[1]];
        feed.extend(&ins[1..]);
        let outs = b.apply(&self.diagram, &feed).expect("arity matches");
        b.output(c[0]);
        b.outputs(outs);
        b.finish().expect("well-formed")
    }
}

pub fn discharge(c: &ControlledDiagram) -> Diagram {
    c.discharge()
}

pub fn idle(c: &ControlledDiagram) -> Diagram {
    c.idle()
}

/// Row operations on a `2^m`-dimensional space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ElementaryMatrixSpec {
    /// Row `i` scaled by `a`.
    RowMult { i: usize, a: C64 },
    /// `I + a·|i⟩⟨j|`: row `i` gains `a` times row `j`.
    RowAdd { i: usize, j: usize, a: C64 },
    /// Rows `i` and `j` exchanged.
    RowSwitch { i: usize, j: usize },
}

impl ElementaryMatrixSpec {
    pub fn check(&self, dim: usize) -> Result<()> {
        let range = |k: usize| {
            if k < dim {
                Ok(())
            } else {
                Err(Error::IndexOutOfRange { index: k, bound: dim })
            }
        };
        match *self {
            ElementaryMatrixSpec::RowMult { i, .. } => range(i),
            ElementaryMatrixSpec::RowAdd { i, j, .. } | ElementaryMatrixSpec::RowSwitch { i, j } => {
                range(i)?;
                range(j)?;
                if i == j {
                    Err(Error::SameRow(i))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn matrix(&self, dim: usize) -> Result<DenseMatrix> {
        self.check(dim)?;
        let mut data = DenseMatrix::identity(dim).into_data();
        match *self {
            ElementaryMatrixSpec::RowMult { i, a } => data[i * dim + i] = a,
            ElementaryMatrixSpec::RowAdd { i, j, a } => data[i * dim + j] = a,
            ElementaryMatrixSpec::RowSwitch { i, j } => {
                data[i * dim + i] = ZERO;
                data[j * dim + j] = ZERO;
                data[i * dim + j] = ONE;
                data[j * dim + i] = ONE;
            }
        }
        DenseMatrix::new(dim, dim, data)
    }

    pub fn inverse(&self) -> ElementaryMatrixSpec {
        match *self {
            ElementaryMatrixSpec::RowMult { i, a } => ElementaryMatrixSpec::RowMult { i, a: a.inv() },
            ElementaryMatrixSpec::RowAdd { i, j, a } => ElementaryMatrixSpec::RowAdd { i, j, a: -a },
            s @ ElementaryMatrixSpec::RowSwitch { .. } => s,
        }
    }
}

/// Ordered product `E₁·E₂⋯E_k` of the given specs.
pub fn product(specs: &[ElementaryMatrixSpec], dim: usize) -> Result<DenseMatrix> {
    specs
        .iter()
        .try_fold(DenseMatrix::identity(dim), |acc, s| acc.matmul(&s.matrix(dim)?))
}

fn qubits_for(dim: usize) -> Result<usize> {
    if dim.is_power_of_two() {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(Error::NotPowerOfTwo(dim))
    }
}

fn bit(index: usize, wire: usize, m: usize) -> bool {
    index >> (m - 1 - wire) & 1 == 1
}

/// Taps every data wire and returns a flag that is 1 exactly when the control
/// is 1 and the data equals `index`.
fn detect(b: &mut Builder, c: Port, data: &mut [Port], index: usize) -> Port {
    let m = data.len();
    let mut terms = vec![c];
    for (w, p) in data.iter_mut().enumerate() {
        let legs = b.copy(*p, 2);
        *p = legs[0];
        terms.push(if bit(index, w, m) { legs[1] } else { b.not(legs[1]) });
    }
    b.tagged("detect", |b| b.and_all(&terms))
}

/// XORs a copy of `flag` into every wire where `i` and `j` differ.
fn flip_difference(b: &mut Builder, flag: Port, data: &mut [Port], i: usize, j: usize) {
    let m = data.len();
    let wires: Vec<usize> = (0..m).filter(|&w| bit(i, w, m) != bit(j, w, m)).collect();
    let legs = b.copy(flag, wires.len());
    for (w, leg) in wires.into_iter().zip(legs) {
        data[w] = b.xor(data[w], leg);
    }
}

fn matrix_frame(m: usize, f: impl FnOnce(&mut Builder, Port, &mut Vec<Port>)) -> Result<ControlledDiagram> {
    let mut b = Builder::new();
    let c = b.input();
    let mut data = b.inputs(m);
    f(&mut b, c, &mut data);
    b.outputs(data);
    Ok(ControlledDiagram {
        diagram: b.finish()?,
        kind: ControlledKind::Matrix,
        m,
    })
}

pub fn controlled_elementary(spec: ElementaryMatrixSpec, m: usize) -> Result<ControlledDiagram> {
    spec.check(1 << m)?;
    matrix_frame(m, |b, c, data| match spec {
        ElementaryMatrixSpec::RowMult { i, a } => {
            let flag = detect(b, c, data, i);
            b.zbox_effect(a, &[flag]);
        }
        ElementaryMatrixSpec::RowAdd { i, j, a } => {
            let flag = detect(b, c, data, j);
            let t = b.triangle(flag);
            let weighted = b.zbox1(a, t);
            flip_difference(b, weighted, data, i, j);
        }
        ElementaryMatrixSpec::RowSwitch { i, j } => {
            let cs = b.copy(c, 2);
            let fi = detect(b, cs[0], data, i);
            let fj = detect(b, cs[1], data, j);
            let flag = b.xor(fi, fj);
            flip_difference(b, flag, data, i, j);
        }
    })
}

/// The control is discarded; both plug values give the identity.
pub fn controlled_identity(m: usize) -> ControlledDiagram {
    matrix_frame(m, |b, c, _| b.zbox_effect(ONE, &[c])).expect("well-formed")
}

/// Identity when idle, the zero matrix when discharged.
pub fn controlled_zero(m: usize) -> ControlledDiagram {
    matrix_frame(m, |b, c, _| b.zbox_effect(ZERO, &[c])).expect("well-formed")
}

/// Factors `E₁, …, E_k` with `E₁·E₂⋯E_k = M`.
///
/// Gauss–Jordan with partial pivoting (largest modulus, lowest row on ties).
/// Rank-deficient inputs finish with column operations and a trailing run of
/// `RowMult { a: 0 }` factors.
pub fn decompose_elementary(m: &DenseMatrix) -> Result<Vec<ElementaryMatrixSpec>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch {
            left: m.shape(),
            right: (m.rows(), m.rows()),
        });
    }
    let n = m.rows();
    qubits_for(n)?;
    let eps = 1e-12 * m.max_abs().max(1.0);
    let mut a: Vec<Vec<C64>> = (0..n).map(|r| (0..n).map(|c| m[(r, c)]).collect()).collect();
    // Inverses of the row operations, in the order they were applied.
    let mut undo: Vec<ElementaryMatrixSpec> = Vec::new();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == n {
            break;
        }
        let mut best = row;
        for r in row + 1..n {
            if a[r][col].norm() > a[best][col].norm() {
                best = r;
            }
        }
        if a[best][col].norm() <= eps {
            for r in a.iter_mut().skip(row) {
                r[col] = ZERO;
            }
            continue;
        }
        if best != row {
            a.swap(best, row);
            undo.push(ElementaryMatrixSpec::RowSwitch { i: row, j: best });
        }
        let pivot = a[row][col];
        if pivot != ONE {
            let s = pivot.inv();
            for x in a[row].iter_mut() {
                *x *= s;
            }
            a[row][col] = ONE;
            undo.push(ElementaryMatrixSpec::RowMult { i: row, a: pivot });
        }
        for r in 0..n {
            if r == row || a[r][col] == ZERO {
                continue;
            }
            let f = a[r][col];
            let pivot_row = a[row].clone();
            for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                *x -= f * p;
            }
            a[r][col] = ZERO;
            undo.push(ElementaryMatrixSpec::RowAdd { i: r, j: row, a: f });
        }
        pivots.push((row, col));
        row += 1;
    }
    let rank = pivots.len();
    // R·C₁⋯C_s = diag(1,…,1,0,…,0); `redo` holds C_s⁻¹, …, C₁⁻¹ reversed.
    let mut redo: Vec<ElementaryMatrixSpec> = Vec::new();
    for &(p, pc) in &pivots {
        for (c, x) in a[p].iter_mut().enumerate() {
            if c != pc && *x != ZERO {
                redo.push(ElementaryMatrixSpec::RowAdd { i: pc, j: c, a: *x });
                *x = ZERO;
            }
        }
    }
    for p in 0..rank {
        let c = (p..n).find(|&c| a[p][c] == ONE).expect("pivot present");
        if c != p {
            for r in a.iter_mut() {
                r.swap(p, c);
            }
            redo.push(ElementaryMatrixSpec::RowSwitch { i: p, j: c });
        }
    }
    let mut out = undo;
    out.extend((rank..n).map(|i| ElementaryMatrixSpec::RowMult { i, a: ZERO }));
    out.extend(redo.into_iter().rev());
    Ok(out)
}

fn check_kind(ctrls: &[ControlledDiagram], kind: ControlledKind) -> Result<usize> {
    let first = ctrls
        .first()
        .ok_or_else(|| Error::Precondition("at least one controlled diagram is required".into()))?;
    for c in ctrls {
        if c.kind != kind {
            return Err(Error::WrongControlledKind {
                expected: kind.name(),
                found: c.kind.name(),
            });
        }
        if c.m != first.m {
            return Err(Error::MixedQubitCount {
                left: first.m,
                right: c.m,
            });
        }
    }
    Ok(first.m)
}

/// Discharges to `M₁·M₂⋯M_k`: the last factor acts first.
pub fn controlled_product(ctrls: &[ControlledDiagram]) -> Result<ControlledDiagram> {
    let m = check_kind(ctrls, ControlledKind::Matrix)?;
    let mut b = Builder::new();
    let c = b.input();
    let mut data = b.inputs(m);
    let cs = if ctrls.len() == 1 { vec![c] } else { b.copy(c, ctrls.len()) };
    for (f, ci) in ctrls.iter().zip(cs).rev() {
        let mut ins = vec![ci];
        ins.extend(&data);
        data = b.apply(&f.diagram, &ins)?;
    }
    b.outputs(data);
    Ok(ControlledDiagram {
        diagram: b.finish()?,
        kind: ControlledKind::Matrix,
        m,
    })
}

pub fn controlled_matrix(mat: &DenseMatrix) -> Result<ControlledDiagram> {
    let specs = decompose_elementary(mat)?;
    let m = qubits_for(mat.rows())?;
    if specs.is_empty() {
        return Ok(controlled_identity(m));
    }
    let factors = specs
        .into_iter()
        .map(|s| controlled_elementary(s, m))
        .collect::<Result<Vec<_>>>()?;
    controlled_product(&factors)
}

fn check_lengths(ctrls: usize, coeffs: usize) -> Result<()> {
    if ctrls != coeffs {
        return Err(Error::LengthMismatch {
            left: ctrls,
            right: coeffs,
        });
    }
    Ok(())
}

/// Fans the control over the branches; branch `i` carries weight `coeffs[i]`.
fn weighted_fan(b: &mut Builder, c: Port, coeffs: &[C64]) -> Result<Vec<Port>> {
    let legs = b.w_spider(c, coeffs.len())?;
    Ok(legs
        .into_iter()
        .zip(coeffs)
        .map(|(l, &a)| b.tagged("weight", |b| b.zbox1(a, l)))
        .collect())
}

/// Discharges to `Σ cᵢ·Mᵢ`.
pub fn controlled_sum_matrices(ctrls: &[ControlledDiagram], coeffs: &[C64]) -> Result<ControlledDiagram> {
    check_lengths(ctrls.len(), coeffs.len())?;
    let m = check_kind(ctrls, ControlledKind::Matrix)?;
    let mut b = Builder::new();
    let c = b.input();
    let mut data = b.inputs(m);
    let legs = weighted_fan(&mut b, c, coeffs)?;
    for (f, leg) in ctrls.iter().zip(legs) {
        let mut ins = vec![leg];
        ins.extend(&data);
        data = b.apply(&f.diagram, &ins)?;
    }
    b.outputs(data);
    Ok(ControlledDiagram {
        diagram: b.finish()?,
        kind: ControlledKind::Matrix,
        m,
    })
}

/// Discharges to `Σ cᵢ·vᵢ`.
pub fn controlled_sum_states(ctrls: &[ControlledDiagram], coeffs: &[C64]) -> Result<ControlledDiagram> {
    check_lengths(ctrls.len(), coeffs.len())?;
    let m = check_kind(ctrls, ControlledKind::State)?;
    let mut b = Builder::new();
    let c = b.input();
    let legs = weighted_fan(&mut b, c, coeffs)?;
    let mut per_qubit: Vec<Vec<Port>> = vec![Vec::new(); m];
    for (s, leg) in ctrls.iter().zip(legs) {
        for (q, out) in b.apply(&s.diagram, &[leg])?.into_iter().enumerate() {
            per_qubit[q].push(out);
        }
    }
    let outs = per_qubit
        .iter()
        .map(|ps| b.w_merge_all(ps))
        .collect::<Result<Vec<_>>>()?;
    b.outputs(outs);
    Ok(ControlledDiagram {
        diagram: b.finish()?,
        kind: ControlledKind::State,
        m,
    })
}

fn normal_form(b: &mut Builder, c: Port, amps: &[C64]) -> Result<Vec<Port>> {
    let m = qubits_for(amps.len())?;
    if m == 0 {
        return Err(Error::Precondition("a normal form needs at least one qubit".into()));
    }
    let branches = weighted_fan(b, c, amps)?;
    let mut feeds: Vec<Vec<Port>> = vec![Vec::new(); m];
    for (k, branch) in branches.into_iter().enumerate() {
        let wires: Vec<usize> = (0..m).filter(|&w| bit(k, w, m)).collect();
        if wires.is_empty() {
            b.zbox_effect(ONE, &[branch]);
            continue;
        }
        let legs = if wires.len() == 1 { vec![branch] } else { b.copy(branch, wires.len()) };
        for (w, leg) in wires.into_iter().zip(legs) {
            feeds[w].push(leg);
        }
    }
    Ok(feeds
        .into_iter()
        .map(|f| if f.len() == 1 { f[0] } else { b.pink(crate::generators::Pink::Zero, &f, 1)[0] })
        .collect())
}

/// One weighted W branch per basis vector; branch `k` is copied onto the
/// outputs where `k` has a 1 bit and combined there by parity.
pub fn controlled_state_normal_form(v: &[C64]) -> Result<ControlledDiagram> {
    let mut b = Builder::new();
    let c = b.input();
    let outs = normal_form(&mut b, c, v)?;
    let m = outs.len();
    b.outputs(outs);
    Ok(ControlledDiagram {
        diagram: b.finish()?,
        kind: ControlledKind::State,
        m,
    })
}

/// The discharged normal form of `a·v1 + b·v2`; branch labels add pointwise.
pub fn sum_normal_forms(v1: &[C64], v2: &[C64], a: C64, b: C64) -> Result<Diagram> {
    check_lengths(v1.len(), v2.len())?;
    let amps: Vec<C64> = v1.iter().zip(v2).map(|(x, y)| a * x + b * y).collect();
    Ok(controlled_state_normal_form(&amps)?.discharge())
}
