//! Exponentials `exp(−iHt/2)` of Pauli-sum Hamiltonians as diagrams.
//!
//! Every construction that drops a global phase returns it alongside the
//! diagram, so comparisons against dense exponentials can be exact.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::circuit::{Circuit, Gate};
use crate::controlled::{controlled_identity, controlled_product, controlled_sum_matrices, ControlledDiagram};
use crate::diagram::{Builder, Diagram, Label, Port, TimePhase};
use crate::error::{Error, Result};
use crate::eval::{equal_up_to_scalar, eval, eval_at, DEFAULT_TOL};
use crate::generators::Pink;
use crate::hamiltonian::{build_hamiltonian_diagram, oracle_matrix, PauliString, PauliSum};
use crate::matrix::DenseMatrix;

const ONE: C64 = C64::new(1.0, 0.0);

/// A diagram in `t` and the global phase it omits: the intended operator at
/// time `t` is `e^{i·phase(t)}` times the diagram's matrix.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub diagram: Diagram,
    pub phase: TimePhase,
}

impl Evolution {
    pub fn constant(diagram: Diagram) -> Self {
        Self {
            diagram,
            phase: TimePhase::new(0.0, 0.0),
        }
    }

    /// The diagram's own matrix, without the recorded phase.
    pub fn diagram_at(&self, t: f64) -> Result<DenseMatrix> {
        eval_at(&self.diagram, t)
    }

    pub fn unitary_at(&self, t: f64) -> Result<DenseMatrix> {
        Ok(self.diagram_at(t)?.scale(self.phase.value(t)))
    }

    /// The diagram with `t` substituted.
    pub fn resolved(&self, t: f64) -> Evolution {
        Evolution {
            diagram: self.diagram.resolve(t),
            phase: TimePhase::new(0.0, self.phase.angle(t)),
        }
    }
}

/// Appends `exp(−iθP/2)·e^{iθ/2}` for the angle carried by `label`
/// (`label = e^{iθ}`). With `flip_body` the parity wire passes through NOT
/// before it meets the phase.
fn gadget_into(b: &mut Builder, wires: &mut [Port], p: &PauliString, label: Label, flip_body: bool) {
    b.tagged("gadget", |b| {
        let mut taps = Vec::new();
        for q in p.support() {
            let conj = p.ops()[q].conjugation();
            let x = conj.enter(b, wires[q]);
            let legs = b.copy(x, 2);
            wires[q] = conj.leave(b, legs[0]);
            taps.push(legs[1]);
        }
        let mut body = if taps.len() == 1 { taps[0] } else { b.pink(Pink::Zero, &taps, 1)[0] };
        if flip_body {
            body = b.not(body);
        }
        b.zbox(label, &[body], 0);
    })
}

/// `exp(−i·(coeff·t)/2·P)`, up to the recorded phase `e^{−i·coeff·t/2}`.
pub fn pauli_gadget(p: &PauliString, theta_coeff: f64) -> Result<Evolution> {
    if p.is_identity() {
        return Err(Error::IdentityString);
    }
    let mut b = Builder::new();
    let mut wires = b.inputs(p.len());
    gadget_into(&mut b, &mut wires, p, Label::Phase(TimePhase::new(theta_coeff, 0.0)), false);
    b.outputs(wires);
    Ok(Evolution {
        diagram: b.finish()?,
        phase: TimePhase::new(-theta_coeff / 2.0, 0.0),
    })
}

fn require_real(h: &PauliSum) -> Result<()> {
    match h.terms.iter().position(|t| t.0.im != 0.0) {
        Some(i) => Err(Error::NonRealCoefficient(i)),
        None => Ok(()),
    }
}

/// `∏ₖ exp(−iαₖ·scale·t/2·Pₖ)` with the first term leftmost in the product,
/// repeated `reps` times.
fn gadget_product(h: &PauliSum, scale: f64, reps: usize) -> Result<Evolution> {
    let mut b = Builder::new();
    let mut wires = b.inputs(h.m);
    let mut phase = 0.0;
    for _ in 0..reps {
        for (alpha, s) in h.terms.iter().rev() {
            let coeff = alpha.re * scale;
            phase -= coeff / 2.0;
            if !s.is_identity() {
                gadget_into(&mut b, &mut wires, s, Label::Phase(TimePhase::new(coeff, 0.0)), false);
            }
        }
    }
    b.outputs(wires);
    Ok(Evolution {
        diagram: b.finish()?,
        phase: TimePhase::new(phase, 0.0),
    })
}

/// Product of one gadget per term. Requires real, pairwise commuting terms.
pub fn commuting_exponential(h: &PauliSum) -> Result<Evolution> {
    require_real(h)?;
    if let Some((first, second)) = h.non_commuting_pair() {
        return Err(Error::NonCommuting { first, second });
    }
    gadget_product(h, 1.0, 1)
}

/// First-order Trotter formula `(∏ₖ exp(−iHₖt/2n))ⁿ` with `n = steps`.
pub fn trotter_diagram(h: &PauliSum, steps: usize) -> Result<Evolution> {
    require_real(h)?;
    if steps == 0 {
        return Err(Error::Precondition("at least one Trotter step".into()));
    }
    gadget_product(h, 1.0 / steps as f64, steps)
}

/// Appends gates for `exp(−i·angle·P/2)`: basis change, CNOT parity ladder
/// onto the last support qubit, `RZ`, then the mirror image.
pub fn push_gadget_gates(c: &mut Circuit, p: &PauliString, angle: f64) -> Result<()> {
    use crate::hamiltonian::Pauli;
    if p.len() != c.n_qubits {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: c.n_qubits,
        });
    }
    let support = p.support();
    let Some(&target) = support.last() else {
        return c.push(Gate::Phase(-angle / 2.0));
    };
    let basis = |q: usize, enter: bool| match p.ops()[q] {
        Pauli::X => Some(Gate::H(q)),
        Pauli::Y => Some(Gate::Rx(q, if enter { FRAC_PI_2 } else { -FRAC_PI_2 })),
        _ => None,
    };
    for &q in &support {
        if let Some(g) = basis(q, true) {
            c.push(g)?;
        }
    }
    for &q in &support[..support.len() - 1] {
        c.push(Gate::Cnot(q, target))?;
    }
    c.push(Gate::Rz(target, angle))?;
    for &q in support[..support.len() - 1].iter().rev() {
        c.push(Gate::Cnot(q, target))?;
    }
    for &q in &support {
        if let Some(g) = basis(q, false) {
            c.push(g)?;
        }
    }
    Ok(())
}

/// Gate list for the Trotter product at time `t`; the first term acts last.
pub fn trotter_circuit(h: &PauliSum, steps: usize, t: f64) -> Result<Circuit> {
    require_real(h)?;
    if steps == 0 {
        return Err(Error::Precondition("at least one Trotter step".into()));
    }
    let mut c = Circuit::new(h.m);
    for _ in 0..steps {
        for (alpha, s) in h.terms.iter().rev() {
            push_gadget_gates(&mut c, s, alpha.re * t / steps as f64)?;
        }
    }
    Ok(c)
}

/// Gate list for [`commuting_exponential`] at time `t`.
pub fn commuting_circuit(h: &PauliSum, t: f64) -> Result<Circuit> {
    require_real(h)?;
    if let Some((first, second)) = h.non_commuting_pair() {
        return Err(Error::NonCommuting { first, second });
    }
    trotter_circuit(h, 1, t)
}

/// Controlled `Σₖ cₖ·Hᵏ` with `Hᵏ` a `k`-fold controlled product.
fn power_series(h: &PauliSum, coeffs: &[C64]) -> Result<ControlledDiagram> {
    let ham = build_hamiltonian_diagram(h)?;
    let powers = (0..coeffs.len())
        .map(|k| match k {
            0 => Ok(controlled_identity(h.m)),
            1 => Ok(ham.clone()),
            _ => controlled_product(&vec![ham.clone(); k]),
        })
        .collect::<Result<Vec<_>>>()?;
    controlled_sum_matrices(&powers, coeffs)
}

/// `Σₖ₌₀ⁿ (−it/2)ᵏ Hᵏ / k!` as a diagram.
pub fn taylor_diagram(h: &PauliSum, order: usize, t: f64) -> Result<Diagram> {
    let step = C64::new(0.0, -t / 2.0);
    let mut coeffs = vec![ONE];
    for k in 1..=order {
        let prev = coeffs[k - 1];
        coeffs.push(prev * step / k as f64);
    }
    Ok(power_series(h, &coeffs)?.discharge())
}

/// Coefficients `cₖ(t)` with `exp(−iHt/2) = Σₖ cₖ(t)·Hᵏ`, one row per time.
#[derive(Clone, Debug, PartialEq)]
pub struct CayleyCoeffs {
    pub ts: Vec<f64>,
    pub coeffs: Vec<Vec<C64>>,
}

impl CayleyCoeffs {
    /// `Σₖ cₖ(tᵢ)·Hᵏ` for sample `i`.
    pub fn reconstruct(&self, h: &DenseMatrix, i: usize) -> Result<DenseMatrix> {
        let n = h.rows();
        let mut acc = DenseMatrix::zeros(n, n);
        let mut power = DenseMatrix::identity(n);
        for &c in &self.coeffs[i] {
            acc = acc.add(&power.scale(c))?;
            power = power.matmul(h)?;
        }
        Ok(acc)
    }
}

/// Roots of the minimal polynomial, with multiplicity, as
/// `(eigenvalue, index)` pairs. Eigenvalues closer than a relative `1e-9` are
/// treated as equal.
fn minimal_roots(h: &DenseMatrix) -> Result<Vec<(C64, usize)>> {
    let hn = h.to_nalgebra();
    let n = h.rows();
    let schur = hn.clone().try_schur(1e-14, 10_000).ok_or(Error::EigenSolve)?;
    let mut ev: Vec<C64> = schur.eigenvalues().ok_or(Error::EigenSolve)?.iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let scale = h.op_norm().max(1.0);
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for e in ev {
        match clusters.iter_mut().find(|c| (c[0] - e).norm() <= 1e-9 * scale) {
            Some(c) => c.push(e),
            None => clusters.push(vec![e]),
        }
    }
    let id = DMatrix::<C64>::identity(n, n);
    clusters
        .into_iter()
        .map(|c| {
            let lambda = c.iter().sum::<C64>() / c.len() as f64;
            let shifted = &hn - &id * lambda;
            // Index: the power at which the rank reaches n − multiplicity.
            let mut power = shifted.clone();
            let mut index = 1;
            while index < c.len() {
                let eps = 1e-7 * scale.powi(index as i32);
                if power.clone().svd(false, false).rank(eps) <= n - c.len() {
                    break;
                }
                power = &power * &shifted;
                index += 1;
            }
            Ok((lambda, index))
        })
        .collect()
}

/// Divided differences `exp[λ₀], exp[λ₀,λ₁], …` read off the first row of
/// the exponential of the bidiagonal matrix with the `λ`s on its diagonal.
fn exp_divided_differences(lambda: &[C64]) -> Vec<C64> {
    let n = lambda.len();
    let j = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            lambda[r]
        } else if c == r + 1 {
            ONE
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let e = j.exp();
    (0..n).map(|k| e[(0, k)]).collect()
}

/// Putzer's method in closed form. With `A = −iHt/2` and `λ₀, λ₁, …` the
/// roots of the minimal polynomial of `A`,
/// `exp(A) = Σₖ exp[λ₀…λₖ]·∏ⱼ₍ⱼ₍ₖ₎(A − λⱼ)`, expanded into powers of `H`.
/// Coefficients beyond the minimal polynomial's degree are zero.
pub fn putzer_coefficients(h: &DenseMatrix, ts: &[f64]) -> Result<CayleyCoeffs> {
    if !h.is_square() {
        return Err(Error::ShapeMismatch {
            left: h.shape(),
            right: h.shape(),
        });
    }
    let n = h.rows();
    let mu: Vec<C64> = minimal_roots(h)?
        .into_iter()
        .flat_map(|(l, k)| std::iter::repeat_n(l, k))
        .collect();
    let coeffs = ts
        .iter()
        .map(|&t| {
            let scale = C64::new(0.0, -t / 2.0);
            let lambda: Vec<C64> = mu.iter().map(|&m| m * scale).collect();
            let r = exp_divided_differences(&lambda);
            // Power coefficients in A of Σ rₖ·∏(A − λⱼ).
            let mut poly = vec![ONE];
            let mut a = vec![C64::new(0.0, 0.0); n];
            for (k, rk) in r.iter().enumerate() {
                for (ai, pi) in a.iter_mut().zip(&poly) {
                    *ai += rk * pi;
                }
                let mut next = vec![C64::new(0.0, 0.0); poly.len() + 1];
                for (i, &p) in poly.iter().enumerate() {
                    next[i + 1] += p;
                    next[i] -= lambda[k] * p;
                }
                poly = next;
            }
            let mut s = ONE;
            a.into_iter()
                .map(|ai| {
                    let c = ai * s;
                    s *= scale;
                    c
                })
                .collect()
        })
        .collect();
    Ok(CayleyCoeffs { ts: ts.to_vec(), coeffs })
}

/// Largest qubit count accepted by [`cayley_hamilton_diagram`].
pub const CAYLEY_HAMILTON_CAP: usize = 3;

/// Exact `exp(−iHt/2)` as one W-fan over the powers `H⁰ … H^{d−1}`,
/// weighted by the Cayley–Hamilton coefficients; `d` is the degree of the
/// minimal polynomial.
pub fn cayley_hamilton_diagram(h: &PauliSum, t: f64) -> Result<Diagram> {
    if h.m > CAYLEY_HAMILTON_CAP {
        return Err(Error::CapExceeded {
            found: h.m,
            cap: CAYLEY_HAMILTON_CAP,
        });
    }
    let hm = oracle_matrix(h)?;
    let mut coeffs = putzer_coefficients(&hm, &[t])?.coeffs.swap_remove(0);
    while coeffs.len() > 1 && coeffs.last() == Some(&C64::new(0.0, 0.0)) {
        coeffs.pop();
    }
    Ok(power_series(h, &coeffs)?.discharge())
}

#[derive(Clone, Debug)]
pub struct DerivativeReport {
    /// Richardson-extrapolated derivative at zero.
    pub estimate: DenseMatrix,
    /// Errors of the central differences at the two step sizes.
    pub residuals: [f64; 2],
    pub richardson_residual: f64,
    /// `log₂` of the error ratio between the two steps; `None` when both
    /// errors are at rounding level.
    pub slope: Option<f64>,
    pub pass: bool,
}

const STEPS: [f64; 2] = [1e-3, 5e-4];

/// Checks `d/dt U(t)|₀ = (−i/2)·h_ref` by central differences.
pub fn derivative_at_zero(e: &Evolution, h_ref: &DenseMatrix) -> Result<DerivativeReport> {
    let target = h_ref.scale(C64::new(0.0, -0.5));
    let central = |h: f64| -> Result<DenseMatrix> {
        Ok(e.unitary_at(h)?.sub(&e.unitary_at(-h)?)?.scale(C64::new(0.5 / h, 0.0)))
    };
    let d1 = central(STEPS[0])?;
    let d2 = central(STEPS[1])?;
    let residuals = [d1.max_abs_diff(&target), d2.max_abs_diff(&target)];
    let estimate = d2.scale(C64::new(4.0 / 3.0, 0.0)).sub(&d1.scale(C64::new(1.0 / 3.0, 0.0)))?;
    let richardson_residual = estimate.max_abs_diff(&target);
    let floor = 1e-10 * target.max_abs().max(1.0);
    let slope = (residuals[1] > floor).then(|| (residuals[0] / residuals[1]).log2());
    let pass = richardson_residual <= 1e-8 * target.max_abs().max(1.0)
        && slope.is_none_or(|s| (s - 2.0).abs() <= 0.2);
    Ok(DerivativeReport {
        estimate,
        residuals,
        richardson_residual,
        slope,
        pass,
    })
}

/// `exp(−i(aX + bZ)t/2)` as rotations: a single `RZ` or `RX` on an axis, and
/// otherwise a `Z` rotation conjugated onto the axis `(a, 0, b)`.
pub fn extract_axz_circuit(a: f64, b: f64, t: f64) -> Result<Circuit> {
    if a == 0.0 && b == 0.0 {
        return Err(Error::Degenerate);
    }
    if !(a.is_finite() && b.is_finite() && t.is_finite()) {
        return Err(Error::Precondition("parameters must be finite".into()));
    }
    let mut c = Circuit::new(1);
    let gates = if a == 0.0 {
        vec![Gate::Rz(0, b * t)]
    } else if b == 0.0 {
        vec![Gate::Rx(0, a * t)]
    } else {
        let norm = a.hypot(b);
        let tilt = a.atan2(b);
        vec![
            Gate::Rz(0, -FRAC_PI_2),
            Gate::Rx(0, -tilt),
            Gate::Rz(0, norm * t),
            Gate::Rx(0, tilt),
            Gate::Rz(0, FRAC_PI_2),
        ]
    };
    for g in gates {
        c.push(g)?;
    }
    Ok(c)
}

#[derive(Clone, Debug)]
pub struct AnticommuteReport {
    pub angles: Vec<f64>,
    pub scalars: Vec<C64>,
    pub max_residual: f64,
    pub holds: bool,
}

/// For anticommuting `P` and `Q`: a `Q` gadget moved past a `P` gadget at
/// angle `π` comes out with its body negated.
pub fn check_anticommuting_gadgets(p: &PauliString, q: &PauliString) -> Result<AnticommuteReport> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    if p.commutes_with(q) {
        return Err(Error::Commuting(p.to_string(), q.to_string()));
    }
    let pi = Label::constant(C64::from_polar(1.0, PI));
    let angles = vec![0.37, 1.3, -2.1];
    let mut scalars = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut holds = true;
    for &beta in &angles {
        let q_label = Label::constant(C64::from_polar(1.0, beta));
        let build = |first: bool| -> Result<Diagram> {
            let mut b = Builder::new();
            let mut w = b.inputs(p.len());
            if first {
                gadget_into(&mut b, &mut w, q, q_label, false);
                gadget_into(&mut b, &mut w, p, pi, false);
            } else {
                gadget_into(&mut b, &mut w, p, pi, false);
                gadget_into(&mut b, &mut w, q, q_label, true);
            }
            b.outputs(w);
            b.finish()
        };
        let r = equal_up_to_scalar(&eval(&build(true)?)?, &eval(&build(false)?)?, DEFAULT_TOL)?;
        scalars.push(r.scalar);
        max_residual = max_residual.max(r.residual);
        holds &= r.equal;
    }
    Ok(AnticommuteReport {
        angles,
        scalars,
        max_residual,
        holds,
    })
}
