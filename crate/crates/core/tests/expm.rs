use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zxw::expm::{
    cayley_hamilton_diagram, check_anticommuting_gadgets, commuting_exponential, derivative_at_zero,
    extract_axz_circuit, pauli_gadget, putzer_coefficients, taylor_diagram, trotter_diagram, Evolution,
};
use zxw::hamiltonian::{oracle_matrix, PauliString, PauliSum};
use zxw::{eval, equal_up_to_scalar, DenseMatrix, Error};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ps(s: &str) -> PauliString {
    s.parse().unwrap()
}

/// `exp(−iHt/2)` by nalgebra's Padé exponential.
fn expm_oracle(h: &DenseMatrix, t: f64) -> DenseMatrix {
    let a: DMatrix<C64> = h.to_nalgebra() * c(0.0, -t / 2.0);
    DenseMatrix::from_nalgebra(&a.exp()).unwrap()
}

fn op_err(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.sub(b).unwrap().op_norm()
}

fn same_up_to_phase(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> bool {
    let r = equal_up_to_scalar(a, b, tol).unwrap();
    r.equal && (r.scalar.norm() - 1.0).abs() < 1e-9
}

fn random_hermitian(rng: &mut impl Rng, n: usize) -> DenseMatrix {
    let data: Vec<C64> = (0..n * n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let a = DenseMatrix::new(n, n, data).unwrap();
    a.add(&a.adjoint()).unwrap()
}

#[test]
fn gadget_table_examples() {
    let g = pauli_gadget(&ps("ZXY"), 1.0).unwrap();
    let oracle = oracle_matrix(&PauliSum::from_pairs(&[(1.0, "ZXY")]).unwrap()).unwrap();
    for t in [0.3, -1.1, 2.0] {
        assert!(g.unitary_at(t).unwrap().max_abs_diff(&expm_oracle(&oracle, t)) < 1e-9);
    }
    // 3·XZY − ZZX composes as Φ_XZY(3t)·Φ_ZZX(−t).
    let h = PauliSum::from_pairs(&[(3.0, "XZY"), (-1.0, "ZZX")]).unwrap();
    let e = commuting_exponential(&h).unwrap();
    let a = pauli_gadget(&ps("XZY"), 3.0).unwrap();
    let b = pauli_gadget(&ps("ZZX"), -1.0).unwrap();
    for t in [0.4, 1.7] {
        let want = a.unitary_at(t).unwrap().matmul(&b.unitary_at(t).unwrap()).unwrap();
        assert!(e.unitary_at(t).unwrap().max_abs_diff(&want) < 1e-9);
        assert!(e.unitary_at(t).unwrap().max_abs_diff(&expm_oracle(&oracle_matrix(&h).unwrap(), t)) < 1e-9);
    }
}

#[test]
fn commuting_example_and_errors() {
    let h = PauliSum::from_pairs(&[(1.0, "ZZZ"), (2.0, "XZX")]).unwrap();
    let e = commuting_exponential(&h).unwrap();
    let hm = oracle_matrix(&h).unwrap();
    for t in [0.1, 0.5, 1.0] {
        assert!(e.unitary_at(t).unwrap().max_abs_diff(&expm_oracle(&hm, t)) < 1e-9);
        assert!(same_up_to_phase(&e.diagram_at(t).unwrap(), &expm_oracle(&hm, t), 1e-9));
    }
    let single = commuting_exponential(&PauliSum::from_pairs(&[(0.7, "XY")]).unwrap()).unwrap();
    assert_eq!(single.diagram.generator_count(), pauli_gadget(&ps("XY"), 0.7).unwrap().diagram.generator_count());
    let bad = PauliSum::from_pairs(&[(1.0, "ZZ"), (1.0, "ZX")]).unwrap();
    assert!(matches!(commuting_exponential(&bad), Err(Error::NonCommuting { first: 0, second: 1 })));
    let complex = PauliSum::new(vec![(c(1.0, 1.0), ps("Z"))]).unwrap();
    assert!(matches!(commuting_exponential(&complex), Err(Error::NonRealCoefficient(0))));
    // Identity terms only move the recorded phase.
    let shifted = PauliSum::from_pairs(&[(1.0, "ZI"), (0.5, "II")]).unwrap();
    let e = commuting_exponential(&shifted).unwrap();
    assert!(e.unitary_at(0.9).unwrap().max_abs_diff(&expm_oracle(&oracle_matrix(&shifted).unwrap(), 0.9)) < 1e-9);
}

#[test]
fn derivatives_at_zero() {
    let z = PauliSum::from_pairs(&[(1.0, "Z")]).unwrap();
    let r = derivative_at_zero(&pauli_gadget(&ps("Z"), 1.0).unwrap(), &oracle_matrix(&z).unwrap()).unwrap();
    assert!(r.pass, "{r:?}");
    let h = PauliSum::from_pairs(&[(1.0, "ZZZ"), (2.0, "XZX")]).unwrap();
    let r = derivative_at_zero(&commuting_exponential(&h).unwrap(), &oracle_matrix(&h).unwrap()).unwrap();
    assert!(r.pass, "{r:?}");
    assert!((r.slope.unwrap() - 2.0).abs() < 0.2);
    let constant = Evolution::constant(zxw::generators::hadamard());
    let r = derivative_at_zero(&constant, &DenseMatrix::zeros(2, 2)).unwrap();
    assert!(r.pass && r.richardson_residual == 0.0 && r.slope.is_none());
    let wrong = derivative_at_zero(&pauli_gadget(&ps("Z"), 1.0).unwrap(), &oracle_matrix(&z).unwrap().scale(c(2.0, 0.0))).unwrap();
    assert!(!wrong.pass);
}

#[test]
fn taylor_examples() {
    let z = PauliSum::from_pairs(&[(1.0, "Z")]).unwrap();
    let zm = oracle_matrix(&z).unwrap();
    assert!(eval(&taylor_diagram(&z, 0, 0.7).unwrap()).unwrap().max_abs_diff(&DenseMatrix::identity(2)) < 1e-12);
    let first = DenseMatrix::identity(2).add(&zm.scale(c(0.0, -0.35))).unwrap();
    assert!(eval(&taylor_diagram(&z, 1, 0.7).unwrap()).unwrap().max_abs_diff(&first) < 1e-12);
}

fn partial_sum(h: &DenseMatrix, n: usize, t: f64) -> DenseMatrix {
    let a = h.scale(c(0.0, -t / 2.0));
    let mut term = DenseMatrix::identity(h.rows());
    let mut acc = term.clone();
    for k in 1..=n {
        term = term.matmul(&a).unwrap().scale(c(1.0 / k as f64, 0.0));
        acc = acc.add(&term).unwrap();
    }
    acc
}

#[test]
fn taylor_order_three_and_error_scaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (a, b) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
    let h = PauliSum::from_pairs(&[(a, "ZZ"), (b, "ZX")]).unwrap();
    let hm = oracle_matrix(&h).unwrap();
    let errs: Vec<f64> = [0.4, 0.2, 0.1]
        .iter()
        .map(|&t| {
            let got = eval(&taylor_diagram(&h, 3, t).unwrap()).unwrap();
            assert!(got.max_abs_diff(&partial_sum(&hm, 3, t)) <= 1e-9);
            op_err(&got, &expm_oracle(&hm, t))
        })
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio / 16.0 - 1.0).abs() <= 0.25, "ratio {ratio}");
    }
}

fn trotter_oracle(h: &PauliSum, steps: usize, t: f64) -> DenseMatrix {
    let step = h.terms.iter().fold(DenseMatrix::identity(1 << h.m), |acc, (a, s)| {
        let single = PauliSum::new(vec![(*a, s.clone())]).unwrap();
        acc.matmul(&expm_oracle(&oracle_matrix(&single).unwrap(), t / steps as f64)).unwrap()
    });
    step.powi(steps).unwrap()
}

#[test]
fn trotter_example() {
    let h = PauliSum::from_pairs(&[(3.0, "ZY"), (2.0, "ZZ")]).unwrap();
    let hm = oracle_matrix(&h).unwrap();
    let t = 0.5;
    let mut errs = Vec::new();
    for steps in [5, 10, 20] {
        let e = trotter_diagram(&h, steps).unwrap();
        let u = e.unitary_at(t).unwrap();
        assert!(u.max_abs_diff(&trotter_oracle(&h, steps, t)) <= 1e-9);
        let resolved = e.resolved(t);
        assert!(!resolved.diagram.is_parametric());
        assert!(resolved.unitary_at(0.0).unwrap().max_abs_diff(&u) < 1e-12);
        errs.push(op_err(&u, &expm_oracle(&hm, t)));
    }
    for w in errs.windows(2) {
        assert!((w[0] / w[1] / 2.0 - 1.0).abs() <= 0.2, "{errs:?}");
    }
    let commuting = PauliSum::from_pairs(&[(1.0, "ZZZ"), (2.0, "XZX")]).unwrap();
    let exact = commuting_exponential(&commuting).unwrap().unitary_at(0.8).unwrap();
    for steps in [1, 3] {
        let u = trotter_diagram(&commuting, steps).unwrap().unitary_at(0.8).unwrap();
        assert!(u.max_abs_diff(&exact) < 1e-9);
    }
    assert!(trotter_diagram(&h, 0).is_err());
}

#[test]
fn putzer_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let z = DenseMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
    let ts = [0.0, 0.3, 1.0, 2.5];
    let mut cases = vec![z.clone(), z.kron(&DenseMatrix::identity(2)), DenseMatrix::zeros(4, 4)];
    for _ in 0..6 {
        cases.push(random_hermitian(&mut rng, 4));
        cases.push(random_hermitian(&mut rng, 2));
    }
    for h in &cases {
        let cc = putzer_coefficients(h, &ts).unwrap();
        for (i, &t) in ts.iter().enumerate() {
            assert!(cc.reconstruct(h, i).unwrap().max_abs_diff(&expm_oracle(h, t)) <= 1e-8);
        }
    }
    // A Jordan block is not diagonalizable.
    let j = DenseMatrix::new(2, 2, vec![c(0.5, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
    let cc = putzer_coefficients(&j, &[1.3]).unwrap();
    assert!(cc.reconstruct(&j, 0).unwrap().max_abs_diff(&expm_oracle(&j, 1.3)) <= 1e-8);
}

#[test]
fn cayley_hamilton_examples() {
    let z = PauliSum::from_pairs(&[(1.0, "Z")]).unwrap();
    let d = eval(&cayley_hamilton_diagram(&z, FRAC_PI_2).unwrap()).unwrap();
    let want = DenseMatrix::diagonal(&[C64::from_polar(1.0, -PI / 4.0), C64::from_polar(1.0, PI / 4.0)]).unwrap();
    assert!(d.max_abs_diff(&want) < 1e-8);
    let (a, b, t) = (0.8, -1.3, 0.9);
    let h = PauliSum::from_pairs(&[(a, "X"), (b, "Z")]).unwrap();
    let cc = putzer_coefficients(&oracle_matrix(&h).unwrap(), &[t]).unwrap();
    let lam = f64::hypot(a, b);
    assert!((cc.coeffs[0][0] - c((lam * t / 2.0).cos(), 0.0)).norm() < 1e-10);
    assert!((cc.coeffs[0][1] - c(0.0, -(lam * t / 2.0).sin() / lam)).norm() < 1e-10);
    let d = eval(&cayley_hamilton_diagram(&h, t).unwrap()).unwrap();
    assert!(d.max_abs_diff(&expm_oracle(&oracle_matrix(&h).unwrap(), t)) < 1e-8);
    let two = PauliSum::from_pairs(&[(1.0, "ZZ"), (1.0, "XI")]).unwrap();
    let d = eval(&cayley_hamilton_diagram(&two, 0.6).unwrap()).unwrap();
    assert!(d.max_abs_diff(&expm_oracle(&oracle_matrix(&two).unwrap(), 0.6)) < 1e-8);
    let ising = zxw::hamiltonian::parse_pauli_sum(include_str!("../../../data/ising3.txt")).unwrap();
    let d = eval(&cayley_hamilton_diagram(&ising, 0.5).unwrap()).unwrap();
    assert!(d.max_abs_diff(&expm_oracle(&oracle_matrix(&ising).unwrap(), 0.5)) < 1e-8);
    let four = PauliSum::from_pairs(&[(1.0, "ZZZZ")]).unwrap();
    assert!(matches!(cayley_hamilton_diagram(&four, 0.1), Err(Error::CapExceeded { .. })));
}

#[test]
fn extraction_examples() {
    let x = PauliSum::from_pairs(&[(1.0, "X")]).unwrap();
    let check = |a: f64, b: f64, t: f64| {
        let h = PauliSum::from_pairs(&[(a, "X"), (b, "Z")]).unwrap();
        let circuit = extract_axz_circuit(a, b, t).unwrap();
        let want = expm_oracle(&oracle_matrix(&h).unwrap(), t);
        assert!(same_up_to_phase(&circuit.unitary(), &want, 1e-9));
        // The circuit's diagram matches the exact exponential diagram.
        let (d, _) = circuit.to_diagram();
        let exact = eval(&cayley_hamilton_diagram(&h, t).unwrap()).unwrap();
        assert!(equal_up_to_scalar(&eval(&d).unwrap(), &exact, 1e-9).unwrap().equal);
        circuit
    };
    assert_eq!(check(0.0, 1.2, 0.5).gates.len(), 1);
    assert_eq!(check(1.2, 0.0, 0.5).gates.len(), 1);
    check(1.0, 1.0, 0.7);
    check(-0.4, 2.0, -1.5);
    let _ = x;
}

#[test]
fn anticommuting_gadgets() {
    for (p, q) in [("X", "Z"), ("XX", "ZI"), ("XYZ", "ZYZ")] {
        let r = check_anticommuting_gadgets(&ps(p), &ps(q)).unwrap();
        assert!(r.holds, "{p} {q}: {r:?}");
    }
    assert!(matches!(check_anticommuting_gadgets(&ps("Z"), &ps("Z")), Err(Error::Commuting(..))));
    assert!(check_anticommuting_gadgets(&ps("Z"), &ps("XX")).is_err());
}

fn random_string(rng: &mut impl Rng, m: usize) -> PauliString {
    loop {
        let s: String = (0..m).map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)]).collect();
        let p = ps(&s);
        if !p.is_identity() {
            return p;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gadgets_match_oracle(seed in any::<u64>(), m in 1usize..=3, t in -2.0f64..2.0, coeff in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_string(&mut rng, m);
        let g = pauli_gadget(&p, coeff).unwrap();
        let hm = p.matrix().scale(c(coeff, 0.0));
        prop_assert!(same_up_to_phase(&g.diagram_at(t).unwrap(), &expm_oracle(&hm, t), 1e-9));
        prop_assert!(g.unitary_at(t).unwrap().max_abs_diff(&expm_oracle(&hm, t)) <= 1e-9);
    }

    #[test]
    fn trotter_is_unitary(seed in any::<u64>(), steps in 1usize..4, t in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (0..3).map(|_| (c(rng.gen_range(-1.0..1.0), 0.0), random_string(&mut rng, 2))).collect();
        let h = PauliSum::new(terms).unwrap();
        let u = trotter_diagram(&h, steps).unwrap().unitary_at(t).unwrap();
        prop_assert!(u.adjoint().matmul(&u).unwrap().max_abs_diff(&DenseMatrix::identity(4)) <= 1e-9);
    }

    #[test]
    fn extraction_matches_oracle(a in -2.0f64..2.0, b in -2.0f64..2.0, t in -3.0f64..3.0) {
        prop_assume!(a.abs() + b.abs() > 1e-6);
        let h = PauliSum::from_pairs(&[(a, "X"), (b, "Z")]).unwrap();
        let u = extract_axz_circuit(a, b, t).unwrap().unitary();
        prop_assert!(same_up_to_phase(&u, &expm_oracle(&oracle_matrix(&h).unwrap(), t), 1e-9));
    }
}
