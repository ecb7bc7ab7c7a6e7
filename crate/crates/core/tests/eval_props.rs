use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zxw::diagram::{compose_par, compose_seq, Builder, Diagram};
use zxw::eval::{eval_with, plug_basis, ContractionOrder, EvalOptions};
use zxw::generators::{self as g, WTree};
use zxw::random::{random_diagram, RandomDiagramConfig};
use zxw::{eval, DenseMatrix};

fn rand_diag(rng: &mut ChaCha8Rng, n_in: usize, n_out: usize) -> Diagram {
    let generators = rng.gen_range(0..10);
    random_diagram(
        rng,
        &RandomDiagramConfig {
            n_in,
            n_out,
            generators,
            ..Default::default()
        },
    )
}

fn rand_any(rng: &mut ChaCha8Rng) -> Diagram {
    let (n, m) = (rng.gen_range(0..3), rng.gen_range(0..3));
    rand_diag(rng, n, m)
}

fn close(a: &DenseMatrix, b: &DenseMatrix) -> bool {
    a.max_abs_diff(b) <= 1e-9 * a.max_abs().max(b.max_abs()).max(1.0)
}

fn random_shape(rng: &mut ChaCha8Rng, leaves: usize) -> WTree {
    if leaves == 1 {
        return WTree::Leaf;
    }
    let left = rng.gen_range(1..leaves);
    WTree::Fork(Box::new(random_shape(rng, left)), Box::new(random_shape(rng, leaves - left)))
}

/// Bends every input into an output and vice versa using caps and cups.
fn bend(d: &Diagram) -> Diagram {
    let mut b = Builder::new();
    let ys = b.inputs(d.n_outputs());
    let mut feed = Vec::new();
    let mut outs = Vec::new();
    for _ in 0..d.n_inputs() {
        let legs = b.apply(&g::cap(), &[]).unwrap();
        feed.push(legs[0]);
        outs.push(legs[1]);
    }
    let os = b.apply(d, &feed).unwrap();
    for (o, y) in os.into_iter().zip(ys) {
        b.apply(&g::cup(), &[o, y]).unwrap();
    }
    b.outputs(outs);
    b.finish().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sequential_composition_is_matrix_product(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, k, m) = (rng.gen_range(0..3), rng.gen_range(0..3), rng.gen_range(0..3));
        let f = rand_diag(&mut rng, n, k);
        let h = rand_diag(&mut rng, k, m);
        let lhs = eval(&compose_seq(&f, &h).unwrap()).unwrap();
        let rhs = eval(&h).unwrap().matmul(&eval(&f).unwrap()).unwrap();
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn parallel_composition_is_kronecker(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = rand_any(&mut rng);
        let h = rand_any(&mut rng);
        let lhs = eval(&compose_par(&f, &h).unwrap()).unwrap();
        prop_assert!(close(&lhs, &eval(&f).unwrap().kron(&eval(&h).unwrap())));
    }

    #[test]
    fn interchange_law(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = rand_diag(&mut rng, 1, 2);
        let gg = rand_diag(&mut rng, 1, 1);
        let h = rand_diag(&mut rng, 2, 1);
        let k = rand_diag(&mut rng, 1, 2);
        let left = compose_seq(&compose_par(&f, &gg).unwrap(), &compose_par(&h, &k).unwrap()).unwrap();
        let right = compose_par(&compose_seq(&f, &h).unwrap(), &compose_seq(&gg, &k).unwrap()).unwrap();
        prop_assert!(close(&eval(&left).unwrap(), &eval(&right).unwrap()));
    }

    #[test]
    fn contraction_order_does_not_matter(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rand_any(&mut rng);
        let greedy = eval(&d).unwrap();
        let seq = eval_with(&d, &EvalOptions { order: ContractionOrder::Sequential, ..Default::default() }).unwrap();
        prop_assert!(greedy.max_abs_diff(&seq) <= 1e-12 * greedy.max_abs().max(1.0));
    }

    #[test]
    fn w_spider_association_irrelevant(seed in any::<u64>(), m in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = random_shape(&mut rng, m);
        let a = eval(&g::w_spider_shaped(&shape).unwrap()).unwrap();
        let b = eval(&g::w_spider(m).unwrap()).unwrap();
        prop_assert_eq!(a.max_abs_diff(&b), 0.0);
    }

    #[test]
    fn bending_gives_transpose(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rand_any(&mut rng);
        let e = eval(&d).unwrap();
        prop_assert!(close(&eval(&bend(&d)).unwrap(), &e.transpose()));
        prop_assert!(close(&eval(&d.transpose()).unwrap(), &e.transpose()));
    }

    #[test]
    fn zbox_generators_for_random_labels(re in -3.0f64..3.0, im in -3.0f64..3.0, n in 0usize..4, m in 0usize..4) {
        let a = C64::new(re, im);
        let e = eval(&g::zbox(a, n, m)).unwrap();
        for r in 0..1usize << m {
            for c in 0..1usize << n {
                let mut want = C64::new(0.0, 0.0);
                if r == 0 && c == 0 { want += 1.0; }
                if r == (1 << m) - 1 && c == (1 << n) - 1 { want += a; }
                prop_assert_eq!(e[(r, c)], want);
            }
        }
    }
}

#[test]
fn w_spider_remark_formula() {
    // W spider on |1⟩ gives every weight-one string; on |0⟩ gives |0…0⟩.
    for m in 1..=6 {
        let d = g::w_spider(m).unwrap();
        let one = eval(&plug_basis(&d, 0, true).unwrap()).unwrap();
        let zero = eval(&plug_basis(&d, 0, false).unwrap()).unwrap();
        for k in 0..1usize << m {
            let w1 = if k.count_ones() == 1 { 1.0 } else { 0.0 };
            let w0 = if k == 0 { 1.0 } else { 0.0 };
            assert_eq!(one[(k, 0)], C64::new(w1, 0.0));
            assert_eq!(zero[(k, 0)], C64::new(w0, 0.0));
        }
    }
}

#[test]
fn plug_examples() {
    let wire = g::identity(1);
    let s = eval(&plug_basis(&wire, 0, false).unwrap()).unwrap();
    assert_eq!(s.data(), &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);

    let w = eval(&plug_basis(&g::w(), 0, true).unwrap()).unwrap();
    let want: Vec<C64> = [0.0, 1.0, 1.0, 0.0].iter().map(|&x| C64::new(x, 0.0)).collect();
    assert_eq!(w.data(), &want[..]);

    let and = plug_basis(&plug_basis(&g::and_box(), 0, true).unwrap(), 0, true).unwrap();
    let e = eval(&and).unwrap();
    assert!((e[(1, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12 && e[(0, 0)].norm() < 1e-12);
}

#[test]
fn yanking() {
    // (cap ⊗ I) then (I ⊗ cup) is a plain wire.
    let left = compose_par(&g::cap(), &g::identity(1)).unwrap();
    let right = compose_par(&g::identity(1), &g::cup()).unwrap();
    let snake = compose_seq(&compose_seq(&g::identity(1), &left).unwrap(), &right).unwrap();
    assert!(eval(&snake).unwrap().max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
}

#[test]
fn spec_level_composition_examples() {
    let hh = compose_seq(&g::hadamard(), &g::hadamard()).unwrap();
    assert!(eval(&hh).unwrap().max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
    let (a, b) = (C64::new(0.5, 1.0), C64::new(-2.0, 0.25));
    let zz = compose_seq(&g::zbox(a, 1, 1), &g::zbox(b, 1, 1)).unwrap();
    let want = DenseMatrix::diagonal(&[C64::new(1.0, 0.0), a * b]).unwrap();
    assert!(eval(&zz).unwrap().max_abs_diff(&want) < 1e-15);
    let ii = compose_par(&g::identity(1), &g::identity(1)).unwrap();
    assert_eq!(eval(&ii).unwrap().max_abs_diff(&DenseMatrix::identity(4)), 0.0);
    let green = eval(&g::green(0.7, 1, 1)).unwrap();
    assert!((green[(1, 1)] - C64::from_polar(1.0, 0.7)).norm() < 1e-15);
}
