use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zxw::hamiltonian::{build_hamiltonian_diagram, parse_pauli_sum};
use zxw::io::{from_json, to_dot, to_json};
use zxw::random::{random_diagram, RandomDiagramConfig};
use zxw::{eval_at, Diagram};

const ISING: &str = include_str!("../../../data/ising3.txt");

fn sample(seed: u64, generators: usize) -> Diagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = RandomDiagramConfig {
        n_in: (seed % 3) as usize,
        n_out: (seed / 3 % 3) as usize,
        generators,
        max_width: 5,
        phase_labels: true,
    };
    random_diagram(&mut rng, &cfg)
}

#[test]
fn hamiltonian_dot_has_one_weight_per_term() {
    let h = parse_pauli_sum(ISING).unwrap();
    let d = build_hamiltonian_diagram(&h).unwrap().diagram;
    let dot = to_dot(&d);
    assert_eq!(dot.matches("tooltip=\"weight\"").count(), 5);
    assert!(dot.starts_with("graph zxw {"));
    assert_eq!(dot.matches(" -- ").count(), d.edges().len());
    assert_eq!(from_json(&to_json(&d)).unwrap(), d);
}

#[test]
fn compacted_diagrams_round_trip() {
    // Rewrites leave holes in the id space; the format keeps ids as given.
    let d = sample(7, 12);
    let mut holed = d.clone();
    let victim = holed.node_ids().find(|&id| {
        let n = holed.node(id).unwrap();
        n.arity() == 2 && !n.kind.is_boundary()
    });
    if let Some(id) = victim {
        holed.splice_out(id);
    }
    assert_eq!(from_json(&to_json(&holed)).unwrap(), holed);
    assert_eq!(from_json(&to_json(&d.compacted())).unwrap(), d.compacted());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip_is_identity(seed in any::<u64>(), generators in 0usize..16) {
        let d = sample(seed, generators);
        let back = from_json(&to_json(&d)).unwrap();
        prop_assert_eq!(&back, &d);
        let (a, b) = (eval_at(&d, 0.3).unwrap(), eval_at(&back, 0.3).unwrap());
        prop_assert_eq!(a.max_abs_diff(&b), 0.0);
    }
}
