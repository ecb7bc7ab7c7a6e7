//! Random well-formed diagrams for property tests and benchmarks.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{Builder, Diagram, Label, Port, TimePhase};

#[derive(Clone, Copy, Debug)]
pub struct RandomDiagramConfig {
    pub n_in: usize,
    pub n_out: usize,
    /// Number of generator placements before the boundary is fixed up.
    pub generators: usize,
    /// Largest number of open wires kept at any time.
    pub max_width: usize,
    /// Allow time-dependent Z-box labels.
    pub phase_labels: bool,
}

impl Default for RandomDiagramConfig {
    fn default() -> Self {
        Self {
            n_in: 2,
            n_out: 2,
            generators: 8,
            max_width: 5,
            phase_labels: false,
        }
    }
}

pub fn random_label(rng: &mut impl Rng) -> C64 {
    C64::from_polar(rng.gen_range(0.0..=3.0), rng.gen_range(0.0..TAU))
}

fn take(rng: &mut impl Rng, pool: &mut Vec<Port>, k: usize) -> Vec<Port> {
    pool.shuffle(rng);
    pool.split_off(pool.len() - k.min(pool.len()))
}

pub fn random_diagram(rng: &mut impl Rng, cfg: &RandomDiagramConfig) -> Diagram {
    let mut b = Builder::new();
    let mut pool = b.inputs(cfg.n_in);
    for _ in 0..cfg.generators {
        let room = cfg.max_width.saturating_sub(pool.len());
        match rng.gen_range(0..6) {
            0 | 1 => {
                let k = rng.gen_range(0..=pool.len().min(2));
                let ins = take(rng, &mut pool, k);
                let n_out = rng.gen_range(0..=(room + k).min(2));
                let label = if cfg.phase_labels && rng.gen_bool(0.3) {
                    Label::Phase(TimePhase::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.0..TAU)))
                } else {
                    Label::Const(random_label(rng))
                };
                let outs = b.zbox(label, &ins, n_out);
                pool.extend(outs);
            }
            2 if !pool.is_empty() => {
                let p = take(rng, &mut pool, 1)[0];
                pool.push(b.had(p));
            }
            3 if !pool.is_empty() && room > 0 => {
                let p = take(rng, &mut pool, 1)[0];
                let (x, y) = b.w(p);
                pool.extend([x, y]);
            }
            4 if pool.len() >= 2 => {
                let ps = take(rng, &mut pool, 2);
                pool.push(b.w_merge(ps[0], ps[1]));
            }
            5 if !pool.is_empty() => {
                let p = take(rng, &mut pool, 1)[0];
                pool.push(if rng.gen_bool(0.5) { b.triangle(p) } else { b.not(p) });
            }
            _ => {}
        }
    }
    while pool.len() > cfg.n_out {
        let p = take(rng, &mut pool, 1)[0];
        b.zbox_effect(random_label(rng), &[p]);
    }
    while pool.len() < cfg.n_out {
        let s = b.zbox_state(random_label(rng), 1);
        pool.extend(s);
    }
    pool.shuffle(rng);
    b.outputs(pool);
    b.finish().expect("random construction keeps every slot linked")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn boundaries_match_config() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (n, m) in [(0, 0), (1, 3), (3, 1), (2, 2)] {
            let cfg = RandomDiagramConfig {
                n_in: n,
                n_out: m,
                ..Default::default()
            };
            let d = random_diagram(&mut rng, &cfg);
            assert_eq!((d.n_inputs(), d.n_outputs()), (n, m));
            assert!(d.validate().is_ok());
        }
    }
}
