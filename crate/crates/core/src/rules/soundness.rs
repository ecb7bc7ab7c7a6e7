use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::templates::{template, ParamKind, RuleParams, RuleTemplate};
use crate::error::Result;
use crate::eval::{equal_up_to_scalar, eval, DEFAULT_TOL};
use crate::generators::Pink;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Verdict {
    Exact,
    UpToScalar(C64),
    Fail,
}

#[derive(Clone, Debug)]
pub struct SoundnessReport {
    pub rule: &'static str,
    pub params: RuleParams,
    pub verdict: Verdict,
    pub residual: f64,
}

/// Aggregate over the reports of one rule.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleSummary {
    pub rule: &'static str,
    pub samples: usize,
    pub exact: usize,
    pub up_to_scalar: usize,
    pub fail: usize,
    pub max_residual: f64,
}

fn stream_seed(seed: u64, rule: &str, index: usize) -> u64 {
    // FNV-1a over the rule name.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in rule.bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ h ^ (index as u64).wrapping_mul(0xd1b5_4a32_d192_ed03)
}

fn random_label(rng: &mut impl Rng) -> C64 {
    C64::from_polar(rng.gen_range(0.0..=3.0), rng.gen_range(0.0..TAU))
}

fn random_pink(rng: &mut impl Rng) -> Pink {
    if rng.gen_bool(0.5) {
        Pink::Pi
    } else {
        Pink::Zero
    }
}

/// Draws one parameter assignment for `t`.
pub fn sample_params(t: &RuleTemplate, rng: &mut impl Rng) -> RuleParams {
    let mut p = RuleParams {
        a: random_label(rng),
        b: random_label(rng),
        n: rng.gen_range(t.n_range.0..=t.n_range.1),
        m: rng.gen_range(t.m_range.0..=t.m_range.1),
        tau: random_pink(rng),
        tau2: random_pink(rng),
        flip: rng.gen_bool(0.5),
    };
    if !t.uses(ParamKind::A) {
        p.a = C64::new(1.0, 0.0);
    }
    if !t.uses(ParamKind::B) {
        p.b = C64::new(1.0, 0.0);
    }
    p
}

/// Evaluates both sides and classifies the outcome.
pub fn check_instance(t: &'static RuleTemplate, params: RuleParams) -> Result<SoundnessReport> {
    let (lhs, rhs) = t.instantiate(&params)?;
    let l = eval(&lhs)?;
    let r = eval(&rhs)?;
    let tol = DEFAULT_TOL * r.max_abs().max(1.0);
    let cmp = equal_up_to_scalar(&l, &r, tol)?;
    let verdict = if cmp.exact {
        Verdict::Exact
    } else if cmp.equal {
        Verdict::UpToScalar(cmp.scalar)
    } else {
        Verdict::Fail
    };
    Ok(SoundnessReport {
        rule: t.name,
        params,
        verdict,
        residual: cmp.residual,
    })
}

/// Checks `samples` random instances of the named rule. Each sample has its own
/// RNG stream derived from `(seed, rule, index)`, so results do not depend on
/// scheduling.
pub fn check_soundness(name: &str, samples: usize, seed: u64) -> Result<Vec<SoundnessReport>> {
    let t = template(name)?;
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, t.name, i));
            check_instance(t, sample_params(t, &mut rng))
        })
        .collect()
}

pub fn summarize(reports: &[SoundnessReport]) -> Option<RuleSummary> {
    let rule = reports.first()?.rule;
    let count = |f: fn(&Verdict) -> bool| reports.iter().filter(|r| f(&r.verdict)).count();
    Some(RuleSummary {
        rule,
        samples: reports.len(),
        exact: count(|v| matches!(v, Verdict::Exact)),
        up_to_scalar: count(|v| matches!(v, Verdict::UpToScalar(_))),
        fail: count(|v| matches!(v, Verdict::Fail)),
        max_residual: reports.iter().map(|r| r.residual).fold(0.0, f64::max),
    })
}
