//! Rewrite rules and lemmas as parameterised pairs of diagrams.

use std::f64::consts::SQRT_2;

use num_complex::Complex64 as C64;

use crate::diagram::{Builder, Diagram, Port};
use crate::error::{Error, Result};
use crate::generators::Pink;

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    A,
    B,
    /// First size parameter, usually the input arity.
    N,
    /// Second size parameter, usually the output arity.
    M,
    Tau,
    Tau2,
}

/// One assignment of rule parameters. Fields a rule does not use are ignored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuleParams {
    pub a: C64,
    pub b: C64,
    pub n: usize,
    pub m: usize,
    pub tau: Pink,
    pub tau2: Pink,
    /// Build the vertically flipped (transposed) version of both sides.
    pub flip: bool,
}

impl Default for RuleParams {
    fn default() -> Self {
        Self {
            a: ONE,
            b: ONE,
            n: 1,
            m: 1,
            tau: Pink::Zero,
            tau2: Pink::Zero,
            flip: false,
        }
    }
}

type BuildFn = fn(&RuleParams) -> Result<(Diagram, Diagram)>;

pub struct RuleTemplate {
    pub name: &'static str,
    pub params: &'static [ParamKind],
    /// Inclusive range for `n`.
    pub n_range: (usize, usize),
    /// Inclusive range for `m`.
    pub m_range: (usize, usize),
    build: BuildFn,
}

impl RuleTemplate {
    pub fn uses(&self, k: ParamKind) -> bool {
        self.params.contains(&k)
    }

    /// Builds `(lhs, rhs)`.
    pub fn instantiate(&self, p: &RuleParams) -> Result<(Diagram, Diagram)> {
        let in_range = |v: usize, (lo, hi): (usize, usize)| lo <= v && v <= hi;
        if !in_range(p.n, self.n_range) || !in_range(p.m, self.m_range) {
            return Err(Error::Precondition(format!(
                "{}: size parameters ({}, {}) outside {:?} × {:?}",
                self.name, p.n, p.m, self.n_range, self.m_range
            )));
        }
        let (l, r) = (self.build)(p)?;
        debug_assert_eq!((l.n_inputs(), l.n_outputs()), (r.n_inputs(), r.n_outputs()), "{}", self.name);
        if p.flip {
            Ok((l.transpose(), r.transpose()))
        } else {
            Ok((l, r))
        }
    }
}

fn build(n_in: usize, f: impl FnOnce(&mut Builder, Vec<Port>) -> Vec<Port>) -> Result<Diagram> {
    let mut b = Builder::new();
    let ins = b.inputs(n_in);
    let outs = f(&mut b, ins);
    b.outputs(outs);
    b.finish()
}

fn wire() -> Result<Diagram> {
    build(1, |_, ins| ins)
}

fn s1(p: &RuleParams) -> Result<(Diagram, Diagram)> {
    let k = p.m / 2;
    let lhs = build(p.n, |b, ins| {
        let first = b.zbox_c(p.a, &ins, 1 + k);
        let mut outs = first[1..].to_vec();
        outs.extend(b.zbox_c(p.b, &first[..1], p.m - k));
        outs
    })?;
    let rhs = build(p.n, |b, ins| b.zbox_c(p.a * p.b, &ins, p.m))?;
    Ok((lhs, rhs))
}

fn s2(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    Ok((build(1, |b, ins| b.copy(ins[0], 1))?, wire()?))
}

fn s3(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    Ok((build(0, |b, _| b.zbox_state(ONE, 2))?, crate::generators::cap()))
}

fn ept(p: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(0, |b, _| {
        let s = b.basis_state(false);
        b.zbox_effect(p.a, &[s]);
        vec![]
    })?;
    Ok((lhs, Diagram::new()))
}

fn b1(p: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(0, |b, _| {
        let s = b.basis_state(false);
        b.zbox_c(p.a, &[s], p.m)
    })?;
    let rhs = build(0, |b, _| (0..p.m).map(|_| b.basis_state(false)).collect())?;
    Ok((lhs, rhs))
}

fn b2(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(2, |b, ins| {
        let x = b.xor(ins[0], ins[1]);
        b.copy(x, 2)
    })?;
    let rhs = build(2, |b, ins| {
        let x = b.copy(ins[0], 2);
        let y = b.copy(ins[1], 2);
        vec![b.xor(x[0], y[0]), b.xor(x[1], y[1])]
    })?;
    Ok((lhs, rhs))
}

fn b3(p: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(0, |b, _| {
        let s = b.basis_state(true);
        b.zbox_c(p.a, &[s], p.m)
    })?;
    let rhs = build(0, |b, _| {
        b.scalar(p.a);
        (0..p.m).map(|_| b.basis_state(true)).collect()
    })?;
    Ok((lhs, rhs))
}

fn brk(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(1, |b, ins| {
        let one = b.basis_state(true);
        vec![b.and_box(ins[0], one)]
    })?;
    Ok((lhs, wire()?))
}

fn bas0(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(0, |b, _| {
        let s = b.basis_state(false);
        vec![b.triangle(s)]
    })?;
    Ok((lhs, build(0, |b, _| vec![b.basis_state(false)])?))
}

fn bas1(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(0, |b, _| {
        let s = b.basis_state(true);
        vec![b.triangle(s)]
    })?;
    Ok((lhs, build(0, |b, _| b.zbox_state(ONE, 1))?))
}

fn suc(p: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(0, |b, _| {
        let s = b.basis_state(true);
        let t = b.triangle(s);
        b.zbox_effect(p.a, &[t]);
        vec![]
    })?;
    let rhs = build(0, |b, _| {
        b.zbox_c(p.a, &[], 0);
        vec![]
    })?;
    Ok((lhs, rhs))
}

fn inv(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(1, |b, ins| {
        let x = b.triangle_inv(ins[0]);
        vec![b.triangle(x)]
    })?;
    Ok((lhs, wire()?))
}

fn zero(p: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(p.n, |b, ins| b.zbox_c(ZERO, &ins, p.m))?;
    let rhs = build(p.n, |b, ins| {
        for &i in &ins {
            b.basis_effect(i, false);
        }
        (0..p.m).map(|_| b.basis_state(false)).collect()
    })?;
    Ok((lhs, rhs))
}

/// Hadamard as a product of green π/2 phases and triangle sandwiches, without
/// its global scalar.
fn eu(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let s = C64::new(0.0, 1.0);
    let minus_two = C64::new(-2.0, 0.0);
    let lhs = build(1, |b, ins| vec![b.had(ins[0])])?;
    let rhs = build(1, |b, ins| {
        let mut x = b.zbox1(s, ins[0]);
        for _ in 0..2 {
            x = b.triangle(x);
            x = b.zbox1(minus_two, x);
            x = b.triangle_t(x);
            x = b.zbox1(s, x);
        }
        vec![x]
    })?;
    Ok((lhs, rhs))
}

fn sym(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(1, |b, ins| {
        let (x, y) = b.w(ins[0]);
        vec![y, x]
    })?;
    Ok((lhs, crate::generators::w()))
}

fn aso(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(1, |b, ins| {
        let (x, y) = b.w(ins[0]);
        let (x1, x2) = b.w(x);
        vec![x1, x2, y]
    })?;
    let rhs = build(1, |b, ins| {
        let (x, y) = b.w(ins[0]);
        let (y1, y2) = b.w(y);
        vec![x, y1, y2]
    })?;
    Ok((lhs, rhs))
}

fn pcy(p: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(1, |b, ins| {
        let z = b.zbox1(p.a, ins[0]);
        let (x, y) = b.w(z);
        vec![x, y]
    })?;
    let rhs = build(1, |b, ins| {
        let (x, y) = b.w(ins[0]);
        vec![b.zbox1(p.a, x), b.zbox1(p.a, y)]
    })?;
    Ok((lhs, rhs))
}

/// W as a pink copy followed by a weight that vanishes on `|11⟩`.
fn wdc(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let rhs = build(1, |b, ins| {
        let legs = b.pink(Pink::Zero, &ins, 2);
        let x = b.copy(legs[0], 2);
        let y = b.copy(legs[1], 2);
        let tx = b.triangle(x[1]);
        let ty = b.triangle(y[1]);
        b.zbox_effect(-ONE, &[tx, ty]);
        vec![x[0], y[0]]
    })?;
    Ok((crate::generators::w(), rhs))
}

fn s1r(p: &RuleParams) -> Result<(Diagram, Diagram)> {
    let k = p.m / 2;
    let lhs = build(p.n, |b, ins| {
        let first = b.pink(p.tau, &ins, 1 + k);
        let mut outs = first[1..].to_vec();
        outs.extend(b.pink(p.tau2, &first[..1], p.m - k));
        outs
    })?;
    let rhs = build(p.n, |b, ins| b.pink(p.tau.plus(p.tau2), &ins, p.m))?;
    Ok((lhs, rhs))
}

fn h2(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(1, |b, ins| {
        let h = b.had(ins[0]);
        vec![b.had(h)]
    })?;
    Ok((lhs, wire()?))
}

fn triangle_transpose(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(1, |b, ins| {
        let x = b.not(ins[0]);
        let t = b.triangle(x);
        vec![b.not(t)]
    })?;
    Ok((lhs, crate::generators::triangle_t()))
}

fn triangle_inv_by_pi(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(1, |b, ins| {
        let z = b.zbox1(-ONE, ins[0]);
        let t = b.triangle(z);
        vec![b.zbox1(-ONE, t)]
    })?;
    Ok((lhs, crate::generators::triangle_inv()))
}

fn triangle_t_stab1(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(0, |b, _| {
        let s = b.basis_state(true);
        vec![b.triangle_t(s)]
    })?;
    Ok((lhs, crate::generators::basis_state(true)))
}

fn hopf(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(1, |b, ins| {
        let c = b.copy(ins[0], 2);
        vec![b.xor(c[0], c[1])]
    })?;
    let rhs = build(1, |b, ins| {
        b.zbox_effect(ONE, &ins);
        vec![b.basis_state(false)]
    })?;
    Ok((lhs, rhs))
}

/// π copy without its scalar `a`.
fn pic(p: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(p.n, |b, ins| {
        let xs: Vec<Port> = ins.into_iter().map(|i| b.not(i)).collect();
        b.zbox_c(p.a, &xs, p.m)
    })?;
    let rhs = build(p.n, |b, ins| {
        let outs = b.zbox_c(p.a.inv(), &ins, p.m);
        outs.into_iter().map(|o| b.not(o)).collect()
    })?;
    Ok((lhs, rhs))
}

fn pi_commute(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(1, |b, ins| {
        let x = b.not(ins[0]);
        vec![b.zbox1(-ONE, x)]
    })?;
    let rhs = build(1, |b, ins| {
        b.scalar(-ONE);
        let z = b.zbox1(-ONE, ins[0]);
        vec![b.not(z)]
    })?;
    Ok((lhs, rhs))
}

/// Merging `n` Z-box states (labels alternating `a`, `b`) through a W spider.
fn wfuse1(p: &RuleParams) -> Result<(Diagram, Diagram)> {
    let labels: Vec<C64> = (0..p.n).map(|i| if i % 2 == 0 { p.a } else { p.b }).collect();
    let lhs = build(0, |b, _| {
        let states: Vec<Port> = labels.iter().map(|&l| b.zbox_state(l, 1)[0]).collect();
        vec![b.w_merge_all(&states).expect("n ≥ 1")]
    })?;
    let total: C64 = labels.iter().sum();
    let rhs = build(0, |b, _| b.zbox_state(total, 1))?;
    Ok((lhs, rhs))
}

fn w_green_equals_cup(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(0, |b, _| {
        let s = b.basis_state(true);
        let (x, y) = b.w(s);
        vec![b.not(x), y]
    })?;
    Ok((lhs, crate::generators::cap()))
}

fn triangle_green_had(_: &RuleParams) -> Result<(Diagram, Diagram)> {
    let lhs = build(1, |b, ins| {
        let t = b.triangle(ins[0]);
        let z = b.zbox1(C64::new(-2.0, 0.0), t);
        vec![b.triangle_t(z)]
    })?;
    let rhs = build(1, |b, ins| {
        b.scalar(C64::new(SQRT_2, 0.0));
        vec![b.had(ins[0])]
    })?;
    Ok((lhs, rhs))
}

use ParamKind::*;

const fn rule(
    name: &'static str,
    params: &'static [ParamKind],
    n_range: (usize, usize),
    m_range: (usize, usize),
    build: BuildFn,
) -> RuleTemplate {
    RuleTemplate {
        name,
        params,
        n_range,
        m_range,
        build,
    }
}

const FIXED_1_1: ((usize, usize), (usize, usize)) = ((1, 1), (1, 1));

static TEMPLATES: &[RuleTemplate] = &[
    rule("S1", &[A, B, N, M], (0, 4), (0, 4), s1),
    rule("S2", &[], FIXED_1_1.0, FIXED_1_1.1, s2),
    rule("S3", &[], (0, 0), (2, 2), s3),
    rule("Ept", &[A], (0, 0), (0, 0), ept),
    rule("B1", &[A, M], (0, 0), (0, 4), b1),
    rule("B2", &[], (2, 2), (2, 2), b2),
    rule("B3", &[A, M], (0, 0), (0, 4), b3),
    rule("Brk", &[], FIXED_1_1.0, FIXED_1_1.1, brk),
    rule("Bas0", &[], (0, 0), (1, 1), bas0),
    rule("Bas1", &[], (0, 0), (1, 1), bas1),
    rule("Suc", &[A], (0, 0), (0, 0), suc),
    rule("Inv", &[], FIXED_1_1.0, FIXED_1_1.1, inv),
    rule("Zero", &[N, M], (0, 4), (0, 4), zero),
    rule("EU", &[], FIXED_1_1.0, FIXED_1_1.1, eu),
    rule("Sym", &[], (1, 1), (2, 2), sym),
    rule("Aso", &[], (1, 1), (3, 3), aso),
    rule("Pcy", &[A], (1, 1), (2, 2), pcy),
    rule("Wdc", &[], (1, 1), (2, 2), wdc),
    rule("S1r", &[Tau, Tau2, N, M], (0, 4), (0, 4), s1r),
    rule("H2", &[], FIXED_1_1.0, FIXED_1_1.1, h2),
    rule("TriangleTranspose", &[], FIXED_1_1.0, FIXED_1_1.1, triangle_transpose),
    rule("TriangleInvByPi", &[], FIXED_1_1.0, FIXED_1_1.1, triangle_inv_by_pi),
    rule("TriangleT_stab1", &[], (0, 0), (1, 1), triangle_t_stab1),
    rule("Hopf", &[], FIXED_1_1.0, FIXED_1_1.1, hopf),
    rule("Pic", &[A, N, M], (0, 3), (0, 3), pic),
    rule("PiCommute", &[], FIXED_1_1.0, FIXED_1_1.1, pi_commute),
    rule("Wfuse1", &[A, B, N], (1, 4), (1, 1), wfuse1),
    rule("WGreenEqualsCup", &[], (0, 0), (2, 2), w_green_equals_cup),
    rule("TriangleGreenHad", &[], FIXED_1_1.0, FIXED_1_1.1, triangle_green_had),
];

/// Every rule and lemma template, in table order.
pub fn templates() -> &'static [RuleTemplate] {
    TEMPLATES
}

pub fn template(name: &str) -> Result<&'static RuleTemplate> {
    TEMPLATES
        .iter()
        .find(|t| t.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownRule(name.to_string()))
}

/// Builds both sides of the named rule.
pub fn instantiate(name: &str, params: &RuleParams) -> Result<(Diagram, Diagram)> {
    template(name)?.instantiate(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let mut names: Vec<_> = templates().iter().map(|t| t.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), templates().len());
    }

    #[test]
    fn every_template_builds_at_its_bounds() {
        for t in templates() {
            for &n in &[t.n_range.0, t.n_range.1] {
                for &m in &[t.m_range.0, t.m_range.1] {
                    for flip in [false, true] {
                        let p = RuleParams {
                            n,
                            m,
                            flip,
                            a: C64::new(0.5, 0.25),
                            ..RuleParams::default()
                        };
                        let (l, r) = t.instantiate(&p).unwrap();
                        assert_eq!(l.n_inputs(), r.n_inputs(), "{}", t.name);
                        assert_eq!(l.n_outputs(), r.n_outputs(), "{}", t.name);
                    }
                }
            }
        }
    }

    #[test]
    fn out_of_range_size_rejected() {
        let p = RuleParams {
            n: 3,
            ..RuleParams::default()
        };
        assert!(instantiate("H2", &p).is_err());
        assert!(matches!(instantiate("nope", &p), Err(Error::UnknownRule(_))));
    }
}
