//! Evaluation of diagrams to dense matrices by tensor contraction.
//!
//! Wires are indices of dimension 2. A Z-box is diagonal, so all wires
//! touching it share one index and it contributes a rank-one weight `[1, a]`.
//! The network is contracted pairwise, cheapest growth in total size first.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use num_complex::Complex64 as C64;

use crate::diagram::{Builder, Diagram, NodeKind, Port};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Default per-entry absolute tolerance for comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default limit on boundary wires.
pub const DEFAULT_QUBIT_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractionOrder {
    /// Greedy: smallest growth in total size first.
    Greedy,
    /// Left fold over tensors in node order. Only sensible for small diagrams.
    Sequential,
}

#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    pub qubit_cap: usize,
    pub t: Option<f64>,
    pub order: ContractionOrder,
    /// Largest intermediate tensor rank allowed before giving up.
    pub max_rank: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            qubit_cap: DEFAULT_QUBIT_CAP,
            t: None,
            order: ContractionOrder::Greedy,
            max_rank: 26,
        }
    }
}

/// Evaluates a constant diagram.
pub fn eval(d: &Diagram) -> Result<DenseMatrix> {
    eval_with(d, &EvalOptions::default())
}

/// Evaluates with every time-dependent label resolved at `t`.
pub fn eval_at(d: &Diagram, t: f64) -> Result<DenseMatrix> {
    eval_with(
        d,
        &EvalOptions {
            t: Some(t),
            ..EvalOptions::default()
        },
    )
}

#[derive(Clone, Debug)]
struct Tensor {
    vars: Vec<usize>,
    data: Vec<C64>,
}

impl Tensor {
    fn scalar(x: C64) -> Tensor {
        Tensor { vars: vec![], data: vec![x] }
    }

    fn rank(&self) -> usize {
        self.vars.len()
    }

    /// Builds a tensor whose legs may repeat a variable; repeated legs are
    /// restricted to the diagonal.
    fn from_legs(legs: Vec<usize>, data: Vec<C64>) -> Tensor {
        let mut vars: Vec<usize> = Vec::with_capacity(legs.len());
        for &v in &legs {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        if vars.len() == legs.len() {
            return Tensor { vars, data };
        }
        let pos: Vec<usize> = legs.iter().map(|v| vars.iter().position(|x| x == v).unwrap()).collect();
        let (n, k) = (legs.len(), vars.len());
        let data = (0..1usize << k)
            .map(|idx| {
                let old = pos
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (p, &q)| acc | ((idx >> (k - 1 - q)) & 1) << (n - 1 - p));
                data[old]
            })
            .collect();
        Tensor { vars, data }
    }

    fn sum_out(&self, v: usize) -> Tensor {
        let rest: Vec<usize> = self.vars.iter().copied().filter(|&x| x != v).collect();
        let one = offsets(&self.vars, &[v])[1];
        let data = offsets(&self.vars, &rest)
            .into_iter()
            .map(|o| self.data[o] + self.data[o + one])
            .collect();
        Tensor { vars: rest, data }
    }
}

/// Flat offsets for every assignment of `subset` (first var most significant)
/// within a tensor whose variables are `all`.
fn offsets(all: &[usize], subset: &[usize]) -> Vec<usize> {
    let n = all.len();
    let strides: Vec<usize> = subset
        .iter()
        .map(|v| {
            let pos = all.iter().position(|x| x == v).expect("variable present");
            1usize << (n - 1 - pos)
        })
        .collect();
    let k = subset.len();
    (0..1usize << k)
        .map(|idx| {
            strides
                .iter()
                .enumerate()
                .filter(|(b, _)| idx >> (k - 1 - b) & 1 == 1)
                .map(|(_, s)| s)
                .sum()
        })
        .collect()
}

/// Contracts `a` with `b`. Shared variables for which `keep` holds stay in
/// the result as batch indices; the other shared variables are summed.
fn contract(a: &Tensor, b: &Tensor, keep: impl Fn(usize) -> bool) -> Tensor {
    let shared: Vec<usize> = a.vars.iter().copied().filter(|v| b.vars.contains(v)).collect();
    let (batch, summed): (Vec<usize>, Vec<usize>) = shared.iter().partition(|&&v| keep(v));
    let a_free: Vec<usize> = a.vars.iter().copied().filter(|v| !shared.contains(v)).collect();
    let b_free: Vec<usize> = b.vars.iter().copied().filter(|v| !shared.contains(v)).collect();
    let ao_free = offsets(&a.vars, &a_free);
    let ao_sum = offsets(&a.vars, &summed);
    let bo_free = offsets(&b.vars, &b_free);
    let bo_sum = offsets(&b.vars, &summed);
    let (na, nb) = (ao_free.len(), bo_free.len());
    let mut data = vec![ZERO; (1 << batch.len()) * na * nb];
    let mut bm = vec![ZERO; bo_sum.len() * nb];
    for (t, (ab, bb)) in offsets(&a.vars, &batch).into_iter().zip(offsets(&b.vars, &batch)).enumerate() {
        // B restricted to this batch value, as a (summed × b_free) block.
        for (k, &bs) in bo_sum.iter().enumerate() {
            for (j, &bf) in bo_free.iter().enumerate() {
                bm[k * nb + j] = b.data[bb + bs + bf];
            }
        }
        let block = &mut data[t * na * nb..(t + 1) * na * nb];
        for (i, &af) in ao_free.iter().enumerate() {
            let row = &mut block[i * nb..(i + 1) * nb];
            for (k, &as_) in ao_sum.iter().enumerate() {
                let x = a.data[ab + af + as_];
                if x == ZERO {
                    continue;
                }
                for (r, &y) in row.iter_mut().zip(&bm[k * nb..(k + 1) * nb]) {
                    *r += x * y;
                }
            }
        }
    }
    let mut vars = batch;
    vars.extend(a_free);
    vars.extend(b_free);
    Tensor { vars, data }
}

/// Tensor network of a validated diagram. Every Z-box turns into a single
/// shared variable carrying a `[1, a]` weight; the open variables are listed
/// outputs first, then inputs, and may repeat.
struct Network {
    tensors: Vec<Option<Tensor>>,
    owners: Vec<Vec<usize>>,
    open: Vec<usize>,
    is_open: Vec<bool>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn network(d: &Diagram, t: Option<f64>) -> Result<Network> {
    let mut slot: HashMap<Port, usize> = HashMap::new();
    for (id, node) in d.nodes() {
        for s in 0..node.arity().max(1) {
            let k = slot.len();
            slot.insert(Port::new(id, s), k);
        }
    }
    let mut parent: Vec<usize> = (0..slot.len()).collect();
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        parent[ra] = rb;
    };
    for (id, node) in d.nodes() {
        if let NodeKind::ZBox(_) = node.kind {
            for s in 1..node.arity() {
                union(&mut parent, slot[&Port::new(id, 0)], slot[&Port::new(id, s)]);
            }
        }
    }
    for (a, b) in d.edges() {
        union(&mut parent, slot[&a], slot[&b]);
    }
    let mut var_of_root: HashMap<usize, usize> = HashMap::new();
    let mut var = |p: Port, parent: &mut Vec<usize>| {
        let r = find(parent, slot[&p]);
        let n = var_of_root.len();
        *var_of_root.entry(r).or_insert(n)
    };
    let mut tensors = Vec::new();
    for (id, node) in d.nodes() {
        let legs: Vec<usize> = (0..node.arity()).map(|s| var(Port::new(id, s), &mut parent)).collect();
        match node.kind {
            NodeKind::Input(_) | NodeKind::Output(_) => {}
            NodeKind::Hadamard => {
                let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                tensors.push(Tensor::from_legs(legs, vec![h, h, h, -h]));
            }
            NodeKind::W => {
                // index = apex·4 + fan1·2 + fan2
                let mut data = vec![ZERO; 8];
                data[0] = ONE;
                data[0b101] = ONE;
                data[0b110] = ONE;
                tensors.push(Tensor::from_legs(legs, data));
            }
            NodeKind::ZBox(label) => {
                let a = label.value(t)?;
                let v = var(Port::new(id, 0), &mut parent);
                tensors.push(Tensor { vars: vec![v], data: vec![ONE, a] });
            }
        }
    }
    let open: Vec<usize> = d
        .outputs()
        .iter()
        .chain(d.inputs())
        .map(|&b| var(Port::new(b, 0), &mut parent))
        .collect();
    let n_vars = var_of_root.len();
    let mut is_open = vec![false; n_vars];
    for &v in &open {
        is_open[v] = true;
    }
    let mut net = Network {
        tensors: Vec::new(),
        owners: vec![Vec::new(); n_vars],
        open,
        is_open,
    };
    for t in tensors {
        net.push(t);
    }
    net.sum_dangling();
    Ok(net)
}

impl Network {
    fn push(&mut self, t: Tensor) -> usize {
        let k = self.tensors.len();
        for &v in &t.vars {
            self.owners[v].push(k);
        }
        self.tensors.push(Some(t));
        k
    }

    fn sum_dangling_in(&mut self, k: usize) {
        let t = self.tensors[k].as_mut().unwrap();
        for v in t.vars.clone() {
            if !self.is_open[v] && self.owners[v] == [k] {
                *t = t.sum_out(v);
                self.owners[v].clear();
            }
        }
    }

    /// Sums out every closed variable held by a single tensor.
    fn sum_dangling(&mut self) {
        for k in 0..self.tensors.len() {
            if self.tensors[k].is_some() {
                self.sum_dangling_in(k);
            }
        }
    }

    fn keep(&self, v: usize) -> bool {
        self.is_open[v] || self.owners[v].len() > 2
    }

    fn result_rank(&self, i: usize, j: usize) -> usize {
        let (a, b) = (self.tensors[i].as_ref().unwrap(), self.tensors[j].as_ref().unwrap());
        let shared = a.vars.iter().filter(|v| b.vars.contains(v)).count();
        let summed = a.vars.iter().filter(|&&v| b.vars.contains(&v) && !self.keep(v)).count();
        a.rank() + b.rank() - shared - summed
    }

    /// Growth in total size if `i` and `j` were contracted.
    fn cost(&self, i: usize, j: usize) -> i128 {
        let size = |r: usize| 1i128 << r.min(120);
        let (a, b) = (self.tensors[i].as_ref().unwrap(), self.tensors[j].as_ref().unwrap());
        size(self.result_rank(i, j)) - size(a.rank()) - size(b.rank())
    }

    fn merge(&mut self, i: usize, j: usize) -> usize {
        let a = self.tensors[i].take().unwrap();
        let b = self.tensors[j].take().unwrap();
        let t = contract(&a, &b, |v| self.keep(v));
        for v in a.vars.iter().chain(&b.vars) {
            self.owners[*v].retain(|&x| x != i && x != j);
        }
        let k = self.push(t);
        self.sum_dangling_in(k);
        k
    }

    /// Outer product of whatever is left, then the open variables gathered
    /// into matrix order.
    fn finish(self, max_rank: usize, rows: usize, cols: usize) -> Result<DenseMatrix> {
        let mut rest: Vec<Tensor> = self.tensors.into_iter().flatten().collect();
        rest.sort_by_key(Tensor::rank);
        let mut acc = Tensor::scalar(ONE);
        for t in rest {
            if acc.rank() + t.rank() > max_rank {
                return Err(Error::IntermediateTooLarge {
                    rank: acc.rank() + t.rank(),
                    limit: max_rank,
                });
            }
            acc = contract(&acc, &t, |_| true);
        }
        let n = self.open.len();
        let data = (0..1usize << n)
            .map(|idx| {
                let bit = |p: usize| (idx >> (n - 1 - p)) & 1;
                let mut off = 0;
                for (p, &v) in self.open.iter().enumerate() {
                    if self.open[..p].iter().zip(0..).any(|(&w, q)| w == v && bit(q) != bit(p)) {
                        return ZERO;
                    }
                    if let Some(pos) = acc.vars.iter().position(|&x| x == v) {
                        off |= bit(p) << (acc.rank() - 1 - pos);
                    }
                }
                acc.data[off]
            })
            .collect();
        DenseMatrix::new(rows, cols, data)
    }
}

fn check_rank(rank: usize, max_rank: usize) -> Result<()> {
    if rank > max_rank {
        return Err(Error::IntermediateTooLarge { rank, limit: max_rank });
    }
    Ok(())
}

fn contract_greedy(net: &mut Network, max_rank: usize) -> Result<()> {
    let mut heap = BinaryHeap::new();
    for own in &net.owners {
        for (x, &i) in own.iter().enumerate() {
            for &j in &own[x + 1..] {
                heap.push(Reverse((net.cost(i, j), i.min(j), i.max(j))));
            }
        }
    }
    // Costs go stale as owner counts drop; they are re-checked on pop.
    while let Some(Reverse((cost, i, j))) = heap.pop() {
        if net.tensors[i].is_none() || net.tensors[j].is_none() {
            continue;
        }
        let fresh = net.cost(i, j);
        if fresh > cost {
            heap.push(Reverse((fresh, i, j)));
            continue;
        }
        check_rank(net.result_rank(i, j), max_rank)?;
        let k = net.merge(i, j);
        let mut near: Vec<usize> = net.tensors[k]
            .as_ref()
            .unwrap()
            .vars
            .iter()
            .flat_map(|&v| net.owners[v].iter().copied())
            .filter(|&o| o != k)
            .collect();
        near.sort_unstable();
        near.dedup();
        for o in near {
            heap.push(Reverse((net.cost(o, k), o, k)));
        }
    }
    Ok(())
}

fn contract_sequential(net: &mut Network, max_rank: usize) -> Result<()> {
    let live: Vec<usize> = (0..net.tensors.len()).filter(|&i| net.tensors[i].is_some()).collect();
    let Some((&first, rest)) = live.split_first() else { return Ok(()) };
    let mut acc = first;
    for &k in rest {
        check_rank(net.result_rank(acc, k), max_rank)?;
        acc = net.merge(acc, k);
    }
    Ok(())
}

pub fn eval_with(d: &Diagram, opts: &EvalOptions) -> Result<DenseMatrix> {
    d.validate().map_err(Error::Invalid)?;
    let boundary = d.n_inputs() + d.n_outputs();
    if boundary > opts.qubit_cap {
        return Err(Error::CapExceeded {
            found: boundary,
            cap: opts.qubit_cap,
        });
    }
    let mut net = network(d, opts.t)?;
    match opts.order {
        ContractionOrder::Greedy => contract_greedy(&mut net, opts.max_rank)?,
        ContractionOrder::Sequential => contract_sequential(&mut net, opts.max_rank)?,
    }
    net.finish(opts.max_rank, 1 << d.n_outputs(), 1 << d.n_inputs())
}

/// Outcome of comparing two matrices up to a global scalar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarEquivalence {
    pub equal: bool,
    /// `λ` with `a ≈ λ·b`.
    pub scalar: C64,
    /// `max |a − λ·b|`.
    pub residual: f64,
    /// Equal with `λ = 1`.
    pub exact: bool,
}

/// Finds `λ` from the largest-magnitude entry of `b` and checks `a ≈ λ·b`.
pub fn equal_up_to_scalar(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> Result<ScalarEquivalence> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    let direct = a.max_abs_diff(b);
    if direct <= tol {
        return Ok(ScalarEquivalence {
            equal: true,
            scalar: ONE,
            residual: direct,
            exact: true,
        });
    }
    let (k, bmax) = b
        .data()
        .iter()
        .enumerate()
        .map(|(i, x)| (i, x.norm()))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if bmax <= tol {
        // b is zero but a is not.
        return Ok(ScalarEquivalence {
            equal: false,
            scalar: ZERO,
            residual: a.max_abs(),
            exact: false,
        });
    }
    let lambda = a.data()[k] / b.data()[k];
    let residual = a.max_abs_diff(&b.scale(lambda));
    Ok(ScalarEquivalence {
        equal: residual <= tol * lambda.norm().max(1.0) && lambda.norm() > tol,
        scalar: lambda,
        residual,
        exact: false,
    })
}

/// Caps input `wire` with the basis state `|bit⟩`.
pub fn plug_basis(d: &Diagram, wire: usize, bit: bool) -> Result<Diagram> {
    if wire >= d.n_inputs() {
        return Err(Error::IndexOutOfRange {
            index: wire,
            bound: d.n_inputs(),
        });
    }
    let mut b = Builder::new();
    let mut ins = Vec::with_capacity(d.n_inputs());
    for k in 0..d.n_inputs() {
        if k == wire {
            ins.push(b.basis_state(bit));
        } else {
            ins.push(b.input());
        }
    }
    let outs = b.apply(d, &ins)?;
    b.outputs(outs);
    b.finish()
}
