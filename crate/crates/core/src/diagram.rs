//! The ZXW diagram data model: an undirected port graph of generators with
//! ordered input and output boundaries.
//!
//! Every node owns a fixed list of port slots and every slot is linked to
//! exactly one other slot. Boundary nodes (`Input`/`Output`) have a single
//! slot. The orientation of a node (which of its slots face the inputs) is
//! recorded for display and rewriting; it never changes the tensor a node
//! denotes.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type NodeId = usize;

/// One slot of one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Port {
    pub node: NodeId,
    pub slot: usize,
}

impl Port {
    pub fn new(node: NodeId, slot: usize) -> Self {
        Self { node, slot }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.node, self.slot)
    }
}

/// A phase `e^{i(coeff·t + offset)}` that depends linearly on the evolution time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct TimePhase {
    pub coeff: f64,
    pub offset: f64,
}

impl TimePhase {
    pub fn new(coeff: f64, offset: f64) -> Self {
        Self { coeff, offset }
    }

    pub fn angle(&self, t: f64) -> f64 {
        self.coeff * t + self.offset
    }

    pub fn value(&self, t: f64) -> C64 {
        C64::from_polar(1.0, self.angle(t))
    }
}

impl std::ops::Add for TimePhase {
    type Output = TimePhase;

    fn add(self, other: TimePhase) -> TimePhase {
        TimePhase::new(self.coeff + other.coeff, self.offset + other.offset)
    }
}

/// A Z-box label: either a constant or a unit-modulus phase linear in `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Label {
    Const(C64),
    Phase(TimePhase),
}

impl Label {
    pub fn constant(a: C64) -> Self {
        Label::Const(a)
    }

    pub fn one() -> Self {
        Label::Const(C64::new(1.0, 0.0))
    }

    pub fn value(&self, t: Option<f64>) -> Result<C64> {
        match (self, t) {
            (Label::Const(a), _) => Ok(*a),
            (Label::Phase(p), Some(t)) => Ok(p.value(t)),
            (Label::Phase(_), None) => Err(Error::UnresolvedParameter),
        }
    }

    pub fn as_const(&self) -> Option<C64> {
        match self {
            Label::Const(a) => Some(*a),
            Label::Phase(_) => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(C64::new(1.0, 0.0))
    }
}

/// The primitive generators.
///
/// `W` has three slots: slot 0 is the apex, slots 1 and 2 are the fan legs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeKind {
    ZBox(Label),
    Hadamard,
    W,
    Input(usize),
    Output(usize),
}

impl NodeKind {
    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::ZBox(_) => "zbox",
            NodeKind::Hadamard => "had",
            NodeKind::W => "w",
            NodeKind::Input(_) => "in",
            NodeKind::Output(_) => "out",
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, NodeKind::Input(_) | NodeKind::Output(_))
    }

    pub fn label(&self) -> Option<&Label> {
        match self {
            NodeKind::ZBox(l) => Some(l),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    /// Number of slots facing the input side. For a W node this is 1 when the
    /// apex is the input (the 1→2 generator) and 2 when it is flipped.
    pub n_in: usize,
    pub links: Vec<Option<Port>>,
    /// Provenance of derived generators, e.g. `"triangle"`.
    pub tag: Option<String>,
}

impl Node {
    pub fn arity(&self) -> usize {
        self.links.len()
    }

    pub fn n_out(&self) -> usize {
        self.links.len() - self.n_in
    }

    pub fn is_input_slot(&self, slot: usize) -> bool {
        match self.kind {
            NodeKind::W => {
                if self.n_in == 1 {
                    slot == 0
                } else {
                    slot != 0
                }
            }
            _ => slot < self.n_in,
        }
    }
}

/// A structural problem found by [`Diagram::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Defect {
    UnconnectedPort(Port),
    AsymmetricLink(Port, Port),
    MissingNode(Port),
    BadArity {
        node: NodeId,
        kind: &'static str,
        arity: usize,
    },
    BoundaryIndex {
        node: NodeId,
        expected: usize,
    },
    BoundaryListMismatch(NodeId),
    NonFiniteLabel(NodeId),
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::UnconnectedPort(p) => write!(f, "unconnected port {p}"),
            Defect::AsymmetricLink(a, b) => write!(f, "port {a} links to {b} but not back"),
            Defect::MissingNode(p) => write!(f, "link to missing port {p}"),
            Defect::BadArity { node, kind, arity } => {
                write!(f, "node {node} ({kind}) has illegal arity {arity}")
            }
            Defect::BoundaryIndex { node, expected } => {
                write!(f, "boundary node {node} should carry index {expected}")
            }
            Defect::BoundaryListMismatch(n) => write!(f, "node {n} is not a boundary of the listed kind"),
            Defect::NonFiniteLabel(n) => write!(f, "node {n} has a non-finite label"),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Diagram {
    nodes: Vec<Option<Node>>,
    inputs: Vec<NodeId>,
    outputs: Vec<NodeId>,
}

impl PartialEq for Diagram {
    /// Structural equality: same live node ids with identical contents, same boundaries.
    fn eq(&self, other: &Self) -> bool {
        self.inputs == other.inputs
            && self.outputs == other.outputs
            && self.node_ids().eq(other.node_ids())
            && self.node_ids().all(|id| self.nodes[id] == other.nodes[id])
    }
}

impl Diagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn inputs(&self) -> &[NodeId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id).and_then(Option::as_ref)
    }

    pub fn node_mut(&mut self, id: NodeId) -> Option<&mut Node> {
        self.nodes.get_mut(id).and_then(Option::as_mut)
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.as_ref().map(|_| i))
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.as_ref().map(|n| (i, n)))
    }

    /// Number of live nodes, boundaries included.
    pub fn node_count(&self) -> usize {
        self.nodes.iter().flatten().count()
    }

    /// Number of live generator (non-boundary) nodes.
    pub fn generator_count(&self) -> usize {
        self.nodes().filter(|(_, n)| !n.kind.is_boundary()).count()
    }

    /// Upper bound on node ids (exclusive).
    pub fn id_bound(&self) -> usize {
        self.nodes.len()
    }

    /// The slot on the other end of `p`, if attached.
    pub fn neighbor(&self, p: Port) -> Option<Port> {
        self.node(p.node)?.links.get(p.slot).copied().flatten()
    }

    /// Every edge once, as an ordered pair with the smaller port first.
    pub fn edges(&self) -> Vec<(Port, Port)> {
        let mut out = Vec::new();
        for (id, node) in self.nodes() {
            for (slot, link) in node.links.iter().enumerate() {
                let here = Port::new(id, slot);
                if let Some(there) = *link {
                    if here <= there {
                        out.push((here, there));
                    }
                }
            }
        }
        out
    }

    pub fn add_node(&mut self, kind: NodeKind, n_in: usize, arity: usize) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Some(Node {
            kind,
            n_in,
            links: vec![None; arity],
            tag: None,
        }));
        id
    }

    /// Inserts a node at a specific id (used by deserialization).
    pub(crate) fn insert_node(&mut self, id: NodeId, node: Node) {
        if self.nodes.len() <= id {
            self.nodes.resize(id + 1, None);
        }
        self.nodes[id] = Some(node);
    }

    pub(crate) fn set_boundaries(&mut self, inputs: Vec<NodeId>, outputs: Vec<NodeId>) {
        self.inputs = inputs;
        self.outputs = outputs;
    }

    pub fn add_input(&mut self) -> NodeId {
        let id = self.add_node(NodeKind::Input(self.inputs.len()), 0, 1);
        self.inputs.push(id);
        id
    }

    pub fn add_output(&mut self) -> NodeId {
        let id = self.add_node(NodeKind::Output(self.outputs.len()), 1, 1);
        self.outputs.push(id);
        id
    }

    /// Links two currently free slots.
    pub fn connect(&mut self, a: Port, b: Port) {
        debug_assert!(self.neighbor(a).is_none() && self.neighbor(b).is_none());
        debug_assert!(a != b, "cannot link a slot to itself");
        self.nodes[a.node].as_mut().expect("live node").links[a.slot] = Some(b);
        self.nodes[b.node].as_mut().expect("live node").links[b.slot] = Some(a);
    }

    pub fn disconnect(&mut self, a: Port) -> Option<Port> {
        let b = self.neighbor(a)?;
        self.nodes[a.node].as_mut()?.links[a.slot] = None;
        if let Some(n) = self.nodes[b.node].as_mut() {
            n.links[b.slot] = None;
        }
        Some(b)
    }

    /// Removes a non-boundary node, detaching its links.
    pub fn remove_node(&mut self, id: NodeId) -> Option<Node> {
        let node = self.nodes.get_mut(id)?.take()?;
        for link in node.links.iter().flatten() {
            if link.node != id {
                if let Some(n) = self.nodes[link.node].as_mut() {
                    n.links[link.slot] = None;
                }
            }
        }
        Some(node)
    }

    /// Replaces a two-slot node by a plain wire joining its neighbours.
    ///
    /// Returns `false` (leaving the diagram untouched) if the node links to itself.
    pub fn splice_out(&mut self, id: NodeId) -> bool {
        let Some(node) = self.node(id) else {
            return false;
        };
        assert_eq!(node.arity(), 2, "splice_out needs a two-slot node");
        let (a, b) = (node.links[0], node.links[1]);
        match (a, b) {
            (Some(a), Some(b)) if a.node != id && b.node != id => {
                self.remove_node(id);
                self.connect(a, b);
                true
            }
            _ => false,
        }
    }

    /// Checks the slot/link bijection, boundary numbering and label legality.
    pub fn validate(&self) -> std::result::Result<(), Vec<Defect>> {
        let mut defects = Vec::new();
        for (id, node) in self.nodes() {
            let kind_name = node.kind.name();
            let legal = match node.kind {
                NodeKind::Hadamard => node.arity() == 2 && node.n_in == 1,
                NodeKind::W => node.arity() == 3 && (node.n_in == 1 || node.n_in == 2),
                NodeKind::Input(_) | NodeKind::Output(_) => node.arity() == 1,
                NodeKind::ZBox(_) => node.n_in <= node.arity(),
            };
            if !legal {
                defects.push(Defect::BadArity {
                    node: id,
                    kind: kind_name,
                    arity: node.arity(),
                });
            }
            if let NodeKind::ZBox(label) = node.kind {
                let finite = match label {
                    Label::Const(a) => a.re.is_finite() && a.im.is_finite(),
                    Label::Phase(p) => p.coeff.is_finite() && p.offset.is_finite(),
                };
                if !finite {
                    defects.push(Defect::NonFiniteLabel(id));
                }
            }
            for (slot, link) in node.links.iter().enumerate() {
                let here = Port::new(id, slot);
                match link {
                    None => defects.push(Defect::UnconnectedPort(here)),
                    Some(there) => match self.node(there.node) {
                        Some(n) if there.slot < n.arity() => {
                            if n.links[there.slot] != Some(here) {
                                defects.push(Defect::AsymmetricLink(here, *there));
                            }
                        }
                        _ => defects.push(Defect::MissingNode(*there)),
                    },
                }
            }
        }
        let mut seen_in = 0;
        let mut seen_out = 0;
        for (_, node) in self.nodes() {
            match node.kind {
                NodeKind::Input(_) => seen_in += 1,
                NodeKind::Output(_) => seen_out += 1,
                _ => {}
            }
        }
        for (pos, &id) in self.inputs.iter().enumerate() {
            match self.node(id).map(|n| n.kind) {
                Some(NodeKind::Input(k)) if k == pos => {}
                Some(NodeKind::Input(_)) => defects.push(Defect::BoundaryIndex { node: id, expected: pos }),
                _ => defects.push(Defect::BoundaryListMismatch(id)),
            }
        }
        for (pos, &id) in self.outputs.iter().enumerate() {
            match self.node(id).map(|n| n.kind) {
                Some(NodeKind::Output(k)) if k == pos => {}
                Some(NodeKind::Output(_)) => defects.push(Defect::BoundaryIndex { node: id, expected: pos }),
                _ => defects.push(Defect::BoundaryListMismatch(id)),
            }
        }
        if seen_in != self.inputs.len() || seen_out != self.outputs.len() {
            for (id, node) in self.nodes() {
                let listed = match node.kind {
                    NodeKind::Input(_) => self.inputs.contains(&id),
                    NodeKind::Output(_) => self.outputs.contains(&id),
                    _ => true,
                };
                if !listed {
                    defects.push(Defect::BoundaryListMismatch(id));
                }
            }
        }
        if defects.is_empty() {
            Ok(())
        } else {
            Err(defects)
        }
    }

    /// Vertical flip: inputs become outputs and every node's orientation is reversed.
    /// Evaluates to the transpose.
    pub fn transpose(&self) -> Diagram {
        // Z-box slots are reordered so that former outputs come first.
        let perm = |node: &Node, slot: usize| -> usize {
            match node.kind {
                NodeKind::ZBox(_) => {
                    let n_out = node.n_out();
                    if slot < node.n_in {
                        slot + n_out
                    } else {
                        slot - node.n_in
                    }
                }
                _ => slot,
            }
        };
        let mut d = self.clone();
        for (id, node) in self.nodes() {
            let new = d.nodes[id].as_mut().unwrap();
            for (slot, link) in node.links.iter().enumerate() {
                new.links[perm(node, slot)] = link.map(|p| {
                    let other = self.node(p.node).expect("live neighbour");
                    Port::new(p.node, perm(other, p.slot))
                });
            }
            match node.kind {
                NodeKind::Input(k) => {
                    new.kind = NodeKind::Output(k);
                    new.n_in = 1;
                }
                NodeKind::Output(k) => {
                    new.kind = NodeKind::Input(k);
                    new.n_in = 0;
                }
                NodeKind::W => new.n_in = 3 - node.n_in,
                NodeKind::Hadamard => {}
                NodeKind::ZBox(_) => new.n_in = node.n_out(),
            }
        }
        std::mem::swap(&mut d.inputs, &mut d.outputs);
        d
    }

    /// True if any Z-box label depends on `t`.
    pub fn is_parametric(&self) -> bool {
        self.nodes()
            .any(|(_, n)| matches!(n.kind, NodeKind::ZBox(Label::Phase(_))))
    }

    /// Substitutes a concrete `t` into every time-dependent label.
    pub fn resolve(&self, t: f64) -> Diagram {
        let mut d = self.clone();
        for node in d.nodes.iter_mut().flatten() {
            if let NodeKind::ZBox(Label::Phase(p)) = node.kind {
                node.kind = NodeKind::ZBox(Label::Const(p.value(t)));
            }
        }
        d
    }

    /// Renumbers node ids densely, preserving relative order.
    pub fn compacted(&self) -> Diagram {
        let map: BTreeMap<NodeId, NodeId> = self.node_ids().enumerate().map(|(new, old)| (old, new)).collect();
        let mut out = Diagram::new();
        for (old, node) in self.nodes() {
            let mut node = node.clone();
            for link in node.links.iter_mut().flatten() {
                link.node = map[&link.node];
            }
            out.insert_node(map[&old], node);
        }
        out.inputs = self.inputs.iter().map(|i| map[i]).collect();
        out.outputs = self.outputs.iter().map(|i| map[i]).collect();
        out
    }
}

/// Incremental construction with open wire ends.
///
/// A "wire end" is a free slot on some node. Generator helpers consume wire
/// ends and return new ones; [`Builder::finish`] validates that every slot was
/// used.
#[derive(Debug, Default)]
pub struct Builder {
    d: Diagram,
    tag: Option<String>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs `f` with every created node tagged as `tag`. An enclosing tag wins,
    /// so a triangle inside an And-box is tagged `and`.
    pub fn tagged<R>(&mut self, tag: &str, f: impl FnOnce(&mut Builder) -> R) -> R {
        if self.tag.is_some() {
            return f(self);
        }
        self.tag = Some(tag.to_string());
        let r = f(self);
        self.tag = None;
        r
    }

    fn node(&mut self, kind: NodeKind, n_in: usize, arity: usize) -> NodeId {
        let id = self.d.add_node(kind, n_in, arity);
        if !kind.is_boundary() {
            self.d.nodes[id].as_mut().unwrap().tag = self.tag.clone();
        }
        id
    }

    pub fn input(&mut self) -> Port {
        Port::new(self.d.add_input(), 0)
    }

    pub fn inputs(&mut self, n: usize) -> Vec<Port> {
        (0..n).map(|_| self.input()).collect()
    }

    pub fn output(&mut self, p: Port) {
        let o = self.d.add_output();
        self.d.connect(p, Port::new(o, 0));
    }

    pub fn outputs(&mut self, ps: impl IntoIterator<Item = Port>) {
        for p in ps {
            self.output(p);
        }
    }

    /// Joins two open ends with a plain wire.
    pub fn join(&mut self, a: Port, b: Port) {
        self.d.connect(a, b);
    }

    /// A Z-box with the given wire ends as inputs and `n_out` fresh outputs.
    pub fn zbox(&mut self, label: Label, ins: &[Port], n_out: usize) -> Vec<Port> {
        let id = self.node(NodeKind::ZBox(label), ins.len(), ins.len() + n_out);
        for (slot, &p) in ins.iter().enumerate() {
            self.d.connect(p, Port::new(id, slot));
        }
        (ins.len()..ins.len() + n_out).map(|s| Port::new(id, s)).collect()
    }

    pub fn zbox_c(&mut self, a: C64, ins: &[Port], n_out: usize) -> Vec<Port> {
        self.zbox(Label::Const(a), ins, n_out)
    }

    /// Z-box 1→1 (the diagonal `diag(1, a)`).
    pub fn zbox1(&mut self, a: C64, p: Port) -> Port {
        self.zbox_c(a, &[p], 1)[0]
    }

    /// Z-box effect `⟨0| + a⟨1|` on several wires at once (one node).
    pub fn zbox_effect(&mut self, a: C64, ins: &[Port]) {
        self.zbox_c(a, ins, 0);
    }

    /// Z-box state `|0…0⟩ + a|1…1⟩` on `n` fresh wires.
    pub fn zbox_state(&mut self, a: C64, n: usize) -> Vec<Port> {
        self.zbox_c(a, &[], n)
    }

    /// A 0-ary scalar node worth `s` (a Z-box with label `s − 1`).
    pub fn scalar(&mut self, s: C64) {
        self.tagged("scalar", |b| {
            b.zbox_c(s - C64::new(1.0, 0.0), &[], 0);
        });
    }

    /// Copies a computational-basis wire into `n` wires (Z-box with label 1).
    pub fn copy(&mut self, p: Port, n: usize) -> Vec<Port> {
        self.zbox_c(C64::new(1.0, 0.0), &[p], n)
    }

    pub fn had(&mut self, p: Port) -> Port {
        let id = self.node(NodeKind::Hadamard, 1, 2);
        self.d.connect(p, Port::new(id, 0));
        Port::new(id, 1)
    }

    /// The 1→2 W generator: returns the two fan legs.
    pub fn w(&mut self, p: Port) -> (Port, Port) {
        let id = self.node(NodeKind::W, 1, 3);
        self.d.connect(p, Port::new(id, 0));
        (Port::new(id, 1), Port::new(id, 2))
    }

    /// The flipped 2→1 W generator.
    pub fn w_merge(&mut self, a: Port, b: Port) -> Port {
        let id = self.node(NodeKind::W, 2, 3);
        self.d.connect(a, Port::new(id, 1));
        self.d.connect(b, Port::new(id, 2));
        Port::new(id, 0)
    }

    /// Inlines `sub`, feeding its inputs from `ins` and returning its output ends.
    pub fn apply(&mut self, sub: &Diagram, ins: &[Port]) -> Result<Vec<Port>> {
        if ins.len() != sub.n_inputs() {
            return Err(Error::ArityMismatch {
                outputs: ins.len(),
                inputs: sub.n_inputs(),
            });
        }
        // Copy every generator node.
        let mut map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        for (id, node) in sub.nodes() {
            if node.kind.is_boundary() {
                continue;
            }
            let new = self.d.add_node(node.kind, node.n_in, node.arity());
            self.d.nodes[new].as_mut().unwrap().tag = self.tag.clone().or_else(|| node.tag.clone());
            map.insert(id, new);
        }
        for (a, b) in sub.edges() {
            if let (Some(&na), Some(&nb)) = (map.get(&a.node), map.get(&b.node)) {
                self.d.connect(Port::new(na, a.slot), Port::new(nb, b.slot));
            }
        }
        let input_pos: BTreeMap<NodeId, usize> = sub.inputs.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let output_pos: BTreeMap<NodeId, usize> = sub.outputs.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut outs: Vec<Option<Port>> = vec![None; sub.n_outputs()];
        for (i, &inp) in sub.inputs.iter().enumerate() {
            let there = sub.neighbor(Port::new(inp, 0)).ok_or_else(|| {
                Error::Invalid(vec![Defect::UnconnectedPort(Port::new(inp, 0))])
            })?;
            if let Some(&nn) = map.get(&there.node) {
                self.d.connect(ins[i], Port::new(nn, there.slot));
            } else if let Some(&j) = output_pos.get(&there.node) {
                outs[j] = Some(ins[i]);
            } else if let Some(&k) = input_pos.get(&there.node) {
                // A cup inside `sub`: join the two feeding ends once.
                if i < k {
                    self.d.connect(ins[i], ins[k]);
                }
            }
        }
        for (j, &out) in sub.outputs.iter().enumerate() {
            if outs[j].is_some() {
                continue;
            }
            let there = sub.neighbor(Port::new(out, 0)).ok_or_else(|| {
                Error::Invalid(vec![Defect::UnconnectedPort(Port::new(out, 0))])
            })?;
            if let Some(&nn) = map.get(&there.node) {
                outs[j] = Some(Port::new(nn, there.slot));
            } else if let Some(&k) = output_pos.get(&there.node) {
                // A cap inside `sub`: materialise it as a two-legged identity Z-box.
                if j < k {
                    let legs = self.tagged("cap", |b| b.zbox_state(C64::new(1.0, 0.0), 2));
                    outs[j] = Some(legs[0]);
                    outs[k] = Some(legs[1]);
                }
            }
        }
        outs.into_iter()
            .enumerate()
            .map(|(j, p)| p.ok_or_else(|| Error::Invalid(vec![Defect::UnconnectedPort(Port::new(sub.outputs[j], 0))])))
            .collect()
    }

    /// Validates and returns the diagram.
    pub fn finish(self) -> Result<Diagram> {
        self.d.validate().map_err(Error::Invalid)?;
        Ok(self.d)
    }

    /// Returns the diagram without validation (may contain dangling slots).
    pub fn into_unchecked(self) -> Diagram {
        self.d
    }
}

/// Builds a single primitive generator with boundaries attached.
pub fn make_generator(kind: NodeKind, n_in: usize, n_out: usize) -> Result<Diagram> {
    let illegal = || Error::IllegalArity {
        kind: kind.name(),
        n_in,
        n_out,
    };
    let mut b = Builder::new();
    match kind {
        NodeKind::Hadamard => {
            if (n_in, n_out) != (1, 1) {
                return Err(illegal());
            }
            let i = b.input();
            let o = b.had(i);
            b.output(o);
        }
        NodeKind::W => match (n_in, n_out) {
            (1, 2) => {
                let i = b.input();
                let (x, y) = b.w(i);
                b.outputs([x, y]);
            }
            (2, 1) => {
                let ins = b.inputs(2);
                let o = b.w_merge(ins[0], ins[1]);
                b.output(o);
            }
            _ => return Err(illegal()),
        },
        NodeKind::ZBox(label) => {
            if n_in + n_out == 0 {
                return Err(illegal());
            }
            let ins = b.inputs(n_in);
            let outs = b.zbox(label, &ins, n_out);
            b.outputs(outs);
        }
        NodeKind::Input(_) | NodeKind::Output(_) => return Err(illegal()),
    }
    b.finish()
}

/// Sequential composition: `f` first, then `g`. Evaluates to `eval(g)·eval(f)`.
pub fn compose_seq(f: &Diagram, g: &Diagram) -> Result<Diagram> {
    if f.n_outputs() != g.n_inputs() {
        return Err(Error::ArityMismatch {
            outputs: f.n_outputs(),
            inputs: g.n_inputs(),
        });
    }
    let mut b = Builder::new();
    let ins = b.inputs(f.n_inputs());
    let mid = b.apply(f, &ins)?;
    let outs = b.apply(g, &mid)?;
    b.outputs(outs);
    b.finish()
}

/// Parallel composition with concatenated boundaries. Evaluates to `eval(f) ⊗ eval(g)`.
pub fn compose_par(f: &Diagram, g: &Diagram) -> Result<Diagram> {
    let mut b = Builder::new();
    let fi = b.inputs(f.n_inputs());
    let gi = b.inputs(g.n_inputs());
    let mut outs = b.apply(f, &fi)?;
    outs.extend(b.apply(g, &gi)?);
    b.outputs(outs);
    b.finish()
}

/// Composes a non-empty list sequentially, first element applied first.
pub fn compose_all<'a>(parts: impl IntoIterator<Item = &'a Diagram>) -> Result<Diagram> {
    let mut it = parts.into_iter();
    let first = it.next().ok_or(Error::Precondition("nothing to compose".into()))?.clone();
    it.try_fold(first, |acc, d| compose_seq(&acc, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_arity_rules() {
        assert!(make_generator(NodeKind::Hadamard, 1, 1).is_ok());
        assert!(make_generator(NodeKind::Hadamard, 2, 1).is_err());
        assert!(make_generator(NodeKind::W, 1, 2).is_ok());
        assert!(make_generator(NodeKind::W, 2, 1).is_ok());
        assert!(make_generator(NodeKind::W, 1, 3).is_err());
        assert!(make_generator(NodeKind::ZBox(Label::one()), 0, 0).is_err());
        assert!(make_generator(NodeKind::ZBox(Label::one()), 0, 5).is_ok());
    }

    #[test]
    fn dangling_port_is_reported() {
        let mut b = Builder::new();
        let i = b.input();
        let _ = b.zbox_c(C64::new(1.0, 0.0), &[i], 2);
        let err = b.finish().unwrap_err();
        match err {
            Error::Invalid(defects) => {
                assert_eq!(defects.len(), 2);
                assert!(defects[0].to_string().starts_with("unconnected port"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn well_formed_zbox_validates() {
        let d = make_generator(NodeKind::ZBox(Label::one()), 2, 3).unwrap();
        assert!(d.validate().is_ok());
        assert_eq!(d.n_inputs(), 2);
        assert_eq!(d.n_outputs(), 3);
    }

    #[test]
    fn splice_removes_identity_node() {
        let mut b = Builder::new();
        let i = b.input();
        let m = b.zbox1(C64::new(1.0, 0.0), i);
        b.output(m);
        let mut d = b.finish().unwrap();
        let z = d.node_ids().find(|&id| !d.node(id).unwrap().kind.is_boundary()).unwrap();
        assert!(d.splice_out(z));
        assert!(d.validate().is_ok());
        assert_eq!(d.generator_count(), 0);
    }

    #[test]
    fn compose_checks_arity() {
        let h = make_generator(NodeKind::Hadamard, 1, 1).unwrap();
        let w = make_generator(NodeKind::W, 1, 2).unwrap();
        assert!(compose_seq(&w, &h).is_err());
        assert!(compose_seq(&h, &w).is_ok());
    }

    #[test]
    fn transpose_swaps_boundaries() {
        let w = make_generator(NodeKind::W, 1, 2).unwrap();
        let wt = w.transpose();
        assert_eq!(wt.n_inputs(), 2);
        assert_eq!(wt.n_outputs(), 1);
        assert!(wt.validate().is_ok());
    }
}
