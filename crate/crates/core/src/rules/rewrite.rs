//! Directed rewrites for a small rule subset, matched on one- or two-node
//! neighbourhoods.

use num_complex::Complex64 as C64;

use crate::diagram::{Diagram, Label, NodeId, NodeKind, Port};

const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct RewriteStep {
    pub rule: &'static str,
    /// A node the rewrite was anchored at (ids refer to the diagram at that step).
    pub node: NodeId,
}

/// Result of [`simplify_basic`]: `eval(before) = scalar · eval(diagram)`.
#[derive(Clone, Debug)]
pub struct Simplified {
    pub diagram: Diagram,
    pub scalar: C64,
    pub trace: Vec<RewriteStep>,
}

fn zbox_label(d: &Diagram, id: NodeId) -> Option<Label> {
    match d.node(id)?.kind {
        NodeKind::ZBox(l) => Some(l),
        _ => None,
    }
}

fn fused_label(a: Label, b: Label) -> Option<Label> {
    match (a, b) {
        (Label::Const(x), Label::Const(y)) => Some(Label::Const(x * y)),
        (Label::Phase(x), Label::Phase(y)) => Some(Label::Phase(x + y)),
        _ => None,
    }
}

/// Neighbour ports of `id` that lie outside the node set `skip`, input-side slots first.
fn outer_links(d: &Diagram, id: NodeId, skip: &[NodeId]) -> (Vec<Port>, Vec<Port>) {
    let node = d.node(id).expect("live node");
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for (slot, link) in node.links.iter().enumerate() {
        let p = link.expect("validated diagram");
        if skip.contains(&p.node) {
            continue;
        }
        if node.is_input_slot(slot) {
            ins.push(p);
        } else {
            outs.push(p);
        }
    }
    (ins, outs)
}

/// Replaces the nodes in `old` by one Z-box wired to `ins` then `outs`.
fn replace_with_zbox(d: &mut Diagram, old: &[NodeId], label: Label, ins: Vec<Port>, outs: Vec<Port>) -> NodeId {
    let tag = d.node(old[0]).and_then(|n| n.tag.clone());
    for &id in old {
        d.remove_node(id);
    }
    let n_in = ins.len();
    let id = d.add_node(NodeKind::ZBox(label), n_in, n_in + outs.len());
    d.node_mut(id).unwrap().tag = tag;
    for (slot, p) in ins.into_iter().chain(outs).enumerate() {
        d.connect(p, Port::new(id, slot));
    }
    id
}

fn find_self_loop(d: &Diagram) -> Option<NodeId> {
    d.nodes()
        .find(|(id, n)| {
            matches!(n.kind, NodeKind::ZBox(_)) && n.links.iter().flatten().any(|p| p.node == *id)
        })
        .map(|(id, _)| id)
}

fn remove_self_loops(d: &mut Diagram, id: NodeId) {
    let label = zbox_label(d, id).unwrap();
    let (ins, outs) = outer_links(d, id, &[id]);
    replace_with_zbox(d, &[id], label, ins, outs);
}

fn find_fusable(d: &Diagram) -> Option<(NodeId, NodeId)> {
    for (u, node) in d.nodes() {
        let Some(lu) = node.kind.label() else { continue };
        for p in node.links.iter().flatten() {
            if p.node == u {
                continue;
            }
            if let Some(lv) = zbox_label(d, p.node) {
                if fused_label(*lu, lv).is_some() {
                    return Some((u, p.node));
                }
            }
        }
    }
    None
}

fn fuse(d: &mut Diagram, u: NodeId, v: NodeId) -> NodeId {
    let label = fused_label(zbox_label(d, u).unwrap(), zbox_label(d, v).unwrap()).unwrap();
    let (mut ins, mut outs) = outer_links(d, u, &[u, v]);
    let (vi, vo) = outer_links(d, v, &[u, v]);
    ins.extend(vi);
    outs.extend(vo);
    replace_with_zbox(d, &[u, v], label, ins, outs)
}

/// A two-legged Z-box with label 1 that is not a loop.
fn find_trivial_zbox(d: &Diagram) -> Option<NodeId> {
    d.nodes()
        .find(|(id, n)| {
            matches!(n.kind, NodeKind::ZBox(l) if l.is_one())
                && n.arity() == 2
                && n.links.iter().flatten().all(|p| p.node != *id)
        })
        .map(|(id, _)| id)
}

fn fusion_step(d: &mut Diagram, trace: &mut Vec<RewriteStep>) -> bool {
    if let Some(id) = find_self_loop(d) {
        remove_self_loops(d, id);
        trace.push(RewriteStep { rule: "S1", node: id });
        return true;
    }
    if let Some((u, v)) = find_fusable(d) {
        fuse(d, u, v);
        trace.push(RewriteStep { rule: "S1", node: u });
        return true;
    }
    if let Some(id) = find_trivial_zbox(d) {
        d.splice_out(id);
        trace.push(RewriteStep { rule: "S2", node: id });
        return true;
    }
    false
}

/// Fuses adjacent Z-boxes and drops identity Z-boxes until nothing changes.
/// The result evaluates to exactly the same matrix.
pub fn apply_fusion(d: &Diagram) -> Diagram {
    let mut d = d.clone();
    let mut trace = Vec::new();
    while fusion_step(&mut d, &mut trace) {}
    d.compacted()
}

fn is_kind(d: &Diagram, id: NodeId, f: fn(&NodeKind) -> bool) -> bool {
    d.node(id).is_some_and(|n| f(&n.kind))
}

/// Two Hadamards in a row (not forming a closed loop).
fn h2_step(d: &mut Diagram) -> Option<NodeId> {
    let (h, g, outer, far) = find_h2(d)?;
    d.remove_node(h);
    d.remove_node(g);
    d.connect(outer, far);
    Some(h)
}

fn find_h2(d: &Diagram) -> Option<(NodeId, NodeId, Port, Port)> {
    for (h, node) in d.nodes() {
        if node.kind != NodeKind::Hadamard {
            continue;
        }
        let (Some(a), Some(b)) = (node.links[0], node.links[1]) else { continue };
        for (next, outer) in [(b, a), (a, b)] {
            if next.node == h || !is_kind(d, next.node, |k| *k == NodeKind::Hadamard) {
                continue;
            }
            let Some(far) = d.neighbor(Port::new(next.node, 1 - next.slot)) else { continue };
            if far.node == h || far.node == next.node {
                continue;
            }
            return Some((h, next.node, outer, far));
        }
    }
    None
}

/// Two Hadamard edges between the same pair of distinct Z-boxes are removed;
/// they contributed a factor 1/2.
fn hopf_step(d: &mut Diagram) -> Option<NodeId> {
    let (u, h1, h2, v) = find_hopf(d)?;
    let lu = zbox_label(d, u).unwrap();
    let lv = zbox_label(d, v).unwrap();
    let (ui, uo) = outer_links(d, u, &[h1, h2]);
    let (vi, vo) = outer_links(d, v, &[h1, h2]);
    d.remove_node(h1);
    d.remove_node(h2);
    // Rebuild both boxes without the two removed legs.
    replace_with_zbox(d, &[u], lu, ui, uo);
    replace_with_zbox(d, &[v], lv, vi, vo);
    Some(u)
}

fn find_hopf(d: &Diagram) -> Option<(NodeId, NodeId, NodeId, NodeId)> {
    for (u, node) in d.nodes() {
        if !matches!(node.kind, NodeKind::ZBox(_)) {
            continue;
        }
        // (hadamard id, far z-box id) for every Hadamard edge leaving u.
        let mut hedges: Vec<(NodeId, NodeId)> = Vec::new();
        for p in node.links.iter().flatten() {
            if !is_kind(d, p.node, |k| *k == NodeKind::Hadamard) {
                continue;
            }
            let Some(far) = d.neighbor(Port::new(p.node, 1 - p.slot)) else { continue };
            if far.node != u && is_kind(d, far.node, |k| matches!(k, NodeKind::ZBox(_))) {
                hedges.push((p.node, far.node));
            }
        }
        for i in 0..hedges.len() {
            for j in i + 1..hedges.len() {
                let v = hedges[i].1;
                let adjacent = node.links.iter().flatten().any(|p| p.node == v);
                if v == hedges[j].1 && hedges[i].0 != hedges[j].0 && !adjacent {
                    return Some((u, hedges[i].0, hedges[j].0, hedges[i].1));
                }
            }
        }
    }
    None
}

/// Cap label of a triangle whose W node is `w` with the closed fan leg on `fan`.
fn triangle_cap(d: &Diagram, w: NodeId, fan: usize) -> Option<(NodeId, C64)> {
    let p = d.neighbor(Port::new(w, fan))?;
    let n = d.node(p.node)?;
    match n.kind {
        NodeKind::ZBox(Label::Const(c)) if n.arity() == 1 => Some((p.node, c)),
        _ => None,
    }
}

/// Two chained triangles whose cap labels cancel become a wire.
fn inv_step(d: &mut Diagram) -> Option<NodeId> {
    let ([w1, w2, cap1, cap2], p, q) = find_inv(d)?;
    for id in [w1, w2, cap1, cap2] {
        d.remove_node(id);
    }
    d.connect(p, q);
    Some(w1)
}

fn find_inv(d: &Diagram) -> Option<([NodeId; 4], Port, Port)> {
    for (w1, node) in d.nodes() {
        if node.kind != NodeKind::W {
            continue;
        }
        for closed in [1, 2] {
            let open = 3 - closed;
            let Some((cap1, c)) = triangle_cap(d, w1, closed) else { continue };
            let Some(mid) = d.neighbor(Port::new(w1, open)) else { continue };
            if mid.slot != 0 || mid.node == w1 || !is_kind(d, mid.node, |k| *k == NodeKind::W) {
                continue;
            }
            let w2 = mid.node;
            for closed2 in [1, 2] {
                let Some((cap2, e)) = triangle_cap(d, w2, closed2) else { continue };
                if (c + e).norm() > 1e-14 {
                    continue;
                }
                let (Some(p), Some(q)) = (d.neighbor(Port::new(w1, 0)), d.neighbor(Port::new(w2, 3 - closed2))) else {
                    continue;
                };
                if [w1, w2].contains(&p.node) || [w1, w2].contains(&q.node) {
                    continue;
                }
                return Some(([w1, w2, cap1, cap2], p, q));
            }
        }
    }
    None
}

/// A constant 0-ary Z-box, removed into the global scalar.
fn scalar_step(d: &mut Diagram) -> Option<(NodeId, C64)> {
    let (id, a) = d.nodes().find_map(|(id, n)| match n.kind {
        NodeKind::ZBox(Label::Const(a)) if n.arity() == 0 => Some((id, a)),
        _ => None,
    })?;
    d.remove_node(id);
    Some((id, ONE + a))
}

/// Applies S1, S2, H2, Hopf, Inv and scalar removal until none matches.
///
/// Every step either removes a node or removes legs, so the loop terminates.
pub fn simplify_basic(d: &Diagram) -> Simplified {
    let mut d = d.clone();
    let mut scalar = ONE;
    let mut trace = Vec::new();
    loop {
        if fusion_step(&mut d, &mut trace) {
            continue;
        }
        if let Some(id) = h2_step(&mut d) {
            trace.push(RewriteStep { rule: "H2", node: id });
            continue;
        }
        if let Some(id) = hopf_step(&mut d) {
            scalar *= 0.5;
            trace.push(RewriteStep { rule: "Hopf", node: id });
            continue;
        }
        if let Some(id) = inv_step(&mut d) {
            trace.push(RewriteStep { rule: "Inv", node: id });
            continue;
        }
        if let Some((id, s)) = scalar_step(&mut d) {
            scalar *= s;
            trace.push(RewriteStep { rule: "Ept", node: id });
            continue;
        }
        break;
    }
    Simplified {
        diagram: d.compacted(),
        scalar,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{compose_seq, Builder};
    use crate::eval::eval;
    use crate::generators as g;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn chain_of_three_fuses_to_one() {
        let mut b = Builder::new();
        let i = b.input();
        let x = b.zbox1(c(2.0), i);
        let y = b.zbox1(c(3.0), x);
        let z = b.zbox1(c(5.0), y);
        b.output(z);
        let d = b.finish().unwrap();
        let f = apply_fusion(&d);
        assert_eq!(f.generator_count(), 1);
        let (_, n) = f.nodes().find(|(_, n)| !n.kind.is_boundary()).unwrap();
        assert_eq!(n.kind, NodeKind::ZBox(Label::Const(c(30.0))));
    }

    #[test]
    fn no_adjacent_spiders_unchanged() {
        let d = g::hadamard();
        assert_eq!(apply_fusion(&d), d.compacted());
    }

    #[test]
    fn inverse_triangles_cancel() {
        let d = compose_seq(&g::triangle(), &g::triangle_inv()).unwrap();
        let s = simplify_basic(&d);
        assert_eq!(s.diagram.generator_count(), 0);
        assert_eq!(s.scalar, ONE);
        assert!(s.trace.iter().any(|t| t.rule == "Inv"));
    }

    #[test]
    fn isolated_scalar_removed() {
        let d = g::zbox(ONE, 0, 0);
        let s = simplify_basic(&d);
        assert_eq!(s.diagram.generator_count(), 0);
        assert_eq!(s.scalar, c(2.0));
    }

    #[test]
    fn double_hadamard_removed() {
        let d = compose_seq(&g::hadamard(), &g::hadamard()).unwrap();
        let s = simplify_basic(&d);
        assert_eq!(s.diagram.generator_count(), 0);
        assert_eq!(s.trace[0].rule, "H2");
    }

    #[test]
    fn hadamard_loop_left_alone() {
        // Two Hadamards forming a closed loop are worth tr(I) = 2.
        let mut d = Diagram::new();
        let h1 = d.add_node(NodeKind::Hadamard, 1, 2);
        let h2 = d.add_node(NodeKind::Hadamard, 1, 2);
        d.connect(Port::new(h1, 1), Port::new(h2, 0));
        d.connect(Port::new(h2, 1), Port::new(h1, 0));
        assert!(h2_step(&mut d.clone()).is_none());
        assert!((eval(&d).unwrap()[(0, 0)] - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn hopf_disconnects() {
        let mut b = Builder::new();
        let i = b.input();
        let u = b.zbox_c(c(2.0), &[i], 2);
        let h1 = b.had(u[0]);
        let h2 = b.had(u[1]);
        let v = b.zbox_c(c(-1.5), &[h1, h2], 1);
        b.output(v[0]);
        let d = b.finish().unwrap();
        let s = simplify_basic(&d);
        let before = eval(&d).unwrap();
        let after = eval(&s.diagram).unwrap().scale(s.scalar);
        assert!(before.max_abs_diff(&after) < 1e-12);
        assert!(s.trace.iter().any(|t| t.rule == "Hopf"));
    }
}
