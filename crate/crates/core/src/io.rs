//! JSON and DOT serialization of diagrams.
//!
//! The JSON layout is
//! `{"nodes":[{"id","kind","a"?}], "edges":[[[id,slot],[id,slot]]], "inputs":[ids], "outputs":[ids]}`
//! with three optional node fields: `n_in` (slots facing the inputs, omitted
//! when it is the default for the kind), `t` (`[coeff, offset]` for a label
//! `e^{i(coeff·t + offset)}`, replacing `a`) and `tag`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, Label, Node, NodeId, NodeKind, Port, TimePhase};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct JsonNode {
    id: NodeId,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tag: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonDiagram {
    nodes: Vec<JsonNode>,
    edges: Vec<[[usize; 2]; 2]>,
    inputs: Vec<NodeId>,
    outputs: Vec<NodeId>,
}

fn default_n_in(kind: &NodeKind, arity: usize) -> usize {
    match kind {
        NodeKind::Input(_) => 0,
        NodeKind::Output(_) | NodeKind::Hadamard | NodeKind::W => 1,
        NodeKind::ZBox(_) => arity,
    }
}

fn to_json_value(d: &Diagram) -> JsonDiagram {
    let nodes = d
        .nodes()
        .map(|(id, n)| {
            let (a, t) = match n.kind {
                NodeKind::ZBox(Label::Const(a)) => (Some([a.re, a.im]), None),
                NodeKind::ZBox(Label::Phase(p)) => (None, Some([p.coeff, p.offset])),
                _ => (None, None),
            };
            JsonNode {
                id,
                kind: n.kind.name().to_string(),
                a,
                t,
                n_in: (n.n_in != default_n_in(&n.kind, n.arity())).then_some(n.n_in),
                tag: n.tag.clone(),
            }
        })
        .collect();
    let edges = d
        .edges()
        .into_iter()
        .map(|(p, q)| [[p.node, p.slot], [q.node, q.slot]])
        .collect();
    JsonDiagram {
        nodes,
        edges,
        inputs: d.inputs().to_vec(),
        outputs: d.outputs().to_vec(),
    }
}

pub fn to_json(d: &Diagram) -> String {
    serde_json::to_string(&to_json_value(d)).expect("plain data serializes")
}

pub fn to_json_pretty(d: &Diagram) -> String {
    serde_json::to_string_pretty(&to_json_value(d)).expect("plain data serializes")
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

/// Parses and validates a diagram.
pub fn from_json(text: &str) -> Result<Diagram> {
    let raw: JsonDiagram = serde_json::from_str(text)?;
    let mut arity: BTreeMap<NodeId, usize> = BTreeMap::new();
    for e in &raw.edges {
        for [node, slot] in *e {
            let a = arity.entry(node).or_default();
            *a = (*a).max(slot + 1);
        }
    }
    let index_of = |list: &[NodeId], id: NodeId| list.iter().position(|&x| x == id);
    let mut d = Diagram::new();
    let mut seen = std::collections::BTreeSet::new();
    for n in &raw.nodes {
        if !seen.insert(n.id) {
            return Err(bad(format!("duplicate node id {}", n.id)));
        }
        let kind = match n.kind.as_str() {
            "zbox" => NodeKind::ZBox(match (n.a, n.t) {
                (Some([re, im]), None) => Label::Const(C64::new(re, im)),
                (None, Some([coeff, offset])) => Label::Phase(TimePhase::new(coeff, offset)),
                (None, None) => Label::one(),
                (Some(_), Some(_)) => return Err(bad(format!("node {} has both 'a' and 't'", n.id))),
            }),
            "had" => NodeKind::Hadamard,
            "w" => NodeKind::W,
            "in" => NodeKind::Input(
                index_of(&raw.inputs, n.id).ok_or_else(|| bad(format!("input node {} is not listed", n.id)))?,
            ),
            "out" => NodeKind::Output(
                index_of(&raw.outputs, n.id).ok_or_else(|| bad(format!("output node {} is not listed", n.id)))?,
            ),
            other => return Err(bad(format!("unknown node kind '{other}'"))),
        };
        let k = arity.get(&n.id).copied().unwrap_or(0);
        d.insert_node(
            n.id,
            Node {
                n_in: n.n_in.unwrap_or_else(|| default_n_in(&kind, k)),
                kind,
                links: vec![None; k],
                tag: n.tag.clone(),
            },
        );
    }
    for e in &raw.edges {
        let [p, q] = e.map(|[node, slot]| Port::new(node, slot));
        for x in [p, q] {
            if d.node(x.node).is_none() {
                return Err(bad(format!("edge references missing node {}", x.node)));
            }
            if d.neighbor(x).is_some() {
                return Err(bad(format!("port {x} is linked twice")));
            }
        }
        if p == q {
            return Err(bad(format!("port {p} is linked to itself")));
        }
        d.connect(p, q);
    }
    d.set_boundaries(raw.inputs, raw.outputs);
    d.validate().map_err(Error::Invalid)?;
    Ok(d)
}

fn label_text(l: &Label) -> String {
    match l {
        Label::Const(a) => crate::matrix::format_complex(*a),
        Label::Phase(p) => format!("e^i({}t+{})", p.coeff, p.offset),
    }
}

/// Graphviz rendering: boxes for Z-boxes, yellow squares for Hadamards and
/// black triangles for W nodes. Nodes sharing a tag are not grouped.
pub fn to_dot(d: &Diagram) -> String {
    let mut s = String::from("graph zxw {\n  rankdir=LR;\n");
    for (id, n) in d.nodes() {
        let attrs = match &n.kind {
            NodeKind::ZBox(l) => format!(
                "shape=box, style=filled, fillcolor=\"#ccffcc\", label=\"{}\"",
                label_text(l)
            ),
            NodeKind::Hadamard => "shape=square, style=filled, fillcolor=yellow, label=\"\"".to_string(),
            NodeKind::W => {
                let dir = if n.n_in == 1 { "triangle" } else { "invtriangle" };
                format!("shape={dir}, style=filled, fillcolor=black, label=\"\"")
            }
            NodeKind::Input(k) => format!("shape=plaintext, label=\"in{k}\""),
            NodeKind::Output(k) => format!("shape=plaintext, label=\"out{k}\""),
        };
        let tag = n.tag.as_deref().map(|t| format!(", tooltip=\"{t}\"")).unwrap_or_default();
        let _ = writeln!(s, "  n{id} [{attrs}{tag}];");
    }
    for (p, q) in d.edges() {
        let _ = writeln!(s, "  n{} -- n{};", p.node, q.node);
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{make_generator, Builder};

    #[test]
    fn single_zbox() {
        let d = make_generator(NodeKind::ZBox(Label::Const(C64::new(0.5, -2.0))), 1, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&to_json(&d)).unwrap();
        let kinds: Vec<&str> = v["nodes"].as_array().unwrap().iter().map(|n| n["kind"].as_str().unwrap()).collect();
        assert_eq!(kinds.iter().filter(|k| **k == "zbox").count(), 1);
        let zbox = v["nodes"].as_array().unwrap().iter().find(|n| n["kind"] == "zbox").unwrap();
        assert_eq!(zbox["a"], serde_json::json!([0.5, -2.0]));
        assert_eq!(from_json(&to_json(&d)).unwrap(), d);
    }

    #[test]
    fn flipped_w_and_phase_labels_survive() {
        let mut b = Builder::new();
        let i = b.inputs(2);
        let m = b.w_merge(i[0], i[1]);
        let p = b.zbox(Label::Phase(TimePhase::new(-0.5, 0.25)), &[m], 1)[0];
        b.output(p);
        let d = b.finish().unwrap();
        let back = from_json(&to_json_pretty(&d)).unwrap();
        assert_eq!(back, d);
        assert!(back.is_parametric());
    }

    #[test]
    fn rejects_malformed() {
        assert!(from_json("{").is_err());
        let dangling = r#"{"nodes":[{"id":0,"kind":"in"}],"edges":[],"inputs":[0],"outputs":[]}"#;
        assert!(matches!(from_json(dangling), Err(Error::Invalid(_))));
        let unknown = r#"{"nodes":[{"id":0,"kind":"x"}],"edges":[],"inputs":[],"outputs":[]}"#;
        assert!(from_json(unknown).is_err());
        let twice = r#"{"nodes":[{"id":0,"kind":"zbox"},{"id":1,"kind":"zbox"}],
            "edges":[[[0,0],[1,0]],[[0,0],[1,1]]],"inputs":[],"outputs":[]}"#;
        assert!(from_json(twice).is_err());
    }

    #[test]
    fn dot_shapes() {
        let mut b = Builder::new();
        let i = b.input();
        let h = b.had(i);
        let (x, y) = b.w(h);
        b.outputs([x, y]);
        let dot = to_dot(&b.finish().unwrap());
        assert!(dot.contains("fillcolor=yellow"));
        assert!(dot.contains("shape=triangle"));
        assert_eq!(dot.matches(" -- ").count(), 4);
    }
}
