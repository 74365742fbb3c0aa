//! Graphviz text for quotient intersection graphs. Each quotient class is
//! drawn as one node; classes with several members carry a `×k` badge.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::graph::IntersectionGraph;
use crate::model::{Model, ObjectId};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n"))
}

pub fn quotient_dot(model: &Model, graph: &IntersectionGraph, name: &str) -> String {
    let reps = graph.representatives();
    let mut members: BTreeMap<ObjectId, Vec<ObjectId>> = BTreeMap::new();
    for (&v, &r) in &reps {
        members.entry(r).or_default().push(v);
    }
    let mut out = String::new();
    writeln!(out, "graph {} {{", quote(name)).unwrap();
    writeln!(out, "  node [shape=box, fontname=\"monospace\"];").unwrap();
    for (r, ms) in &members {
        let kind = model.kind(*r).map_or("vertex", |k| k.name());
        let mut label = format!("{r}\n{kind}");
        if ms.len() > 1 {
            write!(label, "\n×{}", ms.len()).unwrap();
        }
        let style = if ms.len() > 1 { ", style=bold" } else { "" };
        writeln!(out, "  {} [label={}{style}];", quote(&r.to_string()), quote(&label)).unwrap();
    }
    let mut edges: Vec<(ObjectId, ObjectId, String)> = graph
        .edges()
        .iter()
        .map(|e| (reps[&e.ends[0]], reps[&e.ends[1]], e.label.to_string()))
        .collect();
    edges.sort();
    for (a, b, l) in edges {
        writeln!(out, "  {} -- {} [label={}];", quote(&a.to_string()), quote(&b.to_string()), quote(&l)).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn figure_cycle_shows_a_loop() {
        let (m, pair) = gen::figure_cycle();
        let m = crate::handles::attach_pair_handles(&m, &pair).unwrap();
        let g = IntersectionGraph::torus_graph(&m);
        let dot = quotient_dot(&m, &g, "before");
        assert!(dot.starts_with("graph \"before\" {"));
        let t = g.vertices().next().unwrap();
        assert!(dot.contains(&format!("\"{t}\" -- \"{t}\"")), "{dot}");
    }

    #[test]
    fn classes_are_merged_with_badges() {
        use crate::group::GroupWord;
        use crate::model::ClassId;
        let m = Model::new(1);
        let mut g = IntersectionGraph::new();
        for (v, c) in [(0, 0), (1, 1), (2, 1), (3, 1)] {
            g.add_vertex(ObjectId(v), ClassId(c));
        }
        g.add_edge(0, ObjectId(0), ObjectId(2), GroupWord::generator(0));
        let dot = quotient_dot(&m, &g, "q");
        assert!(dot.contains("\"o1\" [label=\"o1\\nvertex\\n×3\", style=bold];"), "{dot}");
        assert!(dot.contains("\"o0\" -- \"o1\" [label=\"a\"];"), "{dot}");
        let empty = quotient_dot(&m, &IntersectionGraph::new(), "x");
        assert_eq!(empty, "graph \"x\" {\n  node [shape=box, fontname=\"monospace\"];\n}\n");
    }
}
