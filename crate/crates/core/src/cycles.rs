//! Cycles in the sense of short embedded paths whose endpoints are the same
//! underlying object.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::graph::IntersectionGraph;
use crate::model::{ClassId, ObjectId};

/// An embedded path whose endpoints lie in one quotient class. A closed
/// path (first vertex equals last) is an ordinary cycle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Cycle {
    pub path: Vec<ObjectId>,
    pub edges: Vec<u64>,
    pub witness: ClassId,
}

impl Cycle {
    pub fn length(&self) -> usize {
        self.edges.len()
    }

    pub fn is_closed(&self) -> bool {
        self.path.first() == self.path.last()
    }

    /// Rotation- and direction-independent key, for deduplication.
    fn canonical_key(&self) -> Vec<u64> {
        let mut keys = Vec::new();
        if self.is_closed() {
            let k = self.edges.len();
            for r in 0..k {
                let rot: Vec<u64> = (0..k).map(|i| self.edges[(r + i) % k]).collect();
                let mut rev = rot.clone();
                rev.reverse();
                keys.push(rot);
                keys.push(rev);
            }
        } else {
            let mut rev = self.edges.clone();
            rev.reverse();
            keys.push(self.edges.clone());
            keys.push(rev);
        }
        let mut best = keys.into_iter().min().unwrap_or_default();
        best.insert(0, u64::from(self.is_closed()));
        best
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.path.iter().map(ToString::to_string).collect();
        write!(f, "length {} via {}", self.length(), names.join(" - "))
    }
}

struct Walk<'a> {
    graph: &'a IntersectionGraph,
    max: usize,
    path: Vec<ObjectId>,
    edges: Vec<usize>,
    on_path: BTreeSet<ObjectId>,
    /// Distance back to the start's class, for vertices close enough to
    /// still finish a collision.
    home: HashMap<ObjectId, usize>,
}

impl Walk<'_> {
    /// Extends the current path, reporting every collision found.
    fn extend(&mut self, report: &mut dyn FnMut(Cycle) -> bool) -> bool {
        let start = self.path[0];
        let here = *self.path.last().unwrap();
        if self.edges.len() == self.max {
            return false;
        }
        for &i in self.graph.incident(here) {
            if self.edges.contains(&i) {
                continue;
            }
            let w = self.graph.edge(i).other(here);
            let closes = w == start;
            if self.on_path.contains(&w) && !closes {
                continue;
            }
            let left = self.max - self.edges.len() - 1;
            if !closes && self.graph.class(w) != self.graph.class(start) && self.home.get(&w).map_or(true, |&d| d > left) {
                continue;
            }
            self.path.push(w);
            self.edges.push(i);
            if self.graph.class(w) == self.graph.class(start) {
                let cycle = Cycle {
                    path: self.path.clone(),
                    edges: self.edges.iter().map(|&e| self.graph.edge(e).key).collect(),
                    witness: self.graph.class(start),
                };
                if report(cycle) {
                    return true;
                }
            }
            if !closes {
                self.on_path.insert(w);
                if self.extend(report) {
                    return true;
                }
                self.on_path.remove(&w);
            }
            self.path.pop();
            self.edges.pop();
        }
        false
    }
}

/// Distances up to `depth` from the vertices of `v`'s class.
fn home_distances(graph: &IntersectionGraph, v: ObjectId, members: &[ObjectId], depth: usize) -> HashMap<ObjectId, usize> {
    let mut dist: HashMap<ObjectId, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for &m in members.iter().chain([&v]) {
        if dist.insert(m, 0).is_none() {
            queue.push_back(m);
        }
    }
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        if d == depth {
            continue;
        }
        for &i in graph.incident(x) {
            let w = graph.edge(i).other(x);
            dist.entry(w).or_insert_with(|| {
                queue.push_back(w);
                d + 1
            });
        }
    }
    dist
}

fn classes(graph: &IntersectionGraph) -> BTreeMap<ClassId, Vec<ObjectId>> {
    let mut out: BTreeMap<ClassId, Vec<ObjectId>> = BTreeMap::new();
    for v in graph.vertices() {
        out.entry(graph.class(v)).or_default().push(v);
    }
    out
}

fn walk_from(
    graph: &IntersectionGraph,
    classes: &BTreeMap<ClassId, Vec<ObjectId>>,
    v: ObjectId,
    max: usize,
    report: &mut dyn FnMut(Cycle) -> bool,
) -> bool {
    if max == 0 {
        return false;
    }
    let home = home_distances(graph, v, &classes[&graph.class(v)], max - 1);
    let mut w = Walk { graph, max, path: vec![v], edges: Vec::new(), on_path: [v].into_iter().collect(), home };
    w.extend(report)
}

/// Every collision of length at most `max_len`, each listed once.
pub fn find_cycles(graph: &IntersectionGraph, max_len: usize) -> Vec<Cycle> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let classes = classes(graph);
    for v in graph.vertices() {
        walk_from(graph, &classes, v, max_len, &mut |c| {
            if seen.insert(c.canonical_key()) {
                out.push(c);
            }
            false
        });
    }
    out.sort_by(|a, b| a.length().cmp(&b.length()).then_with(|| a.cmp(b)));
    out
}

/// A shortest collision of length at most `max_len` through one of `through`.
pub fn shortest_cycle_through(graph: &IntersectionGraph, through: &BTreeSet<ObjectId>, max_len: usize) -> Option<Cycle> {
    let classes = classes(graph);
    // a closed collision can start at any of its vertices, an open one at
    // either end, which shares its class with another vertex
    let starts: Vec<ObjectId> = graph
        .vertices()
        .filter(|v| through.contains(v) || classes[&graph.class(*v)].len() > 1)
        .collect();
    for len in 1..=max_len {
        let mut found = None;
        for &v in &starts {
            let hit = walk_from(graph, &classes, v, len, &mut |c| {
                if c.length() == len && c.path.iter().any(|x| through.contains(x)) {
                    found = Some(c);
                    true
                } else {
                    false
                }
            });
            if hit {
                return found;
            }
        }
    }
    None
}

/// Length of the shortest collision, or `None` when there is none.
pub fn girth(graph: &IntersectionGraph) -> Option<usize> {
    let all: BTreeSet<ObjectId> = graph.vertices().collect();
    shortest_cycle_through(graph, &all, graph.edges().len()).map(|c| c.length())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupWord;

    fn graph(n: u32, edges: &[(u32, u32)]) -> IntersectionGraph {
        let mut g = IntersectionGraph::new();
        for i in 0..n {
            g.add_vertex(ObjectId(i), ClassId(i));
        }
        for (k, &(a, b)) in edges.iter().enumerate() {
            g.add_edge(k as u64, ObjectId(a), ObjectId(b), GroupWord::generator(0));
        }
        g
    }

    #[test]
    fn tree_has_none() {
        let g = graph(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]);
        assert!(find_cycles(&g, 10).is_empty());
        assert_eq!(girth(&g), None);
    }

    #[test]
    fn loop_is_a_cycle_of_length_one() {
        let g = graph(1, &[(0, 0)]);
        let c = find_cycles(&g, 3);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].length(), 1);
    }

    #[test]
    fn triangle_listed_once() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(find_cycles(&g, 3).len(), 1);
        assert!(find_cycles(&g, 2).is_empty());
        assert_eq!(girth(&g), Some(3));
    }

    #[test]
    fn identified_endpoints_make_an_open_cycle() {
        let mut g = graph(3, &[(0, 1), (1, 2)]);
        g.add_vertex(ObjectId(2), ClassId(0));
        let c = find_cycles(&g, 2);
        assert_eq!(c.len(), 1);
        assert!(!c[0].is_closed());
        assert_eq!(c[0].witness, ClassId(0));
    }

    #[test]
    fn double_edge_is_length_two() {
        let g = graph(2, &[(0, 1), (0, 1)]);
        assert_eq!(girth(&g), Some(2));
    }
}
