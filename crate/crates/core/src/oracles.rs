//! Deliberately small, exhaustive checkers used as ground truth by the
//! tests: ball signatures by full ordering search, tree tests and shortest
//! collision search on the quotient graph.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::cycles::Cycle;
use crate::error::{Error, Result};
use crate::graph::{IntersectionGraph, SmallGraph};
use crate::model::{Model, ObjectId};

/// Largest ball the exhaustive signature will handle.
pub const ORACLE_LIMIT: usize = 12;

type Block = ((u32, u32), Vec<(usize, Vec<String>)>);

/// Canonical encoding of a rooted labeled ball.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BallSignature(String);

impl BallSignature {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BallSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn block(g: &SmallGraph, order: &[usize], v: usize) -> Block {
    let k = order.len();
    let mut edges = Vec::new();
    for (j, &u) in order.iter().enumerate() {
        if !g.between(v, u).is_empty() {
            edges.push((j, g.labels(v, u)));
        }
    }
    if !g.between(v, v).is_empty() {
        edges.push((k, g.labels(v, v)));
    }
    (g.colors[v], edges)
}

struct Search<'a> {
    g: &'a SmallGraph,
    best: Option<Vec<Block>>,
}

impl Search<'_> {
    fn run(&mut self, order: &mut Vec<usize>, prefix: &mut Vec<Block>, placed: &mut Vec<bool>) {
        let k = order.len();
        // the best may have improved since this prefix was accepted
        if let Some(best) = &self.best {
            if prefix[..] > best[..k] {
                return;
            }
        }
        if k == self.g.len() {
            self.best = Some(prefix.clone());
            return;
        }
        let mut tried: Vec<usize> = Vec::new();
        let mut candidates: Vec<(Block, usize)> = (0..self.g.len())
            .filter(|&v| !placed[v])
            .map(|v| (block(self.g, order, v), v))
            .collect();
        candidates.sort();
        for (b, v) in candidates {
            if tried.iter().any(|&t| self.g.twins(t, v)) {
                continue;
            }
            tried.push(v);
            order.push(v);
            placed[v] = true;
            prefix.push(b);
            self.run(order, prefix, placed);
            prefix.pop();
            placed[v] = false;
            order.pop();
        }
    }
}

/// Lexicographically least encoding over every vertex ordering.
pub(crate) fn exhaustive_signature(g: &SmallGraph) -> BallSignature {
    let mut s = Search { g, best: None };
    s.run(&mut Vec::new(), &mut Vec::new(), &mut vec![false; g.len()]);
    let blocks = s.best.unwrap_or_default();
    let mut out = format!("n{}", g.len());
    for ((c, d), edges) in blocks {
        out.push_str(&format!("|{c}.{d}"));
        for (j, ls) in edges {
            out.push_str(&format!(" {j}:{}", ls.join(",")));
        }
    }
    BallSignature(out)
}

/// Signature of the radius-`n` quotient ball around `root`.
pub fn ball(graph: &IntersectionGraph, root: ObjectId, n: usize) -> Result<BallSignature> {
    ball_rooted(graph, &[(root, 0)].into_iter().collect(), n)
}

/// Signature of the ball around a colored set of roots.
pub fn ball_rooted(graph: &IntersectionGraph, roots: &BTreeMap<ObjectId, u32>, n: usize) -> Result<BallSignature> {
    if let Some(&r) = roots.keys().find(|&&r| !graph.contains(r)) {
        return Err(Error::Reference(format!("root {r} is not in the graph")));
    }
    let g = SmallGraph::ball(graph, roots, n);
    if g.len() > ORACLE_LIMIT {
        return Err(Error::OracleScale { vertices: g.len(), limit: ORACLE_LIMIT });
    }
    Ok(exhaustive_signature(&g))
}

/// Plain permutation search for a color- and label-preserving isomorphism.
pub fn isomorphic_bruteforce(
    a: &IntersectionGraph,
    a_roots: &BTreeMap<ObjectId, u32>,
    b: &IntersectionGraph,
    b_roots: &BTreeMap<ObjectId, u32>,
    n: usize,
) -> bool {
    let ga = SmallGraph::ball(a, a_roots, n);
    let gb = SmallGraph::ball(b, b_roots, n);
    if ga.len() != gb.len() || ga.edge_count() != gb.edge_count() {
        return false;
    }
    fn extend(ga: &SmallGraph, gb: &SmallGraph, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = map.len();
        if i == ga.len() {
            return true;
        }
        for j in 0..gb.len() {
            if used[j] || ga.colors[i] != gb.colors[j] || ga.labels(i, i) != gb.labels(j, j) {
                continue;
            }
            if (0..i).any(|k| ga.labels(i, k) != gb.labels(j, map[k])) {
                continue;
            }
            map.push(j);
            used[j] = true;
            if extend(ga, gb, map, used) {
                return true;
            }
            used[j] = false;
            map.pop();
        }
        false
    }
    extend(&ga, &gb, &mut Vec::new(), &mut vec![false; gb.len()])
}

/// Shortest cycle of the quotient graph, if any has length at most `max`.
/// Vertices of the returned path are class representatives.
pub fn shortest_cycle(graph: &IntersectionGraph, max: usize) -> Option<Cycle> {
    let q = graph.quotient_graph();
    let mut best: Option<Cycle> = None;
    let consider = |best: &mut Option<Cycle>, c: Cycle| {
        if c.length() <= max && best.as_ref().map_or(true, |b| c.length() < b.length()) {
            *best = Some(c);
        }
    };
    // loops and parallel edges first
    let mut seen: BTreeMap<(ObjectId, ObjectId), u64> = BTreeMap::new();
    for e in q.edges() {
        let [a, b] = e.ends;
        if a == b {
            consider(&mut best, Cycle { path: vec![a, a], edges: vec![e.key], witness: q.class(a) });
            continue;
        }
        let key = (a.min(b), a.max(b));
        if let Some(&k) = seen.get(&key) {
            consider(&mut best, Cycle { path: vec![key.0, key.1, key.0], edges: vec![k, e.key], witness: q.class(key.0) });
        } else {
            seen.insert(key, e.key);
        }
    }
    if best.as_ref().map_or(false, |b| b.length() <= 2) {
        return best;
    }
    for s in q.vertices() {
        let mut dist: BTreeMap<ObjectId, usize> = BTreeMap::new();
        let mut parent: BTreeMap<ObjectId, (ObjectId, usize)> = BTreeMap::new();
        let mut queue = VecDeque::from([s]);
        dist.insert(s, 0);
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            if 2 * du + 1 > max {
                break;
            }
            for &i in q.incident(u) {
                let e = q.edge(i);
                if e.is_loop() || parent.get(&u).map_or(false, |&(_, pi)| pi == i) {
                    continue;
                }
                let w = e.other(u);
                match dist.get(&w) {
                    None => {
                        dist.insert(w, du + 1);
                        parent.insert(w, (u, i));
                        queue.push_back(w);
                    }
                    Some(&dw) => {
                        let len = du + dw + 1;
                        if len > max || best.as_ref().map_or(false, |b| b.length() <= len) {
                            continue;
                        }
                        let climb = |mut v: ObjectId| {
                            let mut verts = vec![v];
                            let mut edges = Vec::new();
                            while let Some(&(p, pi)) = parent.get(&v) {
                                edges.push(q.edge(pi).key);
                                verts.push(p);
                                v = p;
                            }
                            (verts, edges)
                        };
                        let (mut pu, mut eu) = climb(u);
                        let (pw, ew) = climb(w);
                        // u -> s reversed gives s -> u; then edge u-w; then w -> s
                        pu.reverse();
                        eu.reverse();
                        let mut path = pu;
                        path.extend(pw);
                        let mut edges = eu;
                        edges.push(e.key);
                        edges.extend(ew);
                        let distinct: std::collections::BTreeSet<_> = path[..path.len() - 1].iter().collect();
                        if distinct.len() == path.len() - 1 {
                            consider(&mut best, Cycle { path, edges, witness: q.class(s) });
                        }
                    }
                }
            }
        }
    }
    best
}

/// Shortest collision of length at most `n` among caps and capped tori.
pub fn collision_search(model: &Model, n: usize) -> Option<Cycle> {
    shortest_cycle(&IntersectionGraph::cap_graph(model), n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeVerdict {
    pub is_tree: bool,
    pub vertices: usize,
    pub edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Cycle>,
}

/// Whether the radius-`n` quotient ball around `root` is a tree.
pub fn is_tree_ball(graph: &IntersectionGraph, root: ObjectId, n: usize) -> Result<TreeVerdict> {
    if !graph.contains(root) {
        return Err(Error::Reference(format!("root {root} is not in the graph")));
    }
    let q = graph.quotient_graph();
    let b = q.ball(&[graph.representative(root)], n);
    let (v, e) = (b.vertex_count(), b.edges().len());
    let is_tree = e + 1 == v;
    let witness = if is_tree { None } else { shortest_cycle(&b, usize::MAX) };
    Ok(TreeVerdict { is_tree, vertices: v, edges: e, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupWord;
    use crate::model::ClassId;

    fn graph(n: u32, edges: &[(u32, u32, u8)]) -> IntersectionGraph {
        let mut g = IntersectionGraph::new();
        for i in 0..n {
            g.add_vertex(ObjectId(i), ClassId(i));
        }
        for (k, &(a, b, l)) in edges.iter().enumerate() {
            g.add_edge(k as u64, ObjectId(a), ObjectId(b), GroupWord::generator(l));
        }
        g
    }

    #[test]
    fn point_signature() {
        let g = graph(1, &[]);
        assert_eq!(ball(&g, ObjectId(0), 5).unwrap().as_str(), "n1|1.0");
    }

    #[test]
    fn renaming_invariance() {
        let g = graph(4, &[(0, 1, 0), (1, 2, 1), (1, 3, 0)]);
        let h = graph(4, &[(3, 2, 0), (2, 0, 1), (2, 1, 0)]);
        assert_eq!(ball(&g, ObjectId(0), 3).unwrap(), ball(&h, ObjectId(3), 3).unwrap());
        assert_ne!(ball(&g, ObjectId(0), 3).unwrap(), ball(&h, ObjectId(2), 3).unwrap());
    }

    #[test]
    fn oversize_ball() {
        let edges: Vec<_> = (1..20).map(|i| (0, i, 0)).collect();
        let g = graph(20, &edges);
        assert!(matches!(ball(&g, ObjectId(0), 1), Err(Error::OracleScale { vertices: 20, .. })));
    }

    #[test]
    fn star_with_twins_is_fast() {
        let edges: Vec<_> = (1..12).map(|i| (0, i, 0)).collect();
        let g = graph(12, &edges);
        assert!(ball(&g, ObjectId(0), 1).is_ok());
    }

    #[test]
    fn path_is_a_tree_and_loop_is_not() {
        let g = graph(4, &[(0, 1, 0), (1, 2, 0), (2, 3, 0)]);
        assert!(is_tree_ball(&g, ObjectId(0), 3).unwrap().is_tree);
        let l = graph(1, &[(0, 0, 0)]);
        let v = is_tree_ball(&l, ObjectId(0), 2).unwrap();
        assert!(!v.is_tree);
        assert_eq!(v.witness.unwrap().length(), 1);
    }

    #[test]
    fn shortest_cycle_lengths() {
        assert!(shortest_cycle(&graph(3, &[(0, 1, 0), (1, 2, 0)]), 10).is_none());
        assert_eq!(shortest_cycle(&graph(2, &[(0, 1, 0), (0, 1, 0)]), 10).unwrap().length(), 2);
        let c5 = graph(5, &[(0, 1, 0), (1, 2, 0), (2, 3, 0), (3, 4, 0), (4, 0, 0)]);
        assert_eq!(shortest_cycle(&c5, 10).unwrap().length(), 5);
        assert!(shortest_cycle(&c5, 4).is_none());
        let c4 = graph(4, &[(0, 1, 0), (1, 2, 0), (2, 3, 0), (3, 0, 0)]);
        let c = shortest_cycle(&c4, 10).unwrap();
        assert_eq!(c.length(), 4);
        assert_eq!(c.path.first(), c.path.last());
    }

    #[test]
    fn quotient_identification_is_a_collision() {
        let mut g = IntersectionGraph::new();
        for i in 0..3 {
            g.add_vertex(ObjectId(i), ClassId(if i == 2 { 0 } else { i }));
        }
        g.add_edge(0, ObjectId(0), ObjectId(1), GroupWord::generator(0));
        g.add_edge(1, ObjectId(1), ObjectId(2), GroupWord::generator(0));
        assert_eq!(shortest_cycle(&g, 2).unwrap().length(), 2);
        assert!(shortest_cycle(&g, 1).is_none());
    }

    #[test]
    fn bruteforce_matches_signature_on_small_cases() {
        let g = graph(3, &[(0, 1, 0), (1, 2, 1)]);
        let h = graph(3, &[(2, 1, 0), (1, 0, 1)]);
        let r = |v| [(ObjectId(v), 0u32)].into_iter().collect::<BTreeMap<_, _>>();
        assert!(isomorphic_bruteforce(&g, &r(0), &h, &r(2), 3));
        assert!(!isomorphic_bruteforce(&g, &r(0), &h, &r(0), 3));
    }

    #[test]
    fn signature_ignores_vertex_names() {
        use rand::seq::SliceRandom;
        use rand::Rng;
        let mut rng = crate::gen::rng(17);
        for _ in 0..200 {
            let k = rng.gen_range(2..=8u32);
            let edges: Vec<(u32, u32, u8)> =
                (0..rng.gen_range(1..=8)).map(|_| (rng.gen_range(0..k), rng.gen_range(0..k), rng.gen_range(0..2))).collect();
            let roots: Vec<(u32, u32)> = (0..k).filter_map(|v| rng.gen_bool(0.5).then(|| (v, rng.gen_range(0..3)))).collect();
            let mut perm: Vec<u32> = (0..k).collect();
            perm.shuffle(&mut rng);
            let g = graph(k, &edges);
            let moved: Vec<_> = edges.iter().map(|&(a, b, l)| (perm[a as usize], perm[b as usize], l)).collect();
            let h = graph(k, &moved);
            let r = |map: &dyn Fn(u32) -> u32| -> BTreeMap<ObjectId, u32> {
                let mut m: BTreeMap<ObjectId, u32> = roots.iter().map(|&(v, c)| (ObjectId(map(v)), c)).collect();
                m.entry(ObjectId(map(0))).or_insert(9);
                m
            };
            let a = ball_rooted(&g, &r(&|v| v), 2).unwrap();
            let b = ball_rooted(&h, &r(&|v| perm[v as usize]), 2).unwrap();
            assert_eq!(a, b, "{edges:?} {roots:?} {perm:?}");
        }
    }
}
