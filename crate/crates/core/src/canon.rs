//! n-types: canonical forms of labeled balls in the cap intersection graph,
//! computed by colour refinement with individualization.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::graph::{IntersectionGraph, QuotientView, SmallGraph};
use crate::model::{label_of, CappedGrope, Model, ObjectId};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NType(String);

impl NType {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn rank<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).unwrap()).collect()
}

fn distinct(col: &[usize]) -> usize {
    col.iter().copied().max().map_or(0, |m| m + 1)
}

fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Per vertex, a hash of the labels on each of its neighbor slots.
fn label_hashes(g: &SmallGraph) -> Vec<Vec<u64>> {
    g.adj
        .iter()
        .map(|row| row.values().map(|ids| ids.iter().fold(0u64, |h, &id| mix(h ^ u64::from(id)))).collect())
        .collect()
}

/// Refines `col` until stable; new colours are ordered consistently with
/// old. A vertex's new colour is its old colour and an order-independent
/// hash of its neighbors' colours and edge labels; hash collisions only make
/// the refinement coarser.
fn refine(g: &SmallGraph, label_hash: &[Vec<u64>], mut col: Vec<usize>) -> Vec<usize> {
    loop {
        let sigs: Vec<(usize, u64)> = (0..g.len())
            .map(|v| {
                let h = g.adj[v].keys().zip(&label_hash[v]).fold(0u64, |acc, (&w, &lh)| {
                    let c = if w == v { u64::MAX } else { col[w] as u64 };
                    acc.wrapping_add(mix(mix(c) ^ lh))
                });
                (col[v], h)
            })
            .collect();
        let next = rank(&sigs);
        if distinct(&next) == distinct(&col) {
            return next;
        }
        col = next;
    }
}

fn positions(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    pos
}

/// The edges from `v` back to vertices no later than position `i`.
fn back_edges<'g>(g: &'g SmallGraph, pos: &[usize], v: usize, i: usize) -> Vec<(usize, &'g [u32])> {
    let mut back: Vec<(usize, &[u32])> =
        g.adj[v].iter().filter(|(&u, _)| pos[u] <= i).map(|(&u, ids)| (pos[u], ids.as_slice())).collect();
    back.sort_unstable();
    back
}

/// Leaf comparison key. Label ids follow label text order, so comparing
/// tokens is as invariant as comparing the rendered string.
fn tokens(g: &SmallGraph, order: &[usize]) -> Vec<u32> {
    let pos = positions(order);
    let mut out = vec![order.len() as u32];
    for (i, &v) in order.iter().enumerate() {
        let (c, d) = g.colors[v];
        let back = back_edges(g, &pos, v, i);
        out.extend([c, d, back.len() as u32]);
        for (j, ids) in back {
            out.extend([j as u32, ids.len() as u32]);
            out.extend_from_slice(ids);
        }
    }
    out
}

fn encode(g: &SmallGraph, order: &[usize]) -> String {
    let pos = positions(order);
    let mut out = format!("{}v", g.len());
    for (i, &v) in order.iter().enumerate() {
        let (c, d) = g.colors[v];
        out.push_str(&format!(";{c}/{d}"));
        for (j, ids) in back_edges(g, &pos, v, i) {
            let names: Vec<&str> = ids.iter().map(|&id| g.names[id as usize].as_str()).collect();
            out.push_str(&format!(" {j}={}", names.join("+")));
        }
    }
    out
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Individualization-refinement search for the least leaf encoding, pruning
/// children that twins or already-found automorphisms make redundant.
struct Canon<'a> {
    g: &'a SmallGraph,
    label_hash: Vec<Vec<u64>>,
    best: Option<(Vec<u32>, Vec<usize>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Canon<'_> {
    fn same_orbit(&self, fixed: &[usize], u: usize, explored: &[usize]) -> bool {
        let mut parent: Vec<usize> = (0..self.g.len()).collect();
        for gamma in &self.automorphisms {
            if fixed.iter().all(|&x| gamma[x] == x) {
                for (x, &y) in gamma.iter().enumerate() {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                    parent[a] = b;
                }
            }
        }
        let r = find(&mut parent, u);
        explored.iter().any(|&e| find(&mut parent, e) == r)
    }

    /// Returns the depth to unwind to when a subtree turns out redundant.
    fn search(&mut self, col: Vec<usize>, fixed: &mut Vec<usize>) -> Option<usize> {
        let g = self.g;
        let col = refine(g, &self.label_hash, col);
        let mut size = vec![0usize; distinct(&col)];
        for &c in &col {
            size[c] += 1;
        }
        let Some(target) = size.iter().position(|&s| s > 1) else {
            let mut order: Vec<usize> = (0..g.len()).collect();
            order.sort_by_key(|&v| col[v]);
            let e = tokens(g, &order);
            match &self.best {
                Some((b, border, bpath)) if *b == e => {
                    let mut gamma = vec![0; g.len()];
                    for (i, &v) in border.iter().enumerate() {
                        gamma[v] = order[i];
                    }
                    // this subtree is the image of the finished one the best
                    // leaf lives in: jump back to where the two paths part
                    let split = bpath.iter().zip(fixed.iter()).take_while(|(a, b)| a == b).count();
                    if gamma.iter().enumerate().any(|(x, &y)| x != y) {
                        self.automorphisms.push(gamma);
                        return Some(split);
                    }
                }
                Some((b, _, _)) if *b < e => {}
                _ => self.best = Some((e, order, fixed.clone())),
            }
            return None;
        };
        let mut explored: Vec<usize> = Vec::new();
        for v in (0..g.len()).filter(|&v| col[v] == target) {
            if explored.iter().any(|&t| g.twins(t, v)) || self.same_orbit(fixed, v, &explored) {
                continue;
            }
            explored.push(v);
            // v's twins are interchangeable with it and with each other, so
            // they are individualized together, in any order
            let mut twins = vec![v];
            twins.extend((0..g.len()).filter(|&u| u != v && col[u] == target && g.twins(u, v)));
            let keys: Vec<(usize, usize)> = (0..g.len())
                .map(|u| match twins.iter().position(|&t| t == u) {
                    Some(i) => (col[u], i),
                    None if col[u] == target => (col[u], twins.len()),
                    None => (col[u], 0),
                })
                .collect();
            let split = rank(&keys);
            fixed.push(v);
            let jump = self.search(split, fixed);
            fixed.pop();
            if let Some(d) = jump {
                if d < fixed.len() {
                    return Some(d);
                }
            }
        }
        None
    }
}

pub(crate) fn canonical_form(g: &SmallGraph) -> String {
    let mut c = Canon { g, label_hash: label_hashes(g), best: None, automorphisms: Vec::new() };
    c.search(rank(&g.colors), &mut Vec::new());
    c.best.map(|(_, order, _)| encode(g, &order)).unwrap_or_else(|| "0v".into())
}

/// n-type of the ball around coloured roots.
pub fn ntype_of(graph: &IntersectionGraph, roots: &BTreeMap<ObjectId, u32>, n: usize) -> NType {
    NType(canonical_form(&SmallGraph::ball(graph, roots, n)))
}

fn bits_color(bits: &[u8]) -> u32 {
    bits.iter().fold(1u32, |acc, &b| acc.saturating_mul(2).saturating_add(u32::from(b)))
}

/// n-type of a branch: the ball around its caps, each root coloured by its
/// dyadic bits.
pub fn branch_ntype(model: &Model, graph: &IntersectionGraph, caps: &[ObjectId], n: usize) -> Result<NType> {
    branch_ntype_in(model, &QuotientView::new(graph), caps, n)
}

fn branch_ntype_in(model: &Model, view: &QuotientView, caps: &[ObjectId], n: usize) -> Result<NType> {
    let mut roots = BTreeMap::new();
    for &c in caps {
        let bits = label_of(model, c)?.map(|l| l.bits).unwrap_or_default();
        roots.insert(c, bits_color(&bits));
    }
    Ok(NType(canonical_form(&SmallGraph::ball_in(view, &roots, n))))
}

/// n-types of every branch of `grope`, in branch order.
pub fn ntypes(model: &Model, grope: ObjectId, n: usize) -> Result<Vec<NType>> {
    let g = CappedGrope::of(model, grope)?;
    let view = QuotientView::new(&IntersectionGraph::cap_graph(model));
    g.branches(model)?.iter().map(|caps| branch_ntype_in(model, &view, caps, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupWord;
    use crate::model::ClassId;
    use crate::oracles;

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

    fn root(v: u32) -> BTreeMap<ObjectId, u32> {
        [(ObjectId(v), 0)].into_iter().collect()
    }

    #[test]
    fn regular_graphs_need_individualization() {
        // two 6-cycles vs. a 6-cycle with a chord pattern giving two triangles
        let hex = graph(6, &[(0, 1, 0), (1, 2, 0), (2, 3, 0), (3, 4, 0), (4, 5, 0), (5, 0, 0)]);
        let tri = graph(6, &[(0, 1, 0), (1, 2, 0), (2, 0, 0), (3, 4, 0), (4, 5, 0), (5, 3, 0)]);
        let all: BTreeMap<ObjectId, u32> = (0..6).map(|i| (ObjectId(i), 0)).collect();
        assert_ne!(ntype_of(&hex, &all, 3), ntype_of(&tri, &all, 3));
        assert_eq!(ntype_of(&hex, &root(0), 3), ntype_of(&hex, &root(4), 3));
    }

    #[test]
    fn labels_matter() {
        let g = graph(2, &[(0, 1, 0)]);
        let h = graph(2, &[(0, 1, 1)]);
        assert_ne!(ntype_of(&g, &root(0), 1), ntype_of(&h, &root(0), 1));
        let inv = {
            let mut x = IntersectionGraph::new();
            x.add_vertex(ObjectId(0), ClassId(0));
            x.add_vertex(ObjectId(1), ClassId(1));
            x.add_edge(0, ObjectId(0), ObjectId(1), GroupWord::generator(0).invert());
            x
        };
        assert_eq!(ntype_of(&g, &root(0), 1), ntype_of(&inv, &root(0), 1));
    }

    #[test]
    fn agrees_with_oracle_on_small_cases() {
        let cases = [
            graph(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)]),
            graph(4, &[(0, 1, 0), (1, 2, 0), (1, 3, 1)]),
            graph(3, &[(0, 0, 0), (0, 1, 1), (1, 2, 1), (1, 2, 1)]),
        ];
        for a in &cases {
            for b in &cases {
                for r in 0..3 {
                    for s in 0..3 {
                        let eng = ntype_of(a, &root(r), 2) == ntype_of(b, &root(s), 2);
                        let ora = oracles::ball(a, ObjectId(r), 2).unwrap() == oracles::ball(b, ObjectId(s), 2).unwrap();
                        assert_eq!(eng, ora);
                    }
                }
            }
        }
    }
}
