//! Labeled multigraph views of a model, with the quotient map identifying
//! vertices that denote the same underlying object.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::group::GroupWord;
use crate::model::{ClassId, EdgeRole, Model, ObjectId, ObjectKind};

/// Keys of derived edges start here so they never clash with model edge ids.
const DERIVED_KEY_BASE: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    pub key: u64,
    pub ends: [ObjectId; 2],
    pub label: GroupWord,
}

impl GraphEdge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }

    pub fn other(&self, v: ObjectId) -> ObjectId {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntersectionGraph {
    quotient: BTreeMap<ObjectId, ClassId>,
    edges: Vec<GraphEdge>,
    adjacency: BTreeMap<ObjectId, Vec<usize>>,
}

impl IntersectionGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: ObjectId, class: ClassId) {
        self.quotient.insert(v, class);
        self.adjacency.entry(v).or_default();
    }

    /// Adds an edge; both endpoints must already be vertices.
    pub fn add_edge(&mut self, key: u64, a: ObjectId, b: ObjectId, label: GroupWord) {
        assert!(self.quotient.contains_key(&a) && self.quotient.contains_key(&b), "edge endpoint missing");
        let i = self.edges.len();
        self.edges.push(GraphEdge { key, ends: [a, b], label });
        self.adjacency.get_mut(&a).unwrap().push(i);
        if a != b {
            self.adjacency.get_mut(&b).unwrap().push(i);
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = ObjectId> + '_ {
        self.quotient.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.quotient.len()
    }

    pub fn contains(&self, v: ObjectId) -> bool {
        self.quotient.contains_key(&v)
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn class(&self, v: ObjectId) -> ClassId {
        self.quotient[&v]
    }

    /// Edge indices at `v`; a loop appears once.
    pub fn incident(&self, v: ObjectId) -> &[usize] {
        self.adjacency.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn edge(&self, i: usize) -> &GraphEdge {
        &self.edges[i]
    }

    /// Vertices of kinds `kinds`, with the stored intersection edges among them.
    pub fn from_model(model: &Model, kinds: &[ObjectKind]) -> Self {
        let mut g = IntersectionGraph::new();
        for o in model.objects().filter(|o| kinds.contains(&o.kind)) {
            g.add_vertex(o.id, o.class);
        }
        for e in model.edges() {
            if e.role == EdgeRole::Intersection && g.contains(e.endpoints[0]) && g.contains(e.endpoints[1]) {
                g.add_edge(e.id.0 as u64, e.endpoints[0], e.endpoints[1], e.label.clone());
            }
        }
        g
    }

    /// Caps of gropes and capped Clifford tori, with the intersections
    /// between them. Two tori meet when a cap of one goes over a dual sphere
    /// that meets the dual sphere a cap of the other goes over; the edge
    /// carries the label of the torus capping the first endpoint of that
    /// dual-sphere intersection.
    pub fn cap_graph(model: &Model) -> Self {
        let mut g = Self::from_model(model, &[ObjectKind::Cap, ObjectKind::CliffordTorus]);
        g.add_torus_edges(model);
        g
    }

    /// Capped Clifford tori only.
    pub fn torus_graph(model: &Model) -> Self {
        let mut g = Self::from_model(model, &[ObjectKind::CliffordTorus]);
        g.add_torus_edges(model);
        g
    }

    fn add_torus_edges(&mut self, model: &Model) {
        let mut over: BTreeMap<ObjectId, Vec<ObjectId>> = BTreeMap::new();
        for t in model.objects_of_kind(ObjectKind::CliffordTorus) {
            for &d in &t.caps {
                over.entry(d).or_default().push(t.id);
            }
        }
        let mut next = DERIVED_KEY_BASE;
        for e in model.edges() {
            if e.role != EdgeRole::Dual {
                continue;
            }
            let [d0, d1] = e.endpoints;
            if model.kind(d0) != Some(ObjectKind::DualSphere) || model.kind(d1) != Some(ObjectKind::DualSphere) {
                continue;
            }
            let (Some(t0s), Some(t1s)) = (over.get(&d0), over.get(&d1)) else { continue };
            for &t0 in t0s {
                let Some(label) = model.object(t0).ok().and_then(|t| t.dual_of).and_then(|w| model.disk_label(w).ok())
                else {
                    continue;
                };
                for &t1 in t1s {
                    self.add_edge(next, t0, t1, label.clone());
                    next += 1;
                }
            }
        }
    }

    /// BFS distances from a set of roots.
    pub fn distances(&self, roots: &[ObjectId]) -> BTreeMap<ObjectId, usize> {
        let mut dist = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &r in roots {
            if self.contains(r) && !dist.contains_key(&r) {
                dist.insert(r, 0);
                queue.push_back(r);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            for &i in self.incident(v) {
                let w = self.edges[i].other(v);
                if !dist.contains_key(&w) {
                    dist.insert(w, d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Induced subgraph on `keep`.
    pub fn induced(&self, keep: &BTreeSet<ObjectId>) -> Self {
        let mut g = IntersectionGraph::new();
        for &v in keep {
            if let Some(&c) = self.quotient.get(&v) {
                g.add_vertex(v, c);
            }
        }
        for e in &self.edges {
            if keep.contains(&e.ends[0]) && keep.contains(&e.ends[1]) {
                g.add_edge(e.key, e.ends[0], e.ends[1], e.label.clone());
            }
        }
        g
    }

    /// Induced subgraph on vertices within distance `n` of the roots.
    pub fn ball(&self, roots: &[ObjectId], n: usize) -> Self {
        let keep = self.distances(roots).into_iter().filter(|&(_, d)| d <= n).map(|(v, _)| v).collect();
        self.induced(&keep)
    }

    /// Merges each quotient class into its smallest vertex.
    pub fn quotient_graph(&self) -> Self {
        let mut rep: BTreeMap<ClassId, ObjectId> = BTreeMap::new();
        for (&v, &c) in &self.quotient {
            rep.entry(c).or_insert(v);
        }
        let mut g = IntersectionGraph::new();
        for (&c, &v) in &rep {
            g.add_vertex(v, c);
        }
        for e in &self.edges {
            let a = rep[&self.quotient[&e.ends[0]]];
            let b = rep[&self.quotient[&e.ends[1]]];
            g.add_edge(e.key, a, b, e.label.clone());
        }
        g
    }

    /// Representative of `v`'s class in [`quotient_graph`](Self::quotient_graph).
    pub fn representative(&self, v: ObjectId) -> ObjectId {
        let c = self.quotient[&v];
        self.quotient.iter().find(|&(_, &k)| k == c).map(|(&w, _)| w).unwrap()
    }

    /// Every vertex's representative.
    pub fn representatives(&self) -> BTreeMap<ObjectId, ObjectId> {
        let mut rep: BTreeMap<ClassId, ObjectId> = BTreeMap::new();
        for (&v, &c) in &self.quotient {
            rep.entry(c).or_insert(v);
        }
        self.quotient.iter().map(|(&v, c)| (v, rep[c])).collect()
    }

    pub fn is_quotient_injective(&self) -> bool {
        let classes: BTreeSet<_> = self.quotient.values().collect();
        classes.len() == self.quotient.len()
    }
}

/// A graph's quotient together with the representative map.
pub(crate) struct QuotientView {
    pub quotient: IntersectionGraph,
    pub reps: BTreeMap<ObjectId, ObjectId>,
}

impl QuotientView {
    pub fn new(graph: &IntersectionGraph) -> Self {
        QuotientView { quotient: graph.quotient_graph(), reps: graph.representatives() }
    }
}

/// Compact, finite labeled multigraph with vertex colors, indexed `0..len`.
#[derive(Clone, Debug)]
pub(crate) struct SmallGraph {
    pub colors: Vec<(u32, u32)>,
    /// Neighbor to sorted label ids; a loop is keyed by the vertex itself.
    pub adj: Vec<BTreeMap<usize, Vec<u32>>>,
    /// Label id to label text; ids follow text order.
    pub names: Vec<String>,
}

impl SmallGraph {
    /// The radius-`n` ball around the root classes of the quotient graph.
    /// Vertex color is `(root color + 1, distance)`, with `0` for non-roots.
    pub fn ball(graph: &IntersectionGraph, roots: &BTreeMap<ObjectId, u32>, n: usize) -> SmallGraph {
        Self::ball_in(&QuotientView::new(graph), roots, n)
    }

    /// As [`ball`](Self::ball), reusing a precomputed quotient.
    pub fn ball_in(view: &QuotientView, roots: &BTreeMap<ObjectId, u32>, n: usize) -> SmallGraph {
        let q = &view.quotient;
        let mut root_color: BTreeMap<ObjectId, u32> = BTreeMap::new();
        for (&r, &c) in roots {
            if let Some(&rep) = view.reps.get(&r) {
                let e = root_color.entry(rep).or_insert(c + 1);
                *e = (*e).min(c + 1);
            }
        }
        let reps: Vec<ObjectId> = root_color.keys().copied().collect();
        let dist = q.distances(&reps);
        let verts: Vec<ObjectId> = dist.iter().filter(|&(_, &d)| d <= n).map(|(&v, _)| v).collect();
        let index: BTreeMap<ObjectId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let inside: Vec<(usize, usize, String)> = q
            .edges()
            .iter()
            .filter_map(|e| {
                let a = *index.get(&e.ends[0])?;
                let b = *index.get(&e.ends[1])?;
                Some((a, b, e.label.class().to_string()))
            })
            .collect();
        let names: Vec<String> = inside.iter().map(|(_, _, l)| l.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let mut adj = vec![BTreeMap::<usize, Vec<u32>>::new(); verts.len()];
        for (a, b, l) in inside {
            let id = names.binary_search(&l).unwrap() as u32;
            adj[a].entry(b).or_default().push(id);
            if a != b {
                adj[b].entry(a).or_default().push(id);
            }
        }
        for row in &mut adj {
            for ids in row.values_mut() {
                ids.sort_unstable();
            }
        }
        let colors = verts
            .iter()
            .map(|v| (root_color.get(v).copied().unwrap_or(0), dist[v] as u32))
            .collect();
        SmallGraph { colors, adj, names }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn between(&self, i: usize, j: usize) -> &[u32] {
        self.adj[i].get(&j).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Label texts of the edges between `i` and `j`, sorted.
    pub fn labels(&self, i: usize, j: usize) -> Vec<String> {
        self.between(i, j).iter().map(|&id| self.names[id as usize].clone()).collect()
    }

    pub fn edge_count(&self) -> usize {
        let mut total = 0;
        for (i, row) in self.adj.iter().enumerate() {
            total += row.range(i..).map(|(_, ids)| ids.len()).sum::<usize>();
        }
        total
    }

    /// Swapping `u` and `v` is an automorphism.
    pub fn twins(&self, u: usize, v: usize) -> bool {
        if self.colors[u] != self.colors[v] || self.between(u, u) != self.between(v, v) {
            return false;
        }
        let strip = |x: usize| self.adj[x].iter().filter(|(&w, _)| w != u && w != v);
        strip(u).eq(strip(v))
    }
}
