//! From a transverse pair to capped gropes whose intersections near a
//! distinguished cap form a tree.
//!
//! The sphere `A` becomes a height-2 dyadic grope, which is split to
//! distance `n`. Every stage gets the stage construction, and each cap
//! intersection is pushed off the grope over the dual sphere of the stage
//! where the two caps' dyadic labels part ways. With the grope embedded the
//! ledger is discharged and certified. Finally a depth-`n` segment of the
//! universal cover of the split cap graph is implanted around the
//! distinguished cap, one fresh grope per vertex of the segment.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::cycles::girth;
use crate::error::{Error, Result};
use crate::graph::IntersectionGraph;
use crate::group::GroupWord;
use crate::handles::{attach_stage_handles, certify, discharge_all, Certificate, CertificateReport};
use crate::model::grope::{label_of, sphere_to_capped_grope, CappedGrope, DyadicLabel};
use crate::model::{EdgeRole, Model, ObjectId, ObjectKind, TransversePair};
use crate::oracles::{is_tree_ball, TreeVerdict};
use crate::split::{split_to_distance_with, DEFAULT_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub height: u32,
    pub budget: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { height: 2, budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeReport {
    pub n: usize,
    pub grope: ObjectId,
    /// The distinguished cap, or the base when the grope has none.
    pub root: ObjectId,
    pub splits: usize,
    /// Cap intersections pushed off the grope.
    pub pushed: usize,
    /// Gropes implanted around the root.
    pub implanted: usize,
    pub verdict: TreeVerdict,
    /// Girth of the final quotient cap graph; `None` when it has no cycle.
    pub girth: Option<usize>,
    pub labels: BTreeSet<String>,
    pub certificate: CertificateReport,
}

impl TreeReport {
    pub fn is_tree(&self) -> bool {
        self.verdict.is_tree
    }
}

pub fn theorem1_pipeline(model: &Model, pair: &TransversePair, n: usize) -> Result<(Model, TreeReport)> {
    theorem1_pipeline_with(model, pair, n, PipelineConfig::default())
}

fn budget_check(m: &Model, budget: usize, extra: usize, stage: &str) -> Result<()> {
    let objects = m.object_count() + extra;
    if objects > budget {
        return Err(Error::Budget { budget, objects, stage: stage.into() });
    }
    Ok(())
}

fn common_prefix(a: &DyadicLabel, b: &DyadicLabel) -> usize {
    if a.branch != b.branch {
        return 0;
    }
    a.bits.iter().zip(&b.bits).take_while(|(x, y)| x == y).count()
}

/// Stage-construction dual spheres: the dual of each non-base surface and
/// the 2-handle that created it.
fn stage_duals(m: &mut Model, grope: ObjectId) -> Result<BTreeMap<ObjectId, (ObjectId, usize)>> {
    for s in CappedGrope::of(m, grope)?.stages(m)? {
        for i in 0..m.object(s)?.children.len() {
            *m = attach_stage_handles(m, s, i)?;
        }
    }
    let mut out = BTreeMap::new();
    for r in m.ledger.records.iter().filter(|r| r.dimension == 2) {
        for &d in &r.created_duals {
            if m.object(d)?.site.is_none() {
                out.insert(r.site, (d, r.index));
            }
        }
    }
    Ok(out)
}

/// `id`'s ancestors from the base's child down to `id` itself.
fn ancestry(m: &Model, id: ObjectId) -> Result<Vec<ObjectId>> {
    let mut out = vec![id];
    let mut cur = id;
    while let Some(p) = m.object(cur)?.parent {
        if m.object(p)?.kind == ObjectKind::BaseSurface {
            break;
        }
        out.push(p);
        cur = p;
    }
    out.reverse();
    Ok(out)
}

/// Replaces every intersection at a cap of `grope` by a pass over a stage
/// dual sphere, recording how the new 3-handles meet the 2-handles.
fn push_off(m: &mut Model, grope: ObjectId, duals: &BTreeMap<ObjectId, (ObjectId, usize)>) -> Result<usize> {
    let caps: BTreeSet<ObjectId> = CappedGrope::of(m, grope)?.caps(m)?.into_iter().collect();
    let mut labels = BTreeMap::new();
    for &c in &caps {
        labels.insert(c, label_of(m, c)?.ok_or_else(|| Error::Shape { object: c, reason: "unlabeled cap".into() })?);
    }
    let edges: Vec<_> = m
        .edges()
        .filter(|e| e.role == EdgeRole::Intersection && e.endpoints.iter().any(|x| caps.contains(x)))
        .map(|e| e.id)
        .collect();
    let partner = |m: &Model, s: ObjectId| -> Result<ObjectId> {
        let p = m.object(s)?.parent.ok_or_else(|| Error::Shape { object: s, reason: "stage has no parent".into() })?;
        let pair = m.object(p)?.children.iter().find(|c| c.contains(&s)).copied().unwrap();
        Ok(if pair[0] == s { pair[1] } else { pair[0] })
    };
    for &id in &edges {
        let e = m.remove_edge(id).unwrap();
        let [x, y] = if caps.contains(&e.endpoints[0]) { e.endpoints } else { [e.endpoints[1], e.endpoints[0]] };
        let label = if x == e.endpoints[0] { e.label.clone() } else { e.label.invert() };
        let lcp = labels.get(&y).map_or(0, |ly| common_prefix(&labels[&x], ly));
        let up = ancestry(m, x)?;
        let s = up[lcp.min(up.len() - 1)];
        let (dual, h) = duals[&s];
        let other = match labels.get(&y) {
            Some(_) if y != x => {
                let uy = ancestry(m, y)?;
                duals[&uy[lcp.min(uy.len() - 1)]].1
            }
            _ => duals[&partner(m, s)?].1,
        };
        // y passes over the dual sphere instead of through x
        m.add_edge(y, dual, label.clone(), None, EdgeRole::Dual);
        if other != h {
            m.ledger.record_incidence(h.min(other), h.max(other), label, 1);
        }
    }
    Ok(edges.len())
}

/// A non-backtracking walk from the root in the quotient cap graph: the
/// vertex it ends at and the edge it arrived by.
struct Node {
    vertex: ObjectId,
    parent: Option<usize>,
    label: GroupWord,
    depth: usize,
}

fn unfold(g: &IntersectionGraph, root: ObjectId, n: usize, limit: usize) -> Option<Vec<Node>> {
    let mut nodes = vec![Node { vertex: root, parent: None, label: GroupWord::identity(), depth: 0 }];
    let mut via: Vec<Option<(usize, bool)>> = vec![None];
    let mut queue: VecDeque<usize> = [0].into_iter().collect();
    while let Some(i) = queue.pop_front() {
        if nodes[i].depth == n {
            continue;
        }
        let v = nodes[i].vertex;
        for &k in g.incident(v) {
            let e = g.edge(k);
            for forward in [true, false] {
                let (tail, head) = if forward { (e.ends[0], e.ends[1]) } else { (e.ends[1], e.ends[0]) };
                if tail != v || via[i] == Some((k, !forward)) {
                    continue;
                }
                if nodes.len() >= limit {
                    return None;
                }
                let label = if forward { e.label.clone() } else { e.label.invert() };
                nodes.push(Node { vertex: head, parent: Some(i), label, depth: nodes[i].depth + 1 });
                via.push(Some((k, forward)));
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    Some(nodes)
}

pub fn theorem1_pipeline_with(
    model: &Model,
    pair: &TransversePair,
    n: usize,
    config: PipelineConfig,
) -> Result<(Model, TreeReport)> {
    if n == 0 {
        return Err(Error::Precondition("scale must be positive".into()));
    }
    let pair = model.pair(pair.distinguished)?;
    if !model.is_algebraically_trivial(&pair) {
        return Err(Error::Precondition("pair is not algebraically trivial".into()));
    }
    let (m, grope) = sphere_to_capped_grope(model, &pair, config.height)?;
    let (mut m, split) = split_to_distance_with(&m, grope, n, config.budget)?;
    let caps = CappedGrope::of(&m, grope)?.caps(&m)?;
    let cover = IntersectionGraph::cap_graph(&m);

    let duals = stage_duals(&mut m, grope)?;
    budget_check(&m, config.budget, 0, "stage handles")?;
    let pushed = push_off(&mut m, grope, &duals)?;
    m = discharge_all(&m)?;
    let cert = certify(&m.ledger)?;
    let certificate = m.ledger.report(&cert, false);

    let root = caps.first().copied().unwrap_or(grope);
    let mut implanted = 0;
    if let Some(&c) = caps.first() {
        let q = cover.quotient_graph();
        let per = 7;
        let room = config.budget.saturating_sub(m.object_count()) / per + 1;
        let nodes = unfold(&q, cover.representative(c), n, room).ok_or_else(|| Error::Budget {
            budget: config.budget,
            objects: m.object_count() + room * per,
            stage: format!("implanting the radius-{n} cover segment"),
        })?;
        let mut image = vec![c];
        for node in &nodes[1..] {
            let (_, branches) = m.add_dyadic_grope(1, config.height)?;
            let bits = label_of(&m, node.vertex)?.map(|l| l.bits).unwrap_or_default();
            let slot = bits.iter().fold(0usize, |acc, &b| acc * 2 + b as usize).min(branches[0].len() - 1);
            let cap = branches[0][slot];
            m.add_edge(image[node.parent.unwrap()], cap, node.label.clone(), None, EdgeRole::Intersection);
            image.push(cap);
        }
        implanted = nodes.len() - 1;
        budget_check(&m, config.budget, 0, "implant")?;
    }

    let mut graph = IntersectionGraph::cap_graph(&m);
    if !graph.contains(root) {
        graph.add_vertex(root, m.object(root)?.class);
    }
    let verdict = is_tree_ball(&graph, root, n)?;
    let labels = m.edges().map(|e| e.label.to_string()).collect();
    let report = TreeReport {
        n,
        grope,
        root,
        splits: split.splits,
        pushed,
        implanted,
        verdict,
        girth: girth(&graph.quotient_graph()),
        labels,
        certificate,
    };
    debug_assert!(matches!(cert, Certificate::Identity | Certificate::UpperTriangularUnits));
    Ok((m, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::find_cycles;
    use crate::gen;
    use crate::model::validate;

    fn audit(input: &Model, out: &Model) {
        let allowed: BTreeSet<GroupWord> = input.label_set();
        for e in out.edges() {
            let l = &e.label;
            let ok = l.is_identity() || allowed.contains(l) || allowed.contains(&l.invert());
            assert!(ok, "label {l} outside the input labels");
        }
    }

    #[test]
    fn no_extras_is_a_point() {
        let mut m = Model::new(1);
        let pair = m.add_sphere_pair();
        let (out, r) = theorem1_pipeline(&m, &pair, 2).unwrap();
        assert!(r.is_tree());
        assert_eq!((r.verdict.vertices, r.verdict.edges), (1, 0));
        assert_eq!(r.certificate.verdict, Certificate::Identity.verdict());
        assert!(validate(&out).is_empty());
    }

    #[test]
    fn figure_cycle_gives_a_tree() {
        let (m, pair) = gen::figure_cycle();
        let (out, r) = theorem1_pipeline(&m, &pair, 3).unwrap();
        assert!(r.is_tree());
        assert!(r.girth.map_or(true, |g| g >= 3));
        assert_eq!(r.certificate.verdict, Certificate::UpperTriangularUnits.verdict());
        assert!(validate(&out).is_empty(), "{:?}", validate(&out));
        audit(&m, &out);
    }

    #[test]
    fn two_labels_two_pairings() {
        let mut m = Model::new(2);
        let pair = m.add_sphere_pair();
        m.add_paired_intersections(pair.sphere_a, pair.sphere_b, GroupWord::generator(0)).unwrap();
        m.add_paired_intersections(pair.sphere_a, pair.sphere_b, GroupWord::generator(1)).unwrap();
        let (out, r) = theorem1_pipeline(&m, &pair, 2).unwrap();
        assert!(r.is_tree());
        let g = IntersectionGraph::cap_graph(&out).ball(&[r.root], 2);
        assert!(find_cycles(&g, 2).is_empty());
        assert_eq!(r.certificate.verdict, Certificate::UpperTriangularUnits.verdict());
    }

    #[test]
    fn self_pairings_grow_a_nontrivial_tree() {
        let mut m = Model::new(2);
        let pair = m.add_sphere_pair();
        m.add_paired_intersections(pair.sphere_a, pair.sphere_a, GroupWord::generator(0)).unwrap();
        m.add_paired_intersections(pair.sphere_a, pair.sphere_a, GroupWord::generator(1)).unwrap();
        for n in [2, 3] {
            let (out, r) = theorem1_pipeline(&m, &pair, n).unwrap();
            assert!(r.is_tree(), "{:?}", r.verdict);
            assert!(r.verdict.edges > 0);
            assert!(validate(&out).is_empty(), "{:?}", validate(&out));
            audit(&m, &out);
        }
    }

    #[test]
    fn random_pairs_give_trees() {
        let mut rng = gen::rng(4);
        for _ in 0..10 {
            let (m, pair) = gen::random_pair(&mut rng, 2, 2, true).unwrap();
            let (out, r) = theorem1_pipeline(&m, &pair, 2).unwrap();
            assert!(r.is_tree());
            assert!(out.ledger.obligations.is_empty());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let mut m = Model::new(2);
        let pair = m.add_sphere_pair();
        m.add_paired_intersections(pair.sphere_a, pair.sphere_a, GroupWord::generator(0)).unwrap();
        let config = PipelineConfig { budget: 20, ..PipelineConfig::default() };
        assert!(matches!(theorem1_pipeline_with(&m, &pair, 3, config), Err(Error::Budget { .. })));
    }

    #[test]
    fn unpaired_extras_are_rejected() {
        let mut m = Model::new(1);
        let pair = m.add_sphere_pair();
        m.add_edge(pair.sphere_a, pair.sphere_b, GroupWord::generator(0), None, EdgeRole::Intersection);
        assert!(matches!(theorem1_pipeline(&m, &pair, 2), Err(Error::Precondition(_))));
    }
}
