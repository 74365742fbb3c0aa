//! Splitting along arcs: surfaces and caps (with dual doubling), iterated
//! to dyadic form and to distance n; transverse pairs; Whitney disks.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::canon::{ntypes, NType};
use crate::cycles::shortest_cycle_through;
use crate::error::{Error, Result};
use crate::graph::IntersectionGraph;
use crate::model::grope::slot_of;
use crate::model::{label_of, CappedGrope, EdgeId, EdgeRole, Model, ObjectId, ObjectKind, TransversePair, WhitneyTower};

/// Default cap on the object count of any iterated split.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Something a split has to hand to one of the two pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attachment {
    /// One end of an intersection edge; `end` indexes the edge's endpoints.
    End { edge: EdgeId, end: u8 },
    /// A dual pair attached to the target surface, by index.
    Pair(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub target: ObjectId,
    pub parts: [BTreeSet<Attachment>; 2],
}

impl SplitPlan {
    pub fn new(
        target: ObjectId,
        first: impl IntoIterator<Item = Attachment>,
        second: impl IntoIterator<Item = Attachment>,
    ) -> Self {
        SplitPlan { target, parts: [first.into_iter().collect(), second.into_iter().collect()] }
    }

    /// Everything a split of `target` must distribute: intersection-edge ends
    /// at the target and its dual pairs.
    pub fn incident(model: &Model, target: ObjectId) -> Result<BTreeSet<Attachment>> {
        let o = model.object(target)?;
        let mut out: BTreeSet<Attachment> = (0..o.children.len()).map(Attachment::Pair).collect();
        for e in model.intersections_at(target) {
            for end in 0..2u8 {
                if e.endpoints[end as usize] == target {
                    out.insert(Attachment::End { edge: e.id, end });
                }
            }
        }
        Ok(out)
    }

    /// `first` against everything else incident to `target`.
    pub fn split_off(model: &Model, target: ObjectId, first: BTreeSet<Attachment>) -> Result<Self> {
        let rest = Self::incident(model, target)?.difference(&first).copied().collect();
        let plan = SplitPlan { target, parts: [first, rest] };
        plan.check(model)?;
        Ok(plan)
    }

    pub fn check(&self, model: &Model) -> Result<()> {
        let [p, q] = &self.parts;
        if p.is_empty() || q.is_empty() {
            return Err(Error::Plan(format!("both parts of a split of {} must be nonempty", self.target)));
        }
        if let Some(x) = p.intersection(q).next() {
            return Err(Error::Plan(format!("{x:?} is in both parts")));
        }
        let union: BTreeSet<_> = p.union(q).copied().collect();
        let incident = Self::incident(model, self.target)?;
        if union != incident {
            let missing = incident.difference(&union).count();
            let foreign = union.difference(&incident).count();
            return Err(Error::Plan(format!(
                "parts do not cover {} exactly ({missing} missing, {foreign} foreign)",
                self.target
            )));
        }
        Ok(())
    }

    fn part_of(&self, a: &Attachment) -> usize {
        usize::from(self.parts[1].contains(a))
    }

    /// Rejects plans that separate the two intersections of a Whitney pairing.
    fn check_pairings(&self, model: &Model) -> Result<()> {
        let mut side: BTreeMap<_, usize> = BTreeMap::new();
        for (i, part) in self.parts.iter().enumerate() {
            for a in part {
                let Attachment::End { edge, .. } = a else { continue };
                if let Some(p) = model.edge(*edge)?.pairing {
                    if *side.entry(p).or_insert(i) != i {
                        return Err(Error::Plan(format!("plan splits Whitney pairing {p}; split pairs, not points")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Moves the part-2 attachments of `plan.target` onto `piece`.
fn hand_over(m: &mut Model, plan: &SplitPlan, piece: ObjectId) -> Result<()> {
    let target = plan.target;
    let pairs = std::mem::take(&mut m.object_mut(target)?.children);
    let mut kept = Vec::new();
    let mut moved = Vec::new();
    for (i, pair) in pairs.into_iter().enumerate() {
        if plan.part_of(&Attachment::Pair(i)) == 0 {
            kept.push(pair);
        } else {
            moved.push(pair);
        }
    }
    for c in moved.iter().flatten() {
        m.object_mut(*c)?.parent = Some(piece);
    }
    {
        let t = m.object_mut(target)?;
        t.genus = kept.len() as u32;
        t.children = kept;
    }
    {
        let p = m.object_mut(piece)?;
        p.genus = moved.len() as u32;
        p.children = moved;
    }
    for a in &plan.parts[1] {
        if let Attachment::End { edge, end } = *a {
            m.edge_mut(edge)?.endpoints[end as usize] = piece;
        }
    }
    Ok(())
}

fn base_of(m: &Model, mut x: ObjectId) -> Result<ObjectId> {
    while let Some(p) = m.object(x)?.parent {
        x = p;
    }
    Ok(x)
}

fn refresh_dyadic(m: &mut Model, base: ObjectId) -> Result<()> {
    let mut dyadic = true;
    for s in CappedGrope::of(m, base)?.stages(m)? {
        let o = m.object(s)?;
        dyadic &= o.kind == ObjectKind::BaseSurface || o.genus == 1;
    }
    m.object_mut(base)?.dyadic = dyadic;
    Ok(())
}

pub(crate) fn split_surface_in(m: &mut Model, plan: &SplitPlan) -> Result<ObjectId> {
    let target = plan.target;
    let kind = m.object(target)?.kind;
    match kind {
        ObjectKind::Cap | ObjectKind::StageSurface => {}
        ObjectKind::BaseSurface => {
            return Err(Error::Plan(format!("{target} is a base surface; split it as a transverse pair instead")))
        }
        other => return Err(Error::Precondition(format!("{target} is a {}, not a stage or cap", other.name()))),
    }
    plan.check(m)?;
    let (parent, idx, slot) =
        slot_of(m, target)?.ok_or_else(|| Error::Shape { object: target, reason: "no parent surface".into() })?;
    let sibling = m.object(parent)?.children[idx][1 - slot];

    let piece = m.add_object(kind);
    m.object_mut(piece)?.parent = Some(parent);
    hand_over(m, plan, piece)?;

    // the dual of the new piece is a parallel copy of the sibling subgrope
    let set = m.with_whitney_data(&m.subtree(sibling)?.into_iter().collect());
    let copy = m.parallel_copy(&set)?.get(sibling);
    let p = m.object_mut(parent)?;
    p.children.push(if slot == 0 { [piece, copy] } else { [copy, piece] });
    p.genus += 1;

    let base = base_of(m, parent)?;
    refresh_dyadic(m, base)?;
    Ok(piece)
}

/// Splits a stage or cap along an arc. The target keeps part 1, a new piece
/// takes part 2, and the parent surface gains a dual pair made of the new
/// piece and a parallel copy of the target's dual subgrope.
pub fn split_surface(model: &Model, plan: &SplitPlan) -> Result<Model> {
    let mut m = model.clone();
    split_surface_in(&mut m, plan)?;
    Ok(m)
}

/// Splits the transverse pair along an arc in one of its spheres.
///
/// The target sphere keeps part 1 and a new sphere takes part 2; the partner
/// sphere is doubled so that each piece has its own transverse partner. The
/// partner's other intersections are duplicated onto the double, and the
/// ledger gains the 2-handle of the surgery with a pending obligation.
pub fn split_transverse_pair(model: &Model, pair: &TransversePair, plan: &SplitPlan) -> Result<(Model, TransversePair)> {
    let target = plan.target;
    let partner = if target == pair.sphere_a {
        pair.sphere_b
    } else if target == pair.sphere_b {
        pair.sphere_a
    } else {
        return Err(Error::Precondition(format!("{target} is not a sphere of the pair")));
    };
    for s in [target, partner] {
        if model.object(s)?.kind != ObjectKind::Sphere {
            return Err(Error::Precondition(format!("{s} is not a sphere")));
        }
        if model.edges_at(s).any(|e| e.role == EdgeRole::Dual) {
            return Err(Error::Precondition(format!("{s} already carries handle duals")));
        }
    }
    plan.check(model)?;
    plan.check_pairings(model)?;

    let mut m = model.clone();
    let piece = m.add_object(ObjectKind::Sphere);
    let double = m.add_object(ObjectKind::Sphere);
    hand_over(&mut m, plan, piece)?;

    let mut fresh = BTreeMap::new();
    let partner_edges: Vec<_> = m.edges_at(partner).cloned().collect();
    for e in partner_edges {
        match e.role {
            EdgeRole::Distinguished => {
                let (a, b) = if target == pair.sphere_a { (piece, double) } else { (double, piece) };
                m.add_edge(a, b, e.label.clone(), None, EdgeRole::Distinguished);
            }
            EdgeRole::Intersection if e.touches(piece) => {
                let edge = m.edge_mut(e.id)?;
                for x in &mut edge.endpoints {
                    if *x == partner {
                        *x = double;
                    }
                }
            }
            EdgeRole::Intersection if e.touches(target) => {}
            _ => {
                let pairing = e.pairing.map(|p| *fresh.entry(p).or_insert_with(|| m.fresh_pairing()));
                let ends = e.endpoints.map(|x| if x == partner { double } else { x });
                m.add_edge(ends[0], ends[1], e.label.clone(), pairing, e.role);
            }
        }
    }
    for (p, q) in fresh {
        if let Some(d) = m.whitney_disk_for(p) {
            let layer = m.object(d)?.layer;
            let nd = m.add_object(ObjectKind::WhitneyDisk);
            let o = m.object_mut(nd)?;
            o.layer = layer;
            o.cancels = Some(q);
        }
    }
    m.ledger.attach_two_handle(target, Vec::new(), vec![target, piece]);

    let new_pair = m
        .pairs()
        .into_iter()
        .find(|p| p.sphere_a == piece || p.sphere_b == piece)
        .ok_or_else(|| Error::Reference("new pair lost its distinguished edge".into()))?;
    Ok((m, new_pair))
}

/// Splits a Whitney disk by a finger move: the disk keeps part 1 and still
/// cancels its pairing; a new disk takes part 2 and cancels a fresh pair of
/// intersections between the two surfaces one layer down.
pub fn split_whitney_disk(model: &Model, tower: &WhitneyTower, disk: ObjectId, plan: &SplitPlan) -> Result<Model> {
    if !tower.layers.iter().flatten().any(|&d| d == disk) {
        return Err(Error::Precondition(format!("{disk} is not a Whitney disk of the tower")));
    }
    if plan.target != disk {
        return Err(Error::Plan(format!("plan targets {}, not {disk}", plan.target)));
    }
    plan.check(model)?;
    plan.check_pairings(model)?;
    let [s1, s2] = model.disk_surfaces(disk)?;
    let label = model.disk_label(disk)?;

    let mut m = model.clone();
    let layer = m.object(disk)?.layer;
    let piece = m.add_object(ObjectKind::WhitneyDisk);
    hand_over(&mut m, plan, piece)?;
    let q = m.fresh_pairing();
    m.add_edge(s1, s2, label.clone(), Some(q), EdgeRole::Intersection);
    m.add_edge(s1, s2, label, Some(q), EdgeRole::Intersection);
    let o = m.object_mut(piece)?;
    o.layer = layer;
    o.cancels = Some(q);
    Ok(m)
}

fn budget_check(m: &Model, budget: usize, stage: &str) -> Result<()> {
    if m.object_count() > budget {
        return Err(Error::Budget { budget, objects: m.object_count(), stage: stage.into() });
    }
    Ok(())
}

type GroupKey = (String, Option<Vec<u8>>);

/// A split that moves `cap` towards the dyadic conditions, if it violates one.
/// Loops go first: their two ends are separated. Otherwise the ends are
/// grouped by (edge label, dyadic bits of the neighbor) and the first group
/// is split off.
fn cap_plan(m: &Model, cap: ObjectId) -> Result<Option<SplitPlan>> {
    let ends = SplitPlan::incident(m, cap)?;
    let has_loop = m.intersections_at(cap).any(|e| e.is_loop());
    if has_loop {
        let mut first = BTreeSet::new();
        for a in &ends {
            let Attachment::End { edge, end } = *a else { continue };
            if !m.edge(edge)?.is_loop() || end == 0 {
                first.insert(*a);
            }
        }
        return SplitPlan::split_off(m, cap, first).map(Some);
    }
    let mut groups: BTreeMap<GroupKey, BTreeSet<Attachment>> = BTreeMap::new();
    for a in &ends {
        let Attachment::End { edge, end } = *a else { continue };
        let e = m.edge(edge)?;
        let other = e.endpoints[1 - end as usize];
        let bits = label_of(m, other)?.map(|l| l.bits);
        groups.entry((e.label.class().to_string(), bits)).or_default().insert(*a);
    }
    if groups.len() < 2 {
        return Ok(None);
    }
    let first = groups.into_values().next().unwrap_or_default();
    SplitPlan::split_off(m, cap, first).map(Some)
}

/// Splits stages of genus above one, deepest first, until every non-base
/// stage has genus one.
fn restore_stages(m: &mut Model, base: ObjectId, budget: usize, splits: &mut usize) -> Result<()> {
    loop {
        budget_check(m, budget, "dyadic stages")?;
        let mut worst: Option<(usize, ObjectId)> = None;
        for s in CappedGrope::of(m, base)?.stages(m)? {
            let o = m.object(s)?;
            if o.kind == ObjectKind::StageSurface && o.genus > 1 {
                let depth = label_of(m, s)?.map_or(0, |l| l.bits.len());
                if worst.map_or(true, |(d, _)| depth > d) {
                    worst = Some((depth, s));
                }
            }
        }
        let Some((_, s)) = worst else { break };
        let genus = m.object(s)?.genus as usize;
        let plan = SplitPlan::new(s, [Attachment::Pair(0)], (1..genus).map(Attachment::Pair));
        split_surface_in(m, &plan)?;
        *splits += 1;
    }
    m.object_mut(base)?.dyadic = true;
    Ok(())
}

fn dyadic_in(m: &mut Model, base: ObjectId, budget: usize, splits: &mut usize) -> Result<()> {
    let grope = CappedGrope::of(m, base)?;
    loop {
        budget_check(m, budget, "dyadic caps")?;
        let mut plan = None;
        for cap in grope.caps(m)? {
            if let Some(p) = cap_plan(m, cap)? {
                plan = Some(p);
                break;
            }
        }
        let Some(plan) = plan else { break };
        split_surface_in(m, &plan)?;
        *splits += 1;
    }
    restore_stages(m, base, budget, splits)
}

/// Iterated splitting to dyadic branches with clean caps: no cap meets
/// itself, and all edges at a cap carry one label and lead to caps with one
/// dyadic label.
pub fn split_to_dyadic(model: &Model, grope: ObjectId) -> Result<Model> {
    split_to_dyadic_with(model, grope, DEFAULT_BUDGET).map(|(m, _)| m)
}

pub fn split_to_dyadic_with(model: &Model, grope: ObjectId, budget: usize) -> Result<(Model, usize)> {
    CappedGrope::of(model, grope)?;
    let mut m = model.clone();
    let mut splits = 0;
    dyadic_in(&mut m, grope, budget, &mut splits)?;
    Ok((m, splits))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceReport {
    pub n: usize,
    pub splits: usize,
    pub objects: usize,
    pub ntypes: Vec<NType>,
}

/// Groups the intersection ends at `cap` so that no two ends in one group
/// could close a cycle of length at most `n` through the cap: two ends
/// conflict when their far endpoints lie within `n - 2` of each other in the
/// graph without the cap (a loop's two ends always conflict). Groups are
/// greedy colour classes of that conflict relation.
fn end_groups(m: &Model, graph: &IntersectionGraph, cap: ObjectId, n: usize) -> Result<Vec<Vec<Attachment>>> {
    let mut ends = Vec::new();
    for a in SplitPlan::incident(m, cap)? {
        if let Attachment::End { edge, end } = a {
            ends.push((a, m.edge(edge)?.endpoints[1 - end as usize]));
        }
    }
    let near = |from: ObjectId| -> BTreeSet<ObjectId> {
        let mut seen: BTreeSet<ObjectId> = [from].into_iter().collect();
        let mut frontier = vec![from];
        for _ in 0..n.saturating_sub(2) {
            let mut next = Vec::new();
            for v in frontier {
                for &i in graph.incident(v) {
                    let w = graph.edge(i).other(v);
                    if w != cap && seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        seen
    };
    let balls: Vec<BTreeSet<ObjectId>> = ends.iter().map(|&(_, far)| near(far)).collect();
    let conflict = |i: usize, j: usize| {
        let (fi, fj) = (ends[i].1, ends[j].1);
        (fi == cap && fj == cap && ends[i].0 != ends[j].0 && n >= 1) || (n >= 2 && balls[i].contains(&fj))
    };
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..ends.len() {
        match groups.iter_mut().find(|g| g.iter().all(|&j| !conflict(i, j))) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    Ok(groups.into_iter().map(|g| g.into_iter().map(|i| ends[i].0).collect()).collect())
}

/// The cap of `cycle` to split apart, with its end groups: the cheapest,
/// counting the parallel copies of its dual that the splits create.
fn cycle_cap(
    m: &Model,
    caps: &BTreeSet<ObjectId>,
    graph: &IntersectionGraph,
    cycle: &crate::cycles::Cycle,
    n: usize,
) -> Result<Option<(ObjectId, Vec<Vec<Attachment>>)>> {
    let mut best: Option<((usize, usize), ObjectId, Vec<Vec<Attachment>>)> = None;
    for &v in cycle.path.iter().filter(|v| caps.contains(v)) {
        let Some((parent, idx, slot)) = slot_of(m, v)? else { continue };
        let groups = end_groups(m, graph, v, n)?;
        if groups.len() < 2 {
            continue;
        }
        let dual = m.object(parent)?.children[idx][1 - slot];
        let key = ((groups.len() - 1) * graph.incident(dual).len().max(1), graph.incident(v).len());
        if best.as_ref().map_or(true, |(k, _, _)| key < *k) {
            best = Some((key, v, groups));
        }
    }
    Ok(best.map(|(_, v, g)| (v, g)))
}

/// Splits `cap` into one piece per group of its ends. A cap meeting its own
/// dual gains an end with every split (the dual's parallel copy meets it
/// too); those ends go to fresh copies and stay where they land.
fn split_groups(m: &mut Model, cap: ObjectId, groups: Vec<Vec<Attachment>>, budget: usize, splits: &mut usize) -> Result<()> {
    let mut cap = cap;
    let mut groups = groups.into_iter();
    groups.next();
    let mut rest: BTreeSet<Attachment> = groups.clone().flatten().collect();
    for group in groups {
        budget_check(m, budget, &format!("splitting {cap} apart"))?;
        // the target keeps its group and anything gained, the new piece
        // takes the groups still to come
        let incident: BTreeSet<Attachment> =
            SplitPlan::incident(m, cap)?.into_iter().filter(|a| matches!(a, Attachment::End { .. })).collect();
        let keep = incident.difference(&rest).copied().collect();
        let plan = SplitPlan::split_off(m, cap, keep)?;
        cap = split_surface_in(m, &plan)?;
        *splits += 1;
        for a in group {
            rest.remove(&a);
        }
    }
    Ok(())
}

/// Iterated splitting until the grope has no collision of length at most
/// `n` in the cap intersection graph, so every branch has an n-type.
pub fn split_to_distance(model: &Model, grope: ObjectId, n: usize) -> Result<Model> {
    split_to_distance_with(model, grope, n, DEFAULT_BUDGET).map(|(m, _)| m)
}

pub fn split_to_distance_with(model: &Model, grope: ObjectId, n: usize, budget: usize) -> Result<(Model, DistanceReport)> {
    if n == 0 {
        return Err(Error::Precondition("distance must be positive".into()));
    }
    let (mut m, mut splits) = split_to_dyadic_with(model, grope, budget)?;
    // Caps are cleared first and the stages restored afterwards: a parallel
    // copy of a cap on no short cycle is itself on none (for n <= 3), while
    // restoring stages early would copy caps that are still on cycles.
    loop {
        loop {
            budget_check(&m, budget, &format!("distance {n} after {splits} splits"))?;
            let caps: BTreeSet<ObjectId> = CappedGrope::of(&m, grope)?.caps(&m)?.into_iter().collect();
            let graph = IntersectionGraph::cap_graph(&m);
            let Some(cycle) = shortest_cycle_through(&graph, &caps, n) else { break };
            let (cap, groups) = cycle_cap(&m, &caps, &graph, &cycle, n)?
                .ok_or_else(|| Error::Precondition(format!("collision {cycle} cannot be split apart at a cap of {grope}")))?;
            let before = splits;
            split_groups(&mut m, cap, groups, budget, &mut splits)?;
            if splits == before {
                return Err(Error::Precondition(format!("collision {cycle} survives splitting {cap} apart")));
            }
        }
        let before = splits;
        restore_stages(&mut m, grope, budget, &mut splits)?;
        if splits == before {
            break;
        }
    }
    let ntypes = ntypes(&m, grope, n)?;
    let objects = m.object_count();
    Ok((m, DistanceReport { n, splits, objects, ntypes }))
}

/// Whitney pairings of the intersections at `sphere` (or any surface), by pairing.
fn sphere_pairings(m: &Model, sphere: ObjectId) -> BTreeMap<crate::model::PairingId, Vec<EdgeId>> {
    let mut out: BTreeMap<_, Vec<EdgeId>> = BTreeMap::new();
    for e in m.intersections_at(sphere) {
        if let Some(p) = e.pairing {
            out.entry(p).or_default().push(e.id);
        }
    }
    out
}

/// Splits transverse pairs until every sphere carries at most one Whitney
/// pairing of extra intersections, so the spheres are strung along lines
/// and cycles. Returns the number of splits.
pub fn split_pairs_to_line(model: &Model, budget: usize) -> Result<(Model, usize)> {
    let mut m = model.clone();
    let mut splits = 0;
    loop {
        budget_check(&m, budget, &format!("pair splitting after {splits} splits"))?;
        let mut next = None;
        'find: for pair in m.pairs() {
            for s in [pair.sphere_a, pair.sphere_b] {
                if m.kind(s) != Some(ObjectKind::Sphere) {
                    continue;
                }
                let pairings = sphere_pairings(&m, s);
                if pairings.len() > 1 {
                    let (_, edges) = pairings.into_iter().next().unwrap();
                    let mut first = BTreeSet::new();
                    for e in edges {
                        let edge = m.edge(e)?;
                        for end in 0..2u8 {
                            if edge.endpoints[end as usize] == s {
                                first.insert(Attachment::End { edge: e, end });
                            }
                        }
                    }
                    next = Some((pair, SplitPlan::split_off(&m, s, first)?));
                    break 'find;
                }
            }
        }
        let Some((pair, plan)) = next else { break };
        m = split_transverse_pair(&m, &pair, &plan)?.0;
        splits += 1;
    }
    Ok((m, splits))
}

/// Splits the Whitney disks of the tower on `pair` until each carries at
/// most one pairing of interior intersections. Returns the number of splits.
pub fn split_tower_to_single(model: &Model, pair: &TransversePair, budget: usize) -> Result<(Model, usize)> {
    let mut m = model.clone();
    let mut splits = 0;
    loop {
        budget_check(&m, budget, &format!("tower splitting after {splits} splits"))?;
        let tower = m.tower(pair);
        let mut next = None;
        for &d in tower.layers.iter().flatten() {
            let pairings = sphere_pairings(&m, d);
            if pairings.len() > 1 {
                let (_, edges) = pairings.into_iter().next().unwrap();
                let mut first = BTreeSet::new();
                for e in edges {
                    let edge = m.edge(e)?;
                    for end in 0..2u8 {
                        if edge.endpoints[end as usize] == d {
                            first.insert(Attachment::End { edge: e, end });
                        }
                    }
                }
                next = Some((tower, d, SplitPlan::split_off(&m, d, first)?));
                break;
            }
        }
        let Some((tower, disk, plan)) = next else { break };
        m = split_whitney_disk(&m, &tower, disk, &plan)?;
        splits += 1;
    }
    Ok((m, splits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::group::GroupWord;
    use crate::model::validate;
    use crate::oracles::collision_search;

    fn g() -> GroupWord {
        GroupWord::generator(0)
    }

    fn h() -> GroupWord {
        GroupWord::generator(1)
    }

    fn end(m: &Model, e: EdgeId, at: ObjectId) -> Attachment {
        let end = if m.edge(e).unwrap().endpoints[0] == at { 0 } else { 1 };
        Attachment::End { edge: e, end }
    }

    /// A genus-one, height-one grope whose first cap meets the caps of a
    /// second grope in a `g` point and an `h` point.
    fn mixed_cap() -> (Model, ObjectId, ObjectId, [EdgeId; 2]) {
        let mut m = Model::new(2);
        let (base, branches) = m.add_dyadic_grope(1, 1).unwrap();
        let (_, other) = m.add_dyadic_grope(1, 1).unwrap();
        let c = branches[0][0];
        let eg = m.add_edge(c, other[0][0], g(), None, EdgeRole::Intersection);
        let eh = m.add_edge(c, other[0][1], h(), None, EdgeRole::Intersection);
        (m, base, c, [eg, eh])
    }

    #[test]
    fn cap_split_doubles_the_dual() {
        let (m, base, c, [eg, eh]) = mixed_cap();
        let plan = SplitPlan::new(c, [end(&m, eg, c)], [end(&m, eh, c)]);
        let out = split_surface(&m, &plan).unwrap();
        assert!(validate(&out).is_empty(), "{:?}", validate(&out));
        let b = out.object(base).unwrap();
        assert_eq!(b.genus, 2);
        let [piece, copy] = b.children[1];
        assert_eq!(out.kind(piece), Some(ObjectKind::Cap));
        assert_eq!(out.kind(copy), Some(ObjectKind::Cap));
        assert_eq!(out.intersections_at(c).map(|e| e.label.clone()).collect::<Vec<_>>(), vec![g()]);
        assert_eq!(out.intersections_at(piece).map(|e| e.label.clone()).collect::<Vec<_>>(), vec![h()]);
        assert_ne!(out.object(piece).unwrap().class, out.object(c).unwrap().class);
        assert_eq!(out.label_set(), m.label_set());
    }

    #[test]
    fn splitting_a_loop_separates_its_ends_and_copies_cross_edges() {
        let mut m = Model::new(1);
        let (_, branches) = m.add_dyadic_grope(1, 1).unwrap();
        let [c, d] = [branches[0][0], branches[0][1]];
        let l = m.add_edge(c, c, g(), None, EdgeRole::Intersection);
        m.add_edge(d, d, g(), None, EdgeRole::Intersection);
        let plan = SplitPlan::new(c, [Attachment::End { edge: l, end: 0 }], [Attachment::End { edge: l, end: 1 }]);
        let out = split_surface(&m, &plan).unwrap();
        let piece = out.object(out.object(c).unwrap().parent.unwrap()).unwrap().children[1][0];
        let e = out.edge(l).unwrap();
        assert!(!e.is_loop());
        assert!(e.touches(c) && e.touches(piece));
        // the dual's copy gets its own loop and two edges across to the dual
        let copy = out.object(out.object(c).unwrap().parent.unwrap()).unwrap().children[1][1];
        assert_eq!(out.intersections_at(copy).filter(|e| e.is_loop()).count(), 1);
        assert_eq!(out.intersections_at(copy).filter(|e| e.touches(d) && !e.is_loop()).count(), 2);
    }

    #[test]
    fn base_surfaces_and_bad_plans_are_rejected() {
        let (m, base, c, [eg, eh]) = mixed_cap();
        let plan = SplitPlan::new(base, [Attachment::Pair(0)], []);
        assert!(matches!(split_surface(&m, &plan), Err(Error::Plan(_))));
        let one_sided = SplitPlan::new(c, [end(&m, eg, c), end(&m, eh, c)], []);
        assert!(matches!(split_surface(&m, &one_sided), Err(Error::Plan(_))));
        let partial = SplitPlan::new(c, [end(&m, eg, c)], []);
        assert!(matches!(split_surface(&m, &partial), Err(Error::Plan(_))));
    }

    #[test]
    fn dyadic_splitting_cleans_caps_and_is_a_fixpoint() {
        let (m, base, _, _) = mixed_cap();
        let (out, splits) = split_to_dyadic_with(&m, base, DEFAULT_BUDGET).unwrap();
        assert!(splits >= 1);
        assert!(out.object(base).unwrap().dyadic);
        for cap in CappedGrope::of(&out, base).unwrap().caps(&out).unwrap() {
            let labels: BTreeSet<_> = out.intersections_at(cap).map(|e| e.label.class()).collect();
            assert!(labels.len() <= 1, "{cap} meets {labels:?}");
        }
        let (again, more) = split_to_dyadic_with(&out, base, DEFAULT_BUDGET).unwrap();
        assert_eq!(more, 0);
        assert_eq!(again, out);
    }

    #[test]
    fn dyadic_splitting_preserves_height_and_labels() {
        let mut r = gen::rng(11);
        for _ in 0..20 {
            let spec = gen::GropeSpec { height: 2, irregular: true, ..gen::GropeSpec::default() };
            let (m, base) = gen::random_grope(&mut r, spec).unwrap();
            let out = split_to_dyadic(&m, base).unwrap();
            assert!(validate(&out).is_empty(), "{:?}", validate(&out));
            assert_eq!(out.label_set(), m.label_set());
            assert_eq!(out.object(base).unwrap().height, Some(2));
            for s in CappedGrope::of(&out, base).unwrap().stages(&out).unwrap() {
                let o = out.object(s).unwrap();
                assert!(o.kind == ObjectKind::BaseSurface || o.genus == 1);
            }
            for cap in CappedGrope::of(&out, base).unwrap().caps(&out).unwrap() {
                assert!(out.intersections_at(cap).all(|e| !e.is_loop()));
            }
        }
    }

    #[test]
    fn distance_splitting_leaves_no_collisions() {
        let mut r = gen::rng(5);
        for n in 1..=3 {
            for _ in 0..10 {
                let spec = gen::GropeSpec { edges: 5, ..gen::GropeSpec::default() };
                let (m, base) = gen::random_grope(&mut r, spec).unwrap();
                let (out, report) = split_to_distance_with(&m, base, n, DEFAULT_BUDGET).unwrap();
                assert_eq!(collision_search(&out, n), None);
                let branches = CappedGrope::of(&out, base).unwrap().branches(&out).unwrap();
                assert_eq!(report.ntypes.len(), branches.len());
                assert_eq!(out.label_set(), m.label_set());
                assert!(validate(&out).is_empty());
            }
        }
        assert!(matches!(split_to_distance(&Model::new(1), ObjectId(0), 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn budget_is_enforced() {
        let (m, base, _, _) = mixed_cap();
        assert!(matches!(split_to_dyadic_with(&m, base, 3), Err(Error::Budget { .. })));
    }

    /// A pair whose sphere `A` carries two Whitney pairings with `B`.
    fn two_pairings() -> (Model, TransversePair) {
        let mut m = Model::new(2);
        let pair = m.add_sphere_pair();
        m.add_paired_intersections(pair.sphere_a, pair.sphere_b, g()).unwrap();
        m.add_paired_intersections(pair.sphere_a, pair.sphere_b, h()).unwrap();
        (m, pair)
    }

    fn pairing_ends(m: &Model, sphere: ObjectId) -> Vec<BTreeSet<Attachment>> {
        let mut by: BTreeMap<_, BTreeSet<Attachment>> = BTreeMap::new();
        for e in m.intersections_at(sphere) {
            by.entry(e.pairing.unwrap()).or_default().insert(end(m, e.id, sphere));
        }
        by.into_values().collect()
    }

    #[test]
    fn transverse_pair_split_gives_each_piece_a_partner() {
        let (m, pair) = two_pairings();
        let ends = pairing_ends(&m, pair.sphere_a);
        let plan = SplitPlan::new(pair.sphere_a, ends[0].clone(), ends[1].clone());
        let (out, new_pair) = split_transverse_pair(&m, &pair, &plan).unwrap();
        assert!(validate(&out).is_empty(), "{:?}", validate(&out));
        assert_eq!(out.pairs().len(), 2);
        assert_ne!(new_pair, pair);
        assert_eq!(out.intersections_at(pair.sphere_a).count(), 2);
        assert_eq!(out.intersections_at(new_pair.sphere_a).count(), 2);
        assert!(out.is_algebraically_trivial(&pair) && out.is_algebraically_trivial(&new_pair));
        assert_eq!(out.ledger.obligations.len(), 1);
        assert_eq!(out.ledger.records.len(), 1);
    }

    #[test]
    fn transverse_pair_split_rejects_one_sided_and_pair_splitting_plans() {
        let (m, pair) = two_pairings();
        let ends = pairing_ends(&m, pair.sphere_a);
        let all: BTreeSet<Attachment> = ends.iter().flatten().copied().collect();
        let one_sided = SplitPlan::new(pair.sphere_a, all, []);
        assert!(matches!(split_transverse_pair(&m, &pair, &one_sided), Err(Error::Plan(_))));
        let mut mixed: Vec<Attachment> = ends[0].iter().copied().collect();
        let mut other: Vec<Attachment> = ends[1].iter().copied().collect();
        std::mem::swap(&mut mixed[0], &mut other[0]);
        let crossing = SplitPlan::new(pair.sphere_a, mixed, other);
        assert!(matches!(split_transverse_pair(&m, &pair, &crossing), Err(Error::Plan(_))));
    }

    /// A first-layer disk with `k` interior pairings against another
    /// first-layer disk.
    fn busy_disk(k: usize) -> (Model, TransversePair, ObjectId) {
        let mut m = Model::new(2);
        let pair = m.add_sphere_pair();
        let (_, disk) = m.add_paired_intersections(pair.sphere_a, pair.sphere_b, g()).unwrap();
        let (_, other) = m.add_paired_intersections(pair.sphere_a, pair.sphere_b, h()).unwrap();
        for i in 0..k {
            m.add_paired_intersections(disk, other, if i % 2 == 0 { g() } else { h() }).unwrap();
        }
        (m, pair, disk)
    }

    #[test]
    fn whitney_split_adds_one_cancelling_pair() {
        let (m, pair, disk) = busy_disk(2);
        let tower = m.tower(&pair);
        let ends = pairing_ends(&m, disk);
        let plan = SplitPlan::new(disk, ends[0].clone(), ends[1].clone());
        let out = split_whitney_disk(&m, &tower, disk, &plan).unwrap();
        assert!(validate(&out).is_empty(), "{:?}", validate(&out));
        let new: Vec<_> = out.edges().filter(|e| m.edge(e.id).is_err()).collect();
        assert_eq!(new.len(), 2);
        assert_eq!(new[0].pairing, new[1].pairing);
        assert!(new.iter().all(|e| e.touches(pair.sphere_a) && e.touches(pair.sphere_b) && e.label == g()));
        let piece = out.whitney_disk_for(new[0].pairing.unwrap()).unwrap();
        assert_eq!(out.object(piece).unwrap().layer, Some(1));
        assert_eq!(out.intersections_at(piece).count(), 2);
        assert_eq!(out.intersections_at(disk).count(), 2);
    }

    #[test]
    fn whitney_disk_with_one_pairing_cannot_be_split() {
        let (m, pair, disk) = busy_disk(1);
        let tower = m.tower(&pair);
        let ends: Vec<Attachment> = pairing_ends(&m, disk).concat_sets();
        let plan = SplitPlan::new(disk, [ends[0]], [ends[1]]);
        assert!(matches!(split_whitney_disk(&m, &tower, disk, &plan), Err(Error::Plan(_))));
    }

    trait ConcatSets {
        fn concat_sets(self) -> Vec<Attachment>;
    }

    impl ConcatSets for Vec<BTreeSet<Attachment>> {
        fn concat_sets(self) -> Vec<Attachment> {
            self.into_iter().flatten().collect()
        }
    }

    #[test]
    fn figure_cycle_needs_no_pair_splitting() {
        let (m, _) = gen::figure_cycle();
        let (out, splits) = split_pairs_to_line(&m, DEFAULT_BUDGET).unwrap();
        assert_eq!(splits, 0);
        assert_eq!(out, m);
    }

    #[test]
    fn pair_splitting_reaches_one_pairing_per_sphere() {
        let mut r = gen::rng(2);
        for _ in 0..10 {
            let (m, _) = gen::random_pair(&mut r, 3, 2, false).unwrap();
            let (out, splits) = split_pairs_to_line(&m, DEFAULT_BUDGET).unwrap();
            assert!(splits >= 1);
            assert!(validate(&out).is_empty(), "{:?}", validate(&out));
            for s in out.objects_of_kind(ObjectKind::Sphere) {
                assert!(sphere_pairings(&out, s.id).len() <= 1);
            }
            assert_eq!(out.label_set(), m.label_set());
        }
    }

    #[test]
    fn tower_splitting_leaves_one_pairing_per_disk() {
        let (m, pair, _) = busy_disk(3);
        let (out, splits) = split_tower_to_single(&m, &pair, DEFAULT_BUDGET).unwrap();
        assert!(validate(&out).is_empty(), "{:?}", validate(&out));
        assert_eq!(splits, 4);
        for &d in out.tower(&pair).layers.iter().flatten() {
            assert!(sphere_pairings(&out, d).len() <= 1);
        }
        assert_eq!(out.label_set(), m.label_set());
        let mut r = gen::rng(3);
        for _ in 0..20 {
            let (m, pair) = gen::random_tower(&mut r, 2).unwrap();
            let (out, _) = split_tower_to_single(&m, &pair, DEFAULT_BUDGET).unwrap();
            assert!(validate(&out).is_empty());
            assert!(out.tower(&pair).layers.iter().flatten().all(|&d| sphere_pairings(&out, d).len() <= 1));
        }
    }
}
