//! Unraveling short cycles: every `B` sphere of a chain of transverse pairs
//! is replaced by `n` parallel copies, and the Clifford tori take their
//! second caps with a cyclic shift, realizing the n-fold cyclic cover.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cycles::girth;
use crate::error::{Error, Result};
use crate::graph::IntersectionGraph;
use crate::group::GroupWord;
use crate::handles::{pair_handles_in, PairHandles};
use crate::model::{EdgeRole, Model, ObjectId, ObjectKind, PairingId, TransversePair};

/// Intersections between `B` of one pair and `A` of the next.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainArc {
    pub from: usize,
    pub to: usize,
    /// Read from `B^from` to `A^to`.
    pub label: GroupWord,
    #[serde(skip)]
    pairing: PairingId,
}

/// The pairs reachable from a seed through Whitney pairings, in linear
/// order: from the source of a line, or from the seed around a cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub pairs: Vec<TransversePair>,
    pub arcs: Vec<ChainArc>,
    pub closed: bool,
}

impl Chain {
    /// Cycle length in the algebraic line, if the chain closes up.
    pub fn cycle_length(&self) -> Option<usize> {
        self.closed.then_some(self.pairs.len())
    }
}

/// The caps chosen for one Clifford torus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusCaps {
    pub torus: ObjectId,
    pub arc: usize,
    /// Which parallel copy of the pairing the torus is dual to, from 1.
    pub copy: usize,
    /// Over the dual of `B_copy`: the only choice.
    pub forced: ObjectId,
    /// Over the dual of `A` near `B_shifted_copy`.
    pub shifted: ObjectId,
    pub shifted_copy: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnravelReport {
    pub n: usize,
    pub chain: Chain,
    /// Each copied object with its copies, the original first.
    pub copies_made: BTreeMap<ObjectId, Vec<ObjectId>>,
    pub tori: Vec<TorusCaps>,
    /// Torus to the copy index its shifted cap goes over.
    pub shift_assignment: BTreeMap<ObjectId, usize>,
    /// `None` when there is no cycle at all.
    pub girth_before: Option<usize>,
    pub girth_after: Option<usize>,
}

impl UnravelReport {
    /// Whether every torus of copy `k` shifts to copy `k + 1` mod `n`.
    pub fn shift_is_cyclic(&self) -> bool {
        self.tori.iter().all(|t| t.shifted_copy == t.copy % self.n + 1)
    }

    pub fn torus_ids(&self) -> BTreeSet<ObjectId> {
        self.tori.iter().map(|t| t.torus).collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    A,
    B,
}

/// The chain through `seed`. Pairings must run from a `B` sphere to an `A`
/// sphere, and each sphere may carry at most one.
pub fn chain_of(model: &Model, seed: &TransversePair) -> Result<Chain> {
    let pairs = model.pairs();
    let mut side: BTreeMap<ObjectId, (usize, Side)> = BTreeMap::new();
    for (i, p) in pairs.iter().enumerate() {
        for (s, who) in [(p.sphere_a, Side::A), (p.sphere_b, Side::B)] {
            if side.insert(s, (i, who)).is_some() {
                return Err(Error::Precondition(format!("{s} belongs to more than one transverse pair")));
            }
        }
    }
    let seed_index = pairs
        .iter()
        .position(|p| p.distinguished == seed.distinguished)
        .ok_or_else(|| Error::Reference(format!("no transverse pair at {}", seed.distinguished)))?;

    let mut out: BTreeMap<usize, Vec<ChainArc>> = BTreeMap::new();
    let mut into: BTreeMap<usize, usize> = BTreeMap::new();
    for (p, edges) in model.pairings() {
        let e = model.edge(edges[0])?;
        let [x, y] = e.endpoints;
        let (Some(&(px, sx)), Some(&(py, sy))) = (side.get(&x), side.get(&y)) else { continue };
        let (from, to, label) = match (sx, sy) {
            (Side::B, Side::A) if x != y => (px, py, e.label.clone()),
            (Side::A, Side::B) => (py, px, e.label.invert()),
            _ => {
                return Err(Error::Collision {
                    n: 0,
                    detail: format!("pairing {p} joins {x} and {y}, which sit on the same side of their pairs"),
                })
            }
        };
        if into.insert(to, from).is_some() {
            return Err(Error::Precondition(format!(
                "A sphere {} carries more than one pairing; split the pairs to a line first",
                pairs[to].sphere_a
            )));
        }
        out.entry(from).or_default().push(ChainArc { from, to, label, pairing: p });
    }
    if let Some((&from, _)) = out.iter().find(|(_, arcs)| arcs.len() > 1) {
        return Err(Error::Precondition(format!(
            "B sphere {} carries more than one pairing; split the pairs to a line first",
            pairs[from].sphere_b
        )));
    }

    // walk back to the source, or once around
    let mut start = seed_index;
    let mut closed = false;
    while let Some(&prev) = into.get(&start) {
        if prev == seed_index {
            closed = true;
            start = seed_index;
            break;
        }
        start = prev;
    }
    let mut order = vec![start];
    let mut position: BTreeMap<usize, usize> = [(start, 0)].into_iter().collect();
    let mut arcs = Vec::new();
    let mut here = start;
    while let Some(arc) = out.get(&here).and_then(|a| a.first()) {
        let next = arc.to;
        let at = *position.entry(next).or_insert_with(|| {
            order.push(next);
            order.len() - 1
        });
        arcs.push(ChainArc { from: position[&here], to: at, label: arc.label.clone(), pairing: arc.pairing });
        if at != order.len() - 1 || next == start {
            break;
        }
        here = next;
    }
    Ok(Chain { pairs: order.into_iter().map(|i| pairs[i]).collect(), arcs, closed })
}

fn distinguished_between(m: &Model, a: ObjectId, b: ObjectId) -> Result<TransversePair> {
    let e = m
        .edges_at(b)
        .find(|e| e.role == EdgeRole::Distinguished && e.touches(a))
        .ok_or_else(|| Error::Reference(format!("{a} and {b} do not meet in a distinguished point")))?;
    m.pair(e.id)
}

/// Unravels the chain through `seed` with `n` copies of each `B` sphere.
pub fn unravel(model: &Model, seed: &TransversePair, n: usize) -> Result<(Model, UnravelReport)> {
    if n == 0 {
        return Err(Error::Precondition("unraveling needs at least one copy".into()));
    }
    let mut m = model.clone();
    let chain = chain_of(&m, seed).map_err(|e| match e {
        Error::Collision { detail, .. } => Error::Collision { n, detail },
        other => other,
    })?;
    for p in &chain.pairs {
        for s in [p.sphere_a, p.sphere_b] {
            if m.edges_at(s).any(|e| e.role == EdgeRole::Dual) {
                return Err(Error::Precondition(format!("{s} already carries handle duals")));
            }
        }
    }
    let disks: Vec<ObjectId> = chain
        .arcs
        .iter()
        .map(|a| {
            m.whitney_disk_for(a.pairing)
                .ok_or_else(|| Error::Reference(format!("pairing {} has no Whitney disk", a.pairing)))
        })
        .collect::<Result<_>>()?;

    // n copies of every B, each with copies of its Whitney data
    let mut copies_made: BTreeMap<ObjectId, Vec<ObjectId>> = BTreeMap::new();
    let mut b_copies: Vec<Vec<ObjectId>> = Vec::new();
    for p in &chain.pairs {
        let set = m.with_whitney_data(&[p.sphere_b].into_iter().collect());
        for &x in &set {
            copies_made.insert(x, vec![x]);
        }
        for _ in 1..n {
            let map = m.parallel_copy(&set)?;
            for &x in &set {
                copies_made.get_mut(&x).unwrap().push(map.get(x));
            }
        }
        b_copies.push(copies_made[&p.sphere_b].clone());
    }

    // the basic construction at every pair (A, B_k)
    let mut handles: Vec<Vec<PairHandles>> = Vec::new();
    for (i, p) in chain.pairs.iter().enumerate() {
        let incoming = chain.arcs.iter().find(|a| a.to == i).map_or_else(GroupWord::identity, |a| a.label.clone());
        let mut row: Vec<PairHandles> = Vec::new();
        for &b in &b_copies[i] {
            let pair = distinguished_between(&m, p.sphere_a, b)?;
            let h = pair_handles_in(&mut m, &pair)?;
            if let Some(prev) = row.last() {
                m.ledger.record_incidence(prev.a_handle, h.a_handle, incoming.clone(), 1);
            }
            row.push(h);
        }
        handles.push(row);
    }

    // tori: the forced cap over B_k's dual, the other shifted to copy k + 1
    let mut tori = Vec::new();
    for (w, arc) in chain.arcs.iter().enumerate() {
        for k in 1..=n {
            let disk = copies_made[&disks[w]][k - 1];
            let s = k % n + 1;
            let forced = handles[arc.from][k - 1].b_dual;
            let shifted = handles[arc.to][s - 1].a_dual;
            let [x, _] = m.disk_surfaces(disk)?;
            let caps = if x == b_copies[arc.from][k - 1] { vec![forced, shifted] } else { vec![shifted, forced] };
            let t = m.add_object(ObjectKind::CliffordTorus);
            let o = m.object_mut(t)?;
            o.dual_of = Some(disk);
            o.caps = caps;
            tori.push(TorusCaps { torus: t, arc: w, copy: k, forced, shifted, shifted_copy: s });
        }
    }

    let ids: BTreeSet<ObjectId> = tori.iter().map(|t| t.torus).collect();
    let girth_after = girth(&IntersectionGraph::torus_graph(&m).induced(&ids));
    let report = UnravelReport {
        n,
        girth_before: chain.cycle_length(),
        chain,
        copies_made,
        shift_assignment: tori.iter().map(|t| (t.torus, t.shifted_copy)).collect(),
        tori,
        girth_after,
    };
    Ok((m, report))
}
