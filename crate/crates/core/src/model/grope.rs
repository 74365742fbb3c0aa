use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{EdgeRole, Model, ObjectId, ObjectKind, TransversePair};
use crate::error::{Error, Result};

/// A cap's position: the base dual pair it hangs from (`branch`) and the 0/1
/// slot choices from the base down to the cap.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicLabel {
    pub branch: usize,
    pub bits: Vec<u8>,
}

impl fmt::Display for DyadicLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.branch)?;
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// View of a capped grope rooted at a base surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CappedGrope {
    pub base: ObjectId,
    pub height: u32,
}

impl CappedGrope {
    pub fn of(model: &Model, base: ObjectId) -> Result<Self> {
        let o = model.object(base)?;
        if o.kind != ObjectKind::BaseSurface {
            return Err(Error::Reference(format!("{base} is a {}, not a grope base", o.kind.name())));
        }
        Ok(CappedGrope { base, height: o.height.unwrap_or(0) })
    }

    pub fn all(model: &Model) -> Vec<CappedGrope> {
        model
            .objects_of_kind(ObjectKind::BaseSurface)
            .map(|o| CappedGrope { base: o.id, height: o.height.unwrap_or(0) })
            .collect()
    }

    /// Caps in depth-first (label) order.
    pub fn caps(&self, model: &Model) -> Result<Vec<ObjectId>> {
        Ok(model
            .subtree(self.base)?
            .into_iter()
            .filter(|&x| model.kind(x) == Some(ObjectKind::Cap))
            .collect())
    }

    /// Non-cap surfaces, base first.
    pub fn stages(&self, model: &Model) -> Result<Vec<ObjectId>> {
        Ok(model
            .subtree(self.base)?
            .into_iter()
            .filter(|&x| model.kind(x).map_or(false, |k| k.is_surface_stage()))
            .collect())
    }

    /// Caps grouped by base dual pair.
    pub fn branches(&self, model: &Model) -> Result<Vec<Vec<ObjectId>>> {
        let base = model.object(self.base)?;
        let mut out = Vec::new();
        for pair in &base.children {
            let mut caps = Vec::new();
            for &side in pair {
                caps.extend(model.subtree(side)?.into_iter().filter(|&x| model.kind(x) == Some(ObjectKind::Cap)));
            }
            out.push(caps);
        }
        Ok(out)
    }
}

/// Where `child` sits in its parent: `(pair index, slot)`.
pub(crate) fn slot_of(model: &Model, child: ObjectId) -> Result<Option<(ObjectId, usize, usize)>> {
    let Some(parent) = model.object(child)?.parent else {
        return Ok(None);
    };
    let p = model.object(parent)?;
    for (i, pair) in p.children.iter().enumerate() {
        for (s, &c) in pair.iter().enumerate() {
            if c == child {
                return Ok(Some((parent, i, s)));
            }
        }
    }
    Err(Error::Shape { object: child, reason: format!("not listed among the children of its parent {parent}") })
}

/// Slot path from the base to `id`. Defined for any grope, dyadic or not.
pub fn label_of(model: &Model, id: ObjectId) -> Result<Option<DyadicLabel>> {
    let mut bits = Vec::new();
    let mut cur = id;
    let mut branch = None;
    while let Some((parent, pair, slot)) = slot_of(model, cur)? {
        bits.push(slot as u8);
        if model.object(parent)?.kind == ObjectKind::BaseSurface {
            branch = Some(pair);
        }
        cur = parent;
    }
    if model.object(cur)?.kind != ObjectKind::BaseSurface {
        return Ok(None);
    }
    bits.reverse();
    Ok(branch.map(|branch| DyadicLabel { branch, bits }))
}

/// Labels of every cap of a grope with dyadic branches.
pub fn dyadic_labels(model: &Model, base: ObjectId) -> Result<BTreeMap<ObjectId, DyadicLabel>> {
    let grope = CappedGrope::of(model, base)?;
    for s in grope.stages(model)? {
        let o = model.object(s)?;
        if o.kind == ObjectKind::StageSurface && o.genus != 1 {
            return Err(Error::Shape {
                object: s,
                reason: format!("stage of genus {} is not dyadic", o.genus),
            });
        }
    }
    let mut out = BTreeMap::new();
    for cap in grope.caps(model)? {
        let label = label_of(model, cap)?.ok_or_else(|| Error::Shape {
            object: cap,
            reason: "cap is not attached to the base".into(),
        })?;
        out.insert(cap, label);
    }
    Ok(out)
}

/// Attaches a full dyadic subtree of the given height to `parent` as one
/// new dual pair, returning the caps in label order.
pub(crate) fn attach_dyadic_pair(model: &mut Model, parent: ObjectId, height: u32) -> Result<Vec<ObjectId>> {
    let mut caps = Vec::new();
    let mut sides = [parent; 2];
    for side in &mut sides {
        *side = if height <= 1 {
            let c = model.add_object(ObjectKind::Cap);
            caps.push(c);
            c
        } else {
            let s = model.add_object(ObjectKind::StageSurface);
            caps.extend(attach_dyadic_pair(model, s, height - 1)?);
            s
        };
        model.object_mut(*side)?.parent = Some(parent);
    }
    let p = model.object_mut(parent)?;
    p.children.push(sides);
    p.genus += 1;
    Ok(caps)
}

impl Model {
    /// A dyadic-branched capped grope with `genus` base pairs; returns the base
    /// and the caps of each branch in label order.
    pub fn add_dyadic_grope(&mut self, genus: u32, height: u32) -> Result<(ObjectId, Vec<Vec<ObjectId>>)> {
        if height == 0 && genus > 0 {
            return Err(Error::Precondition("a grope with caps needs height at least 1".into()));
        }
        let base = self.add_object(ObjectKind::BaseSurface);
        {
            let b = self.object_mut(base)?;
            b.height = Some(if genus == 0 { 0 } else { height });
            b.dyadic = true;
        }
        let mut branches = Vec::new();
        for _ in 0..genus {
            branches.push(attach_dyadic_pair(self, base, height)?);
        }
        Ok((base, branches))
    }
}

/// Replaces sphere `a` of the pair by a capped grope of the given height.
///
/// Each Whitney pairing on `a` becomes its own genus-one piece of the base;
/// the two intersections of the pairing move onto caps in opposite halves of
/// that piece. Absorbed Whitney disks are removed.
pub fn sphere_to_capped_grope(model: &Model, pair: &TransversePair, height: u32) -> Result<(Model, ObjectId)> {
    if height == 0 {
        return Err(Error::Precondition("grope height must be at least 1".into()));
    }
    let a = pair.sphere_a;
    if model.object(a)?.kind != ObjectKind::Sphere {
        return Err(Error::Precondition(format!("{a} is not a sphere")));
    }
    if !model.is_algebraically_trivial(pair) {
        return Err(Error::Precondition("pair has an unpaired extra intersection".into()));
    }
    if model.edges_at(a).any(|e| e.role == EdgeRole::Dual) {
        return Err(Error::Precondition(format!("{a} already carries handle duals")));
    }

    let mut pairings: Vec<_> = model
        .pairings()
        .into_iter()
        .filter(|(_, edges)| edges.iter().any(|e| model.edges[e].touches(a)))
        .collect();
    pairings.sort();

    let mut m = model.clone();
    for (p, _) in &pairings {
        if let Some(d) = m.whitney_disk_for(*p) {
            if m.edges_at(d).next().is_some() {
                return Err(Error::Precondition(format!(
                    "Whitney disk {d} on {a} has interior intersections; split the tower first"
                )));
            }
            m.remove_object(d);
        }
    }

    let genus = pairings.len() as u32;
    let (base, branches) = m.add_dyadic_grope(genus, height)?;
    let half = 1usize << (height - 1);
    for ((_, edges), caps) in pairings.iter().zip(&branches) {
        let slots: Vec<usize> = if height == 1 { vec![0, 1, 0, 1] } else { vec![0, half, 1, half + 1] };
        let mut next = 0;
        for e in edges {
            let edge = m.edge_mut(*e)?;
            edge.pairing = None;
            for end in 0..2 {
                if edge.endpoints[end] == a {
                    edge.endpoints[end] = caps[slots[next % slots.len()]];
                    next += 1;
                }
            }
        }
    }
    // distinguished points now sit on the base
    let rest: Vec<_> = m.edges_at(a).map(|e| e.id).collect();
    for e in rest {
        let edge = m.edge_mut(e)?;
        for end in 0..2 {
            if edge.endpoints[end] == a {
                edge.endpoints[end] = base;
            }
        }
    }
    m.remove_object(a);
    Ok((m, base))
}
