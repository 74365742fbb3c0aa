use std::collections::{BTreeMap, BTreeSet};

use super::{EdgeRole, Model, ObjectId, ObjectKind, PairingId};
use crate::error::Result;

/// Old-to-new correspondence produced by [`Model::parallel_copy`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CopyMap {
    pub objects: BTreeMap<ObjectId, ObjectId>,
    pub pairings: BTreeMap<PairingId, PairingId>,
}

impl CopyMap {
    pub fn get(&self, id: ObjectId) -> ObjectId {
        self.objects.get(&id).copied().unwrap_or(id)
    }
}

impl Model {
    /// `set` plus the Whitney disks cancelling any pairing on an edge that
    /// touches the set, closed upward through higher layers.
    pub fn with_whitney_data(&self, set: &BTreeSet<ObjectId>) -> BTreeSet<ObjectId> {
        let mut out = set.clone();
        loop {
            let mut added = false;
            for e in self.edges() {
                if e.role != EdgeRole::Intersection || !e.endpoints.iter().any(|x| out.contains(x)) {
                    continue;
                }
                if let Some(d) = e.pairing.and_then(|p| self.whitney_disk_for(p)) {
                    added |= out.insert(d);
                }
            }
            if !added {
                return out;
            }
        }
    }

    /// Makes a parallel copy of every object in `set`.
    ///
    /// Each edge touching the set gets a fresh twin with the same label,
    /// ending on the copy of each endpoint that is copied and on the original
    /// otherwise. A loop on a copied object yields a loop on the copy plus two
    /// cross edges between original and copy. Pairings are copied alongside
    /// their edges, and Whitney disks in the set follow their pairings.
    pub fn parallel_copy(&mut self, set: &BTreeSet<ObjectId>) -> Result<CopyMap> {
        let mut map = CopyMap::default();
        for &id in set {
            let kind = self.object(id)?.kind;
            let new = self.add_object(kind);
            map.objects.insert(id, new);
        }

        let touching: Vec<_> = self
            .edges()
            .filter(|e| e.endpoints.iter().any(|x| set.contains(x)))
            .cloned()
            .collect();
        // Cross edges of paired loops pair up by position: first with first, second with second.
        let mut cross_pairings: BTreeMap<PairingId, [PairingId; 2]> = BTreeMap::new();
        for e in &touching {
            let pairing = match e.pairing {
                Some(p) => Some(match map.pairings.get(&p) {
                    Some(&q) => q,
                    None => {
                        let q = self.fresh_pairing();
                        map.pairings.insert(p, q);
                        q
                    }
                }),
                None => None,
            };
            let [u, v] = e.endpoints;
            self.add_edge(map.get(u), map.get(v), e.label.clone(), pairing, e.role);
            if e.is_loop() {
                let cross = match e.pairing {
                    Some(p) => {
                        let pair = match cross_pairings.get(&p) {
                            Some(&pair) => pair,
                            None => {
                                let pair = [self.fresh_pairing(), self.fresh_pairing()];
                                cross_pairings.insert(p, pair);
                                pair
                            }
                        };
                        [Some(pair[0]), Some(pair[1])]
                    }
                    None => [None, None],
                };
                for c in cross {
                    self.add_edge(u, map.get(u), e.label.clone(), c, e.role);
                }
            }
        }

        for (&old, &new) in &map.objects {
            let src = self.object(old)?.clone();
            let dst = self.object_mut(new)?;
            dst.genus = src.genus;
            dst.children = src.children.iter().map(|[l, r]| [map.get(*l), map.get(*r)]).collect();
            dst.parent = src.parent.map(|p| map.get(p));
            dst.height = src.height;
            dst.dyadic = src.dyadic;
            dst.layer = src.layer;
            dst.cancels = src.cancels.map(|p| map.pairings.get(&p).copied().unwrap_or(p));
            dst.dual_of = src.dual_of.map(|d| map.get(d));
            dst.site = src.site;
            dst.caps = src.caps.iter().map(|&c| map.get(c)).collect();
        }

        // Cross pairings get their own (empty) Whitney disks when the loop pairing had one.
        for (p, pair) in cross_pairings {
            if let Some(d) = self.whitney_disk_for(p) {
                let layer = self.object(d)?.layer;
                for q in pair {
                    let nd = self.add_object(ObjectKind::WhitneyDisk);
                    let o = self.object_mut(nd)?;
                    o.layer = layer;
                    o.cancels = Some(q);
                }
            }
        }
        Ok(map)
    }
}
