//! The shared data model: surfaces, spheres, Whitney disks and the labeled
//! intersection edges between them, plus the handle ledger.
//!
//! A [`Model`] is a flat table of objects and edges. Gropes, transverse
//! pairs and Whitney towers are views computed from that table:
//!
//! * a capped grope is a `base-surface` object together with the tree of
//!   `stage-surface` and `cap` objects reachable through `children`;
//! * a transverse pair is a `distinguished` edge between two spheres (or a
//!   grope base and a sphere), ordered `(a, b)`;
//! * a Whitney disk is a `whitney-disk` object cancelling one pairing of
//!   edges, at `layer` one above the surfaces carrying that pairing.

mod copy;
mod doc;
pub(crate) mod grope;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use copy::CopyMap;
pub use doc::Document;
pub use grope::{dyadic_labels, label_of, sphere_to_capped_grope, CappedGrope, DyadicLabel};
pub use validate::{validate, Violation};

use crate::error::{Error, Result};
use crate::group::GroupWord;
use crate::handles::HandleLedger;

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(ObjectId, "o");
id_type!(EdgeId, "e");
id_type!(PairingId, "p");
id_type!(ClassId, "c");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectKind {
    BaseSurface,
    StageSurface,
    Cap,
    Sphere,
    WhitneyDisk,
    CliffordTorus,
    DualSphere,
}

impl ObjectKind {
    pub fn name(self) -> &'static str {
        match self {
            ObjectKind::BaseSurface => "base-surface",
            ObjectKind::StageSurface => "stage-surface",
            ObjectKind::Cap => "cap",
            ObjectKind::Sphere => "sphere",
            ObjectKind::WhitneyDisk => "whitney-disk",
            ObjectKind::CliffordTorus => "clifford-torus",
            ObjectKind::DualSphere => "dual-sphere",
        }
    }

    pub fn is_surface_stage(self) -> bool {
        matches!(self, ObjectKind::BaseSurface | ObjectKind::StageSurface)
    }
}

/// One object record. Fields that only apply to some kinds are optional.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Object {
    pub id: ObjectId,
    pub kind: ObjectKind,
    pub class: ClassId,
    #[serde(default)]
    pub genus: u32,
    /// Dual pairs `(left, right)` attached to a surface stage.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<[ObjectId; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<ObjectId>,
    /// Grope height, on base surfaces only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
    /// Whether a base surface claims dyadic branches.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dyadic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer: Option<u32>,
    /// The pairing a Whitney disk cancels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cancels: Option<PairingId>,
    /// Host surface of a dual sphere, or the Whitney disk of a Clifford torus.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_of: Option<ObjectId>,
    /// Distinguished edge whose neighborhood a pair-handle dual sphere lives in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<EdgeId>,
    /// Cap slots of a Clifford torus: the dual sphere each cap goes over.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub caps: Vec<ObjectId>,
}

impl Object {
    pub fn new(id: ObjectId, kind: ObjectKind, class: ClassId) -> Self {
        Object {
            id,
            kind,
            class,
            genus: 0,
            children: Vec::new(),
            parent: None,
            height: None,
            dyadic: false,
            layer: None,
            cancels: None,
            dual_of: None,
            site: None,
            caps: Vec::new(),
        }
    }

    /// Whitney layer; everything that is not a Whitney disk sits at layer 0.
    pub fn layer(&self) -> u32 {
        self.layer.unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeRole {
    #[default]
    Intersection,
    /// The preferred intersection point of a transverse pair, ordered `(a, b)`.
    Distinguished,
    /// Intersections created by handle attachment between dual spheres and
    /// their hosts or each other.
    Dual,
}

fn is_default_role(role: &EdgeRole) -> bool {
    *role == EdgeRole::Intersection
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub endpoints: [ObjectId; 2],
    pub label: GroupWord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<PairingId>,
    #[serde(default, skip_serializing_if = "is_default_role")]
    pub role: EdgeRole,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.endpoints[0] == self.endpoints[1]
    }

    pub fn touches(&self, id: ObjectId) -> bool {
        self.endpoints.contains(&id)
    }

    pub fn other(&self, id: ObjectId) -> ObjectId {
        if self.endpoints[0] == id {
            self.endpoints[1]
        } else {
            self.endpoints[0]
        }
    }
}

/// A framed sphere pair meeting in a distinguished point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TransversePair {
    pub sphere_a: ObjectId,
    pub sphere_b: ObjectId,
    pub distinguished: EdgeId,
}

/// Layered Whitney disks over a transverse pair; `layers[i]` holds the disks
/// at height `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhitneyTower {
    pub pair: TransversePair,
    pub layers: Vec<Vec<ObjectId>>,
}

impl WhitneyTower {
    pub fn height(&self) -> usize {
        self.layers.len()
    }
}

#[derive(Clone, Debug)]
pub struct Model {
    generators: usize,
    objects: BTreeMap<ObjectId, Object>,
    edges: BTreeMap<EdgeId, Edge>,
    pub ledger: HandleLedger,
    next_object: u32,
    next_edge: u32,
    next_pairing: u32,
    next_class: u32,
}

// Id counters are allocation state, not content.
impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
            && self.objects == other.objects
            && self.edges == other.edges
            && self.ledger == other.ledger
    }
}

impl Eq for Model {}

impl Model {
    pub fn new(generators: usize) -> Self {
        Model {
            generators,
            objects: BTreeMap::new(),
            edges: BTreeMap::new(),
            ledger: HandleLedger::default(),
            next_object: 0,
            next_edge: 0,
            next_pairing: 0,
            next_class: 0,
        }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = &Object> {
        self.objects.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn object(&self, id: ObjectId) -> Result<&Object> {
        self.objects.get(&id).ok_or_else(|| Error::Reference(format!("object {id}")))
    }

    pub fn object_mut(&mut self, id: ObjectId) -> Result<&mut Object> {
        self.objects.get_mut(&id).ok_or_else(|| Error::Reference(format!("object {id}")))
    }

    pub fn contains(&self, id: ObjectId) -> bool {
        self.objects.contains_key(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge> {
        self.edges.get(&id).ok_or_else(|| Error::Reference(format!("edge {id}")))
    }

    pub fn kind(&self, id: ObjectId) -> Option<ObjectKind> {
        self.objects.get(&id).map(|o| o.kind)
    }

    pub fn objects_of_kind(&self, kind: ObjectKind) -> impl Iterator<Item = &Object> {
        self.objects.values().filter(move |o| o.kind == kind)
    }

    /// Edges incident to `id`, in edge-id order. Loops appear once.
    pub fn edges_at(&self, id: ObjectId) -> impl Iterator<Item = &Edge> {
        self.edges.values().filter(move |e| e.touches(id))
    }

    /// Intersection-role edges incident to `id`.
    pub fn intersections_at(&self, id: ObjectId) -> impl Iterator<Item = &Edge> {
        self.edges_at(id).filter(|e| e.role == EdgeRole::Intersection)
    }

    pub fn fresh_class(&mut self) -> ClassId {
        let c = ClassId(self.next_class);
        self.next_class += 1;
        c
    }

    pub fn fresh_pairing(&mut self) -> PairingId {
        let p = PairingId(self.next_pairing);
        self.next_pairing += 1;
        p
    }

    /// Adds an object in its own fresh quotient class.
    pub fn add_object(&mut self, kind: ObjectKind) -> ObjectId {
        let id = ObjectId(self.next_object);
        self.next_object += 1;
        let class = self.fresh_class();
        self.objects.insert(id, Object::new(id, kind, class));
        id
    }

    pub fn insert_object(&mut self, object: Object) {
        self.next_object = self.next_object.max(object.id.0 + 1);
        self.next_class = self.next_class.max(object.class.0 + 1);
        self.objects.insert(object.id, object);
    }

    pub fn remove_object(&mut self, id: ObjectId) -> Option<Object> {
        self.objects.remove(&id)
    }

    pub fn add_edge(
        &mut self,
        a: ObjectId,
        b: ObjectId,
        label: GroupWord,
        pairing: Option<PairingId>,
        role: EdgeRole,
    ) -> EdgeId {
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        if let Some(p) = pairing {
            self.next_pairing = self.next_pairing.max(p.0 + 1);
        }
        self.edges.insert(id, Edge { id, endpoints: [a, b], label, pairing, role });
        id
    }

    pub fn insert_edge(&mut self, edge: Edge) {
        self.next_edge = self.next_edge.max(edge.id.0 + 1);
        if let Some(p) = edge.pairing {
            self.next_pairing = self.next_pairing.max(p.0 + 1);
        }
        self.edges.insert(edge.id, edge);
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Option<Edge> {
        self.edges.remove(&id)
    }

    pub fn edge_mut(&mut self, id: EdgeId) -> Result<&mut Edge> {
        self.edges.get_mut(&id).ok_or_else(|| Error::Reference(format!("edge {id}")))
    }

    /// Edges grouped by pairing id.
    pub fn pairings(&self) -> BTreeMap<PairingId, Vec<EdgeId>> {
        let mut out: BTreeMap<PairingId, Vec<EdgeId>> = BTreeMap::new();
        for e in self.edges.values() {
            if let Some(p) = e.pairing {
                out.entry(p).or_default().push(e.id);
            }
        }
        out
    }

    pub fn pairing_edges(&self, pairing: PairingId) -> Vec<EdgeId> {
        self.edges.values().filter(|e| e.pairing == Some(pairing)).map(|e| e.id).collect()
    }

    pub fn whitney_disk_for(&self, pairing: PairingId) -> Option<ObjectId> {
        self.objects
            .values()
            .find(|o| o.kind == ObjectKind::WhitneyDisk && o.cancels == Some(pairing))
            .map(|o| o.id)
    }

    /// Distinct edge labels up to inversion, over intersection edges.
    pub fn label_set(&self) -> BTreeSet<GroupWord> {
        self.edges
            .values()
            .filter(|e| e.role == EdgeRole::Intersection)
            .map(|e| e.label.class())
            .collect()
    }

    /// All transverse pairs, in distinguished-edge order.
    pub fn pairs(&self) -> Vec<TransversePair> {
        self.edges
            .values()
            .filter(|e| e.role == EdgeRole::Distinguished)
            .map(|e| TransversePair { sphere_a: e.endpoints[0], sphere_b: e.endpoints[1], distinguished: e.id })
            .collect()
    }

    pub fn pair(&self, distinguished: EdgeId) -> Result<TransversePair> {
        let e = self.edge(distinguished)?;
        if e.role != EdgeRole::Distinguished {
            return Err(Error::Reference(format!("{distinguished} is not a distinguished edge")));
        }
        Ok(TransversePair { sphere_a: e.endpoints[0], sphere_b: e.endpoints[1], distinguished })
    }

    /// Extra (non-distinguished) intersections on either sphere of the pair.
    pub fn extras(&self, pair: &TransversePair) -> Vec<EdgeId> {
        self.edges
            .values()
            .filter(|e| e.role == EdgeRole::Intersection && (e.touches(pair.sphere_a) || e.touches(pair.sphere_b)))
            .map(|e| e.id)
            .collect()
    }

    pub fn is_algebraically_trivial(&self, pair: &TransversePair) -> bool {
        let pairings = self.pairings();
        self.extras(pair).into_iter().all(|id| match self.edges[&id].pairing {
            Some(p) => pairings.get(&p).map_or(false, |v| v.len() == 2),
            None => false,
        })
    }

    /// Whitney disks above the pair, layer by layer.
    pub fn tower(&self, pair: &TransversePair) -> WhitneyTower {
        let mut layers: Vec<Vec<ObjectId>> = Vec::new();
        let mut frontier: BTreeSet<ObjectId> = [pair.sphere_a, pair.sphere_b].into_iter().collect();
        loop {
            let mut disks = BTreeSet::new();
            for (p, edges) in self.pairings() {
                let touches = edges.iter().any(|e| {
                    let edge = &self.edges[e];
                    edge.role == EdgeRole::Intersection && edge.endpoints.iter().any(|x| frontier.contains(x))
                });
                if touches {
                    if let Some(d) = self.whitney_disk_for(p) {
                        if !frontier.contains(&d) {
                            disks.insert(d);
                        }
                    }
                }
            }
            let layer = layers.len() as u32 + 1;
            let disks: Vec<ObjectId> =
                disks.into_iter().filter(|d| self.objects[d].layer() == layer).collect();
            if disks.is_empty() {
                break;
            }
            frontier.extend(disks.iter().copied());
            layers.push(disks);
        }
        WhitneyTower { pair: *pair, layers }
    }

    /// Adds two spheres meeting in a distinguished identity-labeled point.
    pub fn add_sphere_pair(&mut self) -> TransversePair {
        let a = self.add_object(ObjectKind::Sphere);
        let b = self.add_object(ObjectKind::Sphere);
        let distinguished = self.add_edge(a, b, GroupWord::identity(), None, EdgeRole::Distinguished);
        TransversePair { sphere_a: a, sphere_b: b, distinguished }
    }

    /// Adds a cancelling pair of intersections between `x` and `y` with the
    /// given label, and the Whitney disk pairing them.
    pub fn add_paired_intersections(&mut self, x: ObjectId, y: ObjectId, label: GroupWord) -> Result<(PairingId, ObjectId)> {
        let layer = self.object(x)?.layer().max(self.object(y)?.layer()) + 1;
        let p = self.fresh_pairing();
        self.add_edge(x, y, label.clone(), Some(p), EdgeRole::Intersection);
        self.add_edge(x, y, label, Some(p), EdgeRole::Intersection);
        let disk = self.add_object(ObjectKind::WhitneyDisk);
        let d = self.object_mut(disk)?;
        d.layer = Some(layer);
        d.cancels = Some(p);
        Ok((p, disk))
    }

    /// Surfaces carrying the pairing a Whitney disk cancels.
    pub fn disk_surfaces(&self, disk: ObjectId) -> Result<[ObjectId; 2]> {
        let p = self
            .object(disk)?
            .cancels
            .ok_or_else(|| Error::Reference(format!("{disk} cancels no pairing")))?;
        let edges = self.pairing_edges(p);
        let first = edges.first().ok_or_else(|| Error::Reference(format!("pairing {p} has no edges")))?;
        Ok(self.edges[first].endpoints)
    }

    /// Label of the pairing a Whitney disk cancels.
    pub fn disk_label(&self, disk: ObjectId) -> Result<GroupWord> {
        let p = self
            .object(disk)?
            .cancels
            .ok_or_else(|| Error::Reference(format!("{disk} cancels no pairing")))?;
        let edges = self.pairing_edges(p);
        let first = edges.first().ok_or_else(|| Error::Reference(format!("pairing {p} has no edges")))?;
        Ok(self.edges[first].label.clone())
    }

    /// Embedded-path criterion used for discharging handles: no intersection
    /// edges remain on `id` (or, for a grope surface, on any cap above it).
    pub fn remaining_intersections(&self, id: ObjectId) -> Result<usize> {
        let obj = self.object(id)?;
        if obj.kind.is_surface_stage() || obj.kind == ObjectKind::Cap {
            let mut total = 0;
            for o in self.subtree(id)? {
                if self.objects[&o].kind == ObjectKind::Cap {
                    total += self.intersections_at(o).count();
                }
            }
            Ok(total)
        } else {
            Ok(self.intersections_at(id).count())
        }
    }

    /// `id` and every stage and cap above it, depth first.
    pub fn subtree(&self, id: ObjectId) -> Result<Vec<ObjectId>> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            let o = self.object(x)?;
            out.push(x);
            for pair in o.children.iter().rev() {
                stack.push(pair[1]);
                stack.push(pair[0]);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_pair_has_distinguished_edge() {
        let mut m = Model::new(1);
        let pair = m.add_sphere_pair();
        assert_eq!(m.pairs(), vec![pair]);
        assert!(m.extras(&pair).is_empty());
        assert!(m.is_algebraically_trivial(&pair));
    }

    #[test]
    fn paired_intersections_are_algebraically_trivial() {
        let mut m = Model::new(1);
        let pair = m.add_sphere_pair();
        let (p, disk) = m.add_paired_intersections(pair.sphere_a, pair.sphere_b, GroupWord::generator(0)).unwrap();
        assert_eq!(m.pairing_edges(p).len(), 2);
        assert_eq!(m.whitney_disk_for(p), Some(disk));
        assert!(m.is_algebraically_trivial(&pair));
        m.add_edge(pair.sphere_a, pair.sphere_a, GroupWord::generator(0), None, EdgeRole::Intersection);
        assert!(!m.is_algebraically_trivial(&pair));
    }

    #[test]
    fn tower_layers_follow_disk_heights() {
        let mut m = Model::new(2);
        let pair = m.add_sphere_pair();
        let (_, w1) = m.add_paired_intersections(pair.sphere_a, pair.sphere_b, GroupWord::generator(0)).unwrap();
        let (_, w2) = m.add_paired_intersections(pair.sphere_a, pair.sphere_a, GroupWord::generator(1)).unwrap();
        let (_, v) = m.add_paired_intersections(w1, w2, GroupWord::generator(1)).unwrap();
        let t = m.tower(&pair);
        assert_eq!(t.height(), 2);
        assert_eq!(t.layers[0], vec![w1, w2]);
        assert_eq!(t.layers[1], vec![v]);
    }
}
