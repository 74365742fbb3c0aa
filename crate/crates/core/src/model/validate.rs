use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{ClassId, EdgeId, EdgeRole, Model, ObjectId, ObjectKind};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub rule: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub object: Option<ObjectId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge: Option<EdgeId>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rule)?;
        if let Some(o) = self.object {
            write!(f, " {o}")?;
        }
        if let Some(e) = self.edge {
            write!(f, " {e}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

struct Report(Vec<Violation>);

impl Report {
    fn object(&mut self, rule: &'static str, object: ObjectId, detail: impl Into<String>) {
        self.0.push(Violation { rule, object: Some(object), edge: None, detail: detail.into() });
    }

    fn edge(&mut self, rule: &'static str, edge: EdgeId, detail: impl Into<String>) {
        self.0.push(Violation { rule, object: None, edge: Some(edge), detail: detail.into() });
    }
}

/// Checks every structural invariant of the model. An empty list means the
/// model is well formed.
pub fn validate(model: &Model) -> Vec<Violation> {
    let mut r = Report(Vec::new());
    check_edges(model, &mut r);
    check_pairings(model, &mut r);
    check_surfaces(model, &mut r);
    check_gropes(model, &mut r);
    check_auxiliary(model, &mut r);
    check_quotient(model, &mut r);
    r.0.sort();
    r.0
}

fn check_edges(model: &Model, r: &mut Report) {
    for e in model.edges() {
        let kinds: Vec<_> = e.endpoints.iter().map(|&x| model.kind(x)).collect();
        if kinds.iter().any(Option::is_none) {
            r.edge("edge-endpoint", e.id, "endpoint is not an object of the model");
            continue;
        }
        if !e.label.is_reduced() || e.label.generator_bound() > model.generators() {
            r.edge("reduced", e.id, format!("label {} is not a reduced word over the generators", e.label));
        }
        let kinds: Vec<ObjectKind> = kinds.into_iter().flatten().collect();
        match e.role {
            EdgeRole::Distinguished => {
                let ok = kinds.iter().all(|k| matches!(k, ObjectKind::Sphere | ObjectKind::BaseSurface));
                if !ok || e.is_loop() || e.pairing.is_some() {
                    r.edge("distinguished", e.id, "distinguished point must join two distinct spheres, unpaired");
                }
            }
            EdgeRole::Dual => {
                if !kinds.contains(&ObjectKind::DualSphere) {
                    r.edge("dual-edge", e.id, "handle intersections must involve a dual sphere");
                }
            }
            EdgeRole::Intersection => {
                if kinds.iter().any(|k| k.is_surface_stage()) {
                    r.edge("stage-edge", e.id, "grope surface stages are embedded and carry no intersections");
                }
            }
        }
    }
}

fn check_pairings(model: &Model, r: &mut Report) {
    for (p, edges) in model.pairings() {
        if edges.len() != 2 {
            r.edge("pairing", edges[0], format!("pairing {p} has {} edges instead of 2", edges.len()));
            continue;
        }
        let (e0, e1) = (model.edge(edges[0]).unwrap(), model.edge(edges[1]).unwrap());
        let mut k0: Vec<_> = e0.endpoints.iter().map(|&x| model.kind(x)).collect();
        let mut k1: Vec<_> = e1.endpoints.iter().map(|&x| model.kind(x)).collect();
        k0.sort();
        k1.sort();
        if k0 != k1 {
            r.edge("pairing", e0.id, format!("paired edges of {p} join different kinds of objects"));
        }
        if e0.label.class() != e1.label.class() {
            r.edge("pairing", e0.id, format!("paired edges of {p} carry different group elements"));
        }
        if e0.role != EdgeRole::Intersection || e1.role != EdgeRole::Intersection {
            r.edge("pairing", e0.id, format!("only intersection edges may be paired ({p})"));
        }
    }
}

fn check_surfaces(model: &Model, r: &mut Report) {
    for o in model.objects() {
        if o.kind.is_surface_stage() {
            if o.children.len() as u32 != o.genus {
                r.object("genus", o.id, format!("genus {} but {} dual pairs", o.genus, o.children.len()));
            }
        } else if !o.children.is_empty() || o.genus != 0 {
            r.object("genus", o.id, format!("a {} has no dual pairs", o.kind.name()));
        }
        for pair in &o.children {
            for &c in pair {
                match model.object(c) {
                    Ok(child) => {
                        if !matches!(child.kind, ObjectKind::StageSurface | ObjectKind::Cap) {
                            r.object("tree", o.id, format!("child {c} is a {}", child.kind.name()));
                        }
                        if child.parent != Some(o.id) {
                            r.object("tree", c, format!("listed under {} but its parent is {:?}", o.id, child.parent));
                        }
                    }
                    Err(_) => r.object("tree", o.id, format!("child {c} does not exist")),
                }
            }
        }
        match o.kind {
            ObjectKind::StageSurface | ObjectKind::Cap => {
                if o.parent.is_none() {
                    r.object("tree", o.id, "stage or cap without a parent surface");
                }
            }
            _ => {
                if o.parent.is_some() {
                    r.object("tree", o.id, "only stages and caps have parents");
                }
            }
        }
    }
}

fn check_gropes(model: &Model, r: &mut Report) {
    for base in model.objects_of_kind(ObjectKind::BaseSurface) {
        let mut depths = Vec::new();
        let mut stack = vec![(base.id, 0u32)];
        let mut seen = 0usize;
        while let Some((x, d)) = stack.pop() {
            seen += 1;
            if seen > model.object_count() {
                r.object("tree", base.id, "stage structure is not a tree");
                return;
            }
            let Ok(o) = model.object(x) else { continue };
            if o.kind == ObjectKind::Cap {
                depths.push(d);
            }
            if o.kind == ObjectKind::StageSurface && base.dyadic && o.genus > 1 {
                r.object("dyadic", x, format!("genus {} stage in a grope claimed dyadic", o.genus));
            }
            for pair in &o.children {
                for &c in pair {
                    stack.push((c, d + 1));
                }
            }
        }
        let height = base.height.unwrap_or(0);
        let max = depths.iter().copied().max().unwrap_or(0);
        if max != height {
            r.object("height", base.id, format!("declared height {height}, deepest cap at {max}"));
        }
        if base.genus > 0 && height == 0 {
            r.object("height", base.id, "a grope with caps has positive height");
        }
    }
}

fn check_auxiliary(model: &Model, r: &mut Report) {
    let pairings = model.pairings();
    let mut disks_per_pairing: BTreeMap<_, usize> = BTreeMap::new();
    for o in model.objects() {
        match o.kind {
            ObjectKind::WhitneyDisk => {
                let Some(p) = o.cancels else {
                    r.object("whitney", o.id, "Whitney disk cancels no pairing");
                    continue;
                };
                *disks_per_pairing.entry(p).or_default() += 1;
                let Some(edges) = pairings.get(&p) else {
                    r.object("whitney", o.id, format!("cancelled pairing {p} does not exist"));
                    continue;
                };
                let surfaces = model.edge(edges[0]).unwrap().endpoints;
                let below = surfaces.iter().filter_map(|&s| model.object(s).ok()).map(|s| s.layer()).max().unwrap_or(0);
                if o.layer() != below + 1 {
                    r.object("whitney", o.id, format!("layer {} over surfaces at layer {below}", o.layer()));
                }
                for e in model.edges_at(o.id) {
                    let other = e.other(o.id);
                    if model.object(other).map_or(false, |x| x.layer() < o.layer()) {
                        r.object("tower", o.id, format!("interior meets {other} at a lower layer"));
                    }
                }
            }
            ObjectKind::CliffordTorus => {
                if o.dual_of.and_then(|d| model.kind(d)) != Some(ObjectKind::WhitneyDisk) {
                    r.object("torus", o.id, "Clifford torus must be dual to a Whitney disk");
                }
                if o.caps.len() != 2 || o.caps.iter().any(|&c| model.kind(c) != Some(ObjectKind::DualSphere)) {
                    r.object("torus", o.id, "Clifford torus needs two caps over dual spheres");
                }
            }
            ObjectKind::DualSphere => {
                if o.dual_of.map_or(true, |d| !model.contains(d)) {
                    r.object("dual-sphere", o.id, "dual sphere without a host");
                }
            }
            _ => {}
        }
    }
    for (p, n) in disks_per_pairing {
        if n > 1 {
            let edge = pairings.get(&p).map(|v| v[0]);
            if let Some(e) = edge {
                r.edge("whitney", e, format!("pairing {p} has {n} Whitney disks"));
            }
        }
    }
}

fn check_quotient(model: &Model, r: &mut Report) {
    let mut kinds: BTreeMap<ClassId, (ObjectKind, ObjectId)> = BTreeMap::new();
    for o in model.objects() {
        match kinds.get(&o.class) {
            Some(&(k, first)) if k != o.kind => {
                r.object("quotient", o.id, format!("shares class {} with {first} of another kind", o.class));
            }
            Some(_) => {}
            None => {
                kinds.insert(o.class, (o.kind, o.id));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupWord;

    #[test]
    fn empty_model_is_valid() {
        assert!(validate(&Model::new(2)).is_empty());
    }

    #[test]
    fn constructed_models_are_valid() {
        let mut m = Model::new(2);
        let pair = m.add_sphere_pair();
        let (_, w) = m.add_paired_intersections(pair.sphere_a, pair.sphere_b, GroupWord::generator(0)).unwrap();
        let (_, w2) = m.add_paired_intersections(pair.sphere_b, pair.sphere_b, GroupWord::generator(1)).unwrap();
        m.add_paired_intersections(w, w2, GroupWord::generator(1)).unwrap();
        m.add_dyadic_grope(2, 3).unwrap();
        assert_eq!(validate(&m), vec![]);
    }

    #[test]
    fn genus_two_stage_in_dyadic_grope() {
        let mut m = Model::new(1);
        let (base, _) = m.add_dyadic_grope(1, 2).unwrap();
        let stage = m.object(base).unwrap().children[0][0];
        super::super::grope::attach_dyadic_pair(&mut m, stage, 1).unwrap();
        let v = validate(&m);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].rule, "dyadic");
        assert_eq!(v[0].object, Some(stage));
    }

    #[test]
    fn unmatched_pairing_and_stage_edge() {
        let mut m = Model::new(1);
        let (base, branches) = m.add_dyadic_grope(1, 2).unwrap();
        let stage = m.object(base).unwrap().children[0][0];
        let p = m.fresh_pairing();
        m.add_edge(branches[0][0], branches[0][1], GroupWord::generator(0), Some(p), EdgeRole::Intersection);
        m.add_edge(stage, branches[0][1], GroupWord::generator(0), None, EdgeRole::Intersection);
        let rules: Vec<_> = validate(&m).into_iter().map(|v| v.rule).collect();
        assert_eq!(rules, ["pairing", "stage-edge"]);
    }
}
