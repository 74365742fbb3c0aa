//! 2- and 3-handle bookkeeping for the s-cobordism constructions.
//!
//! Every 2-handle attached to `M × I` either has a cancelling 3-handle or an
//! explicit pending [`Obligation`]. The boundary map from 3-handles to
//! 2-handles is a sparse matrix over the integral group ring; [`certify`]
//! classifies it.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupWord;
use crate::model::{EdgeRole, Model, ObjectId, ObjectKind, TransversePair};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandleRecord {
    pub index: usize,
    pub dimension: u8,
    /// Host of the attaching circle (2-handles) or the embedded carrier (3-handles).
    pub site: ObjectId,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub created_duals: Vec<ObjectId>,
    /// For a 3-handle, the 2-handle it cancels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cancels: Option<usize>,
}

/// A 2-handle still waiting for its 3-handle. Any one carrier becoming
/// intersection-free is enough to discharge it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obligation {
    pub handle: usize,
    pub carriers: Vec<ObjectId>,
}

/// The 3-handle cancelling `sphere_of` meets the co-core of `cocore_of`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Incidence {
    pub sphere_of: usize,
    pub cocore_of: usize,
    pub word: GroupWord,
    pub coeff: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandleLedger {
    #[serde(default)]
    pub records: Vec<HandleRecord>,
    #[serde(default)]
    pub obligations: Vec<Obligation>,
    #[serde(default)]
    pub incidences: Vec<Incidence>,
}

/// Formal integer combination of group words with no zero terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupRingElement(BTreeMap<GroupWord, i64>);

impl GroupRingElement {
    pub fn add_term(&mut self, word: GroupWord, coeff: i64) {
        let c = self.0.entry(word.clone()).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.0.remove(&word);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupWord, i64)> {
        self.0.iter().map(|(w, &c)| (w, c))
    }

    /// `±g` for a single group element `g`.
    pub fn is_unit(&self) -> bool {
        self.0.len() == 1 && self.0.values().all(|c| c.abs() == 1)
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0.get(&GroupWord::identity()) == Some(&1)
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·({w})")?;
        }
        Ok(())
    }
}

/// Sparse square matrix; rows are 3-handles, columns 2-handles, both indexed
/// by the 2-handle's position in attachment order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupRingMatrix {
    pub size: usize,
    pub entries: BTreeMap<(usize, usize), GroupRingElement>,
}

impl GroupRingMatrix {
    pub fn new(size: usize) -> Self {
        GroupRingMatrix { size, entries: BTreeMap::new() }
    }

    pub fn add(&mut self, row: usize, col: usize, word: GroupWord, coeff: i64) {
        let e = self.entries.entry((row, col)).or_default();
        e.add_term(word, coeff);
        if e.is_zero() {
            self.entries.remove(&(row, col));
        }
    }

    pub fn get(&self, row: usize, col: usize) -> GroupRingElement {
        self.entries.get(&(row, col)).cloned().unwrap_or_default()
    }

    /// `(row, col, word, coeff)` for every stored term.
    pub fn triplets(&self) -> Vec<(usize, usize, String, i64)> {
        let mut out = Vec::new();
        for (&(r, c), e) in &self.entries {
            for (w, k) in e.terms() {
                out.push((r, c, w.to_string(), k));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Identity,
    UpperTriangularUnits,
    Fail { row: usize, col: usize, entry: GroupRingElement },
}

impl Certificate {
    pub fn verdict(&self) -> &'static str {
        match self {
            Certificate::Identity => "identity",
            Certificate::UpperTriangularUnits => "upper-triangular-units",
            Certificate::Fail { .. } => "fail",
        }
    }

    pub fn is_success(&self) -> bool {
        !matches!(self, Certificate::Fail { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub matrix: Vec<(usize, usize, String, i64)>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(usize, usize, String)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pending: Vec<Obligation>,
}

impl HandleLedger {
    pub fn two_handles(&self) -> Vec<usize> {
        self.records.iter().filter(|r| r.dimension == 2).map(|r| r.index).collect()
    }

    pub fn three_handles(&self) -> impl Iterator<Item = &HandleRecord> {
        self.records.iter().filter(|r| r.dimension == 3)
    }

    fn push(&mut self, dimension: u8, site: ObjectId, created_duals: Vec<ObjectId>, cancels: Option<usize>) -> usize {
        let index = self.records.len();
        self.records.push(HandleRecord { index, dimension, site, created_duals, cancels });
        index
    }

    /// Records a 2-handle with its pending 3-handle obligation.
    pub fn attach_two_handle(&mut self, site: ObjectId, duals: Vec<ObjectId>, carriers: Vec<ObjectId>) -> usize {
        let h = self.push(2, site, duals, None);
        self.obligations.push(Obligation { handle: h, carriers });
        h
    }

    pub fn record_incidence(&mut self, sphere_of: usize, cocore_of: usize, word: GroupWord, coeff: i64) {
        self.incidences.push(Incidence { sphere_of, cocore_of, word, coeff });
    }

    fn matrix_with(&self, rows: impl Iterator<Item = usize>) -> GroupRingMatrix {
        let cols: BTreeMap<usize, usize> = self.two_handles().into_iter().enumerate().map(|(i, h)| (h, i)).collect();
        let mut m = GroupRingMatrix::new(cols.len());
        let rows: Vec<usize> = rows.collect();
        for h in &rows {
            if let Some(&r) = cols.get(h) {
                m.add(r, r, GroupWord::identity(), 1);
            }
        }
        for inc in &self.incidences {
            if !rows.contains(&inc.sphere_of) {
                continue;
            }
            if let (Some(&r), Some(&c)) = (cols.get(&inc.sphere_of), cols.get(&inc.cocore_of)) {
                m.add(r, c, inc.word.clone(), inc.coeff);
            }
        }
        m
    }

    /// Boundary map over the 3-handles attached so far.
    pub fn boundary(&self) -> GroupRingMatrix {
        self.matrix_with(self.three_handles().filter_map(|r| r.cancels))
    }

    /// Boundary map as it will be once every pending obligation is discharged.
    pub fn projected_boundary(&self) -> GroupRingMatrix {
        let done = self.three_handles().filter_map(|r| r.cancels);
        let pending = self.obligations.iter().map(|o| o.handle);
        self.matrix_with(done.chain(pending))
    }

    pub fn report(&self, certificate: &Certificate, projected: bool) -> CertificateReport {
        let matrix = if projected { self.projected_boundary() } else { self.boundary() };
        CertificateReport {
            matrix: matrix.triplets(),
            verdict: certificate.verdict().to_string(),
            witness: match certificate {
                Certificate::Fail { row, col, entry } => Some((*row, *col, entry.to_string())),
                _ => None,
            },
            pending: self.obligations.clone(),
        }
    }
}

/// Identity, upper triangular with unit diagonal, or the first offending entry.
pub fn classify(matrix: &GroupRingMatrix) -> Certificate {
    let mut identity = true;
    for i in 0..matrix.size {
        let d = matrix.get(i, i);
        if !d.is_unit() {
            return Certificate::Fail { row: i, col: i, entry: d };
        }
        identity &= d.is_one();
    }
    for (&(r, c), e) in &matrix.entries {
        if r > c {
            return Certificate::Fail { row: r, col: c, entry: e.clone() };
        }
        if r != c {
            identity = false;
        }
    }
    if identity {
        Certificate::Identity
    } else {
        Certificate::UpperTriangularUnits
    }
}

/// Certifies a fully discharged ledger.
pub fn certify(ledger: &HandleLedger) -> Result<Certificate> {
    if !ledger.obligations.is_empty() {
        return Err(Error::IncompleteLedger { pending: ledger.obligations.len() });
    }
    Ok(classify(&ledger.boundary()))
}

/// Certifies the ledger as if every pending obligation were discharged.
pub fn certify_projected(ledger: &HandleLedger) -> Certificate {
    classify(&ledger.projected_boundary())
}

fn dual_sphere(model: &mut Model, host: ObjectId) -> Result<ObjectId> {
    let d = model.add_object(ObjectKind::DualSphere);
    model.object_mut(d)?.dual_of = Some(host);
    Ok(d)
}

/// Handles attached at one transverse pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct PairHandles {
    pub a_dual: ObjectId,
    pub b_dual: ObjectId,
    pub a_handle: usize,
    pub b_handle: usize,
}

pub(crate) fn pair_handles_in(m: &mut Model, pair: &TransversePair) -> Result<PairHandles> {
    let pair = m.pair(pair.distinguished)?;
    let processed = m
        .objects_of_kind(ObjectKind::DualSphere)
        .any(|o| o.site == Some(pair.distinguished));
    if processed {
        return Err(Error::Idempotency(format!("pair at {}", pair.distinguished)));
    }
    let at = dual_sphere(m, pair.sphere_a)?;
    let bt = dual_sphere(m, pair.sphere_b)?;
    m.object_mut(at)?.site = Some(pair.distinguished);
    m.object_mut(bt)?.site = Some(pair.distinguished);
    let one = GroupWord::identity();
    m.add_edge(at, pair.sphere_a, one.clone(), None, EdgeRole::Dual);
    m.add_edge(bt, pair.sphere_b, one.clone(), None, EdgeRole::Dual);
    m.add_edge(at, bt, one, None, EdgeRole::Dual);
    let a_handle = m.ledger.attach_two_handle(pair.sphere_a, vec![at], vec![pair.sphere_a]);
    let b_handle = m.ledger.attach_two_handle(pair.sphere_b, vec![bt], vec![pair.sphere_b]);
    Ok(PairHandles { a_dual: at, b_dual: bt, a_handle, b_handle })
}

/// The basic construction at a transverse pair: two 2-handles along pushoffs
/// of the Hopf link around the distinguished point, giving embedded dual
/// spheres `a^t`, `b^t` meeting each other once.
pub fn attach_pair_handles(model: &Model, pair: &TransversePair) -> Result<Model> {
    let mut m = model.clone();
    pair_handles_in(&mut m, pair)?;
    cap_tori(&mut m)?;
    Ok(m)
}

/// Gives every first-layer Whitney disk whose two surfaces both have dual
/// spheres a Clifford torus, with one cap over a dual of each surface.
pub fn cap_tori(model: &mut Model) -> Result<Vec<ObjectId>> {
    let capped: Vec<ObjectId> = model
        .objects_of_kind(ObjectKind::CliffordTorus)
        .filter_map(|t| t.dual_of)
        .collect();
    let disks: Vec<ObjectId> = model
        .objects_of_kind(ObjectKind::WhitneyDisk)
        .filter(|d| d.layer() == 1 && !capped.contains(&d.id))
        .map(|d| d.id)
        .collect();
    let mut created = Vec::new();
    for disk in disks {
        let [x, y] = model.disk_surfaces(disk)?;
        let first_dual = |host: ObjectId| {
            model
                .objects_of_kind(ObjectKind::DualSphere)
                .find(|o| o.dual_of == Some(host) && o.site.is_some())
                .map(|o| o.id)
        };
        if let (Some(dx), Some(dy)) = (first_dual(x), first_dual(y)) {
            let t = model.add_object(ObjectKind::CliffordTorus);
            let o = model.object_mut(t)?;
            o.dual_of = Some(disk);
            o.caps = vec![dx, dy];
            created.push(t);
        }
    }
    Ok(created)
}

/// The construction at a grope stage: 2-handles along the boundaries of the
/// transverse gropes' base surfaces near the meeting point of a symplectic
/// pair of circles. The two dual spheres meet each other twice.
pub fn attach_stage_handles(model: &Model, stage: ObjectId, pair_index: usize) -> Result<Model> {
    let mut m = model.clone();
    let s = m.object(stage)?;
    if !s.kind.is_surface_stage() {
        return Err(Error::Reference(format!("{stage} is a {}, not a grope surface", s.kind.name())));
    }
    let [sa, sb] = *s
        .children
        .get(pair_index)
        .ok_or_else(|| Error::Reference(format!("{stage} has no dual pair {pair_index}")))?;
    let processed = m
        .objects_of_kind(ObjectKind::DualSphere)
        .any(|o| o.site.is_none() && o.dual_of == Some(sa));
    if processed {
        return Err(Error::Idempotency(format!("dual pair {pair_index} of {stage}")));
    }
    let da = dual_sphere(&mut m, sa)?;
    let db = dual_sphere(&mut m, sb)?;
    let one = GroupWord::identity();
    m.add_edge(da, db, one.clone(), None, EdgeRole::Dual);
    m.add_edge(da, db, one, None, EdgeRole::Dual);
    m.ledger.attach_two_handle(sa, vec![da], vec![sa]);
    m.ledger.attach_two_handle(sb, vec![db], vec![sb]);
    Ok(m)
}

/// Attaches the 3-handle for the earliest pending obligation carried by
/// `carrier`, once the carrier has no intersections left.
pub fn discharge_obligation(model: &Model, carrier: ObjectId) -> Result<Model> {
    let mut m = model.clone();
    let pos = m
        .ledger
        .obligations
        .iter()
        .position(|o| o.carriers.contains(&carrier))
        .ok_or_else(|| Error::Reference(format!("no pending obligation carried by {carrier}")))?;
    let remaining = m.remaining_intersections(carrier)?;
    if remaining > 0 {
        return Err(Error::PrematureDischarge { sphere: carrier, remaining });
    }
    let ob = m.ledger.obligations.remove(pos);
    m.ledger.push(3, carrier, Vec::new(), Some(ob.handle));
    Ok(m)
}

/// Discharges every obligation whose carrier is intersection-free, repeatedly.
pub fn discharge_all(model: &Model) -> Result<Model> {
    let mut m = model.clone();
    loop {
        let ready = m.ledger.obligations.iter().find_map(|o| {
            o.carriers.iter().copied().find(|&c| m.remaining_intersections(c).map_or(false, |n| n == 0))
        });
        match ready {
            Some(c) => m = discharge_obligation(&m, c)?,
            None => return Ok(m),
        }
    }
}

/// Removes a cancelling pair of intersections across an embedded Whitney
/// disk (one with no interior intersections), together with its torus.
pub fn whitney_move(model: &Model, disk: ObjectId) -> Result<Model> {
    let mut m = model.clone();
    let d = m.object(disk)?;
    if d.kind != ObjectKind::WhitneyDisk {
        return Err(Error::Reference(format!("{disk} is not a Whitney disk")));
    }
    let pairing = d.cancels.ok_or_else(|| Error::Reference(format!("{disk} cancels nothing")))?;
    if m.edges_at(disk).next().is_some() {
        return Err(Error::Precondition(format!("Whitney disk {disk} is not embedded")));
    }
    for e in m.pairing_edges(pairing) {
        m.remove_edge(e);
    }
    let tori: Vec<ObjectId> = m
        .objects_of_kind(ObjectKind::CliffordTorus)
        .filter(|t| t.dual_of == Some(disk))
        .map(|t| t.id)
        .collect();
    for t in tori {
        m.remove_object(t);
    }
    m.remove_object(disk);
    Ok(m)
}

/// Whitney moves on every first-layer disk that has become embedded, until
/// none is left.
pub fn clear_embedded_pairings(model: &Model) -> Result<Model> {
    let mut m = model.clone();
    loop {
        let next = m
            .objects_of_kind(ObjectKind::WhitneyDisk)
            .find(|d| m.edges_at(d.id).next().is_none())
            .map(|d| d.id);
        match next {
            Some(d) => m = whitney_move(&m, d)?,
            None => return Ok(m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    fn figure_cycle() -> (Model, TransversePair) {
        let mut m = Model::new(1);
        let pair = m.add_sphere_pair();
        m.add_paired_intersections(pair.sphere_a, pair.sphere_b, GroupWord::generator(0)).unwrap();
        (m, pair)
    }

    #[test]
    fn minimal_pair_gains_three_edges() {
        let mut m = Model::new(1);
        let pair = m.add_sphere_pair();
        let before = m.edges().count();
        let out = attach_pair_handles(&m, &pair).unwrap();
        assert_eq!(out.edges().count(), before + 3);
        let duals: Vec<_> = out.objects_of_kind(ObjectKind::DualSphere).map(|o| o.id).collect();
        assert_eq!(duals.len(), 2);
        let mutual = out.edges().filter(|e| e.touches(duals[0]) && e.touches(duals[1])).count();
        assert_eq!(mutual, 1);
        assert_eq!(out.ledger.two_handles().len(), 2);
        assert_eq!(out.ledger.obligations.len(), 2);
        assert!(validate(&out).is_empty());
    }

    #[test]
    fn second_application_is_rejected() {
        let mut m = Model::new(1);
        let pair = m.add_sphere_pair();
        let out = attach_pair_handles(&m, &pair).unwrap();
        assert!(matches!(attach_pair_handles(&out, &pair), Err(Error::Idempotency(_))));
    }

    #[test]
    fn clifford_torus_gets_two_cap_slots() {
        let (m, pair) = figure_cycle();
        let out = attach_pair_handles(&m, &pair).unwrap();
        let tori: Vec<_> = out.objects_of_kind(ObjectKind::CliffordTorus).collect();
        assert_eq!(tori.len(), 1);
        assert_eq!(tori[0].caps.len(), 2);
        assert!(validate(&out).is_empty());
    }

    #[test]
    fn basic_construction_certifies_identity() {
        let (m, pair) = figure_cycle();
        let m = attach_pair_handles(&m, &pair).unwrap();
        assert!(matches!(certify(&m.ledger), Err(Error::IncompleteLedger { pending: 2 })));
        assert!(matches!(
            discharge_obligation(&m, pair.sphere_a),
            Err(Error::PrematureDischarge { remaining: 2, .. })
        ));
        let m = clear_embedded_pairings(&m).unwrap();
        let m = discharge_obligation(&m, pair.sphere_a).unwrap();
        let m = discharge_obligation(&m, pair.sphere_b).unwrap();
        assert_eq!(m.ledger.boundary().get(0, 0).to_string(), "1·(1)");
        assert_eq!(certify(&m.ledger).unwrap(), Certificate::Identity);
    }

    #[test]
    fn below_diagonal_entry_fails_with_witness() {
        let mut ledger = HandleLedger::default();
        let x = ObjectId(0);
        let h0 = ledger.attach_two_handle(x, vec![], vec![x]);
        let h1 = ledger.attach_two_handle(x, vec![], vec![x]);
        let g = GroupWord::generator(0);
        ledger.record_incidence(h1, h0, g.clone(), 1);
        assert_eq!(certify_projected(&ledger), Certificate::Fail {
            row: 1,
            col: 0,
            entry: {
                let mut e = GroupRingElement::default();
                e.add_term(g.clone(), 1);
                e
            }
        });
        let mut upper = HandleLedger::default();
        let h0 = upper.attach_two_handle(x, vec![], vec![x]);
        let h1 = upper.attach_two_handle(x, vec![], vec![x]);
        upper.record_incidence(h0, h1, g, 1);
        assert_eq!(certify_projected(&upper), Certificate::UpperTriangularUnits);
    }

    #[test]
    fn stage_handles_meet_twice() {
        let mut m = Model::new(1);
        let (base, _) = m.add_dyadic_grope(1, 2).unwrap();
        let out = attach_stage_handles(&m, base, 0).unwrap();
        let duals: Vec<_> = out.objects_of_kind(ObjectKind::DualSphere).map(|o| o.id).collect();
        assert_eq!(out.edges().filter(|e| e.touches(duals[0]) && e.touches(duals[1])).count(), 2);
        assert!(matches!(attach_stage_handles(&out, base, 0), Err(Error::Idempotency(_))));
        let cap = out.object(base).unwrap().children[0][0];
        let cap = out.object(cap).unwrap().children[0][0];
        assert!(matches!(attach_stage_handles(&out, cap, 0), Err(Error::Reference(_))));
    }

    #[test]
    fn every_stage_of_genus_one_height_two() {
        let mut m = Model::new(1);
        let (base, _) = m.add_dyadic_grope(1, 2).unwrap();
        let stages = crate::model::CappedGrope::of(&m, base).unwrap().stages(&m).unwrap();
        let mut pairs = 0;
        for s in stages {
            for i in 0..m.object(s).unwrap().children.len() {
                m = attach_stage_handles(&m, s, i).unwrap();
                pairs += 1;
            }
        }
        assert_eq!(pairs, 3);
        assert_eq!(m.ledger.two_handles().len(), 2 * pairs);
        assert_eq!(m.ledger.obligations.len(), 2 * pairs);
        let m = discharge_all(&m).unwrap();
        assert_eq!(certify(&m.ledger).unwrap(), Certificate::Identity);
    }
}
