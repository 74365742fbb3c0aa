//! Seeded generators for fixtures and fuzzing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::group::{Generator, GroupWord};
use crate::model::grope::attach_dyadic_pair;
use crate::model::{label_of, CappedGrope, EdgeRole, Model, ObjectId, ObjectKind, TransversePair};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A reduced word of length one or two over the first `generators` letters.
pub fn random_label(rng: &mut impl Rng, generators: usize) -> GroupWord {
    let len = if rng.gen_bool(0.3) { 2 } else { 1 };
    let raw: Vec<Generator> = (0..len)
        .map(|_| Generator { index: rng.gen_range(0..generators) as u8, inverted: rng.gen_bool(0.5) })
        .collect();
    GroupWord::reduce(raw, generators).expect("letters are in range")
}

#[derive(Clone, Copy, Debug)]
pub struct GropeSpec {
    pub genus: u32,
    pub height: u32,
    pub edges: usize,
    pub generators: usize,
    pub loops: bool,
    /// Occasionally give a stage a second dual pair.
    pub irregular: bool,
}

impl Default for GropeSpec {
    fn default() -> Self {
        GropeSpec { genus: 1, height: 2, edges: 6, generators: 2, loops: true, irregular: false }
    }
}

/// A capped grope with random intersections among its caps.
pub fn random_grope(rng: &mut impl Rng, spec: GropeSpec) -> Result<(Model, ObjectId)> {
    let mut m = Model::new(spec.generators);
    let (base, _) = m.add_dyadic_grope(spec.genus.max(1), spec.height.max(1))?;
    let grope = CappedGrope::of(&m, base)?;
    if spec.irregular && spec.height >= 2 && rng.gen_bool(0.5) {
        let stages: Vec<ObjectId> = grope.stages(&m)?.into_iter().filter(|&s| s != base).collect();
        let &s = stages.choose(rng).expect("height two has stages");
        let depth = label_of(&m, s)?.map_or(0, |l| l.bits.len()) as u32;
        attach_dyadic_pair(&mut m, s, grope.height - depth)?;
        m.object_mut(base)?.dyadic = false;
    }
    let caps = grope.caps(&m)?;
    for _ in 0..spec.edges {
        let a = *caps.choose(rng).expect("gropes have caps");
        let mut b = *caps.choose(rng).expect("gropes have caps");
        if !spec.loops {
            while b == a && caps.len() > 1 {
                b = *caps.choose(rng).unwrap();
            }
        }
        let label = random_label(rng, spec.generators);
        m.add_edge(a, b, label, None, EdgeRole::Intersection);
    }
    Ok((m, base))
}

/// A transverse pair whose extra intersections come in `pairings` Whitney
/// pairings, between A and B or, when `self_pairings`, of a sphere with itself.
pub fn random_pair(rng: &mut impl Rng, pairings: usize, generators: usize, self_pairings: bool) -> Result<(Model, TransversePair)> {
    let mut m = Model::new(generators);
    let pair = m.add_sphere_pair();
    for _ in 0..pairings {
        let (x, y) = match if self_pairings { rng.gen_range(0..3) } else { 0 } {
            0 => (pair.sphere_a, pair.sphere_b),
            1 => (pair.sphere_a, pair.sphere_a),
            _ => (pair.sphere_b, pair.sphere_b),
        };
        let label = random_label(rng, generators);
        m.add_paired_intersections(x, y, label)?;
    }
    Ok((m, pair))
}

/// A pair with a two-layer Whitney tower: first-layer disks over random
/// pairings, then pairings among first-layer disks. Every first-layer disk
/// that receives interior intersections receives at least two pairings.
pub fn random_tower(rng: &mut impl Rng, generators: usize) -> Result<(Model, TransversePair)> {
    let pairings = rng.gen_range(1..=3);
    let (mut m, pair) = random_pair(rng, pairings, generators, true)?;
    let disks: Vec<ObjectId> = m.objects_of_kind(ObjectKind::WhitneyDisk).map(|o| o.id).collect();
    let busy = *disks.choose(rng).expect("at least one pairing");
    for _ in 0..rng.gen_range(2..=3) {
        let other = *disks.choose(rng).unwrap();
        let label = random_label(rng, generators);
        m.add_paired_intersections(busy, other, label)?;
    }
    Ok((m, pair))
}

/// `pairs` transverse pairs strung along arcs `B^i -> A^(i+1)`; when
/// `closed`, the last arc returns to the first pair. Arc `i` carries
/// `labels[i % labels.len()]`.
pub fn chain(pairs: usize, labels: &[GroupWord], closed: bool) -> Result<(Model, Vec<TransversePair>)> {
    let generators = labels.iter().map(GroupWord::generator_bound).max().unwrap_or(0).max(1);
    let mut m = Model::new(generators);
    let ps: Vec<TransversePair> = (0..pairs).map(|_| m.add_sphere_pair()).collect();
    let arcs = if closed { pairs } else { pairs.saturating_sub(1) };
    for i in 0..arcs {
        let label = labels.get(i % labels.len().max(1)).cloned().unwrap_or_default();
        m.add_paired_intersections(ps[i].sphere_b, ps[(i + 1) % pairs].sphere_a, label)?;
    }
    Ok((m, ps))
}

/// One pair whose spheres meet in a cancelling pair of `g`-labeled points:
/// its Clifford torus meets itself, a cycle of length one.
pub fn figure_cycle() -> (Model, TransversePair) {
    let (m, ps) = chain(1, &[GroupWord::generator(0)], true).expect("fixed fixture");
    (m, ps[0])
}

/// A closed chain of random length in `1..=max_len` with random labels.
pub fn planted_cycle(rng: &mut impl Rng, max_len: usize, generators: usize) -> Result<(Model, Vec<TransversePair>)> {
    let len = rng.gen_range(1..=max_len);
    let labels: Vec<GroupWord> = (0..len).map(|_| random_label(rng, generators)).collect();
    chain(len, &labels, true)
}
