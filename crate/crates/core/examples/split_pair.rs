//! Splitting a transverse pair so each sphere carries a single Whitney
//! pairing of extra intersections.

use grope::group::GroupWord;
use grope::model::{validate, Model};
use grope::split::{split_pairs_to_line, DEFAULT_BUDGET};

fn main() -> grope::Result<()> {
    let mut m = Model::new(2);
    let pair = m.add_sphere_pair();
    m.add_paired_intersections(pair.sphere_a, pair.sphere_b, GroupWord::generator(0))?;
    m.add_paired_intersections(pair.sphere_a, pair.sphere_b, GroupWord::generator(1))?;
    println!("before: {} pair(s), extras {:?}", m.pairs().len(), m.extras(&pair));

    let (out, splits) = split_pairs_to_line(&m, DEFAULT_BUDGET)?;
    println!("after {splits} split(s): {} pairs", out.pairs().len());
    for p in out.pairs() {
        let extras: Vec<String> = out.extras(&p).iter().map(|&e| out.edge(e).unwrap().label.to_string()).collect();
        println!("  {} / {}: extras labeled {:?}", p.sphere_a, p.sphere_b, extras);
    }
    println!("2-handles recorded: {}", out.ledger.two_handles().len());
    assert!(validate(&out).is_empty());
    assert_eq!(out.label_set(), m.label_set());
    Ok(())
}
