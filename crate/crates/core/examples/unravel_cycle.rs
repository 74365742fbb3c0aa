//! Unraveling the length-one cycle of a single pair with three copies: the
//! self-intersecting Clifford torus becomes a triangle of tori.

use grope::gen;
use grope::handles::{certify, clear_embedded_pairings, discharge_all};
use grope::unravel::unravel;

fn main() -> grope::Result<()> {
    let (m, pair) = gen::figure_cycle();
    let (out, report) = unravel(&m, &pair, 3)?;
    println!("girth {:?} -> {:?}", report.girth_before, report.girth_after);
    for t in &report.tori {
        println!("  torus {} (copy {}): forced cap over {}, shifted cap over {} (copy {})", t.torus, t.copy, t.forced, t.shifted, t.shifted_copy);
    }
    for (orig, copies) in &report.copies_made {
        println!("  {orig} -> {copies:?}");
    }
    let done = discharge_all(&clear_embedded_pairings(&out)?)?;
    println!("certificate: {}", certify(&done.ledger)?.verdict());
    Ok(())
}
