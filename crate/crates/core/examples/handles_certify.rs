//! The basic handle construction at a transverse pair, Whitney moves on the
//! now-embedded disks, and certification of the boundary matrix.

use grope::gen;
use grope::handles::{attach_pair_handles, certify, certify_projected, clear_embedded_pairings, discharge_all};

fn main() -> grope::Result<()> {
    let (m, pair) = gen::random_pair(&mut gen::rng(8), 2, 2, false)?;
    let m = attach_pair_handles(&m, &pair)?;
    println!("2-handles: {:?}", m.ledger.two_handles());
    println!("pending obligations: {}", m.ledger.obligations.len());
    println!("projected: {}", certify_projected(&m.ledger).verdict());
    match certify(&m.ledger) {
        Ok(c) => println!("certificate: {}", c.verdict()),
        Err(e) => println!("not yet: {e}"),
    }

    let done = discharge_all(&clear_embedded_pairings(&m)?)?;
    let cert = certify(&done.ledger)?;
    println!("after discharge: {} 3-handle(s), certificate {}", done.ledger.three_handles().count(), cert.verdict());
    Ok(())
}
