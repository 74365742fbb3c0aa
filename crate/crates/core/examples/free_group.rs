//! Reduced words in a free group, their classes, and evaluation in a
//! finite quotient.

use grope::{FiniteGroup, GroupWord};

fn main() -> grope::Result<()> {
    let w = GroupWord::parse("a b b' c a'", 3)?;
    let v = GroupWord::parse("a c'", 3)?;
    println!("w = {w}  (reduced, length {})", w.len());
    println!("w^-1 = {}", w.invert());
    println!("w v = {}", w.multiply(&v));
    println!("class of w = {}", w.class());

    let z5 = FiniteGroup::cyclic(5);
    let x = GroupWord::parse("a a a a a", 1)?;
    println!("a^5 in Z/5 is the identity: {}", z5.equal(&x, &GroupWord::identity())?);
    Ok(())
}
