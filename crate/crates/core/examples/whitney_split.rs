//! Splitting a Whitney tower by finger moves until every disk carries one
//! pairing of interior intersections.

use grope::gen;
use grope::model::validate;
use grope::split::{split_tower_to_single, DEFAULT_BUDGET};

fn main() -> grope::Result<()> {
    let (m, pair) = gen::random_tower(&mut gen::rng(5), 2)?;
    let show = |label: &str, m: &grope::model::Model| {
        println!("{label}:");
        for (i, layer) in m.tower(&pair).layers.iter().enumerate() {
            for &d in layer {
                println!("  layer {} disk {d}: {} interior intersection(s)", i + 1, m.intersections_at(d).count());
            }
        }
    };
    show("before", &m);
    let (out, splits) = split_tower_to_single(&m, &pair, DEFAULT_BUDGET)?;
    show(&format!("after {splits} finger move(s)"), &out);
    assert!(validate(&out).is_empty());
    Ok(())
}
