//! Splitting a random capped grope until it is dyadic, then to distance 2,
//! printing the caps' dyadic labels and each branch's 2-type.

use grope::canon::ntypes;
use grope::gen::{self, GropeSpec};
use grope::model::{dyadic_labels, CappedGrope};
use grope::oracles::collision_search;
use grope::split::{split_to_distance, split_to_dyadic};

fn main() -> grope::Result<()> {
    let spec = GropeSpec { genus: 1, height: 2, edges: 4, ..GropeSpec::default() };
    let (m, base) = gen::random_grope(&mut gen::rng(11), spec)?;
    let labels: Vec<String> = m.label_set().iter().map(|l| l.to_string()).collect();
    println!("input: {} objects, {} edges, labels {labels:?}", m.object_count(), m.edges().count());

    let dyadic = split_to_dyadic(&m, base)?;
    println!("dyadic: {} caps, the first few:", CappedGrope::of(&dyadic, base)?.caps(&dyadic)?.len());
    for (cap, label) in dyadic_labels(&dyadic, base)?.into_iter().take(8) {
        let degree = dyadic.intersections_at(cap).count();
        println!("  {cap} at {label}, {degree} intersection(s)");
    }

    let split = split_to_distance(&m, base, 2)?;
    println!("distance 2: {} objects, collision: {:?}", split.object_count(), collision_search(&split, 2));
    for (i, t) in ntypes(&split, base, 2)?.iter().enumerate() {
        let s = t.as_str();
        println!("  branch {i}: {}", if s.len() > 60 { &s[..60] } else { s });
    }
    Ok(())
}
