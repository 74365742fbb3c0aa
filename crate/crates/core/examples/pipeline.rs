//! The full pipeline at radius 3 on a pair whose sphere `A` meets itself in
//! two pairings: the distinguished cap ends up at the root of a tree.

use grope::group::GroupWord;
use grope::model::Model;
use grope::pipeline::theorem1_pipeline;

fn main() -> grope::Result<()> {
    let mut m = Model::new(2);
    let pair = m.add_sphere_pair();
    m.add_paired_intersections(pair.sphere_a, pair.sphere_a, GroupWord::generator(0))?;
    m.add_paired_intersections(pair.sphere_a, pair.sphere_a, GroupWord::generator(1))?;
    let (out, r) = theorem1_pipeline(&m, &pair, 3)?;
    println!("splits {}, pushed {}, implanted {}", r.splits, r.pushed, r.implanted);
    println!("ball around {}: {} vertices, {} edges, tree: {}", r.root, r.verdict.vertices, r.verdict.edges, r.is_tree());
    println!("labels: {:?}", r.labels);
    println!("certificate: {}", r.certificate.verdict);
    println!("output: {} objects", out.object_count());
    Ok(())
}
