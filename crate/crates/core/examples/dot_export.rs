//! Graphviz text for the torus graph before and after unraveling.

use grope::dot::quotient_dot;
use grope::gen;
use grope::graph::IntersectionGraph;
use grope::unravel::unravel;

fn main() -> grope::Result<()> {
    let (m, pair) = gen::figure_cycle();
    let (before, _) = unravel(&m, &pair, 1)?;
    let (after, _) = unravel(&m, &pair, 3)?;
    print!("{}", quotient_dot(&before, &IntersectionGraph::torus_graph(&before), "before"));
    print!("{}", quotient_dot(&after, &IntersectionGraph::torus_graph(&after), "after"));
    Ok(())
}
