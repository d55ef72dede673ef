//! Half-spaces, coherence, Helly, hulls, lex-least paths and pruning on a
//! small tree given in the line format.

use std::collections::BTreeSet;

use rn_topo::tree::{
    coherent_transversal, convex_hull, edge_leq, helly_common_vertex, is_coherent, lex_least_path, parse_tree_document,
    prune_rho_finite, DirectedEdge,
};
use rn_topo::weight::Weight;

const DOC: &str = "\
tree 8
edge 0 1 0
edge 1 2 1
edge 1 3 2
edge 3 4 0
edge 3 5 1
edge 5 6 0
edge 5 7 2
weight 0 1/2
weight 1 1/2
weight 2 1/4
weight 3 1
weight 4 1/8
weight 5 2
weight 6 1/16
weight 7 4
";

fn main() {
    let doc = parse_tree_document(DOC).unwrap();
    let t = &doc.tree;
    let e = DirectedEdge::new(3, 5);
    println!("V^o(3 -> 5) = {:?}", t.half_space(&e).unwrap());
    println!("(1 -> 3) <= (3 -> 5): {}", edge_leq(t, &DirectedEdge::new(1, 3), &e).unwrap());

    let h = [DirectedEdge::new(2, 1), DirectedEdge::new(4, 3), DirectedEdge::new(1, 3)];
    println!("coherent: {}", is_coherent(t, &h).unwrap());
    let tr = coherent_transversal(t, &h).unwrap();
    println!("maximal {:?}, classes {:?}", tr.maximal, tr.classes);

    let family = vec![BTreeSet::from([1, 3, 5]), BTreeSet::from([3, 4]), BTreeSet::from([0, 1, 3])];
    println!("Helly vertex: {}", helly_common_vertex(t, &family).unwrap());

    let marks = BTreeSet::from([2, 6]);
    let hull = convex_hull(t, &marks);
    println!("hull of {marks:?}: {hull:?}");
    println!("lex-least path 7 -> {{2, 4}}: {:?}", lex_least_path(t, &doc.coloring, &7, &BTreeSet::from([2, 4])).unwrap());
    for p in prune_rho_finite(t, &doc.weights, &hull, &"1".parse::<Weight>().unwrap()).unwrap() {
        println!("  prune {:?}: mass {} {}", p.edge, p.mass, if p.exceeds_bound { "(over 1)" } else { "" });
    }
}
