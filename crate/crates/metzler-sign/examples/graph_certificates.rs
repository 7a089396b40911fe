//! The graph machinery behind the structural tests: matrix digraphs, cycle
//! witnesses, triangularizing permutations, reachability, and DOT export.
//!
//! ```bash
//! cargo run -p metzler-sign --example graph_certificates
//! ```

use metzler_sign::graph::{bipartite_cycle_free, Digraph};
use metzler_sign::signs::QualMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Entry (i, j) nonzero creates the edge j -> i: the influence points
    // from the column index to the row index.
    let lower: QualMatrix = "- 0 0 ; + - 0 ; + + -".parse()?;
    let g = Digraph::of_matrix(&lower)?;
    println!("edges of the lower-triangular pattern: {:?}", g.edges().collect::<Vec<_>>());

    let order = g.topo_permutation()?;
    println!("triangularizing order (reversal expected): {order:?}");
    println!("relabeled pattern:\n{}\n", lower.permute(&order)?);

    let cyclic: QualMatrix = "- + ; + -".parse()?;
    let g = Digraph::of_matrix(&cyclic)?;
    if let Some(w) = g.find_cycle() {
        println!("cycle in the exchange pattern: {w} (validates: {})", w.validate(&g));
    }

    let chain = Digraph::from_edges(3, [(2, 1), (1, 0)])?;
    let reach = chain.reachability();
    println!("2 reaches 0 along the chain: {}", reach[2][0]);

    // Cycle-freeness of the bipartite product graph decides whether every
    // realization of a product of nonnegative patterns is nilpotent.
    let shift: QualMatrix = "0 + ; 0 0".parse()?;
    let (free, _) = bipartite_cycle_free(&shift, &shift)?;
    println!("shift * shift structurally nilpotent: {free}");
    let swap: QualMatrix = "0 + ; + 0".parse()?;
    let (free, witness) = bipartite_cycle_free(&swap, &swap)?;
    println!("swap * swap structurally nilpotent: {free} ({:?})", witness.map(|w| w.nodes));

    println!("\nDOT of the chain graph:\n{}", chain.to_dot());
    Ok(())
}
