//! Structural order predicates used as ground truth.

use crate::error::{Error, Result};
use crate::graph::{FeaturedGraph, Mode};
use crate::homcount::count_p2;

fn require_directed(g: &FeaturedGraph) -> Result<()> {
    if g.mode() == Mode::Directed {
        Ok(())
    } else {
        Err(Error::ModeMismatch("order predicates need a directed graph".into()))
    }
}

pub fn binom2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

pub fn binom3(n: u64) -> u64 {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Irreflexive, total and transitive.
pub fn is_strict_linear_order(g: &FeaturedGraph) -> Result<bool> {
    require_directed(g)?;
    let n = g.n();
    for x in 0..n {
        if g.has_edge(x, x) {
            return Ok(false);
        }
        for y in 0..n {
            if x != y && !g.has_edge(x, y) && !g.has_edge(y, x) {
                return Ok(false);
            }
        }
    }
    for x in 0..n {
        for &y in g.out(x) {
            for &z in g.out(y) {
                if !g.has_edge(x, z) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `|E| = C(n,2)` and `hom(P₂, G) = C(n,3)`.
pub fn characterization_holds(g: &FeaturedGraph) -> Result<bool> {
    require_directed(g)?;
    let n = g.n() as u64;
    Ok(g.edge_count() as u64 == binom2(n) && count_p2(g)? == binom3(n))
}

pub fn max_out_degree(g: &FeaturedGraph) -> usize {
    (0..g.n()).map(|v| g.out(v).len()).max().unwrap_or(0)
}
