//! Feature-preserving homomorphism counts.

use crate::error::{Error, Result};
use crate::gadget;
use crate::graph::{FeaturedGraph, Mode};

pub const PATTERN_CAP: usize = 6;
pub const TARGET_CAP: usize = 30;

/// The directed path 0 → 1 → 2.
pub fn p2_pattern() -> FeaturedGraph {
    FeaturedGraph::directed(3, [(0, 1), (1, 2)]).expect("static pattern")
}

/// Number of maps `h` that preserve edges and feature vectors.
pub fn count_homomorphisms(p: &FeaturedGraph, g: &FeaturedGraph) -> Result<u64> {
    count_homomorphisms_capped(p, g, PATTERN_CAP, TARGET_CAP)
}

/// As [`count_homomorphisms`] with explicit size caps; the backtracking
/// search prunes on features and already-placed edges.
pub fn count_homomorphisms_capped(p: &FeaturedGraph, g: &FeaturedGraph, pattern_cap: usize, target_cap: usize) -> Result<u64> {
    if p.mode() != g.mode() {
        return Err(Error::ModeMismatch("pattern and target modes differ".into()));
    }
    if p.d() != g.d() {
        return Err(Error::DimensionMismatch(format!("pattern d = {}, target d = {}", p.d(), g.d())));
    }
    if p.n() > pattern_cap || g.n() > target_cap {
        return Err(Error::CapExceeded(format!(
            "brute-force homomorphism counting limited to |P| <= {pattern_cap}, |G| <= {target_cap}"
        )));
    }
    let candidates: Vec<Vec<usize>> = (0..p.n())
        .map(|u| (0..g.n()).filter(|&x| g.feature(x) == p.feature(u)).collect())
        .collect();
    let mut h = vec![0usize; p.n()];
    fn rec(i: usize, p: &FeaturedGraph, g: &FeaturedGraph, cand: &[Vec<usize>], h: &mut Vec<usize>) -> u64 {
        if i == p.n() {
            return 1;
        }
        let mut total = 0;
        for &x in &cand[i] {
            h[i] = x;
            let ok = p.out(i).iter().filter(|&&j| j <= i).all(|&j| g.has_edge(x, h[j]))
                && p.inn(i).iter().filter(|&&j| j < i).all(|&j| g.has_edge(h[j], x));
            if ok {
                total += rec(i + 1, p, g, cand, h);
            }
        }
        total
    }
    Ok(rec(0, p, g, &candidates, &mut h))
}

/// `Σ_v |N_in(v)| · |N_out(v)|`, the number of homomorphic 2-paths.
pub fn count_p2(g: &FeaturedGraph) -> Result<u64> {
    if g.mode() != Mode::Directed {
        return Err(Error::ModeMismatch("count_p2 needs a directed graph".into()));
    }
    Ok((0..g.n()).map(|v| (g.inn(v).len() * g.out(v).len()) as u64).sum())
}

/// Homomorphisms of the gadgetised 2-path into a gadget graph. Every ι
/// vertex joins a unique s and t; the count multiplies the number of s
/// neighbours of its t by the number of t neighbours of its s.
pub fn count_gadget_p2(g: &FeaturedGraph) -> Result<u64> {
    if let Some((clause, detail)) = gadget::gadget_violation(g)? {
        return Err(Error::NotGadget { clause, detail });
    }
    let mut total = 0u64;
    for v in 0..g.n() {
        if gadget::kind_of(g, v) != gadget::Kind::Iota {
            continue;
        }
        let s = g.out(v).iter().copied().find(|&u| gadget::kind_of(g, u) == gadget::Kind::S).expect("checked");
        let t = g.out(v).iter().copied().find(|&u| gadget::kind_of(g, u) == gadget::Kind::T).expect("checked");
        let into_t = g.out(t).iter().filter(|&&u| gadget::kind_of(g, u) == gadget::Kind::S).count() as u64;
        let out_of_s = g.out(s).iter().filter(|&&u| gadget::kind_of(g, u) == gadget::Kind::T).count() as u64;
        total += into_t * out_of_s;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::gadgetise;
    use crate::graph::make_strict_linear_order;

    #[test]
    fn brute_force_examples() {
        let p = p2_pattern();
        assert_eq!(count_homomorphisms(&p, &make_strict_linear_order(3).unwrap()).unwrap(), 1);
        let g3 = FeaturedGraph::directed(3, [(0, 1), (1, 0), (2, 2)]).unwrap();
        assert_eq!(count_homomorphisms(&p, &g3).unwrap(), 3);
        let cyc = FeaturedGraph::directed(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(count_homomorphisms(&p, &cyc).unwrap(), 3);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(count_p2(&make_strict_linear_order(3).unwrap()).unwrap(), 1);
        assert_eq!(count_p2(&FeaturedGraph::directed(4, []).unwrap()).unwrap(), 0);
        let o6 = make_strict_linear_order(6).unwrap();
        assert_eq!(count_p2(&o6).unwrap(), 20);
        assert_eq!(count_homomorphisms(&p2_pattern(), &o6).unwrap(), 20);
        let u = FeaturedGraph::undirected(2, 0, vec![vec![]; 2], [(0, 1)]).unwrap();
        assert!(count_p2(&u).is_err());
    }

    #[test]
    fn gadget_examples() {
        let g = gadgetise(&make_strict_linear_order(3).unwrap()).unwrap();
        assert_eq!(count_gadget_p2(&g).unwrap(), 1);
        let e = gadgetise(&FeaturedGraph::directed(2, []).unwrap()).unwrap();
        assert_eq!(count_gadget_p2(&e).unwrap(), 0);
        let cyc = gadgetise(&FeaturedGraph::directed(3, [(0, 1), (1, 2), (2, 0)]).unwrap()).unwrap();
        assert_eq!(count_gadget_p2(&cyc).unwrap(), 3);
        let gp = gadgetise(&p2_pattern()).unwrap();
        assert!(count_homomorphisms(&gp, &cyc).is_err());
        assert_eq!(count_homomorphisms_capped(&gp, &cyc, 9, 30).unwrap(), 3);
        assert!(count_gadget_p2(&make_strict_linear_order(2).unwrap()).is_err());
    }
}
