//! Gadgetisation, its inverse, gadget predicates and the counting
//! counterexample family.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::bisim::c2_types;
use crate::error::{Error, Result};
use crate::graph::{make_strict_linear_order, FeaturedGraph, Mode};
use crate::order::is_strict_linear_order;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    S,
    T,
    Iota,
    Both,
}

pub fn kind_of(g: &FeaturedGraph, v: usize) -> Kind {
    let f = g.feature(v);
    match (f.first().copied().unwrap_or(false), f.get(1).copied().unwrap_or(false)) {
        (true, false) => Kind::S,
        (false, true) => Kind::T,
        (false, false) => Kind::Iota,
        (true, true) => Kind::Both,
    }
}

pub fn s_vertex(v: usize) -> usize {
    3 * v
}
pub fn t_vertex(v: usize) -> usize {
    3 * v + 1
}
pub fn iota_vertex(v: usize) -> usize {
    3 * v + 2
}

/// Undirected 2-featured encoding: `s_v = 3v` (1,0), `t_v = 3v+1` (0,1),
/// `ι_v = 3v+2` (0,0); `s_v – t_u` per edge `(v,u)` plus `s_v – ι_v – t_v`.
pub fn gadgetise(g: &FeaturedGraph) -> Result<FeaturedGraph> {
    if g.mode() != Mode::Directed || g.d() != 0 {
        return Err(Error::InvalidParameter("gadgetise needs a featureless directed graph".into()));
    }
    let n = g.n();
    let mut features = Vec::with_capacity(3 * n);
    for _ in 0..n {
        features.push(vec![true, false]);
        features.push(vec![false, true]);
        features.push(vec![false, false]);
    }
    let pairs = g
        .edges()
        .map(|(v, u)| (s_vertex(v), t_vertex(u)))
        .chain((0..n).flat_map(|v| [(s_vertex(v), iota_vertex(v)), (iota_vertex(v), t_vertex(v))]));
    FeaturedGraph::undirected(3 * n, 2, features, pairs)
}

fn require_gadget_shape(g: &FeaturedGraph) -> Result<()> {
    if g.mode() != Mode::Undirected || g.d() != 2 {
        return Err(Error::InvalidParameter("gadget predicates need an undirected graph with d = 2".into()));
    }
    Ok(())
}

/// First violated clause among ψ₁–ψ₄, with a description.
pub fn gadget_violation(g: &FeaturedGraph) -> Result<Option<(&'static str, String)>> {
    require_gadget_shape(g)?;
    let n = g.n();
    if let Some(v) = (0..n).find(|&v| kind_of(g, v) == Kind::Both) {
        return Ok(Some(("psi1", format!("vertex {v} carries both features"))));
    }
    for (u, v) in g.edges() {
        let allowed = matches!(
            (kind_of(g, u), kind_of(g, v)),
            (Kind::S, Kind::T) | (Kind::T, Kind::S) | (Kind::S, Kind::Iota) | (Kind::Iota, Kind::S) | (Kind::T, Kind::Iota) | (Kind::Iota, Kind::T)
        );
        if !allowed {
            return Ok(Some(("psi2", format!("edge {u}-{v} joins forbidden kinds"))));
        }
    }
    let count = |v: usize, k: Kind| g.out(v).iter().filter(|&&u| kind_of(g, u) == k).count();
    for v in 0..n {
        if matches!(kind_of(g, v), Kind::S | Kind::T) && count(v, Kind::Iota) != 1 {
            return Ok(Some(("psi3", format!("vertex {v} has {} identity neighbours", count(v, Kind::Iota)))));
        }
    }
    for v in 0..n {
        if kind_of(g, v) == Kind::Iota && (count(v, Kind::S) != 1 || count(v, Kind::T) != 1) {
            return Ok(Some((
                "psi4",
                format!("identity vertex {v} has {} s- and {} t-neighbours", count(v, Kind::S), count(v, Kind::T)),
            )));
        }
    }
    Ok(None)
}

pub fn is_gadgetisation(g: &FeaturedGraph) -> Result<bool> {
    Ok(gadget_violation(g)?.is_none())
}

/// Underlying digraph; vertex `b` corresponds to the `b`-th identity
/// vertex in ascending order.
pub fn degadgetise(g: &FeaturedGraph) -> Result<FeaturedGraph> {
    if let Some((clause, detail)) = gadget_violation(g)? {
        return Err(Error::NotGadget { clause, detail });
    }
    let iotas: Vec<usize> = (0..g.n()).filter(|&v| kind_of(g, v) == Kind::Iota).collect();
    let mut owner = vec![usize::MAX; g.n()];
    for (b, &i) in iotas.iter().enumerate() {
        for &u in g.out(i) {
            owner[u] = b;
        }
    }
    let edges: BTreeSet<(usize, usize)> = g
        .edges()
        .filter(|&(u, v)| kind_of(g, u) == Kind::S && kind_of(g, v) == Kind::T)
        .map(|(u, v)| (owner[u], owner[v]))
        .collect();
    FeaturedGraph::directed(iotas.len(), edges)
}

pub fn is_gadget_of_strict_linear_order(g: &FeaturedGraph) -> bool {
    match degadgetise(g) {
        Ok(h) => is_strict_linear_order(&h).unwrap_or(false),
        Err(_) => false,
    }
}

pub const FAMILY_CAP: usize = 6;

#[derive(Debug, Clone)]
pub struct FamilyReport {
    pub l: usize,
    pub c: usize,
    pub n: usize,
    pub g: FeaturedGraph,
    pub h: FeaturedGraph,
    pub g_is_order_gadget: bool,
    pub h_is_order_gadget: bool,
    /// Vertices `v` where `G, v` and `H, v` are separated.
    pub inequivalent: Vec<usize>,
    pub changed_edges: usize,
}

impl FamilyReport {
    pub fn all_green(&self) -> bool {
        self.g_is_order_gadget && !self.h_is_order_gadget && self.inequivalent.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let yes = |b: bool| if b { "yes" } else { "no" };
        let _ = writeln!(s, "family L={} c={} n={} order size {}", self.l, self.c, self.n, 2 * self.n + 1);
        let _ = writeln!(s, "  gadget vertices: {}", self.g.n());
        let _ = writeln!(s, "  changed unordered edges: {}", self.changed_edges);
        let _ = writeln!(s, "  G is a gadgetised strict order: {}", yes(self.g_is_order_gadget));
        let _ = writeln!(s, "  H is a gadgetised strict order: {}", yes(self.h_is_order_gadget));
        let _ = writeln!(
            s,
            "  counting-equivalent at every vertex: {} ({} of {} vertices separated)",
            yes(self.inequivalent.is_empty()),
            self.inequivalent.len(),
            self.g.n()
        );
        let _ = writeln!(s, "  verdict: {}", if self.all_green() { "PASS" } else { "FAIL" });
        s
    }
}

/// `G` gadgetises the order on `2n+1` points with `n = L·c + 1`; `H` swaps
/// the edge `s_{-1} – t_1` for `s_1 – t_{-1}`.
pub fn c2_counterexample_family(l: usize, c: usize) -> Result<FamilyReport> {
    if l == 0 || c == 0 {
        return Err(Error::InvalidParameter("family needs L >= 1 and c >= 1".into()));
    }
    if l * c > FAMILY_CAP {
        return Err(Error::CapExceeded(format!("family limited to L*c <= {FAMILY_CAP}")));
    }
    let n = l * c + 1;
    let g = gadgetise(&make_strict_linear_order(2 * n + 1)?)?;
    let pos = |i: isize| (i + n as isize) as usize;
    let mut pairs: BTreeSet<(usize, usize)> = g.edges().filter(|&(u, v)| u <= v).collect();
    let removed = (s_vertex(pos(-1)), t_vertex(pos(1)));
    let added = (s_vertex(pos(1)), t_vertex(pos(-1)));
    pairs.remove(&removed);
    pairs.insert((added.0.min(added.1), added.0.max(added.1)));
    let h = FeaturedGraph::undirected(g.n(), 2, g.features().to_vec(), pairs)?;
    let changed_edges = g.edge_set().symmetric_difference(&h.edge_set()).filter(|(u, v)| u <= v).count();
    let types = c2_types(&[&g, &h], l, c)?;
    let inequivalent = (0..g.n()).filter(|&v| types.class(l, 0, v) != types.class(l, 1, v)).collect();
    Ok(FamilyReport {
        l,
        c,
        n,
        g_is_order_gadget: is_gadget_of_strict_linear_order(&g),
        h_is_order_gadget: is_gadget_of_strict_linear_order(&h),
        g,
        h,
        inequivalent,
        changed_edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::isomorphic;

    #[test]
    fn gadgetise_examples() {
        let g = gadgetise(&make_strict_linear_order(3).unwrap()).unwrap();
        assert_eq!(g.n(), 9);
        assert_eq!(g.undirected_edge_count(), 9);
        let one = gadgetise(&FeaturedGraph::directed(1, []).unwrap()).unwrap();
        assert_eq!((one.n(), one.undirected_edge_count()), (3, 2));
        assert!(gadgetise(&g).is_err());
    }

    #[test]
    fn degadgetise_examples() {
        let o4 = make_strict_linear_order(4).unwrap();
        assert!(isomorphic(&degadgetise(&gadgetise(&o4).unwrap()).unwrap(), &o4).unwrap());
        let g = gadgetise(&o4).unwrap();
        let mut e = g.edge_set();
        e.remove(&(0, 2));
        e.remove(&(2, 0));
        let broken = g.with_edges(&e).unwrap();
        match degadgetise(&broken) {
            Err(Error::NotGadget { clause, .. }) => assert_eq!(clause, "psi3"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn predicate_examples() {
        let g = gadgetise(&make_strict_linear_order(3).unwrap()).unwrap();
        let mut e = g.edge_set();
        e.insert((0, 3));
        e.insert((3, 0));
        assert!(!is_gadgetisation(&g.with_edges(&e).unwrap()).unwrap());
        let mut e = g.edge_set();
        e.insert((3, 2));
        e.insert((2, 3));
        let two_s = g.with_edges(&e).unwrap();
        assert_eq!(gadget_violation(&two_s).unwrap().unwrap().0, "psi3");
        let cyc = FeaturedGraph::directed(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(!is_gadget_of_strict_linear_order(&gadgetise(&cyc).unwrap()));
        assert!(is_gadget_of_strict_linear_order(&g));
    }

    #[test]
    fn family_small() {
        let r = c2_counterexample_family(1, 1).unwrap();
        assert_eq!(r.g.n(), 15);
        assert_eq!(r.changed_edges, 2);
        assert!(r.all_green(), "{}", r.render());
        assert!(c2_counterexample_family(4, 2).is_err());
    }
}
