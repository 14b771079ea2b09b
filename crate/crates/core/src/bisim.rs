//! Partition refinement for graded bisimulation and the two-pebble counting
//! game, global counting variants, an EF-game oracle and literal game
//! searches used to cross-check the refinement.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::FeaturedGraph;

/// Per-round class labels over the disjoint union of the input graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeAssignment {
    offsets: Vec<usize>,
    sizes: Vec<usize>,
    rounds: Vec<Vec<usize>>,
    class_counts: Vec<usize>,
}

impl TypeAssignment {
    /// Number of computed rounds minus one (the `L` of the assignment).
    pub fn depth(&self) -> usize {
        self.rounds.len() - 1
    }
    pub fn class(&self, round: usize, graph: usize, v: usize) -> usize {
        self.rounds[round][self.offsets[graph] + v]
    }
    pub fn classes(&self, round: usize, graph: usize) -> &[usize] {
        let o = self.offsets[graph];
        &self.rounds[round][o..o + self.sizes[graph]]
    }
    pub fn num_classes(&self, round: usize) -> usize {
        self.class_counts[round]
    }
    pub fn class_size(&self, round: usize, graph: usize, class: usize) -> usize {
        self.classes(round, graph).iter().filter(|&&k| k == class).count()
    }
    pub fn graph_count(&self) -> usize {
        self.sizes.len()
    }

    /// Round-by-round class table for reports.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (r, _) in self.rounds.iter().enumerate() {
            let _ = write!(s, "round {r}:");
            for gi in 0..self.sizes.len() {
                let cls: Vec<String> = self.classes(r, gi).iter().map(|k| k.to_string()).collect();
                let _ = write!(s, " G{}=[{}]", gi + 1, cls.join(" "));
            }
            let _ = writeln!(s);
        }
        s
    }
}

fn check_compatible(graphs: &[&FeaturedGraph]) -> Result<()> {
    if let Some(first) = graphs.first() {
        for g in graphs {
            if g.mode() != first.mode() {
                return Err(Error::ModeMismatch("graphs must share a mode".into()));
            }
            if g.d() != first.d() {
                return Err(Error::DimensionMismatch("graphs must share a feature dimension".into()));
            }
        }
    } else {
        return Err(Error::InvalidParameter("at least one graph required".into()));
    }
    Ok(())
}

fn relabel<K: Ord>(sigs: Vec<K>) -> (Vec<usize>, usize) {
    let mut ids: BTreeMap<&K, usize> = BTreeMap::new();
    let mut order = Vec::with_capacity(sigs.len());
    for s in &sigs {
        let next = ids.len();
        order.push(*ids.entry(s).or_insert(next));
    }
    (order, ids.len())
}

fn refine<K: Ord>(
    graphs: &[&FeaturedGraph],
    l: usize,
    mut signature: impl FnMut(&FeaturedGraph, usize, &[usize]) -> K,
) -> TypeAssignment {
    let sizes: Vec<usize> = graphs.iter().map(|g| g.n()).collect();
    let mut offsets = Vec::with_capacity(graphs.len());
    let mut acc = 0;
    for s in &sizes {
        offsets.push(acc);
        acc += s;
    }
    let init: Vec<Vec<bool>> = graphs.iter().flat_map(|g| g.features().iter().cloned()).collect();
    let (r0, k0) = relabel(init);
    let mut rounds = vec![r0];
    let mut class_counts = vec![k0];
    for _ in 0..l {
        let prev = rounds.last().expect("nonempty");
        let mut sigs = Vec::with_capacity(acc);
        for (gi, g) in graphs.iter().enumerate() {
            let local = &prev[offsets[gi]..offsets[gi] + sizes[gi]];
            for v in 0..g.n() {
                sigs.push((local[v], signature(g, v, local)));
            }
        }
        let (r, k) = relabel(sigs);
        rounds.push(r);
        class_counts.push(k);
    }
    TypeAssignment { offsets, sizes, rounds, class_counts }
}

/// Colour refinement for c-graded bisimulation: a new colour is the old
/// colour plus, per old class, the number of out-neighbours capped at `c`.
pub fn graded_types(graphs: &[&FeaturedGraph], l: usize, c: usize) -> Result<TypeAssignment> {
    check_compatible(graphs)?;
    if c == 0 {
        return Err(Error::InvalidParameter("grading c must be >= 1".into()));
    }
    Ok(refine(graphs, l, |g, v, prev| {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &u in g.out(v) {
            *counts.entry(prev[u]).or_insert(0) += 1;
        }
        counts.into_iter().map(|(k, m)| (k, m.min(c))).collect::<Vec<_>>()
    }))
}

/// Refinement for the two-pebble counting game: buckets range over the
/// whole vertex set of the graph, keyed by old class, edge to, edge from
/// and equality with the pebbled vertex; counts are capped at `c`.
pub fn c2_types(graphs: &[&FeaturedGraph], l: usize, c: usize) -> Result<TypeAssignment> {
    check_compatible(graphs)?;
    if c == 0 {
        return Err(Error::InvalidParameter("grading c must be >= 1".into()));
    }
    Ok(refine(graphs, l, |g, v, prev| {
        let mut counts: BTreeMap<(usize, bool, bool, bool), usize> = BTreeMap::new();
        for (u, &class) in prev.iter().enumerate() {
            let key = (class, g.has_edge(v, u), g.has_edge(u, v), u == v);
            *counts.entry(key).or_insert(0) += 1;
        }
        counts.into_iter().map(|(k, m)| (k, m.min(c))).collect::<Vec<_>>()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlobalMode {
    None,
    Exact,
    Capped(usize),
}

/// Compares round-`L` class sizes of both graphs under the global mode.
pub fn global_counts_agree(types: &TypeAssignment, round: usize, mode: GlobalMode) -> bool {
    let cap = match mode {
        GlobalMode::None => return true,
        GlobalMode::Exact => usize::MAX,
        GlobalMode::Capped(q) => q,
    };
    let k = types.num_classes(round);
    let mut a = vec![0usize; k];
    let mut b = vec![0usize; k];
    for &x in types.classes(round, 0) {
        a[x] += 1;
    }
    for &x in types.classes(round, 1) {
        b[x] += 1;
    }
    a.iter().zip(&b).all(|(x, y)| (*x).min(cap) == (*y).min(cap))
}

pub fn bisimilar(
    g1: &FeaturedGraph,
    v1: usize,
    g2: &FeaturedGraph,
    v2: usize,
    l: usize,
    c: usize,
    mode: GlobalMode,
) -> Result<bool> {
    g1.check_vertex(v1)?;
    g2.check_vertex(v2)?;
    if let GlobalMode::Capped(0) = mode {
        return Err(Error::InvalidParameter("capped global mode needs q' >= 1".into()));
    }
    let types = graded_types(&[g1, g2], l, c)?;
    Ok(types.class(l, 0, v1) == types.class(l, 1, v2) && global_counts_agree(&types, l, mode))
}

/// `G, u ∼ G', u` in Exact mode for every vertex of two graphs over one
/// vertex set.
pub fn exact_certificate(g: &FeaturedGraph, g2: &FeaturedGraph, l: usize, c: usize) -> Result<Vec<bool>> {
    if g.n() != g2.n() {
        return Err(Error::InvalidParameter("certificate needs equal vertex sets".into()));
    }
    let types = graded_types(&[g, g2], l, c)?;
    let global = global_counts_agree(&types, l, GlobalMode::Exact);
    Ok((0..g.n()).map(|u| global && types.class(l, 0, u) == types.class(l, 1, u)).collect())
}

/// `L`-turn two-pebble `c`-counting equivalence.
pub fn c2_equivalent(g1: &FeaturedGraph, v1: usize, g2: &FeaturedGraph, v2: usize, l: usize, c: usize) -> Result<bool> {
    g1.check_vertex(v1)?;
    g2.check_vertex(v2)?;
    let types = c2_types(&[g1, g2], l, c)?;
    Ok(types.class(l, 0, v1) == types.class(l, 1, v2))
}

pub const EF_VERTEX_CAP: usize = 10;
pub const EF_ROUND_CAP: usize = 3;

/// Duplicator wins the `q`-round Ehrenfeucht–Fraïssé game from the
/// position given by the two tuples.
pub fn ef_equivalent(g1: &FeaturedGraph, t1: &[usize], g2: &FeaturedGraph, t2: &[usize], q: usize) -> Result<bool> {
    if g1.n() > EF_VERTEX_CAP || g2.n() > EF_VERTEX_CAP {
        return Err(Error::CapExceeded(format!("EF games limited to n <= {EF_VERTEX_CAP}")));
    }
    if q > EF_ROUND_CAP {
        return Err(Error::CapExceeded(format!("EF games limited to q <= {EF_ROUND_CAP}")));
    }
    if t1.len() != t2.len() {
        return Err(Error::InvalidParameter("tuples must have equal length".into()));
    }
    for &v in t1 {
        g1.check_vertex(v)?;
    }
    for &v in t2 {
        g2.check_vertex(v)?;
    }
    if g1.d() != g2.d() {
        return Err(Error::DimensionMismatch("graphs must share a feature dimension".into()));
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..t1.len() {
        a.push(t1[i]);
        b.push(t2[i]);
        if !extends_partial_iso(g1, &a, g2, &b) {
            return Ok(false);
        }
    }
    let mut memo = HashMap::new();
    Ok(ef_rec(g1, &mut a, g2, &mut b, q, &mut memo))
}

/// Checks the last pebble pair against all earlier ones (and itself).
fn extends_partial_iso(g1: &FeaturedGraph, a: &[usize], g2: &FeaturedGraph, b: &[usize]) -> bool {
    let k = a.len() - 1;
    let (x, y) = (a[k], b[k]);
    if g1.feature(x) != g2.feature(y) {
        return false;
    }
    (0..=k).all(|i| {
        (a[i] == x) == (b[i] == y) && g1.has_edge(a[i], x) == g2.has_edge(b[i], y) && g1.has_edge(x, a[i]) == g2.has_edge(y, b[i])
    })
}

fn ef_rec(
    g1: &FeaturedGraph,
    a: &mut Vec<usize>,
    g2: &FeaturedGraph,
    b: &mut Vec<usize>,
    q: usize,
    memo: &mut HashMap<(Vec<usize>, Vec<usize>), bool>,
) -> bool {
    if q == 0 {
        return true;
    }
    if let Some(&r) = memo.get(&(a.clone(), b.clone())) {
        return r;
    }
    let mut result = true;
    'spoiler: for side in 0..2 {
        let (gs, gd) = if side == 0 { (g1, g2) } else { (g2, g1) };
        for x in 0..gs.n() {
            let mut answered = false;
            for y in 0..gd.n() {
                let (nx, ny) = if side == 0 { (x, y) } else { (y, x) };
                a.push(nx);
                b.push(ny);
                let ok = extends_partial_iso(g1, a, g2, b) && ef_rec(g1, a, g2, b, q - 1, memo);
                a.pop();
                b.pop();
                if ok {
                    answered = true;
                    break;
                }
            }
            if !answered {
                result = false;
                break 'spoiler;
            }
        }
    }
    memo.insert((a.clone(), b.clone()), result);
    result
}

/// Enumeration of each round-`L` class by ascending vertex index with `v`
/// promoted to the front of its class; values start at 1.
pub fn canonical_enumeration(g: &FeaturedGraph, v: usize, l: usize, c: usize) -> Result<Vec<usize>> {
    g.check_vertex(v)?;
    let types = graded_types(&[g], l, c)?;
    Ok(enumeration_from_classes(types.classes(l, 0), v))
}

pub fn enumeration_from_classes(classes: &[usize], v: usize) -> Vec<usize> {
    let k = classes.iter().copied().max().map_or(0, |m| m + 1);
    let mut next = vec![1usize; k];
    let mut out = vec![0usize; classes.len()];
    out[v] = 1;
    next[classes[v]] = 2;
    for u in 0..classes.len() {
        if u != v {
            out[u] = next[classes[u]];
            next[classes[u]] += 1;
        }
    }
    out
}

/// Literal recursive game searches following the back-and-forth clauses
/// with explicit distinct tuples.
pub mod game {
    use super::*;

    fn subsets(items: &[usize], max: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        fn rec(items: &[usize], start: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == max {
                return;
            }
            for i in start..items.len() {
                cur.push(items[i]);
                out.push(cur.clone());
                rec(items, i + 1, max, cur, out);
                cur.pop();
            }
        }
        rec(items, 0, max, &mut Vec::new(), &mut out);
        out
    }

    /// Exists an injective assignment of `challenge` into `pool` with
    /// `ok(challenge_i, answer_i)`.
    fn answer(challenge: &[usize], pool: &[usize], ok: &mut dyn FnMut(usize, usize) -> bool) -> bool {
        let mut used = vec![false; pool.len()];
        fn rec(i: usize, ch: &[usize], pool: &[usize], used: &mut [bool], ok: &mut dyn FnMut(usize, usize) -> bool) -> bool {
            if i == ch.len() {
                return true;
            }
            for j in 0..pool.len() {
                if !used[j] && ok(ch[i], pool[j]) {
                    used[j] = true;
                    if rec(i + 1, ch, pool, used, ok) {
                        return true;
                    }
                    used[j] = false;
                }
            }
            false
        }
        rec(0, challenge, pool, &mut used, ok)
    }

    /// c-graded L-turn bisimilarity, straight from the definition.
    pub fn graded(g1: &FeaturedGraph, v1: usize, g2: &FeaturedGraph, v2: usize, l: usize, c: usize) -> bool {
        let mut memo = HashMap::new();
        graded_rec(g1, v1, g2, v2, l, c, &mut memo)
    }

    fn graded_rec(
        g1: &FeaturedGraph,
        v1: usize,
        g2: &FeaturedGraph,
        v2: usize,
        l: usize,
        c: usize,
        memo: &mut HashMap<(usize, usize, usize), bool>,
    ) -> bool {
        if g1.feature(v1) != g2.feature(v2) {
            return false;
        }
        if l == 0 {
            return true;
        }
        if let Some(&r) = memo.get(&(l, v1, v2)) {
            return r;
        }
        let forth = subsets(g1.out(v1), c).iter().all(|ch| {
            answer(ch, g2.out(v2), &mut |a, b| graded_rec(g1, a, g2, b, l - 1, c, memo))
        });
        let r = forth
            && subsets(g2.out(v2), c).iter().all(|ch| {
                answer(ch, g1.out(v1), &mut |b, a| graded_rec(g1, a, g2, b, l - 1, c, memo))
            });
        memo.insert((l, v1, v2), r);
        r
    }

    /// L-turn two-pebble c-counting back-and-forth over full vertex sets,
    /// matching edge status in both directions and equality with the
    /// pebbled vertex.
    pub fn c2(g1: &FeaturedGraph, v1: usize, g2: &FeaturedGraph, v2: usize, l: usize, c: usize) -> bool {
        let mut memo = HashMap::new();
        c2_rec(g1, v1, g2, v2, l, c, &mut memo)
    }

    fn c2_rec(
        g1: &FeaturedGraph,
        v1: usize,
        g2: &FeaturedGraph,
        v2: usize,
        l: usize,
        c: usize,
        memo: &mut HashMap<(usize, usize, usize), bool>,
    ) -> bool {
        if g1.feature(v1) != g2.feature(v2) {
            return false;
        }
        if l == 0 {
            return true;
        }
        if let Some(&r) = memo.get(&(l, v1, v2)) {
            return r;
        }
        let all1: Vec<usize> = (0..g1.n()).collect();
        let all2: Vec<usize> = (0..g2.n()).collect();
        let compatible = |a: usize, b: usize, memo: &mut HashMap<(usize, usize, usize), bool>| {
            (a == v1) == (b == v2)
                && g1.has_edge(v1, a) == g2.has_edge(v2, b)
                && g1.has_edge(a, v1) == g2.has_edge(b, v2)
                && c2_rec(g1, a, g2, b, l - 1, c, memo)
        };
        let forth = subsets(&all1, c)
            .iter()
            .all(|ch| answer(ch, &all2, &mut |a, b| compatible(a, b, memo)));
        let r = forth
            && subsets(&all2, c)
                .iter()
                .all(|ch| answer(ch, &all1, &mut |b, a| compatible(a, b, memo)));
        memo.insert((l, v1, v2), r);
        r
    }
}
