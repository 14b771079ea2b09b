//! Companion-graph surgery with bisimilarity certificates, and
//! characteristic formulas.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::bisim::{enumeration_from_classes, exact_certificate, global_counts_agree, graded_types, GlobalMode, TypeAssignment};
use crate::error::{Error, Result};
use crate::gml::{evaluate, print, Formula};
use crate::graph::{FeaturedGraph, Mode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurgeryReport {
    pub operations: Vec<String>,
    /// `G, u ∼^{L,c,*}_∃ G', u` per vertex `u`.
    pub certificate: Vec<bool>,
    pub conditions: Vec<(String, bool)>,
}

impl SurgeryReport {
    pub fn valid(&self) -> bool {
        self.certificate.iter().all(|&b| b) && self.conditions.iter().all(|(_, b)| *b)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for op in &self.operations {
            let _ = writeln!(s, "op {op}");
        }
        let bits: String = self.certificate.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let _ = writeln!(s, "certificate {bits}");
        for (name, ok) in &self.conditions {
            let _ = writeln!(s, "condition {name}: {}", if *ok { "ok" } else { "FAILED" });
        }
        let _ = writeln!(s, "valid {}", if self.valid() { "yes" } else { "no" });
        s
    }
}

#[derive(Debug, Clone)]
pub struct Surgery {
    pub graph: FeaturedGraph,
    pub report: SurgeryReport,
}

fn require_directed(g: &FeaturedGraph) -> Result<()> {
    if g.mode() != Mode::Directed {
        return Err(Error::ModeMismatch("companion surgery needs a directed graph".into()));
    }
    Ok(())
}

fn require_c(c: usize) -> Result<()> {
    if c == 0 {
        return Err(Error::InvalidParameter("c must be at least 1".into()));
    }
    Ok(())
}

/// Round-`L` classes and the canonical enumeration of one pointed graph.
struct Context {
    class: Vec<usize>,
    enumeration: Vec<usize>,
    members: BTreeMap<usize, Vec<usize>>,
}

impl Context {
    fn new(g: &FeaturedGraph, v: usize, l: usize, c: usize) -> Result<Self> {
        g.check_vertex(v)?;
        let types = graded_types(&[g], l, c)?;
        let class = types.classes(l, 0).to_vec();
        let enumeration = enumeration_from_classes(&class, v);
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (u, &k) in class.iter().enumerate() {
            members.entry(k).or_default().push(u);
        }
        for list in members.values_mut() {
            list.sort_by_key(|&u| enumeration[u]);
        }
        Ok(Context { class, enumeration, members })
    }

    fn representatives(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.class.len()).filter(|&u| self.enumeration[u] == 1)
    }

    /// Out-neighbour counts of `u` per class.
    fn counts(&self, g: &FeaturedGraph, u: usize) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &w in g.out(u) {
            *m.entry(self.class[w]).or_insert(0) += 1;
        }
        m
    }

    /// Canonical target set: the whole class if `m ≥ c`, else the `m`
    /// lowest-enumerated members.
    fn targets(&self, class: usize, m: usize, c: usize) -> &[usize] {
        let list = &self.members[&class];
        if m >= c {
            list
        } else {
            &list[..m]
        }
    }
}

fn replace_out_edges(edges: &mut BTreeSet<(usize, usize)>, u: usize, targets: impl IntoIterator<Item = usize>) {
    edges.retain(|&(a, _)| a != u);
    edges.extend(targets.into_iter().map(|w| (u, w)));
}

fn cond_prefix(g: &FeaturedGraph, ctx: &Context, vertices: &[usize]) -> bool {
    vertices.iter().all(|&u| {
        g.out(u).iter().all(|&w| {
            ctx.members[&ctx.class[w]].iter().filter(|&&x| ctx.enumeration[x] < ctx.enumeration[w]).all(|&x| g.has_edge(u, x))
        })
    })
}

fn cond_complete(g: &FeaturedGraph, ctx: &Context, vertices: &[usize], c: usize) -> bool {
    vertices.iter().all(|&u| {
        g.out(u)
            .iter()
            .filter(|&&w| ctx.enumeration[w] >= c)
            .all(|&w| ctx.members[&ctx.class[w]].iter().all(|&x| g.has_edge(u, x)))
    })
}

fn cond_uniform(g: &FeaturedGraph, ctx: &Context) -> bool {
    ctx.members.values().all(|list| list.windows(2).all(|p| g.out(p[0]) == g.out(p[1])))
}

fn certified(g: &FeaturedGraph, out: FeaturedGraph, l: usize, c: usize, operations: Vec<String>, conditions: Vec<(String, bool)>) -> Result<Surgery> {
    let certificate = exact_certificate(g, &out, l, c)?;
    Ok(Surgery { graph: out, report: SurgeryReport { operations, certificate, conditions } })
}

fn same_class_below(g: &FeaturedGraph, a: usize, b: usize, l: usize, c: usize) -> Result<bool> {
    if l == 0 {
        return Ok(true);
    }
    let types = graded_types(&[g], l - 1, c)?;
    Ok(types.class(l - 1, 0, a) == types.class(l - 1, 0, b))
}

/// Replaces the edge `(v,w)` by `(v,w')` for `w ∼^{L−1,c} w'`.
pub fn free_edge_transfer(g: &FeaturedGraph, v: usize, w: usize, w2: usize, l: usize, c: usize) -> Result<Surgery> {
    require_directed(g)?;
    require_c(c)?;
    for x in [v, w, w2] {
        g.check_vertex(x)?;
    }
    if !g.has_edge(v, w) {
        return Err(Error::Precondition(format!("({v},{w}) is not an edge")));
    }
    if g.has_edge(v, w2) {
        return Err(Error::Precondition(format!("({v},{w2}) is already an edge")));
    }
    if !same_class_below(g, w, w2, l, c)? {
        return Err(Error::Precondition(format!("{w} and {w2} are not (L-1,c)-bisimilar")));
    }
    let mut e = g.edge_set();
    e.remove(&(v, w));
    e.insert((v, w2));
    let out = g.with_edges(&e)?;
    certified(g, out, l, c, vec![format!("transfer ({v},{w}) -> ({v},{w2})")], Vec::new())
}

/// Adds `(v,w')` when `v` already has `c` distinct out-neighbours
/// `(L−1,c)`-bisimilar to `w'`.
pub fn free_witness(g: &FeaturedGraph, v: usize, witnesses: &[usize], w2: usize, l: usize, c: usize) -> Result<Surgery> {
    require_directed(g)?;
    require_c(c)?;
    g.check_vertex(v)?;
    g.check_vertex(w2)?;
    let mut problems = Vec::new();
    if witnesses.len() != c {
        problems.push(format!("expected {c} witnesses, got {}", witnesses.len()));
    }
    if witnesses.iter().collect::<BTreeSet<_>>().len() != witnesses.len() {
        problems.push("witnesses are not pairwise distinct".to_string());
    }
    for &x in witnesses {
        g.check_vertex(x)?;
        if !g.has_edge(v, x) {
            problems.push(format!("({v},{x}) is not an edge"));
        }
        if !same_class_below(g, x, w2, l, c)? {
            problems.push(format!("{x} and {w2} are not (L-1,c)-bisimilar"));
        }
    }
    if g.has_edge(v, w2) {
        problems.push(format!("({v},{w2}) is already an edge"));
    }
    if !problems.is_empty() {
        return Err(Error::Precondition(problems.join("; ")));
    }
    let mut e = g.edge_set();
    e.insert((v, w2));
    let out = g.with_edges(&e)?;
    certified(g, out, l, c, vec![format!("witness ({v},{w2})")], Vec::new())
}

fn good_graph_edges(g: &FeaturedGraph, ctx: &Context, c: usize, ops: &mut Vec<String>) -> BTreeSet<(usize, usize)> {
    let mut e = g.edge_set();
    for u in ctx.representatives() {
        let mut targets: Vec<usize> = ctx.counts(g, u).into_iter().flat_map(|(k, m)| ctx.targets(k, m, c).to_vec()).collect();
        targets.sort_unstable();
        if targets.as_slice() != g.out(u) {
            ops.push(format!("rewire {u} -> {targets:?}"));
        }
        replace_out_edges(&mut e, u, targets);
    }
    e
}

/// Rewires the out-edges of every class representative (`n(u) = 1`) onto
/// canonical witnesses.
pub fn initial_good_graph(g: &FeaturedGraph, v: usize, l: usize, c: usize) -> Result<Surgery> {
    require_directed(g)?;
    require_c(c)?;
    let ctx = Context::new(g, v, l, c)?;
    let mut ops = Vec::new();
    let out = g.with_edges(&good_graph_edges(g, &ctx, c, &mut ops))?;
    let reps: Vec<usize> = ctx.representatives().collect();
    let conditions = vec![
        ("2 lowest witnesses at representatives".to_string(), cond_prefix(&out, &ctx, &reps)),
        ("3 complete classes at representatives".to_string(), cond_complete(&out, &ctx, &reps, c)),
    ];
    certified(g, out, l, c, ops, conditions)
}

fn saturate_edges(g: &FeaturedGraph, ctx: &Context, c: usize, ops: &mut Vec<String>) -> BTreeSet<(usize, usize)> {
    let star = good_graph_edges(g, ctx, c, ops);
    let mut e = star.clone();
    for list in ctx.members.values() {
        let rep = list[0];
        let rep_out: Vec<usize> = star.range((rep, 0)..(rep + 1, 0)).map(|&(_, w)| w).collect();
        for &u in &list[1..] {
            let before: Vec<usize> = star.range((u, 0)..(u + 1, 0)).map(|&(_, w)| w).collect();
            if before != rep_out {
                ops.push(format!("copy {rep} -> {u}"));
            }
            replace_out_edges(&mut e, u, rep_out.iter().copied());
        }
    }
    e
}

fn saturation_conditions(out: &FeaturedGraph, ctx: &Context, c: usize) -> Vec<(String, bool)> {
    let all: Vec<usize> = (0..out.n()).collect();
    vec![
        ("2 uniform classes".to_string(), cond_uniform(out, ctx)),
        ("3 lowest witnesses".to_string(), cond_prefix(out, ctx, &all)),
        ("4 complete classes".to_string(), cond_complete(out, ctx, &all, c)),
    ]
}

/// Builds `Ĝ`: the good graph with every class member copying its
/// representative's out-edges.
pub fn saturate(g: &FeaturedGraph, v: usize, l: usize, c: usize) -> Result<Surgery> {
    require_directed(g)?;
    require_c(c)?;
    let ctx = Context::new(g, v, l, c)?;
    let mut ops = Vec::new();
    let out = g.with_edges(&saturate_edges(g, &ctx, c, &mut ops))?;
    let conditions = saturation_conditions(&out, &ctx, c);
    certified(g, out, l, c, ops, conditions)
}

/// Builds `Ĝ₂` from `Ĝ₁ = saturate(G₁, v₁)` so that matching classes get
/// matching out-edge counts, then saturates.
#[allow(clippy::too_many_arguments)]
pub fn homogenise(
    g1: &FeaturedGraph,
    v1: usize,
    gh1: &FeaturedGraph,
    g2: &FeaturedGraph,
    v2: usize,
    l: usize,
    c: usize,
    q: usize,
) -> Result<Surgery> {
    require_directed(g1)?;
    require_directed(g2)?;
    require_c(c)?;
    if q < c {
        return Err(Error::Precondition(format!("q' = {q} is below c = {c}")));
    }
    if !crate::bisim::bisimilar(g1, v1, g2, v2, l, c, GlobalMode::Capped(q))? {
        return Err(Error::Precondition("the pointed graphs are not (L,c,q')-bisimilar".into()));
    }
    if saturate(g1, v1, l, c)?.graph != *gh1 {
        return Err(Error::Precondition("the first companion is not the saturation of G1".into()));
    }
    let joint = graded_types(&[gh1, g2], l, c)?;
    let ctx2 = Context::new(g2, v2, l, c)?;
    let class1 = joint.classes(l, 0);
    let class2 = joint.classes(l, 1);
    let mut members2: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (u, &k) in class2.iter().enumerate() {
        members2.entry(k).or_default().push(u);
    }
    for list in members2.values_mut() {
        list.sort_by_key(|&u| ctx2.enumeration[u]);
    }
    let partner = |u2: usize| (0..gh1.n()).find(|&u1| class1[u1] == class2[u2]);
    let mut ops = Vec::new();
    let mut e = g2.edge_set();
    for u2 in ctx2.representatives() {
        let u1 = partner(u2).ok_or_else(|| Error::Internal(format!("no partner class for vertex {u2}")))?;
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &w in gh1.out(u1) {
            *counts.entry(class1[w]).or_insert(0) += 1;
        }
        let mut targets = Vec::new();
        for (k, m) in counts {
            let list = members2.get(&k).map(Vec::as_slice).unwrap_or(&[]);
            if m >= c {
                targets.extend_from_slice(list);
            } else {
                targets.extend_from_slice(&list[..m.min(list.len())]);
            }
        }
        targets.sort_unstable();
        if targets.as_slice() != g2.out(u2) {
            ops.push(format!("match {u2} to {u1} -> {targets:?}"));
        }
        replace_out_edges(&mut e, u2, targets);
    }
    let mid = g2.with_edges(&e)?;
    let ctx_mid = Context::new(&mid, v2, l, c)?;
    let sat = saturate_edges(&mid, &ctx_mid, c, &mut ops);
    let out = g2.with_edges(&sat)?;
    let mut conditions = saturation_conditions(&out, &ctx2, c);
    let same_partition = partition_of(&ctx_mid.class) == partition_of(&ctx2.class);
    conditions.push(("partition preserved".to_string(), same_partition));
    let final_joint = graded_types(&[gh1, &out], l, c)?;
    let (f1, f2) = (final_joint.classes(l, 0), final_joint.classes(l, 1));
    let mut exact_small = true;
    let mut complete_large = true;
    for u2 in 0..out.n() {
        for u1 in (0..gh1.n()).filter(|&u1| f1[u1] == f2[u2]) {
            let mut c1: BTreeMap<usize, usize> = BTreeMap::new();
            for &w in gh1.out(u1) {
                *c1.entry(f1[w]).or_insert(0) += 1;
            }
            let mut c2: BTreeMap<usize, usize> = BTreeMap::new();
            for &w in out.out(u2) {
                *c2.entry(f2[w]).or_insert(0) += 1;
            }
            for (k, m) in c1 {
                let got = c2.get(&k).copied().unwrap_or(0);
                if m < c {
                    exact_small &= got == m;
                } else {
                    complete_large &= got == f2.iter().filter(|&&x| x == k).count();
                }
            }
        }
    }
    conditions.push(("3 small classes matched exactly".to_string(), exact_small));
    conditions.push(("4 large classes complete".to_string(), complete_large));
    conditions.push(("2 capped bisimilarity preserved".to_string(), capped_pairs_preserved(g1, g2, gh1, &out, l, c, q)?));
    certified(g2, out, l, c, ops, conditions)
}

fn partition_of(classes: &[usize]) -> Vec<usize> {
    let mut relabel = BTreeMap::new();
    classes
        .iter()
        .map(|k| {
            let next = relabel.len();
            *relabel.entry(*k).or_insert(next)
        })
        .collect()
}

fn capped_pairs_preserved(
    g1: &FeaturedGraph,
    g2: &FeaturedGraph,
    h1: &FeaturedGraph,
    h2: &FeaturedGraph,
    l: usize,
    c: usize,
    q: usize,
) -> Result<bool> {
    let check = |t: &TypeAssignment, u1: usize, u2: usize| t.class(l, 0, u1) == t.class(l, 1, u2) && global_counts_agree(t, l, GlobalMode::Capped(q));
    let before = graded_types(&[g1, g2], l, c)?;
    let after = graded_types(&[h1, h2], l, c)?;
    Ok((0..g1.n()).all(|u1| (0..g2.n()).all(|u2| check(&before, u1, u2) == check(&after, u1, u2))))
}

/// Characteristic formulas per round and class of a single graph.
struct ChiTable {
    types: TypeAssignment,
    chi: Vec<Vec<Formula>>,
    text: Vec<Vec<String>>,
}

impl ChiTable {
    fn new(g: &FeaturedGraph, l: usize, c: usize) -> Result<Self> {
        require_c(c)?;
        let types = graded_types(&[g], l, c)?;
        let reps = |round: usize| {
            let cls = types.classes(round, 0);
            let mut r = vec![usize::MAX; types.num_classes(round)];
            for (v, &k) in cls.iter().enumerate().rev() {
                r[k] = v;
            }
            r
        };
        let mut chi: Vec<Vec<Formula>> = Vec::new();
        let mut text: Vec<Vec<String>> = Vec::new();
        let zero: Vec<Formula> = reps(0)
            .into_iter()
            .map(|v| {
                Formula::conjunction(
                    g.feature(v).iter().enumerate().map(|(i, &b)| if b { Formula::prop(i + 1) } else { Formula::not(Formula::prop(i + 1)) }),
                )
            })
            .collect();
        text.push(zero.iter().map(print).collect());
        chi.push(zero);
        for round in 0..l {
            let prev = types.classes(round, 0);
            let mut layer = Vec::new();
            for v in reps(round + 1) {
                let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
                for &u in g.out(v) {
                    *counts.entry(prev[u]).or_insert(0) += 1;
                }
                let mut realised: Vec<(usize, usize)> = counts.into_iter().collect();
                realised.sort_by(|a, b| text[round][a.0].cmp(&text[round][b.0]));
                let mut parts = vec![chi[round][prev[v]].clone()];
                for &(k, m) in &realised {
                    let body = &chi[round][k];
                    for n in 1..=m.min(c) {
                        parts.push(Formula::diamond(n, body.clone()));
                    }
                    if m < c {
                        parts.push(Formula::not(Formula::diamond(m + 1, body.clone())));
                    }
                }
                let any = Formula::disjunction(realised.iter().map(|&(k, _)| chi[round][k].clone()));
                parts.push(Formula::not(Formula::diamond(1, Formula::not(any))));
                layer.push(Formula::conjunction(parts));
            }
            debug_assert_eq!(layer.len(), types.num_classes(round + 1));
            text.push(layer.iter().map(print).collect());
            chi.push(layer);
        }
        Ok(ChiTable { types, chi, text })
    }
}

/// GML-characteristic `(L,c)`-formula of `G, v`.
pub fn chi_formula(g: &FeaturedGraph, v: usize, l: usize, c: usize) -> Result<Formula> {
    g.check_vertex(v)?;
    let t = ChiTable::new(g, l, c)?;
    Ok(t.chi[l][t.types.class(l, 0, v)].clone())
}

/// GML∃-characteristic `(L,c,q)`-formula of `G, v`.
pub fn gamma_formula(g: &FeaturedGraph, v: usize, l: usize, c: usize, q: usize) -> Result<Formula> {
    g.check_vertex(v)?;
    if q == 0 {
        return Err(Error::InvalidParameter("q must be at least 1".into()));
    }
    let t = ChiTable::new(g, l, c)?;
    let cls = t.types.classes(l, 0);
    let mut sizes = vec![0usize; t.types.num_classes(l)];
    for &k in cls {
        sizes[k] += 1;
    }
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| t.text[l][a].cmp(&t.text[l][b]));
    let mut parts = vec![t.chi[l][cls[v]].clone()];
    for &k in &order {
        let body = &t.chi[l][k];
        for n in 1..=sizes[k].min(q) {
            parts.push(Formula::global(n, body.clone()));
        }
        if sizes[k] < q {
            parts.push(Formula::not(Formula::global(sizes[k] + 1, body.clone())));
        }
    }
    let any = Formula::disjunction(order.iter().map(|&k| t.chi[l][k].clone()));
    parts.push(Formula::not(Formula::global(1, Formula::not(any))));
    Ok(Formula::conjunction(parts))
}

/// Drops trailing conjuncts that mention `∃`, walking the left spine.
pub fn strip_global_conjuncts(f: &Formula) -> Formula {
    let mut cur = f.clone();
    loop {
        let next = match cur.node() {
            crate::gml::Node::And(a, b) if b.contains_global() => a.clone(),
            _ => return cur,
        };
        cur = next;
    }
}

#[derive(Debug, Clone)]
pub enum PropertyOutcome {
    Formula { formula: Formula, disjuncts: usize },
    /// A negative example satisfies the disjunct of a positive one.
    Inconsistent { positive: usize, negative: usize },
}

/// Disjunction of the deduplicated γ-formulas of the positive examples.
pub fn property_formula(examples: &[(&FeaturedGraph, usize, bool)], l: usize, c: usize, q: usize) -> Result<PropertyOutcome> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut disjuncts: Vec<(usize, Formula)> = Vec::new();
    for (i, (g, v, label)) in examples.iter().enumerate() {
        if *label {
            let gamma = gamma_formula(g, *v, l, c, q)?;
            if let std::collections::btree_map::Entry::Vacant(slot) = seen.entry(print(&gamma)) {
                slot.insert(i);
                disjuncts.push((i, gamma));
            }
        }
    }
    for (j, (g, v, label)) in examples.iter().enumerate() {
        if *label {
            continue;
        }
        for (i, gamma) in &disjuncts {
            if g.d() == examples[*i].0.d() && evaluate(gamma, g, *v)? {
                return Ok(PropertyOutcome::Inconsistent { positive: *i, negative: j });
            }
        }
    }
    let count = disjuncts.len();
    Ok(PropertyOutcome::Formula { formula: Formula::disjunction(disjuncts.into_iter().map(|(_, f)| f)), disjuncts: count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::{bisimilar, ef_equivalent};
    use crate::graph::{isomorphic, make_strict_linear_order, random_graph};

    fn star() -> FeaturedGraph {
        FeaturedGraph::directed(3, [(0, 2)]).unwrap()
    }

    #[test]
    fn transfer_examples() {
        let s = free_edge_transfer(&star(), 0, 2, 1, 1, 1).unwrap();
        assert!(isomorphic(&s.graph, &star()).unwrap());
        assert!(s.report.valid());
        let o = make_strict_linear_order(3).unwrap();
        assert!(matches!(free_edge_transfer(&o, 0, 2, 0, 2, 1), Err(Error::Precondition(_))));
        let w = free_witness(&FeaturedGraph::directed(3, [(0, 1)]).unwrap(), 0, &[1], 2, 1, 1).unwrap();
        assert!(w.report.valid());
        assert!(free_witness(&star(), 0, &[2, 2], 1, 1, 2).is_err());
    }

    #[test]
    fn good_graph_examples() {
        let s = initial_good_graph(&star(), 0, 1, 2).unwrap();
        assert_eq!(s.graph.edge_set(), [(0, 1)].into_iter().collect());
        assert!(s.report.valid(), "{}", s.report.render());
        let again = initial_good_graph(&s.graph, 0, 1, 2).unwrap();
        assert_eq!(again.graph, s.graph);
    }

    #[test]
    fn saturate_random() {
        for seed in 0..30 {
            let g = random_graph(8, 1, 0.3, Mode::Directed, seed, None);
            let s = saturate(&g, 0, 2, 2).unwrap();
            assert!(s.report.valid(), "{}", s.report.render());
            assert_eq!(saturate(&s.graph, 0, 2, 2).unwrap().graph, s.graph);
        }
    }

    #[test]
    fn homogenise_same_graph() {
        let g = random_graph(7, 1, 0.3, Mode::Directed, 4, None);
        let h = saturate(&g, 2, 2, 1).unwrap().graph;
        let out = homogenise(&g, 2, &h, &g, 2, 2, 1, 1).unwrap();
        assert_eq!(out.graph.edge_set(), h.edge_set());
        assert!(out.report.valid(), "{}", out.report.render());
        assert!(matches!(homogenise(&g, 2, &h, &g, 2, 2, 2, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn homogenise_ef_spot_check() {
        let (c, q) = (1, 2);
        let mut checked = 0;
        for seed in 0..200u64 {
            let g1 = random_graph(5, 0, 0.3, Mode::Directed, seed, None);
            let g2 = random_graph(6, 0, 0.3, Mode::Directed, 1000 + seed, None);
            for l in 0..=2 {
                if !bisimilar(&g1, 0, &g2, 0, l, c, GlobalMode::Capped(q + c)).unwrap() {
                    continue;
                }
                let h1 = saturate(&g1, 0, l, c).unwrap().graph;
                let h2 = homogenise(&g1, 0, &h1, &g2, 0, l, c, q + c).unwrap();
                assert!(h2.report.valid(), "{}", h2.report.render());
                assert!(ef_equivalent(&h1, &[0], &h2.graph, &[0], q).unwrap(), "seed {seed} l {l}");
                checked += 1;
            }
        }
        assert!(checked > 20);
    }

    #[test]
    fn homogenise_cap_without_pebble_slack() {
        let g1 = FeaturedGraph::directed(2, []).unwrap();
        let g2 = FeaturedGraph::directed(1, []).unwrap();
        let h1 = saturate(&g1, 0, 0, 1).unwrap().graph;
        let h2 = homogenise(&g1, 0, &h1, &g2, 0, 0, 1, 1).unwrap();
        assert!(h2.report.valid());
        assert!(!ef_equivalent(&h1, &[0], &h2.graph, &[0], 1).unwrap());
        assert!(!bisimilar(&g1, 0, &g2, 0, 0, 1, GlobalMode::Capped(2)).unwrap());
    }

    #[test]
    fn chi_examples() {
        let g = FeaturedGraph::new(Mode::Directed, 1, 2, vec![vec![true, false]], []).unwrap();
        assert_eq!(print(&chi_formula(&g, 0, 0, 1).unwrap()), "(p1 & !p2)");
        for seed in 0..20 {
            let g = random_graph(6, 1, 0.3, Mode::Directed, seed, None);
            let chi = chi_formula(&g, 1, 2, 2).unwrap();
            assert!(evaluate(&chi, &g, 1).unwrap());
            let gamma = gamma_formula(&g, 1, 2, 2, 2).unwrap();
            assert!(evaluate(&gamma, &g, 1).unwrap());
            assert_eq!(strip_global_conjuncts(&gamma), chi);
        }
    }

    #[test]
    fn gamma_counts_above_q() {
        let a = FeaturedGraph::directed(2, []).unwrap();
        let b = FeaturedGraph::directed(3, []).unwrap();
        let (ga, gb) = (gamma_formula(&a, 0, 1, 1, 2).unwrap(), gamma_formula(&b, 0, 1, 1, 2).unwrap());
        assert!(evaluate(&ga, &b, 0).unwrap() && evaluate(&gb, &a, 0).unwrap());
        assert!(!evaluate(&gamma_formula(&a, 0, 1, 1, 3).unwrap(), &b, 0).unwrap());
    }

    #[test]
    fn property_examples() {
        let o = make_strict_linear_order(3).unwrap();
        let loop1 = FeaturedGraph::directed(1, [(0, 0)]).unwrap();
        let cyc2 = FeaturedGraph::directed(2, [(0, 1), (1, 0)]).unwrap();
        match property_formula(&[(&o, 0, true)], 2, 1, 1).unwrap() {
            PropertyOutcome::Formula { formula, disjuncts } => {
                assert_eq!(disjuncts, 1);
                assert!(evaluate(&formula, &o, 0).unwrap());
            }
            other => panic!("{other:?}"),
        }
        match property_formula(&[(&loop1, 0, true), (&cyc2, 1, true)], 2, 1, 1).unwrap() {
            PropertyOutcome::Formula { disjuncts, .. } => assert_eq!(disjuncts, 1),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            property_formula(&[(&loop1, 0, true), (&cyc2, 0, false)], 2, 1, 1).unwrap(),
            PropertyOutcome::Inconsistent { positive: 0, negative: 1 }
        ));
    }
}
