//! End-to-end verification suites with deterministic reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bisim::{bisimilar, c2_equivalent, game, graded_types, GlobalMode};
use crate::companion::{chi_formula, free_edge_transfer, free_witness, gamma_formula, initial_good_graph, saturate, strip_global_conjuncts};
use crate::compiler::compile;
use crate::error::{Error, Result};
use crate::gadget::{c2_counterexample_family, degadgetise, gadgetise, is_gadget_of_strict_linear_order};
use crate::gml::{evaluate, evaluate_all, random_formula_with};
use crate::gnn::{self, layer_output_at, rat, AcrGnn, Activation, Aggregation, Classifier, Direction, Layer, Matrix};
use crate::graph::{enumerate_digraphs, isomorphic, make_strict_linear_order, random_graph_with, FeaturedGraph, Mode};
use crate::homcount::{count_gadget_p2, count_p2};
use crate::order::{binom2, binom3, characterization_holds, is_strict_linear_order};
use crate::sequences::{gale_ryser_feasible, verify_sequence_lemma};

pub const SUITES: &[&str] = &["lemma32", "appendixA", "order-gnn", "gadget-gnn", "family", "compiler", "charformulas", "companion", "invariance", "refinement"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Tsv,
}

/// Optional overrides; `None` selects the suite default.
#[derive(Debug, Clone, Default)]
pub struct VerifyParams {
    pub seed: u64,
    pub n: Option<usize>,
    pub cases: Option<usize>,
    pub l: Option<usize>,
    pub c: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: u64,
    pub violations: u64,
    /// `(key, value)` summary lines in emission order.
    pub lines: Vec<(String, String)>,
    pub first_counterexample: Option<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport { suite: suite.into(), checks: 0, violations: 0, lines: Vec::new(), first_counterexample: None, elapsed: Duration::ZERO }
    }

    fn line(&mut self, k: impl Into<String>, v: impl ToString) {
        self.lines.push((k.into(), v.to_string()));
    }

    fn tally(&mut self, key: &str, (checks, bad, example): (u64, u64, Option<String>)) {
        self.checks += checks;
        self.violations += bad;
        self.line(format!("{key} checks"), checks);
        self.line(format!("{key} violations"), bad);
        if self.first_counterexample.is_none() {
            self.first_counterexample = example;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Deterministic rendering; runtimes are not included.
    pub fn render(&self, format: ReportFormat) -> String {
        let mut s = String::new();
        match format {
            ReportFormat::Text => {
                let _ = writeln!(s, "suite {}", self.suite);
                for (k, v) in &self.lines {
                    let _ = writeln!(s, "  {k}: {v}");
                }
                let _ = writeln!(s, "  total checks: {}", self.checks);
                let _ = writeln!(s, "  total violations: {}", self.violations);
                if let Some(x) = &self.first_counterexample {
                    let _ = writeln!(s, "  first counterexample:");
                    for l in x.lines() {
                        let _ = writeln!(s, "    {l}");
                    }
                }
                let _ = writeln!(s, "  verdict: {}", if self.passed() { "PASS" } else { "FAIL" });
            }
            ReportFormat::Tsv => {
                for (k, v) in &self.lines {
                    let _ = writeln!(s, "{}\t{k}\t{v}", self.suite);
                }
                let _ = writeln!(s, "{}\tchecks\t{}", self.suite, self.checks);
                let _ = writeln!(s, "{}\tviolations\t{}", self.suite, self.violations);
                let _ = writeln!(s, "{}\tverdict\t{}", self.suite, if self.passed() { "PASS" } else { "FAIL" });
            }
        }
        s
    }
}

fn case_rng(seed: u64, suite: u64, i: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ suite.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    r.set_stream(i);
    r
}

/// Runs `check` on every case in parallel; results are merged in index
/// order so the first counterexample is scheduling-independent.
fn run_cases<F>(count: u64, check: F) -> (u64, u64, Option<String>)
where
    F: Fn(u64) -> std::result::Result<u64, String> + Sync,
{
    let results: Vec<std::result::Result<u64, String>> = (0..count).into_par_iter().map(&check).collect();
    let mut checks = 0;
    let mut bad = 0;
    let mut first = None;
    for r in results {
        match r {
            Ok(k) => checks += k,
            Err(e) => {
                checks += 1;
                bad += 1;
                if first.is_none() {
                    first = Some(e);
                }
            }
        }
    }
    (checks, bad, first)
}

fn fail(what: &str, g: &FeaturedGraph) -> String {
    format!("{what}\n{}", crate::graph::write_graph(g))
}

fn random_digraph(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> FeaturedGraph {
    let n = rng.gen_range(lo..=hi);
    let p = rng.gen_range(0.0..1.0);
    let mut g = random_graph_with(rng, n, 0, p, Mode::Directed, None);
    if rng.gen_bool(0.05) {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        g = make_strict_linear_order(n).expect("n >= 1").permute(&perm).expect("permutation");
    }
    g
}

/// The order characterisation against the structural predicate.
pub fn suite_order_characterisation(p: &VerifyParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("lemma32");
    let n_max = p.n.unwrap_or(4);
    let cases = p.cases.unwrap_or(10_000) as u64;
    let mut total = 0u64;
    for n in 1..=n_max {
        let en = enumerate_digraphs(n, 0)?;
        total += en.total();
        let r = run_cases(en.total(), |k| {
            let g = en.graph_at(k);
            let ok = characterization_holds(&g).map_err(|e| e.to_string())? == is_strict_linear_order(&g).map_err(|e| e.to_string())?;
            if ok {
                Ok(1)
            } else {
                Err(fail("characterisation disagrees with order predicate", &g))
            }
        });
        rep.tally(&format!("exhaustive n={n}"), r);
    }
    rep.line("exhaustive graphs", total);
    let r = run_cases(cases, |i| {
        let mut rng = case_rng(p.seed, 1, i);
        let g = random_digraph(&mut rng, 5, 8);
        let ok = characterization_holds(&g).map_err(|e| e.to_string())? == is_strict_linear_order(&g).map_err(|e| e.to_string())?;
        if ok {
            Ok(1)
        } else {
            Err(fail("characterisation disagrees with order predicate", &g))
        }
    });
    rep.tally("random n=5..8", r);
    Ok(rep)
}

/// Brute-force existence of an n×n 0/1 matrix per (row sums, column sums).
fn matrix_margins(n: usize) -> BTreeMap<(Vec<u64>, Vec<u64>), bool> {
    let mut seen = BTreeMap::new();
    for mask in 0u32..(1 << (n * n)) {
        let bit = |i: usize, j: usize| u64::from(mask >> (i * n + j) & 1);
        let r: Vec<u64> = (0..n).map(|i| (0..n).map(|j| bit(i, j)).sum()).collect();
        let c: Vec<u64> = (0..n).map(|j| (0..n).map(|i| bit(i, j)).sum()).collect();
        seen.insert((r, c), true);
    }
    seen
}

fn all_sequences(n: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|s| (0..=max).map(move |x| [s.clone(), vec![x]].concat())).collect();
    }
    out
}

/// The sequence lemma and Gale–Ryser against brute force.
pub fn suite_sequences(p: &VerifyParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("appendixA");
    for n in 1..=p.n.unwrap_or(6) {
        let r = verify_sequence_lemma(n)?;
        rep.line(format!("n={n} sequences"), r.sequences);
        rep.line(format!("n={n} equality witnesses"), r.equality_witnesses.len());
        rep.tally(
            &format!("sequence lemma n={n}"),
            (r.sequences as u64, u64::from(!r.ok()), if r.ok() { None } else { Some(r.render()) }),
        );
    }
    for n in 1..=3 {
        let truth = matrix_margins(n);
        let seqs = all_sequences(n, 3);
        let mut checks = 0;
        let mut bad = 0;
        let mut first = None;
        for r in &seqs {
            for c in &seqs {
                let rb: Vec<BigUint> = r.iter().map(|&x| BigUint::from(x)).collect();
                let cb: Vec<BigUint> = c.iter().map(|&x| BigUint::from(x)).collect();
                let got = gale_ryser_feasible(&rb, &cb)?;
                let want = truth.contains_key(&(r.clone(), c.clone()));
                checks += 1;
                if got != want {
                    bad += 1;
                    first.get_or_insert_with(|| format!("r={r:?} c={c:?} gale-ryser={got} brute-force={want}"));
                }
            }
        }
        rep.tally(&format!("gale-ryser n={n}"), (checks, bad, first));
    }
    Ok(rep)
}

/// The hand-built order network on the order corpus and its golden trace.
pub fn suite_order_gnn(p: &VerifyParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("order-gnn");
    let net = gnn::build_linear_order_gnn();
    rep.line("simple", gnn::is_simple(&net));
    let check = |g: &FeaturedGraph| -> std::result::Result<u64, String> {
        let want = is_strict_linear_order(g).map_err(|e| e.to_string())?;
        let got = gnn::run_all(&net, g).map_err(|e| e.to_string())?;
        if got.iter().all(|&b| b == want) {
            Ok(1)
        } else {
            Err(fail(&format!("network {got:?}, oracle {want}"), g))
        }
    };
    for n in 1..=p.n.unwrap_or(4) {
        let en = enumerate_digraphs(n, 0)?;
        rep.tally(&format!("exhaustive n={n}"), run_cases(en.total(), |k| check(&en.graph_at(k))));
    }
    let cases = p.cases.unwrap_or(10_000) as u64;
    rep.tally(
        "random n=5..8",
        run_cases(cases, |i| {
            let mut rng = case_rng(p.seed, 3, i);
            check(&random_digraph(&mut rng, 5, 8))
        }),
    );
    let max_order = 200u64;
    rep.tally(
        "golden trace order(1..200)",
        run_cases(max_order, |i| {
            let n = i + 1;
            let g = make_strict_linear_order(n as usize).map_err(|e| e.to_string())?;
            let t = gnn::run_trace(&net, &g).map_err(|e| e.to_string())?;
            let hom = count_p2(&g).map_err(|e| e.to_string())?;
            let want = vec![rat(binom2(n) as i64), rat(binom2(n) as i64), rat(hom as i64), rat(binom3(n) as i64)];
            let accepted = t.final_layer().iter().all(|x| net.classifier().accepts(x));
            if accepted && t.layers[4].iter().all(|x| *x == want) {
                Ok(1)
            } else {
                Err(format!("order({n}): layer-4 trace differs from (|E|, C(n,2), hom, C(n,3)) or rejected"))
            }
        }),
    );
    Ok(rep)
}

/// Mutations of gadget graphs used as negatives.
fn gadget_negative(rng: &mut ChaCha8Rng, i: u64) -> FeaturedGraph {
    let n = rng.gen_range(2..=6);
    let base = if rng.gen_bool(0.5) {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        make_strict_linear_order(n).expect("n >= 1").permute(&perm).expect("permutation")
    } else {
        random_digraph(rng, 2, 6)
    };
    let g = gadgetise(&base).expect("directed, d = 0");
    let m = g.n();
    match i % 5 {
        0 => {
            // a near-order digraph
            let mut e = base.edge_set();
            let u = rng.gen_range(0..base.n());
            let v = rng.gen_range(0..base.n());
            if !e.remove(&(u, v)) {
                e.insert((u, v));
            }
            gadgetise(&base.with_edges(&e).expect("valid edges")).expect("gadget")
        }
        1 => {
            // toggle one undirected pair
            let mut e = g.edge_set();
            let u = rng.gen_range(0..m);
            let v = rng.gen_range(0..m);
            if e.contains(&(u, v)) {
                e.remove(&(u, v));
                e.remove(&(v, u));
            } else {
                e.insert((u, v));
                e.insert((v, u));
            }
            g.with_edges(&e).expect("symmetric")
        }
        2 => {
            // relabel one vertex's features
            let mut f = g.features().to_vec();
            let v = rng.gen_range(0..m);
            f[v] = vec![rng.gen_bool(0.5), rng.gen_bool(0.5)];
            FeaturedGraph::new(Mode::Undirected, m, 2, f, g.edges()).expect("same edges")
        }
        3 => {
            // extra identity-adjacent edge
            let mut e = g.edge_set();
            let a = rng.gen_range(0..base.n());
            let b = rng.gen_range(0..base.n());
            let (x, y) = (crate::gadget::iota_vertex(a), 3 * b + rng.gen_range(0..3));
            e.insert((x, y));
            e.insert((y, x));
            g.with_edges(&e).expect("symmetric")
        }
        _ => {
            let (l, c) = [(1, 1), (1, 2), (2, 1), (2, 2)][rng.gen_range(0..4)];
            c2_counterexample_family(l, c).expect("within cap").h
        }
    }
}

/// Gadget round trip, gadget hom counts and the gadget-order network.
pub fn suite_gadget_gnn(p: &VerifyParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("gadget-gnn");
    rep.tally(
        "round trip and hom counts",
        run_cases(100, |i| {
            let mut rng = case_rng(p.seed, 4, i);
            let g = random_digraph(&mut rng, 1, 6);
            let gg = gadgetise(&g).map_err(|e| e.to_string())?;
            let back = degadgetise(&gg).map_err(|e| e.to_string())?;
            let iso = isomorphic(&back, &g).map_err(|e| e.to_string())?;
            let hom = count_gadget_p2(&gg).map_err(|e| e.to_string())? == count_p2(&g).map_err(|e| e.to_string())?;
            if iso && hom && gg.undirected_edge_count() == g.edge_count() + 2 * g.n() {
                Ok(1)
            } else {
                Err(fail("gadget round trip or hom count mismatch", &g))
            }
        }),
    );
    let net = gnn::build_gadget_order_gnn();
    rep.line("simple", gnn::is_simple(&net));
    rep.line("layers", net.num_layers());
    let max_order = p.n.unwrap_or(50) as u64;
    rep.tally(
        "accepts gadgetised orders",
        run_cases(max_order, |i| {
            let g = gadgetise(&make_strict_linear_order(i as usize + 1).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            if gnn::run_all(&net, &g).map_err(|e| e.to_string())?.into_iter().all(|b| b) {
                Ok(1)
            } else {
                Err(format!("rejects gadgetise(order({}))", i + 1))
            }
        }),
    );
    let negatives = p.cases.unwrap_or(1000) as u64;
    let produced = std::sync::atomic::AtomicU64::new(0);
    rep.tally(
        "rejects structured negatives",
        run_cases(negatives, |i| {
            let mut rng = case_rng(p.seed, 5, i);
            let g = loop {
                let g = gadget_negative(&mut rng, i);
                if !is_gadget_of_strict_linear_order(&g) {
                    break g;
                }
            };
            produced.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            if gnn::run_all(&net, &g).map_err(|e| e.to_string())?.into_iter().any(|b| b) {
                Err(fail("accepts a negative", &g))
            } else {
                Ok(1)
            }
        }),
    );
    rep.line("negatives", produced.into_inner());
    Ok(rep)
}

/// The counting counterexample family.
pub fn suite_family(p: &VerifyParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("family");
    let configs: Vec<(usize, usize)> = match (p.l, p.c) {
        (Some(l), Some(c)) => vec![(l, c)],
        _ => vec![(1, 1), (1, 2), (2, 1), (2, 2)],
    };
    for (l, c) in configs {
        let r = c2_counterexample_family(l, c)?;
        let ok = r.all_green();
        rep.line(format!("L={l} c={c} vertices"), r.g.n());
        rep.line(format!("L={l} c={c} separated"), r.inequivalent.len());
        rep.tally(&format!("L={l} c={c}"), (1, u64::from(!ok), if ok { None } else { Some(r.render()) }));
    }
    Ok(rep)
}

/// Compiled networks against the evaluator, plus c-boundedness spot checks.
pub fn suite_compiler(p: &VerifyParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("compiler");
    let cases = p.cases.unwrap_or(1000) as u64;
    let sample = |i: u64| {
        let mut rng = case_rng(p.seed, 6, i);
        let d = rng.gen_range(0..=2);
        let f = random_formula_with(&mut rng, 3, d, 3, true);
        let n = rng.gen_range(1..=8);
        let mode = if rng.gen_bool(0.5) { Mode::Directed } else { Mode::Undirected };
        let prob = rng.gen_range(0.1..0.7);
        let g = random_graph_with(&mut rng, n, d, prob, mode, None);
        (f, g, d)
    };
    rep.tally(
        "formula-graph pairs",
        run_cases(cases, |i| {
            let (f, g, d) = sample(i);
            let net = compile(&f, d).map_err(|e| e.to_string())?;
            let got = gnn::run_all(&net, &g).map_err(|e| e.to_string())?;
            let want = evaluate_all(&f, &g).map_err(|e| e.to_string())?;
            if got == want {
                Ok(1)
            } else {
                Err(fail(&format!("formula {f}: network {got:?}, evaluator {want:?}"), &g))
            }
        }),
    );
    rep.tally(
        "c-bounded trace spot checks",
        run_cases(100, |i| {
            let (f, g, d) = sample(cases + i);
            let net = compile(&f, d).map_err(|e| e.to_string())?;
            let t = gnn::run_trace(&net, &g).map_err(|e| e.to_string())?;
            for (li, layer) in net.layers().iter().enumerate() {
                let Aggregation::BoundedSum(k) = layer.agg else {
                    return Err("compiled aggregation is not bounded".into());
                };
                let x = &t.layers[li];
                for v in 0..g.n() {
                    let mut kept: Vec<usize> = Vec::new();
                    for &u in g.out(v) {
                        if kept.iter().filter(|&&w| x[w] == x[u]).count() < k {
                            kept.push(u);
                        }
                    }
                    if layer_output_at(layer, x, v, &kept) != t.layers[li + 1][v] {
                        return Err(fail(&format!("formula {f}: layer {} changes under {k}-restriction", li + 1), &g));
                    }
                }
            }
            Ok(1)
        }),
    );
    Ok(rep)
}

fn pointed_pair(rng: &mut ChaCha8Rng, n_max: usize) -> (FeaturedGraph, usize, FeaturedGraph, usize, usize, usize, usize) {
    let d = rng.gen_range(0..=1);
    let l = rng.gen_range(0..=3);
    let c = rng.gen_range(1..=2);
    let q = rng.gen_range(1..=3);
    let n1 = rng.gen_range(1..=n_max);
    let p = rng.gen_range(0.1..0.5);
    let g1 = random_graph_with(rng, n1, d, p, Mode::Directed, None);
    let g2 = match rng.gen_range(0..4) {
        0 => {
            let mut perm: Vec<usize> = (0..n1).collect();
            perm.shuffle(rng);
            g1.permute(&perm).expect("permutation")
        }
        1 => saturate(&g1, 0, l, c).expect("directed").graph,
        _ => {
            let n2 = rng.gen_range(1..=n_max);
            random_graph_with(rng, n2, d, p, Mode::Directed, None)
        }
    };
    let v1 = rng.gen_range(0..g1.n());
    let v2 = rng.gen_range(0..g2.n());
    (g1, v1, g2, v2, l, c, q)
}

/// Characteristic formulas against the refinement checker.
pub fn suite_charformulas(p: &VerifyParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("charformulas");
    let cases = p.cases.unwrap_or(500) as u64;
    let positives = std::sync::atomic::AtomicU64::new(0);
    rep.tally(
        "pointed pairs",
        run_cases(cases, |i| {
            let mut rng = case_rng(p.seed, 7, i);
            let (g1, v1, g2, v2, l, c, q) = pointed_pair(&mut rng, 7);
            let e = |x: Error| x.to_string();
            let chi = chi_formula(&g1, v1, l, c).map_err(e)?;
            let gamma = gamma_formula(&g1, v1, l, c, q).map_err(e)?;
            let chi_sat = evaluate(&chi, &g2, v2).map_err(e)?;
            let gamma_sat = evaluate(&gamma, &g2, v2).map_err(e)?;
            let graded = bisimilar(&g1, v1, &g2, v2, l, c, GlobalMode::None).map_err(e)?;
            let capped = bisimilar(&g1, v1, &g2, v2, l, c, GlobalMode::Capped(q)).map_err(e)?;
            if capped {
                positives.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            }
            let stripped = strip_global_conjuncts(&gamma) == chi;
            if chi_sat == graded && gamma_sat == capped && stripped {
                Ok(1)
            } else {
                Err(format!(
                    "L={l} c={c} q={q} v1={v1} v2={v2}: chi {chi_sat} vs graded {graded}, gamma {gamma_sat} vs capped {capped}\n{}\n{}",
                    crate::graph::write_graph(&g1),
                    crate::graph::write_graph(&g2)
                ))
            }
        }),
    );
    rep.line("capped-bisimilar pairs", positives.into_inner());
    Ok(rep)
}

/// Surgery certificates, structural conditions and idempotence.
pub fn suite_companion(p: &VerifyParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("companion");
    let cases = p.cases.unwrap_or(100) as u64;
    let applied = std::sync::atomic::AtomicU64::new(0);
    rep.tally(
        "random graphs",
        run_cases(cases, |i| {
            let mut rng = case_rng(p.seed, 8, i);
            let n = rng.gen_range(1..=10);
            let d = rng.gen_range(0..=1);
            let prob = rng.gen_range(0.1..0.5);
            let g = random_graph_with(&mut rng, n, d, prob, Mode::Directed, None);
            let l = p.l.unwrap_or_else(|| rng.gen_range(0..=2));
            let c = p.c.unwrap_or_else(|| rng.gen_range(1..=2));
            let v = rng.gen_range(0..n);
            let e = |x: Error| x.to_string();
            let mut checks = 0;
            let sat = saturate(&g, v, l, c).map_err(e)?;
            let good = initial_good_graph(&g, v, l, c).map_err(e)?;
            for (name, s) in [("saturate", &sat), ("initial good graph", &good)] {
                checks += 1;
                if !s.report.valid() {
                    return Err(fail(&format!("{name} L={l} c={c} v={v}\n{}", s.report.render()), &g));
                }
            }
            checks += 1;
            if saturate(&sat.graph, v, l, c).map_err(e)?.graph != sat.graph {
                return Err(fail("saturate is not idempotent", &g));
            }
            let below = if l == 0 { vec![0; n] } else { graded_types(&[&g], l - 1, c).map_err(e)?.classes(l - 1, 0).to_vec() };
            let mut transfers = Vec::new();
            let mut witnesses = Vec::new();
            for x in 0..n {
                for w2 in (0..n).filter(|&w2| !g.has_edge(x, w2)) {
                    let same: Vec<usize> = g.out(x).iter().copied().filter(|&w| below[w] == below[w2]).collect();
                    for &w in &same {
                        transfers.push((x, w, w2));
                    }
                    if same.len() >= c {
                        witnesses.push((x, same[..c].to_vec(), w2));
                    }
                }
            }
            if let Some(&(x, w, w2)) = transfers.choose(&mut rng) {
                let s = free_edge_transfer(&g, x, w, w2, l, c).map_err(e)?;
                checks += 1;
                applied.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if !s.report.valid() {
                    return Err(fail(&format!("edge transfer ({x},{w})->({x},{w2}) L={l} c={c}"), &g));
                }
            }
            if let Some((x, ws, w2)) = witnesses.choose(&mut rng) {
                let s = free_witness(&g, *x, ws, *w2, l, c).map_err(e)?;
                checks += 1;
                applied.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if !s.report.valid() {
                    return Err(fail(&format!("free witness {x} {ws:?} -> {w2} L={l} c={c}"), &g));
                }
            }
            Ok(checks)
        }),
    );
    rep.line("free-edge and free-witness applications", applied.into_inner());
    Ok(rep)
}

/// Random layer with small integer weights and `BoundedSum(c)` aggregation.
fn random_layer(rng: &mut ChaCha8Rng, din: usize, dout: usize, c: usize) -> Layer {
    let mut m = || {
        let mut x = Matrix::zeros(din, dout);
        for i in 0..din {
            for j in 0..dout {
                x.set(i, j, rat(rng.gen_range(-2..=2)));
            }
        }
        x
    };
    let (a, cm, r) = (m(), m(), m());
    let bias = (0..dout).map(|_| rat(rng.gen_range(-1..=1))).collect();
    Layer { a, c: cm, r, bias, activation: Activation::ReLU, agg: Aggregation::BoundedSum(c), read: Aggregation::SumAll }
}

pub fn random_bounded_net(rng: &mut ChaCha8Rng, d: usize, l: usize, c: usize) -> AcrGnn {
    let mut dims = vec![d];
    for _ in 0..l.max(1) {
        dims.push(rng.gen_range(1..=3));
    }
    let layers = dims.windows(2).map(|w| random_layer(rng, w[0], w[1], c)).collect();
    let weights = (0..*dims.last().expect("nonempty")).map(|_| rat(rng.gen_range(-2..=2))).collect();
    AcrGnn::new(d, layers, Classifier { weights, threshold: rat(0), direction: Direction::Ge }).expect("consistent dims")
}

/// Identical embeddings at certified bisimilar points.
pub fn suite_invariance(p: &VerifyParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("invariance");
    let cases = p.cases.unwrap_or(200) as u64;
    let nets = 20;
    let changed = std::sync::atomic::AtomicU64::new(0);
    rep.tally(
        "certified pairs",
        run_cases(cases, |i| {
            let mut rng = case_rng(p.seed, 9, i);
            let n = rng.gen_range(1..=10);
            let d = rng.gen_range(0..=1);
            let prob = rng.gen_range(0.1..0.5);
            let g = random_graph_with(&mut rng, n, d, prob, Mode::Directed, None);
            let l = p.l.unwrap_or_else(|| rng.gen_range(1..=3));
            let c = p.c.unwrap_or_else(|| rng.gen_range(1..=2));
            let v = rng.gen_range(0..n);
            let s = saturate(&g, v, l, c).map_err(|e| e.to_string())?;
            if !s.report.valid() {
                return Err(fail("saturate produced an uncertified companion", &g));
            }
            if s.graph != g {
                changed.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            }
            for k in 0..nets {
                let net = random_bounded_net(&mut rng, d, l, c);
                let a = gnn::run_embeddings(&net, &g).map_err(|e| e.to_string())?;
                let b = gnn::run_embeddings(&net, &s.graph).map_err(|e| e.to_string())?;
                if a != b {
                    return Err(fail(&format!("net {k} separates G from its companion (L={l} c={c})"), &g));
                }
            }
            Ok(nets)
        }),
    );
    rep.line("companions differing from input", changed.into_inner());
    Ok(rep)
}

/// Refinement results against literal game searches.
pub fn suite_refinement(p: &VerifyParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("refinement");
    let cases = p.cases.unwrap_or(200) as u64;
    let graph = |i: u64| {
        let mut rng = case_rng(p.seed, 10, i);
        let n = rng.gen_range(1..=6);
        let d = rng.gen_range(0..=1);
        let mode = if i.is_multiple_of(2) { Mode::Directed } else { Mode::Undirected };
        let prob = rng.gen_range(0.1..0.6);
        random_graph_with(&mut rng, n, d, prob, mode, None)
    };
    let compare = |g1: &FeaturedGraph, g2: &FeaturedGraph| -> std::result::Result<u64, String> {
        let mut checks = 0;
        if g1.d() != g2.d() || g1.mode() != g2.mode() {
            return Ok(0);
        }
        for l in 0..=2 {
            for c in 1..=2 {
                let types = graded_types(&[g1, g2], l, c).map_err(|e| e.to_string())?;
                for v1 in 0..g1.n() {
                    for v2 in 0..g2.n() {
                        let a = types.class(l, 0, v1) == types.class(l, 1, v2);
                        let b = c2_equivalent(g1, v1, g2, v2, l, c).map_err(|e| e.to_string())?;
                        checks += 2;
                        if a != game::graded(g1, v1, g2, v2, l, c) || b != game::c2(g1, v1, g2, v2, l, c) {
                            return Err(format!(
                                "L={l} c={c} v1={v1} v2={v2}\n{}\n{}",
                                crate::graph::write_graph(g1),
                                crate::graph::write_graph(g2)
                            ));
                        }
                    }
                }
            }
        }
        Ok(checks)
    };
    rep.tally("within-graph pairs", run_cases(cases, |i| compare(&graph(i), &graph(i))));
    rep.tally("cross-graph pairs", run_cases(cases / 2, |i| compare(&graph(2 * i), &graph(2 * i + 2))));
    Ok(rep)
}

/// Runs a named suite (or `all`), timing each.
pub fn run_suite(name: &str, params: &VerifyParams) -> Result<Vec<SuiteReport>> {
    let names: Vec<&str> = if name == "all" { SUITES.to_vec() } else { vec![name] };
    let mut out = Vec::new();
    for n in names {
        let start = Instant::now();
        let mut r = match n {
            "lemma32" => suite_order_characterisation(params)?,
            "appendixA" => suite_sequences(params)?,
            "order-gnn" => suite_order_gnn(params)?,
            "gadget-gnn" => suite_gadget_gnn(params)?,
            "family" => suite_family(params)?,
            "compiler" => suite_compiler(params)?,
            "charformulas" => suite_charformulas(params)?,
            "companion" => suite_companion(params)?,
            "invariance" => suite_invariance(params)?,
            "refinement" => suite_refinement(params)?,
            other => return Err(Error::InvalidParameter(format!("unknown suite `{other}`; expected one of {} or all", SUITES.join(", ")))),
        };
        r.elapsed = start.elapsed();
        out.push(r);
    }
    Ok(out)
}
