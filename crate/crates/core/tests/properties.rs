use std::collections::HashSet;

use num::{BigInt, BigUint};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gnnlogic::bisim::{bisimilar, c2_equivalent, GlobalMode};
use gnnlogic::companion::{chi_formula, gamma_formula, saturate, strip_global_conjuncts};
use gnnlogic::compiler::compile;
use gnnlogic::gadget::{c2_counterexample_family, degadgetise, gadgetise, is_gadgetisation};
use gnnlogic::gml::{self, build_degree_bound_formula, evaluate, evaluate_all, parse, random_formula, Formula};
use gnnlogic::gnn::{self, layer_output_at, rat, Activation, Aggregation, Layer, Matrix};
use gnnlogic::graph::{c_restrict, enumerate_digraphs, isomorphic, random_graph, read_graph, write_graph, FeaturedGraph, Mode, Multiset};
use gnnlogic::homcount::{count_gadget_p2, count_homomorphisms, count_p2, p2_pattern};
use gnnlogic::order::max_out_degree;
use gnnlogic::sequences::{conjugate, gale_ryser_feasible};
use gnnlogic::verify::random_bounded_net;

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::Directed), Just(Mode::Undirected)]
}

fn graph(max_n: usize, max_d: usize) -> impl Strategy<Value = FeaturedGraph> {
    (1..=max_n, 0..=max_d, 0.0..0.8f64, mode(), any::<u64>()).prop_map(|(n, d, p, m, s)| random_graph(n, d, p, m, s, None))
}

fn digraph(max_n: usize, max_d: usize) -> impl Strategy<Value = FeaturedGraph> {
    (1..=max_n, 0..=max_d, 0.0..0.8f64, any::<u64>()).prop_map(|(n, d, p, s)| random_graph(n, d, p, Mode::Directed, s, None))
}

fn permuted(g: &FeaturedGraph, seed: u64) -> (FeaturedGraph, Vec<usize>) {
    let mut perm: Vec<usize> = (0..g.n()).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    (g.permute(&perm).unwrap(), perm)
}

fn big(v: &[u64]) -> Vec<BigUint> {
    v.iter().map(|&x| BigUint::from(x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn graph_text_round_trip(g in graph(12, 3)) {
        prop_assert_eq!(read_graph(&write_graph(&g)).unwrap(), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn neighbourhoods_partition_edges(g in digraph(10, 1)) {
        let out: usize = (0..g.n()).map(|v| g.out(v).len()).sum();
        let inn: usize = (0..g.n()).map(|v| g.inn(v).len()).sum();
        prop_assert_eq!(out, g.edge_count());
        prop_assert_eq!(inn, g.edge_count());
    }

    #[test]
    fn c_restrict_idempotent(items in prop::collection::vec(0u8..5, 0..30), c in 1usize..4) {
        let mut m = Multiset::new();
        for x in items {
            m.insert(x);
        }
        let once = c_restrict(&m, c).unwrap();
        prop_assert_eq!(c_restrict(&once, c).unwrap(), once.clone());
        prop_assert!(once.iter().all(|(_, k)| k <= c));
    }

    #[test]
    fn conjugate_preserves_sum(mut a in prop::collection::vec(0u64..8, 0..8)) {
        a.sort_unstable_by(|x, y| y.cmp(x));
        let n = a.len() as u64;
        a.iter_mut().for_each(|x| *x = (*x).min(n));
        let s: BigUint = a.iter().map(|&x| BigUint::from(x)).sum();
        prop_assert_eq!(conjugate(&big(&a)).into_iter().sum::<BigUint>(), s);
    }

    #[test]
    fn summation_by_parts(ab in prop::collection::vec((-20i64..20, -20i64..20), 1..10)) {
        let a: Vec<BigInt> = ab.iter().map(|p| BigInt::from(p.0)).collect();
        let b: Vec<BigInt> = ab.iter().map(|p| BigInt::from(p.1)).collect();
        let prefix: Vec<BigInt> = b.iter().scan(BigInt::from(0), |s, x| { *s += x; Some(s.clone()) }).collect();
        let n = a.len();
        let lhs: BigInt = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let rhs: BigInt = &a[n - 1] * &prefix[n - 1] + (0..n - 1).map(|i| (&a[i + 1] - &a[i]) * -&prefix[i]).sum::<BigInt>();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rearrangement_bound(mut xy in prop::collection::vec((0u64..20, 0u64..20), 1..8), seed in any::<u64>()) {
        let mut x: Vec<u64> = xy.iter().map(|p| p.0).collect();
        let mut y: Vec<u64> = xy.drain(..).map(|p| p.1).collect();
        x.sort_unstable();
        y.sort_unstable();
        let n = x.len();
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let reversed: u64 = (0..n).map(|i| x[i] * y[n - 1 - i]).sum();
        let permuted: u64 = (0..n).map(|i| x[i] * y[sigma[i]]).sum();
        prop_assert!(reversed <= permuted);
    }

    #[test]
    fn gale_ryser_rejects_unequal_totals(r in prop::collection::vec(0u64..4, 3), c in prop::collection::vec(0u64..4, 3)) {
        let mut r = r;
        r.sort_unstable_by(|x, y| y.cmp(x));
        if r.iter().sum::<u64>() != c.iter().sum::<u64>() {
            prop_assert!(!gale_ryser_feasible(&big(&r), &big(&c)).unwrap());
        }
    }

    #[test]
    fn gadget_round_trip(g in digraph(6, 0)) {
        let gg = gadgetise(&g).unwrap();
        prop_assert!(is_gadgetisation(&gg).unwrap());
        prop_assert!(isomorphic(&degadgetise(&gg).unwrap(), &g).unwrap());
        prop_assert_eq!(count_gadget_p2(&gg).unwrap(), count_p2(&g).unwrap());
    }

    #[test]
    fn trace_is_reproducible(g in digraph(8, 0)) {
        let net = gnn::build_linear_order_gnn();
        prop_assert_eq!(gnn::run_trace(&net, &g).unwrap().render(), gnn::run_trace(&net, &g).unwrap().render());
    }

    #[test]
    fn bounded_sum_ignores_excess_multiplicity(
        pool in prop::collection::vec(prop::collection::vec(-2i64..3, 2), 1..4),
        members in prop::collection::vec(0usize..4, 0..20),
        c in 1usize..4,
        seed in any::<u64>(),
    ) {
        let x: Vec<Vec<_>> = pool.iter().map(|v| v.iter().map(|&a| rat(a)).collect()).collect();
        let members: Vec<usize> = members.into_iter().map(|m| m % x.len()).collect();
        let mut kept = Vec::new();
        for &u in &members {
            if kept.iter().filter(|&&w: &&usize| x[w] == x[u]).count() < c {
                kept.push(u);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = || {
            let mut a = Matrix::zeros(2, 2);
            for i in 0..2 {
                for j in 0..2 {
                    a.set(i, j, rat(rand::Rng::gen_range(&mut rng, -3..=3)));
                }
            }
            a
        };
        let layer = Layer { a: m(), c: m(), r: m(), bias: vec![rat(1), rat(-1)], activation: Activation::Identity, agg: Aggregation::BoundedSum(c), read: Aggregation::ConstantZero };
        prop_assert_eq!(layer_output_at(&layer, &x, 0, &members), layer_output_at(&layer, &x, 0, &kept));
    }

    #[test]
    fn networks_are_permutation_invariant(g in digraph(8, 0), seed in any::<u64>()) {
        let (h, perm) = permuted(&g, seed);
        for net in [gnn::build_linear_order_gnn(), gnn::build_gadget_order_gnn()] {
            if net.input_dim() != g.d() {
                continue;
            }
            let a = gnn::run_all(&net, &g).unwrap();
            let b = gnn::run_all(&net, &h).unwrap();
            for v in 0..g.n() {
                prop_assert_eq!(a[v], b[perm[v]]);
            }
        }
    }

    #[test]
    fn excluded_middle_everywhere(seed in any::<u64>(), g in graph(8, 2)) {
        let f = random_formula(3, g.d(), 3, true, seed);
        let em = Formula::or(f.clone(), Formula::not(f));
        prop_assert!(evaluate_all(&em, &g).unwrap().into_iter().all(|b| b));
    }

    #[test]
    fn evaluation_is_isomorphism_invariant(seed in any::<u64>(), g in graph(8, 2)) {
        let f = random_formula(3, g.d(), 3, true, seed);
        let (h, perm) = permuted(&g, seed);
        let a = evaluate_all(&f, &g).unwrap();
        let b = evaluate_all(&f, &h).unwrap();
        for v in 0..g.n() {
            prop_assert_eq!(a[v], b[perm[v]]);
        }
    }

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), d in 0usize..3) {
        let f = random_formula(4, d, 3, true, seed);
        prop_assert_eq!(parse(&gml::print(&f)).unwrap(), f);
    }

    #[test]
    fn degree_bound_formula(g in graph(8, 0), c in 0usize..4) {
        let f = build_degree_bound_formula(c);
        prop_assert_eq!(evaluate(&f, &g, 0).unwrap(), max_out_degree(&g) <= c);
    }

    #[test]
    fn compiled_layer_count_and_agreement(seed in any::<u64>(), g in graph(8, 2)) {
        let f = random_formula(3, g.d(), 3, true, seed);
        let net = compile(&f, g.d()).unwrap();
        prop_assert_eq!(net.num_layers(), 1 + f.height());
        prop_assert_eq!(gnn::write_network(&net), gnn::write_network(&compile(&f, g.d()).unwrap()));
        prop_assert_eq!(gnn::run_all(&net, &g).unwrap(), evaluate_all(&f, &g).unwrap());
    }

    #[test]
    fn network_text_round_trip(seed in any::<u64>(), d in 0usize..3) {
        let net = compile(&random_formula(3, d, 3, true, seed), d).unwrap();
        let text = gnn::write_network(&net);
        prop_assert_eq!(gnn::write_network(&gnn::read_network(&text).unwrap()), text);
    }

    #[test]
    fn bisimilarity_is_monotone(g1 in digraph(6, 1), g2 in digraph(6, 1), v in any::<prop::sample::Index>(), w in any::<prop::sample::Index>(), l in 0usize..3, c in 1usize..3) {
        prop_assume!(g1.d() == g2.d());
        let (v, w) = (v.index(g1.n()), w.index(g2.n()));
        let b = |l, c, m| bisimilar(&g1, v, &g2, w, l, c, m).unwrap();
        if b(l + 1, c, GlobalMode::None) {
            prop_assert!(b(l, c, GlobalMode::None));
        }
        if b(l, c + 1, GlobalMode::None) {
            prop_assert!(b(l, c, GlobalMode::None));
        }
        if b(l, c, GlobalMode::Exact) {
            for q in 1..5 {
                prop_assert!(b(l, c, GlobalMode::Capped(q)));
            }
        }
    }

    #[test]
    fn exact_bisimilar_points_share_embeddings(g in digraph(8, 1), l in 1usize..3, c in 1usize..3, seed in any::<u64>()) {
        let h = saturate(&g, 0, l, c).unwrap().graph;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_bounded_net(&mut rng, g.d(), l, c);
        let a = gnn::run_trace(&net, &g).unwrap();
        let b = gnn::run_trace(&net, &h).unwrap();
        for v in 0..g.n() {
            if bisimilar(&g, v, &h, v, l, c, GlobalMode::Exact).unwrap() {
                prop_assert_eq!(&a.final_layer()[v], &b.final_layer()[v]);
                prop_assert_eq!(net.classifier().accepts(&a.final_layer()[v]), net.classifier().accepts(&b.final_layer()[v]));
            }
        }
    }

    #[test]
    fn saturate_is_certified_and_idempotent(g in digraph(10, 1), v in any::<prop::sample::Index>(), l in 0usize..3, c in 1usize..3) {
        let v = v.index(g.n());
        let s = saturate(&g, v, l, c).unwrap();
        prop_assert!(s.report.valid(), "{}", s.report.render());
        prop_assert_eq!(saturate(&s.graph, v, l, c).unwrap().graph.edge_set(), s.graph.edge_set());
    }

    #[test]
    fn characteristic_formulas_are_pure(g in digraph(7, 1), v in any::<prop::sample::Index>(), l in 0usize..3, c in 1usize..3, q in 1usize..4) {
        let v = v.index(g.n());
        let chi = chi_formula(&g, v, l, c).unwrap();
        let gamma = gamma_formula(&g, v, l, c, q).unwrap();
        prop_assert_eq!(gml::print(&chi), gml::print(&chi_formula(&g, v, l, c).unwrap()));
        prop_assert_eq!(strip_global_conjuncts(&gamma), chi.clone());
        prop_assert!(evaluate(&chi, &g, v).unwrap());
        prop_assert!(evaluate(&gamma, &g, v).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn hom_counts_are_isomorphism_invariant(g in graph(5, 1), p in graph(3, 1), seed in any::<u64>()) {
        prop_assume!(g.d() == p.d() && g.mode() == p.mode());
        let (h, _) = permuted(&g, seed);
        prop_assert_eq!(count_homomorphisms(&p, &g).unwrap(), count_homomorphisms(&p, &h).unwrap());
    }
}

#[test]
fn enumeration_has_no_duplicates() {
    for n in 1..=3 {
        let en = enumerate_digraphs(n, 0).unwrap();
        assert_eq!(en.total(), 1 << (n * n));
        let seen: HashSet<String> = (0..en.total()).map(|k| write_graph(&en.graph_at(k))).collect();
        assert_eq!(seen.len() as u64, en.total());
    }
}

#[test]
fn closed_form_p2_matches_brute_force_exhaustively() {
    let p = p2_pattern();
    for n in 1..=4 {
        let en = enumerate_digraphs(n, 0).unwrap();
        for k in 0..en.total() {
            let g = en.graph_at(k);
            assert_eq!(count_p2(&g).unwrap(), count_homomorphisms(&p, &g).unwrap());
        }
    }
}

#[test]
fn family_vertices_are_pebble_equivalent() {
    for (l, c) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let r = c2_counterexample_family(l, c).unwrap();
        assert!(r.all_green(), "{}", r.render());
        for v in 0..r.g.n() {
            assert!(c2_equivalent(&r.g, v, &r.h, v, l, c).unwrap());
        }
    }
}
