//! Exact-rational ACR-GNNs: representation, evaluation, serialisation and
//! the two hand-built order networks.

use std::collections::HashMap;
use std::fmt::Write as _;

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::FeaturedGraph;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row_is_zero(&self, i: usize) -> bool {
        (0..self.cols).all(|j| self.get(i, j).is_zero())
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
    fn nonzeros(&self) -> Vec<Vec<(usize, Rational)>> {
        (0..self.rows)
            .map(|i| (0..self.cols).filter(|&j| !self.get(i, j).is_zero()).map(|j| (j, self.get(i, j).clone())).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aggregation {
    SumAll,
    /// Sum of the `c`-restricted multiset.
    BoundedSum(usize),
    ConstantZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    ReLU,
    Clamp01,
    Identity,
}

impl Activation {
    pub fn apply(self, x: Rational) -> Rational {
        match self {
            Activation::ReLU => {
                if x.is_negative() {
                    Rational::zero()
                } else {
                    x
                }
            }
            Activation::Clamp01 => {
                if x.is_negative() {
                    Rational::zero()
                } else if x > Rational::one() {
                    Rational::one()
                } else {
                    x
                }
            }
            Activation::Identity => x,
        }
    }
}

/// One layer: `act(x·A + agg·C + read·R + b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    pub a: Matrix,
    pub c: Matrix,
    pub r: Matrix,
    pub bias: Vec<Rational>,
    pub activation: Activation,
    pub agg: Aggregation,
    pub read: Aggregation,
}

impl Layer {
    pub fn input_dim(&self) -> usize {
        self.a.rows()
    }
    pub fn output_dim(&self) -> usize {
        self.a.cols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Accept iff `⟨w, x⟩ ≥ t`.
    Ge,
    /// Accept iff `⟨w, x⟩ ≤ t`.
    Le,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classifier {
    pub weights: Vec<Rational>,
    pub threshold: Rational,
    pub direction: Direction,
}

impl Classifier {
    pub fn score(&self, x: &[Rational]) -> Rational {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum()
    }
    pub fn accepts(&self, x: &[Rational]) -> bool {
        let s = self.score(x);
        match self.direction {
            Direction::Ge => s >= self.threshold,
            Direction::Le => s <= self.threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcrGnn {
    input_dim: usize,
    layers: Vec<Layer>,
    classifier: Classifier,
}

/// Per-layer embeddings; entry 0 is the input features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingTrace {
    pub layers: Vec<Vec<Vec<Rational>>>,
}

impl EmbeddingTrace {
    pub fn final_layer(&self) -> &[Vec<Rational>] {
        self.layers.last().expect("at least the input layer")
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (i, layer) in self.layers.iter().enumerate() {
            for (v, x) in layer.iter().enumerate() {
                let vals: Vec<String> = x.iter().map(format_rational).collect();
                let _ = writeln!(s, "layer {i} vertex {v}: {}", vals.join(" "));
            }
        }
        s
    }
}

impl AcrGnn {
    pub fn new(input_dim: usize, layers: Vec<Layer>, classifier: Classifier) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidParameter("an ACR-GNN needs at least one layer".into()));
        }
        let mut dim = input_dim;
        for (i, l) in layers.iter().enumerate() {
            let out = l.output_dim();
            for (name, m) in [("A", &l.a), ("C", &l.c), ("R", &l.r)] {
                if m.rows() != dim || m.cols() != out {
                    return Err(Error::DimensionMismatch(format!(
                        "layer {}: matrix {name} is {}x{}, expected {dim}x{out}",
                        i + 1,
                        m.rows(),
                        m.cols()
                    )));
                }
            }
            if l.bias.len() != out {
                return Err(Error::DimensionMismatch(format!("layer {}: bias length {}", i + 1, l.bias.len())));
            }
            for agg in [l.agg, l.read] {
                if agg == Aggregation::BoundedSum(0) {
                    return Err(Error::InvalidParameter("bounded sum needs c >= 1".into()));
                }
            }
            dim = out;
        }
        if classifier.weights.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "classifier has {} weights, final layer has {dim} dims",
                classifier.weights.len()
            )));
        }
        Ok(AcrGnn { input_dim, layers, classifier })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }
    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }
    pub fn classifier(&self) -> &Classifier {
        &self.classifier
    }
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }
}

/// Applies an aggregation to the rows of `x` listed in `members`, only
/// for dimensions flagged in `needed`.
fn aggregate(kind: Aggregation, x: &[Vec<Rational>], members: &mut dyn Iterator<Item = usize>, needed: &[bool]) -> Vec<Rational> {
    let dim = needed.len();
    let mut acc = vec![Rational::zero(); dim];
    match kind {
        Aggregation::ConstantZero => {}
        Aggregation::SumAll => {
            for u in members {
                for (j, flag) in needed.iter().enumerate() {
                    if *flag && !x[u][j].is_zero() {
                        acc[j] += &x[u][j];
                    }
                }
            }
        }
        Aggregation::BoundedSum(c) => {
            let mut counts: HashMap<&Vec<Rational>, usize> = HashMap::new();
            for u in members {
                *counts.entry(&x[u]).or_insert(0) += 1;
            }
            for (vec, m) in counts {
                let k = Rational::from_integer(BigInt::from(m.min(c)));
                for (j, flag) in needed.iter().enumerate() {
                    if *flag && !vec[j].is_zero() {
                        acc[j] += &vec[j] * &k;
                    }
                }
            }
        }
    }
    acc
}

fn graph_input(net: &AcrGnn, g: &FeaturedGraph) -> Result<Vec<Vec<Rational>>> {
    if g.d() != net.input_dim {
        return Err(Error::DimensionMismatch(format!(
            "network expects d = {}, graph has d = {}",
            net.input_dim,
            g.d()
        )));
    }
    Ok((0..g.n())
        .map(|v| g.feature(v).iter().map(|&b| if b { Rational::one() } else { Rational::zero() }).collect())
        .collect())
}

fn apply_layer(layer: &Layer, g: &FeaturedGraph, x: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = g.n();
    let din = layer.input_dim();
    let dout = layer.output_dim();
    let need_c: Vec<bool> = (0..din).map(|i| !layer.c.row_is_zero(i)).collect();
    let need_r: Vec<bool> = (0..din).map(|i| !layer.r.row_is_zero(i)).collect();
    let a_nz = layer.a.nonzeros();
    let c_nz = layer.c.nonzeros();
    let r_nz = layer.r.nonzeros();
    let read = if need_r.iter().any(|&b| b) {
        aggregate(layer.read, x, &mut (0..n), &need_r)
    } else {
        vec![Rational::zero(); din]
    };
    let mut global = layer.bias.clone();
    for (i, row) in r_nz.iter().enumerate() {
        if read[i].is_zero() {
            continue;
        }
        for (j, w) in row {
            global[*j] += &read[i] * w;
        }
    }
    let any_c = need_c.iter().any(|&b| b);
    (0..n)
        .map(|v| {
            let mut pre = global.clone();
            for (i, row) in a_nz.iter().enumerate() {
                if x[v][i].is_zero() {
                    continue;
                }
                for (j, w) in row {
                    pre[*j] += &x[v][i] * w;
                }
            }
            if any_c {
                let agg = aggregate(layer.agg, x, &mut g.out(v).iter().copied(), &need_c);
                for (i, row) in c_nz.iter().enumerate() {
                    if agg[i].is_zero() {
                        continue;
                    }
                    for (j, w) in row {
                        pre[*j] += &agg[i] * w;
                    }
                }
            }
            debug_assert_eq!(pre.len(), dout);
            pre.into_iter().map(|p| layer.activation.apply(p)).collect()
        })
        .collect()
}

/// Recomputes one layer at `v` from the previous embeddings `x`, using an
/// explicit neighbour list in place of the graph's out-neighbourhood.
pub fn layer_output_at(layer: &Layer, x: &[Vec<Rational>], v: usize, neighbours: &[usize]) -> Vec<Rational> {
    let din = layer.input_dim();
    let all = vec![true; din];
    let agg = aggregate(layer.agg, x, &mut neighbours.iter().copied(), &all);
    let read = aggregate(layer.read, x, &mut (0..x.len()), &all);
    (0..layer.output_dim())
        .map(|j| {
            let mut p = layer.bias[j].clone();
            for i in 0..din {
                p += &x[v][i] * layer.a.get(i, j) + &agg[i] * layer.c.get(i, j) + &read[i] * layer.r.get(i, j);
            }
            layer.activation.apply(p)
        })
        .collect()
}

/// All intermediate embeddings.
pub fn run_trace(net: &AcrGnn, g: &FeaturedGraph) -> Result<EmbeddingTrace> {
    let mut layers = vec![graph_input(net, g)?];
    for layer in &net.layers {
        let next = apply_layer(layer, g, layers.last().expect("nonempty"));
        layers.push(next);
    }
    Ok(EmbeddingTrace { layers })
}

/// Final-layer embeddings only.
pub fn run_embeddings(net: &AcrGnn, g: &FeaturedGraph) -> Result<Vec<Vec<Rational>>> {
    let mut x = graph_input(net, g)?;
    for layer in &net.layers {
        x = apply_layer(layer, g, &x);
    }
    Ok(x)
}

/// Acceptance bit at every vertex.
pub fn run_all(net: &AcrGnn, g: &FeaturedGraph) -> Result<Vec<bool>> {
    Ok(run_embeddings(net, g)?.iter().map(|x| net.classifier.accepts(x)).collect())
}

pub fn run(net: &AcrGnn, g: &FeaturedGraph, v: usize) -> Result<bool> {
    g.check_vertex(v)?;
    Ok(run_all(net, g)?[v])
}

/// Sum aggregation and readout, ReLU everywhere.
pub fn is_simple(net: &AcrGnn) -> bool {
    net.layers
        .iter()
        .all(|l| l.agg == Aggregation::SumAll && l.read == Aggregation::SumAll && l.activation == Activation::ReLU)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Src {
    Own,
    Agg,
    Read,
}

type Channel = (Vec<(Src, usize, Rational)>, Rational);

/// Builds a layer channel by channel as affine forms over the previous
/// layer's own, aggregated and read-out values.
pub struct LayerBuilder {
    input_dim: usize,
    channels: Vec<Channel>,
}

impl LayerBuilder {
    pub fn new(input_dim: usize) -> Self {
        LayerBuilder { input_dim, channels: Vec::new() }
    }

    /// Adds a channel and returns its index.
    pub fn channel(&mut self, terms: &[(Src, usize, Rational)], bias: Rational) -> usize {
        self.channels.push((terms.to_vec(), bias));
        self.channels.len() - 1
    }

    pub fn copy(&mut self, i: usize) -> usize {
        self.channel(&[(Src::Own, i, rat(1))], rat(0))
    }

    pub fn build(self, activation: Activation, agg: Aggregation, read: Aggregation) -> Layer {
        let out = self.channels.len();
        let mut a = Matrix::zeros(self.input_dim, out);
        let mut c = Matrix::zeros(self.input_dim, out);
        let mut r = Matrix::zeros(self.input_dim, out);
        let mut bias = Vec::with_capacity(out);
        for (j, (terms, b)) in self.channels.into_iter().enumerate() {
            for (src, i, w) in terms {
                let m = match src {
                    Src::Own => &mut a,
                    Src::Agg => &mut c,
                    Src::Read => &mut r,
                };
                let cur = m.get(i, j).clone();
                m.set(i, j, cur + w);
            }
            bias.push(b);
        }
        Layer { a, c, r, bias, activation, agg, read }
    }

    pub fn build_simple(self) -> Layer {
        self.build(Activation::ReLU, Aggregation::SumAll, Aggregation::SumAll)
    }
}

use Src::{Agg, Own, Read};

/// Simple six-layer network accepting exactly the strict linear orders.
///
/// Layers 1–4 compute, in parallel, `|E|`, `C(n,2)`, `hom(P₂,G)` and
/// `C(n,3)`; layer 5 takes the four one-sided differences and layer 6 sums
/// them. Accepts iff the sum is `≤ 0`.
pub fn build_linear_order_gnn() -> AcrGnn {
    let mut l1 = LayerBuilder::new(0);
    for _ in 0..4 {
        l1.channel(&[], rat(1));
    }
    let mut l2 = LayerBuilder::new(4);
    l2.channel(&[(Agg, 0, rat(1))], rat(0)); // out-degree
    l2.channel(&[(Read, 1, rat(1))], rat(0)); // n
    l2.channel(&[(Agg, 2, rat(1))], rat(0)); // out-degree
    l2.channel(&[(Read, 3, rat(1))], rat(0)); // n
    let mut l3 = LayerBuilder::new(4);
    l3.channel(&[(Read, 0, rat(1))], rat(0)); // |E|
    l3.channel(&[(Own, 1, ratio(-1, 2)), (Read, 1, ratio(1, 2))], rat(0)); // C(n,2)
    l3.channel(&[(Agg, 2, rat(1))], rat(0)); // 2-walks from v
    l3.channel(&[(Read, 3, rat(1))], rat(0)); // n^2
    l3.copy(3); // n
    let mut l4 = LayerBuilder::new(5);
    l4.copy(0);
    l4.copy(1);
    l4.channel(&[(Read, 2, rat(1))], rat(0)); // hom(P2, G)
    l4.channel(&[(Read, 3, ratio(1, 6)), (Own, 3, ratio(-3, 6)), (Own, 4, ratio(2, 6))], rat(0)); // C(n,3)
    let mut l5 = LayerBuilder::new(4);
    l5.channel(&[(Own, 0, rat(1)), (Own, 1, rat(-1))], rat(0));
    l5.channel(&[(Own, 1, rat(1)), (Own, 0, rat(-1))], rat(0));
    l5.channel(&[(Own, 2, rat(1)), (Own, 3, rat(-1))], rat(0));
    l5.channel(&[(Own, 3, rat(1)), (Own, 2, rat(-1))], rat(0));
    let mut l6 = LayerBuilder::new(4);
    l6.channel(&[(Own, 0, rat(1)), (Own, 1, rat(1)), (Own, 2, rat(1)), (Own, 3, rat(1))], rat(0));
    let layers = [l1, l2, l3, l4, l5, l6].into_iter().map(LayerBuilder::build_simple).collect();
    AcrGnn::new(0, layers, Classifier { weights: vec![rat(1)], threshold: rat(0), direction: Direction::Le })
        .expect("static network")
}

/// Simple network over 2-featured undirected graphs accepting exactly the
/// gadgetisations of strict linear orders.
///
/// Structural clauses are checked per vertex with 0/1 indicators; bounded
/// indicators can be gated by vertex kind with plain ReLU arithmetic. The
/// counting part never gates an unbounded count by kind. On a valid gadget
/// of a digraph with `m` vertices it checks
///
/// * `|E| = C(m,2)`,
/// * `out(b) + in(b) = m − 1` at every identity vertex,
/// * `Σ_b out(b)² = Σ_{k<m} k²`,
///
/// which together force `hom(P₂) = (m−1)|E| − Σ out² = C(m,3)`.
///
/// Layers: 1 kind flags and neighbour-kind counts; 2 gated degrees and
/// global sizes; 3 threshold pieces, degrees at identity vertices, `|E|`;
/// 4 clause indicators and the degree-sum residual; 5 violations count and
/// global residuals; 6 gated residual indicator; 7 totals.
pub fn build_gadget_order_gnn() -> AcrGnn {
    let one = rat(1);
    let m1 = rat(-1);
    // layer 1: p1 p2 one ns nt io
    let mut l1 = LayerBuilder::new(2);
    let p1 = l1.copy(0);
    let p2 = l1.copy(1);
    let c_one = l1.channel(&[], rat(1));
    let ns = l1.channel(&[(Agg, 0, one.clone())], rat(0));
    let nt = l1.channel(&[(Agg, 1, one.clone())], rat(0));
    let io = l1.channel(&[(Own, 0, m1.clone()), (Own, 1, m1.clone())], rat(1));
    // layer 2
    let mut l2 = LayerBuilder::new(l1.channels.len());
    let p1_2 = l2.copy(p1);
    let p2_2 = l2.copy(p2);
    let io_2 = l2.copy(io);
    let ns_2 = l2.copy(ns);
    let nt_2 = l2.copy(nt);
    let ni_2 = l2.channel(&[(Agg, io, one.clone())], rat(0));
    let bad1 = l2.channel(&[(Own, p1, one.clone()), (Own, p2, one.clone())], rat(-1));
    let o = l2.channel(&[(Own, nt, one.clone()), (Own, p1, one.clone())], rat(-1));
    let mdeg = l2.channel(&[(Own, ns, one.clone()), (Own, p2, one.clone())], rat(-1));
    let big_n = l2.channel(&[(Read, c_one, one.clone())], rat(0));
    let big_m = l2.channel(&[(Read, io, one.clone())], rat(0));
    // layer 3
    let mut l3 = LayerBuilder::new(l2.channels.len());
    let p1_3 = l3.copy(p1_2);
    let p2_3 = l3.copy(p2_2);
    let io_3 = l3.copy(io_2);
    let bad1_3 = l3.copy(bad1);
    let mut pieces = Vec::new();
    for x in [ns_2, nt_2, ni_2] {
        let v = l3.copy(x);
        let r1 = l3.channel(&[(Own, x, one.clone())], rat(-1));
        let r2 = l3.channel(&[(Own, x, one.clone())], rat(-2));
        let z = l3.channel(&[(Own, x, m1.clone())], rat(1));
        pieces.push((v, r1, r2, z));
    }
    let u = l3.channel(&[(Agg, o, one.clone())], rat(0));
    let w = l3.channel(&[(Agg, mdeg, one.clone())], rat(0));
    let m_3 = l3.copy(big_m);
    let e_3 = l3.channel(&[(Read, o, one.clone())], rat(0));
    let nm_3 = l3.channel(&[(Read, big_m, one.clone())], rat(0));
    let _ = big_n;
    // layer 4
    let mut l4 = LayerBuilder::new(l3.channels.len());
    let ge1 = |p: (usize, usize, usize, usize)| [(Own, p.0, rat(1)), (Own, p.1, rat(-1))];
    let ne1 = |p: (usize, usize, usize, usize)| [(Own, p.3, rat(1)), (Own, p.1, rat(1)), (Own, p.2, rat(-1))];
    let (ps, pt, pi) = (pieces[0], pieces[1], pieces[2]);
    let mut bads = vec![l4.copy(bad1_3)];
    let gate = |terms: &[(Src, usize, Rational)], kinds: &[usize]| {
        let mut t = terms.to_vec();
        for &k in kinds {
            t.push((Own, k, rat(1)));
        }
        t
    };
    bads.push(l4.channel(&gate(&ge1(ps), &[p1_3]), rat(-1))); // s-s edge
    bads.push(l4.channel(&gate(&ge1(pt), &[p2_3]), rat(-1))); // t-t edge
    bads.push(l4.channel(&gate(&ge1(pi), &[io_3]), rat(-1))); // ι-ι edge
    bads.push(l4.channel(&gate(&ne1(pi), &[p1_3, p2_3]), rat(-1))); // s/t without a unique ι
    bads.push(l4.channel(&gate(&ne1(ps), &[io_3]), rat(-1))); // ι without a unique s
    bads.push(l4.channel(&gate(&ne1(pt), &[io_3]), rat(-1))); // ι without a unique t
    let dp = l4.channel(&[(Own, u, one.clone()), (Own, w, one.clone()), (Own, m_3, m1.clone())], rat(1));
    let dn = l4.channel(&[(Own, u, m1.clone()), (Own, w, m1.clone()), (Own, m_3, one.clone())], rat(-1));
    let io_4 = l4.copy(io_3);
    let s1 = l4.channel(&[(Read, u, one.clone())], rat(0));
    let e_4 = l4.copy(e_3);
    let m_4 = l4.copy(m_3);
    let nm_4 = l4.copy(nm_3);
    let nnm_4 = l4.channel(&[(Read, nm_3, one.clone())], rat(0));
    // layer 5
    let mut l5 = LayerBuilder::new(l4.channels.len());
    let viol_terms: Vec<_> = bads.iter().map(|&b| (Read, b, rat(1))).collect();
    let viol = l5.channel(&viol_terms, rat(0));
    let ad = l5.channel(&[(Own, dp, one.clone()), (Own, dn, one.clone())], rat(0));
    let ad1 = l5.channel(&[(Own, dp, one.clone()), (Own, dn, one.clone())], rat(-1));
    let io_5 = l5.copy(io_4);
    // |E| − (m² − m)/2 with m² = N·M/3
    let e_res = [(Own, e_4, rat(1)), (Own, nm_4, ratio(-1, 6)), (Own, m_4, ratio(1, 2))];
    // S1 − (m³ − m)/3 with m³ = N²·M/9
    let s_res = [(Own, s1, rat(1)), (Own, nnm_4, ratio(-1, 27)), (Own, m_4, ratio(1, 3))];
    let neg = |t: &[(Src, usize, Rational)]| t.iter().map(|(s, i, q)| (*s, *i, -q.clone())).collect::<Vec<_>>();
    let e_pos = l5.channel(&e_res, rat(0));
    let e_neg = l5.channel(&neg(&e_res), rat(0));
    let s_pos = l5.channel(&s_res, rat(0));
    let s_neg = l5.channel(&neg(&s_res), rat(0));
    // layer 6
    let mut l6 = LayerBuilder::new(l5.channels.len());
    let gd = l6.channel(&[(Own, ad, one.clone()), (Own, ad1, m1.clone()), (Own, io_5, one.clone())], rat(-1));
    let tot = l6.channel(
        &[(Own, viol, one.clone()), (Own, e_pos, one.clone()), (Own, e_neg, one.clone()), (Own, s_pos, one.clone()), (Own, s_neg, one.clone())],
        rat(0),
    );
    // layer 7
    let mut l7 = LayerBuilder::new(l6.channels.len());
    l7.channel(&[(Read, gd, one.clone())], rat(0));
    l7.copy(tot);
    let layers = [l1, l2, l3, l4, l5, l6, l7].into_iter().map(LayerBuilder::build_simple).collect();
    AcrGnn::new(2, layers, Classifier { weights: vec![rat(1), rat(1)], threshold: rat(0), direction: Direction::Le })
        .expect("static network")
}

fn agg_name(a: Aggregation) -> String {
    match a {
        Aggregation::SumAll => "sum".into(),
        Aggregation::BoundedSum(c) => format!("bounded:{c}"),
        Aggregation::ConstantZero => "zero".into(),
    }
}

fn act_name(a: Activation) -> &'static str {
    match a {
        Activation::ReLU => "relu",
        Activation::Clamp01 => "clamp01",
        Activation::Identity => "identity",
    }
}

/// Versioned text serialisation with exact rationals.
pub fn write_network(net: &AcrGnn) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "acrgnn 1");
    let _ = writeln!(s, "input_dim {}", net.input_dim);
    let _ = writeln!(s, "layers {}", net.layers.len());
    let row = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>().join(" ");
    for l in &net.layers {
        let _ = writeln!(
            s,
            "layer {} {} {} {} {}",
            l.input_dim(),
            l.output_dim(),
            act_name(l.activation),
            agg_name(l.agg),
            agg_name(l.read)
        );
        for (name, m) in [("A", &l.a), ("C", &l.c), ("R", &l.r)] {
            let _ = writeln!(s, "{name}");
            for i in 0..m.rows() {
                let r: Vec<Rational> = (0..m.cols()).map(|j| m.get(i, j).clone()).collect();
                let _ = writeln!(s, "  {}", row(&r));
            }
        }
        let _ = writeln!(s, "b {}", row(&l.bias));
    }
    let dir = match net.classifier.direction {
        Direction::Ge => "ge",
        Direction::Le => "le",
    };
    let _ = writeln!(s, "classifier {dir} {}", format_rational(&net.classifier.threshold));
    let _ = writeln!(s, "w {}", row(&net.classifier.weights));
    let _ = writeln!(s, "end");
    s
}

pub fn read_network(text: &str) -> Result<AcrGnn> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let mut next = || lines.next().ok_or_else(|| perr(0, "unexpected end of network text"));
    let parse_row = |ln: usize, toks: &[&str], len: usize| -> Result<Vec<Rational>> {
        if toks.len() != len {
            return Err(perr(ln, &format!("expected {len} entries, found {}", toks.len())));
        }
        toks.iter().map(|t| parse_rational(t).ok_or_else(|| perr(ln, "bad rational"))).collect()
    };
    let parse_agg = |ln: usize, t: &str| -> Result<Aggregation> {
        match t {
            "sum" => Ok(Aggregation::SumAll),
            "zero" => Ok(Aggregation::ConstantZero),
            _ => {
                let c = t
                    .strip_prefix("bounded:")
                    .and_then(|c| c.parse::<usize>().ok())
                    .ok_or_else(|| perr(ln, &format!("unsupported aggregation `{t}`")))?;
                Ok(Aggregation::BoundedSum(c))
            }
        }
    };
    let (ln, l) = next()?;
    if l != "acrgnn 1" {
        return Err(perr(ln, "expected `acrgnn 1` header"));
    }
    let (ln, l) = next()?;
    let input_dim: usize = l
        .strip_prefix("input_dim ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| perr(ln, "expected `input_dim <k>`"))?;
    let (ln, l) = next()?;
    let count: usize = l
        .strip_prefix("layers ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| perr(ln, "expected `layers <k>`"))?;
    let mut layers = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, l) = next()?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        let [kw, din, dout, act, agg, read] = toks.as_slice() else {
            return Err(perr(ln, "expected `layer <in> <out> <act> <agg> <read>`"));
        };
        if *kw != "layer" {
            return Err(perr(ln, "expected `layer`"));
        }
        let din: usize = din.parse().map_err(|_| perr(ln, "bad input dim"))?;
        let dout: usize = dout.parse().map_err(|_| perr(ln, "bad output dim"))?;
        let activation = match *act {
            "relu" => Activation::ReLU,
            "clamp01" => Activation::Clamp01,
            "identity" => Activation::Identity,
            _ => return Err(perr(ln, &format!("unsupported activation `{act}`"))),
        };
        let agg = parse_agg(ln, agg)?;
        let read = parse_agg(ln, read)?;
        let mut mats = Vec::new();
        for name in ["A", "C", "R"] {
            let (ln, l) = next()?;
            if l != name {
                return Err(perr(ln, &format!("expected matrix `{name}`")));
            }
            let mut m = Matrix::zeros(din, dout);
            for i in 0..din {
                let (ln, l) = next()?;
                let toks: Vec<&str> = l.split_whitespace().collect();
                for (j, q) in parse_row(ln, &toks, dout)?.into_iter().enumerate() {
                    m.set(i, j, q);
                }
            }
            mats.push(m);
        }
        let (ln, l) = next()?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.first() != Some(&"b") {
            return Err(perr(ln, "expected bias line"));
        }
        let bias = parse_row(ln, &toks[1..], dout)?;
        let r = mats.pop().expect("three");
        let c = mats.pop().expect("three");
        let a = mats.pop().expect("three");
        layers.push(Layer { a, c, r, bias, activation, agg, read });
    }
    let (ln, l) = next()?;
    let toks: Vec<&str> = l.split_whitespace().collect();
    let [kw, dir, t] = toks.as_slice() else {
        return Err(perr(ln, "expected `classifier <ge|le> <threshold>`"));
    };
    if *kw != "classifier" {
        return Err(perr(ln, "expected `classifier`"));
    }
    let direction = match *dir {
        "ge" => Direction::Ge,
        "le" => Direction::Le,
        _ => return Err(perr(ln, "classifier direction must be ge or le")),
    };
    let threshold = parse_rational(t).ok_or_else(|| perr(ln, "bad threshold"))?;
    let (ln, l) = next()?;
    let toks: Vec<&str> = l.split_whitespace().collect();
    if toks.first() != Some(&"w") {
        return Err(perr(ln, "expected weight line"));
    }
    let dim = layers.last().map_or(input_dim, Layer::output_dim);
    let weights = parse_row(ln, &toks[1..], dim)?;
    let (ln, l) = next()?;
    if l != "end" {
        return Err(perr(ln, "expected `end`"));
    }
    AcrGnn::new(input_dim, layers, Classifier { weights, threshold, direction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::gadgetise;
    use crate::graph::{make_strict_linear_order, Multiset};

    fn cycle3() -> FeaturedGraph {
        FeaturedGraph::directed(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn linear_order_net_examples() {
        let net = build_linear_order_gnn();
        assert!(is_simple(&net));
        assert_eq!(net.num_layers(), 6);
        let o3 = make_strict_linear_order(3).unwrap();
        assert!((0..3).all(|v| run(&net, &o3, v).unwrap()));
        assert!(!(0..3).any(|v| run(&net, &cycle3(), v).unwrap()));
        let t = run_trace(&net, &o3).unwrap();
        for v in 0..3 {
            assert_eq!(t.layers[1][v], vec![rat(1); 4]);
            assert_eq!(t.layers[4][v], vec![rat(3), rat(3), rat(1), rat(1)]);
        }
        let t1 = run_trace(&net, &make_strict_linear_order(1).unwrap()).unwrap();
        assert_eq!(t1.layers[4][0], vec![rat(0); 4]);
        let tc = run_trace(&net, &cycle3()).unwrap();
        assert_eq!(tc.layers[5][0], vec![rat(0), rat(0), rat(2), rat(0)]);
        assert_eq!(tc.layers[6][0], vec![rat(2)]);
    }

    #[test]
    fn constant_classifier_accepts_everything() {
        let mut l = LayerBuilder::new(1);
        l.channel(&[(Own, 0, rat(-5))], rat(0));
        let net = AcrGnn::new(
            1,
            vec![l.build_simple()],
            Classifier { weights: vec![rat(1)], threshold: rat(-1), direction: Direction::Ge },
        )
        .unwrap();
        let g = crate::graph::random_graph(5, 1, 0.5, crate::graph::Mode::Directed, 3, None);
        assert!(run_all(&net, &g).unwrap().into_iter().all(|b| b));
    }

    #[test]
    fn gadget_net_examples() {
        let net = build_gadget_order_gnn();
        assert!(is_simple(&net));
        for n in 1..=6 {
            let g = gadgetise(&make_strict_linear_order(n).unwrap()).unwrap();
            assert!(run_all(&net, &g).unwrap().into_iter().all(|b| b), "order {n}");
        }
        let c = gadgetise(&cycle3()).unwrap();
        assert!(!run_all(&net, &c).unwrap().into_iter().any(|b| b));
    }

    #[test]
    fn bounded_sum_is_c_bounded() {
        let x: Vec<Vec<Rational>> = vec![vec![rat(1), rat(2)], vec![rat(1), rat(2)], vec![rat(1), rat(2)], vec![rat(0), rat(5)]];
        let need = vec![true, true];
        let full = aggregate(Aggregation::BoundedSum(2), &x, &mut (0..4), &need);
        assert_eq!(full, vec![rat(2), rat(9)]);
        let mut m: Multiset<usize> = (0..4).map(|i| if i < 3 { 0 } else { 3 }).collect();
        m = crate::graph::c_restrict(&m, 2).unwrap();
        let restricted: Vec<usize> = m.iter().flat_map(|(k, c)| std::iter::repeat_n(*k, c)).collect();
        assert_eq!(aggregate(Aggregation::BoundedSum(2), &x, &mut restricted.into_iter(), &need), full);
    }

    #[test]
    fn serialisation_round_trip() {
        for net in [build_linear_order_gnn(), build_gadget_order_gnn()] {
            let t = write_network(&net);
            let back = read_network(&t).unwrap();
            assert_eq!(back, net);
            assert_eq!(write_network(&back), t);
        }
        assert!(read_network("acrgnn 1\ninput_dim 0\nlayers 1\nlayer 0 1 relu max sum\nA\nC\nR\nb 0\nclassifier ge 0\nw 1\nend\n").is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let net = build_gadget_order_gnn();
        assert!(run(&net, &make_strict_linear_order(2).unwrap(), 0).is_err());
    }
}
