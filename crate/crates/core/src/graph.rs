//! Featured graphs, multisets, generators and the FGR text format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Boolean feature vector of a vertex. All 0/1 patterns are legal.
pub type FeatureVector = Vec<bool>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Directed,
    Undirected,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Directed => "directed",
            Mode::Undirected => "undirected",
        }
    }
}

/// Immutable featured graph over the dense vertex set `0..n`.
///
/// Undirected graphs are stored as symmetric edge sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeaturedGraph {
    mode: Mode,
    d: usize,
    features: Vec<FeatureVector>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

impl FeaturedGraph {
    /// Builds a graph from explicit ordered edges. Undirected input must
    /// already be symmetric; duplicate edges are rejected.
    pub fn new(
        mode: Mode,
        n: usize,
        d: usize,
        features: Vec<FeatureVector>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one vertex".into()));
        }
        if features.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} feature vectors for {} vertices",
                features.len(),
                n
            )));
        }
        if let Some((v, f)) = features.iter().enumerate().find(|(_, f)| f.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "vertex {v} has feature length {} but d = {d}",
                f.len()
            )));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
            if !set.insert((u, v)) {
                return Err(Error::InvalidParameter(format!("duplicate edge ({u},{v})")));
            }
        }
        if mode == Mode::Undirected {
            if let Some(&(u, v)) = set.iter().find(|&&(u, v)| !set.contains(&(v, u))) {
                return Err(Error::InvalidParameter(format!(
                    "undirected graph is missing reverse of edge ({u},{v})"
                )));
            }
        }
        Ok(Self::from_set(mode, n, d, features, &set))
    }

    /// Undirected graph from unordered pairs; each pair is symmetrised and
    /// repeated pairs are merged.
    pub fn undirected(
        n: usize,
        d: usize,
        features: Vec<FeatureVector>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in pairs {
            set.insert((u, v));
            set.insert((v, u));
        }
        Self::new(Mode::Undirected, n, d, features, set)
    }

    /// Featureless directed graph.
    pub fn directed(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(Mode::Directed, n, 0, vec![Vec::new(); n], edges)
    }

    fn from_set(
        mode: Mode,
        n: usize,
        d: usize,
        features: Vec<FeatureVector>,
        set: &BTreeSet<(usize, usize)>,
    ) -> Self {
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(u, v) in set {
            out[u].push(v);
            inn[v].push(u);
        }
        for l in inn.iter_mut() {
            l.sort_unstable();
        }
        FeaturedGraph { mode, d, features, out, inn }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn n(&self) -> usize {
        self.features.len()
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn feature(&self, v: usize) -> &FeatureVector {
        &self.features[v]
    }
    pub fn features(&self) -> &[FeatureVector] {
        &self.features
    }
    /// Sorted out-neighbours of `v`.
    pub fn out(&self, v: usize) -> &[usize] {
        &self.out[v]
    }
    /// Sorted in-neighbours of `v`.
    pub fn inn(&self, v: usize) -> &[usize] {
        &self.inn[v]
    }
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }
    /// Number of stored ordered pairs.
    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }
    /// Number of unordered edges in undirected mode, loops counted once.
    pub fn undirected_edge_count(&self) -> usize {
        self.edges().filter(|&(u, v)| u <= v).count()
    }
    /// Ordered pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().map(move |&v| (u, v)))
    }
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges().collect()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    /// Same vertices and features with a replaced edge set.
    pub fn with_edges(&self, edges: &BTreeSet<(usize, usize)>) -> Result<Self> {
        Self::new(self.mode, self.n(), self.d, self.features.clone(), edges.iter().copied())
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n || perm.iter().collect::<BTreeSet<_>>().len() != n || perm.iter().any(|&p| p >= n) {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
        let mut features = vec![Vec::new(); n];
        for v in 0..n {
            features[perm[v]] = self.features[v].clone();
        }
        Self::new(
            self.mode,
            n,
            self.d,
            features,
            self.edges().map(|(u, v)| (perm[u], perm[v])),
        )
    }
}

/// Out- and in-neighbourhood of `v`.
pub fn neighbourhoods(g: &FeaturedGraph, v: usize) -> Result<(BTreeSet<usize>, BTreeSet<usize>)> {
    g.check_vertex(v)?;
    Ok((g.out(v).iter().copied().collect(), g.inn(v).iter().copied().collect()))
}

/// Finite multiset with strictly positive multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Multiset<T: Ord> {
    elements: BTreeMap<T, usize>,
}

impl<T: Ord + Clone> Multiset<T> {
    pub fn new() -> Self {
        Multiset { elements: BTreeMap::new() }
    }
    pub fn insert(&mut self, x: T) {
        *self.elements.entry(x).or_insert(0) += 1;
    }
    pub fn insert_n(&mut self, x: T, k: usize) {
        if k > 0 {
            *self.elements.entry(x).or_insert(0) += k;
        }
    }
    pub fn multiplicity(&self, x: &T) -> usize {
        self.elements.get(x).copied().unwrap_or(0)
    }
    pub fn iter(&self) -> impl Iterator<Item = (&T, usize)> {
        self.elements.iter().map(|(k, &m)| (k, m))
    }
    pub fn len(&self) -> usize {
        self.elements.values().sum()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

impl<T: Ord + Clone> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for x in iter {
            m.insert(x);
        }
        m
    }
}

/// The c-restriction: every multiplicity capped at `c`.
pub fn c_restrict<T: Ord + Clone>(m: &Multiset<T>, c: usize) -> Result<Multiset<T>> {
    if c == 0 {
        return Err(Error::InvalidParameter("c-restriction needs c >= 1".into()));
    }
    Ok(Multiset {
        elements: m.elements.iter().map(|(k, &v)| (k.clone(), v.min(c))).collect(),
    })
}

/// Directed featureless graph with edges `(i, j)` for all `i < j`.
pub fn make_strict_linear_order(n: usize) -> Result<FeaturedGraph> {
    if n == 0 {
        return Err(Error::InvalidParameter("order needs n >= 1".into()));
    }
    FeaturedGraph::directed(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

/// Default bit budget for exhaustive enumeration (n = 4, d = 0).
pub const ENUMERATION_BIT_CAP: usize = 16;

/// All featured digraphs on `n` vertices with dimension `d`.
///
/// Graph number `k` has edge mask `k mod 2^(n²)` and feature mask
/// `k >> n²`. Edge bit `u*n + v` encodes `(u, v)` and feature bit
/// `v*d + j` encodes `f(v)[j]`; both little-endian, so the edge mask
/// varies fastest.
pub fn enumerate_digraphs(n: usize, d: usize) -> Result<DigraphEnumeration> {
    enumerate_digraphs_capped(n, d, ENUMERATION_BIT_CAP)
}

pub fn enumerate_digraphs_capped(n: usize, d: usize, max_bits: usize) -> Result<DigraphEnumeration> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let bits = n * n + n * d;
    if bits > max_bits || bits >= 64 {
        return Err(Error::CapExceeded(format!(
            "enumeration needs {bits} bits, cap is {max_bits}"
        )));
    }
    Ok(DigraphEnumeration { n, d, next: 0, total: 1u64 << bits })
}

#[derive(Debug, Clone)]
pub struct DigraphEnumeration {
    n: usize,
    d: usize,
    next: u64,
    total: u64,
}

impl DigraphEnumeration {
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Graph at a given index of the canonical order.
    pub fn graph_at(&self, k: u64) -> FeaturedGraph {
        let n = self.n;
        let nn = n * n;
        let edges = (0..nn).filter(|b| k >> b & 1 == 1).map(|b| (b / n, b % n));
        let fmask = k >> nn;
        let features = (0..n)
            .map(|v| (0..self.d).map(|j| fmask >> (v * self.d + j) & 1 == 1).collect())
            .collect();
        FeaturedGraph::new(Mode::Directed, n, self.d, features, edges).expect("valid by construction")
    }
}

impl Iterator for DigraphEnumeration {
    type Item = FeaturedGraph;
    fn next(&mut self) -> Option<FeaturedGraph> {
        if self.next >= self.total {
            return None;
        }
        let g = self.graph_at(self.next);
        self.next += 1;
        Some(g)
    }
}

/// Reproducible random graph. Self-loops are allowed; each potential edge
/// (each unordered pair in undirected mode) is kept with probability
/// `edge_prob`. With `max_outdeg`, surplus edges of a vertex are dropped
/// uniformly at random.
pub fn random_graph(
    n: usize,
    d: usize,
    edge_prob: f64,
    mode: Mode,
    seed: u64,
    max_outdeg: Option<usize>,
) -> FeaturedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_graph_with(&mut rng, n, d, edge_prob, mode, max_outdeg)
}

pub fn random_graph_with<R: Rng>(
    rng: &mut R,
    n: usize,
    d: usize,
    edge_prob: f64,
    mode: Mode,
    max_outdeg: Option<usize>,
) -> FeaturedGraph {
    let n = n.max(1);
    let p = edge_prob.clamp(0.0, 1.0);
    let features: Vec<FeatureVector> = (0..n).map(|_| (0..d).map(|_| rng.gen_bool(0.5)).collect()).collect();
    let mut edges = BTreeSet::new();
    match mode {
        Mode::Directed => {
            for u in 0..n {
                let mut row: Vec<usize> = (0..n).filter(|_| rng.gen_bool(p)).collect();
                if let Some(cap) = max_outdeg {
                    if row.len() > cap {
                        row.shuffle(rng);
                        row.truncate(cap);
                    }
                }
                edges.extend(row.into_iter().map(|v| (u, v)));
            }
        }
        Mode::Undirected => {
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for u in 0..n {
                for v in u..n {
                    if rng.gen_bool(p) {
                        pairs.push((u, v));
                    }
                }
            }
            if let Some(cap) = max_outdeg {
                pairs.shuffle(rng);
                let mut deg = vec![0usize; n];
                pairs.retain(|&(u, v)| {
                    let ok = if u == v { deg[u] < cap } else { deg[u] < cap && deg[v] < cap };
                    if ok {
                        deg[u] += 1;
                        if u != v {
                            deg[v] += 1;
                        }
                    }
                    ok
                });
            }
            for (u, v) in pairs {
                edges.insert((u, v));
                edges.insert((v, u));
            }
        }
    }
    FeaturedGraph::new(mode, n, d, features, edges).expect("valid by construction")
}

pub const ISOMORPHISM_CAP: usize = 10;

/// Brute-force isomorphism test with degree and feature pruning.
pub fn isomorphic(g1: &FeaturedGraph, g2: &FeaturedGraph) -> Result<bool> {
    if g1.n() > ISOMORPHISM_CAP || g2.n() > ISOMORPHISM_CAP {
        return Err(Error::CapExceeded(format!("isomorphism limited to n <= {ISOMORPHISM_CAP}")));
    }
    Ok(find_isomorphism(g1, g2).is_some())
}

/// Returns a bijection `pi` with `g2 = pi(g1)`, if one exists.
pub fn find_isomorphism(g1: &FeaturedGraph, g2: &FeaturedGraph) -> Option<Vec<usize>> {
    let n = g1.n();
    if n != g2.n() || g1.mode() != g2.mode() || g1.d() != g2.d() || g1.edge_count() != g2.edge_count() {
        return None;
    }
    let sig = |g: &FeaturedGraph, v: usize| (g.feature(v).clone(), g.out(v).len(), g.inn(v).len(), g.has_edge(v, v));
    let mut s1: Vec<_> = (0..n).map(|v| sig(g1, v)).collect();
    let mut s2: Vec<_> = (0..n).map(|v| sig(g2, v)).collect();
    let (a, b) = (s1.clone(), s2.clone());
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return None;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        i: usize,
        g1: &FeaturedGraph,
        g2: &FeaturedGraph,
        a: &[(FeatureVector, usize, usize, bool)],
        b: &[(FeatureVector, usize, usize, bool)],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = g1.n();
        if i == n {
            return true;
        }
        for cand in 0..n {
            if used[cand] || a[i] != b[cand] {
                continue;
            }
            let ok = (0..i).all(|j| {
                g1.has_edge(i, j) == g2.has_edge(cand, map[j]) && g1.has_edge(j, i) == g2.has_edge(map[j], cand)
            });
            if !ok {
                continue;
            }
            map[i] = cand;
            used[cand] = true;
            if rec(i + 1, g1, g2, a, b, map, used) {
                return true;
            }
            used[cand] = false;
        }
        false
    }
    if rec(0, g1, g2, &a, &b, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

/// Serialises a graph in canonical FGR text.
pub fn write_graph(g: &FeaturedGraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "fgr 1");
    let _ = writeln!(s, "mode {}", g.mode().as_str());
    let _ = writeln!(s, "n {}", g.n());
    let _ = writeln!(s, "d {}", g.d());
    if g.d() > 0 {
        for v in 0..g.n() {
            let bits: String = g.feature(v).iter().map(|&b| if b { '1' } else { '0' }).collect();
            let _ = writeln!(s, "f {v} {bits}");
        }
    }
    for (u, v) in g.edges() {
        if g.mode() == Mode::Undirected && u > v {
            continue;
        }
        let _ = writeln!(s, "e {u} {v}");
    }
    s
}

/// Parses FGR text.
pub fn read_graph(text: &str) -> Result<FeaturedGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let mut header = |key: &str| -> Result<(usize, String)> {
        let (ln, l) = lines.next().ok_or_else(|| perr(0, &format!("missing `{key}` header")))?;
        let mut it = l.split_whitespace();
        if it.next() != Some(key) {
            return Err(perr(ln, &format!("expected `{key}` header")));
        }
        let val = it.next().ok_or_else(|| perr(ln, &format!("`{key}` needs a value")))?;
        if it.next().is_some() {
            return Err(perr(ln, "trailing tokens in header"));
        }
        Ok((ln, val.to_string()))
    };
    let (ln, version) = header("fgr")?;
    if version != "1" {
        return Err(perr(ln, "unsupported fgr version"));
    }
    let (ln, mode) = header("mode")?;
    let mode = match mode.as_str() {
        "directed" => Mode::Directed,
        "undirected" => Mode::Undirected,
        _ => return Err(perr(ln, "mode must be directed or undirected")),
    };
    let (ln, n) = header("n")?;
    let n: usize = n.parse().map_err(|_| perr(ln, "bad vertex count"))?;
    if n == 0 {
        return Err(perr(ln, "graph needs at least one vertex"));
    }
    let (ln, d) = header("d")?;
    let d: usize = d.parse().map_err(|_| perr(ln, "bad feature dimension"))?;
    let mut features: Vec<Option<FeatureVector>> = vec![None; n];
    if d == 0 {
        features.iter_mut().for_each(|f| *f = Some(Vec::new()));
    }
    let mut edges = BTreeSet::new();
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["f", v, bits] => {
                if d == 0 {
                    return Err(perr(ln, "feature line in a d = 0 graph"));
                }
                let v: usize = v.parse().map_err(|_| perr(ln, "bad vertex"))?;
                if v >= n {
                    return Err(perr(ln, "feature for out-of-range vertex"));
                }
                if bits.len() != d {
                    return Err(perr(ln, "feature length mismatch"));
                }
                let fv: Option<FeatureVector> = bits
                    .chars()
                    .map(|ch| match ch {
                        '0' => Some(false),
                        '1' => Some(true),
                        _ => None,
                    })
                    .collect();
                let fv = fv.ok_or_else(|| perr(ln, "feature bits must be 0/1"))?;
                if features[v].replace(fv).is_some() {
                    return Err(perr(ln, "duplicate feature line"));
                }
            }
            ["e", u, v] => {
                let u: usize = u.parse().map_err(|_| perr(ln, "bad vertex"))?;
                let v: usize = v.parse().map_err(|_| perr(ln, "bad vertex"))?;
                if u >= n || v >= n {
                    return Err(perr(ln, "out-of-range edge"));
                }
                match mode {
                    Mode::Directed => {
                        if !edges.insert((u, v)) {
                            return Err(perr(ln, "duplicate edge"));
                        }
                    }
                    Mode::Undirected => {
                        if edges.contains(&(u, v)) || edges.contains(&(v, u)) {
                            return Err(perr(ln, "duplicate edge (undirected pairs are listed once)"));
                        }
                        edges.insert((u, v));
                        edges.insert((v, u));
                    }
                }
            }
            _ => return Err(perr(ln, "unrecognised line")),
        }
    }
    let features: Option<Vec<FeatureVector>> = features.into_iter().collect();
    let features = features.ok_or_else(|| perr(0, "missing feature line for some vertex"))?;
    FeaturedGraph::new(mode, n, d, features, edges)
}
