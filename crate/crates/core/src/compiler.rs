//! Translation of GML∃ classifiers into ACR-GNNs with bounded aggregation.
//!
//! Every subformula owns one dimension holding its 0/1 truth value. With
//! 0/1 inputs, summing the `k`-restriction of the neighbour multiset keeps
//! the `≥ k` test intact: `Σ_x min(mult_x, k) ≥ k` holds iff some vector
//! occurs `k` times or the plain total is at least `k`, i.e. iff at least
//! `k` neighbours satisfy the body.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gml::{stats, Formula, Node};
use crate::gnn::{rat, AcrGnn, Activation, Aggregation, Classifier, Direction, LayerBuilder, Src};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Entry {
    Top,
    Prop(usize),
    Not(usize),
    And(usize, usize),
    Diamond(usize, usize),
    Global(usize, usize),
}

/// Distinct subformulas in dependency order; the input formula is last.
#[derive(Debug, Clone)]
pub struct SubformulaTable {
    entries: Vec<Entry>,
    formulas: Vec<Formula>,
}

impl SubformulaTable {
    pub fn new(f: &Formula) -> Self {
        let mut table = SubformulaTable { entries: Vec::new(), formulas: Vec::new() };
        let mut index: HashMap<Entry, usize> = HashMap::new();
        let mut by_ptr: HashMap<*const Node, usize> = HashMap::new();
        table.add(f, &mut index, &mut by_ptr);
        table
    }

    fn add(&mut self, f: &Formula, index: &mut HashMap<Entry, usize>, by_ptr: &mut HashMap<*const Node, usize>) -> usize {
        let ptr: *const Node = f.node();
        if let Some(&i) = by_ptr.get(&ptr) {
            return i;
        }
        let e = match f.node() {
            Node::Top => Entry::Top,
            Node::Prop(i) => Entry::Prop(*i),
            Node::Not(a) => Entry::Not(self.add(a, index, by_ptr)),
            Node::And(a, b) => {
                let x = self.add(a, index, by_ptr);
                Entry::And(x, self.add(b, index, by_ptr))
            }
            Node::Diamond(k, a) => Entry::Diamond(*k, self.add(a, index, by_ptr)),
            Node::GlobalExists(k, a) => Entry::Global(*k, self.add(a, index, by_ptr)),
        };
        let i = *index.entry(e.clone()).or_insert_with(|| {
            self.entries.push(e);
            self.formulas.push(f.clone());
            self.entries.len() - 1
        });
        by_ptr.insert(ptr, i);
        i
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
    pub fn formula(&self, i: usize) -> &Formula {
        &self.formulas[i]
    }
    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.formulas.iter().position(|g| g == f)
    }
    pub fn root(&self) -> usize {
        self.entries.len() - 1
    }
}

/// Compiles `φ` for graphs with feature dimension `d`.
///
/// Layer 1 loads features and `⊤`; each further layer recomputes every
/// dimension from the previous layer, so after `1 + height(φ)` layers all
/// dimensions are exact. Aggregation is `BoundedSum(k)` with `k` the
/// largest `◇` grading (1 if none), readout is `SumAll`, activations clamp
/// to `[0,1]`, and the classifier accepts iff the root dimension is `≥ 1`.
pub fn compile(f: &Formula, d: usize) -> Result<AcrGnn> {
    if f.max_prop() > d {
        return Err(Error::InvalidParameter(format!("formula uses p{} but d = {d}", f.max_prop())));
    }
    let table = SubformulaTable::new(f);
    let m = table.len();
    let k = stats(f).max_grading.max(1);
    let mut first = LayerBuilder::new(d);
    for e in &table.entries {
        match e {
            Entry::Top => first.channel(&[], rat(1)),
            Entry::Prop(i) => first.channel(&[(Src::Own, i - 1, rat(1))], rat(0)),
            _ => first.channel(&[], rat(0)),
        };
    }
    let mut layers = vec![first.build(Activation::Clamp01, Aggregation::BoundedSum(k), Aggregation::SumAll)];
    for _ in 0..f.height() {
        let mut lb = LayerBuilder::new(m);
        for (j, e) in table.entries.iter().enumerate() {
            match *e {
                Entry::Top => lb.channel(&[], rat(1)),
                Entry::Prop(_) => lb.copy(j),
                Entry::Not(a) => lb.channel(&[(Src::Own, a, rat(-1))], rat(1)),
                Entry::And(a, b) => lb.channel(&[(Src::Own, a, rat(1)), (Src::Own, b, rat(1))], rat(-1)),
                Entry::Diamond(g, a) => lb.channel(&[(Src::Agg, a, rat(1))], rat(1 - g as i64)),
                Entry::Global(g, a) => lb.channel(&[(Src::Read, a, rat(1))], rat(1 - g as i64)),
            };
        }
        layers.push(lb.build(Activation::Clamp01, Aggregation::BoundedSum(k), Aggregation::SumAll));
    }
    let mut weights = vec![rat(0); m];
    weights[table.root()] = rat(1);
    AcrGnn::new(d, layers, Classifier { weights, threshold: rat(1), direction: Direction::Ge })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gml::{evaluate_all, parse};
    use crate::gnn::{is_simple, run_all};
    use crate::graph::{make_strict_linear_order, FeaturedGraph};

    #[test]
    fn table_shares_subformulas() {
        let t = SubformulaTable::new(&parse("(<>=1 p1 & !<>=1 p1)").unwrap());
        assert_eq!(t.len(), 4);
        assert_eq!(t.formula(t.root()), &parse("(<>=1 p1 & !<>=1 p1)").unwrap());
        assert_eq!(t.index_of(&parse("p1").unwrap()), Some(0));
    }

    #[test]
    fn compile_examples() {
        let g = FeaturedGraph::new(crate::graph::Mode::Directed, 3, 1, vec![vec![true], vec![false], vec![true]], [(0, 1)]).unwrap();
        let net = compile(&parse("p1").unwrap(), 1).unwrap();
        assert_eq!(run_all(&net, &g).unwrap(), vec![true, false, true]);
        assert!(!is_simple(&net));
        let o = make_strict_linear_order(3).unwrap();
        let net = compile(&parse("<>=1 T").unwrap(), 0).unwrap();
        assert_eq!(run_all(&net, &o).unwrap(), vec![true, true, false]);
        let net = compile(&parse("E>=3 T").unwrap(), 0).unwrap();
        assert_eq!(run_all(&net, &o).unwrap(), vec![true; 3]);
        assert!(compile(&parse("p2").unwrap(), 1).is_err());
    }

    #[test]
    fn compile_matches_evaluate_small() {
        let g = crate::graph::random_graph(7, 2, 0.4, crate::graph::Mode::Directed, 5, None);
        for seed in 0..40 {
            let f = crate::gml::random_formula(3, 2, 3, true, seed);
            let net = compile(&f, 2).unwrap();
            assert_eq!(net.num_layers(), 1 + f.height());
            assert_eq!(run_all(&net, &g).unwrap(), evaluate_all(&f, &g).unwrap(), "{f}");
        }
    }
}
