//! Graded modal logic with global counting: syntax, parser, printer and
//! evaluator.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::FeaturedGraph;

#[derive(Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Top,
    /// 1-based proposition index.
    Prop(usize),
    Not(Formula),
    And(Formula, Formula),
    /// At least `k` out-neighbours satisfy the body.
    Diamond(usize, Formula),
    /// At least `k` vertices of the graph satisfy the body.
    GlobalExists(usize, Formula),
}

/// Shared formula DAG; clones are cheap and equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula(Arc<Node>);

impl Formula {
    pub fn top() -> Self {
        Formula(Arc::new(Node::Top))
    }
    pub fn bottom() -> Self {
        Formula::not(Formula::top())
    }
    pub fn prop(i: usize) -> Self {
        Formula(Arc::new(Node::Prop(i)))
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula(Arc::new(Node::Not(f)))
    }
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula(Arc::new(Node::And(a, b)))
    }
    /// Sugar for `¬(¬a ∧ ¬b)`.
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }
    pub fn diamond(k: usize, f: Formula) -> Self {
        assert!(k >= 1, "grading must be at least 1");
        Formula(Arc::new(Node::Diamond(k, f)))
    }
    pub fn global(k: usize, f: Formula) -> Self {
        assert!(k >= 1, "grading must be at least 1");
        Formula(Arc::new(Node::GlobalExists(k, f)))
    }

    /// Left fold of a conjunction; `⊤` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts.into_iter().reduce(Formula::and).unwrap_or_else(Formula::top)
    }
    /// Left fold of a disjunction; `¬⊤` when empty.
    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts.into_iter().reduce(Formula::or).unwrap_or_else(Formula::bottom)
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    fn key(&self) -> *const Node {
        Arc::as_ptr(&self.0)
    }

    /// Recognises the `¬(¬a ∧ ¬b)` shape.
    pub fn as_or(&self) -> Option<(&Formula, &Formula)> {
        if let Node::Not(inner) = self.node() {
            if let Node::And(x, y) = inner.node() {
                if let (Node::Not(a), Node::Not(b)) = (x.node(), y.node()) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn contains_global(&self) -> bool {
        let mut memo = HashMap::new();
        fn rec(f: &Formula, memo: &mut HashMap<*const Node, bool>) -> bool {
            if let Some(&b) = memo.get(&f.key()) {
                return b;
            }
            let r = match f.node() {
                Node::Top | Node::Prop(_) => false,
                Node::Not(a) | Node::Diamond(_, a) => rec(a, memo),
                Node::And(a, b) => rec(a, memo) || rec(b, memo),
                Node::GlobalExists(..) => true,
            };
            memo.insert(f.key(), r);
            r
        }
        rec(self, &mut memo)
    }

    /// Largest proposition index, 0 if none.
    pub fn max_prop(&self) -> usize {
        let mut memo = HashMap::new();
        fn rec(f: &Formula, memo: &mut HashMap<*const Node, usize>) -> usize {
            if let Some(&b) = memo.get(&f.key()) {
                return b;
            }
            let r = match f.node() {
                Node::Top => 0,
                Node::Prop(i) => *i,
                Node::Not(a) | Node::Diamond(_, a) | Node::GlobalExists(_, a) => rec(a, memo),
                Node::And(a, b) => rec(a, memo).max(rec(b, memo)),
            };
            memo.insert(f.key(), r);
            r
        }
        rec(self, &mut memo)
    }

    /// Height of the syntax tree; leaves have height 0.
    pub fn height(&self) -> usize {
        let mut memo = HashMap::new();
        fn rec(f: &Formula, memo: &mut HashMap<*const Node, usize>) -> usize {
            if let Some(&b) = memo.get(&f.key()) {
                return b;
            }
            let r = match f.node() {
                Node::Top | Node::Prop(_) => 0,
                Node::Not(a) | Node::Diamond(_, a) | Node::GlobalExists(_, a) => 1 + rec(a, memo),
                Node::And(a, b) => 1 + rec(a, memo).max(rec(b, memo)),
            };
            memo.insert(f.key(), r);
            r
        }
        rec(self, &mut memo)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(&print(self))
    }
}

/// Fully parenthesised canonical text; the `¬(¬a ∧ ¬b)` shape prints as
/// `(a | b)`.
pub fn print(f: &Formula) -> String {
    let mut s = String::new();
    fn rec(f: &Formula, s: &mut String) {
        if let Some((a, b)) = f.as_or() {
            s.push('(');
            rec(a, s);
            s.push_str(" | ");
            rec(b, s);
            s.push(')');
            return;
        }
        match f.node() {
            Node::Top => s.push('T'),
            Node::Prop(i) => {
                s.push('p');
                s.push_str(&i.to_string());
            }
            Node::Not(a) => {
                s.push('!');
                rec(a, s);
            }
            Node::And(a, b) => {
                s.push('(');
                rec(a, s);
                s.push_str(" & ");
                rec(b, s);
                s.push(')');
            }
            Node::Diamond(k, a) => {
                s.push_str("<>=");
                s.push_str(&k.to_string());
                s.push(' ');
                rec(a, s);
            }
            Node::GlobalExists(k, a) => {
                s.push_str("E>=");
                s.push_str(&k.to_string());
                s.push(' ');
                rec(a, s);
            }
        }
    }
    rec(f, &mut s);
    s
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }
    fn eat(&mut self, lit: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }
    fn number(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse().map_err(|_| Error::Syntax { pos: start, msg: "number too large".into() })
    }
    fn grading(&mut self) -> Result<usize> {
        let at = self.pos;
        let k = self.number()?;
        if k == 0 {
            return Err(Error::Syntax { pos: at, msg: "grading must be at least 1".into() });
        }
        Ok(k)
    }
    fn formula(&mut self) -> Result<Formula> {
        match self.peek() {
            None => self.err("unexpected end of formula"),
            Some(b'T') => {
                self.pos += 1;
                Ok(Formula::top())
            }
            Some(b'p') => {
                self.pos += 1;
                let at = self.pos;
                let i = self.number()?;
                if i == 0 {
                    return Err(Error::Syntax { pos: at, msg: "proposition indices start at 1".into() });
                }
                Ok(Formula::prop(i))
            }
            Some(b'!') => {
                self.pos += 1;
                Ok(Formula::not(self.formula()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.formula()?;
                let op = match self.peek() {
                    Some(b'&') => b'&',
                    Some(b'|') => b'|',
                    _ => return self.err("expected `&` or `|`"),
                };
                self.pos += 1;
                let b = self.formula()?;
                if !self.eat(")") {
                    return self.err("expected `)`");
                }
                Ok(if op == b'&' { Formula::and(a, b) } else { Formula::or(a, b) })
            }
            Some(b'<') => {
                if !self.eat("<>=") {
                    return self.err("expected `<>=`");
                }
                let k = self.grading()?;
                Ok(Formula::diamond(k, self.formula()?))
            }
            Some(b'E') => {
                if !self.eat("E>=") {
                    return self.err("expected `E>=`");
                }
                let k = self.grading()?;
                Ok(Formula::global(k, self.formula()?))
            }
            Some(ch) => self.err(format!("unexpected character `{}`", ch as char)),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let f = p.formula()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// Truth value at every vertex, memoised per shared node.
pub fn evaluate_all(f: &Formula, g: &FeaturedGraph) -> Result<Vec<bool>> {
    let m = f.max_prop();
    if m > g.d() {
        return Err(Error::InvalidParameter(format!("proposition p{m} out of range for d = {}", g.d())));
    }
    let mut memo: HashMap<*const Node, Arc<Vec<bool>>> = HashMap::new();
    fn rec(f: &Formula, g: &FeaturedGraph, memo: &mut HashMap<*const Node, Arc<Vec<bool>>>) -> Arc<Vec<bool>> {
        if let Some(r) = memo.get(&f.key()) {
            return r.clone();
        }
        let n = g.n();
        let r: Vec<bool> = match f.node() {
            Node::Top => vec![true; n],
            Node::Prop(i) => (0..n).map(|v| g.feature(v)[i - 1]).collect(),
            Node::Not(a) => rec(a, g, memo).iter().map(|b| !b).collect(),
            Node::And(a, b) => {
                let x = rec(a, g, memo);
                let y = rec(b, g, memo);
                x.iter().zip(y.iter()).map(|(p, q)| *p && *q).collect()
            }
            Node::Diamond(k, a) => {
                let x = rec(a, g, memo);
                (0..n).map(|v| g.out(v).iter().filter(|&&u| x[u]).count() >= *k).collect()
            }
            Node::GlobalExists(k, a) => {
                let x = rec(a, g, memo);
                vec![x.iter().filter(|&&b| b).count() >= *k; n]
            }
        };
        let r = Arc::new(r);
        memo.insert(f.key(), r.clone());
        r
    }
    Ok(rec(f, g, &mut memo).as_ref().clone())
}

pub fn evaluate(f: &Formula, g: &FeaturedGraph, v: usize) -> Result<bool> {
    g.check_vertex(v)?;
    Ok(evaluate_all(f, g)?[v])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FormulaStats {
    /// Nesting depth of `◇` only.
    pub modal_depth: usize,
    /// Largest `k` in any `◇≥k`, 0 if none.
    pub max_grading: usize,
    pub max_global_grading: usize,
    pub uses_global: bool,
}

pub fn stats(f: &Formula) -> FormulaStats {
    let mut memo = HashMap::new();
    fn rec(f: &Formula, memo: &mut HashMap<*const Node, FormulaStats>) -> FormulaStats {
        if let Some(s) = memo.get(&f.key()) {
            return *s;
        }
        let s = match f.node() {
            Node::Top | Node::Prop(_) => FormulaStats::default(),
            Node::Not(a) => rec(a, memo),
            Node::And(a, b) => {
                let (x, y) = (rec(a, memo), rec(b, memo));
                FormulaStats {
                    modal_depth: x.modal_depth.max(y.modal_depth),
                    max_grading: x.max_grading.max(y.max_grading),
                    max_global_grading: x.max_global_grading.max(y.max_global_grading),
                    uses_global: x.uses_global || y.uses_global,
                }
            }
            Node::Diamond(k, a) => {
                let x = rec(a, memo);
                FormulaStats { modal_depth: x.modal_depth + 1, max_grading: x.max_grading.max(*k), ..x }
            }
            Node::GlobalExists(k, a) => {
                let x = rec(a, memo);
                FormulaStats { max_global_grading: x.max_global_grading.max(*k), uses_global: true, ..x }
            }
        };
        memo.insert(f.key(), s);
        s
    }
    rec(f, &mut memo)
}

/// `¬∃≥1 ◇≥(c+1) ⊤`.
pub fn build_degree_bound_formula(c: usize) -> Formula {
    Formula::not(Formula::global(1, Formula::diamond(c + 1, Formula::top())))
}

/// Reproducible random formula. `depth` bounds the nesting of `◇` and
/// `∃` together; gradings lie in `1..=max_grading`; propositions in
/// `1..=d`.
pub fn random_formula(depth: usize, d: usize, max_grading: usize, allow_global: bool, seed: u64) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_formula_with(&mut rng, depth, d, max_grading, allow_global)
}

pub fn random_formula_with<R: Rng>(rng: &mut R, depth: usize, d: usize, max_grading: usize, allow_global: bool) -> Formula {
    fn rec<R: Rng>(rng: &mut R, depth: usize, d: usize, kmax: usize, global: bool, budget: &mut usize) -> Formula {
        let leaf = |rng: &mut R| {
            if d == 0 || rng.gen_bool(0.25) {
                Formula::top()
            } else {
                Formula::prop(rng.gen_range(1..=d))
            }
        };
        if *budget == 0 {
            return leaf(rng);
        }
        *budget -= 1;
        let modal = depth > 0 && kmax > 0;
        let choices = if modal { if global { 6 } else { 5 } } else { 4 };
        match rng.gen_range(0..choices) {
            0 => leaf(rng),
            1 => Formula::not(rec(rng, depth, d, kmax, global, budget)),
            2 => {
                let a = rec(rng, depth, d, kmax, global, budget);
                Formula::and(a, rec(rng, depth, d, kmax, global, budget))
            }
            3 => {
                let a = rec(rng, depth, d, kmax, global, budget);
                Formula::or(a, rec(rng, depth, d, kmax, global, budget))
            }
            4 => {
                let k = rng.gen_range(1..=kmax);
                Formula::diamond(k, rec(rng, depth - 1, d, kmax, global, budget))
            }
            _ => {
                let k = rng.gen_range(1..=kmax);
                Formula::global(k, rec(rng, depth - 1, d, kmax, global, budget))
            }
        }
    }
    let mut budget = 12;
    rec(rng, depth, d, max_grading, allow_global, &mut budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::make_strict_linear_order;

    #[test]
    fn parse_examples() {
        assert_eq!(parse("<>=2 T").unwrap(), Formula::diamond(2, Formula::top()));
        assert_eq!(parse("(p1 & !p2)").unwrap(), Formula::and(Formula::prop(1), Formula::not(Formula::prop(2))));
        assert_eq!(parse("E>=3 <>=1 p1").unwrap(), Formula::global(3, Formula::diamond(1, Formula::prop(1))));
        assert!(matches!(parse("<>=0 T"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("(p1 & p2"), Err(Error::Syntax { pos: 8, .. })));
        let f = parse(" ( p1 |<>=2 !T ) ").unwrap();
        assert_eq!(print(&f), "(p1 | <>=2 !T)");
        assert_eq!(parse(&print(&f)).unwrap(), f);
    }

    #[test]
    fn evaluate_examples() {
        let o = make_strict_linear_order(3).unwrap();
        assert!(evaluate(&parse("<>=2 T").unwrap(), &o, 0).unwrap());
        assert!(!evaluate(&parse("<>=1 T").unwrap(), &o, 2).unwrap());
        assert!(evaluate(&parse("E>=3 T").unwrap(), &o, 1).unwrap());
        assert!(evaluate(&parse("p1").unwrap(), &o, 0).is_err());
    }

    #[test]
    fn stats_examples() {
        let s = stats(&parse("<>=2 <>=5 p1").unwrap());
        assert_eq!((s.modal_depth, s.max_grading), (2, 5));
        assert_eq!(stats(&parse("p1").unwrap()), FormulaStats::default());
        let s = stats(&parse("E>=4 p1").unwrap());
        assert_eq!((s.modal_depth, s.max_global_grading, s.uses_global), (0, 4, true));
    }

    #[test]
    fn degree_bound_examples() {
        let o4 = make_strict_linear_order(4).unwrap();
        assert!(!evaluate(&build_degree_bound_formula(2), &o4, 0).unwrap());
        assert!(evaluate(&build_degree_bound_formula(3), &o4, 0).unwrap());
        let e = FeaturedGraph::directed(3, []).unwrap();
        assert!(evaluate(&build_degree_bound_formula(0), &e, 0).unwrap());
    }

    #[test]
    fn random_formula_examples() {
        assert_eq!(random_formula(3, 2, 3, true, 9), random_formula(3, 2, 3, true, 9));
        for seed in 0..50 {
            let s = stats(&random_formula(0, 2, 3, true, seed));
            assert_eq!((s.max_grading, s.max_global_grading), (0, 0));
            assert!(!random_formula(3, 2, 3, false, seed).contains_global());
        }
    }
}
