//! Conjugate sequences, Gale–Ryser feasibility and the order functional.

use num::bigint::BigUint;
use num::{One, Zero};
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type IntSequence = Vec<BigUint>;

pub fn seq(values: &[u64]) -> IntSequence {
    values.iter().map(|&v| BigUint::from(v)).collect()
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `result[i-1] = |{j : a[j] >= i}|` for `i = 1..=n`.
pub fn conjugate(a: &[BigUint]) -> IntSequence {
    let n = a.len();
    (1..=n)
        .map(|i| {
            let i = BigUint::from(i);
            BigUint::from(a.iter().filter(|x| **x >= i).count())
        })
        .collect()
}

fn is_non_increasing(a: &[BigUint]) -> bool {
    a.windows(2).all(|w| w[0] >= w[1])
}

/// Gale–Ryser test for an n×n binary matrix with row sums `r` and column
/// sums `c`. Rows that are not sorted are sorted (with a warning).
pub fn gale_ryser_feasible(r: &[BigUint], c: &[BigUint]) -> Result<bool> {
    if r.len() != c.len() {
        return Err(Error::DimensionMismatch(format!(
            "row sequence has length {}, column sequence {}",
            r.len(),
            c.len()
        )));
    }
    let mut r = r.to_vec();
    if !is_non_increasing(&r) {
        log::warn!("gale_ryser_feasible: row sums not non-increasing, sorting");
        r.sort_by(|a, b| b.cmp(a));
    }
    let sr: BigUint = r.iter().sum();
    let sc: BigUint = c.iter().sum();
    if sr != sc {
        return Ok(false);
    }
    let cc = conjugate(c);
    let (mut pr, mut pc) = (BigUint::zero(), BigUint::zero());
    for (ri, ci) in r.iter().zip(cc.iter()) {
        pr += ri;
        pc += ci;
        if pr > pc {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Σ a_i · a'_{n+1-i}` for a non-increasing sequence.
pub fn order_functional(a: &[BigUint]) -> Result<BigUint> {
    if !is_non_increasing(a) {
        return Err(Error::Precondition("order functional needs a non-increasing sequence".into()));
    }
    let ac = conjugate(a);
    let n = a.len();
    Ok((0..n).map(|i| &a[i] * &ac[n - 1 - i]).sum())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceLemmaReport {
    pub n: usize,
    pub sequences: usize,
    pub bound: BigUint,
    pub equality_witnesses: Vec<IntSequence>,
    pub violations: Vec<IntSequence>,
}

impl SequenceLemmaReport {
    pub fn ok(&self) -> bool {
        let staircase: IntSequence = (0..self.n as u64).rev().map(BigUint::from).collect();
        self.violations.is_empty() && self.equality_witnesses == vec![staircase]
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let fmt = |a: &IntSequence| a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let _ = writeln!(s, "sequence-lemma n={}", self.n);
        let _ = writeln!(s, "  sequences checked: {}", self.sequences);
        let _ = writeln!(s, "  lower bound binomial(n,3): {}", self.bound);
        for w in &self.equality_witnesses {
            let _ = writeln!(s, "  equality at: ({})", fmt(w));
        }
        let _ = writeln!(s, "  violations: {}", self.violations.len());
        for v in self.violations.iter().take(5) {
            let _ = writeln!(s, "    ({})", fmt(v));
        }
        s
    }
}

pub const SEQUENCE_LEMMA_CAP: usize = 6;

/// Enumerates non-increasing sequences of length `n` with entries at most
/// `n` summing to C(n,2) and checks the order functional against C(n,3).
pub fn verify_sequence_lemma(n: usize) -> Result<SequenceLemmaReport> {
    if n == 0 || n > SEQUENCE_LEMMA_CAP {
        return Err(Error::CapExceeded(format!("sequence lemma checked for 1 <= n <= {SEQUENCE_LEMMA_CAP}")));
    }
    let total = n * (n - 1) / 2;
    let bound = binomial(n as u64, 3);
    let staircase: IntSequence = (0..n as u64).rev().map(BigUint::from).collect();
    let mut report = SequenceLemmaReport {
        n,
        sequences: 0,
        bound: bound.clone(),
        equality_witnesses: Vec::new(),
        violations: Vec::new(),
    };
    let mut cur = Vec::with_capacity(n);
    fn rec(
        n: usize,
        remaining: usize,
        max: usize,
        cur: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if cur.len() == n {
            if remaining == 0 {
                visit(cur);
            }
            return;
        }
        let slots = n - cur.len();
        if remaining > slots * max {
            return;
        }
        for x in (0..=max.min(remaining)).rev() {
            cur.push(x);
            rec(n, remaining - x, x, cur, visit);
            cur.pop();
        }
    }
    let mut visit = |a: &[usize]| {
        let a: IntSequence = a.iter().map(|&x| BigUint::from(x)).collect();
        report.sequences += 1;
        let f = order_functional(&a).expect("sorted by construction");
        if f < bound || (f == bound) != (a == staircase) {
            report.violations.push(a.clone());
        }
        if f == bound {
            report.equality_witnesses.push(a);
        }
    };
    rec(n, total, total.min(n), &mut cur, &mut visit);
    Ok(report)
}
