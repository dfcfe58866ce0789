//! Exhaustive enumeration of Pauli assignments under parity constraints.
//!
//! Each qubit contributes two symplectic bits. Allowed-letter sets that are affine over
//! GF(2) become linear equations; three-letter sets are not affine and are branched on,
//! with every candidate value tested against the current echelon system first. Leaves
//! enumerate the remaining free bits.

use crate::lattice::StabKind;
use crate::pauli::{Letter, LetterSet};

/// Parity constraint: the number of `vars` carrying a letter detected by `kind` has parity `parity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub kind: StabKind,
    pub vars: Vec<usize>,
    pub parity: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Problem {
    pub domains: Vec<LetterSet>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumeration {
    Complete(Vec<Vec<Letter>>),
    Inconclusive { explored: u64 },
}

impl Enumeration {
    pub fn solutions(&self) -> Option<&[Vec<Letter>]> {
        match self {
            Enumeration::Complete(s) => Some(s),
            Enumeration::Inconclusive { .. } => None,
        }
    }
}

const NONE: u32 = u32::MAX;

struct System {
    nv: usize,
    words: usize,
    rows: Vec<Vec<u64>>,
    pivot_col: Vec<usize>,
    piv: Vec<u32>,
}

impl System {
    fn new(nv: usize) -> Self {
        System { nv, words: (nv + 1).div_ceil(64), rows: Vec::new(), pivot_col: Vec::new(), piv: vec![NONE; nv] }
    }

    fn blank(&self) -> Vec<u64> {
        vec![0; self.words]
    }

    fn row(&self, bits: &[usize], rhs: bool) -> Vec<u64> {
        let mut r = self.blank();
        for &b in bits {
            r[b / 64] ^= 1 << (b % 64);
        }
        if rhs {
            r[self.nv / 64] ^= 1 << (self.nv % 64);
        }
        r
    }

    fn rhs(&self, r: &[u64]) -> bool {
        r[self.nv / 64] >> (self.nv % 64) & 1 == 1
    }

    /// Reduces `r` until its lowest variable bit is not a pivot; returns that bit.
    fn reduce(&self, r: &mut [u64]) -> Option<usize> {
        let mut w = 0;
        while w < self.words {
            let mut word = r[w];
            if w == self.nv / 64 {
                word &= (1u64 << (self.nv % 64)) - 1;
            }
            if word == 0 {
                w += 1;
                continue;
            }
            let c = w * 64 + word.trailing_zeros() as usize;
            if c >= self.nv {
                return None;
            }
            let p = self.piv[c];
            if p == NONE {
                return Some(c);
            }
            let src = &self.rows[p as usize];
            for k in w..self.words {
                r[k] ^= src[k];
            }
        }
        None
    }

    /// Adds a row; false when it contradicts the system.
    fn add(&mut self, mut r: Vec<u64>) -> bool {
        match self.reduce(&mut r) {
            None => !self.rhs(&r),
            Some(c) => {
                self.piv[c] = self.rows.len() as u32;
                self.rows.push(r);
                self.pivot_col.push(c);
                true
            }
        }
    }

    fn mark(&self) -> usize {
        self.rows.len()
    }

    fn undo(&mut self, mark: usize) {
        while self.rows.len() > mark {
            self.rows.pop();
            let c = self.pivot_col.pop().unwrap();
            self.piv[c] = NONE;
        }
    }

    fn fix_qubit(&mut self, q: usize, x: bool, z: bool) -> bool {
        let a = self.row(&[2 * q], x);
        let b = self.row(&[2 * q + 1], z);
        self.add(a) && self.add(b)
    }

    fn feasible(&mut self, q: usize, x: bool, z: bool) -> bool {
        let m = self.mark();
        let ok = self.fix_qubit(q, x, z);
        self.undo(m);
        ok
    }

    fn free_cols(&self) -> Vec<usize> {
        (0..self.nv).filter(|&c| self.piv[c] == NONE).collect()
    }

    fn solve(&self, free: &[usize], mask: u64) -> Vec<u64> {
        let mut vals = self.blank();
        for (i, &c) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                vals[c / 64] |= 1 << (c % 64);
            }
        }
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.pivot_col[i]));
        for i in order {
            let row = &self.rows[i];
            let mut parity = self.rhs(row);
            for k in 0..self.words {
                parity ^= (row[k] & vals[k]).count_ones() % 2 == 1;
            }
            if parity {
                let c = self.pivot_col[i];
                vals[c / 64] |= 1 << (c % 64);
            }
        }
        vals
    }
}

fn points(s: LetterSet) -> Vec<(bool, bool)> {
    s.letters().map(|l| l.bits()).collect()
}

/// Linear equations (as (bits, rhs) over local x=0, z=1) describing an affine letter set.
fn affine_equations(s: LetterSet) -> Option<Vec<(Vec<usize>, bool)>> {
    let p = points(s);
    match p.len() {
        1 => Some(vec![(vec![0], p[0].0), (vec![1], p[0].1)]),
        2 => {
            let d = (p[0].0 ^ p[1].0, p[0].1 ^ p[1].1);
            Some(match d {
                (true, false) => vec![(vec![1], p[0].1)],
                (false, true) => vec![(vec![0], p[0].0)],
                _ => vec![(vec![0, 1], p[0].0 ^ p[0].1)],
            })
        }
        4 => Some(vec![]),
        _ => None,
    }
}

struct Search<'a> {
    problem: &'a Problem,
    sys: System,
    pending: Vec<usize>,
    done: Vec<bool>,
    budget: u64,
    explored: u64,
    out: Vec<Vec<Letter>>,
    exhausted: bool,
}

impl Search<'_> {
    fn release(&mut self, mark: usize, fixed: &[usize]) {
        self.sys.undo(mark);
        for &i in fixed {
            self.done[i] = false;
        }
    }

    fn run(&mut self) {
        if self.exhausted {
            return;
        }
        self.explored += 1;
        if self.explored > self.budget {
            self.exhausted = true;
            return;
        }
        let mark = self.sys.mark();
        let mut fixed = Vec::new();
        // propagate forced three-letter qubits to a fixpoint, then branch on the tightest
        let choice = loop {
            let mut best: Option<(usize, Vec<(bool, bool)>)> = None;
            let mut progress = false;
            for i in 0..self.pending.len() {
                if self.done[i] {
                    continue;
                }
                let q = self.pending[i];
                let opts: Vec<(bool, bool)> = points(self.problem.domains[q])
                    .into_iter()
                    .filter(|&(x, z)| self.sys.feasible(q, x, z))
                    .collect();
                match opts.len() {
                    0 => {
                        self.release(mark, &fixed);
                        return;
                    }
                    1 => {
                        self.sys.fix_qubit(q, opts[0].0, opts[0].1);
                        self.done[i] = true;
                        fixed.push(i);
                        progress = true;
                    }
                    _ => {
                        if best.as_ref().is_none_or(|(_, b)| opts.len() < b.len()) {
                            best = Some((i, opts));
                        }
                    }
                }
            }
            if !progress {
                break best;
            }
        };
        match choice {
            None => self.leaf(),
            Some((i, opts)) => {
                let q = self.pending[i];
                self.done[i] = true;
                for (x, z) in opts {
                    let m = self.sys.mark();
                    if self.sys.fix_qubit(q, x, z) {
                        self.run();
                    }
                    self.sys.undo(m);
                    if self.exhausted {
                        break;
                    }
                }
                self.done[i] = false;
            }
        }
        self.release(mark, &fixed);
    }

    fn leaf(&mut self) {
        let free = self.sys.free_cols();
        if free.len() >= 40 {
            self.exhausted = true;
            return;
        }
        let count = 1u64 << free.len();
        if self.explored + count > self.budget {
            self.exhausted = true;
            return;
        }
        self.explored += count;
        let n = self.problem.domains.len();
        for mask in 0..count {
            let vals = self.sys.solve(&free, mask);
            let bit = |b: usize| vals[b / 64] >> (b % 64) & 1 == 1;
            self.out.push((0..n).map(|q| Letter::from_bits(bit(2 * q), bit(2 * q + 1))).collect());
        }
    }
}

/// Enumerates every assignment of letters (one per domain) satisfying all checks.
/// `budget` bounds search nodes plus emitted solutions.
pub fn enumerate(problem: &Problem, budget: u64) -> Enumeration {
    let n = problem.domains.len();
    let mut sys = System::new(2 * n);
    let mut pending = Vec::new();
    for (q, &d) in problem.domains.iter().enumerate() {
        if d.is_empty() {
            return Enumeration::Complete(vec![]);
        }
        match affine_equations(d) {
            Some(eqs) => {
                for (bits, rhs) in eqs {
                    let global: Vec<usize> = bits.iter().map(|b| 2 * q + b).collect();
                    let r = sys.row(&global, rhs);
                    if !sys.add(r) {
                        return Enumeration::Complete(vec![]);
                    }
                }
            }
            None => pending.push(q),
        }
    }
    for c in &problem.checks {
        let off = match c.kind {
            StabKind::X => 1,
            StabKind::Z => 0,
        };
        let bits: Vec<usize> = c.vars.iter().map(|&q| 2 * q + off).collect();
        let r = sys.row(&bits, c.parity);
        if !sys.add(r) {
            return Enumeration::Complete(vec![]);
        }
    }
    let done = vec![false; pending.len()];
    let mut s = Search { problem, sys, pending, done, budget, explored: 0, out: Vec::new(), exhausted: false };
    s.run();
    if s.exhausted {
        Enumeration::Inconclusive { explored: s.explored }
    } else {
        let mut out = s.out;
        out.sort();
        Enumeration::Complete(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(p: &Problem) -> Vec<Vec<Letter>> {
        let n = p.domains.len();
        let mut out = Vec::new();
        for code in 0..4usize.pow(n as u32) {
            let ls: Vec<Letter> = (0..n).map(|q| Letter::ALL[code / 4usize.pow(q as u32) % 4]).collect();
            if ls.iter().zip(&p.domains).any(|(l, d)| !d.contains(*l)) {
                continue;
            }
            let ok = p.checks.iter().all(|c| {
                c.vars.iter().filter(|&&q| c.kind.detects(ls[q])).count() % 2 == c.parity as usize
            });
            if ok {
                out.push(ls);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn single_string() {
        // three X-capable qubits in a row with checks between neighbours
        let d = LetterSet::parse("IX").unwrap();
        let p = Problem {
            domains: vec![d; 3],
            checks: vec![
                Check { kind: StabKind::Z, vars: vec![0], parity: true },
                Check { kind: StabKind::Z, vars: vec![0, 1], parity: false },
                Check { kind: StabKind::Z, vars: vec![1, 2], parity: false },
            ],
        };
        let s = enumerate(&p, 1000);
        assert_eq!(s.solutions().unwrap(), &[vec![Letter::X; 3]]);
    }

    #[test]
    fn budget_exhaustion() {
        let p = Problem { domains: vec![LetterSet::FULL; 12], checks: vec![] };
        assert!(matches!(enumerate(&p, 100), Enumeration::Inconclusive { .. }));
    }

    fn arb_domain() -> impl Strategy<Value = LetterSet> {
        (1u8..16).prop_map(|m| LetterSet::from_letters(Letter::ALL.into_iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, l)| l)))
    }

    fn arb_problem() -> impl Strategy<Value = Problem> {
        (2usize..6).prop_flat_map(|n| {
            let checks = proptest::collection::vec(
                (proptest::bool::ANY, proptest::collection::vec(0..n, 1..4), proptest::bool::ANY),
                0..6,
            );
            (proptest::collection::vec(arb_domain(), n), checks).prop_map(|(domains, cs)| Problem {
                domains,
                checks: cs
                    .into_iter()
                    .map(|(k, mut vars, parity)| {
                        vars.sort();
                        vars.dedup();
                        Check { kind: if k { StabKind::X } else { StabKind::Z }, vars, parity }
                    })
                    .collect(),
            })
        })
    }

    proptest! {
        #[test]
        fn matches_brute_force(p in arb_problem()) {
            let got = enumerate(&p, 1_000_000);
            prop_assert_eq!(got.solutions().unwrap().to_vec(), brute(&p));
        }
    }
}
