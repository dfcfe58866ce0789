//! Exact QMLD and DQMLD oracles, decision variants, and the decision-to-function search.
//!
//! Canonical Pauli order: an error on n qubits is read as the base-4 number
//! `Σ code(q)·4^q` with codes I=0, X=1, Y=2, Z=3. Ties always go to the smaller number.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::caps::Caps;
use crate::compile::CompiledInstance;
use crate::error::{Error, Result};
use crate::formula::{all_assignments, COUNT_CAP};
use crate::gf2::{self, Check, Enumeration, Problem};
use crate::lattice::{RotatedLayout, SyndromeVector};
use crate::noise::{NoiseModel, QubitNoise};
use crate::pauli::{Letter, LetterSet, PauliOperator};
use crate::rational::{format_rational, ExactRational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodingInstance {
    pub layout: RotatedLayout,
    pub noise: NoiseModel,
    pub syndrome: SyndromeVector,
}

impl DecodingInstance {
    pub fn new(layout: RotatedLayout, noise: NoiseModel, syndrome: SyndromeVector) -> Result<Self> {
        if noise.num_qubits() != layout.num_qubits() {
            return Err(Error::Dimension { expected: layout.num_qubits(), found: noise.num_qubits() });
        }
        if let Some(&g) = syndrome.flipped.iter().next_back() {
            if g >= layout.num_generators() {
                return Err(Error::Dimension { expected: layout.num_generators(), found: g + 1 });
            }
        }
        Ok(DecodingInstance { layout, noise, syndrome })
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits()
    }

    fn consistent(&self, e: &PauliOperator) -> Result<bool> {
        Ok(self.layout.syndrome_of(e)? == self.syndrome)
    }
}

impl From<&CompiledInstance> for DecodingInstance {
    fn from(c: &CompiledInstance) -> Self {
        DecodingInstance { layout: c.layout.clone(), noise: c.noise.clone(), syndrome: c.syndrome.clone() }
    }
}

/// Coset probabilities indexed I, X, Y, Z relative to `reference`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    pub reference: PauliOperator,
    pub probabilities: [ExactRational; 4],
    pub class: Letter,
    /// Another class reaches the same maximum.
    pub tie: bool,
}

impl CosetTable {
    pub fn total(&self) -> ExactRational {
        self.probabilities.iter().sum()
    }

    pub fn probability(&self, class: Letter) -> &ExactRational {
        &self.probabilities[class_index(class)]
    }

    fn from_masses(reference: PauliOperator, probabilities: [ExactRational; 4]) -> Self {
        let max = probabilities.iter().max().unwrap().clone();
        let winners: Vec<usize> = (0..4).filter(|&i| probabilities[i] == max).collect();
        CosetTable { reference, class: Letter::ALL[winners[0]], tie: winners.len() > 1, probabilities }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub error: PauliOperator,
    pub probability: ExactRational,
    /// No consistent error has nonzero probability; `error` is still the canonical choice.
    pub zero_probability: bool,
    pub cosets: Option<CosetTable>,
}

pub fn class_index(l: Letter) -> usize {
    match l {
        Letter::I => 0,
        Letter::X => 1,
        Letter::Y => 2,
        Letter::Z => 3,
    }
}

fn letter_code(l: Letter) -> u8 {
    class_index(l) as u8
}

/// Canonical order (see module docs).
pub fn canonical_cmp(a: &PauliOperator, b: &PauliOperator) -> Ordering {
    let qs: BTreeSet<usize> = a.support().keys().chain(b.support().keys()).copied().collect();
    for &q in qs.iter().rev() {
        let o = letter_code(a.get(q)).cmp(&letter_code(b.get(q)));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

// ---------------------------------------------------------------------------
// Dense enumeration

struct HalfTable {
    syndrome: Vec<u64>,
    logical: Vec<u8>,
}

/// Linear maps (syndrome bits, logical bits) tabulated over each half of the qubits.
struct Dense {
    n: usize,
    lo: usize,
    low: HalfTable,
    high: HalfTable,
    target: u64,
}

fn letter_of_code(c: u64) -> Letter {
    Letter::ALL[c as usize]
}

impl Dense {
    fn new(inst: &DecodingInstance, caps: &Caps) -> Result<Self> {
        let n = inst.num_qubits();
        if n > caps.dense_qubits {
            return Err(Error::cap("qubits for dense enumeration", caps.dense_qubits, n));
        }
        let g = inst.layout.num_generators();
        if g > 64 {
            return Err(Error::cap("generators for dense enumeration", 64, g));
        }
        // per qubit and letter: syndrome bits and logical bits
        let mut per: Vec<[(u64, u8); 4]> = vec![[(0, 0); 4]; n];
        for (q, row) in per.iter_mut().enumerate() {
            let (c, r) = inst.layout.coords(q);
            for code in 1..4u64 {
                let l = letter_of_code(code);
                let mut s = 0u64;
                for (gi, k) in inst.layout.generators_of_qubit(q) {
                    if k.detects(l) {
                        s ^= 1 << gi;
                    }
                }
                let (x, z) = l.bits();
                let lx = (r == 0 && x) as u8;
                let lz = (c == 0 && z) as u8;
                row[code as usize] = (s, lx | (lz << 1));
            }
        }
        let lo = n / 2;
        let build = |qs: std::ops::Range<usize>| {
            let m = qs.len();
            let size = 1usize << (2 * m);
            let mut syndrome = vec![0u64; size];
            let mut logical = vec![0u8; size];
            for k in 1..size {
                // extend from k with its top digit removed
                let top = (usize::BITS - 1 - k.leading_zeros()) as usize / 2;
                let digit = (k >> (2 * top)) & 3;
                let rest = k & !(3 << (2 * top));
                let (s, l) = per[qs.start + top][digit];
                syndrome[k] = syndrome[rest] ^ s;
                logical[k] = logical[rest] ^ l;
            }
            HalfTable { syndrome, logical }
        };
        let low = build(0..lo);
        let high = build(lo..n);
        let target = inst.syndrome.flipped.iter().fold(0u64, |acc, &g| acc | (1 << g));
        Ok(Dense { n, lo, low, high, target })
    }

    /// Every consistent error as (base-4 index, logical bits), ascending.
    fn consistent(&self) -> Vec<(u64, u8)> {
        let mut out = Vec::new();
        for (h, (&sh, &lh)) in self.high.syndrome.iter().zip(&self.high.logical).enumerate() {
            let want = self.target ^ sh;
            for (l, (&sl, &ll)) in self.low.syndrome.iter().zip(&self.low.logical).enumerate() {
                if sl == want {
                    out.push((((h as u64) << (2 * self.lo)) | l as u64, lh ^ ll));
                }
            }
        }
        out
    }

    fn operator(&self, k: u64) -> PauliOperator {
        let pairs = (0..self.n).map(|q| (q, letter_of_code((k >> (2 * q)) & 3)));
        PauliOperator::from_pairs(self.n, pairs).expect("index in range")
    }
}

fn logical_letter(bits: u8) -> Letter {
    Letter::from_bits(bits & 1 == 1, bits & 2 == 2)
}

struct Scored {
    error: PauliOperator,
    logical: u8,
    probability: ExactRational,
}

fn dense_scored(inst: &DecodingInstance, caps: &Caps) -> Result<Vec<Scored>> {
    let d = Dense::new(inst, caps)?;
    d.consistent()
        .into_iter()
        .map(|(k, logical)| {
            let error = d.operator(k);
            let probability = inst.noise.probability_of(&error)?;
            Ok(Scored { error, logical, probability })
        })
        .collect()
}

/// First maximum in list order (list order is canonical).
fn argmax<'a>(items: impl IntoIterator<Item = &'a Scored>) -> Option<&'a Scored> {
    let mut best: Option<&Scored> = None;
    for s in items {
        if best.is_none_or(|b| s.probability > b.probability) {
            best = Some(s);
        }
    }
    best
}

pub fn brute_force_qmld(inst: &DecodingInstance) -> Result<DecodeResult> {
    brute_force_qmld_with(inst, &Caps::default())
}

pub fn brute_force_qmld_with(inst: &DecodingInstance, caps: &Caps) -> Result<DecodeResult> {
    let all = dense_scored(inst, caps)?;
    let best = argmax(&all).ok_or_else(|| Error::Internal("no consistent error".into()))?;
    Ok(DecodeResult {
        error: best.error.clone(),
        probability: best.probability.clone(),
        zero_probability: best.probability.is_zero(),
        cosets: None,
    })
}

fn dense_cosets(inst: &DecodingInstance, caps: &Caps) -> Result<(Vec<Scored>, usize, CosetTable)> {
    let g = inst.layout.num_generators();
    if g > caps.group_generators {
        return Err(Error::cap("stabilizer generators", caps.group_generators, g));
    }
    let all = dense_scored(inst, caps)?;
    let r = all
        .iter()
        .position(|s| !s.probability.is_zero())
        .unwrap_or(0);
    let ref_bits = all[r].logical;
    let mut mass: [ExactRational; 4] = Default::default();
    for s in &all {
        mass[class_index(logical_letter(s.logical ^ ref_bits))] += &s.probability;
    }
    let table = CosetTable::from_masses(all[r].error.clone(), mass);
    Ok((all, r, table))
}

pub fn brute_force_dqmld(inst: &DecodingInstance) -> Result<DecodeResult> {
    brute_force_dqmld_with(inst, &Caps::default())
}

pub fn brute_force_dqmld_with(inst: &DecodingInstance, caps: &Caps) -> Result<DecodeResult> {
    let (all, r, table) = dense_cosets(inst, caps)?;
    let ref_bits = all[r].logical;
    let best = argmax(all.iter().filter(|s| logical_letter(s.logical ^ ref_bits) == table.class)).unwrap();
    Ok(DecodeResult {
        error: best.error.clone(),
        probability: best.probability.clone(),
        zero_probability: table.total().is_zero(),
        cosets: Some(table),
    })
}

// ---------------------------------------------------------------------------
// Support-restricted enumeration

pub fn support_restricted_enumerate(inst: &DecodingInstance) -> Result<Vec<(PauliOperator, ExactRational)>> {
    support_restricted_enumerate_with(inst, &Caps::default())
}

/// Every nonzero-probability consistent error, by constraint search over the noise support.
pub fn support_restricted_enumerate_with(
    inst: &DecodingInstance,
    caps: &Caps,
) -> Result<Vec<(PauliOperator, ExactRational)>> {
    let support = inst.noise.support();
    if support.len() > caps.support_qubits {
        return Err(Error::cap("support qubits", caps.support_qubits, support.len()));
    }
    let index: std::collections::HashMap<usize, usize> = support.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let mut gens: BTreeSet<usize> = inst.syndrome.flipped.clone();
    for &q in &support {
        gens.extend(inst.layout.generators_of_qubit(q).into_iter().map(|(g, _)| g));
    }
    let mut checks = Vec::with_capacity(gens.len());
    for g in gens {
        let gen = inst
            .layout
            .generator(g)
            .ok_or_else(|| Error::Internal(format!("generator {g} missing")))?;
        let vars: Vec<usize> = gen.qubits.iter().filter_map(|q| index.get(q).copied()).collect();
        let parity = inst.syndrome.flipped.contains(&g);
        if vars.is_empty() {
            if parity {
                return Ok(vec![]);
            }
            continue;
        }
        checks.push(Check { kind: gen.kind, vars, parity });
    }
    let domains: Vec<LetterSet> = support.iter().map(|&q| inst.noise.get(q).allowed()).collect();
    let problem = Problem { domains, checks };
    let sols = match gf2::enumerate(&problem, caps.node_budget) {
        Enumeration::Complete(s) => s,
        Enumeration::Inconclusive { explored } => {
            return Err(Error::Inconclusive(format!("support enumeration stopped after {explored} steps")))
        }
    };
    let n = inst.num_qubits();
    let mut out = Vec::with_capacity(sols.len());
    for s in sols {
        let e = PauliOperator::from_pairs(n, support.iter().copied().zip(s))?;
        let p = inst.noise.probability_of(&e)?;
        if !p.is_zero() {
            out.push((e, p));
        }
    }
    out.sort_by(|a, b| canonical_cmp(&a.0, &b.0));
    Ok(out)
}

/// QMLD over the support-restricted enumeration. Needs a nonzero-probability consistent error.
pub fn support_qmld_with(inst: &DecodingInstance, caps: &Caps) -> Result<DecodeResult> {
    let all = support_restricted_enumerate_with(inst, caps)?;
    let mut best: Option<&(PauliOperator, ExactRational)> = None;
    for e in &all {
        if best.is_none_or(|b| e.1 > b.1) {
            best = Some(e);
        }
    }
    let (error, probability) = best.cloned().ok_or_else(no_support_error)?;
    Ok(DecodeResult { error, probability, zero_probability: false, cosets: None })
}

/// DQMLD over the support-restricted enumeration, with the same reference as the dense decoder.
pub fn support_dqmld_with(inst: &DecodingInstance, caps: &Caps) -> Result<DecodeResult> {
    let all = support_restricted_enumerate_with(inst, caps)?;
    let reference = all.first().ok_or_else(no_support_error)?.0.clone();
    let mut mass: [ExactRational; 4] = Default::default();
    let mut classes = Vec::with_capacity(all.len());
    for (e, p) in &all {
        let c = inst.layout.logical_class(e, &reference)?;
        mass[class_index(c)] += p;
        classes.push(c);
    }
    let table = CosetTable::from_masses(reference, mass);
    let mut best: Option<&(PauliOperator, ExactRational)> = None;
    for (e, &c) in all.iter().zip(&classes) {
        if c == table.class && best.is_none_or(|b| e.1 > b.1) {
            best = Some(e);
        }
    }
    let (error, probability) = best.cloned().unwrap();
    Ok(DecodeResult { error, probability, zero_probability: false, cosets: Some(table) })
}

fn no_support_error() -> Error {
    Error::Precondition("no consistent error has nonzero probability".into())
}

/// Maximum probability of a consistent error, by whichever exact method fits the caps.
pub fn max_consistent_probability(inst: &DecodingInstance, caps: &Caps) -> Result<ExactRational> {
    if inst.num_qubits() <= caps.dense_qubits {
        return Ok(brute_force_qmld_with(inst, caps)?.probability);
    }
    let all = support_restricted_enumerate_with(inst, caps)?;
    Ok(all.into_iter().map(|(_, p)| p).max().unwrap_or_else(ExactRational::zero))
}

// ---------------------------------------------------------------------------
// Structured decoders for compiled instances

fn assignment_cap(n: usize) -> Result<()> {
    if n > COUNT_CAP {
        return Err(Error::cap("variables for assignment enumeration", COUNT_CAP, n));
    }
    Ok(())
}

struct Witnessed {
    error: PauliOperator,
    probability: ExactRational,
    value: bool,
}

fn witnesses(inst: &CompiledInstance) -> Result<Vec<Witnessed>> {
    assignment_cap(inst.num_vars)?;
    let mut out = Vec::with_capacity(1 << inst.num_vars);
    for a in all_assignments(inst.num_vars) {
        let error = inst.assignment_witness(&a)?;
        let probability = inst.noise.probability_of(&error)?;
        out.push(Witnessed { error, probability, value: inst.evaluate(&a)? });
    }
    out.sort_by(|a, b| canonical_cmp(&a.error, &b.error));
    Ok(out)
}

fn best_witness<'a>(ws: impl IntoIterator<Item = &'a Witnessed>) -> Option<&'a Witnessed> {
    let mut best: Option<&Witnessed> = None;
    for w in ws {
        if best.is_none_or(|b| w.probability > b.probability) {
            best = Some(w);
        }
    }
    best
}

/// Maximises over the assignment witnesses, which are all the nonzero consistent errors.
pub fn structured_qmld(inst: &CompiledInstance) -> Result<DecodeResult> {
    let ws = witnesses(inst)?;
    let b = best_witness(&ws).unwrap();
    Ok(DecodeResult {
        error: b.error.clone(),
        probability: b.probability.clone(),
        zero_probability: b.probability.is_zero(),
        cosets: None,
    })
}

/// Coset masses of the two witness classes; the satisfying class wins iff `a·r > b·(1-r)`.
pub fn structured_dqmld(inst: &CompiledInstance) -> Result<DecodeResult> {
    if inst.mode.is_qmld() {
        return Err(Error::Precondition("structured DQMLD needs a dqmld-mode instance".into()));
    }
    let ws = witnesses(inst)?;
    let reference = &ws[0];
    let mut mass: [ExactRational; 4] = Default::default();
    for w in &ws {
        let idx = if w.value == reference.value { 0 } else { 1 };
        mass[idx] += &w.probability;
    }
    let table = CosetTable::from_masses(reference.error.clone(), mass);
    let want = if table.class == Letter::I { reference.value } else { !reference.value };
    let b = best_witness(ws.iter().filter(|w| w.value == want)).unwrap();
    Ok(DecodeResult {
        error: b.error.clone(),
        probability: b.probability.clone(),
        zero_probability: false,
        cosets: Some(table),
    })
}

// ---------------------------------------------------------------------------
// Decision problems

pub fn decision_qmld(inst: &DecodingInstance, threshold: &ExactRational) -> Result<bool> {
    decision_qmld_with(inst, threshold, &Caps::default())
}

/// Whether some consistent error has probability at least `threshold`.
pub fn decision_qmld_with(inst: &DecodingInstance, threshold: &ExactRational, caps: &Caps) -> Result<bool> {
    if *threshold > ExactRational::one() {
        return Ok(false);
    }
    if threshold.is_zero() && inst.num_qubits() > caps.dense_qubits {
        // some consistent error always exists
        return Ok(true);
    }
    Ok(max_consistent_probability(inst, caps)? >= *threshold)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionDecode {
    pub result: DecodeResult,
    pub oracle_calls: u64,
    /// `ceil(log2(b + 1)) + 1 + 4n`.
    pub call_bound: u64,
    pub denominator: BigInt,
}

fn common_denominator(noise: &NoiseModel) -> BigInt {
    let mut b = BigInt::one();
    for n in noise.entries().values() {
        let mut l = BigInt::one();
        for v in [n.px.clone(), n.py.clone(), n.pz.clone(), n.idle()] {
            l = l.lcm(v.denom());
        }
        b *= l;
    }
    b
}

/// Recovers a maximum-probability error using only a decision oracle: binary search on
/// the numerator of `a/b`, then one qubit at a time pin a letter with probability one
/// and rescale the threshold.
pub fn qmld_from_decision<F>(inst: &DecodingInstance, mut oracle: F) -> Result<DecisionDecode>
where
    F: FnMut(&DecodingInstance, &ExactRational) -> Result<bool>,
{
    let b = common_denominator(&inst.noise);
    let n = inst.num_qubits() as u64;
    let call_bound = (b.clone() + 1u32).bits() + 1 + 4 * n;
    let mut calls = 0u64;
    let mut ask = |i: &DecodingInstance, t: &ExactRational, calls: &mut u64| {
        *calls += 1;
        oracle(i, t)
    };
    let frac = |a: &BigInt| ExactRational::new(a.clone(), b.clone());
    if !ask(inst, &ExactRational::zero(), &mut calls)? {
        return Err(Error::OracleFault("oracle rejects threshold 0".into()));
    }
    let (mut lo, mut hi) = (BigInt::zero(), b.clone());
    while lo < hi {
        let mid: BigInt = (&lo + &hi + 1u32) / 2u32;
        if ask(inst, &frac(&mid), &mut calls)? {
            lo = mid;
        } else {
            hi = mid - 1u32;
        }
    }
    if lo.is_zero() {
        return Err(Error::Precondition("no consistent error has nonzero probability".into()));
    }
    let best = frac(&lo);
    let mut work = inst.clone();
    let mut target = best.clone();
    let mut letters = Vec::new();
    for q in inst.noise.support() {
        let qn = inst.noise.get(q);
        let mut fixed = None;
        for l in Letter::ALL {
            let pl = qn.prob(l);
            if pl.is_zero() {
                continue;
            }
            let mut trial = work.clone();
            let pin = match l {
                Letter::I => QubitNoise::zero(),
                _ => QubitNoise::uniform_on(LetterSet::single(l), &ExactRational::one())?,
            };
            trial.noise.set(q, pin)?;
            let t = &target / &pl;
            if ask(&trial, &t, &mut calls)? {
                fixed = Some((l, trial, t));
                break;
            }
        }
        let (l, trial, t) =
            fixed.ok_or_else(|| Error::OracleFault(format!("no letter at qubit {q} keeps the threshold reachable")))?;
        letters.push((q, l));
        work = trial;
        target = t;
    }
    let error = PauliOperator::from_pairs(inst.num_qubits(), letters)?;
    let probability = inst.noise.probability_of(&error)?;
    if probability != best || !inst.consistent(&error)? {
        return Err(Error::OracleFault(format!(
            "pinned error has probability {} but the search found {}",
            format_rational(&probability),
            format_rational(&best)
        )));
    }
    Ok(DecisionDecode {
        result: DecodeResult { error, probability, zero_probability: false, cosets: None },
        oracle_calls: calls,
        call_bound,
        denominator: b,
    })
}

fn class_of(inst: &DecodingInstance, table: &CosetTable, e: &PauliOperator) -> Result<Letter> {
    if !inst.consistent(e)? {
        return Err(Error::Precondition("error does not match the syndrome".into()));
    }
    inst.layout.logical_class(e, &table.reference)
}

pub fn decision_dqmld(inst: &DecodingInstance, e: &PauliOperator) -> Result<bool> {
    decision_dqmld_with(inst, e, &Caps::default())
}

/// Whether the coset of `e` has maximum probability among the four.
pub fn decision_dqmld_with(inst: &DecodingInstance, e: &PauliOperator, caps: &Caps) -> Result<bool> {
    let (_, _, table) = dense_cosets(inst, caps)?;
    let c = class_of(inst, &table, e)?;
    let max = table.probabilities.iter().max().unwrap();
    Ok(table.probability(c) == max)
}

pub fn acceptance_probability(inst: &DecodingInstance, e: &PauliOperator) -> Result<ExactRational> {
    acceptance_probability_with(inst, e, &Caps::default())
}

/// Probability that a sampled error lies in the coset of `e`, plus half the mass of
/// samples that miss the syndrome.
pub fn acceptance_probability_with(inst: &DecodingInstance, e: &PauliOperator, caps: &Caps) -> Result<ExactRational> {
    let (_, _, table) = dense_cosets(inst, caps)?;
    let c = class_of(inst, &table, e)?;
    let inconsistent = ExactRational::one() - table.total();
    Ok(table.probability(c) + inconsistent / ExactRational::from_integer(2.into()))
}

/// Logical X and Z representatives used to move between the four classes.
pub fn logical_shifts(layout: &RotatedLayout) -> [PauliOperator; 4] {
    let n = layout.num_qubits();
    let x = layout.logical_x();
    let z = layout.logical_z();
    let y = x.multiply(&z).expect("same size");
    [PauliOperator::identity(n), x, y, z]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn empty(w: usize, h: usize) -> DecodingInstance {
        let l = RotatedLayout::new(w, h).unwrap();
        let n = l.num_qubits();
        DecodingInstance::new(l, NoiseModel::new(n), SyndromeVector::default()).unwrap()
    }

    #[test]
    fn zero_noise_identity() {
        let i = empty(3, 3);
        let r = brute_force_qmld(&i).unwrap();
        assert!(r.error.is_identity());
        assert_eq!(r.probability, ExactRational::one());
        let d = brute_force_dqmld(&i).unwrap();
        let t = d.cosets.unwrap();
        assert_eq!(t.class, Letter::I);
        assert_eq!(t.probabilities[0], ExactRational::one());
    }

    #[test]
    fn canonical_order() {
        let a = PauliOperator::parse_literal("X0", 2).unwrap();
        let b = PauliOperator::parse_literal("X1", 2).unwrap();
        assert_eq!(canonical_cmp(&a, &b), Ordering::Less);
        assert_eq!(canonical_cmp(&a, &a), Ordering::Equal);
    }

    #[test]
    fn dense_cap() {
        let i = empty(4, 4);
        assert!(matches!(brute_force_qmld(&i), Err(Error::Cap { .. })));
    }

    #[test]
    fn decision_thresholds() {
        let mut i = empty(2, 2);
        i.noise.set(0, QubitNoise::new(rat(1, 10), rat(0, 1), rat(0, 1)).unwrap()).unwrap();
        assert!(decision_qmld(&i, &ExactRational::zero()).unwrap());
        assert!(decision_qmld(&i, &rat(9, 10)).unwrap());
        assert!(!decision_qmld(&i, &rat(91, 100)).unwrap());
        assert!(!decision_qmld(&i, &rat(2, 1)).unwrap());
    }
}
