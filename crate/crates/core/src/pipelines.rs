//! Turing reductions run end to end: SAT through a QMLD oracle, #SAT through binary
//! search on a DQMLD oracle, Majority-SAT, and approximation-separation checks.

use std::fmt;

use num_traits::{One, Zero};

use crate::caps::Caps;
use crate::compile::{compile_with, CompileMode, CompiledInstance};
use crate::decoders::{structured_dqmld, structured_qmld, DecodeResult};
use crate::error::{Error, Result};
use crate::formula::{all_assignments, eliminate_or, Formula};
use crate::planar::{to_planar_circuit, PlanarCircuit};
use crate::rational::{ceil_log, format_rational, int, rat, ApproxFactor, ExactRational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MajorityOutcome {
    Majority,
    Minority,
    Tie,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat(bool),
    Count(u64),
    Majority(MajorityOutcome),
    Separation(bool),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Sat(true) => write!(f, "SAT"),
            Verdict::Sat(false) => write!(f, "UNSAT"),
            Verdict::Count(c) => write!(f, "{c}"),
            Verdict::Majority(MajorityOutcome::Majority) => write!(f, "majority"),
            Verdict::Majority(MajorityOutcome::Minority) => write!(f, "minority"),
            Verdict::Majority(MajorityOutcome::Tie) => write!(f, "tie"),
            Verdict::Separation(true) => write!(f, "holds"),
            Verdict::Separation(false) => write!(f, "fails"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineReport {
    pub formula: String,
    pub mode: String,
    pub oracle_calls: u64,
    pub verdict: Verdict,
    pub transcript: Vec<String>,
    /// Verdict computed from the truth table, when within the counting cap.
    pub reference: Option<Verdict>,
}

impl PipelineReport {
    pub fn agrees(&self) -> Option<bool> {
        self.reference.as_ref().map(|r| *r == self.verdict)
    }

    /// Human-readable text followed by a `key=value` section.
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("formula: {}\nmode: {}\noracle calls: {}\nverdict: {}\n", self.formula, self.mode, self.oracle_calls, self.verdict));
        if !self.transcript.is_empty() {
            s.push_str("transcript:\n");
            for line in &self.transcript {
                s.push_str(&format!("  {line}\n"));
            }
        }
        if let Some(r) = &self.reference {
            s.push_str(&format!("reference: {r}\n"));
        }
        s.push_str("[machine]\n");
        s.push_str(&format!("verdict={}\ncalls={}\n", self.verdict, self.oracle_calls));
        if let Some(a) = self.agrees() {
            s.push_str(&format!("reference_agrees={a}\n"));
        }
        s
    }
}

fn planar(f: &Formula) -> Result<PlanarCircuit> {
    to_planar_circuit(&eliminate_or(f))
}

fn reference_count(f: &Formula) -> Option<u64> {
    f.brute_force_count().ok()
}

/// Compiles in QMLD mode, decodes once, and reads the output wire.
pub fn solve_sat<D>(f: &Formula, mut decoder: D) -> Result<PipelineReport>
where
    D: FnMut(&CompiledInstance) -> Result<DecodeResult>,
{
    solve_sat_with(f, &mut decoder, CompileMode::qmld_default(), &Caps::default())
}

pub fn solve_sat_with<D>(f: &Formula, decoder: &mut D, mode: CompileMode, caps: &Caps) -> Result<PipelineReport>
where
    D: FnMut(&CompiledInstance) -> Result<DecodeResult>,
{
    if !mode.is_qmld() {
        return Err(Error::InvalidParameter("solve-sat needs a qmld mode".into()));
    }
    let inst = compile_with(&planar(f)?, mode.clone(), caps)?;
    let r = decoder(&inst)?;
    let sat = inst.output_value(&r.error)?;
    Ok(PipelineReport {
        formula: f.to_string(),
        mode: mode.to_string(),
        oracle_calls: 1,
        verdict: Verdict::Sat(sat),
        transcript: vec![format!(
            "decode {}x{} lattice, l={}: probability {}, output {}",
            inst.layout.width(),
            inst.layout.height(),
            inst.ell,
            format_rational(&r.probability),
            sat
        )],
        reference: reference_count(f).map(|c| Verdict::Sat(c > 0)),
    })
}

/// Pivot `(2k + 1) / 2^(n+1)`: strictly between `k / 2^n` and `(k + 1) / 2^n`.
pub fn pivot(k: u64, n: usize) -> ExactRational {
    ExactRational::new((2 * k + 1).into(), num_bigint::BigInt::one() << (n + 1))
}

/// One DQMLD round at special-qubit probability `r`: whether the satisfying class wins.
pub fn dqmld_round<D>(pc: &PlanarCircuit, r: ExactRational, decoder: &mut D, caps: &Caps) -> Result<bool>
where
    D: FnMut(&CompiledInstance) -> Result<DecodeResult>,
{
    let inst = compile_with(pc, CompileMode::Dqmld { r: r.clone() }, caps)?;
    let res = decoder(&inst)?;
    if res.cosets.as_ref().is_some_and(|t| t.tie) {
        return Err(Error::OracleFault(format!("decoder reported a tie at r = {}", format_rational(&r))));
    }
    inst.output_value(&res.error)
}

/// Binary search on the unsatisfying count `b`: at pivot index `k` the satisfying class
/// wins iff `b <= k`.
pub fn count_sat<D>(f: &Formula, mut decoder: D) -> Result<PipelineReport>
where
    D: FnMut(&CompiledInstance) -> Result<DecodeResult>,
{
    count_sat_with(f, &mut decoder, &Caps::default())
}

pub fn count_sat_with<D>(f: &Formula, decoder: &mut D, caps: &Caps) -> Result<PipelineReport>
where
    D: FnMut(&CompiledInstance) -> Result<DecodeResult>,
{
    let n = f.num_vars;
    if n > 62 {
        return Err(Error::cap("variables for counting", 62, n));
    }
    let pc = planar(f)?;
    let total = 1u64 << n;
    let (mut lo, mut hi) = (0u64, total);
    let mut calls = 0;
    let mut transcript = Vec::new();
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let r = pivot(mid, n);
        let sat_wins = dqmld_round(&pc, r.clone(), decoder, caps)?;
        calls += 1;
        transcript.push(format!("r={} sat_wins={sat_wins}", format_rational(&r)));
        if sat_wins {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(PipelineReport {
        formula: f.to_string(),
        mode: "dqmld".into(),
        oracle_calls: calls,
        verdict: Verdict::Count(total - lo),
        transcript,
        reference: reference_count(f).map(Verdict::Count),
    })
}

pub fn majority_sat<D>(f: &Formula, mut decoder: D) -> Result<PipelineReport>
where
    D: FnMut(&CompiledInstance) -> Result<DecodeResult>,
{
    majority_sat_with(f, &mut decoder, &Caps::default())
}

pub fn majority_sat_with<D>(f: &Formula, decoder: &mut D, caps: &Caps) -> Result<PipelineReport>
where
    D: FnMut(&CompiledInstance) -> Result<DecodeResult>,
{
    let inst = compile_with(&planar(f)?, CompileMode::DqmldMajority, caps)?;
    let res = decoder(&inst)?;
    let outcome = match &res.cosets {
        Some(t) if t.tie => MajorityOutcome::Tie,
        _ if inst.output_value(&res.error)? => MajorityOutcome::Majority,
        _ => MajorityOutcome::Minority,
    };
    let mut transcript = Vec::new();
    if let Some(t) = &res.cosets {
        transcript.push(format!(
            "coset masses I={} X={}",
            format_rational(&t.probabilities[0]),
            format_rational(&t.probabilities[1])
        ));
    }
    let reference = reference_count(f).map(|a| {
        let b = (1u64 << f.num_vars) - a;
        Verdict::Majority(match a.cmp(&b) {
            std::cmp::Ordering::Greater => MajorityOutcome::Majority,
            std::cmp::Ordering::Less => MajorityOutcome::Minority,
            std::cmp::Ordering::Equal => MajorityOutcome::Tie,
        })
    });
    Ok(PipelineReport {
        formula: f.to_string(),
        mode: "dqmld-majority".into(),
        oracle_calls: 1,
        verdict: Verdict::Majority(outcome),
        transcript,
        reference,
    })
}

/// Structured exact decoders as oracles.
pub fn structured_qmld_oracle(inst: &CompiledInstance) -> Result<DecodeResult> {
    structured_qmld(inst)
}

pub fn structured_dqmld_oracle(inst: &CompiledInstance) -> Result<DecodeResult> {
    structured_dqmld(inst)
}

// ---------------------------------------------------------------------------
// Approximation separations

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

fn check(name: &str, holds: bool, detail: String) -> SeparationCheck {
    SeparationCheck { name: name.into(), holds, detail }
}

/// Extremes of witness probabilities: (min over satisfying, max over unsatisfying).
pub fn witness_extremes(inst: &CompiledInstance) -> Result<(Option<ExactRational>, Option<ExactRational>)> {
    let mut min_sat: Option<ExactRational> = None;
    let mut max_unsat: Option<ExactRational> = None;
    for a in all_assignments(inst.num_vars) {
        let p = inst.noise.probability_of(&inst.assignment_witness(&a)?)?;
        if inst.evaluate(&a)? {
            if min_sat.as_ref().is_none_or(|m| p < *m) {
                min_sat = Some(p);
            }
        } else if max_unsat.as_ref().is_none_or(|m| p > *m) {
            max_unsat = Some(p);
        }
    }
    Ok((min_sat, max_unsat))
}

/// Answer of an adversarial M-approximate DQMLD oracle at pivot `r`: it reports the wrong
/// class whenever that class still has at least `1/M` of the winning mass.
fn adversarial_sat_wins(a: u64, b: u64, r: &ExactRational, m: &ExactRational) -> bool {
    let one = ExactRational::one();
    let sat = int(a) * r;
    let unsat = int(b) * (&one - r);
    if sat > unsat {
        !(&unsat * m >= sat)
    } else {
        &sat * m >= unsat
    }
}

/// Interval of odds `b / a` implied by a search that ended at `k` with M-approximate answers.
pub fn odds_interval(k: u64, n: usize, m: &ExactRational) -> (ExactRational, Option<ExactRational>) {
    let total = int(1u64 << n);
    let half = rat(1, 2);
    let kk = int(k);
    let lower = if k == 0 {
        ExactRational::zero()
    } else {
        (&kk - &half) / (&total - &kk + &half) / m
    };
    let upper = if k == 1u64 << n { None } else { Some(m * (&kk + &half) / (&total - &kk - &half)) };
    (lower, upper)
}

/// Runs the separation checks for factor `m` at noise rate `p`.
pub fn approx_separation_report(f: &Formula, m: &ApproxFactor, p: &ExactRational) -> Result<(PipelineReport, Vec<SeparationCheck>)> {
    approx_separation_report_with(f, m, p, &Caps::default())
}

pub fn approx_separation_report_with(
    f: &Formula,
    m: &ApproxFactor,
    p: &ExactRational,
    caps: &Caps,
) -> Result<(PipelineReport, Vec<SeparationCheck>)> {
    let pc = planar(f)?;
    let mut checks = Vec::new();

    let approx = compile_with(&pc, CompileMode::QmldApprox { p: p.clone(), m: m.clone() }, caps)?;
    let mv = approx.approx_factor.clone().unwrap_or_else(ExactRational::one);
    let bounds = approx.separation_bounds()?;
    checks.push(check(
        "approx bounds",
        bounds.sat_lower > &mv * &bounds.unsat_upper,
        format!("l={} M bits={}", approx.ell, mv.numer().bits()),
    ));
    let (min_sat, max_unsat) = witness_extremes(&approx)?;
    let holds = match (&min_sat, &max_unsat) {
        (Some(s), Some(u)) => *s > &mv * u,
        _ => true,
    };
    checks.push(check("approx witnesses", holds, "min satisfying > M * max unsatisfying".into()));

    let uniform = compile_with(&pc, CompileMode::QmldUniform { p: p.clone(), m: Some(m.clone()) }, caps)?;
    let hb = uniform.base_height.unwrap_or(0);
    let tail = uniform.layout.height() as u64 - hb as u64;
    let mu = uniform.approx_factor.clone().unwrap_or_else(ExactRational::one);
    let t = ceil_log(&(ExactRational::one() / p), &mu);
    checks.push(check(
        "uniform wire length",
        tail == 2 * uniform.ell + 2 * t,
        format!("tail={tail} l={} t={t}", uniform.ell),
    ));
    let ub = uniform.separation_bounds()?;
    checks.push(check("uniform bounds", ub.sat_lower > &mu * &ub.unsat_upper, String::new()));
    let (min_sat, max_unsat) = witness_extremes(&uniform)?;
    let holds = match (&min_sat, &max_unsat) {
        (Some(s), Some(u)) => *s > &mu * u,
        _ => true,
    };
    checks.push(check("uniform witnesses", holds, "min satisfying > M * max unsatisfying".into()));

    // M-approximate counting: the search outcome brackets the true odds within factor M
    let n = f.num_vars;
    if let Some(a) = reference_count(f) {
        let b = (1u64 << n) - a;
        let (mut lo, mut hi) = (0u64, 1u64 << n);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if adversarial_sat_wins(a, b, &pivot(mid, n), &mv) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let (lower, upper) = odds_interval(lo, n, &mv);
        let holds = if a == 0 {
            upper.is_none() || lo > 0
        } else {
            let odds = int(b) / int(a);
            odds >= lower && upper.is_none_or(|u| odds <= u)
        };
        checks.push(check("dqmld interval", holds, format!("estimate b={lo} true b={b}")));
    }

    let all = checks.iter().all(|c| c.holds);
    let report = PipelineReport {
        formula: f.to_string(),
        mode: format!("qmld-approx/qmld-uniform m={m}"),
        oracle_calls: 0,
        verdict: Verdict::Separation(all),
        transcript: checks
            .iter()
            .map(|c| format!("{}: {} {}", c.name, if c.holds { "ok" } else { "FAIL" }, c.detail).trim_end().to_string())
            .collect(),
        reference: None,
    };
    Ok((report, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pivots_avoid_ties() {
        for n in 1..4 {
            for k in 0..(1u64 << n) {
                let r = pivot(k, n);
                assert!(r > int(k) / int(1u64 << n) && r < int(k + 1) / int(1u64 << n));
            }
        }
    }

    #[test]
    fn exact_oracle_is_adversary_with_unit_factor() {
        let one = ExactRational::one();
        assert!(adversarial_sat_wins(3, 1, &pivot(1, 2), &one));
        assert!(!adversarial_sat_wins(1, 3, &pivot(1, 2), &one));
    }

    #[test]
    fn interval_contains_exact_count() {
        let one = ExactRational::one();
        let (lo, hi) = odds_interval(1, 2, &one);
        let odds = rat(1, 3);
        assert!(odds >= lo && odds <= hi.unwrap());
    }
}
