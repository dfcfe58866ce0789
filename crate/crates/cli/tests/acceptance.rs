//! One PASS/FAIL line per acceptance criterion. Each check carries its wall-clock budget.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use surfred::compile::{compile_formula, CompileMode, CosetRelation};
use surfred::decoders::{
    acceptance_probability, brute_force_dqmld, brute_force_qmld, class_index, decision_dqmld, decision_qmld,
    logical_shifts, qmld_from_decision, support_restricted_enumerate, DecodingInstance,
};
use surfred::formula::{all_assignments, parse_expression};
use surfred::gadget::{corpus, verify_gadget, GadgetKind};
use surfred::instance::{parse, serialize};
use surfred::pipelines::{self, structured_dqmld_oracle, structured_qmld_oracle, witness_extremes, Verdict};
use surfred::rational::{pow, rat, ApproxFactor, ExactRational};
use surfred::{Expr, Formula, Letter, NoiseModel, PauliOperator, QubitNoise, RotatedLayout, SyndromeVector};

const EXAMPLE: &str = "((x1|x2)&((!x2|x3)&(!x1|!x3)))";
const SEED: u64 = 0x5eed_0001;

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// corpus

fn densify(e: &Expr, map: &mut Vec<usize>) -> Expr {
    match e {
        Expr::Var(v) => {
            let i = map.iter().position(|x| x == v).unwrap_or_else(|| {
                map.push(*v);
                map.len() - 1
            });
            Expr::Var(i + 1)
        }
        Expr::Not(a) => Expr::not(densify(a, map)),
        Expr::And(a, b) => {
            let a = densify(a, map);
            Expr::and(a, densify(b, map))
        }
        Expr::Or(a, b) => {
            let a = densify(a, map);
            Expr::or(a, densify(b, map))
        }
    }
}

fn random_expr(rng: &mut ChaCha8Rng, vars: usize, gates: usize) -> Expr {
    if gates == 0 {
        let v = Expr::Var(rng.random_range(1..=vars));
        return if rng.random_bool(0.3) { Expr::not(v) } else { v };
    }
    let left = rng.random_range(0..gates);
    let a = random_expr(rng, vars, left);
    let b = random_expr(rng, vars, gates - 1 - left);
    let e = if rng.random_bool(0.5) { Expr::and(a, b) } else { Expr::or(a, b) };
    if rng.random_bool(0.15) {
        Expr::not(e)
    } else {
        e
    }
}

/// Hand-picked formulas followed by seeded random ones, all with n ≤ 4.
fn formula_corpus() -> Vec<Formula> {
    let fixed = [EXAMPLE, "(x1&!x1)", "x1", "!x1", "(x1&x2)", "(x1|x2)", "!(x1&x2)", "((x1&x2)&x3)", "((x1|x2)|(x3|x4))"];
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in fixed {
        let f = parse_expression(s).unwrap();
        seen.insert(f.to_string());
        out.push(f);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    while out.len() < 60 {
        let vars = rng.random_range(1..=4);
        let gates = rng.random_range(1..=4);
        let e = random_expr(&mut rng, vars, gates);
        let f = Formula::from_expr(densify(&e, &mut Vec::new())).unwrap();
        if f.num_vars <= 4 && seen.insert(f.to_string()) {
            out.push(f);
        }
    }
    out
}

fn truth_count(f: &Formula) -> u64 {
    all_assignments(f.num_vars).filter(|a| f.expr.eval(a)).count() as u64
}

fn random_noise(rng: &mut ChaCha8Rng, n: usize, density: f64) -> NoiseModel {
    let mut noise = NoiseModel::new(n);
    for q in 0..n {
        if !rng.random_bool(density) {
            continue;
        }
        let d = rng.random_range(4..=12i64);
        let x = rng.random_range(0..=d / 3);
        let y = rng.random_range(0..=d / 3);
        let z = rng.random_range(0..=d / 3);
        noise.set(q, QubitNoise::new(rat(x, d), rat(y, d), rat(z, d)).unwrap()).unwrap();
    }
    noise
}

// ---------------------------------------------------------------------------
// criteria

fn c1_gadgets() -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_surfred")).arg("verify-gadgets").output().map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "verify-gadgets exited with {:?}", out.status.code());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut seen = Vec::new();
    for t in ok(corpus())? {
        let rep = ok(verify_gadget(&t))?;
        let want = match t.kind {
            GadgetKind::And | GadgetKind::CrossXZ => 4,
            _ => 2,
        };
        ensure!(rep.matched, "{} mismatch: {:?}", rep.id, rep.mismatch);
        ensure!(rep.count == want, "{} has {} consistent errors, want {want}", rep.id, rep.count);
        let witnesses: BTreeSet<_> = t.witnesses.iter().map(|w| w.pattern.clone()).collect();
        if t.kind == GadgetKind::And {
            let out = t.out_index("out").ok_or("AND has no `out` port")?;
            for w in &t.witnesses {
                ensure!(w.outputs[out] == (w.inputs[0] && w.inputs[1]), "AND witness {:?} has the wrong output", w.inputs);
            }
        }
        ensure!(witnesses.len() == want, "{} witness patterns are not distinct", rep.id);
        let line = text.lines().find(|l| l.starts_with(&format!("{}:", rep.id)) || l.starts_with(&format!("{} ", rep.id)));
        ensure!(line.is_some_and(|l| l.contains(&format!("{want} consistent errors"))), "cli line for {} missing", rep.id);
        seen.push(format!("{}={}", rep.id, rep.count));
    }
    Ok(seen.join(" "))
}

fn anticommute_count(a: &PauliOperator, b: &PauliOperator) -> usize {
    a.support().iter().filter(|(q, &l)| {
        let m = b.get(**q);
        l != Letter::I && m != Letter::I && l != m
    }).count()
}

/// Rank over GF(2) of symplectic rows.
fn rank(rows: &[PauliOperator], n: usize) -> usize {
    let mut vs: Vec<Vec<bool>> = rows
        .iter()
        .map(|p| {
            let mut v = vec![false; 2 * n];
            for (&q, &l) in p.support() {
                let (x, z) = l.bits();
                v[q] = x;
                v[n + q] = z;
            }
            v
        })
        .collect();
    let mut r = 0;
    for col in 0..2 * n {
        let Some(piv) = (r..vs.len()).find(|&i| vs[i][col]) else { continue };
        vs.swap(r, piv);
        for i in 0..vs.len() {
            if i != r && vs[i][col] {
                let src = vs[r].clone();
                for (a, b) in vs[i].iter_mut().zip(src) {
                    *a ^= b;
                }
            }
        }
        r += 1;
    }
    r
}

fn c2_lattice() -> Result<String, String> {
    let mut layouts = 0;
    for w in 2..=6 {
        for h in 2..=6 {
            let l = ok(RotatedLayout::new(w, h))?;
            let n = w * h;
            let gens: Vec<PauliOperator> = l.generators().map(|g| g.to_pauli(n)).collect();
            ensure!(gens.len() == n - 1, "{w}x{h}: {} generators", gens.len());
            for (i, a) in gens.iter().enumerate() {
                for b in &gens[i + 1..] {
                    ensure!(anticommute_count(a, b).is_multiple_of(2), "{w}x{h}: generators anticommute");
                }
            }
            let (x, z) = (l.logical_x(), l.logical_z());
            for g in &gens {
                ensure!(anticommute_count(g, &x).is_multiple_of(2), "{w}x{h}: logical X fails to commute");
                ensure!(anticommute_count(g, &z).is_multiple_of(2), "{w}x{h}: logical Z fails to commute");
            }
            ensure!(anticommute_count(&x, &z) % 2 == 1, "{w}x{h}: logicals commute");
            ensure!(rank(&gens, n) == n - 1, "{w}x{h}: generators dependent");
            let mut all = gens.clone();
            all.push(x);
            all.push(z);
            ensure!(rank(&all, n) == n + 1, "{w}x{h}: logicals inside the stabilizer group");
            layouts += 1;
        }
    }
    Ok(format!("{layouts} layouts"))
}

fn c3_normalization() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let mut paulis = 0u64;
    for _ in 0..50 {
        let n = rng.random_range(1..=8);
        let noise = random_noise(&mut rng, n, 0.8);
        let mut total = ExactRational::zero();
        for k in 0u64..(1 << (2 * n)) {
            let e = ok(PauliOperator::from_pairs(n, (0..n).map(|q| (q, Letter::ALL[(k >> (2 * q) & 3) as usize]))))?;
            total += ok(noise.probability_of(&e))?;
            paulis += 1;
        }
        ensure!(total.is_one(), "n={n}: total {total}");
    }
    Ok(format!("50 models, {paulis} Paulis"))
}

fn c4_separation() -> Result<String, String> {
    let p = rat(1, 4);
    let mut checked = 0;
    for f in formula_corpus().iter().take(24) {
        let inst = ok(compile_formula(f, CompileMode::Qmld { p: p.clone() }))?;
        let (min_sat, max_unsat) = ok(witness_extremes(&inst))?;
        if let (Some(s), Some(u)) = (&min_sat, &max_unsat) {
            ensure!(s > u, "{f}: min satisfying {s} <= max unsatisfying {u}");
        }
        let ell = inst.ell;
        let lhs = (ExactRational::one() - pow(&p, ell)) * pow(&p, ell - 1);
        ensure!(lhs > pow(&p, ell), "{f}: symbolic bound fails at l={ell}");
        let b = ok(inst.separation_bounds())?;
        ensure!(b.sat_lower == lhs && b.unsat_upper == pow(&p, ell), "{f}: reported bounds differ");
        if let Some(s) = &min_sat {
            ensure!(*s >= b.sat_lower, "{f}: satisfying witness below the bound");
        }
        if let Some(u) = &max_unsat {
            ensure!(*u <= b.unsat_upper, "{f}: unsatisfying witness above the bound");
        }
        checked += 1;
    }
    Ok(format!("{checked} formulas"))
}

fn c5_property_one() -> Result<String, String> {
    let mut parts = Vec::new();
    for src in ["x1", "!x1", "(x1&x2)"] {
        let f = ok(parse_expression(src))?;
        let inst = ok(compile_formula(&f, CompileMode::qmld_default()))?;
        let found: BTreeSet<PauliOperator> =
            ok(support_restricted_enumerate(&DecodingInstance::from(&inst)))?.into_iter().map(|(e, _)| e).collect();
        let mut witnesses = BTreeSet::new();
        for a in all_assignments(f.num_vars) {
            witnesses.insert(ok(inst.assignment_witness(&a))?);
        }
        ensure!(witnesses.len() == 1 << f.num_vars, "{src}: witnesses collide");
        ensure!(found == witnesses, "{src}: {} errors found, {} witnesses", found.len(), witnesses.len());
        parts.push(format!("{src}:{}", found.len()));
    }
    Ok(parts.join(" "))
}

fn c6_sat() -> Result<String, String> {
    let corpus = formula_corpus();
    let mut sat = 0;
    for f in &corpus {
        let report = ok(pipelines::solve_sat(f, structured_qmld_oracle))?;
        let want = truth_count(f) > 0;
        ensure!(report.verdict == Verdict::Sat(want), "{f}: verdict {} but truth table says {want}", report.verdict);
        sat += want as usize;
    }
    let example = ok(pipelines::solve_sat(&ok(parse_expression(EXAMPLE))?, structured_qmld_oracle))?;
    ensure!(example.verdict == Verdict::Sat(true), "worked example not SAT");
    let contra = ok(pipelines::solve_sat(&ok(parse_expression("(x1&!x1)"))?, structured_qmld_oracle))?;
    ensure!(contra.verdict == Verdict::Sat(false), "contradiction not UNSAT");
    Ok(format!("{} formulas, {sat} SAT, 0 mismatches", corpus.len()))
}

fn c7_count() -> Result<String, String> {
    let corpus = formula_corpus();
    let mut probes = 0;
    for f in corpus.iter().take(32) {
        let n = f.num_vars;
        let report = ok(pipelines::count_sat(f, structured_dqmld_oracle))?;
        let a = truth_count(f);
        ensure!(report.verdict == Verdict::Count(a), "{f}: count {} want {a}", report.verdict);
        ensure!(report.oracle_calls <= n as u64 + 1, "{f}: {} calls for n={n}", report.oracle_calls);
        // sat class wins iff r > b / 2^n
        let b = (1u64 << n) - a;
        let threshold = rat(b as i64, 1 << n);
        let eps = rat(1, 1 << (n + 2));
        for r in [&threshold - &eps, &threshold + &eps] {
            if r <= ExactRational::zero() || r >= ExactRational::one() {
                continue;
            }
            let inst = ok(compile_formula(f, CompileMode::Dqmld { r: r.clone() }))?;
            let res = ok(structured_dqmld_oracle(&inst))?;
            let sat_wins = ok(inst.output_value(&res.error))?;
            ensure!(sat_wins == (r > threshold), "{f}: r={r} sat_wins={sat_wins} with b={b}");
            probes += 1;
        }
    }
    Ok(format!("32 formulas, {probes} threshold probes"))
}

fn c8_cosets() -> Result<String, String> {
    let mut pairs = 0;
    let mut formulas = 0;
    for f in formula_corpus().iter().filter(|f| f.num_vars <= 3) {
        let inst = ok(compile_formula(f, CompileMode::qmld_default()))?;
        let assignments: Vec<Vec<bool>> = all_assignments(f.num_vars).collect();
        for a in &assignments {
            for b in &assignments {
                let rel = ok(inst.coset_relation_check(a, b))?;
                let want = if f.expr.eval(a) == f.expr.eval(b) { CosetRelation::Stabilizer } else { CosetRelation::LogicalX };
                ensure!(rel == want, "{f}: {a:?} vs {b:?} gave {rel:?}");
                pairs += 1;
            }
        }
        formulas += 1;
    }
    Ok(format!("{formulas} formulas, {pairs} pairs"))
}

fn c9_approx() -> Result<String, String> {
    let corpus = formula_corpus();
    let mut checked = 0;
    for f in corpus.iter().take(6) {
        let p = rat(1, 4);
        let m = ok(ApproxFactor::parse("2^l"))?;
        let inst = ok(compile_formula(f, CompileMode::QmldApprox { p: p.clone(), m }))?;
        let mv = inst.approx_factor.clone().ok_or("no resolved factor")?;
        ensure!(mv == ExactRational::from_integer(num_traits::pow(2.into(), inst.ell as usize)), "{f}: M is not 2^l");
        let b = ok(inst.separation_bounds())?;
        ensure!(b.sat_lower > &mv * &b.unsat_upper, "{f}: approx separation fails");
        let (s, u) = ok(witness_extremes(&inst))?;
        if let (Some(s), Some(u)) = (s, u) {
            ensure!(s > &mv * &u, "{f}: approx witnesses not separated");
        }
        for p in [rat(1, 4), rat(1, 8)] {
            let inst = ok(compile_formula(f, CompileMode::QmldUniform { p: p.clone(), m: None }))?;
            let ell = inst.ell;
            let tail = inst.layout.height() as u64 - inst.base_height.ok_or("no base height")? as u64;
            ensure!(tail == 2 * ell, "{f}: wire length {tail} for l={ell}");
            let one_minus = ExactRational::one() - &p;
            let lhs = pow(&p, ell) * pow(&one_minus, 2 * ell);
            ensure!(lhs > pow(&p, 2 * ell), "{f}: uniform inequality fails at p={p}");
            let b = ok(inst.separation_bounds())?;
            ensure!(b.sat_lower == lhs && b.unsat_upper == pow(&p, 2 * ell), "{f}: uniform bounds differ");
            let (s, u) = ok(witness_extremes(&inst))?;
            if let (Some(s), Some(u)) = (s, u) {
                ensure!(s > u, "{f}: uniform witnesses not separated at p={p}");
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} formulas, p in {{1/4, 1/8}}"))
}

fn c10_decision() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let mut made = 0;
    let mut max_ratio = 0.0f64;
    while made < 25 {
        let side = if made % 2 == 0 { 2 } else { 3 };
        let layout = ok(RotatedLayout::new(side, side))?;
        let n = layout.num_qubits();
        let noise = random_noise(&mut rng, n, 0.7);
        let g = layout.num_generators();
        let flips: Vec<usize> = (0..g).filter(|_| rng.random_bool(0.3)).collect();
        let inst = ok(DecodingInstance::new(layout, noise, SyndromeVector::new(flips)))?;
        let bf = ok(brute_force_qmld(&inst))?;
        if bf.zero_probability {
            continue;
        }
        let d = ok(qmld_from_decision(&inst, decision_qmld))?;
        ensure!(d.result.probability == bf.probability, "instance {made}: probability differs");
        ensure!(d.oracle_calls <= d.call_bound, "instance {made}: {} calls > bound {}", d.oracle_calls, d.call_bound);
        let bits = d.denominator.bits().max(1) as f64;
        max_ratio = max_ratio.max(d.oracle_calls as f64 / (bits + 4.0 * n as f64));

        let dq = ok(brute_force_dqmld(&inst))?;
        let table = dq.cosets.ok_or("no coset table")?;
        let max = table.probabilities.iter().max().unwrap().clone();
        let mut acc = Vec::new();
        for s in logical_shifts(&inst.layout) {
            let e = ok(dq.error.multiply(&s))?;
            let class = ok(inst.layout.logical_class(&e, &table.reference))?;
            let mass = table.probabilities[class_index(class)].clone();
            ensure!(ok(decision_dqmld(&inst, &e))? == (mass == max), "instance {made}: decision disagrees with argmax");
            acc.push((ok(acceptance_probability(&inst, &e))?, mass));
        }
        for a in &acc {
            for b in &acc {
                ensure!(a.0.cmp(&b.0) == a.1.cmp(&b.1), "instance {made}: acceptance ordering differs");
            }
        }
        made += 1;
    }
    Ok(format!("25 instances, calls/(log b + 4n) <= {max_ratio:.2}"))
}

fn c11_serialization() -> Result<String, String> {
    let modes = [
        CompileMode::qmld_default(),
        CompileMode::QmldApprox { p: rat(1, 4), m: ok(ApproxFactor::parse("2^l"))? },
        CompileMode::QmldUniform { p: rat(1, 8), m: None },
        CompileMode::Dqmld { r: rat(5, 16) },
        CompileMode::DqmldMajority,
    ];
    let corpus = formula_corpus();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let chunk = corpus.len().div_ceil(workers);
    let per_chunk: Vec<Result<(usize, usize), String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = corpus
            .chunks(chunk)
            .map(|part| {
                let modes = &modes;
                scope.spawn(move || -> Result<(usize, usize), String> {
                    let (mut files, mut bytes) = (0, 0);
                    for f in part {
                        for mode in modes {
                            let a = ok(compile_formula(f, mode.clone()))?;
                            let b = ok(compile_formula(f, mode.clone()))?;
                            let text = serialize(&a);
                            ensure!(text == serialize(&b), "{f} {mode}: repeated compilation differs");
                            let back = ok(parse(&text))?;
                            ensure!(back.compiled.as_ref() == Some(&a), "{f} {mode}: parse(serialize) differs");
                            ensure!(serialize(back.compiled.as_ref().unwrap()) == text, "{f} {mode}: reserialization differs");
                            files += 1;
                            bytes += text.len();
                        }
                    }
                    Ok((files, bytes))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err("worker panicked".into()))).collect()
    });
    let (mut files, mut bytes) = (0, 0);
    for r in per_chunk {
        let (f, b) = r?;
        files += f;
        bytes += b;
    }
    Ok(format!("{files} files, {bytes} bytes"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, Check); 11] = [
        ("gadget case analysis", Duration::from_secs(300), c1_gadgets),
        ("lattice invariants", Duration::from_secs(60), c2_lattice),
        ("probability normalization", Duration::from_secs(120), c3_normalization),
        ("qmld separation", Duration::from_secs(120), c4_separation),
        ("witness set certification", Duration::from_secs(300), c5_property_one),
        ("sat round trip", Duration::from_secs(300), c6_sat),
        ("count round trip", Duration::from_secs(600), c7_count),
        ("coset structure", Duration::from_secs(600), c8_cosets),
        ("approximation separations", Duration::from_secs(120), c9_approx),
        ("decision equivalences", Duration::from_secs(600), c10_decision),
        ("determinism and serialization", Duration::from_secs(60), c11_serialization),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or("panic".into()))
        });
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget")),
            Err(e) => (false, e),
        };
        failed += !pass as usize;
        println!(
            "{} {:>2} {name}: {detail} [{:.1}s / {}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
