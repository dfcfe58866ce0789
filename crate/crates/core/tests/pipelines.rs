use proptest::prelude::*;
use surfred::compile::CompiledInstance;
use surfred::decoders::{structured_dqmld, structured_qmld, DecodeResult};
use surfred::formula::{parse_expression, Expr, Formula};
use surfred::pipelines::{
    approx_separation_report, count_sat, majority_sat, solve_sat, MajorityOutcome, Verdict,
};
use surfred::rational::{rat, ApproxFactor};
use surfred::Result;

const EXAMPLE: &str = "((x1|x2)&((!x2|x3)&(!x1|!x3)))";

fn f(s: &str) -> Formula {
    parse_expression(s).unwrap()
}

fn truth_count(f: &Formula) -> u64 {
    // independent of Formula::brute_force_count: walk assignments as integers
    (0u32..1 << f.num_vars)
        .filter(|bits| {
            let a: Vec<bool> = (0..f.num_vars).map(|i| bits >> i & 1 == 1).collect();
            f.expr.eval(&a)
        })
        .count() as u64
}

#[test]
fn example_formula_is_sat() {
    let r = solve_sat(&f(EXAMPLE), structured_qmld).unwrap();
    assert_eq!(r.verdict, Verdict::Sat(true));
    assert_eq!(r.oracle_calls, 1);
}

#[test]
fn contradiction_is_unsat() {
    let r = solve_sat(&f("(x1&!x1)"), structured_qmld).unwrap();
    assert_eq!(r.verdict, Verdict::Sat(false));
}

#[test]
fn counts_small_formulas() {
    let r = count_sat(&f("(x1|x2)"), structured_dqmld).unwrap();
    assert_eq!(r.verdict, Verdict::Count(3));
    assert!(r.oracle_calls <= 3);
    let r = count_sat(&f("(x1&!x1)"), structured_dqmld).unwrap();
    assert_eq!(r.verdict, Verdict::Count(0));
    let e = f(EXAMPLE);
    let r = count_sat(&e, structured_dqmld).unwrap();
    assert_eq!(r.verdict, Verdict::Count(truth_count(&e)));
    assert!(r.oracle_calls <= e.num_vars as u64 + 1);
}

#[test]
fn majority_outcomes() {
    let r = majority_sat(&f("(x1|x2)"), structured_dqmld).unwrap();
    assert_eq!(r.verdict, Verdict::Majority(MajorityOutcome::Majority));
    let r = majority_sat(&f("x1"), structured_dqmld).unwrap();
    assert_eq!(r.verdict, Verdict::Majority(MajorityOutcome::Tie));
    let r = majority_sat(&f("(x1&x2)"), structured_dqmld).unwrap();
    assert_eq!(r.verdict, Verdict::Majority(MajorityOutcome::Minority));
}

#[test]
fn separations_with_exponential_factor() {
    let e = f(EXAMPLE);
    let (report, checks) = approx_separation_report(&e, &ApproxFactor::parse("2^l").unwrap(), &rat(1, 4)).unwrap();
    for c in &checks {
        assert!(c.holds, "{}: {}", c.name, c.detail);
    }
    assert_eq!(report.verdict, Verdict::Separation(true));
    let (_, checks) = approx_separation_report(&f("(x1&!x2)"), &ApproxFactor::parse("1").unwrap(), &rat(1, 8)).unwrap();
    assert!(checks.iter().all(|c| c.holds));
}

#[test]
fn a_lying_decoder_is_caught() {
    // returns the least likely witness: solve-sat must then disagree with the truth table
    let liar = |inst: &CompiledInstance| -> Result<DecodeResult> {
        let mut r = structured_qmld(inst)?;
        let a = vec![false; inst.num_vars];
        r.error = inst.assignment_witness(&a)?;
        Ok(r)
    };
    let r = solve_sat(&f("(x1&x2)"), liar).unwrap();
    assert_eq!(r.agrees(), Some(false));
}

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

fn expr_strategy() -> impl Strategy<Value = Expr> {
    (1usize..=3).prop_map(Expr::Var).prop_recursive(4, 10, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::or(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn pipelines_match_truth_tables(e in expr_strategy()) {
        let f = Formula::from_expr(densify(&e, &mut Vec::new())).unwrap();
        let a = truth_count(&f);
        let r = solve_sat(&f, structured_qmld).unwrap();
        prop_assert_eq!(r.verdict, Verdict::Sat(a > 0));
        let r = count_sat(&f, structured_dqmld).unwrap();
        prop_assert_eq!(r.verdict, Verdict::Count(a));
        prop_assert!(r.oracle_calls <= f.num_vars as u64 + 1);
    }
}
