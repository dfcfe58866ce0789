//! Boolean formulas: DIMACS and expression parsing, OR elimination, evaluation.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    /// 1-based variable index.
    Var(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            Expr::Var(v) => assignment[v - 1],
            Expr::Not(a) => !a.eval(assignment),
            Expr::And(a, b) => a.eval(assignment) && b.eval(assignment),
            Expr::Or(a, b) => a.eval(assignment) || b.eval(assignment),
        }
    }

    fn max_var(&self) -> usize {
        match self {
            Expr::Var(v) => *v,
            Expr::Not(a) => a.max_var(),
            Expr::And(a, b) | Expr::Or(a, b) => a.max_var().max(b.max_var()),
        }
    }

    fn mark_vars(&self, seen: &mut [bool]) {
        match self {
            Expr::Var(v) => seen[v - 1] = true,
            Expr::Not(a) => a.mark_vars(seen),
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.mark_vars(seen);
                b.mark_vars(seen);
            }
        }
    }

    /// Variables in left-to-right occurrence order.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_occurrences(&mut out);
        out
    }

    fn collect_occurrences(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Var(v) => out.push(*v),
            Expr::Not(a) => a.collect_occurrences(out),
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.collect_occurrences(out);
                b.collect_occurrences(out);
            }
        }
    }

    pub fn has_or(&self) -> bool {
        match self {
            Expr::Var(_) => false,
            Expr::Not(a) => a.has_or(),
            Expr::And(a, b) => a.has_or() || b.has_or(),
            Expr::Or(..) => true,
        }
    }

    /// (NOT count, AND count)
    pub fn gate_counts(&self) -> (usize, usize) {
        match self {
            Expr::Var(_) => (0, 0),
            Expr::Not(a) => {
                let (n, m) = a.gate_counts();
                (n + 1, m)
            }
            Expr::And(a, b) | Expr::Or(a, b) => {
                let (n1, m1) = a.gate_counts();
                let (n2, m2) = b.gate_counts();
                (n1 + n2, m1 + m2 + 1)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(v) => write!(f, "x{v}"),
            Expr::Not(a) => write!(f, "!{a}"),
            Expr::And(a, b) => write!(f, "({a}&{b})"),
            Expr::Or(a, b) => write!(f, "({a}|{b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    pub expr: Expr,
    pub num_vars: usize,
}

/// Largest variable count accepted by exhaustive counting.
pub const COUNT_CAP: usize = 24;

impl Formula {
    /// Builds a formula, requiring every variable 1..=n to occur.
    pub fn new(expr: Expr, num_vars: usize) -> Result<Self> {
        if expr.max_var() > num_vars {
            return Err(Error::Format(format!("variable x{} exceeds declared count {num_vars}", expr.max_var())));
        }
        let mut seen = vec![false; num_vars];
        expr.mark_vars(&mut seen);
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Format(format!("variable x{} never occurs", v + 1)));
        }
        Ok(Formula { expr, num_vars })
    }

    pub fn from_expr(expr: Expr) -> Result<Self> {
        let n = expr.max_var();
        Formula::new(expr, n)
    }

    pub fn evaluate(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() != self.num_vars {
            return Err(Error::Dimension { expected: self.num_vars, found: assignment.len() });
        }
        Ok(self.expr.eval(assignment))
    }

    pub fn brute_force_count(&self) -> Result<u64> {
        if self.num_vars > COUNT_CAP {
            return Err(Error::cap("variables for exhaustive counting", COUNT_CAP, self.num_vars));
        }
        let mut a = vec![false; self.num_vars];
        let mut count = 0;
        for bits in 0u64..(1u64 << self.num_vars) {
            fill_assignment(bits, &mut a);
            count += self.expr.eval(&a) as u64;
        }
        Ok(count)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

/// Writes the low `a.len()` bits of `bits` into `a`; variable 1 is the lowest bit.
pub fn fill_assignment(bits: u64, a: &mut [bool]) {
    for (i, slot) in a.iter_mut().enumerate() {
        *slot = bits >> i & 1 == 1;
    }
}

/// All assignments of `n` variables in counting order.
pub fn all_assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..(1u64 << n)).map(move |bits| {
        let mut a = vec![false; n];
        fill_assignment(bits, &mut a);
        a
    })
}

fn right_fold(mut items: Vec<Expr>, join: fn(Expr, Expr) -> Expr) -> Option<Expr> {
    let mut acc = items.pop()?;
    while let Some(e) = items.pop() {
        acc = join(e, acc);
    }
    Some(acc)
}

pub fn parse_dimacs(text: &str) -> Result<Formula> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() {
                return Err(Error::parse(format!("line {line_no}"), "duplicate header"));
            }
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(Error::parse(format!("line {line_no}"), "expected `p cnf <vars> <clauses>`"));
            }
            let n = parts[2].parse().map_err(|_| Error::parse(format!("line {line_no}"), "bad variable count"))?;
            let m = parts[3].parse().map_err(|_| Error::parse(format!("line {line_no}"), "bad clause count"))?;
            header = Some((n, m, line_no));
            continue;
        }
        let Some((n, _, _)) = header else {
            return Err(Error::parse(format!("line {line_no}"), "clause before header"));
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::parse(format!("line {line_no}"), format!("bad literal `{tok}`")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(Error::parse(format!("line {line_no}"), "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > n {
                    return Err(Error::Format(format!("line {line_no}: variable {} exceeds header count {n}", lit.abs())));
                }
                current.push(lit);
            }
        }
    }
    let Some((n, m, _)) = header else {
        return Err(Error::parse(format!("line {last_line}"), "missing `p cnf` header"));
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != m {
        return Err(Error::Format(format!("header declares {m} clauses, found {}", clauses.len())));
    }
    let lit = |l: i64| {
        let v = Expr::Var(l.unsigned_abs() as usize);
        if l < 0 {
            Expr::not(v)
        } else {
            v
        }
    };
    let exprs: Vec<Expr> = clauses
        .into_iter()
        .map(|c| right_fold(c.into_iter().map(lit).collect(), Expr::or).unwrap())
        .collect();
    let expr = right_fold(exprs, Expr::and).ok_or_else(|| Error::Format("formula has no clauses".into()))?;
    Formula::new(expr, n)
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::parse(format!("position {}", self.pos + 1), msg)
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'!') | Some(b'~') => {
                self.pos += 1;
                Ok(Expr::not(self.expr()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.expr()?;
                let op = self.peek().ok_or_else(|| self.err("expected `&` or `|`"))?;
                if op != b'&' && op != b'|' {
                    return Err(self.err("expected `&` or `|`"));
                }
                self.pos += 1;
                let b = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(if op == b'&' { Expr::and(a, b) } else { Expr::or(a, b) })
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let v: usize = digits.parse().map_err(|_| self.err("expected variable index"))?;
                if v == 0 {
                    return Err(self.err("variables are numbered from 1"));
                }
                Ok(Expr::Var(v))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Grammar: `expr := var | '!' expr | '(' expr ('&'|'|') expr ')'`, with `var := x<digits>`.
pub fn parse_expression(text: &str) -> Result<Formula> {
    let mut p = ExprParser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Formula::from_expr(e)
}

/// Parses DIMACS when the text carries a `p cnf` header, otherwise the expression grammar.
pub fn parse_any(text: &str) -> Result<Formula> {
    let is_dimacs = text.lines().any(|l| l.trim_start().starts_with("p cnf") || l.trim_start().starts_with("p "));
    if is_dimacs {
        parse_dimacs(text)
    } else {
        parse_expression(text)
    }
}

fn eliminate(e: &Expr) -> Expr {
    match e {
        Expr::Var(v) => Expr::Var(*v),
        Expr::Not(a) => Expr::not(eliminate(a)),
        Expr::And(a, b) => Expr::and(eliminate(a), eliminate(b)),
        Expr::Or(a, b) => Expr::not(Expr::and(Expr::not(eliminate(a)), Expr::not(eliminate(b)))),
    }
}

/// Rewrites every OR as NOT(AND(NOT, NOT)).
pub fn eliminate_or(f: &Formula) -> Formula {
    Formula { expr: eliminate(&f.expr), num_vars: f.num_vars }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: usize) -> Expr {
        Expr::Var(v)
    }

    #[test]
    fn dimacs_examples() {
        let f = parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap();
        assert_eq!(f.expr, Expr::or(x(1), x(2)));
        let f = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
        assert_eq!(f.expr, Expr::and(x(1), Expr::not(x(1))));
        let f = parse_dimacs("c three clauses\np cnf 3 3\n1 2 0\n-2 3 0\n-1 -3 0\n").unwrap();
        assert_eq!(f.num_vars, 3);
        assert_eq!(f.to_string(), "((x1|x2)&((!x2|x3)&(!x1|!x3)))");
    }

    #[test]
    fn dimacs_errors() {
        let e = parse_dimacs("p cnf 2 1\n1 3 0\n").unwrap_err();
        assert!(matches!(e, Error::Format(_)));
        let e = parse_dimacs("p cnf 2 1\n1 a 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { ref location, .. } if location == "line 2"));
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 2 0\n").is_err());
    }

    #[test]
    fn expression_examples() {
        let f = parse_expression("(x1&!x1)").unwrap();
        assert_eq!(f.expr, Expr::and(x(1), Expr::not(x(1))));
        let f = parse_expression("x1").unwrap();
        assert_eq!(f.num_vars, 1);
        let f = parse_expression("((x1|x2)&((!x2|x3)&(!x1|!x3)))").unwrap();
        assert_eq!(f.num_vars, 3);
        assert!(f.evaluate(&[true, false, false]).unwrap());
    }

    #[test]
    fn expression_errors() {
        let e = parse_expression("(x1 ^ x2)").unwrap_err();
        assert!(matches!(e, Error::Parse { ref location, .. } if location == "position 5"));
        assert!(parse_expression("(x1&x3)").is_err());
        assert!(parse_expression("x1 x2").is_err());
        assert!(parse_expression("x0").is_err());
    }

    #[test]
    fn or_elimination() {
        let f = parse_expression("(x1|x2)").unwrap();
        assert_eq!(eliminate_or(&f).expr, Expr::not(Expr::and(Expr::not(x(1)), Expr::not(x(2)))));
        let g = parse_expression("(x1&!x2)").unwrap();
        assert_eq!(eliminate_or(&g), g);
    }

    #[test]
    fn counting() {
        assert_eq!(parse_expression("(x1|x2)").unwrap().brute_force_count().unwrap(), 3);
        assert_eq!(parse_expression("(x1&!x1)").unwrap().brute_force_count().unwrap(), 0);
        assert!(parse_expression("x1").unwrap().evaluate(&[true, false]).is_err());
    }
}
