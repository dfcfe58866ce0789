//! Line-oriented instance files.
//!
//! ```text
//! surfred-instance 1
//! dims <w> <h>
//! ordering rows-bottom-up
//! mode <tag> [p=<q>] [r=<q>] [m=<factor>]
//! ell <n>
//! noise <count>
//! qubit <index> <px> <py> <pz>
//! syndrome <count>
//! flip <generator>
//! [sidecar ... end]
//! ```
//!
//! Rationals are written `num/den`. Cells are written `c,r`.

use std::fmt::Write as _;

use crate::compile::{Cell, CompileMode, CompiledInstance, Placement, Route, Signal};
use crate::decoders::DecodingInstance;
use crate::error::{Error, Result};
use crate::gadget::GadgetKind;
use crate::lattice::{RotatedLayout, SyndromeVector};
use crate::noise::{NoiseModel, QubitNoise};
use crate::pauli::Letter;
use crate::rational::{format_rational, parse_rational, ApproxFactor};

pub const FORMAT_HEADER: &str = "surfred-instance";
pub const FORMAT_VERSION: u32 = 1;
pub const ORDERING_TAG: &str = "rows-bottom-up";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedInstance {
    pub decoding: DecodingInstance,
    /// Present when the file carries a placement sidecar.
    pub compiled: Option<CompiledInstance>,
}

fn mode_line(mode: Option<&CompileMode>) -> String {
    let Some(mode) = mode else { return "mode none".into() };
    let mut s = format!("mode {}", mode.tag());
    match mode {
        CompileMode::Qmld { p } => write!(s, " p={}", format_rational(p)).unwrap(),
        CompileMode::QmldApprox { p, m } => write!(s, " p={} m={m}", format_rational(p)).unwrap(),
        CompileMode::QmldUniform { p, m } => {
            write!(s, " p={}", format_rational(p)).unwrap();
            if let Some(m) = m {
                write!(s, " m={m}").unwrap();
            }
        }
        CompileMode::Dqmld { r } => write!(s, " r={}", format_rational(r)).unwrap(),
        CompileMode::DqmldMajority => {}
    }
    s
}

fn cell(c: Cell) -> String {
    format!("{},{}", c.0, c.1)
}

fn write_core(out: &mut String, d: &DecodingInstance, mode: Option<&CompileMode>, ell: u64) {
    writeln!(out, "{FORMAT_HEADER} {FORMAT_VERSION}").unwrap();
    writeln!(out, "dims {} {}", d.layout.width(), d.layout.height()).unwrap();
    writeln!(out, "ordering {ORDERING_TAG}").unwrap();
    writeln!(out, "{}", mode_line(mode)).unwrap();
    writeln!(out, "ell {ell}").unwrap();
    let entries = d.noise.entries();
    writeln!(out, "noise {}", entries.len()).unwrap();
    for (q, n) in entries {
        writeln!(out, "qubit {q} {} {} {}", format_rational(&n.px), format_rational(&n.py), format_rational(&n.pz))
            .unwrap();
    }
    writeln!(out, "syndrome {}", d.syndrome.flipped.len()).unwrap();
    for g in &d.syndrome.flipped {
        writeln!(out, "flip {g}").unwrap();
    }
}

pub fn serialize_decoding(d: &DecodingInstance) -> String {
    let mut out = String::new();
    write_core(&mut out, d, None, 0);
    out
}

pub fn serialize(inst: &CompiledInstance) -> String {
    let mut out = String::new();
    write_core(&mut out, &DecodingInstance::from(inst), Some(&inst.mode), inst.ell);
    out.push_str("sidecar\n");
    writeln!(out, "vars {}", inst.num_vars).unwrap();
    for s in &inst.signals {
        match s {
            Signal::Var(v) => writeln!(out, "signal var {v}").unwrap(),
            Signal::Not(a) => writeln!(out, "signal not {a}").unwrap(),
            Signal::And(a, b) => writeln!(out, "signal and {a} {b}").unwrap(),
        }
    }
    writeln!(out, "output-signal {}", inst.output_signal).unwrap();
    if let Some(m) = &inst.approx_factor {
        writeln!(out, "approx-factor {}", format_rational(m)).unwrap();
    }
    if let Some(h) = inst.base_height {
        writeln!(out, "base-height {h}").unwrap();
    }
    for p in &inst.placements {
        write!(out, "placement {} {} {} {}", p.kind.id(), p.param, p.anchor.0, p.anchor.1).unwrap();
        for i in &p.inputs {
            write!(out, " {i}").unwrap();
        }
        out.push('\n');
    }
    for r in &inst.routes {
        write!(out, "route {} {} {}", r.letter.as_char(), r.placement, r.port).unwrap();
        for &c in &r.cells {
            write!(out, " {}", cell(c)).unwrap();
        }
        out.push('\n');
    }
    out.push_str("output-wire");
    for &c in &inst.output_wire {
        write!(out, " {}", cell(c)).unwrap();
    }
    out.push('\n');
    match inst.special_qubit {
        Some(c) => writeln!(out, "special {}", cell(c)).unwrap(),
        None => out.push_str("special none\n"),
    }
    for &c in &inst.variable_ports {
        writeln!(out, "variable-port {}", cell(c)).unwrap();
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    it: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, l) in self.it.by_ref() {
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            return Some((i + 1, l.split_whitespace().collect()));
        }
        None
    }

    fn expect(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.next() {
            Some((n, t)) if t[0] == key => Ok((n, t)),
            Some((n, t)) => Err(Error::parse(format!("line {n}"), format!("expected `{key}`, found `{}`", t[0]))),
            None => Err(Error::parse("end of file", format!("expected `{key}`"))),
        }
    }
}

fn at(n: usize) -> String {
    format!("line {n}")
}

fn num<T: std::str::FromStr>(s: &str, n: usize) -> Result<T> {
    s.parse().map_err(|_| Error::parse(at(n), format!("bad number `{s}`")))
}

fn arity(t: &[&str], k: usize, n: usize) -> Result<()> {
    if t.len() != k {
        return Err(Error::parse(at(n), format!("`{}` takes {} fields, found {}", t[0], k - 1, t.len() - 1)));
    }
    Ok(())
}

fn parse_cell(s: &str, n: usize) -> Result<Cell> {
    let (a, b) = s.split_once(',').ok_or_else(|| Error::parse(at(n), format!("bad cell `{s}`")))?;
    Ok((num(a, n)?, num(b, n)?))
}

fn parse_mode(t: &[&str], n: usize) -> Result<Option<CompileMode>> {
    let mut p = None;
    let mut r = None;
    let mut m = None;
    for kv in &t[2..] {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::parse(at(n), format!("bad mode field `{kv}`")))?;
        match k {
            "p" => p = Some(parse_rational(v)?),
            "r" => r = Some(parse_rational(v)?),
            "m" => m = Some(ApproxFactor::parse(v)?),
            _ => return Err(Error::parse(at(n), format!("unknown mode field `{k}`"))),
        }
    }
    fn need<T>(x: Option<T>, what: &str, n: usize) -> Result<T> {
        x.ok_or_else(|| Error::parse(at(n), format!("mode needs {what}")))
    }
    let mode = match t.get(1).copied() {
        Some("none") => return Ok(None),
        Some("qmld") => CompileMode::Qmld { p: need(p.clone(), "p", n)? },
        Some("qmld-approx") => CompileMode::QmldApprox { p: need(p.clone(), "p", n)?, m: need(m.clone(), "m", n)? },
        Some("qmld-uniform") => CompileMode::QmldUniform { p: need(p.clone(), "p", n)?, m },
        Some("dqmld") => CompileMode::Dqmld { r: need(r.clone(), "r", n)? },
        Some("dqmld-majority") => CompileMode::DqmldMajority,
        other => return Err(Error::parse(at(n), format!("unknown mode `{}`", other.unwrap_or("")))),
    };
    mode.validate()?;
    Ok(Some(mode))
}

pub fn parse(text: &str) -> Result<ParsedInstance> {
    let mut lines = Lines { it: text.lines().enumerate().peekable() };
    let (n, t) = lines.next().ok_or_else(|| Error::parse("line 1", "empty instance file"))?;
    if t.first() != Some(&FORMAT_HEADER) || t.len() != 2 {
        return Err(Error::parse(at(n), format!("not an instance file (expected `{FORMAT_HEADER} {FORMAT_VERSION}`)")));
    }
    if t[1] != FORMAT_VERSION.to_string() {
        return Err(Error::Format(format!(
            "unsupported instance format version {} (this build reads version {FORMAT_VERSION})",
            t[1]
        )));
    }
    let (n, t) = lines.expect("dims")?;
    arity(&t, 3, n)?;
    let layout = RotatedLayout::new(num(t[1], n)?, num(t[2], n)?)?;
    let (n, t) = lines.expect("ordering")?;
    arity(&t, 2, n)?;
    if t[1] != ORDERING_TAG {
        return Err(Error::parse(at(n), format!("unsupported generator ordering `{}`", t[1])));
    }
    let (n, t) = lines.expect("mode")?;
    let mode = parse_mode(&t, n)?;
    let (n, t) = lines.expect("ell")?;
    arity(&t, 2, n)?;
    let ell: u64 = num(t[1], n)?;

    let (n, t) = lines.expect("noise")?;
    arity(&t, 2, n)?;
    let count: usize = num(t[1], n)?;
    let mut noise = NoiseModel::new(layout.num_qubits());
    let mut last = None;
    // compiled instances repeat a handful of distributions many times
    let mut seen: std::collections::HashMap<[&str; 3], QubitNoise> = std::collections::HashMap::new();
    for _ in 0..count {
        let (n, t) = lines.expect("qubit")?;
        arity(&t, 5, n)?;
        let q: usize = num(t[1], n)?;
        if last.is_some_and(|l| q <= l) {
            return Err(Error::parse(at(n), "qubit lines must be strictly ascending"));
        }
        last = Some(q);
        let key = [t[2], t[3], t[4]];
        let qn = match seen.get(&key) {
            Some(qn) => qn.clone(),
            None => {
                let qn = QubitNoise::new(parse_rational(t[2])?, parse_rational(t[3])?, parse_rational(t[4])?)?;
                seen.insert(key, qn.clone());
                qn
            }
        };
        noise.set(q, qn).map_err(|e| Error::parse(at(n), e.to_string()))?;
    }
    let (n, t) = lines.expect("syndrome")?;
    arity(&t, 2, n)?;
    let count: usize = num(t[1], n)?;
    let mut flipped = Vec::with_capacity(count);
    for _ in 0..count {
        let (n, t) = lines.expect("flip")?;
        arity(&t, 2, n)?;
        let g: usize = num(t[1], n)?;
        if flipped.last().is_some_and(|&l| g <= l) {
            return Err(Error::parse(at(n), "flip lines must be strictly ascending"));
        }
        flipped.push(g);
    }
    let decoding = DecodingInstance::new(layout, noise, SyndromeVector::new(flipped))?;

    let compiled = match lines.next() {
        None => None,
        Some((n, t)) if t[0] == "sidecar" => {
            let mode = mode.ok_or_else(|| Error::parse(at(n), "sidecar requires a compile mode"))?;
            Some(parse_sidecar(&mut lines, &decoding, mode, ell)?)
        }
        Some((n, t)) => return Err(Error::parse(at(n), format!("unexpected `{}`", t[0]))),
    };
    if let Some((n, t)) = lines.next() {
        return Err(Error::parse(at(n), format!("trailing content `{}`", t[0])));
    }
    Ok(ParsedInstance { decoding, compiled })
}

fn parse_sidecar(lines: &mut Lines<'_>, d: &DecodingInstance, mode: CompileMode, ell: u64) -> Result<CompiledInstance> {
    let (n, t) = lines.expect("vars")?;
    arity(&t, 2, n)?;
    let num_vars: usize = num(t[1], n)?;
    let mut signals = Vec::new();
    let mut output_signal = None;
    let mut approx_factor = None;
    let mut base_height = None;
    let mut placements = Vec::new();
    let mut routes = Vec::new();
    let mut output_wire = None;
    let mut special = None;
    let mut variable_ports = Vec::new();
    loop {
        let (n, t) = lines.next().ok_or_else(|| Error::parse("end of file", "sidecar without `end`"))?;
        match t[0] {
            "end" => break,
            "signal" => {
                let s = match (t.get(1).copied(), t.len()) {
                    (Some("var"), 3) => Signal::Var(num(t[2], n)?),
                    (Some("not"), 3) => Signal::Not(num(t[2], n)?),
                    (Some("and"), 4) => Signal::And(num(t[2], n)?, num(t[3], n)?),
                    _ => return Err(Error::parse(at(n), "bad signal line")),
                };
                let k = signals.len();
                let ok = match s {
                    Signal::Var(v) => v >= 1 && v <= num_vars,
                    Signal::Not(a) => a < k,
                    Signal::And(a, b) => a < k && b < k,
                };
                if !ok {
                    return Err(Error::parse(at(n), "signal refers forward or out of range"));
                }
                signals.push(s);
            }
            "output-signal" => {
                arity(&t, 2, n)?;
                output_signal = Some(num(t[1], n)?);
            }
            "approx-factor" => {
                arity(&t, 2, n)?;
                approx_factor = Some(parse_rational(t[1])?);
            }
            "base-height" => {
                arity(&t, 2, n)?;
                base_height = Some(num(t[1], n)?);
            }
            "placement" => {
                if t.len() < 5 {
                    return Err(Error::parse(at(n), "placement needs kind, param, x, y"));
                }
                let kind = GadgetKind::parse(t[1]).ok_or_else(|| Error::parse(at(n), format!("unknown gadget `{}`", t[1])))?;
                let inputs = t[5..].iter().map(|s| num(s, n)).collect::<Result<Vec<usize>>>()?;
                placements.push(Placement { kind, param: num(t[2], n)?, anchor: (num(t[3], n)?, num(t[4], n)?), inputs });
            }
            "route" => {
                if t.len() < 5 {
                    return Err(Error::parse(at(n), "route needs letter, placement, port, cells"));
                }
                let letter = match t[1] {
                    "X" => Letter::X,
                    "Z" => Letter::Z,
                    other => return Err(Error::parse(at(n), format!("route letter `{other}`"))),
                };
                let cells = t[4..].iter().map(|s| parse_cell(s, n)).collect::<Result<Vec<_>>>()?;
                routes.push(Route { letter, placement: num(t[2], n)?, port: t[3].to_string(), cells });
            }
            "output-wire" => {
                output_wire = Some(t[1..].iter().map(|s| parse_cell(s, n)).collect::<Result<Vec<_>>>()?);
            }
            "special" => {
                arity(&t, 2, n)?;
                special = Some(if t[1] == "none" { None } else { Some(parse_cell(t[1], n)?) });
            }
            "variable-port" => {
                arity(&t, 2, n)?;
                variable_ports.push(parse_cell(t[1], n)?);
            }
            other => return Err(Error::parse(at(n), format!("unknown sidecar record `{other}`"))),
        }
    }
    let missing = |what: &str| Error::parse("sidecar", format!("missing `{what}`"));
    CompiledInstance::from_parts(
        d.layout.clone(),
        d.noise.clone(),
        d.syndrome.clone(),
        mode,
        ell,
        num_vars,
        signals,
        output_signal.ok_or_else(|| missing("output-signal"))?,
        placements,
        routes,
        output_wire.ok_or_else(|| missing("output-wire"))?,
        special.ok_or_else(|| missing("special"))?,
        variable_ports,
        approx_factor,
        base_height,
    )
}
