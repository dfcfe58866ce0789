//! Gadget templates: noise patch, forced syndromes, ports and witness tables.
//!
//! Templates live in `templates/*.tpl` as plain text. Coordinates are template-local and
//! follow the lattice checkerboard, so a template must be placed at an anchor with even
//! coordinate sum.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::gf2::{self, Check, Enumeration, Problem};
use crate::lattice::{plane_kind, plaquette_cells, plaquettes_of_cell, StabKind};
use crate::pauli::{Letter, LetterSet, PauliOperator};

pub type Cell = (i64, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GadgetKind {
    Variable,
    Not,
    Fanout,
    And,
    ConvertXToZ,
    ConvertZToX,
    CrossXZ,
    WireX,
    WireZ,
}

impl GadgetKind {
    pub const ALL: [GadgetKind; 9] = [
        GadgetKind::Variable,
        GadgetKind::Not,
        GadgetKind::Fanout,
        GadgetKind::And,
        GadgetKind::ConvertXToZ,
        GadgetKind::ConvertZToX,
        GadgetKind::CrossXZ,
        GadgetKind::WireX,
        GadgetKind::WireZ,
    ];

    pub fn id(self) -> &'static str {
        match self {
            GadgetKind::Variable => "VARIABLE",
            GadgetKind::Not => "NOT",
            GadgetKind::Fanout => "FANOUT",
            GadgetKind::And => "AND",
            GadgetKind::ConvertXToZ => "CONVERT_X_TO_Z",
            GadgetKind::ConvertZToX => "CONVERT_Z_TO_X",
            GadgetKind::CrossXZ => "CROSS_XZ",
            GadgetKind::WireX => "WIRE_X",
            GadgetKind::WireZ => "WIRE_Z",
        }
    }

    pub fn parse(id: &str) -> Option<GadgetKind> {
        let up = id.trim().to_ascii_uppercase();
        GadgetKind::ALL.into_iter().find(|k| k.id() == up)
    }

    fn source(self) -> &'static str {
        match self {
            GadgetKind::Variable => include_str!("../templates/variable.tpl"),
            GadgetKind::Not => include_str!("../templates/not.tpl"),
            GadgetKind::Fanout => include_str!("../templates/fanout.tpl"),
            GadgetKind::And => include_str!("../templates/and.tpl"),
            GadgetKind::ConvertXToZ => include_str!("../templates/convert_x_to_z.tpl"),
            GadgetKind::ConvertZToX => include_str!("../templates/convert_z_to_x.tpl"),
            GadgetKind::CrossXZ => include_str!("../templates/cross_xz.tpl"),
            GadgetKind::WireX => include_str!("../templates/wire_x.tpl"),
            GadgetKind::WireZ => include_str!("../templates/wire_z.tpl"),
        }
    }

    /// Smallest accepted size parameter (FANOUT width, WIRE length).
    pub fn min_param(self) -> usize {
        match self {
            GadgetKind::Fanout => FANOUT_MIN_WIDTH,
            _ => 1,
        }
    }
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

pub const FANOUT_MIN_WIDTH: usize = 19;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Bottom,
    Top,
    Left,
    Right,
}

impl Side {
    fn parse(s: &str) -> Option<Side> {
        match s {
            "bottom" => Some(Side::Bottom),
            "top" => Some(Side::Top),
            "left" => Some(Side::Left),
            "right" => Some(Side::Right),
            _ => None,
        }
    }

    fn vertical(self) -> bool {
        matches!(self, Side::Bottom | Side::Top)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub side: Side,
    /// Column for bottom/top ports, row for left/right ports.
    pub offset: i64,
    /// Letter of the string entering or leaving.
    pub wire: StabKind,
    pub dir: Direction,
    /// Edge qubit of the patch on that line.
    pub qubit: Cell,
    /// Plaquette just outside `qubit` that detects `wire`.
    pub plaquette: Cell,
}

impl Port {
    /// Direction a string leaves the template through this port.
    pub fn outward(&self) -> Cell {
        match self.side {
            Side::Bottom => (0, -1),
            Side::Top => (0, 1),
            Side::Left => (-1, 0),
            Side::Right => (1, 0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub inputs: Vec<bool>,
    pub outputs: Vec<bool>,
    pub pattern: BTreeMap<Cell, Letter>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stretch {
    pub vertical_axis: bool,
    pub index: i64,
    pub unit: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetTemplate {
    pub kind: GadgetKind,
    /// FANOUT width or WIRE length; 0 for fixed-size gadgets.
    pub param: usize,
    pub width: usize,
    pub height: usize,
    /// Allowed non-identity letters per cell; each listed letter has probability p.
    pub noise: BTreeMap<Cell, LetterSet>,
    /// Plaquettes forced to −1.
    pub syndromes: BTreeSet<Cell>,
    pub ports: Vec<Port>,
    /// Indexed by input bits, input port i being bit i.
    pub witnesses: Vec<Witness>,
    pub labels: BTreeMap<String, Cell>,
    pub stretch: Option<Stretch>,
}

struct RawPort {
    name: String,
    side: Side,
    offset: i64,
    wire: StabKind,
    dir: Direction,
}

fn bits(s: &str, line: usize) -> Result<Vec<bool>> {
    if s == "-" {
        return Ok(vec![]);
    }
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::parse(format!("line {line}"), format!("bad bit string `{s}`"))),
        })
        .collect()
}

fn num(s: &str, line: usize) -> Result<i64> {
    s.parse().map_err(|_| Error::parse(format!("line {line}"), format!("bad integer `{s}`")))
}

fn shift_cell(c: Cell, st: &Stretch, k: i64) -> Cell {
    if st.vertical_axis {
        (if c.0 > st.index { c.0 + k } else { c.0 }, c.1)
    } else {
        (c.0, if c.1 > st.index { c.1 + k } else { c.1 })
    }
}

fn stretch_map<V: Clone>(m: &BTreeMap<Cell, V>, st: &Stretch, k: i64) -> BTreeMap<Cell, V> {
    let mut out = BTreeMap::new();
    for (&c, v) in m {
        let on_axis = if st.vertical_axis { c.0 == st.index } else { c.1 == st.index };
        if on_axis {
            for d in 0..=k {
                let nc = if st.vertical_axis { (c.0 + d, c.1) } else { (c.0, c.1 + d) };
                out.insert(nc, v.clone());
            }
        } else {
            out.insert(shift_cell(c, st, k), v.clone());
        }
    }
    out
}

fn locate_port(noise: &BTreeMap<Cell, LetterSet>, raw: &RawPort) -> Result<(Cell, Cell)> {
    let on_line: Vec<Cell> = noise
        .keys()
        .copied()
        .filter(|&(c, r)| if raw.side.vertical() { c == raw.offset } else { r == raw.offset })
        .collect();
    let pick = match raw.side {
        Side::Bottom => on_line.iter().min_by_key(|c| c.1),
        Side::Top => on_line.iter().max_by_key(|c| c.1),
        Side::Left => on_line.iter().min_by_key(|c| c.0),
        Side::Right => on_line.iter().max_by_key(|c| c.0),
    };
    let &(c, r) = pick.ok_or_else(|| Error::Format(format!("port `{}` has no qubit on its line", raw.name)))?;
    let cands = match raw.side {
        Side::Bottom => [(c - 1, r - 1), (c, r - 1)],
        Side::Top => [(c - 1, r), (c, r)],
        Side::Left => [(c - 1, r - 1), (c - 1, r)],
        Side::Right => [(c, r - 1), (c, r)],
    };
    let want = raw.wire.other();
    let p = cands.into_iter().find(|&(pc, pr)| plane_kind(pc, pr) == want).unwrap();
    Ok(((c, r), p))
}

impl GadgetTemplate {
    /// Parses template text. `units` is the number of stretch repetitions applied.
    pub fn parse(text: &str, units: usize) -> Result<Self> {
        let mut kind = None;
        let mut size = None;
        let mut stretch = None;
        let mut noise = BTreeMap::new();
        let mut syndromes = BTreeSet::new();
        let mut raw_ports: Vec<RawPort> = Vec::new();
        let mut labels = BTreeMap::new();
        let mut raw_wit: Vec<(Vec<bool>, Vec<bool>, BTreeMap<Cell, Letter>)> = Vec::new();
        let mut open: Option<(Vec<bool>, Vec<bool>, BTreeMap<Cell, Letter>)> = None;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = |m: &str| Error::parse(format!("line {ln}"), m.to_string());
            if let Some(w) = open.as_mut() {
                match f[0] {
                    "e" if f.len() == 4 => {
                        let cell = (num(f[1], ln)?, num(f[2], ln)?);
                        let l = f[3].chars().next().and_then(Letter::from_char).ok_or_else(|| bad("bad letter"))?;
                        if l == Letter::I || f[3].len() != 1 {
                            return Err(bad("witness letters must be X, Y or Z"));
                        }
                        if w.2.insert(cell, l).is_some() {
                            return Err(bad("duplicate witness cell"));
                        }
                    }
                    "end" => raw_wit.push(open.take().unwrap()),
                    _ => return Err(bad("expected `e` or `end` inside witness")),
                }
                continue;
            }
            match (f[0], f.len()) {
                ("template", 2) => {
                    kind = Some(GadgetKind::parse(f[1]).ok_or_else(|| bad("unknown template id"))?);
                }
                ("size", 3) => size = Some((num(f[1], ln)? as usize, num(f[2], ln)? as usize)),
                ("stretch", 4) => {
                    let vertical_axis = match f[1] {
                        "col" => true,
                        "row" => false,
                        _ => return Err(bad("stretch axis must be col or row")),
                    };
                    stretch = Some(Stretch { vertical_axis, index: num(f[2], ln)?, unit: num(f[3], ln)? as usize });
                }
                ("q", 4) => {
                    let cell = (num(f[1], ln)?, num(f[2], ln)?);
                    let ls = LetterSet::parse(f[3]).ok_or_else(|| bad("bad letters"))?;
                    if ls.contains(Letter::I) || ls.is_empty() {
                        return Err(bad("qubit letters must be a nonempty subset of XYZ"));
                    }
                    if noise.insert(cell, ls).is_some() {
                        return Err(bad("duplicate qubit"));
                    }
                }
                ("s", 4) => {
                    let cell = (num(f[1], ln)?, num(f[2], ln)?);
                    let k = f[3].chars().next().and_then(StabKind::from_char).ok_or_else(|| bad("bad kind"))?;
                    if plane_kind(cell.0, cell.1) != k {
                        return Err(bad("syndrome kind disagrees with the checkerboard"));
                    }
                    syndromes.insert(cell);
                }
                ("port", 6) => {
                    let side = Side::parse(f[2]).ok_or_else(|| bad("bad port side"))?;
                    let wire = f[4].chars().next().and_then(StabKind::from_char).ok_or_else(|| bad("bad wire kind"))?;
                    let dir = match f[5] {
                        "in" => Direction::In,
                        "out" => Direction::Out,
                        _ => return Err(bad("port direction must be in or out")),
                    };
                    raw_ports.push(RawPort { name: f[1].to_string(), side, offset: num(f[3], ln)?, wire, dir });
                }
                ("label", 4) => {
                    labels.insert(f[1].to_string(), (num(f[2], ln)?, num(f[3], ln)?));
                }
                ("witness", 3) => open = Some((bits(f[1], ln)?, bits(f[2], ln)?, BTreeMap::new())),
                _ => return Err(bad(&format!("unrecognized record `{line}`"))),
            }
        }
        if open.is_some() {
            return Err(Error::Format("unterminated witness section".into()));
        }
        let kind = kind.ok_or_else(|| Error::Format("missing `template` record".into()))?;
        let (mut width, mut height) = size.ok_or_else(|| Error::Format("missing `size` record".into()))?;
        if units > 0 && stretch.is_none() {
            return Err(Error::InvalidParameter(format!("{kind} has no stretch rule")));
        }
        let mut witnesses_raw = raw_wit;
        if let Some(st) = stretch.filter(|_| units > 0) {
            let k = (st.unit * units) as i64;
            noise = stretch_map(&noise, &st, k);
            syndromes = syndromes
                .into_iter()
                .map(|c| {
                    let on = if st.vertical_axis { c.0 >= st.index } else { c.1 >= st.index };
                    if on {
                        if st.vertical_axis { (c.0 + k, c.1) } else { (c.0, c.1 + k) }
                    } else {
                        c
                    }
                })
                .collect();
            for p in raw_ports.iter_mut() {
                if p.side.vertical() == st.vertical_axis && p.offset > st.index {
                    p.offset += k;
                }
            }
            for w in witnesses_raw.iter_mut() {
                w.2 = stretch_map(&w.2, &st, k);
            }
            labels = labels.into_iter().map(|(n, c)| (n, shift_cell(c, &st, k))).collect();
            if st.vertical_axis {
                width += k as usize;
            } else {
                height += k as usize;
            }
        }
        let mut ports = Vec::new();
        for rp in raw_ports {
            let (qubit, plaquette) = locate_port(&noise, &rp)?;
            ports.push(Port { name: rp.name, side: rp.side, offset: rp.offset, wire: rp.wire, dir: rp.dir, qubit, plaquette });
        }
        let n_in = ports.iter().filter(|p| p.dir == Direction::In).count();
        let n_out = ports.len() - n_in;
        let mut witnesses: Vec<Option<Witness>> = vec![None; 1 << n_in];
        for (inputs, outputs, pattern) in witnesses_raw {
            if inputs.len() != n_in || outputs.len() != n_out {
                return Err(Error::Format("witness bit strings do not match the port counts".into()));
            }
            for (c, l) in &pattern {
                if !noise.get(c).is_some_and(|s| s.contains(*l)) {
                    return Err(Error::Format(format!("witness letter {l} at {c:?} is outside the noise patch")));
                }
            }
            let key = inputs.iter().enumerate().map(|(i, &b)| (b as usize) << i).sum::<usize>();
            if witnesses[key].is_some() {
                return Err(Error::Format("duplicate witness entry".into()));
            }
            witnesses[key] = Some(Witness { inputs, outputs, pattern });
        }
        let witnesses = witnesses
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Format("witness table is not total over inputs".into()))?;
        let param = match kind {
            GadgetKind::Fanout => width,
            GadgetKind::WireX => height,
            GadgetKind::WireZ => width,
            _ => 0,
        };
        Ok(GadgetTemplate { kind, param, width, height, noise, syndromes, ports, witnesses, labels, stretch })
    }

    pub fn in_ports(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.dir == Direction::In)
    }

    pub fn out_ports(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.dir == Direction::Out)
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn out_index(&self, name: &str) -> Option<usize> {
        self.out_ports().position(|p| p.name == name)
    }

    pub fn witness(&self, inputs: &[bool]) -> Result<&Witness> {
        let n = self.in_ports().count();
        if inputs.len() != n {
            return Err(Error::Dimension { expected: n, found: inputs.len() });
        }
        let key = inputs.iter().enumerate().map(|(i, &b)| (b as usize) << i).sum::<usize>();
        Ok(&self.witnesses[key])
    }

    /// Local witness error on the template's bounding box (index `row*width + col`) and output bits.
    pub fn witness_error(&self, inputs: &[bool]) -> Result<(PauliOperator, Vec<bool>)> {
        let w = self.witness(inputs)?;
        let mut p = PauliOperator::identity(self.width * self.height);
        for (&(c, r), &l) in &w.pattern {
            p.set(r as usize * self.width + c as usize, l)?;
        }
        Ok((p, w.outputs.clone()))
    }

    /// Letters drawn per cell, including identity.
    pub fn domains(&self) -> BTreeMap<Cell, LetterSet> {
        self.noise.iter().map(|(&c, &s)| (c, s.with(Letter::I))).collect()
    }

    /// Plaquettes detecting `kind` with odd count under `pattern`.
    pub fn defects(pattern: &BTreeMap<Cell, Letter>) -> BTreeSet<Cell> {
        let mut out = BTreeSet::new();
        for (&(c, r), &l) in pattern {
            for p in plaquettes_of_cell(c, r) {
                if plane_kind(p.0, p.1).detects(l) && !out.remove(&p) {
                    out.insert(p);
                }
            }
        }
        out
    }

    /// Output bits read off a local pattern at the out-port plaquettes.
    pub fn outputs_of(&self, pattern: &BTreeMap<Cell, Letter>) -> Vec<bool> {
        let d = Self::defects(pattern);
        self.out_ports().map(|p| d.contains(&p.plaquette)).collect()
    }

    fn problem(&self, inputs: &[bool], domains: &BTreeMap<Cell, LetterSet>) -> (Problem, Vec<Cell>) {
        let cells: Vec<Cell> = domains.keys().copied().collect();
        let index: BTreeMap<Cell, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let free: BTreeSet<Cell> = self.out_ports().map(|p| p.plaquette).collect();
        let mut target: BTreeSet<Cell> = self.syndromes.clone();
        for (p, &b) in self.in_ports().zip(inputs) {
            if b && !target.remove(&p.plaquette) {
                target.insert(p.plaquette);
            }
        }
        let plaqs: BTreeSet<Cell> = cells.iter().flat_map(|&(c, r)| plaquettes_of_cell(c, r)).collect();
        let mut checks = Vec::new();
        for p in plaqs {
            if free.contains(&p) {
                continue;
            }
            let vars = plaquette_cells(p.0, p.1).iter().filter_map(|c| index.get(c).copied()).collect();
            checks.push(Check { kind: plane_kind(p.0, p.1), vars, parity: target.contains(&p) });
        }
        let problem = Problem { domains: cells.iter().map(|c| domains[c]).collect(), checks };
        (problem, cells)
    }

    /// All nonzero-probability local errors consistent with the forced syndromes and the
    /// given input boundary conditions, under possibly overridden domains.
    pub fn consistent_errors(
        &self,
        inputs: &[bool],
        domains: &BTreeMap<Cell, LetterSet>,
        budget: u64,
    ) -> Result<(Vec<BTreeMap<Cell, Letter>>, u64)> {
        let (problem, cells) = self.problem(inputs, domains);
        match gf2::enumerate(&problem, budget) {
            Enumeration::Complete(sols) => {
                let explored = sols.len() as u64;
                let out = sols
                    .into_iter()
                    .map(|s| cells.iter().zip(s).filter(|(_, l)| *l != Letter::I).map(|(&c, l)| (c, l)).collect())
                    .collect();
                Ok((out, explored))
            }
            Enumeration::Inconclusive { explored } => {
                Err(Error::Inconclusive(format!("{} enumeration stopped after {explored} steps", self.kind)))
            }
        }
    }
}

/// Loads a built-in template. `param` is the FANOUT width or WIRE length (ignored otherwise).
pub fn template(kind: GadgetKind, param: Option<usize>) -> Result<GadgetTemplate> {
    let base = GadgetTemplate::parse(kind.source(), 0)?;
    let units = match (kind, param) {
        (GadgetKind::Fanout, Some(w)) => {
            if w < FANOUT_MIN_WIDTH || !(w - FANOUT_MIN_WIDTH).is_multiple_of(2) {
                return Err(Error::InvalidParameter(format!(
                    "FANOUT width must be odd and at least {FANOUT_MIN_WIDTH}, got {w}"
                )));
            }
            (w - FANOUT_MIN_WIDTH) / 2
        }
        (GadgetKind::WireX | GadgetKind::WireZ, Some(len)) => {
            if len == 0 {
                return Err(Error::InvalidParameter("WIRE length must be at least 1".into()));
            }
            len - 1
        }
        _ => 0,
    };
    if units == 0 {
        Ok(base)
    } else {
        GadgetTemplate::parse(kind.source(), units)
    }
}

/// Every built-in template at its default size plus the stretch variants that get verified.
pub fn corpus() -> Result<Vec<GadgetTemplate>> {
    let mut out = Vec::new();
    for k in GadgetKind::ALL {
        out.push(template(k, None)?);
        match k {
            GadgetKind::Fanout => out.push(template(k, Some(FANOUT_MIN_WIDTH + 2))?),
            GadgetKind::WireX | GadgetKind::WireZ => out.push(template(k, Some(5))?),
            _ => {}
        }
    }
    Ok(out)
}

/// Option-qubit cap for verification and support-restricted search.
pub const DEFAULT_SUPPORT_CAP: usize = 4096;
pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub id: String,
    pub param: usize,
    /// Consistent errors summed over every input combination.
    pub count: usize,
    pub per_input: Vec<(Vec<bool>, usize)>,
    pub matched: bool,
    pub mismatch: Option<String>,
    pub explored: u64,
    pub elapsed: Duration,
}

pub fn verify_gadget(t: &GadgetTemplate) -> Result<VerificationReport> {
    verify_gadget_with(t, DEFAULT_SUPPORT_CAP, DEFAULT_NODE_BUDGET)
}

pub fn verify_gadget_with(t: &GadgetTemplate, cap: usize, budget: u64) -> Result<VerificationReport> {
    if t.noise.len() > cap {
        return Err(Error::cap("template option qubits", cap, t.noise.len()));
    }
    let start = Instant::now();
    let domains = t.domains();
    let mut count = 0;
    let mut per_input = Vec::new();
    let mut mismatch = None;
    let mut explored = 0;
    for w in &t.witnesses {
        let (errs, ex) = t.consistent_errors(&w.inputs, &domains, budget)?;
        explored += ex;
        count += errs.len();
        per_input.push((w.inputs.clone(), errs.len()));
        if mismatch.is_some() {
            continue;
        }
        if errs.len() != 1 || errs[0] != w.pattern {
            mismatch = Some(format!(
                "inputs {:?}: {} consistent errors, witness {}found among them",
                w.inputs,
                errs.len(),
                if errs.contains(&w.pattern) { "" } else { "not " }
            ));
        } else if t.outputs_of(&errs[0]) != w.outputs {
            mismatch = Some(format!("inputs {:?}: output bits disagree with the witness table", w.inputs));
        }
    }
    Ok(VerificationReport {
        id: t.kind.id().to_string(),
        param: t.param,
        count,
        per_input,
        matched: mismatch.is_none(),
        mismatch,
        explored,
        elapsed: start.elapsed(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExclusionReport {
    /// Completions with Z forced at Z1, Z2 and Z3, over all inputs.
    pub case1_completions: usize,
    /// Completions with Y forced at XZ4, over all inputs.
    pub y_at_xz4_completions: usize,
    pub xz4_domain: LetterSet,
    pub unforced_count: usize,
}

impl ExclusionReport {
    pub fn holds(&self) -> bool {
        self.case1_completions == 0
            && self.y_at_xz4_completions == 0
            && self.xz4_domain == LetterSet::parse("IXZ").unwrap()
            && self.unforced_count == 4
    }
}

/// Forced-assignment checks on the AND gadget.
pub fn verify_exclusions(t: &GadgetTemplate) -> Result<ExclusionReport> {
    if t.kind != GadgetKind::And {
        return Err(Error::InvalidParameter("exclusions are defined for the AND gadget".into()));
    }
    let label = |n: &str| t.labels.get(n).copied().ok_or_else(|| Error::Format(format!("AND template lacks label {n}")));
    let base = t.domains();
    let count_with = |domains: &BTreeMap<Cell, LetterSet>| -> Result<usize> {
        let mut total = 0;
        for w in &t.witnesses {
            total += t.consistent_errors(&w.inputs, domains, DEFAULT_NODE_BUDGET)?.0.len();
        }
        Ok(total)
    };
    let mut case1 = base.clone();
    for n in ["Z1", "Z2", "Z3"] {
        case1.insert(label(n)?, LetterSet::single(Letter::Z));
    }
    let xz4 = label("XZ4")?;
    let mut ydom = base.clone();
    ydom.insert(xz4, LetterSet::single(Letter::Y));
    Ok(ExclusionReport {
        case1_completions: count_with(&case1)?,
        y_at_xz4_completions: count_with(&ydom)?,
        xz4_domain: base.get(&xz4).copied().unwrap_or(LetterSet::single(Letter::I)),
        unforced_count: count_with(&base)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        for k in GadgetKind::ALL {
            let t = template(k, None).unwrap();
            assert_eq!(t.kind, k);
            assert_eq!(t.witnesses.len(), 1 << t.in_ports().count());
        }
    }

    #[test]
    fn not_shape() {
        let t = template(GadgetKind::Not, None).unwrap();
        assert!(t.noise.keys().all(|c| c.0 == 1));
        assert!(t.noise.values().all(|s| *s == LetterSet::single(Letter::X)));
        assert_eq!(t.syndromes.len(), 1);
        let s = *t.syndromes.iter().next().unwrap();
        assert_eq!(plane_kind(s.0, s.1), StabKind::Z);
    }

    #[test]
    fn cross_shape() {
        let t = template(GadgetKind::CrossXZ, None).unwrap();
        let multi: Vec<_> = t.noise.iter().filter(|(_, s)| s.len() > 1).collect();
        assert_eq!(multi.len(), 1);
        assert_eq!(*multi[0].1, LetterSet::parse("XYZ").unwrap());
    }

    #[test]
    fn stretch_rules() {
        let t = template(GadgetKind::Fanout, Some(23)).unwrap();
        assert_eq!(t.width, 23);
        assert_eq!(t.port("out2").unwrap().offset, 19);
        assert!(template(GadgetKind::Fanout, Some(20)).is_err());
        assert!(template(GadgetKind::Fanout, Some(17)).is_err());
        let w = template(GadgetKind::WireX, Some(4)).unwrap();
        assert_eq!(w.noise.len(), 4);
        assert!(template(GadgetKind::WireZ, Some(0)).is_err());
    }

    #[test]
    fn malformed_templates() {
        assert!(GadgetTemplate::parse("size 2 2\n", 0).is_err());
        let t = "template NOT\nsize 1 1\nq 0 0 X\nport in bottom 0 X in\nwitness 0 -\nend\n";
        assert!(matches!(GadgetTemplate::parse(t, 0), Err(Error::Format(_))));
        let t = "template NOT\nsize 1 1\nq 0 0 X\ns 0 1 Z\n";
        assert!(GadgetTemplate::parse(t, 0).is_err());
    }

    #[test]
    fn wire_verifies() {
        let r = verify_gadget(&template(GadgetKind::WireX, Some(7)).unwrap()).unwrap();
        assert!(r.matched, "{:?}", r.mismatch);
        assert_eq!(r.count, 2);
    }
}
