//! Reduction compiler: lays gadgets on the rotated lattice, routes strings between their
//! ports, and emits the decoding instance together with its witness map.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::formula::{eliminate_or, Formula};
use crate::gadget::{template, GadgetKind, GadgetTemplate};
use crate::lattice::{plane_kind, plaquette_cells, plaquettes_of_cell, RotatedLayout, StabKind, SyndromeVector};
use crate::noise::{NoiseModel, QubitNoise};
use crate::pauli::{Letter, LetterSet, PauliOperator};
use crate::planar::{to_planar_circuit, FanoutTarget, GateKind, NodeRef, PlanarCircuit};
use crate::rational::{self, ceil_log, format_rational, pow, rat, ApproxFactor, ExactRational};

pub type Cell = (i64, i64);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompileMode {
    /// Exact maximum-likelihood target; the special qubit carries `1 - p^ℓ`.
    Qmld { p: ExactRational },
    /// Special qubit carries `1 - p^ℓ / M`.
    QmldApprox { p: ExactRational, m: ApproxFactor },
    /// Every qubit uniform; a long tail wire replaces the special qubit.
    QmldUniform { p: ExactRational, m: Option<ApproxFactor> },
    /// Degenerate target; each qubit uniform over its options, special qubit `r`.
    Dqmld { r: ExactRational },
    /// Degenerate target with the special qubit at 1/2.
    DqmldMajority,
}

impl CompileMode {
    pub fn qmld_default() -> Self {
        CompileMode::Qmld { p: rat(1, 4) }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            CompileMode::Qmld { .. } => "qmld",
            CompileMode::QmldApprox { .. } => "qmld-approx",
            CompileMode::QmldUniform { .. } => "qmld-uniform",
            CompileMode::Dqmld { .. } => "dqmld",
            CompileMode::DqmldMajority => "dqmld-majority",
        }
    }

    pub fn p(&self) -> Option<&ExactRational> {
        match self {
            CompileMode::Qmld { p } | CompileMode::QmldApprox { p, .. } | CompileMode::QmldUniform { p, .. } => Some(p),
            _ => None,
        }
    }

    pub fn is_qmld(&self) -> bool {
        self.p().is_some()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.p() {
            if *p <= ExactRational::zero() || *p > rat(1, 4) {
                return Err(Error::InvalidParameter(format!("p must lie in (0, 1/4], got {}", format_rational(p))));
            }
        }
        if let CompileMode::Dqmld { r } = self {
            if *r <= ExactRational::zero() || *r >= ExactRational::one() {
                return Err(Error::InvalidParameter(format!("r must lie in (0, 1), got {}", format_rational(r))));
            }
        }
        let m = match self {
            CompileMode::QmldApprox { m, .. } => Some(m),
            CompileMode::QmldUniform { m, .. } => m.as_ref(),
            _ => None,
        };
        if let Some(ApproxFactor::Value(v)) = m {
            if *v < ExactRational::one() {
                return Err(Error::InvalidParameter("approximation factor must be >= 1".into()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for CompileMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompileMode::Qmld { p } => write!(f, "qmld p={}", format_rational(p)),
            CompileMode::QmldApprox { p, m } => write!(f, "qmld-approx p={} m={m}", format_rational(p)),
            CompileMode::QmldUniform { p, m: Some(m) } => write!(f, "qmld-uniform p={} m={m}", format_rational(p)),
            CompileMode::QmldUniform { p, m: None } => write!(f, "qmld-uniform p={}", format_rational(p)),
            CompileMode::Dqmld { r } => write!(f, "dqmld r={}", format_rational(r)),
            CompileMode::DqmldMajority => write!(f, "dqmld-majority"),
        }
    }
}

/// Boolean value carried by a wire, indexed in `CompiledInstance::signals`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signal {
    /// 1-based variable.
    Var(usize),
    Not(usize),
    And(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub kind: GadgetKind,
    pub param: usize,
    pub anchor: Cell,
    /// Signal index feeding each in-port.
    pub inputs: Vec<usize>,
}

impl Placement {
    /// Crossing markers own no cells and carry no witness.
    pub fn is_marker(&self) -> bool {
        self.kind == GadgetKind::CrossXZ
    }
}

/// A string of one letter leaving `port` of `placement`; present iff that port's bit is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Route {
    pub letter: Letter,
    pub placement: usize,
    pub port: String,
    pub cells: Vec<Cell>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationBounds {
    /// Lower bound on the output-coset probability when the formula is satisfiable.
    pub sat_lower: ExactRational,
    /// Upper bound on it when the formula is unsatisfiable.
    pub unsat_upper: ExactRational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosetRelation {
    Stabilizer,
    LogicalX,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledInstance {
    pub layout: RotatedLayout,
    pub noise: NoiseModel,
    pub syndrome: SyndromeVector,
    pub mode: CompileMode,
    pub ell: u64,
    pub num_vars: usize,
    pub signals: Vec<Signal>,
    pub output_signal: usize,
    pub placements: Vec<Placement>,
    pub routes: Vec<Route>,
    /// Cells whose X component reads the formula value.
    pub output_wire: Vec<Cell>,
    pub special_qubit: Option<Cell>,
    /// Anchor of each VARIABLE gadget.
    pub variable_ports: Vec<Cell>,
    /// Resolved approximation factor, when the mode has one.
    pub approx_factor: Option<ExactRational>,
    /// Height of the gadget region below the tail wire (uniform mode).
    pub base_height: Option<i64>,
    templates: BTreeMap<(GadgetKind, usize), GadgetTemplate>,
}

fn param_arg(kind: GadgetKind, param: usize) -> Option<usize> {
    match kind {
        GadgetKind::Fanout | GadgetKind::WireX | GadgetKind::WireZ if param > 0 => Some(param),
        _ => None,
    }
}

impl CompiledInstance {
    /// Assembles an instance from stored parts, reloading the gadget templates it uses.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        layout: RotatedLayout,
        noise: NoiseModel,
        syndrome: SyndromeVector,
        mode: CompileMode,
        ell: u64,
        num_vars: usize,
        signals: Vec<Signal>,
        output_signal: usize,
        placements: Vec<Placement>,
        routes: Vec<Route>,
        output_wire: Vec<Cell>,
        special_qubit: Option<Cell>,
        variable_ports: Vec<Cell>,
        approx_factor: Option<ExactRational>,
        base_height: Option<i64>,
    ) -> Result<Self> {
        let mut templates = BTreeMap::new();
        for p in placements.iter().filter(|p| !p.is_marker()) {
            if let std::collections::btree_map::Entry::Vacant(e) = templates.entry((p.kind, p.param)) {
                e.insert(template(p.kind, param_arg(p.kind, p.param))?);
            }
        }
        if output_signal >= signals.len() {
            return Err(Error::Format(format!("output signal {output_signal} out of range")));
        }
        for p in &placements {
            if p.inputs.iter().any(|&s| s >= signals.len()) {
                return Err(Error::Format(format!("placement input out of range: {:?}", p.inputs)));
            }
        }
        for r in &routes {
            if r.placement >= placements.len() {
                return Err(Error::Format(format!("route placement {} out of range", r.placement)));
            }
        }
        Ok(CompiledInstance {
            layout,
            noise,
            syndrome,
            mode,
            ell,
            num_vars,
            signals,
            output_signal,
            placements,
            routes,
            output_wire,
            special_qubit,
            variable_ports,
            approx_factor,
            base_height,
            templates,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits()
    }

    pub fn qubit(&self, c: Cell) -> Result<usize> {
        self.layout
            .qubit_index(c.0, c.1)
            .ok_or_else(|| Error::Internal(format!("cell {c:?} lies outside the lattice")))
    }

    pub fn template_of(&self, p: &Placement) -> Result<&GadgetTemplate> {
        self.templates
            .get(&(p.kind, p.param))
            .ok_or_else(|| Error::Internal(format!("no template cached for {} {}", p.kind, p.param)))
    }

    pub fn signal_values(&self, assignment: &[bool]) -> Result<Vec<bool>> {
        if assignment.len() != self.num_vars {
            return Err(Error::Dimension { expected: self.num_vars, found: assignment.len() });
        }
        let mut v: Vec<bool> = Vec::with_capacity(self.signals.len());
        for s in &self.signals {
            let b = match *s {
                Signal::Var(i) => assignment[i - 1],
                Signal::Not(a) => !v[a],
                Signal::And(a, b) => v[a] && v[b],
            };
            v.push(b);
        }
        Ok(v)
    }

    /// Formula value read through the compiled signal graph.
    pub fn evaluate(&self, assignment: &[bool]) -> Result<bool> {
        Ok(self.signal_values(assignment)?[self.output_signal])
    }

    /// The error that realises `assignment`: every gadget in its witness state, every driven string on.
    pub fn assignment_witness(&self, assignment: &[bool]) -> Result<PauliOperator> {
        let vals = self.signal_values(assignment)?;
        let mut letters: HashMap<Cell, Letter> = HashMap::new();
        let mut xor = |c: Cell, l: Letter| {
            let e = letters.entry(c).or_insert(Letter::I);
            *e = e.times(l);
        };
        let mut outs: Vec<Option<Vec<bool>>> = Vec::with_capacity(self.placements.len());
        for p in &self.placements {
            if p.is_marker() {
                outs.push(None);
                continue;
            }
            let t = self.template_of(p)?;
            let inputs: Vec<bool> = p.inputs.iter().map(|&s| vals[s]).collect();
            let w = t.witness(&inputs)?;
            for (&(c, r), &l) in &w.pattern {
                xor((p.anchor.0 + c, p.anchor.1 + r), l);
            }
            outs.push(Some(w.outputs.clone()));
        }
        for r in &self.routes {
            let p = &self.placements[r.placement];
            let t = self.template_of(p)?;
            let idx = t
                .out_index(&r.port)
                .ok_or_else(|| Error::Internal(format!("{} has no out-port `{}`", p.kind, r.port)))?;
            let on = outs[r.placement].as_ref().map(|o| o[idx]).unwrap_or(false);
            if on {
                for &c in &r.cells {
                    xor(c, r.letter);
                }
            }
        }
        let mut pairs = Vec::with_capacity(letters.len());
        for (c, l) in letters {
            if l != Letter::I {
                pairs.push((self.qubit(c)?, l));
            }
        }
        PauliOperator::from_pairs(self.num_qubits(), pairs)
    }

    /// Reads the formula value off a consistent error through its output wire.
    pub fn output_value(&self, e: &PauliOperator) -> Result<bool> {
        if e.num_qubits() != self.num_qubits() {
            return Err(Error::Dimension { expected: self.num_qubits(), found: e.num_qubits() });
        }
        if self.layout.syndrome_of(e)? != self.syndrome {
            return Err(Error::Precondition("error does not match the instance syndrome".into()));
        }
        if self.noise.probability_of(e)?.is_zero() {
            return Err(Error::Precondition("error has probability zero".into()));
        }
        let mut on = 0usize;
        for &c in &self.output_wire {
            let (x, _) = e.get(self.qubit(c)?).bits();
            on += x as usize;
        }
        if on == self.output_wire.len() {
            Ok(true)
        } else if on == 0 {
            Ok(false)
        } else {
            Err(Error::Precondition(format!("output wire is partially set ({on} of {})", self.output_wire.len())))
        }
    }

    pub fn separation_bounds(&self) -> Result<SeparationBounds> {
        let ell = self.ell;
        let one = ExactRational::one();
        match &self.mode {
            CompileMode::Qmld { p } => {
                let pl = pow(p, ell);
                Ok(SeparationBounds { sat_lower: (&one - &pl) * pow(p, ell - 1), unsat_upper: pl })
            }
            CompileMode::QmldApprox { p, .. } => {
                let m = self.approx_factor.clone().unwrap_or_else(ExactRational::one);
                let pl = pow(p, ell) / m;
                Ok(SeparationBounds { sat_lower: (&one - &pl) * pow(p, ell - 1), unsat_upper: pl })
            }
            CompileMode::QmldUniform { p, .. } => {
                let w = self.layout.width() as u64;
                let tail = self.layout.height() as u64 - ell / w;
                Ok(SeparationBounds {
                    sat_lower: pow(p, ell) * pow(&(&one - p), tail),
                    unsat_upper: pow(p, tail),
                })
            }
            _ => Err(Error::Precondition("separation bounds apply to the qmld modes only".into())),
        }
    }

    /// Relation between the witnesses of two assignments: same stabilizer coset, or
    /// differing by the logical X. Anything else is a verification failure.
    pub fn coset_relation_check(&self, a: &[bool], b: &[bool]) -> Result<CosetRelation> {
        let wa = self.assignment_witness(a)?;
        let wb = self.assignment_witness(b)?;
        match self.layout.logical_class(&wa, &wb)? {
            Letter::I => Ok(CosetRelation::Stabilizer),
            Letter::X => Ok(CosetRelation::LogicalX),
            l => Err(Error::Verification(format!("witnesses differ by logical {}", l.as_char()))),
        }
    }
}

// ---------------------------------------------------------------------------
// Layout builder

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Owner {
    Placement(usize),
    Route(usize),
}

#[derive(Clone, Copy, Debug)]
struct Occ {
    x: Option<Owner>,
    z: Option<Owner>,
    letters: LetterSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct PortRef {
    placement: usize,
    name: &'static str,
}

fn pref(placement: usize, name: &'static str) -> PortRef {
    PortRef { placement, name }
}

struct PortGeom {
    qubit: Cell,
    plaquette: Cell,
    outward: Cell,
    letter: Letter,
}

enum Target {
    Port(PortRef),
    /// Straight down to row 0 in this column.
    Bottom(i64),
    /// Up to this top row.
    Top(i64),
}

/// Whether a plaquette can exist while the lattice extent is still open: the left and
/// bottom boundaries are fixed, the top and right are not.
fn layout_exists(p: Cell) -> bool {
    let (c, r) = p;
    if c < -1 || r < -1 || (c == -1 && r == -1) {
        return false;
    }
    if r == -1 {
        return plane_kind(c, r) == StabKind::X;
    }
    if c == -1 {
        return plane_kind(c, r) == StabKind::Z;
    }
    true
}

fn detector(l: Letter) -> StabKind {
    if l == Letter::X {
        StabKind::Z
    } else {
        StabKind::X
    }
}

fn string_defects(cells: &[Cell], letter: Letter, top: Option<i64>) -> BTreeSet<Cell> {
    let det = detector(letter);
    let mut out = BTreeSet::new();
    for &(c, r) in cells {
        for p in plaquettes_of_cell(c, r) {
            if plane_kind(p.0, p.1) != det || !layout_exists(p) || top.is_some_and(|t| p.1 >= t) {
                continue;
            }
            if !out.remove(&p) {
                out.insert(p);
            }
        }
    }
    out
}

fn route_valid(cells: &[Cell], letter: Letter, expected: &BTreeSet<Cell>, top: Option<i64>) -> bool {
    if cells.is_empty() {
        return false;
    }
    let set: HashSet<Cell> = cells.iter().copied().collect();
    if set.len() != cells.len() || cells.iter().any(|&(c, r)| c < 0 || r < 0) {
        return false;
    }
    let det = detector(letter);
    for w in cells.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (a.0 - b.0).abs() > 1 || (a.1 - b.1).abs() > 1 {
            return false;
        }
        let linked = plaquettes_of_cell(a.0, a.1).iter().any(|&p| {
            let pc = plaquette_cells(p.0, p.1);
            plane_kind(p.0, p.1) == det
                && layout_exists(p)
                && pc.contains(&b)
                && pc.iter().filter(|c| set.contains(c)).count() == 2
        });
        if !linked {
            return false;
        }
    }
    string_defects(cells, letter, top) == *expected
}

/// Vertical, horizontal, vertical path from `s` (heading `d1`) to `t` (arriving heading
/// `d2`) with its horizontal run on row `e`. `g1`/`g2` cut the corners diagonally.
fn elbow_cells(s: Cell, d1: i64, t: Cell, d2: i64, e: i64, g1: bool, g2: bool) -> Option<Vec<Cell>> {
    if (e - s.1) * d1 < 0 || (t.1 - e) * d2 < 0 {
        return None;
    }
    let dx = (t.0 - s.0).signum();
    let mut cells = Vec::new();
    let mut r = s.1;
    loop {
        cells.push((s.0, r));
        if r == e {
            break;
        }
        r += d1;
    }
    let mut c = s.0 + dx;
    while c != t.0 + dx {
        cells.push((c, e));
        c += dx;
    }
    let mut r = e;
    while r != t.1 {
        r += d2;
        cells.push((t.0, r));
    }
    if g1 {
        if e == s.1 {
            return None;
        }
        cells.retain(|&x| x != (s.0, e));
    }
    if g2 {
        if e == t.1 {
            return None;
        }
        cells.retain(|&x| x != (t.0, e));
    }
    Some(cells)
}

fn straight(s: Cell, t: Cell) -> Option<Vec<Cell>> {
    if s.0 == t.0 {
        let d = (t.1 - s.1).signum();
        Some((0..=(t.1 - s.1).abs()).map(|i| (s.0, s.1 + d * i)).collect())
    } else if s.1 == t.1 {
        let d = (t.0 - s.0).signum();
        Some((0..=(t.0 - s.0).abs()).map(|i| (s.0 + d * i, s.1)).collect())
    } else {
        None
    }
}

#[derive(Clone, Default)]
struct State {
    occ: HashMap<Cell, Occ>,
    placements: Vec<Placement>,
    routes: Vec<Route>,
    syndromes: BTreeSet<Cell>,
}

#[derive(Default)]
struct Builder {
    st: State,
    templates: BTreeMap<(GadgetKind, usize), GadgetTemplate>,
}

impl Builder {
    fn load(&mut self, kind: GadgetKind, param: Option<usize>) -> Result<(GadgetKind, usize)> {
        let t = template(kind, param)?;
        let key = (kind, t.param);
        self.templates.entry(key).or_insert(t);
        Ok(key)
    }

    fn tpl(&self, p: usize) -> &GadgetTemplate {
        let pl = &self.st.placements[p];
        &self.templates[&(pl.kind, pl.param)]
    }

    fn place(&mut self, kind: GadgetKind, param: Option<usize>, anchor: Cell, inputs: Vec<usize>) -> Result<usize> {
        let key = self.load(kind, param)?;
        if (anchor.0 + anchor.1).rem_euclid(2) != 0 {
            return Err(Error::Internal(format!("{kind} anchor {anchor:?} has odd parity")));
        }
        let t = &self.templates[&key];
        let id = self.st.placements.len();
        let owner = Owner::Placement(id);
        let cells: Vec<(Cell, LetterSet)> =
            t.noise.iter().map(|(&(c, r), &ls)| ((anchor.0 + c, anchor.1 + r), ls)).collect();
        if let Some((c, _)) = cells.iter().find(|(c, _)| self.st.occ.contains_key(c) || c.0 < 0 || c.1 < 0) {
            return Err(Error::Internal(format!("{kind} at {anchor:?} collides at {c:?}")));
        }
        if let Some(msg) = self.foreign(&cells, owner, &[]) {
            return Err(Error::Internal(format!("{kind} at {anchor:?}: {msg}")));
        }
        let syn: Vec<Cell> = t.syndromes.iter().map(|&(c, r)| (anchor.0 + c, anchor.1 + r)).collect();
        for (c, ls) in cells {
            let x = ls.contains(Letter::X) || ls.contains(Letter::Y);
            let z = ls.contains(Letter::Z) || ls.contains(Letter::Y);
            self.st.occ.insert(c, Occ { x: x.then_some(owner), z: z.then_some(owner), letters: ls });
        }
        for s in syn {
            if !self.st.syndromes.insert(s) {
                return Err(Error::Internal(format!("syndrome plaquette {s:?} claimed twice")));
            }
        }
        self.st.placements.push(Placement { kind, param: key.1, anchor, inputs });
        Ok(id)
    }

    /// First plaquette shared by cells of different owners, ignoring allowed links.
    fn foreign(&self, cells: &[(Cell, LetterSet)], owner: Owner, links: &[(Cell, Owner)]) -> Option<String> {
        for &(c, ls) in cells {
            let capable = [
                (ls.contains(Letter::X) || ls.contains(Letter::Y), StabKind::Z),
                (ls.contains(Letter::Z) || ls.contains(Letter::Y), StabKind::X),
            ];
            for (can, det) in capable {
                if !can {
                    continue;
                }
                for p in plaquettes_of_cell(c.0, c.1) {
                    if plane_kind(p.0, p.1) != det || !layout_exists(p) {
                        continue;
                    }
                    for d in plaquette_cells(p.0, p.1) {
                        if d == c {
                            continue;
                        }
                        let Some(o) = self.st.occ.get(&d) else { continue };
                        let other = if det == StabKind::Z { o.x } else { o.z };
                        if let Some(other) = other {
                            if other != owner && !links.contains(&(p, other)) {
                                return Some(format!("cell {c:?} meets {other:?} at plaquette {p:?}"));
                            }
                        }
                    }
                }
            }
        }
        None
    }

    fn geom(&self, pr: &PortRef) -> Result<PortGeom> {
        let pl = &self.st.placements[pr.placement];
        let t = self.tpl(pr.placement);
        let port = t
            .port(pr.name)
            .ok_or_else(|| Error::Internal(format!("{} has no port `{}`", pl.kind, pr.name)))?;
        let (a, b) = pl.anchor;
        Ok(PortGeom {
            qubit: (a + port.qubit.0, b + port.qubit.1),
            plaquette: (a + port.plaquette.0, b + port.plaquette.1),
            outward: port.outward(),
            letter: port.wire.letter(),
        })
    }

    /// Checks a candidate path against current occupancy; returns the crossing cells.
    fn admit(&self, letter: Letter, cells: &[Cell], links: &[(Cell, Owner)]) -> Option<Vec<Cell>> {
        let mut crossings = Vec::new();
        for (i, &c) in cells.iter().enumerate() {
            let Some(o) = self.st.occ.get(&c) else { continue };
            let (mine, theirs) = if letter == Letter::X { (o.x, o.z) } else { (o.z, o.x) };
            if mine.is_some() {
                return None;
            }
            let th = theirs?;
            if i == 0 || i + 1 == cells.len() {
                return None;
            }
            let (p, n) = (cells[i - 1], cells[i + 1]);
            let d = (c.0 - p.0, c.1 - p.1);
            if (n.0 - c.0, n.1 - c.1) != d || d.0.abs() + d.1.abs() != 1 {
                return None;
            }
            for q in [(c.0 + d.1, c.1 + d.0), (c.0 - d.1, c.1 - d.0)] {
                let ok = self.st.occ.get(&q).is_some_and(|oq| {
                    let other = if letter == Letter::X { oq.z } else { oq.x };
                    other == Some(th)
                });
                if !ok {
                    return None;
                }
            }
            crossings.push(c);
        }
        let ls = LetterSet::single(letter);
        let cl: Vec<(Cell, LetterSet)> = cells.iter().map(|&c| (c, ls)).collect();
        if self.foreign(&cl, Owner::Route(self.st.routes.len()), links).is_some() {
            return None;
        }
        Some(crossings)
    }

    fn commit(&mut self, letter: Letter, cells: Vec<Cell>, from: &PortRef, crossings: Vec<Cell>) -> usize {
        let id = self.st.routes.len();
        let owner = Owner::Route(id);
        for &c in &cells {
            let e = self.st.occ.entry(c).or_insert(Occ { x: None, z: None, letters: LetterSet::EMPTY });
            if letter == Letter::X {
                e.x = Some(owner);
            } else {
                e.z = Some(owner);
            }
            e.letters = if e.letters.is_empty() {
                LetterSet::single(letter)
            } else {
                e.letters.with(letter).with(Letter::Y)
            };
        }
        for c in crossings {
            self.st.placements.push(Placement {
                kind: GadgetKind::CrossXZ,
                param: 0,
                anchor: (c.0 - 3, c.1 - 3),
                inputs: vec![],
            });
        }
        self.st.routes.push(Route { letter, placement: from.placement, port: from.name.to_string(), cells });
        id
    }

    /// Routes a string out of `from`. `rows` lists candidate rows for the horizontal run.
    fn route(&mut self, from: &PortRef, to: Target, rows: &[i64]) -> Result<usize> {
        let fg = self.geom(from)?;
        let letter = fg.letter;
        let s = (fg.qubit.0 + fg.outward.0, fg.qubit.1 + fg.outward.1);
        let mut expected = BTreeSet::new();
        let mut links = vec![(fg.plaquette, Owner::Placement(from.placement))];
        expected.insert(fg.plaquette);
        let mut top = None;
        let (t, d2) = match &to {
            Target::Port(pr) => {
                let g = self.geom(pr)?;
                if g.letter != letter {
                    return Err(Error::Internal(format!("port `{}` does not take {}", pr.name, letter.as_char())));
                }
                expected.insert(g.plaquette);
                links.push((g.plaquette, Owner::Placement(pr.placement)));
                ((g.qubit.0 + g.outward.0, g.qubit.1 + g.outward.1), -(g.outward.0 + g.outward.1))
            }
            Target::Bottom(col) => ((*col, 0), -1),
            Target::Top(row) => {
                top = Some(*row);
                ((s.0, *row), 1)
            }
        };
        let expected: BTreeSet<Cell> = expected.into_iter().filter(|&p| layout_exists(p)).collect();
        let mut candidates: Vec<Vec<Cell>> = Vec::new();
        if fg.outward.1 == 0 {
            // horizontal port: only straight runs to the left boundary are used
            if let Target::Port(_) = to {
                candidates.extend(straight(s, t));
            } else {
                candidates.extend(straight(s, (0, s.1)));
            }
        } else if s.0 == t.0 {
            candidates.extend(straight(s, t));
        } else {
            for &e in rows {
                for (g1, g2) in [(false, false), (true, false), (false, true), (true, true)] {
                    candidates.extend(elbow_cells(s, fg.outward.1, t, d2, e, g1, g2));
                }
            }
        }
        for cells in candidates {
            if !route_valid(&cells, letter, &expected, top) {
                continue;
            }
            if let Some(cr) = self.admit(letter, &cells, &links) {
                return Ok(self.commit(letter, cells, from, cr));
            }
        }
        let kind = self.st.placements[from.placement].kind;
        Err(Error::Internal(format!("no route from {kind} port `{}` at {:?}", from.name, fg.qubit)))
    }

    fn route_left(&mut self, from: &PortRef) -> Result<usize> {
        self.route(from, Target::Bottom(0), &[])
    }

    fn extent(&self) -> (i64, i64) {
        let mc = self.st.occ.keys().map(|c| c.0).max().unwrap_or(0);
        let mr = self.st.occ.keys().map(|c| c.1).max().unwrap_or(0);
        (mc, mr)
    }
}

// ---------------------------------------------------------------------------

pub fn compile_formula(f: &Formula, mode: CompileMode) -> Result<CompiledInstance> {
    compile_formula_with(f, mode, &Caps::default())
}

pub fn compile_formula_with(f: &Formula, mode: CompileMode, caps: &Caps) -> Result<CompiledInstance> {
    let pc = to_planar_circuit(&eliminate_or(f))?;
    compile_with(&pc, mode, caps)
}

pub fn compile(pc: &PlanarCircuit, mode: CompileMode) -> Result<CompiledInstance> {
    compile_with(pc, mode, &Caps::default())
}

const AND_ATTEMPTS: usize = 40;

pub fn compile_with(pc: &PlanarCircuit, mode: CompileMode, caps: &Caps) -> Result<CompiledInstance> {
    mode.validate()?;
    let n = pc.num_vars;
    let mut b = Builder::default();
    let mut signals: Vec<Signal> = (1..=n).map(Signal::Var).collect();

    let mut var_source = Vec::with_capacity(n);
    let mut variable_ports = Vec::with_capacity(n);
    for v in 0..n {
        let col = pc.variable_columns[v];
        let id = b.place(GadgetKind::Variable, None, (col - 2, 0), vec![v])?;
        var_source.push(pref(id, "out"));
        variable_ports.push((col - 2, 0));
    }

    let mut leaf_source: Vec<Option<PortRef>> = vec![None; pc.leaves.len()];
    for (i, leaf) in pc.leaves.iter().enumerate() {
        if pc.copies[leaf.var - 1] == 1 {
            leaf_source[i] = Some(var_source[leaf.var - 1].clone());
        }
    }

    let mut chain: Vec<Option<usize>> = vec![None; n];
    for f in &pc.fanouts {
        let v = f.var - 1;
        let id = b.place(GadgetKind::Fanout, Some(f.width), f.anchor, vec![v])?;
        let src = match chain[v] {
            None => var_source[v].clone(),
            Some(prev) => pref(prev, "out2"),
        };
        chain[v] = Some(id);
        b.route(&src, Target::Port(pref(id, "in")), &[])?;
        leaf_source[f.out1] = Some(pref(id, "out1"));
        if let FanoutTarget::Leaf(l) = f.out2 {
            leaf_source[l] = Some(pref(id, "out2"));
        }
        for name in ["bnd_x3", "bnd_x11", "bnd_x15"] {
            let col = b.geom(&pref(id, name))?.qubit.0;
            b.route(&pref(id, name), Target::Bottom(col), &[])?;
        }
        for name in ["bnd_z3", "bnd_z5"] {
            b.route_left(&pref(id, name))?;
        }
    }
    let leaf_source: Vec<PortRef> = leaf_source
        .into_iter()
        .map(|s| s.ok_or_else(|| Error::Internal("leaf without a source".into())))
        .collect::<Result<_>>()?;

    let mut gate_out: Vec<PortRef> = Vec::with_capacity(pc.gates.len());
    let mut gate_signal: Vec<usize> = Vec::with_capacity(pc.gates.len());
    let mut cursor = pc.gate_base;
    for gate in &pc.gates {
        let source = |r: NodeRef, go: &Vec<PortRef>| match r {
            NodeRef::Leaf(i) => leaf_source[i].clone(),
            NodeRef::Gate(g) => go[g].clone(),
        };
        let sig_of = |r: NodeRef, gs: &Vec<usize>| match r {
            NodeRef::Leaf(i) => pc.leaves[i].var - 1,
            NodeRef::Gate(g) => gs[g],
        };
        match gate.kind {
            GateKind::Not => {
                let src = source(gate.inputs[0], &gate_out);
                let s = sig_of(gate.inputs[0], &gate_signal);
                signals.push(Signal::Not(s));
                let sig = signals.len() - 1;
                let g = b.geom(&src)?;
                let col = g.qubit.0;
                let mut y = cursor.max(g.qubit.1 + 2);
                if (col - 1 + y).rem_euclid(2) != 0 {
                    y += 1;
                }
                let id = b.place(GadgetKind::Not, None, (col - 1, y), vec![s])?;
                b.route(&src, Target::Port(pref(id, "in")), &[])?;
                gate_out.push(pref(id, "out"));
                gate_signal.push(sig);
                cursor = y + 7;
            }
            GateKind::And => {
                let a = gate.core_lane.ok_or_else(|| Error::Internal("AND without a lane".into()))?;
                let conv_lane = gate.converter_lane.ok_or_else(|| Error::Internal("AND without a lane".into()))?;
                let x = a - 12;
                let (s1, s2) = (sig_of(gate.inputs[0], &gate_signal), sig_of(gate.inputs[1], &gate_signal));
                let src1 = source(gate.inputs[0], &gate_out);
                let src2 = source(gate.inputs[1], &gate_out);
                signals.push(Signal::And(s1, s2));
                let sig = signals.len() - 1;
                let mut y = cursor + 4;
                if (x + y).rem_euclid(2) != 0 {
                    y += 1;
                }
                let mut last_err = None;
                let mut placed = None;
                for _ in 0..AND_ATTEMPTS {
                    let saved = b.st.clone();
                    let attempt = (|| -> Result<usize> {
                        let rows: Vec<i64> = (cursor..=y - 2).collect();
                        let core = b.place(GadgetKind::And, None, (x, y), vec![s1, s2])?;
                        b.route(&src1, Target::Port(pref(core, "in1")), &rows)?;
                        b.route(&src2, Target::Port(pref(core, "in2")), &rows)?;
                        b.route(&pref(core, "bnd_x12"), Target::Bottom(a), &[])?;
                        b.route(&pref(core, "bnd_x14"), Target::Bottom(a + 2), &[])?;
                        for name in ["bnd_z3", "bnd_z5", "bnd_z23"] {
                            b.route_left(&pref(core, name))?;
                        }
                        let conv = b.place(GadgetKind::ConvertZToX, None, (a - 3, y + 25), vec![sig])?;
                        b.route(&pref(core, "out"), Target::Port(pref(conv, "in")), &[])?;
                        b.route(&pref(conv, "bnd_x6"), Target::Bottom(conv_lane), &[y + 25, y + 24, y + 26, y + 23])?;
                        b.route_left(&pref(conv, "bnd_z6"))?;
                        Ok(conv)
                    })();
                    match attempt {
                        Ok(conv) => {
                            placed = Some(conv);
                            break;
                        }
                        Err(e) => {
                            b.st = saved;
                            last_err = Some(e);
                            y += 2;
                        }
                    }
                }
                let conv = placed.ok_or_else(|| last_err.unwrap())?;
                gate_out.push(pref(conv, "out"));
                gate_signal.push(sig);
                cursor = y + 35;
            }
        }
    }

    let root_src = match pc.output {
        NodeRef::Leaf(i) => leaf_source[i].clone(),
        NodeRef::Gate(g) => gate_out[g].clone(),
    };
    let root_sig = match pc.output {
        NodeRef::Leaf(i) => pc.leaves[i].var - 1,
        NodeRef::Gate(g) => gate_signal[g],
    };
    let rg = b.geom(&root_src)?;
    let col = rg.qubit.0;
    let (max_col, max_row) = b.extent();
    let w = max_col + 3;
    let check_grid = |h: i64| -> Result<()> {
        let q = (w as u128) * (h as u128);
        if q > caps.grid_qubits as u128 {
            return Err(Error::cap("lattice qubits", caps.grid_qubits as usize, q.min(usize::MAX as u128) as usize));
        }
        Ok(())
    };

    let (h, ell, output_wire, special, approx_factor, base_height);
    match &mode {
        CompileMode::QmldUniform { p, m } => {
            let mut hb = (max_row + 2).max(rg.qubit.1 + 5);
            if (col + hb).rem_euclid(2) != 0 {
                hb += 1;
            }
            let l = (w * hb) as u64;
            let mf = m.as_ref().map(|m| m.resolve(l)).transpose()?;
            let t = match &mf {
                Some(mv) => ceil_log(&(ExactRational::one() / p), mv),
                None => 0,
            };
            let tail = 2 * l + 2 * t;
            h = hb + tail as i64;
            check_grid(h)?;
            signals.push(Signal::Not(root_sig));
            let not = b.place(GadgetKind::Not, None, (col - 1, hb - 3), vec![root_sig])?;
            let base = b.route(&root_src, Target::Port(pref(not, "in")), &[])?;
            b.route(&pref(not, "out"), Target::Top(h - 1), &[])?;
            ell = l;
            output_wire = b.st.routes[base].cells.clone();
            special = None;
            approx_factor = mf;
            base_height = Some(hb);
        }
        _ => {
            h = max_row + 2;
            check_grid(h)?;
            let root = b.route(&root_src, Target::Top(h - 1), &[])?;
            ell = (w * h) as u64;
            output_wire = b.st.routes[root].cells.clone();
            special = if mode == CompileMode::DqmldMajority { None } else { Some((col, h - 1)) };
            approx_factor = match &mode {
                CompileMode::QmldApprox { m, .. } => Some(m.resolve(ell)?),
                _ => None,
            };
            base_height = None;
        }
    }

    let layout = RotatedLayout::new(w as usize, h as usize)?;
    let mut noise = NoiseModel::new(layout.num_qubits());
    let special_noise = match &mode {
        CompileMode::Qmld { p } => Some(ExactRational::one() - pow(p, ell)),
        CompileMode::QmldApprox { p, .. } => {
            Some(ExactRational::one() - pow(p, ell) / approx_factor.clone().unwrap())
        }
        CompileMode::Dqmld { r } => Some(r.clone()),
        _ => None,
    };
    let mut occ: Vec<(&Cell, &Occ)> = b.st.occ.iter().collect();
    occ.sort_by_key(|(c, _)| **c);
    let mut by_letters: HashMap<LetterSet, QubitNoise> = HashMap::new();
    for (&cell, o) in occ {
        let q = layout
            .qubit_index(cell.0, cell.1)
            .ok_or_else(|| Error::Internal(format!("cell {cell:?} outside the lattice")))?;
        let ls = o.letters.nontrivial();
        let qn = if Some(cell) == special && special_noise.is_some() {
            QubitNoise::new(special_noise.clone().unwrap(), ExactRational::zero(), ExactRational::zero())?
        } else if let Some(qn) = by_letters.get(&ls) {
            qn.clone()
        } else {
            let qn = match &mode {
                CompileMode::Dqmld { .. } | CompileMode::DqmldMajority => {
                    QubitNoise::uniform_on(ls, &rat(1, ls.len() as i64 + 1))?
                }
                _ => QubitNoise::uniform_on(ls, mode.p().unwrap())?,
            };
            by_letters.insert(ls, qn.clone());
            qn
        };
        noise.set(q, qn)?;
    }
    let mut flipped = Vec::with_capacity(b.st.syndromes.len());
    for &s in &b.st.syndromes {
        flipped.push(
            layout
                .generator_index(s.0, s.1)
                .ok_or_else(|| Error::Internal(format!("syndrome plaquette {s:?} is not a generator")))?,
        );
    }

    let Builder { st, templates } = b;
    let inst = CompiledInstance {
        layout,
        noise,
        syndrome: SyndromeVector::new(flipped),
        mode,
        ell,
        num_vars: n,
        signals,
        output_signal: root_sig,
        placements: st.placements,
        routes: st.routes,
        output_wire,
        special_qubit: special,
        variable_ports,
        approx_factor,
        base_height,
        templates,
    };
    let zero = vec![false; n];
    let wit = inst.assignment_witness(&zero)?;
    if inst.layout.syndrome_of(&wit)? != inst.syndrome {
        return Err(Error::Internal("witness syndrome disagrees with the compiled syndrome".into()));
    }
    Ok(inst)
}

/// Renders a rational for diagnostics.
pub fn describe_bounds(b: &SeparationBounds) -> String {
    format!("sat >= {}, unsat <= {}", rational::format_rational(&b.sat_lower), rational::format_rational(&b.unsat_upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{all_assignments, parse_expression};

    fn inst(s: &str, mode: CompileMode) -> CompiledInstance {
        compile_formula(&parse_expression(s).unwrap(), mode).unwrap()
    }

    #[test]
    fn elbow_shapes() {
        let c = elbow_cells((0, 0), 1, (3, 4), 1, 2, false, false).unwrap();
        assert_eq!(c, vec![(0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (3, 2), (3, 3), (3, 4)]);
        let c = elbow_cells((0, 0), 1, (3, 4), 1, 2, true, true).unwrap();
        assert!(!c.contains(&(0, 2)) && !c.contains(&(3, 2)));
        assert!(elbow_cells((0, 0), 1, (3, 4), 1, 5, false, false).is_none());
    }

    #[test]
    fn layout_existence() {
        assert!(!layout_exists((-1, -1)));
        assert!(layout_exists((0, -1)) == (plane_kind(0, -1) == StabKind::X));
        assert!(layout_exists((-1, 0)) == (plane_kind(-1, 0) == StabKind::Z));
        assert!(!layout_exists((-2, 3)));
    }

    #[test]
    fn witnesses_match_syndrome() {
        for s in ["x1", "!x1", "(x1&x2)", "(x1&!x1)", "(!(x1&x2)&x1)", "((x1&x2)&(!x3&x1))"] {
            let i = inst(s, CompileMode::qmld_default());
            for a in all_assignments(i.num_vars) {
                let w = i.assignment_witness(&a).unwrap();
                assert_eq!(i.layout.syndrome_of(&w).unwrap(), i.syndrome, "{s} {a:?}");
                assert!(i.noise.probability_of(&w).unwrap() > ExactRational::zero());
                assert_eq!(i.output_value(&w).unwrap(), i.evaluate(&a).unwrap());
            }
        }
    }

    #[test]
    fn bad_modes_rejected() {
        assert!(CompileMode::Qmld { p: rat(1, 3) }.validate().is_err());
        assert!(CompileMode::Dqmld { r: rat(1, 1) }.validate().is_err());
        assert!(CompileMode::Dqmld { r: rat(1, 2) }.validate().is_ok());
    }
}
