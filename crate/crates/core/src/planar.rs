//! Planar circuit normal form: a FAN-OUT layer feeding a gate tree whose leaves follow
//! the left-to-right occurrence order of the formula.
//!
//! Column plan. Leaves sit at even columns `L_0 = 6`, `L_{i+1} = L_i + 24 + 2 k_i`, where
//! `k_i` counts AND gates whose span ends at leaf `i`. The gap right of leaf `i` holds
//! the converter lanes of those gates (`L_i + 10 + 2j`, inner gates first) followed by
//! the two boundary lanes of the AND that splits leaves `i` and `i + 1`.

use crate::error::{Error, Result};
use crate::formula::{Expr, Formula};
use crate::gadget::FANOUT_MIN_WIDTH;

pub type Cell = (i64, i64);

/// First leaf column.
pub const FIRST_LEAF: i64 = 6;
/// Row of the lowest FAN-OUT band.
pub const FANOUT_BASE: i64 = 9;
/// Vertical pitch between FAN-OUT bands.
pub const FANOUT_PITCH: i64 = 12;
pub const FANOUT_HEIGHT: i64 = 9;
pub const VARIABLE_HEIGHT: i64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeRef {
    Leaf(usize),
    Gate(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    Not,
    And,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<NodeRef>,
    /// First and last leaf under this gate.
    pub span: (usize, usize),
    /// AND only: the gap (left leaf index) this gate splits.
    pub split: Option<usize>,
    /// AND only: column of the first boundary lane, `A`; the core is anchored at `A - 12`.
    pub core_lane: Option<i64>,
    /// AND only: column of the converter's boundary lane.
    pub converter_lane: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    /// 1-based variable.
    pub var: usize,
    pub column: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FanoutTarget {
    /// Next FAN-OUT in the same variable's comb (index into `fanouts`).
    Fanout(usize),
    Leaf(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanoutPlan {
    pub var: usize,
    pub anchor: Cell,
    pub width: usize,
    pub out1: usize,
    pub out2: FanoutTarget,
}

impl FanoutPlan {
    pub fn in_column(&self) -> i64 {
        self.anchor.0 + 7
    }

    pub fn out2_column(&self) -> i64 {
        self.anchor.0 + self.width as i64 - 4
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarCircuit {
    pub num_vars: usize,
    pub leaves: Vec<Leaf>,
    /// Postorder: children always precede their parent.
    pub gates: Vec<Gate>,
    pub output: NodeRef,
    /// Occurrence count per variable (index 0 is x1).
    pub copies: Vec<usize>,
    /// Column of each variable's VARIABLE string.
    pub variable_columns: Vec<i64>,
    /// Bands bottom to top.
    pub fanouts: Vec<FanoutPlan>,
    /// Vertical X wire column and horizontal Z wire row of every crossing in the FAN-OUT layer.
    pub crossings: Vec<Cell>,
    /// First row free for gates.
    pub gate_base: i64,
}

struct Builder {
    leaves: Vec<Leaf>,
    gates: Vec<Gate>,
}

impl Builder {
    fn visit(&mut self, e: &Expr) -> Result<(NodeRef, (usize, usize))> {
        match e {
            Expr::Var(v) => {
                self.leaves.push(Leaf { var: *v, column: 0 });
                let i = self.leaves.len() - 1;
                Ok((NodeRef::Leaf(i), (i, i)))
            }
            Expr::Not(a) => {
                let (c, span) = self.visit(a)?;
                self.gates.push(Gate { kind: GateKind::Not, inputs: vec![c], span, split: None, core_lane: None, converter_lane: None });
                Ok((NodeRef::Gate(self.gates.len() - 1), span))
            }
            Expr::And(a, b) => {
                let (l, ls) = self.visit(a)?;
                let (r, rs) = self.visit(b)?;
                let span = (ls.0, rs.1);
                self.gates.push(Gate {
                    kind: GateKind::And,
                    inputs: vec![l, r],
                    span,
                    split: Some(ls.1),
                    core_lane: None,
                    converter_lane: None,
                });
                Ok((NodeRef::Gate(self.gates.len() - 1), span))
            }
            Expr::Or(..) => Err(Error::Precondition("formula still contains OR; eliminate it first".into())),
        }
    }
}

pub fn to_planar_circuit(f: &Formula) -> Result<PlanarCircuit> {
    let mut b = Builder { leaves: Vec::new(), gates: Vec::new() };
    let (output, _) = b.visit(&f.expr)?;
    let Builder { mut leaves, mut gates } = b;
    let n_leaves = leaves.len();

    // converter lane rank per AND, inner (earlier in postorder) first
    let mut ending = vec![0usize; n_leaves];
    let mut rank = vec![0usize; gates.len()];
    for (g, gate) in gates.iter().enumerate() {
        if gate.kind == GateKind::And {
            rank[g] = ending[gate.span.1];
            ending[gate.span.1] += 1;
        }
    }
    let mut col = FIRST_LEAF;
    for (i, leaf) in leaves.iter_mut().enumerate() {
        leaf.column = col;
        col += 24 + 2 * ending[i] as i64;
    }
    for (g, gate) in gates.iter_mut().enumerate() {
        if gate.kind == GateKind::And {
            let i = gate.split.unwrap();
            gate.core_lane = Some(leaves[i].column + 10 + 2 * ending[i] as i64);
            gate.converter_lane = Some(leaves[gate.span.1].column + 10 + 2 * rank[g] as i64);
        }
    }

    let mut occ: Vec<Vec<usize>> = vec![Vec::new(); f.num_vars];
    for (i, leaf) in leaves.iter().enumerate() {
        occ[leaf.var - 1].push(i);
    }
    let copies: Vec<usize> = occ.iter().map(Vec::len).collect();
    let mut fanouts = Vec::new();
    let mut variable_columns = Vec::new();
    for (v, list) in occ.iter().enumerate() {
        let k = list.len();
        if k == 1 {
            variable_columns.push(leaves[list[0]].column);
            continue;
        }
        variable_columns.push(leaves[list[0]].column + 4);
        for j in 0..k - 1 {
            let l = leaves[list[j]].column;
            let next = leaves[list[j + 1]].column;
            let last = j == k - 2;
            let stretch = if last { next - l - 12 } else { next - l - 8 };
            let width = FANOUT_MIN_WIDTH + stretch as usize;
            let band = fanouts.len() as i64;
            let idx = fanouts.len();
            fanouts.push(FanoutPlan {
                var: v + 1,
                anchor: (l - 3, FANOUT_BASE + FANOUT_PITCH * band),
                width,
                out1: list[j],
                out2: if last { FanoutTarget::Leaf(list[j + 1]) } else { FanoutTarget::Fanout(idx + 1) },
            });
        }
    }
    let gate_base = if fanouts.is_empty() {
        VARIABLE_HEIGHT + 2
    } else {
        fanouts.last().unwrap().anchor.1 + FANOUT_HEIGHT + 2
    };
    let mut pc = PlanarCircuit {
        num_vars: f.num_vars,
        leaves,
        gates,
        output,
        copies,
        variable_columns,
        fanouts,
        crossings: Vec::new(),
        gate_base,
    };
    pc.crossings = pc.fanout_crossings();
    Ok(pc)
}

impl PlanarCircuit {
    /// Vertical X wires in the FAN-OUT layer as (column, bottom row, top row), inclusive.
    fn layer_wires(&self) -> Vec<(i64, i64, i64)> {
        let top = self.gate_base;
        let mut w = Vec::new();
        let f_top = |f: &FanoutPlan| f.anchor.1 + FANOUT_HEIGHT - 1;
        for (v, &c) in self.variable_columns.iter().enumerate() {
            let first = self.fanouts.iter().find(|f| f.var == v + 1);
            w.push((c, 0, first.map_or(top, |f| f.anchor.1 - 1)));
        }
        for f in &self.fanouts {
            let (x, y) = f.anchor;
            w.push((x + 3, 0, y));
            w.push((x + 11, 0, y + 1));
            w.push((f.out2_column(), 0, y));
            w.push((self.leaves[f.out1].column, f_top(f) + 1, top));
            if let FanoutTarget::Leaf(l) = f.out2 {
                w.push((self.leaves[l].column, f_top(f) + 1, top));
            }
        }
        for g in &self.gates {
            if let (Some(a), Some(c)) = (g.core_lane, g.converter_lane) {
                w.push((a, 0, top));
                w.push((a + 2, 0, top));
                w.push((c, 0, top));
            }
        }
        w
    }

    fn fanout_crossings(&self) -> Vec<Cell> {
        let wires = self.layer_wires();
        let mut out = Vec::new();
        for f in &self.fanouts {
            let (x, y) = f.anchor;
            // Z rows: bnd routes from column 0 to x, template rows to the stretch region end
            for row in [y + 3, y + 5] {
                let right = x + f.width as i64 - 6;
                let mut cols: Vec<i64> = wires
                    .iter()
                    .filter(|&&(c, lo, hi)| lo <= row && row <= hi && c <= right && !(x..=x + 12).contains(&c))
                    .map(|w| w.0)
                    .collect();
                cols.sort_unstable();
                cols.dedup();
                out.extend(cols.into_iter().map(|c| (c, row)));
            }
        }
        out
    }

    /// Gate-by-gate simulation.
    pub fn simulate(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() != self.num_vars {
            return Err(Error::Dimension { expected: self.num_vars, found: assignment.len() });
        }
        let mut vals = Vec::with_capacity(self.gates.len());
        let get = |r: NodeRef, vals: &Vec<bool>| match r {
            NodeRef::Leaf(i) => assignment[self.leaves[i].var - 1],
            NodeRef::Gate(g) => vals[g],
        };
        for g in &self.gates {
            let v = match g.kind {
                GateKind::Not => !get(g.inputs[0], &vals),
                GateKind::And => get(g.inputs[0], &vals) && get(g.inputs[1], &vals),
            };
            vals.push(v);
        }
        Ok(get(self.output, &vals))
    }

    pub fn gate_counts(&self) -> (usize, usize) {
        let nots = self.gates.iter().filter(|g| g.kind == GateKind::Not).count();
        (nots, self.gates.len() - nots)
    }
}
