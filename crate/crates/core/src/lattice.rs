//! Rotated surface code on a w×h grid.
//!
//! Qubit (col,row) has index `row*w + col`, row 0 at the bottom. Plaquette (c,r) covers
//! qubits (c..=c+1, r..=r+1) and is Z-type iff c+r is even. Half-plaquettes survive on the
//! bottom/top edges when X-type and on the left/right edges when Z-type. Generators are
//! indexed by (row, col) of their plaquette anchor; rows are stored as prefix counts so
//! very tall layouts never materialize their generator list.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StabKind {
    X,
    Z,
}

impl StabKind {
    pub fn letter(self) -> Letter {
        match self {
            StabKind::X => Letter::X,
            StabKind::Z => Letter::Z,
        }
    }

    /// Whether a single-qubit error letter flips a generator of this kind.
    pub fn detects(self, l: Letter) -> bool {
        self.letter().anticommutes(l)
    }

    pub fn other(self) -> StabKind {
        match self {
            StabKind::X => StabKind::Z,
            StabKind::Z => StabKind::X,
        }
    }

    pub fn from_char(c: char) -> Option<StabKind> {
        match c {
            'X' => Some(StabKind::X),
            'Z' => Some(StabKind::Z),
            _ => None,
        }
    }
}

/// Kind of the plaquette anchored at (c, r) on the unbounded checkerboard.
pub fn plane_kind(c: i64, r: i64) -> StabKind {
    if (c + r).rem_euclid(2) == 0 {
        StabKind::Z
    } else {
        StabKind::X
    }
}

/// The four qubit positions a plaquette covers on the unbounded plane.
pub fn plaquette_cells(c: i64, r: i64) -> [(i64, i64); 4] {
    [(c, r), (c + 1, r), (c, r + 1), (c + 1, r + 1)]
}

/// Anchors of the four plaquettes containing qubit position (c, r).
pub fn plaquettes_of_cell(c: i64, r: i64) -> [(i64, i64); 4] {
    [(c - 1, r - 1), (c, r - 1), (c - 1, r), (c, r)]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGenerator {
    pub kind: StabKind,
    pub qubits: Vec<usize>,
    pub position: (i64, i64),
}

impl StabilizerGenerator {
    pub fn to_pauli(&self, num_qubits: usize) -> PauliOperator {
        PauliOperator::uniform(num_qubits, self.qubits.iter().copied(), self.kind.letter())
            .expect("generator qubits are in range")
    }
}

/// Set of generator indices whose measurement is −1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SyndromeVector {
    pub flipped: BTreeSet<usize>,
}

impl SyndromeVector {
    pub fn new(flipped: impl IntoIterator<Item = usize>) -> Self {
        SyndromeVector { flipped: flipped.into_iter().collect() }
    }

    pub fn toggle(&mut self, g: usize) {
        if !self.flipped.remove(&g) {
            self.flipped.insert(g);
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.flipped.is_empty()
    }
}

/// Default cap on generators for stabilizer group enumeration.
pub const GROUP_ENUMERATION_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotatedLayout {
    w: usize,
    h: usize,
    // row_start[k] = first generator index in plaquette row k-1; length h+2
    row_start: Vec<usize>,
}

impl RotatedLayout {
    pub fn new(w: usize, h: usize) -> Result<Self> {
        if w < 2 || h < 2 {
            return Err(Error::InvalidDimension(format!("{w}x{h}: both sides must be at least 2")));
        }
        let mut layout = RotatedLayout { w, h, row_start: Vec::with_capacity(h + 2) };
        let mut acc = 0;
        for r in -1..h as i64 {
            layout.row_start.push(acc);
            acc += layout.row_len(r);
        }
        layout.row_start.push(acc);
        Ok(layout)
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn num_qubits(&self) -> usize {
        self.w * self.h
    }

    pub fn num_generators(&self) -> usize {
        *self.row_start.last().unwrap()
    }

    fn row_len(&self, r: i64) -> usize {
        let (w, h) = (self.w as i64, self.h as i64);
        if r == -1 || r == h - 1 {
            (0..=w - 2).filter(|&c| plane_kind(c, r) == StabKind::X).count()
        } else {
            let left = (plane_kind(-1, r) == StabKind::Z) as usize;
            let right = (plane_kind(w - 1, r) == StabKind::Z) as usize;
            left + (w as usize - 1) + right
        }
    }

    pub fn qubit_index(&self, c: i64, r: i64) -> Option<usize> {
        if c < 0 || r < 0 || c >= self.w as i64 || r >= self.h as i64 {
            None
        } else {
            Some(r as usize * self.w + c as usize)
        }
    }

    pub fn coords(&self, q: usize) -> (i64, i64) {
        ((q % self.w) as i64, (q / self.w) as i64)
    }

    /// Kind of the generator anchored at (c, r), if that plaquette exists in this layout.
    pub fn plaquette_kind(&self, c: i64, r: i64) -> Option<StabKind> {
        let (w, h) = (self.w as i64, self.h as i64);
        let k = plane_kind(c, r);
        let bulk_c = (0..=w - 2).contains(&c);
        let bulk_r = (0..=h - 2).contains(&r);
        if bulk_c && bulk_r {
            Some(k)
        } else if bulk_c && (r == -1 || r == h - 1) {
            (k == StabKind::X).then_some(k)
        } else if bulk_r && (c == -1 || c == w - 1) {
            (k == StabKind::Z).then_some(k)
        } else {
            None
        }
    }

    pub fn generator_index(&self, c: i64, r: i64) -> Option<usize> {
        self.plaquette_kind(c, r)?;
        let (w, h) = (self.w as i64, self.h as i64);
        let base = self.row_start[(r + 1) as usize];
        let off = if r == -1 || r == h - 1 {
            let c0 = if plane_kind(0, r) == StabKind::X { 0 } else { 1 };
            (c - c0) / 2
        } else {
            let left = (plane_kind(-1, r) == StabKind::Z) as i64;
            if c == -1 {
                0
            } else if c == w - 1 {
                left + w - 1
            } else {
                left + c
            }
        };
        Some(base + off as usize)
    }

    /// Anchor of generator `g`.
    pub fn generator_position(&self, g: usize) -> Option<(i64, i64)> {
        if g >= self.num_generators() {
            return None;
        }
        let slot = self.row_start.partition_point(|&s| s <= g) - 1;
        let r = slot as i64 - 1;
        let off = (g - self.row_start[slot]) as i64;
        let (w, h) = (self.w as i64, self.h as i64);
        let c = if r == -1 || r == h - 1 {
            let c0 = if plane_kind(0, r) == StabKind::X { 0 } else { 1 };
            c0 + 2 * off
        } else {
            let left = (plane_kind(-1, r) == StabKind::Z) as i64;
            if left == 1 && off == 0 {
                -1
            } else if off - left == w - 1 {
                w - 1
            } else {
                off - left
            }
        };
        Some((c, r))
    }

    pub fn generator(&self, g: usize) -> Option<StabilizerGenerator> {
        let (c, r) = self.generator_position(g)?;
        let kind = self.plaquette_kind(c, r)?;
        let qubits = plaquette_cells(c, r)
            .iter()
            .filter_map(|&(qc, qr)| self.qubit_index(qc, qr))
            .collect();
        Some(StabilizerGenerator { kind, qubits, position: (c, r) })
    }

    pub fn generators(&self) -> impl Iterator<Item = StabilizerGenerator> + '_ {
        (0..self.num_generators()).map(|g| self.generator(g).unwrap())
    }

    /// Generators (index, kind) containing qubit `q`.
    pub fn generators_of_qubit(&self, q: usize) -> Vec<(usize, StabKind)> {
        let (c, r) = self.coords(q);
        plaquettes_of_cell(c, r)
            .iter()
            .filter_map(|&(pc, pr)| Some((self.generator_index(pc, pr)?, self.plaquette_kind(pc, pr)?)))
            .collect()
    }

    /// X on column 0, bottom to top.
    pub fn logical_x(&self) -> PauliOperator {
        PauliOperator::uniform(self.num_qubits(), (0..self.h).map(|r| r * self.w), Letter::X).unwrap()
    }

    /// Z on row 0, left to right.
    pub fn logical_z(&self) -> PauliOperator {
        PauliOperator::uniform(self.num_qubits(), 0..self.w, Letter::Z).unwrap()
    }

    fn check(&self, e: &PauliOperator) -> Result<()> {
        if e.num_qubits() != self.num_qubits() {
            return Err(Error::Dimension { expected: self.num_qubits(), found: e.num_qubits() });
        }
        Ok(())
    }

    pub fn syndrome_of(&self, e: &PauliOperator) -> Result<SyndromeVector> {
        self.check(e)?;
        let mut s = SyndromeVector::default();
        for (&q, &l) in e.support() {
            for (g, k) in self.generators_of_qubit(q) {
                if k.detects(l) {
                    s.toggle(g);
                }
            }
        }
        Ok(s)
    }

    /// (anticommutes with logical Z, anticommutes with logical X)
    fn logical_bits(&self, d: &PauliOperator) -> (bool, bool) {
        let mut xz = false;
        let mut zx = false;
        for (&q, &l) in d.support() {
            let (c, r) = self.coords(q);
            let (x, z) = l.bits();
            if r == 0 && x {
                xz ^= true;
            }
            if c == 0 && z {
                zx ^= true;
            }
        }
        (xz, zx)
    }

    /// Class of `e * e_ref` relative to the stabilizer group.
    pub fn logical_class(&self, e: &PauliOperator, e_ref: &PauliOperator) -> Result<Letter> {
        self.check(e)?;
        self.check(e_ref)?;
        if self.syndrome_of(e)? != self.syndrome_of(e_ref)? {
            return Err(Error::Precondition("errors have different syndromes".into()));
        }
        let d = e.multiply(e_ref)?;
        let (a, b) = self.logical_bits(&d);
        Ok(Letter::from_bits(a, b))
    }

    pub fn enumerate_stabilizer_group(&self) -> Result<Vec<PauliOperator>> {
        self.enumerate_stabilizer_group_capped(GROUP_ENUMERATION_CAP)
    }

    pub fn enumerate_stabilizer_group_capped(&self, cap: usize) -> Result<Vec<PauliOperator>> {
        let g = self.num_generators();
        if g > cap {
            return Err(Error::cap("stabilizer generators", cap, g));
        }
        let n = self.num_qubits();
        let gens: Vec<PauliOperator> = self.generators().map(|s| s.to_pauli(n)).collect();
        let mut out = Vec::with_capacity(1 << g);
        let mut cur = PauliOperator::identity(n);
        out.push(cur.clone());
        for i in 1u64..(1u64 << g) {
            // Gray code: flip the lowest set bit of i
            let bit = i.trailing_zeros() as usize;
            cur = cur.multiply(&gens[bit])?;
            out.push(cur.clone());
        }
        Ok(out)
    }
}
