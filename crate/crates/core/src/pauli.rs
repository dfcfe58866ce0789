//! Phaseless Pauli operators in sparse support-map form.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Single-qubit Pauli letter. Ordering is I < X < Y < Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    pub const NONTRIVIAL: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    /// Symplectic (x, z) bits.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn times(self, other: Letter) -> Letter {
        let (a, b) = self.bits();
        let (c, d) = other.bits();
        Letter::from_bits(a ^ c, b ^ d)
    }

    pub fn anticommutes(self, other: Letter) -> bool {
        self != Letter::I && other != Letter::I && self != other
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Subset of {I, X, Y, Z} as a 4-bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LetterSet(u8);

impl LetterSet {
    pub const EMPTY: LetterSet = LetterSet(0);
    pub const FULL: LetterSet = LetterSet(0b1111);

    pub fn single(l: Letter) -> Self {
        LetterSet(1 << l.index())
    }

    pub fn from_letters(ls: impl IntoIterator<Item = Letter>) -> Self {
        let mut s = LetterSet::EMPTY;
        for l in ls {
            s = s.with(l);
        }
        s
    }

    /// Parses letters such as `XZ` or `IXY`.
    pub fn parse(text: &str) -> Option<Self> {
        let mut s = LetterSet::EMPTY;
        for c in text.chars() {
            s = s.with(Letter::from_char(c)?);
        }
        Some(s)
    }

    pub fn with(self, l: Letter) -> Self {
        LetterSet(self.0 | 1 << l.index())
    }

    pub fn without(self, l: Letter) -> Self {
        LetterSet(self.0 & !(1 << l.index()))
    }

    pub fn contains(self, l: Letter) -> bool {
        self.0 & (1 << l.index()) != 0
    }

    pub fn union(self, o: LetterSet) -> Self {
        LetterSet(self.0 | o.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn letters(self) -> impl Iterator<Item = Letter> {
        Letter::ALL.into_iter().filter(move |l| self.contains(*l))
    }

    /// Non-identity letters only.
    pub fn nontrivial(self) -> LetterSet {
        self.without(Letter::I)
    }
}

impl fmt::Display for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Phaseless n-qubit Pauli operator. Identity qubits are absent from the support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    num_qubits: usize,
    support: BTreeMap<usize, Letter>,
}

impl PauliOperator {
    pub fn identity(num_qubits: usize) -> Self {
        PauliOperator { num_qubits, support: BTreeMap::new() }
    }

    pub fn from_pairs(num_qubits: usize, pairs: impl IntoIterator<Item = (usize, Letter)>) -> Result<Self> {
        let mut p = PauliOperator::identity(num_qubits);
        for (q, l) in pairs {
            p.set(q, l)?;
        }
        Ok(p)
    }

    /// Uniform letter on a set of qubits.
    pub fn uniform(num_qubits: usize, qubits: impl IntoIterator<Item = usize>, l: Letter) -> Result<Self> {
        Self::from_pairs(num_qubits, qubits.into_iter().map(|q| (q, l)))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn support(&self) -> &BTreeMap<usize, Letter> {
        &self.support
    }

    pub fn get(&self, q: usize) -> Letter {
        self.support.get(&q).copied().unwrap_or(Letter::I)
    }

    pub fn set(&mut self, q: usize, l: Letter) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::Dimension { expected: self.num_qubits, found: q + 1 });
        }
        if l == Letter::I {
            self.support.remove(&q);
        } else {
            self.support.insert(q, l);
        }
        Ok(())
    }

    /// Multiplies `l` into qubit `q` in place.
    pub fn apply(&mut self, q: usize, l: Letter) -> Result<()> {
        let cur = self.get(q);
        self.set(q, cur.times(l))
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_identity(&self) -> bool {
        self.support.is_empty()
    }

    fn check_dims(&self, other: &PauliOperator) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Dimension { expected: self.num_qubits, found: other.num_qubits });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (&q, &l) in &other.support {
            out.apply(q, l)?;
        }
        Ok(out)
    }

    pub fn commutes(&self, other: &PauliOperator) -> Result<bool> {
        self.check_dims(other)?;
        let (small, large) = if self.weight() <= other.weight() { (self, other) } else { (other, self) };
        let odd = small
            .support
            .iter()
            .filter(|(q, l)| l.anticommutes(large.get(**q)))
            .count()
            % 2
            == 1;
        Ok(!odd)
    }

    /// Dense symplectic view: (x bits, z bits) packed in 64-bit words.
    pub fn to_symplectic(&self) -> (Vec<u64>, Vec<u64>) {
        let words = self.num_qubits.div_ceil(64);
        let mut xs = vec![0u64; words];
        let mut zs = vec![0u64; words];
        for (&q, &l) in &self.support {
            let (x, z) = l.bits();
            if x {
                xs[q / 64] |= 1 << (q % 64);
            }
            if z {
                zs[q / 64] |= 1 << (q % 64);
            }
        }
        (xs, zs)
    }

    pub fn from_symplectic(num_qubits: usize, xs: &[u64], zs: &[u64]) -> Self {
        let mut p = PauliOperator::identity(num_qubits);
        for q in 0..num_qubits {
            let x = xs[q / 64] >> (q % 64) & 1 == 1;
            let z = zs[q / 64] >> (q % 64) & 1 == 1;
            let l = Letter::from_bits(x, z);
            if l != Letter::I {
                p.support.insert(q, l);
            }
        }
        p
    }

    /// Parses the literal format `X0 Y3 Z17`; the empty string is the identity.
    pub fn parse_literal(text: &str, num_qubits: usize) -> Result<Self> {
        let mut p = PauliOperator::identity(num_qubits);
        for (i, tok) in text.split_whitespace().enumerate() {
            let mut chars = tok.chars();
            let l = chars
                .next()
                .and_then(Letter::from_char)
                .ok_or_else(|| Error::parse(format!("token {}", i + 1), format!("bad letter in `{tok}`")))?;
            let q: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::parse(format!("token {}", i + 1), format!("bad qubit index in `{tok}`")))?;
            if p.support.contains_key(&q) {
                return Err(Error::parse(format!("token {}", i + 1), format!("qubit {q} repeated")));
            }
            p.set(q, l)?;
        }
        Ok(p)
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (q, l) in &self.support {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{l}{q}")?;
        }
        Ok(())
    }
}

/// Canonical order: lexicographic over (qubit index, letter) of the sorted support.
impl Ord for PauliOperator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.support
            .iter()
            .cmp(other.support.iter())
            .then(self.num_qubits.cmp(&other.num_qubits))
    }
}

impl PartialOrd for PauliOperator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliOperator {
        PauliOperator::parse_literal(s, 6).unwrap()
    }

    #[test]
    fn letter_products() {
        assert_eq!(p("X0").multiply(&p("Z0")).unwrap(), p("Y0"));
        assert_eq!(p("X0").multiply(&p("Z1")).unwrap(), p("X0 Z1"));
        assert!(p("X0 Y3").multiply(&p("X0 Y3")).unwrap().is_identity());
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("X0").commutes(&p("Z0")).unwrap());
        assert!(p("X0").commutes(&p("X0")).unwrap());
        assert!(p("X0 X1").commutes(&p("Z0 Z1")).unwrap());
    }

    #[test]
    fn weights() {
        assert_eq!(p("").weight(), 0);
        assert_eq!(p("X0 Y3").weight(), 2);
    }

    #[test]
    fn dimension_errors() {
        let a = PauliOperator::identity(3);
        let b = PauliOperator::identity(4);
        assert!(matches!(a.multiply(&b), Err(Error::Dimension { .. })));
        assert!(a.commutes(&b).is_err());
        assert!(PauliOperator::parse_literal("X5", 3).is_err());
    }

    #[test]
    fn literal_round_trip_and_order() {
        let a = p("Z5 X0 Y3");
        assert_eq!(a.to_string(), "X0 Y3 Z5");
        assert!(p("") < p("X0"));
        assert!(p("X0") < p("Y0"));
        assert!(p("Z0") < p("X1"));
        assert!(p("X0 X1") < p("X0 Y1"));
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
        proptest::collection::vec(0u8..4, n).prop_map(move |v| {
            PauliOperator::from_pairs(n, v.into_iter().enumerate().map(|(q, l)| (q, Letter::ALL[l as usize]))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn multiply_group_laws(a in arb_pauli(7), b in arb_pauli(7), c in arb_pauli(7)) {
            let ab = a.multiply(&b).unwrap();
            prop_assert_eq!(&ab, &b.multiply(&a).unwrap());
            prop_assert_eq!(ab.multiply(&c).unwrap(), a.multiply(&b.multiply(&c).unwrap()).unwrap());
            prop_assert_eq!(a.multiply(&PauliOperator::identity(7)).unwrap(), a.clone());
            prop_assert!(a.multiply(&a).unwrap().is_identity());
        }

        #[test]
        fn anticommutation_is_additive(a in arb_pauli(7), b in arb_pauli(7), c in arb_pauli(7)) {
            let lhs = a.commutes(&b.multiply(&c).unwrap()).unwrap();
            let rhs = a.commutes(&b).unwrap() == a.commutes(&c).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(a.commutes(&b).unwrap(), b.commutes(&a).unwrap());
        }

        #[test]
        fn symplectic_round_trip(a in arb_pauli(70)) {
            let (x, z) = a.to_symplectic();
            prop_assert_eq!(PauliOperator::from_symplectic(70, &x, &z), a);
        }

        #[test]
        fn literal_round_trip(a in arb_pauli(9)) {
            prop_assert_eq!(PauliOperator::parse_literal(&a.to_string(), 9).unwrap(), a);
        }
    }
}
