//! Independent, non-identically distributed single-qubit Pauli noise.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pauli::{Letter, LetterSet, PauliOperator};
use crate::rational::{self, ExactRational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QubitNoise {
    pub px: ExactRational,
    pub py: ExactRational,
    pub pz: ExactRational,
}

impl QubitNoise {
    pub fn new(px: ExactRational, py: ExactRational, pz: ExactRational) -> Result<Self> {
        let n = QubitNoise { px, py, pz };
        let zero = ExactRational::zero();
        if n.px < zero || n.py < zero || n.pz < zero || n.idle() < zero {
            return Err(Error::InvalidParameter(format!(
                "qubit probabilities {}, {}, {} are not a distribution",
                rational::format_rational(&n.px),
                rational::format_rational(&n.py),
                rational::format_rational(&n.pz)
            )));
        }
        Ok(n)
    }

    pub fn zero() -> Self {
        QubitNoise { px: ExactRational::zero(), py: ExactRational::zero(), pz: ExactRational::zero() }
    }

    /// Every letter in `letters` gets probability `p`, the rest zero.
    pub fn uniform_on(letters: LetterSet, p: &ExactRational) -> Result<Self> {
        let pick = |l| if letters.contains(l) { p.clone() } else { ExactRational::zero() };
        QubitNoise::new(pick(Letter::X), pick(Letter::Y), pick(Letter::Z))
    }

    pub fn idle(&self) -> ExactRational {
        ExactRational::one() - &self.px - &self.py - &self.pz
    }

    pub fn prob(&self, l: Letter) -> ExactRational {
        match l {
            Letter::I => self.idle(),
            Letter::X => self.px.clone(),
            Letter::Y => self.py.clone(),
            Letter::Z => self.pz.clone(),
        }
    }

    pub fn allowed(&self) -> LetterSet {
        LetterSet::from_letters(Letter::ALL.into_iter().filter(|&l| !self.prob(l).is_zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.px.is_zero() && self.py.is_zero() && self.pz.is_zero()
    }
}

/// Per-qubit noise; qubits absent from the map carry no noise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoiseModel {
    num_qubits: usize,
    qubits: BTreeMap<usize, QubitNoise>,
}

impl NoiseModel {
    pub fn new(num_qubits: usize) -> Self {
        NoiseModel { num_qubits, qubits: BTreeMap::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn set(&mut self, q: usize, noise: QubitNoise) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::Dimension { expected: self.num_qubits, found: q + 1 });
        }
        if noise.is_zero() {
            self.qubits.remove(&q);
        } else {
            self.qubits.insert(q, noise);
        }
        Ok(())
    }

    pub fn get(&self, q: usize) -> QubitNoise {
        self.qubits.get(&q).cloned().unwrap_or_else(QubitNoise::zero)
    }

    pub fn entries(&self) -> &BTreeMap<usize, QubitNoise> {
        &self.qubits
    }

    pub fn allowed_letters(&self, q: usize) -> Result<LetterSet> {
        if q >= self.num_qubits {
            return Err(Error::Dimension { expected: self.num_qubits, found: q + 1 });
        }
        Ok(self.qubits.get(&q).map_or(LetterSet::single(Letter::I), |n| n.allowed()))
    }

    /// Qubits with any nonzero letter probability, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.qubits.keys().copied().collect()
    }

    pub fn probability_of(&self, e: &PauliOperator) -> Result<ExactRational> {
        if e.num_qubits() != self.num_qubits {
            return Err(Error::Dimension { expected: self.num_qubits, found: e.num_qubits() });
        }
        for &q in e.support().keys() {
            if !self.qubits.contains_key(&q) {
                return Ok(ExactRational::zero());
            }
        }
        let factors: Vec<ExactRational> = self.qubits.iter().map(|(&q, n)| n.prob(e.get(q))).collect();
        Ok(rational::product(&factors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn allowed_sets() {
        let mut m = NoiseModel::new(3);
        assert_eq!(m.allowed_letters(0).unwrap(), LetterSet::single(Letter::I));
        m.set(1, QubitNoise::new(rat(1, 4), rat(0, 1), rat(0, 1)).unwrap()).unwrap();
        assert_eq!(m.allowed_letters(1).unwrap(), LetterSet::parse("IX").unwrap());
        m.set(2, QubitNoise::new(rat(1, 1), rat(0, 1), rat(0, 1)).unwrap()).unwrap();
        assert_eq!(m.allowed_letters(2).unwrap(), LetterSet::parse("X").unwrap());
        assert!(m.allowed_letters(3).is_err());
        assert_eq!(m.support(), vec![1, 2]);
    }

    #[test]
    fn rejects_bad_distribution() {
        assert!(QubitNoise::new(rat(1, 2), rat(1, 2), rat(1, 4)).is_err());
        assert!(QubitNoise::new(rat(-1, 2), rat(0, 1), rat(0, 1)).is_err());
    }

    #[test]
    fn zero_noise_identity_probability() {
        let m = NoiseModel::new(4);
        assert_eq!(m.probability_of(&PauliOperator::identity(4)).unwrap(), ExactRational::one());
        let x = PauliOperator::parse_literal("X1", 4).unwrap();
        assert!(m.probability_of(&x).unwrap().is_zero());
        assert!(m.probability_of(&PauliOperator::identity(5)).is_err());
    }
}
