//! Reductions from Boolean formulas to surface-code decoding, plus exact decoders.

pub mod caps;
pub mod compile;
pub mod decoders;
pub mod error;
pub mod formula;
pub mod gadget;
pub mod gf2;
pub mod instance;
pub mod lattice;
pub mod noise;
pub mod pipelines;
pub mod pauli;
pub mod planar;
pub mod rational;
pub mod render;

pub use error::{Error, Result};
pub use formula::{Expr, Formula};
pub use gadget::{GadgetKind, GadgetTemplate};
pub use lattice::{RotatedLayout, StabKind, StabilizerGenerator, SyndromeVector};
pub use noise::{NoiseModel, QubitNoise};
pub use pauli::{Letter, LetterSet, PauliOperator};
pub use rational::ExactRational;
