//! Resource caps shared by the enumerators and the compiler.

use crate::error::{Error, Result};

/// Environment variable selecting a cap profile (`default`, `small`, `large`).
pub const CAPS_ENV: &str = "SURFRED_CAPS";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Qubits for 4^n dense enumeration.
    pub dense_qubits: usize,
    /// Generators for stabilizer group enumeration.
    pub group_generators: usize,
    /// Option qubits for support-restricted search and gadget verification.
    pub support_qubits: usize,
    /// Search steps before a support-restricted enumeration gives up.
    pub node_budget: u64,
    /// Lattice qubits (w·h) a compiled instance may have.
    pub grid_qubits: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            dense_qubits: 12,
            group_generators: 16,
            support_qubits: 4096,
            node_budget: 5_000_000,
            grid_qubits: 1 << 32,
        }
    }
}

impl Caps {
    pub fn profile(name: &str) -> Result<Caps> {
        let d = Caps::default();
        match name {
            "default" | "" => Ok(d),
            "small" => Ok(Caps { dense_qubits: 10, support_qubits: 1024, node_budget: 500_000, grid_qubits: 1 << 24, ..d }),
            "large" => Ok(Caps {
                dense_qubits: 14,
                group_generators: 20,
                support_qubits: 16384,
                node_budget: 50_000_000,
                grid_qubits: 1 << 40,
            }),
            _ => Err(Error::InvalidParameter(format!("unknown cap profile `{name}`"))),
        }
    }

    pub fn from_env() -> Result<Caps> {
        match std::env::var(CAPS_ENV) {
            Ok(v) => Caps::profile(v.trim()),
            Err(_) => Ok(Caps::default()),
        }
    }
}
