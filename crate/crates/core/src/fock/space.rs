use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Internal level of the ion. `Down` is the ground state |g>, `Up` the
/// excited state |e>.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Qubit {
    #[serde(alias = "g")]
    Down,
    #[serde(alias = "e")]
    Up,
}

impl Qubit {
    pub fn index(self) -> usize {
        match self {
            Qubit::Down => 0,
            Qubit::Up => 1,
        }
    }
}

/// Qubit ⊗ truncated Fock space, Fock levels `0..=n_max`.
///
/// Basis index is `qubit_index * (n_max + 1) + n` with `|↓>` first, so every
/// operator is a 2×2 grid of `(n_max + 1)`-sized boson blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSpace {
    n_max: usize,
}

impl HilbertSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::invalid("n_max must be at least 1"));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim_boson(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn index(&self, qubit: Qubit, n: usize) -> usize {
        debug_assert!(n <= self.n_max);
        qubit.index() * self.dim_boson() + n
    }

    /// Inverse of [`index`](Self::index).
    pub fn split(&self, index: usize) -> (Qubit, usize) {
        let nb = self.dim_boson();
        let q = if index < nb { Qubit::Down } else { Qubit::Up };
        (q, index % nb)
    }

    pub fn ensure_same(&self, other: &HilbertSpace) -> Result<()> {
        if self != other {
            return Err(Error::SpaceMismatch {
                left: self.n_max,
                right: other.n_max,
            });
        }
        Ok(())
    }
}
