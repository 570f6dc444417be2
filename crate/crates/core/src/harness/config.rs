use serde::{Deserialize, Serialize};

use super::rng::TrialRng;
use crate::algebra::DEFAULT_TOL;
use crate::error::{Error, Result};

/// Shape of one instance: `M_d`, `A^n` and the destinations `A^{m_ξ}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub alg_dim: usize,
    pub source_len: usize,
    pub dst_lens: Vec<usize>,
}

impl Dims {
    pub fn uniform(alg_dim: usize, source_len: usize, atoms: usize, dst_len: usize) -> Self {
        Self {
            alg_dim,
            source_len,
            dst_lens: vec![dst_len; atoms],
        }
    }

    pub fn atoms(&self) -> usize {
        self.dst_lens.len()
    }

    /// `Σ m_ξ ≥ n`, needed for an invertible frame operator.
    pub fn spans_source(&self) -> bool {
        self.dst_lens.iter().sum::<usize>() >= self.source_len
    }

    pub fn validate(&self) -> Result<()> {
        if self.alg_dim == 0 || self.source_len == 0 {
            return Err(Error::invalid("dims", "d and n must be positive"));
        }
        if self.dst_lens.is_empty() || self.dst_lens.contains(&0) {
            return Err(Error::invalid(
                "dims",
                "need at least one atom, each with m ≥ 1",
            ));
        }
        Ok(())
    }
}

/// Inclusive ranges for `d`, `n`, the atom count `N` and each `m_ξ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRanges {
    pub alg_dim: [usize; 2],
    pub source_len: [usize; 2],
    pub atoms: [usize; 2],
    pub dst_len: [usize; 2],
}

impl Default for DimRanges {
    fn default() -> Self {
        Self {
            alg_dim: [1, 4],
            source_len: [1, 6],
            atoms: [1, 8],
            dst_len: [1, 4],
        }
    }
}

impl DimRanges {
    pub fn fixed(alg_dim: usize, source_len: usize, atoms: usize, dst_len: usize) -> Self {
        Self {
            alg_dim: [alg_dim, alg_dim],
            source_len: [source_len, source_len],
            atoms: [atoms, atoms],
            dst_len: [dst_len, dst_len],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, [lo, hi]) in [
            ("dims.alg_dim", self.alg_dim),
            ("dims.source_len", self.source_len),
            ("dims.atoms", self.atoms),
            ("dims.dst_len", self.dst_len),
        ] {
            if lo == 0 || lo > hi {
                return Err(Error::invalid(
                    name,
                    format!("range [{lo}, {hi}] is empty or starts at 0"),
                ));
            }
        }
        Ok(())
    }

    /// Draws `d`, `n`, `N`, then each `m_ξ`, in that order.
    pub fn sample(&self, rng: &mut TrialRng) -> Dims {
        let alg_dim = rng.index(self.alg_dim[0], self.alg_dim[1]);
        let source_len = rng.index(self.source_len[0], self.source_len[1]);
        let atoms = rng.index(self.atoms[0], self.atoms[1]);
        let dst_lens = (0..atoms)
            .map(|_| rng.index(self.dst_len[0], self.dst_len[1]))
            .collect();
        Dims {
            alg_dim,
            source_len,
            dst_lens,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub master_seed: u64,
    pub trials: usize,
    pub dims: DimRanges,
    /// Numerical rank and comparison tolerance.
    pub tol: f64,
}

impl TrialConfig {
    pub fn new(master_seed: u64, trials: usize) -> Self {
        Self {
            master_seed,
            trials,
            dims: DimRanges::default(),
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_dims(mut self, dims: DimRanges) -> Self {
        self.dims = dims;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::invalid("tol", "must be finite and positive"));
        }
        self.dims.validate()
    }
}
