//! Chain definition, bitmask basis with fixed magnetization, and the
//! per-sector Hamiltonian blocks.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = J' * sum_k ( S_{2k} . S_{2k+1} + alpha * S_{2k+1} . S_{2k+2} )
//! ```
//!
//! on a periodic ring of `L` spins. Each `S_i . S_j` term is diagonal
//! `+1/4` on parallel spins, `-1/4` on antiparallel spins, and swaps an
//! antiparallel pair with amplitude `1/2`. Total `S^z` is conserved, so the
//! matrix is assembled independently in every `n_up` sector.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest ring handled by the dense solvers.
pub const MAX_SITES: usize = 16;

/// System definition of the dimerized ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    sites: usize,
    alpha: f64,
    j_prime: f64,
}

impl ChainParams {
    /// Validates and builds the parameter set for an `L`-site ring with
    /// alternation `alpha` and intra-dimer coupling `j_prime`.
    pub fn new(sites: usize, alpha: f64, j_prime: f64) -> Result<Self> {
        if sites < 2 || !sites.is_multiple_of(2) {
            return Err(Error::param("L", format!("must be even and >= 2, got {sites}")));
        }
        if sites > MAX_SITES {
            return Err(Error::param(
                "L",
                format!("at most {MAX_SITES} sites are supported, got {sites}"),
            ));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::param("alpha", format!("must lie in [0, 1], got {alpha}")));
        }
        if !(j_prime > 0.0 && j_prime.is_finite()) {
            return Err(Error::param(
                "j_prime",
                format!("must be positive and finite, got {j_prime}"),
            ));
        }
        Ok(Self {
            sites,
            alpha,
            j_prime,
        })
    }

    /// `J' = 1`, the normalization used for every reported curve.
    pub fn unit(sites: usize, alpha: f64) -> Result<Self> {
        Self::new(sites, alpha, 1.0)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn j_prime(&self) -> f64 {
        self.j_prime
    }

    pub fn dimers(&self) -> usize {
        self.sites / 2
    }

    /// Alternating ratio `delta = (1 - alpha) / (1 + alpha)` of the
    /// uniform-coupling form of the Hamiltonian.
    pub fn delta(&self) -> f64 {
        (1.0 - self.alpha) / (1.0 + self.alpha)
    }

    /// Uniform-form coupling `J = J' (1 + alpha) / 2`.
    pub fn uniform_coupling(&self) -> f64 {
        self.j_prime * (1.0 + self.alpha) / 2.0
    }

    /// Same chain with a different alternation.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.sites, alpha, self.j_prime)
    }

    /// The `L` ring bonds, alternating `J'` and `alpha J'`, closed by the
    /// weak `(L-1, 0)` bond. For `L = 2` both bonds join the same pair and
    /// their strengths add up in the Hamiltonian.
    pub fn bonds(&self) -> Vec<Bond> {
        (0..self.sites)
            .map(|i| Bond {
                i,
                j: (i + 1) % self.sites,
                strength: if i % 2 == 0 {
                    self.j_prime
                } else {
                    self.alpha * self.j_prime
                },
            })
            .collect()
    }

    /// Representative intra-dimer pair `(0, 1)`.
    pub fn intra_pair(&self) -> (usize, usize) {
        (0, 1)
    }

    /// Representative inter-dimer pair `(1, 2 mod L)`.
    pub fn inter_pair(&self) -> (usize, usize) {
        (1, 2 % self.sites)
    }
}

/// A nearest-neighbour exchange term `strength * S_i . S_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub strength: f64,
}

/// Computational basis states with a fixed number of up spins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    sites: usize,
    n_up: usize,
    states: Vec<u32>,
}

impl SectorBasis {
    pub fn new(sites: usize, n_up: usize) -> Result<Self> {
        if sites == 0 || sites > MAX_SITES {
            return Err(Error::param("L", format!("must lie in 1..={MAX_SITES}, got {sites}")));
        }
        if n_up > sites {
            return Err(Error::param(
                "n_up",
                format!("must lie in 0..={sites}, got {n_up}"),
            ));
        }
        let states = (0u32..1 << sites)
            .filter(|s| s.count_ones() as usize == n_up)
            .collect();
        Ok(Self {
            sites,
            n_up,
            states,
        })
    }

    /// All `L + 1` sectors, in increasing `n_up`.
    pub fn all(sites: usize) -> Result<Vec<Self>> {
        (0..=sites).map(|n| Self::new(sites, n)).collect()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Masks in strictly increasing order.
    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn index_of(&self, mask: u32) -> Option<usize> {
        self.states.binary_search(&mask).ok()
    }

    /// Total `sigma^z` of the sector, `2 n_up - L`.
    pub fn magnetization(&self) -> i64 {
        2 * self.n_up as i64 - self.sites as i64
    }
}

/// Dense real symmetric Hamiltonian block of one sector.
#[derive(Debug, Clone)]
pub struct SectorMatrix {
    n_up: usize,
    entries: DMatrix<f64>,
}

impl SectorMatrix {
    pub fn build(params: &ChainParams, basis: &SectorBasis) -> Result<Self> {
        if basis.sites() != params.sites() {
            return Err(Error::param(
                "basis",
                format!(
                    "built for L = {}, chain has L = {}",
                    basis.sites(),
                    params.sites()
                ),
            ));
        }
        let dim = basis.dim();
        let bonds = params.bonds();
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for (col, &state) in basis.states().iter().enumerate() {
            for bond in &bonds {
                let bi = (state >> bond.i) & 1;
                let bj = (state >> bond.j) & 1;
                if bi == bj {
                    h[(col, col)] += 0.25 * bond.strength;
                } else {
                    h[(col, col)] -= 0.25 * bond.strength;
                    let flipped = state ^ ((1 << bond.i) | (1 << bond.j));
                    let row = basis
                        .index_of(flipped)
                        .expect("exchange conserves the number of up spins");
                    h[(row, col)] += 0.5 * bond.strength;
                }
            }
        }
        Ok(Self {
            n_up: basis.n_up(),
            entries: h,
        })
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }
}
