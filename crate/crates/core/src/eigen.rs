//! Full eigendecomposition, sector by sector.
//!
//! Every sector block is diagonalized densely with all eigenvectors, since
//! thermal averages need every level. `dense_oracle` rebuilds the whole
//! `2^L` matrix from the two-site bond operator and diagonalizes it with an
//! independent cyclic Jacobi routine; it exists only to cross-check the
//! sector route on small rings.

use nalgebra::{DMatrix, DVector, DVectorView, Matrix4, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hamiltonian::{ChainParams, SectorBasis, SectorMatrix};

const MAX_SWEEPS: usize = 10_000;
const RESIDUAL_TOL: f64 = 1e-9;

/// Degeneracy window `1e-9 * max(1, |E|)`.
pub fn degeneracy_tol(energy: f64) -> f64 {
    1e-9 * energy.abs().max(1.0)
}

/// Eigenpairs of one `n_up` block. Energies ascend, except that members of
/// a degenerate cluster are ordered by the position of their dominant
/// amplitude; `vectors` holds one normalized eigenvector per column.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    basis: SectorBasis,
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SectorSpectrum {
    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn n_up(&self) -> usize {
        self.basis.n_up()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vector(&self, level: usize) -> DVectorView<'_, f64> {
        self.vectors.column(level)
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

/// Location of one eigenstate inside a [`Spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Level {
    pub sector: usize,
    pub index: usize,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    params: ChainParams,
    sectors: Vec<SectorSpectrum>,
    ground_energy: f64,
    ground: Vec<Level>,
}

impl Spectrum {
    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    /// Sectors in increasing `n_up`; `sectors()[n]` has `n` up spins.
    pub fn sectors(&self) -> &[SectorSpectrum] {
        &self.sectors
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    /// All levels within the degeneracy window of the ground energy.
    pub fn ground_levels(&self) -> &[Level] {
        &self.ground
    }

    pub fn is_ground_degenerate(&self) -> bool {
        self.ground.len() > 1
    }

    /// Whether every ground level sits in the zero-magnetization sector.
    pub fn ground_in_zero_sector(&self) -> bool {
        let half = self.params.sites() / 2;
        self.ground
            .iter()
            .all(|lvl| self.sectors[lvl.sector].n_up() == half)
    }

    pub fn energy(&self, level: Level) -> f64 {
        self.sectors[level.sector].energies[level.index]
    }

    /// Every eigenvalue of `H`, sorted ascending.
    pub fn all_energies(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .sectors
            .iter()
            .flat_map(|s| s.energies.iter().copied())
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }

    pub fn dim(&self) -> usize {
        self.sectors.iter().map(SectorSpectrum::len).sum()
    }

    /// Embeds a sector eigenvector in the full `2^L` amplitude space.
    pub fn full_vector(&self, level: Level) -> DVector<f64> {
        let sector = &self.sectors[level.sector];
        let mut full = DVector::zeros(1 << self.params.sites());
        for (k, &mask) in sector.basis.states().iter().enumerate() {
            full[mask as usize] = sector.vectors[(k, level.index)];
        }
        full
    }

    /// The ground manifold as full-space vectors.
    pub fn ground_state_vectors(&self) -> GroundStates {
        GroundStates {
            energy: self.ground_energy,
            vectors: self
                .ground
                .iter()
                .map(|&lvl| (self.sectors[lvl.sector].n_up(), self.full_vector(lvl)))
                .collect(),
        }
    }
}

/// Ground manifold embedded in the full Hilbert space.
#[derive(Debug, Clone)]
pub struct GroundStates {
    pub energy: f64,
    /// `(n_up, amplitudes)` for every degenerate member.
    pub vectors: Vec<(usize, DVector<f64>)>,
}

impl GroundStates {
    pub fn is_degenerate(&self) -> bool {
        self.vectors.len() > 1
    }
}

/// Diagonalizes every sector of the ring.
pub fn diagonalize(params: &ChainParams) -> Result<Spectrum> {
    let sectors = SectorBasis::all(params.sites())?
        .into_iter()
        .map(|basis| diagonalize_sector(params, basis))
        .collect::<Result<Vec<_>>>()?;

    let ground_energy = sectors
        .iter()
        .filter_map(|s| s.energies.first().copied())
        .fold(f64::INFINITY, f64::min);
    let tol = degeneracy_tol(ground_energy);
    let ground = sectors
        .iter()
        .enumerate()
        .flat_map(|(si, s)| {
            s.energies
                .iter()
                .take_while(move |&&e| e - ground_energy <= tol)
                .enumerate()
                .map(move |(index, _)| Level { sector: si, index })
        })
        .collect();

    Ok(Spectrum {
        params: *params,
        sectors,
        ground_energy,
        ground,
    })
}

/// Eigenpairs of a single sector, sorted and sign-fixed for reproducible
/// output.
pub fn diagonalize_sector(params: &ChainParams, basis: SectorBasis) -> Result<SectorSpectrum> {
    let n_up = basis.n_up();
    let h = SectorMatrix::build(params, &basis)?.into_entries();
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, MAX_SWEEPS)
        .ok_or(Error::NoConvergence { n_up })?;

    let dim = basis.dim();
    let argmax = |col: usize| {
        let v = eig.eigenvectors.column(col);
        v.iamax()
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    // Within a degenerate cluster, order by the position of the dominant
    // amplitude.
    let mut start = 0;
    while start < dim {
        let e0 = eig.eigenvalues[order[start]];
        let tol = degeneracy_tol(e0);
        let mut end = start + 1;
        while end < dim && eig.eigenvalues[order[end]] - e0 <= tol {
            end += 1;
        }
        order[start..end].sort_by_key(|&c| argmax(c));
        start = end;
    }

    let energies: Vec<f64> = order.iter().map(|&c| eig.eigenvalues[c]).collect();
    let mut vectors = DMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let sign = if col[col.iamax()] < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(dst, &(col * sign));
    }

    check_residuals(&h, &energies, &vectors, n_up)?;

    Ok(SectorSpectrum {
        basis,
        energies,
        vectors,
    })
}

/// Sampled post-check of `||H v - lambda v||_inf`.
fn check_residuals(h: &DMatrix<f64>, energies: &[f64], vectors: &DMatrix<f64>, n_up: usize) -> Result<()> {
    let dim = energies.len();
    if dim == 0 {
        return Ok(());
    }
    let mut samples = vec![0, dim / 2, dim - 1];
    samples.dedup();
    for k in samples {
        let v = vectors.column(k);
        let r = h * v - v * energies[k];
        let residual = r.amax();
        if residual > RESIDUAL_TOL * energies[k].abs().max(1.0) {
            return Err(Error::Residual { n_up, residual });
        }
    }
    Ok(())
}

/// Global ground energy from eigenvalues only (no eigenvectors), scanning
/// all sectors.
pub fn ground_energy(params: &ChainParams) -> Result<f64> {
    let mut e0 = f64::INFINITY;
    for basis in SectorBasis::all(params.sites())? {
        let h = SectorMatrix::build(params, &basis)?.into_entries();
        let min = h.symmetric_eigenvalues().min();
        e0 = e0.min(min);
    }
    Ok(e0)
}

/// `S_i . S_j` in the two-site basis `{|11>, |10>, |01>, |00>}`.
pub fn bond_operator() -> Matrix4<f64> {
    Matrix4::new(
        0.25, 0.0, 0.0, 0.0, //
        0.0, -0.25, 0.5, 0.0, //
        0.0, 0.5, -0.25, 0.0, //
        0.0, 0.0, 0.0, 0.25,
    )
}

/// Full `2^L` Hamiltonian, assembled by embedding the two-site bond operator
/// for every bond without any symmetry reduction.
pub fn full_hamiltonian(params: &ChainParams) -> DMatrix<f64> {
    let sites = params.sites();
    let dim = 1usize << sites;
    let op = bond_operator();
    let local = |s: usize, i: usize, j: usize| 3 - (2 * ((s >> i) & 1) + ((s >> j) & 1));
    let mut h = DMatrix::zeros(dim, dim);
    for bond in params.bonds() {
        let clear = !((1usize << bond.i) | (1usize << bond.j));
        for col in 0..dim {
            let a = local(col, bond.i, bond.j);
            let rest = col & clear;
            for b in 0..4 {
                let amp = op[(b, a)];
                if amp == 0.0 {
                    continue;
                }
                let bits = 3 - b;
                let row = rest | ((bits >> 1) << bond.i) | ((bits & 1) << bond.j);
                h[(row, col)] += bond.strength * amp;
            }
        }
    }
    h
}

/// Sorted eigenvalues of the unreduced Hamiltonian. Limited to `L <= 8`.
pub fn dense_oracle(params: &ChainParams) -> Result<Vec<f64>> {
    if params.sites() > 8 {
        return Err(Error::OracleTooLarge(params.sites()));
    }
    let mut ev = jacobi_eigenvalues(full_hamiltonian(params));
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm vanishes
/// relative to the full norm.
fn jacobi_eigenvalues(mut a: DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    a.diagonal().iter().copied().collect()
}
