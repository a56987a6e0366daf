//! Thermal averages over a full [`Spectrum`]: partition function, energy,
//! two-spin correlations `K_ij = <sigma_i . sigma_j>` and two-spin reduced
//! density matrices.
//!
//! Averages are always taken level by level with Boltzmann weights; the
//! `2^L` density matrix is never formed.

use nalgebra::{DVectorView, Matrix4};

use crate::eigen::{degeneracy_tol, Spectrum};
use crate::error::{Error, Result};
use crate::hamiltonian::SectorBasis;

/// Normalized Boltzmann weights of every level of a spectrum.
#[derive(Debug, Clone)]
pub struct ThermalState {
    temperature: f64,
    /// `Z e^{beta E0}`, i.e. the partition function of `H - E0`.
    shifted_z: f64,
    ln_z: f64,
    /// Per sector, per level; sums to one.
    weights: Vec<Vec<f64>>,
}

impl ThermalState {
    /// Gibbs state at temperature `T`. `T = 0` gives equal weights over the
    /// degenerate ground manifold.
    pub fn new(spectrum: &Spectrum, temperature: f64) -> Result<Self> {
        if !temperature.is_finite() || temperature < 0.0 {
            return Err(Error::param(
                "T",
                format!("must be finite and non-negative, got {temperature}"),
            ));
        }
        let e0 = spectrum.ground_energy();
        let mut weights: Vec<Vec<f64>> = if temperature == 0.0 {
            let tol = degeneracy_tol(e0);
            spectrum
                .sectors()
                .iter()
                .map(|s| {
                    s.energies()
                        .iter()
                        .map(|&e| if e - e0 <= tol { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect()
        } else {
            let beta = 1.0 / temperature;
            spectrum
                .sectors()
                .iter()
                .map(|s| s.energies().iter().map(|&e| (-beta * (e - e0)).exp()).collect())
                .collect()
        };
        let shifted_z: f64 = weights.iter().flatten().sum();
        for w in weights.iter_mut().flatten() {
            *w /= shifted_z;
        }
        let ln_z = if temperature == 0.0 {
            f64::INFINITY
        } else {
            shifted_z.ln() - e0 / temperature
        };
        Ok(Self {
            temperature,
            shifted_z,
            ln_z,
            weights,
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    /// `ln Z`; infinite at `T = 0`.
    pub fn ln_partition_function(&self) -> f64 {
        self.ln_z
    }

    /// `Z`, which may overflow for large `|E0| / T`.
    pub fn partition_function(&self) -> f64 {
        self.ln_z.exp()
    }

    /// `sum_i exp(-beta (E_i - E0))`; at `T = 0` the ground degeneracy.
    pub fn shifted_partition_function(&self) -> f64 {
        self.shifted_z
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Weighted average of a per-level quantity laid out like the spectrum.
    pub fn average(&self, per_level: &[Vec<f64>]) -> f64 {
        self.weights
            .iter()
            .zip(per_level)
            .flat_map(|(w, x)| w.iter().zip(x))
            .map(|(w, x)| w * x)
            .sum()
    }
}

/// Per-level energies in the layout expected by [`ThermalState::average`].
pub fn level_energies(spectrum: &Spectrum) -> Vec<Vec<f64>> {
    spectrum.sectors().iter().map(|s| s.energies().to_vec()).collect()
}

pub fn thermal_energy(spectrum: &Spectrum, temperature: f64) -> Result<f64> {
    let state = ThermalState::new(spectrum, temperature)?;
    Ok(state.average(&level_energies(spectrum)))
}

fn check_pair(sites: usize, i: usize, j: usize) -> Result<()> {
    if i >= sites || j >= sites {
        return Err(Error::param("site", format!("pair ({i}, {j}) outside 0..{sites}")));
    }
    if i == j {
        return Err(Error::param("site", format!("pair ({i}, {j}) must be two distinct sites")));
    }
    Ok(())
}

/// `<v| sigma_i . sigma_j |v>` for a vector in a sector basis.
pub fn pair_expectation(basis: &SectorBasis, v: DVectorView<'_, f64>, i: usize, j: usize) -> f64 {
    let flip = (1u32 << i) | (1u32 << j);
    let mut acc = 0.0;
    for (k, &s) in basis.states().iter().enumerate() {
        let c = v[k];
        if c == 0.0 {
            continue;
        }
        if ((s >> i) ^ (s >> j)) & 1 == 0 {
            acc += c * c;
        } else {
            acc -= c * c;
            let partner = basis
                .index_of(s ^ flip)
                .expect("exchange conserves the number of up spins");
            acc += 2.0 * c * v[partner];
        }
    }
    acc
}

/// `<v| sigma^z_i sigma^z_j |v>`.
pub fn zz_expectation(basis: &SectorBasis, v: DVectorView<'_, f64>, i: usize, j: usize) -> f64 {
    basis
        .states()
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let sign = if ((s >> i) ^ (s >> j)) & 1 == 0 { 1.0 } else { -1.0 };
            sign * v[k] * v[k]
        })
        .sum()
}

/// `<sigma_i . sigma_j>` in every eigenstate, laid out like the spectrum.
pub fn pair_expectations(spectrum: &Spectrum, i: usize, j: usize) -> Result<Vec<Vec<f64>>> {
    check_pair(spectrum.params().sites(), i, j)?;
    Ok(per_level(spectrum, |basis, v| pair_expectation(basis, v, i, j)))
}

pub fn zz_expectations(spectrum: &Spectrum, i: usize, j: usize) -> Result<Vec<Vec<f64>>> {
    check_pair(spectrum.params().sites(), i, j)?;
    Ok(per_level(spectrum, |basis, v| zz_expectation(basis, v, i, j)))
}

fn per_level(
    spectrum: &Spectrum,
    f: impl Fn(&SectorBasis, DVectorView<'_, f64>) -> f64,
) -> Vec<Vec<f64>> {
    spectrum
        .sectors()
        .iter()
        .map(|s| (0..s.len()).map(|k| f(s.basis(), s.vector(k))).collect())
        .collect()
}

/// Thermal correlation `K_ij = Tr[rho sigma_i . sigma_j]`, in `[-3, 3]`.
pub fn correlation(spectrum: &Spectrum, temperature: f64, i: usize, j: usize) -> Result<f64> {
    let per_level = pair_expectations(spectrum, i, j)?;
    let state = ThermalState::new(spectrum, temperature)?;
    Ok(state.average(&per_level))
}

/// SU(2)-invariant two-spin state fixed by its correlation `K`:
///
/// ```text
///     | u 0 0 0 |
///     | 0 w t 0 |     u = 1/4 + K/12,  w = 1/4 - K/12,  t = K/6
///     | 0 t w 0 |
///     | 0 0 0 u |
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSpinRdm {
    pub k: f64,
    pub u: f64,
    pub w: f64,
    pub t: f64,
}

impl TwoSpinRdm {
    /// Fails outside the positivity window `-3 <= K <= 1`.
    pub fn from_correlation(k: f64) -> Result<Self> {
        if !(-3.0..=1.0).contains(&k) {
            return Err(Error::Positivity(k));
        }
        Ok(Self {
            k,
            u: 0.25 + k / 12.0,
            w: 0.25 - k / 12.0,
            t: k / 6.0,
        })
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        let (u, w, t) = (self.u, self.w, self.t);
        Matrix4::new(
            u, 0.0, 0.0, 0.0, //
            0.0, w, t, 0.0, //
            0.0, t, w, 0.0, //
            0.0, 0.0, 0.0, u,
        )
    }
}

pub fn rdm_from_correlation(k: f64) -> Result<TwoSpinRdm> {
    TwoSpinRdm::from_correlation(k)
}

/// What to reduce: one normalized sector vector, or a thermal state of a
/// spectrum.
#[derive(Debug, Clone, Copy)]
pub enum DensitySource<'a> {
    Pure {
        basis: &'a SectorBasis,
        amplitudes: DVectorView<'a, f64>,
    },
    Thermal {
        spectrum: &'a Spectrum,
        state: &'a ThermalState,
    },
}

fn local_index(s: u32, i: usize, j: usize) -> usize {
    3 - (2 * ((s >> i) & 1) + ((s >> j) & 1)) as usize
}

fn accumulate_pure(
    rho: &mut Matrix4<f64>,
    basis: &SectorBasis,
    v: DVectorView<'_, f64>,
    i: usize,
    j: usize,
    weight: f64,
) {
    let flip = (1u32 << i) | (1u32 << j);
    for (k, &s) in basis.states().iter().enumerate() {
        let c = v[k];
        if c == 0.0 {
            continue;
        }
        let a = local_index(s, i, j);
        rho[(a, a)] += weight * c * c;
        if ((s >> i) ^ (s >> j)) & 1 == 1 {
            let partner = basis
                .index_of(s ^ flip)
                .expect("exchange conserves the number of up spins");
            let b = local_index(s ^ flip, i, j);
            rho[(b, a)] += weight * c * v[partner];
        }
    }
}

/// Exact two-spin reduced density matrix of sites `(i, j)`, tracing out
/// every other spin. States are real, so the result is real symmetric.
pub fn rdm_by_partial_trace(source: DensitySource<'_>, i: usize, j: usize) -> Result<Matrix4<f64>> {
    let mut rho = Matrix4::zeros();
    match source {
        DensitySource::Pure { basis, amplitudes } => {
            check_pair(basis.sites(), i, j)?;
            accumulate_pure(&mut rho, basis, amplitudes, i, j, 1.0);
        }
        DensitySource::Thermal { spectrum, state } => {
            check_pair(spectrum.params().sites(), i, j)?;
            for (sector, weights) in spectrum.sectors().iter().zip(state.weights()) {
                for (k, &w) in weights.iter().enumerate() {
                    if w > 0.0 {
                        accumulate_pure(&mut rho, sector.basis(), sector.vector(k), i, j, w);
                    }
                }
            }
        }
    }
    Ok(rho)
}

/// `Tr[rho (sigma^z (x) 1)]` for a two-spin matrix in the crate ordering.
pub fn first_site_sz(rho: &Matrix4<f64>) -> f64 {
    rho[(0, 0)] + rho[(1, 1)] - rho[(2, 2)] - rho[(3, 3)]
}

/// `Tr[rho (1 (x) sigma^z)]`.
pub fn second_site_sz(rho: &Matrix4<f64>) -> f64 {
    rho[(0, 0)] - rho[(1, 1)] + rho[(2, 2)] - rho[(3, 3)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::diagonalize;
    use crate::hamiltonian::ChainParams;
    use approx::assert_abs_diff_eq;

    fn spectrum(sites: usize, alpha: f64) -> Spectrum {
        diagonalize(&ChainParams::unit(sites, alpha).unwrap()).unwrap()
    }

    #[test]
    fn weights_are_normalized_and_stable_at_low_temperature() {
        let s = spectrum(6, 0.4);
        for t in [0.0, 1e-3, 0.05, 1.0, 50.0] {
            let th = ThermalState::new(&s, t).unwrap();
            let total: f64 = th.weights().iter().flatten().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            assert!(th.weights().iter().flatten().all(|w| w.is_finite()));
        }
        assert!(ThermalState::new(&s, -0.1).is_err());
        assert!(ThermalState::new(&s, f64::NAN).is_err());
    }

    #[test]
    fn partition_function_of_single_dimer() {
        let s = spectrum(2, 0.0);
        let t: f64 = 0.7;
        let b = 1.0 / t;
        let z = (0.75 * b).exp() + 3.0 * (-0.25 * b).exp();
        let th = ThermalState::new(&s, t).unwrap();
        assert_abs_diff_eq!(th.partition_function(), z, epsilon = 1e-12);
        assert_abs_diff_eq!(th.beta(), b, epsilon = 0.0);
    }

    #[test]
    fn energy_limits() {
        let s = spectrum(4, 1.0);
        assert_abs_diff_eq!(thermal_energy(&s, 0.0).unwrap(), -2.0, epsilon = 1e-12);
        // Leading high-temperature term: E ~ -Tr(H^2) / (2^L T) = -(3/16) sum_b g_b^2 / T.
        for (sites, alpha) in [(4, 0.5), (6, 0.2), (8, 1.0)] {
            let s = spectrum(sites, alpha);
            let p = s.params();
            let g2: f64 = p.bonds().iter().map(|b| b.strength * b.strength).sum();
            let t = 1e4;
            let e = thermal_energy(&s, t).unwrap();
            assert_abs_diff_eq!(e * t, -3.0 / 16.0 * g2, epsilon = 1e-3);
            assert_abs_diff_eq!(thermal_energy(&s, 1e7).unwrap(), 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn energy_is_nondecreasing_in_temperature() {
        let s = spectrum(6, 0.7);
        let mut last = thermal_energy(&s, 0.0).unwrap();
        for k in 1..200 {
            let e = thermal_energy(&s, 0.02 * k as f64).unwrap();
            assert!(e >= last - 1e-12);
            last = e;
        }
    }

    #[test]
    fn limit_correlations_of_four_ring() {
        let s0 = spectrum(4, 0.0);
        assert_abs_diff_eq!(correlation(&s0, 0.0, 0, 1).unwrap(), -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(correlation(&s0, 0.0, 1, 2).unwrap(), 0.0, epsilon = 1e-12);
        let s1 = spectrum(4, 1.0);
        assert_abs_diff_eq!(correlation(&s1, 0.0, 1, 2).unwrap(), -2.0, epsilon = 1e-12);
        assert!(correlation(&s1, 0.0, 2, 2).is_err());
        assert!(correlation(&s1, 0.0, 0, 4).is_err());
    }

    #[test]
    fn rdm_elements() {
        let r = rdm_from_correlation(-3.0).unwrap();
        assert_eq!((r.u, r.w, r.t), (0.0, 0.5, -0.5));
        let r = rdm_from_correlation(0.0).unwrap();
        assert_eq!((r.u, r.w, r.t), (0.25, 0.25, 0.0));
        let r = rdm_from_correlation(-2.0).unwrap();
        assert_abs_diff_eq!(r.u, 1.0 / 12.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.w, 5.0 / 12.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.t, -1.0 / 3.0, epsilon = 1e-15);
        assert!(matches!(rdm_from_correlation(1.5), Err(Error::Positivity(_))));
        assert!(matches!(rdm_from_correlation(-3.01), Err(Error::Positivity(_))));
    }

    #[test]
    fn ground_state_rdm_matches_isotropic_form() {
        let s = spectrum(4, 1.0);
        let th = ThermalState::new(&s, 0.0).unwrap();
        let rho = rdm_by_partial_trace(DensitySource::Thermal { spectrum: &s, state: &th }, 0, 1).unwrap();
        let k = correlation(&s, 0.0, 0, 1).unwrap();
        assert_abs_diff_eq!(k, -2.0, epsilon = 1e-12);
        let iso = rdm_from_correlation(k).unwrap().matrix();
        assert!((rho - iso).amax() < 1e-10);
    }

    #[test]
    fn pure_singlet_rdm() {
        let s = spectrum(2, 0.0);
        let lvl = s.ground_levels()[0];
        let sector = &s.sectors()[lvl.sector];
        let rho = rdm_by_partial_trace(
            DensitySource::Pure {
                basis: sector.basis(),
                amplitudes: sector.vector(lvl.index),
            },
            0,
            1,
        )
        .unwrap();
        let singlet = rdm_from_correlation(-3.0).unwrap().matrix();
        assert!((rho - singlet).amax() < 1e-12);
    }

    #[test]
    fn thermal_rdm_has_no_magnetization() {
        let s = spectrum(4, 0.3);
        let th = ThermalState::new(&s, 0.5).unwrap();
        let rho = rdm_by_partial_trace(DensitySource::Thermal { spectrum: &s, state: &th }, 1, 2).unwrap();
        assert_abs_diff_eq!(first_site_sz(&rho), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(second_site_sz(&rho), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        assert!((rho - rho.transpose()).amax() < 1e-14);
        let min = rho.symmetric_eigenvalues().min();
        assert!(min > -1e-10);
    }

    #[test]
    fn correlations_vanish_at_high_temperature() {
        // Bonded pairs decay as -3 g / (4 T); the rest faster.
        let s = spectrum(8, 0.5);
        assert_abs_diff_eq!(correlation(&s, 1e3, 0, 1).unwrap() * 1e3, -0.75, epsilon = 1e-3);
        assert_abs_diff_eq!(correlation(&s, 1e3, 1, 2).unwrap() * 1e3, -0.375, epsilon = 1e-3);
        for j in 1..8 {
            assert!(correlation(&s, 1e4, 0, j).unwrap().abs() <= 1e-4);
        }
    }
}
