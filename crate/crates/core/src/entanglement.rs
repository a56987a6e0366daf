//! Entanglement diagnostics: minimal separable energy, entanglement gap,
//! thermal energy witness and two-qubit concurrence.

use nalgebra::{Complex, DVector, Matrix4, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eigen::{full_hamiltonian, Spectrum};
use crate::error::{Error, Result};
use crate::hamiltonian::ChainParams;
use crate::observables::{pair_expectations, thermal_energy, ThermalState};

type C64 = Complex<f64>;

const STATE_TOL: f64 = 1e-8;

/// Lowest energy reachable by a product state, `-L (1 + alpha) J' / 8`.
pub fn separable_energy(params: &ChainParams) -> f64 {
    -(params.sites() as f64) * (1.0 + params.alpha()) * params.j_prime() / 8.0
}

/// Outcome of the numerical product-state minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableCheck {
    pub closed_form: f64,
    /// Best classical energy `sum_b g_b n_i . n_j / 4` over unit vectors.
    pub optimized: f64,
    /// `<psi|H|psi>` of the optimal product state, evaluated in the full
    /// Hilbert space.
    pub state_energy: f64,
    /// Unit Bloch vector of each site at the optimum.
    pub bloch: Vec<[f64; 3]>,
}

impl SeparableCheck {
    pub fn discrepancy(&self) -> f64 {
        (self.optimized - self.closed_form)
            .abs()
            .max((self.state_energy - self.optimized).abs())
    }

    pub fn agrees(&self, tol: f64) -> bool {
        self.discrepancy() <= tol
    }
}

/// Minimizes `<H>` over product states by alternating local-field updates,
/// starting from the Neel pattern along x and from seeded random
/// configurations. Limited to `L <= 10` because the optimum is re-evaluated
/// as a `2^L` state vector.
pub fn separable_energy_checked(params: &ChainParams) -> Result<SeparableCheck> {
    const RESTARTS: usize = 16;
    if params.sites() > 10 {
        return Err(Error::param(
            "L",
            format!("product-state check is limited to L <= 10, got {}", params.sites()),
        ));
    }
    let sites = params.sites();
    let neel: Vec<[f64; 3]> = (0..sites)
        .map(|i| if i % 2 == 0 { [1.0, 0.0, 0.0] } else { [-1.0, 0.0, 0.0] })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut best = relax(params, neel);
    for _ in 0..RESTARTS {
        let start = (0..sites).map(|_| random_unit(&mut rng)).collect();
        let candidate = relax(params, start);
        if candidate.1 < best.1 {
            best = candidate;
        }
    }
    let (bloch, optimized) = best;
    Ok(SeparableCheck {
        closed_form: separable_energy(params),
        optimized,
        state_energy: product_state_energy(params, &bloch),
        bloch,
    })
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn classical_energy(params: &ChainParams, n: &[[f64; 3]]) -> f64 {
    params
        .bonds()
        .iter()
        .map(|b| 0.25 * b.strength * dot(&n[b.i], &n[b.j]))
        .sum()
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Each site aligns against its local exchange field; the energy never
/// increases, so the sweep stops once it stalls.
fn relax(params: &ChainParams, mut n: Vec<[f64; 3]>) -> (Vec<[f64; 3]>, f64) {
    let bonds = params.bonds();
    let mut energy = classical_energy(params, &n);
    for _ in 0..10_000 {
        for site in 0..n.len() {
            let mut field = [0.0; 3];
            for b in &bonds {
                let other = if b.i == site {
                    b.j
                } else if b.j == site {
                    b.i
                } else {
                    continue;
                };
                for (f, x) in field.iter_mut().zip(n[other]) {
                    *f += b.strength * x;
                }
            }
            let norm = dot(&field, &field).sqrt();
            if norm > 1e-300 {
                n[site] = [-field[0] / norm, -field[1] / norm, -field[2] / norm];
            }
        }
        let next = classical_energy(params, &n);
        let done = energy - next <= 1e-15;
        energy = next;
        if done {
            break;
        }
    }
    (n, energy)
}

/// `<psi|H|psi>` for the spin-coherent product state with the given Bloch
/// vectors.
fn product_state_energy(params: &ChainParams, bloch: &[[f64; 3]]) -> f64 {
    let sites = params.sites();
    // |n> = cos(theta/2) |1> + e^{i phi} sin(theta/2) |0>
    let factors: Vec<(C64, C64)> = bloch
        .iter()
        .map(|n| {
            let theta = n[2].clamp(-1.0, 1.0).acos();
            let phi = n[1].atan2(n[0]);
            (
                C64::new((theta / 2.0).cos(), 0.0),
                C64::from_polar((theta / 2.0).sin(), phi),
            )
        })
        .collect();
    let dim = 1usize << sites;
    let psi = DVector::from_fn(dim, |mask, _| {
        factors
            .iter()
            .enumerate()
            .fold(C64::new(1.0, 0.0), |acc, (i, (up, down))| {
                acc * if (mask >> i) & 1 == 1 { *up } else { *down }
            })
    });
    let h = full_hamiltonian(params);
    let re = psi.map(|c| c.re);
    let im = psi.map(|c| c.im);
    let expect = |v: &DVector<f64>| v.dot(&(&h * v));
    (expect(&re) + expect(&im)) / psi.norm_squared()
}

/// Per-site entanglement gap and its upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapResult {
    pub ground_energy: f64,
    pub separable_energy: f64,
    /// `(E_sep - E0) / L`.
    pub gap: f64,
    /// `(1 + alpha) J' / 4`.
    pub bound: f64,
}

impl GapResult {
    pub fn within_bound(&self, tol: f64) -> bool {
        self.gap <= self.bound + tol
    }
}

pub fn gap_from_ground_energy(params: &ChainParams, ground_energy: f64) -> GapResult {
    let e_sep = separable_energy(params);
    GapResult {
        ground_energy,
        separable_energy: e_sep,
        gap: (e_sep - ground_energy) / params.sites() as f64,
        bound: (1.0 + params.alpha()) * params.j_prime() / 4.0,
    }
}

pub fn entanglement_gap(spectrum: &Spectrum) -> GapResult {
    gap_from_ground_energy(spectrum.params(), spectrum.ground_energy())
}

/// Thermal energy witness `W = E - E_sep`, plus the single-correlation
/// reconstruction `L (1 + alpha) J' (1 + K_intra) / 8`, which coincides with
/// `W` only when intra- and inter-dimer correlations are equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessResult {
    pub temperature: f64,
    pub energy: f64,
    pub separable_energy: f64,
    pub value: f64,
    pub k_intra: f64,
    pub k_inter: f64,
    pub from_intra_correlation: f64,
}

impl WitnessResult {
    pub fn entangled(&self) -> bool {
        self.value < 0.0
    }

    pub fn single_correlation_mismatch(&self) -> f64 {
        self.from_intra_correlation - self.value
    }
}

pub fn witness(spectrum: &Spectrum, temperature: f64) -> Result<WitnessResult> {
    let params = spectrum.params();
    let state = ThermalState::new(spectrum, temperature)?;
    let (a, b) = params.intra_pair();
    let (c, d) = params.inter_pair();
    let k_intra = state.average(&pair_expectations(spectrum, a, b)?);
    let k_inter = state.average(&pair_expectations(spectrum, c, d)?);
    let energy = thermal_energy(spectrum, temperature)?;
    Ok(witness_from_parts(params, temperature, energy, k_intra, k_inter))
}

pub fn witness_from_parts(
    params: &ChainParams,
    temperature: f64,
    energy: f64,
    k_intra: f64,
    k_inter: f64,
) -> WitnessResult {
    let e_sep = separable_energy(params);
    WitnessResult {
        temperature,
        energy,
        separable_energy: e_sep,
        value: energy - e_sep,
        k_intra,
        k_inter,
        from_intra_correlation: -e_sep * (1.0 + k_intra),
    }
}

/// `sigma^y (x) sigma^y` in the ordering `{|11>, |10>, |01>, |00>}`.
fn spin_flip() -> Matrix4<C64> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    Matrix4::new(
        zero, zero, zero, -one, //
        zero, zero, one, zero, //
        zero, one, zero, zero, //
        -one, zero, zero, zero,
    )
}

fn check_state(rho: &Matrix4<C64>) -> Result<SymmetricEigen<C64, nalgebra::U4>> {
    let herm = (rho - rho.adjoint()).camax();
    if herm > STATE_TOL {
        return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::InvalidState(format!("trace {tr} != 1")));
    }
    let eig = SymmetricEigen::new(*rho);
    let min = eig.eigenvalues.min();
    if min < -STATE_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
    }
    Ok(eig)
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`, where `l_i` are the
/// decreasing square roots of the eigenvalues of
/// `rho (sy (x) sy) rho^* (sy (x) sy)`. They are obtained as the eigenvalues
/// of the Hermitian `sqrt(sqrt(rho) rho~ sqrt(rho))`.
pub fn concurrence_wootters(rho: &Matrix4<C64>) -> Result<f64> {
    let eig = check_state(rho)?;
    let sqrt_vals = eig.eigenvalues.map(|x| C64::new(x.max(0.0).sqrt(), 0.0));
    let sqrt_rho =
        eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();
    let flip = spin_flip();
    let tilde = flip * rho.conjugate() * flip;
    let m = sqrt_rho * tilde * sqrt_rho;
    let m = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut lambdas: Vec<f64> = SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(c.clamp(0.0, 1.0))
}

pub fn concurrence_wootters_real(rho: &Matrix4<f64>) -> Result<f64> {
    concurrence_wootters(&rho.map(|x| C64::new(x, 0.0)))
}

/// Concurrence of the isotropic two-spin state, `max(0, -K - 1) / 2`.
pub fn concurrence_from_correlation(k: f64) -> Result<f64> {
    if !(-3.0..=1.0).contains(&k) {
        return Err(Error::Positivity(k));
    }
    Ok(0.5 * (-k - 1.0).max(0.0))
}

/// Lower bound on the intra-dimer concurrence implied by the witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub concurrence: f64,
    /// `max(0, -4 W / ((1 + alpha) L J'))`.
    pub bound: f64,
}

impl BoundCheck {
    pub fn slack(&self) -> f64 {
        self.concurrence - self.bound
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slack() >= -tol
    }
}

pub fn witness_concurrence_bound(params: &ChainParams, witness: f64, concurrence: f64) -> BoundCheck {
    let scale = (1.0 + params.alpha()) * params.sites() as f64 * params.j_prime();
    BoundCheck {
        concurrence,
        bound: (-4.0 * witness / scale).max(0.0),
    }
}
