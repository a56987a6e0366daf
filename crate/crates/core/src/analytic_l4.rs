//! Closed-form solution of the four-site ring (two dimers).
//!
//! With `s = sqrt(alpha^2 - alpha + 1)` the distinct energies are
//!
//! ```text
//! eps1 =  (1 + alpha)/2      x5
//! eps2 = -(1 + alpha)/2      x3
//! eps3 =  (1 - alpha)/2      x3
//! eps4 = -(1 - alpha)/2      x3
//! eps5 = -(1 + alpha)/2 + s  x1
//! eps6 = -(1 + alpha)/2 - s  x1   (ground state for alpha > 0)
//! ```
//!
//! and the two total-spin singlets are
//! `x (|1100> + |0011>) + y (|1010> + |0101>) + |1001> + |0110>` with
//! `x_pm = -[(1 - alpha) pm s]`, `y_pm = -alpha pm s`; the `x_-`, `y_-`
//! singlet has energy `eps6`. Everything is in units of `J' = 1`.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Multiplicities of `eps1..eps6`.
pub const MULTIPLICITIES: [usize; 6] = [5, 3, 3, 3, 1, 1];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L4Spectrum {
    pub alpha: f64,
    /// `eps1..eps6`.
    pub eps: [f64; 6],
    pub x_plus: f64,
    pub x_minus: f64,
    pub y_plus: f64,
    pub y_minus: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("must lie in [0, 1], got {alpha}")))
    }
}

pub fn l4_spectrum(alpha: f64) -> Result<L4Spectrum> {
    check_alpha(alpha)?;
    let s = (alpha * alpha - alpha + 1.0).sqrt();
    let a = (1.0 + alpha) / 2.0;
    let b = (1.0 - alpha) / 2.0;
    Ok(L4Spectrum {
        alpha,
        eps: [a, -a, b, -b, -a + s, -a - s],
        x_plus: -((1.0 - alpha) + s),
        x_minus: -((1.0 - alpha) - s),
        y_plus: -alpha + s,
        y_minus: -alpha - s,
    })
}

impl L4Spectrum {
    /// `(energy, multiplicity)` for the six levels.
    pub fn levels(&self) -> [(f64, usize); 6] {
        std::array::from_fn(|k| (self.eps[k], MULTIPLICITIES[k]))
    }

    /// All sixteen eigenvalues with multiplicity, ascending.
    pub fn all_energies(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .levels()
            .iter()
            .flat_map(|&(e, m)| std::iter::repeat_n(e, m))
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }

    pub fn ground_energy(&self) -> f64 {
        self.eps[5]
    }

    /// Normalized singlet with coefficients `(x, y)`, in the full 16-dim
    /// space. Ket position `k` (left to right) is bit `k`.
    fn singlet(x: f64, y: f64) -> DVector<f64> {
        let norm = (2.0 * (1.0 + x * x + y * y)).sqrt();
        let mut v = DVector::zeros(16);
        v[0b0011] = x; // |1100>
        v[0b1100] = x; // |0011>
        v[0b0101] = y; // |1010>
        v[0b1010] = y; // |0101>
        v[0b1001] = 1.0; // |1001>
        v[0b0110] = 1.0; // |0110>
        v / norm
    }

    /// Ground singlet, energy `eps6`.
    pub fn ground_vector(&self) -> DVector<f64> {
        Self::singlet(self.x_minus, self.y_minus)
    }

    /// Excited singlet, energy `eps5`.
    pub fn excited_singlet_vector(&self) -> DVector<f64> {
        Self::singlet(self.x_plus, self.y_plus)
    }
}

/// How the two singlet weights are attached to `eps5` / `eps6` in the
/// thermal intra-dimer correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightPairing {
    /// `x_-` weight on `eps5`, `x_+` weight on `eps6`.
    AsPrinted,
    /// `x_-` weight on `eps6`, matching the singlet each coefficient
    /// belongs to.
    Swapped,
}

/// The pairing that agrees with exact diagonalization; confirmed by the
/// `validate-l4` report and the cross-check tests.
pub const RESOLVED_PAIRING: WeightPairing = WeightPairing::Swapped;

/// Thermal intra-dimer correlation `K = <sigma_1 . sigma_2>` of the
/// four-site ring at `T > 0`.
pub fn l4_thermal_correlation(alpha: f64, temperature: f64) -> Result<f64> {
    l4_thermal_correlation_with(alpha, temperature, RESOLVED_PAIRING)
}

pub fn l4_thermal_correlation_with(alpha: f64, temperature: f64, pairing: WeightPairing) -> Result<f64> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::param("T", format!("must be positive and finite, got {temperature}")));
    }
    let sp = l4_spectrum(alpha)?;
    let beta = 1.0 / temperature;
    let e0 = sp.ground_energy();
    let boltz = |e: f64| (-(e - e0) * beta).exp();
    let z: f64 = sp.levels().iter().map(|&(e, m)| m as f64 * boltz(e)).sum();
    let singlet_weight = |x: f64, y: f64| 6.0 * x * x / (1.0 + x * x + y * y);
    let w_minus = singlet_weight(sp.x_minus, sp.y_minus);
    let w_plus = singlet_weight(sp.x_plus, sp.y_plus);
    let (on_eps5, on_eps6) = match pairing {
        WeightPairing::AsPrinted => (w_minus, w_plus),
        WeightPairing::Swapped => (w_plus, w_minus),
    };
    let [e1, e2, e3, e4, e5, e6] = sp.eps;
    let sum = 20.0 * boltz(e1)
        + 6.0 * boltz(e2)
        + 12.0 * boltz(e3)
        + 6.0 * boltz(e4)
        + on_eps5 * boltz(e5)
        + on_eps6 * boltz(e6);
    Ok(-3.0 + sum / z)
}

/// Ground-state inter-dimer correlation `K_{2,3} = -3 (1 - 2/(1 + x_-^2 + y_-^2))`.
pub fn l4_ground_inter_dimer_correlation(alpha: f64) -> Result<f64> {
    let sp = l4_spectrum(alpha)?;
    let n = 1.0 + sp.x_minus * sp.x_minus + sp.y_minus * sp.y_minus;
    Ok(-3.0 * (1.0 - 2.0 / n))
}

/// Thermal energy `sum_i E_i e^{-beta E_i} / Z` from the closed-form levels.
pub fn l4_thermal_energy(alpha: f64, temperature: f64) -> Result<f64> {
    let sp = l4_spectrum(alpha)?;
    if temperature == 0.0 {
        return Ok(sp.ground_energy());
    }
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::param("T", format!("must be non-negative and finite, got {temperature}")));
    }
    let e0 = sp.ground_energy();
    let (mut num, mut z) = (0.0, 0.0);
    for (e, m) in sp.levels() {
        let w = m as f64 * (-(e - e0) / temperature).exp();
        num += e * w;
        z += w;
    }
    Ok(num / z)
}
