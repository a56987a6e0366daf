//! Bracketing bisection and golden-section minimization over fallible
//! objectives.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// Objective at `x`.
    pub value: f64,
    /// Final bracket.
    pub lo: f64,
    pub hi: f64,
    pub evaluations: usize,
}

/// Bisection on `[lo, hi]` where `f(lo)` and `f(hi)` differ in sign. Stops
/// once the bracket is narrower than `x_tol` and `|f(mid)| <= f_tol`, or
/// the bracket can no longer shrink in floating point.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, x_tol: f64, f_tol: f64, what: &'static str) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    let mut evaluations = 2;
    if f_lo == 0.0 {
        return Ok(Root { x: lo, value: 0.0, lo, hi, evaluations });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, value: 0.0, lo, hi, evaluations });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket { what, lo, hi });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        evaluations += 1;
        let stalled = mid <= lo || mid >= hi;
        if f_mid == 0.0 || stalled || (hi - lo <= x_tol && f_mid.abs() <= f_tol) {
            return Ok(Root { x: mid, value: f_mid, lo, hi, evaluations });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
}

/// Index `k` of the first grid interval `[k, k+1]` whose endpoint values
/// change sign, and the number of sign changes overall.
pub fn sign_changes(values: &[f64]) -> (Option<usize>, usize) {
    let mut first = None;
    let mut count = 0;
    for (k, w) in values.windows(2).enumerate() {
        if (w[0] < 0.0) != (w[1] < 0.0) {
            count += 1;
            first.get_or_insert(k);
        }
    }
    (first, count)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`,
/// refined until the bracket is narrower than `tol`.
pub fn golden_section_min<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evaluations = 2;
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        evaluations += 1;
    }
    let (x, value) = if fc < fd { (c, fc) } else { (d, fd) };
    Ok(Minimum { x, value, evaluations })
}
