//! End-to-end acceptance run. Every criterion prints exactly one
//! `PASS`/`FAIL` line; the target exits non-zero if any criterion fails.
//!
//! Run with `cargo test -p dimer-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::Matrix4;

use dimer_core::analytic_l4::{l4_ground_inter_dimer_correlation, l4_spectrum, l4_thermal_correlation, MULTIPLICITIES};
use dimer_core::config::Grid;
use dimer_core::eigen::{bond_operator, dense_oracle, diagonalize};
use dimer_core::entanglement::{
    concurrence_from_correlation, concurrence_wootters_real, separable_energy, separable_energy_checked,
    witness_concurrence_bound,
};
use dimer_core::hamiltonian::ChainParams;
use dimer_core::observables::{
    pair_expectations, rdm_by_partial_trace, rdm_from_correlation, zz_expectations, DensitySource, ThermalState,
};
use dimer_core::scans::{correlation_profile_for, critical_alpha, gap_curve, PointEvaluator, RowKind, PROFILE_ALPHAS};
use dimer_core::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit: Duration) -> (bool, String) {
    (elapsed < limit, format!("{:.2} s (limit {} s)", elapsed.as_secs_f64(), limit.as_secs()))
}

fn alpha_grid_101() -> Vec<f64> {
    Grid::new(0.0, 1.0, 101).unwrap().points()
}

/// `<sigma . sigma>` of a two-spin density matrix.
fn correlation_of_rdm(rho: &Matrix4<f64>) -> f64 {
    4.0 * (rho * bond_operator()).trace()
}

fn four_site_closed_form() -> Result<Outcome> {
    let start = Instant::now();
    let mut dev = 0.0f64;
    let mut mult_ok = true;
    let mut min_overlap = f64::INFINITY;
    for alpha in alpha_grid_101() {
        let spectrum = diagonalize(&ChainParams::unit(4, alpha)?)?;
        let analytic = l4_spectrum(alpha)?;
        let numeric = spectrum.all_energies();
        let closed = analytic.all_energies();
        mult_ok &= numeric.len() == 16 && closed.len() == 16;
        for (a, b) in numeric.iter().zip(&closed) {
            dev = dev.max((a - b).abs());
        }
        // Each closed-form level must appear with its own multiplicity
        // unless two levels happen to cross at this alpha.
        for ((e, m), expected) in analytic.levels().iter().zip(MULTIPLICITIES) {
            let coincident: usize = analytic
                .levels()
                .iter()
                .filter(|(f, _)| (f - e).abs() <= 1e-10)
                .map(|(_, m)| m)
                .sum();
            let found = numeric.iter().filter(|x| (*x - e).abs() <= 1e-10).count();
            mult_ok &= *m == expected && found == coincident;
        }
        let psi = analytic.ground_vector();
        if psi.iter().all(|x| x.is_finite()) {
            let overlap = spectrum
                .ground_state_vectors()
                .vectors
                .iter()
                .map(|(_, v)| v.dot(&psi).abs())
                .fold(0.0, f64::max);
            min_overlap = min_overlap.min(overlap);
        }
    }
    let (fast, timing) = within(start.elapsed(), Duration::from_secs(1));
    Ok(outcome(
        dev <= 1e-10 && mult_ok && min_overlap >= 1.0 - 1e-9 && fast,
        format!("max |dE| = {dev:.2e}, multiplicities ok = {mult_ok}, min overlap = {min_overlap:.12}, {timing}"),
    ))
}

struct GapSweep {
    passed: bool,
    detail: String,
    l12_minimum: Option<(f64, f64)>,
}

fn gap_bound_sweep() -> Result<GapSweep> {
    let alphas = alpha_grid_101();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_zero = 0.0f64;
    let mut l12 = None;
    let mut l12_time = Duration::ZERO;
    for sites in [4, 6, 8, 10, 12] {
        let start = Instant::now();
        let rows = gap_curve(sites, 1.0, &alphas, 1e-4)?;
        if sites == 12 {
            l12_time = start.elapsed();
        }
        for r in &rows {
            worst_excess = worst_excess.max(r.gap.gap - r.gap.bound);
            if r.kind == RowKind::Grid && r.alpha == 0.0 {
                worst_zero = worst_zero.max((r.gap.gap - r.gap.bound).abs());
            }
            if sites == 12 && r.kind == RowKind::Minimum {
                l12 = Some((r.alpha, r.gap.gap));
            }
        }
    }
    let (fast, timing) = within(l12_time, Duration::from_secs(120));
    Ok(GapSweep {
        passed: worst_excess <= 1e-12 && worst_zero <= 1e-10 && fast,
        detail: format!(
            "max (g_E - bound) = {worst_excess:.2e}, |g_E - bound| at alpha=0 = {worst_zero:.2e}, L=12 sweep {timing}"
        ),
        l12_minimum: l12,
    })
}

fn gap_minimum_location(minimum: Option<(f64, f64)>) -> Outcome {
    match minimum {
        Some((alpha, gap)) => outcome(
            (0.6..=0.8).contains(&alpha),
            format!("L=12 minimum g_E = {gap:.9} at alpha = {alpha:.5} (refined to 1e-4)"),
        ),
        None => outcome(false, "no minimum located"),
    }
}

fn critical_alternation() -> Result<Outcome> {
    let mut found = Vec::new();
    for sites in [4, 6, 8, 10, 12] {
        found.push((sites, critical_alpha(sites, 1.0, 1e-8)?.alpha_c()));
    }
    let values: Option<Vec<f64>> = found.iter().map(|(_, a)| *a).collect();
    let listing = found
        .iter()
        .map(|(l, a)| match a {
            Some(a) => format!("L={l}: {a:.6}"),
            None => format!("L={l}: absent"),
        })
        .collect::<Vec<_>>()
        .join(", ");
    let Some(values) = values else {
        return Ok(outcome(false, listing));
    };
    let monotone = values.windows(2).all(|w| w[0] <= w[1]);
    let ok4 = (values[0] - 0.5).abs() <= 1e-6;
    let ok12 = (values[4] - 0.78).abs() <= 0.03;
    Ok(outcome(ok4 && ok12 && monotone, format!("{listing}; nondecreasing = {monotone}")))
}

fn limit_correlations() -> Result<Outcome> {
    let mut dev = 0.0f64;
    let mut parts = Vec::new();
    for (alpha, expected) in [(0.0, 0.0), (1.0, -2.0)] {
        let params = ChainParams::unit(4, alpha)?;
        let spectrum = diagonalize(&params)?;
        let state = ThermalState::new(&spectrum, 0.0)?;
        let (i, j) = params.inter_pair();
        let rho = rdm_by_partial_trace(
            DensitySource::Thermal {
                spectrum: &spectrum,
                state: &state,
            },
            i,
            j,
        )?;
        let numeric = correlation_of_rdm(&rho);
        let closed = l4_ground_inter_dimer_correlation(alpha)?;
        dev = dev.max((numeric - expected).abs()).max((closed - expected).abs());
        parts.push(format!("alpha={alpha}: trace {numeric:.12}, closed {closed:.12}"));
    }
    Ok(outcome(dev <= 1e-10, format!("{}; max dev = {dev:.2e}", parts.join("; "))))
}

fn thermal_intra_correlation() -> Result<Outcome> {
    let temps = Grid::new(0.05, 3.0, 20)?.points();
    let mut dev = 0.0f64;
    for alpha in Grid::new(0.0, 1.0, 20)?.points() {
        let params = ChainParams::unit(4, alpha)?;
        let spectrum = diagonalize(&params)?;
        let (a, b) = params.intra_pair();
        let per_level = pair_expectations(&spectrum, a, b)?;
        for &t in &temps {
            let numeric = ThermalState::new(&spectrum, t)?.average(&per_level);
            dev = dev.max((numeric - l4_thermal_correlation(alpha, t)?).abs());
        }
    }
    Ok(outcome(dev <= 1e-9, format!("20x20 (alpha, T) grid, max |dK| = {dev:.2e}")))
}

fn witness_concurrence_inequality() -> Result<Outcome> {
    let mut temps = vec![0.0];
    temps.extend(Grid::new(0.01, 3.0, 30)?.points());
    let mut worst_violation = 0.0f64;
    let mut worst_endpoint = 0.0f64;
    let mut points = 0usize;
    for sites in [4, 6, 8, 10] {
        for alpha in Grid::new(0.0, 1.0, 21)?.points() {
            let params = ChainParams::unit(sites, alpha)?;
            let eval = PointEvaluator::new(&params)?;
            for &t in &temps {
                let rec = eval.record(t)?;
                let check = witness_concurrence_bound(&params, rec.witness, rec.c_intra);
                worst_violation = worst_violation.max(-check.slack());
                if alpha == 0.0 || alpha == 1.0 {
                    worst_endpoint = worst_endpoint.max(check.slack().abs());
                }
                points += 1;
            }
        }
    }
    Ok(outcome(
        worst_violation <= 1e-12 && worst_endpoint <= 1e-9,
        format!(
            "{points} points, max violation = {:.2e}, max |C - bound| at alpha in {{0,1}} = {worst_endpoint:.2e}",
            worst_violation.max(0.0)
        ),
    ))
}

fn distant_pairs_separable() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst = f64::NEG_INFINITY;
    let mut max_c = 0.0f64;
    let mut nn_below = true;
    for alpha in PROFILE_ALPHAS {
        let rows = correlation_profile_for(&ChainParams::unit(12, alpha)?)?;
        for r in &rows {
            if r.distance() > 2 {
                worst = worst.max(-1.0 - r.correlation);
                max_c = max_c.max(r.concurrence);
            }
        }
        if alpha == 1.0 {
            nn_below &= rows.iter().any(|r| r.site == 1 && r.correlation < -1.0);
        }
    }
    let (fast, timing) = within(start.elapsed(), Duration::from_secs(60));
    Ok(outcome(
        worst < 0.0 && max_c == 0.0 && nn_below && fast,
        format!("max (-1 - K) beyond distance 2 = {worst:.4}, max C there = {max_c}, {timing}"),
    ))
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut dev = 0.0f64;
    for sites in [2, 4, 6, 8] {
        for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let params = ChainParams::unit(sites, alpha)?;
            let blocked = diagonalize(&params)?.all_energies();
            let dense = dense_oracle(&params)?;
            if blocked.len() != dense.len() {
                return Ok(outcome(false, format!("L={sites}: {} vs {} levels", blocked.len(), dense.len())));
            }
            for (a, b) in blocked.iter().zip(&dense) {
                dev = dev.max((a - b).abs());
            }
        }
    }
    Ok(outcome(dev <= 1e-9, format!("20 (L, alpha) cases, max |dE| = {dev:.2e}")))
}

fn property_suites() -> Result<Outcome> {
    // Positivity window and Wootters agreement across K in [-3, 1].
    let mut window_ok = true;
    let mut wootters_dev = 0.0f64;
    for k in Grid::new(-3.0, 1.0, 4001)?.points() {
        let rdm = rdm_from_correlation(k)?;
        let min_eig = rdm.matrix().symmetric_eigenvalues().min();
        window_ok &= min_eig >= -1e-14;
        let c = concurrence_wootters_real(&rdm.matrix())?;
        wootters_dev = wootters_dev.max((c - concurrence_from_correlation(k)?).abs());
    }
    for k in [-3.0 - 1e-6, 1.0 + 1e-6, -4.0, 2.0] {
        window_ok &= rdm_from_correlation(k).is_err();
    }

    // Isotropy of thermal states.
    let mut iso_dev = 0.0f64;
    for (sites, alpha) in [(4, 0.3), (6, 0.7), (8, 1.0), (8, 0.0)] {
        let spectrum = diagonalize(&ChainParams::unit(sites, alpha)?)?;
        for j in 1..sites {
            let full = pair_expectations(&spectrum, 0, j)?;
            let zz = zz_expectations(&spectrum, 0, j)?;
            for t in [0.0, 0.2, 1.0, 5.0] {
                let state = ThermalState::new(&spectrum, t)?;
                iso_dev = iso_dev.max((3.0 * state.average(&zz) - state.average(&full)).abs());
            }
        }
    }

    // Product-state optimizer against the closed-form separable energy.
    let mut sep_dev = 0.0f64;
    for sites in [2, 4, 6] {
        for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let params = ChainParams::unit(sites, alpha)?;
            let check = separable_energy_checked(&params)?;
            let expected = -(sites as f64) * (1.0 + alpha) / 8.0;
            sep_dev = sep_dev
                .max((separable_energy(&params) - expected).abs())
                .max((check.optimized - expected).abs())
                .max((check.state_energy - expected).abs());
        }
    }
    Ok(outcome(
        window_ok && wootters_dev <= 1e-10 && iso_dev <= 1e-10 && sep_dev <= 1e-6,
        format!(
            "window ok = {window_ok}, Wootters max dev = {wootters_dev:.2e}, isotropy max dev = {iso_dev:.2e}, product-state max dev = {sep_dev:.2e}"
        ),
    ))
}

fn report(results: &mut Vec<bool>, index: usize, name: &str, result: Result<Outcome>) {
    let (passed, detail) = match result {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    println!("[{}] {index:>2}. {name}: {detail}", if passed { "PASS" } else { "FAIL" });
    results.push(passed);
}

fn main() -> ExitCode {
    let mut results = Vec::new();
    report(&mut results, 1, "four-site closed form", four_site_closed_form());
    let sweep = gap_bound_sweep();
    let minimum = sweep.as_ref().ok().and_then(|s| s.l12_minimum);
    report(
        &mut results,
        2,
        "gap bound",
        sweep.map(|s| outcome(s.passed, s.detail)),
    );
    report(&mut results, 3, "gap minimum location", Ok(gap_minimum_location(minimum)));
    report(&mut results, 4, "critical alternation", critical_alternation());
    report(&mut results, 5, "limit inter-dimer correlations", limit_correlations());
    report(&mut results, 6, "thermal intra-dimer correlation", thermal_intra_correlation());
    report(&mut results, 7, "witness-concurrence inequality", witness_concurrence_inequality());
    report(&mut results, 8, "no entanglement beyond distance 2", distant_pairs_separable());
    report(&mut results, 9, "sector vs dense oracle", oracle_equivalence());
    report(&mut results, 10, "property suites", property_suites());
    let failed = results.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
