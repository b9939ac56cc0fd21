//! Closed-form qubit analytics and sphere-averaged product bounds.
//!
//! A qubit state is ρ = (I + r n·σ)/2 and a spin observable A = a·σ with
//! |a| = 1; θ is the angle between a and n. Averages are over independent
//! uniform a, b ∈ S² with the Bloch vector fixed along ẑ, which loses
//! nothing by rotational invariance.

use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{quantum_term_limit, single_bound_report, BoundError};
use crate::linalg::ComplexMatrix;
use crate::products::product_report;
use crate::states::{
    from_bloch, random_unit_vector3, stream_rng, BlochState, DensityMatrix, Observable,
};

/// Samples per Monte Carlo batch; batch k draws from substream k.
pub const MC_BATCH: usize = 4096;
/// Acceptance band for Monte Carlo estimates, in standard errors.
pub const MC_SIGMA_BAND: f64 = 5.0;
/// Absolute floor added to the band so that zero-variance columns compare
/// cleanly in floating point.
pub const MC_ABS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QubitError {
    #[error("DomainError: {0}")]
    Domain(String),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

fn check_r(r: f64) -> Result<(), QubitError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(QubitError::Domain(format!(
            "Bloch length r = {r} outside [0, 1]"
        )));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<(), QubitError> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(QubitError::Domain(format!(
            "angle θ = {theta} outside [0, π]"
        )));
    }
    Ok(())
}

fn check_purity(p: f64) -> Result<(), QubitError> {
    if !(0.5..=1.0).contains(&p) {
        return Err(QubitError::Domain(format!(
            "purity P = {p} outside [1/2, 1]"
        )));
    }
    Ok(())
}

/// Bloch length r = √(2P − 1) of a qubit state with purity P.
pub fn bloch_length(purity: f64) -> f64 {
    (2.0 * purity - 1.0).max(0.0).sqrt()
}

/// 1 − r² cos²θ.
pub fn qubit_variance(r: f64, theta: f64) -> Result<f64, QubitError> {
    check_r(r)?;
    check_theta(theta)?;
    Ok(1.0 - r * r * theta.cos().powi(2))
}

/// (1 − r²) cos²θ. Valid for r > 0; at r = 0 the pinching is trivial and
/// the classical variance is the full variance 1 instead.
pub fn qubit_classical_variance(r: f64, theta: f64) -> Result<f64, QubitError> {
    check_r(r)?;
    check_theta(theta)?;
    Ok((1.0 - r * r) * theta.cos().powi(2))
}

/// The optimized noncommutative term, sin²θ for any s (0 when r = 0).
pub fn qubit_quantum_term(r: f64, theta: f64) -> Result<f64, QubitError> {
    check_r(r)?;
    check_theta(theta)?;
    Ok(if r == 0.0 { 0.0 } else { theta.sin().powi(2) })
}

/// V − (V^cl + quantum term) from the closed forms.
pub fn qubit_identity_check(r: f64, theta: f64, s: f64) -> Result<f64, QubitError> {
    if !(s.is_finite() && s >= 0.5) {
        return Err(QubitError::Bound(BoundError::InvalidS(s)));
    }
    let v = qubit_variance(r, theta)?;
    let classical = if r == 0.0 {
        v
    } else {
        qubit_classical_variance(r, theta)?
    };
    Ok(v - classical - qubit_quantum_term(r, theta)?)
}

/// ρ with Bloch vector r ẑ and A = (sin θ, 0, cos θ)·σ.
pub fn bloch_instance(r: f64, theta: f64) -> Result<(DensityMatrix, Observable), QubitError> {
    check_r(r)?;
    check_theta(theta)?;
    let rho = from_bloch(BlochState::along_z(r).map_err(|e| QubitError::Domain(e.to_string()))?);
    Ok((rho, Observable::spin([theta.sin(), 0.0, theta.cos()])))
}

/// Sharp-bound slack of the general matrix path on the qubit instance (r, θ).
pub fn qubit_identity_matrix_slack(r: f64, theta: f64, s: f64) -> Result<f64, QubitError> {
    let (rho, a) = bloch_instance(r, theta)?;
    Ok(single_bound_report(&rho, &a, s)?.slack)
}

/// Sphere averages of the five product bounds and of the variance product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedBounds {
    pub purity: f64,
    pub avg_robertson: f64,
    pub avg_schrodinger: f64,
    pub avg_luo: f64,
    pub avg_optimal: f64,
    pub avg_sharp: f64,
    pub avg_variance_product: f64,
}

impl AveragedBounds {
    pub const COLUMNS: [&'static str; 6] = [
        "avg_robertson",
        "avg_schrodinger",
        "avg_luo",
        "avg_optimal",
        "avg_sharp",
        "avg_variance_product",
    ];

    pub fn values(&self) -> [f64; 6] {
        [
            self.avg_robertson,
            self.avg_schrodinger,
            self.avg_luo,
            self.avg_optimal,
            self.avg_sharp,
            self.avg_variance_product,
        ]
    }

    fn from_values(purity: f64, v: [f64; 6]) -> Self {
        Self {
            purity,
            avg_robertson: v[0],
            avg_schrodinger: v[1],
            avg_luo: v[2],
            avg_optimal: v[3],
            avg_sharp: v[4],
            avg_variance_product: v[5],
        }
    }
}

/// Closed-form averages as functions of the purity P ∈ [1/2, 1].
pub fn averaged_bounds_analytic(purity: f64) -> Result<AveragedBounds, QubitError> {
    check_purity(purity)?;
    let p = purity;
    let sharp = 4.0 * (2.0 - p).powi(2) / 9.0;
    Ok(AveragedBounds {
        purity,
        avg_robertson: 2.0 / 9.0 * (2.0 * p - 1.0),
        avg_schrodinger: 4.0 / 9.0 * (p * p - p + 1.0),
        avg_luo: 4.0 / 9.0 * (1.0 - (2.0 * (1.0 - p)).sqrt()).powi(2),
        avg_optimal: 4.0 / 9.0,
        avg_sharp: sharp,
        avg_variance_product: sharp,
    })
}

/// Monte Carlo estimates with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloBounds {
    pub n_samples: usize,
    pub estimate: AveragedBounds,
    pub std_err: [f64; 6],
}

impl MonteCarloBounds {
    /// Per column: |estimate − analytic| ≤ 5·SE + `MC_ABS_FLOOR`.
    pub fn agrees_with(&self, analytic: &AveragedBounds) -> [bool; 6] {
        let est = self.estimate.values();
        let exact = analytic.values();
        std::array::from_fn(|k| {
            (est[k] - exact[k]).abs() <= MC_SIGMA_BAND * self.std_err[k] + MC_ABS_FLOOR
        })
    }
}

/// The six per-sample quantities for spin observables along `a` and `b`.
///
/// Each product bound is evaluated on the 2×2 matrices. At the maximally
/// mixed point (P = 1/2) the optimal product uses its one-sided limit along
/// the Bloch axis, which is the value the purity curve takes there; the
/// zero convention would otherwise put a removable jump at the endpoint.
pub fn sample_bounds(
    rho: &DensityMatrix,
    axis: &Observable,
    a: [f64; 3],
    b: [f64; 3],
) -> Result<[f64; 6], QubitError> {
    let oa = Observable::spin(a);
    let ob = Observable::spin(b);
    let rep = product_report(rho, &oa, &ob, 1.0)?;
    let optimal = if crate::bounds::is_maximally_mixed(rho) {
        quantum_term_limit(axis, &oa)? * quantum_term_limit(axis, &ob)?
    } else {
        rep.optimal_product
    };
    Ok([
        rep.robertson,
        rep.schrodinger,
        rep.luo_product,
        optimal,
        rep.sharp_product,
        rep.variance_product,
    ])
}

/// Averages over `n_samples` independent uniform pairs (a, b).
///
/// Batches of `MC_BATCH` samples run in parallel, each on its own ChaCha
/// substream; batch sums are reduced in batch order, so the result is
/// bitwise identical for any number of worker threads.
pub fn averaged_bounds_monte_carlo(
    purity: f64,
    n_samples: usize,
    seed: u64,
) -> Result<MonteCarloBounds, QubitError> {
    check_purity(purity)?;
    if n_samples == 0 {
        return Err(QubitError::Domain("n_samples must be at least 1".into()));
    }
    let rho = from_bloch(
        BlochState::along_z(bloch_length(purity)).map_err(|e| QubitError::Domain(e.to_string()))?,
    );
    let axis = Observable::new(ComplexMatrix::pauli_z()).expect("σz is Hermitian");
    let n_batches = n_samples.div_ceil(MC_BATCH);

    let batches: Vec<[(f64, f64); 6]> = (0..n_batches)
        .into_par_iter()
        .map(|k| -> Result<[(f64, f64); 6], QubitError> {
            let mut rng = stream_rng(seed, k as u64);
            let len = MC_BATCH.min(n_samples - k * MC_BATCH);
            let mut acc = [(0.0, 0.0); 6];
            for _ in 0..len {
                let a = random_unit_vector3(&mut rng);
                let b = random_unit_vector3(&mut rng);
                let vals = sample_bounds(&rho, &axis, a, b)?;
                for (slot, v) in acc.iter_mut().zip(vals) {
                    slot.0 += v;
                    slot.1 += v * v;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_, _>>()?;

    let mut sums = [(0.0, 0.0); 6];
    for batch in &batches {
        for (total, part) in sums.iter_mut().zip(batch) {
            total.0 += part.0;
            total.1 += part.1;
        }
    }
    let n = n_samples as f64;
    let mut means = [0.0; 6];
    let mut std_err = [0.0; 6];
    for k in 0..6 {
        let mean = sums[k].0 / n;
        let var = if n_samples > 1 {
            ((sums[k].1 - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        means[k] = mean;
        std_err[k] = (var / n).sqrt();
    }
    Ok(MonteCarloBounds {
        n_samples,
        estimate: AveragedBounds::from_values(purity, means),
        std_err,
    })
}
