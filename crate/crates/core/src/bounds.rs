//! Single-observable variance bounds.
//!
//! For a state ρ with extreme eigenvalues λ_min < λ_max and any s ≥ 1/2,
//!
//! ```text
//! V_ρ(A) ≥ V^cl_ρ(A) + c_s(ρ) ‖[A, ρ^s]‖²,   c_s(ρ) = (λ_max + λ_min) / (2 (λ_max^s − λ_min^s)²)
//! ```
//!
//! where V^cl_ρ(A) is the variance of the pinched observable Σ_μ P_μ A P_μ.
//! For the maximally mixed state the commutator term is zero and the
//! inequality is saturated by the classical part alone.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    commutator, default_cluster_tol, herm_eig, hs_norm_sq, matrix_power, power_difference,
    ComplexMatrix, LinalgError,
};
use crate::states::{DensityMatrix, Observable, StateError};

/// Slack below which a bound counts as violated.
pub const SLACK_TOL: f64 = 1e-9;
/// Relative gap λ_max − λ_min under which ρ is treated as maximally mixed.
pub const MIXED_TOL: f64 = 1e-10;
/// Negative variances down to this size are rounding and are clamped to 0.
pub const VARIANCE_ROUNDING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("dimension mismatch: state has dimension {state}, observable {observable}")]
    DimensionMismatch { state: usize, observable: usize },
    #[error("InvalidS: s = {0} must be a finite value ≥ 1/2")]
    InvalidS(f64),
    #[error("MaximallyMixedState: the commutator term is identically zero and no witness exists")]
    MaximallyMixedState,
    #[error("ScalarObservable: the observable has a single eigenvalue cluster, so its minimal gap is undefined")]
    ScalarObservable,
    #[error("NonPositiveInput: lemma arguments must be positive (got x = {x}, y = {y})")]
    NonPositiveInput { x: f64, y: f64 },
    #[error("invalid interval [{m}, {big_m}]: need 0 < m < M with a non-degenerate width")]
    InvalidInterval { m: f64, big_m: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// The optimal coefficient, or the marker for the maximally mixed case in
/// which the commutator term is defined to be zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficient {
    Finite(f64),
    MaximallyMixed,
}

impl Coefficient {
    pub fn value(self) -> Option<f64> {
        match self {
            Coefficient::Finite(c) => Some(c),
            Coefficient::MaximallyMixed => None,
        }
    }

    /// c · x, with the zero convention for the maximally mixed state.
    pub fn times(self, x: f64) -> f64 {
        match self {
            Coefficient::Finite(c) => c * x,
            Coefficient::MaximallyMixed => 0.0,
        }
    }
}

/// One evaluation of the bound family for a fixed (ρ, A, s).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub s: f64,
    pub variance: f64,
    pub classical_variance: f64,
    /// ‖[A, ρ^s]‖².
    pub comm_norm_sq: f64,
    pub coefficient: Coefficient,
    /// ½‖[A, ρ^s]‖²; only Luo's bound when `luo_valid`.
    pub luo_bound: f64,
    pub luo_valid: bool,
    /// c_s^opt ‖[A, ρ^s]‖².
    pub optimal_bound: f64,
    /// V^cl + c_s^opt ‖[A, ρ^s]‖².
    pub sharp_bound: f64,
    /// variance − sharp_bound.
    pub slack: f64,
}

/// Coherence of ρ with respect to the eigenspaces of A and the bound it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    pub delta_a: f64,
    pub coherence: f64,
    pub decoherence_bound: f64,
    pub s1_bound: f64,
    pub variance: f64,
}

fn check_dims(rho: &DensityMatrix, a: &Observable) -> Result<(), BoundError> {
    if rho.dim() != a.dim() {
        return Err(BoundError::DimensionMismatch {
            state: rho.dim(),
            observable: a.dim(),
        });
    }
    Ok(())
}

fn check_s(s: f64) -> Result<(), BoundError> {
    if !(s.is_finite() && s >= 0.5) {
        return Err(BoundError::InvalidS(s));
    }
    Ok(())
}

/// ⟨A⟩_ρ = Tr(ρA).
pub fn expectation(rho: &DensityMatrix, a: &Observable) -> Result<f64, BoundError> {
    check_dims(rho, a)?;
    Ok(rho.matrix().trace_product(a.matrix()).re)
}

/// Tr(ρA²) − (Tr ρA)².
pub fn variance(rho: &DensityMatrix, a: &Observable) -> Result<f64, BoundError> {
    check_dims(rho, a)?;
    let a2 = a.matrix() * a.matrix();
    let mean = rho.matrix().trace_product(a.matrix()).re;
    let v = rho.matrix().trace_product(&a2).re - mean * mean;
    Ok(clamp_rounding(v))
}

fn clamp_rounding(v: f64) -> f64 {
    if (-VARIANCE_ROUNDING_TOL..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

/// ½⟨{A, B}⟩_ρ − ⟨A⟩_ρ⟨B⟩_ρ.
pub fn covariance(rho: &DensityMatrix, a: &Observable, b: &Observable) -> Result<f64, BoundError> {
    check_dims(rho, a)?;
    check_dims(rho, b)?;
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    let sym = 0.5 * (rho.matrix().trace_product(&ab).re + rho.matrix().trace_product(&ba).re);
    let ea = rho.matrix().trace_product(a.matrix()).re;
    let eb = rho.matrix().trace_product(b.matrix()).re;
    Ok(sym - ea * eb)
}

/// ‖[A, ρ^s]‖².
pub fn comm_norm_sq(rho: &DensityMatrix, a: &Observable, s: f64) -> Result<f64, BoundError> {
    check_s(s)?;
    check_dims(rho, a)?;
    let power = matrix_power(rho.spectrum(), s)?;
    Ok(hs_norm_sq(&commutator(a.matrix(), &power)?))
}

/// True when ρ's spectrum is a single cluster or its extreme gap is below `MIXED_TOL`.
pub fn is_maximally_mixed(rho: &DensityMatrix) -> bool {
    let gap = rho.lambda_max() - rho.lambda_min();
    rho.spectrum().clusters().len() == 1 || gap <= MIXED_TOL * rho.lambda_max().max(1.0)
}

/// (λ_max + λ_min) / (2 (λ_max^s − λ_min^s)²).
pub fn optimal_coefficient(rho: &DensityMatrix, s: f64) -> Result<Coefficient, BoundError> {
    check_s(s)?;
    if is_maximally_mixed(rho) {
        return Ok(Coefficient::MaximallyMixed);
    }
    let (lo, hi) = (rho.lambda_min().max(0.0), rho.lambda_max());
    let denom = power_difference(hi, lo, s);
    Ok(Coefficient::Finite((hi + lo) / (2.0 * denom * denom)))
}

/// c_s^opt(ρ) ‖[A, ρ^s]‖² evaluated as a sum over eigenbasis entries.
///
/// Writing A_ij in an eigenbasis of ρ, the product equals
/// `(λ_max + λ_min) Σ_{i<j} w_ij² |A_ij|²` with `w_ij = (λ_i^s − λ_j^s)/(λ_max^s − λ_min^s)`.
/// Each ratio is formed from stably computed power differences, so the
/// result stays accurate when the spectral gap is tiny and c_s^opt is huge.
/// Pairs inside one degenerate cluster are skipped: pinching already
/// counts them in the classical part.
pub fn quantum_term(rho: &DensityMatrix, a: &Observable, s: f64) -> Result<f64, BoundError> {
    check_s(s)?;
    check_dims(rho, a)?;
    if is_maximally_mixed(rho) {
        return Ok(0.0);
    }
    let spectrum = rho.spectrum();
    let a_eig = a.matrix().conjugate_by(spectrum.eigenvectors());
    let labels = spectrum.cluster_labels();
    let ev: Vec<f64> = spectrum.eigenvalues().iter().map(|l| l.max(0.0)).collect();
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    let extreme = power_difference(hi, lo, s);
    let d = ev.len();
    let mut acc = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            if labels[i] == labels[j] {
                continue;
            }
            let w = power_difference(ev[j], ev[i], s) / extreme;
            acc += w * w * a_eig[(i, j)].norm_sqr();
        }
    }
    Ok((hi + lo) * acc)
}

/// Σ_μ P_μ A P_μ over the spectral projectors of ρ.
pub fn pinch(rho: &DensityMatrix, a: &Observable) -> Result<Observable, BoundError> {
    check_dims(rho, a)?;
    let projectors = rho.spectrum().projectors();
    if projectors.len() == 1 {
        return Ok(a.clone());
    }
    let mut out = ComplexMatrix::zeros(a.dim());
    for p in projectors {
        out = &out + &(&(p * a.matrix()) * p);
    }
    Ok(Observable::new(out.hermitian_part())?)
}

/// V^cl_ρ(A) = V_ρ(P_ρ(A)).
pub fn classical_variance(rho: &DensityMatrix, a: &Observable) -> Result<f64, BoundError> {
    variance(rho, &pinch(rho, a)?)
}

pub fn single_bound_report(
    rho: &DensityMatrix,
    a: &Observable,
    s: f64,
) -> Result<BoundReport, BoundError> {
    check_s(s)?;
    check_dims(rho, a)?;
    let variance = variance(rho, a)?;
    let classical_variance = classical_variance(rho, a)?;
    let comm_norm_sq = comm_norm_sq(rho, a, s)?;
    let coefficient = optimal_coefficient(rho, s)?;
    let optimal_bound = quantum_term(rho, a, s)?;
    let sharp_bound = classical_variance + optimal_bound;
    Ok(BoundReport {
        s,
        variance,
        classical_variance,
        comm_norm_sq,
        coefficient,
        luo_bound: 0.5 * comm_norm_sq,
        luo_valid: s == 0.5,
        optimal_bound,
        sharp_bound,
        slack: variance - sharp_bound,
    })
}

/// The observable |d⟩⟨1| + |1⟩⟨d| coupling the first eigenvectors of the
/// λ_min and λ_max clusters; it saturates the bound for every s.
pub fn tight_witness(rho: &DensityMatrix) -> Result<Observable, BoundError> {
    if is_maximally_mixed(rho) {
        return Err(BoundError::MaximallyMixedState);
    }
    let spectrum = rho.spectrum();
    let clusters = spectrum.clusters();
    let low = spectrum.eigenvector(clusters[0].start);
    let high = spectrum.eigenvector(clusters[clusters.len() - 1].start);
    let m = &ComplexMatrix::outer(&high, &low) + &ComplexMatrix::outer(&low, &high);
    Ok(Observable::new(m.hermitian_part())?)
}

/// D_A(X) = Σ_α P^A_α X P^A_α over the spectral projectors of A.
pub fn decohere(projectors: &[ComplexMatrix], x: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(x.dim());
    for p in projectors {
        out = &out + &(&(p * x) * p);
    }
    out
}

/// Minimal eigenvalue gap of A, the coherence ‖ρ − D_A(ρ)‖², and the
/// decoherence-loss bound c_1^opt δ_A² C_A(ρ).
pub fn coherence_report(
    rho: &DensityMatrix,
    a: &Observable,
) -> Result<CoherenceReport, BoundError> {
    check_dims(rho, a)?;
    let spectrum = herm_eig(a.matrix(), default_cluster_tol(a.matrix()))?;
    let n_clusters = spectrum.clusters().len();
    if n_clusters < 2 {
        return Err(BoundError::ScalarObservable);
    }
    let values: Vec<f64> = (0..n_clusters)
        .map(|mu| spectrum.cluster_value(mu))
        .collect();
    let delta_a = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let off = rho.matrix() - &decohere(spectrum.projectors(), rho.matrix());
    let coherence = hs_norm_sq(&off);
    let coefficient = optimal_coefficient(rho, 1.0)?;
    Ok(CoherenceReport {
        delta_a,
        coherence,
        decoherence_bound: coefficient.times(delta_a * delta_a * coherence),
        s1_bound: quantum_term(rho, a, 1.0)?,
        variance: variance(rho, a)?,
    })
}

/// F(x, y) = (x^s − y^s)² / (x + y).
pub fn lemma_ratio(x: f64, y: f64, s: f64) -> Result<f64, BoundError> {
    check_s(s)?;
    if !(x > 0.0 && y > 0.0) {
        return Err(BoundError::NonPositiveInput { x, y });
    }
    if x == y {
        return Ok(0.0);
    }
    let diff = if x > y {
        power_difference(x, y, s)
    } else {
        power_difference(y, x, s)
    };
    Ok(diff * diff / (x + y))
}

/// Result of a brute-force grid scan of F over [m, M]².
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaScan {
    pub s: f64,
    pub grid_max: f64,
    /// Grid point attaining the maximum, reported with x ≥ y (F is symmetric).
    pub argmax: (f64, f64),
    pub corner_value: f64,
}

impl LemmaScan {
    /// Whether the grid maximum stays below F(M, m) within relative `rel_tol`.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.grid_max <= self.corner_value * (1.0 + rel_tol)
    }
}

/// Evaluates F on a `grid × grid` lattice spanning [m, M]² including both endpoints.
pub fn lemma_scan(m: f64, big_m: f64, grid: usize, s: f64) -> Result<LemmaScan, BoundError> {
    check_s(s)?;
    if !(m > 0.0 && big_m.is_finite() && big_m - m > 1e-12 * big_m) {
        return Err(BoundError::InvalidInterval { m, big_m });
    }
    let grid = grid.max(2);
    let point = |k: usize| {
        if k == grid - 1 {
            big_m
        } else {
            m + (big_m - m) * k as f64 / (grid - 1) as f64
        }
    };
    let mut grid_max = f64::NEG_INFINITY;
    let mut argmax = (m, m);
    for i in 0..grid {
        let x = point(i);
        for j in 0..grid {
            let y = point(j);
            let f = lemma_ratio(x, y, s)?;
            if f > grid_max {
                grid_max = f;
                argmax = if x >= y { (x, y) } else { (y, x) };
            }
        }
    }
    Ok(LemmaScan {
        s,
        grid_max,
        argmax,
        corner_value: lemma_ratio(big_m, m, s)?,
    })
}

/// Limit of c_s^opt(ρ_ε) ‖[A, ρ_ε^s]‖² as ε → 0⁺ along ρ_ε = I/d + ε H.
///
/// At the maximally mixed state the commutator term is zero by convention,
/// but the product has a finite one-sided limit along any direction H:
/// `(2/d) Σ_{i<j} (h_i − h_j)² / (h_max − h_min)² |A_ij|²` in an eigenbasis
/// of H. It does not depend on s.
pub fn quantum_term_limit(direction: &Observable, a: &Observable) -> Result<f64, BoundError> {
    if direction.dim() != a.dim() {
        return Err(BoundError::DimensionMismatch {
            state: direction.dim(),
            observable: a.dim(),
        });
    }
    let spectrum = herm_eig(direction.matrix(), default_cluster_tol(direction.matrix()))?;
    if spectrum.clusters().len() < 2 {
        return Err(BoundError::ScalarObservable);
    }
    let h = spectrum.eigenvalues();
    let d = h.len();
    let span = h[d - 1] - h[0];
    let a_eig = a.matrix().conjugate_by(spectrum.eigenvectors());
    let labels = spectrum.cluster_labels();
    let mut acc = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            if labels[i] != labels[j] {
                let w = (h[j] - h[i]) / span;
                acc += w * w * a_eig[(i, j)].norm_sqr();
            }
        }
    }
    Ok(2.0 / d as f64 * acc)
}

/// ⟨[A, B]⟩_ρ.
pub fn commutator_expectation(
    rho: &DensityMatrix,
    a: &Observable,
    b: &Observable,
) -> Result<Complex64, BoundError> {
    check_dims(rho, a)?;
    check_dims(rho, b)?;
    let c = commutator(a.matrix(), b.matrix())?;
    Ok(rho.matrix().trace_product(&c))
}
