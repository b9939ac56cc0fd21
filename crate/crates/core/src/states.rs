//! Validated states and observables, Bloch parametrization, and seeded
//! random ensembles.
//!
//! Random generators are keyed by an explicit `(seed, stream)` pair on a
//! ChaCha8 generator so that every consumer (Monte Carlo batches, sweep
//! instances) can pick a disjoint substream and get results that do not
//! depend on evaluation order.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::linalg::{
    default_cluster_tol, herm_eig, hs_norm_sq, ComplexMatrix, LinalgError, SpectralDecomposition,
};

/// Trace tolerance for a density matrix.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues below −PSD_TOL make a matrix fail validation as a state.
pub const PSD_TOL: f64 = 1e-12;
/// Eigenvalues of a state within this distance of zero are stored as exact zeros.
pub const RANK_TOL: f64 = 1e-14;

const DENSITY_STREAM: u64 = 0x6465_6e73;
const OBSERVABLE_STREAM: u64 = 0x6f62_7376;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("NotHermitian: ‖M − M†‖ = {defect:e} exceeds {tolerance:e}")]
    NotHermitian { defect: f64, tolerance: f64 },
    #[error("TraceNotOne: trace is {trace}")]
    TraceNotOne { trace: f64 },
    #[error("NotPSD: eigenvalue {eigenvalue:e} is negative")]
    NotPsd { eigenvalue: f64 },
    #[error("invalid Bloch vector: {0}")]
    InvalidBloch(String),
    #[error("invalid ensemble dimensions: dim {dim}, rank {rank}")]
    InvalidDimension { dim: usize, rank: usize },
    #[error(transparent)]
    Linalg(LinalgError),
}

impl From<LinalgError> for StateError {
    fn from(err: LinalgError) -> Self {
        match err {
            LinalgError::NotHermitian { defect, tolerance } => {
                StateError::NotHermitian { defect, tolerance }
            }
            other => StateError::Linalg(other),
        }
    }
}

/// A validated density operator with its spectrum cached.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: SpectralDecomposition,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn lambda_min(&self) -> f64 {
        self.spectrum.min_eigenvalue()
    }

    pub fn lambda_max(&self) -> f64 {
        self.spectrum.max_eigenvalue()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        purity(self)
    }
}

/// Validates `m` as a quantum state: Hermitian, unit trace, positive semidefinite.
pub fn make_density(m: ComplexMatrix) -> Result<DensityMatrix, StateError> {
    if !m.is_finite() {
        return Err(StateError::Linalg(LinalgError::NonFinite {
            row: 0,
            col: 0,
        }));
    }
    m.check_hermitian()?;
    let matrix = m.hermitian_part();
    let trace = matrix.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(StateError::TraceNotOne { trace });
    }
    let spectrum = herm_eig(&matrix, default_cluster_tol(&matrix))?;
    if spectrum.min_eigenvalue() < -PSD_TOL {
        return Err(StateError::NotPsd {
            eigenvalue: spectrum.min_eigenvalue(),
        });
    }
    Ok(DensityMatrix {
        matrix,
        spectrum: spectrum.zero_below(RANK_TOL),
    })
}

/// The maximally mixed state I/d.
pub fn maximally_mixed(dim: usize) -> DensityMatrix {
    make_density(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
        .expect("I/d is a valid state")
}

/// A validated self-adjoint operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
}

impl Observable {
    pub fn new(m: ComplexMatrix) -> Result<Self, StateError> {
        if !m.is_finite() {
            return Err(StateError::Linalg(LinalgError::NonFinite {
                row: 0,
                col: 0,
            }));
        }
        m.check_hermitian()?;
        Ok(Self {
            matrix: m.hermitian_part(),
        })
    }

    /// Spin observable a·σ for a real 3-vector `a`.
    pub fn spin(a: [f64; 3]) -> Self {
        let m = &(&ComplexMatrix::pauli_x().scale(a[0]) + &ComplexMatrix::pauli_y().scale(a[1]))
            + &ComplexMatrix::pauli_z().scale(a[2]);
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Qubit state in Bloch form ρ = (I + r n·σ)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    r: f64,
    n: [f64; 3],
}

impl BlochState {
    pub fn new(r: f64, n: [f64; 3]) -> Result<Self, StateError> {
        if !(0.0..=1.0).contains(&r) {
            return Err(StateError::InvalidBloch(format!(
                "length {r} outside [0, 1]"
            )));
        }
        let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm.is_nan() || (norm - 1.0).abs() > 1e-12 {
            return Err(StateError::InvalidBloch(format!(
                "direction has norm {norm}"
            )));
        }
        Ok(Self { r, n })
    }

    pub fn along_z(r: f64) -> Result<Self, StateError> {
        Self::new(r, [0.0, 0.0, 1.0])
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn n(&self) -> [f64; 3] {
        self.n
    }
}

pub fn from_bloch(b: BlochState) -> DensityMatrix {
    let bloch = Observable::spin([b.r * b.n[0], b.r * b.n[1], b.r * b.n[2]]);
    let m = (&ComplexMatrix::identity(2) + bloch.matrix()).scale(0.5);
    make_density(m).expect("a Bloch vector of length ≤ 1 is a valid state")
}

/// Tr ρ².
pub fn purity(rho: &DensityMatrix) -> f64 {
    // ρ is Hermitian, so Tr ρ² = Tr ρ†ρ.
    hs_norm_sq(rho.matrix())
}

/// ChaCha8 generator on substream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer applied to `seed + index`; used to give numbered
/// instances well-separated seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre-induced random state GG†/Tr(GG†) with G of shape dim × rank.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix, StateError> {
    if dim < 2 || rank == 0 || rank > dim {
        return Err(StateError::InvalidDimension { dim, rank });
    }
    let mut rng = stream_rng(seed, DENSITY_STREAM);
    let g: Vec<Complex64> = (0..dim * rank)
        .map(|_| complex_gaussian(&mut rng))
        .collect();
    let mut m = ComplexMatrix::from_fn(dim, |i, j| {
        (0..rank)
            .map(|k| g[i * rank + k] * g[j * rank + k].conj())
            .sum()
    });
    let trace = m.trace().re;
    m = m.scale(1.0 / trace);
    make_density(m)
}

/// GUE-like random observable (G + G†)/2.
pub fn random_observable(dim: usize, seed: u64) -> Result<Observable, StateError> {
    if dim < 2 {
        return Err(StateError::InvalidDimension { dim, rank: dim });
    }
    let mut rng = stream_rng(seed, OBSERVABLE_STREAM);
    let g: Vec<Complex64> = (0..dim * dim).map(|_| complex_gaussian(&mut rng)).collect();
    let m = ComplexMatrix::from_fn(dim, |i, j| {
        if i == j {
            Complex64::new(g[i * dim + i].re, 0.0)
        } else {
            (g[i * dim + j] + g[j * dim + i].conj()) * 0.5
        }
    });
    Ok(Observable { matrix: m })
}

/// Uniform point on S² from a normalized Gaussian 3-vector.
pub fn random_unit_vector3<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-150 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}
