#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use single_ur_core::linalg::ComplexMatrix;
use single_ur_core::states::{make_density, DensityMatrix, Observable};
use single_ur_core::Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Unitary from Gram–Schmidt on complex Gaussian columns; columns form the basis.
pub fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<Complex64> = (0..d).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for u in &cols {
                let dot: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= dot * ui;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    cols
}

/// Σ_k w_k |u_k⟩⟨u_k| for basis columns `u`.
pub fn from_basis(u: &[Vec<Complex64>], weights: &[f64]) -> ComplexMatrix {
    let d = u.len();
    let m = ComplexMatrix::from_fn(d, |i, j| {
        (0..d).map(|k| u[k][i] * weights[k] * u[k][j].conj()).sum()
    });
    m.hermitian_part()
}

/// ⟨u_i|A|u_j⟩.
pub fn matrix_elements(u: &[Vec<Complex64>], a: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    let d = u.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..d {
                for q in 0..d {
                    acc += u[i][p].conj() * a[(p, q)] * u[j][q];
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Normalized spectrum with `rank` positive weights, optionally with repeated values.
pub fn random_spectrum(d: usize, rank: usize, degenerate: bool, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut w: Vec<f64> = (0..d)
        .map(|k| {
            if k < rank {
                rng.random_range(0.05..1.0)
            } else {
                0.0
            }
        })
        .collect();
    if degenerate && rank >= 3 {
        w[1] = w[0];
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

pub struct Instance {
    pub basis: Vec<Vec<Complex64>>,
    pub spectrum: Vec<f64>,
    pub rho: DensityMatrix,
}

pub fn instance(d: usize, rank: usize, degenerate: bool, rng: &mut ChaCha8Rng) -> Instance {
    let basis = random_unitary(d, rng);
    let spectrum = random_spectrum(d, rank, degenerate, rng);
    let rho = make_density(from_basis(&basis, &spectrum)).unwrap();
    Instance {
        basis,
        spectrum,
        rho,
    }
}

pub fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, |_, _| gaussian(rng));
    (&g + &g.adjoint()).scale(0.5).hermitian_part()
}

pub fn random_observable(d: usize, rng: &mut ChaCha8Rng) -> Observable {
    Observable::new(random_hermitian(d, rng)).unwrap()
}

pub fn power(l: f64, s: f64) -> f64 {
    if l <= 0.0 {
        0.0
    } else {
        l.powf(s)
    }
}

/// 2 Σ_{i<j} (λ_i^s − λ_j^s)² |A_ij|² with A_ij in the known eigenbasis.
pub fn comm_norm_oracle(inst: &Instance, a: &ComplexMatrix, s: f64) -> f64 {
    let el = matrix_elements(&inst.basis, a);
    let d = inst.spectrum.len();
    let mut acc = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let diff = power(inst.spectrum[i], s) - power(inst.spectrum[j], s);
            acc += 2.0 * diff * diff * el[i][j].norm_sqr();
        }
    }
    acc
}

/// Σ λ_i (A²)_ii − (Σ λ_i A_ii)² in the eigenbasis.
pub fn variance_oracle(inst: &Instance, a: &ComplexMatrix) -> f64 {
    let el = matrix_elements(&inst.basis, a);
    let d = inst.spectrum.len();
    let mut second = 0.0;
    let mut first = 0.0;
    for i in 0..d {
        first += inst.spectrum[i] * el[i][i].re;
        second += inst.spectrum[i] * (0..d).map(|k| el[i][k].norm_sqr()).sum::<f64>();
    }
    second - first * first
}

/// Variance of A with couplings between distinct eigenvalues removed.
pub fn classical_variance_oracle(inst: &Instance, a: &ComplexMatrix) -> f64 {
    let el = matrix_elements(&inst.basis, a);
    let d = inst.spectrum.len();
    let same = |i: usize, k: usize| (inst.spectrum[i] - inst.spectrum[k]).abs() < 1e-12;
    let mut second = 0.0;
    let mut first = 0.0;
    for i in 0..d {
        first += inst.spectrum[i] * el[i][i].re;
        second += inst.spectrum[i]
            * (0..d)
                .filter(|&k| same(i, k))
                .map(|k| el[i][k].norm_sqr())
                .sum::<f64>();
    }
    second - first * first
}

pub fn coefficient_oracle(spectrum: &[f64], s: f64) -> f64 {
    let hi = spectrum.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = spectrum.iter().cloned().fold(f64::INFINITY, f64::min);
    let diff = power(hi, s) - power(lo, s);
    (hi + lo) / (2.0 * diff * diff)
}
