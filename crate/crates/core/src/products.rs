//! Lower bounds on the variance product V_ρ(A)·V_ρ(B).
//!
//! Robertson and Schrödinger use the commutator [A, B] directly; the other
//! three multiply single-observable bounds and never look at [A, B].

use crate::bounds::{
    commutator_expectation, covariance, single_bound_report, BoundError, BoundReport,
};
use crate::states::{DensityMatrix, Observable};

#[derive(Debug, Clone, PartialEq)]
pub struct ProductReport {
    pub s: f64,
    pub variance_product: f64,
    pub robertson: f64,
    pub schrodinger: f64,
    pub luo_product: f64,
    pub optimal_product: f64,
    pub sharp_product: f64,
}

impl ProductReport {
    /// (name, value) for each lower bound, in report order.
    pub fn bounds(&self) -> [(&'static str, f64); 5] {
        [
            ("robertson", self.robertson),
            ("schrodinger", self.schrodinger),
            ("luo_product", self.luo_product),
            ("optimal_product", self.optimal_product),
            ("sharp_product", self.sharp_product),
        ]
    }
}

/// ¼ |⟨[A, B]⟩_ρ|².
pub fn robertson(rho: &DensityMatrix, a: &Observable, b: &Observable) -> Result<f64, BoundError> {
    Ok(0.25 * commutator_expectation(rho, a, b)?.norm_sqr())
}

/// Robertson plus the squared symmetrized covariance.
pub fn schrodinger(rho: &DensityMatrix, a: &Observable, b: &Observable) -> Result<f64, BoundError> {
    let cov = covariance(rho, a, b)?;
    Ok(robertson(rho, a, b)? + cov * cov)
}

/// ¼ ‖[A, √ρ]‖² ‖[B, √ρ]‖².
pub fn luo_product(rho: &DensityMatrix, a: &Observable, b: &Observable) -> Result<f64, BoundError> {
    let ra = single_bound_report(rho, a, 0.5)?;
    let rb = single_bound_report(rho, b, 0.5)?;
    Ok(ra.luo_bound * rb.luo_bound)
}

/// Product of the two optimal single-observable bounds.
pub fn optimal_product(
    rho: &DensityMatrix,
    a: &Observable,
    b: &Observable,
    s: f64,
) -> Result<f64, BoundError> {
    let ra = single_bound_report(rho, a, s)?;
    let rb = single_bound_report(rho, b, s)?;
    Ok(ra.optimal_bound * rb.optimal_bound)
}

/// Product of the two sharpened (classical + quantum) single-observable bounds.
pub fn sharp_product(
    rho: &DensityMatrix,
    a: &Observable,
    b: &Observable,
    s: f64,
) -> Result<f64, BoundError> {
    let ra = single_bound_report(rho, a, s)?;
    let rb = single_bound_report(rho, b, s)?;
    Ok(ra.sharp_bound * rb.sharp_bound)
}

/// All product bounds from one pair of single-observable reports per s.
pub fn product_report(
    rho: &DensityMatrix,
    a: &Observable,
    b: &Observable,
    s: f64,
) -> Result<ProductReport, BoundError> {
    let ra = single_bound_report(rho, a, s)?;
    let rb = single_bound_report(rho, b, s)?;
    let (la, lb) = if s == 0.5 {
        (ra.luo_bound, rb.luo_bound)
    } else {
        (
            single_bound_report(rho, a, 0.5)?.luo_bound,
            single_bound_report(rho, b, 0.5)?.luo_bound,
        )
    };
    assemble(rho, a, b, s, &ra, &rb, la * lb)
}

fn assemble(
    rho: &DensityMatrix,
    a: &Observable,
    b: &Observable,
    s: f64,
    ra: &BoundReport,
    rb: &BoundReport,
    luo_product: f64,
) -> Result<ProductReport, BoundError> {
    let robertson = robertson(rho, a, b)?;
    let cov = covariance(rho, a, b)?;
    Ok(ProductReport {
        s,
        variance_product: ra.variance * rb.variance,
        robertson,
        schrodinger: robertson + cov * cov,
        luo_product,
        optimal_product: ra.optimal_bound * rb.optimal_bound,
        sharp_product: ra.sharp_bound * rb.sharp_bound,
    })
}
