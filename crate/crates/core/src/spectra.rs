//! Spectra of self-adjoint Toeplitz operators, eigenvalue counting and
//! symbol level measures.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::quadrature::{self, Estimate, QuadratureRule};
use crate::toeplitz::{Symbol, ToeplitzOperator};
use crate::weights::Weight;

/// Largest tolerated ‖A − A*‖_max before a spectrum is refused.
pub const HERMITICITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSummary {
    pub weight: Weight,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub symbol_id: String,
    pub hermiticity_residual: f64,
}

impl SpectralSummary {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn mean(&self) -> f64 {
        self.eigenvalues.iter().sum::<f64>() / self.dim() as f64
    }
}

/// Spectrum of (A + A*)/2 after checking A is self-adjoint within tolerance.
pub fn spectrum(a: &ToeplitzOperator) -> Result<SpectralSummary> {
    let residual = linalg::hermiticity_residual(&a.matrix);
    if !(residual <= HERMITICITY_TOL) {
        return Err(Error::NotSelfAdjoint(residual));
    }
    let sym: CMat = (&a.matrix + a.matrix.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(SpectralSummary {
        weight: a.weight.clone(),
        eigenvalues: linalg::hermitian_eigenvalues(&sym),
        symbol_id: a.symbol_id.clone(),
        hermiticity_residual: residual,
    })
}

/// #{eigenvalues > τ} / d.
pub fn counting_fraction(s: &SpectralSummary, tau: f64) -> f64 {
    if s.eigenvalues.is_empty() {
        return 0.0;
    }
    let above = s.eigenvalues.len() - s.eigenvalues.partition_point(|&e| e <= tau);
    above as f64 / s.dim() as f64
}

/// μ{f > τ} under Haar measure, estimated with `rule`.
pub fn level_measure(f: &Symbol, tau: f64, rule: &QuadratureRule) -> Result<Estimate> {
    let vals: Vec<f64> = crate::par::map_collect(&rule.nodes, |g| {
        let z = f.eval(g);
        if z.im.abs() > 1e-12 {
            f64::NAN
        } else {
            z.re
        }
    });
    if vals.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain(format!("symbol {} is not real-valued", f.id)));
    }
    quadrature::integrate_estimate(rule, |g| {
        let z = f.eval(g).re;
        Complex64::new(if z > tau { 1.0 } else { 0.0 }, 0.0)
    })
}

/// Mass of {|f − τ| ≤ width}; a τ where this exceeds the sampling
/// resolution sits on an atom of the level measure.
pub fn level_atom_mass(f: &Symbol, tau: f64, width: f64, rule: &QuadratureRule) -> Result<f64> {
    let e = quadrature::integrate_estimate(rule, |g| {
        let z = f.eval(g).re;
        Complex64::new(if (z - tau).abs() <= width { 1.0 } else { 0.0 }, 0.0)
    })?;
    Ok(e.value.re)
}
