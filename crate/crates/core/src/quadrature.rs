//! Integration against Haar measure.
//!
//! SU(2) integrals use deterministic product rules (Gauss-Legendre in
//! cos θ times uniform grids in the two torus angles) that are exact on
//! polynomials in the matrix entries up to a declared total degree. U(n)
//! integrals use Monte Carlo rules with an attached σ estimate.
//!
//! All sums are pairwise over a fixed tree (see [`crate::par`]).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{self, su2_from_euler, SubgroupSpec, UnitaryElement};
use crate::par;

/// How a rule was built, and therefore what it integrates exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleKind {
    /// Exact on SU(2) for polynomials of total degree ≤ `max_degree` in
    /// the entries of g and ḡ.
    Su2Product { max_degree: usize },
    /// Exact on SU(2) for right-T-invariant polynomial integrands of total
    /// degree ≤ `max_degree`; nodes are coset representatives of SU(2)/T.
    Su2Coset { max_degree: usize },
    /// Uniform grid on a torus, exact for trigonometric polynomials of
    /// degree < `points` in each free angle.
    Torus {
        n: usize,
        special: bool,
        points: usize,
    },
    /// Haar Monte Carlo on `domain`.
    MonteCarlo {
        domain: SubgroupSpec,
        samples: usize,
        seed: u64,
    },
}

/// A value with its statistical standard error (zero for exact rules).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub sigma: f64,
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<UnitaryElement>,
    pub weights: Vec<f64>,
    pub kind: RuleKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn group_n(&self) -> usize {
        self.nodes.first().map(|g| g.n()).unwrap_or(0)
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self.kind, RuleKind::MonteCarlo { .. })
    }

    /// Exactness degree for deterministic SU(2) rules.
    pub fn exact_degree(&self) -> Option<usize> {
        match self.kind {
            RuleKind::Su2Product { max_degree } | RuleKind::Su2Coset { max_degree } => {
                Some(max_degree)
            }
            _ => None,
        }
    }

    /// Whether the rule only integrates right-T-invariant functions.
    pub fn requires_right_torus_invariance(&self) -> bool {
        matches!(self.kind, RuleKind::Su2Coset { .. })
    }

    /// Check that a deterministic SU(2) rule integrates polynomials of the
    /// given total degree. Monte Carlo rules always pass; their error is
    /// reported through σ.
    pub fn check_degree(&self, needed: usize) -> Result<()> {
        match self.exact_degree() {
            Some(d) if d < needed => Err(Error::Precondition(format!(
                "quadrature rule exact to degree {d}, integrand needs {needed}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn weight_sum(&self) -> f64 {
        par::sum_by(self.weights.len(), |i| self.weights[i])
    }
}

/// Gauss-Legendre nodes and weights on [−1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss points in t = cos²(θ/2) ∈ [0,1] needed for polynomials of degree
/// `max_degree/2` in t.
fn t_points(max_degree: usize) -> usize {
    (max_degree / 2) / 2 + 1
}

/// Product rule on SU(2), exact for all matrix coefficients of σ^λ ⊗ σ̄^μ
/// with λ₁ + μ₁ ≤ `max_degree`.
pub fn su2_product_rule(max_degree: usize) -> QuadratureRule {
    let (ct, wt) = gauss_legendre(t_points(max_degree));
    let m = max_degree + 1;
    let grid = group::angle_grid(m);
    let mut nodes = Vec::with_capacity(ct.len() * m * m);
    let mut weights = Vec::with_capacity(ct.len() * m * m);
    for (c, w) in ct.iter().zip(&wt) {
        let theta = c.clamp(-1.0, 1.0).acos();
        for &alpha in &grid {
            for &beta in &grid {
                // g₁₁ = √t·e^{iα}, g₂₁ = √(1−t)·e^{iβ}
                nodes.push(su2_from_euler(beta - alpha, theta, -alpha - beta));
                weights.push(0.5 * w / (m * m) as f64);
            }
        }
    }
    QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::Su2Product { max_degree },
    }
}

/// Coset rule on SU(2)/T (ψ = 0), exact for right-T-invariant polynomial
/// integrands of total degree ≤ `max_degree`.
pub fn su2_coset_rule(max_degree: usize) -> QuadratureRule {
    let (ct, wt) = gauss_legendre(t_points(max_degree));
    let m = max_degree + 1;
    let grid = group::angle_grid(m);
    let mut nodes = Vec::with_capacity(ct.len() * m);
    let mut weights = Vec::with_capacity(ct.len() * m);
    for (c, w) in ct.iter().zip(&wt) {
        let theta = c.clamp(-1.0, 1.0).acos();
        for &phi in &grid {
            nodes.push(su2_from_euler(phi, theta, 0.0));
            weights.push(0.5 * w / m as f64);
        }
    }
    QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::Su2Coset { max_degree },
    }
}

/// Uniform grid on the diagonal torus of U(n) (or SU(n) when `special`).
pub fn torus_rule(n: usize, special: bool, points: usize) -> QuadratureRule {
    let free = if special { n - 1 } else { n };
    let grid = group::angle_grid(points);
    let total = points.pow(free as u32);
    let mut nodes = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut phases = Vec::with_capacity(n);
        for _ in 0..free {
            phases.push(grid[idx % points]);
            idx /= points;
        }
        if special {
            let s: f64 = phases.iter().sum();
            phases.push(-s);
        }
        nodes.push(UnitaryElement::diagonal(&phases));
    }
    let w = 1.0 / total as f64;
    QuadratureRule {
        nodes,
        weights: vec![w; total],
        kind: RuleKind::Torus { n, special, points },
    }
}

/// Haar Monte Carlo on U(n).
pub fn mc_rule(n: usize, samples: usize, seed: u64) -> Result<QuadratureRule> {
    mc_rule_on(&SubgroupSpec::Full { n }, samples, seed)
}

/// Haar Monte Carlo on any supported subgroup.
pub fn mc_rule_on(domain: &SubgroupSpec, samples: usize, seed: u64) -> Result<QuadratureRule> {
    if samples == 0 {
        return Err(Error::Domain(
            "Monte Carlo rule needs at least one sample".into(),
        ));
    }
    let nodes = group::subgroup_sample(domain, seed, samples)?;
    Ok(QuadratureRule {
        nodes,
        weights: vec![1.0 / samples as f64; samples],
        kind: RuleKind::MonteCarlo {
            domain: domain.clone(),
            samples,
            seed,
        },
    })
}

fn check_finite(z: Complex64, i: usize) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(format!("integrand is {z} at node {i}")))
    }
}

fn evaluate<F>(rule: &QuadratureRule, f: F) -> Result<Vec<Complex64>>
where
    F: Fn(&UnitaryElement) -> Complex64 + Sync + Send,
{
    let vals = par::map_collect(&rule.nodes, f);
    for (i, v) in vals.iter().enumerate() {
        check_finite(*v, i)?;
    }
    Ok(vals)
}

fn weighted_sum(rule: &QuadratureRule, vals: &[Complex64]) -> Complex64 {
    if rule.is_monte_carlo() {
        // Uniform weights: divide once so that constants integrate exactly.
        return par::sum_by(vals.len(), |i| vals[i]) / vals.len() as f64;
    }
    par::sum_by(vals.len(), |i| vals[i] * rule.weights[i])
}

/// `Σ wᵢ f(gᵢ)`.
pub fn integrate<F>(rule: &QuadratureRule, f: F) -> Result<Complex64>
where
    F: Fn(&UnitaryElement) -> Complex64 + Sync + Send,
{
    let vals = evaluate(rule, f)?;
    Ok(weighted_sum(rule, &vals))
}

/// Integral with its standard error (σ = 0 for deterministic rules).
pub fn integrate_estimate<F>(rule: &QuadratureRule, f: F) -> Result<Estimate>
where
    F: Fn(&UnitaryElement) -> Complex64 + Sync + Send,
{
    let vals = evaluate(rule, f)?;
    let value = weighted_sum(rule, &vals);
    let sigma = if rule.is_monte_carlo() {
        mc_sigma(&vals, value)
    } else {
        0.0
    };
    Ok(Estimate { value, sigma })
}

/// Standard error of a uniform-weight sample mean.
pub fn mc_sigma(vals: &[Complex64], mean: Complex64) -> f64 {
    let n = vals.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let ss: f64 = par::sum_by(n, |i| (vals[i] - mean).norm_sqr());
    (ss / (n - 1) as f64 / n as f64).sqrt()
}

/// `(f ∗ g)(x) = ∫ f(y) g(y⁻¹x) dy`.
pub fn convolve_at<F, G>(rule: &QuadratureRule, f: F, g: G, x: &UnitaryElement) -> Result<Complex64>
where
    F: Fn(&UnitaryElement) -> Complex64 + Sync + Send,
    G: Fn(&UnitaryElement) -> Complex64 + Sync + Send,
{
    integrate(rule, |y| f(y) * g(&y.inv_mul(x)))
}
