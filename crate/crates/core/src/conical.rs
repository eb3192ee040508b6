//! Conical functions Δ^λ, Berezin kernels and the multi-point kernels h_k.
//!
//! Δ^λ(g) = ∏ᵢ (leading i×i minor of g)^{λᵢ} · det(g)^c, the matrix
//! coefficient of the highest-weight vector e₁∧…∧eᵢ realization.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{su2_from_euler, UnitaryElement};
use crate::linalg::{self, CMat, ONE, ZERO};
use crate::par;
use crate::quadrature::{self, Estimate, QuadratureRule};
use crate::weights::{self, weyl_dimension, RootDataA, Weight};

/// Minors with modulus at or below this (times the entry scale) are zero.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// Δ^λ as an evaluator.
#[derive(Clone, Debug, PartialEq)]
pub struct ConicalFunction {
    pub weight: Weight,
    pub n: usize,
}

impl ConicalFunction {
    pub fn new(weight: Weight) -> Self {
        let n = weight.n();
        Self { weight, n }
    }

    /// Δ^λ(g) for any square complex matrix of size n.
    pub fn eval_matrix(&self, g: &CMat) -> Complex64 {
        conical_eval(&self.weight, g)
    }

    pub fn eval(&self, g: &UnitaryElement) -> Complex64 {
        conical_eval(&self.weight, g.matrix())
    }

    /// |Δ^λ(g)|².
    pub fn abs_sq(&self, g: &UnitaryElement) -> f64 {
        log_abs(&self.weight, g.matrix())
            .map(|l| (2.0 * l).exp())
            .unwrap_or(0.0)
    }
}

/// (exponent, minor, minor size) for every factor of Δ^λ.
fn minors(lambda: &Weight, g: &CMat) -> Vec<(i64, Complex64, i32)> {
    let mut out = Vec::with_capacity(lambda.n());
    for (i, &p) in lambda.coeffs.iter().enumerate() {
        if p != 0 {
            out.push((p, linalg::leading_minor(g, i + 1), i as i32 + 1));
        }
    }
    if lambda.central != 0 {
        out.push((lambda.central, linalg::det(g), g.nrows() as i32));
    }
    out
}

fn underflows(z: Complex64, size: i32, scale: f64) -> bool {
    z.norm() <= UNDERFLOW_FLOOR * scale.powi(size)
}

/// `ln|Δ^λ(g)|`, or `None` when the value underflows to zero.
fn log_abs(lambda: &Weight, g: &CMat) -> Option<f64> {
    let scale = linalg::max_abs(g).max(f64::MIN_POSITIVE);
    let mut acc = 0.0;
    for (p, z, size) in minors(lambda, g) {
        if underflows(z, size, scale) {
            return None;
        }
        acc += p as f64 * z.norm().ln();
    }
    Some(acc)
}

/// Δ^λ(g) = ∏ minorᵢ^{λᵢ}·det^c, accumulated through the complex logarithm.
pub fn conical_eval(lambda: &Weight, g: &CMat) -> Complex64 {
    let scale = linalg::max_abs(g).max(f64::MIN_POSITIVE);
    let mut log = ZERO;
    let mut any = false;
    for (p, z, size) in minors(lambda, g) {
        if underflows(z, size, scale) {
            return ZERO;
        }
        log += z.ln() * p as f64;
        any = true;
    }
    if any {
        log.exp()
    } else {
        ONE
    }
}

/// d_λ·|Δ^λ|².
#[derive(Clone, Debug)]
pub struct BerezinKernel {
    pub conical: ConicalFunction,
    pub dim: u64,
}

impl BerezinKernel {
    pub fn new(weight: Weight) -> Result<Self> {
        let dim = weyl_dimension(&weight, &RootDataA::new(weight.n())?)?;
        Ok(Self {
            conical: ConicalFunction::new(weight),
            dim,
        })
    }

    pub fn eval(&self, g: &UnitaryElement) -> f64 {
        self.dim as f64 * self.conical.abs_sq(g)
    }
}

pub fn berezin_kernel_eval(lambda: &Weight, g: &UnitaryElement) -> Result<f64> {
    Ok(BerezinKernel::new(lambda.clone())?.eval(g))
}

/// Position of g relative to L = {|Δ^λ| = 1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilizerClass {
    InL,
    Boundary,
    OutsideL,
}

pub fn stabilizer_classify(lambda: &Weight, g: &UnitaryElement, tol: f64) -> StabilizerClass {
    let gap = 1.0 - conical_eval(lambda, g.matrix()).norm();
    if gap <= tol {
        StabilizerClass::InL
    } else if gap <= 10.0 * tol {
        StabilizerClass::Boundary
    } else {
        StabilizerClass::OutsideL
    }
}

/// h_k(y₁,…,y_k) = d^k Δ(y₁) Δ(y₁⁻¹y₂) ⋯ Δ(y_{k−1}⁻¹y_k) Δ(y_k⁻¹).
pub fn h_k_eval(lambda: &Weight, dim: u64, points: &[UnitaryElement]) -> Result<Complex64> {
    if points.is_empty() {
        return Err(Error::Domain("h_k needs k ≥ 1 points".into()));
    }
    let d = dim as f64;
    let mut acc = Complex64::new(d.powi(points.len() as i32), 0.0);
    acc *= conical_eval(lambda, points[0].matrix());
    for w in points.windows(2) {
        acc *= conical_eval(lambda, &(w[0].matrix().adjoint() * w[1].matrix()));
    }
    acc *= conical_eval(lambda, &points[points.len() - 1].matrix().adjoint());
    Ok(acc)
}

/// Weight Σ_{i∈supp λ} ωᵢ, whose conical function measures distance in G/L.
pub fn support_weight(lambda: &Weight) -> Weight {
    let coeffs = lambda.coeffs.iter().map(|&c| i64::from(c != 0)).collect();
    Weight::new(coeffs, 0)
}

/// Angle of the coset gL from the base point: 2·arccos|Δ^μ(g)| with μ the
/// support weight of λ. On SU(2) this is the polar angle on S².
pub fn coset_angle(lambda: &Weight, g: &UnitaryElement) -> f64 {
    let r = conical_eval(&support_weight(lambda), g.matrix())
        .norm()
        .min(1.0);
    2.0 * r.acos()
}

/// Sup of |h_k| over k-tuples of `candidates` not all inside the θ₀-ball
/// of the base coset.
pub fn sup_outside_neighborhood(
    lambda: &Weight,
    k: usize,
    theta0: f64,
    candidates: &[UnitaryElement],
) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("k must be ≥ 1".into()));
    }
    let dim = weyl_dimension(lambda, &RootDataA::new(lambda.n())?)?;
    let c = candidates.len();
    if c == 0 {
        return Ok(0.0);
    }
    // Slack absorbs rounding in arccos for candidates placed on the sphere θ = θ₀.
    let outside: Vec<bool> = candidates
        .iter()
        .map(|g| coset_angle(lambda, g) >= theta0 - 1e-9)
        .collect();
    let total = c
        .checked_pow(k as u32)
        .ok_or_else(|| Error::Resource("too many k-tuples".into()))?;
    let values = par::map_range(total, |mut idx| {
        let mut tuple = Vec::with_capacity(k);
        let mut any_out = false;
        for _ in 0..k {
            let i = idx % c;
            idx /= c;
            any_out |= outside[i];
            tuple.push(candidates[i].clone());
        }
        if !any_out {
            return 0.0;
        }
        h_k_eval(lambda, dim, &tuple)
            .map(|z| z.norm())
            .unwrap_or(f64::NAN)
    });
    let mut sup: f64 = 0.0;
    for v in values {
        if !v.is_finite() {
            return Err(Error::NonFinite("h_k value".into()));
        }
        sup = sup.max(v);
    }
    Ok(sup)
}

/// Coset representatives of SU(2)/T on a polar grid: θ uniform on
/// `[theta_min, π]` (both ends included) and φ uniform on the circle.
pub fn su2_coset_grid(theta_min: f64, theta_steps: usize, phi_steps: usize) -> Vec<UnitaryElement> {
    let mut out = Vec::with_capacity((theta_steps + 1) * phi_steps.max(1));
    for i in 0..=theta_steps {
        let theta = if theta_steps == 0 {
            theta_min
        } else {
            theta_min + (PI - theta_min) * i as f64 / theta_steps as f64
        };
        for j in 0..phi_steps.max(1) {
            let phi = 2.0 * PI * j as f64 / phi_steps.max(1) as f64;
            out.push(su2_from_euler(phi, theta, 0.0));
        }
    }
    out
}

/// ‖h_k‖₁ by the k-fold product of `rule`. The cost is `rule.len()^k`
/// kernel evaluations; |h_k| is right-L-invariant in each argument, so a
/// coset rule is adequate on SU(2).
pub fn h_k_l1_product(lambda: &Weight, k: usize, rule: &QuadratureRule) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("k must be ≥ 1".into()));
    }
    let dim = weyl_dimension(lambda, &RootDataA::new(lambda.n())?)?;
    let d = dim as f64;
    let nodes = &rule.nodes;
    let c = nodes.len();
    let total = c
        .checked_pow(k as u32)
        .ok_or_else(|| Error::Resource("too many k-tuples".into()))?;
    if k == 1 {
        return Ok(par::sum_by(c, |i| {
            rule.weights[i] * d * conical_eval(lambda, nodes[i].matrix()).norm_sqr()
        }));
    }
    let first: Vec<f64> = nodes
        .iter()
        .map(|g| conical_eval(lambda, g.matrix()).norm())
        .collect();
    let adj: Vec<CMat> = nodes.iter().map(|g| g.matrix().adjoint()).collect();
    let dk = d.powi(k as i32);
    let v = par::sum_by(total, |mut idx| {
        let mut prev = idx % c;
        idx /= c;
        let mut w = rule.weights[prev];
        let mut val = dk * first[prev];
        for _ in 1..k {
            let i = idx % c;
            idx /= c;
            w *= rule.weights[i];
            val *= conical_eval(lambda, &(&adj[prev] * nodes[i].matrix())).norm();
            prev = i;
        }
        // |Δ(y⁻¹)| = |Δ(y)|
        w * val * first[prev]
    });
    if !v.is_finite() {
        return Err(Error::NonFinite("‖h_k‖₁ estimate".into()));
    }
    Ok(v)
}

/// ‖h_k‖₁ by Monte Carlo over k independent Haar samples.
pub fn h_k_l1_mc(lambda: &Weight, k: usize, samples: usize, seed: u64) -> Result<Estimate> {
    if k == 0 || samples < 2 {
        return Err(Error::Domain("need k ≥ 1 and at least two samples".into()));
    }
    let dim = weyl_dimension(lambda, &RootDataA::new(lambda.n())?)?;
    let n = lambda.n();
    let draws: Vec<Vec<UnitaryElement>> = (0..k)
        .map(|s| crate::group::haar_sample(n, seed.wrapping_add(s as u64 * 0x9e37), samples))
        .collect();
    let vals: Vec<Complex64> = par::map_range(samples, |i| {
        let pts: Vec<UnitaryElement> = draws.iter().map(|d| d[i].clone()).collect();
        Complex64::new(
            h_k_eval(lambda, dim, &pts)
                .map(|z| z.norm())
                .unwrap_or(f64::NAN),
            0.0,
        )
    });
    let mean = par::sum_by(samples, |i| vals[i]) / samples as f64;
    if !mean.re.is_finite() {
        return Err(Error::NonFinite("‖h_k‖₁ estimate".into()));
    }
    Ok(Estimate {
        value: mean,
        sigma: quadrature::mc_sigma(&vals, mean),
    })
}

/// Closed form of the SU(2) Berezin kernel at polar angle θ for λ = mω₁.
pub fn su2_kernel_closed_form(m: u32, theta: f64) -> f64 {
    (m as f64 + 1.0) * (theta / 2.0).cos().powi(2 * m as i32)
}

/// Block sizes of the stabilizer L of Δ^λ.
pub fn stabilizer_blocks(lambda: &Weight) -> Vec<usize> {
    weights::blocks_for_support(&weights::support(lambda), lambda.n())
}
