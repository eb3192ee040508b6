//! Berezin transforms, multiplicities in H_λ ⊗ H̄_λ and isotypic projections.
//!
//! The tensor space H_λ ⊗ H̄_λ is realized as d×d matrices, with v⊗w̄ ↦ vw*
//! and the group acting by X ↦ σ(g) X σ(g)*. Characters are evaluated from
//! weight multiplicities and eigenvalues, so every character integral is a
//! class-function quadrature.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::conical::{conical_eval, stabilizer_blocks};
use crate::error::{Error, Result};
use crate::group::UnitaryElement;
use crate::linalg::{self, CMat, CVec, ONE};
use crate::par;
use crate::quadrature::{self, Estimate, QuadratureRule, RuleKind};
use crate::repr::{irrep, HighestWeightRep};
use crate::toeplitz::{assemble_toeplitz, check_rule, Symbol};
use crate::weights::Weight;

/// Distance to the nearest integer allowed for an exact-rule multiplicity.
pub const INTEGRALITY_TOL: f64 = 1e-4;

/// Eigenvalues of a unitary matrix (diagonal of its Schur form).
pub fn eigenvalues(g: &UnitaryElement) -> Vec<Complex64> {
    let t = g.matrix().clone().schur().unpack().1;
    (0..g.n()).map(|i| t[(i, i)]).collect()
}

/// Character of an irreducible representation as a class function.
#[derive(Clone, Debug)]
pub struct Character {
    pub weight: Weight,
    pub dim: usize,
    pub weights: BTreeMap<Vec<i64>, usize>,
}

impl Character {
    pub fn of(rep: &HighestWeightRep) -> Result<Self> {
        Ok(Self {
            weight: rep.weight.clone(),
            dim: rep.dim,
            weights: rep.weight_multiplicities()?,
        })
    }

    pub fn from_weight(lambda: &Weight) -> Result<Self> {
        Self::of(&irrep(lambda)?)
    }

    pub fn n(&self) -> usize {
        self.weight.n()
    }

    /// Polynomial degree of the character in the entries of g and ḡ.
    pub fn degree(&self) -> usize {
        self.weight.degree() + self.n() * self.weight.central.unsigned_abs() as usize
    }

    pub fn eval_eigs(&self, eigs: &[Complex64]) -> Complex64 {
        self.weights
            .iter()
            .map(|(mu, &m)| {
                let mut z = Complex64::new(m as f64, 0.0);
                for (a, &p) in mu.iter().enumerate() {
                    z *= eigs[a].powi(p as i32);
                }
                z
            })
            .sum()
    }

    pub fn eval(&self, g: &UnitaryElement) -> Complex64 {
        self.eval_eigs(&eigenvalues(g))
    }
}

/// A multiplicity with the raw quadrature value it was rounded from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Multiplicity {
    pub value: usize,
    pub estimate: Estimate,
}

fn reject_coset(rule: &QuadratureRule, what: &str) -> Result<()> {
    if rule.requires_right_torus_invariance() {
        return Err(Error::Precondition(format!(
            "{what} needs a full-group rule, not a coset rule"
        )));
    }
    Ok(())
}

fn round_multiplicity(est: Estimate) -> Result<Multiplicity> {
    let x = est.value.re;
    let r = x.round();
    let tol = INTEGRALITY_TOL.max(5.0 * est.sigma);
    if (x - r).abs() > tol || est.value.im.abs() > tol || r < 0.0 {
        return Err(Error::Precision(format!(
            "quadrature value {} is not within {tol:e} of a non-negative integer",
            est.value
        )));
    }
    Ok(Multiplicity {
        value: r as usize,
        estimate: est,
    })
}

/// m(π, σ⊗σ̄) = ∫ |χ_σ|² χ̄_π dg.
pub fn multiplicity(
    sigma: &Character,
    pi: &Character,
    rule: &QuadratureRule,
) -> Result<Multiplicity> {
    if sigma.n() != pi.n() || rule.group_n() != sigma.n() {
        return Err(Error::Precondition(
            "characters and rule live on different groups".into(),
        ));
    }
    reject_coset(rule, "a multiplicity")?;
    if rule.exact_degree().is_some() {
        rule.check_degree(2 * sigma.degree() + pi.degree())?;
    }
    let est = quadrature::integrate_estimate(rule, |g| {
        let e = eigenvalues(g);
        Complex64::new(sigma.eval_eigs(&e).norm_sqr(), 0.0) * pi.eval_eigs(&e).conj()
    })?;
    round_multiplicity(est)
}

/// dim H_π^L = ∫_L χ_π(l) dl, with `l_rule` a torus grid or Monte Carlo on L.
pub fn invariant_dimension(pi: &Character, l_rule: &QuadratureRule) -> Result<Multiplicity> {
    if l_rule.group_n() != pi.n() {
        return Err(Error::Precondition(
            "rule and character live on different groups".into(),
        ));
    }
    match &l_rule.kind {
        RuleKind::Torus { points, .. } => {
            let spread = pi
                .weights
                .keys()
                .flat_map(|mu| mu.iter().map(|x| x.unsigned_abs()))
                .max()
                .unwrap_or(0);
            if (*points as u64) <= 2 * spread {
                return Err(Error::Precondition(format!(
                    "torus grid of {points} points cannot resolve weights up to {spread}"
                )));
            }
        }
        RuleKind::MonteCarlo { .. } => {}
        _ => {
            return Err(Error::Precondition(
                "invariant dimension needs a rule on L".into(),
            ))
        }
    }
    let est = quadrature::integrate_estimate(l_rule, |g| pi.eval(g))?;
    round_multiplicity(est)
}

/// π-isotypic component of X ∈ H⊗H̄: d_π ∫ χ̄_π(g) σ(g) X σ(g)* dg.
pub fn isotypic_project(
    rep: &HighestWeightRep,
    pi: &Character,
    x: &CMat,
    rule: &QuadratureRule,
) -> Result<CMat> {
    let d = rep.dim;
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::Shape {
            expected: format!("{d}×{d}"),
            got: format!("{}×{}", x.nrows(), x.ncols()),
        });
    }
    reject_coset(rule, "an isotypic projection")?;
    if rule.exact_degree().is_some() {
        rule.check_degree(2 * rep.weight.degree() + pi.degree())?;
    }
    let dp = pi.dim as f64;
    let leaf = |range: std::ops::Range<usize>| -> Result<CMat> {
        let mut acc = CMat::zeros(d, d);
        for i in range {
            let g = &rule.nodes[i];
            let s = rep.evaluate(g);
            let c = pi.eval(g).conj() * (rule.weights[i] * dp);
            acc += &s * x * s.adjoint() * c;
        }
        Ok(acc)
    };
    let combine = |a: Result<CMat>, b: Result<CMat>| -> Result<CMat> { Ok(a? + b?) };
    let p = par::reduce_pairwise(0..rule.len(), 8, &leaf, &combine)?;
    if p.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("isotypic projection".into()));
    }
    Ok(p)
}

/// v_λ ⊗ v̄_λ as a matrix.
pub fn highest_tensor(rep: &HighestWeightRep) -> CMat {
    let v = rep.highest_vector();
    &v * v.adjoint()
}

/// HS inner product ⟨X, Y⟩ = Tr(Y* X).
pub fn hs_inner(x: &CMat, y: &CMat) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

#[derive(Clone, Debug)]
pub struct IsotypicData {
    pub pi: Weight,
    pub multiplicity: usize,
    /// (v_λ ⊗ v̄_λ)^π as a d×d matrix.
    pub projected: CMat,
    pub norm_sq: f64,
}

pub fn isotypic_data(
    rep: &HighestWeightRep,
    sigma: &Character,
    pi: &Character,
    rule: &QuadratureRule,
) -> Result<IsotypicData> {
    let m = multiplicity(sigma, pi, rule)?;
    let projected = isotypic_project(rep, pi, &highest_tensor(rep), rule)?;
    let norm_sq = linalg::frobenius(&projected).powi(2);
    Ok(IsotypicData {
        pi: pi.weight.clone(),
        multiplicity: m.value,
        projected,
        norm_sq,
    })
}

/// B(S)(x) = ⟨S σ(x)v_λ, σ(x)v_λ⟩.
pub fn berezin_of_operator(
    rep: &HighestWeightRep,
    s: &CMat,
    x: &UnitaryElement,
) -> Result<Complex64> {
    if s.nrows() != rep.dim || s.ncols() != rep.dim {
        return Err(Error::Shape {
            expected: format!("{0}×{0}", rep.dim),
            got: format!("{}×{}", s.nrows(), s.ncols()),
        });
    }
    let w = rep.apply_to_highest(x);
    Ok(w.dotc(&(s * &w)))
}

/// B^λ f(x) = d_λ (f ∗ |Δ^λ|²)(x).
pub fn berezin_of_symbol(
    rep: &HighestWeightRep,
    f: &Symbol,
    x: &UnitaryElement,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    check_rule(rep, f, rule)?;
    let d = rep.dim as f64;
    let lambda = &rep.weight;
    quadrature::convolve_at(
        rule,
        |y| f.eval(y),
        |z| Complex64::new(d * conical_eval(lambda, z.matrix()).norm_sqr(), 0.0),
        x,
    )
}

/// b_π = d_λ ∫ χ̄_π |Δ^λ|² = (d_λ/d_π)‖(v_λ⊗v̄_λ)^π‖², the scalar by which
/// the Berezin transform acts on π-isotypic functions when m(π, σ⊗σ̄) = 1.
pub fn berezin_eigenvalue(
    rep: &HighestWeightRep,
    sigma: &Character,
    pi: &Character,
    rule: &QuadratureRule,
) -> Result<Estimate> {
    let m = multiplicity(sigma, pi, rule)?;
    if m.value != 1 {
        return Err(Error::Unsupported(format!(
            "Berezin eigenvalue needs multiplicity one, found {} for π = {:?}",
            m.value, pi.weight
        )));
    }
    let d = rep.dim as f64;
    let lambda = rep.weight.clone();
    let est = quadrature::integrate_estimate(rule, |g| {
        pi.eval(g).conj() * (d * conical_eval(&lambda, g.matrix()).norm_sqr())
    })?;
    Ok(Estimate {
        value: est.value,
        sigma: est.sigma,
    })
}

/// Both sides of Tr(T_f T_ḡ) = d_λ ⟨B^λ f, g⟩_{L²}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HsPairing {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub sigma: f64,
}

pub fn hs_pairing_check(
    rep: &HighestWeightRep,
    f: &Symbol,
    g: &Symbol,
    rule: &QuadratureRule,
) -> Result<HsPairing> {
    let tf = assemble_toeplitz(rep, f, rule)?;
    let tg = assemble_toeplitz(rep, &g.conj(), rule)?;
    let lhs = linalg::trace(&(&tf.matrix * &tg.matrix));
    let d = rep.dim as f64;
    let est = quadrature::integrate_estimate(rule, |x| {
        let w = rep.apply_to_highest(x);
        w.dotc(&(&tf.matrix * &w)) * g.eval(x).conj() * d
    })?;
    let sigma = est.sigma
        + d * (tf.sigma * linalg::frobenius(&tg.matrix) + tg.sigma * linalg::frobenius(&tf.matrix));
    Ok(HsPairing {
        lhs,
        rhs: est.value,
        residual: (lhs - est.value).norm(),
        sigma,
    })
}

/// C(v⊗w̄)(g) = d_λ ⟨v, σ(g)v_λ⟩ · conj⟨w, σ(g)v_λ⟩.
pub fn embed_tensor_as_symbol(rep: Arc<HighestWeightRep>, v: CVec, w: CVec) -> Result<Symbol> {
    if v.len() != rep.dim || w.len() != rep.dim {
        return Err(Error::Shape {
            expected: format!("vectors of length {}", rep.dim),
            got: format!("{} and {}", v.len(), w.len()),
        });
    }
    let n = rep.n;
    let deg = 2 * (rep.weight.degree() + n * rep.weight.central.unsigned_abs() as usize);
    let blocks = stabilizer_blocks(&rep.weight);
    let d = rep.dim as f64;
    let r = rep.clone();
    let mut s = Symbol::new("embedded_tensor", n, Some(deg), move |g| {
        let a = r.apply_to_highest(g);
        v.dotc(&a) * w.dotc(&a).conj() * d
    });
    s.right_blocks = Some(blocks);
    Ok(s)
}

/// Orthonormal basis vectors e_i of H_λ (coordinates in the built basis).
pub fn basis_vector(dim: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[i] = ONE;
    v
}
