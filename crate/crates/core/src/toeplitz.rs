//! Symbols and Toeplitz operators on H_λ.
//!
//! T_f = d_λ ∫ f(y) (σ(y)v_λ)(σ(y)v_λ)* dy, assembled by quadrature with a
//! fixed pairwise reduction over the nodes.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::conical::conical_eval;
use crate::error::{Error, Result};
use crate::group::{self, SubgroupSpec, UnitaryElement};
use crate::linalg::{self, CMat, CVec, ONE, ZERO};
use crate::par;
use crate::quadrature::{su2_coset_rule, su2_product_rule, QuadratureRule, RuleKind};
use crate::repr::HighestWeightRep;
use crate::weights::Weight;

/// Tolerance of the invariance spot checks on symbols.
pub const INVARIANCE_TOL: f64 = 1e-8;
/// Number of random pairs used by the invariance spot checks.
pub const INVARIANCE_PAIRS: usize = 20;

pub type SymbolFn = dyn Fn(&UnitaryElement) -> Complex64 + Send + Sync;

/// A scalar function on U(n) with declared invariances.
#[derive(Clone)]
pub struct Symbol {
    pub id: String,
    pub n: usize,
    /// Total polynomial degree in the entries of g and ḡ, when polynomial.
    pub degree: Option<usize>,
    /// Blocks of a subgroup L with f(gl) = f(g).
    pub right_blocks: Option<Vec<usize>>,
    /// Subgroup H with f(hg) = f(g).
    pub left_invariant: Option<SubgroupSpec>,
    f: Arc<SymbolFn>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("id", &self.id)
            .field("n", &self.n)
            .field("degree", &self.degree)
            .field("right_blocks", &self.right_blocks)
            .field("left_invariant", &self.left_invariant)
            .finish()
    }
}

fn check_seed(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    })
}

impl Symbol {
    pub fn new<F>(id: impl Into<String>, n: usize, degree: Option<usize>, f: F) -> Self
    where
        F: Fn(&UnitaryElement) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            id: id.into(),
            n,
            degree,
            right_blocks: None,
            left_invariant: None,
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, g: &UnitaryElement) -> Complex64 {
        (self.f)(g)
    }

    /// Declare right-L-invariance, spot-checked on random pairs.
    pub fn with_right_invariance(mut self, blocks: Vec<usize>) -> Result<Self> {
        let spec = SubgroupSpec::Block {
            sizes: blocks.clone(),
            special: false,
        };
        spec.validate()?;
        if spec.n() != self.n {
            return Err(Error::InvalidSubgroup(format!(
                "blocks {blocks:?} do not partition {}",
                self.n
            )));
        }
        let mut r = group::rng(check_seed(&self.id), 101);
        for _ in 0..INVARIANCE_PAIRS {
            let g = group::haar_unitary(self.n, &mut r);
            let l = spec.sample_one(&mut r);
            let gap = (self.eval(&g.mul(&l)) - self.eval(&g)).norm();
            if !(gap <= INVARIANCE_TOL) {
                return Err(Error::Precondition(format!(
                    "symbol {} is not right-invariant under blocks {blocks:?}: gap {gap:e}",
                    self.id
                )));
            }
        }
        self.right_blocks = Some(blocks);
        Ok(self)
    }

    /// Declare left-H-invariance, spot-checked on random pairs.
    pub fn with_left_invariance(mut self, h: SubgroupSpec) -> Result<Self> {
        h.validate()?;
        if h.n() != self.n {
            return Err(Error::InvalidSubgroup(
                "subgroup size does not match the symbol".into(),
            ));
        }
        let mut r = group::rng(check_seed(&self.id), 102);
        for _ in 0..INVARIANCE_PAIRS {
            let g = group::haar_unitary(self.n, &mut r);
            let x = h.sample_one(&mut r);
            let gap = (self.eval(&x.mul(&g)) - self.eval(&g)).norm();
            if !(gap <= INVARIANCE_TOL) {
                return Err(Error::Precondition(format!(
                    "symbol {} is not left-invariant under {h:?}: gap {gap:e}",
                    self.id
                )));
            }
        }
        self.left_invariant = Some(h);
        Ok(self)
    }

    pub fn is_right_torus_invariant(&self) -> bool {
        self.right_blocks.is_some()
    }

    pub fn conj(&self) -> Symbol {
        let f = self.f.clone();
        Symbol {
            id: format!("conj({})", self.id),
            f: Arc::new(move |g| f(g).conj()),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: Complex64) -> Symbol {
        let f = self.f.clone();
        let degree = if c == ZERO { Some(0) } else { self.degree };
        Symbol {
            id: format!("{c}*{}", self.id),
            degree,
            f: Arc::new(move |g| c * f(g)),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Symbol) -> Symbol {
        let (f, h) = (self.f.clone(), other.f.clone());
        Symbol {
            id: format!("({})+({})", self.id, other.id),
            n: self.n,
            degree: self.degree.zip(other.degree).map(|(a, b)| a.max(b)),
            right_blocks: common_blocks(&self.right_blocks, &other.right_blocks),
            left_invariant: (self.left_invariant == other.left_invariant)
                .then(|| self.left_invariant.clone())
                .flatten(),
            f: Arc::new(move |g| f(g) + h(g)),
        }
    }

    pub fn mul(&self, other: &Symbol) -> Symbol {
        let (f, h) = (self.f.clone(), other.f.clone());
        Symbol {
            id: format!("({})*({})", self.id, other.id),
            n: self.n,
            degree: self.degree.zip(other.degree).map(|(a, b)| a + b),
            right_blocks: common_blocks(&self.right_blocks, &other.right_blocks),
            left_invariant: (self.left_invariant == other.left_invariant)
                .then(|| self.left_invariant.clone())
                .flatten(),
            f: Arc::new(move |g| f(g) * h(g)),
        }
    }

    /// (L(x)f)(g) = f(x⁻¹g). Right invariance is preserved.
    pub fn left_translate(&self, x: &UnitaryElement) -> Symbol {
        let f = self.f.clone();
        let xi = x.inverse();
        Symbol {
            id: format!("L(x){}", self.id),
            left_invariant: None,
            f: Arc::new(move |g| f(&xi.mul(g))),
            ..self.clone()
        }
    }
}

fn common_blocks(a: &Option<Vec<usize>>, b: &Option<Vec<usize>>) -> Option<Vec<usize>> {
    match (a, b) {
        (Some(x), Some(y)) if x == y => Some(x.clone()),
        // Both invariant under some blocks: both are at least T-invariant.
        (Some(x), Some(_)) => Some(vec![1; x.iter().sum()]),
        _ => None,
    }
}

/// Built-in symbols.
pub mod builtin {
    use super::*;

    pub fn constant(n: usize, c: f64) -> Symbol {
        let mut s = Symbol::new(format!("const({c})"), n, Some(0), move |_| {
            Complex64::new(c, 0.0)
        });
        s.right_blocks = Some(vec![n]);
        s.left_invariant = Some(SubgroupSpec::Full { n });
        s
    }

    /// |g₁₁|²: right-invariant under U(1)×U(n−1), left-invariant under T.
    pub fn abs_g11_sq(n: usize) -> Symbol {
        abs_g11_pow(n, 1)
    }

    /// |g₁₁|^{2p}.
    pub fn abs_g11_pow(n: usize, p: u32) -> Symbol {
        let id = if p == 1 {
            "abs_g11_sq".to_string()
        } else {
            format!("abs_g11_pow({p})")
        };
        let mut s = Symbol::new(id, n, Some(2 * p as usize), move |g| {
            Complex64::new(g.entry(0, 0).norm_sqr().powi(p as i32), 0.0)
        });
        s.right_blocks = Some(if n > 1 { vec![1, n - 1] } else { vec![1] });
        s.left_invariant = Some(SubgroupSpec::Torus { n, special: false });
        s
    }

    pub fn re_g12(n: usize) -> Symbol {
        Symbol::new("re_g12", n, Some(1), |g| {
            Complex64::new(g.entry(0, 1).re, 0.0)
        })
    }

    pub fn im_g12(n: usize) -> Symbol {
        Symbol::new("im_g12", n, Some(1), |g| {
            Complex64::new(g.entry(0, 1).im, 0.0)
        })
    }

    /// Re(g₁₁ḡ₂₁): right-invariant under U(1)×U(n−1) but not left-T-invariant.
    pub fn re_g11_g21bar(n: usize) -> Symbol {
        let mut s = Symbol::new("re_g11_g21bar", n, Some(2), |g| {
            Complex64::new((g.entry(0, 0) * g.entry(1, 0).conj()).re, 0.0)
        });
        s.right_blocks = Some(vec![1, n - 1]);
        s
    }

    /// Im(g₁₁ḡ₂₁).
    pub fn im_g11_g21bar(n: usize) -> Symbol {
        let mut s = Symbol::new("im_g11_g21bar", n, Some(2), |g| {
            Complex64::new((g.entry(0, 0) * g.entry(1, 0).conj()).im, 0.0)
        });
        s.right_blocks = Some(vec![1, n - 1]);
        s
    }

    pub fn g11(n: usize) -> Symbol {
        Symbol::new("g11", n, Some(1), |g| g.entry(0, 0))
    }

    /// |Δ^μ|², right-invariant under the stabilizer of μ.
    pub fn conical_abs_sq(mu: &Weight) -> Symbol {
        let n = mu.n();
        let w = mu.clone();
        let deg = 2 * (mu.degree() + n * mu.central.unsigned_abs() as usize);
        let mut s = Symbol::new(
            format!("conical_abs_sq({:?})", mu.coeffs),
            n,
            Some(deg),
            move |g| Complex64::new(conical_eval(&w, g.matrix()).norm_sqr(), 0.0),
        );
        s.right_blocks = Some(crate::conical::stabilizer_blocks(mu));
        s
    }

    /// Smooth step `1/(1+exp(−κ(|g₁₁|²−τ)))`; not polynomial.
    pub fn sigmoid_abs_g11_sq(n: usize, tau: f64, steepness: f64) -> Symbol {
        let mut s = Symbol::new(
            format!("sigmoid_abs_g11_sq({tau},{steepness})"),
            n,
            None,
            move |g| {
                let x = g.entry(0, 0).norm_sqr();
                Complex64::new(1.0 / (1.0 + (-steepness * (x - tau)).exp()), 0.0)
            },
        );
        s.right_blocks = Some(if n > 1 { vec![1, n - 1] } else { vec![1] });
        s.left_invariant = Some(SubgroupSpec::Torus { n, special: false });
        s
    }
}

/// g ↦ ⟨u, π(g) v₀⟩ for an auxiliary representation π.
pub fn matrix_coefficient_symbol(
    aux: Arc<HighestWeightRep>,
    u: CVec,
    v0: CVec,
    id: &str,
) -> Result<Symbol> {
    if u.len() != aux.dim || v0.len() != aux.dim {
        return Err(Error::Shape {
            expected: format!("vectors of length {}", aux.dim),
            got: format!("{} and {}", u.len(), v0.len()),
        });
    }
    let n = aux.n;
    let deg = aux.weight.degree() + n * aux.weight.central.unsigned_abs() as usize;
    let uu = u.clone();
    Ok(Symbol::new(id, n, Some(deg), move |g| {
        uu.dotc(&(aux.evaluate(g) * &v0))
    }))
}

/// A Toeplitz operator in the built basis of a [`HighestWeightRep`].
#[derive(Clone, Debug)]
pub struct ToeplitzOperator {
    pub weight: Weight,
    pub matrix: CMat,
    pub symbol_id: String,
    pub rule: RuleKind,
    /// Monte Carlo standard error of the matrix in Frobenius norm (0 for
    /// exact rules).
    pub sigma: f64,
}

impl ToeplitzOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn op_norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }
}

/// Quadrature degree needed to assemble T_f exactly on SU(2).
pub fn required_degree(rep: &HighestWeightRep, f: &Symbol) -> Result<usize> {
    let deg = f.degree.ok_or_else(|| {
        Error::Precondition(format!("symbol {} declares no polynomial degree", f.id))
    })?;
    Ok(2 * rep.weight.degree() + deg)
}

/// Check that `rule` can assemble T_f for `rep`.
pub fn check_rule(rep: &HighestWeightRep, f: &Symbol, rule: &QuadratureRule) -> Result<()> {
    if rule.group_n() != rep.n || f.n != rep.n {
        return Err(Error::Precondition(format!(
            "rule on U({}) and symbol on U({}) for a representation of U({})",
            rule.group_n(),
            f.n,
            rep.n
        )));
    }
    if rule.exact_degree().is_some() {
        rule.check_degree(required_degree(rep, f)?)?;
    }
    if rule.requires_right_torus_invariance() && !f.is_right_torus_invariant() {
        return Err(Error::Precondition(format!(
            "coset rule needs a right-T-invariant symbol; {} declares none",
            f.id
        )));
    }
    Ok(())
}

/// The cheapest exact SU(2) rule for T_f: the coset rule for right-T-
/// invariant symbols, the full product rule otherwise.
pub fn su2_rule_for(rep: &HighestWeightRep, f: &Symbol) -> Result<QuadratureRule> {
    let deg = required_degree(rep, f)?;
    Ok(if f.is_right_torus_invariant() {
        su2_coset_rule(deg)
    } else {
        su2_product_rule(deg)
    })
}

struct Partial {
    mat: CMat,
    sq: f64,
}

/// T_f = Σᵢ wᵢ d_λ f(gᵢ) (σ(gᵢ)v_λ)(σ(gᵢ)v_λ)*.
pub fn assemble_toeplitz(
    rep: &HighestWeightRep,
    f: &Symbol,
    rule: &QuadratureRule,
) -> Result<ToeplitzOperator> {
    check_rule(rep, f, rule)?;
    let d = rep.dim;
    let df = d as f64;
    let leaf = |range: std::ops::Range<usize>| -> Result<Partial> {
        let mut mat = CMat::zeros(d, d);
        let mut sq = 0.0;
        for i in range {
            let g = &rule.nodes[i];
            let fv = f.eval(g);
            if !(fv.re.is_finite() && fv.im.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "symbol {} is {fv} at node {i}",
                    f.id
                )));
            }
            let w = rep.apply_to_highest(g);
            let c = fv * (rule.weights[i] * df);
            mat.gerc(c, &w, &w, ONE);
            sq += fv.norm_sqr();
        }
        Ok(Partial { mat, sq })
    };
    let combine = |a: Result<Partial>, b: Result<Partial>| -> Result<Partial> {
        let (a, b) = (a?, b?);
        Ok(Partial {
            mat: a.mat + b.mat,
            sq: a.sq + b.sq,
        })
    };
    let p = par::reduce_pairwise(0..rule.len(), par::MATRIX_LEAF, &leaf, &combine)?;
    let sigma = if rule.is_monte_carlo() {
        // Each node contributes d·f(g) times a rank-one projector of unit
        // Frobenius norm.
        let n = rule.len() as f64;
        let second = df * df * p.sq / n;
        let first = linalg::frobenius(&p.mat).powi(2);
        ((second - first).max(0.0) / (n - 1.0).max(1.0)).sqrt()
    } else {
        0.0
    };
    Ok(ToeplitzOperator {
        weight: rep.weight.clone(),
        matrix: p.mat,
        symbol_id: f.id.clone(),
        rule: rule.kind.clone(),
        sigma,
    })
}

/// f^#_L(x) = ∫_L f(xl) dl with an L-rule (torus grid or Monte Carlo on L).
pub fn average_symbol_l(
    f: &Symbol,
    blocks: Vec<usize>,
    l_rule: Arc<QuadratureRule>,
) -> Result<Symbol> {
    if blocks.iter().sum::<usize>() != f.n || l_rule.group_n() != f.n {
        return Err(Error::InvalidSubgroup(format!(
            "blocks {blocks:?} do not match U({})",
            f.n
        )));
    }
    let h = f.f.clone();
    let rule = l_rule.clone();
    Ok(Symbol {
        id: format!("avgL({})", f.id),
        n: f.n,
        degree: f.degree,
        right_blocks: Some(blocks),
        left_invariant: f.left_invariant.clone(),
        f: Arc::new(move |x| {
            par::sum_by(rule.len(), |i| h(&x.mul(&rule.nodes[i])) * rule.weights[i])
        }),
    })
}

/// f^H(x) = ∫_H f(hx) dh.
pub fn average_symbol_h(
    f: &Symbol,
    h_spec: SubgroupSpec,
    h_rule: Arc<QuadratureRule>,
) -> Result<Symbol> {
    h_spec.validate()?;
    if h_spec.n() != f.n || h_rule.group_n() != f.n {
        return Err(Error::InvalidSubgroup(
            "subgroup size does not match the symbol".into(),
        ));
    }
    let h = f.f.clone();
    let rule = h_rule.clone();
    Ok(Symbol {
        id: format!("avgH({})", f.id),
        n: f.n,
        degree: f.degree,
        right_blocks: f.right_blocks.clone(),
        left_invariant: Some(h_spec),
        f: Arc::new(move |x| {
            par::sum_by(rule.len(), |i| h(&rule.nodes[i].mul(x)) * rule.weights[i])
        }),
    })
}

/// ‖T_{L(x)f} − σ(x) T_f σ(x)⁻¹‖_op and the combined Frobenius σ of the two
/// assemblies.
pub fn equivariance_residual(
    rep: &HighestWeightRep,
    f: &Symbol,
    x: &UnitaryElement,
    rule: &QuadratureRule,
) -> Result<(f64, f64)> {
    let t = assemble_toeplitz(rep, f, rule)?;
    let tx = assemble_toeplitz(rep, &f.left_translate(x), rule)?;
    let rx = rep.evaluate(x);
    let conj = &rx * &t.matrix * rx.adjoint();
    Ok((linalg::op_norm(&(tx.matrix - conj)), t.sigma + tx.sigma))
}

/// ‖AB − BA‖_op.
pub fn commutator_norm(a: &ToeplitzOperator, b: &ToeplitzOperator) -> Result<f64> {
    if a.dim() != b.dim() || a.weight != b.weight {
        return Err(Error::Shape {
            expected: format!("operator on the same space ({})", a.dim()),
            got: format!("dimension {}", b.dim()),
        });
    }
    Ok(linalg::op_norm(
        &(&a.matrix * &b.matrix - &b.matrix * &a.matrix),
    ))
}

/// Rank of span{T_f} inside End(H_λ), tolerance 10⁻⁸ times the top singular
/// value.
pub fn quantization_rank(
    rep: &HighestWeightRep,
    symbols: &[Symbol],
    rule: &QuadratureRule,
) -> Result<usize> {
    if symbols.is_empty() {
        return Ok(0);
    }
    for s in symbols {
        if s.right_blocks.is_none() {
            return Err(Error::Precondition(format!(
                "symbol {} is not declared right-L-invariant",
                s.id
            )));
        }
    }
    let ops: Vec<Result<ToeplitzOperator>> =
        par::map_collect(symbols, |s| assemble_toeplitz(rep, s, rule));
    let d = rep.dim;
    let mut m = CMat::zeros(d * d, symbols.len());
    for (j, op) in ops.into_iter().enumerate() {
        let op = op?;
        for (i, z) in op.matrix.iter().enumerate() {
            m[(i, j)] = *z;
        }
    }
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s > 1e-8 * top).count())
}
