//! Type-A root and weight combinatorics.
//!
//! Weights live in the ε-basis of the diagonal torus of U(n): the
//! fundamental weight ω_i is e_1 + … + e_i and the determinant character
//! adds its charge to every coordinate.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Root data of U(n) (semisimple rank n − 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDataA {
    pub n: usize,
    pub simple_roots: Vec<Vec<i64>>,
    pub positive_roots: Vec<Vec<i64>>,
    /// Half-sum of positive roots.
    pub rho: Vec<Ratio<i64>>,
    pub fundamental_weights: Vec<Vec<i64>>,
}

impl RootDataA {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("U(0) has no root data".into()));
        }
        let unit = |a: usize| {
            let mut v = vec![0i64; n];
            v[a] = 1;
            v
        };
        let diff = |a: usize, b: usize| {
            let mut v = unit(a);
            v[b] -= 1;
            v
        };
        let simple_roots = (0..n - 1).map(|i| diff(i, i + 1)).collect();
        let mut positive_roots = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                positive_roots.push(diff(a, b));
            }
        }
        let rho = (0..n)
            .map(|a| Ratio::new((n as i64 - 1) - 2 * a as i64, 2))
            .collect();
        let fundamental_weights = (1..n)
            .map(|i| (0..n).map(|a| if a < i { 1 } else { 0 }).collect())
            .collect();
        Ok(Self {
            n,
            simple_roots,
            positive_roots,
            rho,
            fundamental_weights,
        })
    }

    pub fn rank(&self) -> usize {
        self.n - 1
    }

    /// `⟨μ, α^∨⟩` for the trace form, under which α^∨ = α for every root.
    pub fn coroot_pairing(mu: &[i64], alpha: &[i64]) -> i64 {
        mu.iter().zip(alpha).map(|(m, a)| m * a).sum()
    }
}

/// Dominant integral weight: Dynkin coefficients over ω_1..ω_r plus a
/// determinant charge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weight {
    pub coeffs: Vec<i64>,
    #[serde(default)]
    pub central: i64,
}

impl Weight {
    pub fn new(coeffs: Vec<i64>, central: i64) -> Self {
        Self { coeffs, central }
    }

    /// Weight on SU(n) (zero charge).
    pub fn su(coeffs: Vec<i64>) -> Self {
        Self { coeffs, central: 0 }
    }

    /// `m·ω_k` in U(n).
    pub fn multiple_of_fundamental(n: usize, k: usize, m: i64) -> Self {
        let mut coeffs = vec![0; n.saturating_sub(1)];
        if k >= 1 && k <= coeffs.len() {
            coeffs[k - 1] = m;
        }
        Self { coeffs, central: 0 }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            coeffs: vec![0; n.saturating_sub(1)],
            central: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len() + 1
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_dominant(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0)
    }

    pub fn add(&self, other: &Weight) -> Weight {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        Weight {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            central: self.central + other.central,
        }
    }

    /// Diagram flip λ_i ↔ λ_{r+1−i} (highest weight of the contragredient,
    /// up to the central charge).
    pub fn flip(&self) -> Weight {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Weight {
            coeffs,
            central: self.central,
        }
    }

    /// Coordinates in the ε-basis.
    pub fn epsilon(&self) -> Vec<i64> {
        let n = self.n();
        (0..n)
            .map(|a| self.coeffs.iter().skip(a).sum::<i64>() + self.central)
            .collect()
    }

    /// Dynkin labels of an ε-basis vector: `⟨μ, α_i^∨⟩ = μ_i − μ_{i+1}`.
    pub fn dynkin_of(eps: &[i64]) -> Vec<i64> {
        eps.windows(2).map(|w| w[0] - w[1]).collect()
    }

    /// Largest first coordinate-degree, i.e. the total polynomial degree of
    /// the matrix coefficients of σ^λ in the entries of g (ignoring the
    /// determinant twist).
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (i + 1) * c.max(0) as usize)
            .sum()
    }
}

/// Dimension of the irreducible representation with highest weight `λ`,
/// computed exactly in rational arithmetic.
pub fn weyl_dimension(lambda: &Weight, data: &RootDataA) -> Result<u64> {
    if !lambda.is_dominant() {
        return Err(Error::Domain(format!(
            "weight {:?} is not dominant",
            lambda.coeffs
        )));
    }
    if lambda.n() != data.n {
        return Err(Error::Domain(format!(
            "weight has rank {} but root data is for U({})",
            lambda.rank(),
            data.n
        )));
    }
    let eps = lambda.epsilon();
    let to_big =
        |r: &Ratio<i64>| BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
    let mut num = BigRational::one();
    let mut den = BigRational::one();
    for alpha in &data.positive_roots {
        let mut shifted = BigRational::zero();
        let mut base = BigRational::zero();
        for a in 0..data.n {
            let coef = BigRational::from_integer(BigInt::from(alpha[a]));
            shifted +=
                (BigRational::from_integer(BigInt::from(eps[a])) + to_big(&data.rho[a])) * &coef;
            base += to_big(&data.rho[a]) * coef;
        }
        num *= shifted;
        den *= base;
    }
    let q = num / den;
    if !q.is_integer() {
        return Err(Error::Domain("Weyl dimension is not an integer".into()));
    }
    q.to_integer()
        .to_u64()
        .ok_or_else(|| Error::Resource("Weyl dimension overflows u64".into()))
}

/// 1-based indices with non-zero coefficient.
pub fn support(lambda: &Weight) -> BTreeSet<usize> {
    lambda
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, _)| i + 1)
        .collect()
}

/// Block sizes of the Levi subgroup L for the simple-root subset `s`:
/// blocks split after every index not in `s`.
pub fn parabolic_blocks(s: &BTreeSet<usize>, n: usize) -> Vec<usize> {
    let mut blocks = Vec::new();
    let mut current = 0;
    for i in 1..=n {
        current += 1;
        if i == n || !s.contains(&i) {
            blocks.push(current);
            current = 0;
        }
    }
    blocks
}

/// Blocks of L for a weight whose support is Π∖S.
pub fn blocks_for_support(supp: &BTreeSet<usize>, n: usize) -> Vec<usize> {
    let s: BTreeSet<usize> = (1..n).filter(|i| !supp.contains(i)).collect();
    parabolic_blocks(&s, n)
}

/// Closed-form law for one coefficient of a weight family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum CoeffLaw {
    /// `round(a·n^p + b)`
    Power { a: f64, p: f64, b: f64 },
    /// `round(a·(ln n)^q + b)`
    LogPower { a: f64, q: f64, b: f64 },
}

impl CoeffLaw {
    pub fn eval(&self, n: u64) -> f64 {
        let x = n as f64;
        match *self {
            CoeffLaw::Power { a, p, b } => (a * x.powf(p) + b).round(),
            CoeffLaw::LogPower { a, q, b } => (a * x.ln().powf(q) + b).round(),
        }
    }

    fn grows_superlog(&self) -> bool {
        match *self {
            CoeffLaw::Power { a, p, .. } => a > 0.0 && p > 0.0,
            CoeffLaw::LogPower { a, q, .. } => a > 0.0 && q > 1.0,
        }
    }

    fn bounded(&self) -> bool {
        match *self {
            CoeffLaw::Power { a, p, .. } => a == 0.0 || p == 0.0,
            CoeffLaw::LogPower { a, q, .. } => a == 0.0 || q == 0.0,
        }
    }

    fn poly_exponent(&self) -> Option<f64> {
        match *self {
            CoeffLaw::Power { a, p, .. } if a > 0.0 && p > 0.0 => Some(p),
            _ => None,
        }
    }

    fn is_valid(&self) -> bool {
        let finite = |v: f64| v.is_finite();
        match *self {
            CoeffLaw::Power { a, p, b } => {
                finite(a) && finite(p) && finite(b) && a >= 0.0 && p >= 0.0
            }
            CoeffLaw::LogPower { a, q, b } => {
                finite(a) && finite(q) && finite(b) && a >= 0.0 && q >= 0.0
            }
        }
    }
}

/// Sequence `n ↦ λ_n` with a fixed support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightFamily {
    /// Group size of U(n) (not the sequence index).
    pub group_n: usize,
    /// One entry per simple root; `None` means the coefficient is always zero.
    pub laws: Vec<Option<CoeffLaw>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub superlog_ok: bool,
    pub poly_ok: bool,
    /// Witness `C`: `min_n min_supp λ_n / ln n` over `3..=horizon`.
    pub log_constant: f64,
    /// Witness `D` with `max_supp λ_n ≤ n^D`.
    pub poly_exponent: f64,
}

impl WeightFamily {
    pub fn new(group_n: usize, laws: Vec<Option<CoeffLaw>>) -> Result<Self> {
        if laws.len() + 1 != group_n {
            return Err(Error::Domain(format!(
                "U({group_n}) needs {} coefficient laws, got {}",
                group_n - 1,
                laws.len()
            )));
        }
        if laws.iter().flatten().any(|l| !l.is_valid()) {
            return Err(Error::Domain(
                "coefficient laws must be finite with a, p/q ≥ 0".into(),
            ));
        }
        Ok(Self { group_n, laws })
    }

    /// `λ_n = scale·n·ω_k`.
    pub fn linear(group_n: usize, k: usize, scale: f64) -> Self {
        let mut laws = vec![None; group_n - 1];
        laws[k - 1] = Some(CoeffLaw::Power {
            a: scale,
            p: 1.0,
            b: 0.0,
        });
        Self { group_n, laws }
    }

    /// `λ_n = c·ω_k` for all n.
    pub fn constant(group_n: usize, k: usize, c: i64) -> Self {
        let mut laws = vec![None; group_n - 1];
        laws[k - 1] = Some(CoeffLaw::Power {
            a: 0.0,
            p: 0.0,
            b: c as f64,
        });
        Self { group_n, laws }
    }

    /// Declared support Π∖S.
    pub fn support(&self) -> BTreeSet<usize> {
        self.laws
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_some())
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn at(&self, n: u64) -> Weight {
        let coeffs = self
            .laws
            .iter()
            .map(|l| l.map(|l| l.eval(n).max(0.0) as i64).unwrap_or(0))
            .collect();
        Weight { coeffs, central: 0 }
    }

    pub fn growth_check(&self, horizon: u64) -> Result<GrowthReport> {
        if horizon < 10 {
            return Err(Error::Domain(format!(
                "horizon must be ≥ 10, got {horizon}"
            )));
        }
        let active: Vec<CoeffLaw> = self.laws.iter().flatten().copied().collect();
        if active.is_empty() {
            return Err(Error::Domain("weight family has empty support".into()));
        }
        let superlog_ok = active.iter().all(|l| l.grows_superlog());
        let poly_ok = true;

        let mut log_constant = f64::INFINITY;
        let mut empirical_d: f64 = 0.0;
        for n in 2..=horizon {
            let vals: Vec<f64> = active.iter().map(|l| l.eval(n).max(0.0)).collect();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(0.0, f64::max);
            let ln = (n as f64).ln();
            if n >= 3 {
                log_constant = log_constant.min(lo / ln);
            }
            if n >= horizon / 2 && hi >= 1.0 {
                empirical_d = empirical_d.max(hi.ln() / ln);
            }
        }
        let analytic_d = active
            .iter()
            .filter_map(|l| l.poly_exponent())
            .fold(None, |acc: Option<f64>, p| {
                Some(acc.map_or(p, |a| a.max(p)))
            });
        let poly_exponent = match analytic_d {
            Some(d)
                if active
                    .iter()
                    .all(|l| l.poly_exponent().is_some() || l.bounded()) =>
            {
                d
            }
            Some(d) => d.max(empirical_d),
            None => empirical_d.max(f64::MIN_POSITIVE),
        };
        Ok(GrowthReport {
            superlog_ok,
            poly_ok,
            log_constant,
            poly_exponent,
        })
    }
}
