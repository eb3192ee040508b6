//! Orthonormal realizations of irreducible representations σ^λ of U(n).
//!
//! σ^λ is realized inside the ambient space `⊗_k Sym^{λ_k}(Λ^k C^n)`, which
//! contains the highest tensor vector `⊗_k (e_1∧…∧e_k)^{⊗λ_k}`. The
//! irreducible subspace is the cyclic span of that vector under the group,
//! found by orthonormalizing random translates and certified afterwards.

mod exterior;
mod symmetric;

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

pub use exterior::{fundamental_rep, FundamentalRep};
pub use symmetric::{sym_dim, SymPower};

use crate::error::{Error, Result};
use crate::group::{self, UnitaryElement};
use crate::linalg::{self, CMat, CVec, ONE};
use crate::weights::{weyl_dimension, RootDataA, Weight};

#[derive(Clone, Debug)]
pub struct BuildOptions {
    /// Largest admissible Weyl dimension.
    pub dim_cap: u64,
    /// Largest admissible ambient tensor dimension.
    pub ambient_cap: usize,
    pub seed: u64,
    /// Relative rank tolerance (times the largest singular value).
    pub rank_tol: f64,
    pub cert_tol: f64,
    pub cert_samples: usize,
    /// Sampling rounds before giving up on reaching the Weyl dimension.
    pub max_rounds: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            dim_cap: 512,
            ambient_cap: 20_000,
            seed: 0x5eed_1a7e,
            rank_tol: 1e-8,
            cert_tol: 1e-9,
            cert_samples: 20,
            max_rounds: 4,
        }
    }
}

#[derive(Clone, Debug)]
struct Factor {
    fund: FundamentalRep,
    sym: SymPower,
}

impl Factor {
    fn dim(&self) -> usize {
        self.sym.dim()
    }
}

/// Outcome of the a-posteriori invariance certification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certification {
    pub invariance_residual: f64,
    pub samples: usize,
    pub cyclic_vectors: usize,
}

/// One weight space: ε-basis weight and an orthonormal basis (columns, in
/// the coordinates of the built representation).
#[derive(Clone, Debug)]
pub struct WeightSpace {
    pub weight: Vec<i64>,
    pub vectors: CMat,
}

#[derive(Clone, Debug)]
pub struct HighestWeightRep {
    pub weight: Weight,
    pub n: usize,
    pub dim: usize,
    factors: Vec<Factor>,
    ambient_dim: usize,
    /// Ambient coordinates of the orthonormal basis; column 0 is v_λ.
    basis: CMat,
    basis_adj: CMat,
    pub certification: Certification,
}

fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Principal `2^s`-th root of a unitary matrix and the eigen-angle bound.
fn unitary_root(g: &CMat, s: u32) -> CMat {
    if s == 0 {
        return g.clone();
    }
    let (q, t) = g.clone().schur().unpack();
    let scale = 2f64.powi(s as i32);
    let n = g.nrows();
    let mut d = CMat::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = Complex64::from_polar(1.0, t[(i, i)].arg() / scale);
    }
    &q * d * q.adjoint()
}

fn max_eigen_angle(g: &CMat) -> f64 {
    let t = g.clone().schur().unpack().1;
    (0..g.nrows())
        .map(|i| t[(i, i)].arg().abs())
        .fold(0.0, f64::max)
}

impl HighestWeightRep {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Ambient coordinates of the basis (columns).
    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    fn central_factor(&self, g: &CMat) -> Complex64 {
        if self.weight.central == 0 {
            ONE
        } else {
            linalg::det(g).powi(self.weight.central as i32)
        }
    }

    /// Ambient image of the highest tensor vector under `g`.
    fn ambient_highest(&self, g: &CMat) -> Vec<Complex64> {
        let mut acc = vec![ONE];
        for f in &self.factors {
            let col = f.fund.highest_column(g);
            acc = kron_vec(&acc, &f.sym.power_vector(&col));
        }
        acc
    }

    /// Full ambient action. Computed from a `2^s`-th root of `g` close to
    /// the identity followed by repeated squaring, which keeps the
    /// polynomial expansion free of cancellation for large weights.
    pub fn ambient_matrix(&self, g: &CMat) -> CMat {
        let top = self
            .factors
            .iter()
            .map(|f| (f.sym.degree * f.fund.k) as f64)
            .fold(0.0, f64::max);
        let spread = top * max_eigen_angle(g);
        let s = if spread > 1.0 {
            spread.log2().ceil() as u32
        } else {
            0
        };
        let root = unitary_root(g, s);
        let mut acc = CMat::from_element(1, 1, ONE);
        for f in &self.factors {
            let wedge = f.fund.eval_matrix(&root);
            let m = f.sym.matrix_from_root(&wedge, s);
            acc = acc.kronecker(&m);
        }
        acc
    }

    /// `σ^λ(g)` in the built basis.
    pub fn evaluate(&self, g: &UnitaryElement) -> CMat {
        let a = self.ambient_matrix(g.matrix());
        &self.basis_adj * a * &self.basis * self.central_factor(g.matrix())
    }

    /// `σ^λ(g)·v_λ` in the built basis.
    pub fn apply_to_highest(&self, g: &UnitaryElement) -> CVec {
        let w = DVector::from_vec(self.ambient_highest(g.matrix()));
        &self.basis_adj * w * self.central_factor(g.matrix())
    }

    /// Coordinates of v_λ.
    pub fn highest_vector(&self) -> CVec {
        let mut v = CVec::zeros(self.dim);
        v[0] = ONE;
        v
    }

    pub fn character(&self, g: &UnitaryElement) -> Complex64 {
        linalg::trace(&self.evaluate(g))
    }

    /// Character from the weight multiplicities and the eigenvalues of `g`
    /// (a class-function shortcut for heavy integration loops).
    pub fn class_character(
        &self,
        g: &UnitaryElement,
        weights: &BTreeMap<Vec<i64>, usize>,
    ) -> Complex64 {
        let t = g.matrix().clone().schur().unpack().1;
        let eig: Vec<Complex64> = (0..g.n()).map(|i| t[(i, i)]).collect();
        weights
            .iter()
            .map(|(mu, &m)| {
                let mut z = Complex64::new(m as f64, 0.0);
                for (a, &p) in mu.iter().enumerate() {
                    z *= eig[a].powi(p as i32);
                }
                z
            })
            .sum()
    }

    fn ambient_weights(&self) -> Vec<Vec<i64>> {
        let mut acc: Vec<Vec<i64>> = vec![vec![self.weight.central; self.n]];
        for f in &self.factors {
            let var_w: Vec<Vec<i64>> = (0..f.fund.dim()).map(|i| f.fund.basis_weight(i)).collect();
            let fw: Vec<Vec<i64>> = (0..f.dim())
                .map(|i| f.sym.basis_weight(i, &var_w))
                .collect();
            let mut next = Vec::with_capacity(acc.len() * fw.len());
            for a in &acc {
                for b in &fw {
                    next.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
                }
            }
            acc = next;
        }
        acc
    }

    /// Images of the torus generators `i·d/dθ σ(exp(iθE_aa))`, one per
    /// diagonal coordinate.
    pub fn torus_generators(&self) -> Vec<CMat> {
        let w = self.ambient_weights();
        (0..self.n)
            .map(|a| {
                let mut scaled = self.basis.clone();
                for (r, wr) in w.iter().enumerate() {
                    let s = wr[a] as f64;
                    for c in 0..self.dim {
                        scaled[(r, c)] *= s;
                    }
                }
                &self.basis_adj * scaled
            })
            .collect()
    }

    /// Weight-space decomposition by simultaneous diagonalization of the
    /// torus generators.
    pub fn weight_spaces(&self) -> Result<Vec<WeightSpace>> {
        let gens = self.torus_generators();
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                let c = &gens[i] * &gens[j] - &gens[j] * &gens[i];
                let r = linalg::max_abs(&c);
                if r > 1e-8 {
                    return Err(Error::Construction(format!(
                        "torus images fail to commute: {r:e}"
                    )));
                }
            }
        }
        // Rationally independent coefficients separate distinct integer weights.
        let primes = [2.0f64, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0, 23.0, 29.0];
        let mut k = CMat::zeros(self.dim, self.dim);
        for (a, h) in gens.iter().enumerate() {
            let c = if a == 0 {
                1.0
            } else {
                primes[(a - 1) % primes.len()].sqrt()
            };
            k += h * Complex64::new(c, 0.0);
        }
        let k = (&k + k.adjoint()) * Complex64::new(0.5, 0.0);
        let (_, vecs) = linalg::hermitian_eigen(&k);
        let mut groups: BTreeMap<Vec<i64>, Vec<CVec>> = BTreeMap::new();
        for c in 0..self.dim {
            let v = vecs.column(c).into_owned();
            let mut mu = Vec::with_capacity(self.n);
            for h in &gens {
                let x = v.dotc(&(h * &v)).re;
                let r = x.round();
                if (x - r).abs() > 1e-6 {
                    return Err(Error::Construction(format!(
                        "non-integral weight component {x}"
                    )));
                }
                mu.push(r as i64);
            }
            groups.entry(mu).or_default().push(v);
        }
        Ok(groups
            .into_iter()
            .map(|(weight, vs)| WeightSpace {
                weight,
                vectors: CMat::from_columns(&vs),
            })
            .collect())
    }

    /// Weight → multiplicity, weights in the ε-basis.
    pub fn weight_multiplicities(&self) -> Result<BTreeMap<Vec<i64>, usize>> {
        Ok(self
            .weight_spaces()?
            .into_iter()
            .map(|s| (s.weight, s.vectors.ncols()))
            .collect())
    }

    /// Orthonormal basis of the vectors of weight `mu` (ε-basis).
    pub fn weight_vectors(&self, mu: &[i64]) -> Result<CMat> {
        Ok(self
            .weight_spaces()?
            .into_iter()
            .find(|s| s.weight == mu)
            .map(|s| s.vectors)
            .unwrap_or_else(|| CMat::zeros(self.dim, 0)))
    }

    /// Orthonormal basis of the vectors whose Dynkin labels vanish.
    pub fn zero_weight_vectors(&self) -> Result<CMat> {
        let spaces = self.weight_spaces()?;
        let cols: Vec<CVec> = spaces
            .into_iter()
            .filter(|s| Weight::dynkin_of(&s.weight).iter().all(|&x| x == 0))
            .flat_map(|s| {
                (0..s.vectors.ncols())
                    .map(move |c| s.vectors.column(c).into_owned())
                    .collect::<Vec<_>>()
            })
            .collect();
        if cols.is_empty() {
            return Ok(CMat::zeros(self.dim, 0));
        }
        Ok(CMat::from_columns(&cols))
    }
}

fn largest_singular_value(m: &CMat) -> f64 {
    if m.ncols() == 0 {
        return 0.0;
    }
    let mut v = CVec::from_element(m.ncols(), Complex64::new(1.0, 0.0));
    let mut s = 0.0;
    for _ in 0..60 {
        let w = m.adjoint() * (m * &v);
        let nrm = w.norm();
        if nrm == 0.0 {
            return 0.0;
        }
        s = nrm.sqrt();
        v = w / Complex64::new(nrm, 0.0);
    }
    s
}

/// Build σ^λ for U(n) as the certified cyclic span of the highest tensor vector.
pub fn build_irrep(lambda: &Weight, n: usize, opts: &BuildOptions) -> Result<HighestWeightRep> {
    if lambda.n() != n {
        return Err(Error::Domain(format!(
            "weight of rank {} is not a weight of U({n})",
            lambda.rank()
        )));
    }
    let data = RootDataA::new(n)?;
    let d = weyl_dimension(lambda, &data)?;
    if d > opts.dim_cap {
        return Err(Error::Resource(format!(
            "dimension {d} exceeds cap {}",
            opts.dim_cap
        )));
    }
    let d = d as usize;
    let mut factors = Vec::new();
    let mut ambient_dim = 1usize;
    for (i, &m) in lambda.coeffs.iter().enumerate() {
        if m > 0 {
            let fund = fundamental_rep(n, i + 1)?;
            let sd = sym_dim(fund.dim(), m as usize);
            ambient_dim = ambient_dim.saturating_mul(sd);
            if ambient_dim > opts.ambient_cap {
                return Err(Error::Resource(format!(
                    "ambient dimension exceeds cap {}",
                    opts.ambient_cap
                )));
            }
            factors.push(Factor {
                sym: SymPower::new(fund.dim(), m as usize),
                fund,
            });
        }
    }

    let mut rep = HighestWeightRep {
        weight: lambda.clone(),
        n,
        dim: d,
        factors,
        ambient_dim,
        basis: CMat::zeros(ambient_dim, 0),
        basis_adj: CMat::zeros(0, ambient_dim),
        certification: Certification {
            invariance_residual: f64::NAN,
            samples: 0,
            cyclic_vectors: 0,
        },
    };

    let mut r = group::rng(opts.seed, 17);
    let batch = (2 * d).max(d + 8);
    let mut cols: Vec<CVec> = Vec::new();
    let mut e0 = CVec::zeros(ambient_dim);
    e0[0] = ONE;
    cols.push(e0);
    let mut basis = CMat::zeros(ambient_dim, 0);
    for _round in 0..opts.max_rounds {
        for _ in 0..batch {
            let g = group::haar_unitary(n, &mut r);
            cols.push(DVector::from_vec(rep.ambient_highest(g.matrix())));
        }
        let m = CMat::from_columns(&cols);
        let smax = largest_singular_value(&m);
        basis = linalg::pivoted_orthonormalize(&m, &[0], opts.rank_tol, smax);
        if basis.ncols() >= d {
            break;
        }
    }
    if basis.ncols() != d {
        return Err(Error::Construction(format!(
            "cyclic span has dimension {} but the Weyl dimension is {d} (after {} vectors)",
            basis.ncols(),
            cols.len()
        )));
    }
    rep.basis_adj = basis.adjoint();
    rep.basis = basis;

    let mut worst: f64 = 0.0;
    for _ in 0..opts.cert_samples {
        let g = group::haar_unitary(n, &mut r);
        let ab = rep.ambient_matrix(g.matrix()) * &rep.basis;
        let proj = &rep.basis * (&rep.basis_adj * &ab);
        worst = worst.max(linalg::max_abs(&(ab - proj)));
    }
    if !(worst <= opts.cert_tol) {
        return Err(Error::Construction(format!(
            "span is not invariant: residual {worst:e} > {:e}",
            opts.cert_tol
        )));
    }
    rep.certification = Certification {
        invariance_residual: worst,
        samples: opts.cert_samples,
        cyclic_vectors: cols.len() - 1,
    };
    Ok(rep)
}

/// Convenience: build with default options.
pub fn irrep(lambda: &Weight) -> Result<HighestWeightRep> {
    build_irrep(lambda, lambda.n(), &BuildOptions::default())
}

/// Random unit vector of the given dimension.
pub fn random_unit_vector<R: Rng>(dim: usize, rng: &mut R) -> CVec {
    let v = CVec::from_fn(dim, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}
