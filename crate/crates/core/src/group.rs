//! Elements of U(n) and SU(n), seeded Haar sampling, subgroup samplers.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ONE, ZERO};

/// Unitarity tolerance certified at construction.
pub const UNITARY_TOL: f64 = 1e-10;

/// An n×n unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryElement {
    m: CMat,
}

impl UnitaryElement {
    /// Certify `m` as unitary to [`UNITARY_TOL`].
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Shape {
                expected: "non-empty square matrix".into(),
                got: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
        let r = linalg::unitarity_residual(&m);
        if !(r <= UNITARY_TOL) {
            return Err(Error::NotUnitary(r));
        }
        Ok(Self { m })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: CMat::identity(n, n),
        }
    }

    pub fn diagonal(phases: &[f64]) -> Self {
        let n = phases.len();
        let mut m = CMat::zeros(n, n);
        for (i, &p) in phases.iter().enumerate() {
            m[(i, i)] = Complex64::from_polar(1.0, p);
        }
        Self { m }
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn mul(&self, other: &UnitaryElement) -> UnitaryElement {
        Self {
            m: &self.m * &other.m,
        }
    }

    pub fn inverse(&self) -> UnitaryElement {
        Self {
            m: self.m.adjoint(),
        }
    }

    /// `self⁻¹ · other`.
    pub fn inv_mul(&self, other: &UnitaryElement) -> UnitaryElement {
        Self {
            m: self.m.adjoint() * &other.m,
        }
    }

    pub fn det(&self) -> Complex64 {
        linalg::det(&self.m)
    }

    pub fn unitarity_residual(&self) -> f64 {
        linalg::unitarity_residual(&self.m)
    }

    /// Rescale by the principal n-th root of the determinant so that det = 1.
    pub fn to_special(&self) -> UnitaryElement {
        let theta = self.det().arg();
        let s = Complex64::from_polar(1.0, -theta / self.n() as f64);
        Self { m: &self.m * s }
    }
}

/// ZYZ Euler angles: `Rz(φ)·Ry(θ)·Rz(ψ)` with `Rz(α) = diag(e^{−iα/2}, e^{iα/2})`.
pub fn su2_from_euler(phi: f64, theta: f64, psi: f64) -> UnitaryElement {
    let (s, c) = (theta / 2.0).sin_cos();
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            e(-(phi + psi) / 2.0) * c,
            -e(-(phi - psi) / 2.0) * s,
            e((phi - psi) / 2.0) * s,
            e((phi + psi) / 2.0) * c,
        ],
    );
    UnitaryElement { m }
}

/// Seeded generator with independent streams.
pub fn rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn gaussian_matrix<R: Rng>(n: usize, rng: &mut R) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// One Haar-distributed element of U(n): QR of a complex Ginibre matrix
/// with the phases of R's diagonal moved into Q.
pub fn haar_unitary<R: Rng>(n: usize, rng: &mut R) -> UnitaryElement {
    let z = gaussian_matrix(n, rng);
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    UnitaryElement { m: q }
}

/// `count` i.i.d. Haar samples of U(n), reproducible per seed.
pub fn haar_sample(n: usize, seed: u64, count: usize) -> Vec<UnitaryElement> {
    let mut r = rng(seed, 0);
    (0..count).map(|_| haar_unitary(n, &mut r)).collect()
}

/// Closed subgroups used as integration domains.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubgroupSpec {
    /// U(n).
    Full { n: usize },
    /// SU(n).
    Special { n: usize },
    /// Diagonal torus of U(n), or of SU(n) when `special`.
    Torus { n: usize, special: bool },
    /// Block-diagonal unitaries `U(b_1)×…×U(b_k)`, intersected with SU(n)
    /// when `special`.
    Block { sizes: Vec<usize>, special: bool },
}

impl SubgroupSpec {
    pub fn n(&self) -> usize {
        match self {
            SubgroupSpec::Full { n }
            | SubgroupSpec::Special { n }
            | SubgroupSpec::Torus { n, .. } => *n,
            SubgroupSpec::Block { sizes, .. } => sizes.iter().sum(),
        }
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        match self {
            SubgroupSpec::Full { n } | SubgroupSpec::Special { n } => vec![*n],
            SubgroupSpec::Torus { n, .. } => vec![1; *n],
            SubgroupSpec::Block { sizes, .. } => sizes.clone(),
        }
    }

    pub fn is_special(&self) -> bool {
        match self {
            SubgroupSpec::Full { .. } => false,
            SubgroupSpec::Special { .. } => true,
            SubgroupSpec::Torus { special, .. } | SubgroupSpec::Block { special, .. } => *special,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n() == 0 {
            return Err(Error::InvalidSubgroup("group size must be ≥ 1".into()));
        }
        if let SubgroupSpec::Block { sizes, .. } = self {
            if sizes.is_empty() || sizes.contains(&0) {
                return Err(Error::InvalidSubgroup(format!(
                    "invalid block sizes {sizes:?}"
                )));
            }
        }
        Ok(())
    }

    /// Whether `g` lies in the subgroup up to `tol`.
    pub fn contains(&self, g: &UnitaryElement, tol: f64) -> bool {
        if g.n() != self.n() {
            return false;
        }
        if self.is_special() && (g.det() - ONE).norm() > tol {
            return false;
        }
        let sizes = self.block_sizes();
        let mut owner = Vec::with_capacity(g.n());
        for (b, &s) in sizes.iter().enumerate() {
            owner.extend(std::iter::repeat_n(b, s));
        }
        for i in 0..g.n() {
            for j in 0..g.n() {
                if owner[i] != owner[j] && g.entry(i, j).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// One Haar sample of the subgroup, embedded block-diagonally.
    pub fn sample_one<R: Rng>(&self, rng: &mut R) -> UnitaryElement {
        let n = self.n();
        let mut m = CMat::from_element(n, n, ZERO);
        let mut off = 0;
        for &b in &self.block_sizes() {
            let u = haar_unitary(b, rng);
            m.view_mut((off, off), (b, b)).copy_from(u.matrix());
            off += b;
        }
        let g = UnitaryElement { m };
        if self.is_special() {
            g.to_special()
        } else {
            g
        }
    }
}

/// `count` Haar samples of the subgroup.
pub fn subgroup_sample(
    spec: &SubgroupSpec,
    seed: u64,
    count: usize,
) -> Result<Vec<UnitaryElement>> {
    spec.validate()?;
    let mut r = rng(seed, 1);
    Ok((0..count).map(|_| spec.sample_one(&mut r)).collect())
}

/// Haar samples of SU(n).
pub fn special_haar_sample(n: usize, seed: u64, count: usize) -> Vec<UnitaryElement> {
    haar_sample(n, seed, count)
        .into_iter()
        .map(|g| g.to_special())
        .collect()
}

/// Uniform angle grid `2πk/m`.
pub fn angle_grid(m: usize) -> Vec<f64> {
    (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_samples_are_unitary() {
        for g in haar_sample(4, 7, 200) {
            assert!(g.unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn haar_sample_is_reproducible() {
        assert_eq!(haar_sample(3, 11, 5), haar_sample(3, 11, 5));
        assert_ne!(haar_sample(3, 11, 5), haar_sample(3, 12, 5));
    }

    #[test]
    fn defining_rep_moments() {
        let n = 3;
        let samples = haar_sample(n, 2024, 100_000);
        let mean: Complex64 = samples.iter().map(|g| g.entry(0, 0)).sum::<Complex64>() / 1e5;
        assert!(mean.norm() < 0.02, "mean g11 = {mean}");
        let m2: f64 = samples
            .iter()
            .map(|g| g.entry(0, 0).norm_sqr())
            .sum::<f64>()
            / 1e5;
        assert!((m2 - 1.0 / n as f64).abs() < 0.01, "E|g11|^2 = {m2}");
    }

    /// Without the phase correction the diagonal of Q is biased towards the
    /// positive reals; this is the guard that the correction is in place.
    #[test]
    fn phase_normalization_removes_diagonal_bias() {
        let samples = haar_sample(2, 99, 50_000);
        let mean_re: f64 = samples.iter().map(|g| g.entry(0, 0).re).sum::<f64>() / 5e4;
        assert!(mean_re.abs() < 0.02);
    }

    #[test]
    fn torus_samples_are_diagonal_unimodular() {
        let spec = SubgroupSpec::Torus {
            n: 3,
            special: false,
        };
        for t in subgroup_sample(&spec, 3, 20).unwrap() {
            for i in 0..3 {
                assert!((t.entry(i, i).norm() - 1.0).abs() < 1e-12);
                for j in 0..3 {
                    if i != j {
                        assert!(t.entry(i, j).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn block_samples_have_block_shape_and_close_under_products() {
        let spec = SubgroupSpec::Block {
            sizes: vec![1, 2],
            special: false,
        };
        let s = subgroup_sample(&spec, 5, 10).unwrap();
        for g in &s {
            assert!(spec.contains(g, 1e-14));
            assert!((g.entry(0, 0).norm() - 1.0).abs() < 1e-12);
            let lower = g.matrix().view((1, 1), (2, 2)).into_owned();
            assert!(linalg::unitarity_residual(&lower) < 1e-12);
        }
        for w in s.windows(2) {
            let p = w[0].mul(&w[1]);
            assert!(spec.contains(&p, 1e-12));
            assert!(p.unitarity_residual() < 1e-10);
        }
    }

    #[test]
    fn special_samples_have_unit_determinant() {
        for g in special_haar_sample(3, 1, 20) {
            assert!((g.det() - ONE).norm() < 1e-12);
        }
        let spec = SubgroupSpec::Torus {
            n: 2,
            special: true,
        };
        for t in subgroup_sample(&spec, 1, 20).unwrap() {
            assert!((t.det() - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn invalid_blocks_are_rejected() {
        let spec = SubgroupSpec::Block {
            sizes: vec![2, 0],
            special: false,
        };
        assert!(matches!(
            subgroup_sample(&spec, 0, 1),
            Err(Error::InvalidSubgroup(_))
        ));
    }

    #[test]
    fn euler_examples() {
        let e = su2_from_euler(0.0, 0.0, 0.0);
        assert!(linalg::max_abs(&(e.matrix() - CMat::identity(2, 2))) < 1e-15);
        let f = su2_from_euler(0.0, PI, 0.0);
        assert!(f.entry(0, 0).norm() < 1e-15 && f.entry(1, 1).norm() < 1e-15);
        assert!((f.entry(0, 1) + ONE).norm() < 1e-15 && (f.entry(1, 0) - ONE).norm() < 1e-15);
        assert!((f.det() - ONE).norm() < 1e-15);
        for (phi, theta, psi) in [(0.3, 1.1, -2.0), (4.0, 2.5, 0.7)] {
            let g = su2_from_euler(phi, theta, psi);
            assert!((g.entry(0, 0).norm() - (theta / 2.0).cos()).abs() < 1e-15);
            assert!((g.det() - ONE).norm() < 1e-14);
        }
    }

    #[test]
    fn non_unitary_rejected() {
        let m = CMat::from_element(2, 2, ONE);
        assert!(matches!(UnitaryElement::new(m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn haar_statistics_are_translation_invariant() {
        let u = haar_sample(3, 77, 1)[0].clone();
        let s = haar_sample(3, 78, 40_000);
        // Compare the first two moments of Re tr(g) and Re tr(u g).
        let stats = |f: &dyn Fn(&UnitaryElement) -> f64| {
            let v: Vec<f64> = s.iter().map(f).collect();
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let m2 = v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
            (m, m2)
        };
        let (a1, a2) = stats(&|g| linalg::trace(g.matrix()).re);
        let (b1, b2) = stats(&|g| linalg::trace(u.mul(g).matrix()).re);
        // E = 0, E[x²] = 1/2; MC σ ≈ 0.0035 and 0.004.
        assert!((a1 - b1).abs() < 0.03 && (a2 - b2).abs() < 0.04);
        assert!((a2 - 0.5).abs() < 0.03);
    }
}
