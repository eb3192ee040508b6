//! Fundamental representations as exterior powers of the defining one.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::UnitaryElement;
use crate::linalg::{self, CMat};

/// `Λ^k C^n` with basis `e_I = e_{i_1} ∧ … ∧ e_{i_k}` over increasing
/// k-subsets in lexicographic order, so index 0 is `e_1 ∧ … ∧ e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalRep {
    pub n: usize,
    pub k: usize,
    pub subsets: Vec<Vec<usize>>,
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl FundamentalRep {
    pub fn dim(&self) -> usize {
        self.subsets.len()
    }

    /// Matrix of `Λ^k g`: entry `(I, J)` is the minor on rows I, columns J.
    pub fn eval_matrix(&self, g: &CMat) -> CMat {
        let d = self.dim();
        CMat::from_fn(d, d, |i, j| {
            linalg::minor(g, &self.subsets[i], &self.subsets[j])
        })
    }

    pub fn eval(&self, g: &UnitaryElement) -> CMat {
        self.eval_matrix(g.matrix())
    }

    /// `Λ^k g · (e_1 ∧ … ∧ e_k)`: minors on the first k columns.
    pub fn highest_column(&self, g: &CMat) -> Vec<Complex64> {
        let cols: Vec<usize> = (0..self.k).collect();
        self.subsets
            .iter()
            .map(|rows| linalg::minor(g, rows, &cols))
            .collect()
    }

    /// Weight of basis vector `e_I` in the ε-basis.
    pub fn basis_weight(&self, idx: usize) -> Vec<i64> {
        let mut w = vec![0; self.n];
        for &i in &self.subsets[idx] {
            w[i] = 1;
        }
        w
    }
}

pub fn fundamental_rep(n: usize, k: usize) -> Result<FundamentalRep> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!(
            "fundamental representation needs 1 ≤ k ≤ n, got k={k}, n={n}"
        )));
    }
    Ok(FundamentalRep {
        n,
        k,
        subsets: k_subsets(n, k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::haar_sample;
    use crate::linalg::max_abs;

    #[test]
    fn k1_is_defining_and_kn_is_det() {
        let g = &haar_sample(3, 1, 1)[0];
        let r1 = fundamental_rep(3, 1).unwrap();
        assert!(max_abs(&(r1.eval(g) - g.matrix())) < 1e-14);
        let r3 = fundamental_rep(3, 3).unwrap();
        let m = r3.eval(g);
        assert_eq!(m.nrows(), 1);
        assert!((m[(0, 0)] - g.det()).norm() < 1e-14);
    }

    #[test]
    fn wedge_square_character_is_elementary_symmetric() {
        let r = fundamental_rep(3, 2).unwrap();
        assert_eq!(r.dim(), 3);
        let (a, b, c) = (0.3f64, -1.2f64, 2.0f64);
        let t = UnitaryElement::diagonal(&[a, b, c]);
        let ch = linalg::trace(&r.eval(&t));
        let e = |x: f64| Complex64::from_polar(1.0, x);
        let oracle = e(a) * e(b) + e(a) * e(c) + e(b) * e(c);
        assert!((ch - oracle).norm() < 1e-14);
    }

    #[test]
    fn homomorphism_and_unitarity() {
        let s = haar_sample(4, 3, 10);
        let r = fundamental_rep(4, 2).unwrap();
        for w in s.windows(2) {
            let lhs = r.eval(&w[0].mul(&w[1]));
            let rhs = r.eval(&w[0]) * r.eval(&w[1]);
            assert!(max_abs(&(lhs - rhs)) < 1e-9);
            assert!(linalg::unitarity_residual(&r.eval(&w[0])) < 1e-12);
        }
    }

    #[test]
    fn out_of_range() {
        assert!(fundamental_rep(3, 0).is_err());
        assert!(fundamental_rep(3, 4).is_err());
    }
}
