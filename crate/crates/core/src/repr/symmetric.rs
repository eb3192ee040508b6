//! Symmetric powers `Sym^m(C^N)` in the orthonormal monomial basis
//! `u_β = sqrt(m!/β!)·x^β`.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::linalg::{CMat, ZERO};

#[derive(Clone, Debug)]
pub struct SymPower {
    pub vars: usize,
    pub degree: usize,
    /// Exponent vectors per degree level, lexicographically descending, so
    /// `levels[m][0] = (m, 0, …, 0)`.
    levels: Vec<Vec<Vec<u16>>>,
    /// `up[k][idx * vars + i]`: index in level k+1 of `x_i · monomial(idx)`.
    up: Vec<Vec<usize>>,
    /// `Σ_j ln β_j!` for the top level.
    log_fact: Vec<f64>,
    ln_m_fact: f64,
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

fn exponents(vars: usize, degree: usize) -> Vec<Vec<u16>> {
    fn rec(vars: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if cur.len() + 1 == vars {
            cur.push(left as u16);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e as u16);
            rec(vars, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if vars == 0 {
        return out;
    }
    rec(vars, degree, &mut Vec::new(), &mut out);
    out
}

/// `C(vars + degree − 1, degree)`.
pub fn sym_dim(vars: usize, degree: usize) -> usize {
    let mut num: u128 = 1;
    for i in 0..degree {
        num = num * (vars + i) as u128 / (i + 1) as u128;
    }
    num as usize
}

impl SymPower {
    pub fn new(vars: usize, degree: usize) -> Self {
        let levels: Vec<Vec<Vec<u16>>> = (0..=degree).map(|k| exponents(vars, k)).collect();
        let mut up = Vec::with_capacity(degree);
        for k in 0..degree {
            let next: HashMap<&[u16], usize> = levels[k + 1]
                .iter()
                .enumerate()
                .map(|(i, e)| (e.as_slice(), i))
                .collect();
            let mut table = vec![0usize; levels[k].len() * vars];
            let mut buf = vec![0u16; vars];
            for (idx, e) in levels[k].iter().enumerate() {
                for i in 0..vars {
                    buf.copy_from_slice(e);
                    buf[i] += 1;
                    table[idx * vars + i] = next[buf.as_slice()];
                }
            }
            up.push(table);
        }
        let log_fact = levels[degree]
            .iter()
            .map(|e| e.iter().map(|&x| ln_factorial(x as usize)).sum())
            .collect();
        Self {
            vars,
            degree,
            levels,
            up,
            log_fact,
            ln_m_fact: ln_factorial(degree),
        }
    }

    pub fn dim(&self) -> usize {
        self.levels[self.degree].len()
    }

    pub fn exponent(&self, idx: usize) -> &[u16] {
        &self.levels[self.degree][idx]
    }

    /// `v^{⊗m}` in the monomial basis: `sqrt(m!/β!)·∏ v_j^{β_j}`.
    pub fn power_vector(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.levels[self.degree]
            .iter()
            .zip(&self.log_fact)
            .map(|(e, lf)| {
                let mut z = Complex64::new((0.5 * (self.ln_m_fact - lf)).exp(), 0.0);
                for (j, &p) in e.iter().enumerate() {
                    if p > 0 {
                        z *= v[j].powi(p as i32);
                    }
                }
                z
            })
            .collect()
    }

    /// Matrix of `Sym^m(a)` by direct polynomial expansion. Accurate only
    /// when `a` is close to the identity or `m` is small; see
    /// [`SymPower::matrix_stable`].
    pub fn matrix_direct(&self, a: &CMat) -> CMat {
        let d = self.dim();
        let n = self.vars;
        let mut out = CMat::zeros(d, d);
        let mut cur: Vec<Complex64> = Vec::new();
        let mut next: Vec<Complex64> = Vec::new();
        for (col, alpha) in self.levels[self.degree].iter().enumerate() {
            cur.clear();
            cur.push(Complex64::new(1.0, 0.0));
            let mut level = 0;
            for (j, &p) in alpha.iter().enumerate() {
                for _ in 0..p {
                    next.clear();
                    next.resize(self.levels[level + 1].len(), ZERO);
                    let table = &self.up[level];
                    for (idx, &c) in cur.iter().enumerate() {
                        if c == ZERO {
                            continue;
                        }
                        for i in 0..n {
                            let aij = a[(i, j)];
                            if aij != ZERO {
                                next[table[idx * n + i]] += c * aij;
                            }
                        }
                    }
                    std::mem::swap(&mut cur, &mut next);
                    level += 1;
                }
            }
            let la = self.log_fact[col];
            for (row, &c) in cur.iter().enumerate() {
                out[(row, col)] = c * (0.5 * (self.log_fact[row] - la)).exp();
            }
        }
        out
    }

    /// `Sym^m(b)^{2^s}` where `b` is a `2^s`-th root of the intended matrix.
    pub fn matrix_from_root(&self, root: &CMat, squarings: u32) -> CMat {
        let mut m = self.matrix_direct(root);
        for _ in 0..squarings {
            m = &m * &m;
        }
        m
    }

    /// Ambient weight of a basis vector given the weights of the variables.
    pub fn basis_weight(&self, idx: usize, var_weights: &[Vec<i64>]) -> Vec<i64> {
        let n = var_weights.first().map(|w| w.len()).unwrap_or(0);
        let mut w = vec![0i64; n];
        for (j, &p) in self.exponent(idx).iter().enumerate() {
            for a in 0..n {
                w[a] += p as i64 * var_weights[j][a];
            }
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::haar_sample;
    use crate::linalg::{max_abs, unitarity_residual};

    #[test]
    fn dims_and_ordering() {
        let s = SymPower::new(3, 2);
        assert_eq!(s.dim(), 6);
        assert_eq!(sym_dim(3, 2), 6);
        assert_eq!(s.exponent(0), &[2, 0, 0]);
        assert_eq!(sym_dim(2, 100), 101);
    }

    #[test]
    fn power_vector_is_first_column_of_matrix() {
        let g = &haar_sample(3, 8, 1)[0];
        let s = SymPower::new(3, 4);
        let m = s.matrix_direct(g.matrix());
        let col: Vec<Complex64> = (0..3).map(|i| g.entry(i, 0)).collect();
        let v = s.power_vector(&col);
        for i in 0..s.dim() {
            assert!((m[(i, 0)] - v[i]).norm() < 1e-12);
        }
        assert!(unitarity_residual(&m) < 1e-12);
    }

    #[test]
    fn homomorphism() {
        let gs = haar_sample(2, 9, 2);
        let s = SymPower::new(2, 6);
        let lhs = s.matrix_direct(gs[0].mul(&gs[1]).matrix());
        let rhs = s.matrix_direct(gs[0].matrix()) * s.matrix_direct(gs[1].matrix());
        assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }
}
