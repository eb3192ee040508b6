//! Experiment configuration. Every optional field has its default written
//! here and in `schema/config.schema.json`; unknown fields are rejected.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::SubgroupSpec;
use crate::linalg::CVec;
use crate::repr::irrep;
use crate::toeplitz::{builtin, matrix_coefficient_symbol, Symbol};
use crate::weights::{CoeffLaw, Weight, WeightFamily};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub n: usize,
    /// SU(n) when true, U(n) otherwise.
    pub special: bool,
}

/// Built-in symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    Const {
        value: f64,
    },
    AbsG11Sq,
    AbsG11Pow {
        p: u32,
    },
    ReG12,
    ImG12,
    G11,
    ReG11G21bar,
    ImG11G21bar,
    /// |Δ^μ|² for μ = (coeffs, central).
    ConicalAbsSq {
        coeffs: Vec<i64>,
        central: i64,
    },
    Sigmoid {
        tau: f64,
        steepness: f64,
    },
    /// g ↦ ⟨u, π(g) v₀⟩ with π the irrep of highest weight `aux`.
    MatrixCoefficient {
        aux: Vec<i64>,
        aux_central: i64,
        u: VectorChoice,
        v0: VectorChoice,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorChoice {
    Highest,
    /// First vector of the zero-weight space (Dynkin labels all zero).
    ZeroWeight,
}

impl SymbolSpec {
    /// Builds the symbol on U(n), or on SU(n) when `special`.
    pub fn build(&self, n: usize, special: bool) -> Result<Symbol> {
        let need2 = |name: &str| {
            if n < 2 {
                Err(Error::Config(format!("symbol {name} needs n ≥ 2")))
            } else {
                Ok(())
            }
        };
        Ok(match self {
            SymbolSpec::Const { value } => builtin::constant(n, *value),
            SymbolSpec::AbsG11Sq => builtin::abs_g11_sq(n),
            SymbolSpec::AbsG11Pow { p } => builtin::abs_g11_pow(n, *p),
            SymbolSpec::ReG12 => {
                need2("re_g12")?;
                builtin::re_g12(n)
            }
            SymbolSpec::ImG12 => {
                need2("im_g12")?;
                builtin::im_g12(n)
            }
            SymbolSpec::G11 => builtin::g11(n),
            SymbolSpec::ReG11G21bar => {
                need2("re_g11_g21bar")?;
                builtin::re_g11_g21bar(n)
            }
            SymbolSpec::ImG11G21bar => {
                need2("im_g11_g21bar")?;
                builtin::im_g11_g21bar(n)
            }
            SymbolSpec::ConicalAbsSq { coeffs, central } => {
                let mu = Weight::new(coeffs.clone(), *central);
                check_weight(&mu, n)?;
                builtin::conical_abs_sq(&mu)
            }
            SymbolSpec::Sigmoid { tau, steepness } => {
                builtin::sigmoid_abs_g11_sq(n, *tau, *steepness)
            }
            SymbolSpec::MatrixCoefficient {
                aux,
                aux_central,
                u,
                v0,
            } => {
                let w = Weight::new(aux.clone(), *aux_central);
                check_weight(&w, n)?;
                let rep = Arc::new(irrep(&w)?);
                let pick = |c: VectorChoice| -> Result<CVec> {
                    match c {
                        VectorChoice::Highest => Ok(rep.highest_vector()),
                        VectorChoice::ZeroWeight => {
                            let z = rep.zero_weight_vectors()?;
                            if z.ncols() == 0 {
                                return Err(Error::Config(format!(
                                    "{:?} has no zero weight",
                                    w.coeffs
                                )));
                            }
                            Ok(z.column(0).into_owned())
                        }
                    }
                };
                let (uu, vv) = (pick(*u)?, pick(*v0)?);
                let id = format!("matrix_coefficient({:?},{:?},{:?})", w.coeffs, u, v0);
                let s = matrix_coefficient_symbol(rep.clone(), uu, vv, &id)?;
                // Zero Dynkin labels give invariance under the torus of
                // SU(n); on U(n) the determinant character must vanish too,
                // which the spot check enforces.
                match (*v0, special) {
                    (VectorChoice::ZeroWeight, true) => {
                        let mut s = s;
                        s.right_blocks = Some(vec![1; n]);
                        s
                    }
                    (VectorChoice::ZeroWeight, false) => s.with_right_invariance(vec![1; n])?,
                    _ => s,
                }
            }
        })
    }
}

fn check_weight(w: &Weight, n: usize) -> Result<()> {
    if w.n() != n {
        return Err(Error::Config(format!(
            "weight {:?} has {} labels, U({n}) needs {}",
            w.coeffs,
            w.rank(),
            n - 1
        )));
    }
    if !w.is_dominant() {
        return Err(Error::Config(format!(
            "weight {:?} is not dominant",
            w.coeffs
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub a: SymbolSpec,
    pub b: SymbolSpec,
    #[serde(default = "Expectation::none")]
    pub expect: Expectation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Commute,
    Noncommute,
    None,
}

impl Expectation {
    fn none() -> Self {
        Expectation::None
    }
}

/// Haar integration for everything the experiment computes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum QuadratureSpec {
    /// SU(2) only: the cheapest exact rule for each integrand (coset rule
    /// for right-T-invariant symbols), with `extra_degree` of headroom.
    Exact { extra_degree: usize },
    /// SU(2) only: a fixed product rule; inadequate degrees are errors.
    Su2Product { max_degree: usize },
    /// Haar Monte Carlo on the configured group.
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Polar steps on each of [0, θ₀] and [θ₀, π] (SU(2)).
    #[serde(default = "d_theta_steps")]
    pub theta_steps: usize,
    #[serde(default = "d_phi_steps")]
    pub phi_steps: usize,
    /// Haar candidates for n ≥ 3.
    #[serde(default = "d_candidates")]
    pub candidates: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            theta_steps: d_theta_steps(),
            phi_steps: d_phi_steps(),
            candidates: d_candidates(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Identities exact at the quadrature level.
    #[serde(default = "d_exact")]
    pub exact: f64,
    #[serde(default = "d_convolution")]
    pub convolution: f64,
    #[serde(default = "d_equivariance")]
    pub equivariance: f64,
    #[serde(default = "d_norm_bound")]
    pub norm_bound: f64,
    #[serde(default = "d_cross")]
    pub cross_construction: f64,
    #[serde(default = "d_averaged")]
    pub averaged_symbol: f64,
    #[serde(default = "d_multiplicity")]
    pub multiplicity: f64,
    /// Monte Carlo tolerances are this many σ.
    #[serde(default = "d_sigmas")]
    pub mc_sigmas: f64,
    #[serde(default = "d_commute")]
    pub commute: f64,
    #[serde(default = "d_noncommute")]
    pub noncommute: f64,
    /// Per-sweep-point bounds on the Szegő gap; empty disables.
    #[serde(default)]
    pub gap_bounds: Vec<f64>,
    /// Bound on the last Berezin sup-error; null disables.
    #[serde(default = "d_final_sup")]
    pub final_sup_error: Option<f64>,
    #[serde(default = "d_exact")]
    pub closed_form: f64,
    /// Bound on the last kernel sup outside the ball; null disables.
    #[serde(default)]
    pub final_kernel_sup: Option<f64>,
    /// Allowed |‖h_k‖₁ − 1| at the last sweep point for k ≥ 2.
    #[serde(default = "d_l1")]
    pub l1_target: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all tolerance fields have defaults")
    }
}

fn d_theta_steps() -> usize {
    24
}
fn d_phi_steps() -> usize {
    16
}
fn d_candidates() -> usize {
    400
}
fn d_exact() -> f64 {
    1e-10
}
fn d_convolution() -> f64 {
    1e-8
}
fn d_equivariance() -> f64 {
    1e-9
}
fn d_norm_bound() -> f64 {
    1e-8
}
fn d_cross() -> f64 {
    1e-9
}
fn d_averaged() -> f64 {
    1e-8
}
fn d_multiplicity() -> f64 {
    1e-4
}
fn d_sigmas() -> f64 {
    5.0
}
fn d_commute() -> f64 {
    1e-9
}
fn d_noncommute() -> f64 {
    1e-3
}
fn d_final_sup() -> Option<f64> {
    Some(0.03)
}
fn d_l1() -> f64 {
    0.05
}
fn d_central() -> i64 {
    0
}
fn d_symbol() -> SymbolSpec {
    SymbolSpec::AbsG11Sq
}
fn d_quadrature() -> QuadratureSpec {
    QuadratureSpec::Exact { extra_degree: 0 }
}
fn d_taus() -> Vec<f64> {
    vec![0.2, 0.5, 0.8]
}
fn d_k() -> usize {
    1
}
fn d_theta0() -> f64 {
    FRAC_PI_2
}
fn d_test_points() -> usize {
    20
}
fn d_level_samples() -> usize {
    100_000
}
fn d_l1_samples() -> usize {
    20_000
}
fn d_l1_extra() -> usize {
    4
}
fn d_seed() -> u64 {
    1
}
fn d_kernel_scale() -> f64 {
    1.0
}
fn d_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupConfig,
    /// One law per simple root (null for a zero coefficient): λ_n.
    pub family: Vec<Option<CoeffLaw>>,
    #[serde(default = "d_central")]
    pub central: i64,
    /// Declared support Π∖S (1-based); must match the family when given.
    #[serde(default)]
    pub support: Option<Vec<usize>>,
    /// Sequence indices n at which λ_n is evaluated.
    pub sweep: Vec<u64>,
    #[serde(default = "d_symbol")]
    pub symbol: SymbolSpec,
    /// Second symbol: Berezin limit of T_f T_g instead of T_f.
    #[serde(default)]
    pub symbol2: Option<SymbolSpec>,
    #[serde(default)]
    pub pairs: Vec<PairSpec>,
    #[serde(default = "d_quadrature")]
    pub quadrature: QuadratureSpec,
    #[serde(default = "d_taus")]
    pub taus: Vec<f64>,
    #[serde(default = "d_k")]
    pub k: usize,
    #[serde(default = "d_theta0")]
    pub theta0: f64,
    #[serde(default = "d_test_points")]
    pub test_points: usize,
    /// Monte Carlo samples for level measures.
    #[serde(default = "d_level_samples")]
    pub level_samples: usize,
    /// Monte Carlo samples for ‖h_k‖₁ when no product rule applies.
    #[serde(default = "d_l1_samples")]
    pub l1_samples: usize,
    /// Headroom of the SU(2) coset rule used for ‖h_k‖₁.
    #[serde(default = "d_l1_extra")]
    pub l1_extra_degree: usize,
    #[serde(default)]
    pub grid: GridConfig,
    /// Whether the kernel sup is expected to decay along the sweep.
    #[serde(default = "d_true")]
    pub expect_decay: bool,
    #[serde(default = "d_seed")]
    pub seed: u64,
    /// Multiplier on the Berezin kernel in the normalization check (1 =
    /// honest; anything else is a negative control).
    #[serde(default = "d_kernel_scale")]
    pub kernel_scale: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn family(&self) -> Result<WeightFamily> {
        WeightFamily::new(self.group.n, self.family.clone())
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn weight_at(&self, n: u64) -> Result<Weight> {
        let mut w = self.family()?.at(n);
        w.central = self.central;
        Ok(w)
    }

    pub fn group_spec(&self) -> SubgroupSpec {
        if self.group.special {
            SubgroupSpec::Special { n: self.group.n }
        } else {
            SubgroupSpec::Full { n: self.group.n }
        }
    }

    pub fn is_su2(&self) -> bool {
        self.group.n == 2 && self.group.special
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |m: String| Err(Error::Config(m));
        if self.group.n < 2 {
            return cfg_err(format!("group size must be ≥ 2, got {}", self.group.n));
        }
        let fam = self.family()?;
        if let Some(s) = &self.support {
            let declared: BTreeSet<usize> = s.iter().copied().collect();
            if declared != fam.support() {
                return cfg_err(format!(
                    "declared support {declared:?} differs from the family's {:?}",
                    fam.support()
                ));
            }
        }
        if self.sweep.is_empty() {
            return cfg_err("sweep must not be empty".into());
        }
        match &self.quadrature {
            QuadratureSpec::Exact { .. } | QuadratureSpec::Su2Product { .. } if !self.is_su2() => {
                return cfg_err("exact quadrature is only available on SU(2)".into());
            }
            QuadratureSpec::MonteCarlo { samples, .. } if *samples < 2 => {
                return cfg_err("Monte Carlo needs at least two samples".into());
            }
            _ => {}
        }
        if self.k == 0 {
            return cfg_err("k must be ≥ 1".into());
        }
        if !(self.theta0.is_finite() && self.theta0 > 0.0 && self.theta0 < std::f64::consts::PI) {
            return cfg_err(format!("theta0 must lie in (0, π), got {}", self.theta0));
        }
        if self.taus.iter().any(|t| !t.is_finite()) || !self.kernel_scale.is_finite() {
            return cfg_err("taus and kernel_scale must be finite".into());
        }
        if self.level_samples < 2 || self.l1_samples < 2 {
            return cfg_err("sample counts must be ≥ 2".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"group":{"n":2,"special":true},"family":[{"law":"power","a":1.0,"p":1.0,"b":0.0}],"sweep":[4]}"#;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.symbol, SymbolSpec::AbsG11Sq);
        assert_eq!(c.tolerances.exact, 1e-10);
        assert_eq!(c.taus, vec![0.2, 0.5, 0.8]);
        assert_eq!(c.weight_at(4).unwrap(), Weight::su(vec![4]));
        // Round trip of the resolved config is stable.
        let again = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = MINIMAL.replace("\"sweep\"", "\"sweeep\"");
        assert!(matches!(
            ExperimentConfig::from_json(&bad),
            Err(Error::Config(_))
        ));
        let bad = MINIMAL.replace("[4]}", "[4],\"tolerances\":{\"exactt\":1}}");
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }

    #[test]
    fn inconsistent_support_is_rejected() {
        let bad = MINIMAL.replace("[4]}", "[4],\"support\":[2]}");
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }

    #[test]
    fn exact_rules_need_su2() {
        let bad = MINIMAL
            .replace("\"n\":2", "\"n\":3")
            .replace("[{", "[null,{");
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }

    #[test]
    fn symbols_build() {
        for s in [
            SymbolSpec::Const { value: 0.5 },
            SymbolSpec::AbsG11Pow { p: 2 },
            SymbolSpec::ConicalAbsSq {
                coeffs: vec![2],
                central: 0,
            },
            SymbolSpec::MatrixCoefficient {
                aux: vec![2],
                aux_central: 0,
                u: VectorChoice::Highest,
                v0: VectorChoice::ZeroWeight,
            },
        ] {
            assert!(s.build(2, true).is_ok(), "{s:?}");
        }
        let odd = SymbolSpec::MatrixCoefficient {
            aux: vec![1],
            aux_central: 0,
            u: VectorChoice::Highest,
            v0: VectorChoice::ZeroWeight,
        };
        assert!(matches!(odd.build(2, true), Err(Error::Config(_))));
        let twisted = SymbolSpec::MatrixCoefficient {
            aux: vec![2],
            aux_central: 0,
            u: VectorChoice::Highest,
            v0: VectorChoice::ZeroWeight,
        };
        assert!(twisted.build(2, false).is_err());
        let adjoint = SymbolSpec::MatrixCoefficient {
            aux: vec![1, 1],
            aux_central: -1,
            u: VectorChoice::Highest,
            v0: VectorChoice::ZeroWeight,
        };
        assert!(adjoint.build(3, false).unwrap().is_right_torus_invariant());
    }
}
