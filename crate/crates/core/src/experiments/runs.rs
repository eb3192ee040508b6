//! The five experiment drivers. Sweep points run through [`par::map_collect`],
//! so rows come out in sweep order whatever the pool size.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::berezin::{self, Character};
use crate::conical::{self, conical_eval};
use crate::error::{Error, Result};
use crate::group::{self, su2_from_euler, UnitaryElement};
use crate::linalg;
use crate::par;
use crate::quadrature::{
    self, su2_coset_rule, su2_product_rule, torus_rule, Estimate, QuadratureRule,
};
use crate::repr::{irrep, HighestWeightRep};
use crate::spectra;
use crate::toeplitz::{self, builtin, Symbol, ToeplitzOperator};
use crate::weights::Weight;

use super::config::{Expectation, ExperimentConfig, QuadratureSpec};
use super::table::ResultTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Verify,
    Szego,
    BerezinLimit,
    KernelDecay,
    Commute,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Verify,
        Experiment::Szego,
        Experiment::BerezinLimit,
        Experiment::KernelDecay,
        Experiment::Commute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Verify => "verify",
            Experiment::Szego => "szego",
            Experiment::BerezinLimit => "berezin-limit",
            Experiment::KernelDecay => "kernel-decay",
            Experiment::Commute => "commute",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Experiment::Verify => &["lambda", "check", "residual", "tolerance", "pass", "ref"],
            Experiment::Szego => &[
                "lambda1",
                "d_lambda",
                "tau",
                "counting_fraction",
                "level_measure",
                "gap",
                "ref",
            ],
            Experiment::BerezinLimit => &["lambda1", "sup_error", "mean_error", "ref"],
            Experiment::KernelDecay => &["n", "lambda1", "sup_outside", "l1_norm", "ref"],
            Experiment::Commute => &[
                "lambda1",
                "pair",
                "commutator_norm",
                "multiplicity_free",
                "ref",
            ],
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

pub fn run(exp: Experiment, cfg: &ExperimentConfig) -> Result<ResultTable> {
    match exp {
        Experiment::Verify => run_verify(cfg),
        Experiment::Szego => run_szego(cfg),
        Experiment::BerezinLimit => run_berezin_limit(cfg),
        Experiment::KernelDecay => run_kernel_decay(cfg),
        Experiment::Commute => run_commute(cfg),
    }
}

/// Rule selection for one configuration, with built rules cached by
/// (coset?, degree).
pub struct Integrator {
    spec: QuadratureSpec,
    mc: Option<Arc<QuadratureRule>>,
    cache: Mutex<HashMap<(bool, usize), Arc<QuadratureRule>>>,
}

impl Integrator {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let mc =
            match &cfg.quadrature {
                QuadratureSpec::MonteCarlo { samples, seed } => Some(Arc::new(
                    quadrature::mc_rule_on(&cfg.group_spec(), *samples, *seed)?,
                )),
                _ => None,
            };
        Ok(Self {
            spec: cfg.quadrature.clone(),
            mc,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn is_mc(&self) -> bool {
        self.mc.is_some()
    }

    fn rule(&self, coset: bool, degree: usize) -> Result<Arc<QuadratureRule>> {
        let key = match &self.spec {
            QuadratureSpec::MonteCarlo { .. } => return Ok(self.mc.clone().expect("built in new")),
            QuadratureSpec::Exact { extra_degree } => (coset, degree + extra_degree),
            QuadratureSpec::Su2Product { max_degree } => {
                if degree > *max_degree {
                    return Err(Error::Precondition(format!(
                        "product rule of degree {max_degree} cannot integrate degree {degree}"
                    )));
                }
                (false, *max_degree)
            }
        };
        let mut cache = self.cache.lock().expect("rule cache poisoned");
        Ok(cache
            .entry(key)
            .or_insert_with(|| {
                Arc::new(if key.0 {
                    su2_coset_rule(key.1)
                } else {
                    su2_product_rule(key.1)
                })
            })
            .clone())
    }

    /// A rule exact for integrands of `degree` on the whole group.
    pub fn full(&self, degree: usize) -> Result<Arc<QuadratureRule>> {
        self.rule(false, degree)
    }

    /// A rule exact for right-T-invariant integrands of `degree`.
    pub fn coset(&self, degree: usize) -> Result<Arc<QuadratureRule>> {
        self.rule(true, degree)
    }

    pub fn for_symbol(&self, rep: &HighestWeightRep, f: &Symbol) -> Result<Arc<QuadratureRule>> {
        if self.is_mc() {
            return self.rule(false, 0);
        }
        self.rule(
            f.is_right_torus_invariant(),
            toeplitz::required_degree(rep, f)?,
        )
    }

    pub fn toeplitz(&self, rep: &HighestWeightRep, f: &Symbol) -> Result<ToeplitzOperator> {
        toeplitz::assemble_toeplitz(rep, f, &*self.for_symbol(rep, f)?)
    }
}

/// Polynomial degree of the matrix coefficients of σ^λ, determinant twist
/// included.
fn rep_degree(w: &Weight) -> usize {
    w.degree() + w.n() * w.central.unsigned_abs() as usize
}

fn label(w: &Weight) -> String {
    let c: Vec<String> = w.coeffs.iter().map(|c| c.to_string()).collect();
    if w.central == 0 {
        c.join(",")
    } else {
        format!("{};c={}", c.join(","), w.central)
    }
}

fn lambda1(w: &Weight) -> i64 {
    w.coeffs.first().copied().unwrap_or(0)
}

/// Runs `f` on every sweep point and returns results in sweep order.
fn sweep<R, F>(cfg: &ExperimentConfig, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(u64, Weight) -> Result<R> + Sync + Send,
{
    let points = par::map_collect(&cfg.sweep, |&n| f(n, cfg.weight_at(n)?));
    points.into_iter().collect()
}

struct Check {
    name: &'static str,
    residual: f64,
    tolerance: f64,
    reference: &'static str,
}

impl Check {
    fn new(name: &'static str, residual: f64, tolerance: f64, reference: &'static str) -> Self {
        Self {
            name,
            residual,
            tolerance,
            reference,
        }
    }

    fn pass(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// The built-in verification battery at one weight.
fn verify_point(cfg: &ExperimentConfig, integ: &Integrator, lambda: &Weight) -> Result<Vec<Check>> {
    let t = &cfg.tolerances;
    let k = t.mc_sigmas;
    let tol = |base: f64, sigma: f64| base.max(k * sigma);
    let n = cfg.group.n;
    let spec = cfg.group_spec();
    let rep = Arc::new(irrep(lambda)?);
    let d = rep.dim as f64;
    let deg = rep_degree(lambda);
    let mut out = Vec::new();

    // Unit mass of the Berezin kernel; kernel_scale ≠ 1 corrupts it.
    let mass = quadrature::integrate_estimate(&*integ.coset(2 * deg)?, |g| {
        Complex64::new(
            cfg.kernel_scale * d * conical_eval(lambda, g.matrix()).norm_sqr(),
            0.0,
        )
    })?;
    out.push(Check::new(
        "kernel_unit_mass",
        (mass.value - 1.0).norm(),
        tol(t.exact, mass.sigma),
        "schur_orthogonality",
    ));

    // Δ ∗ Δ = Δ / d.
    let conv_rule = integ.full(2 * deg)?;
    let (mut res, mut sig) = (0.0f64, 0.0f64);
    for x in group::subgroup_sample(&spec, cfg.seed.wrapping_add(11), 5)? {
        let e = quadrature::integrate_estimate(&conv_rule, |y| {
            conical_eval(lambda, y.matrix()) * conical_eval(lambda, y.inv_mul(&x).matrix())
        })?;
        res = res.max((e.value - conical_eval(lambda, x.matrix()) / d).norm());
        sig = sig.max(e.sigma);
    }
    out.push(Check::new(
        "idempotent_convolution",
        res,
        tol(t.convolution, sig),
        "idempotent_convolution",
    ));

    // Toeplitz axioms on a fixed battery: (symbol, sup |f|, f ≥ 0).
    let battery = [
        (builtin::constant(n, 0.7), 0.7, true),
        (builtin::abs_g11_sq(n), 1.0, true),
        (builtin::abs_g11_pow(n, 2), 1.0, true),
        (builtin::re_g11_g21bar(n), 0.5, false),
        (builtin::im_g11_g21bar(n), 0.5, false),
    ];
    let sigma_one = integ.toeplitz(&rep, &builtin::constant(n, 1.0))?.sigma;
    let (mut trace_res, mut pos_res, mut norm_res, mut norm_tol) =
        (0.0f64, 0.0f64, 0.0f64, t.norm_bound);
    for (f, sup, nonneg) in &battery {
        let rule = integ.for_symbol(&rep, f)?;
        let op = toeplitz::assemble_toeplitz(&rep, f, &rule)?;
        let integral = quadrature::integrate(&rule, |g| f.eval(g))?;
        trace_res = trace_res.max((linalg::trace(&op.matrix) - integral * d).norm());
        if *nonneg {
            let floor = spectra::spectrum(&op)?.eigenvalues[0];
            pos_res = pos_res.max(-floor);
        }
        norm_res = norm_res.max(op.op_norm() - sup);
        norm_tol = norm_tol.max(tol(t.norm_bound, op.sigma + sup * sigma_one));
    }
    out.push(Check::new(
        "toeplitz_trace",
        trace_res,
        t.exact,
        "trace_of_toeplitz",
    ));

    let i = Complex64::new(0.0, 1.0);
    let complex = builtin::re_g11_g21bar(n).add(&builtin::im_g11_g21bar(n).scale(i));
    let tc = integ.toeplitz(&rep, &complex)?;
    let tcc = integ.toeplitz(&rep, &complex.conj())?;
    out.push(Check::new(
        "adjoint",
        linalg::max_abs(&(tc.matrix.adjoint() - &tcc.matrix)),
        t.exact,
        "toeplitz_adjoint",
    ));
    out.push(Check::new(
        "positivity",
        pos_res.max(0.0),
        t.exact,
        "toeplitz_positivity",
    ));
    out.push(Check::new(
        "norm_bound",
        norm_res.max(0.0),
        norm_tol,
        "toeplitz_norm_bound",
    ));

    // T_{L(x)f} = σ(x) T_f σ(x)⁻¹.
    let f = builtin::re_g11_g21bar(n);
    let rule = integ.for_symbol(&rep, &f)?;
    let (mut res, mut sig) = (0.0f64, 0.0f64);
    for x in group::subgroup_sample(&spec, cfg.seed.wrapping_add(13), 10)? {
        let (r, s) = toeplitz::equivariance_residual(&rep, &f, &x, &rule)?;
        res = res.max(r);
        sig = sig.max(s);
    }
    out.push(Check::new(
        "equivariance",
        res,
        tol(t.equivariance, sig),
        "toeplitz_invariant_symbol",
    ));

    // T_f = T_{f#}, averaging over the maximal torus of L.
    let (mut res, mut sig) = (0.0f64, 0.0f64);
    for f in [builtin::g11(n), builtin::re_g12(n), builtin::im_g12(n)] {
        let points = f.degree.unwrap_or(1) + 2;
        let avg_rule = Arc::new(torus_rule(n, cfg.group.special, points));
        let avg = toeplitz::average_symbol_l(&f, vec![1; n], avg_rule)?;
        let a = integ.toeplitz(&rep, &f)?;
        let b = integ.toeplitz(&rep, &avg)?;
        res = res.max(linalg::op_norm(&(a.matrix - b.matrix)));
        sig = sig.max(a.sigma + b.sigma);
    }
    out.push(Check::new(
        "averaged_symbol",
        res,
        tol(t.averaged_symbol, sig),
        "toeplitz_averaged_symbol",
    ));

    // Σ_π d_π b_π = d_λ over the constituents of σ ⊗ σ̄ (SU(2)).
    if cfg.is_su2() && !integ.is_mc() {
        let m = lambda1(lambda);
        let sigma = Character::of(&rep)?;
        let rule = integ.full(4 * m as usize)?;
        let mut total = 0.0;
        for j in 0..=m {
            let pi = Character::from_weight(&Weight::su(vec![2 * j]))?;
            let b = berezin::berezin_eigenvalue(&rep, &sigma, &pi, &rule)?;
            total += pi.dim as f64 * b.value.re;
        }
        out.push(Check::new(
            "berezin_trace",
            (total - d).abs(),
            t.convolution,
            "berezin_trace",
        ));
    }

    // Tr(T_f T_ḡ) = d ⟨B f, g⟩.
    let hs = berezin::hs_pairing_check(
        &rep,
        &builtin::abs_g11_sq(n),
        &builtin::re_g11_g21bar(n),
        &*integ.full(2 * deg + 2)?,
    )?;
    out.push(Check::new(
        "hs_pairing",
        hs.residual,
        tol(t.convolution, hs.sigma),
        "toeplitz_product_trace_berezin",
    ));

    // B^λ f = d f ∗ |Δ|² = B(T_f).
    let f = builtin::abs_g11_sq(n);
    let rule = integ.for_symbol(&rep, &f)?;
    let tf = toeplitz::assemble_toeplitz(&rep, &f, &rule)?;
    let mut res = 0.0f64;
    for x in group::subgroup_sample(&spec, cfg.seed.wrapping_add(15), 5)? {
        let a = berezin::berezin_of_symbol(&rep, &f, &x, &rule)?;
        let b = berezin::berezin_of_operator(&rep, &tf.matrix, &x)?;
        res = res.max((a - b).norm());
    }
    out.push(Check::new(
        "berezin_convolution",
        res,
        t.convolution,
        "berezin_convolution",
    ));

    // Minor products against ⟨v_λ, σ(g) v_λ⟩.
    let v = rep.highest_vector();
    let mut res = 0.0f64;
    for g in group::subgroup_sample(&spec, cfg.seed.wrapping_add(17), 50)? {
        res =
            res.max((v.dotc(&rep.apply_to_highest(&g)) - conical_eval(lambda, g.matrix())).norm());
    }
    out.push(Check::new(
        "cross_construction",
        res,
        t.cross_construction,
        "conical_tensor_product",
    ));

    // m(trivial, σ⊗σ̄) = ∫|χ_σ|² = 1.
    let chi = Character::of(&rep)?;
    let e = quadrature::integrate_estimate(&*integ.full(2 * deg)?, |g| {
        Complex64::new(chi.eval(g).norm_sqr(), 0.0)
    })?;
    out.push(Check::new(
        "multiplicity_trivial",
        (e.value - 1.0).norm(),
        tol(t.multiplicity, e.sigma),
        "schur_orthogonality",
    ));

    Ok(out)
}

pub fn run_verify(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let exp = Experiment::Verify;
    let mut table = ResultTable::new(exp.name(), exp.columns(), cfg);
    let integ = Integrator::new(cfg)?;
    let points = sweep(cfg, |_, w| Ok((verify_point(cfg, &integ, &w)?, w)))?;
    let mut failed = Vec::new();
    for (checks, w) in points {
        for c in checks {
            if !c.pass() {
                failed.push(format!("{}@{}", c.name, label(&w)));
            }
            table.push(vec![
                label(&w).into(),
                c.name.into(),
                c.residual.into(),
                c.tolerance.into(),
                c.pass().into(),
                c.reference.into(),
            ])?;
        }
    }
    let detail = if failed.is_empty() {
        "all checks pass".to_string()
    } else {
        format!("failed: {}", failed.join(" "))
    };
    table.assert("all_checks", failed.is_empty(), detail);
    Ok(table)
}

pub fn run_szego(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let exp = Experiment::Szego;
    let t = &cfg.tolerances;
    if !t.gap_bounds.is_empty() && t.gap_bounds.len() != cfg.sweep.len() {
        return Err(Error::Config(format!(
            "gap_bounds has {} entries for {} sweep points",
            t.gap_bounds.len(),
            cfg.sweep.len()
        )));
    }
    let horizon = cfg.sweep.iter().copied().max().unwrap_or(0).max(10);
    let report = cfg.family()?.growth_check(horizon)?;
    if !report.superlog_ok {
        return Err(Error::Config(format!(
            "weight family fails the growth check: {}",
            serde_json::to_string(&report).expect("report serializes")
        )));
    }
    let integ = Integrator::new(cfg)?;
    let f = cfg.symbol.build(cfg.group.n, cfg.group.special)?;
    let level_rule = quadrature::mc_rule_on(&cfg.group_spec(), cfg.level_samples, cfg.seed)?;
    let levels: Vec<Estimate> = cfg
        .taus
        .iter()
        .map(|&tau| spectra::level_measure(&f, tau, &level_rule))
        .collect::<Result<_>>()?;

    let spectra_by_point = sweep(cfg, |_, w| {
        let rep = irrep(&w)?;
        let s = spectra::spectrum(&integ.toeplitz(&rep, &f)?)?;
        Ok((w, s))
    })?;

    let mut table = ResultTable::new(exp.name(), exp.columns(), cfg);
    let mut max_gaps = Vec::new();
    for (w, s) in &spectra_by_point {
        let mut worst = 0.0f64;
        for (tau, level) in cfg.taus.iter().zip(&levels) {
            let c = spectra::counting_fraction(s, *tau);
            let gap = (c - level.value.re).abs();
            worst = worst.max(gap);
            table.push(vec![
                lambda1(w).into(),
                s.dim().into(),
                (*tau).into(),
                c.into(),
                level.value.re.into(),
                gap.into(),
                "szego_limit".into(),
            ])?;
        }
        max_gaps.push(worst);
    }
    let slack = 4.0 * levels.iter().map(|l| l.sigma).fold(0.0, f64::max);
    let shrinking = max_gaps.windows(2).all(|w| w[1] <= w[0] + slack);
    table.assert(
        "gap_shrinking",
        shrinking,
        format!("max gap per point {max_gaps:?}, slack {slack:e}"),
    );
    if !t.gap_bounds.is_empty() {
        let ok = max_gaps.iter().zip(&t.gap_bounds).all(|(g, b)| g <= b);
        table.assert(
            "gap_bounds",
            ok,
            format!("max gaps {max_gaps:?} vs bounds {:?}", t.gap_bounds),
        );
    }
    Ok(table)
}

pub fn run_berezin_limit(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let exp = Experiment::BerezinLimit;
    let n = cfg.group.n;
    let integ = Integrator::new(cfg)?;
    let f = cfg.symbol.build(n, cfg.group.special)?;
    let g = cfg
        .symbol2
        .as_ref()
        .map(|s| s.build(n, cfg.group.special))
        .transpose()?;
    let points = group::subgroup_sample(&cfg.group_spec(), cfg.seed, cfg.test_points)?;
    let targets: Vec<Complex64> = points
        .iter()
        .map(|x| f.eval(x) * g.as_ref().map_or(Complex64::new(1.0, 0.0), |g| g.eval(x)))
        .collect();

    let errors = sweep(cfg, |_, w| {
        let rep = irrep(&w)?;
        let mut s = integ.toeplitz(&rep, &f)?.matrix;
        if let Some(g) = &g {
            s = &s * &integ.toeplitz(&rep, g)?.matrix;
        }
        let mut errs = Vec::with_capacity(points.len());
        for (x, target) in points.iter().zip(&targets) {
            errs.push((berezin::berezin_of_operator(&rep, &s, x)? - target).norm());
        }
        let sup = errs.iter().cloned().fold(0.0, f64::max);
        let mean = errs.iter().sum::<f64>() / errs.len().max(1) as f64;
        Ok((w, sup, mean))
    })?;

    let mut table = ResultTable::new(exp.name(), exp.columns(), cfg);
    let reference = if g.is_some() {
        "asymptotic_berezin_product"
    } else {
        "asymptotic_berezin"
    };
    for (w, sup, mean) in &errors {
        table.push(vec![
            lambda1(w).into(),
            (*sup).into(),
            (*mean).into(),
            reference.into(),
        ])?;
    }
    let sups: Vec<f64> = errors.iter().map(|e| e.1).collect();
    let decreasing = sups
        .windows(2)
        .all(|w| w[1] < w[0] || (w[0] <= 1e-12 && w[1] <= 1e-12));
    table.assert(
        "sup_error_decreasing",
        decreasing,
        format!("sup errors {sups:?}"),
    );
    if let Some(bound) = cfg.tolerances.final_sup_error {
        let last = *sups.last().expect("sweep is non-empty");
        table.assert(
            "final_sup_error",
            last < bound,
            format!("{last:e} < {bound:e}"),
        );
    }
    Ok(table)
}

/// Candidate points for the kernel sup: the SU(2) polar grid (θ₀ included
/// exactly) or Haar samples otherwise.
fn kernel_candidates(cfg: &ExperimentConfig) -> Result<Vec<UnitaryElement>> {
    let grid = &cfg.grid;
    if cfg.is_su2() {
        let mut c = conical::su2_coset_grid(cfg.theta0, grid.theta_steps, grid.phi_steps);
        if cfg.k >= 2 {
            // Inner points for tuples that leave the ball through a later argument.
            c.push(UnitaryElement::identity(2));
            for i in 1..grid.theta_steps {
                let theta = cfg.theta0 * i as f64 / grid.theta_steps as f64;
                for j in 0..grid.phi_steps.max(1) {
                    c.push(su2_from_euler(
                        2.0 * PI * j as f64 / grid.phi_steps.max(1) as f64,
                        theta,
                        0.0,
                    ));
                }
            }
        }
        Ok(c)
    } else {
        group::subgroup_sample(&cfg.group_spec(), cfg.seed, grid.candidates)
    }
}

pub fn run_kernel_decay(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let exp = Experiment::KernelDecay;
    let t = &cfg.tolerances;
    let candidates = kernel_candidates(cfg)?;
    let rows = sweep(cfg, |n, w| {
        let sup = conical::sup_outside_neighborhood(&w, cfg.k, cfg.theta0, &candidates)?;
        let l1 = if cfg.is_su2() {
            let rule = su2_coset_rule(2 * rep_degree(&w) + cfg.l1_extra_degree);
            conical::h_k_l1_product(&w, cfg.k, &rule)?
        } else {
            conical::h_k_l1_mc(&w, cfg.k, cfg.l1_samples, cfg.seed)?
                .value
                .re
        };
        Ok((n, w, sup, l1))
    })?;

    let mut table = ResultTable::new(exp.name(), exp.columns(), cfg);
    for (n, w, sup, l1) in &rows {
        table.push(vec![
            (*n).into(),
            lambda1(w).into(),
            (*sup).into(),
            (*l1).into(),
            "approx_identity".into(),
        ])?;
    }
    let sups: Vec<f64> = rows.iter().map(|r| r.2).collect();
    if cfg.expect_decay {
        let ok = sups.windows(2).all(|w| w[1] < w[0] || w[0] == 0.0);
        table.assert("sup_decreasing", ok, format!("sups {sups:?}"));
    } else {
        let ok = sups
            .iter()
            .all(|s| (s - sups[0]).abs() <= 1e-12 * sups[0].max(1.0));
        table.assert("sup_constant", ok, format!("sups {sups:?}"));
    }
    if cfg.is_su2() && cfg.k == 1 {
        let mut worst = 0.0f64;
        for (_, w, sup, _) in &rows {
            let m =
                u32::try_from(lambda1(w)).map_err(|_| Error::Domain("weight too large".into()))?;
            worst = worst.max((sup - conical::su2_kernel_closed_form(m, cfg.theta0)).abs());
        }
        table.assert(
            "closed_form",
            worst <= t.closed_form,
            format!("max deviation {worst:e} vs {:e}", t.closed_form),
        );
    }
    if let Some(bound) = t.final_kernel_sup {
        let last = *sups.last().expect("sweep is non-empty");
        table.assert(
            "final_kernel_sup",
            last < bound,
            format!("{last:e} < {bound:e}"),
        );
    }
    if cfg.k >= 2 {
        let last = rows.last().expect("sweep is non-empty").3;
        table.assert(
            "l1_limit",
            (last - 1.0).abs() <= t.l1_target,
            format!(
                "‖h_{}‖₁ = {last:.6} at the last point, target 1 ± {}",
                cfg.k, t.l1_target
            ),
        );
    }
    Ok(table)
}

pub fn run_commute(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let exp = Experiment::Commute;
    let n = cfg.group.n;
    let t = &cfg.tolerances;
    let integ = Integrator::new(cfg)?;
    let pairs: Vec<(Symbol, Symbol, Expectation)> = cfg
        .pairs
        .iter()
        .map(|p| {
            Ok((
                p.a.build(n, cfg.group.special)?,
                p.b.build(n, cfg.group.special)?,
                p.expect,
            ))
        })
        .collect::<Result<_>>()?;
    if pairs.is_empty() {
        return Err(Error::Config("commute needs at least one pair".into()));
    }
    let rows = sweep(cfg, |_, w| {
        let rep = irrep(&w)?;
        // Left-T-invariant symbols commute when σ|_T is multiplicity-free.
        let mult_free = rep.weight_multiplicities()?.values().all(|&m| m <= 1);
        let mut out = Vec::with_capacity(pairs.len());
        for (a, b, expect) in &pairs {
            let ta = integ.toeplitz(&rep, a)?;
            let tb = integ.toeplitz(&rep, b)?;
            let norm = toeplitz::commutator_norm(&ta, &tb)?;
            let sigma = 2.0 * (ta.sigma * tb.op_norm() + tb.sigma * ta.op_norm());
            out.push((format!("{}|{}", a.id, b.id), norm, sigma, *expect));
        }
        Ok((w, mult_free, out))
    })?;

    let mut table = ResultTable::new(exp.name(), exp.columns(), cfg);
    let mut failed = Vec::new();
    for (w, mult_free, out) in &rows {
        for (pair, norm, sigma, expect) in out {
            table.push(vec![
                lambda1(w).into(),
                pair.clone().into(),
                (*norm).into(),
                (*mult_free).into(),
                "multiplicity_free_commutation".into(),
            ])?;
            let ok = match expect {
                Expectation::Commute => *norm <= t.commute.max(t.mc_sigmas * sigma),
                Expectation::Noncommute => *norm > t.noncommute,
                Expectation::None => true,
            };
            if !ok {
                failed.push(format!("{pair}@{}", label(w)));
            }
        }
    }
    let detail = if failed.is_empty() {
        "all expectations met".to_string()
    } else {
        format!("failed: {}", failed.join(" "))
    };
    table.assert("expectations", failed.is_empty(), detail);
    Ok(table)
}
