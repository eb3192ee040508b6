//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::FRAC_PI_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use flagq_core::berezin::{self, basis_vector, embed_tensor_as_symbol, Character};
use flagq_core::conical::{conical_eval, BerezinKernel};
use flagq_core::experiments::{
    run_berezin_limit, run_commute, run_kernel_decay, run_szego, ExperimentConfig,
};
use flagq_core::group::{haar_sample, special_haar_sample, UnitaryElement};
use flagq_core::linalg;
use flagq_core::quadrature::{self, mc_rule, su2_coset_rule, su2_product_rule, torus_rule};
use flagq_core::repr::irrep;
use flagq_core::spectra;
use flagq_core::toeplitz::{
    self, assemble_toeplitz, builtin, matrix_coefficient_symbol, su2_rule_for, Symbol,
};
use flagq_core::weights::Weight;
use num_complex::Complex64;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within(elapsed: Duration, limit: Duration, msg: String) -> Outcome {
    ensure(
        elapsed < limit,
        format!(
            "{msg}; {:.2} s (limit {} s)",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn cfg(json: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(json).expect("acceptance config parses")
}

fn su2(m: i64) -> Weight {
    Weight::su(vec![m])
}

fn schur_normalization() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for m in 1..=10 {
        let k = BerezinKernel::new(su2(m)).unwrap();
        let mass = quadrature::integrate(&su2_product_rule(2 * m as usize), |g| {
            Complex64::new(k.eval(g), 0.0)
        })
        .unwrap();
        worst = worst.max((mass - 1.0).norm());
    }
    let r = ensure(
        worst <= 1e-10,
        format!("max |d∫|Δ|² − 1| = {worst:.3e} (tol 1e-10)"),
    )?;
    within(start.elapsed(), Duration::from_secs(1), r)
}

fn idempotent_convolution() -> Outcome {
    let mut worst = 0.0f64;
    for m in 1..=6 {
        let w = su2(m);
        let d = (m + 1) as f64;
        let rule = su2_product_rule(2 * m as usize);
        for x in special_haar_sample(2, 100 + m as u64, 5) {
            let c = quadrature::convolve_at(
                &rule,
                |y| conical_eval(&w, y.matrix()),
                |z| conical_eval(&w, z.matrix()),
                &x,
            )
            .unwrap();
            worst = worst.max((c - conical_eval(&w, x.matrix()) / d).norm());
        }
    }
    ensure(
        worst <= 1e-8,
        format!("max |Δ∗Δ − Δ/d| = {worst:.3e} (tol 1e-8)"),
    )
}

fn complex_g11_g21bar() -> Symbol {
    builtin::re_g11_g21bar(2).add(&builtin::im_g11_g21bar(2).scale(Complex64::new(0.0, 1.0)))
}

fn toeplitz_axioms() -> Outcome {
    let rep = irrep(&su2(4)).unwrap();
    let d = rep.dim as f64;
    // (symbol, sup |f|, f ≥ 0)
    let battery = [
        (builtin::constant(2, 0.7), 0.7, true),
        (builtin::abs_g11_sq(2), 1.0, true),
        (builtin::abs_g11_pow(2, 3), 1.0, true),
        (builtin::re_g11_g21bar(2), 0.5, false),
        (complex_g11_g21bar(), 0.5, false),
    ];
    let (mut tr, mut adj, mut floor, mut excess) =
        (0.0f64, 0.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for (f, sup, nonneg) in &battery {
        let rule = su2_rule_for(&rep, f).unwrap();
        let t = assemble_toeplitz(&rep, f, &rule).unwrap();
        let tbar = assemble_toeplitz(&rep, &f.conj(), &rule).unwrap();
        let integral = quadrature::integrate(&rule, |g| f.eval(g)).unwrap();
        tr = tr.max((linalg::trace(&t.matrix) - integral * d).norm());
        adj = adj.max(linalg::max_abs(&(t.matrix.adjoint() - &tbar.matrix)));
        if *nonneg {
            floor = floor.min(spectra::spectrum(&t).unwrap().eigenvalues[0]);
        }
        excess = excess.max(t.op_norm() - sup);
    }
    ensure(
        tr <= 1e-10 && adj <= 1e-10 && floor >= -1e-10 && excess <= 1e-8,
        format!(
            "trace {tr:.2e}, adjoint {adj:.2e}, eigenfloor {floor:.2e}, ‖T‖ − sup {excess:.2e}"
        ),
    )
}

fn equivariance() -> Outcome {
    let rep = irrep(&su2(4)).unwrap();
    let mut worst = 0.0f64;
    for f in [
        builtin::re_g11_g21bar(2),
        builtin::abs_g11_sq(2),
        complex_g11_g21bar(),
    ] {
        let rule = su2_rule_for(&rep, &f).unwrap();
        for x in special_haar_sample(2, 41, 10) {
            worst = worst.max(
                toeplitz::equivariance_residual(&rep, &f, &x, &rule)
                    .unwrap()
                    .0,
            );
        }
    }
    ensure(
        worst <= 1e-9,
        format!("max ‖T_(L(x)f) − σ(x)T_fσ(x)⁻¹‖ = {worst:.3e} (tol 1e-9)"),
    )
}

fn averaged_symbol() -> Outcome {
    let rep = irrep(&su2(4)).unwrap();
    let symbols = [
        builtin::g11(2),
        builtin::abs_g11_sq(2).add(&builtin::re_g12(2)),
        builtin::im_g12(2).add(&builtin::constant(2, 0.3)),
    ];
    let mut worst = 0.0f64;
    for f in &symbols {
        let avg =
            toeplitz::average_symbol_l(f, vec![1, 1], Arc::new(torus_rule(2, true, 4))).unwrap();
        let a = assemble_toeplitz(&rep, f, &su2_rule_for(&rep, f).unwrap()).unwrap();
        let b = assemble_toeplitz(&rep, &avg, &su2_rule_for(&rep, &avg).unwrap()).unwrap();
        worst = worst.max(linalg::op_norm(&(a.matrix - b.matrix)));
    }
    ensure(
        worst <= 1e-8,
        format!("max ‖T_f − T_f#‖ = {worst:.3e} (tol 1e-8)"),
    )
}

fn surjectivity() -> Outcome {
    let rep = Arc::new(irrep(&su2(2)).unwrap());
    let d = rep.dim;
    let mut symbols = Vec::new();
    for i in 0..d {
        for j in 0..d {
            symbols.push(
                embed_tensor_as_symbol(rep.clone(), basis_vector(d, i), basis_vector(d, j))
                    .unwrap(),
            );
        }
    }
    let rank = toeplitz::quantization_rank(&rep, &symbols, &su2_coset_rule(8)).unwrap();
    // Spin j = 1; π of spin 2j + 2 = 3 does not occur in σ ⊗ σ̄.
    let pi = Arc::new(irrep(&su2(6)).unwrap());
    let v0 = pi.zero_weight_vectors().unwrap().column(0).into_owned();
    let mut witness =
        matrix_coefficient_symbol(pi.clone(), pi.highest_vector(), v0, "witness").unwrap();
    // A zero-weight v₀ is fixed by the torus of SU(2).
    witness.right_blocks = Some(vec![1, 1]);
    let norm = assemble_toeplitz(&rep, &witness, &su2_rule_for(&rep, &witness).unwrap())
        .unwrap()
        .op_norm();
    ensure(
        rank == d * d && norm <= 1e-8,
        format!(
            "rank {rank} of {}; kernel witness ‖T‖ = {norm:.3e} (tol 1e-8)",
            d * d
        ),
    )
}

fn commuting_families() -> Outcome {
    let t = run_commute(&cfg(
        r#"{"group":{"n":2,"special":true},"family":[{"law":"power","a":1.0,"p":1.0,"b":0.0}],
            "sweep":[2,3,4,5,6,7,8,9,10],
            "pairs":[
              {"a":{"kind":"abs_g11_sq"},"b":{"kind":"abs_g11_pow","p":2},"expect":"commute"},
              {"a":{"kind":"abs_g11_sq"},"b":{"kind":"abs_g11_pow","p":3},"expect":"commute"},
              {"a":{"kind":"abs_g11_pow","p":2},"b":{"kind":"conical_abs_sq","coeffs":[3],"central":0},"expect":"commute"},
              {"a":{"kind":"re_g11_g21bar"},"b":{"kind":"im_g11_g21bar"},"expect":"noncommute"}]}"#,
    ))
    .map_err(|e| e.to_string())?;
    let norms = t.column_f64("commutator_norm").unwrap();
    let invariant = norms
        .iter()
        .enumerate()
        .filter(|(i, _)| i % 4 != 3)
        .map(|(_, v)| *v)
        .fold(0.0, f64::max);
    let generic = norms
        .iter()
        .enumerate()
        .filter(|(i, _)| i % 4 == 3)
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    ensure(
        t.passed() && invariant <= 1e-9 && generic > 1e-3,
        format!("invariant pairs max {invariant:.3e} (tol 1e-9); generic pair min {generic:.3e} (> 1e-3)"),
    )
}

fn berezin_trace() -> Outcome {
    let (mut worst_trace, mut worst_hs) = (0.0f64, 0.0f64);
    for m in [2i64, 4, 6] {
        let rep = irrep(&su2(m)).unwrap();
        let sigma = Character::of(&rep).unwrap();
        let rule = su2_product_rule(4 * m as usize);
        let mut total = 0.0;
        for j in 0..=m {
            let pi = Character::from_weight(&su2(2 * j)).unwrap();
            total += pi.dim as f64
                * berezin::berezin_eigenvalue(&rep, &sigma, &pi, &rule)
                    .unwrap()
                    .value
                    .re;
        }
        worst_trace = worst_trace.max((total - rep.dim as f64).abs());
        let hs = berezin::hs_pairing_check(
            &rep,
            &builtin::abs_g11_sq(2),
            &complex_g11_g21bar(),
            &su2_product_rule(2 * m as usize + 2),
        )
        .unwrap();
        worst_hs = worst_hs.max(hs.residual);
    }
    ensure(
        worst_trace <= 1e-8 && worst_hs <= 1e-8,
        format!("|Σ d_π b_π − d_λ| max {worst_trace:.3e}; HS pairing residual max {worst_hs:.3e} (tol 1e-8)"),
    )
}

fn multiplicity_stabilization() -> Outcome {
    let pi = Character::from_weight(&su2(2)).unwrap();
    let torus = torus_rule(2, true, 8);
    let inv = berezin::invariant_dimension(&pi, &torus).unwrap().value;
    let mut su2_ok = inv == 1;
    for m in 1..=10i64 {
        let sigma = Character::from_weight(&su2(m)).unwrap();
        let mult = berezin::multiplicity(&sigma, &pi, &su2_product_rule(2 * m as usize + 2))
            .unwrap()
            .value;
        su2_ok &= mult == 1;
    }
    // U(3), σ = standard representation; the adjoint is (1,1) with det⁻¹.
    let sigma = Character::from_weight(&Weight::new(vec![1, 0], 0)).unwrap();
    let rule = mc_rule(3, 200_000, 9).unwrap();
    let mut detail = Vec::new();
    let mut u3_ok = true;
    for (name, w) in [
        ("trivial", Weight::zero(3)),
        ("adjoint", Weight::new(vec![1, 1], -1)),
    ] {
        let pi = Character::from_weight(&w).unwrap();
        match berezin::multiplicity(&sigma, &pi, &rule) {
            Ok(m) => {
                let dev = (m.estimate.value - 1.0).norm();
                u3_ok &= m.value == 1 && dev <= 5.0 * m.estimate.sigma;
                detail.push(format!(
                    "{name} {:.4} ± {:.4}",
                    m.estimate.value.re, m.estimate.sigma
                ));
            }
            Err(e) => {
                u3_ok = false;
                detail.push(format!("{name}: {e}"));
            }
        }
    }
    ensure(
        su2_ok && u3_ok,
        format!(
            "SU(2): m(spin 1) = 1 = dim H^T ({inv}) for n = 1..10: {su2_ok}; U(3): {}",
            detail.join(", ")
        ),
    )
}

fn approximate_identity() -> Outcome {
    let start = Instant::now();
    let k1 = run_kernel_decay(&cfg(&format!(
        r#"{{"group":{{"n":2,"special":true}},"family":[{{"law":"power","a":2.0,"p":1.0,"b":0.0}}],
            "sweep":[1,2,3,4,5,6,7,8,9,10],"k":1,"theta0":{FRAC_PI_2},
            "tolerances":{{"closed_form":1e-10,"final_kernel_sup":1e-3}}}}"#
    )))
    .map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (n, s) in (1..=10).zip(k1.column_f64("sup_outside").unwrap()) {
        worst = worst.max((s - (2 * n + 1) as f64 * 2f64.powi(-2 * n)).abs());
    }
    let last_sup = *k1.column_f64("sup_outside").unwrap().last().unwrap();
    let k2 = run_kernel_decay(&cfg(
        r#"{"group":{"n":2,"special":true},"family":[{"law":"power","a":2.0,"p":1.0,"b":0.0}],
            "sweep":[10,20,30],"k":2,"grid":{"theta_steps":12,"phi_steps":8}}"#,
    ))
    .map_err(|e| e.to_string())?;
    let l1 = *k2.column_f64("l1_norm").unwrap().last().unwrap();
    let msg = format!(
        "k=1: max |sup − (2n+1)2^(−2n)| = {worst:.2e}, sup at n=10 {last_sup:.3e}; k=2: ‖h₂‖₁ at n=30 = {l1:.6} (target 1 ± 0.05)"
    );
    let r = ensure(
        worst <= 1e-10 && last_sup < 1e-3 && (l1 - 1.0).abs() <= 0.05,
        msg,
    )?;
    within(start.elapsed(), Duration::from_secs(60), r)
}

fn semiclassical_limit() -> Outcome {
    let t = run_berezin_limit(&cfg(
        r#"{"group":{"n":2,"special":true},"family":[{"law":"power","a":1.0,"p":1.0,"b":0.0}],
            "sweep":[10,20,40],"symbol":{"kind":"abs_g11_sq"},"test_points":20}"#,
    ))
    .map_err(|e| e.to_string())?;
    let s = t.column_f64("sup_error").unwrap();
    ensure(
        s[1] < s[0] && s[2] < s[1] && s[2] < 0.03,
        format!(
            "sup errors {:.4} > {:.4} > {:.4}, final < 0.03",
            s[0], s[1], s[2]
        ),
    )
}

fn szego_limit() -> Outcome {
    let start = Instant::now();
    let t = run_szego(&cfg(
        r#"{"group":{"n":2,"special":true},"family":[{"law":"power","a":1.0,"p":1.0,"b":0.0}],
            "sweep":[20,40,100],"symbol":{"kind":"abs_g11_sq"},"taus":[0.2,0.5,0.8]}"#,
    ))
    .map_err(|e| e.to_string())?;
    let lam = t.column_f64("lambda1").unwrap();
    let tau = t.column_f64("tau").unwrap();
    let count = t.column_f64("counting_fraction").unwrap();
    let mut worst = [0.0f64; 3];
    for i in 0..lam.len() {
        let slot = [20.0, 40.0, 100.0]
            .iter()
            .position(|&l| l == lam[i])
            .unwrap();
        worst[slot] = worst[slot].max((count[i] - (1.0 - tau[i])).abs());
    }
    let ok = worst[0] <= 0.06 && worst[1] <= 0.03 && worst[2] <= 0.015;
    let r = ensure(
        ok,
        format!(
            "max |N⁺/d − (1−τ)| = {:.4}, {:.4}, {:.4} (bounds 0.06, 0.03, 0.015)",
            worst[0], worst[1], worst[2]
        ),
    )?;
    within(start.elapsed(), Duration::from_secs(300), r)
}

fn cross_construction() -> Outcome {
    let mut worst = 0.0f64;
    let check = |w: &Weight, samples: Vec<UnitaryElement>| -> f64 {
        let rep = irrep(w).unwrap();
        let v = rep.highest_vector();
        samples
            .iter()
            .map(|g| (v.dotc(&rep.apply_to_highest(g)) - conical_eval(w, g.matrix())).norm())
            .fold(0.0, f64::max)
    };
    for m in 0..=6 {
        worst = worst.max(check(&su2(m), special_haar_sample(2, 200 + m as u64, 50)));
    }
    worst = worst.max(check(&Weight::new(vec![1, 1], 0), haar_sample(3, 300, 50)));
    ensure(
        worst <= 1e-9,
        format!("max |⟨v, σ(g)v⟩ − minor product| = {worst:.3e} (tol 1e-9)"),
    )
}

fn main() {
    let criteria: [Criterion; 13] = [
        (1, "Schur/Berezin normalization", schur_normalization),
        (2, "idempotent convolution", idempotent_convolution),
        (3, "Toeplitz algebra axioms", toeplitz_axioms),
        (4, "equivariance", equivariance),
        (5, "averaged-symbol identity", averaged_symbol),
        (6, "surjectivity and kernel witness", surjectivity),
        (7, "commuting families", commuting_families),
        (8, "Berezin trace and HS pairing", berezin_trace),
        (9, "multiplicity stabilization", multiplicity_stabilization),
        (10, "approximate identity decay", approximate_identity),
        (11, "Berezin semiclassical limit", semiclassical_limit),
        (12, "Szegő limit", szego_limit),
        (13, "cross-construction consistency", cross_construction),
    ];
    let mut failed = Vec::new();
    for (id, name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS  {id:>2} {name}: {detail}"),
            Err(detail) => {
                println!("FAIL  {id:>2} {name}: {detail}");
                failed.push(id);
            }
        }
    }
    println!(
        "acceptance: {} passed, {} failed {:?}",
        13 - failed.len(),
        failed.len(),
        failed
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
