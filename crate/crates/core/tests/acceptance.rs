//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Quantitative criteria assert against analytic oracles at fixed tolerances;
//! statistical criteria run with fixed seeds so the suite is deterministic.

use burgers_spde::dynamics::{simulate_path, ControlFunction, Nonlinearity, SimConfig};
use burgers_spde::estimators::{
    bel_gradient, critical_lambda, exp_moment, fd_semigroup_gradient, invariant_tail,
    lambda_scan, linear_fit, linear_oracle_moment, lipschitz_probe, mean_and_se,
    variational_check, ControlSpec, FunctionalKind, GradientQuery, PathFunctional, TailConfig,
    TestFunctional,
};
use burgers_spde::exec::Workers;
use burgers_spde::noise::{
    ou_decay, ou_exact_step, ou_path, ou_sigma_sq, sup_l4_statistic, NoisePath, OuState,
    K_HAT_ALPHA_GRID,
};
use burgers_spde::spectral::{BasisSpec, SineBasis};
use burgers_spde::Field;
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

fn workers() -> Workers {
    Workers::new(4)
}

fn random_unit_field(n: usize, rng: &mut SmallRng) -> Field {
    let f = Field::from_coeffs((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    let norm = f.l2_norm();
    f.scale(1.0 / norm)
}

/// Criterion 1: |⟨B_n(x), x⟩| ≤ 1e−10 ‖x‖³ over 100 random fields for each
/// n ∈ {8, 16, 32, 64}.
#[test]
fn criterion_01_skew_identity() {
    let mut rng = SmallRng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for n in [8usize, 16, 32, 64] {
        let basis = SineBasis::new(BasisSpec::dealiased(n));
        for _ in 0..100 {
            let x = Field::from_coeffs((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let normalized = basis.burgers_nonlinearity(&x).dot(&x).abs() / x.l2_norm().powi(3);
            worst = worst.max(normalized);
        }
    }
    let pass = worst <= 1e-10;
    println!("criterion 01 (skew identity): {} — max |<B(x),x>|/‖x‖³ = {worst:.3e}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "skew identity violated: {worst:.3e} > 1e-10");
}

/// Criterion 2: single-step mean and variance of the exact OU step match the
/// closed forms within 4 SE over 1e5 repetitions, for γ ∈ {0, 0.2} and
/// α ∈ {0, 10}.
#[test]
fn criterion_02_ou_exactness() {
    let reps = 100_000usize;
    let h = 0.05;
    let coeffs = vec![0.3, -0.2, 0.5, 0.1];
    let n = coeffs.len();
    let mut worst_mean_dev = 0.0f64;
    let mut worst_var_dev = 0.0f64;
    for (case, &(gamma, alpha)) in [(0.0, 0.0), (0.0, 10.0), (0.2, 0.0), (0.2, 10.0)]
        .iter()
        .enumerate()
    {
        let state = OuState { t: 0.0, alpha, gamma, coeffs: coeffs.clone() };
        let mut rng = SmallRng::seed_from_u64(202 + case as u64);
        let mut sum = vec![0.0; n];
        let mut sum_sq = vec![0.0; n];
        let mut draws = vec![0.0; n];
        for _ in 0..reps {
            for d in draws.iter_mut() {
                *d = StandardNormal.sample(&mut rng);
            }
            let next = ou_exact_step(&state, h, &draws);
            for k in 0..n {
                sum[k] += next.coeffs[k];
                sum_sq[k] += next.coeffs[k] * next.coeffs[k];
            }
        }
        let nf = reps as f64;
        for k in 0..n {
            let mean = sum[k] / nf;
            let var = sum_sq[k] / nf - mean * mean;
            let exp_mean = ou_decay(k + 1, alpha, h) * coeffs[k];
            let exp_var = ou_sigma_sq(k + 1, alpha, gamma, h);
            let mean_dev = (mean - exp_mean).abs() / (exp_var.sqrt() / nf.sqrt());
            let var_dev = (var - exp_var).abs() / (exp_var * (2.0 / (nf - 1.0)).sqrt());
            worst_mean_dev = worst_mean_dev.max(mean_dev);
            worst_var_dev = worst_var_dev.max(var_dev);
        }
    }
    let pass = worst_mean_dev < 4.0 && worst_var_dev < 4.0;
    println!(
        "criterion 02 (OU exactness): {} — worst mean dev {worst_mean_dev:.2} SE, worst var dev {worst_var_dev:.2} SE",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "OU step moments off: mean {worst_mean_dev:.2} SE, var {worst_var_dev:.2} SE");
}

/// Criterion 3: mean ‖z(2)‖²_{L²} over 2000 paths at γ = 0, α = 0, n = 64
/// matches the truncated trace Σ_{k≤64} (1−e^{−4π²k²})/(2π²k²) within 3 SE.
#[test]
fn criterion_03_stationary_trace_oracle() {
    let n = 64;
    let dt = 1e-3;
    let steps = 2000; // t = 2
    let finals = workers().run(2000, |i| {
        let noise = NoisePath::generate(303, i, dt, steps, n);
        let states = ou_path(&noise, 0.0, 0.0, n);
        states.last().unwrap().coeffs.iter().map(|c| c * c).sum::<f64>()
    });
    let (mean, se) = mean_and_se(&finals);
    let oracle: f64 = (1..=n as u32)
        .map(|k| {
            let ak = PI * PI * (k * k) as f64;
            (1.0 - (-4.0 * ak).exp()) / (2.0 * ak)
        })
        .sum();
    let dev = (mean - oracle).abs() / se;
    let pass = dev <= 3.0;
    println!(
        "criterion 03 (stationary trace): {} — mean {mean:.6} vs oracle {oracle:.6} ({dev:.2} SE)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "trace mismatch: {mean} vs {oracle} ({dev:.2} SE)");
}

/// Criterion 4: zero-noise trajectories satisfy
/// ‖X_t‖ ≤ e^{−π²t} ‖x₀‖ (1+1e−6) on the grid for 20 random x₀, n = 32.
#[test]
fn criterion_04_deterministic_contraction() {
    let mut rng = SmallRng::seed_from_u64(404);
    let cfg = SimConfig::new(0.0, BasisSpec::dealiased(32), 1e-3, 1.0).unwrap();
    let noise = cfg.zero_noise();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x0 = random_unit_field(32, &mut rng);
        let path = simulate_path(&cfg, &x0, &noise, None).unwrap();
        for (t, f) in path.times.iter().zip(&path.fields) {
            let ratio = f.l2_norm() / ((-PI * PI * t).exp() * x0.l2_norm());
            worst = worst.max(ratio);
        }
    }
    let pass = worst <= 1.0 + 1e-6;
    println!(
        "criterion 04 (deterministic contraction): {} — worst ratio to e^(-π²t)‖x₀‖ = {worst:.9}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "contraction violated: ratio {worst}");
}

/// Criterion 5: log-log slope of E[sup_t ‖z_α‖_{L⁴}] over α ∈ {1,…,64}
/// (500 paths each) is at most −(1/4−γ)+0.1 for γ ∈ {0, 0.1}.
#[test]
fn criterion_05_z_alpha_scaling() {
    let n = 64;
    let horizon = 4.0;
    let dt = 2e-3;
    let steps = (horizon / dt) as usize;
    let basis = SineBasis::new(BasisSpec::dealiased(n));
    let w = workers();
    for gamma in [0.0, 0.1] {
        let mut lx = Vec::new();
        let mut ly = Vec::new();
        for &alpha in &K_HAT_ALPHA_GRID {
            let sups = w.run(500, |i| {
                let noise = NoisePath::generate(505, i, dt, steps, n);
                sup_l4_statistic(&noise, alpha, gamma, 0.0, &basis, horizon)
            });
            let (mean, _) = mean_and_se(&sups);
            lx.push(alpha.ln());
            ly.push(mean.ln());
        }
        let (slope, _, _) = linear_fit(&lx, &ly);
        let bound = -(0.25 - gamma) + 0.1;
        let pass = slope <= bound;
        println!(
            "criterion 05 (z_alpha scaling, gamma={gamma}): {} — slope {slope:.4} vs bound {bound:.3}",
            if pass { "PASS" } else { "FAIL" }
        );
        assert!(pass, "decay slope {slope:.4} above {bound:.3} at gamma = {gamma}");
    }
}

/// Criterion 6: with the nonlinearity disabled, the exponential-moment
/// estimate matches the closed-form linear oracle within 3 SE
/// (n = 8, γ = 0, T = 1, λ at 50% of critical, 1e4 paths).
#[test]
fn criterion_06_linear_exponential_moment_oracle() {
    let n = 8;
    let mut cfg = SimConfig::new(0.0, BasisSpec::dealiased(n), 1e-3, 1.0).unwrap();
    cfg.nonlinearity = Nonlinearity::Disabled;
    let lambda = 0.5 * critical_lambda(0.0, 0.0, n, 1.0);
    let oracle = linear_oracle_moment(0.0, 0.0, n, 1.0, lambda).unwrap();
    let functional = PathFunctional::new(FunctionalKind::TerminalL2Sq, lambda);
    let r = exp_moment(&cfg, &Field::zeros(n), &functional, 10_000, 606, &workers()).unwrap();
    let dev = (r.estimate - oracle).abs() / r.std_error;
    let pass = dev <= 3.0;
    println!(
        "criterion 06 (linear moment oracle): {} — MC {:.5}±{:.5} vs oracle {oracle:.5} ({dev:.2} SE)",
        if pass { "PASS" } else { "FAIL" },
        r.estimate,
        r.std_error
    );
    assert!(pass, "linear oracle mismatch: {} vs {oracle} ({dev:.2} SE)", r.estimate);
}

/// Criterion 7: Boué–Dupuis inequality for five controls including u ≡ 0 and
/// the Riccati feedback; every lower bound stays below the log-mean-exp
/// estimate within 3 combined SE, and the oracle closes the gap to 3 SE.
#[test]
fn criterion_07_boue_dupuis_inequality() {
    let n = 8;
    let mut cfg = SimConfig::new(0.0, BasisSpec::dealiased(n), 2e-3, 1.0).unwrap();
    cfg.nonlinearity = Nonlinearity::Disabled;
    let lambda = 0.4 * critical_lambda(0.0, 0.0, n, 1.0);
    let functional = PathFunctional::new(FunctionalKind::TerminalL2Sq, lambda);
    let mut const_ctrl = ControlFunction::zero(&cfg);
    for v in &mut const_ctrl.values {
        *v = Field::basis_vector(n, 1).scale(0.5);
    }
    let mut sin_ctrl = ControlFunction::zero(&cfg);
    for (m, v) in sin_ctrl.values.iter_mut().enumerate() {
        let t = m as f64 * cfg.dt;
        *v = Field::basis_vector(n, 2).scale(0.8 * (2.0 * PI * t).sin());
    }
    let mut burst = ControlFunction::zero(&cfg);
    for (m, v) in burst.values.iter_mut().enumerate() {
        if (m as f64 * cfg.dt) < 0.5 {
            let mut c = vec![0.0; n];
            c[0] = 0.3;
            c[2] = 0.3;
            *v = Field::from_coeffs(c);
        }
    }
    let controls = vec![
        ControlSpec::Zero,
        ControlSpec::OpenLoop { label: "const-e1".into(), control: const_ctrl },
        ControlSpec::OpenLoop { label: "sin-e2".into(), control: sin_ctrl },
        ControlSpec::OpenLoop { label: "burst".into(), control: burst },
        ControlSpec::LqOracle,
    ];
    let report =
        variational_check(&cfg, &Field::zeros(n), &functional, &controls, 4000, 707, &workers())
            .unwrap();
    let (gap, gap_se) = report.lq_gap.expect("oracle control present");
    let gap_ok = gap.abs() <= 3.0 * gap_se;
    let pass = report.all_satisfied && gap_ok;
    println!(
        "criterion 07 (Boué–Dupuis): {} — all bounds ≤ lme: {}, oracle gap {gap:.5} (3 SE = {:.5})",
        if pass { "PASS" } else { "FAIL" },
        report.all_satisfied,
        3.0 * gap_se
    );
    for o in &report.outcomes {
        println!("  control {:>9}: E[G − ½‖u‖²] = {:.5} ± {:.5} (ok = {})", o.label, o.mean, o.std_error, o.satisfied);
    }
    assert!(pass, "variational check failed: gap {gap} vs 3 SE {}", 3.0 * gap_se);
}

/// Criterion 8: η_T against the CRN finite difference, relative L² error at
/// most 2% averaged over 10 paths (γ = 0, n = 32, T = 0.5, ε = 1e−4).
#[test]
fn criterion_08_derivative_flow_oracle() {
    let mut rng = SmallRng::seed_from_u64(808);
    let cfg = SimConfig::new(0.0, BasisSpec::dealiased(32), 1e-3, 0.5).unwrap();
    let eps = 1e-4;
    let mut mean_rel = 0.0;
    for p in 0..10u64 {
        let noise = cfg.noise(808, p);
        let x0 = random_unit_field(32, &mut rng);
        let h = random_unit_field(32, &mut rng);
        let base = simulate_path(&cfg, &x0, &noise, None).unwrap();
        let eta = burgers_spde::dynamics::derivative_flow(&base, &h, &cfg).unwrap();
        let bumped = simulate_path(&cfg, &x0.add_scaled(&h, eps), &noise, None).unwrap();
        let fd = bumped.terminal().sub(base.terminal()).scale(1.0 / eps);
        mean_rel += fd.sub(eta.terminal()).l2_norm() / eta.terminal().l2_norm() / 10.0;
    }
    let pass = mean_rel <= 0.02;
    println!(
        "criterion 08 (derivative-flow oracle): {} — mean relative error {mean_rel:.2e}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "derivative flow vs finite difference: {mean_rel:.3e} > 2%");
}

/// Criterion 9: Bismut–Elworthy–Li gradient and the CRN central finite
/// difference have overlapping 95% confidence intervals at 1e4 paths
/// (γ = 0, n = 32, t = 0.5, φ = exp(−‖·‖²), x = h = e₁).
#[test]
fn criterion_09_bel_vs_finite_difference() {
    let cfg = SimConfig::new(0.0, BasisSpec::dealiased(32), 2e-3, 0.5).unwrap();
    let q = GradientQuery {
        x: Field::basis_vector(32, 1),
        h: Field::basis_vector(32, 1),
        t: 0.5,
        phi: TestFunctional::ExpNegL2Sq,
    };
    let w = workers();
    let bel = bel_gradient(&q, &cfg, 10_000, 909, &w).unwrap();
    let fd = fd_semigroup_gradient(&q, &cfg, 1e-2, 10_000, 909, &w).unwrap();
    let pass = bel.overlaps(&fd);
    println!(
        "criterion 09 (BEL vs finite difference): {} — BEL {:.4e}±{:.2e}, FD {:.4e}±{:.2e}",
        if pass { "PASS" } else { "FAIL" },
        bel.value,
        bel.ci_half_width(),
        fd.value,
        fd.ci_half_width()
    );
    assert!(pass, "95% CIs do not overlap: BEL {} ± {}, FD {} ± {}", bel.value, bel.ci_half_width(), fd.value, fd.ci_half_width());
}

/// Criterion 10: Lipschitz-improving probe — fitted slope of log ratio vs
/// log t over t ∈ {0.05, 0.1, 0.2, 0.5, 1.0} lies in [−0.75, 0] at 1e4 CRN
/// paths (γ = 0, x = 0, x′ = 0.1·e₁).
///
/// The probe itself validates the √t-improving bound (the reported constant
/// sup_t ratio·√t is finite and small); the slope band is asserted exactly
/// as stated.
#[test]
fn criterion_10_lipschitz_probe_slope() {
    let cfg = SimConfig::new(0.0, BasisSpec::dealiased(32), 2e-3, 1.0).unwrap();
    let report = lipschitz_probe(
        &cfg,
        &Field::zeros(32),
        &Field::basis_vector(32, 1).scale(0.1),
        TestFunctional::ExpNegL2Sq,
        &[0.05, 0.1, 0.2, 0.5, 1.0],
        10_000,
        2024,
        &workers(),
    )
    .unwrap();
    let slope = report.slope.expect("ratios are positive at this sample size");
    let pass = (-0.75..=0.0).contains(&slope);
    println!(
        "criterion 10 (Lipschitz probe): {} — fitted slope {slope:.3} vs band [-0.75, 0]; sup ratio·√t = {:.4}",
        if pass { "PASS" } else { "FAIL" },
        report.sup_ratio_sqrt_t
    );
    for r in &report.rows {
        println!("  t = {:.2}: ratio {:.3e} ± {:.1e}", r.t, r.ratio, r.std_error);
    }
    assert!(
        pass,
        "fitted slope {slope:.3} outside [-0.75, 0]: the semigroup difference decays at the \
         mixing rate ≥ π² ≈ 9.87, so over t ∈ [0.05, 1] the ratio falls by ~e^{{-9.4}} and the \
         log-log slope lands near -0.3·rate ≈ -3, regardless of φ, x, x′; the √t-improving \
         bound itself holds with sup ratio·√t = {:.4}",
        report.sup_ratio_sqrt_t
    );
}

/// Criterion 11: nonlinear exponential-moment stability at
/// λ = 0.25 × the linear critical value (n = 16, T = 1): half- vs full-sample
/// estimates agree within 2 combined SE, heaviness stays below 50%, and the
/// initial-state dependence is transient (damped at the deterministic
/// contraction rate by T = 1).
#[test]
fn criterion_11_nonlinear_exponential_moment_stability() {
    let n = 16;
    let cfg = SimConfig::new(0.0, BasisSpec::dealiased(n), 4e-3, 1.0).unwrap();
    let lambda = 0.25 * critical_lambda(0.0, 0.0, n, 1.0);
    let w = workers();
    let zero = lambda_scan(&cfg, &Field::zeros(n), FunctionalKind::TerminalL2Sq, &[lambda], 10_000, 111, &w)
        .unwrap()
        .remove(0);
    let from_e1 = lambda_scan(
        &cfg,
        &Field::basis_vector(n, 1),
        FunctionalKind::TerminalL2Sq,
        &[lambda],
        10_000,
        111,
        &w,
    )
    .unwrap()
    .remove(0);
    // eq-of-motion transience proxy: the deterministic flow contracts ‖x‖²
    // at rate 2π², so the admissible initial-state contribution at T is
    // λ e^{−2π²T} ‖x₀‖².
    let damped = lambda * (-2.0 * PI * PI * cfg.horizon).exp();
    let comb = (zero.std_error.powi(2) + from_e1.std_error.powi(2)).sqrt();
    let x_dev = ((from_e1.estimate - damped) - zero.estimate).abs();
    let stable = zero.stable && from_e1.stable;
    let light = zero.heaviness < 0.5 && from_e1.heaviness < 0.5;
    let transient = x_dev <= 3.0 * comb;
    let pass = stable && light && transient;
    println!(
        "criterion 11 (nonlinear moment stability): {} — stable {stable} (half {:.5} vs full {:.5}), heaviness {:.3}/{:.3}, x₀ shift {x_dev:.5} vs 3 SE {:.5}",
        if pass { "PASS" } else { "FAIL" },
        zero.half_estimate,
        zero.estimate,
        zero.heaviness,
        from_e1.heaviness,
        3.0 * comb
    );
    assert!(pass, "stability: {stable}, heaviness ok: {light}, transience: {transient}");
}

/// Criterion 12: invariant-measure tails. The n = 1 linear system recovers
/// the analytic tail slope −π² within 15% (deep-tail window, where the χ²
/// log-prefactor is negligible); the full Burgers system at n = 32 over a
/// T = 200 run has a negative slope with R² ≥ 0.9 on the central-99% window.
#[test]
fn criterion_12_invariant_measure_tails() {
    // n = 1 linear: the stationary law is N(0, 1/(2π²)) per mode, so ‖X‖² is
    // a scaled χ²₁ with asymptotic log-survival slope −π².
    let mut lin_cfg = SimConfig::new(0.0, BasisSpec::dealiased(1), 5e-3, 1.0).unwrap();
    lin_cfg.nonlinearity = Nonlinearity::Disabled;
    let deep_tail = TailConfig {
        burn_in: 10.0,
        sample_horizon: 20_000.0,
        thinning: 0.1,
        q_lo: 0.99,
        q_hi: 0.9999,
        thresholds: 25,
    };
    let fit1 = invariant_tail(&lin_cfg, &deep_tail, 7).unwrap();
    let target = -PI * PI;
    let rel = (fit1.slope / target - 1.0).abs();
    let pass1 = rel <= 0.15;
    println!(
        "criterion 12a (n=1 linear tail): {} — slope {:.4} vs −π² = {target:.4} ({:.1}% off, {} samples)",
        if pass1 { "PASS" } else { "FAIL" },
        fit1.slope,
        rel * 100.0,
        fit1.samples
    );

    // Full Burgers, n = 32, T = 200 total.
    let cfg = SimConfig::new(0.0, BasisSpec::dealiased(32), 2e-3, 1.0).unwrap();
    let tail = TailConfig::central99(10.0, 190.0, 0.05);
    let fit2 = invariant_tail(&cfg, &tail, 11).unwrap();
    let pass2 = fit2.slope < 0.0 && fit2.r2 >= 0.9;
    println!(
        "criterion 12b (Burgers tail): {} — slope {:.4}, R² {:.4}, {} samples",
        if pass2 { "PASS" } else { "FAIL" },
        fit2.slope,
        fit2.r2,
        fit2.samples
    );
    assert!(pass1, "n=1 slope {:.4} misses −π² by {:.1}%", fit1.slope, rel * 100.0);
    assert!(pass2, "Burgers tail: slope {:.4}, R² {:.4}", fit2.slope, fit2.r2);
}

/// Criterion 13: bit-identical results for worker counts {1, 4, 8} with a
/// fixed seed, across one representative of each estimator family.
#[test]
fn criterion_13_worker_count_reproducibility() {
    let pools = [Workers::new(1), Workers::new(4), Workers::new(8)];
    let mut summaries: Vec<Vec<u64>> = Vec::new();
    for w in &pools {
        let mut bits = Vec::new();
        // Exponential moment on the nonlinear system.
        let cfg = SimConfig::new(0.0, BasisSpec::dealiased(8), 2e-3, 0.5).unwrap();
        let f = PathFunctional::new(FunctionalKind::SupL2Sq, 1.0);
        let r = exp_moment(&cfg, &Field::zeros(8), &f, 400, 1313, w).unwrap();
        bits.extend([r.estimate.to_bits(), r.std_error.to_bits(), r.heaviness.to_bits()]);
        // Lambda scan row.
        let row = lambda_scan(&cfg, &Field::zeros(8), FunctionalKind::TerminalL2Sq, &[0.8], 400, 1313, w)
            .unwrap()
            .remove(0);
        bits.extend([row.estimate.to_bits(), row.std_error.to_bits(), row.half_estimate.to_bits()]);
        // Variational report.
        let mut lin = cfg;
        lin.nonlinearity = Nonlinearity::Disabled;
        let functional = PathFunctional::new(FunctionalKind::TerminalL2Sq, 1.0);
        let rep = variational_check(
            &lin,
            &Field::zeros(8),
            &functional,
            &[ControlSpec::Zero, ControlSpec::LqOracle],
            200,
            1313,
            w,
        )
        .unwrap();
        bits.extend([rep.baseline_estimate.to_bits(), rep.best_bound.to_bits()]);
        // Gradient estimators.
        let q = GradientQuery {
            x: Field::basis_vector(8, 1),
            h: Field::basis_vector(8, 1),
            t: 0.5,
            phi: TestFunctional::ExpNegL2Sq,
        };
        let bel = bel_gradient(&q, &cfg, 300, 1313, w).unwrap();
        let fd = fd_semigroup_gradient(&q, &cfg, 1e-2, 300, 1313, w).unwrap();
        bits.extend([bel.value.to_bits(), bel.std_error.to_bits(), fd.value.to_bits()]);
        // Lipschitz probe row.
        let probe = lipschitz_probe(
            &cfg,
            &Field::zeros(8),
            &Field::basis_vector(8, 1).scale(0.1),
            TestFunctional::ExpNegL2Sq,
            &[0.25, 0.5],
            300,
            1313,
            w,
        )
        .unwrap();
        for row in &probe.rows {
            bits.extend([row.ratio.to_bits(), row.std_error.to_bits()]);
        }
        summaries.push(bits);
    }
    let pass = summaries.iter().all(|s| s == &summaries[0]);
    println!(
        "criterion 13 (worker reproducibility): {} — {} summary numbers identical across pools of 1/4/8 threads",
        if pass { "PASS" } else { "FAIL" },
        summaries[0].len()
    );
    assert!(pass, "results differ across worker counts");
}
