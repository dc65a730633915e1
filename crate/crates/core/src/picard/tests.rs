use super::*;
use crate::expr::parse;
use crate::hypotheses::EXP_MAP;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn linear(alpha: f64, lambda: Complex64, b: &str) -> Problem {
    Problem::new(
        alpha,
        lambda,
        parse("0").unwrap(),
        parse(b).unwrap(),
        parse(EXP_MAP).unwrap(),
        parse("sin(x)").unwrap(),
        1.0,
        1.0,
        1.0,
        1.0,
    )
    .unwrap()
}

fn ex1() -> Problem {
    Problem::example1(0.5, 0.05, 0.1, c(0.0)).unwrap()
}

fn ex2() -> Problem {
    Problem::example2(0.5, 0.05, c(0.1)).unwrap()
}

fn dense_diff(f: &ChebInterpolant, g: impl Fn(f64) -> Complex64) -> f64 {
    (0..=1000)
        .map(|i| -1.0 + 2.0 * i as f64 / 1000.0)
        .map(|t| (f.eval(t) - g(t)).norm())
        .fold(0.0, f64::max)
}

/// `Γ(α)·^cI^α[γ sin(s+1)](t)` for α = 1/2 after `t − s = v²`, by composite Simpson.
fn direct_half_integral(gamma_coef: f64, t: f64) -> f64 {
    let top = (t + 1.0).sqrt();
    let m = 4000;
    let h = top / m as f64;
    let g = |v: f64| 2.0 * gamma_coef * (t + 1.0 - v * v).sin();
    let mut acc = g(0.0) + g(top);
    for i in 1..m {
        acc += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn constant_operator_returns_lambda() {
    let p = linear(0.5, Complex64::new(3.0, 0.0), "0");
    let f = ChebInterpolant::from_fn(-1.0, 1.0, 129, 2, |t| c(t.sin())).unwrap();
    let out = apply_t(&p, &f, 64).unwrap();
    assert!(dense_diff(&out, |_| c(3.0)) < 1e-14);
}

#[test]
fn unit_forcing_gives_power_rule() {
    let p = linear(0.5, c(0.0), "1");
    let op = PicardOperator::new(&p, 129, 64).unwrap();
    let out = op.apply(&op.zero()).unwrap();
    let g = gamma(1.5).unwrap();
    assert!(dense_diff(&out, |t| c((t + 1.0).sqrt() / g)) < 1e-13);
    assert_eq!(out.eval(-1.0), c(0.0));
}

#[test]
fn first_image_of_example1_matches_direct_quadrature() {
    let p = ex1();
    let op = PicardOperator::new(&p, 129, 64).unwrap();
    let f1 = op.apply(&op.zero()).unwrap();
    let g = gamma(0.5).unwrap();
    for t in [-0.9, -0.5, 0.0, 0.5, 1.0] {
        let oracle = direct_half_integral(0.1, t) / g;
        assert!((f1.eval(t) - c(oracle)).norm() < 1e-12, "t = {t}");
    }
}

#[test]
fn range_escape_is_reported() {
    let mut p = ex1();
    p.psi = parse("2*x").unwrap();
    assert!(matches!(
        PicardOperator::new(&p, 33, 16),
        Err(PicardError::RangeEscape { .. })
    ));
}

#[test]
fn trivial_problem_converges_in_one_step() {
    let p = linear(0.5, c(2.0), "0");
    let sol = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(sol.certificate.iterations, 1);
    assert_eq!(sol.certificate.q, 0.0);
    assert!(dense_diff(&sol.u, |_| c(2.0)) < 1e-15);
    assert!(sol.certificate.residual_sup < 1e-12);
}

#[test]
fn example1_contracts_and_solves() {
    let p = ex1();
    let opts = SolverOptions::default();
    let sol = solve(&p, &opts).unwrap();
    let cert = &sol.certificate;
    assert!((cert.q - 0.1596).abs() < 1e-3, "{}", cert.q);
    for w in sol.state.diff_norm.windows(2).filter(|w| w[1] > 1e-12) {
        assert!(w[1] <= cert.q * w[0] * (1.0 + 1e-10), "{w:?}");
    }
    for (n, d) in sol.state.diff_norm.iter().enumerate() {
        assert!(*d <= sol.state.sup_norm[1] * cert.q.powi(n as i32) * (1.0 + 1e-9));
    }
    assert!(sol.state.sup_norm.iter().all(|&v| v <= cert.r0));
    assert_eq!(sol.u.eval(-1.0), c(0.0));
    assert!(cert.residual_sup <= 1e-6);
    assert!(cert.aposteriori_bound.min(cert.apriori_bound) <= opts.tol);
    let diff = *sol.state.diff_norm.last().unwrap();
    assert_eq!(cert.aposteriori_bound, diff / (1.0 - cert.q));
    // fixed-point property
    let tu = apply_t(&p, &sol.u, opts.quad_order).unwrap();
    assert!(tu.sub(&sol.u).unwrap().check_norm() <= 2.0 * opts.tol);
}

#[test]
fn example2_solves_with_initial_value() {
    let sol = solve(&ex2(), &SolverOptions::default()).unwrap();
    assert!((sol.u.eval(-1.0) - c(0.1)).norm() <= 1e-12);
    assert!(sol.certificate.residual_sup <= 1e-6);
}

#[test]
fn refinement_changes_little() {
    let opts = SolverOptions::default();
    let fine = SolverOptions {
        grid_size: 257,
        quad_order: 128,
        ..opts
    };
    for p in [ex1(), ex2()] {
        let a = solve(&p, &opts).unwrap().u;
        let b = solve(&p, &fine).unwrap().u;
        assert!(dense_diff(&a, |t| b.eval(t)) <= 10.0 * opts.tol);
    }
}

#[test]
fn iteration_cap_is_an_error() {
    let opts = SolverOptions {
        max_iter: 1,
        ..Default::default()
    };
    assert!(matches!(
        solve(&ex1(), &opts),
        Err(PicardError::ToleranceNotReached { iterations: 1, .. })
    ));
}

#[test]
fn failed_hypothesis_names_condition() {
    let p = Problem::example1(0.5, 0.2, 0.1, c(0.0)).unwrap();
    match solve(&p, &SolverOptions::default()) {
        Err(PicardError::HypothesisFailure { name, lhs, rhs, .. }) => {
            assert_eq!(name, "b");
            assert!(lhs.unwrap() >= rhs.unwrap());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn residual_of_exact_constant_is_zero() {
    let p = linear(0.5, c(1.5), "0");
    let u = ChebInterpolant::from_fn(-1.0, 1.0, 17, 1, |_| c(1.5)).unwrap();
    assert!(residual(&p, &u, &interior_grid(64), 64).unwrap() < 1e-12);
}

#[test]
fn residual_of_manufactured_solution() {
    // u = t+1 solves D^α u = a·u + b with b = (t+1)^{1−α}/Γ(2−α) − a·u
    let alpha = FracOrder::new(0.5).unwrap();
    let u = ChebInterpolant::from_fn(-1.0, 1.0, 9, 1, |t| c(t + 1.0)).unwrap();
    let g = gamma(1.5).unwrap();
    let r = residual_with(alpha, &u, &interior_grid(64), 64, |t| {
        let a = 0.5 * (t + 1.0).sin();
        let b = (t + 1.0).sqrt() / g - a * (t + 1.0);
        Ok(c(a * u.eval(t).re + b))
    })
    .unwrap();
    assert!(r <= 1e-8, "{r}");
}

#[test]
fn derivative_bounds_trivial_and_example1() {
    let p = linear(0.5, c(0.0), "0");
    let st = iterate_fixed(&p, &SolverOptions::default(), 3).unwrap();
    assert!(st.deriv_norm.iter().all(|&v| v == 0.0));
    let rep = track_derivative_bounds(&st, &p, 0.0, 0.0).unwrap();
    assert_eq!(rep.sup_derivative, 0.0);

    let p = ex1();
    let sol = solve(&p, &SolverOptions::default()).unwrap();
    let rep = &sol.certificate.derivative_bounds;
    assert!((rep.norms["da_sup_unit"] - 0.05).abs() < 1e-15);
    assert!((rep.norms["db_sup_unit"] - 0.1).abs() < 1e-12);
    let k = p.kernel_bound();
    assert!((rep.c1_stated - k * (0.05 * rep.norms["dphi_sup_r0"] + 0.1)).abs() < 1e-12);
    assert!(rep.holds_stated && rep.recurrence_holds && rep.holds_rigorous == Some(true));
    assert!(rep.tail_checked > 0 && rep.tail_holds);
    assert!(rep.sup_derivative > 0.0);
}

#[test]
fn stated_derivative_constant_can_fail_where_rigorous_holds() {
    // with Φ = cos the constant built from ‖Φ′‖ undercounts |Φ(f)| near 0
    let sol = solve(&ex2(), &SolverOptions::default()).unwrap();
    let rep = &sol.certificate.derivative_bounds;
    assert!(!rep.holds_stated);
    assert_eq!(rep.holds_rigorous, Some(true));
}

#[test]
fn lens_iterates_of_trivial_problem_are_constant() {
    let p = linear(0.5, c(2.0), "0");
    let opts = LensOptions {
        n_max: 4,
        radial: 17,
        angular: 9,
        ..Default::default()
    };
    let run = lens_iterate(&p, 0.25, &opts).unwrap();
    assert!(run.iterates[0].values().iter().all(|v| *v == c(0.0)));
    for it in &run.iterates[1..] {
        assert!(it.values().iter().all(|v| (v - c(2.0)).norm() < 1e-15));
    }
    let rep = check_tube_inclusion(&run.iterates[..1], 0.1, 1.0, 0.25, 16);
    assert!(rep.holds);
}

#[test]
fn lens_iterates_of_example1() {
    let p = ex1();
    let sol = solve(&p, &SolverOptions::default()).unwrap();
    let cert = &sol.certificate;
    let opts = LensOptions::default();
    let s2 = choose_s2(&p, cert.s1.unwrap(), 0.0, &opts).unwrap();
    assert!(s2 < cert.s1.unwrap());
    let run = lens_iterate(&p, s2, &opts).unwrap();
    let rep = check_tube_inclusion(&run.iterates, cert.r0, p.k, s2, 128);
    assert!(rep.holds, "{rep:?}");
    assert!(rep.stages.iter().all(|s| s.samples >= 512));
    let steps = omega_step_check(&run, lambda_function(&p, cert.r0, s2).unwrap(), 1e-13);
    assert!(steps.bound_holds && steps.ratio_holds, "{steps:?}");
    // ω_{n+1} restricted to the real axis is f_n
    for n in 1..=8 {
        let it = &run.iterates[n];
        let f = &sol.state.history[n];
        for i in 0..=64 {
            let t = -1.0 + 2.0 * i as f64 / 64.0;
            assert!((it.eval(c(t)).unwrap() - f.eval(t)).norm() < 1e-8);
        }
    }
}

#[test]
fn inflated_coefficient_breaks_tube_inclusion() {
    let base = ex1();
    let cert = solve(&base, &SolverOptions::default()).unwrap().certificate;
    let p = Problem::example1(0.5, 5.0, 0.1, c(0.0)).unwrap();
    let s2 = 0.25;
    assert!(lambda_function(&p, cert.r0, s2).unwrap() >= 1.0);
    let opts = LensOptions {
        n_max: 6,
        radial: 33,
        angular: 9,
        ..Default::default()
    };
    let run = lens_iterate(&p, s2, &opts).unwrap();
    let rep = check_tube_inclusion(&run.iterates, cert.r0, p.k, s2, 64);
    assert!(!rep.holds);
    assert!(rep.stages.iter().any(|s| s.worst_margin < 0.0));
}

#[test]
fn lens_parameters_are_validated() {
    let p = ex1();
    let opts = LensOptions::default();
    assert!(matches!(
        choose_s2(&p, 0.5, -1.0, &opts),
        Err(PicardError::InvalidOption(_))
    ));
    assert!(lens_iterate(&p, 1.5, &opts).is_err());
    let mut q = ex1();
    q.psi = parse("2*x").unwrap();
    assert!(matches!(
        lens_iterate(&q, 0.25, &opts),
        Err(PicardError::InclusionFailure(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn operator_is_lipschitz_with_q(c0 in -0.3f64..0.3, c1 in -0.3f64..0.3, c2 in -0.3f64..0.3, d0 in -0.3f64..0.3, d1 in -0.3f64..0.3) {
        let p = ex1();
        let q = certify(&p, 0).unwrap();
        let op = PicardOperator::new(&p, 65, 32).unwrap();
        let f = ChebInterpolant::from_fn(-1.0, 1.0, 65, op.grading(), |t| c(c0 + c1 * t + c2 * t * t).scale(0.4)).unwrap();
        let g = ChebInterpolant::from_fn(-1.0, 1.0, 65, op.grading(), |t| c(d0 + d1 * (3.0 * t).sin()).scale(0.4)).unwrap();
        let lhs = op.apply(&f).unwrap().sub(&op.apply(&g).unwrap()).unwrap().check_norm();
        let rhs = f.sub(&g).unwrap().check_norm();
        prop_assert!(lhs <= q.q * rhs * (1.0 + 1e-9) + 1e-15);
    }
}
