//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them all).
//! Criterion 9 (byte-identical CLI output) lives in the CLI crate's tests.

use bubblecert_core::certify::{appendix_b1_suite, appendix_b2_suite, certify_range, Regime};
use bubblecert_core::exact::Sign;
use bubblecert_core::suites::{
    bubble_suite, curvature_suite, energy_f0_suite, energy_hessian_suite, moments_suite,
    SuiteConfig,
};
use std::time::Instant;

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion}: {} -- {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion}: {detail}");
}

#[test]
fn criterion_1_appendix_constant_table() {
    let t = Instant::now();
    let b1 = appendix_b1_suite(70);
    let b2 = appendix_b2_suite(53);
    let elapsed = t.elapsed();

    let expected_b1 = [
        ("q_L(9)", "32"),
        ("q_L'(9)", "118"),
        ("q(53)", "105696"),
        ("q'(53)", "110340"),
        ("q_U(70)", "287074/15"),
        ("q_U'(70)", "178522037/7200"),
        ("q_U''(70)", "10910017/4800"),
        ("gamma(70)", "-118392"),
        ("gamma'(70)", "-744953/5"),
        ("gamma''(70)", "-136479/10"),
    ];
    let expected_b2 = [
        ("q_U(53)", "169857/28"),
        ("q_U'(53)", "20672955/1568"),
        ("q_U''(53)", "5182395/3136"),
        ("alpha identity", "7047/6272"),
    ];
    let mut ok = true;
    for (name, value) in expected_b1 {
        let row = b1.rows.iter().find(|r| r.name == name);
        ok &= row.is_some_and(|r| r.matches && r.paper == value && r.computed == value);
    }
    for (name, value) in expected_b2 {
        let row = b2.rows.iter().find(|r| r.name == name);
        ok &= row.is_some_and(|r| r.matches && r.paper == value && r.computed == value);
    }
    ok &= b1.rows.iter().all(|r| r.matches) && b2.rows.iter().all(|r| r.matches);
    ok &= elapsed.as_secs_f64() < 1.0;
    report(
        1,
        ok,
        &format!(
            "all {} checkpoint constants exact in {:.0?}",
            b1.rows.len() + b2.rows.len(),
            elapsed
        ),
    );
}

#[test]
fn criterion_2_mid_regime_certificates() {
    let t = Instant::now();
    let certs = certify_range(25, 52);
    let elapsed = t.elapsed();
    let mut ok = certs.len() == 28;
    for (n, c) in &certs {
        let c = c.as_ref().unwrap_or_else(|e| panic!("n={n}: {e}"));
        ok &= c.regime == Regime::Mid && c.d == 4;
        ok &= c.checks["discriminant_positive"].sign == Sign::Positive;
        ok &= c.checks["r_n_root"].sign == Sign::Zero;
        ok &= c.checks["r_n_equals_i_prime_poly"].pass;
        ok &= c.checks["i_prime_1_zero"].sign == Sign::Zero;
        ok &= c.checks["i_second_1_negative"].sign == Sign::Negative;
        ok &= c.checks["j_1_negative"].sign == Sign::Negative;
        // -e1 - e2 sqrt(e3), all positive
        ok &= c.checks["i_second_surd_form"].pass;
        ok &= c.checks["j_1_surd_form"].pass;
        ok &= c.valid();
    }
    ok &= elapsed.as_secs_f64() < 10.0;
    report(
        2,
        ok,
        &format!("28 exact mid-regime certificates in {:.0?}", elapsed),
    );
}

#[test]
fn criterion_3_high_regime_certificates_and_ladders() {
    let t = Instant::now();
    let certs = certify_range(53, 200);
    let b1 = appendix_b1_suite(200);
    let b2 = appendix_b2_suite(200);
    let elapsed = t.elapsed();
    let mut ok = certs.len() == 148;
    for (n, c) in &certs {
        let c = c.as_ref().unwrap_or_else(|e| panic!("n={n}: {e}"));
        ok &= c.regime == Regime::High && c.d == 1;
        ok &= c.checks["p_n_root"].sign == Sign::Zero;
        ok &= c.checks["i_prime_1_zero"].sign == Sign::Zero;
        ok &= c.checks["i_second_1_negative"].sign == Sign::Negative;
        ok &= c.checks["j_1_negative"].sign == Sign::Negative;
        ok &= c.valid();
    }
    // q_L > 0 on 9..200, q_U > 0 in both alpha-variants, gamma < 0 from 70.
    ok &= b1.sweep_ok && b1.ladder_ok && b2.sweep_ok && b2.ladder_ok;
    ok &= elapsed.as_secs_f64() < 30.0;
    report(
        3,
        ok,
        &format!("148 exact high-regime certificates + ladders in {:.0?}", elapsed),
    );
}

#[test]
fn criterion_4_f0_closed_vs_quadrature() {
    let t = Instant::now();
    let rep = energy_f0_suite(&SuiteConfig::default());
    let elapsed = t.elapsed();
    let mut ok = rep.pass();
    ok &= elapsed.as_secs_f64() < 60.0;
    for l in &rep.lines {
        assert!(l.pass, "{}: {}", l.label, l.detail);
    }
    report(
        4,
        ok,
        &format!("closed form vs double-integral quadrature at (n,eps) grid in {:.1?}", elapsed),
    );
}

#[test]
fn criterion_5_hessian_variants() {
    let rep = energy_hessian_suite(&SuiteConfig::default());
    for l in &rep.lines {
        assert!(l.pass, "{}: {}", l.label, l.detail);
    }
    report(5, rep.pass(), "closed vs quadrature Hessians, symmetry, Cholesky margin");
}

#[test]
fn criterion_6_sphere_moment_suite() {
    let rep = moments_suite(&SuiteConfig::default());
    for l in &rep.lines {
        assert!(l.pass, "{}: {}", l.label, l.detail);
    }
    report(
        6,
        rep.pass(),
        "moment formulas vs Monte Carlo, exact reductions, beta recurrence",
    );
}

#[test]
fn criterion_7_bubble_suite() {
    let rep = bubble_suite(&SuiteConfig::default());
    for l in &rep.lines {
        assert!(l.pass, "{}: {}", l.label, l.detail);
    }
    report(7, rep.pass(), "bubble residuals, companion identities, conformal pullback");
}

#[test]
fn criterion_8_curvature_order() {
    let rep = curvature_suite(&SuiteConfig::default());
    for l in &rep.lines {
        assert!(l.pass, "{}: {}", l.label, l.detail);
    }
    report(8, rep.pass(), "scalar-curvature residual decays at cubic order at 20 points");
}
