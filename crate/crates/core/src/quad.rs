//! Adaptive Gauss–Legendre quadrature and exact Beta values.
//!
//! Semi-infinite integrals are mapped onto [0,1) by `r = u/(1-u)`; the
//! integrands in this crate decay polynomially with known degree, so the
//! transformed integrand is smooth and vanishes at the right endpoint.
//! Exact Beta values at integer and half-integer arguments are carried as a
//! rational times an integer power of pi, so certificates never depend on a
//! floating-point Beta.

use crate::exact::{rat_to_string, Rational};
use num_traits::{One, Signed, ToPrimitive};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum QuadError {
    #[error("tolerance not met: requested {requested:e}, achieved {achieved:e} (value {value:e})")]
    ToleranceNotMet {
        value: f64,
        achieved: f64,
        requested: f64,
    },
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),
}

/// Absolute/relative tolerance pair for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_depth: u32,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-10,
            max_depth: 48,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadValue {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: u32,
}

fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on P_n with the usual cosine initial guess.
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_eval(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_eval(n, x);
        nodes[k] = x;
        weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

type Rule = (Vec<f64>, Vec<f64>);

fn rules() -> &'static (Rule, Rule) {
    static RULES: OnceLock<((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>))> = OnceLock::new();
    RULES.get_or_init(|| (legendre_nodes(10), legendre_nodes(21)))
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let ((n10, w10), (n21, w21)) = rules();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let coarse: f64 = n10.iter().zip(w10).map(|(x, w)| w * f(c + h * x)).sum();
    let fine: f64 = n21.iter().zip(w21).map(|(x, w)| w * f(c + h * x)).sum();
    (h * fine, (h * (fine - coarse)).abs())
}

/// Adaptive Gauss–Legendre integration of `f` over the finite interval
/// `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadValue, QuadError> {
    // Bisection stack of (a, b, depth); error budget split by panel width.
    let width = b - a;
    let mut stack = vec![(a, b, 0u32)];
    let mut value = 0.0f64;
    let mut err = 0.0f64;
    let mut panels = 0u32;
    // Whole-interval estimate sets the magnitude entering the relative test.
    let coarse_total: f64 = panel(&f, a, b).0.abs();
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e) = panel(&f, lo, hi);
        let local_budget = (tol.abs + tol.rel * coarse_total.max(value.abs()))
            * ((hi - lo) / width).max(1e-300);
        if e <= local_budget || depth >= tol.max_depth {
            value += v;
            err += e;
            panels += 1;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    let requested = tol.abs + tol.rel * value.abs();
    if err > requested * 4.0 {
        return Err(QuadError::ToleranceNotMet {
            value,
            achieved: err,
            requested,
        });
    }
    Ok(QuadValue {
        value,
        error_estimate: err,
        panels,
    })
}

/// `∫_0^∞ f(r) dr` via the substitution `r = u/(1-u)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, tol: Tolerance) -> Result<QuadValue, QuadError> {
    let g = move |u: f64| {
        let one_minus = 1.0 - u;
        if one_minus <= 0.0 {
            return 0.0;
        }
        let r = u / one_minus;
        let v = f(r) / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

/// `r^p (1+r^2)^-m`, evaluated in log space so that large exponents neither
/// overflow nor underflow prematurely.
pub fn power_kernel(p: f64, m: f64) -> impl Fn(f64) -> f64 {
    move |r: f64| {
        if r <= 0.0 {
            return if p == 0.0 { 1.0 } else { 0.0 };
        }
        (p * r.ln() - m * r.mul_add(r, 0.0).ln_1p()).exp()
    }
}

/// `∫_0^∞ r^p (1+r²)^-m dr` for `2m > p+1`, with the integrand rescaled by
/// its peak value so the absolute/relative tolerances stay meaningful even
/// when the true magnitude is far below 1 (large m drives it to ~e^-m).
/// The shift is folded into the log-space kernel to avoid overflow.
pub fn power_integral(p: f64, m: f64, tol: Tolerance) -> Result<f64, QuadError> {
    if 2.0 * m <= p + 1.0 {
        return Err(QuadError::DivergentIntegral(format!(
            "r^{p} (1+r^2)^-{m} is not integrable at infinity"
        )));
    }
    if p <= -1.0 {
        return Err(QuadError::DivergentIntegral(format!(
            "r^{p} is not integrable at zero"
        )));
    }
    if p < 1.0 && p != 0.0 {
        // One exact integration by parts lifts a rough endpoint exponent:
        // ∫ r^p (1+r²)^-m = 2m/(p+1) ∫ r^{p+2} (1+r²)^-(m+1).
        return Ok(2.0 * m / (p + 1.0) * power_integral(p + 2.0, m + 1.0, tol)?);
    }
    let log_peak = if p > 0.0 {
        let r_star_sq = p / (2.0 * m - p);
        0.5 * p * r_star_sq.ln() - m * r_star_sq.ln_1p()
    } else {
        0.0
    };
    let shifted = move |r: f64| {
        if r <= 0.0 {
            return if p == 0.0 { 1.0 } else { 0.0 };
        }
        (p * r.ln() - m * r.mul_add(r, 0.0).ln_1p() - log_peak).exp()
    };
    let v = integrate_semi_infinite(shifted, tol)?;
    Ok(v.value * log_peak.exp())
}

/// A rational multiple of an integer power of pi.
#[derive(Debug, Clone, PartialEq)]
pub struct PiRational {
    pub rat: Rational,
    pub pi_pow: u32,
}

impl PiRational {
    pub fn rational(rat: Rational) -> Self {
        PiRational { rat, pi_pow: 0 }
    }

    pub fn to_f64(&self) -> f64 {
        self.rat.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.powi(self.pi_pow as i32)
    }

    pub fn mul(&self, rhs: &PiRational) -> PiRational {
        PiRational {
            rat: &self.rat * &rhs.rat,
            pi_pow: self.pi_pow + rhs.pi_pow,
        }
    }

    pub fn scale(&self, c: &Rational) -> PiRational {
        PiRational {
            rat: &self.rat * c,
            pi_pow: self.pi_pow,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.rat.is_positive()
    }
}

impl std::fmt::Display for PiRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.pi_pow {
            0 => write!(f, "{}", rat_to_string(&self.rat)),
            1 => write!(f, "{}*pi", rat_to_string(&self.rat)),
            k => write!(f, "{}*pi^{}", rat_to_string(&self.rat), k),
        }
    }
}

/// Gamma at half-integers: value = rat * sqrt(pi)^half_pi, half_pi in {0,1}.
#[derive(Debug, Clone)]
struct GammaHalf {
    rat: Rational,
    half_pi: u32,
}

fn gamma_half(two_a: u64) -> GammaHalf {
    assert!(two_a >= 1, "gamma argument must be positive");
    if two_a % 2 == 0 {
        // Γ(k) = (k-1)!
        let k = two_a / 2;
        let mut f = Rational::one();
        for j in 1..k {
            f *= Rational::from_integer(j.into());
        }
        GammaHalf { rat: f, half_pi: 0 }
    } else {
        // Γ(1/2) = sqrt(pi); Γ(a+1) = a Γ(a)
        let mut rat = Rational::one();
        let mut a = Rational::new(1.into(), 2.into());
        while a < Rational::new(two_a.into(), 2.into()) {
            rat *= &a;
            a += Rational::one();
        }
        GammaHalf { rat, half_pi: 1 }
    }
}

/// `B(a, b)` for `a = two_a/2`, `b = two_b/2`; always a rational or a
/// rational multiple of pi.
pub fn beta_half(two_a: u64, two_b: u64) -> PiRational {
    let ga = gamma_half(two_a);
    let gb = gamma_half(two_b);
    let gab = gamma_half(two_a + two_b);
    let half_pi = ga.half_pi + gb.half_pi;
    debug_assert_eq!(gab.half_pi, half_pi % 2);
    let pi_pow = (half_pi - gab.half_pi) / 2;
    PiRational {
        rat: ga.rat * gb.rat / gab.rat,
        pi_pow,
    }
}

/// Surface area of the unit sphere `S^{m-1}` in `R^m`.
pub fn sphere_area(ambient_dim: usize) -> PiRational {
    let m = ambient_dim as u64;
    assert!(m >= 1);
    // 2 pi^{m/2} / Γ(m/2)
    let g = gamma_half(m);
    let rat = Rational::from_integer(2.into()) / g.rat;
    let pi_pow = if m % 2 == 0 {
        m / 2
    } else {
        (m - 1) / 2 // one sqrt(pi) cancels against Γ
    };
    PiRational {
        rat,
        pi_pow: pi_pow as u32,
    }
}

/// `∫_0^∞ s^alpha (1+s^2)^-m ds = B((alpha+1)/2, m-(alpha+1)/2)/2` exactly,
/// for integer `alpha >= 0` with `2m > alpha + 1`.
pub fn half_line_power_integral(alpha: u64, m: u64) -> Result<PiRational, QuadError> {
    if 2 * m <= alpha + 1 {
        return Err(QuadError::DivergentIntegral(format!(
            "s^{alpha} (1+s^2)^-{m} is not integrable at infinity"
        )));
    }
    let two_a = alpha + 1;
    let two_b = 2 * m - alpha - 1;
    Ok(beta_half(two_a, two_b).scale(&Rational::new(1.into(), 2.into())))
}

/// Outcome of one beta-recurrence verification.
#[derive(Debug, Clone)]
pub struct BetaRecurrenceReport {
    pub alpha: Rational,
    pub m: u64,
    pub ratio: Rational,
    pub lhs_quad: f64,
    pub rhs_quad: f64,
    pub residual: f64,
    pub exact_lhs: Option<PiRational>,
    pub pass: bool,
}

/// Checks `∫ s^α (1+s²)^-m = (2m-α-3)/(α+1) ∫ s^{α+2} (1+s²)^-m` by
/// adaptive quadrature of both sides, and against the exact Beta value when
/// `α` is a non-negative integer.
pub fn beta_recurrence_check(alpha: &Rational, m: u64, tol: f64) -> Result<BetaRecurrenceReport, QuadError> {
    let alpha_f = alpha.to_f64().expect("alpha fits in f64");
    if *alpha <= -Rational::one() {
        return Err(QuadError::DivergentIntegral(format!(
            "s^{} is not integrable at zero",
            rat_to_string(alpha)
        )));
    }
    // α + 3 < 2m guards the α+2 side at infinity.
    if alpha + Rational::from_integer(3.into()) >= Rational::from_integer((2 * m).into()) {
        return Err(QuadError::DivergentIntegral(format!(
            "recurrence requires {} + 3 < {}",
            rat_to_string(alpha),
            2 * m
        )));
    }
    let quad_tol = Tolerance::default();
    let lhs = power_integral(alpha_f, m as f64, quad_tol)?;
    let rhs = power_integral(alpha_f + 2.0, m as f64, quad_tol)?;
    let two_m = Rational::from_integer((2 * m).into());
    let three = Rational::from_integer(3.into());
    let ratio = (&two_m - alpha - &three) / (alpha + Rational::one());
    let ratio_f = ratio.to_f64().expect("ratio fits in f64");
    let residual = (lhs - ratio_f * rhs).abs() / lhs.abs().max(1e-300);

    let exact_lhs = if alpha.denom().is_one() && !alpha.is_negative() {
        let a_int = alpha.numer().to_u64().expect("small integer alpha");
        let exact = half_line_power_integral(a_int, m)?;
        let rel = (exact.to_f64() - lhs).abs() / exact.to_f64().abs();
        if rel > tol {
            return Err(QuadError::ToleranceNotMet {
                value: lhs,
                achieved: rel,
                requested: tol,
            });
        }
        Some(exact)
    } else {
        None
    };

    Ok(BetaRecurrenceReport {
        alpha: alpha.clone(),
        m,
        ratio,
        lhs_quad: lhs,
        rhs_quad: rhs,
        residual,
        exact_lhs,
        pass: residual <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_i};

    #[test]
    fn quarter_pi() {
        // ∫_0^∞ (1+s^2)^-2 ds = pi/4
        let v = integrate_semi_infinite(power_kernel(0.0, 2.0), Tolerance::default()).unwrap();
        assert!((v.value - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        // B(1/2, 3/2)/2 = (sqrt(pi) * sqrt(pi)/2)/2 = pi/4
        let exact = half_line_power_integral(0, 2).unwrap();
        assert_eq!(exact, PiRational { rat: rat(1, 4), pi_pow: 1 });
    }

    #[test]
    fn polynomial_is_integrated_exactly() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((v.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn recurrence_alpha_zero_m_two() {
        let r = beta_recurrence_check(&rat_i(0), 2, 1e-10).unwrap();
        assert!(r.pass, "residual {}", r.residual);
        assert_eq!(r.ratio, rat_i(1));
        assert!((r.lhs_quad - std::f64::consts::FRAC_PI_4).abs() < 1e-11);
    }

    #[test]
    fn recurrence_precondition_boundary_rejected() {
        // α = 1, m = 2: the α+2 side diverges; guarded by α + 3 < 2m.
        assert!(matches!(
            beta_recurrence_check(&rat_i(1), 2, 1e-10),
            Err(QuadError::DivergentIntegral(_))
        ));
    }

    #[test]
    fn power_integral_matches_exact_beta_values() {
        // Covers the full exponent range the energy reductions use, up to
        // the n = 200 sweep ceiling where the true value is ~1e-140.
        for (p, m) in [(0u64, 2u64), (4, 7), (23, 23), (55, 53), (27, 24), (202, 198)] {
            let exact = half_line_power_integral(p, m).unwrap().to_f64();
            let quad = power_integral(p as f64, m as f64, Tolerance::default()).unwrap();
            let rel = (exact - quad).abs() / exact.abs();
            assert!(rel < 1e-11, "p={p} m={m}: rel {rel} (exact {exact:e})");
        }
    }

    #[test]
    fn recurrence_with_fractional_alpha() {
        for (num, den, m) in [(-1i64, 2i64, 3u64), (-3, 4, 4), (1, 3, 5), (7, 2, 9)] {
            let r = beta_recurrence_check(&rat(num, den), m, 1e-10).unwrap();
            assert!(r.pass, "alpha={num}/{den}: residual {}", r.residual);
            assert!(r.exact_lhs.is_none());
        }
        // integrable but rough at zero is still rejected below -1
        assert!(matches!(
            beta_recurrence_check(&rat(-3, 2), 4, 1e-10),
            Err(QuadError::DivergentIntegral(_))
        ));
    }

    #[test]
    fn recurrence_at_paper_scale() {
        // α = n-2, m = n-2 for n = 25.
        let r = beta_recurrence_check(&rat_i(23), 23, 1e-10).unwrap();
        assert!(r.pass, "residual {}", r.residual);
        assert!(r.exact_lhs.is_some());
    }

    #[test]
    fn sphere_areas() {
        // σ_1 = 2π (circle), σ_2 = 4π, σ_3 = 2π².
        assert_eq!(sphere_area(2), PiRational { rat: rat_i(2), pi_pow: 1 });
        assert_eq!(sphere_area(3), PiRational { rat: rat_i(4), pi_pow: 1 });
        assert_eq!(sphere_area(4), PiRational { rat: rat_i(2), pi_pow: 2 });
    }

    #[test]
    fn deeper_subdivision_is_stable() {
        let f = power_kernel(27.0, 23.0);
        let base = integrate_semi_infinite(&f, Tolerance::default()).unwrap();
        let deeper = integrate_semi_infinite(
            &f,
            Tolerance { abs: 1e-14, rel: 1e-13, max_depth: 52 },
        )
        .unwrap();
        let rel = (base.value - deeper.value).abs() / base.value.abs();
        assert!(rel < 1e-10, "rel {rel}");
    }

    #[test]
    fn large_exponent_kernel_is_finite() {
        let f = power_kernel(202.0, 198.0);
        for r in [0.0, 1e-8, 0.5, 1.0, 3.0, 1e8, 1e15] {
            assert!(f(r).is_finite());
        }
    }
}
