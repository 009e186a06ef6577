//! Per-dimension exact sign certificates: the choice of the radial
//! polynomial f, criticality at s = 1, the concavity and negativity signs,
//! and every checkpoint constant of the two verification ladders.
//!
//! Two regimes: n >= 53 uses d = 1 with a1 = -1; 25 <= n <= 52 uses d = 4
//! with a fixed rational tail. In both, a0 lives in a quadratic extension
//! Q(sqrt(radicand)) and every sign is decided exactly there.

use crate::energy::{i_poly, j_poly, EnergyError};
use crate::exact::{
    rat, rat_i, rat_to_string, ExactError, Poly, RatPoly, Rational, Sign, Surd, SurdPoly,
};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum CertifyError {
    #[error("unsupported dimension {0}: certificates exist for n >= 25")]
    UnsupportedDimension(i64),
    #[error("regime error: {0}")]
    Regime(String),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Which coefficient scheme a dimension uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// n >= 53: d = 1, a1 = -1.
    High,
    /// 25 <= n <= 52: d = 4, fixed rational tail.
    Mid,
}

impl Regime {
    pub fn of(n: i64) -> Result<Regime, CertifyError> {
        if n >= 53 {
            Ok(Regime::High)
        } else if (25..=52).contains(&n) {
            Ok(Regime::Mid)
        } else {
            Err(CertifyError::UnsupportedDimension(n))
        }
    }

    pub fn d(self) -> u32 {
        match self {
            Regime::High => 1,
            Regime::Mid => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::High => "high",
            Regime::Mid => "mid",
        }
    }
}

// ---------------------------------------------------------------------------
// The checkpoint polynomials (variable = the dimension n).
// ---------------------------------------------------------------------------

/// `p_A(n) = (n-7)(n-8)²(n+7)`.
pub fn p_a_poly() -> RatPoly {
    RatPoly::from_roots(&[rat_i(7), rat_i(8), rat_i(8), rat_i(-7)])
}

/// `p_B(n) = (n+3)(n-6)(n-9)(n-10)`.
pub fn p_b_poly() -> RatPoly {
    RatPoly::from_roots(&[rat_i(-3), rat_i(6), rat_i(9), rat_i(10)])
}

/// `q(n) = 9 p_B(n) - 8 p_A(n)`, the discriminant numerator.
pub fn q_poly() -> RatPoly {
    p_b_poly().scale(&rat_i(9)).sub(&p_a_poly().scale(&rat_i(8)))
}

/// `q_L(n) = p_A(n) - p_B(n)`; the quartic terms cancel.
pub fn q_l_poly() -> RatPoly {
    p_a_poly().sub(&p_b_poly())
}

/// `q_U(n) = alpha p_B(n) - p_A(n)` for a given bracketing constant.
pub fn q_u_poly(alpha: &Rational) -> RatPoly {
    p_b_poly().scale(alpha).sub(&p_a_poly())
}

/// The first ladder constant, `31439/28800`; `9 - 8α` is the square of
/// `31/60`, so the γ ladder stays rational.
pub fn alpha_b1() -> Rational {
    rat(31439, 28800)
}

/// The second ladder constant, `7047/6272 = (9 - 36/56²)/8`.
pub fn alpha_b2() -> Rational {
    rat(7047, 6272)
}

/// `γ(n) = -(5 + 3 sqrt(9-8α)) p_B(n) + 6 p_A(n)` with α = 31439/28800,
/// hence exactly `-(131/20) p_B + 6 p_A`.
pub fn gamma_poly() -> RatPoly {
    let root = Surd::sqrt_of(rat_i(9) - rat_i(8) * alpha_b1())
        .expect("positive radicand")
        .a()
        .clone(); // perfect square collapses to 31/60
    let factor = rat_i(5) + rat_i(3) * root;
    p_b_poly().scale(&factor).neg().add(&p_a_poly().scale(&rat_i(6)))
}

// ---------------------------------------------------------------------------
// High regime: the quadratic p_n and its root a0.
// ---------------------------------------------------------------------------

/// `p_n(a0) = a0²/(n-6) - 3(n+3)a0/((n-8)(n-7))
///          + 2(n+3)(n+7)/((n-10)(n-7)(n-9))`, as a quadratic in a0.
pub fn p_n_quadratic(n: i64) -> Result<RatPoly, CertifyError> {
    if n <= 10 {
        return Err(CertifyError::Regime(format!(
            "p_n denominators vanish for n <= 10 (got {n})"
        )));
    }
    Ok(Poly::new(vec![
        rat(2 * (n + 3) * (n + 7), (n - 10) * (n - 7) * (n - 9)),
        rat(-3 * (n + 3), (n - 8) * (n - 7)),
        rat(1, n - 6),
    ]))
}

/// The radicand `9 - 8 p_A(n)/p_B(n)` of the high-regime root.
pub fn high_radicand(n: i64) -> Rational {
    let nn = rat_i(n);
    rat_i(9) - rat_i(8) * p_a_poly().eval(&nn) / p_b_poly().eval(&nn)
}

/// `a0 = (n+3)(n-6)/(2(n-7)(n-8)) (3 + sqrt(9 - 8 p_A/p_B))` for n >= 53.
pub fn a0_high(n: i64) -> Result<Surd, CertifyError> {
    if n < 53 {
        return Err(CertifyError::Regime(format!(
            "the high-regime root is certified only for n >= 53 (got {n})"
        )));
    }
    let radicand = high_radicand(n);
    if !radicand.is_positive() {
        return Err(CertifyError::Regime(format!(
            "radicand is not positive at n = {n}"
        )));
    }
    let k = rat((n + 3) * (n - 6), 2 * (n - 7) * (n - 8));
    Ok(Surd::new(rat_i(3) * &k, k, radicand)?)
}

// ---------------------------------------------------------------------------
// Mid regime: the quadratic r_n in a0 from the printed γ/δ tables.
// ---------------------------------------------------------------------------

/// The fixed mid-regime tail `a1 = -3/5, a2 = 1/8, a3 = -1/125, a4 = 1e-4`.
pub fn mid_tail() -> [Rational; 4] {
    [rat(-3, 5), rat(1, 8), rat(-1, 125), rat(1, 10_000)]
}

/// `γ_1..γ_4`: the a0-linear weights of α_1..α_4.
pub fn gamma_table(n: i64) -> [Rational; 4] {
    [
        rat(-6 * (n + 3), 5),
        rat(n + 5, 4),
        rat(-2 * (n + 7), 125),
        rat(n + 9, 5000),
    ]
}

/// `δ_2..δ_8`: the a0-free parts of α_2..α_8.
pub fn delta_table(n: i64) -> [Rational; 7] {
    [
        rat(9 * (n + 7), 25),
        rat(-3 * (n + 11), 20),
        rat(1009 * n + 16385, 40_000),
        rat(-(53 * n + 1207), 25_000),
        rat(89 * n + 2709, 1_000_000),
        rat(-(n + 39), 625_000),
        rat(n + 49, 100_000_000),
    ]
}

/// `(q+2)/(n-6-2q) Π_{j<=q} (n-1+2j)/(n-5-2j)`, the weight of α_q in I'(1).
fn i_prime_weight(n: i64, q: i64) -> Rational {
    let mut v = rat(q + 2, n - 6 - 2 * q);
    for j in 0..=q {
        v *= rat(n - 1 + 2 * j, n - 5 - 2 * j);
    }
    v
}

/// `r_n(a0) = I'(1)` as an exact quadratic in a0, via the printed tables.
pub fn rn_quadratic(n: i64) -> Result<RatPoly, CertifyError> {
    if !(25..=52).contains(&n) {
        return Err(CertifyError::Regime(format!(
            "r_n is defined for 25 <= n <= 52 (got {n})"
        )));
    }
    let gamma = gamma_table(n);
    let delta = delta_table(n);
    let quad = rat(2 * (n - 1) * (n + 1), (n - 6) * (n - 5));
    let lin: Rational = (1..=4)
        .map(|q| &gamma[q - 1] * i_prime_weight(n, q as i64))
        .sum();
    let cons: Rational = (2..=8)
        .map(|q| &delta[q - 2] * i_prime_weight(n, q as i64))
        .sum();
    Ok(Poly::new(vec![cons, lin, quad]))
}

/// Independent route to the same quadratic: I'(1) computed over the ring of
/// polynomials in a0, via the energy-module ladder.
pub fn i_prime_at_1_as_poly_in_a0(n: i64) -> Result<RatPoly, CertifyError> {
    // f = a0 + a1 s + ... + a4 s^4 with a0 the ring variable.
    let tail = mid_tail();
    let mut coeffs: Vec<RatPoly> = vec![RatPoly::identity()];
    coeffs.extend(tail.iter().map(|c| RatPoly::constant(c.clone())));
    let f: Poly<RatPoly> = Poly::new(coeffs);
    let i = i_poly(n, &f)?;
    Ok(i.derivative().eval(&RatPoly::constant(rat_i(1))))
}

/// Mid-regime root `a0 = (-B + sqrt(discrim))/(2A)` of r_n.
pub fn a0_mid(n: i64) -> Result<Surd, CertifyError> {
    let rn = rn_quadratic(n)?;
    let disc = rn.quadratic_discriminant()?;
    if !disc.is_positive() {
        return Err(CertifyError::Regime(format!(
            "discrim(r_n) is not positive at n = {n}"
        )));
    }
    let a = rn.coeff(2);
    let b = rn.coeff(1);
    let half_inv_a = rat(1, 2) / a;
    Ok(Surd::new(-b, rat_i(1), disc)?.scale(&half_inv_a))
}

/// The certified radial polynomial for dimension n: coefficients
/// `[a0, tail...]` with a0 in Q(sqrt(radicand)).
pub fn certified_f(n: i64) -> Result<(Regime, SurdPoly), CertifyError> {
    let regime = Regime::of(n)?;
    let (a0, tail): (Surd, Vec<Rational>) = match regime {
        Regime::High => (a0_high(n)?, vec![rat_i(-1)]),
        Regime::Mid => (a0_mid(n)?, mid_tail().to_vec()),
    };
    let mut coeffs = vec![a0];
    coeffs.extend(tail.into_iter().map(Surd::rational));
    Ok((regime, Poly::new(coeffs)))
}

// ---------------------------------------------------------------------------
// The certificate itself.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub sign: Sign,
    pub witness: Surd,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct CrosscheckRecord {
    pub value: f64,
    pub exact: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// All exact sign checks and float cross-checks for one dimension.
#[derive(Debug, Clone)]
pub struct DimensionCertificate {
    pub n: i64,
    pub regime: Regime,
    pub d: u32,
    pub a0: Surd,
    pub radicand: Rational,
    pub f: SurdPoly,
    pub checks: BTreeMap<String, CheckRecord>,
    pub crosschecks: BTreeMap<String, CrosscheckRecord>,
}

impl DimensionCertificate {
    pub fn valid(&self) -> bool {
        self.checks.values().all(|c| c.pass) && self.crosschecks.values().all(|c| c.pass)
    }

    pub fn failing_checks(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .filter(|(_, c)| !c.pass)
            .map(|(k, _)| k.clone())
            .collect();
        out.extend(
            self.crosschecks
                .iter()
                .filter(|(_, c)| !c.pass)
                .map(|(k, _)| format!("crosscheck:{k}")),
        );
        out
    }
}

const CROSSCHECK_TOL: f64 = 1e-9;

fn check(map: &mut BTreeMap<String, CheckRecord>, name: &str, witness: Surd, expect: Sign) {
    let sign = witness.sign();
    map.insert(
        name.to_string(),
        CheckRecord { sign, pass: sign == expect, witness },
    );
}

/// Mid-regime surd-form check: the value is `-e1 - e2 sqrt(e3)` with all
/// e_i positive.
fn check_negative_surd_form(map: &mut BTreeMap<String, CheckRecord>, name: &str, witness: Surd) {
    let pass = witness.a().is_negative() && witness.b().is_negative() && witness.radicand().is_positive();
    map.insert(
        name.to_string(),
        CheckRecord { sign: witness.sign(), pass, witness },
    );
}

/// Builds the full certificate for one dimension.
pub fn certify(n: i64) -> Result<DimensionCertificate, CertifyError> {
    let (regime, f) = certified_f(n)?;
    let a0 = f.coeff(0);
    let radicand = a0.radicand().clone();
    let mut checks = BTreeMap::new();

    match regime {
        Regime::High => {
            check(
                &mut checks,
                "radicand_positive",
                Surd::rational(high_radicand(n)),
                Sign::Positive,
            );
            let p_n = p_n_quadratic(n)?;
            check(&mut checks, "p_n_root", p_n.eval_surd(&a0), Sign::Zero);
        }
        Regime::Mid => {
            let rn = rn_quadratic(n)?;
            let disc = rn.quadratic_discriminant()?;
            check(
                &mut checks,
                "discriminant_positive",
                Surd::rational(disc),
                Sign::Positive,
            );
            check(&mut checks, "r_n_root", rn.eval_surd(&a0), Sign::Zero);
            // r_n really is I'(1) as a polynomial in a0.
            let diff = rn.sub(&i_prime_at_1_as_poly_in_a0(n)?);
            check(
                &mut checks,
                "r_n_equals_i_prime_poly",
                Surd::rational(if diff.degree().is_none() { rat_i(0) } else { rat_i(1) }),
                Sign::Zero,
            );
        }
    }

    let i = i_poly(n, &f)?;
    let i_prime = i.derivative();
    let one = Surd::rational(rat_i(1));
    check(&mut checks, "i_prime_1_zero", i_prime.eval(&one), Sign::Zero);
    let i_second = i_prime.derivative().eval(&one);
    check(&mut checks, "i_second_1_negative", i_second.clone(), Sign::Negative);
    let j = j_poly(n, &f)?;
    let j_one = j.eval(&one);
    check(&mut checks, "j_1_negative", j_one.clone(), Sign::Negative);
    if regime == Regime::Mid {
        check_negative_surd_form(&mut checks, "i_second_surd_form", i_second.clone());
        check_negative_surd_form(&mut checks, "j_1_surd_form", j_one.clone());
    }
    for (name, s) in [
        ("i_positive_at_half", rat(1, 2)),
        ("i_positive_at_one", rat_i(1)),
        ("i_positive_at_two", rat_i(2)),
    ] {
        check(&mut checks, name, i.eval(&Surd::rational(s)), Sign::Positive);
    }

    // Float cross-checks: the same quantities rebuilt in pure f64.
    let mut crosschecks = BTreeMap::new();
    let (i2_f64, j1_f64) = float_route(n, regime);
    for (name, float_v, exact_v) in [
        ("i_second_1", i2_f64, i_second.to_f64()),
        ("j_1", j1_f64, j_one.to_f64()),
    ] {
        let rel = (float_v - exact_v).abs() / exact_v.abs().max(1e-300);
        crosschecks.insert(
            name.to_string(),
            CrosscheckRecord {
                value: float_v,
                exact: exact_v,
                rel_err: rel,
                tolerance: CROSSCHECK_TOL,
                pass: rel <= CROSSCHECK_TOL,
            },
        );
    }

    Ok(DimensionCertificate {
        n,
        regime,
        d: regime.d(),
        a0,
        radicand,
        f,
        checks,
        crosschecks,
    })
}

/// Pure-f64 recomputation of I''(1) and J(1); shares no exact arithmetic
/// with the certificate path.
fn float_route(n: i64, regime: Regime) -> (f64, f64) {
    let nf = n as f64;
    let coeffs: Vec<f64> = match regime {
        Regime::High => {
            let pa = (nf - 7.0) * (nf - 8.0) * (nf - 8.0) * (nf + 7.0);
            let pb = (nf + 3.0) * (nf - 6.0) * (nf - 9.0) * (nf - 10.0);
            let rad = 9.0 - 8.0 * pa / pb;
            let a0 = (nf + 3.0) * (nf - 6.0) / (2.0 * (nf - 7.0) * (nf - 8.0)) * (3.0 + rad.sqrt());
            vec![a0, -1.0]
        }
        Regime::Mid => {
            let gamma = [
                -6.0 * (nf + 3.0) / 5.0,
                (nf + 5.0) / 4.0,
                -2.0 * (nf + 7.0) / 125.0,
                (nf + 9.0) / 5000.0,
            ];
            let delta = [
                9.0 * (nf + 7.0) / 25.0,
                -3.0 * (nf + 11.0) / 20.0,
                (1009.0 * nf + 16385.0) / 40000.0,
                -(53.0 * nf + 1207.0) / 25000.0,
                (89.0 * nf + 2709.0) / 1.0e6,
                -(nf + 39.0) / 625000.0,
                (nf + 49.0) / 1.0e8,
            ];
            let weight = |q: i64| {
                let mut v = (q as f64 + 2.0) / (nf - 6.0 - 2.0 * q as f64);
                for j in 0..=q {
                    v *= (nf - 1.0 + 2.0 * j as f64) / (nf - 5.0 - 2.0 * j as f64);
                }
                v
            };
            let a = 2.0 * (nf - 1.0) * (nf + 1.0) / ((nf - 6.0) * (nf - 5.0));
            let b: f64 = (1..=4).map(|q| gamma[q as usize - 1] * weight(q)).sum();
            let c: f64 = (2..=8).map(|q| delta[q as usize - 2] * weight(q)).sum();
            let a0 = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
            vec![a0, -0.6, 0.125, -0.008, 1.0e-4]
        }
    };
    // α and β extraction in f64.
    let d = coeffs.len() - 1;
    let fp: Vec<f64> = (1..=d).map(|k| k as f64 * coeffs[k]).collect();
    let poly_mul = |a: &[f64], b: &[f64]| {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    let f2 = poly_mul(&coeffs, &coeffs);
    let ffp = poly_mul(&coeffs, &fp);
    let fp2 = poly_mul(&fp, &fp);
    let mut alpha = vec![0.0; 2 * d + 1];
    for (q, a) in alpha.iter_mut().enumerate() {
        *a = (nf + 1.0) * f2.get(q).copied().unwrap_or(0.0)
            + 4.0 * if q >= 1 { ffp.get(q - 1).copied().unwrap_or(0.0) } else { 0.0 }
            + 2.0 * if q >= 2 { fp2.get(q - 2).copied().unwrap_or(0.0) } else { 0.0 };
    }
    let mut beta = vec![0.0; 2 * d];
    for (q, b) in beta.iter_mut().enumerate() {
        *b = 2.0 * ffp.get(q).copied().unwrap_or(0.0)
            + if q >= 1 { fp2.get(q - 1).copied().unwrap_or(0.0) } else { 0.0 };
    }
    let i_ladder = |q: i64| {
        let mut v = 1.0 / (nf - 6.0 - 2.0 * q as f64);
        for j in 0..=q {
            v *= (nf - 1.0 + 2.0 * j as f64) / (nf - 5.0 - 2.0 * j as f64);
        }
        v
    };
    let j_ladder = |q: i64| {
        let mut v = 1.0 / (nf - 6.0 - 2.0 * q as f64);
        for j in 0..=q {
            v *= (nf + 3.0 + 2.0 * j as f64) / (nf - 5.0 - 2.0 * j as f64);
        }
        v
    };
    // I(s) = Σ α_q L_q s^{q+2}: I''(1) = Σ (q+2)(q+1) α_q L_q.
    let i_second: f64 = alpha
        .iter()
        .enumerate()
        .map(|(q, a)| (q as f64 + 2.0) * (q as f64 + 1.0) * a * i_ladder(q as i64))
        .sum();
    let j_one: f64 = beta
        .iter()
        .enumerate()
        .map(|(q, b)| b * j_ladder(q as i64))
        .sum();
    (i_second, j_one)
}

/// Certificates for every dimension in `[lo, hi]`, in order; failures are
/// carried per-dimension without aborting the sweep.
pub fn certify_range(lo: i64, hi: i64) -> Vec<(i64, Result<DimensionCertificate, CertifyError>)> {
    (lo..=hi)
        .into_par_iter()
        .map(|n| (n, certify(n)))
        .collect()
}

// ---------------------------------------------------------------------------
// JSON serialization (stable field and map order).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SurdJson {
    pub a: String,
    pub b: String,
    pub radicand: String,
}

impl SurdJson {
    fn of(s: &Surd) -> SurdJson {
        SurdJson {
            a: rat_to_string(s.a()),
            b: rat_to_string(s.b()),
            radicand: rat_to_string(s.radicand()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckJson {
    pub sign: String,
    pub witness: SurdJson,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckJson {
    pub value: f64,
    pub exact: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateJson {
    pub n: i64,
    pub regime: String,
    pub d: u32,
    pub f: Vec<String>,
    pub a0: SurdJson,
    pub checks: BTreeMap<String, CheckJson>,
    pub crosschecks: BTreeMap<String, CrosscheckJson>,
    pub valid: bool,
    pub version: String,
    pub seed: u64,
}

impl DimensionCertificate {
    pub fn to_json(&self, version: &str, seed: u64) -> CertificateJson {
        CertificateJson {
            n: self.n,
            regime: self.regime.as_str().to_string(),
            d: self.d,
            f: self
                .f
                .coeffs()
                .iter()
                .skip(1)
                .map(|c| rat_to_string(c.a()))
                .collect(),
            a0: SurdJson::of(&self.a0),
            checks: self
                .checks
                .iter()
                .map(|(k, c)| {
                    (
                        k.clone(),
                        CheckJson {
                            sign: c.sign.as_str().to_string(),
                            witness: SurdJson::of(&c.witness),
                            pass: c.pass,
                        },
                    )
                })
                .collect(),
            crosschecks: self
                .crosschecks
                .iter()
                .map(|(k, c)| {
                    (
                        k.clone(),
                        CrosscheckJson {
                            value: c.value,
                            exact: c.exact,
                            rel_err: c.rel_err,
                            tolerance: c.tolerance,
                            pass: c.pass,
                        },
                    )
                })
                .collect(),
            valid: self.valid(),
            version: version.to_string(),
            seed,
        }
    }
}

// ---------------------------------------------------------------------------
// Appendix checkpoint suites.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct CheckpointRow {
    pub name: String,
    pub paper: String,
    pub computed: String,
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixReport {
    pub rows: Vec<CheckpointRow>,
    pub ladder_ok: bool,
    pub sweep_ok: bool,
}

impl AppendixReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.matches) && self.ladder_ok && self.sweep_ok
    }
}

fn row(rows: &mut Vec<CheckpointRow>, name: &str, paper: Rational, computed: Rational) {
    rows.push(CheckpointRow {
        name: name.to_string(),
        paper: rat_to_string(&paper),
        computed: rat_to_string(&computed),
        matches: paper == computed,
    });
}

fn poly_matches(p: &RatPoly, coeffs_desc: &[Rational]) -> bool {
    let deg = p.degree().map_or(0, |d| d);
    if deg + 1 != coeffs_desc.len() {
        return false;
    }
    coeffs_desc
        .iter()
        .enumerate()
        .all(|(i, c)| p.coeff(deg - i) == *c)
}

/// First ladder: q_L > 0 from n = 9, q_U(α = 31439/28800) > 0 and γ < 0
/// from n = 70, with all printed checkpoint constants reproduced exactly.
pub fn appendix_b1_suite(n_max: i64) -> AppendixReport {
    assert!(n_max >= 70);
    let mut rows = Vec::new();
    let q_l = q_l_poly();
    let q = q_poly();
    let q_u = q_u_poly(&alpha_b1());
    let gamma = gamma_poly();

    // Printed expansions.
    rows.push(CheckpointRow {
        name: "q_L expansion".into(),
        paper: "6n^3 - 114n^2 + 712n - 1516".into(),
        computed: "derived from p_A - p_B".into(),
        matches: poly_matches(&q_l, &[rat_i(6), rat_i(-114), rat_i(712), rat_i(-1516)]),
    });
    rows.push(CheckpointRow {
        name: "q' expansion".into(),
        paper: "4n^3 - 210n^2 + 2082n - 5624".into(),
        computed: "derived from 9p_B - 8p_A".into(),
        matches: poly_matches(
            &q.derivative(),
            &[rat_i(4), rat_i(-210), rat_i(2082), rat_i(-5624)],
        ),
    });
    rows.push(CheckpointRow {
        name: "q'' expansion".into(),
        paper: "6(2n^2 - 70n + 347)".into(),
        computed: "derived".into(),
        matches: poly_matches(
            &q.derivative().derivative(),
            &[rat_i(12), rat_i(-420), rat_i(2082)],
        ),
    });
    rows.push(CheckpointRow {
        name: "q_U expansion (alpha = 31439/28800)".into(),
        paper: "2639/28800 n^4 - 115429/14400 n^3 + 1207877/9600 n^2 - 282161/400 n + 218809/160"
            .into(),
        computed: "derived from alpha p_B - p_A".into(),
        matches: poly_matches(
            &q_u,
            &[
                rat(2639, 28800),
                rat(-115429, 14400),
                rat(1207877, 9600),
                rat(-282161, 400),
                rat(218809, 160),
            ],
        ),
    });
    rows.push(CheckpointRow {
        name: "gamma expansion".into(),
        paper: "-11/20 n^4 + 481/10 n^3 - 15099/20 n^2 + 21162/5 n - 8205".into(),
        computed: "derived from -(5+3*31/60) p_B + 6 p_A".into(),
        matches: poly_matches(
            &gamma,
            &[
                rat(-11, 20),
                rat(481, 10),
                rat(-15099, 20),
                rat(21162, 5),
                rat_i(-8205),
            ],
        ),
    });

    // Checkpoint values.
    let at = |p: &RatPoly, n: i64| p.eval(&rat_i(n));
    row(&mut rows, "q_L(9)", rat_i(32), at(&q_l, 9));
    row(&mut rows, "q_L'(9)", rat_i(118), at(&q_l.derivative(), 9));
    row(&mut rows, "q(53)", rat_i(105_696), at(&q, 53));
    row(&mut rows, "q'(53)", rat_i(110_340), at(&q.derivative(), 53));
    row(&mut rows, "q_U(70)", rat(287_074, 15), at(&q_u, 70));
    row(
        &mut rows,
        "q_U'(70)",
        rat(178_522_037, 7200),
        at(&q_u.derivative(), 70),
    );
    row(
        &mut rows,
        "q_U''(70)",
        rat(10_910_017, 4800),
        at(&q_u.derivative().derivative(), 70),
    );
    row(&mut rows, "gamma(70)", rat_i(-118_392), at(&gamma, 70));
    row(
        &mut rows,
        "gamma'(70)",
        rat(-744_953, 5),
        at(&gamma.derivative(), 70),
    );
    row(
        &mut rows,
        "gamma''(70)",
        rat(-136_479, 10),
        at(&gamma.derivative().derivative(), 70),
    );

    // q itself: q'' = 6(2n²-70n+347) with q''' = 24n - 420 > 0 from 53 and
    // positive base values, so discrim(p_n) > 0 follows for every n >= 53.
    let q2 = q.derivative().derivative();
    let q3 = q2.derivative();
    let mut q_ladder = at(&q2, 53).is_positive() && at(&q3, 53).is_positive();
    q_ladder &= at(&q, 53).is_positive() && at(&q.derivative(), 53).is_positive();
    rows.push(CheckpointRow {
        name: "q convexity ladder from 53".into(),
        paper: "roots of q'' lie below 53".into(),
        computed: "q(53), q'(53), q''(53), q'''(53) all positive".into(),
        matches: q_ladder,
    });

    // Derivative-positivity ladders, exactly.
    let q_l3 = q_l.derivative().derivative().derivative();
    let q_u3 = q_u.derivative().derivative().derivative();
    let q_u4 = q_u3.derivative();
    let gamma3 = gamma.derivative().derivative().derivative();
    let gamma4 = gamma3.derivative();
    let mut ladder_ok = true;
    // q_L'' = 36n - 228 > 0 for n >= 7, base values at 9 positive.
    ladder_ok &= poly_matches(&q_l.derivative().derivative(), &[rat_i(36), rat_i(-228)]);
    ladder_ok &= at(&q_l.derivative().derivative(), 7).is_positive();
    ladder_ok &= q_l3 == RatPoly::constant(rat_i(36));
    // q_U''' increasing (constant 4th derivative > 0) and positive at 70.
    ladder_ok &= q_u4.degree() == Some(0) && q_u4.coeff(0).is_positive();
    ladder_ok &= at(&q_u3, 70).is_positive();
    ladder_ok &= at(&q_u, 70).is_positive()
        && at(&q_u.derivative(), 70).is_positive()
        && at(&q_u.derivative().derivative(), 70).is_positive();
    // γ''' decreasing (constant 4th derivative < 0) and negative at 70.
    ladder_ok &= gamma4.degree() == Some(0) && gamma4.coeff(0).is_negative();
    ladder_ok &= at(&gamma3, 70).is_negative();
    ladder_ok &= at(&gamma, 70).is_negative()
        && at(&gamma.derivative(), 70).is_negative()
        && at(&gamma.derivative().derivative(), 70).is_negative();

    // Exhaustive sweep of the claimed ranges.
    let mut sweep_ok = true;
    for n in 9..=n_max {
        sweep_ok &= at(&q_l, n).is_positive();
    }
    for n in 70..=n_max {
        sweep_ok &= at(&q_u, n).is_positive();
        sweep_ok &= at(&gamma, n).is_negative();
    }

    AppendixReport { rows, ladder_ok, sweep_ok }
}

/// Second ladder: q_U(α = 7047/6272) > 0 from n = 53 and the closing
/// identity `α = (9 - 36/56²)/8`, which force J(1) < 0 for n >= 53.
pub fn appendix_b2_suite(n_max: i64) -> AppendixReport {
    assert!(n_max >= 53);
    let mut rows = Vec::new();
    let alpha = alpha_b2();
    let q_u = q_u_poly(&alpha);

    rows.push(CheckpointRow {
        name: "q_U expansion (alpha = 7047/6272)".into(),
        paper: "775/6272 n^4 - 27341/3136 n^3 + 814983/6272 n^2 - 551233/784 n + 2063213/1568"
            .into(),
        computed: "derived from alpha p_B - p_A".into(),
        matches: poly_matches(
            &q_u,
            &[
                rat(775, 6272),
                rat(-27341, 3136),
                rat(814_983, 6272),
                rat(-551_233, 784),
                rat(2_063_213, 1568),
            ],
        ),
    });
    let at = |p: &RatPoly, n: i64| p.eval(&rat_i(n));
    row(&mut rows, "q_U(53)", rat(169_857, 28), at(&q_u, 53));
    row(
        &mut rows,
        "q_U'(53)",
        rat(20_672_955, 1568),
        at(&q_u.derivative(), 53),
    );
    row(
        &mut rows,
        "q_U''(53)",
        rat(5_182_395, 3136),
        at(&q_u.derivative().derivative(), 53),
    );
    // α = (1/8)(9 - 36/56²), exactly.
    row(
        &mut rows,
        "alpha identity",
        alpha.clone(),
        (rat_i(9) - rat(36, 3136)) * rat(1, 8),
    );

    let q_u3 = q_u.derivative().derivative().derivative();
    let q_u4 = q_u3.derivative();
    let mut ladder_ok = true;
    ladder_ok &= q_u4.degree() == Some(0) && q_u4.coeff(0).is_positive();
    ladder_ok &= at(&q_u3, 53).is_positive();
    ladder_ok &= at(&q_u, 53).is_positive()
        && at(&q_u.derivative(), 53).is_positive()
        && at(&q_u.derivative().derivative(), 53).is_positive();
    // (n+3) sqrt(9-8α) - 6 >= 0 for n >= 53 with equality exactly at 53;
    // the radicand is the perfect square (3/28)².
    let root = Surd::sqrt_of(rat_i(9) - rat_i(8) * &alpha).expect("positive radicand");
    ladder_ok &= root.is_rational() && root.a() == &rat(3, 28);
    let boundary = Surd::rational(rat_i(56) * root.a() - rat_i(6));
    ladder_ok &= boundary.sign() == Sign::Zero;

    let mut sweep_ok = true;
    for n in 53..=n_max {
        sweep_ok &= at(&q_u, n).is_positive();
        let margin = rat_i(n + 3) * root.a() - rat_i(6);
        sweep_ok &= if n == 53 { margin.is_zero() } else { margin.is_positive() };
    }

    AppendixReport { rows, ladder_ok, sweep_ok }
}
