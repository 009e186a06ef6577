//! The auxiliary energy at the origin: coefficient extraction, the I and J
//! polynomials, the closed form of F(0,ε), the ξ-Hessian at ξ = 0, and the
//! quadrature cross-checks of every reduction step.
//!
//! Exact and floating worlds are kept separate: rational (or surd) ε feeds
//! the exact I/J evaluations, arbitrary floats go through the adaptive
//! quadrature routes.

use crate::exact::{rat, rat_i, Poly, Rational, Ring, Surd, SurdPoly};
use crate::quad::{
    half_line_power_integral, integrate_semi_infinite, power_integral, sphere_area, PiRational,
    QuadError, Tolerance,
};
use crate::weyl::WeylForm;
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum EnergyError {
    #[error("dimension constraint violated: need n > 4d+6, got n={n}, d={d}")]
    DimensionConstraint { n: i64, d: usize },
    #[error("criticality precondition failed: I'(1) = {0} is not exactly zero")]
    NotCritical(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// `c_n = (n-2)/(4(n-1))`, the conformal Laplacian constant.
pub fn c_n(n: i64) -> Rational {
    rat(n - 2, 4 * (n - 1))
}

// ---------------------------------------------------------------------------
// Coefficient extraction.
// ---------------------------------------------------------------------------

/// Coefficients of `(n+1)f² + 4sff' + 2s²f'²`, the radial weight of F(0,ε);
/// a list of 2d+1 entries for deg f = d.
pub fn alpha_coeffs<T: Ring>(n: i64, f: &Poly<T>) -> Vec<T> {
    let p = alpha_poly(n, f);
    let d = f.degree().map_or(0, |d| 2 * d);
    (0..=d).map(|k| p.coeff(k)).collect()
}

/// The alpha generating polynomial itself.
pub fn alpha_poly<T: Ring>(n: i64, f: &Poly<T>) -> Poly<T> {
    let s = Poly::<T>::identity();
    let fp = f.derivative();
    let np1 = T::from_rational(&rat_i(n + 1));
    f.mul(f)
        .scale(&np1)
        .add(&s.mul(&f.mul(&fp)).scale(&T::from_rational(&rat_i(4))))
        .add(&s.mul(&s).mul(&fp.mul(&fp)).scale(&T::from_rational(&rat_i(2))))
}

/// Coefficients of `2ff' + sf'²`; 2d entries, empty for constant f.
pub fn beta_coeffs<T: Ring>(f: &Poly<T>) -> Vec<T> {
    let d = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => return Vec::new(),
    };
    let s = Poly::<T>::identity();
    let fp = f.derivative();
    let p = f
        .mul(&fp)
        .scale(&T::from_rational(&rat_i(2)))
        .add(&s.mul(&fp.mul(&fp)));
    (0..2 * d).map(|k| p.coeff(k)).collect()
}

/// Exact identity behind the sign of F(0,ε):
/// `(n+1)f² + 4sff' + 2s²f'² = (n-1)f² + 2(f+sf')²` as polynomials.
pub fn alpha_identity_holds<T: Ring>(n: i64, f: &Poly<T>) -> bool {
    let s = Poly::<T>::identity();
    let fsp = f.add(&s.mul(&f.derivative()));
    let rhs = f
        .mul(f)
        .scale(&T::from_rational(&rat_i(n - 1)))
        .add(&fsp.mul(&fsp).scale(&T::from_rational(&rat_i(2))));
    alpha_poly(n, f) == rhs
}

/// The coefficient bundle of one dimension's radial weights.
#[derive(Debug, Clone)]
pub struct EnergyCoefficients {
    pub n: i64,
    pub d: usize,
    pub f: SurdPoly,
    pub alpha: Vec<Surd>,
    pub beta: Vec<Surd>,
}

impl EnergyCoefficients {
    pub fn new(n: i64, f: SurdPoly) -> Self {
        let d = f.degree().unwrap_or(0);
        let alpha = alpha_coeffs(n, &f);
        let beta = beta_coeffs(&f);
        EnergyCoefficients { n, d, f, alpha, beta }
    }

    pub fn alpha_identity_holds(&self) -> bool {
        alpha_identity_holds(self.n, &self.f)
    }
}

// ---------------------------------------------------------------------------
// The I, J and K ladders.
// ---------------------------------------------------------------------------

fn check_dimension(n: i64, d: usize) -> Result<(), EnergyError> {
    if n <= 4 * d as i64 + 6 {
        Err(EnergyError::DimensionConstraint { n, d })
    } else {
        Ok(())
    }
}

/// `1/(n-6-2q) Π_{j<=q} (n-1+2j)/(n-5-2j)`.
fn i_ladder(n: i64, q: usize) -> Rational {
    let q = q as i64;
    let mut v = rat(1, n - 6 - 2 * q);
    for j in 0..=q {
        v *= rat(n - 1 + 2 * j, n - 5 - 2 * j);
    }
    v
}

/// `1/(n-6-2q) Π_{j<=q} (n+3+2j)/(n-5-2j)`.
fn j_ladder(n: i64, q: usize) -> Rational {
    let q = q as i64;
    let mut v = rat(1, n - 6 - 2 * q);
    for j in 0..=q {
        v *= rat(n + 3 + 2 * j, n - 5 - 2 * j);
    }
    v
}

/// `1/(n-8-2q) Π_{j<=q} (n+3+2j)/(n-7-2j)` (the `(1+r²)^{1-n}` ladder).
fn k_ladder(n: i64, q: usize) -> Rational {
    let q = q as i64;
    let mut v = rat(1, n - 8 - 2 * q);
    for j in 0..=q {
        v *= rat(n + 3 + 2 * j, n - 7 - 2 * j);
    }
    v
}

/// `I(s) = Σ_q α_q/(n-6-2q) Π (n-1+2j)/(n-5-2j) s^{q+2}`; degree 2d+2 with
/// zero constant and linear coefficients. Requires n > 4d+6.
pub fn i_poly<T: Ring>(n: i64, f: &Poly<T>) -> Result<Poly<T>, EnergyError> {
    let d = f.degree().unwrap_or(0);
    check_dimension(n, d)?;
    let alpha = alpha_coeffs(n, f);
    let mut coeffs = vec![T::zero(); alpha.len() + 2];
    for (q, a) in alpha.iter().enumerate() {
        coeffs[q + 2] = a.mul_ref(&T::from_rational(&i_ladder(n, q)));
    }
    Ok(Poly::new(coeffs))
}

/// `J(s) = Σ_q β_q s^{q+2}/(n-6-2q) Π (n+3+2j)/(n-5-2j)`; monomials s²
/// through s^{2d+1}, zero for constant f.
pub fn j_poly<T: Ring>(n: i64, f: &Poly<T>) -> Result<Poly<T>, EnergyError> {
    let d = f.degree().unwrap_or(0);
    check_dimension(n, d)?;
    let beta = beta_coeffs(f);
    let mut coeffs = vec![T::zero(); beta.len() + 2];
    for (q, b) in beta.iter().enumerate() {
        coeffs[q + 2] = b.mul_ref(&T::from_rational(&j_ladder(n, q)));
    }
    Ok(Poly::new(coeffs))
}

/// The second Hessian ladder: `K(s) = Σ_q (f'²)_q s^{q+3}/(n-8-2q)
/// Π (n+3+2j)/(n-7-2j)`, which multiplies `∫ r^{n+2}(1+r²)^{1-n} dr`.
pub fn k2_poly<T: Ring>(n: i64, f: &Poly<T>) -> Result<Poly<T>, EnergyError> {
    let d = f.degree().unwrap_or(0);
    check_dimension(n, d)?;
    let fp = f.derivative();
    let fp2 = fp.mul(&fp);
    let top = match fp2.degree() {
        None => return Ok(Poly::zero()),
        Some(t) => t,
    };
    let mut coeffs = vec![T::zero(); top + 4];
    for q in 0..=top {
        coeffs[q + 3] = fp2.coeff(q).mul_ref(&T::from_rational(&k_ladder(n, q)));
    }
    Ok(Poly::new(coeffs))
}

// ---------------------------------------------------------------------------
// F(0, ε).
// ---------------------------------------------------------------------------

/// `β_n = c_n σ_{n-2} |W|² / (4(n-1)(n+1))`, exactly (a positive multiple
/// of an integer power of π).
pub fn beta_n(w: &WeylForm) -> PiRational {
    let n = w.ambient_dim() as i64;
    let scale = c_n(n) * w.norm_sq() / rat(4 * (n - 1) * (n + 1), 1);
    sphere_area(w.tangential_dim()).scale(&scale)
}

/// `∫_0^∞ r^{n-2} (1+r²)^{2-n} dr`, exactly.
pub fn f0_beta_integral(n: i64) -> Result<PiRational, EnergyError> {
    Ok(half_line_power_integral((n - 2) as u64, (n - 2) as u64)?)
}

/// Closed form of F(0,ε) at rational ε², with the three factors exposed.
#[derive(Debug, Clone)]
pub struct F0Closed {
    pub value: f64,
    pub beta_n: PiRational,
    pub i_at_eps_sq: Surd,
    pub beta_integral: PiRational,
}

/// `F(0,ε) = -β_n · I(ε²) · ∫ r^{n-2}(1+r²)^{2-n} dr`.
pub fn f0_closed(w: &WeylForm, f: &SurdPoly, eps_sq: &Rational) -> Result<F0Closed, EnergyError> {
    let n = w.ambient_dim() as i64;
    let i = i_poly(n, f)?;
    let i_val = i.eval(&Surd::rational(eps_sq.clone()));
    let bn = beta_n(w);
    let bi = f0_beta_integral(n)?;
    Ok(F0Closed {
        value: -bn.to_f64() * i_val.to_f64() * bi.to_f64(),
        beta_n: bn,
        i_at_eps_sq: i_val,
        beta_integral: bi,
    })
}

fn surd_coeffs_f64(p: &SurdPoly) -> Vec<f64> {
    p.coeffs().iter().map(Surd::to_f64).collect()
}

/// Quadrature route for F(0,ε): the double integral after the substitutions
/// t -> εt, r -> ε(1+t)r, which splits each monomial of the radial weight
/// into a product of two adaptive 1D integrals.
pub fn f0_quadrature(
    w: &WeylForm,
    f: &SurdPoly,
    eps: f64,
    tol: Tolerance,
) -> Result<f64, EnergyError> {
    let n = w.ambient_dim() as i64;
    let d = f.degree().unwrap_or(0);
    check_dimension(n, d)?;
    let alpha = surd_coeffs_f64(&alpha_poly(n, f));
    let mut total = 0.0;
    for (q, a) in alpha.iter().enumerate() {
        if *a == 0.0 {
            continue;
        }
        // ∫ (1+t)^{-(n-5-2q)} dt and ∫ r^{2q+n} (1+r²)^{2-n} dr
        let k_t = (n - 5 - 2 * q as i64) as f64;
        let t_int = integrate_semi_infinite(move |t| (1.0 + t).powf(-k_t), tol)?;
        let r_int = power_integral((2 * q as i64 + n) as f64, (n - 2) as f64, tol)?;
        total += a * eps.powi(2 * q as i32 + 4) * t_int.value * r_int;
    }
    Ok(-beta_n(w).to_f64() * total)
}

/// Analytic ε-derivative of the closed form, for finite-difference checks:
/// `d/dε F(0,ε) = -β_n · 2ε I'(ε²) · ∫ r^{n-2}(1+r²)^{2-n}`.
pub fn f0_closed_deps(w: &WeylForm, f: &SurdPoly, eps_sq: &Rational, eps: f64) -> Result<f64, EnergyError> {
    let n = w.ambient_dim() as i64;
    let ip = i_poly(n, f)?.derivative();
    let v = ip.eval(&Surd::rational(eps_sq.clone())).to_f64();
    Ok(-beta_n(w).to_f64() * 2.0 * eps * v * f0_beta_integral(n)?.to_f64())
}

// ---------------------------------------------------------------------------
// The ξ-Hessian at ξ = 0.
// ---------------------------------------------------------------------------

/// Closed form (the cancelled three-term expression): with
/// `C_r = ∫ r^{n+2}(1+r²)^{-n} dr`,
/// `Hess_pq = (n-2)² σ C_r/((n-1)(n+1)) ·
///   { -2 J(ε²)/(n+3) G_pq + [K(ε²)/(2(n-5)) - J(ε²)/(2(n+3))] |W|² δ_pq }`.
pub fn hessian_closed(w: &WeylForm, f: &SurdPoly, eps_sq: &Rational) -> Result<DMatrix<f64>, EnergyError> {
    let n = w.ambient_dim() as i64;
    let m = w.tangential_dim();
    let j_val = j_poly(n, f)?.eval(&Surd::rational(eps_sq.clone())).to_f64();
    let k_val = k2_poly(n, f)?.eval(&Surd::rational(eps_sq.clone())).to_f64();
    let c_r = half_line_power_integral((n + 2) as u64, n as u64)?;
    let sigma = sphere_area(m);
    let nf = n as f64;
    let common = (nf - 2.0) * (nf - 2.0) * sigma.to_f64() * c_r.to_f64() / ((nf - 1.0) * (nf + 1.0));
    let coef_g = -2.0 * j_val / (nf + 3.0);
    let coef_d = k_val / (2.0 * (nf - 5.0)) - j_val / (2.0 * (nf + 3.0));
    let g = w.g_tensor_f64();
    let norm_sq = w.norm_sq_f64();
    let mut h = DMatrix::zeros(m, m);
    for p in 0..m {
        for q in 0..m {
            h[(p, q)] = common * (coef_g * g[p][q] + if p == q { coef_d * norm_sq } else { 0.0 });
        }
    }
    Ok(h)
}

/// Quadrature route: the three half-space integrals of the second ξ-derivs,
/// radially reduced through the sphere moments and integrated adaptively
/// monomial by monomial.
pub fn hessian_quadrature(
    w: &WeylForm,
    f: &SurdPoly,
    eps: f64,
    tol: Tolerance,
) -> Result<DMatrix<f64>, EnergyError> {
    let n = w.ambient_dim() as i64;
    let m = w.tangential_dim();
    let d = f.degree().unwrap_or(0);
    check_dimension(n, d)?;
    let nf = n as f64;

    // Radial weights as polynomials in s = r²: f², (n+3)f²+8sff'+4s²f'²,
    // (n+3)f²+4sff'+2s²f'², (n+1)f²+4sff'+2s²f'².
    let s = SurdPoly::identity();
    let fp = f.derivative();
    let f2 = f.mul(f);
    let sffp = s.mul(&f.mul(&fp));
    let s2fp2 = s.mul(&s).mul(&fp.mul(&fp));
    let scale = |k: i64| Surd::rational(rat_i(k));
    let brace_a = f2
        .scale(&scale(n + 3))
        .add(&sffp.scale(&scale(8)))
        .add(&s2fp2.scale(&scale(4)));
    let brace_b = f2
        .scale(&scale(n + 3))
        .add(&sffp.scale(&scale(4)))
        .add(&s2fp2.scale(&scale(2)));
    let brace_c = f2
        .scale(&scale(n + 1))
        .add(&sffp.scale(&scale(4)))
        .add(&s2fp2.scale(&scale(2)));

    // Σ_q c_q ε^{2q+2} ∫(1+t)^{2q+3-n} dt ∫ r^{P(q)}(1+r²)^{-M} dr
    let weighted_sum = |coeffs: &[f64], p_base: i64, mm: i64| -> Result<f64, EnergyError> {
        let mut acc = 0.0;
        for (q, c) in coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let k_t = (n - 3 - 2 * q as i64) as f64;
            let t_int = integrate_semi_infinite(move |t| (1.0 + t).powf(-k_t), tol)?;
            let r_int = power_integral((p_base + 2 * q as i64) as f64, mm as f64, tol)?;
            acc += c * eps.powi(2 * q as i32 + 2) * t_int.value * r_int;
        }
        Ok(acc)
    };

    let q1 = weighted_sum(&surd_coeffs_f64(&f2), n + 2, n)?;
    let qa = weighted_sum(&surd_coeffs_f64(&brace_a), n + 2, n)?;
    let qb = weighted_sum(&surd_coeffs_f64(&brace_b), n + 2, n)?;
    let qc = weighted_sum(&surd_coeffs_f64(&brace_c), n, n - 1)?;

    let sigma = sphere_area(m).to_f64();
    let g = w.g_tensor_f64();
    let norm_sq = w.norm_sq_f64();
    let pre = (nf - 2.0) * (nf - 2.0) * sigma;
    let term1 = 1.0 / (2.0 * (nf - 1.0) * (nf + 1.0)) * q1;
    let term2_g = -0.5 * qa / ((nf - 1.0) * (nf + 1.0) * (nf + 3.0));
    let term2_d = -0.25 * qb / ((nf - 1.0) * (nf + 1.0) * (nf + 3.0));
    let term3_d = qc / (8.0 * (nf - 1.0) * (nf - 1.0) * (nf + 1.0));
    let mut h = DMatrix::zeros(m, m);
    for p in 0..m {
        for q in 0..m {
            let g_part = (term1 + term2_g) * g[p][q];
            let d_part = if p == q { (term2_d + term3_d) * norm_sq } else { 0.0 };
            h[(p, q)] = pre * (g_part + d_part);
        }
    }
    Ok(h)
}

/// Positive-definiteness via float Cholesky of `H - margin·I` with
/// `margin = 1e-10 · trace(H)`.
pub fn cholesky_positive_definite(h: &DMatrix<f64>) -> (bool, f64) {
    let n = h.nrows();
    let margin = 1e-10 * h.trace();
    let shifted = h - DMatrix::<f64>::identity(n, n) * margin;
    (nalgebra::Cholesky::new(shifted).is_some(), margin)
}

/// Exact sign certificate for `∂²/∂ε² F(0,ε)|_{ε=1} = -4 β_n C_beta I''(1)`;
/// requires I'(1) = 0 exactly.
#[derive(Debug, Clone)]
pub struct SecondEpsDerivative {
    pub i_second_at_1: Surd,
    /// Sign of the ε-second-derivative itself (positive iff I''(1) < 0).
    pub positive: bool,
}

pub fn second_eps_derivative(w: &WeylForm, f: &SurdPoly) -> Result<SecondEpsDerivative, EnergyError> {
    let n = w.ambient_dim() as i64;
    let i = i_poly(n, f)?;
    let one = Surd::rational(rat_i(1));
    let i_prime = i.derivative();
    let crit = i_prime.eval(&one);
    if !crit.is_zero() {
        return Err(EnergyError::NotCritical(crit.to_string()));
    }
    let i_second = i_prime.derivative().eval(&one);
    Ok(SecondEpsDerivative {
        positive: i_second.is_negative(),
        i_second_at_1: i_second,
    })
}
