//! The standard bubble on the upper half-space, its companion functions
//! φ_(ξ,ε,a), and the conformal equivalence onto the ball.
//!
//! Everything here is a closed form; derivatives are hand-derived and only
//! cross-checked by finite differences in tests, so residual checks are not
//! limited by stencil error.

use crate::quad::{
    beta_half, integrate, integrate_semi_infinite, sphere_area, PiRational, QuadError, Tolerance,
};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum BubbleError {
    #[error("bubble scale must be positive, got {0}")]
    NonpositiveEpsilon(f64),
    #[error("dimension must be at least 3, got {0}")]
    DimensionTooSmall(usize),
}

/// Which companion function / parameter derivative is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// One of the boundary translations ξ_k, 0-based.
    Tangential(usize),
    /// The scale direction ε (the paper's index a = n).
    Normal,
}

/// Bubble parameters (ξ, ε) with ξ on the boundary R^{n-1} and ε > 0.
#[derive(Debug, Clone)]
pub struct BubbleParams {
    xi: Vec<f64>,
    eps: f64,
}

impl BubbleParams {
    pub fn new(xi: Vec<f64>, eps: f64) -> Result<Self, BubbleError> {
        if xi.is_empty() {
            return Err(BubbleError::DimensionTooSmall(xi.len() + 1));
        }
        if !(eps > 0.0) {
            return Err(BubbleError::NonpositiveEpsilon(eps));
        }
        Ok(BubbleParams { xi, eps })
    }

    pub fn origin(n: usize, eps: f64) -> Result<Self, BubbleError> {
        if n < 3 {
            return Err(BubbleError::DimensionTooSmall(n));
        }
        Self::new(vec![0.0; n - 1], eps)
    }

    pub fn n(&self) -> usize {
        self.xi.len() + 1
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// `D(x) = (ε + x_n)² + |x̄ - ξ|²`, the squared distance to the mirror
    /// point (ξ, -ε).
    fn denom(&self, x: &[f64]) -> f64 {
        let n = self.n();
        debug_assert_eq!(x.len(), n);
        let mut d = (self.eps + x[n - 1]) * (self.eps + x[n - 1]);
        for k in 0..n - 1 {
            let v = x[k] - self.xi[k];
            d += v * v;
        }
        d
    }

    /// `u_(ξ,ε)(x) = (ε / D)^{(n-2)/2}`.
    pub fn u(&self, x: &[f64]) -> f64 {
        let n = self.n() as f64;
        (self.eps / self.denom(x)).powf(0.5 * (n - 2.0))
    }

    /// Spatial gradient of u, closed form.
    pub fn u_grad(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let nf = n as f64;
        let d = self.denom(x);
        let scale = -(nf - 2.0) * self.eps.powf(0.5 * (nf - 2.0)) * d.powf(-0.5 * nf);
        let mut g = vec![0.0; n];
        for k in 0..n - 1 {
            g[k] = scale * (x[k] - self.xi[k]);
        }
        g[n - 1] = scale * (self.eps + x[n - 1]);
        g
    }

    /// Second spatial derivative ∂_a ∂_b u, closed form.
    pub fn u_hess(&self, x: &[f64], a: usize, b: usize) -> f64 {
        let n = self.n();
        let nf = n as f64;
        let d = self.denom(x);
        let v = |k: usize| {
            if k == n - 1 {
                self.eps + x[n - 1]
            } else {
                x[k] - self.xi[k]
            }
        };
        let pref = -(nf - 2.0) * self.eps.powf(0.5 * (nf - 2.0));
        let delta = if a == b { 1.0 } else { 0.0 };
        pref * (delta * d.powf(-0.5 * nf) - nf * v(a) * v(b) * d.powf(-0.5 * nf - 1.0))
    }

    /// |Δu| summed term by term; mathematically zero, so this measures only
    /// floating-point cancellation.
    pub fn interior_laplacian_residual(&self, x: &[f64]) -> f64 {
        let n = self.n();
        (0..n).map(|a| self.u_hess(x, a, a)).sum::<f64>().abs()
    }

    /// |∂u/∂x_n + (n-2) u^{n/(n-2)}| at the boundary point (x̄, 0).
    pub fn boundary_condition_residual(&self, xbar: &[f64]) -> f64 {
        let n = self.n();
        let nf = n as f64;
        let mut x = xbar.to_vec();
        x.push(0.0);
        let du_n = self.u_grad(&x)[n - 1];
        let u = self.u(&x);
        (du_n + (nf - 2.0) * u.powf(nf / (nf - 2.0))).abs()
    }

    /// Interior and boundary residuals as a pair: |Δu| at x and the
    /// boundary-condition defect at the projection (x̄, 0).
    pub fn pde_residual(&self, x: &[f64]) -> (f64, f64) {
        (
            self.interior_laplacian_residual(x),
            self.boundary_condition_residual(&x[..self.n() - 1]),
        )
    }

    /// ∂u/∂ε, closed form.
    pub fn u_deps(&self, x: &[f64]) -> f64 {
        let n = self.n() as f64;
        let d = self.denom(x);
        let xn = x[self.n() - 1];
        // (n-2)/2 ε^{(n-4)/2} D^{-n/2} (x_n² + |x̄-ξ|² - ε²)
        let radial = d - 2.0 * self.eps * (self.eps + xn); // = x_n² + |x̄-ξ|² - ε²
        0.5 * (n - 2.0) * self.eps.powf(0.5 * (n - 4.0)) * d.powf(-0.5 * n) * radial
    }

    /// ∂u/∂ξ_k, closed form.
    pub fn u_dxi(&self, x: &[f64], k: usize) -> f64 {
        let n = self.n() as f64;
        let d = self.denom(x);
        (n - 2.0) * self.eps.powf(0.5 * (n - 2.0)) * (x[k] - self.xi[k]) * d.powf(-0.5 * n)
    }

    /// The companion functions: φ_(ξ,ε,n) and φ_(ξ,ε,k).
    pub fn phi(&self, dir: Direction, x: &[f64]) -> f64 {
        let n = self.n();
        let nf = n as f64;
        let d = self.denom(x);
        let base = (self.eps / d).powf(0.5 * nf);
        match dir {
            Direction::Normal => {
                let xn = x[n - 1];
                let mut r2 = xn * xn;
                for k in 0..n - 1 {
                    let v = x[k] - self.xi[k];
                    r2 += v * v;
                }
                base * (self.eps * self.eps - r2) / d
            }
            Direction::Tangential(k) => base * 2.0 * self.eps * (x[k] - self.xi[k]) / d,
        }
    }

    /// Residual of the defining identity
    /// `φ_a · D = ∓ (2ε²/(n-2)) ∂u/∂(ε or ξ_k)` (minus for a = n).
    pub fn phi_identity_residual(&self, dir: Direction, x: &[f64]) -> f64 {
        let n = self.n() as f64;
        let d = self.denom(x);
        let lhs = self.phi(dir, x) * d;
        let factor = 2.0 * self.eps * self.eps / (n - 2.0);
        let rhs = match dir {
            Direction::Normal => -factor * self.u_deps(x),
            Direction::Tangential(k) => factor * self.u_dxi(x, k),
        };
        (lhs - rhs).abs()
    }

    /// Conformal map onto the ball of radius 1/2 centered at (0,..,0,-1/2):
    /// `C(x) = ε (x̄-ξ, x_n+ε)/D + (0,...,0,-1)`.
    pub fn conformal_map(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let d = self.denom(x);
        let mut y = vec![0.0; n];
        for k in 0..n - 1 {
            y[k] = self.eps * (x[k] - self.xi[k]) / d;
        }
        y[n - 1] = self.eps * (x[n - 1] + self.eps) / d - 1.0;
        y
    }

    /// Ball coordinates taken from the center: z_a = y_a for a < n,
    /// z_n = y_n + 1/2.
    pub fn ball_coords(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut z = y.to_vec();
        z[n - 1] += 0.5;
        z
    }

    /// Central-difference Jacobian of the conformal map, step
    /// `1e-6 (1 + |x|)`; test path only.
    pub fn conformal_jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = self.n();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let h = 1e-6 * (1.0 + norm);
        let mut jac = vec![vec![0.0; n]; n];
        for b in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[b] += h;
            xm[b] -= h;
            let yp = self.conformal_map(&xp);
            let ym = self.conformal_map(&xm);
            for (a, row) in jac.iter_mut().enumerate() {
                row[b] = (yp[a] - ym[a]) / (2.0 * h);
            }
        }
        jac
    }

    /// Max entrywise error of `JᵀJ - u^{4/(n-2)} Id`.
    pub fn conformal_pullback_residual(&self, x: &[f64]) -> f64 {
        let n = self.n();
        let jac = self.conformal_jacobian(x);
        let factor = self.u(x).powf(4.0 / (n as f64 - 2.0));
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let mut s = 0.0;
                for c in 0..n {
                    s += jac[c][a] * jac[c][b];
                }
                let expect = if a == b { factor } else { 0.0 };
                worst = worst.max((s - expect).abs());
            }
        }
        worst / factor.max(1e-300)
    }

    /// Radial factor of `‖φ_a‖^p_{L^p(∂R^n_+)}` with `p = 2(n-1)/n`; the
    /// angular factor is independent of (ξ, ε) and drops out of the
    /// invariance comparison.
    pub fn phi_norm_radial(&self, dir: Direction) -> Result<f64, QuadError> {
        let n = self.n() as f64;
        let p = 2.0 * (n - 1.0) / n;
        let eps = self.eps;
        // On the boundary φ_n = ε^{n/2}(ε² - ρ²)/D0^{n/2+1} and
        // φ_k = 2 ε^{n/2+1} x_k / D0^{n/2+1}, D0 = ε² + ρ².
        let integrand = move |rho: f64| -> f64 {
            let d0 = eps * eps + rho * rho;
            let val = match dir {
                Direction::Normal => {
                    eps.powf(0.5 * n) * (eps * eps - rho * rho) / d0.powf(0.5 * n + 1.0)
                }
                Direction::Tangential(_) => {
                    2.0 * eps.powf(0.5 * n + 1.0) * rho / d0.powf(0.5 * n + 1.0)
                }
            };
            val.abs().powf(p) * rho.powf(n - 2.0)
        };
        // |ε² - ρ²|^p has only ~2p-1 derivatives at ρ = ε. Substituting
        // ρ = ε sin θ on [0, ε] and ρ = ε cosh t beyond turns the factor
        // into cos^{2p}θ / sinh^{2p}t, raising the endpoint smoothness
        // enough for the panel error estimates to be trustworthy.
        let inner = integrate(
            move |theta: f64| integrand(eps * theta.sin()) * eps * theta.cos(),
            0.0,
            std::f64::consts::FRAC_PI_2,
            Tolerance::default(),
        )?;
        let outer = integrate_semi_infinite(
            move |t: f64| integrand(eps * t.cosh()) * eps * t.sinh(),
            Tolerance::default(),
        )?;
        Ok(inner.value + outer.value)
    }
}

/// Exact and floating forms of `∫_{∂R^n_+} u^{2(n-1)/(n-2)}`, independent of
/// (ξ, ε), together with the implied boundary quotient.
#[derive(Debug, Clone)]
pub struct BoundaryMass {
    pub exact: PiRational,
    pub value: f64,
    pub quotient: f64,
}

/// `σ_{n-2} · B((n-1)/2, (n-1)/2)/2` and `Q = (n-2) · mass^{1/(n-1)}`.
pub fn boundary_mass(n: usize) -> BoundaryMass {
    assert!(n >= 3);
    let beta = beta_half((n as u64) - 1, (n as u64) - 1);
    let exact = sphere_area(n - 1)
        .mul(&beta)
        .scale(&crate::exact::rat(1, 2));
    let value = exact.to_f64();
    BoundaryMass {
        value,
        quotient: (n as f64 - 2.0) * value.powf(1.0 / (n as f64 - 1.0)),
        exact,
    }
}

/// Quadrature route for the boundary mass at concrete (ξ, ε); the ξ
/// translation drops out exactly, the ε dependence must cancel to rounding.
pub fn boundary_mass_quadrature(params: &BubbleParams) -> Result<f64, QuadError> {
    let n = params.n() as f64;
    let eps = params.eps();
    let sigma = sphere_area(params.n() - 1).to_f64();
    let v = integrate_semi_infinite(
        move |rho| {
            let d0 = eps * eps + rho * rho;
            (eps / d0).powf(n - 1.0) * rho.powf(n - 2.0)
        },
        Tolerance::default(),
    )?;
    Ok(sigma * v.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_point(rng: &mut ChaCha8Rng, n: usize, interior: bool) -> Vec<f64> {
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        x[n - 1] = if interior {
            rng.gen_range(0.05..2.0)
        } else {
            0.0
        };
        x
    }

    #[test]
    fn center_values() {
        let n = 7;
        let p = BubbleParams::origin(n, 1.0).unwrap();
        let origin = vec![0.0; n];
        assert_eq!(p.u(&origin), 1.0);
        let mut e_n = vec![0.0; n];
        e_n[n - 1] = 1.0;
        let expect = 0.25f64.powf(0.5 * (n as f64 - 2.0));
        assert!((p.u(&e_n) - expect).abs() < 1e-15);
    }

    #[test]
    fn scaling_law() {
        let n = 9;
        let mut r = rng(3);
        for _ in 0..50 {
            let xi: Vec<f64> = (0..n - 1).map(|_| r.gen_range(-1.0..1.0)).collect();
            let eps = r.gen_range(0.2..2.0);
            let lam = r.gen_range(0.3..3.0);
            let x = random_point(&mut r, n, true);
            let p = BubbleParams::new(xi.clone(), eps).unwrap();
            let xi_l: Vec<f64> = xi.iter().map(|v| lam * v).collect();
            let p_l = BubbleParams::new(xi_l, lam * eps).unwrap();
            let x_l: Vec<f64> = x.iter().map(|v| lam * v).collect();
            let lhs = p_l.u(&x_l);
            let rhs = lam.powf(-0.5 * (n as f64 - 2.0)) * p.u(&x);
            assert!((lhs - rhs).abs() <= 1e-14 * rhs.abs());
        }
    }

    #[test]
    fn closed_form_derivatives_match_finite_differences() {
        let n = 6;
        let p = BubbleParams::new(vec![0.3, -0.2, 0.1, 0.05, -0.15], 0.8).unwrap();
        let mut r = rng(11);
        let h = 1e-6;
        for _ in 0..20 {
            let x = random_point(&mut r, n, true);
            // spatial gradient
            let g = p.u_grad(&x);
            for a in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[a] += h;
                xm[a] -= h;
                let fd = (p.u(&xp) - p.u(&xm)) / (2.0 * h);
                assert!((fd - g[a]).abs() <= 1e-6 * (1.0 + g[a].abs()));
            }
            // parameter derivatives
            let pe_p = BubbleParams::new(p.xi().to_vec(), p.eps() + h).unwrap();
            let pe_m = BubbleParams::new(p.xi().to_vec(), p.eps() - h).unwrap();
            let fd_eps = (pe_p.u(&x) - pe_m.u(&x)) / (2.0 * h);
            assert!((fd_eps - p.u_deps(&x)).abs() <= 1e-6 * (1.0 + fd_eps.abs()));
            let mut xi_p = p.xi().to_vec();
            let mut xi_m = p.xi().to_vec();
            xi_p[1] += h;
            xi_m[1] -= h;
            let fd_xi = (BubbleParams::new(xi_p, p.eps()).unwrap().u(&x)
                - BubbleParams::new(xi_m, p.eps()).unwrap().u(&x))
                / (2.0 * h);
            assert!((fd_xi - p.u_dxi(&x, 1)).abs() <= 1e-6 * (1.0 + fd_xi.abs()));
        }
    }

    #[test]
    fn pde_residuals_are_rounding_level() {
        let n = 8;
        let p = BubbleParams::new(vec![0.1, 0.0, -0.4, 0.2, 0.0, 0.3, -0.1], 1.3).unwrap();
        let mut r = rng(5);
        for _ in 0..200 {
            let x = random_point(&mut r, n, true);
            let scale = p.eps() + x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let res = p.interior_laplacian_residual(&x);
            assert!(res <= 1e-10 * p.u(&x) / (scale * scale) + 1e-300);
            let xb = random_point(&mut r, n, false);
            let res_b = p.boundary_condition_residual(&xb[..n - 1]);
            let u = p.u(&xb);
            assert!(res_b <= 1e-10 * u / scale);
        }
    }

    #[test]
    fn residual_symmetric_under_reflection() {
        let n = 6;
        let p = BubbleParams::new(vec![0.2, -0.1, 0.3, 0.0, 0.25], 0.9).unwrap();
        let mut r = rng(23);
        for _ in 0..20 {
            let x = random_point(&mut r, n, true);
            let mut xr = x.clone();
            for k in 0..n - 1 {
                xr[k] = 2.0 * p.xi()[k] - x[k];
            }
            assert!((p.u(&x) - p.u(&xr)).abs() <= 1e-13 * p.u(&x));
        }
    }

    #[test]
    fn phi_zero_sets() {
        let n = 6;
        let p = BubbleParams::origin(n, 1.0).unwrap();
        // |x̄|² + x_n² = ε² makes φ_n vanish
        let mut x = vec![0.0; n];
        x[0] = 0.6;
        x[n - 1] = 0.8;
        assert!(p.phi(Direction::Normal, &x).abs() < 1e-15);
        // x̄ = ξ makes φ_k vanish
        let mut y = vec![0.0; n];
        y[n - 1] = 0.7;
        assert!(p.phi(Direction::Tangential(2), &y).abs() < 1e-15);
    }

    #[test]
    fn phi_matches_parameter_derivatives() {
        let n = 7;
        let p = BubbleParams::new(vec![0.4, 0.0, -0.3, 0.2, 0.1, 0.0], 1.1).unwrap();
        let mut r = rng(7);
        for _ in 0..50 {
            let x = random_point(&mut r, n, true);
            let u_scale = p.u(&x);
            assert!(p.phi_identity_residual(Direction::Normal, &x) <= 1e-12 * (1.0 + u_scale));
            for k in [0, 3, n - 2] {
                assert!(
                    p.phi_identity_residual(Direction::Tangential(k), &x)
                        <= 1e-12 * (1.0 + u_scale)
                );
            }
        }
    }

    #[test]
    fn phi_norm_is_parameter_independent() {
        let n = 7;
        let a = BubbleParams::origin(n, 1.0).unwrap();
        let mut xi = vec![0.0; n - 1];
        xi[0] = 1.0;
        let b = BubbleParams::new(xi, 2.0).unwrap();
        for dir in [Direction::Normal, Direction::Tangential(0)] {
            let na = a.phi_norm_radial(dir).unwrap();
            let nb = b.phi_norm_radial(dir).unwrap();
            assert!(
                (na - nb).abs() <= 1e-8 * na.abs(),
                "{dir:?}: {na} vs {nb}"
            );
        }
    }

    #[test]
    fn boundary_mass_n3_is_pi() {
        let bm = boundary_mass(3);
        assert_eq!(bm.exact, PiRational { rat: crate::exact::rat_i(1), pi_pow: 1 });
        assert!((bm.value - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn boundary_mass_quadrature_matches_beta() {
        for n in [3, 7, 25] {
            let exact = boundary_mass(n).value;
            let p = BubbleParams::origin(n, 1.0).unwrap();
            let q = boundary_mass_quadrature(&p).unwrap();
            assert!((q - exact).abs() <= 1e-9 * exact, "n={n}: {q} vs {exact}");
            let p_half = BubbleParams::origin(n, 0.5).unwrap();
            let q_half = boundary_mass_quadrature(&p_half).unwrap();
            assert!((q - q_half).abs() <= 1e-9 * exact);
        }
    }

    #[test]
    fn conformal_map_limits() {
        let n = 6;
        let p = BubbleParams::new(vec![0.3, -0.2, 0.1, 0.4, -0.25], 0.9).unwrap();
        // Along a ray to infinity the image approaches the deleted point.
        let dir = [1.0, 0.5, -0.3, 0.2, 0.8, 0.6];
        for t in [1e3, 1e6] {
            let x: Vec<f64> = dir.iter().map(|v| v * t).collect();
            let y = p.conformal_map(&x);
            let mut target = vec![0.0; n];
            target[n - 1] = -1.0;
            let dist: f64 = y
                .iter()
                .zip(&target)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(dist < 3.0 / t);
        }
        // The bubble center (ξ, 0) maps to the top boundary point of the ball.
        let mut center = p.xi().to_vec();
        center.push(0.0);
        let y = p.conformal_map(&center);
        assert!(y.iter().map(|v| v.abs()).fold(0.0f64, f64::max) < 1e-15);
        // Images stay in the closed ball around (0,..,0,-1/2).
        let mut r = rng(2);
        for _ in 0..100 {
            let x = random_point(&mut r, n, true);
            let y = p.conformal_map(&x);
            let mut d2 = 0.0;
            for (a, v) in y.iter().enumerate() {
                let c = if a == n - 1 { -0.5 } else { 0.0 };
                d2 += (v - c) * (v - c);
            }
            assert!(d2.sqrt() <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn conformal_pullback_is_isotropic() {
        let n = 5;
        let p = BubbleParams::new(vec![0.1, -0.3, 0.2, 0.05], 1.2).unwrap();
        let mut r = rng(19);
        for _ in 0..20 {
            let x = random_point(&mut r, n, true);
            assert!(p.conformal_pullback_residual(&x) < 1e-8);
        }
    }

    #[test]
    fn ball_coordinate_identities() {
        // z_n ∘ C = (1/2) u^{-n/(n-2)} φ_n, and likewise tangentially.
        let n = 6;
        let p = BubbleParams::new(vec![0.25, 0.0, -0.15, 0.35, 0.1], 0.85).unwrap();
        let nf = n as f64;
        let mut r = rng(31);
        for _ in 0..100 {
            let x = random_point(&mut r, n, true);
            let z = p.ball_coords(&p.conformal_map(&x));
            let u_pow = p.u(&x).powf(-nf / (nf - 2.0));
            let zn_expect = 0.5 * u_pow * p.phi(Direction::Normal, &x);
            assert!((z[n - 1] - zn_expect).abs() <= 1e-10 * (1.0 + zn_expect.abs()));
            for k in 0..n - 1 {
                let zk_expect = 0.5 * u_pow * p.phi(Direction::Tangential(k), &x);
                assert!((z[k] - zk_expect).abs() <= 1e-10 * (1.0 + zk_expect.abs()));
            }
        }
    }

    #[test]
    fn conformal_map_injective_on_sample() {
        let n = 5;
        let p = BubbleParams::new(vec![0.0, 0.2, -0.1, 0.15], 1.0).unwrap();
        let mut r = rng(13);
        let pts: Vec<Vec<f64>> = (0..300).map(|_| random_point(&mut r, n, true)).collect();
        let images: Vec<Vec<f64>> = pts.iter().map(|x| p.conformal_map(x)).collect();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d: f64 = images[i]
                    .iter()
                    .zip(&images[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                assert!(d > 1e-12, "collision between samples {i} and {j}");
            }
        }
    }

    #[test]
    fn translation_scaling_equivariance_of_conformal_map() {
        let n = 5;
        let mut r = rng(41);
        for _ in 0..30 {
            let xi: Vec<f64> = (0..n - 1).map(|_| r.gen_range(-1.0..1.0)).collect();
            let eps = r.gen_range(0.3..2.0);
            let lam = r.gen_range(0.4..2.5);
            let v: Vec<f64> = (0..n - 1).map(|_| r.gen_range(-1.0..1.0)).collect();
            let x = random_point(&mut r, n, true);
            let p = BubbleParams::new(xi.clone(), eps).unwrap();
            let xi2: Vec<f64> = xi.iter().zip(&v).map(|(a, b)| lam * a + b).collect();
            let p2 = BubbleParams::new(xi2, lam * eps).unwrap();
            let mut x2: Vec<f64> = x.iter().map(|a| lam * a).collect();
            for k in 0..n - 1 {
                x2[k] += v[k];
            }
            let y = p.conformal_map(&x);
            let y2 = p2.conformal_map(&x2);
            for a in 0..n {
                assert!((y[a] - y2[a]).abs() <= 1e-12 * (1.0 + y[a].abs()));
            }
        }
    }
}
