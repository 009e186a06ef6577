//! Order-4 multilinear forms with the algebraic symmetries of the Weyl
//! tensor, over the tangential coordinates 1..m (m = n-1).
//!
//! Construction: a seeded random symmetric trace-free integer matrix S is
//! squared in the Kulkarni–Nomizu sense (which yields the Riemann-type
//! symmetries) and its Ricci and scalar trace parts are removed through the
//! standard orthogonal decomposition, leaving a totally trace-free form.
//! Components stay exact: a flat array of i64 numerators over one common
//! denominator.

use crate::exact::{rat_to_string, rational_from_str, Rational};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum WeylError {
    #[error("no nonzero Weyl-type form exists in tangential dimension {0} (need m >= 4)")]
    DimensionTooSmall(usize),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("bad Weyl form serialization: {0}")]
    BadSerialization(String),
}

/// Dense order-4 form on indices `0..m` with Weyl symmetries.
///
/// Immutable after construction; component `(i,j,k,l)` equals
/// `num[((i m + j) m + k) m + l] / den`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylForm {
    m: usize,
    num: Vec<i64>,
    den: i64,
}

impl WeylForm {
    /// Deterministic pseudo-random construction; identical `(m, seed)`
    /// always yields bit-identical components.
    pub fn from_seed(m: usize, seed: u64) -> Result<WeylForm, WeylError> {
        if m < 4 {
            return Err(WeylError::DimensionTooSmall(m));
        }
        for attempt in 0..16u64 {
            let w = Self::build(m, seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
            if !w.num.iter().all(|&x| x == 0) && !w.norm_sq_scaled_num().is_zero() {
                return Ok(w);
            }
        }
        unreachable!("generic Kulkarni-Nomizu squares do not vanish repeatedly");
    }

    fn build(m: usize, seed: u64) -> WeylForm {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Symmetric integer matrix, then the integer trace-free combination
        // m*S0 - tr(S0)*Id.
        let mut s0 = vec![0i64; m * m];
        for i in 0..m {
            for j in i..m {
                let v = rng.gen_range(-9i64..=9);
                s0[i * m + j] = v;
                s0[j * m + i] = v;
            }
        }
        let tr: i64 = (0..m).map(|i| s0[i * m + i]).sum();
        let mf = m as i64;
        let mut s = vec![0i64; m * m];
        for i in 0..m {
            for j in 0..m {
                s[i * m + j] = mf * s0[i * m + j] - if i == j { tr } else { 0 };
            }
        }

        let idx = |i: usize, j: usize, k: usize, l: usize| ((i * m + j) * m + k) * m + l;

        // Kulkarni-Nomizu square: E_{ijkl} = S_ik S_jl - S_il S_jk.
        let mut e = vec![0i64; m * m * m * m];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        e[idx(i, j, k, l)] =
                            s[i * m + k] * s[j * m + l] - s[i * m + l] * s[j * m + k];
                    }
                }
            }
        }

        // Ricci contraction B_jl = Σ_i E_{ijil} and its trace.
        let mut b = vec![0i64; m * m];
        for j in 0..m {
            for l in 0..m {
                b[j * m + l] = (0..m).map(|i| e[idx(i, j, i, l)]).sum();
            }
        }
        let tau: i64 = (0..m).map(|j| b[j * m + j]).sum();
        // m*B0 = m*B - tau*Id stays integral.
        let mut mb0 = vec![0i64; m * m];
        for j in 0..m {
            for l in 0..m {
                mb0[j * m + l] = mf * b[j * m + l] - if j == l { tau } else { 0 };
            }
        }

        // D*W = D*E - 2(m-1)*((m B0) (x) g) - tau (m-2)*(g (x) g), with
        // D = 2m(m-1)(m-2) and (A (x) g)_{ijkl} = A_ik d_jl + A_jl d_ik
        // - A_il d_jk - A_jk d_il.
        let dcom = 2 * mf * (mf - 1) * (mf - 2);
        let kn = |a: &[i64], i: usize, j: usize, k: usize, l: usize| -> i64 {
            let d = |p: usize, q: usize| (p == q) as i64;
            a[i * m + k] * d(j, l) + a[j * m + l] * d(i, k)
                - a[i * m + l] * d(j, k)
                - a[j * m + k] * d(i, l)
        };
        let mut num = vec![0i64; m * m * m * m];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let gg = 2 * ((i == k && j == l) as i64 - (i == l && j == k) as i64);
                        num[idx(i, j, k, l)] = dcom * e[idx(i, j, k, l)]
                            - 2 * (mf - 1) * kn(&mb0, i, j, k, l)
                            - tau * (mf - 2) * gg;
                    }
                }
            }
        }

        // Reduce by the global gcd, then renormalize so components lie in
        // [-1, 1] (the overall scale of W is ours to fix).
        let mut g = dcom.unsigned_abs();
        for &x in &num {
            g = gcd_u64(g, x.unsigned_abs());
            if g == 1 {
                break;
            }
        }
        let g = g.max(1) as i64;
        for x in &mut num {
            *x /= g;
        }
        let max_abs = num.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0).max(1) as i64;
        WeylForm { m, num, den: max_abs }
    }

    pub fn tangential_dim(&self) -> usize {
        self.m
    }

    pub fn ambient_dim(&self) -> usize {
        self.m + 1
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.m + j) * self.m + k) * self.m + l
    }

    #[inline]
    pub fn num(&self, i: usize, j: usize, k: usize, l: usize) -> i64 {
        self.num[self.index(i, j, k, l)]
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn comp(&self, i: usize, j: usize, k: usize, l: usize) -> Rational {
        Rational::new(self.num(i, j, k, l).into(), self.den.into())
    }

    pub fn comp_f64(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.num(i, j, k, l) as f64 / self.den as f64
    }

    /// Dense f64 copy for numeric evaluators, same flat layout.
    pub fn components_f64(&self) -> Vec<f64> {
        let d = self.den as f64;
        self.num.iter().map(|&x| x as f64 / d).collect()
    }

    fn norm_sq_scaled_num(&self) -> BigInt {
        // Σ (W_ikjl + W_iljk)^2 in units of den^2.
        let m = self.m;
        let mut acc: i128 = 0;
        for i in 0..m {
            for k in 0..m {
                for j in 0..m {
                    for l in 0..m {
                        let t = (self.num(i, k, j, l) + self.num(i, l, j, k)) as i128;
                        acc += t * t;
                    }
                }
            }
        }
        BigInt::from(acc)
    }

    /// The squared norm used throughout: `Σ (W_ikjl + W_iljk)^2` over all
    /// four tangential indices.
    pub fn norm_sq(&self) -> Rational {
        let den = BigInt::from(self.den) * BigInt::from(self.den);
        Rational::new(self.norm_sq_scaled_num(), den)
    }

    pub fn norm_sq_f64(&self) -> f64 {
        self.norm_sq().to_f64().unwrap_or(f64::NAN)
    }

    /// Exact Gram tensor `G_pq = Σ_{ijl} (W_ipjl + W_iljp)(W_iqjl + W_iljq)`.
    pub fn g_tensor(&self) -> Vec<Vec<Rational>> {
        let m = self.m;
        let den = BigInt::from(self.den) * BigInt::from(self.den);
        let mut out = vec![vec![Rational::zero(); m]; m];
        for p in 0..m {
            for q in p..m {
                let mut acc: i128 = 0;
                for i in 0..m {
                    for j in 0..m {
                        for l in 0..m {
                            let a = (self.num(i, p, j, l) + self.num(i, l, j, p)) as i128;
                            let b = (self.num(i, q, j, l) + self.num(i, l, j, q)) as i128;
                            acc += a * b;
                        }
                    }
                }
                let v = Rational::new(BigInt::from(acc), den.clone());
                out[p][q] = v.clone();
                out[q][p] = v;
            }
        }
        out
    }

    /// f64 Gram tensor for the numeric paths; same contraction as
    /// [`Self::g_tensor`].
    pub fn g_tensor_f64(&self) -> Vec<Vec<f64>> {
        let m = self.m;
        let w = self.components_f64();
        let idx = |i: usize, j: usize, k: usize, l: usize| ((i * m + j) * m + k) * m + l;
        let mut out = vec![vec![0.0; m]; m];
        for p in 0..m {
            for q in p..m {
                let mut acc = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        for l in 0..m {
                            let a = w[idx(i, p, j, l)] + w[idx(i, l, j, p)];
                            let b = w[idx(i, q, j, l)] + w[idx(i, l, j, q)];
                            acc += a * b;
                        }
                    }
                }
                out[p][q] = acc;
                out[q][p] = acc;
            }
        }
        out
    }

    /// Exhaustive exact check of all five defining invariants.
    pub fn verify_invariants(&self) -> Result<(), WeylError> {
        let m = self.m;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let w = self.num(i, j, k, l);
                        if w != -self.num(j, i, k, l) {
                            return Err(WeylError::InvariantViolated(format!(
                                "antisymmetry in (1,2) at ({i},{j},{k},{l})"
                            )));
                        }
                        if w != -self.num(i, j, l, k) {
                            return Err(WeylError::InvariantViolated(format!(
                                "antisymmetry in (3,4) at ({i},{j},{k},{l})"
                            )));
                        }
                        if w != self.num(k, l, i, j) {
                            return Err(WeylError::InvariantViolated(format!(
                                "pair-swap symmetry at ({i},{j},{k},{l})"
                            )));
                        }
                        if self.num(i, j, k, l) + self.num(i, k, l, j) + self.num(i, l, j, k) != 0 {
                            return Err(WeylError::InvariantViolated(format!(
                                "first Bianchi identity at ({i},{j},{k},{l})"
                            )));
                        }
                    }
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                let t1: i64 = (0..m).map(|k| self.num(k, i, k, j)).sum();
                let t2: i64 = (0..m).map(|k| self.num(i, k, j, k)).sum();
                let t3: i64 = (0..m).map(|k| self.num(i, k, k, j)).sum();
                if t1 != 0 || t2 != 0 || t3 != 0 {
                    return Err(WeylError::InvariantViolated(format!(
                        "nonzero single trace at ({i},{j})"
                    )));
                }
            }
        }
        if self.norm_sq_scaled_num().is_zero() {
            return Err(WeylError::InvariantViolated("|W|^2 = 0".into()));
        }
        Ok(())
    }

    /// Pullback under a coordinate permutation: `W'_{ijkl} = W_{s(i)s(j)s(k)s(l)}`.
    pub fn permuted(&self, perm: &[usize]) -> WeylForm {
        assert_eq!(perm.len(), self.m);
        let m = self.m;
        let mut num = vec![0i64; m * m * m * m];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        num[((i * m + j) * m + k) * m + l] =
                            self.num(perm[i], perm[j], perm[k], perm[l]);
                    }
                }
            }
        }
        WeylForm { m, num, den: self.den }
    }

    /// Flat JSON array of components with a dimension header; components are
    /// lossless `"p/q"` strings.
    pub fn to_json(&self) -> Value {
        let comps: Vec<String> = (0..self.num.len())
            .map(|i| rat_to_string(&Rational::new(self.num[i].into(), self.den.into())))
            .collect();
        json!({ "m": self.m, "components": comps })
    }

    pub fn from_json(v: &Value) -> Result<WeylForm, WeylError> {
        let bad = |msg: &str| WeylError::BadSerialization(msg.to_string());
        let m = v["m"].as_u64().ok_or_else(|| bad("missing m"))? as usize;
        let comps = v["components"].as_array().ok_or_else(|| bad("missing components"))?;
        if comps.len() != m * m * m * m {
            return Err(bad("component count does not match dimension"));
        }
        let rats: Vec<Rational> = comps
            .iter()
            .map(|c| {
                c.as_str()
                    .ok_or_else(|| bad("component is not a string"))
                    .and_then(|s| {
                        rational_from_str(s).map_err(|e| WeylError::BadSerialization(e.to_string()))
                    })
            })
            .collect::<Result<_, _>>()?;
        // Common denominator, then i64 numerators.
        let mut den = BigInt::from(1);
        for r in &rats {
            den = num_integer::lcm(den, r.denom().clone());
        }
        let num: Vec<i64> = rats
            .iter()
            .map(|r| {
                (r.numer() * &den / r.denom())
                    .to_i64()
                    .ok_or_else(|| bad("component too large for exact storage"))
            })
            .collect::<Result<_, _>>()?;
        let den = den.to_i64().ok_or_else(|| bad("denominator too large"))?;
        Ok(WeylForm { m, num, den })
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}
