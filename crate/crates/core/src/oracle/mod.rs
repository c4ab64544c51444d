//! Brute-force referees for the closed forms: tanh-sinh quadrature of the
//! defining integrals, in the same MPFR precision as the analytic path.
//!
//! Two-dimensional integrals run over elliptical coordinates `(mu, nu)`.
//! Wherever the third-center distance `r_a` has a kink or singularity
//! inside the domain, the inner variable is changed so that `r_a` becomes
//! analytic: for a center at axial position `z0 = mu_a nu_a` (in units of
//! `R/2`),
//!
//! ```text
//! (2 r_a / R)^2 = (nu - mu z0)^2 + (mu^2 - 1)(1 - z0^2)      (|z0| < 1)
//!               = (mu - nu z0)^2 + (1 - nu^2)(z0^2 - 1)      (|z0| > 1)
//! ```
//!
//! and the first square is absorbed by a `sinh` substitution, giving
//! `2 r_a / R = q cosh w`.

pub mod tanhsinh;

use rug::ops::Pow;
use rug::Float;

use crate::error::{domain, Result};
use crate::geometry::{scaled_exponents, Conformation};
use crate::numkernel::PrecisionContext;
use crate::overlap::{IntegralValue, SlaterParams};
use crate::repulsion::{Center, EriSpec};
use tanhsinh::{integrate_interval, integrate_semi_infinite, QuadResult, Tolerance};

/// Stopping rule and `mu` mapping for the oracle.
#[derive(Debug, Clone)]
pub struct QuadConfig {
    /// Absolute tolerance on the outer integral.
    pub target_abs_tol: Float,
    /// Finest tanh-sinh level (step `2^-level`) before giving up.
    pub max_level: u32,
    /// Coarsest level accepted as converged.
    pub min_level: u32,
    /// `s` in `mu = 1 + s u/(1 - u)`.
    pub mu_scale: Float,
}

impl QuadConfig {
    /// Tolerance `10^(-digits+5)`, the tightest the oracle may claim.
    pub fn for_ctx(ctx: &PrecisionContext) -> Self {
        Self::with_tol_digits(ctx, ctx.decimal_digits() - 5)
    }

    /// Tolerance `10^(-tol_digits)`, clamped to `10^(-digits+5)`.
    pub fn with_tol_digits(ctx: &PrecisionContext, tol_digits: u32) -> Self {
        let d = tol_digits.min(ctx.decimal_digits() - 5);
        Self { target_abs_tol: ctx.pow10(-(d as i32)), max_level: 12, min_level: 3, mu_scale: ctx.one() }
    }

    pub fn validate(&self, ctx: &PrecisionContext) -> Result<()> {
        if self.target_abs_tol < ctx.pow10(-(ctx.decimal_digits() as i32) + 5) {
            return domain("target_abs_tol below 10^(-digits+5)");
        }
        if !(self.mu_scale > 0) {
            return domain("mu_scale must be positive");
        }
        if self.min_level > self.max_level {
            return domain("min_level exceeds max_level");
        }
        Ok(())
    }
}

/// A point of the `(mu, nu)` plane with `rho = 2 r_a / R`.
pub(crate) struct Point<'a> {
    pub mu: &'a Float,
    pub nu: &'a Float,
    pub rho: &'a Float,
}

/// How `r_a` depends on `(mu, nu)`.
enum Layout {
    /// `|z0| < 1`; `s = sqrt(1 - z0^2)`.
    Between { z0: Float, s: Float },
    /// `|z0| > 1`; `s = sqrt(z0^2 - 1)`.
    Beyond { z0: Float, s: Float },
    /// Center on a focus: `rho = mu - z0 nu`.
    AtFocus { z0: Float },
    /// `rho^2 = mu^2 + nu^2 + 2`.
    Triangular,
}

impl Layout {
    fn of(conf: &Conformation, bits: u32) -> Self {
        let z0 = match conf {
            Conformation::SymmetricTriangular => return Self::Triangular,
            Conformation::LinearMidpoint => Float::new(bits),
            Conformation::GeneralOnAxis { mu_a, nu_a } => Float::with_val(bits, mu_a * nu_a),
        };
        let z2 = Float::with_val(bits, z0.square_ref());
        if z2 < 1 {
            let s = (1u32 - z2).sqrt();
            Self::Between { z0, s }
        } else if z2 > 1 {
            let s = (z2 - 1u32).sqrt();
            Self::Beyond { z0, s }
        } else {
            Self::AtFocus { z0 }
        }
    }
}

struct Plan<'a> {
    bits: u32,
    outer: Tolerance,
    inner: Tolerance,
    mu_scale: &'a Float,
    inner_rel: Float,
}

impl<'a> Plan<'a> {
    fn new(cfg: &'a QuadConfig, ctx: &PrecisionContext) -> Self {
        let bits = ctx.bits();
        let inner_rel = ctx.pow10(-(ctx.decimal_digits() as i32) - 3);
        let tiny = ctx.pow10(-((ctx.decimal_digits() + ctx.guard_digits()) as i32) - 30);
        Self {
            bits,
            outer: Tolerance {
                abs: Float::with_val(bits, &cfg.target_abs_tol),
                rel: Float::new(bits),
                min_level: cfg.min_level,
                max_level: cfg.max_level,
            },
            inner: Tolerance { abs: tiny, rel: inner_rel.clone(), min_level: 3, max_level: cfg.max_level },
            mu_scale: &cfg.mu_scale,
            inner_rel,
        }
    }

    /// `int_a^b g dw` split at 0 when `a < 0 < b`.
    fn split_at_zero<F>(&self, g: F, a: &Float, b: &Float) -> Float
    where
        F: Fn(&Float) -> Float + Sync,
    {
        let bits = self.bits;
        let zero = Float::new(bits);
        if *a < 0 && *b > 0 {
            let l = integrate_interval(|w, _, _| g(w), a, &zero, &self.inner, bits);
            let r = integrate_interval(|w, _, _| g(w), &zero, b, &self.inner, bits);
            l.value + r.value
        } else {
            integrate_interval(|w, _, _| g(w), a, b, &self.inner, bits).value
        }
    }

    /// `int_1^inf int_-1^1 f(mu, nu, rho) dnu dmu`.
    fn plane<F>(&self, layout: &Layout, f: F) -> QuadResult
    where
        F: Fn(&Point) -> Float + Sync,
    {
        let bits = self.bits;
        let one = Float::with_val(bits, 1);
        match layout {
            Layout::Between { z0, s } => integrate_semi_infinite(
                |mu, off| {
                    // q = sqrt(mu^2 - 1) sqrt(1 - z0^2), from mu - 1 exactly
                    let q = Float::with_val(bits, off * Float::with_val(bits, off + 2u32)).sqrt() * s;
                    let c = Float::with_val(bits, mu * z0);
                    let lo = Float::with_val(bits, -Float::with_val(bits, &c + 1u32) / &q).asinh();
                    let hi = Float::with_val(bits, Float::with_val(bits, 1u32 - &c) / &q).asinh();
                    self.split_at_zero(
                        |w| {
                            let nu = Float::with_val(bits, w.sinh_ref()) * &q + &c;
                            let rho = Float::with_val(bits, w.cosh_ref()) * &q;
                            let v = f(&Point { mu, nu: &nu, rho: &rho });
                            v * rho
                        },
                        &lo,
                        &hi,
                    )
                },
                &one,
                self.mu_scale,
                &self.outer,
                bits,
            ),
            Layout::Beyond { z0, s } => {
                let neg = Float::with_val(bits, -1);
                integrate_interval(
                    |nu, from_lo, to_hi| {
                        let h = Float::with_val(bits, from_lo * to_hi).sqrt() * s;
                        if h.is_zero() {
                            return Float::new(bits);
                        }
                        let c = Float::with_val(bits, nu * z0);
                        let w0 = Float::with_val(bits, Float::with_val(bits, 1u32 - &c) / &h).asinh();
                        let g = |w: &Float| {
                            let mu = Float::with_val(bits, w.sinh_ref()) * &h + &c;
                            if !mu.is_finite() {
                                return Float::new(bits);
                            }
                            let rho = Float::with_val(bits, w.cosh_ref()) * &h;
                            let v = f(&Point { mu: &mu, nu, rho: &rho });
                            v * rho
                        };
                        let zero = Float::new(bits);
                        let start = if w0 < 0 { zero.clone() } else { w0.clone() };
                        let mut total = integrate_semi_infinite(|w, _| g(w), &start, &one, &self.inner, bits).value;
                        if w0 < 0 {
                            total += integrate_interval(|w, _, _| g(w), &w0, &zero, &self.inner, bits).value;
                        }
                        total
                    },
                    &neg,
                    &one,
                    &self.outer,
                    bits,
                )
            }
            Layout::AtFocus { z0 } => self.mu_outer_nu_inner(|mu, nu| Float::with_val(bits, nu * z0) * -1i32 + mu, f),
            Layout::Triangular => self.mu_outer_nu_inner(
                |mu, nu| {
                    (Float::with_val(bits, mu.square_ref()) + Float::with_val(bits, nu.square_ref()) + 2u32).sqrt()
                },
                f,
            ),
        }
    }

    fn mu_outer_nu_inner<R, F>(&self, rho_of: R, f: F) -> QuadResult
    where
        R: Fn(&Float, &Float) -> Float + Sync,
        F: Fn(&Point) -> Float + Sync,
    {
        let bits = self.bits;
        let one = Float::with_val(bits, 1);
        let neg = Float::with_val(bits, -1);
        integrate_semi_infinite(
            |mu, _| {
                integrate_interval(
                    |nu, _, _| {
                        let rho = rho_of(mu, nu);
                        f(&Point { mu, nu, rho: &rho })
                    },
                    &neg,
                    &one,
                    &self.inner,
                    bits,
                )
                .value
            },
            &one,
            self.mu_scale,
            &self.outer,
            bits,
        )
    }

    fn finish(&self, r: QuadResult, prefactor: &Float) -> IntegralValue {
        let value = Float::with_val(self.bits, &r.value * prefactor);
        let inner_part = Float::with_val(self.bits, value.abs_ref()) * &self.inner_rel;
        let tail = Float::with_val(self.bits, &r.error * prefactor).abs() + inner_part;
        IntegralValue { value, terms_used: r.level, tail_estimate: tail, converged: r.converged }
    }
}

/// Exponent below which an integrand is treated as zero.
fn cutoff(bits: u32) -> f64 {
    2.0 * bits as f64 * std::f64::consts::LN_2 + 50.0
}

/// `e^{-x}`, or `None` once `x` is past the cutoff.
fn damped(x: &Float, bits: u32) -> Option<Float> {
    if !x.is_finite() || x.to_f64() > cutoff(bits) {
        None
    } else {
        Some(Float::with_val(bits, -x).exp())
    }
}

fn powi(x: &Float, n: i32, bits: u32) -> Float {
    Float::with_val(bits, Pow::pow(x, n))
}

/// Overlap integral by 2D quadrature in any conformation; `n_a = 0` is the
/// `r_a^{-1}` weight.
pub fn quad_overlap_3c(
    p: &SlaterParams,
    conf: &Conformation,
    cfg: &QuadConfig,
    ctx: &PrecisionContext,
) -> Result<IntegralValue> {
    p.validate()?;
    quad_overlap_unchecked(p, conf, cfg, ctx)
}

/// As [`quad_overlap_3c`] but also admitting `n = 0` and `zeta = 0` on one
/// focus (`r^{-1}` weight there), as long as `zeta_b + zeta_c > 0`.
pub(crate) fn quad_overlap_unchecked(
    p: &SlaterParams,
    conf: &Conformation,
    cfg: &QuadConfig,
    ctx: &PrecisionContext,
) -> Result<IntegralValue> {
    cfg.validate(ctx)?;
    let bits = ctx.bits();
    let plan = Plan::new(cfg, ctx);
    let e = scaled_exponents(&p.zeta_a, &p.zeta_b, &p.zeta_c, &p.r, ctx)?;
    let (na, nb, nc) = (p.n_a as i32, p.n_b as i32, p.n_c as i32);
    let r = plan.plane(&Layout::of(conf, bits), |pt| {
        let x = Float::with_val(bits, &e.alpha * pt.mu)
            + Float::with_val(bits, &e.beta * pt.nu)
            + Float::with_val(bits, &e.gamma * pt.rho);
        let Some(d) = damped(&x, bits) else {
            return Float::new(bits);
        };
        let sum = Float::with_val(bits, pt.mu + pt.nu);
        let diff = Float::with_val(bits, pt.mu - pt.nu);
        d * powi(pt.rho, na - 1, bits) * powi(&sum, nb, bits) * powi(&diff, nc, bits)
    });
    let half_r = Float::with_val(bits, &p.r / 2u32);
    let pre = ctx.pi() * 2u32 * powi(&half_r, p.n_total() as i32, bits);
    Ok(plan.finish(r, &pre))
}

/// Auxiliary integral to check against its closed form.
#[derive(Debug, Clone)]
pub enum AuxIntegral {
    /// `int_1^inf mu^n (mu+1)^m (mu-1)^k e^{-alpha mu} dmu`.
    Anmk { n: u32, m: u32, k: u32, alpha: Float },
    /// `int_1^inf mu^n e^{-alpha mu} Ei(-beta (mu+1)) dmu`.
    Tplus { n: u32, alpha: Float, beta: Float },
    /// `int_1^inf mu^n e^{-alpha mu} Ei(-beta (mu-1)) dmu`.
    Tminus { n: u32, alpha: Float, beta: Float },
    /// `int_1^inf mu^n (mu^2-1)^m e^{-alpha mu} int_{mu-1}^{mu+1} t^k e^{-beta t} dt dmu`.
    B { n: u32, m: u32, k: i64, alpha: Float, beta: Float },
}

/// Direct quadrature of an auxiliary integral's definition. `Ei` comes
/// from MPFR, not from the crate's own series.
pub fn quad_aux_check(which: &AuxIntegral, cfg: &QuadConfig, ctx: &PrecisionContext) -> Result<IntegralValue> {
    cfg.validate(ctx)?;
    let bits = ctx.bits();
    let plan = Plan::new(cfg, ctx);
    let one = ctx.one();
    let r = match which {
        AuxIntegral::Anmk { n, m, k, alpha } => {
            if !(*alpha > 0) {
                return domain("A_{n;mk} quadrature needs alpha > 0");
            }
            integrate_semi_infinite(
                |mu, off| {
                    let Some(d) = damped(&Float::with_val(bits, alpha * mu), bits) else {
                        return Float::new(bits);
                    };
                    let plus = Float::with_val(bits, mu + 1u32);
                    d * powi(mu, *n as i32, bits) * powi(&plus, *m as i32, bits) * powi(off, *k as i32, bits)
                },
                &one,
                &cfg.mu_scale,
                &plan.outer,
                bits,
            )
        }
        AuxIntegral::Tplus { n, alpha, beta } | AuxIntegral::Tminus { n, alpha, beta } => {
            if !(*alpha > 0 && *beta > 0) {
                return domain("T quadrature needs alpha, beta > 0");
            }
            let plus = matches!(which, AuxIntegral::Tplus { .. });
            integrate_semi_infinite(
                |mu, off| {
                    let Some(d) = damped(&Float::with_val(bits, alpha * mu), bits) else {
                        return Float::new(bits);
                    };
                    let shifted = if plus { Float::with_val(bits, off + 2u32) } else { off.clone() };
                    let ei = Float::with_val(bits, -Float::with_val(bits, beta * &shifted)).eint();
                    d * powi(mu, *n as i32, bits) * ei
                },
                &one,
                &cfg.mu_scale,
                &plan.outer,
                bits,
            )
        }
        AuxIntegral::B { n, m, k, alpha, beta } => {
            if !(*alpha > 0 && *beta > 0) {
                return domain("B quadrature needs alpha, beta > 0");
            }
            if *k < 0 && (-*k) as u64 > *m as u64 + 1 {
                return domain("B diverges for -k > m + 1");
            }
            integrate_semi_infinite(
                |mu, off| {
                    let Some(d) = damped(&Float::with_val(bits, alpha * mu), bits) else {
                        return Float::new(bits);
                    };
                    let top = Float::with_val(bits, mu + 1u32);
                    let inner = if *k >= 0 {
                        integrate_interval(
                            |t, _, _| {
                                let e = Float::with_val(bits, -Float::with_val(bits, beta * t)).exp();
                                e * powi(t, *k as i32, bits)
                            },
                            off,
                            &top,
                            &plan.inner,
                            bits,
                        )
                    } else {
                        // t = e^tau tames the t^k blow-up at t = mu - 1 -> 0.
                        let lo = Float::with_val(bits, off.ln_ref());
                        let hi = Float::with_val(bits, top.ln_ref());
                        integrate_interval(
                            |tau, _, _| {
                                let t = Float::with_val(bits, tau.exp_ref());
                                let ex = Float::with_val(bits, tau * (*k + 1)) - Float::with_val(bits, beta * &t);
                                ex.exp()
                            },
                            &lo,
                            &hi,
                            &plan.inner,
                            bits,
                        )
                    };
                    let q = Float::with_val(bits, off * &top);
                    d * powi(mu, *n as i32, bits) * powi(&q, *m as i32, bits) * inner.value
                },
                &one,
                &cfg.mu_scale,
                &plan.outer,
                bits,
            )
        }
    };
    Ok(plan.finish(r, &one))
}

/// Potential of the spherical distribution `r^{n-1} e^{-zeta r}` at
/// distance `r`: `4 pi [U_{n+1}(r, zeta)/r + A_n(r, zeta)]`.
pub(crate) fn shell_potential(n: u32, zeta: &Float, r: &Float, ctx: &PrecisionContext) -> Result<Float> {
    use crate::auxiliary::{a_n_tail, u_head};
    let bits = ctx.bits();
    let four_pi = ctx.pi() * 4u32;
    let tail = a_n_tail(n, r, zeta, ctx)?;
    if r.is_zero() {
        return Ok(tail * four_pi);
    }
    let head = u_head(n + 1, r, zeta, ctx)? / r;
    Ok(Float::with_val(bits, head + tail) * four_pi)
}

/// Two-electron integral with the radial integral over electron 1 done in
/// closed form and electron 2 integrated over the `(mu, nu)` plane of the
/// `b`-`c` axis, center `a` at the midpoint.
pub fn quad_eri(spec: &EriSpec, cfg: &QuadConfig, ctx: &PrecisionContext) -> Result<IntegralValue> {
    spec.validate()?;
    cfg.validate(ctx)?;
    let bits = ctx.bits();
    let plan = Plan::new(cfg, ctx);
    let half_r = Float::with_val(bits, &spec.r / 2u32);
    let n = spec.dist.n_eff;
    let zeta = &spec.dist.zeta_eff;
    let (o1, o2) = (&spec.outer[0], &spec.outer[1]);
    let z1 = Float::with_val(bits, &o1.zeta * &half_r);
    let z2 = Float::with_val(bits, &o2.zeta * &half_r);
    let layout = Layout::of(&Conformation::LinearMidpoint, bits);
    let failure = std::sync::Mutex::new(None);
    let r = match spec.center {
        // chi_b(mu+nu) chi_c(mu-nu) Phi_a(rho)
        Center::A => plan.plane(&layout, |pt| {
            let sum = Float::with_val(bits, pt.mu + pt.nu);
            let diff = Float::with_val(bits, pt.mu - pt.nu);
            let x = Float::with_val(bits, &z1 * &sum) + Float::with_val(bits, &z2 * &diff);
            let Some(d) = damped(&x, bits) else {
                return Float::new(bits);
            };
            let ra = Float::with_val(bits, pt.rho * &half_r);
            match shell_potential(n, zeta, &ra, ctx) {
                Ok(phi) => d * phi * powi(&sum, o1.n as i32, bits) * powi(&diff, o2.n as i32, bits),
                Err(e) => {
                    *failure.lock().unwrap() = Some(e);
                    Float::new(bits)
                }
            }
        }),
        // chi_a(rho) chi_c(mu-nu) Phi_b(mu+nu)
        Center::B => plan.plane(&layout, |pt| {
            let sum = Float::with_val(bits, pt.mu + pt.nu);
            let diff = Float::with_val(bits, pt.mu - pt.nu);
            let x = Float::with_val(bits, &z1 * pt.rho) + Float::with_val(bits, &z2 * &diff);
            let Some(d) = damped(&x, bits) else {
                return Float::new(bits);
            };
            // mu + nu >= 0 exactly; clear roundoff near the b end.
            let rb = Float::with_val(bits, &sum * &half_r).max(&Float::new(bits));
            match shell_potential(n, zeta, &rb, ctx) {
                Ok(phi) => d * phi * powi(pt.rho, o1.n as i32 - 1, bits) * powi(&diff, o2.n as i32, bits) * sum,
                Err(e) => {
                    *failure.lock().unwrap() = Some(e);
                    Float::new(bits)
                }
            }
        }),
    };
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let pre = ctx.pi() * 2u32 * powi(&half_r, (o1.n + o2.n + 1) as i32, bits);
    Ok(plan.finish(r, &pre))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_floor() {
        let c = PrecisionContext::new(30).unwrap();
        let mut q = QuadConfig::for_ctx(&c);
        assert!(q.validate(&c).is_ok());
        q.target_abs_tol = c.pow10(-40);
        assert!(q.validate(&c).is_err());
        assert_eq!(QuadConfig::with_tol_digits(&c, 60).target_abs_tol, c.pow10(-25));
    }

    #[test]
    fn potential_at_origin() {
        let c = PrecisionContext::new(30).unwrap();
        let zeta = c.int(2);
        let v0 = shell_potential(1, &zeta, &c.zero(), &c).unwrap();
        let tiny = shell_potential(1, &zeta, &c.pow10(-20), &c).unwrap();
        // 4 pi 1!/2^2
        let want = c.pi();
        assert!(crate::numkernel::rel_deviation(&v0, &want) < 1e-30);
        assert!(crate::numkernel::rel_deviation(&tiny, &want) < 1e-18);
    }

    #[test]
    fn potential_far_field_is_coulomb() {
        let c = PrecisionContext::new(30).unwrap();
        let zeta = c.int(3);
        let r = c.int(60);
        let v = shell_potential(2, &zeta, &r, &c).unwrap();
        // total charge 4 pi 3!/3^4 over r
        let want = c.pi() * 4u32 * 6u32 / 81u32 / 60u32;
        assert!(crate::numkernel::rel_deviation(&v, &want) < 1e-25);
    }
}
