use rug::Float;

use super::{AuxCache, FloatKey, TPlusForm};
use crate::combinatorics::binom;
use crate::error::{domain, Result};
use crate::numkernel::{expint_ei_neg, factorial};

fn check_args(alpha: &Float, beta: &Float) -> Result<()> {
    if !(*alpha > 0 && *beta > 0) {
        return domain(format!(
            "T_n(alpha, beta) needs alpha > 0 and beta > 0, got ({}, {})",
            alpha.to_f64(),
            beta.to_f64()
        ));
    }
    Ok(())
}

fn grow_to(have: usize, top: u32) -> u32 {
    ((top as usize + 1).max(2 * have).max(8) - 1) as u32
}

impl AuxCache {
    /// `T_n^(+)(alpha, beta)`.
    pub fn t_plus(&mut self, n: u32, alpha: &Float, beta: &Float) -> Result<Float> {
        Ok(self.t_plus_slice(alpha, beta, n)?[n as usize].clone())
    }

    /// `T_n^(-)(alpha, beta) = A_n(alpha) ln(beta/(alpha+beta))
    ///   + sum_{m=1}^n C(n,m) (m-1)! (alpha+beta)^{-m} A_{n-m}(alpha)`.
    pub fn t_minus(&mut self, n: u32, alpha: &Float, beta: &Float) -> Result<Float> {
        Ok(self.t_minus_slice(alpha, beta, n)?[n as usize].clone())
    }

    pub(crate) fn t_plus_slice(&mut self, alpha: &Float, beta: &Float, top: u32) -> Result<&[Float]> {
        check_args(alpha, beta)?;
        let key = (FloatKey::of(alpha), FloatKey::of(beta));
        let have = self.tplus.get(&key).map_or(0, Vec::len);
        if have <= top as usize {
            let top = grow_to(have, top);
            let table = self.t_plus_table(alpha, beta, top)?;
            self.tplus.insert(key.clone(), table);
        }
        Ok(&self.tplus[&key][..=top as usize])
    }

    pub(crate) fn t_minus_slice(&mut self, alpha: &Float, beta: &Float, top: u32) -> Result<&[Float]> {
        check_args(alpha, beta)?;
        let key = (FloatKey::of(alpha), FloatKey::of(beta));
        let have = self.tminus.get(&key).map_or(0, Vec::len);
        if have <= top as usize {
            let top = grow_to(have, top);
            let table = self.t_minus_table(alpha, beta, top)?;
            self.tminus.insert(key.clone(), table);
        }
        Ok(&self.tminus[&key][..=top as usize])
    }

    fn t_plus_table(&mut self, alpha: &Float, beta: &Float, top: u32) -> Result<Vec<Float>> {
        let ctx = self.ctx;
        let p = ctx.bits();
        let neg_alpha = Float::with_val(p, -alpha);
        let w = Float::with_val(p, alpha + beta) * 2u32;
        let two_beta = Float::with_val(p, beta * 2u32);
        let ei_2b = expint_ei_neg(&two_beta, &ctx)?;
        let ei_w = expint_ei_neg(&w, &ctx)?;
        let a_pos = self.a_slice(alpha, top)?.to_vec();
        let a_neg = self.a_slice(&neg_alpha, top)?.to_vec();
        let a_w = self.a_slice(&w, top)?.to_vec();
        let form = self.tplus_form;

        let mut out = Vec::with_capacity(top as usize + 1);
        for n in 0..=top {
            let nu = n as usize;
            let lead = match form {
                TPlusForm::Derived => &a_pos[nu],
                TPlusForm::Printed => &a_neg[nu],
            };
            let mut acc = Float::with_val(p, lead * &ei_2b);
            let second = Float::with_val(p, &a_neg[nu] * &ei_w);
            if n % 2 == 0 {
                acc += second;
            } else {
                acc -= second;
            }
            for m in 1..=n {
                let coef = binom(n, m as i64) << m; // C(n,m) 2^m
                let term = Float::with_val(p, &a_neg[(n - m) as usize] * &a_w[(m - 1) as usize]) * &coef;
                // Derived: (-1)^{n+m-1}; Printed: -(-1)^{n-m}(-1)^{m-1} = (-1)^n
                let negative = match form {
                    TPlusForm::Derived => (n + m - 1) % 2 == 1,
                    TPlusForm::Printed => n % 2 == 1,
                };
                if negative {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    fn t_minus_table(&mut self, alpha: &Float, beta: &Float, top: u32) -> Result<Vec<Float>> {
        let p = self.ctx.bits();
        let sum_ab = Float::with_val(p, alpha + beta);
        let log_ratio = Float::with_val(p, beta / &sum_ab).ln();
        let a_pos = self.a_slice(alpha, top)?.to_vec();
        let inv = Float::with_val(p, 1) / &sum_ab;

        let mut out = Vec::with_capacity(top as usize + 1);
        for n in 0..=top {
            let mut acc = Float::with_val(p, &a_pos[n as usize] * &log_ratio);
            let mut inv_pow = Float::with_val(p, 1);
            let n_fact = factorial(n as i64)?;
            for m in 1..=n {
                inv_pow *= &inv;
                // C(n,m) (m-1)! = n! / (m (n-m)!)
                let coef = (&n_fact / factorial((n - m) as i64)?) / m;
                acc += Float::with_val(p, &inv_pow * &a_pos[(n - m) as usize]) * &coef;
            }
            out.push(acc);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auxiliary::{t_minus, t_plus};
    use crate::numkernel::PrecisionContext;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    #[test]
    fn t_plus_base_case() {
        let c = ctx();
        let (a, b) = (c.parse("1.3").unwrap(), c.parse("0.7").unwrap());
        let p = c.bits();
        let e_neg = Float::with_val(p, (-a.clone()).exp_ref()) / &a;
        let e_pos = Float::with_val(p, a.exp_ref()) / &a;
        let two_b = Float::with_val(p, &b * 2u32);
        let w = Float::with_val(p, &a + &b) * 2u32;
        let want = e_neg * expint_ei_neg(&two_b, &c).unwrap() - e_pos * expint_ei_neg(&w, &c).unwrap();
        let got = t_plus(0, &a, &b, &c).unwrap();
        assert!((got - want).abs().to_f64() < 1e-45);
    }

    #[test]
    fn t_plus_unit_args() {
        let c = ctx();
        let v = t_plus(0, &c.int(1), &c.int(1), &c).unwrap().to_f64();
        assert!((v - (-0.00771615)).abs() < 1e-7, "{v}");
    }

    #[test]
    fn t_minus_base_case() {
        let c = ctx();
        let v = t_minus(0, &c.int(1), &c.int(1), &c).unwrap();
        let want = Float::with_val(c.bits(), -1).exp() * Float::with_val(c.bits(), 0.5).ln();
        assert!((v.clone() - want).abs().to_f64() < 1e-45);
        assert!((v.to_f64() + 0.254995).abs() < 1e-6);
    }

    #[test]
    fn t_minus_large_beta_limit() {
        let c = ctx();
        let small = t_minus(0, &c.int(1), &c.parse("1e12").unwrap(), &c).unwrap();
        assert!(small < 0);
        assert!(small.to_f64().abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        let c = ctx();
        assert!(t_plus(1, &c.zero(), &c.int(1), &c).is_err());
        assert!(t_minus(1, &c.int(1), &c.int(-1), &c).is_err());
    }

    #[test]
    fn printed_form_differs() {
        let c = ctx();
        let (a, b) = (c.parse("1.3").unwrap(), c.parse("0.7").unwrap());
        let mut derived = AuxCache::with_form(c, TPlusForm::Derived);
        let mut printed = AuxCache::with_form(c, TPlusForm::Printed);
        let d = derived.t_plus(0, &a, &b).unwrap().to_f64();
        let q = printed.t_plus(0, &a, &b).unwrap().to_f64();
        assert!((d - (-0.0136968403361809)).abs() < 1e-15);
        assert!((q - 0.338700539641769).abs() < 1e-14);
    }

    /// `T_n = (-1)^n d^n/d alpha^n T_0`, by central differences of the base.
    #[test]
    fn derivative_property() {
        let c = ctx();
        let digits = c.decimal_digits() as i32;
        let h = c.pow10(-digits / 3);
        let a = c.parse("1.1").unwrap();
        let b = c.parse("0.6").unwrap();
        let p = c.bits();
        for which in [true, false] {
            let base = |x: &Float| {
                if which {
                    t_plus(0, x, &b, &c).unwrap()
                } else {
                    t_minus(0, x, &b, &c).unwrap()
                }
            };
            let ap = Float::with_val(p, &a + &h);
            let am = Float::with_val(p, &a - &h);
            let f0 = base(&a);
            let fp = base(&ap);
            let fm = base(&am);
            let d1 = -(Float::with_val(p, &fp - &fm) / Float::with_val(p, &h * 2u32));
            let d2 =
                (Float::with_val(p, &fp + &fm) - Float::with_val(p, &f0 * 2u32)) / Float::with_val(p, h.square_ref());
            let (t1, t2) = if which {
                (t_plus(1, &a, &b, &c).unwrap(), t_plus(2, &a, &b, &c).unwrap())
            } else {
                (t_minus(1, &a, &b, &c).unwrap(), t_minus(2, &a, &b, &c).unwrap())
            };
            // truncation error O(h^2) dominates
            let tol = 10f64.powi(-(2 * digits / 3) + 6);
            assert!(((d1 - &t1) / &t1).abs().to_f64() < tol, "first derivative ({which})");
            assert!(((d2 - &t2) / &t2).abs().to_f64() < tol, "second derivative ({which})");
        }
    }
}
