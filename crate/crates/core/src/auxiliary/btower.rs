use rug::ops::Pow;
use rug::{Float, Integer};

use super::{AuxCache, FloatKey};
use crate::combinatorics::binom;
use crate::error::{domain, Result};
use crate::numkernel::factorial;

impl AuxCache {
    /// `B_{nm;k}(alpha, beta)`.
    ///
    /// `k >= 0`: finite sum of `A_{n;mk}(alpha + beta)` from the antiderivative
    /// of `t^k e^{-beta t}`, with the falling factorial `k!/(k-h)!`.
    ///
    /// `k = -K < 0`: `T^(+/-)` differences from the `Ei` part of the
    /// antiderivative of `t^{-K} e^{-beta t}` plus `A_{n;mk}` terms. The
    /// integral converges only for `K <= m + 1`.
    pub fn b_aux(&mut self, n: u32, m: u32, k: i64, alpha: &Float, beta: &Float) -> Result<Float> {
        if !(*alpha > 0 && *beta > 0) {
            return domain(format!(
                "B_{{nm;k}} needs alpha > 0 and beta > 0, got ({}, {})",
                alpha.to_f64(),
                beta.to_f64()
            ));
        }
        if k < 0 && (-k) as u64 > m as u64 + 1 {
            return domain(format!("B_{{{n}{m};{k}}} diverges at mu = 1: needs |k| <= m + 1 for negative k"));
        }
        let key = (FloatKey::of(alpha), FloatKey::of(beta), n, m, k);
        if let Some(v) = self.b.get(&key) {
            return Ok(v.clone());
        }
        let v = if k >= 0 {
            self.b_positive(n, m, k as u32, alpha, beta)?
        } else {
            self.b_negative(n, m, (-k) as u32, alpha, beta)?
        };
        self.b.insert(key, v.clone());
        Ok(v)
    }

    fn b_positive(&mut self, n: u32, m: u32, k: u32, alpha: &Float, beta: &Float) -> Result<Float> {
        let p = self.ctx.bits();
        let sum_ab = Float::with_val(p, alpha + beta);
        let e_pos = Float::with_val(p, beta.exp_ref());
        let e_neg = Float::with_val(p, (-beta.clone()).exp_ref());
        let inv_beta = Float::with_val(p, 1) / beta;
        let k_fact = factorial(k as i64)?;

        let mut acc = Float::new(p);
        let mut inv_pow = inv_beta.clone(); // beta^{-h-1}
        for h in 0..=k {
            let ratio: Integer = &k_fact / factorial((k - h) as i64)?;
            let lower = self.a_nmk(n, m, m + k - h, &sum_ab)?;
            let upper = self.a_nmk(n, m + k - h, m, &sum_ab)?;
            let bracket = Float::with_val(p, &e_pos * &lower) - Float::with_val(p, &e_neg * &upper);
            acc += Float::with_val(p, &bracket * &inv_pow) * &ratio;
            inv_pow *= &inv_beta;
        }
        Ok(acc)
    }

    fn b_negative(&mut self, n: u32, m: u32, kk: u32, alpha: &Float, beta: &Float) -> Result<Float> {
        let p = self.ctx.bits();
        let sum_ab = Float::with_val(p, alpha + beta);
        let neg_beta = Float::with_val(p, -beta);
        let top = n + 2 * m;

        // (-beta)^{K-1}/(K-1)! sum_i (-1)^i C(m,i) [T^+_{n+2m-2i} - T^-_{n+2m-2i}]
        let tp = self.t_plus_slice(alpha, beta, top)?.to_vec();
        let tm = self.t_minus_slice(alpha, beta, top)?.to_vec();
        let mut ei_part = Float::new(p);
        for i in 0..=m {
            let j = (top - 2 * i) as usize;
            let diff = Float::with_val(p, &tp[j] - &tm[j]) * binom(m, i as i64);
            if i % 2 == 0 {
                ei_part += diff;
            } else {
                ei_part -= diff;
            }
        }
        let km1_fact = factorial((kk - 1) as i64)?;
        let lead = Float::with_val(p, Pow::pow(&neg_beta, (kk - 1) as i32)) / &km1_fact;
        let mut acc = ei_part * lead;

        // - sum_{h=1}^{K-1} (K-h-1)!/(K-1)! (-beta)^{h-1}
        //     [e^{-beta} A_{n; m-K+h, m} - e^{beta} A_{n; m, m-K+h}]
        if kk > 1 {
            let e_pos = Float::with_val(p, beta.exp_ref());
            let e_neg = Float::with_val(p, neg_beta.exp_ref());
            let mut nb_pow = Float::with_val(p, 1);
            for h in 1..kk {
                let short = m + h - kk; // >= 0 because K <= m + 1
                let upper = self.a_nmk(n, short, m, &sum_ab)?;
                let lower = self.a_nmk(n, m, short, &sum_ab)?;
                let bracket = Float::with_val(p, &e_neg * &upper) - Float::with_val(p, &e_pos * &lower);
                let coef = Float::with_val(p, &nb_pow * &factorial((kk - h - 1) as i64)?) / &km1_fact;
                acc -= bracket * coef;
                nb_pow *= &neg_beta;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auxiliary::{a_nmk, b_aux};
    use crate::numkernel::PrecisionContext;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    #[test]
    fn k_zero_identity() {
        let c = ctx();
        let p = c.bits();
        let (a, b) = (c.parse("1.5").unwrap(), c.parse("0.8").unwrap());
        for (n, m) in [(0u32, 0u32), (1, 1), (3, 2)] {
            let got = b_aux(n, m, 0, &a, &b, &c).unwrap();
            let sh = Float::with_val(p, b.exp_ref()) - Float::with_val(p, (-b.clone()).exp_ref());
            let want = sh / &b * a_nmk(n, m, m, &Float::with_val(p, &a + &b), &c).unwrap();
            assert!(((got - &want) / &want).abs().to_f64() < 1e-45);
        }
    }

    #[test]
    fn divergent_negative_k_rejected() {
        let c = ctx();
        let (a, b) = (c.int(1), c.int(1));
        assert!(b_aux(0, 0, -1, &a, &b, &c).is_ok());
        assert!(b_aux(0, 0, -2, &a, &b, &c).is_err());
        assert!(b_aux(0, 3, -4, &a, &b, &c).is_ok());
        assert!(b_aux(0, 3, -5, &a, &b, &c).is_err());
        assert!(b_aux(0, 3, 1, &a, &c.zero(), &c).is_err());
    }

    #[test]
    fn positive_across_dispatch() {
        let c = ctx();
        let (a, b) = (c.parse("1.5").unwrap(), c.parse("0.8").unwrap());
        for k in -6i64..=6 {
            let v = b_aux(1, 5, k, &a, &b, &c).unwrap();
            assert!(v.is_finite() && v > 0, "k={k}: {}", v.to_f64());
        }
    }
}
