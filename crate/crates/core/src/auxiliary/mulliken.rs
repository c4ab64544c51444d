use rug::ops::Pow;
use rug::Float;

use super::{AuxCache, FloatKey};
use crate::combinatorics::d_coeffs;
use crate::error::{domain, Result};
use crate::numkernel::{factorial_f, PrecisionContext};

/// `A_0(alpha) ..= A_top(alpha)` from the closed form
/// `n! e^{-alpha} alpha^{-n-1} sum_{k<=n} alpha^k / k!`.
fn a_table(alpha: &Float, top: u32, ctx: &PrecisionContext) -> Vec<Float> {
    let bits = ctx.bits();
    // the partial exponential sum alternates for alpha < 0
    let extra = if *alpha < 0 { (2.0 * alpha.to_f64().abs() * std::f64::consts::LOG2_E).ceil() as u32 + 16 } else { 8 };
    let p = bits + extra;
    let a = Float::with_val(p, alpha);
    let damp = Float::with_val(p, (-a.clone()).exp_ref());
    let mut term = Float::with_val(p, 1); // alpha^n / n!
    let mut partial = Float::with_val(p, 1); // sum_{k<=n} alpha^k / k!
    let mut ratio = Float::with_val(p, 1) / &a; // n! / alpha^{n+1}
    let mut out = Vec::with_capacity(top as usize + 1);
    for n in 0..=top {
        if n > 0 {
            term *= &a;
            term /= n;
            partial += &term;
            ratio *= n;
            ratio /= &a;
        }
        let v = Float::with_val(p, &damp * &ratio) * &partial;
        out.push(Float::with_val(bits, v));
    }
    out
}

impl AuxCache {
    pub(crate) fn a_slice(&mut self, alpha: &Float, top: u32) -> Result<&[Float]> {
        if alpha.is_zero() || !alpha.is_finite() {
            return domain("A_n(alpha) diverges at alpha = 0");
        }
        let key = FloatKey::of(alpha);
        let have = self.a_tables.get(&key).map_or(0, Vec::len);
        if have <= top as usize {
            let grow = (top as usize + 1).max(2 * have).max(16) as u32 - 1;
            let table = a_table(alpha, grow, &self.ctx);
            self.a_tables.insert(key.clone(), table);
        }
        Ok(&self.a_tables[&key][..=top as usize])
    }

    pub fn a_n(&mut self, n: u32, alpha: &Float) -> Result<Float> {
        Ok(self.a_slice(alpha, n)?[n as usize].clone())
    }

    /// `A_{n;mk}(alpha) = sum_j D_j^{mk} A_{n+m+k-j}(alpha)`.
    pub fn a_nmk(&mut self, n: u32, m: u32, k: u32, alpha: &Float) -> Result<Float> {
        if *alpha <= 0 {
            return domain("A_{n;mk}(alpha) needs alpha > 0");
        }
        let key = (FloatKey::of(alpha), n, m, k);
        if let Some(v) = self.anmk.get(&key) {
            return Ok(v.clone());
        }
        let bits = self.ctx.bits();
        let d = d_coeffs(m, k);
        let top = n + m + k;
        let table = self.a_slice(alpha, top)?;
        let mut acc = Float::new(bits);
        for (j, dj) in d.iter().enumerate() {
            if *dj == 0 {
                continue;
            }
            acc += Float::with_val(bits, &table[(top - j as u32) as usize] * dj);
        }
        self.anmk.insert(key, acc.clone());
        Ok(acc)
    }
}

/// Upper incomplete integral `A_n(x, alpha) = int_x^inf r^n e^{-alpha r} dr`
/// `= e^{-alpha x} sum_k n!/(n-k)! x^{n-k} alpha^{-k-1}`.
pub fn a_n_tail(n: u32, x: &Float, alpha: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if *x < 0 || *alpha <= 0 {
        return domain("A_n(x, alpha) needs x >= 0 and alpha > 0");
    }
    let p = ctx.bits();
    let mut sum = Float::new(p);
    let mut coef = Float::with_val(p, 1) / alpha; // n!/(n-k)! / alpha^{k+1} at k = 0
    for k in 0..=n {
        let xp = Float::with_val(p, Pow::pow(x, (n - k) as i32));
        sum += Float::with_val(p, &coef * &xp);
        coef *= n - k;
        coef /= alpha;
    }
    let damp = (-Float::with_val(p, alpha * x)).exp();
    Ok(sum * damp)
}

/// Lower incomplete integral `U_n(x, alpha) = int_0^x r^n e^{-alpha r} dr`
/// `= n!/alpha^{n+1} - A_n(x, alpha)`.
///
/// For `alpha x <= n + 1` the difference cancels badly, so the power series
/// `sum_j (-alpha)^j x^{n+1+j} / (j! (n+1+j))` is summed instead.
pub fn u_head(n: u32, x: &Float, alpha: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if *x < 0 || *alpha <= 0 {
        return domain("U_n(x, alpha) needs x >= 0 and alpha > 0");
    }
    if x.is_zero() {
        return Ok(ctx.zero());
    }
    let bits = ctx.bits();
    let y = Float::with_val(bits, alpha * x).to_f64();
    if y > (n + 1) as f64 {
        let full = factorial_f(n, ctx) / Float::with_val(bits, Pow::pow(alpha, (n + 1) as i32));
        return Ok(full - a_n_tail(n, x, alpha, ctx)?);
    }
    let p = bits + (2.0 * y * std::f64::consts::LOG2_E).ceil() as u32 + 16;
    let eps = Float::with_val(p, Float::i_exp(1, -(p as i32)));
    let ax = Float::with_val(p, alpha * x);
    let mut term = Float::with_val(p, 1); // (-alpha x)^j / j!
    let mut sum = Float::with_val(p, 1) / (n + 1);
    let mut j = 1u32;
    loop {
        term *= &ax;
        term /= j;
        term = -term;
        let c = Float::with_val(p, &term / (n + 1 + j));
        sum += &c;
        if c.abs() < Float::with_val(p, &eps * &sum.clone().abs()) {
            break;
        }
        j += 1;
    }
    let lead = Float::with_val(p, Pow::pow(x, (n + 1) as i32));
    Ok(Float::with_val(bits, sum * lead))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auxiliary::{a_n, a_nmk};
    use crate::numkernel::rel_deviation;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    #[test]
    fn a0_closed_form() {
        let c = ctx();
        for s in ["0.3", "1", "4.5"] {
            let x = c.parse(s).unwrap();
            let want = Float::with_val(c.bits(), (-x.clone()).exp_ref()) / &x;
            assert!(rel_deviation(&a_n(0, &x, &c).unwrap(), &want) < 1e-38);
        }
    }

    #[test]
    fn a_negative_argument() {
        let c = ctx();
        let v = a_n(0, &c.int(-1), &c).unwrap();
        let e = Float::with_val(c.bits(), 1).exp();
        assert!((v + e).abs().to_f64() < 1e-45);
    }

    #[test]
    fn a_zero_is_domain_error() {
        assert!(a_n(3, &ctx().zero(), &ctx()).is_err());
    }

    #[test]
    fn a1_at_one() {
        // int_1^inf t e^{-t} dt = 2/e
        let c = ctx();
        let v = a_n(1, &c.int(1), &c).unwrap();
        assert!((v.to_f64() - 0.73575888234288).abs() < 1e-13);
    }

    #[test]
    fn mulliken_recurrence() {
        let c = ctx();
        for s in ["0.1", "0.7", "2.5", "9.9", "-1.5"] {
            let x = c.parse(s).unwrap();
            let mut cache = AuxCache::new(c);
            let e = Float::with_val(c.bits(), (-x.clone()).exp_ref());
            for n in 1..=12u32 {
                let lhs = Float::with_val(c.bits(), &x * &cache.a_n(n, &x).unwrap());
                let rhs = Float::with_val(c.bits(), &cache.a_n(n - 1, &x).unwrap() * n) + &e;
                let rel = ((lhs - &rhs) / rhs).abs().to_f64();
                assert!(rel < 1e-45, "alpha={s} n={n} rel={rel}");
            }
        }
    }

    #[test]
    fn anmk_identities() {
        let c = ctx();
        let x = c.parse("1.7").unwrap();
        for n in 0..5 {
            assert_eq!(a_nmk(n, 0, 0, &x, &c).unwrap(), a_n(n, &x, &c).unwrap());
        }
        let lhs = a_nmk(0, 1, 1, &x, &c).unwrap();
        let rhs = a_n(2, &x, &c).unwrap() - a_n(0, &x, &c).unwrap();
        assert!((lhs - rhs).abs().to_f64() < 1e-45);
        let one = c.int(1);
        let v = a_nmk(0, 1, 1, &one, &c).unwrap().to_f64();
        assert!((v - 1.4715177646857693).abs() < 1e-15);
    }

    #[test]
    fn tail_and_head_limits() {
        let c = ctx();
        let alpha = c.parse("1.3").unwrap();
        let zero = c.zero();
        for n in 0..6 {
            let full = factorial_f(n, &c) / Float::with_val(c.bits(), Pow::pow(&alpha, (n + 1) as i32));
            let t = a_n_tail(n, &zero, &alpha, &c).unwrap();
            assert!((t - &full).abs().to_f64() < 1e-45);
            assert!(u_head(n, &zero, &alpha, &c).unwrap().is_zero());
        }
        let x = c.parse("0.8").unwrap();
        let t0 = a_n_tail(0, &x, &alpha, &c).unwrap();
        let want = (-Float::with_val(c.bits(), &alpha * &x)).exp() / &alpha;
        assert!((t0 - want).abs().to_f64() < 1e-45);
        let u0 = u_head(0, &x, &alpha, &c).unwrap();
        let e = (-Float::with_val(c.bits(), &alpha * &x)).exp();
        let want = Float::with_val(c.bits(), 1 - &e) / &alpha;
        assert!((u0 - want).abs().to_f64() < 1e-45);
    }

    #[test]
    fn head_plus_tail_is_complete() {
        let c = ctx();
        for (n, xs, als) in [(0u32, "0.001", "2.0"), (3, "0.5", "1.1"), (5, "7.0", "0.9"), (9, "2.0", "3.0")] {
            let x = c.parse(xs).unwrap();
            let a = c.parse(als).unwrap();
            let full = factorial_f(n, &c) / Float::with_val(c.bits(), Pow::pow(&a, (n + 1) as i32));
            let sum = u_head(n, &x, &a, &c).unwrap() + a_n_tail(n, &x, &a, &c).unwrap();
            let rel = ((sum - &full) / &full).abs().to_f64();
            assert!(rel < 1e-45, "n={n} rel={rel}");
        }
    }

    #[test]
    fn head_small_argument_is_accurate() {
        // U_4(x, a) ~ x^5 / 5 for tiny x; the closed-form difference would lose everything
        let c = ctx();
        let x = c.parse("1e-30").unwrap();
        let a = c.parse("2.0").unwrap();
        let u = u_head(4, &x, &a, &c).unwrap();
        let lead = Float::with_val(c.bits(), Pow::pow(&x, 5)) / 5u32;
        let rel = ((u - &lead) / &lead).abs().to_f64();
        assert!(rel < 1e-28);
    }
}
