use rug::float::Constant;
use rug::Float;

use super::PrecisionContext;
use crate::error::{domain, Result};

/// Euler-Mascheroni constant at working precision.
pub fn euler_constant(ctx: &PrecisionContext) -> Float {
    Float::with_val(ctx.bits(), Constant::Euler)
}

/// Crossover between the power series and the continued fraction. Scales
/// with precision so that both branches stay cheap: the series pays
/// `~2.9 x` extra bits to cancellation, the fraction needs `~(p ln 2)^2 / 16x`
/// iterations.
fn crossover(bits: u32) -> f64 {
    (bits as f64 / 12.0).max(4.0)
}

/// `Ei(-x) = -E1(x)` for `x > 0`.
pub fn expint_ei_neg(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !x.is_finite() || *x <= 0 {
        return domain(format!("Ei(-x) requires x > 0, got x = {}", x.to_f64()));
    }
    if x.to_f64() <= crossover(ctx.bits()) {
        Ok(expint_ei_neg_series(x, ctx))
    } else {
        Ok(expint_ei_neg_continued_fraction(x, ctx))
    }
}

/// Convergent power series `Ei(-x) = C + ln x + sum_k (-x)^k / (k k!)`,
/// carried at extra precision to absorb the alternating cancellation.
pub fn expint_ei_neg_series(x: &Float, ctx: &PrecisionContext) -> Float {
    let xf = x.to_f64();
    let extra = (2.0 * xf * std::f64::consts::LOG2_E).ceil() as u32 + 32;
    let p = ctx.bits() + extra;
    let x = Float::with_val(p, x);
    let eps = Float::with_val(p, Float::i_exp(1, -(p as i32)));

    // term_k = (-x)^k / k!
    let mut term = Float::with_val(p, 1);
    let mut sum = Float::new(p);
    let mut k: u32 = 1;
    loop {
        term *= &x;
        term /= k;
        term = -term;
        let contrib = Float::with_val(p, &term / k);
        sum += &contrib;
        if k as f64 > xf && Float::with_val(p, contrib.abs_ref()) < Float::with_val(p, &eps * &sum.clone().abs()) {
            break;
        }
        k += 1;
    }
    let gamma = Float::with_val(p, Constant::Euler);
    let lnx = Float::with_val(p, x.ln_ref());
    let total = gamma + lnx + sum;
    Float::with_val(ctx.bits(), total)
}

/// Modified Lentz evaluation of
/// `E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))`.
pub fn expint_ei_neg_continued_fraction(x: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits() + 32;
    let x = Float::with_val(p, x);
    let tiny = Float::with_val(p, Float::i_exp(1, -(4 * p as i32)));
    let eps = Float::with_val(p, Float::i_exp(1, -(p as i32) + 4));

    let mut b = Float::with_val(p, &x + 1u32);
    let mut c = Float::with_val(p, 1) / &tiny;
    let mut d = Float::with_val(p, 1) / &b;
    let mut h = d.clone();
    let mut i: u64 = 1;
    loop {
        let a = -Float::with_val(p, i * i);
        b += 2u32;
        d = Float::with_val(p, &a * &d) + &b;
        if d.is_zero() {
            d = tiny.clone();
        }
        c = Float::with_val(p, &a / &c) + &b;
        if c.is_zero() {
            c = tiny.clone();
        }
        d.recip_mut();
        let delta = Float::with_val(p, &c * &d);
        h *= &delta;
        let dev = (delta - 1u32).abs();
        if dev < eps || i > 200_000 {
            break;
        }
        i += 1;
    }
    let e1 = h * Float::with_val(p, (-x).exp_ref());
    Float::with_val(ctx.bits(), -e1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    #[test]
    fn euler_constant_thirteen_digits() {
        let c = euler_constant(&ctx(30));
        let printed = ctx(30).parse("0.5772156649015").unwrap();
        let diff = (c - printed).abs();
        assert!(diff.to_f64() < 5e-14);
    }

    #[test]
    fn ei_known_values() {
        let ctx = ctx(40);
        let one = ctx.int(1);
        let two = ctx.int(2);
        let e1 = expint_ei_neg(&one, &ctx).unwrap().to_f64();
        let e2 = expint_ei_neg(&two, &ctx).unwrap().to_f64();
        assert!((e1 - (-0.21938393439552026)).abs() < 1e-16);
        assert!((e2 - (-0.04890051070806112)).abs() < 1e-16);
    }

    #[test]
    fn ei_domain() {
        let ctx = ctx(30);
        assert!(expint_ei_neg(&ctx.zero(), &ctx).is_err());
        assert!(expint_ei_neg(&ctx.int(-1), &ctx).is_err());
    }

    #[test]
    fn ei_large_argument_bound() {
        let ctx = ctx(30);
        let x = ctx.int(200);
        let v = expint_ei_neg(&x, &ctx).unwrap();
        assert!(v < 0);
        let bound = Float::with_val(ctx.bits(), (-x.clone()).exp_ref()) / &x;
        assert!(v.abs() <= bound);
    }

    #[test]
    fn branches_agree_at_crossover() {
        for d in [20u32, 40, 80] {
            let ctx = ctx(d);
            let t = crossover(ctx.bits());
            for x in [t * 0.9, t, t * 1.1] {
                let x = ctx.from_f64(x);
                let s = expint_ei_neg_series(&x, &ctx);
                let c = expint_ei_neg_continued_fraction(&x, &ctx);
                let rel = ((s.clone() - &c) / &c).abs().to_f64();
                assert!(rel < 10f64.powi(-(d as i32) - 5), "d={d} rel={rel}");
            }
        }
    }

    #[test]
    fn matches_mpfr_eint() {
        let ctx = ctx(50);
        for x in ["0.001", "0.5", "1", "3.7", "12", "25", "60", "150"] {
            let x = ctx.parse(x).unwrap();
            let ours = expint_ei_neg(&x, &ctx).unwrap();
            let mpfr = Float::with_val(ctx.bits(), (-x.clone()).eint_ref());
            let rel = ((ours - &mpfr) / &mpfr).abs().to_f64();
            assert!(rel < 1e-52, "x={} rel={rel}", x.to_f64());
        }
    }
}
