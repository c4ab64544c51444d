//! Double-exponential (tanh-sinh) quadrature on `[0, 1]` in MPFR.
//!
//! `x = (1 + tanh(pi/2 sinh t))/2`. Each node is handed to the integrand as
//! `(x, 1 - x)` with both computed directly, so integrands can form
//! endpoint distances without cancellation. Levels halve the step; the
//! difference between successive levels is the error estimate.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rug::float::Constant;
use rug::Float;

/// One abscissa pair `t` and `-t`.
#[derive(Debug)]
pub(crate) struct Node {
    /// `x` for `-t`; equals `1 - x` for `+t`.
    pub small: Float,
    /// `x` for `+t`.
    pub large: Float,
    /// `dx/dt` (without the step).
    pub weight: Float,
}

/// Nodes of one level: `t = k h` with `k` odd (all `k >= 1` at level 0).
type LevelNodes = Arc<Vec<Node>>;

fn table() -> &'static Mutex<HashMap<(u32, u32), LevelNodes>> {
    static T: OnceLock<Mutex<HashMap<(u32, u32), LevelNodes>>> = OnceLock::new();
    T.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Largest `t` worth sampling at `bits` precision.
fn t_max(bits: u32) -> f64 {
    // Stop once the endpoint distance is below 2^{-3 bits}; integrable
    // endpoint singularities need more than the bare precision.
    let u = 1.5 * bits as f64 * std::f64::consts::LN_2;
    (2.0 * u / std::f64::consts::PI).asinh()
}

fn level_nodes(bits: u32, level: u32) -> LevelNodes {
    if let Some(v) = table().lock().unwrap().get(&(bits, level)) {
        return v.clone();
    }
    let h = 0.5f64.powi(level as i32);
    let tm = t_max(bits);
    let half_pi = Float::with_val(bits, Constant::Pi) / 2u32;
    let mut nodes = Vec::new();
    let mut k: u64 = 1;
    loop {
        let tf = k as f64 * h;
        if tf > tm {
            break;
        }
        let t = Float::with_val(bits, k) >> level;
        let u = Float::with_val(bits, t.sinh_ref()) * &half_pi;
        let e2u = Float::with_val(bits, &u * 2u32).exp();
        let small = Float::with_val(bits, 1) / Float::with_val(bits, &e2u + 1u32);
        let large = Float::with_val(bits, &e2u * &small);
        // dx/dt = (pi/2) cosh t * (1/2) sech^2 u = (pi/2) cosh t * 2 small * large
        let weight = Float::with_val(bits, t.cosh_ref()) * &half_pi * &small * &large * 2u32;
        nodes.push(Node { small, large, weight });
        k += if level == 0 { 1 } else { 2 };
    }
    let nodes = Arc::new(nodes);
    table().lock().unwrap().insert((bits, level), nodes.clone());
    nodes
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: Float,
    /// `|I_L - I_{L-1}|` at the final level.
    pub error: Float,
    pub level: u32,
    pub converged: bool,
}

/// Stopping rule for one 1D integral.
#[derive(Debug, Clone)]
pub struct Tolerance {
    pub abs: Float,
    /// Relative to the running estimate; combined with `abs` as a maximum.
    pub rel: Float,
    pub min_level: u32,
    pub max_level: u32,
}

/// `int_0^1 f(x) dx`, `f` receiving `(x, 1 - x)`.
pub fn integrate_unit<F>(f: F, tol: &Tolerance, bits: u32) -> QuadResult
where
    F: Fn(&Float, &Float) -> Float + Sync,
{
    let half = Float::with_val(bits, 0.5);
    let centre_w = Float::with_val(bits, Constant::Pi) / 4u32;
    let mut sum = Float::with_val(bits, f(&half, &half) * &centre_w);
    let mut prev: Option<Float> = None;
    let mut level = 0;
    loop {
        let nodes = level_nodes(bits, level);
        let parts: Vec<Float> = nodes
            .par_iter()
            .map(|n| {
                let hi = f(&n.large, &n.small);
                let lo = f(&n.small, &n.large);
                Float::with_val(bits, &hi + &lo) * &n.weight
            })
            .collect();
        let mut fresh = Float::new(bits);
        for p in parts {
            fresh += p;
        }
        sum += fresh;
        let estimate = Float::with_val(bits, &sum) >> level;
        if let Some(p) = &prev {
            let err = Float::with_val(bits, &estimate - p).abs();
            let bound = {
                let r = Float::with_val(bits, estimate.abs_ref()) * &tol.rel;
                if r > tol.abs {
                    r
                } else {
                    tol.abs.clone()
                }
            };
            let ok = err <= bound && level >= tol.min_level;
            if ok || level >= tol.max_level {
                return QuadResult { value: estimate, error: err, level, converged: ok };
            }
        }
        prev = Some(estimate);
        level += 1;
    }
}

/// `int_a^b f`, `f` receiving `(y, y - a, b - y)`.
pub fn integrate_interval<F>(f: F, a: &Float, b: &Float, tol: &Tolerance, bits: u32) -> QuadResult
where
    F: Fn(&Float, &Float, &Float) -> Float + Sync,
{
    let len = Float::with_val(bits, b - a);
    let mut r = integrate_unit(
        |x, xc| {
            let from_a = Float::with_val(bits, x * &len);
            let to_b = Float::with_val(bits, xc * &len);
            let y = Float::with_val(bits, a + &from_a);
            f(&y, &from_a, &to_b)
        },
        tol,
        bits,
    );
    r.value *= &len;
    r.error *= len.abs();
    r
}

/// `int_lo^inf f`, mapped by `y = lo + s x/(1 - x)`; `f` receives
/// `(y, y - lo)`.
pub fn integrate_semi_infinite<F>(f: F, lo: &Float, scale: &Float, tol: &Tolerance, bits: u32) -> QuadResult
where
    F: Fn(&Float, &Float) -> Float + Sync,
{
    integrate_unit(
        |x, xc| {
            let ratio = Float::with_val(bits, x / xc);
            let off = Float::with_val(bits, &ratio * scale);
            if !off.is_finite() {
                return Float::new(bits);
            }
            let y = Float::with_val(bits, lo + &off);
            let v = f(&y, &off);
            if v.is_zero() {
                return v;
            }
            // dy/dx = s / (1 - x)^2
            let jac = Float::with_val(bits, scale / xc) / xc;
            v * jac
        },
        tol,
        bits,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(bits: u32) -> Tolerance {
        Tolerance {
            abs: Float::with_val(bits, Float::i_exp(1, -(bits as i32 - 20))),
            rel: Float::with_val(bits, 0),
            min_level: 3,
            max_level: 10,
        }
    }

    #[test]
    fn polynomial_and_exponential() {
        let bits = 200;
        let r = integrate_unit(|x, _| Float::with_val(bits, x * x), &tol(bits), bits);
        let third = Float::with_val(bits, 1) / 3u32;
        assert!(r.converged);
        assert!(Float::with_val(bits, &r.value - &third).abs() < Float::with_val(bits, Float::i_exp(1, -170)));

        let one = Float::with_val(bits, 1);
        let r = integrate_semi_infinite(|y, _| (-y.clone()).exp(), &one, &one, &tol(bits), bits);
        let want = (-one.clone()).exp();
        assert!(Float::with_val(bits, &r.value - &want).abs() < Float::with_val(bits, Float::i_exp(1, -170)));
    }

    #[test]
    fn endpoint_singularities() {
        let bits = 200;
        // int_0^1 -ln x dx = 1
        let r = integrate_unit(|x, _| -x.clone().ln(), &tol(bits), bits);
        assert!(Float::with_val(bits, &r.value - 1u32).abs() < Float::with_val(bits, Float::i_exp(1, -170)));
        // int_0^2 y^{-1/2} dy = 2 sqrt 2
        let zero = Float::new(bits);
        let two = Float::with_val(bits, 2);
        let r = integrate_interval(|_, da, _| da.clone().sqrt().recip(), &zero, &two, &tol(bits), bits);
        let want = Float::with_val(bits, 8).sqrt();
        assert!(Float::with_val(bits, &r.value - &want).abs() < Float::with_val(bits, Float::i_exp(1, -160)));
    }

    #[test]
    fn level_sums_are_deterministic() {
        let bits = 128;
        let f = |x: &Float, _: &Float| Float::with_val(bits, x.cos_ref());
        let a = integrate_unit(f, &tol(bits), bits);
        let b = integrate_unit(f, &tol(bits), bits);
        assert_eq!(a.value, b.value);
        assert_eq!(a.level, b.level);
    }
}
