//! Three-center overlap
//! `S = int r_a^{n_a-1} e^{-zeta_a r_a} r_b^{n_b-1} e^{-zeta_b r_b} r_c^{n_c-1} e^{-zeta_c r_c} dtau`
//! with `a` at the midpoint of `b`-`c`.
//!
//! One exponential is expanded as a truncated power series in `s`; each
//! `(k, u, s)` term is a `B_{nm;k}` auxiliary integral:
//!
//! ```text
//! S_N = sum_{k,u} pi R^n / 2^{n+k+n_a-1} D_k^{n_b n_c} D_u^{n_a k}
//!       sum_{s=0}^{N} x^s/s! B_{n_b+n_c-k, s+u; n_a+k-2u-s-1}(alpha, (beta+gamma)/2)
//! ```
//!
//! with `n = n_a + n_b + n_c` and `x = (beta - gamma)/2`.
//! `n_a = 0` encodes an `r_a^{-1}` weight (nuclear attraction).

use std::ops::RangeInclusive;

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::auxiliary::{AuxCache, TPlusForm};
use crate::combinatorics::d_coeffs;
use crate::error::{domain, Error, Result};
use crate::geometry::scaled_exponents;
use crate::numkernel::{agreeing_digits, PrecisionContext};

/// Upper bound on the truncation order.
pub const MAX_TERMS: u32 = 200;

/// Principal quantum numbers and exponents of the three orbitals, plus the
/// `b`-`c` separation.
#[derive(Debug, Clone, PartialEq)]
pub struct SlaterParams {
    pub n_a: u32,
    pub n_b: u32,
    pub n_c: u32,
    pub zeta_a: Float,
    pub zeta_b: Float,
    pub zeta_c: Float,
    pub r: Float,
}

impl SlaterParams {
    pub fn new(
        (n_a, n_b, n_c): (u32, u32, u32),
        zeta_a: Float,
        zeta_b: Float,
        zeta_c: Float,
        r: Float,
    ) -> Result<Self> {
        let p = Self { n_a, n_b, n_c, zeta_a, zeta_b, zeta_c, r };
        p.validate()?;
        Ok(p)
    }

    /// Parses decimal strings exactly at the context's precision.
    pub fn parse(n: (u32, u32, u32), zeta: [&str; 3], r: &str, ctx: &PrecisionContext) -> Result<Self> {
        Self::new(n, ctx.parse(zeta[0])?, ctx.parse(zeta[1])?, ctx.parse(zeta[2])?, ctx.parse(r)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_b < 1 || self.n_c < 1 {
            return domain("n_b and n_c must be >= 1");
        }
        if !(self.zeta_b > 0 && self.zeta_c > 0 && self.r > 0) {
            return domain("zeta_b, zeta_c and R must be positive");
        }
        if !(self.zeta_a >= 0) {
            return domain("zeta_a must be >= 0");
        }
        if self.zeta_a.is_zero() && self.n_a != 0 {
            return domain("zeta_a = 0 is only allowed with n_a = 0");
        }
        Ok(())
    }

    /// Looser check for assembly terms: a focus may carry `n = 0` and
    /// `zeta = 0` (an `r^{-1}` weight) as long as `zeta_b + zeta_c > 0`.
    pub(crate) fn validate_focus_weights(&self) -> Result<()> {
        if !(self.zeta_b >= 0 && self.zeta_c >= 0 && self.r > 0) {
            return domain("zeta_b, zeta_c must be >= 0 and R positive");
        }
        if self.zeta_b.is_zero() && self.zeta_c.is_zero() {
            return domain("zeta_b + zeta_c must be positive");
        }
        if !(self.zeta_a >= 0) {
            return domain("zeta_a must be >= 0");
        }
        if self.zeta_a.is_zero() && self.n_a != 0 {
            return domain("zeta_a = 0 is only allowed with n_a = 0");
        }
        Ok(())
    }

    pub fn n_total(&self) -> u32 {
        self.n_a + self.n_b + self.n_c
    }

    /// Exchanges the roles of `b` and `c`.
    pub fn swapped_bc(&self) -> Self {
        Self {
            n_a: self.n_a,
            n_b: self.n_c,
            n_c: self.n_b,
            zeta_a: self.zeta_a.clone(),
            zeta_b: self.zeta_c.clone(),
            zeta_c: self.zeta_b.clone(),
            r: self.r.clone(),
        }
    }

    /// Orders `b` and `c` so that `zeta_b >= zeta_c`. Exact symmetry at the
    /// midpoint; keeps `beta >= 0` and every `Ei` argument negative.
    pub fn canonical(&self) -> Self {
        if self.zeta_c > self.zeta_b {
            self.swapped_bc()
        } else {
            self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationPolicy {
    FixedN(u32),
    /// Add terms until `stable_steps` consecutive increments are below
    /// `tol_rel * |partial sum|`, or `n_max` is reached.
    Adaptive {
        tol_rel: f64,
        n_max: u32,
        stable_steps: u32,
    },
}

impl TruncationPolicy {
    pub fn adaptive(tol_rel: f64, n_max: u32) -> Self {
        Self::Adaptive { tol_rel, n_max, stable_steps: 3 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::FixedN(n) if n > MAX_TERMS => domain(format!("N = {n} exceeds the limit {MAX_TERMS}")),
            Self::Adaptive { n_max, .. } if n_max > MAX_TERMS => {
                domain(format!("N_max = {n_max} exceeds the limit {MAX_TERMS}"))
            }
            Self::Adaptive { stable_steps, .. } if stable_steps < 2 => domain("stable_steps must be >= 2"),
            Self::Adaptive { tol_rel, .. } if !(tol_rel > 0.0) => domain("tol_rel must be positive"),
            _ => Ok(()),
        }
    }

    /// Largest `s` the policy may reach.
    pub fn max_terms(&self) -> u32 {
        match *self {
            Self::FixedN(n) => n,
            Self::Adaptive { n_max, .. } => n_max,
        }
    }
}

/// A computed integral with its truncation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralValue {
    pub value: Float,
    /// Truncation order `N` (analytic) or quadrature level (oracle).
    pub terms_used: u32,
    /// `|last increment|` (analytic) or error estimate (oracle).
    pub tail_estimate: Float,
    pub converged: bool,
}

impl IntegralValue {
    /// Sign of the value: -1, 0 or 1.
    pub fn sign(&self) -> i8 {
        if self.value.is_zero() {
            0
        } else if self.value.is_sign_negative() {
            -1
        } else {
            1
        }
    }

    /// Leading digits backed by the tail estimate, capped at `cap`.
    pub fn certified_digits(&self, cap: u32) -> u32 {
        if self.tail_estimate.is_zero() {
            return cap;
        }
        if self.value.is_zero() {
            return 0;
        }
        let rel = Float::with_val(self.value.prec(), &self.tail_estimate) / self.value.clone().abs();
        let d = -rel.log10().to_f64();
        if d <= 0.0 {
            0
        } else {
            (d.floor() as u32).min(cap)
        }
    }
}

/// `(beta + gamma)/2` below this is rejected as not representable.
pub fn min_beta_threshold(ctx: &PrecisionContext) -> Float {
    ctx.pow10(-((ctx.decimal_digits() / 2) as i32))
}

/// Starting guard digits of the series.
///
/// Enough when `zeta_a` is small against `zeta_b + zeta_c`, where the loss
/// stays near 6 digits for `n <= 4` at any order. Otherwise the loss grows
/// with `s` and [`overlap_3c`] widens the guard as it goes.
pub fn series_guard_digits(p: &SlaterParams) -> u32 {
    6 + 2 * p.n_total()
}

struct Channel {
    /// `n_b + n_c - k`.
    n: u32,
    u: u32,
    /// `n_a + k - 2u - 1`; the `B` index at `s` is `base_k - s`.
    base_k: i64,
    coef: Float,
}

/// Term-by-term evaluator of the truncated series.
///
/// Runs at a fixed precision with no cancellation audit; [`overlap_3c`] and
/// [`convergence_scan`] add one.
pub struct OverlapSeries {
    work: PrecisionContext,
    cache: AuxCache,
    alpha: Float,
    half_sum: Float,
    x: Float,
    channels: Vec<Channel>,
    /// `x^s / s!` for the next term.
    weight: Float,
    next_s: u32,
}

impl OverlapSeries {
    /// Prepares the series for terms up to `s = n_max` at `ctx` plus
    /// [`series_guard_digits`].
    pub fn new(p: &SlaterParams, n_max: u32, ctx: &PrecisionContext) -> Result<Self> {
        Self::with_form(p, n_max, ctx, TPlusForm::default())
    }

    pub fn with_form(p: &SlaterParams, n_max: u32, ctx: &PrecisionContext, form: TPlusForm) -> Result<Self> {
        p.validate()?;
        Self::build(p, n_max, ctx, ctx, form)
    }

    /// `base` sets the working precision, `ctx` the representability
    /// threshold.
    fn build(
        p: &SlaterParams,
        n_max: u32,
        base: &PrecisionContext,
        ctx: &PrecisionContext,
        form: TPlusForm,
    ) -> Result<Self> {
        if n_max > MAX_TERMS {
            return domain(format!("N = {n_max} exceeds the limit {MAX_TERMS}"));
        }
        let p = p.canonical();
        let work = base.widened(series_guard_digits(&p));
        let bits = work.bits();
        let e = scaled_exponents(&p.zeta_a, &p.zeta_b, &p.zeta_c, &p.r, &work)?;
        let half_sum = Float::with_val(bits, &e.beta + &e.gamma) / 2u32;
        let threshold = min_beta_threshold(ctx);
        if half_sum < threshold {
            return Err(Error::NotRepresentable { value: half_sum.to_f64(), threshold: threshold.to_f64() });
        }
        let x = Float::with_val(bits, &e.beta - &e.gamma) / 2u32;

        let n_tot = p.n_total();
        let r_pow = Float::with_val(bits, Pow::pow(&p.r, n_tot as i32));
        let pi_r = work.pi() * r_pow;
        let dk = d_coeffs(p.n_b, p.n_c);
        let mut channels = Vec::new();
        for k in 0..=(p.n_b + p.n_c) {
            let dk_val = &dk[k as usize];
            if *dk_val == 0 {
                continue;
            }
            let du = d_coeffs(p.n_a, k);
            // 2^{n + k + n_a - 1}; n + n_a >= 2 so the exponent is >= 1.
            let scale = Float::with_val(bits, &pi_r) >> (n_tot + k + p.n_a - 1);
            for u in 0..=(p.n_a + k) {
                let du_val = &du[u as usize];
                if *du_val == 0 {
                    continue;
                }
                let d = Integer::from(dk_val * du_val);
                channels.push(Channel {
                    n: p.n_b + p.n_c - k,
                    u,
                    base_k: p.n_a as i64 + k as i64 - 2 * u as i64 - 1,
                    coef: Float::with_val(bits, &scale * &d),
                });
            }
        }
        Ok(Self {
            cache: AuxCache::with_form(work, form),
            work,
            alpha: e.alpha,
            half_sum,
            x,
            channels,
            weight: Float::with_val(bits, 1),
            next_s: 0,
        })
    }

    pub fn working_context(&self) -> &PrecisionContext {
        &self.work
    }

    /// Index of the term [`next_term`](Self::next_term) will return.
    pub fn next_index(&self) -> u32 {
        self.next_s
    }

    /// The `s`-th increment of the partial sum, then advances `s`.
    pub fn next_term(&mut self) -> Result<Float> {
        let s = self.next_s;
        let bits = self.work.bits();
        let mut inner = Float::new(bits);
        for ch in &self.channels {
            let b = self.cache.b_aux(ch.n, s + ch.u, ch.base_k - s as i64, &self.alpha, &self.half_sum)?;
            inner += Float::with_val(bits, &ch.coef * &b);
        }
        let term = inner * &self.weight;
        self.next_s += 1;
        self.weight *= &self.x;
        self.weight /= self.next_s;
        Ok(term)
    }
}

/// The overlap integral truncated per `policy`, rounded to `ctx`.
pub fn overlap_3c(p: &SlaterParams, policy: TruncationPolicy, ctx: &PrecisionContext) -> Result<IntegralValue> {
    overlap_3c_with_form(p, policy, ctx, TPlusForm::default())
}

pub fn overlap_3c_with_form(
    p: &SlaterParams,
    policy: TruncationPolicy,
    ctx: &PrecisionContext,
    form: TPlusForm,
) -> Result<IntegralValue> {
    p.validate()?;
    sum_series(p, policy, ctx, form)
}

/// [`overlap_3c`] under [`SlaterParams::validate_focus_weights`].
pub(crate) fn overlap_3c_focus_weights(
    p: &SlaterParams,
    policy: TruncationPolicy,
    ctx: &PrecisionContext,
) -> Result<IntegralValue> {
    p.validate_focus_weights()?;
    sum_series(p, policy, ctx, TPlusForm::default())
}

/// Extra digits of the shadow series that audits each pass.
const SHADOW_DIGITS: u32 = 12;
/// Ceiling on the guard growth before giving up.
const MAX_EXTRA_DIGITS: u32 = 1000;

/// A series advanced in lockstep with a more precise copy of itself.
///
/// The digits lost to cancellation grow with `s` for some inputs (`zeta_a`
/// large against `zeta_b + zeta_c`), so no fixed guard suffices. When the
/// two partial sums stop agreeing to `digits + 1` the pass is abandoned and
/// rerun with a wider guard.
struct Audited {
    main: OverlapSeries,
    shadow: OverlapSeries,
    sum: Float,
    shadow_sum: Float,
    need: u32,
    shortfall: u32,
}

impl Audited {
    fn new(p: &SlaterParams, n_max: u32, ctx: &PrecisionContext, form: TPlusForm, extra: u32) -> Result<Self> {
        let main = OverlapSeries::build(p, n_max, &ctx.widened(extra), ctx, form)?;
        let shadow = OverlapSeries::build(p, n_max, &ctx.widened(extra + SHADOW_DIGITS), ctx, form)?;
        Ok(Self {
            sum: Float::new(main.work.bits()),
            shadow_sum: Float::new(shadow.work.bits()),
            main,
            shadow,
            need: ctx.decimal_digits() + 1,
            shortfall: 0,
        })
    }

    /// Adds the next term to both sums; `None` once they disagree.
    fn advance(&mut self) -> Result<Option<Float>> {
        self.sum += self.main.next_term()?;
        let term = self.shadow.next_term()?;
        self.shadow_sum += &term;
        let agree = agreeing_digits(&self.sum, &self.shadow_sum, self.need);
        if agree < self.need {
            self.shortfall = self.need - agree;
            return Ok(None);
        }
        Ok(Some(term))
    }
}

/// Runs `drive` on audited passes with a growing guard until one completes.
fn audited<T>(
    p: &SlaterParams,
    n_max: u32,
    ctx: &PrecisionContext,
    form: TPlusForm,
    mut drive: impl FnMut(&mut Audited) -> Result<Option<T>>,
) -> Result<T> {
    let mut extra = 0;
    loop {
        let mut run = Audited::new(p, n_max, ctx, form, extra)?;
        if let Some(v) = drive(&mut run)? {
            return Ok(v);
        }
        extra += run.shortfall + SHADOW_DIGITS;
        if extra > MAX_EXTRA_DIGITS {
            return Err(Error::Precision(format!("series lost more than {MAX_EXTRA_DIGITS} digits to cancellation")));
        }
    }
}

fn sum_series(
    p: &SlaterParams,
    policy: TruncationPolicy,
    ctx: &PrecisionContext,
    form: TPlusForm,
) -> Result<IntegralValue> {
    policy.validate()?;
    audited(p, policy.max_terms(), ctx, form, |run| {
        let bits = run.shadow.work.bits();
        let mut last = Float::new(bits);
        match policy {
            TruncationPolicy::FixedN(n) => {
                for _ in 0..=n {
                    match run.advance()? {
                        Some(t) => last = t,
                        None => return Ok(None),
                    }
                }
                let tail = Float::with_val(ctx.bits(), last.abs_ref());
                let bound = Float::with_val(ctx.bits(), run.shadow_sum.abs_ref()) * ctx.tol_abs();
                Ok(Some(IntegralValue {
                    converged: tail <= bound,
                    value: ctx.real(&run.shadow_sum),
                    terms_used: n,
                    tail_estimate: tail,
                }))
            }
            TruncationPolicy::Adaptive { tol_rel, n_max, stable_steps } => {
                let tol = Float::with_val(bits, tol_rel);
                let mut stable = 0;
                let mut s = 0;
                loop {
                    match run.advance()? {
                        Some(t) => last = t,
                        None => return Ok(None),
                    }
                    let bound = Float::with_val(bits, run.shadow_sum.abs_ref()) * &tol;
                    if Float::with_val(bits, last.abs_ref()) <= bound {
                        stable += 1;
                    } else {
                        stable = 0;
                    }
                    if stable >= stable_steps || s >= n_max {
                        break;
                    }
                    s += 1;
                }
                Ok(Some(IntegralValue {
                    converged: stable >= stable_steps,
                    value: ctx.real(&run.shadow_sum),
                    terms_used: s,
                    tail_estimate: Float::with_val(ctx.bits(), last.abs_ref()),
                }))
            }
        }
    })
}

/// Partial sums `S_N` for every `N` in `range`, computed in one pass.
pub fn convergence_scan(
    p: &SlaterParams,
    range: RangeInclusive<u32>,
    ctx: &PrecisionContext,
) -> Result<Vec<(u32, Float)>> {
    let (lo, hi) = (*range.start(), *range.end());
    if lo > hi {
        return Ok(Vec::new());
    }
    p.validate()?;
    if hi > MAX_TERMS {
        return domain(format!("N = {hi} exceeds the limit {MAX_TERMS}"));
    }
    audited(p, hi, ctx, TPlusForm::default(), |run| {
        let mut out = Vec::with_capacity((hi - lo + 1) as usize);
        for n in 0..=hi {
            if run.advance()?.is_none() {
                return Ok(None);
            }
            if n >= lo {
                out.push((n, ctx.real(&run.shadow_sum)));
            }
        }
        Ok(Some(out))
    })
}
