//! The auxiliary-integral tower behind the overlap formula:
//!
//! * `A_n(alpha) = int_1^inf t^n e^{-alpha t} dt` (Mulliken), together with the
//!   incomplete pieces `A_n(x, alpha)` and `U_n(x, alpha)`;
//! * `A_{n;mk}(alpha) = int_1^inf mu^n (mu+1)^m (mu-1)^k e^{-alpha mu} dmu`;
//! * `T_n^(+/-)(alpha, beta) = int_1^inf mu^n e^{-alpha mu} Ei(-beta(mu +/- 1)) dmu`;
//! * `B_{nm;k}(alpha, beta) = int_1^inf mu^n (mu^2-1)^m e^{-alpha mu}
//!   int_{mu-1}^{mu+1} t^k e^{-beta t} dt dmu` for either sign of `k`.
//!
//! [`AuxCache`] memoizes all of them for the lifetime of one evaluation;
//! the free functions are one-shot conveniences.

mod btower;
mod mulliken;
mod tfunc;

use std::collections::HashMap;

use rug::{Float, Integer};

use crate::numkernel::PrecisionContext;
use crate::Result;

pub use mulliken::{a_n_tail, u_head};

/// Which closed form is used for `T_n^(+)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TPlusForm {
    /// Leibniz expansion of `(-1)^n d^n/dalpha^n T_0^(+)`, re-derived term by
    /// term. Agrees with the defining integral.
    #[default]
    Derived,
    /// The closed form as usually printed: leading `A_n(-alpha) Ei(-2 beta)`
    /// and a sum with sign `-(-1)^{n-m}(-1)^{m-1}`. Kept for comparison; it
    /// does not reproduce the defining integral.
    Printed,
}

/// Exact bit pattern of a float, usable as a hash key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct FloatKey(Option<(Integer, i32)>);

impl FloatKey {
    pub(crate) fn of(x: &Float) -> Self {
        Self(x.to_integer_exp())
    }
}

/// Per-evaluation memo of auxiliary integrals.
///
/// Values are computed and stored at the precision of the context the cache
/// was built with; callers needing guard digits widen the context first.
#[derive(Debug)]
pub struct AuxCache {
    ctx: PrecisionContext,
    tplus_form: TPlusForm,
    /// `A_0..A_len` per argument.
    a_tables: HashMap<FloatKey, Vec<Float>>,
    anmk: HashMap<(FloatKey, u32, u32, u32), Float>,
    tplus: HashMap<(FloatKey, FloatKey), Vec<Float>>,
    tminus: HashMap<(FloatKey, FloatKey), Vec<Float>>,
    b: HashMap<(FloatKey, FloatKey, u32, u32, i64), Float>,
}

impl AuxCache {
    pub fn new(ctx: PrecisionContext) -> Self {
        Self::with_form(ctx, TPlusForm::default())
    }

    pub fn with_form(ctx: PrecisionContext, tplus_form: TPlusForm) -> Self {
        Self {
            ctx,
            tplus_form,
            a_tables: HashMap::new(),
            anmk: HashMap::new(),
            tplus: HashMap::new(),
            tminus: HashMap::new(),
            b: HashMap::new(),
        }
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn tplus_form(&self) -> TPlusForm {
        self.tplus_form
    }

    pub fn len(&self) -> usize {
        self.a_tables.values().map(Vec::len).sum::<usize>()
            + self.anmk.len()
            + self.tplus.values().map(Vec::len).sum::<usize>()
            + self.tminus.values().map(Vec::len).sum::<usize>()
            + self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Mulliken integral `A_n(alpha)`; closed form continued to `alpha < 0`.
pub fn a_n(n: u32, alpha: &Float, ctx: &PrecisionContext) -> Result<Float> {
    AuxCache::new(*ctx).a_n(n, alpha)
}

/// `A_{n;mk}(alpha)`, `alpha > 0`.
pub fn a_nmk(n: u32, m: u32, k: u32, alpha: &Float, ctx: &PrecisionContext) -> Result<Float> {
    AuxCache::new(*ctx).a_nmk(n, m, k, alpha)
}

pub fn t_plus(n: u32, alpha: &Float, beta: &Float, ctx: &PrecisionContext) -> Result<Float> {
    AuxCache::new(*ctx).t_plus(n, alpha, beta)
}

pub fn t_minus(n: u32, alpha: &Float, beta: &Float, ctx: &PrecisionContext) -> Result<Float> {
    AuxCache::new(*ctx).t_minus(n, alpha, beta)
}

/// `B_{nm;k}(alpha, beta)`; `k` may be negative.
pub fn b_aux(n: u32, m: u32, k: i64, alpha: &Float, beta: &Float, ctx: &PrecisionContext) -> Result<Float> {
    AuxCache::new(*ctx).b_aux(n, m, k, alpha, beta)
}
