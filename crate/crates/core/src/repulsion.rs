//! Coulomb-exchange repulsion integrals `[aa,bc]` and `[bb,ac]` and the
//! three-center nuclear attraction integral, as linear combinations of
//! overlap integrals.
//!
//! Centers lie on a line with `a` at the midpoint of `b`-`c`. Integrating
//! electron 1 over a one-center distribution `r^{n-1} e^{-zeta r}` leaves
//! the potential
//!
//! ```text
//! Phi(r) = 4 pi [ (n+1)!/zeta^{n+2} (1 - e^{-zeta r})/r
//!                 + sum_{k=0}^{n} c_k n!/((n-k)! zeta^{k+1}) r^{n-k} e^{-zeta r} ]
//! ```
//!
//! with `c_k = -k/(n+1-k)`, so every term against `chi chi'` of electron 2
//! is an overlap with weight `r^{m-1} e^{-zeta' r}` on the distribution
//! center.

use rug::Float;

use crate::error::{domain, Error, Result};
use crate::geometry::Conformation;
use crate::numkernel::{factorial, rel_deviation, PrecisionContext};
use crate::oracle::{quad_eri, quad_overlap_3c, quad_overlap_unchecked, QuadConfig};
use crate::overlap::{overlap_3c, overlap_3c_focus_weights, IntegralValue, SlaterParams, TruncationPolicy};

/// Which center carries the one-center charge distribution (or, for
/// nuclear attraction, the `1/r` weight).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Center {
    /// The midpoint.
    A,
    /// An end of the line.
    B,
}

/// Product of two s-orbitals on one center: `r^{n_eff - 1} e^{-zeta_eff r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeDistribution {
    pub n_eff: u32,
    pub zeta_eff: Float,
}

pub fn charge_distribution(n1: u32, zeta1: &Float, n1p: u32, zeta1p: &Float) -> Result<ChargeDistribution> {
    if n1 < 1 || n1p < 1 || !(*zeta1 > 0) || !(*zeta1p > 0) {
        return domain("charge distribution needs n >= 1 and zeta > 0 for both orbitals");
    }
    let prec = zeta1.prec().max(zeta1p.prec());
    Ok(ChargeDistribution { n_eff: n1 + n1p - 1, zeta_eff: Float::with_val(prec, zeta1 + zeta1p) })
}

/// An s-type Slater orbital `r^{n-1} e^{-zeta r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbital {
    pub n: u32,
    pub zeta: Float,
}

/// A Coulomb-exchange integral.
///
/// * `center = A`: `[aa,bc]`; `outer[0]` sits on `b`, `outer[1]` on `c`.
/// * `center = B`: `[bb,ac]`; `outer[0]` sits on `a` (midpoint), `outer[1]`
///   on `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct EriSpec {
    pub center: Center,
    pub dist: ChargeDistribution,
    pub outer: [Orbital; 2],
    /// `b`-`c` separation.
    pub r: Float,
}

impl EriSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dist.n_eff < 1 || !(self.dist.zeta_eff > 0) {
            return domain("distribution needs n_eff >= 1 and zeta_eff > 0");
        }
        for o in &self.outer {
            if o.n < 1 || !(o.zeta > 0) {
                return domain("outer orbitals need n >= 1 and zeta > 0");
            }
        }
        if !(self.r > 0) {
            return domain("R must be positive");
        }
        Ok(())
    }

    /// Same integral with the outer orbitals exchanged where that is a
    /// symmetry (`[aa,bc]` only).
    pub fn swapped_outer(&self) -> Option<Self> {
        match self.center {
            Center::A => {
                let mut s = self.clone();
                s.outer.swap(0, 1);
                Some(s)
            }
            Center::B => None,
        }
    }
}

/// Coefficient of the `r^{n-k} e^{-zeta r}` terms of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EriCoefficient {
    /// `-k/(n+1-k)`, from collecting the two incomplete-gamma sums.
    #[default]
    Corrected,
    /// `(k-1)/(n+1-k)`, which counts the `k = n+1` term twice; kept for
    /// comparison, it fails the oracle.
    Printed,
}

impl EriCoefficient {
    fn numerator(self, k: u32) -> i64 {
        match self {
            Self::Corrected => -(k as i64),
            Self::Printed => k as i64 - 1,
        }
    }
}

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Analytic,
    Quadrature,
    /// Analytic terms with some quadrature fallbacks.
    Mixed,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Self::Analytic => "analytic",
            Self::Quadrature => "quadrature",
            Self::Mixed => "mixed",
        }
    }

    fn join(self, other: Self) -> Self {
        if self == other {
            self
        } else {
            Self::Mixed
        }
    }
}

/// Options shared by the assemblies.
#[derive(Debug, Clone)]
pub struct EriOptions {
    pub policy: TruncationPolicy,
    pub coefficient: EriCoefficient,
    pub quad: QuadConfig,
}

impl EriOptions {
    pub fn new(policy: TruncationPolicy, ctx: &PrecisionContext) -> Self {
        Self { policy, coefficient: EriCoefficient::default(), quad: QuadConfig::for_ctx(ctx) }
    }
}

/// A sum of weighted overlaps.
struct Assembly {
    bits: u32,
    value: Float,
    tail: Float,
    converged: bool,
    terms: u32,
    backend: Option<Backend>,
}

impl Assembly {
    fn new(ctx: &PrecisionContext) -> Self {
        let bits = ctx.bits();
        Self { bits, value: Float::new(bits), tail: Float::new(bits), converged: true, terms: 0, backend: None }
    }

    fn add(&mut self, weight: &Float, term: (IntegralValue, Backend)) {
        let (v, b) = term;
        self.value += Float::with_val(self.bits, weight * &v.value);
        self.tail += Float::with_val(self.bits, weight * &v.tail_estimate).abs();
        self.converged &= v.converged;
        self.terms = self.terms.max(v.terms_used);
        self.backend = Some(self.backend.map_or(b, |x| x.join(b)));
    }

    fn finish(self) -> (IntegralValue, Backend) {
        let value = IntegralValue {
            value: self.value,
            terms_used: self.terms,
            tail_estimate: self.tail,
            converged: self.converged,
        };
        (value, self.backend.unwrap_or(Backend::Analytic))
    }
}

/// `4 pi (n+1)!/zeta^{n+2}` and `4 pi c_k n!/((n-k)! zeta^{k+1})`, `k = 0..=n`.
fn potential_weights(
    n: u32,
    zeta: &Float,
    coef: EriCoefficient,
    ctx: &PrecisionContext,
) -> Result<(Float, Vec<Float>)> {
    let bits = ctx.bits();
    let four_pi = ctx.pi() * 4u32;
    let zeta = ctx.real(zeta);
    let lead = Float::with_val(bits, &four_pi * &factorial(n as i64 + 1)?)
        / Float::with_val(bits, rug::ops::Pow::pow(&zeta, n as i32 + 2));
    let n_fact = factorial(n as i64)?;
    let mut ks = Vec::with_capacity(n as usize + 1);
    let mut zeta_pow = zeta.clone();
    for k in 0..=n {
        let ratio = &n_fact / factorial((n - k) as i64)?;
        let c = Float::with_val(bits, &four_pi * &ratio) * coef.numerator(k) / (n + 1 - k) / &zeta_pow;
        ks.push(c);
        zeta_pow *= &zeta;
    }
    Ok((lead, ks))
}

/// `Phi`-weighted overlap sum; `term(m, zeta)` is the overlap with weight
/// `r^{m-1} e^{-zeta r}` on the distribution center.
fn assemble<T>(
    n: u32,
    zeta: &Float,
    coef: EriCoefficient,
    term: T,
    ctx: &PrecisionContext,
) -> Result<(IntegralValue, Backend)>
where
    T: Fn(u32, &Float) -> Result<(IntegralValue, Backend)>,
{
    let (lead, ks) = potential_weights(n, zeta, coef, ctx)?;
    let mut acc = Assembly::new(ctx);
    acc.add(&lead, term(0, &ctx.zero())?);
    acc.add(&Float::with_val(ctx.bits(), -&lead), term(0, zeta)?);
    for (k, c) in ks.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc.add(c, term(n - k as u32 + 1, zeta)?);
    }
    Ok(acc.finish())
}

/// Analytic overlap, falling back to quadrature when the series cannot
/// represent the input.
fn analytic_or_quadrature(
    p: &SlaterParams,
    opts: &EriOptions,
    ctx: &PrecisionContext,
) -> Result<(IntegralValue, Backend)> {
    match overlap_3c_focus_weights(p, opts.policy, ctx) {
        Ok(v) => Ok((v, Backend::Analytic)),
        Err(Error::NotRepresentable { .. }) => {
            Ok((quad_overlap_unchecked(p, &Conformation::LinearMidpoint, &opts.quad, ctx)?, Backend::Quadrature))
        }
        Err(e) => Err(e),
    }
}

/// `K = int chi chi' / r_center dtau`.
///
/// `Center::A`: orbitals `(n1, zeta1)` on `b` and `(n2, zeta2)` on `c`;
/// analytic unless `zeta1 = zeta2`, where the series degenerates and the
/// quadrature is used. `Center::B`: orbitals on `a` (midpoint) and `c`;
/// evaluated by quadrature with focii `a`, `c` and `b` on the axis beyond
/// `a`.
pub fn nuclear_attraction_k(
    center: Center,
    (n1, zeta1): (u32, &Float),
    (n2, zeta2): (u32, &Float),
    r: &Float,
    opts: &EriOptions,
    ctx: &PrecisionContext,
) -> Result<(IntegralValue, Backend)> {
    let zero = ctx.zero();
    match center {
        Center::A => {
            let p = SlaterParams::new((0, n1, n2), zero, ctx.real(zeta1), ctx.real(zeta2), ctx.real(r))?;
            analytic_or_quadrature(&p, opts, ctx)
        }
        Center::B => {
            let (p, conf) = beyond_focus_params(0, &zero, (n1, zeta1), (n2, zeta2), r, ctx)?;
            Ok((quad_overlap_3c(&p, &conf, &opts.quad, ctx)?, Backend::Quadrature))
        }
    }
}

/// Overlap `int r_b^{m-1} e^{-zeta r_b} chi_a chi_c` set up with focii `a`,
/// `c` (separation `R/2`) and `b` at `mu = 3`, `nu = -1`.
fn beyond_focus_params(
    m: u32,
    zeta: &Float,
    (na, za): (u32, &Float),
    (nc, zc): (u32, &Float),
    r: &Float,
    ctx: &PrecisionContext,
) -> Result<(SlaterParams, Conformation)> {
    let half = Float::with_val(ctx.bits(), r / 2u32);
    let p = SlaterParams::new((m, na, nc), ctx.real(zeta), ctx.real(za), ctx.real(zc), half)?;
    let conf = Conformation::general_on_axis(ctx.int(3), ctx.int(-1))?;
    Ok((p, conf))
}

/// `[aa,bc]` from analytic overlaps.
pub fn eri_aabc(spec: &EriSpec, opts: &EriOptions, ctx: &PrecisionContext) -> Result<(IntegralValue, Backend)> {
    spec.validate()?;
    if spec.center != Center::A {
        return domain("eri_aabc needs the distribution on the midpoint center a");
    }
    let n = spec.dist.n_eff;
    let zeta = ctx.real(&spec.dist.zeta_eff);
    let (ob, oc) = (&spec.outer[0], &spec.outer[1]);
    let term = |m: u32, z: &Float| -> Result<(IntegralValue, Backend)> {
        let p =
            SlaterParams::new((m, ob.n, oc.n), z.clone(), ctx.real(&ob.zeta), ctx.real(&oc.zeta), ctx.real(&spec.r))?;
        match overlap_3c(&p, opts.policy, ctx) {
            Ok(v) => Ok((v, Backend::Analytic)),
            Err(Error::NotRepresentable { .. }) => {
                Ok((quad_overlap_3c(&p, &Conformation::LinearMidpoint, &opts.quad, ctx)?, Backend::Quadrature))
            }
            Err(e) => Err(e),
        }
    };
    assemble(n, &zeta, opts.coefficient, term, ctx)
}

/// `[bb,ac]` with every overlap taken by quadrature in the `a`-`c` frame,
/// where `b` lies on the axis beyond `a`.
pub fn eri_bbac(spec: &EriSpec, opts: &EriOptions, ctx: &PrecisionContext) -> Result<(IntegralValue, Backend)> {
    spec.validate()?;
    if spec.center != Center::B {
        return domain("eri_bbac needs the distribution on the end center b");
    }
    let n = spec.dist.n_eff;
    let zeta = ctx.real(&spec.dist.zeta_eff);
    let (oa, oc) = (&spec.outer[0], &spec.outer[1]);
    let term = |m: u32, z: &Float| -> Result<(IntegralValue, Backend)> {
        let (p, conf) = beyond_focus_params(m, z, (oa.n, &oa.zeta), (oc.n, &oc.zeta), &spec.r, ctx)?;
        Ok((quad_overlap_3c(&p, &conf, &opts.quad, ctx)?, Backend::Quadrature))
    };
    assemble(n, &zeta, opts.coefficient, term, ctx)
}

/// `[bb,ac]` from analytic overlaps in the `b`-`c` frame: the distribution
/// weight sits on focus `b` and `chi_a` on the midpoint, which the series
/// handles directly. Independent of [`eri_bbac`]'s quadrature path.
pub fn eri_bbac_midpoint(
    spec: &EriSpec,
    opts: &EriOptions,
    ctx: &PrecisionContext,
) -> Result<(IntegralValue, Backend)> {
    spec.validate()?;
    if spec.center != Center::B {
        return domain("eri_bbac_midpoint needs the distribution on the end center b");
    }
    let n = spec.dist.n_eff;
    let zeta = ctx.real(&spec.dist.zeta_eff);
    let (oa, oc) = (&spec.outer[0], &spec.outer[1]);
    let term = |m: u32, z: &Float| -> Result<(IntegralValue, Backend)> {
        let p = SlaterParams {
            n_a: oa.n,
            n_b: m,
            n_c: oc.n,
            zeta_a: ctx.real(&oa.zeta),
            zeta_b: z.clone(),
            zeta_c: ctx.real(&oc.zeta),
            r: ctx.real(&spec.r),
        };
        analytic_or_quadrature(&p, opts, ctx)
    };
    assemble(n, &zeta, opts.coefficient, term, ctx)
}

/// Assembled value and the two-electron oracle, compared.
#[derive(Debug, Clone)]
pub struct Certified {
    pub assembled: IntegralValue,
    pub backend: Backend,
    pub oracle: IntegralValue,
    pub deviation: f64,
}

/// Assembles `spec` and checks it against [`quad_eri`]; a relative
/// deviation above `tol` is a [`Error::FormulaFault`].
pub fn eri_certified(spec: &EriSpec, opts: &EriOptions, tol: f64, ctx: &PrecisionContext) -> Result<Certified> {
    let (assembled, backend) = match spec.center {
        Center::A => eri_aabc(spec, opts, ctx)?,
        Center::B => eri_bbac(spec, opts, ctx)?,
    };
    let oracle = quad_eri(spec, &opts.quad, ctx)?;
    let deviation = rel_deviation(&assembled.value, &oracle.value);
    if !(deviation <= tol) {
        return Err(Error::FormulaFault { deviation, tolerance: tol });
    }
    Ok(Certified { assembled, backend, oracle, deviation })
}
