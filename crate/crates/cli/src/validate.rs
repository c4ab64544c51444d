use rayon::prelude::*;
use rug::Float;

use sto3c::auxiliary::{a_n, b_aux, t_minus, t_plus};
use sto3c::geometry::Conformation;
use sto3c::numkernel::rel_deviation;
use sto3c::oracle::{quad_aux_check, quad_eri, quad_overlap_3c, AuxIntegral, QuadConfig};
use sto3c::overlap::{overlap_3c, SlaterParams, TruncationPolicy};
use sto3c::repulsion::{charge_distribution, eri_aabc, eri_bbac, Center, EriOptions, EriSpec, Orbital};
use sto3c::{Error, PrecisionContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Aux,
    Overlap,
    Eri,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Grid {
    Default,
}

/// Worst deviation of one check over its grid.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub points: usize,
    pub max_dev: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_dev <= self.tol
    }

    fn over(name: &'static str, tol: f64, devs: Vec<f64>) -> Self {
        // A NaN deviation must fail the check, so fold it to infinity.
        let max_dev = devs.iter().fold(0.0f64, |m, d| if d.is_nan() { f64::INFINITY } else { m.max(*d) });
        Self { name, points: devs.len(), max_dev, tol }
    }
}

fn tol_pow(e: i32) -> f64 {
    10f64.powi(e)
}

pub const AUX_DIGITS: u32 = 30;
pub const OVERLAP_DIGITS: u32 = 30;
pub const ERI_DIGITS: u32 = 20;
pub const ERI_TOL: f64 = 1e-12;

const ALPHAS: [&str; 7] = ["0.1001", "0.37", "1", "2.5", "4.2", "7.7", "9.99"];

const T_POINTS: [(u32, &str, &str); 10] = [
    (0, "1", "1"),
    (1, "1", "1"),
    (2, "1.3", "0.7"),
    (3, "2.5", "0.4"),
    (5, "0.7", "2.2"),
    (2, "4.0", "0.3"),
    (4, "1.8", "1.1"),
    (0, "0.3", "5.0"),
    (6, "3.3", "0.9"),
    (1, "0.9", "0.15"),
];

const B_POINTS: [(u32, u32, i64, &str, &str); 10] = [
    (1, 1, 0, "1.5", "0.8"),
    (0, 0, 0, "1", "1"),
    (2, 1, 3, "2.2", "0.6"),
    (1, 2, -1, "1.8", "0.9"),
    (0, 1, -2, "1.2", "0.5"),
    (3, 0, -1, "3.0", "1.1"),
    (0, 2, -3, "1.4", "1.3"),
    (2, 2, 2, "0.9", "0.4"),
    (4, 1, 1, "2.7", "2.0"),
    (1, 3, 5, "3.5", "0.2"),
];

type OverlapPoint = ((u32, u32, u32), [&'static str; 3], &'static str);

pub const OVERLAP_GRID: [OverlapPoint; 20] = [
    ((1, 2, 1), ["1.6", "1.4", "1.2"], "1.4"),
    ((0, 2, 1), ["1.6", "1.4", "1.2"], "1.4"),
    ((0, 2, 1), ["0", "1.4", "1.2"], "1.4"),
    ((0, 1, 1), ["0", "0.8", "1.9"], "2.0"),
    ((0, 4, 4), ["3.0", "0.8", "3.0"], "4.0"),
    ((0, 3, 1), ["0.8", "2.2", "1.0"], "1.0"),
    ((0, 1, 2), ["0", "2.6", "1.1"], "3.3"),
    ((1, 1, 1), ["1.3", "1.3", "1.3"], "1.0"),
    ((1, 1, 1), ["1.1", "1.3", "1.5"], "1.0"),
    ((1, 2, 2), ["2.0", "2.0", "2.0"], "2.0"),
    ((2, 2, 2), ["1.6", "1.4", "1.4"], "2.5"),
    ((4, 3, 2), ["2.6", "2.4", "1.6"], "3.0"),
    ((2, 1, 4), ["0.8", "3.0", "0.8"], "4.0"),
    ((4, 4, 4), ["0.8", "3.0", "0.8"], "1.0"),
    ((3, 1, 2), ["1.2", "0.9", "2.1"], "2.2"),
    ((1, 4, 1), ["2.9", "1.7", "1.0"], "3.6"),
    ((2, 3, 3), ["1.0", "1.5", "2.8"], "1.7"),
    ((3, 2, 1), ["2.4", "1.1", "1.9"], "2.8"),
    ((1, 1, 3), ["0.9", "2.0", "1.2"], "1.2"),
    ((4, 2, 3), ["1.5", "2.5", "0.9"], "3.9"),
];

/// `(n1, zeta1, n1', zeta1')` distribution, two outer orbitals, `R`.
type EriPoint = ((u32, &'static str, u32, &'static str), [(u32, &'static str); 2], &'static str);

const ERI_GRID: [EriPoint; 5] = [
    ((1, "1.0", 1, "1.0"), [(1, "1.0"), (1, "1.0")], "2.0"),
    ((2, "1.2", 1, "0.9"), [(2, "1.4"), (1, "1.1")], "1.5"),
    ((1, "1.5", 2, "1.1"), [(1, "0.9"), (2, "1.6")], "2.5"),
    ((1, "2.0", 1, "0.8"), [(3, "1.2"), (1, "1.8")], "3.0"),
    ((2, "1.0", 2, "1.3"), [(1, "1.1"), (1, "2.4")], "1.2"),
];

/// Mulliken recurrence, `T^(+/-)` and `B` against their definitions, and
/// the `T_0` closed forms against quadrature.
pub fn aux(ctx: &PrecisionContext) -> Result<Vec<Check>, Error> {
    let digits = ctx.decimal_digits() as i32;
    let cfg = QuadConfig::for_ctx(ctx);
    let bits = ctx.bits();
    let f = |s: &str| ctx.parse(s);

    let mut rec = Vec::new();
    for a in ALPHAS {
        let alpha = f(a)?;
        let e = Float::with_val(bits, -&alpha).exp();
        let mut prev = a_n(0, &alpha, ctx)?;
        rec.push(rel_deviation(&Float::with_val(bits, &alpha * &prev), &e));
        for n in 1..=12u32 {
            let cur = a_n(n, &alpha, ctx)?;
            let lhs = Float::with_val(bits, &alpha * &cur);
            let rhs = Float::with_val(bits, &e + Float::with_val(bits, &prev * n));
            rec.push(rel_deviation(&lhs, &rhs));
            prev = cur;
        }
    }

    let quad_tol = tol_pow(-digits + 10);
    let t_devs: Vec<(f64, f64)> = T_POINTS
        .par_iter()
        .map(|&(n, a, b)| {
            let (alpha, beta) = (f(a)?, f(b)?);
            let qp = quad_aux_check(&AuxIntegral::Tplus { n, alpha: alpha.clone(), beta: beta.clone() }, &cfg, ctx)?;
            let qm = quad_aux_check(&AuxIntegral::Tminus { n, alpha: alpha.clone(), beta: beta.clone() }, &cfg, ctx)?;
            Ok((
                rel_deviation(&t_plus(n, &alpha, &beta, ctx)?, &qp.value),
                rel_deviation(&t_minus(n, &alpha, &beta, ctx)?, &qm.value),
            ))
        })
        .collect::<Result<_, Error>>()?;
    let b_devs: Vec<f64> = B_POINTS
        .par_iter()
        .map(|&(n, m, k, a, b)| {
            let (alpha, beta) = (f(a)?, f(b)?);
            let q = quad_aux_check(&AuxIntegral::B { n, m, k, alpha: alpha.clone(), beta: beta.clone() }, &cfg, ctx)?;
            Ok(rel_deviation(&b_aux(n, m, k, &alpha, &beta, ctx)?, &q.value))
        })
        .collect::<Result<_, Error>>()?;

    // T_0^+ = (e^-a Ei(-2b) - e^a Ei(-2(a+b)))/a and T_0^- = e^-a ln(b/(a+b))/a,
    // with MPFR's Ei.
    let closed_points = [("1", "1"), ("0.3", "5.0"), ("2.2", "0.6"), ("0.5", "1.7")];
    let closed: Vec<f64> = closed_points
        .par_iter()
        .map(|&(a, b)| {
            let (alpha, beta) = (f(a)?, f(b)?);
            let ea = Float::with_val(bits, alpha.exp_ref());
            let ema = Float::with_val(bits, -&alpha).exp();
            let ei1 = Float::with_val(bits, &beta * -2i32).eint();
            let ei2 = (Float::with_val(bits, &alpha + &beta) * -2i32).eint();
            let plus = (Float::with_val(bits, &ema * ei1) - Float::with_val(bits, &ea * ei2)) / &alpha;
            let ratio = Float::with_val(bits, &beta / Float::with_val(bits, &alpha + &beta));
            let minus = Float::with_val(bits, &ema * ratio.ln()) / &alpha;
            let qp = quad_aux_check(&AuxIntegral::Tplus { n: 0, alpha: alpha.clone(), beta: beta.clone() }, &cfg, ctx)?;
            let qm = quad_aux_check(&AuxIntegral::Tminus { n: 0, alpha, beta }, &cfg, ctx)?;
            Ok(rel_deviation(&plus, &qp.value).max(rel_deviation(&minus, &qm.value)))
        })
        .collect::<Result<_, Error>>()?;

    Ok(vec![
        Check::over("aux: A_n recurrence", tol_pow(-digits + 5), rec),
        Check::over("aux: T+ vs quadrature", quad_tol, t_devs.iter().map(|d| d.0).collect()),
        Check::over("aux: T- vs quadrature", quad_tol, t_devs.iter().map(|d| d.1).collect()),
        Check::over("aux: B vs quadrature", quad_tol, b_devs),
        Check::over("aux: T0 closed forms", quad_tol, closed),
    ])
}

/// Analytic series against the 2D quadrature on the linear grid.
pub fn overlap(ctx: &PrecisionContext, _grid: Grid) -> Result<Vec<Check>, Error> {
    let digits = ctx.decimal_digits();
    let cfg = QuadConfig::with_tol_digits(ctx, digits - 6);
    let policy = TruncationPolicy::adaptive(10f64.powi(-(digits as i32) + 1), 200);
    let devs: Vec<f64> = OVERLAP_GRID
        .par_iter()
        .map(|&(n, z, r)| {
            let p = SlaterParams::parse(n, z, r, ctx)?;
            let a = overlap_3c(&p, policy, ctx)?;
            let q = quad_overlap_3c(&p, &Conformation::LinearMidpoint, &cfg, ctx)?;
            Ok(if a.converged && q.converged { rel_deviation(&a.value, &q.value) } else { f64::INFINITY })
        })
        .collect::<Result<_, Error>>()?;
    Ok(vec![Check::over("overlap: series vs quadrature", tol_pow(-(digits as i32) + 12), devs)])
}

/// `[aa,bc]` and `[bb,ac]` assemblies against the two-electron quadrature.
pub fn eri(ctx: &PrecisionContext) -> Result<Vec<Check>, Error> {
    let digits = ctx.decimal_digits() as i32;
    let mut opts = EriOptions::new(TruncationPolicy::adaptive(10f64.powi(-digits + 1), 200), ctx);
    opts.quad = QuadConfig::with_tol_digits(ctx, 15);
    let run = |center: Center| -> Result<Vec<f64>, Error> {
        ERI_GRID
            .par_iter()
            .map(|(d, o, r)| {
                let f = |s: &str| ctx.parse(s);
                let spec = EriSpec {
                    center,
                    dist: charge_distribution(d.0, &f(d.1)?, d.2, &f(d.3)?)?,
                    outer: [Orbital { n: o[0].0, zeta: f(o[0].1)? }, Orbital { n: o[1].0, zeta: f(o[1].1)? }],
                    r: f(r)?,
                };
                let assembled = match center {
                    Center::A => eri_aabc(&spec, &opts, ctx)?.0,
                    Center::B => eri_bbac(&spec, &opts, ctx)?.0,
                };
                let oracle = quad_eri(&spec, &opts.quad, ctx)?;
                Ok(rel_deviation(&assembled.value, &oracle.value))
            })
            .collect()
    };
    Ok(vec![
        Check::over("eri: [aa,bc] vs quadrature", ERI_TOL, run(Center::A)?),
        Check::over("eri: [bb,ac] vs quadrature", ERI_TOL, run(Center::B)?),
    ])
}
