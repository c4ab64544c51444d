use std::time::Instant;

use rayon::prelude::*;
use rug::Float;

use sto3c::geometry::Conformation;
use sto3c::numkernel::rel_deviation;
use sto3c::oracle::{quad_eri, quad_overlap_3c, QuadConfig};
use sto3c::overlap::{convergence_scan, overlap_3c, IntegralValue, SlaterParams, TruncationPolicy};
use sto3c::repulsion::{
    eri_aabc, eri_bbac, nuclear_attraction_k, Center, ChargeDistribution, EriOptions, EriSpec, Orbital,
};
use sto3c::{Error, PrecisionContext};

use crate::record::{Echo, RunRecord};
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Overlap,
    Eri,
    Nucattr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BackendChoice {
    Analytic,
    Quadrature,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ConformationChoice {
    Linear,
    Triangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CenterChoice {
    A,
    B,
}

/// Precision, truncation and quadrature settings shared by every set.
#[derive(Debug, Clone)]
pub struct Settings {
    pub ctx: PrecisionContext,
    pub policy: TruncationPolicy,
    pub quad: QuadConfig,
}

impl Settings {
    pub fn new(
        digits: u32,
        fixed_n: Option<u32>,
        tol: Option<f64>,
        n_max: u32,
        quad_digits: Option<u32>,
    ) -> Result<Self, Failure> {
        let ctx = PrecisionContext::new(digits).map_err(Failure::usage)?;
        let policy = match fixed_n {
            Some(n) => TruncationPolicy::FixedN(n),
            None => TruncationPolicy::adaptive(tol.unwrap_or_else(|| 10f64.powi(-(digits.min(300) as i32))), n_max),
        };
        policy.validate().map_err(Failure::usage)?;
        let quad = QuadConfig::with_tol_digits(&ctx, quad_digits.unwrap_or(digits - 5));
        Ok(Self { ctx, policy, quad })
    }

    fn digits(&self) -> u32 {
        self.ctx.decimal_digits()
    }
}

/// One parameter set, in the column layout of its output row.
#[derive(Debug, Clone)]
pub struct Job {
    pub kind: Kind,
    pub center: Option<Center>,
    pub conformation: ConformationChoice,
    pub backend: BackendChoice,
    pub echo: Echo,
}

fn split<'a>(s: &'a str, what: &str, len: &[usize]) -> Result<Vec<&'a str>, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if !len.contains(&parts.len()) {
        return Err(Failure::Usage(format!("{what} expects {len:?} comma-separated values, got '{s}'")));
    }
    Ok(parts)
}

/// Broadcasts repeated `--n`, `--zeta`, `--R` flags into parameter sets.
pub fn jobs(
    kind: Kind,
    center: Option<CenterChoice>,
    conformation: ConformationChoice,
    backend: BackendChoice,
    n: &[String],
    zeta: &[String],
    r: &[String],
) -> Result<Vec<Job>, Failure> {
    let count = n.len().max(zeta.len()).max(r.len());
    for (flag, len) in [("--n", n.len()), ("--zeta", zeta.len()), ("--R", r.len())] {
        if len != 1 && len != count {
            return Err(Failure::Usage(format!("{flag} given {len} times; expected once or {count} times")));
        }
    }
    let center = match (kind, center) {
        (Kind::Overlap, None) => None,
        (Kind::Overlap, Some(_)) => return Err(Failure::Usage("--center applies to eri and nucattr only".into())),
        (_, None) => return Err(Failure::Usage("eri and nucattr need --center a|b".into())),
        (_, Some(CenterChoice::A)) => Some(Center::A),
        (_, Some(CenterChoice::B)) => Some(Center::B),
    };
    if kind != Kind::Overlap && conformation == ConformationChoice::Triangular {
        return Err(Failure::Usage("the triangular conformation applies to overlap only".into()));
    }
    let pick = |v: &[String], i: usize| v[if v.len() == 1 { 0 } else { i }].clone();
    (0..count)
        .map(|i| {
            let (ns, zs, rs) = (pick(n, i), pick(zeta, i), pick(r, i));
            let (n, zeta) = slots(kind, center, &ns, &zs)?;
            let label = match (center, conformation) {
                (Some(Center::A), _) => "center-a",
                (Some(Center::B), _) => "center-b",
                (None, ConformationChoice::Linear) => "linear",
                (None, ConformationChoice::Triangular) => "triangular",
            };
            Ok(Job {
                kind,
                center,
                conformation,
                backend,
                echo: Echo { n, zeta, r: rs.to_string(), conformation: label },
            })
        })
        .collect()
}

/// Places the given values in `(a, b, c)` order. For nucattr two values
/// name the orbitals and the center slot is filled with `0`.
fn slots(kind: Kind, center: Option<Center>, n: &str, zeta: &str) -> Result<([u32; 3], [String; 3]), Failure> {
    let lens: &[usize] = if kind == Kind::Nucattr { &[2, 3] } else { &[3] };
    let ns = split(n, "--n", lens)?;
    let zs = split(zeta, "--zeta", lens)?;
    if ns.len() != zs.len() {
        return Err(Failure::Usage("--n and --zeta differ in length".into()));
    }
    let mut nv = Vec::with_capacity(3);
    for s in &ns {
        nv.push(s.parse::<u32>().map_err(|_| Failure::Usage(format!("bad quantum number '{s}'")))?);
    }
    let mut zv: Vec<String> = zs.iter().map(|s| s.to_string()).collect();
    if kind == Kind::Nucattr {
        let slot = if center == Some(Center::A) { 0 } else { 1 };
        if nv.len() == 2 {
            nv.insert(slot, 0);
            zv.insert(slot, "0".into());
        } else if nv[slot] != 0 || zv[slot].parse::<f64>().ok() != Some(0.0) {
            return Err(Failure::Usage("nucattr: the center slot must hold n = 0, zeta = 0".into()));
        }
    }
    Ok(([nv[0], nv[1], nv[2]], [zv[0].clone(), zv[1].clone(), zv[2].clone()]))
}

/// Evaluates every job in parallel; results keep the input order.
pub fn run(jobs: &[Job], s: &Settings) -> Vec<Result<Vec<RunRecord>, Failure>> {
    jobs.par_iter().map(|j| evaluate(j, s)).collect()
}

fn parse(ctx: &PrecisionContext, s: &str) -> Result<Float, Failure> {
    ctx.parse(s).map_err(Failure::usage)
}

fn evaluate(job: &Job, s: &Settings) -> Result<Vec<RunRecord>, Failure> {
    let ctx = &s.ctx;
    let e = &job.echo;
    let z = [parse(ctx, &e.zeta[0])?, parse(ctx, &e.zeta[1])?, parse(ctx, &e.zeta[2])?];
    let r = parse(ctx, &e.r)?;
    let mut backend = job.backend;
    if job.conformation == ConformationChoice::Triangular && backend != BackendChoice::Quadrature {
        eprintln!("note: the triangular conformation is evaluated by quadrature only");
        backend = BackendChoice::Quadrature;
    }

    let analytic = || -> Result<IntegralValue, Error> {
        match job.kind {
            Kind::Overlap => {
                let p =
                    SlaterParams::new((e.n[0], e.n[1], e.n[2]), z[0].clone(), z[1].clone(), z[2].clone(), r.clone())?;
                overlap_3c(&p, s.policy, ctx)
            }
            Kind::Eri => {
                let spec = eri_spec(job, &z, &r);
                let opts = eri_options(s);
                let (v, path) = match job.center {
                    Some(Center::A) => eri_aabc(&spec, &opts, ctx)?,
                    _ => eri_bbac(&spec, &opts, ctx)?,
                };
                note_path(job, path.name());
                Ok(v)
            }
            Kind::Nucattr => {
                let (o1, o2) = outer_pair(job, &z);
                let (v, path) =
                    nuclear_attraction_k(job.center.unwrap_or(Center::A), o1, o2, &r, &eri_options(s), ctx)?;
                note_path(job, path.name());
                Ok(v)
            }
        }
    };
    let quadrature = || -> Result<IntegralValue, Error> {
        match job.kind {
            Kind::Overlap => {
                let conf = match job.conformation {
                    ConformationChoice::Linear => Conformation::LinearMidpoint,
                    ConformationChoice::Triangular => Conformation::SymmetricTriangular,
                };
                let p =
                    SlaterParams::new((e.n[0], e.n[1], e.n[2]), z[0].clone(), z[1].clone(), z[2].clone(), r.clone())?;
                quad_overlap_3c(&p, &conf, &s.quad, ctx)
            }
            Kind::Eri => quad_eri(&eri_spec(job, &z, &r), &s.quad, ctx),
            Kind::Nucattr => match job.center {
                Some(Center::A) => {
                    let p = SlaterParams::new((0, e.n[1], e.n[2]), ctx.zero(), z[1].clone(), z[2].clone(), r.clone())?;
                    quad_overlap_3c(&p, &Conformation::LinearMidpoint, &s.quad, ctx)
                }
                _ => {
                    let (o1, o2) = outer_pair(job, &z);
                    Ok(nuclear_attraction_k(Center::B, o1, o2, &r, &eri_options(s), ctx)?.0)
                }
            },
        }
    };

    let timed = |f: &dyn Fn() -> Result<IntegralValue, Error>, name: &'static str| {
        let t = Instant::now();
        let v = f().map_err(Failure::from_core)?;
        Ok::<_, Failure>((RunRecord::new(e, name, s.digits(), &v, t.elapsed().as_secs_f64()), v))
    };
    match backend {
        BackendChoice::Analytic => Ok(vec![timed(&analytic, "analytic")?.0]),
        BackendChoice::Quadrature => Ok(vec![timed(&quadrature, "quadrature")?.0]),
        BackendChoice::Both => {
            let (mut a, av) = timed(&analytic, "analytic")?;
            let (mut q, qv) = timed(&quadrature, "quadrature")?;
            let delta = format!("{:.3e}", rel_deviation(&av.value, &qv.value));
            a.delta = Some(delta.clone());
            q.delta = Some(delta);
            Ok(vec![a, q])
        }
    }
}

fn note_path(job: &Job, path: &str) {
    if path != "analytic" {
        let kind = if job.kind == Kind::Eri { "eri" } else { "nucattr" };
        eprintln!("note: {kind} {} evaluated on the {path} path", job.echo.conformation);
    }
}

fn eri_options(s: &Settings) -> EriOptions {
    let mut opts = EriOptions::new(s.policy, &s.ctx);
    opts.quad = s.quad.clone();
    opts
}

/// The distribution sits in the center's slot; the other two are orbitals.
fn eri_spec(job: &Job, z: &[Float; 3], r: &Float) -> EriSpec {
    let n = job.echo.n;
    let (d, o) = match job.center {
        Some(Center::A) => (0, [1, 2]),
        _ => (1, [0, 2]),
    };
    EriSpec {
        center: job.center.unwrap_or(Center::A),
        dist: ChargeDistribution { n_eff: n[d], zeta_eff: z[d].clone() },
        outer: [Orbital { n: n[o[0]], zeta: z[o[0]].clone() }, Orbital { n: n[o[1]], zeta: z[o[1]].clone() }],
        r: r.clone(),
    }
}

fn outer_pair<'a>(job: &Job, z: &'a [Float; 3]) -> ((u32, &'a Float), (u32, &'a Float)) {
    let n = job.echo.n;
    match job.center {
        Some(Center::A) => ((n[1], &z[1]), (n[2], &z[2])),
        _ => ((n[0], &z[0]), (n[2], &z[2])),
    }
}

/// Partial sums `S_N`, `N` in `lo..=hi`, from one pass of the series. The
/// tail of each row is its last term.
pub fn scan(echo: &Echo, lo: u32, hi: u32, ctx: &PrecisionContext) -> Result<Vec<(RunRecord, Float)>, Failure> {
    let t = Instant::now();
    let z = [parse(ctx, &echo.zeta[0])?, parse(ctx, &echo.zeta[1])?, parse(ctx, &echo.zeta[2])?];
    let p = SlaterParams::new(
        (echo.n[0], echo.n[1], echo.n[2]),
        z[0].clone(),
        z[1].clone(),
        z[2].clone(),
        parse(ctx, &echo.r)?,
    )
    .map_err(Failure::from_core)?;
    let sums = convergence_scan(&p, lo.saturating_sub(1)..=hi, ctx).map_err(Failure::from_core)?;
    let elapsed = t.elapsed().as_secs_f64();
    let mut prev = Float::new(ctx.bits());
    let mut out = Vec::new();
    for (n, s) in sums {
        let tail = Float::with_val(ctx.bits(), &s - &prev).abs();
        prev = s.clone();
        if n < lo {
            continue;
        }
        let bound = Float::with_val(ctx.bits(), s.abs_ref()) * ctx.tol_abs();
        let v = IntegralValue { converged: tail <= bound, value: s.clone(), terms_used: n, tail_estimate: tail };
        out.push((RunRecord::new(echo, "analytic", ctx.decimal_digits(), &v, elapsed), s));
    }
    Ok(out)
}
