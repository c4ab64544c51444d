//! Elliptical coordinates with focii `b`, `c` at separation `R`:
//! `mu = (r_b + r_c)/R`, `nu = (r_b - r_c)/R`. The third center `a` sits on
//! or off the axis according to a [`Conformation`].

use rug::Float;

use crate::error::{domain, Result};
use crate::numkernel::PrecisionContext;

#[derive(Debug, Clone, PartialEq)]
pub enum Conformation {
    /// `a` at the midpoint of `b`-`c`: `mu_a = 1`, `nu_a = 0`.
    LinearMidpoint,
    /// Equilateral placement with `R_ab = R_ac = R`: `mu_a = 2`, `nu_a = 0`,
    /// with the azimuthal coupling dropped as for s-orbitals.
    SymmetricTriangular,
    /// `a` anywhere on the axis; `mu_a = 1` (between the focii) or
    /// `nu_a = +/-1` (beyond one of them).
    GeneralOnAxis { mu_a: Float, nu_a: Float },
}

impl Conformation {
    pub fn general_on_axis(mu_a: Float, nu_a: Float) -> Result<Self> {
        if mu_a < 1 || !(-1..=1).contains(&nu_a) {
            return domain("GeneralOnAxis needs mu_a >= 1 and -1 <= nu_a <= 1");
        }
        let prec = mu_a.prec().max(nu_a.prec());
        let axial = Float::with_val(prec, mu_a.square_ref()) - 1u32;
        let radial = 1u32 - Float::with_val(prec, nu_a.square_ref());
        if !axial.is_zero() && !radial.is_zero() {
            return domain("GeneralOnAxis needs mu_a = 1 or |nu_a| = 1 (center on the axis)");
        }
        Ok(Self::GeneralOnAxis { mu_a, nu_a })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::LinearMidpoint => "linear",
            Self::SymmetricTriangular => "triangular",
            Self::GeneralOnAxis { .. } => "on-axis",
        }
    }
}

/// `(alpha, beta, gamma)` of the elliptical-coordinate exponential.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledExponents {
    pub alpha: Float,
    pub beta: Float,
    pub gamma: Float,
}

pub fn scaled_exponents(
    zeta_a: &Float,
    zeta_b: &Float,
    zeta_c: &Float,
    r: &Float,
    ctx: &PrecisionContext,
) -> Result<ScaledExponents> {
    if *zeta_a < 0 || *zeta_b < 0 || *zeta_c < 0 || *r <= 0 || (zeta_b.is_zero() && zeta_c.is_zero()) {
        return domain("scaled_exponents needs non-negative exponents, zeta_b + zeta_c > 0 and R > 0");
    }
    let half_r = Float::with_val(ctx.bits(), r / 2u32);
    let alpha = Float::with_val(ctx.bits(), zeta_b + zeta_c) * &half_r;
    let beta = Float::with_val(ctx.bits(), zeta_b - zeta_c) * &half_r;
    let gamma = Float::with_val(ctx.bits(), zeta_a * &half_r);
    Ok(ScaledExponents { alpha, beta, gamma })
}

fn check_coords(mu: &Float, nu: &Float) -> Result<()> {
    if *mu < 1 || *nu < -1 || *nu > 1 {
        return domain(format!("elliptical coordinates out of range: mu = {}, nu = {}", mu.to_f64(), nu.to_f64()));
    }
    Ok(())
}

/// `(2 r_a / R)^2` without the azimuthal term.
pub fn rho_squared(mu: &Float, nu: &Float, conf: &Conformation, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    let mu2 = Float::with_val(p, mu.square_ref());
    let nu2 = Float::with_val(p, nu.square_ref());
    match conf {
        Conformation::LinearMidpoint => mu2 + nu2 - 1u32,
        Conformation::SymmetricTriangular => mu2 + nu2 + 2u32,
        Conformation::GeneralOnAxis { mu_a, nu_a } => {
            let mua2 = Float::with_val(p, mu_a.square_ref());
            let nua2 = Float::with_val(p, nu_a.square_ref());
            let cross = Float::with_val(p, mu * mu_a) * nu * nu_a * 2u32;
            let v = mu2 + mua2 + nu2 + nua2 - 2u32 - cross;
            // rounding can leave a tiny negative at the center itself
            if v < 0 {
                Float::new(p)
            } else {
                v
            }
        }
    }
}

/// Distance from the electron at `(mu, nu, phi)` to center `a`.
///
/// `dphi` enters only through the azimuthal coupling of the general on-axis
/// formula, which vanishes identically for centers on the axis.
pub fn r_third_center(
    mu: &Float,
    nu: &Float,
    dphi: &Float,
    conf: &Conformation,
    r: &Float,
    ctx: &PrecisionContext,
) -> Result<Float> {
    check_coords(mu, nu)?;
    let p = ctx.bits();
    let mut rho2 = rho_squared(mu, nu, conf, ctx);
    if let Conformation::GeneralOnAxis { mu_a, nu_a } = conf {
        let prod = (Float::with_val(p, mu.square_ref()) - 1u32)
            * (1u32 - Float::with_val(p, nu.square_ref()))
            * (Float::with_val(p, mu_a.square_ref()) - 1u32)
            * (1u32 - Float::with_val(p, nu_a.square_ref()));
        let prod = if prod < 0 { Float::new(p) } else { prod };
        rho2 -= prod.sqrt() * Float::with_val(p, dphi.cos_ref()) * 2u32;
    }
    let rho = if rho2 < 0 { Float::new(p) } else { rho2.sqrt() };
    Ok(rho * Float::with_val(p, r / 2u32))
}

/// `(r_b, r_c) = (R/2)(mu + nu), (R/2)(mu - nu)`.
pub fn r_focii(mu: &Float, nu: &Float, r: &Float, ctx: &PrecisionContext) -> Result<(Float, Float)> {
    check_coords(mu, nu)?;
    let p = ctx.bits();
    let half_r = Float::with_val(p, r / 2u32);
    let rb = Float::with_val(p, mu + nu) * &half_r;
    let rc = Float::with_val(p, mu - nu) * &half_r;
    Ok((rb, rc))
}
