use sto3c::geometry::Conformation;
use sto3c::numkernel::rel_deviation;
use sto3c::oracle::{quad_overlap_3c, QuadConfig};
use sto3c::overlap::{overlap_3c, SlaterParams, TruncationPolicy};
use sto3c::PrecisionContext;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(24).unwrap()
}

#[test]
fn on_axis_midpoint_is_the_linear_layout() {
    let c = ctx();
    let cfg = QuadConfig::for_ctx(&c);
    let p = SlaterParams::parse((2, 1, 2), ["1.2", "1.9", "1.1"], "2.2", &c).unwrap();
    let lin = quad_overlap_3c(&p, &Conformation::LinearMidpoint, &cfg, &c).unwrap();
    let axis = Conformation::general_on_axis(c.int(1), c.int(0)).unwrap();
    let gen = quad_overlap_3c(&p, &axis, &cfg, &c).unwrap();
    assert!(lin.converged && gen.converged);
    assert!(rel_deviation(&lin.value, &gen.value) < 1e-18);
}

#[test]
fn matches_series_with_zero_weight_center() {
    let c = ctx();
    let cfg = QuadConfig::for_ctx(&c);
    for z in [["0", "1.4", "1.2"], ["1.6", "1.4", "1.2"]] {
        let p = SlaterParams::parse((0, 2, 1), z, "1.4", &c).unwrap();
        let q = quad_overlap_3c(&p, &Conformation::LinearMidpoint, &cfg, &c).unwrap();
        let a = overlap_3c(&p, TruncationPolicy::adaptive(1e-25, 200), &c).unwrap();
        assert!(rel_deviation(&a.value, &q.value) < 1e-17, "{z:?}");
    }
}

#[test]
fn tighter_tolerance_stays_within_reported_error() {
    let c = ctx();
    let p = SlaterParams::parse((1, 1, 1), ["1.3", "1.3", "1.3"], "1.0", &c).unwrap();
    let loose =
        quad_overlap_3c(&p, &Conformation::SymmetricTriangular, &QuadConfig::with_tol_digits(&c, 12), &c).unwrap();
    let tight = quad_overlap_3c(&p, &Conformation::SymmetricTriangular, &QuadConfig::for_ctx(&c), &c).unwrap();
    let diff = (loose.value.clone() - &tight.value).abs();
    assert!(diff <= loose.tail_estimate);
    assert!(tight.value > 0);
}

#[test]
fn point_beyond_a_focus() {
    // b on the axis beyond a: mu = 3, nu = -1 in a frame of half the separation.
    let c = ctx();
    let cfg = QuadConfig::for_ctx(&c);
    let conf = Conformation::general_on_axis(c.int(3), c.int(-1)).unwrap();
    let p = SlaterParams::parse((1, 1, 1), ["1.0", "1.0", "1.0"], "1.0", &c).unwrap();
    let v = quad_overlap_3c(&p, &conf, &cfg, &c).unwrap();
    assert!(v.converged && v.value > 0);
    assert!(Conformation::general_on_axis(c.int(2), c.parse("0.5").unwrap()).is_err());
}

#[test]
fn config_rejects_overclaiming() {
    let c = ctx();
    let mut cfg = QuadConfig::for_ctx(&c);
    cfg.target_abs_tol = c.pow10(-30);
    let p = SlaterParams::parse((1, 1, 1), ["1", "1", "1"], "1", &c).unwrap();
    assert!(quad_overlap_3c(&p, &Conformation::LinearMidpoint, &cfg, &c).is_err());
}
