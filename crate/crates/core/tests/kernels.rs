use hermite_potential::kernels::{
    heat_kernel_log, heat_mass_log, l1_norm_envelope, l1_norm_quad, potential_kernel_envelope,
    potential_kernel_pieces, potential_kernel_quad, KernelParams, PairGeometry, PointPair,
};
use hermite_potential::num::special_fn::gamma;
use hermite_potential::num::{integrate, try_integrate, Endpoint, Interval};
use hermite_potential::special::e_envelope;
use hermite_potential::{Error, QuadConfig};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

fn kp(d: u32, sigma: f64) -> KernelParams {
    KernelParams::new(d, sigma).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Heat kernel written out directly from the vector formula, d = 1.
fn mehler_1d(t: f64, x: f64, y: f64) -> f64 {
    (2.0 * PI * (2.0 * t).sinh()).powf(-0.5)
        * (-0.25 * (t.tanh() * (x + y).powi(2) + (x - y).powi(2) / t.tanh())).exp()
}

/// Fixed-step trapezoid in `s` with `t = e^s`, the exponent bounded by
/// double-exponential decay on both sides.
fn oracle_kernel_1d(sigma: f64, x: f64, y: f64) -> f64 {
    let h = 1.0 / 256.0;
    let mut sum = 0.0;
    for k in (-40 * 256)..=(6 * 256) {
        let s = f64::from(k) * h;
        let t = s.exp();
        let v = mehler_1d(t, x, y) * t.powf(sigma);
        if v.is_finite() {
            sum += v;
        }
    }
    sum * h / gamma(sigma)
}

// 30-digit reference values, frozen.
const K_FIXTURE: f64 = 0.277067459614937346509080252008; // d=1, σ=1, x=0, y=1
const L1_FIXTURE: f64 = 1.31102877714605990523241979495; // d=1, σ=1, |x|=0

#[test]
fn kernel_fixture() {
    let o = oracle_kernel_1d(1.0, 0.0, 1.0);
    assert!(rel(o, K_FIXTURE) < 1e-13, "oracle {o}");
    let g = PointPair::new(vec![0.0], vec![1.0]).unwrap().geometry();
    let q = potential_kernel_quad(&kp(1, 1.0), &g, &QuadConfig::with_rel_tol(1e-13)).unwrap();
    assert!(rel(q.real(), K_FIXTURE) < 1e-12, "{}", q.real());
}

#[test]
fn kernel_matches_oracle_off_fixture() {
    for (sigma, x, y) in [
        (0.25, 0.3, -1.2),
        (0.5, 2.0, 2.5),
        (1.7, 0.0, 0.01),
        (3.0, -4.0, 1.0),
    ] {
        let g = PointPair::new(vec![x], vec![y]).unwrap().geometry();
        let q = potential_kernel_quad(&kp(1, sigma), &g, &QuadConfig::default())
            .unwrap()
            .real();
        let o = oracle_kernel_1d(sigma, x, y);
        assert!(rel(q, o) < 1e-9, "σ={sigma} x={x} y={y}: {q} vs {o}");
    }
}

#[test]
fn l1_fixture() {
    let q = l1_norm_quad(&kp(1, 1.0), 0.0, &QuadConfig::with_rel_tol(1e-13)).unwrap();
    assert!(rel(q.real(), L1_FIXTURE) < 1e-12, "{}", q.real());
}

#[test]
fn pieces_add_up() {
    let g = PairGeometry::from_polar(1.0, 0.5, 0.3);
    let p = potential_kernel_pieces(&kp(3, 1.0), &g, &QuadConfig::default()).unwrap();
    let total = potential_kernel_quad(&kp(3, 1.0), &g, &QuadConfig::default()).unwrap();
    assert!(rel(p.near.real() + p.far.real(), total.real()) < 1e-14);
    assert!(total.error_estimate <= 2e-10);
}

#[test]
fn on_diagonal_behavior() {
    let cfg = QuadConfig::default();
    for (d, sigma) in [(1, 0.25), (1, 0.5), (2, 1.0), (3, 1.0)] {
        let g = PairGeometry::diagonal(0.7);
        assert_eq!(
            potential_kernel_quad(&kp(d, sigma), &g, &cfg),
            Err(Error::DiagonalSingularity { d, sigma })
        );
        assert!(potential_kernel_envelope(&kp(d, sigma), &g).is_err());
    }
    let v = potential_kernel_quad(&kp(1, 1.0), &PairGeometry::diagonal(0.7), &cfg)
        .unwrap()
        .real();
    assert!(v.is_finite() && v > 0.0);
}

#[test]
fn semigroup_law() {
    let cfg = QuadConfig::with_rel_tol(1e-12);
    let p = kp(1, 1.0);
    let pt = |a: f64, b: f64| PointPair::new(vec![a], vec![b]).unwrap().geometry();
    for t in [0.1, 0.5] {
        for s in [0.1, 0.5] {
            for x in [-1.0, 0.0, 2.0] {
                for y in [-1.0, 0.0, 2.0] {
                    let conv = integrate(
                        |z| heat_kernel_log(t, &pt(x, z), &p) * heat_kernel_log(s, &pt(z, y), &p),
                        &Interval::new(-40.0, 40.0),
                        &cfg,
                    )
                    .unwrap()
                    .real();
                    let direct = heat_kernel_log(t + s, &pt(x, y), &p).to_real();
                    assert!(rel(conv, direct) < 1e-8, "t={t} s={s} x={x} y={y}");
                    assert!(rel(direct, mehler_1d(t + s, x, y)) < 1e-13);
                }
            }
        }
    }
}

#[test]
fn mass_identity_line() {
    let cfg = QuadConfig::with_rel_tol(1e-12);
    let p = kp(1, 1.0);
    for t in [0.1, 1.0, 5.0] {
        for x in [0.0, 1.0, 3.0] {
            let mass = integrate(
                |y| heat_kernel_log(t, &PointPair::new(vec![x], vec![y]).unwrap().geometry(), &p),
                &Interval::new(-60.0, 60.0),
                &cfg,
            )
            .unwrap()
            .real();
            let expect = heat_mass_log(t, x, 1).exp();
            assert!(rel(mass, expect) < 1e-8, "t={t} x={x}: {mass} vs {expect}");
        }
    }
}

#[test]
fn mass_identity_plane() {
    // ∫_0^∞ r ∫_0^{2π} G_t(x, y(r, θ)) dθ dr
    let cfg = QuadConfig::with_rel_tol(1e-11);
    let p = kp(2, 1.0);
    for t in [0.1, 1.0] {
        for x in [0.0, 1.5] {
            let mass = try_integrate(
                |r| {
                    let inner = integrate(
                        |th| heat_kernel_log(t, &PairGeometry::from_polar(x, r, th), &p),
                        &Interval::new(0.0, PI),
                        &cfg,
                    )?;
                    Ok(inner.value.scale_log((2.0 * r).ln()))
                },
                &Interval::new(0.0, 40.0),
                &cfg,
            )
            .unwrap()
            .real();
            let expect = heat_mass_log(t, x, 2).exp();
            assert!(rel(mass, expect) < 1e-8, "t={t} x={x}: {mass} vs {expect}");
        }
    }
}

#[test]
fn l1_norm_equals_kernel_integral_line() {
    let cfg = QuadConfig::default();
    let p = kp(1, 0.75);
    for x in [0.0, 1.0, 3.0] {
        let direct = l1_norm_quad(&p, x, &cfg).unwrap().real();
        // split at the diagonal y = x, integrable singularity |x-y|^{2σ-1}
        let side = |sign: f64| {
            try_integrate(
                |w| {
                    Ok(potential_kernel_quad(
                        &p,
                        &PointPair::new(vec![x], vec![x + sign * w])
                            .unwrap()
                            .geometry(),
                        &cfg,
                    )?
                    .value)
                },
                &Interval::new(0.0, 40.0).lo_end(Endpoint::Algebraic(2.0 * p.sigma - 1.0)),
                &cfg,
            )
            .unwrap()
            .real()
        };
        let (left, right) = (side(-1.0), side(1.0));
        assert!(
            rel(left + right, direct) < 1e-6,
            "x={x}: {} vs {direct}",
            left + right
        );
    }
}

#[test]
fn l1_norm_against_trapezoid() {
    let h = 1.0 / 256.0;
    let mut sum = 0.0;
    for k in (-12 * 256)..=(4 * 256) {
        let t = (FRAC_PI_2 * (f64::from(k) * h).sinh()).exp();
        let w = t * FRAC_PI_2 * (f64::from(k) * h).cosh();
        sum += w * (2.0 * t).cosh().powf(-0.5);
    }
    assert!(rel(sum * h, L1_FIXTURE) < 1e-12);
}

#[test]
fn l1_norm_band() {
    for (d, sigma) in [(1, 0.5), (1, 1.0), (2, 1.0), (3, 0.75)] {
        let p = kp(d, sigma);
        let ratios: Vec<f64> = (0..50)
            .map(|k| {
                let x = 10.0 * f64::from(k) / 49.0;
                l1_norm_quad(&p, x, &QuadConfig::default()).unwrap().real()
                    / l1_norm_envelope(&p, x).shape
            })
            .collect();
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(hi / lo <= 20.0, "d={d} σ={sigma}: {lo}..{hi}");
    }
}

#[test]
fn near_piece_tracks_e_envelope() {
    // log J0 - log(E envelope at T = u², S = v²) stays in a bounded band
    let p = kp(2, 0.5);
    let cfg = QuadConfig::default();
    let mut resid = Vec::new();
    for iu in 0..12 {
        for is in 0..12 {
            let u = 10f64.powf(-2.0 + 3.0 * f64::from(iu) / 11.0);
            let s = 10f64.powf(-1.0 + 2.0 * f64::from(is) / 11.0);
            if u > s {
                continue;
            }
            let g = PairGeometry::from_polar(0.5 * (s + u), 0.5 * (s - u), 0.0);
            let near = potential_kernel_pieces(&p, &g, &cfg).unwrap().near;
            let env = e_envelope(p.sigma - p.half_d() - 1.0, g.u * g.u, g.v * g.v).unwrap();
            resid.push((near.value.log_mag() - env.log_shape(), env.exp_rate));
        }
    }
    let fit = hermite_potential::harness::calibrate::calibrate(
        &resid
            .iter()
            .map(
                |&(y, z)| hermite_potential::harness::calibrate::CalibrationRow {
                    log_ratio: y,
                    rate: z,
                },
            )
            .collect::<Vec<_>>(),
        "near piece",
    )
    .unwrap();
    assert!(
        fit.c.is_finite() && fit.c2 > 0.0 && fit.c2 <= fit.c1,
        "{fit:?}"
    );
}

fn vec_strategy(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heat_kernel_symmetric(t in 0.001f64..20.0, x in vec_strategy(3), y in vec_strategy(3)) {
        let p = kp(3, 1.0);
        let a = heat_kernel_log(t, &PointPair::new(x.clone(), y.clone()).unwrap().geometry(), &p);
        let b = heat_kernel_log(t, &PointPair::new(y, x).unwrap().geometry(), &p);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn kernel_symmetric_and_positive(sigma in 0.1f64..3.0, x in vec_strategy(2), y in vec_strategy(2)) {
        let p = kp(2, sigma);
        let cfg = QuadConfig::default();
        let g = PointPair::new(x.clone(), y.clone()).unwrap().geometry();
        prop_assume!(g.u > 1e-6);
        let a = potential_kernel_quad(&p, &g, &cfg).unwrap().value;
        let b = potential_kernel_quad(&p, &PointPair::new(y, x).unwrap().geometry(), &cfg).unwrap().value;
        prop_assert!(a.sign() > 0);
        prop_assert!((a.log_mag() - b.log_mag()).abs() < 1e-12);
    }

    #[test]
    fn geometry_consistent(x in vec_strategy(4), y in vec_strategy(4)) {
        let g = PointPair::new(x, y).unwrap().geometry();
        let tol = 1e-12 * (g.xnorm + g.ynorm + 1.0);
        prop_assert!((g.xnorm - g.ynorm).abs() <= g.u + tol && g.u <= g.xnorm + g.ynorm + tol);
        prop_assert!((g.xnorm - g.ynorm).abs() <= g.v + tol && g.v <= g.xnorm + g.ynorm + tol);
        // parallelogram law
        let lhs = g.u * g.u + g.v * g.v;
        let rhs = 2.0 * (g.xnorm * g.xnorm + g.ynorm * g.ynorm);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn heat_kernel_never_overflows(t in 1e-12f64..1e6, u in 0.0f64..1e3, v in 0.0f64..1e3) {
        let g = PairGeometry::new(u, v, 0.5 * (u + v), 0.5 * (u + v));
        let k = heat_kernel_log(t, &g, &kp(5, 1.0));
        prop_assert!(!k.is_nan());
        prop_assert!(k.log_mag() < f64::INFINITY);
    }
}
