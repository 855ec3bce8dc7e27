use hermite_potential::kernels::KernelParams;
use hermite_potential::region::{
    ascii_raster, classify, in_region_r, raster, rational_grid, Classification, RationaleTag,
    RegionParams, RegionPoint, Verdict,
};
use hermite_potential::Error;
use proptest::prelude::*;

fn params(d: u32, sigma: f64) -> RegionParams {
    RegionParams::from_kernel(&KernelParams::new(d, sigma).unwrap()).unwrap()
}

fn pt(a: i64, b: i64, c: i64, e: i64) -> RegionPoint {
    RegionPoint::from_fractions(a, b, c, e).unwrap()
}

fn rank(v: Verdict) -> u8 {
    match v {
        Verdict::No => 0,
        Verdict::Open => 1,
        Verdict::Yes => 2,
    }
}

/// Independent membership test on a grid with spacing 1/n and `2σ/d = an/ad`:
/// everything is scaled to integers over `n·ad`.
fn oracle_in_region(i: i64, j: i64, n: i64, an: i64, ad: i64) -> bool {
    let (x, y, a, one) = (i * ad, j * ad, an * n, n * ad);
    let lower = (x - a).max(0);
    let upper = (x + a).min(one);
    if y < lower || y > upper {
        return false;
    }
    if y == x + a && x <= one - a {
        return false;
    }
    if (x == a && y == 0) || (x == one && y == one - a) {
        return false;
    }
    true
}

#[test]
fn in_region_examples() {
    let p = params(4, 1.0);
    assert!(in_region_r(&p, &pt(1, 2, 1, 2)).unwrap());
    assert!(!in_region_r(&p, &pt(1, 1, 1, 2)).unwrap());
    assert!(!in_region_r(&p, &pt(1, 4, 3, 4)).unwrap());
}

#[test]
fn in_region_rejects_non_subcritical() {
    for (d, s) in [(2, 1.0), (2, 3.0)] {
        assert!(matches!(
            in_region_r(&params(d, s), &pt(1, 2, 1, 2)),
            Err(Error::Regime(_))
        ));
    }
}

#[test]
fn classification_examples() {
    let c = classify(&params(4, 1.0), &pt(1, 1, 1, 2));
    assert_eq!((c.strong, c.weak), (Verdict::No, Verdict::Yes));

    let c = classify(&params(4, 1.0), &pt(1, 2, 0, 1));
    assert_eq!((c.restricted_weak, c.weak), (Verdict::Yes, Verdict::No));

    let c = classify(&params(4, 1.0), &pt(9, 10, 1, 10));
    assert_eq!(
        (c.strong, c.weak, c.restricted_weak),
        (Verdict::No, Verdict::No, Verdict::No)
    );

    let c = classify(&params(2, 1.0), &pt(0, 1, 1, 1));
    assert_eq!((c.strong, c.weak), (Verdict::No, Verdict::Yes));

    let c = classify(&params(2, 3.0), &pt(1, 1, 1, 1));
    assert_eq!(c.strong, Verdict::Yes);
}

#[test]
fn segment_and_corners_are_tagged() {
    let p = params(4, 1.0);
    let tag = |a, b, c, e| classify(&p, &pt(a, b, c, e)).rationale_tag;
    assert_eq!(tag(1, 4, 3, 4), RationaleTag::OpenSegment);
    assert_eq!(tag(0, 1, 1, 2), RationaleTag::WeakCornerLInfinity);
    assert_eq!(tag(1, 2, 1, 1), RationaleTag::OpenSegmentEndpoint);
    assert_eq!(tag(1, 1, 1, 2), RationaleTag::WeakCornerL1);
    assert_eq!(tag(1, 2, 0, 1), RationaleTag::RestrictedWeakCorner);
    assert_eq!(tag(1, 2, 1, 2), RationaleTag::InRegion);

    let open = classify(&p, &pt(1, 4, 3, 4));
    assert_eq!(
        (open.strong, open.weak, open.restricted_weak),
        (Verdict::No, Verdict::Open, Verdict::Open)
    );
}

#[test]
fn critical_exceptions() {
    let p = params(2, 1.0);
    let c = classify(&p, &pt(1, 1, 0, 1));
    assert_eq!(c.rationale_tag, RationaleTag::CriticalFailsOneInfinity);
    assert_eq!(c.restricted_weak, Verdict::No);
    for (a, b, x, y) in [(1, 2, 1, 2), (1, 1, 1, 1), (0, 1, 0, 1), (1, 3, 0, 1)] {
        let c = classify(&p, &pt(a, b, x, y));
        assert_eq!(c.strong, Verdict::Yes);
        assert_eq!(c.rationale_tag, RationaleTag::CriticalBounded);
    }
}

fn grid_cases() -> [(u32, f64); 3] {
    [(4, 1.0), (3, 1.0), (1, 0.3)]
}

fn check_chain(c: &Classification) {
    assert!(
        rank(c.strong) <= rank(c.weak) && rank(c.weak) <= rank(c.restricted_weak),
        "{c:?}"
    );
    if c.strong == Verdict::Yes {
        assert_eq!(c.weak, Verdict::Yes);
    }
    if c.weak == Verdict::Yes {
        assert_eq!(c.restricted_weak, Verdict::Yes);
    }
}

#[test]
fn invariants_on_grids() {
    for n in [200usize, 201] {
        for (d, s) in grid_cases() {
            let p = params(d, s);
            assert!(p.is_exact());
            for (q, c) in raster(&p, n).unwrap() {
                check_chain(&c);
                if q.iq == 0.into() {
                    assert_eq!(c.weak, c.strong, "{q:?}");
                }
                assert_eq!(c.strong, classify(&p, &q.dual()).strong, "{q:?}");
                assert!(!c.near_boundary);
            }
        }
    }
}

#[test]
fn strong_type_matches_integer_oracle() {
    // 2σ/d for the three cases: 1/2, 2/3, 3/5
    for ((d, s), (an, ad)) in grid_cases().into_iter().zip([(1, 2), (2, 3), (3, 5)]) {
        let p = params(d, s);
        for n in [200i64, 201, 30] {
            let den = n - 1;
            for (k, q) in rational_grid(n as usize).unwrap().into_iter().enumerate() {
                let (i, j) = (k as i64 / n, k as i64 % n);
                let expect = oracle_in_region(i, j, den, an, ad);
                assert_eq!(
                    in_region_r(&p, &q).unwrap(),
                    expect,
                    "d={d} σ={s} ({i},{j})/{den}"
                );
                assert_eq!(classify(&p, &q).strong == Verdict::Yes, expect);
            }
        }
    }
}

#[test]
fn raster_is_a_clipped_band() {
    let text = ascii_raster(&params(4, 1.0), 9).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 9);
    // top row is iq = 1: bounded for ip in (1/2, 1], open at the segment end
    assert_eq!(rows[0], "....o####");
    // bottom row is iq = 0: bounded for ip in [0, 1/2), restricted weak at 1/2
    assert_eq!(rows[8], "####r....");
    // middle row iq = 1/2: the L∞ corner on the left, the L1 corner on the right
    assert_eq!(rows[4], "w#######w");
}

#[test]
fn supercritical_is_bounded_everywhere() {
    let p = params(2, 3.0);
    for (_, c) in raster(&p, 21).unwrap() {
        assert_eq!(c.rationale_tag, RationaleTag::Supercritical);
        assert_eq!(c.strong, Verdict::Yes);
    }
}

proptest! {
    #[test]
    fn float_sigma_agrees_with_exact_off_the_lines(
        i in 0i64..=40, j in 0i64..=40, s_num in 1i64..20, d in 1u32..5,
    ) {
        let exact = RegionParams::exact(d, s_num, 10).unwrap();
        let sigma = s_num as f64 / 10.0 + 1e-9;
        let float = params(d, sigma);
        prop_assume!(!float.is_exact());
        let q = pt(i, 40, j, 40);
        let a = classify(&exact, &q);
        let b = classify(&float, &q);
        check_chain(&b);
        if a.rationale_tag == RationaleTag::InRegion && b.rationale_tag == RationaleTag::InRegion {
            prop_assert_eq!(a.strong, b.strong);
        }
        if q.iq == 0.into() {
            prop_assert_eq!(b.weak, b.strong);
        }
    }
}
