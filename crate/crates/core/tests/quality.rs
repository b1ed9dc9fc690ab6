mod common;

use common::test_data;
use ogop_sim::quality::{
    bd_rate, bd_rate_component, transition_profile, yuv_psnr, BdRateTable, Component, Direction,
    Pchip, RdCurve, RdPoint, TransitionParams,
};
use ogop_sim::Error;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};
use serde::Deserialize;

#[derive(Deserialize)]
struct Oracle {
    cases: Vec<OracleCase>,
}

#[derive(Deserialize)]
struct OracleCase {
    anchor: Vec<RdPoint>,
    test: Vec<RdPoint>,
    bd_rate_percent: std::collections::BTreeMap<Component, f64>,
}

#[test]
fn matches_reference_oracle() {
    let text = std::fs::read_to_string(test_data("bdrate_oracle.json")).unwrap();
    let oracle: Oracle = serde_json::from_str(&text).unwrap();
    assert_eq!(oracle.cases.len(), 100);
    let mut worst: f64 = 0.0;
    for (i, c) in oracle.cases.into_iter().enumerate() {
        let a = RdCurve::new(c.anchor).unwrap();
        let t = RdCurve::new(c.test).unwrap();
        let table = BdRateTable::compute(format!("case {i}"), &a, &t).unwrap();
        for (comp, want) in c.bd_rate_percent {
            let got = table.get(comp).unwrap();
            worst = worst.max((got - want).abs());
            assert!((got - want).abs() < 0.5, "case {i} {comp}: {got} vs {want}");
        }
    }
    // The oracle integrates the same interpolant densely, so agreement is
    // far tighter than the tolerance.
    assert!(worst < 1e-3, "worst deviation {worst}");
}

/// Dense trapezoid over the interpolant, independent of the exact integral.
fn trapezoid_bd(a: &RdCurve, t: &RdCurve) -> f64 {
    let knots = |c: &RdCurve| -> (Vec<f64>, Vec<f64>) {
        c.points()
            .iter()
            .map(|p| (p.yuv(), p.rate_kbps.log10()))
            .unzip()
    };
    let (qa, ra) = knots(a);
    let (qt, rt) = knots(t);
    let lo = qa[0].max(qt[0]);
    let hi = qa[qa.len() - 1].min(qt[qt.len() - 1]);
    let (pa, pt) = (Pchip::new(&qa, &ra).unwrap(), Pchip::new(&qt, &rt).unwrap());
    let n = 20_000;
    let step = (hi - lo) / n as f64;
    let mut area = 0.0;
    for i in 0..=n {
        let x = lo + step * i as f64;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        area += w * (pt.eval(x) - pa.eval(x));
    }
    100.0 * (10f64.powf(area * step / (hi - lo)) - 1.0)
}

fn random_curve(rng: &mut StdRng) -> RdCurve {
    let n = rng.gen_range(4..=6);
    let mut rate: f64 = rng.gen_range(200.0..2000.0);
    let mut y: f64 = rng.gen_range(28.0..34.0);
    let pts = (0..n)
        .map(|_| {
            rate *= rng.gen_range(1.3..2.2);
            y += rng.gen_range(0.4..2.5);
            RdPoint::new(rate, y, y + 3.0, y + 3.5)
        })
        .collect();
    RdCurve::new(pts).unwrap()
}

#[test]
fn matches_dense_trapezoid_on_random_curves() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut done = 0;
    while done < 100 {
        let (a, t) = (random_curve(&mut rng), random_curve(&mut rng));
        match bd_rate(&a, &t) {
            Ok(bd) => {
                let want = trapezoid_bd(&a, &t);
                assert!((bd - want).abs() < 0.5, "{bd} vs {want}");
                assert!((bd - want).abs() < 1e-4, "{bd} vs {want}");
                done += 1;
            }
            Err(Error::NoOverlap { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn no_overlap_is_typed() {
    let lo = build(
        &[(100.0, 30.0), (200.0, 31.0), (400.0, 32.0), (800.0, 33.0)],
        1.0,
    );
    let hi = build(
        &[(100.0, 40.0), (200.0, 41.0), (400.0, 42.0), (800.0, 43.0)],
        1.0,
    );
    let e = bd_rate(&lo, &hi).unwrap_err();
    assert!(matches!(e, Error::NoOverlap { .. }));
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn weighting() {
    assert!((yuv_psnr(40.0, 46.0, 46.0) - 41.5).abs() < 1e-12);
}

#[test]
fn calibrated_transition_means() {
    let p = TransitionParams::default();
    let (high, low) = (41.0, 36.0);
    let up = transition_profile(Direction::Up, high, low, 31, &p).unwrap();
    assert!(!up.clamped);
    assert!((up.mean().unwrap() - (high - 1.77)).abs() < 1e-9);
    let down = transition_profile(Direction::Down, high, low, 31, &p).unwrap();
    assert!(!down.clamped);
    assert!((down.mean().unwrap() - (high - 3.72)).abs() < 1e-9);
    assert!((down.values[0] - (high - 2.92)).abs() < 1e-9);
}

fn curve_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((1.2f64..2.5, 0.3f64..2.5), 4..=6).prop_map(|steps| {
        let (mut r, mut q) = (500.0, 30.0);
        steps
            .into_iter()
            .map(|(dr, dq)| {
                r *= dr;
                q += dq;
                (r, q)
            })
            .collect()
    })
}

fn build(points: &[(f64, f64)], rate_scale: f64) -> RdCurve {
    RdCurve::new(
        points
            .iter()
            .map(|&(r, q)| RdPoint::new(r * rate_scale, q, q + 2.0, q + 2.5))
            .collect(),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn uniform_rate_scaling_is_exact(points in curve_strategy(), scale in 0.5f64..2.0) {
        let a = build(&points, 1.0);
        let t = build(&points, scale);
        for c in Component::ALL {
            let bd = bd_rate_component(&a, &t, c).unwrap();
            prop_assert!((bd - 100.0 * (scale - 1.0)).abs() < 1e-6, "{} {}", c, bd);
        }
    }

    #[test]
    fn antisymmetric_over_shared_range(points in curve_strategy(), other in curve_strategy()) {
        // Same quality knots, different rates: both directions integrate
        // over the identical range.
        let a = build(&points, 1.0);
        let t = RdCurve::new(
            points.iter().zip(&other).map(|(&(r, q), &(r2, _))| RdPoint::new(r * r2 / 500.0, q, q + 2.0, q + 2.5)).collect(),
        );
        if let Ok(t) = t {
            let ab = bd_rate(&a, &t).unwrap() / 100.0;
            let ba = bd_rate(&t, &a).unwrap() / 100.0;
            prop_assert!(((1.0 + ab) * (1.0 + ba) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn identical_curves_give_zero(points in curve_strategy()) {
        let a = build(&points, 1.0);
        prop_assert!(bd_rate(&a, &a).unwrap().abs() < 1e-12);
    }

    #[test]
    fn transition_stays_within_levels(low in 30.0f64..40.0, gap in 0.0f64..8.0, n in 1usize..64) {
        let p = TransitionParams::default();
        for dir in [Direction::Up, Direction::Down] {
            let prof = transition_profile(dir, low + gap, low, n, &p).unwrap();
            prop_assert_eq!(prof.values.len(), n);
            prop_assert!(prof.values.iter().all(|&v| v >= low - 1e-9 && v <= low + gap + 1e-9));
        }
    }
}
