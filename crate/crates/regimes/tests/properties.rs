use proptest::prelude::*;
use regimes::*;

fn regimes_at(a: f64, b: f64, xi: f64) -> [GrowthRegime; 6] {
    [
        GrowthRegime::SubcriticalLinear,
        GrowthRegime::CriticalLog { a },
        GrowthRegime::PowerOverLog { a: a.min(0.9 * xi), b, xi },
        GrowthRegime::LogPower { b: b.min(0.9 * xi), xi },
        GrowthRegime::LogLog,
        GrowthRegime::Bounded,
    ]
}

proptest! {
    #[test]
    fn rates_are_positive_and_nondecreasing(
        a in 0.1f64..4.0, b in 0.0f64..4.0, xi in 0.2f64..5.0, n in 3.0f64..1e7, step in 1.0f64..1e3,
    ) {
        for g in regimes_at(a, b, xi) {
            let r1 = g.rate(n).unwrap();
            let r2 = g.rate(n + step).unwrap();
            prop_assert!(r1 > 0.0 && r1.is_finite());
            // The power regime only increases once log n >= b/(xi - a).
            let start = match g {
                GrowthRegime::PowerOverLog { a, b, xi } => (b / (xi - a)).exp(),
                _ => 0.0,
            };
            if g != GrowthRegime::Bounded && n >= start {
                prop_assert!(r2 >= r1 * (1.0 - 1e-12), "{g:?} {n} {r1} {r2}");
            }
        }
    }

    #[test]
    fn classification_is_total(a in 0.01f64..10.0, b in 0.0f64..10.0, p in 0.01f64..0.99, xi in 0.1f64..10.0, ci in 0.0f64..1.0) {
        let c = classify(a, b, p, Some(XiInput { value: xi, ci })).unwrap();
        prop_assert!(c.regime.rate(100.0).is_ok());
        if p > 0.5 {
            prop_assert_eq!(c.near_critical, (a - xi).abs() / xi < NEAR_CRITICAL);
        }
    }

    #[test]
    fn raising_b_at_a_equals_xi_crosses_into_bounded_at_b_equals_a(xi in 0.5f64..5.0, frac in 0.0f64..2.0) {
        let b = frac * xi;
        let c = classify(xi, b, 0.7, Some(XiInput { value: xi, ci: 0.05 * xi })).unwrap();
        let expected = if frac < 1.0 {
            GrowthRegime::LogPower { b, xi }
        } else if frac == 1.0 {
            GrowthRegime::LogLog
        } else {
            GrowthRegime::Bounded
        };
        prop_assert_eq!(c.regime, expected);
    }
}

#[test]
fn power_regime_dips_before_its_minimum() {
    let g = GrowthRegime::PowerOverLog { a: 1.8, b: 3.0, xi: 2.0 };
    // Minimum at n = e^{b/(xi-a)} = e^15.
    assert!(g.rate(4.0).unwrap() < g.rate(3.0).unwrap());
    let m = 15f64.exp();
    assert!(g.rate(m).unwrap() <= g.rate(0.5 * m).unwrap());
    assert!(g.rate(m).unwrap() <= g.rate(2.0 * m).unwrap());
}

#[test]
fn boundary_sequence_in_b() {
    let xi = XiInput { value: 1.5, ci: 0.05 };
    let names: Vec<&str> = [0.0, 0.75, 1.5, 1.5 + 1e-6, 3.0]
        .iter()
        .map(|&b| classify(1.5, b, 0.7, Some(xi)).unwrap().regime.name())
        .collect();
    assert_eq!(names, vec!["LogPower", "LogPower", "LogLog", "Bounded", "Bounded"]);
}

#[test]
fn power_regime_prefactor_mentions_the_gap() {
    let c = classify(1.0, 0.0, 0.7, Some(XiInput::exact(3.9))).unwrap();
    assert!(c.prefactor_band.1.contains("xi - a"));
    assert!(!c.near_critical);
    let close = classify(3.6, 0.0, 0.7, Some(XiInput::exact(3.9))).unwrap();
    assert!(close.near_critical);
    assert!(matches!(close.regime, GrowthRegime::PowerOverLog { .. }));
}
