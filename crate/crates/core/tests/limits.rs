use cardguess::limits::{
    convergence_distance, correlation_analysis, correlation_coefficient, joint_product_distance, kappa, limit_law,
    min_correlation, scaled_exact_cdf, JointLimitLaw, LimitLaw, RegimeSpec,
};
use cardguess::simulate::stream_rng;
use cardguess::DeckComposition;
use rand_core::RngCore;

fn deck(m1: u32, m2: u32) -> DeckComposition {
    DeckComposition::new(m1, m2).unwrap()
}

/// Central second difference with one Richardson step.
fn second_difference(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = |h: f64| (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn first_difference(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

#[test]
fn mgf_derivatives_reproduce_closed_form_moments() {
    let h = 1e-3;
    for rho in [0.1, 0.3, 0.5, 0.9] {
        let law = JointLimitLaw::new(rho).unwrap();
        let report = correlation_analysis(rho).unwrap();
        let mgf = |s: f64, t: f64| law.mgf(s, t).unwrap();
        let checks = [
            (first_difference(|s| mgf(s, 0.0), h), report.mean_x),
            (first_difference(|t| mgf(0.0, t), h), report.mean_y),
            (second_difference(|s| mgf(s, 0.0), h), report.second_x),
            (second_difference(|t| mgf(0.0, t), h), report.second_y),
            (
                {
                    let d = |h: f64| (mgf(h, h) - mgf(h, -h) - mgf(-h, h) + mgf(-h, -h)) / (4.0 * h * h);
                    (4.0 * d(h / 2.0) - d(h)) / 3.0
                },
                report.mixed,
            ),
        ];
        for (numeric, closed) in checks {
            assert!(((numeric - closed) / closed).abs() < 1e-6, "rho = {rho}: {numeric} vs {closed}");
        }
    }
}

#[test]
fn correlation_curve_shape() {
    let points: Vec<(f64, f64)> = (1..100).map(|i| {
        let rho = f64::from(i) / 100.0;
        (rho, correlation_coefficient(rho).unwrap())
    }).collect();
    assert!(points.iter().all(|(_, c)| *c < 0.0));
    assert!(correlation_coefficient(1e-9).unwrap().abs() < 1e-4);
    assert!(correlation_coefficient(1.0 - 1e-9).unwrap().abs() < 1e-8);
    // Decreasing, then increasing, with the turn at the root of kappa.
    let min = min_correlation().unwrap();
    for w in points.windows(2) {
        if w[1].0 <= min.rho {
            assert!(w[1].1 < w[0].1, "{w:?}");
        } else if w[0].0 >= min.rho {
            assert!(w[1].1 > w[0].1, "{w:?}");
        }
    }
    assert!(kappa(0.2) > 0.0 && kappa(0.3) < 0.0);
}

#[test]
fn covariance_is_minus_two() {
    for rho in [0.1, 0.5, 0.9] {
        let report = correlation_analysis(rho).unwrap();
        assert_eq!(report.covariance, -2.0);
        assert!(report.max_summation_gap < 1e-8);
    }
}

/// Samples `(-lambda + sqrt(lambda^2 + 2 mu Z)) / mu` with `mu = nu` and
/// checks them against the linear-exponential law with parameters `(lambda, nu)`.
#[test]
fn linear_exponential_sampling_representation() {
    let (lambda, nu) = (0.75, 0.5);
    let n = 100_000;
    let mut rng = stream_rng(77, 3);
    let mut samples: Vec<f64> = (0..n)
        .map(|_| {
            let u = ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
            LimitLaw::linexp_from_exponential(lambda, nu, -u.ln())
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    let law = LimitLaw::LinearExponential { lambda, nu };
    let ks = samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = law.cdf(x);
            (f - i as f64 / n as f64).abs().max((f - (i + 1) as f64 / n as f64).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 1.95 / (n as f64).sqrt(), "KS = {ks}");
    let mean = samples.iter().sum::<f64>() / n as f64;
    assert!((mean - law.mean()).abs() < 0.01, "{mean} vs {}", law.mean());
}

#[test]
fn rayleigh_case_on_balanced_decks() {
    let regime = RegimeSpec::WNearDiagonalSmallD;
    let distances: Vec<f64> = [25, 100, 400].iter().map(|&m| convergence_distance(&deck(m, m), &regime).unwrap()).collect();
    assert!(distances.windows(2).all(|w| w[1] < w[0]), "{distances:?}");
    // P{W / sqrt(m) <= 1} approaches 1 - exp(-1/4).
    let exact = scaled_exact_cdf(&deck(400, 400), &regime, 1.0).unwrap();
    let limit = limit_law(&regime).unwrap().cdf(1.0);
    assert!((exact - limit).abs() < 0.03, "{exact} vs {limit}");
}

#[test]
fn product_distances_decrease() {
    for (regime, make) in [
        (RegimeSpec::TFixedM2 { m2: 2 }, (|m| (m, 2)) as fn(u32) -> (u32, u32)),
        (RegimeSpec::WNearDiagonalSmallD, |m| (m, m)),
    ] {
        let distances: Vec<f64> = [50, 200, 800]
            .iter()
            .map(|&m| {
                let (a, b) = make(m);
                joint_product_distance(&deck(a, b), &regime).unwrap()
            })
            .collect();
        assert!(distances.windows(2).all(|w| w[1] < w[0]), "{regime}: {distances:?}");
    }
}

#[test]
fn inconsistent_regimes_are_refused() {
    assert!(convergence_distance(&deck(100, 10), &RegimeSpec::WLinear { rho: 0.5 }).is_err());
    assert!(convergence_distance(&deck(100, 100), &RegimeSpec::TSublinear).is_err());
    assert!(joint_product_distance(&deck(100, 50), &RegimeSpec::JointCentral { rho: 0.5 }).is_err());
    assert!(limit_law(&RegimeSpec::WNearDiagonalAlpha { alpha: 0.0 }).is_err());
}
