use randsum::models::{IndexModel, MartingaleModel, RandomSumSpec, Scaling, SummandModel};
use randsum::montecarlo::{
    estimate_martingale_tail, estimate_tail_plain, estimate_tail_tilted, solve_tilt, TiltedSampler,
};
use randsum::rng::{run_blocks, Sampling};

fn specs() -> Vec<(RandomSumSpec, f64)> {
    let g = SummandModel::standard_gaussian();
    vec![
        (RandomSumSpec::standardized(g, IndexModel::Poisson { lambda: 50.0 }, 0.25).unwrap(), 1.0),
        (RandomSumSpec::standardized(g, IndexModel::Geometric { p: 0.01 }, 0.25).unwrap(), 1.5),
        (
            RandomSumSpec::standardized(SummandModel::Rademacher, IndexModel::Deterministic { n: 100 }, 0.0).unwrap(),
            2.0,
        ),
        (
            RandomSumSpec::standardized(SummandModel::ShiftedExponential, IndexModel::Poisson { lambda: 20.0 }, 0.0)
                .unwrap(),
            2.5,
        ),
        (
            RandomSumSpec::new(
                SummandModel::Gaussian { mean: 1.0, variance: 2.0 },
                IndexModel::Poisson { lambda: 30.0 },
                0.0,
                Scaling::BlackwellGirshick,
            )
            .unwrap(),
            2.0,
        ),
    ]
}

#[test]
fn plain_and_tilted_estimators_agree() {
    let sampling = Sampling::new(100_000, 21);
    for (spec, t) in specs() {
        let plain = estimate_tail_plain(&spec, t, &sampling).unwrap();
        let tilted = estimate_tail_tilted(&spec, t, &Sampling::new(100_000, 22)).unwrap();
        assert!(plain.p_hat >= 1e-4, "{spec:?}: p too small for the check");
        let se = (plain.std_error.powi(2) + tilted.std_error.powi(2)).sqrt();
        assert!((plain.p_hat - tilted.p_hat).abs() <= 3.0 * se, "{spec:?}: {} vs {}", plain.p_hat, tilted.p_hat);
    }
}

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let base = Sampling::new(200_000, 8);
    for (spec, t) in specs() {
        let one = estimate_tail_tilted(&spec, t, &base.with_threads(1)).unwrap();
        let many = estimate_tail_tilted(&spec, t, &base.with_threads(3)).unwrap();
        assert_eq!(one, many);
        let one = estimate_tail_plain(&spec, t, &base.with_threads(1)).unwrap();
        let many = estimate_tail_plain(&spec, t, &base.with_threads(4)).unwrap();
        assert_eq!(one, many);
    }
    let m = MartingaleModel::new(0.5, 100).unwrap();
    let s = Sampling::new(100_000, 3);
    assert_eq!(
        estimate_martingale_tail(&m, 2.0, 1.0, &s.with_threads(1)).unwrap(),
        estimate_martingale_tail(&m, 2.0, 1.0, &s.with_threads(2)).unwrap()
    );
}

#[test]
fn tilted_weights_have_unit_mean() {
    let n = 200_000u64;
    for (spec, t) in specs() {
        let theta = solve_tilt(&spec, spec.sum_threshold(t)).unwrap().theta;
        let sampler = TiltedSampler::new(&spec, theta).unwrap();
        let sums = run_blocks(&Sampling::new(n, 4), |len, rng| {
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let (_, w) = sampler.draw(rng);
                assert!(w > 0.0);
                s += w;
                s2 += w * w;
            }
            (s, s2)
        });
        let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        let nf = n as f64;
        let mean = s / nf;
        let se = ((s2 / nf - mean * mean) / nf).sqrt();
        assert!((mean - 1.0).abs() <= 3.0 * se, "{spec:?}: mean weight {mean} (se {se})");
    }
}

#[test]
fn tilting_reduces_variance_far_in_the_tail() {
    let g = SummandModel::standard_gaussian();
    let sampling = Sampling::new(100_000, 17);
    for n in [1u64, 25] {
        let spec = RandomSumSpec::standardized(g, IndexModel::Deterministic { n }, 0.0).unwrap();
        for t in [3.0, 3.5] {
            let plain = estimate_tail_plain(&spec, t, &sampling).unwrap();
            let tilted = estimate_tail_tilted(&spec, t, &sampling).unwrap();
            assert!(tilted.std_error < plain.std_error, "n {n}, t {t}");
        }
    }
}

#[test]
fn tilted_gaussian_tail_matches_exact_value() {
    // Deterministic index with Gaussian summands: Z is exactly standard normal.
    let spec = RandomSumSpec::standardized(SummandModel::standard_gaussian(), IndexModel::Deterministic { n: 4 }, 0.0)
        .unwrap();
    let est = estimate_tail_tilted(&spec, 3.0, &Sampling::new(100_000, 2)).unwrap();
    let exact = 0.001_349_898_031_630_093_3;
    assert!((est.p_hat - exact).abs() <= 3.0 * est.std_error, "{} vs {exact}", est.p_hat);
}

/// `P(Bin(n, 1/2) >= k)` by log-space summation.
fn binomial_upper_tail(n: u64, k: u64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let nf = n as f64;
    (k..=n)
        .map(|j| {
            let jf = j as f64;
            (ln_gamma(nf + 1.0) - ln_gamma(jf + 1.0) - ln_gamma(nf - jf + 1.0) - nf * std::f64::consts::LN_2).exp()
        })
        .sum()
}

#[test]
fn tilted_rademacher_tail_matches_exact_binomial_tail() {
    let n = 10_000u64;
    let spec = RandomSumSpec::standardized(SummandModel::Rademacher, IndexModel::Deterministic { n }, 0.15).unwrap();
    for t in [0.5, 1.0] {
        let level = spec.sum_threshold(t);
        // S = 2 * heads - n
        let k = ((n as f64 + level) / 2.0).ceil() as u64;
        let exact = binomial_upper_tail(n, k);
        let est = estimate_tail_tilted(&spec, t, &Sampling::new(100_000, 9)).unwrap();
        assert!((est.p_hat - exact).abs() <= 3.0 * est.std_error, "t {t}: {} vs {exact}", est.p_hat);
    }
}
