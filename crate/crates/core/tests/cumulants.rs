use std::collections::BTreeMap;

use proptest::prelude::*;
use randsum::cumulants::{
    analytic_cumulants, bernstein_check, index_cumulant_check, k_statistics, random_sum_cumulants, statulevicius_check,
    CumulantSequence, CumulantSource,
};
use randsum::models::{Cgf, IndexModel, RandomSumSpec, SummandModel};
use randsum::rng::{run_blocks, Sampling};

fn draws<F>(n: u64, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&mut randsum::rng::Stream) -> f64 + Sync + Send,
{
    run_blocks(&Sampling::new(n, seed), |len, rng| (0..len).map(|_| f(rng)).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect()
}

fn assert_agrees(name: &str, xs: &[f64], analytic: &CumulantSequence) {
    let k = k_statistics(xs, 4).unwrap();
    for j in 1..=4 {
        let (got, want) = (k.get(j).unwrap(), analytic.get(j).unwrap());
        let se = k.standard_error(j).unwrap();
        assert!((got - want).abs() <= 5.0 * se, "{name} order {j}: {got} vs {want} (se {se})");
    }
}

#[test]
fn k_statistics_match_analytic_cumulants_for_builtin_models() {
    let n = 1_000_000;
    let summands = [
        SummandModel::standard_gaussian(),
        SummandModel::Gaussian { mean: -1.0, variance: 0.25 },
        SummandModel::Rademacher,
        SummandModel::ShiftedExponential,
    ];
    for (i, m) in summands.into_iter().enumerate() {
        let xs = draws(n, 40 + i as u64, |rng| m.sample(rng));
        assert_agrees(m.name(), &xs, &analytic_cumulants(&m, 4).unwrap());
    }
    for (i, m) in
        [IndexModel::Poisson { lambda: 2.0 }, IndexModel::Poisson { lambda: 80.0 }, IndexModel::Geometric { p: 0.4 }]
            .into_iter()
            .enumerate()
    {
        let xs = draws(n, 50 + i as u64, |rng| m.sample(rng) as f64);
        assert_agrees(m.name(), &xs, &analytic_cumulants(&m, 4).unwrap());
    }
    let spec =
        RandomSumSpec::standardized(SummandModel::Rademacher, IndexModel::Poisson { lambda: 20.0 }, 0.0).unwrap();
    let xs = draws(n, 60, |rng| spec.sample(rng).z);
    assert_agrees("poisson random sum", &xs, &random_sum_cumulants(&spec, 4).unwrap());
}

#[test]
fn statulevicius_constant_grows_like_root_mu() {
    let mus = [1e2, 1e3, 1e4, 1e5];
    let pts: Vec<(f64, f64)> = mus
        .iter()
        .map(|&mu| {
            let spec =
                RandomSumSpec::standardized(SummandModel::standard_gaussian(), IndexModel::Poisson { lambda: mu }, 0.0)
                    .unwrap();
            let seq = random_sum_cumulants(&spec, 8).unwrap();
            (mu.ln(), statulevicius_check(&seq, 0.0, 1.0).fitted_constant.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope =
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope - 0.5).abs() <= 0.05, "slope {slope}");
}

#[test]
fn poisson_index_constant_does_not_depend_on_mean() {
    for lambda in [0.5, 10.0, 1e4] {
        let r = index_cumulant_check(&IndexModel::Poisson { lambda }, 0.5, 8).unwrap();
        assert!(r.pass);
        assert!((r.fitted_constant - 0.5).abs() < 1e-12);
    }
}

fn sequence(values: &[(usize, f64)]) -> CumulantSequence {
    CumulantSequence { values: values.iter().copied().collect(), source: CumulantSource::Analytic }
}

proptest! {
    #[test]
    fn statulevicius_pass_is_monotone_in_delta(
        g3 in -5.0f64..5.0, g4 in -5.0f64..5.0, g5 in -5.0f64..5.0,
        gamma in 0.0f64..1.0, delta in 0.01f64..10.0, shrink in 0.01f64..1.0,
    ) {
        let seq = sequence(&[(3, g3), (4, g4), (5, g5)]);
        if statulevicius_check(&seq, gamma, delta).pass {
            prop_assert!(statulevicius_check(&seq, gamma, delta * shrink).pass);
        }
        let fitted = statulevicius_check(&seq, gamma, 1.0).fitted_constant;
        if fitted.is_finite() {
            prop_assert!(statulevicius_check(&seq, gamma, fitted * (1.0 - 1e-9)).pass);
            prop_assert!(!statulevicius_check(&seq, gamma, fitted * 1.01).pass);
        }
    }

    #[test]
    fn bernstein_constant_scales_with_moments(
        m3 in -3.0f64..3.0, m4 in 0.1f64..30.0, m5 in -50.0f64..50.0, c2 in 0.1f64..3.0, scale in 0.1f64..10.0,
    ) {
        let moments: BTreeMap<usize, f64> = [(3, m3), (4, m4), (5, m5)].into();
        let scaled: BTreeMap<usize, f64> = moments.iter().map(|(&j, &m)| (j, m * scale.powi(j as i32))).collect();
        let k = bernstein_check(&moments, c2, 1.0).fitted_constant;
        let ks = bernstein_check(&scaled, c2 * scale * scale, 1.0).fitted_constant;
        prop_assert!((ks - scale * k).abs() <= 1e-10 * ks.max(1.0));
        prop_assert!(bernstein_check(&moments, c2, k * (1.0 + 1e-9)).pass);
    }
}

#[test]
fn summand_moments_satisfy_bernstein_with_fitted_constant() {
    for m in [SummandModel::standard_gaussian(), SummandModel::Rademacher, SummandModel::ShiftedExponential] {
        let moments: BTreeMap<usize, f64> = (3..=8).map(|j| (j, m.raw_moment(j))).collect();
        let fitted = bernstein_check(&moments, m.variance(), 1.0).fitted_constant;
        assert!(bernstein_check(&moments, m.variance(), fitted * (1.0 + 1e-9)).pass, "{m:?}");
    }
}
