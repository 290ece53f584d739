//! Rician sampler against the analytic envelope distribution.

use mmrelay_core::radio::FadingModel;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Kolmogorov-Smirnov statistic of `samples` against `model`'s density,
/// integrating the density between consecutive order statistics.
fn ks_statistic(model: &FadingModel, mut samples: Vec<f64>) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut cdf = 0.0;
    let mut prev = 0.0;
    let mut stat = 0.0f64;
    for (k, &x) in samples.iter().enumerate() {
        let h = x - prev;
        let mid = 0.5 * (x + prev);
        cdf += h / 6.0 * (model.pdf(prev) + 4.0 * model.pdf(mid) + model.pdf(x));
        prev = x;
        stat = stat.max((cdf - k as f64 / n).abs()).max((k as f64 + 1.0) / n - cdf);
    }
    stat
}

fn check(model: FadingModel, seed: u64) {
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..n).map(|_| model.sample(&mut rng)).collect();
    let m2 = samples.iter().map(|r| r * r).sum::<f64>() / n as f64;
    assert!((m2 / model.mean_power() - 1.0).abs() <= 0.02, "second moment {m2}");
    let d = ks_statistic(&model, samples);
    // asymptotic critical value at the 1% level
    let crit = 1.628 / (n as f64).sqrt();
    assert!(d <= crit, "KS statistic {d} above {crit}");
}

#[test]
fn rician_k10_passes_ks() {
    check(FadingModel::from_k_factor(10.0, 1.0).unwrap(), 21);
}

#[test]
fn rician_k0_and_rayleigh_pass_ks() {
    check(FadingModel::from_k_factor(0.0, 1.0).unwrap(), 22);
    check(FadingModel::new(0.0, 0.7).unwrap(), 23);
}

#[test]
fn ks_rejects_wrong_model() {
    let truth = FadingModel::from_k_factor(10.0, 1.0).unwrap();
    let wrong = FadingModel::from_k_factor(3.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let samples: Vec<f64> = (0..100_000).map(|_| truth.sample(&mut rng)).collect();
    assert!(ks_statistic(&wrong, samples) > 1.628 / 100_000f64.sqrt());
}
