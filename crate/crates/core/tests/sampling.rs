use fracgibbs_core::experiments::{convergence_study, power_law_data, ConvergenceConfig};
use fracgibbs_core::measures::{sample_gibbs, Ensemble, MeasureConfig, ZeroMode};
use fracgibbs_core::spectral::mass;
use fracgibbs_core::{Gamma, ModelParams};

fn defocusing(n: usize) -> MeasureConfig {
    MeasureConfig::new(ModelParams::new(0.9, Gamma::Defocusing, n, 0.0).unwrap())
}

#[test]
fn gibbs_samples_depend_only_on_seed() {
    let cfg = defocusing(6).with_zero_mode(ZeroMode::GaussianProposal { sigma0: 1.0 });
    let a = sample_gibbs(&cfg, &Ensemble::new(3).with_workers(1), 200).unwrap();
    let b = sample_gibbs(&cfg, &Ensemble::new(3).with_workers(4), 200).unwrap();
    assert_eq!(a.draws, b.draws);
    for (x, y) in a.samples.iter().zip(&b.samples) {
        assert_eq!(x.state, y.state);
    }
    let c = sample_gibbs(&cfg, &Ensemble::new(4), 200).unwrap();
    assert_ne!(a.samples[0].state, c.samples[0].state);
}

#[test]
fn mean_mass_below_gaussian_under_defocusing_weight() {
    // The weight e^{-q/4} favours small states, so E_Gibbs[M] < E_Gauss[M].
    let n = 8;
    let cfg = defocusing(n);
    let set = sample_gibbs(&cfg, &Ensemble::new(1), 4000).unwrap();
    let gibbs = set.samples.iter().map(|s| mass(&s.state)).sum::<f64>() / 4000.0;
    let gaussian: f64 = (1..=n).map(|k| 2.0 / (k as f64).powf(1.8)).sum();
    assert!(gibbs < gaussian, "{gibbs} vs {gaussian}");
    assert!(gibbs > 0.5 * gaussian);
}

#[test]
fn power_law_data_is_nested() {
    let small = power_law_data(8, 0.3, 0.01, 5).unwrap();
    let large = power_law_data(32, 0.3, 0.01, 5).unwrap();
    for n in -8..=8 {
        assert_eq!(small.get(n), large.get(n));
    }
}

#[test]
fn convergence_slope_stable_across_phase_seeds() {
    let params = ModelParams::new(0.9, Gamma::Defocusing, 64, 0.45).unwrap();
    let slopes: Vec<f64> = (0..3)
        .map(|seed| {
            // At t = 0 the error depends only on the moduli, not the phases.
            let cfg = ConvergenceConfig::new(params, 0.1, vec![4, 8, 16], 64, 0.0, seed);
            convergence_study(&cfg, &Ensemble::new(0)).unwrap().slope
        })
        .collect();
    for s in &slopes {
        assert!((s - slopes[0]).abs() < 1e-12, "{slopes:?}");
    }
}
