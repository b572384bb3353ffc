use num_complex::Complex64;

use super::*;
use crate::params::Gamma;
use crate::spectral::{hamiltonian, mass, sobolev_norm};
use crate::test_util::random_state;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn params(alpha: f64, gamma: Gamma, n: usize) -> ModelParams {
    ModelParams::new(alpha, gamma, n, 0.2).unwrap()
}

/// `a e^{i(|n|^{2 alpha} - gamma |a|^2) t}`
fn plane_wave_exact(n: i64, a: Complex64, p: &ModelParams, t: f64) -> SpectralState {
    let omega = crate::spectral::fractional_symbol(n, p.alpha) - p.gamma.sign() * a.norm_sqr();
    SpectralState::plane_wave(p.n_modes, n, a * Complex64::from_polar(1.0, omega * t)).unwrap()
}

#[test]
fn linear_flow_examples() {
    let u = random_state(6, 0.0, 1.0, 1);
    assert_eq!(linear_flow(&u, 0.0, 0.75), u);

    let wave = SpectralState::plane_wave(3, 2, c(1.0, 0.0)).unwrap();
    let out = linear_flow(&wave, 1.0, 0.75);
    assert!((out.get(2) - Complex64::from_polar(1.0, 2f64.powf(1.5))).norm() < 1e-15);
    assert!((out.get(2).arg() - 2.82843).abs() < 1e-5);

    let out = linear_flow(&u, 3.7, 0.6);
    assert_eq!(out.get(0), u.get(0));
    assert!((mass(&out) - mass(&u)).abs() < 1e-14);
    for sigma in [-0.5, 0.3, 1.0] {
        assert!((sobolev_norm(&out, sigma) - sobolev_norm(&u, sigma)).abs() < 1e-13);
    }
}

#[test]
fn cubic_term_examples() {
    let z = c(0.7, -1.3);
    let out = cubic_term(&SpectralState::plane_wave(3, 0, z).unwrap());
    assert!((out.get(0) - z * z.norm_sqr()).norm() < 1e-14);
    assert!(out.modes().filter(|(n, _)| *n != 0).all(|(_, v)| v.norm() < 1e-14));

    let out = cubic_term(&SpectralState::plane_wave(3, 1, c(1.0, 0.0)).unwrap());
    assert!((out.get(1) - c(1.0, 0.0)).norm() < 1e-14);

    // |a e^{ix} + b e^{-ix}|^2 (a e^{ix} + b e^{-ix}), modes +-3 dropped.
    let (a, b) = (c(0.4, 1.1), c(-0.9, 0.25));
    let mut s = SpectralState::zeros(1);
    s.set(1, a).unwrap();
    s.set(-1, b).unwrap();
    let out = cubic_term(&s);
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    assert!((out.get(1) - a * (na + 2.0 * nb)).norm() < 1e-14);
    assert!((out.get(-1) - b * (2.0 * na + nb)).norm() < 1e-14);
    assert!(out.get(0).norm() < 1e-14);
}

#[test]
fn cubic_term_matches_direct_convolution() {
    let u = random_state(5, 0.0, 2.0, 9);
    let out = cubic_term(&u);
    let big_n = 5i64;
    for n in -big_n..=big_n {
        let mut direct = c(0.0, 0.0);
        for n1 in -big_n..=big_n {
            for n2 in -big_n..=big_n {
                let n3 = n - n1 + n2;
                if n3.abs() <= big_n {
                    direct += u.get(n1) * u.get(n2).conj() * u.get(n3);
                }
            }
        }
        assert!((out.get(n) - direct).norm() < 1e-12);
    }
}

#[test]
fn rhs_examples() {
    let p = params(0.75, Gamma::Defocusing, 3);
    let zero = rhs(&SpectralState::zeros(3), &p).unwrap();
    assert!(zero.coeffs().iter().all(|v| *v == c(0.0, 0.0)));

    let a = c(0.6, -0.2);
    let out = rhs(&SpectralState::plane_wave(3, 1, a).unwrap(), &p).unwrap();
    let expected = c(0.0, 1.0) * (1.0 + a.norm_sqr()) * a;
    assert!((out.get(1) - expected).norm() < 1e-14);

    assert!(rhs(&SpectralState::zeros(2), &p).is_err());
}

/// The vector field is tangent to the level sets of H_N and of the mass.
#[test]
fn vector_field_conserves_hamiltonian_and_mass() {
    for gamma in [Gamma::Defocusing, Gamma::Focusing] {
        let p = params(0.8, gamma, 6);
        let u = random_state(6, 0.0, 1.5, 4);
        let f = rhs(&u, &p).unwrap();
        let eps = 1e-5;
        let shifted = |e: f64| {
            let coeffs = u.coeffs().iter().zip(f.coeffs()).map(|(x, y)| x + y * e).collect();
            SpectralState::from_coeffs(6, coeffs).unwrap()
        };
        let dh = (hamiltonian(&shifted(eps), &p).unwrap() - hamiltonian(&shifted(-eps), &p).unwrap())
            / (2.0 * eps);
        let dm = (mass(&shifted(eps)) - mass(&shifted(-eps))) / (2.0 * eps);
        let scale = f.coeffs().iter().map(|v| v.norm()).sum::<f64>();
        assert!(dh.abs() < 1e-8 * scale, "dH/dt = {dh}");
        assert!(dm.abs() < 1e-9 * scale, "dM/dt = {dm}");
    }
}

#[test]
fn steps_are_consistent_with_rhs() {
    let p = params(0.75, Gamma::Focusing, 8);
    let u = random_state(8, 0.2, 0.8, 2);
    let f = rhs(&u, &p).unwrap();
    for scheme in [Scheme::Strang, Scheme::Rk4] {
        let err = |h: f64| {
            let next = match scheme {
                Scheme::Strang => step_strang(&u, &p, h).unwrap(),
                _ => step_rk4(&u, &p, h).unwrap(),
            };
            next.coeffs()
                .iter()
                .zip(u.coeffs())
                .zip(f.coeffs())
                .map(|((a, b), d)| ((a - b) / h - d).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let (e1, e2) = (err(1e-3), err(1e-4));
        assert!(e2 < 2e-3 * f.coeffs().iter().map(|v| v.norm()).sum::<f64>());
        // O(h): shrinking h by 10 shrinks the defect by ~10.
        assert!((e1 / e2 - 10.0).abs() < 2.0, "{scheme}: ratio {}", e1 / e2);
    }
}

#[test]
fn strang_plane_wave_is_exact() {
    for gamma in [Gamma::Defocusing, Gamma::Focusing] {
        let p = params(0.75, gamma, 4);
        let a = c(0.8, 0.6);
        let u = SpectralState::plane_wave(4, 3, a).unwrap();
        let dt = 1e-3;
        let out = step_strang(&u, &p, dt).unwrap();
        let exact = plane_wave_exact(3, a, &p, dt);
        assert!(out.l2_distance(&exact).unwrap() < 1e-15);
    }
}

#[test]
fn strang_is_reversible() {
    let p = params(0.75, Gamma::Defocusing, 8);
    let u = random_state(8, 0.2, 1.0, 11);
    let fwd = step_strang(&u, &p, 1e-2).unwrap();
    let back = step_strang(&fwd, &p, -1e-2).unwrap();
    assert!(back.l2_distance(&u).unwrap() < 1e-10);
}

#[test]
fn rk4_plane_wave_one_step() {
    let p = params(0.75, Gamma::Defocusing, 4);
    let u = SpectralState::plane_wave(4, 1, c(1.0, 0.0)).unwrap();
    let out = step_rk4(&u, &p, 1e-3).unwrap();
    assert!(out.l2_distance(&plane_wave_exact(1, c(1.0, 0.0), &p, 1e-3)).unwrap() < 1e-12);
}

#[test]
fn rk4_is_fourth_order() {
    let p = params(0.75, Gamma::Defocusing, 4);
    let a = c(1.0, 0.0);
    let u = SpectralState::plane_wave(4, 1, a).unwrap();
    // One period of the phase 1 + |a|^2 = 2.
    let period = std::f64::consts::PI;
    let err = |dt: f64| {
        let cfg = IntegratorConfig::new(Scheme::Rk4, dt).record_every(usize::MAX);
        let (out, _) = evolve(&u, &p, &cfg, period).unwrap();
        out.l2_distance(&plane_wave_exact(1, a, &p, period)).unwrap()
    };
    let ratio = err(period / 100.0) / err(period / 200.0);
    assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
}

#[test]
fn rk4_agrees_with_strang() {
    let p = params(0.75, Gamma::Defocusing, 16);
    let u = random_state(16, 0.2, 0.5, 21);
    let run = |scheme| {
        let cfg = IntegratorConfig::new(scheme, 1e-4).record_every(usize::MAX);
        evolve(&u, &p, &cfg, 0.1).unwrap().0
    };
    let d = run(Scheme::Strang).l2_distance(&run(Scheme::Rk4)).unwrap();
    assert!(d < 1e-8, "distance {d}");
}

#[test]
fn picard_examples() {
    let p = params(0.75, Gamma::Focusing, 8);
    let cfg = PicardConfig::default();
    let zero = picard_solve(&SpectralState::zeros(8), &p, 0.1, &cfg).unwrap();
    assert!(zero.state.coeffs().iter().all(|v| v.norm() == 0.0));

    let a = c(0.5, 0.5);
    let u = SpectralState::plane_wave(8, -2, a).unwrap();
    let sol = picard_solve(&u, &p, 0.1, &cfg).unwrap();
    assert!(sol.increment < 1e-12);
    assert!(sol.state.l2_distance(&plane_wave_exact(-2, a, &p, 0.1)).unwrap() < 1e-10);
}

#[test]
fn picard_matches_rk4() {
    let p = params(0.75, Gamma::Defocusing, 8);
    let u = random_state(8, 0.2, 0.5, 5);
    let sol = picard_solve(&u, &p, 0.1, &PicardConfig::default()).unwrap();
    let cfg = IntegratorConfig::new(Scheme::Rk4, 1e-4).record_every(usize::MAX);
    let (rk, _) = evolve(&u, &p, &cfg, 0.1).unwrap();
    assert!(sol.state.l2_distance(&rk).unwrap() < 1e-6);
}

#[test]
fn picard_reports_non_contraction() {
    let p = params(0.75, Gamma::Focusing, 8);
    let u = random_state(8, 0.0, 30.0, 5);
    let cfg = PicardConfig {
        iterations: 40,
        nodes: 50,
        tolerance: 1e-14,
    };
    assert!(matches!(
        picard_solve(&u, &p, 5.0, &cfg),
        Err(Error::NotContracting { .. }) | Err(Error::NumericalAbort { .. })
    ));
}

#[test]
fn evolve_zero_time_is_identity() {
    let p = params(0.75, Gamma::Defocusing, 4);
    let u = random_state(4, 0.0, 1.0, 3);
    for scheme in [Scheme::Strang, Scheme::Rk4, Scheme::Picard] {
        let (out, log) = evolve(&u, &p, &IntegratorConfig::new(scheme, 1e-3), 0.0).unwrap();
        assert_eq!(out, u);
        assert_eq!(log.rows.len(), 1);
        assert_eq!(log.rows[0].t, 0.0);
    }
}

#[test]
fn evolve_logs_on_schedule() {
    let p = params(0.75, Gamma::Defocusing, 4);
    let u = random_state(4, 0.0, 1.0, 3);
    let cfg = IntegratorConfig::new(Scheme::Strang, 0.01)
        .record_every(3)
        .log_sigmas(vec![0.1, 0.2]);
    let (_, log) = evolve(&u, &p, &cfg, 0.105).unwrap();
    // 11 steps (the last one shortened to 0.005): rows at 0, 3, 6, 9 steps and T.
    let ts: Vec<f64> = log.rows.iter().map(|r| r.t).collect();
    assert_eq!(ts.len(), 5);
    assert!(ts.windows(2).all(|w| w[1] > w[0]));
    assert!((ts[1] - 0.03).abs() < 1e-15);
    assert_eq!(*ts.last().unwrap(), 0.105);
    assert_eq!(log.rows[0].h_norms.len(), 2);
}

#[test]
fn plane_wave_long_time_both_schemes() {
    let p = params(0.75, Gamma::Defocusing, 4);
    let a = c(0.7, 0.0);
    let u = SpectralState::plane_wave(4, 2, a).unwrap();
    for scheme in [Scheme::Strang, Scheme::Rk4] {
        let cfg = IntegratorConfig::new(scheme, 1e-4).record_every(usize::MAX);
        let (out, _) = evolve(&u, &p, &cfg, 1.0).unwrap();
        assert!(out.l2_distance(&plane_wave_exact(2, a, &p, 1.0)).unwrap() < 1e-8);
    }
}

#[test]
fn strang_time_reversal() {
    let p = params(0.75, Gamma::Focusing, 8);
    let u = random_state(8, 0.2, 1.0, 8);
    let cfg = IntegratorConfig::new(Scheme::Strang, 1e-3).record_every(usize::MAX);
    let (fwd, _) = evolve(&u, &p, &cfg, 1.0).unwrap();
    let (back, _) = evolve(&fwd, &p, &cfg, -1.0).unwrap();
    assert!(back.l2_distance(&u).unwrap() < 1e-9);
}

#[test]
fn gauge_covariance() {
    let p = params(0.9, Gamma::Defocusing, 8);
    let u = random_state(8, 0.2, 1.0, 13);
    let phase = Complex64::from_polar(1.0, 0.83);
    for scheme in [Scheme::Strang, Scheme::Rk4] {
        let cfg = IntegratorConfig::new(scheme, 1e-3).record_every(usize::MAX);
        let (a, _) = evolve(&u.scaled(phase), &p, &cfg, 0.5).unwrap();
        let (b, _) = evolve(&u, &p, &cfg, 0.5).unwrap();
        assert!(a.l2_distance(&b.scaled(phase)).unwrap() < 1e-12);
    }
}

#[test]
fn strang_conserves_mass() {
    let p = params(0.75, Gamma::Focusing, 16);
    let u = random_state(16, 0.0, 1.5, 17);
    let cfg = IntegratorConfig::new(Scheme::Strang, 1e-3).record_every(100);
    let (_, log) = evolve(&u, &p, &cfg, 2.0).unwrap();
    assert!(log.relative_mass_drift() < 1e-12, "{}", log.relative_mass_drift());
}

#[test]
fn rk4_advisory() {
    let p = params(0.75, Gamma::Defocusing, 64);
    assert!(!IntegratorConfig::new(Scheme::Rk4, 0.1).advisories(&p).is_empty());
    assert!(IntegratorConfig::new(Scheme::Rk4, 1e-4).advisories(&p).is_empty());
    assert!(IntegratorConfig::new(Scheme::Strang, 0.1).advisories(&p).is_empty());
    assert!(IntegratorConfig::new(Scheme::Strang, 0.0).validate().is_err());
}

#[test]
fn divergence_aborts() {
    let p = params(1.0, Gamma::Focusing, 32);
    let u = random_state(32, 0.0, 50.0, 1);
    let cfg = IntegratorConfig::new(Scheme::Rk4, 0.05);
    match evolve(&u, &p, &cfg, 50.0) {
        Err(Error::NumericalAbort { last_good_time }) => assert!(last_good_time < 50.0),
        other => panic!("expected abort, got {:?}", other.map(|_| ())),
    }
}
