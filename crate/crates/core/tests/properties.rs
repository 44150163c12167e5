use optomech_core::constants::{hz_to_rad, HBAR, K_B, TWO_PI};
use optomech_core::fit::fit_lorentzian;
use optomech_core::grid::uniform_grid;
use optomech_core::response::{solve_linear_response, transduction_bae, transduction_bad_cavity, CavitySusceptibility};
use optomech_core::spectra::{
    bae_output_gain, default_grid, integrate_spectrum, spectrum_quadratures_bae, spectrum_x_bad_cavity,
    spectrum_x_good_cavity, variance, BaeMechanics, TailModel,
};
use optomech_core::{
    bose_occupation, optical_damping, BathState, CoolingTone, DriveScheme, Frame, Regime, SpectrumTrace, SystemParams,
};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn device() -> impl Strategy<Value = SystemParams> {
    (1e3..1e7f64, 1e2..1e6f64, 1e2..1e6f64, 1e-3..1e1f64, 1e-1..1e2f64).prop_map(|(f_m, ke, ki, g, g0)| {
        SystemParams::from_hz(4.5e9, f_m, ke, ki, g, g0).unwrap()
    })
}

fn area(t: &SpectrumTrace) -> f64 {
    integrate_spectrum(t, None, TailModel::LorentzianAnalytic).unwrap().value
}

fn components_sum_to_total(t: &SpectrumTrace) {
    let sum = t.components.as_ref().unwrap().sum();
    for (s, v) in sum.iter().zip(&t.total) {
        assert!((s - v).abs() <= 1e-12 * v.abs().max(f64::MIN_POSITIVE), "{s} vs {v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kappa_is_the_sum_of_its_parts(p in device()) {
        prop_assert_eq!(p.kappa(), p.kappa_e + p.kappa_i);
    }

    #[test]
    fn loss_amplitudes_are_normalised(p in device()) {
        prop_assert!((p.alpha().powi(2) + p.beta().powi(2) - 1.0).abs() < 4.0 * f64::EPSILON);
    }

    #[test]
    fn cooperativity_times_gamma_is_optical_damping(p in device(), g_hz in 0.0..1e4f64) {
        let r = optical_damping(hz_to_rad(g_hz), p.kappa(), p.gamma).unwrap();
        prop_assert!((r.cooperativity * p.gamma - r.gamma_opt).abs() <= 1e-12 * r.gamma_opt);
        prop_assert!((r.gamma_eff - p.gamma - r.gamma_opt).abs() <= 1e-12 * r.gamma_eff);
    }

    #[test]
    fn bose_rises_with_temperature(t in 0.01..10.0f64, dt in 1e-3..1.0f64, f in 1e3..1e8f64) {
        let w = hz_to_rad(f);
        prop_assert!(bose_occupation(t + dt, w).unwrap() > bose_occupation(t, w).unwrap());
    }

    #[test]
    fn bose_falls_with_frequency(t in 0.01..10.0f64, f in 1e3..1e8f64, df in 1.0..1e6f64) {
        prop_assert!(bose_occupation(t, hz_to_rad(f + df)).unwrap() < bose_occupation(t, hz_to_rad(f)).unwrap());
    }

    #[test]
    fn bose_high_temperature_limit(f in 1e3..1e9f64, x in 100.0..1e6f64) {
        let w = hz_to_rad(f);
        let t = x * HBAR * w / K_B;
        let n = bose_occupation(t, w).unwrap();
        prop_assert!(rel(n, x - 0.5) < 1e-3);
    }

    #[test]
    fn output_prefactor_identity(p in device(), c in 0.0..1e4f64) {
        let drive = DriveScheme::with_cooperativity(Regime::TwoToneBae, &p, c);
        let lhs = 4.0 * c * p.gamma * p.kappa_e / p.kappa();
        let rhs = bae_output_gain(&p, drive.coupling());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn variance_parts_are_non_negative(c in 0.0..1e4f64, n_m in 0.0..1e4f64, n_c in 0.0..1.0f64) {
        for regime in Regime::ALL {
            let v = variance(regime, c, n_m, n_c).unwrap();
            for parts in [v.first, v.second] {
                for x in [parts.vacuum, parts.thermal, parts.qba, parts.classical] {
                    prop_assert!(x >= 0.0);
                }
                let sum = parts.vacuum + parts.thermal + parts.qba + parts.classical;
                prop_assert!((sum - parts.total()).abs() <= 1e-12 * sum);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integrated_spectra_match_closed_forms(c in 0.0..1e4f64, n_m in 0.0..1e4f64, n_c in 0.0..1.0f64) {
        let p = SystemParams::membrane_device();
        let baths = BathState::with_cavity_occupation(&p, n_m, n_c).unwrap();

        let drive = DriveScheme::with_cooperativity(Regime::BadCavitySingleTone, &p, c);
        let t = spectrum_x_bad_cavity(&default_grid(Regime::BadCavitySingleTone, &p, p.gamma).unwrap(), &p, &drive, &baths).unwrap();
        components_sum_to_total(&t);
        prop_assert!(rel(area(&t), variance(Regime::BadCavitySingleTone, c, n_m, n_c).unwrap().total_first()) < 1e-5);

        let drive = DriveScheme::with_cooperativity(Regime::RedSidebandSingleTone, &p, c);
        let grid = default_grid(Regime::RedSidebandSingleTone, &p, p.gamma * (1.0 + c)).unwrap();
        let t = spectrum_x_good_cavity(&grid, &p, &drive, &baths).unwrap();
        components_sum_to_total(&t);
        prop_assert!(rel(area(&t), variance(Regime::RedSidebandSingleTone, c, n_m, n_c).unwrap().total_first()) < 1e-5);

        let drive = DriveScheme::with_cooperativity(Regime::TwoToneBae, &p, c);
        let mech = BaeMechanics::resolve(&p, &drive, &baths).unwrap();
        let grid = default_grid(Regime::TwoToneBae, &p, p.gamma).unwrap();
        let (sx, sp) = spectrum_quadratures_bae(&grid, &p, &drive, &baths, mech).unwrap();
        components_sum_to_total(&sx);
        components_sum_to_total(&sp);
        let v = variance(Regime::TwoToneBae, c, n_m, n_c).unwrap();
        prop_assert!(rel(area(&sx), v.total_first()) < 1e-5);
        prop_assert!(rel(area(&sp), v.total_second()) < 1e-5);
    }

    #[test]
    fn measured_quadrature_ignores_the_coupling(c1 in 0.0..1e4f64, c2 in 0.0..1e4f64, n_m in 0.0..1e4f64, n_c in 0.0..1.0f64) {
        let p = SystemParams::membrane_device();
        let baths = BathState::with_cavity_occupation(&p, n_m, n_c).unwrap();
        let grid = default_grid(Regime::TwoToneBae, &p, p.gamma).unwrap();
        let sx = |c| {
            let drive = DriveScheme::with_cooperativity(Regime::TwoToneBae, &p, c);
            let mech = BaeMechanics::resolve(&p, &drive, &baths).unwrap();
            spectrum_quadratures_bae(&grid, &p, &drive, &baths, mech).unwrap().0
        };
        prop_assert_eq!(sx(c1).total, sx(c2).total);
    }

    #[test]
    fn bae_solver_agrees_exactly(p in device(), g_hz in 0.0..1e4f64, x in -3.0..3.0f64) {
        let drive = DriveScheme::bae(hz_to_rad(g_hz));
        let w = x * p.kappa();
        let a = solve_linear_response(w, &p, &drive).unwrap();
        let b = transduction_bae(w, &p, &drive, CavitySusceptibility::Exact).unwrap();
        for (o, i, v) in b.nonzero() {
            prop_assert!((a.get(o, i) - v).norm() <= 1e-9 * v.norm(), "{:?} <- {:?}", o, i);
        }
    }

    #[test]
    fn bad_cavity_solver_within_fast_cavity_bound(c in 0.0..100.0f64, x in 0.01..2.0f64) {
        // κ/ω_m = 10³
        let p = SystemParams::new(1e9, 1.0, 400.0, 600.0, 1e-4, 1e-6).unwrap();
        let drive = DriveScheme::with_cooperativity(Regime::BadCavitySingleTone, &p, c);
        let w = x * p.omega_m;
        let a = solve_linear_response(w, &p, &drive).unwrap();
        let b = transduction_bad_cavity(w, &p, &drive).unwrap();
        for (o, i, v) in b.nonzero() {
            prop_assert!((a.get(o, i).norm() - v.norm()).abs() <= 1e-4 * v.norm(), "{:?} <- {:?}", o, i);
        }
    }

    #[test]
    fn fitted_linewidth_is_the_effective_linewidth(c in 0.0..50.0f64, cool_hz in 0.5..5.0f64, n_m in 10.0..1e4f64) {
        let p = SystemParams::membrane_device();
        let tone = CoolingTone::for_linewidth(&p, hz_to_rad(cool_hz), hz_to_rad(400.0)).unwrap();
        let drive = DriveScheme::TwoToneBae {
            coupling: DriveScheme::with_cooperativity(Regime::TwoToneBae, &p, c).coupling(),
            theta: 0.0,
            cooling: Some(tone),
        };
        let baths = BathState::new(n_m, 0.0).unwrap();
        let mech = BaeMechanics::resolve(&p, &drive, &baths).unwrap();
        let half = 32.0 * mech.gamma_eff / TWO_PI;
        let grid = uniform_grid(-half, half, 801).unwrap();
        let (sx, _) = spectrum_quadratures_bae(&grid, &p, &drive, &baths, mech).unwrap();
        let fit = fit_lorentzian(&SpectrumTrace::new(grid, sx.total, Frame::Rotating).unwrap()).unwrap();
        prop_assert!(rel(fit.linewidth_hz, cool_hz) < 1e-6, "{} vs {}", fit.linewidth_hz, cool_hz);
    }
}
