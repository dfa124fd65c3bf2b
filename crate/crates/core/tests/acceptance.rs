//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use casimir_spectra::constants::{HBAR, SPEED_OF_LIGHT};
use casimir_spectra::kernel::{classify, fresnel};
use casimir_spectra::lifshitz::{self, DimensionlessGroups};
use casimir_spectra::materials::ev_to_angular_frequency;
use casimir_spectra::matsubara::{self, ImaginaryAxisResponse, MatsubaraSpec};
use casimir_spectra::quadrature::{integrate_finite, integrate_oscillatory, integrate_semi_infinite};
use casimir_spectra::spectra::{self, LogGrid};
use casimir_spectra::{Channel, Gap, Material, NestedSpec, Polarization, QuadratureSpec, Sector, WavePoint};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const T: f64 = 300.0;

struct Outcome {
    passed: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            passed: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.passed &= ok;
        self.details.push(format!("{}{detail}", if ok { "" } else { "FAILED: " }));
    }

    fn note(&mut self, detail: String) {
        self.details.push(detail);
    }
}

fn gold() -> Material {
    Material::preset("Au-paper").unwrap()
}

fn low_loss() -> Material {
    Material::preset("Au-low-loss").unwrap()
}

fn gap(nm: f64) -> Gap {
    Gap::new(nm * 1e-9, T).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn dominance() -> Outcome {
    let mut out = Outcome::new();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let b = pool.install(|| lifshitz::thermal_pressure_total(&gap(162.0), &gold(), &NestedSpec::default()).unwrap());
    let elapsed = start.elapsed().as_secs_f64();
    let magnitude = 100.0 * b.magnitude_share(Channel::TE_EVANESCENT);
    let signed = 100.0 * b.share(Channel::TE_EVANESCENT);
    out.check(b.converged(), format!("all four channels converged, total {:.6e} Pa", b.total.value));
    out.check(
        (magnitude - 99.7).abs() <= 0.3,
        format!("|TE-ev| / Σ|channels| = {magnitude:.3} % (target 99.7 ± 0.3)"),
    );
    out.note(format!("signed TE-ev / total = {signed:.3} %"));
    for c in b.channels {
        out.note(format!("{:>15} {:+.6e} Pa", c.channel.label(), c.pressure.value));
    }
    out.check(elapsed < 60.0, format!("single-threaded runtime {elapsed:.2} s (limit 60 s)"));
    out
}

fn contribution_ranges() -> Outcome {
    let mut out = Outcome::new();
    for (material, v1_target) in [(gold(), 0.26), (low_loss(), 0.28)] {
        let table = spectra::wavevector_spectrum(&gap(162.0), &material, LogGrid::default_v(), &NestedSpec::default()).unwrap();
        let equal = spectra::contribution_range(&table, 0.9).unwrap();
        let narrow = spectra::minimal_width_range(&table, 0.9).unwrap();
        let matches = |lo: f64, hi: f64| (lo - v1_target).abs() <= 0.02 && (hi - 3.0).abs() <= 0.3;
        let anchored = spectra::lower_bound_for_upper(&table, 0.9, 3.0).unwrap();
        out.check(
            matches(equal.x_lo, equal.x_hi) || matches(narrow.x_lo, narrow.x_hi),
            format!(
                "ν = {:.3e} rad/s: equal tails [{:.4}, {:.4}], narrowest [{:.4}, {:.4}] (target [{v1_target} ± 0.02, 3.0 ± 0.3])",
                material.relaxation, equal.x_lo, equal.x_hi, narrow.x_lo, narrow.x_hi
            ),
        );
        out.note(format!(
            "ν = {:.3e} rad/s: with the upper end pinned at v = 3, 90 % needs v ≥ {}",
            material.relaxation,
            anchored.map_or("-".to_string(), |v| format!("{v:.4}"))
        ));
    }
    out
}

fn formulation_equivalence() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let spec = NestedSpec::default();
    for material in [gold(), low_loss()] {
        for nm in [100.0, 162.0, 400.0, 750.0] {
            let g = gap(nm);
            let direct = lifshitz::thermal_pressure_channel(&g, &material, Channel::TE_EVANESCENT, &spec).unwrap();
            let scaled = lifshitz::te_evanescent_dimensionless(&g, &material, &spec).unwrap();
            let d = rel(scaled.value, direct.value);
            out.check(
                d <= 1e-4 && direct.converged && scaled.converged,
                format!("ν = {:.3e}, l = {nm} nm: {:.9e} vs {:.9e} Pa, relative difference {d:.2e}", material.relaxation, direct.value, scaled.value),
            );
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    out.check(elapsed < 300.0, format!("runtime {elapsed:.2} s (limit 300 s)"));
    out
}

fn oracle_equivalence() -> Outcome {
    let mut out = Outcome::new();
    let m = gold();
    for nm in [162.0, 400.0, 750.0] {
        let g = gap(nm);
        let real = lifshitz::thermal_pressure_total(&g, &m, &NestedSpec::default()).unwrap();
        let oracle = matsubara::thermal_correction_oracle(&g, &m, &MatsubaraSpec::default(), &QuadratureSpec::INNER).unwrap();
        let d = rel(real.total.value, oracle.value);
        out.check(
            d <= 5e-3 && real.converged() && oracle.converged,
            format!("l = {nm} nm: real axis {:.9e} Pa, Matsubara {:.9e} Pa, relative difference {d:.2e}", real.total.value, oracle.value),
        );
    }
    out
}

fn characteristic_frequency() -> Outcome {
    let mut out = Outcome::new();
    let omega_c = spectra::characteristic_frequency(100e-9).unwrap();
    let omega_p = ev_to_angular_frequency(9.0).unwrap();
    let ratio = omega_c / omega_p;
    out.check(
        rel(ratio, 1.0 / 9.0) <= 0.03,
        format!("ω_c/ω_p = {ratio:.5} vs 1/9 = {:.5} ({:.2} %)", 1.0 / 9.0, 100.0 * rel(ratio, 1.0 / 9.0)),
    );
    out
}

fn applicability() -> Outcome {
    let mut out = Outcome::new();
    let radius = 150e-6;
    let m = gold();
    let gaps: Vec<f64> = (0..5).map(|i| 162.0 + (750.0 - 162.0) * i as f64 / 4.0).collect();
    let reports: Vec<_> = gaps.iter().map(|&nm| spectra::applicability_report(&gap(nm), &m, radius).unwrap()).collect();
    for r in &reports {
        out.check(
            r.criterion_comment,
            format!("l = {:.0} nm: 2πl = {:.3} µm < L = {:.3} µm", r.separation * 1e9, r.lambda_max * 1e6, r.spot_size * 1e6),
        );
    }
    let threshold = reports[0].threshold_separation;
    out.check((threshold * 1e6 - 30.4).abs() < 0.05, format!("threshold 2R/π² = {:.3} µm (30.4)", threshold * 1e6));
    let l_lo = reports[0].spot_size * 1e6;
    let l_hi = reports[4].spot_size * 1e6;
    out.check(
        (l_lo - 13.9).abs() < 0.05 && (l_hi - 30.0).abs() < 0.05,
        format!("L spans {l_lo:.2}–{l_hi:.2} µm (13.9–30.0)"),
    );
    let w = reports[0].ref2_wavelength_estimate.unwrap();
    out.check((w * 1e6 - 35.4).abs() < 0.05, format!("2πc/ν = {:.3} µm (35.4)", w * 1e6));
    out.check(
        reports.iter().all(|r| r.criterion_ref2 == Some(false)),
        "2πc/ν exceeds L at every gap".to_string(),
    );
    out
}

fn frequency_inequality() -> Outcome {
    let mut out = Outcome::new();
    let g = gap(162.0);
    let m = gold();
    let below = spectra::fraction_below_frequency(&g, &m, m.relaxation, &NestedSpec::default()).unwrap();
    out.check(
        below.converged && below.value >= 0.95,
        format!("share from ω < ν: {:.4} % (threshold 95 %)", 100.0 * below.value),
    );
    let groups = DimensionlessGroups::new(&g, &m).unwrap();
    let table = spectra::frequency_spectrum(&g, &m, LogGrid::default_u(&groups), &NestedSpec::default()).unwrap();
    let u_nu = groups.u_of_omega(m.relaxation);
    out.note(format!("tabulated cumulative at ω = ν: {:.4} %", 100.0 * table.cumulative_at(u_nu)));
    out.note(format!("ν sits at the {:.2}th percentile of the frequency spectrum", 100.0 * below.value));
    out
}

fn invariants() -> Outcome {
    let mut out = Outcome::new();
    let config = Config {
        cases: 512,
        failure_persistence: None,
        max_global_rejects: 1 << 16,
        ..Config::default()
    };
    let runner = || TestRunner::new_with_rng(config.clone(), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let wp = gold().plasma_frequency;

    let mut r = runner();
    // The TM surface-plasmon pole sits at δ ≈ 1/(2|ε|) outside the cone, so
    // continuity is probed at δ below that scale and above f64 resolution.
    let continuity = r.run(&(9.0f64..17.0, 8.0f64..15.0, -4.0f64..0.0), |(log_omega, log_nu, log_depth)| {
        let omega = 10f64.powf(log_omega);
        let m = Material::drude(wp, 10f64.powf(log_nu)).unwrap();
        let eps = m.permittivity(omega).unwrap();
        let delta = (1e-2 * 10f64.powf(log_depth) / (1.0 - eps).norm()).min(1e-10);
        prop_assume!(delta >= 1e-15);
        let cone = omega / SPEED_OF_LIGHT;
        let scale = eps.norm() + 1.0 / (1.0 - eps).norm();
        for pol in [Polarization::TE, Polarization::TM] {
            let above = fresnel(&WavePoint::new(omega, cone * (1.0 + delta)).unwrap(), eps, pol).unwrap();
            let below = fresnel(&WavePoint::new(omega, cone * (1.0 - delta)).unwrap(), eps, pol).unwrap();
            let jump = (above - below).norm();
            prop_assert!(jump <= 8.0 * (scale * delta).sqrt() + 1e-12, "{:?} jump {}", pol, jump);
        }
        Ok(())
    });
    out.check(continuity.is_ok(), format!("branch continuity across the light cone: {continuity:?}"));

    let mut r = runner();
    let passivity = r.run(&(8.0f64..17.5, 0.0f64..0.999_999, 8.0f64..15.0), |(log_omega, frac, log_nu)| {
        let omega = 10f64.powf(log_omega);
        let m = Material::drude(wp, 10f64.powf(log_nu)).unwrap();
        let p = WavePoint::new(omega, frac * omega / SPEED_OF_LIGHT).unwrap();
        prop_assert_eq!(classify(&p), Sector::Propagating);
        for pol in [Polarization::TE, Polarization::TM] {
            let r = fresnel(&p, m.permittivity(omega).unwrap(), pol).unwrap();
            prop_assert!(r.norm() <= 1.0 + 1e-12);
        }
        Ok(())
    });
    out.check(passivity.is_ok(), format!("propagating passivity |r| ≤ 1: {passivity:?}"));

    let mut r = runner();
    let nullity = r.run(&(6.0f64..15.0, 0.0f64..10.0), |(log_nu, log_q)| {
        let m = Material::drude(wp, 10f64.powf(log_nu)).unwrap();
        prop_assert_eq!(m.reflection(0.0, 10f64.powf(log_q), Polarization::TE), 0.0);
        Ok(())
    });
    let p0 = matsubara::zero_frequency_pressure(&gap(162.0), &gold(), Polarization::TE, &QuadratureSpec::INNER).unwrap();
    out.check(
        nullity.is_ok() && p0.value == 0.0,
        format!("Drude n = 0 TE reflection and pressure vanish: {nullity:?}, P₀(TE) = {:e}", p0.value.abs()),
    );

    let spec = NestedSpec::default();
    let table = spectra::wavevector_spectrum(&gap(162.0), &gold(), LogGrid::default_v(), &spec).unwrap();
    let mut nested = true;
    let mut previous: Option<spectra::ContributionRange> = None;
    for i in 1..=19 {
        let r = spectra::contribution_range(&table, 0.05 * i as f64).unwrap();
        if let Some(p) = previous {
            nested &= r.x_lo <= p.x_lo && p.x_hi <= r.x_hi;
        }
        previous = Some(r);
    }
    out.check(nested, "equal-tail ranges nest for fractions 0.05 … 0.95".to_string());

    let mut worst: f64 = 0.0;
    for points in [10, 20, 50] {
        let coarse = spectra::wavevector_spectrum(&gap(162.0), &gold(), LogGrid::default_v().with_points(points).unwrap(), &spec).unwrap();
        let a = spectra::contribution_range(&coarse, 0.9).unwrap();
        let b = spectra::contribution_range(&table, 0.9).unwrap();
        worst = worst.max(rel(a.x_lo, b.x_lo)).max(rel(a.x_hi, b.x_hi));
    }
    out.check(worst < 0.01, format!("grid refinement moves the 90 % endpoints by at most {:.3} %", 100.0 * worst));

    let q = QuadratureSpec::INNER;
    let cases: Vec<(&str, f64, casimir_spectra::QuadratureResult)> = vec![
        ("∫₀¹ x² dx", 1.0 / 3.0, integrate_finite(|x| x * x, 0.0, 1.0, &q).unwrap()),
        ("∫₀¹ x^-½ dx", 2.0, integrate_finite(|x| 1.0 / x.sqrt(), 0.0, 1.0, &q).unwrap()),
        ("∫₀^π sin", 2.0, integrate_finite(f64::sin, 0.0, PI, &q).unwrap()),
        ("∫₀^∞ e^-x", 1.0, integrate_semi_infinite(|x| (-x).exp(), 0.0, &q, 1.0).unwrap()),
        ("∫₀^∞ x/(eˣ−1)", PI * PI / 6.0, integrate_semi_infinite(|x| x / x.exp_m1(), 0.0, &q, 1.0).unwrap()),
        ("∫₀^∞ x³/(eˣ−1)", PI.powi(4) / 15.0, integrate_semi_infinite(|x| x.powi(3) / x.exp_m1(), 0.0, &q, 1.0).unwrap()),
        (
            "∫₀^∞ sin x / x",
            PI / 2.0,
            integrate_oscillatory(|x| if x == 0.0 { 1.0 } else { x.sin() / x }, 0.0, f64::INFINITY, 2.0 * PI, &q).unwrap(),
        ),
        (
            "∫₀^∞ cos x/(1+x²)",
            PI / (2.0 * std::f64::consts::E),
            integrate_oscillatory(|x| x.cos() / (1.0 + x * x), 0.0, f64::INFINITY, 2.0 * PI, &q).unwrap(),
        ),
    ];
    for (name, exact, r) in cases {
        let error = (r.value - exact).abs();
        out.check(
            r.converged && error <= q.tolerance(exact) && error <= r.error_estimate.max(1e-15 * exact.abs()),
            format!("{name}: error {error:.1e}, estimate {:.1e}", r.error_estimate),
        );
    }
    let capped = integrate_finite(|x| 1.0 / x.sqrt(), 0.0, 1.0, &q.with_rel_tol(1e-12).with_max_subdivisions(3)).unwrap();
    out.check(!capped.converged, "exhausted subdivision budget is reported as not converged".to_string());

    let ideal = matsubara::pressure_zero_temperature(&Gap::new(1e-6, T).unwrap(), &matsubara::IdealMetal, &q).unwrap();
    let exact = -PI * PI * HBAR * SPEED_OF_LIGHT / (240.0 * 1e-24);
    out.check(rel(ideal.value, exact) < 1e-6, format!("ideal-metal T = 0 pressure within {:.1e} of −π²ħc/240l⁴", rel(ideal.value, exact)));
    out
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("C1 TE-evanescent dominance", dominance),
        ("C2 contribution ranges", contribution_ranges),
        ("C3 dimensionless vs dimensional TE-evanescent", formulation_equivalence),
        ("C4 real axis vs Matsubara oracle", oracle_equivalence),
        ("C5 characteristic frequency", characteristic_frequency),
        ("C6 applicability report", applicability),
        ("C7 frequency-spectrum inequality", frequency_inequality),
        ("C8 invariant suites", invariants),
    ];
    let mut failed = Vec::new();
    for (name, criterion) in criteria {
        let start = Instant::now();
        let outcome = criterion();
        println!(
            "[{}] {name} ({:.2} s)",
            if outcome.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        for d in &outcome.details {
            println!("       {d}");
        }
        if !outcome.passed {
            failed.push(name);
        }
    }
    println!("\nacceptance: {}/{} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
