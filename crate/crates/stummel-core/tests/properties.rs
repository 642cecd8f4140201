//! Randomized sweeps over the public API. Each test draws parameters from
//! a seeded stream (or proptest) and checks an order relation, a two-route
//! agreement, or an implication that must hold across the whole family,
//! not just at the frozen reference points.

mod common;

use common::rel_err;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stummel_core::quad::adaptive_log_panels;
use stummel_core::scale::DEFAULT_T0;
use stummel_core::{
    check_conditions, check_theorem, classify, eta, fit_envelope, integral_scale_over_t,
    integrate_ball_mc, integrate_radial, integrate_radial_between, lebesgue_pth_power,
    lorentz_norm, modulus_curve, morrey_norm, predict_and_check_morrey, product_integral,
    rearrangement_pth_power, weak_morrey_norm, ConditionStatus, IntegralValue, Membership,
    NormValue, RadialGrid, RadialIntegrand, RadialTerm, ScaleFunction, TestFunction, TheoremId,
    TheoremParams,
};

/// Log-uniform draw on `[lo, hi]`.
fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo * (hi / lo).powf(rng.random::<f64>())
}

fn finite(v: &IntegralValue) -> f64 {
    v.finite().expect("expected a finite integral")
}

#[test]
fn scale_integral_is_nondecreasing_and_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let radii: Vec<f64> = (0..29).map(|k| 1e-12 * 10f64.powf(k as f64 * 0.5)).collect();
    for draw in 0..40 {
        let psi = if draw % 8 == 7 {
            // The a = 0 integrable branch: psi = C |ln t|^b with b < -1.
            ScaleFunction::power_log(0.0, -1.5 - 1.5 * rng.random::<f64>())
        } else {
            ScaleFunction::power_log(
                0.25 + 2.25 * rng.random::<f64>(),
                -2.0 + 4.0 * rng.random::<f64>(),
            )
        };
        let report = check_conditions(&psi, 1).unwrap();
        assert_eq!(report.integrability, ConditionStatus::Holds, "draw {draw}: {psi}");
        let values: Vec<f64> = radii
            .iter()
            .map(|&r| finite(&integral_scale_over_t(&psi, r).unwrap()))
            .collect();
        for w in values.windows(2) {
            assert!(
                w[1] >= w[0] * (1.0 - 1e-12),
                "integral decreased along r for {psi}: {} then {}",
                w[0],
                w[1]
            );
        }
        let at_min = values[0];
        let at_one = finite(&integral_scale_over_t(&psi, 1.0).unwrap());
        assert!(
            at_min < 0.5 * at_one,
            "integral of {psi} shows no decay toward zero: I(1e-12) = {at_min}, I(1) = {at_one}"
        );
    }
}

#[test]
fn closed_form_integrals_match_panel_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    for draw in 0..50 {
        let a = 0.3 + 2.2 * rng.random::<f64>();
        let b = -2.0 + 4.0 * rng.random::<f64>();
        let psi = ScaleFunction::power_log(a, b);
        let r = log_uniform(&mut rng, 1e-6, 50.0);
        let closed = finite(&integral_scale_over_t(&psi, r).unwrap());
        let quad =
            adaptive_log_panels(&|t| psi.eval(t).unwrap() / t, 0.0, r, 1e-11).unwrap();
        assert!(
            rel_err(quad, closed) < 1e-8,
            "draw {draw}: scale integral routes disagree for {psi} at r = {r}: \
             closed {closed}, panels {quad}"
        );

        // Same cross-check for the product integral, on draws where the
        // combined exponent keeps it convergent.
        let p2 = 1.0 + rng.random::<f64>();
        let a2 = 0.2 + 1.8 * rng.random::<f64>();
        let psi2 = ScaleFunction::power_log(a2, -1.0 + 2.0 * rng.random::<f64>());
        if a * p2 + a2 <= 0.05 {
            continue;
        }
        let closed = finite(&product_integral(&psi, p2, &psi2, r).unwrap());
        let quad = adaptive_log_panels(
            &|t| psi.eval(t).unwrap().powf(p2) * psi2.eval(t).unwrap() / t,
            0.0,
            r,
            1e-11,
        )
        .unwrap();
        assert!(
            rel_err(quad, closed) < 1e-8,
            "draw {draw}: product integral routes disagree for {psi}, {psi2}, p2 = {p2}, \
             r = {r}: closed {closed}, panels {quad}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Every analytic doubling verdict must cover actual sampled ratios:
    /// psi(s)/psi(r) stays inside [1/A1, A1] over ten thousand random
    /// pairs with 1 <= s/r <= 2.
    #[test]
    fn doubling_certificates_cover_random_ratio_samples(
        a in -1.5f64..1.5,
        b in -2.0f64..2.0,
        c in 0.1f64..10.0,
        seed in 0u64..1u64 << 48,
    ) {
        let psi = ScaleFunction::PowerLog { scale_const: c, a, b, t0: DEFAULT_T0 };
        let report = check_conditions(&psi, 1).unwrap();
        prop_assert_eq!(report.doubling, ConditionStatus::Holds);
        let a1 = report.doubling_const.unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let r = log_uniform(&mut rng, 1e-10, 10.0);
            let s = r * (1.0 + rng.random::<f64>());
            let ratio = psi.eval(s).unwrap() / psi.eval(r).unwrap();
            prop_assert!(
                ratio <= a1 * (1.0 + 1e-12) && ratio >= (1.0 - 1e-12) / a1,
                "ratio {} escapes certificate [{}, {}] for {} at r = {}, s = {}",
                ratio, 1.0 / a1, a1, psi, r, s
            );
        }
    }

    /// Finite modulus curves are nondecreasing in r, within relative
    /// slack 1e-9, across the radial catalog.
    #[test]
    fn modulus_curves_are_nondecreasing(
        gamma in 0.05f64..0.45,
        alpha in 0.5f64..0.95,
        member_kind in 0usize..3,
    ) {
        let psi = ScaleFunction::pure_power(alpha);
        let f = match member_kind {
            0 => TestFunction::radial_power(1, gamma),
            1 => TestFunction::indicator(1, 1.0),
            _ => TestFunction::log_decay_member(1, 1.0, &psi).unwrap(),
        };
        let curve = modulus_curve(&f, 1.0, &psi, &RadialGrid::default_grid()).unwrap();
        prop_assert!(curve.all_finite(), "curve diverged for gamma {gamma}, alpha {alpha}");
        let pts = curve.finite_points();
        for w in pts.windows(2) {
            prop_assert!(
                w[1].1 >= w[0].1 * (1.0 - 1e-9),
                "modulus decreased: eta({}) = {}, eta({}) = {}",
                w[0].0, w[0].1, w[1].0, w[1].1
            );
        }
    }

    /// Weak Morrey norms never exceed strong ones at matching indices.
    #[test]
    fn weak_norms_stay_below_strong_norms(
        gamma in 0.05f64..0.9,
        a in -0.9f64..-0.05,
        p in 1.0f64..2.5,
    ) {
        // Compact support keeps the large-radius end of the sup harmless,
        // so finiteness is decided by the exponents at zero alone.
        let f = TestFunction::radial_power_log(1, gamma, 0.0, 1.0, 1.0);
        let psi = ScaleFunction::pure_power(a);
        let strong = morrey_norm(&f, p, &psi).unwrap().value;
        let weak = weak_morrey_norm(&f, p, &psi).unwrap().value;
        if let NormValue::Finite(s) = strong {
            match weak {
                NormValue::Infinite => prop_assert!(
                    false,
                    "weak norm infinite while strong is {s} (gamma {gamma}, a {a}, p {p})"
                ),
                NormValue::Finite(w) => prop_assert!(
                    w <= s * (1.0 + 1e-9),
                    "weak {w} exceeds strong {s} (gamma {gamma}, a {a}, p {p})"
                ),
            }
        }
    }
}

#[test]
fn mc_ball_oracle_agrees_with_radial_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    for n in 1u32..=3 {
        let nf = n as f64;
        for _ in 0..2 {
            // Kernel |f(y)|^p psi(|y|)/|y|^n with everything a pure power:
            // exponent must clear 0 for the integral to converge.
            let gamma = 0.1 + 0.2 * rng.random::<f64>();
            let p = 1.0 + rng.random::<f64>();
            let alpha = gamma * p + 0.2 + 0.5 * rng.random::<f64>();
            let r = log_uniform(&mut rng, 0.1, 2.0);
            let omega = common::sphere_area(n);
            let w = RadialIntegrand::new(
                vec![RadialTerm { coeff: omega, a: alpha - gamma * p, b: 0.0 }],
                f64::INFINITY,
            )
            .unwrap();
            let closed = finite(&integrate_radial(&w, r).unwrap());
            let f = TestFunction::radial_power(n, gamma);
            let psi = ScaleFunction::pure_power(alpha);
            let g = move |y: &[f64]| {
                let t = y.iter().map(|c| c * c).sum::<f64>().sqrt();
                f.eval(y).unwrap().powf(p) * psi.eval(t).unwrap() / t.powf(nf)
            };
            let mc = integrate_ball_mc(&g, n, r, 1_000_000, 74).unwrap();
            assert!(
                (mc.value - closed).abs() <= 4.0 * mc.std_error,
                "n = {n}: MC {} +- {} vs radial {closed}",
                mc.value,
                mc.std_error
            );
        }
    }
}

#[test]
fn radial_route_is_additive_over_dyadic_panels() {
    let mut rng = ChaCha8Rng::seed_from_u64(75);
    for draw in 0..20 {
        let w = RadialIntegrand::new(
            vec![
                RadialTerm {
                    coeff: 0.2 + rng.random::<f64>(),
                    a: 0.2 + 1.5 * rng.random::<f64>(),
                    b: -1.5 + 3.0 * rng.random::<f64>(),
                },
                RadialTerm {
                    coeff: 0.2 + rng.random::<f64>(),
                    a: 0.2 + 1.5 * rng.random::<f64>(),
                    b: 0.0,
                },
            ],
            1.0,
        )
        .unwrap();
        let r = log_uniform(&mut rng, 1e-3, 1.0);
        let total = finite(&integrate_radial(&w, r).unwrap());
        let mut sum = 0.0;
        let mut hi = r;
        for _ in 0..60 {
            sum += finite(&integrate_radial_between(&w, 0.5 * hi, hi).unwrap());
            hi *= 0.5;
        }
        sum += finite(&integrate_radial(&w, hi).unwrap());
        assert!(
            rel_err(sum, total) < 1e-9,
            "draw {draw}: dyadic sum {sum} vs direct {total}"
        );
    }
}

#[test]
fn modulus_curve_refinement_bounds_local_jumps() {
    let psi = ScaleFunction::pure_power(0.5);
    let members = [
        TestFunction::radial_power(1, 0.25),
        TestFunction::indicator(1, 1.0),
        TestFunction::log_decay_member(1, 1.0, &psi).unwrap(),
        TestFunction::bump_sum(1, 0.5, 8, 1.0),
    ];
    let grid = RadialGrid::logspace(1e-10, 10.0, 25).unwrap();
    for f in &members {
        let coarse = modulus_curve(f, 1.0, &psi, &grid).unwrap();
        let fine = modulus_curve(f, 1.0, &psi, &grid.refine(4)).unwrap();
        let max_jump = |pts: &[(f64, f64)]| {
            pts.windows(2).map(|w| (w[1].1 - w[0].1).abs()).fold(0.0_f64, f64::max)
        };
        let coarse_jump = max_jump(&coarse.finite_points());
        let fine_jump = max_jump(&fine.finite_points());
        assert!(
            fine_jump <= 4.0 * coarse_jump + 1e-12,
            "refined jump {fine_jump} not controlled by coarse variation {coarse_jump} for {f:?}"
        );
    }
}

#[test]
fn scaling_law_slope_matches_exponent() {
    let mut rng = ChaCha8Rng::seed_from_u64(76);
    for draw in 0..12 {
        let gamma = 0.05 + 0.3 * rng.random::<f64>();
        let p = 1.0 + rng.random::<f64>();
        let alpha = gamma * p + 0.1 + 0.6 * rng.random::<f64>();
        let f = TestFunction::radial_power(1, gamma);
        let psi = ScaleFunction::pure_power(alpha);
        let curve =
            modulus_curve(&f, p, &psi, &RadialGrid::logspace(1e-8, 1.0, 24).unwrap()).unwrap();
        let pts = curve.finite_points();
        let expected = (alpha - gamma * p) / p;
        // Two-point slope over the full span; the curve is an exact power
        // law so any chord reproduces the exponent.
        let (r0, v0) = pts[0];
        let (r1, v1) = pts[pts.len() - 1];
        let slope = (v1.ln() - v0.ln()) / (r1.ln() - r0.ln());
        assert!(
            (slope - expected).abs() < 1e-6,
            "draw {draw}: slope {slope} vs exponent {expected}"
        );
    }
}

#[test]
fn layer_cake_identity_over_catalog_sweep() {
    let psi = ScaleFunction::pure_power(0.5);
    let members = [
        TestFunction::indicator(1, 1.0),
        TestFunction::indicator(2, 0.5),
        TestFunction::radial_power_log(1, 0.4, 0.0, 2.0, 1.0),
        TestFunction::radial_power_log(2, 0.7, 0.0, 1.0, 1.0),
        TestFunction::log_decay_member(1, 1.0, &psi).unwrap(),
        TestFunction::bump_sum(1, 0.5, 6, 1.0),
        TestFunction::radial_power(1, 0.5),
        TestFunction::tail_power(1, 2.0),
    ];
    for f in &members {
        for p in [1.0, 1.5, 2.0] {
            let direct = lebesgue_pth_power(f, p).unwrap();
            let via_rearrangement = rearrangement_pth_power(f, p).unwrap();
            match (direct, via_rearrangement) {
                (NormValue::Finite(d), NormValue::Finite(r)) => assert!(
                    rel_err(r, d) < 1e-8,
                    "layer cake broke for {f:?} at p = {p}: direct {d}, via f* {r}"
                ),
                (d, r) => assert_eq!(
                    d, r,
                    "layer cake finiteness disagrees for {f:?} at p = {p}"
                ),
            }
        }
    }
}

#[test]
fn lorentz_nesting_preserves_finiteness() {
    let psi = ScaleFunction::pure_power(0.5);
    let members = [
        TestFunction::indicator(1, 1.0),
        TestFunction::radial_power_log(1, 0.4, 0.0, 1.0, 1.0),
        TestFunction::log_decay_member(1, 1.0, &psi).unwrap(),
        TestFunction::bump_sum(1, 0.5, 6, 1.0),
        TestFunction::radial_power(1, 0.5),
        TestFunction::tail_power(1, 1.5),
    ];
    let exponents = [1.0, 1.5, 2.0, 4.0, f64::INFINITY];
    for f in &members {
        for kappa in [1.5, 2.0, 3.0] {
            for (i, &p2) in exponents.iter().enumerate() {
                let narrow = lorentz_norm(f, kappa, p2).unwrap();
                if narrow == NormValue::Infinite {
                    continue;
                }
                for &p1 in &exponents[i..] {
                    let wide = lorentz_norm(f, kappa, p1).unwrap();
                    assert!(
                        !wide.is_infinite(),
                        "nesting broke for {f:?}, kappa {kappa}: finite at p = {p2} \
                         but infinite at p = {p1}"
                    );
                }
            }
        }
    }
}

#[test]
fn thm4_1_gate_is_sound_for_the_catalog() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let grid = RadialGrid::default_grid();
    let mut applied = 0;
    for _ in 0..200 {
        let n = 1 + rng.random_range(0..2u32);
        let a1 = -(0.1 + 0.7 * rng.random::<f64>());
        let a2 = 0.1 + (n as f64 - 0.2) * rng.random::<f64>();
        let p2 = 1.0 + rng.random::<f64>();
        let p1 = p2 + rng.random::<f64>();
        let psi1 = ScaleFunction::pure_power(a1);
        let psi2 = ScaleFunction::pure_power(a2);
        let gamma = (-a1) * rng.random::<f64>();
        if gamma * p1 >= n as f64 {
            continue;
        }
        let f = TestFunction::radial_power_log(n, gamma, 0.0, 1.0, 1.0);
        let params = TheoremParams {
            n: Some(n),
            p1: Some(p1),
            p2: Some(p2),
            psi1: Some(psi1.clone()),
            psi2: Some(psi2.clone()),
            ..TheoremParams::default()
        };
        let checklist = check_theorem(TheoremId::Thm4_1, &params).unwrap();
        if !checklist.includes() {
            continue;
        }
        if morrey_norm(&f, p1, &psi1).unwrap().value.is_infinite() {
            continue;
        }
        applied += 1;
        let report = classify(&f, p2, &psi2, &grid).unwrap();
        assert_ne!(
            report.vanishing.status,
            Membership::NonMember,
            "gate admitted (a1 {a1}, a2 {a2}, p1 {p1}, p2 {p2}, gamma {gamma}, n {n}) \
             yet the function classified out of the Stummel class"
        );
    }
    assert!(applied >= 50, "sweep exercised only {applied} admitted draws");
}

#[test]
fn cor3_2_kernel_domination_bounds_moduli_pointwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    let grid = RadialGrid::logspace(1e-8, 1.0, 20).unwrap();
    for draw in 0..15 {
        let p = 1.0 + rng.random::<f64>();
        let alpha = 0.2 + 0.4 * rng.random::<f64>();
        let beta = alpha + (0.95 - alpha) * rng.random::<f64>();
        let gamma = alpha / p * rng.random::<f64>() * 0.9;
        let f = TestFunction::radial_power(1, gamma);
        for &r in grid.radii() {
            let low = finite(&eta(&f, p, &ScaleFunction::pure_power(alpha), r).unwrap());
            let high = finite(&eta(&f, p, &ScaleFunction::pure_power(beta), r).unwrap());
            assert!(
                high <= r.powf((beta - alpha) / p) * low * (1.0 + 1e-9),
                "draw {draw}: eta_beta {high} above kernel bound at r = {r} \
                 (alpha {alpha}, beta {beta}, p {p}, gamma {gamma})"
            );
        }
    }
}

#[test]
fn strong_morrey_predictions_carry_their_weak_counterpart() {
    let mut rng = ChaCha8Rng::seed_from_u64(79);
    let grid = RadialGrid::default_grid();
    for draw in 0..15 {
        let alpha = 0.3 + 0.5 * rng.random::<f64>();
        let gamma = alpha * (0.2 + 0.7 * rng.random::<f64>());
        let f = TestFunction::radial_power(1, gamma);
        let psi = ScaleFunction::pure_power(alpha);
        let curve = modulus_curve(&f, 1.0, &psi, &grid).unwrap();
        let fit = fit_envelope(&curve).unwrap();
        let pred = match predict_and_check_morrey(&fit, &f, 1.0, 1.0, alpha, 1) {
            Ok(pred) => pred,
            Err(_) => continue,
        };
        if !pred.strong.value.is_infinite() {
            let weak = pred.weak.as_ref().expect("p1 = p2 requests the weak check");
            assert!(
                !weak.value.is_infinite(),
                "draw {draw}: strong norm finite but weak infinite \
                 (alpha {alpha}, gamma {gamma}, lambda {})",
                pred.lambda
            );
        }
    }
}
