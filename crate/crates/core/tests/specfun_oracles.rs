//! Special functions against values computed once with 40-digit arithmetic
//! (mpmath) and frozen here.

use std::f64::consts::PI;

use proptest::prelude::*;
use siegel_maass::quadrature::{exp_sinh, DeOptions};
use siegel_maass::specfun::{
    gamma, gamma_real, upper_incomplete_gamma, whittaker_w, Precision,
};
use siegel_maass::Complex64;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn gamma_against_high_precision_values() {
    assert!(rel(gamma_real(3.25).unwrap(), 2.549_256_966_718_529_281_8) < 1e-13);
    assert!(rel(gamma_real(-2.5).unwrap(), -0.945_308_720_482_941_881_2) < 1e-13);
    let g = gamma(Complex64::new(0.1, 2.0)).unwrap();
    let want = Complex64::new(0.025_028_525_181_518_902_9, -0.078_318_049_659_431_547_8);
    assert!((g - want).norm() / want.norm() < 1e-13);
}

#[test]
fn incomplete_gamma_against_high_precision_values() {
    let p = Precision::default();
    let cases = [
        (2.5, 1.0, 1.128_802_791_889_102_286_4),
        (-1.5, 0.3, 2.238_739_379_379_646_431_5),
        (-2.0, 0.7, 0.338_900_330_940_655_443_98),
        (0.0, 2.0, 0.048_900_510_708_061_119_567),
        (0.5, 30.0, 1.681_303_208_652_897_861_2e-14),
    ];
    for (s, x, want) in cases {
        let got = upper_incomplete_gamma(s, x, &p).unwrap();
        assert!(rel(got, want) < 1e-12, "Γ({s},{x}) = {got}, want {want}");
    }
}

#[test]
fn incomplete_gamma_finite_form() {
    let p = Precision::default();
    let x = 4.0 * PI;
    let want = 2.0 * (-x).exp() * (1.0 + x + 0.5 * x * x);
    assert!(rel(upper_incomplete_gamma(3.0, x, &p).unwrap(), want) < 1e-15);
}

#[test]
fn incomplete_gamma_against_quadrature() {
    let p = Precision::default();
    let q = exp_sinh(|t| (1.5 * t.ln() - t).exp(), 1.0, DeOptions::default()).unwrap();
    assert!(rel(upper_incomplete_gamma(2.5, 1.0, &p).unwrap(), q.value) < 1e-12);
}

#[test]
fn incomplete_gamma_tends_to_gamma_at_zero() {
    let p = Precision::default();
    let x: f64 = 1e-8;
    for s in [0.5, 1.0, 2.5, 4.0, 7.3] {
        let g = upper_incomplete_gamma(s, x, &p).unwrap();
        let full = gamma_real(s).unwrap();
        // Γ(s) − Γ(s,x) = γ(s,x) ≈ x^s / s
        let gap = x.powf(s) / s;
        assert!((full - g - gap).abs() <= 1e-12 * full + 1e-3 * gap, "s={s}");
    }
}

#[test]
fn whittaker_against_high_precision_values() {
    let p = Precision::default();
    let cases = [
        (3.0, 0.7, 2.0, -1.650_405_310_024_317_110_5),
        (0.0, 0.1, 0.5, 0.620_946_657_409_619_683_66),
        (8.0, 2.1, 20.0, -3_514.690_561_241_867_395_3),
        (8.0, 1.6, 0.5, 5_464.029_357_324_562_191_4),
        (5.0, 1.1, 3.0, 21.497_777_700_578_182_509),
        (3.0, 0.25, 4.0, -1.129_798_665_305_206_805_2),
        (2.0, 0.5, 12.566_370_614_359_172, 0.247_960_781_122_892_305_92),
        (0.5, 1.3, 7.0, 0.100_049_641_488_939_812_78),
    ];
    for (k, m, z, want) in cases {
        let got = whittaker_w(k, m, z, &p).unwrap();
        assert!(rel(got, want) < 1e-9, "W({k},{m},{z}) = {got}, want {want}");
    }
}

#[test]
fn whittaker_direct_integral_oracle() {
    // Climb from κ = −1 and κ = 0, where the integral representation
    // converges, rather than from the library's own starting pair.
    let (k, m, z) = (3.0_f64, 0.7_f64, 2.0_f64);
    let prec = Precision::default();
    let direct = |kappa: f64| {
        let p = m - kappa - 0.5;
        let q = m + kappa - 0.5;
        let i = exp_sinh(
            |t| (-t + p * t.ln() + q * (t / z).ln_1p()).exp(),
            0.0,
            DeOptions::default(),
        )
        .unwrap()
        .value;
        (-z / 2.0).exp() * z.powf(kappa) / gamma_real(p + 1.0).unwrap() * i
    };
    let mut prev = direct(-1.0);
    let mut cur = direct(0.0);
    let mut kappa = 0.0;
    while kappa < k {
        let next = (z - 2.0 * kappa) * cur + (m * m - (kappa - 0.5).powi(2)) * prev;
        prev = cur;
        cur = next;
        kappa += 1.0;
    }
    assert!(rel(whittaker_w(k, m, z, &prec).unwrap(), cur) < 1e-11);
}

#[test]
fn whittaker_three_term_recurrence_on_grid() {
    let p = Precision::default();
    for ki in 1..8 {
        let k = ki as f64;
        for mi in 0..=10 {
            let m = 0.1 + 0.2 * mi as f64;
            for z in [0.5, 1.0, 2.5, 5.0, 10.0, 20.0] {
                let wm = whittaker_w(k - 1.0, m, z, &p).unwrap();
                let w0 = whittaker_w(k, m, z, &p).unwrap();
                let wp = whittaker_w(k + 1.0, m, z, &p).unwrap();
                let resid = wp + (2.0 * k - z) * w0 - (m * m - (k - 0.5).powi(2)) * wm;
                let scale = wp.abs() + ((2.0 * k - z) * w0).abs();
                assert!(resid.abs() <= 1e-9 * scale, "k={k} m={m} z={z}");
            }
        }
    }
}

#[test]
fn incomplete_gamma_monotone_in_x() {
    let p = Precision::default();
    for s in 1..=8 {
        let mut last = f64::INFINITY;
        for i in 1..=60 {
            let x = 0.25 * i as f64;
            let v = upper_incomplete_gamma(s as f64, x, &p).unwrap();
            assert!(v < last);
            last = v;
        }
    }
}

proptest! {
    #[test]
    fn gamma_functional_equation(x in 0.05f64..30.0) {
        let g = gamma_real(x).unwrap();
        let g1 = gamma_real(x + 1.0).unwrap();
        prop_assert!(rel(g1, x * g) < 1e-12);
    }

    #[test]
    fn incomplete_gamma_recurrence(s in -3.5f64..6.0, x in 0.05f64..25.0) {
        prop_assume!((s.fract()).abs() > 1e-3 && s.abs() > 1e-3);
        let p = Precision::default();
        // Γ(s+1,x) = sΓ(s,x) + x^s e^{−x}
        let lhs = upper_incomplete_gamma(s + 1.0, x, &p).unwrap();
        let rhs = s * upper_incomplete_gamma(s, x, &p).unwrap() + (s * x.ln() - x).exp();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (lhs.abs() + (s * x.ln() - x).exp()));
    }
}
