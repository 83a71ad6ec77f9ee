//! Special functions.

use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFICIENTS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the absolute value of the gamma function (Lanczos, g = 7, n = 9).
///
/// Uses the reflection formula below 0.5. Returns +inf at the poles (non-positive integers).
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::of(0.5);
    if x <= T::zero() && x == x.floor() {
        return T::infinity();
    }
    if x < half {
        let pi = T::of(std::f64::consts::PI);
        let s = (pi * x).sin();
        // Γ(x)Γ(1-x) = π / sin(πx)
        return pi.ln() - s.abs().ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::of(LANCZOS_COEFFICIENTS[0]);
    for (i, &c) in LANCZOS_COEFFICIENTS.iter().enumerate().skip(1) {
        acc += T::of(c) / (x + T::of_usize(i));
    }
    let t = x + T::of(LANCZOS_G) + half;
    let half_ln_two_pi = T::of(0.918_938_533_204_672_8);
    half_ln_two_pi + (x + half) * t.ln() - t + acc.ln()
}
