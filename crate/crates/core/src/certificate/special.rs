//! Hurwitz zeta and incomplete gamma integrals for the Rüssmann constants.

use std::f64::consts::PI;

/// `B_{2k}` for `k = 1..=7`.
const BERNOULLI: [f64; 7] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0];

/// `zeta(s, b) = sum_{j >= 0} (b + j)^{-s}` for `s > 1`, `b > 0`: direct sum of the
/// first terms plus an Euler-Maclaurin tail.
pub fn hurwitz_zeta(s: f64, b: f64) -> f64 {
    assert!(s > 1.0 && b > 0.0, "hurwitz_zeta needs s > 1 and b > 0");
    const HEAD: usize = 24;
    let head: f64 = (0..HEAD).map(|j| (b + j as f64).powf(-s)).sum();
    let x = b + HEAD as f64;
    let mut tail = x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // B_{2k}/(2k)! * s (s+1) ... (s+2k-2) * x^{-s-2k+1}
    let mut rising = s;
    let mut fact = 2.0;
    for (k, b2k) in BERNOULLI.iter().enumerate() {
        let m = 2 * k + 1;
        tail += b2k / fact * rising * x.powf(-s - m as f64);
        rising *= (s + m as f64) * (s + m as f64 + 1.0);
        fact *= ((m + 2) * (m + 3)) as f64;
    }
    head + tail
}

/// `ln Gamma(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
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
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let series = C[1..].iter().enumerate().fold(C[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
}

pub fn gamma(x: f64) -> f64 {
    if x > 0.0 && x.fract() == 0.0 && x <= 171.0 {
        return (1..x as u64).map(|k| k as f64).product();
    }
    ln_gamma(x).exp()
}

/// `int_{x0}^inf u^a e^{-u} du = Gamma(a + 1, x0)` for `a >= 0`, `x0 >= 0`.
///
/// Integer `a` uses the exact recurrence `I_a = x0^a e^{-x0} + a I_{a-1}`;
/// otherwise a series (small `x0`) or a Lentz continued fraction.
pub fn upper_incomplete_gamma_integral(x0: f64, a: f64) -> f64 {
    assert!(a >= 0.0 && x0 >= 0.0, "need a >= 0 and x0 >= 0");
    if a.fract() == 0.0 && a <= 170.0 {
        let e = (-x0).exp();
        let mut acc = e;
        for j in 1..=(a as u32) {
            acc = x0.powi(j as i32) * e + j as f64 * acc;
        }
        return acc;
    }
    let s = a + 1.0;
    if x0 == 0.0 {
        return gamma(s);
    }
    let prefactor = (s * x0.ln() - x0 - ln_gamma(s)).exp();
    if x0 < s + 1.0 {
        // lower series: gamma(s, x) = x^s e^{-x} sum x^n / (s (s+1) ... (s+n))
        let mut term = 1.0 / s;
        let mut sum = term;
        for k in 1..1000 {
            term *= x0 / (s + k as f64);
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        gamma(s) * (1.0 - prefactor * sum)
    } else {
        let tiny = 1e-300;
        let mut b = x0 + 1.0 - s;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let an = -(i as f64) * (i as f64 - s);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        gamma(s) * prefactor * h
    }
}
