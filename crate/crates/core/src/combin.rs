//! Binomial coefficients and Bernstein weights `C(n,k) η^k (1−η)^{n−k}`.

use statrs::function::factorial::ln_binomial;

/// Above this `n`, coefficients are formed in log space.
const LOG_SPACE_THRESHOLD: u32 = 60;

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    if n > LOG_SPACE_THRESHOLD {
        return ln_binomial(n as u64, k as u64).exp();
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64)
}

/// Bernstein weight `C(n,k) η^k (1−η)^{n−k}` and its η-derivative
/// `C(n,k) η^{k−1} (1−η)^{n−k−1} (k − nη)`, exact at η ∈ {0, 1}.
pub fn bernstein(n: u32, k: u32, eta: f64) -> (f64, f64) {
    if k > n {
        return (0.0, 0.0);
    }
    let nf = n as f64;
    if eta <= 0.0 {
        return match k {
            0 => (1.0, -nf),
            1 => (0.0, nf),
            _ => (0.0, 0.0),
        };
    }
    if eta >= 1.0 {
        return match n - k {
            0 => (1.0, nf),
            1 => (0.0, -nf),
            _ => (0.0, 0.0),
        };
    }
    let (ki, ri) = (k as i32, (n - k) as i32);
    let slope = k as f64 - nf * eta;
    if n > LOG_SPACE_THRESHOLD {
        let ln_c = ln_binomial(n as u64, k as u64);
        let ln_core = ln_c + (ki - 1) as f64 * eta.ln() + (ri - 1) as f64 * (-eta).ln_1p();
        let core = ln_core.exp();
        return (core * eta * (1.0 - eta), core * slope);
    }
    let c = binomial(n, k);
    let core = c * eta.powi(ki - 1) * (1.0 - eta).powi(ri - 1);
    (c * eta.powi(ki) * (1.0 - eta).powi(ri), core * slope)
}
