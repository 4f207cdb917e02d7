//! Normalized Hermite functions in the vacuum-variance-1/2 convention,
//!
//! `ψ_m(q) = h_m(q) e^{−q²/2} / (2^m m! √π)^{1/2}`,
//!
//! so that `ψ_m(q)²` is the quadrature density of the Fock state |m⟩. They are
//! built by the normalized three-term recurrence, never through raw
//! polynomials and factorials (those overflow near m ≈ 85 while ψ_m stays
//! O(1)).

use crate::error::{Error, Result};

pub const MAX_ORDER: u32 = 200;

/// `π^{−1/4}`
const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

/// ψ_m(q).
pub fn hermite_psi(m: u32, q: f64) -> Result<f64> {
    let all = hermite_psi_all(m, q)?;
    Ok(all[m as usize])
}

/// ψ_0(q), …, ψ_m(q) from a single recurrence pass.
pub fn hermite_psi_all(m: u32, q: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; m as usize + 1];
    hermite_psi_into(q, &mut out)?;
    Ok(out)
}

/// Fills `out[j] = ψ_j(q)` for `j < out.len()`. Allocation-free variant used
/// inside quadrature loops.
pub fn hermite_psi_into(q: f64, out: &mut [f64]) -> Result<()> {
    if out.is_empty() {
        return Ok(());
    }
    let m = out.len() - 1;
    if m > MAX_ORDER as usize {
        return Err(Error::domain(format!("Hermite order {m} exceeds the cap {MAX_ORDER}")));
    }
    if !q.is_finite() {
        return Err(Error::domain(format!("Hermite argument {q} is not finite")));
    }
    out[0] = PI_POW_NEG_QUARTER * (-0.5 * q * q).exp();
    if m >= 1 {
        out[1] = std::f64::consts::SQRT_2 * q * out[0];
    }
    for j in 2..=m {
        let jf = j as f64;
        out[j] = (2.0 / jf).sqrt() * q * out[j - 1] - ((jf - 1.0) / jf).sqrt() * out[j - 2];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_peak() {
        assert_relative_eq!(hermite_psi(0, 0.0).unwrap(), std::f64::consts::PI.powf(-0.25), max_relative = 1e-15);
    }

    #[test]
    fn odd_orders_vanish_at_origin() {
        for m in (1..40).step_by(2) {
            assert_eq!(hermite_psi(m, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn tenth_order_reference_value() {
        // 50-digit evaluation of h_10(2.5) e^{-3.125} / sqrt(2^10 10! sqrt(pi))
        assert_relative_eq!(hermite_psi(10, 2.5).unwrap(), 0.050_963_812_362_210_44, max_relative = 1e-12);
    }

    #[test]
    fn parity() {
        for m in 0..30 {
            for q in [0.3, 1.7, 4.2] {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert_relative_eq!(hermite_psi(m, -q).unwrap(), sign * hermite_psi(m, q).unwrap(), max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn order_cap() {
        assert!(hermite_psi(MAX_ORDER, 1.0).is_ok());
        assert!(hermite_psi(MAX_ORDER + 1, 1.0).is_err());
        assert!(hermite_psi(3, f64::NAN).is_err());
    }

    #[test]
    fn high_orders_stay_bounded() {
        for q in [0.0, 5.0, 12.0, 19.0] {
            let v = hermite_psi_all(MAX_ORDER, q).unwrap();
            assert!(v.iter().all(|x| x.is_finite() && x.abs() < 1.0));
        }
    }
}
