//! Oracles shared by the integration tests. Nothing here calls into the
//! library's numerical routines.
#![allow(dead_code)]

use detcal::{DarkCount, Efficiency};

pub fn eta(v: f64) -> Efficiency {
    Efficiency::new(v).unwrap()
}

pub fn dc(v: f64) -> DarkCount {
    DarkCount::new(v).unwrap()
}

/// Standard η grid {0.05, 0.10, …, 0.95}.
pub fn standard_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Central finite-difference Fisher information of a pmf-valued function,
/// step `h = 1e-6·max(1, η)`.
pub fn fd_fisher(pmf: impl Fn(f64) -> Vec<f64>, eta: f64) -> f64 {
    let h = 1e-6 * eta.abs().max(1.0);
    let p = pmf(eta);
    let lo = pmf(eta - h);
    let hi = pmf(eta + h);
    (0..p.len())
        .filter(|&k| p[k] > 0.0)
        .map(|k| {
            let d = (hi[k] - lo[k]) / (2.0 * h);
            d * d / p[k]
        })
        .sum()
}

pub fn choose(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre rule: `panels` equal panels of `order` nodes.
pub fn composite_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for &(x, w) in &rule {
            s += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * s;
    }
    total
}

/// Squared Hermite function from the explicit physicists' polynomial,
/// `h_m(q)² e^{−q²} / (2^m m! √π)`; fine for m ≤ 20.
pub fn psi_sq_poly(m: u32, q: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * q);
    let h = if m == 0 {
        h0
    } else {
        for k in 1..m {
            let h2 = 2.0 * q * h1 - 2.0 * k as f64 * h0;
            h0 = h1;
            h1 = h2;
        }
        h1
    };
    let mut norm = std::f64::consts::PI.sqrt();
    for k in 1..=m {
        norm *= 2.0 * k as f64;
    }
    h * h * (-q * q).exp() / norm
}

/// Lossy Fock quadrature density built from [`psi_sq_poly`].
pub fn fock_density_poly(n: u32, eta: f64, q: f64) -> f64 {
    (0..=n)
        .map(|m| choose(n, m) * eta.powi(m as i32) * (1.0 - eta).powi((n - m) as i32) * psi_sq_poly(m, q))
        .sum()
}

/// η-derivative of the lossy Fock density, differentiated by hand.
pub fn fock_density_poly_deriv(n: u32, eta: f64, q: f64) -> f64 {
    (0..=n)
        .map(|m| {
            let a = if m > 0 { m as f64 * eta.powi(m as i32 - 1) * (1.0 - eta).powi((n - m) as i32) } else { 0.0 };
            let b = if n > m { (n - m) as f64 * eta.powi(m as i32) * (1.0 - eta).powi((n - m) as i32 - 1) } else { 0.0 };
            choose(n, m) * (a - b) * psi_sq_poly(m, q)
        })
        .sum()
}

/// Fisher integral of the lossy Fock density on a fixed composite
/// Gauss–Legendre grid (`panels` × 20 nodes on [0, q_max]).
pub fn fock_homodyne_fisher_oracle(n: u32, eta: f64, panels: usize) -> f64 {
    let q_max = (2.0 * n as f64 + 1.0).sqrt() + 10.0;
    2.0 * composite_gl(
        |q| {
            let p = fock_density_poly(n, eta, q);
            let d = fock_density_poly_deriv(n, eta, q);
            if p > 0.0 {
                d * d / p
            } else {
                0.0
            }
        },
        0.0,
        q_max,
        panels,
        20,
    )
}

/// Same integral with a central difference in η instead of the analytic
/// derivative.
pub fn fock_homodyne_fisher_fd(n: u32, eta: f64, panels: usize) -> f64 {
    let h = 1e-5;
    let q_max = (2.0 * n as f64 + 1.0).sqrt() + 10.0;
    2.0 * composite_gl(
        |q| {
            let p = fock_density_poly(n, eta, q);
            let d = (fock_density_poly(n, eta + h, q) - fock_density_poly(n, eta - h, q)) / (2.0 * h);
            if p > 0.0 {
                d * d / p
            } else {
                0.0
            }
        },
        0.0,
        q_max,
        panels,
        20,
    )
}
