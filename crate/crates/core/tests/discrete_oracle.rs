mod common;

use common::{choose, dc, eta, fd_fisher, rel_err, standard_grid};
use detcal::discrete::{
    fisher_koutcome, fisher_koutcome_fock, fisher_koutcome_fock_multinomial, fisher_onoff_coherent, fisher_onoff_fock,
    fisher_onoff_heralded, fisher_onoff_mixture, koutcome_claimed_closed_form,
};
use detcal::{FockMixture, ProbeState};
use proptest::prelude::*;

fn val(r: detcal::Result<detcal::FisherResult>) -> f64 {
    r.unwrap().value().expect("finite Fisher value")
}

fn two_outcome(p_off: f64) -> Vec<f64> {
    vec![p_off, 1.0 - p_off]
}

#[test]
fn fock_matches_finite_difference() {
    for delta in [0.0f64, 0.05, 0.3] {
        for n in 1..=8u32 {
            for e in standard_grid() {
                let oracle = fd_fisher(|x| two_outcome((-delta).exp() * (1.0 - x).powi(n as i32)), e);
                let got = val(fisher_onoff_fock(n, eta(e), dc(delta)));
                assert!(rel_err(got, oracle) < 1e-6, "n={n} η={e} δ={delta}: {got} vs {oracle}");
            }
        }
    }
}

#[test]
fn coherent_matches_finite_difference() {
    for delta in [0.0f64, 0.05] {
        for x in [0.5, 1.0, 3.0, 5.0] {
            for e in standard_grid() {
                let oracle = fd_fisher(|y| two_outcome((-delta - y * x).exp()), e);
                let got = val(fisher_onoff_coherent(x, eta(e), dc(delta)));
                assert!(rel_err(got, oracle) < 1e-6, "x={x} η={e}: {got} vs {oracle}");
            }
        }
    }
}

#[test]
fn heralded_matches_finite_difference() {
    for delta in [0.0f64, 0.05] {
        for xi in [0.1, 1.0 / std::f64::consts::E, 0.8, 1.0] {
            for e in standard_grid() {
                let oracle = fd_fisher(|y| two_outcome((-delta).exp() * (1.0 - xi * y)), e);
                let got = val(fisher_onoff_heralded(xi, eta(e), dc(delta)));
                assert!(rel_err(got, oracle) < 1e-6, "ξ={xi} η={e}: {got} vs {oracle}");
            }
        }
    }
}

#[test]
fn mixture_matches_finite_difference() {
    let mixtures = [
        vec![(1u32, 0.5), (3, 0.5)],
        vec![(0, 0.2), (2, 0.3), (7, 0.5)],
        vec![(4, 1.0)],
    ];
    for comps in mixtures {
        let m = FockMixture::new(comps.clone()).unwrap();
        for e in standard_grid() {
            let oracle = fd_fisher(|y| two_outcome(comps.iter().map(|&(j, w)| w * (1.0 - y).powi(j as i32)).sum()), e);
            let got = val(fisher_onoff_mixture(&m, eta(e), dc(0.0)));
            assert!(rel_err(got, oracle) < 1e-6, "{comps:?} η={e}: {got} vs {oracle}");
        }
    }
}

#[test]
fn koutcome_matches_finite_difference() {
    for n in 1..=6u32 {
        for k in 2..=(n + 1) {
            for e in standard_grid() {
                let pmf = |y: f64| {
                    let mut p: Vec<f64> = (0..k - 1)
                        .map(|m| choose(n, m) * y.powi(m as i32) * (1.0 - y).powi((n - m) as i32))
                        .collect();
                    let tail = (k - 1..=n)
                        .map(|m| choose(n, m) * y.powi(m as i32) * (1.0 - y).powi((n - m) as i32))
                        .sum();
                    p.push(tail);
                    p
                };
                let oracle = fd_fisher(pmf, e);
                let got = val(fisher_koutcome_fock(n, k, eta(e)));
                assert!(rel_err(got, oracle) < 1e-6, "n={n} K={k} η={e}: {got} vs {oracle}");
            }
        }
    }
}

#[test]
fn noiseless_reduces_to_plain_closed_form() {
    for n in 1..=20u32 {
        for e in standard_grid() {
            let plain = (n * n) as f64 * (1.0 - e).powi(n as i32 - 2) / (1.0 - (1.0 - e).powi(n as i32));
            let got = val(fisher_onoff_fock(n, eta(e), dc(0.0)));
            assert!(rel_err(got, plain) < 1e-13, "n={n} η={e}");
        }
    }
}

#[test]
fn fock_bounded_by_single_photon_multiples() {
    for n in 1..=20u32 {
        for e in standard_grid() {
            let fn_ = val(fisher_onoff_fock(n, eta(e), dc(0.0)));
            let f1 = val(fisher_onoff_fock(1, eta(e), dc(0.0)));
            assert!(fn_ <= n as f64 * f1 * (1.0 + 1e-14), "n={n} η={e}");
        }
    }
}

#[test]
fn single_photon_beats_coherent() {
    for i in 1..1000 {
        let e = i as f64 / 1000.0;
        assert!(val(fisher_onoff_fock(1, eta(e), dc(0.0))) >= val(fisher_onoff_coherent(1.0, eta(e), dc(0.0))));
    }
}

#[test]
fn low_efficiency_equivalence() {
    for e in [1e-4, 1e-3, 5e-3, 0.01] {
        let f3 = val(fisher_onoff_fock(3, eta(e), dc(0.0)));
        let f1 = val(fisher_onoff_fock(1, eta(e), dc(0.0)));
        assert!((f3 - 3.0 * f1).abs() / (3.0 * f1) <= 0.02, "η={e}");
    }
}

#[test]
fn dark_counts_favour_large_fock_states() {
    let found = (1..=100).map(|i| i as f64 * 1e-3).any(|e| {
        val(fisher_onoff_fock(5, eta(e), dc(0.05))) > 5.0 * val(fisher_onoff_fock(1, eta(e), dc(0.05)))
    });
    assert!(found);
}

#[test]
fn koutcome_closed_form_equals_multinomial() {
    for n in 0..=10u32 {
        for k in 2..=(n + 1).max(2) {
            for i in 1..=9 {
                let e = eta(i as f64 / 10.0);
                let closed = val(fisher_koutcome_fock(n, k, e));
                let multi = val(fisher_koutcome_fock_multinomial(n, k, e));
                assert!(
                    (closed - multi).abs() <= 1e-10 * multi.abs().max(1e-300),
                    "n={n} K={k} η={}: {closed} vs {multi}",
                    e.get()
                );
            }
        }
    }
}

#[test]
fn koutcome_claimed_form_matches_fully_resolved_probe() {
    let sum = val(fisher_koutcome_fock(3, 3, eta(0.5)));
    let claimed = koutcome_claimed_closed_form(3, eta(0.5)).unwrap();
    assert!((sum - 10.5).abs() < 1e-12);
    assert_eq!(claimed, 8.0);
    // the claimed value is what n = K−1 photons give on a K-outcome detector,
    // where every photon number is resolved
    for k in 2..=8u32 {
        for i in 1..10 {
            let e = eta(i as f64 / 10.0);
            let claimed = koutcome_claimed_closed_form(k, e).unwrap();
            assert!(rel_err(val(fisher_koutcome_fock(k - 1, k, e)), claimed) < 1e-12);
            assert!(rel_err(val(fisher_koutcome_fock(k, k, e)), claimed) > 1e-3, "K={k}");
        }
    }
}

/// Which photon number n ∈ K−1..=K+10 maximizes the K-outcome Fisher
/// information. Computed and reported rather than assumed: per single probe,
/// larger n wins at low η, so n = K is not optimal everywhere; per photon
/// spent, n = K−1 (fully resolved) is never beaten.
#[test]
fn koutcome_best_photon_number_survey() {
    for k in 2..=5u32 {
        let mut per_probe = Vec::new();
        for i in 1..=9 {
            let e = eta(i as f64 / 10.0);
            let best = (k.max(2) - 1..=k + 10)
                .filter(|&n| n >= 1)
                .max_by(|&a, &b| {
                    val(fisher_koutcome_fock(a, k, e)).total_cmp(&val(fisher_koutcome_fock(b, k, e)))
                })
                .unwrap();
            per_probe.push(best);
            for n in (k - 1).max(1)..=k + 10 {
                let per_photon = val(fisher_koutcome_fock(n, k, e)) / n as f64;
                let resolved = val(fisher_koutcome_fock((k - 1).max(1), k, e)) / (k - 1).max(1) as f64;
                assert!(per_photon <= resolved * (1.0 + 1e-12), "K={k} n={n} η={}", e.get());
            }
        }
        println!("K={k}: per-probe optimal n over η=0.1..0.9 = {per_probe:?}");
        assert!(per_probe.iter().any(|&n| n != k), "K={k}: n=K optimal everywhere");
    }
}

#[test]
fn coherent_koutcome_matches_finite_difference() {
    let x = 2.5;
    for k in 2..=5u32 {
        for e in standard_grid() {
            let pmf = |y: f64| {
                let lambda = y * x;
                let mut p = Vec::new();
                let mut fact = 1.0;
                for m in 0..k - 1 {
                    if m > 0 {
                        fact *= m as f64;
                    }
                    p.push((-lambda).exp() * lambda.powi(m as i32) / fact);
                }
                let resolved: f64 = p.iter().sum();
                p.push(1.0 - resolved);
                p
            };
            let got = val(fisher_koutcome(&ProbeState::Coherent { mean_photons: x }, k, eta(e)));
            let oracle = fd_fisher(pmf, e);
            assert!(rel_err(got, oracle) < 1e-6, "K={k} η={e}: {got} vs {oracle}");
        }
    }
}

fn mixture_strategy() -> impl Strategy<Value = Vec<(u32, f64)>> {
    prop::collection::vec((0u32..=10, 0.0f64..1.0), 1..6).prop_filter_map("nonzero weight", |v| {
        let total: f64 = v.iter().map(|&(_, w)| w).sum();
        (total > 1e-6).then(|| v.into_iter().map(|(j, w)| (j, w / total)).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn mixtures_obey_the_single_photon_bound(comps in mixture_strategy(), i in 1usize..=19) {
        let e = eta(i as f64 * 0.05);
        let renorm: f64 = comps.iter().map(|&(_, w)| w).sum();
        let comps: Vec<(u32, f64)> = comps.into_iter().map(|(j, w)| (j, w / renorm)).collect();
        let m = FockMixture::new(comps).unwrap();
        let f = val(fisher_onoff_mixture(&m, e, dc(0.0)));
        let bound = m.mean_photon_number() * val(fisher_onoff_fock(1, e, dc(0.0)));
        prop_assert!(f <= bound + 1e-12 * bound.max(1.0), "F={f} bound={bound}");
    }

    #[test]
    fn fock_bound_holds_off_grid(n in 1u32..=20, x in 0.001f64..0.999) {
        let fn_ = val(fisher_onoff_fock(n, eta(x), dc(0.0)));
        let f1 = val(fisher_onoff_fock(1, eta(x), dc(0.0)));
        prop_assert!(fn_ <= n as f64 * f1 * (1.0 + 1e-13));
    }

    #[test]
    fn distributions_are_normalized(n in 0u32..=12, k in 2u32..=8, x in 0.01f64..0.99) {
        // construction validates Σp = 1 and Σ∂p = 0; failure would surface as Err
        let d = detcal::discrete::koutcome_distribution(&ProbeState::fock(n), k, eta(x));
        prop_assert!(d.is_ok());
        let d = detcal::discrete::onoff_distribution(&ProbeState::fock(n), eta(x), dc(0.1));
        prop_assert!(d.is_ok());
    }
}
