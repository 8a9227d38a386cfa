use hdisc::fixtures::Frozen;
use hdisc_core::Q;
use hdisc_oracle::free_group_length_counts;
use std::str::FromStr;

fn f64_of(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// The frozen mean word lengths sit within four standard errors of the exact law.
#[test]
fn frozen_drift_curve_agrees_with_exact_law() {
    let f = Frozen::builtin();
    let trials = f.drift.trials as f64;
    for (i, m) in f.mean_distance.iter().enumerate() {
        let n = i + 1;
        let counts = free_group_length_counts(n);
        let total = 4f64.powi(n as i32);
        let mean: f64 = counts.iter().enumerate().map(|(k, &c)| k as f64 * c as f64).sum::<f64>() / total;
        let second: f64 = counts.iter().enumerate().map(|(k, &c)| (k * k) as f64 * c as f64).sum::<f64>() / total;
        let se = ((second - mean * mean) / trials).sqrt();
        let got = f64_of(Q::from_str(m).unwrap());
        if se == 0.0 {
            assert_eq!(got, mean, "n = {n}");
        } else {
            assert!((got - mean).abs() <= 4.0 * se, "n = {n}: {got} vs {mean} (se {se})");
        }
    }
}

/// Past the first step the exact expected length grows by 1/2 per step.
#[test]
fn exact_law_has_drift_one_half() {
    let mean = |n: usize| -> Q {
        let c = free_group_length_counts(n);
        let s: u128 = c.iter().enumerate().map(|(k, &w)| k as u128 * w).sum();
        Q::new(s as i64, 4i64.pow(n as u32))
    };
    for n in 1..12 {
        let step = mean(n + 1) - mean(n);
        assert!(step >= Q::new(1, 2), "n = {n}");
    }
    let step = mean(20) - mean(19);
    assert!(f64_of(step) - 0.5 < 1e-6);
}
