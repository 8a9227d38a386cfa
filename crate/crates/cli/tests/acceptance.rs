//! One PASS/FAIL line per acceptance criterion. Tolerances live in `hdisc::suite` and
//! the frozen values in `fixtures/frozen.json`; both are restated here so a change to
//! either shows up as a diff in this file.

use hdisc::fixtures::Frozen;
use hdisc::suite::{self, outcomes};
use hdisc::DEFAULT_SEED;
use hdisc_core::Q;

fn pinned_tolerances() {
    assert_eq!(suite::SURGERY_PAIRS, 200);
    assert_eq!(suite::SURGERY_TIME_LIMIT.as_secs(), 60);
    assert_eq!(suite::PAIRING_INSTANCES, 120);
    assert_eq!(suite::PAIRING_MAX_POINTS, 10);
    assert_eq!(suite::MIN_BICORNS, 100);
    assert_eq!(suite::ENUM_WEIGHT_MAX, 2);
    assert_eq!(suite::LOXODROMIC_FRACTION, (1, 2));
    assert_eq!(suite::ROTATION_MAX_SLOPE, (1, 20));
    let f = Frozen::builtin();
    assert_eq!(f.k_max, Q::from_integer(1));
    assert_eq!(f.c_max, Q::from_integer(0));
    assert_eq!(f.shadow_slope, Q::from_integer(3));
    assert_eq!(f.b_slope, Q::from_integer(1));
    assert_eq!(f.fraction_above, Q::new(349, 400));
    assert_eq!(f.drift.trials, 2000);
    assert_eq!(f.mean_distance.len(), f.drift.length);
}

fn main() {
    pinned_tolerances();
    let ids: Vec<usize> = (1..=10).collect();
    let results = outcomes(&ids, DEFAULT_SEED, &Frozen::builtin());
    for o in &results {
        println!("{}", o.line());
    }
    assert_eq!(results.iter().map(|o| o.id).collect::<Vec<_>>(), ids);
    let failed = results.iter().filter(|o| !o.pass).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
