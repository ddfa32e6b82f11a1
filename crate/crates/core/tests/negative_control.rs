//! Built only with `--features negative-control`, which corrupts the
//! triangle delta fast path. The oracle suite must notice.
#![cfg(feature = "negative-control")]

use ergm::experiments::validate::QUICK;
use ergm::rng::DEFAULT_SEED;

#[test]
fn delta_equivalence_catches_corrupted_fast_path() {
    let (_, check) = QUICK.iter().find(|(name, _)| *name == "delta_equivalence").unwrap();
    let (passed, detail) = check(DEFAULT_SEED).unwrap();
    assert!(!passed, "corruption went unnoticed: {detail}");
}
