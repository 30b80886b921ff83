mod common;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dd_roundtrip((n, rays) in common::vectors()) {
        common::dd_roundtrip(n, &rays)?;
    }

    #[test]
    fn biduality((n, rays) in common::vectors()) {
        common::biduality(n, &rays)?;
    }

    #[test]
    fn dual_of_intersection((n, a, b) in common::two_families()) {
        common::dual_of_intersection(n, &a, &b)?;
    }

    #[test]
    fn decomposition((n, rays) in common::vectors()) {
        common::decomposition(n, &rays)?;
    }

    #[test]
    fn complement_involution((n, vs) in common::vectors()) {
        common::complement_involution(n, &vs)?;
    }
}

#[test]
fn link_identity_on_catalog() {
    let n = common::link_identity_catalog().unwrap();
    assert!(n > 100, "{n}");
}
