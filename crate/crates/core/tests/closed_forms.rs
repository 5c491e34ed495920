use fpselberg_core::{
    classify, eval_closed, relations_check, selberg_direct_2d, FpContext, ResourceLimits,
    SelbergParams,
};
use proptest::prelude::*;

const PRIMES: [u32; 8] = [5, 7, 11, 13, 17, 19, 23, 31];

fn point() -> impl Strategy<Value = (SelbergParams, u32, u32)> {
    prop::sample::select(PRIMES.to_vec()).prop_flat_map(|p| {
        (1..p, 1..p, 1..p, 1u32..=4, 1u32..=4)
            .prop_map(move |(a, b, c, l1, l2)| (SelbergParams::new(p, a, b, c).unwrap(), l1, l2))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn closed_matches_direct_beyond_grid((s, l1, l2) in point()) {
        let ctx = FpContext::new(s.p() as u64).unwrap();
        let direct = selberg_direct_2d(&ctx, &s, l1, l2).unwrap();
        prop_assert_eq!(eval_closed(&ctx, &s, l1, l2).unwrap(), direct);
        prop_assert_eq!(selberg_direct_2d(&ctx, &s, l2, l1).unwrap(), direct);
        prop_assert_eq!(classify(&s, l1, l2).unwrap(), classify(&s, l2, l1).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn relations_beyond_grid((s, _, _) in point()) {
        let ctx = FpContext::new(s.p() as u64).unwrap();
        let report = relations_check(&ctx, &s, &ResourceLimits::default()).unwrap();
        prop_assert!(report.passed(), "{:?}", report);
    }
}
