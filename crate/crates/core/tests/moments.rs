use cardguess::moments::{
    balanced_raw_moment_report, factorial_moment_chat, factorial_moment_w, falling_factorial, raw_moment_chat,
};
use cardguess::{marginal_w, pmf_c, DeckComposition};
use num_bigint::BigInt;

#[test]
fn single_sum_matches_direct_pmf_summation() {
    for deck in DeckComposition::all_up_to(40) {
        let w = marginal_w(&deck);
        let c = pmf_c(&deck).unwrap();
        let m1 = i64::from(deck.m1());
        for s in 1..=5u32 {
            let direct_w = w.expect(|k| falling_factorial(k, s));
            assert_eq!(factorial_moment_w(&deck, s).unwrap(), direct_w, "E[W falling {s}] at {deck}");

            let direct_chat = c.expect(|k| falling_factorial(k - m1, s));
            assert_eq!(factorial_moment_chat(&deck, s).unwrap(), direct_chat, "E[Ĉ falling {s}] at {deck}");

            let direct_raw = c.expect(|k| BigInt::from(k - m1).pow(s));
            assert_eq!(raw_moment_chat(&deck, s).unwrap(), direct_raw, "E[Ĉ^{s}] at {deck}");
        }
    }
}

#[test]
fn balanced_raw_moments_approach_gamma_growth() {
    for s in 1..=4 {
        let gaps: Vec<f64> = [100, 400, 1600, 6400]
            .iter()
            .map(|&m| (balanced_raw_moment_report(m, s).unwrap().ratio.unwrap() - 1.0).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "s = {s}: {gaps:?}");
    }
}
