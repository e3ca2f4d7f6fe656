mod common;

use proptest::prelude::*;
use ridgeless_core::generalization::gradient_estimate_failures;
use ridgeless_core::network::{network_to_pl, pl_to_network};
use ridgeless_core::oracle::{grid_tv_minimize, GridOptions};
use ridgeless_core::propositions::check_all;
use ridgeless_core::sample::member_from_tangents;
use ridgeless_core::{
    characterize, perturb_to_nonmember, sample_member, verify_lip_domination, Breakpoint,
    Characterization, Dataset, PiecewiseLinear, SampleKnobs, TangentRule, Verdict,
};

const TOL: f64 = 1e-9;

fn arb_pl() -> impl Strategy<Value = PiecewiseLinear> {
    (
        -5.0..5.0f64,
        -5.0..5.0f64,
        -3.0..3.0f64,
        prop::collection::vec((-10.0..10.0f64, -4.0..4.0f64), 0..8),
    )
        .prop_map(|(x0, y0, left, bps)| {
            let bps = bps.into_iter().map(|(at, jump)| Breakpoint { at, jump }).collect();
            PiecewiseLinear::new((x0, y0), left, bps).unwrap()
        })
}

fn arb_characterization() -> impl Strategy<Value = Characterization> {
    any::<u64>().prop_map(|s| characterize(&common::random_dataset(s)))
}

fn reflected(d: &Dataset) -> Dataset {
    Dataset::new(d.points().iter().map(|&(x, y)| (x, -y)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn evaluation_paths_agree(f in arb_pl(), x in -12.0..12.0f64) {
        let a = f.evaluate(x);
        let b = f.evaluate_by_integration(x);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn canonicalization_is_idempotent(f in arb_pl()) {
        let once = f.canonicalized();
        prop_assert_eq!(once.canonicalized(), once);
    }

    #[test]
    fn tv_ignores_affine_terms_and_scales(f in arb_pl(), a in -3.0..3.0f64, b in -3.0..3.0f64, k in -4.0..4.0f64) {
        let tv = f.tv_of_derivative();
        prop_assert!((f.plus_affine(a, b).tv_of_derivative() - tv).abs() <= 1e-9 * (1.0 + tv));
        prop_assert!((f.scaled(k).tv_of_derivative() - k.abs() * tv).abs() <= 1e-9 * (1.0 + tv));
    }

    #[test]
    fn members_pass_both_tests(ch in arb_characterization(), seed in any::<u64>()) {
        let f = sample_member(&ch, seed, SampleKnobs::default());
        let r = ch.check(&f, TOL);
        prop_assert!(r.direct_pass && r.tv_pass, "{:?}", r.violations);
        prop_assert!(check_all(&ch, &f, TOL).is_empty());
        prop_assert!(gradient_estimate_failures(&ch, &f, TOL).is_empty());
    }

    #[test]
    fn support_line_members_pass(ch in arb_characterization()) {
        let f = sample_member(&ch, 0, SampleKnobs { rule: TangentRule::SupportLines });
        prop_assert!(ch.check(&f, TOL).is_member);
    }

    #[test]
    fn perturbed_members_fail_both_tests(ch in arb_characterization(), seed in any::<u64>()) {
        let f = sample_member(&ch, seed, SampleKnobs::default());
        let g = perturb_to_nonmember(&ch, &f, seed);
        for (x, y) in ch.dataset.points() {
            prop_assert!((g.evaluate(*x) - y).abs() <= 1e-9 * (1.0 + y.abs()));
        }
        let r = ch.check(&g, TOL);
        prop_assert!(!r.direct_pass && !r.tv_pass);
    }

    #[test]
    fn out_of_bracket_tangent_is_rejected(ch in arb_characterization(), push in 0.01..1.0f64) {
        prop_assume!(!ch.blocks.is_empty());
        let s = &ch.profile.slopes;
        let b = &ch.blocks[0];
        let mut tangents: Vec<Vec<f64>> = ch
            .blocks
            .iter()
            .map(|b| (b.first_knot..=b.last_knot).map(|j| 0.5 * (s[j - 1] + s[j])).collect())
            .collect();
        // steeper than the outgoing chord at the block's last knot
        let j = b.last_knot;
        let dir = b.sign.sign() as f64;
        tangents[0][j - b.first_knot] = s[j] + dir * push * (1.0 + s[j].abs());
        let f = member_from_tangents(&ch, &tangents);
        let r = ch.check(&f, TOL);
        prop_assert_eq!(r.direct_pass, r.tv_pass);
        prop_assert!(!r.direct_pass);
    }

    #[test]
    fn any_interpolant_costs_at_least_the_minimum(ch in arb_characterization(), bumps in prop::collection::vec(-2.0..2.0f64, 12)) {
        // add a kinked but data-preserving bump on every interval
        let d = &ch.dataset;
        let mut f = ch.f_d.clone();
        for i in 0..d.len() - 1 {
            let (lo, hi) = (d.x(i), d.x(i + 1));
            let mid = 0.5 * (lo + hi);
            let k = bumps[i % bumps.len()] / (mid - lo);
            let tent = PiecewiseLinear::new((lo, 0.0), 0.0, vec![
                Breakpoint { at: lo, jump: k },
                Breakpoint { at: mid, jump: -2.0 * k },
                Breakpoint { at: hi, jump: k },
            ]).unwrap();
            f = f.plus(&tent);
        }
        prop_assert!(f.tv_of_derivative() >= ch.minimal_tv - TOL * ch.minimal_tv.max(1.0));
    }

    #[test]
    fn characterization_is_affine_invariant(seed in any::<u64>(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let d = common::random_dataset(seed);
        let shifted = Dataset::new(d.points().iter().map(|&(x, y)| (x, y + a * x + b)).collect()).unwrap();
        let (c0, c1) = (characterize(&d), characterize(&shifted));
        prop_assert!((c0.minimal_tv - c1.minimal_tv).abs() <= 1e-9 * c0.minimal_tv.max(1.0));
        let free = |c: &Characterization| c.verdicts.iter().map(|v| matches!(v.verdict, Verdict::Free { .. })).collect::<Vec<_>>();
        prop_assert_eq!(free(&c0), free(&c1));
    }

    #[test]
    fn reflection_flips_block_signs(seed in any::<u64>()) {
        let d = common::random_dataset(seed);
        let (c0, c1) = (characterize(&d), characterize(&reflected(&d)));
        prop_assert_eq!(c0.minimal_tv, c1.minimal_tv);
        prop_assert_eq!(c0.blocks.len(), c1.blocks.len());
        for (p, q) in c0.blocks.iter().zip(&c1.blocks) {
            prop_assert_eq!(p.sign.negate(), q.sign);
            prop_assert_eq!((p.first_knot, p.last_knot), (q.first_knot, q.last_knot));
        }
    }

    #[test]
    fn tv_formulas_agree_bitwise(ch in arb_characterization()) {
        prop_assert_eq!(ch.minimal_tv.to_bits(), ch.minimal_tv_via_inflections.to_bits());
    }

    #[test]
    fn network_round_trip_and_cost(f in arb_pl()) {
        let net = pl_to_network(&f);
        let tv = f.tv_of_derivative();
        prop_assert!((net.cost() - tv).abs() <= 1e-12 * tv.max(f64::MIN_POSITIVE));
        prop_assert!(network_to_pl(&net).approx_same(&f, 1e-12));
        for k in 0..=40 {
            let x = -12.0 + 0.6 * k as f64;
            prop_assert!((net.evaluate(x) - f.evaluate(x)).abs() <= 1e-9 * (1.0 + f.evaluate(x).abs()));
        }
    }

    #[test]
    fn members_never_exceed_chord_lipschitz(ch in arb_characterization(), seed in any::<u64>()) {
        let members: Vec<_> = (0..4).map(|k| sample_member(&ch, seed.wrapping_add(k), SampleKnobs::default())).collect();
        let l = ch.f_d.lipschitz_norm();
        prop_assert!(verify_lip_domination(&ch.dataset, &members, l).pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_brackets_the_minimum(ch in arb_characterization(), g in 1usize..12) {
        let sol = grid_tv_minimize(&ch.dataset, GridOptions { points_per_gap: g, ..GridOptions::default() }).unwrap();
        let slack = 1e-9 * ch.minimal_tv.max(1.0);
        prop_assert!(sol.min_tv >= ch.minimal_tv - slack);
        prop_assert!(sol.min_tv <= ch.f_d.tv_of_derivative() + slack);
        let finer = grid_tv_minimize(&ch.dataset, GridOptions { points_per_gap: 2 * g, ..GridOptions::default() }).unwrap();
        prop_assert!(finer.min_tv <= sol.min_tv + slack);
    }
}
