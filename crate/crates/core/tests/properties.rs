use std::collections::BTreeSet;

use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wsync_core::analysis::{
    bounded_value_search, certificate_check, dollar_absorption_check, half_bound_check, matrix_oracle,
    witness_schedule_search, ScheduleSearch, SearchConfig,
};
use wsync_core::fixtures::{random_pa, random_value1_pa, random_word};
use wsync_core::format::{parse_document, serialize_document, PaDocument};
use wsync_core::reduction::{build_witness_prefix, check_p1, check_p2, lift, twin, LiftedPa, TwinPa, Value1Instance};
use wsync_core::semantics::{acceptance_probability, norm_trace, outcome, step};
use wsync_core::{Letter, Pa, Prob};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn constructed(seed: u64) -> (Value1Instance, LiftedPa, TwinPa) {
    let mut r = rng(seed);
    let b = Value1Instance::new(random_value1_pa(&mut r, 5, 3, 8)).unwrap();
    let a = lift(&b).unwrap();
    let c = twin(&a).unwrap();
    (b, a, c)
}

fn subset<R: Rng>(r: &mut R, n: usize) -> Vec<usize> {
    (0..n).filter(|_| r.gen_bool(0.5)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_bounds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pa = random_pa(&mut r, 6, 3, 8);
        let w = random_word(&mut r, pa.alphabet(), 10);
        for d in outcome(&pa, &w).unwrap() {
            let support = d.support();
            prop_assert!(!support.is_empty());
            let norm = d.norm();
            let lower = BigRational::new(1.into(), (support.len() as i64).into());
            prop_assert!(norm.value() >= &lower);
            prop_assert_eq!(norm.is_one(), support.len() == 1);
        }
    }

    #[test]
    fn post_set_is_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pa = random_pa(&mut r, 6, 3, 8);
        let s = subset(&mut r, pa.num_states());
        let l = subset(&mut r, pa.num_letters());
        let s2: Vec<usize> = s.iter().copied().chain(subset(&mut r, pa.num_states())).collect();
        let l2: Vec<usize> = l.iter().copied().chain(subset(&mut r, pa.num_letters())).collect();
        prop_assert!(pa.post_set_ix(&s, &l).is_subset(&pa.post_set_ix(&s2, &l2)));
        let expected: BTreeSet<usize> = s.iter().flat_map(|&q| l.iter().flat_map(|&x| pa.post_ix(q, x)).collect::<Vec<_>>()).collect();
        prop_assert_eq!(pa.post_set_ix(&s, &l), expected);
    }

    #[test]
    fn stepwise_matches_matrix_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pa = random_pa(&mut r, 6, 3, 8);
        let w = random_word(&mut r, pa.alphabet(), 20);
        let out = outcome(&pa, &w).unwrap();
        prop_assert_eq!(&out, &matrix_oracle(&pa, &w).unwrap());
        prop_assert!(out.iter().all(|d| d.total() == BigRational::from_integer(1.into())));
    }

    #[test]
    fn prefix_consistency(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pa = random_pa(&mut r, 6, 3, 8);
        let u = random_word(&mut r, pa.alphabet(), 8);
        let v = random_word(&mut r, pa.alphabet(), 8);
        let uv: Vec<Letter> = u.iter().chain(&v).cloned().collect();
        let whole = outcome(&pa, &uv).unwrap();
        let part = outcome(&pa, &u).unwrap();
        prop_assert_eq!(&whole[u.len()], part.last().unwrap());
        let trace = norm_trace(&pa, &uv).unwrap();
        for (i, e) in trace.entries.iter().enumerate() {
            prop_assert_eq!(e.step, i);
            prop_assert_eq!(&e.norm, &e.dist.norm());
            if i > 0 {
                prop_assert_eq!(&e.dist, &step(&pa, &trace.entries[i - 1].dist, e.letter.as_ref().unwrap()).unwrap());
            }
        }
        prop_assert!(acceptance_probability(&pa, &uv).unwrap() <= Prob::one());
    }

    #[test]
    fn constructions_are_well_formed(seed in any::<u64>()) {
        let (b, a, c) = constructed(seed);
        prop_assert!(a.pa().validate().is_ok());
        prop_assert!(c.pa().validate().is_ok());
        let pa = a.pa();
        prop_assert_eq!(pa.post_set_ix(&[a.q_f(), a.q_n()], &pa.all_letters()), BTreeSet::from([a.q_n()]));
        for q in 0..b.pa().num_states() {
            let target = if b.pa().accepting().contains(&q) { a.q_f() } else { a.q_n() };
            prop_assert_eq!(pa.post_ix(q, a.dollar()), BTreeSet::from([target]));
        }
        let reset = c.pa().initial().clone();
        for q in 0..c.pa().num_states() {
            let d = wsync_core::Dist::dirac(c.pa().num_states(), q);
            prop_assert_eq!(&step(c.pa(), &d, &c.hash_letter()).unwrap(), &reset);
        }
    }

    #[test]
    fn acceptance_transfers(seed in any::<u64>()) {
        let (b, a, _) = constructed(seed);
        let mut r = rng(seed ^ 1);
        let w = random_word(&mut r, b.pa().alphabet(), 10);
        let mut wd = w.clone();
        wd.push(a.dollar_letter());
        prop_assert_eq!(acceptance_probability(a.pa(), &wd).unwrap(), acceptance_probability(b.pa(), &w).unwrap());
        prop_assert!(acceptance_probability(a.pa(), &w).unwrap().is_zero());
    }

    #[test]
    fn reset_and_twin_identities(seed in any::<u64>()) {
        let (b, a, c) = constructed(seed);
        let mut r = rng(seed ^ 2);
        let w = random_word(&mut r, b.pa().alphabet(), 15);
        prop_assert!(check_p2(&a, &c, &w).unwrap().passed());
        let v1 = random_word(&mut r, c.pa().alphabet(), 10);
        let v2 = random_word(&mut r, c.pa().alphabet(), 10);
        prop_assert!(check_p1(&c, &v1, &v2).unwrap().passed());
    }

    #[test]
    fn broken_reset_is_rejected(seed in any::<u64>()) {
        let (_, _, c) = constructed(seed);
        let qf = c.pa().state_name(c.q_f()).to_string();
        let qn = c.pa().state_name(c.q_n()).to_string();
        let broken = c.pa().with_row(&qf, c.hash_letter().as_str(), &[(qn.as_str(), Prob::one())]).unwrap();
        prop_assert!(broken.validate().is_ok());
        prop_assert!(TwinPa::from_parts(broken, &c.roles()).is_err());
    }

    #[test]
    fn half_bound_without_dollar(seed in any::<u64>()) {
        let (b, _, c) = constructed(seed);
        let mut r = rng(seed ^ 3);
        let mut letters = b.pa().alphabet().to_vec();
        letters.push(c.hash_letter());
        let w = random_word(&mut r, &letters, 12);
        prop_assert!(half_bound_check(&c, &w).unwrap().passed());
    }

    #[test]
    fn absorption_after_dollar(seed in any::<u64>(), horizon in 0usize..=10) {
        let (_, a, c) = constructed(seed);
        let mut r = rng(seed ^ 4);
        let mut prefix = random_word(&mut r, c.pa().alphabet(), 5);
        prefix.push(c.dollar_letter());
        prefix.extend(random_word(&mut r, a.pa().alphabet(), 4));
        let report = dollar_absorption_check(&c, &prefix, horizon).unwrap();
        prop_assert!(report.passed(), "{}", report);
    }

    #[test]
    fn checkpoint_mass_equals_acceptance(seed in any::<u64>()) {
        let (b, a, c) = constructed(seed);
        let mut r = rng(seed ^ 5);
        let schedule: Vec<_> = (0..3)
            .map(|_| {
                let mut w = random_word(&mut r, b.pa().alphabet(), 4);
                w.push(a.dollar_letter());
                w
            })
            .collect();
        let prefix = build_witness_prefix(&c, &schedule).unwrap();
        let out = outcome(c.pa(), &prefix.word).unwrap();
        for (w, &pos) in schedule.iter().zip(&prefix.checkpoints) {
            prop_assert_eq!(out[pos].mass(c.q_f()), &acceptance_probability(a.pa(), w).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn found_schedules_certify(seed in any::<u64>()) {
        let (b, a, c) = constructed(seed);
        let cfg = SearchConfig::default();
        if let ScheduleSearch::Found(us) = witness_schedule_search(&b, 3, 5, &cfg).unwrap() {
            for (i, u) in us.iter().enumerate() {
                prop_assert!(acceptance_probability(b.pa(), u).unwrap() > Prob::one_minus_pow2(i as u32 + 1));
            }
            prop_assert!(certificate_check(&c, &a.dollar_terminated(&us)).unwrap().passed);
        }
    }

    #[test]
    fn search_is_monotone_and_deterministic(seed in any::<u64>()) {
        let (b, _, _) = constructed(seed);
        let cfg = SearchConfig::default();
        let mut last = Prob::zero();
        for len in 0..=5 {
            let res = bounded_value_search(&b, len, &cfg).unwrap();
            prop_assert!(res.best_prob >= last);
            prop_assert_eq!(&res.best_prob, &acceptance_probability(b.pa(), &res.best_word).unwrap());
            prop_assert_eq!(&res, &bounded_value_search(&b, len, &cfg).unwrap());
            last = res.best_prob;
        }
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let (_, a, c) = constructed(seed);
        let mut r = rng(seed);
        let plain: Pa = random_pa(&mut r, 6, 3, 8);
        for doc in [PaDocument::plain(plain), PaDocument::from_lifted(&a), PaDocument::from_twin(&c)] {
            let back = parse_document(&serialize_document(&doc)).unwrap();
            prop_assert_eq!(&back.pa, &doc.pa);
            prop_assert_eq!(&back.twin, &doc.twin);
        }
    }
}
