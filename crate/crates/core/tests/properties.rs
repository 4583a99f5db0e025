use cogsim_core::ingest::Dictionary;
use cogsim_core::{filter_dictionary, score_guess, w1_distance, Feedback, TrialDistribution, Word};
use proptest::prelude::*;

fn word() -> impl Strategy<Value = Word> {
    // a small alphabet makes repeated letters and shared letters common
    "[abcelrt]{5}".prop_map(|s| Word::parse(&s).unwrap())
}

fn dictionary() -> impl Strategy<Value = Dictionary> {
    prop::collection::btree_map("[abcelrt]{5}", 1u32..1000, 1..40).prop_map(|m| {
        Dictionary::from_weights(m.into_iter().map(|(s, f)| (Word::parse(&s).unwrap(), f64::from(f)))).unwrap()
    })
}

fn distribution() -> impl Strategy<Value = TrialDistribution> {
    prop::array::uniform7(0u32..100)
        .prop_filter("non-zero mass", |w| w.iter().any(|&x| x > 0))
        .prop_map(|w| TrialDistribution::from_weights(w.map(f64::from)).unwrap())
}

proptest! {
    #[test]
    fn all_green_iff_equal(g in word(), t in word()) {
        prop_assert_eq!(score_guess(g, t) == Feedback::ALL_GREEN, g == t);
    }

    #[test]
    fn target_survives_its_own_clue(d in dictionary(), g in word(), pick in any::<prop::sample::Index>()) {
        let words: Vec<Word> = d.words().collect();
        let target = words[pick.index(words.len())];
        let filtered = filter_dictionary(&d, g, score_guess(g, target));
        prop_assert!(filtered.contains(target));
        prop_assert!(filtered.words().all(|x| score_guess(g, x) == score_guess(g, target)));
    }

    #[test]
    fn filter_is_idempotent(d in dictionary(), g in word(), t in word()) {
        let fb = score_guess(g, t);
        let once = filter_dictionary(&d, g, fb);
        let twice = filter_dictionary(&once, g, fb);
        prop_assert_eq!(once.entries(), twice.entries());
    }

    #[test]
    fn order_is_independent_of_input_order(
        m in prop::collection::btree_map("[abcelrt]{5}", 1u32..1000, 1..40),
        seed in any::<u64>(),
    ) {
        // integer weights sum exactly in any order
        let mut pairs: Vec<(Word, f64)> = m.iter().map(|(s, &f)| (Word::parse(s).unwrap(), f64::from(f))).collect();
        let sorted = Dictionary::from_weights(pairs.clone()).unwrap();
        let n = pairs.len();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            pairs.swap(i, (s >> 33) as usize % (i + 1));
        }
        let shuffled = Dictionary::from_weights(pairs).unwrap();
        prop_assert_eq!(shuffled.entries(), sorted.entries());
    }

    #[test]
    fn csv_round_trip(d in dictionary()) {
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = Dictionary::from_reader(buf.as_slice()).unwrap();
        // reloading renormalizes, which may move the last bit
        prop_assert_eq!(back.len(), d.len());
        for (a, b) in back.entries().iter().zip(d.entries()) {
            prop_assert_eq!(a.word, b.word);
            prop_assert!((a.freq - b.freq).abs() <= 1e-14 * b.freq);
        }
    }

    #[test]
    fn w1_is_a_metric(p in distribution(), q in distribution(), r in distribution()) {
        prop_assert_eq!(w1_distance(&p, &q), w1_distance(&q, &p));
        prop_assert_eq!(w1_distance(&p, &p), 0.0);
        prop_assert!(w1_distance(&p, &r) <= w1_distance(&p, &q) + w1_distance(&q, &r) + 1e-12);
        prop_assert!(w1_distance(&p, &q) <= 6.0 + 1e-12);
    }

    #[test]
    fn w1_of_unit_shift(k in 1usize..7) {
        let a = TrialDistribution::point_mass(k);
        let b = TrialDistribution::point_mass(k + 1);
        prop_assert!((w1_distance(&a, &b) - 1.0).abs() < 1e-15);
    }
}
