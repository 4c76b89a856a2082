use proptest::prelude::*;
use xgenre::ngram_lm::{train_lm, NGramLM};
use xgenre::textproc::Sentence;

fn sentences() -> impl Strategy<Value = Vec<Sentence>> {
    let word = prop::sample::select(vec!["a", "b", "c", "d", "e"]);
    prop::collection::vec(prop::collection::vec(word, 1..7), 1..6).prop_map(|ss| {
        ss.into_iter()
            .map(|s| Sentence::new(s.into_iter().map(String::from).collect()).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_context_sums_to_one(ss in sentences(), order in 1usize..=5, prune: bool) {
        let lm = train_lm(&ss, order, prune).unwrap();
        prop_assert!(lm.max_normalization_error() < 1e-9);
    }

    #[test]
    fn arpa_text_round_trips(ss in sentences(), order in 1usize..=4) {
        let lm = train_lm(&ss, order, false).unwrap();
        let back = NGramLM::from_arpa(&lm.to_arpa()).unwrap();
        prop_assert_eq!(back.to_arpa(), lm.to_arpa());
        for s in &ss {
            let (a, b) = (lm.score_sentence(s), back.score_sentence(s));
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
    }
}

#[test]
fn unseen_words_score_as_unknown() {
    let ss = vec![Sentence::from_words("a b a").unwrap()];
    let lm = train_lm(&ss, 2, false).unwrap();
    assert_eq!(lm.log_prob(&[], "zebra"), lm.log_prob(&[], "<unk>"));
    assert!(lm.score_tokens(&["zebra"]).is_finite());
}

#[test]
fn arpa_file_round_trip() {
    let ss = vec![
        Sentence::from_words("the cat sat").unwrap(),
        Sentence::from_words("the dog sat down").unwrap(),
    ];
    let lm = train_lm(&ss, 3, false).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("lm.arpa");
    lm.save(&p).unwrap();
    let back = NGramLM::load(&p).unwrap();
    assert_eq!(back.order(), 3);
    assert_eq!(back.to_arpa(), lm.to_arpa());
}
