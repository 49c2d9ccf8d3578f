//! Property tests: the text front ends are total functions — any input
//! yields a value or a structured error, never a panic — and accepted
//! input round-trips.

use logicform::{grammar_successors, parse_lf, sample_lf, serialize_lf, GrammarRegistry, SampleConfig};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

proptest! {
    #[test]
    fn parser_never_panics(input in ".{0,200}") {
        let reg = GrammarRegistry::default_registry();
        let _ = parse_lf(&input, &reg);
    }

    #[test]
    fn parser_never_panics_on_structured_soup(
        words in proptest::collection::vec(
            prop_oneof![
                Just("{".to_string()),
                Just("}".to_string()),
                Just(";".to_string()),
                Just("eq".to_string()),
                Just("avg".to_string()),
                Just("all_rows".to_string()),
                Just("filter_str_eq".to_string()),
                Just("5".to_string()),
                Just("w".to_string()),
            ],
            0..40,
        )
    ) {
        let reg = GrammarRegistry::default_registry();
        let _ = parse_lf(&words.join(" "), &reg);
    }

    #[test]
    fn successor_machine_never_panics(input in ".{0,120}") {
        let reg = GrammarRegistry::default_registry();
        let _ = grammar_successors(&input, &reg);
    }

    #[test]
    fn sampled_statements_round_trip(seed in any::<u64>()) {
        let reg = GrammarRegistry::default_registry();
        let mut rng = StdRng::seed_from_u64(seed);
        let lf = sample_lf(&mut rng, &reg, &SampleConfig::default());
        let text = serialize_lf(&lf);
        let back = parse_lf(&text, &reg).expect("serialized statements parse");
        prop_assert_eq!(back, lf);
    }

    #[test]
    fn prefixes_of_valid_statements_always_have_successors(
        seed in any::<u64>(),
        cut in 0usize..60,
    ) {
        let reg = GrammarRegistry::default_registry();
        let mut rng = StdRng::seed_from_u64(seed);
        let lf = sample_lf(&mut rng, &reg, &SampleConfig::default());
        let text = serialize_lf(&lf);
        let words: Vec<&str> = text.split(' ').collect();
        let prefix = words[..cut.min(words.len())].join(" ");
        let options = grammar_successors(&prefix, &reg).expect("prefix of a valid statement");
        prop_assert!(!options.is_empty());
    }
}
