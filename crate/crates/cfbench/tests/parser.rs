use cfbench::harness::{parse_answer, parse_confidence};
use cfbench::{Answer, AnswerKind, YesNo};
use proptest::prelude::*;

const CASES: u32 = 10_000;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: CASES,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// Free text with no braces at all.
fn prose() -> impl Strategy<Value = String> {
    "[^{}]{0,80}"
}

/// Text that may contain complete earlier brace groups.
fn prose_with_groups() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            prose(),
            (-50i64..50).prop_map(|n| format!("{{{n}}}")),
            Just("{Yes}".to_string()),
            Just("{maybe 3}".to_string()),
            Just("{}".to_string()),
        ],
        0..5,
    )
    .prop_map(|v| v.concat())
}

fn case_variant(word: &'static str) -> impl Strategy<Value = String> {
    prop::collection::vec(any::<bool>(), word.len()).prop_map(move |up| {
        word.chars()
            .zip(up)
            .map(|(c, u)| if u { c.to_ascii_uppercase() } else { c })
            .collect()
    })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn final_integer_is_recovered(
        pre in prose_with_groups(),
        n in any::<i32>(),
        pad_l in " {0,2}",
        pad_r in " {0,2}",
        post in prose(),
    ) {
        let text = format!("{pre}{{{pad_l}{n}{pad_r}}}{post}");
        prop_assert_eq!(parse_answer(&text, AnswerKind::Integer), Some(Answer::Int(n as i64)));
    }

    #[test]
    fn final_yes_no_is_recovered(
        pre in prose_with_groups(),
        word in prop_oneof![case_variant("yes"), case_variant("no")],
        post in prose(),
    ) {
        let want = if word.eq_ignore_ascii_case("yes") { YesNo::Yes } else { YesNo::No };
        let text = format!("{pre}{{{word}}}{post}");
        prop_assert_eq!(parse_answer(&text, AnswerKind::YesNo), Some(Answer::YesNo(want)));
    }

    #[test]
    fn no_braces_is_unparsed(text in prose()) {
        prop_assert_eq!(parse_answer(&text, AnswerKind::Integer), None);
        prop_assert_eq!(parse_answer(&text, AnswerKind::YesNo), None);
        prop_assert_eq!(parse_answer(&text, AnswerKind::Text), None);
    }

    #[test]
    fn confidence_is_bounded(pre in prose(), n in -200i64..300) {
        let got = parse_confidence(&format!("{pre}{{{n}}}"));
        prop_assert_eq!(got, (0..=100).contains(&n).then_some(n));
    }
}

#[test]
fn documented_examples() {
    let int = |s: &str| parse_answer(s, AnswerKind::Integer);
    assert_eq!(int("I count {5} legs"), Some(Answer::Int(5)));
    assert_eq!(int("first {3}, on reflection {4}."), Some(Answer::Int(4)));
    assert_eq!(int("The answer is {four}"), None);
    assert_eq!(int("unclosed {7"), None);
    assert_eq!(int("nested {{6}}"), None);
    assert_eq!(
        parse_answer("Answer: { No }", AnswerKind::YesNo),
        Some(Answer::no())
    );
    assert_eq!(parse_answer("{Yes.}", AnswerKind::YesNo), None);
}
