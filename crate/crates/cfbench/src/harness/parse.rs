//! Answer extraction from free-form replies.

use crate::item::{Answer, AnswerKind, YesNo};

/// Contents of the last top-level balanced `{...}` group, if any. Stray
/// closing braces outside a group are ignored; an unclosed group at the end
/// does not count.
pub fn last_brace_group(text: &str) -> Option<&str> {
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut last = None;
    for (i, c) in text.char_indices() {
        match c {
            '{' => {
                if depth == 0 {
                    start = i + 1;
                }
                depth += 1;
            }
            '}' if depth > 0 => {
                depth -= 1;
                if depth == 0 {
                    last = Some(&text[start..i]);
                }
            }
            _ => {}
        }
    }
    last
}

/// Parses the final bracketed answer. `None` means unparsed.
pub fn parse_answer(text: &str, kind: AnswerKind) -> Option<Answer> {
    let inner = last_brace_group(text)?.trim();
    match kind {
        AnswerKind::Integer => inner.parse::<i64>().ok().map(Answer::Int),
        AnswerKind::YesNo => {
            if inner.eq_ignore_ascii_case("yes") {
                Some(Answer::YesNo(YesNo::Yes))
            } else if inner.eq_ignore_ascii_case("no") {
                Some(Answer::YesNo(YesNo::No))
            } else {
                None
            }
        }
        AnswerKind::Text => (!inner.is_empty()).then(|| Answer::Text(inner.to_string())),
    }
}

/// Confidence follow-ups: an integer in 0..=100.
pub fn parse_confidence(text: &str) -> Option<i64> {
    parse_answer(text, AnswerKind::Integer)
        .and_then(|a| a.as_int())
        .filter(|n| (0..=100).contains(n))
}
