//! Word tokenization for cleaned Bengali (and mixed-script) text.
//!
//! Tokens are maximal runs of non-separator characters. Separators are
//! Unicode whitespace plus the punctuation set in [`is_separator`]. Vowel
//! signs, viramas, nukta and ZWJ/ZWNJ are never separators, so a grapheme
//! cluster built on a consonant stays inside one token. Letters are
//! lower-cased (a no-op for Bengali); digits and mixed-script runs are kept
//! whole. No stemming or stop-word removal is applied.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

/// Bengali danda `।`.
pub const DANDA: char = '\u{0964}';
/// Bengali double danda `॥`.
pub const DOUBLE_DANDA: char = '\u{0965}';

/// Unicode whitespace, ASCII punctuation, danda and double danda, the
/// General Punctuation ranges U+2010–U+2027 and U+2030–U+205E (dashes,
/// quotes, ellipsis, per-mille...), plus `«»¡¿` and the CJK/fullwidth
/// comma and full stop.
pub fn is_separator(c: char) -> bool {
    c.is_whitespace()
        || c.is_ascii_punctuation()
        || matches!(c, DANDA | DOUBLE_DANDA)
        || matches!(c, '\u{2010}'..='\u{2027}' | '\u{2030}'..='\u{205E}')
        || matches!(c, '«' | '»' | '¡' | '¿' | '、' | '。' | '，' | '．')
}

/// Ordered word tokens of one document. No token is empty or contains a
/// separator.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn into_inner(self) -> Vec<String> {
        self.0
    }

    pub fn join(&self) -> String {
        self.0.join(" ")
    }
}

impl Deref for TokenSeq {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

impl<'a> IntoIterator for &'a TokenSeq {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

pub fn tokenize(text: &str) -> TokenSeq {
    let tokens = text
        .split(is_separator)
        .filter(|piece| !piece.is_empty())
        .map(fold_case)
        .collect();
    TokenSeq(tokens)
}

fn fold_case(piece: &str) -> String {
    if piece.chars().all(|c| !c.is_uppercase()) {
        piece.to_owned()
    } else {
        piece.chars().flat_map(char::to_lowercase).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use unicode_segmentation::UnicodeSegmentation;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).into_inner()
    }

    #[test]
    fn table_sentence() {
        assert_eq!(toks("সে একটা সুযোগ চায়"), vec!["সে", "একটা", "সুযোগ", "চায়"]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" ।, ").is_empty());
    }

    #[test]
    fn danda_separates() {
        assert!(is_separator('\u{0964}'));
        assert_eq!(
            toks("আমি পারবো। আমি পারবো"),
            vec!["আমি", "পারবো", "আমি", "পারবো"]
        );
        let (a, b) = "আমি পারবো। আমি পারবো".split_once('।').unwrap();
        assert_eq!(tokenize(a), tokenize(b));
    }

    #[test]
    fn punctuation_and_case() {
        assert_eq!(toks("Hello, World! আজ?"), vec!["hello", "world", "আজ"]);
        assert_eq!(toks("“উদ্ধৃতি”—শেষ…"), vec!["উদ্ধৃতি", "শেষ"]);
    }

    #[test]
    fn digits_and_mixed_script_kept() {
        assert_eq!(
            toks("২০২০ সালে covid19 ভাইরাসটা"),
            vec!["২০২০", "সালে", "covid19", "ভাইরাসটা"]
        );
    }

    #[test]
    fn conjuncts_stay_whole() {
        // ক্ষ (ka + virama + ssa), র‍্য with ZWJ, and a nukta form
        let word = "ক্ষমা র\u{200D}্যাব ড\u{09BC}";
        assert_eq!(toks(word), vec!["ক্ষমা", "র\u{200D}্যাব", "ড\u{09BC}"]);
    }

    fn bengali_text() -> impl Strategy<Value = String> {
        // consonant followed by optional vowel sign or virama+consonant
        let cluster = (
            proptest::char::range('ক', 'হ'),
            proptest::option::of(prop_oneof![
                proptest::char::range('\u{09BE}', '\u{09C4}'),
                Just('\u{09CD}'),
            ]),
        )
            .prop_map(|(c, m)| {
                let mut s = String::from(c);
                if let Some(m) = m {
                    s.push(m);
                    if m == '\u{09CD}' {
                        s.push('ষ');
                    }
                }
                s
            });
        let word = proptest::collection::vec(cluster, 1..5).prop_map(|v| v.concat());
        let sep = prop_oneof![Just(" "), Just("।"), Just(", "), Just("  "), Just("?")];
        proptest::collection::vec((word, sep), 0..8).prop_map(|v| {
            v.into_iter()
                .map(|(w, s)| format!("{w}{s}"))
                .collect::<String>()
        })
    }

    proptest! {
        #[test]
        fn stable_under_rejoin(s in "\\PC{0,40}") {
            let t = tokenize(&s);
            prop_assert_eq!(tokenize(&t.join()), t);
        }

        #[test]
        fn each_token_is_a_fixed_point(s in "\\PC{0,40}") {
            for tok in tokenize(&s).iter() {
                prop_assert!(!tok.is_empty());
                prop_assert!(!tok.chars().any(is_separator));
                prop_assert_eq!(tokenize(tok).into_inner(), vec![tok.clone()]);
            }
        }

        #[test]
        fn grapheme_clusters_preserved(s in bengali_text()) {
            let mut expected: Vec<&str> = s
                .graphemes(true)
                .filter(|g| !g.chars().all(is_separator))
                .collect();
            let t = tokenize(&s);
            let mut got: Vec<&str> = t.iter().flat_map(|tok| tok.graphemes(true)).collect();
            expected.sort_unstable();
            got.sort_unstable();
            prop_assert_eq!(got, expected);
        }
    }
}
