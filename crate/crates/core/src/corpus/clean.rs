//! Text cleaning applied to every sentence at load time.
//!
//! Cleaning strips markup tags, emoji and pictographs, collapses whitespace
//! and normalizes to NFC. The removed code point ranges are listed in
//! [`EMOJI_RANGES`].

use unicode_normalization::UnicodeNormalization;

/// Inclusive code point ranges treated as emoji/pictographs and removed.
///
/// | Range            | Block                                                  |
/// |------------------|--------------------------------------------------------|
/// | U+231A–U+231B    | watch, hourglass (Misc Technical)                      |
/// | U+2328           | keyboard                                               |
/// | U+23CF           | eject symbol                                           |
/// | U+23E9–U+23F3    | media controls, alarm clock                            |
/// | U+23F8–U+23FA    | pause/stop/record                                      |
/// | U+2600–U+26FF    | Miscellaneous Symbols                                  |
/// | U+2700–U+27BF    | Dingbats                                               |
/// | U+2B05–U+2B07    | emoji arrows                                           |
/// | U+2B1B–U+2B1C    | large squares                                          |
/// | U+2B50, U+2B55   | star, heavy circle                                     |
/// | U+FE0E–U+FE0F    | text/emoji variation selectors                         |
/// | U+20E3           | combining enclosing keycap                             |
/// | U+1F000–U+1FAFF  | Mahjong .. Symbols and Pictographs Extended-A          |
/// | U+E0020–U+E007F  | tag characters (flag sequences)                        |
pub const EMOJI_RANGES: &[(u32, u32)] = &[
    (0x20E3, 0x20E3),
    (0x231A, 0x231B),
    (0x2328, 0x2328),
    (0x23CF, 0x23CF),
    (0x23E9, 0x23F3),
    (0x23F8, 0x23FA),
    (0x2600, 0x26FF),
    (0x2700, 0x27BF),
    (0x2B05, 0x2B07),
    (0x2B1B, 0x2B1C),
    (0x2B50, 0x2B50),
    (0x2B55, 0x2B55),
    (0xFE0E, 0xFE0F),
    (0x1F000, 0x1FAFF),
    (0xE0020, 0xE007F),
];

const ZWJ: char = '\u{200D}';

pub fn is_emoji(c: char) -> bool {
    let cp = c as u32;
    EMOJI_RANGES.iter().any(|&(lo, hi)| (lo..=hi).contains(&cp))
}

/// Cleans one raw sentence. Total and idempotent.
pub fn clean_text(raw: &str) -> String {
    let untagged = strip_tags(raw);
    let no_emoji = strip_emoji(&untagged);
    let collapsed = collapse_whitespace(&no_emoji);
    collapsed.nfc().collect()
}

/// Removes `<...>` spans (no nested angle brackets) until none remain, so
/// inputs like `<<b>>` do not leave a new tag behind.
fn strip_tags(text: &str) -> String {
    let mut current = text.to_owned();
    loop {
        let next = strip_tags_once(&current);
        if next.len() == current.len() {
            return next;
        }
        current = next;
    }
}

fn strip_tags_once(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find('<') {
        let after = &rest[open + 1..];
        match after.find(['<', '>']) {
            Some(k) if after.as_bytes()[k] == b'>' => {
                out.push_str(&rest[..open]);
                rest = &after[k + 1..];
            }
            Some(k) => {
                // another '<' before any '>': this one is literal text
                out.push_str(&rest[..open + 1 + k]);
                rest = &after[k..];
            }
            None => break,
        }
    }
    out.push_str(rest);
    out
}

/// Drops emoji code points. A ZWJ is dropped only when it joins an emoji, so
/// Bengali conjunct sequences using ZWJ survive.
fn strip_emoji(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    for (i, &c) in chars.iter().enumerate() {
        if is_emoji(c) {
            continue;
        }
        if c == ZWJ {
            let prev = i.checked_sub(1).map(|p| chars[p]);
            let next = chars.get(i + 1).copied();
            if prev.is_some_and(is_emoji) || next.is_some_and(is_emoji) {
                continue;
            }
        }
        out.push(c);
    }
    out
}

fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split(char::is_whitespace).filter(|w| !w.is_empty()) {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}
