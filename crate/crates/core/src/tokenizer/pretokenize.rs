//! GPT-2 pre-tokenization: splits text into the chunks BPE runs on.

use std::ops::Range;
use std::sync::OnceLock;

use regex::Regex;

pub const GPT2_PATTERN: &str = r"'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+";

/// [`GPT2_PATTERN`] without the `\s+(?!\S)` branch, which needs lookahead.
/// The branch is emulated in [`pretokenize`]: a whitespace run followed by
/// non-space gives up its last char, which then starts the next pre-token.
const SCAN_PATTERN: &str = r"'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+";

fn scanner() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(SCAN_PATTERN).expect("valid pattern"))
}

/// Byte ranges of the pre-tokens of `text`; together they cover it exactly.
pub fn pretokenize(text: &str) -> Vec<Range<usize>> {
    if text.is_ascii() {
        return pretokenize_ascii(text.as_bytes());
    }
    let re = scanner();
    let mut out = Vec::new();
    let mut at = 0;
    while at < text.len() {
        // every char is matched by some branch, so matches start at `at`
        let Some(m) = re.find_at(text, at) else { break };
        if m.start() > at {
            out.push(at..m.start());
        }
        let mut end = m.end();
        let piece = m.as_str();
        if end < text.len() && piece.ends_with(char::is_whitespace) {
            let last = piece.chars().next_back().map_or(0, char::len_utf8);
            if piece.len() > last {
                end -= last;
            }
        }
        out.push(m.start()..end);
        at = end;
    }
    if at < text.len() {
        out.push(at..text.len());
    }
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Class {
    Letter,
    Digit,
    Space,
    Other,
}

fn class(b: u8) -> Class {
    match b {
        b'a'..=b'z' | b'A'..=b'Z' => Class::Letter,
        b'0'..=b'9' => Class::Digit,
        b' ' | b'\t' | b'\n' | 0x0b | 0x0c | b'\r' => Class::Space,
        _ => Class::Other,
    }
}

/// Hand-rolled scanner for the all-ASCII case, where every class in the
/// pattern reduces to a byte test.
fn pretokenize_ascii(b: &[u8]) -> Vec<Range<usize>> {
    let n = b.len();
    let run = |from: usize, c: Class| from + b[from..].iter().take_while(|&&x| class(x) == c).count();
    let mut out = Vec::with_capacity(n / 3);
    let mut i = 0;
    while i < n {
        let end = match (b[i], b.get(i + 1).copied()) {
            (b'\'', Some(b's' | b't' | b'm' | b'd')) => i + 2,
            (b'\'', Some(b'r')) if b.get(i + 2) == Some(&b'e') => i + 3,
            (b'\'', Some(b'v')) if b.get(i + 2) == Some(&b'e') => i + 3,
            (b'\'', Some(b'l')) if b.get(i + 2) == Some(&b'l') => i + 3,
            (b' ', Some(next)) if class(next) != Class::Space => run(i + 1, class(next)),
            (c, _) if class(c) == Class::Space => {
                let k = run(i, Class::Space);
                if k == n || k - i == 1 {
                    k
                } else {
                    k - 1
                }
            }
            (c, _) => run(i, class(c)),
        };
        out.push(i..end);
        i = end;
    }
    out
}

/// Like [`pretokenize`] but for arbitrary bytes: valid UTF-8 runs are split
/// with the regex, each invalid sequence becomes its own chunk.
pub fn pretokenize_bytes(bytes: &[u8]) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut base = 0;
    for chunk in bytes.utf8_chunks() {
        let valid = chunk.valid();
        out.extend(pretokenize(valid).into_iter().map(|r| r.start + base..r.end + base));
        base += valid.len();
        let invalid = chunk.invalid();
        if !invalid.is_empty() {
            out.push(base..base + invalid.len());
            base += invalid.len();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pieces(s: &str) -> Vec<&str> {
        pretokenize(s).into_iter().map(|r| &s[r]).collect()
    }

    #[test]
    fn splits_like_the_reference() {
        assert_eq!(pieces("hello world"), ["hello", " world"]);
        assert_eq!(pieces("it's 42 ->x"), ["it", "'s", " 42", " ->", "x"]);
        // trailing-space lookahead leaves the last space attached to the next word
        assert_eq!(pieces("a   b"), ["a", "  ", " b"]);
        assert_eq!(pieces("a\n|b"), ["a", "\n", "|", "b"]);
        assert!(pieces("").is_empty());
    }

    fn reference(s: &str) -> Vec<Range<usize>> {
        let re = fancy_regex::Regex::new(GPT2_PATTERN).unwrap();
        re.find_iter(s).map(|m| m.unwrap().range()).collect()
    }

    #[test]
    fn whitespace_runs_match_the_lookahead_pattern() {
        for s in ["a \t\nb", "x   ", "\t\tx", " \u{3000}y", "a\n\n  'sb", "  ", "\n"] {
            assert_eq!(pretokenize(s), reference(s), "{s:?}");
        }
    }

    proptest::proptest! {
        #[test]
        fn ascii_scanner_agrees_with_the_reference_regex(s in "[a-cA-Z0-9 \t\n\r\x0b\x0c'srvetlmd.,:_-]{0,40}") {
            proptest::prop_assert_eq!(pretokenize(&s), reference(&s));
        }

        #[test]
        fn agrees_with_the_reference_regex(s in "[a-c1-2 \t\n'.,é٣\u{3000}\u{0301}ⅷ_-]{0,40}") {
            proptest::prop_assert_eq!(pretokenize(&s), reference(&s));
        }
    }

    #[test]
    fn invalid_bytes_are_isolated() {
        let bytes = b"ab\xffcd";
        assert_eq!(pretokenize_bytes(bytes), vec![0..2, 2..3, 3..5]);
    }
}
