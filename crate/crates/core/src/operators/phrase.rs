//! Literal-phrase matching that never fires inside an identifier.
//!
//! Equivalent to the lookaround pattern
//! `(?i)(?<![\w@])(?<![\w][./\-])(?:p1|p2|..)(?!\w)(?![./\-@]\w)` followed by
//! unguarded `|s1|s2|..` alternatives, but runs on the linear-time `regex`
//! engine: an unanchored prefilter finds candidate starts and the guards are
//! checked by hand there.

use std::ops::Range;
use std::sync::OnceLock;

use regex::Regex;

#[derive(Debug, Clone)]
pub(crate) struct PhraseMatcher {
    prefilter: Regex,
    /// Anchored alternatives in priority order; `true` marks a guarded phrase.
    alts: Vec<(Regex, bool)>,
}

/// Regex source for a phrase: escaped words joined by `\s+`.
pub(crate) fn phrase_source(phrase: &str) -> String {
    phrase
        .split_whitespace()
        .map(regex::escape)
        .collect::<Vec<_>>()
        .join(r"\s+")
}

impl PhraseMatcher {
    /// `phrases` are case-insensitive and guarded, `symbols` literal and
    /// unguarded; both are tried in the order given, phrases first.
    pub(crate) fn new(phrases: &[&str], symbols: &[&str]) -> Result<Option<Self>, regex::Error> {
        let sources: Vec<(String, bool)> = phrases
            .iter()
            .map(|p| (format!("(?i:{})", phrase_source(p)), true))
            .chain(symbols.iter().map(|s| (regex::escape(s), false)))
            .collect();
        if sources.is_empty() {
            return Ok(None);
        }
        let all: Vec<&str> = sources.iter().map(|(s, _)| s.as_str()).collect();
        let prefilter = Regex::new(&all.join("|"))?;
        let alts = sources
            .iter()
            .map(|(s, guarded)| Ok((Regex::new(&format!("^(?:{s})"))?, *guarded)))
            .collect::<Result<_, regex::Error>>()?;
        Ok(Some(Self { prefilter, alts }))
    }

    /// Non-overlapping matches, leftmost first, earlier alternatives winning
    /// at the same start.
    pub(crate) fn find_iter(&self, text: &str) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut at = 0;
        while at < text.len() {
            let Some(m) = self.prefilter.find_at(text, at) else {
                break;
            };
            let p = m.start();
            match self.match_at(text, p) {
                Some(end) => {
                    out.push(p..end);
                    at = end.max(p + 1);
                }
                None => at = p + text[p..].chars().next().map_or(1, char::len_utf8),
            }
        }
        out
    }

    pub(crate) fn is_match(&self, text: &str) -> bool {
        !self.find_iter(text).is_empty()
    }

    fn match_at(&self, text: &str, p: usize) -> Option<usize> {
        let head_ok = guard_before(&text[..p]);
        self.alts.iter().find_map(|(re, guarded)| {
            if *guarded && !head_ok {
                return None;
            }
            let end = p + re.find(&text[p..])?.end();
            (!*guarded || guard_after(&text[end..])).then_some(end)
        })
    }
}

fn is_word(c: char) -> bool {
    static WORD: OnceLock<Regex> = OnceLock::new();
    let re = WORD.get_or_init(|| Regex::new(r"^\w$").expect("valid pattern"));
    c.is_ascii_alphanumeric() || c == '_' || (!c.is_ascii() && re.is_match(c.encode_utf8(&mut [0; 4])))
}

fn guard_before(before: &str) -> bool {
    let mut rev = before.chars().rev();
    match rev.next() {
        None => true,
        Some(c) if is_word(c) || c == '@' => false,
        Some('.' | '/' | '-') => !rev.next().is_some_and(is_word),
        Some(_) => true,
    }
}

fn guard_after(after: &str) -> bool {
    let mut it = after.chars();
    match it.next() {
        None => true,
        Some(c) if is_word(c) => false,
        Some('.' | '/' | '-' | '@') => !it.next().is_some_and(is_word),
        Some(_) => true,
    }
}
