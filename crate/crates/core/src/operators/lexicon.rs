//! Filler lexicon used by SDM and by content-word extraction.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::phrase::PhraseMatcher;

const SHIPPED_FILLERS: &str = include_str!("../../data/fillers.tsv");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LexiconError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("lexicon has no patterns")]
    Empty,
    #[error("pattern compilation failed: {0}")]
    Regex(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FillerCategory {
    Politeness,
    Hedging,
    RedundantConnective,
    Boilerplate,
}

impl FillerCategory {
    pub fn tag(self) -> &'static str {
        match self {
            FillerCategory::Politeness => "politeness",
            FillerCategory::Hedging => "hedging",
            FillerCategory::RedundantConnective => "redundant-connective",
            FillerCategory::Boilerplate => "boilerplate",
        }
    }
}

impl FromStr for FillerCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "politeness" => Ok(FillerCategory::Politeness),
            "hedging" => Ok(FillerCategory::Hedging),
            "redundant-connective" => Ok(FillerCategory::RedundantConnective),
            "boilerplate" => Ok(FillerCategory::Boilerplate),
            other => Err(format!("unknown filler category `{other}`")),
        }
    }
}

impl fmt::Display for FillerCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillerPattern {
    /// Lowercase literal phrase; matched case-insensitively on word boundaries.
    pub text: String,
    pub category: FillerCategory,
}

/// Ordered filler patterns plus a compiled matcher.
///
/// Matching is longest-pattern-first and never fires inside an identifier:
/// a match must not touch a word character, nor a `.`, `-`, `/` or `@`
/// that is itself glued to a word character.
#[derive(Debug, Clone)]
pub struct FillerLexicon {
    patterns: Vec<FillerPattern>,
    matcher: PhraseMatcher,
}

impl PartialEq for FillerLexicon {
    fn eq(&self, other: &Self) -> bool {
        self.patterns == other.patterns
    }
}

impl FillerLexicon {
    pub fn new(patterns: Vec<FillerPattern>) -> Result<Self, LexiconError> {
        if patterns.is_empty() {
            return Err(LexiconError::Empty);
        }
        let mut alternatives: Vec<&str> = patterns.iter().map(|p| p.text.as_str()).collect();
        alternatives.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        alternatives.dedup();
        let matcher = PhraseMatcher::new(&alternatives, &[])
            .map_err(|e| LexiconError::Regex(e.to_string()))?
            .expect("at least one pattern");
        Ok(Self { patterns, matcher })
    }

    /// Parses `category<TAB>pattern` lines; `#` starts a comment line.
    pub fn from_tsv(src: &str) -> Result<Self, LexiconError> {
        let mut patterns = Vec::new();
        for (i, line) in src.lines().enumerate() {
            let line = line.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (cat, text) = line.split_once('\t').ok_or_else(|| LexiconError::Parse {
                line: i + 1,
                reason: "expected `category<TAB>pattern`".into(),
            })?;
            let category = cat
                .trim()
                .parse()
                .map_err(|reason| LexiconError::Parse { line: i + 1, reason })?;
            let text = text.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
            if text.is_empty() {
                return Err(LexiconError::Parse {
                    line: i + 1,
                    reason: "empty pattern".into(),
                });
            }
            patterns.push(FillerPattern { text, category });
        }
        Self::new(patterns)
    }

    /// The 110-pattern lexicon shipped with the crate.
    pub fn shipped() -> &'static FillerLexicon {
        static SHIPPED: OnceLock<FillerLexicon> = OnceLock::new();
        SHIPPED.get_or_init(|| Self::from_tsv(SHIPPED_FILLERS).expect("shipped lexicon is valid"))
    }

    pub fn patterns(&self) -> &[FillerPattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Raw, non-overlapping pattern matches in `text`.
    pub fn matches(&self, text: &str) -> Vec<Range<usize>> {
        self.matcher.find_iter(text)
    }

    pub fn contains_match(&self, text: &str) -> bool {
        self.matcher.is_match(text)
    }

    /// Removal spans: each match widened to take the whitespace (and a
    /// separating comma) that would otherwise be left dangling.
    pub fn spans(&self, text: &str) -> Vec<Range<usize>> {
        let mut out: Vec<Range<usize>> = Vec::new();
        for m in self.matches(text) {
            let mut end = m.end;
            let comma_after = text[end..].starts_with(',');
            if comma_after {
                end += 1;
            }
            let ws_end = end + leading_ws(&text[end..]);
            let tail = &text[ws_end..];
            let prev_end = out.last().map_or(0, |r| r.end);
            let span = if tail.is_empty() || tail.starts_with(['.', ';', '!', '?', ')']) {
                // trailing filler: eat what precedes instead
                let mut start = m.start - trailing_ws(&text[..m.start]);
                if !comma_after && text[..start].ends_with(',') {
                    start -= 1;
                }
                start.max(prev_end)..if tail.is_empty() { ws_end } else { end }
            } else {
                m.start.max(prev_end)..ws_end
            };
            match out.last_mut() {
                Some(last) if last.end >= span.start => last.end = last.end.max(span.end),
                _ => out.push(span),
            }
        }
        out
    }

    /// `text` with every removal span cut out.
    pub fn strip(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        let mut at = 0;
        for r in self.spans(text) {
            out.push_str(&text[at..r.start]);
            at = r.end;
        }
        out.push_str(&text[at..]);
        out
    }
}

fn leading_ws(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

fn trailing_ws(s: &str) -> usize {
    s.len() - s.trim_end().len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex(words: &[&str]) -> FillerLexicon {
        FillerLexicon::new(
            words
                .iter()
                .map(|w| FillerPattern {
                    text: w.to_string(),
                    category: FillerCategory::Politeness,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn shipped_lexicon_has_enough_patterns_in_all_categories() {
        let lex = FillerLexicon::shipped();
        assert!(lex.len() >= 104, "{}", lex.len());
        for cat in [
            FillerCategory::Politeness,
            FillerCategory::Hedging,
            FillerCategory::RedundantConnective,
            FillerCategory::Boilerplate,
        ] {
            assert!(lex.patterns().iter().any(|p| p.category == cat), "{cat}");
        }
        assert!(lex.contains_match("Please note that the index is rebuilt"));
    }

    #[test]
    fn longest_pattern_wins() {
        let lex = lex(&["please", "please note that"]);
        assert_eq!(lex.matches("Please note that x"), vec![0..16]);
    }

    #[test]
    fn never_matches_inside_identifiers() {
        let lex = lex(&["just", "very"]);
        assert!(lex.matches("adjust_size").is_empty());
        assert!(lex.matches("call cfg.very or very_fast or just-in-time").is_empty());
        assert_eq!(lex.matches("just do it."), vec![0..4]);
        assert_eq!(lex.matches("do it very."), vec![6..10]);
    }

    #[test]
    fn strip_absorbs_whitespace_and_commas() {
        let lex = lex(&["please", "kindly", "basically"]);
        assert_eq!(lex.strip("Please kindly search files"), "search files");
        assert_eq!(lex.strip("Search files, please."), "Search files.");
        assert_eq!(lex.strip("files, basically, by name"), "files, by name");
        assert_eq!(lex.strip("search files please"), "search files");
        assert_eq!(lex.strip("no filler here"), "no filler here");
    }

    #[test]
    fn tsv_errors_carry_line_numbers() {
        let err = FillerLexicon::from_tsv("# c\npoliteness\tplease\nbogus\tword\n").unwrap_err();
        assert_eq!(
            err,
            LexiconError::Parse {
                line: 3,
                reason: "unknown filler category `bogus`".into()
            }
        );
        assert_eq!(FillerLexicon::from_tsv("# only comments\n"), Err(LexiconError::Empty));
    }
}
