//! Exact token counting.
//!
//! Every operator decision and every savings figure goes through a
//! [`BpeTokenizer`]. The crate embeds the public GPT-2 vocabulary and merge
//! table so counts are reproducible without any setup; [`TokenCounter::Heuristic`]
//! exists for summaries only and is refused by the operators that need exact counts.

mod bpe;
mod bytes;
mod pretokenize;

use std::sync::OnceLock;

use thiserror::Error;

pub use bpe::BpeTokenizer;
pub use bytes::{byte_alphabet, bytes_to_token_str, token_str_to_bytes};
pub use pretokenize::{pretokenize, pretokenize_bytes, GPT2_PATTERN};

const GPT2_VOCAB: &str = include_str!("../../data/gpt2/vocab.json");
const GPT2_MERGES: &str = include_str!("../../data/gpt2/merges.txt");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TokenizerError {
    #[error("merge #{rank} ({left} {right}) has no vocabulary entry for its parts or result")]
    MergeWithoutVocabEntry { rank: usize, left: String, right: String },
    #[error("merge #{rank} ({left} {right}) repeats an earlier merge")]
    DuplicateMerge { rank: usize, left: String, right: String },
    #[error("byte 0x{0:02x} has no vocabulary entry and byte fallback is off")]
    UnencodableByte(u8),
    #[error("malformed vocabulary: {0}")]
    MalformedVocab(String),
    #[error("malformed merges at line {line}: `{content}`")]
    MalformedMerges { line: usize, content: String },
    #[error("{0} requires an exact tokenizer; the heuristic counter is not allowed")]
    HeuristicTokenizerForbidden(&'static str),
}

/// Loads a tokenizer from vocabulary JSON and merge-file text.
pub fn load_tokenizer(vocab_json: &str, merges_txt: &str) -> Result<BpeTokenizer, TokenizerError> {
    BpeTokenizer::from_files_text(vocab_json, merges_txt)
}

/// The embedded GPT-2 tokenizer, loaded on first use.
pub fn gpt2() -> &'static BpeTokenizer {
    static GPT2: OnceLock<BpeTokenizer> = OnceLock::new();
    GPT2.get_or_init(|| load_tokenizer(GPT2_VOCAB, GPT2_MERGES).expect("embedded GPT-2 files are valid"))
}

/// `ceil(chars / 4)`: a rough count for when no vocabulary is at hand.
pub fn heuristic_count(text: &str) -> usize {
    text.chars().count().div_ceil(4)
}

/// How a compilation counts tokens.
#[derive(Debug, Clone, Copy)]
pub enum TokenCounter<'a> {
    Bpe(&'a BpeTokenizer),
    Heuristic,
}

impl<'a> TokenCounter<'a> {
    pub fn gpt2() -> TokenCounter<'static> {
        TokenCounter::Bpe(gpt2())
    }

    pub fn count(&self, text: &str) -> usize {
        match self {
            TokenCounter::Bpe(t) => t.count_tokens(text),
            TokenCounter::Heuristic => heuristic_count(text),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, TokenCounter::Bpe(_))
    }

    /// The exact tokenizer, or `HeuristicTokenizerForbidden` naming `user`.
    pub fn require_exact(&self, user: &'static str) -> Result<&'a BpeTokenizer, TokenizerError> {
        match self {
            TokenCounter::Bpe(t) => Ok(t),
            TokenCounter::Heuristic => Err(TokenizerError::HeuristicTokenizerForbidden(user)),
        }
    }
}

/// First candidate pair `(s1, s2)` where `s1` has fewer characters yet more
/// tokens than `s2`.
pub fn find_nonmonotonic_witness<S: AsRef<str>>(t: &BpeTokenizer, candidates: &[(S, S)]) -> Option<(String, String)> {
    candidates.iter().find_map(|(a, b)| {
        let (a, b) = (a.as_ref(), b.as_ref());
        (a.chars().count() < b.chars().count() && t.count_tokens(a) > t.count_tokens(b))
            .then(|| (a.to_string(), b.to_string()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Byte alphabet plus the given multi-byte tokens, ids in insertion order.
    fn toy(extra: &[&str], merges: &[(&str, &str)]) -> Result<BpeTokenizer, TokenizerError> {
        let mut vocab: Vec<(String, u32)> = byte_alphabet().into_iter().zip(0..).collect();
        for (i, t) in extra.iter().enumerate() {
            vocab.push((t.to_string(), 256 + i as u32));
        }
        let merges = merges.iter().map(|(l, r)| (l.to_string(), r.to_string())).collect();
        BpeTokenizer::new(vocab, merges)
    }

    #[test]
    fn minimal_tokenizer_loads() {
        let t = toy(&["ab"], &[("a", "b")]).unwrap();
        assert_eq!(t.token_strings("ab").unwrap(), ["ab"]);
        assert_eq!(t.vocab_size(), 257);
    }

    #[test]
    fn merge_without_vocab_entry_is_rejected() {
        let err = toy(&["ab"], &[("x", "y")]).unwrap_err();
        assert!(matches!(err, TokenizerError::MergeWithoutVocabEntry { rank: 0, .. }));
        let err = toy(&["ab"], &[("a", "b"), ("a", "b")]).unwrap_err();
        assert!(matches!(err, TokenizerError::DuplicateMerge { rank: 1, .. }));
    }

    #[test]
    fn merges_apply_in_rank_order() {
        let t = toy(&["ab", "abc"], &[("a", "b"), ("ab", "c")]).unwrap();
        assert_eq!(t.token_strings("").unwrap(), Vec::<String>::new());
        assert_eq!(t.token_strings("abc").unwrap(), ["abc"]);
        assert_eq!(t.token_strings("abca").unwrap(), ["abc", "a"]);
        assert_eq!(t.count_tokens("abc"), 1);
        assert_eq!(t.count_tokens(""), 0);
    }

    #[test]
    fn repeated_pairs_merge_left_to_right() {
        // "aaaa" with only (a,a) -> [aa, aa]; "aaa" -> [aa, a]
        let t = toy(&["aa"], &[("a", "a")]).unwrap();
        assert_eq!(t.token_strings("aaaa").unwrap(), ["aa", "aa"]);
        assert_eq!(t.token_strings("aaa").unwrap(), ["aa", "a"]);
        assert_eq!(t.tokenize("aaa").unwrap(), t.tokenize_naive("aaa").unwrap());
    }

    #[test]
    fn missing_byte_without_fallback_errors() {
        let vocab = vec![("a".to_string(), 0u32), ("b".to_string(), 1)];
        let t = BpeTokenizer::new(vocab, vec![]).unwrap();
        assert_eq!(t.tokenize("ac").unwrap().len(), 2);
        assert_eq!(t.detokenize(&t.tokenize("ac").unwrap()), b"ac");
        let strict = t.with_byte_fallback(false);
        assert_eq!(strict.tokenize("ac"), Err(TokenizerError::UnencodableByte(b'c')));
        assert_eq!(strict.count_tokens("ac"), 2);
    }

    #[test]
    fn heuristic_rounds_up() {
        assert_eq!(heuristic_count(""), 0);
        assert_eq!(heuristic_count("abcde"), 2);
        let h = TokenCounter::Heuristic;
        assert!(matches!(
            h.require_exact("TAS"),
            Err(TokenizerError::HeuristicTokenizerForbidden("TAS"))
        ));
    }

    #[test]
    fn witness_requires_shorter_and_costlier() {
        let t = toy(&["ab"], &[("a", "b")]).unwrap();
        assert_eq!(find_nonmonotonic_witness(&t, &[("ab", "a")]), None);
        assert_eq!(find_nonmonotonic_witness::<&str>(&t, &[]), None);
        // "xyz": 3 chars, 3 tokens; "ababab": 6 chars, 3 tokens; "abab": 4 chars, 2 tokens
        assert_eq!(find_nonmonotonic_witness(&t, &[("xyz", "ababab")]), None);
        assert_eq!(
            find_nonmonotonic_witness(&t, &[("xyz", "ababab"), ("xyz", "abab")]),
            Some(("xyz".to_string(), "abab".to_string()))
        );
    }
}
