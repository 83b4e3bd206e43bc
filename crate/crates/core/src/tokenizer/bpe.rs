use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::sync::RwLock;

use super::bytes::{byte_to_char, token_str_to_bytes};
use super::pretokenize::{pretokenize, pretokenize_bytes};
use super::TokenizerError;

/// Byte-level BPE tokenizer: a vocabulary plus ranked merge rules.
///
/// Immutable once loaded; `tokenize` takes `&self` and needs no locking.
#[derive(Debug, Clone)]
pub struct BpeTokenizer {
    vocab: HashMap<Vec<u8>, u32>,
    decoder: HashMap<u32, Vec<u8>>,
    merges: Vec<(String, String)>,
    /// (left id, right id) -> (rank, merged id)
    merge_ids: HashMap<(u32, u32), (u32, u32)>,
    byte_ids: [Option<u32>; 256],
    byte_fallback: bool,
    fallback_base: u32,
    counts: CountCache,
}

/// Memoized per-pretoken counts. Schema text repeats the same words and
/// punctuation over and over, so most chunks are hits after the first pass.
#[derive(Default)]
struct CountCache(RwLock<HashMap<Box<[u8]>, u32>>);

impl CountCache {
    const MAX_ENTRIES: usize = 1 << 16;

    fn get(&self, chunk: &[u8]) -> Option<u32> {
        self.0.read().ok()?.get(chunk).copied()
    }

    fn put(&self, chunk: &[u8], n: u32) {
        if let Ok(mut map) = self.0.write() {
            if map.len() >= Self::MAX_ENTRIES {
                map.clear();
            }
            map.insert(chunk.into(), n);
        }
    }
}

impl Clone for CountCache {
    fn clone(&self) -> Self {
        Self::default()
    }
}

impl fmt::Debug for CountCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0.read().map_or(0, |m| m.len());
        write!(f, "CountCache({n} entries)")
    }
}

impl BpeTokenizer {
    /// Builds a tokenizer from a token -> id map and merges in rank order.
    pub fn new<V, K>(vocab: V, merges: Vec<(String, String)>) -> Result<Self, TokenizerError>
    where
        V: IntoIterator<Item = (K, u32)>,
        K: AsRef<str>,
    {
        let mut by_bytes = HashMap::new();
        let mut decoder = HashMap::new();
        for (token, id) in vocab {
            let bytes = token_str_to_bytes(token.as_ref());
            decoder.entry(id).or_insert_with(|| bytes.clone());
            by_bytes.entry(bytes).or_insert(id);
        }

        let mut merge_ids = HashMap::with_capacity(merges.len());
        for (rank, (left, right)) in merges.iter().enumerate() {
            let missing = || TokenizerError::MergeWithoutVocabEntry {
                rank,
                left: left.clone(),
                right: right.clone(),
            };
            let l = *by_bytes.get(&token_str_to_bytes(left)).ok_or_else(missing)?;
            let r = *by_bytes.get(&token_str_to_bytes(right)).ok_or_else(missing)?;
            let merged = *by_bytes
                .get(&token_str_to_bytes(&format!("{left}{right}")))
                .ok_or_else(missing)?;
            if merge_ids.insert((l, r), (rank as u32, merged)).is_some() {
                return Err(TokenizerError::DuplicateMerge {
                    rank,
                    left: left.clone(),
                    right: right.clone(),
                });
            }
        }

        let mut byte_ids = [None; 256];
        for (b, slot) in byte_ids.iter_mut().enumerate() {
            *slot = by_bytes.get(&vec![b as u8]).copied();
        }
        let fallback_base = decoder.keys().max().map_or(0, |m| m + 1);
        Ok(Self {
            vocab: by_bytes,
            decoder,
            merges,
            merge_ids,
            byte_ids,
            byte_fallback: true,
            fallback_base,
            counts: CountCache::default(),
        })
    }

    /// Loads the public GPT-2 layout: a JSON object `token -> id`, and a merge
    /// file with one space-separated pair per line (an optional `#version`
    /// header is skipped).
    pub fn from_files_text(vocab_json: &str, merges_txt: &str) -> Result<Self, TokenizerError> {
        let vocab: HashMap<String, u32> =
            serde_json::from_str(vocab_json).map_err(|e| TokenizerError::MalformedVocab(e.to_string()))?;
        let mut merges = Vec::new();
        for (i, line) in merges_txt.lines().enumerate() {
            if line.is_empty() || (i == 0 && line.starts_with("#version")) {
                continue;
            }
            let mut parts = line.split(' ');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                    merges.push((l.to_string(), r.to_string()))
                }
                _ => {
                    return Err(TokenizerError::MalformedMerges {
                        line: i + 1,
                        content: line.to_string(),
                    })
                }
            }
        }
        Self::new(vocab, merges)
    }

    /// With fallback off, a byte that has no vocabulary entry is an error
    /// instead of a synthetic id.
    pub fn with_byte_fallback(mut self, enabled: bool) -> Self {
        self.byte_fallback = enabled;
        self
    }

    pub fn byte_fallback(&self) -> bool {
        self.byte_fallback
    }

    pub fn vocab_size(&self) -> usize {
        self.decoder.len()
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn token_id(&self, token: &str) -> Option<u32> {
        self.vocab.get(&token_str_to_bytes(token)).copied()
    }

    pub fn tokenize(&self, text: &str) -> Result<Vec<u32>, TokenizerError> {
        let mut ids = Vec::new();
        for r in pretokenize(text) {
            self.encode_chunk(text[r].as_bytes(), &mut ids, false)?;
        }
        Ok(ids)
    }

    /// Tokenizes arbitrary bytes; invalid UTF-8 is carried through losslessly.
    pub fn tokenize_bytes(&self, bytes: &[u8]) -> Result<Vec<u32>, TokenizerError> {
        let mut ids = Vec::new();
        for r in pretokenize_bytes(bytes) {
            self.encode_chunk(&bytes[r], &mut ids, false)?;
        }
        Ok(ids)
    }

    /// Reference implementation: rescans the whole chunk for the lowest-rank
    /// pair after every merge round. Slow; kept to cross-check [`Self::tokenize`].
    pub fn tokenize_naive(&self, text: &str) -> Result<Vec<u32>, TokenizerError> {
        let mut ids = Vec::new();
        for r in pretokenize(text) {
            self.encode_chunk(text[r].as_bytes(), &mut ids, true)?;
        }
        Ok(ids)
    }

    /// Number of tokens in `text`. Bytes without a vocabulary entry count as
    /// one token each even when fallback is disabled.
    pub fn count_tokens(&self, text: &str) -> usize {
        let mut ids = Vec::new();
        pretokenize(text)
            .into_iter()
            .map(|r| {
                let chunk = text[r].as_bytes();
                if let Some(n) = self.counts.get(chunk) {
                    return n as usize;
                }
                ids.clear();
                let _ = self.encode_chunk_into(chunk, &mut ids, false, true);
                self.counts.put(chunk, ids.len() as u32);
                ids.len()
            })
            .sum()
    }

    pub fn detokenize(&self, ids: &[u32]) -> Vec<u8> {
        let mut out = Vec::new();
        for &id in ids {
            match self.decoder.get(&id) {
                Some(bytes) => out.extend_from_slice(bytes),
                None if id >= self.fallback_base && id - self.fallback_base < 256 => {
                    out.push((id - self.fallback_base) as u8)
                }
                None => {}
            }
        }
        out
    }

    /// Vocabulary strings for `text`'s tokens (byte-level encoded).
    pub fn token_strings(&self, text: &str) -> Result<Vec<String>, TokenizerError> {
        Ok(self
            .tokenize(text)?
            .into_iter()
            .map(|id| self.detokenize(&[id]).into_iter().map(byte_to_char).collect())
            .collect())
    }

    fn encode_chunk(&self, chunk: &[u8], out: &mut Vec<u32>, naive: bool) -> Result<(), TokenizerError> {
        self.encode_chunk_into(chunk, out, naive, self.byte_fallback)
    }

    fn encode_chunk_into(
        &self,
        chunk: &[u8],
        out: &mut Vec<u32>,
        naive: bool,
        fallback: bool,
    ) -> Result<(), TokenizerError> {
        if chunk.is_empty() {
            return Ok(());
        }
        let mut symbols = Vec::with_capacity(chunk.len());
        for &b in chunk {
            match self.byte_ids[b as usize] {
                Some(id) => symbols.push(id),
                None if fallback => symbols.push(self.fallback_base + b as u32),
                None => return Err(TokenizerError::UnencodableByte(b)),
            }
        }
        let merged = if naive {
            self.merge_naive(symbols)
        } else {
            self.merge_heap(symbols)
        };
        out.extend(merged);
        Ok(())
    }

    fn rank(&self, l: u32, r: u32) -> Option<(u32, u32)> {
        self.merge_ids.get(&(l, r)).copied()
    }

    /// Each round finds the lowest-rank adjacent pair and merges every
    /// non-overlapping occurrence of it left to right.
    fn merge_naive(&self, mut word: Vec<u32>) -> Vec<u32> {
        loop {
            let best = word
                .windows(2)
                .filter_map(|w| self.rank(w[0], w[1]).map(|(rank, merged)| (rank, w[0], w[1], merged)))
                .min();
            let Some((_, l, r, merged)) = best else { return word };
            let mut next = Vec::with_capacity(word.len());
            let mut i = 0;
            while i < word.len() {
                if i + 1 < word.len() && word[i] == l && word[i + 1] == r {
                    next.push(merged);
                    i += 2;
                } else {
                    next.push(word[i]);
                    i += 1;
                }
            }
            word = next;
        }
    }

    /// Same semantics as [`Self::merge_naive`], driven by a min-heap over a
    /// linked list of symbols. All occurrences of one rank are applied as a
    /// batch before pairs created by those merges become eligible.
    fn merge_heap(&self, word: Vec<u32>) -> Vec<u32> {
        const NONE: usize = usize::MAX;
        let n = word.len();
        let mut ids = word;
        let mut alive = vec![true; n];
        let mut prev: Vec<usize> = (0..n).map(|i| if i == 0 { NONE } else { i - 1 }).collect();
        let mut next: Vec<usize> = (0..n).map(|i| if i + 1 == n { NONE } else { i + 1 }).collect();

        let mut heap = BinaryHeap::new();
        for i in 0..n.saturating_sub(1) {
            if let Some((rank, _)) = self.rank(ids[i], ids[i + 1]) {
                heap.push(Reverse((rank, i, ids[i], ids[i + 1])));
            }
        }

        let mut pending = Vec::new();
        while let Some(&Reverse((rank, ..))) = heap.peek() {
            while let Some(&Reverse((r, pos, l, rt))) = heap.peek() {
                if r != rank {
                    break;
                }
                heap.pop();
                let j = next[pos];
                if !alive[pos] || j == NONE || ids[pos] != l || ids[j] != rt {
                    continue;
                }
                let (_, merged) = self.rank(l, rt).expect("ranked pair");
                ids[pos] = merged;
                alive[j] = false;
                next[pos] = next[j];
                if next[j] != NONE {
                    prev[next[j]] = pos;
                }
                pending.push(pos);
            }
            for pos in pending.drain(..) {
                if !alive[pos] {
                    continue;
                }
                let p = prev[pos];
                if p != NONE {
                    if let Some((r, _)) = self.rank(ids[p], ids[pos]) {
                        heap.push(Reverse((r, p, ids[p], ids[pos])));
                    }
                }
                let q = next[pos];
                if q != NONE {
                    if let Some((r, _)) = self.rank(ids[pos], ids[q]) {
                        heap.push(Reverse((r, pos, ids[pos], ids[q])));
                    }
                }
            }
        }
        (0..n).filter(|&i| alive[i]).map(|i| ids[i]).collect()
    }
}
