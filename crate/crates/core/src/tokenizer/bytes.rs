//! The reversible byte <-> printable-char table used by byte-level vocabularies.

use std::collections::HashMap;
use std::sync::OnceLock;

fn tables() -> &'static ([char; 256], HashMap<char, u8>) {
    static TABLES: OnceLock<([char; 256], HashMap<char, u8>)> = OnceLock::new();
    TABLES.get_or_init(|| {
        let printable = |b: u8| matches!(b, b'!'..=b'~' | 0xA1..=0xAC | 0xAE..=0xFF);
        let mut forward = ['\0'; 256];
        let mut shifted = 0u32;
        for b in 0..=255u8 {
            forward[b as usize] = if printable(b) {
                char::from(b)
            } else {
                shifted += 1;
                char::from_u32(255 + shifted).expect("below surrogate range")
            };
        }
        let back = forward.iter().enumerate().map(|(b, &c)| (c, b as u8)).collect();
        (forward, back)
    })
}

pub fn byte_to_char(b: u8) -> char {
    tables().0[b as usize]
}

pub fn char_to_byte(c: char) -> Option<u8> {
    tables().1.get(&c).copied()
}

/// Encodes raw bytes as a vocabulary string.
pub fn bytes_to_token_str(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| byte_to_char(b)).collect()
}

/// Decodes a vocabulary string back to bytes. Characters outside the byte
/// alphabet (hand-written toy vocabularies) fall back to their UTF-8 bytes.
pub fn token_str_to_bytes(s: &str) -> Vec<u8> {
    let mut out = Vec::with_capacity(s.len());
    for c in s.chars() {
        match char_to_byte(c) {
            Some(b) => out.push(b),
            None => {
                let mut buf = [0u8; 4];
                out.extend_from_slice(c.encode_utf8(&mut buf).as_bytes());
            }
        }
    }
    out
}

/// All 256 single-byte vocabulary strings, in byte order.
pub fn byte_alphabet() -> Vec<String> {
    (0..=255u8).map(|b| byte_to_char(b).to_string()).collect()
}
