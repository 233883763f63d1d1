//! Reversible byte <-> printable-char mapping used by byte-level BPE.
//!
//! Bytes in `[33,126] | [161,172] | [174,255]` map to themselves; the
//! remaining 68 bytes map, in ascending order, to code points 256, 257, ...
//! This is the mapping published GPT-2-family vocabularies are written in.

/// Bijective byte <-> char table over all 256 byte values.
#[derive(Debug, Clone)]
pub struct ByteCharMap {
    forward: [char; 256],
    inverse: std::collections::HashMap<char, u8>,
}

impl ByteCharMap {
    pub fn new() -> Self {
        let mut forward = ['\0'; 256];
        let mut next = 0u32;
        for b in 0..=255u8 {
            let keep = (33..=126).contains(&b) || (161..=172).contains(&b) || b >= 174;
            forward[b as usize] = if keep {
                char::from_u32(u32::from(b)).expect("latin-1 range")
            } else {
                let c = char::from_u32(256 + next).expect("BMP range");
                next += 1;
                c
            };
        }
        let inverse = forward
            .iter()
            .enumerate()
            .map(|(b, &c)| (c, b as u8))
            .collect();
        ByteCharMap { forward, inverse }
    }

    pub fn encode_byte(&self, b: u8) -> char {
        self.forward[b as usize]
    }

    /// Renders a string's UTF-8 bytes in mapped-char space.
    pub fn encode_str(&self, s: &str) -> String {
        s.bytes().map(|b| self.encode_byte(b)).collect()
    }

    pub fn decode_char(&self, c: char) -> Option<u8> {
        self.inverse.get(&c).copied()
    }

    /// Recovers the original bytes from a mapped-char string. Characters
    /// outside the table (impossible for strings produced by `encode_str`)
    /// are skipped.
    pub fn decode_str(&self, s: &str) -> Vec<u8> {
        s.chars().filter_map(|c| self.decode_char(c)).collect()
    }
}

impl Default for ByteCharMap {
    fn default() -> Self {
        Self::new()
    }
}
