//! Character trigram encoding over a 27-symbol vocabulary (`a`–`z`, space).

use crate::error::Result;
use crate::hypervector::{sign_of_counts, BipolarHypervector};

use super::memory::ItemMemory;

pub const VOCABULARY_SIZE: usize = 27;
pub const MAX_TEXT_LEN: usize = 128;

/// Index of `c` in the vocabulary, or `None` for characters that are dropped.
pub fn symbol_index(c: char) -> Option<usize> {
    match c {
        'a'..='z' => Some(c as usize - 'a' as usize),
        ' ' => Some(26),
        _ => None,
    }
}

/// Lowercases, collapses whitespace runs to single spaces, and truncates to
/// [`MAX_TEXT_LEN`] characters.
pub fn preprocess_text(raw: &str) -> String {
    let collapsed = raw.split_whitespace().collect::<Vec<_>>().join(" ");
    collapsed.to_lowercase().chars().take(MAX_TEXT_LEN).collect()
}

/// Trigram encoder with the permuted symbol vectors precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigramEncoder {
    symbols: ItemMemory,
    once: Vec<BipolarHypervector>,
    twice: Vec<BipolarHypervector>,
}

impl TrigramEncoder {
    pub fn new(symbols: ItemMemory) -> Self {
        let once = symbols.iter().map(|s| s.permute(1)).collect();
        let twice = symbols.iter().map(|s| s.permute(2)).collect();
        Self {
            symbols,
            once,
            twice,
        }
    }

    pub fn item_memory(&self) -> &ItemMemory {
        &self.symbols
    }

    /// `sign(Σ_t S_t ⊗ ρ(S_{t+1}) ⊗ ρ²(S_{t+2}))` over the in-vocabulary
    /// symbols of `text`. Fewer than three symbols yields all `+1`.
    pub fn encode(&self, text: &str) -> Result<BipolarHypervector> {
        let idx: Vec<usize> = text.chars().filter_map(symbol_index).collect();
        let mut counts = vec![0i32; self.symbols.dim()];
        for w in idx.windows(3) {
            let a = self.symbols.get(w[0]).elements();
            let b = self.once[w[1]].elements();
            let c = self.twice[w[2]].elements();
            for (((acc, &x), &y), &z) in counts.iter_mut().zip(a).zip(b).zip(c) {
                *acc += i32::from(x * y * z);
            }
        }
        Ok(sign_of_counts(&counts))
    }
}

/// Convenience wrapper that builds the permuted memories on the fly.
pub fn encode_trigram_text(text: &str, im: &ItemMemory) -> Result<BipolarHypervector> {
    TrigramEncoder::new(im.clone()).encode(text)
}
