use super::tokenize::{words, Token};
use crate::lexicon::VadLexicon;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VadResult {
    pub valence: Option<f64>,
    pub arousal: Option<f64>,
    pub dominance: Option<f64>,
    pub matched_count: usize,
}

/// Unweighted mean of each dimension over the word tokens found in `lexicon`.
pub fn classify_vad(tokens: &[Token], lexicon: &VadLexicon) -> VadResult {
    let mut sum = [0.0f64; 3];
    let mut n = 0usize;
    for entry in words(tokens).filter_map(|t| lexicon.get(&t.lower)) {
        sum[0] += entry.valence;
        sum[1] += entry.arousal;
        sum[2] += entry.dominance;
        n += 1;
    }
    if n == 0 {
        return VadResult::default();
    }
    let mean = |s: f64| Some(s / n as f64);
    VadResult {
        valence: mean(sum[0]),
        arousal: mean(sum[1]),
        dominance: mean(sum[2]),
        matched_count: n,
    }
}
