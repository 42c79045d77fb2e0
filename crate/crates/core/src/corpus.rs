//! Seeded random endomorphism words of the highest weight.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::weight::{validate_rank, Weight};
use crate::word::{weight_flow, Factor, Flow, Word};

pub const DEFAULT_SEED: u64 = 20240917;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusWord {
    pub n: usize,
    pub level: i64,
    pub word: Word,
}

#[derive(Clone, Copy, Debug)]
pub struct CorpusSpec {
    pub count: usize,
    pub max_n: usize,
    pub max_level: i64,
    /// Bound on the total divided-power weight.
    pub max_weight: u32,
    pub max_factors: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { count: 200, max_n: 3, max_level: 3, max_weight: 8, max_factors: 7 }
    }
}

/// `(n, N)` pairs with `2 <= n <= max_n`, `1 <= N <= max_level` and `n > N`.
pub fn rank_pairs(spec: &CorpusSpec) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for n in 2..=spec.max_n {
        for level in 1..=spec.max_level {
            if validate_rank(n, level).is_ok() {
                out.push((n, level));
            }
        }
    }
    out
}

fn random_word(rng: &mut StdRng, n: usize, level: i64, spec: &CorpusSpec) -> Word {
    let eta = Weight::eta(n, level);
    loop {
        let len = rng.gen_range(1..=spec.max_factors);
        let mut factors = Vec::with_capacity(len + 1);
        let mut weight = 0;
        for _ in 0..len {
            let i = rng.gen_range(0..n);
            let p = rng.gen_range(1..=level.min(3) as u32);
            weight += p;
            factors.push(if rng.gen_bool(0.5) { Factor::e(i, p) } else { Factor::f(i, p) });
        }
        if weight > spec.max_weight {
            continue;
        }
        factors.push(Factor::Idem(eta.clone()));
        let w = Word::new(factors);
        if w.target(&eta).as_ref() != Some(&eta) {
            continue;
        }
        if let Ok(Flow::Weights(_)) = weight_flow(&w, &eta, level) {
            return w;
        }
    }
}

/// Deterministic for a given seed: ranks cycle through the valid pairs, words are drawn
/// by rejection until they are nonzero endomorphisms of eta. Duplicates are skipped.
pub fn generate(seed: u64, spec: &CorpusSpec) -> Vec<CorpusWord> {
    let mut rng = StdRng::seed_from_u64(seed);
    let pairs = rank_pairs(spec);
    let mut out: Vec<CorpusWord> = Vec::with_capacity(spec.count);
    let mut k = 0;
    while out.len() < spec.count {
        let (n, level) = pairs[k % pairs.len()];
        k += 1;
        let word = random_word(&mut rng, n, level, spec);
        if out.iter().any(|c| c.n == n && c.level == level && c.word == word) && k < 50 * spec.count {
            continue;
        }
        out.push(CorpusWord { n, level, word });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_bounded() {
        let spec = CorpusSpec { count: 30, ..CorpusSpec::default() };
        let a = generate(7, &spec);
        assert_eq!(a, generate(7, &spec));
        assert_ne!(a, generate(8, &spec));
        for c in &a {
            assert!(c.n > c.level as usize && c.word.total_power() <= 8);
        }
    }
}
