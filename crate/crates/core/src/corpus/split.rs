//! Seeded train/test splitting.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`), and
//! the shuffle is a Fisher-Yates pass drawing bounded integers by rejection
//! sampling on raw 64-bit outputs. Both are fixed here rather than borrowed
//! from `rand`'s `SliceRandom`, whose algorithm is not stable across
//! releases, so golden split fixtures stay valid.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Corpus, CorpusError, Label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    /// Sorted ascending.
    pub train_ids: Vec<usize>,
    /// Sorted ascending.
    pub test_ids: Vec<usize>,
    pub seed: u64,
    pub train_fraction: f64,
}

fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let r = rng.next_u64();
        if r < zone {
            return r % bound;
        }
    }
}

/// Seeded Fisher-Yates shuffle.
pub(crate) fn shuffle<T>(items: &mut [T], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..items.len()).rev() {
        let j = uniform_below(&mut rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

fn check_fraction(train_fraction: f64) -> Result<(), CorpusError> {
    if train_fraction > 0.0 && train_fraction < 1.0 {
        Ok(())
    } else {
        Err(CorpusError::InvalidFraction(train_fraction))
    }
}

fn train_size(n: usize, train_fraction: f64) -> usize {
    ((train_fraction * n as f64).round() as usize).min(n)
}

/// Plain random split: shuffle all ids, the first `round(fraction * n)` train.
pub fn split_corpus(corpus: &Corpus, train_fraction: f64, seed: u64) -> Result<Split, CorpusError> {
    check_fraction(train_fraction)?;
    if corpus.is_empty() {
        return Err(CorpusError::Empty);
    }
    let n = corpus.len();
    let mut ids: Vec<usize> = (0..n).collect();
    shuffle(&mut ids, seed);
    let k = train_size(n, train_fraction);
    let mut train_ids = ids[..k].to_vec();
    let mut test_ids = ids[k..].to_vec();
    train_ids.sort_unstable();
    test_ids.sort_unstable();
    Ok(Split {
        train_ids,
        test_ids,
        seed,
        train_fraction,
    })
}

/// Per-class split: each label's ids are shuffled (seeded by `seed` and the
/// label index) and `round(fraction * n_class)` go to train. The total train
/// size can differ from `round(fraction * n)` by one per class.
pub fn split_corpus_stratified(
    corpus: &Corpus,
    train_fraction: f64,
    seed: u64,
) -> Result<Split, CorpusError> {
    check_fraction(train_fraction)?;
    if corpus.is_empty() {
        return Err(CorpusError::Empty);
    }
    let mut train_ids = Vec::new();
    let mut test_ids = Vec::new();
    for label in Label::ALL {
        let mut ids: Vec<usize> = corpus
            .documents()
            .iter()
            .filter(|d| d.label == label)
            .map(|d| d.id)
            .collect();
        shuffle(&mut ids, seed.wrapping_add(label.index() as u64));
        let k = train_size(ids.len(), train_fraction);
        train_ids.extend_from_slice(&ids[..k]);
        test_ids.extend_from_slice(&ids[k..]);
    }
    train_ids.sort_unstable();
    test_ids.sort_unstable();
    Ok(Split {
        train_ids,
        test_ids,
        seed,
        train_fraction,
    })
}
