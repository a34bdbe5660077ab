#![allow(dead_code)]

use abnormality::corpus::{Corpus, Label};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NORMAL_WORDS: &[&str] = &[
    "তুমি",
    "সকালে",
    "ভাত",
    "খেলাম",
    "বাজারে",
    "গেলাম",
    "বই",
    "পড়ছি",
    "স্কুলে",
    "সাথে",
    "খেলা",
    "দেখলাম",
    "বৃষ্টি",
    "হচ্ছে",
    "চা",
    "খাব",
    "গান",
    "শুনি",
    "রান্না",
    "করছে",
    "ছুটির",
    "দিন",
    "বেড়াতে",
    "যাব",
    "নতুন",
    "জামা",
    "কিনেছি",
    "ক্লাসে",
    "পরীক্ষা",
    "ভালো",
    "হয়েছে",
    "বিকেলে",
    "মাঠে",
    "ফুটবল",
    "সিনেমা",
    "আনন্দ",
    "হাসি",
    "উৎসব",
    "বাগানে",
    "ফুল",
];

pub const ABNORMAL_WORDS: &[&str] = &[
    "বাঁচতে",
    "চাই",
    "না",
    "শেষ",
    "ঘৃণা",
    "করি",
    "মেরে",
    "ফেলব",
    "মরে",
    "যেতে",
    "ইচ্ছে",
    "নেই",
    "একা",
    "কষ্ট",
    "সহ্য",
    "হয়না",
    "মদ",
    "খেয়ে",
    "ভুলে",
    "থাকি",
    "আত্মহত্যা",
    "রাগে",
    "মাথা",
    "ফেটে",
    "যাচ্ছে",
    "ঘুম",
    "আসে",
    "অন্ধকার",
    "ভয়",
    "লাগে",
    "কাঁদি",
    "অসহ্য",
    "যন্ত্রণা",
    "বিষ",
    "ছুরি",
    "দুনিয়া",
    "অর্থহীন",
    "হতাশ",
    "ক্লান্ত",
    "শূন্য",
];

/// Words both classes draw from.
pub const SHARED_WORDS: &[&str] = &[
    "আমি",
    "আজ",
    "খুব",
    "এখন",
    "সবাই",
    "রাতে",
    "মনে",
    "হয়",
    "আমার",
    "জীবন",
    "কাল",
    "শুধু",
    "মা",
    "বন্ধুদের",
    "কেউ",
    "সব",
];

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn pick<'a>(&mut self, pool: &[&'a str]) -> &'a str {
        pool[self.below(pool.len())]
    }
}

/// One raw sentence of the given class, possibly carrying emoji, tags and danda.
pub fn sentence(rng: &mut Rng, label: Label) -> String {
    let (own, other) = match label {
        Label::Normal => (NORMAL_WORDS, ABNORMAL_WORDS),
        Label::Abnormal => (ABNORMAL_WORDS, NORMAL_WORDS),
    };
    let len = 4 + rng.below(6);
    let mut words = Vec::with_capacity(len + 2);
    for _ in 0..len {
        let r = rng.unit();
        let pool = if r < 0.55 {
            own
        } else if r < 0.85 {
            SHARED_WORDS
        } else {
            other
        };
        words.push(rng.pick(pool).to_string());
    }
    let mut text = words.join(" ");
    if rng.unit() < 0.5 {
        text.push('।');
    }
    if rng.unit() < 0.1 {
        text.push_str(if label == Label::Abnormal {
            " 😢"
        } else {
            " 😊"
        });
    }
    if rng.unit() < 0.05 {
        text = format!("<p>{text}</p>");
    }
    text
}

/// `n` sentences, `round(0.4 n)` of them abnormal, in shuffled order.
pub fn synthetic_records(n: usize, seed: u64) -> Vec<(Label, String)> {
    let mut rng = Rng::new(seed);
    let n_abnormal = (0.4 * n as f64).round() as usize;
    let mut labels: Vec<Label> = (0..n)
        .map(|i| {
            if i < n_abnormal {
                Label::Abnormal
            } else {
                Label::Normal
            }
        })
        .collect();
    for i in (1..n).rev() {
        let j = rng.below(i + 1);
        labels.swap(i, j);
    }
    labels
        .into_iter()
        .map(|l| (l, sentence(&mut rng, l)))
        .collect()
}

pub fn synthetic_corpus(n: usize, seed: u64) -> Corpus {
    Corpus::from_records(synthetic_records(n, seed), format!("synthetic-{n}-{seed}")).unwrap()
}

/// Dataset file contents in the `label<TAB>text` format.
pub fn synthetic_tsv(n: usize, seed: u64) -> String {
    synthetic_records(n, seed)
        .into_iter()
        .map(|(l, t)| format!("{}\t{}\n", l.index(), t))
        .collect()
}

/// Sentences for probing fitted models, including out-of-vocabulary ones.
pub fn probe_sentences(n: usize, seed: u64) -> Vec<String> {
    let mut rng = Rng::new(seed);
    (0..n)
        .map(|i| match i % 10 {
            0 => "সম্পূর্ণ অচেনা শব্দমালা".to_string(),
            k if k % 2 == 0 => sentence(&mut rng, Label::Abnormal),
            _ => sentence(&mut rng, Label::Normal),
        })
        .collect()
}
