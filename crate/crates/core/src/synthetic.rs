//! Deterministic synthetic binary classification sets in libsvm format.
//!
//! Both sets share a hidden linear separator. Each example draws every
//! coordinate with probability [`DENSITY`] and a value uniform in `[-1, 1]`,
//! printed with four decimals. The separable set keeps only examples whose
//! normalized margin is at least [`MARGIN`]; the noisy set flips each label
//! with probability [`FLIP_RATE`].

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DIM: usize = 20;
pub const N_EXAMPLES: usize = 10_000;
pub const DENSITY: f64 = 0.35;
pub const MARGIN: f64 = 0.1;
pub const FLIP_RATE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Separable,
    Noisy,
}

impl Flavor {
    pub const ALL: [Flavor; 2] = [Flavor::Separable, Flavor::Noisy];

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Separable => "separable",
            Flavor::Noisy => "noisy",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.libsvm", self.name())
    }

    fn seed(self) -> u64 {
        match self {
            Flavor::Separable => 0x5e9a_0001,
            Flavor::Noisy => 0x5e9a_0002,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub flavor: Flavor,
    pub n_examples: usize,
    pub dim: usize,
}

impl SyntheticConfig {
    pub fn bundled(flavor: Flavor) -> Self {
        SyntheticConfig {
            flavor,
            n_examples: N_EXAMPLES,
            dim: DIM,
        }
    }
}

fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

/// Renders the dataset as libsvm text, one example per LF-terminated line.
pub fn generate(config: &SyntheticConfig) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(config.flavor.seed());
    let hidden: Vec<f64> = (0..config.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let hidden_norm = hidden.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut out = String::new();
    let mut made = 0;
    let mut features = Vec::with_capacity(config.dim);
    while made < config.n_examples {
        features.clear();
        for i in 0..config.dim {
            if rng.gen_bool(DENSITY) {
                let v = round4(rng.gen_range(-1.0..1.0));
                if v != 0.0 {
                    features.push((i + 1, v));
                }
            }
        }
        let score: f64 = features.iter().map(|&(i, v)| hidden[i - 1] * v).sum();
        let mut positive = score > 0.0;
        match config.flavor {
            Flavor::Separable => {
                if score.abs() < MARGIN * hidden_norm {
                    continue;
                }
            }
            Flavor::Noisy => {
                if features.is_empty() {
                    continue;
                }
                if rng.gen_bool(FLIP_RATE) {
                    positive = !positive;
                }
            }
        }
        out.push_str(if positive { "+1" } else { "-1" });
        for &(i, v) in &features {
            write!(out, " {i}:{v:.4}").expect("write to String");
        }
        out.push('\n');
        made += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DatasetHandle;

    #[test]
    fn deterministic_and_parseable() {
        let cfg = SyntheticConfig {
            flavor: Flavor::Noisy,
            n_examples: 200,
            dim: 5,
        };
        let a = generate(&cfg);
        assert_eq!(a, generate(&cfg));
        let ds = DatasetHandle::from_text("noisy", a).unwrap();
        assert_eq!(ds.n_examples(), 200);
        assert!(ds.dimension() <= 5);
    }

    #[test]
    fn separable_examples_have_margin() {
        let cfg = SyntheticConfig {
            flavor: Flavor::Separable,
            n_examples: 300,
            dim: 8,
        };
        let text = generate(&cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(Flavor::Separable.seed());
        let hidden: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = hidden.iter().map(|v| v * v).sum::<f64>().sqrt();
        for ex in DatasetHandle::from_text("s", text).unwrap().load().unwrap() {
            let score: f64 = ex
                .features()
                .iter()
                .map(|&(i, v)| hidden[i as usize - 1] * v)
                .sum();
            assert!(ex.label().sign() * score >= MARGIN * norm);
        }
    }
}
