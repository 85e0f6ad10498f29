//! Orientation words of cousin tiles.
//!
//! After `N` substitution steps each tile descends through a chain of `N`
//! daughters; its orientation is the product of those daughters'
//! orientation words (the reference daughter keeps the mother's orientation,
//! so no correcting prefix is needed). Averaging the irrep matrices of all
//! `8ᴺ` such words gives `ẑᴺ`; [`moment_residual`] measures that identity
//! exactly or by Monte Carlo.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupring::{daughter_words, quaquaversal_element, Word, WordEvaluator};
use crate::linalg::{self, frobenius, CMatrix};
use crate::repgen::IrrepIndex;

pub const DAUGHTERS: usize = 8;
/// Largest word count enumerated exactly.
pub const MAX_EXACT_WORDS: u64 = 10_000_000;
/// Monte Carlo runs are split into this many independently seeded shards.
pub const SAMPLE_SHARDS: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GenerationIndex(u32);

impl GenerationIndex {
    pub const fn new(n: u32) -> Self {
        GenerationIndex(n)
    }

    pub const fn n(self) -> u32 {
        self.0
    }

    /// `8ᴺ`, saturating.
    pub fn word_count(self) -> u64 {
        (DAUGHTERS as u64).saturating_pow(self.0)
    }

    pub fn exact_allowed(self) -> bool {
        self.word_count() <= MAX_EXACT_WORDS
    }

    fn require_exact(self) -> Result<()> {
        if self.exact_allowed() {
            Ok(())
        } else {
            Err(Error::EnumerationTooLarge {
                n: self.0,
                bound: MAX_EXACT_WORDS,
            })
        }
    }
}

fn product_of(daughters: &[Word; DAUGHTERS], chain: &[u8]) -> Word {
    Word::new(
        chain
            .iter()
            .flat_map(|&i| daughters[i as usize].syllables())
            .map(|&(g, e)| (g, e as i64)),
    )
}

/// Daughter chains of generation `N` in lexicographic order (first level
/// most significant).
#[derive(Debug, Clone)]
pub struct CousinChains {
    n: u32,
    next: u64,
    end: u64,
}

impl CousinChains {
    fn range(n: GenerationIndex, start: u64, end: u64) -> Self {
        CousinChains {
            n: n.n(),
            next: start,
            end,
        }
    }
}

impl Iterator for CousinChains {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        if self.next >= self.end {
            return None;
        }
        let mut index = self.next;
        self.next += 1;
        let mut chain = vec![0u8; self.n as usize];
        for slot in chain.iter_mut().rev() {
            *slot = (index % DAUGHTERS as u64) as u8;
            index /= DAUGHTERS as u64;
        }
        Some(chain)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for CousinChains {}

pub fn cousin_chains(n: GenerationIndex) -> Result<CousinChains> {
    n.require_exact()?;
    Ok(CousinChains::range(n, 0, n.word_count()))
}

/// Normalized orientation words of all `8ᴺ` generation-`N` cousins.
pub fn cousin_words(n: GenerationIndex) -> Result<impl Iterator<Item = Word>> {
    let daughters = daughter_words();
    Ok(cousin_chains(n)?.map(move |chain| product_of(&daughters, &chain)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientationSample {
    pub word: Word,
    /// Daughter index chosen at each level.
    pub daughters: Vec<u8>,
    pub seed: u64,
    /// Position in the sampler's stream.
    pub index: u64,
}

/// Endless stream of i.i.d. uniformly sampled generation-`N` cousins.
#[derive(Debug, Clone)]
pub struct CousinSampler {
    rng: ChaCha8Rng,
    n: GenerationIndex,
    seed: u64,
    index: u64,
    daughters: [Word; DAUGHTERS],
}

impl CousinSampler {
    pub fn new(n: GenerationIndex, seed: u64) -> Self {
        Self::with_stream(n, seed, 0)
    }

    /// Independent stream `stream` derived from `seed`.
    pub fn with_stream(n: GenerationIndex, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        CousinSampler {
            rng,
            n,
            seed,
            index: 0,
            daughters: daughter_words(),
        }
    }

    fn next_chain(&mut self) -> Vec<u8> {
        (0..self.n.n())
            .map(|_| self.rng.random_range(0..DAUGHTERS as u8))
            .collect()
    }
}

impl Iterator for CousinSampler {
    type Item = OrientationSample;

    fn next(&mut self) -> Option<OrientationSample> {
        let chain = self.next_chain();
        let sample = OrientationSample {
            word: product_of(&self.daughters, &chain),
            daughters: chain,
            seed: self.seed,
            index: self.index,
        };
        self.index += 1;
        Some(sample)
    }
}

pub fn sample_cousin(n: GenerationIndex, seed: u64) -> OrientationSample {
    CousinSampler::new(n, seed)
        .next()
        .expect("sampler never ends")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum MomentMode {
    Exact,
    Sampled { count: u64, seed: u64 },
}

/// Average of the irrep matrices of all generation-`N` cousin words.
pub fn exact_cousin_average(k: IrrepIndex, n: GenerationIndex) -> Result<CMatrix> {
    n.require_exact()?;
    let ev = WordEvaluator::new(k);
    let daughters = daughter_words();
    let total = n.word_count();
    let chunk = total.div_ceil(64).max(1);
    let dim = k.dim();
    let partials: Vec<CMatrix> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(total);
            CousinChains::range(n, start, end).fold(CMatrix::zeros(dim, dim), |acc, chain| {
                acc + ev.evaluate(&product_of(&daughters, &chain))
            })
        })
        .collect();
    let sum = partials
        .into_iter()
        .fold(CMatrix::zeros(dim, dim), |acc, m| acc + m);
    Ok(sum.scale(1.0 / total as f64))
}

/// Monte Carlo average over `count` sampled cousins, split into
/// [`SAMPLE_SHARDS`] shards whose sums are combined in shard order, so the
/// result is bitwise reproducible for a given seed.
pub fn sampled_cousin_average(
    k: IrrepIndex,
    n: GenerationIndex,
    count: u64,
    seed: u64,
) -> Result<CMatrix> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be positive".into(),
        ));
    }
    let ev = WordEvaluator::new(k);
    let dim = k.dim();
    let partials: Vec<CMatrix> = (0..SAMPLE_SHARDS)
        .into_par_iter()
        .map(|shard| {
            let share = count / SAMPLE_SHARDS + u64::from(shard < count % SAMPLE_SHARDS);
            CousinSampler::with_stream(n, seed, shard)
                .take(share as usize)
                .fold(CMatrix::zeros(dim, dim), |acc, s| {
                    acc + ev.evaluate(&s.word)
                })
        })
        .collect();
    let sum = partials
        .into_iter()
        .fold(CMatrix::zeros(dim, dim), |acc, m| acc + m);
    Ok(sum.scale(1.0 / count as f64))
}

pub fn operator_power(k: IrrepIndex, n: GenerationIndex) -> CMatrix {
    let z = quaquaversal_element().evaluate(k);
    (0..n.n()).fold(linalg::identity(k.dim()), |acc, _| acc * &z)
}

/// `‖avg − ẑᴺ‖_F`.
pub fn moment_residual(k: IrrepIndex, n: GenerationIndex, mode: MomentMode) -> Result<f64> {
    let average = match mode {
        MomentMode::Exact => exact_cousin_average(k, n)?,
        MomentMode::Sampled { count, seed } => sampled_cousin_average(k, n, count, seed)?,
    };
    Ok(frobenius(&(average - operator_power(k, n))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub k: IrrepIndex,
    /// `(N, ‖ẑᴺ‖₂)` for `N = 0..=N_max`.
    pub rows: Vec<(u32, f64)>,
    /// `exp` of the least-squares slope of `ln ‖ẑᴺ‖₂` over `N ≥ 1`.
    pub decay_rate: Option<f64>,
}

pub fn convergence_table(k: IrrepIndex, n_max: u32) -> ConvergenceTable {
    let z = quaquaversal_element().evaluate(k);
    let mut power = linalg::identity(k.dim());
    let mut rows = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        if n > 0 {
            power = &power * &z;
        }
        rows.push((n, linalg::spectral_norm(&power)));
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(n, norm)| *n >= 1 && *norm > 1e-300)
        .map(|&(n, norm)| (n as f64, norm.ln()))
        .collect();
    let decay_rate = (points.len() >= 2).then(|| {
        let m = points.len() as f64;
        let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
        let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
        let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
        (sxy / sxx).exp()
    });
    ConvergenceTable {
        k,
        rows,
        decay_rate,
    }
}
