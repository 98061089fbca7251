//! Uniform random plane trees via the cycle lemma.
//!
//! A sample shuffles `n - 1` up-steps and `n` down-steps, rotates the
//! sequence to start right after its first minimum prefix sum, and drops the
//! final down-step; what remains is a uniformly distributed Dyck word.
//!
//! Randomness comes from [`SplitMix64`] seeded per `(seed, stream_index)`,
//! so every sample is a pure function of its coordinates and batches can be
//! split across threads without changing any result.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::enumerate::{encodings_of_size, EnumerateError};
use crate::monomial::Monomial;
use crate::numeric::rational_to_f64;
use crate::tree::{fold_bits, indices_from_bits, DistanceFold, Tree};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xD1B5_4A32_D192_ED03;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 (Steele, Lea, Flood). State advances by the golden gamma and
/// each output is the 64-bit finalizer of the state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Independent substream `stream_index` of `seed`.
    pub fn stream(seed: u64, stream_index: u64) -> Self {
        let salt = mix64(stream_index.wrapping_add(STREAM_SALT));
        SplitMix64::new(mix64(seed ^ salt))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform integer in `0..bound` (Lemire's multiply-and-reject).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let mut m = u128::from(self.next_u64()) * u128::from(bound);
        if (m as u64) < bound {
            let threshold = bound.wrapping_neg() % bound;
            while (m as u64) < threshold {
                m = u128::from(self.next_u64()) * u128::from(bound);
            }
        }
        (m >> 64) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("tree size must be at least 1")]
    ZeroSize,
    #[error("sample count must be at least 1")]
    ZeroCount,
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
}

impl SampleConfig {
    pub fn validate(&self) -> Result<(), SampleError> {
        if self.n == 0 {
            Err(SampleError::ZeroSize)
        } else if self.m == 0 {
            Err(SampleError::ZeroCount)
        } else {
            Ok(())
        }
    }
}

/// Encoding bits (root pair included) of a uniform tree on `n` vertices.
pub fn sample_bits(n: usize, stream_index: u64, seed: u64) -> Vec<bool> {
    assert!(n >= 1, "a tree has at least one vertex");
    let len = 2 * n - 1;
    let mut steps = vec![true; n - 1];
    steps.resize(len, false);
    let mut rng = SplitMix64::stream(seed, stream_index);
    for i in (1..len).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        steps.swap(i, j);
    }
    let mut height: i64 = 0;
    let mut lowest = i64::MAX;
    let mut cut = 0;
    for (i, &up) in steps.iter().enumerate() {
        height += if up { 1 } else { -1 };
        if height < lowest {
            lowest = height;
            cut = i;
        }
    }
    steps.rotate_left(cut + 1);
    let last = steps.pop();
    debug_assert_eq!(last, Some(false));
    let mut bits = Vec::with_capacity(2 * n);
    bits.push(true);
    bits.extend(steps);
    bits.push(false);
    bits
}

pub fn sample_tree(n: usize, stream_index: u64, seed: u64) -> Tree {
    Tree::from_valid_bits(&sample_bits(n, stream_index, seed))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    pub m: usize,
    pub sum: BigUint,
    pub sum_sq: BigUint,
    pub mean: BigRational,
    /// Unbiased sample variance; zero when `m = 1`.
    pub variance: BigRational,
}

impl MomentEstimate {
    fn from_sums(m: usize, sum: BigUint, sum_sq: BigUint) -> Self {
        let mb = BigInt::from(m);
        let s1 = BigInt::from(sum.clone());
        let s2 = BigInt::from(sum_sq.clone());
        let mean = BigRational::new(s1.clone(), mb.clone());
        let variance = if m > 1 {
            BigRational::new(&mb * s2 - &s1 * &s1, &mb * (&mb - 1))
        } else {
            BigRational::zero()
        };
        MomentEstimate {
            m,
            sum,
            sum_sq,
            mean,
            variance,
        }
    }

    pub fn mean_f64(&self) -> f64 {
        rational_to_f64(&self.mean)
    }

    pub fn variance_f64(&self) -> f64 {
        rational_to_f64(&self.variance)
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance_f64() / self.m as f64).sqrt()
    }
}

fn sample_values(n: usize, idx: u64, seed: u64, monomials: &[Monomial], out: &mut Vec<BigUint>) {
    let bits = sample_bits(n, idx, seed);
    out.clear();
    if monomials.iter().all(Monomial::only_distances) {
        let stats = fold_bits::<DistanceFold>(&bits);
        for m in monomials {
            let v = m.powers().fold(BigUint::from(1u32), |acc, (f, e)| {
                let base = match f {
                    crate::monomial::Factor::D => stats.d,
                    _ => stats.w,
                };
                acc * BigUint::from(base).pow(e)
            });
            out.push(v);
        }
    } else {
        let b = indices_from_bits(&bits);
        out.extend(monomials.iter().map(|m| m.eval(&b)));
    }
}

/// Exact sums of each monomial and its square over `cfg.m` samples.
pub fn empirical_moments(
    cfg: SampleConfig,
    monomials: &[Monomial],
) -> Result<Vec<(Monomial, MomentEstimate)>, SampleError> {
    cfg.validate()?;
    let k = monomials.len();
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(cfg.m)
        .max(1);
    let chunk = cfg.m.div_ceil(workers);
    let partials: Vec<Vec<(BigUint, BigUint)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(cfg.m);
                scope.spawn(move || {
                    let mut acc = vec![(BigUint::zero(), BigUint::zero()); k];
                    let mut vals = Vec::with_capacity(k);
                    for idx in lo..hi {
                        sample_values(cfg.n, idx as u64, cfg.seed, monomials, &mut vals);
                        for ((s1, s2), v) in acc.iter_mut().zip(&vals) {
                            *s2 += v * v;
                            *s1 += v;
                        }
                    }
                    acc
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampling worker panicked"))
            .collect()
    });
    let mut totals = vec![(BigUint::zero(), BigUint::zero()); k];
    for part in partials {
        for ((t1, t2), (p1, p2)) in totals.iter_mut().zip(part) {
            *t1 += p1;
            *t2 += p2;
        }
    }
    Ok(monomials
        .iter()
        .cloned()
        .zip(totals)
        .map(|(mono, (s1, s2))| (mono, MomentEstimate::from_sums(cfg.m, s1, s2)))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareResult {
    pub n: usize,
    pub m: usize,
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub critical_value: f64,
}

impl ChiSquareResult {
    pub fn passes(&self) -> bool {
        self.statistic < self.critical_value
    }
}

/// Pearson chi-square of sampled tree frequencies against the uniform law
/// over all trees of size `n`, with the critical value at `level`.
pub fn chi_square_uniformity(
    n: usize,
    m: usize,
    seed: u64,
    level: f64,
) -> Result<ChiSquareResult, SampleError> {
    SampleConfig { n, m, seed }.validate()?;
    let index: HashMap<Vec<bool>, usize> = encodings_of_size(n, crate::enumerate::DEFAULT_CAP)?
        .enumerate()
        .map(|(i, bits)| (bits, i))
        .collect();
    let cells = index.len();
    let mut observed = vec![0u64; cells];
    for s in 0..m as u64 {
        observed[index[&sample_bits(n, s, seed)]] += 1;
    }
    let expected = m as f64 / cells as f64;
    let statistic = observed
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum();
    let df = cells.saturating_sub(1);
    let critical_value = if df == 0 {
        f64::INFINITY
    } else {
        ChiSquared::new(df as f64)
            .expect("positive degrees of freedom")
            .inverse_cdf(level)
    };
    Ok(ChiSquareResult {
        n,
        m,
        statistic,
        degrees_of_freedom: df,
        critical_value,
    })
}

/// Observed frequency of each tree, for inspection.
pub fn frequencies(n: usize, m: usize, seed: u64) -> HashMap<String, u64> {
    let mut counts = HashMap::new();
    for s in 0..m as u64 {
        let t = sample_tree(n, s, seed);
        *counts.entry(t.encode()).or_insert(0) += 1;
    }
    counts
}
