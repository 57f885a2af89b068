//! Lexicon statistics: mean token length, the random baseline, shuffle
//! enumeration and Monte-Carlo permutation tests, correlation tests and
//! the multiple-testing correction.

mod correlation;
mod distributions;

pub use correlation::{holm_bonferroni, kendall_pair_counts, kendall_tau, pearson_r};
pub use correlation::{KendallTest, PearsonTest};
pub use distributions::{normal_left_cdf, regularized_incomplete_beta, student_t_left_cdf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::Lexicon;

/// Largest type count for which the full n! permutation set is enumerated.
pub const EXACT_ENUMERATION_CAP: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("exact enumeration requires n <= {cap} types (n = {n}); use permutation_test")]
    EnumerationCapExceeded { n: usize, cap: usize },
    #[error("undefined correlation: a column has zero variance")]
    UndefinedCorrelation,
    #[error("test requires at least {required} types (n = {n})")]
    TooFewTypes { n: usize, required: usize },
    #[error("p-value {0} outside [0, 1]")]
    InvalidPValue(f64),
    #[error("permutation test requires at least one trial")]
    ZeroTrials,
}

/// Which column(s) the null hypothesis shuffles. All variants share the
/// same expected mean length; the dual shuffle is realized as a single
/// uniform bijection between the columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShuffleVariant {
    ShuffleFrequencies,
    ShuffleLengths,
    ShuffleBoth,
}

/// Compensated (Kahan) summation; keeps mean-length computations exact
/// enough for corpora with ~1e7 tokens.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum
    }
}

/// Visit every permutation of 0..n in lexicographic order.
pub(crate) fn for_each_permutation<F: FnMut(&[usize])>(n: usize, mut visit: F) {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        visit(&perm);
        // standard next-permutation step
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| perm[i] < perm[i + 1])
        else {
            return;
        };
        let j = (i + 1..n)
            .rev()
            .find(|&j| perm[j] > perm[i])
            .expect("pivot has a successor");
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

/// Mean token length: the frequency-weighted mean of type lengths,
/// `sum(f_i * l_i) / T`.
pub fn mean_token_length(lexicon: &Lexicon) -> f64 {
    let mut weighted = KahanSum::default();
    for record in lexicon.records() {
        weighted.add(record.frequency as f64 * record.length);
    }
    weighted.total() / lexicon.token_count() as f64
}

/// Mean type length: the unweighted mean of type lengths.
pub fn mean_type_length(lexicon: &Lexicon) -> f64 {
    let mut total = KahanSum::default();
    for record in lexicon.records() {
        total.add(record.length);
    }
    total.total() / lexicon.type_count() as f64
}

/// The random baseline: the expected mean token length when frequencies
/// and lengths are re-paired at random. Equals the mean type length under
/// every shuffle variant.
pub fn random_baseline(lexicon: &Lexicon) -> f64 {
    mean_type_length(lexicon)
}

fn shuffled_mean(
    frequencies: &[f64],
    lengths: &[f64],
    token_count: f64,
    sigma: &[usize],
    variant: ShuffleVariant,
) -> f64 {
    let mut weighted = KahanSum::default();
    match variant {
        ShuffleVariant::ShuffleFrequencies => {
            for (i, &source) in sigma.iter().enumerate() {
                weighted.add(frequencies[source] * lengths[i]);
            }
        }
        // the dual shuffle composes two uniform permutations, which is a
        // single uniform permutation; permute the length column
        ShuffleVariant::ShuffleLengths | ShuffleVariant::ShuffleBoth => {
            for (i, &source) in sigma.iter().enumerate() {
                weighted.add(frequencies[i] * lengths[source]);
            }
        }
    }
    weighted.total() / token_count
}

/// The mean token length of every permutation of the shuffled column:
/// n! values, as the null-hypothesis multiset.
pub fn enumerate_shuffles(
    lexicon: &Lexicon,
    variant: ShuffleVariant,
) -> Result<Vec<f64>, StatsError> {
    let n = lexicon.type_count();
    if n > EXACT_ENUMERATION_CAP {
        return Err(StatsError::EnumerationCapExceeded {
            n,
            cap: EXACT_ENUMERATION_CAP,
        });
    }
    let frequencies: Vec<f64> = lexicon
        .records()
        .iter()
        .map(|r| r.frequency as f64)
        .collect();
    let lengths: Vec<f64> = lexicon.records().iter().map(|r| r.length).collect();
    let token_count = lexicon.token_count() as f64;
    let mut values = Vec::new();
    for_each_permutation(n, |sigma| {
        values.push(shuffled_mean(
            &frequencies,
            &lengths,
            token_count,
            sigma,
            variant,
        ));
    });
    Ok(values)
}

/// Monte-Carlo left-tail permutation test for the observed mean token
/// length, with the add-one correction so the p-value is never zero.
/// Deterministic for a fixed seed.
pub fn permutation_test(
    lexicon: &Lexicon,
    variant: ShuffleVariant,
    trials: u64,
    seed: u64,
) -> Result<f64, StatsError> {
    if trials == 0 {
        return Err(StatsError::ZeroTrials);
    }
    let frequencies: Vec<f64> = lexicon
        .records()
        .iter()
        .map(|r| r.frequency as f64)
        .collect();
    let lengths: Vec<f64> = lexicon.records().iter().map(|r| r.length).collect();
    let token_count = lexicon.token_count() as f64;
    let observed = mean_token_length(lexicon);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sigma: Vec<usize> = (0..lexicon.type_count()).collect();
    let mut at_or_below = 0u64;
    for _ in 0..trials {
        sigma.shuffle(&mut rng);
        let shuffled = shuffled_mean(&frequencies, &lengths, token_count, &sigma, variant);
        if shuffled <= observed {
            at_or_below += 1;
        }
    }
    Ok((1 + at_or_below) as f64 / (trials + 1) as f64)
}

/// Every statistic reported for one lexicon.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsSummary {
    /// Frequency-weighted mean length of tokens.
    pub mean_token_length: f64,
    /// Unweighted mean length of types.
    pub mean_type_length: f64,
    /// Random baseline; equals the mean type length.
    pub random_baseline: f64,
    /// Sample covariance between type probability and length.
    pub covariance: f64,
    /// Sample standard deviation of type probabilities.
    pub sd_probability: f64,
    /// Sample standard deviation of type lengths.
    pub sd_length: f64,
    pub pearson_r: f64,
    pub pearson_pvalue: f64,
    pub kendall_tau: f64,
    pub kendall_pvalue: f64,
    pub type_count: usize,
    pub token_count: u64,
}

/// Compute the full statistics block for a lexicon.
pub fn summarize(lexicon: &Lexicon) -> Result<StatsSummary, StatsError> {
    let mean_token = mean_token_length(lexicon);
    let mean_type = mean_type_length(lexicon);
    let pearson = pearson_r(lexicon)?;
    let kendall = kendall_tau(lexicon)?;
    Ok(StatsSummary {
        mean_token_length: mean_token,
        mean_type_length: mean_type,
        random_baseline: mean_type,
        covariance: pearson.cov_pl,
        sd_probability: pearson.s_p,
        sd_length: pearson.s_l,
        pearson_r: pearson.r,
        pearson_pvalue: pearson.left_pvalue,
        kendall_tau: kendall.tau_b,
        kendall_pvalue: kendall.left_pvalue,
        type_count: lexicon.type_count(),
        token_count: lexicon.token_count(),
    })
}
