//! Left-sided correlation tests between type probability/frequency and
//! type length, plus the Holm-Bonferroni step-down correction.

use crate::model::Lexicon;
use crate::stats::distributions::{normal_left_cdf, student_t_left_cdf};
use crate::stats::{for_each_permutation, KahanSum, StatsError, EXACT_ENUMERATION_CAP};

/// Pearson correlation between type probability and type length, with the
/// pieces of the sample computation exposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PearsonTest {
    pub r: f64,
    /// Left-sided p from the t statistic with n - 2 degrees of freedom.
    pub left_pvalue: f64,
    pub s_p: f64,
    pub s_l: f64,
    pub cov_pl: f64,
}

/// Tie-corrected Kendall correlation with a left-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KendallTest {
    pub tau_b: f64,
    pub left_pvalue: f64,
}

fn kahan_mean(values: &[f64]) -> f64 {
    let mut sum = KahanSum::default();
    for &v in values {
        sum.add(v);
    }
    sum.total() / values.len() as f64
}

/// Pearson correlation of (p_i, l_i) with a left-sided t test.
///
/// Requires n >= 3 and nonzero variance in both columns; constant columns
/// are reported as an undefined correlation.
pub fn pearson_r(lexicon: &Lexicon) -> Result<PearsonTest, StatsError> {
    let n = lexicon.type_count();
    if n < 3 {
        return Err(StatsError::TooFewTypes { n, required: 3 });
    }
    let records = lexicon.records();
    let frequencies_constant = records.iter().all(|r| r.frequency == records[0].frequency);
    let lengths_constant = records.iter().all(|r| r.length == records[0].length);
    if frequencies_constant || lengths_constant {
        return Err(StatsError::UndefinedCorrelation);
    }

    let probabilities: Vec<f64> = lexicon.probabilities().collect();
    let lengths: Vec<f64> = records.iter().map(|r| r.length).collect();
    let mean_p = kahan_mean(&probabilities);
    let mean_l = kahan_mean(&lengths);

    let mut cov = KahanSum::default();
    let mut var_p = KahanSum::default();
    let mut var_l = KahanSum::default();
    for (&p, &l) in probabilities.iter().zip(&lengths) {
        let dp = p - mean_p;
        let dl = l - mean_l;
        cov.add(dp * dl);
        var_p.add(dp * dp);
        var_l.add(dl * dl);
    }
    let denominator = (n - 1) as f64;
    let cov_pl = cov.total() / denominator;
    let s_p = (var_p.total() / denominator).sqrt();
    let s_l = (var_l.total() / denominator).sqrt();
    if s_p == 0.0 || s_l == 0.0 {
        return Err(StatsError::UndefinedCorrelation);
    }

    let r = (cov_pl / (s_p * s_l)).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let left_pvalue = if r <= -1.0 {
        0.0
    } else if r >= 1.0 {
        1.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        student_t_left_cdf(t, df)
    };
    Ok(PearsonTest {
        r,
        left_pvalue,
        s_p,
        s_l,
        cov_pl,
    })
}

/// Integer pair counts behind a Kendall statistic.
#[derive(Debug, Clone, PartialEq, Eq)]
struct PairCounts {
    /// concordant minus discordant
    s: i64,
    /// total pairs n(n-1)/2
    total: i64,
    /// pairs tied in x (including jointly tied)
    tied_x: i64,
    /// pairs tied in y (including jointly tied)
    tied_y: i64,
    /// sizes of tie groups in x, > 1 only
    x_groups: Vec<i64>,
    /// sizes of tie groups in y, > 1 only
    y_groups: Vec<i64>,
}

fn tie_groups(sorted: &[f64]) -> (i64, Vec<i64>) {
    let mut pairs = 0i64;
    let mut groups = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let size = (j - i) as i64;
        if size > 1 {
            pairs += size * (size - 1) / 2;
            groups.push(size);
        }
        i = j;
    }
    (pairs, groups)
}

/// Bottom-up merge sort that counts how many strictly-descending pairs it
/// swaps; equal elements never count.
fn merge_count_swaps(values: &mut [f64]) -> i64 {
    let n = values.len();
    let mut buffer = vec![0.0f64; n];
    let mut swaps = 0i64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = usize::min(lo + width, n);
            let hi = usize::min(lo + 2 * width, n);
            if mid < hi {
                let (mut i, mut j, mut out) = (lo, mid, lo);
                while i < mid || j < hi {
                    if j >= hi || (i < mid && values[i] <= values[j]) {
                        buffer[out] = values[i];
                        i += 1;
                    } else {
                        buffer[out] = values[j];
                        swaps += (mid - i) as i64;
                        j += 1;
                    }
                    out += 1;
                }
                values[lo..hi].copy_from_slice(&buffer[lo..hi]);
            }
            lo += 2 * width;
        }
        width *= 2;
    }
    swaps
}

/// Knight's O(n log n) pair counting.
fn count_pairs(x: &[f64], y: &[f64]) -> PairCounts {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    // tie pairs in x, and joint ties within each x group
    let mut tied_x = 0i64;
    let mut tied_xy = 0i64;
    let mut x_groups = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && x[order[j]] == x[order[i]] {
            j += 1;
        }
        let size = (j - i) as i64;
        if size > 1 {
            tied_x += size * (size - 1) / 2;
            x_groups.push(size);
        }
        let mut a = i;
        while a < j {
            let mut b = a + 1;
            while b < j && y[order[b]] == y[order[a]] {
                b += 1;
            }
            let joint = (b - a) as i64;
            tied_xy += joint * (joint - 1) / 2;
            a = b;
        }
        i = j;
    }

    let mut y_in_x_order: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let discordant_swaps = merge_count_swaps(&mut y_in_x_order);
    let (tied_y, y_groups) = tie_groups(&y_in_x_order);

    let total = (n as i64) * (n as i64 - 1) / 2;
    let s = total - tied_x - tied_y + tied_xy - 2 * discordant_swaps;
    PairCounts {
        s,
        total,
        tied_x,
        tied_y,
        x_groups,
        y_groups,
    }
}

/// Direct O(n^2) count of concordant minus discordant pairs; shared by the
/// exact permutation distribution. Inputs are finite, and -0.0 ties with
/// 0.0 exactly as the fast path's equality does.
fn s_statistic_pairwise(x: &[f64], y: &[f64]) -> i64 {
    let n = x.len();
    let mut s = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let cx = x[i].partial_cmp(&x[j]).expect("finite values") as i64;
            let cy = y[i].partial_cmp(&y[j]).expect("finite values") as i64;
            s += cx * cy;
        }
    }
    s
}

fn tau_b_from_counts(counts: &PairCounts) -> f64 {
    let denom =
        ((counts.total - counts.tied_x) as f64 * (counts.total - counts.tied_y) as f64).sqrt();
    (counts.s as f64 / denom).clamp(-1.0, 1.0)
}

/// Tie-adjusted variance of S under the null, as used by the normal
/// approximation for tau-b.
fn s_variance(counts: &PairCounts, n: usize) -> f64 {
    let n = n as f64;
    let cube = |groups: &[i64], f: fn(f64) -> f64| groups.iter().map(|&t| f(t as f64)).sum::<f64>();
    let v0 = n * (n - 1.0) * (2.0 * n + 5.0);
    let vt = cube(&counts.x_groups, |t| t * (t - 1.0) * (2.0 * t + 5.0));
    let vu = cube(&counts.y_groups, |t| t * (t - 1.0) * (2.0 * t + 5.0));
    let t1 = cube(&counts.x_groups, |t| t * (t - 1.0));
    let u1 = cube(&counts.y_groups, |t| t * (t - 1.0));
    let t2 = cube(&counts.x_groups, |t| t * (t - 1.0) * (t - 2.0));
    let u2 = cube(&counts.y_groups, |t| t * (t - 1.0) * (t - 2.0));
    (v0 - vt - vu) / 18.0
        + t1 * u1 / (2.0 * n * (n - 1.0))
        + t2 * u2 / (9.0 * n * (n - 1.0) * (n - 2.0))
}

/// Kendall tau-b between type frequency and type length, left-sided.
///
/// For n up to the exact-enumeration cap the p-value is the exact
/// permutation distribution of S; beyond that, the normal approximation
/// with tie-adjusted variance.
pub fn kendall_tau(lexicon: &Lexicon) -> Result<KendallTest, StatsError> {
    let records = lexicon.records();
    let n = records.len();
    if n < 2 {
        return Err(StatsError::TooFewTypes { n, required: 2 });
    }
    let frequencies_constant = records.iter().all(|r| r.frequency == records[0].frequency);
    let lengths_constant = records.iter().all(|r| r.length == records[0].length);
    if frequencies_constant || lengths_constant {
        return Err(StatsError::UndefinedCorrelation);
    }

    let x: Vec<f64> = records.iter().map(|r| r.frequency as f64).collect();
    let y: Vec<f64> = records.iter().map(|r| r.length).collect();
    let counts = count_pairs(&x, &y);
    let tau_b = tau_b_from_counts(&counts);

    let left_pvalue = if n <= EXACT_ENUMERATION_CAP {
        // enumerate permutations of the length column; the tie structure of
        // both columns is invariant, so comparing S compares tau_b
        let observed = counts.s;
        let mut at_or_below = 0u64;
        let mut permutations = 0u64;
        let mut permuted = vec![0.0f64; n];
        for_each_permutation(n, |sigma| {
            for (slot, &source) in permuted.iter_mut().zip(sigma) {
                *slot = y[source];
            }
            if s_statistic_pairwise(&x, &permuted) <= observed {
                at_or_below += 1;
            }
            permutations += 1;
        });
        at_or_below as f64 / permutations as f64
    } else {
        let variance = s_variance(&counts, n);
        debug_assert!(variance > 0.0);
        normal_left_cdf(counts.s as f64 / variance.sqrt())
    };

    Ok(KendallTest { tau_b, left_pvalue })
}

/// Pair counts exposed for oracle comparison in tests: returns
/// (S, tied_x pairs, tied_y pairs, tau_b).
pub fn kendall_pair_counts(x: &[f64], y: &[f64]) -> (i64, i64, i64, f64) {
    let counts = count_pairs(x, y);
    (
        counts.s,
        counts.tied_x,
        counts.tied_y,
        tau_b_from_counts(&counts),
    )
}

/// Holm-Bonferroni step-down adjustment, returned in the input order.
pub fn holm_bonferroni(pvalues: &[f64]) -> Result<Vec<f64>, StatsError> {
    for &p in pvalues {
        if !(0.0..=1.0).contains(&p) {
            return Err(StatsError::InvalidPValue(p));
        }
    }
    let m = pvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]).then(a.cmp(&b)));
    let mut adjusted = vec![0.0f64; m];
    let mut running_max = 0.0f64;
    for (rank, &index) in order.iter().enumerate() {
        let scaled = (m - rank) as f64 * pvalues[index];
        running_max = running_max.max(scaled);
        adjusted[index] = running_max.min(1.0);
    }
    Ok(adjusted)
}
