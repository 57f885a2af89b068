//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (visible under `cargo test -- --nocapture`). Tolerances are
//! pinned in the assertions.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use brevity_core::report::AnalysisOptions;
use brevity_core::stats::kendall_pair_counts;
use brevity_core::{
    analyze_token_stream, character_inventory, cluster_1d_exact, enumerate_shuffles,
    holm_bonferroni, mean_token_length, pearson_r, permutation_test, random_baseline,
    working_alphabet, Lexicon, Metadata, ParseError, RawToken, ShuffleVariant, TypeRecord, Unit,
};

fn lexicon_from_columns(frequencies: &[u64], lengths: &[f64]) -> Lexicon {
    let records: Vec<TypeRecord> = frequencies
        .iter()
        .zip(lengths)
        .enumerate()
        .map(|(i, (&f, &l))| TypeRecord::new(format!("w{i:06}"), f, l))
        .collect();
    Lexicon::from_records(records, Unit::Mapped, Metadata::default()).unwrap()
}

fn table_lexicon() -> Lexicon {
    lexicon_from_columns(&[100, 20, 5], &[2.0, 1.0, 3.0])
}

fn random_lexicon(
    rng: &mut ChaCha8Rng,
    n_range: std::ops::RangeInclusive<usize>,
    max_frequency: u64,
) -> Lexicon {
    let n = rng.random_range(n_range);
    let frequencies: Vec<u64> = (0..n)
        .map(|_| rng.random_range(1..=max_frequency))
        .collect();
    let lengths: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=10.0)).collect();
    lexicon_from_columns(&frequencies, &lengths)
}

/// Table-driven worked example: the 3-type lexicon, its shuffle multiset
/// and the re-paired variant.
#[test]
fn worked_example_reproduction() {
    let lexicon = table_lexicon();

    let clock = Instant::now();
    let observed = mean_token_length(&lexicon);
    let baseline = random_baseline(&lexicon);
    let elapsed = clock.elapsed();
    assert!((observed - 1.88).abs() <= 1e-12, "L = {observed}");
    assert!((baseline - 2.0).abs() <= 1e-12, "L_r = {baseline}");
    assert!(
        elapsed < Duration::from_millis(1),
        "mean lengths took {elapsed:?}"
    );

    let mut values = enumerate_shuffles(&lexicon, ShuffleVariant::ShuffleLengths).unwrap();
    values.sort_by(f64::total_cmp);
    let expected = [1.24, 1.36, 1.88, 2.12, 2.64, 2.76];
    assert_eq!(values.len(), 6);
    for (got, want) in values.iter().zip(&expected) {
        assert!((got - want).abs() <= 1e-12, "{values:?}");
    }
    let mean: f64 = values.iter().sum::<f64>() / 6.0;
    assert!((mean - 2.0).abs() <= 1e-12);

    let repaired = lexicon_from_columns(&[20, 100, 5], &[2.0, 3.0, 1.0]);
    let repaired_mean = mean_token_length(&repaired);
    assert!(
        (repaired_mean - 2.76).abs() <= 1e-12,
        "L' = {repaired_mean}"
    );

    println!("ACCEPTANCE worked_example_reproduction: PASS");
}

/// The exact-enumeration mean equals the mean type length under all three
/// shuffle variants, over 1,000 random lexicons.
#[test]
fn property1_exact_enumeration_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let clock = Instant::now();
    for round in 0..1000 {
        let lexicon = random_lexicon(&mut rng, 1..=7, 100);
        let type_mean = brevity_core::mean_type_length(&lexicon);
        for variant in [
            ShuffleVariant::ShuffleFrequencies,
            ShuffleVariant::ShuffleLengths,
            ShuffleVariant::ShuffleBoth,
        ] {
            let values = enumerate_shuffles(&lexicon, variant).unwrap();
            let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
            assert!(
                (mean - type_mean).abs() <= 1e-12,
                "round {round}: variant {variant:?}, mean {mean} vs {type_mean}"
            );
        }
    }
    let elapsed = clock.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "enumeration suite took {elapsed:?}"
    );
    println!("ACCEPTANCE property1_exact_enumeration_mean: PASS");
}

/// The Pearson correlation equals the baseline gap scaled by
/// (n-1) * s_p * s_l, and carries its sign, on 1,000 random lexicons with
/// n up to 10^4.
#[test]
fn pearson_identity_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for round in 0..1000 {
        let n = if round % 50 == 0 {
            10_000
        } else {
            // log-uniform over [3, 10^4]
            let exponent = rng.random_range(3.0f64.ln()..=10_000.0f64.ln());
            exponent.exp() as usize
        };
        let n = n.clamp(3, 10_000);
        let frequencies: Vec<u64> = (0..n).map(|_| rng.random_range(1..=100_000u64)).collect();
        let lengths: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=10.0)).collect();
        let lexicon = lexicon_from_columns(&frequencies, &lengths);

        let test = pearson_r(&lexicon).unwrap();
        let gap = mean_token_length(&lexicon) - random_baseline(&lexicon);
        let derived = gap / ((n as f64 - 1.0) * test.s_p * test.s_l);
        assert!(
            (test.r - derived).abs() <= 1e-10,
            "round {round}: r {} vs derived {derived}",
            test.r
        );
        if test.r.abs() > 1e-9 {
            assert_eq!(
                test.r.signum(),
                gap.signum(),
                "round {round}: sign mismatch (r {}, gap {gap})",
                test.r
            );
        }
    }
    println!("ACCEPTANCE pearson_identity_suite: PASS");
}

// independent O(n^2) Kendall oracle
fn kendall_oracle(x: &[f64], y: &[f64]) -> (i64, i64, i64, f64) {
    let n = x.len();
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut tied_x, mut tied_y) = (0i64, 0i64);
    for i in 0..n {
        for j in (i + 1)..n {
            match (x[i] == x[j], y[i] == y[j]) {
                (true, true) => {
                    tied_x += 1;
                    tied_y += 1;
                }
                (true, false) => tied_x += 1,
                (false, true) => tied_y += 1,
                (false, false) => {
                    if (x[i] < x[j]) == (y[i] < y[j]) {
                        concordant += 1;
                    } else {
                        discordant += 1;
                    }
                }
            }
        }
    }
    let total = (n as i64) * (n as i64 - 1) / 2;
    let tau = (concordant - discordant) as f64
        / ((total - tied_x) as f64 * (total - tied_y) as f64).sqrt();
    (concordant - discordant, tied_x, tied_y, tau)
}

// independent per-split two-pass brute force over contiguous splits
fn kmeans_brute_force(values: &[f64]) -> (usize, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let sse = |segment: &[f64]| -> f64 {
        let mean = segment.iter().sum::<f64>() / segment.len() as f64;
        segment.iter().map(|v| (v - mean) * (v - mean)).sum()
    };
    let mut best = (1usize, sse(&sorted[..1]) + sse(&sorted[1..]));
    for boundary in 2..sorted.len() {
        let wcss = sse(&sorted[..boundary]) + sse(&sorted[boundary..]);
        if wcss < best.1 {
            best = (boundary, wcss);
        }
    }
    best
}

/// Fast Kendall vs pairwise oracle, exact 2-means vs brute force, and
/// Monte-Carlo permutation p vs exact enumeration.
#[test]
fn oracle_equivalences() {
    // Kendall tau-b on 200 heavily tied instances: exact equality
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for round in 0..200 {
        let n = rng.random_range(2..=80usize);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..6u8) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0..4u8) as f64).collect();
        if x.iter().all(|&v| v == x[0]) || y.iter().all(|&v| v == y[0]) {
            continue;
        }
        let (s, tied_x, tied_y, tau) = kendall_pair_counts(&x, &y);
        let (s_o, tied_x_o, tied_y_o, tau_o) = kendall_oracle(&x, &y);
        assert_eq!(
            (s, tied_x, tied_y),
            (s_o, tied_x_o, tied_y_o),
            "round {round}"
        );
        assert_eq!(tau, tau_o, "round {round}");
    }

    // exact 1-D 2-means vs brute force for every size up to 12
    for size in 2..=12usize {
        for round in 0..40 {
            let values: Vec<f64> = (0..size)
                .map(|_| rng.random_range(-10.0f64..=10.0))
                .collect();
            let split = cluster_1d_exact(&values, 2).unwrap();
            let (boundary, wcss) = kmeans_brute_force(&values);
            assert_eq!(split.boundary_index, boundary, "size {size} round {round}");
            assert!(
                (split.wcss - wcss).abs() <= 1e-12 * (1.0 + wcss),
                "size {size} round {round}: {} vs {wcss}",
                split.wcss
            );
        }
    }
    // dyadic tie case: both routes see the tie exactly and pick the
    // smaller low cluster
    let tie = [1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
    let split = cluster_1d_exact(&tie, 2).unwrap();
    let (_, brute_wcss) = kmeans_brute_force(&tie);
    assert_eq!(split.boundary_index, 2);
    assert_eq!(split.wcss, 1.0);
    assert_eq!(brute_wcss, 1.0);

    // Monte-Carlo permutation p vs exact enumeration, 10^4 trials
    let trials = 10_000u64;
    for round in 0..12 {
        let lexicon = random_lexicon(&mut rng, 3..=7, 50);
        let observed = mean_token_length(&lexicon);
        for variant in [ShuffleVariant::ShuffleLengths, ShuffleVariant::ShuffleBoth] {
            let values = enumerate_shuffles(&lexicon, variant).unwrap();
            let exact =
                values.iter().filter(|&&v| v <= observed).count() as f64 / values.len() as f64;
            let estimated =
                permutation_test(&lexicon, variant, trials, 0xACCE_0000 + round).unwrap();
            let standard_error = (exact * (1.0 - exact) / trials as f64).sqrt();
            assert!(
                (estimated - exact).abs() <= 3.0 * standard_error + 2.0 / (trials as f64 + 1.0),
                "round {round} {variant:?}: exact {exact}, estimated {estimated}"
            );
        }
    }

    println!("ACCEPTANCE oracle_equivalences: PASS");
}

/// The hand-executed step-down example plus structural properties on
/// 1,000 random p-vectors.
#[test]
fn holm_bonferroni_correction() {
    let adjusted = holm_bonferroni(&[0.01, 0.04, 0.03]).unwrap();
    for (got, want) in adjusted.iter().zip(&[0.03, 0.06, 0.06]) {
        assert!((got - want).abs() <= 1e-12, "{adjusted:?}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    for round in 0..1000 {
        let m = rng.random_range(1..=20usize);
        let pvalues: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..=1.0)).collect();
        let adjusted = holm_bonferroni(&pvalues).unwrap();
        for (a, p) in adjusted.iter().zip(&pvalues) {
            assert!(*a >= *p, "round {round}: adjusted below raw");
            assert!(*a <= 1.0, "round {round}: adjusted above one");
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]));
        for pair in order.windows(2) {
            assert!(
                adjusted[pair[0]] <= adjusted[pair[1]],
                "round {round}: not monotone along sorted order"
            );
        }
        // permutation equivariance
        let shift = rng.random_range(0..m);
        let mut rotated = pvalues.clone();
        rotated.rotate_left(shift);
        let mut expected = adjusted.clone();
        expected.rotate_left(shift);
        assert_eq!(
            holm_bonferroni(&rotated).unwrap(),
            expected,
            "round {round}"
        );
    }
    println!("ACCEPTANCE holm_bonferroni_correction: PASS");
}

/// A 10,000-token Latin corpus plus 5 rare foreign characters: the
/// working alphabet excludes exactly the contaminants and the filtered
/// accounting stays consistent.
#[test]
fn unsupervised_filter_isolates_contaminants() {
    // 40 Latin types over a rotating letter window (lengths 2..=6) so
    // every letter is frequent; Zipf-ish frequencies scaled to exactly
    // 10,000 tokens
    let alphabet: Vec<char> = ('a'..='z').collect();
    let mut base_types: Vec<String> = Vec::new();
    for i in 0..40usize {
        let length = 2 + i % 5;
        let word: String = (0..length).map(|k| alphabet[(i + k) % 26]).collect();
        base_types.push(word);
    }
    let mut frequencies: Vec<u64> = (0..40).map(|i| 2200 / (i as u64 + 1)).collect();
    let total: u64 = frequencies.iter().sum();
    assert!(total <= 10_000, "scale constant too large: {total}");
    frequencies[0] += 10_000 - total;
    assert_eq!(frequencies.iter().sum::<u64>(), 10_000);

    let contaminants = ['\u{3b2}', '\u{442}', '\u{3c9}', '\u{44f}', '\u{3b4}'];
    let contaminant_frequencies = [3u64, 1, 2, 3, 2];

    let mut tokens: Vec<Result<RawToken, ParseError>> = Vec::new();
    for (word, &count) in base_types.iter().zip(&frequencies) {
        for _ in 0..count {
            tokens.push(Ok(RawToken::word(word.clone())));
        }
    }
    for (&foreign, &count) in contaminants.iter().zip(&contaminant_frequencies) {
        let word = format!("xx{foreign}");
        for _ in 0..count {
            tokens.push(Ok(RawToken::word(word.clone())));
        }
    }

    let options = AnalysisOptions {
        metadata: Metadata::named("synthetic-latin"),
        ..AnalysisOptions::default()
    };
    let analysis = analyze_token_stream(tokens, &options).unwrap();
    let report = &analysis.report;

    // the working alphabet excludes exactly the 5 contaminants
    let inventory = character_inventory(&analysis.filtered_lexicon);
    for &foreign in &contaminants {
        assert_eq!(inventory.frequency(foreign), 0);
    }
    assert_eq!(report.alphabet_size, 26 + 5);
    assert_eq!(report.alphabet_size_filtered, 26);
    assert!(analysis
        .filtered_lexicon
        .records()
        .iter()
        .all(|r| r.form.chars().all(|c| c.is_ascii_lowercase())));

    // Table-style A/A', n/n', T/T' accounting
    assert_eq!(report.type_count, 45);
    assert_eq!(report.type_count_filtered, 40);
    assert_eq!(report.token_count, 10_011);
    assert_eq!(report.token_count_filtered, 10_000);
    assert!(report.alphabet_size_filtered <= report.alphabet_size);
    assert!(report.type_count_filtered <= report.type_count);
    assert!(report.token_count_filtered <= report.token_count);

    // cross-check against the filter's own oracle route
    let full_inventory = {
        let all_tokens = base_types
            .iter()
            .zip(&frequencies)
            .flat_map(|(w, &c)| std::iter::repeat_n((w.clone(), None), c as usize))
            .chain(
                contaminants
                    .iter()
                    .zip(&contaminant_frequencies)
                    .flat_map(|(&f, &c)| std::iter::repeat_n((format!("xx{f}"), None), c as usize)),
            );
        let lexicon =
            brevity_core::build_lexicon(all_tokens, Unit::Characters, None, Metadata::default())
                .unwrap();
        character_inventory(&lexicon)
    };
    let kept = working_alphabet(&full_inventory).unwrap();
    let expected: BTreeSet<char> = alphabet.iter().copied().collect();
    assert_eq!(kept, expected);

    println!("ACCEPTANCE unsupervised_filter_isolates_contaminants: PASS");
}

/// Optional integration against a user-supplied English PUD treebank.
/// Skips (with a visible line) when the file is not present.
#[test]
fn pud_english_row() {
    let path = std::env::var_os("BREVITY_PUD_ENGLISH")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/en_pud-ud-test.conllu")
        });
    if !path.exists() {
        println!(
            "ACCEPTANCE pud_english_row: SKIP (no PUD file at {}; set BREVITY_PUD_ENGLISH)",
            path.display()
        );
        return;
    }
    let mut spec =
        brevity_core::LanguageSpec::new("English", path, brevity_core::InputFormat::Conllu);
    spec.unit = Unit::Characters;
    spec.optional_filter = true;
    let analysis = brevity_core::analyze_path(&spec, Path::new(".")).unwrap();
    let report = &analysis.report;

    assert_eq!(report.type_count_filtered, 5001, "n after filter");
    assert_eq!(report.token_count_filtered, 18028, "T after filter");

    let round2 = |v: f64| (v * 100.0).round() / 100.0;
    let checks = [
        ("L", round2(report.summary.mean_token_length), 4.87),
        ("L_r", round2(report.summary.random_baseline), 7.00),
        ("tau", round2(report.summary.kendall_tau), -0.20),
        ("r", round2(report.summary.pearson_r), -0.12),
    ];
    for (label, got, want) in checks {
        assert!(
            (got - want).abs() <= 0.01 + 1e-9,
            "{label}: got {got}, expected {want}"
        );
    }
    println!("ACCEPTANCE pud_english_row: PASS");
}
