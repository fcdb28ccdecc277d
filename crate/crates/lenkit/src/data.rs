//! Concept datasets: CSV ingestion with a JSON schema sidecar, one-hot
//! discretization of continuous columns, synthetic task generators, and
//! stratified k-fold splitting.
//!
//! All generators are pure functions of their parameters: the same seed
//! yields a bitwise-identical dataset.

use std::path::Path;

use ndarray::{Array2, Axis};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::Vocabulary;

/// Matrix of [0,1] concept activations with named columns plus Boolean
/// target columns; the sampled concept space.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptDataset {
    pub concept_names: Vec<String>,
    pub x: Array2<f64>,
    pub target_names: Vec<String>,
    pub y: Array2<bool>,
    pub provenance: String,
}

impl ConceptDataset {
    pub fn new(
        concept_names: Vec<String>,
        x: Array2<f64>,
        target_names: Vec<String>,
        y: Array2<bool>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::Data {
                row: 0,
                column: "-".into(),
                message: "dataset has no rows".into(),
            });
        }
        if concept_names.len() != x.ncols() {
            return Err(Error::DimensionMismatch {
                context: "dataset concepts",
                expected: concept_names.len().to_string(),
                actual: x.ncols().to_string(),
            });
        }
        if target_names.len() != y.ncols() || (y.ncols() > 0 && y.nrows() != x.nrows()) {
            return Err(Error::DimensionMismatch {
                context: "dataset targets",
                expected: format!("{} columns x {} rows", target_names.len(), x.nrows()),
                actual: format!("{} columns x {} rows", y.ncols(), y.nrows()),
            });
        }
        for ((row, col), &value) in x.indexed_iter() {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(Error::Data {
                    row,
                    column: concept_names[col].clone(),
                    message: format!("concept value {value} outside [0, 1]"),
                });
            }
        }
        Ok(ConceptDataset {
            concept_names,
            x,
            target_names,
            y,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.nrows() == 0
    }

    pub fn num_concepts(&self) -> usize {
        self.x.ncols()
    }

    pub fn num_targets(&self) -> usize {
        self.y.ncols()
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary::new(self.concept_names.iter().cloned())
            .expect("dataset concept names are validated on construction")
    }

    /// Row subset in the given index order.
    pub fn select(&self, indices: &[usize]) -> Result<ConceptDataset> {
        for &i in indices {
            if i >= self.len() {
                return Err(Error::Data {
                    row: i,
                    column: "-".into(),
                    message: format!("row index out of range (n = {})", self.len()),
                });
            }
        }
        let x = self.x.select(Axis(0), indices);
        let y = if self.y.ncols() > 0 {
            self.y.select(Axis(0), indices)
        } else {
            Array2::from_elem((indices.len(), 0), false)
        };
        ConceptDataset::new(
            self.concept_names.clone(),
            x,
            self.target_names.clone(),
            y,
            format!("{}#select", self.provenance),
        )
    }

    /// Target column as 0/1 floats, for use as a training signal.
    pub fn target_column(&self, index: usize) -> Result<Vec<f64>> {
        if index >= self.y.ncols() {
            return Err(Error::Config(format!(
                "target index {index} out of range ({} targets)",
                self.y.ncols()
            )));
        }
        Ok(self
            .y
            .column(index)
            .iter()
            .map(|&b| if b { 1.0 } else { 0.0 })
            .collect())
    }

    /// Targets as a 0/1 float matrix.
    pub fn targets_f64(&self) -> Array2<f64> {
        self.y.map(|&b| if b { 1.0 } else { 0.0 })
    }
}

/// Column designation sidecar: which CSV header names are concepts and
/// which are targets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub concepts: Vec<String>,
    pub targets: Vec<String>,
}

impl DatasetSchema {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Loads a header-first CSV, validating ranges cell by cell.
pub fn load_csv(path: &Path, schema: &DatasetSchema) -> Result<ConceptDataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();

    let locate = |name: &String| -> Result<usize> {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Data {
            row: 0,
            column: name.clone(),
            message: "column missing from CSV header".into(),
        })
    };
    let concept_cols: Vec<usize> = schema.concepts.iter().map(locate).collect::<Result<_>>()?;
    let target_cols: Vec<usize> = schema.targets.iter().map(locate).collect::<Result<_>>()?;

    let mut x_rows: Vec<f64> = Vec::new();
    let mut y_rows: Vec<bool> = Vec::new();
    let mut n = 0usize;
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        for (&col, name) in concept_cols.iter().zip(&schema.concepts) {
            let cell = record.get(col).unwrap_or("");
            let value: f64 = cell.parse().map_err(|_| Error::Data {
                row: row_idx,
                column: name.clone(),
                message: format!("non-numeric cell `{cell}`"),
            })?;
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Data {
                    row: row_idx,
                    column: name.clone(),
                    message: format!("value {value} outside [0, 1]"),
                });
            }
            x_rows.push(value);
        }
        for (&col, name) in target_cols.iter().zip(&schema.targets) {
            let cell = record.get(col).unwrap_or("");
            let value: f64 = cell.parse().map_err(|_| Error::Data {
                row: row_idx,
                column: name.clone(),
                message: format!("non-numeric cell `{cell}`"),
            })?;
            if value != 0.0 && value != 1.0 {
                return Err(Error::Data {
                    row: row_idx,
                    column: name.clone(),
                    message: format!("target value {value} is not Boolean"),
                });
            }
            y_rows.push(value == 1.0);
        }
        n += 1;
    }
    let x = Array2::from_shape_vec((n, concept_cols.len()), x_rows).expect("row-major fill");
    let y = Array2::from_shape_vec((n, target_cols.len()), y_rows).expect("row-major fill");
    ConceptDataset::new(
        schema.concepts.clone(),
        x,
        schema.targets.clone(),
        y,
        format!("csv:{}", path.display()),
    )
}

/// Writes the dataset back out as CSV (concepts then targets). Values are
/// serialized with enough digits to round-trip f64 exactly.
pub fn save_csv(dataset: &ConceptDataset, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let header: Vec<&str> = dataset
        .concept_names
        .iter()
        .chain(&dataset.target_names)
        .map(String::as_str)
        .collect();
    writer.write_record(&header)?;
    for row in 0..dataset.len() {
        let mut record: Vec<String> = Vec::with_capacity(header.len());
        for col in 0..dataset.num_concepts() {
            record.push(format!("{:.17e}", dataset.x[[row, col]]));
        }
        for col in 0..dataset.num_targets() {
            record.push(if dataset.y[[row, col]] { "1" } else { "0" }.to_string());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// One-hot bins for a continuous column. The bin index is the number of
/// thresholds strictly below the value, so a value sitting exactly on a
/// threshold lands in the lower of its two neighboring bins.
pub fn discretize(values: &[f64], thresholds: &[f64], labels: &[String]) -> Result<Array2<f64>> {
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(
            "discretization thresholds must be strictly increasing".into(),
        ));
    }
    if labels.len() != thresholds.len() + 1 {
        return Err(Error::Config(format!(
            "{} labels required for {} thresholds",
            thresholds.len() + 1,
            thresholds.len()
        )));
    }
    let mut out = Array2::zeros((values.len(), labels.len()));
    for (row, &value) in values.iter().enumerate() {
        if value.is_nan() {
            return Err(Error::Data {
                row,
                column: labels[0].clone(),
                message: "NaN input to discretize".into(),
            });
        }
        let bin = thresholds.iter().filter(|&&t| t < value).count();
        out[[row, bin]] = 1.0;
    }
    Ok(out)
}

/// Synthetic task selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum GeneratorTask {
    /// Jittered XOR corners plus uniform-noise distractor concepts.
    Xor {
        k_noise: usize,
        n: usize,
        noise_amplitude: f64,
        seed: u64,
    },
    /// Ground-truth one-hot digit concepts with even/odd targets.
    MnistEoConcepts { n: usize, seed: u64 },
    /// Digit concepts plus parity flags, no targets (clustering input).
    MnistIcluConcepts { n: usize, seed: u64 },
    /// Every assignment of k Boolean inputs labelled by a random function.
    RandomBoolean { k: usize, seed: u64 },
    /// Two well-separated concept groups of equal size, no targets.
    MiTwoCluster { n: usize, seed: u64 },
}

pub const DIGIT_NAMES: [&str; 10] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
];

/// Builds the dataset for a synthetic task. Deterministic given the task
/// parameters (including the seed).
pub fn generate(task: &GeneratorTask) -> Result<ConceptDataset> {
    match *task {
        GeneratorTask::Xor {
            k_noise,
            n,
            noise_amplitude,
            seed,
        } => generate_xor(k_noise, n, noise_amplitude, seed),
        GeneratorTask::MnistEoConcepts { n, seed } => generate_mnist_eo(n, seed),
        GeneratorTask::MnistIcluConcepts { n, seed } => generate_mnist_iclu(n, seed),
        GeneratorTask::RandomBoolean { k, seed } => generate_random_boolean(k, seed),
        GeneratorTask::MiTwoCluster { n, seed } => generate_mi_two_cluster(n, seed),
    }
}

fn generate_xor(k_noise: usize, n: usize, noise_amplitude: f64, seed: u64) -> Result<ConceptDataset> {
    if n == 0 {
        return Err(Error::Config("xor generator requires n >= 1".into()));
    }
    if !(0.0..=0.5).contains(&noise_amplitude) {
        return Err(Error::Config(
            "xor noise amplitude must lie in [0, 0.5]".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corners = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)];
    let k = 2 + k_noise;
    let mut x = Array2::zeros((n, k));
    let mut y = Array2::from_elem((n, 1), false);
    for row in 0..n {
        let (c1, c2) = corners[row % 4];
        let jitter = |rng: &mut ChaCha8Rng, base: f64| -> f64 {
            if noise_amplitude == 0.0 {
                base
            } else {
                (base + rng.random_range(-noise_amplitude..=noise_amplitude)).clamp(0.0, 1.0)
            }
        };
        x[[row, 0]] = jitter(&mut rng, c1);
        x[[row, 1]] = jitter(&mut rng, c2);
        for noise_col in 0..k_noise {
            x[[row, 2 + noise_col]] = rng.random_range(0.0..=1.0);
        }
        y[[row, 0]] = (c1 >= 0.5) ^ (c2 >= 0.5);
    }
    let mut names = vec!["c1".to_string(), "c2".to_string()];
    names.extend((0..k_noise).map(|i| format!("noise{}", i + 1)));
    ConceptDataset::new(
        names,
        x,
        vec!["xor".to_string()],
        y,
        format!("generated:xor(k_noise={k_noise},n={n},noise={noise_amplitude},seed={seed})"),
    )
}

fn generate_mnist_eo(n: usize, seed: u64) -> Result<ConceptDataset> {
    if n == 0 {
        return Err(Error::Config("mnist_eo generator requires n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Array2::zeros((n, 10));
    let mut y = Array2::from_elem((n, 2), false);
    for row in 0..n {
        let digit = rng.random_range(0..10usize);
        x[[row, digit]] = 1.0;
        y[[row, 0]] = digit % 2 == 0;
        y[[row, 1]] = digit % 2 == 1;
    }
    ConceptDataset::new(
        DIGIT_NAMES.iter().map(|s| s.to_string()).collect(),
        x,
        vec!["even".to_string(), "odd".to_string()],
        y,
        format!("generated:mnist_eo_concepts(n={n},seed={seed})"),
    )
}

fn generate_mnist_iclu(n: usize, seed: u64) -> Result<ConceptDataset> {
    if n == 0 {
        return Err(Error::Config("mnist_iclu generator requires n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Array2::zeros((n, 12));
    for row in 0..n {
        let digit = rng.random_range(0..10usize);
        x[[row, digit]] = 1.0;
        if digit % 2 == 0 {
            x[[row, 10]] = 1.0;
        } else {
            x[[row, 11]] = 1.0;
        }
    }
    let mut names: Vec<String> = DIGIT_NAMES.iter().map(|s| s.to_string()).collect();
    names.push("even".to_string());
    names.push("odd".to_string());
    ConceptDataset::new(
        names,
        x,
        vec![],
        Array2::from_elem((n, 0), false),
        format!("generated:mnist_iclu_concepts(n={n},seed={seed})"),
    )
}

fn generate_random_boolean(k: usize, seed: u64) -> Result<ConceptDataset> {
    if k == 0 || k > 16 {
        return Err(Error::Config(
            "random_boolean requires 1 <= k <= 16".into(),
        ));
    }
    let n = 1usize << k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Array2::zeros((n, k));
    let mut y = Array2::from_elem((n, 1), false);
    for row in 0..n {
        for col in 0..k {
            x[[row, col]] = if row & (1 << col) != 0 { 1.0 } else { 0.0 };
        }
        y[[row, 0]] = rng.random_bool(0.5);
    }
    let names: Vec<String> = (0..k).map(|i| format!("b{i}")).collect();
    ConceptDataset::new(
        names,
        x,
        vec!["target".to_string()],
        y,
        format!("generated:random_boolean(k={k},seed={seed})"),
    )
}

fn generate_mi_two_cluster(n: usize, seed: u64) -> Result<ConceptDataset> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Config(
            "mi_two_cluster requires an even n >= 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Array2::zeros((n, 4));
    // rows alternate between the two groups so any split stays balanced
    for row in 0..n {
        let group_a = row % 2 == 0;
        for col in 0..4 {
            let high = if group_a { col < 2 } else { col >= 2 };
            let base: f64 = if high { 0.9 } else { 0.1 };
            x[[row, col]] = (base + rng.random_range(-0.1..=0.1)).clamp(0.0, 1.0);
        }
    }
    ConceptDataset::new(
        vec![
            "a1".to_string(),
            "a2".to_string(),
            "b1".to_string(),
            "b2".to_string(),
        ],
        x,
        vec![],
        Array2::from_elem((n, 0), false),
        format!("generated:mi_two_cluster(n={n},seed={seed})"),
    )
}

/// Disjoint (train, test) index pairs covering all rows, stratified by the
/// first target column when targets exist. Falls back to an unstratified
/// split (with a log warning) when some class has fewer members than folds.
pub fn kfold(
    dataset: &ConceptDataset,
    folds: usize,
    seed: u64,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let n = dataset.len();
    if folds < 2 || folds > n {
        return Err(Error::Config(format!(
            "folds must satisfy 2 <= folds <= n (folds={folds}, n={n})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let strata: Vec<Vec<usize>> = if dataset.num_targets() > 0 {
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for row in 0..n {
            if dataset.y[[row, 0]] {
                positive.push(row);
            } else {
                negative.push(row);
            }
        }
        let too_small = [&positive, &negative]
            .iter()
            .any(|s| !s.is_empty() && s.len() < folds);
        if too_small {
            log::warn!(
                "a class has fewer members than folds; falling back to an unstratified split"
            );
            vec![(0..n).collect()]
        } else {
            vec![negative, positive]
        }
    } else {
        vec![(0..n).collect()]
    };

    let mut fold_of = vec![0usize; n];
    for stratum in &strata {
        let mut indices = stratum.clone();
        indices.shuffle(&mut rng);
        for (pos, &row) in indices.iter().enumerate() {
            fold_of[row] = pos % folds;
        }
    }

    let mut splits = Vec::with_capacity(folds);
    for fold in 0..folds {
        let test: Vec<usize> = (0..n).filter(|&row| fold_of[row] == fold).collect();
        let train: Vec<usize> = (0..n).filter(|&row| fold_of[row] != fold).collect();
        splits.push((train, test));
    }
    Ok(splits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_without_jitter_is_the_four_corners() {
        let ds = generate(&GeneratorTask::Xor {
            k_noise: 0,
            n: 4,
            noise_amplitude: 0.0,
            seed: 1,
        })
        .unwrap();
        assert_eq!(ds.len(), 4);
        assert_eq!(ds.num_concepts(), 2);
        assert_eq!(ds.num_targets(), 1);
        let expected = [
            ([0.0, 0.0], false),
            ([0.0, 1.0], true),
            ([1.0, 0.0], true),
            ([1.0, 1.0], false),
        ];
        for (row, (coords, label)) in expected.iter().enumerate() {
            assert_eq!(ds.x[[row, 0]], coords[0]);
            assert_eq!(ds.x[[row, 1]], coords[1]);
            assert_eq!(ds.y[[row, 0]], *label);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let task = GeneratorTask::Xor {
            k_noise: 3,
            n: 100,
            noise_amplitude: 0.1,
            seed: 42,
        };
        assert_eq!(generate(&task).unwrap(), generate(&task).unwrap());
        let task = GeneratorTask::MnistEoConcepts { n: 50, seed: 9 };
        assert_eq!(generate(&task).unwrap(), generate(&task).unwrap());
    }

    #[test]
    fn mnist_eo_targets_follow_digit_parity() {
        let ds = generate(&GeneratorTask::MnistEoConcepts { n: 1000, seed: 3 }).unwrap();
        for row in 0..ds.len() {
            let digit = (0..10).find(|&d| ds.x[[row, d]] == 1.0).unwrap();
            assert_eq!(ds.y[[row, 0]], digit % 2 == 0, "even flag, row {row}");
            assert_eq!(ds.y[[row, 1]], digit % 2 == 1, "odd flag, row {row}");
            let active: f64 = (0..10).map(|d| ds.x[[row, d]]).sum();
            assert_eq!(active, 1.0);
        }
    }

    #[test]
    fn iclu_concepts_carry_parity_columns() {
        let ds = generate(&GeneratorTask::MnistIcluConcepts { n: 200, seed: 5 }).unwrap();
        assert_eq!(ds.num_concepts(), 12);
        assert_eq!(ds.num_targets(), 0);
        for row in 0..ds.len() {
            let digit = (0..10).find(|&d| ds.x[[row, d]] == 1.0).unwrap();
            assert_eq!(ds.x[[row, 10]], if digit % 2 == 0 { 1.0 } else { 0.0 });
            assert_eq!(ds.x[[row, 11]], if digit % 2 == 1 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn mi_two_cluster_groups_are_balanced_and_separable() {
        let ds = generate(&GeneratorTask::MiTwoCluster { n: 100, seed: 7 }).unwrap();
        let mut group_a = 0;
        for row in 0..ds.len() {
            let a_mean = (ds.x[[row, 0]] + ds.x[[row, 1]]) / 2.0;
            let b_mean = (ds.x[[row, 2]] + ds.x[[row, 3]]) / 2.0;
            if a_mean > b_mean {
                group_a += 1;
            }
        }
        assert_eq!(group_a, 50);
        assert!(generate(&GeneratorTask::MiTwoCluster { n: 3, seed: 0 }).is_err());
    }

    #[test]
    fn random_boolean_enumerates_all_assignments() {
        let ds = generate(&GeneratorTask::RandomBoolean { k: 4, seed: 1 }).unwrap();
        assert_eq!(ds.len(), 16);
        let mut seen = std::collections::HashSet::new();
        for row in 0..16 {
            let pattern: usize = (0..4)
                .map(|col| ((ds.x[[row, col]] as usize) & 1) << col)
                .sum();
            seen.insert(pattern);
        }
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn discretize_uses_closed_left_bins() {
        let labels: Vec<String> = ["low", "mid", "high"].iter().map(|s| s.to_string()).collect();
        let out = discretize(&[100.0, 120.0, 80.0, 130.0], &[90.0, 120.0], &labels).unwrap();
        assert_eq!(out.row(0).to_vec(), vec![0.0, 1.0, 0.0]); // 100 -> mid
        assert_eq!(out.row(1).to_vec(), vec![0.0, 1.0, 0.0]); // boundary 120 -> mid
        assert_eq!(out.row(2).to_vec(), vec![1.0, 0.0, 0.0]);
        assert_eq!(out.row(3).to_vec(), vec![0.0, 0.0, 1.0]);
        // every row is exactly one-hot
        for row in out.rows() {
            assert_eq!(row.sum(), 1.0);
        }
        assert!(discretize(&[f64::NAN], &[90.0, 120.0], &labels).is_err());
    }

    #[test]
    fn five_bin_schema_yields_five_columns() {
        let labels: Vec<String> = (0..5).map(|i| format!("bp{i}")).collect();
        let out = discretize(
            &[55.0, 75.0, 95.0, 115.0, 135.0],
            &[60.0, 80.0, 100.0, 120.0],
            &labels,
        )
        .unwrap();
        assert_eq!(out.ncols(), 5);
        for (row, expected_bin) in (0..5).enumerate() {
            assert_eq!(out[[row, expected_bin]], 1.0);
        }
    }

    #[test]
    fn kfold_partitions_and_stratifies() {
        let ds = generate(&GeneratorTask::MnistEoConcepts { n: 100, seed: 11 }).unwrap();
        let splits = kfold(&ds, 5, 21).unwrap();
        assert_eq!(splits.len(), 5);
        let mut all_test: Vec<usize> = Vec::new();
        let global_pos: usize = (0..ds.len()).filter(|&r| ds.y[[r, 0]]).count();
        for (train, test) in &splits {
            assert_eq!(train.len() + test.len(), ds.len());
            let overlap = train.iter().any(|i| test.contains(i));
            assert!(!overlap);
            all_test.extend(test);
            // stratification: per-fold positive count within one sample of
            // the proportional share
            let fold_pos = test.iter().filter(|&&r| ds.y[[r, 0]]).count() as f64;
            let expected = global_pos as f64 * test.len() as f64 / ds.len() as f64;
            assert!(
                (fold_pos - expected).abs() <= 1.0,
                "fold positives {fold_pos} vs expected {expected}"
            );
        }
        all_test.sort_unstable();
        assert_eq!(all_test, (0..ds.len()).collect::<Vec<_>>());
        assert_eq!(splits, kfold(&ds, 5, 21).unwrap());
    }

    #[test]
    fn csv_round_trip_preserves_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("xor.csv");
        let ds = generate(&GeneratorTask::Xor {
            k_noise: 2,
            n: 25,
            noise_amplitude: 0.1,
            seed: 13,
        })
        .unwrap();
        save_csv(&ds, &path).unwrap();
        let schema = DatasetSchema {
            concepts: ds.concept_names.clone(),
            targets: ds.target_names.clone(),
        };
        let loaded = load_csv(&path, &schema).unwrap();
        assert_eq!(loaded.x, ds.x);
        assert_eq!(loaded.y, ds.y);
    }

    #[test]
    fn csv_range_error_names_the_cell() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "a,b,t\n0.5,1.2,1\n").unwrap();
        let schema = DatasetSchema {
            concepts: vec!["a".into(), "b".into()],
            targets: vec!["t".into()],
        };
        match load_csv(&path, &schema) {
            Err(Error::Data { row, column, .. }) => {
                assert_eq!(row, 0);
                assert_eq!(column, "b");
            }
            other => panic!("expected data error, got {other:?}"),
        }
    }

    #[test]
    fn csv_missing_column_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing.csv");
        std::fs::write(&path, "a,t\n0.5,1\n").unwrap();
        let schema = DatasetSchema {
            concepts: vec!["a".into(), "b".into()],
            targets: vec!["t".into()],
        };
        match load_csv(&path, &schema) {
            Err(Error::Data { column, .. }) => assert_eq!(column, "b"),
            other => panic!("expected data error, got {other:?}"),
        }
    }
}
