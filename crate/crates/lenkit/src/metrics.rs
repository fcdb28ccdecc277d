//! The six evaluation metrics and the cross-fold aggregator.
//!
//! Percentages throughout. Aggregation reports mean and *sample* standard
//! deviation (n-1 denominator).

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::data::ConceptDataset;
use crate::error::{Error, Result};
use crate::extraction::booleanize;
use crate::logic::{Assignment, DnfFormula};
use crate::network::Network;

/// Percentage of exact matches between thresholded predictions and targets,
/// computed per class and averaged over classes.
pub fn model_accuracy(predictions: ArrayView2<bool>, targets: ArrayView2<bool>) -> Result<f64> {
    if predictions.dim() != targets.dim() {
        return Err(Error::DimensionMismatch {
            context: "model accuracy",
            expected: format!("{:?}", targets.dim()),
            actual: format!("{:?}", predictions.dim()),
        });
    }
    let (n, q) = predictions.dim();
    if n == 0 || q == 0 {
        return Err(Error::Config("model accuracy needs a non-empty matrix".into()));
    }
    let mut per_class_sum = 0.0;
    for class in 0..q {
        let hits = (0..n)
            .filter(|&row| predictions[[row, class]] == targets[[row, class]])
            .count();
        per_class_sum += hits as f64 / n as f64;
    }
    Ok(per_class_sum / q as f64 * 100.0)
}

/// Percentage of held-out samples where the formula, evaluated on the
/// Booleanized concepts, agrees with the ground-truth class label.
pub fn explanation_accuracy(
    formula: &DnfFormula,
    data: &ConceptDataset,
    class_index: usize,
    boolean_threshold: f64,
) -> Result<f64> {
    if class_index >= data.num_targets() {
        return Err(Error::Config(format!(
            "class index {class_index} out of range ({} targets)",
            data.num_targets()
        )));
    }
    let bits = booleanize(data.x.view(), boolean_threshold)?;
    let mut hits = 0usize;
    for row in 0..data.len() {
        let predicted = formula.eval(&Assignment::new(bits.row(row).to_vec()))?;
        if predicted == data.y[[row, class_index]] {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.len() as f64 * 100.0)
}

/// Total literal occurrences of the DNF-standardized formula.
pub fn complexity(formula: &DnfFormula) -> usize {
    formula.literal_count()
}

/// Percentage agreement between the formula's verdicts and the network's
/// thresholded predictions on the same samples.
pub fn fidelity(
    formula: &DnfFormula,
    net: &Network,
    data: &ConceptDataset,
    class_index: usize,
    boolean_threshold: f64,
) -> Result<f64> {
    if class_index >= net.output_dim() {
        return Err(Error::Config(format!(
            "class index {class_index} out of range ({} outputs)",
            net.output_dim()
        )));
    }
    let outputs = net.boolean_outputs(data.x.view())?;
    let bits = booleanize(data.x.view(), boolean_threshold)?;
    let mut hits = 0usize;
    for row in 0..data.len() {
        let predicted = formula.eval(&Assignment::new(bits.row(row).to_vec()))?;
        if predicted == outputs[[row, class_index]] {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.len() as f64 * 100.0)
}

/// Wall-clock seconds of a train-then-extract run, monotone-clock sourced.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunTimings {
    pub train_seconds: f64,
    pub extract_seconds: f64,
}

impl RunTimings {
    /// Rule extraction time: training plus formula extraction.
    pub fn extraction_time(&self) -> f64 {
        self.train_seconds + self.extract_seconds
    }
}

/// Average recurrence rate of concepts across runs: for every concept that
/// appears in at least one run's formula, the fraction of runs containing
/// it, averaged and scaled to percent. Runs whose formulas mention no
/// concept at all agree trivially (100).
pub fn consistency(formulas: &[DnfFormula]) -> Result<f64> {
    if formulas.is_empty() {
        return Err(Error::Config("consistency needs at least one formula".into()));
    }
    let sets: Vec<Vec<usize>> = formulas.iter().map(|f| f.concept_indices()).collect();
    consistency_of_sets(&sets)
}

/// Consistency over pre-extracted per-run concept index sets.
pub fn consistency_of_sets(sets: &[Vec<usize>]) -> Result<f64> {
    if sets.is_empty() {
        return Err(Error::Config("consistency needs at least one run".into()));
    }
    let mut universe: Vec<usize> = sets.iter().flatten().copied().collect();
    universe.sort_unstable();
    universe.dedup();
    if universe.is_empty() {
        return Ok(100.0);
    }
    let runs = sets.len() as f64;
    let mean: f64 = universe
        .iter()
        .map(|c| sets.iter().filter(|s| s.contains(c)).count() as f64 / runs)
        .sum::<f64>()
        / universe.len() as f64;
    Ok(mean * 100.0)
}

/// Mean and sample standard deviation of per-fold metric values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub std: f64,
}

pub fn aggregate(fold_values: &[f64]) -> Result<MetricSummary> {
    if fold_values.is_empty() {
        return Err(Error::Config("cannot aggregate zero folds".into()));
    }
    let n = fold_values.len() as f64;
    let mean = fold_values.iter().sum::<f64>() / n;
    let std = if fold_values.len() < 2 {
        0.0
    } else {
        let var = fold_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        var.sqrt()
    };
    Ok(MetricSummary { mean, std })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate, GeneratorTask};
    use crate::logic::{parse_formula, Formula, Vocabulary};
    use crate::network::{Activation, LayerSpec, Network};
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array1, Array2};

    fn dnf(text: &str, names: &[&str]) -> DnfFormula {
        let vocab = Vocabulary::new(names.iter().copied()).unwrap();
        match parse_formula(text, &vocab).unwrap() {
            Formula::Dnf(f) => f,
            Formula::Cnf(_) => panic!("expected DNF"),
        }
    }

    #[test]
    fn model_accuracy_counts_exact_matches() {
        let t = array![[true], [false], [true], [true]];
        assert_eq!(model_accuracy(t.view(), t.view()).unwrap(), 100.0);
        let wrong = t.map(|&b| !b);
        assert_eq!(model_accuracy(wrong.view(), t.view()).unwrap(), 0.0);
        let mixed = array![[true], [false], [true], [false]];
        assert_eq!(model_accuracy(mixed.view(), t.view()).unwrap(), 75.0);
    }

    #[test]
    fn explanation_accuracy_on_xor() {
        let ds = generate(&GeneratorTask::Xor {
            k_noise: 0,
            n: 40,
            noise_amplitude: 0.1,
            seed: 3,
        })
        .unwrap();
        let phi = dnf("(~c1 & c2) | (c1 & ~c2)", &["c1", "c2"]);
        assert_eq!(explanation_accuracy(&phi, &ds, 0, 0.5).unwrap(), 100.0);
        // constant false on balanced labels scores 50
        let falsum = DnfFormula::constant_false(ds.vocabulary());
        assert_eq!(explanation_accuracy(&falsum, &ds, 0, 0.5).unwrap(), 50.0);
    }

    #[test]
    fn explanation_accuracy_matches_brute_force_on_random_formulas() {
        let ds = generate(&GeneratorTask::RandomBoolean { k: 3, seed: 5 }).unwrap();
        let phi = dnf("(b0 & ~b2) | b1", &["b0", "b1", "b2"]);
        let expected = {
            let mut hits = 0;
            for row in 0..ds.len() {
                let b: Vec<bool> = (0..3).map(|j| ds.x[[row, j]] >= 0.5).collect();
                let value = (b[0] && !b[2]) || b[1];
                if value == ds.y[[row, 0]] {
                    hits += 1;
                }
            }
            hits as f64 / ds.len() as f64 * 100.0
        };
        assert_eq!(explanation_accuracy(&phi, &ds, 0, 0.5).unwrap(), expected);
    }

    #[test]
    fn complexity_counts_literal_occurrences() {
        assert_eq!(complexity(&dnf("~even & odd", &["even", "odd"])), 2);
        assert_eq!(
            complexity(&DnfFormula::constant_false(
                Vocabulary::new(["a"]).unwrap()
            )),
            0
        );
        assert_eq!(complexity(&dnf("(~c1 & c2) | (c1 & ~c2)", &["c1", "c2"])), 4);
        // invariant under minterm reordering: parsing normalizes order
        assert_eq!(complexity(&dnf("(c1 & ~c2) | (~c1 & c2)", &["c1", "c2"])), 4);
    }

    #[test]
    fn fidelity_measures_agreement_with_the_network() {
        // constant-0 head vs constant-false formula agree everywhere
        let net = Network::from_parts(
            &[LayerSpec {
                in_dim: 2,
                out_dim: 1,
                activation: Activation::Sigmoid,
                has_bias: true,
            }],
            vec![array![[0.0, 0.0]]],
            vec![Array1::from_vec(vec![-8.0])],
        )
        .unwrap();
        let ds = generate(&GeneratorTask::Xor {
            k_noise: 0,
            n: 20,
            noise_amplitude: 0.1,
            seed: 6,
        })
        .unwrap();
        let falsum = DnfFormula::constant_false(ds.vocabulary());
        assert_eq!(fidelity(&falsum, &net, &ds, 0, 0.5).unwrap(), 100.0);
        // hand oracle on 8 samples for an arbitrary formula
        let phi = dnf("c1", &["c1", "c2"]);
        let sub = ds.select(&[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        let outputs = net.boolean_outputs(sub.x.view()).unwrap();
        let mut hits = 0;
        for row in 0..8 {
            let value = sub.x[[row, 0]] >= 0.5;
            if value == outputs[[row, 0]] {
                hits += 1;
            }
        }
        let expected = hits as f64 / 8.0 * 100.0;
        assert_eq!(fidelity(&phi, &net, &sub, 0, 0.5).unwrap(), expected);
    }

    #[test]
    fn timings_accumulate() {
        let t = RunTimings {
            train_seconds: 1.5,
            extract_seconds: 0.25,
        };
        assert!(t.extraction_time() >= t.train_seconds);
        assert_abs_diff_eq!(t.extraction_time(), 1.75);
    }

    #[test]
    fn consistency_matches_hand_computations() {
        // identical formulas over five runs
        let phi = dnf("a & b", &["a", "b", "c"]);
        let runs = vec![phi.clone(), phi.clone(), phi.clone(), phi.clone(), phi];
        assert_abs_diff_eq!(consistency(&runs).unwrap(), 100.0);

        // disjoint singletons over five runs: each concept appears once
        let sets: Vec<Vec<usize>> = (0..5).map(|i| vec![i]).collect();
        assert_abs_diff_eq!(consistency_of_sets(&sets).unwrap(), 20.0);

        // {a,b}, {a}, {a}: mean(3/3, 1/3) = 2/3
        let sets = vec![vec![0, 1], vec![0], vec![0]];
        assert_abs_diff_eq!(
            consistency_of_sets(&sets).unwrap(),
            66.66666666666666,
            epsilon = 1e-9
        );
    }

    #[test]
    fn aggregate_uses_sample_std() {
        let s = aggregate(&[1.0, 3.0]).unwrap();
        assert_abs_diff_eq!(s.mean, 2.0);
        assert_abs_diff_eq!(s.std, std::f64::consts::SQRT_2, epsilon = 1e-12);
        let constant = aggregate(&[4.0, 4.0, 4.0]).unwrap();
        assert_eq!(constant.std, 0.0);
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn fidelity_equals_explanation_accuracy_when_net_matches_labels() {
        // identity-style net that reproduces the xor labels exactly on corners
        let net = Network::from_parts(
            &[
                LayerSpec {
                    in_dim: 2,
                    out_dim: 2,
                    activation: Activation::Relu,
                    has_bias: true,
                },
                LayerSpec {
                    in_dim: 2,
                    out_dim: 1,
                    activation: Activation::Sigmoid,
                    has_bias: true,
                },
            ],
            vec![array![[1.0, -1.0], [-1.0, 1.0]], array![[20.0, 20.0]]],
            vec![Array1::zeros(2), Array1::from_vec(vec![-5.0])],
        )
        .unwrap();
        let ds = generate(&GeneratorTask::Xor {
            k_noise: 0,
            n: 16,
            noise_amplitude: 0.0,
            seed: 2,
        })
        .unwrap();
        let predictions = net.boolean_outputs(ds.x.view()).unwrap();
        let labels = ds.y.clone();
        assert_eq!(
            model_accuracy(predictions.view(), labels.view()).unwrap(),
            100.0
        );
        let phi = dnf("(~c1 & c2) | (c1 & ~c2)", &["c1", "c2"]);
        assert_eq!(
            fidelity(&phi, &net, &ds, 0, 0.5).unwrap(),
            explanation_accuracy(&phi, &ds, 0, 0.5).unwrap()
        );
    }

    #[test]
    fn empty_universe_consistency_is_total_agreement() {
        let falsum = DnfFormula::constant_false(Vocabulary::new(["a"]).unwrap());
        assert_eq!(consistency(&[falsum.clone(), falsum]).unwrap(), 100.0);
    }
}
