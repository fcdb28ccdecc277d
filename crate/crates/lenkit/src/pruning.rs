//! The three parsimony strategies: node-level fan-in capping, network-level
//! input-concept selection, and example-level (extraction-time) relevance
//! ranking on the collapsed affine map.

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Network;

/// Configuration for the active pruning strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum PruningStrategy {
    /// Cap every neuron's unmasked fan-in at zeta.
    Node { zeta: usize },
    /// Keep input concepts whose normalized first-layer score clears tau.
    Network {
        #[serde(default)]
        zeta: Option<usize>,
        #[serde(default = "default_tau")]
        tau: f64,
    },
    /// Per-sample top-zeta concepts on the collapsed affine weights.
    Example { zeta: usize },
}

fn default_tau() -> f64 {
    0.5
}

/// Selection rule for network-level pruning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NetworkPruneMode {
    /// Retain concepts with normalized score >= tau.
    Threshold(f64),
    /// Retain the zeta highest-scoring concepts.
    TopK(usize),
}

/// Result of a network-level prune.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkPruneOutcome {
    /// Retained concept indices, ascending.
    pub retained: Vec<usize>,
    /// True when every concept fell below the threshold and the single
    /// best one was kept as a fallback.
    pub degenerate_guard: bool,
}

/// Masks, per neuron in every layer, all but the `zeta` largest-magnitude
/// incoming weights (ties keep the lower input index). Layers whose fan-in
/// already fits are left untouched.
pub fn prune_node_level(net: &mut Network, zeta: usize) -> Result<()> {
    if zeta < 2 {
        return Err(Error::Config(format!(
            "node-level pruning requires zeta >= 2 (got {zeta})"
        )));
    }
    for layer_idx in 0..net.layers().len() {
        let layer = &net.layers()[layer_idx];
        let (out_dim, in_dim) = (layer.spec().out_dim, layer.spec().in_dim);
        if zeta >= in_dim {
            continue;
        }
        let weights = layer.weights().to_owned();
        let mut keep = Array2::from_elem((out_dim, in_dim), false);
        for neuron in 0..out_dim {
            let mut order: Vec<usize> = (0..in_dim).collect();
            order.sort_by(|&a, &b| {
                weights[[neuron, b]]
                    .abs()
                    .partial_cmp(&weights[[neuron, a]].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.cmp(&b))
            });
            for &input in order.iter().take(zeta) {
                keep[[neuron, input]] = true;
            }
        }
        net.restrict_mask(layer_idx, &keep)?;
    }
    Ok(())
}

/// Scores each input concept by the L2 norm of its outgoing first-layer
/// weights, normalizes by the maximum, and masks whole input columns below
/// the threshold (or outside the top-zeta). Deeper layers are untouched.
pub fn prune_network_level(
    net: &mut Network,
    mode: NetworkPruneMode,
) -> Result<NetworkPruneOutcome> {
    let scores = input_concept_scores(net);
    let k = scores.len();
    match mode {
        NetworkPruneMode::Threshold(tau) if !(0.0 < tau && tau <= 1.0) => {
            return Err(Error::Config(format!(
                "network-level threshold must lie in (0, 1] (got {tau})"
            )));
        }
        NetworkPruneMode::TopK(zeta) if zeta == 0 => {
            return Err(Error::Config(
                "network-level top-k needs zeta >= 1".into(),
            ));
        }
        _ => {}
    }

    let max = scores.iter().cloned().fold(0.0f64, f64::max);
    let normalized: Vec<f64> = if max > 0.0 {
        scores.iter().map(|s| s / max).collect()
    } else {
        vec![0.0; k]
    };

    let mut retained: Vec<usize> = match mode {
        NetworkPruneMode::Threshold(tau) => (0..k).filter(|&j| normalized[j] >= tau).collect(),
        NetworkPruneMode::TopK(zeta) => {
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&a, &b| {
                normalized[b]
                    .partial_cmp(&normalized[a])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.cmp(&b))
            });
            let mut kept: Vec<usize> = order.into_iter().take(zeta.min(k)).collect();
            kept.sort_unstable();
            kept
        }
    };

    let mut degenerate_guard = false;
    if retained.is_empty() {
        // keep the single best concept rather than silencing the network
        let best = (0..k)
            .max_by(|&a, &b| {
                normalized[a]
                    .partial_cmp(&normalized[b])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(b.cmp(&a))
            })
            .expect("networks have at least one input");
        retained = vec![best];
        degenerate_guard = true;
        log::warn!("network-level pruning dropped every concept; keeping concept {best}");
    }

    let out_dim = net.layers()[0].spec().out_dim;
    let mut keep = Array2::from_elem((out_dim, k), false);
    for &j in &retained {
        for i in 0..out_dim {
            keep[[i, j]] = true;
        }
    }
    net.restrict_mask(0, &keep)?;
    Ok(NetworkPruneOutcome {
        retained,
        degenerate_guard,
    })
}

/// L2 norm of each input concept's outgoing first-layer connections.
pub fn input_concept_scores(net: &Network) -> Vec<f64> {
    let first = &net.layers()[0];
    let weights = first.weights();
    (0..first.spec().in_dim)
        .map(|j| weights.column(j).iter().map(|w| w * w).sum::<f64>().sqrt())
        .collect()
}

/// Ranks concepts for one sample by |W_hat| on the collapsed affine map and
/// keeps the `zeta` most important per output. Never touches the mask:
/// the selection exists only for rule extraction.
pub fn prune_example_level(
    net: &Network,
    sample: ArrayView1<f64>,
    zeta: usize,
) -> Result<Vec<Vec<usize>>> {
    if zeta == 0 {
        return Err(Error::Config(
            "example-level pruning needs zeta >= 1".into(),
        ));
    }
    let collapse = net.affine_collapse(sample)?;
    let k = net.input_dim();
    let mut per_output = Vec::with_capacity(net.output_dim());
    for row in collapse.w_hat.rows() {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            row[b]
                .abs()
                .partial_cmp(&row[a].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut kept: Vec<usize> = order.into_iter().take(zeta.min(k)).collect();
        kept.sort_unstable();
        per_output.push(kept);
    }
    Ok(per_output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Activation, LayerSpec, Network};
    use ndarray::{array, Array1};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn spec(in_dim: usize, out_dim: usize, activation: Activation) -> LayerSpec {
        LayerSpec {
            in_dim,
            out_dim,
            activation,
            has_bias: true,
        }
    }

    #[test]
    fn node_level_keeps_the_largest_two() {
        let specs = [spec(4, 1, Activation::Sigmoid)];
        let mut net = Network::from_parts(
            &specs,
            vec![array![[0.9, 0.5, 0.1, 0.05]]],
            vec![Array1::zeros(1)],
        )
        .unwrap();
        prune_node_level(&mut net, 2).unwrap();
        let mask = net.layers()[0].mask();
        assert_eq!(mask.row(0).to_vec(), vec![true, true, false, false]);
        assert_eq!(net.layers()[0].weights()[[0, 2]], 0.0);
    }

    #[test]
    fn node_level_with_full_fanin_is_a_noop() {
        let specs = [spec(3, 2, Activation::Sigmoid)];
        let mut net = Network::new(&specs, 5).unwrap();
        let before = net.clone();
        prune_node_level(&mut net, 3).unwrap();
        assert_eq!(net, before);
        assert!(prune_node_level(&mut net, 1).is_err());
    }

    #[test]
    fn node_level_caps_in_degree_everywhere() {
        let specs = [
            spec(6, 5, Activation::Sigmoid),
            spec(5, 3, Activation::Sigmoid),
        ];
        let mut net = Network::new(&specs, 9).unwrap();
        prune_node_level(&mut net, 2).unwrap();
        for layer in net.layers() {
            for neuron in 0..layer.spec().out_dim {
                assert!(layer.unmasked_in_degree(neuron) <= 2);
            }
        }
    }

    #[test]
    fn node_level_breaks_ties_toward_lower_index() {
        let specs = [spec(3, 1, Activation::Sigmoid)];
        let mut net = Network::from_parts(
            &specs,
            vec![array![[0.5, 0.5, 0.5]]],
            vec![Array1::zeros(1)],
        )
        .unwrap();
        prune_node_level(&mut net, 2).unwrap();
        assert_eq!(
            net.layers()[0].mask().row(0).to_vec(),
            vec![true, true, false]
        );
    }

    #[test]
    fn network_level_normalizes_scores() {
        // column norms (3, 4): normalized (0.75, 1.0), both clear tau = 0.5
        let specs = [spec(2, 1, Activation::Sigmoid)];
        let mut net = Network::from_parts(
            &specs,
            vec![array![[3.0, 4.0]]],
            vec![Array1::zeros(1)],
        )
        .unwrap();
        let scores = input_concept_scores(&net);
        assert_eq!(scores, vec![3.0, 4.0]);
        let outcome = prune_network_level(&mut net, NetworkPruneMode::Threshold(0.5)).unwrap();
        assert_eq!(outcome.retained, vec![0, 1]);
        assert!(!outcome.degenerate_guard);
    }

    #[test]
    fn network_level_drops_zero_columns() {
        let specs = [spec(3, 2, Activation::Sigmoid)];
        let mut net = Network::from_parts(
            &specs,
            vec![array![[1.0, 0.0, 0.4], [2.0, 0.0, 0.3]]],
            vec![Array1::zeros(2)],
        )
        .unwrap();
        let outcome = prune_network_level(&mut net, NetworkPruneMode::Threshold(0.2)).unwrap();
        assert!(!outcome.retained.contains(&1));
        // the whole column is masked
        assert!(!net.layers()[0].mask()[[0, 1]]);
        assert!(!net.layers()[0].mask()[[1, 1]]);
    }

    #[test]
    fn network_level_degenerate_guard_keeps_one_concept() {
        let specs = [spec(3, 1, Activation::Sigmoid)];
        let mut net = Network::from_parts(
            &specs,
            vec![array![[0.0, 0.0, 0.0]]],
            vec![Array1::zeros(1)],
        )
        .unwrap();
        let outcome = prune_network_level(&mut net, NetworkPruneMode::Threshold(0.5)).unwrap();
        assert_eq!(outcome.retained.len(), 1);
        assert!(outcome.degenerate_guard);
    }

    #[test]
    fn network_level_top_k_mode() {
        let specs = [spec(4, 1, Activation::Sigmoid)];
        let mut net = Network::from_parts(
            &specs,
            vec![array![[0.1, 0.9, 0.9, 0.3]]],
            vec![Array1::zeros(1)],
        )
        .unwrap();
        let outcome = prune_network_level(&mut net, NetworkPruneMode::TopK(2)).unwrap();
        // tie between concepts 1 and 2 resolves to the lower index first
        assert_eq!(outcome.retained, vec![1, 2]);
        assert!(prune_network_level(&mut net, NetworkPruneMode::TopK(0)).is_err());
    }

    #[test]
    fn masked_concepts_cannot_influence_outputs() {
        let specs = [
            spec(4, 6, Activation::Sigmoid),
            spec(6, 1, Activation::Sigmoid),
        ];
        let mut net = Network::new(&specs, 3).unwrap();
        let outcome = prune_network_level(&mut net, NetworkPruneMode::TopK(2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let base = ndarray::Array2::from_shape_fn((1, 4), |_| rng.random_range(0.0..1.0));
            let mut perturbed = base.clone();
            for j in 0..4 {
                if !outcome.retained.contains(&j) {
                    perturbed[[0, j]] = rng.random_range(-100.0..100.0);
                }
            }
            let a = net.outputs(base.view()).unwrap();
            let b = net.outputs(perturbed.view()).unwrap();
            assert_eq!(a, b, "masked concept leaked into the output");
        }
    }

    #[test]
    fn example_level_ranks_by_magnitude_and_leaves_mask_alone() {
        let specs = [spec(3, 1, Activation::Identity)];
        let net = Network::from_parts(
            &specs,
            vec![array![[0.0, 5.0, -7.0]]],
            vec![Array1::zeros(1)],
        )
        .unwrap();
        let before = net.clone();
        let retained = prune_example_level(&net, array![0.5, 0.5, 0.5].view(), 2).unwrap();
        assert_eq!(retained, vec![vec![1, 2]]);
        assert_eq!(net, before, "example-level pruning must not mutate");
        // zeta >= k keeps everything
        let all = prune_example_level(&net, array![0.5, 0.5, 0.5].view(), 5).unwrap();
        assert_eq!(all, vec![vec![0, 1, 2]]);
    }
}
