//! The three out-of-the-box presets and their end-to-end wiring:
//!
//! - psi: sigmoid everywhere, strong L1 on all layers, node-level pruning,
//!   per-neuron exhaustive rule extraction composed through the layers.
//! - mu: one light binary subnet per class, strong L1 on the first layer
//!   only, network-level input pruning, truth-table extraction.
//! - relu: ReLU hidden units, mild L1 on all layers, example-level
//!   (extraction-time) pruning on the collapsed affine map.

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::criteria::Criterion;
use crate::data::ConceptDataset;
use crate::error::{Error, Result};
use crate::extraction::{
    explain_cascade, explain_class, explain_example, CascadeStage, ClassExplanation,
    ExplanationOptions,
};
use crate::logic::{simplify_capped, DnfFormula, Minterm, Vocabulary};
use crate::network::{
    train, Activation, BiasPolicy, L1Scope, LayerSpec, Network, TrainConfig, TrainHistory,
};
use crate::pruning::{
    prune_example_level, prune_network_level, prune_node_level, NetworkPruneMode,
};

/// Fan-in ceiling for exhaustive per-neuron probing in `psi_extract`.
pub const PSI_EXHAUSTIVE_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetKind {
    Psi,
    Mu,
    Relu,
}

impl PresetKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "psi" => Ok(PresetKind::Psi),
            "mu" => Ok(PresetKind::Mu),
            "relu" => Ok(PresetKind::Relu),
            other => Err(Error::Config(format!("unknown model preset `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PresetKind::Psi => "psi",
            PresetKind::Mu => "mu",
            PresetKind::Relu => "relu",
        }
    }
}

/// Optional overrides applied on top of a preset's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetOverrides {
    pub hidden_dims: Option<Vec<usize>>,
    pub hidden_activation: Option<Activation>,
    pub zeta: Option<usize>,
    pub tau: Option<f64>,
    /// Switch mu's network-level pruning from threshold to top-k.
    pub network_top_k: Option<usize>,
    pub l1_weight: Option<f64>,
    pub learning_rate: Option<f64>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub seed: Option<u64>,
    pub prune_epoch: Option<usize>,
    pub fine_tune: Option<bool>,
    pub criterion: Option<Criterion>,
    pub bias_policy: Option<BiasPolicy>,
    pub extraction: Option<ExplanationOptions>,
}

/// A fully resolved preset: architecture, parsimony, training, and
/// extraction configuration for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LenPreset {
    pub kind: PresetKind,
    pub input_dim: usize,
    pub output_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub hidden_activation: Activation,
    pub zeta: usize,
    pub tau: f64,
    pub network_top_k: Option<usize>,
    pub l1_weight: f64,
    pub l1_scope: L1Scope,
    pub criterion: Criterion,
    pub bias_policy: BiasPolicy,
    pub train: TrainConfig,
    pub extraction: ExplanationOptions,
}

/// Sigmoid-everywhere preset with node-level pruning.
pub fn build_psi(k: usize, r: usize, overrides: &PresetOverrides) -> Result<LenPreset> {
    let mut preset = LenPreset {
        kind: PresetKind::Psi,
        input_dim: k,
        output_dim: r,
        hidden_dims: vec![10],
        hidden_activation: Activation::Sigmoid,
        zeta: 3,
        tau: 0.5,
        network_top_k: None,
        l1_weight: 1e-3,
        l1_scope: L1Scope::AllLayers,
        criterion: Criterion::Iff,
        bias_policy: BiasPolicy::Trainable,
        train: base_train_config(2000, 1e-2),
        extraction: ExplanationOptions::default(),
    };
    apply_overrides(&mut preset, overrides)?;
    validate_preset(&preset)?;
    Ok(preset)
}

/// Per-class binary subnets with first-layer L1 and network-level pruning.
pub fn build_mu(k: usize, r: usize, overrides: &PresetOverrides) -> Result<LenPreset> {
    let mut preset = LenPreset {
        kind: PresetKind::Mu,
        input_dim: k,
        output_dim: r,
        hidden_dims: vec![20, 10],
        hidden_activation: Activation::Relu,
        zeta: 3,
        tau: 0.5,
        network_top_k: None,
        l1_weight: 1e-3,
        l1_scope: L1Scope::FirstLayerOnly,
        criterion: Criterion::Iff,
        bias_policy: BiasPolicy::Trainable,
        train: base_train_config(1000, 1e-2),
        extraction: ExplanationOptions::default(),
    };
    apply_overrides(&mut preset, overrides)?;
    validate_preset(&preset)?;
    Ok(preset)
}

/// ReLU-hidden preset with extraction-time example-level pruning.
pub fn build_relu(k: usize, r: usize, overrides: &PresetOverrides) -> Result<LenPreset> {
    let mut preset = LenPreset {
        kind: PresetKind::Relu,
        input_dim: k,
        output_dim: r,
        hidden_dims: vec![50, 30],
        hidden_activation: Activation::Relu,
        zeta: 3,
        tau: 0.5,
        network_top_k: None,
        l1_weight: 1e-4,
        l1_scope: L1Scope::AllLayers,
        criterion: Criterion::Iff,
        bias_policy: BiasPolicy::Trainable,
        train: base_train_config(1000, 1e-3),
        extraction: ExplanationOptions::default(),
    };
    apply_overrides(&mut preset, overrides)?;
    validate_preset(&preset)?;
    Ok(preset)
}

pub fn build_preset(
    kind: PresetKind,
    k: usize,
    r: usize,
    overrides: &PresetOverrides,
) -> Result<LenPreset> {
    match kind {
        PresetKind::Psi => build_psi(k, r, overrides),
        PresetKind::Mu => build_mu(k, r, overrides),
        PresetKind::Relu => build_relu(k, r, overrides),
    }
}

fn base_train_config(epochs: usize, learning_rate: f64) -> TrainConfig {
    let mut config = TrainConfig::new(epochs);
    config.learning_rate = learning_rate;
    config
}

fn apply_overrides(preset: &mut LenPreset, overrides: &PresetOverrides) -> Result<()> {
    if let Some(dims) = &overrides.hidden_dims {
        preset.hidden_dims = dims.clone();
    }
    if let Some(act) = overrides.hidden_activation {
        preset.hidden_activation = act;
    }
    if let Some(zeta) = overrides.zeta {
        preset.zeta = zeta;
    }
    if let Some(tau) = overrides.tau {
        preset.tau = tau;
    }
    if overrides.network_top_k.is_some() {
        preset.network_top_k = overrides.network_top_k;
    }
    if let Some(l1) = overrides.l1_weight {
        preset.l1_weight = l1;
    }
    if let Some(lr) = overrides.learning_rate {
        preset.train.learning_rate = lr;
    }
    if let Some(epochs) = overrides.epochs {
        preset.train.epochs = epochs;
        preset.train.prune_epoch = (epochs / 2).max(1);
    }
    if let Some(batch) = overrides.batch_size {
        preset.train.batch_size = Some(batch);
    }
    if let Some(seed) = overrides.seed {
        preset.train.seed = seed;
    }
    if let Some(prune_epoch) = overrides.prune_epoch {
        preset.train.prune_epoch = prune_epoch;
    }
    if let Some(fine_tune) = overrides.fine_tune {
        preset.train.fine_tune = fine_tune;
    }
    if let Some(criterion) = &overrides.criterion {
        preset.criterion = criterion.clone();
    }
    if let Some(policy) = overrides.bias_policy {
        preset.bias_policy = policy;
    }
    if let Some(extraction) = &overrides.extraction {
        preset.extraction = extraction.clone();
    }
    preset.train.l1_weight = preset.l1_weight;
    preset.train.l1_scope = preset.l1_scope;
    Ok(())
}

/// Enforces each preset's defining invariants; rejects override combos
/// that would silently break them.
fn validate_preset(preset: &LenPreset) -> Result<()> {
    if preset.input_dim == 0 || preset.output_dim == 0 {
        return Err(Error::Config("presets need k >= 1 and r >= 1".into()));
    }
    match preset.kind {
        PresetKind::Psi => {
            if preset.hidden_activation != Activation::Sigmoid {
                return Err(Error::Config(
                    "psi networks use sigmoid activations everywhere".into(),
                ));
            }
            if preset.zeta < 2 {
                return Err(Error::Config("psi fan-in zeta must be >= 2".into()));
            }
            if preset.hidden_dims.len() > 3 {
                log::warn!(
                    "psi preset with {} hidden layers; rule merging degrades beyond 3",
                    preset.hidden_dims.len()
                );
            }
        }
        PresetKind::Mu => {
            if preset.l1_scope != L1Scope::FirstLayerOnly {
                return Err(Error::Config(
                    "mu networks apply strong L1 to the first layer only".into(),
                ));
            }
        }
        PresetKind::Relu => {
            if preset.hidden_activation != Activation::Relu {
                return Err(Error::Config(
                    "relu preset requires relu hidden activations".into(),
                ));
            }
            if preset.zeta < 1 {
                return Err(Error::Config("example-level zeta must be >= 1".into()));
            }
        }
    }
    Ok(())
}

impl LenPreset {
    /// Layer stack for one trainable network of this preset.
    /// mu presets train `output_dim` copies with a single output unit.
    fn layer_specs(&self, out_dim: usize) -> Vec<LayerSpec> {
        let mut dims = vec![self.input_dim];
        dims.extend(&self.hidden_dims);
        dims.push(out_dim);
        let mut specs = Vec::with_capacity(dims.len() - 1);
        for (idx, pair) in dims.windows(2).enumerate() {
            let is_last = idx == dims.len() - 2;
            specs.push(LayerSpec {
                in_dim: pair[0],
                out_dim: pair[1],
                activation: if is_last {
                    Activation::Sigmoid
                } else {
                    self.hidden_activation
                },
                has_bias: true,
            });
        }
        specs
    }

    fn is_per_class(&self) -> bool {
        // per-class splitting needs a per-class training signal
        self.kind == PresetKind::Mu && self.criterion.target_source() != crate::criteria::TargetSource::None
    }
}

/// A fitted preset: the trained network(s), per-class retained concepts,
/// training histories, and the recorded configuration.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub preset: LenPreset,
    nets: Vec<Network>,
    per_class: bool,
    pub retained: Vec<Vec<usize>>,
    pub histories: Vec<TrainHistory>,
    /// Network-level degenerate-threshold guard, per class.
    pub prune_guard_fired: Vec<bool>,
}

/// Trains a preset on concept activations. `targets` carries labels (or a
/// black-box's soft outputs for the coherence criterion); unsupervised
/// criteria take `None`.
pub fn fit(
    preset: &LenPreset,
    x: ArrayView2<f64>,
    targets: Option<ArrayView2<f64>>,
) -> Result<TrainedModel> {
    if let Some(t) = targets {
        if t.ncols() != preset.output_dim {
            return Err(Error::DimensionMismatch {
                context: "fit targets",
                expected: preset.output_dim.to_string(),
                actual: t.ncols().to_string(),
            });
        }
    }
    let per_class = preset.is_per_class();
    if per_class {
        let targets = targets.ok_or_else(|| {
            Error::Config("per-class mu training requires targets".into())
        })?;
        let mut nets = Vec::with_capacity(preset.output_dim);
        let mut histories = Vec::with_capacity(preset.output_dim);
        let mut retained = Vec::with_capacity(preset.output_dim);
        let mut guards = Vec::with_capacity(preset.output_dim);
        for class in 0..preset.output_dim {
            let column = targets.column(class).insert_axis(Axis(1)).to_owned();
            let mut config = preset.train.clone();
            // independent subnet seeds, still deterministic
            config.seed = preset.train.seed.wrapping_add(class as u64);
            let (net, history, kept, guard) =
                fit_single(preset, x, Some(column.view()), 1, &config)?;
            nets.push(net);
            histories.push(history);
            retained.push(kept[0].clone());
            guards.push(guard);
        }
        Ok(TrainedModel {
            preset: preset.clone(),
            nets,
            per_class: true,
            retained,
            histories,
            prune_guard_fired: guards,
        })
    } else {
        let (net, history, retained, guard) =
            fit_single(preset, x, targets, preset.output_dim, &preset.train)?;
        Ok(TrainedModel {
            preset: preset.clone(),
            nets: vec![net],
            per_class: false,
            retained,
            histories: vec![history],
            prune_guard_fired: vec![guard; preset.output_dim],
        })
    }
}

fn fit_single(
    preset: &LenPreset,
    x: ArrayView2<f64>,
    targets: Option<ArrayView2<f64>>,
    out_dim: usize,
    config: &TrainConfig,
) -> Result<(Network, TrainHistory, Vec<Vec<usize>>, bool)> {
    let specs = preset.layer_specs(out_dim);
    let mut net = Network::with_bias_policy(&specs, preset.bias_policy, config.seed)?;
    let mut guard_fired = false;

    let history = match preset.kind {
        PresetKind::Psi => {
            let zeta = preset.zeta;
            let mut hook = move |net: &mut Network| prune_node_level(net, zeta);
            train(&mut net, x, targets, &preset.criterion, config, Some(&mut hook))?
        }
        PresetKind::Mu => {
            let mode = match preset.network_top_k {
                Some(zeta) => NetworkPruneMode::TopK(zeta),
                None => NetworkPruneMode::Threshold(preset.tau),
            };
            let mut fired = false;
            let mut hook = |net: &mut Network| -> Result<()> {
                let outcome = prune_network_level(net, mode)?;
                fired = outcome.degenerate_guard;
                Ok(())
            };
            let history = train(&mut net, x, targets, &preset.criterion, config, Some(&mut hook))?;
            guard_fired = fired;
            history
        }
        // example-level pruning never touches the network during training
        PresetKind::Relu => train(&mut net, x, targets, &preset.criterion, config, None)?,
    };

    let retained = retained_concepts(preset, &net, x)?;
    Ok((net, history, retained, guard_fired))
}

/// Retained-concept sets per output, derived from the preset's pruning
/// strategy: unmasked first-layer paths (psi/mu), or the union of
/// example-level selections over the training support (relu).
fn retained_concepts(
    preset: &LenPreset,
    net: &Network,
    x: ArrayView2<f64>,
) -> Result<Vec<Vec<usize>>> {
    let out_dim = net.output_dim();
    match preset.kind {
        PresetKind::Psi => {
            // concepts reachable from each output through unmasked paths
            let mut reach: Vec<Vec<usize>> = Vec::with_capacity(out_dim);
            for output in 0..out_dim {
                let mut active: Vec<usize> = vec![output];
                for layer in net.layers().iter().rev() {
                    let mut prev = Vec::new();
                    for &unit in &active {
                        for (input, &keep) in layer.mask().row(unit).iter().enumerate() {
                            if keep && !prev.contains(&input) {
                                prev.push(input);
                            }
                        }
                    }
                    active = prev;
                }
                active.sort_unstable();
                reach.push(active);
            }
            Ok(reach)
        }
        PresetKind::Mu => {
            let first = &net.layers()[0];
            let mut kept: Vec<usize> = (0..first.spec().in_dim)
                .filter(|&j| first.mask().column(j).iter().any(|&m| m))
                .collect();
            kept.sort_unstable();
            Ok(vec![kept; out_dim])
        }
        PresetKind::Relu => {
            let outputs = net.outputs(x)?;
            let mut union: Vec<Vec<usize>> = vec![Vec::new(); out_dim];
            for row in 0..x.nrows() {
                let sample = x.row(row);
                let in_support: Vec<usize> = (0..out_dim)
                    .filter(|&i| outputs[[row, i]] >= 0.5)
                    .collect();
                if in_support.is_empty() {
                    continue;
                }
                let per_output = prune_example_level(net, sample, preset.zeta)?;
                for &i in &in_support {
                    for &j in &per_output[i] {
                        if !union[i].contains(&j) {
                            union[i].push(j);
                        }
                    }
                }
            }
            for (i, set) in union.iter_mut().enumerate() {
                // a class with empty support still needs a column set
                if set.is_empty() {
                    let fallback = prune_example_level(net, x.row(0), preset.zeta)?;
                    *set = fallback[i].clone();
                }
                set.sort_unstable();
            }
            Ok(union)
        }
    }
}

impl TrainedModel {
    /// Network and local output index serving a given class.
    pub fn class_net(&self, class_index: usize) -> Result<(&Network, usize)> {
        if class_index >= self.preset.output_dim {
            return Err(Error::Config(format!(
                "class index {class_index} out of range ({} outputs)",
                self.preset.output_dim
            )));
        }
        if self.per_class {
            Ok((&self.nets[class_index], 0))
        } else {
            Ok((&self.nets[0], class_index))
        }
    }

    pub fn nets(&self) -> &[Network] {
        &self.nets
    }

    pub fn is_per_class(&self) -> bool {
        self.per_class
    }

    /// Stitched outputs across all classes.
    pub fn outputs(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if self.per_class {
            let mut out = Array2::zeros((x.nrows(), self.preset.output_dim));
            for (class, net) in self.nets.iter().enumerate() {
                let column = net.outputs(x)?;
                out.column_mut(class).assign(&column.column(0));
            }
            Ok(out)
        } else {
            self.nets[0].outputs(x)
        }
    }

    pub fn boolean_outputs(&self, x: ArrayView2<f64>) -> Result<Array2<bool>> {
        Ok(self.outputs(x)?.map(|&v| v >= 0.5))
    }

    /// Class-level explanation using the preset's extraction defaults and
    /// the retained concepts recorded at fit time. psi presets extract
    /// through per-neuron probing and composition instead of the empirical
    /// truth table.
    pub fn explain(&self, data: &ConceptDataset, class_index: usize) -> Result<ClassExplanation> {
        self.explain_with(data, class_index, &self.preset.extraction.clone())
    }

    pub fn explain_with(
        &self,
        data: &ConceptDataset,
        class_index: usize,
        options: &ExplanationOptions,
    ) -> Result<ClassExplanation> {
        if self.preset.kind == PresetKind::Psi {
            let extraction = psi_extract(self, &data.vocabulary())?;
            let formula = extraction.outputs[class_index].clone();
            let kept = formula.minterms().len();
            return Ok(ClassExplanation {
                formula,
                minimized: true,
                unfiltered_minterms: kept,
                kept_minterms: kept,
            });
        }
        let (net, local_index) = self.class_net(class_index)?;
        explain_class(net, data, local_index, &self.retained[class_index], options)
    }

    /// Example-level explanation for a single sample.
    pub fn explain_sample(
        &self,
        sample: ndarray::ArrayView1<f64>,
        class_index: usize,
    ) -> Result<Option<Minterm>> {
        let (net, local_index) = self.class_net(class_index)?;
        explain_example(net, sample, local_index, &self.retained[class_index])
    }
}

/// Per-neuron formulas of a psi network plus the composed input-level
/// output formulas.
#[derive(Debug, Clone)]
pub struct PsiExtraction {
    /// Formulas per layer, one per neuron, over that layer's input names.
    pub per_neuron: Vec<Vec<DnfFormula>>,
    /// Output-class formulas over the original concept vocabulary.
    pub outputs: Vec<DnfFormula>,
}

/// Exhaustively probes every neuron of a sigmoid network over the Boolean
/// settings of its unmasked inputs (masked inputs are held at zero and
/// cannot matter), thresholds at 0.5, minimizes, and composes the
/// per-neuron formulas down to the concept vocabulary.
pub fn psi_extract(model: &TrainedModel, vocabulary: &Vocabulary) -> Result<PsiExtraction> {
    if model.preset.kind != PresetKind::Psi {
        return Err(Error::Config("psi_extract requires a psi preset".into()));
    }
    // mu-style per-class psi nets are not produced; a psi model is one net
    let net = &model.nets[0];
    psi_extract_network(net, vocabulary, PSI_EXHAUSTIVE_CAP)
}

pub fn psi_extract_network(
    net: &Network,
    vocabulary: &Vocabulary,
    exhaustive_cap: usize,
) -> Result<PsiExtraction> {
    if vocabulary.len() != net.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "psi vocabulary",
            expected: net.input_dim().to_string(),
            actual: vocabulary.len().to_string(),
        });
    }
    if net
        .layers()
        .iter()
        .any(|l| l.spec().activation != Activation::Sigmoid)
    {
        return Err(Error::UnsupportedArchitecture(
            "psi extraction requires sigmoid activations in every layer".into(),
        ));
    }

    let mut stages: Vec<CascadeStage> = Vec::with_capacity(net.layers().len());
    let mut per_neuron: Vec<Vec<DnfFormula>> = Vec::with_capacity(net.layers().len());
    let mut input_names: Vec<String> = vocabulary.names().to_vec();

    for (layer_idx, layer) in net.layers().iter().enumerate() {
        let layer_vocab = Vocabulary::new(input_names.iter().cloned())?;
        let mut formulas = Vec::with_capacity(layer.spec().out_dim);
        for neuron in 0..layer.spec().out_dim {
            formulas.push(neuron_formula(layer, neuron, &layer_vocab, exhaustive_cap)?);
        }
        per_neuron.push(formulas.clone());
        let output_names: Vec<String> = if layer_idx == net.layers().len() - 1 {
            (0..layer.spec().out_dim).map(|i| format!("out{i}")).collect()
        } else {
            (0..layer.spec().out_dim)
                .map(|i| format!("h{}_{i}", layer_idx + 1))
                .collect()
        };
        stages.push(CascadeStage::new(formulas, output_names.clone())?);
        input_names = output_names;
    }

    let outputs = explain_cascade(&stages, true)?;
    Ok(PsiExtraction {
        per_neuron,
        outputs,
    })
}

/// Truth table of one sigmoid neuron over the Boolean settings of its
/// unmasked inputs, minimized into a DNF over the layer's input names.
fn neuron_formula(
    layer: &crate::network::Layer,
    neuron: usize,
    layer_vocab: &Vocabulary,
    exhaustive_cap: usize,
) -> Result<DnfFormula> {
    let weights = layer.weights();
    let bias = layer.bias()[neuron];
    let active_inputs: Vec<usize> = layer
        .mask()
        .row(neuron)
        .iter()
        .enumerate()
        .filter(|(_, &keep)| keep)
        .map(|(j, _)| j)
        .collect();
    if active_inputs.len() > exhaustive_cap {
        return Err(Error::Config(format!(
            "neuron fan-in {} exceeds the exhaustive probing cap {exhaustive_cap}; \
             prune the network first",
            active_inputs.len()
        )));
    }
    let mut minterms: Vec<(Minterm, u64)> = Vec::new();
    for pattern in 0u32..1 << active_inputs.len() {
        let mut z = bias;
        let mut bits = Vec::with_capacity(active_inputs.len());
        for (slot, &j) in active_inputs.iter().enumerate() {
            let bit = pattern & (1 << slot) != 0;
            bits.push(bit);
            if bit {
                z += weights[[neuron, j]];
            }
        }
        let output = 1.0 / (1.0 + (-z).exp());
        if output >= 0.5 {
            minterms.push((Minterm::from_bits(&active_inputs, &bits), 1));
        }
    }
    let raw = DnfFormula::new(layer_vocab.clone(), minterms)?;
    Ok(simplify_capped(&raw, exhaustive_cap.max(crate::logic::DEFAULT_MINIMIZE_CAP)).formula)
}
