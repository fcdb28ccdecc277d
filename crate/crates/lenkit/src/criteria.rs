//! Training criteria for the three objectives: interpretable classification
//! (IF / Only-IF / IFF rules), explaining a black-box (coherence), and
//! interpretable clustering (mutual information).
//!
//! Every loss returns the batch *sum* together with its gradient with
//! respect to the network outputs. The trainer divides by the batch size
//! before the optimizer step so learning rates stay comparable across
//! dataset sizes; the L1 penalty is handled separately during backprop.
//!
//! The cross-entropy losses are implemented in their standard negated form
//! so that they are nonnegative and minimized (not maximized) at a perfect
//! fit.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Clip for the logarithms of the cross-entropy losses.
const CE_EPSILON: f64 = 1e-7;

/// Where a criterion's target values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSource {
    Labels,
    BlackboxOutputs,
    None,
}

/// Loss selector with its objective-specific configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "criterion", rename_all = "snake_case")]
pub enum Criterion {
    /// Hinge on `max(0, y - f)`: targets must be covered, negatives free.
    If,
    /// Hinge on `max(0, f - y)`: the mirror image.
    OnlyIf,
    /// Cross-entropy against Boolean labels.
    Iff,
    /// Cross-entropy against a black-box's soft outputs.
    Coherence,
    /// Negative mutual information over softmaxed outputs.
    Mi {
        #[serde(default = "default_temperature")]
        temperature: f64,
    },
}

fn default_temperature() -> f64 {
    1.0
}

impl Criterion {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "if" => Ok(Criterion::If),
            "only_if" => Ok(Criterion::OnlyIf),
            "iff" => Ok(Criterion::Iff),
            "coherence" => Ok(Criterion::Coherence),
            "mi" => Ok(Criterion::Mi { temperature: 1.0 }),
            other => Err(Error::Config(format!("unknown criterion `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Criterion::If => "if",
            Criterion::OnlyIf => "only_if",
            Criterion::Iff => "iff",
            Criterion::Coherence => "coherence",
            Criterion::Mi { .. } => "mi",
        }
    }

    pub fn target_source(&self) -> TargetSource {
        match self {
            Criterion::If | Criterion::OnlyIf | Criterion::Iff => TargetSource::Labels,
            Criterion::Coherence => TargetSource::BlackboxOutputs,
            Criterion::Mi { .. } => TargetSource::None,
        }
    }

    /// Batch-summed loss and its gradient w.r.t. `outputs`.
    /// `targets` is required unless the criterion is unsupervised.
    pub fn loss_and_grad(
        &self,
        outputs: ArrayView2<f64>,
        targets: Option<ArrayView2<f64>>,
    ) -> Result<(f64, Array2<f64>)> {
        match self {
            Criterion::Mi { temperature } => loss_mi(outputs, *temperature),
            supervised => {
                let targets = targets.ok_or_else(|| {
                    Error::Config(format!(
                        "criterion `{}` requires targets",
                        supervised.name()
                    ))
                })?;
                match supervised {
                    Criterion::If => loss_if(targets, outputs),
                    Criterion::OnlyIf => loss_only_if(targets, outputs),
                    Criterion::Iff | Criterion::Coherence => loss_iff(targets, outputs),
                    Criterion::Mi { .. } => unreachable!(),
                }
            }
        }
    }
}

fn check_shapes(targets: ArrayView2<f64>, outputs: ArrayView2<f64>) -> Result<()> {
    if targets.dim() != outputs.dim() {
        return Err(Error::DimensionMismatch {
            context: "loss targets vs outputs",
            expected: format!("{:?}", targets.dim()),
            actual: format!("{:?}", outputs.dim()),
        });
    }
    Ok(())
}

/// IF-rule hinge: `sum max(0, y - f)`. Zero iff `f >= y` everywhere; no
/// condition is imposed where the target is 0.
pub fn loss_if(targets: ArrayView2<f64>, outputs: ArrayView2<f64>) -> Result<(f64, Array2<f64>)> {
    check_shapes(targets, outputs)?;
    let mut loss = 0.0;
    let mut grad = Array2::zeros(outputs.dim());
    for ((idx, &f), &y) in outputs.indexed_iter().zip(targets.iter()) {
        if y > f {
            loss += y - f;
            grad[idx] = -1.0;
        }
    }
    Ok((loss, grad))
}

/// Only-IF hinge: `sum max(0, f - y)`, the IF loss with roles swapped.
pub fn loss_only_if(
    targets: ArrayView2<f64>,
    outputs: ArrayView2<f64>,
) -> Result<(f64, Array2<f64>)> {
    check_shapes(targets, outputs)?;
    let mut loss = 0.0;
    let mut grad = Array2::zeros(outputs.dim());
    for ((idx, &f), &y) in outputs.indexed_iter().zip(targets.iter()) {
        if f > y {
            loss += f - y;
            grad[idx] = 1.0;
        }
    }
    Ok((loss, grad))
}

/// IFF cross-entropy: `sum -[y ln f + (1-y) ln(1-f)]`, with `f` clipped to
/// `[eps, 1-eps]` inside the logarithms. Identical arithmetic serves the
/// coherence objective with black-box outputs as soft targets.
pub fn loss_iff(targets: ArrayView2<f64>, outputs: ArrayView2<f64>) -> Result<(f64, Array2<f64>)> {
    check_shapes(targets, outputs)?;
    let mut loss = 0.0;
    let mut grad = Array2::zeros(outputs.dim());
    for ((idx, &f), &y) in outputs.indexed_iter().zip(targets.iter()) {
        let fc = f.clamp(CE_EPSILON, 1.0 - CE_EPSILON);
        loss -= y * fc.ln() + (1.0 - y) * (1.0 - fc).ln();
        grad[idx] = (fc - y) / (fc * (1.0 - fc));
    }
    Ok((loss, grad))
}

/// Coherence loss toward a black-box's soft predictions.
pub fn loss_coherence(
    blackbox_outputs: ArrayView2<f64>,
    outputs: ArrayView2<f64>,
) -> Result<(f64, Array2<f64>)> {
    loss_iff(blackbox_outputs, outputs)
}

/// Negative mutual information between samples and cluster assignments:
/// `H(E|C) - H(E)` with `p(i|c) = softmax(outputs / T)` per row, natural
/// logarithms. Bounded in `[-ln r, ln r]`; minimization pushes rows toward
/// one-hot distributions balanced across the batch.
pub fn loss_mi(outputs: ArrayView2<f64>, temperature: f64) -> Result<(f64, Array2<f64>)> {
    let (n, r) = outputs.dim();
    if n == 0 {
        return Err(Error::DimensionMismatch {
            context: "mutual information batch",
            expected: "at least one sample".into(),
            actual: "0".into(),
        });
    }
    if r < 2 {
        return Err(Error::Config(
            "mutual information needs at least two output units".into(),
        ));
    }
    if temperature <= 0.0 {
        return Err(Error::Config("softmax temperature must be positive".into()));
    }

    // p[i][j] = softmax over j of outputs[i] / T
    let mut p = Array2::zeros((n, r));
    for (row, out_row) in outputs.rows().into_iter().enumerate() {
        let max = out_row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let mut denom = 0.0;
        for j in 0..r {
            let e = ((out_row[j] - max) / temperature).exp();
            p[[row, j]] = e;
            denom += e;
        }
        for j in 0..r {
            p[[row, j]] /= denom;
        }
    }

    let nf = n as f64;
    let safe_ln = |v: f64| v.max(1e-300).ln();
    // conditional entropy: mean over rows of the row entropy
    let mut h_cond = 0.0;
    for row in p.rows() {
        for &v in row {
            h_cond -= v * safe_ln(v);
        }
    }
    h_cond /= nf;
    // marginal entropy of the batch-mean distribution
    let p_mean: Vec<f64> = (0..r).map(|j| p.column(j).sum() / nf).collect();
    let h_marg: f64 = -p_mean.iter().map(|&v| v * safe_ln(v)).sum::<f64>();

    let loss = h_cond - h_marg;

    // dL/dp[i][j] = (ln p_mean[j] - ln p[i][j]) / n, then back through softmax
    let mut grad = Array2::zeros((n, r));
    for i in 0..n {
        let g_row: Vec<f64> = (0..r)
            .map(|j| (safe_ln(p_mean[j]) - safe_ln(p[[i, j]])) / nf)
            .collect();
        let weighted: f64 = (0..r).map(|j| g_row[j] * p[[i, j]]).sum();
        for j in 0..r {
            grad[[i, j]] = p[[i, j]] * (g_row[j] - weighted) / temperature;
        }
    }
    Ok((loss, grad))
}
