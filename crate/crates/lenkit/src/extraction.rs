//! Rule extraction: empirical truth tables over Booleanized concepts and
//! predictions, example- / set- / class-level DNF explanations, global CNF
//! aggregation, and substitution through cascaded stages.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::data::ConceptDataset;
use crate::error::{Error, Result};
use crate::logic::ast::Ast;
use crate::logic::{
    dnf_to_cnf_capped, or_cnf, simplify_capped, CnfFormula, DnfFormula, Literal, Minterm,
    Vocabulary, DEFAULT_CNF_CAP, DEFAULT_MINIMIZE_CAP,
};
use crate::network::Network;

/// How Boolean rows that collect both positive and negative predictions
/// are resolved. Distinct continuous inputs can share one Booleanization,
/// so both outcomes can genuinely occur in one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConflictPolicy {
    /// A row becomes a minterm iff strictly more positives than negatives;
    /// exact ties are excluded.
    #[default]
    Majority,
    /// Any positive occurrence makes the row a minterm; keeps the formula
    /// covering its entire support.
    PositiveOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationOptions {
    pub boolean_threshold: f64,
    pub min_support: u64,
    pub top_k_minterms: Option<usize>,
    pub simplify: bool,
    pub conflict_policy: ConflictPolicy,
    /// Vocabulary cap forwarded to the minimizer.
    pub minimize_cap: usize,
}

impl Default for ExplanationOptions {
    fn default() -> Self {
        ExplanationOptions {
            boolean_threshold: 0.5,
            min_support: 1,
            top_k_minterms: None,
            simplify: true,
            conflict_policy: ConflictPolicy::Majority,
            minimize_cap: DEFAULT_MINIMIZE_CAP,
        }
    }
}

impl ExplanationOptions {
    fn validate(&self) -> Result<()> {
        if self.min_support < 1 {
            return Err(Error::Config("min_support must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.boolean_threshold) {
            return Err(Error::Config(
                "boolean_threshold must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Deduplicated Boolean rows of the retained concept columns, with counts
/// of positive and negative thresholded predictions for one output class.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthTable {
    pub class_index: usize,
    pub retained: Vec<usize>,
    /// tuple of retained-column bits -> (positive count, negative count)
    pub rows: BTreeMap<Vec<bool>, (u64, u64)>,
}

/// Thresholds a [0,1] matrix into bits: `bit = value >= threshold`.
pub fn booleanize(values: ArrayView2<f64>, threshold: f64) -> Result<Array2<bool>> {
    for ((row, col), &v) in values.indexed_iter() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Data {
                row,
                column: col.to_string(),
                message: format!("value {v} outside [0, 1]"),
            });
        }
    }
    Ok(values.map(|&v| v >= threshold))
}

/// Builds the empirical truth table of output `class_index` over the
/// retained concept columns, Booleanizing concepts at 0.5.
pub fn build_truth_table(
    net: &Network,
    data: &ConceptDataset,
    class_index: usize,
    retained: &[usize],
) -> Result<TruthTable> {
    build_truth_table_with(net, data, class_index, retained, 0.5)
}

pub fn build_truth_table_with(
    net: &Network,
    data: &ConceptDataset,
    class_index: usize,
    retained: &[usize],
    boolean_threshold: f64,
) -> Result<TruthTable> {
    if data.is_empty() {
        return Err(Error::Data {
            row: 0,
            column: "-".into(),
            message: "cannot build a truth table from an empty dataset".into(),
        });
    }
    let k = data.num_concepts();
    let mut retained: Vec<usize> = retained.to_vec();
    retained.sort_unstable();
    retained.dedup();
    if retained.iter().any(|&j| j >= k) {
        return Err(Error::Config(format!(
            "retained concept index out of range (k = {k})"
        )));
    }
    if class_index >= net.output_dim() {
        return Err(Error::Config(format!(
            "class index {class_index} out of range ({} outputs)",
            net.output_dim()
        )));
    }
    let outputs = net.outputs(data.x.view())?;
    let bits = booleanize(data.x.view(), boolean_threshold)?;
    let mut rows: BTreeMap<Vec<bool>, (u64, u64)> = BTreeMap::new();
    for row in 0..data.len() {
        let tuple: Vec<bool> = retained.iter().map(|&j| bits[[row, j]]).collect();
        let positive = outputs[[row, class_index]] >= 0.5;
        let entry = rows.entry(tuple).or_insert((0, 0));
        if positive {
            entry.0 += 1;
        } else {
            entry.1 += 1;
        }
    }
    Ok(TruthTable {
        class_index,
        retained,
        rows,
    })
}

/// The signed conjunction of retained concepts for one sample, or `None`
/// when the sample is outside the class support (thresholded output 0).
pub fn explain_example(
    net: &Network,
    sample: ArrayView1<f64>,
    class_index: usize,
    retained: &[usize],
) -> Result<Option<Minterm>> {
    let batch = sample.insert_axis(Axis(0));
    let outputs = net.outputs(batch)?;
    if class_index >= outputs.ncols() {
        return Err(Error::Config(format!(
            "class index {class_index} out of range ({} outputs)",
            outputs.ncols()
        )));
    }
    if outputs[[0, class_index]] < 0.5 {
        return Ok(None);
    }
    let mut retained: Vec<usize> = retained.to_vec();
    retained.sort_unstable();
    retained.dedup();
    let bits: Vec<bool> = retained.iter().map(|&j| sample[j] >= 0.5).collect();
    Ok(Some(Minterm::from_bits(&retained, &bits)))
}

/// A class-level explanation plus its provenance counters.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassExplanation {
    pub formula: DnfFormula,
    /// False when the vocabulary exceeded the minimization cap and the
    /// aggregated DNF was returned unminimized.
    pub minimized: bool,
    /// Minterm count before support / top-k filtering.
    pub unfiltered_minterms: usize,
    /// Minterm count actually aggregated into the formula.
    pub kept_minterms: usize,
}

/// Aggregates the positive truth-table rows into the class-level DNF:
/// conflict resolution, support filtering, optional top-k, then optional
/// minimization. An empty support yields the constant-false formula.
pub fn explain_class(
    net: &Network,
    data: &ConceptDataset,
    class_index: usize,
    retained: &[usize],
    options: &ExplanationOptions,
) -> Result<ClassExplanation> {
    options.validate()?;
    let table = build_truth_table_with(net, data, class_index, retained, options.boolean_threshold)?;
    aggregate_table(&table, data.vocabulary(), options)
}

/// As `explain_class`, restricted to the samples named by `indices`.
pub fn explain_set(
    net: &Network,
    data: &ConceptDataset,
    indices: &[usize],
    class_index: usize,
    retained: &[usize],
    options: &ExplanationOptions,
) -> Result<ClassExplanation> {
    if indices.is_empty() {
        return Err(Error::Config(
            "explain_set requires a non-empty sample set".into(),
        ));
    }
    let subset = data.select(indices)?;
    explain_class(net, &subset, class_index, retained, options)
}

fn aggregate_table(
    table: &TruthTable,
    vocabulary: Vocabulary,
    options: &ExplanationOptions,
) -> Result<ClassExplanation> {
    let mut candidates: Vec<(Minterm, u64)> = Vec::new();
    for (tuple, &(positive, negative)) in &table.rows {
        let keep = match options.conflict_policy {
            ConflictPolicy::Majority => positive > negative,
            ConflictPolicy::PositiveOnly => positive > 0,
        };
        if keep {
            candidates.push((Minterm::from_bits(&table.retained, tuple), positive));
        }
    }
    let unfiltered = candidates.len();
    candidates.retain(|(_, support)| *support >= options.min_support);
    if let Some(top_k) = options.top_k_minterms {
        candidates.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        candidates.truncate(top_k);
    }
    let kept = candidates.len();
    let formula = DnfFormula::new(vocabulary, candidates)?;
    let (formula, minimized) = if options.simplify && !formula.is_constant_false() {
        let out = simplify_capped(&formula, options.minimize_cap);
        (out.formula, out.minimized)
    } else {
        (formula, false)
    };
    Ok(ClassExplanation {
        formula,
        minimized,
        unfiltered_minterms: unfiltered,
        kept_minterms: kept,
    })
}

/// Conjunction of the per-class CNFs, equivalent to the disjunction of the
/// input formulas. The class formulas must share one vocabulary.
pub fn global_cnf(formulas: &[DnfFormula]) -> Result<CnfFormula> {
    global_cnf_capped(formulas, DEFAULT_CNF_CAP)
}

pub fn global_cnf_capped(formulas: &[DnfFormula], cap: usize) -> Result<CnfFormula> {
    let first = formulas
        .first()
        .ok_or_else(|| Error::Config("global_cnf needs at least one formula".into()))?;
    for f in formulas {
        if f.vocabulary() != first.vocabulary() {
            return Err(Error::MalformedFormula(
                "global_cnf requires a shared vocabulary".into(),
            ));
        }
    }
    let mut acc = dnf_to_cnf_capped(first, cap)?;
    for f in &formulas[1..] {
        acc = or_cnf(&acc, &dnf_to_cnf_capped(f, cap)?)?;
    }
    Ok(acc)
}

/// Number of dataset rows whose Booleanization satisfies none of the class
/// formulas: the gap in the assumption that the supports cover the space.
pub fn uncovered_count(
    formulas: &[DnfFormula],
    data: &ConceptDataset,
    boolean_threshold: f64,
) -> Result<usize> {
    let bits = booleanize(data.x.view(), boolean_threshold)?;
    let mut uncovered = 0;
    for row in bits.rows() {
        let assignment = crate::logic::Assignment::new(row.to_vec());
        let mut hit = false;
        for f in formulas {
            if f.eval(&assignment)? {
                hit = true;
                break;
            }
        }
        if !hit {
            uncovered += 1;
        }
    }
    Ok(uncovered)
}

/// One level of a cascading pipeline: formulas for each output of the
/// stage, expressed over the stage's input vocabulary, plus the names the
/// outputs expose to the next stage.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeStage {
    pub formulas: Vec<DnfFormula>,
    pub output_names: Vec<String>,
}

impl CascadeStage {
    pub fn new(formulas: Vec<DnfFormula>, output_names: Vec<String>) -> Result<Self> {
        if formulas.len() != output_names.len() {
            return Err(Error::DimensionMismatch {
                context: "cascade stage",
                expected: output_names.len().to_string(),
                actual: formulas.len().to_string(),
            });
        }
        Ok(CascadeStage {
            formulas,
            output_names,
        })
    }
}

/// Substitutes each stage's intermediate concepts with the formulas of the
/// stage below (negated literals take the negated formula), renormalizes
/// to DNF over the first stage's vocabulary, and optionally simplifies.
pub fn explain_cascade(stages: &[CascadeStage], simplify: bool) -> Result<Vec<DnfFormula>> {
    let first = stages
        .first()
        .ok_or_else(|| Error::Config("explain_cascade needs at least one stage".into()))?;
    let base_vocab = first.formulas[0].vocabulary().clone();

    let mut current: Vec<DnfFormula> = first.formulas.clone();
    let mut current_names = first.output_names.clone();
    for (stage_idx, stage) in stages.iter().enumerate().skip(1) {
        let stage_vocab = stage.formulas[0].vocabulary();
        if stage_vocab.names() != current_names.as_slice() {
            return Err(Error::MalformedFormula(format!(
                "stage {stage_idx} vocabulary {:?} does not match the previous stage's outputs {:?}",
                stage_vocab.names(),
                current_names
            )));
        }
        let mut composed = Vec::with_capacity(stage.formulas.len());
        for formula in &stage.formulas {
            let ast = substitute(formula, &current);
            composed.push(ast.to_dnf(base_vocab.clone(), 0)?);
        }
        current = composed;
        current_names = stage.output_names.clone();
    }
    if simplify {
        current = current
            .into_iter()
            .map(|f| simplify_capped(&f, DEFAULT_MINIMIZE_CAP).formula)
            .collect();
    }
    Ok(current)
}

fn dnf_to_ast(formula: &DnfFormula) -> Ast {
    if formula.is_constant_false() {
        return Ast::False;
    }
    if formula.is_constant_true() {
        return Ast::True;
    }
    Ast::Or(
        formula
            .minterms()
            .iter()
            .map(|(m, _)| Ast::And(m.literals().iter().map(|&l| Ast::Lit(l)).collect()))
            .collect(),
    )
}

/// Rewrites `upper` (over intermediate concepts) into an expression over
/// the base vocabulary by splicing in the lower-stage formulas.
fn substitute(upper: &DnfFormula, lower: &[DnfFormula]) -> Ast {
    let leaf = |lit: &Literal| -> Ast {
        let body = dnf_to_ast(&lower[lit.index]);
        if lit.negated {
            Ast::Not(Box::new(body))
        } else {
            body
        }
    };
    if upper.is_constant_false() {
        return Ast::False;
    }
    if upper.is_constant_true() {
        return Ast::True;
    }
    Ast::Or(
        upper
            .minterms()
            .iter()
            .map(|(m, _)| Ast::And(m.literals().iter().map(|l| leaf(l)).collect()))
            .collect(),
    )
}
