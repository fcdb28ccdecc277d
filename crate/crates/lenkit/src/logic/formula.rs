//! Formula intermediate representation: literals over named concepts,
//! conjunctions (minterms), DNF and CNF formulas, and Boolean assignments.
//!
//! All values are immutable after construction and canonically ordered:
//! literals ascend by concept index, minterms and clauses are sorted
//! lexicographically on their (index, sign) sequences. This makes formula
//! equality, printing, and the consistency metric deterministic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered list of concept names shared by every formula over the same space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    names: Vec<String>,
}

impl Vocabulary {
    /// Builds a vocabulary from concept names. Names must be non-empty and distinct.
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::MalformedFormula(format!(
                    "concept name at index {i} is empty"
                )));
            }
            if names[..i].contains(name) {
                return Err(Error::MalformedFormula(format!(
                    "duplicate concept name `{name}`"
                )));
            }
        }
        Ok(Vocabulary { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A possibly negated reference to one concept column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub index: usize,
    pub negated: bool,
}

// Ordered by concept index, then by the bit value the literal requires
// (negated before positive), so minterms sort by their sign vectors.
impl Ord for Literal {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index
            .cmp(&other.index)
            .then(other.negated.cmp(&self.negated))
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Literal {
    pub fn positive(index: usize) -> Self {
        Literal {
            index,
            negated: false,
        }
    }

    pub fn negative(index: usize) -> Self {
        Literal {
            index,
            negated: true,
        }
    }

    /// True iff the literal is satisfied by the given bit.
    pub fn matches(&self, bit: bool) -> bool {
        bit != self.negated
    }

    pub fn negate(&self) -> Self {
        Literal {
            index: self.index,
            negated: !self.negated,
        }
    }

    fn render(&self, vocab: &Vocabulary) -> String {
        if self.negated {
            format!("~{}", vocab.name(self.index))
        } else {
            vocab.name(self.index).to_string()
        }
    }
}

/// Boolean concept tuple; the thresholded version of a sample.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, index: usize) -> Option<bool> {
        self.bits.get(index).copied()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// All 2^k assignments over `k` variables in ascending binary order
    /// (bit 0 of the counter drives variable 0).
    pub fn enumerate(k: usize) -> impl Iterator<Item = Assignment> {
        assert!(k < 26, "exhaustive enumeration limited to 25 variables");
        (0u32..1u32 << k).map(move |pattern| {
            Assignment::new((0..k).map(|j| pattern & (1 << j) != 0).collect())
        })
    }
}

impl From<Vec<bool>> for Assignment {
    fn from(bits: Vec<bool>) -> Self {
        Assignment::new(bits)
    }
}

/// Conjunction of literals over strictly increasing concept indices.
/// The empty conjunction is constant true.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Minterm {
    literals: Vec<Literal>,
}

impl Minterm {
    /// Canonicalizes (sorts by index) and rejects duplicate concept indices.
    pub fn new(mut literals: Vec<Literal>) -> Result<Self> {
        literals.sort();
        for pair in literals.windows(2) {
            if pair[0].index == pair[1].index {
                return Err(Error::MalformedFormula(format!(
                    "concept index {} appears twice in a minterm",
                    pair[0].index
                )));
            }
        }
        Ok(Minterm { literals })
    }

    pub fn true_minterm() -> Self {
        Minterm { literals: vec![] }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// True iff every literal is satisfied. Empty conjunctions are true.
    pub fn eval(&self, assignment: &Assignment) -> Result<bool> {
        for lit in &self.literals {
            let bit = assignment.bit(lit.index).ok_or_else(|| {
                Error::MalformedFormula(format!(
                    "literal index {} out of range for assignment of length {}",
                    lit.index,
                    assignment.len()
                ))
            })?;
            if !lit.matches(bit) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The signed conjunction over `indices` read off a Boolean tuple.
    pub fn from_bits(indices: &[usize], bits: &[bool]) -> Self {
        let literals = indices
            .iter()
            .zip(bits)
            .map(|(&index, &bit)| Literal {
                index,
                negated: !bit,
            })
            .collect();
        Minterm { literals }
    }

    fn render(&self, vocab: &Vocabulary) -> String {
        if self.literals.is_empty() {
            return "true".to_string();
        }
        let body = self
            .literals
            .iter()
            .map(|l| l.render(vocab))
            .collect::<Vec<_>>()
            .join(" & ");
        if self.literals.len() > 1 {
            format!("({body})")
        } else {
            body
        }
    }
}

/// Disjunction of literals. The empty clause is constant false.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    literals: Vec<Literal>,
}

// Clauses order by index then positive-before-negated, placing clauses of
// un-negated literals ahead of their negated counterparts.
impl Ord for Clause {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let key = |l: &Literal| (l.index, l.negated);
        self.literals
            .iter()
            .map(key)
            .cmp(other.literals.iter().map(key))
    }
}

impl PartialOrd for Clause {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Clause {
    pub fn new(mut literals: Vec<Literal>) -> Self {
        literals.sort();
        literals.dedup();
        Clause { literals }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    /// A clause containing both signs of some variable is constant true.
    pub fn is_tautology(&self) -> bool {
        self.literals
            .windows(2)
            .any(|pair| pair[0].index == pair[1].index)
    }

    pub fn eval(&self, assignment: &Assignment) -> Result<bool> {
        for lit in &self.literals {
            let bit = assignment.bit(lit.index).ok_or_else(|| {
                Error::MalformedFormula(format!(
                    "literal index {} out of range for assignment of length {}",
                    lit.index,
                    assignment.len()
                ))
            })?;
            if lit.matches(bit) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn render(&self, vocab: &Vocabulary) -> String {
        if self.literals.is_empty() {
            return "false".to_string();
        }
        let body = self
            .literals
            .iter()
            .map(|l| l.render(vocab))
            .collect::<Vec<_>>()
            .join(" | ");
        if self.literals.len() > 1 {
            format!("({body})")
        } else {
            body
        }
    }
}

/// Disjunctive-normal-form formula: minterms with per-minterm support counts.
/// An empty minterm list is constant false.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DnfFormula {
    vocabulary: Vocabulary,
    minterms: Vec<(Minterm, u64)>,
}

impl DnfFormula {
    /// Canonicalizes: sorts minterms, merges duplicates by summing supports.
    pub fn new(vocabulary: Vocabulary, minterms: Vec<(Minterm, u64)>) -> Result<Self> {
        let k = vocabulary.len();
        for (m, _) in &minterms {
            if let Some(lit) = m.literals().iter().find(|l| l.index >= k) {
                return Err(Error::MalformedFormula(format!(
                    "literal index {} out of range for vocabulary of size {k}",
                    lit.index
                )));
            }
        }
        let mut formula = DnfFormula {
            vocabulary,
            minterms,
        };
        formula.canonicalize();
        Ok(formula)
    }

    pub fn constant_false(vocabulary: Vocabulary) -> Self {
        DnfFormula {
            vocabulary,
            minterms: vec![],
        }
    }

    pub fn constant_true(vocabulary: Vocabulary) -> Self {
        DnfFormula {
            vocabulary,
            minterms: vec![(Minterm::true_minterm(), 0)],
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn minterms(&self) -> &[(Minterm, u64)] {
        &self.minterms
    }

    pub fn is_constant_false(&self) -> bool {
        self.minterms.is_empty()
    }

    pub fn is_constant_true(&self) -> bool {
        self.minterms.iter().any(|(m, _)| m.is_empty())
    }

    /// Total literal occurrences across all minterms.
    pub fn literal_count(&self) -> usize {
        self.minterms.iter().map(|(m, _)| m.len()).sum()
    }

    /// Sorted set of concept indices mentioned anywhere in the formula.
    pub fn concept_indices(&self) -> Vec<usize> {
        let mut indices: Vec<usize> = self
            .minterms
            .iter()
            .flat_map(|(m, _)| m.literals().iter().map(|l| l.index))
            .collect();
        indices.sort_unstable();
        indices.dedup();
        indices
    }

    /// True iff any minterm evaluates true.
    pub fn eval(&self, assignment: &Assignment) -> Result<bool> {
        for (m, _) in &self.minterms {
            if m.eval(assignment)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn canonicalize(&mut self) {
        self.minterms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Minterm, u64)> = Vec::with_capacity(self.minterms.len());
        for (m, support) in self.minterms.drain(..) {
            match merged.last_mut() {
                Some((last, s)) if *last == m => *s += support,
                _ => merged.push((m, support)),
            }
        }
        self.minterms = merged;
    }

    /// Formula body in the plain text grammar, no quantifier.
    pub fn to_text(&self) -> String {
        if self.minterms.is_empty() {
            return "false".to_string();
        }
        if self.is_constant_true() {
            return "true".to_string();
        }
        self.minterms
            .iter()
            .map(|(m, _)| m.render(&self.vocabulary))
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

impl fmt::Display for DnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Conjunctive-normal-form formula. An empty clause list is constant true.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnfFormula {
    vocabulary: Vocabulary,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    /// Canonicalizes: drops tautological clauses, sorts, dedups.
    pub fn new(vocabulary: Vocabulary, clauses: Vec<Clause>) -> Result<Self> {
        let k = vocabulary.len();
        for clause in &clauses {
            if let Some(lit) = clause.literals().iter().find(|l| l.index >= k) {
                return Err(Error::MalformedFormula(format!(
                    "literal index {} out of range for vocabulary of size {k}",
                    lit.index
                )));
            }
        }
        let mut formula = CnfFormula {
            vocabulary,
            clauses,
        };
        formula.canonicalize();
        Ok(formula)
    }

    pub fn constant_true(vocabulary: Vocabulary) -> Self {
        CnfFormula {
            vocabulary,
            clauses: vec![],
        }
    }

    pub fn constant_false(vocabulary: Vocabulary) -> Self {
        CnfFormula {
            vocabulary,
            clauses: vec![Clause::new(vec![])],
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn is_constant_true(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_constant_false(&self) -> bool {
        self.clauses.iter().any(|c| c.literals().is_empty())
    }

    /// True iff every clause evaluates true.
    pub fn eval(&self, assignment: &Assignment) -> Result<bool> {
        for clause in &self.clauses {
            if !clause.eval(assignment)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn canonicalize(&mut self) {
        self.clauses.retain(|c| !c.is_tautology());
        self.clauses.sort();
        self.clauses.dedup();
    }

    pub fn to_text(&self) -> String {
        if self.clauses.is_empty() {
            return "true".to_string();
        }
        if self.is_constant_false() {
            return "false".to_string();
        }
        self.clauses
            .iter()
            .map(|c| c.render(&self.vocabulary))
            .collect::<Vec<_>>()
            .join(" & ")
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Either normal form, as returned by the parser.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Dnf(DnfFormula),
    Cnf(CnfFormula),
}

impl Formula {
    pub fn vocabulary(&self) -> &Vocabulary {
        match self {
            Formula::Dnf(f) => f.vocabulary(),
            Formula::Cnf(f) => f.vocabulary(),
        }
    }

    pub fn eval(&self, assignment: &Assignment) -> Result<bool> {
        match self {
            Formula::Dnf(f) => f.eval(assignment),
            Formula::Cnf(f) => f.eval(assignment),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Formula::Dnf(f) => f.to_text(),
            Formula::Cnf(f) => f.to_text(),
        }
    }
}

/// Rendering style for explanation output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaStyle {
    /// Bare formula body in the text grammar.
    DnfText,
    /// `forall c in C: <class>(c) <-> <body>`
    FolIff,
    /// `forall c in C: <class>(c) -> <body>`
    FolIf,
    /// `forall c in C: <body> -> <class>(c)`
    FolOnlyIf,
    /// `forall c in O_<label>: <body>` (cluster support set)
    FolCluster,
}

impl FormulaStyle {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "dnf_text" => Ok(FormulaStyle::DnfText),
            "fol_iff" | "iff" => Ok(FormulaStyle::FolIff),
            "fol_if" | "if" => Ok(FormulaStyle::FolIf),
            "fol_onlyif" | "only_if" => Ok(FormulaStyle::FolOnlyIf),
            "fol_cluster" | "cluster" => Ok(FormulaStyle::FolCluster),
            other => Err(Error::Config(format!("unknown formula style `{other}`"))),
        }
    }
}

/// Renders a formula in the requested style. `class_name` is required for
/// every style except `DnfText`; for clusters it labels the support set.
pub fn format_formula(
    formula: &Formula,
    style: FormulaStyle,
    class_name: Option<&str>,
) -> Result<String> {
    let body = formula.to_text();
    let need_class = |style: &str| -> Result<&str> {
        class_name.ok_or_else(|| {
            Error::Config(format!("style `{style}` requires a class or cluster name"))
        })
    };
    Ok(match style {
        FormulaStyle::DnfText => body,
        FormulaStyle::FolIff => {
            format!("forall c in C: {}(c) <-> {body}", need_class("fol_iff")?)
        }
        FormulaStyle::FolIf => {
            format!("forall c in C: {}(c) -> {body}", need_class("fol_if")?)
        }
        FormulaStyle::FolOnlyIf => {
            format!("forall c in C: {body} -> {}(c)", need_class("fol_onlyif")?)
        }
        FormulaStyle::FolCluster => {
            format!("forall c in O_{}: {body}", need_class("fol_cluster")?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab2() -> Vocabulary {
        Vocabulary::new(["c1", "c2"]).unwrap()
    }

    pub(crate) fn xor_dnf() -> DnfFormula {
        let m1 = Minterm::new(vec![Literal::negative(0), Literal::positive(1)]).unwrap();
        let m2 = Minterm::new(vec![Literal::positive(0), Literal::negative(1)]).unwrap();
        DnfFormula::new(vocab2(), vec![(m1, 1), (m2, 1)]).unwrap()
    }

    #[test]
    fn minterm_eval_matches_example() {
        // (~c1 & c2) on the Booleanization (0, 1) holds.
        let m = Minterm::new(vec![Literal::negative(0), Literal::positive(1)]).unwrap();
        assert!(m.eval(&Assignment::new(vec![false, true])).unwrap());
        // symmetric case fails
        let m2 = Minterm::new(vec![Literal::positive(0), Literal::negative(1)]).unwrap();
        assert!(!m2.eval(&Assignment::new(vec![false, true])).unwrap());
    }

    #[test]
    fn empty_minterm_is_true() {
        let m = Minterm::true_minterm();
        assert!(m.eval(&Assignment::new(vec![true, false])).unwrap());
        assert!(m.eval(&Assignment::new(vec![])).unwrap());
    }

    #[test]
    fn minterm_rejects_duplicate_index() {
        let err = Minterm::new(vec![Literal::positive(1), Literal::negative(1)]);
        assert!(err.is_err());
    }

    #[test]
    fn minterm_eval_out_of_range_is_error() {
        let m = Minterm::new(vec![Literal::positive(3)]).unwrap();
        assert!(m.eval(&Assignment::new(vec![true])).is_err());
    }

    #[test]
    fn xor_dnf_matches_truth_table() {
        let phi = xor_dnf();
        for a in Assignment::enumerate(2) {
            let expected = a.bit(0).unwrap() ^ a.bit(1).unwrap();
            assert_eq!(phi.eval(&a).unwrap(), expected, "assignment {:?}", a);
        }
    }

    #[test]
    fn constant_false_never_holds() {
        let phi = DnfFormula::constant_false(vocab2());
        for a in Assignment::enumerate(2) {
            assert!(!phi.eval(&a).unwrap());
        }
        assert_eq!(phi.to_text(), "false");
    }

    #[test]
    fn canonicalization_is_idempotent_and_merges_support() {
        let m1 = Minterm::new(vec![Literal::positive(0), Literal::negative(1)]).unwrap();
        let m2 = Minterm::new(vec![Literal::negative(0), Literal::positive(1)]).unwrap();
        let phi = DnfFormula::new(
            vocab2(),
            vec![(m1.clone(), 2), (m2.clone(), 1), (m1.clone(), 3)],
        )
        .unwrap();
        assert_eq!(phi.minterms().len(), 2);
        // duplicate m1 merged with summed support
        let support: Vec<u64> = phi.minterms().iter().map(|(_, s)| *s).collect();
        assert_eq!(support.iter().sum::<u64>(), 6);
        let again = DnfFormula::new(phi.vocabulary().clone(), phi.minterms().to_vec()).unwrap();
        assert_eq!(again, phi);
    }

    #[test]
    fn formats_in_every_style() {
        let phi = Formula::Dnf(xor_dnf());
        assert_eq!(phi.to_text(), "(~c1 & c2) | (c1 & ~c2)");
        assert_eq!(
            format_formula(&phi, FormulaStyle::FolIff, Some("xor")).unwrap(),
            "forall c in C: xor(c) <-> (~c1 & c2) | (c1 & ~c2)"
        );
        assert_eq!(
            format_formula(&phi, FormulaStyle::FolIf, Some("xor")).unwrap(),
            "forall c in C: xor(c) -> (~c1 & c2) | (c1 & ~c2)"
        );
        assert_eq!(
            format_formula(&phi, FormulaStyle::FolOnlyIf, Some("xor")).unwrap(),
            "forall c in C: (~c1 & c2) | (c1 & ~c2) -> xor(c)"
        );
        assert_eq!(
            format_formula(&phi, FormulaStyle::FolCluster, Some("1")).unwrap(),
            "forall c in O_1: (~c1 & c2) | (c1 & ~c2)"
        );
        assert!(format_formula(&phi, FormulaStyle::FolIff, None).is_err());
    }

    #[test]
    fn constant_formulas_format_as_keywords() {
        let f = Formula::Dnf(DnfFormula::constant_false(vocab2()));
        assert_eq!(
            format_formula(&f, FormulaStyle::DnfText, None).unwrap(),
            "false"
        );
        let t = Formula::Dnf(DnfFormula::constant_true(vocab2()));
        assert_eq!(
            format_formula(&t, FormulaStyle::DnfText, None).unwrap(),
            "true"
        );
    }

    #[test]
    fn cnf_eval_and_constants() {
        let vocab = vocab2();
        let cnf = CnfFormula::new(
            vocab.clone(),
            vec![
                Clause::new(vec![Literal::positive(0), Literal::positive(1)]),
                Clause::new(vec![Literal::negative(0), Literal::negative(1)]),
            ],
        )
        .unwrap();
        for a in Assignment::enumerate(2) {
            let expected = a.bit(0).unwrap() ^ a.bit(1).unwrap();
            assert_eq!(cnf.eval(&a).unwrap(), expected);
        }
        assert!(CnfFormula::constant_true(vocab.clone())
            .eval(&Assignment::new(vec![false, false]))
            .unwrap());
        assert!(!CnfFormula::constant_false(vocab)
            .eval(&Assignment::new(vec![true, true]))
            .unwrap());
    }

    #[test]
    fn tautological_clauses_are_dropped() {
        let vocab = vocab2();
        let cnf = CnfFormula::new(
            vocab,
            vec![Clause::new(vec![
                Literal::positive(0),
                Literal::negative(0),
            ])],
        )
        .unwrap();
        assert!(cnf.is_constant_true());
    }
}
