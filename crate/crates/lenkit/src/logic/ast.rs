//! Internal expression tree used by the parser and by formula composition.
//!
//! The tree is normalized in two steps: negations are pushed down to the
//! literals, then conjunctions are distributed over disjunctions to reach
//! DNF. Contradictory minterms are dropped and absorbed minterms removed.

use crate::error::{Error, Result};
use crate::logic::formula::{DnfFormula, Literal, Minterm, Vocabulary};

/// Hard ceiling on intermediate minterm counts during distribution.
const DISTRIBUTION_LIMIT: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Ast {
    True,
    False,
    Lit(Literal),
    Not(Box<Ast>),
    And(Vec<Ast>),
    Or(Vec<Ast>),
}

impl Ast {
    /// Pushes negations down to literals (negation normal form).
    pub(crate) fn to_nnf(self) -> Ast {
        match self {
            Ast::Not(inner) => match *inner {
                Ast::True => Ast::False,
                Ast::False => Ast::True,
                Ast::Lit(l) => Ast::Lit(l.negate()),
                Ast::Not(x) => x.to_nnf(),
                Ast::And(children) => Ast::Or(
                    children
                        .into_iter()
                        .map(|c| Ast::Not(Box::new(c)).to_nnf())
                        .collect(),
                ),
                Ast::Or(children) => Ast::And(
                    children
                        .into_iter()
                        .map(|c| Ast::Not(Box::new(c)).to_nnf())
                        .collect(),
                ),
            },
            Ast::And(children) => Ast::And(children.into_iter().map(Ast::to_nnf).collect()),
            Ast::Or(children) => Ast::Or(children.into_iter().map(Ast::to_nnf).collect()),
            other => other,
        }
    }

    /// Distributes the (already NNF) tree into a set of minterms.
    /// Returns the sign map per minterm: `None` marks a contradictory branch.
    fn distribute(&self) -> Result<Vec<Vec<Literal>>> {
        match self {
            Ast::True => Ok(vec![vec![]]),
            Ast::False => Ok(vec![]),
            Ast::Lit(l) => Ok(vec![vec![*l]]),
            Ast::Not(_) => Err(Error::MalformedFormula(
                "negation survived NNF normalization".into(),
            )),
            Ast::Or(children) => {
                let mut terms = Vec::new();
                for child in children {
                    terms.extend(child.distribute()?);
                    if terms.len() > DISTRIBUTION_LIMIT {
                        return Err(Error::MalformedFormula(
                            "formula too large to normalize to DNF".into(),
                        ));
                    }
                }
                Ok(terms)
            }
            Ast::And(children) => {
                let mut acc: Vec<Vec<Literal>> = vec![vec![]];
                for child in children {
                    let rhs = child.distribute()?;
                    let mut next = Vec::with_capacity(acc.len().saturating_mul(rhs.len()));
                    for left in &acc {
                        for right in &rhs {
                            if let Some(joined) = join_literals(left, right) {
                                next.push(joined);
                            }
                        }
                        if next.len() > DISTRIBUTION_LIMIT {
                            return Err(Error::MalformedFormula(
                                "formula too large to normalize to DNF".into(),
                            ));
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }
        }
    }

    /// Full normalization to a canonical DNF over `vocabulary`.
    /// Every emitted minterm carries `support` as its count.
    pub(crate) fn to_dnf(&self, vocabulary: Vocabulary, support: u64) -> Result<DnfFormula> {
        let raw = self.clone().to_nnf().distribute()?;
        let mut minterms: Vec<Minterm> = Vec::with_capacity(raw.len());
        for literals in raw {
            minterms.push(Minterm::new(literals).expect("join_literals removed duplicates"));
        }
        let minterms = absorb_minterms(minterms);
        DnfFormula::new(
            vocabulary,
            minterms.into_iter().map(|m| (m, support)).collect(),
        )
    }
}

/// Merges two literal sets; `None` when they contradict.
fn join_literals(left: &[Literal], right: &[Literal]) -> Option<Vec<Literal>> {
    let mut out = left.to_vec();
    for lit in right {
        match out.iter().find(|l| l.index == lit.index) {
            Some(existing) if existing.negated != lit.negated => return None,
            Some(_) => {}
            None => out.push(*lit),
        }
    }
    Some(out)
}

/// Removes minterms implied by a shorter one (literal-subset absorption).
pub(crate) fn absorb_minterms(mut minterms: Vec<Minterm>) -> Vec<Minterm> {
    minterms.sort_by_key(|m| m.len());
    let mut kept: Vec<Minterm> = Vec::with_capacity(minterms.len());
    'outer: for m in minterms {
        for k in &kept {
            if is_subset(k.literals(), m.literals()) {
                continue 'outer;
            }
        }
        kept.push(m);
    }
    kept
}

/// Subset test on index-sorted literal slices.
fn is_subset(small: &[Literal], big: &[Literal]) -> bool {
    let mut it = big.iter();
    'outer: for lit in small {
        for candidate in it.by_ref() {
            if candidate == lit {
                continue 'outer;
            }
            if candidate.index > lit.index {
                return false;
            }
        }
        return false;
    }
    true
}
