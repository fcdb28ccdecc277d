//! DNF to CNF conversion by clause distribution.
//!
//! Clauses are held as positive/negative bitmasks while distributing, so
//! tautology checks, dedup, and absorption are single mask operations. The
//! conversion is gated by a vocabulary-size cap: converting between normal
//! forms is exponential in the worst case, and callers must opt into larger
//! spaces explicitly.

use crate::error::{Error, Result};
use crate::logic::formula::{Clause, CnfFormula, DnfFormula, Literal};

/// Default vocabulary-size cap for `dnf_to_cnf`.
pub const DEFAULT_CNF_CAP: usize = 16;

/// Bitmask ceiling for the clause representation.
const MASK_VARS: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct MaskClause {
    pos: u64,
    neg: u64,
}

impl MaskClause {
    fn is_tautology(&self) -> bool {
        self.pos & self.neg != 0
    }

    fn subsumes(&self, other: &MaskClause) -> bool {
        self.pos & !other.pos == 0 && self.neg & !other.neg == 0
    }

    fn width(&self) -> u32 {
        self.pos.count_ones() + self.neg.count_ones()
    }
}

/// Converts with the default cap.
pub fn dnf_to_cnf(formula: &DnfFormula) -> Result<CnfFormula> {
    dnf_to_cnf_capped(formula, DEFAULT_CNF_CAP)
}

/// Converts a DNF into an equivalent CNF, failing (never truncating) when
/// the vocabulary exceeds `cap`.
pub fn dnf_to_cnf_capped(formula: &DnfFormula, cap: usize) -> Result<CnfFormula> {
    let k = formula.vocabulary().len();
    let cap = cap.min(MASK_VARS);
    if k > cap {
        return Err(Error::SizeLimit {
            operation: "dnf_to_cnf",
            vars: k,
            cap,
        });
    }
    let vocab = formula.vocabulary().clone();
    if formula.is_constant_true() {
        return Ok(CnfFormula::constant_true(vocab));
    }
    if formula.is_constant_false() {
        return Ok(CnfFormula::constant_false(vocab));
    }
    // OR-fold minterm CNFs into the running clause set, starting from false.
    let mut clauses = vec![MaskClause { pos: 0, neg: 0 }];
    for (minterm, _) in formula.minterms() {
        let unit_clauses: Vec<MaskClause> = minterm
            .literals()
            .iter()
            .map(|l| literal_mask(*l))
            .collect();
        clauses = or_mask_sets(&clauses, &unit_clauses);
    }
    CnfFormula::new(vocab, clauses.iter().map(mask_to_clause).collect())
}

/// Disjunction of two CNF formulas over the same vocabulary, itself in CNF.
/// Cost is quadratic in the clause counts of the operands.
pub fn or_cnf(a: &CnfFormula, b: &CnfFormula) -> Result<CnfFormula> {
    if a.vocabulary() != b.vocabulary() {
        return Err(Error::MalformedFormula(
            "cannot combine formulas over different vocabularies".into(),
        ));
    }
    let k = a.vocabulary().len();
    if k > MASK_VARS {
        return Err(Error::SizeLimit {
            operation: "or_cnf",
            vars: k,
            cap: MASK_VARS,
        });
    }
    if a.is_constant_true() || b.is_constant_true() {
        return Ok(CnfFormula::constant_true(a.vocabulary().clone()));
    }
    let left: Vec<MaskClause> = a.clauses().iter().map(clause_to_mask).collect();
    let right: Vec<MaskClause> = b.clauses().iter().map(clause_to_mask).collect();
    let merged = or_mask_sets(&left, &right);
    CnfFormula::new(
        a.vocabulary().clone(),
        merged.iter().map(mask_to_clause).collect(),
    )
}

fn literal_mask(lit: Literal) -> MaskClause {
    if lit.negated {
        MaskClause {
            pos: 0,
            neg: 1 << lit.index,
        }
    } else {
        MaskClause {
            pos: 1 << lit.index,
            neg: 0,
        }
    }
}

fn clause_to_mask(clause: &Clause) -> MaskClause {
    let mut mask = MaskClause { pos: 0, neg: 0 };
    for lit in clause.literals() {
        if lit.negated {
            mask.neg |= 1 << lit.index;
        } else {
            mask.pos |= 1 << lit.index;
        }
    }
    mask
}

fn mask_to_clause(mask: &MaskClause) -> Clause {
    let mut literals = Vec::with_capacity(mask.width() as usize);
    for index in 0..MASK_VARS {
        if mask.pos & (1 << index) != 0 {
            literals.push(Literal::positive(index));
        }
        if mask.neg & (1 << index) != 0 {
            literals.push(Literal::negative(index));
        }
    }
    Clause::new(literals)
}

/// OR of two clause sets: pairwise clause unions, pruned of tautologies and
/// subsumed clauses.
fn or_mask_sets(a: &[MaskClause], b: &[MaskClause]) -> Vec<MaskClause> {
    let mut raw = Vec::with_capacity(a.len() * b.len());
    for ca in a {
        for cb in b {
            let union = MaskClause {
                pos: ca.pos | cb.pos,
                neg: ca.neg | cb.neg,
            };
            if !union.is_tautology() {
                raw.push(union);
            }
        }
    }
    raw.sort_by_key(|c| (c.width(), c.pos, c.neg));
    raw.dedup();
    let mut kept: Vec<MaskClause> = Vec::with_capacity(raw.len());
    'outer: for clause in raw {
        for existing in &kept {
            if existing.subsumes(&clause) {
                continue 'outer;
            }
        }
        kept.push(clause);
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::formula::{Assignment, Minterm, Vocabulary};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn vocab(k: usize) -> Vocabulary {
        Vocabulary::new((0..k).map(|i| format!("c{}", i + 1))).unwrap()
    }

    fn assert_equivalent(dnf: &DnfFormula, cnf: &CnfFormula) {
        let k = dnf.vocabulary().len();
        for a in Assignment::enumerate(k) {
            assert_eq!(
                dnf.eval(&a).unwrap(),
                cnf.eval(&a).unwrap(),
                "diverges on {:?}",
                a
            );
        }
    }

    #[test]
    fn xor_converts_to_two_clauses() {
        let m1 = Minterm::new(vec![Literal::negative(0), Literal::positive(1)]).unwrap();
        let m2 = Minterm::new(vec![Literal::positive(0), Literal::negative(1)]).unwrap();
        let dnf = DnfFormula::new(vocab(2), vec![(m1, 1), (m2, 1)]).unwrap();
        let cnf = dnf_to_cnf(&dnf).unwrap();
        assert_eq!(cnf.to_text(), "(c1 | c2) & (~c1 | ~c2)");
        assert_equivalent(&dnf, &cnf);
    }

    #[test]
    fn single_minterm_becomes_unit_clauses() {
        let m = Minterm::new(vec![Literal::positive(0), Literal::positive(1)]).unwrap();
        let dnf = DnfFormula::new(vocab(2), vec![(m, 1)]).unwrap();
        let cnf = dnf_to_cnf(&dnf).unwrap();
        assert_eq!(cnf.clauses().len(), 2);
        assert_eq!(cnf.to_text(), "c1 & c2");
        assert_equivalent(&dnf, &cnf);
    }

    #[test]
    fn cap_exceeded_is_an_error() {
        let dnf = DnfFormula::constant_false(vocab(17));
        match dnf_to_cnf(&dnf) {
            Err(Error::SizeLimit { vars: 17, cap: 16, .. }) => {}
            other => panic!("expected size-limit error, got {other:?}"),
        }
    }

    #[test]
    fn random_five_var_formulas_stay_equivalent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let k = 5;
            let n_minterms = rng.random_range(1..=6);
            let mut minterms = Vec::new();
            for _ in 0..n_minterms {
                let mut literals = Vec::new();
                for index in 0..k {
                    match rng.random_range(0..3) {
                        0 => literals.push(Literal::positive(index)),
                        1 => literals.push(Literal::negative(index)),
                        _ => {}
                    }
                }
                minterms.push((Minterm::new(literals).unwrap(), 1));
            }
            let dnf = DnfFormula::new(vocab(k), minterms).unwrap();
            let cnf = dnf_to_cnf(&dnf).unwrap();
            assert_equivalent(&dnf, &cnf);
        }
    }

    #[test]
    fn or_cnf_matches_disjunction() {
        let m1 = Minterm::new(vec![Literal::positive(0), Literal::positive(1)]).unwrap();
        let m2 = Minterm::new(vec![Literal::negative(2)]).unwrap();
        let d1 = DnfFormula::new(vocab(3), vec![(m1, 1)]).unwrap();
        let d2 = DnfFormula::new(vocab(3), vec![(m2, 1)]).unwrap();
        let merged = or_cnf(&dnf_to_cnf(&d1).unwrap(), &dnf_to_cnf(&d2).unwrap()).unwrap();
        for a in Assignment::enumerate(3) {
            let expected = d1.eval(&a).unwrap() || d2.eval(&a).unwrap();
            assert_eq!(merged.eval(&a).unwrap(), expected);
        }
    }
}
