//! Two-level minimization: Quine-McCluskey prime implicants plus a
//! Petrick-style minimum cover.
//!
//! The ON-set is recovered exhaustively from the input formula, so the
//! whole procedure is exponential in the vocabulary size and gated by a
//! cap. Above the cap the input is returned unchanged and flagged, never
//! rejected: an unminimized explanation is still a valid explanation.
//!
//! Cover selection is fully deterministic. Among the minimum-cardinality
//! covers surviving Petrick expansion, the one with the fewest literals
//! wins; remaining ties fall to the lexicographically smallest implicant
//! index sequence.

use std::collections::HashSet;

use crate::logic::formula::{DnfFormula, Literal, Minterm};

/// Default vocabulary-size cap for `simplify`.
pub const DEFAULT_MINIMIZE_CAP: usize = 12;

/// Absolute ceiling: the ON-set is enumerated over 2^k assignments.
const HARD_CAP: usize = 20;

/// Result of `simplify`: `minimized` is false when the cap was exceeded and
/// the input was passed through untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplified {
    pub formula: DnfFormula,
    pub minimized: bool,
}

/// One product term as a pattern/care pair: bit j of `cares` set means the
/// term constrains variable j, to the value of bit j of `values`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Cube {
    values: u32,
    cares: u32,
}

impl Cube {
    fn covers(&self, pattern: u32) -> bool {
        pattern & self.cares == self.values
    }

    fn intersects(&self, other: &Cube) -> bool {
        (self.values ^ other.values) & (self.cares & other.cares) == 0
    }

    fn literal_count(&self) -> u32 {
        self.cares.count_ones()
    }

    fn from_minterm(minterm: &Minterm) -> Cube {
        let mut cube = Cube { values: 0, cares: 0 };
        for lit in minterm.literals() {
            cube.cares |= 1 << lit.index;
            if !lit.negated {
                cube.values |= 1 << lit.index;
            }
        }
        cube
    }

    fn to_minterm(self, k: usize) -> Minterm {
        let literals: Vec<Literal> = (0..k)
            .filter(|j| self.cares & (1 << j) != 0)
            .map(|j| Literal {
                index: j,
                negated: self.values & (1 << j) == 0,
            })
            .collect();
        Minterm::new(literals).expect("cube indices are distinct")
    }
}

/// Minimizes with the default cap.
pub fn simplify(formula: &DnfFormula) -> Simplified {
    simplify_capped(formula, DEFAULT_MINIMIZE_CAP)
}

/// Returns an equivalent minimal-cover DNF, or the input flagged as not
/// minimized when the vocabulary exceeds `cap`. Support counts of the input
/// minterms are re-attributed to the covering implicants.
pub fn simplify_capped(formula: &DnfFormula, cap: usize) -> Simplified {
    let k = formula.vocabulary().len();
    if k > cap.min(HARD_CAP) {
        return Simplified {
            formula: formula.clone(),
            minimized: false,
        };
    }
    let input_cubes: Vec<(Cube, u64)> = formula
        .minterms()
        .iter()
        .map(|(m, s)| (Cube::from_minterm(m), *s))
        .collect();

    let on_set: Vec<u32> = (0u32..1 << k)
        .filter(|&pattern| input_cubes.iter().any(|(c, _)| c.covers(pattern)))
        .collect();

    let vocab = formula.vocabulary().clone();
    if on_set.is_empty() {
        return Simplified {
            formula: DnfFormula::constant_false(vocab),
            minimized: true,
        };
    }
    let total_support: u64 = input_cubes.iter().map(|(_, s)| s).sum();
    if on_set.len() == 1 << k {
        let formula = DnfFormula::new(vocab, vec![(Minterm::true_minterm(), total_support)])
            .expect("true minterm is valid");
        return Simplified {
            formula,
            minimized: true,
        };
    }

    let primes = prime_implicants(&on_set, k);
    let cover = minimum_cover(&primes, &on_set);

    // Deterministic output order, then first-intersection support attribution.
    let mut chosen: Vec<Minterm> = cover.iter().map(|c| c.to_minterm(k)).collect();
    chosen.sort();
    let chosen_cubes: Vec<Cube> = chosen.iter().map(Cube::from_minterm).collect();
    let mut supports = vec![0u64; chosen.len()];
    for (cube, support) in &input_cubes {
        if let Some(slot) = chosen_cubes.iter().position(|c| c.intersects(cube)) {
            supports[slot] += support;
        }
    }
    let formula = DnfFormula::new(vocab, chosen.into_iter().zip(supports).collect())
        .expect("implicants come from the input vocabulary");
    Simplified {
        formula,
        minimized: true,
    }
}

/// Classic QM merge: combine same-care cubes differing in exactly one care
/// bit until no merge applies; unmerged cubes are the prime implicants.
fn prime_implicants(on_set: &[u32], k: usize) -> Vec<Cube> {
    let full = if k == 32 { u32::MAX } else { (1 << k) - 1 };
    let mut current: Vec<Cube> = on_set
        .iter()
        .map(|&pattern| Cube {
            values: pattern,
            cares: full,
        })
        .collect();
    let mut primes: Vec<Cube> = Vec::new();

    while !current.is_empty() {
        let mut merged_flags = vec![false; current.len()];
        let mut next: HashSet<Cube> = HashSet::new();
        for i in 0..current.len() {
            for j in (i + 1)..current.len() {
                let (a, b) = (current[i], current[j]);
                if a.cares != b.cares {
                    continue;
                }
                let diff = a.values ^ b.values;
                if diff.count_ones() == 1 {
                    merged_flags[i] = true;
                    merged_flags[j] = true;
                    next.insert(Cube {
                        values: a.values & !diff,
                        cares: a.cares & !diff,
                    });
                }
            }
        }
        for (cube, merged) in current.iter().zip(&merged_flags) {
            if !merged {
                primes.push(*cube);
            }
        }
        let mut next: Vec<Cube> = next.into_iter().collect();
        next.sort_by_key(|c| (c.cares, c.values));
        current = next;
    }
    primes.sort_by_key(|c| (c.cares, c.values));
    primes.dedup();
    primes
}

/// Essential primes first, then Petrick expansion over the leftover columns
/// with column dominance and product absorption keeping the blowup in check.
fn minimum_cover(primes: &[Cube], on_set: &[u32]) -> Vec<Cube> {
    let cover_sets: Vec<Vec<usize>> = on_set
        .iter()
        .map(|&pattern| {
            primes
                .iter()
                .enumerate()
                .filter(|(_, p)| p.covers(pattern))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    let mut selected: Vec<usize> = Vec::new();
    let mut uncovered: Vec<usize> = (0..on_set.len()).collect();

    // Iterated essential extraction.
    loop {
        let mut found = false;
        for &col in &uncovered {
            if cover_sets[col].len() == 1 {
                let p = cover_sets[col][0];
                if !selected.contains(&p) {
                    selected.push(p);
                    found = true;
                }
            }
        }
        if !found {
            break;
        }
        uncovered.retain(|&col| {
            !selected
                .iter()
                .any(|&p| primes[p].covers(on_set[col]))
        });
    }

    if !uncovered.is_empty() {
        // Column dominance: a column whose cover set contains another
        // column's cover set is satisfied for free.
        let mut reduced: Vec<usize> = Vec::new();
        'cols: for &a in &uncovered {
            for &b in &uncovered {
                if a != b
                    && is_superset(&cover_sets[a], &cover_sets[b])
                    && (cover_sets[a].len() > cover_sets[b].len() || b < a)
                {
                    continue 'cols;
                }
            }
            reduced.push(a);
        }

        // Petrick: expand the product of sums into minimal products.
        let mut products: Vec<Vec<usize>> = vec![vec![]];
        for &col in &reduced {
            let mut next: Vec<Vec<usize>> = Vec::new();
            multiply_products(&products, &cover_sets[col], &mut next);
            next.sort_by_key(|p| p.len());
            let mut kept: Vec<Vec<usize>> = Vec::new();
            'prod: for cand in next {
                for existing in &kept {
                    if existing.iter().all(|x| cand.contains(x)) {
                        continue 'prod;
                    }
                }
                kept.push(cand);
            }
            products = kept;
        }

        // Tie-break: fewest implicants, fewest literals, smallest index sequence.
        products.sort_by(|a, b| {
            let lits = |p: &Vec<usize>| -> u32 { p.iter().map(|&i| primes[i].literal_count()).sum() };
            a.len()
                .cmp(&b.len())
                .then(lits(a).cmp(&lits(b)))
                .then(a.cmp(b))
        });
        if let Some(best) = products.first() {
            for &p in best {
                if !selected.contains(&p) {
                    selected.push(p);
                }
            }
        }
    }

    selected.sort_unstable();
    selected.into_iter().map(|i| primes[i]).collect()
}

/// One Petrick multiplication step: products x sum-of-primes.
fn multiply_products(products: &[Vec<usize>], sum: &[usize], out: &mut Vec<Vec<usize>>) {
    for product in products {
        for &p in sum {
            if product.contains(&p) {
                out.push(product.clone());
            } else {
                let mut next = product.clone();
                next.push(p);
                next.sort_unstable();
                out.push(next);
            }
        }
    }
    out.sort();
    out.dedup();
}

fn is_superset(big: &[usize], small: &[usize]) -> bool {
    small.iter().all(|x| big.contains(x))
}
