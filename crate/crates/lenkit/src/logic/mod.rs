//! Logic intermediate representation: evaluation, normal-form conversion,
//! minimization, parsing, and printing of concept formulas.

pub(crate) mod ast;
mod convert;
mod formula;
mod minimize;
mod parse;

pub use convert::{dnf_to_cnf, dnf_to_cnf_capped, or_cnf, DEFAULT_CNF_CAP};
pub use formula::{
    format_formula, Assignment, Clause, CnfFormula, DnfFormula, Formula, FormulaStyle, Literal,
    Minterm, Vocabulary,
};
pub use minimize::{simplify, simplify_capped, Simplified, DEFAULT_MINIMIZE_CAP};
pub use parse::parse_formula;
