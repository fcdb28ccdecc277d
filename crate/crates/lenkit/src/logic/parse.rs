//! Parser for the formula text grammar.
//!
//! ```text
//! expr   := term ('|' term)*
//! term   := factor ('&' factor)*
//! factor := '~' factor | '(' expr ')' | 'true' | 'false' | identifier
//! ```
//!
//! Identifiers are `[A-Za-z_][A-Za-z0-9_]*` and must name a concept of the
//! supplied vocabulary. Precedence is `~` over `&` over `|`. The result is a
//! `DnfFormula` unless the expression is syntactically a conjunction of
//! disjunctions, in which case the CNF is preserved.

use crate::error::{Error, Result};
use crate::logic::ast::Ast;
use crate::logic::formula::{Clause, CnfFormula, Formula, Literal, Vocabulary};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Tilde,
    Amp,
    Pipe,
    LParen,
    RParen,
}

struct Lexer<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            text: text.as_bytes(),
            pos: 0,
        }
    }

    fn tokenize(mut self) -> Result<Vec<(Token, usize)>> {
        let mut tokens = Vec::new();
        while self.pos < self.text.len() {
            let start = self.pos;
            let byte = self.text[self.pos];
            match byte {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.pos += 1;
                }
                b'~' => {
                    tokens.push((Token::Tilde, start));
                    self.pos += 1;
                }
                b'&' => {
                    tokens.push((Token::Amp, start));
                    self.pos += 1;
                }
                b'|' => {
                    tokens.push((Token::Pipe, start));
                    self.pos += 1;
                }
                b'(' => {
                    tokens.push((Token::LParen, start));
                    self.pos += 1;
                }
                b')' => {
                    tokens.push((Token::RParen, start));
                    self.pos += 1;
                }
                b if b.is_ascii_alphabetic() || b == b'_' => {
                    while self.pos < self.text.len()
                        && (self.text[self.pos].is_ascii_alphanumeric()
                            || self.text[self.pos] == b'_')
                    {
                        self.pos += 1;
                    }
                    let ident = std::str::from_utf8(&self.text[start..self.pos])
                        .expect("ascii ident")
                        .to_string();
                    tokens.push((Token::Ident(ident), start));
                }
                other => {
                    return Err(Error::Parse {
                        position: start,
                        message: format!("unexpected character `{}`", other as char),
                    });
                }
            }
        }
        Ok(tokens)
    }
}

struct Parser<'v> {
    tokens: Vec<(Token, usize)>,
    cursor: usize,
    vocabulary: &'v Vocabulary,
    input_len: usize,
}

impl<'v> Parser<'v> {
    fn peek(&self) -> Option<&(Token, usize)> {
        self.tokens.get(self.cursor)
    }

    fn advance(&mut self) -> Option<(Token, usize)> {
        let tok = self.tokens.get(self.cursor).cloned();
        if tok.is_some() {
            self.cursor += 1;
        }
        tok
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.cursor)
            .map(|(_, p)| *p)
            .unwrap_or(self.input_len)
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut terms = vec![self.term()?];
        while matches!(self.peek(), Some((Token::Pipe, _))) {
            self.advance();
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Ast::Or(terms)
        })
    }

    fn term(&mut self) -> Result<Ast> {
        let mut factors = vec![self.factor()?];
        while matches!(self.peek(), Some((Token::Amp, _))) {
            self.advance();
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Ast::And(factors)
        })
    }

    fn factor(&mut self) -> Result<Ast> {
        let position = self.here();
        match self.advance() {
            Some((Token::Tilde, _)) => Ok(Ast::Not(Box::new(self.factor()?))),
            Some((Token::LParen, open_pos)) => {
                let inner = self.expr()?;
                match self.advance() {
                    Some((Token::RParen, _)) => Ok(inner),
                    _ => Err(Error::Parse {
                        position: open_pos,
                        message: "unclosed parenthesis".into(),
                    }),
                }
            }
            Some((Token::Ident(name), pos)) => match name.as_str() {
                "true" => Ok(Ast::True),
                "false" => Ok(Ast::False),
                _ => match self.vocabulary.index_of(&name) {
                    Some(index) => Ok(Ast::Lit(Literal::positive(index))),
                    None => Err(Error::Parse {
                        position: pos,
                        message: format!("unknown concept name `{name}`"),
                    }),
                },
            },
            Some((tok, pos)) => Err(Error::Parse {
                position: pos,
                message: format!("unexpected token {tok:?}"),
            }),
            None => Err(Error::Parse {
                position,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parses formula text over a vocabulary. See the module docs for the grammar.
pub fn parse_formula(text: &str, vocabulary: &Vocabulary) -> Result<Formula> {
    let tokens = Lexer::new(text).tokenize()?;
    if tokens.is_empty() {
        return Err(Error::Parse {
            position: 0,
            message: "empty formula".into(),
        });
    }
    let input_len = text.len();
    let mut parser = Parser {
        tokens,
        cursor: 0,
        vocabulary,
        input_len,
    };
    let ast = parser.expr()?;
    if let Some((tok, pos)) = parser.peek() {
        return Err(Error::Parse {
            position: *pos,
            message: format!("trailing input starting at {tok:?}"),
        });
    }
    let nnf = ast.to_nnf();
    if let Some(cnf) = try_cnf_shape(&nnf, vocabulary)? {
        return Ok(Formula::Cnf(cnf));
    }
    Ok(Formula::Dnf(nnf.to_dnf(vocabulary.clone(), 0)?))
}

fn as_literal(ast: &Ast) -> Option<Literal> {
    match ast {
        Ast::Lit(l) => Some(*l),
        _ => None,
    }
}

/// Detects a top-level AND with at least one disjunctive child: that shape
/// is kept as CNF instead of being distributed into DNF.
fn try_cnf_shape(nnf: &Ast, vocabulary: &Vocabulary) -> Result<Option<CnfFormula>> {
    let children = match nnf {
        Ast::And(children) => children,
        _ => return Ok(None),
    };
    let mut clauses = Vec::with_capacity(children.len());
    let mut saw_disjunction = false;
    for child in children {
        match child {
            Ast::Or(parts) => {
                let mut literals = Vec::with_capacity(parts.len());
                for part in parts {
                    match as_literal(part) {
                        Some(l) => literals.push(l),
                        None => return Ok(None),
                    }
                }
                saw_disjunction = true;
                clauses.push(Clause::new(literals));
            }
            Ast::Lit(l) => clauses.push(Clause::new(vec![*l])),
            _ => return Ok(None),
        }
    }
    if !saw_disjunction {
        // plain conjunction of literals reads as a single minterm
        return Ok(None);
    }
    Ok(Some(CnfFormula::new(vocabulary.clone(), clauses)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::formula::Assignment;

    fn vocab(names: &[&str]) -> Vocabulary {
        Vocabulary::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn parses_the_mnist_even_rule() {
        let v = vocab(&[
            "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
        ]);
        let parsed = parse_formula("~one & ~three & ~five & ~seven & ~nine", &v).unwrap();
        match parsed {
            Formula::Dnf(dnf) => {
                assert_eq!(dnf.minterms().len(), 1);
                assert_eq!(dnf.minterms()[0].0.len(), 5);
                assert_eq!(dnf.to_text(), "(~one & ~three & ~five & ~seven & ~nine)");
            }
            Formula::Cnf(_) => panic!("expected a minterm"),
        }
    }

    #[test]
    fn parses_constants() {
        let v = vocab(&["a"]);
        match parse_formula("true", &v).unwrap() {
            Formula::Dnf(f) => assert!(f.is_constant_true()),
            _ => panic!(),
        }
        match parse_formula("false", &v).unwrap() {
            Formula::Dnf(f) => assert!(f.is_constant_false()),
            _ => panic!(),
        }
    }

    #[test]
    fn unknown_concept_reports_position() {
        let v = vocab(&["a", "b"]);
        match parse_formula("a & bogus", &v) {
            Err(Error::Parse { position, message }) => {
                assert_eq!(position, 4);
                assert!(message.contains("bogus"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_position() {
        let v = vocab(&["a", "b"]);
        assert!(matches!(
            parse_formula("a &", &v),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_formula("(a | b", &v),
            Err(Error::Parse { position: 0, .. })
        ));
        assert!(matches!(
            parse_formula("a ^ b", &v),
            Err(Error::Parse { position: 2, .. })
        ));
    }

    #[test]
    fn cnf_shape_is_preserved() {
        let v = vocab(&["c1", "c2"]);
        match parse_formula("(c1 | c2) & (~c1 | ~c2)", &v).unwrap() {
            Formula::Cnf(cnf) => {
                assert_eq!(cnf.clauses().len(), 2);
                assert_eq!(cnf.to_text(), "(c1 | c2) & (~c1 | ~c2)");
            }
            Formula::Dnf(_) => panic!("expected CNF"),
        }
    }

    #[test]
    fn negated_group_is_normalized() {
        let v = vocab(&["a", "b"]);
        let parsed = parse_formula("~(a & b)", &v).unwrap();
        for assignment in Assignment::enumerate(2) {
            let expected = !(assignment.bit(0).unwrap() && assignment.bit(1).unwrap());
            assert_eq!(parsed.eval(&assignment).unwrap(), expected);
        }
    }

    #[test]
    fn round_trips_canonical_text() {
        let v = vocab(&["c1", "c2", "c3"]);
        let text = "(~c1 & c2) | (c1 & ~c2 & c3)";
        let parsed = parse_formula(text, &v).unwrap();
        assert_eq!(parsed.to_text(), text);
        let reparsed = parse_formula(&parsed.to_text(), &v).unwrap();
        assert_eq!(parsed, reparsed);
    }
}
