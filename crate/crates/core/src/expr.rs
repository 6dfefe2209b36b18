//! The shared expression grammar.
//!
//! ```text
//! expr   := ["+"|"-"] term (("+"|"-") term)*
//! term   := [rational] factor*        (at least one of the two)
//! factor := name ["^" k]
//! ```
//! Factors are juxtaposed and multiplied left to right, so `y2 y1` parses to
//! `-y1 y2`. Names may refer to generators or to aliases.

use std::collections::BTreeMap;

use num_traits::{One, Signed};

use crate::algebra::{Coeff, Element, GradedAlgebra};
use crate::error::DgaError;
use crate::rational::{fmt_q, parse_rational, Q};

pub type Aliases = BTreeMap<String, Element>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Num(Q),
    Name(String),
    Caret,
}

/// Parse error with a 1-based column inside the expression.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprError {
    pub col: usize,
    pub msg: String,
}

impl ExprError {
    /// Attaches a file position; `offset` is the column where the expression starts.
    pub fn at_line(self, line: usize, offset: usize) -> DgaError {
        DgaError::Parse { line, col: offset + self.col - 1, msg: self.msg }
    }
}

fn err(col: usize, msg: impl Into<String>) -> ExprError {
    ExprError { col, msg: msg.into() }
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            _ if c.is_whitespace() => i += 1,
            '+' => {
                out.push((col, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((col, Tok::Minus));
                i += 1;
            }
            '^' => {
                out.push((col, Tok::Caret));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = parse_rational(&s).ok_or_else(|| err(col, format!("malformed rational `{s}`")))?;
                out.push((col, Tok::Num(v)));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && is_name_char(chars[i]) {
                    i += 1;
                }
                out.push((col, Tok::Name(chars[start..i].iter().collect())));
            }
            _ => return Err(err(col, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

/// Parses `text` into an element of `alg`.
pub fn parse_expr(alg: &GradedAlgebra, aliases: &Aliases, text: &str) -> Result<Element, ExprError> {
    let toks = tokenize(text)?;
    let end_col = text.chars().count() + 1;
    let mut pos = 0;
    let mut total = Element::zero();
    if toks.is_empty() {
        return Err(err(1, "empty expression"));
    }
    let mut first = true;
    while pos < toks.len() {
        let mut sign = Q::one();
        match &toks[pos].1 {
            Tok::Plus => pos += 1,
            Tok::Minus => {
                sign = -sign;
                pos += 1;
            }
            _ if first => {}
            _ => return Err(err(toks[pos].0, "expected `+` or `-`")),
        }
        first = false;
        let term_col = toks.get(pos).map_or(end_col, |t| t.0);
        let mut term: Element = alg.unit();
        let mut seen = false;
        if let Some((_, Tok::Num(c))) = toks.get(pos) {
            sign *= c;
            pos += 1;
            seen = true;
        }
        while let Some((col, Tok::Name(name))) = toks.get(pos) {
            pos += 1;
            let base: Element = if let Some(g) = alg.index_of(name) {
                alg.generator_element(g)
            } else if let Some(a) = aliases.get(name) {
                a.clone()
            } else {
                return Err(err(*col, format!("unknown generator `{name}`")));
            };
            let mut k = 1u32;
            if let Some((ccol, Tok::Caret)) = toks.get(pos) {
                pos += 1;
                match toks.get(pos) {
                    Some((_, Tok::Num(n))) if n.is_integer() && !n.is_negative() => {
                        k = n.to_integer().try_into().map_err(|_| err(*ccol, "exponent too large"))?;
                        pos += 1;
                    }
                    _ => return Err(err(*ccol + 1, "expected a non-negative integer exponent")),
                }
            }
            term = alg.multiply(&term, &alg.power(&base, k));
            seen = true;
        }
        if !seen {
            return Err(err(term_col, "expected a coefficient or a factor"));
        }
        total.add_assign(&term.scale(&sign));
    }
    Ok(total)
}

/// Canonical rendering: terms in monomial order, lowest-terms coefficients.
pub fn format_element(alg: &GradedAlgebra, e: &Element) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (m, c)) in e.terms().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if m.is_one() {
            s.push_str(&fmt_q(&a));
        } else {
            if !a.is_one() {
                s.push_str(&fmt_q(&a));
                s.push(' ');
            }
            s.push_str(&alg.fmt_monomial(m));
        }
    }
    s
}

/// Rendering for elements with non-rational coefficients, e.g. `(a + b) x1`.
pub fn format_element_with<C: Coeff>(alg: &GradedAlgebra, e: &Element<C>, fc: impl Fn(&C) -> String) -> String {
    if e.is_zero() {
        return "0".into();
    }
    e.terms()
        .map(|(m, c)| format!("({}) {}", fc(c), alg.fmt_monomial(m)))
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Generator;

    fn alg() -> GradedAlgebra {
        GradedAlgebra::new(vec![
            Generator::new("x1", 2),
            Generator::new("x2", 4),
            Generator::new("y1", 9),
            Generator::new("y2", 11),
        ])
    }

    #[test]
    fn roundtrip_and_signs() {
        let a = alg();
        let e = parse_expr(&a, &Aliases::new(), "x2^4 y2 y1 - 3/2 x1^2 + 7").unwrap();
        assert_eq!(format_element(&a, &e), "7 - 3/2 x1^2 - x2^4 y1 y2");
        let back = parse_expr(&a, &Aliases::new(), &format_element(&a, &e)).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn aliases_and_zero() {
        let a = alg();
        let mut al = Aliases::new();
        al.insert("w".into(), parse_expr(&a, &al, "x1 y1").unwrap());
        let e = parse_expr(&a, &al, "x1 w - x1^2 y1").unwrap();
        assert!(e.is_zero());
        assert_eq!(format_element(&a, &e), "0");
        assert!(parse_expr(&a, &al, "y1^2").unwrap().is_zero());
    }

    #[test]
    fn errors_carry_columns() {
        let a = alg();
        let e = parse_expr(&a, &Aliases::new(), "x1 + q7").unwrap_err();
        assert_eq!(e.col, 6);
        assert!(parse_expr(&a, &Aliases::new(), "1/0 x1").is_err());
        assert!(parse_expr(&a, &Aliases::new(), "x1 x2 +").is_err());
        assert!(parse_expr(&a, &Aliases::new(), "x1^").is_err());
    }
}
