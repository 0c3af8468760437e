//! Text syntax for polynomials: integers, ring variables, `+ - * ^` and
//! parentheses. Juxtaposition multiplies (`2x`, `yz^2`), `^` binds tightest
//! and takes a nonnegative integer literal.

use std::sync::Arc;

use super::{PolyError, Polynomial, WeightedRing, MAX_EXPONENT};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax(position: usize, message: impl Into<String>) -> PolyError {
    PolyError::Syntax {
        position,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            Tok::Num(text[start..i].to_string())
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(text[start..i].to_string())
        } else {
            i += 1;
            match c {
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'^' => Tok::Caret,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                _ => {
                    let ch = text[start..].chars().next().unwrap();
                    return Err(syntax(start, format!("unexpected character `{ch}`")));
                }
            }
        };
        out.push(Token { tok, pos: start });
    }
    Ok(out)
}

/// Splits an identifier such as `yz` into ring variables. An exact match
/// wins; otherwise the longest variable name is tried first at each step.
fn split_identifier(ident: &str, ring: &WeightedRing) -> Option<Vec<usize>> {
    if let Some(i) = ring.var_index(ident) {
        return Some(vec![i]);
    }
    if ident.is_empty() {
        return Some(Vec::new());
    }
    let mut candidates: Vec<(usize, &str)> = ring
        .variables()
        .iter()
        .enumerate()
        .filter(|(_, v)| ident.starts_with(v.name.as_str()))
        .map(|(i, v)| (i, v.name.as_str()))
        .collect();
    candidates.sort_by_key(|(_, name)| std::cmp::Reverse(name.len()));
    for (i, name) in candidates {
        if let Some(mut rest) = split_identifier(&ident[name.len()..], ring) {
            rest.insert(0, i);
            return Some(rest);
        }
    }
    None
}

struct Parser<'a> {
    toks: Vec<Token>,
    i: usize,
    end: usize,
    ring: &'a Arc<WeightedRing>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|t| t.pos).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.i += 1;
                    acc = acc.try_add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.i += 1;
                    acc = acc.try_sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.i += 1;
                    acc = acc.try_mul(&self.unary()?)?;
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = acc.try_mul(&self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.i += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.i += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let (prefix, base) = self.atom()?;
        let powered = self.exponent(base)?;
        match prefix {
            Some(prefix) => prefix.try_mul(&powered),
            None => Ok(powered),
        }
    }

    fn exponent(&mut self, base: Polynomial) -> Result<Polynomial, PolyError> {
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.i += 1;
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(digits)) => {
                self.i += 1;
                let k: u64 = digits.parse().map_err(|_| PolyError::ExponentOverflow)?;
                if k > MAX_EXPONENT {
                    return Err(PolyError::ExponentOverflow);
                }
                base.pow(k)
            }
            _ => Err(syntax(pos, "expected integer exponent after `^`")),
        }
    }

    /// Returns the atom split as `(prefix, base)`: for a run of juxtaposed
    /// variables such as `yz`, a following `^` applies to the last one only.
    fn atom(&mut self) -> Result<(Option<Polynomial>, Polynomial), PolyError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(digits)) => {
                self.i += 1;
                let p = self.ring.prime() as u64;
                let c = digits
                    .bytes()
                    .fold(0u64, |acc, d| (acc * 10 + (d - b'0') as u64) % p);
                Ok((None, Polynomial::constant(self.ring.clone(), c)))
            }
            Some(Tok::Ident(name)) => {
                self.i += 1;
                let vars = split_identifier(&name, self.ring)
                    .ok_or_else(|| PolyError::UnknownVariable(name.clone()))?;
                let (&last, rest) = vars.split_last().expect("identifier is nonempty");
                let base = Polynomial::variable(self.ring.clone(), last);
                if rest.is_empty() {
                    return Ok((None, base));
                }
                let mut exps = vec![0u32; self.ring.nvars()];
                for &v in rest {
                    exps[v] += 1;
                }
                let prefix = Polynomial::monomial(self.ring.clone(), super::Monomial(exps), 1);
                Ok((Some(prefix), base))
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(syntax(self.pos(), "expected `)`"));
                }
                self.i += 1;
                Ok((None, inner))
            }
            Some(_) => Err(syntax(pos, "expected a number, variable or `(`")),
            None => Err(syntax(pos, "unexpected end of input")),
        }
    }
}

/// Parses `text` into a canonical polynomial over `ring`.
pub fn parse_poly(text: &str, ring: &Arc<WeightedRing>) -> Result<Polynomial, PolyError> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        i: 0,
        end: text.len(),
        ring,
    };
    let poly = parser.expr()?;
    if parser.i < parser.toks.len() {
        return Err(syntax(parser.pos(), "unexpected token"));
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wpoly::Monomial;

    fn ring(p: u64, names: &[&str]) -> Arc<WeightedRing> {
        Arc::new(WeightedRing::new(p, names.iter().map(|n| (*n, 1)), vec![]).unwrap())
    }

    #[test]
    fn ade_equations() {
        let r = ring(3, &["x", "y", "z"]);
        let f = parse_poly("x^2+y^2+z^2", &r).unwrap();
        assert_eq!(f.len(), 3);
        assert!(f.terms().iter().all(|&(_, c)| c == 1));

        let r5 = ring(5, &["x", "y", "z"]);
        let d5 = parse_poly("x^2+yz^2+y^4", &r5).unwrap();
        assert_eq!(d5.len(), 3);
        assert_eq!(d5.coefficient(&Monomial(vec![0, 1, 2])), 1);
        assert_eq!(
            parse_poly("xy^2z", &r5).unwrap(),
            parse_poly("x*y^2*z", &r5).unwrap()
        );
    }

    #[test]
    fn coefficient_reduction() {
        let r = ring(3, &["x"]);
        assert_eq!(
            parse_poly("3*x + x", &r).unwrap(),
            parse_poly("x", &r).unwrap()
        );
        assert_eq!(
            parse_poly("100000000000000000000000000000001 x", &r).unwrap(),
            parse_poly("2x", &r).unwrap()
        );
    }

    #[test]
    fn juxtaposition_and_unary_minus() {
        let r = ring(7, &["x", "y"]);
        assert_eq!(
            parse_poly("2x", &r).unwrap(),
            parse_poly("2*x", &r).unwrap()
        );
        assert_eq!(
            parse_poly("-x^2", &r).unwrap(),
            parse_poly("6*x^2", &r).unwrap()
        );
        assert_eq!(
            parse_poly("x*-y", &r).unwrap(),
            parse_poly("6xy", &r).unwrap()
        );
        assert_eq!(
            parse_poly("(x+y)(x-y)", &r).unwrap(),
            parse_poly("x^2 - y^2", &r).unwrap()
        );
        assert_eq!(
            parse_poly("  x  y ^ 2 ", &r).unwrap(),
            parse_poly("x*y^2", &r).unwrap()
        );
    }

    #[test]
    fn multi_letter_variables() {
        let r = ring(5, &["x1", "x2", "t"]);
        assert_eq!(
            parse_poly("x1x2 + t x1", &r).unwrap(),
            parse_poly("x1*x2 + t*x1", &r).unwrap()
        );
    }

    #[test]
    fn errors() {
        let r = ring(5, &["x", "y"]);
        assert_eq!(
            parse_poly("x + w", &r),
            Err(PolyError::UnknownVariable("w".into()))
        );
        assert!(matches!(
            parse_poly("x + ", &r),
            Err(PolyError::Syntax { position: 4, .. })
        ));
        assert!(matches!(
            parse_poly("x $ y", &r),
            Err(PolyError::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            parse_poly("(x + y", &r),
            Err(PolyError::Syntax { position: 6, .. })
        ));
        assert!(matches!(
            parse_poly("x^y", &r),
            Err(PolyError::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            parse_poly("x )", &r),
            Err(PolyError::Syntax { position: 2, .. })
        ));
        assert_eq!(
            parse_poly("x^99999999999999999999999", &r),
            Err(PolyError::ExponentOverflow)
        );
        assert_eq!(
            parse_poly("x^2147483648", &r),
            Err(PolyError::ExponentOverflow)
        );
        assert!(matches!(
            parse_poly("", &r),
            Err(PolyError::Syntax { position: 0, .. })
        ));
    }
}
