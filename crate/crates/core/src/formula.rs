//! Propositional formulas: AST, evaluation, parsing and rendering.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! iff     := implies ( "<->" iff )?
//! implies := or ( "->" implies )?
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := "!" unary | "(" iff ")" | "true" | "false" | atom
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::logic::Signature;

/// A formula over some signature; atoms are positions in that signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Atom(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(f: Formula, g: Formula) -> Formula {
        Formula::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: Formula, g: Formula) -> Formula {
        Formula::Or(Box::new(f), Box::new(g))
    }

    pub fn implies(f: Formula, g: Formula) -> Formula {
        Formula::Implies(Box::new(f), Box::new(g))
    }

    pub fn iff(f: Formula, g: Formula) -> Formula {
        Formula::Iff(Box::new(f), Box::new(g))
    }

    /// Truth value in the state with the given index.
    pub fn eval(&self, state: usize) -> bool {
        match self {
            Formula::Top => true,
            Formula::Bottom => false,
            Formula::Atom(p) => state & (1 << p) != 0,
            Formula::Not(f) => !f.eval(state),
            Formula::And(f, g) => f.eval(state) && g.eval(state),
            Formula::Or(f, g) => f.eval(state) || g.eval(state),
            Formula::Implies(f, g) => !f.eval(state) || g.eval(state),
            Formula::Iff(f, g) => f.eval(state) == g.eval(state),
        }
    }

    /// Largest atom position mentioned, if any.
    pub fn max_atom(&self) -> Option<usize> {
        match self {
            Formula::Top | Formula::Bottom => None,
            Formula::Atom(p) => Some(*p),
            Formula::Not(f) => f.max_atom(),
            Formula::And(f, g)
            | Formula::Or(f, g)
            | Formula::Implies(f, g)
            | Formula::Iff(f, g) => f.max_atom().max(g.max_atom()),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => 0,
            Formula::Not(f) => 1 + f.depth(),
            Formula::And(f, g)
            | Formula::Or(f, g)
            | Formula::Implies(f, g)
            | Formula::Iff(f, g) => 1 + f.depth().max(g.depth()),
        }
    }

    /// Renders with the atom names of `sig` and minimal parentheses.
    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        Rendered { f: self, sig }
    }

    pub fn render(&self, sig: &Signature) -> String {
        self.display(sig).to_string()
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(_) => 5,
            Formula::Top | Formula::Bottom | Formula::Atom(_) => 6,
        }
    }
}

struct Rendered<'a> {
    f: &'a Formula,
    sig: &'a Signature,
}

impl Rendered<'_> {
    fn child(&self, f: &Formula, out: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let r = Rendered { f, sig: self.sig };
        if f.precedence() < min_prec {
            write!(out, "({r})")
        } else {
            write!(out, "{r}")
        }
    }

    fn binary(
        &self,
        out: &mut fmt::Formatter<'_>,
        f: &Formula,
        g: &Formula,
        op: &str,
        right_assoc: bool,
    ) -> fmt::Result {
        let p = self.f.precedence();
        let (lmin, rmin) = if right_assoc { (p + 1, p) } else { (p, p + 1) };
        self.child(f, out, lmin)?;
        write!(out, " {op} ")?;
        self.child(g, out, rmin)
    }
}

impl fmt::Display for Rendered<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.f {
            Formula::Top => out.write_str("true"),
            Formula::Bottom => out.write_str("false"),
            Formula::Atom(p) => match self.sig.atoms().get(*p) {
                Some(a) => out.write_str(a),
                None => write!(out, "#{p}"),
            },
            Formula::Not(f) => {
                out.write_str("!")?;
                self.child(f, out, 5)
            }
            Formula::And(f, g) => self.binary(out, f, g, "&", false),
            Formula::Or(f, g) => self.binary(out, f, g, "|", false),
            Formula::Implies(f, g) => self.binary(out, f, g, "->", true),
            Formula::Iff(f, g) => self.binary(out, f, g, "<->", true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Not => f.write_str("`!`"),
            Token::And => f.write_str("`&`"),
            Token::Or => f.write_str("`|`"),
            Token::Implies => f.write_str("`->`"),
            Token::Iff => f.write_str("`<->`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::End => f.write_str("end of input"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let col = i + 1;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'!' => out.push((Token::Not, col)),
            b'&' => out.push((Token::And, col)),
            b'|' => out.push((Token::Or, col)),
            b'(' => out.push((Token::LParen, col)),
            b')' => out.push((Token::RParen, col)),
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((Token::Implies, col));
                i += 1;
            }
            b'<' if text[i..].starts_with("<->") => {
                out.push((Token::Iff, col));
                i += 2;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Token::Ident(text[start..i].to_string()), col));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    column: col,
                    expected: "formula".into(),
                    found: format!("`{ch}`"),
                });
            }
        }
        i += 1;
    }
    out.push((Token::End, text.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    sig: &'a Signature,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn bump(&mut self) -> (Token, usize) {
        let t = self.tokens[self.pos].clone();
        if t.0 != Token::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> Error {
        let (tok, col) = &self.tokens[self.pos];
        Error::Syntax {
            column: *col,
            expected: expected.into(),
            found: tok.to_string(),
        }
    }

    fn iff(&mut self) -> Result<Formula> {
        let lhs = self.implies()?;
        if *self.peek() == Token::Iff {
            self.bump();
            Ok(Formula::iff(lhs, self.iff()?))
        } else {
            Ok(lhs)
        }
    }

    fn implies(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if *self.peek() == Token::Implies {
            self.bump();
            Ok(Formula::implies(lhs, self.implies()?))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while *self.peek() == Token::Or {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while *self.peek() == Token::And {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Token::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Token::LParen => {
                self.bump();
                let f = self.iff()?;
                if *self.peek() != Token::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(f)
            }
            Token::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "true" => Ok(Formula::Top),
                    "false" => Ok(Formula::Bottom),
                    _ => self
                        .sig
                        .position(&name)
                        .map(Formula::Atom)
                        .ok_or(Error::UnknownAtom(name)),
                }
            }
            _ => Err(self.unexpected("atom, constant, `!` or `(`")),
        }
    }
}

/// Parses `text` and binds its atoms to `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        sig,
    };
    let f = p.iff()?;
    if *p.peek() != Token::End {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Formula::*;

    fn sig(atoms: &[&str]) -> Signature {
        Signature::new(atoms.iter().copied()).unwrap()
    }

    #[test]
    fn parses_examples() {
        let sd = sig(&["sick", "diam"]);
        assert_eq!(
            parse_formula("!sick & diam", &sd).unwrap(),
            Formula::and(Formula::not(Atom(0)), Atom(1))
        );
        assert_eq!(
            parse_formula("sick & !diam", &sd).unwrap(),
            Formula::and(Atom(0), Formula::not(Atom(1)))
        );
        let es = sig(&["ear", "skin"]);
        assert_eq!(
            parse_formula("ear -> skin | true", &es).unwrap(),
            Formula::implies(Atom(0), Formula::or(Atom(1), Top))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let s = sig(&["a", "b", "c"]);
        let p = |t| parse_formula(t, &s).unwrap();
        assert_eq!(
            p("a | b & c"),
            Formula::or(Atom(0), Formula::and(Atom(1), Atom(2)))
        );
        assert_eq!(
            p("a & b & c"),
            Formula::and(Formula::and(Atom(0), Atom(1)), Atom(2))
        );
        assert_eq!(
            p("a -> b -> c"),
            Formula::implies(Atom(0), Formula::implies(Atom(1), Atom(2)))
        );
        assert_eq!(
            p("a <-> b <-> c"),
            Formula::iff(Atom(0), Formula::iff(Atom(1), Atom(2)))
        );
        assert_eq!(
            p("a <-> b -> c"),
            Formula::iff(Atom(0), Formula::implies(Atom(1), Atom(2)))
        );
        assert_eq!(p("!!a"), Formula::not(Formula::not(Atom(0))));
        assert_eq!(p("!(a | b)"), Formula::not(Formula::or(Atom(0), Atom(1))));
        assert_eq!(p("false"), Bottom);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let s = sig(&["a", "b"]);
        assert_eq!(
            parse_formula("a & ", &s),
            Err(Error::Syntax {
                column: 5,
                expected: "atom, constant, `!` or `(`".into(),
                found: "end of input".into()
            })
        );
        assert!(matches!(
            parse_formula("(a | b", &s),
            Err(Error::Syntax { column: 7, .. })
        ));
        assert!(matches!(
            parse_formula("a b", &s),
            Err(Error::Syntax { column: 3, .. })
        ));
        assert!(matches!(
            parse_formula("a # b", &s),
            Err(Error::Syntax { column: 3, .. })
        ));
        assert!(matches!(
            parse_formula("a - b", &s),
            Err(Error::Syntax { column: 3, .. })
        ));
        assert_eq!(
            parse_formula("a & c", &s),
            Err(Error::UnknownAtom("c".into()))
        );
    }

    #[test]
    fn renders_minimal_parentheses() {
        let s = sig(&["a", "b", "c"]);
        let r = |t| parse_formula(t, &s).unwrap().render(&s);
        assert_eq!(r("(a & b) | c"), "a & b | c");
        assert_eq!(r("a & (b | c)"), "a & (b | c)");
        assert_eq!(r("a | (b | c)"), "a | (b | c)");
        assert_eq!(r("(a | b) | c"), "a | b | c");
        assert_eq!(r("(a -> b) -> c"), "(a -> b) -> c");
        assert_eq!(r("a -> (b -> c)"), "a -> b -> c");
        assert_eq!(r("!(a & b)"), "!(a & b)");
        assert_eq!(r("!!a"), "!!a");
        assert_eq!(r("true <-> false"), "true <-> false");
    }

    #[test]
    fn evaluation() {
        let s = sig(&["sick", "diam"]);
        let f = parse_formula("sick & !diam", &s).unwrap();
        assert!(f.eval(1));
        assert!(!f.eval(3));
        assert!(Top.eval(0));
        assert!(parse_formula("!sick & diam", &s).unwrap().eval(2));
        assert!(parse_formula("sick -> diam", &s).unwrap().eval(0));
        assert!(!parse_formula("sick <-> diam", &s).unwrap().eval(2));
    }
}
