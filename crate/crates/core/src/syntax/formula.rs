//! Object-language formulas and sequents.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sequent := imp "|-" imp
//! imp     := lat ("<-" lat)* ("->" imp)?
//! lat     := fus (("&" | "|") fus)*
//! fus     := atom ("*" atom)*
//! atom    := ident | "top" | "bot" | "t" | "(" imp ")"
//! ```
//!
//! `->` associates to the right, the other binary connectives to the left.
//! Unicode aliases: ⊤ ⊥ ∧ ∨ → ⊸ ← ⟜ ∘ ⊢.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(String),
    Top,
    Bot,
    /// the truth constant t
    Unit,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// φ -> ψ
    Imp(Box<Formula>, Box<Formula>),
    /// ψ <- φ, stored as (ψ, φ)
    LImp(Box<Formula>, Box<Formula>),
    Fuse(Box<Formula>, Box<Formula>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub lhs: Formula,
    pub rhs: Formula,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_string())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    /// `b <- a`
    pub fn limp(b: Formula, a: Formula) -> Formula {
        Formula::LImp(Box::new(b), Box::new(a))
    }

    pub fn fuse(a: Formula, b: Formula) -> Formula {
        Formula::Fuse(Box::new(a), Box::new(b))
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Formula::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Formula::Top | Formula::Bot | Formula::Unit => {}
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Imp(a, b)
            | Formula::LImp(a, b)
            | Formula::Fuse(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Top | Formula::Bot | Formula::Unit => 0,
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Imp(a, b)
            | Formula::LImp(a, b)
            | Formula::Fuse(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn uses_residuated_ops(&self) -> bool {
        match self {
            Formula::Fuse(..) | Formula::LImp(..) => true,
            Formula::Var(_) | Formula::Top | Formula::Bot | Formula::Unit => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.uses_residuated_ops() || b.uses_residuated_ops()
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Imp(..) | Formula::LImp(..) => 1,
            Formula::And(..) | Formula::Or(..) => 2,
            Formula::Fuse(..) => 3,
            _ => 4,
        }
    }
}

impl Sequent {
    pub fn new(lhs: Formula, rhs: Formula) -> Sequent {
        Sequent { lhs, rhs }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut v = self.lhs.vars();
        for w in self.rhs.vars() {
            if !v.contains(&w) {
                v.push(w);
            }
        }
        v
    }
}

fn wrap(f: &Formula, paren: bool, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if paren {
        write!(out, "({f})")
    } else {
        write!(out, "{f}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.prec();
        match self {
            Formula::Var(v) => f.write_str(v),
            Formula::Top => f.write_str("top"),
            Formula::Bot => f.write_str("bot"),
            Formula::Unit => f.write_str("t"),
            Formula::Imp(a, b) => {
                wrap(a, a.prec() <= p, f)?;
                f.write_str(" -> ")?;
                wrap(b, b.prec() < p || matches!(**b, Formula::LImp(..)), f)
            }
            Formula::LImp(b, a) => {
                wrap(b, b.prec() < p || matches!(**b, Formula::Imp(..)), f)?;
                f.write_str(" <- ")?;
                wrap(a, a.prec() <= p, f)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Fuse(a, b) => {
                let op = match self {
                    Formula::And(..) => " & ",
                    Formula::Or(..) => " | ",
                    _ => " * ",
                };
                wrap(a, a.prec() < p, f)?;
                f.write_str(op)?;
                wrap(b, b.prec() <= p, f)
            }
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    And,
    Or,
    Imp,
    LImp,
    Fuse,
    Turnstile,
    Top,
    Bot,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let next = chars.get(i + 1).map(|&(_, c)| c);
        let single = |t| Some((t, 1));
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '&' | '∧' => single(Tok::And),
            '*' | '∘' => single(Tok::Fuse),
            '→' | '⊸' => single(Tok::Imp),
            '←' | '⟜' => single(Tok::LImp),
            '⊢' => single(Tok::Turnstile),
            '⊤' => single(Tok::Top),
            '⊥' => single(Tok::Bot),
            '∨' => single(Tok::Or),
            '|' if next == Some('-') => Some((Tok::Turnstile, 2)),
            '|' => single(Tok::Or),
            '-' if next == Some('>') => Some((Tok::Imp, 2)),
            '<' if next == Some('-') => Some((Tok::LImp, 2)),
            c if c.is_alphanumeric() || c == '_' => {
                let mut j = i;
                let mut name = String::new();
                while j < chars.len() && (chars[j].1.is_alphanumeric() || chars[j].1 == '_') {
                    name.push(chars[j].1);
                    j += 1;
                }
                if !name.chars().next().unwrap().is_alphabetic() {
                    return Err(ParseError { pos, msg: format!("identifier `{name}` must start with a letter") });
                }
                let len = j - i;
                let tok = match name.as_str() {
                    "top" => Tok::Top,
                    "bot" => Tok::Bot,
                    _ => Tok::Ident(name),
                };
                Some((tok, len))
            }
            _ => None,
        };
        let (tok, len) = tok.ok_or_else(|| ParseError { pos, msg: format!("unexpected character `{c}`") })?;
        out.push((pos, tok));
        i += len;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.lat()?;
        while self.eat(&Tok::LImp) {
            let rhs = self.lat()?;
            acc = Formula::limp(acc, rhs);
        }
        if self.eat(&Tok::Imp) {
            let rhs = self.imp()?;
            acc = Formula::imp(acc, rhs);
        }
        Ok(acc)
    }

    fn lat(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.fus()?;
        loop {
            if self.eat(&Tok::And) {
                acc = Formula::and(acc, self.fus()?);
            } else if self.eat(&Tok::Or) {
                acc = Formula::or(acc, self.fus()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn fus(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.atom()?;
        while self.eat(&Tok::Fuse) {
            acc = Formula::fuse(acc, self.atom()?);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.err("unexpected end of input"),
        };
        self.at += 1;
        match tok {
            Tok::Top => Ok(Formula::Top),
            Tok::Bot => Ok(Formula::Bot),
            Tok::Ident(name) if name == "t" => Ok(Formula::Unit),
            Tok::Ident(name) => {
                if name.chars().next().unwrap().is_uppercase() {
                    self.at -= 1;
                    return self.err(format!("object variables are lowercase, got `{name}`"));
                }
                Ok(Formula::Var(name))
            }
            Tok::LParen => {
                let inner = self.imp()?;
                if !self.eat(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                Ok(inner)
            }
            other => {
                self.at -= 1;
                self.err(format!("unexpected token {other:?}"))
            }
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at < self.toks.len() {
            self.err(format!("trailing input {:?}", self.toks[self.at].1))
        } else {
            Ok(())
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0, end: text.len() };
    let f = p.imp()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0, end: text.len() };
    let lhs = p.imp()?;
    if !p.eat(&Tok::Turnstile) {
        return p.err("expected `|-`");
    }
    let rhs = p.imp()?;
    p.finish()?;
    Ok(Sequent { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse_formula("p1 -> p1").unwrap(), Formula::imp(v("p1"), v("p1")));
        assert_eq!(
            parse_formula("p -> q -> r").unwrap(),
            Formula::imp(v("p"), Formula::imp(v("q"), v("r")))
        );
        assert_eq!(
            parse_formula("p & q * r -> s").unwrap(),
            Formula::imp(Formula::and(v("p"), Formula::fuse(v("q"), v("r"))), v("s"))
        );
        assert_eq!(
            parse_formula("a <- b <- c").unwrap(),
            Formula::limp(Formula::limp(v("a"), v("b")), v("c"))
        );
    }

    #[test]
    fn sequents() {
        let s = parse_sequent("p1 * (p2 * p3) |- (p1 * p2) * p3").unwrap();
        assert_eq!(s.lhs, Formula::fuse(v("p1"), Formula::fuse(v("p2"), v("p3"))));
        assert_eq!(s.rhs, Formula::fuse(Formula::fuse(v("p1"), v("p2")), v("p3")));
        let u = parse_sequent("p |- t -> p").unwrap();
        assert_eq!(u.rhs, Formula::imp(Formula::Unit, v("p")));
        assert_eq!(parse_sequent("p ⊢ t ⊸ p").unwrap(), u);
    }

    #[test]
    fn printer_round_trips() {
        for s in ["p1 -> p2", "(p -> q) -> r", "p * (q * r)", "(a <- b) -> c", "a <- (b -> c)", "p & (q | r)", "top * t"] {
            let f = parse_formula(s).unwrap();
            assert_eq!(f.to_string(), s);
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_formula("p -> ").unwrap_err();
        assert_eq!(e.pos, 5);
        assert!(parse_formula("p $ q").is_err());
        assert!(parse_sequent("p q").is_err());
    }
}
