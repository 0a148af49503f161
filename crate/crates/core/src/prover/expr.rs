//! Linear combinations of joint entropies and scalar parameters.
//!
//! Text syntax, one claim per line:
//!
//! ```text
//! H(W_1,S_2_1 | M_1) + 1/2 I(X;Y|Z) - 3*beta >= 2 H(M^2) - B_1
//! ```
//!
//! A claim `lhs >= rhs` (or `lhs <= rhs`) asserts that `lhs - rhs` is
//! nonnegative.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use num_traits::{One, Signed, Zero};

use super::universe::Universe;
use super::varset::VarSet;
use crate::bounds::{parse_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    /// Normalized storage per node.
    Alpha,
    /// Normalized repair bandwidth per helper.
    Beta,
    /// Normalized size of one level's message.
    Message(usize),
}

/// `Σ c_A H(A) + Σ c_s s`, with the empty set and zero coefficients dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Functional {
    entropy: BTreeMap<VarSet, Rational>,
    scalars: BTreeMap<Scalar, Rational>,
}

impl Functional {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `H(set)`.
    pub fn h(set: VarSet) -> Self {
        let mut f = Self::zero();
        f.add_entropy(set, Rational::one());
        f
    }

    /// `H(x | given)`.
    pub fn cond(x: VarSet, given: VarSet) -> Self {
        Self::h(x | given) - Self::h(given)
    }

    /// `I(a; b | given)`.
    pub fn mutual(a: VarSet, b: VarSet, given: VarSet) -> Self {
        Self::h(a | given) + Self::h(b | given) - Self::h(a | b | given) - Self::h(given)
    }

    pub fn scalar(s: Scalar) -> Self {
        let mut f = Self::zero();
        f.add_scalar(s, Rational::one());
        f
    }

    pub fn add_entropy(&mut self, set: VarSet, coeff: Rational) {
        if set.is_empty() || coeff.is_zero() {
            return;
        }
        let slot = self.entropy.entry(set).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.entropy.remove(&set);
        }
    }

    pub fn add_scalar(&mut self, s: Scalar, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.scalars.entry(s).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.scalars.remove(&s);
        }
    }

    pub fn scale(mut self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        for c in self.entropy.values_mut().chain(self.scalars.values_mut()) {
            *c *= factor;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.entropy.is_empty() && self.scalars.is_empty()
    }

    pub fn entropy_terms(&self) -> impl Iterator<Item = (VarSet, &Rational)> {
        self.entropy.iter().map(|(s, c)| (*s, c))
    }

    pub fn scalar_terms(&self) -> impl Iterator<Item = (Scalar, &Rational)> {
        self.scalars.iter().map(|(s, c)| (*s, c))
    }

    pub fn support(&self) -> VarSet {
        self.entropy.keys().fold(VarSet::EMPTY, |a, &b| a | b)
    }

    /// Re-keys every entropy term through `map`, merging collisions.
    pub fn map_sets(&self, map: impl Fn(VarSet) -> VarSet) -> Self {
        let mut out = Self { entropy: BTreeMap::new(), scalars: self.scalars.clone() };
        for (set, c) in &self.entropy {
            out.add_entropy(map(*set), c.clone());
        }
        out
    }

    pub fn display(&self, universe: &Universe) -> String {
        let mut out = String::new();
        let terms = self
            .entropy
            .iter()
            .map(|(s, c)| (format!("H({})", universe.describe(*s)), c))
            .chain(self.scalars.iter().map(|(s, c)| (scalar_name(*s), c)));
        for (i, (atom, c)) in terms.enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                let _ = write!(out, " {sign} ");
            }
            let mag = c.abs();
            if mag.is_one() {
                out.push_str(&atom);
            } else {
                let _ = write!(out, "{mag} {atom}");
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

pub fn scalar_name(s: Scalar) -> String {
    match s {
        Scalar::Alpha => "alpha".into(),
        Scalar::Beta => "beta".into(),
        Scalar::Message(k) => format!("B_{k}"),
    }
}

impl core::ops::Add for Functional {
    type Output = Functional;
    fn add(mut self, rhs: Functional) -> Functional {
        for (s, c) in rhs.entropy {
            self.add_entropy(s, c);
        }
        for (s, c) in rhs.scalars {
            self.add_scalar(s, c);
        }
        self
    }
}

impl core::ops::Neg for Functional {
    type Output = Functional;
    fn neg(self) -> Functional {
        self.scale(&-Rational::one())
    }
}

impl core::ops::Sub for Functional {
    type Output = Functional;
    fn sub(self, rhs: Functional) -> Functional {
        self + (-rhs)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    Number(String),
    Sym(&'static str),
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '^')
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Token::Number(chars[start..i].iter().collect()));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
            continue;
        }
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let sym = match two.as_str() {
            ">=" => Some(">="),
            "<=" => Some("<="),
            _ => None,
        };
        if let Some(s) = sym {
            out.push(Token::Sym(s));
            i += 2;
            continue;
        }
        let sym = match c {
            '+' => "+",
            '-' => "-",
            '*' => "*",
            '/' => "/",
            '(' => "(",
            ')' => ")",
            ',' => ",",
            '|' => "|",
            ';' => ";",
            _ => return Err(Error::Parse(format!("unexpected character {c:?}"))),
        };
        out.push(Token::Sym(sym));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    resolve: &'a dyn Fn(&str) -> Result<VarSet>,
    allow_scalars: bool,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Token::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{sym}' at token {}", self.pos)))
        }
    }

    fn sum(&mut self) -> Result<Functional> {
        let mut total = Functional::zero();
        let mut sign = Rational::one();
        if self.eat("-") {
            sign = -sign;
        } else {
            self.eat("+");
        }
        loop {
            total = total + self.term()?.scale(&sign);
            if self.eat("+") {
                sign = Rational::one();
            } else if self.eat("-") {
                sign = -Rational::one();
            } else {
                return Ok(total);
            }
        }
    }

    fn term(&mut self) -> Result<Functional> {
        let mut coeff = Rational::one();
        if let Some(Token::Number(num)) = self.peek().cloned() {
            self.pos += 1;
            let mut text = num;
            if self.eat("/") {
                match self.next() {
                    Some(Token::Number(den)) => text = format!("{text}/{den}"),
                    _ => return Err(Error::Parse("expected denominator".into())),
                }
            }
            coeff = parse_rational(&text)?;
            // a bare `0` stands for the empty sum
            if coeff.is_zero() && !matches!(self.peek(), Some(Token::Ident(_)) | Some(Token::Sym("*"))) {
                return Ok(Functional::zero());
            }
            self.eat("*");
        }
        Ok(self.atom()?.scale(&coeff))
    }

    fn set(&mut self) -> Result<VarSet> {
        let mut set = VarSet::EMPTY;
        loop {
            match self.next() {
                Some(Token::Ident(name)) => set |= (self.resolve)(&name)?,
                other => return Err(Error::Parse(format!("expected variable name, found {other:?}"))),
            }
            if !self.eat(",") {
                return Ok(set);
            }
        }
    }

    fn atom(&mut self) -> Result<Functional> {
        let name = match self.next() {
            Some(Token::Ident(name)) => name,
            other => return Err(Error::Parse(format!("expected term, found {other:?}"))),
        };
        match name.as_str() {
            "H" => {
                self.expect("(")?;
                let x = self.set()?;
                let given = if self.eat("|") { self.set()? } else { VarSet::EMPTY };
                self.expect(")")?;
                Ok(Functional::cond(x, given))
            }
            "I" => {
                self.expect("(")?;
                let a = self.set()?;
                self.expect(";")?;
                let b = self.set()?;
                let given = if self.eat("|") { self.set()? } else { VarSet::EMPTY };
                self.expect(")")?;
                Ok(Functional::mutual(a, b, given))
            }
            _ if self.allow_scalars => parse_scalar(&name)
                .map(Functional::scalar)
                .ok_or(Error::UnknownName(name)),
            _ => Err(Error::UnknownName(name)),
        }
    }
}

pub fn parse_scalar(name: &str) -> Option<Scalar> {
    match name {
        "alpha" => Some(Scalar::Alpha),
        "beta" => Some(Scalar::Beta),
        _ => {
            let k: usize = name.strip_prefix("B_")?.parse().ok()?;
            (k >= 1).then_some(Scalar::Message(k))
        }
    }
}

/// Parses a claim and returns `lhs - rhs`, which the claim asserts is nonnegative.
/// An expression without a relation is read as `expr >= 0`.
pub fn parse_claim(universe: &Universe, text: &str) -> Result<Functional> {
    let resolve = |name: &str| universe.resolve(name);
    parse_claim_with(&resolve, universe.is_standard(), text)
}

pub fn parse_claim_with(
    resolve: &dyn Fn(&str) -> Result<VarSet>,
    allow_scalars: bool,
    text: &str,
) -> Result<Functional> {
    let mut p = Parser { tokens: tokenize(text)?, pos: 0, resolve, allow_scalars };
    if p.tokens.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let lhs = p.sum()?;
    let out = if p.eat(">=") {
        lhs - p.sum()?
    } else if p.eat("<=") {
        p.sum()? - lhs
    } else {
        lhs
    };
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::rational;

    fn xyz() -> Universe {
        Universe::free(&["X", "Y", "Z"]).unwrap()
    }

    #[test]
    fn mutual_information_expands_to_four_terms() {
        let u = xyz();
        let f = parse_claim(&u, "I(X;Y|Z)").unwrap();
        let x = u.resolve("X").unwrap();
        let y = u.resolve("Y").unwrap();
        let z = u.resolve("Z").unwrap();
        assert_eq!(f, Functional::mutual(x, y, z));
        assert_eq!(f.entropy_terms().count(), 4);
    }

    #[test]
    fn relation_moves_everything_left() {
        let u = xyz();
        let a = parse_claim(&u, "H(X) + H(Y) >= H(X,Y)").unwrap();
        let b = parse_claim(&u, "H(X,Y) <= H(Y) + H(X)").unwrap();
        let c = parse_claim(&u, "I(X;Y)").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn coefficients_and_cancellation() {
        let u = xyz();
        let f = parse_claim(&u, "3/2 H(X) - 1/2*H(X) - H(X)").unwrap();
        assert!(f.is_zero());
        let g = parse_claim(&u, "-2 H(X|Y)").unwrap();
        let terms: Vec<_> = g.entropy_terms().map(|(_, c)| c.clone()).collect();
        assert_eq!(terms, [rational(2, 1), rational(-2, 1)]);
        assert_eq!(parse_claim(&u, "I(X;Y|Z) >= 0").unwrap(), parse_claim(&u, "I(X;Y|Z)").unwrap());
        assert!(parse_claim(&u, "0 >= 0").unwrap().is_zero());
    }

    #[test]
    fn composite_names_and_scalars() {
        let u = Universe::standard(3).unwrap();
        let f = parse_claim(&u, "alpha + 3 beta >= H(l^2 | M^2) + B_1").unwrap();
        assert_eq!(f.scalar_terms().count(), 3);
        let l2 = u.l_upto(2);
        assert_eq!(l2.len(), 5);
        assert!(f.support().is_subset(l2 | u.m_upto(2)));
    }

    #[test]
    fn parse_errors() {
        let u = xyz();
        for bad in ["", "H(X", "H(Q)", "alpha", "H(X) >= ", "H(X) H(Y)", "I(X,Y)", "H(X) # 1"] {
            assert!(parse_claim(&u, bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trip() {
        let u = xyz();
        let f = parse_claim(&u, "2 H(X|Y) - 1/3 H(Z)").unwrap();
        let text = f.display(&u);
        assert_eq!(parse_claim(&u, &text).unwrap(), f);
    }
}
