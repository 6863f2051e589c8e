//! Truncated elements of the universal Novikov ring.
//!
//! An element is a finite sum `Σ aᵢ T^{λᵢ} e^{μᵢ}` with rational coefficients,
//! rational `T`-exponents and integer `e`-exponents, together with a truncation
//! level: every term with `T`-exponent at or above the level is unknown and
//! has been discarded. Exact elements carry level `+∞`.
//!
//! Precision follows the absolute model used for p-adic numbers: the product
//! of `x + O(T^a)` and `y + O(T^b)` is known modulo
//! `T^{min(a + v(y), b + v(x))}`, and an inverse loses twice the valuation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{fmt_q, parse_q, serde_q, Extended, Valuation, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NovikovError {
    #[error("division by zero")]
    ZeroDivision,
    #[error("inverse of a non-monomial element needs a finite truncation level")]
    PrecisionExhausted,
    #[error("leading T-power has several e-graded terms; collapse the e-grading first")]
    MixedLeadingTerm,
    #[error("cannot parse Novikov element `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

/// One monomial `coeff · T^t · e^e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "serde_q")]
    pub coeff: Q,
    #[serde(with = "serde_q")]
    pub t: Q,
    #[serde(default)]
    pub e: i64,
}

impl Term {
    pub fn new(coeff: Q, t: Q, e: i64) -> Self {
        Term { coeff, t, e }
    }

    fn key_cmp(&self, other: &Term) -> std::cmp::Ordering {
        self.t.cmp(&other.t).then(self.e.cmp(&other.e))
    }
}

/// A truncated Novikov ring element in canonical form.
///
/// Terms are strictly increasing in `(t, e)`, coefficients are nonzero and
/// every `t` lies below `trunc`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NovikovElement {
    terms: Vec<Term>,
    trunc: Extended,
}

impl NovikovElement {
    pub fn zero() -> Self {
        NovikovElement { terms: Vec::new(), trunc: Extended::Infinity }
    }

    pub fn one() -> Self {
        Self::monomial(Q::one(), Q::zero(), 0)
    }

    /// `coeff · T^t · e^e`, exact.
    pub fn monomial(coeff: Q, t: Q, e: i64) -> Self {
        Self::from_terms(vec![Term::new(coeff, t, e)], Extended::Infinity)
    }

    /// `T^t`, exact.
    pub fn t_power(t: Q) -> Self {
        Self::monomial(Q::one(), t, 0)
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, Q::zero(), 0)
    }

    /// Builds the canonical form: sorts, merges equal keys, drops zero
    /// coefficients and terms at or beyond `trunc`.
    pub fn from_terms(mut terms: Vec<Term>, trunc: Extended) -> Self {
        terms.retain(|t| !t.coeff.is_zero() && trunc.exceeds(&t.t));
        terms.sort_by(|a, b| a.key_cmp(b));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for term in terms {
            match merged.last_mut() {
                Some(last) if last.t == term.t && last.e == term.e => last.coeff += term.coeff,
                _ => merged.push(term),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        NovikovElement { terms: merged, trunc }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn trunc(&self) -> &Extended {
        &self.trunc
    }

    /// Zero as far as the known terms go (the element may still be a
    /// nonzero series hidden beyond `trunc`).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_infinite()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    /// Smallest `T`-exponent, `+∞` for zero.
    pub fn valuation(&self) -> Valuation {
        match self.terms.first() {
            Some(t) => Extended::Finite(t.t.clone()),
            None => Extended::Infinity,
        }
    }

    /// Valuation, or the truncation level when no term is known. This is the
    /// best certified lower bound for the valuation of the true element.
    fn valuation_bound(&self) -> Extended {
        self.valuation().min(self.trunc.clone())
    }

    /// Membership in `Λ_{0,nov}`: all known exponents nonnegative.
    pub fn in_lambda0(&self) -> bool {
        self.terms.first().is_none_or(|t| !t.t.is_negative())
    }

    /// Membership in the maximal ideal `Λ⁺_{0,nov}`.
    pub fn in_lambda_plus(&self) -> bool {
        self.terms.first().is_none_or(|t| t.t.is_positive())
    }

    /// Lowers the truncation level to `level` (never raises it).
    pub fn truncated(&self, level: &Extended) -> Self {
        let trunc = self.trunc.clone().min(level.clone());
        let terms = self.terms.iter().filter(|t| trunc.exceeds(&t.t)).cloned().collect();
        NovikovElement { terms, trunc }
    }

    /// Forgets the truncation: the known terms are taken as an exact element.
    pub fn into_exact(self) -> Self {
        NovikovElement { terms: self.terms, trunc: Extended::Infinity }
    }

    /// Sets every `e`-exponent to 0 (the ungraded specialisation `e = 1`).
    pub fn collapse_e(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term::new(t.coeff.clone(), t.t.clone(), 0))
            .collect();
        Self::from_terms(terms, self.trunc.clone())
    }

    pub fn scale(&self, c: &Q) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term::new(&t.coeff * c, t.t.clone(), t.e))
            .collect();
        Self::from_terms(terms, self.trunc.clone())
    }

    /// Multiplies by `T^t e^e` (exact shift, keeps relative precision).
    pub fn shift(&self, t: &Q, e: i64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|term| Term::new(term.coeff.clone(), &term.t + t, term.e + e))
            .collect();
        NovikovElement { terms, trunc: self.trunc.add_q(t) }
    }

    /// Equality of the two elements modulo the coarser truncation level.
    pub fn eq_up_to_trunc(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }

    /// Multiplicative inverse in the field `Λ_nov`.
    ///
    /// Computed by long division against the leading term; the result is
    /// known modulo `T^{trunc − 2v}`.
    pub fn invert(&self) -> Result<Self, NovikovError> {
        let lead = self.terms.first().ok_or(NovikovError::ZeroDivision)?;
        if self.terms.len() > 1 && self.terms[1].t == lead.t {
            return Err(NovikovError::MixedLeadingTerm);
        }
        let v = lead.t.clone();
        let level = self.trunc.sub_q(&(&v + &v));
        if self.terms.len() == 1 {
            let inv = Term::new(Q::one() / &lead.coeff, -&v, -lead.e);
            return Ok(Self::from_terms(vec![inv], level));
        }
        let Extended::Finite(bound) = &level else {
            return Err(NovikovError::PrecisionExhausted);
        };
        let one = [Term::new(Q::one(), Q::zero(), 0)];
        Ok(Self::from_terms(long_divide(&one, &self.terms, bound), level))
    }

    /// Quotient `x / y`; lies in `Λ_{0,nov}` iff `v(x) ≥ v(y)`.
    pub fn divide_exact(&self, divisor: &Self) -> Result<Self, NovikovError> {
        let lead = divisor.terms.first().ok_or(NovikovError::ZeroDivision)?;
        if divisor.terms.len() > 1 && divisor.terms[1].t == lead.t {
            return Err(NovikovError::MixedLeadingTerm);
        }
        if self.is_zero() {
            let level = match (&self.trunc, divisor.valuation_bound()) {
                (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a - b),
                _ => Extended::Infinity,
            };
            return Ok(NovikovElement { terms: Vec::new(), trunc: level });
        }
        if divisor.terms.len() == 1 {
            return Ok(self * &divisor.invert()?);
        }
        let v = &lead.t;
        let level = self
            .trunc
            .sub_q(v)
            .min((&divisor.trunc + &self.valuation_bound()).sub_q(&(v + v)));
        let Extended::Finite(bound) = &level else {
            return Err(NovikovError::PrecisionExhausted);
        };
        Ok(Self::from_terms(long_divide(&self.terms, &divisor.terms, bound), level))
    }

    /// Canonical text form, e.g. `"2*T(3/2)*e(-1) + T(2) + O(T(4))"`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, term) in self.terms.iter().enumerate() {
            let negative = term.coeff.is_negative();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let magnitude = term.coeff.abs();
            let mut factors: Vec<String> = Vec::new();
            let bare = term.t.is_zero() && term.e == 0;
            if !magnitude.is_one() || bare {
                factors.push(fmt_q(&magnitude));
            }
            if !term.t.is_zero() {
                factors.push(format!("T({})", fmt_q(&term.t)));
            }
            if term.e != 0 {
                factors.push(format!("e({})", term.e));
            }
            out.push_str(&factors.join("*"));
        }
        if let Extended::Finite(level) = &self.trunc {
            if out.is_empty() {
                out = format!("O(T({}))", fmt_q(level));
            } else {
                out.push_str(&format!(" + O(T({}))", fmt_q(level)));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl Default for NovikovElement {
    fn default() -> Self {
        Self::zero()
    }
}

/// Quotient terms of `num / den` with `T`-exponent below `level`.
///
/// `den` must be canonical with a single leading term.
fn long_divide(num: &[Term], den: &[Term], level: &Q) -> Vec<Term> {
    let lead = &den[0];
    let cap = level + &lead.t;
    let mut rem: BTreeMap<(Q, i64), Q> = BTreeMap::new();
    for term in num.iter().filter(|t| t.t < cap) {
        *rem.entry((term.t.clone(), term.e)).or_insert_with(Q::zero) += &term.coeff;
    }
    let mut quotient = Vec::new();
    while let Some(((t, e), c)) = rem.pop_first() {
        if t >= cap {
            break;
        }
        if c.is_zero() {
            continue;
        }
        let q = Term::new(c / &lead.coeff, &t - &lead.t, e - lead.e);
        for b in &den[1..] {
            let key_t = &q.t + &b.t;
            if key_t >= cap {
                break;
            }
            let slot = rem.entry((key_t, q.e + b.e)).or_insert_with(Q::zero);
            *slot -= &q.coeff * &b.coeff;
        }
        quotient.push(q);
    }
    quotient
}

impl Add for &NovikovElement {
    type Output = NovikovElement;

    fn add(self, rhs: &NovikovElement) -> NovikovElement {
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        NovikovElement::from_terms(terms, self.trunc.clone().min(rhs.trunc.clone()))
    }
}

impl Sub for &NovikovElement {
    type Output = NovikovElement;

    fn sub(self, rhs: &NovikovElement) -> NovikovElement {
        self + &(-rhs)
    }
}

impl Neg for &NovikovElement {
    type Output = NovikovElement;

    fn neg(self) -> NovikovElement {
        NovikovElement {
            terms: self.terms.iter().map(|t| Term::new(-&t.coeff, t.t.clone(), t.e)).collect(),
            trunc: self.trunc.clone(),
        }
    }
}

impl Mul for &NovikovElement {
    type Output = NovikovElement;

    fn mul(self, rhs: &NovikovElement) -> NovikovElement {
        let level = (&self.trunc + &rhs.valuation_bound()).min(&rhs.trunc + &self.valuation_bound());
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                let t = &a.t + &b.t;
                if !level.exceeds(&t) {
                    break;
                }
                terms.push(Term::new(&a.coeff * &b.coeff, t, a.e + b.e));
            }
        }
        NovikovElement::from_terms(terms, level)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for NovikovElement {
            type Output = NovikovElement;
            fn $m(self, rhs: NovikovElement) -> NovikovElement {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for NovikovElement {
    type Output = NovikovElement;
    fn neg(self) -> NovikovElement {
        -&self
    }
}

impl fmt::Display for NovikovElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

// ---------------------------------------------------------------------------
// Text parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    T,
    E,
    O,
    LParen,
    RParen,
    Star,
    Caret,
    Plus,
    Minus,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            'T' => {
                out.push(Tok::T);
                i += 1
            }
            'e' => {
                out.push(Tok::E);
                i += 1
            }
            'O' => {
                out.push(Tok::O);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' | '−' => {
                out.push(Tok::Minus);
                i += 1
            }
            d if d.is_ascii_digit() || d == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                out.push(Tok::Num(chars[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(out)
}

struct TextParser {
    toks: Vec<Tok>,
    pos: usize,
}

impl TextParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), String> {
        match self.next() {
            Some(t) if t == tok => Ok(()),
            other => Err(format!("expected {tok:?}, found {other:?}")),
        }
    }

    fn signed_number(&mut self) -> Result<Q, String> {
        let mut negative = false;
        loop {
            match self.peek() {
                Some(Tok::Minus) => {
                    negative = !negative;
                    self.pos += 1;
                }
                Some(Tok::Plus) => self.pos += 1,
                _ => break,
            }
        }
        match self.next() {
            Some(Tok::Num(n)) => {
                let q = parse_q(&n).map_err(|e| e.to_string())?;
                Ok(if negative { -q } else { q })
            }
            other => Err(format!("expected a number, found {other:?}")),
        }
    }

    fn exponent(&mut self) -> Result<Q, String> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let q = self.signed_number()?;
                self.expect(Tok::RParen)?;
                Ok(q)
            }
            Some(Tok::Caret) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) {
                    self.exponent()
                } else {
                    self.signed_number()
                }
            }
            _ => Ok(Q::one()),
        }
    }

    /// Parses a product of factors, or an `O(T(..))` truncation marker.
    fn piece(&mut self) -> Result<Piece, String> {
        if self.peek() == Some(&Tok::O) {
            self.pos += 1;
            self.expect(Tok::LParen)?;
            self.expect(Tok::T)?;
            let level = self.exponent()?;
            self.expect(Tok::RParen)?;
            return Ok(Piece::Trunc(level));
        }
        let mut term = Term::new(Q::one(), Q::zero(), 0);
        let mut first = true;
        loop {
            match self.peek() {
                Some(Tok::Num(_)) => {
                    let c = self.signed_number()?;
                    term.coeff *= c;
                }
                Some(Tok::T) => {
                    self.pos += 1;
                    term.t += self.exponent()?;
                }
                Some(Tok::E) => {
                    self.pos += 1;
                    let e = self.exponent()?;
                    if !e.is_integer() {
                        return Err("e-exponent must be an integer".into());
                    }
                    let e: i64 = e
                        .to_integer()
                        .try_into()
                        .map_err(|_| "e-exponent out of range".to_string())?;
                    term.e += e;
                }
                other if first => return Err(format!("expected a term, found {other:?}")),
                _ => break,
            }
            first = false;
            match self.peek() {
                Some(Tok::Star) => self.pos += 1,
                Some(Tok::Num(_) | Tok::T | Tok::E) => {}
                _ => break,
            }
        }
        Ok(Piece::Term(term))
    }
}

enum Piece {
    Term(Term),
    Trunc(Q),
}

impl FromStr for NovikovElement {
    type Err = NovikovError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = |reason: String| NovikovError::Parse { input: s.to_string(), reason };
        let toks = tokenize(s).map_err(fail)?;
        let mut parser = TextParser { toks, pos: 0 };
        let mut terms = Vec::new();
        let mut trunc = Extended::Infinity;
        let mut sign = Q::one();
        if parser.peek() == Some(&Tok::Minus) {
            parser.pos += 1;
            sign = -sign;
        } else if parser.peek() == Some(&Tok::Plus) {
            parser.pos += 1;
        }
        loop {
            match parser.piece().map_err(fail)? {
                Piece::Term(mut term) => {
                    term.coeff *= &sign;
                    terms.push(term);
                }
                Piece::Trunc(level) => trunc = trunc.min(Extended::Finite(level)),
            }
            match parser.next() {
                None => break,
                Some(Tok::Plus) => sign = Q::one(),
                Some(Tok::Minus) => sign = -Q::one(),
                Some(other) => return Err(fail(format!("unexpected token {other:?}"))),
            }
        }
        Ok(NovikovElement::from_terms(terms, trunc))
    }
}

// ---------------------------------------------------------------------------
// JSON: a list of {coeff, t, e}; truncated elements use {terms, trunc}.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TruncatedRepr {
    terms: Vec<Term>,
    trunc: Extended,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyRepr {
    List(Vec<Term>),
    Truncated(TruncatedRepr),
    Text(String),
}

impl Serialize for NovikovElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.trunc.is_infinite() {
            self.terms.serialize(s)
        } else {
            TruncatedRepr { terms: self.terms.clone(), trunc: self.trunc.clone() }.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for NovikovElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match AnyRepr::deserialize(d)? {
            AnyRepr::List(terms) => Ok(NovikovElement::from_terms(terms, Extended::Infinity)),
            AnyRepr::Truncated(r) => Ok(NovikovElement::from_terms(r.terms, r.trunc)),
            AnyRepr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn n(s: &str) -> NovikovElement {
        s.parse().unwrap()
    }

    fn fin(x: Q) -> Extended {
        Extended::Finite(x)
    }

    #[test]
    fn addition_cancels_and_merges() {
        assert_eq!(&n("T(1) + T(2)") + &n("-T(1)"), n("T(2)"));
        assert_eq!(&n("T(1) + T(2)") + &NovikovElement::zero(), n("T(1) + T(2)"));
        assert_eq!(&n("2*T(1/2)") + &n("3*T(1/2)"), n("5*T(1/2)"));
    }

    #[test]
    fn multiplication_adds_exponents_and_truncates() {
        assert_eq!(&n("T(2)") * &n("T(3/2)"), n("T(7/2)"));
        let x = n("1 - T(1)").truncated(&fin(qi(3)));
        let y = n("1 + T(1) + T(2)").truncated(&fin(qi(3)));
        let prod = &x * &y;
        assert_eq!(prod.terms(), NovikovElement::one().terms());
        assert_eq!(prod.trunc(), &fin(qi(3)));
        assert_eq!(&n("e(1)") * &n("e(-1)"), NovikovElement::one());
    }

    #[test]
    fn valuation_is_smallest_exponent() {
        assert_eq!(n("T(2) - T(3)").valuation(), fin(qi(2)));
        assert_eq!(NovikovElement::zero().valuation(), Extended::Infinity);
        assert_eq!(n("5 + T(1/3)").valuation(), fin(qi(0)));
    }

    #[test]
    fn inversion() {
        assert_eq!(n("T(5/2)").invert().unwrap(), n("T(-5/2)"));
        assert_eq!(n("2").invert().unwrap(), n("1/2"));
        let inv = n("1 - T(1) + O(T(3))").invert().unwrap();
        assert_eq!(inv, n("1 + T(1) + T(2) + O(T(3))"));
        assert_eq!(NovikovElement::zero().invert(), Err(NovikovError::ZeroDivision));
        assert_eq!(n("1 - T(1)").invert(), Err(NovikovError::PrecisionExhausted));
        assert_eq!(n("1 + e(1)").invert(), Err(NovikovError::MixedLeadingTerm));
    }

    #[test]
    fn inverse_of_shifted_unit_keeps_relative_precision() {
        // T^2 (1 - T) known mod T^6 has inverse T^-2 (1 + T + T^2 + T^3) known mod T^2
        let x = n("T(2) - T(3) + O(T(6))");
        let inv = x.invert().unwrap();
        assert_eq!(inv, n("T(-2) + T(-1) + 1 + T(1) + O(T(2))"));
    }

    #[test]
    fn exact_division() {
        assert_eq!(n("T(3) - T(4)").divide_exact(&n("T(3)")).unwrap(), n("1 - T(1)"));
        // (T^S - T^{λ-S}) / T^S with S = 2, λ = 5
        assert_eq!(n("T(2) - T(3)").divide_exact(&n("T(2)")).unwrap(), n("1 - T(1)"));
        let x = n("T(1/2) + 3*T(2) + O(T(5))");
        let one = x.divide_exact(&x).unwrap();
        assert_eq!(one.terms(), NovikovElement::one().terms());
        assert_eq!(x.divide_exact(&NovikovElement::zero()), Err(NovikovError::ZeroDivision));
    }

    #[test]
    fn membership() {
        assert!(n("1 + T(1)").in_lambda0());
        assert!(!n("1 + T(1)").in_lambda_plus());
        assert!(n("T(1/2)").in_lambda_plus());
        assert!(!n("T(-1)").in_lambda0());
        assert!(NovikovElement::zero().in_lambda_plus());
    }

    #[test]
    fn text_form_round_trips() {
        for s in [
            "2*T(3/2)*e(-1) + T(2)",
            "0",
            "1",
            "-1/2 + T(1/3)",
            "-3*e(2) - T(1)",
            "1 + T(1) + O(T(3))",
            "O(T(7/2))",
        ] {
            assert_eq!(n(s).to_text(), s);
        }
        assert_eq!(n("T^2 + 2 T^(1/2)").to_text(), "2*T(1/2) + T(2)");
        assert_eq!(n("T").to_text(), "T(1)");
        assert!("2*X".parse::<NovikovElement>().is_err());
        assert!("T(".parse::<NovikovElement>().is_err());
    }

    #[test]
    fn json_form_round_trips() {
        let x = n("2*T(3/2)*e(-1) + T(2)");
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"[{"coeff":"2","t":"3/2","e":-1},{"coeff":"1","t":"2","e":0}]"#);
        assert_eq!(serde_json::from_str::<NovikovElement>(&json).unwrap(), x);
        let y = n("1 - T(1) + O(T(3))");
        let json = serde_json::to_string(&y).unwrap();
        assert_eq!(serde_json::from_str::<NovikovElement>(&json).unwrap(), y);
        let z: NovikovElement = serde_json::from_str(r#""T(1/2) - 1""#).unwrap();
        assert_eq!(z, n("-1 + T(1/2)"));
    }

    #[test]
    fn collapse_merges_graded_terms() {
        assert_eq!(n("T(1)*e(1) + T(1)*e(-1)").collapse_e(), n("2*T(1)"));
    }

    #[test]
    fn shift_moves_truncation() {
        let x = n("1 + T(1) + O(T(2))").shift(&q(1, 2), 1);
        assert_eq!(x, n("T(1/2)*e(1) + T(3/2)*e(1) + O(T(5/2))"));
    }
}
