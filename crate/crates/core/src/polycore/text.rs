//! Canonical text form for polynomials and generator listings.
//!
//! A polynomial is written as a signed sum of terms `coef*var^e*...`, terms in
//! descending order under the active monomial order, unit coefficients
//! omitted. A listing is one polynomial per line; lines starting with `#` are
//! comments, and an optional `ring:` header names the variables.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Monomial, MonomialOrder, Poly, PolyError, Ring};

pub fn format_poly(p: &Poly, order: &MonomialOrder) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let ring = p.ring();
    let mut out = String::new();
    for (i, (m, c)) in p.sorted_terms(order).iter().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let a = c.abs();
        let mut parts: Vec<String> = Vec::new();
        if !a.is_one() || m.is_one() {
            parts.push(a.to_string());
        }
        for (v, &e) in m.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(ring.name(v).to_string()),
                _ => parts.push(format!("{}^{}", ring.name(v), e)),
            }
        }
        out.push_str(&parts.join("*"));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, PolyError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1
            }
            '/' => {
                toks.push(Tok::Slash);
                i += 1
            }
            '^' => {
                toks.push(Tok::Caret);
                i += 1
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                toks.push(Tok::Num(lit.parse().expect("digits")));
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => {
                return Err(PolyError::Parse(format!("unexpected character {other:?} at {i}")));
            }
        }
    }
    Ok(toks)
}

/// Parse a polynomial over `ring`.
pub fn parse_poly(s: &str, ring: &Arc<Ring>) -> Result<Poly, PolyError> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(PolyError::Parse("empty polynomial".into()));
    }
    let mut pos = 0;
    let mut out = Poly::zero(ring);
    let mut first = true;
    while pos < toks.len() {
        let mut sign = BigRational::one();
        match toks.get(pos) {
            Some(Tok::Plus) => pos += 1,
            Some(Tok::Minus) => {
                sign = -sign;
                pos += 1
            }
            _ if first => {}
            Some(t) => return Err(PolyError::Parse(format!("expected + or -, found {t:?}"))),
            None => unreachable!(),
        }
        first = false;
        let (m, c) = parse_term(&toks, &mut pos, ring)?;
        out.add_term(m, c * sign);
    }
    Ok(out)
}

fn parse_term(toks: &[Tok], pos: &mut usize, ring: &Arc<Ring>) -> Result<(Monomial, BigRational), PolyError> {
    let mut coef = BigRational::one();
    let mut mono = Monomial::one(ring.nvars());
    loop {
        match toks.get(*pos) {
            Some(Tok::Num(n)) => {
                *pos += 1;
                let mut value = BigRational::from_integer(n.clone());
                if toks.get(*pos) == Some(&Tok::Slash) {
                    *pos += 1;
                    match toks.get(*pos) {
                        Some(Tok::Num(d)) if !d.is_zero() => {
                            *pos += 1;
                            value /= BigRational::from_integer(d.clone());
                        }
                        _ => return Err(PolyError::Parse("bad denominator".into())),
                    }
                }
                coef *= value;
            }
            Some(Tok::Ident(name)) => {
                *pos += 1;
                let v = ring
                    .index_of(name)
                    .ok_or_else(|| PolyError::UnknownVariable(name.clone()))?;
                let mut e = 1u32;
                if toks.get(*pos) == Some(&Tok::Caret) {
                    *pos += 1;
                    match toks.get(*pos) {
                        Some(Tok::Num(n)) => {
                            *pos += 1;
                            e = u32::try_from(n).map_err(|_| PolyError::Parse("exponent too large".into()))?;
                        }
                        _ => return Err(PolyError::Parse("expected exponent".into())),
                    }
                }
                mono = mono.mul(&Monomial::var(ring.nvars(), v).with_exponent(v, e));
            }
            other => return Err(PolyError::Parse(format!("expected factor, found {other:?}"))),
        }
        if toks.get(*pos) == Some(&Tok::Star) {
            *pos += 1;
        } else {
            return Ok((mono, coef));
        }
    }
}

/// Render a generator listing: header comments, a `ring:` line, then one polynomial per line.
pub fn format_listing(polys: &[Poly], order: &MonomialOrder, header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    if let Some(p) = polys.first() {
        let _ = writeln!(out, "ring: {}", p.ring().vars().join(" "));
    }
    for p in polys {
        let _ = writeln!(out, "{}", format_poly(p, order));
    }
    out
}

/// Parse a listing produced by [`format_listing`]. The `ring:` header, when
/// present, must name a subset of `ring`'s variables.
pub fn parse_listing(s: &str, ring: &Arc<Ring>) -> Result<Vec<Poly>, PolyError> {
    let mut out = Vec::new();
    for line in s.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("ring:") {
            for name in rest.split_whitespace() {
                if ring.index_of(name).is_none() {
                    return Err(PolyError::UnknownVariable(name.to_string()));
                }
            }
            continue;
        }
        out.push(parse_poly(line, ring)?);
    }
    Ok(out)
}
