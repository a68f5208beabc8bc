//! Textual literals for group descriptors, elements, and generator words.
//!
//! ```text
//! element  := explicit | word
//! explicit := "base{" [entry ("," entry)*] "}" "top(" [int ("," int)*] ")"
//! entry    := xvec ":" belem
//! xvec     := int | "(" int ("," int)* ")"        bare int iff X has one coordinate
//! belem    := int | "(" int ("," int)* ")"        finitely generated B (bare iff rank 1)
//!           | "{" copy ":" belem ("," copy ":" belem)* "}"   countable direct sum
//! word     := term (("*" | "·" | " ") term)*
//! term     := name ["^" int]
//! ```
//!
//! Printing produces the canonical form, which parses back to the same
//! value.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::abelian::{AbelianDescriptor, AbelianElement, Coord, CyclicFactor};
use crate::wreath::{BaseMap, GroupDescriptor, WreathElement, XDescriptor, XElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at offset {offset}: {message}")]
pub struct LiteralError {
    pub offset: usize,
    pub message: String,
}

/// A word over named generators: `(generator index, exponent)` pairs.
pub type Word = Vec<(usize, BigInt)>;

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, LiteralError> {
        Err(LiteralError {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), LiteralError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(kw) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<BigInt, LiteralError> {
        self.skip_ws();
        let start = self.pos;
        let mut end = start;
        let bytes = self.src.as_bytes();
        if end < bytes.len() && (bytes[end] == b'-' || bytes[end] == b'+') {
            end += 1;
        }
        let digits = end;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end == digits {
            return self.err("expected integer");
        }
        self.pos = end;
        self.src[start..end]
            .trim_start_matches('+')
            .parse()
            .or_else(|_| self.err("bad integer"))
    }

    fn usize(&mut self) -> Result<usize, LiteralError> {
        let v = self.int()?;
        usize::try_from(v).or_else(|_| self.err("expected nonnegative index"))
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_alphanumeric() || c == '_' || (i > 0 && c == '\'')))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        if len == 0 || rest.starts_with(|c: char| c.is_ascii_digit()) {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    fn int_tuple(&mut self) -> Result<Vec<BigInt>, LiteralError> {
        self.expect('(')?;
        let mut out = Vec::new();
        if self.eat(')') {
            return Ok(out);
        }
        loop {
            out.push(self.int()?);
            if self.eat(')') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn finish(&mut self) -> Result<(), LiteralError> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }
}

fn int_vector(c: &mut Cursor<'_>, dim: usize) -> Result<Vec<BigInt>, LiteralError> {
    if c.peek() == Some('(') {
        let v = c.int_tuple()?;
        if v.len() != dim {
            return c.err(format!("expected {} coordinates, got {}", dim, v.len()));
        }
        Ok(v)
    } else if dim == 1 {
        Ok(vec![c.int()?])
    } else {
        c.err(format!("expected a {}-tuple", dim))
    }
}

fn format_int_vector(v: &[BigInt]) -> String {
    if v.len() == 1 {
        v[0].to_string()
    } else {
        let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

fn x_value(c: &mut Cursor<'_>, d: &XDescriptor) -> Result<XElement, LiteralError> {
    let v = int_vector(c, d.dim())?;
    d.element(v).or_else(|e| c.err(e.to_string()))
}

fn fg_vector(c: &mut Cursor<'_>, rank: usize) -> Result<Vec<BigInt>, LiteralError> {
    int_vector(c, rank)
}

fn abelian_value(c: &mut Cursor<'_>, d: &AbelianDescriptor) -> Result<AbelianElement, LiteralError> {
    let rank = d.rank();
    let mut pairs = Vec::new();
    if d.is_omega() {
        c.expect('{')?;
        if !c.eat('}') {
            loop {
                let copy = c.usize()?;
                c.expect(':')?;
                let v = fg_vector(c, rank)?;
                pairs.extend(v.into_iter().enumerate().map(|(i, x)| (Coord::new(copy, i), x)));
                if c.eat('}') {
                    break;
                }
                c.expect(',')?;
            }
        }
    } else {
        let v = fg_vector(c, rank)?;
        pairs.extend(v.into_iter().enumerate().map(|(i, x)| (Coord::fg(i), x)));
    }
    d.element(pairs).or_else(|e| c.err(e.to_string()))
}

fn base_value(c: &mut Cursor<'_>, d: &GroupDescriptor) -> Result<BaseMap, LiteralError> {
    if !c.eat_keyword("base") {
        return c.err("expected 'base'");
    }
    c.expect('{')?;
    let mut base = BaseMap::default();
    if !c.eat('}') {
        loop {
            let x = x_value(c, d.top_group())?;
            c.expect(':')?;
            let b = abelian_value(c, d.base_group())?;
            d.base_add_at(&mut base, &x, &BigInt::one(), &b);
            if c.eat('}') {
                break;
            }
            c.expect(',')?;
        }
    }
    Ok(base)
}

fn explicit_element(c: &mut Cursor<'_>, d: &GroupDescriptor) -> Result<WreathElement, LiteralError> {
    let base = base_value(c, d)?;
    if !c.eat_keyword("top") {
        return c.err("expected 'top'");
    }
    let v = c.int_tuple()?;
    let top = d.top_group().element(v).or_else(|e| c.err(e.to_string()))?;
    Ok(WreathElement { base, top })
}

fn word_value(c: &mut Cursor<'_>, names: &[String]) -> Result<Word, LiteralError> {
    let mut word = Vec::new();
    loop {
        if c.peek().is_none() {
            break;
        }
        let start = c.pos;
        let name = match c.ident() {
            Some(n) => n,
            None => return c.err("expected generator name"),
        };
        let idx = match names.iter().position(|n| n == name) {
            Some(i) => Some(i),
            None if name == "e" => None,
            None => {
                c.pos = start;
                return c.err(format!("unknown generator '{}'", name));
            }
        };
        let exp = if c.eat('^') { c.int()? } else { BigInt::one() };
        if let Some(i) = idx {
            if !exp.is_zero() {
                word.push((i, exp));
            }
        }
        if !(c.eat('*') || c.eat('·') || c.eat('.')) && c.peek().is_none() {
            break;
        }
    }
    if word.is_empty() && c.pos == 0 {
        return c.err("empty word");
    }
    Ok(word)
}

/// Parses an explicit element literal.
pub fn parse_element(d: &GroupDescriptor, s: &str) -> Result<WreathElement, LiteralError> {
    parse_element_with(d, &[], s)
}

/// Parses an explicit literal or a word over `gens` (`e` is the identity
/// unless a generator has that name).
pub fn parse_element_with(
    d: &GroupDescriptor,
    gens: &[(String, WreathElement)],
    s: &str,
) -> Result<WreathElement, LiteralError> {
    let mut c = Cursor::new(s);
    c.skip_ws();
    if c.rest().starts_with("base") && !gens.iter().any(|(n, _)| n.starts_with("base")) {
        let g = explicit_element(&mut c, d)?;
        c.finish()?;
        return Ok(g);
    }
    let names: Vec<String> = gens.iter().map(|(n, _)| n.clone()).collect();
    let word = word_value(&mut c, &names)?;
    c.finish()?;
    Ok(evaluate_word(d, gens, &word))
}

pub fn evaluate_word(d: &GroupDescriptor, gens: &[(String, WreathElement)], word: &Word) -> WreathElement {
    word.iter().fold(d.identity(), |acc, (i, e)| {
        d.mul(&acc, &d.power(&gens[*i].1, e))
    })
}

/// Parses a bare `base{...}` literal.
pub fn parse_base(d: &GroupDescriptor, s: &str) -> Result<BaseMap, LiteralError> {
    let mut c = Cursor::new(s);
    let b = base_value(&mut c, d)?;
    c.finish()?;
    Ok(b)
}

pub fn parse_word(names: &[String], s: &str) -> Result<Word, LiteralError> {
    let mut c = Cursor::new(s);
    let w = word_value(&mut c, names)?;
    c.finish()?;
    Ok(w)
}

/// `b·b`, `t^-1·b`; the empty word prints as `e`.
pub fn format_word(names: &[String], word: &Word) -> String {
    if word.is_empty() {
        return "e".into();
    }
    word.iter()
        .map(|(i, e)| {
            if e.is_one() {
                names[*i].clone()
            } else {
                format!("{}^{}", names[*i], e)
            }
        })
        .collect::<Vec<_>>()
        .join("·")
}

pub fn parse_x(d: &XDescriptor, s: &str) -> Result<XElement, LiteralError> {
    let mut c = Cursor::new(s);
    let x = x_value(&mut c, d)?;
    c.finish()?;
    Ok(x)
}

/// Parses an X literal at the start of `s`, returning it with the number of
/// bytes consumed.
pub(crate) fn parse_x_prefix(d: &XDescriptor, s: &str) -> Result<(XElement, usize), LiteralError> {
    let mut c = Cursor::new(s);
    let x = x_value(&mut c, d)?;
    Ok((x, c.pos))
}

pub(crate) fn parse_abelian_prefix(
    d: &AbelianDescriptor,
    s: &str,
) -> Result<(AbelianElement, usize), LiteralError> {
    let mut c = Cursor::new(s);
    let a = abelian_value(&mut c, d)?;
    Ok((a, c.pos))
}

pub fn format_x(x: &XElement) -> String {
    format_int_vector(x.coords())
}

pub fn parse_abelian(d: &AbelianDescriptor, s: &str) -> Result<AbelianElement, LiteralError> {
    let mut c = Cursor::new(s);
    let a = abelian_value(&mut c, d)?;
    c.finish()?;
    Ok(a)
}

pub fn format_abelian(d: &AbelianDescriptor, a: &AbelianElement) -> String {
    if d.is_omega() {
        let rank = d.rank();
        let mut copies: std::collections::BTreeMap<usize, Vec<BigInt>> = Default::default();
        for (c, v) in a.iter() {
            copies
                .entry(c.copy)
                .or_insert_with(|| vec![BigInt::zero(); rank])[c.inner] = v.clone();
        }
        let parts: Vec<String> = copies
            .iter()
            .map(|(k, v)| format!("{}:{}", k, format_int_vector(v)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    } else {
        format_int_vector(&d.to_vector(a, 0))
    }
}

pub fn format_base(d: &GroupDescriptor, b: &BaseMap) -> String {
    let parts: Vec<String> = b
        .iter()
        .map(|(x, v)| format!("{}:{}", format_x(x), format_abelian(d.base_group(), v)))
        .collect();
    format!("base{{{}}}", parts.join(", "))
}

pub fn format_element(d: &GroupDescriptor, g: &WreathElement) -> String {
    let top: Vec<String> = g.top.coords().iter().map(|x| x.to_string()).collect();
    format!("{} top({})", format_base(d, &g.base), top.join(","))
}

fn factor_list(c: &mut Cursor<'_>) -> Result<Vec<CyclicFactor>, LiteralError> {
    let mut out = Vec::new();
    loop {
        if !c.eat('Z') {
            return c.err("expected 'Z' or 'Z/n'");
        }
        if c.eat('/') {
            let n = c.int()?;
            let n = n
                .to_biguint()
                .filter(|n| !n.is_zero())
                .map_or_else(|| c.err("modulus must be positive"), Ok)?;
            out.push(CyclicFactor::new(n));
        } else {
            out.push(CyclicFactor::integers());
        }
        if !c.eat(',') {
            return Ok(out);
        }
    }
}

/// `Z`, `Z/2`, `Z, Z/3`, `omega(Z)`, `omega(Z, Z/2)`.
pub fn parse_abelian_descriptor(s: &str) -> Result<AbelianDescriptor, LiteralError> {
    let mut c = Cursor::new(s);
    let d = if c.eat_keyword("omega") {
        c.expect('(')?;
        let f = factor_list(&mut c)?;
        c.expect(')')?;
        AbelianDescriptor::finite(f).and_then(AbelianDescriptor::omega)
    } else {
        let f = factor_list(&mut c)?;
        AbelianDescriptor::finite(f)
    };
    let d = d.or_else(|e| c.err(e.to_string()))?;
    c.finish()?;
    Ok(d)
}

pub fn parse_x_descriptor(s: &str) -> Result<XDescriptor, LiteralError> {
    let a = parse_abelian_descriptor(s)?;
    XDescriptor::from_abelian(&a).map_err(|e| LiteralError {
        offset: 0,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zwrz() -> GroupDescriptor {
        GroupDescriptor::new(AbelianDescriptor::free(1), XDescriptor::free(1))
    }

    #[test]
    fn explicit_round_trip() {
        let d = zwrz();
        let g = parse_element(&d, "base{ 0 : 2 , -1: 3 } top( 5 )").unwrap();
        let s = format_element(&d, &g);
        assert_eq!(s, "base{-1:3, 0:2} top(5)");
        assert_eq!(parse_element(&d, &s).unwrap(), g);
        assert_eq!(format_element(&d, &d.identity()), "base{} top(0)");
    }

    #[test]
    fn omega_literals() {
        let d = GroupDescriptor::new(
            AbelianDescriptor::omega(AbelianDescriptor::free(1)).unwrap(),
            XDescriptor::cyclic(2),
        );
        let g = parse_element(&d, "base{0:{0:2, 1:5}, 1:{2:7}} top(1)").unwrap();
        assert_eq!(format_element(&d, &g), "base{0:{0:2, 1:5}, 1:{2:7}} top(1)");
        let t = parse_element(&d, "base{} top(3)").unwrap();
        assert_eq!(t.top, d.top_group().from_ints(&[1]).unwrap());
    }

    #[test]
    fn words() {
        let d = zwrz();
        let gens = vec![
            ("b".to_string(), parse_element(&d, "base{0:1} top(0)").unwrap()),
            ("t".to_string(), parse_element(&d, "base{} top(1)").unwrap()),
        ];
        let bb = parse_element_with(&d, &gens, "b·b").unwrap();
        assert_eq!(bb, parse_element(&d, "base{0:2} top(0)").unwrap());
        assert_eq!(parse_element_with(&d, &gens, "b^2").unwrap(), bb);
        assert_eq!(parse_element_with(&d, &gens, "b b").unwrap(), bb);
        assert_eq!(parse_element_with(&d, &gens, "t*t^-1").unwrap(), d.identity());
        assert_eq!(parse_element_with(&d, &gens, "e").unwrap(), d.identity());
        assert!(parse_element_with(&d, &gens, "q").is_err());
        let names: Vec<String> = gens.iter().map(|g| g.0.clone()).collect();
        let w = parse_word(&names, "b·t^-1").unwrap();
        assert_eq!(format_word(&names, &w), "b·t^-1");
    }

    #[test]
    fn descriptors() {
        assert_eq!(parse_abelian_descriptor("Z").unwrap(), AbelianDescriptor::free(1));
        assert_eq!(parse_abelian_descriptor("Z/2").unwrap(), AbelianDescriptor::cyclic(2));
        let o = parse_abelian_descriptor("omega(Z, Z/3)").unwrap();
        assert!(o.is_omega());
        assert_eq!(o.rank(), 2);
        assert_eq!(parse_x_descriptor("Z, Z").unwrap(), XDescriptor::free(2));
        assert!(parse_x_descriptor("Z/2, Z").is_err());
        assert!(parse_abelian_descriptor("Q").is_err());
    }

    #[test]
    fn rejects_garbage() {
        let d = zwrz();
        assert!(parse_element(&d, "base{0:1} top(1) extra").is_err());
        assert!(parse_element(&d, "base{(0,1):1} top(0)").is_err());
        assert!(parse_element(&d, "base{0:1} top(0,1)").is_err());
    }
}
