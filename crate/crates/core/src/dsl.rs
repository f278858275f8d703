//! Textual DSL for set expressions, chain presentations, and point
//! descriptors. The grammar is LL(1)-simple; see docs/dsl.md in the
//! workspace root.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ambient::{Ambient, Element};
use crate::chain::ChainPresentation;
use crate::family::Family;
use crate::setexpr::SetExpr;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("parse error at byte {position}: {message}")]
    At { position: usize, message: String },
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::At {
        position,
        message: message.into(),
    })
}

/// Parse a set expression: combinators `|` (union), `&` (intersection),
/// `!` (complement), `g>A` / `g<A` (translate by g / by g inverse),
/// primitives `full`, `ep:o,p,{r,...}`, `fs:g,...`, `fp:g,...`,
/// `fin:{g,...}`, `dil:k,A`, and parentheses.
pub fn parse_set(am: Ambient, input: &str) -> Result<SetExpr, ParseError> {
    let mut p = Parser {
        am,
        src: input.as_bytes(),
        pos: 0,
    };
    let expr = p.union()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return err(p.pos, "trailing input");
    }
    Ok(expr)
}

struct Parser<'a> {
    am: Ambient,
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn union(&mut self) -> Result<SetExpr, ParseError> {
        let mut expr = self.inter()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'|') {
                self.pos += 1;
                let rhs = self.inter()?;
                expr = SetExpr::union(expr, rhs);
            } else {
                return Ok(expr);
            }
        }
    }

    fn inter(&mut self) -> Result<SetExpr, ParseError> {
        let mut expr = self.atom()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'&') {
                self.pos += 1;
                let rhs = self.atom()?;
                expr = SetExpr::intersection(expr, rhs);
            } else {
                return Ok(expr);
            }
        }
    }

    fn atom(&mut self) -> Result<SetExpr, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => err(self.pos, "expected a set expression"),
            Some(b'!') => {
                self.pos += 1;
                Ok(SetExpr::complement(self.atom()?))
            }
            Some(b'(') => {
                // Either a parenthesized set or a pair element translate.
                let close = self.matching_paren()?;
                let after = self.src.get(close + 1).copied();
                if after == Some(b'>') || after == Some(b'<') {
                    let text = std::str::from_utf8(&self.src[self.pos..=close]).unwrap();
                    let element = self.parse_element(text)?;
                    self.pos = close + 2;
                    let base = self.atom()?;
                    Ok(self.translate(element, after == Some(b'<'), base))
                } else {
                    self.pos += 1;
                    let inner = self.union()?;
                    self.skip_ws();
                    if self.peek() != Some(b')') {
                        return err(self.pos, "expected ')'");
                    }
                    self.pos += 1;
                    Ok(inner)
                }
            }
            Some(_) => {
                // A bare element translate `g>A` / `g<A` is recognized when
                // '>' or '<' appears before any structural character.
                let start = self.pos;
                let mut i = self.pos;
                while i < self.src.len() {
                    match self.src[i] {
                        b'>' | b'<' => {
                            let text =
                                std::str::from_utf8(&self.src[start..i]).unwrap().trim();
                            if text.contains(':') || text.contains('{') {
                                break;
                            }
                            let element = self.parse_element(text)?;
                            let inverse = self.src[i] == b'<';
                            self.pos = i + 1;
                            let base = self.atom()?;
                            return Ok(self.translate(element, inverse, base));
                        }
                        b'&' | b'|' | b'!' | b'(' | b')' => break,
                        _ => i += 1,
                    }
                }
                self.primitive()
            }
        }
    }

    fn translate(&self, by: Element, inverse: bool, base: SetExpr) -> SetExpr {
        if inverse {
            SetExpr::translate_inv(by, base)
        } else {
            SetExpr::translate(by, base)
        }
    }

    fn matching_paren(&self) -> Result<usize, ParseError> {
        let mut depth = 0;
        for i in self.pos..self.src.len() {
            match self.src[i] {
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(i);
                    }
                }
                _ => {}
            }
        }
        err(self.pos, "unbalanced parentheses")
    }

    fn parse_element(&self, text: &str) -> Result<Element, ParseError> {
        self.am
            .parse_element(text)
            .map_err(|e| ParseError::At {
                position: self.pos,
                message: e.to_string(),
            })
    }

    fn take_while(&mut self, pred: impl Fn(u8) -> bool) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() && pred(self.src[self.pos]) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn primitive(&mut self) -> Result<SetExpr, ParseError> {
        let start = self.pos;
        let head = self.take_while(|c| c.is_ascii_alphanumeric());
        match head {
            "full" => Ok(SetExpr::Full),
            "ep" => {
                self.expect(b':')?;
                let offset = self.number()? as u64;
                self.expect(b',')?;
                let period = self.number()? as u64;
                if period == 0 {
                    return err(self.pos, "period must be positive");
                }
                self.expect(b',')?;
                let residues = self.residue_set(period)?;
                if !matches!(self.am, Ambient::N0 | Ambient::Z) {
                    return err(start, "ep sets are defined over N0/Z only");
                }
                Ok(SetExpr::ep(offset, period, residues))
            }
            "fs" | "fp" => {
                self.expect(b':')?;
                let items = self.element_list()?;
                if items.is_empty() {
                    return err(start, "generator list must be nonempty");
                }
                Ok(if head == "fs" {
                    SetExpr::fs_gen(items)
                } else {
                    SetExpr::fp_gen(items)
                })
            }
            "fin" => {
                self.expect(b':')?;
                self.expect(b'{')?;
                let items = self.element_list()?;
                self.expect(b'}')?;
                if items.is_empty() {
                    return err(start, "empty finite set disallowed");
                }
                Ok(SetExpr::finite(items))
            }
            "dil" => {
                self.expect(b':')?;
                let factor = self.number()? as u64;
                if factor == 0 {
                    return err(self.pos, "dilation factor must be positive");
                }
                self.expect(b',')?;
                let base = self.atom()?;
                Ok(SetExpr::dilation(factor, base))
            }
            other => err(start, format!("unknown set primitive `{other}`")),
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            err(self.pos, format!("expected '{}'", c as char))
        }
    }

    fn number(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        let _ = self.take_while(|c| c.is_ascii_digit());
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse()
            .map_err(|_| ParseError::At {
                position: start,
                message: "expected a number".into(),
            })
    }

    fn residue_set(&mut self, period: u64) -> Result<BTreeSet<u64>, ParseError> {
        self.expect(b'{')?;
        let mut out = BTreeSet::new();
        loop {
            self.skip_ws();
            if self.peek() == Some(b'}') {
                self.pos += 1;
                return Ok(out);
            }
            let n = self.number()?;
            if n < 0 || n as u64 >= period {
                return err(self.pos, format!("residue {n} outside [0, {period})"));
            }
            out.insert(n as u64);
            self.skip_ws();
            if self.peek() == Some(b',') {
                self.pos += 1;
            }
        }
    }

    /// Comma-separated elements, respecting parentheses (Z2 pairs).
    fn element_list(&mut self) -> Result<Vec<Element>, ParseError> {
        let mut out = Vec::new();
        let mut depth = 0;
        let mut start = self.pos;
        let mut i = self.pos;
        loop {
            let c = self.src.get(i).copied();
            match c {
                Some(b'(') => {
                    depth += 1;
                    i += 1;
                }
                Some(b')') if depth > 0 => {
                    depth -= 1;
                    i += 1;
                }
                Some(b',') if depth == 0 => {
                    let text = std::str::from_utf8(&self.src[start..i]).unwrap().trim();
                    if !text.is_empty() {
                        out.push(self.parse_element(text)?);
                    }
                    i += 1;
                    start = i;
                }
                Some(b'}') | Some(b')') | Some(b'&') | Some(b'|') | None => {
                    let text = std::str::from_utf8(&self.src[start..i]).unwrap().trim();
                    if !text.is_empty() {
                        out.push(self.parse_element(text)?);
                    }
                    self.pos = i;
                    return Ok(out);
                }
                Some(_) => i += 1,
            }
        }
    }
}

/// Parse a chain descriptor: `const:<set>` or `scaled:k`.
pub fn parse_chain(
    am: Ambient,
    family: Family,
    input: &str,
) -> Result<ChainPresentation, ParseError> {
    if let Some(rest) = input.strip_prefix("const:") {
        let expr = parse_set(am, rest)?;
        Ok(ChainPresentation::constant(
            am,
            family,
            expr,
            input.to_string(),
        ))
    } else if let Some(rest) = input.strip_prefix("scaled:") {
        let k: u64 = rest
            .trim()
            .parse()
            .map_err(|_| ParseError::At {
                position: 7,
                message: "expected a scale factor".into(),
            })?;
        if k < 2 {
            return err(7, "scale factor must be at least 2");
        }
        if !matches!(am, Ambient::N0 | Ambient::Z) {
            return err(0, "scaled chains are defined over N0/Z only");
        }
        Ok(ChainPresentation::geometric(am, family, k))
    } else {
        err(0, "expected `const:<set>` or `scaled:k`")
    }
}

/// Parse a family name.
pub fn parse_family(name: &str) -> Result<Family, ParseError> {
    match name {
        "thick" | "t" => Ok(Family::Thick),
        "syndetic" | "s" => Ok(Family::Syndetic),
        "pws" | "ps" => Ok(Family::PiecewiseSyndetic),
        "infinite" | "inf" => Ok(Family::Infinite),
        "pubd" => Ok(Family::PosBanachDensity),
        other => err(0, format!("unknown family/property `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitives_round_trip_membership() {
        let am = Ambient::Z;
        let cases = [
            ("ep:0,4,{0,1}", vec![0i64, 1, 4, 5], vec![2, 3, -1]),
            ("full", vec![0, 5, -7], vec![]),
            ("fin:{1,-3}", vec![1, -3], vec![0, 2]),
            ("!ep:0,2,{0}", vec![1, 3, -5], vec![0, 2]),
            ("ep:0,2,{0}&ep:0,3,{0}", vec![0, 6, -6], vec![2, 3]),
            ("ep:0,2,{0}|ep:0,3,{0}", vec![0, 2, 3, -3], vec![1, 5]),
            ("1>ep:0,2,{0}", vec![1, 3, -1], vec![0, 2]),
            ("1<ep:0,2,{0}", vec![1, -1, 3], vec![0, 2]),
            ("(ep:0,2,{0})", vec![0, 2], vec![1]),
        ];
        for (s, inside, outside) in cases {
            let expr = parse_set(am, s).unwrap();
            for n in inside {
                assert!(
                    expr.member(am, &Element::int(am, n)).unwrap(),
                    "{s} should contain {n}"
                );
            }
            for n in outside {
                assert!(
                    !expr.member(am, &Element::int(am, n)).unwrap(),
                    "{s} should not contain {n}"
                );
            }
        }
    }

    #[test]
    fn fs_and_dilation_over_n0() {
        let am = Ambient::N0;
        let fs = parse_set(am, "fs:1,2,4,8").unwrap();
        assert!(fs.member(am, &Element::int(am, 15)).unwrap());
        assert!(!fs.member(am, &Element::int(am, 16)).unwrap());
        let dil = parse_set(am, "dil:3,ep:0,2,{0}").unwrap();
        assert!(dil.member(am, &Element::int(am, 6)).unwrap());
        assert!(!dil.member(am, &Element::int(am, 3)).unwrap());
    }

    #[test]
    fn z2_pairs_and_f2_words() {
        let am = Ambient::Z2;
        let expr = parse_set(am, "fin:{(0,0),(2,-1)}").unwrap();
        assert!(expr.member(am, &Element::pair(2, -1)).unwrap());
        let t = parse_set(am, "(1,0)>fin:{(0,0)}").unwrap();
        assert!(t.member(am, &Element::pair(1, 0)).unwrap());
        let am = Ambient::F2;
        let expr = parse_set(am, "fp:a,b").unwrap();
        assert!(expr
            .member(am, &am.parse_element("ab").unwrap())
            .unwrap());
        let t = parse_set(am, "a>fin:{e}").unwrap();
        assert!(t.member(am, &am.parse_element("a").unwrap()).unwrap());
    }

    #[test]
    fn empty_finite_set_is_rejected() {
        let e = parse_set(Ambient::Z, "fin:{}");
        assert!(matches!(e, Err(ParseError::At { .. })));
    }

    #[test]
    fn error_carries_position() {
        match parse_set(Ambient::Z, "ep:0,4,{9}") {
            Err(ParseError::At { position, .. }) => assert!(position > 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn chains_parse() {
        let c = parse_chain(
            Ambient::N0,
            Family::PiecewiseSyndetic,
            "const:ep:0,2,{0}",
        )
        .unwrap();
        assert_eq!(c.descriptor, "const:ep:0,2,{0}");
        let g = parse_chain(Ambient::N0, Family::PiecewiseSyndetic, "scaled:2").unwrap();
        let f2 = g.set(2);
        assert!(f2
            .member(Ambient::N0, &Element::int(Ambient::N0, 4))
            .unwrap());
        assert!(!f2
            .member(Ambient::N0, &Element::int(Ambient::N0, 2))
            .unwrap());
    }
}
