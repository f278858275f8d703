//! Countable ambient structures with a fixed enumeration and exhausting balls.
//!
//! Four ambients are supported: the additive monoid `N0`, the groups `Z`
//! and `Z2`, and the free group `F2` on two generators. Every ambient fixes
//! one enumeration `index -> element` with the identity at index 0, and a
//! nested exhausting ball filtration compatible with that enumeration:
//! `enumerate(i)` lies in `ball(n)` whenever `i` is below the cumulative
//! size of `ball(n)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::AmbientError;

/// Word-length cap for reduced F2 words; exceeding it is a hard error.
pub const F2_WORD_CAP: usize = 64;

/// The four ambient structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ambient {
    /// Non-negative integers under addition (a monoid: no inverses).
    N0,
    /// Integers under addition.
    Z,
    /// Pairs of integers under componentwise addition.
    Z2,
    /// Free group on generators a, b; elements are reduced words.
    F2,
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::N0 => write!(f, "N0"),
            Ambient::Z => write!(f, "Z"),
            Ambient::Z2 => write!(f, "Z2"),
            Ambient::F2 => write!(f, "F2"),
        }
    }
}

/// A generator symbol of F2. `A` and `B` denote the inverses of `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Gen {
    A = 0,
    AInv = 1,
    B = 2,
    BInv = 3,
}

impl Gen {
    pub fn inverse(self) -> Gen {
        match self {
            Gen::A => Gen::AInv,
            Gen::AInv => Gen::A,
            Gen::B => Gen::BInv,
            Gen::BInv => Gen::B,
        }
    }

    pub fn cancels(self, other: Gen) -> bool {
        self.inverse() == other
    }

    fn symbol(self) -> char {
        match self {
            Gen::A => 'a',
            Gen::AInv => 'A',
            Gen::B => 'b',
            Gen::BInv => 'B',
        }
    }

    fn from_symbol(c: char) -> Option<Gen> {
        match c {
            'a' => Some(Gen::A),
            'A' => Some(Gen::AInv),
            'b' => Some(Gen::B),
            'B' => Some(Gen::BInv),
            _ => None,
        }
    }

    /// Generators in enumeration order.
    pub const ALL: [Gen; 4] = [Gen::A, Gen::AInv, Gen::B, Gen::BInv];
}

/// An element of one of the ambients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Payload {
    Int(i64),
    Pair(i64, i64),
    /// Reduced word: no adjacent inverse pair.
    Word(Vec<Gen>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub ambient: Ambient,
    pub payload: Payload,
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl Element {
    pub fn int(ambient: Ambient, n: i64) -> Element {
        debug_assert!(matches!(ambient, Ambient::N0 | Ambient::Z));
        Element {
            ambient,
            payload: Payload::Int(n),
        }
    }

    pub fn pair(x: i64, y: i64) -> Element {
        Element {
            ambient: Ambient::Z2,
            payload: Payload::Pair(x, y),
        }
    }

    pub fn word(gens: Vec<Gen>) -> Result<Element, AmbientError> {
        let reduced = reduce(gens)?;
        Ok(Element {
            ambient: Ambient::F2,
            payload: Payload::Word(reduced),
        })
    }

    pub fn as_int(&self) -> Option<i64> {
        match self.payload {
            Payload::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(i64, i64)> {
        match self.payload {
            Payload::Pair(x, y) => Some((x, y)),
            _ => None,
        }
    }

    pub fn as_word(&self) -> Option<&[Gen]> {
        match &self.payload {
            Payload::Word(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        match &self.payload {
            Payload::Int(n) => *n == 0,
            Payload::Pair(x, y) => *x == 0 && *y == 0,
            Payload::Word(w) => w.is_empty(),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            Payload::Int(n) => write!(f, "{n}"),
            Payload::Pair(x, y) => write!(f, "({x},{y})"),
            Payload::Word(w) => {
                if w.is_empty() {
                    write!(f, "e")
                } else {
                    for g in w {
                        write!(f, "{}", g.symbol())?;
                    }
                    Ok(())
                }
            }
        }
    }
}

/// Free reduction: cancel adjacent inverse pairs, enforce the word cap.
fn reduce(gens: Vec<Gen>) -> Result<Vec<Gen>, AmbientError> {
    let mut out: Vec<Gen> = Vec::with_capacity(gens.len());
    for g in gens {
        if let Some(&last) = out.last() {
            if last.cancels(g) {
                out.pop();
                continue;
            }
        }
        out.push(g);
    }
    if out.len() > F2_WORD_CAP {
        return Err(AmbientError::WordCapExceeded {
            len: out.len(),
            cap: F2_WORD_CAP,
        });
    }
    Ok(out)
}

impl Ambient {
    pub fn identity(self) -> Element {
        match self {
            Ambient::N0 | Ambient::Z => Element::int(self, 0),
            Ambient::Z2 => Element::pair(0, 0),
            Ambient::F2 => Element {
                ambient: Ambient::F2,
                payload: Payload::Word(Vec::new()),
            },
        }
    }

    /// Whether inversion is available (false only for the monoid N0).
    pub fn is_group(self) -> bool {
        !matches!(self, Ambient::N0)
    }

    /// The fixed enumeration. Index 0 is the identity; the map is injective
    /// and compatible with the ball filtration.
    pub fn enumerate(self, index: u64) -> Element {
        match self {
            Ambient::N0 => Element::int(self, index as i64),
            Ambient::Z => {
                // 0, 1, -1, 2, -2, ...
                if index == 0 {
                    Element::int(self, 0)
                } else if index % 2 == 1 {
                    Element::int(self, ((index + 1) / 2) as i64)
                } else {
                    Element::int(self, -((index / 2) as i64))
                }
            }
            Ambient::Z2 => enumerate_z2(index),
            Ambient::F2 => enumerate_f2(index),
        }
    }

    /// Nested exhausting balls. `ball(1)` contains the identity.
    ///
    /// Z: `[-n, n]`; N0: `[0, n]`; Z2: the box `[-n, n]^2`;
    /// F2: reduced words of length <= n. Listed in enumeration order.
    pub fn ball(self, level: u32) -> Vec<Element> {
        assert!(level >= 1, "ball level must be >= 1");
        let count = self.ball_size(level);
        (0..count).map(|i| self.enumerate(i)).collect()
    }

    /// Number of elements in `ball(level)`; `ball_size(0)` counts only the identity.
    pub fn ball_size(self, level: u32) -> u64 {
        let n = level as u64;
        match self {
            Ambient::N0 => n + 1,
            Ambient::Z => 2 * n + 1,
            Ambient::Z2 => (2 * n + 1) * (2 * n + 1),
            Ambient::F2 => {
                // 1 + sum_{l=1..n} 4 * 3^(l-1)
                let mut total: u64 = 1;
                let mut layer: u64 = 4;
                for _ in 0..n {
                    total += layer;
                    layer *= 3;
                }
                total
            }
        }
    }

    /// Inverse of `enumerate`: the index of an element in the fixed
    /// enumeration.
    pub fn index_of(self, g: &Element) -> u64 {
        match &g.payload {
            Payload::Int(n) => match self {
                Ambient::N0 => *n as u64,
                _ => {
                    if *n > 0 {
                        2 * *n as u64 - 1
                    } else {
                        2 * n.unsigned_abs()
                    }
                }
            },
            Payload::Pair(x, y) => {
                let r = x.unsigned_abs().max(y.unsigned_abs());
                if r == 0 {
                    return 0;
                }
                let ri = r as i64;
                let base = (2 * r - 1) * (2 * r - 1); // elements inside ring r
                let pos = if *x == -ri {
                    (y + ri) as u64
                } else if *x < ri {
                    let col = (x + ri - 1) as u64;
                    (2 * r + 1) + 2 * col + u64::from(*y == ri)
                } else {
                    (2 * r + 1) + 2 * (2 * r - 1) + (y + ri) as u64
                };
                base + pos
            }
            Payload::Word(w) => {
                if w.is_empty() {
                    return 0;
                }
                let len = w.len();
                // Words shorter than len occupy 1 + sum_{l<len} 4*3^(l-1).
                let mut base: u64 = 1;
                let mut block: u64 = 4;
                for _ in 1..len {
                    base += block;
                    block *= 3;
                }
                let mut offset: u64 = Gen::ALL.iter().position(|g| g == &w[0]).unwrap() as u64;
                for i in 1..len {
                    let prev = w[i - 1];
                    let choices: Vec<Gen> = Gen::ALL
                        .iter()
                        .copied()
                        .filter(|g| !prev.cancels(*g))
                        .collect();
                    let d = choices.iter().position(|g| g == &w[i]).unwrap() as u64;
                    offset = offset * 3 + d;
                }
                base + offset
            }
        }
    }

    /// Smallest level L with `g` in `ball(L)`; the identity has norm 0.
    pub fn norm(self, g: &Element) -> u32 {
        match &g.payload {
            Payload::Int(n) => n.unsigned_abs() as u32,
            Payload::Pair(x, y) => x.unsigned_abs().max(y.unsigned_abs()) as u32,
            Payload::Word(w) => w.len() as u32,
        }
    }

    /// Group (monoid) operation.
    pub fn mul(self, g: &Element, h: &Element) -> Result<Element, AmbientError> {
        self.check(g)?;
        self.check(h)?;
        match (&g.payload, &h.payload) {
            (Payload::Int(a), Payload::Int(b)) => Ok(Element::int(self, a + b)),
            (Payload::Pair(a, b), Payload::Pair(c, d)) => Ok(Element::pair(a + c, b + d)),
            (Payload::Word(u), Payload::Word(v)) => {
                let mut joined = Vec::with_capacity(u.len() + v.len());
                joined.extend_from_slice(u);
                joined.extend_from_slice(v);
                Element::word(joined)
            }
            _ => unreachable!("check() guarantees matching payloads"),
        }
    }

    /// Inverse; signals `NoInverse` on N0.
    pub fn inv(self, g: &Element) -> Result<Element, AmbientError> {
        self.check(g)?;
        match &g.payload {
            Payload::Int(n) => {
                if self == Ambient::N0 {
                    Err(AmbientError::NoInverse)
                } else {
                    Ok(Element::int(self, -n))
                }
            }
            Payload::Pair(x, y) => Ok(Element::pair(-x, -y)),
            Payload::Word(w) => {
                let inv: Vec<Gen> = w.iter().rev().map(|g| g.inverse()).collect();
                Element::word(inv)
            }
        }
    }

    /// `inv(g) * h`; the monoid N0 supports this partially (None when g > h).
    pub fn left_quotient(self, g: &Element, h: &Element) -> Result<Option<Element>, AmbientError> {
        if self == Ambient::N0 {
            let (a, b) = (g.as_int().unwrap_or(0), h.as_int().unwrap_or(0));
            if b >= a {
                Ok(Some(Element::int(self, b - a)))
            } else {
                Ok(None)
            }
        } else {
            let gi = self.inv(g)?;
            Ok(Some(self.mul(&gi, h)?))
        }
    }

    fn check(self, g: &Element) -> Result<(), AmbientError> {
        if g.ambient == self {
            Ok(())
        } else {
            Err(AmbientError::WrongAmbient(g.describe(), self))
        }
    }

    /// Parse the textual element syntax: integers ("-3"), pairs ("(2,-1)"),
    /// reduced words ("abA", "e" for the identity).
    pub fn parse_element(self, s: &str) -> Result<Element, AmbientError> {
        let s = s.trim();
        match self {
            Ambient::N0 | Ambient::Z => {
                let n: i64 = s
                    .parse()
                    .map_err(|_| AmbientError::WrongAmbient(s.to_string(), self))?;
                if self == Ambient::N0 && n < 0 {
                    return Err(AmbientError::WrongAmbient(s.to_string(), self));
                }
                Ok(Element::int(self, n))
            }
            Ambient::Z2 => {
                let inner = s
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| AmbientError::WrongAmbient(s.to_string(), self))?;
                let mut parts = inner.splitn(2, ',');
                let x = parts
                    .next()
                    .and_then(|t| t.trim().parse().ok())
                    .ok_or_else(|| AmbientError::WrongAmbient(s.to_string(), self))?;
                let y = parts
                    .next()
                    .and_then(|t| t.trim().parse().ok())
                    .ok_or_else(|| AmbientError::WrongAmbient(s.to_string(), self))?;
                Ok(Element::pair(x, y))
            }
            Ambient::F2 => {
                if s == "e" || s.is_empty() {
                    return Ok(self.identity());
                }
                let mut gens = Vec::with_capacity(s.len());
                for c in s.chars() {
                    let g = Gen::from_symbol(c)
                        .ok_or_else(|| AmbientError::WrongAmbient(s.to_string(), self))?;
                    gens.push(g);
                }
                Element::word(gens)
            }
        }
    }
}

/// Z2 enumeration: identity, then square rings in increasing Chebyshev
/// radius; within a ring, lexicographic (x, then y) order.
fn enumerate_z2(index: u64) -> Element {
    if index == 0 {
        return Element::pair(0, 0);
    }
    // Ring r has 8r elements; cumulative size through ring r is (2r+1)^2.
    let mut r: u64 = 1;
    let mut base: u64 = 1; // elements strictly inside ring r
    while base + 8 * r <= index {
        base += 8 * r;
        r += 1;
    }
    let mut pos = index - base;
    let ri = r as i64;
    // x = -r edge: 2r+1 entries, y from -r..=r.
    if pos < 2 * r + 1 {
        return Element::pair(-ri, -ri + pos as i64);
    }
    pos -= 2 * r + 1;
    // middle columns x in (-r, r): 2 entries each (y = -r then y = r).
    if pos < 2 * (2 * r - 1) {
        let col = (pos / 2) as i64;
        let y = if pos % 2 == 0 { -ri } else { ri };
        return Element::pair(-ri + 1 + col, y);
    }
    pos -= 2 * (2 * r - 1);
    // x = r edge.
    Element::pair(ri, -ri + pos as i64)
}

/// F2 enumeration: identity, then words by length; words of length l are
/// ordered by extending shorter words in enumeration order with generators
/// in the order a, A, b, B (skipping cancellations).
fn enumerate_f2(index: u64) -> Element {
    if index == 0 {
        return Ambient::F2.identity();
    }
    // Block of words of length l has size 4 * 3^(l-1).
    let mut rem = index - 1;
    let mut len: u32 = 1;
    let mut block: u64 = 4;
    while rem >= block {
        rem -= block;
        block *= 3;
        len += 1;
    }
    // Decode: first symbol has 4 choices, each later symbol 3 (anything but
    // the inverse of its predecessor), most-significant first.
    let mut digits = Vec::with_capacity(len as usize);
    let mut radix = block / 4; // 3^(len-1)
    let first = (rem / radix) as usize;
    digits.push(Gen::ALL[first]);
    rem %= radix;
    for _ in 1..len {
        radix /= 3;
        let d = (rem / radix) as usize;
        rem %= radix;
        let prev = *digits.last().unwrap();
        let choices: Vec<Gen> = Gen::ALL
            .iter()
            .copied()
            .filter(|g| !prev.cancels(*g))
            .collect();
        digits.push(choices[d]);
    }
    Element {
        ambient: Ambient::F2,
        payload: Payload::Word(digits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn z_enumeration_zigzag() {
        let am = Ambient::Z;
        let got: Vec<i64> = (0..5).map(|i| am.enumerate(i).as_int().unwrap()).collect();
        assert_eq!(got, vec![0, 1, -1, 2, -2]);
    }

    #[test]
    fn n0_enumeration_is_identity_map() {
        for k in 0..50 {
            assert_eq!(Ambient::N0.enumerate(k).as_int().unwrap(), k as i64);
        }
    }

    #[test]
    fn f2_first_generators_in_order() {
        let am = Ambient::F2;
        let names: Vec<String> = (1..=4).map(|i| am.enumerate(i).to_string()).collect();
        assert_eq!(names, vec!["a", "A", "b", "B"]);
    }

    #[test]
    fn f2_ball_sizes_match_brute_enumeration() {
        // Independent oracle: grow words breadth-first with explicit reduction.
        let mut words: BTreeSet<Vec<Gen>> = BTreeSet::new();
        words.insert(vec![]);
        let mut frontier: Vec<Vec<Gen>> = vec![vec![]];
        let mut sizes = vec![1u64];
        for _ in 1..=8 {
            let mut next = Vec::new();
            for w in &frontier {
                for g in Gen::ALL {
                    if w.last().map(|l| l.cancels(g)).unwrap_or(false) {
                        continue;
                    }
                    let mut v = w.clone();
                    v.push(g);
                    if words.insert(v.clone()) {
                        next.push(v);
                    }
                }
            }
            frontier = next;
            sizes.push(words.len() as u64);
        }
        for level in 1..=8u32 {
            assert_eq!(Ambient::F2.ball_size(level), sizes[level as usize]);
        }
        assert_eq!(Ambient::F2.ball_size(1), 5);
        assert_eq!(Ambient::F2.ball_size(2), 17);
    }

    #[test]
    fn balls_nested_and_consistent_with_enumeration() {
        for am in [Ambient::N0, Ambient::Z, Ambient::Z2, Ambient::F2] {
            let mut prev: BTreeSet<Element> = BTreeSet::new();
            for level in 1..=5u32 {
                let b: Vec<Element> = am.ball(level);
                let bs: BTreeSet<Element> = b.iter().cloned().collect();
                assert_eq!(b.len() as u64, am.ball_size(level), "{am} level {level}");
                assert!(prev.is_subset(&bs), "{am} ball({level}) not nested");
                assert!(bs.contains(&am.identity()));
                // enumeration consistency
                for i in 0..am.ball_size(level) {
                    let g = am.enumerate(i);
                    assert!(bs.contains(&g), "{am}: enumerate({i}) outside ball({level})");
                    assert!(am.norm(&g) <= level);
                }
                prev = bs;
            }
        }
    }

    #[test]
    fn index_of_inverts_enumeration() {
        for am in [Ambient::N0, Ambient::Z, Ambient::Z2, Ambient::F2] {
            for i in 0..3000u64 {
                assert_eq!(am.index_of(&am.enumerate(i)), i, "{am} at {i}");
            }
        }
    }

    #[test]
    fn enumeration_injective_prefix() {
        for am in [Ambient::N0, Ambient::Z, Ambient::Z2, Ambient::F2] {
            let mut seen = BTreeSet::new();
            for i in 0..500u64 {
                assert!(seen.insert(am.enumerate(i)), "{am}: collision at {i}");
            }
            assert_eq!(am.enumerate(0), am.identity());
        }
    }

    #[test]
    fn f2_free_reduction_examples() {
        let am = Ambient::F2;
        let ab = am.parse_element("ab").unwrap();
        let b_inv_a = am.parse_element("Ba").unwrap();
        // ab * Ba = a (b B) a = aa
        assert_eq!(am.mul(&ab, &b_inv_a).unwrap().to_string(), "aa");
        let a = am.parse_element("a").unwrap();
        let a_inv = am.parse_element("A").unwrap();
        assert!(am.mul(&a, &a_inv).unwrap().is_identity());
    }

    #[test]
    fn z_addition_and_inverse() {
        let am = Ambient::Z;
        let g = Element::int(am, 3);
        let h = Element::int(am, -5);
        assert_eq!(am.mul(&g, &h).unwrap().as_int(), Some(-2));
        assert_eq!(am.inv(&g).unwrap().as_int(), Some(-3));
    }

    #[test]
    fn n0_inverse_is_error() {
        let am = Ambient::N0;
        assert_eq!(
            am.inv(&Element::int(am, 1)),
            Err(AmbientError::NoInverse)
        );
    }

    #[test]
    fn word_cap_is_enforced() {
        let long: Vec<Gen> = std::iter::repeat(Gen::A).take(F2_WORD_CAP + 1).collect();
        assert!(matches!(
            Element::word(long),
            Err(AmbientError::WordCapExceeded { .. })
        ));
    }

    #[test]
    fn parse_display_round_trip() {
        for (am, s) in [
            (Ambient::Z, "-3"),
            (Ambient::N0, "7"),
            (Ambient::Z2, "(2,-1)"),
            (Ambient::F2, "abA"),
            (Ambient::F2, "e"),
        ] {
            let g = am.parse_element(s).unwrap();
            let back = am.parse_element(&g.to_string()).unwrap();
            assert_eq!(g, back);
        }
    }

    #[test]
    fn associativity_random_triples() {
        // 1000 random triples per ambient.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for am in [Ambient::N0, Ambient::Z, Ambient::Z2, Ambient::F2] {
            for _ in 0..1000 {
                let g = am.enumerate(rng.gen_range(0..400u64));
                let h = am.enumerate(rng.gen_range(0..400u64));
                let k = am.enumerate(rng.gen_range(0..400u64));
                let lhs = am.mul(&am.mul(&g, &h).unwrap(), &k).unwrap();
                let rhs = am.mul(&g, &am.mul(&h, &k).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn inverse_law_where_defined() {
        for am in [Ambient::Z, Ambient::Z2, Ambient::F2] {
            for i in 0..200u64 {
                let g = am.enumerate(i);
                let gi = am.inv(&g).unwrap();
                assert!(am.mul(&gi, &g).unwrap().is_identity());
                assert!(am.mul(&g, &gi).unwrap().is_identity());
            }
        }
    }
}
