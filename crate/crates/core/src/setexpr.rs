//! Subset representations over an ambient, with decidable membership on
//! every ball and an exact closed-form engine for the eventually periodic
//! fragment.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};

use crate::ambient::{Ambient, Element};
use crate::error::SetError;

type PredicateFn = dyn Fn(Ambient, &Element) -> bool + Send + Sync;

/// A subset of the ambient monoid/group.
#[derive(Clone)]
pub enum SetExpr {
    /// Explicit finite set.
    Finite(BTreeSet<Element>),
    /// Over N0/Z: membership for n >= offset is decided by the residue of
    /// n - offset mod period. Over Z the pattern extends periodically to
    /// the whole line (the offset is a phase); over N0 nothing below the
    /// offset belongs to the set.
    EventuallyPeriodic {
        offset: u64,
        period: u64,
        residues: BTreeSet<u64>,
    },
    /// All finite sums of a finite generator list (nonempty index subsets).
    FsGen {
        generators: Vec<Element>,
        cache: Arc<OnceLock<BTreeSet<Element>>>,
    },
    /// All finite products in increasing index order.
    FpGen {
        generators: Vec<Element>,
        cache: Arc<OnceLock<BTreeSet<Element>>>,
    },
    /// `{factor * x : x in base}` over N0.
    Dilation { factor: u64, base: Box<SetExpr> },
    Union(Box<SetExpr>, Box<SetExpr>),
    Intersection(Box<SetExpr>, Box<SetExpr>),
    Complement(Box<SetExpr>),
    /// `g . base` (or `g^-1 . base` with `inverse`): x belongs iff
    /// `g^-1 x` (resp. `g x`) belongs to the base.
    Translate {
        by: Element,
        inverse: bool,
        base: Box<SetExpr>,
    },
    /// The whole ambient.
    Full,
    /// Arbitrary membership function, promised total on every ball up to
    /// the optional guarantee level.
    Predicate {
        name: String,
        guarantee: Option<u32>,
        f: Arc<PredicateFn>,
    },
}

impl fmt::Debug for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl SetExpr {
    pub fn finite<I: IntoIterator<Item = Element>>(items: I) -> SetExpr {
        SetExpr::Finite(items.into_iter().collect())
    }

    pub fn ep(offset: u64, period: u64, residues: impl IntoIterator<Item = u64>) -> SetExpr {
        assert!(period > 0, "period must be positive");
        let residues: BTreeSet<u64> = residues.into_iter().collect();
        assert!(
            residues.iter().all(|r| *r < period),
            "residues must lie in [0, period)"
        );
        SetExpr::EventuallyPeriodic {
            offset,
            period,
            residues,
        }
    }

    /// The set of positive multiples `{k, 2k, ...}`.
    pub fn multiples(k: u64) -> SetExpr {
        SetExpr::ep(k, k, [0])
    }

    /// Multiples including zero, e.g. 2Z over the integers.
    pub fn multiples_with_zero(k: u64) -> SetExpr {
        SetExpr::ep(0, k, [0])
    }

    pub fn fs_gen(generators: Vec<Element>) -> SetExpr {
        SetExpr::FsGen {
            generators,
            cache: Arc::new(OnceLock::new()),
        }
    }

    pub fn fp_gen(generators: Vec<Element>) -> SetExpr {
        SetExpr::FpGen {
            generators,
            cache: Arc::new(OnceLock::new()),
        }
    }

    pub fn dilation(factor: u64, base: SetExpr) -> SetExpr {
        SetExpr::Dilation {
            factor,
            base: Box::new(base),
        }
    }

    pub fn union(a: SetExpr, b: SetExpr) -> SetExpr {
        SetExpr::Union(Box::new(a), Box::new(b))
    }

    pub fn intersection(a: SetExpr, b: SetExpr) -> SetExpr {
        SetExpr::Intersection(Box::new(a), Box::new(b))
    }

    pub fn complement(a: SetExpr) -> SetExpr {
        SetExpr::Complement(Box::new(a))
    }

    pub fn translate(by: Element, base: SetExpr) -> SetExpr {
        SetExpr::Translate {
            by,
            inverse: false,
            base: Box::new(base),
        }
    }

    pub fn translate_inv(by: Element, base: SetExpr) -> SetExpr {
        SetExpr::Translate {
            by,
            inverse: true,
            base: Box::new(base),
        }
    }

    pub fn predicate<F>(name: impl Into<String>, guarantee: Option<u32>, f: F) -> SetExpr
    where
        F: Fn(Ambient, &Element) -> bool + Send + Sync + 'static,
    {
        SetExpr::Predicate {
            name: name.into(),
            guarantee,
            f: Arc::new(f),
        }
    }

    pub fn empty() -> SetExpr {
        SetExpr::Finite(BTreeSet::new())
    }

    /// Membership query; pure, consistent with the variant semantics.
    pub fn member(&self, am: Ambient, g: &Element) -> Result<bool, SetError> {
        match self {
            SetExpr::Finite(set) => Ok(set.contains(g)),
            SetExpr::EventuallyPeriodic {
                offset,
                period,
                residues,
            } => {
                let n = g.as_int().ok_or_else(|| {
                    SetError::UnsupportedAmbient("eventually-periodic".into(), am)
                })?;
                let off = *offset as i64;
                if am == Ambient::N0 && n < off {
                    return Ok(false);
                }
                if am == Ambient::N0 && n < 0 {
                    return Ok(false);
                }
                let r = (n - off).rem_euclid(*period as i64) as u64;
                Ok(residues.contains(&r))
            }
            SetExpr::FsGen { .. } | SetExpr::FpGen { .. } => {
                Ok(self.generated_set(am)?.contains(g))
            }
            SetExpr::Dilation { factor, base } => {
                let n = g
                    .as_int()
                    .ok_or_else(|| SetError::UnsupportedAmbient("dilation".into(), am))?;
                if n < 0 || *factor == 0 {
                    return Ok(false);
                }
                if n as u64 % *factor != 0 {
                    return Ok(false);
                }
                let q = Element::int(am, n / *factor as i64);
                base.member(am, &q)
            }
            SetExpr::Union(a, b) => Ok(a.member(am, g)? || b.member(am, g)?),
            SetExpr::Intersection(a, b) => Ok(a.member(am, g)? && b.member(am, g)?),
            SetExpr::Complement(a) => Ok(!a.member(am, g)?),
            SetExpr::Translate { by, inverse, base } => {
                // x in gA  <=>  g^-1 x in A;  x in g^-1 A  <=>  g x in A.
                if *inverse {
                    let shifted = am.mul(by, g)?;
                    base.member(am, &shifted)
                } else {
                    match am.left_quotient(by, g)? {
                        Some(q) => base.member(am, &q),
                        None => Ok(false),
                    }
                }
            }
            SetExpr::Full => Ok(true),
            SetExpr::Predicate { name, guarantee, f } => {
                if let Some(cap) = guarantee {
                    if am.norm(g) > *cap {
                        return Err(SetError::HorizonExceeded {
                            name: name.clone(),
                            element: g.describe(),
                            level: *cap,
                        });
                    }
                }
                Ok(f(am, g))
            }
        }
    }

    /// Materialized finite-sums / finite-products set of the generator list.
    fn generated_set(&self, am: Ambient) -> Result<&BTreeSet<Element>, SetError> {
        match self {
            SetExpr::FsGen { generators, cache } | SetExpr::FpGen { generators, cache } => {
                if let Some(s) = cache.get() {
                    return Ok(s);
                }
                let ordered = matches!(self, SetExpr::FpGen { .. });
                let set = generate_products(am, generators, generators.len(), ordered)?;
                let _ = cache.set(set);
                Ok(cache.get().expect("just initialized"))
            }
            _ => unreachable!(),
        }
    }

    /// Elements of the set inside `ball(level)`, in enumeration order.
    pub fn elements_in_ball(&self, am: Ambient, level: u32) -> Result<Vec<Element>, SetError> {
        let mut out = Vec::new();
        for i in 0..am.ball_size(level) {
            let g = am.enumerate(i);
            if self.member(am, &g)? {
                out.push(g);
            }
        }
        Ok(out)
    }

    /// A short human-readable structural descriptor.
    pub fn describe(&self) -> String {
        match self {
            SetExpr::Finite(s) => {
                if s.len() <= 8 {
                    let items: Vec<String> = s.iter().map(|e| e.to_string()).collect();
                    format!("fin:{{{}}}", items.join(","))
                } else {
                    format!("fin:<{} elements>", s.len())
                }
            }
            SetExpr::EventuallyPeriodic {
                offset,
                period,
                residues,
            } => {
                let rs: Vec<String> = residues.iter().map(|r| r.to_string()).collect();
                format!("ep:{offset},{period},{{{}}}", rs.join(","))
            }
            SetExpr::FsGen { generators, .. } => {
                let gs: Vec<String> = generators.iter().map(|e| e.to_string()).collect();
                format!("fs:{}", gs.join(","))
            }
            SetExpr::FpGen { generators, .. } => {
                let gs: Vec<String> = generators.iter().map(|e| e.to_string()).collect();
                format!("fp:{}", gs.join(","))
            }
            SetExpr::Dilation { factor, base } => format!("dil:{factor},{}", base.describe()),
            SetExpr::Union(a, b) => format!("({}|{})", a.describe(), b.describe()),
            SetExpr::Intersection(a, b) => format!("({}&{})", a.describe(), b.describe()),
            SetExpr::Complement(a) => format!("!({})", a.describe()),
            SetExpr::Translate { by, inverse, base } => {
                if *inverse {
                    format!("{by}<({})", base.describe())
                } else {
                    format!("{by}>({})", base.describe())
                }
            }
            SetExpr::Full => "full".to_string(),
            SetExpr::Predicate { name, .. } => format!("pred:{name}"),
        }
    }
}

impl Serialize for SetExpr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SetExpr", 1)?;
        st.serialize_field("expr", &self.describe())?;
        st.end()
    }
}

fn generate_products(
    am: Ambient,
    generators: &[Element],
    depth: usize,
    _ordered: bool,
) -> Result<BTreeSet<Element>, SetError> {
    // Products over nonempty subsets of {1..depth}, factors in increasing
    // index order. Iterative: extend each partial product by each later
    // generator once.
    let mut out = BTreeSet::new();
    // partial products ending at index i (product, last index)
    let mut frontier: Vec<(Element, usize)> = Vec::new();
    for (i, g) in generators.iter().take(depth).enumerate() {
        frontier.push((g.clone(), i));
        out.insert(g.clone());
    }
    while let Some((p, last)) = frontier.pop() {
        for (j, g) in generators.iter().enumerate().take(depth).skip(last + 1) {
            let q = am.mul(&p, g)?;
            out.insert(q.clone());
            frontier.push((q, j));
        }
    }
    Ok(out)
}

/// All products/sums over nonempty index subsets of `{1..depth}`, factors in
/// increasing index order.
pub fn fs_generate(
    am: Ambient,
    generators: &[Element],
    depth: usize,
) -> Result<BTreeSet<Element>, SetError> {
    assert!(depth >= 1 && depth <= generators.len());
    generate_products(am, generators, depth, true)
}

// ---------------------------------------------------------------------------
// Closed-form normalization: periodic set with finite exceptions.
// ---------------------------------------------------------------------------

/// Exact closed form over N0/Z: `(periodic residues) ∪ plus ∖ minus` with
/// finite exception sets. Over N0 the domain is restricted to n >= 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpClosed {
    pub ambient: Ambient,
    pub period: u64,
    pub residues: BTreeSet<u64>,
    pub plus: BTreeSet<i64>,
    pub minus: BTreeSet<i64>,
}

/// Caps keeping the closed-form algebra desk-sized; beyond them the scan
/// classifiers take over.
const EP_PERIOD_CAP: u64 = 1 << 16;
const EP_EXCEPTION_CAP: usize = 1 << 14;

impl EpClosed {
    pub fn member(&self, n: i64) -> bool {
        if self.ambient == Ambient::N0 && n < 0 {
            return false;
        }
        if self.minus.contains(&n) {
            return false;
        }
        if self.plus.contains(&n) {
            return true;
        }
        let r = n.rem_euclid(self.period as i64) as u64;
        self.residues.contains(&r)
    }

    fn normalized(mut self) -> Option<EpClosed> {
        if self.period > EP_PERIOD_CAP {
            return None;
        }
        // Drop redundant exceptions.
        let p = self.period as i64;
        let residues = self.residues.clone();
        self.plus
            .retain(|n| !residues.contains(&(n.rem_euclid(p) as u64)));
        self.minus
            .retain(|n| residues.contains(&(n.rem_euclid(p) as u64)));
        if self.ambient == Ambient::N0 {
            self.plus.retain(|n| *n >= 0);
            self.minus.retain(|n| *n >= 0);
        }
        if self.plus.len() + self.minus.len() > EP_EXCEPTION_CAP {
            return None;
        }
        Some(self)
    }

    fn pure_periodic(am: Ambient, period: u64, residues: BTreeSet<u64>) -> EpClosed {
        EpClosed {
            ambient: am,
            period,
            residues,
            plus: BTreeSet::new(),
            minus: BTreeSet::new(),
        }
    }

    fn rescale(&self, new_period: u64) -> Option<EpClosed> {
        if new_period > EP_PERIOD_CAP || new_period % self.period != 0 {
            return None;
        }
        let mut residues = BTreeSet::new();
        for block in 0..(new_period / self.period) {
            for r in &self.residues {
                residues.insert(block * self.period + r);
            }
        }
        Some(EpClosed {
            ambient: self.ambient,
            period: new_period,
            residues,
            plus: self.plus.clone(),
            minus: self.minus.clone(),
        })
    }

    /// Whether the set is finite (as a subset of its ambient).
    pub fn is_finite_set(&self) -> bool {
        self.residues.is_empty()
    }

    /// Exact density of the periodic part: |residues| / period.
    pub fn residue_density(&self) -> (u64, u64) {
        (self.residues.len() as u64, self.period)
    }

    /// All elements in [lo, hi].
    pub fn elements_in_range(&self, lo: i64, hi: i64) -> Vec<i64> {
        (lo..=hi).filter(|n| self.member(*n)).collect()
    }

    /// Rebuild a set expression with this exact membership.
    pub fn to_expr(&self) -> SetExpr {
        let mut expr = SetExpr::EventuallyPeriodic {
            offset: 0,
            period: self.period,
            residues: self.residues.clone(),
        };
        if !self.minus.is_empty() {
            expr = SetExpr::intersection(
                expr,
                SetExpr::complement(SetExpr::finite(
                    self.minus.iter().map(|n| Element::int(self.ambient, *n)),
                )),
            );
        }
        if !self.plus.is_empty() {
            expr = SetExpr::union(
                expr,
                SetExpr::finite(self.plus.iter().map(|n| Element::int(self.ambient, *n))),
            );
        }
        expr
    }
}

/// Try to reduce an expression over N0/Z to the exact closed form.
pub fn normalize_ep(am: Ambient, expr: &SetExpr) -> Option<EpClosed> {
    if !matches!(am, Ambient::N0 | Ambient::Z) {
        return None;
    }
    match expr {
        SetExpr::Finite(set) => {
            let plus: Option<BTreeSet<i64>> = set.iter().map(|e| e.as_int()).collect();
            EpClosed {
                ambient: am,
                period: 1,
                residues: BTreeSet::new(),
                plus: plus?,
                minus: BTreeSet::new(),
            }
            .normalized()
        }
        SetExpr::EventuallyPeriodic {
            offset,
            period,
            residues,
        } => {
            if *offset as usize > EP_EXCEPTION_CAP {
                return None;
            }
            let shifted: BTreeSet<u64> = residues
                .iter()
                .map(|r| (r + offset) % period)
                .collect();
            let mut ep = EpClosed::pure_periodic(am, *period, shifted);
            if am == Ambient::N0 && *offset > 0 {
                // Positions below the offset are excluded.
                for n in 0..*offset {
                    if ep.member(n as i64) {
                        ep.minus.insert(n as i64);
                    }
                }
            }
            ep.normalized()
        }
        SetExpr::Full => {
            EpClosed::pure_periodic(am, 1, BTreeSet::from([0])).normalized()
        }
        SetExpr::Union(a, b) => {
            let ea = normalize_ep(am, a)?;
            let eb = normalize_ep(am, b)?;
            combine(ea, eb, |x, y| x || y)
        }
        SetExpr::Intersection(a, b) => {
            let ea = normalize_ep(am, a)?;
            let eb = normalize_ep(am, b)?;
            combine(ea, eb, |x, y| x && y)
        }
        SetExpr::Complement(a) => {
            let ea = normalize_ep(am, a)?;
            let all: BTreeSet<u64> = (0..ea.period).collect();
            let residues: BTreeSet<u64> = all.difference(&ea.residues).copied().collect();
            EpClosed {
                ambient: am,
                period: ea.period,
                residues,
                plus: ea.minus,
                minus: ea.plus,
            }
            .normalized()
        }
        SetExpr::Translate { by, inverse, base } => {
            let eb = normalize_ep(am, base)?;
            let t = by.as_int()?;
            let shift = if *inverse { -t } else { t };
            if shift.unsigned_abs() as usize > EP_EXCEPTION_CAP {
                return None;
            }
            // x in g+A <=> x-g in A: residues and exceptions move by +shift.
            let p = eb.period as i64;
            let residues: BTreeSet<u64> = eb
                .residues
                .iter()
                .map(|r| (*r as i64 + shift).rem_euclid(p) as u64)
                .collect();
            let mut out = EpClosed {
                ambient: am,
                period: eb.period,
                residues,
                plus: eb.plus.iter().map(|n| n + shift).collect(),
                minus: eb.minus.iter().map(|n| n + shift).collect(),
            };
            if am == Ambient::N0 && shift > 0 {
                // The first `shift` positions of the translated set are empty.
                for n in 0..shift {
                    if out.member(n) {
                        out.minus.insert(n);
                    }
                }
            }
            out.normalized()
        }
        SetExpr::Dilation { factor, base } => {
            // Dilation is an N0 construction.
            if *factor == 0 || am != Ambient::N0 {
                return None;
            }
            let eb = normalize_ep(am, base)?;
            let new_period = eb.period.checked_mul(*factor)?;
            if new_period > EP_PERIOD_CAP {
                return None;
            }
            let f = *factor as i64;
            let residues: BTreeSet<u64> = eb
                .residues
                .iter()
                .map(|r| (r * factor) % new_period)
                .collect();
            EpClosed {
                ambient: am,
                period: new_period,
                residues,
                plus: eb.plus.iter().filter(|n| **n >= 0).map(|n| n * f).collect(),
                minus: eb.minus.iter().filter(|n| **n >= 0).map(|n| n * f).collect(),
            }
            .normalized()
        }
        _ => None,
    }
}

fn combine(a: EpClosed, b: EpClosed, op: impl Fn(bool, bool) -> bool) -> Option<EpClosed> {
    let period = num_integer::lcm(a.period, b.period);
    if period > EP_PERIOD_CAP {
        return None;
    }
    let ra = a.rescale(period)?;
    let rb = b.rescale(period)?;
    let mut residues = BTreeSet::new();
    for r in 0..period {
        if op(ra.residues.contains(&r), rb.residues.contains(&r)) {
            residues.insert(r);
        }
    }
    // Exceptional positions: wherever either side deviates from its
    // periodic part, recompute the combined membership pointwise.
    let mut exceptional: BTreeSet<i64> = BTreeSet::new();
    exceptional.extend(a.plus.iter().chain(a.minus.iter()));
    exceptional.extend(b.plus.iter().chain(b.minus.iter()));
    let mut out = EpClosed {
        ambient: a.ambient,
        period,
        residues: residues.clone(),
        plus: BTreeSet::new(),
        minus: BTreeSet::new(),
    };
    for n in exceptional {
        let truth = op(a.member(n), b.member(n));
        let periodic = residues.contains(&(n.rem_euclid(period as i64) as u64));
        if truth && !periodic {
            out.plus.insert(n);
        } else if !truth && periodic {
            out.minus.insert(n);
        }
    }
    out.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: i64) -> Element {
        Element::int(Ambient::Z, n)
    }

    fn n0(n: i64) -> Element {
        Element::int(Ambient::N0, n)
    }

    #[test]
    fn ep_membership_examples() {
        let e = SetExpr::ep(0, 4, [0, 1]);
        assert!(e.member(Ambient::N0, &n0(5)).unwrap());
        assert!(!e.member(Ambient::N0, &n0(2)).unwrap());
        // Over Z the pattern is fully periodic.
        assert!(e.member(Ambient::Z, &z(-4)).unwrap());
        assert!(e.member(Ambient::Z, &z(-3)).unwrap());
        assert!(!e.member(Ambient::Z, &z(-1)).unwrap());
    }

    #[test]
    fn ep_offset_semantics_on_n0() {
        // multiples(3) = {3, 6, 9, ...}: offset 3, period 3, residue 0.
        let m = SetExpr::multiples(3);
        assert!(!m.member(Ambient::N0, &n0(0)).unwrap());
        assert!(m.member(Ambient::N0, &n0(3)).unwrap());
        assert!(m.member(Ambient::N0, &n0(9)).unwrap());
        assert!(!m.member(Ambient::N0, &n0(4)).unwrap());
    }

    #[test]
    fn fs_membership_by_subset_sums() {
        let gens: Vec<Element> = [1i64, 2, 4, 8].iter().map(|n| n0(*n)).collect();
        let fs = SetExpr::fs_gen(gens.clone());
        // Oracle: enumerate all 15 nonempty subset sums.
        let mut sums = BTreeSet::new();
        for mask in 1u32..16 {
            let mut s = 0i64;
            for (i, g) in gens.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    s += g.as_int().unwrap();
                }
            }
            sums.insert(s);
        }
        assert_eq!(sums, (1..=15).collect::<BTreeSet<i64>>());
        for n in 0..20 {
            assert_eq!(
                fs.member(Ambient::N0, &n0(n)).unwrap(),
                sums.contains(&n),
                "n = {n}"
            );
        }
        assert!(fs.member(Ambient::N0, &n0(15)).unwrap());
    }

    #[test]
    fn fs_generate_examples() {
        let gens: Vec<Element> = [1i64, 2, 4, 8].iter().map(|n| n0(*n)).collect();
        let s = fs_generate(Ambient::N0, &gens, 4).unwrap();
        let want: BTreeSet<Element> = (1..=15).map(n0).collect();
        assert_eq!(s, want);
        let single = fs_generate(Ambient::N0, &gens[..1], 1).unwrap();
        assert_eq!(single, BTreeSet::from([n0(1)]));
    }

    #[test]
    fn fp_increasing_index_products_in_f2() {
        let am = Ambient::F2;
        let a = am.parse_element("a").unwrap();
        let b = am.parse_element("b").unwrap();
        let s = fs_generate(am, &[a.clone(), b.clone()], 2).unwrap();
        let ab = am.parse_element("ab").unwrap();
        assert_eq!(s, BTreeSet::from([a, b, ab]));
    }

    #[test]
    fn complement_of_full_is_empty() {
        let c = SetExpr::complement(SetExpr::Full);
        for i in 0..50 {
            assert!(!c.member(Ambient::Z, &Ambient::Z.enumerate(i)).unwrap());
        }
    }

    #[test]
    fn predicate_guarantee_is_enforced() {
        let p = SetExpr::predicate("evens", Some(10), |_, g| {
            g.as_int().map(|n| n % 2 == 0).unwrap_or(false)
        });
        assert!(p.member(Ambient::Z, &z(4)).unwrap());
        assert!(matches!(
            p.member(Ambient::Z, &z(11)),
            Err(SetError::HorizonExceeded { .. })
        ));
    }

    #[test]
    fn translate_semantics() {
        // x in 3 + evens <=> x - 3 even.
        let t = SetExpr::translate(z(3), SetExpr::ep(0, 2, [0]));
        assert!(t.member(Ambient::Z, &z(5)).unwrap());
        assert!(!t.member(Ambient::Z, &z(6)).unwrap());
        // Over N0 translation cuts below the translator.
        let t = SetExpr::translate(n0(3), SetExpr::ep(0, 1, [0]));
        assert!(!t.member(Ambient::N0, &n0(2)).unwrap());
        assert!(t.member(Ambient::N0, &n0(3)).unwrap());
    }

    #[test]
    fn normalization_agrees_with_membership() {
        // Property check over a structured pool of expressions.
        let pool: Vec<SetExpr> = vec![
            SetExpr::ep(0, 4, [0, 1]),
            SetExpr::ep(2, 3, [1]),
            SetExpr::finite([z(-3), z(0), z(7)]),
            SetExpr::union(SetExpr::ep(0, 2, [0]), SetExpr::finite([z(5)])),
            SetExpr::intersection(SetExpr::ep(0, 6, [0, 2, 4]), SetExpr::ep(0, 4, [0, 2])),
            SetExpr::complement(SetExpr::ep(0, 5, [0, 1])),
            SetExpr::translate(z(7), SetExpr::ep(0, 3, [2])),
            SetExpr::translate_inv(z(2), SetExpr::ep(0, 3, [0])),
        ];
        for expr in &pool {
            let ep = normalize_ep(Ambient::Z, expr).expect("normalizable");
            for n in -100..100 {
                assert_eq!(
                    ep.member(n),
                    expr.member(Ambient::Z, &z(n)).unwrap(),
                    "mismatch at {n} for {}",
                    expr.describe()
                );
            }
        }
    }

    #[test]
    fn normalization_on_n0_with_offsets_and_dilation() {
        let pool: Vec<SetExpr> = vec![
            SetExpr::multiples(2),
            SetExpr::ep(5, 4, [0, 3]),
            SetExpr::dilation(3, SetExpr::multiples(2)),
            SetExpr::union(
                SetExpr::dilation(2, SetExpr::ep(0, 1, [0])),
                SetExpr::finite([n0(1)]),
            ),
            SetExpr::translate(n0(4), SetExpr::multiples(3)),
        ];
        for expr in &pool {
            let ep = normalize_ep(Ambient::N0, expr).expect("normalizable");
            for n in 0..200 {
                assert_eq!(
                    ep.member(n),
                    expr.member(Ambient::N0, &n0(n)).unwrap(),
                    "mismatch at {n} for {}",
                    expr.describe()
                );
            }
        }
    }

    #[test]
    fn fsgen_is_not_normalized() {
        let fs = SetExpr::fs_gen(vec![n0(1), n0(2)]);
        assert!(normalize_ep(Ambient::N0, &fs).is_none());
    }
}
