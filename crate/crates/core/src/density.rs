//! Følner sequences over Z and Z2, upper and Banach densities with exact
//! rational arithmetic, and the growth-gated disjointification of an
//! explicit Følner subsequence.

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::ambient::{Ambient, Element};
use crate::error::SetError;
use crate::setexpr::{normalize_ep, SetExpr};

pub type Rational = Ratio<i64>;

/// A Følner sequence: boxes `[-n, n]^d` by default, or an explicit
/// finite-set sequence.
#[derive(Debug, Clone, Serialize)]
pub struct FolnerSeq {
    pub ambient: Ambient,
    pub shape: FolnerShape,
}

#[derive(Debug, Clone, Serialize)]
pub enum FolnerShape {
    Boxes,
    Explicit(Vec<BTreeSet<Element>>),
}

#[derive(Debug, Clone, Error)]
pub enum FolnerError {
    #[error("Følner sequences are supported over Z and Z2 only, not {0}")]
    UnsupportedAmbient(Ambient),
    #[error("explicit sequence member {0} is empty")]
    EmptyMember(usize),
    #[error(
        "growth inequality violated at index {index}: |F_{index}| = {size} but the bound requires > {bound}"
    )]
    GrowthViolated { index: usize, size: u64, bound: u64 },
    #[error("index {0} out of range for the explicit sequence")]
    OutOfRange(usize),
    #[error(transparent)]
    Set(#[from] SetError),
}

impl FolnerSeq {
    pub fn boxes(ambient: Ambient) -> Result<FolnerSeq, FolnerError> {
        if !matches!(ambient, Ambient::Z | Ambient::Z2) {
            return Err(FolnerError::UnsupportedAmbient(ambient));
        }
        Ok(FolnerSeq {
            ambient,
            shape: FolnerShape::Boxes,
        })
    }

    pub fn explicit(ambient: Ambient, sets: Vec<BTreeSet<Element>>) -> Result<FolnerSeq, FolnerError> {
        if !matches!(ambient, Ambient::Z | Ambient::Z2) {
            return Err(FolnerError::UnsupportedAmbient(ambient));
        }
        for (i, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(FolnerError::EmptyMember(i + 1));
            }
        }
        Ok(FolnerSeq {
            ambient,
            shape: FolnerShape::Explicit(sets),
        })
    }

    /// Size of the n-th member (1-indexed).
    pub fn size(&self, n: usize) -> Result<u64, FolnerError> {
        match &self.shape {
            FolnerShape::Boxes => Ok(self.ambient.ball_size(n as u32)),
            FolnerShape::Explicit(sets) => sets
                .get(n - 1)
                .map(|s| s.len() as u64)
                .ok_or(FolnerError::OutOfRange(n)),
        }
    }

    /// Number of elements of `a` in the n-th member.
    pub fn count_in(&self, a: &SetExpr, n: usize) -> Result<u64, FolnerError> {
        let am = self.ambient;
        match &self.shape {
            FolnerShape::Boxes => {
                let mut count = 0;
                for i in 0..am.ball_size(n as u32) {
                    if a.member(am, &am.enumerate(i))? {
                        count += 1;
                    }
                }
                Ok(count)
            }
            FolnerShape::Explicit(sets) => {
                let set = sets.get(n - 1).ok_or(FolnerError::OutOfRange(n))?;
                let mut count = 0;
                for g in set {
                    if a.member(am, g)? {
                        count += 1;
                    }
                }
                Ok(count)
            }
        }
    }

    /// Materialize the n-th member.
    pub fn member_set(&self, n: usize) -> Result<BTreeSet<Element>, FolnerError> {
        match &self.shape {
            FolnerShape::Boxes => Ok(self.ambient.ball(n as u32).into_iter().collect()),
            FolnerShape::Explicit(sets) => {
                sets.get(n - 1).cloned().ok_or(FolnerError::OutOfRange(n))
            }
        }
    }

    /// The Følner quotient `|(g F_n) Δ F_n| / |F_n|` as an exact rational.
    pub fn quotient(&self, g: &Element, n: usize) -> Result<Rational, FolnerError> {
        let am = self.ambient;
        match &self.shape {
            FolnerShape::Boxes => {
                // Translating a box shifts it; the symmetric difference is
                // two slabs of thickness |shift| per axis. Computed exactly
                // from the geometry to stay cheap at n = 10^5.
                let size = am.ball_size(n as u32) as i64;
                let ni = n as i64;
                match (am, &g.payload) {
                    (Ambient::Z, _) => {
                        let s = g.as_int().unwrap_or(0).abs().min(2 * ni + 1);
                        Ok(Rational::new(2 * s, size))
                    }
                    (Ambient::Z2, _) => {
                        let (dx, dy) = g.as_pair().unwrap_or((0, 0));
                        let w = 2 * ni + 1;
                        let sx = dx.abs().min(w);
                        let sy = dy.abs().min(w);
                        // |shifted box ∩ box| = (w-sx)(w-sy)
                        let inter = (w - sx).max(0) * (w - sy).max(0);
                        Ok(Rational::new(2 * (w * w - inter), size))
                    }
                    _ => Err(FolnerError::UnsupportedAmbient(am)),
                }
            }
            FolnerShape::Explicit(sets) => {
                let set = sets.get(n - 1).ok_or(FolnerError::OutOfRange(n))?;
                let mut shifted = BTreeSet::new();
                for x in set {
                    shifted.insert(am.mul(g, x).map_err(SetError::from)?);
                }
                let sym = shifted.symmetric_difference(set).count() as i64;
                Ok(Rational::new(sym, set.len() as i64))
            }
        }
    }
}

/// Result of a density computation.
#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub value: Rational,
    /// True when the value is a closed form, not a horizon estimate.
    pub exact: bool,
    /// The scan bound used for estimates.
    pub n_max: usize,
}

/// Upper density of `a` along the Følner sequence: exact `|residues|/period`
/// for eventually periodic sets, otherwise the max of `|F_n ∩ A| / |F_n|`
/// over `n <= n_max`.
pub fn upper_density(
    a: &SetExpr,
    folner: &FolnerSeq,
    n_max: usize,
) -> Result<DensityReport, FolnerError> {
    assert!(n_max >= 1);
    let am = folner.ambient;
    if am == Ambient::Z {
        if let Some(ep) = normalize_ep(am, a) {
            let (num, den) = ep.residue_density();
            return Ok(DensityReport {
                value: Rational::new(num as i64, den as i64),
                exact: true,
                n_max,
            });
        }
    }
    let mut best = Rational::new(0, 1);
    for n in 1..=n_max {
        let c = folner.count_in(a, n)? as i64;
        let s = folner.size(n)? as i64;
        let q = Rational::new(c, s);
        if q > best {
            best = q;
        }
    }
    Ok(DensityReport {
        value: best,
        exact: false,
        n_max,
    })
}

/// Upper Banach density over Z: exact for eventually periodic sets (any
/// window of one period carries exactly `|residues|` members), otherwise the
/// best sliding-window density over doubling window lengths up to
/// `window_max` — a horizon-stamped lower-bound estimate.
pub fn banach_density(a: &SetExpr, window_max: u32) -> Result<DensityReport, SetError> {
    assert!(window_max >= 1);
    let am = Ambient::Z;
    if let Some(ep) = normalize_ep(am, a) {
        let (num, den) = ep.residue_density();
        return Ok(DensityReport {
            value: Rational::new(num as i64, den as i64),
            exact: true,
            n_max: window_max as usize,
        });
    }
    // Materialize membership on [-4W, 4W] and slide windows of doubling
    // lengths across it.
    let radius = 4 * window_max as i64;
    let members: Vec<bool> = (-radius..=radius)
        .map(|n| a.member(am, &Element::int(am, n)))
        .collect::<Result<_, _>>()?;
    let mut best = Rational::new(0, 1);
    let mut w = 1u32;
    while w <= window_max {
        let len = w as usize;
        if len <= members.len() {
            let mut count = members[..len].iter().filter(|b| **b).count();
            let mut max_count = count;
            for i in len..members.len() {
                count += usize::from(members[i]);
                count -= usize::from(members[i - len]);
                max_count = max_count.max(count);
            }
            let q = Rational::new(max_count as i64, len as i64);
            if q > best {
                best = q;
            }
        }
        if w == window_max {
            break;
        }
        w = (w * 2).min(window_max);
    }
    Ok(DensityReport {
        value: best,
        exact: false,
        n_max: window_max as usize,
    })
}

/// Per-index report of the disjointification.
#[derive(Debug, Clone, Serialize)]
pub struct DisjointifyReport {
    /// The pairwise-disjoint sets E_n.
    pub parts: Vec<BTreeSet<Element>>,
    /// For each generator of the ambient, the quotient
    /// `|(g E_n) Δ E_n| / |E_n|` for each n.
    pub quotients: Vec<(Element, Vec<Rational>)>,
}

/// Disjointify an explicit Følner subsequence: `E_1 = F_1`,
/// `E_n = F_n ∖ (F_1 ∪ ... ∪ F_{n-1})`, gated by the growth inequality
/// `|F_n| > (n+1)(|F_1| + ... + |F_{n-1}|)` when `check_growth` is set.
pub fn folner_disjointify(
    folner: &FolnerSeq,
    check_growth: bool,
) -> Result<DisjointifyReport, FolnerError> {
    let FolnerShape::Explicit(sets) = &folner.shape else {
        return Err(FolnerError::UnsupportedAmbient(folner.ambient));
    };
    let am = folner.ambient;
    if check_growth {
        let mut sum: u64 = 0;
        for (idx, s) in sets.iter().enumerate() {
            let n = idx + 1;
            if n >= 2 {
                let bound = (n as u64 + 1) * sum;
                if s.len() as u64 <= bound {
                    return Err(FolnerError::GrowthViolated {
                        index: n,
                        size: s.len() as u64,
                        bound,
                    });
                }
            }
            sum += s.len() as u64;
        }
    }
    let mut parts: Vec<BTreeSet<Element>> = Vec::with_capacity(sets.len());
    let mut union: BTreeSet<Element> = BTreeSet::new();
    for s in sets {
        let e: BTreeSet<Element> = s.difference(&union).cloned().collect();
        union.extend(s.iter().cloned());
        parts.push(e);
    }
    let generators: Vec<Element> = match am {
        Ambient::Z => vec![Element::int(am, 1)],
        Ambient::Z2 => vec![Element::pair(1, 0), Element::pair(0, 1)],
        _ => return Err(FolnerError::UnsupportedAmbient(am)),
    };
    let mut quotients = Vec::new();
    for g in generators {
        let mut qs = Vec::with_capacity(parts.len());
        for e in &parts {
            if e.is_empty() {
                qs.push(Rational::new(0, 1));
                continue;
            }
            let mut shifted = BTreeSet::new();
            for x in e {
                shifted.insert(am.mul(&g, x).map_err(SetError::from)?);
            }
            let sym = shifted.symmetric_difference(e).count() as i64;
            qs.push(Rational::new(sym, e.len() as i64));
        }
        quotients.push((g, qs));
    }
    Ok(DisjointifyReport { parts, quotients })
}

/// Convenience: interval boxes `[-r, r]` over Z as explicit sets.
pub fn z_boxes(radii: &[i64]) -> FolnerSeq {
    let sets: Vec<BTreeSet<Element>> = radii
        .iter()
        .map(|r| (-r..=*r).map(|n| Element::int(Ambient::Z, n)).collect())
        .collect();
    FolnerSeq::explicit(Ambient::Z, sets).expect("Z is supported")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evens_density_is_half_exact() {
        let folner = FolnerSeq::boxes(Ambient::Z).unwrap();
        let r = upper_density(&SetExpr::ep(0, 2, [0]), &folner, 100).unwrap();
        assert!(r.exact);
        assert_eq!(r.value, Rational::new(1, 2));
        // Cross-check against a direct count at n = 1000.
        let c = folner.count_in(&SetExpr::ep(0, 2, [0]), 1000).unwrap();
        let direct = Rational::new(c as i64, folner.size(1000).unwrap() as i64);
        assert_eq!(direct, Rational::new(1001, 2001));
    }

    #[test]
    fn full_set_density_one() {
        let folner = FolnerSeq::boxes(Ambient::Z).unwrap();
        let r = upper_density(&SetExpr::Full, &folner, 10).unwrap();
        assert_eq!(r.value, Rational::new(1, 1));
    }

    #[test]
    fn two_fifths_exact_with_count_oracle() {
        let a = SetExpr::ep(0, 5, [0, 1]);
        let folner = FolnerSeq::boxes(Ambient::Z).unwrap();
        let r = upper_density(&a, &folner, 50).unwrap();
        assert!(r.exact);
        assert_eq!(r.value, Rational::new(2, 5));
        // Count oracle over one full period window.
        let mut count = 0;
        for n in 0..5i64 {
            if a.member(Ambient::Z, &Element::int(Ambient::Z, n)).unwrap() {
                count += 1;
            }
        }
        assert_eq!(count, 2);
    }

    #[test]
    fn banach_evens_half() {
        let r = banach_density(&SetExpr::ep(0, 2, [0]), 64).unwrap();
        assert!(r.exact);
        assert_eq!(r.value, Rational::new(1, 2));
    }

    #[test]
    fn banach_cofinite_one() {
        let a = SetExpr::complement(SetExpr::finite([Element::int(Ambient::Z, 3)]));
        let r = banach_density(&a, 64).unwrap();
        assert!(r.exact);
        assert_eq!(r.value, Rational::new(1, 1));
    }

    #[test]
    fn banach_blocks_reach_one_by_window_scan() {
        // Union of blocks [2^j, 2^j + j]: thick, so the sliding windows find
        // fully covered stretches and the lower bound reaches 1.
        let blocks = SetExpr::predicate("pow2-blocks", None, |_, g| {
            let n = g.as_int().unwrap_or(-1);
            if n < 2 {
                return false;
            }
            let j = 63 - (n as u64).leading_zeros() as i64;
            let base = 1i64 << j;
            n >= base && n <= base + j
        });
        let r = banach_density(&blocks, 1 << 14).unwrap();
        assert!(!r.exact);
        assert_eq!(r.value, Rational::new(1, 1));
    }

    #[test]
    fn box_quotient_closed_form_matches_direct() {
        let folner = FolnerSeq::boxes(Ambient::Z).unwrap();
        let one = Element::int(Ambient::Z, 1);
        let q = folner.quotient(&one, 100).unwrap();
        assert_eq!(q, Rational::new(2, 201));
        // Direct computation on materialized sets.
        let direct = z_boxes(&[100]).quotient(&one, 1).unwrap();
        assert_eq!(q, direct);
        // Z2 cross-check.
        let f2 = FolnerSeq::boxes(Ambient::Z2).unwrap();
        let g = Element::pair(1, 0);
        let q2 = f2.quotient(&g, 10).unwrap();
        let set: BTreeSet<Element> = Ambient::Z2.ball(10).into_iter().collect();
        let shifted: BTreeSet<Element> = set
            .iter()
            .map(|x| Ambient::Z2.mul(&g, x).unwrap())
            .collect();
        let sym = shifted.symmetric_difference(&set).count() as i64;
        assert_eq!(q2, Rational::new(sym, set.len() as i64));
    }

    #[test]
    fn disjointify_growth_holds_and_parts_disjoint() {
        // Radii chosen so |F_n| > (n+1) * (|F_1| + ... + |F_{n-1}|).
        let folner = z_boxes(&[2, 8, 45, 283, 2041]);
        let report = folner_disjointify(&folner, true).unwrap();
        for i in 0..report.parts.len() {
            for j in (i + 1)..report.parts.len() {
                assert!(report.parts[i].is_disjoint(&report.parts[j]));
            }
        }
        // Quotient at n = 5 below 1e-2.
        let (_, qs) = &report.quotients[0];
        assert!(qs[4] < Rational::new(1, 100), "quotient {}", qs[4]);
    }

    #[test]
    fn disjointify_single_term_is_f1() {
        let folner = z_boxes(&[3]);
        let report = folner_disjointify(&folner, true).unwrap();
        assert_eq!(report.parts[0], folner.member_set(1).unwrap());
    }

    #[test]
    fn disjointify_rejects_linear_boxes() {
        // Boxes [-n, n] violate the growth inequality at n = 2:
        // |F_2| = 5 while the bound requires > 3 * 3 = 9.
        let folner = z_boxes(&[1, 2, 3]);
        let err = folner_disjointify(&folner, true).unwrap_err();
        match err {
            FolnerError::GrowthViolated { index, size, bound } => {
                assert_eq!(index, 2);
                assert_eq!(size, 5);
                assert_eq!(bound, 9);
            }
            other => panic!("unexpected error {other}"),
        }
    }
}
