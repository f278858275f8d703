//! Horizon-certified classification of set expressions: thick, syndetic,
//! piecewise syndetic.
//!
//! Eventually periodic inputs are decided exactly through the closed form;
//! everything else is certified relative to the scan horizon, never silently.
//! Every `CertifiedYes` carries a witness that re-checks by direct
//! membership queries, every `CertifiedNo` a refuter.



use serde::Serialize;

use crate::ambient::{Ambient, Element};
use crate::error::SetError;
use crate::setexpr::{normalize_ep, EpClosed, SetExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictStatus {
    CertifiedYes,
    CertifiedNo,
    Inconclusive,
}

/// A horizon-stamped classification outcome.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub horizon: u32,
    /// True when the verdict comes from a closed form rather than a scan.
    pub exact: bool,
    pub witness: Option<Witness>,
    pub refuter: Option<Refuter>,
}

impl Verdict {
    pub fn yes(horizon: u32, exact: bool, witness: Witness) -> Verdict {
        Verdict {
            status: VerdictStatus::CertifiedYes,
            horizon,
            exact,
            witness: Some(witness),
            refuter: None,
        }
    }

    pub fn no(horizon: u32, exact: bool, refuter: Refuter) -> Verdict {
        Verdict {
            status: VerdictStatus::CertifiedNo,
            horizon,
            exact,
            witness: None,
            refuter: Some(refuter),
        }
    }

    pub fn inconclusive(horizon: u32) -> Verdict {
        Verdict {
            status: VerdictStatus::Inconclusive,
            horizon,
            exact: false,
            witness: None,
            refuter: None,
        }
    }

    pub fn is_yes(&self) -> bool {
        self.status == VerdictStatus::CertifiedYes
    }

    pub fn is_no(&self) -> bool {
        self.status == VerdictStatus::CertifiedNo
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum Witness {
    /// Per-level translators: `ball(level) * g` lies inside the set.
    Thick { levels: Vec<(u32, Element)> },
    /// Bound set K with `K^-1 A` covering the scanned ball.
    Syndetic { bound_set: Vec<Element> },
    /// Pair (thick part, syndetic part) with `B ∩ C ⊂ A` on the ball.
    Pws {
        thick_part: SetExpr,
        synd_part: SetExpr,
        thick: Box<Verdict>,
        synd: Box<Verdict>,
    },
    /// Sample elements (e.g. for infinitude at horizon).
    Elements { sample: Vec<Element>, count: u64 },
    /// A positive density value as an exact rational.
    Density { numerator: i64, denominator: i64 },
}

#[derive(Debug, Clone, Serialize)]
pub enum Refuter {
    /// A residue class missed by the periodic part: every window of one
    /// period contains a position in this class outside the set.
    MissingResidue { residue: u64, period: u64 },
    /// The set is finite (closed form), hence fails the property.
    FiniteSet { size: u64 },
    /// No candidate K up to `tried_level` covers `element`.
    UncoveredElement { element: Element, tried_level: u32 },
    /// No translate of `ball(level)` found inside the scan ball.
    NoBallTranslate { level: u32, search_level: u32 },
    /// The set meets the scan ball in nothing.
    EmptyOnBall { level: u32 },
    /// Property refuted by a sub-verdict (e.g. pws via parts).
    Because { reason: String },
}

/// Search the leftmost (enumeration-order) translator g with
/// `ball(level) * g` inside the set and inside `ball(search_level)`.
pub fn find_ball_translate(
    am: Ambient,
    a: &SetExpr,
    level: u32,
    search_level: u32,
) -> Result<Option<Element>, SetError> {
    if search_level < level {
        return Ok(None);
    }
    let ball = am.ball(level);
    let limit = am.ball_size(search_level - level);
    'outer: for i in 0..limit {
        let g = am.enumerate(i);
        for k in &ball {
            let kg = am.mul(k, &g)?;
            if !a.member(am, &kg)? {
                continue 'outer;
            }
        }
        return Ok(Some(g));
    }
    Ok(None)
}

/// Re-check a thick witness by direct membership queries.
pub fn verify_thick_witness(am: Ambient, a: &SetExpr, witness: &Witness) -> Result<bool, SetError> {
    let Witness::Thick { levels } = witness else {
        return Ok(false);
    };
    for (level, g) in levels {
        for k in am.ball(*level) {
            if !a.member(am, &am.mul(&k, g)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Re-check a syndetic witness: K^-1 A covers ball(horizon).
pub fn verify_syndetic_witness(
    am: Ambient,
    a: &SetExpr,
    witness: &Witness,
    horizon: u32,
) -> Result<bool, SetError> {
    let Witness::Syndetic { bound_set } = witness else {
        return Ok(false);
    };
    'outer: for i in 0..am.ball_size(horizon) {
        let x = am.enumerate(i);
        for k in bound_set {
            if a.member(am, &am.mul(k, &x)?)? {
                continue 'outer;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Thick
// ---------------------------------------------------------------------------

/// How many demonstrative witness levels an exact thick verdict stores.
const EXACT_WITNESS_LEVELS: u32 = 5;

pub fn classify_thick(am: Ambient, a: &SetExpr, horizon: u32) -> Result<Verdict, SetError> {
    assert!(horizon >= 1);
    if let Some(ep) = normalize_ep(am, a) {
        return thick_ep(am, a, &ep, horizon);
    }
    thick_scan(am, a, horizon)
}

fn thick_ep(am: Ambient, a: &SetExpr, ep: &EpClosed, horizon: u32) -> Result<Verdict, SetError> {
    if ep.residues.len() as u64 == ep.period {
        // Cofinite modulo the exceptions: truly thick. Store demonstrative
        // translators beyond the exceptional window.
        let beyond = ep
            .minus
            .iter()
            .next_back()
            .map(|m| m.unsigned_abs())
            .unwrap_or(0) as i64;
        let mut levels = Vec::new();
        for level in 1..=EXACT_WITNESS_LEVELS.min(horizon) {
            let g = beyond + 1 + level as i64;
            levels.push((level, Element::int(am, g)));
        }
        let witness = Witness::Thick { levels };
        debug_assert!(verify_thick_witness(am, a, &witness)?);
        Ok(Verdict::yes(horizon, true, witness))
    } else {
        let missing = (0..ep.period)
            .find(|r| !ep.residues.contains(r))
            .expect("not full");
        Ok(Verdict::no(
            horizon,
            true,
            Refuter::MissingResidue {
                residue: missing,
                period: ep.period,
            },
        ))
    }
}

/// Materialized membership for N0/Z: (window, lowest position).
fn int_window(am: Ambient, a: &SetExpr, horizon: u32) -> Result<Option<(Vec<bool>, i64)>, SetError> {
    let h = horizon as i64;
    let lo = match am {
        Ambient::N0 => 0,
        Ambient::Z => -h,
        _ => return Ok(None),
    };
    let window: Vec<bool> = (lo..=h)
        .map(|n| a.member(am, &Element::int(am, n)))
        .collect::<Result<_, _>>()?;
    Ok(Some((window, lo)))
}

/// Maximal runs of consecutive members as (start, end) positions.
fn runs_of(window: &[bool], lo: i64) -> Vec<(i64, i64)> {
    let mut runs = Vec::new();
    let mut start: Option<i64> = None;
    for (i, v) in window.iter().enumerate() {
        let pos = lo + i as i64;
        match (start, v) {
            (None, true) => start = Some(pos),
            (Some(s), false) => {
                runs.push((s, pos - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, lo + window.len() as i64 - 1));
    }
    runs
}

/// Enumeration-leftmost translator for level `level` among the runs, or
/// None. Over Z the translate is [g-l, g+l]; over N0 it is [g, g+l].
fn leftmost_translator(am: Ambient, runs: &[(i64, i64)], level: u32) -> Option<i64> {
    let l = level as i64;
    let mut best: Option<u64> = None;
    let mut best_g = 0;
    for (s, e) in runs {
        let (g_lo, g_hi) = match am {
            Ambient::N0 => (*s, e - l),
            _ => (s + l, e - l),
        };
        if g_lo > g_hi {
            continue;
        }
        // Smallest enumeration index in [g_lo, g_hi].
        let g = if am == Ambient::N0 {
            g_lo
        } else if g_lo <= 0 && 0 <= g_hi {
            0
        } else if g_lo > 0 {
            g_lo
        } else {
            g_hi
        };
        let idx = am.index_of(&Element::int(am, g));
        if best.map(|b| idx < b).unwrap_or(true) {
            best = Some(idx);
            best_g = g;
        }
    }
    best.map(|_| best_g)
}

fn thick_scan(am: Ambient, a: &SetExpr, horizon: u32) -> Result<Verdict, SetError> {
    let mut levels = Vec::new();
    let max_level = horizon.saturating_sub(1).max(1);
    if let Some((window, lo)) = int_window(am, a, horizon)? {
        let runs = runs_of(&window, lo);
        for level in 1..=max_level {
            match leftmost_translator(am, &runs, level) {
                Some(g) => levels.push((level, Element::int(am, g))),
                None => break,
            }
        }
    } else {
        for level in 1..=max_level {
            match find_ball_translate(am, a, level, horizon)? {
                Some(g) => levels.push((level, g)),
                None => break,
            }
        }
    }
    if levels.is_empty() {
        Ok(Verdict::no(
            horizon,
            false,
            Refuter::NoBallTranslate {
                level: 1,
                search_level: horizon,
            },
        ))
    } else {
        Ok(Verdict::yes(horizon, false, Witness::Thick { levels }))
    }
}

/// Highest level certified by a thick verdict's witness.
pub fn thick_level(v: &Verdict) -> u32 {
    match &v.witness {
        Some(Witness::Thick { levels }) => levels.iter().map(|(l, _)| *l).max().unwrap_or(0),
        _ => 0,
    }
}

// ---------------------------------------------------------------------------
// Syndetic
// ---------------------------------------------------------------------------

pub fn classify_syndetic(am: Ambient, a: &SetExpr, horizon: u32) -> Result<Verdict, SetError> {
    assert!(horizon >= 1);
    if let Some(ep) = normalize_ep(am, a) {
        return syndetic_ep(am, a, &ep, horizon);
    }
    syndetic_scan(am, a, horizon)
}

fn syndetic_ep(am: Ambient, a: &SetExpr, ep: &EpClosed, horizon: u32) -> Result<Verdict, SetError> {
    if ep.residues.is_empty() {
        let size = ep.plus.len() as u64;
        return Ok(Verdict::no(horizon, true, Refuter::FiniteSet { size }));
    }
    let p = ep.period as i64;
    let span = if ep.plus.is_empty() && ep.minus.is_empty() {
        // Pure periodic part: any window of one period meets the set.
        p
    } else {
        // Exact maximal gap: scan the exceptional window plus one period of
        // slack on each side, then fall back to the periodic gap beyond it.
        let lo = ep
            .plus
            .iter()
            .chain(ep.minus.iter())
            .min()
            .copied()
            .unwrap_or(0)
            - 2 * p;
        let hi = ep
            .plus
            .iter()
            .chain(ep.minus.iter())
            .max()
            .copied()
            .unwrap_or(0)
            + 2 * p;
        let lo = if am == Ambient::N0 { lo.max(0) } else { lo };
        let mut max_gap = periodic_max_gap(ep);
        let mut prev: Option<i64> = None;
        if am == Ambient::N0 {
            prev = Some(-1); // gap measured from the start of the line
        }
        for n in lo..=hi {
            if ep.member(n) {
                if let Some(q) = prev {
                    max_gap = max_gap.max(n - q);
                }
                prev = Some(n);
            }
        }
        max_gap
    };
    let k: Vec<Element> = (0..span).map(|i| Element::int(am, i)).collect();
    let witness = Witness::Syndetic { bound_set: k };
    debug_assert!(verify_syndetic_witness(am, a, &witness, horizon.min(200))?);
    Ok(Verdict::yes(horizon, true, witness))
}

/// Largest distance between consecutive members of the pure periodic part.
fn periodic_max_gap(ep: &EpClosed) -> i64 {
    let rs: Vec<i64> = ep.residues.iter().map(|r| *r as i64).collect();
    let p = ep.period as i64;
    if rs.is_empty() {
        return p;
    }
    let mut max_gap = rs[0] + p - rs[rs.len() - 1];
    for w in rs.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    max_gap
}

fn syndetic_scan(am: Ambient, a: &SetExpr, horizon: u32) -> Result<Verdict, SetError> {
    // Level of the largest candidate bound set K = ball(l) tried by the scan.
    let max_k_level = match am {
        Ambient::N0 | Ambient::Z => (horizon / 4).max(1),
        Ambient::Z2 | Ambient::F2 => (horizon / 2).max(1),
    };
    // Coverage is certified on the region whose K-neighborhoods stay inside
    // the scan ball, so every membership query is within the horizon.
    let region = horizon.saturating_sub(max_k_level).max(1);
    let mut needed: u32 = 1;
    if let Some((window, lo)) = int_window(am, a, horizon)? {
        // Distance from each position to the nearest member: one forward
        // and (for Z) one backward sweep. The monoid only looks forward.
        let n = window.len();
        let big = i64::MAX / 4;
        let mut forward = vec![big; n];
        let mut next = big;
        for i in (0..n).rev() {
            if window[i] {
                next = 0;
            } else if next < big {
                next += 1;
            }
            forward[i] = next;
        }
        let mut backward = vec![big; n];
        if am == Ambient::Z {
            let mut prev = big;
            for i in 0..n {
                if window[i] {
                    prev = 0;
                } else if prev < big {
                    prev += 1;
                }
                backward[i] = prev;
            }
        }
        let r = region as i64;
        let (x_lo, x_hi) = if am == Ambient::N0 { (0, r) } else { (-r, r) };
        for x in x_lo..=x_hi {
            let i = (x - lo) as usize;
            let dist = forward[i].min(backward[i]);
            if dist <= max_k_level as i64 {
                needed = needed.max((dist as u32).max(1));
            } else {
                return Ok(Verdict::no(
                    horizon,
                    false,
                    Refuter::UncoveredElement {
                        element: Element::int(am, x),
                        tried_level: max_k_level,
                    },
                ));
            }
        }
    } else {
        for i in 0..am.ball_size(region) {
            let x = am.enumerate(i);
            let mut covered_at: Option<u32> = None;
            for j in 0..am.ball_size(max_k_level) {
                let kx = am.mul(&am.enumerate(j), &x)?;
                if a.member(am, &kx)? {
                    covered_at = Some(am.norm(&am.enumerate(j)));
                    break;
                }
            }
            match covered_at {
                Some(l) => needed = needed.max(l.max(1)),
                None => {
                    return Ok(Verdict::no(
                        horizon,
                        false,
                        Refuter::UncoveredElement {
                            element: x,
                            tried_level: max_k_level,
                        },
                    ));
                }
            }
        }
    }
    let witness = Witness::Syndetic {
        bound_set: am.ball(needed),
    };
    Ok(Verdict::yes(horizon, false, witness))
}

// ---------------------------------------------------------------------------
// Piecewise syndetic
// ---------------------------------------------------------------------------

pub fn classify_pws(am: Ambient, a: &SetExpr, horizon: u32) -> Result<Verdict, SetError> {
    assert!(horizon >= 1);
    if let Some(ep) = normalize_ep(am, a) {
        return pws_ep(am, a, &ep, horizon);
    }
    // Structural decompositions first, then the syndetic-whole fallback.
    if let Some(v) = pws_structural(am, a, horizon)? {
        return Ok(v);
    }
    let synd = classify_syndetic(am, a, horizon)?;
    if synd.is_yes() {
        let thick = classify_thick(am, &SetExpr::Full, horizon)?;
        let witness = Witness::Pws {
            thick_part: SetExpr::Full,
            synd_part: a.clone(),
            thick: Box::new(thick),
            synd: Box::new(synd),
        };
        return Ok(Verdict::yes(horizon, false, witness));
    }
    Ok(Verdict::inconclusive(horizon))
}

fn pws_ep(am: Ambient, a: &SetExpr, ep: &EpClosed, horizon: u32) -> Result<Verdict, SetError> {
    if ep.residues.is_empty() {
        return Ok(Verdict::no(
            horizon,
            true,
            Refuter::FiniteSet {
                size: ep.plus.len() as u64,
            },
        ));
    }
    // B = complement of the finite removed part (thick), C = the periodic
    // part (syndetic); B ∩ C ⊂ A holds by construction and is re-verified.
    let thick_part = if ep.minus.is_empty() {
        SetExpr::Full
    } else {
        SetExpr::complement(SetExpr::finite(
            ep.minus.iter().map(|n| Element::int(am, *n)),
        ))
    };
    let synd_part = SetExpr::EventuallyPeriodic {
        offset: 0,
        period: ep.period,
        residues: ep.residues.clone(),
    };
    let thick = classify_thick(am, &thick_part, horizon)?;
    let synd = classify_syndetic(am, &synd_part, horizon)?;
    debug_assert!(thick.is_yes() && synd.is_yes());
    verify_pws_inclusion(am, a, &thick_part, &synd_part, horizon.min(500))?;
    Ok(Verdict::yes(
        horizon,
        true,
        Witness::Pws {
            thick_part,
            synd_part,
            thick: Box::new(thick),
            synd: Box::new(synd),
        },
    ))
}

/// Check `B ∩ C ⊂ A` elementwise on `ball(level)`.
pub fn verify_pws_inclusion(
    am: Ambient,
    a: &SetExpr,
    thick_part: &SetExpr,
    synd_part: &SetExpr,
    level: u32,
) -> Result<(), SetError> {
    for i in 0..am.ball_size(level) {
        let x = am.enumerate(i);
        if thick_part.member(am, &x)? && synd_part.member(am, &x)? && !a.member(am, &x)? {
            return Err(SetError::Precondition {
                reason: "thick ∩ syndetic witness escapes the set".into(),
                offender: x.describe(),
            });
        }
    }
    Ok(())
}

fn pws_structural(am: Ambient, a: &SetExpr, horizon: u32) -> Result<Option<Verdict>, SetError> {
    match a {
        SetExpr::Full => {
            let thick = classify_thick(am, &SetExpr::Full, horizon)?;
            let synd = classify_syndetic(am, &SetExpr::Full, horizon)?;
            Ok(Some(Verdict::yes(
                horizon,
                false,
                Witness::Pws {
                    thick_part: SetExpr::Full,
                    synd_part: SetExpr::Full,
                    thick: Box::new(thick),
                    synd: Box::new(synd),
                },
            )))
        }
        SetExpr::Finite(s) => Ok(Some(Verdict::no(
            horizon,
            true,
            Refuter::FiniteSet {
                size: s.len() as u64,
            },
        ))),
        SetExpr::Intersection(x, y) => {
            for (b, c) in [(x, y), (y, x)] {
                let thick = classify_thick(am, b, horizon)?;
                if !thick.is_yes() {
                    continue;
                }
                let synd = classify_syndetic(am, c, horizon)?;
                if !synd.is_yes() {
                    continue;
                }
                verify_pws_inclusion(am, a, b, c, horizon.min(500))?;
                return Ok(Some(Verdict::yes(
                    horizon,
                    thick.exact && synd.exact,
                    Witness::Pws {
                        thick_part: (**b).clone(),
                        synd_part: (**c).clone(),
                        thick: Box::new(thick),
                        synd: Box::new(synd),
                    },
                )));
            }
            Ok(None)
        }
        SetExpr::Union(x, y) => {
            // Upward heredity: a pws subset certifies the union.
            for part in [x, y] {
                let v = classify_pws(am, part, horizon)?;
                if v.is_yes() {
                    if let Some(Witness::Pws {
                        thick_part,
                        synd_part,
                        ..
                    }) = &v.witness
                    {
                        verify_pws_inclusion(am, a, thick_part, synd_part, horizon.min(500))?;
                    }
                    return Ok(Some(v));
                }
            }
            Ok(None)
        }
        SetExpr::Translate { by, inverse, base } => {
            let v = classify_pws(am, base, horizon)?;
            if !v.is_yes() {
                return Ok(None);
            }
            let Some(Witness::Pws {
                thick_part,
                synd_part,
                ..
            }) = &v.witness
            else {
                return Ok(None);
            };
            let tb = SetExpr::Translate {
                by: by.clone(),
                inverse: *inverse,
                base: Box::new(thick_part.clone()),
            };
            let tc = SetExpr::Translate {
                by: by.clone(),
                inverse: *inverse,
                base: Box::new(synd_part.clone()),
            };
            let thick = classify_thick(am, &tb, horizon)?;
            let synd = classify_syndetic(am, &tc, horizon)?;
            if thick.is_yes() && synd.is_yes() {
                verify_pws_inclusion(am, a, &tb, &tc, horizon.min(500))?;
                return Ok(Some(Verdict::yes(
                    horizon,
                    false,
                    Witness::Pws {
                        thick_part: tb,
                        synd_part: tc,
                        thick: Box::new(thick),
                        synd: Box::new(synd),
                    },
                )));
            }
            Ok(None)
        }
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_set_is_thick() {
        let v = classify_thick(Ambient::Z, &SetExpr::Full, 50).unwrap();
        assert!(v.is_yes() && v.exact);
    }

    #[test]
    fn ep_two_of_four_not_thick() {
        // max run 2, refuted exactly
        let v = classify_thick(Ambient::Z, &SetExpr::ep(0, 4, [0, 1]), 100).unwrap();
        assert!(v.is_no() && v.exact);
        assert!(matches!(
            v.refuter,
            Some(Refuter::MissingResidue { period: 4, .. })
        ));
    }

    #[test]
    fn fs_powers_certify_thick_runs_by_scan() {
        // FS({1,2,4,...,2^k}) = [1, 2^(k+1)-1]: the scan finds ball
        // translates well past level k-1 within horizon 2^(k+1).
        let k = 6u32;
        let gens: Vec<Element> = (0..=k)
            .map(|i| Element::int(Ambient::N0, 1i64 << i))
            .collect();
        let fs = SetExpr::fs_gen(gens);
        let horizon = 1u32 << (k + 1);
        let v = classify_thick(Ambient::N0, &fs, horizon).unwrap();
        assert!(v.is_yes() && !v.exact);
        assert!(thick_level(&v) >= k - 1, "level {}", thick_level(&v));
        assert!(verify_thick_witness(Ambient::N0, &fs, v.witness.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn ep_syndetic_with_period_bound_set() {
        let v = classify_syndetic(Ambient::Z, &SetExpr::ep(0, 4, [0, 1]), 100).unwrap();
        assert!(v.is_yes() && v.exact);
        let Some(Witness::Syndetic { bound_set }) = &v.witness else {
            panic!("missing witness")
        };
        let ints: Vec<i64> = bound_set.iter().map(|e| e.as_int().unwrap()).collect();
        assert_eq!(ints, vec![0, 1, 2, 3]);
    }

    #[test]
    fn evens_syndetic_k01() {
        let v = classify_syndetic(Ambient::Z, &SetExpr::ep(0, 2, [0]), 100).unwrap();
        let Some(Witness::Syndetic { bound_set }) = &v.witness else {
            panic!("missing witness")
        };
        let ints: Vec<i64> = bound_set.iter().map(|e| e.as_int().unwrap()).collect();
        assert_eq!(ints, vec![0, 1]);
    }

    #[test]
    fn empty_residues_not_syndetic() {
        let v = classify_syndetic(Ambient::Z, &SetExpr::ep(0, 3, Vec::<u64>::new()), 60).unwrap();
        assert!(v.is_no() && v.exact);
    }

    #[test]
    fn finite_backed_set_refuted_at_horizon_for_syndetic() {
        // Thick-but-bounded: the span [1, 127] has an unmet window beyond it.
        let gens: Vec<Element> = (0..7).map(|i| Element::int(Ambient::N0, 1i64 << i)).collect();
        let fs = SetExpr::fs_gen(gens);
        let v = classify_syndetic(Ambient::N0, &fs, 512).unwrap();
        assert!(v.is_no() && !v.exact);
        assert!(matches!(v.refuter, Some(Refuter::UncoveredElement { .. })));
    }

    #[test]
    fn evens_pws_via_exact_form() {
        let v = classify_pws(Ambient::Z, &SetExpr::ep(0, 2, [0]), 100).unwrap();
        assert!(v.is_yes() && v.exact);
        let Some(Witness::Pws { thick_part, .. }) = &v.witness else {
            panic!("missing witness")
        };
        assert!(matches!(thick_part, SetExpr::Full));
    }

    #[test]
    fn finite_set_not_pws() {
        let v = classify_pws(
            Ambient::Z,
            &SetExpr::finite([Element::int(Ambient::Z, 1)]),
            50,
        )
        .unwrap();
        assert!(v.is_no() && v.exact);
    }

    #[test]
    fn block_union_intersect_evens_pws_within_horizon() {
        // Union of blocks [2^j, 2^j + j] is thick by scan; intersecting with
        // the evens keeps it piecewise syndetic, witnessed structurally.
        let blocks = SetExpr::predicate("pow2-blocks", None, |_, g| {
            let n = g.as_int().unwrap_or(-1);
            if n < 2 {
                return false;
            }
            let j = 63 - (n as u64).leading_zeros() as i64;
            let base = 1i64 << j;
            n >= base && n <= base + j
        });
        let expr = SetExpr::intersection(blocks, SetExpr::ep(0, 2, [0]));
        let v = classify_pws(Ambient::N0, &expr, 2048).unwrap();
        assert!(v.is_yes());
        let Some(Witness::Pws { thick, synd, .. }) = &v.witness else {
            panic!("missing witness")
        };
        assert!(thick.is_yes() && synd.is_yes());
    }

    #[test]
    fn ep_verdicts_never_inconclusive() {
        for residues in [vec![], vec![0], vec![0, 2], vec![0, 1, 2, 3]] {
            let e = SetExpr::ep(0, 4, residues);
            for f in [classify_thick, classify_syndetic, classify_pws] {
                let v = f(Ambient::Z, &e, 64).unwrap();
                assert_ne!(v.status, VerdictStatus::Inconclusive);
                assert!(v.exact);
            }
        }
    }
}
