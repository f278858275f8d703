//! Witness constructors: the separator of a finite pair, greedy separated
//! subsets with covering certificates, disjoint thick blocks, and the
//! dilation split of a piecewise syndetic target over N0.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::ambient::{Ambient, Element};
use crate::classify::{classify_syndetic, classify_thick, Verdict};
use crate::error::SetError;
use crate::setexpr::SetExpr;

/// Find `h` in `h_set` with `F ∩ F·h = ∅`. Whenever `|H| > |F|^2` such an
/// `h` exists: each equation `f1 = f2 h` pins down at most one `h`, so at
/// most `|F|^2` members of H can fail.
pub fn separator(
    am: Ambient,
    f_set: &BTreeSet<Element>,
    h_set: &[Element],
) -> Result<Option<Element>, SetError> {
    // Collect the forbidden quotients f2^-1 f1.
    let mut forbidden = BTreeSet::new();
    for f1 in f_set {
        for f2 in f_set {
            if let Some(q) = am.left_quotient(f2, f1)? {
                forbidden.insert(q);
            }
        }
    }
    for h in h_set {
        if !forbidden.contains(h) {
            return Ok(Some(h.clone()));
        }
    }
    Ok(None)
}

/// Direct cross-check for `separator`: verify `F ∩ F·h = ∅` by forming the
/// translate elementwise.
pub fn separator_check(
    am: Ambient,
    f_set: &BTreeSet<Element>,
    h: &Element,
) -> Result<bool, SetError> {
    for f in f_set {
        let fh = am.mul(f, h)?;
        if f_set.contains(&fh) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Output of the greedy separated-subset construction.
#[derive(Debug, Clone, Serialize)]
pub struct SeparatedSubset {
    /// Selected elements, in enumeration order; the identity is excluded
    /// and acts as an implicit member for the separation constraint.
    pub selected: Vec<Element>,
    pub certificate: SeparationCertificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparationCertificate {
    pub horizon: u32,
    /// Pairwise `K b1 ∩ K b2 = ∅` over selected ∪ {identity} re-checked.
    pub separation_ok: bool,
    /// Every member of the set inside the ball lies in `K^-1 K (B ∪ {e})`.
    pub covering_ok: bool,
    pub scanned: u64,
}

/// Greedy-in-enumeration-order maximal `B ⊂ set ∩ ball(horizon)` whose
/// K-translates are pairwise disjoint and disjoint from `K * identity`.
/// The certificate records the maximality consequence
/// `set ∩ ball(horizon) ⊂ K^-1 K (B ∪ {e})`.
pub fn separated_subset(
    am: Ambient,
    set: &SetExpr,
    k_set: &BTreeSet<Element>,
    horizon: u32,
) -> Result<SeparatedSubset, SetError> {
    let identity = am.identity();
    let k_of = |b: &Element| -> Result<BTreeSet<Element>, SetError> {
        k_set
            .iter()
            .map(|k| am.mul(k, b).map_err(SetError::from))
            .collect()
    };
    let mut selected: Vec<Element> = Vec::new();
    let mut occupied: BTreeSet<Element> = k_of(&identity)?;
    let total = am.ball_size(horizon);
    for i in 0..total {
        let g = am.enumerate(i);
        if g == identity || !set.member(am, &g)? {
            continue;
        }
        let kg = k_of(&g)?;
        if kg.iter().all(|x| !occupied.contains(x)) {
            occupied.extend(kg);
            selected.push(g);
        }
    }
    // Covering re-check: every rejected member collides with some chosen
    // translate, i.e. lies in K^-1 K (B ∪ {e}).
    let mut covering_ok = true;
    let mut scanned = 0;
    'outer: for i in 0..total {
        let g = am.enumerate(i);
        if !set.member(am, &g)? {
            continue;
        }
        scanned += 1;
        let kg = k_of(&g)?;
        for b in selected.iter().chain(std::iter::once(&identity)) {
            let kb = k_of(b)?;
            if kg.intersection(&kb).next().is_some() {
                continue 'outer;
            }
        }
        covering_ok = false;
        break;
    }
    // Separation re-check.
    let mut separation_ok = true;
    let members: Vec<&Element> = selected
        .iter()
        .chain(std::iter::once(&identity))
        .collect();
    'pairs: for (i, b1) in members.iter().enumerate() {
        for b2 in members.iter().skip(i + 1) {
            let k1 = k_of(b1)?;
            let k2 = k_of(b2)?;
            if k1.intersection(&k2).next().is_some() {
                separation_ok = false;
                break 'pairs;
            }
        }
    }
    Ok(SeparatedSubset {
        selected,
        certificate: SeparationCertificate {
            horizon,
            separation_ok,
            covering_ok,
            scanned,
        },
    })
}

/// The greedy separated subset as a guarantee-capped set expression, for
/// use as the syndetic part of later constructions.
pub fn separated_lazy(
    am: Ambient,
    set: &SetExpr,
    k_set: &BTreeSet<Element>,
    guarantee: u32,
) -> Result<SetExpr, SetError> {
    let s = separated_subset(am, set, k_set, guarantee)?;
    let members: BTreeSet<Element> = s.selected.into_iter().collect();
    let name = format!("sep[{}]", set.describe());
    Ok(SetExpr::predicate(name, Some(guarantee), move |_, g| {
        members.contains(g)
    }))
}

/// Disjoint blocks `A_n = ball(n) * g_n` inside a thick-certified set.
#[derive(Debug, Clone, Serialize)]
pub struct ThickBlocks {
    pub translators: Vec<Element>,
    pub blocks: Vec<BTreeSet<Element>>,
}

/// Build `count` pairwise-disjoint blocks `A_n = ball(n) * g_n` inside the
/// set. Translators are leftmost in enumeration order among those whose
/// ball translate stays inside the set and avoids the committed blocks;
/// this is the disjoint-block consequence of the thick-translate-set
/// search, kept feasible at finite horizon.
pub fn p1_witness_thick(
    am: Ambient,
    set: &SetExpr,
    count: u32,
    horizon: u32,
) -> Result<ThickBlocks, SetError> {
    let thick = classify_thick(am, set, horizon)?;
    if !thick.is_yes() {
        return Err(SetError::Precondition {
            reason: "set is not thick-certified at this horizon".into(),
            offender: set.describe(),
        });
    }
    let mut translators = Vec::new();
    let mut blocks: Vec<BTreeSet<Element>> = Vec::new();
    let mut committed: BTreeSet<Element> = BTreeSet::new();
    for n in 1..=count {
        let g_n = find_disjoint_ball_translate(am, set, n, &committed, horizon)?.ok_or_else(
            || {
                SetError::Horizon(format!(
                    "no admissible translator for block {n} within ball({horizon})"
                ))
            },
        )?;
        let block: BTreeSet<Element> = am
            .ball(n)
            .iter()
            .map(|k| am.mul(k, &g_n))
            .collect::<Result<_, _>>()?;
        committed.extend(block.iter().cloned());
        translators.push(g_n);
        blocks.push(block);
    }
    Ok(ThickBlocks {
        translators,
        blocks,
    })
}

/// Leftmost g with `ball(level) * g ⊂ set` and the translate disjoint from
/// `avoid`.
pub fn find_disjoint_ball_translate(
    am: Ambient,
    set: &SetExpr,
    level: u32,
    avoid: &BTreeSet<Element>,
    horizon: u32,
) -> Result<Option<Element>, SetError> {
    let ball = am.ball(level);
    let limit = am.ball_size(horizon);
    'outer: for i in 0..limit {
        let g = am.enumerate(i);
        for b in &ball {
            let bg = am.mul(b, &g)?;
            if !set.member(am, &bg)? || avoid.contains(&bg) {
                continue 'outer;
            }
        }
        return Ok(Some(g));
    }
    Ok(None)
}

/// `∪_{j=0..d-1} (d B + j) = {y : floor(y/d) ∈ B}` as one node: the exact
/// closed form when the base admits one, otherwise a floor-division
/// predicate.
pub fn dilation_window(d: u64, base: &SetExpr) -> SetExpr {
    if let Some(ep) = crate::setexpr::normalize_ep(Ambient::N0, base) {
        let period = ep.period.checked_mul(d);
        let exception_count = (ep.plus.len() + ep.minus.len()) as u64 * d;
        if let Some(period) = period {
            if period <= (1 << 16) && exception_count <= (1 << 14) {
                let mut residues = BTreeSet::new();
                for r in &ep.residues {
                    for j in 0..d {
                        residues.insert(r * d + j);
                    }
                }
                let spread = |src: &BTreeSet<i64>| -> BTreeSet<i64> {
                    src.iter()
                        .filter(|e| **e >= 0)
                        .flat_map(|e| (0..d as i64).map(move |j| e * d as i64 + j))
                        .collect()
                };
                let closed = crate::setexpr::EpClosed {
                    ambient: Ambient::N0,
                    period,
                    residues,
                    plus: spread(&ep.plus),
                    minus: spread(&ep.minus),
                };
                return closed.to_expr();
            }
        }
    }
    let base = base.clone();
    SetExpr::predicate(
        format!("window[{d},{}]", base.describe()),
        None,
        move |am, g| {
            let n = g.as_int().unwrap_or(-1);
            if n < 0 {
                return false;
            }
            let q = Element::int(am, n / d as i64);
            base.member(am, &q)
                .expect("dilated base set must be decidable")
        },
    )
}

/// Output of the dilation split over N0.
#[derive(Debug, Clone, Serialize)]
pub struct DilationSplit {
    pub h: SetExpr,
    pub s: SetExpr,
    pub certificate: SplitCertificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitCertificate {
    pub horizon: u32,
    /// The dilation factor a + 1.
    pub factor: u64,
    pub h_thick: Verdict,
    pub s_syndetic: Verdict,
    /// Every member of S in the ball is a positive multiple of the factor.
    pub s_in_lattice: bool,
    /// Elements of H ∩ S checked against the target set.
    pub inclusion_scanned: u64,
}

/// Lemma-style dilation split: from thick `H'` and syndetic `S'` with
/// `(a+1)(H' ∩ S') ⊂ n_set`, produce
/// `H = ∪_{j=0..a} ((a+1) H' + j)` and `S = (a+1) S'` with the certificate
/// `H` thick, `S` syndetic, `S ⊂ (a+1)N`, `H ∩ S ⊂ n_set` on the ball.
pub fn dilation_split(
    am: Ambient,
    n_set: &SetExpr,
    a: u64,
    hprime: &SetExpr,
    sprime: &SetExpr,
    horizon: u32,
) -> Result<DilationSplit, SetError> {
    if am != Ambient::N0 {
        return Err(SetError::UnsupportedAmbient("dilation-split".into(), am));
    }
    let factor = a + 1;
    // Preconditions.
    let h_thick_pre = classify_thick(am, hprime, horizon)?;
    if !h_thick_pre.is_yes() {
        return Err(SetError::Precondition {
            reason: "H' is not thick-certified at this horizon".into(),
            offender: hprime.describe(),
        });
    }
    let s_synd_pre = classify_syndetic(am, sprime, horizon)?;
    if !s_synd_pre.is_yes() {
        return Err(SetError::Precondition {
            reason: "S' is not syndetic-certified at this horizon".into(),
            offender: sprime.describe(),
        });
    }
    let quot_bound = horizon as i64 / factor as i64;
    for x in 0..=quot_bound {
        let gx = Element::int(am, x);
        if hprime.member(am, &gx)? && sprime.member(am, &gx)? {
            let fx = Element::int(am, factor as i64 * x);
            if !n_set.member(am, &fx)? {
                return Err(SetError::Precondition {
                    reason: format!("(a+1) * (H' ∩ S') escapes the target at factor {factor}"),
                    offender: fx.describe(),
                });
            }
        }
    }
    // Degenerate dilation: a = 0 leaves both sets unchanged.
    let (h, s) = if a == 0 {
        (hprime.clone(), sprime.clone())
    } else {
        (
            dilation_window(factor, hprime),
            SetExpr::dilation(factor, sprime.clone()),
        )
    };
    // Certificate.
    let h_thick = classify_thick(am, &h, horizon)?;
    let s_syndetic = classify_syndetic(am, &s, horizon)?;
    let mut s_in_lattice = true;
    let mut inclusion_scanned = 0;
    for x in 0..=horizon as i64 {
        let gx = Element::int(am, x);
        let in_s = s.member(am, &gx)?;
        if in_s && a > 0 && (x <= 0 || x % factor as i64 != 0) {
            s_in_lattice = false;
        }
        if in_s && h.member(am, &gx)? {
            inclusion_scanned += 1;
            if !n_set.member(am, &gx)? {
                return Err(SetError::Precondition {
                    reason: "H ∩ S escapes the target set".into(),
                    offender: gx.describe(),
                });
            }
        }
    }
    Ok(DilationSplit {
        h,
        s,
        certificate: SplitCertificate {
            horizon,
            factor,
            h_thick,
            s_syndetic,
            s_in_lattice,
            inclusion_scanned,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n0(n: i64) -> Element {
        Element::int(Ambient::N0, n)
    }

    fn z(n: i64) -> Element {
        Element::int(Ambient::Z, n)
    }

    #[test]
    fn separator_exists_for_large_h() {
        use rand::{Rng, SeedableRng};
        let am = Ambient::Z2;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let fs: BTreeSet<Element> = (0..rng.gen_range(1..=6))
                .map(|_| Element::pair(rng.gen_range(-20..=20), rng.gen_range(-20..=20)))
                .collect();
            let need = fs.len() * fs.len() + 1;
            let mut hs: BTreeSet<Element> = BTreeSet::new();
            while hs.len() < need {
                hs.insert(Element::pair(rng.gen_range(-50..=50), rng.gen_range(-50..=50)));
            }
            let hs: Vec<Element> = hs.into_iter().collect();
            let h = separator(am, &fs, &hs).unwrap().expect("separator exists");
            assert!(separator_check(am, &fs, &h).unwrap());
        }
    }

    #[test]
    fn separated_subset_on_naturals() {
        // set = N, K = {0,1}: greedy from the smallest candidate skips 1
        // (collides with K*0) and then picks every other element.
        let set = SetExpr::ep(1, 1, [0]); // {1, 2, 3, ...}
        let k: BTreeSet<Element> = [n0(0), n0(1)].into_iter().collect();
        let out = separated_subset(Ambient::N0, &set, &k, 20).unwrap();
        let ints: Vec<i64> = out.selected.iter().map(|e| e.as_int().unwrap()).collect();
        assert_eq!(ints, vec![2, 4, 6, 8, 10, 12, 14, 16, 18, 20]);
        assert!(out.certificate.separation_ok);
        assert!(out.certificate.covering_ok);
    }

    #[test]
    fn separated_subset_identity_k() {
        // K = {identity}: everything but the identity survives.
        let set = SetExpr::ep(0, 1, [0]);
        let k: BTreeSet<Element> = [n0(0)].into_iter().collect();
        let out = separated_subset(Ambient::N0, &set, &k, 6).unwrap();
        let ints: Vec<i64> = out.selected.iter().map(|e| e.as_int().unwrap()).collect();
        assert_eq!(ints, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn separated_subset_evens_spacing() {
        let set = SetExpr::ep(0, 2, [0]);
        let k: BTreeSet<Element> = [z(0), z(1), z(2)].into_iter().collect();
        let out = separated_subset(Ambient::Z, &set, &k, 30).unwrap();
        assert!(out.certificate.separation_ok && out.certificate.covering_ok);
        for w in out.selected.windows(2) {
            let (a, b) = (w[0].as_int().unwrap(), w[1].as_int().unwrap());
            assert!((a - b).abs() >= 3, "{a} vs {b}");
        }
        // Selected elements also stay >= 3 away from the identity.
        for b in &out.selected {
            assert!(b.as_int().unwrap().abs() >= 3);
        }
    }

    #[test]
    fn thick_blocks_on_full_z() {
        let out = p1_witness_thick(Ambient::Z, &SetExpr::Full, 3, 100).unwrap();
        assert_eq!(out.blocks.len(), 3);
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert!(out.blocks[i].is_disjoint(&out.blocks[j]));
            }
        }
    }

    #[test]
    fn thick_blocks_inside_power_blocks() {
        let blocks_set = SetExpr::predicate("pow2-blocks", None, |_, g| {
            let n = g.as_int().unwrap_or(-1);
            if n < 2 {
                return false;
            }
            let j = 63 - (n as u64).leading_zeros() as i64;
            let base = 1i64 << j;
            n >= base && n <= base + j
        });
        let out = p1_witness_thick(Ambient::N0, &blocks_set, 4, 4096).unwrap();
        for (i, block) in out.blocks.iter().enumerate() {
            for g in block {
                assert!(
                    blocks_set.member(Ambient::N0, g).unwrap(),
                    "block {i} escaped at {g}"
                );
            }
            for other in out.blocks.iter().skip(i + 1) {
                assert!(block.is_disjoint(other));
            }
        }
    }

    #[test]
    fn thick_blocks_refuse_non_thick_set() {
        let err = p1_witness_thick(Ambient::Z, &SetExpr::ep(0, 2, [0]), 2, 50).unwrap_err();
        assert!(matches!(err, SetError::Precondition { .. }));
    }

    #[test]
    fn dilation_split_evens_example() {
        // n_set = evens (with 0), a = 1, H' = S' = N: H becomes the
        // cofinite window {2,3,...}, S = 2N, and H ∩ S = 2N ⊂ evens.
        let n_set = SetExpr::ep(0, 2, [0]);
        let naturals = SetExpr::ep(1, 1, [0]);
        let out =
            dilation_split(Ambient::N0, &n_set, 1, &naturals, &naturals, 2000).unwrap();
        assert!(out.certificate.h_thick.is_yes());
        assert!(out.certificate.s_syndetic.is_yes());
        assert!(out.certificate.s_in_lattice);
        // Spot-check shapes.
        for x in [2i64, 3, 4, 5, 101] {
            assert!(out.h.member(Ambient::N0, &n0(x)).unwrap(), "H misses {x}");
        }
        assert!(!out.h.member(Ambient::N0, &n0(0)).unwrap());
        assert!(!out.h.member(Ambient::N0, &n0(1)).unwrap());
        for x in [2i64, 4, 6, 100] {
            assert!(out.s.member(Ambient::N0, &n0(x)).unwrap());
        }
        assert!(!out.s.member(Ambient::N0, &n0(3)).unwrap());
    }

    #[test]
    fn dilation_split_degenerate_a0() {
        let n_set = SetExpr::ep(0, 1, [0]);
        let naturals = SetExpr::ep(1, 1, [0]);
        let out = dilation_split(Ambient::N0, &n_set, 0, &naturals, &naturals, 200).unwrap();
        // Unchanged inputs.
        for x in 0..50 {
            assert_eq!(
                out.h.member(Ambient::N0, &n0(x)).unwrap(),
                naturals.member(Ambient::N0, &n0(x)).unwrap()
            );
            assert_eq!(
                out.s.member(Ambient::N0, &n0(x)).unwrap(),
                naturals.member(Ambient::N0, &n0(x)).unwrap()
            );
        }
    }

    #[test]
    fn dilation_split_six_multiples() {
        // n_set = 6N, a = 2, H' = N (thick), S' = 2N: S = 3 * 2N = 6N,
        // inclusion verified by scan.
        let n_set = SetExpr::multiples(6);
        let naturals = SetExpr::ep(1, 1, [0]);
        let two_n = SetExpr::multiples(2);
        let out = dilation_split(Ambient::N0, &n_set, 2, &naturals, &two_n, 3000).unwrap();
        assert!(out.certificate.s_in_lattice);
        for x in 1..=500i64 {
            let in_s = out.s.member(Ambient::N0, &n0(x)).unwrap();
            assert_eq!(in_s, x % 6 == 0 && x > 0, "at {x}");
        }
    }

    #[test]
    fn dilation_split_precondition_failure_reports_offender() {
        // H' ∩ S' = N but 3 * 1 = 3 is odd, escaping the evens.
        let n_set = SetExpr::ep(0, 2, [0]);
        let naturals = SetExpr::ep(1, 1, [0]);
        let err =
            dilation_split(Ambient::N0, &n_set, 2, &naturals, &naturals, 100).unwrap_err();
        match err {
            SetError::Precondition { offender, .. } => assert_eq!(offender, "3"),
            other => panic!("unexpected {other}"),
        }
    }
}
