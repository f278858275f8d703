//! The Bernoulli shift {0,1}^G over an ambient: symbolic points, cylinders
//! on enumeration balls, the shift action `(T_g z)(t) = z(t g)`, return-time
//! sets, recurrence checks, and symmetric-set tests.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::ambient::{Ambient, Element};
use crate::classify::Verdict;
use crate::error::SetError;
use crate::family::Family;
use crate::setexpr::SetExpr;

/// An element of {0,1}^G, evaluable on every ball within its guarantee.
#[derive(Debug, Clone)]
pub struct SymbolicPoint {
    pub ambient: Ambient,
    backing: Backing,
    /// Evaluable region: None means total.
    pub guarantee: Option<u32>,
}

#[derive(Debug, Clone)]
enum Backing {
    /// Indicator of a set expression.
    Indicator(SetExpr),
    /// Explicit values on a stated region, default symbol beyond.
    Explicit {
        values: Arc<BTreeMap<Element, bool>>,
        default: bool,
    },
    /// Lazy shift of another point.
    Shifted {
        base: Arc<SymbolicPoint>,
        by: Element,
    },
}

impl SymbolicPoint {
    pub fn indicator(am: Ambient, set: SetExpr) -> SymbolicPoint {
        SymbolicPoint {
            ambient: am,
            backing: Backing::Indicator(set),
            guarantee: None,
        }
    }

    /// Indicator of a guarantee-capped set.
    pub fn indicator_capped(am: Ambient, set: SetExpr, guarantee: u32) -> SymbolicPoint {
        SymbolicPoint {
            ambient: am,
            backing: Backing::Indicator(set),
            guarantee: Some(guarantee),
        }
    }

    pub fn constant(am: Ambient, symbol: bool) -> SymbolicPoint {
        SymbolicPoint {
            ambient: am,
            backing: Backing::Explicit {
                values: Arc::new(BTreeMap::new()),
                default: symbol,
            },
            guarantee: None,
        }
    }

    /// Explicit values with a default symbol beyond them; total.
    pub fn explicit(am: Ambient, values: BTreeMap<Element, bool>, default: bool) -> SymbolicPoint {
        SymbolicPoint {
            ambient: am,
            backing: Backing::Explicit {
                values: Arc::new(values),
                default,
            },
            guarantee: None,
        }
    }

    /// Explicit values valid only inside the guarantee ball (builder traces).
    pub fn committed(
        am: Ambient,
        values: BTreeMap<Element, bool>,
        default: bool,
        guarantee: u32,
    ) -> SymbolicPoint {
        SymbolicPoint {
            ambient: am,
            backing: Backing::Explicit {
                values: Arc::new(values),
                default,
            },
            guarantee: Some(guarantee),
        }
    }

    /// Evaluate z(g); errors outside the guarantee region.
    pub fn eval(&self, g: &Element) -> Result<bool, SetError> {
        if let Some(cap) = self.guarantee {
            if self.ambient.norm(g) > cap {
                return Err(SetError::HorizonExceeded {
                    name: "symbolic-point".into(),
                    element: g.describe(),
                    level: cap,
                });
            }
        }
        match &self.backing {
            Backing::Indicator(set) => set.member(self.ambient, g),
            Backing::Explicit { values, default } => {
                Ok(values.get(g).copied().unwrap_or(*default))
            }
            Backing::Shifted { base, by } => {
                let tg = self.ambient.mul(g, by)?;
                base.eval(&tg)
            }
        }
    }

    /// The pattern of this point on `ball(level)` as a cylinder.
    pub fn pattern_cylinder(&self, level: u32) -> Result<Cylinder, SetError> {
        let mut pattern = BTreeMap::new();
        for k in self.ambient.ball(level) {
            let v = self.eval(&k)?;
            pattern.insert(k, v);
        }
        Cylinder::new(pattern)
    }
}

/// Apply the shift: `(T_g z)(t) = z(t g)`. The evaluable region shrinks by
/// the norm of the translator.
pub fn shift_apply(z: &SymbolicPoint, g: &Element) -> SymbolicPoint {
    let guarantee = z
        .guarantee
        .map(|cap| cap.saturating_sub(z.ambient.norm(g)));
    SymbolicPoint {
        ambient: z.ambient,
        backing: Backing::Shifted {
            base: Arc::new(z.clone()),
            by: g.clone(),
        },
        guarantee,
    }
}

/// A cylinder: finite support K with a 0/1 pattern on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cylinder {
    pattern: BTreeMap<Element, bool>,
}

impl Cylinder {
    pub fn new(pattern: BTreeMap<Element, bool>) -> Result<Cylinder, SetError> {
        if pattern.is_empty() {
            return Err(SetError::EmptyFinite);
        }
        Ok(Cylinder { pattern })
    }

    /// The cylinder `[1]`: support {identity}, symbol 1.
    pub fn one(am: Ambient) -> Cylinder {
        Cylinder {
            pattern: BTreeMap::from([(am.identity(), true)]),
        }
    }

    pub fn support(&self) -> impl Iterator<Item = &Element> {
        self.pattern.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Element, bool)> {
        self.pattern.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Whether this cylinder refines `other` (superset support, agreeing
    /// pattern).
    pub fn refines(&self, other: &Cylinder) -> bool {
        other
            .pattern
            .iter()
            .all(|(k, v)| self.pattern.get(k) == Some(v))
    }

    /// Does the shifted point `T_g z` lie in this cylinder?
    pub fn contains_shifted(
        &self,
        z: &SymbolicPoint,
        g: &Element,
    ) -> Result<bool, SetError> {
        for (k, v) in &self.pattern {
            let kg = z.ambient.mul(k, g)?;
            if z.eval(&kg)? != *v {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The return-time set `N(z, [u]) ∩ ball(horizon)`, materialized.
pub fn return_set(
    z: &SymbolicPoint,
    c: &Cylinder,
    horizon: u32,
) -> Result<BTreeSet<Element>, SetError> {
    let am = z.ambient;
    let mut out = BTreeSet::new();
    for i in 0..am.ball_size(horizon) {
        let g = am.enumerate(i);
        if c.contains_shifted(z, &g)? {
            out.insert(g);
        }
    }
    Ok(out)
}

/// The return-time set as a set expression. For indicator points this is the
/// structural intersection of translated copies of the set and its
/// complement, which keeps eventually periodic inputs exactly decidable;
/// otherwise it is a guarantee-capped predicate.
pub fn return_set_expr(z: &SymbolicPoint, c: &Cylinder) -> SetExpr {
    let am = z.ambient;
    if let Backing::Indicator(set) = &z.backing {
        if z.guarantee.is_none() {
            let mut expr: Option<SetExpr> = None;
            for (k, v) in c.entries() {
                let base = if v {
                    set.clone()
                } else {
                    SetExpr::complement(set.clone())
                };
                let piece = SetExpr::translate_inv(k.clone(), base);
                expr = Some(match expr {
                    None => piece,
                    Some(e) => SetExpr::intersection(e, piece),
                });
            }
            return expr.expect("cylinder support is nonempty");
        }
    }
    let max_support = c.support().map(|k| am.norm(k)).max().unwrap_or(0);
    let guarantee = z.guarantee.map(|cap| cap.saturating_sub(max_support));
    let zc = z.clone();
    let cc = c.clone();
    SetExpr::predicate("return-set", guarantee, move |_, g| {
        cc.contains_shifted(&zc, g)
            .expect("query within the guarantee region")
    })
}

/// F-recurrence check: for each r <= basis_depth, the return set to the
/// pattern cylinder of z on ball(r) must belong to the family. The verdict
/// aggregates the weakest sub-verdict.
pub fn check_recurrence(
    z: &SymbolicPoint,
    family: &Family,
    basis_depth: u32,
    horizon: u32,
) -> Result<Verdict, SetError> {
    let am = z.ambient;
    let mut weakest: Option<Verdict> = None;
    for r in 1..=basis_depth {
        let cyl = z.pattern_cylinder(r)?;
        let expr = return_set_expr(z, &cyl);
        let v = family.member(am, &expr, horizon)?;
        let rank = |s: &Verdict| match s.status {
            crate::classify::VerdictStatus::CertifiedNo => 0,
            crate::classify::VerdictStatus::Inconclusive => 1,
            crate::classify::VerdictStatus::CertifiedYes => 2,
        };
        weakest = Some(match weakest {
            None => v,
            Some(w) if rank(&v) < rank(&w) => v,
            Some(w) => w,
        });
    }
    Ok(weakest.expect("basis_depth >= 1"))
}

/// Symmetric-set check: verify the finite witnesses are on the right sides,
/// form `∩_{f in f1} f^-1 A ∩ ∩_{f in f2} f^-1 (G ∖ A)` and test family
/// membership.
pub fn symmetric_set_check(
    am: Ambient,
    a: &SetExpr,
    family: &Family,
    f1: &BTreeSet<Element>,
    f2: &BTreeSet<Element>,
    horizon: u32,
) -> Result<Verdict, SetError> {
    for f in f1 {
        if !a.member(am, f)? {
            return Err(SetError::Precondition {
                reason: "f1 must lie inside the set".into(),
                offender: f.describe(),
            });
        }
    }
    for f in f2 {
        if a.member(am, f)? {
            return Err(SetError::Precondition {
                reason: "f2 must avoid the set".into(),
                offender: f.describe(),
            });
        }
    }
    let expr = symmetric_intersection(a, f1, f2);
    family.member(am, &expr, horizon)
}

/// The intersection `∩_{f in f1} f^-1 A ∩ ∩_{f in f2} f^-1 (G ∖ A)`.
pub fn symmetric_intersection(
    a: &SetExpr,
    f1: &BTreeSet<Element>,
    f2: &BTreeSet<Element>,
) -> SetExpr {
    let mut expr: Option<SetExpr> = None;
    let mut push = |piece: SetExpr| {
        expr = Some(match expr.take() {
            None => piece,
            Some(e) => SetExpr::intersection(e, piece),
        });
    };
    for f in f1 {
        push(SetExpr::translate_inv(f.clone(), a.clone()));
    }
    for f in f2 {
        push(SetExpr::translate_inv(
            f.clone(),
            SetExpr::complement(a.clone()),
        ));
    }
    expr.unwrap_or(SetExpr::Full)
}

/// Joint return set of the product system on the ball:
/// `N(x, cx) ∩ N(y, cy)`.
pub fn joint_return(
    x: &SymbolicPoint,
    y: &SymbolicPoint,
    cx: &Cylinder,
    cy: &Cylinder,
    horizon: u32,
) -> Result<BTreeSet<Element>, SetError> {
    let rx = return_set(x, cx, horizon)?;
    let ry = return_set(y, cy, horizon)?;
    Ok(rx.intersection(&ry).cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_of_even_indicator_is_odd_indicator() {
        let am = Ambient::Z;
        let z = SymbolicPoint::indicator(am, SetExpr::ep(0, 2, [0]));
        let shifted = shift_apply(&z, &Element::int(am, 1));
        for t in -20..20i64 {
            let got = shifted.eval(&Element::int(am, t)).unwrap();
            assert_eq!(got, (t + 1).rem_euclid(2) == 0, "at {t}");
        }
    }

    #[test]
    fn identity_shift_is_noop() {
        let am = Ambient::F2;
        let z = SymbolicPoint::indicator(
            am,
            SetExpr::predicate("even-words", None, |am, g| am.norm(g) % 2 == 0),
        );
        let shifted = shift_apply(&z, &am.identity());
        for i in 0..100 {
            let g = am.enumerate(i);
            assert_eq!(z.eval(&g).unwrap(), shifted.eval(&g).unwrap());
        }
    }

    #[test]
    fn shift_composition_action_law_on_f2() {
        use rand::{Rng, SeedableRng};
        let am = Ambient::F2;
        let z = SymbolicPoint::indicator(
            am,
            SetExpr::predicate("even-words", None, |am, g| am.norm(g) % 2 == 0),
        );
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let g = am.enumerate(rng.gen_range(0..100u64));
            let h = am.enumerate(rng.gen_range(0..100u64));
            let lhs = shift_apply(&shift_apply(&z, &g), &h);
            let hg = am.mul(&h, &g).unwrap();
            let rhs = shift_apply(&z, &hg);
            for t in am.ball(3) {
                assert_eq!(lhs.eval(&t).unwrap(), rhs.eval(&t).unwrap());
            }
        }
    }

    #[test]
    fn return_set_to_one_is_the_set() {
        let am = Ambient::Z;
        let sets = [
            SetExpr::ep(0, 3, [0, 2]),
            SetExpr::finite([Element::int(am, -2), Element::int(am, 5)]),
            SetExpr::fs_gen(vec![Element::int(am, 1), Element::int(am, 3)]),
        ];
        for a in sets {
            let z = SymbolicPoint::indicator(am, a.clone());
            let n = return_set(&z, &Cylinder::one(am), 30).unwrap();
            let direct: BTreeSet<Element> =
                a.elements_in_ball(am, 30).unwrap().into_iter().collect();
            assert_eq!(n, direct, "for {}", a.describe());
        }
    }

    #[test]
    fn finer_cylinder_returns_subset() {
        let am = Ambient::Z;
        let z = SymbolicPoint::indicator(am, SetExpr::ep(0, 4, [0, 1]));
        let coarse = z.pattern_cylinder(1).unwrap();
        let fine = z.pattern_cylinder(3).unwrap();
        assert!(fine.refines(&coarse));
        let nc = return_set(&z, &coarse, 40).unwrap();
        let nf = return_set(&z, &fine, 40).unwrap();
        assert!(nf.is_subset(&nc));
    }

    #[test]
    fn all_ones_point_is_syndetic_recurrent() {
        let am = Ambient::Z;
        let z = SymbolicPoint::constant(am, true);
        let v = check_recurrence(&z, &Family::Syndetic, 3, 60).unwrap();
        assert!(v.is_yes());
    }

    #[test]
    fn even_indicator_is_syndetic_recurrent_exactly() {
        let am = Ambient::Z;
        let z = SymbolicPoint::indicator(am, SetExpr::ep(0, 2, [0]));
        let v = check_recurrence(&z, &Family::Syndetic, 3, 100).unwrap();
        assert!(v.is_yes() && v.exact);
        // The [1]-return set is exactly 2Z on the ball.
        let n = return_set(&z, &Cylinder::one(am), 50).unwrap();
        for g in &n {
            assert_eq!(g.as_int().unwrap() % 2, 0);
        }
        assert_eq!(n.len(), 51);
    }

    #[test]
    fn finite_indicator_not_infinite_recurrent() {
        let am = Ambient::Z;
        let z = SymbolicPoint::indicator(
            am,
            SetExpr::finite([Element::int(am, 0), Element::int(am, 4)]),
        );
        let v = check_recurrence(&z, &Family::Infinite, 2, 60).unwrap();
        assert!(v.is_no());
    }

    #[test]
    fn symmetric_check_on_evens() {
        let am = Ambient::Z;
        let a = SetExpr::ep(0, 2, [0]);
        let f1: BTreeSet<Element> = [Element::int(am, 0), Element::int(am, 2)]
            .into_iter()
            .collect();
        let f2: BTreeSet<Element> = [Element::int(am, 1)].into_iter().collect();
        let v = symmetric_set_check(am, &a, &Family::Syndetic, &f1, &f2, 100).unwrap();
        assert!(v.is_yes() && v.exact);
        // The intersection is exactly the evens.
        let expr = symmetric_intersection(&a, &f1, &f2);
        for n in -30..30i64 {
            assert_eq!(
                expr.member(am, &Element::int(am, n)).unwrap(),
                n.rem_euclid(2) == 0
            );
        }
    }

    #[test]
    fn symmetric_check_with_empty_witnesses_is_full() {
        let am = Ambient::Z;
        let v = symmetric_set_check(
            am,
            &SetExpr::Full,
            &Family::Syndetic,
            &BTreeSet::new(),
            &BTreeSet::new(),
            50,
        )
        .unwrap();
        assert!(v.is_yes());
    }

    #[test]
    fn symmetric_check_rejects_misplaced_witness() {
        let am = Ambient::Z;
        let a = SetExpr::ep(0, 2, [0]);
        let f1: BTreeSet<Element> = [Element::int(am, 1)].into_iter().collect();
        let err =
            symmetric_set_check(am, &a, &Family::Syndetic, &f1, &BTreeSet::new(), 50).unwrap_err();
        assert!(matches!(err, SetError::Precondition { .. }));
    }

    #[test]
    fn joint_return_with_distal_fixed_point() {
        let am = Ambient::Z;
        let ones = SymbolicPoint::constant(am, true);
        let y = SymbolicPoint::indicator(am, SetExpr::ep(0, 2, [0]));
        let joint = joint_return(&ones, &y, &Cylinder::one(am), &Cylinder::one(am), 40).unwrap();
        let ny = return_set(&y, &Cylinder::one(am), 40).unwrap();
        assert_eq!(joint, ny);
    }

    #[test]
    fn joint_return_of_point_with_itself() {
        let am = Ambient::Z;
        let x = SymbolicPoint::indicator(am, SetExpr::ep(0, 3, [0]));
        let c = Cylinder::one(am);
        let joint = joint_return(&x, &x, &c, &c, 40).unwrap();
        assert_eq!(joint, return_set(&x, &c, 40).unwrap());
    }

    #[test]
    fn prop44_round_trip_on_random_ep_sets() {
        // For symmetrically-checked eventually periodic sets containing the
        // identity, the indicator point is syndetic-recurrent and its
        // [1]-return set equals the set on the ball.
        use rand::{Rng, SeedableRng};
        let am = Ambient::Z;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut done = 0;
        while done < 50 {
            let period = rng.gen_range(2..=8u64);
            let count = rng.gen_range(1..=period);
            let mut residues: BTreeSet<u64> = BTreeSet::from([0]);
            while (residues.len() as u64) < count {
                residues.insert(rng.gen_range(0..period));
            }
            let a = SetExpr::ep(0, period, residues.clone());
            // Symmetric F_s check with small witnesses.
            let f1: BTreeSet<Element> = [Element::int(am, 0)].into_iter().collect();
            let f2: BTreeSet<Element> = (1..period as i64)
                .filter(|n| !residues.contains(&((*n as u64) % period)))
                .take(1)
                .map(|n| Element::int(am, n))
                .collect();
            let sym = symmetric_set_check(am, &a, &Family::Syndetic, &f1, &f2, 60).unwrap();
            assert!(sym.is_yes());
            let z = SymbolicPoint::indicator(am, a.clone());
            let rec = check_recurrence(&z, &Family::Syndetic, 3, 60).unwrap();
            assert!(rec.is_yes(), "recurrence failed for {}", a.describe());
            let n = return_set(&z, &Cylinder::one(am), 40).unwrap();
            let direct: BTreeSet<Element> =
                a.elements_in_ball(am, 40).unwrap().into_iter().collect();
            assert_eq!(n, direct);
            done += 1;
        }
    }
}
