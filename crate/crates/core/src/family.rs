//! Furstenberg families: built-in memberships backed by the classifiers
//! and density calculators, plus the Ramsey-property check on certified
//! inputs.

use serde::Serialize;

use crate::ambient::Ambient;
use crate::classify::{
    classify_pws, classify_syndetic, classify_thick, Refuter, Verdict, Witness,
};
use crate::density::{banach_density, upper_density, FolnerSeq};
use crate::error::SetError;
use crate::setexpr::{normalize_ep, SetExpr};

/// A built-in Furstenberg family over an ambient.
#[derive(Debug, Clone, Serialize)]
pub enum Family {
    /// All infinite subsets.
    Infinite,
    Thick,
    Syndetic,
    PiecewiseSyndetic,
    /// Positive upper density along the given Følner sequence.
    PosUpperDensity(FolnerSeq),
    /// Positive upper Banach density (over Z).
    PosBanachDensity,
}

impl Family {
    /// Whether the family has the Ramsey property: a 2-partition of a
    /// member keeps one part in the family.
    pub fn ramsey(&self) -> bool {
        match self {
            Family::Infinite => true,
            Family::Thick => false,
            Family::Syndetic => false,
            Family::PiecewiseSyndetic => true,
            Family::PosUpperDensity(_) => true,
            Family::PosBanachDensity => true,
        }
    }

    /// Whether `A` in the family implies `gA` in the family.
    pub fn left_shift_invariant(&self) -> bool {
        // Thickness and syndeticity are translation invariant; densities
        // are invariant along any Følner sequence.
        true
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Infinite => "inf",
            Family::Thick => "t",
            Family::Syndetic => "s",
            Family::PiecewiseSyndetic => "ps",
            Family::PosUpperDensity(_) => "pud",
            Family::PosBanachDensity => "pubd",
        }
    }

    /// Membership test, delegated to the classifiers / density calculators.
    pub fn member(&self, am: Ambient, set: &SetExpr, horizon: u32) -> Result<Verdict, SetError> {
        match self {
            Family::Infinite => infinite_member(am, set, horizon),
            Family::Thick => classify_thick(am, set, horizon),
            Family::Syndetic => classify_syndetic(am, set, horizon),
            Family::PiecewiseSyndetic => classify_pws(am, set, horizon),
            Family::PosUpperDensity(folner) => {
                if folner.ambient != am {
                    return Err(SetError::UnsupportedAmbient("pud".into(), am));
                }
                let report = upper_density(set, folner, horizon as usize)
                    .map_err(|e| SetError::Horizon(e.to_string()))?;
                Ok(density_verdict(report.value, report.exact, horizon))
            }
            Family::PosBanachDensity => {
                if am != Ambient::Z {
                    return Err(SetError::UnsupportedAmbient("pubd".into(), am));
                }
                let report = banach_density(set, horizon)?;
                Ok(density_verdict(report.value, report.exact, horizon))
            }
        }
    }
}

fn density_verdict(value: crate::density::Rational, exact: bool, horizon: u32) -> Verdict {
    if value > crate::density::Rational::new(0, 1) {
        Verdict::yes(
            horizon,
            exact,
            Witness::Density {
                numerator: *value.numer(),
                denominator: *value.denom(),
            },
        )
    } else {
        Verdict::no(
            horizon,
            exact,
            Refuter::Because {
                reason: "density 0 at this horizon".into(),
            },
        )
    }
}

fn infinite_member(am: Ambient, set: &SetExpr, horizon: u32) -> Result<Verdict, SetError> {
    if let Some(ep) = normalize_ep(am, set) {
        return if ep.is_finite_set() {
            Ok(Verdict::no(
                horizon,
                true,
                Refuter::FiniteSet {
                    size: ep.plus.len() as u64,
                },
            ))
        } else {
            let sample: Vec<_> = ep
                .elements_in_range(0, 4 * ep.period as i64)
                .into_iter()
                .take(8)
                .map(|n| crate::ambient::Element::int(am, n))
                .collect();
            Ok(Verdict::yes(
                horizon,
                true,
                Witness::Elements {
                    sample,
                    count: u64::MAX,
                },
            ))
        };
    }
    if let SetExpr::Finite(s) = set {
        return Ok(Verdict::no(
            horizon,
            true,
            Refuter::FiniteSet {
                size: s.len() as u64,
            },
        ));
    }
    if matches!(set, SetExpr::FsGen { .. } | SetExpr::FpGen { .. }) {
        // Finitely many generators produce a finite set.
        let count = set.elements_in_ball(am, horizon)?.len() as u64;
        return Ok(Verdict::no(horizon, true, Refuter::FiniteSet { size: count }));
    }
    // Horizon-stamped: the count must keep growing with the ball.
    let half = (horizon / 2).max(1);
    let small = set.elements_in_ball(am, half)?.len() as u64;
    let all = set.elements_in_ball(am, horizon)?;
    let count = all.len() as u64;
    if count == 0 {
        return Ok(Verdict::no(
            horizon,
            false,
            Refuter::EmptyOnBall { level: horizon },
        ));
    }
    if count > small {
        Ok(Verdict::yes(
            horizon,
            false,
            Witness::Elements {
                sample: all.into_iter().take(8).collect(),
                count,
            },
        ))
    } else {
        Ok(Verdict::inconclusive(horizon))
    }
}

/// Outcome of a Ramsey check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RamseyOutcome {
    /// The indexed part (1 or 2) is certified in the family.
    Part(u8),
    /// Neither part certified, neither refuted exactly.
    Inconclusive,
    /// The family does not carry the Ramsey flag; both parts refuted is
    /// consistent, reported as not-applicable.
    NotApplicable,
    /// Both parts exactly refuted for a Ramsey-flagged family; this would
    /// indicate an implementation bug and is surfaced loudly.
    ExactViolation,
}

#[derive(Debug, Clone, Serialize)]
pub struct RamseyReport {
    pub outcome: RamseyOutcome,
    pub horizon: u32,
    pub part1: Verdict,
    pub part2: Verdict,
}

/// Check the Ramsey property on a certified member split into two parts.
/// The parts must partition the set on `ball(horizon)`.
pub fn ramsey_check(
    am: Ambient,
    family: &Family,
    set: &SetExpr,
    part1: &SetExpr,
    part2: &SetExpr,
    horizon: u32,
) -> Result<RamseyReport, SetError> {
    // Partition check.
    for i in 0..am.ball_size(horizon) {
        let x = am.enumerate(i);
        let in_set = set.member(am, &x)?;
        let p1 = part1.member(am, &x)?;
        let p2 = part2.member(am, &x)?;
        if in_set != (p1 || p2) || (p1 && p2) {
            return Err(SetError::Precondition {
                reason: "parts do not partition the set".into(),
                offender: x.describe(),
            });
        }
    }
    let set_v = family.member(am, set, horizon)?;
    if !set_v.is_yes() {
        return Err(SetError::Precondition {
            reason: format!("set is not certified in family {}", family.name()),
            offender: set.describe(),
        });
    }
    let part1_v = family.member(am, part1, horizon)?;
    let part2_v = family.member(am, part2, horizon)?;
    let outcome = if part1_v.is_yes() {
        RamseyOutcome::Part(1)
    } else if part2_v.is_yes() {
        RamseyOutcome::Part(2)
    } else if !family.ramsey() {
        RamseyOutcome::NotApplicable
    } else if part1_v.is_no() && part1_v.exact && part2_v.is_no() && part2_v.exact {
        RamseyOutcome::ExactViolation
    } else {
        RamseyOutcome::Inconclusive
    };
    Ok(RamseyReport {
        outcome,
        horizon,
        part1: part1_v,
        part2: part2_v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::Element;

    #[test]
    fn syndetic_family_on_evens() {
        let v = Family::Syndetic
            .member(Ambient::Z, &SetExpr::ep(0, 2, [0]), 100)
            .unwrap();
        assert!(v.is_yes() && v.exact);
        let Some(Witness::Syndetic { bound_set }) = &v.witness else {
            panic!()
        };
        assert_eq!(bound_set.len(), 2);
    }

    #[test]
    fn thick_family_refutes_evens() {
        let v = Family::Thick
            .member(Ambient::Z, &SetExpr::ep(0, 2, [0]), 100)
            .unwrap();
        assert!(v.is_no() && v.exact);
    }

    #[test]
    fn infinite_family_refutes_finite() {
        let v = Family::Infinite
            .member(
                Ambient::Z,
                &SetExpr::finite([Element::int(Ambient::Z, 3)]),
                50,
            )
            .unwrap();
        assert!(v.is_no() && v.exact);
    }

    #[test]
    fn infinite_family_accepts_predicate_at_horizon() {
        let squares = SetExpr::predicate("squares", None, |_, g| {
            let n = g.as_int().unwrap_or(-1);
            n >= 0 && {
                let r = (n as f64).sqrt().round() as i64;
                r * r == n
            }
        });
        let v = Family::Infinite.member(Ambient::N0, &squares, 400).unwrap();
        assert!(v.is_yes() && !v.exact);
    }

    #[test]
    fn density_families() {
        let folner = FolnerSeq::boxes(Ambient::Z).unwrap();
        let v = Family::PosUpperDensity(folner)
            .member(Ambient::Z, &SetExpr::ep(0, 3, [0]), 50)
            .unwrap();
        assert!(v.is_yes() && v.exact);
        let v = Family::PosBanachDensity
            .member(Ambient::Z, &SetExpr::ep(0, 3, Vec::<u64>::new()), 50)
            .unwrap();
        assert!(v.is_no());
    }

    #[test]
    fn ramsey_on_evens_split_into_multiples_of_four() {
        // set = evens, parts = 4Z and 4Z + 2: both qualify as pws, the
        // lowest certified index is returned.
        let set = SetExpr::ep(0, 2, [0]);
        let p1 = SetExpr::ep(0, 4, [0]);
        let p2 = SetExpr::ep(0, 4, [2]);
        let r = ramsey_check(
            Ambient::Z,
            &Family::PiecewiseSyndetic,
            &set,
            &p1,
            &p2,
            200,
        )
        .unwrap();
        assert_eq!(r.outcome, RamseyOutcome::Part(1));
        assert!(r.part1.exact);
    }

    #[test]
    fn ramsey_with_empty_second_part() {
        let set = SetExpr::ep(0, 2, [0]);
        let p2 = SetExpr::ep(0, 2, Vec::<u64>::new());
        let r = ramsey_check(
            Ambient::Z,
            &Family::PiecewiseSyndetic,
            &set,
            &set,
            &p2,
            100,
        )
        .unwrap();
        assert_eq!(r.outcome, RamseyOutcome::Part(1));
    }

    #[test]
    fn thick_family_not_applicable_on_even_odd_split() {
        // F_t lacks the Ramsey flag: full = evens ∪ odds with both parts
        // exactly refuted is consistent and reported as not-applicable.
        let set = SetExpr::ep(0, 1, [0]);
        let evens = SetExpr::ep(0, 2, [0]);
        let odds = SetExpr::ep(0, 2, [1]);
        let r = ramsey_check(Ambient::Z, &Family::Thick, &set, &evens, &odds, 100).unwrap();
        assert_eq!(r.outcome, RamseyOutcome::NotApplicable);
        assert!(r.part1.is_no() && r.part2.is_no());
    }

    #[test]
    fn partition_violation_reports_offender() {
        let set = SetExpr::ep(0, 2, [0]);
        let err = ramsey_check(
            Ambient::Z,
            &Family::PiecewiseSyndetic,
            &set,
            &set,
            &set, // overlapping parts
            50,
        )
        .unwrap_err();
        assert!(matches!(err, SetError::Precondition { .. }));
    }

    #[test]
    fn shift_invariance_recertifies_members() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let families = [Family::Syndetic, Family::Thick, Family::PiecewiseSyndetic];
        let mut checked = 0;
        while checked < 50 {
            let period = rng.gen_range(2..=10u64);
            let count = rng.gen_range(1..=period);
            let mut residues = std::collections::BTreeSet::new();
            while (residues.len() as u64) < count {
                residues.insert(rng.gen_range(0..period));
            }
            let set = SetExpr::ep(0, period, residues);
            for family in &families {
                let v = family.member(Ambient::Z, &set, 100).unwrap();
                if !v.is_yes() {
                    continue;
                }
                let g = Element::int(Ambient::Z, rng.gen_range(-30..=30));
                let shifted = SetExpr::translate(g, set.clone());
                let vs = family.member(Ambient::Z, &shifted, 100).unwrap();
                assert!(vs.is_yes(), "{} member lost under shift", family.name());
                checked += 1;
            }
        }
    }
}
