//! Clopen neighborhood refinement: since cylinders are clopen, the return
//! set to a cylinder immediately yields symmetric-set certificates — for
//! sampled finite sides, a refined cylinder whose return set lands in the
//! symmetric intersection.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::ambient::Element;
use crate::error::SetError;
use crate::setexpr::SetExpr;
use crate::subshift::{
    return_set, return_set_expr, symmetric_intersection, Cylinder, SymbolicPoint,
};

#[derive(Debug, Clone, Serialize)]
pub struct RefineStage {
    pub n: u32,
    /// |I_n| and |J_n|: the sampled sides inside ball(n).
    pub inside: u64,
    pub outside: u64,
    /// Support size of the refined cylinder W.
    pub support: u64,
    /// Return times of x to W that were verified inside the symmetric
    /// intersection.
    pub returns_checked: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefineOutput {
    /// The refined neighborhood; cylinders are clopen, so v = u qualifies.
    pub v: Cylinder,
    /// F' = N(x, v) as a set expression.
    pub fprime: SetExpr,
    pub stages: Vec<RefineStage>,
}

/// For each n <= depth, take `I_n = F' ∩ ball(n)`, `J_n = ball(n) ∖ F'`,
/// form the cylinder W of x's pattern on `support(v) · (I_n ∪ J_n)`, and
/// verify `N(x, W) ∩ ball(horizon) ⊂ ∩_{f ∈ I_n} f^-1 F' ∩ ∩_{f ∈ J_n}
/// f^-1 (G ∖ F')`.
pub fn refine_neighborhood(
    x: &SymbolicPoint,
    u: &Cylinder,
    depth: u32,
    horizon: u32,
) -> Result<RefineOutput, SetError> {
    let am = x.ambient;
    let v = u.clone();
    let fprime = return_set_expr(x, &v);
    let mut stages = Vec::new();
    for n in 1..=depth {
        let mut inside: BTreeSet<Element> = BTreeSet::new();
        let mut outside: BTreeSet<Element> = BTreeSet::new();
        for i in 0..am.ball_size(n) {
            let g = am.enumerate(i);
            if fprime.member(am, &g)? {
                inside.insert(g);
            } else {
                outside.insert(g);
            }
        }
        // Refined cylinder support: supp(v) * (I_n ∪ J_n).
        let mut pattern: BTreeMap<Element, bool> = BTreeMap::new();
        for k in v.support() {
            for f in inside.iter().chain(outside.iter()) {
                let kf = am.mul(k, f)?;
                let val = x.eval(&kf)?;
                pattern.insert(kf, val);
            }
        }
        let w = Cylinder::new(pattern)?;
        let target = symmetric_intersection(&fprime, &inside, &outside);
        let returns = return_set(x, &w, horizon)?;
        for g in &returns {
            if !target.member(am, g)? {
                return Err(SetError::Precondition {
                    reason: format!(
                        "refined return set escaped the symmetric intersection at depth {n}"
                    ),
                    offender: g.describe(),
                });
            }
        }
        stages.push(RefineStage {
            n,
            inside: inside.len() as u64,
            outside: outside.len() as u64,
            support: w.len() as u64,
            returns_checked: returns.len() as u64,
        });
    }
    Ok(RefineOutput { v, fprime, stages })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::Ambient;
    use crate::family::Family;
    use crate::subshift::symmetric_set_check;

    #[test]
    fn even_indicator_refines_to_evens() {
        let am = Ambient::Z;
        let x = SymbolicPoint::indicator(am, SetExpr::ep(0, 2, [0]));
        let out = refine_neighborhood(&x, &Cylinder::one(am), 3, 60).unwrap();
        for n in -30..30i64 {
            assert_eq!(
                out.fprime.member(am, &Element::int(am, n)).unwrap(),
                n.rem_euclid(2) == 0
            );
        }
        // The symmetric certificate of the first stage also passes the
        // family check directly.
        let f1: BTreeSet<Element> = [Element::int(am, 0)].into_iter().collect();
        let f2: BTreeSet<Element> = [Element::int(am, 1)].into_iter().collect();
        let v = symmetric_set_check(am, &out.fprime, &Family::Syndetic, &f1, &f2, 50).unwrap();
        assert!(v.is_yes());
    }

    #[test]
    fn all_ones_refines_to_full() {
        let am = Ambient::Z;
        let x = SymbolicPoint::constant(am, true);
        let out = refine_neighborhood(&x, &Cylinder::one(am), 2, 40).unwrap();
        for stage in &out.stages {
            assert_eq!(stage.outside, 0);
            assert_eq!(stage.returns_checked, am.ball_size(40));
        }
    }
}
