//! Chain presentations: decreasing sequences {F_n} in a family with a
//! shift-witness map — the constructive interface for quasi-central and
//! essential-F sets — plus their validator and the central-set chain builder
//! for proximal pairs in the Bernoulli shift.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::ambient::{Ambient, Element};
use crate::classify::{classify_syndetic, classify_thick, Verdict};
use crate::error::SetError;
use crate::family::Family;
use crate::setexpr::SetExpr;
use crate::subshift::SymbolicPoint;

type SetsFn = dyn Fn(u32) -> SetExpr + Send + Sync;
type WitnessFn = dyn Fn(u32, &Element) -> Option<u32> + Send + Sync;

/// A decreasing sequence {F_n} of sets in a declared family, with a
/// shift-witness map: for f in F_n some m with `f F_m ⊂ F_n`.
#[derive(Clone)]
pub struct ChainPresentation {
    pub ambient: Ambient,
    pub family: Family,
    pub descriptor: String,
    sets: Arc<SetsFn>,
    shift_witness: Arc<WitnessFn>,
}

impl std::fmt::Debug for ChainPresentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ChainPresentation({})", self.descriptor)
    }
}

impl ChainPresentation {
    /// The n-th set (1-indexed).
    pub fn set(&self, n: u32) -> SetExpr {
        (self.sets)(n)
    }

    /// Shift witness m with `f F_m ⊂ F_n`, if the chain provides one.
    pub fn witness(&self, n: u32, f: &Element) -> Option<u32> {
        (self.shift_witness)(n, f)
    }

    pub fn new(
        ambient: Ambient,
        family: Family,
        descriptor: impl Into<String>,
        sets: impl Fn(u32) -> SetExpr + Send + Sync + 'static,
        shift_witness: impl Fn(u32, &Element) -> Option<u32> + Send + Sync + 'static,
    ) -> ChainPresentation {
        ChainPresentation {
            ambient,
            family,
            descriptor: descriptor.into(),
            sets: Arc::new(sets),
            shift_witness: Arc::new(shift_witness),
        }
    }

    /// Constant chain F_n = expr; valid when `f + expr ⊂ expr` for members.
    pub fn constant(
        ambient: Ambient,
        family: Family,
        expr: SetExpr,
        descriptor: impl Into<String>,
    ) -> ChainPresentation {
        let e = expr.clone();
        ChainPresentation::new(
            ambient,
            family,
            descriptor,
            move |_| e.clone(),
            |n, _| Some(n),
        )
    }

    /// Geometric chain F_n = k^n * N over N0/Z (positive multiples over N0,
    /// all multiples over Z).
    pub fn geometric(ambient: Ambient, family: Family, k: u64) -> ChainPresentation {
        assert!(k >= 2);
        let mk = move |n: u32| -> SetExpr {
            let p = k.saturating_pow(n);
            match ambient {
                Ambient::N0 => SetExpr::multiples(p),
                _ => SetExpr::multiples_with_zero(p),
            }
        };
        ChainPresentation::new(
            ambient,
            family,
            format!("scaled:{k}"),
            mk,
            |n, _| Some(n),
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainCertificate {
    pub schema: String,
    pub descriptor: String,
    pub family: String,
    pub n_max: u32,
    pub sample_count: u32,
    pub horizon: u32,
    pub stages: Vec<ChainStageReport>,
    pub failures: Vec<ChainFailure>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainStageReport {
    pub n: u32,
    pub family_verdict: Verdict,
    pub decreasing_ok: bool,
    pub samples: Vec<ShiftSample>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShiftSample {
    pub f: Element,
    pub m: Option<u32>,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainFailure {
    pub n: u32,
    pub f: Option<Element>,
    pub offender: Option<Element>,
    pub kind: String,
}

/// Validate a chain presentation at finite horizon: decreasingness on the
/// ball, family membership of each F_n, and sampled shift-witness checks
/// `f F_m ∩ ball(horizon) ⊂ F_n`.
pub fn chain_validate(
    chain: &ChainPresentation,
    n_max: u32,
    sample_count: u32,
    horizon: u32,
) -> Result<ChainCertificate, SetError> {
    assert!(n_max >= 1);
    let am = chain.ambient;
    let mut stages = Vec::new();
    let mut failures = Vec::new();
    for n in 1..=n_max {
        let fn_expr = chain.set(n);
        let fn_next = chain.set(n + 1);
        // Decreasingness on the ball.
        let mut decreasing_ok = true;
        for i in 0..am.ball_size(horizon) {
            let x = am.enumerate(i);
            if fn_next.member(am, &x)? && !fn_expr.member(am, &x)? {
                decreasing_ok = false;
                failures.push(ChainFailure {
                    n,
                    f: None,
                    offender: Some(x),
                    kind: "decreasing".into(),
                });
                break;
            }
        }
        // Family membership.
        let family_verdict = chain.family.member(am, &fn_expr, horizon)?;
        if !family_verdict.is_yes() {
            failures.push(ChainFailure {
                n,
                f: None,
                offender: None,
                kind: format!("family membership not certified ({})", chain.family.name()),
            });
        }
        // Shift witnesses for the smallest members in enumeration order.
        let mut samples = Vec::new();
        let mut found = 0u32;
        for i in 0..am.ball_size(horizon) {
            if found >= sample_count {
                break;
            }
            let f = am.enumerate(i);
            if !fn_expr.member(am, &f)? {
                continue;
            }
            found += 1;
            let m = chain.witness(n, &f);
            let mut ok = m.is_some();
            if let Some(m) = m {
                let fm = chain.set(m);
                for j in 0..am.ball_size(horizon) {
                    let x = am.enumerate(j);
                    // x in f F_m  <=>  f^-1 x in F_m.
                    let q = am.left_quotient(&f, &x)?;
                    let in_translate = match q {
                        Some(q) => fm.member(am, &q)?,
                        None => false,
                    };
                    if in_translate && !fn_expr.member(am, &x)? {
                        ok = false;
                        failures.push(ChainFailure {
                            n,
                            f: Some(f.clone()),
                            offender: Some(x),
                            kind: "shift".into(),
                        });
                        break;
                    }
                }
            } else {
                failures.push(ChainFailure {
                    n,
                    f: Some(f.clone()),
                    offender: None,
                    kind: "no shift witness".into(),
                });
            }
            samples.push(ShiftSample { f, m, ok });
        }
        stages.push(ChainStageReport {
            n,
            family_verdict,
            decreasing_ok,
            samples,
        });
    }
    let passed = failures.is_empty() && stages.iter().all(|s| s.family_verdict.is_yes());
    Ok(ChainCertificate {
        schema: "rl-cert-1".into(),
        descriptor: chain.descriptor.clone(),
        family: chain.family.name().into(),
        n_max,
        sample_count,
        horizon,
        stages,
        failures,
        passed,
    })
}

// ---------------------------------------------------------------------------
// Central-set chain builder: joint return sets of a proximal pair.
// ---------------------------------------------------------------------------

/// Per-stage record of the central chain construction.
#[derive(Debug, Clone, Serialize)]
pub struct CentralStage {
    pub n: u32,
    /// Enumeration-prefix length replacing the ball of radius eps/n.
    pub prefix_len: u64,
    /// F_n on the scan ball.
    pub elements: BTreeSet<Element>,
    /// Syndetic part A = N(y, B(y, eps/2n)).
    pub syndetic_verdict: Verdict,
    /// Thick part B = {g : d(gx, gy) < eps/2n}.
    pub thick_verdict: Verdict,
    /// Elements of A ∩ B checked inside F_n.
    pub inclusion_checked: u64,
}

#[derive(Debug, Clone)]
pub struct CentralChainOutput {
    pub chain: ChainPresentation,
    pub stages: Vec<CentralStage>,
}

/// Enumeration prefix carrying the dyadic metric ball of radius
/// `2^-eps_exp / n`: all indices i with `2^-i >= eps/n`.
fn metric_prefix_len(eps_exp: u32, n: u32) -> u64 {
    // 2^-i >= 2^-e / n  <=>  i <= e + log2(n)
    let log = 31 - n.leading_zeros().min(31);
    (eps_exp as u64) + log as u64 + 1
}

/// The three stage expressions of the central chain at index n: the joint
/// return set F_n, its syndetic part A, and its thick (proximality) part B.
fn central_stage_exprs(
    x: &SymbolicPoint,
    y: &SymbolicPoint,
    eps_exp: u32,
    n: u32,
) -> (SetExpr, SetExpr, SetExpr) {
    let am = x.ambient;
    let prefix = |len: u64| -> Vec<Element> { (0..len).map(|i| am.enumerate(i)).collect() };
    let p_n = prefix(metric_prefix_len(eps_exp, n));
    let p_2n = prefix(metric_prefix_len(eps_exp, 2 * n));
    let capped = |points: &[&SymbolicPoint], p: &[Element]| -> Option<u32> {
        let max_norm = p.iter().map(|t| am.norm(t)).max().unwrap_or(0);
        let cap = points
            .iter()
            .map(|z| z.guarantee.unwrap_or(u32::MAX))
            .min()
            .unwrap_or(u32::MAX);
        if cap == u32::MAX {
            None
        } else {
            Some(cap.saturating_sub(max_norm))
        }
    };
    let f_pred = {
        let xs = x.clone();
        let ys = y.clone();
        let guarantee = capped(&[x, y], &p_n);
        let p = p_n;
        SetExpr::predicate(format!("joint-return[n={n}]"), guarantee, move |am, g| {
            p.iter().all(|t| {
                let tg = am.mul(t, g).expect("same ambient");
                let yt = ys.eval(t).expect("within guarantee");
                xs.eval(&tg).expect("within guarantee") == yt
                    && ys.eval(&tg).expect("within guarantee") == yt
            })
        })
    };
    let a_expr = {
        let ys = y.clone();
        let guarantee = capped(&[y], &p_2n);
        let p = p_2n.clone();
        SetExpr::predicate(format!("y-return[n={n}]"), guarantee, move |am, g| {
            p.iter().all(|t| {
                let tg = am.mul(t, g).expect("same ambient");
                ys.eval(&tg).expect("within guarantee") == ys.eval(t).expect("within guarantee")
            })
        })
    };
    let b_expr = {
        let xs = x.clone();
        let ys = y.clone();
        let guarantee = capped(&[x, y], &p_2n);
        let p = p_2n;
        SetExpr::predicate(format!("proximal[n={n}]"), guarantee, move |am, g| {
            p.iter().all(|t| {
                let tg = am.mul(t, g).expect("same ambient");
                xs.eval(&tg).expect("within guarantee") == ys.eval(&tg).expect("within guarantee")
            })
        })
    };
    (f_pred, a_expr, b_expr)
}

/// Build the chain `F_n = N((x,y), B(y, eps/n) x B(y, eps/n))` for a
/// proximal pair with almost periodic second coordinate, together with the
/// thick/syndetic decomposition certificates of each stage. The metric is
/// the dyadic cylinder metric through the ambient enumeration;
/// `eps = 2^-eps_exp`.
pub fn central_chain(
    x: &SymbolicPoint,
    y: &SymbolicPoint,
    eps_exp: u32,
    n_max: u32,
    horizon: u32,
) -> Result<CentralChainOutput, SetError> {
    assert!(n_max >= 1);
    let am = x.ambient;
    if y.ambient != am {
        return Err(SetError::UnsupportedAmbient("central-chain".into(), am));
    }
    let mut stages = Vec::new();
    for n in 1..=n_max {
        let l_n = metric_prefix_len(eps_exp, n);
        let (f_pred, a_expr, b_expr) = central_stage_exprs(x, y, eps_exp, n);
        let syndetic_verdict = classify_syndetic(am, &a_expr, horizon)?;
        if !syndetic_verdict.is_yes() {
            return Err(SetError::Precondition {
                reason: format!(
                    "return sets of y are not syndetic-certified at stage {n} (almost periodicity unmet)"
                ),
                offender: format!("stage {n}"),
            });
        }
        let thick_verdict = classify_thick(am, &b_expr, horizon)?;
        if !thick_verdict.is_yes() {
            return Err(SetError::Precondition {
                reason: format!("proximality never witnessed within horizon at stage {n}"),
                offender: format!("stage {n}"),
            });
        }
        // A ∩ B ⊂ F_n, elementwise on the ball (ultrametric triangle).
        let mut inclusion_checked = 0;
        let mut elements = BTreeSet::new();
        for i in 0..am.ball_size(horizon) {
            let g = am.enumerate(i);
            if f_pred.member(am, &g)? {
                elements.insert(g.clone());
            }
            if a_expr.member(am, &g)? && b_expr.member(am, &g)? {
                inclusion_checked += 1;
                if !f_pred.member(am, &g)? {
                    return Err(SetError::Precondition {
                        reason: "A ∩ B escaped the joint return set".into(),
                        offender: g.describe(),
                    });
                }
            }
        }
        stages.push(CentralStage {
            n,
            prefix_len: l_n,
            elements,
            syndetic_verdict,
            thick_verdict,
            inclusion_checked,
        });
    }
    // Shift witnesses by neighborhood refinement: m with
    // prefix(L(m)) ⊇ prefix(L(n)) * f.
    let eps = eps_exp;
    let amb = am;
    let witness = move |n: u32, f: &Element| -> Option<u32> {
        let l_n = metric_prefix_len(eps, n);
        let mut max_index = 0u64;
        for i in 0..l_n {
            let t = amb.enumerate(i);
            let tf = amb.mul(&t, f).ok()?;
            max_index = max_index.max(amb.index_of(&tf));
        }
        // Need L(m) = eps + floor(log2 m) + 1 > max_index.
        let need_log = max_index.saturating_sub(eps as u64);
        if need_log >= 30 {
            return None;
        }
        let m = 1u32 << need_log;
        Some(m.max(n))
    };
    // The chain function builds F_n (as the structurally pws expression
    // (B ∩ A) ∪ F_n) on demand for any index, so witness checks evaluate
    // genuinely finer stages.
    let xs = x.clone();
    let ys = y.clone();
    let chain = ChainPresentation::new(
        am,
        Family::PiecewiseSyndetic,
        format!("central-chain:eps=2^-{eps_exp},n_max={n_max}"),
        move |n| {
            let (f_pred, a_expr, b_expr) = central_stage_exprs(&xs, &ys, eps_exp, n.max(1));
            SetExpr::union(SetExpr::intersection(b_expr, a_expr), f_pred)
        },
        witness,
    );
    Ok(CentralChainOutput { chain, stages })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Family;

    #[test]
    fn constant_even_chain_validates() {
        let chain = ChainPresentation::constant(
            Ambient::Z,
            Family::PiecewiseSyndetic,
            SetExpr::ep(0, 2, [0]),
            "const:ep:0,2,{0}",
        );
        let cert = chain_validate(&chain, 3, 5, 60).unwrap();
        assert!(cert.passed, "failures: {:?}", cert.failures);
    }

    #[test]
    fn full_chain_over_n0_validates_trivially() {
        let chain = ChainPresentation::constant(
            Ambient::N0,
            Family::PiecewiseSyndetic,
            SetExpr::ep(0, 1, [0]),
            "const:full",
        );
        let cert = chain_validate(&chain, 2, 3, 50).unwrap();
        assert!(cert.passed);
    }

    #[test]
    fn geometric_chain_validates() {
        let chain = ChainPresentation::geometric(Ambient::N0, Family::PiecewiseSyndetic, 2);
        let cert = chain_validate(&chain, 3, 3, 64).unwrap();
        assert!(cert.passed, "failures: {:?}", cert.failures);
    }

    #[test]
    fn bad_chain_reports_shift_offender() {
        // F_n = {1} ∪ 2N with m ≡ 1: 1 + F_1 ∋ 3 is outside F_1.
        let expr = SetExpr::union(
            SetExpr::finite([Element::int(Ambient::N0, 1)]),
            SetExpr::multiples(2),
        );
        let chain = ChainPresentation::constant(
            Ambient::N0,
            Family::PiecewiseSyndetic,
            expr,
            "bad-chain",
        );
        let cert = chain_validate(&chain, 1, 4, 40).unwrap();
        assert!(!cert.passed);
        let shift_failures: Vec<_> = cert
            .failures
            .iter()
            .filter(|f| f.kind == "shift")
            .collect();
        assert!(!shift_failures.is_empty());
        let f = &shift_failures[0];
        assert_eq!(f.f.as_ref().unwrap().as_int(), Some(1));
        assert_eq!(f.offender.as_ref().unwrap().as_int(), Some(3));
    }

    #[test]
    fn central_chain_blocks_vs_ones() {
        let am = Ambient::Z;
        let blocks = SetExpr::predicate("pow2-blocks", None, |_, g| {
            let n = g.as_int().unwrap_or(-1);
            if n < 2 {
                return false;
            }
            let j = 63 - (n as u64).leading_zeros() as i64;
            let base = 1i64 << j;
            n >= base && n <= base + j
        });
        let x = SymbolicPoint::indicator(am, blocks);
        let y = SymbolicPoint::constant(am, true);
        let out = central_chain(&x, &y, 1, 3, 700).unwrap();
        for stage in &out.stages {
            assert!(
                !stage.elements.is_empty(),
                "stage {} empty within horizon",
                stage.n
            );
            assert!(stage.syndetic_verdict.is_yes());
            assert!(stage.thick_verdict.is_yes());
        }
        // The emitted chain passes validation without modification.
        let cert = chain_validate(&out.chain, 3, 2, 120).unwrap();
        assert!(cert.passed, "failures: {:?}", cert.failures);
    }

    #[test]
    fn central_chain_distal_fixed_point() {
        let am = Ambient::Z;
        let x = SymbolicPoint::constant(am, true);
        let y = SymbolicPoint::constant(am, true);
        let out = central_chain(&x, &y, 1, 2, 80).unwrap();
        // x = y fixed: every stage is the whole ball.
        for stage in &out.stages {
            assert_eq!(stage.elements.len() as u64, am.ball_size(80));
        }
    }

    #[test]
    fn central_chain_without_agreement_errors() {
        let am = Ambient::Z;
        let x = SymbolicPoint::constant(am, false);
        let y = SymbolicPoint::constant(am, true);
        let err = central_chain(&x, &y, 1, 1, 60).unwrap_err();
        assert!(matches!(err, SetError::Precondition { .. }));
    }
}
