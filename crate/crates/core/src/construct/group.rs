//! The inductive builder over a countable group: from a validated chain
//! presentation and (P1)/(P2) block suppliers, produce a symbolic point z
//! with `N(z,[1]) ⊂ F_1` on the committed region. All selection batteries
//! are stored in the trace and re-checked independently.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ambient::{Ambient, Element};
use crate::chain::ChainPresentation;
use crate::classify::{classify_pws, Witness};
use crate::error::SetError;
use crate::family::Family;
use crate::setexpr::SetExpr;
use crate::subshift::SymbolicPoint;
use crate::witness::separated_lazy;

use super::TRACE_SCHEMA;

/// Per-row context handed to the block supplier.
pub struct RowContext<'a> {
    pub fprime: &'a SetExpr,
    /// Thick/syndetic decomposition when the family is piecewise syndetic.
    pub decomposition: Option<(&'a SetExpr, &'a SetExpr)>,
    /// Search and evaluation bound.
    pub guarantee: u32,
}

/// A B-separated family member, with its thick/syndetic decomposition when
/// one drove the construction.
pub struct SeparatedPart {
    pub expr: SetExpr,
    pub decomposition: Option<(SetExpr, SetExpr)>,
}

/// Supplies the B-separated family member inside F_m (property (P2)).
pub trait P2Provider: Send + Sync {
    fn separated(
        &self,
        am: Ambient,
        family: &Family,
        f_m: &SetExpr,
        b_set: &BTreeSet<Element>,
        guarantee: u32,
    ) -> Result<SeparatedPart, SetError>;
}

/// Supplies the n-th disjoint block of F' (property (P1)); must be a pure
/// function of its arguments.
pub trait P1Provider: Send + Sync {
    fn block(
        &self,
        am: Ambient,
        row: &RowContext<'_>,
        n: u32,
        committed: &BTreeSet<Element>,
    ) -> Result<BTreeSet<Element>, SetError>;
}

/// Default (P2): greedily separate the syndetic part (piecewise syndetic
/// family) or the whole member (other families) against B.
pub struct DefaultP2;

impl P2Provider for DefaultP2 {
    fn separated(
        &self,
        am: Ambient,
        family: &Family,
        f_m: &SetExpr,
        b_set: &BTreeSet<Element>,
        guarantee: u32,
    ) -> Result<SeparatedPart, SetError> {
        if matches!(family, Family::PiecewiseSyndetic) {
            let v = classify_pws(am, f_m, guarantee)?;
            let Some(Witness::Pws {
                thick_part,
                synd_part,
                ..
            }) = v.witness
            else {
                return Err(SetError::Precondition {
                    reason: "chain set is not pws-certified; no decomposition for (P2)".into(),
                    offender: f_m.describe(),
                });
            };
            let b_sep = separated_lazy(am, &synd_part, b_set, guarantee)?;
            Ok(SeparatedPart {
                expr: SetExpr::intersection(thick_part.clone(), b_sep.clone()),
                decomposition: Some((thick_part, b_sep)),
            })
        } else {
            Ok(SeparatedPart {
                expr: separated_lazy(am, f_m, b_set, guarantee)?,
                decomposition: None,
            })
        }
    }
}

/// Default (P1): ball translates inside the thick part meeting the
/// separated syndetic part, or singletons when no decomposition applies.
pub struct DefaultP1;

impl P1Provider for DefaultP1 {
    fn block(
        &self,
        am: Ambient,
        row: &RowContext<'_>,
        n: u32,
        committed: &BTreeSet<Element>,
    ) -> Result<BTreeSet<Element>, SetError> {
        match row.decomposition {
            Some((thick_part, synd_part)) => {
                let level = 1 + (n - 1) / 3;
                find_block(am, thick_part, synd_part, level, committed, row.guarantee)
            }
            None => {
                // Next member of F' in enumeration order outside committed.
                for i in 0..am.ball_size(row.guarantee) {
                    let g = am.enumerate(i);
                    if g.is_identity() || committed.contains(&g) {
                        continue;
                    }
                    if row.fprime.member(am, &g)? {
                        return Ok(BTreeSet::from([g]));
                    }
                }
                Err(SetError::Horizon(format!(
                    "singleton block {n} not found within ball({})",
                    row.guarantee
                )))
            }
        }
    }
}

/// Leftmost g with `ball(level) g ⊂ thick_part`, the translate meeting the
/// separated part outside the committed blocks.
fn find_block(
    am: Ambient,
    thick_part: &SetExpr,
    synd_part: &SetExpr,
    level: u32,
    committed: &BTreeSet<Element>,
    guarantee: u32,
) -> Result<BTreeSet<Element>, SetError> {
    let ball = am.ball(level);
    let limit = am.ball_size(guarantee.saturating_sub(level).max(1));
    'outer: for i in 0..limit {
        let g = am.enumerate(i);
        let mut block = BTreeSet::new();
        for k in &ball {
            let kg = am.mul(k, &g)?;
            if !thick_part.member(am, &kg)? {
                continue 'outer;
            }
            if synd_part.member(am, &kg)? {
                if committed.contains(&kg) {
                    continue 'outer;
                }
                block.insert(kg);
            }
        }
        if !block.is_empty() {
            return Ok(block);
        }
    }
    Err(SetError::Horizon(format!(
        "no admissible block at level {level} within ball({guarantee})"
    )))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupStage {
    pub i: u32,
    pub m_index: u32,
    pub b_set: Vec<String>,
    pub fprime_desc: String,
    /// F'_{m_i} on the committed ball, materialized for the checker.
    pub fprime_window: Vec<String>,
    pub window_level: u32,
    /// Selected indices t(j, i) per row j.
    pub t_indices: Vec<(u32, u32)>,
    /// Selected blocks A_i^{(j)} per row j.
    pub blocks: Vec<(u32, Vec<String>)>,
    /// N(z^{(i)}, [1]).
    pub ones: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupTrace {
    pub schema: String,
    pub ambient: Ambient,
    pub chain: String,
    pub family: String,
    pub depth: u32,
    pub ball_level: u32,
    pub stages: Vec<GroupStage>,
}

struct BlockRow {
    fprime: SetExpr,
    decomposition: Option<(SetExpr, SetExpr)>,
    blocks: Vec<BTreeSet<Element>>,
    committed: BTreeSet<Element>,
}

impl BlockRow {
    fn get(
        &mut self,
        am: Ambient,
        p1: &dyn P1Provider,
        n: u32,
        guarantee: u32,
    ) -> Result<BTreeSet<Element>, SetError> {
        while self.blocks.len() < n as usize {
            let ctx = RowContext {
                fprime: &self.fprime,
                decomposition: self
                    .decomposition
                    .as_ref()
                    .map(|(t, s)| (t, s)),
                guarantee,
            };
            let next = p1.block(am, &ctx, self.blocks.len() as u32 + 1, &self.committed)?;
            if next.is_empty() {
                return Err(SetError::Horizon("empty block from supplier".into()));
            }
            if next.iter().any(|g| self.committed.contains(g)) {
                return Err(SetError::Precondition {
                    reason: "supplier block overlaps earlier blocks".into(),
                    offender: "p1".into(),
                });
            }
            self.committed.extend(next.iter().cloned());
            self.blocks.push(next);
        }
        Ok(self.blocks[n as usize - 1].clone())
    }
}

fn elements_to_strings(set: &BTreeSet<Element>) -> Vec<String> {
    set.iter().map(|e| e.to_string()).collect()
}

fn product(am: Ambient, xs: &BTreeSet<Element>, ys: &BTreeSet<Element>) -> Result<BTreeSet<Element>, SetError> {
    let mut out = BTreeSet::new();
    for x in xs {
        for y in ys {
            out.insert(am.mul(x, y)?);
        }
    }
    Ok(out)
}

fn inverse_product(
    am: Ambient,
    b: &BTreeSet<Element>,
    xs: &BTreeSet<Element>,
) -> Result<BTreeSet<Element>, SetError> {
    let mut out = BTreeSet::new();
    for x in xs {
        for h in b {
            let hi = am.inv(h)?;
            out.insert(am.mul(&hi, x)?);
        }
    }
    Ok(out)
}

/// Build a symbolic point over a countable group from a chain presentation.
/// The committed pattern satisfies `N(z,[1]) ⊂ F_1`; all twenty stage
/// hypotheses are stored as finite assertions in the trace.
pub fn build_group(
    chain: &ChainPresentation,
    p1: &dyn P1Provider,
    p2: &dyn P2Provider,
    depth: u32,
    ball_level: u32,
) -> Result<(SymbolicPoint, GroupTrace), SetError> {
    let am = chain.ambient;
    if !am.is_group() {
        return Err(SetError::UnsupportedAmbient("group-builder".into(), am));
    }
    assert!(depth >= 1);
    let identity = am.identity();
    let f1 = chain.set(1);
    if !f1.member(am, &identity)? {
        return Err(SetError::Precondition {
            reason: "the identity must belong to F_1 (chains are not normalized silently)".into(),
            offender: identity.describe(),
        });
    }

    let exhausting = |i: u32| -> BTreeSet<Element> {
        if i <= 1 {
            BTreeSet::from([identity.clone()])
        } else {
            am.ball(i - 1).into_iter().collect()
        }
    };

    let decomposition_of = |expr: &SetExpr| -> Result<Option<(SetExpr, SetExpr)>, SetError> {
        if !matches!(chain.family, Family::PiecewiseSyndetic) {
            return Ok(None);
        }
        let v = classify_pws(am, expr, ball_level)?;
        match v.witness {
            Some(Witness::Pws {
                thick_part,
                synd_part,
                ..
            }) => Ok(Some((thick_part, synd_part))),
            _ => Err(SetError::Precondition {
                reason: "chain set not pws-certified".into(),
                offender: expr.describe(),
            }),
        }
    };

    let mut rows: Vec<BlockRow> = Vec::new();
    let mut t_last: Vec<u32> = Vec::new(); // last selected index per row
    let mut ones_history: Vec<BTreeSet<Element>> = Vec::new();
    let mut b_history: Vec<BTreeSet<Element>> = Vec::new();
    let mut block_history: Vec<Vec<(u32, BTreeSet<Element>)>> = Vec::new();
    let mut stages: Vec<GroupStage> = Vec::new();

    // Stage 1: m_1 = 1, F'_1 = F_1, B_1 = {e}.
    rows.push(BlockRow {
        decomposition: decomposition_of(&f1)?,
        fprime: f1.clone(),
        blocks: Vec::new(),
        committed: BTreeSet::new(),
    });
    t_last.push(0);
    let a11 = rows[0].get(am, p1, 1, ball_level)?;
    t_last[0] = 1;
    let mut ones: BTreeSet<Element> = BTreeSet::from([identity.clone()]);
    ones.extend(a11.iter().cloned());
    for g in &ones {
        if !f1.member(am, g)? {
            return Err(SetError::Precondition {
                reason: "stage 1 return set escapes F_1".into(),
                offender: g.describe(),
            });
        }
    }
    let b1 = BTreeSet::from([identity.clone()]);
    stages.push(GroupStage {
        i: 1,
        m_index: 1,
        b_set: elements_to_strings(&b1),
        fprime_desc: f1.describe(),
        fprime_window: {
            let w = f1.elements_in_ball(am, ball_level)?;
            w.iter().map(|e| e.to_string()).collect()
        },
        window_level: ball_level,
        t_indices: vec![(1, 1)],
        blocks: vec![(1, elements_to_strings(&a11))],
        ones: elements_to_strings(&ones),
    });
    ones_history.push(ones.clone());
    b_history.push(b1);
    block_history.push(vec![(1, a11)]);

    for stage in 2..=depth {
        let k = stage - 1;
        let n_k = ones_history[k as usize - 1].clone();
        // m_{k+1} from the chain witnesses against F_1.
        let mut m_next = 1u32;
        for f in &n_k {
            let m = chain.witness(1, f).ok_or_else(|| SetError::Precondition {
                reason: format!("chain provides no shift witness for {f} in F_1"),
                offender: f.describe(),
            })?;
            m_next = m_next.max(m);
        }
        let f_m = chain.set(m_next);
        // Hypothesis (5): n_k * F_{m} ⊂ F_1 on the window.
        for f in &n_k {
            for i in 0..am.ball_size(ball_level) {
                let y = am.enumerate(i);
                if f_m.member(am, &y)? {
                    let fy = am.mul(f, &y)?;
                    if !f1.member(am, &fy)? {
                        return Err(SetError::Precondition {
                            reason: format!("n_{k} F_{m_next} escapes F_1"),
                            offender: fy.describe(),
                        });
                    }
                }
            }
        }
        let mut b_next: BTreeSet<Element> = n_k.clone();
        b_next.extend(exhausting(stage));
        let part = p2.separated(am, &chain.family, &f_m, &b_next, ball_level)?;
        let fprime = part.expr;
        rows.push(BlockRow {
            decomposition: part.decomposition,
            fprime: fprime.clone(),
            blocks: Vec::new(),
            committed: BTreeSet::new(),
        });
        t_last.push(stage - 1); // t(i,i) > i-1

        // Y: all committed copy regions B_t A_col^{(t)} from earlier stages.
        let mut union_y: BTreeSet<Element> = BTreeSet::new();
        for t in 2..=k {
            let b_t = &b_history[t as usize - 1];
            for cols in block_history.iter().skip(t as usize - 1) {
                for (row_j, block) in cols {
                    if *row_j == t {
                        union_y.extend(product(am, b_t, block)?);
                    }
                }
            }
        }

        // Select blocks row by row; the forbidden set accumulates the
        // selections already made at this stage.
        let mut new_blocks: Vec<(u32, BTreeSet<Element>)> = Vec::new();
        let mut t_indices: Vec<(u32, u32)> = Vec::new();
        let mut x_set: BTreeSet<Element> = b_next.clone();
        x_set.extend(union_y.iter().cloned());
        for j in 1..=stage {
            let b_j: &BTreeSet<Element> = if j == stage {
                &b_next
            } else {
                &b_history[j as usize - 1]
            };
            let forbidden = if j == 1 {
                x_set.clone()
            } else {
                inverse_product(am, b_j, &x_set)?
            };
            let mut t_idx = t_last[j as usize - 1];
            let cap = t_idx + forbidden.len() as u32 + 16;
            let selected = loop {
                t_idx += 1;
                if t_idx > cap {
                    return Err(SetError::Horizon(format!(
                        "block selection exhausted at stage {stage}, row {j}: forbidden set of \
                         size {} not avoided after {} candidates",
                        forbidden.len(),
                        cap - t_last[j as usize - 1]
                    )));
                }
                let c = rows[j as usize - 1].get(am, p1, t_idx, ball_level)?;
                if c.iter().all(|g| !forbidden.contains(g)) {
                    break c;
                }
            };
            t_last[j as usize - 1] = t_idx;
            t_indices.push((j, t_idx));
            // Committed copy region of this selection joins the geometry
            // guarded against by later rows.
            let region = if j == 1 {
                selected.clone()
            } else {
                product(am, b_j, &selected)?
            };
            x_set.extend(region);
            new_blocks.push((j, selected));
        }

        // Commit: n_{k+1} = n_k ∪ A^{(1)} ∪ ⋃_j n_j A^{(j+1)}.
        let mut ones_next = n_k.clone();
        for (j, block) in &new_blocks {
            if *j == 1 {
                ones_next.extend(block.iter().cloned());
            } else {
                let n_prev = &ones_history[*j as usize - 2];
                ones_next.extend(product(am, n_prev, block)?);
            }
        }
        for g in &ones_next {
            if !f1.member(am, g)? {
                return Err(SetError::Precondition {
                    reason: format!("stage {stage} return set escapes F_1"),
                    offender: g.describe(),
                });
            }
        }
        stages.push(GroupStage {
            i: stage,
            m_index: m_next,
            b_set: elements_to_strings(&b_next),
            fprime_desc: fprime.describe(),
            fprime_window: {
                let w = fprime.elements_in_ball(am, ball_level)?;
                w.iter().map(|e| e.to_string()).collect()
            },
            window_level: ball_level,
            t_indices,
            blocks: new_blocks
                .iter()
                .map(|(j, b)| (*j, elements_to_strings(b)))
                .collect(),
            ones: elements_to_strings(&ones_next),
        });
        ones_history.push(ones_next);
        b_history.push(b_next);
        block_history.push(new_blocks);
    }

    let trace = GroupTrace {
        schema: TRACE_SCHEMA.into(),
        ambient: am,
        chain: chain.descriptor.clone(),
        family: chain.family.name().into(),
        depth,
        ball_level,
        stages,
    };
    let final_ones = ones_history.last().unwrap();
    let mut values = std::collections::BTreeMap::new();
    for g in final_ones {
        values.insert(g.clone(), true);
    }
    let z = SymbolicPoint::explicit(am, values, false);
    Ok((z, trace))
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupCheckReport {
    pub violations: Vec<String>,
    /// Copy equalities (fact (i)) verified: (stage, row, pairs checked).
    pub copy_pairs_checked: Vec<(u32, u32, u64)>,
}

impl GroupCheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn parse_set(am: Ambient, items: &[String]) -> Result<BTreeSet<Element>, SetError> {
    items
        .iter()
        .map(|s| am.parse_element(s).map_err(SetError::from))
        .collect()
}

/// Standalone re-validation of a group trace against the chain: recomputes
/// the B-sets and return sets, re-checks the disjointness batteries
/// (15)-(16), the copy rules (17)-(19), membership hypotheses (2), (4),
/// (5), the separation (6), and t-index monotonicity (10)-(12).
pub fn check_group_trace(
    trace: &GroupTrace,
    chain: &ChainPresentation,
) -> Result<GroupCheckReport, SetError> {
    let am = trace.ambient;
    let identity = am.identity();
    let f1 = chain.set(1);
    let mut violations = Vec::new();
    let mut copy_pairs_checked = Vec::new();
    let mut fail = |msg: String| violations.push(msg);

    let ones: Vec<BTreeSet<Element>> = trace
        .stages
        .iter()
        .map(|s| parse_set(am, &s.ones))
        .collect::<Result<_, _>>()?;
    let b_sets: Vec<BTreeSet<Element>> = trace
        .stages
        .iter()
        .map(|s| parse_set(am, &s.b_set))
        .collect::<Result<_, _>>()?;
    let windows: Vec<BTreeSet<Element>> = trace
        .stages
        .iter()
        .map(|s| parse_set(am, &s.fprime_window))
        .collect::<Result<_, _>>()?;
    let blocks: Vec<Vec<(u32, BTreeSet<Element>)>> = trace
        .stages
        .iter()
        .map(|s| {
            s.blocks
                .iter()
                .map(|(j, b)| Ok((*j, parse_set(am, b)?)))
                .collect::<Result<Vec<_>, SetError>>()
        })
        .collect::<Result<_, _>>()?;

    for (idx, stage) in trace.stages.iter().enumerate() {
        let i = stage.i;
        // (1) B_i = N(z^{(i-1)},[1]) ∪ G_i.
        let expected_b: BTreeSet<Element> = if idx == 0 {
            BTreeSet::from([identity.clone()])
        } else {
            let mut b = ones[idx - 1].clone();
            b.extend(am.ball(i - 1));
            b
        };
        if expected_b != b_sets[idx] {
            fail(format!("H1: stage {i}: B set mismatch"));
        }
        // (2) N(z^{(i)},[1]) ⊂ F_1.
        for g in &ones[idx] {
            if !f1.member(am, g)? {
                fail(format!("H2: stage {i}: {g} escapes F_1"));
            }
        }
        // (3) return-set recursion.
        if idx > 0 {
            let mut expected = ones[idx - 1].clone();
            for (j, block) in &blocks[idx] {
                if *j == 1 {
                    expected.extend(block.iter().cloned());
                } else {
                    expected.extend(product(am, &ones[*j as usize - 2], block)?);
                }
            }
            if expected != ones[idx] {
                fail(format!("H3: stage {i}: return set recursion mismatch"));
            }
        } else {
            let mut expected = BTreeSet::from([identity.clone()]);
            for (_, block) in &blocks[0] {
                expected.extend(block.iter().cloned());
            }
            if expected != ones[0] {
                fail(format!("H3: stage 1: return set mismatch"));
            }
        }
        // (4) F' ⊂ F_m on the window.
        let f_m = chain.set(stage.m_index);
        for g in &windows[idx] {
            if !f_m.member(am, g)? {
                fail(format!("H4: stage {i}: F' member {g} escapes F_{}", stage.m_index));
                break;
            }
        }
        // (5) n_{i-1} F_{m_i} ⊂ F_1 on the window.
        if idx > 0 {
            'h5: for f in &ones[idx - 1] {
                for g in 0..am.ball_size(trace.ball_level.min(stage.window_level)) {
                    let y = am.enumerate(g);
                    if f_m.member(am, &y)? {
                        let fy = am.mul(f, &y)?;
                        if !f1.member(am, &fy)? {
                            fail(format!("H5: stage {i}: {f}·{y} escapes F_1"));
                            break 'h5;
                        }
                    }
                }
            }
        }
        // (6) B_i-separation of F' (on the window).
        let wvec: Vec<&Element> = windows[idx].iter().collect();
        'h6: for (a, f1e) in wvec.iter().enumerate() {
            for f2e in wvec.iter().skip(a + 1) {
                let t1 = product(am, &b_sets[idx], &BTreeSet::from([(*f1e).clone()]))?;
                let t2 = product(am, &b_sets[idx], &BTreeSet::from([(*f2e).clone()]))?;
                if t1.intersection(&t2).next().is_some() {
                    fail(format!("H6: stage {i}: B-translates of {f1e} and {f2e} meet"));
                    break 'h6;
                }
            }
        }
        // (7) blocks lie inside F' (window materialization).
        for (j, block) in &blocks[idx] {
            if *j == i {
                for g in block {
                    if !windows[idx].contains(g) {
                        fail(format!("H7: stage {i}: block row {j} element {g} outside F'"));
                    }
                }
            }
        }
        // (10)-(12) t-index monotonicity.
        if idx == 0 {
            if stage.t_indices != vec![(1, 1)] {
                fail("H10: stage 1 must select t(1,1) = 1".into());
            }
        } else {
            for (j, t) in &stage.t_indices {
                if *j == i {
                    if *t <= i - 1 {
                        fail(format!("H12: stage {i}: t({j},{i}) = {t} not > {}", i - 1));
                    }
                } else {
                    let prev = trace.stages[idx - 1]
                        .t_indices
                        .iter()
                        .find(|(pj, _)| pj == j)
                        .map(|(_, pt)| *pt)
                        .unwrap_or(0);
                    if *t <= prev {
                        fail(format!("H11: stage {i}: t({j},{i}) = {t} not > {prev}"));
                    }
                }
            }
        }
        // Same-row selected blocks pairwise disjoint (consequence of (8)).
        for other in trace.stages.iter().skip(idx + 1) {
            let other_blocks: Vec<(u32, BTreeSet<Element>)> = other
                .blocks
                .iter()
                .map(|(j, b)| Ok((*j, parse_set(am, b)?)))
                .collect::<Result<_, SetError>>()?;
            for (j, block) in &blocks[idx] {
                for (oj, oblock) in &other_blocks {
                    if j == oj && block.intersection(oblock).next().is_some() {
                        fail(format!(
                            "H8: rows {j}: blocks of stages {i} and {} intersect",
                            other.i
                        ));
                    }
                }
            }
        }
    }

    // Batteries (15)-(16) and copy rules (17)-(19).
    for (idx, stage) in trace.stages.iter().enumerate().skip(1) {
        let i = stage.i;
        // Y: earlier committed copy regions.
        let mut union_y: BTreeSet<Element> = BTreeSet::new();
        for t in 2..=(i - 1) {
            for (cidx, cols) in blocks.iter().enumerate().take(idx).skip(t as usize - 1) {
                let _ = cidx;
                for (row_j, block) in cols {
                    if *row_j == t {
                        union_y.extend(product(am, &b_sets[t as usize - 1], block)?);
                    }
                }
            }
        }
        // X grows with the selections of this stage, row by row.
        let mut x_set: BTreeSet<Element> = b_sets[idx].clone();
        x_set.extend(union_y.iter().cloned());
        for (j, block) in &blocks[idx] {
            let forbidden = if *j == 1 {
                x_set.clone()
            } else {
                inverse_product(am, &b_sets[*j as usize - 1], &x_set)?
            };
            if let Some(g) = block.iter().find(|g| forbidden.contains(*g)) {
                fail(format!(
                    "H15/H16: stage {i}: block row {j} meets the forbidden set at {g}"
                ));
            }
            let region = if *j == 1 {
                block.clone()
            } else {
                product(am, &b_sets[*j as usize - 1], block)?
            };
            x_set.extend(region);
        }
        // (17) z^{(i)} agrees with z^{(i-1)} on B_i.
        for h in &b_sets[idx] {
            let now = ones[idx].contains(h);
            let before = ones[idx - 1].contains(h);
            if now != before {
                fail(format!("H17: stage {i}: value changed on B at {h}"));
            }
        }
        // (18) A^{(1)} committed as ones.
        for (j, block) in &blocks[idx] {
            if *j == 1 {
                for g in block {
                    if !ones[idx].contains(g) {
                        fail(format!("H18: stage {i}: {g} not committed"));
                    }
                }
            }
        }
        // (19)/fact (i): copy equalities z(h g) = z^{(j-1)}(h).
        for (j, block) in &blocks[idx] {
            if *j == 1 {
                continue;
            }
            let mut pairs = 0;
            for h in &b_sets[*j as usize - 1] {
                for g in block {
                    let hg = am.mul(h, g)?;
                    let lhs = ones[idx].contains(&hg);
                    let rhs = ones[*j as usize - 2].contains(h);
                    if lhs != rhs {
                        fail(format!(
                            "H19: stage {i}: copy rule broken at h = {h}, g = {g}"
                        ));
                    }
                    pairs += 1;
                }
            }
            copy_pairs_checked.push((i, *j, pairs));
        }
    }

    Ok(GroupCheckReport {
        violations,
        copy_pairs_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::chain_validate;

    fn build_and_check(
        chain: &ChainPresentation,
        depth: u32,
        ball: u32,
    ) -> (SymbolicPoint, GroupTrace, GroupCheckReport) {
        let cert = chain_validate(chain, depth, 3, ball.min(100)).unwrap();
        assert!(cert.passed, "chain invalid: {:?}", cert.failures);
        let (z, trace) = build_group(chain, &DefaultP1, &DefaultP2, depth, ball).unwrap();
        let report = check_group_trace(&trace, chain).unwrap();
        (z, trace, report)
    }

    #[test]
    fn even_chain_over_z() {
        let chain = ChainPresentation::constant(
            Ambient::Z,
            Family::PiecewiseSyndetic,
            SetExpr::ep(0, 2, [0]),
            "const:ep:0,2,{0}",
        );
        let (z, trace, report) = build_and_check(&chain, 3, 500);
        assert!(report.passed(), "violations: {:?}", report.violations);
        // Every committed return is even.
        let last = trace.stages.last().unwrap();
        assert!(last.ones.len() > 3, "return set too small: {:?}", last.ones);
        for s in &last.ones {
            let g = Ambient::Z.parse_element(s).unwrap();
            assert_eq!(g.as_int().unwrap().rem_euclid(2), 0, "odd return {s}");
        }
        assert!(z.eval(&Ambient::Z.identity()).unwrap());
    }

    #[test]
    fn full_chain_over_z_unconstrained() {
        let chain = ChainPresentation::constant(
            Ambient::Z,
            Family::PiecewiseSyndetic,
            SetExpr::Full,
            "const:full",
        );
        let (_, _, report) = build_and_check(&chain, 3, 400);
        assert!(report.passed(), "violations: {:?}", report.violations);
    }

    #[test]
    fn even_length_words_over_f2() {
        let even_words = SetExpr::intersection(
            SetExpr::Full,
            SetExpr::predicate("even-words", None, |am, g| am.norm(g) % 2 == 0),
        );
        let chain = ChainPresentation::constant(
            Ambient::F2,
            Family::PiecewiseSyndetic,
            even_words,
            "const:even-words",
        );
        let (_, trace, report) = build_and_check(&chain, 2, 5);
        assert!(report.passed(), "violations: {:?}", report.violations);
        for s in &trace.stages.last().unwrap().ones {
            let g = Ambient::F2.parse_element(s).unwrap();
            assert_eq!(Ambient::F2.norm(&g) % 2, 0, "odd-length word {s}");
        }
    }

    #[test]
    fn checker_rejects_tampered_ones() {
        let chain = ChainPresentation::constant(
            Ambient::Z,
            Family::PiecewiseSyndetic,
            SetExpr::ep(0, 2, [0]),
            "const:ep:0,2,{0}",
        );
        let (_, mut trace) = build_group(&chain, &DefaultP1, &DefaultP2, 2, 300).unwrap();
        trace.stages.last_mut().unwrap().ones.push("7".into());
        let report = check_group_trace(&trace, &chain).unwrap();
        assert!(!report.passed());
        assert!(report.violations.iter().any(|v| v.contains("H2")));
    }

    #[test]
    fn identity_must_be_in_f1() {
        let chain = ChainPresentation::constant(
            Ambient::Z,
            Family::PiecewiseSyndetic,
            SetExpr::ep(1, 2, [0]), // odds: no identity
            "const:odds",
        );
        let err = build_group(&chain, &DefaultP1, &DefaultP2, 2, 200).unwrap_err();
        assert!(matches!(err, SetError::Precondition { .. }));
    }
}
