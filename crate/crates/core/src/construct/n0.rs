//! The inductive builder over N0: from a target set presented as a chain
//! (or a per-stage thick/syndetic stream), produce a symbolic point z with
//! `N(z,[1]) ⊂ F ∪ {0}` at finite horizon, together with a per-stage trace
//! whose hypotheses re-validate independently.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::ambient::{Ambient, Element};
use crate::cert::RleWord;
use crate::error::SetError;
use crate::setexpr::{normalize_ep, EpClosed, SetExpr};
use crate::subshift::SymbolicPoint;
use crate::witness::dilation_split;

use super::TRACE_SCHEMA;

/// Supplies, per stage, the thick/syndetic split of the dilation quotient
/// `(1/divisor) W_i`, where `W_i = ∩_{t in A_{i-1}} (F - t)` is handed in
/// as `w_expr`. The returned pair (H', S') must satisfy
/// `divisor * (H' ∩ S') ⊂ W_i`; the builder re-checks this through the
/// dilation split.
pub trait StageSupplier: Send + Sync {
    fn stage(
        &self,
        i: u32,
        divisor: u64,
        w_expr: &SetExpr,
    ) -> Result<(SetExpr, SetExpr), SetError>;
}

/// Exact dilation quotient `{x : d*x ∈ W}` of a closed-form set over N0.
fn ep_quotient(d: u64, ep: &EpClosed) -> EpClosed {
    let g = d.gcd(&ep.period);
    let period = ep.period / g;
    let residues: BTreeSet<u64> = (0..period)
        .filter(|x| {
            let v = (d * x) % ep.period;
            ep.residues.contains(&v)
        })
        .collect();
    let di = d as i64;
    EpClosed {
        ambient: Ambient::N0,
        period,
        residues,
        plus: ep
            .plus
            .iter()
            .filter(|e| **e >= 0 && *e % di == 0)
            .map(|e| e / di)
            .collect(),
        minus: ep
            .minus
            .iter()
            .filter(|e| **e >= 0 && *e % di == 0)
            .map(|e| e / di)
            .collect(),
    }
}

/// Turn a closed form back into an expression.
fn ep_closed_to_expr(ep: &EpClosed) -> SetExpr {
    let mut expr = SetExpr::EventuallyPeriodic {
        offset: 0,
        period: ep.period,
        residues: ep.residues.clone(),
    };
    if !ep.minus.is_empty() {
        expr = SetExpr::intersection(
            expr,
            SetExpr::complement(SetExpr::finite(
                ep.minus.iter().map(|n| Element::int(ep.ambient, *n)),
            )),
        );
    }
    if !ep.plus.is_empty() {
        expr = SetExpr::union(
            expr,
            SetExpr::finite(ep.plus.iter().map(|n| Element::int(ep.ambient, *n))),
        );
    }
    expr
}

/// Default supplier for closed-form targets: H' is all of N0 and S' is the
/// positive part of the exact quotient `(1/d) W`.
pub struct DefaultN0Supplier;

impl StageSupplier for DefaultN0Supplier {
    fn stage(
        &self,
        i: u32,
        divisor: u64,
        w_expr: &SetExpr,
    ) -> Result<(SetExpr, SetExpr), SetError> {
        let ep = normalize_ep(Ambient::N0, w_expr).ok_or_else(|| {
            SetError::Horizon(format!(
                "stage {i}: target constraint set is not in closed form; supply an explicit stream"
            ))
        })?;
        let mut q = ep_quotient(divisor, &ep);
        if q.residues.is_empty() {
            return Err(SetError::Horizon(format!(
                "stage {i}: the dilation quotient by {divisor} has an empty periodic part; \
                 the target admits no syndetic stage set"
            )));
        }
        // Keep S' positive so the dilated S stays in (a+1)N.
        if q.member(0) {
            q.minus.insert(0);
        }
        let s_expr = ep_closed_to_expr(&q);
        let h_expr = SetExpr::ep(0, 1, [0]);
        Ok((h_expr, s_expr))
    }
}

/// Stream supplier with a genuinely block-shaped thick part: blocks
/// `[spacing*j, spacing*j + j + width]` for j >= 1, with the syndetic part
/// taken from the exact quotient as in the default supplier.
pub struct BlockScheduleSupplier {
    pub spacing: u64,
    pub width: u64,
}

impl StageSupplier for BlockScheduleSupplier {
    fn stage(
        &self,
        i: u32,
        divisor: u64,
        w_expr: &SetExpr,
    ) -> Result<(SetExpr, SetExpr), SetError> {
        let (_, s_expr) = DefaultN0Supplier.stage(i, divisor, w_expr)?;
        let spacing = self.spacing.max(2) as i64;
        let width = self.width as i64;
        // Thick by growing blocks [spacing*j, spacing*j + j + width]; the
        // j = 0 block anchors a run at the origin so dilations keep content
        // inside any horizon.
        let h_expr = SetExpr::predicate(
            format!("blocks[spacing={spacing},width={width}]"),
            None,
            move |_, g| {
                let n = g.as_int().unwrap_or(-1);
                if n < 0 {
                    return false;
                }
                let j = n / spacing;
                n - spacing * j <= j + width
            },
        );
        Ok((h_expr, s_expr))
    }
}

/// Per-stage record; every field is checkable from the trace alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct N0Stage {
    pub i: u32,
    /// Dilation divisor a_{i-1} + 1 (1 at stage 1).
    pub divisor: u64,
    pub h_desc: String,
    pub s_desc: String,
    /// Membership windows of H_i and S_i on [0, horizon].
    pub h_window: RleWord,
    pub s_window: RleWord,
    /// Intervals I_i^{(j)} for j = 1..i as (lo, len).
    pub intervals: Vec<(i64, i64)>,
    /// A_i = N(z^{(i)}, [1]) and its maximum.
    pub a_set: Vec<i64>,
    pub a_max: i64,
    /// z^{(i)} on [0, a_i].
    pub word_prefix: RleWord,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct N0Trace {
    pub schema: String,
    pub ambient: Ambient,
    /// Descriptor of the target set F (DSL syntax).
    pub target: String,
    pub depth: u32,
    pub horizon: u32,
    /// Flag recording the paper's case split for the stage-2 interval
    /// separation constant u (0 when the previous stage is the first).
    pub u_case_split: Vec<(u32, i64)>,
    pub stages: Vec<N0Stage>,
    /// Final word z on [0, horizon].
    pub word: RleWord,
}

/// Leftmost interval `[lo, lo+len)` inside `h` (by window) meeting `s`,
/// with `lo >= lo_min` and `lo + len - 1 + slack <= horizon`.
fn find_interval(
    h_window: &[bool],
    s_window: &[bool],
    len: i64,
    lo_min: i64,
    slack: i64,
    horizon: i64,
) -> Option<(i64, i64)> {
    let hi_max = horizon - slack - len + 1;
    let mut lo = lo_min;
    while lo <= hi_max {
        let mut ok = true;
        let mut hit = false;
        for t in lo..lo + len {
            if !h_window[t as usize] {
                ok = false;
                lo = t + 1;
                break;
            }
            if s_window[t as usize] {
                hit = true;
            }
        }
        if ok {
            if hit {
                return Some((lo, len));
            }
            lo += 1;
        }
    }
    None
}

fn window_of(expr: &SetExpr, horizon: i64) -> Result<Vec<bool>, SetError> {
    (0..=horizon)
        .map(|n| expr.member(Ambient::N0, &Element::int(Ambient::N0, n)))
        .collect()
}

/// Build a symbolic point over N0 with `N(z,[1]) ∩ [0,horizon] ⊂ F ∪ {0}`.
/// Interval selection is leftmost-admissible with `|I_i^{(j)}| = i + 1`;
/// identical inputs give bit-identical traces.
pub fn build_n0(
    target: &SetExpr,
    target_desc: &str,
    supplier: &dyn StageSupplier,
    depth: u32,
    horizon: u32,
) -> Result<(SymbolicPoint, N0Trace), SetError> {
    let am = Ambient::N0;
    let h = horizon as i64;
    let mut word: Vec<bool> = vec![false; (h + 1) as usize];
    word[0] = true;
    let mut stages: Vec<N0Stage> = Vec::new();
    let mut stage_words: Vec<Vec<bool>> = Vec::new(); // z^{(i)} prefixes [0, a_i]
    let mut h_windows: Vec<Vec<bool>> = Vec::new();
    let mut s_windows: Vec<Vec<bool>> = Vec::new();
    let mut a_sets: Vec<Vec<i64>> = Vec::new();
    let mut interval_table: Vec<Vec<(i64, i64)>> = Vec::new();
    let mut u_case_split = Vec::new();

    for i in 1..=depth {
        let ii = i as i64;
        let prev_a: Vec<i64> = if i == 1 {
            Vec::new()
        } else {
            a_sets[(i - 2) as usize].clone()
        };
        let a_prev_max = prev_a.iter().copied().max().unwrap_or(0);
        let divisor = if i == 1 { 1 } else { (a_prev_max + 1) as u64 };
        // W_i = ∩_{t in A_{i-1}} (F - t); at stage 1 just F.
        let w_expr = if prev_a.is_empty() {
            target.clone()
        } else {
            let mut expr: Option<SetExpr> = None;
            for t in &prev_a {
                let piece = SetExpr::translate_inv(Element::int(am, *t), target.clone());
                expr = Some(match expr {
                    None => piece,
                    Some(e) => SetExpr::intersection(e, piece),
                });
            }
            expr.unwrap()
        };
        let (h_prime, s_prime) = supplier.stage(i, divisor, &w_expr)?;
        let a_param = if i == 1 { 0 } else { a_prev_max as u64 };
        let split = dilation_split(am, &w_expr, a_param, &h_prime, &s_prime, horizon)?;
        let h_window = window_of(&split.h, h)?;
        let s_window = window_of(&split.s, h)?;

        // Intervals I_i^{(j)}, j = 1..i, leftmost-admissible, length i+1.
        let len = ii + 1;
        let mut intervals: Vec<(i64, i64)> = Vec::new();
        for j in 1..=i {

            let lo_min = if j == 1 {
                if i == 1 {
                    2
                } else {
                    // min > a_{i-1} and min > max I_{i-1}^{(i-1)} + u
                    let prev_last = interval_table[(i - 2) as usize]
                        .last()
                        .map(|(lo, l)| lo + l - 1)
                        .unwrap_or(0);
                    let u = if i == 2 {
                        0
                    } else {
                        a_sets[(i - 3) as usize].iter().copied().max().unwrap_or(0)
                    };
                    u_case_split.push((i, u));
                    (a_prev_max).max(prev_last + u) + 1
                }
            } else {
                let (plo, plen) = intervals[(j - 2) as usize];
                let pmax = plo + plen - 1;
                if j == 2 {
                    pmax + 1
                } else {
                    let a_j2 = a_sets[(j - 3) as usize].iter().copied().max().unwrap_or(0);
                    pmax + a_j2 + 1
                }
            };
            // Block copies at n extend to n + a_{j-1}.
            let slack = if j == 1 {
                0
            } else {
                a_sets[(j - 2) as usize].iter().copied().max().unwrap_or(0)
            };
            let (hw, sw): (&Vec<bool>, &Vec<bool>) = if j == i {
                (&h_window, &s_window)
            } else {
                (&h_windows[(j - 1) as usize], &s_windows[(j - 1) as usize])
            };
            let found = find_interval(hw, sw, len, lo_min, slack, h).ok_or_else(|| {
                SetError::Horizon(format!(
                    "stage {i}: no admissible interval I^{{({j})}} of length {len} from {lo_min} \
                     within horizon {horizon}"
                ))
            })?;
            intervals.push(found);
        }

        // Commit the word: (9) keep the prefix, (10) singles from I^{(1)},
        // (11) block copies from I^{(j)}, j >= 2; conflicting writes are a
        // builder bug and abort.
        let mut overlay: Vec<Option<bool>> = vec![None; (h + 1) as usize];
        let mut write = |pos: i64, v: bool| -> Result<(), SetError> {
            let slot = &mut overlay[pos as usize];
            match slot {
                None => {
                    *slot = Some(v);
                    Ok(())
                }
                Some(old) if *old == v => Ok(()),
                Some(_) => Err(SetError::Precondition {
                    reason: format!("conflicting word commit at stage {i}"),
                    offender: pos.to_string(),
                }),
            }
        };
        let (lo1, len1) = intervals[0];
        let s1_window: &Vec<bool> = if i == 1 { &s_window } else { &s_windows[0] };
        for n in lo1..lo1 + len1 {
            if s1_window[n as usize] {
                write(n, true)?;
            }
        }
        for j in 2..=i {
            let (lo, l) = intervals[(j - 1) as usize];
            let sj: &Vec<bool> = if j == i {
                &s_window
            } else {
                &s_windows[(j - 1) as usize]
            };
            let zj = &stage_words[(j - 2) as usize];
            for n in lo..lo + l {
                if sj[n as usize] {
                    for (t, v) in zj.iter().enumerate() {
                        write(n + t as i64, *v)?;
                    }
                }
            }
        }
        for (pos, slot) in overlay.iter().enumerate() {
            if let Some(v) = slot {
                word[pos] = *v;
            }
        }

        let a_set: Vec<i64> = (0..=h).filter(|n| word[*n as usize]).collect();
        let a_max = *a_set.last().expect("0 is always committed");
        if i > 1 && a_max <= a_prev_max {
            return Err(SetError::Horizon(format!(
                "stage {i}: return set did not grow (a_{i} = {a_max})"
            )));
        }
        let prefix: Vec<bool> = word[..=(a_max as usize)].to_vec();
        stages.push(N0Stage {
            i,
            divisor,
            h_desc: split.h.describe(),
            s_desc: split.s.describe(),
            h_window: RleWord::encode(&h_window),
            s_window: RleWord::encode(&s_window),
            intervals: intervals.clone(),
            a_set: a_set.clone(),
            a_max,
            word_prefix: RleWord::encode(&prefix),
        });
        stage_words.push(prefix);
        h_windows.push(h_window);
        s_windows.push(s_window);
        a_sets.push(a_set);
        interval_table.push(intervals);
    }

    let trace = N0Trace {
        schema: TRACE_SCHEMA.into(),
        ambient: am,
        target: target_desc.to_string(),
        depth,
        horizon,
        u_case_split,
        stages,
        word: RleWord::encode(&word),
    };
    let mut values = std::collections::BTreeMap::new();
    for (pos, v) in word.iter().enumerate() {
        if *v {
            values.insert(Element::int(am, pos as i64), true);
        }
    }
    let z = SymbolicPoint::committed(am, values, false, horizon);
    Ok((z, trace))
}

/// One line per failed assertion; empty means the trace re-validates.
#[derive(Debug, Clone, Serialize)]
pub struct N0CheckReport {
    pub violations: Vec<String>,
    /// Block-coverage sets per (r, i): |I_i^{(r+1)} ∩ S_{r+1}| that were
    /// verified inside N(z, [z^{(r)}|_{[0,a_r]}]).
    pub coverage_checked: Vec<(u32, u32, u64)>,
    pub final_inclusion_ok: bool,
}

impl N0CheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.final_inclusion_ok
    }
}

/// Standalone re-validation of a trace: every hypothesis is re-asserted by
/// direct membership queries against the trace's own windows and the target
/// expression. Nothing from the builder is trusted.
pub fn check_n0_trace(trace: &N0Trace, target: &SetExpr) -> Result<N0CheckReport, SetError> {
    let am = Ambient::N0;
    let h = trace.horizon as i64;
    let mut violations: Vec<String> = Vec::new();
    let mut fail = |msg: String| violations.push(msg);
    let word = trace.word.decode();
    if word.len() as i64 != h + 1 {
        return Err(SetError::Horizon("word length != horizon + 1".into()));
    }
    let depth = trace.depth as usize;
    if trace.stages.len() != depth {
        return Err(SetError::Horizon("stage count != depth".into()));
    }
    let h_windows: Vec<Vec<bool>> = trace.stages.iter().map(|s| s.h_window.decode()).collect();
    let s_windows: Vec<Vec<bool>> = trace.stages.iter().map(|s| s.s_window.decode()).collect();
    let words: Vec<Vec<bool>> = trace.stages.iter().map(|s| s.word_prefix.decode()).collect();

    let member_f = |n: i64| -> Result<bool, SetError> {
        target.member(am, &Element::int(am, n))
    };

    for (idx, stage) in trace.stages.iter().enumerate() {
        let i = stage.i as i64;
        let zi = &words[idx];
        // (1) A_i = N(z^{(i)}, [1]) and A_i ∖ {0} ⊂ F.
        let a_recomputed: Vec<i64> = (0..zi.len() as i64).filter(|n| zi[*n as usize]).collect();
        if a_recomputed != stage.a_set {
            fail(format!("H1: stage {i}: A_i does not match the committed word"));
        }
        for t in &stage.a_set {
            if *t != 0 && !member_f(*t)? {
                fail(format!("H1: stage {i}: element {t} of A_i escapes the target"));
            }
        }
        if stage.a_set.iter().copied().max() != Some(stage.a_max) {
            fail(format!("H1: stage {i}: recorded a_max is wrong"));
        }
        // (2) growth.
        if idx > 0 {
            let prev = &trace.stages[idx - 1];
            if !prev.a_set.iter().all(|t| stage.a_set.contains(t)) {
                fail(format!("H2: stage {i}: A_{} ⊄ A_{i}", i - 1));
            }
            if prev.a_max >= stage.a_max {
                fail(format!("H2: stage {i}: a did not strictly grow"));
            }
        }
        // (3)+(4): H_i ∩ S_i lands in every translate (F - t), t in A_{i-1}.
        let prev_a: Vec<i64> = if idx == 0 {
            vec![0]
        } else {
            trace.stages[idx - 1].a_set.clone()
        };
        let hw = &h_windows[idx];
        let sw = &s_windows[idx];
        let a_prev_max = prev_a.iter().copied().max().unwrap_or(0);
        for n in 0..=h {
            if hw[n as usize] && sw[n as usize] && n + a_prev_max <= h {
                for t in &prev_a {
                    if !member_f(n + t)? {
                        fail(format!(
                            "H3/H4: stage {i}: n = {n} in H∩S but n + {t} escapes the target"
                        ));
                        break;
                    }
                }
            }
        }
        // (5) S_i ⊂ (a_{i-1}+1) N for i > 1.
        if idx > 0 {
            let d = trace.stages[idx - 1].a_max + 1;
            if stage.divisor != d as u64 {
                fail(format!("H5: stage {i}: recorded divisor mismatch"));
            }
            for n in 0..=h {
                if sw[n as usize] && (n <= 0 || n % d != 0) {
                    fail(format!("H5: stage {i}: S contains {n} outside {d}N"));
                    break;
                }
            }
        }
        // (6) interval shape: |I| > i, I ⊂ H_j, I^{(1)} ∩ S_1 ≠ ∅.
        if stage.intervals.len() != idx + 1 {
            fail(format!("H6: stage {i}: expected {} intervals", idx + 1));
            continue;
        }
        for (jm1, (lo, len)) in stage.intervals.iter().enumerate() {
            let j = jm1 + 1;
            if *len <= i {
                fail(format!("H6: stage {i}: |I^{{({j})}}| = {len} not > {i}"));
            }
            let hj = &h_windows[jm1];
            for t in *lo..lo + len {
                if t < 0 || t > h || !hj[t as usize] {
                    fail(format!("H6: stage {i}: I^{{({j})}} escapes H_{j} at {t}"));
                    break;
                }
            }
        }
        let (lo1, len1) = stage.intervals[0];
        let s1 = &s_windows[0];
        if !(lo1..lo1 + len1).any(|t| s1[t as usize]) {
            fail(format!("H6: stage {i}: I^{{(1)}} misses S_1"));
        }
        // (7)/(8) ordering constraints.
        if idx > 0 {
            if lo1 <= trace.stages[idx - 1].a_max {
                fail(format!("H7: stage {i}: min I^{{(1)}} ≤ a_{}", i - 1));
            }
            let prev_stage = &trace.stages[idx - 1];
            let (plo, plen) = *prev_stage.intervals.last().unwrap();
            let u = if idx == 1 {
                0
            } else {
                trace.stages[idx - 2].a_max
            };
            if lo1 <= plo + plen - 1 + u {
                fail(format!(
                    "H8: stage {i}: min I^{{(1)}} ≤ max I_{{{}}}^{{({})}} + {u}",
                    i - 1,
                    idx
                ));
            }
        }
        for w in stage.intervals.windows(2) {
            let (alo, alen) = w[0];
            let (blo, _) = w[1];
            if blo <= alo + alen - 1 {
                fail(format!("H7: stage {i}: interval order violated"));
            }
        }
        for (jm1, (lo, _)) in stage.intervals.iter().enumerate().skip(2) {
            let (plo, plen) = stage.intervals[jm1 - 1];
            let a_j2 = trace.stages[jm1 - 2].a_max;
            if *lo <= plo + plen - 1 + a_j2 {
                fail(format!(
                    "H8: stage {i}: min I^{{({})}} ≤ max I^{{({})}} + a_{{{}}}",
                    jm1 + 1,
                    jm1,
                    jm1 - 1
                ));
            }
        }
        // (9) prefix agreement.
        if idx > 0 {
            let prev_word = &words[idx - 1];
            if zi[..prev_word.len()] != prev_word[..] {
                fail(format!("H9: stage {i}: prefix changed"));
            }
        }
        // (10)-(12): the word is exactly the committed pattern.
        let mut expect: Vec<bool> = vec![false; zi.len()];
        expect[0] = true;
        if idx > 0 {
            let prev_word = &words[idx - 1];
            expect[..prev_word.len()].copy_from_slice(prev_word);
        }
        for t in lo1..lo1 + len1 {
            if s1[t as usize] && (t as usize) < expect.len() {
                expect[t as usize] = true;
            }
        }
        for (jm1, (lo, len)) in stage.intervals.iter().enumerate().skip(1) {
            let sj = &s_windows[jm1];
            let zj = &words[jm1 - 1];
            for n in *lo..lo + len {
                if sj[n as usize] {
                    for (t, v) in zj.iter().enumerate() {
                        let pos = n as usize + t;
                        if pos < expect.len() {
                            expect[pos] = *v;
                        }
                    }
                }
            }
        }
        if expect != *zi {
            let at = expect
                .iter()
                .zip(zi.iter())
                .position(|(a, b)| a != b)
                .unwrap();
            fail(format!(
                "H10-H12: stage {i}: word differs from the committed rules at {at}"
            ));
        }
    }

    // Fact (b): block coverage sets lie in N(z, [z^{(r)}|_{[0,a_r]}]).
    let mut coverage_checked = Vec::new();
    for (idx, stage) in trace.stages.iter().enumerate() {
        for (jm1, (lo, len)) in stage.intervals.iter().enumerate().skip(1) {
            let r = jm1 as u32; // block copies z^{(r)} with r = j - 1
            let zr = &words[jm1 - 1];
            let sj = &s_windows[jm1];
            let mut count = 0;
            for n in *lo..lo + len {
                if sj[n as usize] {
                    count += 1;
                    for (t, v) in zr.iter().enumerate() {
                        let pos = n as usize + t;
                        if pos < word.len() && word[pos] != *v {
                            fail(format!(
                                "fact(b): stage {}: copy at {n} disagrees with z^{{({r})}} at offset {t}",
                                idx + 1
                            ));
                            break;
                        }
                    }
                }
            }
            coverage_checked.push((r, stage.i, count));
        }
    }

    // Fact (d) analogue: returns of z^{(i)} to [z^{(r)}|_{[0,a_r]}] persist
    // in the final word.
    for idx in 0..depth {
        let zi = &words[idx];
        for r_idx in 0..idx {
            let zr = &words[r_idx];
            let limit = zi.len().saturating_sub(zr.len());
            for n in 0..=limit {
                if zi[n..n + zr.len()] == zr[..] {
                    if word[n..n + zr.len()] != zr[..] {
                        fail(format!(
                            "fact(d): stage {} return at {n} to the stage-{} cylinder lost",
                            idx + 1,
                            r_idx + 1
                        ));
                    }
                }
            }
        }
    }

    // Final inclusion N(z,[1]) ⊂ F ∪ {0} by full scan.
    let mut final_inclusion_ok = true;
    for n in 1..=h {
        if word[n as usize] && !member_f(n)? {
            final_inclusion_ok = false;
            fail(format!("final: {n} in N(z,[1]) escapes the target"));
        }
    }

    Ok(N0CheckReport {
        violations,
        coverage_checked,
        final_inclusion_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_full_target_builds() {
        let target = SetExpr::ep(0, 1, [0]);
        let (z, trace) =
            build_n0(&target, "ep:0,1,{0}", &DefaultN0Supplier, 3, 2000).unwrap();
        let report = check_n0_trace(&trace, &target).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
        assert!(z.eval(&Element::int(Ambient::N0, 0)).unwrap());
    }

    #[test]
    fn even_target_scan_all_members_even() {
        // F = 2N ∪ {0}: every committed return beyond 0 must be even.
        let target = SetExpr::ep(0, 2, [0]);
        let (_, trace) =
            build_n0(&target, "ep:0,2,{0}", &DefaultN0Supplier, 4, 10_000).unwrap();
        let report = check_n0_trace(&trace, &target).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
        let word = trace.word.decode();
        for (n, v) in word.iter().enumerate().skip(1) {
            if *v {
                assert_eq!(n % 2, 0, "odd return {n}");
            }
        }
        // The return set genuinely grew through the stages.
        assert!(trace.stages.last().unwrap().a_set.len() > 4);
    }

    #[test]
    fn divisibility_of_stage_s_sets() {
        let target = SetExpr::ep(0, 2, [0]);
        let (_, trace) =
            build_n0(&target, "ep:0,2,{0}", &DefaultN0Supplier, 4, 10_000).unwrap();
        for (idx, stage) in trace.stages.iter().enumerate().skip(1) {
            let d = trace.stages[idx - 1].a_max + 1;
            let sw = stage.s_window.decode();
            for (n, v) in sw.iter().enumerate() {
                if *v {
                    assert!(n > 0 && n as i64 % d == 0, "S_{} member {n} not in {d}N", idx + 1);
                }
            }
        }
    }

    #[test]
    fn block_schedule_supplier_builds() {
        let target = SetExpr::ep(0, 3, [0]);
        let supplier = BlockScheduleSupplier {
            spacing: 40,
            width: 12,
        };
        let (_, trace) = build_n0(&target, "ep:0,3,{0}", &supplier, 3, 10_000).unwrap();
        let report = check_n0_trace(&trace, &target).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
    }

    #[test]
    fn deterministic_traces() {
        let target = SetExpr::ep(0, 3, [0]);
        let (_, t1) = build_n0(&target, "ep:0,3,{0}", &DefaultN0Supplier, 3, 5000).unwrap();
        let (_, t2) = build_n0(&target, "ep:0,3,{0}", &DefaultN0Supplier, 3, 5000).unwrap();
        assert_eq!(
            serde_json::to_string(&t1).unwrap(),
            serde_json::to_string(&t2).unwrap()
        );
    }

    #[test]
    fn checker_catches_tampered_word() {
        let target = SetExpr::ep(0, 2, [0]);
        let (_, mut trace) =
            build_n0(&target, "ep:0,2,{0}", &DefaultN0Supplier, 3, 4000).unwrap();
        let mut word = trace.word.decode();
        word[3] = true; // 3 is odd: escapes the target
        trace.word = RleWord::encode(&word);
        let report = check_n0_trace(&trace, &target).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn ep_quotient_matches_direct_scan() {
        let ep = normalize_ep(Ambient::N0, &SetExpr::ep(0, 6, [0, 3])).unwrap();
        for d in [1u64, 2, 3, 4, 5] {
            let q = ep_quotient(d, &ep);
            for x in 0..200i64 {
                assert_eq!(
                    q.member(x),
                    ep.member(d as i64 * x),
                    "d = {d}, x = {x}"
                );
            }
        }
    }
}
