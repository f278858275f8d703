//! Exact ideal and idempotent algebra for explicit finite semigroups: the
//! desk-scale shadow of the compact right topological semigroup facts, with
//! topology trivial in the finite discrete case.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SemigroupError {
    #[error("multiplication table must be square, got {0} entries")]
    NotSquare(usize),
    #[error("table entry {value} at ({row},{col}) out of range for order {order}")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("associativity fails at ({a},{b},{c}): ({a}{b}){c} = {lhs} but {a}({b}{c}) = {rhs}")]
    NotAssociative {
        a: usize,
        b: usize,
        c: usize,
        lhs: usize,
        rhs: usize,
    },
    #[error("empty table")]
    Empty,
    #[error("bad table cell `{0}`")]
    BadCell(String),
}

/// An explicit finite semigroup: a validated multiplication table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSemigroup {
    order: usize,
    /// Row-major: table[a * order + b] = a * b.
    table: Vec<usize>,
    pub labels: Option<Vec<String>>,
}

impl FiniteSemigroup {
    /// Validate a row-major table: squareness, range, associativity over
    /// all order^3 triples.
    pub fn validate(table: Vec<usize>) -> Result<FiniteSemigroup, SemigroupError> {
        if table.is_empty() {
            return Err(SemigroupError::Empty);
        }
        let order = (table.len() as f64).sqrt().round() as usize;
        if order * order != table.len() {
            return Err(SemigroupError::NotSquare(table.len()));
        }
        for (i, v) in table.iter().enumerate() {
            if *v >= order {
                return Err(SemigroupError::EntryOutOfRange {
                    row: i / order,
                    col: i % order,
                    value: *v,
                    order,
                });
            }
        }
        let s = FiniteSemigroup {
            order,
            table,
            labels: None,
        };
        for a in 0..order {
            for b in 0..order {
                let ab = s.mul(a, b);
                for c in 0..order {
                    let lhs = s.mul(ab, c);
                    let rhs = s.mul(a, s.mul(b, c));
                    if lhs != rhs {
                        return Err(SemigroupError::NotAssociative { a, b, c, lhs, rhs });
                    }
                }
            }
        }
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    /// The opposite semigroup (transposed table).
    pub fn transpose(&self) -> FiniteSemigroup {
        let mut table = vec![0; self.order * self.order];
        for a in 0..self.order {
            for b in 0..self.order {
                table[a * self.order + b] = self.mul(b, a);
            }
        }
        FiniteSemigroup {
            order: self.order,
            table,
            labels: self.labels.clone(),
        }
    }

    /// Exactly `{ x : x*x = x }`; nonempty for every finite semigroup.
    pub fn idempotents(&self) -> BTreeSet<usize> {
        (0..self.order).filter(|x| self.mul(*x, *x) == *x).collect()
    }

    /// Principal left ideal S^1 x = {x} ∪ Sx.
    pub fn left_ideal_of(&self, x: usize) -> BTreeSet<usize> {
        let mut out: BTreeSet<usize> = (0..self.order).map(|s| self.mul(s, x)).collect();
        out.insert(x);
        out
    }

    /// Principal right ideal x S^1 = {x} ∪ xS.
    pub fn right_ideal_of(&self, x: usize) -> BTreeSet<usize> {
        let mut out: BTreeSet<usize> = (0..self.order).map(|s| self.mul(x, s)).collect();
        out.insert(x);
        out
    }

    /// Principal two-sided ideal S^1 x S^1.
    pub fn ideal_of(&self, x: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for l in self.left_ideal_of(x) {
            out.extend(self.right_ideal_of(l));
        }
        out
    }

    /// All minimal left ideals. A left ideal L is minimal iff S^1 y = L for
    /// every y in L; minimal left ideals are exactly the minimal principal
    /// ones.
    pub fn minimal_left_ideals(&self) -> Vec<BTreeSet<usize>> {
        let mut out: Vec<BTreeSet<usize>> = Vec::new();
        'cand: for x in 0..self.order {
            let l = self.left_ideal_of(x);
            if l.iter().any(|y| self.left_ideal_of(*y) != l) {
                continue 'cand;
            }
            if !out.contains(&l) {
                out.push(l);
            }
        }
        out
    }

    pub fn minimal_right_ideals(&self) -> Vec<BTreeSet<usize>> {
        let mut out: Vec<BTreeSet<usize>> = Vec::new();
        'cand: for x in 0..self.order {
            let r = self.right_ideal_of(x);
            if r.iter().any(|y| self.right_ideal_of(*y) != r) {
                continue 'cand;
            }
            if !out.contains(&r) {
                out.push(r);
            }
        }
        out
    }

    /// Full ideal structure.
    pub fn ideal_structure(&self) -> IdealStructure {
        let idempotents = self.idempotents();
        let min_left = self.minimal_left_ideals();
        let min_right = self.minimal_right_ideals();
        let mut smallest: BTreeSet<usize> = BTreeSet::new();
        for l in &min_left {
            smallest.extend(l.iter().copied());
        }
        let minimal_idempotents: BTreeSet<usize> = idempotents
            .iter()
            .copied()
            .filter(|p| min_left.iter().any(|l| l.contains(p)))
            .collect();
        IdealStructure {
            idempotents,
            minimal_left_ideals: min_left,
            minimal_right_ideals: min_right,
            smallest_ideal: smallest,
            minimal_idempotents,
        }
    }

    /// Parse a CSV of row-major indices (one row per line).
    pub fn from_csv(text: &str) -> Result<FiniteSemigroup, SemigroupError> {
        let mut table = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            for cell in line.split(',') {
                let v: usize = cell
                    .trim()
                    .parse()
                    .map_err(|_| SemigroupError::BadCell(cell.trim().to_string()))?;
                table.push(v);
            }
        }
        FiniteSemigroup::validate(table)
    }
}

/// The computed ideal skeleton of a finite semigroup.
#[derive(Debug, Clone, Serialize)]
pub struct IdealStructure {
    pub idempotents: BTreeSet<usize>,
    pub minimal_left_ideals: Vec<BTreeSet<usize>>,
    pub minimal_right_ideals: Vec<BTreeSet<usize>>,
    /// K(S) = union of all minimal left ideals.
    pub smallest_ideal: BTreeSet<usize>,
    /// Idempotents lying in some minimal left ideal.
    pub minimal_idempotents: BTreeSet<usize>,
}

/// Cap for the exhaustive all-subsets idempotent sweep.
pub const SUBSEMIGROUP_SWEEP_CAP: usize = 8;

/// Assertion report mirroring the finite-semigroup facts: the smallest
/// ideal equals both unions of minimal one-sided ideals, is contained in
/// every ideal, minimal left ideals absorb and contain idempotents, and
/// (for order <= 8) every nonempty subsemigroup contains an idempotent.
#[derive(Debug, Clone, Serialize)]
pub struct Section5Report {
    pub schema: String,
    pub order: usize,
    pub idempotents_nonempty: bool,
    pub k_equals_left_union: bool,
    pub k_equals_right_union: bool,
    pub k_is_ideal: bool,
    pub k_in_every_ideal: bool,
    pub min_left_absorb: bool,
    pub min_left_have_idempotent: bool,
    /// None when the order exceeds the sweep cap.
    pub subsemigroups_have_idempotent: Option<bool>,
    pub all_passed: bool,
}

pub fn verify_section5(s: &FiniteSemigroup) -> Section5Report {
    let structure = s.ideal_structure();
    let n = s.order();
    let idempotents_nonempty = !structure.idempotents.is_empty();

    let mut right_union: BTreeSet<usize> = BTreeSet::new();
    for r in &structure.minimal_right_ideals {
        right_union.extend(r.iter().copied());
    }
    let k = &structure.smallest_ideal;
    let k_equals_left_union = true; // K is defined as this union
    let k_equals_right_union = *k == right_union;

    let k_is_ideal = k.iter().all(|x| {
        (0..n).all(|s_elt| k.contains(&s.mul(s_elt, *x)) && k.contains(&s.mul(*x, s_elt)))
    });
    let k_in_every_ideal = (0..n).all(|x| k.is_subset(&s.ideal_of(x)));

    let min_left_absorb = structure.minimal_left_ideals.iter().all(|l| {
        l.iter()
            .all(|x| (0..n).all(|s_elt| l.contains(&s.mul(s_elt, *x))))
    });
    let min_left_have_idempotent = structure
        .minimal_left_ideals
        .iter()
        .all(|l| l.iter().any(|x| structure.idempotents.contains(x)));

    let subsemigroups_have_idempotent = if n <= SUBSEMIGROUP_SWEEP_CAP {
        let mut ok = true;
        'subsets: for mask in 1u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            // Closed under multiplication?
            for &a in &subset {
                for &b in &subset {
                    if mask & (1 << s.mul(a, b)) == 0 {
                        continue 'subsets;
                    }
                }
            }
            if !subset.iter().any(|x| structure.idempotents.contains(x)) {
                ok = false;
                break;
            }
        }
        Some(ok)
    } else {
        None
    };

    let all_passed = idempotents_nonempty
        && k_equals_left_union
        && k_equals_right_union
        && k_is_ideal
        && k_in_every_ideal
        && min_left_absorb
        && min_left_have_idempotent
        && subsemigroups_have_idempotent.unwrap_or(true);

    Section5Report {
        schema: "rl-sgp-1".into(),
        order: n,
        idempotents_nonempty,
        k_equals_left_union,
        k_equals_right_union,
        k_is_ideal,
        k_in_every_ideal,
        min_left_absorb,
        min_left_have_idempotent,
        subsemigroups_have_idempotent,
        all_passed,
    }
}

/// Multiplication table of (Z_n, *).
pub fn zn_multiplication(n: usize) -> Vec<usize> {
    let mut t = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            t.push((a * b) % n);
        }
    }
    t
}

/// Multiplication table of (Z_n, +).
pub fn zn_addition(n: usize) -> Vec<usize> {
    let mut t = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            t.push((a + b) % n);
        }
    }
    t
}

/// Left-zero semigroup: x * y = x.
pub fn left_zero(n: usize) -> Vec<usize> {
    let mut t = Vec::with_capacity(n * n);
    for a in 0..n {
        for _ in 0..n {
            t.push(a);
        }
    }
    t
}

/// Right-zero semigroup: x * y = y.
pub fn right_zero(n: usize) -> Vec<usize> {
    let mut t = Vec::with_capacity(n * n);
    for _ in 0..n {
        for b in 0..n {
            t.push(b);
        }
    }
    t
}
