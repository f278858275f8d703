//! Finite-horizon toolkit for combinatorial recurrence: ambient structures,
//! a windowed set calculus with certified classifiers, Furstenberg families
//! and chain presentations, the Bernoulli shift over a countable group,
//! inductive symbolic-point builders with machine-checkable traces, and
//! exact ideal algebra for finite semigroups.

pub mod ambient;
pub mod classify;
pub mod error;
pub mod setexpr;

pub use ambient::{Ambient, Element, Gen};
pub use classify::{classify_pws, classify_syndetic, classify_thick, Refuter, Verdict, VerdictStatus, Witness};
pub use error::{AmbientError, SetError};
pub use setexpr::{fs_generate, normalize_ep, EpClosed, SetExpr};

pub mod density;
pub mod witness;

pub use density::{banach_density, folner_disjointify, upper_density, FolnerSeq, Rational};
pub use witness::{dilation_split, p1_witness_thick, separated_subset, separator};

pub mod family;
pub mod subshift;

pub use family::{ramsey_check, Family, RamseyOutcome, RamseyReport};
pub use subshift::{
    check_recurrence, joint_return, return_set, return_set_expr, shift_apply,
    symmetric_set_check, Cylinder, SymbolicPoint,
};

pub mod chain;

pub use chain::{central_chain, chain_validate, ChainCertificate, ChainPresentation};

pub mod semigroup;

pub use semigroup::{verify_section5, FiniteSemigroup, IdealStructure, Section5Report};

pub mod cert;
pub mod construct;

pub use cert::{PointFile, RleWord};
pub use construct::{build_group, build_n0, check_group_trace, check_n0_trace, refine_neighborhood};

pub mod dsl;

pub use dsl::{parse_chain, parse_family, parse_set, ParseError};
