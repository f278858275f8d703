//! Inductive symbolic-point builders with machine-checkable audit traces:
//! the order-driven builder over N0, the group builder over a countable
//! group, and the clopen neighborhood refinement. Every build emits a trace
//! that a standalone checker re-validates by direct membership queries.

mod group;
mod n0;
mod refine;

pub use group::{
    build_group, check_group_trace, DefaultP1, DefaultP2, GroupCheckReport, GroupStage,
    GroupTrace, P1Provider, P2Provider,
};
pub use n0::{
    build_n0, check_n0_trace, BlockScheduleSupplier, DefaultN0Supplier, N0CheckReport, N0Stage,
    N0Trace, StageSupplier,
};
pub use refine::{refine_neighborhood, RefineOutput, RefineStage};

pub const TRACE_SCHEMA: &str = "rl-trace-1";
