//! Constructions of groups with prescribed representation growth.

mod diagonal;
mod fixed;
mod schedule;

pub use diagonal::{build_diagonal, CheckRecord, DiagonalCertificate, DiagonalPlan, StageRecord, StageTarget};
pub use fixed::{build_fixed_type, field_size, termwise_test, TermwiseReport, TermwiseVerdict};
pub use schedule::{compare_pairs, make_schedule, prec_min, precedes, Schedule, VERIFY_HORIZON};
