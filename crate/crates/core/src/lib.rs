//! Exact-arithmetic toolkit for probabilistic automata: distribution
//! evolution, the value-1 to weak-synchronization gadgets, and desk-scale
//! certificates for weakly synchronizing words.
//!
//! All probabilities are exact rationals; nothing in this crate uses floating
//! point.

pub mod analysis;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod pa;
pub mod prob;
pub mod reduction;
pub mod semantics;

pub use analysis::{
    bounded_value_search, certificate_check, dollar_absorption_check, half_bound_check, matrix_oracle,
    witness_schedule_search, Certificate, ScheduleSearch, SearchConfig, SearchResult,
};
pub use error::{PaError, Result};
pub use pa::{validate, word, word_to_string, Dist, Letter, Pa, RawPa, RawRow, StateId, ValidationReport, Word};
pub use prob::Prob;
pub use reduction::{
    build_witness_prefix, check_p1, check_p2, lift, twin, CheckReport, LiftedPa, TwinPa, Value1Instance,
};
pub use semantics::{acceptance_probability, lasso_trace, max_norm_from, norm_trace, outcome, step, NormTrace};
