//! The adaptive-sampling selector and its guess grids.

mod dash;
mod guessing;
mod params;
mod sampling;
mod trace;

pub use dash::dash;
pub(crate) use dash::dash_allow_zero_epsilon;
pub use guessing::{alpha_grid, dash_with_guessing, grid_length, opt_grid, opt_grid_from_max};
pub use params::{default_filter_cap, DashParams, Expectation, Guess};
pub use sampling::{
    estimate_element_marginals, estimate_set_marginal, sample_uniform_subset,
    EXACT_ENUMERATION_LIMIT,
};
pub use trace::{
    Addition, ResolvedParams, RoundKind, RoundRecord, RunTrace, SelectionResult, StallEvent,
    StallReason,
};
