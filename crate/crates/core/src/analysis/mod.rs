//! Global-minimum condition and energy-landscape sampling.

mod condition;
mod landscape;

pub use condition::{
    bound_minimizer, check_condition, critical_lambda_f, delta_e_lower_bound, figure1_csv,
    figure1_data, g_of_lambda_f, intermediate_condition_rhs, ConditionVariant, DeltaEBound,
    Figure1Row, CROSSING_BRACKET,
};
pub use landscape::{
    landscape_grid, nearest_pattern, planar_demo_grid, planar_demo_store, sample_grid,
    surface_jump, GridSpec, LandscapeGrid, PLANAR_DEMO_PARAMS,
};
