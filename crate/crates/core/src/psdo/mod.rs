//! Truncated pseudo-differential operators in `∂ = ∂_x` with
//! differential-polynomial coefficients, the KP hierarchy built on the Lax
//! operator `L`, and its dressing `L = g ∘ ∂ ∘ g⁻¹`.

mod dressing;
mod kp;
mod operator;

pub use dressing::{
    dress, t_operator, verify_g_flow_consistency, verify_s_relations, w_flows, Dressing, Residual,
};
pub use kp::{
    build_phi, kp_flows, l_power, l_power_plus, lax_operator, t_derivative, verify_zero_curvature,
    x_derivative_n, zero_curvature_residual, FlowTable, PhiConnection,
};
pub use operator::{leibniz_compose, split, x_derivative, PsdoOperator};
