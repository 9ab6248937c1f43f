//! Quantum steering and joint measurability toolkit: assemblages, LHS
//! feasibility and quantifiers, joint measurability, benchmark states,
//! two-qubit critical radius and closed-form criteria.

pub mod criteria;
pub mod error;
pub mod incompat;
pub mod linalg;
pub mod operator;
pub mod radius;
pub mod random;
pub mod sdp;
pub mod states;
pub mod steering;
pub mod strategies;

pub use error::{CoreError, Result};
pub use incompat::{
    heisenberg_povm_map, incompatibility_robustness, is_jointly_measurable, jm_critical_visibility,
    normalize_assemblage, qubit_pair_criterion, qubit_pair_margin, JmResult, JointObservable,
    QubitDichotomicPair,
};
pub use operator::{
    assemblage_from_state, bloch_decompose, min_eig_partial_transpose, operator_schmidt_coefficients,
    reduced_state, swap_parties, Assemblage, BlochDecomposition, DensityMatrix, HermitianOperator,
    MeasurementSet, Povm,
};
pub use radius::{
    canonical_filter_form, radius_bracket, radius_lower, radius_upper, tstate_critical_radius,
    DirectionSet, RadiusBracket,
};
pub use sdp::{Diagnostics, SdpConfig};
pub use states::{
    isotropic, lhs_simulate, one_way_state, singlet, threshold, werner, Family, LhsEnsembleGrid,
    LhsModelKind, MeasurementClass, ThresholdQuery,
};
pub use steering::{
    critical_alpha, critical_alpha_bisect, critical_alpha_capped, dual_inequality, lhs_feasibility,
    steering_robustness, steering_weight, LhsModel, SteerVerdict, SteeringInequality, Verdict,
};
pub use steerkit_conic as conic;
pub use strategies::{enumerate_strategies, DeterministicStrategySet};
