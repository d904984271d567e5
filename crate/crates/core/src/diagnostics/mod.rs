//! Geometric diagnostics evaluated on stored profiles and trajectories.

pub mod barrier;
pub mod curvature;
pub mod decay;
pub mod ledger;
pub mod mass;
pub mod residuals;

pub use barrier::{barrier_functions, BarrierField};
pub use curvature::{curvature_field, CurvatureField};
pub use decay::{
    verify_adm_constancy, verify_barriers, verify_decay, verify_max_principle, verify_quasilocal,
    Allowances, BoundCheck, DecayReport,
};
pub use ledger::{bound_ledger, ledger_from_extrema, BoundLedger};
pub use mass::{
    adm_mass, mass_series, quasilocal_mass, sphere_family_radius, AdmEstimate, AdmStatus,
    MassSample, MassSeries, SphereFamily,
};
pub use residuals::{
    observed_orders, refinement_errors, residual_auxiliary_pdes, residual_scalar_evolution,
    residual_w_equation, Auxiliary, Region, ResidualSeries,
};
