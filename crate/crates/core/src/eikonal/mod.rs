//! Eikonal geometry `|∇K|^2 = 1 + p/λ` and its derived fields.

pub mod decay;
pub mod field;
pub mod fmm;
pub mod radial;

pub use decay::{dyadic_annuli, fit_decay, lambda_scaling_ratio, DecayFit};
pub use field::{
    build_eikonal_field, field_from_profile, lemma1_residual, EikonalField, FieldName, FieldOptions,
    ResidualStats,
};
pub use fmm::{solve_eikonal_grid, solve_eikonal_grid_seeded};
pub use radial::{solve_eikonal_radial, Normalization, RadialProfile};
