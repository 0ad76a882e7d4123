//! Named operators (swap, `Ω`, `M⊗M`, permutation operators), operator
//! libraries for basis recognition, `x·I + y·B` families and their
//! positivity cones.

mod library;
mod operators;
mod region;

pub use library::{LibraryEntry, OperatorLibrary};
pub use operators::{
    m_tensor_m, omega_projector, permutation_operator, swap_operator, NamedOperator, Permutation, MAX_TENSOR_FACTORS,
};
pub use region::{family_matrix, normalize_state, psd_region, psd_region_of, FamilySpec, GridSample, HalfPlane, PsdRegion};
