//! Physical parameters, scaling identities, Coriolis rotation and sources.

mod params;
mod source;

pub use params::{
    rotate_coriolis, scale_forward, scale_inverse, Coriolis, PhysicalParams, RescaledQuantities, ThinDomainQuantities,
};
pub use source::{
    build_source, bump, convolution_residue, default_kernel, mollified_delta, mollifier_mass, mollifier_profile,
    mollifier_transform, SourceKind, SourcePair, SourceSpec,
};
