//! Right-hand-side forcing shared by both solvers.

use crate::fields::Field;

/// Forcing terms evaluated at one instant. Missing entries are zero.
#[derive(Clone, Debug, Default)]
pub struct ForcingTerms {
    /// Added to the three momentum tendencies (the hydrostatic solver reads
    /// only the first two).
    pub momentum: Option<[Field; 3]>,
    pub tracer: Option<Field>,
}

pub trait Forcing: Sync {
    fn at(&self, t: f64) -> ForcingTerms;
}

/// No forcing at all.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoForcing;

impl Forcing for NoForcing {
    fn at(&self, _t: f64) -> ForcingTerms {
        ForcingTerms::default()
    }
}

/// A time-independent pollution source.
#[derive(Clone, Debug)]
pub struct SteadySource(pub Field);

impl Forcing for SteadySource {
    fn at(&self, _t: f64) -> ForcingTerms {
        ForcingTerms {
            momentum: None,
            tracer: Some(self.0.clone()),
        }
    }
}
