use std::sync::Arc;

use crate::error::Result;
use crate::jet::Jet;
use crate::real::Real;

/// A real function of `y` that can report its Taylor jet.
pub trait YFunction<T: Real>: Send + Sync {
    fn jet(&self, y: T) -> Result<Jet<T>>;

    fn value(&self, y: T) -> Result<T> {
        Ok(self.jet(y)?.value())
    }
}

pub type SharedFn<T> = Arc<dyn YFunction<T>>;

/// Adapter turning a closure into a [`YFunction`].
pub struct FnJet<F>(pub F);

impl<T: Real, F> YFunction<T> for FnJet<F>
where
    F: Fn(T) -> Result<Jet<T>> + Send + Sync,
{
    fn jet(&self, y: T) -> Result<Jet<T>> {
        (self.0)(y)
    }
}

impl<T: Real, G: YFunction<T> + ?Sized> YFunction<T> for Arc<G> {
    fn jet(&self, y: T) -> Result<Jet<T>> {
        (**self).jet(y)
    }
}
