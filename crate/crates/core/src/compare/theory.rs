use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::lifshitz::{geometry_quantity, EvaluationPoint, Geometry};
use crate::materials::{BoundaryModel, MaterialSpec};
use crate::numerics::QuadratureSpec;

use super::dataset::DatasetKind;

/// A theoretical prediction as a function of separation.
pub trait Theory: Sync {
    fn kind(&self) -> DatasetKind;
    fn model(&self) -> BoundaryModel;
    /// Value and numeric error at separation z, in SI units.
    fn evaluate(&self, z: f64) -> Result<(f64, f64)>;
}

#[derive(Debug, Clone)]
pub struct LifshitzTheory {
    pub model: BoundaryModel,
    pub material: MaterialSpec,
    pub geometry: Geometry,
    pub temperature: f64,
    pub quad: QuadratureSpec,
}

impl LifshitzTheory {
    pub fn new(
        model: BoundaryModel,
        material: MaterialSpec,
        geometry: Geometry,
        temperature: f64,
        quad: QuadratureSpec,
    ) -> Result<Self> {
        model.check_material(&material)?;
        quad.validate()?;
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::invalid(
                "T",
                format!("must be finite and non-negative, got {temperature}"),
            ));
        }
        Ok(LifshitzTheory {
            model,
            material,
            geometry,
            temperature,
            quad,
        })
    }

    pub fn plates(model: BoundaryModel, material: MaterialSpec, temperature: f64) -> Result<Self> {
        Self::new(
            model,
            material,
            Geometry::PlatePlate,
            temperature,
            QuadratureSpec::default(),
        )
    }
}

impl Theory for LifshitzTheory {
    fn kind(&self) -> DatasetKind {
        match self.geometry {
            Geometry::PlatePlate => DatasetKind::Pressure,
            Geometry::SpherePlate { .. } => DatasetKind::Force,
        }
    }

    fn model(&self) -> BoundaryModel {
        self.model
    }

    fn evaluate(&self, z: f64) -> Result<(f64, f64)> {
        let pt = EvaluationPoint::new(z, self.temperature)?;
        let r = geometry_quantity(&pt, self.geometry, self.model, &self.material, &self.quad)?;
        Ok((r.value, r.numeric_error))
    }
}

/// Memoises another theory on separations rounded to 1 fm, so repeated
/// comparisons on the same grid (or on a grid shifted by whole steps)
/// evaluate the Lifshitz sum once per point.
pub struct CachedTheory<T> {
    inner: T,
    cache: Mutex<HashMap<i64, (f64, f64)>>,
}

impl<T: Theory> CachedTheory<T> {
    pub fn new(inner: T) -> Self {
        CachedTheory {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn inner(&self) -> &T {
        &self.inner
    }

    fn key(z: f64) -> i64 {
        (z * 1e15).round() as i64
    }
}

impl<T: Theory> Theory for CachedTheory<T> {
    fn kind(&self) -> DatasetKind {
        self.inner.kind()
    }

    fn model(&self) -> BoundaryModel {
        self.inner.model()
    }

    fn evaluate(&self, z: f64) -> Result<(f64, f64)> {
        let key = Self::key(z);
        if let Some(&hit) = self.cache.lock().expect("theory cache poisoned").get(&key) {
            return Ok(hit);
        }
        let v = self.inner.evaluate(key as f64 * 1e-15)?;
        self.cache.lock().expect("theory cache poisoned").insert(key, v);
        Ok(v)
    }
}
