//! Dense explicit operators and random measurement ensembles.

use super::{GaborOp, MeasurementOp, PartialCirculantOp, PartialCirculantSpec};
use crate::samplers::SamplerSpec;
use crate::stream::RngStream;
use crate::{Error, Result};
use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// A measurement operator stored as an explicit matrix.
#[derive(Clone, Debug)]
pub struct DenseOp<T: ComplexField<RealField = f64>> {
    a: DMatrix<T>,
}

impl<T: ComplexField<RealField = f64>> DenseOp<T> {
    pub fn new(a: DMatrix<T>) -> Self {
        DenseOp { a }
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.a
    }
}

impl<T: ComplexField<RealField = f64>> MeasurementOp<T> for DenseOp<T> {
    fn rows(&self) -> usize {
        self.a.nrows()
    }

    fn cols(&self) -> usize {
        self.a.ncols()
    }

    fn apply(&self, x: &DVector<T>) -> Result<DVector<T>> {
        if x.len() != self.a.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "dense apply: input length {} vs {}",
                x.len(),
                self.a.ncols()
            )));
        }
        Ok(&self.a * x)
    }

    fn adjoint(&self, y: &DVector<T>) -> Result<DVector<T>> {
        if y.len() != self.a.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "dense adjoint: input length {} vs {}",
                y.len(),
                self.a.nrows()
            )));
        }
        Ok(self.a.adjoint() * y)
    }

    fn column(&self, j: usize) -> DVector<T> {
        assert!(j < self.a.ncols(), "column index out of range");
        self.a.column(j).into_owned()
    }

    fn to_dense(&self) -> DMatrix<T> {
        self.a.clone()
    }
}

/// Which structured ensemble a random draw comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// i.i.d. entries `ξ_ij/√m`.
    Dense,
    /// Partial circulant with a fresh generator and a fresh random row set.
    Circulant,
    /// Gabor synthesis with window `η/√m`; ambient dimension is `m²`.
    Gabor,
    /// Deterministic identity (degenerate reference ensemble), `m = n`.
    Identity,
}

/// A fully specified random measurement ensemble. Draws are normalized so
/// that `E ‖Φx‖₂² = ‖x‖₂²` when the generating source is standardized;
/// the constructor enforces the standardization flag for that reason.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub m: usize,
    pub n: usize,
    pub sampler: Option<SamplerSpec>,
}

impl EnsembleSpec {
    pub fn dense(m: usize, n: usize, sampler: SamplerSpec) -> Result<Self> {
        Self::validated(EnsembleKind::Dense, m, n, Some(sampler))
    }

    pub fn circulant(m: usize, n: usize, sampler: SamplerSpec) -> Result<Self> {
        if m > n {
            return Err(Error::InvalidParameter(format!(
                "circulant ensemble: m = {m} must not exceed n = {n}"
            )));
        }
        Self::validated(EnsembleKind::Circulant, m, n, Some(sampler))
    }

    pub fn gabor(m: usize, sampler: SamplerSpec) -> Result<Self> {
        Self::validated(EnsembleKind::Gabor, m, m * m, Some(sampler))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::validated(EnsembleKind::Identity, n, n, None)
    }

    fn validated(kind: EnsembleKind, m: usize, n: usize, sampler: Option<SamplerSpec>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter(
                "ensemble dimensions must be positive".into(),
            ));
        }
        if let Some(s) = &sampler {
            if !s.standardized {
                return Err(Error::InvalidParameter(
                    "ensemble sources must be standardized (unit variance)".into(),
                ));
            }
        }
        Ok(EnsembleSpec { kind, m, n, sampler })
    }

    fn sampler(&self) -> Result<&SamplerSpec> {
        self.sampler.as_ref().ok_or_else(|| {
            Error::InvalidParameter("this ensemble kind requires a sampler".into())
        })
    }

    /// Draw one operator. Each draw should receive its own child stream.
    pub fn draw(&self, stream: &RngStream) -> Result<AnyOp> {
        match self.kind {
            EnsembleKind::Dense => {
                let scale = 1.0 / (self.m as f64).sqrt();
                let entries = self.sampler()?.sample(self.m * self.n, &stream.child("entries"));
                // Column-major fill, matching nalgebra's storage order.
                let a = DMatrix::from_iterator(self.m, self.n, entries.into_iter().map(|v| v * scale));
                Ok(AnyOp::Real(Box::new(DenseOp::new(a))))
            }
            EnsembleKind::Circulant => {
                let z = DVector::from_vec(self.sampler()?.sample(self.n, &stream.child("generator")));
                let spec = PartialCirculantSpec::random(self.n, self.m, &stream.child("rows"))?;
                Ok(AnyOp::Real(Box::new(PartialCirculantOp::new(z, spec)?)))
            }
            EnsembleKind::Gabor => {
                let eta = DVector::from_vec(self.sampler()?.sample(self.m, &stream.child("window")));
                Ok(AnyOp::Complex(Box::new(GaborOp::from_real_generator(&eta)?)))
            }
            EnsembleKind::Identity => {
                Ok(AnyOp::Real(Box::new(DenseOp::new(DMatrix::identity(self.n, self.n)))))
            }
        }
    }
}

/// A drawn operator, real or complex.
pub enum AnyOp {
    Real(Box<dyn MeasurementOp<f64>>),
    Complex(Box<dyn MeasurementOp<Complex<f64>>>),
}

impl AnyOp {
    pub fn rows(&self) -> usize {
        match self {
            AnyOp::Real(op) => op.rows(),
            AnyOp::Complex(op) => op.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            AnyOp::Real(op) => op.cols(),
            AnyOp::Complex(op) => op.cols(),
        }
    }

    /// Dense complex materialization (real operators are lifted).
    pub fn to_dense_complex(&self) -> DMatrix<Complex<f64>> {
        match self {
            AnyOp::Real(op) => op.to_dense().map(|v| Complex::new(v, 0.0)),
            AnyOp::Complex(op) => op.to_dense(),
        }
    }
}
