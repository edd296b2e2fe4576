//! Zero-boundary discrete Gaussian free field, Wick squares, shifted squares.

use nalgebra::DMatrix;
use rand::Rng;
use thiserror::Error;

use crate::grid::{DomainGraph, GreenMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum GffError {
    #[error("Green matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("field length {found} does not match interior vertex count {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("operation requires a field with role {0:?}")]
    WrongRole(FieldRole),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldRole {
    Gff,
    WickSquare,
    Occupation,
    ShiftedSquare,
}

/// One real value per interior vertex.
#[derive(Debug, Clone)]
pub struct ScalarField<F: Scalar> {
    values: Vec<F>,
    role: FieldRole,
}

impl<F: Scalar> ScalarField<F> {
    pub fn new(values: Vec<F>, role: FieldRole) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        ScalarField { values, role }
    }

    pub fn role(&self) -> FieldRole {
        self.role
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, idx: usize) -> F {
        self.values[idx]
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    /// CSV rows `x,y,value` in interior-index order.
    pub fn to_csv(&self, g: &DomainGraph<F>) -> String {
        let mut out = String::from("x,y,value\n");
        for (i, &v) in self.values.iter().enumerate() {
            let c = g.interior_coord(i);
            out.push_str(&format!("{},{},{:.17e}\n", c.x, c.y, v.as_f64()));
        }
        out
    }
}

/// Holds the lower-triangular factor of G; one factorization shared by all
/// replicas.
pub struct GffSampler<F: Scalar> {
    chol_l: DMatrix<F>,
}

impl<F: Scalar> GffSampler<F> {
    pub fn new(green: &GreenMatrix<F>) -> Result<Self, GffError> {
        let n = green.matrix().nrows();
        if n == 0 {
            return Ok(GffSampler { chol_l: DMatrix::zeros(0, 0) });
        }
        let chol = green
            .matrix()
            .clone()
            .cholesky()
            .ok_or(GffError::NotPositiveDefinite)?;
        Ok(GffSampler { chol_l: chol.l() })
    }

    /// Centered Gaussian vector with covariance exactly G.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> ScalarField<F> {
        let n = self.chol_l.nrows();
        let z: Vec<F> = (0..n).map(|_| F::std_normal(rng)).collect();
        let mut phi = vec![F::zero(); n];
        // phi = L z, lower-triangular
        for i in 0..n {
            let mut acc = F::zero();
            for j in 0..=i {
                acc += self.chol_l[(i, j)] * z[j];
            }
            phi[i] = acc;
        }
        ScalarField::new(phi, FieldRole::Gff)
    }
}

/// Convenience wrapper: factorize and draw one field.
pub fn sample_gff<F: Scalar, R: Rng>(
    _g: &DomainGraph<F>,
    green: &GreenMatrix<F>,
    rng: &mut R,
) -> Result<ScalarField<F>, GffError> {
    Ok(GffSampler::new(green)?.sample(rng))
}

/// `:phi^2:(x) = phi(x)^2 - G(x,x)`.
pub fn wick_square<F: Scalar>(
    phi: &ScalarField<F>,
    green: &GreenMatrix<F>,
) -> Result<ScalarField<F>, GffError> {
    if phi.role() != FieldRole::Gff {
        return Err(GffError::WrongRole(FieldRole::Gff));
    }
    if phi.len() != green.matrix().nrows() {
        return Err(GffError::LengthMismatch {
            expected: green.matrix().nrows(),
            found: phi.len(),
        });
    }
    let values = phi
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| v * v - green.diag(i))
        .collect();
    Ok(ScalarField::new(values, FieldRole::WickSquare))
}

/// `:(phi+u)^2:(x) = :phi^2:(x) + 2 u phi(x)`.
pub fn shifted_square<F: Scalar>(
    phi: &ScalarField<F>,
    u: F,
    green: &GreenMatrix<F>,
) -> Result<ScalarField<F>, GffError> {
    let wick = wick_square(phi, green)?;
    let two = F::of_f64(2.0);
    let values = wick
        .values()
        .iter()
        .zip(phi.values())
        .map(|(&w, &p)| w + two * u * p)
        .collect();
    Ok(ScalarField::new(values, FieldRole::ShiftedSquare))
}
