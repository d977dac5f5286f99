use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::scalar::Real;

/// A feature matrix with its presence mask (true = observed).
#[derive(Debug, Clone, PartialEq)]
pub struct Design<T> {
    pub x: Array2<T>,
    pub mask: Array2<bool>,
}

impl<T: Real> Design<T> {
    pub fn new(x: Array2<T>, mask: Array2<bool>) -> Result<Self, ModelError> {
        if x.dim() != mask.dim() {
            return Err(ModelError::Shape(format!(
                "values {:?} vs mask {:?}",
                x.dim(),
                mask.dim()
            )));
        }
        Ok(Self { x, mask })
    }

    /// Fully observed matrix.
    pub fn dense(x: Array2<T>) -> Self {
        let mask = Array2::from_elem(x.dim(), true);
        Self { x, mask }
    }

    pub fn rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn cols(&self) -> usize {
        self.x.ncols()
    }
}

/// Per-column training mean and population standard deviation. Missing
/// cells are imputed with the mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer<T> {
    pub mean: Vec<T>,
    pub sd: Vec<T>,
}

impl<T: Real> Standardizer<T> {
    pub fn fit(design: &Design<T>) -> Self {
        let mut mean = Vec::with_capacity(design.cols());
        let mut sd = Vec::with_capacity(design.cols());
        for (col, present) in design.x.axis_iter(Axis(1)).zip(design.mask.axis_iter(Axis(1))) {
            let vals: Vec<T> = col
                .iter()
                .zip(present.iter())
                .filter(|(_, p)| **p)
                .map(|(v, _)| *v)
                .collect();
            if vals.is_empty() {
                mean.push(T::zero());
                sd.push(T::one());
                continue;
            }
            let n = T::from_count(vals.len());
            let m = vals.iter().copied().sum::<T>() / n;
            let var = vals.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / n;
            let s = var.sqrt();
            mean.push(m);
            sd.push(if s > T::zero() && s.is_finite() { s } else { T::one() });
        }
        Self { mean, sd }
    }

    pub fn apply(&self, design: &Design<T>) -> Array2<T> {
        let mut out = design.x.clone();
        for ((mut col, present), (m, s)) in out
            .axis_iter_mut(Axis(1))
            .zip(design.mask.axis_iter(Axis(1)))
            .zip(self.mean.iter().zip(&self.sd))
        {
            for (v, p) in col.iter_mut().zip(present.iter()) {
                *v = if *p { (*v - *m) / *s } else { T::zero() };
            }
        }
        out
    }

    pub fn fit_apply(design: &Design<T>) -> (Self, Array2<T>) {
        let s = Self::fit(design);
        let x = s.apply(design);
        (s, x)
    }
}

/// Convenience for dense matrices.
pub fn standardize_dense<T: Real>(x: ArrayView2<T>) -> Array2<T> {
    let d = Design::dense(x.to_owned());
    Standardizer::fit(&d).apply(&d)
}
