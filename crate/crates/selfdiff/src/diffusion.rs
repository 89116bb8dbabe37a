//! Forward (noising) and reverse (denoising) process math, independent of
//! any learned model.
//!
//! All operations are pure functions of their inputs; randomness enters only
//! through explicitly passed noise tensors.

use thiserror::Error;

use crate::real::{c, Real};
use crate::schedule::NoiseSchedule;
use crate::tensor::Tensor;

#[derive(Debug, Error, PartialEq)]
pub enum DiffusionError {
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch { expected: Vec<usize>, got: Vec<usize> },
    #[error("time index {t} out of range {lo}..={hi}")]
    TimeOutOfRange { t: usize, lo: usize, hi: usize },
    #[error("cannot reverse from t = 0")]
    NothingToReverse,
    #[error("alpha_bar({t}) = {value} is too small to invert (< 1e-12)")]
    IllConditioned { t: usize, value: f64 },
}

/// A latent tensor tagged with its position on the diffusion trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct LatentState<T> {
    pub values: Tensor<T>,
    pub t: usize,
}

impl<T: Real> LatentState<T> {
    pub fn clean(values: Tensor<T>) -> Self {
        Self { values, t: 0 }
    }
}

fn check_shapes<T: Real>(a: &Tensor<T>, b: &Tensor<T>) -> Result<(), DiffusionError> {
    if a.shape() != b.shape() {
        return Err(DiffusionError::ShapeMismatch {
            expected: a.shape().to_vec(),
            got: b.shape().to_vec(),
        });
    }
    Ok(())
}

fn check_t(t: usize, lo: usize, hi: usize) -> Result<(), DiffusionError> {
    if t < lo || t > hi {
        return Err(DiffusionError::TimeOutOfRange { t, lo, hi });
    }
    Ok(())
}

/// One noising step: `√(1−β_t)·z_{t−1} + √β_t·ε`.
pub fn forward_step<T: Real>(
    z_prev: &LatentState<T>,
    t: usize,
    noise: &Tensor<T>,
    sched: &NoiseSchedule<T>,
) -> Result<LatentState<T>, DiffusionError> {
    check_t(t, 1, sched.t_max())?;
    check_shapes(&z_prev.values, noise)?;
    let a = (T::one() - sched.beta(t)).sqrt();
    let b = sched.beta(t).sqrt();
    let values = z_prev.values.zip_map(noise, |z, n| a * z + b * n);
    Ok(LatentState { values, t })
}

/// Closed-form jump to timestep `t`: `√ᾱ_t·z_0 + √(1−ᾱ_t)·ε`.
pub fn forward_to<T: Real>(
    z0: &LatentState<T>,
    t: usize,
    noise: &Tensor<T>,
    sched: &NoiseSchedule<T>,
) -> Result<LatentState<T>, DiffusionError> {
    check_t(t, 0, sched.t_max())?;
    check_shapes(&z0.values, noise)?;
    let ab = sched.alpha_bar(t);
    let a = ab.sqrt();
    let b = (T::one() - ab).sqrt();
    let values = z0.values.zip_map(noise, |z, n| a * z + b * n);
    Ok(LatentState { values, t })
}

/// One denoising step from `t` to `t−1` given the model's noise estimate:
/// `μ = (z_t − (β_t/√(1−ᾱ_t))·ε̂)/√α_t`, then `μ + σ_t·ε`.
pub fn reverse_step<T: Real>(
    z_t: &LatentState<T>,
    t: usize,
    eps_hat: &Tensor<T>,
    noise: &Tensor<T>,
    sched: &NoiseSchedule<T>,
) -> Result<LatentState<T>, DiffusionError> {
    if t == 0 {
        return Err(DiffusionError::NothingToReverse);
    }
    check_t(t, 1, sched.t_max())?;
    check_shapes(&z_t.values, eps_hat)?;
    check_shapes(&z_t.values, noise)?;
    let inv_sqrt_alpha = T::one() / sched.alpha(t).sqrt();
    let eps_coef = sched.beta(t) / (T::one() - sched.alpha_bar(t)).sqrt();
    let sigma = sched.sigma(t);
    let mut values = z_t.values.zip_map(eps_hat, |z, e| inv_sqrt_alpha * (z - eps_coef * e));
    if sigma > T::zero() {
        values.axpy(sigma, noise);
    }
    Ok(LatentState { values, t: t - 1 })
}

/// Algebraic inversion of the closed-form jump:
/// `z_0 = (z_t − √(1−ᾱ_t)·ε̂)/√ᾱ_t`.
pub fn predict_z0<T: Real>(
    z_t: &LatentState<T>,
    t: usize,
    eps_hat: &Tensor<T>,
    sched: &NoiseSchedule<T>,
) -> Result<LatentState<T>, DiffusionError> {
    check_t(t, 1, sched.t_max())?;
    check_shapes(&z_t.values, eps_hat)?;
    let ab = sched.alpha_bar(t);
    if ab.to_f64_lossy() < 1e-12 {
        return Err(DiffusionError::IllConditioned { t, value: ab.to_f64_lossy() });
    }
    let inv = T::one() / ab.sqrt();
    let b = (T::one() - ab).sqrt();
    let values = z_t.values.zip_map(eps_hat, |z, e| inv * (z - b * e));
    Ok(LatentState { values, t: 0 })
}

/// Mean distance helpers used by tests and the synthesis diagnostics.
pub fn mean_abs_diff<T: Real>(a: &Tensor<T>, b: &Tensor<T>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let n = a.len() as f64;
    a.data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| (x.to_f64_lossy() - y.to_f64_lossy()).abs())
        .sum::<f64>()
        / n
}

/// Mean over pixels of the per-pixel channel-vector L2 norm of `a − b`,
/// for `(C, H, W)` tensors.
pub fn mean_pixel_l2<T: Real>(a: &Tensor<T>, b: &Tensor<T>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    assert_eq!(a.shape().len(), 3, "mean_pixel_l2 expects (C, H, W)");
    let (ch, h, w) = (a.shape()[0], a.shape()[1], a.shape()[2]);
    let mut total = 0.0;
    for y in 0..h {
        for x in 0..w {
            let mut sq = 0.0;
            for ci in 0..ch {
                let i = (ci * h + y) * w + x;
                let d = a.data()[i].to_f64_lossy() - b.data()[i].to_f64_lossy();
                sq += d * d;
            }
            total += sq.sqrt();
        }
    }
    total / (h * w) as f64
}

/// Convenience scalar used by several tests: `c(x)` keeps literals tidy.
#[allow(dead_code)]
fn _keep_c_import<T: Real>() -> T {
    c(0.0)
}
