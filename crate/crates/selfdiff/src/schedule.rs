//! Noise schedule: the β/α/ᾱ sequences that drive the forward and reverse
//! diffusion processes.
//!
//! Conventions:
//! - `t` runs over `1..=t_max` for per-step quantities; `alpha_bar(0) = 1`
//!   so `t = 0` means a clean latent.
//! - Reverse-step variance is fixed to `σ_t² = β_t`, except `σ_1 = 0` so the
//!   final reverse step is deterministic.

use thiserror::Error;

use crate::real::Real;

pub const DEFAULT_T_MAX: usize = 1000;
pub const DEFAULT_BETA_START: f64 = 1e-4;
pub const DEFAULT_BETA_END: f64 = 0.02;

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("t_max must be >= 1, got {0}")]
    BadTMax(usize),
    #[error("beta_start must satisfy 0 < beta_start <= beta_end, got beta_start = {0}")]
    BadBetaStart(f64),
    #[error("beta_end must satisfy beta_start <= beta_end < 1, got beta_end = {0}")]
    BadBetaEnd(f64),
}

/// Variance schedule of a diffusion process.
#[derive(Clone, Debug)]
pub struct NoiseSchedule<T> {
    t_max: usize,
    betas: Vec<T>,      // betas[t-1] = β_t for t in 1..=t_max
    alphas: Vec<T>,     // alphas[t-1] = 1 - β_t
    alpha_bars: Vec<T>, // alpha_bars[t] = ᾱ_t for t in 0..=t_max, ᾱ_0 = 1
    sigma_sq: Vec<T>,   // sigma_sq[t-1] = σ_t², with σ_1² = 0
}

/// Linear β interpolation from `beta_start` to `beta_end` over `t_max` steps.
pub fn build_schedule<T: Real>(
    t_max: usize,
    beta_start: f64,
    beta_end: f64,
) -> Result<NoiseSchedule<T>, ScheduleError> {
    if t_max < 1 {
        return Err(ScheduleError::BadTMax(t_max));
    }
    if !(beta_start > 0.0 && beta_start <= beta_end) {
        return Err(ScheduleError::BadBetaStart(beta_start));
    }
    if !(beta_end < 1.0) {
        return Err(ScheduleError::BadBetaEnd(beta_end));
    }

    let mut betas = Vec::with_capacity(t_max);
    for i in 0..t_max {
        let frac = if t_max == 1 { 0.0 } else { i as f64 / (t_max - 1) as f64 };
        betas.push(T::from_f64_lit(beta_start + (beta_end - beta_start) * frac));
    }
    let alphas: Vec<T> = betas.iter().map(|&b| T::one() - b).collect();
    let mut alpha_bars = Vec::with_capacity(t_max + 1);
    alpha_bars.push(T::one());
    let mut prod = T::one();
    for &a in &alphas {
        prod = prod * a;
        alpha_bars.push(prod);
    }
    let mut sigma_sq = betas.clone();
    sigma_sq[0] = T::zero();

    Ok(NoiseSchedule { t_max, betas, alphas, alpha_bars, sigma_sq })
}

impl<T: Real> NoiseSchedule<T> {
    pub fn default_schedule() -> Self {
        build_schedule(DEFAULT_T_MAX, DEFAULT_BETA_START, DEFAULT_BETA_END)
            .expect("default schedule parameters are valid")
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    /// β_t for `t` in `1..=t_max`.
    pub fn beta(&self, t: usize) -> T {
        assert!((1..=self.t_max).contains(&t), "beta({t}) out of range");
        self.betas[t - 1]
    }

    /// α_t = 1 − β_t for `t` in `1..=t_max`.
    pub fn alpha(&self, t: usize) -> T {
        assert!((1..=self.t_max).contains(&t), "alpha({t}) out of range");
        self.alphas[t - 1]
    }

    /// ᾱ_t for `t` in `0..=t_max`, with ᾱ_0 = 1.
    pub fn alpha_bar(&self, t: usize) -> T {
        assert!(t <= self.t_max, "alpha_bar({t}) out of range");
        self.alpha_bars[t]
    }

    /// Reverse-step variance σ_t²; zero at t = 1.
    pub fn sigma_sq(&self, t: usize) -> T {
        assert!((1..=self.t_max).contains(&t), "sigma_sq({t}) out of range");
        self.sigma_sq[t - 1]
    }

    pub fn sigma(&self, t: usize) -> T {
        self.sigma_sq(t).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::c;

    #[test]
    fn default_schedule_matches_documented_shape() {
        let s = NoiseSchedule::<f64>::default_schedule();
        assert_eq!(s.t_max(), 1000);
        assert_eq!(s.beta(1), 1e-4);
        assert_eq!(s.beta(1000), 0.02);
        // Terminal latents are near-isotropic.
        assert!(s.alpha_bar(1000) < 0.01, "alpha_bar(t_max) = {}", s.alpha_bar(1000));
    }

    #[test]
    fn schedule_identities_are_exact() {
        let s = NoiseSchedule::<f64>::default_schedule();
        assert_eq!(s.alpha_bar(0), 1.0);
        for t in 1..=s.t_max() {
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
            assert!(rel(s.alpha(t), 1.0 - s.beta(t)) <= 1e-12);
            assert!(rel(s.alpha_bar(t), s.alpha_bar(t - 1) * s.alpha(t)) <= 1e-12);
            assert!(s.alpha_bar(t) < s.alpha_bar(t - 1), "alpha_bar not strictly decreasing at {t}");
            assert!(s.beta(t) > 0.0 && s.beta(t) < 1.0);
        }
    }

    #[test]
    fn constant_beta_matches_product_oracle() {
        // Independent product loop for the ᾱ sequence.
        let s = build_schedule::<f64>(10, 0.1, 0.1).unwrap();
        let mut prod = 1.0;
        for t in 1..=10 {
            prod *= 1.0 - 0.1;
            assert!((s.alpha_bar(t) - prod).abs() <= 1e-15);
        }
        assert!((s.alpha_bar(10) - 0.9f64.powi(10)).abs() <= 1e-15);
    }

    #[test]
    fn near_zero_beta_is_near_identity() {
        let s = build_schedule::<f64>(3, 1e-12, 1e-12).unwrap();
        assert!((s.alpha_bar(3) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn invalid_ranges_name_the_offending_bound() {
        assert_eq!(build_schedule::<f64>(0, 1e-4, 0.02).unwrap_err(), ScheduleError::BadTMax(0));
        assert!(matches!(
            build_schedule::<f64>(10, 0.0, 0.02).unwrap_err(),
            ScheduleError::BadBetaStart(_)
        ));
        assert!(matches!(
            build_schedule::<f64>(10, 0.5, 0.2).unwrap_err(),
            ScheduleError::BadBetaStart(_)
        ));
        assert!(matches!(
            build_schedule::<f64>(10, 1e-4, 1.0).unwrap_err(),
            ScheduleError::BadBetaEnd(_)
        ));
    }

    #[test]
    fn sigma_conventions() {
        let s = NoiseSchedule::<f64>::default_schedule();
        assert_eq!(s.sigma_sq(1), 0.0, "final reverse step is deterministic");
        for t in 2..=s.t_max() {
            assert_eq!(s.sigma_sq(t), s.beta(t));
        }
    }

    #[test]
    fn f32_instantiation_builds() {
        let s = NoiseSchedule::<f32>::default_schedule();
        assert!((s.beta(1000) - 0.02f32).abs() < 1e-9);
        assert!(s.alpha_bar(1000) < c(0.01));
    }
}
