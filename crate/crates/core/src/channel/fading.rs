//! Random draws for shadowing and small-scale fading, plus the ULA steering
//! vectors used to build the deterministic BS-IRS line-of-sight component.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{CMat, CVec, Error, Result};

/// One log-normal shadowing sample in dB, `N(0, sigma_sd^2)`.
pub fn draw_shadowing<R: Rng + ?Sized>(rng: &mut R, sigma_sd_db: f64) -> f64 {
    if sigma_sd_db == 0.0 {
        return 0.0;
    }
    let z: f64 = rng.sample(StandardNormal);
    sigma_sd_db * z
}

/// One `CN(0, variance)` sample: each quadrature carries `variance / 2`.
#[inline]
pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// I.i.d. circularly-symmetric complex Gaussian vector with per-entry
/// variance `variance`.
pub fn draw_rayleigh_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, variance: f64) -> CVec {
    let scale = (variance / 2.0).sqrt();
    Array1::from_shape_fn(len, |_| complex_gaussian(rng, scale))
}

/// Half-wavelength ULA response: entry `m` is `exp(j*pi*m*sin(angle))`.
pub fn steering_vector(n_elems: usize, angle: f64) -> CVec {
    let step = PI * angle.sin();
    Array1::from_shape_fn(n_elems, |m| Complex64::from_polar(1.0, step * m as f64))
}

/// Rank-one LOS matrix `a_irs(theta) * a_bs(phi)^T` of shape `n x nb`.
pub fn los_matrix(n: usize, nb: usize, irs_angle: f64, bs_angle: f64) -> CMat {
    let a_irs = steering_vector(n, irs_angle);
    let a_bs = steering_vector(nb, bs_angle);
    Array2::from_shape_fn((n, nb), |(r, c)| a_irs[r] * a_bs[c])
}

/// Rician BS-IRS matrix
/// `sqrt(G s/(G+1)) H_los + sqrt(s/(G+1)) H_nlos`, with `s = sigma_h2`,
/// `G = gamma` and `H_nlos` i.i.d. `CN(0, 1)`.
pub fn draw_rician_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    nb: usize,
    sigma_h2: f64,
    gamma: f64,
    los: &CMat,
) -> Result<CMat> {
    if los.dim() != (n, nb) {
        return Err(Error::Shape(format!(
            "LOS matrix is {:?}, expected ({n}, {nb})",
            los.dim()
        )));
    }
    if !(gamma >= 0.0) || !(sigma_h2 >= 0.0) {
        return Err(Error::domain("Rician factor and sigma_h2 must be non-negative"));
    }
    let los_amp = (gamma * sigma_h2 / (gamma + 1.0)).sqrt();
    let nlos_amp = (sigma_h2 / (gamma + 1.0)).sqrt();
    let nlos_scale = nlos_amp * std::f64::consts::FRAC_1_SQRT_2;
    Ok(Array2::from_shape_fn((n, nb), |(r, c)| {
        los[(r, c)] * los_amp + complex_gaussian(rng, nlos_scale)
    }))
}
