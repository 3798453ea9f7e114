//! Joint active/passive beamforming for a single user.
//!
//! For a fixed BS beamformer `w`, the IRS phases that maximize
//! `|(g^T Θ H + f^T) w|` rotate every cascaded term `g_n h_n^T w` onto the
//! phase of the direct term `f^T w`, which turns the triangle inequality into
//! an equality. For fixed phases, maximal-ratio transmission on the combined
//! channel is optimal. Alternating the two steps never decreases the
//! objective.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::{CMat, CVec, Error, Result};

/// IRS phase shifts, each stored in `[0, 2π)` with unit reflection amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    phases: Vec<f64>,
}

impl PhaseProfile {
    /// Build from arbitrary angles; each is reduced modulo 2π.
    pub fn new(phases: impl IntoIterator<Item = f64>) -> Self {
        Self {
            phases: phases.into_iter().map(wrap_phase).collect(),
        }
    }

    /// All-zero profile (no phase shift) for `n` elements.
    pub fn zeros(n: usize) -> Self {
        Self { phases: vec![0.0; n] }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Reflection coefficients `e^{jφ_n}`.
    pub fn coefficients(&self) -> CVec {
        self.phases
            .iter()
            .map(|&p| Complex64::from_polar(1.0, p))
            .collect()
    }
}

fn wrap_phase(p: f64) -> f64 {
    let r = p.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Unit-norm transmit weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    w: CVec,
}

impl Beamformer {
    pub fn weights(&self) -> &CVec {
        &self.w
    }

    pub fn into_weights(self) -> CVec {
        self.w
    }

    /// Matched filter `conj(c) / ‖c‖` for the row channel `c`.
    fn matched(c: &CVec, what: &'static str) -> Result<Self> {
        let norm = l2_norm(c);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::DegenerateChannel(what));
        }
        Ok(Self {
            w: c.mapv(|z| z.conj() / norm),
        })
    }
}

/// Objective value after each completed AO iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OptimizationTrace {
    /// `|(g^T Θ H + f^T) w|` (amplitude, not power).
    pub objective_per_iteration: Vec<f64>,
    pub iterations_run: usize,
}

impl OptimizationTrace {
    pub fn last(&self) -> Option<f64> {
        self.objective_per_iteration.last().copied()
    }

    /// True when no entry drops below its predecessor by more than
    /// `rel_slack` relative.
    pub fn is_non_decreasing(&self, rel_slack: f64) -> bool {
        self.objective_per_iteration
            .windows(2)
            .all(|p| p[1] >= p[0] * (1.0 - rel_slack))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSolution {
    pub theta: PhaseProfile,
    pub w: Beamformer,
    pub trace: OptimizationTrace,
}

/// Alternating-optimization settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoSettings {
    /// Maximum number of (phase, beamformer) rounds; at least 1.
    pub iterations: usize,
    /// Stop early once the relative objective gain of a round falls below
    /// this value.
    pub tolerance: Option<f64>,
}

impl Default for AoSettings {
    fn default() -> Self {
        Self {
            iterations: 3,
            tolerance: None,
        }
    }
}

pub(crate) fn l2_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Unconjugated inner product `a^T b`.
fn dot(a: &CVec, b: &CVec) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn check_shapes(g: &CVec, h_mat: &CMat, f: &CVec) -> Result<()> {
    let (n, nb) = h_mat.dim();
    if g.len() != n || f.len() != nb {
        return Err(Error::Shape(format!(
            "g has {} entries and f has {}, but H is {n}x{nb}",
            g.len(),
            f.len()
        )));
    }
    Ok(())
}

fn check_len(what: &str, len: usize, expected: usize) -> Result<()> {
    if len != expected {
        return Err(Error::Shape(format!("{what} has {len} entries, expected {expected}")));
    }
    Ok(())
}

/// Combined row channel `g^T Θ H + f^T` (length `N_b`).
pub fn combined_channel(g: &CVec, theta: &PhaseProfile, h_mat: &CMat, f: &CVec) -> Result<CVec> {
    check_shapes(g, h_mat, f)?;
    check_len("phase profile", theta.len(), g.len())?;
    let gq = g * &theta.coefficients();
    Ok(gq.dot(h_mat) + f)
}

/// Direct-link MRT, `w = conj(f) / ‖f‖`.
pub fn mrt_direct(f: &CVec) -> Result<Beamformer> {
    Beamformer::matched(f, "direct channel is zero")
}

/// Closed-form phases for a fixed beamformer:
/// `φ_n = arg(f^T w) - arg(g_n) - arg(h_n^T w)`.
///
/// When `f^T w` vanishes the reference phase is 0. An element whose cascaded
/// term vanishes gets phase 0.
pub fn optimal_phases(g: &CVec, h_mat: &CMat, w: &Beamformer, f: &CVec) -> Result<PhaseProfile> {
    check_shapes(g, h_mat, f)?;
    check_len("beamformer", w.w.len(), f.len())?;
    let direct = dot(f, &w.w);
    let reference = if direct == Complex64::new(0.0, 0.0) { 0.0 } else { direct.arg() };
    let hw = h_mat.dot(&w.w);
    Ok(PhaseProfile::new(g.iter().zip(hw.iter()).map(|(gn, hn)| {
        if *gn == Complex64::new(0.0, 0.0) || *hn == Complex64::new(0.0, 0.0) {
            0.0
        } else {
            reference - gn.arg() - hn.arg()
        }
    })))
}

/// MRT on the combined channel for a fixed phase profile.
pub fn mrt_combined(g: &CVec, theta: &PhaseProfile, h_mat: &CMat, f: &CVec) -> Result<Beamformer> {
    let c = combined_channel(g, theta, h_mat, f)?;
    Beamformer::matched(&c, "combined channel is zero")
}

/// Run exactly `iterations` AO rounds starting from direct MRT.
pub fn alternating_optimize(g: &CVec, h_mat: &CMat, f: &CVec, iterations: usize) -> Result<JointSolution> {
    alternating_optimize_with(g, h_mat, f, &AoSettings { iterations, tolerance: None })
}

/// AO with an optional relative-gain stopping rule.
pub fn alternating_optimize_with(
    g: &CVec,
    h_mat: &CMat,
    f: &CVec,
    settings: &AoSettings,
) -> Result<JointSolution> {
    if settings.iterations == 0 {
        return Err(Error::domain("alternating optimization needs at least one iteration"));
    }
    check_shapes(g, h_mat, f)?;
    let mut w = mrt_direct(f)?;
    let mut theta = PhaseProfile::zeros(g.len());
    let mut trace = OptimizationTrace::default();
    for _ in 0..settings.iterations {
        theta = optimal_phases(g, h_mat, &w, f)?;
        let c = combined_channel(g, &theta, h_mat, f)?;
        w = Beamformer::matched(&c, "combined channel is zero")?;
        // After MRT the objective equals the combined-channel norm.
        let objective = dot(&c, &w.w).norm();
        let prev = trace.last();
        trace.objective_per_iteration.push(objective);
        trace.iterations_run += 1;
        if let (Some(tol), Some(prev)) = (settings.tolerance, prev) {
            if objective - prev <= tol * prev {
                break;
            }
        }
    }
    Ok(JointSolution { theta, w, trace })
}

/// Effective scalar gain `ρ = (g^T Θ H + f^T) w`.
pub fn effective_gain(
    g: &CVec,
    theta: &PhaseProfile,
    h_mat: &CMat,
    f: &CVec,
    w: &Beamformer,
) -> Result<Complex64> {
    let c = combined_channel(g, theta, h_mat, f)?;
    check_len("beamformer", w.w.len(), c.len())?;
    Ok(dot(&c, &w.w))
}

/// Received SNR `P_d |ρ|^2 / σ_n^2` (linear).
pub fn snr(rho: Complex64, pd: f64, sigma_n2: f64) -> Result<f64> {
    if !(pd > 0.0) || !(sigma_n2 > 0.0) {
        return Err(Error::domain("transmit power and noise variance must be positive"));
    }
    Ok(pd * rho.norm_sqr() / sigma_n2)
}
