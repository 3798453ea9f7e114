//! Sum spectral efficiency of the multiple-access schemes for one drop.
//!
//! * TDMA: every user gets its own slot, so the IRS is re-tuned per user.
//! * FDMA: users share time, so one phase profile (tuned for the aided user)
//!   serves everybody; the others only re-match their beamformers.
//! * NOMA: superposition with successive interference cancellation, using the
//!   same single-profile constraint as FDMA.
//!
//! The no-IRS variants use direct-link MRT. No-IRS FDMA equals no-IRS TDMA:
//! the `1/K` power and noise shares cancel.

use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;

use crate::channel::ChannelSet;
use crate::reflect::{
    alternating_optimize_with, effective_gain, l2_norm, mrt_combined, AoSettings, JointSolution,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    TdmaNoIrs,
    FdmaNoIrs,
    NomaNoIrs,
    TdmaIrs,
    FdmaIrs,
    NomaIrs,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::TdmaNoIrs,
        Scheme::FdmaNoIrs,
        Scheme::NomaNoIrs,
        Scheme::TdmaIrs,
        Scheme::FdmaIrs,
        Scheme::NomaIrs,
    ];

    /// The five curves of the reference comparison (no-IRS FDMA is
    /// identical to no-IRS TDMA and left out).
    pub const COMPARISON: [Scheme; 5] = [
        Scheme::TdmaNoIrs,
        Scheme::NomaNoIrs,
        Scheme::FdmaIrs,
        Scheme::TdmaIrs,
        Scheme::NomaIrs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::TdmaNoIrs => "tdma_noirs",
            Scheme::FdmaNoIrs => "fdma_noirs",
            Scheme::NomaNoIrs => "noma_noirs",
            Scheme::TdmaIrs => "tdma_irs",
            Scheme::FdmaIrs => "fdma_irs",
            Scheme::NomaIrs => "noma_irs",
        }
    }

    pub fn uses_irs(self) -> bool {
        matches!(self, Scheme::TdmaIrs | Scheme::FdmaIrs | Scheme::NomaIrs)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scheme::ALL.iter().map(|s| s.name()).collect();
                format!("unknown scheme `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// Which user the single shared IRS profile is tuned for (FDMA/NOMA).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[derive(Default)]
pub enum AidedUserPolicy {
    /// Largest jointly optimized effective gain.
    #[default]
    StrongestJoint,
    /// Smallest direct-link norm `‖f_k‖`.
    WeakestDirect,
    /// Largest direct-link norm.
    StrongestDirect,
    /// Smallest IRS-UE distance.
    NearestIrs,
    Fixed(usize),
}


impl fmt::Display for AidedUserPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AidedUserPolicy::StrongestJoint => f.write_str("strongest_joint"),
            AidedUserPolicy::WeakestDirect => f.write_str("weakest_direct"),
            AidedUserPolicy::StrongestDirect => f.write_str("strongest_direct"),
            AidedUserPolicy::NearestIrs => f.write_str("nearest_irs"),
            AidedUserPolicy::Fixed(k) => write!(f, "fixed:{k}"),
        }
    }
}

impl FromStr for AidedUserPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "strongest_joint" => AidedUserPolicy::StrongestJoint,
            "weakest_direct" => AidedUserPolicy::WeakestDirect,
            "strongest_direct" => AidedUserPolicy::StrongestDirect,
            "nearest_irs" => AidedUserPolicy::NearestIrs,
            _ => match s.strip_prefix("fixed:") {
                Some(k) => AidedUserPolicy::Fixed(
                    k.trim().parse().map_err(|_| format!("bad user index in `{s}`"))?,
                ),
                None => {
                    return Err(format!(
                        "unknown aided-user policy `{s}` (expected strongest_joint, \
                         weakest_direct, strongest_direct, nearest_irs or fixed:<index>)"
                    ))
                }
            },
        })
    }
}

/// NOMA power-split rule. All rules give weaker users more power.
#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub enum PowerPolicy {
    /// `α_k` proportional to the user's rank in ascending gain order (the
    /// weakest of `K` users gets weight `K`, the strongest weight 1). Tied
    /// gains share the mean of their ranks.
    #[default]
    RankProportional,
    /// `α_k ∝ 1 / |ρ_k|^2`.
    InverseGain,
    /// Two users only: the stronger gets `strong_share`, the weaker the rest.
    FixedSplit { strong_share: f64 },
}


impl fmt::Display for PowerPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PowerPolicy::RankProportional => f.write_str("rank"),
            PowerPolicy::InverseGain => f.write_str("inverse_gain"),
            PowerPolicy::FixedSplit { strong_share } => write!(f, "fixed_split:{strong_share}"),
        }
    }
}

impl FromStr for PowerPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "rank" => PowerPolicy::RankProportional,
            "inverse_gain" => PowerPolicy::InverseGain,
            _ => match s.strip_prefix("fixed_split:") {
                Some(v) => {
                    let strong_share: f64 =
                        v.trim().parse().map_err(|_| format!("bad share in `{s}`"))?;
                    if !(0.0..=0.5).contains(&strong_share) {
                        return Err(format!("strong-user share must lie in [0, 0.5], got {strong_share}"));
                    }
                    PowerPolicy::FixedSplit { strong_share }
                }
                None => {
                    return Err(format!(
                        "unknown power policy `{s}` (expected rank, inverse_gain or fixed_split:<share>)"
                    ))
                }
            },
        })
    }
}

/// Transmit power and receiver noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub pd_watts: f64,
    pub noise_w: f64,
}

impl LinkBudget {
    /// `P_d |ρ|^2 / σ_n^2` for a power gain `|ρ|^2`.
    fn snr(&self, gain_sq: f64) -> f64 {
        self.pd_watts * gain_sq / self.noise_w
    }
}

/// Everything a scheme evaluation needs besides the channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub budget: LinkBudget,
    pub ao: AoSettings,
    pub aided_user: AidedUserPolicy,
    pub power: PowerPolicy,
}

/// NOMA power coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub alphas: Vec<f64>,
}

/// SIC decode order: user indices, strongest effective gain first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SicOrder {
    pub order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResult {
    /// Per-user spectral efficiency (bps/Hz), indexed by original user.
    pub per_user_rate: Vec<f64>,
    pub sum_rate: f64,
    /// User the shared IRS profile was tuned for, if any.
    pub aided_user: Option<usize>,
    /// `|ρ_k|`, the effective amplitude gain per user.
    pub gains: Vec<f64>,
}

impl SchemeResult {
    fn new(per_user_rate: Vec<f64>, aided_user: Option<usize>, gains: Vec<f64>) -> Self {
        let sum_rate = per_user_rate.iter().sum();
        Self { per_user_rate, sum_rate, aided_user, gains }
    }
}

/// Decode order for SIC: gains descending, ties by lower index.
pub fn sic_order(gains: &[f64]) -> SicOrder {
    let mut order: Vec<usize> = (0..gains.len()).collect();
    order.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]).then(a.cmp(&b)));
    SicOrder { order }
}

/// Split the NOMA power budget over users with power gains `|ρ_k|^2`.
pub fn allocate_noma_power(gains: &[f64], policy: PowerPolicy) -> Result<PowerAllocation> {
    if gains.is_empty() {
        return Err(Error::domain("no users to allocate power to"));
    }
    if let Some(g) = gains.iter().find(|g| !(**g > 0.0) || !g.is_finite()) {
        return Err(Error::domain(format!("power allocation needs positive gains, got {g}")));
    }
    let alphas = match policy {
        PowerPolicy::InverseGain => {
            let total: f64 = gains.iter().map(|g| 1.0 / g).sum();
            gains.iter().map(|g| (1.0 / g) / total).collect()
        }
        PowerPolicy::RankProportional => {
            let k = gains.len();
            let order = sic_order(gains).order;
            // Position p in the descending order gets rank p + 1, so the
            // weakest user ends up with rank K.
            let mut weight = vec![0.0; k];
            let mut start = 0;
            while start < k {
                let mut end = start + 1;
                while end < k && gains[order[end]] == gains[order[start]] {
                    end += 1;
                }
                let mean_rank = (start + 1 + end) as f64 / 2.0;
                for &u in &order[start..end] {
                    weight[u] = mean_rank;
                }
                start = end;
            }
            let total = (k * (k + 1)) as f64 / 2.0;
            weight.into_iter().map(|w| w / total).collect()
        }
        PowerPolicy::FixedSplit { strong_share } => match gains.len() {
            1 => vec![1.0],
            2 => {
                let order = sic_order(gains).order;
                let mut a = vec![0.0; 2];
                a[order[0]] = strong_share;
                a[order[1]] = 1.0 - strong_share;
                a
            }
            k => {
                return Err(Error::domain(format!(
                    "fixed-split power policy supports at most two users, got {k}"
                )))
            }
        },
    };
    Ok(PowerAllocation { alphas })
}

/// Per-user NOMA rates `log2(1 + γ_k)` with SIC.
///
/// `gains_sq` are `|ρ_k|^2`. User `k` cancels every weaker user and treats
/// the power of all stronger users as interference.
pub fn noma_rates(gains_sq: &[f64], alloc: &PowerAllocation, budget: &LinkBudget) -> Vec<f64> {
    let order = sic_order(gains_sq).order;
    let mut rates = vec![0.0; gains_sq.len()];
    let mut stronger_power = 0.0;
    for &k in &order {
        let g = gains_sq[k];
        let sinr = g * alloc.alphas[k] * budget.pd_watts
            / (g * stronger_power * budget.pd_watts + budget.noise_w);
        rates[k] = (1.0 + sinr).log2();
        stronger_power += alloc.alphas[k];
    }
    rates
}

fn oma_rates(gains: &[f64], budget: &LinkBudget) -> Vec<f64> {
    let k = gains.len() as f64;
    gains
        .iter()
        .map(|g| (1.0 + budget.snr(g * g)).log2() / k)
        .collect()
}

/// Scheme evaluation over one channel realization.
///
/// Per-user joint solutions are computed once and shared by TDMA-IRS, the
/// aided-user selection and the FDMA/NOMA-IRS evaluations.
pub struct DropEvaluator<'a> {
    channels: &'a ChannelSet,
    cfg: SchemeConfig,
    joint: OnceCell<Vec<JointSolution>>,
}

impl<'a> DropEvaluator<'a> {
    pub fn new(channels: &'a ChannelSet, cfg: SchemeConfig) -> Self {
        Self { channels, cfg, joint: OnceCell::new() }
    }

    /// AO solution for every user, in user order.
    pub fn joint_solutions(&self) -> Result<&[JointSolution]> {
        if let Some(j) = self.joint.get() {
            return Ok(j);
        }
        let ch = self.channels;
        let sols = (0..ch.users())
            .map(|k| alternating_optimize_with(&ch.g[k], &ch.h_mat, &ch.f[k], &self.cfg.ao))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.joint.get_or_init(|| sols))
    }

    fn direct_gains(&self) -> Result<Vec<f64>> {
        self.channels
            .f
            .iter()
            .map(|f| {
                let n = l2_norm(f);
                if n > 0.0 {
                    Ok(n)
                } else {
                    Err(Error::DegenerateChannel("direct channel is zero"))
                }
            })
            .collect()
    }

    fn tdma_irs_gains(&self) -> Result<Vec<f64>> {
        let ch = self.channels;
        self.joint_solutions()?
            .iter()
            .enumerate()
            .map(|(k, s)| Ok(effective_gain(&ch.g[k], &s.theta, &ch.h_mat, &ch.f[k], &s.w)?.norm()))
            .collect()
    }

    pub fn aided_user(&self) -> Result<usize> {
        let k = self.channels.users();
        if k == 0 {
            return Err(Error::domain("no users to aid"));
        }
        let argmin = |v: &[f64]| first_extreme(v, |a, b| a < b);
        let argmax = |v: &[f64]| first_extreme(v, |a, b| a > b);
        Ok(match self.cfg.aided_user {
            AidedUserPolicy::StrongestJoint => argmax(&self.tdma_irs_gains()?),
            AidedUserPolicy::WeakestDirect => argmin(&self.direct_gains()?),
            AidedUserPolicy::StrongestDirect => argmax(&self.direct_gains()?),
            AidedUserPolicy::NearestIrs => argmin(&self.channels.irs_distance_m),
            AidedUserPolicy::Fixed(i) if i < k => i,
            AidedUserPolicy::Fixed(i) => {
                return Err(Error::domain(format!("aided user {i} out of range for {k} users")))
            }
        })
    }

    /// Gains when the IRS is tuned for one user and everyone else re-matches.
    fn shared_profile_gains(&self) -> Result<(usize, Vec<f64>)> {
        let aided = self.aided_user()?;
        let ch = self.channels;
        let sol = &self.joint_solutions()?[aided];
        let gains = (0..ch.users())
            .map(|k| {
                let w = if k == aided {
                    sol.w.clone()
                } else {
                    mrt_combined(&ch.g[k], &sol.theta, &ch.h_mat, &ch.f[k])?
                };
                Ok(effective_gain(&ch.g[k], &sol.theta, &ch.h_mat, &ch.f[k], &w)?.norm())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((aided, gains))
    }

    pub fn tdma(&self, with_irs: bool) -> Result<SchemeResult> {
        let gains = if with_irs { self.tdma_irs_gains()? } else { self.direct_gains()? };
        Ok(SchemeResult::new(oma_rates(&gains, &self.cfg.budget), None, gains))
    }

    pub fn fdma(&self, with_irs: bool) -> Result<SchemeResult> {
        if !with_irs {
            return self.tdma(false);
        }
        let (aided, gains) = self.shared_profile_gains()?;
        Ok(SchemeResult::new(oma_rates(&gains, &self.cfg.budget), Some(aided), gains))
    }

    pub fn noma(&self, with_irs: bool) -> Result<SchemeResult> {
        let (aided, gains) = if with_irs {
            let (a, g) = self.shared_profile_gains()?;
            (Some(a), g)
        } else {
            (None, self.direct_gains()?)
        };
        let gains_sq: Vec<f64> = gains.iter().map(|g| g * g).collect();
        let alloc = allocate_noma_power(&gains_sq, self.cfg.power)?;
        let rates = noma_rates(&gains_sq, &alloc, &self.cfg.budget);
        Ok(SchemeResult::new(rates, aided, gains))
    }

    pub fn evaluate(&self, scheme: Scheme) -> Result<SchemeResult> {
        match scheme {
            Scheme::TdmaNoIrs => self.tdma(false),
            Scheme::FdmaNoIrs => self.fdma(false),
            Scheme::NomaNoIrs => self.noma(false),
            Scheme::TdmaIrs => self.tdma(true),
            Scheme::FdmaIrs => self.fdma(true),
            Scheme::NomaIrs => self.noma(true),
        }
    }
}

fn first_extreme(v: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if better(x, v[best]) {
            best = i;
        }
    }
    best
}

/// Aided-user index for `policy`; runs AO when the policy needs it.
pub fn select_aided_user(channels: &ChannelSet, cfg: &SchemeConfig) -> Result<usize> {
    DropEvaluator::new(channels, *cfg).aided_user()
}

pub fn tdma_sum_rate(channels: &ChannelSet, cfg: &SchemeConfig, with_irs: bool) -> Result<SchemeResult> {
    DropEvaluator::new(channels, *cfg).tdma(with_irs)
}

pub fn fdma_sum_rate(channels: &ChannelSet, cfg: &SchemeConfig, with_irs: bool) -> Result<SchemeResult> {
    DropEvaluator::new(channels, *cfg).fdma(with_irs)
}

pub fn noma_sum_rate(channels: &ChannelSet, cfg: &SchemeConfig, with_irs: bool) -> Result<SchemeResult> {
    DropEvaluator::new(channels, *cfg).noma(with_irs)
}
