//! Campaign orchestration.
//!
//! Each drop owns a ChaCha8 stream seeded from `(seed, drop_index)`, places
//! users, draws one channel realization and evaluates every requested scheme
//! on it. Drops fan out over rayon and are gathered in index order, so the
//! result does not depend on the worker count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{realize_drop, BsIrsLinkParams, ChannelSet, Geometry, PathLossParams, Point};
use crate::reflect::AoSettings;
use crate::schemes::{
    AidedUserPolicy, DropEvaluator, LinkBudget, PowerPolicy, Scheme, SchemeConfig, SchemeResult,
};
use crate::{Error, Result};

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Attempts per drop before a degenerate realization becomes an error.
const MAX_ATTEMPTS: u64 = 8;

/// Full simulation configuration. `Default` is the two-user reference
/// scenario with 10 000 drops.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// K
    pub users: usize,
    /// N
    pub reflectors: usize,
    /// N_b
    pub bs_antennas: usize,
    pub pd_watts: f64,
    pub bandwidth_hz: f64,
    pub temperature_k: f64,
    pub noise_figure_db: f64,
    pub drops: usize,
    pub ao_iterations: usize,
    pub ao_tolerance: Option<f64>,
    pub seed: u64,
    pub geometry: Geometry,
    pub pathloss: PathLossParams,
    pub bs_irs: BsIrsLinkParams,
    /// LOS departure angle at the BS; derived from the geometry when `None`.
    pub los_bs_angle: Option<f64>,
    /// LOS arrival angle at the IRS; derived from the geometry when `None`.
    pub los_irs_angle: Option<f64>,
    pub aided_user: AidedUserPolicy,
    pub power: PowerPolicy,
    pub schemes: Vec<Scheme>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            users: 2,
            reflectors: 200,
            bs_antennas: 16,
            pd_watts: 20.0,
            bandwidth_hz: 20e6,
            temperature_k: 290.0,
            noise_figure_db: 9.0,
            drops: 10_000,
            ao_iterations: 3,
            ao_tolerance: None,
            seed: 1,
            geometry: Geometry::default(),
            pathloss: PathLossParams::default(),
            bs_irs: BsIrsLinkParams::default(),
            los_bs_angle: None,
            los_irs_angle: None,
            aided_user: AidedUserPolicy::default(),
            power: PowerPolicy::default(),
            schemes: Scheme::COMPARISON.to_vec(),
        }
    }
}

impl SimConfig {
    /// Check invariants, reporting the offending config key.
    pub fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        let positive = |key: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err((key, format!("must be positive, got {v}")))
            }
        };
        if self.users < 1 {
            return Err(("users", "K >= 1 required".into()));
        }
        if self.bs_antennas < 1 {
            return Err(("bs_antennas", "N_b >= 1 required".into()));
        }
        if self.drops < 1 {
            return Err(("drops", "at least one drop required".into()));
        }
        if self.ao_iterations < 1 {
            return Err(("ao_iterations", "at least one iteration required".into()));
        }
        if let Some(t) = self.ao_tolerance {
            if !(t >= 0.0) {
                return Err(("ao_tolerance", format!("must be non-negative, got {t}")));
            }
        }
        positive("pd_watts", self.pd_watts)?;
        positive("bandwidth_hz", self.bandwidth_hz)?;
        positive("temperature_k", self.temperature_k)?;
        if !self.noise_figure_db.is_finite() {
            return Err(("noise_figure_db", "must be finite".into()));
        }
        if self.schemes.is_empty() {
            return Err(("schemes", "at least one scheme required".into()));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(("schemes", format!("`{s}` listed twice")));
            }
        }
        if let AidedUserPolicy::Fixed(k) = self.aided_user {
            if k >= self.users {
                return Err(("aided_user_policy", format!("user {k} out of range for K = {}", self.users)));
            }
        }
        if let PowerPolicy::FixedSplit { .. } = self.power {
            if self.users > 2 {
                return Err(("power_policy", "fixed_split supports at most two users".into()));
            }
        }
        self.geometry.validate().map_err(|e| ("geometry", e.to_string()))?;
        self.pathloss.validate().map_err(|e| ("x0_km", e.to_string()))?;
        self.bs_irs.validate().map_err(|e| ("bs_irs_gain", e.to_string()))?;
        for (key, a) in [("los_bs_angle_rad", self.los_bs_angle), ("los_irs_angle_rad", self.los_irs_angle)] {
            if a.is_some_and(|a| !a.is_finite()) {
                return Err((key, "must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check().map_err(|(key, message)| Error::Config {
            line: None,
            key: key.into(),
            message,
        })
    }

    /// `(BS departure, IRS arrival)` angles of the LOS path.
    pub fn los_angles(&self) -> (f64, f64) {
        let (bs, irs) = self.geometry.los_angles();
        (self.los_bs_angle.unwrap_or(bs), self.los_irs_angle.unwrap_or(irs))
    }

    pub fn noise_w(&self) -> Result<f64> {
        noise_variance(self.bandwidth_hz, self.temperature_k, self.noise_figure_db)
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig> {
        Ok(SchemeConfig {
            budget: LinkBudget { pd_watts: self.pd_watts, noise_w: self.noise_w()? },
            ao: AoSettings { iterations: self.ao_iterations, tolerance: self.ao_tolerance },
            aided_user: self.aided_user,
            power: self.power,
        })
    }
}

/// Thermal noise power `κ B T N_f` in watts, with the noise figure in dB.
pub fn noise_variance(bw_hz: f64, t0_kelvin: f64, nf_db: f64) -> Result<f64> {
    if !(bw_hz > 0.0) || !(t0_kelvin > 0.0) || !nf_db.is_finite() {
        return Err(Error::domain("bandwidth and temperature must be positive"));
    }
    Ok(BOLTZMANN * bw_hz * t0_kelvin * 10f64.powf(nf_db / 10.0))
}

/// `⌈k/2⌉` users uniform in the center square, then `⌊k/2⌋` in the edge
/// square.
pub fn place_users<R: Rng + ?Sized>(rng: &mut R, geometry: &Geometry, k: usize) -> Vec<Point> {
    let center = k.div_ceil(2);
    (0..k)
        .map(|i| {
            let area = if i < center { &geometry.center_area } else { &geometry.edge_area };
            area.sample(rng)
        })
        .collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of drop `drop_index` under campaign seed `base_seed`.
pub fn drop_seed(base_seed: u64, drop_index: usize) -> u64 {
    splitmix64(base_seed ^ splitmix64(drop_index as u64))
}

fn drop_rng(base_seed: u64, drop_index: usize, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(drop_seed(base_seed, drop_index));
    rng.set_stream(attempt);
    rng
}

/// User positions and channels of one drop attempt.
pub fn drop_realization(cfg: &SimConfig, drop_index: usize, attempt: u64) -> Result<(Vec<Point>, ChannelSet)> {
    let mut rng = drop_rng(cfg.seed, drop_index, attempt);
    let users = place_users(&mut rng, &cfg.geometry, cfg.users);
    let channels = realize_drop(&mut rng, cfg, &users)?;
    Ok((users, channels))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropResult {
    pub drop_index: usize,
    /// Number of degenerate attempts that were redrawn (0 normally).
    pub resamples: u64,
    pub results: Vec<(Scheme, SchemeResult)>,
}

impl DropResult {
    pub fn get(&self, scheme: Scheme) -> Option<&SchemeResult> {
        self.results.iter().find(|(s, _)| *s == scheme).map(|(_, r)| r)
    }
}

/// Evaluate every configured scheme on drop `drop_index`.
pub fn run_drop(drop_index: usize, cfg: &SimConfig) -> Result<DropResult> {
    let scheme_cfg = cfg.scheme_config()?;
    let mut last_err = None;
    for attempt in 0..MAX_ATTEMPTS {
        let outcome = drop_realization(cfg, drop_index, attempt).and_then(|(_, channels)| {
            let ev = DropEvaluator::new(&channels, scheme_cfg);
            cfg.schemes
                .iter()
                .map(|&s| Ok((s, ev.evaluate(s)?)))
                .collect::<Result<Vec<_>>>()
        });
        match outcome {
            Ok(results) => {
                return Ok(DropResult { drop_index, resamples: attempt, results });
            }
            Err(e @ Error::DegenerateChannel(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

/// One point of an empirical CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfPoint {
    pub rate: f64,
    pub cumulative_probability: f64,
}

/// Step CDF: the `i`-th smallest sample carries probability `i / n`.
pub fn empirical_cdf(samples: &[f64]) -> Result<Vec<CdfPoint>> {
    if samples.is_empty() {
        return Err(Error::domain("empirical CDF of an empty sample"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, rate)| CdfPoint {
            rate,
            cumulative_probability: (i + 1) as f64 / n,
        })
        .collect())
}

/// The `x%`-likely rate: the rate exceeded in at least `x`% of samples,
/// i.e. the nearest-rank `(100 - x)`-th percentile.
pub fn percentile_rate(samples: &[f64], likelihood_percent: f64) -> Result<f64> {
    if !(likelihood_percent > 0.0 && likelihood_percent < 100.0) {
        return Err(Error::domain(format!(
            "likelihood must lie strictly between 0 and 100, got {likelihood_percent}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::domain("percentile of an empty sample"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(nearest_rank(&sorted, 100.0 - likelihood_percent))
}

fn nearest_rank(sorted: &[f64], percentile: f64) -> f64 {
    let n = sorted.len();
    // The small offset keeps exact products such as 5 * 100 / 100 from
    // rounding up to the next rank.
    let rank = (percentile * n as f64 / 100.0 - 1e-9).ceil().max(1.0) as usize;
    sorted[rank.min(n) - 1]
}

/// Sorted samples and percentile summary of one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    /// Sum rates over all drops, ascending.
    pub samples: Vec<f64>,
    /// 95%-likely sum rate (5th percentile).
    pub likely95: f64,
    /// 50%-likely sum rate (median).
    pub likely50: f64,
    pub mean: f64,
}

impl SchemeSummary {
    fn from_samples(scheme: Scheme, mut samples: Vec<f64>) -> Self {
        samples.sort_by(f64::total_cmp);
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        Self {
            scheme,
            likely95: nearest_rank(&samples, 5.0),
            likely50: nearest_rank(&samples, 50.0),
            mean,
            samples,
        }
    }

    pub fn cdf(&self) -> Vec<CdfPoint> {
        empirical_cdf(&self.samples).expect("summaries are never empty")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub config: SimConfig,
    /// Per-drop results in drop order.
    pub drops: Vec<DropResult>,
    /// One summary per configured scheme, in configuration order.
    pub schemes: Vec<SchemeSummary>,
    /// Drops that needed at least one redraw.
    pub resampled_drops: usize,
}

impl CampaignResult {
    pub fn summary(&self, scheme: Scheme) -> Option<&SchemeSummary> {
        self.schemes.iter().find(|s| s.scheme == scheme)
    }
}

/// Run all drops on the rayon global pool.
pub fn run_campaign(cfg: &SimConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    let drops = (0..cfg.drops)
        .into_par_iter()
        .map(|i| run_drop(i, cfg))
        .collect::<Result<Vec<_>>>()?;
    aggregate(cfg, drops)
}

/// Run all drops on a dedicated pool of `workers` threads (`1` runs
/// sequentially on the caller's thread).
pub fn run_campaign_with_workers(cfg: &SimConfig, workers: usize) -> Result<CampaignResult> {
    if workers <= 1 {
        cfg.validate()?;
        let drops = (0..cfg.drops)
            .map(|i| run_drop(i, cfg))
            .collect::<Result<Vec<_>>>()?;
        return aggregate(cfg, drops);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::domain(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| run_campaign(cfg))
}

fn aggregate(cfg: &SimConfig, drops: Vec<DropResult>) -> Result<CampaignResult> {
    let resampled_drops = drops.iter().filter(|d| d.resamples > 0).count();
    let limit = cfg.drops.div_ceil(1000);
    if resampled_drops > limit {
        return Err(Error::TooManyResamples { resampled: resampled_drops, drops: cfg.drops, limit });
    }
    let schemes = cfg
        .schemes
        .iter()
        .map(|&s| {
            let samples = drops
                .iter()
                .map(|d| d.get(s).expect("every drop evaluates every scheme").sum_rate)
                .collect();
            SchemeSummary::from_samples(s, samples)
        })
        .collect();
    Ok(CampaignResult { config: cfg.clone(), drops, schemes, resampled_drops })
}
