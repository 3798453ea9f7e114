//! Channel model for one network drop.
//!
//! User links (BS-UE and IRS-UE) see three-slope COST-Hata path loss,
//! independent log-normal shadowing and Rayleigh fading. The BS-IRS hop is
//! line-of-sight Rician with a rank-one ULA steering component.

mod fading;
mod pathloss;

pub use fading::{
    draw_rayleigh_vector, draw_rician_matrix, draw_shadowing, los_matrix, steering_vector,
};
pub use pathloss::{
    bs_irs_large_scale, cost_hata_path_loss, db_to_linear, large_scale_variance, BsIrsGain,
    BsIrsLinkParams, PathLossParams,
};

use rand::Rng;

use crate::montecarlo::SimConfig;
use crate::{CMat, CVec, Error, Result};

/// A point in the horizontal plane, metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned square given by its lower-left corner and side length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Square {
    pub corner: Point,
    pub side: f64,
}

impl Square {
    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.corner.x
            && p.x <= self.corner.x + self.side
            && p.y >= self.corner.y
            && p.y <= self.corner.y + self.side
    }

    /// Uniform point inside the square.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point::new(
            self.corner.x + self.side * rng.random::<f64>(),
            self.corner.y + self.side * rng.random::<f64>(),
        )
    }
}

/// Cell layout: BS and IRS positions and the two user areas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub bs_position: Point,
    pub irs_position: Point,
    pub center_area: Square,
    pub edge_area: Square,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            bs_position: Point::new(0.0, 0.0),
            irs_position: Point::new(375.0, 375.0),
            center_area: Square { corner: Point::new(0.0, 0.0), side: 300.0 },
            edge_area: Square { corner: Point::new(250.0, 250.0), side: 250.0 },
        }
    }
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.bs_position.x,
            self.bs_position.y,
            self.irs_position.x,
            self.irs_position.y,
            self.center_area.corner.x,
            self.center_area.corner.y,
            self.edge_area.corner.x,
            self.edge_area.corner.y,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::domain("geometry coordinates must be finite"));
        }
        for (name, sq) in [("center", self.center_area), ("edge", self.edge_area)] {
            if !(sq.side > 0.0 && sq.side.is_finite()) {
                return Err(Error::domain(format!("{name} area side must be positive")));
            }
        }
        Ok(())
    }

    /// Angles of the LOS path: (departure at the BS, arrival at the IRS),
    /// both measured from the x axis.
    pub fn los_angles(&self) -> (f64, f64) {
        let dx = self.irs_position.x - self.bs_position.x;
        let dy = self.irs_position.y - self.bs_position.y;
        (dy.atan2(dx), (-dy).atan2(-dx))
    }
}

/// One drop's channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Direct BS-UE channels, length `N_b` each.
    pub f: Vec<CVec>,
    /// IRS-UE channels, length `N` each.
    pub g: Vec<CVec>,
    /// BS-IRS channel, `N x N_b`; row `n` is `h_n^T`.
    pub h_mat: CMat,
    pub sigma_f2: Vec<f64>,
    pub sigma_g2: Vec<f64>,
    pub sigma_h2: f64,
    /// IRS-UE distances in metres.
    pub irs_distance_m: Vec<f64>,
}

impl ChannelSet {
    pub fn users(&self) -> usize {
        self.f.len()
    }

    pub fn reflectors(&self) -> usize {
        self.h_mat.nrows()
    }

    pub fn bs_antennas(&self) -> usize {
        self.h_mat.ncols()
    }
}

/// Draw the channels of one drop for users at `locations`.
///
/// Per user, in order: BS-UE shadowing, IRS-UE shadowing, `f_k`, `g_k`.
/// The BS-IRS matrix is drawn last.
pub fn realize_drop<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SimConfig,
    locations: &[Point],
) -> Result<ChannelSet> {
    let geo = &cfg.geometry;
    let k = locations.len();
    let mut out = ChannelSet {
        f: Vec::with_capacity(k),
        g: Vec::with_capacity(k),
        h_mat: CMat::zeros((0, 0)),
        sigma_f2: Vec::with_capacity(k),
        sigma_g2: Vec::with_capacity(k),
        sigma_h2: 0.0,
        irs_distance_m: Vec::with_capacity(k),
    };
    for p in locations {
        let d_bs = p.distance(&geo.bs_position);
        let d_irs = p.distance(&geo.irs_position);
        if d_bs == 0.0 || d_irs == 0.0 {
            return Err(Error::domain(format!(
                "user at ({}, {}) is collocated with the BS or the IRS",
                p.x, p.y
            )));
        }
        let pl_f = cost_hata_path_loss(d_bs / 1000.0, &cfg.pathloss)?;
        let pl_g = cost_hata_path_loss(d_irs / 1000.0, &cfg.pathloss)?;
        let s_f = draw_shadowing(rng, cfg.pathloss.sigma_sd_db);
        let s_g = draw_shadowing(rng, cfg.pathloss.sigma_sd_db);
        let sf2 = large_scale_variance(pl_f, s_f);
        let sg2 = large_scale_variance(pl_g, s_g);
        out.f.push(draw_rayleigh_vector(rng, cfg.bs_antennas, sf2));
        out.g.push(draw_rayleigh_vector(rng, cfg.reflectors, sg2));
        out.sigma_f2.push(sf2);
        out.sigma_g2.push(sg2);
        out.irs_distance_m.push(d_irs);
    }
    let (bs_angle, irs_angle) = cfg.los_angles();
    let los = los_matrix(cfg.reflectors, cfg.bs_antennas, irs_angle, bs_angle);
    let sigma_h2 = cfg
        .bs_irs
        .sigma_h2(geo.bs_position.distance(&geo.irs_position))?;
    out.h_mat = draw_rician_matrix(
        rng,
        cfg.reflectors,
        cfg.bs_antennas,
        sigma_h2,
        cfg.bs_irs.rician_factor,
        &los,
    )?;
    out.sigma_h2 = sigma_h2;
    Ok(out)
}
