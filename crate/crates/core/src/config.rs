//! Flat `key = value` configuration files.
//!
//! One entry per line, `#` starts a comment, blank lines are ignored. Every
//! key is optional; missing keys keep the reference-scenario defaults of
//! [`SimConfig::default`]. [`render_config`] writes every key back out, and
//! parsing its output reproduces the same configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::channel::{BsIrsGain, Point};
use crate::montecarlo::SimConfig;
use crate::{Error, Result};

/// Every accepted key, in rendering order.
pub const KEYS: &[&str] = &[
    "users",
    "reflectors",
    "bs_antennas",
    "pd_watts",
    "bandwidth_hz",
    "temperature_k",
    "noise_figure_db",
    "drops",
    "ao_iterations",
    "ao_tolerance",
    "seed",
    "schemes",
    "aided_user_policy",
    "power_policy",
    "bs_x_m",
    "bs_y_m",
    "irs_x_m",
    "irs_y_m",
    "center_x_m",
    "center_y_m",
    "center_side_m",
    "edge_x_m",
    "edge_y_m",
    "edge_side_m",
    "p0_db",
    "x0_km",
    "x1_km",
    "shadowing_db",
    "l0_db",
    "pathloss_exponent",
    "rician_factor",
    "bs_irs_gain",
    "los_bs_angle_rad",
    "los_irs_angle_rad",
];

fn num<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("cannot parse `{value}` as a number"))
}

fn opt_num(value: &str, none_word: &str) -> std::result::Result<Option<f64>, String> {
    if value == none_word {
        Ok(None)
    } else {
        num(value).map(Some)
    }
}

fn set_point_x(p: &mut Point, v: &str) -> std::result::Result<(), String> {
    p.x = num(v)?;
    Ok(())
}

fn set_point_y(p: &mut Point, v: &str) -> std::result::Result<(), String> {
    p.y = num(v)?;
    Ok(())
}

/// Assign one key. Invariants spanning several keys are checked later by
/// [`SimConfig::check`].
pub fn set_key(cfg: &mut SimConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    let geo = &mut cfg.geometry;
    match key {
        "users" => cfg.users = num(value)?,
        "reflectors" => cfg.reflectors = num(value)?,
        "bs_antennas" => cfg.bs_antennas = num(value)?,
        "pd_watts" => cfg.pd_watts = num(value)?,
        "bandwidth_hz" => cfg.bandwidth_hz = num(value)?,
        "temperature_k" => cfg.temperature_k = num(value)?,
        "noise_figure_db" => cfg.noise_figure_db = num(value)?,
        "drops" => cfg.drops = num(value)?,
        "ao_iterations" => cfg.ao_iterations = num(value)?,
        "ao_tolerance" => cfg.ao_tolerance = opt_num(value, "none")?,
        "seed" => cfg.seed = num(value)?,
        "schemes" => {
            cfg.schemes = value
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()?
        }
        "aided_user_policy" => cfg.aided_user = value.parse()?,
        "power_policy" => cfg.power = value.parse()?,
        "bs_x_m" => set_point_x(&mut geo.bs_position, value)?,
        "bs_y_m" => set_point_y(&mut geo.bs_position, value)?,
        "irs_x_m" => set_point_x(&mut geo.irs_position, value)?,
        "irs_y_m" => set_point_y(&mut geo.irs_position, value)?,
        "center_x_m" => set_point_x(&mut geo.center_area.corner, value)?,
        "center_y_m" => set_point_y(&mut geo.center_area.corner, value)?,
        "center_side_m" => geo.center_area.side = num(value)?,
        "edge_x_m" => set_point_x(&mut geo.edge_area.corner, value)?,
        "edge_y_m" => set_point_y(&mut geo.edge_area.corner, value)?,
        "edge_side_m" => geo.edge_area.side = num(value)?,
        "p0_db" => cfg.pathloss.p0_db = num(value)?,
        "x0_km" => cfg.pathloss.x0_km = num(value)?,
        "x1_km" => cfg.pathloss.x1_km = num(value)?,
        "shadowing_db" => cfg.pathloss.sigma_sd_db = num(value)?,
        "l0_db" => cfg.bs_irs.l0_db = num(value)?,
        "pathloss_exponent" => cfg.bs_irs.alpha = num(value)?,
        "rician_factor" => cfg.bs_irs.rician_factor = num(value)?,
        "bs_irs_gain" => {
            cfg.bs_irs.gain = match value {
                "free_space" => BsIrsGain::FreeSpace,
                v => BsIrsGain::Fixed { gain_db: num(v).map_err(|_| {
                    format!("expected `free_space` or a gain in dB, got `{v}`")
                })? },
            }
        }
        "los_bs_angle_rad" => cfg.los_bs_angle = opt_num(value, "auto")?,
        "los_irs_angle_rad" => cfg.los_irs_angle = opt_num(value, "auto")?,
        _ => return Err("unknown key".into()),
    }
    Ok(())
}

/// Parse configuration text, apply defaults and validate.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut cfg = SimConfig::default();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config {
                line: Some(line),
                key: content.to_string(),
                message: "expected `key = value`".into(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let fail = |message: String| Error::Config { line: Some(line), key: key.to_string(), message };
        if let Some(prev) = seen.insert(key.to_string(), line) {
            return Err(fail(format!("already set on line {prev}")));
        }
        set_key(&mut cfg, key, value).map_err(fail)?;
    }
    cfg.check().map_err(|(key, message)| Error::Config {
        line: seen.get(key).copied(),
        key: key.to_string(),
        message,
    })?;
    Ok(cfg)
}

/// Apply `key=value` overrides on top of a parsed configuration.
pub fn apply_overrides<'a>(
    mut cfg: SimConfig,
    overrides: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<SimConfig> {
    for (key, value) in overrides {
        set_key(&mut cfg, key.trim(), value.trim()).map_err(|message| Error::Config {
            line: None,
            key: key.trim().to_string(),
            message,
        })?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Every key with its effective value, in [`KEYS`] order.
pub fn config_entries(cfg: &SimConfig) -> Vec<(&'static str, String)> {
    let geo = &cfg.geometry;
    let opt = |v: Option<f64>, none: &str| v.map_or_else(|| none.to_string(), |x| x.to_string());
    let schemes: Vec<_> = cfg.schemes.iter().map(|s| s.name()).collect();
    let values = [
        cfg.users.to_string(),
        cfg.reflectors.to_string(),
        cfg.bs_antennas.to_string(),
        cfg.pd_watts.to_string(),
        cfg.bandwidth_hz.to_string(),
        cfg.temperature_k.to_string(),
        cfg.noise_figure_db.to_string(),
        cfg.drops.to_string(),
        cfg.ao_iterations.to_string(),
        opt(cfg.ao_tolerance, "none"),
        cfg.seed.to_string(),
        schemes.join(","),
        cfg.aided_user.to_string(),
        cfg.power.to_string(),
        geo.bs_position.x.to_string(),
        geo.bs_position.y.to_string(),
        geo.irs_position.x.to_string(),
        geo.irs_position.y.to_string(),
        geo.center_area.corner.x.to_string(),
        geo.center_area.corner.y.to_string(),
        geo.center_area.side.to_string(),
        geo.edge_area.corner.x.to_string(),
        geo.edge_area.corner.y.to_string(),
        geo.edge_area.side.to_string(),
        cfg.pathloss.p0_db.to_string(),
        cfg.pathloss.x0_km.to_string(),
        cfg.pathloss.x1_km.to_string(),
        cfg.pathloss.sigma_sd_db.to_string(),
        cfg.bs_irs.l0_db.to_string(),
        cfg.bs_irs.alpha.to_string(),
        cfg.bs_irs.rician_factor.to_string(),
        match cfg.bs_irs.gain {
            BsIrsGain::FreeSpace => "free_space".to_string(),
            BsIrsGain::Fixed { gain_db } => gain_db.to_string(),
        },
        opt(cfg.los_bs_angle, "auto"),
        opt(cfg.los_irs_angle, "auto"),
    ];
    KEYS.iter().copied().zip(values).collect()
}

/// Render a configuration as text accepted by [`parse_config`].
pub fn render_config(cfg: &SimConfig) -> String {
    let mut out = String::new();
    for (k, v) in config_entries(cfg) {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{AidedUserPolicy, PowerPolicy};
    use proptest::prelude::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, SimConfig::default());
        assert_eq!(cfg.users, 2);
        assert_eq!(cfg.drops, 10_000);
        assert_eq!(cfg.reflectors, 200);
        assert_eq!(cfg.bs_antennas, 16);
        assert_eq!(cfg.ao_iterations, 3);
        assert_eq!(cfg.bs_irs.rician_factor, 5.0);
        assert_eq!(cfg.pathloss.x0_km, 0.01);
        assert_eq!(cfg.pathloss.x1_km, 0.05);
    }

    #[test]
    fn zero_users_names_the_invariant() {
        let err = parse_config("users = 0").unwrap_err();
        let msg = err.to_string();
        assert!(err.is_config());
        assert!(msg.contains("users") && msg.contains("K >= 1") && msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn comments_are_ignored() {
        let cfg = parse_config("reflectors = 200\n# comment\n\ndrops = 7 # trailing\n").unwrap();
        assert_eq!(cfg.reflectors, 200);
        assert_eq!(cfg.drops, 7);
    }

    #[test]
    fn errors_name_key_and_line() {
        let err = parse_config("users = 2\nbogus = 1").unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("bogus"), "{err}");
        let err = parse_config("\ndrops = many").unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("drops"), "{err}");
        let err = parse_config("users 3").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
        assert!(parse_config("users = 2\nusers = 3").is_err());
        assert!(parse_config("schemes = tdma_irs,ofdma").is_err());
    }

    #[test]
    fn overrides_apply_after_file() {
        let cfg = parse_config("users = 4").unwrap();
        let cfg = apply_overrides(cfg, [("users", "16"), ("bs_irs_gain", "free_space")]).unwrap();
        assert_eq!(cfg.users, 16);
        assert_eq!(cfg.bs_irs.gain, BsIrsGain::FreeSpace);
        assert!(apply_overrides(cfg.clone(), [("users", "0")]).is_err());
        assert!(apply_overrides(cfg, [("nope", "1")]).is_err());
    }

    #[test]
    fn render_round_trips_defaults() {
        let cfg = SimConfig::default();
        assert_eq!(parse_config(&render_config(&cfg)).unwrap(), cfg);
        assert_eq!(config_entries(&cfg).len(), KEYS.len());
    }

    prop_compose! {
        fn arb_config()(
            users in 1usize..20,
            reflectors in 0usize..300,
            nb in 1usize..64,
            pd in 1e-3f64..100.0,
            nf in -3.0f64..20.0,
            drops in 1usize..100_000,
            seed in any::<u64>(),
            tol in proptest::option::of(0.0f64..1e-3),
            irs_x in -1e3f64..1e3,
            x0 in 1e-3f64..0.05,
            gain in proptest::option::of(-90.0f64..30.0),
            angle in proptest::option::of(-3.2f64..3.2),
            rank in any::<bool>(),
        ) -> SimConfig {
            let mut cfg = SimConfig {
                users, reflectors, bs_antennas: nb, pd_watts: pd, noise_figure_db: nf,
                drops, seed, ao_tolerance: tol, los_bs_angle: angle,
                aided_user: if rank { AidedUserPolicy::Fixed(users - 1) } else { AidedUserPolicy::NearestIrs },
                power: if rank { PowerPolicy::RankProportional } else { PowerPolicy::InverseGain },
                ..SimConfig::default()
            };
            cfg.geometry.irs_position.x = irs_x;
            cfg.pathloss.x0_km = x0;
            cfg.bs_irs.gain = gain.map_or(BsIrsGain::FreeSpace, |gain_db| BsIrsGain::Fixed { gain_db });
            cfg
        }
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(cfg in arb_config()) {
            prop_assert_eq!(parse_config(&render_config(&cfg)).unwrap(), cfg);
        }
    }
}
