//! Acceptance gate: every criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

use std::f64::consts::TAU;
use std::process::ExitCode;

use irsma::bundle::Summary;
use irsma::channel::{
    cost_hata_path_loss, draw_rayleigh_vector, draw_rician_matrix, los_matrix, PathLossParams,
};
use irsma::montecarlo::{
    drop_realization, noise_variance, run_campaign, run_campaign_with_workers, CampaignResult,
    SimConfig,
};
use irsma::reflect::{
    alternating_optimize, alternating_optimize_with, effective_gain, mrt_combined, mrt_direct,
    optimal_phases, AoSettings, PhaseProfile,
};
use irsma::schemes::{
    allocate_noma_power, noma_rates, sic_order, LinkBudget, PowerAllocation,
    PowerPolicy, Scheme,
};
use irsma::{CMat, CVec};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DROPS: usize = 500;
const SEED: u64 = 1;

/// Reference values (bps/Hz): (scheme, 95%-likely, 50%-likely).
const REFERENCE: [(Scheme, f64, f64); 5] = [
    (Scheme::TdmaNoIrs, 4.26, 7.57),
    (Scheme::NomaNoIrs, 5.28, 9.74),
    (Scheme::FdmaIrs, 18.83, 22.38),
    (Scheme::TdmaIrs, 22.18, 25.82),
    (Scheme::NomaIrs, 23.67, 28.92),
];

/// Best to worst.
const ORDER: [Scheme; 5] = [
    Scheme::NomaIrs,
    Scheme::TdmaIrs,
    Scheme::FdmaIrs,
    Scheme::NomaNoIrs,
    Scheme::TdmaNoIrs,
];

type Outcome = Result<String, String>;

fn reference_config(users: usize) -> SimConfig {
    SimConfig {
        users,
        drops: DROPS,
        seed: SEED,
        schemes: Scheme::ALL.to_vec(),
        ..SimConfig::default()
    }
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target
}

fn c1_medians(r: &CampaignResult) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (s, _, med) in REFERENCE {
        let got = r.summary(s).unwrap().likely50;
        ok &= within(got, med, 0.25);
        detail.push(format!("{s} {got:.2}/{med}"));
    }
    let fdma = r.summary(Scheme::FdmaNoIrs).unwrap().likely50;
    ok &= within(fdma, 7.57, 0.25);
    detail.push(format!("fdma_noirs {fdma:.2}/7.57"));
    verdict(ok, detail.join(", "))
}

fn c2_likely95(r: &CampaignResult) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (s, p95, _) in REFERENCE {
        let got = r.summary(s).unwrap().likely95;
        ok &= within(got, p95, 0.30);
        detail.push(format!("{s} {got:.2}/{p95}"));
    }
    verdict(ok, detail.join(", "))
}

fn ordering(r: &CampaignResult) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, pick) in [("95%", 0usize), ("50%", 1)] {
        let vals: Vec<f64> = ORDER
            .iter()
            .map(|&s| {
                let sm = r.summary(s).unwrap();
                if pick == 0 { sm.likely95 } else { sm.likely50 }
            })
            .collect();
        ok &= vals.windows(2).all(|w| w[0] > w[1]);
        let shown: Vec<_> = vals.iter().map(|v| format!("{v:.2}")).collect();
        detail.push(format!("{label}: {}", shown.join(" > ")));
    }
    verdict(ok, detail.join("; "))
}

fn c4_irs_gain(r: &CampaignResult) -> Outcome {
    let irs = r.summary(Scheme::FdmaIrs).unwrap().likely50;
    let plain = r.summary(Scheme::FdmaNoIrs).unwrap().likely50;
    verdict(irs >= 2.5 * plain, format!("ratio {:.2}", irs / plain))
}

fn c6_c7_ao_properties(cfg: &SimConfig, r: &CampaignResult) -> (Outcome, Outcome) {
    let mut worst_trace = f64::INFINITY;
    let mut worst_bound = f64::INFINITY;
    let mut worst_triangle: f64 = 0.0;
    let mut mismatch = 0usize;
    for d in &r.drops {
        let (_, ch) = drop_realization(cfg, d.drop_index, d.resamples).unwrap();
        for k in 0..ch.users() {
            let (g, h, f) = (&ch.g[k], &ch.h_mat, &ch.f[k]);
            let sol = alternating_optimize(g, h, f, cfg.ao_iterations).unwrap();
            let t = &sol.trace.objective_per_iteration;
            for w in t.windows(2) {
                worst_trace = worst_trace.min(w[1] / w[0] - 1.0);
            }
            let fnorm = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            worst_bound = worst_bound.min(sol.trace.last().unwrap() / fnorm - 1.0);

            // Replay the iterations and check the alignment after each phase step.
            let mut w = mrt_direct(f).unwrap();
            let zero = CVec::zeros(f.len());
            let mut theta = PhaseProfile::zeros(g.len());
            for _ in 0..cfg.ao_iterations {
                theta = optimal_phases(g, h, &w, f).unwrap();
                let cascade = effective_gain(g, &theta, h, &zero, &w).unwrap().norm();
                let direct: Complex64 = f.iter().zip(w.weights()).map(|(a, b)| a * b).sum();
                let total = effective_gain(g, &theta, h, f, &w).unwrap().norm();
                worst_triangle = worst_triangle.max(((cascade + direct.norm()) - total).abs() / total);
                w = mrt_combined(g, &theta, h, f).unwrap();
            }
            if theta != sol.theta {
                mismatch += 1;
            }
        }
    }
    let c6 = verdict(
        worst_trace >= -1e-12 && worst_bound >= 0.0 && mismatch == 0,
        format!("min step {worst_trace:.3e}, min (obj/|f| - 1) {worst_bound:.3e}"),
    );
    let c7 = verdict(worst_triangle <= 1e-9, format!("max rel gap {worst_triangle:.3e}"));
    (c6, c7)
}

fn c8_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let levels = 64;
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let mut cn = || Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let g: CVec = Array1::from_shape_fn(2, |_| cn());
        let h: CMat = Array2::from_shape_fn((2, 2), |_| cn());
        let f: CVec = Array1::from_shape_fn(2, |_| cn());
        // Exhaustive grid: for fixed phases MRT attains the combined-channel norm.
        let mut best: f64 = 0.0;
        for a in 0..levels {
            for b in 0..levels {
                let q = [
                    Complex64::from_polar(1.0, TAU * a as f64 / levels as f64),
                    Complex64::from_polar(1.0, TAU * b as f64 / levels as f64),
                ];
                let norm = (0..2)
                    .map(|col| (g[0] * q[0] * h[(0, col)] + g[1] * q[1] * h[(1, col)] + f[col]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                best = best.max(norm);
            }
        }
        let sol = alternating_optimize_with(&g, &h, &f, &AoSettings { iterations: 200, tolerance: Some(1e-12) }).unwrap();
        worst = worst.min(sol.trace.last().unwrap() / best);
    }
    verdict(worst >= 1.0 - 1e-3, format!("min AO/grid {worst:.6}"))
}

fn c9_baseline_identity(r: &CampaignResult) -> Outcome {
    let bad = r
        .drops
        .iter()
        .filter(|d| d.get(Scheme::TdmaNoIrs).unwrap().sum_rate != d.get(Scheme::FdmaNoIrs).unwrap().sum_rate)
        .count();
    verdict(bad == 0, format!("{bad} of {} drops differ", r.drops.len()))
}

fn c10_aided_user(r: &CampaignResult) -> Outcome {
    let mut bad = 0;
    for d in &r.drops {
        let tdma = d.get(Scheme::TdmaIrs).unwrap();
        let fdma = d.get(Scheme::FdmaIrs).unwrap();
        let noma = d.get(Scheme::NomaIrs).unwrap();
        let k = fdma.aided_user.unwrap();
        if noma.aided_user != Some(k) || fdma.gains[k] != tdma.gains[k] || noma.gains[k] != tdma.gains[k] {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("{bad} of {} drops differ", r.drops.len()))
}

fn c11_noma(cfg: &SimConfig, r: &CampaignResult) -> Outcome {
    let budget = LinkBudget { pd_watts: cfg.pd_watts, noise_w: cfg.noise_w().unwrap() };
    let mut bad = Vec::new();
    for d in &r.drops {
        for s in [Scheme::NomaNoIrs, Scheme::NomaIrs] {
            let res = d.get(s).unwrap();
            let gsq: Vec<f64> = res.gains.iter().map(|g| g * g).collect();
            let alloc = allocate_noma_power(&gsq, cfg.power).unwrap();
            let sum: f64 = alloc.alphas.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                bad.push(format!("drop {} alpha sum {sum}", d.drop_index));
            }
            let order = sic_order(&gsq).order;
            for w in order.windows(2) {
                if gsq[w[0]] > gsq[w[1]] && alloc.alphas[w[0]] >= alloc.alphas[w[1]] {
                    bad.push(format!("drop {} alpha not inverse to gain", d.drop_index));
                }
            }
            let top = order[0];
            let alone = (1.0 + gsq[top] * alloc.alphas[top] * budget.pd_watts / budget.noise_w).log2();
            if res.per_user_rate[top] != alone {
                bad.push(format!("drop {} strongest user sees interference", d.drop_index));
            }
            let weakest = *order.last().unwrap();
            let others: f64 = order[..order.len() - 1].iter().map(|&u| alloc.alphas[u]).sum();
            let g = gsq[weakest];
            let expect = (1.0
                + g * alloc.alphas[weakest] * budget.pd_watts / (g * others * budget.pd_watts + budget.noise_w))
                .log2();
            if (res.per_user_rate[weakest] - expect).abs() > 1e-12 * expect.max(1.0) {
                bad.push(format!("drop {} weakest user interference", d.drop_index));
            }
        }
    }
    let rates = noma_rates(
        &[1.0, 0.25],
        &PowerAllocation { alphas: vec![0.2, 0.8] },
        &LinkBudget { pd_watts: 10.0, noise_w: 1.0 },
    );
    let sinr = [rates[0].exp2() - 1.0, rates[1].exp2() - 1.0];
    let hand_ok = (sinr[0] - 2.0).abs() < 1e-9
        && (sinr[1] - 4.0 / 3.0).abs() < 1e-9
        && (rates[0] + rates[1] - (3.0f64.log2() + (7.0f64 / 3.0).log2())).abs() < 1e-9;
    if !hand_ok {
        bad.push(format!("hand example gave {rates:?}"));
    }
    let sum = rates[0] + rates[1];
    // inverse-gain split reproduces the hand example's coefficients
    let inv = allocate_noma_power(&[1.0, 0.25], PowerPolicy::InverseGain).unwrap();
    if (inv.alphas[0] - 0.2).abs() > 1e-12 {
        bad.push("inverse-gain split".into());
    }
    verdict(bad.is_empty(), if bad.is_empty() { format!("hand example sum {sum:.6}") } else { bad[..bad.len().min(3)].join("; ") })
}

fn c12_pathloss_noise() -> Outcome {
    let p = PathLossParams::default();
    let mut jump: f64 = 0.0;
    for x in [p.x0_km, p.x1_km] {
        let at = cost_hata_path_loss(x, &p).unwrap();
        let above = cost_hata_path_loss(x * (1.0 + 1e-15), &p).unwrap();
        jump = jump.max((at - above).abs());
    }
    let n = noise_variance(20e6, 290.0, 9.0).unwrap();
    let rel = (n - 6.360e-13).abs() / 6.360e-13;
    verdict(jump < 1e-9 && rel <= 1e-3, format!("max jump {jump:.2e} dB, noise {n:.4e} W"))
}

fn c13_determinism(cfg: &SimConfig) -> Outcome {
    let json = |workers| Summary::from_campaign(&run_campaign_with_workers(cfg, workers).unwrap()).to_json();
    let one_a = json(1);
    let one_b = json(1);
    let many_a = json(4);
    let many_b = json(8);
    let global = Summary::from_campaign(&run_campaign(cfg).unwrap()).to_json();
    verdict(
        one_a == one_b && one_a == many_a && many_a == many_b && many_a == global,
        format!("{} bytes", one_a.len()),
    )
}

fn c14_statistics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (n, nb) = (200, 16);
    let los = los_matrix(n, nb, -0.75 * std::f64::consts::PI, 0.25 * std::f64::consts::PI);
    let sigma_h2 = 3.2e-3;
    let mut acc = 0.0;
    let mut count = 0usize;
    while count < 100_000 {
        let h = draw_rician_matrix(&mut rng, n, nb, sigma_h2, 5.0, &los).unwrap();
        acc += h.iter().map(|z| z.norm_sqr()).sum::<f64>();
        count += h.len();
    }
    let h_rel = acc / count as f64 / sigma_h2 - 1.0;
    let v = draw_rayleigh_vector(&mut rng, 100_000, 2.0);
    let r_rel = v.iter().map(|z| z.norm_sqr()).sum::<f64>() / v.len() as f64 / 2.0 - 1.0;
    verdict(h_rel.abs() < 0.02 && r_rel.abs() < 0.02, format!("H {h_rel:+.4}, Rayleigh {r_rel:+.4}"))
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok { Ok(detail) } else { Err(detail) }
}

fn main() -> ExitCode {
    let cfg2 = reference_config(2);
    let r2 = run_campaign(&cfg2).expect("K = 2 campaign");
    let cfg16 = reference_config(16);
    let r16 = run_campaign(&cfg16).expect("K = 16 campaign");
    let (c6, c7) = c6_c7_ao_properties(&cfg2, &r2);

    let results: Vec<(&str, Outcome)> = vec![
        ("1  median sum rates within 25%", c1_medians(&r2)),
        ("2  95%-likely sum rates within 30%", c2_likely95(&r2)),
        ("3  strict scheme ordering (K = 2)", ordering(&r2)),
        ("4  FDMA-IRS median >= 2.5x FDMA", c4_irs_gain(&r2)),
        ("5  K = 16 ordering", ordering(&r16)),
        ("6  AO trace monotone, >= |f_k|", c6),
        ("7  triangle equality after phase steps", c7),
        ("8  AO vs 64-level grid oracle", c8_oracle()),
        ("9  no-IRS FDMA == TDMA", c9_baseline_identity(&r2)),
        ("10 aided-user gain consistency", c10_aided_user(&r2)),
        ("11 NOMA power and SIC", c11_noma(&cfg2, &r2)),
        ("12 path-loss continuity, noise power", c12_pathloss_noise()),
        ("13 byte-identical summaries", c13_determinism(&cfg2)),
        ("14 channel second moments", c14_statistics()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(d) => println!("PASS  {name:<40} {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name:<40} {d}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
