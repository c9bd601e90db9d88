//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dtbf_core::channel::{link_budget, DriftModel, LinkBudgetParams, SnrPair};
use dtbf_core::channel::{propagate, Direction, LinkState};
use dtbf_core::designer::{
    design_overhead, min_radios, phase_error_variance, solve_p1, solve_p2, variance_target,
    DesignRequirement, DesignSolution, FixedParts, TePolicy,
};
use dtbf_core::estimators::{
    decode_feedback, feedback_variance, freq_estimate_oneshot, freq_variance_oneshot,
    kf_steady_state_variance, kf_update, phase_estimate, phase_variance, FreqMode, KalmanState,
};
use dtbf_core::gain_model::{
    gain_from_phases, gain_mean, gain_variance, gamma_approximation, gaussian_approximation,
};
use dtbf_core::math::{db_to_linear, ks_distance, linear_to_db, Moments};
use dtbf_core::protocol_sim::{emulate_trace, run_campaign, synthetic_trace, ScenarioConfig};
use dtbf_core::rng::stream;
use dtbf_core::waveform::{
    make_feedback_burst, make_phase_preamble, make_zc_preamble, WaveformConfig, ZcParams,
};
use rand::Rng;
use rand_distr::{Distribution, Normal};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

/// Sample variance and its standard error from the fourth central moment.
fn variance_with_se(xs: &[f64]) -> (f64, f64, f64, f64) {
    let m: Moments = xs.iter().copied().collect();
    let mean = m.mean();
    let n = xs.len() as f64;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let var = m.variance();
    (mean, m.std_err(), var, ((m4 - var * var) / n).sqrt())
}

fn gaussian_gains(n: usize, var_e: f64, trials: usize, seed: u64) -> Vec<f64> {
    let normal = Normal::new(0.0, var_e.sqrt()).unwrap();
    let mut rng = stream(seed, 0);
    let mut phases = vec![0.0; n];
    (0..trials)
        .map(|_| {
            for p in phases.iter_mut() {
                *p = normal.sample(&mut rng);
            }
            gain_from_phases(&phases).unwrap()
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_at = (0, 0.0);
    let mut seed = 1000;
    for n in [2usize, 5, 10, 30] {
        for s in [0.1f64, 0.25, 0.5, 0.75, 1.0] {
            seed += 1;
            let v = s * s;
            let g = gaussian_gains(n, v, 100_000, seed);
            let (mean, mean_se, var, var_se) = variance_with_se(&g);
            let z = ((mean - gain_mean(n, v)) / mean_se)
                .abs()
                .max(((var - gain_variance(n, v)) / var_se).abs());
            if z > worst {
                worst = z;
                worst_at = (n, s);
            }
        }
    }
    Outcome::new(
        worst < 4.0,
        format!(
            "gain mean/variance vs 1e5-draw Monte Carlo on 20 points; worst deviation {worst:.2} \
             stderr at N={}, sigma_e={} (limit 4)",
            worst_at.0, worst_at.1
        ),
    )
}

fn criterion_2() -> Outcome {
    let ks = |n: usize, s: f64, seed: u64| {
        let mut g = gaussian_gains(n, s * s, 100_000, seed);
        let gamma = gamma_approximation(n, s * s).unwrap();
        let gauss = gaussian_approximation(n, s * s).unwrap();
        let a = ks_distance(&mut g, |x| gamma.cdf(x));
        let b = ks_distance(&mut g, |x| gauss.cdf(x));
        (a, b)
    };
    let (small_gamma, _) = ks(2, 0.1, 2001);
    let (large_gamma, large_gauss) = ks(30, 1.0, 2002);
    let pass = small_gamma < 0.02 && large_gamma < 0.02 && large_gauss < 0.02;
    Outcome::new(
        pass,
        format!(
            "KS gamma(N=2, sigma_e=0.1) = {small_gamma:.4}; KS gamma(N=30, sigma_e=1) = \
             {large_gamma:.4}; KS gaussian(N=30, sigma_e=1) = {large_gauss:.4} (limit 0.02 each)"
        ),
    )
}

fn criterion_3() -> Outcome {
    let grid = [1e-3, 1e-2, 1e-1, 1.0, 10.0];
    let mut worst: f64 = 0.0;
    for &q in &grid {
        for &r in &grid {
            let mut s = KalmanState::from_first_measurement(0.0, q, r).unwrap();
            for _ in 0..1_000_000 {
                let next = kf_update(s, 0.0);
                let done = (next.p - s.p).abs() < 1e-16;
                s = next;
                if done {
                    break;
                }
            }
            worst = worst.max((s.p - kf_steady_state_variance(q, r).unwrap()).abs());
        }
    }
    let zero = kf_steady_state_variance(0.0, 2.0).unwrap();
    let big = kf_steady_state_variance(1e6 * 2.0, 2.0).unwrap() / 2.0 - 1.0;
    Outcome::new(
        worst < 1e-9 && zero == 0.0 && big.abs() < 1e-3,
        format!(
            "max |iterated - closed form| = {worst:.2e} (limit 1e-9); q=0 gives {zero}; \
             q=1e6 r relative gap {:.2e} (limit 1e-3)",
            big.abs()
        ),
    )
}

fn criterion_4() -> Outcome {
    let t_s = 1e-6;
    let gamma = db_to_linear(10.0);
    let trials = 100_000;
    let zc = ZcParams::new(1, 63, 10).unwrap();

    let tx = make_zc_preamble(zc, t_s).unwrap();
    let link = LinkState::new(0.4, 237.0, 1.0).unwrap();
    let mut rng = stream(4001, 0);
    let f: Vec<f64> = (0..trials)
        .map(|_| {
            let rx = propagate(&tx, &link, gamma, Direction::Downlink, 0.0, &mut rng).unwrap();
            -freq_estimate_oneshot(&rx, zc).unwrap() - 237.0
        })
        .collect();
    let f_ratio = variance_with_se(&f).2 / freq_variance_oneshot(zc, gamma, t_s).variance;

    let known = make_phase_preamble(100, 9, t_s).unwrap();
    let link = LinkState::new(-2.1, 0.0, 1.0).unwrap();
    let mut rng = stream(4002, 0);
    let ph: Vec<f64> = (0..trials)
        .map(|_| {
            let rx = propagate(&known, &link, gamma, Direction::Uplink, 0.0, &mut rng).unwrap();
            dtbf_core::math::wrap_phase(phase_estimate(&rx, &known).unwrap() + 2.1)
        })
        .collect();
    let ph_ratio = variance_with_se(&ph).2 / phase_variance(100, gamma).variance;

    let burst = make_feedback_burst(&known, &[0.0, 0.0, 1.3]).unwrap();
    let link = LinkState::new(0.7, 0.0, 1.0).unwrap();
    let mut rng = stream(4003, 0);
    let fb: Vec<f64> = (0..trials)
        .map(|_| {
            let rx = propagate(&burst, &link, gamma, Direction::Downlink, 0.0, &mut rng).unwrap();
            dtbf_core::math::wrap_phase(decode_feedback(&rx, 3, 100).unwrap() - 1.3)
        })
        .collect();
    let fb_ratio = variance_with_se(&fb).2 / feedback_variance(100, gamma).variance;

    let ok = |r: f64| (r - 1.0).abs() < 0.1;
    Outcome::new(
        ok(f_ratio) && ok(ph_ratio) && ok(fb_ratio),
        format!(
            "empirical/predicted variance at 10 dB over 1e5 trials: frequency {f_ratio:.3}, \
             phase {ph_ratio:.3}, feedback {fb_ratio:.3} (limit within 10%)"
        ),
    )
}

fn fig5_config(db: f64, mode: FreqMode, cycles: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(
        WaveformConfig::reference_simulation(),
        5,
        SnrPair::symmetric(db_to_linear(db)).unwrap(),
    );
    cfg.drift = DriftModel::new(0.18, cfg.waveform.t_cyc).unwrap();
    cfg.freq_mode = mode;
    cfg.n_cycles = cycles;
    // The Kalman time constant sqrt(r/q) reaches ~200 cycles at 0 dB.
    cfg.burn_in_cycles = 2000;
    cfg.seed = 5000 + db as u64;
    cfg
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut at_zero = [(0.0, 0.0); 2];
    for db in [0.0, 5.0, 10.0, 15.0, 20.0] {
        for (k, mode) in [FreqMode::Oneshot, FreqMode::Kalman]
            .into_iter()
            .enumerate()
        {
            let s = run_campaign(&fig5_config(db, mode, 100_000)).unwrap();
            let ratio = s.mean_gain / s.predicted_mean_gain;
            pass &= (ratio - 1.0).abs() < 0.05;
            parts.push(format!(
                "{}@{db}dB {:.3}/{:.3}",
                if k == 0 { "OS" } else { "KF" },
                s.mean_gain,
                s.predicted_mean_gain
            ));
            if db == 0.0 {
                at_zero[k] = (s.mean_gain, s.gain_std_err);
            }
        }
    }
    let (os, kf) = (at_zero[0], at_zero[1]);
    let slack = 2.0 * (os.1 * os.1 + kf.1 * kf.1).sqrt();
    let kf_better = kf.0 + slack >= os.0;
    pass &= kf_better;
    // Below 0 dB the predicted budget must flag its own regime.
    let low = fig5_config(-5.0, FreqMode::Oneshot, 1);
    let budgets = low.predicted_budgets().unwrap();
    let flagged = budgets.iter().all(|b| !b.regime.is_gaussian());
    pass &= flagged;
    Outcome::new(
        pass,
        format!(
            "simulated/predicted mean gain (limit within 5%): {}; KF >= OS at 0 dB: {kf_better}; \
             -5 dB budget flagged: {flagged}",
            parts.join(", ")
        ),
    )
}

fn scenario_a_params() -> LinkBudgetParams {
    let mut p = LinkBudgetParams {
        tx_power_dbm: 0.0,
        dest_power_dbm: 20.0,
        pathloss_exp: 3.7,
        noise_figure_db: 3.0,
        bandwidth_hz: 1e6,
        carrier_hz: 915e6,
        ref_distance: 1.0,
    };
    p.ref_distance = p.ref_distance_for_anchor(-13.0, 1000.0).unwrap();
    p
}

const SCENARIO_A_PAYLOAD: usize = 3800;

fn scenario_a_requirement(snr: SnrPair) -> DesignRequirement {
    DesignRequirement {
        gamma_min: db_to_linear(5.0),
        p_out: 0.1,
        snr,
        n_bounds: (1, 60),
        overhead_budget: Some(1000),
        variance_budget: None,
        max_overhead: 1000,
        te_policy: TePolicy::Payload {
            n_payload: SCENARIO_A_PAYLOAD,
            fraction: 0.5,
        },
        q: 0.18,
        freq_mode: FreqMode::Kalman,
    }
}

/// Simulated outage of a design, and whether its budget left the Gaussian
/// regime.
fn simulate_design(
    sol: &DesignSolution,
    fixed: &FixedParts,
    req: &DesignRequirement,
    n_payload: usize,
    t_cyc: f64,
    seed: u64,
) -> (f64, bool) {
    let w = sol.to_waveform(fixed, n_payload, t_cyc).unwrap();
    let mut cfg = ScenarioConfig::new(w, sol.n_radios, req.snr);
    cfg.drift = DriftModel::new(req.q, t_cyc).unwrap();
    cfg.freq_mode = req.freq_mode;
    cfg.n_cycles = 10_000;
    cfg.burn_in_cycles = 2000;
    cfg.gamma_min = Some(req.gamma_min);
    cfg.seed = seed;
    let s = run_campaign(&cfg).unwrap();
    (s.outage.unwrap(), s.regime.low_statistic_snr)
}

fn criterion_6() -> Outcome {
    let params = scenario_a_params();
    let anchor = linear_to_db(link_budget(1000.0, &params).unwrap().gamma_pre);
    let fixed = FixedParts {
        zc_root: 1,
        zc_length: 63,
        guards: [0, 0, 0],
        t_s: 1e-6,
    };
    let mut pass = (anchor + 13.0).abs() < 1.0;
    let mut parts = Vec::new();
    let mut ideal_violates = false;
    for (i, d) in [600.0, 800.0, 1000.0].into_iter().enumerate() {
        let snr = link_budget(d, &params).unwrap();
        let req = scenario_a_requirement(snr);
        let sol = min_radios(&req, &fixed).unwrap();
        if !sol.feasible {
            pass = false;
            parts.push(format!(
                "{d} m: infeasible ({})",
                sol.note.unwrap_or_default()
            ));
            continue;
        }
        let (outage, low) = simulate_design(
            &sol,
            &fixed,
            &req,
            SCENARIO_A_PAYLOAD,
            5e-3,
            6000 + i as u64,
        );
        pass &= outage <= 0.11 && sol.n_radios >= req.ideal_radios();
        let n_lb = req.ideal_radios();
        let ideal = solve_p1(&req, n_lb, &fixed).unwrap();
        let ideal_outage = if ideal.feasible {
            simulate_design(
                &ideal,
                &fixed,
                &req,
                SCENARIO_A_PAYLOAD,
                5e-3,
                6100 + i as u64,
            )
            .0
        } else {
            1.0
        };
        ideal_violates |= ideal_outage > 0.1;
        parts.push(format!(
            "{d} m ({:.1} dB): N={} (zc={}, ph={}, fb={}) outage {outage:.4} (predicted {:.4}{}), N_lb={n_lb} outage {ideal_outage:.4}",
            linear_to_db(snr.gamma_pre),
            sol.n_radios,
            sol.n_zc,
            sol.n_ph,
            sol.n_fb,
            sol.predicted_outage.unwrap_or(f64::NAN),
            if low { ", low statistic SNR" } else { "" }
        ));
    }
    pass &= ideal_violates;
    Outcome::new(
        pass,
        format!(
            "anchor {anchor:.2} dB at 1 km; {}; designed outage limit 0.11, ideal design violates: {ideal_violates}",
            parts.join("; ")
        ),
    )
}

fn criterion_7() -> Outcome {
    let params = LinkBudgetParams {
        tx_power_dbm: 10.0,
        dest_power_dbm: 20.0,
        pathloss_exp: 2.0,
        noise_figure_db: 3.0,
        bandwidth_hz: 1e6,
        carrier_hz: 915e6,
        ref_distance: 1.0,
    };
    let fixed = FixedParts {
        zc_root: 1,
        zc_length: 63,
        guards: [1000, 1000, 1000],
        t_s: 1e-6,
    };
    let payload = 1000;
    let t_cyc = 0.1;
    let n = 4;
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, d) in [40e3, 50e3, 60e3].into_iter().enumerate() {
        let snr = link_budget(d, &params).unwrap();
        let mut req = DesignRequirement {
            gamma_min: db_to_linear(5.0),
            p_out: 0.1,
            snr,
            n_bounds: (n, n),
            overhead_budget: None,
            variance_budget: None,
            // The cycle, feedback reference block and payload must fit the
            // coherence time.
            max_overhead: 100_000 - payload - 2000,
            te_policy: TePolicy::Payload {
                n_payload: payload,
                fraction: 0.5,
            },
            q: 0.0,
            freq_mode: FreqMode::Oneshot,
        };
        let Some(target) = variance_target(&req, n).unwrap() else {
            pass = false;
            parts.push(format!("{d} m: no variance target"));
            continue;
        };
        req.variance_budget = Some(target);
        let sol = solve_p2(&req, n, &fixed).unwrap();
        if !sol.feasible {
            pass = false;
            parts.push(format!("{d} m: P2 infeasible"));
            continue;
        }
        let (outage, low) = simulate_design(&sol, &fixed, &req, payload, t_cyc, 7000 + i as u64);
        pass &= outage <= 0.11;
        parts.push(format!(
            "{:.0} km ({:.1} dB): target {target:.4}, overhead {} (zc={}, ph={}, fb={}), outage {outage:.4} (predicted {:.4}{})",
            d / 1e3,
            linear_to_db(snr.gamma_pre),
            sol.overhead,
            sol.n_zc,
            sol.n_ph,
            sol.n_fb,
            sol.predicted_outage.unwrap_or(f64::NAN),
            if low { ", low statistic SNR" } else { "" }
        ));
    }
    Outcome::new(pass, format!("{} (limit 0.11)", parts.join("; ")))
}

/// Exhaustive optimum over all triples with overhead at most `limit`.
/// Ordering for P1: (σ², larger n_ph, n_zc, n_fb). For P2: overhead first.
fn brute_force(
    req: &DesignRequirement,
    n: usize,
    fixed: &FixedParts,
    limit: usize,
    by_overhead: bool,
) -> Option<(usize, usize, usize)> {
    type Key = (usize, f64, std::cmp::Reverse<usize>, usize, usize);
    let mut best: Option<Key> = None;
    let target = req.variance_budget.unwrap_or(f64::INFINITY);
    for z in 2.. {
        if design_overhead(n, fixed, z, 1, 1) > limit {
            break;
        }
        for p in 1.. {
            if design_overhead(n, fixed, z, p, 1) > limit {
                break;
            }
            for b in 1.. {
                let ov = design_overhead(n, fixed, z, p, b);
                if ov > limit {
                    break;
                }
                let v = phase_error_variance(req, n, fixed, z, p, b).unwrap();
                if by_overhead && v > target {
                    continue;
                }
                let key = (
                    if by_overhead { ov } else { 0 },
                    v,
                    std::cmp::Reverse(p),
                    z,
                    b,
                );
                if best.is_none_or(|k| key < k) {
                    best = Some(key);
                }
            }
        }
    }
    best.map(|(_, _, p, z, b)| (z, p.0, b))
}

fn random_instance(rng: &mut impl Rng) -> (DesignRequirement, usize, FixedParts, usize) {
    let m = [3usize, 5, 7, 11, 13][rng.random_range(0..5)];
    let n = rng.random_range(1..=4);
    let guards = [
        rng.random_range(0..20),
        rng.random_range(0..20),
        rng.random_range(0..20),
    ];
    let fixed = FixedParts {
        zc_root: 1,
        zc_length: m,
        guards,
        t_s: 1e-6,
    };
    let gamma_pre = 10f64.powf(rng.random_range(-1.0..2.0));
    let gamma_dr = gamma_pre * 10f64.powf(rng.random_range(0.0..2.0));
    let te_policy = if rng.random_bool(0.5) {
        TePolicy::Fixed(rng.random_range(1e-5..5e-3))
    } else {
        TePolicy::Payload {
            n_payload: rng.random_range(1..3000),
            fraction: rng.random_range(0.0..1.0),
        }
    };
    let min = design_overhead(n, &fixed, 2, 1, 1);
    let budget = min + rng.random_range(0..(60 * n + 4 * m).min(400));
    let req = DesignRequirement {
        gamma_min: 2.0,
        p_out: 0.1,
        snr: SnrPair::new(gamma_pre, gamma_dr).unwrap(),
        n_bounds: (1, 8),
        overhead_budget: Some(budget),
        variance_budget: None,
        max_overhead: budget,
        te_policy,
        q: 10f64.powf(rng.random_range(-2.0..1.0)),
        freq_mode: if rng.random_bool(0.5) {
            FreqMode::Oneshot
        } else {
            FreqMode::Kalman
        },
    };
    (req, n, fixed, budget)
}

fn criterion_8() -> Outcome {
    let mut rng = stream(8000, 0);
    let mut mismatches = Vec::new();
    let mut p2_feasible = 0;
    for i in 0..50 {
        let (mut req, n, fixed, budget) = random_instance(&mut rng);
        let sol = solve_p1(&req, n, &fixed).unwrap();
        let want = brute_force(&req, n, &fixed, budget, false);
        let got = sol.feasible.then_some((sol.n_zc, sol.n_ph, sol.n_fb));
        if got != want {
            mismatches.push(format!("P1 #{i}: {got:?} vs {want:?}"));
        }
        // A variance budget between the best and the coarsest design.
        let worst = phase_error_variance(&req, n, &fixed, 2, 1, 1).unwrap();
        let best = sol.var_e;
        let u: f64 = rng.random_range(0.0..1.0);
        req.variance_budget = Some(best + u * u * (worst - best));
        req.overhead_budget = None;
        let sol2 = solve_p2(&req, n, &fixed).unwrap();
        let want2 = brute_force(&req, n, &fixed, budget, true);
        let got2 = sol2.feasible.then_some((sol2.n_zc, sol2.n_ph, sol2.n_fb));
        p2_feasible += got2.is_some() as usize;
        if got2 != want2 {
            mismatches.push(format!("P2 #{i}: {got2:?} vs {want2:?}"));
        }
    }
    Outcome::new(
        mismatches.is_empty(),
        format!(
            "50 random instances, P1 and P2 vs exhaustive enumeration; {} mismatches{}{} ({p2_feasible} feasible P2)",
            mismatches.len(),
            if mismatches.is_empty() { "" } else { ": " },
            mismatches.join(", ")
        ),
    )
}

fn emulation_waveform(scale: f64) -> WaveformConfig {
    // UAV experiment timing, with guards, payload and cycle scaled together.
    let ms = |x: f64| (x * scale * 1000.0).round() as usize;
    WaveformConfig {
        zc: ZcParams::new(1, 63, 10).unwrap(),
        n_ph: 100,
        n_fb: 100,
        n_g1: ms(6.0),
        n_g2: ms(4.0),
        n_g3: ms(11.0),
        n_payload: ms(1.0),
        t_s: 1e-6,
        t_cyc: 75e-3 * scale,
    }
}

fn criterion_9() -> Outcome {
    // Continuous frequency walk; the growth rate sets the per-cycle q.
    let drift_rate = 3000.0;
    let zc = ZcParams::new(1, 63, 10).unwrap();
    let trace = synthetic_trace(
        zc,
        1e-6,
        4_600_000,
        150.0,
        drift_rate,
        Some(db_to_linear(24.0)),
        9000,
    )
    .unwrap();
    let row = |scale: f64, cycles: usize, mode: FreqMode, noise: Option<f64>| {
        let w = emulation_waveform(scale);
        let mut cfg = ScenarioConfig::new(w, 2, SnrPair::symmetric(db_to_linear(24.0)).unwrap());
        cfg.n_cycles = cycles;
        cfg.freq_mode = mode;
        cfg.drift = DriftModel::new(drift_rate * w.t_cyc, w.t_cyc).unwrap();
        cfg.seed = 9001;
        emulate_trace(&trace, &cfg, noise).unwrap()
    };
    let short = 18.0 / 75.0;
    let r1_kf = row(1.0, 60, FreqMode::Kalman, None);
    let r1_os = row(1.0, 60, FreqMode::Oneshot, None);
    let r2_kf = row(short, 250, FreqMode::Kalman, None);
    let r2_os = row(short, 250, FreqMode::Oneshot, None);
    let r3_kf = row(short, 250, FreqMode::Kalman, Some(1.0));
    let r3_os = row(short, 250, FreqMode::Oneshot, Some(1.0));
    let shorter_better = r2_kf.var_e < r1_kf.var_e && r2_os.var_e < r1_os.var_e;
    let kf_at_low_snr = r3_kf.var_e <= r3_os.var_e;
    let fmt = |r: &dtbf_core::protocol_sim::EmulationResult| {
        format!("{:.4} [{:.3}]", r.var_e, r.predicted_mean_gain)
    };
    Outcome::new(
        shorter_better && kf_at_low_snr,
        format!(
            "synthetic trace (hardware rows not reproducible); var_e [G] KF/OS: 75 ms {}/{}, \
             18 ms {}/{}, 18 ms at 0 dB {}/{}; shorter cycle lowers var_e: {shorter_better}; \
             KF <= OS at 0 dB: {kf_at_low_snr}",
            fmt(&r1_kf),
            fmt(&r1_os),
            fmt(&r2_kf),
            fmt(&r2_os),
            fmt(&r3_kf),
            fmt(&r3_os)
        ),
    )
}

/// Name, runtime limit in seconds, and check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("gain moments (Monte Carlo)", 60, criterion_1),
        ("gain distribution approximations", 60, criterion_2),
        ("Kalman steady state", 10, criterion_3),
        ("estimator variances", 120, criterion_4),
        ("end-to-end theory vs simulation", 600, criterion_5),
        ("urban UAV swarm fleet sizing", 600, criterion_6),
        ("weather balloon overhead design", 600, criterion_7),
        ("optimizer vs exhaustive search", 300, criterion_8),
        ("trace emulation orderings", 120, criterion_9),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|v| v.parse().ok());
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let pass = outcome.pass && in_time;
        failures += (!pass) as usize;
        println!(
            "criterion {} {}: {name}: {}; runtime {:.1} s (limit {limit} s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
