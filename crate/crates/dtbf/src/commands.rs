//! The four batch commands. Each computes its results in memory first, so
//! a failing run leaves no partial outputs behind.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use dtbf_core::channel::{link_budget, SnrPair};
use dtbf_core::designer::{
    min_radios, solve_p2, variance_target, DesignRequirement, DesignSolution, FixedParts, TePolicy,
};
use dtbf_core::gain_model::{
    gain_mean, gain_variance, gamma_approximation, outage_probability, GainDistribution,
};
use dtbf_core::math::{db_to_linear, linear_to_db};
use dtbf_core::protocol_sim::{
    emulate_trace, emulation_capacity, run_campaign_with, EmulationResult, RunSummary,
    ScenarioConfig, DEFAULT_TRACE_SNR_DB,
};
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;

use crate::config::{self, Config, EmulateSection, Mode, Objective};
use crate::error::CliError;
use crate::manifest::{RunManifest, MANIFEST_FILE};
use crate::trace_io::load_trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Simulate,
    Design,
    Emulate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Analyze => "analyze",
            Self::Simulate => "simulate",
            Self::Design => "design",
            Self::Emulate => "emulate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out_dir: PathBuf,
    /// Overrides the config seed.
    pub seed: Option<u64>,
    /// Worker threads; `None` uses one per core.
    pub threads: Option<usize>,
    pub format: Format,
    pub trace: Option<PathBuf>,
    /// Sample rate for CSV traces.
    pub sample_rate_hz: Option<f64>,
}

/// Files produced by a command, plus a reason when no design was feasible.
struct Product {
    files: Vec<(String, Vec<u8>)>,
    infeasible: Option<String>,
}

impl Product {
    fn new(files: Vec<(String, Vec<u8>)>) -> Self {
        Self {
            files,
            infeasible: None,
        }
    }
}

struct Context<'a> {
    cfg: &'a Config,
    opts: &'a RunOptions,
    seed: u64,
    pool: ThreadPool,
}

/// Runs `cmd` and writes its outputs and manifest under `opts.out_dir`.
///
/// An infeasible design still writes its outputs and manifest before
/// returning [`CliError::Infeasible`].
pub fn run(cmd: Command, opts: &RunOptions) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let text = fs::read_to_string(&opts.config).map_err(|e| {
        CliError::Input(format!("cannot read config {}: {e}", opts.config.display()))
    })?;
    let cfg = config::parse(&text)?;
    let digest = config::digest(&text)?;
    let seed = opts.seed.or(cfg.seed).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Input(format!("--threads: {e}")))?;
    let ctx = Context {
        cfg: &cfg,
        opts,
        seed,
        pool,
    };
    let product = match cmd {
        Command::Analyze => analyze(&ctx)?,
        Command::Simulate => simulate(&ctx)?,
        Command::Design => design(&ctx)?,
        Command::Emulate => emulate(&ctx)?,
    };

    let outputs = write_outputs(&opts.out_dir, &product.files)?;
    let manifest = RunManifest {
        command: cmd.name().to_string(),
        config_path: opts.config.display().to_string(),
        config_digest: digest,
        seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    write_outputs(&opts.out_dir, &[(MANIFEST_FILE.to_string(), json)])?;
    match product.infeasible {
        Some(reason) => Err(CliError::Infeasible(reason)),
        None => Ok(manifest),
    }
}

fn write_outputs(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<Vec<String>, CliError> {
    let out_err = |p: &Path, e: std::io::Error| {
        CliError::Output(format!("cannot write {}: {e}", p.display()))
    };
    fs::create_dir_all(dir).map_err(|e| out_err(dir, e))?;
    files
        .iter()
        .map(|(name, bytes)| {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| out_err(&path, e))?;
            Ok(path.display().to_string())
        })
        .collect()
}

/// Locale-independent number formatting: plain decimals in the usual range,
/// scientific notation outside it.
fn num(x: f64) -> String {
    if x == 0.0 || (x.is_finite() && (1e-4..1e15).contains(&x.abs())) {
        format!("{x}")
    } else if x.is_finite() {
        format!("{x:e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn opt_int(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv(kind: &str, header: &[String], rows: &[Vec<String>]) -> Vec<u8> {
    let mut out = format!("# dtbf {kind} v1\n{}\n", header.join(","));
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

fn json(value: &impl Serialize) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("results serialize");
    v.push(b'\n');
    v
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn check(ok: bool, field: &str, msg: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::field(field, msg))
    }
}

fn campaign(ctx: &Context, cfg: &ScenarioConfig) -> Result<RunSummary, CliError> {
    ctx.pool
        .install(|| {
            run_campaign_with(cfg, |sim, batch| {
                batch
                    .into_par_iter()
                    .map(|(c, mut states)| sim.run_cycle(&mut states, c))
                    .collect()
            })
        })
        .map_err(CliError::from)
}

#[derive(Serialize)]
struct AnalyzeRow {
    n_radios: usize,
    sigma_e: f64,
    mean_gain: f64,
    gain_std_dev: f64,
    distribution: &'static str,
    gamma_shape: Option<f64>,
    gamma_scale: Option<f64>,
    cdf_gain: Vec<f64>,
    cdf: Vec<f64>,
}

fn analyze(ctx: &Context) -> Result<Product, CliError> {
    let sec = config::require(&ctx.cfg.analyze, "analyze")?;
    check(
        !sec.radios.is_empty() && sec.radios.iter().all(|&n| n >= 1),
        "analyze.radios",
        "needs positive radio counts",
    )?;
    check(
        !sec.sigma_e.is_empty() && sec.sigma_e.iter().all(|s| s.is_finite() && *s >= 0.0),
        "analyze.sigma_e",
        "needs finite nonnegative values",
    )?;
    check(
        sec.cdf_points >= 2,
        "analyze.cdf_points",
        "must be at least 2",
    )?;
    let mut rows = Vec::new();
    for &n in &sec.radios {
        for &s in &sec.sigma_e {
            let v = s * s;
            let dist = gamma_approximation(n, v)?;
            let (distribution, gamma_shape, gamma_scale) = match dist {
                GainDistribution::Gamma { k_shape, theta, .. } => {
                    ("gamma", Some(k_shape), Some(theta))
                }
                GainDistribution::Gaussian { .. } => ("gaussian", None, None),
                GainDistribution::PointMass { .. } => ("point", None, None),
            };
            let last = (sec.cdf_points - 1) as f64;
            let cdf_gain: Vec<f64> = (0..sec.cdf_points)
                .map(|k| k as f64 * n as f64 / last)
                .collect();
            let cdf = cdf_gain.iter().map(|&g| dist.cdf(g)).collect();
            rows.push(AnalyzeRow {
                n_radios: n,
                sigma_e: s,
                mean_gain: gain_mean(n, v),
                gain_std_dev: gain_variance(n, v).max(0.0).sqrt(),
                distribution,
                gamma_shape,
                gamma_scale,
                cdf_gain,
                cdf,
            });
        }
    }
    let file = match ctx.opts.format {
        Format::Json => ("analyze.json".to_string(), json(&rows)),
        Format::Csv => {
            let mut header = strings(&[
                "n_radios",
                "sigma_e",
                "mean_gain",
                "gain_std_dev",
                "distribution",
                "gamma_shape",
                "gamma_scale",
            ]);
            header.extend((0..sec.cdf_points).map(|k| format!("cdf_{k}")));
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut row = vec![
                        r.n_radios.to_string(),
                        num(r.sigma_e),
                        num(r.mean_gain),
                        num(r.gain_std_dev),
                        r.distribution.to_string(),
                        opt_num(r.gamma_shape),
                        opt_num(r.gamma_scale),
                    ];
                    row.extend(r.cdf.iter().map(|&c| num(c)));
                    row
                })
                .collect();
            ("analyze.csv".to_string(), csv("analyze", &header, &table))
        }
    };
    Ok(Product::new(vec![file]))
}

#[derive(Serialize)]
struct SimulateRow {
    point: usize,
    n_radios: usize,
    snr_pre_db: f64,
    snr_dr_db: f64,
    mode: &'static str,
    n_cycles: usize,
    mean_gain: f64,
    predicted_mean_gain: f64,
    gain_std_dev: f64,
    predicted_gain_std_dev: f64,
    gain_std_err: f64,
    var_e: f64,
    predicted_var_e: f64,
    var_freq: f64,
    predicted_var_freq: f64,
    var_phase: f64,
    predicted_var_phase: f64,
    var_feedback: f64,
    predicted_var_feedback: f64,
    outage: Option<f64>,
    predicted_outage: Option<f64>,
    low_statistic_snr: bool,
    phase_wrapping: bool,
}

const SIMULATE_COLUMNS: [&str; 23] = [
    "point",
    "n_radios",
    "snr_pre_db",
    "snr_dr_db",
    "mode",
    "n_cycles",
    "mean_gain",
    "predicted_mean_gain",
    "gain_std_dev",
    "predicted_gain_std_dev",
    "gain_std_err",
    "var_e",
    "predicted_var_e",
    "var_freq",
    "predicted_var_freq",
    "var_phase",
    "predicted_var_phase",
    "var_feedback",
    "predicted_var_feedback",
    "outage",
    "predicted_outage",
    "low_statistic_snr",
    "phase_wrapping",
];

fn simulate(ctx: &Context) -> Result<Product, CliError> {
    let sec = config::require(&ctx.cfg.simulate, "simulate")?;
    check(sec.radios >= 1, "simulate.radios", "must be positive")?;
    check(sec.cycles >= 1, "simulate.cycles", "must be positive")?;
    check(
        !sec.snr_db.is_empty(),
        "simulate.snr_db",
        "needs at least one SNR",
    )?;
    check(
        !sec.modes.is_empty(),
        "simulate.modes",
        "needs at least one mode",
    )?;
    let waveform = ctx.cfg.waveform.to_core()?;
    let drift = ctx.cfg.channel.drift(waveform.t_cyc)?;
    let gamma_min = sec.gamma_min_db.map(db_to_linear);

    let mut rows = Vec::new();
    let mut files = Vec::new();
    for &snr_db in &sec.snr_db {
        for &mode in &sec.modes {
            let snr = SnrPair::from_db(snr_db, snr_db + sec.dr_offset_db)
                .map_err(|e| CliError::field("simulate.snr_db", e))?;
            let mut cfg = ScenarioConfig::new(waveform, sec.radios, snr);
            cfg.drift = drift;
            cfg.freq_mode = mode.into();
            cfg.n_cycles = sec.cycles;
            cfg.burn_in_cycles = sec.burn_in_cycles;
            cfg.payload_fraction = sec.payload_fraction;
            cfg.initial_freq_hz = ctx.cfg.channel.initial_freq_hz;
            cfg.gamma_min = gamma_min;
            cfg.seed = ctx.seed;
            cfg.validate()?;
            let s = campaign(ctx, &cfg)?;
            let (emp, pred) = s.pooled_breakdown();
            let predicted_outage = gamma_min
                .map(|g| outage_probability(sec.radios, s.predicted_var_e, snr.gamma_pre, g))
                .transpose()?;
            let point = rows.len();
            if sec.dump_cycles {
                let table: Vec<Vec<String>> = s
                    .gains
                    .iter()
                    .enumerate()
                    .map(|(k, &g)| vec![k.to_string(), num(g)])
                    .collect();
                files.push((
                    format!("cycles_{point}.csv"),
                    csv("simulate-cycles", &strings(&["cycle", "gain"]), &table),
                ));
            }
            rows.push(SimulateRow {
                point,
                n_radios: sec.radios,
                snr_pre_db: snr_db,
                snr_dr_db: snr_db + sec.dr_offset_db,
                mode: mode.name(),
                n_cycles: s.n_cycles,
                mean_gain: s.mean_gain,
                predicted_mean_gain: s.predicted_mean_gain,
                gain_std_dev: s.gain_std_dev,
                predicted_gain_std_dev: gain_variance(sec.radios, s.predicted_var_e)
                    .max(0.0)
                    .sqrt(),
                gain_std_err: s.gain_std_err,
                var_e: s.var_e,
                predicted_var_e: s.predicted_var_e,
                var_freq: emp.freq,
                predicted_var_freq: pred.freq,
                var_phase: emp.phase,
                predicted_var_phase: pred.phase,
                var_feedback: emp.feedback,
                predicted_var_feedback: pred.feedback,
                outage: s.outage,
                predicted_outage,
                low_statistic_snr: s.regime.low_statistic_snr,
                phase_wrapping: s.regime.phase_wrapping,
            });
        }
    }
    let main = match ctx.opts.format {
        Format::Json => ("simulate.json".to_string(), json(&rows)),
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.point.to_string(),
                        r.n_radios.to_string(),
                        num(r.snr_pre_db),
                        num(r.snr_dr_db),
                        r.mode.to_string(),
                        r.n_cycles.to_string(),
                        num(r.mean_gain),
                        num(r.predicted_mean_gain),
                        num(r.gain_std_dev),
                        num(r.predicted_gain_std_dev),
                        num(r.gain_std_err),
                        num(r.var_e),
                        num(r.predicted_var_e),
                        num(r.var_freq),
                        num(r.predicted_var_freq),
                        num(r.var_phase),
                        num(r.predicted_var_phase),
                        num(r.var_feedback),
                        num(r.predicted_var_feedback),
                        opt_num(r.outage),
                        opt_num(r.predicted_outage),
                        r.low_statistic_snr.to_string(),
                        r.phase_wrapping.to_string(),
                    ]
                })
                .collect();
            (
                "simulate.csv".to_string(),
                csv("simulate", &strings(&SIMULATE_COLUMNS), &table),
            )
        }
    };
    files.insert(0, main);
    Ok(Product::new(files))
}

#[derive(Serialize)]
struct DesignPoint {
    distance_m: f64,
    snr_pre_db: f64,
    snr_dr_db: f64,
    ideal_radios: usize,
    variance_target: Option<f64>,
    feasible: bool,
    n_radios: Option<usize>,
    n_zc: Option<usize>,
    n_ph: Option<usize>,
    n_fb: Option<usize>,
    overhead: Option<usize>,
    var_e: Option<f64>,
    t_e: Option<f64>,
    predicted_outage: Option<f64>,
    simulated_outage: Option<f64>,
    note: Option<String>,
}

#[derive(Serialize)]
struct DesignReport<'a> {
    objective: &'static str,
    mode: &'static str,
    points: &'a [DesignPoint],
}

fn design(ctx: &Context) -> Result<Product, CliError> {
    let sec = config::require(&ctx.cfg.design, "design")?;
    check(
        !sec.distances_m.is_empty() && sec.distances_m.iter().all(|d| *d > 0.0),
        "design.distances_m",
        "needs positive distances",
    )?;
    let fixed_n = match sec.objective {
        Objective::MinRadios => {
            check(
                sec.overhead_budget.is_some(),
                "design.overhead_budget",
                "required by min_radios",
            )?;
            None
        }
        Objective::MinOverhead => Some(
            sec.radios
                .ok_or_else(|| CliError::field("design.radios", "required by min_overhead"))?,
        ),
    };
    let w = &ctx.cfg.waveform;
    let t_s = w.t_s()?;
    let t_cyc = w.t_cyc()?;
    let params = ctx.cfg.channel.link_params()?;
    let fixed = FixedParts {
        zc_root: w.zc_root,
        zc_length: w.zc_length,
        guards: w.guard_samples,
        t_s,
    };
    let te_policy = match sec.evaluation_delay_ms {
        Some(ms) => TePolicy::Fixed(ms * 1e-3),
        None => TePolicy::Payload {
            n_payload: w.n_payload,
            fraction: sec.payload_fraction,
        },
    };
    let unsolved = |note: String| DesignSolution {
        feasible: false,
        n_radios: 0,
        n_zc: 0,
        n_ph: 0,
        n_fb: 0,
        var_e: f64::NAN,
        overhead: 0,
        t_e: f64::NAN,
        predicted_outage: None,
        note: Some(note),
    };

    let mut points = Vec::new();
    for (i, &d) in sec.distances_m.iter().enumerate() {
        let snr = link_budget(d, &params).map_err(|e| CliError::field("design.distances_m", e))?;
        let mut req = DesignRequirement {
            gamma_min: db_to_linear(sec.gamma_min_db),
            p_out: sec.p_out,
            snr,
            n_bounds: fixed_n.map_or((sec.radios_min, sec.radios_max), |n| (n, n)),
            overhead_budget: sec.overhead_budget,
            variance_budget: None,
            max_overhead: sec.max_overhead,
            te_policy,
            q: ctx.cfg.channel.drift_q,
            freq_mode: sec.mode.into(),
        };
        req.validate().map_err(|e| CliError::field("design", e))?;
        let (sol, target) = match fixed_n {
            None => (min_radios(&req, &fixed)?, None),
            Some(n) => match variance_target(&req, n)? {
                None => (
                    unsolved(format!(
                        "no phase-error variance meets the outage target with {n} radios"
                    )),
                    None,
                ),
                Some(t) => {
                    req.overhead_budget = None;
                    req.variance_budget = Some(t);
                    (solve_p2(&req, n, &fixed)?, Some(t))
                }
            },
        };
        let simulated_outage = if sol.feasible && sec.validate_cycles > 0 {
            let waveform = sol.to_waveform(&fixed, w.n_payload, t_cyc)?;
            let mut cfg = ScenarioConfig::new(waveform, sol.n_radios, snr);
            cfg.drift = ctx.cfg.channel.drift(t_cyc)?;
            cfg.freq_mode = sec.mode.into();
            cfg.n_cycles = sec.validate_cycles;
            cfg.burn_in_cycles = sec.burn_in_cycles;
            cfg.payload_fraction = sec.payload_fraction;
            cfg.initial_freq_hz = ctx.cfg.channel.initial_freq_hz;
            cfg.gamma_min = Some(req.gamma_min);
            cfg.seed = ctx.seed.wrapping_add(i as u64);
            campaign(ctx, &cfg)?.outage
        } else {
            None
        };
        let some = |x| sol.feasible.then_some(x);
        points.push(DesignPoint {
            distance_m: d,
            snr_pre_db: linear_to_db(snr.gamma_pre),
            snr_dr_db: linear_to_db(snr.gamma_dr),
            ideal_radios: req.ideal_radios(),
            variance_target: target,
            feasible: sol.feasible,
            n_radios: some(sol.n_radios),
            n_zc: some(sol.n_zc),
            n_ph: some(sol.n_ph),
            n_fb: some(sol.n_fb),
            overhead: some(sol.overhead),
            var_e: sol.feasible.then_some(sol.var_e),
            t_e: sol.feasible.then_some(sol.t_e),
            predicted_outage: sol.predicted_outage.filter(|_| sol.feasible),
            simulated_outage,
            note: sol.note.clone(),
        });
    }

    let report = DesignReport {
        objective: sec.objective.name(),
        mode: sec.mode.name(),
        points: &points,
    };
    let mut files = vec![("design.json".to_string(), json(&report))];
    if ctx.opts.format == Format::Csv {
        let header = strings(&[
            "distance_m",
            "snr_pre_db",
            "snr_dr_db",
            "ideal_radios",
            "variance_target",
            "feasible",
            "n_radios",
            "n_zc",
            "n_ph",
            "n_fb",
            "overhead",
            "var_e",
            "t_e",
            "predicted_outage",
            "simulated_outage",
        ]);
        let table: Vec<Vec<String>> = points
            .iter()
            .map(|p| {
                vec![
                    num(p.distance_m),
                    num(p.snr_pre_db),
                    num(p.snr_dr_db),
                    p.ideal_radios.to_string(),
                    opt_num(p.variance_target),
                    p.feasible.to_string(),
                    opt_int(p.n_radios),
                    opt_int(p.n_zc),
                    opt_int(p.n_ph),
                    opt_int(p.n_fb),
                    opt_int(p.overhead),
                    opt_num(p.var_e),
                    opt_num(p.t_e),
                    opt_num(p.predicted_outage),
                    opt_num(p.simulated_outage),
                ]
            })
            .collect();
        files.push(("design.csv".to_string(), csv("design", &header, &table)));
    }
    let mut product = Product::new(files);
    if points.iter().all(|p| !p.feasible) {
        product.infeasible = Some("no feasible design at any distance".to_string());
    }
    Ok(product)
}

#[derive(Serialize)]
struct ModeEmulation {
    var_e: f64,
    predicted_mean_gain: f64,
    mean_residual: f64,
}

impl From<&EmulationResult> for ModeEmulation {
    fn from(r: &EmulationResult) -> Self {
        Self {
            var_e: r.var_e,
            predicted_mean_gain: r.predicted_mean_gain,
            mean_residual: r.mean_residual,
        }
    }
}

#[derive(Serialize)]
struct EmulateReport {
    n_radios: usize,
    cycles: usize,
    added_noise_snr_db: Option<f64>,
    oneshot: ModeEmulation,
    kalman: ModeEmulation,
}

fn emulate(ctx: &Context) -> Result<Product, CliError> {
    let path = ctx
        .opts
        .trace
        .as_ref()
        .ok_or_else(|| CliError::Input("emulate needs --trace".to_string()))?;
    let trace =
        load_trace(path, ctx.opts.sample_rate_hz).map_err(|e| CliError::Input(e.to_string()))?;
    let sec = ctx.cfg.emulate.clone().unwrap_or(EmulateSection {
        radios: 2,
        cycles: None,
        added_noise_snr_db: None,
        payload_fraction: 0.5,
    });
    check(sec.radios >= 1, "emulate.radios", "must be positive")?;
    let w = ctx.cfg.waveform.to_core()?;
    let snr_db = sec
        .added_noise_snr_db
        .or(trace.capture_snr_db)
        .unwrap_or(DEFAULT_TRACE_SNR_DB);
    let mut cfg = ScenarioConfig::new(w, sec.radios, SnrPair::from_db(snr_db, snr_db)?);
    cfg.drift = ctx.cfg.channel.drift(w.t_cyc)?;
    cfg.payload_fraction = sec.payload_fraction;
    cfg.seed = ctx.seed;
    let capacity = emulation_capacity(trace.len(), &cfg)?;
    cfg.n_cycles = sec.cycles.unwrap_or(capacity);
    if cfg.n_cycles == 0 {
        return Err(CliError::Input(format!(
            "trace of {} samples holds no complete cycle",
            trace.len()
        )));
    }
    let noise = sec.added_noise_snr_db.map(db_to_linear);
    let mut results = Vec::new();
    for mode in [Mode::Oneshot, Mode::Kalman] {
        cfg.freq_mode = mode.into();
        results.push(emulate_trace(&trace, &cfg, noise)?);
    }
    let report = EmulateReport {
        n_radios: sec.radios,
        cycles: cfg.n_cycles,
        added_noise_snr_db: sec.added_noise_snr_db,
        oneshot: (&results[0]).into(),
        kalman: (&results[1]).into(),
    };
    let mut files = vec![("emulate.json".to_string(), json(&report))];
    if ctx.opts.format == Format::Csv {
        let table: Vec<Vec<String>> = [("oneshot", &report.oneshot), ("kalman", &report.kalman)]
            .iter()
            .map(|(m, r)| {
                vec![
                    m.to_string(),
                    report.cycles.to_string(),
                    num(r.var_e),
                    num(r.predicted_mean_gain),
                    num(r.mean_residual),
                ]
            })
            .collect();
        let header = strings(&[
            "mode",
            "cycles",
            "var_e",
            "predicted_mean_gain",
            "mean_residual",
        ]);
        files.push(("emulate.csv".to_string(), csv("emulate", &header, &table)));
    }
    Ok(Product::new(files))
}
