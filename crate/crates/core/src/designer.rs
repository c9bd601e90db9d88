//! Waveform and fleet-size design.
//!
//! For a fixed fleet size the phase error variance is a convex function of
//! the sync repetitions and the phase and feedback preamble lengths, and the
//! overhead is affine in them. This module solves the two resulting integer
//! problems (least variance within an overhead budget, least overhead within
//! a variance budget), searches for the smallest fleet that meets an outage
//! target, and finds the largest variance that still meets it.

use alloc::string::String;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed when a dependency links std
use num_traits::Float;

use crate::channel::SnrPair;
use crate::error::{param_err, Result};
use crate::estimators::{
    feedback_variance, freq_variance_oneshot, kf_steady_state_variance, phase_variance, FreqMode,
};
use crate::gain_model::outage_satisfied;
use crate::waveform::{WaveformConfig, ZcParams};

/// Preamble-length search spaces up to this size are enumerated.
const ENUMERATE_LIMIT: usize = 4096;
/// Absolute tolerance of [`variance_target`] in rad².
pub const VARIANCE_TOLERANCE: f64 = 1e-6;
/// Largest variance [`variance_target`] will bracket.
const VARIANCE_CAP: f64 = 1e3;

/// How the delay from phase estimation to evaluation is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TePolicy {
    /// A fixed delay in seconds.
    Fixed(f64),
    /// Evaluation at `fraction` of a payload of `n_payload` samples, seen
    /// from the first radio's phase slot. The delay grows with the preamble
    /// lengths.
    Payload { n_payload: usize, fraction: f64 },
}

/// Waveform parts that are inputs to the design rather than variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParts {
    pub zc_root: u32,
    pub zc_length: usize,
    pub guards: [usize; 3],
    pub t_s: f64,
}

/// A design problem statement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignRequirement {
    pub gamma_min: f64,
    pub p_out: f64,
    pub snr: SnrPair,
    /// Inclusive fleet size bounds.
    pub n_bounds: (usize, usize),
    /// Overhead budget in samples for the least-variance problem.
    pub overhead_budget: Option<usize>,
    /// Variance budget in rad² for the least-overhead problem.
    pub variance_budget: Option<f64>,
    /// Upper limit for the least-overhead search, in samples.
    pub max_overhead: usize,
    pub te_policy: TePolicy,
    /// Drift variance per cycle, for Kalman designs.
    pub q: f64,
    pub freq_mode: FreqMode,
}

impl DesignRequirement {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_out > 0.0 && self.p_out < 1.0) {
            return Err(param_err!("outage probability must be in (0, 1)"));
        }
        if !(self.gamma_min > 0.0) {
            return Err(param_err!("minimum SNR must be positive"));
        }
        let (lo, hi) = self.n_bounds;
        if lo == 0 || lo > hi {
            return Err(param_err!("invalid fleet bounds [{lo}, {hi}]"));
        }
        if self.overhead_budget == Some(0) {
            return Err(param_err!("overhead budget must be positive"));
        }
        if let Some(v) = self.variance_budget {
            if !(v >= 0.0) {
                return Err(param_err!("variance budget must be non-negative"));
            }
        }
        match self.te_policy {
            TePolicy::Fixed(t) if !(t >= 0.0) => Err(param_err!("negative evaluation delay")),
            TePolicy::Payload { fraction, .. } if !(0.0..=1.0).contains(&fraction) => {
                Err(param_err!("payload fraction must be in [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// Fleet size needed under ideal beamforming, `ceil(sqrt(γ_min/γ_pre))`.
    pub fn ideal_radios(&self) -> usize {
        let n = (self.gamma_min / self.snr.gamma_pre).sqrt().ceil();
        (n as usize).max(1)
    }
}

/// Result of a design search. Infeasible results carry a reason.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSolution {
    pub feasible: bool,
    pub n_radios: usize,
    pub n_zc: usize,
    pub n_ph: usize,
    pub n_fb: usize,
    pub var_e: f64,
    /// Overhead in samples.
    pub overhead: usize,
    /// Evaluation delay of the design in seconds.
    pub t_e: f64,
    pub predicted_outage: Option<f64>,
    pub note: Option<String>,
}

impl DesignSolution {
    fn infeasible(n_radios: usize, note: String) -> Self {
        Self {
            feasible: false,
            n_radios,
            n_zc: 0,
            n_ph: 0,
            n_fb: 0,
            var_e: f64::INFINITY,
            overhead: 0,
            t_e: 0.0,
            predicted_outage: None,
            note: Some(note),
        }
    }

    /// Builds the full cycle layout of a feasible design.
    pub fn to_waveform(
        &self,
        fixed: &FixedParts,
        n_payload: usize,
        t_cyc: f64,
    ) -> Result<WaveformConfig> {
        if !self.feasible {
            return Err(param_err!(
                "cannot build a waveform from an infeasible design"
            ));
        }
        let cfg = WaveformConfig {
            zc: ZcParams::new(fixed.zc_root, fixed.zc_length, self.n_zc)?,
            n_ph: self.n_ph,
            n_fb: self.n_fb,
            n_g1: fixed.guards[0],
            n_g2: fixed.guards[1],
            n_g3: fixed.guards[2],
            n_payload,
            t_s: fixed.t_s,
            t_cyc,
        };
        cfg.validate(self.n_radios)?;
        Ok(cfg)
    }
}

/// The phase error variance for one fleet size, with the per-axis terms
/// tabulated on demand.
struct Objective {
    n: usize,
    m: usize,
    guard_total: usize,
    snr: SnrPair,
    t_s: f64,
    mode: FreqMode,
    q: f64,
    /// Delay in samples is `te0 + alpha·n_ph + beta·n_fb`.
    te0: f64,
    alpha: f64,
    beta: f64,
    root: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    var_e: f64,
    n_zc: usize,
    n_ph: usize,
    n_fb: usize,
}

impl Candidate {
    const NONE: Self = Self {
        var_e: f64::INFINITY,
        n_zc: 0,
        n_ph: 0,
        n_fb: 0,
    };

    /// Lower variance first; ties go to longer phase preambles, then shorter
    /// sync, then shorter feedback.
    fn better_than(&self, other: &Self) -> bool {
        if self.var_e != other.var_e {
            return self.var_e < other.var_e;
        }
        if self.n_ph != other.n_ph {
            return self.n_ph > other.n_ph;
        }
        if self.n_zc != other.n_zc {
            return self.n_zc < other.n_zc;
        }
        self.n_fb < other.n_fb
    }
}

impl Objective {
    fn new(req: &DesignRequirement, n: usize, fixed: &FixedParts) -> Result<Self> {
        if n == 0 {
            return Err(param_err!("at least one radio is required"));
        }
        if !(fixed.t_s > 0.0) || fixed.zc_length < 2 {
            return Err(param_err!("invalid fixed waveform parts"));
        }
        // Validates root and length once.
        ZcParams::new(fixed.zc_root, fixed.zc_length, 2)?;
        let [_, g2, g3] = fixed.guards;
        let (te0, alpha, beta) = match req.te_policy {
            TePolicy::Fixed(t) => (t / fixed.t_s, 0.0, 0.0),
            TePolicy::Payload {
                n_payload,
                fraction,
            } => (
                (g2 + g3) as f64 + fraction * n_payload as f64,
                n as f64 - 0.5,
                n as f64 + 1.0,
            ),
        };
        Ok(Self {
            n,
            m: fixed.zc_length,
            guard_total: fixed.guards.iter().sum(),
            snr: req.snr,
            t_s: fixed.t_s,
            mode: req.freq_mode,
            q: req.q,
            te0,
            alpha,
            beta,
            root: fixed.zc_root,
        })
    }

    fn overhead(&self, n_zc: usize, n_ph: usize, n_fb: usize) -> usize {
        n_zc * self.m + self.n * (n_ph + n_fb) + self.guard_total
    }

    fn min_overhead(&self) -> usize {
        self.overhead(2, 1, 1)
    }

    fn freq_var(&self, n_zc: usize) -> f64 {
        let zc = ZcParams::new(self.root, self.m, n_zc).expect("validated ZC parameters");
        let oneshot = freq_variance_oneshot(zc, self.snr.gamma_dr, self.t_s).variance;
        match self.mode {
            FreqMode::Oneshot => oneshot,
            FreqMode::Kalman => kf_steady_state_variance(self.q, oneshot).expect("positive r"),
        }
    }

    fn t_e(&self, n_ph: usize, n_fb: usize) -> f64 {
        (self.te0 + self.alpha * n_ph as f64 + self.beta * n_fb as f64) * self.t_s
    }

    fn eval(&self, var_f: f64, n_zc: usize, n_ph: usize, n_fb: usize) -> Candidate {
        let w = 2.0 * PI * self.t_e(n_ph, n_fb);
        let var_e = w * w * var_f
            + phase_variance(n_ph, self.snr.gamma_pre).variance
            + feedback_variance(n_fb, self.snr.gamma_dr).variance;
        Candidate {
            var_e,
            n_zc,
            n_ph,
            n_fb,
        }
    }

    /// Best feedback length for fixed sync and phase lengths, `n_fb` in
    /// `1..=hi`. The objective is convex in `n_fb`.
    fn best_fb(&self, var_f: f64, n_zc: usize, n_ph: usize, hi: usize) -> Candidate {
        let f = |b: usize| self.eval(var_f, n_zc, n_ph, b);
        // Smallest b whose forward difference is non-negative.
        let (mut lo, mut up) = (1usize, hi);
        while lo < up {
            let mid = lo + (up - lo) / 2;
            if f(mid + 1).var_e >= f(mid).var_e {
                up = mid;
            } else {
                lo = mid + 1;
            }
        }
        let mut best = Candidate::NONE;
        for b in lo.saturating_sub(2).max(1)..=(lo + 2).min(hi) {
            let c = f(b);
            if c.better_than(&best) {
                best = c;
            }
        }
        best
    }

    /// Best `(n_ph, n_fb)` with `n_ph + n_fb ≤ total`.
    fn best_for_sync(&self, n_zc: usize, total: usize) -> Candidate {
        let var_f = self.freq_var(n_zc);
        let h = |p: usize| self.best_fb(var_f, n_zc, p, total - p);
        let p_max = total - 1;
        let mut best = Candidate::NONE;
        if p_max <= ENUMERATE_LIMIT {
            for p in 1..=p_max {
                let c = h(p);
                if c.better_than(&best) {
                    best = c;
                }
            }
            return best;
        }
        let (mut lo, mut up) = (1usize, p_max);
        while lo < up {
            let mid = lo + (up - lo) / 2;
            if h(mid + 1).var_e >= h(mid).var_e {
                up = mid;
            } else {
                lo = mid + 1;
            }
        }
        for p in lo.saturating_sub(3).max(1)..=(lo + 3).min(p_max) {
            let c = h(p);
            if c.better_than(&best) {
                best = c;
            }
        }
        best
    }

    fn solve_budget(&self, budget: usize) -> Option<Candidate> {
        if budget < self.min_overhead() {
            return None;
        }
        let free = budget - self.guard_total;
        let mut best = Candidate::NONE;
        let mut n_zc = 2;
        while n_zc * self.m + 2 * self.n <= free {
            let total = (free - n_zc * self.m) / self.n;
            let c = self.best_for_sync(n_zc, total);
            if c.better_than(&best) {
                best = c;
            }
            n_zc += 1;
        }
        Some(best)
    }

    fn solution(&self, c: Candidate, req: &DesignRequirement) -> Result<DesignSolution> {
        let check = outage_satisfied(self.n, c.var_e, req.snr.gamma_pre, req.gamma_min, req.p_out)?;
        Ok(DesignSolution {
            feasible: true,
            n_radios: self.n,
            n_zc: c.n_zc,
            n_ph: c.n_ph,
            n_fb: c.n_fb,
            var_e: c.var_e,
            overhead: self.overhead(c.n_zc, c.n_ph, c.n_fb),
            t_e: self.t_e(c.n_ph, c.n_fb),
            predicted_outage: Some(check.outage),
            note: None,
        })
    }
}

/// Phase error variance the designer assigns to a preamble triple.
pub fn phase_error_variance(
    req: &DesignRequirement,
    n: usize,
    fixed: &FixedParts,
    n_zc: usize,
    n_ph: usize,
    n_fb: usize,
) -> Result<f64> {
    if n_zc < 2 || n_ph == 0 || n_fb == 0 {
        return Err(param_err!("preamble lengths out of range"));
    }
    let obj = Objective::new(req, n, fixed)?;
    Ok(obj.eval(obj.freq_var(n_zc), n_zc, n_ph, n_fb).var_e)
}

/// Overhead in samples the designer assigns to a preamble triple.
pub fn design_overhead(
    n: usize,
    fixed: &FixedParts,
    n_zc: usize,
    n_ph: usize,
    n_fb: usize,
) -> usize {
    n_zc * fixed.zc_length + n * (n_ph + n_fb) + fixed.guards.iter().sum::<usize>()
}

/// Least phase error variance within `req.overhead_budget`.
pub fn solve_p1(req: &DesignRequirement, n: usize, fixed: &FixedParts) -> Result<DesignSolution> {
    req.validate()?;
    let budget = req
        .overhead_budget
        .ok_or_else(|| param_err!("least-variance design needs an overhead budget"))?;
    let obj = Objective::new(req, n, fixed)?;
    match obj.solve_budget(budget) {
        Some(c) => obj.solution(c, req),
        None => Ok(DesignSolution::infeasible(
            n,
            alloc::format!(
                "overhead budget {budget} is below the minimum {} for {n} radios",
                obj.min_overhead()
            ),
        )),
    }
}

/// Least overhead whose best design meets `req.variance_budget`.
pub fn solve_p2(req: &DesignRequirement, n: usize, fixed: &FixedParts) -> Result<DesignSolution> {
    req.validate()?;
    let target = req
        .variance_budget
        .ok_or_else(|| param_err!("least-overhead design needs a variance budget"))?;
    let obj = Objective::new(req, n, fixed)?;
    let meets = |b: usize| obj.solve_budget(b).filter(|c| c.var_e <= target);
    let lo_start = obj.min_overhead();
    if req.max_overhead < lo_start || meets(req.max_overhead).is_none() {
        return Ok(DesignSolution::infeasible(
            n,
            alloc::format!(
                "variance budget {target} not reachable within {} samples of overhead",
                req.max_overhead
            ),
        ));
    }
    // The optimum of the least-variance problem is nonincreasing in the
    // budget, so the smallest sufficient budget is found by bisection.
    let (mut lo, mut hi) = (lo_start, lo_start);
    while meets(hi).is_none() {
        lo = hi + 1;
        hi = (hi.saturating_mul(2)).min(req.max_overhead);
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if meets(mid).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let c = meets(hi).expect("bracketed budget is sufficient");
    obj.solution(c, req)
}

/// Smallest fleet in the requirement's bounds whose least-variance design
/// meets the outage target.
pub fn min_radios(req: &DesignRequirement, fixed: &FixedParts) -> Result<DesignSolution> {
    req.validate()?;
    let (lo, hi) = req.n_bounds;
    let start = lo.max(req.ideal_radios());
    if start > hi {
        return Ok(DesignSolution::infeasible(
            start,
            alloc::format!(
                "ideal beamforming already needs {start} radios, above the limit of {hi}; \
                 increase transmit power"
            ),
        ));
    }
    for n in start..=hi {
        let sol = solve_p1(req, n, fixed)?;
        if !sol.feasible {
            return Ok(DesignSolution::infeasible(
                n,
                alloc::format!(
                    "{}; increase the overhead budget or the transmit power",
                    sol.note.unwrap_or_default()
                ),
            ));
        }
        let check = outage_satisfied(n, sol.var_e, req.snr.gamma_pre, req.gamma_min, req.p_out)?;
        if check.satisfied {
            return Ok(sol);
        }
    }
    Ok(DesignSolution::infeasible(
        hi,
        alloc::format!(
            "outage target not met with up to {hi} radios; increase the overhead budget or the \
             transmit power"
        ),
    ))
}

/// Largest `σ²_e` (to [`VARIANCE_TOLERANCE`]) for which `n` radios meet the
/// outage target; `None` when even perfect phases do not. Returns infinity
/// when the target is met at any variance.
pub fn variance_target(req: &DesignRequirement, n: usize) -> Result<Option<f64>> {
    req.validate()?;
    let ok = |v: f64| -> Result<bool> {
        Ok(outage_satisfied(n, v, req.snr.gamma_pre, req.gamma_min, req.p_out)?.satisfied)
    };
    if !ok(0.0)? {
        return Ok(None);
    }
    let mut hi = 1.0;
    while ok(hi)? {
        if hi >= VARIANCE_CAP {
            return Ok(Some(f64::INFINITY));
        }
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > VARIANCE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}
