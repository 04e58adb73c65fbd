//! Paired Monte Carlo trials over Rayleigh channels.
//!
//! Trial `i` draws its channel from seed `base_seed + i`. A draw on which
//! some zero-forcing beam is degenerate is replaced by the draw at seed
//! `base_seed + i + a * REDRAW_STRIDE` for attempt `a = 1, 2, ..`. Every
//! requested scheme is evaluated on the same channel, and trials are
//! reduced in index order so results do not depend on thread scheduling.

use std::fmt;

use cc_miso_core::channel::sample_channel;
use cc_miso_core::rates::{MulticastGains, ZeroForcingGains};
use cc_miso_core::{BeamSolver, ChannelMatrix, Error, Scheme, SystemConfig};
use rayon::prelude::*;

use crate::{db_to_linear, HarnessError, Result};

pub const REDRAW_STRIDE: u64 = 1 << 32;
pub const MAX_DRAWS: u32 = 16;
/// Angular step of the exhaustive beam search used for high-SNR slopes.
pub const DOF_GRID_STEP: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub cfg: SystemConfig,
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub base_seed: u64,
    pub schemes: Vec<Scheme>,
    pub solver: BeamSolver,
}

impl SweepSpec {
    /// All three schemes, SDR beamformer.
    pub fn new(cfg: SystemConfig, snr_db: Vec<f64>, trials: u64, base_seed: u64) -> Self {
        Self { cfg, snr_db, trials, base_seed, schemes: Scheme::ALL.to_vec(), solver: BeamSolver::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(HarnessError::InvalidSpec("at least one trial is needed".into()));
        }
        if self.snr_db.is_empty() || self.snr_db.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(HarnessError::InvalidSpec("SNR grid must be non-empty and strictly increasing".into()));
        }
        if self.schemes.is_empty() {
            return Err(HarnessError::InvalidSpec("no scheme requested".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub snr_db: f64,
    pub scheme: Scheme,
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub cfg: SystemConfig,
    pub solver: BeamSolver,
    pub base_seed: u64,
    /// Channel draws discarded as degenerate.
    pub redraws: u64,
    /// Grid-major, schemes in request order.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn schemes(&self) -> Vec<Scheme> {
        let mut out: Vec<Scheme> = Vec::new();
        for row in &self.rows {
            if !out.contains(&row.scheme) {
                out.push(row.scheme);
            }
        }
        out
    }

    /// `(snr_db, mean)` of one scheme in grid order.
    pub fn curve(&self, scheme: Scheme) -> Vec<(f64, f64)> {
        self.rows.iter().filter(|r| r.scheme == scheme).map(|r| (r.snr_db, r.mean)).collect()
    }

    pub fn row(&self, snr_db: f64, scheme: Scheme) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.scheme == scheme && r.snr_db == snr_db)
    }
}

pub fn solver_label(solver: &BeamSolver) -> &'static str {
    match solver {
        BeamSolver::Sdr(_) => "sdr",
        BeamSolver::Grid { .. } => "grid",
    }
}

/// Beams and gains of one channel for the requested schemes. None of them
/// depends on the SNR, so one evaluation serves a whole grid.
pub struct TrialGains {
    pub channel: ChannelMatrix,
    multicast: Option<MulticastGains>,
    zero_forcing: Option<ZeroForcingGains>,
}

impl TrialGains {
    pub fn compute(cfg: &SystemConfig, channel: ChannelMatrix, schemes: &[Scheme], solver: BeamSolver) -> cc_miso_core::Result<Self> {
        let multicast = if schemes.contains(&Scheme::MaxMinMulticast) {
            Some(MulticastGains::compute(&channel, cfg, solver)?)
        } else {
            None
        };
        let zero_forcing = if schemes.iter().any(|s| *s != Scheme::MaxMinMulticast) {
            Some(ZeroForcingGains::compute(&channel, cfg)?)
        } else {
            None
        };
        Ok(Self { channel, multicast, zero_forcing })
    }

    /// Symmetric rate of `scheme` at linear SNR `snr`.
    pub fn rate(&self, cfg: &SystemConfig, scheme: Scheme, snr: f64) -> Option<f64> {
        let report = match scheme {
            Scheme::MaxMinMulticast => self.multicast.as_ref()?.report(cfg, snr),
            Scheme::ZeroForcingComplex => self.zero_forcing.as_ref()?.complex_report(cfg, snr),
            Scheme::ZeroForcingFinite => self.zero_forcing.as_ref()?.finite_report(cfg, snr),
        };
        Some(report.symmetric_rate)
    }
}

fn is_degenerate(e: &Error) -> bool {
    matches!(e, Error::DegenerateChannel { .. } | Error::SingularGain { .. })
}

/// Seed of draw `attempt` (0 for the first) of trial `trial`.
pub fn trial_seed(base_seed: u64, trial: u64, attempt: u32) -> u64 {
    base_seed.wrapping_add(trial).wrapping_add(REDRAW_STRIDE.wrapping_mul(attempt as u64))
}

/// The first non-degenerate draw of trial `trial` and the number of draws
/// discarded before it.
pub fn trial_gains(
    cfg: &SystemConfig,
    base_seed: u64,
    trial: u64,
    schemes: &[Scheme],
    solver: BeamSolver,
) -> Result<(TrialGains, u32)> {
    for attempt in 0..MAX_DRAWS {
        let seed = trial_seed(base_seed, trial, attempt);
        match TrialGains::compute(cfg, sample_channel(cfg, seed), schemes, solver) {
            Ok(g) => return Ok((g, attempt)),
            Err(e) if is_degenerate(&e) => log::warn!("trial {trial}: discarding channel seed {seed}: {e}"),
            Err(e) => return Err(e.into()),
        }
    }
    Err(HarnessError::Redraws { trial, attempts: MAX_DRAWS })
}

/// Running mean and variance (Welford).
#[derive(Debug, Default, Clone, Copy)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let snrs: Vec<f64> = spec.snr_db.iter().map(|&db| db_to_linear(db)).collect();
    let per_trial: Vec<(Vec<f64>, u32)> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let (gains, redraws) = trial_gains(&spec.cfg, spec.base_seed, trial, &spec.schemes, spec.solver)?;
            let mut rates = Vec::with_capacity(snrs.len() * spec.schemes.len());
            for &snr in &snrs {
                for &scheme in &spec.schemes {
                    rates.push(gains.rate(&spec.cfg, scheme, snr).expect("gains computed for every requested scheme"));
                }
            }
            Ok((rates, redraws))
        })
        .collect::<Result<_>>()?;

    let mut moments = vec![Moments::default(); snrs.len() * spec.schemes.len()];
    let mut redraws = 0;
    for (rates, r) in &per_trial {
        redraws += *r as u64;
        for (m, &x) in moments.iter_mut().zip(rates) {
            m.push(x);
        }
    }
    let mut rows = Vec::with_capacity(moments.len());
    for (i, &db) in spec.snr_db.iter().enumerate() {
        for (j, &scheme) in spec.schemes.iter().enumerate() {
            let m = moments[i * spec.schemes.len() + j];
            rows.push(SweepRow { snr_db: db, scheme, mean: m.mean, stderr: m.stderr(), trials: m.n });
        }
    }
    Ok(SweepResult { cfg: spec.cfg.clone(), solver: spec.solver, base_seed: spec.base_seed, redraws, rows })
}

/// SNR in dB at which `mean(a) - mean(b)` first changes sign, by linear
/// interpolation between the two grid points around the change.
pub fn find_crossover(result: &SweepResult, a: Scheme, b: Scheme) -> Result<Option<f64>> {
    let ca = result.curve(a);
    let cb = result.curve(b);
    if ca.is_empty() {
        return Err(HarnessError::missing(a));
    }
    if cb.is_empty() {
        return Err(HarnessError::missing(b));
    }
    let diff: Vec<(f64, f64)> = ca
        .iter()
        .filter_map(|&(x, ya)| cb.iter().find(|(xb, _)| *xb == x).map(|&(_, yb)| (x, ya - yb)))
        .collect();
    let mut last: Option<(f64, f64)> = None;
    let mut first_zero: Option<f64> = None;
    for &(x, d) in &diff {
        if d == 0.0 {
            if last.is_some() && first_zero.is_none() {
                first_zero = Some(x);
            }
            continue;
        }
        if let Some((x0, d0)) = last {
            if (d0 > 0.0) != (d > 0.0) {
                if let Some(z) = first_zero {
                    return Ok(Some(z));
                }
                return Ok(Some(x0 + d0 / (d0 - d) * (x - x0)));
            }
        }
        last = Some((x, d));
        first_zero = None;
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DofEstimate {
    pub scheme: Scheme,
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl fmt::Display for DofEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "scheme {}: {:.4} +- {:.4} ({} trials)", self.scheme.number(), self.mean, self.stderr, self.trials)
    }
}

/// Mean over trials of `(R(hi) - R(lo)) / (log2 snr_hi - log2 snr_lo)`.
///
/// With two antennas the max-min multicast beams come from the exhaustive
/// search at [`DOF_GRID_STEP`] instead of `solver`.
pub fn estimate_dof(
    cfg: &SystemConfig,
    scheme: Scheme,
    snr_lo_db: f64,
    snr_hi_db: f64,
    trials: u64,
    base_seed: u64,
    solver: BeamSolver,
) -> Result<DofEstimate> {
    if !(snr_lo_db < snr_hi_db) {
        return Err(HarnessError::InvalidSpec("the low SNR must be below the high SNR".into()));
    }
    if trials == 0 {
        return Err(HarnessError::InvalidSpec("at least one trial is needed".into()));
    }
    let solver = if scheme == Scheme::MaxMinMulticast && cfg.antennas() == 2 {
        BeamSolver::Grid { step: DOF_GRID_STEP }
    } else {
        solver
    };
    let (lo, hi) = (db_to_linear(snr_lo_db), db_to_linear(snr_hi_db));
    let span = hi.log2() - lo.log2();
    let slopes: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (gains, _) = trial_gains(cfg, base_seed, trial, &[scheme], solver)?;
            let r_hi = gains.rate(cfg, scheme, hi).expect("requested scheme");
            let r_lo = gains.rate(cfg, scheme, lo).expect("requested scheme");
            Ok((r_hi - r_lo) / span)
        })
        .collect::<Result<_>>()?;
    let mut m = Moments::default();
    for s in slopes {
        m.push(s);
    }
    Ok(DofEstimate { scheme, mean: m.mean, stderr: m.stderr(), trials })
}
