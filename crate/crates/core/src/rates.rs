//! Finite-SNR symmetric rates of the three delivery schemes, in bits per
//! channel use per user, and their high-SNR degrees of freedom.
//!
//! Every scheme serves a list of user groups one after another. When group
//! `S` is served at rate `R(S)` and each user decodes a fraction `1/P` of its
//! file per group, the symmetric rate is `P / sum_S 1/R(S)`:
//!
//! | scheme | groups | `P` |
//! |---|---|---|
//! | max-min multicast | `(t+1)`-subsets | `C(K,t)` |
//! | zero-forcing, complex or finite field | `(t+L)`-subsets | `C(K,t) C(K-t-1,L-1) / C(t+L-1,t)` |

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::Float;

use crate::beamforming::{maxmin_beamformer, zero_forcing_bfv, BeamSolver, BeamVector};
use crate::channel::ChannelMatrix;
use crate::combinatorics::{binomial, enumerate_subsets, Subset};
use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// The three delivery schemes, numbered as on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// Coded caching over max-min fair multicast beams.
    MaxMinMulticast = 1,
    /// Zero-forcing with chunks combined in the complex field.
    ZeroForcingComplex = 2,
    /// Zero-forcing with chunks combined by XOR.
    ZeroForcingFinite = 3,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::MaxMinMulticast, Scheme::ZeroForcingComplex, Scheme::ZeroForcingFinite];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.number() == n)
    }

    /// `P` in `R_sym = P / sum_S 1/R(S)`.
    pub fn prefactor(self, cfg: &SystemConfig) -> f64 {
        let (k, l, t) = (cfg.users(), cfg.antennas(), cfg.t());
        match self {
            Scheme::MaxMinMulticast => binomial(k, t) as f64,
            Scheme::ZeroForcingComplex | Scheme::ZeroForcingFinite => {
                (binomial(k, t) * binomial(k - t - 1, l - 1)) as f64 / binomial(t + l - 1, t) as f64
            }
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::MaxMinMulticast => "max-min multicast",
            Scheme::ZeroForcingComplex => "zero-forcing, complex field",
            Scheme::ZeroForcingFinite => "zero-forcing, finite field",
        })
    }
}

/// Symmetric rate of one scheme on one channel at one SNR, with the
/// per-group rates it was assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub scheme: Scheme,
    pub snr: f64,
    pub group_rates: Vec<(Subset, f64)>,
    pub symmetric_rate: f64,
    pub channel_seed: Option<u64>,
}

impl RateReport {
    fn assemble(scheme: Scheme, cfg: &SystemConfig, snr: f64, group_rates: Vec<(Subset, f64)>, seed: Option<u64>) -> Self {
        let symmetric_rate = harmonic_rate(scheme.prefactor(cfg), group_rates.iter().map(|(_, r)| *r));
        Self { scheme, snr, group_rates, symmetric_rate, channel_seed: seed }
    }

    /// Re-derives the symmetric rate from `group_rates`.
    pub fn recompute(&self, cfg: &SystemConfig) -> f64 {
        harmonic_rate(self.scheme.prefactor(cfg), self.group_rates.iter().map(|(_, r)| *r))
    }
}

/// `prefactor / sum 1/r`, zero as soon as one group rate is zero.
pub fn harmonic_rate(prefactor: f64, rates: impl IntoIterator<Item = f64>) -> f64 {
    let mut inverse_sum = 0.0;
    for r in rates {
        if r <= 0.0 {
            return 0.0;
        }
        inverse_sum += 1.0 / r;
    }
    if inverse_sum == 0.0 {
        0.0
    } else {
        prefactor / inverse_sum
    }
}

fn log2_1p(x: f64) -> f64 {
    Float::ln_1p(x) / core::f64::consts::LN_2
}

/// Common rate of a multicast beam: `min_{k in S} log2(1 + |h_k^H w|^2 snr)`.
pub fn groupcast_rate(channel: &ChannelMatrix, group: &Subset, beam: &[Complex64], snr: f64) -> f64 {
    group
        .members()
        .iter()
        .map(|&k| log2_1p(channel.gain(k, beam).norm_sqr() * snr))
        .fold(f64::INFINITY, f64::min)
}

/// Max-min beams for every `(t+1)`-subset, computed once per channel so the
/// multicast scheme can be evaluated at many SNRs.
#[derive(Debug, Clone)]
pub struct MulticastGains {
    /// `(S, beam, min_{k in S} |h_k^H w_S|^2)`
    pub groups: Vec<(Subset, BeamVector, f64)>,
    channel_seed: Option<u64>,
}

impl MulticastGains {
    pub fn compute(channel: &ChannelMatrix, cfg: &SystemConfig, solver: BeamSolver) -> Result<Self> {
        let groups = enumerate_subsets(cfg.users(), cfg.t() + 1)
            .into_iter()
            .map(|group| {
                let (beam, value) = maxmin_beamformer(channel, &group, solver)?;
                Ok((group, beam, value * value))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { groups, channel_seed: channel.seed() })
    }

    pub fn report(&self, cfg: &SystemConfig, snr: f64) -> RateReport {
        let rates = self.groups.iter().map(|(g, _, gain)| (g.clone(), log2_1p(gain * snr))).collect();
        RateReport::assemble(Scheme::MaxMinMulticast, cfg, snr, rates, self.channel_seed)
    }
}

/// Symmetric rate of coded caching over max-min fair multicast, at `cfg.snr()`.
pub fn symrate_maxmin(channel: &ChannelMatrix, cfg: &SystemConfig, solver: BeamSolver) -> Result<RateReport> {
    Ok(MulticastGains::compute(channel, cfg, solver)?.report(cfg, cfg.snr()))
}

/// Zero-forcing beams of one `(t+L)`-group and the gains they produce.
#[derive(Debug, Clone)]
pub struct GroupGains {
    pub group: Subset,
    /// `u_S^T` for every `(t+1)`-subset `T` of `S`, lexicographic in `T`.
    pub beams: Vec<BeamVector>,
    /// For every `r` in `S`: `h_r^H u_S^T` over the `T` containing `r`,
    /// lexicographic in `T`.
    pub user_gains: Vec<(usize, Vec<Complex64>)>,
}

impl GroupGains {
    pub fn compute(channel: &ChannelMatrix, cfg: &SystemConfig, group: &Subset) -> Result<Self> {
        if group.len() != cfg.group_size() {
            return Err(Error::SubsetSize { subset: group.clone(), expected: cfg.group_size(), got: group.len() });
        }
        let beams = group
            .subsets(cfg.t() + 1)
            .iter()
            .map(|target| zero_forcing_bfv(channel, group, target))
            .collect::<Result<Vec<_>>>()?;
        Self::from_beams(channel, cfg, group, beams)
    }

    pub fn from_beams(channel: &ChannelMatrix, cfg: &SystemConfig, group: &Subset, beams: Vec<BeamVector>) -> Result<Self> {
        let mut user_gains = Vec::with_capacity(group.len());
        for &r in group.members() {
            let gains = group
                .subsets(cfg.t() + 1)
                .into_iter()
                .filter(|target| target.contains(r))
                .map(|target| {
                    let beam = beams.iter().find(|b| b.target == target).ok_or(Error::MissingBeam(target))?;
                    Ok(channel.gain(r, &beam.weights))
                })
                .collect::<Result<Vec<_>>>()?;
            user_gains.push((r, gains));
        }
        Ok(Self { group: group.clone(), beams, user_gains })
    }

    /// `log2(1 + snr/(t+L) * min_{T} min_{r in T} |h_r^H u_S^T|^2)`
    pub fn complex_rate(&self, cfg: &SystemConfig, snr: f64) -> f64 {
        let weakest = self
            .user_gains
            .iter()
            .flat_map(|(_, g)| g.iter())
            .map(|g| g.norm_sqr())
            .fold(f64::INFINITY, f64::min);
        log2_1p(snr / cfg.group_size() as f64 * weakest)
    }

    /// `min_{r in S} R_eff(r)` with the MAC equal-rate point per user.
    pub fn finite_rate(&self, cfg: &SystemConfig, snr: f64) -> f64 {
        self.user_gains
            .iter()
            .map(|(_, g)| mac_effective_rate(g, snr, cfg.t(), cfg.antennas()).expect("gain count fixed by construction"))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Per-group rate of the complex-field scheme from explicit beams.
pub fn subset_rate_complex(
    channel: &ChannelMatrix,
    cfg: &SystemConfig,
    group: &Subset,
    snr: f64,
    beams: &[BeamVector],
) -> Result<f64> {
    Ok(GroupGains::from_beams(channel, cfg, group, beams.to_vec())?.complex_rate(cfg, snr))
}

/// Per-group rate of the finite-field scheme from explicit beams.
pub fn subset_rate_finite(
    channel: &ChannelMatrix,
    cfg: &SystemConfig,
    group: &Subset,
    snr: f64,
    beams: &[BeamVector],
) -> Result<f64> {
    Ok(GroupGains::from_beams(channel, cfg, group, beams.to_vec())?.finite_rate(cfg, snr))
}

/// Rate at which user `r` absorbs useful data when its `v = C(t+L-1, t)`
/// streams, each scaled by `1/sqrt(q)` with `q = C(t+L, t+1)`, are decoded
/// as a multiple access channel operated at equal per-stream rates:
///
/// `min( log2(1 + sum_i |g_i|^2 snr/q), v * min_i log2(1 + |g_i|^2 snr/q) )`.
pub fn mac_effective_rate(gains: &[Complex64], snr: f64, t: usize, antennas: usize) -> Result<f64> {
    let v = binomial(t + antennas - 1, t) as usize;
    if gains.len() != v {
        return Err(Error::GainCount { expected: v, got: gains.len() });
    }
    let q = binomial(t + antennas, t + 1) as f64;
    let sum_rate = log2_1p(gains.iter().map(|g| g.norm_sqr()).sum::<f64>() * snr / q);
    let weakest = gains.iter().map(|g| log2_1p(g.norm_sqr() * snr / q)).fold(f64::INFINITY, f64::min);
    Ok(sum_rate.min(v as f64 * weakest))
}

/// Zero-forcing beams and gains for every `(t+L)`-group of one channel.
#[derive(Debug, Clone)]
pub struct ZeroForcingGains {
    pub groups: Vec<GroupGains>,
    channel_seed: Option<u64>,
}

impl ZeroForcingGains {
    pub fn compute(channel: &ChannelMatrix, cfg: &SystemConfig) -> Result<Self> {
        let groups = enumerate_subsets(cfg.users(), cfg.group_size())
            .iter()
            .map(|g| GroupGains::compute(channel, cfg, g))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { groups, channel_seed: channel.seed() })
    }

    pub fn complex_report(&self, cfg: &SystemConfig, snr: f64) -> RateReport {
        let rates = self.groups.iter().map(|g| (g.group.clone(), g.complex_rate(cfg, snr))).collect();
        RateReport::assemble(Scheme::ZeroForcingComplex, cfg, snr, rates, self.channel_seed)
    }

    pub fn finite_report(&self, cfg: &SystemConfig, snr: f64) -> RateReport {
        let rates = self.groups.iter().map(|g| (g.group.clone(), g.finite_rate(cfg, snr))).collect();
        RateReport::assemble(Scheme::ZeroForcingFinite, cfg, snr, rates, self.channel_seed)
    }
}

/// Symmetric rate of the complex-field zero-forcing scheme at `cfg.snr()`.
pub fn symrate_complex(channel: &ChannelMatrix, cfg: &SystemConfig) -> Result<RateReport> {
    Ok(ZeroForcingGains::compute(channel, cfg)?.complex_report(cfg, cfg.snr()))
}

/// Symmetric rate of the finite-field zero-forcing scheme at `cfg.snr()`.
pub fn symrate_finite(channel: &ChannelMatrix, cfg: &SystemConfig) -> Result<RateReport> {
    Ok(ZeroForcingGains::compute(channel, cfg)?.finite_report(cfg, cfg.snr()))
}

/// Per-user degrees of freedom:
/// `(1 + KM/N) / (K (1 - M/N))` for max-min multicast and
/// `(L + KM/N) / (K (1 - M/N))` for both zero-forcing schemes.
pub fn dof(scheme: Scheme, users: u64, antennas: u64, files: u64, cache: Ratio<u64>) -> Result<Ratio<u64>> {
    let n = Ratio::from_integer(files);
    if cache >= n {
        return Err(Error::FullCache);
    }
    let k = Ratio::from_integer(users);
    let streams = match scheme {
        Scheme::MaxMinMulticast => Ratio::from_integer(1),
        Scheme::ZeroForcingComplex | Scheme::ZeroForcingFinite => Ratio::from_integer(antennas),
    };
    // multiply numerator and denominator by N to stay in unsigned arithmetic
    Ok((streams * n + k * cache) / (k * (n - cache)))
}

/// Length of the plain coded-caching delivery over an error-free shared
/// link, in files: `K (1 - M/N) / (1 + MK/N)`.
pub fn mn_transmission_length(users: u64, files: u64, cache: Ratio<u64>) -> Ratio<u64> {
    let n = Ratio::from_integer(files);
    let k = Ratio::from_integer(users);
    let cache = cache.min(n);
    k * (n - cache) / (n + k * cache)
}
