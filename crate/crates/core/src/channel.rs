//! Flat-fading MISO broadcast channel `y_k = h_k^H X + z_k`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::{inner, CMatrix};

/// One channel realization: user `k` sees `h_k` (length `L`) and receives
/// `h_k^H x` for a transmitted antenna vector `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: Vec<Vec<Complex64>>,
    antennas: usize,
    seed: Option<u64>,
}

impl ChannelMatrix {
    /// I.i.d. `CN(0, 1)` entries drawn from ChaCha8 seeded with `seed`,
    /// user-major then antenna, real part before imaginary part.
    pub fn rayleigh(users: usize, antennas: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = core::f64::consts::FRAC_1_SQRT_2;
        let rows = (0..users)
            .map(|_| {
                (0..antennas)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex64::new(re * scale, im * scale)
                    })
                    .collect()
            })
            .collect();
        Self { rows, antennas, seed: Some(seed) }
    }

    /// Channel from explicit per-user vectors `h_k`.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let antennas = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != antennas) {
            return Err(Error::DimensionMismatch { expected: antennas, got: bad.len() });
        }
        if rows.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::InvalidConfig("channel entries must be finite".into()));
        }
        Ok(Self { rows, antennas, seed: None })
    }

    pub fn users(&self) -> usize {
        self.rows.len()
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    /// Seed the realization was drawn from, if any.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `h_k`
    pub fn user(&self, k: usize) -> &[Complex64] {
        &self.rows[k]
    }

    /// `h_k^H u`
    pub fn gain(&self, k: usize, u: &[Complex64]) -> Complex64 {
        inner(&self.rows[k], u)
    }

    /// Every channel coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows.iter().map(|r| r.iter().map(|z| z * factor).collect()).collect(),
            antennas: self.antennas,
            seed: self.seed,
        }
    }
}

/// Draws the channel of a configuration. Only `K` and `L` are read from `cfg`.
pub fn sample_channel(cfg: &SystemConfig, seed: u64) -> ChannelMatrix {
    ChannelMatrix::rayleigh(cfg.users(), cfg.antennas(), seed)
}

/// An `L x n` space-time block: column `j` is the antenna vector sent in
/// channel use `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalBlock {
    samples: CMatrix,
}

impl SignalBlock {
    pub fn zeros(antennas: usize, channel_uses: usize) -> Self {
        Self { samples: CMatrix::zeros(antennas, channel_uses) }
    }

    pub fn from_matrix(samples: CMatrix) -> Self {
        Self { samples }
    }

    pub fn antennas(&self) -> usize {
        self.samples.rows()
    }

    pub fn channel_uses(&self) -> usize {
        self.samples.cols()
    }

    pub fn samples(&self) -> &CMatrix {
        &self.samples
    }

    /// Adds `beam * sequence[j]` to channel use `j` for every `j`.
    pub fn add_beamformed(&mut self, beam: &[Complex64], sequence: &[Complex64]) {
        assert_eq!(beam.len(), self.antennas());
        assert_eq!(sequence.len(), self.channel_uses());
        for (i, &b) in beam.iter().enumerate() {
            for (j, &s) in sequence.iter().enumerate() {
                self.samples[(i, j)] += b * s;
            }
        }
    }
}

/// `(1 / nL) * sum_ij |X_ij|^2`, the left side of the total power constraint.
pub fn block_power(block: &SignalBlock) -> f64 {
    let (l, n) = (block.antennas(), block.channel_uses());
    if l == 0 || n == 0 {
        return 0.0;
    }
    let total: f64 = (0..l).flat_map(|i| block.samples.row(i).iter()).map(|z| z.norm_sqr()).sum();
    total / (n * l) as f64
}

/// `y_k = h_k^H X + z_k` over the `n` channel uses of `block`.
pub fn received_signal(
    channel: &ChannelMatrix,
    block: &SignalBlock,
    user: usize,
    noise: Option<&[Complex64]>,
) -> Result<Vec<Complex64>> {
    if block.antennas() != channel.antennas() {
        return Err(Error::DimensionMismatch { expected: channel.antennas(), got: block.antennas() });
    }
    if user >= channel.users() {
        return Err(Error::DimensionMismatch { expected: channel.users(), got: user + 1 });
    }
    if let Some(z) = noise {
        if z.len() != block.channel_uses() {
            return Err(Error::DimensionMismatch { expected: block.channel_uses(), got: z.len() });
        }
    }
    let h = channel.user(user);
    let mut y: Vec<Complex64> = alloc::vec![Complex64::new(0.0, 0.0); block.channel_uses()];
    for (i, hi) in h.iter().enumerate() {
        let c = hi.conj();
        for (yj, x) in y.iter_mut().zip(block.samples.row(i)) {
            *yj += c * x;
        }
    }
    if let Some(z) = noise {
        for (yj, zj) in y.iter_mut().zip(z) {
            *yj += zj;
        }
    }
    Ok(y)
}
