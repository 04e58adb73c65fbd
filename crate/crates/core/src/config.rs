use alloc::format;

use num_rational::Ratio;

use crate::combinatorics::binomial;
use crate::error::{Error, Result};

/// A problem instance: `K` users, `L` transmit antennas, a library of `N`
/// files of `F` bits each and a per-user cache of `M` files.
///
/// Construction enforces that the replication factor `t = MK/N` is a
/// positive integer, `K >= L` and `t + L <= K`, so every zero-forcing
/// group of `t + L` users exists.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    users: usize,
    antennas: usize,
    files: usize,
    cache: Ratio<u64>,
    replication: usize,
    file_bits: u64,
    snr: f64,
    coherence_block: u64,
}

impl SystemConfig {
    /// Validated configuration with the default file size and `snr = 1`.
    pub fn new(users: usize, antennas: usize, files: usize, cache: Ratio<u64>) -> Result<Self> {
        if users == 0 || antennas == 0 || files == 0 {
            return Err(Error::InvalidConfig(format!(
                "K, L and N must be positive (K={users}, L={antennas}, N={files})"
            )));
        }
        if cache > Ratio::from_integer(files as u64) {
            return Err(Error::InvalidConfig(format!("cache size M={cache} exceeds the library N={files}")));
        }
        let t = cache * Ratio::from_integer(users as u64) / Ratio::from_integer(files as u64);
        if !t.is_integer() {
            return Err(Error::InvalidConfig(format!("t = MK/N = {t} is not an integer")));
        }
        let t = t.to_integer() as usize;
        if t == 0 {
            return Err(Error::InvalidConfig("t = MK/N must be at least 1".into()));
        }
        if users < antennas {
            return Err(Error::InvalidConfig(format!("K={users} must be at least L={antennas}")));
        }
        if t + antennas > users {
            return Err(Error::InvalidConfig(format!(
                "t + L = {} exceeds K = {users}; no zero-forcing groups exist",
                t + antennas
            )));
        }
        let mut cfg = Self {
            users,
            antennas,
            files,
            cache,
            replication: t,
            file_bits: 0,
            snr: 1.0,
            coherence_block: 1 << 16,
        };
        cfg.file_bits = cfg.default_file_bits();
        Ok(cfg)
    }

    /// Integer cache size shorthand.
    pub fn with_integer_cache(users: usize, antennas: usize, files: usize, cache: u64) -> Result<Self> {
        Self::new(users, antennas, files, Ratio::from_integer(cache))
    }

    pub fn with_file_bits(mut self, bits: u64) -> Result<Self> {
        let unit = self.minifile_count();
        if bits == 0 || bits % unit != 0 {
            return Err(Error::InvalidConfig(format!(
                "F={bits} is not a positive multiple of C(K,t)*C(K-t-1,L-1) = {unit}"
            )));
        }
        self.file_bits = bits;
        Ok(self)
    }

    pub fn with_snr(mut self, snr: f64) -> Result<Self> {
        if !(snr.is_finite() && snr > 0.0) {
            return Err(Error::InvalidConfig(format!("snr must be a positive finite ratio, got {snr}")));
        }
        self.snr = snr;
        Ok(self)
    }

    pub fn with_coherence_block(mut self, channel_uses: u64) -> Self {
        self.coherence_block = channel_uses;
        self
    }

    /// `K`
    pub fn users(&self) -> usize {
        self.users
    }

    /// `L`
    pub fn antennas(&self) -> usize {
        self.antennas
    }

    /// `N`
    pub fn files(&self) -> usize {
        self.files
    }

    /// `M`, in files.
    pub fn cache(&self) -> Ratio<u64> {
        self.cache
    }

    /// `t = MK/N`
    pub fn t(&self) -> usize {
        self.replication
    }

    /// `F`, in bits.
    pub fn file_bits(&self) -> u64 {
        self.file_bits
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    /// Coherence block length in channel uses. Recorded only.
    pub fn coherence_block(&self) -> u64 {
        self.coherence_block
    }

    /// Mini-files per subfile, `C(K-t-1, L-1)`.
    pub fn minis_per_subfile(&self) -> u64 {
        binomial(self.users - self.replication - 1, self.antennas - 1)
    }

    /// Mini-files per file, `C(K,t) * C(K-t-1, L-1)`.
    pub fn minifile_count(&self) -> u64 {
        binomial(self.users, self.replication) * self.minis_per_subfile()
    }

    pub fn minifile_bits(&self) -> u64 {
        self.file_bits / self.minifile_count()
    }

    /// Zero-forcing group size `t + L`.
    pub fn group_size(&self) -> usize {
        self.replication + self.antennas
    }

    /// `q = C(t+L, t+1)`: multicast targets inside one zero-forcing group.
    pub fn targets_per_group(&self) -> u64 {
        binomial(self.group_size(), self.replication + 1)
    }

    /// `v = C(t+L-1, t)`: targets inside a group containing a given user.
    pub fn targets_per_user(&self) -> u64 {
        binomial(self.group_size() - 1, self.replication)
    }

    /// Smallest multiple of `C(K,t) * C(K-t-1,L-1) * 8` that is at least 1024.
    fn default_file_bits(&self) -> u64 {
        let unit = self.minifile_count() * 8;
        1024u64.div_ceil(unit) * unit
    }
}
