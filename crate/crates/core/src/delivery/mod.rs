//! Symbol-level delivery for the two zero-forcing schemes.
//!
//! [`run_delivery_complex`] sends, for every `(t+L)`-group `S`, `v` blocks
//! in which each `(t+1)`-subset `T` carries a linear combination of the
//! mini-files wanted by its members. [`run_delivery_finite`] sends one
//! block per group in which each `T` carries the XOR of those mini-files.
//! Both return the full transcript and what every user decoded from it,
//! and [`verify_delivery`] checks the result.
//!
//! Groups and targets are processed in lexicographic order. Mini-file bits
//! reach the antennas through [`modem`], so decoding is bit-exact in the
//! absence of noise.

mod complex;
mod finite;
pub mod modem;
mod sigma;
mod unitary;
mod verify;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, Uniform};

use crate::channel::{ChannelMatrix, SignalBlock};
use crate::combinatorics::{placement_map, IndexCounter, Subset, SubfileId};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::rates::GroupGains;

pub use complex::{decode_complex, run_delivery_complex};
pub use finite::{decode_finite, run_delivery_finite};
pub use sigma::{assign_sigmas, SigmaAssignment};
pub use unitary::build_unitary;
pub use verify::{verify_delivery, VerificationReport, Violation};

/// Diagonal gains below this magnitude abort a run.
pub const SINGULAR_GAIN_TOLERANCE: f64 = 1e-9;

/// Requested file of every user, 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(demands: Vec<usize>, files: usize) -> Result<Self> {
        if let Some(&bad) = demands.iter().find(|&&d| d >= files) {
            return Err(Error::InvalidConfig(alloc::format!("demand {} exceeds the {files} files", bad + 1)));
        }
        Ok(Self(demands))
    }

    /// Random demands drawn with ChaCha8. All distinct when `files >= users`,
    /// otherwise independent and uniform.
    pub fn random(users: usize, files: usize, seed: u64) -> Self {
        assert!(files > 0, "library must not be empty");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if files >= users {
            let mut pool: Vec<usize> = (0..files).collect();
            for i in 0..users {
                let j = Uniform::new(i, files).expect("non-empty range").sample(&mut rng);
                pool.swap(i, j);
            }
            pool.truncate(users);
            Self(pool)
        } else {
            let pick = Uniform::new(0, files).expect("non-empty range");
            Self((0..users).map(|_| pick.sample(&mut rng)).collect())
        }
    }

    pub fn file(&self, user: usize) -> usize {
        self.0[user]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn users(&self) -> usize {
        self.0.len()
    }

    pub fn is_distinct(&self) -> bool {
        let mut seen = self.0.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

impl fmt::Display for DemandVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", d + 1)?;
        }
        f.write_str(")")
    }
}

/// Bytes per mini-file, or an error when mini-files are not whole bytes.
pub fn minifile_bytes(cfg: &SystemConfig) -> Result<usize> {
    let bits = cfg.minifile_bits();
    if bits == 0 || bits % 8 != 0 {
        return Err(Error::InvalidConfig(alloc::format!("mini-files of {bits} bits are not whole bytes")));
    }
    Ok((bits / 8) as usize)
}

/// The `N` files, each stored as `C(K,t) C(K-t-1,L-1)` equal mini-files in
/// [`crate::combinatorics::minifiles_of`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Library {
    files: Vec<Vec<u8>>,
    users: usize,
    minis_per_subfile: usize,
    minifile_bytes: usize,
}

impl Library {
    /// Pseudo-random file contents from ChaCha8 seeded with `seed`.
    pub fn synthetic(cfg: &SystemConfig, seed: u64) -> Result<Self> {
        let size = minifile_bytes(cfg)? * cfg.minifile_count() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let files = (0..cfg.files())
            .map(|_| {
                let mut bytes = alloc::vec![0u8; size];
                rng.fill_bytes(&mut bytes);
                bytes
            })
            .collect();
        Self::from_files(cfg, files)
    }

    pub fn from_files(cfg: &SystemConfig, files: Vec<Vec<u8>>) -> Result<Self> {
        let minifile_bytes = minifile_bytes(cfg)?;
        let size = minifile_bytes * cfg.minifile_count() as usize;
        if files.len() != cfg.files() {
            return Err(Error::DimensionMismatch { expected: cfg.files(), got: files.len() });
        }
        if let Some(bad) = files.iter().find(|f| f.len() != size) {
            return Err(Error::DimensionMismatch { expected: size, got: bad.len() });
        }
        Ok(Self { files, users: cfg.users(), minis_per_subfile: cfg.minis_per_subfile() as usize, minifile_bytes })
    }

    pub fn files(&self) -> usize {
        self.files.len()
    }

    pub fn file(&self, n: usize) -> &[u8] {
        &self.files[n]
    }

    pub fn minifile_bytes(&self) -> usize {
        self.minifile_bytes
    }

    pub fn minifile(&self, id: &SubfileId) -> &[u8] {
        let index = id.tau.rank(self.users) as usize * self.minis_per_subfile + id.mini;
        &self.files[id.file][index * self.minifile_bytes..(index + 1) * self.minifile_bytes]
    }
}

/// What one user stores after placement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserCache {
    pub user: usize,
    minis: BTreeMap<SubfileId, Vec<u8>>,
}

impl UserCache {
    pub fn fill(cfg: &SystemConfig, library: &Library, user: usize) -> Self {
        let minis = placement_map(cfg)
            .swap_remove(user)
            .into_iter()
            .map(|id| {
                let bytes = library.minifile(&id).to_vec();
                (id, bytes)
            })
            .collect();
        Self { user, minis }
    }

    pub fn get(&self, id: &SubfileId) -> Option<&[u8]> {
        self.minis.get(id).map(Vec::as_slice)
    }

    pub fn contains(&self, id: &SubfileId) -> bool {
        self.minis.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.minis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minis.is_empty()
    }
}

pub fn fill_caches(cfg: &SystemConfig, library: &Library) -> Vec<UserCache> {
    let placement = placement_map(cfg);
    placement
        .into_iter()
        .enumerate()
        .map(|(user, ids)| UserCache {
            user,
            minis: ids
                .into_iter()
                .map(|id| {
                    let bytes = library.minifile(&id).to_vec();
                    (id, bytes)
                })
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Chunks combined in the complex field, `v` blocks per group.
    Complex,
    /// Chunks combined by XOR, one block per group.
    Finite,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Complex => "complex",
            Algorithm::Finite => "finite",
        })
    }
}

/// `sigma * psi(minifile)` on spreading code `code`, wanted by `user`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearTerm {
    pub user: usize,
    pub minifile: SubfileId,
    pub sigma: Complex64,
    pub code: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChunkPayload {
    /// `G_omega(T) = sum_{r in T} sigma^omega_{r,T} psi(W_r)`.
    Linear { omega: usize, terms: Vec<LinearTerm> },
    /// `scale * psi(XOR of parts)` on spreading code `code`; each part is
    /// the mini-file wanted by the listed user.
    Xor { parts: Vec<(usize, SubfileId)>, code: usize, scale: f64 },
}

/// Data beamed along `u_S^T` for one target `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chunk {
    pub target: Subset,
    pub payload: ChunkPayload,
}

impl Chunk {
    /// `(user, mini-file)` pairs carried by the chunk.
    pub fn minifiles(&self) -> Vec<(usize, &SubfileId)> {
        match &self.payload {
            ChunkPayload::Linear { terms, .. } => terms.iter().map(|t| (t.user, &t.minifile)).collect(),
            ChunkPayload::Xor { parts, .. } => parts.iter().map(|(u, id)| (*u, id)).collect(),
        }
    }

    pub fn omega(&self) -> Option<usize> {
        match &self.payload {
            ChunkPayload::Linear { omega, .. } => Some(*omega),
            ChunkPayload::Xor { .. } => None,
        }
    }
}

/// Everything sent for one group `S`.
#[derive(Debug, Clone)]
pub struct GroupTransmission {
    pub group: Subset,
    /// Zero-forcing beams and the gains they produce at the members of `S`.
    pub gains: GroupGains,
    /// `(r, tau, N(r, tau))` read before the counters were advanced.
    pub versions: Vec<(usize, Subset, u64)>,
    /// Combining coefficients, complex-field scheme only.
    pub sigmas: Option<SigmaAssignment>,
    pub chunks: Vec<Chunk>,
    pub blocks: Vec<SignalBlock>,
    /// Length of the spreading codes used in the blocks.
    pub code_length: usize,
}

impl GroupTransmission {
    /// `h_r^H u_S^T` for every `T` containing `user`, lexicographic in `T`.
    pub fn user_gains(&self, user: usize) -> Option<&[Complex64]> {
        self.gains.user_gains.iter().find(|(r, _)| *r == user).map(|(_, g)| g.as_slice())
    }
}

#[derive(Debug, Clone)]
pub struct DeliveryTranscript {
    pub algorithm: Algorithm,
    pub demand: DemandVector,
    pub snr: f64,
    pub minifile_bytes: usize,
    pub groups: Vec<GroupTransmission>,
    /// Version counters after the last group.
    pub counters: IndexCounter,
}

impl DeliveryTranscript {
    pub fn block_count(&self) -> usize {
        self.groups.iter().map(|g| g.blocks.len()).sum()
    }

    pub fn chunk_count(&self) -> usize {
        self.groups.iter().map(|g| g.chunks.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedMiniFile {
    pub group: Subset,
    pub id: SubfileId,
    pub bytes: Vec<u8>,
    /// Distance of the worst equalized symbol from its constellation point.
    pub symbol_error: f64,
}

/// Mini-files one user extracted from a transcript.
#[derive(Debug, Clone, PartialEq)]
pub struct UserDecode {
    pub user: usize,
    pub file: usize,
    pub minifiles: Vec<DecodedMiniFile>,
}

impl UserDecode {
    /// The demanded file from the cache and the decoded mini-files, or
    /// `None` while a mini-file is missing.
    pub fn reconstruct(&self, cfg: &SystemConfig, cache: &UserCache) -> Option<Vec<u8>> {
        let decoded: BTreeMap<&SubfileId, &[u8]> = self.minifiles.iter().map(|m| (&m.id, m.bytes.as_slice())).collect();
        let mut out = Vec::new();
        for id in crate::combinatorics::minifiles_of(cfg, self.file) {
            let part = cache.get(&id).or_else(|| decoded.get(&id).copied())?;
            out.extend_from_slice(part);
        }
        Some(out)
    }
}

/// A finished run.
#[derive(Debug, Clone)]
pub struct DeliveryOutcome {
    pub transcript: DeliveryTranscript,
    pub caches: Vec<UserCache>,
    pub decoded: Vec<UserDecode>,
    /// Reassembled demanded file per user.
    pub files: Vec<Option<Vec<u8>>>,
}

/// Decodes `transcript` at every user with the matching algorithm.
pub fn decode_all(
    cfg: &SystemConfig,
    channel: &ChannelMatrix,
    transcript: &DeliveryTranscript,
    caches: &[UserCache],
) -> Result<Vec<UserDecode>> {
    caches
        .iter()
        .map(|cache| match transcript.algorithm {
            Algorithm::Complex => decode_complex(cfg, channel, transcript, cache),
            Algorithm::Finite => decode_finite(cfg, channel, transcript, cache),
        })
        .collect()
}

fn finish(
    cfg: &SystemConfig,
    channel: &ChannelMatrix,
    transcript: DeliveryTranscript,
    caches: Vec<UserCache>,
) -> Result<DeliveryOutcome> {
    let decoded = decode_all(cfg, channel, &transcript, &caches)?;
    let files = decoded.iter().zip(&caches).map(|(d, c)| d.reconstruct(cfg, c)).collect();
    Ok(DeliveryOutcome { transcript, caches, decoded, files })
}

fn check_inputs(cfg: &SystemConfig, channel: &ChannelMatrix, demand: &DemandVector, library: &Library) -> Result<()> {
    if channel.users() != cfg.users() {
        return Err(Error::DimensionMismatch { expected: cfg.users(), got: channel.users() });
    }
    if channel.antennas() != cfg.antennas() {
        return Err(Error::DimensionMismatch { expected: cfg.antennas(), got: channel.antennas() });
    }
    if demand.users() != cfg.users() {
        return Err(Error::DimensionMismatch { expected: cfg.users(), got: demand.users() });
    }
    if library.files() != cfg.files() || demand.as_slice().iter().any(|&d| d >= cfg.files()) {
        return Err(Error::InvalidConfig("demand refers to a file outside the library".into()));
    }
    if library.minifile_bytes() != minifile_bytes(cfg)? {
        return Err(Error::InvalidConfig("library mini-file size does not match the configuration".into()));
    }
    Ok(())
}

/// Zero-forcing beams of `group`, rejecting gains a receiver cannot invert.
fn checked_gains(channel: &ChannelMatrix, cfg: &SystemConfig, group: &Subset) -> Result<GroupGains> {
    let gains = GroupGains::compute(channel, cfg, group)?;
    for (r, g) in &gains.user_gains {
        let targets = group.subsets(cfg.t() + 1).into_iter().filter(|target| target.contains(*r));
        for (target, z) in targets.zip(g) {
            if z.norm() < SINGULAR_GAIN_TOLERANCE {
                return Err(Error::SingularGain { user: *r, target, gain: z.norm() });
            }
        }
    }
    Ok(gains)
}

/// Mini-file `W_{d_r, T \ {r}}^{N(r, T \ {r})}` for every `(T, r)` of the
/// group, in the order `T` then `r`, and the counter values read.
fn scheduled_minifiles(
    cfg: &SystemConfig,
    demand: &DemandVector,
    counter: &IndexCounter,
    group: &Subset,
) -> Result<(Vec<(Subset, Vec<(usize, SubfileId)>)>, Vec<(usize, Subset, u64)>)> {
    let mut versions = Vec::new();
    let mut schedule = Vec::new();
    for target in group.subsets(cfg.t() + 1) {
        let mut row = Vec::with_capacity(target.len());
        for &r in target.members() {
            let tau = target.without(r);
            let n = counter.get(r, &tau).expect("counter initialised for every pair");
            if n == 0 || n > cfg.minis_per_subfile() {
                return Err(Error::InvalidConfig(alloc::format!("version {n} of W{}{tau} does not exist", demand.file(r) + 1)));
            }
            versions.push((r, tau.clone(), n));
            row.push((r, SubfileId { file: demand.file(r), tau, mini: (n - 1) as usize }));
        }
        schedule.push((target, row));
    }
    Ok((schedule, versions))
}
