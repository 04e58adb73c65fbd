use alloc::collections::{BTreeMap, BTreeSet};

use super::{Algorithm, DeliveryTranscript, Library, UserDecode};
use crate::channel::block_power;
use crate::combinatorics::{minifiles_of, Subset, SubfileId};
use crate::config::SystemConfig;

/// The first property a delivery run broke.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("user {user} never received {id}")]
    MissingMiniFile { user: usize, id: SubfileId },
    #[error("user {user} received {id}, which it does not need")]
    UnexpectedMiniFile { user: usize, id: SubfileId },
    #[error("user {user} decoded wrong bits for {id}")]
    WrongContent { user: usize, id: SubfileId },
    #[error("user {user} received {id} twice")]
    Duplicate { user: usize, id: SubfileId },
    #[error("user {user} decoded {decoded} mini-files from group {group}, expected {expected}")]
    DecodeCount { user: usize, group: Subset, decoded: usize, expected: usize },
    #[error("block {block} of group {group} has power {power:e} above snr {snr:e}")]
    Power { group: Subset, block: usize, power: f64, snr: f64 },
    #[error("counter N({user},{tau}) is {value}, expected {expected}")]
    Counter { user: usize, tau: Subset, value: u64, expected: u64 },
    #[error("no decode result for user {user}")]
    MissingUser { user: usize },
}

/// Summary of a run that passed every check.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub algorithm: Algorithm,
    pub users: usize,
    pub minifiles_checked: usize,
    pub blocks_checked: usize,
    pub max_block_power: f64,
    pub max_symbol_error: f64,
}

/// Checks, in order: (a) every user recovered exactly the mini-files of its
/// demanded file that it does not cache, with the right content, (b) none
/// of them twice, (c) `v` of them from every group containing it, (d)
/// every block within the power budget, and finally that each version
/// counter was read once per version and ends at `C(K-t-1, L-1) + 1`.
pub fn verify_delivery(
    cfg: &SystemConfig,
    library: &Library,
    transcript: &DeliveryTranscript,
    decoded: &[UserDecode],
) -> Result<VerificationReport, Violation> {
    let v = cfg.targets_per_user() as usize;
    let mut checked = 0;
    let mut max_symbol_error: f64 = 0.0;

    for user in 0..cfg.users() {
        let decode = decoded.iter().find(|d| d.user == user).ok_or(Violation::MissingUser { user })?;
        let wanted: BTreeSet<SubfileId> = minifiles_of(cfg, transcript.demand.file(user))
            .into_iter()
            .filter(|id| !id.tau.contains(user))
            .collect();
        let got: BTreeSet<&SubfileId> = decode.minifiles.iter().map(|m| &m.id).collect();
        if let Some(id) = wanted.iter().find(|id| !got.contains(id)) {
            return Err(Violation::MissingMiniFile { user, id: id.clone() });
        }
        if let Some(id) = got.iter().find(|id| !wanted.contains(**id)) {
            return Err(Violation::UnexpectedMiniFile { user, id: (*id).clone() });
        }
        for m in &decode.minifiles {
            if m.bytes != library.minifile(&m.id) {
                return Err(Violation::WrongContent { user, id: m.id.clone() });
            }
            max_symbol_error = max_symbol_error.max(m.symbol_error);
        }
        checked += decode.minifiles.len();
    }

    for decode in decoded {
        let mut seen = BTreeSet::new();
        for m in &decode.minifiles {
            if !seen.insert(&m.id) {
                return Err(Violation::Duplicate { user: decode.user, id: m.id.clone() });
            }
        }
    }

    for decode in decoded {
        let mut per_group: BTreeMap<&Subset, usize> = BTreeMap::new();
        for m in &decode.minifiles {
            *per_group.entry(&m.group).or_default() += 1;
        }
        for tx in transcript.groups.iter().filter(|tx| tx.group.contains(decode.user)) {
            let n = per_group.get(&tx.group).copied().unwrap_or(0);
            if n != v {
                return Err(Violation::DecodeCount { user: decode.user, group: tx.group.clone(), decoded: n, expected: v });
            }
        }
    }

    let mut blocks = 0;
    let mut max_block_power: f64 = 0.0;
    for tx in &transcript.groups {
        for (b, block) in tx.blocks.iter().enumerate() {
            let power = block_power(block);
            if power > transcript.snr * (1.0 + 1e-9) {
                return Err(Violation::Power { group: tx.group.clone(), block: b, power, snr: transcript.snr });
            }
            max_block_power = max_block_power.max(power);
            blocks += 1;
        }
    }

    let minis = cfg.minis_per_subfile();
    let mut reads: BTreeMap<(usize, &Subset), BTreeSet<u64>> = BTreeMap::new();
    for tx in &transcript.groups {
        for (r, tau, n) in &tx.versions {
            reads.entry((*r, tau)).or_default().insert(*n);
        }
    }
    for (user, tau, value) in transcript.counters.iter() {
        if value != minis + 1 {
            return Err(Violation::Counter { user, tau: tau.clone(), value, expected: minis + 1 });
        }
        let used = reads.get(&(user, tau)).map_or(0, BTreeSet::len) as u64;
        let total = transcript.groups.iter().flat_map(|tx| &tx.versions).filter(|(r, t, _)| *r == user && t == tau).count() as u64;
        if used != minis || total != minis {
            return Err(Violation::Counter { user, tau: tau.clone(), value: total, expected: minis });
        }
    }

    Ok(VerificationReport {
        algorithm: transcript.algorithm,
        users: cfg.users(),
        minifiles_checked: checked,
        blocks_checked: blocks,
        max_block_power,
        max_symbol_error,
    })
}
