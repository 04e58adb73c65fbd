use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::modem::{channel_uses, demodulate, despread, modulate};
use super::{
    check_inputs, checked_gains, fill_caches, finish, scheduled_minifiles, Algorithm, Chunk, ChunkPayload,
    DecodedMiniFile, DeliveryOutcome, DeliveryTranscript, DemandVector, GroupTransmission, Library, UserCache,
    UserDecode,
};
use crate::channel::{received_signal, ChannelMatrix, SignalBlock};
use crate::combinatorics::{enumerate_subsets, IndexCounter};
use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// XOR of equal-length byte strings.
pub(crate) fn xor_into(acc: &mut [u8], other: &[u8]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
}

/// Finite-field delivery: for every group `S`, one block
/// `X(S) = sum_T u_S^T psi(G'(T)) / sqrt(q)` with
/// `G'(T) = XOR_{r in T} W_{d_r, T \ {r}}`, then every user decodes.
///
/// The `q` chunks of a group use distinct spreading codes of length `q`,
/// which is how a user separates the `v` streams that reach it.
pub fn run_delivery_finite(
    cfg: &SystemConfig,
    channel: &ChannelMatrix,
    demand: &DemandVector,
    library: &Library,
) -> Result<DeliveryOutcome> {
    check_inputs(cfg, channel, demand, library)?;
    let q = cfg.targets_per_group() as usize;
    let uses = channel_uses(library.minifile_bytes(), q);
    let scale = 1.0 / Float::sqrt(q as f64);
    let amplitude = Float::sqrt(cfg.snr()) * scale;
    let mut counter = IndexCounter::init(cfg);
    let mut groups = Vec::new();

    for group in enumerate_subsets(cfg.users(), cfg.group_size()) {
        let gains = checked_gains(channel, cfg, &group)?;
        let (schedule, versions) = scheduled_minifiles(cfg, demand, &counter, &group)?;
        let mut block = SignalBlock::zeros(cfg.antennas(), uses);
        let mut chunks = Vec::with_capacity(q);
        for (code, (target, parts)) in schedule.into_iter().enumerate() {
            let mut combined = alloc::vec![0u8; library.minifile_bytes()];
            for (_, id) in &parts {
                xor_into(&mut combined, library.minifile(id));
            }
            let sequence: Vec<Complex64> = modulate(&combined, code, q).into_iter().map(|x| x * amplitude).collect();
            block.add_beamformed(&gains.beams[code].weights, &sequence);
            chunks.push(Chunk { target, payload: ChunkPayload::Xor { parts, code, scale } });
        }
        counter.update(&group)?;
        groups.push(GroupTransmission {
            group,
            gains,
            versions,
            sigmas: None,
            chunks,
            blocks: alloc::vec![block],
            code_length: q,
        });
    }

    let transcript = DeliveryTranscript {
        algorithm: Algorithm::Finite,
        demand: demand.clone(),
        snr: cfg.snr(),
        minifile_bytes: library.minifile_bytes(),
        groups,
        counters: counter,
    };
    finish(cfg, channel, transcript, fill_caches(cfg, library))
}

/// Decodes every chunk addressed to the cache's user: despread its code,
/// divide by `h_r^H u_S^T / sqrt(q)`, demodulate and XOR away the cached
/// parts. Chunks with a part missing from the cache are skipped.
pub fn decode_finite(
    cfg: &SystemConfig,
    channel: &ChannelMatrix,
    transcript: &DeliveryTranscript,
    cache: &UserCache,
) -> Result<UserDecode> {
    let r = cache.user;
    if r >= cfg.users() {
        return Err(Error::DimensionMismatch { expected: cfg.users(), got: r + 1 });
    }
    let amplitude = Float::sqrt(transcript.snr);
    let mut minifiles = Vec::new();
    for tx in transcript.groups.iter().filter(|tx| tx.group.contains(r)) {
        let (Some(block), Some(gains)) = (tx.blocks.first(), tx.user_gains(r)) else { continue };
        let targets: Vec<_> = tx.group.subsets(cfg.t() + 1).into_iter().filter(|t| t.contains(r)).collect();
        let y = received_signal(channel, block, r, None)?;
        for chunk in tx.chunks.iter().filter(|c| c.target.contains(r)) {
            let ChunkPayload::Xor { parts, code, scale } = &chunk.payload else { continue };
            let Some(i) = targets.iter().position(|t| *t == chunk.target) else { continue };
            let gain = gains[i];
            if gain.norm() < super::SINGULAR_GAIN_TOLERANCE {
                return Err(Error::SingularGain { user: r, target: chunk.target.clone(), gain: gain.norm() });
            }
            let norm = gain * *scale * amplitude;
            let symbols: Vec<Complex64> = despread(&y, *code, tx.code_length).into_iter().map(|z| z / norm).collect();
            let (mut bytes, symbol_error) = demodulate(&symbols);
            let mut wanted = None;
            let mut complete = true;
            for (u, id) in parts {
                if *u == r {
                    wanted = Some(id.clone());
                } else if let Some(cached) = cache.get(id) {
                    xor_into(&mut bytes, cached);
                } else {
                    complete = false;
                }
            }
            if let (true, Some(id)) = (complete, wanted) {
                minifiles.push(DecodedMiniFile { group: tx.group.clone(), id, bytes, symbol_error });
            }
        }
    }
    Ok(UserDecode { user: r, file: transcript.demand.file(r), minifiles })
}
