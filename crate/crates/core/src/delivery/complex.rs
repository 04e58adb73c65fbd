use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::modem::{channel_uses, demodulate, despread, modulate};
use super::sigma::assign_sigmas;
use super::{
    check_inputs, checked_gains, fill_caches, finish, scheduled_minifiles, Algorithm, Chunk, ChunkPayload,
    DecodedMiniFile, DeliveryOutcome, DeliveryTranscript, DemandVector, GroupTransmission, Library, LinearTerm,
    UserCache, UserDecode,
};
use crate::channel::{received_signal, ChannelMatrix, SignalBlock};
use crate::combinatorics::{enumerate_subsets, IndexCounter};
use crate::config::SystemConfig;
use crate::error::Result;

/// Complex-field delivery: for every group `S`, `v` blocks
/// `X_w(S) = sum_T u_S^T G_w(T)`, then every user decodes.
///
/// The `(T, r)` streams of a group use distinct spreading codes of length
/// `q (t+1)`.
pub fn run_delivery_complex(
    cfg: &SystemConfig,
    channel: &ChannelMatrix,
    demand: &DemandVector,
    library: &Library,
) -> Result<DeliveryOutcome> {
    check_inputs(cfg, channel, demand, library)?;
    let code_length = cfg.targets_per_group() as usize * (cfg.t() + 1);
    let uses = channel_uses(library.minifile_bytes(), code_length);
    let amplitude = Float::sqrt(cfg.snr());
    let mut counter = IndexCounter::init(cfg);
    let mut groups = Vec::new();

    for group in enumerate_subsets(cfg.users(), cfg.group_size()) {
        let gains = checked_gains(channel, cfg, &group)?;
        let sigmas = assign_sigmas(&group, cfg)?;
        let (schedule, versions) = scheduled_minifiles(cfg, demand, &counter, &group)?;
        let symbols: Vec<Vec<Vec<Complex64>>> = schedule
            .iter()
            .enumerate()
            .map(|(ti, (_, row))| {
                row.iter()
                    .enumerate()
                    .map(|(j, (_, id))| modulate(library.minifile(id), code_of(cfg, ti, j), code_length))
                    .collect()
            })
            .collect();

        let mut chunks = Vec::new();
        let mut blocks = Vec::new();
        for omega in 0..sigmas.blocks() {
            let mut block = SignalBlock::zeros(cfg.antennas(), uses);
            for (ti, (target, row)) in schedule.iter().enumerate() {
                let mut sequence = alloc::vec![Complex64::new(0.0, 0.0); uses];
                let mut terms = Vec::with_capacity(row.len());
                for (j, (r, id)) in row.iter().enumerate() {
                    let sigma = sigmas.sigma(omega, *r, target).expect("sigma assigned for every member");
                    let weight = sigma * amplitude;
                    for (s, x) in sequence.iter_mut().zip(&symbols[ti][j]) {
                        *s += weight * x;
                    }
                    terms.push(LinearTerm { user: *r, minifile: id.clone(), sigma, code: code_of(cfg, ti, j) });
                }
                block.add_beamformed(&gains.beams[ti].weights, &sequence);
                chunks.push(Chunk { target: target.clone(), payload: ChunkPayload::Linear { omega, terms } });
            }
            blocks.push(block);
        }
        counter.update(&group)?;
        groups.push(GroupTransmission { group, gains, versions, sigmas: Some(sigmas), chunks, blocks, code_length });
    }

    let transcript = DeliveryTranscript {
        algorithm: Algorithm::Complex,
        demand: demand.clone(),
        snr: cfg.snr(),
        minifile_bytes: library.minifile_bytes(),
        groups,
        counters: counter,
    };
    finish(cfg, channel, transcript, fill_caches(cfg, library))
}

/// Code of the `j`-th member of the `ti`-th target.
fn code_of(cfg: &SystemConfig, ti: usize, j: usize) -> usize {
    ti * (cfg.t() + 1) + j
}

/// Decodes every group containing the cache's user: project onto `h_r`,
/// cancel the cached terms, apply `U^H`, divide by `c h_r^H u_S^{T_i}` and
/// despread. A group whose chunks are incomplete yields nothing.
pub fn decode_complex(
    cfg: &SystemConfig,
    channel: &ChannelMatrix,
    transcript: &DeliveryTranscript,
    cache: &UserCache,
) -> Result<UserDecode> {
    let r = cache.user;
    if r >= cfg.users() {
        return Err(crate::error::Error::DimensionMismatch { expected: cfg.users(), got: r + 1 });
    }
    let amplitude = Float::sqrt(transcript.snr);
    let mut minifiles = Vec::new();
    for tx in transcript.groups.iter().filter(|tx| tx.group.contains(r)) {
        if let Some(found) = decode_group(channel, tx, cache, amplitude)? {
            minifiles.extend(found);
        }
    }
    Ok(UserDecode { user: r, file: transcript.demand.file(r), minifiles })
}

fn decode_group(
    channel: &ChannelMatrix,
    tx: &GroupTransmission,
    cache: &UserCache,
    amplitude: f64,
) -> Result<Option<Vec<DecodedMiniFile>>> {
    let r = cache.user;
    let Some(sigmas) = &tx.sigmas else { return Ok(None) };
    let Some(gains) = tx.user_gains(r) else { return Ok(None) };
    let targets = sigmas.user_targets(r);
    let v = sigmas.blocks();
    if tx.blocks.len() != v || gains.len() != v {
        return Ok(None);
    }
    for (target, g) in targets.iter().zip(gains) {
        if g.norm() < super::SINGULAR_GAIN_TOLERANCE {
            return Err(crate::error::Error::SingularGain { user: r, target: target.clone(), gain: g.norm() });
        }
    }

    let mut rows = Vec::with_capacity(v);
    let mut wanted: Vec<Option<(crate::combinatorics::SubfileId, usize)>> = alloc::vec![None; v];
    for (omega, block) in tx.blocks.iter().enumerate() {
        let mut y = received_signal(channel, block, r, None)?;
        for (i, target) in targets.iter().enumerate() {
            let Some(terms) = tx.chunks.iter().find_map(|c| match &c.payload {
                ChunkPayload::Linear { omega: w, terms } if *w == omega && c.target == *target => Some(terms),
                _ => None,
            }) else {
                return Ok(None);
            };
            for term in terms {
                if term.user == r {
                    wanted[i] = Some((term.minifile.clone(), term.code));
                    continue;
                }
                let Some(bytes) = cache.get(&term.minifile) else { return Ok(None) };
                let weight = gains[i] * term.sigma * amplitude;
                for (yj, x) in y.iter_mut().zip(modulate(bytes, term.code, tx.code_length)) {
                    *yj -= weight * x;
                }
            }
        }
        rows.push(y);
    }

    let mut out = Vec::with_capacity(v);
    for (i, want) in wanted.into_iter().enumerate() {
        let Some((id, code)) = want else { return Ok(None) };
        let norm = sigmas.scale * gains[i] * amplitude;
        let n = rows[0].len();
        let stream: Vec<Complex64> = (0..n)
            .map(|j| (0..v).map(|w| sigmas.unitary[(w, i)].conj() * rows[w][j]).sum::<Complex64>() / norm)
            .collect();
        let (bytes, symbol_error) = demodulate(&despread(&stream, code, tx.code_length));
        out.push(DecodedMiniFile { group: tx.group.clone(), id, bytes, symbol_error });
    }
    Ok(Some(out))
}
