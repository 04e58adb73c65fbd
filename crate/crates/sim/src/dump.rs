//! Text dumps for audits: delivery transcripts and channel draws.
//!
//! Users, files, blocks and mini-files are numbered from 1. Complex
//! numbers are written as `re,im` with full precision.

use std::io::Write;

use cc_miso_core::delivery::{ChunkPayload, DeliveryTranscript};
use cc_miso_core::{ChannelMatrix, Complex64, SystemConfig};

use crate::Result;

fn z(c: Complex64) -> String {
    format!("{:e},{:e}", c.re, c.im)
}

fn vector(v: &[Complex64]) -> String {
    v.iter().map(|&c| z(c)).collect::<Vec<_>>().join(" ")
}

/// One line per record:
///
/// ```text
/// transcript algorithm=complex K=3 L=2 N=3 M=1 t=1 snr=100 demand=(1,2,3) minifile_bytes=43
/// group {1,2,3}
/// beam T={1,2} nulled={3} u=re,im re,im
/// gain user=1 T={1,2} g=re,im
/// version user=1 tau={2} N=1
/// sigma block=1 user=1 T={1,2} s=re,im
/// chunk block=1 T={1,2} W1{2}#1>1@code1 W2{1}#1>2@code2
/// chunk T={1,2} code=1 scale=0.577 W1{2}#1>1 W2{1}#1>2
/// power block=1 p=50
/// counter user=1 tau={2} N=2
/// ```
///
/// `W>u` names the user `u` that wants the mini-file `W`.
pub fn write_transcript<W: Write>(cfg: &SystemConfig, transcript: &DeliveryTranscript, mut out: W) -> Result<()> {
    writeln!(
        out,
        "transcript algorithm={} K={} L={} N={} M={} t={} snr={} demand={} minifile_bytes={}",
        transcript.algorithm,
        cfg.users(),
        cfg.antennas(),
        cfg.files(),
        cfg.cache(),
        cfg.t(),
        transcript.snr,
        transcript.demand,
        transcript.minifile_bytes
    )?;
    for tx in &transcript.groups {
        writeln!(out, "group {}", tx.group)?;
        for beam in &tx.gains.beams {
            writeln!(out, "beam T={} nulled={} u={}", beam.target, beam.nulled, vector(&beam.weights))?;
        }
        for (r, gains) in &tx.gains.user_gains {
            let targets = tx.group.subsets(cfg.t() + 1).into_iter().filter(|t| t.contains(*r));
            for (target, g) in targets.zip(gains) {
                writeln!(out, "gain user={} T={} g={}", r + 1, target, z(*g))?;
            }
        }
        for (r, tau, n) in &tx.versions {
            writeln!(out, "version user={} tau={} N={}", r + 1, tau, n)?;
        }
        if let Some(sigmas) = &tx.sigmas {
            for (w, r, target, s) in sigmas.iter() {
                writeln!(out, "sigma block={} user={} T={} s={}", w + 1, r + 1, target, z(s))?;
            }
        }
        for chunk in &tx.chunks {
            match &chunk.payload {
                ChunkPayload::Linear { omega, terms } => {
                    let parts: Vec<String> =
                        terms.iter().map(|t| format!("{}>{}@code{}", t.minifile, t.user + 1, t.code + 1)).collect();
                    writeln!(out, "chunk block={} T={} {}", omega + 1, chunk.target, parts.join(" "))?;
                }
                ChunkPayload::Xor { parts, code, scale } => {
                    let parts: Vec<String> = parts.iter().map(|(u, id)| format!("{}>{}", id, u + 1)).collect();
                    writeln!(out, "chunk T={} code={} scale={} {}", chunk.target, code + 1, scale, parts.join(" "))?;
                }
            }
        }
        for (b, block) in tx.blocks.iter().enumerate() {
            writeln!(out, "power block={} p={}", b + 1, cc_miso_core::channel::block_power(block))?;
        }
    }
    for (r, tau, n) in transcript.counters.iter() {
        writeln!(out, "counter user={} tau={} N={}", r + 1, tau, n)?;
    }
    Ok(())
}

/// CSV with columns `trial,user,antenna,re,im`; users and antennas from 1.
pub fn write_channels<W: Write>(channels: &[(u64, &ChannelMatrix)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "user", "antenna", "re", "im"])?;
    for (trial, h) in channels {
        for k in 0..h.users() {
            for (a, c) in h.user(k).iter().enumerate() {
                w.write_record([
                    trial.to_string(),
                    (k + 1).to_string(),
                    (a + 1).to_string(),
                    c.re.to_string(),
                    c.im.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
