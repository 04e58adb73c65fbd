//! CSV form of a [`SweepResult`].
//!
//! ```text
//! # config K=3 L=2 N=3 M=1 t=1 F=1032
//! # sweep seed=42 redraws=0 solver=sdr randomizations=200 iterations_per_level=300 sdr_seed=6116154
//! snr_db,scheme,mean_rsym_bits,stderr,trials,solver,seed
//! 10,1,1.234,0.01,2000,sdr,42
//! ```
//!
//! Rates are bits per channel use per user. Floats are written in their
//! shortest round-trip form.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use cc_miso_core::{BeamSolver, Scheme, SdrOptions, SystemConfig};
use num_rational::Ratio;

use crate::harness::{solver_label, SweepResult, SweepRow};
use crate::{HarnessError, Result};

pub const HEADER: [&str; 7] = ["snr_db", "scheme", "mean_rsym_bits", "stderr", "trials", "solver", "seed"];

fn config_line(cfg: &SystemConfig) -> String {
    format!(
        "# config K={} L={} N={} M={} t={} F={}",
        cfg.users(),
        cfg.antennas(),
        cfg.files(),
        cfg.cache(),
        cfg.t(),
        cfg.file_bits()
    )
}

fn sweep_line(result: &SweepResult) -> String {
    let solver = match result.solver {
        BeamSolver::Sdr(o) => format!(
            "solver=sdr randomizations={} iterations_per_level={} sdr_seed={}",
            o.randomizations, o.iterations_per_level, o.seed
        ),
        BeamSolver::Grid { step } => format!("solver=grid step={step}"),
    };
    format!("# sweep seed={} redraws={} {solver}", result.base_seed, result.redraws)
}

pub fn write_csv<W: Write>(result: &SweepResult, mut out: W) -> Result<()> {
    writeln!(out, "{}", config_line(&result.cfg))?;
    writeln!(out, "{}", sweep_line(result))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    let solver = solver_label(&result.solver);
    for row in &result.rows {
        w.write_record([
            row.snr_db.to_string(),
            row.scheme.number().to_string(),
            row.mean.to_string(),
            row.stderr.to_string(),
            row.trials.to_string(),
            solver.to_string(),
            result.base_seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    if result.rows.is_empty() {
        return Err(HarnessError::InvalidSpec("refusing to write an empty table".into()));
    }
    write_csv(result, File::create(path)?)
}

fn bad(msg: impl Into<String>) -> HarnessError {
    HarnessError::Parse(msg.into())
}

fn fields(line: &str, prefix: &str) -> Option<BTreeMap<String, String>> {
    let rest = line.strip_prefix(prefix)?;
    Some(
        rest.split_whitespace()
            .filter_map(|kv| kv.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
    )
}

fn get<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T> {
    map.get(key)
        .ok_or_else(|| bad(format!("missing {key}")))?
        .parse()
        .map_err(|_| bad(format!("bad value for {key}")))
}

pub fn read_csv<R: Read>(input: R) -> Result<SweepResult> {
    let mut reader = BufReader::new(input);
    let mut config = None;
    let mut sweep = None;
    let mut body = String::new();
    let mut line = String::new();
    while reader.read_line(&mut line)? > 0 {
        if let Some(map) = fields(line.trim_end(), "# config ") {
            config = Some(map);
        } else if let Some(map) = fields(line.trim_end(), "# sweep ") {
            sweep = Some(map);
        } else if !line.starts_with('#') {
            body.push_str(&line);
        }
        line.clear();
    }
    let config = config.ok_or_else(|| bad("missing config comment"))?;
    let sweep = sweep.ok_or_else(|| bad("missing sweep comment"))?;

    let cache: Ratio<u64> = get(&config, "M")?;
    let cfg = SystemConfig::new(get(&config, "K")?, get(&config, "L")?, get(&config, "N")?, cache)?
        .with_file_bits(get(&config, "F")?)?;
    let solver = match sweep.get("solver").map(String::as_str) {
        Some("sdr") => BeamSolver::Sdr(SdrOptions {
            randomizations: get(&sweep, "randomizations")?,
            iterations_per_level: get(&sweep, "iterations_per_level")?,
            seed: get(&sweep, "sdr_seed")?,
        }),
        Some("grid") => BeamSolver::Grid { step: get(&sweep, "step")? },
        _ => return Err(bad("unknown solver")),
    };
    let base_seed: u64 = get(&sweep, "seed")?;

    let mut csv_reader = csv::Reader::from_reader(body.as_bytes());
    if csv_reader.headers()?.iter().collect::<Vec<_>>() != HEADER {
        return Err(bad("unexpected header"));
    }
    let mut rows = Vec::new();
    for record in csv_reader.records() {
        let record = record?;
        let parse = |i: usize| record.get(i).ok_or_else(|| bad("short record"));
        let number: u8 = parse(1)?.parse().map_err(|_| bad("bad scheme"))?;
        rows.push(SweepRow {
            snr_db: parse(0)?.parse().map_err(|_| bad("bad snr"))?,
            scheme: Scheme::from_number(number).ok_or_else(|| bad("bad scheme"))?,
            mean: parse(2)?.parse().map_err(|_| bad("bad mean"))?,
            stderr: parse(3)?.parse().map_err(|_| bad("bad stderr"))?,
            trials: parse(4)?.parse().map_err(|_| bad("bad trial count"))?,
        });
        if parse(5)? != solver_label(&solver) || parse(6)?.parse::<u64>().ok() != Some(base_seed) {
            return Err(bad("row disagrees with the sweep comment"));
        }
    }
    Ok(SweepResult { cfg, solver, base_seed, redraws: get(&sweep, "redraws")?, rows })
}

pub fn parse_csv(path: &Path) -> Result<SweepResult> {
    read_csv(File::open(path)?)
}
