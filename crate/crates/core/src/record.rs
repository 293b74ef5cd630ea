//! Line-delimited JSON records of a run: one object per round, then the verdict.
//!
//! ```text
//! {"meta":{"master_seed":7,"n_rounds":60,"strategy":{"kind":"honest","bit":1},"config_sha256":"..."}}
//! {"index":0,"detected":true,"config":"both_open","evidence":{"screen_m":0.0012}}
//! {"index":1,"detected":false,"config":"both_closed","evidence":null}
//! {"verdict":{"bit":1,"accepted":true,"checks":[...]}}
//! ```
//!
//! The leading `meta` line is optional. `config` is Bob's secret and appears
//! only in Bob-side exports.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::adversary::StrategySpec;
use crate::optics::SlitConfig;
use crate::protocol::{Bit, CheckResult, CommitTranscript, Evidence, RoundSecret, UnveilData, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundRecord {
    pub index: usize,
    pub detected: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<SlitConfig>,
    pub evidence: Option<Evidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub bit: Bit,
    pub accepted: bool,
    pub checks: Vec<CheckResult>,
}

/// Run parameters recorded ahead of the rounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub master_seed: u64,
    pub n_rounds: usize,
    pub strategy: StrategySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RecordLine {
    Meta { meta: RunMeta },
    Verdict { verdict: VerdictRecord },
    Round(RoundRecord),
}

/// A parsed record file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunLog {
    pub meta: Option<RunMeta>,
    pub rounds: Vec<RoundRecord>,
    pub verdict: Option<VerdictRecord>,
}

/// Round records for a run. Pass `secrets` for a Bob-side export.
pub fn round_records(
    transcript: &CommitTranscript,
    unveil: &UnveilData,
    secrets: Option<&[RoundSecret]>,
) -> Vec<RoundRecord> {
    transcript
        .announcements
        .iter()
        .zip(&unveil.entries)
        .enumerate()
        .map(|(index, (a, e))| RoundRecord {
            index,
            detected: a.detected,
            config: secrets.and_then(|s| s.get(index)).map(|s| s.config),
            evidence: *e,
        })
        .collect()
}

/// Write the optional meta line, the round records and the verdict line.
pub fn write_records<W: Write>(
    mut out: W,
    meta: Option<&RunMeta>,
    transcript: &CommitTranscript,
    unveil: &UnveilData,
    secrets: Option<&[RoundSecret]>,
    verdict: &Verdict,
) -> std::io::Result<()> {
    if let Some(meta) = meta {
        serde_json::to_writer(&mut out, &RecordLine::Meta { meta: meta.clone() })?;
        out.write_all(b"\n")?;
    }
    for r in round_records(transcript, unveil, secrets) {
        serde_json::to_writer(&mut out, &r)?;
        out.write_all(b"\n")?;
    }
    let line = RecordLine::Verdict {
        verdict: VerdictRecord {
            bit: unveil.bit,
            accepted: verdict.accepted,
            checks: verdict.checks.clone(),
        },
    };
    serde_json::to_writer(&mut out, &line)?;
    out.write_all(b"\n")?;
    out.flush()
}

/// Parse records written by [`write_records`]. Blank lines are skipped.
pub fn read_records<R: BufRead>(input: R) -> std::io::Result<RunLog> {
    let mut log = RunLog::default();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line)? {
            RecordLine::Meta { meta } => log.meta = Some(meta),
            RecordLine::Round(r) => log.rounds.push(r),
            RecordLine::Verdict { verdict } => log.verdict = Some(verdict),
        }
    }
    Ok(log)
}
