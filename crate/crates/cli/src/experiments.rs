//! Monte Carlo experiments behind the sweep and concealing commands.

use anyhow::Result;
use qbc_core::adversary::{estimate_with, CheatEstimate, StrategySpec};
use qbc_core::protocol::{bob_draw_configs, Bit, CommitTranscript, Protocol, ProtocolParams};
use qbc_core::rng::RunStreams;
use qbc_core::stats::{total_variation, weighted_line_fit, LineFit};
use rayon::prelude::*;
use serde::Serialize;

/// One cell of a binding sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub estimate: CheatEstimate,
    /// `log2` of the acceptance rate, or of the Wilson upper bound when no
    /// trial was accepted.
    pub log2_value: f64,
    pub upper_bound: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeStatus {
    /// Every cell had at least one acceptance.
    Fit,
    /// Some cells entered the fit through their upper bounds.
    Partial,
    /// No cell had an acceptance; the slope only bounds the decay.
    UpperBoundOnly,
}

impl SlopeStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SlopeStatus::Fit => "fit",
            SlopeStatus::Partial => "partial-upper-bound",
            SlopeStatus::UpperBoundOnly => "upper-bound only",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub fit: Option<LineFit>,
    pub status: SlopeStatus,
}

/// Acceptance of `spec` at each round count, with a weighted least-squares
/// fit of `log2(acceptance)` against N.
pub fn binding_sweep(
    spec: &StrategySpec,
    base: &ProtocolParams,
    n_values: &[usize],
    trials: usize,
) -> Result<SweepResult> {
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let protocol = Protocol::new(ProtocolParams { n_rounds: n, ..*base })?;
        let estimate = estimate_with(spec, &protocol, trials)?;
        let upper_bound = estimate.accepted == 0;
        let value = if upper_bound {
            estimate.wilson_ci_95.1
        } else {
            estimate.acceptance_rate
        };
        rows.push(SweepRow {
            log2_value: value.log2(),
            upper_bound,
            estimate,
        });
    }
    let points: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|r| {
            let e = &r.estimate;
            (e.n_rounds as f64, r.log2_value, log2_weight(e.accepted, e.trials))
        })
        .collect();
    let bounded = rows.iter().filter(|r| r.upper_bound).count();
    let status = match bounded {
        0 => SlopeStatus::Fit,
        b if b == rows.len() => SlopeStatus::UpperBoundOnly,
        _ => SlopeStatus::Partial,
    };
    Ok(SweepResult {
        fit: weighted_line_fit(&points),
        rows,
        status,
    })
}

/// Inverse delta-method variance of `log2(p̂)`: `n p ln²2 / (1 - p)`, with p
/// kept half a count away from 0 and 1.
fn log2_weight(accepted: usize, trials: usize) -> f64 {
    let n = trials as f64;
    let p = (accepted as f64).clamp(0.5, n - 0.5) / n;
    let ln2 = std::f64::consts::LN_2;
    n * p * ln2 * ln2 / (1.0 - p)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcealingReport {
    pub n_rounds: usize,
    pub efficiency: f64,
    pub trials: usize,
    /// Trials whose shared-secret transcripts differ between the two bits.
    pub differing_transcripts: usize,
    /// Histograms of the number of announced detections, indexed by count.
    pub detected_counts: [Vec<u64>; 2],
    /// Total-variation distance between the two histograms.
    pub tv_distance: f64,
}

impl ConcealingReport {
    pub fn structural_distance(&self) -> f64 {
        self.differing_transcripts as f64 / self.trials as f64
    }
}

/// Compare Bob's pre-unveil view under honest commitments to 0 and to 1.
///
/// Trial `t` commits both bits against the same secrets and arrivals and
/// compares the serialized transcripts. The histograms use independent
/// secrets: bit 0 uses trial `t`, bit 1 uses trial `trials + t`.
pub fn concealing_test(params: &ProtocolParams, trials: usize) -> Result<ConcealingReport> {
    let protocol = Protocol::new(*params)?;
    let n = params.n_rounds;
    let seed = params.master_seed;
    let transcript = |bit: Bit, trial: u64| -> Result<CommitTranscript> {
        let mut s = RunStreams::for_trial(seed, trial, n as u64);
        let secrets = bob_draw_configs(params, &mut s.bob);
        let mut committer = StrategySpec::honest(bit).committer();
        let (t, _) = protocol.commit(&mut committer, &secrets, &mut s.arrival, &mut s.alice)?;
        Ok(t)
    };
    let detected = |t: &CommitTranscript| t.announcements.iter().filter(|a| a.detected).count();
    let per_trial: Vec<(bool, usize, usize)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<(bool, usize, usize)> {
            let zero = transcript(Bit::Zero, t)?;
            let one = transcript(Bit::One, t)?;
            let same = serde_json::to_vec(&zero)? == serde_json::to_vec(&one)?;
            let independent = transcript(Bit::One, trials as u64 + t)?;
            Ok((same, detected(&zero), detected(&independent)))
        })
        .collect::<Result<_>>()?;
    let mut counts = [vec![0u64; n + 1], vec![0u64; n + 1]];
    let mut differing = 0;
    for (same, d0, d1) in per_trial {
        differing += !same as usize;
        counts[0][d0] += 1;
        counts[1][d1] += 1;
    }
    Ok(ConcealingReport {
        n_rounds: n,
        efficiency: params.optics.efficiency,
        trials,
        differing_transcripts: differing,
        tv_distance: total_variation(&counts[0], &counts[1]),
        detected_counts: counts,
    })
}
