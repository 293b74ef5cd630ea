//! Alice's strategies and Monte Carlo estimates of how often they are accepted.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{sample_screen_position, WhichSlit};
use crate::protocol::{
    AliceState, Bit, CommitTranscript, Committer, Evidence, Photon, Protocol, ProtocolParams, Record,
    RoundAnnouncement, RoundSecret, UnveilData, Verdict,
};
use crate::rng::{RunStreams, SimRng};
use crate::stats::{wilson_interval, Z95};

/// Minimum number of trials accepted by [`estimate_cheat_success`].
pub const MIN_TRIALS: usize = 100;

/// How a slit is guessed for a screen-measured photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuessMode {
    /// Fair coin.
    Uniform,
    /// The slit with the larger single-slit likelihood, coin flip on ties.
    Posterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StrategyKind {
    Honest {
        bit: Bit,
    },
    /// Commit to 0 (telescope), then claim 1 with fabricated screen positions.
    /// `blind` draws them from the double-slit pattern instead of the single-slit one.
    FabricateScreen {
        #[serde(default)]
        blind: bool,
    },
    /// Commit to 1 (screen), then claim 0 with guessed slits.
    GuessSlit {
        mode: GuessMode,
    },
    /// Announce a detection with probability `announce_prob` without measuring,
    /// then claim 0 with coin-flip slits.
    NoDetection {
        announce_prob: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    #[serde(flatten)]
    pub kind: StrategyKind,
    /// ChaCha stream id for Alice's generator, so different strategies on the
    /// same trial can use independent randomness.
    #[serde(default)]
    pub substream: u64,
}

impl StrategySpec {
    pub fn new(kind: StrategyKind) -> Self {
        Self { kind, substream: 0 }
    }

    pub fn honest(bit: Bit) -> Self {
        Self::new(StrategyKind::Honest { bit })
    }

    pub fn fabricate_screen() -> Self {
        Self::new(StrategyKind::FabricateScreen { blind: false })
    }

    pub fn guess_slit(mode: GuessMode) -> Self {
        Self::new(StrategyKind::GuessSlit { mode })
    }

    pub fn no_detection(announce_prob: f64) -> Self {
        Self::new(StrategyKind::NoDetection { announce_prob })
    }

    pub fn validate(&self) -> Result<()> {
        if let StrategyKind::NoDetection { announce_prob } = self.kind {
            if !(0.0..=1.0).contains(&announce_prob) {
                return Err(Error::InvalidParams(format!(
                    "announce probability must lie in [0, 1], got {announce_prob}"
                )));
            }
        }
        Ok(())
    }

    /// The measurement basis chosen in the commit phase, if any.
    pub fn committed_bit(&self) -> Option<Bit> {
        match self.kind {
            StrategyKind::Honest { bit } => Some(bit),
            StrategyKind::FabricateScreen { .. } => Some(Bit::Zero),
            StrategyKind::GuessSlit { .. } => Some(Bit::One),
            StrategyKind::NoDetection { .. } => None,
        }
    }

    pub fn unveiled_bit(&self) -> Bit {
        match self.kind {
            StrategyKind::Honest { bit } => bit,
            StrategyKind::FabricateScreen { .. } => Bit::One,
            StrategyKind::GuessSlit { .. } | StrategyKind::NoDetection { .. } => Bit::Zero,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            StrategyKind::Honest { bit } => format!("honest-{bit}"),
            StrategyKind::FabricateScreen { blind: false } => "fabricate-screen".into(),
            StrategyKind::FabricateScreen { blind: true } => "fabricate-screen-blind".into(),
            StrategyKind::GuessSlit {
                mode: GuessMode::Uniform,
            } => "guess-slit".into(),
            StrategyKind::GuessSlit {
                mode: GuessMode::Posterior,
            } => "guess-slit-posterior".into(),
            StrategyKind::NoDetection { announce_prob } => format!("no-detection-{announce_prob}"),
        }
    }

    /// Commit-phase behavior of this strategy.
    pub fn committer(&self) -> StrategyCommitter {
        StrategyCommitter { spec: *self }
    }
}

/// [`Committer`] for a [`StrategySpec`].
#[derive(Debug, Clone, Copy)]
pub struct StrategyCommitter {
    spec: StrategySpec,
}

impl Committer for StrategyCommitter {
    fn commit_round(
        &mut self,
        _round: usize,
        photon: Option<Photon<'_>>,
        rng: &mut SimRng,
    ) -> Option<(RoundAnnouncement, Record)> {
        let (detected, record) = match (self.spec.committed_bit(), photon) {
            (None, _) => {
                let StrategyKind::NoDetection { announce_prob } = self.spec.kind else {
                    unreachable!("only the no-detection strategy skips measurement")
                };
                let announce = rng.random_bool(announce_prob);
                (announce, if announce { Record::Unmeasured } else { Record::None })
            }
            (Some(_), None) => (false, Record::None),
            (Some(Bit::Zero), Some(p)) => (true, Record::Slit(p.observe_slit(rng))),
            (Some(Bit::One), Some(p)) => (true, Record::Screen(p.observe_screen(rng))),
        };
        Some((RoundAnnouncement { detected }, record))
    }
}

fn coin(rng: &mut SimRng) -> WhichSlit {
    if rng.random_bool(0.5) {
        WhichSlit::Left
    } else {
        WhichSlit::Right
    }
}

/// Reveal the records as they were measured.
pub fn honest_unveil(state: &AliceState, bit: Bit) -> UnveilData {
    let entries = state
        .records
        .iter()
        .map(|r| match r {
            Record::Slit(s) => Some(Evidence::Slit(*s)),
            Record::Screen(x) => Some(Evidence::Screen(*x)),
            Record::None | Record::Unmeasured => None,
        })
        .collect();
    UnveilData { bit, entries }
}

/// Claim bit 1 after slit measurements: each observed slit becomes a screen
/// position drawn from that slit's single-slit pattern (or from the
/// double-slit pattern when `blind`).
pub fn fabricate_screen_unveil(state: &AliceState, protocol: &Protocol, blind: bool, rng: &mut SimRng) -> UnveilData {
    let pdfs = protocol.pdfs();
    let entries = state
        .records
        .iter()
        .map(|r| match r {
            Record::Slit(s) => {
                let pdf = if blind { &pdfs.both_open } else { pdfs.for_slit(*s) };
                Some(Evidence::Screen(sample_screen_position(pdf, rng)))
            }
            Record::Screen(x) => Some(Evidence::Screen(*x)),
            Record::None => None,
            Record::Unmeasured => Some(Evidence::Screen(sample_screen_position(&pdfs.both_open, rng))),
        })
        .collect();
    UnveilData { bit: Bit::One, entries }
}

/// Claim bit 0 after screen measurements by guessing a slit for each position.
pub fn guess_slit_unveil(state: &AliceState, protocol: &Protocol, mode: GuessMode, rng: &mut SimRng) -> UnveilData {
    let pdfs = protocol.pdfs();
    let entries = state
        .records
        .iter()
        .map(|r| match r {
            Record::Screen(x) => {
                let slit = match mode {
                    GuessMode::Uniform => coin(rng),
                    GuessMode::Posterior => {
                        let (l, r) = (pdfs.left.density_at(*x), pdfs.right.density_at(*x));
                        if l > r {
                            WhichSlit::Left
                        } else if r > l {
                            WhichSlit::Right
                        } else {
                            coin(rng)
                        }
                    }
                };
                Some(Evidence::Slit(slit))
            }
            Record::Slit(s) => Some(Evidence::Slit(*s)),
            Record::Unmeasured => Some(Evidence::Slit(coin(rng))),
            Record::None => None,
        })
        .collect();
    UnveilData {
        bit: Bit::Zero,
        entries,
    }
}

/// Claim bit 0 with coin-flip slits on every announced round.
pub fn no_detection_unveil(state: &AliceState, rng: &mut SimRng) -> UnveilData {
    let entries = state
        .records
        .iter()
        .map(|r| match r {
            Record::None => None,
            Record::Slit(s) => Some(Evidence::Slit(*s)),
            Record::Screen(_) | Record::Unmeasured => Some(Evidence::Slit(coin(rng))),
        })
        .collect();
    UnveilData {
        bit: Bit::Zero,
        entries,
    }
}

/// The unveil `spec` produces from `state`.
pub fn unveil(spec: &StrategySpec, state: &AliceState, protocol: &Protocol, rng: &mut SimRng) -> UnveilData {
    match spec.kind {
        StrategyKind::Honest { bit } => honest_unveil(state, bit),
        StrategyKind::FabricateScreen { blind } => fabricate_screen_unveil(state, protocol, blind, rng),
        StrategyKind::GuessSlit { mode } => guess_slit_unveil(state, protocol, mode, rng),
        StrategyKind::NoDetection { .. } => no_detection_unveil(state, rng),
    }
}

/// Everything produced by one protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub secrets: Vec<RoundSecret>,
    pub transcript: CommitTranscript,
    pub state: AliceState,
    pub unveil: UnveilData,
    pub verdict: Verdict,
}

/// Run trial `trial` of `spec` end to end with the streams derived from the
/// protocol's master seed.
pub fn run_protocol(spec: &StrategySpec, protocol: &Protocol, trial: u64) -> Result<ProtocolRun> {
    spec.validate()?;
    let params = protocol.params();
    let mut streams = RunStreams::for_trial(params.master_seed, trial, params.n_rounds as u64);
    let secrets = crate::protocol::bob_draw_configs(params, &mut streams.bob);
    let mut alice = streams.alice;
    alice.set_stream(spec.substream);
    let (transcript, state) = protocol.commit(&mut spec.committer(), &secrets, &mut streams.arrival, &mut alice)?;
    let unveil = unveil(spec, &state, protocol, &mut alice);
    let verdict = protocol.verify(&unveil, &secrets, &transcript)?;
    Ok(ProtocolRun {
        secrets,
        transcript,
        state,
        unveil,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheatEstimate {
    pub strategy: StrategySpec,
    pub n_rounds: usize,
    pub trials: usize,
    pub accepted: usize,
    pub acceptance_rate: f64,
    pub wilson_ci_95: (f64, f64),
}

impl CheatEstimate {
    /// Wilson interval at a custom normal quantile `z`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.accepted as u64, self.trials as u64, z)
    }
}

/// Fraction of `trials` independent runs that Bob accepts.
pub fn estimate_cheat_success(spec: &StrategySpec, params: &ProtocolParams, trials: usize) -> Result<CheatEstimate> {
    if trials < MIN_TRIALS {
        return Err(Error::TooFewTrials {
            got: trials,
            min: MIN_TRIALS,
        });
    }
    let protocol = Protocol::new(*params)?;
    estimate_with(spec, &protocol, trials)
}

/// As [`estimate_cheat_success`], reusing a prepared [`Protocol`].
pub fn estimate_with(spec: &StrategySpec, protocol: &Protocol, trials: usize) -> Result<CheatEstimate> {
    if trials < MIN_TRIALS {
        return Err(Error::TooFewTrials {
            got: trials,
            min: MIN_TRIALS,
        });
    }
    spec.validate()?;
    let accepted = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_protocol(spec, protocol, t).map(|run| run.verdict.accepted as usize))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(CheatEstimate {
        strategy: *spec,
        n_rounds: protocol.params().n_rounds,
        trials,
        accepted,
        acceptance_rate: accepted as f64 / trials as f64,
        wilson_ci_95: wilson_interval(accepted as u64, trials as u64, Z95),
    })
}
