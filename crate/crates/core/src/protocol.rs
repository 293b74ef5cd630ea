//! Commit/unveil state machine and Bob's verifier.
//!
//! Commit phase, per round: Bob draws a secret slit setting, the engine
//! decides whether a photon reaches Alice, and Alice's strategy announces
//! whether she detected it. The strategy only ever sees a [`Photon`] handle,
//! never Bob's setting; measuring the handle consumes it, so the telescope
//! and screen measurements are mutually exclusive.
//!
//! Unveil phase: Alice reveals a bit and per-round evidence; [`bob_verify`]
//! checks it against the secrets and the transcript.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{
    photon_arrives, sample_screen_position, sample_which_slit, screen_pdf, OpticsParams, ScreenPdf, SlitConfig,
    WhichSlit,
};
use crate::rng::SimRng;
use crate::stats::{binomial_balance_test, binomial_two_sided, chi_squared_gof, gof_cells, DEFAULT_TEST_BINS};

/// The committed bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Bit {
    Zero,
    One,
}

impl From<Bit> for u8 {
    fn from(b: Bit) -> u8 {
        match b {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }
}

impl TryFrom<u8> for Bit {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Bit::Zero),
            1 => Ok(Bit::One),
            other => Err(format!("bit must be 0 or 1, got {other}")),
        }
    }
}

impl Bit {
    pub fn flip(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}

impl std::fmt::Display for Bit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolParams {
    pub n_rounds: usize,
    pub alpha: f64,
    pub optics: OpticsParams,
    pub master_seed: u64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            n_rounds: 60,
            alpha: 0.01,
            optics: OpticsParams::default(),
            master_seed: 7,
        }
    }
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParams(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        self.optics.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundSecret {
    pub config: SlitConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundAnnouncement {
    pub detected: bool,
}

/// Bob's view at the end of the commit phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommitTranscript {
    pub params: ProtocolParams,
    pub announcements: Vec<RoundAnnouncement>,
}

/// What Alice privately holds for one round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Record {
    /// Nothing detected (or announced).
    None,
    Slit(WhichSlit),
    Screen(f64),
    /// Announced a detection without measuring anything.
    Unmeasured,
}

/// Alice's private per-round records, aligned with her announcements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AliceState {
    pub records: Vec<Record>,
}

/// Evidence revealed for one detected round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Evidence {
    #[serde(rename = "slit")]
    Slit(WhichSlit),
    #[serde(rename = "screen_m")]
    Screen(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnveilData {
    pub bit: Bit,
    pub entries: Vec<Option<Evidence>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    MalformedEvidence,
    DetectionConsistency,
    WhichSlitMatch,
    BalanceTest,
    GofBothOpen,
    GofSingle,
}

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::MalformedEvidence => "malformed-evidence",
            CheckName::DetectionConsistency => "detection-consistency",
            CheckName::WhichSlitMatch => "which-slit-match",
            CheckName::BalanceTest => "balance-test",
            CheckName::GofBothOpen => "gof-both-open",
            CheckName::GofSingle => "gof-single",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: CheckName,
    pub passed: bool,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub detail: Option<String>,
}

impl CheckResult {
    fn new(check: CheckName, passed: bool) -> Self {
        Self {
            check,
            passed,
            statistic: None,
            p_value: None,
            detail: None,
        }
    }

    fn statistic(mut self, s: f64) -> Self {
        self.statistic = Some(s);
        self
    }

    fn p_value(mut self, p: f64) -> Self {
        self.p_value = Some(p);
        self
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub accepted: bool,
    pub checks: Vec<CheckResult>,
}

impl Verdict {
    pub fn check(&self, name: CheckName) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == name)
    }

    /// Names of the checks that failed.
    pub fn failures(&self) -> Vec<CheckName> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.check).collect()
    }
}

/// Tabulated screen densities shared by every round of a protocol.
#[derive(Debug, Clone)]
pub struct ScreenPdfs {
    pub both_open: ScreenPdf,
    pub left: ScreenPdf,
    pub right: ScreenPdf,
}

impl ScreenPdfs {
    pub fn new(optics: &OpticsParams) -> Result<Self> {
        Ok(Self {
            both_open: screen_pdf(optics, SlitConfig::BothOpen)?,
            left: screen_pdf(optics, SlitConfig::LeftOnly)?,
            right: screen_pdf(optics, SlitConfig::RightOnly)?,
        })
    }

    pub fn for_config(&self, config: SlitConfig) -> Option<&ScreenPdf> {
        match config {
            SlitConfig::BothOpen => Some(&self.both_open),
            SlitConfig::LeftOnly => Some(&self.left),
            SlitConfig::RightOnly => Some(&self.right),
            SlitConfig::BothClosed => None,
        }
    }

    pub fn for_slit(&self, slit: WhichSlit) -> &ScreenPdf {
        match slit {
            WhichSlit::Left => &self.left,
            WhichSlit::Right => &self.right,
        }
    }
}

/// A photon that reached Alice. Measuring it consumes the handle.
pub struct Photon<'a> {
    config: SlitConfig,
    pdfs: &'a ScreenPdfs,
}

impl<'a> Photon<'a> {
    /// Telescope measurement: which slit the photon came through.
    pub fn observe_slit(self, rng: &mut SimRng) -> WhichSlit {
        sample_which_slit(self.config, rng).expect("arrived photons come through an open slit")
    }

    /// Screen measurement: landing position in metres.
    pub fn observe_screen(self, rng: &mut SimRng) -> f64 {
        let pdf = self
            .pdfs
            .for_config(self.config)
            .expect("arrived photons come through an open slit");
        sample_screen_position(pdf, rng)
    }
}

/// Alice's commit-phase behavior.
pub trait Committer {
    /// Handle one round. `photon` is `None` when nothing reached Alice.
    /// Returning `None` means no announcement was made, which aborts the protocol.
    fn commit_round(
        &mut self,
        round: usize,
        photon: Option<Photon<'_>>,
        rng: &mut SimRng,
    ) -> Option<(RoundAnnouncement, Record)>;
}

/// Step 1: Bob's secret settings. Both open and both closed each with
/// probability 1/3, left-only and right-only each with 1/6.
pub fn bob_draw_configs<R: Rng + ?Sized>(params: &ProtocolParams, rng: &mut R) -> Vec<RoundSecret> {
    (0..params.n_rounds)
        .map(|_| {
            let config = match rng.random_range(0..6u8) {
                0 | 1 => SlitConfig::BothOpen,
                2 | 3 => SlitConfig::BothClosed,
                4 => SlitConfig::LeftOnly,
                _ => SlitConfig::RightOnly,
            };
            RoundSecret { config }
        })
        .collect()
}

/// A validated protocol setup with its screen densities tabulated once.
#[derive(Debug, Clone)]
pub struct Protocol {
    params: ProtocolParams,
    pdfs: ScreenPdfs,
}

impl Protocol {
    pub fn new(params: ProtocolParams) -> Result<Self> {
        params.validate()?;
        let pdfs = ScreenPdfs::new(&params.optics)?;
        Ok(Self { params, pdfs })
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn pdfs(&self) -> &ScreenPdfs {
        &self.pdfs
    }

    /// Run the commit phase. Arrivals are drawn from `arrival_rng` alone, so
    /// they never depend on what the committer does with `alice_rng`.
    pub fn commit<C: Committer + ?Sized>(
        &self,
        committer: &mut C,
        secrets: &[RoundSecret],
        arrival_rng: &mut SimRng,
        alice_rng: &mut SimRng,
    ) -> Result<(CommitTranscript, AliceState)> {
        if secrets.len() != self.params.n_rounds {
            return Err(Error::LengthMismatch {
                what: "secrets",
                got: secrets.len(),
                expected: self.params.n_rounds,
            });
        }
        let mut announcements = Vec::with_capacity(secrets.len());
        let mut records = Vec::with_capacity(secrets.len());
        for (round, secret) in secrets.iter().enumerate() {
            let photon = photon_arrives(secret.config, &self.params.optics, arrival_rng).then_some(Photon {
                config: secret.config,
                pdfs: &self.pdfs,
            });
            let (announcement, record) = committer
                .commit_round(round, photon, alice_rng)
                .ok_or(Error::MissingAnnouncement { round })?;
            announcements.push(announcement);
            records.push(record);
        }
        Ok((
            CommitTranscript {
                params: self.params,
                announcements,
            },
            AliceState { records },
        ))
    }

    /// Bob's verification of an unveil.
    pub fn verify(
        &self,
        unveil: &UnveilData,
        secrets: &[RoundSecret],
        transcript: &CommitTranscript,
    ) -> Result<Verdict> {
        let n = secrets.len();
        if transcript.announcements.len() != n {
            return Err(Error::LengthMismatch {
                what: "announcements",
                got: transcript.announcements.len(),
                expected: n,
            });
        }
        if unveil.entries.len() != n {
            return Err(Error::LengthMismatch {
                what: "unveil entries",
                got: unveil.entries.len(),
                expected: n,
            });
        }
        let alpha = self.params.alpha;

        if let Some(problem) = self.malformed(unveil, transcript) {
            return Ok(Verdict {
                accepted: false,
                checks: vec![CheckResult::new(CheckName::MalformedEvidence, false).detail(problem)],
            });
        }

        let mut checks = vec![self.detection_consistency(secrets, transcript)];
        let detected = |i: usize| transcript.announcements[i].detected;

        match unveil.bit {
            Bit::Zero => {
                let mut mismatches = 0u64;
                let (mut left, mut right) = (0u64, 0u64);
                for (i, (secret, entry)) in secrets.iter().zip(&unveil.entries).enumerate() {
                    let Some(Evidence::Slit(claim)) = entry else { continue };
                    if !detected(i) {
                        continue;
                    }
                    match secret.config {
                        SlitConfig::BothOpen => match claim {
                            WhichSlit::Left => left += 1,
                            WhichSlit::Right => right += 1,
                        },
                        cfg => {
                            if cfg.open_slit() != Some(*claim) {
                                mismatches += 1;
                            }
                        }
                    }
                }
                checks.push(CheckResult::new(CheckName::WhichSlitMatch, mismatches == 0).statistic(mismatches as f64));
                if left + right == 0 {
                    checks.push(
                        CheckResult::new(CheckName::BalanceTest, true)
                            .p_value(1.0)
                            .detail("no both-open claims"),
                    );
                } else {
                    let r = binomial_balance_test(left, right, alpha / 2.0);
                    checks.push(
                        CheckResult::new(CheckName::BalanceTest, r.pass)
                            .statistic(left as f64 / (left + right) as f64)
                            .p_value(r.p_value),
                    );
                }
            }
            Bit::One => {
                let positions = |want: fn(SlitConfig) -> bool| -> Vec<f64> {
                    secrets
                        .iter()
                        .zip(&unveil.entries)
                        .filter(|(s, _)| want(s.config))
                        .filter_map(|(_, e)| match e {
                            Some(Evidence::Screen(x)) => Some(*x),
                            _ => None,
                        })
                        .collect()
                };
                let both = positions(|c| c == SlitConfig::BothOpen);
                let single = positions(SlitConfig::is_single);
                checks.push(gof_check(
                    CheckName::GofBothOpen,
                    &both,
                    &self.pdfs.both_open,
                    alpha / 2.0,
                )?);
                checks.push(gof_check(CheckName::GofSingle, &single, &self.pdfs.left, alpha / 2.0)?);
            }
        }

        Ok(Verdict {
            accepted: checks.iter().all(|c| c.passed),
            checks,
        })
    }

    fn malformed(&self, unveil: &UnveilData, transcript: &CommitTranscript) -> Option<String> {
        let w = self.params.optics.screen_half_width;
        for (i, (entry, ann)) in unveil.entries.iter().zip(&transcript.announcements).enumerate() {
            match (entry, ann.detected) {
                (None, false) => {}
                (Some(_), false) => return Some(format!("round {i}: evidence for an undetected round")),
                (None, true) => return Some(format!("round {i}: missing evidence for a detected round")),
                (Some(Evidence::Slit(_)), true) if unveil.bit == Bit::Zero => {}
                (Some(Evidence::Screen(x)), true) if unveil.bit == Bit::One => {
                    if x.is_nan() || x.abs() > w {
                        return Some(format!("round {i}: screen position {x} out of range"));
                    }
                }
                (Some(_), true) => return Some(format!("round {i}: evidence kind does not match bit {}", unveil.bit)),
            }
        }
        None
    }

    fn detection_consistency(&self, secrets: &[RoundSecret], transcript: &CommitTranscript) -> CheckResult {
        let eta = self.params.optics.efficiency;
        let pairs = secrets.iter().zip(&transcript.announcements);
        if eta >= 1.0 {
            let mismatches = pairs.filter(|(s, a)| a.detected != s.config.is_open()).count();
            return CheckResult::new(CheckName::DetectionConsistency, mismatches == 0).statistic(mismatches as f64);
        }
        let mut closed_hits = 0u64;
        let (mut open, mut hits) = (0u64, 0u64);
        for (s, a) in pairs {
            if s.config.is_open() {
                open += 1;
                hits += a.detected as u64;
            } else if a.detected {
                closed_hits += 1;
            }
        }
        if closed_hits > 0 {
            return CheckResult::new(CheckName::DetectionConsistency, false)
                .statistic(closed_hits as f64)
                .detail("detection announced on a closed-slit round");
        }
        let p = binomial_two_sided(hits, open, eta);
        let rate = if open > 0 { hits as f64 / open as f64 } else { eta };
        CheckResult::new(CheckName::DetectionConsistency, p >= self.params.alpha / 4.0)
            .statistic(rate)
            .p_value(p)
    }
}

fn gof_check(name: CheckName, samples: &[f64], pdf: &ScreenPdf, alpha: f64) -> Result<CheckResult> {
    if gof_cells(samples.len(), DEFAULT_TEST_BINS).is_none() {
        return Ok(
            CheckResult::new(name, true).detail(format!("skipped: {} samples are too few to test", samples.len()))
        );
    }
    let r = chi_squared_gof(samples, pdf, DEFAULT_TEST_BINS, alpha)?;
    Ok(CheckResult::new(name, r.pass)
        .statistic(r.statistic)
        .p_value(r.p_value)
        .detail(format!("{} samples, {} cells", samples.len(), r.cells)))
}

/// Run Alice's commit phase against `secrets`.
pub fn run_commit_phase<C: Committer + ?Sized>(
    committer: &mut C,
    secrets: &[RoundSecret],
    params: &ProtocolParams,
    arrival_rng: &mut SimRng,
    alice_rng: &mut SimRng,
) -> Result<(CommitTranscript, AliceState)> {
    Protocol::new(*params)?.commit(committer, secrets, arrival_rng, alice_rng)
}

/// Bob's verification; see [`Protocol::verify`].
pub fn bob_verify(
    unveil: &UnveilData,
    secrets: &[RoundSecret],
    transcript: &CommitTranscript,
    params: &ProtocolParams,
) -> Result<Verdict> {
    Protocol::new(*params)?.verify(unveil, secrets, transcript)
}

/// Whether every announcement matches photon arrival under ideal detection.
pub fn announcements_consistent(transcript: &CommitTranscript, secrets: &[RoundSecret]) -> bool {
    transcript.announcements.len() == secrets.len()
        && transcript
            .announcements
            .iter()
            .zip(secrets)
            .all(|(a, s)| a.detected == s.config.is_open())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Role};

    struct Silent;

    impl Committer for Silent {
        fn commit_round(
            &mut self,
            round: usize,
            _: Option<Photon<'_>>,
            _: &mut SimRng,
        ) -> Option<(RoundAnnouncement, Record)> {
            (round < 2).then_some((RoundAnnouncement { detected: false }, Record::None))
        }
    }

    fn secrets(configs: &[SlitConfig]) -> Vec<RoundSecret> {
        configs.iter().map(|&config| RoundSecret { config }).collect()
    }

    #[test]
    fn missing_announcement_aborts() {
        let params = ProtocolParams {
            n_rounds: 4,
            ..Default::default()
        };
        let s = secrets(&[SlitConfig::BothOpen; 4]);
        let mut a = substream(0, Role::Arrival, 0, 0);
        let mut b = substream(0, Role::Alice, 0, 0);
        let err = run_commit_phase(&mut Silent, &s, &params, &mut a, &mut b).unwrap_err();
        assert_eq!(err, Error::MissingAnnouncement { round: 2 });
    }

    #[test]
    fn draw_length_and_determinism() {
        let params = ProtocolParams {
            n_rounds: 1,
            ..Default::default()
        };
        assert_eq!(bob_draw_configs(&params, &mut substream(1, Role::Bob, 0, 0)).len(), 1);
        let params = ProtocolParams {
            n_rounds: 50,
            ..Default::default()
        };
        let a = bob_draw_configs(&params, &mut substream(1, Role::Bob, 0, 0));
        let b = bob_draw_configs(&params, &mut substream(1, Role::Bob, 0, 0));
        assert_eq!(a, b);
    }

    fn transcript(params: &ProtocolParams, detected: &[bool]) -> CommitTranscript {
        CommitTranscript {
            params: *params,
            announcements: detected.iter().map(|&d| RoundAnnouncement { detected: d }).collect(),
        }
    }

    #[test]
    fn wrong_slit_claim_is_rejected() {
        let params = ProtocolParams {
            n_rounds: 3,
            ..Default::default()
        };
        let s = secrets(&[SlitConfig::LeftOnly, SlitConfig::BothClosed, SlitConfig::BothOpen]);
        let t = transcript(&params, &[true, false, true]);
        let unveil = UnveilData {
            bit: Bit::Zero,
            entries: vec![
                Some(Evidence::Slit(WhichSlit::Right)),
                None,
                Some(Evidence::Slit(WhichSlit::Left)),
            ],
        };
        let v = bob_verify(&unveil, &s, &t, &params).unwrap();
        assert!(!v.accepted);
        assert_eq!(v.failures(), vec![CheckName::WhichSlitMatch]);
    }

    #[test]
    fn malformed_evidence() {
        let params = ProtocolParams {
            n_rounds: 2,
            ..Default::default()
        };
        let s = secrets(&[SlitConfig::BothOpen, SlitConfig::LeftOnly]);
        let t = transcript(&params, &[true, true]);
        let w = params.optics.screen_half_width;
        let cases = [
            UnveilData {
                bit: Bit::One,
                entries: vec![Some(Evidence::Screen(2.0 * w)), Some(Evidence::Screen(0.0))],
            },
            UnveilData {
                bit: Bit::One,
                entries: vec![Some(Evidence::Slit(WhichSlit::Left)), Some(Evidence::Screen(0.0))],
            },
            UnveilData {
                bit: Bit::Zero,
                entries: vec![Some(Evidence::Slit(WhichSlit::Left)), None],
            },
            UnveilData {
                bit: Bit::One,
                entries: vec![Some(Evidence::Screen(f64::NAN)), Some(Evidence::Screen(0.0))],
            },
        ];
        for unveil in cases {
            let v = bob_verify(&unveil, &s, &t, &params).unwrap();
            assert!(!v.accepted);
            assert_eq!(v.failures(), vec![CheckName::MalformedEvidence], "{unveil:?}");
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let params = ProtocolParams {
            n_rounds: 2,
            ..Default::default()
        };
        let s = secrets(&[SlitConfig::BothOpen, SlitConfig::LeftOnly]);
        let t = transcript(&params, &[true]);
        let unveil = UnveilData {
            bit: Bit::Zero,
            entries: vec![None, None],
        };
        assert!(matches!(
            bob_verify(&unveil, &s, &t, &params),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn empty_protocol_is_vacuously_accepted() {
        let params = ProtocolParams {
            n_rounds: 0,
            ..Default::default()
        };
        let t = transcript(&params, &[]);
        for bit in [Bit::Zero, Bit::One] {
            let v = bob_verify(&UnveilData { bit, entries: vec![] }, &[], &t, &params).unwrap();
            assert!(v.accepted);
        }
    }

    #[test]
    fn detection_on_closed_round_fails() {
        let params = ProtocolParams {
            n_rounds: 1,
            ..Default::default()
        };
        let s = secrets(&[SlitConfig::BothClosed]);
        let t = transcript(&params, &[true]);
        let unveil = UnveilData {
            bit: Bit::One,
            entries: vec![Some(Evidence::Screen(0.0))],
        };
        let v = bob_verify(&unveil, &s, &t, &params).unwrap();
        assert_eq!(v.failures(), vec![CheckName::DetectionConsistency]);
    }

    #[test]
    fn lossy_detection_uses_rate_test() {
        let mut params = ProtocolParams {
            n_rounds: 40,
            ..Default::default()
        };
        params.optics.efficiency = 0.5;
        let s = secrets(&[SlitConfig::LeftOnly; 40]);
        let detected: Vec<bool> = (0..40).map(|i| i % 2 == 0).collect();
        let entries = detected
            .iter()
            .map(|&d| d.then_some(Evidence::Slit(WhichSlit::Left)))
            .collect();
        let unveil = UnveilData {
            bit: Bit::Zero,
            entries,
        };
        let v = bob_verify(&unveil, &s, &transcript(&params, &detected), &params).unwrap();
        assert!(v.accepted);
        let c = v.check(CheckName::DetectionConsistency).unwrap();
        assert_eq!(c.statistic, Some(0.5));
        assert!((c.p_value.unwrap() - 1.0).abs() < 1e-9);

        // Everything detected at eta = 0.5 is implausible.
        let all = vec![true; 40];
        let unveil = UnveilData {
            bit: Bit::Zero,
            entries: vec![Some(Evidence::Slit(WhichSlit::Left)); 40],
        };
        let v = bob_verify(&unveil, &s, &transcript(&params, &all), &params).unwrap();
        assert_eq!(v.failures(), vec![CheckName::DetectionConsistency]);
    }

    #[test]
    fn bit_serializes_as_integer() {
        assert_eq!(serde_json::to_string(&Bit::One).unwrap(), "1");
        assert_eq!(serde_json::from_str::<Bit>("0").unwrap(), Bit::Zero);
        assert!(serde_json::from_str::<Bit>("2").is_err());
        assert_eq!(
            serde_json::to_string(&Evidence::Slit(WhichSlit::Left)).unwrap(),
            r#"{"slit":"left"}"#
        );
    }
}
