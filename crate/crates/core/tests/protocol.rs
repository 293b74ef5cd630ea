use proptest::prelude::*;
use qbc_core::adversary::{estimate_cheat_success, run_protocol, GuessMode, StrategySpec};
use qbc_core::optics::{sample_screen_position, screen_pdf, OpticsParams, SlitConfig};
use qbc_core::protocol::*;
use qbc_core::rng::{substream, Role, RunStreams};
use qbc_core::stats::{chi_squared_gof, DEFAULT_TEST_BINS};
use rayon::prelude::*;

fn params(n: usize) -> ProtocolParams {
    ProtocolParams {
        n_rounds: n,
        ..Default::default()
    }
}

#[test]
fn secret_settings_follow_the_stated_distribution() {
    let p = params(300_000);
    let s = bob_draw_configs(&p, &mut substream(1, Role::Bob, 0, 0));
    let frac = |c: SlitConfig| s.iter().filter(|r| r.config == c).count() as f64 / s.len() as f64;
    assert!((frac(SlitConfig::BothOpen) - 1.0 / 3.0).abs() <= 0.006);
    assert!((frac(SlitConfig::BothClosed) - 1.0 / 3.0).abs() <= 0.006);
    assert!((frac(SlitConfig::LeftOnly) - 1.0 / 6.0).abs() <= 0.005);
    assert!((frac(SlitConfig::RightOnly) - 1.0 / 6.0).abs() <= 0.005);
}

#[test]
fn honest_announcements_track_open_slits() {
    let protocol = Protocol::new(params(200)).unwrap();
    for bit in [Bit::Zero, Bit::One] {
        let run = run_protocol(&StrategySpec::honest(bit), &protocol, 4).unwrap();
        assert!(announcements_consistent(&run.transcript, &run.secrets));
    }
}

#[test]
fn honest_slit_records_on_left_only_rounds_are_left() {
    let p = params(50);
    let protocol = Protocol::new(p).unwrap();
    let secrets = vec![
        RoundSecret {
            config: SlitConfig::LeftOnly
        };
        50
    ];
    let mut s = RunStreams::for_trial(0, 0, 50);
    let (_, state) = protocol
        .commit(
            &mut StrategySpec::honest(Bit::Zero).committer(),
            &secrets,
            &mut s.arrival,
            &mut s.alice,
        )
        .unwrap();
    assert!(state
        .records
        .iter()
        .all(|r| *r == Record::Slit(qbc_core::optics::WhichSlit::Left)));
}

#[test]
fn transcripts_under_shared_secrets_are_byte_identical() {
    let p = params(60);
    let protocol = Protocol::new(p).unwrap();
    for trial in 0..50 {
        let mut base = RunStreams::for_trial(9, trial, 60);
        let secrets = bob_draw_configs(&p, &mut base.bob);
        let view = |bit| {
            let mut s = RunStreams::for_trial(9, trial, 60);
            let (t, _) = protocol
                .commit(
                    &mut StrategySpec::honest(bit).committer(),
                    &secrets,
                    &mut s.arrival,
                    &mut s.alice,
                )
                .unwrap();
            serde_json::to_vec(&t).unwrap()
        };
        assert_eq!(view(Bit::Zero), view(Bit::One));
    }
}

#[test]
fn honest_screen_data_passes_gof_at_n_3000() {
    // Completeness of the both-open GOF: 500 protocols of 3000 rounds.
    let protocol = Protocol::new(params(3000)).unwrap();
    let passes: usize = (0..500u64)
        .into_par_iter()
        .map(|t| {
            let run = run_protocol(&StrategySpec::honest(Bit::One), &protocol, t).unwrap();
            run.verdict.check(CheckName::GofBothOpen).unwrap().passed as usize
        })
        .sum();
    assert!(passes as f64 / 500.0 >= 0.98, "{passes}/500");
}

#[test]
fn gof_detects_single_slit_data_against_both_open() {
    let optics = OpticsParams::default();
    let single = screen_pdf(&optics, SlitConfig::LeftOnly).unwrap();
    let double = screen_pdf(&optics, SlitConfig::BothOpen).unwrap();
    let rejected = (0..200u64)
        .filter(|&r| {
            let mut rng = substream(21, Role::Aux, r, 0);
            let xs: Vec<f64> = (0..3000).map(|_| sample_screen_position(&single, &mut rng)).collect();
            !chi_squared_gof(&xs, &double, DEFAULT_TEST_BINS, 0.01).unwrap().pass
        })
        .count();
    assert!(rejected >= 198, "{rejected}/200");
}

#[test]
fn verdicts_are_pure() {
    let protocol = Protocol::new(params(60)).unwrap();
    let run = run_protocol(&StrategySpec::honest(Bit::One), &protocol, 2).unwrap();
    let again = protocol.verify(&run.unveil, &run.secrets, &run.transcript).unwrap();
    assert_eq!(run.verdict, again);
}

#[test]
fn fabricated_screen_data_loses_with_more_rounds() {
    let rates: Vec<f64> = [30, 60, 120, 300]
        .iter()
        .map(|&n| {
            estimate_cheat_success(&StrategySpec::fabricate_screen(), &params(n), 2000)
                .unwrap()
                .acceptance_rate
        })
        .collect();
    assert!(rates.windows(2).all(|w| w[0] >= w[1]), "{rates:?}");
    assert!(rates[3] <= 0.01, "{rates:?}");
}

#[test]
fn unmeasured_announcements_match_secrets_at_rate_five_ninths_per_round() {
    // Announce with probability 2/3: consistent when the announcement agrees
    // with arrival, (2/3)(2/3) + (1/3)(1/3) = 5/9 per round.
    let spec = StrategySpec::no_detection(2.0 / 3.0);
    for n in [1usize, 2, 4] {
        let protocol = Protocol::new(params(n)).unwrap();
        let trials = 20_000u64;
        let hits = (0..trials)
            .filter(|&t| {
                let run = run_protocol(&spec, &protocol, t).unwrap();
                announcements_consistent(&run.transcript, &run.secrets)
            })
            .count();
        let rate = hits as f64 / trials as f64;
        let expect = (5.0f64 / 9.0).powi(n as i32);
        let sd = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!((rate - expect).abs() < 4.0 * sd, "N={n}: {rate} vs {expect}");
    }
}

#[test]
fn lossy_detector_honest_runs_are_accepted() {
    let mut p = params(60);
    p.optics.efficiency = 0.8;
    for bit in [Bit::Zero, Bit::One] {
        let e = estimate_cheat_success(&StrategySpec::honest(bit), &p, 500).unwrap();
        assert!(e.acceptance_rate >= 0.95, "{bit}: {e:?}");
    }
}

fn spec_strategy() -> impl Strategy<Value = StrategySpec> {
    prop_oneof![
        Just(StrategySpec::honest(Bit::Zero)),
        Just(StrategySpec::honest(Bit::One)),
        Just(StrategySpec::fabricate_screen()),
        Just(StrategySpec::guess_slit(GuessMode::Uniform)),
        Just(StrategySpec::guess_slit(GuessMode::Posterior)),
        (0.0f64..=1.0).prop_map(StrategySpec::no_detection),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn every_strategy_is_format_honest(spec in spec_strategy(), n in 0usize..40, trial: u64) {
        let protocol = Protocol::new(params(n)).unwrap();
        let run = run_protocol(&spec, &protocol, trial).unwrap();
        prop_assert_eq!(run.transcript.announcements.len(), n);
        prop_assert_eq!(run.unveil.entries.len(), n);
        for (a, e) in run.transcript.announcements.iter().zip(&run.unveil.entries) {
            prop_assert_eq!(a.detected, e.is_some());
        }
        prop_assert!(run.verdict.check(CheckName::MalformedEvidence).is_none());
    }

    #[test]
    fn contradicting_presence_pattern_is_rejected(n in 1usize..30, trial: u64, flip in any::<prop::sample::Index>()) {
        let protocol = Protocol::new(params(n)).unwrap();
        let mut run = run_protocol(&StrategySpec::honest(Bit::One), &protocol, trial).unwrap();
        let i = flip.index(n);
        run.unveil.entries[i] = match run.unveil.entries[i] {
            Some(_) => None,
            None => Some(Evidence::Screen(0.0)),
        };
        let v = protocol.verify(&run.unveil, &run.secrets, &run.transcript).unwrap();
        prop_assert!(!v.accepted);
        prop_assert_eq!(v.failures(), vec![CheckName::MalformedEvidence]);
    }

    #[test]
    fn wrong_claim_on_a_single_slit_round_is_always_caught(n in 1usize..40, trial: u64) {
        let protocol = Protocol::new(params(n)).unwrap();
        let mut run = run_protocol(&StrategySpec::honest(Bit::Zero), &protocol, trial).unwrap();
        let target = run.secrets.iter().position(|s| s.config.is_single());
        prop_assume!(target.is_some());
        let i = target.unwrap();
        let other = match run.secrets[i].config.open_slit().unwrap() {
            qbc_core::optics::WhichSlit::Left => qbc_core::optics::WhichSlit::Right,
            qbc_core::optics::WhichSlit::Right => qbc_core::optics::WhichSlit::Left,
        };
        run.unveil.entries[i] = Some(Evidence::Slit(other));
        let v = protocol.verify(&run.unveil, &run.secrets, &run.transcript).unwrap();
        prop_assert!(v.failures().contains(&CheckName::WhichSlitMatch));
    }
}
