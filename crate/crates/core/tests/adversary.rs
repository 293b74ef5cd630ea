use qbc_core::adversary::*;
use qbc_core::optics::{fitted_visibility, SlitConfig};
use qbc_core::protocol::*;
use qbc_core::stats::{bonferroni_z, wilson_interval};
use rayon::prelude::*;
use std::collections::BTreeMap;

fn protocol(n: usize) -> Protocol {
    Protocol::new(ProtocolParams {
        n_rounds: n,
        ..Default::default()
    })
    .unwrap()
}

fn both_open_positions(run: &ProtocolRun) -> Vec<f64> {
    run.secrets
        .iter()
        .zip(&run.unveil.entries)
        .filter(|(s, _)| s.config == SlitConfig::BothOpen)
        .filter_map(|(_, e)| match e {
            Some(Evidence::Screen(x)) => Some(*x),
            _ => None,
        })
        .collect()
}

#[test]
fn forged_positions_have_no_fringes_and_honest_ones_do() {
    let p = protocol(3000);
    let window = 3.0 * p.params().optics.fringe_period();
    let forged = run_protocol(&StrategySpec::fabricate_screen(), &p, 0).unwrap();
    let honest = run_protocol(&StrategySpec::honest(Bit::One), &p, 0).unwrap();
    let vf = fitted_visibility(&both_open_positions(&forged), &p.params().optics, window).unwrap();
    let vh = fitted_visibility(&both_open_positions(&honest), &p.params().optics, window).unwrap();
    assert!(vh >= 0.9, "honest {vh}");
    assert!(vf < 0.2, "forged {vf}");
}

#[test]
fn forged_both_open_data_fails_and_single_slit_data_passes() {
    // N = 3000 gives about 1000 both-open samples per protocol.
    let p = protocol(3000);
    let results: Vec<(bool, bool)> = (0..200u64)
        .into_par_iter()
        .map(|t| {
            let run = run_protocol(&StrategySpec::fabricate_screen(), &p, t).unwrap();
            (
                run.verdict.check(CheckName::GofBothOpen).unwrap().passed,
                run.verdict.check(CheckName::GofSingle).unwrap().passed,
            )
        })
        .collect();
    let both_rejected = results.iter().filter(|r| !r.0).count();
    let single_passed = results.iter().filter(|r| r.1).count();
    assert!(both_rejected >= 198, "{both_rejected}/200");
    // The single-slit check runs at alpha/2 = 0.005.
    assert!(single_passed >= 194, "{single_passed}/200");
}

#[test]
fn blind_forgery_fails_the_single_slit_check() {
    let p = protocol(600);
    let spec = StrategySpec::new(StrategyKind::FabricateScreen { blind: true });
    let caught = (0..100u64)
        .filter(|&t| {
            let run = run_protocol(&spec, &p, t).unwrap();
            !run.verdict.check(CheckName::GofSingle).unwrap().passed
        })
        .count();
    assert!(caught >= 95, "{caught}/100");
}

#[test]
fn guessing_matches_each_single_slit_round_with_probability_one_half() {
    // Conditional on k detected single-slit rounds, all claims match with
    // probability 2^-k.
    let p = protocol(24);
    let spec = StrategySpec::guess_slit(GuessMode::Uniform);
    let tally: BTreeMap<usize, (u64, u64)> = (0..200_000u64)
        .into_par_iter()
        .map(|t| {
            let run = run_protocol(&spec, &p, t).unwrap();
            let k = run
                .secrets
                .iter()
                .zip(&run.transcript.announcements)
                .filter(|(s, a)| s.config.is_single() && a.detected)
                .count();
            let hit = run.verdict.check(CheckName::WhichSlitMatch).unwrap().passed;
            (k, hit)
        })
        .fold(BTreeMap::new, |mut m, (k, hit)| {
            let e = m.entry(k).or_insert((0u64, 0u64));
            e.0 += 1;
            e.1 += hit as u64;
            m
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, (n, h)) in b {
                let e = a.entry(k).or_insert((0, 0));
                e.0 += n;
                e.1 += h;
            }
            a
        });
    let tested: Vec<_> = tally.iter().filter(|(_, (n, _))| *n >= 1000).collect();
    let z = bonferroni_z(0.95, tested.len());
    for (&k, &(n, hits)) in &tested {
        let (lo, hi) = wilson_interval(hits, n, z);
        let expect = 0.5f64.powi(k as i32);
        assert!(lo <= expect && expect <= hi, "k={k}: {hits}/{n} vs {expect}");
    }

    // Unconditionally, each of the 24 rounds is single-slit with probability
    // 1/3 and then matched with probability 1/2, so P = (1 - 1/6)^24.
    let total: u64 = tally.values().map(|v| v.0).sum();
    let all: u64 = tally.values().map(|v| v.1).sum();
    let rate = all as f64 / total as f64;
    let expect = (5.0f64 / 6.0).powi(24);
    let (lo, hi) = wilson_interval(all, total, 3.0);
    assert!(lo <= expect && expect <= hi, "{rate} vs {expect}");
}

#[test]
fn posterior_guessing_is_uniform_guessing() {
    let p = ProtocolParams {
        n_rounds: 8,
        ..Default::default()
    };
    let u = estimate_cheat_success(&StrategySpec::guess_slit(GuessMode::Uniform), &p, 20_000).unwrap();
    let q = estimate_cheat_success(&StrategySpec::guess_slit(GuessMode::Posterior), &p, 20_000).unwrap();
    assert!(
        u.wilson_ci_95.0 <= q.wilson_ci_95.1 && q.wilson_ci_95.0 <= u.wilson_ci_95.1,
        "{u:?} {q:?}"
    );
}

#[test]
fn empty_guess_is_vacuously_accepted() {
    let run = run_protocol(&StrategySpec::guess_slit(GuessMode::Uniform), &protocol(0), 0).unwrap();
    assert!(run.verdict.accepted);
    assert!(run.unveil.entries.is_empty());
}

#[test]
fn honest_completeness_anchor() {
    let p = ProtocolParams {
        n_rounds: 60,
        ..Default::default()
    };
    for bit in [Bit::Zero, Bit::One] {
        let e = estimate_cheat_success(&StrategySpec::honest(bit), &p, 2000).unwrap();
        assert!(e.acceptance_rate >= 1.0 - p.alpha - 0.02, "{e:?}");
        assert!(e.wilson_ci_95.0 <= e.acceptance_rate && e.acceptance_rate <= e.wilson_ci_95.1);
    }
}

#[test]
fn estimates_are_reproducible() {
    let p = ProtocolParams {
        n_rounds: 30,
        ..Default::default()
    };
    let spec = StrategySpec::fabricate_screen();
    let a = estimate_cheat_success(&spec, &p, 300).unwrap();
    let b = estimate_cheat_success(&spec, &p, 300).unwrap();
    assert_eq!(a, b);
}

#[test]
fn substream_changes_alice_but_not_bob() {
    let p = protocol(40);
    let a = StrategySpec::honest(Bit::One);
    let b = StrategySpec { substream: 1, ..a };
    let ra = run_protocol(&a, &p, 3).unwrap();
    let rb = run_protocol(&b, &p, 3).unwrap();
    assert_eq!(ra.secrets, rb.secrets);
    assert_eq!(ra.transcript, rb.transcript);
    assert_ne!(ra.unveil, rb.unveil);
}
