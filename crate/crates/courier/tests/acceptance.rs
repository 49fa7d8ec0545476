//! Acceptance suite. Each test checks one release criterion and prints
//! a single PASS/FAIL line (visible with `--nocapture`).
//!
//! The two full sweeps (3 scenarios x 5 values x 100 replications each)
//! are shared between criteria through lazy statics, so the suite runs
//! them once.

use once_cell::sync::Lazy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use courier::affect::{
    self, AffectParams, PadState, Personality, SourceVector, ANCHORS, PROMOTED_SOFTENING,
};
use courier::config::{Scenario, SimConfig, ALL_SCENARIOS};
use courier::engine;
use courier::events::Event;
use courier::harness::{self, ExperimentSpec, ResultRow, SweepVar};

static IDLE_SWEEP: Lazy<Vec<ResultRow>> = Lazy::new(|| {
    let spec = ExperimentSpec::default_for(SweepVar::IdleFraction, SimConfig::default());
    harness::run_experiment(&spec).expect("default idle sweep runs")
});

static PRIVACY_SWEEP: Lazy<Vec<ResultRow>> = Lazy::new(|| {
    let spec = ExperimentSpec::default_for(SweepVar::PrivacyProb, SimConfig::default());
    harness::run_experiment(&spec).expect("default privacy sweep runs")
});

fn report(name: &str, pass: bool) {
    println!("ACCEPTANCE {name}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "acceptance criterion failed: {name}");
}

fn mean_reward(rows: &[ResultRow], scenario: Scenario, value: f64) -> f64 {
    let rewards: Vec<f64> = rows
        .iter()
        .filter(|r| r.scenario == scenario && r.value == value)
        .map(|r| r.total_reward)
        .collect();
    assert!(!rewards.is_empty());
    rewards.iter().sum::<f64>() / rewards.len() as f64
}

/// Spearman rank correlation with average ranks for ties.
fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut out = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for k in i..=j {
                out[idx[k]] = avg;
            }
            i = j + 1;
        }
        out
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx.sqrt() * vy.sqrt())
}

#[test]
fn criterion_1_idle_sweep_ordering() {
    let rows = &IDLE_SWEEP;
    let pass = [0.2, 0.4, 0.6, 0.8].iter().all(|&v| {
        let nt = mean_reward(rows, Scenario::NoTrust, v);
        nt < mean_reward(rows, Scenario::NoEmotions, v)
            && nt < mean_reward(rows, Scenario::EmotionalTrust, v)
    });
    report(
        "idle sweep: no-delegation mean reward strictly worst at idle >= 0.2",
        pass,
    );
}

#[test]
fn criterion_2_privacy_trend() {
    let rows = &PRIVACY_SWEEP;
    let values = [0.0, 0.2, 0.4, 0.6, 0.8];
    let pass = ALL_SCENARIOS.iter().all(|&scenario| {
        let means: Vec<f64> = values
            .iter()
            .map(|&v| mean_reward(rows, scenario, v))
            .collect();
        spearman(&values, &means) <= -0.8
    });
    report(
        "privacy sweep: mean reward decreasing in privacy probability (Spearman <= -0.8)",
        pass,
    );
}

#[test]
fn criterion_3_idle_saturation() {
    let rows = &IDLE_SWEEP;
    let m0 = mean_reward(rows, Scenario::EmotionalTrust, 0.0);
    let m4 = mean_reward(rows, Scenario::EmotionalTrust, 0.4);
    let m8 = mean_reward(rows, Scenario::EmotionalTrust, 0.8);
    report(
        "idle sweep: full-model reward gain saturates above idle 0.4",
        (m8 - m4) < (m4 - m0),
    );
}

#[test]
fn criterion_4_affect_equation_oracles() {
    // Independent brute-force evaluations of the four affect update
    // rules, kept deliberately separate from the library code.
    let params = AffectParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97);
    let mut pad = |rng: &mut ChaCha8Rng| {
        PadState::new(
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(0.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        )
    };
    let personalities = [
        Personality::Extroverted,
        Personality::Neurotic,
        Personality::Psychotic,
    ];
    let mut worst: f64 = 0.0;

    for _ in 0..1000 {
        // Intensity: w = clamp(1 - (d - delta)/(phi - delta), 0, 1).
        let s = pad(&mut rng);
        for a in &ANCHORS {
            let d = ((s.pleasure - a.pleasure).powi(2)
                + (s.arousal - a.arousal).powi(2)
                + (s.dominance - a.dominance).powi(2))
            .sqrt();
            let expected = (1.0 - (d - 0.2) / 0.8).clamp(0.0, 1.0);
            worst = worst.max((affect::emotion_intensity(&s, a, &params) - expected).abs());
        }

        // Pleasure decay: P' = P - Vp * A, Vp softened to 0.05 when the
        // personality promotes the sign of P.
        let s = pad(&mut rng);
        let pers = personalities[rng.gen_range(0..3)];
        let promoted = (pers == Personality::Extroverted && s.pleasure > 0.0)
            || (pers == Personality::Neurotic && s.pleasure < 0.0);
        let vp = if promoted { PROMOTED_SOFTENING } else { 0.1 };
        let expected = (s.pleasure - vp * s.arousal).clamp(-1.0, 1.0);
        worst = worst.max((affect::decay_pleasure(&s, pers, &params).pleasure - expected).abs());

        // Arousal: A' = A + sum_j (S_j - S_j_prev) * Va.
        let s = pad(&mut rng);
        let flags = |rng: &mut ChaCha8Rng| SourceVector {
            anger_perceived: rng.gen(),
            own_privacy: rng.gen(),
            alien_privacy: rng.gen(),
        };
        let (prev, curr) = (flags(&mut rng), flags(&mut rng));
        let diff = |c: bool, p: bool| (c as i8 - p as i8) as f64;
        let expected = (s.arousal
            + 0.1
                * (diff(curr.anger_perceived, prev.anger_perceived)
                    + diff(curr.own_privacy, prev.own_privacy)
                    + diff(curr.alien_privacy, prev.alien_privacy)))
        .clamp(0.0, 1.0);
        worst =
            worst.max((affect::update_arousal(&s, &prev, &curr, &params).arousal - expected).abs());

        // Dominance decay: D' = D - Vd * A, Vd softened to 0.05 for the
        // psychotic personality while D > 0.
        let s = pad(&mut rng);
        let pers = personalities[rng.gen_range(0..3)];
        let vd = if pers == Personality::Psychotic && s.dominance > 0.0 {
            PROMOTED_SOFTENING
        } else {
            0.1
        };
        let expected = (s.dominance - vd * s.arousal).clamp(-1.0, 1.0);
        worst = worst.max((affect::decay_dominance(&s, pers, &params).dominance - expected).abs());
    }
    report(
        "affect equations match independent oracles within 1e-9 over 1000 random cases each",
        worst < 1e-9,
    );
}

#[test]
fn criterion_5_invariants_over_seeded_runs() {
    // The engine asserts PAD bounds, trust bounds, package conservation,
    // protocol transition legality and desire-automaton consistency at
    // every cycle boundary; any violation panics the run.
    let pass = (0..100).all(|seed| {
        for scenario in ALL_SCENARIOS {
            let mut cfg = SimConfig::default();
            cfg.seed = seed;
            cfg.scenario = scenario;
            engine::run(cfg).expect("valid config");
        }
        true
    });
    report("invariant checks hold across 100 seeded runs of every scenario", pass);
}

#[test]
fn criterion_6_determinism() {
    let mut cfg = SimConfig::default();
    cfg.seed = 42;
    let log_a = engine::run(cfg.clone()).unwrap().log.to_jsonl();
    let log_b = engine::run(cfg).unwrap().log.to_jsonl();

    let spec = ExperimentSpec::default_for(SweepVar::IdleFraction, SimConfig::default());
    let rerun = harness::run_experiment(&spec).expect("rerun of the default sweep");
    let csv_a = harness::rows_to_csv(&IDLE_SWEEP);
    let csv_b = harness::rows_to_csv(&rerun);

    report(
        "repeated runs give byte-identical event logs and experiment CSVs",
        log_a == log_b && !log_a.is_empty() && csv_a == csv_b,
    );
}

#[test]
fn criterion_7_scenario_contracts() {
    let mut no_messages = true;
    let mut zero_modifier = true;
    for seed in 0..20 {
        let mut cfg = SimConfig::default();
        cfg.seed = seed;
        cfg.scenario = Scenario::NoTrust;
        let result = engine::run(cfg.clone()).unwrap();
        no_messages &= !result
            .log
            .events()
            .iter()
            .any(|e| matches!(e, Event::Message { .. }));

        cfg.scenario = Scenario::NoEmotions;
        let result = engine::run(cfg).unwrap();
        zero_modifier &= result.log.events().iter().all(|e| match e {
            Event::TrustDecision { mood_modifier, .. } => *mood_modifier == 0.0,
            _ => true,
        });
    }
    report(
        "scenario contracts: no protocol messages without trust, zero mood modifier without emotions",
        no_messages && zero_modifier,
    );
}

#[test]
fn criterion_8_termination() {
    // The idle sweep at value 0.4 runs the default configuration over
    // seeds 0..100; every row of both sweeps must have terminated.
    let pass = IDLE_SWEEP.iter().all(|r| r.terminated)
        && PRIVACY_SWEEP.iter().all(|r| r.terminated)
        && IDLE_SWEEP.len() == 1500
        && PRIVACY_SWEEP.len() == 1500;
    report(
        "all 3000 sweep runs deliver every package within the cycle cap",
        pass,
    );
}
