use std::sync::Arc;

use persuade_core::dialogue::{CommunicativeFunction as F, EthicalProfile, ProfileChoice};
use persuade_core::pack::covid19;
use persuade_core::session::{Direction, Transcript};
use persuade_core::sim::{
    audit, builtin_mix, compliant, run_batch, simulate_session, skeptic, ProfileMix, Rule,
    UserProfile,
};

fn mask_functions(t: &Transcript) -> Vec<F> {
    t.acts().filter(|a| a.scene == "mask").map(|a| a.function).collect()
}

#[test]
fn skeptic_open_minded_reaches_substitution_on_mask() {
    let t = simulate_session(Arc::new(covid19()), &skeptic(), 7, ProfileChoice::OpenMinded).unwrap();
    let f = mask_functions(&t);
    let pos = |x: F| f.iter().rposition(|g| *g == x).unwrap();
    assert!(pos(F::Argument) < pos(F::Exception));
    assert!(pos(F::Exception) < pos(F::Question));
    assert!(pos(F::Question) < pos(F::Substitution));
    assert!(audit(&covid19(), &t).is_empty());
}

#[test]
fn compliant_user_hears_no_persuasion() {
    for seed in 0..20 {
        let t = simulate_session(Arc::new(covid19()), &compliant(), seed, ProfileChoice::Random).unwrap();
        assert!(t
            .acts()
            .all(|a| !matches!(a.function, F::Inform | F::Argument | F::Exception)));
    }
}

#[test]
fn same_inputs_same_transcript() {
    let pack = Arc::new(covid19());
    let mix = builtin_mix("mixed").unwrap();
    for seed in 0..10 {
        for e in &mix.profiles {
            let a = simulate_session(pack.clone(), &e.profile, seed, ProfileChoice::Random).unwrap();
            let b = simulate_session(pack.clone(), &e.profile, seed, ProfileChoice::Random).unwrap();
            assert_eq!(a.to_jsonl(), b.to_jsonl());
        }
    }
}

#[test]
fn single_run_batch_counts_one() {
    let r = run_batch(Arc::new(covid19()), &builtin_mix("mixed").unwrap(), 1, 5, ProfileChoice::Random).unwrap();
    assert_eq!(r.runs, 1);
    assert_eq!(r.profiles.values().sum::<u64>(), 1);
    assert_eq!(r.ethical_profiles.values().sum::<u64>(), 1);
    assert!(r.per_topic.values().all(|o| o.knowledge.total() == 1 && o.intention.total() == 1));
}

#[test]
fn batch_is_deterministic_and_clean() {
    let pack = Arc::new(covid19());
    let mix = builtin_mix("mixed").unwrap();
    let a = run_batch(pack.clone(), &mix, 300, 1000, ProfileChoice::Random).unwrap();
    let b = run_batch(pack, &mix, 300, 1000, ProfileChoice::Random).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.violations, 0, "{:?}", a.violation_samples);
    assert_eq!(a.techniques.values().sum::<u64>(), a.arguments);
}

#[test]
fn study_mix_runs_clean() {
    let r = run_batch(Arc::new(covid19()), &builtin_mix("study-mix").unwrap(), 200, 0, ProfileChoice::Random).unwrap();
    assert_eq!(r.violations, 0, "{:?}", r.violation_samples);
}

#[test]
fn missing_rule_is_a_harness_fault_naming_the_question() {
    let mut p: UserProfile = skeptic();
    p.rules.retain(|r| r.kind != persuade_core::dialogue::QuestionKind::IntentionProbe);
    let err = simulate_session(Arc::new(covid19()), &p, 0, ProfileChoice::Neutral).unwrap_err();
    assert!(err.to_string().contains("mask-intention"), "{err}");
    let err = run_batch(Arc::new(covid19()), &ProfileMix::single(p), 3, 0, ProfileChoice::Neutral).unwrap_err();
    assert!(err.to_string().contains("intention"), "{err}");
}

// A policy that substitutes without ever raising the exception.
fn substitution_without_exception(t: &Transcript) -> Transcript {
    let mut out = t.clone();
    let exception = out
        .entries
        .iter()
        .position(|e| e.act.as_ref().is_some_and(|a| a.function == F::Exception))
        .unwrap();
    // drop the exception, the role question and its answer
    out.entries.drain(exception..exception + 3);
    for (i, e) in out.entries.iter_mut().enumerate() {
        e.seq = i as u64;
    }
    out
}

#[test]
fn detector_catches_substitution_without_exception() {
    let t = simulate_session(Arc::new(covid19()), &skeptic(), 3, ProfileChoice::OpenMinded).unwrap();
    let broken = substitution_without_exception(&t);
    let v = audit(&covid19(), &broken);
    assert!(v.iter().any(|v| v.rule == Rule::SubstitutionGate), "{v:?}");
}

#[test]
fn detector_catches_substitution_under_neutral_profile() {
    let mut t = simulate_session(Arc::new(covid19()), &skeptic(), 3, ProfileChoice::OpenMinded).unwrap();
    t.header.ethical_profile = EthicalProfile::Neutral;
    let v = audit(&covid19(), &t);
    assert!(v.iter().any(|v| v.rule == Rule::SubstitutionGate), "{v:?}");
}

#[test]
fn detector_catches_gating_and_framing_faults() {
    let pack = covid19();
    let t = simulate_session(Arc::new(covid19()), &skeptic(), 3, ProfileChoice::Neutral).unwrap();
    assert!(audit(&pack, &t).is_empty());

    // inform where the user answered "medium"
    let mut m = t.clone();
    let answer = m.entries.iter_mut().find(|e| e.direction == Direction::User).unwrap();
    answer.choice.as_mut().unwrap().option = "roughly".into();
    assert!(audit(&pack, &m).iter().any(|v| v.rule == Rule::InformIffKnowledgeLow));

    // goodbye twice
    let mut m = t.clone();
    let bye = m.entries.last().unwrap().clone();
    let mut extra = bye.clone();
    extra.seq += 1;
    m.entries.push(extra);
    assert!(audit(&pack, &m).iter().any(|v| v.rule == Rule::GoodbyeLastAndUnique));

    // greeting missing
    let mut m = t.clone();
    m.entries.remove(0);
    for (i, e) in m.entries.iter_mut().enumerate() {
        e.seq = i as u64;
    }
    assert!(audit(&pack, &m).iter().any(|v| v.rule == Rule::GreetingFirst));

    // technique on a non-argument
    let mut m = t.clone();
    m.entries[0].act.as_mut().unwrap().technique = Some(persuade_core::dialogue::PersuasiveTechnique::Framing);
    assert!(audit(&pack, &m).iter().any(|v| v.rule == Rule::TechniqueOnArgumentsOnly));

    // argument swallowed after a low intention answer
    let mut m = t.clone();
    let arg = m
        .entries
        .iter()
        .position(|e| e.act.as_ref().is_some_and(|a| a.function == F::Argument))
        .unwrap();
    m.entries.remove(arg);
    for (i, e) in m.entries.iter_mut().enumerate() {
        e.seq = i as u64;
    }
    assert!(audit(&pack, &m).iter().any(|v| v.rule == Rule::ArgumentIffIntentionLow));
}
