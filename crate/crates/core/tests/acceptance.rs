//! Acceptance criteria, one line of output per criterion.
//!
//! Run with `cargo test -p persuade-core --test acceptance`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant, SystemTime};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use persuade_core::dialogue::{
    init_state, CommunicativeFunction as F, EthicalProfile, PersuasiveTechnique, ProfileChoice,
    QuestionKind,
};
use persuade_core::kernel::{
    ActivationParams, Chunk, ChunkId, DeclarativeMemory, KernelRng, RetrievalRequest, Value,
};
use persuade_core::pack::{covid19, load_pack, validate, ContentPack, PackError};
use persuade_core::session::{replay, Session, SessionSpec, Transcript, TranscriptWriter};
use persuade_core::sim::{builtin_mix, run_batch, simulate_session, skeptic};

const GOLDEN_SEED: u64 = 4;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_transcript() -> Outcome {
    let pack = Arc::new(covid19());
    let started = Instant::now();
    let t = simulate_session(pack, &skeptic(), GOLDEN_SEED, ProfileChoice::OpenMinded)
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let mask: Vec<_> = t.acts().filter(|a| a.topic.as_deref() == Some("mask")).collect();
    let want: [(F, Option<&str>); 4] = [
        (
            F::Argument,
            Some("If you do not use the mask, the risk of infection increases by 80% compared to those who use the mask and, in addition, you may infect your family and friends with dramatic consequences"),
        ),
        (
            F::Exception,
            Some("Indeed there are cases in which it might be a problem to comply with these measures. For example, imagine you as a person who is allergic to mask material"),
        ),
        (F::Question, None),
        (
            F::Substitution,
            Some("Consider the fact that in case of a mask allergy you can decrease the possibility of contagion by following the other two virtuous rules, which are keeping your distance and washing often your hands."),
        ),
    ];
    let mut from = 0;
    for (function, text) in want {
        let found = mask[from..].iter().position(|a| {
            a.function == function
                && text.is_none_or(|t| a.utterance == t)
                && (function != F::Question || a.question_kind == Some(QuestionKind::RoleReassessment))
        });
        let i = found.ok_or_else(|| format!("no {function} after position {from} on mask"))?;
        from += i + 1;
    }
    let technique = mask.iter().find(|a| a.function == F::Argument).and_then(|a| a.technique);
    check(technique == Some(PersuasiveTechnique::Framing), || {
        format!("seed {GOLDEN_SEED} argued with {technique:?}")
    })?;
    check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("seed {GOLDEN_SEED}, {:?}", elapsed))
}

/// Independent summation: base plus the spread from every chunk-valued goal
/// slot, each source getting an equal share of the total weight.
fn oracle_activation(
    base: f64,
    target: &str,
    goal_sources: &[String],
    assoc: &BTreeMap<(String, String), f64>,
    total: f64,
) -> f64 {
    let mut a = base;
    if goal_sources.is_empty() {
        return a;
    }
    let w = total / goal_sources.len() as f64;
    for s in goal_sources {
        a += w * assoc.get(&(s.clone(), target.to_string())).copied().unwrap_or(0.0);
    }
    a
}

fn activation_oracle() -> Outcome {
    let mut gen = ChaCha8Rng::seed_from_u64(0xac2);
    let mut agree = 0;
    for case in 0..100 {
        let n_chunks = gen.random_range(1..=10);
        let n_sources = gen.random_range(0..=4);
        let total = gen.random_range(0.0..3.0);
        let mut params = ActivationParams::new(total, 0.0).map_err(|e| e.to_string())?;
        let sources: Vec<String> = (0..n_sources).map(|j| format!("src{j}")).collect();
        let mut memory = DeclarativeMemory::new();
        let mut chunks = Vec::new();
        for i in 0..n_chunks {
            let base = gen.random_range(-2.0..2.0);
            let kind = if gen.random_bool(0.7) { "target" } else { "other" };
            let id = format!("c{i}");
            memory
                .add(
                    Chunk::new(id.as_str(), "item")
                        .and_then(|c| c.with_base_activation(base))
                        .map_err(|e| e.to_string())?
                        .with_slot("kind", Value::symbol(kind)),
                )
                .map_err(|e| e.to_string())?;
            chunks.push((id, base, kind));
        }
        let mut assoc = BTreeMap::new();
        for s in &sources {
            for (id, _, _) in &chunks {
                if gen.random_bool(0.6) {
                    let strength = gen.random_range(-1.0..3.0);
                    params
                        .set_association(ChunkId::new(s.as_str()), ChunkId::new(id.as_str()), strength)
                        .map_err(|e| e.to_string())?;
                    assoc.insert((s.clone(), id.clone()), strength);
                }
            }
        }
        let mut goal = Chunk::new("goal", "goal").map_err(|e| e.to_string())?;
        for (j, s) in sources.iter().enumerate() {
            goal.set_slot(format!("slot{j}"), Value::chunk(s.as_str()));
        }
        goal.set_slot("mode", Value::symbol("search"));

        let request = RetrievalRequest::new("item").with("kind", Value::symbol("target"));
        let got = memory.retrieve(&request, Some(&goal), &params, &mut KernelRng::seed_from_u64(case));

        // argmax by brute force; later chunks win ties
        let mut best: Option<(&str, f64)> = None;
        for (id, base, kind) in &chunks {
            if *kind != "target" {
                continue;
            }
            let a = oracle_activation(*base, id, &sources, &assoc, total);
            if best.is_none_or(|(_, b)| a >= b) {
                best = Some((id, a));
            }
        }
        match (best, got) {
            (None, Err(_)) => agree += 1,
            (Some((id, a)), Ok(r)) => {
                if r.chunk.id().as_str() != id {
                    return Err(format!("case {case}: kernel chose {}, oracle {id}", r.chunk.id()));
                }
                if (r.activation - a).abs() > 1e-9 {
                    return Err(format!("case {case}: activation {} vs oracle {a}", r.activation));
                }
                agree += 1;
            }
            (b, g) => return Err(format!("case {case}: oracle {b:?}, kernel {g:?}")),
        }
    }
    check(agree == 100, || format!("{agree}/100"))?;
    Ok(format!("{agree}/100 cases agree"))
}

fn act_gating() -> Outcome {
    let started = Instant::now();
    let mix = builtin_mix("mixed").ok_or("no mixed profile")?;
    let report = run_batch(Arc::new(covid19()), &mix, 1000, 0x5eed_0003, ProfileChoice::Random)
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    check(report.runs == 1000, || format!("{} runs", report.runs))?;
    check(report.violations == 0, || {
        format!("{} violations: {:?}", report.violations, report.violation_samples)
    })?;
    check(report.substitutions > 0 && report.arguments > 0 && report.exceptions > 0, || {
        "mix did not exercise every gated act".into()
    })?;
    check(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "1000 sessions, 0 violations, {} arguments, {} substitutions, {:?}",
        report.arguments, report.substitutions, elapsed
    ))
}

fn technique_uniformity() -> Outcome {
    let mix = builtin_mix("skeptic").ok_or("no skeptic profile")?;
    let report = run_batch(Arc::new(covid19()), &mix, 1000, 0x5eed_0004, ProfileChoice::Random)
        .map_err(|e| e.to_string())?;
    check(report.arguments == 3000, || format!("{} argument events", report.arguments))?;
    let mut shares = Vec::new();
    for t in PersuasiveTechnique::ALL {
        let share = report.technique_share(t);
        check((share - 1.0 / 3.0).abs() <= 0.03, || format!("{} at {share:.4}", t.as_str()))?;
        shares.push(format!("{} {share:.3}", t.as_str()));
    }
    Ok(format!("3000 arguments: {}", shares.join(", ")))
}

fn profile_randomization() -> Outcome {
    let pack = covid19();
    let mut open = 0;
    for seed in 0..10_000u64 {
        let s = init_state(&pack, ProfileChoice::Random, &mut KernelRng::seed_from_u64(seed));
        if s.ethical_profile == EthicalProfile::OpenMinded {
            open += 1;
        }
    }
    let share = open as f64 / 10_000.0;
    check((share - 0.5).abs() <= 0.02, || format!("open-minded share {share}"))?;
    for (choice, want) in [
        (ProfileChoice::OpenMinded, EthicalProfile::OpenMinded),
        (ProfileChoice::Neutral, EthicalProfile::Neutral),
    ] {
        for seed in 0..10_000u64 {
            let s = init_state(&pack, choice, &mut KernelRng::seed_from_u64(seed));
            check(s.ethical_profile == want, || format!("{choice:?} gave {:?} at seed {seed}", s.ethical_profile))?;
        }
    }
    Ok(format!("open-minded share {share:.4}; forced choices 100%"))
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("persuade-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn persisted_session(
    pack: &Arc<ContentPack>,
    dir: &Path,
    name: &str,
    seed: u64,
    profile: ProfileChoice,
    choices: &[&str],
) -> Result<PathBuf, String> {
    let spec = SessionSpec {
        id: name.to_string(),
        seed,
        profile,
        created_at: SystemTime::now(),
    };
    let (mut s, _) = Session::start(pack.clone(), spec).map_err(|e| e.to_string())?;
    let path = dir.join(format!("{name}.jsonl"));
    s.attach_writer(TranscriptWriter::create(&path).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    for c in choices {
        s.submit_choice(c).map_err(|e| e.to_string())?;
        s.persist().map_err(|e| e.to_string())?;
    }
    Ok(path)
}


fn determinism_and_replay() -> Outcome {
    let pack = Arc::new(covid19());
    let dir = scratch_dir();
    let choices = ["unsure", "no-idea", "no", "cannot", "some-distance", "no", "partly", "undecided"];
    let mut replayed = 0;
    for seed in [0u64, 4, 17, u64::MAX] {
        for profile in [ProfileChoice::OpenMinded, ProfileChoice::Neutral, ProfileChoice::Random] {
            let a = persisted_session(&pack, &dir, &format!("a-{seed}-{profile:?}"), seed, profile, &choices)?;
            let b = persisted_session(&pack, &dir, &format!("b-{seed}-{profile:?}"), seed, profile, &choices)?;
            let (ba, bb) = (std::fs::read(&a).map_err(|e| e.to_string())?, std::fs::read(&b).map_err(|e| e.to_string())?);
            check(ba == bb, || format!("seed {seed} {profile:?}: transcripts differ"))?;
            let t = Transcript::load(&a).map_err(|e| e.to_string())?;
            replay(pack.clone(), &t).map_err(|e| format!("seed {seed}: {e}"))?;
            replayed += 1;
        }
    }
    // simulated sessions from every built-in mix replay too
    let mix = builtin_mix("mixed").ok_or("no mixed profile")?;
    for seed in 0..50u64 {
        let profile = &mix.profiles[seed as usize % mix.profiles.len()].profile;
        let t = simulate_session(pack.clone(), profile, seed, ProfileChoice::Random).map_err(|e| e.to_string())?;
        let parsed = Transcript::parse_jsonl(&t.to_jsonl()).map_err(|e| e.to_string())?;
        replay(pack.clone(), &parsed).map_err(|e| format!("sim seed {seed}: {e}"))?;
        replayed += 1;
    }
    // a different seed shows up in the transcript
    let x = simulate_session(pack.clone(), &skeptic(), 1, ProfileChoice::Random).map_err(|e| e.to_string())?;
    let y = simulate_session(pack.clone(), &skeptic(), 2, ProfileChoice::Random).map_err(|e| e.to_string())?;
    check(x.to_jsonl() != y.to_jsonl(), || "seeds 1 and 2 gave identical transcripts".into())?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("byte-identical reruns; {replayed} transcripts replayed with matching digests"))
}

fn pack_validation() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/broken");
    let manifest: Vec<serde_json::Value> = serde_json::from_str(
        &std::fs::read_to_string(dir.join("expected.json")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    check(manifest.len() >= 10, || format!("only {} broken packs", manifest.len()))?;
    for case in &manifest {
        let file = case["file"].as_str().ok_or("file")?;
        let path = case["path"].as_str().ok_or("path")?;
        let message = case["message"].as_str().ok_or("message")?;
        let doc = std::fs::read_to_string(dir.join(file)).map_err(|e| e.to_string())?;
        match load_pack(&doc) {
            Err(PackError::Invalid(diags)) => check(
                diags.iter().any(|d| d.path == path && d.message == message),
                || format!("{file}: no diagnostic `{path}: {message}` in {diags:?}"),
            )?,
            Err(e) => return Err(format!("{file}: rejected for the wrong reason: {e}")),
            Ok(_) => return Err(format!("{file}: accepted")),
        }
    }
    let shipped = validate(&covid19());
    check(shipped.is_empty(), || format!("shipped pack: {shipped:?}"))?;
    Ok(format!("{} broken packs rejected at the expected path; shipped pack clean", manifest.len()))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("AC1", "golden transcript", golden_transcript),
        ("AC2", "activation oracle equivalence", activation_oracle),
        ("AC3", "act gating over 1000 sessions", act_gating),
        ("AC4", "technique uniformity", technique_uniformity),
        ("AC5", "profile randomization", profile_randomization),
        ("AC6", "determinism and replay", determinism_and_replay),
        ("AC7", "pack validation", pack_validation),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {id} {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id} {name}: {why}");
            }
        }
    }
    println!("SKIP AC8 browser round-trip: needs a browser driver and a live server");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
