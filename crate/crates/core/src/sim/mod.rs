//! Scripted users, batch runs and the transcript auditor.

mod audit;
mod profile;
mod report;

use std::sync::Arc;
use std::thread;
use std::time::SystemTime;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dialogue::ProfileChoice;
use crate::pack::ContentPack;
use crate::session::{Session, SessionError, SessionSpec, Transcript};

pub use audit::{audit, Rule, Violation};
pub use profile::{
    builtin_mix, compliant, skeptic, AnswerRule, Choose, MixEntry, ProfileMix, UserProfile,
    ANY_TOPIC, BUILTIN_MIXES,
};
pub use report::{BatchReport, LevelHistogram, TopicOutcome};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("profile {profile} has no rule for question {question}")]
    NoRule { profile: String, question: String },
    #[error("profile {profile}: question {question} has no option for {wanted}")]
    NoOption {
        profile: String,
        question: String,
        wanted: String,
    },
    #[error("profile {profile}: answer weights must be non-negative with a positive sum")]
    BadWeights { profile: String },
    #[error("profile file: {0}")]
    Profiles(String),
    #[error("session failed: {0}")]
    Session(#[from] SessionError),
    #[error("session did not finish within {0} answers")]
    Runaway(usize),
}

/// Answers per session before the harness gives up.
const MAX_ANSWERS: usize = 1000;

/// Stream of the scripted user's draws, kept apart from the session's own.
const USER_STREAM: u64 = 1;
/// Stream used to pick a profile from a mix.
const MIX_STREAM: u64 = 2;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs one complete session against a scripted user.
pub fn simulate_session(
    pack: Arc<ContentPack>,
    profile: &UserProfile,
    seed: u64,
    ethical: ProfileChoice,
) -> Result<Transcript, SimError> {
    Ok(run_session(pack, profile, seed, ethical)?.transcript())
}

fn run_session(
    pack: Arc<ContentPack>,
    profile: &UserProfile,
    seed: u64,
    ethical: ProfileChoice,
) -> Result<Session, SimError> {
    let spec = SessionSpec {
        id: format!("sim-{seed}"),
        seed,
        profile: ethical,
        created_at: SystemTime::UNIX_EPOCH,
    };
    let (mut session, _) = Session::start(pack.clone(), spec)?;
    let mut rng = stream_rng(seed, USER_STREAM);
    for _ in 0..MAX_ANSWERS {
        let Some(question_id) = session.pending_question() else {
            return Ok(session);
        };
        let (scene, question) = pack
            .question(question_id)
            .expect("engine only asks questions from its pack");
        let topic = scene.topic.as_deref().unwrap_or_default();
        let option = profile.answer(topic, question, &mut rng)?;
        session.submit_choice(&option)?;
    }
    Err(SimError::Runaway(MAX_ANSWERS))
}

/// Runs `n` sessions with seeds `seed_base`, `seed_base + 1`, ... Each run
/// picks its user from `mix` with a draw derived from its own seed, so the
/// report does not depend on how runs are spread over threads.
pub fn run_batch(
    pack: Arc<ContentPack>,
    mix: &ProfileMix,
    n: u64,
    seed_base: u64,
    ethical: ProfileChoice,
) -> Result<BatchReport, SimError> {
    mix.check()?;
    mix.check_against(&pack)?;
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(16) as u64;
    if workers <= 1 {
        return run_range(pack, mix, 0..n, seed_base, ethical);
    }
    let per = n.div_ceil(workers).max(1);
    let parts: Vec<Result<BatchReport, SimError>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..n)
            .step_by(per as usize)
            .map(|start| {
                let end = (start + per).min(n);
                let pack = pack.clone();
                scope.spawn(move || run_range(pack, mix, start..end, seed_base, ethical))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("batch worker panicked"))
            .collect()
    });
    let mut report = BatchReport::default();
    for part in parts {
        report.merge(&part?);
    }
    Ok(report)
}

fn run_range(
    pack: Arc<ContentPack>,
    mix: &ProfileMix,
    range: std::ops::Range<u64>,
    seed_base: u64,
    ethical: ProfileChoice,
) -> Result<BatchReport, SimError> {
    let mut report = BatchReport::default();
    for i in range {
        let seed = seed_base.wrapping_add(i);
        let profile = mix.pick(&mut stream_rng(seed, MIX_STREAM));
        let session = run_session(pack.clone(), profile, seed, ethical)?;
        let transcript = session.transcript();
        let violations = audit(&pack, &transcript);
        let finals = session
            .state()
            .topic_states
            .iter()
            .map(|(t, ts)| (t.clone(), ts.knowledge, ts.intention));
        report.record(&profile.id, &transcript, finals, &violations);
    }
    Ok(report)
}
