//! The dialogue policy as kernel content.
//!
//! The pack's scenes, topics, questions and templates become chunks in
//! declarative memory. The information state is written into the goal buffer
//! as a `dialogue-goal` chunk, one slot per need plus the facts the rules test.
//! Selection rules fire in need-priority order and request the matching
//! utterance or question chunk; the `speak` and `ask` rules then emit an
//! `act` directive from what was retrieved.

use super::needs::{current_climax_step, farewell_pending};
use super::types::{InformationState, NeedKind};
use super::CommunicativeFunction;
use crate::kernel::{
    Action, BufferName, Chunk, Condition, KernelError, KernelState, Production, Term, Value,
};
use crate::pack::{
    question_chunk_id, scene_chunk_id, topic_chunk_id, utterance_chunk_id, ContentPack, SceneRole,
};

pub const GOAL_TYPE: &str = "dialogue-goal";
pub const UTTERANCE_TYPE: &str = "utterance";
pub const QUESTION_TYPE: &str = "question";

pub const DIRECTIVE_ACT: &str = "act";
pub const DIRECTIVE_CHOOSE_TECHNIQUE: &str = "choose-technique";

const NONE: &str = "none";

fn sym(s: &str) -> Value {
    Value::symbol(s)
}

fn flag(b: bool) -> Value {
    sym(if b { "yes" } else { "no" })
}

/// Loads the pack's content into declarative memory.
pub fn load_pack_chunks(kernel: &mut KernelState, pack: &ContentPack) -> Result<(), KernelError> {
    for scene in &pack.scenes {
        let role = match scene.role {
            SceneRole::Introduction => "introduction",
            SceneRole::Topic => "topic",
            SceneRole::Conclusion => "conclusion",
        };
        let scene_ref = Value::chunk(scene_chunk_id(&scene.id));
        kernel.add_chunk(Chunk::new(scene_chunk_id(&scene.id), "scene")?.with_slot("role", sym(role)))?;
        if let Some(t) = &scene.topic {
            kernel.add_chunk(Chunk::new(topic_chunk_id(t), "topic")?.with_slot("name", sym(t)))?;
        }
        for q in &scene.questions {
            kernel.add_chunk(
                Chunk::new(question_chunk_id(&q.id), QUESTION_TYPE)?
                    .with_slot("id", sym(&q.id))
                    .with_slot("kind", sym(q.kind.as_str()))
                    .with_slot("scene", scene_ref.clone())
                    .with_slot("prompt", sym(&q.prompt)),
            )?;
        }
        for t in &scene.templates {
            let technique = t.technique.map_or(NONE, |t| t.as_str());
            kernel.add_chunk(
                Chunk::new(utterance_chunk_id(&scene.id, t.function, t.technique), UTTERANCE_TYPE)?
                    .with_slot("function", sym(t.function.as_str()))
                    .with_slot("scene", scene_ref.clone())
                    .with_slot("technique", sym(technique))
                    .with_slot("text", sym(&t.text)),
            )?;
        }
    }
    Ok(())
}

/// Encodes the information state as the goal chunk.
pub fn encode_goal(state: &InformationState, pack: &ContentPack) -> Chunk {
    let scene = pack.scene(&state.current_scene);
    let role = match scene.map(|s| s.role) {
        Some(SceneRole::Introduction) => "introduction",
        Some(SceneRole::Topic) => "topic",
        Some(SceneRole::Conclusion) => "conclusion",
        None => NONE,
    };
    let topic = scene.and_then(|s| s.topic.as_deref());
    let ts = topic.and_then(|t| state.topic_states.get(t));

    let mut goal = Chunk::new(format!("goal:{}", state.history.len()), GOAL_TYPE)
        .expect("goal type is non-empty")
        .with_slot("scene", Value::chunk(scene_chunk_id(&state.current_scene)))
        .with_slot("topic", topic.map_or(sym(NONE), |t| Value::chunk(topic_chunk_id(t))))
        .with_slot("role", sym(role))
        .with_slot("step", sym("select"))
        .with_slot("technique", sym(NONE))
        .with_slot(
            "knowledge",
            sym(ts.map_or(NONE, |t| t.knowledge.as_str())),
        )
        .with_slot("knowledge_probed", flag(ts.is_some_and(|t| t.knowledge_probed)))
        .with_slot(
            "climax_step",
            sym(current_climax_step(state, pack).map_or(NONE, |c| c.as_str())),
        )
        .with_slot(
            "farewell",
            sym(if farewell_pending(state, pack) { "pending" } else { "done" }),
        );
    for kind in NeedKind::PRIORITY {
        let v = if state.need(kind).is_unsatisfied() { "unsatisfied" } else { "satisfied" };
        goal.set_slot(kind.as_str(), sym(v));
    }
    goal
}

fn goal() -> Condition {
    Condition::new(BufferName::Goal, GOAL_TYPE)
        .is_sym("step", "select")
        .bind("scene", "scene")
}

fn recall_utterance(function: CommunicativeFunction, technique: Option<Term>) -> Action {
    Action::Retrieve {
        chunk_type: UTTERANCE_TYPE.into(),
        slots: vec![
            ("function".into(), Term::sym(function.as_str())),
            ("scene".into(), Term::var("scene")),
            ("technique".into(), technique.unwrap_or(Term::sym(NONE))),
        ],
    }
}

fn recall_question(kind: &str) -> Action {
    Action::Retrieve {
        chunk_type: QUESTION_TYPE.into(),
        slots: vec![
            ("kind".into(), Term::sym(kind)),
            ("scene".into(), Term::var("scene")),
        ],
    }
}

fn next_step(step: &str, need: NeedKind) -> Action {
    Action::Modify {
        buffer: BufferName::Goal,
        slots: vec![
            ("step".into(), Term::sym(step)),
            ("need".into(), Term::sym(need.as_str())),
        ],
    }
}

fn unsatisfied(need: NeedKind) -> (&'static str, &'static str) {
    (need.as_str(), "unsatisfied")
}

/// The production set. Priorities follow the need order
/// social > competence > intentional assessment > argumentation > climax >
/// open-mindedness, with the farewell below all needs and the output rules
/// above everything.
pub fn productions() -> Vec<Production> {
    use CommunicativeFunction as F;
    use NeedKind as N;

    let with = |c: Condition, (slot, v): (&str, &str)| c.is_sym(slot, v);
    let mut rules = vec![
        Production::new("greet", 60)
            .when(with(goal(), unsatisfied(N::SocialAffiliation)))
            .then(recall_utterance(F::GreetingSelfIntroduction, None))
            .then(next_step("speak", N::SocialAffiliation)),
        Production::new("probe-knowledge", 50)
            .when(with(goal(), unsatisfied(N::Competence)).is_sym("knowledge_probed", "no"))
            .then(recall_question("knowledge_probe"))
            .then(next_step("ask", N::Competence)),
    ];
    for (name, level, function) in [
        ("inform", "low", F::Inform),
        ("reinforce", "medium", F::Reinforce),
        ("acknowledge-knowledge", "high", F::Acknowledge),
    ] {
        rules.push(
            Production::new(name, 49)
                .when(
                    with(goal(), unsatisfied(N::Competence))
                        .is_sym("knowledge_probed", "yes")
                        .is_sym("knowledge", level),
                )
                .then(recall_utterance(function, None))
                .then(next_step("speak", N::Competence)),
        );
    }
    rules.extend([
        Production::new("probe-intention", 40)
            .when(with(goal(), unsatisfied(N::IntentionalAssessment)))
            .then(recall_question("intention_probe"))
            .then(next_step("ask", N::IntentionalAssessment)),
        Production::new("pick-technique", 30)
            .when(with(goal(), unsatisfied(N::Argumentation)).is_sym("technique", NONE))
            .then(Action::Emit {
                directive: DIRECTIVE_CHOOSE_TECHNIQUE.into(),
                args: vec![],
            }),
        Production::new("argue", 30)
            .when(
                with(goal(), unsatisfied(N::Argumentation))
                    .is_not("technique", sym(NONE))
                    .bind("technique", "technique"),
            )
            .then(recall_utterance(F::Argument, Some(Term::var("technique"))))
            .then(next_step("speak", N::Argumentation)),
        Production::new("raise-exception", 20)
            .when(with(goal(), unsatisfied(N::Climax)).is_sym("climax_step", "exception"))
            .then(recall_utterance(F::Exception, None))
            .then(next_step("speak", N::Climax)),
        Production::new("reassess-in-role", 20)
            .when(with(goal(), unsatisfied(N::Climax)).is_sym("climax_step", "reassess"))
            .then(recall_question("role_reassessment"))
            .then(next_step("ask", N::Climax)),
        Production::new("close-climax", 20)
            .when(with(goal(), unsatisfied(N::Climax)).is_sym("climax_step", "close"))
            .then(recall_utterance(F::Acknowledge, None))
            .then(next_step("speak", N::Climax)),
        Production::new("substitute", 10)
            .when(with(goal(), unsatisfied(N::OpenMindedness)))
            .then(recall_utterance(F::Substitution, None))
            .then(next_step("speak", N::OpenMindedness)),
        Production::new("farewell", 5)
            .when(goal().is_sym("farewell", "pending"))
            .then(recall_utterance(F::Goodbye, None))
            .then(next_step("speak", N::SocialAffiliation)),
        Production::new("speak", 100)
            .when(
                Condition::new(BufferName::Goal, GOAL_TYPE)
                    .is_sym("step", "speak")
                    .bind("need", "need"),
            )
            .when(
                Condition::new(BufferName::Retrieval, UTTERANCE_TYPE)
                    .bind("function", "function")
                    .bind("technique", "technique")
                    .bind("text", "text"),
            )
            .then(Action::Write {
                buffer: BufferName::Vocal,
                chunk_type: "speech".into(),
                slots: vec![("text".into(), Term::var("text"))],
            })
            .then(Action::Emit {
                directive: DIRECTIVE_ACT.into(),
                args: vec![
                    ("function".into(), Term::var("function")),
                    ("technique".into(), Term::var("technique")),
                    ("need".into(), Term::var("need")),
                    ("text".into(), Term::var("text")),
                    ("question".into(), Term::sym(NONE)),
                ],
            })
            .then(Action::Modify {
                buffer: BufferName::Goal,
                slots: vec![("step".into(), Term::sym("done"))],
            }),
        Production::new("ask", 100)
            .when(
                Condition::new(BufferName::Goal, GOAL_TYPE)
                    .is_sym("step", "ask")
                    .bind("need", "need"),
            )
            .when(
                Condition::new(BufferName::Retrieval, QUESTION_TYPE)
                    .bind("id", "question")
                    .bind("prompt", "text"),
            )
            .then(Action::Write {
                buffer: BufferName::Vocal,
                chunk_type: "speech".into(),
                slots: vec![("text".into(), Term::var("text"))],
            })
            .then(Action::Emit {
                directive: DIRECTIVE_ACT.into(),
                args: vec![
                    ("function".into(), Term::sym(F::Question.as_str())),
                    ("technique".into(), Term::sym(NONE)),
                    ("need".into(), Term::var("need")),
                    ("text".into(), Term::var("text")),
                    ("question".into(), Term::var("question")),
                ],
            })
            .then(Action::Modify {
                buffer: BufferName::Goal,
                slots: vec![("step".into(), Term::sym("done"))],
            }),
    ]);
    rules
}
