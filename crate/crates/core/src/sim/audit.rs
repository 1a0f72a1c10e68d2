//! Transcript checker. It rebuilds the user model from the recorded answers
//! and the pack alone, without the engine, and checks every agent act
//! against it.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dialogue::{
    Attribute, CommunicativeFunction as F, EthicalProfile, Level, QuestionKind,
};
use crate::pack::{knowledge_follow_up, ContentPack};
use crate::session::{Direction, Transcript};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Sequence,
    GreetingFirst,
    GoodbyeLastAndUnique,
    InformIffKnowledgeLow,
    ReinforceIffKnowledgeMedium,
    ArgumentIffIntentionLow,
    ArgumentOncePerTopic,
    TechniqueOnArgumentsOnly,
    SubstitutionGate,
    ExceptionGate,
    OptionsIffQuestion,
    AnswerToPendingQuestion,
    Rendering,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Sequence => "sequence",
            Rule::GreetingFirst => "greeting_first",
            Rule::GoodbyeLastAndUnique => "goodbye_last_and_unique",
            Rule::InformIffKnowledgeLow => "inform_iff_knowledge_low",
            Rule::ReinforceIffKnowledgeMedium => "reinforce_iff_knowledge_medium",
            Rule::ArgumentIffIntentionLow => "argument_iff_intention_low",
            Rule::ArgumentOncePerTopic => "argument_once_per_topic",
            Rule::TechniqueOnArgumentsOnly => "technique_on_arguments_only",
            Rule::SubstitutionGate => "substitution_gate",
            Rule::ExceptionGate => "exception_gate",
            Rule::OptionsIffQuestion => "options_iff_question",
            Rule::AnswerToPendingQuestion => "answer_to_pending_question",
            Rule::Rendering => "rendering",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub seq: u64,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seq {}: {}: {}", self.seq, self.rule, self.detail)
    }
}

#[derive(Debug, Default)]
struct Topic {
    knowledge: Option<Level>,
    intention: Option<Level>,
    arguments: usize,
    informed_or_argued: bool,
    exception: bool,
    reassessed: Option<Level>,
    substituted: bool,
}

/// What the act following an answer has to be.
struct Expected {
    function: F,
    topic: String,
    rule: Rule,
    because: String,
}

pub fn audit(pack: &ContentPack, transcript: &Transcript) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut flag = |seq: u64, rule: Rule, detail: String| out.push(Violation { seq, rule, detail });
    let profile = transcript.header.ethical_profile;
    let mut topics: BTreeMap<String, Topic> = BTreeMap::new();
    let mut pending: Option<String> = None;
    let mut expected: Option<Expected> = None;
    let mut goodbyes = 0;
    let last_seq = transcript.entries.len().saturating_sub(1) as u64;

    match transcript.entries.first().and_then(|e| e.act.as_ref()) {
        Some(a) if a.function == F::GreetingSelfIntroduction => {}
        _ => flag(0, Rule::GreetingFirst, "transcript does not open with a greeting".into()),
    }

    for (i, entry) in transcript.entries.iter().enumerate() {
        let seq = entry.seq;
        if seq != i as u64 {
            flag(seq, Rule::Sequence, format!("expected seq {i}"));
        }
        match entry.direction {
            Direction::User => {
                let Some(choice) = &entry.choice else {
                    flag(seq, Rule::AnswerToPendingQuestion, "user entry without a choice".into());
                    continue;
                };
                if pending.as_deref() != Some(choice.question.as_str()) {
                    flag(
                        seq,
                        Rule::AnswerToPendingQuestion,
                        format!("answer to {} while {:?} was pending", choice.question, pending),
                    );
                }
                pending = None;
                let Some((scene, question)) = pack.question(&choice.question) else {
                    flag(seq, Rule::AnswerToPendingQuestion, format!("unknown question {}", choice.question));
                    continue;
                };
                let Some(option) = question.option(&choice.option) else {
                    flag(seq, Rule::AnswerToPendingQuestion, format!("unknown option {}", choice.option));
                    continue;
                };
                let topic_name = scene.topic.clone().unwrap_or_default();
                let topic = topics.entry(topic_name.clone()).or_default();
                for effect in &option.effects {
                    match effect.set {
                        Attribute::Knowledge => topic.knowledge = Some(effect.to),
                        Attribute::Intention => topic.intention = Some(effect.to),
                    }
                }
                let expect = |function: F, rule: Rule, because: String| Expected {
                    function,
                    topic: topic_name.clone(),
                    rule,
                    because,
                };
                expected = match question.kind {
                    QuestionKind::KnowledgeProbe => {
                        let level = topic.knowledge.unwrap_or(Level::Low);
                        let rule = match level {
                            Level::Medium => Rule::ReinforceIffKnowledgeMedium,
                            _ => Rule::InformIffKnowledgeLow,
                        };
                        Some(expect(knowledge_follow_up(level), rule, format!("knowledge {}", level.as_str())))
                    }
                    QuestionKind::IntentionProbe if topic.intention == Some(Level::Low) => Some(expect(
                        F::Argument,
                        Rule::ArgumentIffIntentionLow,
                        "intention low".into(),
                    )),
                    QuestionKind::IntentionProbe => None,
                    QuestionKind::RoleReassessment => {
                        let level = topic.intention.unwrap_or(Level::Low);
                        topic.reassessed = Some(level);
                        match (level, profile) {
                            (Level::Low, EthicalProfile::OpenMinded) => Some(expect(
                                F::Substitution,
                                Rule::SubstitutionGate,
                                "open-minded profile, low answer after the exception".into(),
                            )),
                            _ => None,
                        }
                    }
                };
            }
            Direction::Agent => {
                let Some(act) = &entry.act else {
                    flag(seq, Rule::Sequence, "agent entry without an act".into());
                    continue;
                };
                if pending.is_some() {
                    flag(seq, Rule::AnswerToPendingQuestion, "agent spoke over a pending question".into());
                }
                if let Some(exp) = expected.take() {
                    if act.function != exp.function || act.topic.as_deref() != Some(exp.topic.as_str()) {
                        flag(
                            seq,
                            exp.rule,
                            format!(
                                "{} on {} requires {}, got {}",
                                exp.because,
                                exp.topic,
                                exp.function.as_str(),
                                act.function.as_str()
                            ),
                        );
                    }
                }
                if act.function == F::GreetingSelfIntroduction && seq != 0 {
                    flag(seq, Rule::GreetingFirst, "greeting after the opening".into());
                }
                if act.function == F::Goodbye {
                    goodbyes += 1;
                    if seq != last_seq || goodbyes > 1 {
                        flag(seq, Rule::GoodbyeLastAndUnique, "goodbye is not the unique last entry".into());
                    }
                }
                let is_question = act.function == F::Question;
                if is_question != !act.options.is_empty() || is_question != act.question.is_some() {
                    flag(seq, Rule::OptionsIffQuestion, format!("{} with {} options", act.function, act.options.len()));
                }
                if is_question {
                    pending = act.question.clone();
                }
                match (act.function, act.technique) {
                    (F::Argument, Some(t)) if pack.techniques().contains(&t) => {}
                    (F::Argument, t) => flag(
                        seq,
                        Rule::TechniqueOnArgumentsOnly,
                        format!("argument with technique {t:?}"),
                    ),
                    (_, Some(t)) => flag(
                        seq,
                        Rule::TechniqueOnArgumentsOnly,
                        format!("{} carries technique {}", act.function, t.as_str()),
                    ),
                    (_, None) => {}
                }
                check_rendering(pack, act, seq, &mut flag);

                let Some(topic_name) = &act.topic else {
                    if matches!(act.function, F::Inform | F::Reinforce | F::Argument | F::Exception | F::Substitution) {
                        flag(seq, Rule::Rendering, format!("{} outside a topic", act.function));
                    }
                    continue;
                };
                let topic = topics.entry(topic_name.clone()).or_default();
                match act.function {
                    F::Inform if topic.knowledge != Some(Level::Low) => flag(
                        seq,
                        Rule::InformIffKnowledgeLow,
                        format!("inform on {topic_name} with knowledge {:?}", topic.knowledge),
                    ),
                    F::Reinforce if topic.knowledge != Some(Level::Medium) => flag(
                        seq,
                        Rule::ReinforceIffKnowledgeMedium,
                        format!("reinforce on {topic_name} with knowledge {:?}", topic.knowledge),
                    ),
                    F::Argument => {
                        topic.arguments += 1;
                        if topic.arguments > 1 {
                            flag(seq, Rule::ArgumentOncePerTopic, format!("second argument on {topic_name}"));
                        }
                        if topic.intention != Some(Level::Low) || topic.reassessed.is_some() {
                            flag(
                                seq,
                                Rule::ArgumentIffIntentionLow,
                                format!("argument on {topic_name} with intention {:?}", topic.intention),
                            );
                        }
                    }
                    F::Exception => {
                        let climax = pack.scene(&act.scene).is_some_and(|s| s.climax_capable);
                        if !climax || !topic.informed_or_argued || topic.exception {
                            flag(
                                seq,
                                Rule::ExceptionGate,
                                format!("exception on {topic_name} without a prior inform or argument"),
                            );
                        }
                        topic.exception = true;
                    }
                    F::Substitution => {
                        let ok = profile == EthicalProfile::OpenMinded
                            && topic.exception
                            && topic.reassessed == Some(Level::Low)
                            && !topic.substituted;
                        if !ok {
                            flag(
                                seq,
                                Rule::SubstitutionGate,
                                format!(
                                    "substitution on {topic_name}: profile {}, exception {}, reassessment {:?}",
                                    profile.as_str(),
                                    topic.exception,
                                    topic.reassessed
                                ),
                            );
                        }
                        topic.substituted = true;
                    }
                    _ => {}
                }
                if matches!(act.function, F::Inform | F::Argument) {
                    topic.informed_or_argued = true;
                }
            }
        }
    }
    if goodbyes == 0 {
        flag(last_seq, Rule::GoodbyeLastAndUnique, "no goodbye".into());
    }
    out
}

fn check_rendering(
    pack: &ContentPack,
    act: &crate::dialogue::DialogueAct,
    seq: u64,
    flag: &mut impl FnMut(u64, Rule, String),
) {
    let expected = match act.function {
        F::Question => act
            .question
            .as_deref()
            .and_then(|q| pack.question(q))
            .map(|(_, q)| q.prompt.as_str()),
        f => pack.render(f, &act.scene, act.technique).ok(),
    };
    if expected != Some(act.utterance.as_str()) {
        flag(seq, Rule::Rendering, format!("{} text does not match the pack", act.function));
    }
}
