use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Three-step ordinal used for both knowledge and intention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Low,
    Medium,
    High,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Low, Level::Medium, Level::High];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Low => "low",
            Level::Medium => "medium",
            Level::High => "high",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommunicativeFunction {
    GreetingSelfIntroduction,
    Question,
    Inform,
    Reinforce,
    Argument,
    Exception,
    Substitution,
    Acknowledge,
    Goodbye,
}

impl CommunicativeFunction {
    pub const ALL: [CommunicativeFunction; 9] = [
        CommunicativeFunction::GreetingSelfIntroduction,
        CommunicativeFunction::Question,
        CommunicativeFunction::Inform,
        CommunicativeFunction::Reinforce,
        CommunicativeFunction::Argument,
        CommunicativeFunction::Exception,
        CommunicativeFunction::Substitution,
        CommunicativeFunction::Acknowledge,
        CommunicativeFunction::Goodbye,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CommunicativeFunction::GreetingSelfIntroduction => "greeting_self_introduction",
            CommunicativeFunction::Question => "question",
            CommunicativeFunction::Inform => "inform",
            CommunicativeFunction::Reinforce => "reinforce",
            CommunicativeFunction::Argument => "argument",
            CommunicativeFunction::Exception => "exception",
            CommunicativeFunction::Substitution => "substitution",
            CommunicativeFunction::Acknowledge => "acknowledge",
            CommunicativeFunction::Goodbye => "goodbye",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.as_str() == s)
    }
}

impl fmt::Display for CommunicativeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PersuasiveTechnique {
    /// Appeal to what most people think.
    AdPopulum,
    /// Appeal to authority.
    AdVerecundiam,
    /// Loss/gain presentation of the same facts.
    Framing,
}

impl PersuasiveTechnique {
    pub const ALL: [PersuasiveTechnique; 3] = [
        PersuasiveTechnique::AdPopulum,
        PersuasiveTechnique::AdVerecundiam,
        PersuasiveTechnique::Framing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PersuasiveTechnique::AdPopulum => "ad_populum",
            PersuasiveTechnique::AdVerecundiam => "ad_verecundiam",
            PersuasiveTechnique::Framing => "framing",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for PersuasiveTechnique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionKind {
    KnowledgeProbe,
    IntentionProbe,
    RoleReassessment,
}

impl QuestionKind {
    pub const ALL: [QuestionKind; 3] = [
        QuestionKind::KnowledgeProbe,
        QuestionKind::IntentionProbe,
        QuestionKind::RoleReassessment,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QuestionKind::KnowledgeProbe => "knowledge_probe",
            QuestionKind::IntentionProbe => "intention_probe",
            QuestionKind::RoleReassessment => "role_reassessment",
        }
    }

    /// The topic attribute this kind of question measures.
    pub fn attribute(self) -> Attribute {
        match self {
            QuestionKind::KnowledgeProbe => Attribute::Knowledge,
            QuestionKind::IntentionProbe | QuestionKind::RoleReassessment => Attribute::Intention,
        }
    }
}

impl fmt::Display for QuestionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    Knowledge,
    Intention,
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Attribute::Knowledge => "knowledge",
            Attribute::Intention => "intention",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeedKind {
    SocialAffiliation,
    Competence,
    IntentionalAssessment,
    Argumentation,
    Climax,
    OpenMindedness,
}

impl NeedKind {
    /// Highest priority first.
    pub const PRIORITY: [NeedKind; 6] = [
        NeedKind::SocialAffiliation,
        NeedKind::Competence,
        NeedKind::IntentionalAssessment,
        NeedKind::Argumentation,
        NeedKind::Climax,
        NeedKind::OpenMindedness,
    ];

    pub fn category(self) -> NeedCategory {
        match self {
            NeedKind::SocialAffiliation => NeedCategory::Social,
            NeedKind::Competence | NeedKind::IntentionalAssessment => NeedCategory::Cognitive,
            NeedKind::Argumentation => NeedCategory::Argumentative,
            NeedKind::Climax => NeedCategory::Narrative,
            NeedKind::OpenMindedness => NeedCategory::Ethical,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NeedKind::SocialAffiliation => "social_affiliation",
            NeedKind::Competence => "competence",
            NeedKind::IntentionalAssessment => "intentional_assessment",
            NeedKind::Argumentation => "argumentation",
            NeedKind::Climax => "climax",
            NeedKind::OpenMindedness => "open_mindedness",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::PRIORITY.into_iter().find(|n| n.as_str() == s)
    }
}

impl fmt::Display for NeedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeedCategory {
    Social,
    Cognitive,
    Argumentative,
    Narrative,
    Ethical,
}

/// A motivational variable. Unsatisfied while `current < expected`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Need {
    pub kind: NeedKind,
    pub category: NeedCategory,
    pub current_value: f64,
    pub expected_value: f64,
}

impl Need {
    pub fn new(kind: NeedKind, satisfied: bool) -> Self {
        Self {
            kind,
            category: kind.category(),
            current_value: if satisfied { 1.0 } else { 0.0 },
            expected_value: 1.0,
        }
    }

    pub fn is_unsatisfied(&self) -> bool {
        self.current_value < self.expected_value
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EthicalProfile {
    OpenMinded,
    Neutral,
}

impl EthicalProfile {
    pub fn as_str(self) -> &'static str {
        match self {
            EthicalProfile::OpenMinded => "open_minded",
            EthicalProfile::Neutral => "neutral",
        }
    }
}

impl fmt::Display for EthicalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the ethical profile is picked at session start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileChoice {
    OpenMinded,
    Neutral,
    Random,
}

impl ProfileChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileChoice::OpenMinded => "open_minded",
            ProfileChoice::Neutral => "neutral",
            ProfileChoice::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "open_minded" => Some(ProfileChoice::OpenMinded),
            "neutral" => Some(ProfileChoice::Neutral),
            "random" => Some(ProfileChoice::Random),
            _ => None,
        }
    }
}

impl fmt::Display for ProfileChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-topic user model and the agent's progress through the topic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicState {
    pub topic: String,
    pub knowledge: Level,
    pub intention: Level,
    pub knowledge_probed: bool,
    pub intention_probed: bool,
    /// The inform / reinforce / acknowledge follow-up to the knowledge answer was given.
    pub knowledge_addressed: bool,
    pub informed: bool,
    pub argued: bool,
    pub exception_issued: bool,
    pub reassessed: bool,
    pub post_exception_intention: Option<Level>,
    pub climax_closed: bool,
    pub substitution_issued: bool,
}

impl TopicState {
    pub fn new(topic: &str) -> Self {
        Self {
            topic: topic.to_string(),
            knowledge: Level::Low,
            intention: Level::Low,
            knowledge_probed: false,
            intention_probed: false,
            knowledge_addressed: false,
            informed: false,
            argued: false,
            exception_issued: false,
            reassessed: false,
            post_exception_intention: None,
            climax_closed: false,
            substitution_issued: false,
        }
    }
}

/// An agent dialogue act: a communicative function with its rendered
/// utterance and, for questions, the answer options.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogueAct {
    pub function: CommunicativeFunction,
    pub scene: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub technique: Option<PersuasiveTechnique>,
    pub utterance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question_kind: Option<QuestionKind>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<OptionView>,
    pub fulfils: NeedKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionView {
    pub id: String,
    pub label: String,
}

/// An effect applied to a topic by a user answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedEffect {
    pub attribute: Attribute,
    pub level: Level,
}

/// A user answer as it appears in the history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceRecord {
    pub question: String,
    pub kind: QuestionKind,
    pub topic: String,
    pub option: String,
    pub effects: Vec<AppliedEffect>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "direction", rename_all = "snake_case")]
pub enum HistoryRecord {
    Agent(DialogueAct),
    User(ChoiceRecord),
}

/// The dialogue manager's record of the user model, needs and scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InformationState {
    pub topic_states: BTreeMap<String, TopicState>,
    pub needs: BTreeMap<NeedKind, Need>,
    pub current_scene: String,
    pub previous_scene: Option<String>,
    pub ethical_profile: EthicalProfile,
    pub active_role: Option<String>,
    pub history: Vec<HistoryRecord>,
    pub greeted: bool,
    pub farewell_given: bool,
    pub pending_question: Option<String>,
}

impl InformationState {
    pub fn need(&self, kind: NeedKind) -> Need {
        self.needs.get(&kind).copied().unwrap_or(Need::new(kind, true))
    }

    pub fn unsatisfied(&self) -> Vec<NeedKind> {
        NeedKind::PRIORITY
            .into_iter()
            .filter(|k| self.need(*k).is_unsatisfied())
            .collect()
    }

    pub fn acts(&self) -> impl Iterator<Item = &DialogueAct> {
        self.history.iter().filter_map(|r| match r {
            HistoryRecord::Agent(a) => Some(a),
            HistoryRecord::User(_) => None,
        })
    }

    pub fn last_act(&self) -> Option<&DialogueAct> {
        self.history.iter().rev().find_map(|r| match r {
            HistoryRecord::Agent(a) => Some(a),
            HistoryRecord::User(_) => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn need_categories_follow_the_fixed_table() {
        use NeedCategory::*;
        let expected = [
            (NeedKind::SocialAffiliation, Social),
            (NeedKind::Competence, Cognitive),
            (NeedKind::IntentionalAssessment, Cognitive),
            (NeedKind::Argumentation, Argumentative),
            (NeedKind::Climax, Narrative),
            (NeedKind::OpenMindedness, Ethical),
        ];
        for (kind, cat) in expected {
            assert_eq!(kind.category(), cat);
            assert_eq!(Need::new(kind, false).category, cat);
        }
    }

    #[test]
    fn unsatisfied_iff_current_below_expected() {
        let mut n = Need::new(NeedKind::Climax, false);
        assert!(n.is_unsatisfied());
        n.current_value = 1.0;
        assert!(!n.is_unsatisfied());
        n.expected_value = 0.5;
        n.current_value = 0.4;
        assert!(n.is_unsatisfied());
    }

    #[test]
    fn names_round_trip_through_serde() {
        for f in CommunicativeFunction::ALL {
            let json = serde_json::to_string(&f).unwrap();
            assert_eq!(json, format!("\"{}\"", f.as_str()));
            assert_eq!(CommunicativeFunction::parse(f.as_str()), Some(f));
        }
        for t in PersuasiveTechnique::ALL {
            assert_eq!(serde_json::to_string(&t).unwrap(), format!("\"{t}\""));
        }
        for n in NeedKind::PRIORITY {
            assert_eq!(serde_json::to_string(&n).unwrap(), format!("\"{n}\""));
        }
    }
}
