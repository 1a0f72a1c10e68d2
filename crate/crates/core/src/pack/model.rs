use serde::{Deserialize, Serialize};

use crate::dialogue::{Attribute, CommunicativeFunction, Level, PersuasiveTechnique, QuestionKind};

/// A domain script: scenes, questions, answer effects and utterance templates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContentPack {
    pub pack: PackMeta,
    #[serde(default)]
    pub kernel: KernelConfig,
    pub scenes: Vec<SceneSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackMeta {
    pub id: String,
    pub version: String,
    #[serde(default = "default_language")]
    pub language: String,
    #[serde(default = "all_techniques")]
    pub techniques: Vec<PersuasiveTechnique>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

fn default_language() -> String {
    "en".to_string()
}

fn all_techniques() -> Vec<PersuasiveTechnique> {
    PersuasiveTechnique::ALL.to_vec()
}

/// Activation parameters forwarded to the kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    #[serde(default = "one")]
    pub source_weight_total: f64,
    #[serde(default)]
    pub noise_scale: f64,
    /// Absent means no threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retrieval_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub associations: Vec<AssociationSpec>,
}

fn one() -> f64 {
    1.0
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            source_weight_total: 1.0,
            noise_scale: 0.0,
            retrieval_threshold: None,
            associations: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssociationSpec {
    pub source: String,
    pub target: String,
    pub strength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneRole {
    Introduction,
    Topic,
    Conclusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub id: String,
    pub role: SceneRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
    #[serde(default)]
    pub climax_capable: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub questions: Vec<QuestionSpec>,
    #[serde(default)]
    pub templates: Vec<TemplateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exception: Option<ExceptionSpec>,
}

impl SceneSpec {
    pub fn question(&self, kind: QuestionKind) -> Option<&QuestionSpec> {
        self.questions.iter().find(|q| q.kind == kind)
    }

    pub fn template(
        &self,
        function: CommunicativeFunction,
        technique: Option<PersuasiveTechnique>,
    ) -> Option<&TemplateSpec> {
        self.templates
            .iter()
            .find(|t| t.function == function && t.technique == technique)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionSpec {
    pub id: String,
    pub kind: QuestionKind,
    pub prompt: String,
    pub options: Vec<AnswerOption>,
}

impl QuestionSpec {
    pub fn option(&self, id: &str) -> Option<&AnswerOption> {
        self.options.iter().find(|o| o.id == id)
    }

    /// Levels of this question's own attribute that some option sets.
    pub fn reachable_levels(&self) -> Vec<Level> {
        let attr = self.kind.attribute();
        Level::ALL
            .into_iter()
            .filter(|l| {
                self.options
                    .iter()
                    .any(|o| o.effects.iter().any(|e| e.set == attr && e.to == *l))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerOption {
    pub id: String,
    pub label: String,
    pub effects: Vec<EffectSpec>,
}

/// `{"set": "knowledge", "to": "high"}`. `topic`, when given, must name the
/// enclosing scene's topic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectSpec {
    pub set: Attribute,
    pub to: Level,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
}

/// Where a template's text came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateOrigin {
    /// Quoted from the source dialogue.
    Verbatim,
    /// Reworded from source material.
    Adapted,
    #[default]
    Authored,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateSpec {
    pub function: CommunicativeFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub technique: Option<PersuasiveTechnique>,
    pub text: String,
    #[serde(default)]
    pub origin: TemplateOrigin,
}

/// The narrative condition introduced by an exception act, and the role it
/// assigns to the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExceptionSpec {
    pub condition: String,
    pub role: String,
}
