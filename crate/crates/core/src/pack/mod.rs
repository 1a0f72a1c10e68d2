//! Content packs: the external domain script consumed by the dialogue engine.
//!
//! A pack is one JSON document with three top-level keys:
//!
//! * `pack`: id, version, language and the enabled persuasive techniques;
//! * `kernel`: activation parameters and association strengths;
//! * `scenes`: the ordered scene program, Introduction first and Conclusion last.
//!
//! [`load_pack`] parses and fully validates a document; a pack it accepts can
//! render every act the dialogue policy is able to request.

mod model;
mod validate;

use thiserror::Error;

pub use model::{
    AnswerOption, AssociationSpec, ContentPack, EffectSpec, ExceptionSpec, KernelConfig, PackMeta,
    QuestionSpec, SceneRole, SceneSpec, TemplateOrigin, TemplateSpec,
};
pub use validate::{validate, Diagnostic};

use crate::dialogue::{CommunicativeFunction, Level, PersuasiveTechnique, QuestionKind};
use crate::kernel::{ActivationParams, ChunkId, KernelError};

/// The COVID-19 prevention pack shipped with the engine.
pub const COVID19_PACK: &str = include_str!("../../packs/covid19.json");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PackError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid pack:\n{}", format_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("scene {scene}: no {function} template{}", technique.map(|t| format!(" for {t}")).unwrap_or_default())]
    MissingTemplate {
        scene: String,
        function: CommunicativeFunction,
        technique: Option<PersuasiveTechnique>,
    },
    #[error("unknown scene {0}")]
    UnknownScene(String),
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("  {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parses and validates a pack document.
pub fn load_pack(document: &str) -> Result<ContentPack, PackError> {
    if document.trim().is_empty() {
        return Err(PackError::Parse("empty document".into()));
    }
    let pack: ContentPack =
        serde_json::from_str(document).map_err(|e| PackError::Parse(e.to_string()))?;
    let diagnostics = validate(&pack);
    if !diagnostics.is_empty() {
        return Err(PackError::Invalid(diagnostics));
    }
    Ok(pack)
}

/// The shipped COVID-19 pack, parsed.
pub fn covid19() -> ContentPack {
    load_pack(COVID19_PACK).expect("shipped pack is valid")
}

/// Pretty JSON in the pack file format.
pub fn to_json(pack: &ContentPack) -> String {
    serde_json::to_string_pretty(pack).expect("pack serializes")
}

impl ContentPack {
    pub fn id(&self) -> &str {
        &self.pack.id
    }

    pub fn version(&self) -> &str {
        &self.pack.version
    }

    pub fn techniques(&self) -> &[PersuasiveTechnique] {
        &self.pack.techniques
    }

    pub fn scene(&self, id: &str) -> Option<&SceneSpec> {
        self.scenes.iter().find(|s| s.id == id)
    }

    pub fn scene_index(&self, id: &str) -> Option<usize> {
        self.scenes.iter().position(|s| s.id == id)
    }

    pub fn first_scene(&self) -> &SceneSpec {
        &self.scenes[0]
    }

    pub fn topics(&self) -> impl Iterator<Item = &str> {
        self.scenes.iter().filter_map(|s| s.topic.as_deref())
    }

    /// The question with this id and the scene that asks it.
    pub fn question(&self, id: &str) -> Option<(&SceneSpec, &QuestionSpec)> {
        self.scenes
            .iter()
            .find_map(|s| s.questions.iter().find(|q| q.id == id).map(|q| (s, q)))
    }

    /// Template text for an act, verbatim.
    pub fn render(
        &self,
        function: CommunicativeFunction,
        scene: &str,
        technique: Option<PersuasiveTechnique>,
    ) -> Result<&str, PackError> {
        let spec = self
            .scene(scene)
            .ok_or_else(|| PackError::UnknownScene(scene.to_string()))?;
        spec.template(function, technique)
            .map(|t| t.text.as_str())
            .ok_or_else(|| PackError::MissingTemplate {
                scene: scene.to_string(),
                function,
                technique,
            })
    }

    /// Kernel activation parameters declared by the pack.
    pub fn activation_params(&self) -> Result<ActivationParams, KernelError> {
        let k = &self.kernel;
        let mut params = ActivationParams::new(k.source_weight_total, k.noise_scale)?;
        if let Some(t) = k.retrieval_threshold {
            params.set_retrieval_threshold(t)?;
        }
        for a in &k.associations {
            params.set_association(ChunkId::new(&a.source), ChunkId::new(&a.target), a.strength)?;
        }
        Ok(params)
    }
}

/// Every (function, technique) pair the dialogue policy can request in a
/// scene, derived from the scene's role, questions and climax flag.
pub fn required_templates(
    scene: &SceneSpec,
    techniques: &[PersuasiveTechnique],
) -> Vec<(CommunicativeFunction, Option<PersuasiveTechnique>)> {
    use CommunicativeFunction as F;
    let mut out = Vec::new();
    match scene.role {
        SceneRole::Introduction => out.push((F::GreetingSelfIntroduction, None)),
        SceneRole::Conclusion => out.push((F::Goodbye, None)),
        SceneRole::Topic => {
            if let Some(q) = scene.question(QuestionKind::KnowledgeProbe) {
                for level in q.reachable_levels() {
                    out.push((knowledge_follow_up(level), None));
                }
            }
            if let Some(q) = scene.question(QuestionKind::IntentionProbe) {
                if q.reachable_levels().contains(&Level::Low) {
                    out.extend(techniques.iter().map(|t| (F::Argument, Some(*t))));
                }
            }
            if scene.climax_capable {
                out.push((F::Exception, None));
                out.push((F::Substitution, None));
                let low_after = scene
                    .question(QuestionKind::RoleReassessment)
                    .is_some_and(|q| q.reachable_levels().contains(&Level::Low));
                if low_after {
                    out.push((F::Acknowledge, None));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The informative act that answers a knowledge level.
pub fn knowledge_follow_up(level: Level) -> CommunicativeFunction {
    match level {
        Level::Low => CommunicativeFunction::Inform,
        Level::Medium => CommunicativeFunction::Reinforce,
        Level::High => CommunicativeFunction::Acknowledge,
    }
}

pub fn scene_chunk_id(scene: &str) -> String {
    format!("scene:{scene}")
}

pub fn topic_chunk_id(topic: &str) -> String {
    format!("topic:{topic}")
}

pub fn question_chunk_id(question: &str) -> String {
    format!("question:{question}")
}

pub fn utterance_chunk_id(
    scene: &str,
    function: CommunicativeFunction,
    technique: Option<PersuasiveTechnique>,
) -> String {
    match technique {
        Some(t) => format!("utterance:{scene}:{function}:{t}"),
        None => format!("utterance:{scene}:{function}"),
    }
}

/// Ids of the chunks a pack contributes to declarative memory. Association
/// tables may only refer to these.
pub fn chunk_ids(pack: &ContentPack) -> Vec<String> {
    let mut ids = Vec::new();
    for s in &pack.scenes {
        ids.push(scene_chunk_id(&s.id));
        if let Some(t) = &s.topic {
            ids.push(topic_chunk_id(t));
        }
        for q in &s.questions {
            ids.push(question_chunk_id(&q.id));
        }
        for t in &s.templates {
            ids.push(utterance_chunk_id(&s.id, t.function, t.technique));
        }
    }
    ids
}
