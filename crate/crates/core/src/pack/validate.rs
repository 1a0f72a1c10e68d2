use std::collections::{BTreeSet, HashSet};
use std::fmt;

use super::model::{ContentPack, QuestionSpec, SceneRole, SceneSpec};
use super::{chunk_ids, required_templates};
use crate::dialogue::{CommunicativeFunction, PersuasiveTechnique, QuestionKind};

/// A validation finding, anchored at the offending path
/// (`scene mask/question mask-intention/option yes`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Default)]
struct Report(Vec<Diagnostic>);

impl Report {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic {
            path: path.into(),
            message: message.into(),
        });
    }
}

/// Checks every pack invariant and returns all findings.
pub fn validate(pack: &ContentPack) -> Vec<Diagnostic> {
    let mut r = Report::default();
    check_meta(pack, &mut r);
    check_scene_order(pack, &mut r);

    let mut scene_ids = HashSet::new();
    let mut topics = HashSet::new();
    let mut question_ids = HashSet::new();
    for scene in &pack.scenes {
        let path = format!("scene {}", scene.id);
        if scene.id.is_empty() {
            r.push("scenes", "scene with empty id");
        }
        if !scene_ids.insert(scene.id.as_str()) {
            r.push(&path, "duplicate scene id");
        }
        match (scene.role, &scene.topic) {
            (SceneRole::Topic, None) => r.push(&path, "topic scene without a topic"),
            (SceneRole::Topic, Some(t)) => {
                if t.is_empty() {
                    r.push(&path, "empty topic id");
                } else if !topics.insert(t.as_str()) {
                    r.push(&path, format!("topic {t} already covered by another scene"));
                }
            }
            (_, Some(_)) => r.push(&path, "introduction and conclusion scenes take no topic"),
            (_, None) => {}
        }
        for q in &scene.questions {
            if !question_ids.insert(q.id.as_str()) {
                r.push(format!("{path}/question {}", q.id), "duplicate question id");
            }
        }
        check_scene(pack, scene, &path, &mut r);
    }
    check_kernel(pack, &mut r);
    r.0
}

fn check_meta(pack: &ContentPack, r: &mut Report) {
    if pack.pack.id.trim().is_empty() {
        r.push("pack", "empty pack id");
    }
    if pack.pack.version.trim().is_empty() {
        r.push("pack", "empty pack version");
    }
    if pack.pack.techniques.is_empty() {
        r.push("pack/techniques", "no persuasive technique enabled");
    }
    let distinct: BTreeSet<_> = pack.pack.techniques.iter().collect();
    if distinct.len() != pack.pack.techniques.len() {
        r.push("pack/techniques", "technique listed twice");
    }
}

fn check_scene_order(pack: &ContentPack, r: &mut Report) {
    let n = pack.scenes.len();
    if n < 2 {
        r.push("scenes", "a pack needs at least an introduction and a conclusion scene");
        return;
    }
    for (i, scene) in pack.scenes.iter().enumerate() {
        let expected = if i == 0 {
            SceneRole::Introduction
        } else if i == n - 1 {
            SceneRole::Conclusion
        } else {
            SceneRole::Topic
        };
        if scene.role != expected {
            r.push(
                format!("scene {}", scene.id),
                format!("role at position {i} must be {expected:?}, found {:?}", scene.role).to_lowercase(),
            );
        }
    }
}

fn check_scene(pack: &ContentPack, scene: &SceneSpec, path: &str, r: &mut Report) {
    if scene.role != SceneRole::Topic && !scene.questions.is_empty() {
        r.push(path, "only topic scenes may ask questions");
    }
    if scene.role != SceneRole::Topic && (scene.climax_capable || scene.exception.is_some()) {
        r.push(path, "only topic scenes may carry a climax");
    }

    let mut kinds = BTreeSet::new();
    for q in &scene.questions {
        if !kinds.insert(q.kind) {
            r.push(format!("{path}/question {}", q.id), format!("second {} question in scene", q.kind));
        }
        check_question(scene, q, &format!("{path}/question {}", q.id), r);
    }

    if scene.climax_capable {
        if scene.exception.is_none() {
            r.push(path, "climax-capable scene without an exception");
        }
        if scene.question(QuestionKind::RoleReassessment).is_none() {
            r.push(path, "climax-capable scene without a role_reassessment question");
        }
    } else if let Some(q) = scene.question(QuestionKind::RoleReassessment) {
        r.push(
            format!("{path}/question {}", q.id),
            "role_reassessment question in a scene that is not climax-capable",
        );
    }
    if let Some(e) = &scene.exception {
        if !scene.climax_capable {
            r.push(path, "exception given but scene is not climax-capable");
        }
        if e.condition.trim().is_empty() {
            r.push(format!("{path}/exception"), "empty condition id");
        }
        if e.role.trim().is_empty() {
            r.push(format!("{path}/exception"), "empty role id");
        }
    }

    let mut seen = BTreeSet::new();
    for (i, t) in scene.templates.iter().enumerate() {
        let tpath = format!("{path}/templates[{i}]");
        if !seen.insert((t.function, t.technique)) {
            r.push(&tpath, format!("duplicate {}", describe(t.function, t.technique)));
        }
        if t.function == CommunicativeFunction::Question {
            r.push(&tpath, "question text lives in the question's prompt, not in a template");
        }
        match (t.function, t.technique) {
            (CommunicativeFunction::Argument, None) => {
                r.push(&tpath, "argument template without a technique")
            }
            (CommunicativeFunction::Argument, Some(tech)) if !pack.pack.techniques.contains(&tech) => {
                r.push(&tpath, format!("technique {tech} is not enabled in this pack"))
            }
            (f, Some(_)) if f != CommunicativeFunction::Argument => {
                r.push(&tpath, format!("{f} template must not name a technique"))
            }
            _ => {}
        }
        if t.text.trim().is_empty() {
            r.push(&tpath, "empty template text");
        }
    }

    for (function, technique) in required_templates(scene, &pack.pack.techniques) {
        if scene.template(function, technique).is_none() {
            r.push(path, format!("missing {}", describe(function, technique)));
        }
    }
}

fn describe(
    function: CommunicativeFunction,
    technique: Option<PersuasiveTechnique>,
) -> String {
    match technique {
        Some(t) => format!("{function} template for {t}"),
        None => format!("{function} template"),
    }
}

fn check_question(scene: &SceneSpec, q: &QuestionSpec, path: &str, r: &mut Report) {
    if q.id.trim().is_empty() {
        r.push(path, "empty question id");
    }
    if q.prompt.trim().is_empty() {
        r.push(path, "empty prompt");
    }
    if q.options.len() < 2 {
        r.push(path, "a question needs at least two options");
    }
    let mut ids = HashSet::new();
    let attr = q.kind.attribute();
    for o in &q.options {
        let opath = format!("{path}/option {}", o.id);
        if o.id.trim().is_empty() {
            r.push(&opath, "empty option id");
        }
        if !ids.insert(o.id.as_str()) {
            r.push(&opath, "duplicate option id");
        }
        if o.label.trim().is_empty() {
            r.push(&opath, "empty label");
        }
        if o.effects.is_empty() {
            r.push(&opath, "option has no effect");
        }
        let mut attrs = BTreeSet::new();
        for e in &o.effects {
            if !attrs.insert(e.set) {
                r.push(&opath, format!("{} set twice", e.set));
            }
            if let Some(t) = &e.topic {
                if scene.topic.as_deref() != Some(t.as_str()) {
                    r.push(&opath, format!("effect targets topic {t}, outside this scene"));
                }
            }
        }
        if !o.effects.is_empty() && !attrs.contains(&attr) {
            r.push(&opath, format!("{} question option must set {attr}", q.kind));
        }
    }
}

fn check_kernel(pack: &ContentPack, r: &mut Report) {
    let k = &pack.kernel;
    if !k.source_weight_total.is_finite() || k.source_weight_total < 0.0 {
        r.push("kernel/source_weight_total", "must be finite and non-negative");
    }
    if !k.noise_scale.is_finite() || k.noise_scale < 0.0 {
        r.push("kernel/noise_scale", "must be finite and non-negative");
    }
    if let Some(t) = k.retrieval_threshold {
        if t.is_nan() {
            r.push("kernel/retrieval_threshold", "must be a number");
        }
    }
    let known: HashSet<String> = chunk_ids(pack).into_iter().collect();
    for (i, a) in k.associations.iter().enumerate() {
        let path = format!("kernel/associations[{i}]");
        if !a.strength.is_finite() {
            r.push(&path, "strength must be finite");
        }
        for end in [&a.source, &a.target] {
            if !known.contains(end) {
                r.push(&path, format!("unknown chunk {end}"));
            }
        }
    }
}
