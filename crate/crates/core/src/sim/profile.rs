use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::dialogue::{Level, QuestionKind};
use crate::pack::{ContentPack, QuestionSpec, SceneRole};

pub const ANY_TOPIC: &str = "*";

/// How a scripted user picks an answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choose {
    /// A fixed option id.
    Option(String),
    /// The option that sets the question's attribute to this level.
    Level(Level),
    /// A level drawn with these relative weights.
    Weighted(BTreeMap<Level, f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerRule {
    pub kind: QuestionKind,
    #[serde(default = "any_topic")]
    pub topic: String,
    pub choose: Choose,
}

fn any_topic() -> String {
    ANY_TOPIC.to_string()
}

/// A scripted user: one answer rule per (question kind, topic), with `*`
/// standing for every topic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub id: String,
    pub rules: Vec<AnswerRule>,
    /// Forces the answer to every role reassessment, whatever the rules say.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_exception_intention: Option<Level>,
}

impl UserProfile {
    fn rule(&self, kind: QuestionKind, topic: &str) -> Option<&AnswerRule> {
        self.rules
            .iter()
            .find(|r| r.kind == kind && r.topic == topic)
            .or_else(|| {
                self.rules
                    .iter()
                    .find(|r| r.kind == kind && r.topic == ANY_TOPIC)
            })
    }

    /// Option id this user gives to `question` in `topic`.
    pub fn answer<R: Rng + ?Sized>(
        &self,
        topic: &str,
        question: &QuestionSpec,
        rng: &mut R,
    ) -> Result<String, SimError> {
        let forced = match question.kind {
            QuestionKind::RoleReassessment => self.post_exception_intention.map(Choose::Level),
            _ => None,
        };
        let choose = match forced {
            Some(c) => c,
            None => self
                .rule(question.kind, topic)
                .ok_or_else(|| SimError::NoRule {
                    profile: self.id.clone(),
                    question: question.id.clone(),
                })?
                .choose
                .clone(),
        };
        let level = match choose {
            Choose::Option(id) => {
                return question
                    .option(&id)
                    .map(|o| o.id.clone())
                    .ok_or_else(|| SimError::NoOption {
                        profile: self.id.clone(),
                        question: question.id.clone(),
                        wanted: id,
                    })
            }
            Choose::Level(l) => l,
            Choose::Weighted(weights) => draw_level(&weights, rng).ok_or_else(|| SimError::BadWeights {
                profile: self.id.clone(),
            })?,
        };
        let attribute = question.kind.attribute();
        question
            .options
            .iter()
            .find(|o| o.effects.iter().any(|e| e.set == attribute && e.to == level))
            .map(|o| o.id.clone())
            .ok_or_else(|| SimError::NoOption {
                profile: self.id.clone(),
                question: question.id.clone(),
                wanted: level.as_str().to_string(),
            })
    }

    /// Question ids reachable in `pack` for which this profile has no rule.
    pub fn uncovered(&self, pack: &ContentPack) -> Vec<String> {
        let mut missing = Vec::new();
        for scene in pack.scenes.iter().filter(|s| s.role == SceneRole::Topic) {
            let topic = scene.topic.as_deref().unwrap_or_default();
            for q in &scene.questions {
                let forced = q.kind == QuestionKind::RoleReassessment
                    && self.post_exception_intention.is_some();
                if !forced && self.rule(q.kind, topic).is_none() {
                    missing.push(q.id.clone());
                }
            }
        }
        missing
    }
}

fn draw_level<R: Rng + ?Sized>(weights: &BTreeMap<Level, f64>, rng: &mut R) -> Option<Level> {
    let total: f64 = weights.values().sum();
    if !total.is_finite() || total <= 0.0 || weights.values().any(|w| *w < 0.0 || !w.is_finite()) {
        return None;
    }
    let mut x = rng.random::<f64>() * total;
    let mut last = None;
    for (level, w) in weights {
        if *w > 0.0 {
            last = Some(*level);
            if x < *w {
                return Some(*level);
            }
            x -= w;
        }
    }
    last
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixEntry {
    pub weight: f64,
    pub profile: UserProfile,
}

/// Weighted population of scripted users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileMix {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub profiles: Vec<MixEntry>,
}

impl ProfileMix {
    pub fn single(profile: UserProfile) -> Self {
        ProfileMix {
            id: profile.id.clone(),
            notes: None,
            profiles: vec![MixEntry {
                weight: 1.0,
                profile,
            }],
        }
    }

    pub fn parse(document: &str) -> Result<Self, SimError> {
        let mix: ProfileMix =
            serde_json::from_str(document).map_err(|e| SimError::Profiles(e.to_string()))?;
        mix.check()?;
        Ok(mix)
    }

    pub fn check(&self) -> Result<(), SimError> {
        if self.profiles.is_empty() {
            return Err(SimError::Profiles("mix has no profiles".into()));
        }
        let total: f64 = self.profiles.iter().map(|e| e.weight).sum();
        if self.profiles.iter().any(|e| e.weight < 0.0 || !e.weight.is_finite()) || !total.is_finite() || total <= 0.0 {
            return Err(SimError::Profiles("weights must be non-negative with a positive sum".into()));
        }
        Ok(())
    }

    /// Every reachable question covered by every profile.
    pub fn check_against(&self, pack: &ContentPack) -> Result<(), SimError> {
        for e in &self.profiles {
            if let Some(q) = e.profile.uncovered(pack).into_iter().next() {
                return Err(SimError::NoRule {
                    profile: e.profile.id.clone(),
                    question: q,
                });
            }
        }
        Ok(())
    }

    pub fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> &UserProfile {
        let total: f64 = self.profiles.iter().map(|e| e.weight).sum();
        let mut x = rng.random::<f64>() * total;
        for e in &self.profiles {
            if x < e.weight {
                return &e.profile;
            }
            x -= e.weight;
        }
        &self
            .profiles
            .iter()
            .rev()
            .find(|e| e.weight > 0.0)
            .expect("checked: positive total weight")
            .profile
    }
}

const SKEPTIC: &str = include_str!("../../profiles/skeptic.json");
const COMPLIANT: &str = include_str!("../../profiles/compliant.json");
const MIXED: &str = include_str!("../../profiles/mixed.json");
const STUDY: &str = include_str!("../../profiles/study-mix.json");

/// Built-in mixes: `skeptic`, `compliant`, `mixed` and `study-mix`.
pub fn builtin_mix(name: &str) -> Option<ProfileMix> {
    let doc = match name {
        "skeptic" => SKEPTIC,
        "compliant" => COMPLIANT,
        "mixed" => MIXED,
        "study-mix" => STUDY,
        _ => return None,
    };
    Some(ProfileMix::parse(doc).expect("built-in profiles parse"))
}

pub const BUILTIN_MIXES: [&str; 4] = ["skeptic", "compliant", "mixed", "study-mix"];

pub fn skeptic() -> UserProfile {
    builtin_mix("skeptic").unwrap().profiles.remove(0).profile
}

pub fn compliant() -> UserProfile {
    builtin_mix("compliant").unwrap().profiles.remove(0).profile
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::pack::covid19;

    #[test]
    fn builtins_cover_the_shipped_pack() {
        let pack = covid19();
        for name in BUILTIN_MIXES {
            builtin_mix(name).unwrap().check_against(&pack).unwrap();
        }
    }

    #[test]
    fn skeptic_answers_low_everywhere() {
        let pack = covid19();
        let p = skeptic();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (_, q) = pack.question("mask-intention").unwrap();
        assert_eq!(p.answer("mask", q, &mut rng).unwrap(), "no");
        let (_, q) = pack.question("mask-role").unwrap();
        assert_eq!(p.answer("mask", q, &mut rng).unwrap(), "cannot");
    }

    #[test]
    fn topic_rule_beats_wildcard() {
        let mut p = compliant();
        p.rules.insert(
            0,
            AnswerRule {
                kind: QuestionKind::IntentionProbe,
                topic: "vaccination".into(),
                choose: Choose::Option("no".into()),
            },
        );
        let pack = covid19();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (_, q) = pack.question("vaccination-intention").unwrap();
        assert_eq!(p.answer("vaccination", q, &mut rng).unwrap(), "no");
        let (_, q) = pack.question("mask-intention").unwrap();
        assert_eq!(p.answer("mask", q, &mut rng).unwrap(), "always");
    }

    #[test]
    fn missing_rule_names_the_question() {
        let p = UserProfile {
            id: "partial".into(),
            rules: vec![],
            post_exception_intention: None,
        };
        let pack = covid19();
        let (_, q) = pack.question("contagion-knowledge").unwrap();
        let err = p.answer("contagion", q, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(err.to_string().contains("contagion-knowledge"), "{err}");
    }

    #[test]
    fn weighted_draw_respects_zero_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = BTreeMap::from([(Level::Low, 0.0), (Level::High, 2.0)]);
        for _ in 0..200 {
            assert_eq!(draw_level(&w, &mut rng), Some(Level::High));
        }
        assert_eq!(draw_level(&BTreeMap::new(), &mut rng), None);
    }

    #[test]
    fn study_mix_weights() {
        let mix = builtin_mix("study-mix").unwrap();
        let w: BTreeMap<_, _> = mix
            .profiles
            .iter()
            .map(|e| (e.profile.id.as_str(), e.weight))
            .collect();
        assert_eq!(w.values().sum::<f64>(), 63.0);
        assert_eq!(w["mask-opposed"], 4.0);
        assert_eq!(w["vaccine-opposed"], 7.0);
    }
}
