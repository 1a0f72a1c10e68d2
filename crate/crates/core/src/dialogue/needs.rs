use std::collections::BTreeMap;

use rand::Rng;

use super::types::{
    EthicalProfile, InformationState, Level, Need, NeedKind, ProfileChoice, TopicState,
};
use crate::pack::{ContentPack, SceneRole, SceneSpec};
use crate::dialogue::QuestionKind;

/// Where the climax sub-program of a topic stands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClimaxStep {
    /// Introduce the narrative condition.
    Exception,
    /// Ask again, with the user in the assigned role.
    Reassess,
    /// Neutral profile, low answer: close without substitution.
    Close,
}

impl ClimaxStep {
    pub fn as_str(self) -> &'static str {
        match self {
            ClimaxStep::Exception => "exception",
            ClimaxStep::Reassess => "reassess",
            ClimaxStep::Close => "close",
        }
    }
}

/// Fresh information state at the start of a session. Draws the ethical
/// profile from `rng` only when the choice is `Random`.
pub fn init_state<R: Rng + ?Sized>(
    pack: &ContentPack,
    choice: ProfileChoice,
    rng: &mut R,
) -> InformationState {
    let ethical_profile = match choice {
        ProfileChoice::OpenMinded => EthicalProfile::OpenMinded,
        ProfileChoice::Neutral => EthicalProfile::Neutral,
        ProfileChoice::Random => {
            if rng.random_bool(0.5) {
                EthicalProfile::OpenMinded
            } else {
                EthicalProfile::Neutral
            }
        }
    };
    let mut state = InformationState {
        topic_states: pack
            .topics()
            .map(|t| (t.to_string(), TopicState::new(t)))
            .collect(),
        needs: BTreeMap::new(),
        current_scene: pack.first_scene().id.clone(),
        previous_scene: None,
        ethical_profile,
        active_role: None,
        history: Vec::new(),
        greeted: false,
        farewell_given: false,
        pending_question: None,
    };
    state.needs = emerge_needs(&state, pack);
    state
}

fn current_topic<'a>(
    state: &'a InformationState,
    pack: &'a ContentPack,
) -> Option<(&'a SceneSpec, &'a TopicState)> {
    let scene = pack.scene(&state.current_scene)?;
    if scene.role != SceneRole::Topic {
        return None;
    }
    let topic = state.topic_states.get(scene.topic.as_deref()?)?;
    Some((scene, topic))
}

pub fn climax_step(scene: &SceneSpec, ts: &TopicState, profile: EthicalProfile) -> Option<ClimaxStep> {
    if !scene.climax_capable || !(ts.argued || ts.informed) {
        return None;
    }
    if !ts.exception_issued {
        return Some(ClimaxStep::Exception);
    }
    if !ts.reassessed {
        return Some(ClimaxStep::Reassess);
    }
    let low_after = ts.post_exception_intention == Some(Level::Low);
    if profile == EthicalProfile::Neutral && low_after && !ts.climax_closed {
        return Some(ClimaxStep::Close);
    }
    None
}

/// The climax step of the current scene, if any.
pub fn current_climax_step(state: &InformationState, pack: &ContentPack) -> Option<ClimaxStep> {
    let (scene, ts) = current_topic(state, pack)?;
    climax_step(scene, ts, state.ethical_profile)
}

/// Recomputes every need from the state.
pub fn emerge_needs(state: &InformationState, pack: &ContentPack) -> BTreeMap<NeedKind, Need> {
    let mut unsatisfied = Vec::new();
    if !state.greeted {
        unsatisfied.push(NeedKind::SocialAffiliation);
    }
    if let Some((scene, ts)) = current_topic(state, pack) {
        if scene.question(QuestionKind::KnowledgeProbe).is_some()
            && !(ts.knowledge_probed && ts.knowledge_addressed)
        {
            unsatisfied.push(NeedKind::Competence);
        }
        if scene.question(QuestionKind::IntentionProbe).is_some() && !ts.intention_probed {
            unsatisfied.push(NeedKind::IntentionalAssessment);
        }
        // the reassessment answer feeds the climax, not a new argument
        if ts.intention_probed && ts.intention == Level::Low && !ts.argued && !ts.reassessed {
            unsatisfied.push(NeedKind::Argumentation);
        }
        if climax_step(scene, ts, state.ethical_profile).is_some() {
            unsatisfied.push(NeedKind::Climax);
        }
        if state.ethical_profile == EthicalProfile::OpenMinded
            && ts.exception_issued
            && ts.post_exception_intention == Some(Level::Low)
            && !ts.substitution_issued
        {
            unsatisfied.push(NeedKind::OpenMindedness);
        }
    }
    NeedKind::PRIORITY
        .into_iter()
        .map(|k| (k, Need::new(k, !unsatisfied.contains(&k))))
        .collect()
}

/// Scene-program steps that are not need-driven: the goodbye of the
/// conclusion scene.
pub fn farewell_pending(state: &InformationState, pack: &ContentPack) -> bool {
    pack.scene(&state.current_scene)
        .is_some_and(|s| s.role == SceneRole::Conclusion)
        && !state.farewell_given
}

pub fn is_complete(state: &InformationState) -> bool {
    state.farewell_given
}
