use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::needs::{emerge_needs, farewell_pending, init_state, is_complete};
use super::policy::{self, DIRECTIVE_ACT, DIRECTIVE_CHOOSE_TECHNIQUE};
use super::technique::choose_technique;
use super::types::{
    AppliedEffect, Attribute, ChoiceRecord, CommunicativeFunction, DialogueAct, HistoryRecord,
    InformationState, NeedKind, OptionView, PersuasiveTechnique, ProfileChoice, QuestionKind,
};
use crate::kernel::{BufferName, Chunk, Directive, KernelError, KernelState, Step, Value};
use crate::pack::ContentPack;

/// Production cycles allowed to produce one act.
const MAX_CYCLES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DialogueError {
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("scene {scene} still has pending needs: {needs:?}")]
    PendingNeeds { scene: String, needs: Vec<NeedKind> },
    #[error("scene {0} is the last scene")]
    NoNextScene(String),
    #[error("no unsatisfied need and no scripted step in scene {0}")]
    NothingToSay(String),
    #[error("rule {production} in scene {scene}: retrieval found no matching content")]
    MissingContent { production: String, scene: String },
    #[error("no act after {MAX_CYCLES} production cycles in scene {0}")]
    Stalled(String),
    #[error("malformed act directive: {0}")]
    BadDirective(String),
    #[error("session already ended")]
    Finished,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// One dialogue session's engine: the information state running on a
/// production-system kernel, plus the pack it reads from.
#[derive(Debug, Clone)]
pub struct Engine {
    pack: Arc<ContentPack>,
    kernel: KernelState,
    state: InformationState,
    technique_override: Option<PersuasiveTechnique>,
}

impl Engine {
    pub fn new(pack: Arc<ContentPack>, profile: ProfileChoice, seed: u64) -> Result<Self, DialogueError> {
        let mut kernel = KernelState::new(pack.activation_params()?, seed);
        let state = init_state(&pack, profile, kernel.rng());
        policy::load_pack_chunks(&mut kernel, &pack)?;
        for p in policy::productions() {
            kernel.add_production(p)?;
        }
        Ok(Self {
            pack,
            kernel,
            state,
            technique_override: None,
        })
    }

    pub fn state(&self) -> &InformationState {
        &self.state
    }

    pub fn pack(&self) -> &Arc<ContentPack> {
        &self.pack
    }

    pub fn kernel(&self) -> &KernelState {
        &self.kernel
    }

    /// Pins the technique of every argument act instead of drawing it.
    /// Used to explore the reachable act space.
    pub fn set_technique_override(&mut self, technique: Option<PersuasiveTechnique>) {
        self.technique_override = technique;
    }

    pub fn is_complete(&self) -> bool {
        is_complete(&self.state)
    }

    /// SHA-256 over the canonical JSON of the information state.
    pub fn digest(&self) -> String {
        state_digest(&self.state)
    }

    pub fn refresh_needs(&mut self) {
        self.state.needs = emerge_needs(&self.state, &self.pack);
    }

    fn scene_topic(&self) -> Option<String> {
        self.pack
            .scene(&self.state.current_scene)
            .and_then(|s| s.topic.clone())
    }

    /// Picks the act for the highest-priority unsatisfied need (or the
    /// scripted farewell), renders it and records it.
    pub fn select_act(&mut self) -> Result<DialogueAct, DialogueError> {
        if self.is_complete() {
            return Err(DialogueError::Finished);
        }
        if self.state.pending_question.is_some() {
            return Err(DialogueError::Protocol("a question is waiting for an answer".into()));
        }
        self.refresh_needs();
        if self.state.unsatisfied().is_empty() && !farewell_pending(&self.state, &self.pack) {
            return Err(DialogueError::NothingToSay(self.state.current_scene.clone()));
        }
        let goal = policy::encode_goal(&self.state, &self.pack);
        self.kernel.set_buffer(BufferName::Goal, goal);
        self.kernel.clear_buffer(BufferName::Retrieval);

        let mut technique = None;
        for _ in 0..MAX_CYCLES {
            let firing = match self.kernel.step() {
                Step::Quiescent => {
                    return Err(DialogueError::NothingToSay(self.state.current_scene.clone()))
                }
                Step::Fired(f) => f,
            };
            if let Some(Err(_)) = firing.retrieval {
                return Err(DialogueError::MissingContent {
                    production: firing.production,
                    scene: self.state.current_scene.clone(),
                });
            }
            for d in firing.directives {
                match d.name.as_str() {
                    DIRECTIVE_CHOOSE_TECHNIQUE => {
                        let t = match self.technique_override {
                            Some(t) => t,
                            None => choose_technique(self.kernel.rng(), self.pack.techniques()),
                        };
                        technique = Some(t);
                        self.kernel
                            .modify_buffer(BufferName::Goal, "technique", Value::symbol(t.as_str()))?;
                    }
                    DIRECTIVE_ACT => return self.commit(&d, technique),
                    other => return Err(DialogueError::BadDirective(other.to_string())),
                }
            }
        }
        Err(DialogueError::Stalled(self.state.current_scene.clone()))
    }

    fn commit(
        &mut self,
        d: &Directive,
        chosen: Option<PersuasiveTechnique>,
    ) -> Result<DialogueAct, DialogueError> {
        let bad = || DialogueError::BadDirective(format!("{d:?}"));
        let function = d
            .symbol("function")
            .and_then(CommunicativeFunction::parse)
            .ok_or_else(bad)?;
        let fulfils = d.symbol("need").and_then(NeedKind::parse).ok_or_else(bad)?;
        let utterance = d.symbol("text").ok_or_else(bad)?.to_string();
        let technique = match d.symbol("technique") {
            Some("none") | None => None,
            Some(t) => Some(PersuasiveTechnique::parse(t).ok_or_else(bad)?),
        };
        if technique != chosen {
            return Err(bad());
        }
        let question = match d.symbol("question") {
            Some("none") | None => None,
            Some(q) => Some(q.to_string()),
        };
        let (question_kind, options) = match &question {
            Some(q) => {
                let (_, spec) = self.pack.question(q).ok_or_else(bad)?;
                let options = spec
                    .options
                    .iter()
                    .map(|o| OptionView {
                        id: o.id.clone(),
                        label: o.label.clone(),
                    })
                    .collect();
                (Some(spec.kind), options)
            }
            None => (None, Vec::new()),
        };
        let act = DialogueAct {
            function,
            scene: self.state.current_scene.clone(),
            topic: self.scene_topic(),
            technique,
            utterance,
            question,
            question_kind,
            options,
            fulfils,
        };
        self.apply_act_effects(&act);
        self.state.history.push(HistoryRecord::Agent(act.clone()));
        self.refresh_needs();
        Ok(act)
    }

    fn apply_act_effects(&mut self, act: &DialogueAct) {
        use CommunicativeFunction as F;
        match act.function {
            F::GreetingSelfIntroduction => self.state.greeted = true,
            F::Goodbye => self.state.farewell_given = true,
            F::Question => self.state.pending_question = act.question.clone(),
            _ => {}
        }
        let Some(topic) = &act.topic else { return };
        let role = self
            .pack
            .scene(&act.scene)
            .and_then(|s| s.exception.as_ref())
            .map(|e| e.role.clone());
        let Some(ts) = self.state.topic_states.get_mut(topic) else {
            return;
        };
        match (act.function, act.fulfils) {
            (F::Inform, _) => {
                ts.knowledge_addressed = true;
                ts.informed = true;
            }
            (F::Reinforce, _) | (F::Acknowledge, NeedKind::Competence) => {
                ts.knowledge_addressed = true
            }
            (F::Acknowledge, _) => ts.climax_closed = true,
            (F::Argument, _) => ts.argued = true,
            (F::Exception, _) => {
                ts.exception_issued = true;
                self.state.active_role = role;
            }
            (F::Substitution, _) => ts.substitution_issued = true,
            _ => {}
        }
    }

    /// Applies the user's answer to the pending question.
    pub fn apply_user_reply(&mut self, option_id: &str) -> Result<ChoiceRecord, DialogueError> {
        let pending = self
            .state
            .pending_question
            .clone()
            .ok_or_else(|| DialogueError::Protocol("no question is pending".into()))?;
        let (scene, question) = self
            .pack
            .question(&pending)
            .ok_or_else(|| DialogueError::Protocol(format!("unknown question {pending}")))?;
        let option = question.option(option_id).ok_or_else(|| {
            DialogueError::Protocol(format!("option {option_id} does not answer question {pending}"))
        })?;
        let topic = scene
            .topic
            .clone()
            .ok_or_else(|| DialogueError::Protocol(format!("question {pending} has no topic")))?;
        let kind = question.kind;
        let effects: Vec<AppliedEffect> = option
            .effects
            .iter()
            .map(|e| AppliedEffect {
                attribute: e.set,
                level: e.to,
            })
            .collect();

        let ts = self
            .state
            .topic_states
            .get_mut(&topic)
            .ok_or_else(|| DialogueError::Protocol(format!("unknown topic {topic}")))?;
        for e in &effects {
            match e.attribute {
                Attribute::Knowledge => ts.knowledge = e.level,
                Attribute::Intention => ts.intention = e.level,
            }
        }
        match kind {
            QuestionKind::KnowledgeProbe => ts.knowledge_probed = true,
            QuestionKind::IntentionProbe => ts.intention_probed = true,
            QuestionKind::RoleReassessment => {
                ts.reassessed = true;
                ts.post_exception_intention = Some(ts.intention);
            }
        }
        let record = ChoiceRecord {
            question: pending.clone(),
            kind,
            topic,
            option: option_id.to_string(),
            effects,
        };
        self.state.pending_question = None;
        self.state.history.push(HistoryRecord::User(record.clone()));
        self.kernel.set_buffer(
            BufferName::Aural,
            Chunk::new(format!("heard:{}", self.state.history.len()), "answer")?
                .with_slot("question", Value::symbol(&pending))
                .with_slot("option", Value::symbol(option_id)),
        );
        self.refresh_needs();
        Ok(record)
    }

    /// Moves to the next scene once the current one has nothing left to do.
    pub fn advance_scene(&mut self) -> Result<(), DialogueError> {
        self.refresh_needs();
        let pending = self.state.unsatisfied();
        if !pending.is_empty()
            || self.state.pending_question.is_some()
            || farewell_pending(&self.state, &self.pack)
        {
            return Err(DialogueError::PendingNeeds {
                scene: self.state.current_scene.clone(),
                needs: pending,
            });
        }
        let index = self
            .pack
            .scene_index(&self.state.current_scene)
            .expect("current scene is declared in the pack");
        let next = self
            .pack
            .scenes
            .get(index + 1)
            .ok_or_else(|| DialogueError::NoNextScene(self.state.current_scene.clone()))?;
        let left = std::mem::replace(&mut self.state.current_scene, next.id.clone());
        self.state.previous_scene = Some(left);
        self.state.active_role = None;
        self.refresh_needs();
        Ok(())
    }

    /// Runs the agent until it needs an answer or says goodbye. Returns the
    /// acts emitted on the way.
    pub fn run_until_input(&mut self) -> Result<Vec<DialogueAct>, DialogueError> {
        let mut acts = Vec::new();
        while let Some(act) = self.next_act()? {
            acts.push(act);
        }
        Ok(acts)
    }

    /// The next agent act, moving through finished scenes first. `None` when
    /// the agent is waiting for an answer or the session is over.
    pub fn next_act(&mut self) -> Result<Option<DialogueAct>, DialogueError> {
        while !self.is_complete() && self.state.pending_question.is_none() {
            self.refresh_needs();
            if self.state.unsatisfied().is_empty() && !farewell_pending(&self.state, &self.pack) {
                self.advance_scene()?;
                continue;
            }
            return self.select_act().map(Some);
        }
        Ok(None)
    }
}

pub fn state_digest(state: &InformationState) -> String {
    let bytes = serde_json::to_vec(state).expect("state serializes");
    hex::encode(Sha256::digest(&bytes))
}
