//! Minimal production-system kernel.
//!
//! Declarative memory holds chunks, five named buffers each hold at most one
//! chunk, and a production cycle fires the highest-priority production whose
//! conditions match the buffers. Retrieval ranks matching chunks by
//! `A_i = B_i + sum_j W_j * S_ji + e`, where the sources `j` are the chunk
//! references in the goal buffer.

mod activation;
mod chunk;
mod memory;
mod production;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use activation::{activation, activation_without_noise, logistic_noise, ActivationParams};
pub use chunk::{Chunk, ChunkId, Value};
pub use memory::{DeclarativeMemory, RetrievalFailure, RetrievalRequest, Retrieved};
pub use production::{Action, Condition, Directive, Production, SlotTest, Term};

use production::{match_condition, resolve, Bindings};

/// Seeded random stream owned by a kernel.
pub type KernelRng = ChaCha8Rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("chunk {0} has an empty type")]
    EmptyChunkType(ChunkId),
    #[error("non-finite or out-of-range parameter: {0}")]
    NonFinite(String),
    #[error("duplicate chunk id {0}")]
    DuplicateChunk(ChunkId),
    #[error("duplicate production {0}")]
    DuplicateProduction(String),
    #[error("production {production}: variable {variable} is not bound by any condition")]
    UnboundVariable { production: String, variable: String },
    #[error("production {0}: more than one retrieval request")]
    MultipleRetrievals(String),
    #[error("production {production}: modifies {buffer} without matching it")]
    UnmatchedModify {
        production: String,
        buffer: BufferName,
    },
    #[error("production {0}: writes a chunk with an empty type")]
    UntypedWrite(String),
    #[error("buffer {0} is empty")]
    EmptyBuffer(BufferName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BufferName {
    Goal,
    Imaginal,
    Retrieval,
    Aural,
    Vocal,
}

impl BufferName {
    pub const ALL: [BufferName; 5] = [
        BufferName::Goal,
        BufferName::Imaginal,
        BufferName::Retrieval,
        BufferName::Aural,
        BufferName::Vocal,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for BufferName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BufferName::Goal => "goal",
            BufferName::Imaginal => "imaginal",
            BufferName::Retrieval => "retrieval",
            BufferName::Aural => "aural",
            BufferName::Vocal => "vocal",
        };
        f.write_str(s)
    }
}

/// Result of one production cycle.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Quiescent,
    Fired(Firing),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Firing {
    pub production: String,
    pub directives: Vec<Directive>,
    /// Outcome of the production's retrieval request, if it made one.
    pub retrieval: Option<Result<ChunkId, RetrievalFailure>>,
}

#[derive(Debug, Clone)]
pub struct KernelState {
    memory: DeclarativeMemory,
    buffers: [Option<Chunk>; 5],
    productions: Vec<Production>,
    params: ActivationParams,
    rng: KernelRng,
    fresh_ids: u64,
}

impl KernelState {
    pub fn new(params: ActivationParams, seed: u64) -> Self {
        Self {
            memory: DeclarativeMemory::new(),
            buffers: Default::default(),
            productions: Vec::new(),
            params,
            rng: KernelRng::seed_from_u64(seed),
            fresh_ids: 0,
        }
    }

    pub fn memory(&self) -> &DeclarativeMemory {
        &self.memory
    }

    pub fn add_chunk(&mut self, chunk: Chunk) -> Result<(), KernelError> {
        self.memory.add(chunk)
    }

    /// Adds a production after load-time validation. Declaration order breaks
    /// priority ties.
    pub fn add_production(&mut self, production: Production) -> Result<(), KernelError> {
        production.validate()?;
        if self.productions.iter().any(|p| p.name == production.name) {
            return Err(KernelError::DuplicateProduction(production.name));
        }
        self.productions.push(production);
        Ok(())
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn params(&self) -> &ActivationParams {
        &self.params
    }

    pub fn buffer(&self, name: BufferName) -> Option<&Chunk> {
        self.buffers[name.index()].as_ref()
    }

    pub fn set_buffer(&mut self, name: BufferName, chunk: Chunk) {
        self.buffers[name.index()] = Some(chunk);
    }

    pub fn clear_buffer(&mut self, name: BufferName) {
        self.buffers[name.index()] = None;
    }

    pub fn modify_buffer(&mut self, name: BufferName, slot: &str, value: Value) -> Result<(), KernelError> {
        let chunk = self.buffers[name.index()]
            .as_mut()
            .ok_or(KernelError::EmptyBuffer(name))?;
        chunk.set_slot(slot, value);
        Ok(())
    }

    /// The session random stream. Every stochastic choice of a session is
    /// drawn from here, so a seed fixes the whole run.
    pub fn rng(&mut self) -> &mut KernelRng {
        &mut self.rng
    }

    /// Retrieval against declarative memory using the current goal as context.
    pub fn retrieve(&mut self, request: &RetrievalRequest) -> Result<Retrieved, RetrievalFailure> {
        let goal = self.buffers[BufferName::Goal.index()].as_ref();
        self.memory.retrieve(request, goal, &self.params, &mut self.rng)
    }

    fn matching(&self, production: &Production) -> Option<Bindings> {
        let mut bindings = Bindings::new();
        for cond in &production.conditions {
            let chunk = self.buffer(cond.buffer)?;
            if !match_condition(cond, chunk, &mut bindings) {
                return None;
            }
        }
        Some(bindings)
    }

    /// Runs one production cycle.
    pub fn step(&mut self) -> Step {
        let mut selected: Option<(usize, Bindings)> = None;
        for (i, p) in self.productions.iter().enumerate() {
            if let Some(b) = self.matching(p) {
                let better = match &selected {
                    None => true,
                    Some((j, _)) => p.priority > self.productions[*j].priority,
                };
                if better {
                    selected = Some((i, b));
                }
            }
        }
        let Some((index, bindings)) = selected else {
            return Step::Quiescent;
        };
        let production = self.productions[index].clone();
        let mut firing = Firing {
            production: production.name.clone(),
            directives: Vec::new(),
            retrieval: None,
        };
        for action in &production.actions {
            match action {
                Action::Write {
                    buffer,
                    chunk_type,
                    slots,
                } => {
                    self.fresh_ids += 1;
                    let id = format!("{buffer}-{}", self.fresh_ids);
                    let mut chunk = Chunk::new(id, chunk_type.as_str())
                        .expect("production writes a typed chunk");
                    for (slot, term) in slots {
                        chunk.set_slot(slot.as_str(), resolve(term, &bindings));
                    }
                    self.set_buffer(*buffer, chunk);
                }
                Action::Modify { buffer, slots } => {
                    if let Some(chunk) = self.buffers[buffer.index()].as_mut() {
                        for (slot, term) in slots {
                            chunk.set_slot(slot.as_str(), resolve(term, &bindings));
                        }
                    }
                }
                Action::Clear(buffer) => self.clear_buffer(*buffer),
                Action::Retrieve { chunk_type, slots } => {
                    let request = RetrievalRequest {
                        chunk_type: chunk_type.clone(),
                        slots: slots
                            .iter()
                            .map(|(s, t)| (s.clone(), resolve(t, &bindings)))
                            .collect(),
                    };
                    let outcome = self.retrieve(&request);
                    match outcome {
                        Ok(r) => {
                            firing.retrieval = Some(Ok(r.chunk.id().clone()));
                            self.set_buffer(BufferName::Retrieval, r.chunk);
                        }
                        Err(failure) => {
                            firing.retrieval = Some(Err(failure));
                            self.clear_buffer(BufferName::Retrieval);
                        }
                    }
                }
                Action::Emit { directive, args } => firing.directives.push(Directive {
                    name: directive.clone(),
                    args: args
                        .iter()
                        .map(|(k, t)| (k.clone(), resolve(t, &bindings)))
                        .collect(),
                }),
            }
        }
        Step::Fired(firing)
    }
}
