use std::collections::HashMap;

use rand::Rng;

use super::activation::activation;
use super::{ActivationParams, Chunk, ChunkId, KernelError, Value};

/// A retrieval request: a chunk type plus constant slot values that a
/// candidate must carry.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalRequest {
    pub chunk_type: String,
    pub slots: Vec<(String, Value)>,
}

impl RetrievalRequest {
    pub fn new(chunk_type: impl Into<String>) -> Self {
        Self {
            chunk_type: chunk_type.into(),
            slots: Vec::new(),
        }
    }

    pub fn with(mut self, slot: impl Into<String>, value: Value) -> Self {
        self.slots.push((slot.into(), value));
        self
    }

    pub fn matches(&self, chunk: &Chunk) -> bool {
        chunk.chunk_type() == self.chunk_type
            && self
                .slots
                .iter()
                .all(|(name, value)| chunk.slot(name) == Some(value))
    }
}

/// Why a retrieval produced no chunk. A value, not a fault.
#[derive(Debug, Clone, PartialEq)]
pub enum RetrievalFailure {
    NoMatch,
    BelowThreshold { best: ChunkId, activation: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Retrieved {
    pub chunk: Chunk,
    pub activation: f64,
}

/// Declarative memory. Insertion order stands in for recency.
#[derive(Debug, Clone, Default)]
pub struct DeclarativeMemory {
    chunks: Vec<Chunk>,
    index: HashMap<ChunkId, usize>,
}

impl DeclarativeMemory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, chunk: Chunk) -> Result<(), KernelError> {
        if self.index.contains_key(chunk.id()) {
            return Err(KernelError::DuplicateChunk(chunk.id().clone()));
        }
        self.index.insert(chunk.id().clone(), self.chunks.len());
        self.chunks.push(chunk);
        Ok(())
    }

    pub fn get(&self, id: &ChunkId) -> Option<&Chunk> {
        self.index.get(id).map(|&i| &self.chunks[i])
    }

    pub fn contains(&self, id: &ChunkId) -> bool {
        self.index.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    /// Chunks in insertion order, oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &Chunk> {
        self.chunks.iter()
    }

    /// Returns the matching chunk with the highest activation. Ties go to the
    /// most recently added chunk. Noise is drawn once per candidate, oldest
    /// candidate first.
    pub fn retrieve<R: Rng + ?Sized>(
        &self,
        request: &RetrievalRequest,
        goal: Option<&Chunk>,
        params: &ActivationParams,
        rng: &mut R,
    ) -> Result<Retrieved, RetrievalFailure> {
        let mut best: Option<(&Chunk, f64)> = None;
        for chunk in self.chunks.iter().filter(|c| request.matches(c)) {
            let a = activation(chunk, goal, params, rng);
            match best {
                Some((_, top)) if a < top => {}
                _ => best = Some((chunk, a)),
            }
        }
        let (chunk, activation) = best.ok_or(RetrievalFailure::NoMatch)?;
        if activation < params.retrieval_threshold() {
            return Err(RetrievalFailure::BelowThreshold {
                best: chunk.id().clone(),
                activation,
            });
        }
        Ok(Retrieved {
            chunk: chunk.clone(),
            activation,
        })
    }
}
