use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::KernelError;

/// Identifier of a chunk in declarative memory.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChunkId(String);

impl ChunkId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ChunkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ChunkId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

/// A slot value: a symbol, a number, or a reference to another chunk.
///
/// Chunk references in the goal chunk are the sources of spreading activation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Symbol(String),
    Number(f64),
    Chunk(ChunkId),
}

impl Value {
    pub fn symbol(s: impl Into<String>) -> Self {
        Value::Symbol(s.into())
    }

    pub fn chunk(id: impl Into<String>) -> Self {
        Value::Chunk(ChunkId::new(id))
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Value::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_chunk(&self) -> Option<&ChunkId> {
        match self {
            Value::Chunk(id) => Some(id),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Symbol(s) => f.write_str(s),
            Value::Number(n) => write!(f, "{n}"),
            Value::Chunk(id) => write!(f, "#{id}"),
        }
    }
}

/// A typed attribute-value fact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chunk {
    id: ChunkId,
    chunk_type: String,
    slots: BTreeMap<String, Value>,
    base_activation: f64,
}

impl Chunk {
    pub fn new(id: impl Into<String>, chunk_type: impl Into<String>) -> Result<Self, KernelError> {
        let chunk_type = chunk_type.into();
        let id = ChunkId::new(id);
        if chunk_type.is_empty() {
            return Err(KernelError::EmptyChunkType(id));
        }
        Ok(Self {
            id,
            chunk_type,
            slots: BTreeMap::new(),
            base_activation: 0.0,
        })
    }

    /// Builder-style slot setter. Overwrites an existing slot of the same name.
    pub fn with_slot(mut self, name: impl Into<String>, value: Value) -> Self {
        self.slots.insert(name.into(), value);
        self
    }

    pub fn with_base_activation(mut self, base: f64) -> Result<Self, KernelError> {
        if !base.is_finite() {
            return Err(KernelError::NonFinite(format!("base activation of {}", self.id)));
        }
        self.base_activation = base;
        Ok(self)
    }

    pub fn id(&self) -> &ChunkId {
        &self.id
    }

    pub fn chunk_type(&self) -> &str {
        &self.chunk_type
    }

    pub fn slots(&self) -> &BTreeMap<String, Value> {
        &self.slots
    }

    pub fn slot(&self, name: &str) -> Option<&Value> {
        self.slots.get(name)
    }

    pub fn set_slot(&mut self, name: impl Into<String>, value: Value) {
        self.slots.insert(name.into(), value);
    }

    pub fn base_activation(&self) -> f64 {
        self.base_activation
    }

    /// Chunk-valued slots, in slot-name order. These are the activation sources
    /// when this chunk sits in the goal buffer.
    pub fn chunk_references(&self) -> impl Iterator<Item = &ChunkId> {
        self.slots.values().filter_map(Value::as_chunk)
    }
}
