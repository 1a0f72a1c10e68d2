use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{BufferName, Chunk, KernelError, Value};

/// A constant or a variable in a production.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Const(Value),
    Var(String),
}

impl Term {
    pub fn sym(s: &str) -> Self {
        Term::Const(Value::symbol(s))
    }

    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }
}

/// A test on one slot of a buffered chunk.
#[derive(Debug, Clone, PartialEq)]
pub enum SlotTest {
    /// Slot equals the constant, or binds / checks the variable.
    Is(Term),
    /// Slot is present and differs from the constant.
    IsNot(Value),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub buffer: BufferName,
    pub chunk_type: String,
    pub slots: Vec<(String, SlotTest)>,
}

impl Condition {
    pub fn new(buffer: BufferName, chunk_type: &str) -> Self {
        Self {
            buffer,
            chunk_type: chunk_type.to_string(),
            slots: Vec::new(),
        }
    }

    pub fn is(mut self, slot: &str, term: Term) -> Self {
        self.slots.push((slot.to_string(), SlotTest::Is(term)));
        self
    }

    pub fn is_sym(self, slot: &str, symbol: &str) -> Self {
        self.is(slot, Term::sym(symbol))
    }

    pub fn bind(self, slot: &str, var: &str) -> Self {
        self.is(slot, Term::var(var))
    }

    pub fn is_not(mut self, slot: &str, value: Value) -> Self {
        self.slots.push((slot.to_string(), SlotTest::IsNot(value)));
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    /// Places a fresh chunk in a buffer, replacing what was there.
    Write {
        buffer: BufferName,
        chunk_type: String,
        slots: Vec<(String, Term)>,
    },
    /// Changes slots of the chunk held in a buffer.
    Modify {
        buffer: BufferName,
        slots: Vec<(String, Term)>,
    },
    Clear(BufferName),
    /// Asks declarative memory for a chunk; the result lands in the retrieval buffer.
    Retrieve {
        chunk_type: String,
        slots: Vec<(String, Term)>,
    },
    /// Surfaces a directive to the caller of `step`.
    Emit {
        directive: String,
        args: Vec<(String, Term)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Production {
    pub name: String,
    pub priority: i32,
    pub conditions: Vec<Condition>,
    pub actions: Vec<Action>,
}

impl Production {
    pub fn new(name: &str, priority: i32) -> Self {
        Self {
            name: name.to_string(),
            priority,
            conditions: Vec::new(),
            actions: Vec::new(),
        }
    }

    pub fn when(mut self, condition: Condition) -> Self {
        self.conditions.push(condition);
        self
    }

    pub fn then(mut self, action: Action) -> Self {
        self.actions.push(action);
        self
    }

    /// Load-time checks: every action variable is bound by a condition, at
    /// most one retrieval request, and modified buffers are matched.
    pub fn validate(&self) -> Result<(), KernelError> {
        let mut bound = BTreeSet::new();
        let mut matched = BTreeSet::new();
        for c in &self.conditions {
            matched.insert(c.buffer);
            for (_, test) in &c.slots {
                if let SlotTest::Is(Term::Var(v)) = test {
                    bound.insert(v.as_str());
                }
            }
        }
        let mut retrievals = 0;
        for action in &self.actions {
            let terms: &[(String, Term)] = match action {
                Action::Write {
                    chunk_type, slots, ..
                } => {
                    if chunk_type.is_empty() {
                        return Err(KernelError::UntypedWrite(self.name.clone()));
                    }
                    slots
                }
                Action::Modify { buffer, slots } => {
                    if !matched.contains(buffer) {
                        return Err(KernelError::UnmatchedModify {
                            production: self.name.clone(),
                            buffer: *buffer,
                        });
                    }
                    slots
                }
                Action::Clear(_) => &[],
                Action::Retrieve { slots, .. } => {
                    retrievals += 1;
                    slots
                }
                Action::Emit { args, .. } => args,
            };
            for (_, term) in terms {
                if let Term::Var(v) = term {
                    if !bound.contains(v.as_str()) {
                        return Err(KernelError::UnboundVariable {
                            production: self.name.clone(),
                            variable: v.clone(),
                        });
                    }
                }
            }
        }
        if retrievals > 1 {
            return Err(KernelError::MultipleRetrievals(self.name.clone()));
        }
        Ok(())
    }
}

pub(crate) type Bindings = BTreeMap<String, Value>;

/// Matches one condition against a buffered chunk, extending `bindings`.
pub(crate) fn match_condition(cond: &Condition, chunk: &Chunk, bindings: &mut Bindings) -> bool {
    if chunk.chunk_type() != cond.chunk_type {
        return false;
    }
    for (slot, test) in &cond.slots {
        let Some(value) = chunk.slot(slot) else {
            return false;
        };
        match test {
            SlotTest::Is(Term::Const(c)) => {
                if value != c {
                    return false;
                }
            }
            SlotTest::Is(Term::Var(v)) => match bindings.get(v) {
                Some(existing) if existing != value => return false,
                Some(_) => {}
                None => {
                    bindings.insert(v.clone(), value.clone());
                }
            },
            SlotTest::IsNot(c) => {
                if value == c {
                    return false;
                }
            }
        }
    }
    true
}

pub(crate) fn resolve(term: &Term, bindings: &Bindings) -> Value {
    match term {
        Term::Const(v) => v.clone(),
        // Validated at load time.
        Term::Var(v) => bindings[v].clone(),
    }
}

/// A directive emitted by a fired production.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Directive {
    pub name: String,
    pub args: Vec<(String, Value)>,
}

impl Directive {
    pub fn arg(&self, name: &str) -> Option<&Value> {
        self.args.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn symbol(&self, name: &str) -> Option<&str> {
        self.arg(name).and_then(Value::as_symbol)
    }
}
