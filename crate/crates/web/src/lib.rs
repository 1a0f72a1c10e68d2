//! Browser bindings: an in-page dialogue, a view of the retrieval
//! activations behind it, and batch simulation.
//!
//! [`Demo`] holds the logic and is usable natively; [`WebDemo`] is the thin
//! `wasm-bindgen` wrapper that moves JSON strings across the boundary.

use std::sync::Arc;
use std::time::SystemTime;

use persuade_core::dialogue::ProfileChoice;
use persuade_core::kernel::{activation_without_noise, BufferName};
use persuade_core::pack::{covid19, ContentPack};
use persuade_core::session::{ServerMessage, Session, SessionSpec};
use persuade_core::sim::{builtin_mix, run_batch, BUILTIN_MIXES};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

pub struct Demo {
    pack: Arc<ContentPack>,
    session: Option<Session>,
}

impl Default for Demo {
    fn default() -> Self {
        Self::new()
    }
}

impl Demo {
    pub fn new() -> Self {
        Self {
            pack: Arc::new(covid19()),
            session: None,
        }
    }

    /// Starts a fresh dialogue; returns the agent's opening messages.
    pub fn start(&mut self, seed: u64, profile: &str) -> Result<Vec<ServerMessage>, String> {
        let profile: ProfileChoice =
            serde_json::from_value(Value::String(profile.into())).map_err(|e| e.to_string())?;
        let spec = SessionSpec {
            id: format!("demo-{seed}"),
            seed,
            profile,
            // wasm32 has no clock; the timestamp is not part of any digest.
            created_at: SystemTime::UNIX_EPOCH,
        };
        let (session, messages) = Session::start(self.pack.clone(), spec).map_err(|e| e.to_string())?;
        self.session = Some(session);
        Ok(messages)
    }

    pub fn choose(&mut self, option: &str) -> Result<Vec<ServerMessage>, String> {
        let session = self.session.as_mut().ok_or("no session started")?;
        Ok(session
            .submit_choice(option)
            .unwrap_or_else(|e| vec![e.to_message()]))
    }

    /// Chunks ranked by noise-free activation against the current goal.
    pub fn activations(&self, limit: usize) -> Result<Value, String> {
        let session = self.session.as_ref().ok_or("no session started")?;
        let kernel = session.engine().kernel();
        let goal = kernel.buffer(BufferName::Goal);
        let params = kernel.params();
        let mut rows: Vec<(f64, Value)> = kernel
            .memory()
            .iter()
            .map(|c| {
                let a = activation_without_noise(c, goal, params);
                let row = json!({
                    "id": c.id(),
                    "type": c.chunk_type(),
                    "base": c.base_activation(),
                    "spread": a - c.base_activation(),
                    "activation": a,
                });
                (a, row)
            })
            .collect();
        rows.sort_by(|a, b| b.0.total_cmp(&a.0));
        Ok(json!({
            "goal": goal,
            "sources": goal.map(|g| g.chunk_references().collect::<Vec<_>>()),
            "source_weight_total": params.source_weight_total(),
            "noise_scale": params.noise_scale(),
            "chunks": rows.into_iter().take(limit).map(|r| r.1).collect::<Vec<_>>(),
        }))
    }

    /// Runs `runs` scripted sessions from a built-in user mix.
    pub fn simulate(&self, mix: &str, runs: u32, seed: u64) -> Result<Value, String> {
        let mix = builtin_mix(mix)
            .ok_or_else(|| format!("unknown mix {mix}; try {}", BUILTIN_MIXES.join(", ")))?;
        let report = run_batch(self.pack.clone(), &mix, runs.into(), seed, ProfileChoice::Random)
            .map_err(|e| e.to_string())?;
        serde_json::from_str(&report.to_json()).map_err(|e| e.to_string())
    }
}

fn js<T: serde::Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    r.map(|v| serde_json::to_string(&v).expect("serializable"))
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct WebDemo(Demo);

#[wasm_bindgen]
impl WebDemo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> WebDemo {
        WebDemo(Demo::new())
    }

    /// JSON array of wire messages.
    pub fn start(&mut self, seed: u32, profile: &str) -> Result<String, JsError> {
        js(self.0.start(seed.into(), profile))
    }

    pub fn choose(&mut self, option: &str) -> Result<String, JsError> {
        js(self.0.choose(option))
    }

    pub fn activations(&self, limit: usize) -> Result<String, JsError> {
        js(self.0.activations(limit))
    }

    pub fn simulate(&self, mix: &str, runs: u32, seed: u32) -> Result<String, JsError> {
        js(self.0.simulate(mix, runs, seed.into()))
    }
}

impl Default for WebDemo {
    fn default() -> Self {
        Self::new()
    }
}
