use std::collections::BTreeMap;

use rand::Rng;

use super::{Chunk, ChunkId, KernelError};

/// Parameters of the activation equation
/// `A_i = B_i + sum_j W_j * S_ji + e`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationParams {
    source_weight_total: f64,
    associations: BTreeMap<ChunkId, BTreeMap<ChunkId, f64>>,
    noise_scale: f64,
    retrieval_threshold: f64,
}

impl Default for ActivationParams {
    fn default() -> Self {
        Self {
            source_weight_total: 1.0,
            associations: BTreeMap::new(),
            noise_scale: 0.0,
            retrieval_threshold: f64::NEG_INFINITY,
        }
    }
}

impl ActivationParams {
    pub fn new(source_weight_total: f64, noise_scale: f64) -> Result<Self, KernelError> {
        let mut p = Self::default();
        p.set_source_weight_total(source_weight_total)?;
        p.set_noise_scale(noise_scale)?;
        Ok(p)
    }

    pub fn set_source_weight_total(&mut self, total: f64) -> Result<(), KernelError> {
        if !total.is_finite() || total < 0.0 {
            return Err(KernelError::NonFinite(format!("source weight total {total}")));
        }
        self.source_weight_total = total;
        Ok(())
    }

    pub fn set_noise_scale(&mut self, scale: f64) -> Result<(), KernelError> {
        if !scale.is_finite() || scale < 0.0 {
            return Err(KernelError::NonFinite(format!("noise scale {scale}")));
        }
        self.noise_scale = scale;
        Ok(())
    }

    /// NaN is rejected; `-inf` means every match is retrievable.
    pub fn set_retrieval_threshold(&mut self, threshold: f64) -> Result<(), KernelError> {
        if threshold.is_nan() {
            return Err(KernelError::NonFinite("retrieval threshold NaN".into()));
        }
        self.retrieval_threshold = threshold;
        Ok(())
    }

    /// Sets `S_ji`, the strength of association from `source` to `target`.
    pub fn set_association(
        &mut self,
        source: ChunkId,
        target: ChunkId,
        strength: f64,
    ) -> Result<(), KernelError> {
        if !strength.is_finite() {
            return Err(KernelError::NonFinite(format!(
                "association {source} -> {target}"
            )));
        }
        self.associations.entry(source).or_default().insert(target, strength);
        Ok(())
    }

    pub fn association(&self, source: &ChunkId, target: &ChunkId) -> f64 {
        self.associations
            .get(source)
            .and_then(|targets| targets.get(target))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn source_weight_total(&self) -> f64 {
        self.source_weight_total
    }

    pub fn noise_scale(&self) -> f64 {
        self.noise_scale
    }

    pub fn retrieval_threshold(&self) -> f64 {
        self.retrieval_threshold
    }
}

/// Zero-mean logistic sample with scale `s`. Returns exactly 0 without drawing
/// when `s == 0`.
pub fn logistic_noise<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    if scale == 0.0 {
        return 0.0;
    }
    let mut u: f64 = rng.random();
    while u <= 0.0 {
        u = rng.random();
    }
    scale * (u / (1.0 - u)).ln()
}

/// Deterministic part of the activation: `B_i + sum_j W_j * S_ji`.
pub fn activation_without_noise(chunk: &Chunk, goal: Option<&Chunk>, params: &ActivationParams) -> f64 {
    let base = chunk.base_activation();
    let Some(goal) = goal else {
        return base;
    };
    let sources: Vec<&ChunkId> = goal.chunk_references().collect();
    if sources.is_empty() {
        return base;
    }
    let weight = params.source_weight_total / sources.len() as f64;
    base + sources
        .into_iter()
        .map(|j| weight * params.association(j, chunk.id()))
        .sum::<f64>()
}

/// Full activation of `chunk` in the context of `goal`, including noise.
pub fn activation<R: Rng + ?Sized>(
    chunk: &Chunk,
    goal: Option<&Chunk>,
    params: &ActivationParams,
    rng: &mut R,
) -> f64 {
    activation_without_noise(chunk, goal, params) + logistic_noise(params.noise_scale, rng)
}
