use rand::Rng;

use super::PersuasiveTechnique;

/// Uniform draw over the enabled techniques.
///
/// Panics if `enabled` is empty; pack validation guarantees at least one.
pub fn choose_technique<R: Rng + ?Sized>(
    rng: &mut R,
    enabled: &[PersuasiveTechnique],
) -> PersuasiveTechnique {
    assert!(!enabled.is_empty(), "no technique enabled");
    enabled[rng.random_range(0..enabled.len())]
}
