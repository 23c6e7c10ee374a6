//! Oblivious adversaries: the whole function stream is drawn before the first round.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::config::{AdversaryKind, AdversarySpec};
use crate::error::Result;
use crate::framework::{split_rng, Objective, SharedObjective, SimRng};

/// Materialises `f_1..f_T`. `draw` samples a function from the application's family;
/// `shift` builds the second-phase function of a phase-shift stream from the first one.
/// Repeated functions share one allocation, which the benchmark uses to deduplicate.
pub fn generate_adversary<P, F, D, S>(
    spec: &AdversarySpec,
    horizon: usize,
    mut draw: D,
    shift: S,
) -> Result<Vec<SharedObjective<P>>>
where
    F: Objective<P> + 'static,
    D: FnMut(&mut SimRng) -> Result<F>,
    S: FnOnce(&F, &mut SimRng) -> Result<F>,
{
    let mut rng = split_rng(spec.seed, 7);
    Ok(match spec.kind {
        AdversaryKind::Iid => (0..horizon)
            .map(|_| draw(&mut rng).map(|f| Arc::new(f) as SharedObjective<P>))
            .collect::<Result<_>>()?,
        AdversaryKind::Alternating => {
            let a: SharedObjective<P> = Arc::new(draw(&mut rng)?);
            let b: SharedObjective<P> = Arc::new(draw(&mut rng)?);
            (0..horizon).map(|t| if t % 2 == 0 { a.clone() } else { b.clone() }).collect()
        }
        AdversaryKind::PhaseShift => {
            let first = draw(&mut rng)?;
            let second: SharedObjective<P> = Arc::new(shift(&first, &mut rng)?);
            let first: SharedObjective<P> = Arc::new(first);
            (0..horizon).map(|t| if t < horizon / 2 { first.clone() } else { second.clone() }).collect()
        }
    })
}

/// Fingerprint of a stream built from the functions' tags.
pub fn stream_hash<P>(stream: &[SharedObjective<P>]) -> u64 {
    let mut h = DefaultHasher::new();
    for f in stream {
        f.tag().hash(&mut h);
    }
    h.finish()
}

/// Distinct functions of a stream (by allocation) with their multiplicities, in order of
/// first appearance.
pub fn dedupe<P>(stream: &[SharedObjective<P>]) -> Vec<(SharedObjective<P>, usize)> {
    let mut index: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut out: Vec<(SharedObjective<P>, usize)> = Vec::new();
    for f in stream {
        let key = Arc::as_ptr(f) as *const () as usize;
        match index.get(&key) {
            Some(&i) => out[i].1 += 1,
            None => {
                index.insert(key, out.len());
                out.push((f.clone(), 1));
            }
        }
    }
    out
}
