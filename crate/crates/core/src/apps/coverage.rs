//! Set functions over ground sets of at most 64 elements, and weighted coverage functions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framework::SimRng;

/// A set function on `{0, …, n−1}` evaluated on bitmasks, with values in `[0, 1]`.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;
    fn eval_set(&self, set: u64) -> f64;
    fn describe(&self) -> String;
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CoverageSpec {
    weights: Vec<f64>,
    sets: Vec<Vec<usize>>,
}

/// `f(S) = w(∪_{j∈S} A_j) / w(U)`: the normalised weight of the universe items covered by `S`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "CoverageSpec", into = "CoverageSpec")]
pub struct CoverageFunction {
    weights: Vec<f64>,
    sets: Vec<Vec<usize>>,
    masks: Vec<u64>,
    total: f64,
}

impl TryFrom<CoverageSpec> for CoverageFunction {
    type Error = Error;

    fn try_from(spec: CoverageSpec) -> Result<Self> {
        CoverageFunction::new(spec.weights, spec.sets)
    }
}

impl From<CoverageFunction> for CoverageSpec {
    fn from(f: CoverageFunction) -> Self {
        CoverageSpec { weights: f.weights, sets: f.sets }
    }
}

impl CoverageFunction {
    /// `weights[u]` is the weight of universe item `u`; `sets[j]` lists the items element `j` covers.
    pub fn new(weights: Vec<f64>, sets: Vec<Vec<usize>>) -> Result<Self> {
        if weights.is_empty() || weights.len() > 64 {
            return Err(Error::BadParams(format!("universe size {} not in 1..=64", weights.len())));
        }
        if sets.is_empty() || sets.len() > 64 {
            return Err(Error::BadParams(format!("ground set size {} not in 1..=64", sets.len())));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::BadParams("negative item weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::BadParams("zero total weight".into()));
        }
        let mut masks = Vec::with_capacity(sets.len());
        for set in &sets {
            let mut mask = 0u64;
            for &u in set {
                if u >= weights.len() {
                    return Err(Error::BadParams(format!("item {u} outside the universe")));
                }
                mask |= 1 << u;
            }
            masks.push(mask);
        }
        Ok(Self { weights, sets, masks, total })
    }

    /// Random instance: item weights uniform on `(0, 1]`, each element covers each item
    /// independently with probability `density`.
    pub fn random(n: usize, universe: usize, density: f64, rng: &mut SimRng) -> Self {
        let weights: Vec<f64> = (0..universe).map(|_| 1.0 - rng.gen::<f64>()).collect();
        let sets: Vec<Vec<usize>> = (0..n)
            .map(|_| (0..universe).filter(|_| rng.gen::<f64>() < density).collect())
            .collect();
        Self::new(weights, sets).expect("random coverage parameters are valid")
    }

    /// Same items and weights, elements relabelled so that new element `j` is old `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let sets = perm.iter().map(|&j| self.sets[j].clone()).collect();
        Self::new(self.weights.clone(), sets).expect("permutation of a valid instance")
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn covered(&self, set: u64) -> u64 {
        let mut bits = set;
        let mut cover = 0u64;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if let Some(m) = self.masks.get(j) {
                cover |= m;
            }
        }
        cover
    }
}

impl SetFunction for CoverageFunction {
    fn ground_size(&self) -> usize {
        self.sets.len()
    }

    fn eval_set(&self, set: u64) -> f64 {
        let mut cover = self.covered(set);
        let mut acc = 0.0;
        while cover != 0 {
            let u = cover.trailing_zeros() as usize;
            cover &= cover - 1;
            acc += self.weights[u];
        }
        (acc / self.total).min(1.0)
    }

    fn describe(&self) -> String {
        serde_json::to_string(self).expect("coverage serialises")
    }
}
