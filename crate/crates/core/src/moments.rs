//! Limiting *-moments of circular and semicircular variables, and Monte-Carlo
//! estimates of `φ_n(w) = n^{-1-k/2} E tr(M^{ε₁}⋯M^{ε_k})` for product ensembles.

use std::collections::BTreeMap;

use faer::{Mat, MatRef};
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{hermitize, trial_seed, ProductEnsemble};
use crate::error::{Error, Result};
use crate::partitions::{catalan, enumerate_nc2};
pub use crate::word::{Symbol, Word};

/// Largest `n · k` accepted by the Monte-Carlo estimators.
pub const MOMENT_COST_BUDGET: usize = 1 << 15;

/// `Σ_{π ∈ NC₂(k)} Π_{{r,s} ∈ π} (1 − δ_{ε_r, ε_s})`, and 0 for odd `k`.
pub fn circular_star_moment(w: &Word) -> Result<u64> {
    let k = w.len();
    if k > 16 {
        return Err(Error::budget(format!("circular *-moment of a word of length {k} > 16")));
    }
    if k % 2 == 1 {
        return Ok(0);
    }
    let count = enumerate_nc2(k)?
        .iter()
        .filter(|pi| pi.blocks().iter().all(|b| w.at(b[0]) != w.at(b[1])))
        .count();
    Ok(count as u64)
}

/// `C_{k/2}` for even `k`, 0 for odd `k`.
pub fn semicircle_moment(k: u32) -> u64 {
    assert!(k <= 32, "semicircle moment of order {k} > 32");
    if k % 2 == 1 {
        0
    } else {
        catalan(k / 2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarMomentEstimate {
    pub word: Word,
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    /// Sample standard deviation over trials divided by `√trials`.
    pub std_error: f64,
}

impl StarMomentEstimate {
    fn from_samples(word: Word, n: usize, samples: &[f64]) -> Self {
        let t = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / t;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (t - 1.0);
        StarMomentEstimate { word, n, trials: samples.len(), mean, std_error: (var / t).sqrt() }
    }

    /// `|mean − target| ≤ max(floor, 3·std_error)`.
    pub fn within(&self, target: f64, floor: f64) -> bool {
        (self.mean - target).abs() <= floor.max(3.0 * self.std_error)
    }
}

fn check_budget(n: usize, k: usize, trials: usize) -> Result<()> {
    if trials < 2 {
        return Err(Error::invalid("moment estimates need at least two trials"));
    }
    if n == 0 {
        return Err(Error::invalid("matrix dimension must be positive"));
    }
    if n.saturating_mul(k) > MOMENT_COST_BUDGET {
        return Err(Error::budget(format!(
            "n·k = {} exceeds the moment budget {MOMENT_COST_BUDGET}",
            n * k
        )));
    }
    Ok(())
}

fn normalization(n: usize, k: usize) -> f64 {
    (n as f64).powf(1.0 + k as f64 / 2.0)
}

/// Traces `tr(M^{ε₁}⋯M^{ε_k})` for every word, by explicit left-to-right products.
///
/// Words sharing a prefix share its partial products; at most `k − 1` partial
/// products are alive at once.
pub fn word_traces(m: MatRef<'_, f64>, words: &[Word]) -> Vec<f64> {
    let mut out = vec![0.0; words.len()];
    let entries: Vec<(usize, &[Symbol])> = words.iter().enumerate().map(|(i, w)| (i, w.symbols())).collect();
    traces_rec(m, None, 0, &entries, &mut out);
    out
}

fn factor(m: MatRef<'_, f64>, s: Symbol) -> MatRef<'_, f64> {
    match s {
        Symbol::Plain => m,
        Symbol::Star => m.transpose(),
    }
}

// tr(P · B) without forming the product
fn trace_of_product(p: MatRef<'_, f64>, b: MatRef<'_, f64>) -> f64 {
    let n = p.nrows();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            acc += p[(i, j)] * b[(j, i)];
        }
    }
    acc
}

fn traces_rec(
    m: MatRef<'_, f64>,
    prefix: Option<&Mat<f64>>,
    depth: usize,
    words: &[(usize, &[Symbol])],
    out: &mut [f64],
) {
    let mut groups: BTreeMap<Symbol, Vec<(usize, &[Symbol])>> = BTreeMap::new();
    for &(idx, syms) in words {
        let next = factor(m, syms[depth]);
        if syms.len() == depth + 1 {
            out[idx] = match prefix {
                Some(p) => trace_of_product(p.as_ref(), next),
                None => (0..m.nrows()).map(|i| m[(i, i)]).sum(),
            };
        } else {
            groups.entry(syms[depth]).or_default().push((idx, syms));
        }
    }
    for (s, group) in groups {
        let next = factor(m, s);
        let product = match prefix {
            Some(p) => p * next,
            None => next.to_owned(),
        };
        traces_rec(m, Some(&product), depth + 1, &group, out);
    }
}

/// Monte-Carlo estimate of `φ_n(w)` from `trials` independent realizations.
pub fn empirical_star_moment(
    ensemble: &ProductEnsemble,
    n: usize,
    w: &Word,
    trials: usize,
    seed: u64,
) -> Result<StarMomentEstimate> {
    Ok(empirical_star_moments(ensemble, n, std::slice::from_ref(w), trials, seed)?.remove(0))
}

/// Estimates for several words from the same realizations.
///
/// Words equal up to rotation or adjoint have equal traces for real matrices,
/// so each class is multiplied out once.
pub fn empirical_star_moments(
    ensemble: &ProductEnsemble,
    n: usize,
    words: &[Word],
    trials: usize,
    seed: u64,
) -> Result<Vec<StarMomentEstimate>> {
    let k_max = words.iter().map(Word::len).max().unwrap_or(0);
    if words.is_empty() {
        return Err(Error::invalid("no words to estimate"));
    }
    check_budget(n, k_max, trials)?;

    let mut canon: Vec<Word> = words.iter().map(Word::trace_canonical).collect();
    canon.sort();
    canon.dedup();
    let class_of: Vec<usize> = words
        .iter()
        .map(|w| canon.binary_search(&w.trace_canonical()).expect("canonical word present"))
        .collect();

    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let m = ensemble.sample(n, trial_seed(seed, t));
            word_traces(m.entries.as_ref(), &canon)
        })
        .collect();

    Ok(words
        .iter()
        .zip(&class_of)
        .map(|(w, &c)| {
            let norm = normalization(n, w.len());
            let samples: Vec<f64> = per_trial.iter().map(|tr| tr[c] / norm).collect();
            StarMomentEstimate::from_samples(w.clone(), n, &samples)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricMomentEstimate {
    pub k: u32,
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub std_error: f64,
}

impl SymmetricMomentEstimate {
    pub fn within(&self, target: f64, floor: f64) -> bool {
        (self.mean - target).abs() <= floor.max(3.0 * self.std_error)
    }
}

/// `n^{-1-k/2} E tr(H^k)` for `H = (M + Mᵀ)/√2`, the symmetric Toeplitz ⊙ Hankel
/// model when `M` is Toeplitz ⊙ Hankel.
pub fn symmetric_moment(
    ensemble: &ProductEnsemble,
    n: usize,
    k: u32,
    trials: usize,
    seed: u64,
) -> Result<SymmetricMomentEstimate> {
    Ok(symmetric_moments(ensemble, n, &[k], trials, seed)?.remove(0))
}

/// Several even orders from the same realizations.
pub fn symmetric_moments(
    ensemble: &ProductEnsemble,
    n: usize,
    ks: &[u32],
    trials: usize,
    seed: u64,
) -> Result<Vec<SymmetricMomentEstimate>> {
    if let Some(&bad) = ks.iter().find(|&&k| k == 0 || k % 2 == 1 || k > 8) {
        return Err(Error::invalid(format!("symmetric moment order must be even in 2..=8, got {bad}")));
    }
    let k_max = ks.iter().copied().max().ok_or_else(|| Error::invalid("no moment orders"))?;
    check_budget(n, k_max as usize, trials)?;

    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let h = hermitize(&ensemble.sample(n, trial_seed(seed, t)));
            // tr(H^k) = ‖H^{k/2}‖_F² for symmetric H
            let mut powers: Vec<Mat<f64>> = vec![h.clone()];
            for _ in 1..k_max / 2 {
                let next = powers.last().expect("nonempty") * &h;
                powers.push(next);
            }
            ks.iter()
                .map(|&k| {
                    let p = &powers[(k / 2 - 1) as usize];
                    let mut acc = 0.0;
                    for j in 0..n {
                        for i in 0..n {
                            acc += p[(i, j)] * p[(i, j)];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();

    Ok(ks
        .iter()
        .enumerate()
        .map(|(slot, &k)| {
            let norm = normalization(n, k as usize);
            let samples: Vec<f64> = per_trial.iter().map(|tr| tr[slot] / norm).collect();
            let est = StarMomentEstimate::from_samples(Word::alternating(1), n, &samples);
            SymmetricMomentEstimate { k, n, trials, mean: est.mean, std_error: est.std_error }
        })
        .collect())
}
