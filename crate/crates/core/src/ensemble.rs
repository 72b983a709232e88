//! Patterned random matrices `A = ((x_{L(i,j)}))`, their Schur–Hadamard
//! products `M = X ⊙ Y`, and the hermitization `(M + Mᵀ)/√2`.
//!
//! Draws are keyed by link value rather than by sampling order: the input
//! variable `x_α` is the first draw of the ChaCha8 stream selected by hashing
//! `α`, under a key expanded from the matrix seed. The same seed therefore
//! reproduces the same `x_α` at every `n`, and matrices of different sizes
//! agree on their shared cells.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkfn::{LinkFunction, LinkValue};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Zero-mean, unit-variance input laws with moments of all orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryDistribution {
    #[serde(rename = "gaussian")]
    StandardGaussian,
    Rademacher,
    /// Uniform on `[−√3, √3]`.
    #[serde(rename = "uniform")]
    UniformCentered,
}

impl EntryDistribution {
    pub const ALL: [EntryDistribution; 3] = [
        EntryDistribution::StandardGaussian,
        EntryDistribution::Rademacher,
        EntryDistribution::UniformCentered,
    ];

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            EntryDistribution::StandardGaussian => StandardNormal.sample(rng),
            EntryDistribution::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryDistribution::UniformCentered => Uniform::new_inclusive(-SQRT_3, SQRT_3)
                .expect("finite bounds")
                .sample(rng),
        }
    }

    /// `E x^m`, exact.
    pub fn moment(self, m: u32) -> f64 {
        if m % 2 == 1 {
            return 0.0;
        }
        match self {
            // (m − 1)!!
            EntryDistribution::StandardGaussian => (1..m).step_by(2).map(f64::from).product(),
            EntryDistribution::Rademacher => 1.0,
            // 3^{m/2} / (m + 1)
            EntryDistribution::UniformCentered => 3f64.powi((m / 2) as i32) / f64::from(m + 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EntryDistribution::StandardGaussian => "gaussian",
            EntryDistribution::Rademacher => "rademacher",
            EntryDistribution::UniformCentered => "uniform",
        }
    }
}

impl fmt::Display for EntryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntryDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(EntryDistribution::StandardGaussian),
            "rademacher" => Ok(EntryDistribution::Rademacher),
            "uniform" => Ok(EntryDistribution::UniformCentered),
            other => Err(Error::parse(format!("unknown entry distribution {other:?}"))),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic child seed, e.g. per trial or per factor of a product.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(base) ^ tag.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

fn value_stream(value: &[i64]) -> u64 {
    value
        .iter()
        .fold(splitmix64(value.len() as u64), |h, &c| splitmix64(h ^ c as u64))
}

/// Keyed source of the input variables `{x_α}` for one seed and one law.
#[derive(Clone)]
pub struct KeyedDraws {
    base: ChaCha8Rng,
    dist: EntryDistribution,
}

impl KeyedDraws {
    pub fn new(seed: u64, dist: EntryDistribution) -> Self {
        KeyedDraws { base: ChaCha8Rng::seed_from_u64(seed), dist }
    }

    /// `x_α` for link value `α`.
    pub fn draw(&self, value: &[i64]) -> f64 {
        let mut rng = self.base.clone();
        rng.set_stream(value_stream(value));
        self.dist.sample(&mut rng)
    }
}

/// `n × n` matrix with `entries[i][j] = x_{L(i,j)}`.
#[derive(Debug, Clone)]
pub struct PatternedMatrix {
    pub n: usize,
    pub link: LinkFunction,
    pub entries: Mat<f64>,
    pub seed: u64,
    pub dist: EntryDistribution,
}

impl PatternedMatrix {
    /// Wraps externally built entries after checking pattern consistency.
    pub fn from_parts(link: LinkFunction, dist: EntryDistribution, seed: u64, entries: Mat<f64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::DimensionMismatch { left: n, right: entries.ncols() });
        }
        let mut seen: HashMap<LinkValue, f64> = HashMap::new();
        for i in 0..n {
            for j in 0..n {
                let v = entries[(i, j)];
                let prev = *seen.entry(link.eval(i + 1, j + 1)).or_insert(v);
                if prev.to_bits() != v.to_bits() {
                    return Err(Error::invalid(format!(
                        "entries break the {} pattern at ({}, {})",
                        link.name(),
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(PatternedMatrix { n, link, entries, seed, dist })
    }

    /// 1-based entry access.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i - 1, j - 1)]
    }
}

/// One i.i.d. draw per distinct link value on `[1,n]²`.
pub fn sample_patterned(link: &LinkFunction, dist: EntryDistribution, n: usize, seed: u64) -> PatternedMatrix {
    assert!(n >= 1, "matrix dimension must be positive");
    let draws = KeyedDraws::new(seed, dist);
    let mut cache: HashMap<LinkValue, f64> = HashMap::new();
    let mut entries = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let value = link.eval(i + 1, j + 1);
            let x = match cache.get(&value) {
                Some(&x) => x,
                None => {
                    let x = draws.draw(&value);
                    cache.insert(value, x);
                    x
                }
            };
            entries[(i, j)] = x;
        }
    }
    PatternedMatrix { n, link: link.clone(), entries, seed, dist }
}

/// `M = X ⊙ Y` with the metadata of both factors.
#[derive(Debug, Clone)]
pub struct ProductMatrix {
    pub n: usize,
    pub lx: LinkFunction,
    pub ly: LinkFunction,
    pub entries: Mat<f64>,
    pub seeds: (u64, u64),
    pub dists: (EntryDistribution, EntryDistribution),
}

impl ProductMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i - 1, j - 1)]
    }
}

/// Elementwise product of two patterned matrices of equal size.
///
/// The factors must carry different seeds: equal seeds make `x_α` and `y_α`
/// identical, which breaks the independence of the two input families.
pub fn schur_hadamard(a: &PatternedMatrix, b: &PatternedMatrix) -> Result<ProductMatrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { left: a.n, right: b.n });
    }
    if a.seed == b.seed {
        return Err(Error::invalid("Schur-Hadamard factors must be sampled with distinct seeds"));
    }
    let n = a.n;
    let entries = Mat::from_fn(n, n, |i, j| a.entries[(i, j)] * b.entries[(i, j)]);
    Ok(ProductMatrix {
        n,
        lx: a.link.clone(),
        ly: b.link.clone(),
        entries,
        seeds: (a.seed, b.seed),
        dists: (a.dist, b.dist),
    })
}

/// `(M + Mᵀ)/√2`, symmetric to exact floating-point equality.
pub fn hermitize(m: &ProductMatrix) -> Mat<f64> {
    let n = m.n;
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let v = (m.entries[(i, j)] + m.entries[(j, i)]) * scale;
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// A product ensemble: two link functions and two entry laws.
#[derive(Debug, Clone)]
pub struct ProductEnsemble {
    pub lx: LinkFunction,
    pub ly: LinkFunction,
    pub dist_x: EntryDistribution,
    pub dist_y: EntryDistribution,
}

impl ProductEnsemble {
    pub fn new(lx: LinkFunction, ly: LinkFunction, dist_x: EntryDistribution, dist_y: EntryDistribution) -> Self {
        ProductEnsemble { lx, ly, dist_x, dist_y }
    }

    /// The factor seeds used for a realization with base seed `seed`.
    pub fn factor_seeds(seed: u64) -> (u64, u64) {
        (derive_seed(seed, 0x58), derive_seed(seed, 0x59))
    }

    pub fn sample(&self, n: usize, seed: u64) -> ProductMatrix {
        let (sx, sy) = Self::factor_seeds(seed);
        let x = sample_patterned(&self.lx, self.dist_x, n, sx);
        let y = sample_patterned(&self.ly, self.dist_y, n, sy);
        schur_hadamard(&x, &y).expect("factors share n and have distinct seeds")
    }

    /// `M_{ij}` alone, without materializing the matrix.
    pub fn entry(&self, draws: &(KeyedDraws, KeyedDraws), i: usize, j: usize) -> f64 {
        draws.0.draw(&self.lx.eval(i, j)) * draws.1.draw(&self.ly.eval(i, j))
    }

    pub fn keyed_draws(&self, seed: u64) -> (KeyedDraws, KeyedDraws) {
        let (sx, sy) = Self::factor_seeds(seed);
        (KeyedDraws::new(sx, self.dist_x), KeyedDraws::new(sy, self.dist_y))
    }
}

/// Seed of trial `t` under base seed `seed`.
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    derive_seed(seed, 0x1000_0000 + t as u64)
}

pub type CellPair = ((usize, usize), (usize, usize));

/// Sample covariance of `M_{ij}` and `M_{i'j'}` over independent realizations.
pub fn entry_covariance_probe(
    ensemble: &ProductEnsemble,
    n: usize,
    pairs: &[CellPair],
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if trials < 100 {
        return Err(Error::invalid("covariance probe needs at least 100 trials"));
    }
    let in_range = |&(i, j): &(usize, usize)| (1..=n).contains(&i) && (1..=n).contains(&j);
    if let Some(bad) = pairs.iter().find(|(a, b)| !in_range(a) || !in_range(b)) {
        return Err(Error::invalid(format!("cell pair {bad:?} outside [1,{n}]")));
    }
    let mut sums = vec![(0.0f64, 0.0f64, 0.0f64); pairs.len()];
    for t in 0..trials {
        let draws = ensemble.keyed_draws(trial_seed(seed, t));
        for (acc, &((i, j), (i2, j2))) in sums.iter_mut().zip(pairs) {
            let a = ensemble.entry(&draws, i, j);
            let b = ensemble.entry(&draws, i2, j2);
            acc.0 += a;
            acc.1 += b;
            acc.2 += a * b;
        }
    }
    let t = trials as f64;
    Ok(sums
        .into_iter()
        .map(|(sa, sb, sab)| (sab - sa * sb / t) / (t - 1.0))
        .collect())
}

/// Row-major CSV with 17 significant digits.
pub fn write_matrix_csv<W: Write + ?Sized>(m: &Mat<f64>, out: &mut W) -> io::Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
