//! Eigenvalues of `n^{-1/2} M_n` and summaries of the empirical spectral
//! measure against the uniform law on the unit disk.
//!
//! All statistics here are diagnostics for the open circular-law question for
//! these products; nothing in this module claims convergence.

use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use faer::{MatRef, Side};
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{hermitize, trial_seed, ProductEnsemble};
use crate::error::{Error, Result};

pub use faer::c64;

pub const SPECTRUM_MAX_N: usize = 4096;
pub const DEFAULT_FIGURE_N: usize = 1000;
pub const DISK_RADII: [f64; 3] = [1.0, 1.05, 1.1];
pub const ANGULAR_BINS: usize = 16;

fn check_size(n: usize, allow_large: bool) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("matrix must be nonempty"));
    }
    if n > SPECTRUM_MAX_N && !allow_large {
        return Err(Error::budget(format!(
            "n = {n} exceeds the dense eigenvalue budget {SPECTRUM_MAX_N}; pass --allow-large to proceed"
        )));
    }
    Ok(())
}

/// All `n` eigenvalues of a real square matrix, with multiplicity.
pub fn eigenvalues(m: MatRef<'_, f64>) -> Result<Vec<c64>> {
    eigenvalues_with_budget(m, false)
}

pub fn eigenvalues_with_budget(m: MatRef<'_, f64>, allow_large: bool) -> Result<Vec<c64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { left: m.nrows(), right: m.ncols() });
    }
    check_size(m.nrows(), allow_large)?;
    if (0..m.ncols()).any(|j| (0..m.nrows()).any(|i| !m[(i, j)].is_finite())) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let eigs = m.eigenvalues().map_err(|e| Error::Solver(format!("{e:?}")))?;
    if eigs.len() != m.nrows() || eigs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Solver("eigenvalue solver returned non-finite values".into()));
    }
    Ok(eigs)
}

/// Eigenvalues of a symmetric matrix, in nondecreasing order.
pub fn symmetric_eigenvalues(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { left: m.nrows(), right: m.ncols() });
    }
    check_size(m.nrows(), false)?;
    let eigs = m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Solver(format!("{e:?}")))?;
    if eigs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Solver("eigenvalue solver returned non-finite values".into()));
    }
    Ok(eigs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumStats {
    pub n: usize,
    #[serde(skip)]
    pub eigenvalues: Vec<c64>,
    pub mean_abs_sq: f64,
    pub disk_fraction_1: f64,
    pub disk_fraction_1_05: f64,
    pub disk_fraction_1_1: f64,
    /// Kolmogorov–Smirnov distance between the empirical CDF of `|λ|` and `min(r², 1)`.
    pub radial_ks: f64,
    /// Largest deviation of the 16-bin angular histogram (as fractions) from `1/16`.
    pub angular_max_dev: f64,
    pub spectral_radius: f64,
}

impl SpectrumStats {
    /// Fraction of eigenvalues with `|λ| ≤ r`.
    pub fn disk_fraction(&self, r: f64) -> f64 {
        let inside = self.eigenvalues.iter().filter(|z| z.norm() <= r).count();
        inside as f64 / self.eigenvalues.len() as f64
    }
}

/// Statistics of `{scale · λ}`.
pub fn esm_stats(eigs: &[c64], scale: f64) -> Result<SpectrumStats> {
    if eigs.is_empty() {
        return Err(Error::invalid("no eigenvalues"));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid(format!("scale must be positive, got {scale}")));
    }
    let scaled: Vec<c64> = eigs.iter().map(|z| c64::new(z.re * scale, z.im * scale)).collect();
    let total = scaled.len() as f64;
    let mut radii: Vec<f64> = scaled.iter().map(|z| z.norm()).collect();
    radii.sort_by(f64::total_cmp);

    let mean_abs_sq = radii.iter().map(|r| r * r).sum::<f64>() / total;
    let fraction = |r: f64| radii.partition_point(|&x| x <= r) as f64 / total;
    let radial_ks = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let f = (r * r).min(1.0);
            (((i + 1) as f64 / total) - f).abs().max((f - i as f64 / total).abs())
        })
        .fold(0.0, f64::max);

    let mut bins = [0usize; ANGULAR_BINS];
    for z in &scaled {
        let t = (z.im.atan2(z.re) + PI) / (2.0 * PI);
        bins[((t * ANGULAR_BINS as f64) as usize).min(ANGULAR_BINS - 1)] += 1;
    }
    let angular_max_dev = bins
        .iter()
        .map(|&c| (c as f64 / total - 1.0 / ANGULAR_BINS as f64).abs())
        .fold(0.0, f64::max);

    Ok(SpectrumStats {
        n: scaled.len(),
        mean_abs_sq,
        disk_fraction_1: fraction(DISK_RADII[0]),
        disk_fraction_1_05: fraction(DISK_RADII[1]),
        disk_fraction_1_1: fraction(DISK_RADII[2]),
        radial_ks,
        angular_max_dev,
        spectral_radius: radii.last().copied().unwrap_or(0.0),
        eigenvalues: scaled,
    })
}

/// Schur's inequality `Σ|λ_i|² ≤ ‖A‖_F²`; the gap measures non-normality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchurProbe {
    pub sum_abs_sq: f64,
    pub frobenius_sq: f64,
    pub gap: f64,
    pub holds: bool,
}

pub fn schur_probe(m: MatRef<'_, f64>, eigs: &[c64]) -> SchurProbe {
    let sum_abs_sq: f64 = eigs.iter().map(|z| z.re * z.re + z.im * z.im).sum();
    let mut frobenius_sq = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            frobenius_sq += m[(i, j)] * m[(i, j)];
        }
    }
    let gap = frobenius_sq - sum_abs_sq;
    SchurProbe { sum_abs_sq, frobenius_sq, gap, holds: gap >= -1e-8 * frobenius_sq.max(1.0) }
}

/// Eigenvalues of `n^{-1/2} M_n` for one realization.
pub fn sample_spectrum(ensemble: &ProductEnsemble, n: usize, seed: u64, allow_large: bool) -> Result<SpectrumStats> {
    check_size(n, allow_large)?;
    let m = ensemble.sample(n, seed);
    let eigs = eigenvalues_with_budget(m.entries.as_ref(), allow_large)?;
    esm_stats(&eigs, 1.0 / (n as f64).sqrt())
}

/// Spectra of `trials` independent realizations, solved in parallel and
/// returned in trial order.
pub fn sample_spectra(ensemble: &ProductEnsemble, n: usize, trials: usize, seed: u64) -> Result<Vec<SpectrumStats>> {
    check_size(n, false)?;
    (0..trials).into_par_iter().map(|t| sample_spectrum(ensemble, n, trial_seed(seed, t), false)).collect()
}

/// Real spectrum of `n^{-1/2} (M + Mᵀ)/√2`.
pub fn hermitized_spectrum(ensemble: &ProductEnsemble, n: usize, seed: u64) -> Result<Vec<f64>> {
    check_size(n, false)?;
    let h = hermitize(&ensemble.sample(n, seed));
    let scale = 1.0 / (n as f64).sqrt();
    Ok(symmetric_eigenvalues(h.as_ref())?.into_iter().map(|x| x * scale).collect())
}

/// Empirical moment `(1/n) Σ λ_i^k` of a real spectrum.
pub fn empirical_moment(eigs: &[f64], k: i32) -> f64 {
    eigs.iter().map(|x| x.powi(k)).sum::<f64>() / eigs.len() as f64
}

/// The scaled eigenvalue cloud of one realization, ready for plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureData {
    pub link_x: String,
    pub link_y: String,
    pub dist_x: String,
    pub dist_y: String,
    pub seed: u64,
    pub stats: SpectrumStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsSidecar {
    pub n: usize,
    pub seed: u64,
    pub mean_abs_sq: f64,
    pub disk_fraction_1: f64,
    pub disk_fraction_1_05: f64,
    pub disk_fraction_1_1: f64,
    pub radial_ks: f64,
    pub angular_max_dev: f64,
    pub spectral_radius: f64,
    pub label: &'static str,
}

pub fn figure_data(ensemble: &ProductEnsemble, n: usize, seed: u64, allow_large: bool) -> Result<FigureData> {
    let stats = sample_spectrum(ensemble, n, seed, allow_large)?;
    Ok(FigureData {
        link_x: ensemble.lx.name().to_string(),
        link_y: ensemble.ly.name().to_string(),
        dist_x: ensemble.dist_x.name().to_string(),
        dist_y: ensemble.dist_y.name().to_string(),
        seed,
        stats,
    })
}

impl FigureData {
    pub fn sidecar(&self) -> StatsSidecar {
        let s = &self.stats;
        StatsSidecar {
            n: s.n,
            seed: self.seed,
            mean_abs_sq: s.mean_abs_sq,
            disk_fraction_1: s.disk_fraction_1,
            disk_fraction_1_05: s.disk_fraction_1_05,
            disk_fraction_1_1: s.disk_fraction_1_1,
            radial_ks: s.radial_ks,
            angular_max_dev: s.angular_max_dev,
            spectral_radius: s.spectral_radius,
            label: "diagnostic",
        }
    }

    /// `re,im` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "re,im")?;
        for z in &self.stats.eigenvalues {
            writeln!(out, "{:.16e},{:.16e}", z.re, z.im)?;
        }
        Ok(())
    }

    /// Writes the CSV to `path` and the stats to `path` with extension `stats.json`.
    pub fn write_files(&self, path: &Path) -> io::Result<PathBuf> {
        let mut csv = io::BufWriter::new(fs::File::create(path)?);
        self.write_csv(&mut csv)?;
        csv.flush()?;
        let sidecar = path.with_extension("stats.json");
        fs::write(&sidecar, serde_json::to_string_pretty(&self.sidecar())? + "\n")?;
        Ok(sidecar)
    }
}
