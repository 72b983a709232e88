//! Exact counts of the index classes `[π]_{L_X,ε} ∩ [π']_{L_Y,ε} ⊂ [n]^k` that
//! make up the trace expansion of `φ_n`, and the scaling reports built on them.
//!
//! Two counting semantics are provided:
//!
//! * [`Semantics::Exact`]: the partition of `[k]` induced by the edge values
//!   `L^{ε_u}(i_u, i_{u+1})` must *equal* π. These classes partition `[n]^k`.
//! * [`Semantics::Closure`]: only the equalities demanded by π are imposed, so
//!   the induced partition is π or coarser. This is the solution set of the
//!   constraint system used in the killing-constraint arguments, and it
//!   contains the exact class.
//!
//! Counting is a depth-first search over `(i_1, …, i_k)` assigned in order.
//! When `i_{u+1}` is assigned the value of edge `u` is known; if edge `u` joins
//! an earlier block its admissible `i_{u+1}` are looked up in an inverted index
//! of the link table (at most Δ_L of them) instead of scanned.

use std::collections::HashMap;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::ensemble::ProductEnsemble;
use crate::error::{Error, Result};
use crate::linkfn::{pair_regularity, DeltaVerdict, LinkFunction, LinkValue};
use crate::moments::{empirical_star_moment, StarMomentEstimate};
use crate::partitions::{enumerate_pair_partitions, enumerate_set_partitions, Partition};
use crate::word::{Symbol, Word};

pub const COUNT_MAX_K: usize = 8;
pub const COUNT_MAX_N: usize = 128;
/// Fitted log-log slope at or below which a ratio series counts as decaying.
pub const DECAY_SLOPE_THRESHOLD: f64 = -0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Semantics {
    Exact,
    Closure,
}

/// Link values on `[1,n]²` interned to dense ids, with inverted row/column indices.
#[derive(Debug, Clone)]
pub struct LinkTable {
    n: usize,
    ids: Vec<u32>,
    // by_row[a][v] = { b : ids[a][b] = v },  by_col[a][v] = { b : ids[b][a] = v }
    by_row: Vec<HashMap<u32, Vec<u32>>>,
    by_col: Vec<HashMap<u32, Vec<u32>>>,
}

impl LinkTable {
    pub fn new(link: &LinkFunction, n: usize) -> LinkTable {
        let mut intern: HashMap<LinkValue, u32> = HashMap::new();
        let mut ids = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in 1..=n {
                let next = intern.len() as u32;
                ids.push(*intern.entry(link.eval(i, j)).or_insert(next));
            }
        }
        let mut by_row = vec![HashMap::<u32, Vec<u32>>::new(); n];
        let mut by_col = vec![HashMap::<u32, Vec<u32>>::new(); n];
        for a in 0..n {
            for b in 0..n {
                by_row[a].entry(ids[a * n + b]).or_default().push(b as u32);
                by_col[a].entry(ids[b * n + a]).or_default().push(b as u32);
            }
        }
        LinkTable { n, ids, by_row, by_col }
    }

    /// Id of `L^ε(a + 1, b + 1)` for 0-based `a, b`.
    #[inline]
    fn id(&self, eps: Symbol, a: u32, b: u32) -> u32 {
        let (a, b) = (a as usize, b as usize);
        match eps {
            Symbol::Plain => self.ids[a * self.n + b],
            Symbol::Star => self.ids[b * self.n + a],
        }
    }

    /// All 0-based `b` with `L^ε(a + 1, b + 1)` having id `v`.
    #[inline]
    fn solutions(&self, eps: Symbol, a: u32, v: u32) -> &[u32] {
        let index = match eps {
            Symbol::Plain => &self.by_row[a as usize],
            Symbol::Star => &self.by_col[a as usize],
        };
        index.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }
}

struct Layer<'a> {
    table: &'a LinkTable,
    // earlier edge in the same block (the block minimum), if any
    rep: Vec<Option<usize>>,
    // for a block-minimum edge, the minima of all earlier blocks
    earlier_minima: Vec<Vec<usize>>,
}

impl<'a> Layer<'a> {
    fn new(table: &'a LinkTable, pi: &Partition) -> Layer<'a> {
        let labels = pi.labels();
        let minima: Vec<usize> = pi.blocks().iter().map(|b| b[0] - 1).collect();
        let rep = labels
            .iter()
            .enumerate()
            .map(|(u, &b)| (minima[b] != u).then_some(minima[b]))
            .collect();
        let earlier_minima = (0..labels.len())
            .map(|u| minima.iter().copied().filter(|&m| m < u).collect())
            .collect();
        Layer { table, rep, earlier_minima }
    }
}

struct Search<'a> {
    n: usize,
    eps: &'a [Symbol],
    layers: Vec<Layer<'a>>,
    semantics: Semantics,
}

impl Search<'_> {
    fn k(&self) -> usize {
        self.eps.len()
    }

    // records the values of edge u in every layer and checks its constraints
    fn admit_edge(&self, u: usize, idx: &[u32], vals: &mut [Vec<u32>]) -> bool {
        let (a, b) = (idx[u], idx[(u + 1) % self.k()]);
        for (layer, lv) in self.layers.iter().zip(vals.iter_mut()) {
            let v = layer.table.id(self.eps[u], a, b);
            lv[u] = v;
            match layer.rep[u] {
                Some(r) => {
                    if lv[r] != v {
                        return false;
                    }
                }
                None => {
                    if self.semantics == Semantics::Exact
                        && layer.earlier_minima[u].iter().any(|&m| lv[m] == v)
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn count_from(&self, p: usize, idx: &mut [u32], vals: &mut [Vec<u32>]) -> u128 {
        let k = self.k();
        let edge = p - 1;
        let prev = idx[p - 1];
        let mut best: Option<&[u32]> = None;
        for (layer, lv) in self.layers.iter().zip(vals.iter()) {
            if let Some(r) = layer.rep[edge] {
                let cands = layer.table.solutions(self.eps[edge], prev, lv[r]);
                if best.is_none_or(|b| cands.len() < b.len()) {
                    best = Some(cands);
                }
            }
        }
        let full: Vec<u32>;
        let candidates: &[u32] = match best {
            Some(c) => c,
            None => {
                full = (0..self.n as u32).collect();
                &full
            }
        };
        let mut total = 0u128;
        for &b in candidates {
            idx[p] = b;
            if !self.admit_edge(edge, idx, vals) {
                continue;
            }
            if p == k - 1 {
                if self.admit_edge(k - 1, idx, vals) {
                    total += 1;
                }
            } else {
                total += self.count_from(p + 1, idx, vals);
            }
        }
        total
    }

    fn count(&self) -> u128 {
        let k = self.k();
        let layers = self.layers.len();
        (0..self.n as u32)
            .into_par_iter()
            .map(|a| {
                let mut idx = vec![0u32; k];
                let mut vals = vec![vec![0u32; k]; layers];
                idx[0] = a;
                if k == 1 {
                    u128::from(self.admit_edge(0, &idx, &mut vals))
                } else {
                    self.count_from(1, &mut idx, &mut vals)
                }
            })
            .sum()
    }
}

fn check_budget(k: usize, n: usize) -> Result<()> {
    if k > COUNT_MAX_K || n > COUNT_MAX_N {
        return Err(Error::budget(format!(
            "counting budget is k <= {COUNT_MAX_K}, n <= {COUNT_MAX_N}; got k = {k}, n = {n}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    Ok(())
}

/// Counts index tuples for one word and one `n`, reusing the link tables across partitions.
pub struct IndexCounter {
    n: usize,
    word: Word,
    tx: LinkTable,
    ty: LinkTable,
}

impl IndexCounter {
    pub fn new(lx: &LinkFunction, ly: &LinkFunction, word: &Word, n: usize) -> Result<IndexCounter> {
        check_budget(word.len(), n)?;
        Ok(IndexCounter { n, word: word.clone(), tx: LinkTable::new(lx, n), ty: LinkTable::new(ly, n) })
    }

    fn check(&self, pi: &Partition) -> Result<()> {
        if pi.ground_size() != self.word.len() {
            return Err(Error::invalid(format!(
                "partition {pi} is not a partition of [{}]",
                self.word.len()
            )));
        }
        Ok(())
    }

    /// `#([π_x]_X ∩ [π_y]_Y)` under the given semantics.
    pub fn count(&self, pi_x: &Partition, pi_y: &Partition, semantics: Semantics) -> Result<u128> {
        self.check(pi_x)?;
        self.check(pi_y)?;
        let search = Search {
            n: self.n,
            eps: self.word.symbols(),
            layers: vec![Layer::new(&self.tx, pi_x), Layer::new(&self.ty, pi_y)],
            semantics,
        };
        Ok(search.count())
    }

    /// `#[π]_X` for the first link alone.
    pub fn count_x(&self, pi: &Partition, semantics: Semantics) -> Result<u128> {
        self.check(pi)?;
        let search = Search { n: self.n, eps: self.word.symbols(), layers: vec![Layer::new(&self.tx, pi)], semantics };
        Ok(search.count())
    }
}

/// A fully specified counting problem.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub word: Word,
    pub pi_x: Partition,
    pub pi_y: Partition,
    pub lx: LinkFunction,
    pub ly: LinkFunction,
    pub n: usize,
}

impl ConstraintSystem {
    pub fn new(lx: LinkFunction, ly: LinkFunction, word: Word, pi_x: Partition, pi_y: Partition, n: usize) -> Result<Self> {
        let k = word.len();
        if pi_x.ground_size() != k || pi_y.ground_size() != k {
            return Err(Error::invalid(format!(
                "partitions {pi_x} and {pi_y} must both partition [{k}] to match word {word}"
            )));
        }
        Ok(ConstraintSystem { word, pi_x, pi_y, lx, ly, n })
    }
}

/// Exact class count: induced partitions equal `π_x` and `π_y`.
pub fn count_constrained(cs: &ConstraintSystem) -> Result<u128> {
    IndexCounter::new(&cs.lx, &cs.ly, &cs.word, cs.n)?.count(&cs.pi_x, &cs.pi_y, Semantics::Exact)
}

/// Solutions of the equalities of `π_x` (under `L_X`) and `π_y` (under `L_Y`).
pub fn count_satisfying(cs: &ConstraintSystem) -> Result<u128> {
    IndexCounter::new(&cs.lx, &cs.ly, &cs.word, cs.n)?.count(&cs.pi_x, &cs.pi_y, Semantics::Closure)
}

/// `#[π]_{L,ε}` for a single link.
pub fn count_single(link: &LinkFunction, pi: &Partition, w: &Word, n: usize) -> Result<u128> {
    check_budget(w.len(), n)?;
    if pi.ground_size() != w.len() {
        return Err(Error::invalid(format!("partition {pi} does not match word {w}")));
    }
    let table = LinkTable::new(link, n);
    let search = Search { n, eps: w.symbols(), layers: vec![Layer::new(&table, pi)], semantics: Semantics::Exact };
    Ok(search.count())
}

fn serialize_ratio<S: Serializer>(r: &Ratio<u128>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

fn as_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `Π_{{r,s} ∈ π} (1 − δ_{ε_r, ε_s})`: 1 iff every block joins a `1` with a `*`.
pub fn alternation_product(pi: &Partition, w: &Word) -> u64 {
    u64::from(pi.blocks().iter().all(|b| b.len() == 2 && w.at(b[0]) != w.at(b[1])))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRow {
    pub pi_x: Partition,
    pub pi_y: Partition,
    pub n: usize,
    /// Exact class count `#([π_x]_X ∩ [π_y]_Y)`.
    pub count: u128,
    /// Count of tuples satisfying the equalities of both partitions.
    pub closure_count: u128,
    #[serde(serialize_with = "serialize_ratio")]
    pub ratio: Ratio<u128>,
    pub ratio_f64: f64,
    #[serde(serialize_with = "serialize_ratio")]
    pub closure_ratio: Ratio<u128>,
    pub closure_ratio_f64: f64,
    pub predicted_limit: Option<u64>,
}

/// Least-squares slope of `ln(ratio)` against `ln(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// `None` when fewer than two positive ratios are available.
    pub slope: Option<f64>,
    pub decays: bool,
}

/// Fits the decay of a ratio series. A series that ends at exactly zero decays;
/// otherwise the fit uses the positive points and decays iff the slope is ≤ −0.8.
pub fn fit_decay(points: &[(usize, f64)]) -> DecayFit {
    let positive: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, r)| r > 0.0)
        .map(|&(n, r)| ((n as f64).ln(), r.ln()))
        .collect();
    let slope = (positive.len() >= 2).then(|| {
        let m = positive.len() as f64;
        let mx = positive.iter().map(|p| p.0).sum::<f64>() / m;
        let my = positive.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = positive.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = positive.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    });
    let ends_at_zero = points.last().is_some_and(|&(_, r)| r == 0.0);
    let decays = ends_at_zero || slope.is_some_and(|s| s <= DECAY_SLOPE_THRESHOLD);
    DecayFit { slope, decays }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSummary {
    pub pi_x: Partition,
    pub pi_y: Partition,
    pub noncrossing: bool,
    pub predicted_limit: u64,
    /// Closure ratio equals the predicted limit at every grid point.
    pub closure_exact: bool,
    pub closure_fit: DecayFit,
    pub class_fit: DecayFit,
    /// Decay of `|ratio − predicted|` for the exact classes.
    pub class_gap_fit: DecayFit,
    /// Behaviour inconsistent with the predicted limit.
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReportKind {
    JointCircularity,
    Compatibility,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub kind: ReportKind,
    pub link_x: String,
    pub link_y: String,
    pub word: Word,
    pub grid: Vec<usize>,
    /// Regularity problems of the link pair, listed before any row is read.
    pub assumption_flags: Vec<String>,
    pub rows: Vec<CountRow>,
    pub series: Vec<SeriesSummary>,
    /// Set when some ratio could not be formed exactly.
    pub float_fallback: bool,
}

impl CountReport {
    pub fn flagged(&self) -> Vec<&SeriesSummary> {
        self.series.iter().filter(|s| s.flagged).collect()
    }
}

fn check_report_inputs(w: &Word, grid: &[usize], max_len: usize) -> Result<()> {
    if w.len() % 2 == 1 {
        return Err(Error::invalid(format!("scaling reports need an even word, got {w}")));
    }
    if w.len() > max_len {
        return Err(Error::budget(format!("word length {} exceeds {max_len} for this report", w.len())));
    }
    if grid.is_empty() || grid.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::invalid("grid must be nonempty and strictly increasing"));
    }
    for &n in grid {
        check_budget(w.len(), n)?;
    }
    Ok(())
}

fn assumption_flags(lx: &LinkFunction, ly: &LinkFunction, grid: &[usize]) -> Vec<String> {
    let mut flags = Vec::new();
    if grid.len() >= 2 {
        if let Ok(reg) = pair_regularity(lx, ly, grid) {
            for (name, verdict) in reg.links.iter().zip(&reg.verdicts) {
                if *verdict == DeltaVerdict::GrowsWithN {
                    flags.push(format!("row/column multiplicity of {name} grows with n (unbounded Δ)"));
                }
            }
            if let Some(inj) = reg.injectivity.filter(|i| !i.injective) {
                flags.push(format!(
                    "joint map (L_X, L_Y) is not injective on [1,{}]²: {:?}",
                    inj.n, inj.counterexample
                ));
            }
        }
    }
    flags
}

struct RowBuilder {
    float_fallback: bool,
}

impl RowBuilder {
    fn row(&mut self, pi_x: &Partition, pi_y: &Partition, n: usize, count: u128, closure: u128, limit: Option<u64>) -> CountRow {
        let exponent = 1 + pi_x.ground_size() as u32 / 2;
        let (ratio, closure_ratio) = match (n as u128).checked_pow(exponent) {
            Some(den) => (Ratio::new(count, den), Ratio::new(closure, den)),
            None => {
                self.float_fallback = true;
                (Ratio::new(0, 1), Ratio::new(0, 1))
            }
        };
        let norm = (n as f64).powi(exponent as i32);
        let ratio_f64 = if self.float_fallback { count as f64 / norm } else { as_f64(&ratio) };
        let closure_ratio_f64 = if self.float_fallback { closure as f64 / norm } else { as_f64(&closure_ratio) };
        CountRow {
            pi_x: pi_x.clone(),
            pi_y: pi_y.clone(),
            n,
            count,
            closure_count: closure,
            ratio,
            ratio_f64,
            closure_ratio,
            closure_ratio_f64,
            predicted_limit: limit,
        }
    }
}

fn summarize(rows: &[CountRow], pi_x: &Partition, pi_y: &Partition, limit: u64) -> SeriesSummary {
    let series: Vec<&CountRow> = rows.iter().filter(|r| &r.pi_x == pi_x && &r.pi_y == pi_y).collect();
    let closure_pts: Vec<(usize, f64)> = series.iter().map(|r| (r.n, r.closure_ratio_f64)).collect();
    let class_pts: Vec<(usize, f64)> = series.iter().map(|r| (r.n, r.ratio_f64)).collect();
    let gap_pts: Vec<(usize, f64)> = series.iter().map(|r| (r.n, (r.ratio_f64 - limit as f64).abs())).collect();
    let closure_exact = series.iter().all(|r| r.closure_ratio == Ratio::from_integer(limit as u128));
    let closure_fit = fit_decay(&closure_pts);
    let class_fit = fit_decay(&class_pts);
    let class_gap_fit = fit_decay(&gap_pts);
    let flagged = if limit == 0 {
        !closure_fit.decays
    } else {
        !(closure_exact || class_gap_fit.decays)
    };
    SeriesSummary {
        pi_x: pi_x.clone(),
        pi_y: pi_y.clone(),
        noncrossing: pi_x == pi_y && pi_x.is_noncrossing(),
        predicted_limit: limit,
        closure_exact,
        closure_fit,
        class_fit,
        class_gap_fit,
        flagged,
    }
}

/// Ratios `#([π]_X ∩ [π]_Y) / n^{1+k}` for every pair partition π of `[2k]`,
/// with predicted limit `Π(1 − δ)` on non-crossing π and 0 on crossing π.
pub fn joint_circularity_report(lx: &LinkFunction, ly: &LinkFunction, w: &Word, grid: &[usize]) -> Result<CountReport> {
    check_report_inputs(w, grid, 8)?;
    let partitions = enumerate_pair_partitions(w.len())?;
    let mut builder = RowBuilder { float_fallback: false };
    let mut rows = Vec::new();
    for &n in grid {
        let counter = IndexCounter::new(lx, ly, w, n)?;
        for pi in &partitions {
            let limit = if pi.is_noncrossing() { alternation_product(pi, w) } else { 0 };
            let count = counter.count(pi, pi, Semantics::Exact)?;
            let closure = counter.count(pi, pi, Semantics::Closure)?;
            rows.push(builder.row(pi, pi, n, count, closure, Some(limit)));
        }
    }
    rows.sort_by(|a, b| (&a.pi_x, a.n).cmp(&(&b.pi_x, b.n)));
    let series = partitions
        .iter()
        .map(|pi| {
            let limit = if pi.is_noncrossing() { alternation_product(pi, w) } else { 0 };
            summarize(&rows, pi, pi, limit)
        })
        .collect();
    Ok(CountReport {
        kind: ReportKind::JointCircularity,
        link_x: lx.name().to_string(),
        link_y: ly.name().to_string(),
        word: w.clone(),
        grid: grid.to_vec(),
        assumption_flags: assumption_flags(lx, ly, grid),
        rows,
        series,
        float_fallback: builder.float_fallback,
    })
}

/// Ratios `#([π]_X ∩ [π']_Y) / n^{1+k}` for every ordered pair `π ≠ π'` of pair
/// partitions of `[2k]`; each series is expected to vanish.
pub fn compatibility_report(lx: &LinkFunction, ly: &LinkFunction, w: &Word, grid: &[usize]) -> Result<CountReport> {
    check_report_inputs(w, grid, 6)?;
    let partitions = enumerate_pair_partitions(w.len())?;
    let pairs: Vec<(&Partition, &Partition)> = partitions
        .iter()
        .flat_map(|a| partitions.iter().map(move |b| (a, b)))
        .filter(|(a, b)| a != b)
        .collect();
    let mut builder = RowBuilder { float_fallback: false };
    let mut rows = Vec::new();
    for &n in grid {
        let counter = IndexCounter::new(lx, ly, w, n)?;
        for &(a, b) in &pairs {
            let count = counter.count(a, b, Semantics::Exact)?;
            let closure = counter.count(a, b, Semantics::Closure)?;
            rows.push(builder.row(a, b, n, count, closure, Some(0)));
        }
    }
    rows.sort_by(|r, s| (&r.pi_x, &r.pi_y, r.n).cmp(&(&s.pi_x, &s.pi_y, s.n)));
    let series = pairs.iter().map(|&(a, b)| summarize(&rows, a, b, 0)).collect();
    Ok(CountReport {
        kind: ReportKind::Compatibility,
        link_x: lx.name().to_string(),
        link_y: ly.name().to_string(),
        word: w.clone(),
        grid: grid.to_vec(),
        assumption_flags: assumption_flags(lx, ly, grid),
        rows,
        series,
        float_fallback: builder.float_fallback,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionCheck {
    pub word: Word,
    pub n: usize,
    /// `n^{-1-k/2} Σ_{π,π'} #([π]_X ∩ [π']_Y) · m_X(π) · m_Y(π')`, the exact finite-n value.
    pub combinatorial_sum: f64,
    pub monte_carlo: StarMomentEstimate,
    /// `|combinatorial_sum − mean| ≤ 4·std_error` (and ≤ 1e-12 when the error is zero).
    pub agrees: bool,
}

/// Product over blocks of the `|block|`-th moment of the entry law.
fn block_moment(pi: &Partition, moment: impl Fn(u32) -> f64) -> f64 {
    pi.blocks().iter().map(|b| moment(b.len() as u32)).product()
}

pub const RECONSTRUCT_MAX_K: usize = 6;
pub const RECONSTRUCT_MAX_N: usize = 64;

/// Finite-n *-moment from exact class counts and entry moments, next to a
/// Monte-Carlo estimate of the same quantity.
pub fn moment_reconstruction_check(
    ensemble: &ProductEnsemble,
    w: &Word,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<ReconstructionCheck> {
    if w.len() > RECONSTRUCT_MAX_K || n > RECONSTRUCT_MAX_N {
        return Err(Error::budget(format!(
            "reconstruction budget is k <= {RECONSTRUCT_MAX_K}, n <= {RECONSTRUCT_MAX_N}"
        )));
    }
    let combinatorial_sum = combinatorial_moment(ensemble, w, n)?;
    let monte_carlo = empirical_star_moment(ensemble, n, w, trials, seed)?;
    let diff = (combinatorial_sum - monte_carlo.mean).abs();
    let agrees = diff <= (4.0 * monte_carlo.std_error).max(1e-12);
    Ok(ReconstructionCheck { word: w.clone(), n, combinatorial_sum, monte_carlo, agrees })
}

/// `E φ_n(w)` at finite `n`, summed over all pairs of set partitions without singletons.
pub fn combinatorial_moment(ensemble: &ProductEnsemble, w: &Word, n: usize) -> Result<f64> {
    let counter = IndexCounter::new(&ensemble.lx, &ensemble.ly, w, n)?;
    // blocks of distinct values carry independent variables, so E x^ε_i
    // factorizes over blocks; singleton blocks contribute a zero mean
    let weighted: Vec<(Partition, f64, f64)> = enumerate_set_partitions(w.len())?
        .into_iter()
        .filter(|p| !p.has_singleton())
        .map(|p| {
            let mx = block_moment(&p, |m| ensemble.dist_x.moment(m));
            let my = block_moment(&p, |m| ensemble.dist_y.moment(m));
            (p, mx, my)
        })
        .collect();
    for (p, mx, my) in &weighted {
        if !mx.is_finite() || !my.is_finite() {
            return Err(Error::UnknownMoments(format!("block moments of {p} are not finite")));
        }
    }
    let mut numerator = 0.0;
    for (px, mx, _) in &weighted {
        for (py, _, my) in &weighted {
            if *mx == 0.0 || *my == 0.0 {
                continue;
            }
            let c = counter.count(px, py, Semantics::Exact)?;
            numerator += c as f64 * mx * my;
        }
    }
    Ok(numerator / (n as f64).powf(1.0 + w.len() as f64 / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::EntryDistribution;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }
    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    // direct enumeration of [n]^k, kept independent of the search
    fn brute(lx: &LinkFunction, ly: &LinkFunction, word: &Word, pi_x: &Partition, pi_y: &Partition, n: usize) -> (u128, u128) {
        let k = word.len();
        let mut idx = vec![1usize; k];
        let (mut exact, mut closure) = (0u128, 0u128);
        loop {
            let ex: Vec<LinkValue> = (0..k).map(|u| lx.eval_eps(word.symbols()[u], idx[u], idx[(u + 1) % k])).collect();
            let ey: Vec<LinkValue> = (0..k).map(|u| ly.eval_eps(word.symbols()[u], idx[u], idx[(u + 1) % k])).collect();
            let (ix, iy) = (Partition::from_labels(&ex), Partition::from_labels(&ey));
            exact += u128::from(&ix == pi_x && &iy == pi_y);
            closure += u128::from(pi_x.refines(&ix) && pi_y.refines(&iy));
            let mut u = k;
            loop {
                if u == 0 {
                    return (exact, closure);
                }
                u -= 1;
                idx[u] += 1;
                if idx[u] <= n {
                    break;
                }
                idx[u] = 1;
            }
        }
    }

    fn th() -> (LinkFunction, LinkFunction) {
        (LinkFunction::toeplitz(), LinkFunction::hankel())
    }

    fn cs(word: &str, px: &str, py: &str, n: usize) -> ConstraintSystem {
        let (t, h) = th();
        ConstraintSystem::new(t, h, w(word), p(px), p(py), n).unwrap()
    }

    #[test]
    fn two_letter_examples() {
        // both constraints are identities for "1*"
        assert_eq!(count_constrained(&cs("1*", "1,2", "1,2", 16)).unwrap(), 256);
        assert_eq!(count_constrained(&cs("11", "1,2", "1,2", 16)).unwrap(), 16);
    }

    #[test]
    fn four_letter_noncrossing_example() {
        let c = cs("1*1*", "1,2/3,4", "1,2/3,4", 16);
        let (exact, closure) = brute(&c.lx, &c.ly, &c.word, &c.pi_x, &c.pi_y, 16);
        // blocks force i1 = i3; distinct blocks need i2 != i4
        assert_eq!((exact, closure), (3840, 4096));
        assert_eq!(count_constrained(&c).unwrap(), exact);
        assert_eq!(count_satisfying(&c).unwrap(), closure);
    }

    #[test]
    fn four_letter_crossing_example() {
        let mut closure_ratios = Vec::new();
        for n in [8usize, 16] {
            let c = cs("1*1*", "1,3/2,4", "1,3/2,4", n);
            let (exact, closure) = brute(&c.lx, &c.ly, &c.word, &c.pi_x, &c.pi_y, n);
            assert_eq!(count_constrained(&c).unwrap(), exact);
            assert_eq!(count_satisfying(&c).unwrap(), closure);
            closure_ratios.push(closure as f64 / (n as f64).powi(3));
        }
        let halving = closure_ratios[1] / closure_ratios[0];
        assert!((halving - 0.5).abs() < 0.1, "{closure_ratios:?}");
    }

    #[test]
    fn count_single_examples() {
        let t = LinkFunction::toeplitz();
        assert_eq!(count_single(&t, &p("1,2"), &w("11"), 32).unwrap(), 32);
        assert_eq!(count_single(&t, &p("1/2"), &w("11"), 8).unwrap(), 56);
        let h = LinkFunction::hankel();
        let c = count_single(&h, &p("1,2"), &w("1*"), 32).unwrap();
        assert_eq!(c, 32 * 32);
        assert!(c <= 32u128.pow(2));
    }

    #[test]
    fn single_edge_word() {
        // k = 1: the only edge is the diagonal cell (i1, i1)
        let (t, h) = th();
        let counter = IndexCounter::new(&t, &h, &w("1"), 9).unwrap();
        assert_eq!(counter.count(&p("1"), &p("1"), Semantics::Exact).unwrap(), 9);
    }

    #[test]
    fn budget_and_shape_errors() {
        let (t, h) = th();
        assert!(matches!(IndexCounter::new(&t, &h, &w("1*1*1*1*1*"), 8), Err(Error::BudgetExceeded(_))));
        assert!(matches!(IndexCounter::new(&t, &h, &w("1*"), 129), Err(Error::BudgetExceeded(_))));
        assert!(ConstraintSystem::new(t.clone(), h.clone(), w("1*"), p("1,2/3,4"), p("1,2"), 4).is_err());
        let counter = IndexCounter::new(&t, &h, &w("1*"), 4).unwrap();
        assert!(counter.count(&p("1,2,3"), &p("1,2"), Semantics::Exact).is_err());
        assert!(joint_circularity_report(&t, &h, &w("1*1"), &[4, 8]).is_err());
        assert!(joint_circularity_report(&t, &h, &w("1*"), &[8, 4]).is_err());
        assert!(compatibility_report(&t, &h, &w("1*1*1*1*"), &[4, 8]).is_err());
    }

    #[test]
    fn decay_fit_cases() {
        let f = fit_decay(&[(16, 1.0 / 16.0), (32, 1.0 / 32.0), (64, 1.0 / 64.0)]);
        assert!((f.slope.unwrap() + 1.0).abs() < 1e-12 && f.decays);
        let f = fit_decay(&[(16, 0.0), (32, 0.0)]);
        assert!(f.slope.is_none() && f.decays);
        let f = fit_decay(&[(16, 0.5), (32, 0.5)]);
        assert!(f.slope.unwrap().abs() < 1e-12 && !f.decays);
    }

    #[test]
    fn joint_circularity_small() {
        let (t, h) = th();
        let r = joint_circularity_report(&t, &h, &w("1*1*"), &[16, 32, 64]).unwrap();
        assert_eq!(r.series.len(), 3);
        assert!(r.assumption_flags.is_empty());
        for s in &r.series {
            if s.noncrossing {
                assert_eq!(s.predicted_limit, 1);
                assert!(s.closure_exact, "{s:?}");
            } else {
                assert_eq!(s.predicted_limit, 0);
            }
            assert!(!s.flagged, "{s:?}");
        }
        let crossing = r.rows.iter().find(|row| row.pi_x == p("1,3/2,4") && row.n == 64).unwrap();
        assert!(crossing.closure_ratio_f64 <= 2.0 / 64.0);
    }

    #[test]
    fn reconstruction_rademacher_trivial_word() {
        let e = ProductEnsemble::new(
            LinkFunction::toeplitz(),
            LinkFunction::hankel(),
            EntryDistribution::Rademacher,
            EntryDistribution::Rademacher,
        );
        let r = moment_reconstruction_check(&e, &w("1*"), 16, 10, 1).unwrap();
        assert_eq!(r.combinatorial_sum, 1.0);
        assert_eq!(r.monte_carlo.mean, 1.0);
        assert!(r.agrees);
        assert!(moment_reconstruction_check(&e, &w("1*"), 65, 10, 1).is_err());
    }
}
