//! Command-line front end.
//!
//! Every run writes a header record holding its full [`RunConfig`] followed by
//! newline-delimited JSON records (or CSV for the tabular subcommands). Exit
//! codes: 0 on success, 2 on invalid input, 3 when a budget refuses the run.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::counting::{
    compatibility_report, joint_circularity_report, moment_reconstruction_check, CountReport,
    RECONSTRUCT_MAX_K,
};
use crate::ensemble::{sample_patterned, write_matrix_csv, EntryDistribution, ProductEnsemble};
use crate::error::{Error, Result};
use crate::linkfn::{pair_regularity, regularity_report, LinkFunction};
use crate::moments::{circular_star_moment, empirical_star_moments, semicircle_moment, symmetric_moments};
use crate::partitions::{catalan, enumerate_pair_partitions, enumerate_set_partitions};
use crate::spectrum::{self, figure_data, sample_spectra, SpectrumStats, DEFAULT_FIGURE_N, SPECTRUM_MAX_N};
use crate::word::Word;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const THEORY_MAP_VERSION: &str = "1";
pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

const VERSION_LINE: &str = concat!(env!("CARGO_PKG_VERSION"), " (theory map v1)");
const REGULARITY_PROBE_GRID: [usize; 3] = [16, 32, 64];

#[derive(Debug, Parser)]
#[command(name = "schurprod", version = VERSION_LINE, about = "Schur-Hadamard products of patterned random matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample one product matrix M = X ⊙ Y and print a summary (or dump it with --csv)
    Sample {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Monte-Carlo *-moments n^{-1-k/2} E tr(M^{ε1}...M^{εk})
    Moments {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Words over {1,*}; repeat the flag or separate with commas
        #[arg(long, value_delimiter = ',')]
        word: Vec<Word>,
        /// Estimate every word of length 1..=L instead of --word
        #[arg(long)]
        all_words_up_to: Option<usize>,
        /// Moments of the hermitized matrix (M + Mᵀ)/√2 of these even orders
        #[arg(long, value_delimiter = ',')]
        symmetric: Vec<u32>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Exact-count verification reports
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Row/column multiplicity Δ_L over a grid, and joint injectivity for two links
    Regularity {
        /// One or two link functions
        #[arg(long, required = true)]
        link: Vec<LinkFunction>,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        grid: Vec<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Spectral statistics of n^{-1/2} M_n (diagnostic)
    Spectrum {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value_t = DEFAULT_FIGURE_N)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Also report the real spectrum of the hermitized matrix
        #[arg(long)]
        hermitized: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Eigenvalue cloud of n^{-1/2} M_n as CSV plus a stats JSON sidecar
    Figure {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value_t = DEFAULT_FIGURE_N)]
        n: usize,
        /// CSV destination; the sidecar is written next to it as *.stats.json
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Ratios #([π]_X ∩ [π]_Y)/n^{1+k} for all pair partitions π
    JointCircularity {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long)]
        word: Word,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        grid: Vec<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Ratios #([π]_X ∩ [π']_Y)/n^{1+k} for all mismatched pairs π ≠ π'
    Compatibility {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long)]
        word: Word,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        grid: Vec<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Finite-n moment from exact counts against a Monte-Carlo estimate
    Reconstruct {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        word: Vec<Word>,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args, Clone)]
struct EnsembleArgs {
    #[arg(long, default_value = "toeplitz")]
    link_x: LinkFunction,
    #[arg(long, default_value = "hankel")]
    link_y: LinkFunction,
    #[arg(long, default_value = "gaussian")]
    dist_x: EntryDistribution,
    #[arg(long, default_value = "gaussian")]
    dist_y: EntryDistribution,
    /// Sets both entry laws at once
    #[arg(long)]
    dist: Option<EntryDistribution>,
}

impl EnsembleArgs {
    fn ensemble(&self) -> ProductEnsemble {
        let (dx, dy) = match self.dist {
            Some(d) => (d, d),
            None => (self.dist_x, self.dist_y),
        };
        ProductEnsemble::new(self.link_x.clone(), self.link_y.clone(), dx, dy)
    }
}

#[derive(Debug, Args, Clone)]
struct CommonArgs {
    /// Base seed, or `random` for a fresh one (recorded in the header)
    #[arg(long, default_value = "default")]
    seed: String,
    /// Newline-delimited JSON output (the default)
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// CSV output for tabular subcommands
    #[arg(long)]
    csv: bool,
    /// Refuse up front when the estimated runtime exceeds this many seconds
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Lift the dense eigenvalue size limit
    #[arg(long)]
    allow_large: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub tool: &'static str,
    pub version: &'static str,
    pub theory_map_version: &'static str,
    pub subcommand: String,
    pub links: Vec<String>,
    pub dists: Vec<String>,
    pub n: Option<usize>,
    pub grid: Option<Vec<usize>>,
    pub words: Vec<String>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub seed_source: &'static str,
    pub format: &'static str,
    pub budget_seconds: Option<f64>,
    pub allow_large: bool,
}

fn parse_seed(s: &str) -> Result<(u64, &'static str)> {
    match s {
        "default" => Ok((DEFAULT_SEED, "default")),
        "random" => Ok((rand::random(), "random")),
        _ => s
            .parse()
            .map(|v| (v, "explicit"))
            .map_err(|_| Error::parse(format!("seed must be an unsigned integer or `random`, got {s:?}"))),
    }
}

impl RunConfig {
    fn new(subcommand: &str, common: &CommonArgs) -> Result<RunConfig> {
        let (seed, seed_source) = parse_seed(&common.seed)?;
        Ok(RunConfig {
            tool: "schurprod",
            version: env!("CARGO_PKG_VERSION"),
            theory_map_version: THEORY_MAP_VERSION,
            subcommand: subcommand.to_string(),
            links: Vec::new(),
            dists: Vec::new(),
            n: None,
            grid: None,
            words: Vec::new(),
            trials: None,
            seed,
            seed_source,
            format: if common.csv { "csv" } else { "json" },
            budget_seconds: common.budget_seconds,
            allow_large: common.allow_large,
        })
    }

    fn with_ensemble(mut self, e: &ProductEnsemble) -> Self {
        self.links = vec![e.lx.name().to_string(), e.ly.name().to_string()];
        self.dists = vec![e.dist_x.name().to_string(), e.dist_y.name().to_string()];
        self
    }

    fn csv(&self) -> bool {
        self.format == "csv"
    }
}

struct Output<'a> {
    out: &'a mut dyn Write,
}

impl Output<'_> {
    fn record(&mut self, kind: &str, value: impl Serialize) -> Result<()> {
        let mut v = serde_json::to_value(value).map_err(|e| Error::invalid(e.to_string()))?;
        if let serde_json::Value::Object(map) = &mut v {
            map.insert("record".into(), json!(kind));
        } else {
            v = json!({ "record": kind, "value": v });
        }
        writeln!(self.out, "{}", serde_json::to_string(&v).map_err(|e| Error::invalid(e.to_string()))?).map_err(io_err)
    }

    fn header(&mut self, cfg: &RunConfig) -> Result<()> {
        if cfg.csv() {
            let line = serde_json::to_string(cfg).map_err(|e| Error::invalid(e.to_string()))?;
            writeln!(self.out, "# {line}").map_err(io_err)
        } else {
            self.record("header", json!({ "config": cfg }))
        }
    }

    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.out, "{s}").map_err(io_err)
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::invalid(format!("write failed: {e}"))
}

// Rough single-core throughput used for up-front refusals.
const SECONDS_PER_FLOP: f64 = 4e-11;
const SECONDS_PER_ENTRY: f64 = 1e-7;
const SECONDS_PER_NODE: f64 = 3e-8;
const SECONDS_PER_EIG_CUBE: f64 = 4.5e-10;

fn check_budget(cfg: &RunConfig, estimate: f64) -> Result<()> {
    match cfg.budget_seconds {
        Some(limit) if estimate > limit => Err(Error::budget(format!(
            "estimated runtime {estimate:.1}s exceeds --budget-seconds {limit}"
        ))),
        _ => Ok(()),
    }
}

fn moment_cost(n: usize, words: &[Word], trials: usize) -> f64 {
    let n = n as f64;
    let products: usize = words.iter().map(|w| w.len().saturating_sub(1)).sum();
    trials as f64 * (n * n * SECONDS_PER_ENTRY + products as f64 * n.powi(3) * SECONDS_PER_FLOP)
}

fn counting_cost(k: usize, grid: &[usize], pairs: usize) -> f64 {
    let nodes: f64 = grid.iter().map(|&n| (n as f64).powf(1.0 + k as f64 / 2.0)).sum();
    2.0 * pairs as f64 * nodes * SECONDS_PER_NODE
}

fn spectrum_cost(n: usize, trials: usize) -> f64 {
    trials as f64 * (n as f64).powi(3) * SECONDS_PER_EIG_CUBE
}

/// Regularity problems for the two links of an ensemble.
fn assumption_flags(e: &ProductEnsemble) -> Vec<String> {
    let mut flags = Vec::new();
    if let Ok(reg) = pair_regularity(&e.lx, &e.ly, &REGULARITY_PROBE_GRID) {
        for (name, verdict) in reg.links.iter().zip(&reg.verdicts) {
            if *verdict == crate::linkfn::DeltaVerdict::GrowsWithN {
                flags.push(format!("row/column multiplicity of {name} grows with n (unbounded Δ)"));
            }
        }
        if let Some(inj) = reg.injectivity.filter(|i| !i.injective) {
            flags.push(format!("joint map is not injective on [1,{}]²: {:?}", inj.n, inj.counterexample));
        }
    }
    flags
}

/// Runs the command line `args` (including the program name), writing results
/// to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let first = e.render().to_string();
                    let line = first.lines().next().unwrap_or("invalid arguments");
                    let _ = writeln!(err, "{line}");
                    EXIT_INVALID
                }
            };
        }
    };
    let mut output = Output { out };
    match dispatch(cli.command, &mut output) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.to_string().replace('\n', " "));
            match e {
                Error::BudgetExceeded(_) => EXIT_BUDGET,
                _ => EXIT_INVALID,
            }
        }
    }
}

fn dispatch(cmd: Command, out: &mut Output<'_>) -> Result<()> {
    match cmd {
        Command::Sample { ens, n, common } => cmd_sample(&ens, n, &common, out),
        Command::Moments { ens, n, trials, word, all_words_up_to, symmetric, common } => {
            cmd_moments(&ens, n, trials, word, all_words_up_to, symmetric, &common, out)
        }
        Command::Verify { check } => match check {
            VerifyCommand::JointCircularity { ens, word, grid, common } => {
                cmd_report("verify joint-circularity", &ens, &word, &grid, &common, out)
            }
            VerifyCommand::Compatibility { ens, word, grid, common } => {
                cmd_report("verify compatibility", &ens, &word, &grid, &common, out)
            }
            VerifyCommand::Reconstruct { ens, word, n, trials, common } => {
                cmd_reconstruct(&ens, &word, n, trials, &common, out)
            }
        },
        Command::Regularity { link, grid, common } => cmd_regularity(&link, &grid, &common, out),
        Command::Spectrum { ens, n, trials, hermitized, common } => {
            cmd_spectrum(&ens, n, trials, hermitized, &common, out)
        }
        Command::Figure { ens, n, out: path, common } => cmd_figure(&ens, n, path, &common, out),
    }
}

fn cmd_sample(ens: &EnsembleArgs, n: usize, common: &CommonArgs, out: &mut Output<'_>) -> Result<()> {
    let e = ens.ensemble();
    let mut cfg = RunConfig::new("sample", common)?.with_ensemble(&e);
    cfg.n = Some(n);
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    check_budget(&cfg, (n * n) as f64 * SECONDS_PER_ENTRY)?;
    let (sx, sy) = ProductEnsemble::factor_seeds(cfg.seed);
    let x = sample_patterned(&e.lx, e.dist_x, n, sx);
    let y = sample_patterned(&e.ly, e.dist_y, n, sy);
    let m = crate::ensemble::schur_hadamard(&x, &y)?;
    out.header(&cfg)?;
    if cfg.csv() {
        return write_matrix_csv(&m.entries, out.out).map_err(io_err);
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for j in 0..n {
        for i in 0..n {
            let v = m.entries[(i, j)];
            sum += v;
            sum_sq += v * v;
        }
    }
    let cells = (n * n) as f64;
    out.record(
        "sample",
        json!({
            "n": n,
            "factor_seeds": [m.seeds.0, m.seeds.1],
            "entry_mean": sum / cells,
            "entry_mean_sq": sum_sq / cells,
            "frobenius_norm": sum_sq.sqrt(),
            "corner": (1..=n.min(4)).map(|i| (1..=n.min(4)).map(|j| m.get(i, j)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_moments(
    ens: &EnsembleArgs,
    n: usize,
    trials: usize,
    mut words: Vec<Word>,
    all_up_to: Option<usize>,
    symmetric: Vec<u32>,
    common: &CommonArgs,
    out: &mut Output<'_>,
) -> Result<()> {
    let e = ens.ensemble();
    if let Some(l) = all_up_to {
        if l == 0 || l > 10 {
            return Err(Error::invalid("--all-words-up-to must be in 1..=10"));
        }
        words = (1..=l).flat_map(Word::all_of_length).collect();
    }
    if words.is_empty() && symmetric.is_empty() {
        return Err(Error::invalid("give --word, --all-words-up-to or --symmetric"));
    }
    let mut cfg = RunConfig::new("moments", common)?.with_ensemble(&e);
    cfg.n = Some(n);
    cfg.trials = Some(trials);
    cfg.words = words.iter().map(ToString::to_string).collect();
    let sym_words: Vec<Word> = symmetric.iter().map(|&k| Word::alternating(k as usize / 2)).collect();
    check_budget(&cfg, moment_cost(n, &words, trials) + moment_cost(n, &sym_words, trials))?;

    let estimates = if words.is_empty() { Vec::new() } else { empirical_star_moments(&e, n, &words, trials, cfg.seed)? };
    let sym = if symmetric.is_empty() { Vec::new() } else { symmetric_moments(&e, n, &symmetric, trials, cfg.seed)? };
    out.header(&cfg)?;
    if cfg.csv() {
        out.line("word,n,trials,mean,std_error,theory_circular")?;
        for est in &estimates {
            let theory = circular_star_moment(&est.word)?;
            out.line(&format!("{},{},{},{:.16e},{:.16e},{}", est.word, est.n, est.trials, est.mean, est.std_error, theory))?;
        }
        for s in &sym {
            out.line(&format!("sym{},{},{},{:.16e},{:.16e},{}", s.k, s.n, s.trials, s.mean, s.std_error, semicircle_moment(s.k)))?;
        }
        return Ok(());
    }
    for est in &estimates {
        let theory = circular_star_moment(&est.word)?;
        out.record(
            "moment",
            json!({
                "word": est.word, "n": est.n, "trials": est.trials,
                "mean": est.mean, "std_error": est.std_error, "theory_circular": theory,
            }),
        )?;
    }
    for s in &sym {
        out.record(
            "symmetric_moment",
            json!({
                "k": s.k, "n": s.n, "trials": s.trials,
                "mean": s.mean, "std_error": s.std_error, "theory_semicircle": semicircle_moment(s.k),
            }),
        )?;
    }
    Ok(())
}

fn report_rows_csv(report: &CountReport, out: &mut Output<'_>) -> Result<()> {
    out.line("pi_x,pi_y,n,count,closure_count,ratio,closure_ratio,predicted_limit")?;
    for r in &report.rows {
        out.line(&format!(
            "{},{},{},{},{},{}/{},{}/{},{}",
            r.pi_x,
            r.pi_y,
            r.n,
            r.count,
            r.closure_count,
            r.ratio.numer(),
            r.ratio.denom(),
            r.closure_ratio.numer(),
            r.closure_ratio.denom(),
            r.predicted_limit.map(|l| l.to_string()).unwrap_or_default()
        ))?;
    }
    Ok(())
}

fn cmd_report(
    name: &str,
    ens: &EnsembleArgs,
    word: &Word,
    grid: &[usize],
    common: &CommonArgs,
    out: &mut Output<'_>,
) -> Result<()> {
    let e = ens.ensemble();
    let mut cfg = RunConfig::new(name, common)?.with_ensemble(&e);
    cfg.dists.clear();
    cfg.grid = Some(grid.to_vec());
    cfg.words = vec![word.to_string()];
    let compat = name.ends_with("compatibility");
    let parts = if word.len().is_multiple_of(2) && word.len() <= 8 { enumerate_pair_partitions(word.len())?.len() } else { 0 };
    let pairs = if compat { parts * parts.saturating_sub(1) } else { parts };
    check_budget(&cfg, counting_cost(word.len(), grid, pairs))?;
    let report = if compat {
        compatibility_report(&e.lx, &e.ly, word, grid)?
    } else {
        joint_circularity_report(&e.lx, &e.ly, word, grid)?
    };
    out.header(&cfg)?;
    if cfg.csv() {
        return report_rows_csv(&report, out);
    }
    for flag in &report.assumption_flags {
        out.record("assumption_flag", json!({ "message": flag }))?;
    }
    for row in &report.rows {
        out.record("row", row)?;
    }
    for s in &report.series {
        out.record("series", s)?;
    }
    out.record(
        "summary",
        json!({
            "kind": report.kind,
            "series": report.series.len(),
            "flagged": report.flagged().len(),
            "assumption_flags": report.assumption_flags.len(),
            "float_fallback": report.float_fallback,
        }),
    )
}

fn cmd_reconstruct(
    ens: &EnsembleArgs,
    words: &[Word],
    n: usize,
    trials: usize,
    common: &CommonArgs,
    out: &mut Output<'_>,
) -> Result<()> {
    let e = ens.ensemble();
    let mut cfg = RunConfig::new("verify reconstruct", common)?.with_ensemble(&e);
    cfg.n = Some(n);
    cfg.trials = Some(trials);
    cfg.words = words.iter().map(ToString::to_string).collect();
    if let Some(w) = words.iter().find(|w| w.len() > RECONSTRUCT_MAX_K) {
        return Err(Error::budget(format!("word {w} is longer than {RECONSTRUCT_MAX_K}")));
    }
    let mut estimate = moment_cost(n, words, trials);
    for w in words {
        let bell = enumerate_set_partitions(w.len())?.len();
        estimate += counting_cost(w.len(), &[n], bell * bell);
    }
    check_budget(&cfg, estimate)?;
    let checks = words
        .iter()
        .map(|w| moment_reconstruction_check(&e, w, n, trials, cfg.seed))
        .collect::<Result<Vec<_>>>()?;
    out.header(&cfg)?;
    if cfg.csv() {
        out.line("word,n,trials,combinatorial_sum,mean,std_error,agrees")?;
        for c in &checks {
            out.line(&format!(
                "{},{},{},{:.16e},{:.16e},{:.16e},{}",
                c.word, c.n, c.monte_carlo.trials, c.combinatorial_sum, c.monte_carlo.mean, c.monte_carlo.std_error, c.agrees
            ))?;
        }
        return Ok(());
    }
    for c in &checks {
        out.record("reconstruction", c)?;
    }
    Ok(())
}

fn cmd_regularity(links: &[LinkFunction], grid: &[usize], common: &CommonArgs, out: &mut Output<'_>) -> Result<()> {
    let mut cfg = RunConfig::new("regularity", common)?;
    cfg.links = links.iter().map(|l| l.name().to_string()).collect();
    cfg.grid = Some(grid.to_vec());
    let max_n = grid.iter().copied().max().unwrap_or(0) as f64;
    check_budget(&cfg, links.len() as f64 * grid.len() as f64 * max_n * max_n * SECONDS_PER_ENTRY)?;
    let report = match links {
        [l] => regularity_report(l, grid)?,
        [lx, ly] => pair_regularity(lx, ly, grid)?,
        _ => return Err(Error::invalid("regularity takes one or two --link values")),
    };
    out.header(&cfg)?;
    if cfg.csv() {
        out.line("link,n,delta,verdict")?;
        for (i, name) in report.links.iter().enumerate() {
            for (n, d) in &report.delta_at_n[i] {
                out.line(&format!("{name},{n},{d},{:?}", report.verdicts[i]))?;
            }
        }
        return Ok(());
    }
    out.record("regularity", &report)
}

fn spectrum_record(stats: &SpectrumStats, seed: u64, trial: usize) -> serde_json::Value {
    json!({
        "label": "diagnostic",
        "trial": trial,
        "seed": seed,
        "stats": stats,
    })
}

fn cmd_spectrum(
    ens: &EnsembleArgs,
    n: usize,
    trials: usize,
    hermitized: bool,
    common: &CommonArgs,
    out: &mut Output<'_>,
) -> Result<()> {
    let e = ens.ensemble();
    let mut cfg = RunConfig::new("spectrum", common)?.with_ensemble(&e);
    cfg.n = Some(n);
    cfg.trials = Some(trials);
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    if n > SPECTRUM_MAX_N && !cfg.allow_large {
        return Err(Error::budget(format!("n = {n} exceeds {SPECTRUM_MAX_N}; pass --allow-large")));
    }
    check_budget(&cfg, spectrum_cost(n, trials) * if hermitized { 1.3 } else { 1.0 })?;
    let flags = assumption_flags(&e);
    let spectra = if n > SPECTRUM_MAX_N {
        (0..trials)
            .map(|t| spectrum::sample_spectrum(&e, n, crate::ensemble::trial_seed(cfg.seed, t), true))
            .collect::<Result<Vec<_>>>()?
    } else {
        sample_spectra(&e, n, trials, cfg.seed)?
    };
    let mut real_moments = Vec::new();
    if hermitized {
        for t in 0..trials {
            let eigs = spectrum::hermitized_spectrum(&e, n, crate::ensemble::trial_seed(cfg.seed, t))?;
            real_moments.push(
                [2, 4, 6].map(|k| json!({ "k": k, "moment": spectrum::empirical_moment(&eigs, k), "semicircle": catalan(k as u32 / 2) })),
            );
        }
    }
    out.header(&cfg)?;
    if cfg.csv() {
        out.line("trial,seed,n,mean_abs_sq,disk_fraction_1,disk_fraction_1_05,disk_fraction_1_1,radial_ks,angular_max_dev,spectral_radius")?;
        for (t, s) in spectra.iter().enumerate() {
            out.line(&format!(
                "{t},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                crate::ensemble::trial_seed(cfg.seed, t),
                s.n,
                s.mean_abs_sq,
                s.disk_fraction_1,
                s.disk_fraction_1_05,
                s.disk_fraction_1_1,
                s.radial_ks,
                s.angular_max_dev,
                s.spectral_radius
            ))?;
        }
        return Ok(());
    }
    for flag in &flags {
        out.record("assumption_flag", json!({ "message": flag }))?;
    }
    for (t, s) in spectra.iter().enumerate() {
        out.record("spectrum", spectrum_record(s, crate::ensemble::trial_seed(cfg.seed, t), t))?;
    }
    for (t, m) in real_moments.iter().enumerate() {
        out.record("hermitized_spectrum", json!({ "label": "diagnostic", "trial": t, "moments": m }))?;
    }
    Ok(())
}

fn cmd_figure(ens: &EnsembleArgs, n: usize, path: PathBuf, common: &CommonArgs, out: &mut Output<'_>) -> Result<()> {
    let e = ens.ensemble();
    let mut cfg = RunConfig::new("figure", common)?.with_ensemble(&e);
    cfg.n = Some(n);
    check_budget(&cfg, spectrum_cost(n, 1))?;
    let fig = figure_data(&e, n, cfg.seed, cfg.allow_large)?;
    let sidecar = fig.write_files(&path).map_err(|err| Error::invalid(format!("cannot write {}: {err}", path.display())))?;
    let flags = assumption_flags(&e);
    out.header(&cfg)?;
    for flag in &flags {
        out.record("assumption_flag", json!({ "message": flag }))?;
    }
    out.record(
        "figure",
        json!({
            "csv": path.display().to_string(),
            "stats_file": sidecar.display().to_string(),
            "stats": fig.sidecar(),
        }),
    )
}

