//! Monte Carlo experiment engine: estimator-accuracy runs (mean / MAD /
//! sqrt(MSE) per sample size) and confidence-interval runs (averaged
//! asymptotic and bootstrap endpoints plus empirical coverage).
//!
//! Replicate `r` of cell `c` draws from its own `(seed, stream)` pair, so
//! results are bit-identical regardless of worker-thread count or execution
//! order: the parallel map collects in replicate order and aggregation is
//! single-threaded.

use crate::error::{Error, Result};
use crate::estimate;
use crate::fpp::{self, FppParams};
use crate::rng::UniformSource;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn default_ci_level() -> f64 {
    0.95
}

fn default_bootstrap_b() -> usize {
    100
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Accuracy,
    Ci,
}

/// One experiment: a true parameter pair, sample sizes, replicate count, and
/// deterministic seeding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub nu: f64,
    pub mu: f64,
    pub sample_sizes: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default = "default_ci_level")]
    pub ci_level: f64,
    /// Bootstrap replicates per dataset in CI mode; 0 omits the bootstrap.
    #[serde(rename = "bootstrap_B", default = "default_bootstrap_b")]
    pub bootstrap_b: usize,
    pub mode: Mode,
}

impl ExperimentSpec {
    pub fn params(&self) -> Result<FppParams> {
        FppParams::new(self.nu, self.mu)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if self.replicates < 1 {
            return Err(Error::domain("experiment: replicates must be >= 1".to_string()));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::domain("experiment: sample_sizes must be nonempty".to_string()));
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < 10) {
            return Err(Error::domain(format!(
                "experiment: sample size {n} below the minimum of 10"
            )));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::domain(format!(
                "experiment: ci_level {} outside (0,1)",
                self.ci_level
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Nu,
    Mu,
}

/// Summary for one (parameter, sample size) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub parameter: Param,
    pub n: usize,
    /// Mean estimate across replicates (raw values for nu).
    pub mean: f64,
    /// Mean absolute deviation from the true parameter.
    pub mad: f64,
    pub sqrt_mse: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub avg_ci: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bootstrap_ci: Option<(f64, f64)>,
    /// Fraction of replicates whose asymptotic CI covers the truth.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coverage: Option<f64>,
    /// Replicates where the raw nu estimate exceeded 1.
    pub clamp_count: usize,
}

/// Machine-readable experiment report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub spec: ExperimentSpec,
    pub cells: Vec<CellReport>,
}

/// Sub-stream layout: replicate `r` of cell `c` uses stream `(kind, c, r)`.
fn stream_id(kind: u64, cell: usize, replicate: usize) -> u64 {
    (kind << 62) | ((cell as u64) << 32) | replicate as u64
}

struct Replicate {
    nu_raw: f64,
    mu_hat: f64,
    clamped: bool,
    nu_ci: Option<(f64, f64)>,
    mu_ci: Option<(f64, f64)>,
    boot_nu: Option<(f64, f64)>,
    boot_mu: Option<(f64, f64)>,
}

fn run_replicate(spec: &ExperimentSpec, cell: usize, n: usize, r: usize) -> Result<Replicate> {
    let params = spec.params()?;
    let mut rng = UniformSource::new(spec.seed, stream_id(0, cell, r));
    let gaps = fpp::sample_interarrivals(&params, n, &mut rng);
    let s = estimate::log_moment_summary(&gaps)?;
    let nu = estimate::estimate_nu(&s);
    let mu_hat = estimate::estimate_mu(&s, nu.value);
    let mut rep = Replicate {
        nu_raw: nu.raw,
        mu_hat,
        clamped: nu.clamped,
        nu_ci: None,
        mu_ci: None,
        boot_nu: None,
        boot_mu: None,
    };
    if spec.mode == Mode::Ci {
        let (nu_se, mu_se) = estimate::asymptotic_se(nu.value, mu_hat, n)?;
        rep.nu_ci = Some(estimate::confidence_interval(nu.value, nu_se, spec.ci_level));
        rep.mu_ci = Some(estimate::confidence_interval(mu_hat, mu_se, spec.ci_level));
        if spec.bootstrap_b > 0 {
            let mut boot_rng = UniformSource::new(spec.seed, stream_id(1, cell, r));
            let ci = estimate::bootstrap_ci(&gaps, spec.ci_level, spec.bootstrap_b, &mut boot_rng)?;
            rep.boot_nu = Some(ci.nu_ci);
            rep.boot_mu = Some(ci.mu_ci);
        }
    }
    Ok(rep)
}

fn aggregate_cells(spec: &ExperimentSpec, cell: usize, n: usize, reps: &[Replicate]) -> Vec<CellReport> {
    let _ = cell;
    let count = reps.len() as f64;
    let truth = [(Param::Nu, spec.nu), (Param::Mu, spec.mu)];
    truth
        .iter()
        .map(|&(param, true_value)| {
            let value = |rep: &Replicate| match param {
                Param::Nu => rep.nu_raw, // dispersion statistics use raw values
                Param::Mu => rep.mu_hat,
            };
            let mean = reps.iter().map(|r| value(r)).sum::<f64>() / count;
            let mad = reps.iter().map(|r| (value(r) - true_value).abs()).sum::<f64>() / count;
            let mse = reps
                .iter()
                .map(|r| (value(r) - true_value).powi(2))
                .sum::<f64>()
                / count;
            let sqrt_mse = mse.sqrt();
            assert!(
                mad <= sqrt_mse * (1.0 + 1e-12) + 1e-300,
                "MAD {mad} exceeds sqrt(MSE) {sqrt_mse}"
            );
            let pick_ci = |rep: &Replicate| match param {
                Param::Nu => rep.nu_ci,
                Param::Mu => rep.mu_ci,
            };
            let pick_boot = |rep: &Replicate| match param {
                Param::Nu => rep.boot_nu,
                Param::Mu => rep.boot_mu,
            };
            let avg_pairs = |get: &dyn Fn(&Replicate) -> Option<(f64, f64)>| {
                let pairs: Vec<(f64, f64)> = reps.iter().filter_map(get).collect();
                if pairs.is_empty() {
                    None
                } else {
                    let m = pairs.len() as f64;
                    Some((
                        pairs.iter().map(|p| p.0).sum::<f64>() / m,
                        pairs.iter().map(|p| p.1).sum::<f64>() / m,
                    ))
                }
            };
            let avg_ci = avg_pairs(&pick_ci);
            let bootstrap_ci = avg_pairs(&pick_boot);
            let coverage = if spec.mode == Mode::Ci {
                let covered = reps
                    .iter()
                    .filter(|rep| {
                        pick_ci(rep)
                            .map(|(lo, hi)| lo <= true_value && true_value <= hi)
                            .unwrap_or(false)
                    })
                    .count();
                Some(covered as f64 / count)
            } else {
                None
            };
            CellReport {
                parameter: param,
                n,
                mean,
                mad,
                sqrt_mse,
                avg_ci,
                bootstrap_ci,
                coverage,
                clamp_count: reps.iter().filter(|r| r.clamped).count(),
            }
        })
        .collect()
}

/// Run an experiment; dispatches on `spec.mode`.
pub fn run(spec: &ExperimentSpec) -> Result<McReport> {
    spec.validate()?;
    let mut cells = Vec::with_capacity(2 * spec.sample_sizes.len());
    for (cell, &n) in spec.sample_sizes.iter().enumerate() {
        let reps: Vec<Result<Replicate>> = (0..spec.replicates)
            .into_par_iter()
            .map(|r| run_replicate(spec, cell, n, r))
            .collect();
        let reps: Vec<Replicate> = reps.into_iter().collect::<Result<Vec<_>>>()?;
        cells.extend(aggregate_cells(spec, cell, n, &reps));
    }
    Ok(McReport {
        spec: spec.clone(),
        cells,
    })
}

/// Accuracy-mode run (mean / MAD / sqrt(MSE) per sample size).
pub fn run_accuracy(spec: &ExperimentSpec) -> Result<McReport> {
    if spec.mode != Mode::Accuracy {
        return Err(Error::domain("run_accuracy: spec.mode must be 'accuracy'".to_string()));
    }
    run(spec)
}

/// CI-mode run (averaged asymptotic and bootstrap intervals, coverage).
pub fn run_ci(spec: &ExperimentSpec) -> Result<McReport> {
    if spec.mode != Mode::Ci {
        return Err(Error::domain("run_ci: spec.mode must be 'ci'".to_string()));
    }
    run(spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

/// Four-significant-digit display format for the markdown tables.
fn sig4(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-3..4).contains(&mag) {
        format!("{x:.3e}")
    } else {
        let prec = (3 - mag).max(0) as usize;
        format!("{x:.prec$}")
    }
}

fn fmt_opt_pair(p: Option<(f64, f64)>) -> (String, String) {
    match p {
        Some((lo, hi)) => (crate::series::fmt17(lo), crate::series::fmt17(hi)),
        None => (String::new(), String::new()),
    }
}

/// Deterministic serialization of a report.
pub fn report_emit(report: &McReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut out = String::from(
                "parameter,n,mean,mad,sqrt_mse,ci_lo,ci_hi,boot_lo,boot_hi,coverage,clamp_count\n",
            );
            for c in &report.cells {
                let (ci_lo, ci_hi) = fmt_opt_pair(c.avg_ci);
                let (b_lo, b_hi) = fmt_opt_pair(c.bootstrap_ci);
                let cov = c
                    .coverage
                    .map(|v| crate::series::fmt17(v))
                    .unwrap_or_default();
                let name = match c.parameter {
                    Param::Nu => "nu",
                    Param::Mu => "mu",
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    name,
                    c.n,
                    crate::series::fmt17(c.mean),
                    crate::series::fmt17(c.mad),
                    crate::series::fmt17(c.sqrt_mse),
                    ci_lo,
                    ci_hi,
                    b_lo,
                    b_hi,
                    cov,
                    c.clamp_count
                ));
            }
            out
        }
        ReportFormat::Markdown => report_markdown(report),
    }
}

fn report_markdown(report: &McReport) -> String {
    let spec = &report.spec;
    let mut out = format!(
        "Simulated fPp, (nu, mu) = ({}, {}), {} replicates, seed {}\n\n",
        sig4(spec.nu),
        sig4(spec.mu),
        spec.replicates,
        spec.seed
    );
    let sizes = &spec.sample_sizes;
    let cell = |param: Param, n: usize| -> &CellReport {
        report
            .cells
            .iter()
            .find(|c| c.parameter == param && c.n == n)
            .expect("cell exists")
    };
    match spec.mode {
        Mode::Accuracy => {
            let mut header = String::from("| estimate |");
            let mut rule = String::from("|---|");
            for n in sizes {
                header.push_str(&format!(" N={n} Mean | MAD | sqrt(MSE) |"));
                rule.push_str("---|---|---|");
            }
            out.push_str(&header);
            out.push('\n');
            out.push_str(&rule);
            out.push('\n');
            for (param, label) in [(Param::Nu, "nu_mm"), (Param::Mu, "mu_mm")] {
                let mut row = format!("| {label} |");
                for &n in sizes {
                    let c = cell(param, n);
                    row.push_str(&format!(
                        " {} | {} | {} |",
                        sig4(c.mean),
                        sig4(c.mad),
                        sig4(c.sqrt_mse)
                    ));
                }
                out.push_str(&row);
                out.push('\n');
            }
        }
        Mode::Ci => {
            let mut header = String::from("| parameter |");
            let mut rule = String::from("|---|");
            for n in sizes {
                header.push_str(&format!(" N={n} Average | Bootstrap |"));
                rule.push_str("---|---|");
            }
            out.push_str(&header);
            out.push('\n');
            out.push_str(&rule);
            out.push('\n');
            let pair = |p: Option<(f64, f64)>| match p {
                Some((lo, hi)) => format!("({}, {})", sig4(lo), sig4(hi)),
                None => "-".to_string(),
            };
            for (param, label) in [(Param::Nu, "nu"), (Param::Mu, "mu")] {
                let mut row = format!("| {label} |");
                for &n in sizes {
                    let c = cell(param, n);
                    row.push_str(&format!(" {} | {} |", pair(c.avg_ci), pair(c.bootstrap_ci)));
                }
                out.push_str(&row);
                out.push('\n');
            }
        }
    }
    out
}
