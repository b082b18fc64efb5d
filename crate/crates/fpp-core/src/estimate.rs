//! Method-of-moments estimation of `(nu, mu)` from interarrival data.
//!
//! `T` has no finite mean, so estimation works on `ln T`: with sample mean
//! `m` and biased (divide-by-n) variance `v` of the log gaps,
//!
//! - `nu_hat = pi / sqrt(3 (v + pi^2/6))`
//! - `mu_hat = exp(-nu_hat (m + C))`
//!
//! Both are asymptotically normal; the asymptotic variances come from the
//! bivariate CLT for `(m, v)` and the delta method, giving closed-form
//! standard errors and confidence intervals. A basic nonparametric bootstrap
//! provides the alternative interval family.

use crate::error::{Error, Result};
use crate::fpp::FppParams;
use crate::rng::UniformSource;
use crate::series::EventSeries;
use crate::specfun::{self, EULER_GAMMA, Kahan};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Sample log-moments: size, mean of `ln T`, and the divide-by-n variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMomentSummary {
    pub n: usize,
    pub mean_log: f64,
    pub var_log: f64,
}

/// Exact sample mean and `/n` variance of the log gaps.
pub fn log_moment_summary(gaps: &[f64]) -> Result<LogMomentSummary> {
    if gaps.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 interarrivals, got {}",
            gaps.len()
        )));
    }
    let mut logs = Vec::with_capacity(gaps.len());
    for (i, &g) in gaps.iter().enumerate() {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::DataAt {
                msg: format!("interarrival {g} is not positive and finite"),
                index: i,
            });
        }
        logs.push(g.ln());
    }
    let n = logs.len() as f64;
    let mut acc = Kahan::new();
    for &l in &logs {
        acc.add(l);
    }
    let mean = acc.value() / n;
    let mut sq = Kahan::new();
    for &l in &logs {
        let d = l - mean;
        sq.add(d * d);
    }
    Ok(LogMomentSummary {
        n: logs.len(),
        mean_log: mean,
        var_log: sq.value() / n,
    })
}

/// Summary from an event series (differences the arrivals first).
pub fn log_moment_summary_series(series: &EventSeries) -> Result<LogMomentSummary> {
    log_moment_summary(series.interarrivals())
}

/// Point estimate of `nu` with its clamping diagnostics: the raw
/// method-of-moments value can exceed 1 by sampling noise near `nu = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuEstimate {
    /// Reported estimate, clamped into (0, 1].
    pub value: f64,
    /// Raw formula value, kept for dispersion statistics.
    pub raw: f64,
    pub clamped: bool,
}

/// `nu_hat = pi / sqrt(3 (var_log + pi^2/6))`, clamp-and-flag above 1.
pub fn estimate_nu(s: &LogMomentSummary) -> NuEstimate {
    let raw = PI / (3.0 * (s.var_log + PI * PI / 6.0)).sqrt();
    if raw > 1.0 {
        NuEstimate {
            value: 1.0,
            raw,
            clamped: true,
        }
    } else {
        NuEstimate {
            value: raw,
            raw,
            clamped: false,
        }
    }
}

/// `mu_hat = exp(-nu_hat (mean_log + C))` for `nu_hat` in (0, 1].
pub fn estimate_mu(s: &LogMomentSummary, nu_hat: f64) -> f64 {
    debug_assert!(nu_hat > 0.0 && nu_hat <= 1.0);
    (-nu_hat * (s.mean_log + EULER_GAMMA)).exp()
}

/// Asymptotic standard errors of the two estimators:
///
/// `nu_se^2 = nu^2 (32 - 20 nu^2 - nu^4) / (40 n)` and
/// `mu_se^2 = mu^2 [20 pi^4 (2 - nu^2) - 3 pi^2 (nu^4 + 20 nu^2 - 32) ln^2 mu`
/// `          - 720 nu^3 ln(mu) zeta(3)] / (120 pi^2 n)`.
pub fn asymptotic_se(nu_hat: f64, mu_hat: f64, n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Data("asymptotic_se: empty sample".to_string()));
    }
    let nu2 = nu_hat * nu_hat;
    let nu_var = nu2 * (32.0 - 20.0 * nu2 - nu2 * nu2) / 40.0;
    let lm = mu_hat.ln();
    let pi2 = PI * PI;
    let mu_var = mu_hat
        * mu_hat
        * (20.0 * pi2 * pi2 * (2.0 - nu2)
            - 3.0 * pi2 * (nu2 * nu2 + 20.0 * nu2 - 32.0) * lm * lm
            - 720.0 * nu_hat.powi(3) * lm * specfun::zeta(3))
        / (120.0 * pi2);
    if nu_var < 0.0 || mu_var < 0.0 {
        return Err(Error::Data(format!(
            "negative variance radicand (nu_var {nu_var}, mu_var {mu_var}); \
             estimates are degenerate"
        )));
    }
    let nf = n as f64;
    Ok(((nu_var / nf).sqrt(), (mu_var / nf).sqrt()))
}

/// Standard normal quantile by Acklam's rational approximation
/// (relative error below 1.2e-9 everywhere).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "normal_quantile: p outside (0,1)");
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239e0,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838e0,
        -2.549732539343734e0,
        4.374664141464968e0,
        2.938163982698783e0,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996e0,
        3.754408661907416e0,
    ];
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    }
}

/// `point +- z_{eps/2} se`.
pub fn confidence_interval(point: f64, se: f64, level: f64) -> (f64, f64) {
    debug_assert!(level > 0.0 && level < 1.0);
    let z = normal_quantile(1.0 - 0.5 * (1.0 - level));
    (point - z * se, point + z * se)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CiMethod {
    Asymptotic,
    Bootstrap,
    Both,
}

/// Point estimates with standard errors and confidence intervals.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Estimate {
    pub nu_hat: f64,
    pub mu_hat: f64,
    pub nu_se: f64,
    pub mu_se: f64,
    pub nu_ci: (f64, f64),
    pub mu_ci: (f64, f64),
    pub level: f64,
    pub n: usize,
    pub method: CiMethod,
    pub clamped: bool,
    /// Raw (unclamped) nu, for dispersion statistics.
    pub nu_raw: f64,
    /// True when the nu interval was intersected with (0, 1].
    pub nu_ci_truncated: bool,
    /// True when the mu interval was truncated at 0.
    pub mu_ci_truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bootstrap_nu_ci: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bootstrap_mu_ci: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bootstrap_degenerate_skipped: Option<usize>,
}

/// Full asymptotic pipeline: summary, point estimates, standard errors, CIs.
pub fn estimate(gaps: &[f64], level: f64) -> Result<Estimate> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!("estimate: level {level} outside (0,1)")));
    }
    let s = log_moment_summary(gaps)?;
    let nu = estimate_nu(&s);
    let mu_hat = estimate_mu(&s, nu.value);
    let (nu_se, mu_se) = asymptotic_se(nu.value, mu_hat, s.n)?;
    let (nu_lo, nu_hi) = confidence_interval(nu.value, nu_se, level);
    let (mu_lo, mu_hi) = confidence_interval(mu_hat, mu_se, level);
    let nu_ci_truncated = nu_lo < 0.0 || nu_hi > 1.0;
    let mu_ci_truncated = mu_lo < 0.0;
    Ok(Estimate {
        nu_hat: nu.value,
        mu_hat,
        nu_se,
        mu_se,
        nu_ci: (nu_lo.max(0.0), nu_hi.min(1.0)),
        mu_ci: (mu_lo.max(0.0), mu_hi),
        level,
        n: s.n,
        method: CiMethod::Asymptotic,
        clamped: nu.clamped,
        nu_raw: nu.raw,
        nu_ci_truncated,
        mu_ci_truncated,
        bootstrap_nu_ci: None,
        bootstrap_mu_ci: None,
        bootstrap_degenerate_skipped: None,
    })
}

/// Basic (reflected-percentile) bootstrap intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapCi {
    pub nu_ci: (f64, f64),
    pub mu_ci: (f64, f64),
    /// Resamples with zero log-variance, excluded from the quantiles.
    pub degenerate_skipped: usize,
}

/// Basic nonparametric bootstrap over `b` resamples of the interarrivals:
/// interval `(2 theta_hat - q_{1-eps/2}, 2 theta_hat - q_{eps/2})`.
///
/// Resampling happens on the precomputed log gaps (equivalent to resampling
/// the gaps themselves). Degenerate resamples are skipped and counted; if
/// every resample is degenerate the intervals collapse to the point
/// estimates.
pub fn bootstrap_ci(
    gaps: &[f64],
    level: f64,
    b: usize,
    rng: &mut UniformSource,
) -> Result<BootstrapCi> {
    if b < 2 {
        return Err(Error::domain(format!("bootstrap_ci: B {b} < 2")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!(
            "bootstrap_ci: level {level} outside (0,1)"
        )));
    }
    let s = log_moment_summary(gaps)?;
    let nu_hat = estimate_nu(&s).value;
    let mu_hat = estimate_mu(&s, nu_hat);
    let logs: Vec<f64> = gaps.iter().map(|&g| g.ln()).collect();
    let n = logs.len();
    let nf = n as f64;

    let mut nus = Vec::with_capacity(b);
    let mut mus = Vec::with_capacity(b);
    let mut skipped = 0usize;
    let mut resample = vec![0.0; n];
    for _ in 0..b {
        for slot in resample.iter_mut() {
            *slot = logs[rng.next_index(n)];
        }
        let mut acc = Kahan::new();
        for &l in &resample {
            acc.add(l);
        }
        let mean = acc.value() / nf;
        let mut sq = Kahan::new();
        for &l in &resample {
            let d = l - mean;
            sq.add(d * d);
        }
        let var = sq.value() / nf;
        if var == 0.0 {
            skipped += 1;
            continue;
        }
        let rs = LogMomentSummary {
            n,
            mean_log: mean,
            var_log: var,
        };
        let rnu = estimate_nu(&rs).value;
        nus.push(rnu);
        mus.push(estimate_mu(&rs, rnu));
    }

    if nus.is_empty() {
        return Ok(BootstrapCi {
            nu_ci: (nu_hat, nu_hat),
            mu_ci: (mu_hat, mu_hat),
            degenerate_skipped: skipped,
        });
    }
    nus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    mus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let eps = 1.0 - level;
    let basic = |sorted: &[f64], point: f64| -> (f64, f64) {
        let q_lo = quantile_sorted(sorted, eps / 2.0);
        let q_hi = quantile_sorted(sorted, 1.0 - eps / 2.0);
        (2.0 * point - q_hi, 2.0 * point - q_lo)
    };
    Ok(BootstrapCi {
        nu_ci: basic(&nus, nu_hat),
        mu_ci: basic(&mus, mu_hat),
        degenerate_skipped: skipped,
    })
}

/// Linear-interpolation quantile of an ascending slice.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Population mean of `ln T`: `-(ln(mu)/nu + C)`.
pub fn log_moment_mean(p: &FppParams) -> f64 {
    -(p.mu().ln() / p.nu() + EULER_GAMMA)
}

/// Population variance of `ln T`: `(pi^2/3)(1/nu^2 - 1/2)`.
pub fn log_moment_variance(nu: f64) -> f64 {
    PI * PI / 3.0 * (1.0 / (nu * nu) - 0.5)
}

/// Third central moment of `ln T`: `-2 zeta(3)`, independent of `(nu, mu)`.
pub fn log_moment_mu3() -> f64 {
    -2.0 * specfun::zeta(3)
}

/// Fourth central moment of `ln T`: `pi^4 (28 - 20 nu^2 + nu^4) / (60 nu^4)`.
pub fn log_moment_mu4(nu: f64) -> f64 {
    let nu2 = nu * nu;
    PI.powi(4) * (28.0 - 20.0 * nu2 + nu2 * nu2) / (60.0 * nu2 * nu2)
}

/// Raw moments `E (ln T)^k` for `k` in 1..=4, composed from the mean and the
/// central moments above.
pub fn theoretical_log_moments(p: &FppParams, k: u32) -> Result<f64> {
    let m = log_moment_mean(p);
    let s2 = log_moment_variance(p.nu());
    Ok(match k {
        1 => m,
        2 => s2 + m * m,
        3 => log_moment_mu3() + 3.0 * m * s2 + m.powi(3),
        4 => {
            log_moment_mu4(p.nu()) + 4.0 * m * log_moment_mu3() + 6.0 * m * m * s2 + m.powi(4)
        }
        _ => {
            return Err(Error::domain(format!(
                "theoretical_log_moments: k {k} unsupported (1..=4)"
            )));
        }
    })
}
