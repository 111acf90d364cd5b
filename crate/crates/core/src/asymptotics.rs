//! Numeric evaluation of the leading-term constants and growth laws that
//! the exact machinery is validated against: zeta values, Dirichlet-series
//! derivatives, the Euler-product constant for multiplicative functions
//! with f(p) = k, growth-case classification for block-decomposed sums,
//! and least-squares fits of exact data against predicted main terms.
//!
//! Nothing here is interval arithmetic; every truncated quantity carries an
//! integral-comparison tail estimate instead.

use crate::arith::{FloatTable, FnTable, RealSeries, SpfSieve};
use crate::error::{Error, Result};

/// Tolerance for float case comparisons; inputs are small rationals in
/// practice.
const CASE_TOL: f64 = 1e-12;

/// Main term `leading_coefficient * x^{x_power} * (log x)^{log_power}` of a
/// summatory quantity, with the log power of the dominated error term.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticModel {
    pub leading_coefficient: f64,
    pub x_power: f64,
    pub log_power: u32,
    pub error_log_power: i32,
    /// Coefficient of the next-order x term when one is computed; reported,
    /// never used as a gate.
    pub secondary_coefficient: Option<f64>,
    /// Set when an underlying series evaluation failed its convergence
    /// heuristic.
    pub convergence_warning: bool,
}

impl AsymptoticModel {
    /// Evaluates the main term at x.
    pub fn main_term(&self, x: f64) -> f64 {
        self.leading_coefficient * x.powf(self.x_power) * x.ln().powi(self.log_power as i32)
    }
}

/// Truncated Euler product with its prime cutoff and tail estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerProductResult {
    pub value: f64,
    pub prime_bound: u64,
    pub tail_estimate: f64,
}

/// The four growth regimes of `sum_{n<=x} f(n) floor(x/n)^k` when the
/// summatory function of f is O(x^xi).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthCaseTag {
    /// k + 1 = xi: bound x^{k+1} log x.
    LogBoundary,
    /// k < xi, k + 1 != xi: bound x^{(k+xi+1)/2} + zeta(xi-k) x^xi.
    Below,
    /// k = xi: bound x^{k+1/2}.
    Equal,
    /// k > xi: bound x^{(k+xi+1)/2}.
    Above,
}

/// Classified growth bound; exactly one tag applies per (k, xi).
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCase {
    pub case_tag: GrowthCaseTag,
    pub bound_x_power: f64,
    pub bound_log_power: u32,
    pub zeta_factor_argument: Option<f64>,
}

/// Least-squares growth exponent of a sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    /// Slope of log |value| against log x.
    pub slope: f64,
    /// Set when adding a log log x regressor improves the residuals by at
    /// least 10%.
    pub log_slope_flag: bool,
}

/// Ratios of exact values to a model's main term, with the linear-in-1/log x
/// extrapolation of the ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelComparison {
    pub ratios: Vec<(u64, f64)>,
    /// Fitted slope of ratio against 1/log x.
    pub slope: f64,
    /// Fitted ratio at 1/log x -> 0.
    pub extrapolated_ratio: f64,
}

/// zeta(s) for s > 1 by partial sum plus the integral tail correction
/// `N^{1-s}/(s-1)`; the residual is below N^{-s}, so N is chosen from the
/// requested precision.
pub fn zeta_value(s: f64, precision_target: f64) -> Result<f64> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::Domain(format!("zeta partial sum requires s > 1, got {s}")));
    }
    let target = precision_target.max(1e-14);
    let n_est = (2.0 / target).powf(1.0 / s).ceil();
    if n_est > 2e8 {
        return Err(Error::Resource(format!(
            "zeta({s}) to {precision_target:e} needs {n_est:e} terms"
        )));
    }
    let n = (n_est as u64).max(10);
    let mut sum = 0.0;
    for j in (1..=n).rev() {
        sum += (j as f64).powf(-s);
    }
    Ok(sum + (n as f64).powf(1.0 - s) / (s - 1.0))
}

/// m-th s-derivative of the Dirichlet series `D(f, s) = sum f(n) n^{-s}` at
/// s = k, truncated at the table limit:
/// `sum_{n<=N} f(n) (-log n)^m n^{-k}`.
///
/// The tail bound is `max|f| * I_m(N)` with `I_m(N) = int_N^inf (log t)^m t^{-k} dt`,
/// and the result is flagged unconverged when the partial sums at N/2 and N
/// differ by more than twice the tail bound at N/2.
pub fn dirichlet_series_derivative(f: &FnTable, k: f64, m: u32) -> Result<RealSeries> {
    if k.is_nan() || k <= 1.0 {
        return Err(Error::Domain(format!(
            "Dirichlet series evaluation requires s > 1, got {k}"
        )));
    }
    let n = f.limit();
    let half = n / 2;
    let mut total = 0.0;
    let mut upper_half = 0.0; // terms with j > N/2
    for j in (1..=n).rev() {
        let fv = f.get(j);
        if fv != 0 {
            let term = fv as f64 * (-(j as f64).ln()).powi(m as i32) * (j as f64).powf(-k);
            total += term;
            if j > half {
                upper_half += term;
            }
        }
    }
    let f_max = (1..=n).map(|j| f.get(j).abs()).max().unwrap_or(0) as f64;
    let tail_bound = f_max * log_power_integral_tail(n as f64, k, m);
    let converged = if half == 0 {
        true
    } else {
        let tol = 2.0 * f_max * log_power_integral_tail(half as f64, k, m) + 1e-12 * (1.0 + total.abs());
        upper_half.abs() <= tol
    };
    Ok(RealSeries {
        value: total,
        truncation_point: n,
        tail_bound,
        converged,
    })
}

/// `I_m(N) = int_N^inf (log t)^m t^{-k} dt`, by the integration-by-parts
/// recursion `I_m = (log N)^m N^{1-k}/(k-1) + m/(k-1) * I_{m-1}`.
fn log_power_integral_tail(n: f64, k: f64, m: u32) -> f64 {
    let base = n.powf(1.0 - k) / (k - 1.0);
    let mut acc = base; // I_0
    for j in 1..=m {
        acc = n.ln().powi(j as i32) * base + (j as f64) / (k - 1.0) * acc;
    }
    acc
}

/// `zeta(s) * sum_{n<=N} Lambda(n) n^{-s}`, which equals -zeta'(s) in the
/// limit; computed from a tabulated von Mangoldt function.
pub fn zeta_log_derivative_via_lambda(s: f64, lambda: &FloatTable) -> Result<f64> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::Domain(format!(
            "Lambda series requires s > 1, got {s}"
        )));
    }
    let n = lambda.limit();
    let mut sum = 0.0;
    for j in (2..=n).rev() {
        let l = lambda.get(j);
        if l != 0.0 {
            sum += l * (j as f64).powf(-s);
        }
    }
    Ok(zeta_value(s, 1e-12)? * sum)
}

/// The Euler-product leading constant
/// `C_f = 1/(k-1)! * prod_{p<=P} (1-1/p)^k * sum_{a>=0} f(p^a) p^{-a}`
/// for a multiplicative f given by its prime-power values (f(p^0) = 1).
///
/// Local series are truncated when terms drop below 1e-15 of the running
/// sum; the tail estimate bounds the log of the omitted p > P factors by
/// `k^2 / P` (integral comparison of sum k^2/p^2).
pub fn luca_toth_constant(
    k: u32,
    f_at_prime_powers: impl Fn(u64, u32) -> f64,
    prime_bound: u64,
) -> Result<EulerProductResult> {
    if k < 2 {
        return Err(Error::Argument(format!(
            "Euler product constant requires k >= 2, got {k}"
        )));
    }
    if prime_bound < 2 {
        return Err(Error::Argument("prime_bound must be >= 2".into()));
    }
    let sieve = SpfSieve::new(prime_bound)?;
    let mut value = 1.0;
    for &p in sieve.primes() {
        let pf = p as f64;
        let mut local = 1.0; // a = 0 term
        let mut pw = 1.0;
        let mut a = 1u32;
        loop {
            pw /= pf;
            let term = f_at_prime_powers(p, a) * pw;
            local += term;
            if !term.is_finite() {
                return Err(Error::Domain(format!(
                    "local Euler factor at p={p} is not finite"
                )));
            }
            if a >= 2 && term.abs() < 1e-15 * local.abs().max(1.0) {
                break;
            }
            a += 1;
            if a > 400 {
                return Err(Error::Domain(format!(
                    "local Euler factor at p={p} did not converge"
                )));
            }
        }
        value *= (1.0 - 1.0 / pf).powi(k as i32) * local;
    }
    value /= factorial(k - 1);
    Ok(EulerProductResult {
        value,
        prime_bound,
        tail_estimate: value.abs() * (k as f64) * (k as f64) / prime_bound as f64,
    })
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * j as f64)
}

/// Model for `A_k` with weight F of Moebius inverse f:
/// main term `x log^{k-1} x / (k-1)! * D(f, k)`, error one log power lower.
/// The next-order coefficient `-k/(k-1)! * D^{(k-1)}(f, k)` is reported but
/// not gated.
pub fn model_a_k(k: u32, f: &FnTable, n_terms: u64) -> Result<AsymptoticModel> {
    if k < 2 {
        return Err(Error::Argument(format!("model_a_k requires k >= 2, got {k}")));
    }
    if n_terms == 0 || n_terms > f.limit() {
        return Err(Error::Argument(format!(
            "model_a_k needs 1 <= n_terms <= {}, got {n_terms}",
            f.limit()
        )));
    }
    let ft = if n_terms == f.limit() {
        f.clone()
    } else {
        f.truncated(n_terms)?
    };
    let d0 = dirichlet_series_derivative(&ft, k as f64, 0)?;
    let d_prev = dirichlet_series_derivative(&ft, k as f64, k - 1)?;
    let fac = factorial(k - 1);
    Ok(AsymptoticModel {
        leading_coefficient: d0.value / fac,
        x_power: 1.0,
        log_power: k - 1,
        error_log_power: k as i32 - 2,
        secondary_coefficient: Some(-(k as f64) * d_prev.value / fac),
        convergence_warning: !d0.converged || !d_prev.converged,
    })
}

/// Model for `S_k`: main term `C_f x log^{k-1} x` with the Euler-product
/// constant for f(p^a) = k.
pub fn model_s_k(k: u32, prime_bound: u64) -> Result<AsymptoticModel> {
    let cf = luca_toth_constant(k, |_, _| k as f64, prime_bound)?;
    Ok(AsymptoticModel {
        leading_coefficient: cf.value,
        x_power: 1.0,
        log_power: k - 1,
        error_log_power: k as i32 - 2,
        secondary_coefficient: None,
        convergence_warning: false,
    })
}

/// Classifies the growth of `sum_{n<=x} f(n) floor(x/n)^k` when
/// `sum_{n<=x} f(n) = O(x^xi)`, into the four displayed regimes.
pub fn classify_bullet_growth(k: f64, xi: f64) -> GrowthCase {
    if (k + 1.0 - xi).abs() <= CASE_TOL {
        GrowthCase {
            case_tag: GrowthCaseTag::LogBoundary,
            bound_x_power: k + 1.0,
            bound_log_power: 1,
            zeta_factor_argument: None,
        }
    } else if (k - xi).abs() <= CASE_TOL {
        GrowthCase {
            case_tag: GrowthCaseTag::Equal,
            bound_x_power: k + 0.5,
            bound_log_power: 0,
            zeta_factor_argument: None,
        }
    } else if k < xi {
        GrowthCase {
            case_tag: GrowthCaseTag::Below,
            bound_x_power: xi.max((k + xi + 1.0) / 2.0),
            bound_log_power: 0,
            zeta_factor_argument: Some(xi - k),
        }
    } else {
        GrowthCase {
            case_tag: GrowthCaseTag::Above,
            bound_x_power: (k + xi + 1.0) / 2.0,
            bound_log_power: 0,
            zeta_factor_argument: None,
        }
    }
}

/// Least-squares slope of log |value| against log x. Requires at least 4
/// samples with strictly increasing x spanning two decades and positive
/// values. The flag reports whether a log log x regressor improves the
/// residual sum of squares by 10% or more.
pub fn fit_growth_exponent(samples: &[(f64, f64)]) -> Result<GrowthFit> {
    if samples.len() < 4 {
        return Err(Error::Argument(format!(
            "growth fit needs >= 4 samples, got {}",
            samples.len()
        )));
    }
    for w in samples.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::Argument("growth fit needs strictly increasing x".into()));
        }
    }
    if samples.last().unwrap().0 < 100.0 * samples[0].0 {
        return Err(Error::Argument(
            "growth fit needs samples spanning at least two decades".into(),
        ));
    }
    if samples.iter().any(|&(_, v)| v <= 0.0) {
        return Err(Error::Domain("growth fit requires positive values".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|&(x, _)| x.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, v)| v.ln()).collect();
    let (slope, rss2) = fit_line(&xs, &ys);

    // add a log log x regressor over the samples where it is defined
    let with_ll: Vec<(f64, f64, f64)> = samples
        .iter()
        .filter(|&&(x, _)| x > 1.5)
        .map(|&(x, v)| (x.ln(), x.ln().ln(), v.ln()))
        .collect();
    // rss2 at float-noise level means the plain power law already fits
    let log_slope_flag = if with_ll.len() == samples.len() && rss2 > 1e-16 {
        let rss3 = fit_plane_rss(&with_ll);
        rss3 <= 0.9 * rss2
    } else {
        false
    };
    Ok(GrowthFit {
        slope,
        log_slope_flag,
    })
}

/// Simple linear regression y = a + b u; returns (b, rss).
fn fit_line(u: &[f64], y: &[f64]) -> (f64, f64) {
    let n = u.len() as f64;
    let su: f64 = u.iter().sum();
    let sy: f64 = y.iter().sum();
    let suu: f64 = u.iter().map(|v| v * v).sum();
    let suy: f64 = u.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * suu - su * su;
    let b = (n * suy - su * sy) / det;
    let a = (sy - b * su) / n;
    let rss: f64 = u
        .iter()
        .zip(y)
        .map(|(&ui, &yi)| {
            let r = yi - a - b * ui;
            r * r
        })
        .sum();
    (b, rss)
}

/// Residual sum of squares of y = a + b u + c w via 3x3 normal equations.
fn fit_plane_rss(rows: &[(f64, f64, f64)]) -> f64 {
    let n = rows.len() as f64;
    let (mut su, mut sw, mut sy) = (0.0, 0.0, 0.0);
    let (mut suu, mut sww, mut suw) = (0.0, 0.0, 0.0);
    let (mut suy, mut swy) = (0.0, 0.0);
    for &(u, w, y) in rows {
        su += u;
        sw += w;
        sy += y;
        suu += u * u;
        sww += w * w;
        suw += u * w;
        suy += u * y;
        swy += w * y;
    }
    let mut m = [
        [n, su, sw, sy],
        [su, suu, suw, suy],
        [sw, suw, sww, swy],
    ];
    // Gaussian elimination with partial pivoting on the 3x4 system
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        if m[col][col].abs() < 1e-30 {
            return f64::INFINITY; // degenerate; never an improvement
        }
        for row in 0..3 {
            if row != col {
                let factor = m[row][col] / m[col][col];
                for c in col..4 {
                    m[row][c] -= factor * m[col][c];
                }
            }
        }
    }
    let a = m[0][3] / m[0][0];
    let b = m[1][3] / m[1][1];
    let c = m[2][3] / m[2][2];
    rows.iter()
        .map(|&(u, w, y)| {
            let r = y - a - b * u - c * w;
            r * r
        })
        .sum()
}

/// Ratio of exact values to the model main term at each x, plus the linear
/// extrapolation of the ratio in 1/log x (the known correction term is
/// O(1/log x) relative to the main term).
pub fn compare_to_model(exact: &[(u64, i64)], model: &AsymptoticModel) -> Result<ModelComparison> {
    if exact.len() < 2 {
        return Err(Error::Argument("model comparison needs >= 2 points".into()));
    }
    let mut ratios = Vec::with_capacity(exact.len());
    let mut us = Vec::with_capacity(exact.len());
    for &(x, v) in exact {
        let main = model.main_term(x as f64);
        if main == 0.0 || !main.is_finite() {
            return Err(Error::Argument(format!(
                "model main term vanishes at x={x}"
            )));
        }
        ratios.push((x, v as f64 / main));
        us.push(1.0 / (x as f64).ln());
    }
    let ys: Vec<f64> = ratios.iter().map(|&(_, r)| r).collect();
    let (slope, _) = fit_line(&us, &ys);
    let n = us.len() as f64;
    let intercept = (ys.iter().sum::<f64>() - slope * us.iter().sum::<f64>()) / n;
    Ok(ModelComparison {
        ratios,
        slope,
        extrapolated_ratio: intercept,
    })
}
