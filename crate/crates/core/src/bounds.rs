//! Closed-form rate functions and bounds for second-order covering codes,
//! plus the analytic identities they rely on.
//!
//! Everything here is plain `f64`. The `x log x` terms are defined as zero
//! at `x = 0` by an explicit branch. Exact ball sizes come from
//! [`crate::words::ball_size`] and are compared in the log domain.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::words::{ball_size, radius_from_rho};

fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Unchecked q-ary entropy; `x` must lie in `[0, 1]`.
pub(crate) fn h(q: u64, x: f64) -> f64 {
    let qf = q as f64;
    let spread = if x == 0.0 { 0.0 } else { x * (qf - 1.0).ln() };
    (spread - xlnx(x) - xlnx(1.0 - x)) / qf.ln()
}

/// q-ary entropy `H_q(x) = x log_q(q-1) - x log_q x - (1-x) log_q(1-x)`.
pub fn entropy(q: u64, x: f64) -> Result<f64> {
    if q < 2 {
        return Err(Error::Domain(format!("entropy base must be >= 2, got {q}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "entropy argument {x} outside [0, 1]"
        )));
    }
    Ok(h(q, x))
}

/// Optimal first-order rate: `1 - H_q(rho)` below `1 - 1/q`, else 0.
pub fn kappa1(rho: f64, q: u64) -> f64 {
    if rho < 1.0 - 1.0 / q as f64 {
        1.0 - h(q, rho)
    } else {
        0.0
    }
}

/// Optimal second-order rate: `1 - H_{q^2}(rho)` below `1 - 1/q^2`, else 0.
pub fn kappa2(rho: f64, q: u64) -> f64 {
    let q2 = q * q;
    if rho < 1.0 - 1.0 / q2 as f64 {
        1.0 - h(q2, rho)
    } else {
        0.0
    }
}

/// Ball-covering lower bound on the second-order rate.
pub fn ball_covering_lower(rho: f64, q: u64) -> f64 {
    kappa1(rho, q * q)
}

/// Binary upper bound `1 - H_2(rho/2)`.
pub fn upper_trivial(rho: f64) -> f64 {
    1.0 - h(2, rho / 2.0)
}

/// `s(rho) = (1 + 8 rho - sqrt(1 + 16 rho - 16 rho^2)) / 10`, defined on `[0, 3/4)`.
pub fn s_func(rho: f64) -> Option<f64> {
    if !(0.0..0.75).contains(&rho) {
        return None;
    }
    Some((1.0 + 8.0 * rho - (1.0 + 16.0 * rho - 16.0 * rho * rho).sqrt()) / 10.0)
}

/// `f(rho) = H_2(s) + 2s + 2(1-s) H_2((rho-s)/(1-s))`, defined on `[0, 3/4)`.
pub fn f_func(rho: f64) -> Option<f64> {
    let s = s_func(rho)?;
    let inner = if rho == s { 0.0 } else { (rho - s) / (1.0 - s) };
    Some(h(2, s) + 2.0 * s + 2.0 * (1.0 - s) * h(2, inner.clamp(0.0, 1.0)))
}

/// Binary upper bound `1 - (4 H_4(rho) - f(rho))` below 3/4, else 0.
pub fn upper_better(rho: f64) -> f64 {
    match f_func(rho) {
        Some(f) => 1.0 - (4.0 * h(4, rho) - f),
        None => 0.0,
    }
}

/// Exponent of the completion count for a pair at normalized distance `mu`:
/// 1 when `mu <= 1 - q(1 - rho)`, else `mu + (1 - mu) H_q((rho - mu)/(1 - mu))`.
pub fn f_mu(mu: f64, rho: f64, q: u64) -> Result<f64> {
    if mu > rho {
        return Err(Error::Domain(format!("mu = {mu} exceeds rho = {rho}")));
    }
    if mu < 0.0 || rho >= 1.0 - 1.0 / (q * q) as f64 {
        return Err(Error::Domain(format!(
            "need 0 <= mu <= rho < 1 - 1/q^2, got mu={mu} rho={rho}"
        )));
    }
    if mu <= 1.0 - q as f64 * (1.0 - rho) {
        return Ok(1.0);
    }
    let x = if mu == rho {
        0.0
    } else {
        (rho - mu) / (1.0 - mu)
    };
    Ok(mu + (1.0 - mu) * h(q, x))
}

/// `|H_q(mu) + mu + (1-mu) H_q((rho-mu)/(1-mu)) - 2 H_{q^2}(rho)|` at
/// `mu = q rho / (q + 1)`. Zero up to rounding.
pub fn entropy_identity_residual(rho: f64, q: u64) -> f64 {
    let qf = q as f64;
    let mu = qf * rho / (qf + 1.0);
    let inner = if rho == 0.0 {
        0.0
    } else {
        (rho - mu) / (1.0 - mu)
    };
    let lhs = h(q, mu) + mu + (1.0 - mu) * h(q, inner);
    (lhs - 2.0 * h(q * q, rho)).abs()
}

/// `phi(rho) = H_q(q rho / (q+1)) - H_{q^2}(rho)`: width of the admissible
/// epsilon interval for the random-code model.
pub fn phi(rho: f64, q: u64) -> f64 {
    let qf = q as f64;
    h(q, qf * rho / (qf + 1.0)) - h(q * q, rho)
}

/// `E[1/(Y+1)]` for `Y ~ Bin(m, p)`: `(1 - (1-p)^{m+1}) / (p (m+1))`.
pub fn inverse_binomial_moment(m: u64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("p must be in (0, 1], got {p}")));
    }
    let trials = m as f64 + 1.0;
    let complement = -(trials * (-p).ln_1p()).exp_m1();
    Ok(complement / (p * trials))
}

/// Upper tail bound `P[X >= np + a] <= exp(-a^2/(2np) (1 - a/(3np)))` for
/// `X ~ Bin(n, p)`.
pub fn binomial_tail_bound(n: u64, p: f64, a: f64) -> Result<f64> {
    let mean = n as f64 * p;
    if mean <= 0.0 {
        return Err(Error::Domain("n * p must be positive".into()));
    }
    if a <= 0.0 {
        return Err(Error::Domain(format!(
            "deviation must be positive, got {a}"
        )));
    }
    Ok((-(a * a) / (2.0 * mean) * (1.0 - a / (3.0 * mean))).exp())
}

/// Relative form: `P[X >= (1 + gamma) np] <= exp(-gamma^2 np (1 - gamma/3) / 2)`.
pub fn binomial_tail_bound_relative(n: u64, p: f64, gamma: f64) -> Result<f64> {
    binomial_tail_bound(n, p, gamma * n as f64 * p)
}

/// Natural log of a positive big integer from its top 64 bits.
pub fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 64 {
        let x = v.iter_u64_digits().next().unwrap_or(0);
        return (x as f64).ln();
    }
    let shift = bits - 64;
    let top: BigUint = v >> shift;
    let x = top.iter_u64_digits().next().unwrap_or(0);
    (x as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln V - t n H_{q^t}(rho) ln q` with `V` the exact t-ball of radius
/// `floor(rho n)`. Nonpositive whenever the entropy upper bound holds.
pub fn ball_entropy_gap(t: u32, n: usize, q: u32, rho: f64) -> Result<f64> {
    let qt = u64::from(q).pow(t);
    let top = 1.0 - 1.0 / qt as f64;
    if !(0.0..=top + 1e-12).contains(&rho) {
        return Err(Error::Domain(format!("rho = {rho} outside [0, {top}]")));
    }
    let rho = rho.min(top);
    let v = ball_size(t, radius_from_rho(rho, n), n, q)?;
    let rhs = t as f64 * n as f64 * h(qt, rho) * (q as f64).ln();
    Ok(ln_biguint(&v) - rhs)
}

/// Checks `V^{(t)}_{floor(rho n), n, q} <= q^{t n H_{q^t}(rho)}`, allowing
/// `1e-12` relative slack for the floating right-hand side.
pub fn ball_entropy_check(t: u32, n: usize, q: u32, rho: f64) -> Result<bool> {
    let gap = ball_entropy_gap(t, n, q, rho)?;
    let scale = (t as f64 * n as f64 * (q as f64).ln()).max(1.0);
    Ok(gap <= 1e-12 * scale)
}

/// `log_q(V)/(tn) - H_{q^t}(rho)`; tends to zero from below as `n` grows.
pub fn ball_entropy_normalized_gap(t: u32, n: usize, q: u32, rho: f64) -> Result<f64> {
    let gap = ball_entropy_gap(t, n, q, rho)?;
    Ok(gap / (t as f64 * n as f64 * (q as f64).ln()))
}

/// One row of the rate-curve table. Binary-only columns are `None` for `q != 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundPoint {
    pub rho: f64,
    pub lower: f64,
    pub kappa2: f64,
    pub upper_trivial: Option<f64>,
    pub upper_better: Option<f64>,
}

/// Rate curves on a uniform grid of `grid_points` values of rho in `[0, 1]`.
pub fn emit_rate_curves(q: u64, grid_points: usize) -> Result<Vec<BoundPoint>> {
    if grid_points < 2 {
        return Err(Error::Domain("need at least two grid points".into()));
    }
    if q < 2 {
        return Err(Error::Domain(format!(
            "alphabet size must be >= 2, got {q}"
        )));
    }
    let last = (grid_points - 1) as f64;
    Ok((0..grid_points)
        .map(|i| {
            let rho = i as f64 / last;
            BoundPoint {
                rho,
                lower: ball_covering_lower(rho, q),
                kappa2: kappa2(rho, q),
                upper_trivial: (q == 2).then(|| upper_trivial(rho)),
                upper_better: (q == 2).then(|| upper_better(rho)),
            }
        })
        .collect())
}

pub const CURVE_HEADER: &str = "rho,lower,kappa2,upper_trivial,upper_better";

/// CSV rendering: fixed header, 12 significant digits, LF endings.
pub fn curves_to_csv(points: &[BoundPoint]) -> String {
    let mut out = String::with_capacity(points.len() * 80);
    out.push_str(CURVE_HEADER);
    out.push('\n');
    let cell = |v: Option<f64>| v.map(|x| format_significant(x, 12)).unwrap_or_default();
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_significant(p.rho, 12),
            format_significant(p.lower, 12),
            format_significant(p.kappa2, 12),
            cell(p.upper_trivial),
            cell(p.upper_better)
        ));
    }
    out
}

/// `%.{digits}g`-style formatting.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Uniform grid of `points` values strictly inside `(0, top)`.
pub fn interior_grid(top: f64, points: usize) -> Vec<f64> {
    (1..=points)
        .map(|i| top * i as f64 / (points + 1) as f64)
        .collect()
}

/// Uniform grid of `points` values covering `[0, top]` inclusive.
pub fn closed_grid(top: f64, points: usize) -> Vec<f64> {
    let last = (points.max(2) - 1) as f64;
    (0..points.max(2)).map(|i| top * i as f64 / last).collect()
}

/// Outcome of one grid verification suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checked: usize,
    pub violations: usize,
    /// Largest residual or smallest margin seen, depending on the suite.
    pub extremum: f64,
    pub passed: bool,
}

/// Entropy identity on an interior grid of `points` values per alphabet.
pub fn check_entropy_identity(qs: &[u64], points: usize, tol: f64) -> SuiteReport {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut violations = 0;
    for &q in qs {
        for rho in interior_grid(1.0 - 1.0 / (q * q) as f64, points) {
            let r = entropy_identity_residual(rho, q);
            worst = worst.max(r);
            checked += 1;
            if !(r < tol) {
                violations += 1;
            }
        }
    }
    SuiteReport {
        name: "entropy identity residual".into(),
        checked,
        violations,
        extremum: worst,
        passed: violations == 0,
    }
}

/// Positivity of `phi` inside the interval and vanishing at both ends.
pub fn check_phi(qs: &[u64], points: usize, endpoint_tol: f64) -> SuiteReport {
    let mut least = f64::INFINITY;
    let mut checked = 0;
    let mut violations = 0;
    for &q in qs {
        let top = 1.0 - 1.0 / (q * q) as f64;
        for rho in interior_grid(top, points) {
            let v = phi(rho, q);
            least = least.min(v);
            checked += 1;
            if !(v > 0.0) {
                violations += 1;
            }
        }
        for end in [0.0, top] {
            checked += 1;
            if !(phi(end, q).abs() < endpoint_tol) {
                violations += 1;
            }
        }
    }
    SuiteReport {
        name: "phi positivity".into(),
        checked,
        violations,
        extremum: least,
        passed: violations == 0,
    }
}

/// Exact ball sizes against the entropy upper bound over a parameter grid.
pub fn check_ball_entropy(
    ts: &[u32],
    qs: &[u32],
    ns: std::ops::RangeInclusive<usize>,
    rho_points: usize,
) -> Result<SuiteReport> {
    let mut checked = 0;
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for &t in ts {
        for &q in qs {
            let top = 1.0 - 1.0 / f64::from(q).powi(t as i32);
            let grid = closed_grid(top, rho_points);
            for n in ns.clone() {
                for &rho in &grid {
                    let gap = ball_entropy_gap(t, n, q, rho)?;
                    worst = worst.max(gap);
                    checked += 1;
                    if !ball_entropy_check(t, n, q, rho)? {
                        violations += 1;
                    }
                }
            }
        }
    }
    Ok(SuiteReport {
        name: "ball size entropy bound".into(),
        checked,
        violations,
        extremum: worst,
        passed: violations == 0,
    })
}
