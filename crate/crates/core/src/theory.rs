// SPDX-License-Identifier: Apache-2.0

//! Thresholds, branching recursions and the second-moment bound for lines.

use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{Error, Result};

/// Terms below this fraction of the running sum end a tail series.
const SERIES_EPS: f64 = 1e-18;

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

/// Kahan-compensated sum.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for t in terms {
        let y = t - c;
        let s = sum + y;
        c = (s - sum) - y;
        sum = s;
    }
    sum
}

/// `P(Poisson(mu) >= d)`.
///
/// For `mu <= d` the upper tail is summed directly from its first term
/// (log-space start, no cancellation); otherwise the lower CDF is
/// complemented, which is safe because the tail is then at least about 1/2.
pub fn psi_d(mu: f64, d: usize) -> Result<f64> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::param(format!("psi_D needs a finite mu >= 0, got {mu}")));
    }
    Ok(psi_unchecked(mu, d))
}

pub(crate) fn psi_unchecked(mu: f64, d: usize) -> f64 {
    if d == 0 {
        return 1.0;
    }
    if mu == 0.0 {
        return 0.0;
    }
    if mu <= d as f64 {
        let mut term = (-mu + d as f64 * mu.ln() - ln_factorial(d)).exp();
        let mut terms = Vec::with_capacity(64);
        let mut j = d;
        while term > 0.0 {
            terms.push(term);
            j += 1;
            term *= mu / j as f64;
            if term < SERIES_EPS * terms[0] {
                break;
            }
        }
        compensated_sum(terms.into_iter().rev()).min(1.0)
    } else {
        let mut term = (-mu).exp();
        let mut lower = Vec::with_capacity(d);
        for j in 0..d {
            lower.push(term);
            term *= mu / (j + 1) as f64;
        }
        (1.0 - compensated_sum(lower.into_iter())).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GwSequence {
    pub d: usize,
    pub lambda: f64,
    /// `p[i]` is `p_{i+1}`: `p_1 = 1`, `p_{h+1} = psi_D(lambda p_h)`.
    pub p: Vec<f64>,
}

/// Probabilities that a Poisson(lambda) Galton-Watson tree contains a
/// complete D-ary subtree with `h` levels at its root, for `h = 1..=h_max`.
pub fn gw_sequence(d: usize, lambda: f64, h_max: usize) -> Result<GwSequence> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param(format!("lambda must be positive, got {lambda}")));
    }
    if h_max < 1 {
        return Err(Error::param("h_max must be at least 1"));
    }
    if d < 1 {
        return Err(Error::param("D must be at least 1"));
    }
    let mut p = Vec::with_capacity(h_max);
    p.push(1.0);
    for _ in 1..h_max {
        let last = *p.last().unwrap();
        p.push(psi_unchecked(lambda * last, d));
    }
    Ok(GwSequence { d, lambda, p })
}

const PSTAR_MAX_ITERS: usize = 1_000_000;
const PSTAR_FAST_ITERS: usize = 20_000;
const PSTAR_ZERO: f64 = 1e-10;

/// Location of the maximum of `psi_D(mu) / mu` (0 for `D = 1`, where the
/// ratio decreases from 1).
fn ratio_argmax(d: usize) -> f64 {
    if d <= 1 {
        return 0.0;
    }
    let f = |mu: f64| psi_unchecked(mu, d) / mu;
    // golden-section search; the ratio is unimodal in mu
    let (mut a, mut b) = (1e-6, d as f64 + 20.0);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut e = a + r * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    for _ in 0..200 {
        if fc > fe {
            b = e;
            e = c;
            fe = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + r * (b - a);
            fe = f(e);
        }
        if b - a < 1e-13 {
            break;
        }
    }
    (a + b) / 2.0
}

/// Largest fixed point of `p = psi_D(lambda p)` in `[0, 1]`.
///
/// The map is iterated from `p = 1`, which decreases monotonically to the
/// largest fixed point. When that does not settle quickly (near the critical
/// intensity, where convergence is sublinear) the answer is obtained by
/// bracketing instead: a positive fixed point exists iff
/// `lambda * max_mu psi_D(mu)/mu >= 1`, and beyond the maximiser the function
/// `psi_D(lambda p) / p - 1` has a single sign change, found by bisection.
pub fn p_star(d: usize, lambda: f64, tol: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param(format!("lambda must be positive, got {lambda}")));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol must be positive"));
    }
    if d < 1 {
        return Err(Error::param("D must be at least 1"));
    }
    let mut p = 1.0f64;
    for _ in 0..PSTAR_FAST_ITERS.min(PSTAR_MAX_ITERS) {
        let next = psi_unchecked(lambda * p, d);
        if next < PSTAR_ZERO {
            return Ok(0.0);
        }
        if (p - next).abs() <= tol * 1e-3 {
            return Ok(next);
        }
        p = next;
    }
    // slow regime: decide existence, then bisect on the decreasing branch
    let g = |q: f64| psi_unchecked(lambda * q, d) / q - 1.0;
    let mu_peak = ratio_argmax(d);
    let peak_value = if d == 1 {
        lambda - 1.0
    } else if mu_peak >= lambda {
        g(1.0)
    } else {
        g(mu_peak / lambda)
    };
    if peak_value < 0.0 {
        return Ok(0.0);
    }
    // g(lo) >= 0 > g(hi); the iterate p is an upper bound of the root
    let mut lo = if d == 1 { 0.0 } else { (mu_peak / lambda).min(1.0) };
    let mut hi = p;
    if g(hi) >= 0.0 {
        return Ok(hi);
    }
    for _ in 0..200 {
        if hi - lo <= tol * 1e-3 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid > 0.0 && g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    Ok(if root < PSTAR_ZERO { 0.0 } else { root })
}

/// Critical intensity `sup { lambda : p_star(D, lambda) = 0 }`, by bisection.
pub fn lambda_d(d: usize, tol: f64) -> Result<f64> {
    if d < 1 {
        return Err(Error::param("D must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol must be positive"));
    }
    let mut lo = 1e-9;
    let mut hi = d as f64 * std::f64::consts::E + 10.0;
    let inner = (tol * 1e-3).min(1e-12);
    for _ in 0..200 {
        if hi - lo <= tol * 0.5 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if p_star(d, mid, inner)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DaryThresholds {
    /// `sup { h : p_h > ln(n)/n }`.
    pub h_under: usize,
    /// `inf { h : p_h < 1/n }`.
    pub h_bar: usize,
    pub gap: usize,
}

/// Window edges for D-ary tree heights (indices follow `p_h`, i.e. levels).
pub fn dary_thresholds(d: usize, lambda: f64, n: f64) -> Result<DaryThresholds> {
    if !(n >= 3.0) {
        return Err(Error::param("n must be at least 3"));
    }
    if d < 1 {
        return Err(Error::param("D must be at least 1"));
    }
    if !(lambda > 0.0) {
        return Err(Error::param("lambda must be positive"));
    }
    if p_star(d, lambda, 1e-12)? > 0.0 {
        return Err(Error::InvalidRegime(format!(
            "lambda = {lambda} is at or above the critical value for D = {d}"
        )));
    }
    let upper = n.ln() / n;
    let lower = 1.0 / n;
    let mut p = 1.0f64;
    let mut h = 1usize;
    let mut h_under = 0usize;
    loop {
        if p > upper {
            h_under = h;
        }
        if p < lower {
            break;
        }
        p = psi_unchecked(lambda * p, d);
        h += 1;
        if h > 100_000 {
            return Err(Error::InvalidRegime("recursion does not decay".into()));
        }
    }
    Ok(DaryThresholds {
        h_under,
        h_bar: h,
        gap: h - h_under,
    })
}

/// `ln(n) / ln(1/lambda)`, the longest-path scale in the subcritical regime.
pub fn line_threshold(lambda: f64, n: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidRegime(format!("line threshold needs 0 < lambda < 1, got {lambda}")));
    }
    if !(n > 1.0) {
        return Err(Error::param("n must exceed 1"));
    }
    Ok(n.ln() / (1.0 / lambda).ln())
}

/// `ln(n) / ln(ln(n))`, the maximum-degree scale.
pub fn star_threshold(n: f64) -> Result<f64> {
    if !(n > std::f64::consts::E) {
        return Err(Error::param(format!("star threshold needs n > e, got {n}")));
    }
    Ok(n.ln() / n.ln().ln())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovBoundReport {
    pub n: usize,
    pub k: usize,
    pub lambda: f64,
    /// Transition matrix of the dominating chain, row-major.
    pub p: [[f64; 3]; 3],
    /// `P` with its last column weighted by `x = n/lambda`, row-major.
    pub m: [[f64; 3]; 3],
    pub f1: [f64; 3],
    /// `F(1) M^{K-2} e`.
    pub bound: f64,
    /// Eigenvalues of `M`, real parts, ascending.
    pub eigvals_m: [f64; 3],
    /// `{0, 1/lambda, 1}` ascending.
    pub eigvals_m0: [f64; 3],
    /// Set when `lambda = 1` makes `1/lambda` collide with 1.
    pub degenerate: bool,
}

/// Upper bound on `E_0(L^2)` for a planted line from the three-state chain
/// over states (-1, 0, 1).
pub fn markov_bound_e0l2(n: usize, k: usize, lambda: f64) -> Result<MarkovBoundReport> {
    if k <= 2 || k >= n {
        return Err(Error::param(format!("need 2 < K < n, got K = {k}, n = {n}")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param("lambda must be positive"));
    }
    let nf = n as f64;
    let kf = k as f64;
    let np = nf - kf;
    let x = nf / lambda;
    let stay = 1.0 - kf / np;
    let p = [
        [stay, kf / np, 0.0],
        [stay, (kf - 2.0) / np, 2.0 / np],
        [stay, (kf - 1.0) / np, 1.0 / np],
    ];
    let m = [
        [p[0][0], p[0][1], x * p[0][2]],
        [p[1][0], p[1][1], x * p[1][2]],
        [p[2][0], p[2][1], x * p[2][2]],
    ];
    let f1 = [stay, kf / np * (1.0 - 2.0 / np), x * (kf / np) * (2.0 / np)];
    let mut row = f1;
    for _ in 0..k - 2 {
        row = [
            row[0] * m[0][0] + row[1] * m[1][0] + row[2] * m[2][0],
            row[0] * m[0][1] + row[1] * m[1][1] + row[2] * m[2][1],
            row[0] * m[0][2] + row[1] * m[1][2] + row[2] * m[2][2],
        ];
    }
    let bound = row.iter().sum();
    let mut eigvals_m = numeric_eigenvalues(&m);
    eigvals_m.sort_by(f64::total_cmp);
    let mut eigvals_m0 = [0.0, 1.0 / lambda, 1.0];
    eigvals_m0.sort_by(f64::total_cmp);
    Ok(MarkovBoundReport {
        n,
        k,
        lambda,
        p,
        m,
        f1,
        bound,
        eigvals_m,
        eigvals_m0,
        degenerate: lambda == 1.0,
    })
}

fn numeric_eigenvalues(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let mat = Matrix3::from_fn(|i, j| m[i][j]);
    let ev = mat.complex_eigenvalues();
    [ev[0].re, ev[1].re, ev[2].re]
}

/// Limit matrix as `K/n -> 0`.
pub fn m0_matrix(lambda: f64) -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [1.0, 0.0, 2.0 / lambda], [1.0, 0.0, 1.0 / lambda]]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct M0Eigensystem {
    pub lambda: f64,
    /// `(0, 1/lambda, 1)`.
    pub eigenvalues: [f64; 3],
    /// Left eigenvectors matching `eigenvalues`.
    pub left_eigenvectors: [[f64; 3]; 3],
    /// `max |u M0 - r u|` over the three pairs.
    pub max_residual: f64,
}

/// Analytic left eigensystem of the limit matrix, verified numerically.
pub fn m0_eigensystem(lambda: f64) -> Result<M0Eigensystem> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param("lambda must be positive"));
    }
    if lambda == 1.0 {
        return Err(Error::DegenerateSpectrum("1/lambda coincides with 1 at lambda = 1".into()));
    }
    let eigenvalues = [0.0, 1.0 / lambda, 1.0];
    let left_eigenvectors = [[1.0, 1.0, -2.0], [-lambda / (lambda - 1.0), 0.0, 1.0], [1.0, 0.0, 0.0]];
    let m0 = m0_matrix(lambda);
    let mut max_residual = 0.0f64;
    for (r, u) in eigenvalues.iter().zip(&left_eigenvectors) {
        for j in 0..3 {
            let um: f64 = (0..3).map(|i| u[i] * m0[i][j]).sum();
            max_residual = max_residual.max((um - r * u[j]).abs());
        }
    }
    Ok(M0Eigensystem {
        lambda,
        eigenvalues,
        left_eigenvectors,
        max_residual,
    })
}
