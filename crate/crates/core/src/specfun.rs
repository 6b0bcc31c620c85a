//! Special functions used by the error analysis.
//!
//! Everything here is double precision and dependency free: a Lanczos
//! log-gamma, an asymptotic digamma, the chi-square upper tail through the
//! regularized incomplete gamma function, and the root search for the optimal
//! Chernoff parameter of the geometric mean of exponential variables.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { function: "ln_gamma", value: x });
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return (PI / (PI * x).sin()).ln() - ln_gamma_pos(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Digamma function ψ(x) = d/dx ln Γ(x) for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { function: "digamma", value: x });
    }
    Ok(digamma_pos(x))
}

fn digamma_pos(mut x: f64) -> f64 {
    // ψ(x) = ψ(x + 1) - 1/x until the asymptotic series is accurate
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli terms B_2k / (2k x^2k), k = 1..6
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32_760.0)))));
    acc + x.ln() - 0.5 / x - series
}

/// Regularized upper incomplete gamma function Q(a, x).
fn gamma_q(a: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma_pos(a);
    if x < a + 1.0 {
        // series for P(a, x)
        let mut ap = a;
        let mut del = 1.0 / a;
        let mut sum = del;
        for _ in 0..10_000 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        (1.0 - sum * log_prefactor.exp()).clamp(0.0, 1.0)
    } else {
        // modified Lentz continued fraction for Q(a, x)
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let step = d * c;
            h *= step;
            if (step - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (log_prefactor.exp() * h).clamp(0.0, 1.0)
    }
}

/// P{Z ≥ threshold} for Z ~ χ²(dof).
pub fn chi_square_tail(dof: u32, threshold: f64) -> Result<f64> {
    if dof == 0 {
        return Err(Error::Domain { function: "chi_square_tail", value: 0.0 });
    }
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::Domain { function: "chi_square_tail", value: threshold });
    }
    if threshold.is_infinite() {
        return Ok(0.0);
    }
    Ok(gamma_q(0.5 * dof as f64, 0.5 * threshold))
}

/// Optimal Chernoff parameter for the lower tail of the log geometric mean of
/// i.i.d. Exp(1) variables, together with the per-dimension exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChernoffSolution {
    pub delta: f64,
    /// Solves ψ(1 - v) = -(δ + γ); lies in (0, 1).
    pub v_delta: f64,
    /// v ψ(1 - v) + ln Γ(1 - v), never positive.
    pub exponent: f64,
}

impl ChernoffSolution {
    /// Upper bound on P{ln V_n ≤ -(δ + γ)} for blocks of length `n`.
    pub fn tail_bound(&self, n: usize) -> f64 {
        (n as f64 * self.exponent).exp()
    }
}

const CHERNOFF_LO: f64 = 1e-12;
const CHERNOFF_HI: f64 = 1.0 - 1e-9;
const CHERNOFF_MAX_RESIDUAL: f64 = 1e-9;

/// Solves ψ(1 - v) = -(δ + γ) for v by bisection.
pub fn chernoff_solve(delta: f64) -> Result<ChernoffSolution> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Domain { function: "chernoff_solve", value: delta });
    }
    let target = delta + EULER_GAMMA;
    // ψ(1 - v) is strictly decreasing in v, so f is too
    let f = |v: f64| digamma_pos(1.0 - v) + target;

    let (mut lo, mut hi) = (CHERNOFF_LO, CHERNOFF_HI);
    let (mut f_lo, mut f_hi) = (f(lo), f(hi));
    if f_lo <= 0.0 {
        hi = lo;
        f_hi = f_lo;
    } else if f_hi >= 0.0 {
        lo = hi;
        f_lo = f_hi;
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = f(mid);
            if fm > 0.0 {
                lo = mid;
                f_lo = fm;
            } else {
                hi = mid;
                f_hi = fm;
            }
        }
    }
    let (v, residual) = if f_lo.abs() <= f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    if residual.abs() > CHERNOFF_MAX_RESIDUAL {
        return Err(Error::Convergence { what: "chernoff_solve", residual: residual.abs() });
    }
    let psi = digamma_pos(1.0 - v);
    let exponent = (v * psi + ln_gamma_pos(1.0 - v)).min(0.0);
    Ok(ChernoffSolution { delta, v_delta: v, exponent })
}
