//! Closed-form error bounds, achievable rates, and gap tables.
//!
//! Rates are in bits per channel use: per complex symbol on complex channels
//! and per real symbol on real channels. A rate bound has the shape
//! `R < capacity-like term − gap`, where the gap depends only on the lattice
//! family and never on P. Negative rates are reported as they come out.

use std::fmt::Write as _;

use crate::channel::ChannelModel;
use crate::lattice::LatticeInvariants;
use crate::specfun::{chernoff_solve, chi_square_tail, ln_gamma, EULER_GAMMA};
use crate::{Error, Result};

/// Root discriminant bound of the complex Martinet tower.
pub const MARTINET_G: f64 = 92.368;
/// Root discriminant bound of the real Martinet tower.
pub const MARTINET_G1: f64 = 1058.0;
pub const HAJIR_MAIRE_G: f64 = 82.2;
pub const HAJIR_MAIRE_G1: f64 = 954.3;
/// Asymptotic lower bound on the root discriminant of totally real fields.
pub const ODLYZKO_REAL: f64 = 60.8;
/// Zimmert's constants for `N_min(K) ≤ (50.7^{r1/2}·19.9^{r2})^{-1}·√|d_K|`.
pub const ZIMMERT_REAL: f64 = 50.7;
pub const ZIMMERT_COMPLEX: f64 = 19.9;
/// Per-dimension decay bases of the ideal-lattice ceilings `Nd ≤ b^{-n}`.
pub const IDEAL_DECAY_COMPLEX: f64 = 3.1;
pub const IDEAL_DECAY_REAL: f64 = 7.12;

const PI_E: f64 = std::f64::consts::PI * std::f64::consts::E;

pub fn db_to_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn power_to_db(p: f64) -> f64 {
    10.0 * p.log10()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateBound {
    pub label: String,
    pub channel: ChannelModel,
    pub power: f64,
    pub rate: f64,
    pub gap: f64,
    /// Every constant entering the formula, in order of appearance.
    pub parameters: Vec<(String, f64)>,
}

impl RateBound {
    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.iter().find(|p| p.0 == name).map(|p| p.1)
    }
}

/// The P-dependent head of every rate bound: `log2 P` or `½log2 P`, with
/// `P·e^{−γ}` in place of P under fading.
pub fn rate_head(model: ChannelModel, power: f64) -> f64 {
    let effective = if model.is_fading() { power * (-EULER_GAMMA).exp() } else { power };
    if model.is_complex() { effective.log2() } else { 0.5 * effective.log2() }
}

/// Gap term for a root-discriminant constant: `log2(2G/πe)` on complex
/// channels and `½log2(2G1/πe)` on real ones.
pub fn discriminant_gap(model: ChannelModel, constant: f64) -> f64 {
    let g = (2.0 * constant / PI_E).log2();
    if model.is_complex() { g } else { 0.5 * g }
}

/// Rate achievable with codes from a tower of fields whose root discriminant
/// stays below `constant`.
pub fn achievable_rate(model: ChannelModel, power: f64, constant: f64) -> RateBound {
    let gap = discriminant_gap(model, constant);
    let name = if model.is_complex() { "G" } else { "G1" };
    let mut parameters = vec![("P".to_string(), power), (name.to_string(), constant)];
    if model.is_fading() {
        parameters.push(("gamma".into(), EULER_GAMMA));
    }
    RateBound {
        label: format!("{model}_{name}"),
        channel: model,
        power,
        rate: rate_head(model, power) - gap,
        gap,
        parameters,
    }
}

/// Reference capacity: `log2(1+P)` (AWGN) or the fading lower bound
/// `log2(1+P·e^{−γ})`, halved on real channels.
pub fn capacity_reference(model: ChannelModel, power: f64) -> f64 {
    let effective = if model.is_fading() { power * (-EULER_GAMMA).exp() } else { power };
    let c = effective.ln_1p() / std::f64::consts::LN_2;
    if model.is_complex() { c } else { 0.5 * c }
}

/// Rate bound driven by a lattice's own invariants: the normalized product
/// distance under fading, the normalized shortest vector otherwise.
pub fn gap_from_lattice(invariants: &LatticeInvariants, model: ChannelModel, power: f64) -> Result<RateBound> {
    let n = invariants.ambient.dim() as f64;
    if invariants.ambient.is_complex() != model.is_complex() {
        return Err(Error::Config(format!("{model} does not match the lattice ambient space")));
    }
    let (gap, parameters) = if model.is_fading() {
        let ndp = invariants.ndp.ok_or(Error::UnknownInvariant("ndp"))?;
        let nd = ndp.powf(2.0 / n);
        let gap = if model.is_complex() { (4.0 / (PI_E * nd)).log2() } else { 0.5 * (2.0 / (PI_E * nd)).log2() };
        (gap, vec![("P".to_string(), power), ("ndp".into(), ndp), ("gamma".into(), EULER_GAMMA)])
    } else {
        let nsv = invariants.nsv;
        let gap = if model.is_complex() {
            (4.0 * n / (nsv * nsv * PI_E)).log2()
        } else {
            0.5 * (2.0 * n / (nsv * nsv * PI_E)).log2()
        };
        (gap, vec![("P".to_string(), power), ("nsv".into(), nsv)])
    };
    parameters_ok(&parameters)?;
    Ok(RateBound {
        label: format!("{model}_lattice"),
        channel: model,
        power,
        rate: rate_head(model, power) - gap,
        gap,
        parameters,
    })
}

fn parameters_ok(parameters: &[(String, f64)]) -> Result<()> {
    match parameters.iter().find(|p| !(p.1.is_finite() && p.1 > 0.0)) {
        Some((_, value)) => Err(Error::Domain { function: "gap_from_lattice", value: *value }),
        None => Ok(()),
    }
}

/// `ln(n!/nⁿ)`, the log of Minkowski's ceiling on the normalized product
/// distance of a full lattice in ℝⁿ.
pub fn ln_minkowski_ceiling(n: usize) -> f64 {
    let n = n as f64;
    ln_gamma(n + 1.0).expect("positive argument") - n * n.ln()
}

/// Real fading gap of a lattice meeting Minkowski's ceiling in dimension n.
/// Tends to `½log2(2e/π)` as n grows.
pub fn minkowski_gap(n: usize) -> f64 {
    let nd = (2.0 / n as f64 * ln_minkowski_ceiling(n)).exp();
    0.5 * (2.0 / (PI_E * nd)).log2()
}

/// `½log2(2e/π)`.
pub fn minkowski_limit_gap() -> f64 {
    0.5 * (2.0 * std::f64::consts::E / std::f64::consts::PI).log2()
}

fn entry(label: &str, model: ChannelModel, power: f64, gap: f64, parameters: Vec<(&str, f64)>) -> RateBound {
    let mut params = vec![("P".to_string(), power)];
    params.extend(parameters.into_iter().map(|(k, v)| (k.to_string(), v)));
    if model.is_fading() {
        params.push(("gamma".into(), EULER_GAMMA));
    }
    RateBound { label: label.into(), channel: model, power, rate: rate_head(model, power) - gap, gap, parameters: params }
}

/// Reference power of [`bound_table`], 20 dB.
pub const TABLE_POWER: f64 = 100.0;

/// Asymptotic gap constants at P = [`TABLE_POWER`].
pub fn bound_table() -> Vec<RateBound> {
    bound_table_at(TABLE_POWER)
}

pub fn bound_table_at(power: f64) -> Vec<RateBound> {
    use ChannelModel::*;
    let mut out = Vec::new();
    for (family, g, g1) in [("martinet", MARTINET_G, MARTINET_G1), ("hajir_maire", HAJIR_MAIRE_G, HAJIR_MAIRE_G1)] {
        for model in ChannelModel::ALL {
            let mut b = achievable_rate(model, power, if model.is_complex() { g } else { g1 });
            b.label = format!("{family}_{model}");
            out.push(b);
        }
    }
    out.push(entry(
        "odlyzko_limit",
        RayleighReal,
        power,
        discriminant_gap(RayleighReal, ODLYZKO_REAL),
        vec![("root_disc", ODLYZKO_REAL)],
    ));
    out.push(entry("minkowski_limit", RayleighReal, power, minkowski_limit_gap(), vec![]));
    // ideal lattices: Nd ≤ b^{-n} puts Nd^{2/n} at b^{-2}
    let b = IDEAL_DECAY_COMPLEX;
    out.push(entry(
        "ideal_ceiling_complex",
        RayleighComplex,
        power,
        (4.0 * b * b / PI_E).log2(),
        vec![("decay_base", b), ("zimmert_r2", ZIMMERT_COMPLEX)],
    ));
    let b = IDEAL_DECAY_REAL;
    out.push(entry(
        "ideal_ceiling_real",
        RayleighReal,
        power,
        0.5 * (2.0 * b * b / PI_E).log2(),
        vec![("decay_base", b), ("zimmert_r1", ZIMMERT_REAL)],
    ));
    out
}

/// CSV rows `label,channel,P_db,rate_bits,gap_bits,params`.
pub fn rate_table_csv(rows: &[RateBound]) -> String {
    let mut out = String::from("label,channel,P_db,rate_bits,gap_bits,params\n");
    for r in rows {
        let params: Vec<String> = r.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(
            out,
            "{},{},{:.6},{:.12},{:.12},{}",
            r.label,
            r.channel,
            power_to_db(r.power),
            r.rate,
            r.gap,
            params.join(";")
        )
        .unwrap();
    }
    out
}

/// Sphere bound `P{‖w‖² ≥ (d/2)²}` under the model's noise convention, over
/// `n` channel uses.
pub fn sphere_bound(min_distance: f64, n: usize, model: ChannelModel) -> Result<f64> {
    if !(min_distance > 0.0) {
        return Err(Error::Domain { function: "sphere_bound", value: min_distance });
    }
    let quarter = min_distance * min_distance / 4.0;
    if model.is_complex() {
        chi_square_tail(2 * n as u32, quarter / 0.5)
    } else {
        chi_square_tail(n as u32, quarter)
    }
}

/// Choice of the slack δ in [`fading_error_bound`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Delta {
    /// The largest δ with `(α²/4)·e^{−(δ+γ)} ≥ 1+ε`.
    Auto,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FadingBound {
    /// Total bound, saturated at 1.
    pub value: f64,
    pub noise_term: f64,
    pub fading_term: f64,
    pub delta: Option<f64>,
    pub epsilon: f64,
}

/// `P{‖w‖²/n ≥ 1+ε}` bound: the larger of the Laurent–Massart form
/// `2e^{−nε²/8}` (complex) or `2e^{−nε²/16}` (real, n degrees of freedom) and
/// the exact chi-square tail. The exponential form alone stops being an upper
/// bound for large ε.
pub fn noise_tail_bound(n: usize, epsilon: f64, model: ChannelModel) -> Result<f64> {
    let nf = n as f64;
    let (lm, exact) = if model.is_complex() {
        (2.0 * (-nf * epsilon * epsilon / 8.0).exp(), chi_square_tail(2 * n as u32, 2.0 * nf * (1.0 + epsilon))?)
    } else {
        (2.0 * (-nf * epsilon * epsilon / 16.0).exp(), chi_square_tail(n as u32, nf * (1.0 + epsilon))?)
    };
    Ok(lm.max(exact))
}

/// Error bound for the scaled ring-of-integers lattice `α·ψ(O_K)` over `n`
/// fast-fading channel uses, from the split
/// `P_e ≤ P{‖w‖²/n ≥ 1+ε} + P{(α²/4)·V_n < 1+ε}`. The second term is bounded
/// by the Chernoff tail of `ln V_n` at slack δ and is only available when
/// `(α²/4)·e^{−(δ+γ)} ≥ 1+ε`; otherwise the bound is 1. The real-channel
/// version reuses the complex derivation with n degrees of freedom.
pub fn fading_error_bound(n: usize, alpha: f64, delta: Delta, epsilon: f64, model: ChannelModel) -> Result<FadingBound> {
    if n == 0 || !(alpha > 0.0) || !(epsilon > 0.0) {
        return Err(Error::Domain { function: "fading_error_bound", value: if n == 0 { 0.0 } else { alpha.min(epsilon) } });
    }
    let noise_term = noise_tail_bound(n, epsilon, model)?;
    let limit = (alpha * alpha / (4.0 * (1.0 + epsilon))).ln() - EULER_GAMMA;
    let delta = match delta {
        Delta::Auto => limit,
        Delta::Fixed(d) if d <= limit * (1.0 + 1e-12) => d,
        Delta::Fixed(d) => {
            return Ok(FadingBound { value: 1.0, noise_term, fading_term: 1.0, delta: Some(d), epsilon });
        }
    };
    if !(delta > 0.0) {
        return Ok(FadingBound { value: 1.0, noise_term, fading_term: 1.0, delta: None, epsilon });
    }
    let fading_term = chernoff_solve(delta)?.tail_bound(n);
    Ok(FadingBound { value: (noise_term + fading_term).min(1.0), noise_term, fading_term, delta: Some(delta), epsilon })
}

/// Grid points of the ε search in [`optimized_fading_error_bound`].
pub const EPSILON_GRID: usize = 100;

/// [`fading_error_bound`] minimized over a log grid of ε in [1e-3, 4] with
/// δ = auto.
pub fn optimized_fading_error_bound(n: usize, alpha: f64, model: ChannelModel) -> Result<FadingBound> {
    let (lo, hi) = (1e-3f64.ln(), 4f64.ln());
    let mut best: Option<FadingBound> = None;
    for k in 0..EPSILON_GRID {
        let eps = (lo + (hi - lo) * k as f64 / (EPSILON_GRID - 1) as f64).exp();
        let b = fading_error_bound(n, alpha, Delta::Auto, eps, model)?;
        let total = b.noise_term + b.fading_term;
        if best.as_ref().is_none_or(|x| total < x.noise_term + x.fading_term) {
            best = Some(b);
        }
    }
    Ok(best.expect("nonempty grid"))
}
