//! Seeded AWGN and fast Rayleigh fading channels with coherent receivers.
//!
//! Noise has variance ½ per real dimension on complex channels and 1 on real
//! channels, so each channel use carries unit noise energy and the SNR of a
//! power-P code is P. Complex fading coefficients are circular Gaussian with
//! variance ½ per real dimension; real fading coefficients are their moduli.
//! Either way `|h_i|²` is exponential with mean 1.
//!
//! A realization is a pure function of `(master_seed, trial_index)`: fading is
//! drawn from [`Stream::Fading`] and noise from [`Stream::Noise`].

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::{stream_rng, Stream};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelModel {
    AwgnReal,
    AwgnComplex,
    RayleighReal,
    RayleighComplex,
}

impl ChannelModel {
    pub const ALL: [ChannelModel; 4] =
        [ChannelModel::AwgnReal, ChannelModel::AwgnComplex, ChannelModel::RayleighReal, ChannelModel::RayleighComplex];

    pub fn is_complex(self) -> bool {
        matches!(self, ChannelModel::AwgnComplex | ChannelModel::RayleighComplex)
    }

    pub fn is_fading(self) -> bool {
        matches!(self, ChannelModel::RayleighReal | ChannelModel::RayleighComplex)
    }

    /// Noise variance per real dimension.
    pub fn noise_variance(self) -> f64 {
        if self.is_complex() { 0.5 } else { 1.0 }
    }

    pub fn label(self) -> &'static str {
        match self {
            ChannelModel::AwgnReal => "awgn_real",
            ChannelModel::AwgnComplex => "awgn_complex",
            ChannelModel::RayleighReal => "rayleigh_real",
            ChannelModel::RayleighComplex => "rayleigh_complex",
        }
    }

    /// The AWGN or fading model matching a field's signature.
    pub fn for_signature(complex: bool, fading: bool) -> Self {
        match (complex, fading) {
            (false, false) => ChannelModel::AwgnReal,
            (true, false) => ChannelModel::AwgnComplex,
            (false, true) => ChannelModel::RayleighReal,
            (true, true) => ChannelModel::RayleighComplex,
        }
    }
}

impl fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ChannelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChannelModel::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown channel model `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub model: ChannelModel,
    /// One coefficient per channel use; purely real on real channels and all
    /// ones on AWGN channels.
    pub fading: Vec<Complex64>,
    /// Noise in real coordinates.
    pub noise: Vec<f64>,
    /// `(master_seed, trial_index)`.
    pub seed_path: (u64, u64),
}

impl ChannelRealization {
    /// Draws the fading and noise for `dim` real coordinates.
    pub fn draw(model: ChannelModel, dim: usize, master_seed: u64, trial_index: u64) -> Result<Self> {
        if model.is_complex() && dim % 2 != 0 {
            return Err(Error::DimensionMismatch { expected: dim + 1, got: dim });
        }
        let uses = if model.is_complex() { dim / 2 } else { dim };
        let fading = if model.is_fading() {
            let mut rng = stream_rng(master_seed, trial_index, Stream::Fading);
            let s = 0.5f64.sqrt();
            (0..uses)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    let h = Complex64::new(s * re, s * im);
                    if model.is_complex() { h } else { Complex64::new(h.norm(), 0.0) }
                })
                .collect()
        } else {
            vec![Complex64::new(1.0, 0.0); uses]
        };
        let mut rng = stream_rng(master_seed, trial_index, Stream::Noise);
        let sigma = model.noise_variance().sqrt();
        let noise = (0..dim).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect();
        Ok(ChannelRealization { model, fading, noise, seed_path: (master_seed, trial_index) })
    }

    /// Componentwise `fading · v` on real coordinates.
    pub fn apply_fading(&self, v: &[f64]) -> Vec<f64> {
        if self.model.is_complex() {
            v.chunks(2)
                .zip(&self.fading)
                .flat_map(|(p, h)| {
                    let z = h * Complex64::new(p[0], p[1]);
                    [z.re, z.im]
                })
                .collect()
        } else {
            v.iter().zip(&self.fading).map(|(x, h)| h.re * x).collect()
        }
    }

    /// Multiplies the noise by `scale`; zero gives a noiseless channel.
    pub fn scale_noise(&mut self, scale: f64) {
        for w in &mut self.noise {
            *w *= scale;
        }
    }

    /// `y = fading · s + w`.
    pub fn output(&self, s: &[f64]) -> Result<Vec<f64>> {
        if s.len() != self.noise.len() {
            return Err(Error::DimensionMismatch { expected: self.noise.len(), got: s.len() });
        }
        Ok(self.apply_fading(s).iter().zip(&self.noise).map(|(a, w)| a + w).collect())
    }
}

/// Sends `s` through one seeded use of the channel.
pub fn transmit(s: &[f64], model: ChannelModel, master_seed: u64, trial_index: u64) -> Result<(Vec<f64>, ChannelRealization)> {
    transmit_scaled(s, model, master_seed, trial_index, 1.0)
}

/// [`transmit`] with the noise multiplied by `noise_scale`.
pub fn transmit_scaled(
    s: &[f64],
    model: ChannelModel,
    master_seed: u64,
    trial_index: u64,
    noise_scale: f64,
) -> Result<(Vec<f64>, ChannelRealization)> {
    if model.is_complex() && s.len() % 2 != 0 {
        return Err(Error::DimensionMismatch { expected: s.len() + 1, got: s.len() });
    }
    let mut realization = ChannelRealization::draw(model, s.len(), master_seed, trial_index)?;
    if noise_scale != 1.0 {
        realization.scale_noise(noise_scale);
    }
    let y = realization.output(s)?;
    Ok((y, realization))
}

/// `V_n = (Π |h_i|²)^{1/n}`, computed in log space.
pub fn geometric_mean_statistic(realization: &ChannelRealization) -> f64 {
    let n = realization.fading.len() as f64;
    (realization.fading.iter().map(|h| h.norm_sqr().ln()).sum::<f64>() / n).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{chernoff_solve, EULER_GAMMA};

    #[test]
    fn parse_and_display() {
        for m in ChannelModel::ALL {
            assert_eq!(m.label().parse::<ChannelModel>().unwrap(), m);
            assert_eq!(m.to_string(), m.label());
        }
        assert!("awgn".parse::<ChannelModel>().is_err());
    }

    #[test]
    fn noiseless_awgn_is_identity() {
        let s = vec![1.0, -2.0, 0.5, 3.0];
        for m in [ChannelModel::AwgnReal, ChannelModel::AwgnComplex] {
            let (y, r) = transmit_scaled(&s, m, 1, 2, 0.0).unwrap();
            assert_eq!(y, s);
            assert_eq!(geometric_mean_statistic(&r), 1.0);
        }
    }

    #[test]
    fn dimension_checks() {
        assert!(transmit(&[1.0, 2.0, 3.0], ChannelModel::AwgnComplex, 0, 0).is_err());
        let r = ChannelRealization::draw(ChannelModel::AwgnReal, 3, 0, 0).unwrap();
        assert!(r.output(&[1.0]).is_err());
    }

    #[test]
    fn realizations_are_reproducible() {
        let a = ChannelRealization::draw(ChannelModel::RayleighComplex, 8, 42, 7).unwrap();
        let b = ChannelRealization::draw(ChannelModel::RayleighComplex, 8, 42, 7).unwrap();
        let c = ChannelRealization::draw(ChannelModel::RayleighComplex, 8, 42, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn complex_fading_rotates_pairs() {
        let r = ChannelRealization {
            model: ChannelModel::RayleighComplex,
            fading: vec![Complex64::new(0.0, 2.0)],
            noise: vec![0.0, 0.0],
            seed_path: (0, 0),
        };
        assert_eq!(r.apply_fading(&[1.0, 1.0]), vec![-2.0, 2.0]);
    }

    fn mean_var(x: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        (m, x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0))
    }

    #[test]
    fn noise_variance_conventions() {
        for (model, want) in [(ChannelModel::AwgnComplex, 0.5), (ChannelModel::AwgnReal, 1.0)] {
            let w: Vec<f64> =
                (0..125_000).flat_map(|t| ChannelRealization::draw(model, 8, 3, t).unwrap().noise).collect();
            assert_eq!(w.len(), 1_000_000);
            let (m, v) = mean_var(&w);
            assert!(m.abs() < 0.01 && (v - want).abs() < 0.01, "{model}: {m} {v}");
        }
    }

    #[test]
    fn fading_moments() {
        let real: Vec<f64> = (0..125_000)
            .flat_map(|t| ChannelRealization::draw(ChannelModel::RayleighReal, 8, 4, t).unwrap().fading)
            .map(|g| g.re * g.re)
            .collect();
        let (m, v) = mean_var(&real);
        assert!((m - 1.0).abs() < 0.01 && (v - 1.0).abs() < 0.03, "{m} {v}");

        let x: Vec<f64> = (0..250_000)
            .flat_map(|t| ChannelRealization::draw(ChannelModel::RayleighComplex, 8, 5, t).unwrap().fading)
            .map(|h| h.norm_sqr())
            .collect();
        assert_eq!(x.len(), 1_000_000);
        let (m, v) = mean_var(&x);
        assert!((m - 1.0).abs() < 0.01 && (v - 1.0).abs() < 0.03, "{m} {v}");
        let mean_log = x.iter().map(|v| v.ln()).sum::<f64>() / x.len() as f64;
        assert!((mean_log + EULER_GAMMA).abs() < 0.01, "{mean_log}");
    }

    #[test]
    fn geometric_mean_tail_respects_chernoff() {
        let n = 8;
        let delta = 0.5;
        let trials = 100_000u64;
        let hits = (0..trials)
            .filter(|&t| {
                let r = ChannelRealization::draw(ChannelModel::RayleighComplex, 2 * n, 6, t).unwrap();
                geometric_mean_statistic(&r).ln() <= -(delta + EULER_GAMMA)
            })
            .count() as f64;
        let p = hits / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let bound = chernoff_solve(delta).unwrap().tail_bound(n);
        assert!(p <= bound + 3.0 * sigma, "{p} vs {bound}");
    }
}
