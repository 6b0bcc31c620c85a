//! Naive lattice decoding and maximum-likelihood decoding with coherent CSI.

use crate::channel::ChannelRealization;
use crate::codebook::Codebook;
use crate::lattice::{Enumerator, LatticeBasis};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub decoded: Vec<f64>,
    /// Codebook index of the decision, if it is a codeword.
    pub index: Option<usize>,
    pub is_codeword: bool,
    pub correct: bool,
    /// `‖y − fading·decoded‖²`.
    pub metric: f64,
}

fn distance_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_dims(y: &[f64], realization: &ChannelRealization, codebook: &Codebook) -> Result<()> {
    let dim = codebook.lattice.rank();
    if y.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: y.len() });
    }
    if realization.noise.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: realization.noise.len() });
    }
    Ok(())
}

/// Closest point to `y` in the faded, shifted infinite lattice
/// `fading·(x + α·ψ(O_K))`. The fading multiplies the basis, it is never
/// divided out.
pub fn nld_decode(y: &[f64], realization: &ChannelRealization, codebook: &Codebook, sent: usize) -> Result<DecodeOutcome> {
    nld_decode_with(&Enumerator::default(), y, realization, codebook, sent)
}

pub fn nld_decode_with(
    enumerator: &Enumerator,
    y: &[f64],
    realization: &ChannelRealization,
    codebook: &Codebook,
    sent: usize,
) -> Result<DecodeOutcome> {
    check_dims(y, realization, codebook)?;
    let faded: LatticeBasis = codebook.lattice.map_vectors(|b| realization.apply_fading(b))?;
    let faded_shift = realization.apply_fading(&codebook.shift);
    let target: Vec<f64> = y.iter().zip(&faded_shift).map(|(a, b)| a - b).collect();
    let cv = enumerator.closest_vector(&faded, &target)?;
    let decoded: Vec<f64> = codebook.lattice.point(&cv.coords).iter().zip(&codebook.shift).map(|(v, x)| v + x).collect();
    let index = codebook.index_of(&cv.coords);
    Ok(DecodeOutcome {
        decoded,
        index,
        is_codeword: index.is_some(),
        correct: index == Some(sent),
        metric: cv.dist_sq,
    })
}

/// Exhaustive minimum-distance search over the codebook; ties go to the
/// lowest index.
pub fn ml_decode(y: &[f64], realization: &ChannelRealization, codebook: &Codebook, sent: usize) -> Result<DecodeOutcome> {
    check_dims(y, realization, codebook)?;
    let mut best = (f64::INFINITY, 0);
    for (i, s) in codebook.points.iter().enumerate() {
        let d = distance_sq(y, &realization.apply_fading(s));
        if d < best.0 {
            best = (d, i);
        }
    }
    let (metric, i) = best;
    if !metric.is_finite() {
        return Err(Error::EmptyEnumeration { radius: 0.0 });
    }
    Ok(DecodeOutcome {
        decoded: codebook.points[i].clone(),
        index: Some(i),
        is_codeword: true,
        correct: i == sent,
        metric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{transmit, transmit_scaled, ChannelModel};
    use crate::codebook::{carve, CodeConfig};
    use crate::numberfield::{builtin_catalog, find_field, FieldSpec};
    use num_complex::Complex64;

    fn code(name: &str, rate: f64, power: f64) -> Codebook {
        let catalog = builtin_catalog();
        let f: &FieldSpec = find_field(&catalog, name).unwrap();
        carve(&CodeConfig { field: f, rate, power, seed: 17 }).unwrap()
    }

    #[test]
    fn noiseless_decoding_is_exact() {
        for (name, model) in [("Q(i)", ChannelModel::RayleighComplex), ("K4(725)", ChannelModel::AwgnReal)] {
            let c = code(name, 1.0, 20.0);
            for sent in 0..c.len() {
                let (y, r) = transmit_scaled(&c.points[sent], model, 1, sent as u64, 0.0).unwrap();
                let nld = nld_decode(&y, &r, &c, sent).unwrap();
                let ml = ml_decode(&y, &r, &c, sent).unwrap();
                assert!(nld.correct && ml.correct);
                assert!(nld.metric < 1e-18 && ml.metric < 1e-18);
            }
        }
    }

    #[test]
    fn small_noise_is_corrected() {
        let c = code("Q(sqrt(2))", 1.0, 50.0);
        let d = c.min_distance().unwrap();
        for t in 0..200 {
            let sent = t as usize % c.len();
            let (mut y, r) = transmit_scaled(&c.points[sent], ChannelModel::AwgnReal, 2, t, 0.0).unwrap();
            let (_, noisy) = transmit(&c.points[sent], ChannelModel::AwgnReal, 2, t).unwrap();
            let w = &noisy.noise;
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            for (yi, wi) in y.iter_mut().zip(w) {
                *yi += wi * 0.49 * d / norm;
            }
            assert!(nld_decode(&y, &r, &c, sent).unwrap().correct);
        }
    }

    #[test]
    fn nld_matches_brute_force_and_dominance() {
        for (name, model) in [("Q(sqrt(2))", ChannelModel::RayleighReal), ("Q(i)", ChannelModel::RayleighComplex)] {
            let c = code(name, 1.5, 8.0);
            let mut violations = 0;
            for t in 0..300u64 {
                let sent = (t as usize * 7) % c.len();
                let (y, r) = transmit(&c.points[sent], model, 3, t).unwrap();
                let nld = nld_decode(&y, &r, &c, sent).unwrap();
                let ml = ml_decode(&y, &r, &c, sent).unwrap();
                // brute force over a coordinate box around the true point
                let mut best = f64::INFINITY;
                let center = &c.coords[sent];
                for a in -12..=12 {
                    for b in -12..=12 {
                        let k = [center[0] + a, center[1] + b];
                        let v: Vec<f64> = c.lattice.point(&k).iter().zip(&c.shift).map(|(p, x)| p + x).collect();
                        best = best.min(distance_sq(&y, &r.apply_fading(&v)));
                    }
                }
                assert!((nld.metric - best).abs() <= 1e-9 * best.max(1.0), "{name}: {} vs {best}", nld.metric);
                if nld.is_codeword {
                    assert!(ml.metric <= nld.metric + 1e-12);
                }
                if nld.correct && !ml.correct {
                    violations += 1;
                }
            }
            assert_eq!(violations, 0);
        }
    }

    #[test]
    fn ml_matches_linear_scan() {
        let c = code("Q(zeta5)", 1.0, 20.0);
        for t in 0..100u64 {
            let sent = t as usize % c.len();
            let (y, r) = transmit(&c.points[sent], ChannelModel::RayleighComplex, 4, t).unwrap();
            let ml = ml_decode(&y, &r, &c, sent).unwrap();
            let scan = c
                .points
                .iter()
                .map(|s| {
                    let faded = r.apply_fading(s);
                    y.iter().zip(&faded).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
                })
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, d)| if d < acc.1 { (i, d) } else { acc });
            assert_eq!(ml.index, Some(scan.0));
        }
    }

    #[test]
    fn global_phase_invariance() {
        let c = code("Q(i)", 1.0, 10.0);
        let (y, r) = transmit(&c.points[0], ChannelModel::RayleighComplex, 5, 0).unwrap();
        let ml = ml_decode(&y, &r, &c, 0).unwrap();
        // multiply y and the fading by -1: the metric is unchanged
        let mut r2 = r.clone();
        for h in &mut r2.fading {
            *h *= Complex64::new(-1.0, 0.0);
        }
        let y2: Vec<f64> = y.iter().map(|v| -v).collect();
        let ml2 = ml_decode(&y2, &r2, &c, 0).unwrap();
        assert_eq!(ml.index, ml2.index);
        assert!((ml.metric - ml2.metric).abs() < 1e-12);
        let nld = nld_decode(&y, &r, &c, 0).unwrap();
        let nld2 = nld_decode(&y2, &r2, &c, 0).unwrap();
        assert_eq!(nld.index, nld2.index);
        assert!((nld.metric - nld2.metric).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch() {
        let c = code("Q(i)", 1.0, 10.0);
        let (_, r) = transmit(&c.points[0], ChannelModel::AwgnComplex, 5, 0).unwrap();
        assert!(nld_decode(&[0.0], &r, &c, 0).is_err());
        assert!(ml_decode(&[0.0, 0.0, 0.0], &r, &c, 0).is_err());
    }
}
