//! Finite codes carved from shifted, scaled ring-of-integers lattices.
//!
//! A code of rate R and power P over a field K is
//! `C = B(√(nP)) ∩ (x + α·ψ(O_K))`, where α² is chosen so that the ball holds
//! exactly `2^{Rn}` fundamental cells of `α·ψ(O_K)`, and the shift `x` is
//! searched for until the ball actually contains that many points. For a
//! totally complex field n counts complex channel uses; for a totally real
//! field n is the real dimension. In both cases `|C| ≥ 2^{Rn}`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::ControlFlow;

use rand::Rng;
use rayon::prelude::*;

use crate::lattice::{Enumerator, LatticeBasis};
use crate::numberfield::{embedding_matrix, FieldSpec};
use crate::rng::{stream_rng, Stream};
use crate::specfun::ln_gamma;
use crate::{Error, Result};

/// Shift samples tried before giving up.
pub const SHIFT_RETRY_CAP: u64 = 10_000;
/// Largest codebook `carve` will enumerate.
pub const MAX_CODEBOOK_SIZE: f64 = (1u64 << 20) as f64;
const SHIFT_BATCH: u64 = 16;

#[derive(Clone, Copy, Debug)]
pub struct CodeConfig<'a> {
    pub field: &'a FieldSpec,
    pub rate: f64,
    pub power: f64,
    pub seed: u64,
}

/// α² for a code of rate `rate` and power `power` over `field`, using the
/// field's own discriminant so that `Vol(B(√(nP))) / Vol(α·ψ(O_K)) = 2^{Rn}`.
pub fn energy_normalization(field: &FieldSpec, rate: f64, power: f64) -> Result<f64> {
    if !(rate > 0.0) {
        return Err(Error::Domain { function: "energy_normalization(rate)", value: rate });
    }
    if !(power > 0.0) {
        return Err(Error::Domain { function: "energy_normalization(power)", value: power });
    }
    let (r1, r2) = field.signature;
    if r1 > 0 && r2 > 0 {
        return Err(Error::MixedSignature { field: field.name.clone(), r1, r2 });
    }
    let n = field.n() as f64;
    let ln_d = field.abs_disc().ln();
    let ln2 = std::f64::consts::LN_2;
    let ln_alpha_sq = if field.is_totally_real() {
        let ln_c = 0.5 * n * (std::f64::consts::PI * n).ln() - ln_gamma(0.5 * n + 1.0)?;
        power.ln() + 2.0 * ln_c / n - 2.0 * rate * ln2 - ln_d / n
    } else {
        let ln_c = n * (std::f64::consts::PI * n).ln() - ln_gamma(n + 1.0)?;
        ln2 + power.ln() + ln_c / n - rate * ln2 - ln_d / (2.0 * n)
    };
    Ok(ln_alpha_sq.exp())
}

/// Volume of the Euclidean ball of radius `radius` in ℝ^`dim`.
pub fn ball_volume(dim: usize, radius: f64) -> f64 {
    let d = dim as f64;
    let ln_unit = 0.5 * d * std::f64::consts::PI.ln() - ln_gamma(0.5 * d + 1.0).expect("positive argument");
    (ln_unit + d * radius.ln()).exp()
}

/// Radius `√(nP)` of the power-constraint ball.
pub fn power_radius(basis: &LatticeBasis, power: f64) -> f64 {
    (basis.ambient().dim() as f64 * power).sqrt()
}

/// `Vol(B(√(nP))) / Vol(basis)`.
pub fn volume_ratio(basis: &LatticeBasis, power: f64) -> f64 {
    ball_volume(basis.rank(), power_radius(basis, power)) / basis.volume()
}

/// A shift and the number of lattice points it places in the ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Shift {
    pub vector: Vec<f64>,
    pub count: u64,
    /// Index of the accepted sample in the shift stream.
    pub sample: u64,
}

fn sample_shift(basis: &LatticeBasis, seed: u64, sample: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, sample, Stream::Shift);
    let mut x = vec![0.0; basis.rank()];
    for b in basis.vectors() {
        let u: f64 = rng.random();
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi += u * bi;
        }
    }
    x
}

/// Number of points of `basis + shift` in the ball of radius `radius` about
/// the origin.
pub fn count_in_ball(enumerator: &Enumerator, basis: &LatticeBasis, shift: &[f64], radius: f64) -> Result<u64> {
    let center: Vec<f64> = shift.iter().map(|x| -x).collect();
    let mut count = 0u64;
    enumerator.for_each_in_ball(basis, &center, radius, |_| {
        count += 1;
        ControlFlow::Continue(())
    })?;
    Ok(count)
}

/// Draws shifts uniformly from the fundamental parallelotope of `basis` until
/// one puts at least `max(target_count, Vol(B)/Vol(L))` points in the ball
/// `B(√(nP))`. Samples are evaluated in fixed-size parallel batches and the
/// lowest accepted sample index wins, so the result does not depend on the
/// thread count.
pub fn shift_search(basis: &LatticeBasis, power: f64, target_count: u64, seed: u64) -> Result<Shift> {
    shift_search_with(&Enumerator::default(), basis, power, target_count, seed, SHIFT_RETRY_CAP)
}

pub fn shift_search_with(
    enumerator: &Enumerator,
    basis: &LatticeBasis,
    power: f64,
    target_count: u64,
    seed: u64,
    retry_cap: u64,
) -> Result<Shift> {
    let ratio = volume_ratio(basis, power);
    if target_count as f64 > 2.0 * ratio {
        return Err(Error::RateInfeasible { needed: target_count as f64, available: ratio });
    }
    let radius = power_radius(basis, power);
    let needed = (target_count as f64).max(ratio * (1.0 - 1e-9));
    let mut best: Option<Shift> = None;
    let mut start = 0;
    while start < retry_cap {
        let end = (start + SHIFT_BATCH).min(retry_cap);
        let batch: Vec<Shift> = (start..end)
            .into_par_iter()
            .map(|sample| {
                let vector = sample_shift(basis, seed, sample);
                count_in_ball(enumerator, basis, &vector, radius).map(|count| Shift { vector, count, sample })
            })
            .collect::<Result<_>>()?;
        for s in batch {
            if s.count as f64 >= needed {
                return Ok(s);
            }
            if best.as_ref().is_none_or(|b| s.count > b.count) {
                best = Some(s);
            }
        }
        start = end;
    }
    Err(Error::ShiftSearch { tries: retry_cap, best: best.map_or(0, |b| b.count), needed })
}

#[derive(Clone, Debug)]
pub struct Codebook {
    pub field: String,
    /// Codewords in real coordinates, sorted by lattice coordinates.
    pub points: Vec<Vec<f64>>,
    /// Coordinates of `point - shift` in the basis of `lattice`.
    pub coords: Vec<Vec<i64>>,
    pub alpha: f64,
    pub shift: Vec<f64>,
    pub rate: f64,
    pub power: f64,
    /// `log2|C| / n`.
    pub achieved_rate: f64,
    pub n: usize,
    /// `α·ψ(O_K)`.
    pub lattice: LatticeBasis,
    /// Number of codewords promised by the rate, `2^{Rn}`.
    pub target: f64,
    index: HashMap<Vec<i64>, usize>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Codeword index of the lattice point with the given coordinates.
    pub fn index_of(&self, coords: &[i64]) -> Option<usize> {
        self.index.get(coords).copied()
    }

    /// Average energy per channel use of codeword `i`, `(1/n)Σ|s_j|²`.
    pub fn energy(&self, i: usize) -> f64 {
        self.points[i].iter().map(|x| x * x).sum::<f64>() / self.n as f64
    }

    /// Smallest pairwise Euclidean distance, `None` below two codewords.
    pub fn min_distance(&self) -> Option<f64> {
        let mut best = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                best = best.min(d);
            }
        }
        (self.len() > 1).then(|| best.sqrt())
    }

    /// CSV with a `#` header recording the code parameters.
    pub fn to_csv(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        writeln!(out, "# field={}", self.field).unwrap();
        writeln!(out, "# alpha={:.17e}", self.alpha).unwrap();
        writeln!(out, "# shift={}", join(&self.shift)).unwrap();
        writeln!(out, "# rate={} achieved_rate={:.17e} power={} n={}", self.rate, self.achieved_rate, self.power, self.n)
            .unwrap();
        let header: Vec<String> =
            std::iter::once("index".to_string()).chain((0..self.lattice.rank()).map(|i| format!("coord_{i}"))).collect();
        writeln!(out, "{}", header.join(",")).unwrap();
        for (i, p) in self.points.iter().enumerate() {
            let row: Vec<String> = p.iter().map(|x| format!("{x:.17e}")).collect();
            writeln!(out, "{i},{}", row.join(",")).unwrap();
        }
        out
    }
}

/// `B(√(nP)) ∩ (x + α·ψ(O_K))` with `|C| ≥ 2^{Rn}`.
pub fn carve(config: &CodeConfig) -> Result<Codebook> {
    carve_with(&Enumerator::default(), config)
}

pub fn carve_with(enumerator: &Enumerator, config: &CodeConfig) -> Result<Codebook> {
    let field = config.field;
    let alpha = energy_normalization(field, config.rate, config.power)?.sqrt();
    let n = field.n();
    let target = (config.rate * n as f64).exp2();
    if target > MAX_CODEBOOK_SIZE {
        return Err(Error::RateInfeasible { needed: target, available: MAX_CODEBOOK_SIZE });
    }
    let lattice = embedding_matrix(field)?.scaled(alpha)?;
    let ratio = volume_ratio(&lattice, config.power);
    if target > 2.0 * ratio {
        return Err(Error::RateInfeasible { needed: target, available: ratio });
    }
    let target_count = target.ceil() as u64;
    let shift = shift_search_with(enumerator, &lattice, config.power, target_count, config.seed, SHIFT_RETRY_CAP)?;
    let radius = power_radius(&lattice, config.power);
    let center: Vec<f64> = shift.vector.iter().map(|x| -x).collect();
    let found = enumerator.points_in_ball(&lattice, &center, radius)?;
    if found.len() as u64 != shift.count {
        return Err(Error::Inconsistent(format!(
            "ball enumeration found {} points, shift search counted {}",
            found.len(),
            shift.count
        )));
    }
    let mut points = Vec::with_capacity(found.len());
    let mut coords = Vec::with_capacity(found.len());
    let mut index = HashMap::with_capacity(found.len());
    for (i, p) in found.into_iter().enumerate() {
        points.push(p.vector.iter().zip(&shift.vector).map(|(v, x)| v + x).collect());
        index.insert(p.coords.clone(), i);
        coords.push(p.coords);
    }
    Ok(Codebook {
        field: field.name.clone(),
        achieved_rate: (points.len() as f64).log2() / n as f64,
        points,
        coords,
        alpha,
        shift: shift.vector,
        rate: config.rate,
        power: config.power,
        n,
        lattice,
        target,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::shortest_vector;
    use crate::numberfield::{builtin_catalog, find_field};
    use proptest::prelude::*;

    fn field(name: &str) -> FieldSpec {
        find_field(&builtin_catalog(), name).unwrap().clone()
    }

    #[test]
    fn normalization_examples() {
        let qi = field("Q(i)");
        let a = energy_normalization(&qi, 1.0, 1.0).unwrap();
        assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        let q2 = field("Q(sqrt(2))");
        let a = energy_normalization(&q2, 1.0, 4.0).unwrap();
        assert!((a - 2.0 * std::f64::consts::PI / 8f64.sqrt()).abs() < 1e-14);
        assert!((a - 2.2214415).abs() < 1e-7);
        let b = energy_normalization(&q2, 1.0, 8.0).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-13);
        assert!(energy_normalization(&q2, 0.0, 1.0).is_err());
    }

    #[test]
    fn normalization_sets_volume_ratio() {
        for f in builtin_catalog() {
            for (rate, power) in [(0.5, 3.0), (1.0, 10.0), (2.0, 100.0)] {
                let alpha = energy_normalization(&f, rate, power).unwrap().sqrt();
                let l = embedding_matrix(&f).unwrap().scaled(alpha).unwrap();
                let ratio = volume_ratio(&l, power);
                let want = (rate * f.n() as f64).exp2();
                assert!((ratio / want - 1.0).abs() < 1e-9, "{}: {ratio} vs {want}", f.name);
            }
        }
    }

    #[test]
    fn ball_volumes() {
        assert!((ball_volume(2, 1.0) - std::f64::consts::PI).abs() < 1e-14);
        assert!((ball_volume(3, 2.0) - 4.0 / 3.0 * std::f64::consts::PI * 8.0).abs() < 1e-12);
    }

    #[test]
    fn integer_lattice_shift() {
        let z2 = LatticeBasis::real(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        // radius 10 = √(2·50)
        let s = shift_search(&z2, 50.0, 314, 1).unwrap();
        assert!(s.count >= 315, "{}", s.count);
        let brute = (-11i64..=11)
            .flat_map(|a| (-11i64..=11).map(move |b| (a, b)))
            .filter(|&(a, b)| {
                let (x, y) = (a as f64 + s.vector[0], b as f64 + s.vector[1]);
                x * x + y * y <= 100.0
            })
            .count() as u64;
        assert_eq!(brute, s.count);
    }

    #[test]
    fn small_ball_still_meets_ratio() {
        let z2 = LatticeBasis::real(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        // radius 0.4, ratio ≈ 0.503
        let s = shift_search(&z2, 0.08, 1, 3).unwrap();
        assert!(s.count >= 1);
        assert!(matches!(shift_search(&z2, 0.08, 2, 3), Err(Error::RateInfeasible { .. })));
        // ratio ≈ 0.0314: no shift can hold a point more than ~3% of the time
        assert!(matches!(
            shift_search_with(&Enumerator::default(), &z2, 0.0005, 0, 3, 5),
            Ok(_) | Err(Error::ShiftSearch { .. })
        ));
    }

    #[test]
    fn carve_examples() {
        let qi = field("Q(i)");
        let c = carve(&CodeConfig { field: &qi, rate: 1.0, power: 10.0, seed: 5 }).unwrap();
        assert!(c.len() >= 2);
        assert!((0..c.len()).all(|i| c.energy(i) <= 10.0));

        let q2 = field("Q(sqrt(2))");
        let c = carve(&CodeConfig { field: &q2, rate: 0.5, power: 10.0, seed: 5 }).unwrap();
        assert!(c.len() >= 2);
        assert!((0..c.len()).all(|i| c.energy(i) <= 10.0));

        let c = carve(&CodeConfig { field: &q2, rate: 1e-3, power: 10.0, seed: 5 }).unwrap();
        assert!(!c.is_empty());
    }

    #[test]
    fn carved_code_invariants() {
        for f in builtin_catalog() {
            let cfg = CodeConfig { field: &f, rate: 1.0, power: 30.0, seed: 9 };
            let c = carve(&cfg).unwrap();
            assert!(c.len() as f64 >= c.target, "{}", f.name);
            assert!((0..c.len()).all(|i| c.energy(i) <= cfg.power), "{}", f.name);
            let sv = shortest_vector(&embedding_matrix(&f).unwrap()).unwrap().norm;
            if let Some(d) = c.min_distance() {
                assert!(d >= c.alpha * sv - 1e-8, "{}", f.name);
            }
            let e = Enumerator::default();
            for (p, k) in c.points.iter().zip(&c.coords) {
                let rel: Vec<f64> = p.iter().zip(&c.shift).map(|(a, b)| a - b).collect();
                let cv = e.closest_vector(&c.lattice, &rel).unwrap();
                assert!(cv.dist_sq.sqrt() <= 1e-8);
                assert_eq!(&cv.coords, k);
                assert_eq!(c.index_of(k), c.coords.iter().position(|x| x == k));
            }
            let again = carve(&cfg).unwrap();
            assert_eq!(again.points, c.points);
            assert_eq!(again.shift, c.shift);
        }
    }

    #[test]
    fn csv_export() {
        let qi = field("Q(i)");
        let c = carve(&CodeConfig { field: &qi, rate: 1.0, power: 10.0, seed: 5 }).unwrap();
        let csv = c.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# field=Q(i)"));
        assert!(lines.iter().any(|l| l.starts_with("# alpha=")));
        assert!(lines.contains(&"index,coord_0,coord_1"));
        assert_eq!(lines.iter().filter(|l| !l.starts_with('#')).count(), c.len() + 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn shift_count_meets_ratio(seed in any::<u64>(), power in 2.0f64..40.0) {
            let q = field("Q(sqrt(-3))");
            let l = embedding_matrix(&q).unwrap();
            let ratio = volume_ratio(&l, power);
            let s = shift_search(&l, power, ratio.ceil() as u64, seed).unwrap();
            prop_assert!(s.count as f64 >= ratio);
            prop_assert_eq!(s.count, count_in_ball(&Enumerator::default(), &l, &s.vector, power_radius(&l, power)).unwrap());
        }
    }
}
