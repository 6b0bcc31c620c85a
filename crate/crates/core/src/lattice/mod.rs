//! Full-rank lattices in ℝⁿ or ℂⁿ and their invariants.
//!
//! A complex ambient ℂⁿ is stored as ℝ²ⁿ with coordinates
//! `(re_1, im_1, …, re_n, im_n)`. All Euclidean geometry runs on that real
//! representation; only the product norm reads coordinate pairs back as
//! complex moduli.

mod enumerate;
pub(crate) mod reduce;

use std::ops::ControlFlow;

use num_complex::Complex64;

use crate::{Error, Result};
use reduce::{dot, lll, Gso, Reduced};

/// Lovász constant used for basis preprocessing.
pub const LLL_DELTA: f64 = 0.99;
/// Default enumeration dimension cap.
pub const DEFAULT_MAX_RANK: usize = 24;

const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ambient {
    Real(usize),
    Complex(usize),
}

impl Ambient {
    /// Number of ambient coordinates, n.
    pub fn dim(self) -> usize {
        match self {
            Ambient::Real(n) | Ambient::Complex(n) => n,
        }
    }

    /// Real dimension, which is also the lattice rank.
    pub fn rank(self) -> usize {
        match self {
            Ambient::Real(n) => n,
            Ambient::Complex(n) => 2 * n,
        }
    }

    pub fn is_complex(self) -> bool {
        matches!(self, Ambient::Complex(_))
    }
}

/// Product of coordinate moduli, `∏ |v_i|`.
pub fn product_norm(ambient: Ambient, v: &[f64]) -> f64 {
    match ambient {
        Ambient::Real(_) => v.iter().map(|x| x.abs()).product(),
        Ambient::Complex(_) => v.chunks(2).map(|p| p[0].hypot(p[1])).product(),
    }
}

fn coordinate_moduli(ambient: Ambient, v: &[f64]) -> Vec<f64> {
    match ambient {
        Ambient::Real(_) => v.iter().map(|x| x.abs()).collect(),
        Ambient::Complex(_) => v.chunks(2).map(|p| p[0].hypot(p[1])).collect(),
    }
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// A basis of a full-rank lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeBasis {
    ambient: Ambient,
    vectors: Vec<Vec<f64>>,
}

impl LatticeBasis {
    /// Builds a basis from real-coordinate vectors, rejecting degenerate input.
    pub fn new(ambient: Ambient, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let rank = ambient.rank();
        if vectors.len() != rank {
            return Err(Error::DimensionMismatch { expected: rank, got: vectors.len() });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != rank) {
            return Err(Error::DimensionMismatch { expected: rank, got: v.len() });
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Degenerate);
        }
        let gso = Gso::new(&vectors);
        if !gso.is_nondegenerate(&vectors) {
            return Err(Error::Degenerate);
        }
        Ok(LatticeBasis { ambient, vectors })
    }

    pub fn real(vectors: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(Ambient::Real(vectors.len()), vectors)
    }

    /// Builds a lattice in ℂⁿ from `2n` complex vectors.
    pub fn complex(vectors: &[Vec<Complex64>]) -> Result<Self> {
        let n = vectors.first().map_or(0, |v| v.len());
        let flat = vectors.iter().map(|v| v.iter().flat_map(|z| [z.re, z.im]).collect()).collect();
        Self::new(Ambient::Complex(n), flat)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn gram(&self) -> Vec<Vec<f64>> {
        self.vectors.iter().map(|a| self.vectors.iter().map(|b| dot(a, b)).collect()).collect()
    }

    /// Lattice point with the given integer coordinates.
    pub fn point(&self, coords: &[i64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rank()];
        for (c, v) in coords.iter().zip(&self.vectors) {
            if *c == 0 {
                continue;
            }
            let c = *c as f64;
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        let vectors = self.vectors.iter().map(|v| v.iter().map(|x| c * x).collect()).collect();
        Self::new(self.ambient, vectors)
    }

    /// Applies `f` to each basis vector, keeping the coordinate system.
    pub fn map_vectors<F: FnMut(&[f64]) -> Vec<f64>>(&self, f: F) -> Result<Self> {
        Self::new(self.ambient, self.vectors.iter().map(|v| v.as_slice()).map(f).collect())
    }

    pub fn volume(&self) -> f64 {
        Gso::new(&self.vectors).log_volume().exp()
    }

    /// True when `v` is a lattice point up to `tol` in Euclidean distance.
    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        let y = Gso::new(&self.vectors).coordinates(v);
        let coords: Vec<i64> = y.iter().map(|c| c.round() as i64).collect();
        let p = self.point(&coords);
        let diff: Vec<f64> = p.iter().zip(v).map(|(a, b)| a - b).collect();
        norm(&diff) <= tol
    }
}

/// √det(Gram), the covolume.
pub fn volume(basis: &LatticeBasis) -> f64 {
    basis.volume()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeVector {
    /// Integer coordinates in the input basis.
    pub coords: Vec<i64>,
    pub vector: Vec<f64>,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosestVector {
    pub coords: Vec<i64>,
    pub vector: Vec<f64>,
    pub dist_sq: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductDistance {
    pub value: f64,
    pub coords: Vec<i64>,
    /// Set when the radius-bounded minimum attains the supplied theory floor.
    pub exact: bool,
}

/// Invariants of a lattice under the unit-covolume normalizations.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeInvariants {
    pub ambient: Ambient,
    pub volume: f64,
    pub sv: f64,
    pub dp_min: Option<f64>,
    pub nsv: f64,
    pub ndp: Option<f64>,
    pub dp_exact: bool,
}

impl LatticeInvariants {
    /// Hermite invariant, `nsv²`.
    pub fn hermite(&self) -> f64 {
        self.nsv * self.nsv
    }

    /// Upper bound `nsv^n / n^{n/2}` on `ndp` from the AM-GM inequality.
    pub fn am_gm_ceiling(&self) -> f64 {
        let n = self.ambient.dim() as f64;
        (n * self.nsv.ln() - 0.5 * n * n.ln()).exp()
    }
}

fn sign_normalized(mut c: Vec<i64>) -> Vec<i64> {
    if c.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        c.iter_mut().for_each(|x| *x = -*x);
    }
    c
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Enumeration front-end with a configurable dimension cap.
#[derive(Clone, Copy, Debug)]
pub struct Enumerator {
    pub max_rank: usize,
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator { max_rank: DEFAULT_MAX_RANK }
    }
}

impl Enumerator {
    pub fn new(max_rank: usize) -> Self {
        Enumerator { max_rank }
    }

    fn reduce(&self, basis: &LatticeBasis) -> Result<Reduced> {
        if basis.rank() > self.max_rank {
            return Err(Error::DimensionCap { rank: basis.rank(), cap: self.max_rank });
        }
        lll(basis.vectors(), LLL_DELTA)
    }

    /// Exact shortest nonzero vector. Among vectors of equal norm the one whose
    /// coordinates, signed so the first nonzero entry is positive, are
    /// lexicographically smallest is returned.
    pub fn shortest_vector(&self, basis: &LatticeBasis) -> Result<LatticeVector> {
        let red = self.reduce(basis)?;
        let start = dot(&red.vectors[0], &red.vectors[0]);
        let mut best = start;
        let mut ties: Vec<Vec<i64>> = Vec::new();
        let center = vec![0.0; basis.rank()];
        enumerate::enumerate(&red.gso, &center, start * (1.0 + TIE_TOLERANCE), |x, d| {
            if x.iter().all(|&c| c == 0) {
                return None;
            }
            if d < best * (1.0 - TIE_TOLERANCE) {
                best = d;
                ties.clear();
                ties.push(x.to_vec());
                Some(d * (1.0 + TIE_TOLERANCE))
            } else {
                if d <= best * (1.0 + TIE_TOLERANCE) {
                    ties.push(x.to_vec());
                }
                None
            }
        });
        let mut candidates: Vec<Vec<i64>> =
            ties.iter().map(|x| sign_normalized(red.to_original(x))).collect();
        candidates.sort();
        candidates.dedup();
        let coords = candidates.into_iter().next().ok_or(Error::EmptyEnumeration { radius: start.sqrt() })?;
        let vector = basis.point(&coords);
        let norm = norm(&vector);
        Ok(LatticeVector { coords, vector, norm })
    }

    /// Exact closest lattice point to `target`; ties go to the lexicographically
    /// smallest coordinate vector.
    pub fn closest_vector(&self, basis: &LatticeBasis, target: &[f64]) -> Result<ClosestVector> {
        if target.len() != basis.rank() {
            return Err(Error::DimensionMismatch { expected: basis.rank(), got: target.len() });
        }
        let red = self.reduce(basis)?;
        let y = red.gso.coordinates(target);
        let seed: Vec<i64> = y.iter().map(|c| c.round() as i64).collect();
        let seed_point = red.to_original(&seed);
        let start = dot(&sub(&basis.point(&seed_point), target), &sub(&basis.point(&seed_point), target));
        let mut best = start;
        let mut ties: Vec<Vec<i64>> = Vec::new();
        let slack = |d: f64| d * (1.0 + TIE_TOLERANCE) + 1e-24;
        enumerate::enumerate(&red.gso, &y, slack(start), |x, d| {
            if d < best * (1.0 - TIE_TOLERANCE) - 1e-24 {
                best = d;
                ties.clear();
                ties.push(x.to_vec());
                Some(slack(d))
            } else {
                if d <= slack(best) {
                    ties.push(x.to_vec());
                }
                None
            }
        });
        if ties.is_empty() {
            ties.push(seed);
        }
        // re-rank ties on the original basis
        let mut scored: Vec<(f64, Vec<i64>)> = ties
            .iter()
            .map(|x| {
                let c = red.to_original(x);
                let diff = sub(&basis.point(&c), target);
                (dot(&diff, &diff), c)
            })
            .collect();
        let min = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        scored.retain(|s| s.0 <= slack(min));
        scored.sort_by(|a, b| a.1.cmp(&b.1));
        let coords = scored.swap_remove(0).1;
        let vector = basis.point(&coords);
        let diff = sub(&vector, target);
        Ok(ClosestVector { coords, dist_sq: dot(&diff, &diff), vector })
    }

    /// All lattice points `v` with `‖v - center‖ ≤ radius`, sorted by coordinates.
    pub fn points_in_ball(&self, basis: &LatticeBasis, center: &[f64], radius: f64) -> Result<Vec<LatticeVector>> {
        let mut points = Vec::new();
        self.for_each_in_ball(basis, center, radius, |p| {
            points.push(p);
            ControlFlow::Continue(())
        })?;
        points.sort_by(|a, b| a.coords.cmp(&b.coords));
        Ok(points)
    }

    /// Streams the lattice points within `radius` of `center` in enumeration
    /// order, stopping early when the visitor breaks.
    pub fn for_each_in_ball<F>(&self, basis: &LatticeBasis, center: &[f64], radius: f64, mut visit: F) -> Result<()>
    where
        F: FnMut(LatticeVector) -> ControlFlow<()>,
    {
        if center.len() != basis.rank() {
            return Err(Error::DimensionMismatch { expected: basis.rank(), got: center.len() });
        }
        let red = self.reduce(basis)?;
        let y = red.gso.coordinates(center);
        let r2 = radius * radius;
        enumerate::enumerate(&red.gso, &y, r2 * (1.0 + 1e-9), |x, _| {
            let coords = red.to_original(x);
            let vector = basis.point(&coords);
            let diff = sub(&vector, center);
            if dot(&diff, &diff) > r2 {
                return None;
            }
            match visit(LatticeVector { norm: norm(&vector), coords, vector }) {
                ControlFlow::Continue(()) => None,
                ControlFlow::Break(()) => Some(-1.0),
            }
        });
        Ok(())
    }

    /// Minimum product norm over nonzero lattice vectors of norm ≤ `radius`.
    pub fn min_product_distance(
        &self,
        basis: &LatticeBasis,
        radius: f64,
        exact_hint: Option<f64>,
    ) -> Result<ProductDistance> {
        let ambient = basis.ambient();
        let origin = vec![0.0; basis.rank()];
        let mut scored: Vec<(f64, LatticeVector)> = Vec::new();
        let mut min = f64::INFINITY;
        let mut degenerate = None;
        self.for_each_in_ball(basis, &origin, radius, |p| {
            // ±v have the same product norm; keep the positively signed one
            if p.coords.iter().all(|&c| c == 0) || sign_normalized(p.coords.clone()) != p.coords {
                return ControlFlow::Continue(());
            }
            let moduli = coordinate_moduli(ambient, &p.vector);
            if moduli.iter().any(|&m| m <= 1e-10 * p.norm) {
                if degenerate.as_ref().is_none_or(|d: &Vec<i64>| p.coords < *d) {
                    degenerate = Some(p.coords);
                }
                return ControlFlow::Continue(());
            }
            let value: f64 = moduli.iter().product();
            if value <= min * (1.0 + TIE_TOLERANCE) {
                min = min.min(value);
                scored.retain(|s| s.0 <= min * (1.0 + TIE_TOLERANCE));
                scored.push((value, p));
            }
            ControlFlow::Continue(())
        })?;
        if let Some(coords) = degenerate {
            return Err(Error::ZeroProductNorm { coords });
        }
        // among (near-)ties prefer the shortest vector, then the smallest coordinates
        let (value, coords) = scored
            .into_iter()
            .filter(|s| s.0 <= min * (1.0 + TIE_TOLERANCE))
            .min_by(|a, b| {
                if (a.1.norm - b.1.norm).abs() <= 1e-12 * a.1.norm.max(b.1.norm) {
                    a.1.coords.cmp(&b.1.coords)
                } else {
                    a.1.norm.total_cmp(&b.1.norm)
                }
            })
            .map(|s| (s.0, s.1.coords))
            .ok_or(Error::EmptyEnumeration { radius })?;
        let exact = exact_hint.is_some_and(|h| (value - h).abs() <= 1e-9 * h);
        Ok(ProductDistance { value, coords, exact })
    }

    /// Volume, shortest vector, and product distance with their normalizations.
    /// The search radius is widened to the shortest vector if needed, so the
    /// AM-GM ceiling always applies to the returned `ndp`.
    pub fn invariants(&self, basis: &LatticeBasis, radius: f64, exact_hint: Option<f64>) -> Result<LatticeInvariants> {
        let ambient = basis.ambient();
        let volume = basis.volume();
        let sv = self.shortest_vector(basis)?.norm;
        let radius = radius.max(sv * (1.0 + 1e-9));
        let dp = match self.min_product_distance(basis, radius, exact_hint) {
            Ok(dp) => Some(dp),
            Err(Error::ZeroProductNorm { .. }) => None,
            Err(e) => return Err(e),
        };
        let (sv_scale, dp_scale) = match ambient {
            Ambient::Real(n) => (volume.powf(1.0 / n as f64), volume),
            Ambient::Complex(n) => (volume.powf(0.5 / n as f64), volume.sqrt()),
        };
        Ok(LatticeInvariants {
            ambient,
            volume,
            sv,
            nsv: sv / sv_scale,
            dp_min: dp.as_ref().map(|d| d.value),
            ndp: dp.as_ref().map(|d| d.value / dp_scale),
            dp_exact: dp.is_some_and(|d| d.exact),
        })
    }
}

pub fn shortest_vector(basis: &LatticeBasis) -> Result<LatticeVector> {
    Enumerator::default().shortest_vector(basis)
}

pub fn closest_vector(basis: &LatticeBasis, target: &[f64]) -> Result<ClosestVector> {
    Enumerator::default().closest_vector(basis, target)
}

pub fn points_in_ball(basis: &LatticeBasis, center: &[f64], radius: f64) -> Result<Vec<LatticeVector>> {
    Enumerator::default().points_in_ball(basis, center, radius)
}

pub fn min_product_distance(basis: &LatticeBasis, radius: f64, exact_hint: Option<f64>) -> Result<ProductDistance> {
    Enumerator::default().min_product_distance(basis, radius, exact_hint)
}

pub fn invariants(basis: &LatticeBasis, radius: f64, exact_hint: Option<f64>) -> Result<LatticeInvariants> {
    Enumerator::default().invariants(basis, radius, exact_hint)
}
