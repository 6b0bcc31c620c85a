//! Explicit number fields, their canonical embeddings, and ideal lattices.
//!
//! A [`FieldSpec`] is validated once at construction: signature, defining
//! polynomial, integral basis (full rank and closed under multiplication),
//! numerical roots, and the catalog discriminant against the covolume of the
//! embedded ring of integers. Afterwards every operation is read-only.
//!
//! Totally real fields of degree n embed into ℝⁿ through all n real roots in
//! ascending order. Totally complex fields of degree 2n embed into ℂⁿ through
//! the roots with positive imaginary part, ordered by real part and then
//! imaginary part.

mod catalog;
pub(crate) mod rational;
mod roots;

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::lattice::{Ambient, Enumerator, LatticeBasis};
use crate::{Error, Result};
pub use catalog::{builtin_catalog, builtin_catalog_text, load_catalog, parse_catalog};
use rational::{determinant, inverse, is_integer, mul_mod, row_times, to_f64, QMatrix, Q};

/// Largest tolerated relative discriminant mismatch at load time.
pub const DISC_LOAD_TOLERANCE: f64 = 1e-6;
const ROOT_SEPARATION: f64 = 1e-8;

/// An integral ideal given by a Z-basis in power-basis coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealSpec {
    pub label: String,
    pub z_basis: Vec<Vec<Q>>,
    /// `[O_K : I]`
    pub norm: u64,
    pub class_label: String,
    pub principal: bool,
}

#[derive(Clone, Debug)]
pub struct FieldSpec {
    pub name: String,
    pub degree: usize,
    /// `(r1, r2)`
    pub signature: (usize, usize),
    /// Monic, constant term first.
    pub min_poly: Vec<i64>,
    /// Z-basis of the ring of integers in power-basis coordinates.
    pub integral_basis: Vec<Vec<Q>>,
    pub disc: i64,
    pub ideals: Vec<IdealSpec>,
    embeddings: Vec<Complex64>,
    basis_inverse: QMatrix,
}

impl FieldSpec {
    pub fn new(
        name: String,
        degree: usize,
        signature: (usize, usize),
        min_poly: Vec<i64>,
        integral_basis: Vec<Vec<Q>>,
        disc: i64,
        ideals: Vec<IdealSpec>,
    ) -> Result<Self> {
        let invalid = |msg: String| Error::Validation { field: name.clone(), invariant: msg };
        let (r1, r2) = signature;
        if degree == 0 {
            return Err(invalid("degree must be positive".into()));
        }
        if r1 + 2 * r2 != degree {
            return Err(invalid(format!("r1 + 2·r2 = {} differs from degree {degree}", r1 + 2 * r2)));
        }
        if r1 > 0 && r2 > 0 {
            return Err(Error::MixedSignature { field: name, r1, r2 });
        }
        if min_poly.len() != degree + 1 || min_poly.last() != Some(&1) {
            return Err(invalid(format!("minpoly must be monic of degree {degree}")));
        }
        if disc == 0 {
            return Err(invalid("discriminant must be nonzero".into()));
        }
        if integral_basis.len() != degree || integral_basis.iter().any(|v| v.len() != degree) {
            return Err(invalid(format!("integral basis must be {degree} vectors of length {degree}")));
        }
        let basis_inverse = inverse(&integral_basis).ok_or_else(|| invalid("integral basis is singular".into()))?;
        for (i, a) in integral_basis.iter().enumerate() {
            for b in &integral_basis[i..] {
                let prod = row_times(&mul_mod(a, b, &min_poly), &basis_inverse);
                if !prod.iter().all(is_integer) {
                    return Err(invalid("integral basis is not closed under multiplication".into()));
                }
            }
        }

        let coeffs: Vec<f64> = min_poly.iter().map(|&c| c as f64).collect();
        let mut all = roots::roots(&coeffs).ok_or_else(|| Error::RootSeparation { field: name.clone() })?;
        for i in 0..all.len() {
            for j in 0..i {
                if (all[i] - all[j]).norm() < ROOT_SEPARATION {
                    return Err(Error::RootSeparation { field: name });
                }
            }
        }
        for z in &mut all {
            if z.im.abs() <= 1e-9 * z.norm().max(1.0) {
                z.im = 0.0;
            }
        }
        let real_count = all.iter().filter(|z| z.im == 0.0).count();
        if real_count != r1 {
            return Err(invalid(format!("minpoly has {real_count} real roots but r1 = {r1}")));
        }
        let mut embeddings: Vec<Complex64> =
            if r2 == 0 { all } else { all.into_iter().filter(|z| z.im > 0.0).collect() };
        embeddings.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

        let field = FieldSpec {
            name,
            degree,
            signature,
            min_poly,
            integral_basis,
            disc,
            ideals: Vec::new(),
            embeddings,
            basis_inverse,
        };
        let mismatch = discriminant_check(&field);
        if !(mismatch <= DISC_LOAD_TOLERANCE) {
            return Err(Error::Validation {
                field: field.name,
                invariant: format!("embedded covolume disagrees with disc {disc} (relative mismatch {mismatch:e})"),
            });
        }
        let mut field = field;
        for ideal in ideals {
            field.check_ideal(&ideal)?;
            field.ideals.push(ideal);
        }
        Ok(field)
    }

    fn check_ideal(&self, ideal: &IdealSpec) -> Result<()> {
        let invalid =
            |msg: String| Error::Validation { field: self.name.clone(), invariant: format!("ideal {}: {msg}", ideal.label) };
        let m = self.degree;
        if ideal.z_basis.len() != m || ideal.z_basis.iter().any(|v| v.len() != m) {
            return Err(invalid(format!("basis must be {m} vectors of length {m}")));
        }
        if ideal.norm == 0 {
            return Err(invalid("norm must be positive".into()));
        }
        // coordinates in the integral basis must be integers
        let in_ok: QMatrix = ideal.z_basis.iter().map(|v| row_times(v, &self.basis_inverse)).collect();
        if !in_ok.iter().flatten().all(is_integer) {
            return Err(invalid("not contained in the ring of integers".into()));
        }
        let index = determinant(&in_ok).abs();
        if index.is_zero() {
            return Err(invalid("basis is singular".into()));
        }
        if index != Q::from_integer(ideal.norm.into()) {
            return Err(invalid(format!("index {index} differs from norm {}", ideal.norm)));
        }
        let z_inverse = inverse(&ideal.z_basis).expect("nonsingular");
        for w in &self.integral_basis {
            for z in &ideal.z_basis {
                let prod = row_times(&mul_mod(w, z, &self.min_poly), &z_inverse);
                if !prod.iter().all(is_integer) {
                    return Err(invalid("not closed under multiplication by O_K".into()));
                }
            }
        }
        Ok(())
    }

    pub fn is_totally_real(&self) -> bool {
        self.signature.1 == 0
    }

    /// Ambient dimension n: the degree for totally real fields, half of it
    /// for totally complex ones.
    pub fn n(&self) -> usize {
        if self.is_totally_real() { self.degree } else { self.degree / 2 }
    }

    pub fn ambient(&self) -> Ambient {
        if self.is_totally_real() { Ambient::Real(self.degree) } else { Ambient::Complex(self.degree / 2) }
    }

    pub fn abs_disc(&self) -> f64 {
        self.disc.unsigned_abs() as f64
    }

    /// `|d_K|^{1/degree}`.
    pub fn root_discriminant(&self) -> f64 {
        self.abs_disc().powf(1.0 / self.degree as f64)
    }

    pub fn unit_rank(&self) -> usize {
        self.signature.0 + self.signature.1 - 1
    }

    /// The embedding images used for ψ.
    pub fn embeddings(&self) -> &[Complex64] {
        &self.embeddings
    }

    /// ψ of an element given by power-basis coordinates, as real coordinates.
    pub fn embed(&self, power_coords: &[f64]) -> Vec<f64> {
        let images = self.embeddings.iter().map(|&theta| {
            power_coords.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * theta + c)
        });
        if self.is_totally_real() {
            images.map(|z| z.re).collect()
        } else {
            images.flat_map(|z| [z.re, z.im]).collect()
        }
    }

    pub fn embed_rational(&self, power_coords: &[Q]) -> Vec<f64> {
        self.embed(&power_coords.iter().map(to_f64).collect::<Vec<_>>())
    }

    /// Power-basis coordinates of `Σ coords_j w_j`.
    pub fn element(&self, coords: &[i64]) -> Vec<f64> {
        let mut out = vec![0.0; self.degree];
        for (c, w) in coords.iter().zip(&self.integral_basis) {
            for (o, q) in out.iter_mut().zip(w) {
                *o += *c as f64 * to_f64(q);
            }
        }
        out
    }

    /// `|Nr(x)|` read off an embedded vector: the product over all embeddings,
    /// so each complex coordinate contributes its squared modulus.
    pub fn abs_norm_of_embedded(&self, v: &[f64]) -> f64 {
        if self.is_totally_real() {
            v.iter().map(|x| x.abs()).product()
        } else {
            v.chunks(2).map(|p| p[0] * p[0] + p[1] * p[1]).product()
        }
    }

    /// `|Nr(x)|` for an element in power-basis coordinates.
    pub fn abs_norm(&self, power_coords: &[f64]) -> f64 {
        self.abs_norm_of_embedded(&self.embed(power_coords))
    }

    /// Covolume of ψ(O_K) predicted from the discriminant.
    pub fn predicted_volume(&self) -> f64 {
        let s = self.abs_disc().sqrt();
        if self.is_totally_real() { s } else { s * 2f64.powi(-(self.n() as i32)) }
    }

    /// Normalized shortest vector of ψ(O_K) predicted from the discriminant.
    pub fn predicted_nsv(&self) -> f64 {
        let n = self.n() as f64;
        if self.is_totally_real() {
            n.sqrt() / self.abs_disc().powf(0.5 / n)
        } else {
            (2.0 * n).sqrt() / self.abs_disc().powf(0.25 / n)
        }
    }

    /// Normalized minimum product distance of ψ(O_K) predicted from the discriminant.
    pub fn predicted_ndp(&self) -> f64 {
        let n = self.n() as f64;
        if self.is_totally_real() {
            1.0 / self.abs_disc().sqrt()
        } else {
            2f64.powf(n / 2.0) / self.abs_disc().powf(0.25)
        }
    }

    /// Normalized product distance of ψ(I) in terms of `min(I)`.
    pub fn ndp_from_min_ideal(&self, min_ideal: f64) -> f64 {
        self.predicted_ndp() * min_ideal
    }

    /// The unit ideal O_K.
    pub fn unit_ideal(&self) -> IdealSpec {
        IdealSpec {
            label: "O_K".into(),
            z_basis: self.integral_basis.clone(),
            norm: 1,
            class_label: "principal".into(),
            principal: true,
        }
    }

    pub fn ideal(&self, label: &str) -> Option<&IdealSpec> {
        self.ideals.iter().find(|i| i.label == label)
    }

    /// Smallest N such that every ideal class listed in the catalog contains a
    /// catalog ideal of norm ≤ N. `None` without catalog ideals.
    pub fn n_min(&self) -> Option<u64> {
        let mut per_class: BTreeMap<&str, u64> = BTreeMap::new();
        for ideal in &self.ideals {
            let e = per_class.entry(&ideal.class_label).or_insert(u64::MAX);
            *e = (*e).min(ideal.norm);
        }
        per_class.values().copied().max()
    }

    /// Largest normalized product distance over ideals, given `N_min(K)`.
    pub fn idealform_ndp(&self, n_min: u64) -> f64 {
        let n_min = n_min as f64;
        if self.is_totally_real() { self.predicted_ndp() * n_min } else { self.predicted_ndp() * n_min.sqrt() }
    }
}

/// Looks a field up by name.
pub fn find_field<'a>(catalog: &'a [FieldSpec], name: &str) -> Result<&'a FieldSpec> {
    catalog.iter().find(|f| f.name == name).ok_or_else(|| Error::UnknownField(name.to_string()))
}

/// ψ(O_K) with basis ψ(w_1), …, ψ(w_m).
pub fn embedding_matrix(field: &FieldSpec) -> Result<LatticeBasis> {
    LatticeBasis::new(field.ambient(), field.integral_basis.iter().map(|w| field.embed_rational(w)).collect())
}

/// Relative mismatch between the catalog |d_K| and the one recovered from the
/// covolume of ψ(O_K).
pub fn discriminant_check(field: &FieldSpec) -> f64 {
    let Ok(lattice) = embedding_matrix(field) else {
        return f64::INFINITY;
    };
    let vol = lattice.volume();
    let recovered = if field.is_totally_real() {
        vol * vol
    } else {
        let scaled = vol * 2f64.powi(field.n() as i32);
        scaled * scaled
    };
    (recovered - field.abs_disc()).abs() / field.abs_disc()
}

/// ψ(I), checked against the covolume `N(I)·Vol(ψ(O_K))`.
pub fn ideal_lattice(field: &FieldSpec, ideal: &IdealSpec) -> Result<LatticeBasis> {
    let lattice = LatticeBasis::new(field.ambient(), ideal.z_basis.iter().map(|z| field.embed_rational(z)).collect())?;
    let expected = ideal.norm as f64 * field.predicted_volume();
    let vol = lattice.volume();
    if ((vol - expected) / expected).abs() > 1e-9 {
        return Err(Error::Inconsistent(format!(
            "ideal {} has covolume {vol}, expected {expected}",
            ideal.label
        )));
    }
    Ok(lattice)
}

/// Result of the radius-bounded `min(I)` search.
#[derive(Clone, Debug, PartialEq)]
pub struct MinIdeal {
    /// √(|Nr(x)|/N(I)) for complex fields, |Nr(x)|/N(I) for real ones.
    pub value: f64,
    /// |Nr(x)| of the minimizing element.
    pub element_norm: f64,
    /// Minimizer in coordinates of the ideal's Z-basis.
    pub coords: Vec<i64>,
    pub radius: f64,
    /// Whether the value is provably the global minimum rather than an upper bound.
    pub certified: bool,
}

/// Default search radius `3·√m·(N(I)·√|d_K|)^{1/m}`.
pub fn default_ideal_radius(field: &FieldSpec, ideal: &IdealSpec) -> f64 {
    let m = field.degree as f64;
    3.0 * m.sqrt() * (ideal.norm as f64 * field.abs_disc().sqrt()).powf(1.0 / m)
}

/// `min(I)` over nonzero ideal elements with ‖ψ(x)‖ ≤ `radius`.
///
/// The result is certified when it attains the floor that ideal theory
/// guarantees (1, or √2 resp. 2 for non-principal ideals in complex resp.
/// real fields), or when the unit group is finite and the search ball covers
/// every element of smaller norm.
pub fn min_ideal(field: &FieldSpec, ideal: &IdealSpec, radius: f64) -> Result<MinIdeal> {
    min_ideal_with(&Enumerator::default(), field, ideal, radius)
}

pub fn min_ideal_with(enumerator: &Enumerator, field: &FieldSpec, ideal: &IdealSpec, radius: f64) -> Result<MinIdeal> {
    let lattice = ideal_lattice(field, ideal)?;
    let origin = vec![0.0; lattice.rank()];
    let norm = ideal.norm as f64;
    let floor = match (ideal.principal, field.is_totally_real()) {
        (true, _) => 1.0,
        (false, false) => 2f64.sqrt(),
        (false, true) => 2.0,
    };
    let mut best: Option<(f64, f64, Vec<i64>)> = None;
    enumerator.for_each_in_ball(&lattice, &origin, radius, |p| {
        if p.coords.iter().all(|&c| c == 0) {
            return ControlFlow::Continue(());
        }
        let element_norm = field.abs_norm_of_embedded(&p.vector);
        let value = if field.is_totally_real() { element_norm / norm } else { (element_norm / norm).sqrt() };
        let better = match &best {
            None => true,
            Some(b) if value < b.0 * (1.0 - 1e-12) => true,
            Some(b) => value <= b.0 * (1.0 + 1e-12) && p.coords < b.2,
        };
        if better {
            best = Some((value, element_norm, p.coords));
        }
        // nothing can go below the floor
        if value <= floor * (1.0 + 1e-9) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    let (value, element_norm, coords) = best.ok_or(Error::EmptyEnumeration { radius })?;
    let at_floor = (value - floor).abs() <= 1e-9 * floor;
    // with finite unit group ‖ψ(x)‖² = |Nr(x)| (imaginary quadratic), so the
    // ball holds every element of smaller norm
    let covered = field.unit_rank() == 0 && field.degree == 2 && radius * radius >= element_norm * (1.0 + 1e-12);
    Ok(MinIdeal { value, element_norm, coords, radius, certified: at_floor || covered })
}

/// Integer value of |Nr| when it is within rounding of an integer.
pub fn rounded_norm(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= 1e-6 * r.max(1.0)).then(|| r.to_i64()).flatten()
}
