//! Exact rational linear algebra and polynomial arithmetic modulo the
//! defining polynomial. Only used at load time for validation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Q = BigRational;
pub type QMatrix = Vec<Vec<Q>>;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn is_integer(q: &Q) -> bool {
    q.is_integer()
}

/// Determinant by fraction-exact Gaussian elimination.
pub fn determinant(m: &QMatrix) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Q::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Q::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            for c in col..n {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Inverse of a nonsingular square matrix, `None` when singular.
pub fn inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut a: QMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot, col);
        let p = a[col][col].clone();
        for c in 0..2 * n {
            a[col][c] = &a[col][c] / &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..2 * n {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Row vector times matrix.
pub fn row_times(v: &[Q], m: &QMatrix) -> Vec<Q> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| v.iter().zip(m).fold(Q::zero(), |acc, (x, row)| acc + x * &row[j]))
        .collect()
}

/// Product of two elements given by power-basis coordinates, reduced modulo
/// the monic polynomial with integer coefficients `poly` (constant term first).
pub fn mul_mod(a: &[Q], b: &[Q], poly: &[i64]) -> Vec<Q> {
    let m = poly.len() - 1;
    let mut prod = vec![Q::zero(); 2 * m];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    // x^m = -Σ_{k<m} poly[k] x^k
    for deg in (m..2 * m).rev() {
        let c = std::mem::replace(&mut prod[deg], Q::zero());
        if c.is_zero() {
            continue;
        }
        for (k, &pk) in poly.iter().take(m).enumerate() {
            prod[deg - m + k] -= &c * q_int(pk);
        }
    }
    prod.truncate(m);
    prod
}
