//! Gram–Schmidt orthogonalization and floating-point LLL reduction.

use crate::{Error, Result};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram–Schmidt data of an ordered basis: `b_i = b*_i + Σ_{j<i} mu[i][j] b*_j`.
#[derive(Clone, Debug)]
pub(crate) struct Gso {
    pub mu: Vec<Vec<f64>>,
    pub bstar: Vec<Vec<f64>>,
    pub bstar_sq: Vec<f64>,
}

impl Gso {
    pub fn new(vectors: &[Vec<f64>]) -> Self {
        let r = vectors.len();
        let mut gso = Gso { mu: vec![vec![0.0; r]; r], bstar: vec![Vec::new(); r], bstar_sq: vec![0.0; r] };
        for i in 0..r {
            gso.update_row(vectors, i);
        }
        gso
    }

    /// Recomputes row `i` from the (already correct) rows before it.
    pub fn update_row(&mut self, vectors: &[Vec<f64>], i: usize) {
        let mut v = vectors[i].clone();
        for j in 0..i {
            let m = if self.bstar_sq[j] > 0.0 { dot(&v, &self.bstar[j]) / self.bstar_sq[j] } else { 0.0 };
            self.mu[i][j] = m;
            for (vk, bk) in v.iter_mut().zip(&self.bstar[j]) {
                *vk -= m * bk;
            }
        }
        self.mu[i][i] = 1.0;
        self.bstar_sq[i] = dot(&v, &v);
        self.bstar[i] = v;
    }

    /// Coordinates of `target` with respect to the basis the GSO was built from.
    pub fn coordinates(&self, target: &[f64]) -> Vec<f64> {
        let r = self.bstar.len();
        let mut y = vec![0.0; r];
        for j in (0..r).rev() {
            let mut t = dot(target, &self.bstar[j]) / self.bstar_sq[j];
            for i in j + 1..r {
                t -= y[i] * self.mu[i][j];
            }
            y[j] = t;
        }
        y
    }

    pub fn log_volume(&self) -> f64 {
        0.5 * self.bstar_sq.iter().map(|b| b.ln()).sum::<f64>()
    }

    /// True when no Gram–Schmidt vector is negligible next to its basis vector.
    pub fn is_nondegenerate(&self, vectors: &[Vec<f64>]) -> bool {
        self.bstar_sq.iter().zip(vectors).all(|(&bs, v)| {
            let n = dot(v, v);
            bs.is_finite() && bs > 0.0 && bs > 1e-24 * n
        })
    }
}

/// An LLL-reduced basis with the unimodular transform that produced it:
/// `vectors[i] = Σ_j transform[i][j] · original[j]`.
#[derive(Clone, Debug)]
pub(crate) struct Reduced {
    pub vectors: Vec<Vec<f64>>,
    pub transform: Vec<Vec<i64>>,
    pub gso: Gso,
}

impl Reduced {
    /// Maps coordinates in the reduced basis back to the original basis.
    pub fn to_original(&self, coords: &[i64]) -> Vec<i64> {
        let r = coords.len();
        let mut out = vec![0i64; r];
        for (x, row) in coords.iter().zip(&self.transform) {
            if *x == 0 {
                continue;
            }
            for (o, u) in out.iter_mut().zip(row) {
                *o += x * u;
            }
        }
        out
    }
}

const MAX_SWAPS: usize = 1_000_000;

fn sub_multiple_i64(row: &mut [i64], other: &[i64], q: i64) -> Result<()> {
    for (a, b) in row.iter_mut().zip(other) {
        *a = b.checked_mul(q).and_then(|p| a.checked_sub(p)).ok_or(Error::Degenerate)?;
    }
    Ok(())
}

pub(crate) fn lll(original: &[Vec<f64>], delta: f64) -> Result<Reduced> {
    let r = original.len();
    let mut b = original.to_vec();
    let mut u: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
    let mut g = Gso::new(&b);
    if !g.is_nondegenerate(&b) {
        return Err(Error::Degenerate);
    }
    let mut k = 1;
    let mut swaps = 0;
    while k < r {
        // size reduction; repeated because floating mu can drift after large quotients
        for _ in 0..8 {
            let mut changed = false;
            for j in (0..k).rev() {
                let q = g.mu[k][j].round();
                if q == 0.0 {
                    continue;
                }
                if q.abs() > 1e15 {
                    return Err(Error::Degenerate);
                }
                changed = true;
                let (head, tail) = b.split_at_mut(k);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= q * y;
                }
                let (uh, ut) = u.split_at_mut(k);
                sub_multiple_i64(&mut ut[0], &uh[j], q as i64)?;
                for i in 0..j {
                    g.mu[k][i] -= q * g.mu[j][i];
                }
                g.mu[k][j] -= q;
            }
            if !changed {
                break;
            }
            g.update_row(&b, k);
        }
        let m = g.mu[k][k - 1];
        if g.bstar_sq[k] >= (delta - m * m) * g.bstar_sq[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            for i in k - 1..r {
                g.update_row(&b, i);
            }
            k = (k - 1).max(1);
            swaps += 1;
            if swaps > MAX_SWAPS {
                return Err(Error::Convergence { what: "lll", residual: f64::NAN });
            }
        }
    }
    let gso = Gso::new(&b);
    Ok(Reduced { vectors: b, transform: u, gso })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gso_coordinates_roundtrip() {
        let b = vec![vec![2.0, 1.0, 0.0], vec![0.5, 3.0, 1.0], vec![1.0, -1.0, 4.0]];
        let g = Gso::new(&b);
        let y = [1.5, -2.0, 0.25];
        let t: Vec<f64> = (0..3).map(|k| (0..3).map(|i| y[i] * b[i][k]).sum()).collect();
        let back = g.coordinates(&t);
        for (a, c) in back.iter().zip(&y) {
            assert!((a - c).abs() < 1e-12);
        }
    }

    #[test]
    fn lll_reduces_skewed_basis() {
        let b = vec![vec![1.0, 0.0], vec![1000.0, 1.0]];
        let red = lll(&b, 0.99).unwrap();
        for v in &red.vectors {
            assert!(dot(v, v) <= 1.0 + 1e-9);
        }
        // transform reproduces the reduced vectors
        for (row, v) in red.transform.iter().zip(&red.vectors) {
            for k in 0..2 {
                let w: f64 = row.iter().zip(&b).map(|(c, bj)| *c as f64 * bj[k]).sum();
                assert!((w - v[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn lll_rejects_dependent_vectors() {
        let b = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(matches!(lll(&b, 0.99), Err(Error::Degenerate)));
    }
}
