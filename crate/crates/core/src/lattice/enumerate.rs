//! Depth-first Schnorr–Euchner enumeration over an LLL-reduced basis.
//!
//! One kernel serves shortest vector, closest vector, and ball listing: it
//! visits every integer vector `x` (coordinates in the reduced basis) with
//! `‖Σ x_i b_i - t‖² ≤ r²`, and the visitor may shrink `r²` as it goes.

use super::reduce::Gso;

struct Walk<'a, F> {
    gso: &'a Gso,
    center: &'a [f64],
    x: Vec<i64>,
    radius_sq: f64,
    visit: F,
}

impl<F: FnMut(&[i64], f64) -> Option<f64>> Walk<'_, F> {
    fn within(&self, d: f64) -> bool {
        d <= self.radius_sq * (1.0 + 1e-12) + 1e-300
    }

    fn descend(&mut self, level: usize, partial: f64) {
        let r = self.x.len();
        let mut c = self.center[level];
        for i in level + 1..r {
            c -= self.gso.mu[i][level] * (self.x[i] as f64 - self.center[i]);
        }
        let weight = self.gso.bstar_sq[level];
        let base = c.round();
        let (mut up, mut down) = (base, base - 1.0);
        let (mut up_open, mut down_open) = (true, true);
        while up_open || down_open {
            let take_up = up_open && (!down_open || (up - c).abs() <= (c - down).abs());
            let cand = if take_up { up } else { down };
            let d = partial + weight * (cand - c) * (cand - c);
            if !self.within(d) {
                if take_up {
                    up_open = false;
                } else {
                    down_open = false;
                }
                continue;
            }
            if take_up {
                up += 1.0;
            } else {
                down -= 1.0;
            }
            self.x[level] = cand as i64;
            if level == 0 {
                if let Some(r2) = (self.visit)(&self.x, d) {
                    self.radius_sq = r2;
                }
            } else {
                self.descend(level - 1, d);
            }
        }
    }
}

/// Visits all reduced-basis coordinate vectors within `radius_sq` of the point
/// whose reduced-basis coordinates are `center`. The visitor receives the
/// coordinates and the squared distance and may return a new squared radius.
pub(crate) fn enumerate<F>(gso: &Gso, center: &[f64], radius_sq: f64, visit: F)
where
    F: FnMut(&[i64], f64) -> Option<f64>,
{
    let r = center.len();
    if r == 0 {
        return;
    }
    let mut walk = Walk { gso, center, x: vec![0; r], radius_sq, visit };
    walk.descend(r - 1, 0.0);
}
