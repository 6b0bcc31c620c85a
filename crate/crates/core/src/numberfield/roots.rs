//! Simultaneous polynomial root finding (Aberth–Ehrlich) with Newton polish.

use num_complex::Complex64;

fn eval(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    // coeffs constant term first; returns p(z), p'(z)
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of a monic polynomial (constant term first), or `None`
/// if the iteration fails to settle.
pub fn roots(coeffs: &[f64]) -> Option<Vec<Complex64>> {
    let m = coeffs.len().checked_sub(1)?;
    if m == 0 {
        return Some(Vec::new());
    }
    let bound = 1.0 + coeffs[..m].iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let mut z: Vec<Complex64> = (0..m)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, theta)
        })
        .collect();
    let mut settled = false;
    for _ in 0..2_000 {
        let mut max_step = 0.0f64;
        for i in 0..m {
            let (p, dp) = eval(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..m).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
        }
        if max_step < 1e-15 {
            settled = true;
            break;
        }
    }
    if !settled {
        return None;
    }
    for r in &mut z {
        for _ in 0..3 {
            let (p, dp) = eval(coeffs, *r);
            if dp.norm() > 0.0 {
                *r -= p / dp;
            }
        }
    }
    Some(z)
}
