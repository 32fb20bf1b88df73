//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// the given diagonal and constant off-diagonal `off`.
fn sturm_below(diag: &[f64], off: f64, x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (i, &a) in diag.iter().enumerate() {
        d = a - x - if i == 0 { 0.0 } else { off * off / d };
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// `k`-th Dirichlet eigenvalue of `−y″ + P(x) y` on `[−l, l]` with `n`
/// interior points of the three-point stencil.
pub fn fd_eigenvalue(even_coeffs: &[f64], k: usize, l: f64, n: usize) -> f64 {
    let h = 2.0 * l / (n + 1) as f64;
    let pot = |x: f64| {
        let x2 = x * x;
        even_coeffs.iter().rev().fold(0.0, |acc, &c| acc * x2 + c)
    };
    let diag: Vec<f64> = (1..=n)
        .map(|i| 2.0 / (h * h) + pot(-l + i as f64 * h))
        .collect();
    let off = -1.0 / (h * h);
    let (mut lo, mut hi) = (-1e3, 4.0 / (h * h) + diag.iter().cloned().fold(0.0, f64::max));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_below(&diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Richardson extrapolation of [`fd_eigenvalue`] from `n` and `2n + 1`
/// interior points (the step exactly halves).
pub fn fd_eigenvalue_richardson(even_coeffs: &[f64], k: usize, l: f64, n: usize) -> f64 {
    let coarse = fd_eigenvalue(even_coeffs, k, l, n);
    let fine = fd_eigenvalue(even_coeffs, k, l, 2 * n + 1);
    (4.0 * fine - coarse) / 3.0
}

/// Maximum distance between matched entries of two sorted lists, or `None`
/// if the lengths differ.
pub fn set_distance(a: &[f64], b: &[f64]) -> Option<f64> {
    (a.len() == b.len()).then(|| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}
