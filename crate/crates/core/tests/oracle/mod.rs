//! Independent reference for the Hill problem `-f'' + V f = E f`,
//! `f(x + 2π) = e^{2πiθ} f(x)`.
//!
//! Second-order finite differences on `n` points turn the problem into the
//! three-term recurrence `f_{j+1} = (2 + h²(V_j - E)) f_j - f_{j-1}`, whose
//! one-period transfer matrix `T(E)` has determinant one. `E` is an
//! eigenvalue of the discrete Bloch problem exactly when
//! `tr T(E) = 2 cos 2πθ`, so the eigenvalues are roots of a scalar function
//! found by scanning and bisection. Two grid sizes are combined by
//! Richardson extrapolation (error `O(h²)` to `O(h⁴)`).

#![allow(dead_code)]

use std::f64::consts::PI;

pub fn discriminant(v: &[f64], e: f64) -> f64 {
    let n = v.len();
    let h = 2.0 * PI / n as f64;
    let h2 = h * h;
    // columns (f_j, f_{j-1}) for the two fundamental solutions
    let (mut a, mut b, mut c, mut d) = (1.0, 0.0, 0.0, 1.0);
    for &vj in v {
        let t = 2.0 + h2 * (vj - e);
        let (na, nc) = (t * a - b, t * c - d);
        b = a;
        d = c;
        a = na;
        c = nc;
    }
    a + d
}

/// Lowest `count` eigenvalues of the `n`-point discretization.
pub fn fd_eigenvalues(potential: impl Fn(f64) -> f64, theta: f64, n: usize, count: usize) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    let v: Vec<f64> = (0..n).map(|j| potential(j as f64 * h)).collect();
    let target = 2.0 * (2.0 * PI * theta).cos();
    let g = |e: f64| discriminant(&v, e) - target;
    let vmin = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut roots = Vec::new();
    let step = 1e-3;
    let mut lo = vmin - 1.0;
    let mut glo = g(lo);
    while roots.len() < count {
        let hi = lo + step;
        let ghi = g(hi);
        if glo == 0.0 {
            roots.push(lo);
        } else if glo * ghi < 0.0 {
            let (mut a, mut b, mut ga) = (lo, hi, glo);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                let gm = g(m);
                if gm * ga <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    ga = gm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        lo = hi;
        glo = ghi;
        assert!(lo < vmin + 1e4, "oracle scan ran away");
    }
    roots
}

/// Richardson-extrapolated eigenvalues from `n` and `n/2` points.
pub fn hill_oracle(potential: impl Fn(f64) -> f64 + Copy, theta: f64, n: usize, count: usize) -> Vec<f64> {
    let fine = fd_eigenvalues(potential, theta, n, count);
    let coarse = fd_eigenvalues(potential, theta, n / 2, count);
    fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect()
}
