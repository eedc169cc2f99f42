//! Normalized oscillator eigenfunctions `φ_n(s) = C_n e^{-s²/2} H_n(s)` and
//! the matching Gauss–Hermite rule.
//!
//! Values come from the three-term recurrence on the normalized functions,
//! `φ_{n+1} = sqrt(2/(n+1)) s φ_n - sqrt(n/(n+1)) φ_{n-1}`, with a running
//! exponent so that neither `H_n` nor `n!` is ever formed.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::symmetric_tridiagonal_eigenvalues;

/// Largest oscillator index accepted by [`hermite_eval`].
pub const MAX_HERMITE_INDEX: usize = 1000;

const RESCALE_AT: f64 = 1e150;

/// `C_n = π^{-1/4} (2^n n!)^{-1/2}`.
pub fn normalization(n: usize) -> f64 {
    let log_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    (-0.25 * PI.ln() - 0.5 * (n as f64 * std::f64::consts::LN_2 + log_fact)).exp()
}

/// `φ_0(s), ..., φ_nmax(s)`.
pub fn hermite_values(nmax: usize, s: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    let gauss = -0.5 * s * s;
    let mut log_scale = 0.0f64;
    let mut prev = 0.0f64;
    let mut cur = PI.powf(-0.25);
    out.push(cur * gauss.exp());
    for k in 0..nmax {
        let next = (2.0 / (k + 1) as f64).sqrt() * s * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            prev /= RESCALE_AT;
            cur /= RESCALE_AT;
            log_scale += RESCALE_AT.ln();
        }
        out.push(cur * (gauss + log_scale).exp());
    }
    out
}

/// `φ_n(s)`.
pub fn hermite_eval(n: usize, s: f64) -> Result<f64> {
    if n > MAX_HERMITE_INDEX {
        return Err(Error::invalid(format!(
            "hermite index {n} exceeds the supported maximum {MAX_HERMITE_INDEX}"
        )));
    }
    Ok(*hermite_values(n, s).last().expect("at least φ_0"))
}

/// Gauss–Hermite nodes and weights adapted to integrands that already carry
/// the Gaussian: `∫ g(s) ds ≈ Σ_i weights[i] g(nodes[i])`, exact when
/// `g = e^{-s²} p` with `deg p ≤ 2Q - 1`.
#[derive(Clone, Debug)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_HERMITE_INDEX {
            return Err(Error::invalid(format!("quadrature order {order} out of range")));
        }
        // Jacobi matrix of the orthonormal Hermite polynomials.
        let off: Vec<f64> = (1..order).map(|k| (k as f64 / 2.0).sqrt()).collect();
        let mut nodes = symmetric_tridiagonal_eigenvalues(&vec![0.0; order], &off)
            .ok_or_else(|| Error::invalid("Jacobi matrix eigenvalues did not converge"))?;
        // symmetrize and polish with Newton on φ_Q
        for i in 0..order / 2 {
            let j = order - 1 - i;
            let r = 0.5 * (nodes[j] - nodes[i]);
            nodes[i] = -r;
            nodes[j] = r;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        for s in nodes.iter_mut() {
            for _ in 0..2 {
                let v = hermite_values(order, *s);
                let d = (2.0 * order as f64).sqrt() * v[order - 1] - *s * v[order];
                if d != 0.0 {
                    *s -= v[order] / d;
                }
            }
        }
        let weights = nodes
            .iter()
            .map(|&s| {
                let v = hermite_values(order - 1, s);
                1.0 / v.iter().map(|x| x * x).sum::<f64>()
            })
            .collect();
        Ok(GaussHermite { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * g(s))
            .sum()
    }
}

/// Oscillator functions `φ_0 .. φ_nmax` tabulated on a Gauss–Hermite rule.
#[derive(Clone, Debug)]
pub struct HermiteBasis {
    nmax: usize,
    rule: GaussHermite,
    /// `values[i][n] = φ_n(nodes[i])`.
    values: Vec<Vec<f64>>,
}

impl HermiteBasis {
    /// Basis up to index `nmax` with a rule of order `order >= nmax + 1`.
    pub fn new(nmax: usize, order: usize) -> Result<Self> {
        if order < nmax + 1 {
            return Err(Error::invalid(format!(
                "quadrature order {order} cannot resolve products up to index {nmax}"
            )));
        }
        let rule = GaussHermite::new(order)?;
        let values = rule.nodes.iter().map(|&s| hermite_values(nmax, s)).collect();
        Ok(HermiteBasis { nmax, rule, values })
    }

    /// Default rule order `2 nmax + 16`.
    pub fn with_default_order(nmax: usize) -> Result<Self> {
        Self::new(nmax, 2 * nmax + 16)
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn rule(&self) -> &GaussHermite {
        &self.rule
    }

    pub fn nodes(&self) -> &[f64] {
        &self.rule.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.rule.weights
    }

    pub fn value_at_node(&self, node: usize, n: usize) -> f64 {
        self.values[node][n]
    }

    pub fn normalization(&self, n: usize) -> f64 {
        normalization(n)
    }

    /// `∫ φ_n(s) φ_m(s) f(s) ds`.
    pub fn matrix_element(&self, n: usize, m: usize, f: impl Fn(f64) -> f64) -> f64 {
        self.rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .zip(&self.values)
            .map(|((&s, &w), v)| w * v[n] * v[m] * f(s))
            .sum()
    }
}
