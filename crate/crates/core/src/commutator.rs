//! Commutators of observables at most quadratic in `(x₁, x₂, p₁, p₂)`.
//!
//! An observable is stored by its Weyl symbol `zᵀQz + lᵀz + c`. Weyl
//! quantization is exact on quadratics, so `[Op f, i Op g] = -Op({f, g})`
//! with the Poisson bracket `{f, g} = ∇fᵀ J ∇g`, `J = [[0, I], [-I, 0]]`.

use std::fmt::{self, Write as _};
use std::io::Write;

use nalgebra::{DMatrix, Matrix4, SymmetricEigen, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};

/// Coefficients below this are treated as zero in verdicts.
pub const ZERO_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Var {
    X1,
    X2,
    P1,
    P2,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::X1, Var::X2, Var::P1, Var::P2];

    fn index(self) -> usize {
        self as usize
    }

    fn name(self) -> &'static str {
        ["x1", "x2", "p1", "p2"][self.index()]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticObservable {
    quad: Matrix4<f64>,
    lin: Vector4<f64>,
    constant: f64,
}

impl QuadraticObservable {
    pub fn zero() -> Self {
        QuadraticObservable {
            quad: Matrix4::zeros(),
            lin: Vector4::zeros(),
            constant: 0.0,
        }
    }

    /// `quad` is symmetrized.
    pub fn new(quad: Matrix4<f64>, lin: Vector4<f64>, constant: f64) -> Self {
        QuadraticObservable {
            quad: (quad + quad.transpose()) * 0.5,
            lin,
            constant,
        }
    }

    /// Sum of `coef · sym(v₁ ⋯ v_k)`; monomials of degree three or more are
    /// rejected.
    pub fn from_terms(terms: &[(f64, &[Var])]) -> Result<Self> {
        let mut o = Self::zero();
        for &(c, vars) in terms {
            match *vars {
                [] => o.constant += c,
                [a] => o.lin[a.index()] += c,
                [a, b] => {
                    let (i, j) = (a.index(), b.index());
                    if i == j {
                        o.quad[(i, i)] += c;
                    } else {
                        o.quad[(i, j)] += c / 2.0;
                        o.quad[(j, i)] += c / 2.0;
                    }
                }
                _ => {
                    return Err(Error::NotQuadratic(format!("monomial of degree {}", vars.len())))
                }
            }
        }
        Ok(o)
    }

    /// `(p₁ + B x₂)² + p₂² + ω² x₂²`.
    pub fn h0(b: f64, omega: f64) -> Self {
        use Var::*;
        Self::from_terms(&[
            (1.0, &[P1, P1]),
            (2.0 * b, &[P1, X2]),
            (b * b + omega * omega, &[X2, X2]),
            (1.0, &[P2, P2]),
        ])
        .expect("quadratic")
    }

    /// `sym(x₁p₁) + (B/α²) p₁p₂`.
    pub fn conjugate_operator(b: f64, omega: f64) -> Self {
        use Var::*;
        let mu = b / (b * b + omega * omega);
        Self::from_terms(&[(1.0, &[X1, P1]), (mu, &[P1, P2])]).expect("quadratic")
    }

    pub fn quad(&self) -> &Matrix4<f64> {
        &self.quad
    }

    pub fn lin(&self) -> &Vector4<f64> {
        &self.lin
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Coefficient of the monomial `a·b` (so `2Q_ab` off the diagonal).
    pub fn coefficient(&self, a: Var, b: Var) -> f64 {
        let (i, j) = (a.index(), b.index());
        if i == j {
            self.quad[(i, i)]
        } else {
            2.0 * self.quad[(i, j)]
        }
    }

    /// Monomial coefficients in the order of [`monomials`], then the linear
    /// part and the constant.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut v: Vec<f64> = monomials().iter().map(|&(a, b)| self.coefficient(a, b)).collect();
        v.extend(self.lin.iter());
        v.push(self.constant);
        v
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients().into_iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        QuadraticObservable {
            quad: self.quad * s,
            lin: self.lin * s,
            constant: self.constant * s,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadraticObservable {
            quad: self.quad + o.quad,
            lin: self.lin + o.lin,
            constant: self.constant + o.constant,
        }
    }

    /// Classical Poisson bracket of the symbols.
    pub fn poisson(&self, g: &Self) -> Self {
        let j = symplectic();
        let (f2, g2) = (&self.quad, &g.quad);
        QuadraticObservable {
            quad: (f2 * j * g2 - g2 * j * f2) * 2.0,
            lin: (f2 * j * g.lin - g2 * j * self.lin) * 2.0,
            constant: self.lin.dot(&(j * g.lin)),
        }
    }

    /// Positive semidefiniteness of the quadratic part on its support.
    pub fn quad_is_psd(&self) -> bool {
        let support: Vec<usize> = (0..4)
            .filter(|&i| (0..4).any(|k| self.quad[(i, k)].abs() > ZERO_THRESHOLD))
            .collect();
        if support.is_empty() {
            return true;
        }
        let n = support.len();
        let m = DMatrix::from_fn(n, n, |i, k| self.quad[(support[i], support[k])]);
        SymmetricEigen::new(m).eigenvalues.iter().all(|&e| e >= -ZERO_THRESHOLD)
    }

    /// Aligned `monomial  coefficient` table, zero rows omitted.
    pub fn table(&self) -> String {
        let mut s = String::new();
        for (label, c) in coefficient_labels().iter().zip(self.coefficients()) {
            if c.abs() > ZERO_THRESHOLD {
                let _ = writeln!(s, "{label:<8}{c:>+22.15e}");
            }
        }
        if s.is_empty() {
            s.push_str("0\n");
        }
        s
    }

    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "monomial,coefficient")?;
        for (label, c) in coefficient_labels().iter().zip(self.coefficients()) {
            writeln!(out, "{label},{c}")?;
        }
        Ok(())
    }
}

impl fmt::Display for QuadraticObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (label, c) in coefficient_labels().iter().zip(self.coefficients()) {
            if c.abs() <= ZERO_THRESHOLD {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if label == "1" {
                write!(f, "{c:+}")?;
            } else {
                write!(f, "{c:+}*{label}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn symplectic() -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    j[(0, 2)] = 1.0;
    j[(1, 3)] = 1.0;
    j[(2, 0)] = -1.0;
    j[(3, 1)] = -1.0;
    j
}

/// The ten quadratic monomials `v_a v_b`, `a <= b`.
pub fn monomials() -> Vec<(Var, Var)> {
    let mut v = Vec::with_capacity(10);
    for (i, a) in Var::ALL.iter().enumerate() {
        for b in &Var::ALL[i..] {
            v.push((*a, *b));
        }
    }
    v
}

fn coefficient_labels() -> Vec<String> {
    let mut v: Vec<String> = monomials()
        .iter()
        .map(|(a, b)| {
            if a == b {
                format!("{}^2", a.name())
            } else {
                format!("{}*{}", a.name(), b.name())
            }
        })
        .collect();
    v.extend(Var::ALL.iter().map(|a| a.name().to_string()));
    v.push("1".into());
    v
}

/// `[H, iA]`.
pub fn commutator_ia(h: &QuadraticObservable, a: &QuadraticObservable) -> QuadraticObservable {
    h.poisson(a).scale(-1.0)
}

/// Names of the coefficients of the generic quadratic `A`:
/// `a_jk p_j p_k`, `b_jk sym(x_k p_j)`, `g_jk x_j x_k` (`j <= k` for `a`, `g`).
pub const GENERIC_UNKNOWNS: [&str; 10] = [
    "alpha11", "alpha12", "alpha22", "beta11", "beta12", "beta21", "beta22", "gamma11", "gamma12", "gamma22",
];

fn generic_basis(k: usize) -> QuadraticObservable {
    use Var::*;
    let vars: [[Var; 2]; 10] = [
        [P1, P1],
        [P1, P2],
        [P2, P2],
        [X1, P1],
        [X2, P1],
        [X1, P2],
        [X2, P2],
        [X1, X1],
        [X1, X2],
        [X2, X2],
    ];
    QuadraticObservable::from_terms(&[(1.0, &vars[k])]).expect("quadratic")
}

/// One elimination step: a necessary condition for `[H₀, iA] >= 0`.
#[derive(Clone, Debug, Serialize)]
pub struct NogoStep {
    pub reason: String,
    /// Monomials whose coefficients were set to zero.
    pub imposed: Vec<String>,
    /// Unknowns forced to zero after this step.
    pub forced_zero: Vec<String>,
    /// Monomials that can still appear.
    pub surviving: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NogoReport {
    pub b: f64,
    pub alpha: f64,
    pub beta11_free: bool,
    /// `x₁²` never appears in `[H₀, iA]`.
    pub x1_squared_absent: bool,
    pub steps: Vec<NogoStep>,
    /// Monomials left when no diagonal term survives.
    pub residual: Vec<String>,
    /// `"no-go"`: every `A` of the family with `[H₀, iA] >= 0` gives a
    /// commutator without diagonal terms, hence zero. `"open"` otherwise.
    pub verdict: String,
}

impl NogoReport {
    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "B = {}, alpha = {}, beta11 {}", self.b, self.alpha, if self.beta11_free { "free" } else { "= 0" });
        let _ = writeln!(s, "x1^2 absent: {}", self.x1_squared_absent);
        for (i, st) in self.steps.iter().enumerate() {
            let _ = writeln!(s, "step {}: {}", i + 1, st.reason);
            let _ = writeln!(s, "  imposed: {}", st.imposed.join(", "));
            let _ = writeln!(s, "  forced zero: {}", st.forced_zero.join(", "));
            let _ = writeln!(s, "  surviving: {}", st.surviving.join(", "));
        }
        let _ = writeln!(s, "residual: {}", self.residual.join(", "));
        let _ = writeln!(s, "verdict: {}", self.verdict);
        s
    }
}

fn nullspace(m: &DMatrix<f64>, cols: usize) -> DMatrix<f64> {
    if m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    // pad to square so the SVD exposes every right singular vector
    let mut sq = DMatrix::zeros(m.nrows().max(cols), cols);
    sq.rows_mut(0, m.nrows()).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let scale = svd.singular_values.max().max(1.0);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= 1e-10 * scale)
        .collect();
    DMatrix::from_fn(cols, keep.len(), |r, c| vt[(keep[c], r)])
}

/// Eliminates `A` in the generic quadratic family (linear terms dropped:
/// they only produce linear terms) using two facts about a positive
/// semidefinite form: a vanishing diagonal entry forces its whole row to
/// vanish, and two diagonal entries that are negative multiples of each
/// other must both vanish.
pub fn gen_nogo_scan(b: f64, alpha: f64, beta11_free: bool) -> Result<NogoReport> {
    if !(alpha > b.abs() && alpha.is_finite() && b.is_finite()) {
        return Err(Error::invalid(format!("need alpha > |B|, got B = {b}, alpha = {alpha}")));
    }
    let omega = (alpha * alpha - b * b).sqrt();
    let h0 = QuadraticObservable::h0(b, omega);
    let unknowns: Vec<usize> = (0..10).filter(|&k| beta11_free || k != 3).collect();
    let mons = monomials();
    let labels = coefficient_labels();
    // column k: monomial coefficients of [H₀, i·basis_k]
    let l = DMatrix::from_fn(10, unknowns.len(), |r, c| {
        let (va, vb) = mons[r];
        commutator_ia(&h0, &generic_basis(unknowns[c])).coefficient(va, vb)
    });
    let diag_rows: Vec<usize> = (0..10).filter(|&r| mons[r].0 == mons[r].1).collect();
    let row_of = |v: Var| -> Vec<usize> { (0..10).filter(|&r| mons[r].0 == v || mons[r].1 == v).collect() };

    let mut constraints: Vec<usize> = Vec::new();
    let mut kernel = DMatrix::identity(unknowns.len(), unknowns.len());
    let on_kernel = |kernel: &DMatrix<f64>, r: usize| -> DMatrix<f64> { l.rows(r, 1) * kernel };
    let vanishes = |f: &DMatrix<f64>| f.iter().all(|x| x.abs() <= 1e-10);
    let x1_squared_absent = vanishes(&l.rows(0, 1).into_owned());

    let mut steps = Vec::new();
    let residual;
    let verdict;
    loop {
        let surviving: Vec<usize> = (0..10).filter(|&r| !vanishes(&on_kernel(&kernel, r))).collect();
        if surviving.iter().all(|r| !diag_rows.contains(r)) {
            residual = surviving.iter().map(|&r| labels[r].clone()).collect();
            verdict = "no-go".to_string();
            break;
        }
        let mut new: Vec<usize> = Vec::new();
        let mut reason = String::new();
        // a diagonal entry that vanishes identically
        for &d in &diag_rows {
            if vanishes(&on_kernel(&kernel, d)) {
                let row: Vec<usize> = row_of(mons[d].0).into_iter().filter(|r| !constraints.contains(r)).collect();
                if row.iter().any(|&r| surviving.contains(&r)) {
                    reason = format!("{} is absent, so its row must vanish", labels[d]);
                    new = row;
                    break;
                }
            }
        }
        // two diagonal entries of opposite sign
        if new.is_empty() {
            'pairs: for (i, &d1) in diag_rows.iter().enumerate() {
                for &d2 in &diag_rows[i + 1..] {
                    let (f1, f2) = (on_kernel(&kernel, d1), on_kernel(&kernel, d2));
                    if vanishes(&f1) || vanishes(&f2) {
                        continue;
                    }
                    let k = f1.dot(&f2) / f2.dot(&f2);
                    if k < 0.0 && vanishes(&(&f1 - &f2 * k)) {
                        reason = format!("{} and {} have opposite signs", labels[d1], labels[d2]);
                        new = vec![d1, d2];
                        break 'pairs;
                    }
                }
            }
        }
        if new.is_empty() {
            residual = surviving.iter().map(|&r| labels[r].clone()).collect();
            verdict = "open".to_string();
            break;
        }
        constraints.extend(&new);
        let c = DMatrix::from_fn(constraints.len(), unknowns.len(), |i, j| l[(constraints[i], j)]);
        kernel = nullspace(&c, unknowns.len());
        let forced_zero = (0..unknowns.len())
            .filter(|&u| kernel.row(u).iter().all(|x| x.abs() <= 1e-10))
            .map(|u| GENERIC_UNKNOWNS[unknowns[u]].to_string())
            .collect();
        let surviving = (0..10)
            .filter(|&r| !vanishes(&on_kernel(&kernel, r)))
            .map(|r| labels[r].clone())
            .collect();
        steps.push(NogoStep {
            reason,
            imposed: new.iter().map(|&r| labels[r].clone()).collect(),
            forced_zero,
            surviving,
        });
    }
    Ok(NogoReport {
        b,
        alpha,
        beta11_free,
        x1_squared_absent,
        steps,
        residual,
        verdict,
    })
}
