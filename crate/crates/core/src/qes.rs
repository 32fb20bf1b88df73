//! Closed-form eigenpairs of the sextic family
//! `P(z) = z⁶ + 2b z⁴ + (b² − 4m − 2p − 3) z²`.
//!
//! The eigenfunctions are `y = z^p Q̃(z²) e^{T(z)}` with
//! `T(z) = −z⁴/4 − b z²/2` and `Q̃` of degree `m`. Substituting gives
//! `−g″ + 2(z³ + bz) g′ + (b − (4m + 2p) z²) g = λ g` for `g = z^p Q̃(z²)`,
//! which acts tridiagonally on the coefficients of `Q̃`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Parity;
use crate::polynomial::{qes_potential, EvenPolynomial};
use crate::spectrum::{eigenvalue, SolverConfig};
use crate::zeros::{census, verify_axis_confinement, CensusBox, CensusConfig, ZeroCensus};

/// Distinct eigenvalues closer than this are reported as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-12;
/// `|u| < ZERO_ROOT` for a root of `Q̃` is treated as a zero at the origin.
pub const ZERO_ROOT: f64 = 1e-12;
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QesSpec {
    pub m: u32,
    pub p: u32,
    pub b: f64,
}

impl QesSpec {
    pub fn new(m: u32, p: u32, b: f64) -> Result<Self> {
        if p > 1 {
            return Err(Error::InvalidParity(p));
        }
        if !b.is_finite() {
            return Err(Error::InvalidArgument(format!("b = {b} is not finite")));
        }
        Ok(Self { m, p, b })
    }

    pub fn potential(&self) -> Result<EvenPolynomial> {
        qes_potential(self.m, self.p, self.b)
    }

    pub fn parity(&self) -> Parity {
        Parity::of_index(self.p as usize)
    }

    fn size(&self) -> usize {
        self.m as usize + 1
    }

    fn diag(&self, i: usize) -> f64 {
        self.b * (4 * i + 2 * self.p as usize + 1) as f64
    }

    /// Entry `(i, i + 1)`.
    fn upper(&self, i: usize) -> f64 {
        let p = self.p as usize;
        -(((2 * i + 2 + p) * (2 * i + 1 + p)) as f64)
    }

    /// Entry `(i + 1, i)`.
    fn lower(&self, i: usize) -> f64 {
        4.0 * (i as f64 - self.m as f64)
    }
}

impl fmt::Display for QesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={},p={},b={}", self.m, self.p, self.b)
    }
}

/// Parses `m=1,p=0,b=0` (any order, all three keys required).
impl FromStr for QesSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mut m, mut p, mut b) = (None, None, None);
        for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            let bad = |_| Error::Parse(format!("bad value for {key}: {value:?}"));
            match key.trim() {
                "m" => m = Some(value.trim().parse::<u32>().map_err(|e| bad(e.to_string()))?),
                "p" => p = Some(value.trim().parse::<u32>().map_err(|e| bad(e.to_string()))?),
                "b" => b = Some(value.trim().parse::<f64>().map_err(|e| bad(e.to_string()))?),
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        match (m, p, b) {
            (Some(m), Some(p), Some(b)) => Self::new(m, p, b),
            _ => Err(Error::Parse(format!("{s:?} must set m, p and b"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QesSolution {
    pub k: usize,
    pub lambda: f64,
    /// `c_0..c_m` of `Q̃(u) = Σ c_j u^j`, with `c_m = 1`.
    pub q_coeffs: Vec<f64>,
    pub u_roots: Vec<f64>,
    pub residual: f64,
}

impl QesSolution {
    /// Index of the eigenvalue in the full spectrum.
    pub fn index(&self, p: u32) -> usize {
        2 * self.k + p as usize
    }

    pub fn positive_roots(&self) -> usize {
        self.u_roots.iter().filter(|&&u| u > 0.0).count()
    }
}

/// The tridiagonal matrix acting on the coefficients of `Q̃`, dense.
pub fn qes_matrix(spec: &QesSpec) -> Vec<Vec<f64>> {
    let n = spec.size();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = spec.diag(i);
        if i + 1 < n {
            a[i][i + 1] = spec.upper(i);
            a[i + 1][i] = spec.lower(i);
        }
    }
    a
}

/// Number of eigenvalues of the matrix strictly below `x`.
///
/// Off-diagonal products are positive, so the matrix is similar to a
/// symmetric one and the Sturm count of the leading minors applies.
fn sturm_count(spec: &QesSpec, x: f64) -> usize {
    let n = spec.size();
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..n {
        let off = if i == 0 {
            0.0
        } else {
            spec.upper(i - 1) * spec.lower(i - 1)
        };
        q = spec.diag(i) - x - if i == 0 { 0.0 } else { off / q };
        if q == 0.0 {
            q = -f64::EPSILON * (spec.diag(i).abs() + x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(spec: &QesSpec) -> (f64, f64) {
    let a = qes_matrix(spec);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, row) in a.iter().enumerate() {
        let r: f64 = row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v.abs()).sum();
        lo = lo.min(row[i] - r);
        hi = hi.max(row[i] + r);
    }
    (lo - 1.0, hi + 1.0)
}

/// Eigenvalues sorted ascending, each by bisection on the Sturm count.
pub fn qes_eigenvalues(spec: &QesSpec) -> Result<Vec<f64>> {
    let (lo0, hi0) = gershgorin(spec);
    let out: Vec<f64> = (0..spec.size())
        .map(|k| {
            let (mut lo, mut hi) = (lo0, hi0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if sturm_count(spec, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    for w in out.windows(2) {
        if w[1] - w[0] < DEGENERATE_GAP * (1.0 + w[0].abs()) {
            return Err(Error::DegenerateEigenvalue(w[0]));
        }
    }
    Ok(out)
}

/// Eigenvector with `c_m = 1`, by back substitution from the last row.
fn eigenvector(spec: &QesSpec, lambda: f64) -> Vec<f64> {
    let m = spec.m as usize;
    let mut c = vec![0.0; m + 1];
    c[m] = 1.0;
    for i in (1..=m).rev() {
        let next = if i < m { spec.upper(i) * c[i + 1] } else { 0.0 };
        c[i - 1] = ((lambda - spec.diag(i)) * c[i] - next) / spec.lower(i - 1);
    }
    c
}

/// `g = z^p Q̃(z²)` with its first two derivatives.
fn g_derivs(coeffs: &[f64], p: u32, z: Complex64) -> (Complex64, Complex64, Complex64) {
    let mut g = Complex64::new(0.0, 0.0);
    let mut g1 = Complex64::new(0.0, 0.0);
    let mut g2 = Complex64::new(0.0, 0.0);
    for (j, &c) in coeffs.iter().enumerate() {
        let n = 2 * j as i32 + p as i32;
        let nf = n as f64;
        g += c * z.powi(n);
        if n >= 1 {
            g1 += c * nf * z.powi(n - 1);
        }
        if n >= 2 {
            g2 += c * nf * (nf - 1.0) * z.powi(n - 2);
        }
    }
    (g, g1, g2)
}

/// `y`, and `−y″ + (P − λ) y`, for the closed form at `z`.
pub fn closed_form_residual(spec: &QesSpec, coeffs: &[f64], lambda: f64, z: Complex64) -> (Complex64, Complex64) {
    let (g, g1, g2) = g_derivs(coeffs, spec.p, z);
    let b = spec.b;
    let t1 = -(z * z * z) - b * z;
    let t2 = -3.0 * z * z - b;
    let e = (-(z.powi(4)) / 4.0 - b * z * z / 2.0).exp();
    let y = g * e;
    let y2 = (g2 + 2.0 * g1 * t1 + g * (t2 + t1 * t1)) * e;
    let p = qes_potential(spec.m, spec.p, b).expect("validated spec");
    (y, -y2 + (p.eval(z) - lambda) * y)
}

fn residual(spec: &QesSpec, coeffs: &[f64], lambda: f64) -> f64 {
    let n = 24;
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let z = Complex64::new(-2.0 + 4.0 * i as f64 / n as f64, -2.0 + 4.0 * j as f64 / n as f64);
            let (y, r) = closed_form_residual(spec, coeffs, lambda, z);
            worst = worst.max(r.norm() / y.norm().max(1.0));
        }
    }
    worst
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(j, &v)| j as f64 * v).collect()
}

/// Remainder of `a` modulo `b` (coefficients low to high).
fn poly_rem(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db];
    while r.len() > db {
        let k = r.len() - 1;
        let f = r[k] / lead;
        for (i, &bv) in b.iter().enumerate() {
            r[k - db + i] -= f * bv;
        }
        r.pop();
    }
    while r.len() > 1 && *r.last().unwrap() == 0.0 {
        r.pop();
    }
    r
}

/// Sturm chain `p, p′, −rem(p, p′), …` in floating point.
fn sturm_chain(c: &[f64]) -> Vec<Vec<f64>> {
    let scale = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut chain = vec![c.to_vec(), derivative(c)];
    while chain.last().unwrap().len() > 1 {
        let n = chain.len();
        let r: Vec<f64> = poly_rem(&chain[n - 2], &chain[n - 1]).iter().map(|v| -v).collect();
        let small = r.iter().all(|v| v.abs() <= 1e-14 * scale);
        if small {
            break;
        }
        chain.push(r);
    }
    chain
}

fn sign_changes(chain: &[Vec<f64>], x: f64) -> usize {
    let mut last = 0.0;
    let mut n = 0;
    for p in chain {
        let v = horner(p, x);
        if v != 0.0 {
            if last != 0.0 && v.signum() != last {
                n += 1;
            }
            last = v.signum();
        }
    }
    n
}

/// All real roots of the monic polynomial `c`, certified by `deg` disjoint
/// sign changes, sorted ascending.
pub fn real_roots(c: &[f64]) -> Result<Vec<f64>> {
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    let bound = 1.0 + c[..deg].iter().fold(0.0f64, |a, v| a.max((v / lead).abs()));
    let chain = sturm_chain(c);
    let mut brackets = Vec::new();
    let mut stack = vec![(-bound, bound)];
    while let Some((a, b)) = stack.pop() {
        let n = sign_changes(&chain, a) as i64 - sign_changes(&chain, b) as i64;
        if n <= 0 {
            continue;
        }
        if n == 1 && horner(c, a).signum() != horner(c, b).signum() {
            brackets.push((a, b));
            continue;
        }
        if b - a < 1e-14 * bound {
            // Unresolved cluster; certification below will fail.
            continue;
        }
        let mid = 0.5 * (a + b);
        stack.push((a, mid));
        stack.push((mid, b));
    }
    if brackets.len() != deg {
        return Err(Error::RootIsolation { expected: deg, found: brackets.len() });
    }
    let mut roots: Vec<f64> = brackets
        .into_iter()
        .map(|(mut a, mut b)| {
            let sa = horner(c, a).signum();
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let v = horner(c, mid);
                if v == 0.0 {
                    return mid;
                }
                if v.signum() == sa {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// All `m + 1` closed-form solutions sorted by `λ`.
pub fn qes_solve(spec: &QesSpec) -> Result<Vec<QesSolution>> {
    let lambdas = qes_eigenvalues(spec)?;
    lambdas
        .into_iter()
        .enumerate()
        .map(|(k, lambda)| {
            let q_coeffs = eigenvector(spec, lambda);
            let residual = residual(spec, &q_coeffs, lambda);
            if residual > RESIDUAL_TOL {
                return Err(Error::Mismatch(format!(
                    "closed-form residual {residual:e} for {spec}, k = {k}"
                )));
            }
            let u_roots = real_roots(&q_coeffs)?;
            Ok(QesSolution { k, lambda, q_coeffs, u_roots, residual })
        })
        .collect()
}

/// Zeros of the eigenfunction: `(real positions, t with a zero at it)`.
pub fn lift_zeros(sol: &QesSolution, p: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    if p > 1 {
        return Err(Error::InvalidParity(p));
    }
    let mut real = Vec::new();
    let mut imag = Vec::new();
    for &u in &sol.u_roots {
        if u.abs() < ZERO_ROOT {
            return Err(Error::ZeroRoot(u));
        }
        let r = u.abs().sqrt();
        if u > 0.0 {
            real.extend([-r, r]);
        } else {
            imag.extend([-r, r]);
        }
    }
    if p == 1 {
        real.push(0.0);
    }
    real.sort_by(f64::total_cmp);
    imag.sort_by(f64::total_cmp);
    Ok((real, imag))
}

/// `(m_tree, n_tree)`: total and real zero counts of the eigenfunction.
pub fn classify(sol: &QesSolution, p: u32) -> Result<(usize, usize)> {
    let m_tree = 2 * (sol.u_roots.len()) + p as usize;
    let n_tree = 2 * sol.positive_roots() + p as usize;
    if n_tree > m_tree || (m_tree - n_tree) % 2 != 0 {
        return Err(Error::ConstraintViolation(format!(
            "m = {m_tree}, n = {n_tree} violates 0 <= n <= m with m - n even"
        )));
    }
    if sol.positive_roots() != sol.k {
        return Err(Error::ConstraintViolation(format!(
            "solution {} has {} positive roots",
            sol.k,
            sol.positive_roots()
        )));
    }
    Ok((m_tree, n_tree))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub spec: QesSpec,
    pub k: usize,
    pub index: usize,
    pub qes_lambda: f64,
    pub shooting_lambda: f64,
    pub lambda_ok: bool,
    pub real_match: bool,
    pub imaginary_match: bool,
    pub confined: bool,
    pub census: ZeroCensus,
    pub tol: f64,
}

impl CrossCheckReport {
    pub fn passed(&self) -> bool {
        self.lambda_ok && self.real_match && self.imaginary_match && self.confined
    }
}

fn set_match(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Half-width of a census box that holds every zero of the closed form
/// while staying where transport from the origin keeps relative accuracy.
pub fn census_half_width(real: &[f64], imag: &[f64]) -> f64 {
    let reach = real.iter().chain(imag).fold(0.0f64, |a, v| a.max(v.abs()));
    (reach + 0.4).max(1.0)
}

/// Compares the closed form with the shooting solver and the zero census.
pub fn cross_check_report(spec: &QesSpec, k: usize, tol: f64) -> Result<CrossCheckReport> {
    if k > spec.m as usize {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds m = {}", spec.m)));
    }
    let sols = qes_solve(spec)?;
    let sol = &sols[k];
    let index = sol.index(spec.p);
    let pot = spec.potential()?;
    let shot = eigenvalue(&pot, index, &SolverConfig::with_tol(tol.min(1e-10)))?;
    let (real, imag) = lift_zeros(sol, spec.p)?;
    let half = census_half_width(&real, &imag);
    let cfg = CensusConfig::with_tol(tol.min(1e-8));
    let mut c = census(&pot, sol.lambda, spec.parity(), CensusBox::square(half)?, &cfg)?;
    c.k = Some(index);
    Ok(CrossCheckReport {
        spec: *spec,
        k,
        index,
        qes_lambda: sol.lambda,
        shooting_lambda: shot.lambda,
        lambda_ok: (sol.lambda - shot.lambda).abs() <= tol,
        real_match: set_match(&real, &c.real_zeros, tol),
        imaginary_match: set_match(&imag, &c.imaginary_zeros, tol),
        confined: verify_axis_confinement(&c) && c.is_consistent(),
        census: c,
        tol,
    })
}

/// As [`cross_check_report`], failing with `Mismatch` unless every check
/// passes.
pub fn cross_check(spec: &QesSpec, k: usize, tol: f64) -> Result<CrossCheckReport> {
    let r = cross_check_report(spec, k, tol)?;
    if r.passed() {
        Ok(r)
    } else {
        Err(Error::Mismatch(format!(
            "{spec}, k = {k}: qes λ = {}, shooting λ = {}, real match {}, imaginary match {}, confined {}",
            r.qes_lambda, r.shooting_lambda, r.real_match, r.imaginary_match, r.confined
        )))
    }
}

/// Cross-checks every `k` of one spec in parallel.
pub fn cross_check_all(spec: &QesSpec, tol: f64) -> Vec<Result<CrossCheckReport>> {
    (0..=spec.m as usize)
        .into_par_iter()
        .map(|k| cross_check_report(spec, k, tol))
        .collect()
}
