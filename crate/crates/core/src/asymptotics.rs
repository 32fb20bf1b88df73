//! Asymptotic values of `f = y/y₁` in the Stokes sectors, where `y` is an
//! eigenfunction and `y₁` the solution of opposite parity with unit
//! Wronskian at the origin.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{OdeState, Parity, Propagator};
use crate::polynomial::{stokes, EvenPolynomial};
use crate::qes::{qes_solve, QesSpec};
use crate::spectrum::default_radius;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticTable {
    pub d: usize,
    /// `a_0..a_{d+1}`, indexed by sector.
    pub values: Vec<Complex64>,
    pub radius: f64,
    pub parity_of_y: Parity,
}

impl AsymptoticTable {
    fn at(&self, j: i64) -> Complex64 {
        let n = self.values.len() as i64;
        self.values[j.rem_euclid(n) as usize]
    }

    /// Largest relative defect of `a_j = conj(a_{−j})` and
    /// `a_j = −conj(a_{d/2+1−j})`.
    pub fn symmetry_defect(&self) -> f64 {
        let h = (self.d / 2 + 1) as i64;
        (0..self.values.len() as i64)
            .map(|j| {
                let a = self.at(j);
                let r = (a - self.at(-j).conj()).norm();
                let i = (a + self.at(h - j).conj()).norm();
                r.max(i) / (1.0 + a.norm())
            })
            .fold(0.0, f64::max)
    }

    /// `|a_0|` and `|a_{d/2+1}|`.
    pub fn axis_values(&self) -> (f64, f64) {
        (self.values[0].norm(), self.values[self.d / 2 + 1].norm())
    }

    pub fn adjacent_distinct(&self, tol: f64) -> bool {
        let n = self.values.len() as i64;
        (0..n).all(|j| (self.at(j) - self.at(j + 1)).norm() > tol)
    }
}

/// Initial data `(y, y₁)` at the origin; `f = y/y₁` is then odd.
pub fn normalized_pair(parity: Parity) -> (OdeState, OdeState) {
    (parity.initial_state(), parity.flip().initial_state())
}

/// `a/b` without forming `|b|²` of huge values.
fn safe_ratio(a: Complex64, b: Complex64) -> Complex64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 || !s.is_finite() {
        return a / b;
    }
    (a / s) / (b / s)
}

/// How the eigenfunction `y` is evaluated along a ray.
#[derive(Debug, Clone)]
enum Numerator {
    Propagated,
    /// `z^p Q̃(z²) e^{T(z)}` scaled to the origin normalisation.
    ClosedForm { spec: QesSpec, coeffs: Vec<f64> },
}

impl Numerator {
    /// `ln y(z)` for the closed form.
    fn ln_closed(spec: &QesSpec, coeffs: &[f64], z: Complex64) -> Complex64 {
        let u = z * z;
        let q = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c);
        let g = if spec.p == 1 { q * z } else { q };
        // The origin normalisation fixes y(0) or y′(0) to 1; both equal c_0.
        g.ln() - Complex64::new(coeffs[0], 0.0).ln() - z.powi(4) / 4.0 - spec.b * u / 2.0
    }
}

/// `f` at radii `r` and `1.2 r` along direction `theta`.
fn ratio_on_ray(
    p: &EvenPolynomial,
    lambda: f64,
    parity: Parity,
    numerator: &Numerator,
    theta: f64,
    r: f64,
) -> Result<(Complex64, Complex64)> {
    let prop = Propagator::new(p, lambda).with_tol(1e-16);
    let (y, y1) = normalized_pair(parity);
    let dir = Complex64::from_polar(1.0, theta);
    match numerator {
        Numerator::Propagated => {
            let mut pair = [y, y1];
            prop.propagate_many(&mut pair, dir * r, |_| {})?;
            let near = safe_ratio(pair[0].y, pair[1].y);
            prop.propagate_many(&mut pair, dir * (1.2 * r), |_| {})?;
            let far = safe_ratio(pair[0].y, pair[1].y);
            Ok((near, far))
        }
        Numerator::ClosedForm { spec, coeffs } => {
            let mut one = [y1];
            let mut log_scale = prop.propagate_many(&mut one, dir * r, |_| {})?;
            let at = |s: &OdeState, ls: f64| (Numerator::ln_closed(spec, coeffs, s.z) - s.y.ln() - ls).exp();
            let near = at(&one[0], log_scale);
            log_scale += prop.propagate_many(&mut one, dir * (1.2 * r), |_| {})?;
            let far = at(&one[0], log_scale);
            Ok((near, far))
        }
    }
}

fn sector_radius(p: &EvenPolynomial, lambda: f64, r: Option<f64>) -> f64 {
    r.unwrap_or_else(|| default_radius(p, lambda))
}

/// The stabilised value of `f` in sector `j`.
///
/// Returns 0 when `|f| < tol` at both radii.
pub fn asymptotic_value(
    p: &EvenPolynomial,
    lambda: f64,
    parity: Parity,
    j: usize,
    radius: Option<f64>,
    tol: f64,
) -> Result<Complex64> {
    let geo = stokes(p.degree())?;
    let n = geo.sectors();
    if j >= n {
        return Err(Error::InvalidArgument(format!("sector {j} out of range 0..{n}")));
    }
    asymptotic_value_with(p, lambda, parity, &Numerator::Propagated, j, radius, tol)
}

fn asymptotic_value_with(
    p: &EvenPolynomial,
    lambda: f64,
    parity: Parity,
    numerator: &Numerator,
    j: usize,
    radius: Option<f64>,
    tol: f64,
) -> Result<Complex64> {
    let geo = stokes(p.degree())?;
    let n = geo.sectors();
    if j >= n {
        return Err(Error::InvalidArgument(format!("sector {j} out of range 0..{n}")));
    }
    let r = sector_radius(p, lambda, radius);
    let (near, far) = ratio_on_ray(p, lambda, parity, numerator, geo.bisectors[j].radians(), r)?;
    if near.norm() < tol && far.norm() < tol {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let gap = (near - far).norm();
    if !(gap <= tol * (1.0 + far.norm())) {
        return Err(Error::NotStabilized { gap });
    }
    Ok(far)
}

/// All `d + 2` asymptotic values, sectors evaluated in parallel.
pub fn table(
    p: &EvenPolynomial,
    lambda: f64,
    parity: Parity,
    radius: Option<f64>,
    tol: f64,
) -> Result<AsymptoticTable> {
    table_with(p, lambda, parity, &Numerator::Propagated, radius, tol)
}

fn table_with(
    p: &EvenPolynomial,
    lambda: f64,
    parity: Parity,
    numerator: &Numerator,
    radius: Option<f64>,
    tol: f64,
) -> Result<AsymptoticTable> {
    let d = p.degree();
    let r = sector_radius(p, lambda, radius);
    let values = (0..d + 2)
        .into_par_iter()
        .map(|j| asymptotic_value_with(p, lambda, parity, numerator, j, Some(r), tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(AsymptoticTable {
        d,
        values,
        radius: r,
        parity_of_y: parity,
    })
}

fn qes_numerator(spec: &QesSpec, k: usize) -> Result<(f64, Numerator)> {
    if k > spec.m as usize {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds m = {}", spec.m)));
    }
    let sol = qes_solve(spec)?.swap_remove(k);
    Ok((sol.lambda, Numerator::ClosedForm { spec: *spec, coeffs: sol.q_coeffs }))
}

/// Table for the `k`-th closed-form eigenfunction of a sextic.
///
/// `y` is evaluated from its closed form; only `y₁` is transported. In
/// deep double wells the propagated `y` loses the cancellation that makes
/// it recessive, while the closed form keeps it exactly.
pub fn qes_table(spec: &QesSpec, k: usize, radius: Option<f64>, tol: f64) -> Result<AsymptoticTable> {
    let (lambda, num) = qes_numerator(spec, k)?;
    table_with(&spec.potential()?, lambda, spec.parity(), &num, radius, tol)
}

/// `Arg a_1` for the `k`-th closed-form eigenfunction of the sextic
/// `(m, p, b)`.
pub fn g(k: usize, m: u32, p: u32, b: f64, tol: f64) -> Result<f64> {
    let spec = QesSpec::new(m, p, b)?;
    let (lambda, num) = qes_numerator(&spec, k)?;
    let a = asymptotic_value_with(&spec.potential()?, lambda, spec.parity(), &num, 1, None, tol)?;
    Ok(a.arg())
}

/// Open interval that `g` must lie in for parity bit `p`.
pub fn g_interval(p: u32) -> (f64, f64) {
    use std::f64::consts::FRAC_PI_2;
    if p == 1 {
        (0.0, FRAC_PI_2)
    } else {
        (-FRAC_PI_2, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GScan {
    pub k: usize,
    pub m: u32,
    pub p: u32,
    /// `(b, g(b))` in grid order.
    pub samples: Vec<(f64, f64)>,
    pub min: f64,
    pub max: f64,
}

impl GScan {
    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn within_interval(&self) -> bool {
        let (lo, hi) = g_interval(self.p);
        self.samples.iter().all(|&(_, v)| v > lo && v < hi)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("b,g\n");
        for (b, v) in &self.samples {
            s.push_str(&format!("{b:.16e},{v:.16e}\n"));
        }
        s
    }
}

/// Samples `g` over a sorted `b` grid.
pub fn surjectivity_scan(k: usize, m: u32, p: u32, b_grid: &[f64], tol: f64) -> Result<GScan> {
    if b_grid.is_empty() {
        return Err(Error::InvalidArgument("empty b grid".into()));
    }
    if b_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("b grid must be sorted".into()));
    }
    let samples = b_grid
        .par_iter()
        .map(|&b| g(k, m, p, b, tol).map(|v| (b, v)))
        .collect::<Result<Vec<_>>>()?;
    let min = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let max = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(GScan { k, m, p, samples, min, max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::qes_potential;
    use crate::spectrum::{eigenvalue, SolverConfig};

    #[test]
    fn pair_normalisations() {
        let (y, y1) = normalized_pair(Parity::Even);
        assert_eq!((y.y.re, y.dy.re, y1.y.re, y1.dy.re), (1.0, 0.0, 0.0, 1.0));
        let (y, y1) = normalized_pair(Parity::Odd);
        assert_eq!((y.y.re, y.dy.re, y1.y.re, y1.dy.re), (0.0, 1.0, 1.0, 0.0));
        assert_eq!(y.wronskian(&y1).norm(), 1.0);
    }

    #[test]
    fn quartic_ground_state_table() {
        let p = EvenPolynomial::monomial(4).unwrap();
        let e = eigenvalue(&p, 0, &SolverConfig::with_tol(1e-12)).unwrap();
        let t = table(&p, e.lambda, Parity::Even, None, 1e-6).unwrap();
        let (a0, a3) = t.axis_values();
        assert!(a0 < 1e-6 && a3 < 1e-6, "{t:?}");
        assert!(t.symmetry_defect() < 1e-6, "{t:?}");
        let a1 = t.values[1];
        assert!(a1.re.abs() > 1e-3 && a1.im.abs() > 1e-3, "{a1}");
        assert!(t.adjacent_distinct(1e-6));
    }

    #[test]
    fn qes_even_sectors_vanish() {
        let p = qes_potential(1, 0, 0.0).unwrap();
        let t = table(&p, -2.0 * 2f64.sqrt(), Parity::Even, None, 1e-6).unwrap();
        for j in (0..8).step_by(2) {
            assert!(t.values[j].norm() < 1e-6, "{j}: {}", t.values[j]);
        }
        assert!(t.symmetry_defect() < 1e-6);
    }

    #[test]
    fn g_intervals() {
        let v = g(0, 0, 0, 0.0, 1e-8).unwrap();
        assert!(v > -std::f64::consts::FRAC_PI_2 && v < 0.0, "{v}");
        let v = g(0, 0, 1, 0.0, 1e-8).unwrap();
        assert!(v > 0.0 && v < std::f64::consts::FRAC_PI_2, "{v}");
    }

    #[test]
    fn scan_edges() {
        let s = surjectivity_scan(0, 0, 0, &[0.5], 1e-8).unwrap();
        assert_eq!(s.width(), 0.0);
        assert!(surjectivity_scan(0, 0, 0, &[1.0, 0.0], 1e-8).is_err());
        assert!(surjectivity_scan(0, 0, 0, &[], 1e-8).is_err());
    }

    #[test]
    fn bad_sector() {
        let p = EvenPolynomial::monomial(4).unwrap();
        assert!(asymptotic_value(&p, 1.0, Parity::Even, 6, None, 1e-6).is_err());
    }
}
