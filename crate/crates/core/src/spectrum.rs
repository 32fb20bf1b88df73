//! Shooting solver for the eigenvalues `λ_0 < λ_1 < …` of
//! `−y″ + P y = λ y` on the real line.
//!
//! A trial solution is shot outward from the origin with the parity data of
//! the wanted index and matched, at the outermost turning point `x_m`, to
//! the recessive solution transported inward from a radius `R` deep in the
//! forbidden region. Zeros of the shot on `(0, x_m]` are counted directly;
//! beyond `x_m` the solution is a combination `α·rec + β·dom` of two
//! positive convex solutions and has a zero there exactly when `α` and `β`
//! have opposite signs. This gives the oscillation count used for
//! bracketing without ever carrying the shot through the region where the
//! dominant solution swamps it.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{OdeState, Parity, Propagator};
use crate::polynomial::EvenPolynomial;

/// `λ_k` together with its parity and certified real-zero count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub k: usize,
    pub lambda: f64,
    pub parity: Parity,
    pub real_zero_count: usize,
    pub radius_used: f64,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub tol: f64,
    /// Overrides the radius heuristic when set.
    pub radius: Option<f64>,
    /// Relative accuracy of the ODE transport.
    pub ode_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            radius: None,
            ode_tol: 1e-14,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Smallest `R` on a 0.005 grid with `P(R) − λ ≥ 25` and
/// `∫_0^R √max(P − λ, 0) ≥ 40`.
pub fn default_radius(p: &EvenPolynomial, lambda: f64) -> f64 {
    let dt = 0.005;
    let mut t: f64 = 0.0;
    let mut integral = 0.0;
    let mut prev = (p.eval_real(0.0) - lambda).max(0.0).sqrt();
    loop {
        let next_t = t + dt;
        let cur = (p.eval_real(next_t) - lambda).max(0.0).sqrt();
        integral += 0.5 * (prev + cur) * dt;
        t = next_t;
        prev = cur;
        if (p.eval_real(t) - lambda >= 25.0 && integral >= 40.0) || t > 1e4 {
            return t;
        }
    }
}

/// Largest `x ∈ [0, r]` with `P(x) = λ`, or 0 when `P > λ` on the whole
/// half-line.
pub fn outer_turning_point(p: &EvenPolynomial, lambda: f64, r: f64) -> f64 {
    let f = |x: f64| p.eval_real(x) - lambda;
    let n = 4000;
    let h = r / n as f64;
    let mut hi = r;
    for i in (0..n).rev() {
        let lo = i as f64 * h;
        if f(lo) <= 0.0 {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if f(m) <= 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            return a;
        }
        hi = lo;
    }
    0.0
}

/// One matched shot at fixed `λ`.
#[derive(Debug, Clone)]
pub struct Shot {
    pub lambda: f64,
    pub radius: f64,
    pub x_match: f64,
    /// Outward solution at `x_match`.
    pub outward: OdeState,
    /// Recessive solution at `x_match`, normalised to `(1, w)` at `R`.
    pub recessive: OdeState,
    /// Sign changes of the outward solution on `(0, x_match]`.
    pub inner_zeros: usize,
    /// Normalised Wronskian of outward and recessive solutions.
    pub discriminant: f64,
}

const TAIL_NOISE: f64 = 1e-12;

impl Shot {
    pub fn new(
        p: &EvenPolynomial,
        lambda: f64,
        radius: f64,
        parity: Parity,
        ode_tol: f64,
    ) -> Result<Self> {
        let margin = p.eval_real(radius) - lambda;
        if margin <= 0.0 {
            return Err(Error::RadiusTooSmall { radius, margin });
        }
        let x_t = outer_turning_point(p, lambda, radius);
        let x_match = x_t.max(0.1 * radius);
        let prop = Propagator::new(p, lambda).with_tol(ode_tol);

        let wavelength_step = 1.0 / ((lambda - p.real_minimum()).max(0.0) + 1.0).sqrt();
        let outward_prop = prop.clone().with_max_step(wavelength_step);
        let mut last_sign = match parity {
            Parity::Even => 1.0,
            Parity::Odd => 1.0,
        };
        let mut inner_zeros = 0usize;
        let outward = outward_prop.propagate_observed(
            parity.initial_state(),
            Complex64::new(x_match, 0.0),
            |s| {
                let v = s.y.re;
                if v != 0.0 && v.signum() != last_sign {
                    inner_zeros += 1;
                    last_sign = v.signum();
                }
            },
        )?;

        let q = margin;
        let dq = p.dense_coeffs().iter().enumerate().skip(1).fold(0.0, |acc, (n, c)| {
            acc + n as f64 * c * radius.powi(n as i32 - 1)
        });
        let w = -q.sqrt() - dq / (4.0 * q);
        let start = OdeState::new(Complex64::new(radius, 0.0), 1.0.into(), w.into());
        let recessive = prop.propagate(start, Complex64::new(x_match, 0.0))?;

        let s = (p.eval_real(x_match) - lambda).abs().max(1.0).sqrt();
        let no = (outward.y.re.powi(2) + (outward.dy.re / s).powi(2)).sqrt();
        let nr = (recessive.y.re.powi(2) + (recessive.dy.re / s).powi(2)).sqrt();
        let discriminant =
            (recessive.y.re * outward.dy.re - recessive.dy.re * outward.y.re) / (s * no * nr);
        Ok(Self {
            lambda,
            radius,
            x_match,
            outward,
            recessive,
            inner_zeros,
            discriminant,
        })
    }

    /// Whether the continuation past `x_match` picks up one more zero.
    pub fn tail_zero(&self) -> bool {
        // β has the sign of the discriminant because rec(x_m) > 0.
        self.discriminant.abs() > TAIL_NOISE
            && self.outward.y.re != 0.0
            && self.discriminant.signum() != self.outward.y.re.signum()
    }

    /// Zeros on `(0, ∞)` of the exact solution with this shot's data.
    pub fn half_line_zeros(&self) -> usize {
        self.inner_zeros + usize::from(self.tail_zero())
    }

    /// `y′/y − rec′/rec` at the matching point.
    pub fn log_derivative_mismatch(&self) -> f64 {
        self.outward.dy.re / self.outward.y.re - self.recessive.dy.re / self.recessive.y.re
    }
}

/// Logarithmic-derivative mismatch between the outward shot and the
/// recessive solution; zero exactly at eigenvalues of the given parity.
pub fn miss(p: &EvenPolynomial, lambda: f64, radius: f64, parity: Parity) -> Result<f64> {
    Ok(Shot::new(p, lambda, radius, parity, SolverConfig::default().ode_tol)?.log_derivative_mismatch())
}

/// Real zeros on `(−R, R)` of the solution with the given parity data,
/// continued recessively past the turning point.
pub fn node_count(p: &EvenPolynomial, lambda: f64, radius: f64, parity: Parity) -> Result<usize> {
    let shot = Shot::new(p, lambda, radius, parity, SolverConfig::default().ode_tol)?;
    Ok(2 * shot.half_line_zeros() + parity.bit())
}

fn count_at(p: &EvenPolynomial, lambda: f64, radius: f64, parity: Parity, cfg: &SolverConfig) -> Result<(usize, Shot)> {
    let shot = Shot::new(p, lambda, radius, parity, cfg.ode_tol)?;
    Ok((2 * shot.half_line_zeros() + parity.bit(), shot))
}

/// The `k`-th eigenvalue.
pub fn eigenvalue(p: &EvenPolynomial, k: usize, cfg: &SolverConfig) -> Result<Eigenpair> {
    if cfg.tol <= 0.0 {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let parity = Parity::of_index(k);
    let floor = p.real_minimum();
    let lo0 = floor - 1.0;

    // Upper bracket: grow geometrically from P(0).
    let mut step = 1.0;
    let mut hi = p.eval_real(0.0).max(lo0) + step;
    let radius = loop {
        let r = cfg.radius.unwrap_or_else(|| default_radius(p, hi));
        let (n, _) = count_at(p, hi, r, parity, cfg)?;
        if n > k {
            break r;
        }
        step *= 2.0;
        hi += step;
        if !hi.is_finite() || step > 1e12 {
            return Err(Error::ConvergenceFailure { k, lo: lo0, hi });
        }
    };
    let mut lo = lo0;
    if count_at(p, lo, radius, parity, cfg)?.0 > k {
        return Err(Error::ConvergenceFailure { k, lo, hi });
    }

    // Bisection on the oscillation count.
    let mut d_lo = count_at(p, lo, radius, parity, cfg)?.1.discriminant;
    let mut d_hi = count_at(p, hi, radius, parity, cfg)?.1.discriminant;
    let mut iters = 0;
    while hi - lo > 1e-2 * (1.0 + hi.abs()) || d_lo * d_hi >= 0.0 {
        let mid = 0.5 * (lo + hi);
        let (n, shot) = count_at(p, mid, radius, parity, cfg)?;
        if n > k {
            hi = mid;
            d_hi = shot.discriminant;
        } else {
            lo = mid;
            d_lo = shot.discriminant;
        }
        iters += 1;
        if iters > 200 || hi - lo < cfg.tol {
            break;
        }
    }

    // Illinois refinement of the discriminant root.
    let mut lambda = 0.5 * (lo + hi);
    if d_lo * d_hi < 0.0 {
        let mut side = 0i32;
        let mut prev = f64::NAN;
        let mut converged = false;
        for _ in 0..200 {
            let cand = (lo * d_hi - hi * d_lo) / (d_hi - d_lo);
            let cand = if cand > lo && cand < hi { cand } else { 0.5 * (lo + hi) };
            let d = count_at(p, cand, radius, parity, cfg)?.1.discriminant;
            lambda = cand;
            if d == 0.0 || hi - lo <= cfg.tol || (cand - prev).abs() < 0.25 * cfg.tol {
                converged = true;
                break;
            }
            prev = cand;
            if d * d_hi > 0.0 {
                hi = cand;
                d_hi = d;
                if side == 1 {
                    d_lo *= 0.5;
                }
                side = 1;
            } else {
                lo = cand;
                d_lo = d;
                if side == -1 {
                    d_hi *= 0.5;
                }
                side = -1;
            }
        }
        if !converged {
            return Err(Error::ConvergenceFailure { k, lo, hi });
        }
    } else if hi - lo > cfg.tol {
        return Err(Error::ConvergenceFailure { k, lo, hi });
    }

    let shot = Shot::new(p, lambda, radius, parity, cfg.ode_tol)?;
    let real_zero_count = 2 * shot.inner_zeros + parity.bit();
    if real_zero_count != k {
        return Err(Error::IndexMismatch {
            k,
            found: real_zero_count,
        });
    }
    Ok(Eigenpair {
        k,
        lambda,
        parity,
        real_zero_count,
        radius_used: radius,
    })
}

/// `λ_0..λ_K`, computed concurrently and returned in index order.
pub fn eigenvalues(p: &EvenPolynomial, max_k: usize, tol: f64) -> Result<Vec<Eigenpair>> {
    eigenvalues_with(p, max_k, &SolverConfig::with_tol(tol))
}

pub fn eigenvalues_with(p: &EvenPolynomial, max_k: usize, cfg: &SolverConfig) -> Result<Vec<Eigenpair>> {
    let list: Vec<Eigenpair> = (0..=max_k)
        .into_par_iter()
        .map(|k| eigenvalue(p, k, cfg))
        .collect::<Result<_>>()?;
    for w in list.windows(2) {
        if w[1].lambda <= w[0].lambda {
            return Err(Error::ConvergenceFailure {
                k: w[1].k,
                lo: w[0].lambda,
                hi: w[1].lambda,
            });
        }
    }
    Ok(list)
}
