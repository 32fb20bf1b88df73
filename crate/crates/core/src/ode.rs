//! Re-centred Taylor series transport of solutions of
//! `−y″ + (P(z) − λ) y = 0` along straight segments in the complex plane.
//!
//! At every substep the potential is re-expanded about the current point and
//! the series coefficients of `y` follow from the exact recurrence
//! `(n+1)(n+2) a_{n+2} = Σ_j q_j a_{n−j}`, where `q_j` are the shifted
//! coefficients of `P − λ`. The step is chosen so that the last two series
//! terms stay below `tol` relative to the size of the state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::EvenPolynomial;

pub const DEFAULT_ORDER: usize = 30;
pub const DEFAULT_TOL: f64 = 1e-13;
pub const DEFAULT_MIN_STEP: f64 = 1e-12;

/// Parity of a solution under `z ↦ −z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_index(k: usize) -> Self {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `(y(0), y′(0))`: `(1, 0)` for even, `(0, 1)` for odd.
    pub fn initial(self) -> (f64, f64) {
        match self {
            Parity::Even => (1.0, 0.0),
            Parity::Odd => (0.0, 1.0),
        }
    }

    pub fn initial_state(self) -> OdeState {
        let (y, dy) = self.initial();
        OdeState::new(Complex64::new(0.0, 0.0), y.into(), dy.into())
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub z: Complex64,
    pub y: Complex64,
    pub dy: Complex64,
}

impl OdeState {
    pub fn new(z: Complex64, y: Complex64, dy: Complex64) -> Self {
        Self { z, y, dy }
    }

    pub fn conj(self) -> Self {
        Self::new(self.z.conj(), self.y.conj(), self.dy.conj())
    }

    pub fn norm(&self) -> f64 {
        self.y.norm() + self.dy.norm()
    }

    /// Wronskian `y·v′ − y′·v` with another state at the same point.
    pub fn wronskian(&self, other: &OdeState) -> Complex64 {
        self.y * other.dy - self.dy * other.y
    }

    fn scaled(self, s: f64) -> Self {
        Self::new(self.z, self.y * s, self.dy * s)
    }
}

/// Integrator for `y″ = (q(z) − μ) y` with `q` even and real.
#[derive(Debug, Clone)]
pub struct Propagator {
    dense: Vec<f64>,
    mu: f64,
    pub order: usize,
    pub tol: f64,
    pub min_step: f64,
    pub max_step: f64,
}

impl Propagator {
    pub fn new(p: &EvenPolynomial, lambda: f64) -> Self {
        Self::from_even_coeffs(p.even_coeffs(), lambda)
    }

    /// `q(z) = Σ even_coeffs[j] z^{2j}` with no sign condition on the leading
    /// coefficient, so the imaginary-axis restriction can reuse the engine.
    pub fn from_even_coeffs(even_coeffs: &[f64], mu: f64) -> Self {
        let mut dense = vec![0.0; 2 * even_coeffs.len().max(1) - 1];
        for (j, &c) in even_coeffs.iter().enumerate() {
            dense[2 * j] = c;
        }
        Self {
            dense,
            mu,
            order: DEFAULT_ORDER,
            tol: DEFAULT_TOL,
            min_step: DEFAULT_MIN_STEP,
            max_step: f64::INFINITY,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order.max(4);
        self
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }

    pub fn lambda(&self) -> f64 {
        self.mu
    }

    /// `q(z) − μ` at `z`.
    pub fn coefficient(&self, z: Complex64) -> Complex64 {
        self.dense
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
            - self.mu
    }

    /// Taylor coefficients of `q − μ` about `c`.
    fn shifted(&self, c: Complex64) -> Vec<Complex64> {
        let mut q: Vec<Complex64> = self.dense.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        q[0] -= self.mu;
        let n = q.len();
        // Repeated synthetic division by (z − c).
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = q[j + 1] * c;
                q[j] += t;
            }
        }
        q
    }

    /// Series coefficients `a_0..a_order` of the solution through `(y, dy)`
    /// at the expansion point whose shifted potential is `q`.
    fn series_into(&self, q: &[Complex64], y: Complex64, dy: Complex64, a: &mut Vec<Complex64>) {
        let n_max = self.order;
        a.clear();
        a.resize(n_max + 1, Complex64::new(0.0, 0.0));
        a[0] = y;
        if n_max >= 1 {
            a[1] = dy;
        }
        for n in 0..n_max.saturating_sub(1) {
            let mut s = Complex64::new(0.0, 0.0);
            for (j, qj) in q.iter().enumerate().take(n + 1) {
                s += qj * a[n - j];
            }
            a[n + 2] = s / ((n + 1) * (n + 2)) as f64;
        }
    }

    fn step_bound(&self, a: &[Complex64]) -> f64 {
        let scale = a[0].norm() + a[1].norm();
        if scale == 0.0 {
            return f64::INFINITY;
        }
        let n = a.len() - 1;
        // Coefficients can vanish in a periodic pattern (e.g. expanding about
        // the origin), so look at a window as wide as that period.
        let window = (self.dense.len() + 1).min(n - 1);
        let mut h = f64::INFINITY;
        for k in n - window..=n {
            let ak = a[k].norm();
            if ak > 0.0 {
                h = h.min((self.tol * scale / (k as f64 * ak)).powf(1.0 / k as f64));
            }
        }
        h
    }

    fn eval_series(a: &[Complex64], h: Complex64) -> (Complex64, Complex64) {
        let n = a.len() - 1;
        let mut y = a[n];
        let mut dy = a[n] * n as f64;
        for k in (0..n).rev() {
            y = y * h + a[k];
            if k >= 1 {
                dy = dy * h + a[k] * k as f64;
            }
        }
        (y, dy)
    }

    /// Continues `state` along the segment to `target`.
    pub fn propagate(&self, state: OdeState, target: Complex64) -> Result<OdeState> {
        self.propagate_observed(state, target, |_| {})
    }

    /// As [`Propagator::propagate`], calling `observe` at every substep end.
    pub fn propagate_observed<F: FnMut(&OdeState)>(
        &self,
        state: OdeState,
        target: Complex64,
        mut observe: F,
    ) -> Result<OdeState> {
        let mut out = [state];
        self.propagate_many(&mut out, target, |s| observe(&s[0]))?;
        Ok(out[0])
    }

    /// Propagates several solutions together over identical substeps.
    /// Returns the natural log of the common factor divided out to avoid
    /// overflow (zero unless the solutions exceed about `2^600`).
    pub fn propagate_many<F: FnMut(&[OdeState])>(
        &self,
        states: &mut [OdeState],
        target: Complex64,
        mut observe: F,
    ) -> Result<f64> {
        const RESCALE_AT: f64 = 4.149_515_568_880_993e180; // 2^600
        let mut log_scale = 0.0;
        if states.is_empty() {
            return Ok(0.0);
        }
        let start = states[0].z;
        let total = (target - start).norm();
        if total == 0.0 {
            return Ok(0.0);
        }
        let dir = (target - start) / total;
        let mut travelled = 0.0;
        let mut series: Vec<Vec<Complex64>> = vec![Vec::new(); states.len()];
        while travelled < total {
            let c = start + dir * travelled;
            let q = self.shifted(c);
            let mut h = (total - travelled).min(self.max_step);
            for (s, a) in states.iter().zip(series.iter_mut()) {
                self.series_into(&q, s.y, s.dy, a);
                h = h.min(self.step_bound(a));
            }
            let remaining = total - travelled;
            if h < self.min_step && remaining > self.min_step {
                return Err(Error::StepUnderflow { z: c, step: h });
            }
            let last = h >= remaining;
            let h = if last { remaining } else { h };
            let hv = dir * h;
            travelled = if last { total } else { travelled + h };
            let z = if last { target } else { start + dir * travelled };
            for (s, a) in states.iter_mut().zip(series.iter()) {
                let (y, dy) = Self::eval_series(a, hv);
                *s = OdeState::new(z, y, dy);
            }
            let big = states.iter().map(|s| s.y.norm().max(s.dy.norm())).fold(0.0, f64::max);
            if big > RESCALE_AT {
                for s in states.iter_mut() {
                    *s = s.scaled(1.0 / RESCALE_AT);
                }
                log_scale += RESCALE_AT.ln();
            }
            observe(states);
        }
        Ok(log_scale)
    }

    /// Follows the polyline `path` (first vertex must equal `state.z`).
    pub fn propagate_path(&self, mut state: OdeState, path: &[Complex64]) -> Result<OdeState> {
        for &p in path {
            state = self.propagate(state, p)?;
        }
        Ok(state)
    }
}

/// Taylor coefficients `a_0..a_order` of the solution of `−y″ + (P − λ)y = 0`
/// with `(y(0), y′(0)) = init`.
pub fn central_series(
    p: &EvenPolynomial,
    lambda: f64,
    init: (f64, f64),
    order: usize,
) -> Result<Vec<f64>> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!(
            "series order {order} must be at least 2"
        )));
    }
    let q: Vec<f64> = {
        let mut d = p.dense_coeffs();
        d[0] -= lambda;
        d
    };
    let mut a = vec![0.0; order + 1];
    a[0] = init.0;
    a[1] = init.1;
    for n in 0..order - 1 {
        let s: f64 = q
            .iter()
            .enumerate()
            .take(n + 1)
            .map(|(j, qj)| qj * a[n - j])
            .sum();
        a[n + 2] = s / ((n + 1) * (n + 2)) as f64;
    }
    Ok(a)
}

/// The real ODE satisfied by `u(t) = y(it)`: `u″ = (P̃(t) + λ) u` with
/// `P̃(t) = −P(it)`, i.e. `−u″ + P̃ u = −λ u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImaginaryRestriction {
    /// Even coefficients of `P̃`, `(−1)^{j+1} c_j`.
    pub tilde_coeffs: Vec<f64>,
    pub lambda: f64,
}

impl ImaginaryRestriction {
    pub fn propagator(&self) -> Propagator {
        Propagator::from_even_coeffs(&self.tilde_coeffs, -self.lambda)
    }

    /// `P(it) − λ`, the coefficient in `u″ + (P(it) − λ) u = 0`.
    pub fn coefficient(&self, t: f64) -> f64 {
        let w = t * t;
        -self.tilde_coeffs.iter().rev().fold(0.0, |acc, &c| acc * w + c) - self.lambda
    }
}

pub fn imaginary_restriction(p: &EvenPolynomial, lambda: f64) -> ImaginaryRestriction {
    let tilde_coeffs = p
        .even_coeffs()
        .iter()
        .enumerate()
        .map(|(j, &c)| if j % 2 == 0 { -c } else { c })
        .collect();
    ImaginaryRestriction {
        tilde_coeffs,
        lambda,
    }
}
