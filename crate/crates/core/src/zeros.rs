//! Zeros of solutions in a symmetric box: real and imaginary axis zeros by
//! sign changes of the real restrictions, off-axis zeros by the argument
//! principle on quadrant rectangles.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{imaginary_restriction, OdeState, Parity, Propagator};
use crate::polynomial::EvenPolynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Real,
    Imaginary,
}

/// The region `[−x_max, x_max] × [−y_max, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensusBox {
    pub x_max: f64,
    pub y_max: f64,
}

impl CensusBox {
    pub fn new(x_max: f64, y_max: f64) -> Result<Self> {
        if !(x_max > 0.0 && y_max > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "box {x_max}x{y_max} must have positive extents"
            )));
        }
        Ok(Self { x_max, y_max })
    }

    pub fn square(half_width: f64) -> Result<Self> {
        Self::new(half_width, half_width)
    }

    pub fn rect(&self) -> Rect {
        Rect {
            x0: -self.x_max,
            x1: self.x_max,
            y0: -self.y_max,
            y1: self.y_max,
        }
    }

    fn scaled(&self, s: f64) -> Self {
        Self {
            x_max: self.x_max * s,
            y_max: self.y_max * s,
        }
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.x0, self.y0),
            Complex64::new(self.x1, self.y0),
            Complex64::new(self.x1, self.y1),
            Complex64::new(self.x0, self.y1),
        ]
    }

    fn diameter(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    fn contains(&self, z: Complex64) -> bool {
        z.re > self.x0 && z.re < self.x1 && z.im > self.y0 && z.im < self.y1
    }
}

#[derive(Debug, Clone)]
pub struct CensusConfig {
    /// Accuracy of zero positions.
    pub tol: f64,
    /// `|y| ≤ floor·|y′|·diam` on a contour counts as a boundary zero.
    pub floor: f64,
    pub jitter_rel: f64,
    pub jitter_retries: usize,
    pub max_nodes_per_side: usize,
    pub ode_tol: f64,
}

impl Default for CensusConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            floor: 1e-10,
            jitter_rel: 1e-3,
            jitter_retries: 3,
            max_nodes_per_side: 1 << 16,
            ode_tol: 1e-13,
        }
    }
}

impl CensusConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Zero census of one solution inside a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCensus {
    pub real_zeros: Vec<f64>,
    /// Values `t` with a zero at `it`, excluding `t = 0`.
    pub imaginary_zeros: Vec<f64>,
    pub offaxis_count: usize,
    /// Open quadrants I..IV in counter-clockwise order.
    pub quadrant_counts: [usize; 4],
    pub quadrant_zeros: Vec<Complex64>,
    /// Argument-principle count over the whole box.
    pub total_count: usize,
    #[serde(rename = "box")]
    pub census_box: CensusBox,
    pub lambda: f64,
    pub parity: Parity,
    pub k: Option<usize>,
}

impl ZeroCensus {
    /// Whole-box count equals the axis and quadrant decomposition.
    pub fn is_consistent(&self) -> bool {
        self.total_count == self.real_zeros.len() + self.imaginary_zeros.len() + self.offaxis_count
    }

    pub fn quadrants_agree(&self) -> bool {
        self.quadrant_counts.iter().all(|&c| c == self.quadrant_counts[0])
    }
}

fn axis_propagator(p: &EvenPolynomial, lambda: f64, axis: Axis, ode_tol: f64) -> Propagator {
    match axis {
        Axis::Real => Propagator::new(p, lambda),
        Axis::Imaginary => imaginary_restriction(p, lambda).propagator(),
    }
    .with_tol(ode_tol)
}

/// Zeros on `(0, limit]` of the restriction of the parity solution to the
/// chosen axis, with their negatives; sorted ascending. The origin is never
/// included.
pub fn axis_zeros(
    p: &EvenPolynomial,
    lambda: f64,
    parity: Parity,
    limit: f64,
    tol: f64,
    axis: Axis,
) -> Result<Vec<f64>> {
    axis_zeros_with(p, lambda, parity, limit, tol, axis, CensusConfig::default().ode_tol)
}

fn axis_zeros_with(
    p: &EvenPolynomial,
    lambda: f64,
    parity: Parity,
    limit: f64,
    tol: f64,
    axis: Axis,
    ode_tol: f64,
) -> Result<Vec<f64>> {
    if !(limit > 0.0 && tol > 0.0) {
        return Err(Error::InvalidArgument("limit and tol must be positive".into()));
    }
    let prop = axis_propagator(p, lambda, axis, ode_tol);
    // Zeros of a real solution are at least π/√max|q| apart.
    let n = 400;
    let qmax = (0..=n)
        .map(|i| prop.coefficient(Complex64::new(limit * i as f64 / n as f64, 0.0)).re.abs())
        .fold(0.0, f64::max);
    let scan = prop.clone().with_max_step(1.0 / (qmax + 1.0).sqrt());

    let mut brackets: Vec<(OdeState, f64)> = Vec::new();
    let mut prev = parity.initial_state();
    let mut last_nonzero = prev;
    let mut last_sign = 1.0;
    scan.propagate_observed(parity.initial_state(), Complex64::new(limit, 0.0), |s| {
        let v = s.y.re;
        if v != 0.0 {
            if v.signum() != last_sign {
                brackets.push((last_nonzero, s.z.re));
                last_sign = v.signum();
            }
            last_nonzero = *s;
        }
        prev = *s;
    })?;

    let mut pos = Vec::with_capacity(brackets.len());
    for (a, b) in brackets {
        pos.push(refine_real_zero(&prop, a, b, tol)?);
    }
    let mut out: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
    out.extend(pos);
    Ok(out)
}

/// Safeguarded Newton on `[a.z, b]` where the solution changes sign.
fn refine_real_zero(prop: &Propagator, a: OdeState, b: f64, tol: f64) -> Result<f64> {
    let sa = a.y.re.signum();
    let (mut lo, mut hi) = (a.z.re, b);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let s = prop.propagate(a, Complex64::new(x, 0.0))?;
        let (y, dy) = (s.y.re, s.dy.re);
        if y == 0.0 {
            return Ok(x);
        }
        if y.signum() == sa {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - y / dy;
        let next = if dy != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 0.01 * tol || hi - lo <= 0.01 * tol {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Winding number of the parity solution around `rect` (counter-clockwise).
///
/// Every contour node is reached by a straight path from the origin, so the
/// error at a node is governed by the solution size along that ray only.
pub fn count_zeros_rect(
    p: &EvenPolynomial,
    lambda: f64,
    parity: Parity,
    rect: Rect,
    cfg: &CensusConfig,
) -> Result<usize> {
    let prop = Propagator::new(p, lambda).with_tol(cfg.ode_tol);
    let diam = rect.diameter();
    let node = |z: Complex64| -> Result<OdeState> {
        let s = prop.propagate(parity.initial_state(), z)?;
        if s.y.norm() <= cfg.floor * s.dy.norm() * diam || s.y.norm() == 0.0 {
            Err(Error::BoundaryZero { z })
        } else {
            Ok(s)
        }
    };
    let corners = rect.corners();
    // Initial spacing resolves the local phase rate √|P − λ|.
    let rate = corners
        .iter()
        .chain([Complex64::new(0.0, 0.0)].iter())
        .map(|&z| prop.coefficient(z).norm().sqrt())
        .fold(0.0, f64::max);
    let longest = (rect.x1 - rect.x0).max(rect.y1 - rect.y0);
    let n0 = ((2.0 * rate * longest).ceil() as usize).max(16);
    let sides: Vec<f64> = (0..4)
        .into_par_iter()
        .map(|side| -> Result<f64> {
            let a = corners[side];
            let b = corners[(side + 1) % 4];
            let nodes = (0..=n0)
                .map(|i| node(a + (b - a) * (i as f64 / n0 as f64)))
                .collect::<Result<Vec<_>>>()?;
            let mut budget = cfg.max_nodes_per_side.saturating_sub(n0 + 1);
            if budget == 0 {
                return Err(Error::RefinementLimit(cfg.max_nodes_per_side));
            }
            let mut total = 0.0;
            for w in nodes.windows(2) {
                total += arg_increment(&node, w[0], w[1], &mut budget, 0, cfg)?;
            }
            Ok(total)
        })
        .collect::<Result<_>>()?;
    let total: f64 = sides.iter().sum();
    let winding = total / (2.0 * PI);
    let rounded = winding.round();
    if (winding - rounded).abs() > 0.25 || rounded < 0.0 {
        return Err(Error::Mismatch(format!(
            "argument increment {total} is not a nonnegative multiple of 2π"
        )));
    }
    Ok(rounded as usize)
}

/// Bisection depth at which a segment is declared unresolvable.
const MAX_DEPTH: usize = 48;

fn arg_increment<F: Fn(Complex64) -> Result<OdeState>>(
    node: &F,
    a: OdeState,
    b: OdeState,
    budget: &mut usize,
    depth: usize,
    cfg: &CensusConfig,
) -> Result<f64> {
    // Difference of arguments avoids overflow in `b.y / a.y`.
    let mut d = b.y.arg() - a.y.arg();
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    if d.abs() < PI / 2.0 {
        return Ok(d);
    }
    if *budget == 0 || depth >= MAX_DEPTH {
        return Err(Error::RefinementLimit(cfg.max_nodes_per_side));
    }
    *budget -= 1;
    let mid = node(0.5 * (a.z + b.z))?;
    Ok(arg_increment(node, a, mid, budget, depth + 1, cfg)?
        + arg_increment(node, mid, b, budget, depth + 1, cfg)?)
}

fn quadrant_rects(b: &CensusBox, inset: f64) -> [Rect; 4] {
    [
        Rect::new(inset, b.x_max, inset, b.y_max),
        Rect::new(-b.x_max, -inset, inset, b.y_max),
        Rect::new(-b.x_max, -inset, -b.y_max, -inset),
        Rect::new(inset, b.x_max, -b.y_max, -inset),
    ]
}

/// Full census of the parity solution at `λ` in `census_box`.
pub fn census(
    p: &EvenPolynomial,
    lambda: f64,
    parity: Parity,
    census_box: CensusBox,
    cfg: &CensusConfig,
) -> Result<ZeroCensus> {
    let mut last_err = None;
    for attempt in 0..=cfg.jitter_retries {
        let b = census_box.scaled(1.0 + cfg.jitter_rel * attempt as f64);
        match census_once(p, lambda, parity, b, cfg) {
            Ok(c) => return Ok(c),
            Err(e @ Error::BoundaryZero { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

fn census_once(
    p: &EvenPolynomial,
    lambda: f64,
    parity: Parity,
    b: CensusBox,
    cfg: &CensusConfig,
) -> Result<ZeroCensus> {
    let (axis, rects) = rayon::join(
        || -> Result<(Vec<f64>, Vec<f64>)> {
            let mut real =
                axis_zeros_with(p, lambda, parity, b.x_max, cfg.tol, Axis::Real, cfg.ode_tol)?;
            if parity == Parity::Odd {
                let at = real.partition_point(|&x| x < 0.0);
                real.insert(at, 0.0);
            }
            let imag =
                axis_zeros_with(p, lambda, parity, b.y_max, cfg.tol, Axis::Imaginary, cfg.ode_tol)?;
            Ok((real, imag))
        },
        || -> Result<Vec<usize>> {
            let mut jobs: Vec<Rect> = quadrant_rects(&b, 10.0 * cfg.tol).to_vec();
            jobs.push(b.rect());
            jobs.par_iter()
                .map(|r| count_zeros_rect(p, lambda, parity, *r, cfg))
                .collect()
        },
    );
    let (real_zeros, imaginary_zeros) = axis?;
    let counts = rects?;
    let quadrant_counts = [counts[0], counts[1], counts[2], counts[3]];
    let offaxis_count = quadrant_counts.iter().sum();
    let quadrant_zeros = if quadrant_counts[0] > 0 {
        let q1 = quadrant_rects(&b, 10.0 * cfg.tol)[0];
        let mut found = locate_zeros(p, lambda, parity, q1, quadrant_counts[0], cfg)?;
        let mirrored: Vec<Complex64> = found
            .iter()
            .flat_map(|z| [z.conj(), -*z, -z.conj()])
            .collect();
        found.extend(mirrored);
        found
    } else {
        Vec::new()
    };
    Ok(ZeroCensus {
        real_zeros,
        imaginary_zeros,
        offaxis_count,
        quadrant_counts,
        quadrant_zeros,
        total_count: counts[4],
        census_box: b,
        lambda,
        parity,
        k: None,
    })
}

/// Locates the `expected` zeros inside `rect` by recursive quartering and
/// Newton polishing.
pub fn locate_zeros(
    p: &EvenPolynomial,
    lambda: f64,
    parity: Parity,
    rect: Rect,
    expected: usize,
    cfg: &CensusConfig,
) -> Result<Vec<Complex64>> {
    let prop = Propagator::new(p, lambda).with_tol(cfg.ode_tol);
    let mut out = Vec::new();
    let mut stack = vec![(rect, expected)];
    while let Some((r, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        if n == 1 && r.diameter() < 0.05 || r.diameter() < cfg.tol {
            let mut z = Complex64::new(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1));
            for _ in 0..60 {
                let s = prop.propagate_path(parity.initial_state(), &[z])?;
                let step = s.y / s.dy;
                z -= step;
                if step.norm() < 0.01 * cfg.tol {
                    break;
                }
            }
            if !r.contains(z) && n == 1 {
                // Newton left the cell; keep the cell centre.
                z = Complex64::new(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1));
            }
            out.push(z);
            continue;
        }
        let xm = 0.5 * (r.x0 + r.x1);
        let ym = 0.5 * (r.y0 + r.y1);
        let parts = [
            Rect::new(r.x0, xm, r.y0, ym),
            Rect::new(xm, r.x1, r.y0, ym),
            Rect::new(xm, r.x1, ym, r.y1),
            Rect::new(r.x0, xm, ym, r.y1),
        ];
        let mut assigned = 0;
        for (i, part) in parts.iter().enumerate() {
            let mut sub = *part;
            let mut count = None;
            for attempt in 0..=cfg.jitter_retries {
                let shift = cfg.jitter_rel * attempt as f64 * (r.x1 - r.x0);
                sub = Rect { x1: part.x1 + if i % 3 == 0 { shift } else { 0.0 }, ..*part };
                match count_zeros_rect(p, lambda, parity, sub, cfg) {
                    Ok(c) => {
                        count = Some(c);
                        break;
                    }
                    Err(Error::BoundaryZero { .. }) => continue,
                    Err(e) => return Err(e),
                }
            }
            let c = count.ok_or(Error::BoundaryZero {
                z: Complex64::new(sub.x1, sub.y1),
            })?;
            assigned += c;
            stack.push((sub, c));
        }
        if assigned != n {
            return Err(Error::Mismatch(format!(
                "subdivision found {assigned} zeros, expected {n}"
            )));
        }
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// True iff no zeros were found off the two axes.
pub fn verify_axis_confinement(c: &ZeroCensus) -> bool {
    c.offaxis_count == 0
}
