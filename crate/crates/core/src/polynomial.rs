//! Even real potentials, the quasi-exactly-solvable sextic family and the
//! Stokes geometry of a degree-`d` potential.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real even polynomial `P(z) = Σ c_j z^{2j}` with positive leading
/// coefficient. Odd powers cannot be represented.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenPolynomial {
    even_coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct EvenPolynomialRepr {
    even_coeffs: Vec<f64>,
    degree: usize,
}

impl EvenPolynomial {
    /// Builds `Σ even_coeffs[j] z^{2j}`. Trailing zeros are trimmed; the
    /// remaining leading coefficient must be positive and the degree at
    /// least 2.
    pub fn new(mut even_coeffs: Vec<f64>) -> Result<Self> {
        if even_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPotential("non-finite coefficient".into()));
        }
        while even_coeffs.len() > 1 && *even_coeffs.last().unwrap() == 0.0 {
            even_coeffs.pop();
        }
        if even_coeffs.len() < 2 {
            return Err(Error::InvalidPotential(
                "degree must be at least 2".into(),
            ));
        }
        if *even_coeffs.last().unwrap() <= 0.0 {
            return Err(Error::InvalidPotential(
                "leading coefficient must be positive".into(),
            ));
        }
        Ok(Self { even_coeffs })
    }

    /// `z^d` for even `d ≥ 2`.
    pub fn monomial(d: usize) -> Result<Self> {
        if d < 2 || d % 2 == 1 {
            return Err(Error::InvalidDegree(d as i64));
        }
        let mut c = vec![0.0; d / 2 + 1];
        c[d / 2] = 1.0;
        Self::new(c)
    }

    pub fn even_coeffs(&self) -> &[f64] {
        &self.even_coeffs
    }

    pub fn degree(&self) -> usize {
        2 * (self.even_coeffs.len() - 1)
    }

    pub fn leading(&self) -> f64 {
        *self.even_coeffs.last().unwrap()
    }

    /// Horner evaluation in `w = z²`. Since `(−z)² = z²` and
    /// `conj(z)² = conj(z²)` are exact in floating point, the symmetries
    /// `P(−z) = P(z)` and `P(z̄) = conj P(z)` hold bit for bit.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        eval_even(&self.even_coeffs, z * z)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        let w = x * x;
        self.even_coeffs.iter().rev().fold(0.0, |acc, &c| acc * w + c)
    }

    /// Dense coefficients `p_0..p_d` of `P` in powers of `z`.
    pub fn dense_coeffs(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.degree() + 1];
        for (j, &c) in self.even_coeffs.iter().enumerate() {
            out[2 * j] = c;
        }
        out
    }

    /// Minimum of `P` over the real line, located by sampling and golden
    /// section refinement in `w = x²`.
    pub fn real_minimum(&self) -> f64 {
        // P(x) → ∞, so the minimiser lies where P(x) ≤ P(0).
        let mut hi = 1.0;
        while self.eval_real(hi) <= self.eval_real(0.0).max(0.0) + 1.0 {
            hi *= 2.0;
        }
        let n = 2000;
        let mut best = (0.0_f64, self.eval_real(0.0));
        for i in 1..=n {
            let x = hi * i as f64 / n as f64;
            let v = self.eval_real(x);
            if v < best.1 {
                best = (x, v);
            }
        }
        let h = hi / n as f64;
        let (mut a, mut b) = ((best.0 - h).max(0.0), best.0 + h);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if self.eval_real(c) < self.eval_real(d) {
                b = d;
            } else {
                a = c;
            }
        }
        self.eval_real(0.5 * (a + b)).min(best.1)
    }
}

pub(crate) fn eval_even(coeffs: &[f64], w: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
}

impl Serialize for EvenPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EvenPolynomialRepr {
            even_coeffs: self.even_coeffs.clone(),
            degree: self.degree(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EvenPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = EvenPolynomialRepr::deserialize(d)?;
        let p = EvenPolynomial::new(repr.even_coeffs).map_err(serde::de::Error::custom)?;
        if p.degree() != repr.degree {
            return Err(serde::de::Error::custom(format!(
                "degree {} does not match coefficients (degree {})",
                repr.degree,
                p.degree()
            )));
        }
        Ok(p)
    }
}

impl fmt::Display for EvenPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, &c) in self.even_coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let pow = 2 * j;
            let (sign, mag) = if c < 0.0 { ("-", -c) } else { ("+", c) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{sign}")?;
            }
            first = false;
            match (pow, mag == 1.0) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "z^{pow}")?,
                (_, false) => write!(f, "{mag}z^{pow}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Parses shorthand such as `z^6-7z^2`, `z^4+z^2+1`, `2*z^4 - 0.5 z^2`
/// or a bare coefficient list `[c0, c1, ...]` of even coefficients.
pub fn parse_potential(text: &str) -> Result<EvenPolynomial> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.starts_with('[') {
        let coeffs: Vec<f64> = serde_json::from_str(&s)
            .map_err(|e| Error::Parse(format!("coefficient list: {e}")))?;
        return EvenPolynomial::new(coeffs);
    }
    if s.is_empty() {
        return Err(Error::Parse("empty potential".into()));
    }
    let mut terms: Vec<(f64, usize)> = Vec::new();
    let bytes = s.as_bytes();
    let mut start = 0;
    for i in 1..=bytes.len() {
        if i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'^')
        {
            terms.push(parse_term(&s[start..i])?);
            start = i;
        }
    }
    let max_pow = terms.iter().map(|t| t.1).max().unwrap_or(0);
    let mut even = vec![0.0; max_pow / 2 + 1];
    for (c, pow) in terms {
        if pow % 2 == 1 {
            return Err(Error::Parse(format!("odd power z^{pow} is not allowed")));
        }
        even[pow / 2] += c;
    }
    EvenPolynomial::new(even)
}

fn parse_term(t: &str) -> Result<(f64, usize)> {
    let (sign, body) = match t.as_bytes().first() {
        Some(b'+') => (1.0, &t[1..]),
        Some(b'-') => (-1.0, &t[1..]),
        _ => (1.0, t),
    };
    let bad = || Error::Parse(format!("cannot parse term '{t}'"));
    match body.find('z') {
        None => {
            let c: f64 = body.parse().map_err(|_| bad())?;
            Ok((sign * c, 0))
        }
        Some(pos) => {
            let coef = body[..pos].trim_end_matches('*');
            let c = if coef.is_empty() {
                1.0
            } else {
                coef.parse::<f64>().map_err(|_| bad())?
            };
            let rest = &body[pos + 1..];
            let pow = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^')
                    .ok_or_else(bad)?
                    .parse::<usize>()
                    .map_err(|_| bad())?
            };
            Ok((sign * c, pow))
        }
    }
}

/// The sextic `z⁶ + 2b z⁴ + (b² − 4m − 2p − 3) z²`.
pub fn qes_potential(m: u32, p: u32, b: f64) -> Result<EvenPolynomial> {
    if p > 1 {
        return Err(Error::InvalidParity(p));
    }
    let c2 = b * b - 4.0 * m as f64 - 2.0 * p as f64 - 3.0;
    EvenPolynomial::new(vec![0.0, c2, 2.0 * b, 1.0])
}

/// An angle `num/den · π`, kept exact so axis membership is decidable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiFraction {
    pub num: i64,
    pub den: i64,
}

impl PiFraction {
    /// Reduced to `[0, 2π)` with a positive denominator in lowest terms.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0);
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        num = num.rem_euclid(2 * den);
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        if g > 1 {
            num /= g;
            den /= g;
        }
        Self { num, den }
    }

    pub fn radians(self) -> f64 {
        PI * self.num as f64 / self.den as f64
    }

    /// True when the angle is a multiple of π/2.
    pub fn on_axis(self) -> bool {
        (2 * self.num) % self.den == 0
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Stokes rays `ρ_j` at angle `π(2j−1)/(d+2)` and the bisectors `2πj/(d+2)`
/// of the sectors `S_j` between `ρ_j` and `ρ_{j+1}`, `j = 0..d+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StokesGeometry {
    pub degree: usize,
    pub rays: Vec<PiFraction>,
    pub bisectors: Vec<PiFraction>,
}

impl StokesGeometry {
    pub fn sectors(&self) -> usize {
        self.degree + 2
    }

    pub fn ray_angles(&self) -> Vec<f64> {
        self.rays.iter().map(|a| a.radians()).collect()
    }

    pub fn sector_bisectors(&self) -> Vec<f64> {
        self.bisectors.iter().map(|a| a.radians()).collect()
    }

    /// Index of the sector whose bisector is `θ`, if any.
    pub fn sector_of_bisector(&self, theta: PiFraction) -> Option<usize> {
        self.bisectors.iter().position(|&b| b == theta)
    }
}

pub fn stokes(d: usize) -> Result<StokesGeometry> {
    if d < 2 || d % 2 == 1 {
        return Err(Error::InvalidDegree(d as i64));
    }
    let n = d as i64 + 2;
    let rays = (0..n).map(|j| PiFraction::new(2 * j - 1, n)).collect();
    let bisectors = (0..n).map(|j| PiFraction::new(2 * j, n)).collect();
    Ok(StokesGeometry {
        degree: d,
        rays,
        bisectors,
    })
}
