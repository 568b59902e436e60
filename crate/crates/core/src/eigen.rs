//! Spectral oracles: a cyclic Jacobi eigensolver for symmetric matrices, and
//! characteristic polynomial plus root finding for small general matrices.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::cellmat::{PositiveVector, Spectrum, DEFAULT_SPECTRUM_TOL};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_JACOBI_TOL: f64 = 1e-12;
pub const MAX_JACOBI_SWEEPS: usize = 50;
/// Largest order accepted by [`char_poly`].
pub const MAX_CHAR_POLY_ORDER: usize = 32;
pub const MAX_ROOT_ITERATIONS: usize = 500;
/// Scaled residual accepted by [`poly_roots`] when called internally.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
/// Relative imaginary part above which a root counts as complex.
pub const DEFAULT_COMPLEX_TOL: f64 = 1e-8;

const SYMMETRY_TOL: f64 = 1e-12;
const START_ANGLE: f64 = 0.4;
const POLISH_SWEEPS: usize = 5;

/// Real polynomial with coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coefficients: Vec<f64>,
}

impl Polynomial {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coefficients: Vec<f64>) -> Self {
        while coefficients.len() > 1 && coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(0.0);
        }
        Polynomial { coefficients }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coefficients[self.degree()]
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `sum |c_i| |z|^i`, the natural scale for the rounding error of
    /// evaluating the polynomial at `z`.
    pub fn magnitude_at(&self, r: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * r + c.abs())
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (power, &c) in self.coefficients.iter().enumerate().rev() {
            if c == 0.0 && !(first && power == 0) {
                continue;
            }
            let magnitude = c.abs();
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = magnitude != 1.0 || power == 0;
            if show_coeff {
                write!(f, "{magnitude}")?;
            }
            match power {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{power}")?,
            }
        }
        Ok(())
    }
}

/// Pairwise sums of a 3-entry generating vector: `alpha = a1 + a2`,
/// `beta = a1 + a3`, `gamma = a2 + a3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSums {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl PairSums {
    pub fn from_vector(a: &PositiveVector) -> Result<Self> {
        match *a.entries() {
            [a1, a2, a3] => Ok(PairSums {
                alpha: a1 + a2,
                beta: a1 + a3,
                gamma: a2 + a3,
            }),
            _ => Err(Error::DimensionMismatch {
                expected: 3,
                found: a.len(),
            }),
        }
    }

    /// Closed form of `det(xI - D(a))` for a 3x3 cell matrix:
    /// `x^3 - (alpha^2 + beta^2 + gamma^2) x - 2 alpha beta gamma`.
    pub fn char_poly(&self) -> Polynomial {
        let PairSums { alpha, beta, gamma } = *self;
        Polynomial::new(vec![
            -2.0 * alpha * beta * gamma,
            -(alpha * alpha + beta * beta + gamma * gamma),
            0.0,
            1.0,
        ])
    }
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm is at most
/// `tol * ||M||_F`. Eigenvalues come back in descending order.
pub fn eig_symmetric(m: &Matrix, tol: f64) -> Result<Spectrum> {
    let n = m.order()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidTolerance(tol));
    }
    if let Some((i, j)) = m.first_asymmetry(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric { i, j });
    }
    let mut a = m.clone();
    let target = tol * m.frobenius_norm();

    let mut converged = false;
    for _ in 0..=MAX_JACOBI_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            method: "Jacobi eigensolver",
            iterations: MAX_JACOBI_SWEEPS,
        });
    }
    let values = (0..n).map(|i| a[(i, i)]).collect();
    Ok(Spectrum::with_tolerance(values, DEFAULT_SPECTRUM_TOL))
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Applies the plane rotation that annihilates `a[p][q]`.
fn rotate(a: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.nrows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
}

/// Monic characteristic polynomial `det(xI - M)` by the Faddeev-LeVerrier
/// trace recursion.
///
/// The recursion runs in double-double arithmetic: the low-order
/// coefficients are sums of large terms that cancel, and plain `f64`
/// loses most of their digits by order ten.
pub fn char_poly(m: &Matrix) -> Result<Polynomial> {
    let n = m.order()?;
    if n > MAX_CHAR_POLY_ORDER {
        return Err(Error::OrderTooLarge {
            order: n,
            max: MAX_CHAR_POLY_ORDER,
        });
    }
    let a: Vec<TwoFloat> = m.as_slice().iter().map(|&v| TwoFloat::from(v)).collect();
    let mut coeffs = vec![TwoFloat::from(0.0); n + 1];
    coeffs[n] = TwoFloat::from(1.0);
    let mut aux = vec![TwoFloat::from(0.0); n * n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I, then c_{n-k} = -tr(A M_k) / k
        aux = mul_dd(&a, &aux, n);
        for i in 0..n {
            aux[i * n + i] += coeffs[n - k + 1];
        }
        let mut trace = TwoFloat::from(0.0);
        for i in 0..n {
            for j in 0..n {
                trace += a[i * n + j] * aux[j * n + i];
            }
        }
        coeffs[n - k] = -trace / k as f64;
    }
    Ok(Polynomial::new(coeffs.into_iter().map(f64::from).collect()))
}

fn mul_dd(a: &[TwoFloat], b: &[TwoFloat], n: usize) -> Vec<TwoFloat> {
    let mut out = vec![TwoFloat::from(0.0); n * n];
    for i in 0..n {
        for l in 0..n {
            let ail = a[i * n + l];
            for j in 0..n {
                out[i * n + j] += ail * b[l * n + j];
            }
        }
    }
    out
}

/// All complex roots of a monic polynomial.
///
/// Degrees 1 and 2 use closed forms. Higher degrees use Durand-Kerner
/// iteration on the polynomial rescaled so that `|c_i| <= 1`, starting from
/// points on the circle of radius `1 + max |c_i|`, iterating
/// until every root satisfies `|p(r)| <= tol * sum |c_i| |r|^i`.
pub fn poly_roots(p: &Polynomial, tol: f64) -> Result<Vec<Complex64>> {
    if p.degree() == 0 || !p.is_monic() {
        return Err(Error::InvalidPolynomial);
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidTolerance(tol));
    }
    let c = p.coefficients();
    match p.degree() {
        1 => Ok(vec![Complex64::new(-c[0], 0.0)]),
        2 => Ok(quadratic_roots(c[1], c[0]).to_vec()),
        _ => durand_kerner(p, tol),
    }
}

/// Roots of `x^2 + b x + c`, avoiding cancellation in the smaller root.
fn quadratic_roots(b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        if q == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(q, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn durand_kerner(p: &Polynomial, tol: f64) -> Result<Vec<Complex64>> {
    // Substituting x = s y with s a power of two is exact and leaves the
    // scaled residual test unchanged; it brings every |c_i| to at most 1.
    let n = p.degree();
    let s = root_scale(p);
    let scaled = Polynomial::new(
        p.coefficients()
            .iter()
            .enumerate()
            .map(|(i, c)| c / s.powi((n - i) as i32))
            .collect(),
    );
    let roots = durand_kerner_unscaled(&scaled, tol)?;
    Ok(roots.into_iter().map(|y| y * s).collect())
}

/// Smallest power of two `s` with `|c_i| <= s^(n-i)` for every `i < n`.
fn root_scale(p: &Polynomial) -> f64 {
    let n = p.degree();
    let bound = p.coefficients()[..n]
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| c.abs().powf(1.0 / (n - i) as f64))
        .fold(0.0f64, f64::max);
    if bound == 0.0 {
        return 1.0;
    }
    let mut s = 2f64.powi(bound.log2().ceil() as i32);
    while p.coefficients()[..n].iter().enumerate().any(|(i, c)| c.abs() > s.powi((n - i) as i32)) {
        s *= 2.0;
    }
    s
}

fn durand_kerner_unscaled(p: &Polynomial, tol: f64) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let c = p.coefficients();
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64 + START_ANGLE))
        .collect();

    let accepted = |z: &Complex64| p.eval_complex(*z).norm() <= tol * p.magnitude_at(z.norm());
    let mut polish_left = POLISH_SWEEPS;
    for _ in 0..MAX_ROOT_ITERATIONS {
        let mut largest_step = 0.0f64;
        for j in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for k in 0..n {
                if k != j {
                    denom *= z[j] - z[k];
                }
            }
            if denom.norm() == 0.0 {
                // Coincident iterates; nudge apart.
                z[j] += Complex64::new(0.0, f64::EPSILON.sqrt() * radius);
                continue;
            }
            let step = p.eval_complex(z[j]) / denom;
            z[j] -= step;
            largest_step = largest_step.max(step.norm() / z[j].norm().max(1.0));
        }
        if z.iter().all(accepted) {
            if largest_step <= 4.0 * f64::EPSILON || polish_left == 0 {
                return Ok(z);
            }
            polish_left -= 1;
        }
    }
    if z.iter().all(accepted) {
        return Ok(z);
    }
    Err(Error::NoConvergence {
        method: "Durand-Kerner root finder",
        iterations: MAX_ROOT_ITERATIONS,
    })
}

/// Eigenvalues of a small general matrix whose spectrum is expected to be
/// real: characteristic polynomial, then roots. Fails with `ComplexRoot` when
/// some root has `|Im| > tol * max(1, |root|)`.
pub fn eig_small_general(m: &Matrix, tol: f64) -> Result<Spectrum> {
    let p = char_poly(m)?;
    let roots = poly_roots(&p, DEFAULT_ROOT_TOL)?;
    if let Some(r) = roots.iter().find(|r| r.im.abs() > tol * r.norm().max(1.0)) {
        return Err(Error::ComplexRoot { re: r.re, im: r.im });
    }
    Ok(Spectrum::with_tolerance(
        roots.iter().map(|r| r.re).collect(),
        DEFAULT_SPECTRUM_TOL,
    ))
}
