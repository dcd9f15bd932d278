//! Matrix polynomials in one variable and scalar polynomials in two.
//!
//! Determinants of matrix polynomials are never expanded symbolically here or
//! anywhere downstream: everything goes through evaluation at roots-of-unity
//! nodes followed by Lagrange interpolation back to coefficients.

use std::collections::BTreeMap;

use crate::{CMatrix, Error, Result, C64};

/// Relative magnitude below which bivariate coefficients are dropped.
pub const CHOP_RTOL: f64 = 1e-12;

/// X(z) = sum coeffs[i] z^i with equally shaped coefficient matrices.
#[derive(Debug, Clone)]
pub struct PolyMatrix {
    coeffs: Vec<CMatrix>,
}

impl PolyMatrix {
    pub fn new(coeffs: Vec<CMatrix>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::DimensionMismatch {
                op: "PolyMatrix::new",
                details: "need at least one coefficient".into(),
            });
        }
        let shape = coeffs[0].shape();
        if coeffs.iter().any(|c| c.shape() != shape) {
            return Err(Error::DimensionMismatch {
                op: "PolyMatrix::new",
                details: "coefficient matrices differ in shape".into(),
            });
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn shape(&self) -> (usize, usize) {
        self.coeffs[0].shape()
    }

    pub fn coeff(&self, i: usize) -> &CMatrix {
        &self.coeffs[i]
    }

    pub fn leading(&self) -> &CMatrix {
        self.coeffs.last().expect("nonempty by construction")
    }

    /// Horner evaluation at z.
    pub fn eval(&self, z: C64) -> CMatrix {
        let mut acc = self.leading().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * z + c;
        }
        acc
    }

    /// Coefficient-level product; degrees add.
    pub fn mul(&self, rhs: &PolyMatrix) -> Result<PolyMatrix> {
        let (_, k) = self.shape();
        let (rk, _) = rhs.shape();
        if k != rk {
            return Err(Error::DimensionMismatch {
                op: "PolyMatrix::mul",
                details: format!("{:?} * {:?}", self.shape(), rhs.shape()),
            });
        }
        let d = self.degree() + rhs.degree();
        let (rows, _) = self.shape();
        let (_, cols) = rhs.shape();
        let mut out = vec![CMatrix::zeros(rows, cols); d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyMatrix::new(out)
    }

    pub fn add(&self, rhs: &PolyMatrix) -> Result<PolyMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch {
                op: "PolyMatrix::add",
                details: format!("{:?} + {:?}", self.shape(), rhs.shape()),
            });
        }
        let d = self.degree().max(rhs.degree());
        let (rows, cols) = self.shape();
        let mut out = vec![CMatrix::zeros(rows, cols); d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in rhs.coeffs.iter().enumerate() {
            out[i] += b;
        }
        PolyMatrix::new(out)
    }
}

/// Raw coefficient map of a bivariate polynomial, keyed (zeta power, lambda power).
pub(crate) type RawBivariate = BTreeMap<(usize, usize), C64>;

/// sum a_ij zeta^i lambda^j with small coefficients chopped away.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly {
    coeffs: RawBivariate,
    deg_zeta: usize,
    deg_lambda: usize,
}

impl BivariatePoly {
    /// Builds from raw coefficients, dropping |a| <= CHOP_RTOL * max |a|.
    pub fn from_raw(raw: RawBivariate) -> Self {
        let maxmag = raw.values().map(|z| z.norm()).fold(0.0, f64::max);
        let coeffs: RawBivariate = raw
            .into_iter()
            .filter(|(_, z)| z.norm() > CHOP_RTOL * maxmag && z.norm() > 0.0)
            .collect();
        let deg_zeta = coeffs.keys().map(|&(i, _)| i).max().unwrap_or(0);
        let deg_lambda = coeffs.keys().map(|&(_, j)| j).max().unwrap_or(0);
        Self {
            coeffs,
            deg_zeta,
            deg_lambda,
        }
    }

    pub fn deg_zeta(&self) -> usize {
        self.deg_zeta
    }

    pub fn deg_lambda(&self) -> usize {
        self.deg_lambda
    }

    pub fn coeff(&self, zeta_pow: usize, lambda_pow: usize) -> C64 {
        self.coeffs
            .get(&(zeta_pow, lambda_pow))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &C64)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, zeta: C64, lambda: C64) -> C64 {
        self.coeffs
            .iter()
            .map(|(&(i, j), &a)| a * zeta.powu(i as u32) * lambda.powu(j as u32))
            .sum()
    }

    /// Largest p such that lambda^p divides the (chopped) polynomial.
    pub fn lambda_divisibility(&self) -> usize {
        self.coeffs.keys().map(|&(_, j)| j).min().unwrap_or(0)
    }
}

/// n-th roots of unity, the default interpolation grid.
pub fn zeta_nodes(count: usize) -> Vec<C64> {
    (0..count)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
            C64::new(theta.cos(), theta.sin())
        })
        .collect()
}

fn poly_from_roots(roots: &[C64]) -> Vec<C64> {
    let mut acc = vec![C64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![C64::new(0.0, 0.0); acc.len() + 1];
        for (i, &c) in acc.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * r;
        }
        acc = next;
    }
    acc
}

/// Synthetic division of `p` (ascending) by the monic linear factor (z - r).
/// Assumes the division is exact, which holds when r is a root of p.
fn synthetic_div(p: &[C64], r: C64) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); p.len() - 1];
    let mut carry = C64::new(0.0, 0.0);
    for i in (0..p.len() - 1).rev() {
        carry = p[i + 1] + carry * r;
        out[i] = carry;
    }
    out
}

fn eval_scalar(p: &[C64], z: C64) -> C64 {
    p.iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Lagrange interpolation through (nodes, values), returned as ascending
/// monomial coefficients of degree nodes.len() - 1.
pub(crate) fn lagrange_coeffs(nodes: &[C64], values: &[C64]) -> Vec<C64> {
    debug_assert_eq!(nodes.len(), values.len());
    let master = poly_from_roots(nodes);
    let mut acc = vec![C64::new(0.0, 0.0); nodes.len()];
    for (&zi, &fi) in nodes.iter().zip(values) {
        let qi = synthetic_div(&master, zi);
        let denom = eval_scalar(&qi, zi);
        let scale = fi / denom;
        for (a, &q) in acc.iter_mut().zip(&qi) {
            *a += scale * q;
        }
    }
    acc
}

fn check_nodes(samples: &[(C64, Vec<C64>)], deg_zeta: usize) -> Result<()> {
    if samples.len() < deg_zeta + 1 {
        return Err(Error::NotEnoughNodes {
            got: samples.len(),
            need: deg_zeta + 1,
        });
    }
    let scale = samples.iter().map(|(z, _)| z.norm()).fold(1.0, f64::max);
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            if (samples[i].0 - samples[j].0).norm() <= 1e-12 * scale {
                return Err(Error::DuplicateNode {
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(())
}

/// Per-lambda-power Lagrange interpolation in zeta, without chopping.
pub(crate) fn interpolate_raw(
    samples: &[(C64, Vec<C64>)],
    deg_zeta: usize,
) -> Result<RawBivariate> {
    check_nodes(samples, deg_zeta)?;
    let lambda_len = samples[0].1.len();
    if samples.iter().any(|(_, v)| v.len() != lambda_len) {
        return Err(Error::DimensionMismatch {
            op: "interpolate_bivariate",
            details: "lambda-coefficient sequences differ in length".into(),
        });
    }
    let nodes: Vec<C64> = samples.iter().map(|(z, _)| *z).collect();
    let mut raw = RawBivariate::new();
    for j in 0..lambda_len {
        let values: Vec<C64> = samples.iter().map(|(_, v)| v[j]).collect();
        for (i, c) in lagrange_coeffs(&nodes, &values).into_iter().enumerate() {
            if c.norm() > 0.0 {
                raw.insert((i, j), c);
            }
        }
    }
    Ok(raw)
}

/// Assembles a bivariate polynomial from per-node lambda-coefficient
/// sequences; requires at least `deg_zeta + 1` distinct nodes.
pub fn interpolate_bivariate(
    samples: &[(C64, Vec<C64>)],
    deg_zeta: usize,
) -> Result<BivariatePoly> {
    Ok(BivariatePoly::from_raw(interpolate_raw(samples, deg_zeta)?))
}

/// All roots with multiplicity, via companion-matrix eigenvalues.
/// Leading coefficients at or below 1e-12 of the largest magnitude are chopped.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let maxmag = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if maxmag == 0.0 {
        return Err(Error::DegeneratePolynomial);
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= 1e-12 * maxmag {
        deg -= 1;
    }
    if deg == 0 {
        // nonzero constant: no roots
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let mut companion = CMatrix::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -coeffs[i] / lead;
    }
    super::eigenvalues(&companion)
}
