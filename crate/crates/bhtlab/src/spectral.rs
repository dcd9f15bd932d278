//! Lax-pair data, spectral curves of matrix pencils, the double-cover
//! relation between them, and regularity / ramification checks.
//!
//! Determinants of matrix polynomials are computed by evaluation at
//! roots-of-unity nodes followed by interpolation back to coefficients;
//! nothing is expanded symbolically, and residuals are reported from the raw
//! interpolation output while yes/no flags use the chopped polynomial.

use crate::flows::{holo_rhs, reality_embed, BHTState, HoloState};
use crate::matkit::{
    self, char_poly, commutator, interpolate_raw, kernel_basis, lagrange_coeffs,
    least_squares_solve, poly_roots, zeta_nodes, BivariatePoly, PolyMatrix, RawBivariate,
};
use crate::{CMatrix, Error, Result, C64};

/// The polynomial Lax data of a holomorphic state:
/// X = A0 + A1 z, Y = B0 + B1 z, Z = XY, W = YX, and the degree-one
/// companions Z# = (A0 B1 + A1 B0)/2 + A1 B1 z, W# with the factors swapped.
#[derive(Debug, Clone)]
pub struct LaxData {
    pub x: PolyMatrix,
    pub y: PolyMatrix,
    pub z: PolyMatrix,
    pub w: PolyMatrix,
    pub z_sharp: PolyMatrix,
    pub w_sharp: PolyMatrix,
}

pub fn build_lax(h: &HoloState) -> LaxData {
    let half = C64::new(0.5, 0.0);
    let x = PolyMatrix::new(vec![h.a0.clone(), h.a1.clone()]).expect("equal shapes");
    let y = PolyMatrix::new(vec![h.b0.clone(), h.b1.clone()]).expect("equal shapes");
    let z = x.mul(&y).expect("conformable");
    let w = y.mul(&x).expect("conformable");
    let z_sharp = PolyMatrix::new(vec![(&h.a0 * &h.b1 + &h.a1 * &h.b0) * half, &h.a1 * &h.b1])
        .expect("equal shapes");
    let w_sharp = PolyMatrix::new(vec![(&h.b0 * &h.a1 + &h.b1 * &h.a0) * half, &h.b1 * &h.a1])
        .expect("equal shapes");
    LaxData {
        x,
        y,
        z,
        w,
        z_sharp,
        w_sharp,
    }
}

/// The unique N with U = XN and V = NY, for X, Y of full column/row rank m.
///
/// N is recovered by least squares against X and verified against Y; a
/// violated compatibility relation UY = XV or a bad verification residual is
/// reported as inconsistency.
pub fn solve_n(x: &CMatrix, y: &CMatrix, u: &CMatrix, v: &CMatrix) -> Result<CMatrix> {
    let (n, m) = x.shape();
    if y.shape() != (m, n) || u.shape() != (n, m) || v.shape() != (m, n) {
        return Err(Error::DimensionMismatch {
            op: "solve_n",
            details: format!(
                "X {:?}, Y {:?}, U {:?}, V {:?}",
                x.shape(),
                y.shape(),
                u.shape(),
                v.shape()
            ),
        });
    }
    let rank_y = matkit::rank(y, matkit::RANK_RTOL)?;
    if rank_y < m {
        return Err(Error::RankDeficient {
            rank: rank_y,
            expected: m,
        });
    }
    let uy = u * y;
    let xv = x * v;
    let compat = (&uy - &xv).norm() / (1.0 + uy.norm() + xv.norm());
    if compat > 1e-10 {
        return Err(Error::Inconsistent {
            residual: compat,
            tol: 1e-10,
        });
    }
    let n_mat = least_squares_solve(x, u)?;
    let check = (&n_mat * y - v).norm() / (1.0 + v.norm());
    if check > 1e-9 {
        return Err(Error::Inconsistent {
            residual: check,
            tol: 1e-9,
        });
    }
    Ok(n_mat)
}

/// Max-over-nodes defects of Zdot = [Z#, Z] and Wdot = [W#, W] along the
/// holomorphic flow, with Zdot, Wdot formed by the product rule.
pub fn lax_residual(h: &HoloState) -> (f64, f64) {
    let lax = build_lax(h);
    let tangent = holo_rhs(h);
    let xdot = PolyMatrix::new(vec![tangent.a0.clone(), tangent.a1.clone()]).expect("shapes");
    let ydot = PolyMatrix::new(vec![tangent.b0.clone(), tangent.b1.clone()]).expect("shapes");
    let zdot = xdot
        .mul(&lax.y)
        .expect("conformable")
        .add(&lax.x.mul(&ydot).expect("conformable"))
        .expect("same shape");
    let wdot = ydot
        .mul(&lax.x)
        .expect("conformable")
        .add(&lax.y.mul(&xdot).expect("conformable"))
        .expect("same shape");
    let mut worst_z: f64 = 0.0;
    let mut worst_w: f64 = 0.0;
    for node in zeta_nodes(5) {
        let bz = commutator(&lax.z_sharp.eval(node), &lax.z.eval(node)).expect("square");
        let bw = commutator(&lax.w_sharp.eval(node), &lax.w.eval(node)).expect("square");
        worst_z = worst_z.max((zdot.eval(node) - bz).norm());
        worst_w = worst_w.max((wdot.eval(node) - bw).norm());
    }
    (worst_z, worst_w)
}

fn char_poly_samples(x: &PolyMatrix) -> Result<Vec<(C64, Vec<C64>)>> {
    let (rows, cols) = x.shape();
    if rows != cols {
        return Err(Error::DimensionMismatch {
            op: "char_poly_polymatrix",
            details: format!("{rows}x{cols} is not square"),
        });
    }
    let node_count = rows * x.degree() + 1;
    zeta_nodes(node_count)
        .into_iter()
        .map(|z| Ok((z, char_poly(&x.eval(z))?)))
        .collect()
}

/// det(lambda - X(z)) for a square matrix polynomial of any degree,
/// assembled through evaluation and interpolation.
pub fn char_poly_polymatrix(x: &PolyMatrix) -> Result<BivariatePoly> {
    let samples = char_poly_samples(x)?;
    let deg = x.shape().0 * x.degree();
    matkit::interpolate_bivariate(&samples, deg)
}

pub(crate) fn char_poly_polymatrix_raw(x: &PolyMatrix) -> Result<RawBivariate> {
    let samples = char_poly_samples(x)?;
    let deg = x.shape().0 * x.degree();
    interpolate_raw(&samples, deg)
}

/// det(lambda - C0 - C1 z) for a degree-one pencil.
pub fn char_poly_pencil(c0: &CMatrix, c1: &CMatrix) -> Result<BivariatePoly> {
    char_poly_polymatrix(&PolyMatrix::new(vec![c0.clone(), c1.clone()])?)
}

/// The block pencil (C0, C1) attached to a holomorphic state.
pub fn pencil_from_state(h: &HoloState) -> (CMatrix, CMatrix) {
    let (n, m) = (h.n(), h.m());
    let k = n + m;
    let mut c0 = CMatrix::zeros(k, k);
    let mut c1 = CMatrix::zeros(k, k);
    c0.view_mut((0, n), (n, m)).copy_from(&h.a0);
    c0.view_mut((n, 0), (m, n)).copy_from(&h.b0);
    c1.view_mut((0, n), (n, m)).copy_from(&h.a1);
    c1.view_mut((n, 0), (m, n)).copy_from(&h.b1);
    (c0, c1)
}

/// Exact conjugation defect max |g0 C(z) g0^{-1} + C(z)| for
/// g0 = diag(I_n, -I_m); identically zero for block off-diagonal pencils.
pub fn g0_conjugation_defect(h: &HoloState) -> f64 {
    let (c0, c1) = pencil_from_state(h);
    let (n, m) = (h.n(), h.m());
    let k = n + m;
    let mut g0 = CMatrix::identity(k, k);
    for i in n..k {
        g0[(i, i)] = C64::new(-1.0, 0.0);
    }
    let defect = |c: &CMatrix| matkit::max_abs(&(&g0 * c * &g0 + c));
    defect(&c0).max(defect(&c1))
}

/// Everything the double-cover analysis produces for one pencil.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// det(lambda - C0 - C1 z), chopped.
    pub phat: BivariatePoly,
    /// Largest raw coefficient magnitude at lambda-powers of the wrong
    /// parity; the curve is invariant under lambda -> -lambda, so only powers
    /// congruent to n - m survive and this residual vanishes.
    pub tau_residual: f64,
    /// Largest power of lambda dividing the chopped polynomial.
    pub lambda_power: usize,
    /// det(eta - X(z)Y(z)), for square blocks only.
    pub p: Option<BivariatePoly>,
    /// Max coefficient defect of phat(z, lambda) = p(z, lambda^2), raw.
    pub square_residual: Option<f64>,
    pub genus_s: Option<usize>,
    pub genus_shat: Option<usize>,
    /// Roots of det A(z) and det B(z); the branch loci over lambda = 0.
    pub ramification_a: Option<Vec<C64>>,
    pub ramification_b: Option<Vec<C64>>,
    /// Whether the two root sets stay at least 1e-8 apart.
    pub disjoint: Option<bool>,
}

fn determinant_poly(p: &PolyMatrix) -> Result<Vec<C64>> {
    let (rows, _) = p.shape();
    let deg = rows * p.degree();
    let nodes = zeta_nodes(deg + 1);
    let values = nodes
        .iter()
        .map(|&z| matkit::determinant(&p.eval(z)))
        .collect::<Result<Vec<_>>>()?;
    Ok(lagrange_coeffs(&nodes, &values))
}

/// tau-invariance defect: P(z,-lambda) = (-1)^{n-m} P(z,lambda), so every
/// coefficient whose lambda-power has the wrong parity must vanish.
fn raw_tau_defect(raw: &RawBivariate, lambda_parity: usize) -> f64 {
    raw.iter()
        .filter(|(&(_, j), _)| j % 2 != lambda_parity)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max)
}

fn raw_square_defect(phat: &RawBivariate, p: &RawBivariate) -> f64 {
    let mut worst: f64 = 0.0;
    for (&(i, j), &c) in p {
        let other = phat.get(&(i, 2 * j)).copied().unwrap_or(C64::new(0.0, 0.0));
        worst = worst.max((c - other).norm());
    }
    for (&(i, j), &c) in phat {
        if j % 2 == 0 {
            let other = p.get(&(i, j / 2)).copied().unwrap_or(C64::new(0.0, 0.0));
            worst = worst.max((c - other).norm());
        }
    }
    worst
}

/// Builds the spectral report of a holomorphic state: tau-invariance of
/// det(lambda - C(z)), the lambda-divisibility, and for square blocks the
/// double-cover comparison with det(eta - XY), genus values and the
/// ramification loci of det A, det B.
pub fn tau_and_square_check(h: &HoloState) -> Result<SpectralReport> {
    let (n, m) = (h.n(), h.m());
    let (c0, c1) = pencil_from_state(h);
    let pencil = PolyMatrix::new(vec![c0, c1])?;
    let phat_raw = char_poly_polymatrix_raw(&pencil)?;
    let phat = BivariatePoly::from_raw(phat_raw.clone());
    let tau_residual = raw_tau_defect(&phat_raw, (n + m) % 2);
    let lambda_power = phat.lambda_divisibility();

    if n != m {
        return Ok(SpectralReport {
            phat,
            tau_residual,
            lambda_power,
            p: None,
            square_residual: None,
            genus_s: None,
            genus_shat: None,
            ramification_a: None,
            ramification_b: None,
            disjoint: None,
        });
    }

    let lax = build_lax(h);
    let p_raw = char_poly_polymatrix_raw(&lax.z)?;
    let p = BivariatePoly::from_raw(p_raw.clone());
    let square_residual = raw_square_defect(&phat_raw, &p_raw);

    let det_a = determinant_poly(&lax.x)?;
    let det_b = determinant_poly(&lax.y)?;
    let (ram_a, ram_b) = match (poly_roots(&det_a), poly_roots(&det_b)) {
        (Ok(a), Ok(b)) => (a, b),
        // a vanishing determinant polynomial has no meaningful divisor
        (Err(Error::DegeneratePolynomial), _) | (_, Err(Error::DegeneratePolynomial)) => {
            return Ok(SpectralReport {
                phat,
                tau_residual,
                lambda_power,
                p: Some(p),
                square_residual: Some(square_residual),
                genus_s: Some((n - 1) * (n - 1)),
                genus_shat: Some((n - 1) * (2 * n - 1)),
                ramification_a: None,
                ramification_b: None,
                disjoint: None,
            });
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let mut disjoint = true;
    for ra in &ram_a {
        for rb in &ram_b {
            if (ra - rb).norm() <= 1e-8 {
                disjoint = false;
            }
        }
    }
    Ok(SpectralReport {
        phat,
        tau_residual,
        lambda_power,
        p: Some(p),
        square_residual: Some(square_residual),
        genus_s: Some((n - 1) * (n - 1)),
        genus_shat: Some((n - 1) * (2 * n - 1)),
        ramification_a: Some(ram_a),
        ramification_b: Some(ram_b),
        disjoint: Some(disjoint),
    })
}

/// Raw pencil coefficients of a BHT state under the reality embedding.
pub(crate) fn state_pencil_raw(s: &BHTState) -> Result<RawBivariate> {
    let h = reality_embed(s);
    let (c0, c1) = pencil_from_state(&h);
    char_poly_polymatrix_raw(&PolyMatrix::new(vec![c0, c1])?)
}

/// Raw (unchopped) spectral-curve coefficients of the reality-embedded
/// pencil, sorted by (zeta power, lambda power).
pub fn pencil_coefficients(s: &BHTState) -> Result<Vec<((usize, usize), C64)>> {
    Ok(state_pencil_raw(s)?.into_iter().collect())
}

/// Raw spectral-curve coefficients of a holomorphic state's own pencil.
pub fn holo_pencil_coefficients(h: &HoloState) -> Result<Vec<((usize, usize), C64)>> {
    let (c0, c1) = pencil_from_state(h);
    Ok(char_poly_polymatrix_raw(&PolyMatrix::new(vec![c0, c1])?)?
        .into_iter()
        .collect())
}

/// max over the union of keys of |c - c0| / (1 + |c0|), for sorted
/// coefficient lists as produced by [`pencil_coefficients`].
pub fn coefficient_drift(base: &[((usize, usize), C64)], cur: &[((usize, usize), C64)]) -> f64 {
    let zero = C64::new(0.0, 0.0);
    let b: std::collections::BTreeMap<_, _> = base.iter().copied().collect();
    let c: std::collections::BTreeMap<_, _> = cur.iter().copied().collect();
    let mut worst: f64 = 0.0;
    for key in b.keys().chain(c.keys()) {
        let c0 = b.get(key).copied().unwrap_or(zero);
        let ct = c.get(key).copied().unwrap_or(zero);
        worst = worst.max((ct - c0).norm() / (1.0 + c0.norm()));
    }
    worst
}

/// Relative drift of the spectral-curve coefficients along a trajectory:
/// max over steps and coefficients of |c(t) - c(0)| / (1 + |c(0)|).
///
/// The flow is isospectral, so this measures pure integration error.
pub fn spectral_drift(traj: &[BHTState]) -> Result<f64> {
    let Some(first) = traj.first() else {
        return Ok(0.0);
    };
    let base = pencil_coefficients(first)?;
    let mut worst: f64 = 0.0;
    for state in &traj[1..] {
        worst = worst.max(coefficient_drift(&base, &pencil_coefficients(state)?));
    }
    Ok(worst)
}

/// Point on the projective line at which a pencil is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PencilPoint {
    Finite(C64),
    /// Evaluates to the leading coefficient.
    Infinity,
}

/// Regularity of X(z) at one point: the centralizer dimension
/// dim { Y : [Y, X(z)] = 0 } equals the matrix size exactly for regular
/// elements.
pub fn regularity_at(x: &PolyMatrix, at: PencilPoint) -> Result<(bool, usize)> {
    let (rows, cols) = x.shape();
    if rows != cols {
        return Err(Error::DimensionMismatch {
            op: "regularity_at",
            details: format!("{rows}x{cols} is not square"),
        });
    }
    let value = match at {
        PencilPoint::Finite(z) => x.eval(z),
        PencilPoint::Infinity => x.leading().clone(),
    };
    let k = rows;
    let mut ad = CMatrix::zeros(k * k, k * k);
    for p in 0..k {
        for q in 0..k {
            let col = p * k + q;
            let mut e = CMatrix::zeros(k, k);
            e[(p, q)] = C64::new(1.0, 0.0);
            let image = &e * &value - &value * e;
            for i in 0..k {
                for j in 0..k {
                    ad[(i * k + j, col)] = image[(i, j)];
                }
            }
        }
    }
    let dim = kernel_basis(&ad, 1e-10)?.len();
    Ok((dim == k, dim))
}
