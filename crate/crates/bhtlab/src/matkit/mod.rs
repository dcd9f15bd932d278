//! Dense complex-matrix primitives shared by every other module.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>` throughout; entries are IEEE
//! doubles and all sizes here are tiny (tests run at n, m <= 8), so everything
//! favours clarity and determinism over scale. Finiteness of entries is
//! enforced at I/O boundaries (see [`is_finite`]) and by the integrators'
//! blow-up detection rather than on every construction.

mod poly;

pub use poly::{interpolate_bivariate, poly_roots, zeta_nodes, BivariatePoly, PolyMatrix};
pub(crate) use poly::{interpolate_raw, lagrange_coeffs, RawBivariate};

use crate::{CMatrix, Error, Result, C64};

/// Relative singular-value threshold for rank decisions.
pub const RANK_RTOL: f64 = 1e-10;

/// Largest entry modulus; zero for an empty matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn require_square(m: &CMatrix, op: &'static str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            op,
            details: format!("{}x{} is not square", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

/// XY - YX for square matrices of equal size.
pub fn commutator(x: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
    require_square(x, "commutator")?;
    if x.shape() != y.shape() {
        return Err(Error::DimensionMismatch {
            op: "commutator",
            details: format!("{:?} vs {:?}", x.shape(), y.shape()),
        });
    }
    Ok(x * y - y * x)
}

pub(crate) struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    /// Right singular vectors as columns (V, not V*).
    pub v: CMatrix,
}

pub(crate) fn svd(m: &CMatrix) -> Result<Svd> {
    let out = m
        .clone()
        .try_svd(true, true, 1e-14, 200_000)
        .ok_or(Error::Numerical("SVD did not converge"))?;
    Ok(Svd {
        u: out.u.expect("u requested"),
        singular_values: out.singular_values.iter().copied().collect(),
        v: out.v_t.expect("v_t requested").adjoint(),
    })
}

/// Numerical rank: singular values above `rtol` times the largest.
pub fn rank(m: &CMatrix, rtol: f64) -> Result<usize> {
    let s = svd(m)?;
    let smax = s.singular_values.iter().copied().fold(0.0, f64::max);
    Ok(s.singular_values
        .iter()
        .filter(|&&v| v > rtol * smax)
        .count())
}

/// Unique Frobenius-minimiser N of ||XN - U|| for X of full column rank.
///
/// When U lies in the column span of X this solves XN = U exactly (to
/// roundoff). Rank is judged against [`RANK_RTOL`].
pub fn least_squares_solve(x: &CMatrix, u: &CMatrix) -> Result<CMatrix> {
    if x.nrows() != u.nrows() {
        return Err(Error::DimensionMismatch {
            op: "least_squares_solve",
            details: format!("X has {} rows, U has {}", x.nrows(), u.nrows()),
        });
    }
    let m = x.ncols();
    let s = svd(x)?;
    let smax = s.singular_values.iter().copied().fold(0.0, f64::max);
    let numerical_rank = s
        .singular_values
        .iter()
        .filter(|&&v| v > RANK_RTOL * smax)
        .count();
    if numerical_rank < m {
        return Err(Error::RankDeficient {
            rank: numerical_rank,
            expected: m,
        });
    }
    // N = V diag(1/sigma) U* u
    let mut core = s.u.adjoint() * u;
    for (i, &sv) in s.singular_values.iter().enumerate() {
        for j in 0..core.ncols() {
            core[(i, j)] /= C64::new(sv, 0.0);
        }
    }
    Ok(&s.v * core)
}

/// Orthonormal basis of the span of right-singular vectors of `l` whose
/// singular values fall at or below `threshold` times the largest one.
///
/// Returned as column vectors. For `l == 0` this is the full standard basis.
pub fn operator_kernel(l: &CMatrix, threshold: f64) -> Result<Vec<CMatrix>> {
    require_square(l, "operator_kernel")?;
    assert!(threshold > 0.0, "threshold must be positive");
    kernel_basis(l, threshold)
}

/// Kernel basis for a possibly rectangular map. Wide matrices are padded with
/// zero rows so the thin SVD still exposes every right-singular vector.
pub(crate) fn kernel_basis(l: &CMatrix, threshold: f64) -> Result<Vec<CMatrix>> {
    let (r, c) = l.shape();
    if c == 0 {
        return Ok(Vec::new());
    }
    let padded;
    let work = if r < c {
        let mut p = CMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(l);
        padded = p;
        &padded
    } else {
        l
    };
    let s = svd(work)?;
    let smax = s.singular_values.iter().copied().fold(0.0, f64::max);
    let mut basis = Vec::new();
    for (i, &sv) in s.singular_values.iter().enumerate() {
        if sv <= threshold * smax {
            let col = s.v.column(i);
            basis.push(CMatrix::from_fn(c, 1, |r, _| col[r]));
        }
    }
    Ok(basis)
}

/// Coefficients of det(lambda I - M), ascending in lambda, leading
/// coefficient exactly one. Faddeev-LeVerrier recurrence.
pub fn char_poly(m: &CMatrix) -> Result<Vec<C64>> {
    require_square(m, "char_poly")?;
    let k = m.nrows();
    let mut coeffs = vec![C64::new(0.0, 0.0); k + 1];
    coeffs[k] = C64::new(1.0, 0.0);
    let mut n = m.clone();
    for j in 1..=k {
        let c = -n.trace() / C64::new(j as f64, 0.0);
        coeffs[k - j] = c;
        if j < k {
            n = m * (&n + CMatrix::identity(k, k) * c);
        }
    }
    Ok(coeffs)
}

/// Eigenvalues with multiplicity, via the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    require_square(m, "eigenvalues")?;
    let k = m.nrows();
    if k == 0 {
        return Ok(Vec::new());
    }
    if k == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let schur = m
        .clone()
        .try_schur(1e-13, 200_000)
        .ok_or(Error::Numerical("Schur iteration did not converge"))?;
    let t = schur.unpack().1;
    Ok((0..k).map(|i| t[(i, i)]).collect())
}

/// Determinant (LU with partial pivoting).
pub fn determinant(m: &CMatrix) -> Result<C64> {
    require_square(m, "determinant")?;
    Ok(m.determinant())
}
