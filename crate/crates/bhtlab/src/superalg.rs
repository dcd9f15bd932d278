//! The Lie superalgebra gl(n|m) over the complex numbers.
//!
//! Elements are (n+m) x (n+m) block matrices with even part the diagonal
//! blocks (U, V) and odd part the off-diagonal blocks (A, B). The superbracket
//! is [X,Y] = XY - (-1)^{|X||Y|} YX, extended bilinearly to mixed-parity
//! inputs; on odd pairs it is the anticommutator. The quaternionic map J, the
//! supertrace and the indefinite pairing built from them live here, together
//! with regularity of odd elements on group orbits.

use crate::matkit::kernel_basis;
use crate::{CMatrix, Error, Result, C64};

/// Relative singular-value threshold used when extracting Ker ad C.
pub const KERNEL_RTOL: f64 = 1e-10;

/// The Gram matrix counts as nondegenerate when its smallest eigenvalue
/// magnitude exceeds this times the largest.
pub const REGULARITY_RTOL: f64 = 1e-8;

/// Block element of gl(n|m).
///
/// The four blocks are stored separately so parity splits are exact: the even
/// part is (U, V), the odd part is (A, B), and their sum reproduces the
/// element bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperMatrix {
    n: usize,
    m: usize,
    u: CMatrix,
    a: CMatrix,
    b: CMatrix,
    v: CMatrix,
}

impl SuperMatrix {
    pub fn new(u: CMatrix, a: CMatrix, b: CMatrix, v: CMatrix) -> Result<Self> {
        let n = u.nrows();
        let m = v.nrows();
        let ok = u.shape() == (n, n)
            && v.shape() == (m, m)
            && a.shape() == (n, m)
            && b.shape() == (m, n);
        if !ok {
            return Err(Error::DimensionMismatch {
                op: "SuperMatrix::new",
                details: format!(
                    "U {:?}, A {:?}, B {:?}, V {:?}",
                    u.shape(),
                    a.shape(),
                    b.shape(),
                    v.shape()
                ),
            });
        }
        Ok(Self { n, m, u, a, b, v })
    }

    pub fn zero(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            u: CMatrix::zeros(n, n),
            a: CMatrix::zeros(n, m),
            b: CMatrix::zeros(m, n),
            v: CMatrix::zeros(m, m),
        }
    }

    pub fn identity(n: usize, m: usize) -> Self {
        let mut out = Self::zero(n, m);
        out.u = CMatrix::identity(n, n);
        out.v = CMatrix::identity(m, m);
        out
    }

    /// Odd element (0, A; B, 0); n, m inferred from the block shapes.
    pub fn odd(a: CMatrix, b: CMatrix) -> Result<Self> {
        let (n, m) = (a.nrows(), a.ncols());
        Self::new(CMatrix::zeros(n, n), a, b, CMatrix::zeros(m, m))
    }

    /// Even element (U, 0; 0, V).
    pub fn even(u: CMatrix, v: CMatrix) -> Result<Self> {
        let (n, m) = (u.nrows(), v.nrows());
        Self::new(u, CMatrix::zeros(n, m), CMatrix::zeros(m, n), v)
    }

    pub fn from_full(n: usize, m: usize, full: &CMatrix) -> Result<Self> {
        if full.shape() != (n + m, n + m) {
            return Err(Error::DimensionMismatch {
                op: "SuperMatrix::from_full",
                details: format!("expected {0}x{0}, got {1:?}", n + m, full.shape()),
            });
        }
        Ok(Self {
            n,
            m,
            u: full.view((0, 0), (n, n)).into_owned(),
            a: full.view((0, n), (n, m)).into_owned(),
            b: full.view((n, 0), (m, n)).into_owned(),
            v: full.view((n, n), (m, m)).into_owned(),
        })
    }

    pub fn to_full(&self) -> CMatrix {
        let k = self.n + self.m;
        let mut full = CMatrix::zeros(k, k);
        full.view_mut((0, 0), (self.n, self.n)).copy_from(&self.u);
        full.view_mut((0, self.n), (self.n, self.m))
            .copy_from(&self.a);
        full.view_mut((self.n, 0), (self.m, self.n))
            .copy_from(&self.b);
        full.view_mut((self.n, self.n), (self.m, self.m))
            .copy_from(&self.v);
        full
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn block_u(&self) -> &CMatrix {
        &self.u
    }

    pub fn block_a(&self) -> &CMatrix {
        &self.a
    }

    pub fn block_b(&self) -> &CMatrix {
        &self.b
    }

    pub fn block_v(&self) -> &CMatrix {
        &self.v
    }

    pub fn even_part(&self) -> Self {
        Self::even(self.u.clone(), self.v.clone()).expect("blocks already consistent")
    }

    pub fn odd_part(&self) -> Self {
        Self::odd(self.a.clone(), self.b.clone()).expect("blocks already consistent")
    }

    pub fn is_even(&self) -> bool {
        self.a.iter().all(|z| *z == C64::new(0.0, 0.0))
            && self.b.iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    pub fn is_odd(&self) -> bool {
        self.u.iter().all(|z| *z == C64::new(0.0, 0.0))
            && self.v.iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    /// Frobenius norm of the embedded matrix.
    pub fn norm(&self) -> f64 {
        (self.u.norm_squared()
            + self.a.norm_squared()
            + self.b.norm_squared()
            + self.v.norm_squared())
        .sqrt()
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            n: self.n,
            m: self.m,
            u: &self.u * z,
            a: &self.a * z,
            b: &self.b * z,
            v: &self.v * z,
        }
    }

    fn same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.n != other.n || self.m != other.m {
            return Err(Error::DimensionMismatch {
                op,
                details: format!("({},{}) vs ({},{})", self.n, self.m, other.n, other.m),
            });
        }
        Ok(())
    }
}

impl std::ops::Add for &SuperMatrix {
    type Output = SuperMatrix;
    fn add(self, rhs: &SuperMatrix) -> SuperMatrix {
        self.same_shape(rhs, "SuperMatrix::add")
            .expect("shape mismatch");
        SuperMatrix {
            n: self.n,
            m: self.m,
            u: &self.u + &rhs.u,
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
            v: &self.v + &rhs.v,
        }
    }
}

impl std::ops::Sub for &SuperMatrix {
    type Output = SuperMatrix;
    fn sub(self, rhs: &SuperMatrix) -> SuperMatrix {
        self.same_shape(rhs, "SuperMatrix::sub")
            .expect("shape mismatch");
        SuperMatrix {
            n: self.n,
            m: self.m,
            u: &self.u - &rhs.u,
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
            v: &self.v - &rhs.v,
        }
    }
}

/// [X,Y] = XY - (-1)^{|X||Y|} YX, extended bilinearly over the parity split.
///
/// Even-even and even-odd pairs give the plain commutator; odd-odd pairs give
/// the anticommutator.
pub fn superbracket(x: &SuperMatrix, y: &SuperMatrix) -> Result<SuperMatrix> {
    x.same_shape(y, "superbracket")?;
    let xe = x.even_part().to_full();
    let xo = x.odd_part().to_full();
    let ye = y.even_part().to_full();
    let yo = y.odd_part().to_full();
    let full = (&xe * &ye - &ye * &xe)
        + (&xe * &yo - &yo * &xe)
        + (&xo * &ye - &ye * &xo)
        + (&xo * &yo + &yo * &xo);
    SuperMatrix::from_full(x.n, x.m, &full)
}

/// tr U - tr V.
pub fn supertrace(x: &SuperMatrix) -> C64 {
    x.u.trace() - x.v.trace()
}

/// Supertrace of a plain (n+m)-square matrix with respect to the grading.
fn supertrace_full(full: &CMatrix, n: usize) -> C64 {
    let k = full.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..k {
        if i < n {
            acc += full[(i, i)];
        } else {
            acc -= full[(i, i)];
        }
    }
    acc
}

/// The antilinear quaternionic map (U, A, B, V) -> (-U*, -B*, A*, -V*).
///
/// Squares to -1 on odd elements and +1 on even elements, and commutes with
/// the superbracket.
pub fn j_map(x: &SuperMatrix) -> SuperMatrix {
    SuperMatrix {
        n: x.n,
        m: x.m,
        u: -x.u.adjoint(),
        a: -x.b.adjoint(),
        b: x.a.adjoint(),
        v: -x.v.adjoint(),
    }
}

/// The symmetric real form <X,Y> = -1/2 str(J(X)Y + J(Y)X).
///
/// Blockwise this is sum over blocks of (-1)^{ij} Re tr(X_ij* Y_ij); it is
/// positive definite on the odd part and indefinite on the even part.
pub fn pairing(x: &SuperMatrix, y: &SuperMatrix) -> f64 {
    x.same_shape(y, "pairing").expect("shape mismatch");
    let jx = j_map(x).to_full();
    let jy = j_map(y).to_full();
    let prod = jx * y.to_full() + jy * x.to_full();
    (-0.5 * supertrace_full(&prod, x.n)).re
}

/// Same value through the explicit block formula; used to cross-check the
/// supertrace route.
pub fn pairing_block_formula(x: &SuperMatrix, y: &SuperMatrix) -> f64 {
    let dot = |p: &CMatrix, q: &CMatrix| (p.adjoint() * q).trace().re;
    dot(&x.u, &y.u) + dot(&x.a, &y.a) + dot(&x.b, &y.b) - dot(&x.v, &y.v)
}

/// Which group the orbit belongs to; SL x SL is mandatory when n = m because
/// the pairing degenerates on s(gl_n x gl_n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitGroup {
    /// S(GL_n x GL_m): block-diagonal with total trace zero.
    SpecialProduct,
    /// SL_n x SL_m: each diagonal block traceless.
    SlTimesSl,
}

impl OrbitGroup {
    pub fn for_shape(n: usize, m: usize) -> Self {
        if n == m {
            OrbitGroup::SlTimesSl
        } else {
            OrbitGroup::SpecialProduct
        }
    }
}

/// Complex basis of the even subalgebra attached to `group`, built from
/// elementary matrices plus traceless diagonal combinations.
pub fn even_subalgebra_basis(n: usize, m: usize, group: OrbitGroup) -> Vec<SuperMatrix> {
    let k = n + m;
    let mut basis = Vec::new();
    let mut push_full = |full: CMatrix| {
        basis.push(SuperMatrix::from_full(n, m, &full).expect("block element"));
    };
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut e = CMatrix::zeros(k, k);
                e[(i, j)] = C64::new(1.0, 0.0);
                push_full(e);
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            if i != j {
                let mut e = CMatrix::zeros(k, k);
                e[(n + i, n + j)] = C64::new(1.0, 0.0);
                push_full(e);
            }
        }
    }
    match group {
        OrbitGroup::SpecialProduct => {
            // diagonal differences across the whole diagonal: total trace zero
            for i in 0..k - 1 {
                let mut e = CMatrix::zeros(k, k);
                e[(i, i)] = C64::new(1.0, 0.0);
                e[(i + 1, i + 1)] = C64::new(-1.0, 0.0);
                push_full(e);
            }
        }
        OrbitGroup::SlTimesSl => {
            for i in 0..n.saturating_sub(1) {
                let mut e = CMatrix::zeros(k, k);
                e[(i, i)] = C64::new(1.0, 0.0);
                e[(i + 1, i + 1)] = C64::new(-1.0, 0.0);
                push_full(e);
            }
            for i in 0..m.saturating_sub(1) {
                let mut e = CMatrix::zeros(k, k);
                e[(n + i, n + i)] = C64::new(1.0, 0.0);
                e[(n + i + 1, n + i + 1)] = C64::new(-1.0, 0.0);
                push_full(e);
            }
        }
    }
    basis
}

/// Outcome of the regularity test for an odd element.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    /// Complex orthonormal basis of Ker ad C intersected with the subalgebra.
    pub kernel_basis: Vec<SuperMatrix>,
    /// Real Gram matrix of the pairing on the realified kernel
    /// (basis k_1, i k_1, k_2, i k_2, ...).
    pub gram: nalgebra::DMatrix<f64>,
    pub regular: bool,
    /// Smallest eigenvalue magnitude of the Gram matrix; infinite for an
    /// empty kernel.
    pub condition: f64,
}

fn odd_coords(x: &SuperMatrix) -> nalgebra::DVector<C64> {
    let mut v = Vec::with_capacity(2 * x.n * x.m);
    for i in 0..x.n {
        for j in 0..x.m {
            v.push(x.a[(i, j)]);
        }
    }
    for i in 0..x.m {
        for j in 0..x.n {
            v.push(x.b[(i, j)]);
        }
    }
    nalgebra::DVector::from_vec(v)
}

/// Nondegeneracy of the pairing on Ker ad C inside the group's even
/// subalgebra.
///
/// ad C is materialised as a dense operator from the subalgebra basis to odd
/// coordinates; its kernel comes from [`matkit::operator_kernel`] semantics
/// and the Gram matrix of the pairing is assembled on the realified kernel.
///
/// Panics if `c` is not odd, or if n = m and `group` is not SL x SL.
pub fn regularity(c: &SuperMatrix, group: OrbitGroup) -> RegularityReport {
    assert!(c.is_odd(), "regularity is defined for odd elements");
    assert!(
        !(c.n == c.m && group == OrbitGroup::SpecialProduct),
        "use SL x SL when n = m; the pairing degenerates on s(gl_n x gl_n)"
    );
    let basis = even_subalgebra_basis(c.n, c.m, group);
    let dim = basis.len();
    if dim == 0 {
        return RegularityReport {
            kernel_basis: Vec::new(),
            gram: nalgebra::DMatrix::zeros(0, 0),
            regular: true,
            condition: f64::INFINITY,
        };
    }
    let rows = 2 * c.n * c.m;
    let mut ad = CMatrix::zeros(rows, dim);
    for (j, e) in basis.iter().enumerate() {
        let br = superbracket(e, c).expect("shapes agree");
        ad.view_mut((0, j), (rows, 1)).copy_from(&odd_coords(&br));
    }
    let kernel_coords = kernel_basis(&ad, KERNEL_RTOL).expect("SVD of a finite matrix");
    let kernel: Vec<SuperMatrix> = kernel_coords
        .iter()
        .map(|coord| {
            let mut acc = SuperMatrix::zero(c.n, c.m);
            for (j, e) in basis.iter().enumerate() {
                acc = &acc + &e.scale(coord[(j, 0)]);
            }
            acc
        })
        .collect();

    // realify: each complex kernel vector contributes k and i*k
    let r = kernel.len();
    let mut real_span = Vec::with_capacity(2 * r);
    for k in &kernel {
        real_span.push(k.clone());
        real_span.push(k.scale(C64::new(0.0, 1.0)));
    }
    let mut gram = nalgebra::DMatrix::<f64>::zeros(2 * r, 2 * r);
    for i in 0..2 * r {
        for j in i..2 * r {
            let val = pairing(&real_span[i], &real_span[j]);
            gram[(i, j)] = val;
            gram[(j, i)] = val;
        }
    }
    let (regular, condition) = if r == 0 {
        (true, f64::INFINITY)
    } else {
        let eig = gram.clone().symmetric_eigen().eigenvalues;
        let min = eig.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
        let max = eig.iter().map(|l| l.abs()).fold(0.0, f64::max);
        (min > REGULARITY_RTOL * max, min)
    };
    RegularityReport {
        kernel_basis: kernel,
        gram,
        regular,
        condition,
    }
}

/// Orthogonality residual certifying the gradient interpretation on orbits:
/// max over the realified kernel basis of |<[J(C),C], k>|, normalized by
/// ||C||^2. The flow being a gradient on the orbit forces [J(C),C] into the
/// complement of Ker ad C, so this vanishes identically.
pub fn orbit_gradient_check(c: &SuperMatrix) -> f64 {
    let norm2 = c.norm() * c.norm();
    if norm2 == 0.0 {
        return 0.0;
    }
    let group = OrbitGroup::for_shape(c.n, c.m);
    let report = regularity(c, group);
    let grad_core = superbracket(&j_map(c), c).expect("shapes agree");
    let mut worst: f64 = 0.0;
    for k in &report.kernel_basis {
        worst = worst.max(pairing(&grad_core, k).abs());
        worst = worst.max(pairing(&grad_core, &k.scale(C64::new(0.0, 1.0))).abs());
    }
    worst / norm2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit;
    use crate::random::{random_cmatrix, random_even, random_odd, rng_from_seed};
    use rand::Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn scalar_odd(a: C64, b: C64) -> SuperMatrix {
        SuperMatrix::odd(
            CMatrix::from_row_slice(1, 1, &[a]),
            CMatrix::from_row_slice(1, 1, &[b]),
        )
        .unwrap()
    }

    fn random_homogeneous<R: Rng>(rng: &mut R, n: usize, m: usize) -> SuperMatrix {
        if rng.gen_bool(0.5) {
            random_odd(rng, n, m)
        } else {
            random_even(rng, n, m)
        }
    }

    #[test]
    fn odd_odd_is_anticommutator() {
        let cmat = scalar_odd(c(1.0, 0.0), c(1.0, 0.0));
        let br = superbracket(&cmat, &cmat).unwrap();
        // 2 C^2 = 2 I for A = B = 1
        let expect = SuperMatrix::identity(1, 1).scale(c(2.0, 0.0));
        assert_eq!(br, expect);
    }

    #[test]
    fn even_even_is_commutator() {
        let mut rng = rng_from_seed(20);
        let x = random_even(&mut rng, 2, 2);
        let y = random_even(&mut rng, 2, 2);
        let br = superbracket(&x, &y).unwrap().to_full();
        let plain = matkit::commutator(&x.to_full(), &y.to_full()).unwrap();
        assert!(matkit::max_abs(&(br - plain)) < 1e-14);
    }

    #[test]
    fn odd_square_identity() {
        // [x,[x,y]] = 1/2 [[x,x],y] for odd x
        let mut rng = rng_from_seed(21);
        for _ in 0..20 {
            let x = random_odd(&mut rng, 2, 2);
            let y = random_homogeneous(&mut rng, 2, 2);
            let lhs = superbracket(&x, &superbracket(&x, &y).unwrap()).unwrap();
            let rhs = superbracket(&superbracket(&x, &x).unwrap(), &y)
                .unwrap()
                .scale(c(0.5, 0.0));
            assert!((&lhs - &rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn graded_jacobi() {
        let mut rng = rng_from_seed(22);
        for _ in 0..30 {
            let x = random_homogeneous(&mut rng, 2, 1);
            let y = random_homogeneous(&mut rng, 2, 1);
            let z = random_homogeneous(&mut rng, 2, 1);
            let px = if x.is_odd() { 1 } else { 0 };
            let py = if y.is_odd() { 1 } else { 0 };
            let pz = if z.is_odd() { 1 } else { 0 };
            let sgn = |k: usize| {
                if k % 2 == 0 {
                    c(1.0, 0.0)
                } else {
                    c(-1.0, 0.0)
                }
            };
            let t1 = superbracket(&x, &superbracket(&y, &z).unwrap())
                .unwrap()
                .scale(sgn(px * pz));
            let t2 = superbracket(&y, &superbracket(&z, &x).unwrap())
                .unwrap()
                .scale(sgn(py * px));
            let t3 = superbracket(&z, &superbracket(&x, &y).unwrap())
                .unwrap()
                .scale(sgn(pz * py));
            let total = &(&t1 + &t2) + &t3;
            assert!(total.norm() < 1e-12);
        }
    }

    #[test]
    fn supertrace_values() {
        assert_eq!(supertrace(&SuperMatrix::identity(2, 1)), c(1.0, 0.0));
        let mut rng = rng_from_seed(23);
        let odd = random_odd(&mut rng, 3, 2);
        assert_eq!(supertrace(&odd), c(0.0, 0.0));
    }

    #[test]
    fn supertrace_ad_invariance() {
        // str([X,Y]Z) + (-1)^{|X||Y|} str(Y[X,Z]) = 0
        let mut rng = rng_from_seed(24);
        for _ in 0..30 {
            let x = random_homogeneous(&mut rng, 2, 2);
            let y = random_homogeneous(&mut rng, 2, 2);
            let z = random_homogeneous(&mut rng, 2, 2);
            let sign = if x.is_odd() && y.is_odd() { -1.0 } else { 1.0 };
            let t1 = supertrace_full(&(superbracket(&x, &y).unwrap().to_full() * z.to_full()), 2);
            let t2 = supertrace_full(&(y.to_full() * superbracket(&x, &z).unwrap().to_full()), 2);
            assert!((t1 + c(sign, 0.0) * t2).norm() < 1e-12);
        }
    }

    #[test]
    fn j_map_formula_and_involution() {
        let x = scalar_odd(c(0.3, 0.4), c(-1.0, 2.0));
        let jx = j_map(&x);
        // (A, B) -> (-conj(B), conj(A))
        assert_eq!(jx.block_a()[(0, 0)], c(1.0, 2.0));
        assert_eq!(jx.block_b()[(0, 0)], c(0.3, -0.4));

        let mut rng = rng_from_seed(25);
        let odd = random_odd(&mut rng, 3, 2);
        let jj_odd = j_map(&j_map(&odd));
        assert!((&jj_odd + &odd).norm() == 0.0, "J^2 = -1 on odd, exactly");
        let even = random_even(&mut rng, 3, 2);
        let jj_even = j_map(&j_map(&even));
        assert!(
            (&jj_even - &even).norm() == 0.0,
            "J^2 = +1 on even, exactly"
        );
    }

    #[test]
    fn j_map_is_antilinear_and_commutes_with_bracket() {
        let mut rng = rng_from_seed(26);
        for _ in 0..20 {
            let x = random_homogeneous(&mut rng, 2, 2);
            let y = random_homogeneous(&mut rng, 2, 2);
            let z = c(0.7, -0.3);
            let lhs = j_map(&x.scale(z));
            let rhs = j_map(&x).scale(z.conj());
            assert!((&lhs - &rhs).norm() < 1e-14);

            let br = j_map(&superbracket(&x, &y).unwrap());
            let br2 = superbracket(&j_map(&x), &j_map(&y)).unwrap();
            assert!((&br - &br2).norm() < 1e-12);
        }
    }

    #[test]
    fn pairing_values_and_symmetry() {
        let x = scalar_odd(c(0.6, 0.8), c(0.0, 2.0));
        // <C,C> = |a|^2 + |b|^2
        assert!((pairing(&x, &x) - (1.0 + 4.0)).abs() < 1e-12);

        let even = SuperMatrix::even(
            CMatrix::from_row_slice(1, 1, &[c(1.0, 0.0)]),
            CMatrix::from_row_slice(1, 1, &[c(1.0, 0.0)]),
        )
        .unwrap();
        assert!(pairing(&even, &even).abs() < 1e-12, "U and V blocks cancel");

        let mut rng = rng_from_seed(27);
        for _ in 0..20 {
            let x = random_homogeneous(&mut rng, 2, 1);
            let y = random_homogeneous(&mut rng, 2, 1);
            assert!((pairing(&x, &y) - pairing(&y, &x)).abs() < 1e-12);
            assert!((pairing(&x, &y) - pairing_block_formula(&x, &y)).abs() < 1e-12);
        }
    }

    #[test]
    fn pairing_positive_on_odd() {
        let mut rng = rng_from_seed(28);
        for _ in 0..20 {
            let x = random_odd(&mut rng, 3, 2);
            let frob2 = x.block_a().norm_squared() + x.block_b().norm_squared();
            assert!((pairing(&x, &x) - frob2).abs() < 1e-12);
        }
    }

    #[test]
    fn g0_conjugation_flips_odd_exactly() {
        let mut rng = rng_from_seed(29);
        let cmat = random_odd(&mut rng, 3, 2);
        let k = 5;
        let mut g0 = CMatrix::identity(k, k);
        for i in 3..k {
            g0[(i, i)] = c(-1.0, 0.0);
        }
        let full = cmat.to_full();
        let conj = &g0 * &full * &g0;
        assert_eq!(matkit::max_abs(&(conj + full)), 0.0);
    }

    #[test]
    fn subalgebra_dimensions() {
        assert_eq!(
            even_subalgebra_basis(2, 1, OrbitGroup::SpecialProduct).len(),
            4
        );
        assert_eq!(even_subalgebra_basis(2, 2, OrbitGroup::SlTimesSl).len(), 6);
        assert_eq!(even_subalgebra_basis(1, 1, OrbitGroup::SlTimesSl).len(), 0);
        assert_eq!(
            even_subalgebra_basis(4, 3, OrbitGroup::SpecialProduct).len(),
            24
        );
    }

    #[test]
    fn regularity_zero_element() {
        // kernel is the whole subalgebra; pairing is blockwise definite there
        let zero = SuperMatrix::zero(2, 1);
        let report = regularity(&zero, OrbitGroup::SpecialProduct);
        assert_eq!(report.kernel_basis.len(), 4);
        assert!(report.regular);
    }

    #[test]
    fn regularity_trivial_sl1() {
        let cmat = scalar_odd(c(1.0, 0.0), c(0.0, 0.0));
        let report = regularity(&cmat, OrbitGroup::SlTimesSl);
        assert!(report.kernel_basis.is_empty());
        assert!(report.regular);
        assert_eq!(report.condition, f64::INFINITY);
    }

    #[test]
    fn kernel_dimension_matches_rank_oracle() {
        // independent oracle: Gaussian-elimination corank of the ad matrix
        fn ge_rank(mut m: CMatrix, tol: f64) -> usize {
            let (rows, cols) = m.shape();
            let scale = matkit::max_abs(&m).max(1e-300);
            let mut rank = 0;
            let mut row = 0;
            for col in 0..cols {
                let (pivot, pmag) = (row..rows)
                    .map(|r| (r, m[(r, col)].norm()))
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap_or((row, 0.0));
                if pmag <= tol * scale {
                    continue;
                }
                m.swap_rows(row, pivot);
                for r in row + 1..rows {
                    let factor = m[(r, col)] / m[(row, col)];
                    for cc in col..cols {
                        let sub = factor * m[(row, cc)];
                        m[(r, cc)] -= sub;
                    }
                }
                rank += 1;
                row += 1;
                if row == rows {
                    break;
                }
            }
            rank
        }

        let mut rng = rng_from_seed(30);
        for _ in 0..10 {
            let cmat = random_odd(&mut rng, 2, 1);
            let basis = even_subalgebra_basis(2, 1, OrbitGroup::SpecialProduct);
            let mut ad = CMatrix::zeros(4, basis.len());
            for (j, e) in basis.iter().enumerate() {
                let br = superbracket(e, &cmat).unwrap();
                ad.view_mut((0, j), (4, 1)).copy_from(&odd_coords(&br));
            }
            let report = regularity(&cmat, OrbitGroup::SpecialProduct);
            let corank = basis.len() - ge_rank(ad, 1e-10);
            assert_eq!(report.kernel_basis.len(), corank);
        }
    }

    #[test]
    fn regularity_kernel_members_commute() {
        let mut rng = rng_from_seed(31);
        let cmat = random_odd(&mut rng, 3, 2);
        let report = regularity(&cmat, OrbitGroup::SpecialProduct);
        for k in &report.kernel_basis {
            let br = superbracket(k, &cmat).unwrap();
            assert!(br.norm() <= 1e-9 * cmat.norm() * k.norm());
        }
    }

    #[test]
    fn orbit_gradient_orthogonality() {
        assert_eq!(orbit_gradient_check(&SuperMatrix::zero(2, 2)), 0.0);

        let mut rng = rng_from_seed(32);
        let scalar = scalar_odd(
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        );
        assert!(orbit_gradient_check(&scalar) < 1e-12);

        for _ in 0..10 {
            let cmat = random_odd(&mut rng, 3, 2);
            assert!(orbit_gradient_check(&cmat) < 1e-10);
        }
    }

    #[test]
    fn mixed_parity_bracket_is_bilinear() {
        let mut rng = rng_from_seed(33);
        let x = {
            let e = random_even(&mut rng, 2, 2);
            let o = random_odd(&mut rng, 2, 2);
            &e + &o
        };
        let y = {
            let e = random_even(&mut rng, 2, 2);
            let o = random_odd(&mut rng, 2, 2);
            &e + &o
        };
        let whole = superbracket(&x, &y).unwrap();
        let mut parts = SuperMatrix::zero(2, 2);
        for xp in [x.even_part(), x.odd_part()] {
            for yp in [y.even_part(), y.odd_part()] {
                parts = &parts + &superbracket(&xp, &yp).unwrap();
            }
        }
        assert!((&whole - &parts).norm() < 1e-13);
    }

    #[test]
    fn parity_split_is_exact() {
        let mut rng = rng_from_seed(34);
        let u = random_cmatrix(&mut rng, 2, 2);
        let a = random_cmatrix(&mut rng, 2, 3);
        let b = random_cmatrix(&mut rng, 3, 2);
        let v = random_cmatrix(&mut rng, 3, 3);
        let x = SuperMatrix::new(u, a, b, v).unwrap();
        let sum = &x.even_part() + &x.odd_part();
        assert_eq!(sum, x);
    }
}
