//! Anti-Lie triple systems (ALTS).
//!
//! An ALTS is a vector space with a trilinear product satisfying symmetry in
//! the first two slots, a cyclic identity and a derivation identity. The
//! concrete instances here are full k x k matrices and the off-diagonal part
//! of gl(n|m), both with the product
//!
//! ```text
//! [x, y, z] = (xy + yx) z - z (xy + yx)
//! ```
//!
//! which is the double superbracket [[x,y],z] of gl(n|m) restricted to odd
//! elements. The triple-product flow Cdot = 1/2 [J(C),C,C], the Nahm
//! extraction and the Nahm-Schmid residuals are built on top.

use crate::flows::NahmTriple;
use crate::matkit;
use crate::superalg::{j_map, superbracket, SuperMatrix};
use crate::{CMatrix, Error, Result, C64};

/// Element of one of the two concrete matrix ALTS instances.
#[derive(Debug, Clone, PartialEq)]
pub enum AltsElement {
    /// The full k x k matrix ALTS.
    Full(CMatrix),
    /// The off-diagonal ALTS Mat(n,m) + Mat(m,n); diagonal blocks are exactly
    /// zero.
    OffDiag(SuperMatrix),
}

impl AltsElement {
    pub fn off_diag(x: SuperMatrix) -> Result<Self> {
        if !x.is_odd() {
            return Err(Error::NotStructured {
                property: "odd (zero diagonal blocks)",
                deviation: x.even_part().norm(),
            });
        }
        Ok(AltsElement::OffDiag(x))
    }

    /// The element as a plain square matrix.
    pub fn matrix(&self) -> CMatrix {
        match self {
            AltsElement::Full(m) => m.clone(),
            AltsElement::OffDiag(s) => s.to_full(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            AltsElement::Full(m) => m.norm(),
            AltsElement::OffDiag(s) => s.norm(),
        }
    }

    fn rewrap(&self, full: CMatrix) -> Result<AltsElement> {
        match self {
            AltsElement::Full(_) => Ok(AltsElement::Full(full)),
            AltsElement::OffDiag(s) => {
                let out = SuperMatrix::from_full(s.n(), s.m(), &full)?;
                // products of odd elements keep the diagonal blocks at exact zero
                debug_assert!(out.is_odd());
                Ok(AltsElement::OffDiag(out))
            }
        }
    }

    fn compatible(&self, other: &AltsElement, op: &'static str) -> Result<()> {
        let ok = match (self, other) {
            (AltsElement::Full(a), AltsElement::Full(b)) => a.shape() == b.shape(),
            (AltsElement::OffDiag(a), AltsElement::OffDiag(b)) => a.n() == b.n() && a.m() == b.m(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                op,
                details: "mixed or mismatched ALTS elements".into(),
            })
        }
    }
}

/// The matrix triple product on raw squares: (xy + yx)z - z(xy + yx).
pub fn triple_matrices(x: &CMatrix, y: &CMatrix, z: &CMatrix) -> CMatrix {
    let anti = x * y + y * x;
    &anti * z - z * &anti
}

/// Sign-flipped variant (one term of the right action flipped); breaks the
/// cyclic axiom and exists purely as the negative control for check suites.
pub fn triple_matrices_corrupted(x: &CMatrix, y: &CMatrix, z: &CMatrix) -> CMatrix {
    x * y * z + y * x * z - z * (y * x) + z * (x * y)
}

/// [x, y, z] in the ALTS both inputs live in.
pub fn triple(x: &AltsElement, y: &AltsElement, z: &AltsElement) -> Result<AltsElement> {
    x.compatible(y, "triple")?;
    x.compatible(z, "triple")?;
    x.rewrap(triple_matrices(&x.matrix(), &y.matrix(), &z.matrix()))
}

/// Norms of the three axiom defect tensors: symmetry in the first two slots,
/// the cyclic sum, and the derivation identity.
pub fn axioms_residual(
    x: &AltsElement,
    y: &AltsElement,
    z: &AltsElement,
    u: &AltsElement,
    v: &AltsElement,
) -> Result<[f64; 3]> {
    axioms_residual_with(triple_matrices, x, y, z, u, v)
}

/// Same defects for an arbitrary product; the check suites pass the corrupted
/// product through here as a mutation control.
pub fn axioms_residual_with(
    product: fn(&CMatrix, &CMatrix, &CMatrix) -> CMatrix,
    x: &AltsElement,
    y: &AltsElement,
    z: &AltsElement,
    u: &AltsElement,
    v: &AltsElement,
) -> Result<[f64; 3]> {
    x.compatible(y, "axioms_residual")?;
    x.compatible(z, "axioms_residual")?;
    x.compatible(u, "axioms_residual")?;
    x.compatible(v, "axioms_residual")?;
    let (xm, ym, zm, um, vm) = (x.matrix(), y.matrix(), z.matrix(), u.matrix(), v.matrix());
    let sym = product(&xm, &ym, &zm) - product(&ym, &xm, &zm);
    let cyc = product(&xm, &ym, &zm) + product(&zm, &xm, &ym) + product(&ym, &zm, &xm);
    let inner = product(&xm, &ym, &zm);
    let der = product(&um, &vm, &inner)
        - product(&product(&um, &vm, &xm), &ym, &zm)
        - product(&xm, &product(&um, &vm, &ym), &zm)
        - product(&xm, &ym, &product(&um, &vm, &zm));
    Ok([sym.norm(), cyc.norm(), der.norm()])
}

/// Dense operator realising z -> [x, y, z] on the coordinate basis of the
/// ALTS the pair lives in.
#[derive(Debug, Clone)]
pub struct LeftMultOp {
    matrix: CMatrix,
}

fn coordinate_basis(template: &AltsElement) -> Vec<AltsElement> {
    match template {
        AltsElement::Full(m) => {
            let (r, c) = m.shape();
            let mut basis = Vec::with_capacity(r * c);
            for i in 0..r {
                for j in 0..c {
                    let mut e = CMatrix::zeros(r, c);
                    e[(i, j)] = C64::new(1.0, 0.0);
                    basis.push(AltsElement::Full(e));
                }
            }
            basis
        }
        AltsElement::OffDiag(s) => {
            let (n, m) = (s.n(), s.m());
            let mut basis = Vec::with_capacity(2 * n * m);
            for i in 0..n {
                for j in 0..m {
                    let mut a = CMatrix::zeros(n, m);
                    a[(i, j)] = C64::new(1.0, 0.0);
                    basis.push(AltsElement::OffDiag(
                        SuperMatrix::odd(a, CMatrix::zeros(m, n)).expect("consistent"),
                    ));
                }
            }
            for i in 0..m {
                for j in 0..n {
                    let mut b = CMatrix::zeros(m, n);
                    b[(i, j)] = C64::new(1.0, 0.0);
                    basis.push(AltsElement::OffDiag(
                        SuperMatrix::odd(CMatrix::zeros(n, m), b).expect("consistent"),
                    ));
                }
            }
            basis
        }
    }
}

fn coordinates(e: &AltsElement) -> Vec<C64> {
    match e {
        AltsElement::Full(m) => {
            let (r, c) = m.shape();
            let mut v = Vec::with_capacity(r * c);
            for i in 0..r {
                for j in 0..c {
                    v.push(m[(i, j)]);
                }
            }
            v
        }
        AltsElement::OffDiag(s) => {
            let mut v = Vec::with_capacity(2 * s.n() * s.m());
            for i in 0..s.n() {
                for j in 0..s.m() {
                    v.push(s.block_a()[(i, j)]);
                }
            }
            for i in 0..s.m() {
                for j in 0..s.n() {
                    v.push(s.block_b()[(i, j)]);
                }
            }
            v
        }
    }
}

impl LeftMultOp {
    pub fn new(x: &AltsElement, y: &AltsElement) -> Result<Self> {
        x.compatible(y, "LeftMultOp")?;
        let basis = coordinate_basis(x);
        let dim = basis.len();
        let mut matrix = CMatrix::zeros(dim, dim);
        for (j, e) in basis.iter().enumerate() {
            let image = triple(x, y, e)?;
            for (i, coord) in coordinates(&image).into_iter().enumerate() {
                matrix[(i, j)] = coord;
            }
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, z: &AltsElement) -> Result<AltsElement> {
        let coords = nalgebra::DVector::from_vec(coordinates(z));
        let image = &self.matrix * coords;
        let basis = coordinate_basis(z);
        let shape = z.matrix().shape();
        let mut acc = CMatrix::zeros(shape.0, shape.1);
        for (i, e) in basis.iter().enumerate() {
            acc += e.matrix() * image[i];
        }
        z.rewrap(acc)
    }
}

/// Defect of [L(u,v), L(x,y)] = L([u,v,x], y) + L(x, [u,v,y]) as operators.
pub fn left_mult_identity_residual(
    u: &AltsElement,
    v: &AltsElement,
    x: &AltsElement,
    y: &AltsElement,
) -> Result<f64> {
    let luv = LeftMultOp::new(u, v)?;
    let lxy = LeftMultOp::new(x, y)?;
    let uvx = triple(u, v, x)?;
    let uvy = triple(u, v, y)?;
    let lhs = matkit::commutator(luv.matrix(), lxy.matrix())?;
    let rhs = LeftMultOp::new(&uvx, y)?.matrix().clone() + LeftMultOp::new(x, &uvy)?.matrix();
    Ok((lhs - rhs).norm())
}

/// Agreement of the triple product with the double superbracket [[x,y],z],
/// plus the left-multiplication operator identity instantiated on the pairs
/// (x,y) and (y,z).
///
/// Full k x k elements go through the diagonal embedding x -> (A,B) = (x,x)
/// into the odd part of gl(k|k), under which the double bracket reproduces
/// the matrix triple product blockwise.
pub fn superalgebra_consistency(x: &AltsElement, y: &AltsElement, z: &AltsElement) -> Result<f64> {
    let direct = triple(x, y, z)?;
    let bracket_defect = match (x, y, z) {
        (AltsElement::OffDiag(xs), AltsElement::OffDiag(ys), AltsElement::OffDiag(zs)) => {
            let double = superbracket(&superbracket(xs, ys)?, zs)?.to_full();
            (direct.matrix() - double).norm()
        }
        _ => {
            let lift = |e: &AltsElement| SuperMatrix::odd(e.matrix(), e.matrix());
            let xe = lift(x)?;
            let ye = lift(y)?;
            let ze = lift(z)?;
            let double = superbracket(&superbracket(&xe, &ye)?, &ze)?;
            (direct.matrix() - double.block_a()).norm()
        }
    };
    let operator_defect = left_mult_identity_residual(x, y, y, z)?;
    Ok(bracket_defect.max(operator_defect))
}

/// Right-hand side of the triple-product flow: 1/2 [J(C), C, C].
///
/// Decoded to blocks this is exactly the BHT flow on (A, B).
pub fn jccc_rhs_odd(c: &SuperMatrix) -> SuperMatrix {
    let jc = j_map(c);
    let full = triple_matrices(&jc.to_full(), &c.to_full(), &c.to_full()) * C64::new(0.5, 0.0);
    SuperMatrix::from_full(c.n(), c.m(), &full).expect("same size")
}

/// [`jccc_rhs_odd`] on wrapped elements; defined only on the off-diagonal
/// ALTS because it needs the quaternionic J.
pub fn jccc_rhs(c: &AltsElement) -> Result<AltsElement> {
    match c {
        AltsElement::OffDiag(s) => Ok(AltsElement::OffDiag(jccc_rhs_odd(s))),
        AltsElement::Full(_) => Err(Error::NotStructured {
            property: "off-diagonal (the flow needs the quaternionic J)",
            deviation: f64::NAN,
        }),
    }
}

/// Symmetric-pair split of an even element into the +1 and -1 eigenspaces of
/// J. Both projections are exact because J is an exact involution there.
#[derive(Debug, Clone)]
pub struct KMSplit {
    pub k_part: SuperMatrix,
    pub m_part: SuperMatrix,
}

pub fn km_split(x: &SuperMatrix) -> Result<KMSplit> {
    if !x.is_even() {
        return Err(Error::NotStructured {
            property: "even (zero off-diagonal blocks)",
            deviation: x.odd_part().norm(),
        });
    }
    let jx = j_map(x);
    let half = C64::new(0.5, 0.0);
    Ok(KMSplit {
        k_part: (x + &jx).scale(half),
        m_part: (x - &jx).scale(half),
    })
}

fn require_off_diag<'a>(c: &'a AltsElement, op: &'static str) -> Result<&'a SuperMatrix> {
    match c {
        AltsElement::OffDiag(s) => Ok(s),
        AltsElement::Full(_) => Err(Error::DimensionMismatch {
            op,
            details: "needs an off-diagonal element".into(),
        }),
    }
}

/// The anti-Hermitian triple attached to an odd element:
///
/// ```text
/// T1 = -i/2 [C, J(C)]    T2 = 1/2 [C,C]_K    T3 = -i/2 [C,C]_M
/// ```
///
/// all valued in K (blockwise anti-Hermitian), together with alpha = i T1 =
/// 1/2 [C, J(C)] and beta = T2 + i T3 = 1/2 [C,C]. Along the triple-product
/// flow these satisfy Nahm's equations.
pub fn nahm_triple_from(c: &AltsElement) -> Result<NahmTriple> {
    let s = require_off_diag(c, "nahm_triple_from")?;
    let (t1, t2, t3) = nahm_parts(s)?;
    NahmTriple::new(t1.to_full(), t2.to_full(), t3.to_full())
}

fn nahm_parts(s: &SuperMatrix) -> Result<(SuperMatrix, SuperMatrix, SuperMatrix)> {
    let half_i_neg = C64::new(0.0, -0.5);
    let cjc = superbracket(s, &j_map(s))?;
    let cc = superbracket(s, s)?;
    let split = km_split(&cc)?;
    let t1 = cjc.scale(half_i_neg);
    let t2 = split.k_part.scale(C64::new(0.5, 0.0));
    let t3 = split.m_part.scale(half_i_neg);
    Ok((t1, t2, t3))
}

/// Choice of constant c in the Nahm-Schmid system
/// R1' = c [R2,R3], R2' = c [R1,R3], R3' = c [R1,R2].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchmidConvention {
    Half,
    Unit,
}

impl SchmidConvention {
    pub fn factor(self) -> f64 {
        match self {
            SchmidConvention::Half => 0.5,
            SchmidConvention::Unit => 1.0,
        }
    }
}

/// The convention the derivative oracle singles out: c = 1.
pub const RESOLVED_SCHMID_CONVENTION: SchmidConvention = SchmidConvention::Unit;

/// The symmetric-pair triple R1 = 1/2 [C,J(C)] in M, R2 = 1/2 [C,C]_K,
/// R3 = 1/2 [C,C]_M.
#[derive(Debug, Clone)]
pub struct SchmidTriple {
    pub r1: SuperMatrix,
    pub r2: SuperMatrix,
    pub r3: SuperMatrix,
}

pub fn schmid_triple(c: &AltsElement) -> Result<SchmidTriple> {
    let s = require_off_diag(c, "schmid_triple")?;
    let half = C64::new(0.5, 0.0);
    let cjc = superbracket(s, &j_map(s))?;
    let split = km_split(&superbracket(s, s)?)?;
    Ok(SchmidTriple {
        r1: cjc.scale(half),
        r2: split.k_part.scale(half),
        r3: split.m_part.scale(half),
    })
}

/// Residuals of the Nahm-Schmid equations along the triple-product flow,
/// with chain-rule derivatives computed symbolically via bilinearity
/// (no numerical differentiation).
pub fn nahm_schmid_residual(c: &AltsElement, convention: SchmidConvention) -> Result<[f64; 3]> {
    let s = require_off_diag(c, "nahm_schmid_residual")?;
    let half = C64::new(0.5, 0.0);
    let triple = schmid_triple(c)?;
    let cdot = jccc_rhs_odd(s);
    // d[C,J(C)] = [Cdot, J(C)] + [C, J(Cdot)]; d[C,C] = 2 [Cdot, C]
    let d_cjc = &superbracket(&cdot, &j_map(s))? + &superbracket(s, &j_map(&cdot))?;
    let d_cc = superbracket(&cdot, s)?.scale(C64::new(2.0, 0.0));
    let d_split = km_split(&d_cc)?;
    let r1_dot = d_cjc.scale(half);
    let r2_dot = d_split.k_part.scale(half);
    let r3_dot = d_split.m_part.scale(half);

    let f = C64::new(convention.factor(), 0.0);
    let com = |a: &SuperMatrix, b: &SuperMatrix| -> Result<SuperMatrix> {
        // K and M are even, so the superbracket is the plain commutator here
        superbracket(a, b)
    };
    let res1 = (&r1_dot - &com(&triple.r2, &triple.r3)?.scale(f)).norm();
    let res2 = (&r2_dot - &com(&triple.r1, &triple.r3)?.scale(f)).norm();
    let res3 = (&r3_dot - &com(&triple.r1, &triple.r2)?.scale(f)).norm();
    Ok([res1, res2, res3])
}
