//! Moment maps, the BHT / Nahm / gauge / holomorphic right-hand sides,
//! fixed-step integration, and the identity checks tying the BHT flow to
//! Nahm's equations.
//!
//! Conventions: i mu1 = (A A* - B* B)/2 and mu2 + i mu3 = A B for the first
//! group factor, i nu1 = -(A* A - B B*)/2 and nu2 + i nu3 = -B A for the
//! second; norms are taken with ||X||^2 = -tr X^2 on anti-Hermitian values.
//! The flow ascends F = ||mu1||^2/2 - ||nu1||^2/2, and the raw coordinate
//! gradient of F equals the right-hand side with constant exactly one.

use crate::matkit;
use crate::{CMatrix, Error, Result, C64};

/// Configuration (A, B) of the BHT flow: A is n x m, B is m x n.
#[derive(Debug, Clone, PartialEq)]
pub struct BHTState {
    pub a: CMatrix,
    pub b: CMatrix,
}

impl BHTState {
    pub fn new(a: CMatrix, b: CMatrix) -> Result<Self> {
        if a.nrows() != b.ncols() || a.ncols() != b.nrows() {
            return Err(Error::DimensionMismatch {
                op: "BHTState::new",
                details: format!("A is {:?}, B is {:?}", a.shape(), b.shape()),
            });
        }
        Ok(Self { a, b })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.a.ncols()
    }

    pub fn norm(&self) -> f64 {
        (self.a.norm_squared() + self.b.norm_squared()).sqrt()
    }
}

/// Three anti-Hermitian matrices plus the complex pair alpha = i T1,
/// beta = T2 + i T3 (kept in lockstep by construction).
#[derive(Debug, Clone, PartialEq)]
pub struct NahmTriple {
    pub t1: CMatrix,
    pub t2: CMatrix,
    pub t3: CMatrix,
    pub alpha: CMatrix,
    pub beta: CMatrix,
}

impl NahmTriple {
    pub fn new(t1: CMatrix, t2: CMatrix, t3: CMatrix) -> Result<Self> {
        let k = t1.nrows();
        if t1.shape() != (k, k) || t2.shape() != (k, k) || t3.shape() != (k, k) {
            return Err(Error::DimensionMismatch {
                op: "NahmTriple::new",
                details: format!("{:?}, {:?}, {:?}", t1.shape(), t2.shape(), t3.shape()),
            });
        }
        let i = C64::new(0.0, 1.0);
        let alpha = &t1 * i;
        let beta = &t2 + &t3 * i;
        Ok(Self {
            t1,
            t2,
            t3,
            alpha,
            beta,
        })
    }

    pub fn size(&self) -> usize {
        self.t1.nrows()
    }

    pub fn norm(&self) -> f64 {
        (self.t1.norm_squared() + self.t2.norm_squared() + self.t3.norm_squared()).sqrt()
    }
}

/// Complexified configuration (A0, A1, B0, B1).
#[derive(Debug, Clone, PartialEq)]
pub struct HoloState {
    pub a0: CMatrix,
    pub a1: CMatrix,
    pub b0: CMatrix,
    pub b1: CMatrix,
}

impl HoloState {
    pub fn new(a0: CMatrix, a1: CMatrix, b0: CMatrix, b1: CMatrix) -> Result<Self> {
        let shape_a = a0.shape();
        let shape_b = b0.shape();
        let ok = a1.shape() == shape_a
            && b1.shape() == shape_b
            && shape_a.0 == shape_b.1
            && shape_a.1 == shape_b.0;
        if !ok {
            return Err(Error::DimensionMismatch {
                op: "HoloState::new",
                details: format!(
                    "A0 {:?}, A1 {:?}, B0 {:?}, B1 {:?}",
                    a0.shape(),
                    a1.shape(),
                    b0.shape(),
                    b1.shape()
                ),
            });
        }
        Ok(Self { a0, a1, b0, b1 })
    }

    pub fn n(&self) -> usize {
        self.a0.nrows()
    }

    pub fn m(&self) -> usize {
        self.a0.ncols()
    }

    pub fn norm(&self) -> f64 {
        (self.a0.norm_squared()
            + self.a1.norm_squared()
            + self.b0.norm_squared()
            + self.b1.norm_squared())
        .sqrt()
    }
}

/// Moment-map data of a BHT state.
///
/// `i_mu1` stores i mu1 (Hermitian), `mu23` stores mu2 + i mu3, and likewise
/// for the second factor. `gaps[i]` is ||mu_{i+1}||^2 - ||nu_{i+1}||^2; the
/// three entries agree identically and equal Re tr(A*A BB* - B*B AA*)/2.
#[derive(Debug, Clone)]
pub struct MomentData {
    pub i_mu1: CMatrix,
    pub mu23: CMatrix,
    pub i_nu1: CMatrix,
    pub nu23: CMatrix,
    pub f: f64,
    pub gaps: [f64; 3],
}

/// ||X||^2 = -tr X^2 for anti-Hermitian X, evaluated through its Hermitian
/// proxy H = iX as tr H^2.
fn norm2_from_hermitian(h: &CMatrix) -> f64 {
    (h * h).trace().re
}

fn split_two_three(p: &CMatrix) -> (CMatrix, CMatrix) {
    // p = mu2 + i mu3 with mu2, mu3 anti-Hermitian
    let half = C64::new(0.5, 0.0);
    let mu2 = (p - p.adjoint()) * half;
    let mu3 = (p + p.adjoint()) * C64::new(0.0, -0.5);
    (mu2, mu3)
}

fn norm2_anti_hermitian(x: &CMatrix) -> f64 {
    -(x * x).trace().re
}

pub fn moments(s: &BHTState) -> MomentData {
    let half = C64::new(0.5, 0.0);
    let i_mu1 = (&s.a * s.a.adjoint() - s.b.adjoint() * &s.b) * half;
    let mu23 = &s.a * &s.b;
    let i_nu1 = (s.a.adjoint() * &s.a - &s.b * s.b.adjoint()) * -half;
    let nu23 = -(&s.b * &s.a);

    let mu1_n2 = norm2_from_hermitian(&i_mu1);
    let nu1_n2 = norm2_from_hermitian(&i_nu1);
    let (mu2, mu3) = split_two_three(&mu23);
    let (nu2, nu3) = split_two_three(&nu23);
    let gaps = [
        mu1_n2 - nu1_n2,
        norm2_anti_hermitian(&mu2) - norm2_anti_hermitian(&nu2),
        norm2_anti_hermitian(&mu3) - norm2_anti_hermitian(&nu3),
    ];
    MomentData {
        i_mu1,
        mu23,
        i_nu1,
        nu23,
        f: 0.5 * mu1_n2 - 0.5 * nu1_n2,
        gaps,
    }
}

/// Re tr(A*A BB* - B*B AA*)/2, the common value of all three gaps.
pub fn gap_trace_formula(s: &BHTState) -> C64 {
    let t1 = (s.a.adjoint() * &s.a * &s.b * s.b.adjoint()).trace();
    let t2 = (s.b.adjoint() * &s.b * &s.a * s.a.adjoint()).trace();
    (t1 - t2) * C64::new(0.5, 0.0)
}

/// Adot = (A B B* - B* B A)/2, Bdot = (A* A B - B A A*)/2.
pub fn bht_rhs(s: &BHTState) -> BHTState {
    let half = C64::new(0.5, 0.0);
    let adot = (&s.a * &s.b * s.b.adjoint() - s.b.adjoint() * &s.b * &s.a) * half;
    let bdot = (s.a.adjoint() * &s.a * &s.b - &s.b * &s.a * s.a.adjoint()) * half;
    BHTState { a: adot, b: bdot }
}

/// T1dot = [T2,T3], T2dot = [T3,T1], T3dot = [T1,T2].
pub fn nahm_rhs(t: &NahmTriple) -> NahmTriple {
    let d1 = &t.t2 * &t.t3 - &t.t3 * &t.t2;
    let d2 = &t.t3 * &t.t1 - &t.t1 * &t.t3;
    let d3 = &t.t1 * &t.t2 - &t.t2 * &t.t1;
    NahmTriple::new(d1, d2, d3).expect("sizes preserved")
}

fn ensure_anti_hermitian(x: &CMatrix, what: &'static str) -> Result<()> {
    let deviation = (x + x.adjoint()).norm();
    if deviation > 1e-10 * (1.0 + x.norm()) {
        return Err(Error::NotStructured {
            property: what,
            deviation,
        });
    }
    Ok(())
}

fn ensure_unitary(g: &CMatrix, what: &'static str) -> Result<()> {
    let k = g.nrows();
    let deviation = (g.adjoint() * g - CMatrix::identity(k, k)).norm();
    if deviation > 1e-10 * (k as f64) {
        return Err(Error::NotStructured {
            property: what,
            deviation,
        });
    }
    Ok(())
}

/// Gauge-dependent right-hand side with anti-Hermitian gauge fields u, v:
/// Adot = -uA + Av + (A B B* - B* B A)/2 and the mirrored expression for B.
pub fn gauge_bht_rhs(s: &BHTState, u: &CMatrix, v: &CMatrix) -> Result<BHTState> {
    if u.shape() != (s.n(), s.n()) || v.shape() != (s.m(), s.m()) {
        return Err(Error::DimensionMismatch {
            op: "gauge_bht_rhs",
            details: format!(
                "u {:?}, v {:?} for ({}, {})",
                u.shape(),
                v.shape(),
                s.n(),
                s.m()
            ),
        });
    }
    ensure_anti_hermitian(u, "anti-Hermitian (u)")?;
    ensure_anti_hermitian(v, "anti-Hermitian (v)")?;
    let base = bht_rhs(s);
    Ok(BHTState {
        a: -(u * &s.a) + &s.a * v + base.a,
        b: -(v * &s.b) + &s.b * u + base.b,
    })
}

/// Gauge action: A -> g A h^{-1}, B -> h B g^{-1}, u -> g u g^{-1} - gdot g^{-1},
/// v -> h v h^{-1} - hdot h^{-1}. Unitarity of g, h is required; their
/// inverses are taken as adjoints.
#[allow(clippy::too_many_arguments)]
pub fn gauge_transform(
    s: &BHTState,
    g: &CMatrix,
    h: &CMatrix,
    u: &CMatrix,
    v: &CMatrix,
    gdot: &CMatrix,
    hdot: &CMatrix,
) -> Result<(BHTState, CMatrix, CMatrix)> {
    ensure_unitary(g, "unitary (g)")?;
    ensure_unitary(h, "unitary (h)")?;
    let gi = g.adjoint();
    let hi = h.adjoint();
    let state = BHTState::new(g * &s.a * &hi, h * &s.b * &gi)?;
    let u_new = g * u * &gi - gdot * &gi;
    let v_new = h * v * &hi - hdot * &hi;
    Ok((state, u_new, v_new))
}

/// The four-slot holomorphic flow.
pub fn holo_rhs(h: &HoloState) -> HoloState {
    let half = C64::new(0.5, 0.0);
    HoloState {
        a0: (&h.a1 * &h.b0 * &h.a0 - &h.a0 * &h.b0 * &h.a1) * half,
        a1: (&h.a1 * &h.b1 * &h.a0 - &h.a0 * &h.b1 * &h.a1) * half,
        b0: (&h.b1 * &h.a0 * &h.b0 - &h.b0 * &h.a0 * &h.b1) * half,
        b1: (&h.b1 * &h.a1 * &h.b0 - &h.b0 * &h.a1 * &h.b1) * half,
    }
}

/// Embeds (A, B) under the reality condition A1 = -B0*, B1 = A0*.
pub fn reality_embed(s: &BHTState) -> HoloState {
    HoloState {
        a0: s.a.clone(),
        a1: -s.b.adjoint(),
        b0: s.b.clone(),
        b1: s.a.adjoint(),
    }
}

/// Defects of the Nahm equations for the two encoded triples, with time
/// derivatives expanded through the product rule along the BHT flow.
///
/// Returns [T1, T2, T3, S1, S2, S3] residual norms; each vanishes
/// identically.
pub fn chain_rule_residuals(s: &BHTState) -> [f64; 6] {
    let rhs = bht_rhs(s);
    let (adot, bdot) = (&rhs.a, &rhs.b);
    let half = C64::new(0.5, 0.0);
    let minus_i = C64::new(0.0, -1.0);

    let residuals = |h: CMatrix, dh: CMatrix, p: CMatrix, dp: CMatrix| -> [f64; 3] {
        // h = i T1 (Hermitian), p = T2 + i T3
        let t1 = &h * minus_i;
        let dt1 = &dh * minus_i;
        let (t2, t3) = split_two_three(&p);
        let (dt2, dt3) = split_two_three(&dp);
        let r1 = (&dt1 - &(&t2 * &t3 - &t3 * &t2)).norm();
        let r2 = (&dt2 - &(&t3 * &t1 - &t1 * &t3)).norm();
        let r3 = (&dt3 - &(&t1 * &t2 - &t2 * &t1)).norm();
        [r1, r2, r3]
    };

    let i_t1 = (&s.a * s.a.adjoint() - s.b.adjoint() * &s.b) * half;
    let d_i_t1 = (adot * s.a.adjoint() + &s.a * adot.adjoint()
        - bdot.adjoint() * &s.b
        - s.b.adjoint() * bdot)
        * half;
    let p = &s.a * &s.b;
    let dp = adot * &s.b + &s.a * bdot;
    let t_res = residuals(i_t1, d_i_t1, p, dp);

    let i_s1 = (s.a.adjoint() * &s.a - &s.b * s.b.adjoint()) * half;
    let d_i_s1 = (adot.adjoint() * &s.a + s.a.adjoint() * adot
        - bdot * s.b.adjoint()
        - &s.b * bdot.adjoint())
        * half;
    let q = &s.b * &s.a;
    let dq = bdot * &s.a + &s.b * adot;
    let s_res = residuals(i_s1, d_i_s1, q, dq);

    [t_res[0], t_res[1], t_res[2], s_res[0], s_res[1], s_res[2]]
}

fn state_coordinates(s: &BHTState) -> Vec<f64> {
    let mut v = Vec::with_capacity(4 * s.n() * s.m());
    for i in 0..s.n() {
        for j in 0..s.m() {
            v.push(s.a[(i, j)].re);
            v.push(s.a[(i, j)].im);
        }
    }
    for i in 0..s.m() {
        for j in 0..s.n() {
            v.push(s.b[(i, j)].re);
            v.push(s.b[(i, j)].im);
        }
    }
    v
}

fn state_from_coordinates(n: usize, m: usize, coords: &[f64]) -> BHTState {
    let mut a = CMatrix::zeros(n, m);
    let mut b = CMatrix::zeros(m, n);
    let mut it = coords.iter();
    for i in 0..n {
        for j in 0..m {
            let re = *it.next().expect("coordinate count");
            let im = *it.next().expect("coordinate count");
            a[(i, j)] = C64::new(re, im);
        }
    }
    for i in 0..m {
        for j in 0..n {
            let re = *it.next().expect("coordinate count");
            let im = *it.next().expect("coordinate count");
            b[(i, j)] = C64::new(re, im);
        }
    }
    BHTState { a, b }
}

/// Central finite differences of F over all real coordinates, compared with
/// the flow's right-hand side. Returns (cosine, ratio of norms).
///
/// For the zero state both vectors vanish; the cosine is 1 by convention and
/// the ratio is NaN (undefined).
pub fn gradient_check(s: &BHTState, h: f64) -> (f64, f64) {
    assert!((1e-7..=1e-3).contains(&h), "step size outside [1e-7, 1e-3]");
    let (n, m) = (s.n(), s.m());
    let base = state_coordinates(s);
    let mut grad = Vec::with_capacity(base.len());
    for idx in 0..base.len() {
        let mut plus = base.clone();
        plus[idx] += h;
        let mut minus = base.clone();
        minus[idx] -= h;
        let fp = moments(&state_from_coordinates(n, m, &plus)).f;
        let fm = moments(&state_from_coordinates(n, m, &minus)).f;
        grad.push((fp - fm) / (2.0 * h));
    }
    let rhs = state_coordinates(&bht_rhs(s));
    let dot: f64 = grad.iter().zip(&rhs).map(|(a, b)| a * b).sum();
    let ng = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nr = rhs.iter().map(|x| x * x).sum::<f64>().sqrt();
    if ng == 0.0 || nr == 0.0 {
        return (1.0, f64::NAN);
    }
    (dot / (ng * nr), ng / nr)
}

/// Anything the fixed-step integrators can march: affine updates plus a
/// finiteness probe for blow-up detection.
pub trait FlowVector: Clone {
    /// self + coeff * delta.
    fn add_scaled(&self, coeff: f64, delta: &Self) -> Self;
    fn all_finite(&self) -> bool;
}

impl FlowVector for BHTState {
    fn add_scaled(&self, coeff: f64, delta: &Self) -> Self {
        let c = C64::new(coeff, 0.0);
        BHTState {
            a: &self.a + &delta.a * c,
            b: &self.b + &delta.b * c,
        }
    }

    fn all_finite(&self) -> bool {
        matkit::is_finite(&self.a) && matkit::is_finite(&self.b)
    }
}

impl FlowVector for HoloState {
    fn add_scaled(&self, coeff: f64, delta: &Self) -> Self {
        let c = C64::new(coeff, 0.0);
        HoloState {
            a0: &self.a0 + &delta.a0 * c,
            a1: &self.a1 + &delta.a1 * c,
            b0: &self.b0 + &delta.b0 * c,
            b1: &self.b1 + &delta.b1 * c,
        }
    }

    fn all_finite(&self) -> bool {
        matkit::is_finite(&self.a0)
            && matkit::is_finite(&self.a1)
            && matkit::is_finite(&self.b0)
            && matkit::is_finite(&self.b1)
    }
}

impl FlowVector for NahmTriple {
    fn add_scaled(&self, coeff: f64, delta: &Self) -> Self {
        let c = C64::new(coeff, 0.0);
        NahmTriple::new(
            &self.t1 + &delta.t1 * c,
            &self.t2 + &delta.t2 * c,
            &self.t3 + &delta.t3 * c,
        )
        .expect("sizes preserved")
    }

    fn all_finite(&self) -> bool {
        matkit::is_finite(&self.t1) && matkit::is_finite(&self.t2) && matkit::is_finite(&self.t3)
    }
}

impl FlowVector for crate::superalg::SuperMatrix {
    fn add_scaled(&self, coeff: f64, delta: &Self) -> Self {
        self + &delta.scale(C64::new(coeff, 0.0))
    }

    fn all_finite(&self) -> bool {
        matkit::is_finite(&self.to_full())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Euler,
    Rk4,
}

/// Fixed-step explicit integration of ydot = rhs(y) from t = 0 to t_end.
///
/// The trajectory always contains t = 0 and the final time; intermediate
/// steps are kept every `stride` steps. A trailing partial step is taken when
/// dt does not divide t_end. Blow-up (any non-finite entry) aborts with the
/// last finite time.
pub fn integrate<S, F>(
    rhs: F,
    initial: S,
    t_end: f64,
    dt: f64,
    method: Method,
    stride: usize,
) -> Result<Vec<(f64, S)>>
where
    S: FlowVector,
    F: Fn(&S) -> S,
{
    assert!(dt > 0.0, "dt must be positive");
    assert!(t_end >= 0.0, "t_end must be nonnegative");
    assert!(stride >= 1, "stride must be at least 1");

    let n_full = (t_end / dt + 1e-9).floor() as usize;
    let remainder = t_end - n_full as f64 * dt;
    let partial = remainder > 1e-9 * dt;

    let step = |y: &S, h: f64| -> S {
        match method {
            Method::Euler => {
                let k1 = rhs(y);
                y.add_scaled(h, &k1)
            }
            Method::Rk4 => {
                let k1 = rhs(y);
                let k2 = rhs(&y.add_scaled(h / 2.0, &k1));
                let k3 = rhs(&y.add_scaled(h / 2.0, &k2));
                let k4 = rhs(&y.add_scaled(h, &k3));
                y.add_scaled(h / 6.0, &k1)
                    .add_scaled(h / 3.0, &k2)
                    .add_scaled(h / 3.0, &k3)
                    .add_scaled(h / 6.0, &k4)
            }
        }
    };

    let mut out = Vec::new();
    let mut y = initial;
    out.push((0.0, y.clone()));
    let mut last_t = 0.0;
    for i in 1..=n_full {
        y = step(&y, dt);
        let t = i as f64 * dt;
        if !y.all_finite() {
            return Err(Error::BlowUp { last_t });
        }
        last_t = t;
        if i % stride == 0 || (i == n_full && !partial) {
            out.push((t, y.clone()));
        }
    }
    if partial {
        y = step(&y, remainder);
        if !y.all_finite() {
            return Err(Error::BlowUp { last_t });
        }
        out.push((t_end, y.clone()));
    }
    Ok(out)
}
