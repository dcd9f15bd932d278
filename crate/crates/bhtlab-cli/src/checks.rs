//! The `check` subcommand: residual suites over seeded random ensembles.
//!
//! Every check reduces to a single max residual across all sizes and trials,
//! printed on stderr as one line; stdout carries one JSON summary line. The
//! exit code is 1 as soon as any residual exceeds its tolerance.

use bhtlab::alts::{
    axioms_residual_with, jccc_rhs_odd, nahm_schmid_residual, nahm_triple_from,
    superalgebra_consistency, triple_matrices, triple_matrices_corrupted, AltsElement,
    SchmidConvention,
};
use bhtlab::flows::{
    bht_rhs, chain_rule_residuals, gap_trace_formula, gauge_bht_rhs, gradient_check, holo_rhs,
    moments,
};
use bhtlab::matkit::{self, PolyMatrix};
use bhtlab::random::{
    random_anti_hermitian, random_bht_state, random_cmatrix, random_even, random_holo_state,
    random_odd, random_unitary, rng_from_seed, RNG_SPEC,
};
use bhtlab::spectral::{
    build_lax, char_poly_polymatrix, g0_conjugation_defect, lax_residual, pencil_from_state,
    regularity_at, solve_n, tau_and_square_check, PencilPoint,
};
use bhtlab::superalg::{
    j_map, orbit_gradient_check, pairing, pairing_block_formula, superbracket, supertrace,
    SuperMatrix,
};
use bhtlab::{CMatrix, C64};
use clap::{Args, ValueEnum};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Algebra,
    Flows,
    Spectral,
    All,
}

impl SuiteArg {
    fn name(self) -> &'static str {
        match self {
            SuiteArg::Algebra => "algebra",
            SuiteArg::Flows => "flows",
            SuiteArg::Spectral => "spectral",
            SuiteArg::All => "all",
        }
    }
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    /// Random instances per size per check.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Seed; falls back to BHTLAB_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides every check's default tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Negative control: flips a sign in the triple product; the algebra
    /// suite must then fail.
    #[arg(long, default_value_t = false)]
    pub corrupt: bool,
}

const SIZES: [(usize, usize); 5] = [(1, 1), (2, 1), (2, 2), (3, 2), (4, 3)];

struct Outcome {
    name: &'static str,
    residual: f64,
    tol: f64,
}

struct Recorder {
    outcomes: Vec<Outcome>,
}

impl Recorder {
    fn new() -> Self {
        Self {
            outcomes: Vec::new(),
        }
    }

    fn record(&mut self, name: &'static str, tol: f64, residual: f64) {
        match self.outcomes.iter_mut().find(|o| o.name == name) {
            Some(o) => o.residual = o.residual.max(residual),
            None => self.outcomes.push(Outcome {
                name,
                residual,
                tol,
            }),
        }
    }
}

fn unit_full<R: Rng>(rng: &mut R, k: usize) -> CMatrix {
    let g = random_cmatrix(rng, k, k);
    let n = g.norm();
    if n == 0.0 {
        g
    } else {
        g / C64::new(n, 0.0)
    }
}

fn homogeneous<R: Rng>(rng: &mut R, n: usize, m: usize) -> SuperMatrix {
    if rng.gen_bool(0.5) {
        random_odd(rng, n, m)
    } else {
        random_even(rng, n, m)
    }
}

fn algebra_suite<R: Rng>(rng: &mut R, trials: usize, corrupt: bool, rec: &mut Recorder) {
    let product = if corrupt {
        triple_matrices_corrupted
    } else {
        triple_matrices
    };
    for &(n, m) in &SIZES {
        for _ in 0..trials {
            // ALTS axioms on the off-diagonal instance and a full instance
            let off: Vec<AltsElement> = (0..5)
                .map(|_| AltsElement::OffDiag(random_odd(rng, n, m)))
                .collect();
            let [sym, cyc, der] =
                axioms_residual_with(product, &off[0], &off[1], &off[2], &off[3], &off[4])
                    .expect("compatible inputs");
            rec.record("algebra/alts-symmetry", 1e-12, sym);
            rec.record("algebra/alts-cyclic", 1e-12, cyc);
            rec.record("algebra/alts-derivation", 1e-12, der);

            let k = (n + m).min(4);
            let full: Vec<AltsElement> = (0..5)
                .map(|_| AltsElement::Full(unit_full(rng, k)))
                .collect();
            let [sym, cyc, der] =
                axioms_residual_with(product, &full[0], &full[1], &full[2], &full[3], &full[4])
                    .expect("compatible inputs");
            rec.record("algebra/alts-symmetry", 1e-12, sym);
            rec.record("algebra/alts-cyclic", 1e-12, cyc);
            rec.record("algebra/alts-derivation", 1e-12, der);

            rec.record(
                "algebra/triple-vs-double-bracket",
                1e-12,
                superalgebra_consistency(&off[0], &off[1], &off[2]).expect("compatible"),
            );
            rec.record(
                "algebra/left-mult-identity",
                1e-12,
                bhtlab::alts::left_mult_identity_residual(&full[0], &full[1], &full[2], &full[3])
                    .expect("compatible"),
            );

            // graded Jacobi on homogeneous triples
            let x = homogeneous(rng, n, m);
            let y = homogeneous(rng, n, m);
            let z = homogeneous(rng, n, m);
            let sgn = |p: usize| C64::new(if p % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
            let (px, py, pz) = (
                x.is_odd() as usize,
                y.is_odd() as usize,
                z.is_odd() as usize,
            );
            let jac = &(&superbracket(&x, &superbracket(&y, &z).unwrap())
                .unwrap()
                .scale(sgn(px * pz))
                + &superbracket(&y, &superbracket(&z, &x).unwrap())
                    .unwrap()
                    .scale(sgn(py * px)))
                + &superbracket(&z, &superbracket(&x, &y).unwrap())
                    .unwrap()
                    .scale(sgn(pz * py));
            rec.record("algebra/super-jacobi", 1e-12, jac.norm());

            // ad-invariance of the supertrace
            let sign = if x.is_odd() && y.is_odd() { -1.0 } else { 1.0 };
            let p1 = superbracket(&x, &y).unwrap().to_full() * z.to_full();
            let p2 = y.to_full() * superbracket(&x, &z).unwrap().to_full();
            let s1 = supertrace(&SuperMatrix::from_full(n, m, &p1).unwrap());
            let s2 = supertrace(&SuperMatrix::from_full(n, m, &p2).unwrap());
            rec.record(
                "algebra/supertrace-ad-invariance",
                1e-12,
                (s1 + C64::new(sign, 0.0) * s2).norm(),
            );

            // J: involution signs, superbracket compatibility, triple compatibility
            let odd = random_odd(rng, n, m);
            let even = random_even(rng, n, m);
            let jj = (&j_map(&j_map(&odd)) + &odd)
                .norm()
                .max((&j_map(&j_map(&even)) - &even).norm());
            rec.record("algebra/j-involution", 1e-12, jj);
            let jb = (&j_map(&superbracket(&x, &y).unwrap())
                - &superbracket(&j_map(&x), &j_map(&y)).unwrap())
                .norm();
            rec.record("algebra/j-superbracket", 1e-12, jb);
            let (a, b, c) = (&odd, &random_odd(rng, n, m), &random_odd(rng, n, m));
            let jt = (j_map(
                &SuperMatrix::from_full(n, m, &product(&a.to_full(), &b.to_full(), &c.to_full()))
                    .unwrap(),
            )
            .to_full()
                - product(
                    &j_map(a).to_full(),
                    &j_map(b).to_full(),
                    &j_map(c).to_full(),
                ))
            .norm();
            rec.record("algebra/j-triple", 1e-12, jt);

            // pairing: symmetry, block formula, positivity on the odd part
            rec.record(
                "algebra/pairing-symmetry",
                1e-12,
                (pairing(&x, &y) - pairing(&y, &x)).abs(),
            );
            rec.record(
                "algebra/pairing-block-formula",
                1e-12,
                (pairing(&x, &y) - pairing_block_formula(&x, &y)).abs(),
            );
            let frob2 = odd.block_a().norm_squared() + odd.block_b().norm_squared();
            rec.record(
                "algebra/pairing-odd-norm",
                1e-12,
                (pairing(&odd, &odd) - frob2).abs(),
            );

            // exact g0-conjugation flip of odd elements
            let kk = n + m;
            let mut g0 = CMatrix::identity(kk, kk);
            for i in n..kk {
                g0[(i, i)] = C64::new(-1.0, 0.0);
            }
            let fullm = odd.to_full();
            rec.record(
                "algebra/g0-conjugation",
                1e-15,
                matkit::max_abs(&(&g0 * &fullm * &g0 + fullm)),
            );
        }
    }
}

fn flows_suite<R: Rng>(rng: &mut R, trials: usize, rec: &mut Recorder) {
    for &(n, m) in &SIZES {
        let mut ratios = Vec::new();
        for _ in 0..trials {
            let s = random_bht_state(rng, n, m);

            // one flow, three formulations
            let direct = bht_rhs(&s);
            let c = SuperMatrix::odd(s.a.clone(), s.b.clone()).unwrap();
            let sjc = superbracket(&superbracket(&j_map(&c), &c).unwrap(), &c)
                .unwrap()
                .scale(C64::new(0.5, 0.0));
            let triple = jccc_rhs_odd(&c);
            let direct_full = SuperMatrix::odd(direct.a.clone(), direct.b.clone())
                .unwrap()
                .to_full();
            let scale = direct_full.norm().max(sjc.norm()).max(triple.norm());
            let diff = (&direct_full - sjc.to_full())
                .norm()
                .max((&direct_full - triple.to_full()).norm());
            // fixed points (n = m = 1) leave nothing to compare relatively
            let rel = if scale < 1e-14 { diff } else { diff / scale };
            rec.record("flows/formulation-equivalence", 1e-13, rel);

            rec.record(
                "flows/chain-rule",
                1e-12,
                chain_rule_residuals(&s).into_iter().fold(0.0, f64::max),
            );

            let md = moments(&s);
            let trace = gap_trace_formula(&s);
            let gap_defect = md
                .gaps
                .iter()
                .map(|g| (g - md.gaps[0]).abs().max((g - trace.re).abs()))
                .fold(trace.im.abs(), f64::max);
            rec.record("flows/gap-identities", 1e-12, gap_defect);
            let herm = (&md.i_mu1 - md.i_mu1.adjoint())
                .norm()
                .max((&md.i_nu1 - md.i_nu1.adjoint()).norm());
            rec.record("flows/moment-hermiticity", 1e-12, herm);

            let (cos, ratio) = gradient_check(&s, 1e-5);
            rec.record("flows/gradient-cosine", 1e-8, 1.0 - cos);
            if ratio.is_finite() {
                ratios.push(ratio);
            }

            // gauge: reduction at u = v = 0 and equivariance under constant gauge
            let zero_u = CMatrix::zeros(n, n);
            let zero_v = CMatrix::zeros(m, m);
            let reduced = gauge_bht_rhs(&s, &zero_u, &zero_v).unwrap();
            rec.record(
                "flows/gauge-reduction",
                1e-15,
                (&reduced.a - &direct.a).norm() + (&reduced.b - &direct.b).norm(),
            );
            let u = random_anti_hermitian(rng, n);
            let v = random_anti_hermitian(rng, m);
            let g = random_unitary(rng, n);
            let h = random_unitary(rng, m);
            let (ts, tu, tv) = bhtlab::flows::gauge_transform(
                &s,
                &g,
                &h,
                &u,
                &v,
                &CMatrix::zeros(n, n),
                &CMatrix::zeros(m, m),
            )
            .unwrap();
            let transformed = gauge_bht_rhs(&ts, &tu, &tv).unwrap();
            let original = gauge_bht_rhs(&s, &u, &v).unwrap();
            let equivariance = (&transformed.a - &g * &original.a * h.adjoint())
                .norm()
                .max((&transformed.b - &h * &original.b * g.adjoint()).norm());
            rec.record("flows/gauge-equivariance", 1e-12, equivariance);

            // reality embedding intertwines the flows
            let hstate = bhtlab::flows::reality_embed(&s);
            let tangent = holo_rhs(&hstate);
            let reality = (&tangent.a0 - &direct.a)
                .norm()
                .max((&tangent.b0 - &direct.b).norm())
                .max((&tangent.a1 + direct.b.adjoint()).norm())
                .max((&tangent.b1 - direct.a.adjoint()).norm());
            rec.record("flows/reality-tangent", 1e-14, reality);

            // Nahm extraction from the triple system, with symbolic derivatives
            let elem = AltsElement::OffDiag(c.clone());
            let tri = nahm_triple_from(&elem).unwrap();
            let cdot = jccc_rhs_odd(&c);

            // alpha-dot = i [T2, T3], beta-dot = [alpha, beta]
            let jc = j_map(&c);
            let jcdot = j_map(&cdot);
            let d_cjc = &superbracket(&cdot, &jc).unwrap() + &superbracket(&c, &jcdot).unwrap();
            let d_cc = superbracket(&cdot, &c).unwrap().scale(C64::new(2.0, 0.0));
            let d_alpha = d_cjc.scale(C64::new(0.5, 0.0)).to_full();
            let d_beta = d_cc.scale(C64::new(0.5, 0.0)).to_full();
            let com = |p: &CMatrix, q: &CMatrix| p * q - q * p;
            let nahm_defect = (&d_alpha - com(&tri.t2, &tri.t3) * C64::new(0.0, 1.0))
                .norm()
                .max((&d_beta - com(&tri.alpha, &tri.beta)).norm());
            rec.record("flows/alts-nahm-extraction", 1e-12, nahm_defect);
            let in_k = [&tri.t1, &tri.t2, &tri.t3]
                .iter()
                .map(|t| {
                    let sm = SuperMatrix::from_full(n, m, t).unwrap();
                    (&j_map(&sm) - &sm).norm()
                })
                .fold(0.0, f64::max);
            rec.record("flows/alts-nahm-extraction", 1e-12, in_k);

            rec.record(
                "flows/nahm-schmid-unit",
                1e-10,
                nahm_schmid_residual(&elem, SchmidConvention::Unit)
                    .unwrap()
                    .into_iter()
                    .fold(0.0, f64::max),
            );

            rec.record("flows/orbit-gradient", 1e-10, orbit_gradient_check(&c));
        }
        if ratios.len() > 1 {
            let mean: f64 = ratios.iter().sum::<f64>() / ratios.len() as f64;
            let spread = ratios
                .iter()
                .map(|r| (r - mean).abs() / mean)
                .fold(0.0, f64::max);
            rec.record("flows/gradient-ratio-spread", 1e-6, spread);
        }
    }
}

fn spectral_suite<R: Rng>(rng: &mut R, trials: usize, rec: &mut Recorder) {
    for &(n, m) in &SIZES {
        for _ in 0..trials {
            let h = random_holo_state(rng, n, m);

            let (rz, rw) = lax_residual(&h);
            rec.record("spectral/lax-residual", 1e-12, rz.max(rw));

            let report = tau_and_square_check(&h).unwrap();
            rec.record("spectral/tau-invariance", 1e-10, report.tau_residual);
            rec.record(
                "spectral/lambda-power",
                0.5,
                (report.lambda_power as f64 - (n - m) as f64).abs(),
            );
            if n == m {
                rec.record(
                    "spectral/square-relation",
                    1e-9,
                    report.square_residual.unwrap(),
                );
                let g1 = report.genus_s.unwrap() as isize - ((n - 1) * (n - 1)) as isize;
                let g2 = report.genus_shat.unwrap() as isize - ((n - 1) * (2 * n - 1)) as isize;
                rec.record(
                    "spectral/genus-formulas",
                    0.5,
                    g1.abs().max(g2.abs()) as f64,
                );

                let lax = build_lax(&h);
                let p_z = char_poly_polymatrix(&lax.z).unwrap();
                let p_w = char_poly_polymatrix(&lax.w).unwrap();
                let mut defect: f64 = 0.0;
                for (&(i, j), &val) in p_z.iter() {
                    defect = defect.max((val - p_w.coeff(i, j)).norm());
                }
                for (&(i, j), &val) in p_w.iter() {
                    defect = defect.max((val - p_z.coeff(i, j)).norm());
                }
                rec.record("spectral/det-xy-vs-yx", 1e-9, defect);
            }

            rec.record(
                "spectral/g0-pencil-conjugation",
                1e-15,
                g0_conjugation_defect(&h),
            );

            // unique-factor recovery and its agreement with -W#
            let x = random_cmatrix(rng, n, m);
            let y = random_cmatrix(rng, m, n);
            let n0 = random_cmatrix(rng, m, m);
            let rec_n = solve_n(&x, &y, &(&x * &n0), &(&n0 * &y)).unwrap();
            rec.record("spectral/solve-n-roundtrip", 1e-10, (rec_n - &n0).norm());

            let lax = build_lax(&h);
            let tangent = holo_rhs(&h);
            let xdot = PolyMatrix::new(vec![tangent.a0, tangent.a1]).unwrap();
            let ydot = PolyMatrix::new(vec![tangent.b0, tangent.b1]).unwrap();
            let mut wsharp_defect: f64 = 0.0;
            for node in matkit::zeta_nodes(3) {
                let xz = lax.x.eval(node);
                let yz = lax.y.eval(node);
                let mz = lax.z_sharp.eval(node);
                let u = xdot.eval(node) - &mz * &xz;
                let v = -(ydot.eval(node)) - &yz * &mz;
                let got = solve_n(&xz, &yz, &u, &v).unwrap();
                wsharp_defect = wsharp_defect.max((got + lax.w_sharp.eval(node)).norm());
            }
            rec.record("spectral/solve-n-wsharp", 1e-9, wsharp_defect);

            // the pencil's characteristic polynomial against direct determinants
            let (c0, c1) = pencil_from_state(&h);
            let phat = bhtlab::spectral::char_poly_pencil(&c0, &c1).unwrap();
            let k = n + m;
            let mut eval_defect: f64 = 0.0;
            for t in 0..3 {
                let z = C64::new(0.4 - 0.3 * t as f64, 0.1 + 0.2 * t as f64);
                let lam = C64::new(-0.2 + 0.3 * t as f64, 0.5 - 0.1 * t as f64);
                let direct =
                    matkit::determinant(&(CMatrix::identity(k, k) * lam - (&c0 + &c1 * z)))
                        .unwrap();
                eval_defect =
                    eval_defect.max((phat.eval(z, lam) - direct).norm() / (1.0 + direct.norm()));
            }
            rec.record("spectral/pencil-eval-oracle", 1e-9, eval_defect);
        }
    }

    // fixed regularity spot checks, independent of trial count
    let diag = PolyMatrix::new(vec![CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(2.0, 0.0),
        ],
    )])
    .unwrap();
    let zero = PolyMatrix::new(vec![CMatrix::zeros(2, 2)]).unwrap();
    let mut jordan = CMatrix::zeros(3, 3);
    jordan[(0, 1)] = C64::new(1.0, 0.0);
    jordan[(1, 2)] = C64::new(1.0, 0.0);
    let jordan = PolyMatrix::new(vec![jordan]).unwrap();
    let at0 = PencilPoint::Finite(C64::new(0.0, 0.0));
    let mut mismatches = 0.0;
    if regularity_at(&diag, at0).unwrap() != (true, 2) {
        mismatches += 1.0;
    }
    if regularity_at(&zero, at0).unwrap() != (false, 4) {
        mismatches += 1.0;
    }
    if regularity_at(&jordan, at0).unwrap() != (true, 3) {
        mismatches += 1.0;
    }
    rec.record("spectral/regularity-spots", 0.5, mismatches);
}

pub fn run(args: CheckArgs) -> i32 {
    let seed = match crate::resolve_seed(args.seed) {
        Ok(s) => s,
        Err(e) => return crate::config_error("check", &e),
    };
    if args.trials < 1 {
        return crate::config_error("check", "trials must be at least 1");
    }

    let mut rng = rng_from_seed(seed);
    let mut rec = Recorder::new();
    if matches!(args.suite, SuiteArg::Algebra | SuiteArg::All) {
        algebra_suite(&mut rng, args.trials, args.corrupt, &mut rec);
    }
    if matches!(args.suite, SuiteArg::Flows | SuiteArg::All) {
        flows_suite(&mut rng, args.trials, &mut rec);
    }
    if matches!(args.suite, SuiteArg::Spectral | SuiteArg::All) {
        spectral_suite(&mut rng, args.trials, &mut rec);
    }

    let mut failures = Vec::new();
    for o in &rec.outcomes {
        let tol = args.tol.unwrap_or(o.tol);
        let pass = o.residual <= tol;
        eprintln!(
            "check {}: max_residual={:.3e} tol={:.0e} {}",
            o.name,
            o.residual,
            tol,
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failures.push(o.name);
        }
    }
    println!(
        "{}",
        serde_json::json!({
            "command": "check", "suite": args.suite.name(), "trials": args.trials,
            "seed": seed, "rng": RNG_SPEC, "checks": rec.outcomes.len(),
            "failures": failures.len(),
            "failed": failures,
            "status": if failures.is_empty() { "ok" } else { "fail" },
        })
    );
    if failures.is_empty() {
        0
    } else {
        1
    }
}
