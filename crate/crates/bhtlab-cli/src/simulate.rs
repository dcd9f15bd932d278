//! The `simulate` subcommand: seeded initial state, fixed-step integration,
//! trajectory JSON plus an invariant time-series CSV.

use std::fmt::Write as _;
use std::path::PathBuf;

use bhtlab::alts::{jccc_rhs_odd, nahm_schmid_residual, AltsElement, SchmidConvention};
use bhtlab::flows::{
    bht_rhs, chain_rule_residuals, gauge_bht_rhs, holo_rhs, integrate, moments, nahm_rhs, BHTState,
    Method,
};
use bhtlab::matkit;
use bhtlab::random::{
    random_anti_hermitian, random_bht_state, random_holo_state, random_nahm_triple, rng_from_seed,
    RNG_SPEC,
};
use bhtlab::superalg::SuperMatrix;
use clap::{Args, ValueEnum};

use crate::io::{
    self, csv_path, GaugeJson, SampleJson, StateJson, TrajectoryFile, TRAJECTORY_FORMAT,
};
use crate::{config_error, resolve_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemArg {
    Bht,
    Nahm,
    Holo,
    #[value(alias = "alts_jccc")]
    AltsJccc,
    #[value(alias = "gauge_bht")]
    GaugeBht,
    #[value(alias = "nahm_schmid_check")]
    NahmSchmidCheck,
}

impl SystemArg {
    pub fn name(self) -> &'static str {
        match self {
            SystemArg::Bht => "bht",
            SystemArg::Nahm => "nahm",
            SystemArg::Holo => "holo",
            SystemArg::AltsJccc => "alts_jccc",
            SystemArg::GaugeBht => "gauge_bht",
            SystemArg::NahmSchmidCheck => "nahm_schmid_check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Euler,
    Rk4,
}

impl MethodArg {
    fn to_method(self) -> Method {
        match self {
            MethodArg::Euler => Method::Euler,
            MethodArg::Rk4 => Method::Rk4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            MethodArg::Euler => "euler",
            MethodArg::Rk4 => "rk4",
        }
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Flow to integrate.
    #[arg(long, value_enum)]
    pub system: SystemArg,
    /// First block size (matrix size for --system nahm).
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Second block size (ignored by --system nahm).
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Seed; falls back to BHTLAB_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "t-end", default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Rk4)]
    pub method: MethodArg,
    /// Keep every stride-th step in the outputs.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Trajectory JSON path; the invariant CSV lands next to it.
    #[arg(long)]
    pub out: PathBuf,
}

struct CsvRow {
    t: f64,
    f: Option<f64>,
    gap: Option<f64>,
    nahm_residual_max: Option<f64>,
    spectral_drift: Option<f64>,
}

fn bht_rows(
    samples: &[(f64, BHTState)],
    residual: impl Fn(&BHTState) -> Option<f64>,
) -> Vec<CsvRow> {
    let base = bhtlab::spectral::pencil_coefficients(&samples[0].1).ok();
    samples
        .iter()
        .map(|(t, s)| {
            let md = moments(s);
            let drift = base.as_ref().and_then(|b| {
                bhtlab::spectral::pencil_coefficients(s)
                    .ok()
                    .map(|cur| bhtlab::spectral::coefficient_drift(b, &cur))
            });
            CsvRow {
                t: *t,
                f: Some(md.f),
                gap: Some(md.gaps[0]),
                nahm_residual_max: residual(s),
                spectral_drift: drift,
            }
        })
        .collect()
}

pub fn run(args: SimulateArgs) -> i32 {
    let seed = match resolve_seed(args.seed) {
        Ok(s) => s,
        Err(e) => return config_error("simulate", &e),
    };
    if args.n < 1 || args.m < 1 {
        return config_error("simulate", "n and m must be at least 1");
    }
    if args.system != SystemArg::Nahm && args.n < args.m {
        return config_error("simulate", "rank assumptions need n >= m");
    }
    if !args.dt.is_finite() || args.dt <= 0.0 {
        return config_error("simulate", "dt must be positive");
    }
    if !args.t_end.is_finite() || args.t_end < 0.0 {
        return config_error("simulate", "t-end must be nonnegative");
    }
    if args.stride < 1 {
        return config_error("simulate", "stride must be at least 1");
    }

    let mut rng = rng_from_seed(seed);
    let (n, m) = (args.n, args.m);
    let method = args.method.to_method();

    // integrate and collect serialized samples plus the invariant rows
    let mut gauge = None;
    let outcome: Result<(Vec<SampleJson>, Vec<CsvRow>), bhtlab::Error> = match args.system {
        SystemArg::Bht => {
            let s0 = random_bht_state(&mut rng, n, m);
            integrate(bht_rhs, s0, args.t_end, args.dt, method, args.stride).map(|traj| {
                let rows = bht_rows(&traj, |s| {
                    Some(chain_rule_residuals(s).into_iter().fold(0.0, f64::max))
                });
                let samples = traj
                    .iter()
                    .map(|(t, s)| SampleJson {
                        t: *t,
                        state: StateJson::from_bht(s),
                    })
                    .collect();
                (samples, rows)
            })
        }
        SystemArg::AltsJccc | SystemArg::NahmSchmidCheck => {
            let s0 = random_bht_state(&mut rng, n, m);
            let rhs = |s: &BHTState| {
                let c = SuperMatrix::odd(s.a.clone(), s.b.clone()).expect("state shapes");
                let dot = jccc_rhs_odd(&c);
                BHTState::new(dot.block_a().clone(), dot.block_b().clone())
                    .expect("flow preserves shapes")
            };
            let schmid = args.system == SystemArg::NahmSchmidCheck;
            integrate(rhs, s0, args.t_end, args.dt, method, args.stride).map(|traj| {
                let rows = bht_rows(&traj, |s| {
                    if schmid {
                        let c = AltsElement::OffDiag(
                            SuperMatrix::odd(s.a.clone(), s.b.clone()).expect("state shapes"),
                        );
                        nahm_schmid_residual(&c, SchmidConvention::Unit)
                            .ok()
                            .map(|r| r.into_iter().fold(0.0, f64::max))
                    } else {
                        Some(chain_rule_residuals(s).into_iter().fold(0.0, f64::max))
                    }
                });
                let samples = traj
                    .iter()
                    .map(|(t, s)| SampleJson {
                        t: *t,
                        state: StateJson::from_bht(s),
                    })
                    .collect();
                (samples, rows)
            })
        }
        SystemArg::GaugeBht => {
            let s0 = random_bht_state(&mut rng, n, m);
            let u = random_anti_hermitian(&mut rng, n);
            let v = random_anti_hermitian(&mut rng, m);
            gauge = Some(GaugeJson {
                u: io::mat_to_json(&u),
                v: io::mat_to_json(&v),
            });
            let rhs = move |s: &BHTState| {
                gauge_bht_rhs(s, &u, &v).expect("gauge fields fixed and anti-Hermitian")
            };
            integrate(rhs, s0, args.t_end, args.dt, method, args.stride).map(|traj| {
                let rows = bht_rows(&traj, |_| None);
                let samples = traj
                    .iter()
                    .map(|(t, s)| SampleJson {
                        t: *t,
                        state: StateJson::from_bht(s),
                    })
                    .collect();
                (samples, rows)
            })
        }
        SystemArg::Holo => {
            let h0 = random_holo_state(&mut rng, n, m);
            integrate(holo_rhs, h0, args.t_end, args.dt, method, args.stride).map(|traj| {
                let base = bhtlab::spectral::holo_pencil_coefficients(&traj[0].1).ok();
                let rows = traj
                    .iter()
                    .map(|(t, h)| CsvRow {
                        t: *t,
                        f: None,
                        gap: None,
                        nahm_residual_max: Some({
                            let (rz, rw) = bhtlab::spectral::lax_residual(h);
                            rz.max(rw)
                        }),
                        spectral_drift: base.as_ref().and_then(|b| {
                            bhtlab::spectral::holo_pencil_coefficients(h)
                                .ok()
                                .map(|cur| bhtlab::spectral::coefficient_drift(b, &cur))
                        }),
                    })
                    .collect();
                let samples = traj
                    .iter()
                    .map(|(t, h)| SampleJson {
                        t: *t,
                        state: StateJson::from_holo(h),
                    })
                    .collect();
                (samples, rows)
            })
        }
        SystemArg::Nahm => {
            let t0 = random_nahm_triple(&mut rng, n);
            integrate(nahm_rhs, t0, args.t_end, args.dt, method, args.stride).map(|traj| {
                let base = matkit::char_poly(&traj[0].1.beta).ok();
                let rows = traj
                    .iter()
                    .map(|(t, tri)| {
                        let drift = base.as_ref().and_then(|b| {
                            matkit::char_poly(&tri.beta).ok().map(|cur| {
                                b.iter()
                                    .zip(&cur)
                                    .map(|(c0, ct)| (ct - c0).norm() / (1.0 + c0.norm()))
                                    .fold(0.0, f64::max)
                            })
                        });
                        CsvRow {
                            t: *t,
                            f: None,
                            gap: None,
                            nahm_residual_max: None,
                            spectral_drift: drift,
                        }
                    })
                    .collect();
                let samples = traj
                    .iter()
                    .map(|(t, tri)| SampleJson {
                        t: *t,
                        state: StateJson::from_nahm(tri),
                    })
                    .collect();
                (samples, rows)
            })
        }
    };

    let (samples, rows) = match outcome {
        Ok(pair) => pair,
        Err(bhtlab::Error::BlowUp { last_t }) => {
            eprintln!("error: state became non-finite; last finite time t = {last_t}");
            println!(
                "{}",
                serde_json::json!({
                    "command": "simulate", "status": "blow-up", "last_t": last_t,
                    "system": args.system.name(), "seed": seed,
                })
            );
            return 3;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };

    let file = TrajectoryFile {
        format: TRAJECTORY_FORMAT.into(),
        rng: RNG_SPEC.into(),
        system: args.system.name().into(),
        n,
        m,
        seed,
        t_end: args.t_end,
        dt: args.dt,
        method: args.method.name().into(),
        stride: args.stride,
        gauge,
        samples,
    };
    let json = serde_json::to_string(&file).expect("serializable");
    if let Err(e) = std::fs::write(&args.out, json + "\n") {
        return config_error(
            "simulate",
            &format!("cannot write {}: {e}", args.out.display()),
        );
    }

    let csv = csv_path(&args.out);
    let mut text = String::new();
    let _ = writeln!(text, "# rng: {RNG_SPEC}");
    let _ = writeln!(
        text,
        "# system: {}, n: {}, m: {}, seed: {}, dt: {}, t_end: {}, method: {}, stride: {}",
        args.system.name(),
        n,
        m,
        seed,
        args.dt,
        args.t_end,
        args.method.name(),
        args.stride
    );
    let _ = writeln!(text, "t,f,gap,nahm_residual_max,spectral_drift");
    for row in &rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{}",
            row.t,
            io::cell(row.f),
            io::cell(row.gap),
            io::cell(row.nahm_residual_max),
            io::cell(row.spectral_drift)
        );
    }
    if let Err(e) = std::fs::write(&csv, text) {
        return config_error("simulate", &format!("cannot write {}: {e}", csv.display()));
    }

    println!(
        "{}",
        serde_json::json!({
            "command": "simulate", "status": "ok",
            "system": args.system.name(), "n": n, "m": m, "seed": seed,
            "dt": args.dt, "t_end": args.t_end, "method": args.method.name(),
            "stride": args.stride, "samples": file.samples.len(),
            "rng": RNG_SPEC, "out": args.out.display().to_string(),
            "csv": csv.display().to_string(),
        })
    );
    0
}
