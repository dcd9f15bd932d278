//! File formats: trajectory JSON, spectral-report JSON, invariant CSV.
//!
//! Complex numbers are two-element [re, im] arrays; matrices are row-major
//! nested arrays. Floats are written with Rust's shortest-roundtrip
//! formatting, so identical runs produce byte-identical files.

use std::path::{Path, PathBuf};

use bhtlab::flows::{BHTState, HoloState, NahmTriple};
use bhtlab::spectral::SpectralReport;
use bhtlab::{CMatrix, C64};
use serde::{Deserialize, Serialize};

pub type MatJson = Vec<Vec<[f64; 2]>>;

pub fn mat_to_json(m: &CMatrix) -> MatJson {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn mat_from_json(v: &MatJson) -> Result<CMatrix, String> {
    let rows = v.len();
    if rows == 0 {
        return Err("matrix has no rows".into());
    }
    let cols = v[0].len();
    if cols == 0 {
        return Err("matrix has no columns".into());
    }
    let mut m = CMatrix::zeros(rows, cols);
    for (i, row) in v.iter().enumerate() {
        if row.len() != cols {
            return Err(format!(
                "row {i} has {} entries, expected {cols}",
                row.len()
            ));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(format!("non-finite entry at ({i}, {j})"));
            }
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateJson {
    Bht {
        a: MatJson,
        b: MatJson,
    },
    Holo {
        a0: MatJson,
        a1: MatJson,
        b0: MatJson,
        b1: MatJson,
    },
    Nahm {
        t1: MatJson,
        t2: MatJson,
        t3: MatJson,
    },
}

impl StateJson {
    pub fn from_bht(s: &BHTState) -> Self {
        StateJson::Bht {
            a: mat_to_json(&s.a),
            b: mat_to_json(&s.b),
        }
    }

    pub fn from_holo(h: &HoloState) -> Self {
        StateJson::Holo {
            a0: mat_to_json(&h.a0),
            a1: mat_to_json(&h.a1),
            b0: mat_to_json(&h.b0),
            b1: mat_to_json(&h.b1),
        }
    }

    pub fn from_nahm(t: &NahmTriple) -> Self {
        StateJson::Nahm {
            t1: mat_to_json(&t.t1),
            t2: mat_to_json(&t.t2),
            t3: mat_to_json(&t.t3),
        }
    }

    pub fn to_bht(&self) -> Result<BHTState, String> {
        match self {
            StateJson::Bht { a, b } => {
                BHTState::new(mat_from_json(a)?, mat_from_json(b)?).map_err(|e| e.to_string())
            }
            _ => Err("expected a state with (a, b) blocks".into()),
        }
    }

    pub fn to_holo(&self) -> Result<HoloState, String> {
        match self {
            StateJson::Holo { a0, a1, b0, b1 } => HoloState::new(
                mat_from_json(a0)?,
                mat_from_json(a1)?,
                mat_from_json(b0)?,
                mat_from_json(b1)?,
            )
            .map_err(|e| e.to_string()),
            _ => Err("expected a state with (a0, a1, b0, b1) blocks".into()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SampleJson {
    pub t: f64,
    pub state: StateJson,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GaugeJson {
    pub u: MatJson,
    pub v: MatJson,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TrajectoryFile {
    pub format: String,
    pub rng: String,
    pub system: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub t_end: f64,
    pub dt: f64,
    pub method: String,
    pub stride: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeJson>,
    pub samples: Vec<SampleJson>,
}

pub const TRAJECTORY_FORMAT: &str = "bhtlab-trajectory/1";
pub const REPORT_FORMAT: &str = "bhtlab-spectral-report/1";

#[derive(Debug, Serialize, Deserialize)]
pub struct BivariateJson {
    pub deg_zeta: usize,
    pub deg_lambda: usize,
    pub coeffs: Vec<CoeffJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CoeffJson {
    pub zeta_pow: usize,
    pub lambda_pow: usize,
    pub value: [f64; 2],
}

fn bivariate_to_json(p: &bhtlab::matkit::BivariatePoly) -> BivariateJson {
    BivariateJson {
        deg_zeta: p.deg_zeta(),
        deg_lambda: p.deg_lambda(),
        coeffs: p
            .iter()
            .map(|(&(i, j), &c)| CoeffJson {
                zeta_pow: i,
                lambda_pow: j,
                value: [c.re, c.im],
            })
            .collect(),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpectralReportJson {
    pub format: String,
    pub rng: String,
    pub input: String,
    pub phat: BivariateJson,
    pub tau_residual: f64,
    pub lambda_power: usize,
    pub p: Option<BivariateJson>,
    pub square_residual: Option<f64>,
    pub genus_s: Option<usize>,
    pub genus_shat: Option<usize>,
    pub ramification_a: Option<Vec<[f64; 2]>>,
    pub ramification_b: Option<Vec<[f64; 2]>>,
    pub disjoint: Option<bool>,
}

pub fn report_to_json(report: &SpectralReport, rng: &str, input: &str) -> SpectralReportJson {
    let roots = |r: &Option<Vec<C64>>| {
        r.as_ref()
            .map(|v| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
    };
    SpectralReportJson {
        format: REPORT_FORMAT.into(),
        rng: rng.into(),
        input: input.into(),
        phat: bivariate_to_json(&report.phat),
        tau_residual: report.tau_residual,
        lambda_power: report.lambda_power,
        p: report.p.as_ref().map(bivariate_to_json),
        square_residual: report.square_residual,
        genus_s: report.genus_s,
        genus_shat: report.genus_shat,
        ramification_a: roots(&report.ramification_a),
        ramification_b: roots(&report.ramification_b),
        disjoint: report.disjoint,
    }
}

/// Sibling CSV path: the output path with its extension replaced by `csv`.
pub fn csv_path(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

/// CSV cell for an optional value; absent values stay empty.
pub fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}
