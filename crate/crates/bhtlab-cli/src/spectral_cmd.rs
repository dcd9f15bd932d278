//! The `spectral` subcommand: per-step spectral-curve coefficients (CSV) and
//! a spectral report (JSON) for a stored trajectory.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use bhtlab::flows::reality_embed;
use bhtlab::spectral::{holo_pencil_coefficients, pencil_coefficients, tau_and_square_check};
use bhtlab::C64;
use clap::Args;

use crate::config_error;
use crate::io::{csv_path, report_to_json, StateJson, TrajectoryFile};

#[derive(Args, Debug)]
pub struct SpectralArgs {
    /// Trajectory JSON produced by `simulate`.
    #[arg(long)]
    pub input: PathBuf,
    /// Spectral report JSON path; the coefficient CSV lands next to it.
    #[arg(long)]
    pub out: PathBuf,
}

type Coeffs = Vec<((usize, usize), C64)>;

pub fn run(args: SpectralArgs) -> i32 {
    let text = match std::fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => {
            return config_error(
                "spectral",
                &format!("cannot read {}: {e}", args.input.display()),
            )
        }
    };
    let file: TrajectoryFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => return config_error("spectral", &format!("malformed trajectory JSON: {e}")),
    };
    if file.samples.is_empty() {
        return config_error("spectral", "trajectory has no samples");
    }

    // per-step raw pencil coefficients and the report of the first state
    let mut rows: Vec<(f64, Coeffs)> = Vec::with_capacity(file.samples.len());
    let report = match &file.samples[0].state {
        StateJson::Bht { .. } => {
            for s in &file.samples {
                let state = match s.state.to_bht() {
                    Ok(st) => st,
                    Err(e) => return config_error("spectral", &e),
                };
                match pencil_coefficients(&state) {
                    Ok(c) => rows.push((s.t, c)),
                    Err(e) => return config_error("spectral", &e.to_string()),
                }
            }
            let first = file.samples[0].state.to_bht().expect("checked above");
            tau_and_square_check(&reality_embed(&first))
        }
        StateJson::Holo { .. } => {
            for s in &file.samples {
                let state = match s.state.to_holo() {
                    Ok(st) => st,
                    Err(e) => return config_error("spectral", &e),
                };
                match holo_pencil_coefficients(&state) {
                    Ok(c) => rows.push((s.t, c)),
                    Err(e) => return config_error("spectral", &e.to_string()),
                }
            }
            let first = file.samples[0].state.to_holo().expect("checked above");
            tau_and_square_check(&first)
        }
        StateJson::Nahm { .. } => {
            return config_error(
                "spectral",
                "spectral analysis needs (a, b) or holomorphic states; got a nahm trajectory",
            )
        }
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => return config_error("spectral", &e.to_string()),
    };

    // fixed column set: union of keys over all steps, sorted
    let keys: BTreeSet<(usize, usize)> = rows
        .iter()
        .flat_map(|(_, c)| c.iter().map(|(k, _)| *k))
        .collect();
    let mut csv = String::new();
    let _ = writeln!(csv, "# rng: {}", file.rng);
    let _ = writeln!(
        csv,
        "# system: {}, n: {}, m: {}, seed: {}, source: {}",
        file.system,
        file.n,
        file.m,
        file.seed,
        args.input.display()
    );
    let mut header = String::from("t");
    for &(i, j) in &keys {
        let _ = write!(header, ",c_z{i}_l{j}_re,c_z{i}_l{j}_im");
    }
    let _ = writeln!(csv, "{header}");
    for (t, coeffs) in &rows {
        let map: std::collections::BTreeMap<_, _> = coeffs.iter().copied().collect();
        let mut line = format!("{t}");
        for key in &keys {
            let c = map.get(key).copied().unwrap_or(C64::new(0.0, 0.0));
            let _ = write!(line, ",{},{}", c.re, c.im);
        }
        let _ = writeln!(csv, "{line}");
    }
    let csv_file = csv_path(&args.out);
    if let Err(e) = std::fs::write(&csv_file, csv) {
        return config_error(
            "spectral",
            &format!("cannot write {}: {e}", csv_file.display()),
        );
    }

    let json = report_to_json(&report, &file.rng, &args.input.display().to_string());
    let pretty = serde_json::to_string_pretty(&json).expect("serializable");
    if let Err(e) = std::fs::write(&args.out, pretty + "\n") {
        return config_error(
            "spectral",
            &format!("cannot write {}: {e}", args.out.display()),
        );
    }

    println!(
        "{}",
        serde_json::json!({
            "command": "spectral", "status": "ok",
            "input": args.input.display().to_string(),
            "out": args.out.display().to_string(),
            "csv": csv_file.display().to_string(),
            "steps": rows.len(),
            "tau_residual": report.tau_residual,
            "lambda_power": report.lambda_power,
        })
    );
    0
}
