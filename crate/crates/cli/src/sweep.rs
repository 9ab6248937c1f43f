//! Parameter sweeps to CSV, one row per grid point.

use clap::Args;
use rayon::prelude::*;
use steerkit_core::criteria::ccnr_steering;
use steerkit_core::states::{isotropic, one_way_b_to_a_condition, one_way_state, werner};
use steerkit_core::{assemblage_from_state, lhs_feasibility, steering_robustness, steering_weight, DensityMatrix};

use crate::commands::{parse_measurements, three_pauli_value};
use crate::error::CliError;
use crate::Ctx;

const COLUMNS: &[&str] = &["three-pauli", "verdict", "mu", "ccnr", "weight", "robustness"];

#[derive(Debug, Args, Clone)]
pub struct SweepArgs {
    /// werner, isotropic or one-way.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Range of η (werner, isotropic) or α (one-way).
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    #[arg(long, default_value_t = 1.0)]
    pub to: f64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// One-way angles in degrees.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub thetas: Vec<f64>,
    #[arg(long, default_value = "paulis:xyz")]
    pub measurements: String,
    /// Any of three-pauli, verdict, mu, ccnr, weight, robustness.
    #[arg(long, value_delimiter = ',', default_value = "three-pauli,verdict,ccnr")]
    pub columns: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// `from + i·step` up to `to`, rounded to suppress accumulation noise.
pub fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step.is_finite() && from.is_finite() && to.is_finite()) {
        return Err(CliError::Invalid(format!("bad range {from}..{to} step {step}")));
    }
    if to < from {
        return Ok(Vec::new());
    }
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| ((from + i as f64 * step) * 1e12).round() / 1e12).collect())
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn family_row(ctx: &Ctx, args: &SweepArgs, rho: &DensityMatrix, eta: f64) -> Result<Vec<String>, CliError> {
    let ms = parse_measurements(&args.measurements)?;
    let asm = assemblage_from_state(rho, &ms)?;
    let cfg = ctx.cfg();
    let mut row = vec![fmt(eta)];
    for col in &args.columns {
        row.push(match col.as_str() {
            "three-pauli" if args.d == 2 => fmt(three_pauli_value(rho)?),
            "three-pauli" => String::new(),
            "verdict" => lhs_feasibility(&asm, &cfg)?.verdict.as_str().to_string(),
            "mu" => fmt(lhs_feasibility(&asm, &cfg)?.mu),
            "ccnr" => fmt(ccnr_steering(rho, args.d)?.value),
            "weight" => fmt(steering_weight(&asm, &cfg)?.weight),
            "robustness" => fmt(steering_robustness(&asm, &cfg)?.robustness),
            other => return Err(CliError::Usage(format!("unknown column '{other}'"))),
        });
    }
    Ok(row)
}

fn one_way_row(ctx: &Ctx, args: &SweepArgs, alpha: f64, theta_deg: f64) -> Result<Vec<String>, CliError> {
    let ms = parse_measurements(&args.measurements)?;
    let rho = one_way_state(alpha, theta_deg.to_radians())?;
    let detected = lhs_feasibility(&assemblage_from_state(&rho, &ms)?, &ctx.cfg())?.steerable;
    let model = one_way_b_to_a_condition(alpha, theta_deg.to_radians());
    let region = match (detected, model) {
        (true, true) => "one-way",
        (true, false) => "A->B-detected",
        (false, true) => "B->A-model-exists",
        (false, false) => "undecided",
    };
    Ok(vec![fmt(alpha), fmt(theta_deg), detected.to_string(), model.to_string(), region.into()])
}

pub fn sweep(ctx: &Ctx, args: &SweepArgs) -> Result<String, CliError> {
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    // validate up front so an empty range still rejects bad options
    parse_measurements(&args.measurements)?;
    let points = grid(args.from, args.to, args.step)?;
    let (header, tasks): (Vec<String>, Vec<(f64, f64)>) = match args.family.as_str() {
        "werner" | "isotropic" => {
            if let Some(bad) = args.columns.iter().find(|c| !COLUMNS.contains(&c.as_str())) {
                return Err(CliError::Usage(format!("unknown column '{bad}'")));
            }
            let mut h = vec!["eta".to_string()];
            h.extend(args.columns.iter().cloned());
            (h, points.iter().map(|&p| (p, 0.0)).collect())
        }
        "one-way" => {
            let h = ["alpha", "theta_deg", "a_to_b_detected", "b_to_a_model", "region"];
            let tasks = points
                .iter()
                .flat_map(|&a| args.thetas.iter().map(move |&t| (a, t)))
                .collect();
            (h.iter().map(|s| s.to_string()).collect(), tasks)
        }
        other => return Err(CliError::Usage(format!("unknown sweep family '{other}'"))),
    };
    let compute = |&(p, theta): &(f64, f64)| -> Result<Vec<String>, CliError> {
        match args.family.as_str() {
            "werner" => family_row(ctx, args, &werner(args.d, p)?, p),
            "isotropic" => family_row(ctx, args, &isotropic(args.d, p)?, p),
            _ => one_way_row(ctx, args, p, theta),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let rows: Vec<Vec<String>> = pool.install(|| tasks.par_iter().map(compute).collect::<Result<_, _>>())?;

    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let to_err = |e: csv::Error| CliError::Invalid(e.to_string());
    w.write_record(&header).map_err(to_err)?;
    for r in &rows {
        w.write_record(r).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
