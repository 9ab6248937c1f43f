use std::result::Result;
use std::str::FromStr;

use clap::Args;
use serde_json::{json, Map, Value};
use steerkit_core::criteria::{
    ccnr_steering, chsh_steering, entropic_criterion, gaussian_steering, joint_distribution, linear_criterion,
    lur_criterion, three_pauli_criterion, variance, CorrelationRecord, CriterionResult, Direction, GaussianCovariance,
};
use steerkit_core::incompat::{jm_critical_visibility, QubitDichotomicPair};
use steerkit_core::linalg::{self, CMat};
use steerkit_core::radius::{tstate_critical_radius, DirectionSet};
use steerkit_core::states::{isotropic, one_way_state, singlet, werner};
use steerkit_core::*;

use crate::error::CliError;
use crate::format::{matrix_to_json, Document};
use crate::{AssemblageInput, Ctx};

fn usage(e: CoreError) -> CliError {
    CliError::Usage(e.to_string())
}

/// Measurement shorthand or a measurements file.
pub fn parse_measurements(shorthand: &str) -> Result<MeasurementSet, CliError> {
    if let Some(which) = shorthand.strip_prefix("paulis:") {
        MeasurementSet::paulis(which).map_err(usage)
    } else if let Some(axes) = shorthand.strip_prefix("axes:") {
        Ok(DirectionSet::from_str(axes).map_err(usage)?.measurements())
    } else {
        Document::read(shorthand)?.to_measurements()
    }
}

pub fn load_assemblage(input: &AssemblageInput) -> Result<Assemblage, CliError> {
    match (&input.assemblage, &input.state, &input.measurements) {
        (Some(path), None, None) => Document::read(path)?.to_assemblage(),
        (None, Some(state), Some(shorthand)) => {
            let (rho, dims) = Document::read(state)?.to_state()?;
            let ms = parse_measurements(shorthand)?;
            if dims.0 != ms.dim() {
                return Err(CliError::Invalid(format!(
                    "measurements act on dimension {}, Alice has {}",
                    ms.dim(),
                    dims.0
                )));
            }
            Ok(assemblage_from_state(&rho, &ms)?)
        }
        _ => Err(CliError::Usage(
            "give --assemblage FILE, or --state FILE with --measurements SHORTHAND".into(),
        )),
    }
}

/// Output object with the shared header and the solve conditions.
pub fn report(ctx: &Ctx, kind: &str, diag: Option<&Diagnostics>, fields: Value) -> String {
    let mut m = Map::new();
    m.insert("version".into(), json!(crate::format::FORMAT_VERSION));
    m.insert("kind".into(), json!(kind));
    if let Value::Object(f) = fields {
        m.extend(f);
    }
    m.insert("tol".into(), json!(ctx.tol));
    match diag {
        Some(d) => {
            m.insert("status".into(), json!(d.status));
            m.insert("solver".into(), json!(d.solver));
            m.insert("iterations".into(), json!(d.iterations));
        }
        None => {
            m.insert("status".into(), json!("closed-form"));
        }
    }
    m.insert("seed".into(), json!(ctx.seed));
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("json values serialize");
    s.push('\n');
    s
}

fn operator_rows(rows: &[Vec<HermitianOperator>]) -> Value {
    json!(rows
        .iter()
        .map(|r| r.iter().map(|h| matrix_to_json(h.matrix())).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn matrix_rows(rows: &[Vec<CMat>]) -> Value {
    json!(rows
        .iter()
        .map(|r| r.iter().map(matrix_to_json).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn model_json(m: &LhsModel) -> Value {
    let hidden: Vec<Value> = m
        .hidden
        .iter()
        .enumerate()
        .map(|(l, h)| {
            let strategy: Vec<usize> = (0..m.labels.len())
                .map(|x| m.labels[x][m.strategies.outcome(l, x)])
                .collect();
            json!({ "strategy": strategy, "sigma": matrix_to_json(h.matrix()) })
        })
        .collect();
    json!({ "hidden": hidden })
}

fn inequality_json(f: &SteeringInequality) -> Value {
    json!({
        "bound": f.bound,
        "normalization": f.normalization(),
        "min_strategy_eig": f.min_strategy_eig(),
        "coefficients": operator_rows(&f.coefficients),
    })
}

pub fn detect(ctx: &Ctx, input: &AssemblageInput) -> Result<String, CliError> {
    let asm = load_assemblage(input)?;
    let v = lhs_feasibility(&asm, &ctx.cfg())?;
    let mut fields = json!({
        "verdict": v.verdict.as_str(),
        "steerable": v.steerable,
        "mu": v.mu,
        "inequality_value": v.inequality_value,
        "dual_objective": v.dual_objective,
    });
    match &v.witness {
        steering::Witness::Inequality(f) => fields["inequality"] = inequality_json(f),
        steering::Witness::Model(m) => fields["model"] = model_json(m),
    }
    Ok(report(ctx, "detect", Some(&v.diagnostics), fields))
}

pub fn quantify(ctx: &Ctx, input: &AssemblageInput, measure: &str) -> Result<String, CliError> {
    let asm = load_assemblage(input)?;
    let (value, diag, extra) = if measure == "weight" {
        let w = steering_weight(&asm, &ctx.cfg())?;
        let extra = json!({ "steerable_part": matrix_rows(&w.steerable_part), "lhs_part": model_json(&w.lhs_part) });
        (w.weight, w.diagnostics, extra)
    } else {
        let r = steering_robustness(&asm, &ctx.cfg())?;
        let noise = r.noise.as_deref().map(matrix_rows).unwrap_or(Value::Null);
        (r.robustness, r.diagnostics, json!({ "noise": noise, "mixed_model": model_json(&r.mixed_model) }))
    };
    let mut fields = json!({ "measure": measure, "value": value });
    if let (Value::Object(f), Value::Object(e)) = (&mut fields, extra) {
        f.extend(e);
    }
    Ok(report(ctx, "quantify", Some(&diag), fields))
}

pub fn inequality(ctx: &Ctx, input: &AssemblageInput) -> Result<String, CliError> {
    let asm = load_assemblage(input)?;
    let v = lhs_feasibility(&asm, &ctx.cfg())?;
    let f = match v.inequality() {
        Some(f) => f.clone(),
        None => dual_inequality(&asm, &ctx.cfg())?,
    };
    let fields = json!({
        "value": f.evaluate(&asm)?,
        "violated": v.steerable,
        "inequality": inequality_json(&f),
    });
    Ok(report(ctx, "inequality", Some(&v.diagnostics), fields))
}

pub fn jm(ctx: &Ctx, shorthand: &str) -> Result<String, CliError> {
    let ms = parse_measurements(shorthand)?;
    let cfg = ctx.cfg();
    let v = is_jointly_measurable(&ms, &cfg)?;
    let rob = incompatibility_robustness(&ms, &cfg)?;
    let vis = jm_critical_visibility(&ms, &cfg)?;
    let mut fields = json!({
        "jointly_measurable": v.jointly_measurable,
        "verdict": v.verdict.as_str(),
        "mu": v.mu,
        "robustness": rob.robustness,
        "critical_visibility": vis.visibility,
        "visibility_capped": vis.capped,
    });
    if let Some(parent) = &v.parent {
        fields["parent"] = json!({
            "strategies": (0..parent.strategies.len())
                .map(|l| (0..parent.labels.len()).map(|x| parent.labels[x][parent.strategies.outcome(l, x)]).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "effects": parent.effects.iter().map(|e| matrix_to_json(e.matrix())).collect::<Vec<_>>(),
        });
    }
    if let Ok(pair) = QubitDichotomicPair::from_measurements(&ms) {
        fields["closed_form"] = json!({
            "jointly_measurable": qubit_pair_criterion(&pair),
            "margin": qubit_pair_margin(&pair),
        });
    }
    Ok(report(ctx, "jm", Some(&v.diagnostics), fields))
}

fn parse_dirs(shorthand: &str) -> Result<DirectionSet, CliError> {
    DirectionSet::from_str(shorthand.strip_prefix("axes:").unwrap_or(shorthand)).map_err(usage)
}

pub fn radius(ctx: &Ctx, state: &str, dirs: &str, quad: usize) -> Result<String, CliError> {
    let (rho, dims) = Document::read(state)?.to_state()?;
    if dims != (2, 2) {
        return Err(CliError::Invalid(format!("radius needs a two-qubit state, got {}x{}", dims.0, dims.1)));
    }
    let dirs = parse_dirs(dirs)?;
    let b = radius_bracket(&rho, &dirs, &ctx.cfg())?;
    let mut fields = json!({
        "lower": b.lower,
        "upper": b.upper,
        "inradius": b.inradius,
        "scheme": b.scheme,
        "axes": b.axes,
        "classification": format!("{:?}", b.classify()).to_lowercase(),
        "warnings": b.warnings,
    });
    let bloch = bloch_decompose(&rho)?;
    if bloch.a.norm() < 1e-12 && bloch.b.norm() < 1e-12 {
        let t = tstate_critical_radius(&bloch.t, quad)?;
        fields["tstate"] = json!({
            "radius": t.radius,
            "error_estimate": t.error_estimate,
            "singular": t.singular,
            "quadrature_points": quad,
        });
    }
    Ok(report(ctx, "radius", Some(&b.diagnostics), fields))
}

fn criterion(name: &str, r: &CriterionResult) -> Value {
    json!({ "name": name, "value": r.value, "bound": r.bound, "violated": r.violated })
}

pub fn criteria(ctx: &Ctx, state: Option<&str>, covariance: Option<&str>, lur_bound: f64) -> Result<String, CliError> {
    let mut out = Vec::new();
    match (state, covariance) {
        (Some(path), None) => {
            let (rho, dims) = Document::read(path)?.to_state()?;
            if dims == (2, 2) {
                let p = linalg::paulis();
                let rec = CorrelationRecord::from_state(&rho, &p, &p)?;
                let corrs: Vec<f64> = (0..3).map(|k| rec.full[k][k]).collect();
                out.push(criterion("linear", &linear_criterion(&corrs, &p)?));
                out.push(criterion("three-pauli", &three_pauli_criterion(&rec)?));
                let t = |i: usize, j: usize| rec.full[i][j];
                out.push(criterion("chsh", &chsh_steering(&[[t(0, 0), t(0, 2)], [t(2, 0), t(2, 2)]])));
                let j1 = joint_distribution(&rho, &p[0], &p[0])?;
                let j2 = joint_distribution(&rho, &p[2], &p[2])?;
                out.push(criterion("entropic-nats", &entropic_criterion(&j1, &j2, &p[0], &p[2])?));
                let id = linalg::identity(2);
                let vars = p
                    .iter()
                    .map(|s| variance(&rho, &(linalg::kron(s, &id) + linalg::kron(&id, s))))
                    .collect::<Result<Vec<_>, CoreError>>()?;
                out.push(criterion("lur", &lur_criterion(&vars, lur_bound)?));
            }
            if dims.0 == dims.1 {
                out.push(criterion("ccnr", &ccnr_steering(&rho, dims.0)?));
            }
        }
        (None, Some(path)) => {
            let gc = Document::read(path)?.to_covariance()?;
            for dir in [Direction::AToB, Direction::BToA] {
                let g = gaussian_steering(&gc, dir);
                out.push(json!({
                    "name": format!("gaussian {dir}"),
                    "steerable": g.steerable,
                    "min_eig": g.min_eig,
                }));
            }
        }
        _ => return Err(CliError::Usage("give --state FILE or --covariance FILE".into())),
    }
    Ok(report(ctx, "criteria", None, json!({ "criteria": out })))
}

#[derive(Debug, Args, Clone)]
pub struct MakeArgs {
    /// werner, isotropic, singlet, one-way, random, tmsv or vacuum.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Visibility for werner and isotropic.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Mixing weight for the one-way family.
    #[arg(long, default_value_t = 0.6)]
    pub alpha: f64,
    /// Angle in degrees for the one-way family.
    #[arg(long, default_value_t = 10.0)]
    pub theta_deg: f64,
    /// Rank of a random state.
    #[arg(long, default_value_t = 4)]
    pub rank: usize,
    /// Squeezing for tmsv.
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    /// Emit the assemblage for these measurements instead of the state.
    #[arg(long)]
    pub measurements: Option<String>,
}

pub fn make_state(args: &MakeArgs, seed: u64) -> Result<(DensityMatrix, (usize, usize)), CliError> {
    let d = args.d;
    Ok(match args.family.as_str() {
        "werner" => (werner(d, args.eta)?, (d, d)),
        "isotropic" => (isotropic(d, args.eta)?, (d, d)),
        "singlet" => (singlet(), (2, 2)),
        "one-way" => (one_way_state(args.alpha, args.theta_deg.to_radians())?, (2, 2)),
        "random" => {
            if d < 2 || args.rank == 0 || args.rank > d * d {
                return Err(CliError::Usage(format!("rank {} invalid for dimension {d}x{d}", args.rank)));
            }
            let mut rng = random::rng(seed);
            (random::random_state(d * d, args.rank, &mut rng), (d, d))
        }
        other => return Err(CliError::Usage(format!("unknown state family '{other}'"))),
    })
}

pub fn make(ctx: &Ctx, args: &MakeArgs) -> Result<String, CliError> {
    let doc = match args.family.as_str() {
        "tmsv" => Document::from_covariance(&GaussianCovariance::two_mode_squeezed(args.r)?),
        "vacuum" => Document::from_covariance(&GaussianCovariance::vacuum(1, 1)?),
        _ => {
            let (rho, dims) = make_state(args, ctx.seed)?;
            match &args.measurements {
                None => Document::from_state(&rho, dims),
                Some(shorthand) => {
                    let ms = parse_measurements(shorthand)?;
                    if ms.dim() != dims.0 {
                        return Err(CliError::Invalid(format!(
                            "measurements act on dimension {}, Alice has {}",
                            ms.dim(),
                            dims.0
                        )));
                    }
                    Document::from_assemblage(&assemblage_from_state(&rho, &ms)?)
                }
            }
        }
    };
    let mut s = doc.to_json();
    s.push('\n');
    Ok(s)
}

pub fn thresholds(ctx: &Ctx, family: Family, class: MeasurementClass, d: usize) -> Result<String, CliError> {
    let q = ThresholdQuery::new(family, class, d)?;
    let value = threshold(&q)?;
    let mut fields = json!({
        "family": family.as_str(),
        "class": class.as_str(),
        "d": d,
        "threshold": value,
    });
    if class == MeasurementClass::Dichotomic {
        fields["note"] = json!("closed form established for d <= 1e5 and conjectured beyond");
    }
    Ok(report(ctx, "thresholds", None, fields))
}

pub(crate) fn three_pauli_value(rho: &DensityMatrix) -> Result<f64, CliError> {
    let p = linalg::paulis();
    let rec = CorrelationRecord::from_state(rho, &p, &p)?;
    Ok(three_pauli_criterion(&rec)?.value)
}
