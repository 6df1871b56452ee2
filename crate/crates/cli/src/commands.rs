//! The six subcommands. Each resolves its settings as flag, then config
//! file, then default, and returns a [`Report`] plus an optional [`Table`].

use rayon::prelude::*;
use serde_json::{json, Value};

use qchan::capacity::{self, CapacityResult, DEFAULT_TOL};
use qchan::mixtures::{self, DEFAULT_RESOLUTION, SEPARATION_GAMMA, SEPARATION_LAMBDA};
use qchan::oracle::{self, OracleConfig, LOWER_BOUND_SLACK};
use qchan::{Channel, MixedChannelPair, QubitState};

use crate::args::{
    CertifyArgs, ChannelArgs, ChannelKind, ChannelSpec, ChiCurvesArgs, CommonArgs, CurveArgs,
    EllipseArgs, MinimaxArgs, OracleArgs,
};
use crate::config::FileConfig;
use crate::error::CliError;
use crate::output::{Cell, Report, Table};

pub const DEFAULT_CURVE_STEP: f64 = 0.01;
pub const DEFAULT_CHI_STEP: f64 = 0.01;
pub const DEFAULT_ELLIPSE_POINTS: usize = 64;
pub const DEFAULT_WEIGHT: f64 = 0.5;
/// Accepted shortfall of the oracle below the solver.
pub const DEFAULT_CERTIFY_BOUND: f64 = 2e-4;

/// Relative slack when checking that a range is a whole number of steps.
const STEP_FIT_TOL: f64 = 1e-9;

pub struct Emitted {
    pub report: Report,
    pub table: Option<Table>,
    /// Failure to report after the output has been written.
    pub verdict: Result<(), CliError>,
}

impl Emitted {
    fn ok(report: Report, table: Option<Table>) -> Self {
        Self {
            report,
            table,
            verdict: Ok(()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn resolve_tol(common: &CommonArgs, file: &FileConfig) -> Result<f64, CliError> {
    let tol = common.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(invalid(format!("--tol must be positive, got {tol}")))
    }
}

pub fn make_channel(spec: ChannelSpec) -> Result<Channel, CliError> {
    Ok(match spec.kind {
        ChannelKind::Ad => Channel::amplitude_damping(spec.param)?,
        ChannelKind::Dep => Channel::depolarizing(spec.param)?,
    })
}

fn resolve_channel(args: &ChannelArgs, file: &FileConfig) -> Result<ChannelSpec, CliError> {
    let kind = args
        .channel
        .or(file.channel)
        .ok_or_else(|| invalid("--channel is required"))?;
    let (param, name, other) = match kind {
        ChannelKind::Ad => (
            args.gamma.or(file.gamma),
            "--gamma",
            args.lambda.map(|_| "--lambda"),
        ),
        ChannelKind::Dep => (
            args.lambda.or(file.lambda),
            "--lambda",
            args.gamma.map(|_| "--gamma"),
        ),
    };
    if let Some(flag) = other {
        return Err(invalid(format!(
            "{flag} does not apply to --channel {kind}"
        )));
    }
    let param = param.ok_or_else(|| invalid(format!("{name} is required for --channel {kind}")))?;
    let spec = ChannelSpec { kind, param };
    make_channel(spec)?;
    Ok(spec)
}

fn solve(spec: ChannelSpec, tol: f64) -> Result<CapacityResult, CliError> {
    Ok(match spec.kind {
        ChannelKind::Ad => capacity::capacity_amplitude_damping(spec.param, tol)?,
        ChannelKind::Dep => capacity::capacity_depolarizing(spec.param)?,
    })
}

fn capacity_json(r: &CapacityResult) -> Value {
    json!({
        "capacity_bits": r.capacity_bits,
        "a_max": r.a_max,
        "residual": r.residual,
        "iterations": r.iterations,
        "method": r.method,
    })
}

pub fn capacity(
    common: &CommonArgs,
    args: &ChannelArgs,
    file: &FileConfig,
) -> Result<Emitted, CliError> {
    let tol = resolve_tol(common, file)?;
    let spec = resolve_channel(args, file)?;
    let r = solve(spec, tol)?;
    let mut table = Table::new(vec![
        "param",
        "capacity_bits",
        "a_max",
        "residual",
        "iterations",
    ]);
    table.push(vec![
        Cell::Num(spec.param),
        Cell::Num(r.capacity_bits),
        Cell::Num(r.a_max),
        Cell::Num(r.residual),
        Cell::Int(r.iterations.into()),
    ]);
    let report = Report {
        command: "capacity",
        inputs: json!({ "channel": spec.kind, "param": spec.param }),
        outputs: capacity_json(&r),
        tolerances: json!({ "tol": tol }),
    };
    Ok(Emitted::ok(report, Some(table)))
}

/// `start + (end − start)·i/n` for `i = 0..=n`, with `n·step = end − start`.
pub fn uniform_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(0.0 <= start && start < end && end <= 1.0) {
        return Err(invalid(format!(
            "need 0 ≤ start < end ≤ 1, got [{start}, {end}]"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid(format!("step must be positive, got {step}")));
    }
    let span = end - start;
    let n = (span / step).round();
    if n < 1.0 || (n * step - span).abs() > STEP_FIT_TOL * span.max(1.0) {
        return Err(invalid(format!(
            "step {step} does not divide [{start}, {end}]"
        )));
    }
    let n = n as usize;
    Ok((0..=n)
        .map(|i| {
            if i == n {
                end
            } else {
                start + span * i as f64 / n as f64
            }
        })
        .collect())
}

/// Rows of `param,capacity_bits,a_max` over a parameter grid.
pub fn curve_table(
    kind: ChannelKind,
    start: f64,
    end: f64,
    step: f64,
    tol: f64,
) -> Result<Table, CliError> {
    let grid = uniform_grid(start, end, step)?;
    let results = grid
        .par_iter()
        .map(|&param| solve(ChannelSpec { kind, param }, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(vec!["param", "capacity_bits", "a_max"]);
    for (param, r) in grid.iter().zip(results) {
        table.push(vec![
            Cell::Num(*param),
            Cell::Num(r.capacity_bits),
            Cell::Num(r.a_max),
        ]);
    }
    Ok(table)
}

pub fn curve(
    common: &CommonArgs,
    args: &CurveArgs,
    file: &FileConfig,
) -> Result<Emitted, CliError> {
    let tol = resolve_tol(common, file)?;
    let kind = args.channel.or(file.channel).unwrap_or(ChannelKind::Ad);
    let start = args.start.or(file.start).unwrap_or(0.0);
    let end = args.end.or(file.end).unwrap_or(1.0);
    let step = args.step.or(file.step).unwrap_or(DEFAULT_CURVE_STEP);
    let table = curve_table(kind, start, end, step, tol)?;
    let report = Report {
        command: "curve",
        inputs: json!({ "channel": kind, "start": start, "end": end, "step": step }),
        outputs: json!({ "rows": table.to_json() }),
        tolerances: json!({ "tol": tol }),
    };
    Ok(Emitted::ok(report, Some(table)))
}

/// Rows of `a,chi_ad,chi_dep,min_chi,crossing` on the grid `a = i·step`,
/// with the located crossings merged in and flagged.
pub fn chi_curves_table(
    gamma: f64,
    lambda: f64,
    step: f64,
    resolution: f64,
) -> Result<(Table, Vec<f64>), CliError> {
    let ad = Channel::amplitude_damping(gamma)?;
    let dep = Channel::depolarizing(lambda)?;
    let pair = MixedChannelPair::new(ad.clone(), dep.clone(), DEFAULT_WEIGHT)?;
    let crossings = mixtures::minimax_capacity(&pair, resolution)?.crossings;

    let mut points: Vec<(f64, bool)> = uniform_grid(0.0, 1.0, step)?
        .into_iter()
        .map(|a| (a, false))
        .collect();
    points.extend(crossings.iter().map(|&a| (a, true)));
    points.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let mut table = Table::new(vec!["a", "chi_ad", "chi_dep", "min_chi", "crossing"]);
    for (a, flagged) in points {
        let chi_ad = mixtures::branch_chi(&ad, a)?;
        let chi_dep = mixtures::branch_chi(&dep, a)?;
        table.push(vec![
            Cell::Num(a),
            Cell::Num(chi_ad),
            Cell::Num(chi_dep),
            Cell::Num(chi_ad.min(chi_dep)),
            Cell::Flag(flagged),
        ]);
    }
    Ok((table, crossings))
}

fn resolve_resolution(args_value: Option<f64>, file: &FileConfig) -> f64 {
    args_value.or(file.resolution).unwrap_or(DEFAULT_RESOLUTION)
}

pub fn chi_curves(
    _common: &CommonArgs,
    args: &ChiCurvesArgs,
    file: &FileConfig,
) -> Result<Emitted, CliError> {
    let gamma = args.gamma.or(file.gamma).unwrap_or(SEPARATION_GAMMA);
    let lambda = args.lambda.or(file.lambda).unwrap_or(SEPARATION_LAMBDA);
    let step = args.step.or(file.step).unwrap_or(DEFAULT_CHI_STEP);
    let resolution = resolve_resolution(None, file);
    let (table, crossings) = chi_curves_table(gamma, lambda, step, resolution)?;
    let report = Report {
        command: "chi-curves",
        inputs: json!({ "gamma": gamma, "lambda": lambda, "step": step }),
        outputs: json!({ "crossings": crossings, "rows": table.to_json() }),
        tolerances: json!({ "resolution": resolution }),
    };
    Ok(Emitted::ok(report, Some(table)))
}

/// Pure states `a = (1 + cos θ)/2`, `b = sin θ / 2` at `θ = 2πk/n` and their
/// images, followed by the two optimal input states.
pub fn ellipse_table(gamma: f64, points: usize, tol: f64) -> Result<Table, CliError> {
    if points < 3 {
        return Err(invalid(format!(
            "--points must be at least 3, got {points}"
        )));
    }
    let channel = Channel::amplitude_damping(gamma)?;
    let a_max = capacity::capacity_amplitude_damping(gamma, tol)?.a_max;
    let r_max = (a_max * (1.0 - a_max)).sqrt();

    let boundary = (0..points).map(|k| {
        let theta = std::f64::consts::TAU * k as f64 / points as f64;
        ((1.0 + theta.cos()) / 2.0, theta.sin() / 2.0, false)
    });
    let optimal = [(a_max, r_max, true), (a_max, -r_max, true)];

    let mut table = Table::new(vec!["a_in", "b_in", "a_out", "b_out", "optimal"]);
    for (a, b, flagged) in boundary.chain(optimal) {
        let input = QubitState::real(a, b)?;
        let output = channel.apply(&input);
        table.push(vec![
            Cell::Num(input.a),
            Cell::Num(input.b.re),
            Cell::Num(output.a),
            Cell::Num(output.b.re),
            Cell::Flag(flagged),
        ]);
    }
    Ok(table)
}

pub fn ellipse(
    common: &CommonArgs,
    args: &EllipseArgs,
    file: &FileConfig,
) -> Result<Emitted, CliError> {
    let tol = resolve_tol(common, file)?;
    let gamma = args
        .gamma
        .or(file.gamma)
        .ok_or_else(|| invalid("--gamma is required"))?;
    let points = args
        .points
        .or(file.points)
        .unwrap_or(DEFAULT_ELLIPSE_POINTS);
    let table = ellipse_table(gamma, points, tol)?;
    let report = Report {
        command: "ellipse",
        inputs: json!({ "gamma": gamma, "points": points }),
        outputs: json!({ "rows": table.to_json() }),
        tolerances: json!({ "tol": tol }),
    };
    Ok(Emitted::ok(report, Some(table)))
}

pub fn resolve_oracle(
    args: &OracleArgs,
    file: &FileConfig,
) -> Result<(OracleConfig, f64), CliError> {
    let d = OracleConfig::default();
    let f = &file.oracle;
    let config = OracleConfig {
        n_states: args.n_states.or(f.n_states).unwrap_or(d.n_states),
        a_grid: args.a_grid.or(f.a_grid).unwrap_or(d.a_grid),
        phase_grid: args.phase_grid.or(f.phase_grid).unwrap_or(d.phase_grid),
        prob_grid: args.prob_grid.or(f.prob_grid).unwrap_or(d.prob_grid),
        restrict_real_b: if args.complex_b {
            false
        } else {
            f.restrict_real_b.unwrap_or(d.restrict_real_b)
        },
        budget: args.budget.or(f.budget).unwrap_or(d.budget),
        prune: if args.exhaustive {
            false
        } else {
            f.prune.unwrap_or(d.prune)
        },
    };
    config.validate()?;
    let bound = args.bound.or(f.bound).unwrap_or(DEFAULT_CERTIFY_BOUND);
    if !(bound >= 0.0 && bound.is_finite()) {
        return Err(invalid(format!(
            "--bound must be non-negative, got {bound}"
        )));
    }
    Ok((config, bound))
}

fn announce(config: &OracleConfig) {
    eprintln!(
        "qchan: oracle grid holds {} ensembles, evaluation budget {}",
        config.search_size(),
        config.budget
    );
}

fn oracle_config_json(config: &OracleConfig) -> Value {
    serde_json::to_value(config).expect("serializable config")
}

fn branch_maximizer(spec: ChannelSpec, tol: f64) -> Result<f64, CliError> {
    Ok(solve(spec, tol)?.a_max)
}

pub fn minimax(
    common: &CommonArgs,
    args: &MinimaxArgs,
    file: &FileConfig,
) -> Result<Emitted, CliError> {
    let tol = resolve_tol(common, file)?;
    let ad = |g: f64| ChannelSpec {
        kind: ChannelKind::Ad,
        param: g,
    };
    let dep = |l: f64| ChannelSpec {
        kind: ChannelKind::Dep,
        param: l,
    };
    let spec1 = args
        .ch1
        .or(args.gamma.map(ad))
        .or(file.ch1)
        .or(file.gamma.map(ad))
        .unwrap_or(ad(SEPARATION_GAMMA));
    let spec2 = args
        .ch2
        .or(args.lambda.map(dep))
        .or(file.ch2)
        .or(file.lambda.map(dep))
        .unwrap_or(dep(SEPARATION_LAMBDA));
    let weight = args.weight.or(file.weight).unwrap_or(DEFAULT_WEIGHT);
    let resolution = resolve_resolution(args.resolution, file);
    let certify = args.certify || file.certify.unwrap_or(false);
    let (oracle_config, bound) = resolve_oracle(&args.oracle, file)?;

    let pair = MixedChannelPair::new(make_channel(spec1)?, make_channel(spec2)?, weight)?;
    let mut result = mixtures::minimax_capacity(&pair, resolution)?;
    let maximizers = [branch_maximizer(spec1, tol)?, branch_maximizer(spec2, tol)?];

    let mut verdict = Ok(());
    let mut oracle_json = Value::Null;
    if certify {
        announce(&oracle_config);
        let (certified, outcome) =
            mixtures::certify_minimax(&result, &pair, &oracle_config, bound)?;
        result = certified;
        oracle_json = json!({
            "value": outcome.value,
            "gap": result.capacity_bits - outcome.value,
            "ensemble": outcome.ensemble,
            "evaluations": outcome.evaluations,
            "search_size": outcome.search_size,
            "config": oracle_config_json(&oracle_config),
        });
        if !result.certified_by_oracle {
            verdict = Err(CliError::Certification(format!(
                "oracle {} vs sup-min {} (bound {bound})",
                outcome.value, result.capacity_bits
            )));
        }
    }

    let report = Report {
        command: "minimax",
        inputs: json!({
            "ch1": spec1.to_string(),
            "ch2": spec2.to_string(),
            "weight1": weight,
            "certify": certify,
        }),
        outputs: json!({
            "capacity_bits": result.capacity_bits,
            "a_star": result.a_star,
            "min_branch": result.min_branch,
            "branch_capacities": result.branch_capacities,
            "branch_maximizers": maximizers,
            "min_branch_capacity": result.branch_capacities[0].min(result.branch_capacities[1]),
            "separation_gap": result.separation_gap(),
            "crossings": result.crossings,
            "certified_by_oracle": result.certified_by_oracle,
            "oracle": oracle_json,
        }),
        tolerances: json!({
            "resolution": resolution,
            "tol": tol,
            "certify_bound": bound,
            "lower_bound_slack": LOWER_BOUND_SLACK,
        }),
    };
    Ok(Emitted {
        report,
        table: None,
        verdict,
    })
}

pub fn certify(
    common: &CommonArgs,
    args: &CertifyArgs,
    file: &FileConfig,
) -> Result<Emitted, CliError> {
    let tol = resolve_tol(common, file)?;
    let spec = resolve_channel(&args.channel, file)?;
    let (config, bound) = resolve_oracle(&args.oracle, file)?;
    let solver = solve(spec, tol)?;
    announce(&config);
    let outcome = oracle::oracle_capacity(&make_channel(spec)?, &config)?;
    let difference = outcome.value - solver.capacity_bits;
    let certified = difference <= LOWER_BOUND_SLACK && difference >= -bound;

    let report = Report {
        command: "certify",
        inputs: json!({
            "channel": spec.kind,
            "param": spec.param,
            "oracle": oracle_config_json(&config),
        }),
        outputs: json!({
            "solver": capacity_json(&solver),
            "oracle_value": outcome.value,
            "oracle_ensemble": outcome.ensemble,
            "difference": difference,
            "evaluations": outcome.evaluations,
            "search_size": outcome.search_size,
            "certified": certified,
        }),
        tolerances: json!({
            "tol": tol,
            "bound": bound,
            "lower_bound_slack": LOWER_BOUND_SLACK,
        }),
    };
    let verdict = if certified {
        Ok(())
    } else {
        Err(CliError::Certification(format!(
            "oracle {} vs solver {} (difference {difference:e}, bound {bound})",
            outcome.value, solver.capacity_bits
        )))
    };
    Ok(Emitted {
        report,
        table: None,
        verdict,
    })
}
