//! Implementations of the five subcommands.

use crate::config::{resolve, resolve_required, Config};
use crate::output::{emit, format_f64, ratefit_path, Format, Table, Value};
use crate::pool::run_jobs;
use steinlaw::metrics::{self, Model};
use steinlaw::stein::SteinSolution;
use steinlaw::{oracle, LimitLaw};

/// Command failure with the CLI exit-code contract:
/// 1 validation, 2 bound violation, 3 numeric consistency.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    BoundViolation(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::BoundViolation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::BoundViolation(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<steinlaw::Error> for CliError {
    fn from(e: steinlaw::Error) -> CliError {
        match e {
            steinlaw::Error::NumericConsistency { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Write a report, surfacing i/o failures with the offending path.
fn emit_report(path: &str, content: &str) -> Result<(), CliError> {
    emit(path, content).map_err(|e| validation(format!("cannot write `{path}`: {e}")))
}

pub fn parse_model(s: &str) -> Result<Model, CliError> {
    match s {
        "curie-weiss" => Ok(Model::CurieWeiss),
        "monomer-dimer" => Ok(Model::MonomerDimer),
        other => Err(validation(format!(
            "invalid value for `model`: `{other}` (expected curie-weiss or monomer-dimer)"
        ))),
    }
}

fn parse_from_config<T: std::str::FromStr>(
    cfg: &Config,
    section: &str,
    key: &'static str,
) -> Result<Option<T>, CliError> {
    match cfg.get(section, key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| validation(format!("invalid value for `{key}` in config: `{raw}`"))),
    }
}

fn parse_list_from_config<T: std::str::FromStr>(
    cfg: &Config,
    section: &str,
    key: &'static str,
) -> Result<Option<Vec<T>>, CliError> {
    match cfg.get_list(section, key) {
        None => Ok(None),
        Some(items) => items
            .iter()
            .map(|raw| {
                raw.parse::<T>()
                    .map_err(|_| validation(format!("invalid value for `{key}` in config: `{raw}`")))
            })
            .collect::<Result<Vec<T>, CliError>>()
            .map(Some),
    }
}

fn resolve_format(cli: Option<String>, cfg: &Config, section: &str) -> Result<Format, CliError> {
    let raw = resolve(
        cli,
        cfg.get(section, "format").map(str::to_string),
        "csv".to_string(),
    );
    Format::parse(&raw).map_err(|e| validation(format!("invalid value for `format`: {e}")))
}

fn resolve_threads(cli: Option<usize>, cfg: &Config, section: &str) -> Result<usize, CliError> {
    let file: Option<usize> = parse_from_config(cfg, section, "threads")?;
    let n = match resolve(cli.map(Some), file.map(Some), None) {
        Some(n) => n,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    if n == 0 {
        return Err(validation("invalid value for `threads`: must be positive"));
    }
    Ok(n)
}

fn default_laws() -> Vec<(u32, f64)> {
    vec![(1, 0.5), (2, 1.0 / 12.0), (3, 1.0)]
}

fn resolve_laws(
    ks: Vec<u32>,
    als: Vec<f64>,
    cfg: &Config,
    section: &str,
) -> Result<Vec<(u32, f64)>, CliError> {
    let ks = if ks.is_empty() {
        parse_list_from_config::<u32>(cfg, section, "k")?.unwrap_or_default()
    } else {
        ks
    };
    let als = if als.is_empty() {
        parse_list_from_config::<f64>(cfg, section, "a")?.unwrap_or_default()
    } else {
        als
    };
    if ks.is_empty() && als.is_empty() {
        return Ok(default_laws());
    }
    if ks.len() != als.len() {
        return Err(validation(format!(
            "invalid law list: {} values for `k` but {} for `a`",
            ks.len(),
            als.len()
        )));
    }
    Ok(ks.into_iter().zip(als).collect())
}

// ---------------------------------------------------------------------------
// limit-law

pub struct LimitLawOpts {
    pub ks: Vec<u32>,
    pub als: Vec<f64>,
    pub format: Option<String>,
    pub out: Option<String>,
}

pub fn run_limit_law(opts: LimitLawOpts, cfg: &Config) -> Result<i32, CliError> {
    let section = "limit-law";
    let laws = resolve_laws(opts.ks, opts.als, cfg, section)?;
    let format = resolve_format(opts.format, cfg, section)?;
    let out = resolve(opts.out, cfg.get(section, "out").map(str::to_string), "-".into());

    let mut table = Table::new(vec![
        "k",
        "a",
        "b",
        "b_quadrature",
        "moment_m1",
        "moment_m2",
        "moment_m4",
        "moment_m6",
        "tail_bound_min_margin",
    ]);
    let mut violation = None;
    for (k, a) in laws {
        let law = LimitLaw::new(k, a)?;
        let mut margin = f64::INFINITY;
        for i in 1..=800 {
            let x = i as f64 * 0.01;
            margin = margin.min(law.tail_bound(x)? - law.tail(x));
        }
        if margin < 0.0 {
            violation = Some(format!("tail bound violated for k={k}, a={a} (margin {margin:e})"));
        }
        table.push(vec![
            Value::Int(k as u64),
            Value::Float(a),
            Value::Float(law.b()),
            Value::Float(steinlaw::limit_law::quadrature_normalizer(k, a)),
            Value::Float(law.abs_moment(1.0)?),
            Value::Float(law.abs_moment(2.0)?),
            Value::Float(law.abs_moment(4.0)?),
            Value::Float(law.abs_moment(6.0)?),
            Value::Float(margin),
        ]);
    }
    emit_report(&out, &table.render(format))?;
    match violation {
        Some(msg) => Err(CliError::BoundViolation(msg)),
        None => Ok(0),
    }
}

// ---------------------------------------------------------------------------
// stein-check

pub struct SteinCheckOpts {
    pub ks: Vec<u32>,
    pub als: Vec<f64>,
    pub zs: Vec<f64>,
    pub grid_points: Option<usize>,
    pub grid_span: Option<f64>,
    pub format: Option<String>,
    pub out: Option<String>,
}

pub fn run_stein_check(opts: SteinCheckOpts, cfg: &Config) -> Result<i32, CliError> {
    let section = "stein";
    let laws = resolve_laws(opts.ks, opts.als, cfg, section)?;
    let zs = if opts.zs.is_empty() {
        parse_list_from_config::<f64>(cfg, section, "z")?
            .unwrap_or_else(|| vec![-5.0, -1.0, 0.0, 1.0, 5.0, 8.0])
    } else {
        opts.zs
    };
    let grid_points = resolve(opts.grid_points, parse_from_config(cfg, section, "grid-points")?, 200);
    let grid_span = resolve(opts.grid_span, parse_from_config(cfg, section, "grid-span")?, 10.0);
    if grid_points < 2 {
        return Err(validation("invalid value for `grid-points`: need at least 2"));
    }
    if !(grid_span > 0.0) {
        return Err(validation("invalid value for `grid-span`: must be positive"));
    }
    let format = resolve_format(opts.format, cfg, section)?;
    let out = resolve(opts.out, cfg.get(section, "out").map(str::to_string), "-".into());

    let mut table = Table::new(vec![
        "k",
        "a",
        "z",
        "max_residual",
        "max_f",
        "f_cap",
        "max_f_prime",
    ]);
    let mut bound_violation = None;
    let mut residual_failure = None;
    for (k, a) in laws {
        let law = LimitLaw::new(k, a)?;
        let cap = 1.0 / (2.0 * law.b());
        for &z in &zs {
            if !z.is_finite() {
                return Err(validation(format!("invalid value for `z`: {z}")));
            }
            let sol = SteinSolution::new(law, z);
            let mut max_residual: f64 = 0.0;
            let mut max_f: f64 = 0.0;
            let mut max_f_prime: f64 = 0.0;
            for i in 0..grid_points {
                let x = -grid_span + 2.0 * grid_span * i as f64 / (grid_points - 1) as f64;
                if (x - z).abs() < 1e-6 {
                    continue;
                }
                max_residual = max_residual.max(sol.residual(x).abs());
                let f = sol.f(x);
                max_f = max_f.max(f);
                max_f_prime = max_f_prime.max(sol.f_prime(x).abs());
                if f <= 0.0 && sol.log_f(x) >= -730.0 {
                    bound_violation = Some(format!("f not positive at k={k}, z={z}, x={x}"));
                }
            }
            if max_f > cap * (1.0 + 1e-12) {
                bound_violation = Some(format!("f exceeds 1/(2b) at k={k}, z={z}"));
            }
            if max_f_prime > 1.0 + 1e-12 {
                bound_violation = Some(format!("|f'| exceeds 1 at k={k}, z={z}"));
            }
            if max_residual >= 1e-8 {
                residual_failure = Some(format!(
                    "Stein residual {max_residual:e} at k={k}, z={z} exceeds 1e-8"
                ));
            }
            table.push(vec![
                Value::Int(k as u64),
                Value::Float(a),
                Value::Float(z),
                Value::Float(max_residual),
                Value::Float(max_f),
                Value::Float(cap),
                Value::Float(max_f_prime),
            ]);
        }
    }
    emit_report(&out, &table.render(format))?;
    if let Some(msg) = bound_violation {
        return Err(CliError::BoundViolation(msg));
    }
    if let Some(msg) = residual_failure {
        return Err(CliError::Numeric(msg));
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// audit

pub struct AuditOpts {
    pub model: Option<String>,
    pub ns: Vec<u64>,
    pub ps: Vec<f64>,
    pub beta: Option<f64>,
    pub a_rule: Option<String>,
    pub a: Option<f64>,
    pub format: Option<String>,
    pub out: Option<String>,
    pub threads: Option<usize>,
}

pub const AUDIT_COLUMNS: [&str; 12] = [
    "model",
    "n",
    "p",
    "distance",
    "argsup_z",
    "term_condvar",
    "term_remainder",
    "term_a",
    "term_a3",
    "term_delta4",
    "implied_const_rate",
    "implied_const_papernorm",
];

enum TruncationRule {
    SupportBound,
    Fixed(f64),
}

fn resolve_sweep(
    opts_model: Option<String>,
    ns: Vec<u64>,
    ps: Vec<f64>,
    cfg: &Config,
    section: &str,
) -> Result<(Model, Vec<u64>, Vec<f64>), CliError> {
    let model_raw = resolve_required(
        opts_model,
        cfg.get(section, "model").map(str::to_string),
        "model",
    )
    .map_err(validation)?;
    let model = parse_model(&model_raw)?;
    let ns = if ns.is_empty() {
        parse_list_from_config::<u64>(cfg, section, "n")?.unwrap_or_default()
    } else {
        ns
    };
    let ps = if ps.is_empty() {
        parse_list_from_config::<f64>(cfg, section, "p")?.unwrap_or_default()
    } else {
        ps
    };
    if ns.is_empty() {
        return Err(validation("invalid value for `n`: list must be nonempty"));
    }
    if !ns.windows(2).all(|w| w[0] < w[1]) {
        return Err(validation("invalid value for `n`: sizes must be strictly increasing"));
    }
    if ps.is_empty() {
        return Err(validation("invalid value for `p`: list must be nonempty"));
    }
    if ps.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(validation("invalid value for `p`: exponents must be finite and >= 0"));
    }
    Ok((model, ns, ps))
}

struct AuditCell {
    n: u64,
    p: f64,
    distance: f64,
    argsup: f64,
    terms: metrics::BoundReport,
    implied_rate: f64,
    implied_papernorm: f64,
}

fn audit_one_size(
    model: Model,
    n: u64,
    ps: &[f64],
    rule: &TruncationRule,
    law: &LimitLaw,
) -> Result<Vec<AuditCell>, CliError> {
    let (w, diag) = metrics::model_pair(model, n)?;
    let a = match rule {
        TruncationRule::SupportBound => diag.delta_support_bound,
        TruncationRule::Fixed(value) => *value,
    };
    let terms = metrics::bound_terms(&diag, &w, a)?;
    let rate = model.rate_exponent();
    let nf = n as f64;
    let mut cells = Vec::with_capacity(ps.len());
    for &p in ps {
        let profile = metrics::weighted_distance(&w, law, p)?;
        let p_norm = if p == 0.0 { 1.0 } else { p.powf(p / 2.0) };
        let theorem_prefactor = if p == 0.0 {
            1.0
        } else {
            p.powf(p / law.k() as f64) + w.abs_moment(2.0 * p)
        };
        cells.push(AuditCell {
            n,
            p,
            distance: profile.supremum,
            argsup: profile.argsup,
            terms,
            implied_rate: profile.supremum * nf.powf(rate) / p_norm,
            implied_papernorm: profile.supremum * nf.powf(rate) / theorem_prefactor,
        });
    }
    Ok(cells)
}

pub fn run_audit(opts: AuditOpts, cfg: &Config) -> Result<i32, CliError> {
    let section = "audit";
    let (model, ns, ps) = resolve_sweep(opts.model, opts.ns, opts.ps, cfg, section)?;
    let beta = resolve(opts.beta, parse_from_config(cfg, section, "beta")?, 1.0);
    if model == Model::CurieWeiss && beta != 1.0 {
        return Err(validation(
            "invalid value for `beta`: the audit evaluates critical-point diagnostics, which require beta = 1",
        ));
    }
    let rule_raw = resolve(
        opts.a_rule,
        cfg.get(section, "a-rule").map(str::to_string),
        "support-bound".to_string(),
    );
    let a_value = resolve(opts.a, parse_from_config(cfg, section, "a")?, f64::NAN);
    let rule = match rule_raw.as_str() {
        "support-bound" => TruncationRule::SupportBound,
        "fixed" => {
            if !(a_value > 0.0) {
                return Err(validation(
                    "invalid value for `a`: a-rule=fixed requires a finite truncation level a > 0",
                ));
            }
            TruncationRule::Fixed(a_value)
        }
        other => {
            return Err(validation(format!(
                "invalid value for `a-rule`: `{other}` (expected support-bound or fixed)"
            )))
        }
    };
    let format = resolve_format(opts.format, cfg, section)?;
    let out = resolve(opts.out, cfg.get(section, "out").map(str::to_string), "-".into());
    let threads = resolve_threads(opts.threads, cfg, section)?;

    let law = metrics::limiting_law(model)?;
    let results = run_jobs(ns.len(), threads, |i| audit_one_size(model, ns[i], &ps, &rule, &law));

    let mut table = Table::new(AUDIT_COLUMNS.to_vec());
    let mut per_p_distances: Vec<Vec<f64>> = vec![Vec::new(); ps.len()];
    for cells in results {
        let cells = cells?;
        for (j, cell) in cells.iter().enumerate() {
            per_p_distances[j].push(cell.distance);
            table.push(vec![
                Value::Text(model.name().to_string()),
                Value::Int(cell.n),
                Value::Float(cell.p),
                Value::Float(cell.distance),
                Value::Float(cell.argsup),
                Value::Float(cell.terms.term_condvar),
                Value::Float(cell.terms.term_remainder),
                Value::Float(cell.terms.term_a),
                Value::Float(cell.terms.term_a3),
                Value::Float(cell.terms.term_delta4),
                Value::Float(cell.implied_rate),
                Value::Float(cell.implied_papernorm),
            ]);
        }
    }
    emit_report(&out, &table.render(format))?;

    // companion rate-fit table, one row per weight exponent
    if ns.len() >= 3 {
        let fit_table = rate_fit_table(model, &ns, &ps, &per_p_distances)?;
        let fit_out = ratefit_path(&out, format);
        if fit_out == "-" {
            println!();
        }
        emit_report(&fit_out, &fit_table.render(format))?;
    }
    Ok(0)
}

pub const RATEFIT_COLUMNS: [&str; 7] = [
    "model",
    "p",
    "slope",
    "intercept",
    "r_squared",
    "empirical_constant",
    "const_at_target_rate",
];

fn rate_fit_table(
    model: Model,
    ns: &[u64],
    ps: &[f64],
    per_p_distances: &[Vec<f64>],
) -> Result<Table, CliError> {
    let mut table = Table::new(RATEFIT_COLUMNS.to_vec());
    for (j, &p) in ps.iter().enumerate() {
        let fit = metrics::rate_fit(ns, &per_p_distances[j])?;
        let target = metrics::empirical_constant(ns, &per_p_distances[j], -model.rate_exponent());
        table.push(vec![
            Value::Text(model.name().to_string()),
            Value::Float(p),
            Value::Float(fit.slope),
            Value::Float(fit.intercept),
            Value::Float(fit.r_squared),
            Value::Float(fit.empirical_constant),
            Value::Float(target),
        ]);
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// rate-fit

pub struct RateFitOpts {
    pub model: Option<String>,
    pub ns: Vec<u64>,
    pub ps: Vec<f64>,
    pub format: Option<String>,
    pub out: Option<String>,
    pub threads: Option<usize>,
}

pub fn run_rate_fit(opts: RateFitOpts, cfg: &Config) -> Result<i32, CliError> {
    let section = "rate-fit";
    let (model, ns, ps) = resolve_sweep(opts.model, opts.ns, opts.ps, cfg, section)?;
    if ns.len() < 3 {
        return Err(validation("invalid value for `n`: rate fitting needs at least 3 sizes"));
    }
    let format = resolve_format(opts.format, cfg, section)?;
    let out = resolve(opts.out, cfg.get(section, "out").map(str::to_string), "-".into());
    let threads = resolve_threads(opts.threads, cfg, section)?;

    let law = metrics::limiting_law(model)?;
    let results = run_jobs(ns.len(), threads, |i| -> Result<Vec<f64>, CliError> {
        let (w, _) = metrics::model_pair(model, ns[i])?;
        ps.iter()
            .map(|&p| Ok(metrics::weighted_distance(&w, &law, p)?.supremum))
            .collect()
    });
    let mut per_p: Vec<Vec<f64>> = vec![Vec::new(); ps.len()];
    for r in results {
        let distances = r?;
        for (j, d) in distances.into_iter().enumerate() {
            per_p[j].push(d);
        }
    }
    let table = rate_fit_table(model, &ns, &ps, &per_p)?;
    emit_report(&out, &table.render(format))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// oracle

pub struct OracleOpts {
    pub models: Vec<String>,
    pub max_n: Option<u32>,
}

pub fn run_oracle(opts: OracleOpts, cfg: &Config) -> Result<i32, CliError> {
    let section = "oracle";
    let models: Vec<String> = if opts.models.is_empty() {
        cfg.get_list(section, "model")
            .unwrap_or_else(|| vec!["curie-weiss".into(), "monomer-dimer".into()])
    } else {
        opts.models
    };
    if models.is_empty() {
        return Err(validation("invalid value for `model`: list must be nonempty"));
    }
    let parsed: Vec<Model> = models
        .iter()
        .map(|m| parse_model(m))
        .collect::<Result<_, _>>()?;
    let max_n = resolve(opts.max_n, parse_from_config(cfg, section, "max-n")?, 10);
    if max_n < 2 {
        return Err(validation("invalid value for `max-n`: need at least 2"));
    }
    if max_n > oracle::SPIN_CAP {
        return Err(validation(format!(
            "invalid value for `max-n`: {max_n} exceeds the spin enumeration cap {}",
            oracle::SPIN_CAP
        )));
    }
    if parsed.contains(&Model::MonomerDimer) && max_n > oracle::DIMER_CAP {
        return Err(validation(format!(
            "invalid value for `max-n`: {max_n} exceeds the dimer enumeration cap {}",
            oracle::DIMER_CAP
        )));
    }

    const TOL: f64 = 1e-12;
    for model in parsed {
        for n in 2..=max_n {
            let cmp = match model {
                Model::CurieWeiss => oracle::check_curie_weiss(n)?,
                Model::MonomerDimer => oracle::check_monomer_dimer(n)?,
            };
            println!(
                "{} n={n}: law gap {} drift gap {} square gap {} fourth gap {}{}",
                model.name(),
                format_f64(cmp.law_gap),
                format_f64(cmp.drift_gap),
                format_f64(cmp.square_gap),
                format_f64(cmp.fourth_gap),
                if model == Model::MonomerDimer {
                    format!(" matching-count gap {}", cmp.matching_count_gap)
                } else {
                    String::new()
                }
            );
            if !cmp.passes(TOL) {
                return Err(CliError::Numeric(format!(
                    "oracle mismatch for {} at n={n}: max gap {} (tolerance {TOL:e}), matching-count gap {}",
                    model.name(),
                    format_f64(cmp.max_float_gap()),
                    cmp.matching_count_gap
                )));
            }
        }
    }
    println!("all enumeration checks passed (tolerance {TOL:e})");
    Ok(0)
}

