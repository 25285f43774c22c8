//! Subcommand dispatch and report generation.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use orbitlab_core::dynamics::{orbit_sequence, Budget, ExtRational, Halt};
use orbitlab_core::exact_numbers::{rational_str, ExactRational, PrimeSet};
use orbitlab_core::heights::{growth_classify, height_sequence, log_heights, valuation_growth};
use orbitlab_core::holonomic::{expand, ode_to_recurrence, PRecurrence};
use orbitlab_core::multgroup::{MultSubgroup, NotMember};
use orbitlab_core::structure::{
    ap_decompose, banach_density, certify_rational, find_dependence, membership_set, torus_model_from_values,
    verify_torus_model, zero_pattern, Certificate, StructureParams, TorusReport,
};

use crate::expr::parse_constant;
use crate::input::{parse_system, InputError, Problem};

pub const SCHEMA: u32 = 1;
pub const MIN_BUDGET: u64 = 1000;
pub const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Subcommand)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Iterate the map and record the orbit.
    Orbit,
    /// Membership of the sequence in the group, densities and AP structure.
    Member,
    /// Exponent witness for each term.
    Decompose,
    /// Multiplicative dependence among consecutive terms.
    Depend,
    /// Fit and verify a torus model of the exponent trajectories.
    Torus,
    /// Height growth and valuation profiles.
    Heights,
    /// Rationality certificate for a recurrence.
    Certify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Orbit => "orbit",
            Command::Member => "member",
            Command::Decompose => "decompose",
            Command::Depend => "depend",
            Command::Torus => "torus",
            Command::Heights => "heights",
            Command::Certify => "certify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "orbitlab", version, about = "Arithmetic structure of orbits and holonomic sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON input document.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Horizon N: indices 0..=N are examined.
    #[arg(long, global = true, default_value_t = 100)]
    pub n: usize,
    /// Largest period tried.
    #[arg(long, global = true, default_value_t = 24)]
    pub lmax: usize,
    /// Density tolerance.
    #[arg(long, global = true, default_value = "1/20")]
    pub eps: String,
    /// Window size; repeatable.
    #[arg(long, global = true)]
    pub window: Vec<usize>,
    /// Digit budget per coordinate.
    #[arg(long, global = true, env = "ORBITLAB_BUDGET")]
    pub budget: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub n: usize,
    pub l_max: usize,
    #[serde(with = "rational_str")]
    pub eps: ExactRational,
    #[serde(with = "rational_str")]
    pub tail_fraction: ExactRational,
    pub windows: Vec<usize>,
    pub budget: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<Box<InputError>>,
}

impl CliError {
    pub fn new(kind: &str, message: impl Into<String>) -> CliError {
        CliError { kind: kind.to_string(), message: message.into(), input: None }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> CliError {
        CliError { kind: "input".into(), message: e.to_string(), input: Some(Box::new(e)) }
    }
}

fn fail<E: std::fmt::Display>(kind: &'static str) -> impl Fn(E) -> CliError {
    move |e| CliError::new(kind, e.to_string())
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<RunConfig, CliError> {
        let eps = parse_constant(&cli.eps).map_err(|e| CliError::new("config", format!("--eps: {e}")))?;
        let cfg = RunConfig {
            command: cli.command,
            input: cli.input,
            n: cli.n,
            l_max: cli.lmax,
            eps,
            tail_fraction: StructureParams::default().tail_fraction,
            windows: cli.window,
            budget: cli.budget.unwrap_or(DEFAULT_BUDGET),
            out: cli.out,
            format: cli.format,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::new("config", m));
        if self.n < 1 {
            return bad("--n must be at least 1".into());
        }
        if self.l_max < 1 {
            return bad("--lmax must be at least 1".into());
        }
        if self.budget < MIN_BUDGET {
            return bad(format!("--budget must be at least {MIN_BUDGET} digits"));
        }
        let half = ExactRational::new(1.into(), 2.into());
        if self.eps <= ExactRational::from_integer(0.into()) || self.eps >= half {
            return bad("--eps must lie strictly between 0 and 1/2".into());
        }
        if self.windows.contains(&0) {
            return bad("--window must be positive".into());
        }
        if self.format == Format::Csv && !matches!(self.command, Command::Member | Command::Heights) {
            return bad(format!("csv output is only available for member and heights, not {}", self.command.name()));
        }
        Ok(())
    }

    fn params(&self) -> StructureParams {
        StructureParams { eps: self.eps.clone(), tail_fraction: self.tail_fraction.clone(), l_max: self.l_max }
    }
}

/// Exit status plus the report text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub body: String,
}

/// Runs one command, reading the input file named in the configuration.
pub fn run(cfg: &RunConfig) -> Outcome {
    let text = match &cfg.input {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return error_outcome(cfg, &CliError::new("io", format!("{}: {e}", path.display()))),
        },
        None => "{}".to_string(),
    };
    run_text(cfg, &text)
}

/// Runs one command on the given input document.
pub fn run_text(cfg: &RunConfig, text: &str) -> Outcome {
    let result = cfg.validate().and_then(|()| parse_system(text).map_err(CliError::from)).and_then(|p| dispatch(cfg, &p));
    match result {
        Ok(Report::Json { result, exit_code }) => Outcome { exit_code, body: envelope(cfg, "result", result) },
        Ok(Report::Csv(body)) => Outcome { exit_code: 0, body },
        Err(e) => error_outcome(cfg, &e),
    }
}

/// Error report for failures that happen before a configuration exists.
pub fn error_report(command: Option<Command>, e: &CliError) -> String {
    let body = json!({
        "schema": SCHEMA,
        "command": command.map(Command::name),
        "error": e,
    });
    let mut s = serde_json::to_string_pretty(&body).expect("report serializes");
    s.push('\n');
    s
}

fn error_outcome(cfg: &RunConfig, e: &CliError) -> Outcome {
    Outcome { exit_code: 1, body: envelope(cfg, "error", serde_json::to_value(e).expect("error serializes")) }
}

fn envelope(cfg: &RunConfig, key: &str, payload: Value) -> String {
    let mut root = serde_json::Map::new();
    root.insert("schema".into(), json!(SCHEMA));
    root.insert("command".into(), json!(cfg.command.name()));
    root.insert("parameters".into(), parameters(cfg));
    root.insert(key.into(), payload);
    let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("report serializes");
    s.push('\n');
    s
}

fn parameters(cfg: &RunConfig) -> Value {
    json!({
        "input": cfg.input.as_ref().map(|p| p.display().to_string()),
        "n": cfg.n,
        "l_max": cfg.l_max,
        "eps": cfg.eps.to_string(),
        "tail_fraction": cfg.tail_fraction.to_string(),
        "windows": cfg.windows,
        "budget": cfg.budget,
        "format": cfg.format,
    })
}

enum Report {
    Json { result: Value, exit_code: i32 },
    Csv(String),
}

fn ok(result: Value) -> Result<Report, CliError> {
    Ok(Report::Json { result, exit_code: 0 })
}

/// Terms of the sequence under study with the index of the first one.
struct Sequence {
    source: &'static str,
    offset: u64,
    values: Vec<ExtRational>,
    halt: Option<Halt>,
}

impl Sequence {
    fn finite(&self) -> Result<Vec<ExactRational>, CliError> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.finite().cloned().ok_or_else(|| {
                    CliError::new("sequence", format!("term of index {} is infinite", self.offset + i as u64))
                })
            })
            .collect()
    }

    fn header(&self) -> Value {
        json!({ "source": self.source, "offset": self.offset, "terms": self.values.len(), "halt": self.halt })
    }
}

fn recurrence_of(problem: &Problem) -> Result<Option<PRecurrence>, CliError> {
    if let Some(r) = &problem.recurrence {
        return Ok(Some(r.clone()));
    }
    match &problem.ode {
        Some(ode) => ode_to_recurrence(ode).map(Some).map_err(fail("holonomic")),
        None => Ok(None),
    }
}

fn sequence(cfg: &RunConfig, problem: &Problem) -> Result<Sequence, CliError> {
    if let Some(values) = &problem.values {
        let values = values.iter().take(cfg.n + 1).cloned().collect();
        return Ok(Sequence { source: "values", offset: 0, values, halt: None });
    }
    if let Some(sys) = &problem.system {
        let rec = orbit_sequence(&sys.map, &sys.observable, &sys.start, cfg.n, Budget::digits(cfg.budget))
            .map_err(fail("dynamics"))?;
        return Ok(Sequence { source: "system", offset: 0, values: rec.values, halt: Some(rec.halt) });
    }
    if let Some(rec) = &problem.recurrence {
        let values = expand(rec, cfg.n).map_err(fail("holonomic"))?;
        return Ok(Sequence {
            source: "recurrence",
            offset: rec.shift(),
            values: values.into_iter().map(ExtRational::Finite).collect(),
            halt: None,
        });
    }
    if let Some(ode) = &problem.ode {
        let values = expand(ode, cfg.n).map_err(fail("holonomic"))?;
        return Ok(Sequence {
            source: "ode",
            offset: 0,
            values: values.into_iter().map(ExtRational::Finite).collect(),
            halt: None,
        });
    }
    Err(CliError::new("input", "no sequence: give values, a map, a recurrence or an ode"))
}

fn group(problem: &Problem) -> Result<&MultSubgroup, CliError> {
    problem.group.as_ref().ok_or_else(|| CliError::new("input", "this command needs generators"))
}

fn prime_set(problem: &Problem) -> Option<PrimeSet> {
    problem.primes.clone().or_else(|| problem.group.as_ref().map(|g| g.support().clone()))
}

fn strs(v: &[BigInt]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn dispatch(cfg: &RunConfig, problem: &Problem) -> Result<Report, CliError> {
    match cfg.command {
        Command::Orbit => cmd_orbit(cfg, problem),
        Command::Member => cmd_member(cfg, problem),
        Command::Decompose => cmd_decompose(cfg, problem),
        Command::Depend => cmd_depend(cfg, problem),
        Command::Torus => cmd_torus(cfg, problem),
        Command::Heights => cmd_heights(cfg, problem),
        Command::Certify => cmd_certify(cfg, problem),
    }
}

fn cmd_orbit(cfg: &RunConfig, problem: &Problem) -> Result<Report, CliError> {
    let sys = problem.system.as_ref().ok_or_else(|| CliError::new("input", "orbit needs a map and a start point"))?;
    let record = orbit_sequence(&sys.map, &sys.observable, &sys.start, cfg.n, Budget::digits(cfg.budget))
        .map_err(fail("dynamics"))?;
    let exit_code = if matches!(record.halt, Halt::BudgetExceeded { .. }) { 1 } else { 0 };
    let result = serde_json::to_value(&record).expect("orbit serializes");
    Ok(Report::Json { result, exit_code })
}

fn default_windows(len: usize) -> Vec<usize> {
    let mut w: Vec<usize> = [len / 8, len / 4, len / 2].into_iter().map(|w| w.max(1)).collect();
    w.dedup();
    w
}

fn cmd_member(cfg: &RunConfig, problem: &Problem) -> Result<Report, CliError> {
    let g = group(problem)?;
    let seq = sequence(cfg, problem)?;
    let set = membership_set(&seq.values, g);
    if cfg.format == Format::Csv {
        let mut out = String::from("n,member,zero\n");
        for (i, (&m, &z)) in set.bits().iter().zip(set.zero_bits()).enumerate() {
            writeln!(out, "{},{},{}", seq.offset + i as u64, m as u8, z as u8).expect("string write");
        }
        return Ok(Report::Csv(out));
    }
    let windows = if cfg.windows.is_empty() { default_windows(set.len()) } else { cfg.windows.clone() };
    let densities = windows
        .iter()
        .map(|&w| banach_density(&set, w).map(|d| json!({ "window": w, "density": d.to_string() })))
        .collect::<Result<Vec<_>, _>>()
        .map_err(fail("structure"))?;
    let finite: Vec<ExactRational> =
        seq.values.iter().map(|v| v.finite().cloned().unwrap_or_else(|| ExactRational::from_integer(1.into()))).collect();
    ok(json!({
        "sequence": seq.header(),
        "membership": set,
        "densities": densities,
        "ap_decomposition": ap_decompose(&set, &cfg.params()),
        "zero_pattern": zero_pattern(&finite, finite.len().saturating_sub(1)),
    }))
}

fn cmd_decompose(cfg: &RunConfig, problem: &Problem) -> Result<Report, CliError> {
    let g = group(problem)?;
    let seq = sequence(cfg, problem)?;
    let entries: Vec<Value> = seq
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let n = seq.offset + i as u64;
            match v {
                ExtRational::Infinity => json!({ "n": n, "value": "inf", "member": false, "reason": "infinite" }),
                ExtRational::Finite(q) => match g.contains(q) {
                    Ok(w) => json!({
                        "n": n,
                        "value": q.to_string(),
                        "member": true,
                        "exponents": strs(&w.exponents),
                        "torsion": w.torsion,
                    }),
                    Err(reason) => json!({ "n": n, "value": q.to_string(), "member": false, "reason": reason_value(&reason) }),
                },
            }
        })
        .collect();
    ok(json!({ "sequence": seq.header(), "generators": g.to_def(), "terms": entries }))
}

fn reason_value(r: &NotMember) -> Value {
    serde_json::to_value(r).expect("reason serializes")
}

fn cmd_depend(cfg: &RunConfig, problem: &Problem) -> Result<Report, CliError> {
    let primes = prime_set(problem).ok_or_else(|| CliError::new("input", "depend needs primes or generators"))?;
    let seq = sequence(cfg, problem)?;
    let values = seq.finite()?;
    let window = cfg.windows.first().copied().unwrap_or(2);
    let relation = find_dependence(&values, window, &primes).map_err(fail("structure"))?;
    let verified = relation.as_ref().map(|r| r.holds_on(&values));
    ok(json!({
        "sequence": seq.header(),
        "primes": primes,
        "window": window,
        "relation": relation,
        "verified": verified,
    }))
}

fn cmd_torus(cfg: &RunConfig, problem: &Problem) -> Result<Report, CliError> {
    let g = group(problem)?;
    let seq = sequence(cfg, problem)?;
    let values = seq.finite()?;
    let Some(model) = torus_model_from_values(&values, g).map_err(fail("structure"))? else {
        return Ok(Report::Json { result: json!({ "sequence": seq.header(), "model": null }), exit_code: 2 });
    };
    let horizon = values.len() - 1;
    let verification = verify_torus_model(&model, &values, horizon).map_err(fail("structure"))?;
    let exit_code = if matches!(verification, TorusReport::Verified { .. }) { 0 } else { 2 };
    let result = json!({
        "sequence": seq.header(),
        "model": {
            "generators": g.to_def(),
            "affine": model.affine,
            "v0": strs(&model.v0),
            "q": model.q.iter().map(|r| strs(r)).collect::<Vec<_>>(),
            "constant": model.constant.to_string(),
        },
        "verification": verification,
    });
    Ok(Report::Json { result, exit_code })
}

fn cmd_heights(cfg: &RunConfig, problem: &Problem) -> Result<Report, CliError> {
    let seq = sequence(cfg, problem)?;
    let values = seq.finite()?;
    let heights = height_sequence(&values).map_err(fail("heights"))?;
    if cfg.format == Format::Csv {
        let mut out = String::from("n,height,log\n");
        for (i, h) in heights.iter().enumerate() {
            writeln!(out, "{},{},{}", seq.offset + i as u64, h.max, h.log).expect("string write");
        }
        return Ok(Report::Csv(out));
    }
    let growth = growth_classify(&heights).map_err(fail("heights"))?;
    let valuations = match prime_set(problem) {
        Some(ps) => ps
            .primes()
            .iter()
            .map(|&p| valuation_growth(&values, p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(fail("heights"))?,
        None => Vec::new(),
    };
    ok(json!({
        "sequence": seq.header(),
        "growth": growth,
        "log_heights": log_heights(&heights),
        "valuations": valuations,
    }))
}

fn cmd_certify(cfg: &RunConfig, problem: &Problem) -> Result<Report, CliError> {
    let g = group(problem)?;
    let rec = recurrence_of(problem)?.ok_or_else(|| CliError::new("input", "certify needs a recurrence or an ode"))?;
    let n_terms = cfg.n + 1;
    let cert = certify_rational(&rec, g, n_terms, cfg.l_max).map_err(fail("structure"))?;
    let (exit_code, closed_form) = match &cert {
        Certificate::Rational(form) => (0, Some(form.render("x"))),
        Certificate::Fail(_) => (2, None),
    };
    let result = json!({
        "offset": rec.shift(),
        "terms": n_terms,
        "certificate": cert,
        "closed_form": closed_form,
    });
    Ok(Report::Json { result, exit_code })
}
