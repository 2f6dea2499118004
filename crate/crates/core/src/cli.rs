//! Command-line front end.
//!
//! Every command prints an envelope `{command, inputs, result, precision,
//! version}`. The `inputs` block holds the raw flag values, so feeding
//! `command` plus `--flag value` pairs back reproduces the run. With
//! `--format csv` only the result table is printed, using the same
//! 17-significant-digit numbers as the JSON.
//!
//! Exit codes: 0 success, 1 numeric failure (payload on stdout), 2 usage.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Number, Value};

use crate::binom::{
    significance_curve, significance_with, tail_continuum, tail_discrete, uniform_grid,
    SignificanceMethod, SignificanceQuery, TrialObservation, DEFAULT_CURVE_POINTS,
};
use crate::bivariate::{superiority, superiority_exact, BivariateDesign};
use crate::contdist::{
    fit_truncated_gaussian, mean_sampling_distribution, superiority_gaussian,
    superiority_tabulated, truncated_moments, DiscreteDistribution, GaussianSpec, TruncatedMoments,
};
use crate::error::{domain, Error, Result};
use crate::mc::{mc_significance, mc_superiority, McConfig};
use crate::quadrature::QuadratureConfig;
use crate::samplesize::{required_trials, required_trials_bivariate};
use crate::specfun::Accuracy;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// MC disagreement threshold for `verify`, in standard errors.
pub const VERIFY_SIGMAS: f64 = 4.0;

#[derive(Debug, Parser)]
#[command(
    name = "binsig",
    version,
    about = "Continuum-limit binomial significance and trial sizing"
)]
struct Cli {
    /// Uniform panels for bivariate quadrature
    #[arg(long, global = true, default_value_t = 10_000)]
    panels: usize,
    /// Relative tolerance for panel doubling
    #[arg(long, global = true, default_value_t = 1e-9)]
    rel_tol: f64,
    /// Monte Carlo seed
    #[arg(long, global = true, default_value_t = McConfig::default().seed)]
    seed: u64,
    /// Monte Carlo draws
    #[arg(long, global = true, default_value_t = McConfig::default().draws)]
    draws: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Posterior probability that the true efficacy is at least Q0
    Significance(SignificanceArgs),
    /// Significance over a grid of thresholds (columns Q0,p)
    Curve(CurveArgs),
    /// Probability of observing more than a fraction q of successes
    Tail(TailArgs),
    /// Smallest single-arm trial reaching a target significance
    SampleSize(SampleSizeArgs),
    /// Superiority of a test arm over a control arm
    Bivariate(BivariateArgs),
    /// Smallest placebo-controlled trial reaching a target superiority
    BivariateSampleSize(BivariateSampleSizeArgs),
    /// P(x2 >= x1 + delta) for Gaussian or tabulated measurements
    Superiority(SuperiorityArgs),
    /// Exact distribution of the mean of n draws from a tabulated distribution
    MeanDist(MeanDistArgs),
    /// Recover a Gaussian from moments observed on x >= 0
    TruncFit(TruncFitArgs),
    /// Moments of a Gaussian restricted to x >= 0
    TruncMoments(TruncMomentsArgs),
    /// Compare an analytic value with its Monte Carlo estimate
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    Significance(SignificanceArgs),
    Bivariate(BivariateArgs),
}

/// `a/b` with integer parts (divided once in f64), or a decimal literal.
pub fn parse_fraction(s: &str) -> std::result::Result<f64, String> {
    let x = match s.split_once('/') {
        Some((num, den)) => {
            let num: i64 = num
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in `{s}`"))?;
            let den: i64 = den
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in `{s}`"))?;
            if den == 0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            num as f64 / den as f64
        }
        None => s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"))?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SigMethod {
    Beta,
    Quadrature,
}

#[derive(Debug, Args)]
struct SignificanceArgs {
    /// Observed efficacy (e.g. 154/162)
    #[arg(long, value_parser = parse_fraction)]
    q: f64,
    /// Number of trials
    #[arg(long, value_parser = parse_fraction)]
    m: f64,
    /// Efficacy threshold
    #[arg(long, value_parser = parse_fraction)]
    q0: f64,
    #[arg(long, value_enum, default_value_t = SigMethod::Beta)]
    method: SigMethod,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[arg(long, value_parser = parse_fraction)]
    q: f64,
    #[arg(long, value_parser = parse_fraction)]
    m: f64,
    /// Points on a uniform [0,1] grid
    #[arg(long, default_value_t = DEFAULT_CURVE_POINTS, conflicts_with = "grid")]
    points: usize,
    /// Explicit increasing thresholds, comma separated
    #[arg(long, value_delimiter = ',', value_parser = parse_fraction)]
    grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TailMode {
    Discrete,
    Continuum,
}

#[derive(Debug, Args)]
struct TailArgs {
    /// Observed fraction threshold
    #[arg(long, value_parser = parse_fraction)]
    q: f64,
    /// True efficacy
    #[arg(long, value_parser = parse_fraction)]
    efficacy: f64,
    #[arg(long, value_parser = parse_fraction)]
    m: f64,
    #[arg(long, value_enum, default_value_t = TailMode::Discrete)]
    mode: TailMode,
}

#[derive(Debug, Args)]
struct SampleSizeArgs {
    #[arg(long, value_parser = parse_fraction)]
    q: f64,
    #[arg(long, value_parser = parse_fraction)]
    q0: f64,
    /// Required significance
    #[arg(long, value_parser = parse_fraction)]
    target: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BivMethod {
    Quadrature,
    Exact,
}

#[derive(Debug, Args)]
struct BivariateArgs {
    /// Test-arm efficacy
    #[arg(long, value_parser = parse_fraction)]
    q: f64,
    /// Control-arm efficacy
    #[arg(long, value_parser = parse_fraction)]
    pi: f64,
    #[arg(long, value_parser = parse_fraction)]
    m: f64,
    #[arg(long, value_parser = parse_fraction)]
    n: f64,
    /// Required margin
    #[arg(long, value_parser = parse_fraction, default_value = "0")]
    delta: f64,
    #[arg(long, value_enum, default_value_t = BivMethod::Quadrature)]
    method: BivMethod,
}

#[derive(Debug, Args)]
struct BivariateSampleSizeArgs {
    #[arg(long, value_parser = parse_fraction)]
    q: f64,
    #[arg(long, value_parser = parse_fraction)]
    pi: f64,
    #[arg(long, value_parser = parse_fraction, default_value = "0")]
    delta: f64,
    #[arg(long, value_parser = parse_fraction)]
    target: f64,
    /// N/M
    #[arg(long, value_parser = parse_fraction, default_value = "1")]
    ratio: f64,
}

#[derive(Debug, Args)]
struct SuperiorityArgs {
    #[arg(long, value_parser = parse_fraction, allow_hyphen_values = true, requires_all = ["sigma1", "mu2", "sigma2"])]
    mu1: Option<f64>,
    #[arg(long, value_parser = parse_fraction)]
    sigma1: Option<f64>,
    #[arg(long, value_parser = parse_fraction, allow_hyphen_values = true)]
    mu2: Option<f64>,
    #[arg(long, value_parser = parse_fraction)]
    sigma2: Option<f64>,
    /// `value,mass` CSV for the first measurement
    #[arg(long, conflicts_with_all = ["mu1", "sigma1", "mu2", "sigma2"], requires = "dist2")]
    dist1: Option<PathBuf>,
    #[arg(long)]
    dist2: Option<PathBuf>,
    #[arg(long, value_parser = parse_fraction, allow_hyphen_values = true, default_value = "0")]
    delta: f64,
}

#[derive(Debug, Args)]
struct MeanDistArgs {
    /// `value,mass` CSV of one draw
    #[arg(long)]
    input: PathBuf,
    /// Draws per mean
    #[arg(long)]
    n: u64,
}

#[derive(Debug, Args)]
struct TruncFitArgs {
    /// Observed mean
    #[arg(long = "m", value_parser = parse_fraction)]
    mean: f64,
    /// Observed standard deviation
    #[arg(long = "s", value_parser = parse_fraction)]
    sd: f64,
}

#[derive(Debug, Args)]
struct TruncMomentsArgs {
    #[arg(long, value_parser = parse_fraction, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, value_parser = parse_fraction)]
    sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Num {
    F(f64),
    U(u64),
    B(bool),
    S(String),
}

impl Num {
    fn text(&self) -> String {
        match self {
            Num::F(x) => format_sig17(*x),
            Num::U(n) => n.to_string(),
            Num::B(b) => b.to_string(),
            Num::S(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Num::F(x) if x.is_finite() => {
                Value::Number(format_sig17(*x).parse::<Number>().expect("valid number"))
            }
            Num::F(_) => Value::Null,
            Num::U(n) => Value::from(*n),
            Num::B(b) => Value::Bool(*b),
            Num::S(s) => Value::String(s.clone()),
        }
    }
}

/// Shortest positional form with 17 significant digits; scientific outside
/// 1e-5..1e17.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0.0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let sci = format!("{x:.16e}");
    // log10 can be off by one right at powers of ten; trust the formatter
    let exp = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse::<i32>().ok())
        .unwrap_or(exp);
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

type Fields = Vec<(&'static str, Num)>;

enum Payload {
    Record(Fields),
    Rows {
        columns: [&'static str; 2],
        rows: Vec<[f64; 2]>,
    },
}

struct Outcome {
    payload: Payload,
    precision: Fields,
    /// `verify` reports disagreement through the exit code.
    failed_check: bool,
}

impl Outcome {
    fn record(result: Fields, precision: Fields) -> Self {
        Self {
            payload: Payload::Record(result),
            precision,
            failed_check: false,
        }
    }
}

fn fields_json(fields: &Fields) -> Value {
    Value::Object(
        fields
            .iter()
            .map(|(k, v)| (k.to_string(), v.json()))
            .collect(),
    )
}

fn payload_json(p: &Payload) -> Value {
    match p {
        Payload::Record(f) => fields_json(f),
        Payload::Rows { columns, rows } => {
            let pts: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let mut o = Map::new();
                    o.insert(columns[0].into(), Num::F(r[0]).json());
                    o.insert(columns[1].into(), Num::F(r[1]).json());
                    Value::Object(o)
                })
                .collect();
            let mut o = Map::new();
            o.insert("points".into(), Value::Array(pts));
            Value::Object(o)
        }
    }
}

fn payload_csv(p: &Payload) -> std::result::Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match p {
        Payload::Record(f) => {
            w.write_record(f.iter().map(|(k, _)| *k))?;
            w.write_record(f.iter().map(|(_, v)| v.text()))?;
        }
        Payload::Rows { columns, rows } => {
            w.write_record(columns)?;
            for r in rows {
                w.write_record([format_sig17(r[0]), format_sig17(r[1])])?;
            }
        }
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

fn quad_config(cli: &Cli) -> Result<QuadratureConfig> {
    QuadratureConfig::new(
        cli.panels,
        true,
        cli.rel_tol,
        QuadratureConfig::default().max_doublings,
    )
}

fn mc_config(cli: &Cli) -> Result<McConfig> {
    McConfig::new(cli.seed, cli.draws)
}

fn significance_query(a: &SignificanceArgs) -> Result<SignificanceQuery> {
    SignificanceQuery::new(TrialObservation::new(a.q, a.m)?, a.q0)
}

fn design(a: &BivariateArgs) -> Result<BivariateDesign> {
    BivariateDesign::from_parts(a.q, a.m, a.pi, a.n, a.delta)
}

fn quad_precision(quad: &QuadratureConfig) -> Fields {
    vec![
        ("method", Num::S("panel_quadrature".into())),
        ("panels", Num::U(quad.panels as u64)),
        ("rel_tol", Num::F(quad.rel_tol)),
    ]
}

fn read_distribution(path: &PathBuf) -> Result<DiscreteDistribution> {
    let f = File::open(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    DiscreteDistribution::read_csv(BufReader::new(f))
}

fn bivariate_value(a: &BivariateArgs, quad: &QuadratureConfig) -> Result<(f64, Fields)> {
    let d = design(a)?;
    Ok(match a.method {
        BivMethod::Quadrature => (superiority(&d, quad)?, quad_precision(quad)),
        BivMethod::Exact => (
            superiority_exact(&d)?,
            vec![
                ("method", Num::S("exact_series".into())),
                ("rel_tol", Num::F(1e-12)),
            ],
        ),
    })
}

fn significance_value(a: &SignificanceArgs) -> Result<(f64, Fields)> {
    let query = significance_query(a)?;
    Ok(match a.method {
        SigMethod::Beta => (
            significance_with(&query, SignificanceMethod::IncompleteBeta)?,
            vec![
                ("method", Num::S("incomplete_beta".into())),
                ("rel_tol", Num::F(Accuracy::default().rel_tol)),
            ],
        ),
        SigMethod::Quadrature => (
            significance_with(&query, SignificanceMethod::Quadrature)?,
            vec![
                ("method", Num::S("adaptive_quadrature".into())),
                ("rel_tol", Num::F(1e-13)),
            ],
        ),
    })
}

fn verify_outcome(analytic: f64, est: crate::mc::McEstimate, cfg: &McConfig) -> Outcome {
    let z = est.z_score(analytic);
    let agree = z <= VERIFY_SIGMAS;
    Outcome {
        payload: Payload::Record(vec![
            ("analytic", Num::F(analytic)),
            ("mc", Num::F(est.value)),
            ("std_err", Num::F(est.std_err)),
            ("z", Num::F(z)),
            ("agree", Num::B(agree)),
        ]),
        precision: vec![
            ("draws", Num::U(cfg.draws)),
            ("seed", Num::U(cfg.seed)),
            ("threshold_sigmas", Num::F(VERIFY_SIGMAS)),
        ],
        failed_check: !agree,
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    Ok(match &cli.command {
        Cmd::Significance(a) => {
            let (p, precision) = significance_value(a)?;
            Outcome::record(vec![("p", Num::F(p))], precision)
        }
        Cmd::Curve(a) => {
            let obs = TrialObservation::new(a.q, a.m)?;
            let grid = a.grid.clone().unwrap_or_else(|| uniform_grid(a.points));
            if grid.is_empty() {
                return Err(domain("curve grid is empty"));
            }
            let pts = significance_curve(&obs, &grid)?;
            Outcome {
                payload: Payload::Rows {
                    columns: ["Q0", "p"],
                    rows: pts.iter().map(|p| [p.q0, p.p]).collect(),
                },
                precision: vec![("rel_tol", Num::F(Accuracy::default().rel_tol))],
                failed_check: false,
            }
        }
        Cmd::Tail(a) => match a.mode {
            TailMode::Discrete => {
                if a.m < 1.0 || a.m.fract() != 0.0 {
                    return Err(domain(format!(
                        "discrete tail needs an integer M >= 1, got {}",
                        a.m
                    )));
                }
                let t = tail_discrete(a.q, a.efficacy, a.m as u64)?;
                Outcome::record(
                    vec![("tail", Num::F(t))],
                    vec![("method", Num::S("binomial_sum".into()))],
                )
            }
            TailMode::Continuum => {
                let quad = quad_config(cli)?;
                let t = tail_continuum(a.q, a.efficacy, a.m, &quad)?;
                Outcome::record(vec![("tail", Num::F(t))], quad_precision(&quad))
            }
        },
        Cmd::SampleSize(a) => {
            let r = required_trials(a.q, a.q0, a.target)?;
            Outcome::record(
                vec![
                    ("m_real", Num::F(r.m_real)),
                    ("m_int", Num::U(r.m_int)),
                    ("achieved_p", Num::F(r.achieved_p)),
                ],
                vec![
                    ("m_tol", Num::F(1e-3)),
                    ("rel_tol", Num::F(Accuracy::default().rel_tol)),
                ],
            )
        }
        Cmd::Bivariate(a) => {
            let (p, precision) = bivariate_value(a, &quad_config(cli)?)?;
            Outcome::record(vec![("p", Num::F(p))], precision)
        }
        Cmd::BivariateSampleSize(a) => {
            let quad = quad_config(cli)?;
            let r = required_trials_bivariate(a.q, a.pi, a.delta, a.target, a.ratio, &quad)?;
            let mut precision = quad_precision(&quad);
            precision.push(("m_tol", Num::F(1e-3)));
            Outcome::record(
                vec![
                    ("m_real", Num::F(r.m_real)),
                    ("m_int", Num::U(r.m_int)),
                    ("achieved_p", Num::F(r.achieved_p)),
                ],
                precision,
            )
        }
        Cmd::Superiority(a) => {
            let (p, method) = match (&a.dist1, &a.dist2, a.mu1, a.sigma1, a.mu2, a.sigma2) {
                (Some(d1), Some(d2), ..) => (
                    superiority_tabulated(
                        &read_distribution(d1)?,
                        &read_distribution(d2)?,
                        a.delta,
                    )?,
                    "tabulated",
                ),
                (None, None, Some(m1), Some(s1), Some(m2), Some(s2)) => (
                    superiority_gaussian(
                        &GaussianSpec::new(m1, s1)?,
                        &GaussianSpec::new(m2, s2)?,
                        a.delta,
                    )?,
                    "gaussian_closed_form",
                ),
                _ => {
                    return Err(Error::Input(
                        "give either --mu1 --sigma1 --mu2 --sigma2 or --dist1 --dist2".into(),
                    ))
                }
            };
            Outcome::record(
                vec![("p", Num::F(p))],
                vec![
                    ("method", Num::S(method.into())),
                    ("rel_tol", Num::F(1e-15)),
                ],
            )
        }
        Cmd::MeanDist(a) => {
            let base = read_distribution(&a.input)?;
            let d = mean_sampling_distribution(&base, a.n)?;
            Outcome {
                payload: Payload::Rows {
                    columns: ["value", "mass"],
                    rows: d
                        .mass()
                        .iter()
                        .enumerate()
                        .map(|(i, &m)| [d.value(i), m])
                        .collect(),
                },
                precision: vec![("method", Num::S("exact_convolution".into()))],
                failed_check: false,
            }
        }
        Cmd::TruncFit(a) => {
            let fit = fit_truncated_gaussian(&TruncatedMoments::new(a.mean, a.sd)?)?;
            Outcome::record(
                vec![("mu", Num::F(fit.mu)), ("sigma", Num::F(fit.sigma))],
                vec![("moment_rel_tol", Num::F(1e-12))],
            )
        }
        Cmd::TruncMoments(a) => {
            let t = truncated_moments(&GaussianSpec::new(a.mu, a.sigma)?)?;
            Outcome::record(
                vec![("m", Num::F(t.m)), ("s", Num::F(t.s))],
                vec![
                    ("method", Num::S("adaptive_quadrature".into())),
                    ("rel_tol", Num::F(1e-14)),
                ],
            )
        }
        Cmd::Verify(VerifyCmd::Significance(a)) => {
            let cfg = mc_config(cli)?;
            let (analytic, _) = significance_value(a)?;
            let est = mc_significance(&significance_query(a)?, &cfg)?;
            verify_outcome(analytic, est, &cfg)
        }
        Cmd::Verify(VerifyCmd::Bivariate(a)) => {
            let cfg = mc_config(cli)?;
            let (analytic, _) = bivariate_value(a, &quad_config(cli)?)?;
            let est = mc_superiority(&design(a)?, &cfg)?;
            verify_outcome(analytic, est, &cfg)
        }
    })
}

/// Command path (e.g. `verify bivariate`) and raw `--flag value` pairs.
fn echo_inputs(
    cmd: &clap::Command,
    matches: &clap::ArgMatches,
) -> (Vec<String>, Map<String, Value>) {
    let mut path = Vec::new();
    let mut inputs = Map::new();
    let root = cmd;
    let (mut cmd, mut m) = (cmd, matches);
    while let Some((name, sub_m)) = m.subcommand() {
        path.push(name.to_string());
        cmd = cmd
            .find_subcommand(name)
            .expect("matched subcommand exists");
        m = sub_m;
    }
    // globals are propagated into the leaf matches
    let globals = root.get_arguments().filter(|a| a.is_global_set());
    for arg in cmd.get_arguments().chain(globals) {
        let Some(long) = arg.get_long() else { continue };
        let id = arg.get_id().as_str();
        if m.value_source(id) == Some(ValueSource::DefaultValue)
            && cmd.get_arg_conflicts_with(arg).iter().any(|c| {
                m.contains_id(c.get_id().as_str())
                    && m.value_source(c.get_id().as_str()) == Some(ValueSource::CommandLine)
            })
        {
            continue;
        }
        if let Ok(Some(raw)) = m.try_get_raw(id) {
            let vals: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            if !vals.is_empty() {
                inputs.insert(long.to_string(), Value::String(vals.join(",")));
            }
        }
    }
    (path, inputs)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Input(_) => 2,
        Error::NoSolution(_) | Error::ConvergenceFailure(_) | Error::Overflow(_) => 1,
    }
}

fn envelope(path: &[String], inputs: Map<String, Value>) -> Map<String, Value> {
    let mut env = Map::new();
    env.insert("command".into(), Value::String(path.join(" ")));
    env.insert("inputs".into(), Value::Object(inputs));
    env
}

/// Parses `args` (program name first) and runs one command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let command = Cli::command();
    let matches = match command.clone().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let text = e.render().to_string();
            if informational {
                let _ = write!(out, "{text}");
                return 0;
            }
            let _ = write!(err, "{text}");
            return 2;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return 2;
        }
    };
    let (path, inputs) = echo_inputs(&command, &matches);

    match execute(&cli) {
        Ok(outcome) => {
            let written = match cli.format {
                Format::Json => {
                    let mut env = envelope(&path, inputs);
                    env.insert("result".into(), payload_json(&outcome.payload));
                    env.insert("precision".into(), fields_json(&outcome.precision));
                    env.insert("version".into(), Value::String(VERSION.into()));
                    let text =
                        serde_json::to_string_pretty(&Value::Object(env)).expect("serializable");
                    writeln!(out, "{text}").map_err(|e| e.to_string())
                }
                Format::Csv => payload_csv(&outcome.payload)
                    .map_err(|e| e.to_string())
                    .and_then(|bytes| out.write_all(&bytes).map_err(|e| e.to_string())),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: writing output: {e}");
                return 1;
            }
            if outcome.failed_check {
                let _ = writeln!(
                    err,
                    "verify: Monte Carlo estimate disagrees beyond {VERIFY_SIGMAS} std_err"
                );
                1
            } else {
                0
            }
        }
        Err(e) => {
            let code = exit_code(&e);
            if code == 2 {
                let _ = writeln!(err, "error: {e}");
            } else {
                let mut env = envelope(&path, inputs);
                let mut payload = Map::new();
                payload.insert("kind".into(), Value::String(e.kind().into()));
                payload.insert("message".into(), Value::String(e.to_string()));
                env.insert("error".into(), Value::Object(payload));
                env.insert("version".into(), Value::String(VERSION.into()));
                let _ = writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&Value::Object(env)).expect("serializable")
                );
                let _ = writeln!(err, "error: {e}");
            }
            code
        }
    }
}
