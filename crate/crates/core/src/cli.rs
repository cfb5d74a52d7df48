//! Command-line front end. `run` parses arguments, dispatches and maps the
//! outcome to an exit code: 0 success, 2 bad input, 3 numerical failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fmt::{list, num};
use crate::lti::io::matrix_to_value;
use crate::lti::{balance, hinf_norm, StateSpace};
use crate::manifold::{
    mmr_model, nearest_on_family, sample_manifold, two_exp_model, Axis, FrequencyDataMap, GridSpec, Metric,
    ResponseMode, TwoStateFreqModel, DEFAULT_FREQUENCIES, DEFAULT_TIMES,
};
use crate::mbam::{run_geodesic, GeodesicOptions, ParamModel};
use crate::params::{param_census, realize, BalancedParams, CensusKind};
use crate::random::{random_minimal_system, seeded};
use crate::reduction::{reduce, verify_bounds, Method};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "lti-mbam", version, about = "Balanced reduction and manifold boundary tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Bt,
    Bspa,
    Interp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Magnitude,
    Complex,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricArg {
    Euclidean,
    Maxabs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Balance a state-space system and print its Hankel singular values.
    Balance {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the balanced realization of a (theta, r, beta, gamma, D) file.
    Realize {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a system by k states.
    Reduce {
        input: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        k: usize,
        /// Comma-separated knobs for --method interp, one per removed state.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        eta: Vec<f64>,
        /// Also compute the achieved H-infinity error.
        #[arg(long)]
        verify: bool,
        /// Reduced system (A, B, C, D) as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full report (method, bound, error) as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Integrate a geodesic of a built-in model (mmr, two-exp, two-state) or a model spec file.
    Geodesic {
        model: String,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        p0: Vec<f64>,
        #[arg(long)]
        reverse: bool,
        #[arg(long, default_value_t = 10.0)]
        tau_max: f64,
        #[command(flatten)]
        grid: SampleArgs,
        /// Trace CSV; a JSON summary is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a model manifold over a parameter grid.
    Sample {
        model: String,
        /// One axis per parameter: lo:hi:points[:log].
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        #[command(flatten)]
        grid: SampleArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closest point to a system's data point along the BT-BSPA family.
    Nearest {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_delimiter = ',')]
        frequencies: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "magnitude")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "euclidean")]
        metric: MetricArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count parameters of a parameterization.
    Census {
        kind: String,
        order: usize,
        inputs: usize,
        outputs: usize,
        #[arg(long)]
        json: bool,
    },
    /// H-infinity norm and peak frequency.
    Hinf { input: PathBuf },
    /// Write a seeded random stable system.
    RandomSystem {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
struct SampleArgs {
    /// Observation times for mmr / two-exp.
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    /// Frequencies (rad/s) for two-state.
    #[arg(long, value_delimiter = ',')]
    frequencies: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "magnitude")]
    mode: ModeArg,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Diagnostics go to stderr, results to `stdout`.
pub fn run<I, S>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = write!(stdout, "{e}");
            } else {
                eprint!("{e}");
            }
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_user_error() {
                2
            } else {
                3
            }
        }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::invalid("<root>", format!("{}: {e}", path.display())))
}

fn read_system(path: &Path) -> Result<StateSpace> {
    StateSpace::from_json_value(&read_json(path)?)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn out(stdout: &mut dyn Write, line: impl AsRef<str>) -> Result<()> {
    writeln!(stdout, "{}", line.as_ref())?;
    Ok(())
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Balance { input, out: path } => {
            let sys = read_system(&input)?;
            let bal = balance(&sys)?;
            out(stdout, format!("hsv: {}", list(bal.hsv().iter().copied())))?;
            if let Some(path) = path {
                let mut v = bal.sys().to_json_value();
                v["hsv"] = json!(bal.hsv().as_slice());
                v["T"] = matrix_to_value(bal.transform());
                write_json(&path, &v)?;
            }
            Ok(())
        }
        Command::Realize { input, out: path } => {
            let params = BalancedParams::from_json_value(&read_json(&input)?)?;
            let realized = realize(&params)?;
            let v = realized.balanced.sys().to_json_value();
            match path {
                Some(path) => write_json(&path, &v)?,
                None => out(stdout, serde_json::to_string_pretty(&v)?)?,
            }
            out(stdout, format!("hsv: {}", list(params.theta().iter().copied())))
        }
        Command::Reduce {
            input,
            method,
            k,
            eta,
            verify,
            out: path,
            report,
        } => {
            if k == 0 {
                return Err(Error::BadOrder { k, n: 0 });
            }
            let method = match method {
                MethodArg::Bt => Method::Bt,
                MethodArg::Bspa => Method::Bspa,
                MethodArg::Interp => Method::Interp,
            };
            if method != Method::Interp && !eta.is_empty() {
                return Err(Error::invalid("eta", "only valid with --method interp"));
            }
            let sys = read_system(&input)?;
            let bal = balance(&sys)?;
            let res = reduce(&bal, k, method, &eta)?;
            let mut rep = json!({
                "method": res.method,
                "k": k,
                "eta": res.eta,
                "a_priori_bound": res.a_priori_bound,
                "reduced": res.reduced.to_json_value(),
            });
            out(stdout, format!("method: {:?}", res.method).to_lowercase())?;
            out(stdout, format!("order: {} -> {}", sys.order(), res.reduced.order()))?;
            out(stdout, format!("a priori bound: {}", num(res.a_priori_bound)))?;
            for w in &res.warnings {
                eprintln!("warning: {w:?}");
            }
            if verify {
                let check = verify_bounds(&sys, k, method, &eta)?;
                rep["achieved_error"] = json!(check.actual_error);
                out(
                    stdout,
                    format!(
                        "achieved error: {} (bound {}, {})",
                        num(check.actual_error),
                        num(check.bound),
                        if check.satisfied { "satisfied" } else { "VIOLATED" }
                    ),
                )?;
            }
            if let Some(path) = path {
                write_json(&path, &res.reduced.to_json_value())?;
            }
            if let Some(path) = report {
                write_json(&path, &rep)?;
            }
            Ok(())
        }
        Command::Geodesic {
            model,
            p0,
            reverse,
            tau_max,
            grid,
            out: path,
        } => {
            let model = build_model(&model, &grid)?;
            let p0 = if p0.is_empty() { model.default_point() } else { p0 };
            let opts = GeodesicOptions {
                reverse,
                tau_max,
                ..GeodesicOptions::default()
            };
            let trace = model.with(|m| run_geodesic(&m, &p0, &opts))?;
            let summary = trace.summary_json();
            out(stdout, format!("termination: {}", summary["termination"].as_str().unwrap_or("")))?;
            out(stdout, format!("points: {}", trace.len()))?;
            for line in summary["summary"].as_array().into_iter().flatten() {
                out(stdout, line.as_str().unwrap_or(""))?;
            }
            if let Some(path) = path {
                let mut buf = Vec::new();
                trace.write_csv(&mut buf)?;
                write_atomic(&path, &buf)?;
                write_json(&path.with_extension("json"), &summary)?;
            }
            Ok(())
        }
        Command::Sample {
            model,
            axes,
            grid,
            out: path,
        } => {
            let model = build_model(&model, &grid)?;
            let axes = axes.iter().map(|a| parse_axis(a)).collect::<Result<Vec<_>>>()?;
            let mut sample = model.with(|m| sample_manifold(&m, &GridSpec { axes }))?;
            sample.sample_spec = model.sample_spec();
            out(stdout, format!("points: {}, gaps: {}", sample.len(), sample.gaps()))?;
            let mut buf = Vec::new();
            sample.write_csv(&mut buf)?;
            match path {
                Some(path) => write_atomic(&path, &buf)?,
                None => stdout.write_all(&buf)?,
            }
            Ok(())
        }
        Command::Nearest {
            input,
            k,
            frequencies,
            mode,
            metric,
            out: path,
        } => {
            let sys = read_system(&input)?;
            let bal = balance(&sys)?;
            let map = FrequencyDataMap::new(
                frequencies.as_deref().unwrap_or(&DEFAULT_FREQUENCIES),
                response_mode(mode),
            )?;
            let target = map.map(&sys)?;
            let metric = match metric {
                MetricArg::Euclidean => Metric::Euclidean,
                MetricArg::Maxabs => Metric::MaxAbs,
            };
            let res = nearest_on_family(&target, &bal, k, &map, metric)?;
            let v = json!(res);
            out(stdout, serde_json::to_string(&v)?)?;
            if let Some(path) = path {
                write_json(&path, &v)?;
            }
            Ok(())
        }
        Command::Census {
            kind,
            order,
            inputs,
            outputs,
            json,
        } => {
            let kind: CensusKind = kind.parse()?;
            let c = param_census(kind, order, inputs, outputs)?;
            if json {
                out(stdout, serde_json::to_string(&c)?)
            } else {
                out(stdout, c.total.to_string())
            }
        }
        Command::Hinf { input } => {
            let sys = read_system(&input)?;
            let g = hinf_norm(&sys)?;
            out(stdout, format!("{} @ {} rad/s", num(g.norm), frequency_label(g.frequency)))
        }
        Command::RandomSystem { n, m, p, seed, out: path } => {
            if n == 0 || m == 0 || p == 0 {
                return Err(Error::invalid("n", "dimensions must be positive"));
            }
            let mut rng = seeded(seed);
            let sys = random_minimal_system(&mut rng, n, m, p)?;
            let v = sys.to_json_value();
            match path {
                Some(path) => write_json(&path, &v),
                None => out(stdout, serde_json::to_string_pretty(&v)?),
            }
        }
    }
}

fn frequency_label(w: f64) -> String {
    if w == 0.0 {
        "0".into()
    } else {
        num(w)
    }
}

fn response_mode(mode: ModeArg) -> ResponseMode {
    match mode {
        ModeArg::Magnitude => ResponseMode::Magnitude,
        ModeArg::Complex => ResponseMode::Complex,
    }
}

fn parse_axis(spec: &str) -> Result<Axis> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::invalid("axis", format!("`{spec}` is not lo:hi:points[:log]"));
    if !(parts.len() == 3 || parts.len() == 4) {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let points: usize = parts[2].parse().map_err(|_| bad())?;
    let log = match parts.get(3) {
        None => false,
        Some(&"log") => true,
        Some(_) => return Err(bad()),
    };
    Ok(Axis { lo, hi, points, log })
}

enum BuiltModel {
    Mmr(crate::manifold::MmrModel),
    TwoExp(crate::manifold::TwoExpModel),
    TwoState(TwoStateFreqModel),
}

impl BuiltModel {
    fn with<R>(&self, f: impl FnOnce(&dyn ParamModel) -> R) -> R {
        match self {
            BuiltModel::Mmr(m) => f(m),
            BuiltModel::TwoExp(m) => f(m),
            BuiltModel::TwoState(m) => f(m),
        }
    }

    fn default_point(&self) -> Vec<f64> {
        match self {
            BuiltModel::Mmr(_) | BuiltModel::TwoExp(_) => vec![1.0, 1.2],
            BuiltModel::TwoState(_) => vec![0.7, 8.0],
        }
    }

    fn sample_spec(&self) -> Vec<f64> {
        match self {
            BuiltModel::Mmr(m) => m.times().to_vec(),
            BuiltModel::TwoExp(m) => m.times().to_vec(),
            BuiltModel::TwoState(m) => m.data_map().frequencies.clone(),
        }
    }
}

fn f64_field(v: &Value, key: &str, default: f64) -> Result<f64> {
    match v.get(key) {
        None => Ok(default),
        Some(x) => x.as_f64().ok_or_else(|| Error::invalid(key, "expected a number")),
    }
}

fn vec_field(v: &Value, key: &str) -> Result<Option<Vec<f64>>> {
    match v.get(key) {
        None => Ok(None),
        Some(x) => x
            .as_array()
            .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
            .map(Some)
            .ok_or_else(|| Error::invalid(key, "expected an array of numbers")),
    }
}

/// `name` is a built-in model name or a JSON spec file such as
/// `{"model": "mmr", "x0": 1.0, "times": [0.3, 1, 3]}`.
fn build_model(name: &str, args: &SampleArgs) -> Result<BuiltModel> {
    let spec = match name {
        "mmr" | "two-exp" | "two-state" => json!({ "model": name }),
        path if path.ends_with(".json") => read_json(Path::new(path))?,
        other => return Err(Error::invalid("model", format!("unknown model `{other}` (mmr|two-exp|two-state)"))),
    };
    let kind = spec
        .get("model")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::invalid("model", "missing model name"))?;
    let times = match &args.times {
        Some(t) => t.clone(),
        None => vec_field(&spec, "times")?.unwrap_or_else(|| DEFAULT_TIMES.to_vec()),
    };
    let frequencies = match &args.frequencies {
        Some(f) => f.clone(),
        None => vec_field(&spec, "frequencies")?.unwrap_or_else(|| DEFAULT_FREQUENCIES.to_vec()),
    };
    match kind {
        "mmr" => Ok(BuiltModel::Mmr(mmr_model(f64_field(&spec, "x0", 1.0)?, &times)?)),
        "two-exp" => {
            let x0 = vec_field(&spec, "x0")?.unwrap_or_else(|| vec![1.0, 1.0]);
            if x0.len() != 2 {
                return Err(Error::invalid("x0", "two-exp needs two initial amplitudes"));
            }
            Ok(BuiltModel::TwoExp(two_exp_model([x0[0], x0[1]], &times)?))
        }
        "two-state" => {
            let map = FrequencyDataMap::new(&frequencies, response_mode(args.mode))?;
            Ok(BuiltModel::TwoState(TwoStateFreqModel::siso(
                f64_field(&spec, "theta1", 1.0)?,
                f64_field(&spec, "r1", 1.0)?,
                f64_field(&spec, "d", 0.0)?,
                map,
            )?))
        }
        other => Err(Error::invalid("model", format!("unknown model `{other}`"))),
    }
}
