//! Run configuration: flat dotted keys (`grid.h = 0.1`) read from a TOML
//! file and `--key value` flags, resolved against per-command defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nlwave::grid_ops::lemmas::DifferenceMode;
use nlwave::{BuiltinKernel, ConvolutionPath, IntegratorConfig, Method};
use toml::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Converge,
    DomainStudy,
    Blowup,
    BlowupRefine,
    Decay,
    KernelInfo,
    LemmaCheck,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Run,
        Command::Converge,
        Command::DomainStudy,
        Command::Blowup,
        Command::BlowupRefine,
        Command::Decay,
        Command::KernelInfo,
        Command::LemmaCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Converge => "converge",
            Command::DomainStudy => "domain-study",
            Command::Blowup => "blowup",
            Command::BlowupRefine => "blowup-refine",
            Command::Decay => "decay",
            Command::KernelInfo => "kernel-info",
            Command::LemmaCheck => "lemma-check",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    Builtin(BuiltinKernel),
    /// Two-column `x beta(x)` table.
    Table(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearitySpec {
    Quadratic,
    Power(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Solitary { c: f64, x0: f64 },
    BlowupGaussian,
    /// Two-column `x value` tables, interpolated linearly and zero outside.
    Table { phi: PathBuf, psi: Option<PathBuf> },
}

impl InitialData {
    pub fn preset(&self) -> &'static str {
        match self {
            InitialData::Solitary { .. } => "solitary",
            InitialData::BlowupGaussian => "blowup-gaussian",
            InitialData::Table { .. } => "table",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub h: f64,
    pub x_left: f64,
    pub x_right: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySpec {
    pub h_list: Vec<f64>,
    pub n_list: Vec<i64>,
    pub times: Vec<f64>,
    pub kernels: Vec<BuiltinKernel>,
    pub thresholds: Vec<f64>,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecaySpec {
    pub r: Option<f64>,
    pub times: Vec<f64>,
    pub band: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    /// `None` writes to stdout.
    pub path: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub format: Format,
    /// Snapshot times for `run`; empty means `t_end` only.
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub kernel: KernelSpec,
    pub nonlinearity: NonlinearitySpec,
    pub grid: GridSpec,
    pub integrator: IntegratorConfig,
    pub path: ConvolutionPath,
    pub cutoff: Option<f64>,
    pub initial: InitialData,
    pub study: StudySpec,
    pub decay: DecaySpec,
    pub lemma_mode: DifferenceMode,
    pub output: OutputSpec,
}

/// Every key the configuration understands.
pub const KEYS: &[&str] = &[
    "command",
    "kernel.name",
    "kernel.table",
    "nonlinearity.name",
    "nonlinearity.p",
    "grid.h",
    "grid.x_left",
    "grid.x_right",
    "integrator.method",
    "integrator.dt",
    "integrator.rel_tol",
    "integrator.abs_tol",
    "integrator.t_end",
    "integrator.blowup_threshold",
    "integrator.min_step",
    "integrator.max_steps",
    "integrator.trace_samples",
    "convolution.path",
    "convolution.cutoff",
    "initial_data.preset",
    "initial_data.phi_file",
    "initial_data.psi_file",
    "solitary.c",
    "solitary.x0",
    "study.h_list",
    "study.n_list",
    "study.times",
    "study.kernels",
    "study.thresholds",
    "study.half_width",
    "decay.r",
    "decay.times",
    "decay.band",
    "lemma.mode",
    "output.path",
    "output.trace",
    "output.format",
    "output.times",
];

pub type FlatConfig = BTreeMap<String, Value>;

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Flattens nested TOML tables into dotted keys.
pub fn flatten(table: &toml::Table) -> FlatConfig {
    fn walk(prefix: &str, table: &toml::Table, out: &mut FlatConfig) {
        for (k, v) in table {
            let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            match v {
                Value::Table(t) => walk(&key, t, out),
                other => {
                    out.insert(key, other.clone());
                }
            }
        }
    }
    let mut out = FlatConfig::new();
    walk("", table, &mut out);
    out
}

pub fn parse_toml(text: &str, origin: &str) -> Result<FlatConfig, CliError> {
    let table: toml::Table =
        toml::from_str(text).map_err(|e| config_error(format!("{origin}: {}", e.message())))?;
    Ok(flatten(&table))
}

pub fn read_file(path: &Path) -> Result<FlatConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read config file {}: {e}", path.display())))?;
    parse_toml(&text, &path.display().to_string())
}

/// Interprets a flag value as a TOML value, falling back to a bare string.
pub fn parse_flag_value(raw: &str) -> Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Parses `--key value` pairs.
pub fn parse_flags(args: &[String]) -> Result<FlatConfig, CliError> {
    let mut out = FlatConfig::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let key = arg
            .strip_prefix("--")
            .ok_or_else(|| config_error(format!("expected --key value, got '{arg}'")))?;
        let (key, raw) = match key.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| config_error(format!("flag --{key} needs a value")))?;
                (key.to_string(), v.clone())
            }
        };
        out.insert(key, parse_flag_value(&raw));
    }
    Ok(out)
}

struct Reader<'a> {
    map: &'a FlatConfig,
}

impl Reader<'_> {
    fn get(&self, key: &str) -> Option<&Value> {
        self.map.get(key)
    }

    fn missing(key: &str) -> CliError {
        config_error(format!("missing required field '{key}'"))
    }

    fn wrong(key: &str, what: &str, v: &Value) -> CliError {
        config_error(format!("field '{key}' must be {what}, got {v}"))
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(Self::wrong(key, "a number", v)),
        }
    }

    fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.opt_f64(key)?.ok_or_else(|| Self::missing(key))
    }

    fn opt_int(&self, key: &str) -> Result<Option<i64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(*i)),
            Some(v) => Err(Self::wrong(key, "an integer", v)),
        }
    }

    fn usize(&self, key: &str) -> Result<usize, CliError> {
        let i = self.opt_int(key)?.ok_or_else(|| Self::missing(key))?;
        usize::try_from(i).map_err(|_| config_error(format!("field '{key}' must be non-negative, got {i}")))
    }

    fn opt_str(&self, key: &str) -> Result<Option<&str>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(Self::wrong(key, "a string", v)),
        }
    }

    fn str(&self, key: &str) -> Result<&str, CliError> {
        self.opt_str(key)?.ok_or_else(|| Self::missing(key))
    }

    fn array(&self, key: &str) -> Result<Option<&Vec<Value>>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => Ok(Some(a)),
            Some(v) => Err(Self::wrong(key, "an array", v)),
        }
    }

    fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let a = self.array(key)?.ok_or_else(|| Self::missing(key))?;
        a.iter()
            .map(|v| match v {
                Value::Float(x) => Ok(*x),
                Value::Integer(i) => Ok(*i as f64),
                other => Err(Self::wrong(key, "an array of numbers", other)),
            })
            .collect()
    }

    fn int_list(&self, key: &str) -> Result<Vec<i64>, CliError> {
        let a = self.array(key)?.ok_or_else(|| Self::missing(key))?;
        a.iter()
            .map(|v| match v {
                Value::Integer(i) => Ok(*i),
                other => Err(Self::wrong(key, "an array of integers", other)),
            })
            .collect()
    }

    fn str_list(&self, key: &str) -> Result<Vec<String>, CliError> {
        let a = self.array(key)?.ok_or_else(|| Self::missing(key))?;
        a.iter()
            .map(|v| match v {
                Value::String(s) => Ok(s.clone()),
                other => Err(Self::wrong(key, "an array of strings", other)),
            })
            .collect()
    }
}

fn builtin(name: &str, key: &str) -> Result<BuiltinKernel, CliError> {
    BuiltinKernel::from_name(name).ok_or_else(|| {
        config_error(format!(
            "field '{key}': unknown kernel '{name}' (expected exp, lorentz, sech2 or triangle)"
        ))
    })
}

fn float(x: f64) -> Value {
    Value::Float(x)
}

fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::Float(x)).collect())
}

fn string(s: &str) -> Value {
    Value::String(s.to_string())
}

fn path_value(p: &Path) -> Value {
    Value::String(p.display().to_string())
}

/// Defaults that depend on the command and the initial-data preset.
fn defaults(command: Command, preset: &str) -> FlatConfig {
    let mut d = FlatConfig::new();
    let mut set = |k: &str, v: Value| {
        d.insert(k.to_string(), v);
    };
    set("kernel.name", string("exp"));
    set("nonlinearity.name", string("quadratic"));
    set("integrator.method", string("rk45_adaptive"));
    set("integrator.rel_tol", float(1e-10));
    set("integrator.abs_tol", float(1e-10));
    set("integrator.blowup_threshold", float(1e8));
    set("integrator.min_step", float(1e-14));
    set("integrator.max_steps", Value::Integer(20_000_000));
    set("integrator.trace_samples", Value::Integer(200));
    set("convolution.path", string("auto"));
    set("output.format", string("csv"));
    set("output.times", Value::Array(vec![]));
    set("lemma.mode", string("exact"));
    set("study.kernels", Value::Array(["exp", "lorentz", "sech2", "triangle"].map(string).to_vec()));
    set("study.thresholds", Value::Array(vec![]));
    set("study.half_width", float(10.0));
    set("decay.times", floats(&(0..=10).map(f64::from).collect::<Vec<_>>()));
    set("decay.band", floats(&[0.5, 0.9]));
    match preset {
        "solitary" => {
            set("grid.h", float(0.125));
            set("grid.x_left", float(-30.0));
            set("grid.x_right", float(30.0));
            set("integrator.t_end", float(20.0));
            set("solitary.c", float(1.5));
            set("solitary.x0", float(-15.0));
            set("study.times", floats(&[20.0]));
        }
        "blowup-gaussian" => {
            set("grid.h", float(0.1));
            set("grid.x_left", float(-10.0));
            set("grid.x_right", float(10.0));
            set("integrator.t_end", float(10.0));
            set("study.times", floats(&[1.0]));
        }
        _ => {}
    }
    match command {
        Command::DomainStudy => {
            set("grid.h", float(0.1));
            set("study.n_list", Value::Array([160, 180, 200, 220, 240, 260, 280].map(Value::Integer).to_vec()));
            set("study.times", floats(&[5.0, 10.0, 15.0, 20.0]));
        }
        Command::BlowupRefine => {
            set("study.n_list", Value::Array([2, 5, 10, 20, 40, 60, 80, 100].map(Value::Integer).to_vec()));
        }
        Command::KernelInfo => {
            set("study.h_list", floats(&[1.0, 0.5, 0.1, 0.05]));
        }
        Command::LemmaCheck => {
            set("study.h_list", floats(&[0.4, 0.2, 0.1, 0.05]));
        }
        Command::Converge if preset == "solitary" => {
            set("study.h_list", floats(&[2.0, 1.0, 0.5, 0.25, 0.125]));
        }
        Command::Converge => {
            set("study.h_list", floats(&[0.4, 0.2, 0.1]));
        }
        _ => {}
    }
    d.entry("study.h_list".into()).or_insert_with(|| Value::Array(vec![]));
    d.entry("study.n_list".into()).or_insert_with(|| Value::Array(vec![]));
    d
}

fn default_preset(command: Command) -> &'static str {
    match command {
        Command::Blowup | Command::BlowupRefine => "blowup-gaussian",
        _ => "solitary",
    }
}

impl RunConfig {
    /// Resolves `explicit` (file values overridden by flags) against the
    /// defaults for `command`.
    pub fn resolve(command: Command, explicit: &FlatConfig) -> Result<Self, CliError> {
        if let Some(bad) = explicit.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(config_error(format!("unknown field '{bad}'")));
        }
        if let Some(Value::String(c)) = explicit.get("command") {
            if c != command.name() {
                return Err(config_error(format!(
                    "field 'command': config is for '{c}' but '{}' was requested",
                    command.name()
                )));
            }
        }
        let preset = match explicit.get("initial_data.preset") {
            None => default_preset(command).to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(v) => return Err(Reader::wrong("initial_data.preset", "a string", v)),
        };
        let mut map = defaults(command, &preset);
        map.extend(explicit.iter().map(|(k, v)| (k.clone(), v.clone())));
        map.insert("command".into(), string(command.name()));
        map.insert("initial_data.preset".into(), string(&preset));
        Self::from_flat(&map)
    }

    /// Builds the configuration from a fully resolved flat map.
    pub fn from_flat(map: &FlatConfig) -> Result<Self, CliError> {
        let r = Reader { map };
        let command_name = r.str("command")?;
        let command = Command::from_name(command_name)
            .ok_or_else(|| config_error(format!("field 'command': unknown command '{command_name}'")))?;

        let kernel = match r.opt_str("kernel.table")? {
            Some(p) => KernelSpec::Table(PathBuf::from(p)),
            None => KernelSpec::Builtin(builtin(r.str("kernel.name")?, "kernel.name")?),
        };
        let nonlinearity = match r.str("nonlinearity.name")? {
            "quadratic" => NonlinearitySpec::Quadratic,
            "power" => {
                let p = r.opt_int("nonlinearity.p")?.ok_or_else(|| Reader::missing("nonlinearity.p"))?;
                if !(2..=64).contains(&p) {
                    return Err(config_error(format!("field 'nonlinearity.p' must be in 2..=64, got {p}")));
                }
                NonlinearitySpec::Power(p as u32)
            }
            other => {
                return Err(config_error(format!(
                    "field 'nonlinearity.name': unknown nonlinearity '{other}' (expected quadratic or power)"
                )))
            }
        };

        let grid = GridSpec {
            h: r.f64("grid.h")?,
            x_left: r.f64("grid.x_left")?,
            x_right: r.f64("grid.x_right")?,
        };
        check_grid(&grid)?;

        let method: Method = r
            .str("integrator.method")?
            .parse()
            .map_err(|e: nlwave::Error| config_error(format!("field 'integrator.method': {e}")))?;
        let integrator = IntegratorConfig {
            method,
            dt: r.opt_f64("integrator.dt")?,
            rel_tol: r.f64("integrator.rel_tol")?,
            abs_tol: r.f64("integrator.abs_tol")?,
            t_end: r.f64("integrator.t_end")?,
            blowup_threshold: r.f64("integrator.blowup_threshold")?,
            min_step: r.f64("integrator.min_step")?,
            trace_samples: r.usize("integrator.trace_samples")?,
            max_steps: r.usize("integrator.max_steps")?,
        };
        integrator
            .validate()
            .map_err(|e| config_error(format!("integrator: {e}")))?;

        let path: ConvolutionPath = r
            .str("convolution.path")?
            .parse()
            .map_err(|e: String| config_error(format!("field 'convolution.path': {e}")))?;
        let cutoff = r.opt_f64("convolution.cutoff")?;

        let initial = match r.str("initial_data.preset")? {
            "solitary" => InitialData::Solitary {
                c: r.f64("solitary.c")?,
                x0: r.f64("solitary.x0")?,
            },
            "blowup-gaussian" => InitialData::BlowupGaussian,
            "table" => InitialData::Table {
                phi: PathBuf::from(r.str("initial_data.phi_file")?),
                psi: r.opt_str("initial_data.psi_file")?.map(PathBuf::from),
            },
            other => {
                return Err(config_error(format!(
                    "field 'initial_data.preset': unknown preset '{other}' (expected solitary, blowup-gaussian or table)"
                )))
            }
        };

        let study = StudySpec {
            h_list: r.f64_list("study.h_list")?,
            n_list: r.int_list("study.n_list")?,
            times: r.f64_list("study.times").or_else(|_| Ok::<_, CliError>(vec![integrator.t_end]))?,
            kernels: r
                .str_list("study.kernels")?
                .iter()
                .map(|k| builtin(k, "study.kernels"))
                .collect::<Result<_, _>>()?,
            thresholds: r.f64_list("study.thresholds")?,
            half_width: r.f64("study.half_width")?,
        };
        let band = r.f64_list("decay.band")?;
        if band.len() != 2 {
            return Err(config_error(format!("field 'decay.band' must hold two numbers, got {band:?}")));
        }
        let decay = DecaySpec {
            r: r.opt_f64("decay.r")?,
            times: r.f64_list("decay.times")?,
            band: (band[0], band[1]),
        };
        let lemma_mode = match r.str("lemma.mode")? {
            "exact" => DifferenceMode::Exact,
            "corrupted" => DifferenceMode::Corrupted,
            other => {
                return Err(config_error(format!(
                    "field 'lemma.mode': unknown mode '{other}' (expected exact or corrupted)"
                )))
            }
        };
        let format = match r.str("output.format")? {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => {
                return Err(config_error(format!(
                    "field 'output.format': unknown format '{other}' (expected csv or json)"
                )))
            }
        };
        let output = OutputSpec {
            path: r.opt_str("output.path")?.map(PathBuf::from),
            trace: r.opt_str("output.trace")?.map(PathBuf::from),
            format,
            times: r.f64_list("output.times")?,
        };
        Ok(Self {
            command,
            kernel,
            nonlinearity,
            grid,
            integrator,
            path,
            cutoff,
            initial,
            study,
            decay,
            lemma_mode,
            output,
        })
    }

    /// Every field as a dotted key, the inverse of [`RunConfig::from_flat`].
    pub fn to_flat(&self) -> FlatConfig {
        let mut m = FlatConfig::new();
        let mut set = |k: &str, v: Value| {
            m.insert(k.to_string(), v);
        };
        set("command", string(self.command.name()));
        match &self.kernel {
            KernelSpec::Builtin(k) => set("kernel.name", string(k.name())),
            KernelSpec::Table(p) => {
                set("kernel.name", string("table"));
                set("kernel.table", path_value(p));
            }
        }
        match self.nonlinearity {
            NonlinearitySpec::Quadratic => set("nonlinearity.name", string("quadratic")),
            NonlinearitySpec::Power(p) => {
                set("nonlinearity.name", string("power"));
                set("nonlinearity.p", Value::Integer(p as i64));
            }
        }
        set("grid.h", float(self.grid.h));
        set("grid.x_left", float(self.grid.x_left));
        set("grid.x_right", float(self.grid.x_right));
        let ic = &self.integrator;
        set("integrator.method", string(&ic.method.to_string()));
        if let Some(dt) = ic.dt {
            set("integrator.dt", float(dt));
        }
        set("integrator.rel_tol", float(ic.rel_tol));
        set("integrator.abs_tol", float(ic.abs_tol));
        set("integrator.t_end", float(ic.t_end));
        set("integrator.blowup_threshold", float(ic.blowup_threshold));
        set("integrator.min_step", float(ic.min_step));
        set("integrator.max_steps", Value::Integer(ic.max_steps as i64));
        set("integrator.trace_samples", Value::Integer(ic.trace_samples as i64));
        set("convolution.path", string(&self.path.to_string()));
        if let Some(c) = self.cutoff {
            set("convolution.cutoff", float(c));
        }
        set("initial_data.preset", string(self.initial.preset()));
        match &self.initial {
            InitialData::Solitary { c, x0 } => {
                set("solitary.c", float(*c));
                set("solitary.x0", float(*x0));
            }
            InitialData::BlowupGaussian => {}
            InitialData::Table { phi, psi } => {
                set("initial_data.phi_file", path_value(phi));
                if let Some(p) = psi {
                    set("initial_data.psi_file", path_value(p));
                }
            }
        }
        let s = &self.study;
        set("study.h_list", floats(&s.h_list));
        set("study.n_list", Value::Array(s.n_list.iter().map(|&n| Value::Integer(n)).collect()));
        set("study.times", floats(&s.times));
        set("study.kernels", Value::Array(s.kernels.iter().map(|k| string(k.name())).collect()));
        set("study.thresholds", floats(&s.thresholds));
        set("study.half_width", float(s.half_width));
        if let Some(r) = self.decay.r {
            set("decay.r", float(r));
        }
        set("decay.times", floats(&self.decay.times));
        set("decay.band", floats(&[self.decay.band.0, self.decay.band.1]));
        set(
            "lemma.mode",
            string(match self.lemma_mode {
                DifferenceMode::Exact => "exact",
                DifferenceMode::Corrupted => "corrupted",
            }),
        );
        if let Some(p) = &self.output.path {
            set("output.path", path_value(p));
        }
        if let Some(p) = &self.output.trace {
            set("output.trace", path_value(p));
        }
        set(
            "output.format",
            string(match self.output.format {
                Format::Csv => "csv",
                Format::Json => "json",
            }),
        );
        set("output.times", floats(&self.output.times));
        m
    }

    /// The resolved configuration as `key = value` lines, parseable as TOML.
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.to_flat() {
            let _ = writeln!(out, "{k} = {}", format_value(&v));
        }
        out
    }
}

fn check_grid(g: &GridSpec) -> Result<(), CliError> {
    if !(g.h.is_finite() && g.h > 0.0) {
        return Err(config_error(format!("field 'grid.h' must be positive, got {}", g.h)));
    }
    if !(g.x_left < g.x_right) {
        return Err(config_error(format!(
            "field 'grid.x_left' ({}) must be smaller than 'grid.x_right' ({})",
            g.x_left, g.x_right
        )));
    }
    let cells = (g.x_right - g.x_left) / g.h;
    if (cells - cells.round()).abs() > 1e-12 * cells.abs().max(1.0) {
        return Err(config_error(format!(
            "field 'grid.h': h = {} does not divide [{}, {}] into a whole number of cells ({cells})",
            g.h, g.x_left, g.x_right
        )));
    }
    Ok(())
}

/// TOML literal for `v`; floats use the shortest round-trip exponent form.
pub fn format_value(v: &Value) -> String {
    match v {
        Value::Float(x) => format_float(*x),
        Value::Array(a) => {
            let items: Vec<String> = a.iter().map(format_value).collect();
            format!("[{}]", items.join(", "))
        }
        other => other.to_string(),
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:e}")
    }
}
