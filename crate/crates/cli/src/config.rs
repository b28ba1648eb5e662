//! Experiment configuration: layering of presets, config files and flags,
//! validation, and the canonical form embedded in every output.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use molrss::montecarlo::{DEFAULT_BINS, DEFAULT_SAMPLES};
use toml::Value;

use crate::error::CliError;
use crate::units::{parse_quantity, ConcentrationUnit, Dimension};

pub type RawConfig = BTreeMap<String, Value>;

/// Keys in the order they are written out.
const KEYS: &[&str] = &[
    "command",
    "preset",
    "model",
    "radius",
    "diffusion",
    "time",
    "molecules",
    "velocity",
    "threshold",
    "target",
    "samples",
    "seed",
    "bins",
    "sweep_axis",
    "sweep_values",
    "y_min",
    "y_max",
    "points",
    "ecdf",
    "series_terms",
    "series_tol",
    "quad_max_intervals",
    "format",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Pdf,
    Cdf,
    Simulate,
    Success,
    Threshold,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pdf => "pdf",
            Command::Cdf => "cdf",
            Command::Simulate => "simulate",
            Command::Success => "success",
            Command::Threshold => "threshold",
            Command::Sweep => "sweep",
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        Ok(match text {
            "pdf" => Command::Pdf,
            "cdf" => Command::Cdf,
            "simulate" => Command::Simulate,
            "success" => Command::Success,
            "threshold" => Command::Threshold,
            "sweep" => Command::Sweep,
            other => return Err(CliError::config(format!("unknown command `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Free,
    Drift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Radius,
    Molecules,
    Time,
    Diffusion,
    Velocity,
    Threshold,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Radius => "radius",
            Axis::Molecules => "molecules",
            Axis::Time => "time",
            Axis::Diffusion => "diffusion",
            Axis::Velocity => "velocity",
            Axis::Threshold => "threshold",
        }
    }

    fn parse(text: &str) -> Result<Self, CliError> {
        Ok(match text.trim() {
            "radius" => Axis::Radius,
            "molecules" => Axis::Molecules,
            "time" => Axis::Time,
            "diffusion" => Axis::Diffusion,
            "velocity" => Axis::Velocity,
            "threshold" => Axis::Threshold,
            other => {
                return Err(CliError::config(format!(
                    "`{other}` is not a sweepable parameter (radius, molecules, time, diffusion, velocity, threshold)"
                )))
            }
        })
    }

    fn dimension(self) -> Dimension {
        match self {
            Axis::Radius => Dimension::Length,
            Axis::Molecules => Dimension::Count,
            Axis::Time => Dimension::Time,
            Axis::Diffusion => Dimension::Diffusivity,
            Axis::Velocity => Dimension::Velocity,
            Axis::Threshold => Dimension::Concentration,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: Axis,
    pub values: Vec<f64>,
}

/// One fully resolved experiment, all physical values in SI.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub preset: Option<String>,
    pub model: Model,
    pub radius: f64,
    pub diffusion: f64,
    pub time: f64,
    pub molecules: f64,
    pub velocity: Option<f64>,
    pub threshold: Option<f64>,
    pub target: f64,
    pub samples: u64,
    pub seed: u64,
    pub bins: usize,
    pub sweep: Option<Sweep>,
    pub y_range: Option<(f64, f64)>,
    pub points: usize,
    pub ecdf: bool,
    pub series_terms: usize,
    pub series_tol: f64,
    pub quad_max_intervals: usize,
    pub format: Format,
}

/// Parameter presets for the figure reproductions.
pub fn preset(name: &str) -> Result<RawConfig, CliError> {
    let entries: Vec<(&str, Value)> = match name {
        "fig2" => vec![
            ("command", "pdf".into()),
            ("radius", 3e-3.into()),
            ("time", 3600.0.into()),
        ],
        "fig3" => vec![
            ("command", "cdf".into()),
            ("radius", 1.8.into()),
            ("time", 300.0.into()),
            ("y_min", 1.0.into()),
            ("y_max", 10.0.into()),
            ("points", 91.into()),
        ],
        "fig4" => vec![
            ("command", "success".into()),
            ("radius", 1.2e-3.into()),
            ("time", 100.0.into()),
            ("threshold", 1e4.into()),
            ("sweep", "molecules=0.5:100:200".into()),
        ],
        "fig5" => vec![
            ("command", "sweep".into()),
            ("time", 100.0.into()),
            ("threshold", 1e4.into()),
            ("radius", 1.1e-3.into()),
            ("sweep", "radius=1.1mm:1.5mm:9".into()),
        ],
        "fig6" => vec![
            ("command", "pdf".into()),
            ("model", "drift".into()),
            ("radius", 2.0.into()),
            ("time", 1e9.into()),
            ("velocity", 1e-9.into()),
        ],
        other => return Err(CliError::config(format!("unknown preset `{other}`"))),
    };
    let mut raw: RawConfig = entries
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    raw.insert("preset".into(), name.into());
    Ok(raw)
}

/// Reads a config file: flat `key = value` TOML, or a previous CSV or JSON
/// output whose embedded configuration is replayed.
pub fn load_file(path: &Path) -> Result<RawConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    parse_file(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

pub fn parse_file(text: &str) -> Result<RawConfig, CliError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let doc: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::config(format!("bad JSON: {e}")))?;
        let config = doc
            .get("config")
            .and_then(|c| c.as_object())
            .ok_or_else(|| CliError::config("JSON file has no `config` object"))?;
        return config
            .iter()
            .map(|(k, v)| Ok((k.clone(), json_to_toml(v)?)))
            .collect();
    }
    let toml_text = if trimmed.starts_with("# molrss") {
        // embedded config of a CSV output
        text.lines()
            .skip(1)
            .filter_map(|l| l.strip_prefix("# "))
            .collect::<Vec<_>>()
            .join("\n")
    } else {
        text.to_string()
    };
    let table: toml::Table = toml_text
        .parse()
        .map_err(|e| CliError::config(format!("bad config: {e}")))?;
    Ok(table.into_iter().collect())
}

fn json_to_toml(v: &serde_json::Value) -> Result<Value, CliError> {
    Ok(match v {
        serde_json::Value::Bool(b) => Value::Boolean(*b),
        serde_json::Value::String(s) => Value::String(s.clone()),
        serde_json::Value::Number(n) => match n.as_i64() {
            Some(i) => Value::Integer(i),
            None => Value::Float(n.as_f64().unwrap_or(f64::NAN)),
        },
        serde_json::Value::Array(items) => {
            Value::Array(items.iter().map(json_to_toml).collect::<Result<_, _>>()?)
        }
        _ => return Err(CliError::config("unsupported value in JSON config")),
    })
}

/// Overlays `top` onto `base`. A `sweep` spec in either replaces any
/// resolved axis/values pair below it.
pub fn overlay(base: &mut RawConfig, top: RawConfig) {
    if top.contains_key("sweep") || top.contains_key("sweep_axis") {
        base.remove("sweep");
        base.remove("sweep_axis");
        base.remove("sweep_values");
    }
    base.extend(top);
}

struct Reader<'a> {
    raw: &'a RawConfig,
}

impl Reader<'_> {
    fn text(&self, key: &str) -> Result<Option<String>, CliError> {
        match self.raw.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(Value::Float(f)) => Ok(Some(format!("{f:?}"))),
            Some(Value::Integer(i)) => Ok(Some(i.to_string())),
            Some(Value::Boolean(b)) => Ok(Some(b.to_string())),
            Some(_) => Err(CliError::config(format!("`{key}` must be a single value"))),
        }
    }

    fn quantity(
        &self,
        key: &str,
        dim: Dimension,
    ) -> Result<Option<(f64, Option<ConcentrationUnit>)>, CliError> {
        let value = match self.raw.get(key) {
            None => return Ok(None),
            Some(Value::Float(f)) => (*f, None),
            Some(Value::Integer(i)) => (*i as f64, None),
            Some(_) => {
                let text = self.text(key)?.unwrap_or_default();
                let q = parse_quantity(key, &text, dim)?;
                (q.value, q.unit)
            }
        };
        Ok(Some(value))
    }

    fn positive(&self, key: &str, dim: Dimension) -> Result<Option<f64>, CliError> {
        match self.quantity(key, dim)? {
            Some((v, _)) if !(v > 0.0 && v.is_finite()) => Err(CliError::config(format!(
                "`{key}` must be positive, got {v}"
            ))),
            other => Ok(other.map(|(v, _)| v)),
        }
    }

    fn required(&self, key: &str, dim: Dimension) -> Result<f64, CliError> {
        self.positive(key, dim)?
            .ok_or_else(|| CliError::config(format!("`{key}` is required")))
    }

    fn integer(&self, key: &str) -> Result<Option<u64>, CliError> {
        match self.raw.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(Value::String(s)) => s.trim().parse::<u64>().map(Some).map_err(|_| {
                CliError::config(format!("`{key}` must be a non-negative integer, got `{s}`"))
            }),
            Some(Value::Float(f)) if *f >= 0.0 && f.fract() == 0.0 && *f < 1.8e19 => {
                Ok(Some(*f as u64))
            }
            Some(other) => Err(CliError::config(format!(
                "`{key}` must be a non-negative integer, got {other}"
            ))),
        }
    }

    fn flag(&self, key: &str) -> Result<Option<bool>, CliError> {
        match self.raw.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(Value::String(s)) if s == "true" => Ok(Some(true)),
            Some(Value::String(s)) if s == "false" => Ok(Some(false)),
            Some(other) => Err(CliError::config(format!(
                "`{key}` must be true or false, got {other}"
            ))),
        }
    }
}

fn parse_sweep_spec(spec: &str) -> Result<Sweep, CliError> {
    let (name, values) = spec.split_once('=').ok_or_else(|| {
        CliError::config(format!(
            "sweep `{spec}` must look like name=a,b,c or name=start:stop:count"
        ))
    })?;
    let axis = Axis::parse(name)?;
    let dim = axis.dimension();
    let value = |text: &str| parse_quantity(axis.name(), text, dim).map(|q| q.value);
    let values = if values.contains(':') {
        let parts: Vec<&str> = values.split(':').collect();
        let (start, stop, count, log) = match parts.as_slice() {
            [a, b, n] => (value(a)?, value(b)?, *n, false),
            [a, b, n, "log"] => (value(a)?, value(b)?, *n, true),
            _ => return Err(CliError::config(format!("bad sweep range `{values}`"))),
        };
        let count: usize = count
            .trim()
            .parse()
            .ok()
            .filter(|&n| n >= 2)
            .ok_or_else(|| {
                CliError::config(format!("sweep count in `{values}` must be an integer >= 2"))
            })?;
        if log && !(start > 0.0 && stop > 0.0) {
            return Err(CliError::config("log sweep needs positive end points"));
        }
        (0..count)
            .map(|i| {
                let (a, b) = ((count - 1 - i) as f64, i as f64);
                let n = (count - 1) as f64;
                if log {
                    ((a * start.ln() + b * stop.ln()) / n).exp()
                } else {
                    (a * start + b * stop) / n
                }
            })
            .collect()
    } else {
        values
            .split(',')
            .map(value)
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(Sweep { axis, values })
}

impl ExperimentConfig {
    pub fn resolve(raw: &RawConfig) -> Result<Self, CliError> {
        if let Some(unknown) = raw
            .keys()
            .find(|k| !KEYS.contains(&k.as_str()) && k.as_str() != "sweep")
        {
            return Err(CliError::config(format!("unknown config key `{unknown}`")));
        }
        let r = Reader { raw };
        let command = Command::parse(
            &r.text("command")?
                .ok_or_else(|| CliError::config("no command given"))?,
        )?;
        let model = match r.text("model")?.as_deref() {
            None | Some("free") => Model::Free,
            Some("drift") => Model::Drift,
            Some(other) => {
                return Err(CliError::config(format!(
                    "unknown model `{other}` (free, drift)"
                )))
            }
        };
        let velocity = match r.quantity("velocity", Dimension::Velocity)? {
            Some((v, _)) if !(v >= 0.0 && v.is_finite()) => {
                return Err(CliError::config(format!(
                    "`velocity` must be non-negative, got {v}"
                )))
            }
            other => other.map(|(v, _)| v),
        };
        match (model, velocity) {
            (Model::Drift, None) => {
                return Err(CliError::config("the drift model needs `velocity`"))
            }
            (Model::Free, Some(_)) => {
                return Err(CliError::config(
                    "`velocity` only applies to the drift model",
                ))
            }
            _ => {}
        }
        let threshold = match r.quantity("threshold", Dimension::Concentration)? {
            None => None,
            Some((v, unit)) => {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::config(format!(
                        "`threshold` must be positive, got {v}"
                    )));
                }
                match (model, unit) {
                    (Model::Free, Some(ConcentrationUnit::PerLength)) => {
                        return Err(CliError::config(
                            "free diffusion thresholds are per area (e.g. /mm2)",
                        ))
                    }
                    (Model::Drift, Some(ConcentrationUnit::PerArea)) => {
                        return Err(CliError::config(
                            "drift thresholds are per length (e.g. /mm)",
                        ))
                    }
                    _ => Some(v),
                }
            }
        };
        let target = match r.quantity("target", Dimension::Count)? {
            None => 0.9,
            Some((p, _)) if p > 0.0 && p < 1.0 => p,
            Some((p, _)) => {
                return Err(CliError::config(format!(
                    "`target` must lie in (0, 1), got {p}"
                )))
            }
        };

        let sweep = if let Some(spec) = r.text("sweep")? {
            Some(parse_sweep_spec(&spec)?)
        } else if let Some(name) = r.text("sweep_axis")? {
            let axis = Axis::parse(&name)?;
            let values = match raw.get("sweep_values") {
                Some(Value::Array(items)) => items
                    .iter()
                    .map(|v| match v {
                        Value::Float(f) => Ok(*f),
                        Value::Integer(i) => Ok(*i as f64),
                        other => Err(CliError::config(format!("bad sweep value {other}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                _ => {
                    return Err(CliError::config(
                        "`sweep_axis` needs a `sweep_values` array",
                    ))
                }
            };
            Some(Sweep { axis, values })
        } else {
            None
        };
        if let Some(s) = &sweep {
            if s.values.is_empty() {
                return Err(CliError::config("sweep has no values"));
            }
            if s.values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(CliError::config(format!(
                    "{} sweep values must be positive",
                    s.axis.name()
                )));
            }
            let allowed = match command {
                Command::Success => s.axis == Axis::Molecules,
                Command::Sweep => s.axis == Axis::Radius,
                _ => false,
            };
            if !allowed {
                return Err(CliError::config(format!(
                    "`{}` does not support a {} sweep",
                    command.name(),
                    s.axis.name()
                )));
            }
        }

        let radius = match (&sweep, command) {
            (Some(s), Command::Sweep) => r
                .positive("radius", Dimension::Length)?
                .unwrap_or(s.values[0]),
            _ => r.required("radius", Dimension::Length)?,
        };
        if matches!(
            command,
            Command::Success | Command::Threshold | Command::Sweep
        ) && threshold.is_none()
        {
            return Err(CliError::config(format!(
                "`{}` needs `threshold`",
                command.name()
            )));
        }
        if command == Command::Sweep && sweep.is_none() {
            return Err(CliError::config(
                "`sweep` needs a radius sweep, e.g. --sweep radius=1.1mm:1.5mm:9",
            ));
        }

        let y_min = r.positive("y_min", Dimension::Concentration)?;
        let y_max = r.positive("y_max", Dimension::Concentration)?;
        let y_range = match (y_min, y_max) {
            (None, None) => None,
            (Some(a), Some(b)) if a < b => Some((a, b)),
            (Some(_), Some(_)) => return Err(CliError::config("`y_min` must be below `y_max`")),
            _ => return Err(CliError::config("`y_min` and `y_max` go together")),
        };

        let samples = r.integer("samples")?.unwrap_or(DEFAULT_SAMPLES);
        let bins = r.integer("bins")?.unwrap_or(DEFAULT_BINS as u64) as usize;
        if bins < 2 {
            return Err(CliError::config("`bins` must be at least 2"));
        }
        let points = r.integer("points")?.unwrap_or(101) as usize;
        if points < 2 {
            return Err(CliError::config("`points` must be at least 2"));
        }
        let series_terms = r.integer("series_terms")?.unwrap_or(200) as usize;
        let series_tol = r.positive("series_tol", Dimension::Count)?.unwrap_or(1e-12);
        let quad_max_intervals = r.integer("quad_max_intervals")?.unwrap_or(4000) as usize;
        if quad_max_intervals == 0 {
            return Err(CliError::config("`quad_max_intervals` must be at least 1"));
        }
        let format = match r.text("format")?.as_deref() {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => {
                return Err(CliError::config(format!(
                    "unknown format `{other}` (csv, json)"
                )))
            }
        };

        Ok(Self {
            command,
            preset: r.text("preset")?,
            model,
            radius,
            diffusion: r
                .positive("diffusion", Dimension::Diffusivity)?
                .unwrap_or(1e-9),
            time: r.required("time", Dimension::Time)?,
            molecules: r.positive("molecules", Dimension::Count)?.unwrap_or(1.0),
            velocity,
            threshold,
            target,
            samples,
            seed: r.integer("seed")?.unwrap_or(0),
            bins,
            sweep,
            y_range,
            points,
            ecdf: r.flag("ecdf")?.unwrap_or(false),
            series_terms,
            series_tol,
            quad_max_intervals,
            format,
        })
    }

    /// Canonical `(key, value)` pairs, SI numbers only. Feeding them back
    /// through [`resolve`](Self::resolve) gives the same configuration.
    pub fn to_pairs(&self) -> Vec<(&'static str, Value)> {
        let mut out: Vec<(&'static str, Value)> = vec![("command", self.command.name().into())];
        if let Some(p) = &self.preset {
            out.push(("preset", p.as_str().into()));
        }
        let model = match self.model {
            Model::Free => "free",
            Model::Drift => "drift",
        };
        out.push(("model", model.into()));
        out.push(("radius", self.radius.into()));
        out.push(("diffusion", self.diffusion.into()));
        out.push(("time", self.time.into()));
        out.push(("molecules", self.molecules.into()));
        if let Some(v) = self.velocity {
            out.push(("velocity", v.into()));
        }
        if let Some(t) = self.threshold {
            out.push(("threshold", t.into()));
        }
        out.push(("target", self.target.into()));
        out.push(("samples", int(self.samples)));
        out.push(("seed", int(self.seed)));
        out.push(("bins", int(self.bins as u64)));
        if let Some(s) = &self.sweep {
            out.push(("sweep_axis", s.axis.name().into()));
            out.push((
                "sweep_values",
                Value::Array(s.values.iter().map(|&v| Value::Float(v)).collect()),
            ));
        }
        if let Some((a, b)) = self.y_range {
            out.push(("y_min", a.into()));
            out.push(("y_max", b.into()));
        }
        out.push(("points", int(self.points as u64)));
        out.push(("ecdf", self.ecdf.into()));
        out.push(("series_terms", int(self.series_terms as u64)));
        out.push(("series_tol", self.series_tol.into()));
        out.push(("quad_max_intervals", int(self.quad_max_intervals as u64)));
        let format = match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        out.push(("format", format.into()));
        out
    }
}

/// TOML integers are signed 64-bit; larger counts travel as strings.
fn int(v: u64) -> Value {
    match i64::try_from(v) {
        Ok(i) => Value::Integer(i),
        Err(_) => Value::String(v.to_string()),
    }
}
