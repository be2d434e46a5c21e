//! Run configuration: line-oriented `section.key = value` text, `#` starts a
//! comment. See `configs/` for complete examples.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ltrb_core::{Rect, TemporalProfile};

use crate::error::{CliError, Result};

const KEYS: &[&str] = &[
    "mesh.n",
    "mesh.x_min",
    "mesh.x_max",
    "mesh.y_min",
    "mesh.y_max",
    "mesh.file",
    "physics.c",
    "ic.x0",
    "ic.zeta",
    "ic.amplitude",
    "ic.u1",
    "ic.u1_x0",
    "ic.u1_zeta",
    "ic.u1_amplitude",
    "forcing.kind",
    "forcing.rate",
    "forcing.omega",
    "forcing.x0",
    "forcing.zeta",
    "forcing.amplitude",
    "laplace.alpha",
    "laplace.beta",
    "laplace.m",
    "spectral.tol",
    "spectral.max_iter",
    "pod.r",
    "time.t_final",
    "time.n_steps",
    "output.dir",
    "output.trajectory_stride",
    "output.lift",
    "output.export_operators",
    "run.parallel_snapshots",
    "compare.r_values",
    "compare.m_values",
    "compare.error_stride",
];

/// Parsed `key = value` pairs with their line numbers.
#[derive(Clone, Debug)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let syntax = |line: usize, msg: String| CliError::ConfigSyntax { path: path.to_path_buf(), line, msg };
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| syntax(line, format!("expected `section.key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(syntax(line, format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(syntax(line, format!("empty value for `{key}`")));
            }
            if let Some((_, first)) = entries.insert(key.to_string(), (value.to_string(), line)) {
                return Err(syntax(line, format!("duplicate key `{key}` (first set on line {first})")));
            }
        }
        Ok(Self { entries })
    }

    fn raw(&self, key: &str) -> Option<(&str, usize)> {
        self.entries.get(key).map(|(v, l)| (v.as_str(), *l))
    }

    fn value_err(key: &str, line: usize, msg: impl Into<String>) -> CliError {
        CliError::ConfigValue { key: key.to_string(), line, msg: msg.into() }
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => {
                v.parse().map(Some).map_err(|_| Self::value_err(key, line, format!("cannot parse `{v}`")))
            }
        }
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| CliError::MissingKey(key.to_string()))
    }

    fn positive(&self, key: &str, default: Option<f64>) -> Result<f64> {
        let v = match default {
            Some(d) => self.get(key)?.unwrap_or(d),
            None => self.require(key)?,
        };
        if v <= 0.0 || !v.is_finite() {
            let line = self.raw(key).map_or(0, |(_, l)| l);
            return Err(Self::value_err(key, line, format!("must be positive and finite, got {v}")));
        }
        Ok(v)
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        let Some((v, line)) = self.raw(key) else { return Ok(None) };
        v.split(',')
            .map(|p| p.trim().parse().map_err(|_| Self::value_err(key, line, format!("cannot parse `{}`", p.trim()))))
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    fn point(&self, key: &str) -> Result<Option<[f64; 2]>> {
        let Some(v) = self.list::<f64>(key)? else { return Ok(None) };
        match v.as_slice() {
            &[x, y] => Ok(Some([x, y])),
            _ => Err(Self::value_err(key, self.raw(key).map_or(0, |(_, l)| l), "expected two numbers `x, y`")),
        }
    }

    /// Integer list with `a..b` (inclusive) and `a..b:step` ranges.
    fn index_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        let Some((v, line)) = self.raw(key) else { return Ok(None) };
        let bad = |p: &str| Self::value_err(key, line, format!("cannot parse `{p}`"));
        let mut out = Vec::new();
        for part in v.split(',').map(str::trim) {
            if let Some((a, rest)) = part.split_once("..") {
                let (b, step) = match rest.split_once(':') {
                    Some((b, s)) => (b, s.trim().parse::<usize>().map_err(|_| bad(part))?),
                    None => (rest, 1),
                };
                let a: usize = a.trim().parse().map_err(|_| bad(part))?;
                let b: usize = b.trim().parse().map_err(|_| bad(part))?;
                if step == 0 || a > b {
                    return Err(bad(part));
                }
                out.extend((a..=b).step_by(step));
            } else {
                out.push(part.parse().map_err(|_| bad(part))?);
            }
        }
        Ok(Some(out))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    Structured { n: usize, domain: Rect },
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialVelocity {
    Zero,
    Gaussian { x0: [f64; 2], zeta: f64, amplitude: f64 },
}

/// `g(x) q(t)` with a Gaussian bump `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForcingSpec {
    pub temporal: TemporalProfile,
    pub x0: [f64; 2],
    pub zeta: f64,
    pub amplitude: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaSpec {
    Auto,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mesh: MeshSource,
    pub c: f64,
    pub ic_x0: [f64; 2],
    pub ic_zeta: f64,
    pub ic_amplitude: f64,
    pub u1: InitialVelocity,
    pub forcing: ForcingSpec,
    pub alpha: f64,
    pub beta: BetaSpec,
    m: Option<usize>,
    pub spectral_tol: f64,
    pub spectral_max_iter: usize,
    r: Option<usize>,
    pub t_final: f64,
    pub n_steps: usize,
    pub out_dir: PathBuf,
    pub trajectory_stride: usize,
    pub lift: bool,
    pub export_operators: bool,
    pub parallel_snapshots: bool,
    r_values: Option<Vec<usize>>,
    m_values: Option<Vec<usize>>,
    pub error_stride: usize,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::ConfigSyntax {
            path: path.to_path_buf(),
            line: 0,
            msg: format!("cannot read config: {e}"),
        })?;
        Self::from_raw(&RawConfig::parse(path, &text)?, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        Self::from_raw(&RawConfig::parse(Path::new("<config>"), text)?, Path::new("."))
    }

    fn from_raw(raw: &RawConfig, base: &Path) -> Result<Self> {
        let mesh = match raw.get::<String>("mesh.file")? {
            Some(f) => MeshSource::File(base.join(f)),
            None => {
                let n: usize = raw.require("mesh.n")?;
                if n < 2 {
                    return Err(RawConfig::value_err("mesh.n", raw.raw("mesh.n").map_or(0, |r| r.1), "need n >= 2"));
                }
                let d = Rect::default();
                let domain = Rect::new(
                    raw.get("mesh.x_min")?.unwrap_or(d.x_min),
                    raw.get("mesh.x_max")?.unwrap_or(d.x_max),
                    raw.get("mesh.y_min")?.unwrap_or(d.y_min),
                    raw.get("mesh.y_max")?.unwrap_or(d.y_max),
                );
                if !(domain.x_max > domain.x_min && domain.y_max > domain.y_min) {
                    return Err(RawConfig::value_err("mesh.x_min", 0, "domain bounds must satisfy min < max"));
                }
                MeshSource::Structured { n, domain }
            }
        };

        let u1 = match raw.get::<String>("ic.u1")?.as_deref() {
            None | Some("zero") => InitialVelocity::Zero,
            Some("gaussian") => InitialVelocity::Gaussian {
                x0: raw.point("ic.u1_x0")?.ok_or_else(|| CliError::MissingKey("ic.u1_x0".into()))?,
                zeta: raw.positive("ic.u1_zeta", None)?,
                amplitude: raw.get("ic.u1_amplitude")?.unwrap_or(1.0),
            },
            Some(other) => {
                return Err(RawConfig::value_err(
                    "ic.u1",
                    raw.raw("ic.u1").map_or(0, |r| r.1),
                    format!("expected `zero` or `gaussian`, got `{other}`"),
                ))
            }
        };

        let temporal = match raw.get::<String>("forcing.kind")?.as_deref() {
            None | Some("zero") => TemporalProfile::Zero,
            Some("exponential") => TemporalProfile::Exponential { rate: raw.require("forcing.rate")? },
            Some("sine") => TemporalProfile::Sine { omega: raw.require("forcing.omega")? },
            Some("constant") => TemporalProfile::Constant,
            Some(other) => {
                return Err(RawConfig::value_err(
                    "forcing.kind",
                    raw.raw("forcing.kind").map_or(0, |r| r.1),
                    format!("expected one of zero, exponential, sine, constant; got `{other}`"),
                ))
            }
        };
        let forcing = if temporal == TemporalProfile::Zero {
            ForcingSpec { temporal, x0: [0.0, 0.0], zeta: 1.0, amplitude: 0.0 }
        } else {
            ForcingSpec {
                temporal,
                x0: raw.point("forcing.x0")?.ok_or_else(|| CliError::MissingKey("forcing.x0".into()))?,
                zeta: raw.positive("forcing.zeta", None)?,
                amplitude: raw.get("forcing.amplitude")?.unwrap_or(1.0),
            }
        };

        let beta = match raw.raw("laplace.beta") {
            None => BetaSpec::Auto,
            Some(("auto", _)) => BetaSpec::Auto,
            Some(_) => BetaSpec::Fixed(raw.positive("laplace.beta", None)?),
        };

        let m: Option<usize> = raw.get("laplace.m")?;
        let m_values = raw.index_list("compare.m_values")?;
        for (key, vals) in [("laplace.m", m.map(|v| vec![v])), ("compare.m_values", m_values.clone())] {
            if let Some(vals) = vals {
                if let Some(bad) = vals.iter().find(|&&v| v < 2 || v % 2 == 1) {
                    return Err(RawConfig::value_err(
                        key,
                        raw.raw(key).map_or(0, |r| r.1),
                        format!("node count must be even and >= 2, got {bad}"),
                    ));
                }
            }
        }
        let r: Option<usize> = raw.get("pod.r")?;
        let r_values = raw.index_list("compare.r_values")?;
        for (key, vals) in [("pod.r", r.map(|v| vec![v])), ("compare.r_values", r_values.clone())] {
            if let Some(vals) = vals {
                if vals.contains(&0) {
                    return Err(RawConfig::value_err(
                        key,
                        raw.raw(key).map_or(0, |r| r.1),
                        "reduced dimension must be >= 1",
                    ));
                }
            }
        }

        let n_steps: usize = raw.require("time.n_steps")?;
        if n_steps == 0 {
            return Err(RawConfig::value_err(
                "time.n_steps",
                raw.raw("time.n_steps").map_or(0, |r| r.1),
                "need at least one step",
            ));
        }
        let nonzero = |key: &str, default: usize| -> Result<usize> {
            let v: usize = raw.get(key)?.unwrap_or(default);
            if v == 0 {
                return Err(RawConfig::value_err(key, raw.raw(key).map_or(0, |r| r.1), "must be >= 1"));
            }
            Ok(v)
        };

        Ok(Self {
            mesh,
            c: raw.positive("physics.c", None)?,
            ic_x0: raw.point("ic.x0")?.ok_or_else(|| CliError::MissingKey("ic.x0".into()))?,
            ic_zeta: raw.positive("ic.zeta", None)?,
            ic_amplitude: raw.get("ic.amplitude")?.unwrap_or(1.0),
            u1,
            forcing,
            alpha: raw.positive("laplace.alpha", Some(5.0))?,
            beta,
            m,
            spectral_tol: raw.positive("spectral.tol", Some(ltrb_core::spectral::DEFAULT_TOL))?,
            spectral_max_iter: nonzero("spectral.max_iter", ltrb_core::spectral::DEFAULT_MAX_ITER)?,
            r,
            t_final: raw.positive("time.t_final", None)?,
            n_steps,
            out_dir: PathBuf::from(raw.get::<String>("output.dir")?.unwrap_or_else(|| "out".into())),
            trajectory_stride: nonzero("output.trajectory_stride", 1)?,
            lift: raw.get("output.lift")?.unwrap_or(true),
            export_operators: raw.get("output.export_operators")?.unwrap_or(false),
            parallel_snapshots: raw.get("run.parallel_snapshots")?.unwrap_or(false),
            r_values,
            m_values,
            error_stride: nonzero("compare.error_stride", 1)?,
        })
    }

    pub fn m(&self) -> Result<usize> {
        self.m.ok_or_else(|| CliError::MissingKey("laplace.m".into()))
    }

    pub fn r(&self) -> Result<usize> {
        self.r.ok_or_else(|| CliError::MissingKey("pod.r".into()))
    }

    pub fn r_values(&self) -> Result<Vec<usize>> {
        self.r_values.clone().ok_or_else(|| CliError::MissingKey("compare.r_values".into()))
    }

    pub fn m_values(&self) -> Result<Vec<usize>> {
        self.m_values.clone().ok_or_else(|| CliError::MissingKey("compare.m_values".into()))
    }

    pub fn set_m(&mut self, m: usize) {
        self.m = Some(m);
    }

    pub fn set_r(&mut self, r: usize) {
        self.r = Some(r);
    }
}
