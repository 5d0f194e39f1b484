//! Experiment configuration: a sectioned INI file, or the same structure as
//! a JSON object of objects.
//!
//! ```ini
//! [experiment]
//! kind = forward_invariance
//! nonlinearity = double_well
//! output = out/forward
//!
//! [domain]
//! geometry = periodic
//! origin = -20
//! extents = 40
//! resolution = 4000
//! ```
//!
//! Keys outside the schema below are rejected.

use super::data::Psi;
use crate::error::{Error, Result};
use crate::grid::{build_grid, DomainSpec, EpigraphSpec, Grid};
use crate::nonlinearity::Nonlinearity;
use crate::pfunction::Verdict;
use crate::solvers::{QuasilinearProfile, Scheme};
use ini::Ini;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Every accepted `section.key`.
const SCHEMA: &[(&str, &[&str])] = &[
    (
        "experiment",
        &["kind", "nonlinearity", "profile", "output", "working_range"],
    ),
    (
        "domain",
        &["geometry", "origin", "extents", "resolution", "graph"],
    ),
    (
        "initial",
        &[
            "data",
            "psi",
            "amplitude",
            "frequency",
            "value",
            "angle",
            "offset",
            "seed",
            "path",
        ],
    ),
    (
        "time",
        &[
            "t_start",
            "t_end",
            "snapshot_interval",
            "scheme",
            "dt",
            "windows",
            "seeds",
            "write_snapshots",
        ],
    ),
    (
        "tolerance",
        &["estimate", "residual", "rigidity", "trend", "expect"],
    ),
    ("wave", &["halfwidth", "tol"]),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    ForwardInvariance,
    AncientWindow,
    MinimalSurface,
    Epigraph,
    TravelingWave,
    Rigidity,
    Residuals,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "forward_invariance" => Self::ForwardInvariance,
            "ancient_window" => Self::AncientWindow,
            "minimal_surface" => Self::MinimalSurface,
            "epigraph" => Self::Epigraph,
            "traveling_wave" => Self::TravelingWave,
            "rigidity" => Self::Rigidity,
            "residuals" => Self::Residuals,
            other => return Err(Error::Config(format!(
                "unknown experiment kind `{other}` (expected forward_invariance, ancient_window, \
                     minimal_surface, epigraph, traveling_wave, rigidity or residuals)"
            ))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::ForwardInvariance => "forward_invariance",
            Self::AncientWindow => "ancient_window",
            Self::MinimalSurface => "minimal_surface",
            Self::Epigraph => "epigraph",
            Self::TravelingWave => "traveling_wave",
            Self::Rigidity => "rigidity",
            Self::Residuals => "residuals",
        }
    }
}

/// Initial data `u(·, t_start)`.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialData {
    /// `g(ψ(x_0))` with the kink `g`.
    Profile {
        psi: Psi,
    },
    /// `amplitude · sin(frequency · x_0)`.
    Sine {
        amplitude: f64,
        frequency: f64,
    },
    /// Band-limited noise; the seed list of `[time]` overrides `seed` in
    /// ancient-window runs.
    Noise {
        seed: u64,
        amplitude: f64,
    },
    /// `g(<a, x> + offset)` with `a = (cos angle, sin angle)` in 2D.
    Planar {
        angle: f64,
        offset: f64,
    },
    /// `amplitude · exp(-|x|^2)`.
    Bump {
        amplitude: f64,
    },
    Constant {
        value: f64,
    },
    /// Vanishing on the graph and side walls of an epigraph box.
    Epigraph,
    /// A binary field file on the configured grid.
    File {
        path: PathBuf,
    },
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// The `nonlinearity` value as written.
    pub nonlinearity_spec: String,
    pub nonlinearity: Nonlinearity,
    /// Quasilinear profile; `None` is the semilinear flow.
    pub profile: Option<QuasilinearProfile>,
    pub domain: DomainSpec,
    pub resolution: Vec<usize>,
    pub initial: InitialData,
    pub t_start: f64,
    pub t_end: f64,
    pub snapshot_interval: f64,
    pub scheme: Scheme,
    pub dt: Option<f64>,
    /// Backward window lengths `T` (ancient runs).
    pub windows: Vec<f64>,
    pub seeds: Vec<u64>,
    pub write_snapshots: bool,
    /// `None`: `10 h^2 + 5 dt`.
    pub estimate_tol: Option<f64>,
    /// `None`: `50 h^2 + 5 dt` with `dt` the snapshot spacing.
    pub residual_tol: Option<f64>,
    pub rigidity_tol: f64,
    /// Bound on the median `(sup P)_+` at the longest window.
    pub trend_threshold: f64,
    pub expect: Option<Verdict>,
    pub wave_halfwidth: f64,
    pub wave_tol: f64,
    pub output: PathBuf,
}

/// Raw `section.key -> value` pairs.
type Raw = BTreeMap<(String, String), String>;

fn raw_from_ini(text: &str) -> Result<Raw> {
    let ini =
        Ini::load_from_str(text).map_err(|e| Error::Config(format!("INI parse error: {e}")))?;
    let mut raw = Raw::new();
    for (section, props) in ini.iter() {
        for (key, value) in props.iter() {
            let Some(section) = section else {
                return Err(Error::Config(format!(
                    "key `{key}` appears before any section"
                )));
            };
            let slot = (section.trim().to_string(), key.trim().to_string());
            if raw.insert(slot.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!(
                    "duplicate key `{}.{}`",
                    slot.0, slot.1
                )));
            }
        }
    }
    Ok(raw)
}

fn json_scalar(v: &serde_json::Value, at: &str) -> Result<String> {
    use serde_json::Value;
    Ok(match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Array(items) => items
            .iter()
            .map(|x| json_scalar(x, at))
            .collect::<Result<Vec<_>>>()?
            .join(","),
        _ => {
            return Err(Error::Config(format!(
                "`{at}` must be a string, number, bool or list"
            )))
        }
    })
}

fn raw_from_json(text: &str) -> Result<Raw> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("JSON parse error: {e}")))?;
    let sections = value
        .as_object()
        .ok_or_else(|| Error::Config("top level must be an object of sections".into()))?;
    let mut raw = Raw::new();
    for (section, body) in sections {
        let body = body
            .as_object()
            .ok_or_else(|| Error::Config(format!("section `{section}` must be an object")))?;
        for (key, v) in body {
            let at = format!("{section}.{key}");
            raw.insert((section.clone(), key.clone()), json_scalar(v, &at)?);
        }
    }
    Ok(raw)
}

/// Typed access to the raw map.
struct Keys {
    raw: Raw,
}

impl Keys {
    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.raw
            .get(&(section.to_string(), key.to_string()))
            .map(String::as_str)
    }

    fn require(&self, section: &str, key: &str) -> Result<&str> {
        self.get(section, key).ok_or_else(|| {
            Error::Config(format!(
                "missing required key `{key}` in section [{section}]"
            ))
        })
    }

    fn float(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key)
            .map(|v| parse_number(v).map_err(|e| bad(section, key, &e)))
            .transpose()
    }

    fn floats(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(section, key)
            .map(|v| parse_list(v, parse_number).map_err(|e| bad(section, key, &e)))
            .transpose()
    }

    fn usizes(&self, section: &str, key: &str) -> Result<Option<Vec<usize>>> {
        self.get(section, key)
            .map(|v| {
                parse_list(v, |s| s.parse::<usize>().map_err(|e| e.to_string()))
                    .map_err(|e| bad(section, key, &e))
            })
            .transpose()
    }

    fn seeds(&self, section: &str, key: &str) -> Result<Option<Vec<u64>>> {
        self.get(section, key)
            .map(|v| parse_seeds(v).map_err(|e| bad(section, key, &e)))
            .transpose()
    }

    fn flag(&self, section: &str, key: &str) -> Result<Option<bool>> {
        self.get(section, key)
            .map(|v| match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                other => Err(bad(section, key, &format!("`{other}` is not a boolean"))),
            })
            .transpose()
    }
}

fn bad(section: &str, key: &str, msg: &str) -> Error {
    Error::Config(format!("invalid value for `{section}.{key}`: {msg}"))
}

/// A float, optionally written as a multiple of `pi` (`2pi`, `0.5*pi`).
fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let v = if let Some(head) = s.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let k = if head.is_empty() {
            1.0
        } else {
            head.parse::<f64>().map_err(|e| format!("`{s}`: {e}"))?
        };
        k * PI
    } else {
        s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"))?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_list<T>(
    s: &str,
    item: impl Fn(&str) -> std::result::Result<T, String>,
) -> std::result::Result<Vec<T>, String> {
    let out: Vec<T> = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(item)
        .collect::<std::result::Result<_, _>>()?;
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

/// `0,3,7` or an inclusive range `0..9`.
fn parse_seeds(s: &str) -> std::result::Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("`{s}`: {e}"))?;
        let b: u64 = b.trim().parse().map_err(|e| format!("`{s}`: {e}"))?;
        if b < a {
            return Err(format!("empty seed range `{s}`"));
        }
        return Ok((a..=b).collect());
    }
    parse_list(s, |x| x.parse::<u64>().map_err(|e| e.to_string()))
}

/// `name key=value ...` parameters.
fn parse_params(rest: &str) -> std::result::Result<BTreeMap<String, f64>, String> {
    rest.split_whitespace()
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{kv}`"))?;
            Ok((k.to_string(), parse_number(v)?))
        })
        .collect()
}

/// `double_well`, `double_well_imbalanced beta=<float>`, `zero`, or
/// `polynomial c0,c1,...` (ascending coefficients of `F`).
pub fn parse_nonlinearity(spec: &str) -> Result<Nonlinearity> {
    let spec = spec.trim();
    let (name, rest) = spec.split_once(char::is_whitespace).unwrap_or((spec, ""));
    let err = |m: String| Error::Config(format!("nonlinearity `{spec}`: {m}"));
    match name {
        "double_well" if rest.trim().is_empty() => Ok(Nonlinearity::double_well(0.0)?),
        "double_well_imbalanced" => {
            let params = parse_params(rest).map_err(err)?;
            if let Some(k) = params.keys().find(|k| k.as_str() != "beta") {
                return Err(err(format!("unknown parameter `{k}`")));
            }
            let beta = *params.get("beta").ok_or_else(|| err("missing beta=<float>".into()))?;
            Nonlinearity::double_well(beta).map_err(|e| err(e.to_string()))
        }
        "zero" if rest.trim().is_empty() => Ok(Nonlinearity::zero()),
        "polynomial" => {
            let coeffs = parse_list(rest, parse_number).map_err(err)?;
            Nonlinearity::polynomial(coeffs, (-2.0, 2.0)).map_err(|e| err(e.to_string()))
        }
        _ => Err(err(
            "expected double_well, double_well_imbalanced beta=<float>, zero or polynomial <coeffs>".into(),
        )),
    }
}

fn parse_profile(name: &str) -> Result<Option<QuasilinearProfile>> {
    match name {
        "semilinear" | "identity" => Ok(None),
        "minimal_surface" => Ok(Some(QuasilinearProfile::minimal_surface())),
        other => Err(Error::Config(format!(
            "unknown profile `{other}` (expected semilinear or minimal_surface)"
        ))),
    }
}

fn parse_graph(spec: &str) -> Result<EpigraphSpec> {
    let spec = spec.trim();
    let (name, rest) = spec.split_once(char::is_whitespace).unwrap_or((spec, ""));
    let err = |m: String| Error::Config(format!("graph `{spec}`: {m}"));
    match name {
        "flat" => Ok(EpigraphSpec::flat()),
        "paraboloid" => {
            let p = parse_params(rest).map_err(err)?;
            let kappa = *p
                .get("kappa")
                .ok_or_else(|| err("missing kappa=<float>".into()))?;
            let radius = *p
                .get("radius")
                .ok_or_else(|| err("missing radius=<float>".into()))?;
            Ok(EpigraphSpec::paraboloid(kappa, radius))
        }
        _ => Err(err(
            "expected flat or paraboloid kappa=<k> radius=<r>".into()
        )),
    }
}

fn parse_verdict(s: &str) -> Result<Verdict> {
    match s {
        "one_dimensional" => Ok(Verdict::OneDimensional),
        "constant" => Ok(Verdict::Constant),
        "not_rigid" => Ok(Verdict::NotRigid),
        other => Err(Error::Config(format!(
            "unknown verdict `{other}` (expected one_dimensional, constant or not_rigid)"
        ))),
    }
}

struct Defaults {
    geometry: &'static str,
    origin: Vec<f64>,
    extents: Vec<f64>,
    resolution: Vec<usize>,
    t_end: f64,
    interval: f64,
}

fn defaults(kind: ExperimentKind) -> Defaults {
    use ExperimentKind::*;
    match kind {
        ForwardInvariance | MinimalSurface | Residuals | TravelingWave => Defaults {
            geometry: "periodic",
            origin: vec![-20.0],
            extents: vec![40.0],
            resolution: vec![4000],
            t_end: 1.0,
            interval: 2e-3,
        },
        AncientWindow => Defaults {
            geometry: "periodic",
            origin: vec![0.0],
            extents: vec![2.0 * PI],
            resolution: vec![256],
            t_end: 0.0,
            interval: 2e-3,
        },
        Epigraph => Defaults {
            geometry: "epigraph",
            origin: vec![-10.0, 0.0],
            extents: vec![20.0, 10.0],
            resolution: vec![400, 200],
            t_end: 0.5,
            interval: 1e-2,
        },
        Rigidity => Defaults {
            geometry: "dirichlet",
            origin: vec![-2.0, -2.0],
            extents: vec![4.0, 4.0],
            resolution: vec![40, 40],
            t_end: 0.0,
            interval: 1.0,
        },
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("`{name}` must be positive, got {v}")))
    }
}

impl ExperimentConfig {
    /// Reads an INI file, or JSON when the extension is `.json`.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if json {
            Self::from_json_str(&text)
        } else {
            Self::from_ini_str(&text)
        }
    }

    pub fn from_ini_str(text: &str) -> Result<Self> {
        Self::from_raw(raw_from_ini(text)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_raw(raw_from_json(text)?)
    }

    fn from_raw(raw: Raw) -> Result<Self> {
        for (section, key) in raw.keys() {
            match SCHEMA.iter().find(|(s, _)| s == section) {
                None => return Err(Error::Config(format!("unknown section [{section}]"))),
                Some((_, keys)) if !keys.contains(&key.as_str()) => {
                    return Err(Error::Config(format!(
                        "unknown key `{key}` in section [{section}]"
                    )))
                }
                _ => {}
            }
        }
        let k = Keys { raw };
        let kind = ExperimentKind::parse(k.require("experiment", "kind")?)?;
        let nonlinearity_spec = k.require("experiment", "nonlinearity")?.to_string();
        let mut nonlinearity = parse_nonlinearity(&nonlinearity_spec)?;
        if let Some(r) = k.floats("experiment", "working_range")? {
            if r.len() != 2 {
                return Err(bad("experiment", "working_range", "expected `lo, hi`"));
            }
            nonlinearity = nonlinearity
                .with_working_range(r[0], r[1])
                .map_err(|e| bad("experiment", "working_range", &e.to_string()))?;
        }
        let profile = match (kind, k.get("experiment", "profile")) {
            (ExperimentKind::MinimalSurface, None) => Some(QuasilinearProfile::minimal_surface()),
            (ExperimentKind::MinimalSurface, Some(p)) => match parse_profile(p)? {
                None => {
                    return Err(Error::Config(
                        "minimal_surface experiments need a quasilinear profile".into(),
                    ))
                }
                some => some,
            },
            (_, Some(p)) => parse_profile(p)?,
            (_, None) => None,
        };

        let d = defaults(kind);
        let geometry = k.get("domain", "geometry").unwrap_or(d.geometry);
        let origin = k.floats("domain", "origin")?.unwrap_or(d.origin);
        let extents = k.floats("domain", "extents")?.unwrap_or(d.extents);
        let resolution = k.usizes("domain", "resolution")?.unwrap_or(d.resolution);
        let domain = match geometry {
            "periodic" => DomainSpec::periodic(&origin, &extents),
            "dirichlet" => DomainSpec::dirichlet(&origin, &extents),
            "epigraph" => {
                let graph = parse_graph(k.get("domain", "graph").unwrap_or("flat"))?;
                DomainSpec::epigraph(&origin, &extents, graph)
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown geometry `{other}` (expected periodic, dirichlet or epigraph)"
                )))
            }
        };
        if k.get("domain", "graph").is_some() && geometry != "epigraph" {
            return Err(Error::Config(
                "`domain.graph` needs geometry = epigraph".into(),
            ));
        }

        let default_data = match kind {
            ExperimentKind::AncientWindow => "noise",
            ExperimentKind::Epigraph => "epigraph",
            ExperimentKind::Rigidity => "planar",
            _ => "profile",
        };
        let amplitude = k.float("initial", "amplitude")?;
        let initial = match k.get("initial", "data").unwrap_or(default_data) {
            "profile" => InitialData::Profile {
                psi: Psi::parse(k.get("initial", "psi").unwrap_or("identity"))?,
            },
            "sine" => InitialData::Sine {
                amplitude: amplitude.unwrap_or(0.1),
                frequency: k.float("initial", "frequency")?.unwrap_or(10.0),
            },
            "noise" => InitialData::Noise {
                seed: k.seeds("initial", "seed")?.map_or(0, |s| s[0]),
                amplitude: amplitude.unwrap_or(0.9),
            },
            "planar" => InitialData::Planar {
                angle: k.float("initial", "angle")?.unwrap_or(0.7),
                offset: k.float("initial", "offset")?.unwrap_or(0.3),
            },
            "bump" => InitialData::Bump {
                amplitude: amplitude.unwrap_or(0.5),
            },
            "constant" => InitialData::Constant {
                value: k.float("initial", "value")?.unwrap_or(0.0),
            },
            "epigraph" => InitialData::Epigraph,
            "file" => InitialData::File {
                path: PathBuf::from(k.require("initial", "path")?),
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown initial data `{other}` (expected profile, sine, noise, planar, bump, \
                     constant, epigraph or file)"
                )))
            }
        };

        let t_start = k.float("time", "t_start")?.unwrap_or(0.0);
        let t_end = k.float("time", "t_end")?.unwrap_or(d.t_end);
        let snapshot_interval = positive(
            "time.snapshot_interval",
            k.float("time", "snapshot_interval")?.unwrap_or(d.interval),
        )?;
        let scheme = match k.get("time", "scheme").unwrap_or("explicit") {
            "explicit" => Scheme::Explicit,
            "imex" => Scheme::Imex,
            other => {
                return Err(Error::Config(format!(
                    "unknown scheme `{other}` (expected explicit or imex)"
                )))
            }
        };
        if scheme == Scheme::Imex && profile.is_some() {
            return Err(Error::Config(
                "the quasilinear flow supports only the explicit scheme".into(),
            ));
        }
        let dt = k
            .float("time", "dt")?
            .map(|v| positive("time.dt", v))
            .transpose()?;
        let windows = k
            .floats("time", "windows")?
            .unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0]);
        for &w in &windows {
            positive("time.windows", w)?;
        }
        let seeds = k
            .seeds("time", "seeds")?
            .unwrap_or_else(|| (0..10).collect());
        let write_snapshots = k.flag("time", "write_snapshots")?.unwrap_or(false);

        let estimate_tol = k
            .float("tolerance", "estimate")?
            .map(|v| positive("tolerance.estimate", v))
            .transpose()?;
        let residual_tol = k
            .float("tolerance", "residual")?
            .map(|v| positive("tolerance.residual", v))
            .transpose()?;
        let rigidity_tol = positive(
            "tolerance.rigidity",
            k.float("tolerance", "rigidity")?.unwrap_or(1e-6),
        )?;
        let trend_threshold = positive(
            "tolerance.trend",
            k.float("tolerance", "trend")?.unwrap_or(0.05),
        )?;
        let expect = k
            .get("tolerance", "expect")
            .map(parse_verdict)
            .transpose()?;
        let wave_halfwidth = positive(
            "wave.halfwidth",
            k.float("wave", "halfwidth")?.unwrap_or(20.0),
        )?;
        let wave_tol = positive("wave.tol", k.float("wave", "tol")?.unwrap_or(1e-5))?;
        let output = PathBuf::from(k.get("experiment", "output").unwrap_or("pflab-out"));

        let cfg = Self {
            kind,
            nonlinearity_spec,
            nonlinearity,
            profile,
            domain,
            resolution,
            initial,
            t_start,
            t_end,
            snapshot_interval,
            scheme,
            dt,
            windows,
            seeds,
            write_snapshots,
            estimate_tol,
            residual_tol,
            rigidity_tol,
            trend_threshold,
            expect,
            wave_halfwidth,
            wave_tol,
            output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that the referenced objects can be built.
    fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        if self.kind == TravelingWave {
            return Ok(());
        }
        let grid = self.grid().map_err(|e| Error::Config(e.to_string()))?;
        match self.kind {
            AncientWindow if !grid.is_periodic() => {
                return Err(Error::Config(
                    "ancient_window runs need a periodic domain".into(),
                ))
            }
            Epigraph if !matches!(grid.policy(), crate::grid::BoundaryPolicy::Epigraph(_)) => {
                return Err(Error::Config(
                    "epigraph runs need geometry = epigraph".into(),
                ))
            }
            Rigidity | AncientWindow => {}
            _ if !(self.t_end > self.t_start) => {
                return Err(Error::Config(format!(
                    "time window is empty: t_start = {}, t_end = {}",
                    self.t_start, self.t_end
                )))
            }
            _ => {}
        }
        if self.initial == InitialData::Epigraph
            && !matches!(grid.policy(), crate::grid::BoundaryPolicy::Epigraph(_))
        {
            return Err(Error::Config(
                "epigraph initial data needs geometry = epigraph".into(),
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        build_grid(&self.domain, &self.resolution)
    }
}
