//! Flat `key=value` run configuration.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// Every accepted key, in the order flags are listed by `--help`.
pub const KEYS: &[(&str, &str)] = &[
    ("command", "classify | qfunc | weyl-sum | husimi | l2norm | smooth | extract | beam | verify-all"),
    ("geometry", "circle | torus | sphere"),
    ("m", "torus dimension"),
    ("tau", "Grauert tube radius"),
    ("tau_cap", "upper bound accepted for tau (default 2)"),
    ("lambda_min", "lower end of the lambda grid"),
    ("lambda_max", "upper end of the lambda grid / eigendata cutoff"),
    ("n_max", "sphere degree cutoff"),
    ("grid_points", "number of lambda grid points"),
    ("x", "base point, comma separated"),
    ("direction", "unit direction of xi, comma separated"),
    ("k", "lattice vector of the eigenfunction, comma separated"),
    ("harmonic", "sphere eigenfunction N,M"),
    ("lambda", "evaluation point"),
    ("period", "period T of the closed geodesic"),
    ("n", "period multiple for extract"),
    ("kernel_support", "support radius of the smoothing kernel transform"),
    ("kernel_p", "B-spline power of the smoothing kernel"),
    ("calibration_lambda", "circle calibration point for extract"),
    ("matrix", "symplectic matrix file (first line d=<int>)"),
    ("s0", "elliptic phase for qfunc"),
    ("mus", "hyperbolic exponents for qfunc, comma separated"),
    ("n_terms", "coefficients tabulated from a matrix for qfunc"),
    ("summation", "abel:<N> | adaptive | truncate:<N> | cesaro:<N>"),
    ("quadrature", "auto | <node count>"),
    ("curvature", "sphere | constant(K) | perturbed-sphere(eps,mode) | cosine(base,eps,freq) | table:<file>"),
    ("length", "geodesic length for beam"),
    ("steps", "integration steps for beam"),
    ("beam_k", "longitudinal quantum number for beam"),
    ("workers", "worker threads"),
    ("output", "CSV output path (stdout if absent)"),
    ("summary", "summary output path"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    QFunc,
    WeylSum,
    Husimi,
    L2Norm,
    Smooth,
    Extract,
    Beam,
    VerifyAll,
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "classify" => Command::Classify,
            "qfunc" => Command::QFunc,
            "weyl-sum" => Command::WeylSum,
            "husimi" => Command::Husimi,
            "l2norm" => Command::L2Norm,
            "smooth" => Command::Smooth,
            "extract" => Command::Extract,
            "beam" => Command::Beam,
            "verify-all" => Command::VerifyAll,
            _ => return Err(format!("unknown command {s:?}")),
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Classify => "classify",
            Command::QFunc => "qfunc",
            Command::WeylSum => "weyl-sum",
            Command::Husimi => "husimi",
            Command::L2Norm => "l2norm",
            Command::Smooth => "smooth",
            Command::Extract => "extract",
            Command::Beam => "beam",
            Command::VerifyAll => "verify-all",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometryKind {
    Circle,
    Torus(usize),
    Sphere,
}

impl GeometryKind {
    pub fn dim(&self) -> usize {
        match self {
            GeometryKind::Circle => 1,
            GeometryKind::Torus(m) => *m,
            GeometryKind::Sphere => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurvatureSpec {
    Sphere,
    Constant(f64),
    PerturbedSphere { eps: f64, mode: u32 },
    Cosine { base: f64, eps: f64, freq: f64 },
    Table(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SummationSpec {
    Abel(usize),
    Adaptive,
    Truncate(usize),
    Cesaro(usize),
}

/// Where a value came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag => f.write_str("command line"),
            Origin::Default => f.write_str("configuration"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{origin}: {message}")]
pub struct ConfigError {
    pub origin: Origin,
    pub message: String,
}

fn err<T>(origin: &Origin, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { origin: origin.clone(), message: message.into() })
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub geometry: Option<GeometryKind>,
    pub tau: Option<f64>,
    pub tau_cap: f64,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub n_max: Option<usize>,
    pub grid_points: usize,
    pub x: Option<Vec<f64>>,
    pub direction: Option<Vec<f64>>,
    pub k: Option<Vec<i64>>,
    pub harmonic: Option<(usize, i64)>,
    pub lambda: Option<f64>,
    pub period: f64,
    pub n: u32,
    pub kernel_support: f64,
    pub kernel_p: usize,
    pub calibration_lambda: f64,
    pub matrix: Option<PathBuf>,
    pub s0: Option<f64>,
    pub mus: Option<Vec<f64>>,
    pub n_terms: usize,
    pub summation: Option<SummationSpec>,
    /// `None` = automatic node count.
    pub quadrature: Option<usize>,
    pub curvature: CurvatureSpec,
    pub length: f64,
    pub steps: usize,
    pub beam_k: i64,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

/// Raw `(key, value, origin)` entries; later entries override earlier ones.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, Origin)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let origin = Origin::Line(i + 1);
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return err(&origin, format!("expected key=value, got {line:?}"));
            };
            raw.set(k.trim(), v.trim(), origin)?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return err(&origin, format!("unknown key {key:?}"));
        }
        self.entries.insert(key.to_string(), (value.to_string(), origin));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<(&str, &Origin)> {
        self.entries.get(key).map(|(v, o)| (v.as_str(), o))
    }

    fn num<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((v, o)) => v.parse().map(Some).or_else(|_| err(o, format!("{key}: cannot parse {v:?}"))),
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((v, o)) => v
                .split(',')
                .map(|s| s.trim().parse::<T>())
                .collect::<Result<Vec<T>, _>>()
                .map(Some)
                .or_else(|_| err(o, format!("{key}: cannot parse list {v:?}"))),
        }
    }

    fn origin(&self, key: &str) -> Origin {
        self.get(key).map_or(Origin::Default, |(_, o)| o.clone())
    }

    pub fn validate(&self) -> Result<RunConfig, ConfigError> {
        let Some((cmd, co)) = self.get("command") else {
            return err(&Origin::Default, "missing required key \"command\"");
        };
        let command: Command = cmd.parse().or_else(|e: String| err(co, e))?;
        let geometry = match self.get("geometry") {
            None => None,
            Some(("circle", _)) => Some(GeometryKind::Circle),
            Some(("sphere", _)) => Some(GeometryKind::Sphere),
            Some(("torus", o)) => match self.num::<usize>("m")? {
                None => return err(o, "geometry=torus needs the key \"m\""),
                Some(m) if !(1..=3).contains(&m) => return err(&self.origin("m"), format!("m must be 1, 2 or 3, got {m}")),
                Some(m) => Some(GeometryKind::Torus(m)),
            },
            Some((g, o)) => return err(o, format!("unknown geometry {g:?}")),
        };
        let tau_cap = self.num("tau_cap")?.unwrap_or(2.0);
        let tau: Option<f64> = self.num("tau")?;
        if let Some(t) = tau {
            if !(t > 0.0 && t <= tau_cap) {
                return err(&self.origin("tau"), format!("tau must lie in (0, tau_cap] = (0, {tau_cap}], got {t}"));
            }
        }
        let lambda_max: Option<f64> = self.num("lambda_max")?;
        if let (Some(t), Some(l)) = (tau, lambda_max) {
            if 2.0 * t * l > 700.0 {
                return err(
                    &self.origin("lambda_max"),
                    format!("2·tau·lambda_max = {} exceeds 700 (exponential weights leave double range)", 2.0 * t * l),
                );
            }
        }
        if let Some(l) = lambda_max {
            if !(l > 0.0) {
                return err(&self.origin("lambda_max"), format!("lambda_max must be positive, got {l}"));
            }
        }
        let grid_points = self.num("grid_points")?.unwrap_or(1000);
        if grid_points < 2 {
            return err(&self.origin("grid_points"), "grid_points must be at least 2");
        }
        let period = self.num("period")?.unwrap_or(TAU);
        if !(period > 0.0) {
            return err(&self.origin("period"), format!("period must be positive, got {period}"));
        }
        let harmonic = match self.list::<i64>("harmonic")? {
            None => None,
            Some(v) if v.len() == 2 && v[0] >= 0 && v[1].abs() <= v[0] => Some((v[0] as usize, v[1])),
            Some(_) => return err(&self.origin("harmonic"), "harmonic must be N,M with |M| ≤ N"),
        };
        let summation = match self.get("summation") {
            None => None,
            Some((s, o)) => Some(parse_summation(s).ok_or_else(|| ConfigError {
                origin: o.clone(),
                message: format!("summation must be abel:<N>, adaptive, truncate:<N> or cesaro:<N>, got {s:?}"),
            })?),
        };
        let quadrature = match self.get("quadrature") {
            None | Some(("auto", _)) => None,
            Some((q, o)) => Some(q.parse().or_else(|_| err(o, format!("quadrature must be auto or a node count, got {q:?}")))?),
        };
        let curvature = match self.get("curvature") {
            None => CurvatureSpec::Sphere,
            Some((c, o)) => {
                parse_curvature(c).ok_or_else(|| ConfigError { origin: o.clone(), message: format!("bad curvature {c:?}") })?
            }
        };
        let workers: Option<usize> = self.num("workers")?;
        if workers == Some(0) {
            return err(&self.origin("workers"), "workers must be at least 1");
        }
        let kernel_p = self.num("kernel_p")?.unwrap_or(6);
        let n = self.num("n")?.unwrap_or(1);
        if n == 0 {
            return err(&self.origin("n"), "n must be at least 1");
        }
        let cfg = RunConfig {
            command,
            geometry,
            tau,
            tau_cap,
            lambda_min: self.num("lambda_min")?,
            lambda_max,
            n_max: self.num("n_max")?,
            grid_points,
            x: self.list("x")?,
            direction: self.list("direction")?,
            k: self.list("k")?,
            harmonic,
            lambda: self.num("lambda")?,
            period,
            n,
            kernel_support: self.num("kernel_support")?.unwrap_or(3.0),
            kernel_p,
            calibration_lambda: self.num("calibration_lambda")?.unwrap_or(100.0),
            matrix: self.get("matrix").map(|(v, _)| PathBuf::from(v)),
            s0: self.num("s0")?,
            mus: self.list("mus")?,
            n_terms: self.num("n_terms")?.unwrap_or(2000),
            summation,
            quadrature,
            curvature,
            length: self.num("length")?.unwrap_or(TAU),
            steps: self.num("steps")?.unwrap_or(10_000),
            beam_k: self.num("beam_k")?.unwrap_or(10),
            workers,
            output: self.get("output").map(|(v, _)| PathBuf::from(v)),
            summary: self.get("summary").map(|(v, _)| PathBuf::from(v)),
        };
        cfg.check_required(self)?;
        Ok(cfg)
    }
}

fn parse_summation(s: &str) -> Option<SummationSpec> {
    if s == "adaptive" {
        return Some(SummationSpec::Adaptive);
    }
    let (kind, n) = s.split_once(':')?;
    let n: usize = n.parse().ok().filter(|&n| n > 0)?;
    match kind {
        "abel" if n > 1 => Some(SummationSpec::Abel(n)),
        "truncate" => Some(SummationSpec::Truncate(n)),
        "cesaro" => Some(SummationSpec::Cesaro(n)),
        _ => None,
    }
}

fn parse_curvature(s: &str) -> Option<CurvatureSpec> {
    if s == "sphere" {
        return Some(CurvatureSpec::Sphere);
    }
    if let Some(path) = s.strip_prefix("table:") {
        return Some(CurvatureSpec::Table(PathBuf::from(path)));
    }
    let (name, rest) = s.split_once('(')?;
    let args: Vec<f64> = rest.strip_suffix(')')?.split(',').map(|a| a.trim().parse().ok()).collect::<Option<_>>()?;
    match (name, args.as_slice()) {
        ("constant", [k]) => Some(CurvatureSpec::Constant(*k)),
        ("perturbed-sphere", [eps, mode]) if *mode >= 0.0 && mode.fract() == 0.0 => {
            Some(CurvatureSpec::PerturbedSphere { eps: *eps, mode: *mode as u32 })
        }
        ("cosine", [base, eps, freq]) => Some(CurvatureSpec::Cosine { base: *base, eps: *eps, freq: *freq }),
        _ => None,
    }
}

impl RunConfig {
    fn check_required(&self, raw: &RawConfig) -> Result<(), ConfigError> {
        let need = |key: &str, present: bool| -> Result<(), ConfigError> {
            if present {
                Ok(())
            } else {
                err(&raw.origin("command"), format!("command {} needs the key {key:?}", self.command))
            }
        };
        match self.command {
            Command::Classify => need("matrix", self.matrix.is_some()),
            Command::QFunc => {
                need("lambda_max", self.lambda_max.is_some())?;
                need("matrix, s0 or mus", self.matrix.is_some() || self.s0.is_some() || self.mus.is_some())
            }
            Command::WeylSum | Command::Smooth => {
                need("geometry", self.geometry.is_some())?;
                need("tau", self.tau.is_some())?;
                need("lambda_max", self.lambda_max.is_some())
            }
            Command::Husimi | Command::L2Norm => {
                need("geometry", self.geometry.is_some())?;
                need("tau", self.tau.is_some())?;
                match self.geometry {
                    Some(GeometryKind::Sphere) => need("harmonic", self.harmonic.is_some()),
                    _ => need("k", self.k.is_some()),
                }
            }
            Command::Extract => {
                need("geometry", self.geometry.is_some())?;
                need("tau", self.tau.is_some())?;
                need("lambda", self.lambda.is_some())
            }
            Command::Beam | Command::VerifyAll => Ok(()),
        }
    }
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    RawConfig::parse(text)?.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_weyl_sum() {
        let c = parse_config("command=weyl-sum\ngeometry=circle\ntau=0.5\nlambda_max=100").unwrap();
        assert_eq!(c.command, Command::WeylSum);
        assert_eq!(c.geometry, Some(GeometryKind::Circle));
        assert_eq!(c.grid_points, 1000);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let e = parse_config("command=weyl-sum\ngeometry=circle\n# comment\ntau=-1\nlambda_max=100").unwrap_err();
        assert_eq!(e.origin, Origin::Line(4));
        assert!(e.message.contains("tau_cap"), "{e}");
        let e = parse_config("command=weyl-sum\ngeometry=torus\ntau=0.5\nlambda_max=10").unwrap_err();
        assert_eq!(e.origin, Origin::Line(2));
        assert!(e.message.contains("\"m\""));
        let e = parse_config("command=beam\nbogus=1").unwrap_err();
        assert_eq!((e.origin, e.message.contains("unknown key")), (Origin::Line(2), true));
        assert!(parse_config("command=weyl-sum\ngeometry=klein\ntau=0.5\nlambda_max=1").is_err());
    }

    #[test]
    fn exponent_cap() {
        let e = parse_config("command=weyl-sum\ngeometry=circle\ntau=2\nlambda_max=200").unwrap_err();
        assert!(e.message.contains("700"));
    }

    #[test]
    fn curvature_and_summation() {
        let c = parse_config("command=beam\ncurvature=cosine(1.2, 0.1, 1)\nsummation=abel:1000").unwrap();
        assert_eq!(c.curvature, CurvatureSpec::Cosine { base: 1.2, eps: 0.1, freq: 1.0 });
        assert_eq!(c.summation, Some(SummationSpec::Abel(1000)));
        assert!(parse_config("command=beam\ncurvature=wobbly").is_err());
    }
}
