//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::aniso::StepControl;
use crate::error::{config, Error, Result};
use crate::fields::SpectralGrid;
use crate::hydro::HydroOptions;
use crate::model::{bump, default_kernel, PhysicalParams, SourceKind, SourceSpec};

/// Environment variable naming the root directory for run outputs.
pub const OUTPUT_ENV: &str = "HYDROLIMIT_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Aniso,
    Hydro,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Aniso => "aniso",
            SolverKind::Hydro => "hydro",
        }
    }
}

/// Source description as it appears in a config file. The kernel of the
/// convolved and custom kinds is the default bump with the given radius and
/// peak amplitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    pub kind: SourceKind,
    pub center: [f64; 3],
    pub radius: f64,
    pub amplitude: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            kind: SourceKind::ConvolvedDelta,
            center: [0.5, 0.5, -0.5],
            radius: 0.25,
            amplitude: 1.0,
        }
    }
}

impl SourceConfig {
    /// Source spec for a run with mollifier width `eps`.
    pub fn spec(&self, grid: &SpectralGrid, eps: f64) -> SourceSpec {
        let kernel = match self.kind {
            SourceKind::ConvolvedDelta => Some(default_kernel(grid, self.radius, self.amplitude)),
            SourceKind::CustomSmooth => Some(bump(grid, self.center, self.radius, self.amplitude)),
            _ => None,
        };
        SourceSpec {
            kind: self.kind,
            eps,
            center: self.center,
            kernel,
        }
    }
}

/// Everything needed to reproduce a run, sweep or check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment_id: String,
    pub solver: SolverKind,
    pub n: [usize; 3],
    pub params: PhysicalParams,
    pub mu: f64,
    pub source: SourceConfig,
    pub step: StepControl,
    pub seed: u64,
    pub amplitude: f64,
    pub bandlimit: usize,
    pub eps_list: Vec<f64>,
    pub mu_list: Vec<f64>,
    /// Empty means `$HYDROLIMIT_OUT/<experiment_id>` (or `hydrolimit-out/...`).
    pub output_dir: PathBuf,
    /// Steps between field snapshots; 0 disables them.
    pub snapshot_every: usize,
    /// Steps between monitor samples.
    pub sample_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment_id: "default".into(),
            solver: SolverKind::Aniso,
            n: [32, 32, 32],
            params: PhysicalParams::default(),
            mu: 0.0,
            source: SourceConfig::default(),
            step: StepControl {
                dt: 0.00625,
                ..StepControl::default()
            },
            seed: 1,
            amplitude: 1.0,
            bandlimit: 4,
            eps_list: vec![0.2, 0.1, 0.05, 0.025],
            mu_list: vec![0.1, 0.05, 0.025],
            output_dir: PathBuf::new(),
            snapshot_every: 0,
            sample_every: 1,
        }
    }
}

/// Documented config keys.
pub const CONFIG_KEYS: &[(&str, &str)] = &[
    ("experiment_id", "name used in output paths and CSV rows"),
    ("solver", "aniso | hydro"),
    ("n", "cubic grid size; sets n1, n2 and n3"),
    ("n1", "grid points along x1"),
    ("n2", "grid points along x2"),
    ("n3", "grid points along x3"),
    ("a", "half-height of the box"),
    ("eps", "aspect ratio of a single run"),
    ("nu1", "viscosity along x1"),
    ("nu2", "viscosity along x2"),
    ("nu3", "viscosity along x3"),
    ("k1", "downwind diffusivity (multiplied by eps)"),
    ("k2", "crosswind diffusivity"),
    ("k3", "vertical diffusivity"),
    ("f", "Earth rotation modulus"),
    ("theta", "downwind angle from east, radians"),
    ("phi", "latitude, radians"),
    ("mu", "downwind regularization of the hydrostatic run"),
    ("dt", "time step"),
    ("t_end", "final time"),
    ("cfl_safety", "largest admissible Courant number"),
    ("eps_dt_coupling", "true | false; enforce dt <= 0.5 eps / (2 f)"),
    ("seed", "initial-data seed"),
    ("amplitude", "rms of the initial u_h and c"),
    ("bandlimit", "largest initial mode number per axis"),
    ("source", "zero | mollified-delta | convolved-delta | custom-smooth"),
    ("source_center", "x1,x2,x3 of the source"),
    ("source_radius", "radius of the source kernel bump"),
    ("source_amplitude", "peak value of the source kernel bump"),
    ("eps_list", "comma-separated eps values of a sweep, descending"),
    ("mu_list", "comma-separated mu values of a regularization sweep"),
    ("output_dir", "output directory"),
    ("snapshot_every", "steps between field snapshots, 0 for none"),
    ("sample_every", "steps between monitor samples"),
];

fn parse_f64(key: &str, v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>()
        .map_err(|_| format!("{key}: expected a number, got '{v}'"))
}

fn parse_usize(key: &str, v: &str) -> std::result::Result<usize, String> {
    v.parse::<usize>()
        .map_err(|_| format!("{key}: expected a nonnegative integer, got '{v}'"))
}

fn parse_list(key: &str, v: &str) -> std::result::Result<Vec<f64>, String> {
    v.split(',').map(|x| parse_f64(key, x.trim())).collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn kind_name(k: SourceKind) -> &'static str {
    match k {
        SourceKind::MollifiedDelta => "mollified-delta",
        SourceKind::ConvolvedDelta => "convolved-delta",
        SourceKind::Zero => "zero",
        SourceKind::CustomSmooth => "custom-smooth",
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(prev) = seen.insert(key.to_string(), i + 1) {
                return Err(err(format!("duplicate key '{key}' (first on line {prev})")));
            }
            cfg.set(key, value).map_err(err)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        let p = &mut self.params;
        match key {
            "experiment_id" => {
                if v.is_empty() || v.contains(['/', '\\', ',']) {
                    return Err(format!(
                        "experiment_id '{v}' must be non-empty without '/', '\\' or ','"
                    ));
                }
                self.experiment_id = v.to_string();
            }
            "solver" => {
                self.solver = match v {
                    "aniso" => SolverKind::Aniso,
                    "hydro" => SolverKind::Hydro,
                    _ => return Err(format!("solver must be aniso or hydro, got '{v}'")),
                }
            }
            "n" => self.n = [parse_usize(key, v)?; 3],
            "n1" => self.n[0] = parse_usize(key, v)?,
            "n2" => self.n[1] = parse_usize(key, v)?,
            "n3" => self.n[2] = parse_usize(key, v)?,
            "a" => p.a = parse_f64(key, v)?,
            "eps" => p.eps = parse_f64(key, v)?,
            "nu1" => p.nu1 = parse_f64(key, v)?,
            "nu2" => p.nu2 = parse_f64(key, v)?,
            "nu3" => p.nu3 = parse_f64(key, v)?,
            "k1" => p.k1 = parse_f64(key, v)?,
            "k2" => p.k2 = parse_f64(key, v)?,
            "k3" => p.k3 = parse_f64(key, v)?,
            "f" => p.f = parse_f64(key, v)?,
            "theta" => p.theta = parse_f64(key, v)?,
            "phi" => p.phi = parse_f64(key, v)?,
            "mu" => self.mu = parse_f64(key, v)?,
            "dt" => self.step.dt = parse_f64(key, v)?,
            "t_end" => self.step.t_end = parse_f64(key, v)?,
            "cfl_safety" => self.step.cfl_safety = parse_f64(key, v)?,
            "eps_dt_coupling" => {
                self.step.eps_dt_coupling = v
                    .parse()
                    .map_err(|_| format!("{key}: expected true or false, got '{v}'"))?
            }
            "seed" => {
                self.seed = v
                    .parse()
                    .map_err(|_| format!("{key}: expected an unsigned integer, got '{v}'"))?
            }
            "amplitude" => self.amplitude = parse_f64(key, v)?,
            "bandlimit" => self.bandlimit = parse_usize(key, v)?,
            "source" => {
                self.source.kind = match v {
                    "zero" => SourceKind::Zero,
                    "mollified-delta" => SourceKind::MollifiedDelta,
                    "convolved-delta" => SourceKind::ConvolvedDelta,
                    "custom-smooth" => SourceKind::CustomSmooth,
                    _ => return Err(format!("unknown source kind '{v}'")),
                }
            }
            "source_center" => {
                let c = parse_list(key, v)?;
                self.source.center = c
                    .try_into()
                    .map_err(|_| format!("{key}: expected three comma-separated numbers"))?;
            }
            "source_radius" => self.source.radius = parse_f64(key, v)?,
            "source_amplitude" => self.source.amplitude = parse_f64(key, v)?,
            "eps_list" => self.eps_list = parse_list(key, v)?,
            "mu_list" => self.mu_list = parse_list(key, v)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            "snapshot_every" => self.snapshot_every = parse_usize(key, v)?,
            "sample_every" => self.sample_every = parse_usize(key, v)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// Every key except `output_dir` with its canonical text value.
    pub fn canonical(&self) -> BTreeMap<&'static str, String> {
        let p = &self.params;
        let mut m = BTreeMap::new();
        m.insert("experiment_id", self.experiment_id.clone());
        m.insert("solver", self.solver.as_str().to_string());
        m.insert("n1", self.n[0].to_string());
        m.insert("n2", self.n[1].to_string());
        m.insert("n3", self.n[2].to_string());
        for (k, v) in [
            ("a", p.a),
            ("eps", p.eps),
            ("nu1", p.nu1),
            ("nu2", p.nu2),
            ("nu3", p.nu3),
            ("k1", p.k1),
            ("k2", p.k2),
            ("k3", p.k3),
            ("f", p.f),
            ("theta", p.theta),
            ("phi", p.phi),
            ("mu", self.mu),
            ("dt", self.step.dt),
            ("t_end", self.step.t_end),
            ("cfl_safety", self.step.cfl_safety),
            ("amplitude", self.amplitude),
            ("source_radius", self.source.radius),
            ("source_amplitude", self.source.amplitude),
        ] {
            m.insert(k, v.to_string());
        }
        m.insert("eps_dt_coupling", self.step.eps_dt_coupling.to_string());
        m.insert("seed", self.seed.to_string());
        m.insert("bandlimit", self.bandlimit.to_string());
        m.insert("source", kind_name(self.source.kind).to_string());
        m.insert("source_center", join(&self.source.center));
        m.insert("eps_list", join(&self.eps_list));
        m.insert("mu_list", join(&self.mu_list));
        m.insert("snapshot_every", self.snapshot_every.to_string());
        m.insert("sample_every", self.sample_every.to_string());
        m
    }

    /// Config file text: the canonical keys in sorted order, then
    /// `output_dir` when set.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.canonical() {
            let _ = writeln!(s, "{k} = {v}");
        }
        if !self.output_dir.as_os_str().is_empty() {
            let _ = writeln!(s, "output_dir = {}", self.output_dir.display());
        }
        s
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.canonical() {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    pub fn grid(&self) -> Result<SpectralGrid> {
        SpectralGrid::new(self.n[0], self.n[1], self.n[2], self.params.a)
    }

    /// Checks everything a single run needs, including the step cap.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        self.params.validate()?;
        HydroOptions { mu: self.mu }.validate()?;
        if self.solver == SolverKind::Aniso {
            self.step.validate(&self.params)?;
        } else {
            StepControl {
                eps_dt_coupling: false,
                ..self.step
            }
            .validate(&self.params)?;
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return config(format!("amplitude must be nonnegative, got {}", self.amplitude));
        }
        let nmin = grid.n1.min(grid.n2).min(grid.n3);
        if self.bandlimit == 0 || 3 * self.bandlimit >= nmin {
            return config(format!(
                "bandlimit must lie in 1..{}, got {}",
                nmin.div_ceil(3),
                self.bandlimit
            ));
        }
        if self.sample_every == 0 {
            return config("sample_every must be at least 1");
        }
        if self.source.kind != SourceKind::Zero && !(self.source.radius > 0.0 && self.source.amplitude.is_finite()) {
            return config("source radius must be positive and amplitude finite");
        }
        Ok(())
    }

    /// Output directory of this config.
    pub fn output_path(&self) -> PathBuf {
        if !self.output_dir.as_os_str().is_empty() {
            return self.output_dir.clone();
        }
        let root = std::env::var_os(OUTPUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("hydrolimit-out"));
        root.join(&self.experiment_id)
    }
}
