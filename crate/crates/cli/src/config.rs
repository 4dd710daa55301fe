//! Run configuration: TOML schema, shipped presets and validation.

use evans_core::engine::{ContourKind, EvansOptions, WindingOptions};
use evans_core::fkpp::FkppParams;
use evans_core::ks::{ExclusionZone, KsParams};
use evans_core::spectrum::Window;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Fkpp,
    Ks,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Fkpp => "fkpp",
            ModelKind::Ks => "ks",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FkppSection {
    pub delta: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KsSection {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub delta: f64,
    /// Truncation `L`; the default makes the far-field corrections `1e-14`.
    pub truncation: Option<f64>,
    /// Skip evaluation inside the absolute-spectrum zone.
    #[serde(default = "yes")]
    pub exclusion: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub tail: f64,
    pub hyperbolicity: f64,
    pub theta_max: f64,
    pub branch_tol: f64,
    pub closure_tol: f64,
    pub max_depth: usize,
    pub initial_samples: usize,
    pub at_branch_ok: bool,
    /// `|E|` at or below this counts as a root for point evaluations.
    pub root_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let w = WindingOptions::default();
        let e = EvansOptions::default();
        Tolerances {
            rel_tol: e.rel_tol,
            abs_tol: e.abs_tol,
            tail: 1e-10,
            hyperbolicity: evans_core::spectrum::HYPERBOLICITY_TOL,
            theta_max: w.theta_max,
            branch_tol: w.branch_tol,
            closure_tol: w.closure_tol,
            max_depth: w.max_depth,
            initial_samples: w.initial_samples,
            at_branch_ok: false,
            root_threshold: 1e-4,
        }
    }
}

impl Tolerances {
    pub fn evans(&self) -> EvansOptions {
        EvansOptions { rel_tol: self.rel_tol, abs_tol: self.abs_tol, at_branch_ok: self.at_branch_ok, ..Default::default() }
    }

    pub fn winding(&self) -> WindingOptions {
        WindingOptions {
            theta_max: self.theta_max,
            max_depth: self.max_depth,
            initial_samples: self.initial_samples,
            branch_tol: self.branch_tol,
            closure_tol: self.closure_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveSection {
    /// Half width `L` of the output grid; defaults to the model's natural span.
    pub half_width: Option<f64>,
    pub points: usize,
}

impl Default for WaveSection {
    fn default() -> Self {
        WaveSection { half_width: None, points: 801 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub k_min: f64,
    pub k_max: f64,
    pub k_samples: usize,
    /// `[re_min, re_max, im_min, im_max]`.
    pub window: [f64; 4],
    /// `[n_re, n_im]`.
    pub grid: [usize; 2],
    pub nu_min: f64,
    pub nu_max: f64,
    pub nu_step: f64,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        SpectrumSection {
            k_min: -10.0,
            k_max: 10.0,
            k_samples: 401,
            window: [-4.0, 2.0, -5.0, 5.0],
            grid: [61, 101],
            nu_min: -3.0,
            nu_max: 1.0,
            nu_step: 0.05,
        }
    }
}

impl SpectrumSection {
    pub fn window(&self) -> Window {
        let [a, b, c, d] = self.window;
        Window::new(a, b, c, d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct EvansSection {
    /// Explicit evaluation points `[re, im]`; when empty `evans eval` samples the contour.
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct CrossingsSection {
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    pub fkpp: Option<FkppSection>,
    pub ks: Option<KsSection>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub contour: Option<ContourKind>,
    #[serde(default)]
    pub wave: WaveSection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub evans: EvansSection,
    #[serde(default)]
    pub crossings: CrossingsSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<evans_core::Error> for ConfigError {
    fn from(e: evans_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError(format!("cannot parse config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.model {
            ModelKind::Fkpp => {
                self.fkpp_params()?;
            }
            ModelKind::Ks => {
                self.ks_params()?;
                if let Some(l) = self.ks.as_ref().and_then(|k| k.truncation) {
                    if !(l > 0.0 && l.is_finite()) {
                        return Err(ConfigError(format!("ks.truncation must be positive, got {l}")));
                    }
                }
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("rel_tol", t.rel_tol),
            ("abs_tol", t.abs_tol),
            ("tail", t.tail),
            ("hyperbolicity", t.hyperbolicity),
            ("theta_max", t.theta_max),
            ("branch_tol", t.branch_tol),
            ("closure_tol", t.closure_tol),
            ("root_threshold", t.root_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError(format!("tolerances.{name} must be positive, got {v}")));
            }
        }
        if t.theta_max >= std::f64::consts::PI {
            return Err(ConfigError("tolerances.theta_max must be below pi".into()));
        }
        if self.wave.points < 2 {
            return Err(ConfigError("wave.points must be at least 2".into()));
        }
        let s = &self.spectrum;
        if s.k_min.partial_cmp(&s.k_max) != Some(std::cmp::Ordering::Less) || s.k_samples < 2 {
            return Err(ConfigError("spectrum needs k_min < k_max and k_samples >= 2".into()));
        }
        if !(s.window[0] < s.window[1] && s.window[2] < s.window[3]) {
            return Err(ConfigError("spectrum.window must be [re_min, re_max, im_min, im_max] with min < max".into()));
        }
        if !(s.nu_min <= s.nu_max && s.nu_step > 0.0) {
            return Err(ConfigError("spectrum needs nu_min <= nu_max and nu_step > 0".into()));
        }
        Ok(())
    }

    pub fn fkpp_params(&self) -> Result<FkppParams, ConfigError> {
        let s = self.fkpp.as_ref().ok_or_else(|| ConfigError("model fkpp needs an [fkpp] section".into()))?;
        Ok(FkppParams::new(s.delta, s.c)?)
    }

    pub fn ks_params(&self) -> Result<KsParams, ConfigError> {
        let s = self.ks.as_ref().ok_or_else(|| ConfigError("model ks needs a [ks] section".into()))?;
        KsParams::new(s.alpha, s.beta, s.c, s.delta).map_err(|e| ConfigError(format!("{e} (require 0 < delta < beta)")))
    }

    pub fn exclusion(&self) -> Option<ExclusionZone> {
        self.ks.as_ref().filter(|k| k.exclusion).map(|_| ExclusionZone::default())
    }

    /// SHA-256 of the canonical JSON form, ignoring output routing.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = OutputSection::default();
        let bytes = serde_json::to_vec(&canonical).expect("config serialises");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn parameter_summary(&self) -> String {
        match self.model {
            ModelKind::Fkpp => {
                let s = self.fkpp.as_ref().expect("validated");
                format!("delta={} c={}", s.delta, s.c)
            }
            ModelKind::Ks => {
                let s = self.ks.as_ref().expect("validated");
                format!("alpha={} beta={} c={} delta={}", s.alpha, s.beta, s.c, s.delta)
            }
        }
    }

    pub fn tolerance_summary(&self) -> String {
        let t = &self.tolerances;
        format!(
            "rel_tol={:e} abs_tol={:e} tail={:e} hyperbolicity={:e} theta_max={} branch_tol={:e} closure_tol={} at_branch_ok={}",
            t.rel_tol, t.abs_tol, t.tail, t.hyperbolicity, t.theta_max, t.branch_tol, t.closure_tol, t.at_branch_ok
        )
    }
}

/// Shipped presets for the standard computations.
pub const PRESETS: &[(&str, &str)] = &[
    (
        "fkpp-wave",
        r#"
model = "fkpp"
[fkpp]
delta = 1.0
c = 3.0
[wave]
half_width = 30.0
"#,
    ),
    (
        "fkpp-essential",
        r#"
model = "fkpp"
[fkpp]
delta = 1.0
c = 2.0412414523193148
[spectrum]
k_min = -6.0
k_max = 6.0
window = [-6.0, 2.0, -6.0, 6.0]
"#,
    ),
    (
        "fkpp-weighted",
        r#"
model = "fkpp"
[fkpp]
delta = 1.0
c = 2.4
[spectrum]
k_min = -20.0
k_max = 20.0
k_samples = 801
nu_min = -3.0
nu_max = 1.0
nu_step = 0.05
"#,
    ),
    (
        "fkpp-evans",
        r#"
model = "fkpp"
[fkpp]
delta = 1.0
c = 2.4
[contour]
kind = "right_half_disc"
radius = 1e6
indent = 0.5
"#,
    ),
    (
        "fkpp-branch",
        r#"
model = "fkpp"
[fkpp]
delta = 1.0
c = 2.4
[tolerances]
at_branch_ok = true
[evans]
points = [[-0.44, 0.0]]
"#,
    ),
    (
        "fkpp-branch-inside",
        r#"
model = "fkpp"
[fkpp]
delta = 1.0
c = 1.8
[tolerances]
at_branch_ok = true
[evans]
points = [[0.15, 0.0], [0.17, 0.0], [0.19, 0.0], [0.21, 0.0], [0.23, 0.0]]
"#,
    ),
    (
        "fkpp-crossings",
        r#"
model = "fkpp"
[fkpp]
delta = 1.0
c = 3.0
[crossings]
lambdas = [0.0, 0.5, 1.0, 5.0, 25.0]
"#,
    ),
    (
        "ks-wave",
        r#"
model = "ks"
[ks]
alpha = 1.0
beta = 2.0
c = 2.0
delta = 1.0
"#,
    ),
    (
        "ks-continuous",
        r#"
model = "ks"
[ks]
alpha = 1.0
beta = 2.0
c = 2.0
delta = 1.0
[spectrum]
k_min = -10.0
k_max = 10.0
k_samples = 801
window = [-3.0, 1.0, -6.0, 6.0]
grid = [81, 121]
"#,
    ),
    (
        "ks-absolute",
        r#"
model = "ks"
[ks]
alpha = 1.0
beta = 2.0
c = 2.0
delta = 1.0
[spectrum]
window = [-0.1, 0.5, -5.0, 5.0]
grid = [61, 201]
"#,
    ),
    (
        "ks-weighted",
        r#"
model = "ks"
[ks]
alpha = 1.0
beta = 2.0
c = 2.0
delta = 1.0
[spectrum]
k_min = -40.0
k_max = 40.0
k_samples = 1601
nu_min = -10.0
nu_max = 10.0
nu_step = 0.05
"#,
    ),
    (
        "ks-evans-annulus",
        r#"
model = "ks"
[ks]
alpha = 1.0
beta = 2.0
c = 2.0
delta = 1.0
[contour]
kind = "right_half_annulus"
r_in = 4.0
r_out = 1e7
"#,
    ),
    (
        "ks-evans-shifted",
        r#"
model = "ks"
[ks]
alpha = 1.0
beta = 2.0
c = 2.0
delta = 1.0
[contour]
kind = "shifted_half_disc"
radius = 4.0
shift = 0.3
"#,
    ),
    (
        "ks-evans-origin",
        r#"
model = "ks"
[ks]
alpha = 1.0
beta = 2.0
c = 2.0
delta = 1.0
[contour]
kind = "circle"
center = [0.0, 0.0]
radius = 0.01
"#,
    ),
];

pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
    let text = PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
        ConfigError(format!("unknown preset `{name}`; available: {}", names.join(", ")))
    })?;
    RunConfig::from_toml(text)
}
