//! Run configuration: a TOML file, `--set key=value` overrides, then a typed
//! and validated `RunConfig`.
//!
//! ```toml
//! seed = 7
//!
//! [physics]
//! g = 1.0
//! depth = 1.0            # or "inf"
//! initial = { kind = "mode", k = 1, amplitude = 0.01 }
//!
//! [numerics]
//! n = 256
//! length = 6.283185307179586
//! dt = { cfl = 0.5 }     # or { fixed = 0.01 }
//! t_end = 10.0
//! cadence = 10
//! model = "nonlinear"    # or "linear"
//!
//! [diagnostics]
//! densities = true
//!
//! [weight]
//! kind = "rational"
//! eps = 0.5
//!
//! [kernel]
//! n = 200
//!
//! [output]
//! dir = "out"
//! ```

use crate::failure::Failure;
use holoww::kernel_analysis::{FourierParams, KernelMethod, KernelTableParams};
use holoww::morawetz_diagnostics::WeightKind;
use holoww::ww_solver::DtPolicy;
use holoww::Depth;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub physics: Option<Physics>,
    pub numerics: Option<Numerics>,
    #[serde(default)]
    pub diagnostics: Diagnostics,
    #[serde(default)]
    pub weight: WeightConfig,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    #[serde(default = "one")]
    pub g: f64,
    pub depth: DepthSpec,
    pub initial: Initial,
}

/// A positive number, or "inf" (a TOML `inf` float works too).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DepthSpec {
    Finite(f64),
    Named(String),
}

impl DepthSpec {
    pub fn to_depth(&self) -> Result<Depth, String> {
        match self {
            DepthSpec::Finite(h) if *h > 0.0 && h.is_finite() => Ok(Depth::Finite(*h)),
            DepthSpec::Finite(h) if *h == f64::INFINITY => Ok(Depth::Infinite),
            DepthSpec::Finite(h) => Err(format!("depth {h} must be positive")),
            DepthSpec::Named(s) if matches!(s.as_str(), "inf" | "infinite") => Ok(Depth::Infinite),
            DepthSpec::Named(s) => Err(format!("depth `{s}` is neither a number nor \"inf\"")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Initial {
    Rest,
    /// Right-moving linear eigenmode with k periods on the cell.
    Mode { k: i64, amplitude: f64 },
    /// η = a e^{−(x−c)²/(2w²)} cos(κ(x−c)), ψ = 0.
    Packet { amplitude: f64, center: f64, width: f64, carrier: f64 },
    /// CSV with columns `eta` and `psi`, one row per grid node.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Nonlinear,
    Linear,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    pub n: usize,
    pub length: f64,
    #[serde(default = "default_dt")]
    pub dt: DtPolicy,
    pub t_end: f64,
    #[serde(default = "one_usize")]
    pub cadence: usize,
    #[serde(default)]
    pub filter_order: Option<f64>,
    #[serde(default = "default_model")]
    pub model: Model,
    /// Tolerance of the Eulerian to holomorphic conversion.
    #[serde(default = "default_map_tol")]
    pub map_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    #[serde(default = "yes")]
    pub invariants: bool,
    #[serde(default)]
    pub densities: bool,
    #[serde(default)]
    pub virial: bool,
    #[serde(default)]
    pub linear_identities: bool,
    #[serde(default)]
    pub local_energy: bool,
    #[serde(default)]
    pub qm_check: bool,
    #[serde(default)]
    pub kernel_suite: bool,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self {
            invariants: true,
            densities: false,
            virial: false,
            linear_identities: false,
            local_energy: false,
            qm_check: false,
            kernel_suite: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightShape {
    Rational,
    Bump,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    #[serde(default = "default_shape")]
    pub kind: WeightShape,
    #[serde(default = "half")]
    pub eps: f64,
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default = "two")]
    pub width: f64,
    /// Defaults to the middle of the cell.
    #[serde(default)]
    pub center: Option<f64>,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self { kind: WeightShape::Rational, eps: 0.5, r: 1.0, width: 2.0, center: None, sigma: 0.49 }
    }
}

impl WeightConfig {
    pub fn kind(&self) -> WeightKind {
        match self.kind {
            WeightShape::Rational => WeightKind::Rational { eps: self.eps, r: self.r },
            WeightShape::Bump => WeightKind::Bump { width: self.width },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    #[serde(default = "default_delta_ax")]
    pub delta_ax: f64,
    #[serde(default = "ten")]
    pub x_max: f64,
    #[serde(default = "default_table_n")]
    pub n: usize,
    #[serde(default = "default_method")]
    pub method: KernelMethod,
    /// Depth of the scaled kernel K_h; 1 is the reference kernel.
    #[serde(default = "one")]
    pub h: f64,
    /// Sweep of the diagonal integral: [start, stop, count].
    #[serde(default)]
    pub x0_grid: Option<(f64, f64, usize)>,
    #[serde(default = "default_margin")]
    pub split_margin: f64,
    #[serde(default = "default_mass_extent")]
    pub mass_extent: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        let p = KernelTableParams::default();
        Self {
            delta_ax: p.delta_ax,
            x_max: p.x_max,
            n: p.n,
            method: p.method,
            h: 1.0,
            x0_grid: None,
            split_margin: 0.05,
            mass_extent: 12.0,
        }
    }
}

impl KernelConfig {
    /// Table parameters for the reference kernel, in units of h.
    pub fn table_params(&self) -> KernelTableParams {
        KernelTableParams {
            delta_ax: self.delta_ax / self.h,
            x_max: self.x_max / self.h,
            n: self.n,
            method: self.method,
            fourier: FourierParams::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_dir() }
    }
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn ten() -> f64 {
    10.0
}
fn half() -> f64 {
    0.5
}
fn yes() -> bool {
    true
}
fn one_usize() -> usize {
    1
}
fn default_dt() -> DtPolicy {
    DtPolicy::Cfl(0.5)
}
fn default_model() -> Model {
    Model::Nonlinear
}
fn default_map_tol() -> f64 {
    1e-14
}
fn default_shape() -> WeightShape {
    WeightShape::Rational
}
fn default_sigma() -> f64 {
    0.49
}
fn default_delta_ax() -> f64 {
    KernelTableParams::default().delta_ax
}
fn default_table_n() -> usize {
    KernelTableParams::default().n
}
fn default_method() -> KernelMethod {
    KernelTableParams::default().method
}
fn default_margin() -> f64 {
    0.05
}
fn default_mass_extent() -> f64 {
    12.0
}
fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Parses the right-hand side of `--set key=value` as a TOML value, falling
/// back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), Failure> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Failure::Config(format!("--set `{assignment}`: expected key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(Failure::Config(format!("--set `{assignment}`: empty key segment")));
    }
    let mut cur = table;
    for (i, seg) in path[..path.len() - 1].iter().enumerate() {
        let entry = cur.entry(seg.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Failure::Config(format!("--set `{assignment}`: `{}` is not a table", path[..=i].join("."))))?;
    }
    cur.insert(path[path.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

/// Reads, overrides and deserializes; schema errors carry the field path.
pub fn load(path: Option<&Path>, overrides: &[String], seed: Option<u64>) -> Result<RunConfig, Failure> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            text.parse::<toml::Table>().map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    if let Some(s) = seed {
        table.insert("seed".into(), toml::Value::Integer(s as i64));
    }
    let cfg: RunConfig = serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
        let p = e.path().to_string();
        Failure::Config(if p == "." { e.into_inner().to_string() } else { format!("{p}: {}", e.into_inner()) })
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn check(ok: bool, field: &str, msg: impl std::fmt::Display) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Config(format!("{field}: {msg}")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Failure> {
        if let Some(p) = &self.physics {
            check(p.g > 0.0 && p.g.is_finite(), "physics.g", "must be positive")?;
            p.depth.to_depth().map_err(|m| Failure::Config(format!("physics.depth: {m}")))?;
            match &p.initial {
                Initial::Mode { amplitude, .. } => check(amplitude.is_finite(), "physics.initial.amplitude", "must be finite")?,
                Initial::Packet { amplitude, width, .. } => {
                    check(amplitude.is_finite(), "physics.initial.amplitude", "must be finite")?;
                    check(*width > 0.0, "physics.initial.width", "must be positive")?;
                }
                _ => {}
            }
        }
        if let Some(n) = &self.numerics {
            check(n.n >= 8 && n.n % 2 == 0, "numerics.n", format!("{} must be even and at least 8", n.n))?;
            check(n.length > 0.0 && n.length.is_finite(), "numerics.length", "must be positive")?;
            check(n.t_end > 0.0 && n.t_end.is_finite(), "numerics.t_end", "must be positive")?;
            check(n.cadence >= 1, "numerics.cadence", "must be at least 1")?;
            let dt_ok = match n.dt {
                DtPolicy::Fixed(v) | DtPolicy::Cfl(v) => v > 0.0 && v.is_finite(),
            };
            check(dt_ok, "numerics.dt", "must be positive")?;
            if let Some(Physics { initial: Initial::Mode { k, .. }, .. }) = &self.physics {
                check(*k != 0 && (k.unsigned_abs() as usize) < n.n / 2, "physics.initial.k", format!("{k} is not a resolved nonzero mode"))?;
            }
        }
        let w = &self.weight;
        check(w.r > 0.5, "weight.r", "must exceed 1/2")?;
        check(w.eps > 0.0, "weight.eps", "must be positive")?;
        check(w.width > 0.0, "weight.width", "must be positive")?;
        check((0.0..=1.0).contains(&w.sigma), "weight.sigma", "must lie in [0, 1]")?;
        let k = &self.kernel;
        check(k.h > 0.0 && k.h.is_finite(), "kernel.h", "must be positive")?;
        check(k.delta_ax > 0.0 && k.x_max > k.delta_ax, "kernel.x_max", "must exceed kernel.delta_ax > 0")?;
        check(k.n >= 2, "kernel.n", "must be at least 2")?;
        check((0.0..1.0).contains(&k.split_margin), "kernel.split_margin", "must lie in [0, 1)")?;
        if let Some((a, b, c)) = k.x0_grid {
            check(a > 0.0 && b >= a && c >= 1, "kernel.x0_grid", "expects [start > 0, stop >= start, count >= 1]")?;
        }
        Ok(())
    }

    pub fn physics(&self) -> Result<&Physics, Failure> {
        self.physics.as_ref().ok_or_else(|| Failure::Config("physics: missing section".into()))
    }

    pub fn numerics(&self) -> Result<&Numerics, Failure> {
        self.numerics.as_ref().ok_or_else(|| Failure::Config("numerics: missing section".into()))
    }

    /// SHA-256 of the resolved configuration as JSON.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(s: &str) -> toml::Table {
        s.parse().unwrap()
    }

    #[test]
    fn overrides_create_nested_keys() {
        let mut t = table("[numerics]\nn = 64\n");
        apply_override(&mut t, "numerics.n=128").unwrap();
        apply_override(&mut t, "physics.depth=inf").unwrap();
        apply_override(&mut t, "numerics.dt={ fixed = 0.01 }").unwrap();
        assert_eq!(t["numerics"]["n"].as_integer(), Some(128));
        assert_eq!(t["physics"]["depth"].as_float(), Some(f64::INFINITY));
        apply_override(&mut t, "physics.initial={ kind = \"rest\" }").unwrap();
        t["numerics"].as_table_mut().unwrap().remove("dt");
        apply_override(&mut t, "numerics.length=1.0").unwrap();
        apply_override(&mut t, "numerics.t_end=1.0").unwrap();
        let cfg: RunConfig = serde_path_to_error::deserialize(toml::Value::Table(t.clone())).unwrap();
        assert_eq!(cfg.physics().unwrap().depth.to_depth(), Ok(Depth::Infinite));
        apply_override(&mut t, "numerics.dt={ fixed = 0.01 }").unwrap();
        assert_eq!(t["numerics"]["dt"]["fixed"].as_float(), Some(0.01));
        assert!(apply_override(&mut t, "numerics.n.x=1").is_err());
        assert!(apply_override(&mut t, "nokey").is_err());
    }

    #[test]
    fn missing_field_reports_its_path() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "[numerics]\nlength = 1.0\nt_end = 1.0\n").unwrap();
        match load(Some(&p), &[], None) {
            Err(Failure::Config(m)) => assert!(m.starts_with("numerics") && m.contains("`n`"), "{m}"),
            other => panic!("{other:?}"),
        }
        std::fs::write(&p, "[physics]\ndepth = -1\ninitial = { kind = \"rest\" }\n").unwrap();
        assert!(matches!(load(Some(&p), &[], None), Err(Failure::Config(m)) if m.starts_with("physics.depth")));
        std::fs::write(&p, "[weight]\nbogus = 1\n").unwrap();
        assert!(matches!(load(Some(&p), &[], None), Err(Failure::Config(m)) if m.starts_with("weight")));
    }

    #[test]
    fn hash_tracks_content() {
        let a = load(None, &["seed=1".into()], None).unwrap();
        let b = load(None, &[], Some(1)).unwrap();
        let c = load(None, &[], Some(2)).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.kernel.n, 200);
    }
}
