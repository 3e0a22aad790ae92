//! TOML run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::IoError;
use crate::boundary::{BoundaryFunction, Monomial};
use crate::domain::{make_domain, DomainParams, DomainSpec};
use crate::solver::SolveOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainParams,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub fibration: FibrationConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Seeds the random fibre round-trip probes in explicit mode.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub h: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { h: 0.05 }
    }
}

/// `φ(θ) = Σ cos_j cos jθ + sin_j sin jθ + Σ monomials(x, y)`, or samples
/// `theta,value` read from `file`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundaryConfig {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub monomials: Vec<Monomial>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    /// `0` requests the singular solution by continuation.
    pub a: f64,
    #[serde(flatten)]
    pub options: SolveOptions,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            a: 1.0,
            options: SolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub singularities: bool,
    pub bounds: bool,
    pub extrema_samples: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            singularities: true,
            bounds: true,
            extrema_samples: 1024,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FibrationMode {
    #[default]
    Family,
    Explicit,
}

/// Family mode solves `φ + bx + cy` for every `(a, b, c)` in the product of
/// the lists. Explicit mode samples the fibre over `(a, b + ic)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FibrationConfig {
    pub mode: FibrationMode,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    /// Write lifted meshes of family members.
    pub lift: bool,
    pub theta_count: usize,
    /// Nodes per member used for the moment-map comparison.
    pub sample_count: usize,
    /// Samples per parameter axis of each explicit fibre.
    pub fibre_n: usize,
    /// Random round-trip probes per explicit fibre.
    pub random_probes: usize,
}

impl Default for FibrationConfig {
    fn default() -> Self {
        FibrationConfig {
            mode: FibrationMode::Family,
            a: vec![],
            b: vec![0.0],
            c: vec![0.0],
            lift: false,
            theta_count: 16,
            sample_count: 200,
            fibre_n: 12,
            random_probes: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub theta_count: usize,
    /// Indices into `(Re z₁, Im z₁, Re z₂, Im z₂, Re z₃, Im z₃)` used as OBJ
    /// vertex coordinates.
    pub obj_projection: [usize; 3],
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            theta_count: 16,
            obj_projection: [0, 1, 4],
        }
    }
}

/// Command-line overrides applied on top of a loaded config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub h: Option<f64>,
    pub a: Option<f64>,
    pub a_floor: Option<f64>,
    pub theta_count: Option<usize>,
    pub mode: Option<FibrationMode>,
}

impl RunConfig {
    /// Parses `path`; a relative boundary `file` is resolved against the
    /// config's directory.
    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = fs::read_to_string(path).map_err(|e| IoError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = RunConfig::parse(&text)?;
        if let Some(file) = &cfg.boundary.file {
            if file.is_relative() {
                let base = path.parent().unwrap_or_else(|| Path::new("."));
                cfg.boundary.file = Some(base.join(file));
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        toml::from_str(text).map_err(|e| IoError::Config(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(d) = &o.out {
            self.output.dir = d.clone();
        }
        if let Some(h) = o.h {
            self.grid.h = h;
        }
        if let Some(a) = o.a {
            self.solve.a = a;
        }
        if let Some(f) = o.a_floor {
            self.solve.options.a_floor = f;
        }
        if let Some(t) = o.theta_count {
            self.output.theta_count = t;
            self.fibration.theta_count = t;
        }
        if let Some(m) = o.mode {
            self.fibration.mode = m;
        }
    }

    pub fn validate(&self) -> Result<(), IoError> {
        let bad = |m: String| Err(IoError::Config(m));
        if !(self.grid.h > 0.0 && self.grid.h.is_finite()) {
            return bad(format!("grid.h must be positive, got {}", self.grid.h));
        }
        if !self.solve.a.is_finite() {
            return bad("solve.a must be finite".into());
        }
        self.solve
            .options
            .validate()
            .map_err(|e| IoError::Config(e.to_string()))?;
        if let Some(f) = &self.boundary.file {
            if !f.is_file() {
                return bad(format!("boundary file {} does not exist", f.display()));
            }
        }
        if self.output.theta_count < 8 || self.fibration.theta_count < 8 {
            return bad("theta_count must be at least 8".into());
        }
        if self.output.obj_projection.iter().any(|&i| i > 5) {
            return bad("obj_projection indices must be in 0..6".into());
        }
        if self.analysis.extrema_samples < crate::analysis::MIN_EXTREMA_SAMPLES {
            return bad(format!(
                "analysis.extrema_samples must be at least {}",
                crate::analysis::MIN_EXTREMA_SAMPLES
            ));
        }
        Ok(())
    }

    pub fn domain_spec(&self) -> Result<DomainSpec, IoError> {
        make_domain(&self.domain).map_err(|e| IoError::Config(e.to_string()))
    }

    pub fn boundary_function(&self) -> Result<BoundaryFunction, IoError> {
        let b = &self.boundary;
        let base = match &b.file {
            Some(path) => {
                let (theta, values) = read_boundary_samples(path)?;
                BoundaryFunction::from_samples(theta, values).map_err(|e| IoError::Config(e.to_string()))?
            }
            None => BoundaryFunction::trig(b.cos.clone(), b.sin.clone()),
        };
        Ok(if b.monomials.is_empty() {
            base
        } else {
            base.with_monomials(&b.monomials)
        })
    }

    /// SHA-256 of the canonical JSON form of the effective configuration,
    /// ignoring the output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output.dir = PathBuf::new();
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Reads `theta,value` rows; a non-numeric first row is taken as a header.
fn read_boundary_samples(path: &Path) -> Result<(Vec<f64>, Vec<f64>), IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::Config(format!("{}: {e}", path.display())))?;
    let mut theta = Vec::new();
    let mut values = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match cols[..] {
            [t, v] => t.parse::<f64>().ok().zip(v.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some((t, v)) => {
                theta.push(t);
                values.push(v);
            }
            None if theta.is_empty() && n == 0 => continue,
            None => {
                return Err(IoError::Config(format!(
                    "{}: line {}: expected `theta,value`",
                    path.display(),
                    n + 1
                )))
            }
        }
    }
    Ok((theta, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[domain]
kind = "ellipse"
semi_axes = [1.0, 1.0]
"#;

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.grid.h, 0.05);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.solve.options, SolveOptions::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn missing_domain_is_a_config_error() {
        assert!(matches!(RunConfig::parse("[grid]\nh = 0.1\n"), Err(IoError::Config(_))));
        assert!(matches!(
            RunConfig::parse(&format!("{MINIMAL}\n[grid]\nspacing = 0.1\n")),
            Err(IoError::Config(_))
        ));
    }

    #[test]
    fn solve_options_flatten() {
        let cfg = RunConfig::parse(&format!("{MINIMAL}\n[solve]\na = 0.0\na_floor = 0.001\n")).unwrap();
        assert_eq!(cfg.solve.a, 0.0);
        assert_eq!(cfg.solve.options.a_floor, 1e-3);
    }

    #[test]
    fn overrides_and_hash() {
        let mut cfg = RunConfig::parse(MINIMAL).unwrap();
        let before = cfg.hash();
        assert_eq!(before, RunConfig::parse(MINIMAL).unwrap().hash());
        cfg.apply(&Overrides {
            h: Some(0.1),
            ..Default::default()
        });
        assert_eq!(cfg.grid.h, 0.1);
        assert_ne!(cfg.hash(), before);
        let h = cfg.hash();
        cfg.output.dir = PathBuf::from("elsewhere");
        assert_eq!(cfg.hash(), h);
        cfg.grid.h = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn boundary_samples_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut rows = String::from("theta,value\n");
        for k in 0..64 {
            let t = std::f64::consts::TAU * k as f64 / 64.0;
            rows.push_str(&format!("{t},{}\n", (2.0 * t).cos()));
        }
        fs::write(dir.path().join("phi.csv"), rows).unwrap();
        let cfg_path = dir.path().join("run.toml");
        fs::write(&cfg_path, format!("{MINIMAL}\n[boundary]\nfile = \"phi.csv\"\n")).unwrap();
        let cfg = RunConfig::load(&cfg_path).unwrap();
        cfg.validate().unwrap();
        let phi = cfg.boundary_function().unwrap();
        let d = cfg.domain_spec().unwrap();
        assert!((phi.eval(&d, 0.0) - 1.0).abs() < 1e-12);
    }
}
