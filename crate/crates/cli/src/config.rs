use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::exit::{CliError, Code};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub fd_step: Option<f64>,
    /// `[profile nodes, group elements]`.
    pub resolution: Option<[usize; 2]>,
    pub out: Option<PathBuf>,
    pub action: Option<ActionSpec>,
    pub orbit: Option<OrbitSpec>,
    pub synth: Option<SynthSpec>,
    pub verify: Option<VerifySpec>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize, PartialEq, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    /// Action description file.
    pub file: Option<PathBuf>,
    /// `I_{n_0} ⊕ SO(n_1) ⊕ …`.
    pub blocks: Option<Vec<usize>>,
    /// Circle acting on `C^m` with these weights.
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSpec {
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    /// `circle`, `points` or `polynomial`.
    pub kind: String,
    pub center: Option<Vec<f64>>,
    pub radius: Option<f64>,
    /// Arc parameter range; a full turn when absent.
    pub arc: Option<[f64; 2]>,
    pub file: Option<PathBuf>,
    /// Axis coordinate as a polynomial in the axis distance.
    pub coeffs: Option<Vec<f64>>,
    pub range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize, PartialEq, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    /// `sweep`, `rotation`, `multirot` or `warped`.
    pub mode: String,
    pub profile: ProfileSpec,
    pub n: Option<usize>,
    pub blocks: Option<Vec<usize>>,
    pub radii: Option<Vec<f64>>,
    /// Basepoint of the section for sweep mode.
    pub section_point: Option<Vec<f64>>,
    pub evenness_tol: Option<f64>,
    pub fiber_dim: Option<usize>,
    pub rho_scale: Option<f64>,
    pub fiber_radius: Option<f64>,
    pub metric_tol: Option<f64>,
    pub equivariance_trials: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    pub mesh: Option<PathBuf>,
    pub equivariance_trials: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(Code::Usage, format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::new(Code::Parse, format!("config {}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Resolves a path from the config relative to the config's directory.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn tol(&self) -> Result<f64, CliError> {
        positive("tol", self.tol)
    }

    pub fn fd_step(&self) -> Result<f64, CliError> {
        positive("fd_step", self.fd_step)
    }

    pub fn resolution(&self) -> Result<[usize; 2], CliError> {
        let r = self
            .resolution
            .ok_or_else(|| CliError::new(Code::Usage, "missing `resolution` (config key or --resolution PxG)"))?;
        if r[0] < 2 || r[1] < 1 {
            return Err(CliError::new(Code::Usage, "resolution needs at least 2 profile nodes and 1 group element"));
        }
        Ok(r)
    }

    pub fn out_dir(&self) -> Result<PathBuf, CliError> {
        self.out
            .clone()
            .ok_or_else(|| CliError::new(Code::Usage, "missing output directory (--out, `out` or POLARGEO_OUT)"))
    }
}

pub fn positive(name: &str, v: Option<f64>) -> Result<f64, CliError> {
    match v {
        Some(x) if x.is_finite() && x > 0.0 => Ok(x),
        Some(x) => Err(CliError::new(Code::Usage, format!("`{name}` must be positive, got {x}"))),
        None => Err(CliError::new(Code::Usage, format!("missing `{name}`: tolerances have no defaults"))),
    }
}

/// `64x32` → `[64, 32]`.
pub fn parse_resolution(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected PxG, got `{s}`"))?;
    let p = a.trim().parse().map_err(|_| format!("bad profile node count `{a}`"))?;
    let g = b.trim().parse().map_err(|_| format!("bad group element count `{b}`"))?;
    Ok([p, g])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg: RunConfig = toml::from_str(
            r#"
            seed = 3
            tol = 1e-8
            resolution = [64, 64]
            [action]
            blocks = [1, 3]
            [synth]
            mode = "rotation"
            n = 3
            profile = { kind = "circle", center = [0.0, 3.0], radius = 1.0 }
            "#,
        )
        .unwrap();
        assert_eq!(cfg.resolution, Some([64, 64]));
        assert_eq!(cfg.synth.as_ref().unwrap().profile.radius, Some(1.0));
        assert!(cfg.fd_step().is_err());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_tolerances() {
        assert!(toml::from_str::<RunConfig>("tolerance = 1.0").is_err());
        assert_eq!(positive("tol", Some(-1.0)).unwrap_err().code, Code::Usage);
        assert_eq!(parse_resolution("64x32"), Ok([64, 32]));
        assert!(parse_resolution("64").is_err());
    }
}
