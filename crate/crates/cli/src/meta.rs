use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use polargeo::linalg::Frame;
use polargeo::{LinearAction, SectionSubspace, SkewMat, VecN};
use serde::{Deserialize, Serialize};

use crate::config::SynthSpec;
use crate::exit::{CliError, Code};

pub const META_VERSION: u32 = 1;

/// Sidecar of a mesh: everything needed to rebuild the action, the section
/// and, for block modes, the hypersurface chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshMeta {
    pub format: u32,
    pub mode: String,
    pub seed: u64,
    pub profile_nodes: usize,
    pub group_count: usize,
    /// Covering bound of the sample set.
    pub resolution: f64,
    pub compact: bool,
    pub block_dims: Option<Vec<usize>>,
    pub radii: Option<Vec<f64>>,
    /// Contents of a `points` profile file.
    pub profile_text: Option<String>,
    pub action: MetaAction,
    pub section: MetaSection,
    pub synth: SynthSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaAction {
    pub label: String,
    pub ambient_dim: usize,
    pub generators: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaSection {
    pub basis: Vec<Vec<f64>>,
    pub basepoint: Vec<f64>,
}

impl MetaAction {
    pub fn from_action(a: &LinearAction) -> Self {
        let generators = a
            .generators()
            .iter()
            .map(|g| g.matrix().row_iter().map(|r| r.iter().copied().collect()).collect())
            .collect();
        Self { label: a.label().to_string(), ambient_dim: a.ambient_dim(), generators }
    }

    pub fn to_action(&self) -> Result<LinearAction, CliError> {
        let n = self.ambient_dim;
        let mut gens = Vec::new();
        for (i, rows) in self.generators.iter().enumerate() {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(CliError::new(Code::Parse, format!("metadata generator {i} is not {n}x{n}")));
            }
            let m = DMatrix::from_fn(n, n, |r, c| rows[r][c]);
            gens.push(SkewMat::new(m).map_err(|e| CliError::new(Code::Parse, format!("metadata generator {i}: {e}")))?);
        }
        LinearAction::new(self.label.clone(), gens).map_err(|e| CliError::new(Code::Parse, format!("metadata action: {e}")))
    }
}

impl MetaSection {
    pub fn from_section(s: &SectionSubspace) -> Self {
        Self {
            basis: s.frame().basis().iter().map(|b| b.iter().copied().collect()).collect(),
            basepoint: s.basepoint().iter().copied().collect(),
        }
    }

    pub fn to_section(&self, action: &LinearAction) -> Result<SectionSubspace, CliError> {
        let n = action.ambient_dim();
        let basis: Vec<VecN> = self.basis.iter().map(|b| VecN::from_column_slice(b)).collect();
        let bad = |e: polargeo::GeomError| CliError::new(Code::Parse, format!("metadata section: {e}"));
        let frame = Frame::from_orthonormal(basis, n).map_err(bad)?;
        SectionSubspace::for_action(action, frame, VecN::from_column_slice(&self.basepoint)).map_err(bad)
    }
}

/// `dir/mesh.obj` → `dir/mesh.meta.toml`.
pub fn meta_path(mesh: &Path) -> PathBuf {
    mesh.with_extension("meta.toml")
}

pub fn load_meta(mesh: &Path) -> Result<MeshMeta, CliError> {
    let path = meta_path(mesh);
    let text = std::fs::read_to_string(&path)
        .map_err(|_| CliError::new(Code::Usage, format!("missing metadata {}", path.display())))?;
    let meta: MeshMeta =
        toml::from_str(&text).map_err(|e| CliError::new(Code::Parse, format!("metadata {}: {e}", path.display())))?;
    if meta.format != META_VERSION {
        return Err(CliError::new(Code::Parse, format!("unsupported metadata format {}", meta.format)));
    }
    Ok(meta)
}
