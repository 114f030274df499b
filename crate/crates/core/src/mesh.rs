//! ASCII mesh format for swept sample sets, modelled on Wavefront OBJ with
//! `n`-coordinate vertices:
//!
//! ```text
//! # polargeo-mesh 1
//! # ambient_dim 4
//! # profile_grid 64p
//! g group_0
//! v x_1 x_2 x_3 x_4
//! vn n_1 n_2 n_3 n_4
//! l 1 2
//! g group_1
//! ...
//! ```
//!
//! Vertices are numbered from 1 across the whole file. Each `g` block holds
//! the profile swept by one group element, in profile order, followed by its
//! own elements: `l` segments for curve profiles and `f` triangles for
//! surface profiles. Patches are not stitched to each other. Singular
//! samples carry a zero normal.

use std::fmt::Write as _;

use thiserror::Error;

use crate::action::LinearAction;
use crate::chart::Grid;
use crate::linalg::{Frame, VecN};
use crate::polar::SectionSubspace;
use crate::synthesis::{SweptHypersurface, SweptSample};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct MeshParseError {
    pub line: usize,
    pub message: String,
}

fn perr(line: usize, message: impl Into<String>) -> MeshParseError {
    MeshParseError { line, message: message.into() }
}

/// One profile axis of the patch grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchAxis {
    pub count: usize,
    pub periodic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub ambient_dim: usize,
    pub patch_axes: Vec<PatchAxis>,
    pub vertices: Vec<VecN>,
    pub normals: Vec<VecN>,
    pub group_tags: Vec<usize>,
    pub profile_tags: Vec<usize>,
    /// Zero-based vertex indices.
    pub lines: Vec<[usize; 2]>,
    pub faces: Vec<[usize; 3]>,
}

fn patch_elements(axes: &[PatchAxis], offset: usize, lines: &mut Vec<[usize; 2]>, faces: &mut Vec<[usize; 3]>) {
    match axes {
        [a] => {
            let n = a.count;
            let segs = if a.periodic && n > 2 { n } else { n.saturating_sub(1) };
            for i in 0..segs {
                lines.push([offset + i, offset + (i + 1) % n]);
            }
        }
        [a, b] => {
            let cells = |ax: &PatchAxis| if ax.periodic && ax.count > 2 { ax.count } else { ax.count.saturating_sub(1) };
            let idx = |i: usize, j: usize| offset + (i % a.count) * b.count + (j % b.count);
            for i in 0..cells(a) {
                for j in 0..cells(b) {
                    faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                    faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
                }
            }
        }
        _ => {}
    }
}

impl Mesh {
    /// Mesh of a swept sample set. Patch elements are generated when the
    /// profile grid is known and has one or two axes.
    pub fn from_swept(m: &SweptHypersurface) -> Self {
        let patch_axes: Vec<PatchAxis> = m
            .profile_grid()
            .map(|g| g.axes().iter().zip(g.counts()).map(|(a, c)| PatchAxis { count: *c, periodic: a.periodic }).collect())
            .unwrap_or_default();
        let samples = m.samples();
        let mut mesh = Mesh {
            ambient_dim: m.action().ambient_dim(),
            patch_axes,
            vertices: samples.iter().map(|s| s.point.clone()).collect(),
            normals: samples.iter().map(|s| s.unit_normal.clone()).collect(),
            group_tags: samples.iter().map(|s| s.group_tag).collect(),
            profile_tags: samples.iter().map(|s| s.profile_tag).collect(),
            lines: Vec::new(),
            faces: Vec::new(),
        };
        mesh.rebuild_elements();
        mesh
    }

    fn patch_size(&self) -> usize {
        self.patch_axes.iter().map(|a| a.count).product()
    }

    fn rebuild_elements(&mut self) {
        self.lines.clear();
        self.faces.clear();
        let size = self.patch_size();
        if self.patch_axes.is_empty() || size == 0 || !self.vertices.len().is_multiple_of(size) {
            return;
        }
        for start in (0..self.vertices.len()).step_by(size) {
            patch_elements(&self.patch_axes, start, &mut self.lines, &mut self.faces);
        }
    }

    pub fn group_count(&self) -> usize {
        self.group_tags.iter().max().map_or(0, |g| g + 1)
    }

    pub fn write_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# polargeo-mesh {FORMAT_VERSION}");
        let _ = writeln!(out, "# ambient_dim {}", self.ambient_dim);
        let axes: Vec<String> =
            self.patch_axes.iter().map(|a| format!("{}{}", a.count, if a.periodic { "p" } else { "o" })).collect();
        let _ = writeln!(out, "# profile_grid {}", axes.join(" "));
        let mut li = 0;
        let mut fi = 0;
        let mut k = 0;
        while k < self.vertices.len() {
            let g = self.group_tags[k];
            let _ = writeln!(out, "g group_{g}");
            let end = (k..self.vertices.len()).find(|&i| self.group_tags[i] != g).unwrap_or(self.vertices.len());
            for i in k..end {
                write_row(&mut out, "v", &self.vertices[i]);
                write_row(&mut out, "vn", &self.normals[i]);
            }
            while li < self.lines.len() && self.lines[li][0] < end {
                let [a, b] = self.lines[li];
                let _ = writeln!(out, "l {} {}", a + 1, b + 1);
                li += 1;
            }
            while fi < self.faces.len() && self.faces[fi][0] < end {
                let [a, b, c] = self.faces[fi];
                let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
                fi += 1;
            }
            k = end;
        }
        out
    }

    /// Sample set carried by the mesh. Tangent spaces are the orthogonal
    /// complements of the stored normals; zero normals mark singular samples.
    pub fn to_swept(&self, action: LinearAction, section: SectionSubspace, resolution: f64) -> SweptHypersurface {
        let samples = self
            .vertices
            .iter()
            .zip(&self.normals)
            .enumerate()
            .map(|(i, (p, n))| {
                let tangent = if n.norm() > 0.5 {
                    Frame::from_orthonormal(vec![n.normalize()], self.ambient_dim).ok().map(|f| f.complement())
                } else {
                    None
                };
                SweptSample {
                    point: p.clone(),
                    tangent,
                    unit_normal: n.clone(),
                    group_tag: self.group_tags[i],
                    profile_tag: self.profile_tags[i],
                }
            })
            .collect();
        SweptHypersurface::from_samples(action, section, samples, resolution)
    }

    /// Patch grid as a parameter grid over unit axes, if one is recorded.
    pub fn patch_grid(&self) -> Option<Grid> {
        if self.patch_axes.is_empty() {
            return None;
        }
        let axes: Vec<crate::chart::ParamAxis> = self
            .patch_axes
            .iter()
            .map(|a| if a.periodic { crate::chart::ParamAxis::periodic(0.0, 1.0) } else { crate::chart::ParamAxis::new(0.0, 1.0) })
            .collect();
        let counts: Vec<usize> = self.patch_axes.iter().map(|a| a.count).collect();
        Grid::new(&axes, &counts).ok()
    }
}

fn write_row(out: &mut String, tag: &str, v: &VecN) {
    out.push_str(tag);
    for x in v.iter() {
        let _ = write!(out, " {x}");
    }
    out.push('\n');
}

fn parse_row(line: usize, rest: &[&str], dim: usize) -> Result<VecN, MeshParseError> {
    if rest.len() != dim {
        return Err(perr(line, format!("expected {dim} coordinates, found {}", rest.len())));
    }
    let vals = rest
        .iter()
        .map(|t| t.parse::<f64>().map_err(|_| perr(line, format!("bad number `{t}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    if vals.iter().any(|x| !x.is_finite()) {
        return Err(perr(line, "non-finite coordinate"));
    }
    Ok(VecN::from_vec(vals))
}

fn parse_indices<const N: usize>(line: usize, rest: &[&str], count: usize) -> Result<[usize; N], MeshParseError> {
    if rest.len() != N {
        return Err(perr(line, format!("expected {N} vertex indices, found {}", rest.len())));
    }
    let mut out = [0; N];
    for (o, t) in out.iter_mut().zip(rest) {
        let i: usize = t.parse().map_err(|_| perr(line, format!("bad index `{t}`")))?;
        if i == 0 || i > count {
            return Err(perr(line, format!("vertex index {i} out of range 1..={count}")));
        }
        *o = i - 1;
    }
    Ok(out)
}

/// Parses the format written by [`Mesh::write_string`]. Errors carry
/// 1-based line numbers.
pub fn parse_mesh(text: &str) -> Result<Mesh, MeshParseError> {
    let mut ambient_dim = None;
    let mut patch_axes = Vec::new();
    let mut vertices = Vec::new();
    let mut normals = Vec::new();
    let mut group_tags = Vec::new();
    let mut profile_tags = Vec::new();
    let mut lines = Vec::new();
    let mut faces = Vec::new();
    let mut group: Option<usize> = None;
    let mut in_group = 0;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let Some((&head, rest)) = toks.split_first() else { continue };
        match head {
            "#" => match rest.first().copied() {
                Some("ambient_dim") => {
                    let d = rest.get(1).and_then(|t| t.parse::<usize>().ok()).filter(|d| *d > 0);
                    ambient_dim = Some(d.ok_or_else(|| perr(line, "bad ambient_dim"))?);
                }
                Some("profile_grid") => {
                    patch_axes = rest[1..]
                        .iter()
                        .map(|t| {
                            let (num, kind) = t.split_at(t.len().saturating_sub(1));
                            let count = num.parse::<usize>().map_err(|_| perr(line, format!("bad grid axis `{t}`")))?;
                            match kind {
                                "p" => Ok(PatchAxis { count, periodic: true }),
                                "o" => Ok(PatchAxis { count, periodic: false }),
                                _ => Err(perr(line, format!("bad grid axis `{t}`"))),
                            }
                        })
                        .collect::<Result<_, _>>()?;
                }
                _ => {}
            },
            "g" => {
                let name = rest.first().ok_or_else(|| perr(line, "group without a name"))?;
                let tag = name
                    .strip_prefix("group_")
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| perr(line, format!("bad group name `{name}`")))?;
                group = Some(tag);
                in_group = 0;
            }
            "v" => {
                let dim = ambient_dim.ok_or_else(|| perr(line, "vertex before ambient_dim header"))?;
                let g = group.ok_or_else(|| perr(line, "vertex outside a group"))?;
                if normals.len() != vertices.len() {
                    return Err(perr(line, "vertex without a normal"));
                }
                vertices.push(parse_row(line, rest, dim)?);
                group_tags.push(g);
                profile_tags.push(in_group);
                in_group += 1;
            }
            "vn" => {
                let dim = ambient_dim.ok_or_else(|| perr(line, "normal before ambient_dim header"))?;
                if normals.len() + 1 != vertices.len() {
                    return Err(perr(line, "normal without a vertex"));
                }
                normals.push(parse_row(line, rest, dim)?);
            }
            "l" => lines.push(parse_indices::<2>(line, rest, vertices.len())?),
            "f" => faces.push(parse_indices::<3>(line, rest, vertices.len())?),
            other => return Err(perr(line, format!("unknown record `{other}`"))),
        }
    }
    let ambient_dim = ambient_dim.ok_or_else(|| perr(text.lines().count().max(1), "missing ambient_dim header"))?;
    if normals.len() != vertices.len() {
        return Err(perr(text.lines().count(), "last vertex has no normal"));
    }
    Ok(Mesh { ambient_dim, patch_axes, vertices, normals, group_tags, profile_tags, lines, faces })
}
