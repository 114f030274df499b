//! Action description files, profile files and their config forms.
//!
//! Action file:
//! ```text
//! # comment
//! label torus
//! ambient_dim 4
//! generator
//! 0 -1 0 0
//! 1  0 0 0
//! 0  0 0 0
//! 0  0 0 0
//! ```
//! Each `generator` line is followed by `ambient_dim` rows.
//!
//! Profile file: `closed true|false`, then one `p c_1 … c_r` line per point
//! in section coordinates, interpolated by a Catmull-Rom curve.

use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use polargeo::chart::{circle_chart, CatmullRomCurve, FnChart, ParamAxis, SharedChart};
use polargeo::{LinearAction, SkewMat, VecN};

use crate::config::{ActionSpec, ProfileSpec, RunConfig};
use crate::exit::{CliError, Code};

fn parse_err(source: &str, line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::new(Code::Parse, format!("{source}:{line}: {msg}"))
}

fn numbers(source: &str, line: usize, toks: &[&str]) -> Result<Vec<f64>, CliError> {
    toks.iter()
        .map(|t| match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(parse_err(source, line, format!("bad number `{t}`"))),
        })
        .collect()
}

pub fn parse_action(text: &str, source: &str) -> Result<LinearAction, CliError> {
    let mut label = String::from("action");
    let mut dim: Option<usize> = None;
    let mut gens: Vec<(usize, Vec<Vec<f64>>)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "label" => label = toks[1..].join(" "),
            "ambient_dim" => {
                let d = toks.get(1).and_then(|t| t.parse::<usize>().ok()).filter(|d| *d > 0);
                dim = Some(d.ok_or_else(|| parse_err(source, line, "ambient_dim needs a positive integer"))?);
            }
            "generator" => {
                if dim.is_none() {
                    return Err(parse_err(source, line, "generator before ambient_dim"));
                }
                if let Some((start, rows)) = gens.last() {
                    if rows.len() != dim.unwrap_or(0) {
                        return Err(parse_err(source, *start, format!("generator has {} rows", rows.len())));
                    }
                }
                gens.push((line, Vec::new()));
            }
            _ => {
                let d = dim.ok_or_else(|| parse_err(source, line, "matrix row before ambient_dim"))?;
                let (_, rows) = gens.last_mut().ok_or_else(|| parse_err(source, line, "matrix row outside a generator"))?;
                if rows.len() == d {
                    return Err(parse_err(source, line, format!("generator already has {d} rows")));
                }
                let row = numbers(source, line, &toks)?;
                if row.len() != d {
                    return Err(parse_err(source, line, format!("expected {d} entries, found {}", row.len())));
                }
                rows.push(row);
            }
        }
    }
    let d = dim.ok_or_else(|| parse_err(source, text.lines().count().max(1), "missing ambient_dim"))?;
    if gens.is_empty() {
        return Err(parse_err(source, text.lines().count().max(1), "no generators"));
    }
    let mut skews = Vec::new();
    for (start, rows) in gens {
        if rows.len() != d {
            return Err(parse_err(source, start, format!("generator has {} rows, expected {d}", rows.len())));
        }
        let m = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        skews.push(SkewMat::new(m).map_err(|e| parse_err(source, start, e))?);
    }
    LinearAction::new(label, skews).map_err(|e| parse_err(source, 1, e))
}

pub fn load_action(cfg: &RunConfig, spec: &ActionSpec) -> Result<LinearAction, CliError> {
    let set = [spec.file.is_some(), spec.blocks.is_some(), spec.weights.is_some()].iter().filter(|b| **b).count();
    if set != 1 {
        return Err(CliError::new(Code::Usage, "[action] needs exactly one of `file`, `blocks`, `weights`"));
    }
    if let Some(f) = &spec.file {
        let path = cfg.resolve(f);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::new(Code::Usage, format!("cannot read action file {}: {e}", path.display())))?;
        return parse_action(&text, &f.display().to_string());
    }
    if let Some(b) = &spec.blocks {
        return Ok(LinearAction::block_rotations(b)?);
    }
    Ok(LinearAction::circle_with_weights(spec.weights.as_deref().unwrap_or_default())?)
}

pub fn parse_profile_points(text: &str, source: &str) -> Result<CatmullRomCurve, CliError> {
    let mut closed = None;
    let mut points: Vec<VecN> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "closed" => {
                closed = Some(match toks.get(1).copied() {
                    Some("true") => true,
                    Some("false") => false,
                    _ => return Err(parse_err(source, line, "closed needs true or false")),
                })
            }
            "p" => {
                let v = numbers(source, line, &toks[1..])?;
                if let Some(first) = points.first() {
                    if first.len() != v.len() {
                        return Err(parse_err(source, line, format!("expected {} coordinates", first.len())));
                    }
                }
                points.push(VecN::from_vec(v));
            }
            other => return Err(parse_err(source, line, format!("unknown record `{other}`"))),
        }
    }
    let closed = closed.ok_or_else(|| parse_err(source, 1, "missing `closed` line"))?;
    CatmullRomCurve::new(points, closed).map_err(|e| parse_err(source, text.lines().count().max(1), e))
}

pub fn profile_chart(cfg: &RunConfig, spec: &ProfileSpec) -> Result<SharedChart, CliError> {
    let need = |what: &str| CliError::new(Code::Usage, format!("{} profile needs `{what}`", spec.kind));
    match spec.kind.as_str() {
        "circle" => {
            let c = spec.center.as_ref().ok_or_else(|| need("center"))?;
            let r = spec.radius.ok_or_else(|| need("radius"))?;
            if c.len() != 2 || r.is_nan() || r <= 0.0 {
                return Err(CliError::new(Code::Usage, "circle profile needs a 2D center and positive radius"));
            }
            let [a, b] = spec.arc.unwrap_or([0.0, std::f64::consts::TAU]);
            Ok(Arc::new(circle_chart([c[0], c[1]], r, a, b)))
        }
        "points" => {
            let f = spec.file.as_ref().ok_or_else(|| need("file"))?;
            let path = cfg.resolve(f);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::new(Code::Usage, format!("cannot read profile {}: {e}", path.display())))?;
            Ok(Arc::new(parse_profile_points(&text, &f.display().to_string())?))
        }
        "polynomial" => {
            let coeffs = spec.coeffs.clone().ok_or_else(|| need("coeffs"))?;
            let [lo, hi] = spec.range.ok_or_else(|| need("range"))?;
            if hi.is_nan() || lo.is_nan() || hi <= lo {
                return Err(CliError::new(Code::Usage, "polynomial range must be increasing"));
            }
            Ok(Arc::new(FnChart::new(vec![ParamAxis::new(lo, hi)], 2, move |u| {
                let d = u[0];
                let x = coeffs.iter().rev().fold(0.0, |acc, c| acc * d + c);
                VecN::from_vec(vec![x, d])
            })))
        }
        other => Err(CliError::new(Code::Usage, format!("unknown profile kind `{other}`"))),
    }
}

pub fn read_to_string(path: &Path, what: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::new(Code::Usage, format!("cannot read {what} {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TORUS: &str = "label torus\nambient_dim 4\ngenerator\n0 -1 0 0\n1 0 0 0\n0 0 0 0\n0 0 0 0\n\
                         generator # second block\n0 0 0 0\n0 0 0 0\n0 0 0 -1\n0 0 1 0\n";

    #[test]
    fn parses_torus_action() {
        let a = parse_action(TORUS, "t").unwrap();
        assert_eq!(a.ambient_dim(), 4);
        assert_eq!(a.label(), "torus");
        assert_eq!(a.cohomogeneity(), 2);
    }

    #[test]
    fn action_errors_have_line_numbers() {
        let e = parse_action("ambient_dim 2\ngenerator\n0 1\n1 0\n", "f").unwrap_err();
        assert_eq!(e.code, Code::Parse);
        assert!(e.message.starts_with("f:2:"), "{}", e.message);
        let e = parse_action("ambient_dim 2\ngenerator\n0 -1\n1 x\n", "f").unwrap_err();
        assert!(e.message.starts_with("f:4:"), "{}", e.message);
        let e = parse_action("generator\n", "f").unwrap_err();
        assert!(e.message.starts_with("f:1:"));
        let e = parse_action("ambient_dim 2\ngenerator\n0 -1\n", "f").unwrap_err();
        assert!(e.message.starts_with("f:2:"), "{}", e.message);
    }

    #[test]
    fn parses_profile_points() {
        let c = parse_profile_points("closed true\np 1 0\np 0 1\np -1 0\np 0 -1\n", "p").unwrap();
        use polargeo::chart::Chart;
        assert_eq!(c.ambient_dim(), 2);
        let e = parse_profile_points("closed true\np 1 0\np 0\n", "p").unwrap_err();
        assert!(e.message.starts_with("p:3:"));
    }
}
