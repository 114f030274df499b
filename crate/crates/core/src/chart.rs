//! Parametrized maps `U ⊂ R^m -> R^N` and the rectangular grids sampling them.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::linalg::VecN;

/// One parameter interval; periodic axes identify `lo` with `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamAxis {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl ParamAxis {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi, periodic: false }
    }

    pub fn periodic(lo: f64, hi: f64) -> Self {
        Self { lo, hi, periodic: true }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

pub trait Chart: Send + Sync {
    fn domain(&self) -> &[ParamAxis];
    fn ambient_dim(&self) -> usize;
    fn eval(&self, u: &[f64]) -> VecN;

    fn param_dim(&self) -> usize {
        self.domain().len()
    }
}

pub type SharedChart = Arc<dyn Chart>;

type ChartFn = dyn Fn(&[f64]) -> VecN + Send + Sync;

/// Chart given by a closure.
#[derive(Clone)]
pub struct FnChart {
    domain: Vec<ParamAxis>,
    ambient_dim: usize,
    f: Arc<ChartFn>,
}

impl FnChart {
    pub fn new(
        domain: Vec<ParamAxis>,
        ambient_dim: usize,
        f: impl Fn(&[f64]) -> VecN + Send + Sync + 'static,
    ) -> Self {
        Self { domain, ambient_dim, f: Arc::new(f) }
    }
}

impl fmt::Debug for FnChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnChart")
            .field("domain", &self.domain)
            .field("ambient_dim", &self.ambient_dim)
            .finish_non_exhaustive()
    }
}

impl Chart for FnChart {
    fn domain(&self) -> &[ParamAxis] {
        &self.domain
    }

    fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    fn eval(&self, u: &[f64]) -> VecN {
        (self.f)(u)
    }
}

/// Point of the unit sphere `S^m ⊂ R^{m+1}` in hyperspherical coordinates:
/// `u[0..m-1]` are polar angles in `[0, π]`, `u[m-1]` is the azimuth.
pub fn hyperspherical(u: &[f64]) -> VecN {
    let m = u.len();
    let mut out = VecN::zeros(m + 1);
    let mut sin_prod = 1.0;
    for (i, angle) in u.iter().enumerate() {
        out[i] = sin_prod * angle.cos();
        sin_prod *= angle.sin();
    }
    out[m] = sin_prod;
    out
}

/// Domain of [`hyperspherical`] shrunk by `margin` away from the coordinate poles.
pub fn hyperspherical_domain(m: usize, margin: f64) -> Vec<ParamAxis> {
    let mut d: Vec<ParamAxis> = (0..m.saturating_sub(1))
        .map(|_| ParamAxis::new(margin, std::f64::consts::PI - margin))
        .collect();
    if m > 0 {
        d.push(ParamAxis::periodic(0.0, std::f64::consts::TAU));
    }
    d
}

/// Round sphere `S^m(r)` centred at `center`.
pub fn sphere_chart(center: VecN, radius: f64, margin: f64) -> FnChart {
    let m = center.len() - 1;
    FnChart::new(hyperspherical_domain(m, margin), m + 1, move |u| &center + hyperspherical(u) * radius)
}

/// Circular arc `center + r (cos s, sin s)` in the plane, `s ∈ [start, end]`.
/// A full turn is treated as a closed, periodic curve.
pub fn circle_chart(center: [f64; 2], radius: f64, start: f64, end: f64) -> FnChart {
    let full = ((end - start).abs() - std::f64::consts::TAU).abs() < 1e-12;
    let axis = if full { ParamAxis::periodic(start, end) } else { ParamAxis::new(start, end) };
    FnChart::new(vec![axis], 2, move |u| {
        VecN::from_vec(vec![center[0] + radius * u[0].cos(), center[1] + radius * u[0].sin()])
    })
}

/// Uniform Catmull-Rom interpolant through sample points, parametrized by
/// `[0, n]` (closed) or `[0, n-1]` (open). Open curves extend linearly.
#[derive(Debug, Clone)]
pub struct CatmullRomCurve {
    points: Vec<VecN>,
    closed: bool,
    domain: [ParamAxis; 1],
}

impl CatmullRomCurve {
    pub fn new(points: Vec<VecN>, closed: bool) -> Result<Self> {
        if points.len() < if closed { 3 } else { 2 } {
            return Err(GeomError::InvalidInput("curve needs more sample points".into()));
        }
        let dim = points[0].len();
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(GeomError::DimensionMismatch { expected: dim, found: p.len() });
        }
        let n = points.len() as f64;
        let domain = if closed { [ParamAxis::periodic(0.0, n)] } else { [ParamAxis::new(0.0, n - 1.0)] };
        Ok(Self { points, closed, domain })
    }

    fn point(&self, i: i64) -> VecN {
        let n = self.points.len() as i64;
        if self.closed {
            return self.points[i.rem_euclid(n) as usize].clone();
        }
        if i < 0 {
            // reflect to continue with matching slope
            return &self.points[0] * 2.0 - &self.points[1];
        }
        if i >= n {
            return &self.points[n as usize - 1] * 2.0 - &self.points[n as usize - 2];
        }
        self.points[i as usize].clone()
    }
}

impl Chart for CatmullRomCurve {
    fn domain(&self) -> &[ParamAxis] {
        &self.domain
    }

    fn ambient_dim(&self) -> usize {
        self.points[0].len()
    }

    fn eval(&self, u: &[f64]) -> VecN {
        let s = u[0];
        let mut seg = s.floor() as i64;
        if !self.closed {
            seg = seg.clamp(0, self.points.len() as i64 - 2);
        }
        let t = s - seg as f64;
        let p0 = self.point(seg - 1);
        let p1 = self.point(seg);
        let p2 = self.point(seg + 1);
        let p3 = self.point(seg + 2);
        let t2 = t * t;
        let t3 = t2 * t;
        (&p1 * 2.0 + (&p2 - &p0) * t + (&p0 * 2.0 - &p1 * 5.0 + &p2 * 4.0 - &p3) * t2
            + (-&p0 + &p1 * 3.0 - &p2 * 3.0 + &p3) * t3)
            * 0.5
    }
}

/// Rectangular grid of nodes over a chart domain. Axis 0 varies slowest.
/// Periodic axes get `count` nodes without repeating the endpoint; others
/// include both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<ParamAxis>,
    counts: Vec<usize>,
}

impl Grid {
    pub fn new(axes: &[ParamAxis], counts: &[usize]) -> Result<Self> {
        if axes.len() != counts.len() {
            return Err(GeomError::DimensionMismatch { expected: axes.len(), found: counts.len() });
        }
        for (a, c) in axes.iter().zip(counts) {
            if *c < if a.periodic { 1 } else { 2 } {
                return Err(GeomError::InvalidInput("grid needs at least two nodes per open axis".into()));
            }
        }
        Ok(Self { axes: axes.to_vec(), counts: counts.to_vec() })
    }

    pub fn uniform(axes: &[ParamAxis], count: usize) -> Result<Self> {
        Self::new(axes, &vec![count; axes.len()])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[ParamAxis] {
        &self.axes
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step(&self, axis: usize) -> f64 {
        let a = &self.axes[axis];
        let c = self.counts[axis];
        if a.periodic {
            a.len() / c as f64
        } else {
            a.len() / (c - 1) as f64
        }
    }

    pub fn multi_index(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            out[a] = index % self.counts[a];
            index /= self.counts[a];
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.counts).fold(0, |acc, (i, c)| acc * c + i)
    }

    pub fn params(&self, index: usize) -> Vec<f64> {
        self.multi_index(index)
            .iter()
            .enumerate()
            .map(|(a, i)| self.axes[a].lo + *i as f64 * self.step(a))
            .collect()
    }

    /// Neighbour one step along `axis` (`+1`/`-1`), wrapping on periodic axes.
    pub fn neighbor(&self, index: usize, axis: usize, forward: bool) -> Option<usize> {
        let mut m = self.multi_index(index);
        let c = self.counts[axis];
        if forward {
            if m[axis] + 1 < c {
                m[axis] += 1;
            } else if self.axes[axis].periodic && c > 1 {
                m[axis] = 0;
            } else {
                return None;
            }
        } else if m[axis] > 0 {
            m[axis] -= 1;
        } else if self.axes[axis].periodic && c > 1 {
            m[axis] = c - 1;
        } else {
            return None;
        }
        Some(self.flat_index(&m))
    }

    /// True when a central stencil of half-width `h` stays inside every open axis.
    pub fn is_interior(&self, params: &[f64], h: f64) -> bool {
        self.axes
            .iter()
            .zip(params)
            .all(|(a, u)| a.periodic || (*u - h >= a.lo - 1e-12 && *u + h <= a.hi + 1e-12))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperspherical_is_unit() {
        let p = hyperspherical(&[0.3, 1.1, 2.5]);
        assert_eq!(p.len(), 4);
        assert!((p.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_indexing() {
        let g = Grid::new(&[ParamAxis::new(0.0, 1.0), ParamAxis::periodic(0.0, 4.0)], &[3, 4]).unwrap();
        assert_eq!(g.len(), 12);
        assert_eq!(g.params(5), vec![0.5, 1.0]);
        assert_eq!(g.neighbor(7, 1, true), Some(4));
        assert_eq!(g.neighbor(8, 0, true), None);
        assert_eq!(g.flat_index(&g.multi_index(10)), 10);
    }

    #[test]
    fn catmull_rom_interpolates_nodes() {
        let pts: Vec<VecN> = (0..6)
            .map(|i| {
                let s = i as f64;
                VecN::from_vec(vec![s.cos(), s.sin()])
            })
            .collect();
        let c = CatmullRomCurve::new(pts.clone(), true).unwrap();
        for (i, p) in pts.iter().enumerate() {
            assert!((c.eval(&[i as f64]) - p).norm() < 1e-14);
        }
        assert!((c.eval(&[6.0]) - &pts[0]).norm() < 1e-14);
    }

    #[test]
    fn full_circle_is_periodic() {
        let c = circle_chart([0.0, 3.0], 1.0, 0.0, std::f64::consts::TAU);
        assert!(c.domain()[0].periodic);
        let arc = circle_chart([0.0, 0.0], 1.0, 0.0, std::f64::consts::PI);
        assert!(!arc.domain()[0].periodic);
    }
}
