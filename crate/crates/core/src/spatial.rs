//! Nearest-neighbour queries over point sets of arbitrary dimension.

use crate::linalg::VecN;

#[derive(Debug, Clone)]
struct Node {
    point: usize,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
}

/// Static k-d tree over a borrowed point list.
#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<VecN>,
    nodes: Vec<Node>,
    root: Option<usize>,
}

impl KdTree {
    pub fn new(points: Vec<VecN>) -> Self {
        let dim = points.first().map_or(0, |p| p.len());
        let mut idx: Vec<usize> = (0..points.len()).collect();
        let mut tree = Self { points, nodes: Vec::new(), root: None };
        tree.root = tree.build(&mut idx, 0, dim);
        tree
    }

    fn build(&mut self, idx: &mut [usize], depth: usize, dim: usize) -> Option<usize> {
        if idx.is_empty() {
            return None;
        }
        let axis = if dim == 0 { 0 } else { depth % dim };
        idx.sort_by(|&a, &b| self.points[a][axis].total_cmp(&self.points[b][axis]));
        let mid = idx.len() / 2;
        let point = idx[mid];
        let (lo, rest) = idx.split_at_mut(mid);
        let hi = &mut rest[1..];
        let left = self.build(lo, depth + 1, dim);
        let right = self.build(hi, depth + 1, dim);
        self.nodes.push(Node { point, axis, left, right });
        Some(self.nodes.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[VecN] {
        &self.points
    }

    /// Index of and distance to the closest stored point.
    pub fn nearest(&self, q: &VecN) -> Option<(usize, f64)> {
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(self.root, q, &mut best);
        (best.0 != usize::MAX).then(|| (best.0, best.1.sqrt()))
    }

    fn search(&self, node: Option<usize>, q: &VecN, best: &mut (usize, f64)) {
        let Some(n) = node else { return };
        let node = &self.nodes[n];
        let p = &self.points[node.point];
        let d2: f64 = p.iter().zip(q.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
        if d2 < best.1 {
            *best = (node.point, d2);
        }
        let diff = q[node.axis] - p[node.axis];
        let (near, far) = if diff < 0.0 { (node.left, node.right) } else { (node.right, node.left) };
        self.search(near, q, best);
        if diff * diff < best.1 {
            self.search(far, q, best);
        }
    }
}
