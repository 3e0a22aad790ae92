//! Uniform Cartesian grids over a domain with cut-cell boundary arms.
//!
//! Node `(i, j)` sits at `(i·h, j·h)`, so the x-axis is always a grid row and
//! `y ↦ -y` maps nodes to nodes. Where a grid line leaves the domain between
//! an interior node and its neighbour, a boundary hit records the fractional
//! arm length `s ∈ (0, 1]`.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::domain::{polar_angle, DomainSpec};

/// Minimum number of interior nodes for a usable grid.
pub const MIN_INTERIOR_NODES: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid too coarse: {nodes} interior nodes (need {MIN_INTERIOR_NODES}), h = {h}")]
    ResolutionTooCoarse { h: f64, nodes: usize },
    #[error("grid spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Dir {
    East,
    West,
    North,
    South,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::East, Dir::West, Dir::North, Dir::South];

    pub fn offset(self) -> (i32, i32) {
        match self {
            Dir::East => (1, 0),
            Dir::West => (-1, 0),
            Dir::North => (0, 1),
            Dir::South => (0, -1),
        }
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::East => Dir::West,
            Dir::West => Dir::East,
            Dir::North => Dir::South,
            Dir::South => Dir::North,
        }
    }

    pub fn mirrored(self) -> Dir {
        match self {
            Dir::North => Dir::South,
            Dir::South => Dir::North,
            d => d,
        }
    }

    fn slot(self) -> usize {
        match self {
            Dir::East => 0,
            Dir::West => 1,
            Dir::North => 2,
            Dir::South => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Node {
    pub i: i32,
    pub j: i32,
    pub x: f64,
    pub y: f64,
}

/// Where a grid line from an interior node meets `∂S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryHit {
    pub node: usize,
    pub dir: Dir,
    /// Arm length as a fraction of `h`, in `(0, 1]`.
    pub frac: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

/// One arm of a five-point stencil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Arm {
    Node(usize),
    /// Index into the boundary hit list, with the arm length (not fraction).
    Boundary { hit: usize, len: f64 },
}

impl Arm {
    pub fn len(&self, h: f64) -> f64 {
        match self {
            Arm::Node(_) => h,
            Arm::Boundary { len, .. } => *len,
        }
    }

    /// Position of the arm's end in a field's value vector.
    pub fn slot(&self, n_nodes: usize) -> usize {
        match self {
            Arm::Node(k) => *k,
            Arm::Boundary { hit, .. } => n_nodes + hit,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Grid {
    h: f64,
    #[serde(skip)]
    domain: DomainSpec,
    nodes: Vec<Node>,
    hits: Vec<BoundaryHit>,
    arms: Vec<[Arm; 4]>,
    axis_nodes: Vec<usize>,
    reflect_node: Vec<usize>,
    reflect_hit: Vec<usize>,
    i_range: (i32, i32),
    j_range: (i32, i32),
    #[serde(skip)]
    lookup: Vec<Option<usize>>,
    bandwidth: usize,
}

/// Builds the grid of spacing `h` over `domain`.
pub fn build_grid(domain: &DomainSpec, h: f64) -> Result<Arc<Grid>, GridError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(GridError::InvalidSpacing(h));
    }
    let diam = domain.diameter();
    if h >= diam / 8.0 {
        // too few nodes to be useful; count them for the error message
        let count = count_nodes(domain, h);
        return Err(GridError::ResolutionTooCoarse { h, nodes: count });
    }
    let tol = 1e-12 * diam;
    let reach = (diam / h).ceil() as i32 + 1;

    // Nodes in row-major order, rows from bottom to top; rows j and -j are
    // filled from one shared scan so the node set is mirror-exact.
    let mut rows: Vec<(i32, Vec<i32>)> = Vec::new();
    for j in 0..=reach {
        let y = j as f64 * h;
        let cols: Vec<i32> = (-reach..=reach)
            .filter(|&i| domain.level(i as f64 * h, y) < -tol)
            .collect();
        if !cols.is_empty() {
            rows.push((j, cols));
        }
    }
    let mut nodes = Vec::new();
    for (j, cols) in rows.iter().rev().filter(|(j, _)| *j > 0) {
        for &i in cols {
            nodes.push(Node {
                i,
                j: -j,
                x: i as f64 * h,
                y: -(*j as f64) * h,
            });
        }
    }
    for (j, cols) in rows.iter() {
        for &i in cols {
            nodes.push(Node {
                i,
                j: *j,
                x: i as f64 * h,
                y: *j as f64 * h,
            });
        }
    }
    if nodes.len() < MIN_INTERIOR_NODES {
        return Err(GridError::ResolutionTooCoarse {
            h,
            nodes: nodes.len(),
        });
    }

    let i_range = (
        nodes.iter().map(|n| n.i).min().unwrap(),
        nodes.iter().map(|n| n.i).max().unwrap(),
    );
    let j_range = (
        nodes.iter().map(|n| n.j).min().unwrap(),
        nodes.iter().map(|n| n.j).max().unwrap(),
    );
    let width = (i_range.1 - i_range.0 + 1) as usize;
    let height = (j_range.1 - j_range.0 + 1) as usize;
    let mut lookup = vec![None; width * height];
    for (k, n) in nodes.iter().enumerate() {
        let slot = (n.j - j_range.0) as usize * width + (n.i - i_range.0) as usize;
        lookup[slot] = Some(k);
    }

    let mut grid = Grid {
        h,
        domain: domain.clone(),
        nodes,
        hits: Vec::new(),
        arms: Vec::new(),
        axis_nodes: Vec::new(),
        reflect_node: Vec::new(),
        reflect_hit: Vec::new(),
        i_range,
        j_range,
        lookup,
        bandwidth: 0,
    };

    let mut arms = Vec::with_capacity(grid.nodes.len());
    let mut hits = Vec::new();
    let mut bandwidth = 0usize;
    for (k, n) in grid.nodes.iter().enumerate() {
        let mut node_arms = [Arm::Node(k); 4];
        for dir in Dir::ALL {
            let (di, dj) = dir.offset();
            match grid.node_at(n.i + di, n.j + dj) {
                Some(m) => {
                    bandwidth = bandwidth.max(k.abs_diff(m));
                    node_arms[dir.slot()] = Arm::Node(m);
                }
                None => {
                    let t = domain.ray_exit(n.x, n.y, di as f64, dj as f64, h);
                    let frac = (t / h).clamp(f64::MIN_POSITIVE, 1.0);
                    let len = frac * h;
                    let (x, y) = (n.x + len * di as f64, n.y + len * dj as f64);
                    hits.push(BoundaryHit {
                        node: k,
                        dir,
                        frac,
                        x,
                        y,
                        theta: polar_angle(x, y),
                    });
                    node_arms[dir.slot()] = Arm::Boundary {
                        hit: hits.len() - 1,
                        len,
                    };
                }
            }
        }
        arms.push(node_arms);
    }

    let reflect_node: Vec<usize> = grid
        .nodes
        .iter()
        .map(|n| grid.node_at(n.i, -n.j).expect("node set is mirror symmetric"))
        .collect();
    let reflect_hit: Vec<usize> = hits
        .iter()
        .map(|b| match arms[reflect_node[b.node]][b.dir.mirrored().slot()] {
            Arm::Boundary { hit, .. } => hit,
            Arm::Node(_) => unreachable!("mirror of a boundary arm is a boundary arm"),
        })
        .collect();
    grid.axis_nodes = grid
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.j == 0)
        .map(|(k, _)| k)
        .collect();
    grid.arms = arms;
    grid.hits = hits;
    grid.reflect_node = reflect_node;
    grid.reflect_hit = reflect_hit;
    grid.bandwidth = bandwidth;
    Ok(Arc::new(grid))
}

fn count_nodes(domain: &DomainSpec, h: f64) -> usize {
    let reach = (domain.diameter() / h).ceil() as i32 + 1;
    let tol = 1e-12 * domain.diameter();
    let mut c = 0;
    for j in -reach..=reach {
        for i in -reach..=reach {
            if domain.level(i as f64 * h, j as f64 * h) < -tol {
                c += 1;
            }
        }
    }
    c
}

impl Grid {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn hits(&self) -> &[BoundaryHit] {
        &self.hits
    }

    /// Length of a field's value vector: nodes followed by boundary hits.
    pub fn value_count(&self) -> usize {
        self.nodes.len() + self.hits.len()
    }

    pub fn arm(&self, node: usize, dir: Dir) -> Arm {
        self.arms[node][dir.slot()]
    }

    pub fn arms(&self, node: usize) -> &[Arm; 4] {
        &self.arms[node]
    }

    pub fn axis_nodes(&self) -> &[usize] {
        &self.axis_nodes
    }

    /// Node index of the mirror image `(x, -y)`.
    pub fn reflect_node(&self, k: usize) -> usize {
        self.reflect_node[k]
    }

    pub fn reflect_hit(&self, b: usize) -> usize {
        self.reflect_hit[b]
    }

    /// Mirror permutation on the full value vector (nodes then hits).
    pub fn reflect_slot(&self, slot: usize) -> usize {
        let n = self.nodes.len();
        if slot < n {
            self.reflect_node[slot]
        } else {
            n + self.reflect_hit[slot - n]
        }
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn i_range(&self) -> (i32, i32) {
        self.i_range
    }

    pub fn j_range(&self) -> (i32, i32) {
        self.j_range
    }

    pub fn node_at(&self, i: i32, j: i32) -> Option<usize> {
        if i < self.i_range.0 || i > self.i_range.1 || j < self.j_range.0 || j > self.j_range.1 {
            return None;
        }
        let width = (self.i_range.1 - self.i_range.0 + 1) as usize;
        self.lookup[(j - self.j_range.0) as usize * width + (i - self.i_range.0) as usize]
    }

    /// Interior node nearest to `(x, y)`.
    pub fn nearest_node(&self, x: f64, y: f64) -> Option<usize> {
        let i = (x / self.h).round() as i32;
        let j = (y / self.h).round() as i32;
        self.node_at(i, j).or_else(|| {
            self.nodes
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    let da = (a.1.x - x).hypot(a.1.y - y);
                    let db = (b.1.x - x).hypot(b.1.y - y);
                    da.total_cmp(&db)
                })
                .map(|(k, _)| k)
        })
    }

    /// Coordinates of every slot of a field's value vector.
    pub fn slot_position(&self, slot: usize) -> (f64, f64) {
        let n = self.nodes.len();
        if slot < n {
            (self.nodes[slot].x, self.nodes[slot].y)
        } else {
            let b = &self.hits[slot - n];
            (b.x, b.y)
        }
    }

    /// Approximate area of each node's dual cell clipped to the domain.
    pub fn node_weights(&self) -> Vec<f64> {
        self.arms
            .iter()
            .map(|a| {
                let wx = 0.5 * (a[0].len(self.h) + a[1].len(self.h));
                let wy = 0.5 * (a[2].len(self.h) + a[3].len(self.h));
                wx * wy
            })
            .collect()
    }

    /// True when the node has all four neighbours in the grid.
    pub fn is_regular(&self, k: usize) -> bool {
        self.arms[k].iter().all(|a| matches!(a, Arm::Node(_)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_domain, DomainParams};

    fn disc() -> DomainSpec {
        make_domain(&DomainParams::unit_disc()).unwrap()
    }

    #[test]
    fn unit_disc_node_count_tracks_area() {
        let g = build_grid(&disc(), 0.1).unwrap();
        let expect = std::f64::consts::PI / 0.01;
        let n = g.node_count() as f64;
        assert!((n - expect).abs() / expect < 0.1, "{n}");
    }

    #[test]
    fn coarse_spacing_is_rejected() {
        assert!(matches!(
            build_grid(&disc(), 0.9),
            Err(GridError::ResolutionTooCoarse { .. })
        ));
        assert!(matches!(build_grid(&disc(), -0.1), Err(GridError::InvalidSpacing(_))));
    }

    #[test]
    fn refinement_quadruples_nodes() {
        let a = build_grid(&disc(), 0.05).unwrap().node_count() as f64;
        let b = build_grid(&disc(), 0.025).unwrap().node_count() as f64;
        let r = b / a;
        assert!((3.6..=4.4).contains(&r), "{r}");
    }

    #[test]
    fn reflection_is_an_involutive_permutation() {
        let domains = [
            disc(),
            make_domain(&DomainParams::Ellipse {
                semi_axes: [1.3, 0.8],
            })
            .unwrap(),
            make_domain(&DomainParams::Radial {
                cos_coeffs: vec![1.0, 0.1, 0.08],
                sin_coeffs: vec![],
            })
            .unwrap(),
        ];
        for d in &domains {
            let g = build_grid(d, 0.07).unwrap();
            let mut seen = vec![false; g.value_count()];
            for s in 0..g.value_count() {
                let r = g.reflect_slot(s);
                assert_eq!(g.reflect_slot(r), s);
                let (x, y) = g.slot_position(s);
                let (xr, yr) = g.slot_position(r);
                assert!((x - xr).abs() < 1e-15 && (y + yr).abs() < 1e-15);
                seen[r] = true;
            }
            assert!(seen.iter().all(|&v| v));
        }
    }

    #[test]
    fn hits_lie_on_boundary_and_nodes_inside() {
        let d = make_domain(&DomainParams::Radial {
            cos_coeffs: vec![1.0, 0.1, 0.08],
            sin_coeffs: vec![],
        })
        .unwrap();
        let g = build_grid(&d, 0.05).unwrap();
        for n in g.nodes() {
            assert!(d.contains(n.x, n.y));
        }
        for b in g.hits() {
            assert!(b.frac > 0.0 && b.frac <= 1.0);
            assert!(d.level(b.x, b.y).abs() < 1e-12 * d.diameter());
        }
        assert!(g.axis_nodes().iter().all(|&k| g.nodes()[k].y == 0.0));
    }
}
