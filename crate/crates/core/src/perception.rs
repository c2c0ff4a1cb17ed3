//! Robot-branch local mapping: height band filtering, projection onto a 2D
//! occupancy grid and footprint inflation.

use std::fmt::Write as _;

use nalgebra::{Vector2, Vector3};

use crate::error::{Error, Result};
use crate::geometry::FrameId;

/// Slack applied to radius comparisons so that cells lying exactly on the
/// inflation circle are included despite floating-point rounding.
pub const RADIUS_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vector3<f64>>,
    pub frame: FrameId,
    pub stamp: f64,
}

impl PointCloud {
    pub fn new(points: Vec<Vector3<f64>>, frame: FrameId, stamp: f64) -> Self {
        Self { points, frame, stamp }
    }

    pub fn empty(frame: FrameId, stamp: f64) -> Self {
        Self::new(Vec::new(), frame, stamp)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Keeps the points whose height lies in `[z_min, z_max]`, in order.
pub fn passthrough_filter(cloud: &PointCloud, z_min: f64, z_max: f64) -> Result<PointCloud> {
    passthrough_indices(cloud, z_min, z_max).map(|idx| PointCloud {
        points: idx.into_iter().map(|i| cloud.points[i]).collect(),
        frame: cloud.frame,
        stamp: cloud.stamp,
    })
}

/// Indices of the points retained by [`passthrough_filter`].
pub fn passthrough_indices(cloud: &PointCloud, z_min: f64, z_max: f64) -> Result<Vec<usize>> {
    if cloud.frame != FrameId::RobotBase {
        return Err(Error::FrameMismatch { expected: FrameId::RobotBase, found: cloud.frame });
    }
    Ok(cloud
        .points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.z >= z_min && p.z <= z_max)
        .map(|(i, _)| i)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Free,
    Occupied,
    Inflated,
}

impl Cell {
    pub fn is_free(self) -> bool {
        self == Cell::Free
    }

    fn glyph(self) -> char {
        match self {
            Cell::Free => '.',
            Cell::Occupied => '#',
            Cell::Inflated => '+',
        }
    }
}

/// Row-major occupancy grid in the robot base frame. Cell `(i, j)` covers
/// `[ox + i*res, ox + (i+1)*res) x [oy + j*res, oy + (j+1)*res)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Costmap2D {
    pub origin: Vector2<f64>,
    pub resolution: f64,
    pub width: usize,
    pub height: usize,
    pub cells: Vec<Cell>,
}

impl Costmap2D {
    pub fn new(origin: Vector2<f64>, resolution: f64, width: usize, height: usize) -> Result<Self> {
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::InvalidGrid(format!("resolution must be positive, got {resolution}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidGrid(format!("grid must be non-empty, got {width}x{height}")));
        }
        Ok(Self { origin, resolution, width, height, cells: vec![Cell::Free; width * height] })
    }

    pub fn get(&self, i: usize, j: usize) -> Cell {
        self.cells[j * self.width + i]
    }

    pub fn set(&mut self, i: usize, j: usize, c: Cell) {
        let w = self.width;
        self.cells[j * w + i] = c;
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Vector2<f64> {
        self.origin + Vector2::new((i as f64 + 0.5) * self.resolution, (j as f64 + 0.5) * self.resolution)
    }

    /// Cell containing the planar point `p`, if inside the grid.
    pub fn cell_of(&self, p: &Vector2<f64>) -> Option<(usize, usize)> {
        let fi = ((p.x - self.origin.x) / self.resolution).floor();
        let fj = ((p.y - self.origin.y) / self.resolution).floor();
        if fi < 0.0 || fj < 0.0 || fi >= self.width as f64 || fj >= self.height as f64 {
            return None;
        }
        Some((fi as usize, fj as usize))
    }

    pub fn count(&self, c: Cell) -> usize {
        self.cells.iter().filter(|&&x| x == c).count()
    }

    /// Iterates `(i, j, cell)` over all cells.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Cell)> + '_ {
        self.cells.iter().enumerate().map(move |(k, &c)| (k % self.width, k / self.width, c))
    }

    /// One text row per grid row, top row = largest y.
    pub fn to_ascii(&self) -> String {
        let mut s = String::with_capacity((self.width + 1) * self.height);
        for j in (0..self.height).rev() {
            s.extend((0..self.width).map(|i| self.get(i, j).glyph()));
            s.push('\n');
        }
        s
    }

    /// CSV with `0 = free, 1 = inflated, 2 = occupied`, same row order as
    /// [`Costmap2D::to_ascii`].
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for j in (0..self.height).rev() {
            for i in 0..self.width {
                if i > 0 {
                    s.push(',');
                }
                let v = match self.get(i, j) {
                    Cell::Free => 0,
                    Cell::Inflated => 1,
                    Cell::Occupied => 2,
                };
                let _ = write!(s, "{v}");
            }
            s.push('\n');
        }
        s
    }
}

/// Projects a filtered robot-frame cloud onto a fresh grid.
pub fn build_costmap(
    cloud: &PointCloud,
    origin: Vector2<f64>,
    resolution: f64,
    width: usize,
    height: usize,
) -> Result<Costmap2D> {
    if cloud.frame != FrameId::RobotBase {
        return Err(Error::FrameMismatch { expected: FrameId::RobotBase, found: cloud.frame });
    }
    let mut map = Costmap2D::new(origin, resolution, width, height)?;
    for p in &cloud.points {
        if let Some((i, j)) = map.cell_of(&p.xy()) {
            map.set(i, j, Cell::Occupied);
        }
    }
    Ok(map)
}

/// Offsets `(di, dj)` whose cell-center distance is within `r`, grouped by
/// ring (Chebyshev radius) from the inside out.
fn disk_offsets(r: f64, resolution: f64) -> Vec<(isize, isize)> {
    let rings = (r / resolution).ceil() as isize;
    let mut out = Vec::new();
    for ring in 1..=rings {
        for di in -ring..=ring {
            for dj in -ring..=ring {
                if di.abs().max(dj.abs()) != ring {
                    continue;
                }
                let d = ((di * di + dj * dj) as f64).sqrt() * resolution;
                if d <= r + RADIUS_EPS {
                    out.push((di, dj));
                }
            }
        }
    }
    out
}

/// Marks every free cell whose center lies within `r_inf` of an occupied
/// cell center as inflated. Occupied cells are left untouched and existing
/// inflated cells are kept, so the operation is idempotent.
pub fn inflate(map: &Costmap2D, r_inf: f64) -> Costmap2D {
    let mut out = map.clone();
    if r_inf <= 0.0 {
        return out;
    }
    let offsets = disk_offsets(r_inf, map.resolution);
    let (w, h) = (map.width as isize, map.height as isize);
    let occupied = |i: isize, j: isize| {
        i >= 0 && j >= 0 && i < w && j < h && map.cells[(j * w + i) as usize] == Cell::Occupied
    };
    for j in 0..h {
        for i in 0..w {
            if !occupied(i, j) {
                continue;
            }
            // Interior cells add nothing their neighbours do not already cover.
            if (-1..=1).all(|dj| (-1..=1).all(|di| occupied(i + di, j + dj))) {
                continue;
            }
            for &(di, dj) in &offsets {
                let (ni, nj) = (i + di, j + dj);
                if ni < 0 || nj < 0 || ni >= w || nj >= h {
                    continue;
                }
                let k = (nj * w + ni) as usize;
                if out.cells[k] == Cell::Free {
                    out.cells[k] = Cell::Inflated;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn robot_cloud(points: &[(f64, f64, f64)]) -> PointCloud {
        PointCloud::new(points.iter().map(|&(x, y, z)| Vector3::new(x, y, z)).collect(), FrameId::RobotBase, 0.0)
    }

    #[test]
    fn passthrough_band() {
        let c = robot_cloud(&[(1.0, 0.0, -0.05), (1.0, 0.0, 0.1), (1.0, 0.0, 0.9), (2.0, 0.0, 0.3)]);
        let f = passthrough_filter(&c, 0.02, 0.5).unwrap();
        assert_eq!(f.points, vec![Vector3::new(1.0, 0.0, 0.1), Vector3::new(2.0, 0.0, 0.3)]);
    }

    #[test]
    fn passthrough_rejects_wrong_frame() {
        let c = PointCloud::empty(FrameId::OpticalDog, 0.0);
        assert!(matches!(passthrough_filter(&c, 0.0, 1.0), Err(Error::FrameMismatch { .. })));
    }

    #[test]
    fn costmap_index_arithmetic() {
        let c = robot_cloud(&[(1.0, 0.2, 0.1), (50.0, 0.0, 0.1)]);
        let m = build_costmap(&c, Vector2::zeros(), 0.1, 20, 20).unwrap();
        assert_eq!(m.get(10, 2), Cell::Occupied);
        assert_eq!(m.count(Cell::Occupied), 1);
    }

    #[test]
    fn costmap_rejects_bad_grid() {
        let c = robot_cloud(&[]);
        assert!(matches!(build_costmap(&c, Vector2::zeros(), 0.0, 5, 5), Err(Error::InvalidGrid(_))));
        assert!(matches!(build_costmap(&c, Vector2::zeros(), 0.1, 0, 5), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn zero_radius_is_identity() {
        let c = robot_cloud(&[(0.55, 0.55, 0.1)]);
        let m = build_costmap(&c, Vector2::zeros(), 0.1, 11, 11).unwrap();
        assert_eq!(inflate(&m, 0.0), m);
    }

    #[test]
    fn single_cell_radius_three_disk() {
        let c = robot_cloud(&[(0.55, 0.55, 0.1)]);
        let m = build_costmap(&c, Vector2::zeros(), 0.1, 11, 11).unwrap();
        let out = inflate(&m, 0.3);
        // Lattice points with di²+dj² <= 9, minus the center: 29 - 1 = 28.
        assert_eq!(out.count(Cell::Inflated), 28);
        assert_eq!(out.get(5, 5), Cell::Occupied);
        assert_eq!(out.get(8, 5), Cell::Inflated);
        assert_eq!(out.get(7, 7), Cell::Inflated);
        assert_eq!(out.get(8, 7), Cell::Free);
        assert_eq!(inflate(&out, 0.3), out);
    }

    #[test]
    fn all_occupied_unchanged() {
        let mut m = Costmap2D::new(Vector2::zeros(), 0.1, 4, 4).unwrap();
        m.cells.iter_mut().for_each(|c| *c = Cell::Occupied);
        assert_eq!(inflate(&m, 0.35), m);
    }

    #[test]
    fn ascii_export_shape() {
        let c = robot_cloud(&[(0.15, 0.05, 0.1)]);
        let m = inflate(&build_costmap(&c, Vector2::zeros(), 0.1, 3, 2).unwrap(), 0.1);
        assert_eq!(m.to_ascii(), ".+.\n+#+\n");
        assert_eq!(m.to_csv(), "0,1,0\n1,2,1\n");
    }
}
