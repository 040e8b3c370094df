//! Planar geometry primitives and the problem instance type.

use crate::error::{FbrError, Result};

/// Absolute tolerance on the communication radius: a pair is considered
/// connected when its distance is at most `h + TAU_GEO`. Solver outputs that
/// land exactly on the radius then still verify as connected.
pub const TAU_GEO: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    /// Point at parameter `t` on the segment from `self` to `other`.
    pub fn lerp(self, other: Point, t: f64) -> Point {
        self.add(other.sub(self).scale(t))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Slack of a pair: how far `p` and `q` are beyond the communication
/// radius `h`, clamped at zero.
pub fn edge_weight(p: Point, q: Point, h: f64) -> f64 {
    (p.dist(q) - h).max(0.0)
}

/// A problem instance: robot positions (robot identity = index) plus the
/// communication radius.
#[derive(Debug, Clone)]
pub struct RobotConfig {
    positions: Vec<Point>,
    h: f64,
}

impl RobotConfig {
    /// Requires at least three robots (biconnectivity is undefined below
    /// that), a positive radius, and finite coordinates.
    pub fn new(positions: Vec<Point>, h: f64) -> Result<Self> {
        if positions.len() < 3 {
            return Err(FbrError::InvalidInput(format!(
                "need at least 3 robots, got {}",
                positions.len()
            )));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(FbrError::InvalidInput(format!(
                "communication radius must be positive and finite, got {h}"
            )));
        }
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(FbrError::InvalidInput(format!(
                "position {i} has non-finite coordinates"
            )));
        }
        Ok(RobotConfig { positions, h })
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    /// Largest pairwise distance; used to scale solver tolerances.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.positions.len() {
            for j in i + 1..self.positions.len() {
                d = d.max(self.positions[i].dist(self.positions[j]));
            }
        }
        d
    }

    /// Maximum displacement between this config's positions and `new_positions`.
    pub fn max_displacement(&self, new_positions: &[Point]) -> f64 {
        self.positions
            .iter()
            .zip(new_positions)
            .map(|(a, b)| a.dist(*b))
            .fold(0.0, f64::max)
    }
}
