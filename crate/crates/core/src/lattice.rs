//! Square-lattice geometry: vertices, links, stars and oriented paths.
//!
//! Coordinates are `(col, row)` with the origin at the lower-left corner.
//! Direction 1 points along +x, direction 2 along +y.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice dimensions must be positive, got {0}x{1}")]
    EmptyLattice(usize, usize),
    #[error("vertex ({0}, {1}) lies outside the lattice")]
    VertexOutOfRange(i64, i64),
    #[error("link from ({0}, {1}) in direction {2} does not exist")]
    InvalidLink(usize, usize, u8),
    #[error("rectangle at ({0}, {1}) of size {2}x{3} does not fit the lattice")]
    RectangleTooLarge(usize, usize, usize, usize),
    #[error("path is not connected at step {0}")]
    Disconnected(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Open,
    PeriodicX,
    PeriodicY,
    Torus,
}

impl Boundary {
    fn wraps_x(self) -> bool {
        matches!(self, Boundary::PeriodicX | Boundary::Torus)
    }

    fn wraps_y(self) -> bool {
        matches!(self, Boundary::PeriodicY | Boundary::Torus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub col: usize,
    pub row: usize,
}

impl Vertex {
    pub fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub fn index(self) -> u8 {
        match self {
            Direction::X => 1,
            Direction::Y => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId {
    pub origin: Vertex,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Forward,
    Backward,
}

impl Orientation {
    pub fn sign(self) -> i32 {
        match self {
            Orientation::Forward => 1,
            Orientation::Backward => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedPath {
    pub steps: Vec<(LinkId, Orientation)>,
    pub closed: bool,
}

impl OrientedPath {
    pub fn empty() -> Self {
        Self { steps: Vec::new(), closed: false }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    pub width: usize,
    pub height: usize,
    pub boundary: Boundary,
}

impl LatticeGeometry {
    pub fn new(width: usize, height: usize, boundary: Boundary) -> Result<Self, LatticeError> {
        if width == 0 || height == 0 {
            return Err(LatticeError::EmptyLattice(width, height));
        }
        Ok(Self { width, height, boundary })
    }

    /// Open chain of `n` sites along x.
    pub fn chain(n: usize) -> Result<Self, LatticeError> {
        Self::new(n, 1, Boundary::Open)
    }

    pub fn is_one_dimensional(&self) -> bool {
        self.height == 1 && !self.boundary.wraps_y()
    }

    pub fn n_vertices(&self) -> usize {
        self.width * self.height
    }

    /// Row-major index; this is also the fermionic mode order.
    pub fn vertex_index(&self, v: Vertex) -> usize {
        v.row * self.width + v.col
    }

    pub fn vertex(&self, index: usize) -> Vertex {
        Vertex::new(index % self.width, index / self.width)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.n_vertices()).map(|i| self.vertex(i))
    }

    pub fn check_vertex(&self, col: i64, row: i64) -> Result<Vertex, LatticeError> {
        if col < 0 || row < 0 || col as usize >= self.width || row as usize >= self.height {
            return Err(LatticeError::VertexOutOfRange(col, row));
        }
        Ok(Vertex::new(col as usize, row as usize))
    }

    pub fn parity(&self, v: Vertex) -> Result<i32, LatticeError> {
        self.check_vertex(v.col as i64, v.row as i64)?;
        Ok(parity_of(v))
    }

    /// Neighbour in the positive direction, if the link to it exists.
    pub fn forward(&self, v: Vertex, d: Direction) -> Option<Vertex> {
        match d {
            Direction::X => {
                if v.col + 1 < self.width {
                    Some(Vertex::new(v.col + 1, v.row))
                } else if self.boundary.wraps_x() {
                    Some(Vertex::new(0, v.row))
                } else {
                    None
                }
            }
            Direction::Y => {
                if v.row + 1 < self.height {
                    Some(Vertex::new(v.col, v.row + 1))
                } else if self.boundary.wraps_y() {
                    Some(Vertex::new(v.col, 0))
                } else {
                    None
                }
            }
        }
    }

    /// Neighbour in the negative direction, if the link from it exists.
    pub fn backward(&self, v: Vertex, d: Direction) -> Option<Vertex> {
        match d {
            Direction::X => {
                if v.col > 0 {
                    Some(Vertex::new(v.col - 1, v.row))
                } else if self.boundary.wraps_x() {
                    Some(Vertex::new(self.width - 1, v.row))
                } else {
                    None
                }
            }
            Direction::Y => {
                if v.row > 0 {
                    Some(Vertex::new(v.col, v.row - 1))
                } else if self.boundary.wraps_y() {
                    Some(Vertex::new(v.col, self.height - 1))
                } else {
                    None
                }
            }
        }
    }

    pub fn link(&self, origin: Vertex, direction: Direction) -> Result<LinkId, LatticeError> {
        if origin.col >= self.width || origin.row >= self.height || self.forward(origin, direction).is_none() {
            return Err(LatticeError::InvalidLink(origin.col, origin.row, direction.index()));
        }
        Ok(LinkId { origin, direction })
    }

    pub fn target(&self, link: LinkId) -> Vertex {
        self.forward(link.origin, link.direction)
            .expect("link validated at construction")
    }

    /// All valid links, ordered by origin vertex and then direction.
    pub fn links(&self) -> Vec<LinkId> {
        let mut out = Vec::new();
        for v in self.vertices() {
            for d in [Direction::X, Direction::Y] {
                if self.forward(v, d).is_some() {
                    out.push(LinkId { origin: v, direction: d });
                }
            }
        }
        out
    }

    pub fn n_links(&self) -> usize {
        self.links().len()
    }

    pub fn link_index(&self, link: LinkId) -> Option<usize> {
        self.links().iter().position(|l| *l == link)
    }

    /// Outgoing links with sign +1, ingoing links with sign -1.
    pub fn star_links(&self, v: Vertex) -> Vec<(LinkId, i32)> {
        let mut out = Vec::with_capacity(4);
        for d in [Direction::X, Direction::Y] {
            if self.forward(v, d).is_some() {
                out.push((LinkId { origin: v, direction: d }, 1));
            }
        }
        for d in [Direction::X, Direction::Y] {
            if let Some(u) = self.backward(v, d) {
                out.push((LinkId { origin: u, direction: d }, -1));
            }
        }
        out
    }

    /// Plaquettes as the four links (bottom, right, top, left), anchored at the lower-left corner.
    pub fn plaquettes(&self) -> Vec<[LinkId; 4]> {
        let mut out = Vec::new();
        for v in self.vertices() {
            let (Some(right), Some(up)) = (self.forward(v, Direction::X), self.forward(v, Direction::Y)) else {
                continue;
            };
            if self.forward(right, Direction::Y).is_none() || self.forward(up, Direction::X).is_none() {
                continue;
            }
            out.push([
                LinkId { origin: v, direction: Direction::X },
                LinkId { origin: right, direction: Direction::Y },
                LinkId { origin: up, direction: Direction::X },
                LinkId { origin: v, direction: Direction::Y },
            ]);
        }
        out
    }

    /// Counterclockwise closed loop around a `w` x `h` rectangle.
    pub fn rectangle_loop(&self, corner: Vertex, w: usize, h: usize) -> Result<OrientedPath, LatticeError> {
        let too_large = || LatticeError::RectangleTooLarge(corner.col, corner.row, w, h);
        if w == 0 || h == 0 || corner.col >= self.width || corner.row >= self.height {
            return Err(too_large());
        }
        let fits_x = corner.col + w < self.width || (self.boundary.wraps_x() && w < self.width);
        let fits_y = corner.row + h < self.height || (self.boundary.wraps_y() && h < self.height);
        if !fits_x || !fits_y {
            return Err(too_large());
        }
        let mut steps = Vec::with_capacity(2 * (w + h));
        let mut v = corner;
        for _ in 0..w {
            steps.push((self.link(v, Direction::X)?, Orientation::Forward));
            v = self.forward(v, Direction::X).ok_or_else(too_large)?;
        }
        for _ in 0..h {
            steps.push((self.link(v, Direction::Y)?, Orientation::Forward));
            v = self.forward(v, Direction::Y).ok_or_else(too_large)?;
        }
        for _ in 0..w {
            let u = self.backward(v, Direction::X).ok_or_else(too_large)?;
            steps.push((self.link(u, Direction::X)?, Orientation::Backward));
            v = u;
        }
        for _ in 0..h {
            let u = self.backward(v, Direction::Y).ok_or_else(too_large)?;
            steps.push((self.link(u, Direction::Y)?, Orientation::Backward));
            v = u;
        }
        Ok(OrientedPath { steps, closed: true })
    }

    /// Straight open path from `start` taking `n` steps along `d`.
    pub fn straight_path(&self, start: Vertex, d: Direction, n: usize) -> Result<OrientedPath, LatticeError> {
        let mut steps = Vec::with_capacity(n);
        let mut v = start;
        for _ in 0..n {
            steps.push((self.link(v, d)?, Orientation::Forward));
            v = self.target(LinkId { origin: v, direction: d });
        }
        Ok(OrientedPath { steps, closed: false })
    }

    /// Endpoints of a path, checking that consecutive steps share a vertex.
    pub fn path_endpoints(&self, path: &OrientedPath) -> Result<Option<(Vertex, Vertex)>, LatticeError> {
        let mut ends: Option<(Vertex, Vertex)> = None;
        for (i, (link, o)) in path.steps.iter().enumerate() {
            let (from, to) = match o {
                Orientation::Forward => (link.origin, self.target(*link)),
                Orientation::Backward => (self.target(*link), link.origin),
            };
            ends = match ends {
                None => Some((from, to)),
                Some((start, cur)) if cur == from => Some((start, to)),
                Some(_) => return Err(LatticeError::Disconnected(i)),
            };
        }
        if path.closed {
            if let Some((s, e)) = ends {
                if s != e {
                    return Err(LatticeError::Disconnected(path.steps.len()));
                }
            }
        }
        Ok(ends)
    }
}

pub fn parity_of(v: Vertex) -> i32 {
    if (v.col + v.row) % 2 == 0 {
        1
    } else {
        -1
    }
}
