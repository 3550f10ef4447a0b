//! Uniform grid on `[-L, L]` with the interface at `x = 0`, boundary
//! parameters, and the slot layouts used by the assembled operators.

use std::fmt;

use crate::error::{Error, Result};

/// Uniform grid over `[-L, L]`.
///
/// Global node `j` sits at `x_j = (j - n) h` for `j = 0..=2n`, so `j = n` is
/// exactly the interface and `j = 0, 2n` are the truncation walls at `∓L`
/// (never stored; homogeneous Dirichlet).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    half_width: f64,
    n_per_side: usize,
}

impl Grid {
    pub const MIN_NODES_PER_SIDE: usize = 2;

    pub fn new(half_width: f64, n_per_side: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Config(format!("half width L must be finite and > 0, got {half_width}")));
        }
        if n_per_side < Self::MIN_NODES_PER_SIDE {
            return Err(Error::Config(format!(
                "n_per_side must be >= {}, got {n_per_side}",
                Self::MIN_NODES_PER_SIDE
            )));
        }
        Ok(Self {
            half_width,
            n_per_side,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_per_side(&self) -> usize {
        self.n_per_side
    }

    pub fn spacing(&self) -> f64 {
        self.half_width / self.n_per_side as f64
    }

    /// Position of global node `j`.
    pub fn node_position(&self, j: usize) -> f64 {
        (j as f64 - self.n_per_side as f64) * self.spacing()
    }

    /// Global index of the interface node `x = 0`.
    pub fn interface_node(&self) -> usize {
        self.n_per_side
    }
}

/// Boundary condition at `x = 0` for one half-line: `φ'(0) = λ φ(0)`, or
/// `φ(0) = 0` for `λ = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryParam {
    Robin(f64),
    Dirichlet,
}

impl BoundaryParam {
    pub fn robin(lambda: f64) -> Result<Self> {
        if lambda.is_finite() {
            Ok(Self::Robin(lambda))
        } else {
            Err(Error::Config(format!("Robin parameter must be finite, got {lambda}")))
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, Self::Dirichlet)
    }
}

impl fmt::Display for BoundaryParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Robin(l) => write!(f, "{l}"),
            Self::Dirichlet => f.write_str("inf"),
        }
    }
}

/// `Ω₁ = (-∞, 0)` or `Ω₂ = (0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Left,
    Right,
}

impl Region {
    /// Region from the index `k ∈ {1, 2}`.
    pub fn from_index(k: usize) -> Result<Self> {
        match k {
            1 => Ok(Self::Left),
            2 => Ok(Self::Right),
            _ => Err(Error::Domain(format!("region index must be 1 or 2, got {k}"))),
        }
    }

    pub fn index(&self) -> usize {
        match self {
            Self::Left => 1,
            Self::Right => 2,
        }
    }

    pub fn other(&self) -> Self {
        match self {
            Self::Left => Self::Right,
            Self::Right => Self::Left,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Left => "left",
            Self::Right => "right",
        })
    }
}

/// Contiguous run of global node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeSpan {
    pub first: usize,
    pub len: usize,
}

impl NodeSpan {
    pub fn contains(&self, j: usize) -> bool {
        j >= self.first && j < self.first + self.len
    }
}

/// Assignment of vector slots to grid nodes and regions.
///
/// Slots `0..left.len` are region 1, the remaining slots region 2. The global
/// layout stores each interior node once and gives the interface node to
/// region 1. A confined layout keeps the interface node in every block with
/// a Robin condition (so two Robin blocks each get their own copy) and drops
/// it from Dirichlet blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layout {
    grid: Grid,
    left: NodeSpan,
    right: NodeSpan,
}

impl Layout {
    pub fn global(grid: Grid) -> Self {
        let n = grid.n_per_side;
        Self {
            grid,
            left: NodeSpan { first: 1, len: n },
            right: NodeSpan {
                first: n + 1,
                len: n - 1,
            },
        }
    }

    pub fn confined(grid: Grid, bc_left: BoundaryParam, bc_right: BoundaryParam) -> Self {
        let n = grid.n_per_side;
        let left = NodeSpan {
            first: 1,
            len: if bc_left.is_dirichlet() { n - 1 } else { n },
        };
        let right = if bc_right.is_dirichlet() {
            NodeSpan {
                first: n + 1,
                len: n - 1,
            }
        } else {
            NodeSpan { first: n, len: n }
        };
        Self { grid, left, right }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.left.len + self.right.len
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn span(&self, region: Region) -> NodeSpan {
        match region {
            Region::Left => self.left,
            Region::Right => self.right,
        }
    }

    /// Slot range owned by `region`.
    pub fn slots(&self, region: Region) -> std::ops::Range<usize> {
        match region {
            Region::Left => 0..self.left.len,
            Region::Right => self.left.len..self.len(),
        }
    }

    pub fn region_of(&self, slot: usize) -> Region {
        if slot < self.left.len {
            Region::Left
        } else {
            Region::Right
        }
    }

    pub fn node_of(&self, slot: usize) -> usize {
        if slot < self.left.len {
            self.left.first + slot
        } else {
            self.right.first + (slot - self.left.len)
        }
    }

    pub fn position(&self, slot: usize) -> f64 {
        self.grid.node_position(self.node_of(slot))
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |s| self.position(s))
    }

    /// Slot holding global node `j` in `region`, if stored.
    pub fn slot_of(&self, region: Region, j: usize) -> Option<usize> {
        let span = self.span(region);
        span.contains(j)
            .then(|| self.slots(region).start + (j - span.first))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 10).is_err());
        assert!(Grid::new(-1.0, 10).is_err());
        assert!(Grid::new(f64::NAN, 10).is_err());
        assert!(Grid::new(1.0, 1).is_err());
        let g = Grid::new(2.0, 8).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.node_position(g.interface_node()), 0.0);
        assert_eq!(g.node_position(0), -2.0);
        assert_eq!(g.node_position(16), 2.0);
    }

    #[test]
    fn positions_are_mirror_symmetric() {
        let g = Grid::new(1.3, 7).unwrap();
        let n = g.n_per_side();
        for j in 0..=n {
            assert_eq!(g.node_position(n - j), -g.node_position(n + j));
        }
    }

    #[test]
    fn confined_layout_node_ownership() {
        let g = Grid::new(1.0, 4).unwrap();
        let dd = Layout::confined(g, BoundaryParam::Dirichlet, BoundaryParam::Dirichlet);
        assert_eq!(dd.len(), 6);
        assert!(dd.positions().all(|x| x != 0.0));

        let rd = Layout::confined(g, BoundaryParam::Robin(0.0), BoundaryParam::Dirichlet);
        assert_eq!(rd.slots(Region::Left).len(), 4);
        assert_eq!(rd.position(3), 0.0);
        assert_eq!(rd.region_of(3), Region::Left);
        assert_eq!(rd, Layout::global(g));

        let dr = Layout::confined(g, BoundaryParam::Dirichlet, BoundaryParam::Robin(2.0));
        assert_eq!(dr.slots(Region::Right).len(), 4);
        assert_eq!(dr.position(3), 0.0);
        assert_eq!(dr.region_of(3), Region::Right);

        let rr = Layout::confined(g, BoundaryParam::Robin(1.0), BoundaryParam::Robin(-1.0));
        assert_eq!(rr.len(), 8);
        let zeros: Vec<(usize, Region)> = (0..rr.len())
            .filter(|&s| rr.position(s) == 0.0)
            .map(|s| (s, rr.region_of(s)))
            .collect();
        assert_eq!(zeros, vec![(3, Region::Left), (4, Region::Right)]);
    }

    #[test]
    fn slot_lookup_inverts_node_of() {
        let g = Grid::new(1.0, 5).unwrap();
        let rr = Layout::confined(g, BoundaryParam::Robin(1.0), BoundaryParam::Robin(1.0));
        for s in 0..rr.len() {
            assert_eq!(rr.slot_of(rr.region_of(s), rr.node_of(s)), Some(s));
        }
        assert_eq!(rr.slot_of(Region::Left, 7), None);
    }

    #[test]
    fn region_indices() {
        assert_eq!(Region::from_index(1).unwrap(), Region::Left);
        assert_eq!(Region::from_index(2).unwrap(), Region::Right);
        assert!(Region::from_index(3).is_err());
        assert_eq!(Region::Left.other(), Region::Right);
    }
}
