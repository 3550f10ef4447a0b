//! Regular potentials `V(x)` for `H0 = -d²/dx² + V`.
//!
//! Admissible potentials are real, locally integrable, and bounded below by
//! `-k x²` for large `|x|`. Those conditions make `H0` the unique self-adjoint
//! realization on the line and leave boundary conditions at `x = 0` as the
//! only freedom on the two half-lines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Layout;

/// `k` in the growth condition `V(x) > -k x²` unless set explicitly.
pub const DEFAULT_QUAD_BOUND_K: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PotentialKind {
    Zero,
    /// `V(x) = ω² x²`.
    Harmonic { omega: f64 },
    /// `V(x) = depth` for `|x| < width / 2`, zero elsewhere.
    SquareWell { depth: f64, width: f64 },
    /// Piecewise-linear interpolation through `(x, V)` nodes, constant
    /// beyond the first and last node.
    Tabulated { nodes: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    kind: PotentialKind,
    quad_bound_k: f64,
}

impl Potential {
    pub fn zero() -> Self {
        Self {
            kind: PotentialKind::Zero,
            quad_bound_k: DEFAULT_QUAD_BOUND_K,
        }
    }

    pub fn harmonic(omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::Config(format!("harmonic frequency must be finite, got {omega}")));
        }
        Ok(Self {
            kind: PotentialKind::Harmonic { omega },
            quad_bound_k: DEFAULT_QUAD_BOUND_K,
        })
    }

    pub fn square_well(depth: f64, width: f64) -> Result<Self> {
        if !depth.is_finite() || !width.is_finite() || width < 0.0 {
            return Err(Error::Config(format!(
                "square well needs finite depth and width >= 0, got depth={depth}, width={width}"
            )));
        }
        Ok(Self {
            kind: PotentialKind::SquareWell { depth, width },
            quad_bound_k: DEFAULT_QUAD_BOUND_K,
        })
    }

    pub fn tabulated(nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Config(format!(
                "tabulated potential needs at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        if nodes.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
            return Err(Error::Config("tabulated potential has non-finite entries".into()));
        }
        if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Config(
                "tabulated potential nodes must have strictly increasing x".into(),
            ));
        }
        Ok(Self {
            kind: PotentialKind::Tabulated { nodes },
            quad_bound_k: DEFAULT_QUAD_BOUND_K,
        })
    }

    /// Sets the `k` of the growth condition `V(x) > -k x²`.
    pub fn with_quad_bound(mut self, k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::Config(format!("quad_bound_k must be finite and >= 0, got {k}")));
        }
        self.quad_bound_k = k;
        Ok(self)
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn quad_bound_k(&self) -> f64 {
        self.quad_bound_k
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Harmonic { omega } => omega * omega * x * x,
            PotentialKind::SquareWell { depth, width } => {
                if x.abs() < 0.5 * width {
                    *depth
                } else {
                    0.0
                }
            }
            PotentialKind::Tabulated { nodes } => interpolate(nodes, x),
        }
    }

    /// Potential values on the slots of `layout`, left block then right block.
    pub fn eval_on_grid(&self, layout: &Layout) -> Vec<f64> {
        layout.positions().map(|x| self.eval(x)).collect()
    }

    /// Samples `|x|` in `[x0, x_max]` on both sides and returns the first
    /// point where `V(x) > -k x²` fails, if any.
    pub fn growth_violation(&self, x0: f64, x_max: f64, samples: usize) -> Option<f64> {
        let k = self.quad_bound_k;
        let samples = samples.max(2);
        (0..samples)
            .map(|i| x0 + (x_max - x0) * i as f64 / (samples - 1) as f64)
            .flat_map(|r| [r, -r])
            .find(|&x| self.eval(x) <= -k * x * x)
    }
}

fn interpolate(nodes: &[(f64, f64)], x: f64) -> f64 {
    let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    // First node strictly to the right of x; exists because x < last.0.
    let hi = nodes.partition_point(|&(xn, _)| xn <= x);
    let (x0, v0) = nodes[hi - 1];
    let (x1, v1) = nodes[hi];
    v0 + (v1 - v0) * (x - x0) / (x1 - x0)
}
