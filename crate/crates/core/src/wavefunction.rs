use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Layout, Region};

/// Complex grid function on the slots of a [`Layout`].
///
/// Norms and inner products carry the grid weight `h`:
/// `‖ψ‖² = h Σ |ψ_j|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    layout: Layout,
    amplitudes: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(layout: Layout, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.len() {
            return Err(Error::DimensionMismatch {
                expected: layout.len(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { layout, amplitudes })
    }

    pub fn zeros(layout: Layout) -> Self {
        Self {
            amplitudes: vec![Complex64::new(0.0, 0.0); layout.len()],
            layout,
        }
    }

    pub fn from_real(layout: Layout, values: &[f64]) -> Result<Self> {
        Self::new(layout, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f` at every slot position.
    pub fn from_fn(layout: Layout, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = layout.positions().map(f).collect();
        Self { layout, amplitudes }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    fn spacing(&self) -> f64 {
        self.layout.grid().spacing()
    }

    /// `h Σ |ψ_j|²` over the slots of `region`.
    pub fn region_norm_sqr(&self, region: Region) -> f64 {
        self.spacing()
            * self.amplitudes[self.layout.slots(region)]
                .iter()
                .map(|a| a.norm_sqr())
                .sum::<f64>()
    }

    /// Sum of the two region contributions, so that a state supported on one
    /// region has a total norm bit-identical to that region's norm.
    pub fn norm_sqr(&self) -> f64 {
        self.region_norm_sqr(Region::Left) + self.region_norm_sqr(Region::Right)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self, other⟩ = h Σ conj(self_j) other_j`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_layout(other)?;
        let s: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.spacing())
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero or non-finite state".into()));
        }
        self.scale(Complex64::new(1.0 / norm, 0.0));
        Ok(())
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    /// `P_k ψ`: zero every slot outside `region`.
    pub fn project_region(&self, region: Region) -> Self {
        let keep = self.layout.slots(region);
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(s, &a)| if keep.contains(&s) { a } else { Complex64::new(0.0, 0.0) })
            .collect();
        Self {
            layout: self.layout,
            amplitudes,
        }
    }

    /// `‖P_k ψ‖² / ‖ψ‖²`.
    pub fn region_probability(&self, region: Region) -> Result<f64> {
        let inside = self.region_norm_sqr(region);
        let total = inside + self.region_norm_sqr(region.other());
        if total == 0.0 {
            return Err(Error::Domain("region probability of the zero state".into()));
        }
        Ok(inside / total)
    }

    /// Re-express the state on another layout of the same grid by matching
    /// nodes. A node absent from the source becomes zero; the interface node
    /// is taken from the same region when both copies exist.
    pub fn transfer_to(&self, target: Layout) -> Result<Self> {
        if target.grid() != self.layout.grid() {
            return Err(Error::LayoutMismatch);
        }
        let zero = Complex64::new(0.0, 0.0);
        let amplitudes = (0..target.len())
            .map(|s| {
                let (region, node) = (target.region_of(s), target.node_of(s));
                self.layout
                    .slot_of(region, node)
                    .or_else(|| self.layout.slot_of(region.other(), node))
                    .map_or(zero, |src| self.amplitudes[src])
            })
            .collect();
        Ok(Self {
            layout: target,
            amplitudes,
        })
    }

    pub(crate) fn check_same_layout(&self, other: &Self) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(())
    }
}
