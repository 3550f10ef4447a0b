//! Finite-difference assembly of the global operator `H0` and of the confining
//! operators `H^{λ1,λ2} = H1 ⊕ H2`.
//!
//! Every operator is a list of decoupled symmetric tridiagonal blocks laid
//! over a [`Layout`]. `H0` is a single block spanning both regions; a confined
//! operator has one block per region and no entry couples them.
//!
//! Robin rows come from ghost-node elimination with a central difference for
//! `φ'(0) = λφ(0)`. The eliminated row has off-diagonal `-2/h²`; rescaling the
//! interface amplitude by `1/√2` (trapezoid weight `1/2`) makes the block
//! symmetric with coupling `-√2/h²`, without changing the spectrum. The
//! interface slot of a Robin block therefore stores `u(0)/√2`.

use std::f64::consts::SQRT_2;
use std::ops::{Add, Mul, Range};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::grid::{BoundaryParam, Grid, Layout, Region};
use crate::potential::Potential;
use crate::wavefunction::WaveFunction;

/// Real symmetric tridiagonal matrix storing one off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Config("empty tridiagonal matrix".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch {
                expected: diag.len() - 1,
                found: offdiag.len(),
            });
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// `out = T x`. Each row sums diagonal, lower, upper in that order.
    pub fn matvec_into<T>(&self, x: &[T], out: &mut [T])
    where
        T: Copy + Zero + Add<Output = T> + Mul<f64, Output = T>,
    {
        let n = self.dim();
        debug_assert!(x.len() == n && out.len() == n);
        for i in 0..n {
            let mut acc = x[i] * self.diag[i];
            if i > 0 {
                acc = acc + x[i - 1] * self.offdiag[i - 1];
            }
            if i + 1 < n {
                acc = acc + x[i + 1] * self.offdiag[i];
            }
            out[i] = acc;
        }
    }

    pub fn to_general(&self) -> Tridiagonal {
        Tridiagonal {
            lower: self.offdiag.clone(),
            diag: self.diag.clone(),
            upper: self.offdiag.clone(),
        }
    }
}

/// General tridiagonal matrix; `lower[i]` is entry `(i+1, i)` and `upper[i]`
/// is entry `(i, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

/// `max |H_ij - H_ji|` over the stored off-diagonal pairs.
pub fn symmetry_defect(m: &Tridiagonal) -> f64 {
    m.lower
        .iter()
        .zip(&m.upper)
        .map(|(l, u)| (l - u).abs())
        .fold(0.0, f64::max)
}

/// Which part of the layout a block acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockTag {
    Left,
    Right,
    Global,
}

impl BlockTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Left => "left",
            Self::Right => "right",
            Self::Global => "global",
        }
    }
}

impl From<Region> for BlockTag {
    fn from(r: Region) -> Self {
        match r {
            Region::Left => Self::Left,
            Region::Right => Self::Right,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Block<'a> {
    pub tag: BlockTag,
    pub slots: Range<usize>,
    pub matrix: &'a SymTridiagonal,
}

/// A Hamiltonian assembled as decoupled symmetric tridiagonal blocks.
pub trait Hamiltonian {
    fn layout(&self) -> &Layout;

    fn blocks(&self) -> Vec<Block<'_>>;

    fn dim(&self) -> usize {
        self.layout().len()
    }

    /// Matrix–vector product on raw slot values.
    fn apply_slice<T>(&self, x: &[T]) -> Result<Vec<T>>
    where
        T: Copy + Zero + Add<Output = T> + Mul<f64, Output = T>,
        Self: Sized,
    {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let mut out = vec![T::zero(); x.len()];
        for b in self.blocks() {
            b.matrix
                .matvec_into(&x[b.slots.clone()], &mut out[b.slots.clone()]);
        }
        Ok(out)
    }

    fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction>
    where
        Self: Sized,
    {
        if psi.layout() != self.layout() {
            return Err(Error::LayoutMismatch);
        }
        WaveFunction::new(*self.layout(), self.apply_slice(psi.amplitudes())?)
    }

    /// `P_k(Hψ) - H(P_k ψ)`.
    fn commutator_projector(&self, psi: &WaveFunction, region: Region) -> Result<WaveFunction>
    where
        Self: Sized,
    {
        let a = self.apply(psi)?.project_region(region);
        let b = self.apply(&psi.project_region(region))?;
        let diff = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| x - y)
            .collect();
        WaveFunction::new(*self.layout(), diff)
    }

    /// `Re ⟨ψ, Hψ⟩`.
    fn energy(&self, psi: &WaveFunction) -> Result<f64>
    where
        Self: Sized,
    {
        Ok(psi.inner(&self.apply(psi)?)?.re)
    }

    /// The whole operator as one tridiagonal matrix over the layout; entries
    /// between decoupled blocks are zero.
    fn matrix(&self) -> Tridiagonal {
        let n = self.dim();
        let mut m = Tridiagonal {
            lower: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            upper: vec![0.0; n.saturating_sub(1)],
        };
        for b in self.blocks() {
            let s = b.slots.start;
            m.diag[b.slots.clone()].copy_from_slice(b.matrix.diag());
            m.lower[s..s + b.matrix.offdiag().len()].copy_from_slice(b.matrix.offdiag());
            m.upper[s..s + b.matrix.offdiag().len()].copy_from_slice(b.matrix.offdiag());
        }
        m
    }

    fn symmetry_defect(&self) -> f64 {
        symmetry_defect(&self.matrix())
    }
}

/// Discrete `H0 = -d²/dx² + V` on all interior nodes of `[-L, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalHamiltonian {
    layout: Layout,
    matrix: SymTridiagonal,
    potential: Potential,
}

impl GlobalHamiltonian {
    pub fn build(grid: Grid, potential: &Potential) -> Self {
        let layout = Layout::global(grid);
        let h = grid.spacing();
        let (kin_diag, kin_off) = (2.0 / (h * h), -1.0 / (h * h));
        let diag = layout.positions().map(|x| kin_diag + potential.eval(x)).collect();
        let offdiag = vec![kin_off; layout.len() - 1];
        Self {
            layout,
            matrix: SymTridiagonal { diag, offdiag },
            potential: potential.clone(),
        }
    }

    pub fn matrix_block(&self) -> &SymTridiagonal {
        &self.matrix
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }
}

impl Hamiltonian for GlobalHamiltonian {
    fn layout(&self) -> &Layout {
        &self.layout
    }

    fn blocks(&self) -> Vec<Block<'_>> {
        vec![Block {
            tag: BlockTag::Global,
            slots: 0..self.layout.len(),
            matrix: &self.matrix,
        }]
    }
}

/// Discrete `H^{λ1,λ2} = H1^{λ1} ⊕ H2^{λ2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfinedHamiltonian {
    layout: Layout,
    left: SymTridiagonal,
    right: SymTridiagonal,
    bc_left: BoundaryParam,
    bc_right: BoundaryParam,
    potential: Potential,
}

impl ConfinedHamiltonian {
    pub fn build(
        grid: Grid,
        potential: &Potential,
        bc_left: BoundaryParam,
        bc_right: BoundaryParam,
    ) -> Self {
        let layout = Layout::confined(grid, bc_left, bc_right);
        let left = half_line_block(&layout, potential, Region::Left, bc_left);
        let right = half_line_block(&layout, potential, Region::Right, bc_right);
        Self {
            layout,
            left,
            right,
            bc_left,
            bc_right,
            potential: potential.clone(),
        }
    }

    pub fn block(&self, region: Region) -> &SymTridiagonal {
        match region {
            Region::Left => &self.left,
            Region::Right => &self.right,
        }
    }

    pub fn bc(&self, region: Region) -> BoundaryParam {
        match region {
            Region::Left => self.bc_left,
            Region::Right => self.bc_right,
        }
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }
}

impl Hamiltonian for ConfinedHamiltonian {
    fn layout(&self) -> &Layout {
        &self.layout
    }

    fn blocks(&self) -> Vec<Block<'_>> {
        [Region::Left, Region::Right]
            .into_iter()
            .map(|r| Block {
                tag: r.into(),
                slots: self.layout.slots(r),
                matrix: self.block(r),
            })
            .collect()
    }
}

fn half_line_block(
    layout: &Layout,
    potential: &Potential,
    region: Region,
    bc: BoundaryParam,
) -> SymTridiagonal {
    let h = layout.grid().spacing();
    let inv_h2 = 1.0 / (h * h);
    let slots = layout.slots(region);
    let mut diag: Vec<f64> = slots
        .clone()
        .map(|s| 2.0 * inv_h2 + potential.eval(layout.position(s)))
        .collect();
    let mut offdiag = vec![-inv_h2; diag.len() - 1];

    if let BoundaryParam::Robin(lambda) = bc {
        // Ghost node u(±h) = u(∓h) ± 2hλ u(0); the sign follows the side the
        // ghost sits on, since φ'(0) is always the derivative along +x.
        let robin_shift = 2.0 * lambda / h;
        match region {
            Region::Left => {
                let last = diag.len() - 1;
                diag[last] -= robin_shift;
                offdiag[last - 1] = -SQRT_2 * inv_h2;
            }
            Region::Right => {
                diag[0] += robin_shift;
                offdiag[0] = -SQRT_2 * inv_h2;
            }
        }
    }
    SymTridiagonal { diag, offdiag }
}
