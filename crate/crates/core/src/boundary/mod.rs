//! Exact algebra of the boundary potentials `B_k^λ`.
//!
//! A state of the adjoint domain near the interface is a pair of polynomials
//! `ψ = χ₁ φ₁ + χ₂ φ₂`. Applying the distributional `H0` to it produces a
//! regular part plus `δ` and `δ'` terms at `x = 0` from the jumps of `ψ` and
//! `ψ'`. The confining operator acts as `H0 - B₁^{λ₁} + B₂^{λ₂}`, where
//!
//! ```text
//! λ = ∞:  B_k = -δ̂_k' + (-1)^k δ̂_k
//! λ < ∞:  B_k =  δ̂_k' + 2λ δ̂_k + (-1)^k d/dx[ δ̂_k (d/dx - λ) ]
//! ```
//!
//! and `δ̂^{(n)}_k ψ = δ^{(n)}(x) φ_k(x)`. The composite term is read as
//! `δ(x)(φ_k' - λφ_k)(x)`, collapsed to its value at 0, then differentiated.
//! Everything here is exact; floating point only enters through
//! [`pairing`], which is the numerical cross-check.

pub mod pairing;
pub mod poly;
pub mod sweep;

use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::grid::{BoundaryParam, Region};
use crate::potential::{Potential, PotentialKind};

pub use poly::{int, rational, FloatPoly, Poly, Rational};

pub const DEFAULT_MAX_DEGREE: usize = 6;

/// Boundary parameter with an exact rational `λ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactBoundary {
    Robin(Rational),
    Dirichlet,
}

impl ExactBoundary {
    pub fn robin(lambda: Rational) -> Self {
        Self::Robin(lambda)
    }
}

impl TryFrom<BoundaryParam> for ExactBoundary {
    type Error = crate::Error;

    fn try_from(bc: BoundaryParam) -> crate::Result<Self> {
        match bc {
            BoundaryParam::Dirichlet => Ok(Self::Dirichlet),
            BoundaryParam::Robin(l) => poly::exact_from_f64(l)
                .map(Self::Robin)
                .ok_or_else(|| crate::Error::Config(format!("Robin parameter {l} is not finite"))),
        }
    }
}

/// `ψ = χ₁ φ₁ + χ₂ φ₂` near the interface; `φ₁` lives on the left, `φ₂` on
/// the right, each valid on `[-a, a]` for the window half-width `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolyState {
    pub p1: Poly,
    pub p2: Poly,
    pub window: f64,
}

impl PiecewisePolyState {
    pub fn new(p1: Poly, p2: Poly) -> Self {
        Self {
            p1,
            p2,
            window: 1.0,
        }
    }

    pub fn with_window(mut self, window: f64) -> Self {
        self.window = window;
        self
    }

    pub fn piece(&self, region: Region) -> &Poly {
        match region {
            Region::Left => &self.p1,
            Region::Right => &self.p2,
        }
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.p1.degree().max(self.p2.degree())
    }
}

/// `regular + c_delta δ + c_delta_prime δ'`, with the regular part a pair of
/// polynomials (left piece, right piece).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularDistribution {
    pub regular: (Poly, Poly),
    pub c_delta: Rational,
    pub c_delta_prime: Rational,
}

impl SingularDistribution {
    pub fn zero() -> Self {
        Self {
            regular: (Poly::zero(), Poly::zero()),
            c_delta: Rational::zero(),
            c_delta_prime: Rational::zero(),
        }
    }

    pub fn regular(left: Poly, right: Poly) -> Self {
        Self {
            regular: (left, right),
            ..Self::zero()
        }
    }

    pub fn delta(c: Rational) -> Self {
        Self {
            c_delta: c,
            ..Self::zero()
        }
    }

    pub fn delta_prime(c: Rational) -> Self {
        Self {
            c_delta_prime: c,
            ..Self::zero()
        }
    }

    /// `δ(x) f(x) = f(0) δ`.
    pub fn delta_times(f: &Poly) -> Self {
        Self::delta(f.value_at_zero())
    }

    /// `δ'(x) f(x) = f(0) δ' - f'(0) δ`.
    pub fn delta_prime_times(f: &Poly) -> Self {
        Self {
            c_delta: -f.slope_at_zero(),
            c_delta_prime: f.value_at_zero(),
            ..Self::zero()
        }
    }

    /// Distributional derivative of a pure `c δ` term. Returns `None` when a
    /// `δ'` or regular part is present, since that would leave the order ≤ 1
    /// class this module works in.
    pub fn derivative_of_delta(&self) -> Option<Self> {
        if !self.c_delta_prime.is_zero() || !self.regular.0.is_zero() || !self.regular.1.is_zero() {
            return None;
        }
        Some(Self::delta_prime(self.c_delta.clone()))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            regular: (self.regular.0.scale(s), self.regular.1.scale(s)),
            c_delta: &self.c_delta * s,
            c_delta_prime: &self.c_delta_prime * s,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.regular.0.is_zero() && self.regular.1.is_zero() && self.is_regular()
    }

    /// In `L²` iff no singular part remains.
    pub fn is_regular(&self) -> bool {
        self.c_delta.is_zero() && self.c_delta_prime.is_zero()
    }

    /// `max(|c_delta|, |c_delta_prime|)`.
    pub fn singular_norm(&self) -> Rational {
        self.c_delta.abs().max(self.c_delta_prime.abs())
    }
}

impl Add for &SingularDistribution {
    type Output = SingularDistribution;
    fn add(self, rhs: &SingularDistribution) -> SingularDistribution {
        SingularDistribution {
            regular: (&self.regular.0 + &rhs.regular.0, &self.regular.1 + &rhs.regular.1),
            c_delta: &self.c_delta + &rhs.c_delta,
            c_delta_prime: &self.c_delta_prime + &rhs.c_delta_prime,
        }
    }
}

impl Sub for &SingularDistribution {
    type Output = SingularDistribution;
    fn sub(self, rhs: &SingularDistribution) -> SingularDistribution {
        self + &(-rhs)
    }
}

impl Neg for &SingularDistribution {
    type Output = SingularDistribution;
    fn neg(self) -> SingularDistribution {
        SingularDistribution {
            regular: (-&self.regular.0, -&self.regular.1),
            c_delta: -&self.c_delta,
            c_delta_prime: -&self.c_delta_prime,
        }
    }
}

/// Polynomial representation of `V` on a neighbourhood of 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocalPotential(pub Poly);

impl LocalPotential {
    pub fn zero() -> Self {
        Self(Poly::zero())
    }

    /// Exact local polynomial for `V`, when `V` is polynomial near 0.
    pub fn from_potential(v: &Potential) -> Option<Self> {
        let exact = poly::exact_from_f64;
        match v.kind() {
            PotentialKind::Zero => Some(Self::zero()),
            PotentialKind::Harmonic { omega } => {
                let w = exact(*omega)?;
                Some(Self(Poly::new(vec![int(0), int(0), &w * &w])))
            }
            PotentialKind::SquareWell { depth, width } => {
                if *width > 0.0 {
                    Some(Self(Poly::constant(exact(*depth)?)))
                } else {
                    Some(Self::zero())
                }
            }
            PotentialKind::Tabulated { nodes } => {
                if nodes.iter().any(|(x, _)| *x == 0.0) {
                    // kink at the interface
                    return None;
                }
                let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
                if 0.0 < first.0 {
                    return Some(Self(Poly::constant(exact(first.1)?)));
                }
                if 0.0 > last.0 {
                    return Some(Self(Poly::constant(exact(last.1)?)));
                }
                let hi = nodes.partition_point(|&(x, _)| x < 0.0);
                let ((x0, v0), (x1, v1)) = (nodes[hi - 1], nodes[hi]);
                let (x0, v0, x1, v1) = (exact(x0)?, exact(v0)?, exact(x1)?, exact(v1)?);
                let slope = (&v1 - &v0) / (&x1 - &x0);
                let intercept = &v0 - &slope * &x0;
                Some(Self(Poly::new(vec![intercept, slope])))
            }
        }
    }
}

fn check_condition(p: &Poly, bc: &ExactBoundary) -> bool {
    match bc {
        ExactBoundary::Dirichlet => p.value_at_zero().is_zero(),
        ExactBoundary::Robin(lambda) => p.slope_at_zero() == lambda * p.value_at_zero(),
    }
}

/// Whether each piece satisfies its boundary condition at 0.
pub fn in_domain(
    psi: &PiecewisePolyState,
    bc_left: &ExactBoundary,
    bc_right: &ExactBoundary,
) -> (bool, bool) {
    (check_condition(&psi.p1, bc_left), check_condition(&psi.p2, bc_right))
}

fn schrodinger(p: &Poly, v: &LocalPotential) -> Poly {
    &(&v.0 * p) - &p.derivative().derivative()
}

/// `χ₁ H0 φ₁ + χ₂ H0 φ₂`: always regular.
pub fn apply_direct_sum(psi: &PiecewisePolyState, v: &LocalPotential) -> SingularDistribution {
    SingularDistribution::regular(schrodinger(&psi.p1, v), schrodinger(&psi.p2, v))
}

/// `H0 ψ` in the sense of distributions. Differentiating across the jump
/// gives `ψ'' = {φ''} + [ψ'] δ + [ψ] δ'` with `[f] = f(0⁺) - f(0⁻)`, and
/// `H0 = -d²/dx² + V`.
pub fn apply_h0_distributional(psi: &PiecewisePolyState, v: &LocalPotential) -> SingularDistribution {
    let jump_value = psi.p2.value_at_zero() - psi.p1.value_at_zero();
    let jump_slope = psi.p2.slope_at_zero() - psi.p1.slope_at_zero();
    let mut out = apply_direct_sum(psi, v);
    out.c_delta = -jump_slope;
    out.c_delta_prime = -jump_value;
    out
}

/// `(-1)^k` for region `k`.
fn region_sign(region: Region) -> Rational {
    match region {
        Region::Left => int(-1),
        Region::Right => int(1),
    }
}

/// `B_k^λ ψ`, assembled term by term from the δ-collapse rules.
pub fn apply_b(region: Region, bc: &ExactBoundary, psi: &PiecewisePolyState) -> SingularDistribution {
    let phi = psi.piece(region);
    let sign = region_sign(region);
    match bc {
        ExactBoundary::Dirichlet => {
            let dp = SingularDistribution::delta_prime_times(phi);
            let d = SingularDistribution::delta_times(phi);
            &(-&dp) + &d.scale(&sign)
        }
        ExactBoundary::Robin(lambda) => {
            let dp = SingularDistribution::delta_prime_times(phi);
            let d = SingularDistribution::delta_times(phi).scale(&(int(2) * lambda));
            let g = &phi.derivative() - &phi.scale(lambda);
            let composite = SingularDistribution::delta_times(&g)
                .derivative_of_delta()
                .expect("δ·g collapses to a pure δ term");
            &(&dp + &d) + &composite.scale(&sign)
        }
    }
}

/// Sign applied to `B₁` when forming the residual; only the verification
/// harness ever flips it, to show that a wrong sign is detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum B1Sign {
    #[default]
    Minus,
    Plus,
}

/// `(H0 - B₁ + B₂)ψ - H^{S†}ψ`. The regular part is always zero; the
/// singular part vanishes iff `ψ` satisfies both boundary conditions.
pub fn theorem2_residual(
    psi: &PiecewisePolyState,
    v: &LocalPotential,
    bc_left: &ExactBoundary,
    bc_right: &ExactBoundary,
) -> SingularDistribution {
    residual_with_sign(psi, v, bc_left, bc_right, B1Sign::Minus)
}

pub fn residual_with_sign(
    psi: &PiecewisePolyState,
    v: &LocalPotential,
    bc_left: &ExactBoundary,
    bc_right: &ExactBoundary,
    b1_sign: B1Sign,
) -> SingularDistribution {
    let h0 = apply_h0_distributional(psi, v);
    let b1 = apply_b(Region::Left, bc_left, psi);
    let b2 = apply_b(Region::Right, bc_right, psi);
    let direct = apply_direct_sum(psi, v);
    let with_b1 = match b1_sign {
        B1Sign::Minus => &h0 - &b1,
        B1Sign::Plus => &h0 + &b1,
    };
    &(&with_b1 + &b2) - &direct
}
