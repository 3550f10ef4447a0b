//! Numerical pairing of distributions with smooth test functions.
//!
//! [`pair_with_test`] evaluates `⟨d, t⟩` for a symbolic distribution. The
//! `oracle_*` functions compute the same pairings straight from the
//! definitions (`⟨H0ψ, t⟩ = ⟨ψ, H0 t⟩`, `⟨δ'f, t⟩ = -(ft)'(0)`,
//! `⟨(δg)', t⟩ = -g(0)t'(0)`), without the δ-collapse algebra, so the two
//! routes check each other.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use super::poly::{to_f64, FloatPoly};
use super::{B1Sign, ExactBoundary, LocalPotential, PiecewisePolyState, SingularDistribution};
use crate::grid::Region;

const GAUSS_POINTS: usize = 20;
const PANELS: usize = 48;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(GAUSS_POINTS).unwrap()))
}

/// Composite Gauss–Legendre quadrature of `f` over `[a, b]`.
pub fn integrate(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let width = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let lo = a + i as f64 * width;
            rule().integrate(lo, lo + width, &f)
        })
        .sum()
}

/// Smooth, compactly supported test function with its first two derivatives.
pub trait TestFunction {
    fn value(&self, x: f64) -> f64;
    fn d1(&self, x: f64) -> f64;
    fn d2(&self, x: f64) -> f64;
    /// Closed support interval.
    fn support(&self) -> (f64, f64);
}

/// `A · exp(-1 / (1 - u²))` with `u = (x - c) / r`, zero for `|u| ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub radius: f64,
    pub amplitude: f64,
}

impl Bump {
    fn parts(&self, x: f64) -> Option<(f64, f64, f64)> {
        let u = (x - self.center) / self.radius;
        let s = 1.0 - u * u;
        if s <= 0.0 {
            return None;
        }
        let value = self.amplitude * (-1.0 / s).exp();
        // g(u) = -1/(1-u²): g' = -2u/s², g'' = -2/s² - 8u²/s³
        let g1 = -2.0 * u / (s * s);
        let g2 = -2.0 / (s * s) - 8.0 * u * u / (s * s * s);
        Some((value, g1, g2))
    }
}

impl TestFunction for Bump {
    fn value(&self, x: f64) -> f64 {
        self.parts(x).map_or(0.0, |(v, _, _)| v)
    }

    fn d1(&self, x: f64) -> f64 {
        self.parts(x).map_or(0.0, |(v, g1, _)| v * g1 / self.radius)
    }

    fn d2(&self, x: f64) -> f64 {
        self.parts(x)
            .map_or(0.0, |(v, g1, g2)| v * (g1 * g1 + g2) / (self.radius * self.radius))
    }

    fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }
}

/// `∫_{-a}^{0} f_left t + ∫_{0}^{a} f_right t`, clipped to the support of `t`.
fn integrate_pieces<T: TestFunction + ?Sized>(
    t: &T,
    window: f64,
    left: impl Fn(f64) -> f64,
    right: impl Fn(f64) -> f64,
) -> f64 {
    let (lo, hi) = t.support();
    integrate(lo.max(-window), hi.min(0.0), left) + integrate(lo.max(0.0), hi.min(window), right)
}

/// `⟨d, t⟩ = ∫ regular · t + c_δ t(0) - c_δ' t'(0)`.
pub fn pair_with_test<T: TestFunction + ?Sized>(d: &SingularDistribution, t: &T, window: f64) -> f64 {
    let (left, right) = (d.regular.0.to_f64(), d.regular.1.to_f64());
    let regular = integrate_pieces(
        t,
        window,
        |x| left.eval(x) * t.value(x),
        |x| right.eval(x) * t.value(x),
    );
    regular + to_f64(&d.c_delta) * t.value(0.0) - to_f64(&d.c_delta_prime) * t.d1(0.0)
}

/// `⟨H0ψ, t⟩ := ∫ ψ (-t'' + V t)`.
pub fn oracle_h0<T: TestFunction + ?Sized>(psi: &PiecewisePolyState, v: &LocalPotential, t: &T) -> f64 {
    let (p1, p2, vf) = (psi.p1.to_f64(), psi.p2.to_f64(), v.0.to_f64());
    let h0t = |x: f64| -t.d2(x) + vf.eval(x) * t.value(x);
    integrate_pieces(t, psi.window, |x| p1.eval(x) * h0t(x), |x| p2.eval(x) * h0t(x))
}

/// `⟨χ₁ H0 φ₁ + χ₂ H0 φ₂, t⟩`, with `H0 φ_k` evaluated pointwise in
/// floating point.
pub fn oracle_direct_sum<T: TestFunction + ?Sized>(
    psi: &PiecewisePolyState,
    v: &LocalPotential,
    t: &T,
) -> f64 {
    let (p1, p2, vf) = (psi.p1.to_f64(), psi.p2.to_f64(), v.0.to_f64());
    let act = |p: &FloatPoly, x: f64| -second_derivative(p, x) + vf.eval(x) * p.eval(x);
    integrate_pieces(t, psi.window, |x| act(&p1, x) * t.value(x), |x| act(&p2, x) * t.value(x))
}

/// Exact second derivative of a float polynomial (coefficient-wise).
fn second_derivative(p: &FloatPoly, x: f64) -> f64 {
    p.0.iter()
        .enumerate()
        .skip(2)
        .rev()
        .fold(0.0, |acc, (i, c)| acc * x + c * (i * (i - 1)) as f64)
}

fn first_derivative(p: &FloatPoly, x: f64) -> f64 {
    p.0.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (i, c)| acc * x + c * i as f64)
}

/// `⟨B_k^λ ψ, t⟩` straight from the definitions of `δ̂_k`, `δ̂_k'` and the
/// distributional derivative.
pub fn oracle_b<T: TestFunction + ?Sized>(
    region: Region,
    bc: &ExactBoundary,
    psi: &PiecewisePolyState,
    t: &T,
) -> f64 {
    let phi = psi.piece(region).to_f64();
    let (f0, f1) = (phi.eval(0.0), first_derivative(&phi, 0.0));
    let (t0, t1) = (t.value(0.0), t.d1(0.0));
    let sign = match region {
        Region::Left => -1.0,
        Region::Right => 1.0,
    };
    // ⟨δ'(x) φ, t⟩ = -(φ t)'(0),  ⟨δ(x) φ, t⟩ = φ(0) t(0)
    let delta_prime_phi = -(f1 * t0 + f0 * t1);
    let delta_phi = f0 * t0;
    match bc {
        ExactBoundary::Dirichlet => -delta_prime_phi + sign * delta_phi,
        ExactBoundary::Robin(lambda) => {
            let lambda = to_f64(lambda);
            // ⟨(δ g)', t⟩ = -⟨δ g, t'⟩ = -g(0) t'(0),  g = φ' - λφ
            let composite = -(f1 - lambda * f0) * t1;
            delta_prime_phi + 2.0 * lambda * delta_phi + sign * composite
        }
    }
}

/// Oracle value of `⟨(H0 ∓ B₁ + B₂ - H^{S†})ψ, t⟩`.
pub fn oracle_residual<T: TestFunction + ?Sized>(
    psi: &PiecewisePolyState,
    v: &LocalPotential,
    bc_left: &ExactBoundary,
    bc_right: &ExactBoundary,
    b1_sign: B1Sign,
    t: &T,
) -> f64 {
    let s1 = match b1_sign {
        B1Sign::Minus => -1.0,
        B1Sign::Plus => 1.0,
    };
    oracle_h0(psi, v, t) + s1 * oracle_b(Region::Left, bc_left, psi, t)
        + oracle_b(Region::Right, bc_right, psi, t)
        - oracle_direct_sum(psi, v, t)
}
