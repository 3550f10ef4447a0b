//! Randomized end-to-end check of the boundary-potential identity.
//!
//! For each `(λ₁, λ₂)` pair, random on-domain states must give an exactly
//! zero residual, and states that violate a boundary condition by `ε` must
//! give a nonzero singular residual that doubles exactly when `ε` doubles.
//! Each case is also paired with a random bump and compared against the
//! definition-level oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use num_traits::Zero;

use super::pairing::{oracle_residual, pair_with_test, Bump};
use super::{
    rational, residual_with_sign, B1Sign, ExactBoundary, LocalPotential, PiecewisePolyState, Poly,
    Rational, DEFAULT_MAX_DEGREE,
};
use crate::grid::Region;

/// Oracle/symbolic agreement required of every case.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub seed: u64,
    pub cases_per_pair: usize,
    pub lambdas: Vec<ExactBoundary>,
    pub max_degree: usize,
    pub window: f64,
    pub potential: LocalPotential,
    pub b1_sign: B1Sign,
}

impl SweepConfig {
    /// `λ ∈ {-5, -1, 0, 1, 5, ∞}` on both sides.
    pub fn standard_lambdas() -> Vec<ExactBoundary> {
        [-5, -1, 0, 1, 5]
            .into_iter()
            .map(|l| ExactBoundary::Robin(rational(l, 1)))
            .chain(std::iter::once(ExactBoundary::Dirichlet))
            .collect()
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            cases_per_pair: 200,
            lambdas: Self::standard_lambdas(),
            max_degree: DEFAULT_MAX_DEGREE,
            window: 1.0,
            potential: LocalPotential::zero(),
            b1_sign: B1Sign::Minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Report {
    pub seed: u64,
    pub lambda_pairs: usize,
    pub cases_on_domain: usize,
    pub cases_off_domain: usize,
    /// Largest `max(|c_δ|, |c_δ'|)` over on-domain cases, as an exact rational.
    pub max_on_domain_residue: String,
    /// Smallest residue norm over off-domain cases, as an exact rational.
    pub min_off_domain_residue_norm: Option<String>,
    pub oracle_max_deviation: f64,
    pub regular_part_failures: usize,
    pub linearity_failures: usize,
    pub contract_holds: bool,
}

pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    rational(rng.gen_range(-9..=9), rng.gen_range(1..=9))
}

pub fn random_nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    rational(sign * rng.gen_range(1..=9), rng.gen_range(1..=9))
}

/// Random polynomial of degree in `1..=max_degree` meeting `bc` at 0.
pub fn random_on_domain_poly<R: Rng>(rng: &mut R, bc: &ExactBoundary, max_degree: usize) -> Poly {
    let degree = rng.gen_range(1..=max_degree.max(1));
    let mut coeffs: Vec<Rational> = (0..=degree).map(|_| random_rational(rng)).collect();
    match bc {
        ExactBoundary::Dirichlet => coeffs[0] = Rational::zero(),
        ExactBoundary::Robin(lambda) => coeffs[1] = lambda * &coeffs[0],
    }
    Poly::new(coeffs)
}

/// The direction in which `bc` is broken: `x` for Robin (slope), `1` for
/// Dirichlet (value).
pub fn violation_direction(bc: &ExactBoundary) -> Poly {
    match bc {
        ExactBoundary::Dirichlet => Poly::from_ints(&[1]),
        ExactBoundary::Robin(_) => Poly::x(),
    }
}

pub fn random_bump<R: Rng>(rng: &mut R, window: f64) -> Bump {
    Bump {
        center: window * rng.gen_range(-0.4..0.4),
        radius: window * rng.gen_range(0.5..0.6),
        amplitude: rng.gen_range(0.5..2.0),
    }
}

struct Tally {
    on: usize,
    off: usize,
    max_on: Rational,
    min_off: Option<Rational>,
    oracle_dev: f64,
    regular_failures: usize,
    linearity_failures: usize,
}

impl Tally {
    fn check_oracle<R: Rng>(
        &mut self,
        rng: &mut R,
        cfg: &SweepConfig,
        psi: &PiecewisePolyState,
        bcs: (&ExactBoundary, &ExactBoundary),
        residual: &super::SingularDistribution,
    ) {
        let t = random_bump(rng, cfg.window);
        let symbolic = pair_with_test(residual, &t, cfg.window);
        let oracle = oracle_residual(psi, &cfg.potential, bcs.0, bcs.1, cfg.b1_sign, &t);
        self.oracle_dev = self.oracle_dev.max((symbolic - oracle).abs());
        if !(residual.regular.0.is_zero() && residual.regular.1.is_zero()) {
            self.regular_failures += 1;
        }
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Theorem2Report {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tally = Tally {
        on: 0,
        off: 0,
        max_on: Rational::zero(),
        min_off: None,
        oracle_dev: 0.0,
        regular_failures: 0,
        linearity_failures: 0,
    };
    let v = &cfg.potential;
    let residual = |psi: &PiecewisePolyState, bl: &ExactBoundary, br: &ExactBoundary| {
        residual_with_sign(psi, v, bl, br, cfg.b1_sign)
    };

    for bl in &cfg.lambdas {
        for br in &cfg.lambdas {
            for _ in 0..cfg.cases_per_pair {
                let base = PiecewisePolyState::new(
                    random_on_domain_poly(&mut rng, bl, cfg.max_degree),
                    random_on_domain_poly(&mut rng, br, cfg.max_degree),
                )
                .with_window(cfg.window);
                let r = residual(&base, bl, br);
                tally.on += 1;
                tally.max_on = tally.max_on.clone().max(r.singular_norm());
                tally.check_oracle(&mut rng, cfg, &base, (bl, br), &r);
            }
            for _ in 0..cfg.cases_per_pair {
                let base = PiecewisePolyState::new(
                    random_on_domain_poly(&mut rng, bl, cfg.max_degree),
                    random_on_domain_poly(&mut rng, br, cfg.max_degree),
                )
                .with_window(cfg.window);
                let eps = random_nonzero_rational(&mut rng);
                let broken = match rng.gen_range(0..3) {
                    0 => vec![Region::Left],
                    1 => vec![Region::Right],
                    _ => vec![Region::Left, Region::Right],
                };
                let perturb = |scale: &Rational| {
                    let mut psi = base.clone();
                    for region in &broken {
                        let (piece, bc) = match region {
                            Region::Left => (&mut psi.p1, bl),
                            Region::Right => (&mut psi.p2, br),
                        };
                        *piece = &*piece + &violation_direction(bc).scale(scale);
                    }
                    psi
                };
                let psi = perturb(&eps);
                let psi2 = perturb(&(&eps * rational(2, 1)));
                let r = residual(&psi, bl, br);
                let r2 = residual(&psi2, bl, br);
                tally.off += 1;
                let norm = r.singular_norm();
                tally.min_off = Some(match tally.min_off.take() {
                    Some(m) => m.min(norm),
                    None => norm,
                });
                if r2 != r.scale(&rational(2, 1)) {
                    tally.linearity_failures += 1;
                }
                tally.check_oracle(&mut rng, cfg, &psi, (bl, br), &r);
            }
        }
    }

    let min_off_positive = tally.min_off.as_ref().is_none_or(|m| !m.is_zero());
    let contract_holds = tally.max_on.is_zero()
        && min_off_positive
        && tally.regular_failures == 0
        && tally.linearity_failures == 0
        && tally.oracle_dev <= ORACLE_TOLERANCE;
    Theorem2Report {
        seed: cfg.seed,
        lambda_pairs: cfg.lambdas.len() * cfg.lambdas.len(),
        cases_on_domain: tally.on,
        cases_off_domain: tally.off,
        max_on_domain_residue: tally.max_on.to_string(),
        min_off_domain_residue_norm: tally.min_off.map(|m| m.to_string()),
        oracle_max_deviation: tally.oracle_dev,
        regular_part_failures: tally.regular_failures,
        linearity_failures: tally.linearity_failures,
        contract_holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_holds() {
        let cfg = SweepConfig {
            cases_per_pair: 5,
            ..SweepConfig::default()
        };
        let report = run_sweep(&cfg);
        assert!(report.contract_holds, "{report:?}");
        assert_eq!(report.max_on_domain_residue, "0");
        assert_eq!(report.cases_on_domain, 36 * 5);
        assert_eq!(report.lambda_pairs, 36);
    }

    #[test]
    fn flipped_sign_breaks_contract() {
        let cfg = SweepConfig {
            cases_per_pair: 3,
            b1_sign: B1Sign::Plus,
            ..SweepConfig::default()
        };
        let report = run_sweep(&cfg);
        assert!(!report.contract_holds);
        assert_ne!(report.max_on_domain_residue, "0");
        // The oracle tracks the flipped operator too.
        assert!(report.oracle_max_deviation <= ORACLE_TOLERANCE);
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = SweepConfig {
            cases_per_pair: 2,
            seed: 42,
            ..SweepConfig::default()
        };
        assert_eq!(run_sweep(&cfg), run_sweep(&cfg));
    }
}
