//! Scenario files: one TOML document per invocation.
//!
//! ```toml
//! [grid]
//! L = 1.0
//! n_per_side = 400
//!
//! [potential]
//! kind = "harmonic"
//! omega = 1.0
//!
//! [bc]
//! lambda_left = 0.0
//! lambda_right = "inf"
//!
//! [spectrum]
//! count = 3
//! ```

use std::fmt;
use std::path::Path;

use confinement::boundary::sweep::SweepConfig;
use confinement::boundary::{B1Sign, LocalPotential};
use confinement::grid::{BoundaryParam, Grid, Region};
use confinement::potential::Potential;
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub grid: Option<GridConfig>,
    pub potential: Option<PotentialShape>,
    pub bc: Option<BcConfig>,
    pub spectrum: Option<SpectrumConfig>,
    pub evolve: Option<EvolveConfig>,
    pub sweep: Option<SweepLadderConfig>,
    pub theorem2: Option<Theorem2Config>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n_per_side: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialShape {
    Zero,
    Harmonic { omega: f64 },
    SquareWell { depth: f64, width: f64 },
    Tabulated { nodes: Vec<(f64, f64)> },
}

/// `λ` as written in a scenario: a number, or `"inf"` for Dirichlet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda(pub BoundaryParam);

impl<'de> Deserialize<'de> for Lambda {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct LambdaVisitor;

        impl Visitor<'_> for LambdaVisitor {
            type Value = Lambda;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a finite number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Lambda, E> {
                BoundaryParam::robin(v).map(Lambda).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Lambda, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Lambda, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Lambda, E> {
                if v == "inf" {
                    Ok(Lambda(BoundaryParam::Dirichlet))
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        d.deserialize_any(LambdaVisitor)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcConfig {
    pub lambda_left: Lambda,
    pub lambda_right: Lambda,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub count: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub x0: f64,
    pub p0: f64,
    pub sigma: f64,
    /// Defaults to `h²/2`.
    pub dt: Option<f64>,
    pub n_steps: usize,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default)]
    pub confine_to_region: bool,
    #[serde(default)]
    pub global: bool,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    #[default]
    Right,
}

impl From<Side> for Region {
    fn from(s: Side) -> Self {
        match s {
            Side::Left => Region::Left,
            Side::Right => Region::Right,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepLadderConfig {
    pub lambdas: Vec<Lambda>,
    /// Which block carries the swept boundary condition.
    #[serde(default)]
    pub side: Side,
    /// Eigenvalues reported per ladder entry.
    #[serde(default = "one")]
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem2Config {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cases")]
    pub cases_per_pair: usize,
    #[serde(default = "default_max_degree")]
    pub max_degree: usize,
    /// Debug knob: adds `B₁` instead of subtracting it.
    #[serde(default)]
    pub flip_b1_sign: bool,
}

impl Default for Theorem2Config {
    fn default() -> Self {
        Self {
            seed: 0,
            cases_per_pair: default_cases(),
            max_degree: default_max_degree(),
            flip_b1_sign: false,
        }
    }
}

fn default_cases() -> usize {
    200
}

fn default_max_degree() -> usize {
    confinement::boundary::DEFAULT_MAX_DEGREE
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        let g = self.grid.ok_or_else(|| missing("grid"))?;
        Ok(Grid::new(g.half_width, g.n_per_side)?)
    }

    /// `V = 0` when the block is absent.
    pub fn potential(&self) -> Result<Potential, CliError> {
        let Some(p) = &self.potential else {
            return Ok(Potential::zero());
        };
        Ok(match p {
            PotentialShape::Zero => Potential::zero(),
            PotentialShape::Harmonic { omega } => Potential::harmonic(*omega)?,
            PotentialShape::SquareWell { depth, width } => Potential::square_well(*depth, *width)?,
            PotentialShape::Tabulated { nodes } => Potential::tabulated(nodes.clone())?,
        })
    }

    pub fn bcs(&self) -> Result<(BoundaryParam, BoundaryParam), CliError> {
        let bc = self.bc.ok_or_else(|| missing("bc"))?;
        Ok((bc.lambda_left.0, bc.lambda_right.0))
    }

    pub fn spectrum(&self) -> Result<SpectrumConfig, CliError> {
        self.spectrum.ok_or_else(|| missing("spectrum"))
    }

    pub fn evolve(&self) -> Result<EvolveConfig, CliError> {
        self.evolve.ok_or_else(|| missing("evolve"))
    }

    pub fn sweep(&self) -> Result<&SweepLadderConfig, CliError> {
        let s = self.sweep.as_ref().ok_or_else(|| missing("sweep"))?;
        if s.lambdas.is_empty() {
            return Err(CliError::Config("[sweep] lambdas must not be empty".into()));
        }
        Ok(s)
    }

    /// Randomized-suite settings; `seed_override` comes from `--seed`.
    pub fn theorem2(&self, seed_override: Option<u64>) -> Result<SweepConfig, CliError> {
        let t = self.theorem2.clone().unwrap_or_default();
        if t.cases_per_pair == 0 || t.max_degree == 0 {
            return Err(CliError::Config(
                "[theorem2] cases_per_pair and max_degree must be >= 1".into(),
            ));
        }
        let potential = LocalPotential::from_potential(&self.potential()?).ok_or_else(|| {
            CliError::Config("potential has no exact polynomial form near x = 0".into())
        })?;
        Ok(SweepConfig {
            seed: seed_override.unwrap_or(t.seed),
            cases_per_pair: t.cases_per_pair,
            max_degree: t.max_degree,
            potential,
            b1_sign: if t.flip_b1_sign { B1Sign::Plus } else { B1Sign::Minus },
            ..SweepConfig::default()
        })
    }
}

fn missing(block: &str) -> CliError {
    CliError::Config(format!("missing [{block}] block"))
}
