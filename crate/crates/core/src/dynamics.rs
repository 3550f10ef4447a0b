//! Cayley (Crank–Nicolson) time evolution and region observables.
//!
//! One step is `ψ⁺ = (I + i·dt/2·H)⁻¹ (I − i·dt/2·H) ψ`, solved block by
//! block with the Thomas algorithm. The map is unitary for any `dt`, and on a
//! confined operator the two blocks never exchange amplitude: a state
//! supported in one region stays there bit for bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, Layout, Region};
use crate::operator::Hamiltonian;
use crate::wavefunction::WaveFunction;

/// Normalized Gaussian `exp(-(x - x0)²/(4σ²) + i p0 x)` sampled on `layout`.
///
/// With `confine` set, amplitudes outside the region containing `x0` are
/// zeroed before normalization, making the packet an exact eigenstate of
/// the discrete projector.
pub fn gaussian_packet(
    layout: Layout,
    x0: f64,
    p0: f64,
    sigma: f64,
    confine: bool,
) -> Result<WaveFunction> {
    let grid = layout.grid();
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Config(format!("packet width must be > 0, got {sigma}")));
    }
    if !(x0.is_finite() && x0.abs() < grid.half_width()) || !p0.is_finite() {
        return Err(Error::Config(format!(
            "packet centre must lie inside (-L, L) = (-{0}, {0}), got {x0}",
            grid.half_width()
        )));
    }
    if sigma < 2.0 * grid.spacing() {
        log::warn!(
            "packet width {sigma} is below 2h = {}; the packet is under-resolved",
            2.0 * grid.spacing()
        );
    }
    let mut psi = WaveFunction::from_fn(layout, |x| {
        let envelope = -(x - x0).powi(2) / (4.0 * sigma * sigma);
        Complex64::from_polar(envelope.exp(), p0 * x)
    });
    if confine {
        let region = if x0 < 0.0 {
            Region::Left
        } else if x0 > 0.0 {
            Region::Right
        } else {
            return Err(Error::Config(
                "a packet centred on the interface has no region to be confined to".into(),
            ));
        };
        psi = psi.project_region(region);
    }
    psi.normalize()?;
    Ok(psi)
}

/// Thomas factorization of `I + i·a·T` for one block.
#[derive(Debug, Clone)]
struct BlockSolver {
    slots: std::ops::Range<usize>,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    a: f64,
    /// Elimination multipliers `m_j = b_{j-1} / w_{j-1}`.
    mult: Vec<Complex64>,
    /// Pivots `w_j`.
    pivot: Vec<Complex64>,
}

impl BlockSolver {
    fn new(
        slots: std::ops::Range<usize>,
        diag: &[f64],
        offdiag: &[f64],
        a: f64,
    ) -> Result<Self> {
        let n = diag.len();
        let upper = |j: usize| Complex64::new(0.0, a * offdiag[j]);
        let mut pivot = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n);
        pivot.push(Complex64::new(1.0, a * diag[0]));
        mult.push(Complex64::new(0.0, 0.0));
        for j in 1..n {
            let m = upper(j - 1) / pivot[j - 1];
            mult.push(m);
            pivot.push(Complex64::new(1.0, a * diag[j]) - m * upper(j - 1));
        }
        if let Some(j) = pivot.iter().position(|w| w.norm() == 0.0 || !w.is_finite()) {
            return Err(Error::Numerical(format!("singular Cayley pivot at block row {j}")));
        }
        Ok(Self {
            slots,
            diag: diag.to_vec(),
            offdiag: offdiag.to_vec(),
            a,
            mult,
            pivot,
        })
    }

    /// Overwrites `psi` (this block's slots) with `(I + iaT)⁻¹(I − iaT) psi`.
    fn step(&self, psi: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let n = self.diag.len();
        let minus_ia = Complex64::new(0.0, -self.a);
        scratch.clear();
        for j in 0..n {
            let mut t = psi[j] * self.diag[j];
            if j > 0 {
                t += psi[j - 1] * self.offdiag[j - 1];
            }
            if j + 1 < n {
                t += psi[j + 1] * self.offdiag[j];
            }
            scratch.push(psi[j] + minus_ia * t);
        }
        for j in 1..n {
            let prev = scratch[j - 1];
            scratch[j] -= self.mult[j] * prev;
        }
        psi[n - 1] = scratch[n - 1] / self.pivot[n - 1];
        for j in (0..n - 1).rev() {
            let upper = Complex64::new(0.0, self.a * self.offdiag[j]);
            psi[j] = (scratch[j] - upper * psi[j + 1]) / self.pivot[j];
        }
    }
}

/// Pre-factored Cayley propagator for a fixed operator and time step.
#[derive(Debug, Clone)]
pub struct CayleyPropagator {
    layout: Layout,
    dt: f64,
    blocks: Vec<BlockSolver>,
}

impl CayleyPropagator {
    pub fn new<H: Hamiltonian>(h: &H, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("time step must be > 0, got {dt}")));
        }
        let blocks = h
            .blocks()
            .into_iter()
            .map(|b| BlockSolver::new(b.slots, b.matrix.diag(), b.matrix.offdiag(), 0.5 * dt))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            layout: *h.layout(),
            dt,
            blocks,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step_in_place(&self, psi: &mut WaveFunction) -> Result<()> {
        if psi.layout() != &self.layout {
            return Err(Error::LayoutMismatch);
        }
        let mut scratch = Vec::new();
        let amps = psi.amplitudes_mut();
        for b in &self.blocks {
            b.step(&mut amps[b.slots.clone()], &mut scratch);
        }
        Ok(())
    }
}

/// One Cayley step of size `dt`.
pub fn cayley_step<H: Hamiltonian>(h: &H, psi: &WaveFunction, dt: f64) -> Result<WaveFunction> {
    let prop = CayleyPropagator::new(h, dt)?;
    let mut out = psi.clone();
    prop.step_in_place(&mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub record_every: usize,
    #[serde(default)]
    pub keep_snapshots: bool,
}

impl PropagatorConfig {
    /// `h²/2`, accurate for packets transported across the grid.
    pub fn default_dt(grid: &Grid) -> f64 {
        0.5 * grid.spacing().powi(2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.n_steps == 0 || self.record_every == 0 {
            return Err(Error::Config("n_steps and record_every must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub region1_prob: Vec<f64>,
    pub region2_prob: Vec<f64>,
    pub energy: Vec<f64>,
    /// Largest probability found within `2h` of the walls at `±L`, over all
    /// recorded states.
    pub max_edge_prob: f64,
    pub snapshots: Option<Vec<WaveFunction>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn record<H: Hamiltonian>(&mut self, h: &H, t: f64, psi: &WaveFunction) -> Result<()> {
        self.times.push(t);
        self.norms.push(psi.norm());
        self.region1_prob.push(psi.region_probability(Region::Left)?);
        self.region2_prob.push(psi.region_probability(Region::Right)?);
        self.energy.push(h.energy(psi)?);
        self.max_edge_prob = self.max_edge_prob.max(edge_probability(psi));
        if let Some(s) = self.snapshots.as_mut() {
            s.push(psi.clone());
        }
        Ok(())
    }
}

/// Probability carried by nodes within `2h` of the walls.
pub fn edge_probability(psi: &WaveFunction) -> f64 {
    let grid = *psi.layout().grid();
    let cutoff = grid.half_width() - 2.0 * grid.spacing() * (1.0 + 1e-9);
    let edge: f64 = psi
        .layout()
        .positions()
        .zip(psi.amplitudes())
        .filter(|(x, _)| x.abs() >= cutoff)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let total = psi.norm_sqr();
    if total == 0.0 {
        0.0
    } else {
        edge * grid.spacing() / total
    }
}

/// Repeated Cayley steps from `psi0`, recording observables at `t = 0` and
/// after every `record_every` steps.
pub fn evolve<H: Hamiltonian>(
    h: &H,
    psi0: &WaveFunction,
    config: &PropagatorConfig,
) -> Result<Trajectory> {
    evolve_with_state(h, psi0, config).map(|(traj, _)| traj)
}

/// Evolves and also returns the final state.
pub fn evolve_with_state<H: Hamiltonian>(
    h: &H,
    psi0: &WaveFunction,
    config: &PropagatorConfig,
) -> Result<(Trajectory, WaveFunction)> {
    config.validate()?;
    let prop = CayleyPropagator::new(h, config.dt)?;
    let mut traj = Trajectory {
        snapshots: config.keep_snapshots.then(Vec::new),
        ..Trajectory::default()
    };
    let mut psi = psi0.clone();
    traj.record(h, 0.0, &psi)?;
    for step in 1..=config.n_steps {
        prop.step_in_place(&mut psi)?;
        if step % config.record_every == 0 {
            traj.record(h, step as f64 * config.dt, &psi)?;
        }
    }
    Ok((traj, psi))
}
