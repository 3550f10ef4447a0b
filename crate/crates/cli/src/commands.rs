//! Subcommand bodies. Each returns its data file as a string; `main` decides
//! where it goes.

use std::fmt::Write as _;

use confinement::boundary::sweep::{run_sweep, Theorem2Report};
use confinement::dynamics::{evolve_with_state, gaussian_packet, PropagatorConfig};
use confinement::grid::{BoundaryParam, Grid, Region};
use confinement::operator::{ConfinedHamiltonian, GlobalHamiltonian, Hamiltonian};
use confinement::potential::Potential;
use confinement::spectral::{eigen_confined, eigen_tridiagonal, residual};

use crate::config::ScenarioConfig;
use crate::CliError;

/// Probability within `2h` of `±L` above which a run is flagged.
pub const EDGE_WARNING_THRESHOLD: f64 = 1e-8;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_lambda(bc: BoundaryParam) -> String {
    match bc {
        BoundaryParam::Robin(l) => fmt_f64(l),
        BoundaryParam::Dirichlet => "inf".into(),
    }
}

fn warn_on_growth(v: &Potential, grid: &Grid) {
    let l = grid.half_width();
    if let Some(x) = v.growth_violation(0.5 * l, l, 64) {
        log::warn!("potential falls below -k x^2 at x = {x} (k = {})", v.quad_bound_k());
    }
}

pub fn spectrum(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let grid = cfg.grid()?;
    let v = cfg.potential()?;
    let (bl, br) = cfg.bcs()?;
    let count = cfg.spectrum()?.count;
    warn_on_growth(&v, &grid);

    let h = ConfinedHamiltonian::build(grid, &v, bl, br);
    let mut out = String::from("index,region,eigenvalue,residual\n");
    if count == 0 {
        return Ok(out);
    }
    let dec = eigen_confined(&h, count)?;
    for i in 0..dec.len() {
        let r = residual(&h, dec.eigenvalues[i], &dec.state(i)?)?;
        writeln!(
            out,
            "{i},{},{},{}",
            dec.tags[i].as_str(),
            fmt_f64(dec.eigenvalues[i]),
            fmt_f64(r)
        )
        .unwrap();
    }
    Ok(out)
}

pub fn evolve(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let grid = cfg.grid()?;
    let v = cfg.potential()?;
    let e = cfg.evolve()?;
    warn_on_growth(&v, &grid);
    let prop = PropagatorConfig {
        dt: e.dt.unwrap_or_else(|| PropagatorConfig::default_dt(&grid)),
        n_steps: e.n_steps,
        record_every: e.record_every,
        keep_snapshots: false,
    };
    prop.validate()?;

    let traj = if e.global {
        let h = GlobalHamiltonian::build(grid, &v);
        let psi = gaussian_packet(*h.layout(), e.x0, e.p0, e.sigma, e.confine_to_region)?;
        evolve_with_state(&h, &psi, &prop)?.0
    } else {
        let (bl, br) = cfg.bcs()?;
        let h = ConfinedHamiltonian::build(grid, &v, bl, br);
        let psi = gaussian_packet(*h.layout(), e.x0, e.p0, e.sigma, e.confine_to_region)?;
        evolve_with_state(&h, &psi, &prop)?.0
    };
    if traj.max_edge_prob > EDGE_WARNING_THRESHOLD {
        log::warn!(
            "wave function reached the walls at ±L: probability {:e} within 2h of the edge",
            traj.max_edge_prob
        );
    }

    let mut out = String::from("t,norm,prob_region1,prob_region2,energy\n");
    for i in 0..traj.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(traj.times[i]),
            fmt_f64(traj.norms[i]),
            fmt_f64(traj.region1_prob[i]),
            fmt_f64(traj.region2_prob[i]),
            fmt_f64(traj.energy[i])
        )
        .unwrap();
    }
    Ok(out)
}

pub fn sweep_lambda(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let grid = cfg.grid()?;
    let v = cfg.potential()?;
    let sweep = cfg.sweep()?;
    let side = Region::from(sweep.side);
    warn_on_growth(&v, &grid);

    let mut out = String::from("lambda,eigen_index,eigenvalue\n");
    for lambda in &sweep.lambdas {
        let bc = lambda.0;
        let (bl, br) = match side {
            Region::Left => (bc, BoundaryParam::Dirichlet),
            Region::Right => (BoundaryParam::Dirichlet, bc),
        };
        let h = ConfinedHamiltonian::build(grid, &v, bl, br);
        let block = h.block(side);
        let count = sweep.count.min(block.dim());
        let dec = eigen_tridiagonal(block.diag(), block.offdiag(), count)?;
        for (j, e) in dec.eigenvalues.iter().enumerate() {
            writeln!(out, "{},{j},{}", fmt_lambda(bc), fmt_f64(*e)).unwrap();
        }
    }
    Ok(out)
}

pub fn verify_theorem2(cfg: &ScenarioConfig, seed: Option<u64>) -> Result<(String, Theorem2Report), CliError> {
    let sweep = cfg.theorem2(seed)?;
    let report = run_sweep(&sweep);
    let mut json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Numerical(format!("cannot serialize report: {e}")))?;
    json.push('\n');
    Ok((json, report))
}
