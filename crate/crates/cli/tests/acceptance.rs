//! Acceptance suite: one PASS/FAIL line per criterion, then a single assert.
//!
//! Run with `cargo test -p confinement-cli --test acceptance -- --nocapture`
//! to see the report.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use confinement::boundary::sweep::{run_sweep, SweepConfig};
use confinement::dynamics::{evolve, gaussian_packet, PropagatorConfig};
use confinement::grid::{BoundaryParam, Grid, Layout, Region};
use confinement::operator::{ConfinedHamiltonian, GlobalHamiltonian, Hamiltonian};
use confinement::potential::Potential;
use confinement::spectral::{eigen, eigen_tridiagonal, robin_box_levels};
use confinement::WaveFunction;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

fn random_state<R: Rng>(rng: &mut R, layout: Layout) -> WaveFunction {
    let amps = (0..layout.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    WaveFunction::new(layout, amps).unwrap()
}

fn ladder() -> Vec<BoundaryParam> {
    [-5.0, 0.0, 1.0, 1e4]
        .into_iter()
        .map(BoundaryParam::Robin)
        .chain([BoundaryParam::Dirichlet])
        .collect()
}

fn confined_family(grid: Grid, v: &Potential) -> Vec<ConfinedHamiltonian> {
    let mut out = Vec::new();
    for &bl in &ladder() {
        for &br in &ladder() {
            out.push(ConfinedHamiltonian::build(grid, v, bl, br));
        }
    }
    out
}

/// `|⟨Hφ, ψ⟩ - ⟨φ, Hψ⟩|`, relative to `‖Hφ‖‖ψ‖ + ‖φ‖‖Hψ‖`.
fn symmetry_gap<H: Hamiltonian>(h: &H, phi: &WaveFunction, psi: &WaveFunction) -> f64 {
    let (hphi, hpsi) = (h.apply(phi).unwrap(), h.apply(psi).unwrap());
    let gap = (hphi.inner(psi).unwrap() - phi.inner(&hpsi).unwrap()).norm();
    gap / (hphi.norm() * psi.norm() + phi.norm() * hpsi.norm())
}

fn criterion_1() -> Outcome {
    let grid = Grid::new(1.0, 400).unwrap();
    let v = Potential::harmonic(2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut max_defect, mut max_gap) = (0.0f64, 0.0f64);
    let global = GlobalHamiltonian::build(grid, &v);
    let mut check = |h: &dyn Fn(&WaveFunction, &WaveFunction) -> f64, defect: f64, layout: Layout| {
        max_defect = max_defect.max(defect);
        for _ in 0..100 {
            let (a, b) = (random_state(&mut rng, layout), random_state(&mut rng, layout));
            max_gap = max_gap.max(h(&a, &b));
        }
    };
    for h in confined_family(grid, &v) {
        check(&|a, b| symmetry_gap(&h, a, b), h.symmetry_defect(), *h.layout());
    }
    check(&|a, b| symmetry_gap(&global, a, b), global.symmetry_defect(), *global.layout());
    Outcome {
        pass: max_defect == 0.0 && max_gap < 1e-12,
        detail: format!("26 operators, defect {max_defect}, max relative gap {max_gap:.2e}"),
    }
}

fn criterion_2() -> Outcome {
    let grid = Grid::new(1.0, 400).unwrap();
    let v = Potential::square_well(-3.0, 0.6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut nonzero = 0usize;
    let family = confined_family(grid, &v);
    for i in 0..100 {
        let h = &family[i % family.len()];
        let psi = random_state(&mut rng, *h.layout());
        for region in [Region::Left, Region::Right] {
            let c = h.commutator_projector(&psi, region).unwrap();
            nonzero += c.amplitudes().iter().filter(|a| a.re != 0.0 || a.im != 0.0).count();
        }
    }
    Outcome {
        pass: nonzero == 0,
        detail: format!("100 states x 2 regions, {nonzero} nonzero entries"),
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0usize;
    let ladder = ladder();
    for _ in 0..50 {
        let grid = Grid::new(rng.gen_range(0.5..4.0), rng.gen_range(5..300)).unwrap();
        let v = match rng.gen_range(0..3) {
            0 => Potential::zero(),
            1 => Potential::harmonic(rng.gen_range(0.1..3.0)).unwrap(),
            _ => Potential::square_well(rng.gen_range(-5.0..5.0), rng.gen_range(0.1..1.0)).unwrap(),
        };
        let (bl, br) = (ladder[rng.gen_range(0..5)], ladder[rng.gen_range(0..5)]);
        let global = GlobalHamiltonian::build(grid, &v);
        let confined = ConfinedHamiltonian::build(grid, &v, bl, br);
        let (h, l) = (grid.spacing(), grid.half_width());
        let margin = 2.0 * h * (1.0 + 1e-9);
        let layout = *global.layout();
        let amps = layout
            .positions()
            .map(|x| {
                if x.abs() <= margin || x.abs() >= l - margin {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                }
            })
            .collect();
        let psi = WaveFunction::new(layout, amps).unwrap();
        let from_global = global.apply(&psi).unwrap();
        let from_confined = confined
            .apply(&psi.transfer_to(*confined.layout()).unwrap())
            .unwrap();
        if from_global.transfer_to(*confined.layout()).unwrap() != from_confined
            || from_confined.transfer_to(layout).unwrap() != from_global
        {
            mismatches += 1;
        }
    }
    Outcome {
        pass: mismatches == 0,
        detail: format!("50 cases, {mismatches} with any differing entry"),
    }
}

fn criterion_4() -> Outcome {
    let grid = Grid::new(4.0, 400).unwrap();
    let v = Potential::zero();
    let cfg = PropagatorConfig { dt: 1.25e-5, n_steps: 10_000, record_every: 1, keep_snapshots: false };
    let h = ConfinedHamiltonian::build(grid, &v, BoundaryParam::Robin(1.0), BoundaryParam::Dirichlet);
    let psi = gaussian_packet(*h.layout(), -1.0, 5.0, 0.2, true).unwrap();
    let traj = evolve(&h, &psi, &cfg).unwrap();
    let all_confined = traj.region1_prob.iter().all(|&p| p == 1.0);
    let n0 = traj.norms[0];
    let drift = traj.norms.iter().map(|n| (n - n0).abs()).fold(0.0, f64::max);
    let step_drift = traj.norms.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);

    let global = GlobalHamiltonian::build(grid, &v);
    let psi = gaussian_packet(*global.layout(), -1.0, 5.0, 0.2, true).unwrap();
    let leak = *evolve(&global, &psi, &cfg).unwrap().region2_prob.last().unwrap();
    Outcome {
        pass: all_confined && drift < 1e-8 && step_drift < 1e-12 && leak > 0.1,
        detail: format!(
            "prob_region1 == 1 at all {} records: {all_confined}; norm drift {drift:.2e} \
             (per step {step_drift:.2e}); global final prob_region2 {leak:.4}",
            traj.len()
        ),
    }
}

fn right_levels(n: usize, l: f64, v: &Potential, bc: BoundaryParam, count: usize) -> Vec<f64> {
    let h = ConfinedHamiltonian::build(Grid::new(l, n).unwrap(), v, BoundaryParam::Dirichlet, bc);
    let b = h.block(Region::Right);
    eigen_tridiagonal(b.diag(), b.offdiag(), count).unwrap().eigenvalues
}

fn criterion_5() -> Outcome {
    let zero = Potential::zero();
    let d = BoundaryParam::Dirichlet;
    let errors: Vec<f64> = [100, 200, 400]
        .into_iter()
        .map(|n| (right_levels(n, 1.0, &zero, d, 1)[0] - PI * PI).abs())
        .collect();
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    let box_ok = errors[2] / (PI * PI) < 1e-3 && ratios.iter().all(|r| (3.5..=4.5).contains(r));

    let neumann = right_levels(400, 1.0, &zero, BoundaryParam::Robin(0.0), 1)[0];
    let neumann_oracle = robin_box_levels(1.0, BoundaryParam::Robin(0.0), 1).unwrap()[0];
    let neumann_err = rel(neumann, neumann_oracle);

    let osc = Potential::harmonic(1.0).unwrap();
    let grid = Grid::new(8.0, 2000).unwrap();
    let half = right_levels(2000, 8.0, &osc, d, 3);
    let full = eigen(&GlobalHamiltonian::build(grid, &osc), 6).unwrap().eigenvalues;
    let osc_err = half.iter().zip([3.0, 7.0, 11.0]).map(|(e, w)| rel(*e, w)).fold(0.0, f64::max);
    let parity_err = (0..3).map(|i| rel(half[i], full[2 * i + 1])).fold(0.0, f64::max);

    Outcome {
        pass: box_ok && neumann_err < 1e-3 && osc_err < 1e-3 && parity_err < 1e-3,
        detail: format!(
            "box rel err {:.2e}, h-halving ratios {:.3}/{:.3}; Robin(0) rel err {neumann_err:.2e}; \
             oscillator max rel err {osc_err:.2e}, vs odd full-line levels {parity_err:.2e}",
            errors[2] / (PI * PI),
            ratios[0],
            ratios[1]
        ),
    }
}

fn criterion_6() -> Outcome {
    let zero = Potential::zero();
    let ladder = [-1.0, 0.0, 1.0, 10.0, 100.0, 1e4];
    let lowest: Vec<f64> = ladder
        .iter()
        .map(|&l| right_levels(400, 1.0, &zero, BoundaryParam::Robin(l), 1)[0])
        .collect();
    let monotone = lowest.windows(2).all(|w| w[1] >= w[0]);
    let dirichlet = right_levels(400, 1.0, &zero, BoundaryParam::Dirichlet, 1)[0];
    let limit_err = rel(lowest[5], dirichlet);
    Outcome {
        pass: monotone && limit_err < 1e-3,
        detail: format!(
            "right block, lowest levels {lowest:.6?}, monotone {monotone}; λ = 1e4 vs Dirichlet rel err {limit_err:.2e}"
        ),
    }
}

fn criterion_7() -> Outcome {
    let report = run_sweep(&SweepConfig::default());
    Outcome {
        pass: report.contract_holds
            && report.max_on_domain_residue == "0"
            && report.cases_on_domain == 36 * 200
            && report.cases_off_domain == 36 * 200
            && report.oracle_max_deviation <= 1e-9,
        detail: format!(
            "{} on-domain cases, max residue {}; {} off-domain, min residue {}, {} linearity failures; \
             oracle deviation {:.2e}",
            report.cases_on_domain,
            report.max_on_domain_residue,
            report.cases_off_domain,
            report.min_off_domain_residue_norm.as_deref().unwrap_or("n/a"),
            report.linearity_failures,
            report.oracle_max_deviation
        ),
    }
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

/// Exit code, stdout, and every file written to `--out-dir`.
type CliRun = (Option<i32>, Vec<u8>, Vec<(String, Vec<u8>)>);

fn run_cli(args: &[&str], out_dir: &Path) -> CliRun {
    let out = Command::new(env!("CARGO_BIN_EXE_confine"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .expect("binary runs");
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out_dir)
        .map(|rd| {
            rd.map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
            })
            .collect()
        })
        .unwrap_or_default();
    files.sort();
    (out.status.code(), out.stdout, files)
}

fn criterion_8() -> Outcome {
    let runs: Vec<(&str, PathBuf)> = vec![
        ("spectrum", scenario("box_spectrum.toml")),
        ("spectrum", scenario("oscillator_spectrum.toml")),
        ("evolve", scenario("confined_evolve.toml")),
        ("evolve", scenario("leak_evolve.toml")),
        ("sweep-lambda", scenario("robin_sweep.toml")),
        ("verify-theorem2", scenario("theorem2.toml")),
    ];
    let tmp = tempfile::tempdir().unwrap();
    let mut failures = Vec::new();
    for (i, (cmd, path)) in runs.iter().enumerate() {
        let path = path.to_str().unwrap();
        let outputs: Vec<_> = (0..2)
            .map(|k| run_cli(&[cmd, path, "--seed", "17"], &tmp.path().join(format!("{i}-{k}"))))
            .collect();
        let ok = outputs[0].0 == Some(0)
            && !outputs[0].2.is_empty()
            && outputs[0].2.iter().all(|(_, bytes)| !bytes.is_empty())
            && outputs[0] == outputs[1];
        if !ok {
            failures.push(format!("{cmd} {path}"));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{} subcommand runs repeated; differing or failed: {failures:?}", runs.len()),
    }
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 8] = [
        ("self-adjointness", criterion_1, Duration::from_secs(5)),
        ("projector commutator", criterion_2, Duration::from_secs(1)),
        ("local agreement with H0", criterion_3, Duration::from_secs(1)),
        ("dynamical confinement", criterion_4, Duration::from_secs(30)),
        ("spectral oracles", criterion_5, Duration::from_secs(60)),
        ("Robin to Dirichlet limit", criterion_6, Duration::from_secs(20)),
        ("boundary potential identity", criterion_7, Duration::from_secs(30)),
        ("CLI determinism", criterion_8, Duration::MAX),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_budget = elapsed < budget;
        let pass = outcome.pass && in_budget;
        println!(
            "criterion {} [{name}] {} ({:.2} s{}): {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_budget { String::new() } else { format!(", over {} s budget", budget.as_secs()) },
            outcome.detail
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
