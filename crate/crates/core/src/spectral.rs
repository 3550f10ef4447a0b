//! Low-lying spectra of the assembled operators.
//!
//! Eigenvalues come from bisection on the Sturm sequence, eigenvectors from
//! inverse iteration with a partially pivoted tridiagonal LU. Only the bottom
//! of the spectrum is ever needed, which is where this pair is at its best.
//!
//! [`robin_box_levels`] is the analytic reference for `-ψ'' = Eψ` on
//! `(0, L)` with `ψ(L) = 0` and `ψ'(0) = λψ(0)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{BoundaryParam, Layout};
use crate::operator::{BlockTag, Hamiltonian};
use crate::wavefunction::WaveFunction;

const MAX_INVERSE_ITERATIONS: usize = 50;
const SHIFT_PERTURBATION: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub tags: Vec<BlockTag>,
    /// Layout the eigenvectors live on; `None` for bare matrices, whose
    /// vectors are Euclidean-normalized.
    pub layout: Option<Layout>,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// The `i`-th eigenvector as a wave function on the operator's layout.
    pub fn state(&self, i: usize) -> Result<WaveFunction> {
        let layout = self
            .layout
            .ok_or_else(|| Error::Domain("bare-matrix eigenvectors carry no layout".into()))?;
        WaveFunction::from_real(layout, &self.eigenvectors[i])
    }
}

/// Number of eigenvalues of the symmetric tridiagonal `(diag, offdiag)`
/// strictly below `x`.
pub fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let pivmin = pivot_floor(offdiag);
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - offdiag[i - 1] * offdiag[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn pivot_floor(offdiag: &[f64]) -> f64 {
    let emax = offdiag.iter().map(|e| e * e).fold(1.0, f64::max);
    f64::MIN_POSITIVE * emax
}

fn gershgorin(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let radius = |i: usize| {
        let l = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let r = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        l + r
    };
    (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
        (lo.min(diag[i] - radius(i)), hi.max(diag[i] + radius(i)))
    })
}

/// The `k`-th smallest eigenvalue (0-based) by bisection to full precision.
fn bisect_eigenvalue(diag: &[f64], offdiag: &[f64], k: usize, lo: f64, hi: f64) -> f64 {
    let span = (hi - lo).abs().max(1.0);
    let (mut lo, mut hi) = (lo - 1e-3 * span, hi + 1e-3 * span);
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, offdiag, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// LU factors of `T - σI` with partial pivoting (LAPACK `gttrf` layout).
struct PivotedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedLu {
    fn factor(diag: &[f64], offdiag: &[f64], shift: f64, floor: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
        let mut dl = offdiag.to_vec();
        let mut du = offdiag.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = floor;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = floor;
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            if i + 1 < n {
                acc -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                acc -= self.du2[i] * b[i + 2];
            }
            b[i] = acc / self.d[i];
        }
    }
}

fn euclid_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual_norm(diag: &[f64], offdiag: &[f64], e: f64, x: &[f64]) -> f64 {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut r = (diag[i] - e) * x[i];
            if i > 0 {
                r += offdiag[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                r += offdiag[i] * x[i + 1];
            }
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

fn inverse_iteration(
    diag: &[f64],
    offdiag: &[f64],
    eigenvalue: f64,
    index: usize,
    tnorm: f64,
    cluster: &[&[f64]],
) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let shift = eigenvalue * (1.0 + SHIFT_PERTURBATION);
    let lu = PivotedLu::factor(diag, offdiag, shift, f64::EPSILON * tnorm);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.25 * ((i + 1) as f64).sin()).collect();
    let mut best = f64::INFINITY;
    for iter in 0..MAX_INVERSE_ITERATIONS {
        lu.solve(&mut x);
        for v in cluster {
            let dot: f64 = v.iter().zip(&x).map(|(a, b)| a * b).sum();
            x.iter_mut().zip(v.iter()).for_each(|(xi, vi)| *xi -= dot * vi);
        }
        let norm = euclid_norm(&x);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Numerical(format!(
                "inverse iteration broke down for eigenvalue index {index}"
            )));
        }
        x.iter_mut().for_each(|xi| *xi /= norm);
        let r = residual_norm(diag, offdiag, eigenvalue, &x);
        // Iterate until the residual stops improving; it then sits at the
        // rounding floor of the matrix–vector product.
        if iter >= 2 && r >= 0.5 * best {
            if r <= 1e-6 * tnorm.max(1.0) {
                fix_sign(&mut x);
                return Ok(x);
            }
            break;
        }
        best = best.min(r);
    }
    Err(Error::Numerical(format!(
        "inverse iteration did not converge in {MAX_INVERSE_ITERATIONS} iterations for eigenvalue index {index}"
    )))
}

/// Largest-magnitude component made positive, so output is reproducible.
fn fix_sign(x: &mut [f64]) {
    let pivot = x
        .iter()
        .copied()
        .fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m });
    if pivot < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

/// The `count` lowest eigenpairs of a symmetric tridiagonal matrix, with
/// Euclidean-orthonormal eigenvectors.
pub fn eigen_tridiagonal(diag: &[f64], offdiag: &[f64], count: usize) -> Result<EigenDecomposition> {
    let n = diag.len();
    if n == 0 || offdiag.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n.saturating_sub(1),
            found: offdiag.len(),
        });
    }
    if count > n {
        return Err(Error::Config(format!(
            "requested {count} eigenpairs of a {n}-dimensional matrix"
        )));
    }
    let (lo, hi) = gershgorin(diag, offdiag);
    let tnorm = lo.abs().max(hi.abs());
    let eigenvalues: Vec<f64> = (0..count)
        .map(|k| bisect_eigenvalue(diag, offdiag, k, lo, hi))
        .collect();

    // Re-orthogonalize only within clusters of close eigenvalues.
    let cluster_tol = 1e-3 * tnorm.max(1.0);
    let mut eigenvectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    for (k, &e) in eigenvalues.iter().enumerate() {
        let cluster: Vec<&[f64]> = eigenvalues[..k]
            .iter()
            .zip(&eigenvectors)
            .filter(|(ej, _)| (e - **ej).abs() <= cluster_tol)
            .map(|(_, v)| v.as_slice())
            .collect();
        let v = inverse_iteration(diag, offdiag, e, k, tnorm, &cluster)?;
        eigenvectors.push(v);
    }
    Ok(EigenDecomposition {
        tags: vec![BlockTag::Global; count],
        eigenvalues,
        eigenvectors,
        layout: None,
    })
}

/// The `count_per_block` lowest eigenpairs of every block of `h`, merged and
/// sorted ascending (ties: left before right). Eigenvectors are embedded in
/// the full layout, zero outside their block, and normalized in the
/// h-weighted norm.
pub fn eigen<H: Hamiltonian>(h: &H, count_per_block: usize) -> Result<EigenDecomposition> {
    let layout = *h.layout();
    let dim = layout.len();
    let scale = 1.0 / layout.grid().spacing().sqrt();
    let mut pairs: Vec<(f64, BlockTag, Vec<f64>)> = Vec::new();
    for block in h.blocks() {
        let dec = eigen_tridiagonal(block.matrix.diag(), block.matrix.offdiag(), count_per_block)?;
        for (e, v) in dec.eigenvalues.into_iter().zip(dec.eigenvectors) {
            let mut full = vec![0.0; dim];
            full[block.slots.clone()]
                .iter_mut()
                .zip(v)
                .for_each(|(f, x)| *f = x * scale);
            pairs.push((e, block.tag, full));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = EigenDecomposition {
        eigenvalues: Vec::with_capacity(pairs.len()),
        eigenvectors: Vec::with_capacity(pairs.len()),
        tags: Vec::with_capacity(pairs.len()),
        layout: Some(layout),
    };
    for (e, tag, v) in pairs {
        out.eigenvalues.push(e);
        out.tags.push(tag);
        out.eigenvectors.push(v);
    }
    Ok(out)
}

/// Eigenpairs of a confined operator, per block. Alias of [`eigen`] kept for
/// call sites that want to say what they mean.
pub fn eigen_confined(
    h: &crate::operator::ConfinedHamiltonian,
    count_per_block: usize,
) -> Result<EigenDecomposition> {
    eigen(h, count_per_block)
}

/// `‖Hψ - Eψ‖ / ‖ψ‖` in the h-weighted norm.
pub fn residual<H: Hamiltonian>(h: &H, e: f64, psi: &WaveFunction) -> Result<f64> {
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::Domain("residual of the zero state".into()));
    }
    let hpsi = h.apply(psi)?;
    let diff: Vec<Complex64> = hpsi
        .amplitudes()
        .iter()
        .zip(psi.amplitudes())
        .map(|(a, b)| a - b * e)
        .collect();
    Ok(WaveFunction::new(*psi.layout(), diff)?.norm() / norm)
}

/// Lowest `count` eigenvalues of `-ψ'' = Eψ` on `(0, L)` with `ψ(L) = 0`
/// and `ψ'(0) = λψ(0)` (or `ψ(0) = 0`).
///
/// For Robin data the eigenvalues are the zeros in `E` of the shooting
/// function `ψ(L; E)` for `ψ(0) = 1, ψ'(0) = λ`:
///
/// ```text
/// E = k²  > 0:  cos(kL) + λ sin(kL) / k
/// E = 0:        1 + λL
/// E = -κ² < 0:  cosh(κL) + λ sinh(κL) / κ   (divided by cosh κL)
/// ```
///
/// A negative level exists only for `λ < -1/L`, with `κ < |λ|`.
pub fn robin_box_levels(half_width: f64, bc: BoundaryParam, count: usize) -> Result<Vec<f64>> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::Config(format!("box length must be > 0, got {half_width}")));
    }
    let l = half_width;
    let lambda = match bc {
        BoundaryParam::Dirichlet => {
            return Ok((1..=count).map(|n| (n as f64 * PI / l).powi(2)).collect());
        }
        BoundaryParam::Robin(lambda) => lambda,
    };

    // Signed wavenumber s: E = s|s|.
    let shoot = |s: f64| -> f64 {
        if s > 0.0 {
            (s * l).cos() + lambda * (s * l).sin() / s
        } else if s < 0.0 {
            let kappa = -s;
            1.0 + lambda * (kappa * l).tanh() / kappa
        } else {
            1.0 + lambda * l
        }
    };

    let mut samples: Vec<f64> = Vec::new();
    if lambda < 0.0 {
        let s_min = -(lambda.abs() + 1.0);
        let m = 256;
        samples.extend((0..m).map(|i| s_min * (1.0 - i as f64 / m as f64)));
    }
    let ds = PI / (64.0 * l);
    let s_max = (count as f64 + 2.0) * PI / l + 1.0;
    let steps = (s_max / ds).ceil() as usize;
    samples.extend((0..=steps).map(|i| i as f64 * ds));

    let mut roots = Vec::with_capacity(count);
    let mut prev: Option<(f64, f64)> = None;
    for s in samples {
        if roots.len() == count {
            break;
        }
        let g = shoot(s);
        if g == 0.0 {
            roots.push(s);
            prev = None;
            continue;
        }
        if let Some((sp, gp)) = prev {
            if gp.signum() != g.signum() {
                roots.push(bisect_root(&shoot, sp, s, gp));
            }
        }
        prev = Some((s, g));
    }
    if roots.len() < count {
        return Err(Error::Numerical(format!(
            "bracketing found {} of {count} Robin box levels",
            roots.len()
        )));
    }
    Ok(roots.into_iter().map(|s| s * s.abs()).collect())
}

fn bisect_root(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, fa: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_by_two_closed_form() {
        let dec = eigen_tridiagonal(&[2.0, 2.0], &[-1.0], 2).unwrap();
        assert_relative_eq!(dec.eigenvalues[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(dec.eigenvalues[1], 3.0, max_relative = 1e-14);
    }

    #[test]
    fn discrete_dirichlet_laplacian_spectrum() {
        let dec = eigen_tridiagonal(&[8.0; 3], &[-4.0; 2], 3).unwrap();
        let expected: Vec<f64> = (1..=3)
            .map(|j| 8.0 - 8.0 * (j as f64 * PI / 4.0).cos())
            .collect();
        assert_relative_eq!(expected[0], 8.0 - 4.0 * 2f64.sqrt(), max_relative = 1e-15);
        for (got, want) in dec.eigenvalues.iter().zip(&expected) {
            assert_relative_eq!(*got, *want, max_relative = 1e-14);
        }
    }

    #[test]
    fn one_by_one() {
        let dec = eigen_tridiagonal(&[5.0], &[], 1).unwrap();
        assert_eq!(dec.eigenvalues, vec![5.0]);
        assert_eq!(dec.eigenvectors, vec![vec![1.0]]);
    }

    #[test]
    fn count_is_checked() {
        assert!(matches!(eigen_tridiagonal(&[1.0, 2.0], &[0.5], 3), Err(Error::Config(_))));
        assert!(eigen_tridiagonal(&[1.0, 2.0], &[0.5], 0).unwrap().is_empty());
        assert!(matches!(
            eigen_tridiagonal(&[1.0, 2.0], &[], 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sturm_count_brackets() {
        let (d, e) = ([8.0; 3], [-4.0; 2]);
        assert_eq!(sturm_count(&d, &e, 0.0), 0);
        assert_eq!(sturm_count(&d, &e, 7.9), 1);
        assert_eq!(sturm_count(&d, &e, 8.1), 2);
        assert_eq!(sturm_count(&d, &e, 100.0), 3);
    }

    #[test]
    fn eigenvectors_orthonormal_and_accurate() {
        let n = 300;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + (i as f64 * 0.37).sin()).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| -1.0 + 0.1 * (i as f64).cos()).collect();
        let dec = eigen_tridiagonal(&diag, &off, 8).unwrap();
        for i in 0..8 {
            let r = residual_norm(&diag, &off, dec.eigenvalues[i], &dec.eigenvectors[i]);
            assert!(r < 1e-12, "residual {r}");
            for j in 0..8 {
                let dot: f64 = dec.eigenvectors[i].iter().zip(&dec.eigenvectors[j]).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn box_levels_dirichlet_closed_form() {
        let e = robin_box_levels(1.0, BoundaryParam::Dirichlet, 2).unwrap();
        assert_eq!(e, vec![PI * PI, 4.0 * PI * PI]);
    }

    #[test]
    fn box_levels_neumann_quarter_wave() {
        let e = robin_box_levels(1.0, BoundaryParam::Robin(0.0), 3).unwrap();
        for (n, got) in e.iter().enumerate() {
            let want = ((n as f64 + 0.5) * PI).powi(2);
            assert_relative_eq!(*got, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn box_levels_robin_to_dirichlet_limit() {
        let e = robin_box_levels(1.0, BoundaryParam::Robin(1e6), 1).unwrap();
        assert!(((e[0] - PI * PI) / (PI * PI)).abs() < 1e-4);
        assert!(e[0] < PI * PI);
    }

    #[test]
    fn box_levels_threshold_and_bound_state() {
        // λ = -1/L puts a level exactly at E = 0 (ψ = L - x).
        let e = robin_box_levels(1.0, BoundaryParam::Robin(-1.0), 2).unwrap();
        assert_eq!(e[0], 0.0);
        assert!(e[1] > 0.0);
        // λ = -3: κ coth κ = 3 has its root near κ ≈ 2.9847.
        let e = robin_box_levels(1.0, BoundaryParam::Robin(-3.0), 1).unwrap();
        let kappa = (-e[0]).sqrt();
        assert_relative_eq!(kappa / kappa.tanh(), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn box_levels_satisfy_matching_condition() {
        for lambda in [-0.5, 0.3, 2.0, 17.0] {
            let l = 1.7;
            for e in robin_box_levels(l, BoundaryParam::Robin(lambda), 4).unwrap() {
                let k = e.sqrt();
                // ψ = sin(k(L - x)): -k cos(kL) = λ sin(kL)
                let lhs = -k * (k * l).cos();
                let rhs = lambda * (k * l).sin();
                assert!((lhs - rhs).abs() < 1e-10 * (1.0 + k.abs() + lambda.abs()));
            }
        }
    }
}
