//! Mode decomposition of the linearized operator at a 1-D critical state.
//!
//! Perturbations of a latitude-s state separate over the product structure
//! of the sphere as f(s) Y_k(theta) Y_l(omega), with Y_k a circle harmonic
//! and Y_l a degree-l harmonic on S^{n-1}. Each (k, l) yields a singular
//! Sturm-Liouville problem
//!
//!   -(1/w)(w f')' + [k^2/cos^2 s + l(l+n-2)/sin^2 s + W''(u)/eps^2] f = lambda f
//!
//! in L^2(w ds). The regular branch at the collapsed orbits is selected by
//! the Dirichlet conditions (f(pi/2) = 0 for k >= 1, f(0) = 0 for l >= 1),
//! which the divergence-form discretization realizes through the vanishing
//! face weights and the singular potential at the first and last nodes; the
//! potentials are never evaluated at the poles themselves.
//!
//! The aggregate over modes gives the Morse index (eigenvalues below -delta)
//! and nullity (the near-zero cluster), with delta chosen from the spectral
//! gap.

use serde::Serialize;

use crate::critical::CriticalState;
use crate::error::{Error, Result};
use crate::grid::GridKind;
use crate::linalg::SymTridiag;
use crate::potential::PotentialSpec;

/// Dimension of the space of degree-l spherical harmonics on S^{n-1}:
/// C(n-1+l, n-1) - C(n-3+l, n-1), with binomials of negative upper index
/// taken to be zero.
pub fn harmonic_multiplicity(n: u32, l: u32) -> u64 {
    fn binom(a: i64, b: i64) -> u64 {
        if a < b || b < 0 {
            return 0;
        }
        let mut acc: u128 = 1;
        for i in 0..b {
            acc = acc * (a - i) as u128 / (i as u128 + 1);
        }
        acc as u64
    }
    let (n, l) = (n as i64, l as i64);
    binom(n - 1 + l, n - 1) - binom(n - 3 + l, n - 1)
}

/// Multiplicity of the theta factor: one constant mode, cos/sin pairs after.
fn theta_multiplicity(k: u32) -> u64 {
    if k == 0 {
        1
    } else {
        2
    }
}

/// Eigenvalues and eigenfunctions of one (k, l) mode problem. Eigenfunctions
/// are returned over the full radial layout (pole slot zero when k >= 1) and
/// normalized against the grid measure including the orbit factor.
pub struct ModePairs {
    pub eigenvalues: Vec<f64>,
    pub eigenfunctions: Vec<Vec<f64>>,
}

fn mode_problem(state: &CriticalState, k: u32, l: u32, pot: &PotentialSpec) -> Result<(SymTridiag, Vec<f64>, bool)> {
    let grid = state.field.grid();
    if grid.kind() != GridKind::LatitudeS {
        return Err(Error::Usage("mode spectra are defined on latitude-s states".into()));
    }
    let n = grid.n();
    let eps = state.field.epsilon();
    let include_pole = k == 0;
    let lap = grid.radial_laplacian(include_pole);
    let size = lap.dim();
    let rings = grid.n_s() - 1;

    // Radial measures in the latitude-s normalization (matching the operator).
    let measures: Vec<f64> = grid.node_measure()[..size].to_vec();

    let l_term = (l * (l + n - 2)) as f64;
    let k2 = (k * k) as f64;
    let mut diag = Vec::with_capacity(size);
    for i in 0..size {
        let v = if i < rings {
            let s = grid.nodes_s()[i];
            let (sin, cos) = s.sin_cos();
            k2 / (cos * cos) + l_term / (sin * sin) + (pot.d2w)(state.field.values()[i]) / (eps * eps)
        } else {
            // Polar node (k = 0 only): sin(pi/2) = 1, no theta term.
            l_term + (pot.d2w)(state.field.values()[i]) / (eps * eps)
        };
        diag.push(-lap.diag[i] + v);
    }
    // Symmetrize by the measure similarity transform.
    let mut off = Vec::with_capacity(size - 1);
    for i in 0..size - 1 {
        off.push(-lap.sup[i] * (measures[i] / measures[i + 1]).sqrt());
    }
    Ok((SymTridiag { d: diag, e: off }, measures, include_pole))
}

/// The lowest `count` eigenvalues of the (k, l) mode problem, ascending.
pub fn mode_spectrum(state: &CriticalState, k: u32, l: u32, count: usize) -> Result<Vec<f64>> {
    if count < 3 {
        return Err(Error::Usage(format!("mode_spectrum needs count >= 3, got {count}")));
    }
    let pot = PotentialSpec::default();
    mode_spectrum_with(state, k, l, count, &pot)
}

/// As [`mode_spectrum`] with an explicit potential.
pub fn mode_spectrum_with(
    state: &CriticalState,
    k: u32,
    l: u32,
    count: usize,
    pot: &PotentialSpec,
) -> Result<Vec<f64>> {
    let (problem, _, _) = mode_problem(state, k, l, pot)?;
    problem.lowest_eigenvalues(count.min(problem.dim()))
}

/// Lowest eigenpairs of the (k, l) problem, with eigenfunctions mapped back
/// from the similarity variables and normalized in the weighted L^2.
pub fn mode_eigenpairs(
    state: &CriticalState,
    k: u32,
    l: u32,
    count: usize,
    pot: &PotentialSpec,
) -> Result<ModePairs> {
    let (problem, measures, include_pole) = mode_problem(state, k, l, pot)?;
    let eigenvalues = problem.lowest_eigenvalues(count.min(problem.dim()))?;
    let grid = state.field.grid();
    let orbit = grid.orbit_factor();
    let full = grid.value_count();
    let mut eigenfunctions = Vec::with_capacity(eigenvalues.len());
    for &lam in &eigenvalues {
        let v = problem.eigenvector(lam)?;
        let mut f = vec![0.0; full];
        let mut norm2 = 0.0;
        for (i, &vi) in v.iter().enumerate() {
            let fi = vi / measures[i].sqrt();
            f[i] = fi;
            norm2 += measures[i] * fi * fi;
        }
        let scale = 1.0 / (orbit * norm2).sqrt();
        for fi in f.iter_mut() {
            *fi *= scale;
        }
        let _ = include_pole; // pole slot stays zero when excluded
        eigenfunctions.push(f);
    }
    Ok(ModePairs { eigenvalues, eigenfunctions })
}

/// Per-mode entry of the aggregated spectrum report.
#[derive(Debug, Clone, Serialize)]
pub struct ModeEntry {
    pub k: u32,
    pub l: u32,
    pub mult: u64,
    pub eigenvalues: Vec<f64>,
}

/// Aggregated spectrum: Morse index, nullity, and the cluster certificate.
#[derive(Debug, Clone, Serialize)]
pub struct ModeSpectrum {
    pub n: u32,
    pub epsilon: f64,
    pub delta: f64,
    pub gap_ratio: f64,
    pub modes: Vec<ModeEntry>,
    pub morse_index: u64,
    pub nullity: u64,
}

/// Choose the cluster threshold: seed with delta0, then place delta at the
/// geometric midpoint between the outermost cluster eigenvalue and the
/// nearest eigenvalue outside.
fn select_delta(eigenvalues: &[f64], delta0: f64) -> (f64, f64) {
    let cluster_max = eigenvalues
        .iter()
        .filter(|v| v.abs() <= delta0)
        .map(|v| v.abs())
        .fold(0.0f64, f64::max);
    let outside_min = eigenvalues
        .iter()
        .filter(|v| v.abs() > delta0)
        .map(|v| v.abs())
        .fold(f64::INFINITY, f64::min);
    if !outside_min.is_finite() {
        return (delta0, f64::INFINITY);
    }
    let delta = if cluster_max > 0.0 {
        (cluster_max * outside_min).sqrt()
    } else {
        delta0.min(outside_min / 2.0)
    };
    let gap_ratio = (outside_min - delta) / delta;
    (delta, gap_ratio)
}

fn aggregate(
    n: u32,
    epsilon: f64,
    modes: Vec<ModeEntry>,
    delta0: f64,
) -> Result<ModeSpectrum> {
    let all: Vec<f64> = modes.iter().flat_map(|m| m.eigenvalues.iter().copied()).collect();
    let (delta, gap_ratio) = select_delta(&all, delta0);

    let mut morse_index = 0u64;
    let mut nullity = 0u64;
    for entry in &modes {
        let negatives = entry.eigenvalues.iter().filter(|&&v| v < -delta).count() as u64;
        let zeros = entry.eigenvalues.iter().filter(|&&v| v.abs() <= delta).count() as u64;
        morse_index += entry.mult * negatives;
        nullity += entry.mult * zeros;
    }
    Ok(ModeSpectrum { n, epsilon, delta, gap_ratio, modes, morse_index, nullity })
}

/// Morse index and nullity of a Clifford latitude state by aggregating the
/// (k, l) modes up to the given truncation. Errors if the truncation is too
/// small for the retained spectrum to clear the cluster threshold.
pub fn morse_count(
    state: &CriticalState,
    k_max: u32,
    l_max: u32,
    pot: &PotentialSpec,
) -> Result<ModeSpectrum> {
    let grid = state.field.grid();
    let n = grid.n();
    let eps = state.field.epsilon();
    let per_mode = 4;

    let mut modes = Vec::new();
    for k in 0..=k_max {
        for l in 0..=l_max {
            let eigenvalues = mode_spectrum_with(state, k, l, per_mode, pot)?;
            modes.push(ModeEntry {
                k,
                l,
                mult: theta_multiplicity(k) * harmonic_multiplicity(n, l),
                eigenvalues,
            });
        }
    }
    let spectrum = aggregate(n, eps, modes, eps)?;

    // Truncation is sufficient only if the boundary modes are already above
    // the cluster; eigenvalues are monotone in k and l, so the boundary
    // bounds everything outside.
    for entry in &spectrum.modes {
        if entry.k == k_max || entry.l == l_max {
            let lowest = entry.eigenvalues[0];
            if lowest <= spectrum.delta {
                return Err(Error::Truncation {
                    k: entry.k,
                    l: entry.l,
                    eigenvalue: lowest,
                    delta: spectrum.delta,
                });
            }
        }
    }
    Ok(spectrum)
}

/// Mode problem for a ground state on the alpha grid: harmonics of degree l
/// on the slice spheres S^n contribute l(l+n-1)/cos^2 alpha.
pub fn ground_mode_spectrum(
    state: &CriticalState,
    l: u32,
    count: usize,
    pot: &PotentialSpec,
) -> Result<Vec<f64>> {
    let grid = state.field.grid();
    if grid.kind() != GridKind::LatitudeAlpha {
        return Err(Error::Usage("ground mode spectra require a latitude-alpha state".into()));
    }
    let n = grid.n();
    let eps = state.field.epsilon();
    let lap = grid.radial_laplacian(true);
    let size = lap.dim();
    let measures = grid.node_measure();
    let l_term = (l * (l + n - 1)) as f64;
    let mut diag = Vec::with_capacity(size);
    for i in 0..size {
        let a = grid.nodes_s()[i];
        let cos = a.cos();
        let v = l_term / (cos * cos) + (pot.d2w)(state.field.values()[i]) / (eps * eps);
        diag.push(-lap.diag[i] + v);
    }
    let mut off = Vec::with_capacity(size - 1);
    for i in 0..size - 1 {
        off.push(-lap.sup[i] * (measures[i] / measures[i + 1]).sqrt());
    }
    SymTridiag { d: diag, e: off }.lowest_eigenvalues(count.min(size))
}

/// Morse index and nullity of a ground state from its l-mode problems.
pub fn ground_morse_count(
    state: &CriticalState,
    l_max: u32,
    pot: &PotentialSpec,
) -> Result<ModeSpectrum> {
    let grid = state.field.grid();
    let n = grid.n();
    let eps = state.field.epsilon();
    let mut modes = Vec::new();
    for l in 0..=l_max {
        let eigenvalues = ground_mode_spectrum(state, l, 4, pot)?;
        modes.push(ModeEntry {
            k: 0,
            l,
            // Harmonics on the slice spheres S^n.
            mult: harmonic_multiplicity(n + 1, l),
            eigenvalues,
        });
    }
    let spectrum = aggregate(n, eps, modes, eps)?;
    for entry in &spectrum.modes {
        if entry.l == l_max && entry.eigenvalues[0] <= spectrum.delta {
            return Err(Error::Truncation {
                k: 0,
                l: entry.l,
                eigenvalue: entry.eigenvalues[0],
                delta: spectrum.delta,
            });
        }
    }
    Ok(spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::{solve_clifford_state, solve_ground_state, CriticalState};
    use crate::field::Field;
    use crate::grid::ReducedGrid;
    use std::sync::Arc;

    fn clifford(n: u32, eps: f64, n_s: usize) -> CriticalState {
        let pot = PotentialSpec::default();
        solve_clifford_state(ReducedGrid::latitude_s(n, n_s).unwrap(), eps, &pot, None).unwrap()
    }

    /// A "state" wrapping u = 1 for constant-coefficient checks.
    fn constant_one_state(n: u32, eps: f64, n_s: usize) -> CriticalState {
        let grid = ReducedGrid::latitude_s(n, n_s).unwrap();
        let field = Field::constant(grid, eps, 1.0).unwrap();
        CriticalState {
            residual: 0.0,
            energy: 0.0,
            nodal_points: vec![],
            iterations: 0,
            field,
        }
    }

    #[test]
    fn harmonic_multiplicities() {
        assert_eq!(harmonic_multiplicity(3, 1), 3);
        assert_eq!(harmonic_multiplicity(2, 5), 2);
        assert_eq!(harmonic_multiplicity(4, 2), 9);
        assert_eq!(harmonic_multiplicity(2, 0), 1);
        assert_eq!(harmonic_multiplicity(5, 0), 1);
    }

    #[test]
    fn constant_state_lowest_eigenvalue() {
        // At u = 1 the (0,0) problem is constant-coefficient; the lowest
        // eigenvalue is W''(1)/eps^2 = 2/eps^2 with a constant eigenfunction.
        let eps = 0.1;
        let state = constant_one_state(2, eps, 128);
        let vals = mode_spectrum(&state, 0, 0, 3).unwrap();
        let expect = 2.0 / (eps * eps);
        assert!(
            ((vals[0] - expect) / expect).abs() < 1e-10,
            "lowest {} vs {}",
            vals[0],
            expect
        );
        assert!(vals[0] > 0.0);
    }

    #[test]
    fn clifford_negative_and_cluster_modes() {
        let state = clifford(2, 0.05, 512);
        // (0,0): exactly one negative eigenvalue among the lowest 5.
        let v00 = mode_spectrum(&state, 0, 0, 5).unwrap();
        assert_eq!(v00.iter().filter(|&&v| v < 0.0).count(), 1, "{v00:?}");
        // Its magnitude approaches the Jacobi value 2n = 4.
        assert!((v00[0] + 4.0).abs() < 0.5, "lowest (0,0) = {}", v00[0]);
        // (1,1): lowest eigenvalue in the near-zero cluster.
        let v11 = mode_spectrum(&state, 1, 1, 3).unwrap();
        assert!(v11[0].abs() < 0.05, "cluster eigenvalue {}", v11[0]);
        // (1,0) and (0,1) approach -n = -2.
        let v10 = mode_spectrum(&state, 1, 0, 3).unwrap();
        let v01 = mode_spectrum(&state, 0, 1, 3).unwrap();
        assert!((v10[0] + 2.0).abs() < 0.3, "(1,0) lowest {}", v10[0]);
        assert!((v01[0] + 2.0).abs() < 0.3, "(0,1) lowest {}", v01[0]);
    }

    #[test]
    fn eigenvalue_monotone_in_k_and_l() {
        let state = clifford(2, 0.05, 384);
        let mut lowest = vec![vec![0.0f64; 4]; 4];
        for k in 0..4u32 {
            for l in 0..4u32 {
                lowest[k as usize][l as usize] =
                    mode_spectrum(&state, k, l, 3).unwrap()[0];
            }
        }
        for k in 0..4 {
            for l in 0..3 {
                assert!(lowest[k][l] < lowest[k][l + 1], "l-monotonicity at ({k},{l})");
            }
        }
        for l in 0..4 {
            for k in 0..3 {
                assert!(lowest[k][l] < lowest[k + 1][l], "k-monotonicity at ({k},{l})");
            }
        }
    }

    #[test]
    fn morse_count_matches_paper_values() {
        let pot = PotentialSpec::default();
        for n in [2u32, 3] {
            let state = clifford(n, 0.05, 512);
            let spec = morse_count(&state, 6, 6, &pot).unwrap();
            assert_eq!(spec.morse_index, (n + 3) as u64, "index at n={n}");
            assert_eq!(spec.nullity, (2 * n) as u64, "nullity at n={n}");
            assert!(spec.gap_ratio >= 10.0, "gap ratio {}", spec.gap_ratio);

            // Per-mode breakdown of negatives: (0,0):1, (1,0):1x2, (0,1):1xn.
            for entry in &spec.modes {
                let negatives =
                    entry.eigenvalues.iter().filter(|&&v| v < -spec.delta).count() as u64;
                let expect = match (entry.k, entry.l) {
                    (0, 0) | (1, 0) | (0, 1) => 1,
                    _ => 0,
                };
                assert_eq!(negatives, expect, "mode ({},{})", entry.k, entry.l);
            }
        }
    }

    #[test]
    fn index_stable_under_delta_scaling() {
        let pot = PotentialSpec::default();
        let state = clifford(2, 0.05, 512);
        let spec = morse_count(&state, 4, 4, &pot).unwrap();
        for scale in [0.5, 2.0] {
            let delta = spec.delta * scale;
            let mut index = 0u64;
            let mut nullity = 0u64;
            for entry in &spec.modes {
                index += entry.mult
                    * entry.eigenvalues.iter().filter(|&&v| v < -delta).count() as u64;
                nullity += entry.mult
                    * entry.eigenvalues.iter().filter(|&&v| v.abs() <= delta).count() as u64;
            }
            assert_eq!(index, spec.morse_index);
            assert_eq!(nullity, spec.nullity);
        }
    }

    #[test]
    fn eigenfunctions_orthonormal_and_first_positive() {
        let pot = PotentialSpec::default();
        let state = clifford(2, 0.05, 512);
        let pairs = mode_eigenpairs(&state, 0, 0, 4, &pot).unwrap();
        let grid = state.field.grid();
        let orbit = grid.orbit_factor();
        let m = grid.node_measure();
        for a in 0..pairs.eigenfunctions.len() {
            for b in a..pairs.eigenfunctions.len() {
                let dot: f64 = pairs.eigenfunctions[a]
                    .iter()
                    .zip(&pairs.eigenfunctions[b])
                    .zip(m)
                    .map(|((x, y), w)| x * y * w)
                    .sum::<f64>()
                    * orbit;
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (dot - expect).abs() < 1e-8,
                    "<f{a}, f{b}> = {dot}"
                );
            }
        }
        // The lowest eigenfunction is sign-definite.
        let f0 = &pairs.eigenfunctions[0];
        let sign = f0[f0.len() / 2].signum();
        assert!(f0.iter().all(|&v| v * sign > -1e-10), "phi_1 changes sign");
    }

    #[test]
    fn lowest_eigenvalues_converge_under_refinement() {
        let coarse = clifford(2, 0.05, 512);
        let fine = clifford(2, 0.05, 1024);
        for (k, l) in [(0u32, 0u32), (1, 0), (0, 1), (1, 1)] {
            let a = mode_spectrum(&coarse, k, l, 3).unwrap()[0];
            let b = mode_spectrum(&fine, k, l, 3).unwrap()[0];
            let scale = b.abs().max(1.0);
            assert!(
                ((a - b) / scale).abs() < 1e-3,
                "mode ({k},{l}): {a} vs {b}"
            );
        }
    }

    #[test]
    fn ground_state_index_one() {
        let pot = PotentialSpec::default();
        let grid = ReducedGrid::latitude_alpha(2, 512).unwrap();
        let state = solve_ground_state(grid, 0.05, &pot, None).unwrap();
        let spec = ground_morse_count(&state, 5, &pot).unwrap();
        assert_eq!(spec.morse_index, 1);
        // Translation Jacobi fields: degree-1 harmonics on S^n, dim n+1 = 3.
        assert_eq!(spec.nullity, 3);
    }

    #[test]
    fn count_validation() {
        let state = constant_one_state(2, 0.1, 64);
        assert!(mode_spectrum(&state, 0, 0, 2).is_err());
        let alpha_grid: Arc<ReducedGrid> = ReducedGrid::latitude_alpha(2, 64).unwrap();
        let alpha_state = CriticalState {
            field: Field::constant(alpha_grid, 0.1, 1.0).unwrap(),
            residual: 0.0,
            energy: 0.0,
            nodal_points: vec![],
            iterations: 0,
        };
        assert!(mode_spectrum(&alpha_state, 0, 0, 3).is_err());
    }
}
