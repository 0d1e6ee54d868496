//! Scalar fields on reduced grids and the discrete Allen-Cahn functionals:
//! the reduced Laplace-Beltrami operator, the energy, its weighted gradient
//! and the weight-measure mass.
//!
//! The discrete energy uses face-based quadrature for the gradient term, so
//! `energy_gradient` is the exact gradient of `energy` with respect to the
//! weighted inner product — the finite-difference consistency checks pass at
//! round-off level, not just truncation level.

use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridKind, ReducedGrid};
use crate::potential::PotentialSpec;

/// Nodal values of the discrete u, tagged with (grid, epsilon).
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<ReducedGrid>,
    values: Vec<f64>,
    epsilon: f64,
}

impl Field {
    pub fn from_values(grid: Arc<ReducedGrid>, epsilon: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.value_count() {
            return Err(Error::Usage(format!(
                "value count {} does not match grid ({} unknowns)",
                values.len(),
                grid.value_count()
            )));
        }
        if !(epsilon > 0.0) {
            return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Field { grid, values, epsilon })
    }

    pub fn constant(grid: Arc<ReducedGrid>, epsilon: f64, value: f64) -> Result<Self> {
        let count = grid.value_count();
        Self::from_values(grid, epsilon, vec![value; count])
    }

    /// Build from a function of the radial coordinate (s or alpha). On the
    /// disk the value is copied around each ring.
    pub fn from_radial_fn(
        grid: Arc<ReducedGrid>,
        epsilon: f64,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let values = match grid.kind() {
            GridKind::LatitudeS | GridKind::LatitudeAlpha => {
                grid.nodes_s().iter().map(|&s| f(s)).collect()
            }
            GridKind::DiskSTheta => {
                let mut v = Vec::with_capacity(grid.value_count());
                for i in 0..grid.ring_count() {
                    let val = f(grid.nodes_s()[i]);
                    v.extend(std::iter::repeat(val).take(grid.n_theta()));
                }
                v.push(f(std::f64::consts::FRAC_PI_2));
                v
            }
        };
        Self::from_values(grid, epsilon, values)
    }

    /// Build a disk field from a function of (s, theta); the pole takes
    /// f(pi/2, 0).
    pub fn from_disk_fn(
        grid: Arc<ReducedGrid>,
        epsilon: f64,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        if grid.kind() != GridKind::DiskSTheta {
            return Err(Error::Usage("from_disk_fn requires a disk grid".into()));
        }
        let mut v = Vec::with_capacity(grid.value_count());
        for i in 0..grid.ring_count() {
            let s = grid.nodes_s()[i];
            for j in 0..grid.n_theta() {
                v.push(f(s, grid.theta_node(j)));
            }
        }
        v.push(f(std::f64::consts::FRAC_PI_2, 0.0));
        Self::from_values(grid, epsilon, v)
    }

    pub fn grid(&self) -> &Arc<ReducedGrid> {
        &self.grid
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Sup-norm distance to another field on the same layout.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        debug_assert!(self.grid.same_layout(other.grid()));
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Weighted inner product including the orbit factor, the discrete
    /// L^2(mu_g) pairing of the reduced problem.
    pub fn weighted_inner(&self, other: &Field) -> f64 {
        debug_assert!(self.grid.same_layout(other.grid()));
        let m = self.grid.node_measure();
        let dot: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .zip(m)
            .map(|((a, b), w)| a * b * w)
            .sum();
        dot * self.grid.orbit_factor()
    }

    pub fn weighted_norm(&self) -> f64 {
        self.weighted_inner(self).sqrt()
    }

    /// Measure-normalized root-mean-square, the scale-free residual norm used
    /// by the solvers.
    pub fn rms_weighted(&self) -> f64 {
        let m = self.grid.node_measure();
        let num: f64 = self.values.iter().zip(m).map(|(v, w)| v * v * w).sum();
        (num / self.grid.total_measure()).sqrt()
    }
}

/// Apply the reduced Laplace-Beltrami operator, writing into `out`.
pub fn laplace_into(field: &Field, out: &mut [f64]) {
    let grid = field.grid();
    let u = field.values();
    debug_assert_eq!(out.len(), u.len());
    let h = grid.h_s();
    let wf = grid.w_face();
    let m = grid.node_measure();

    match grid.kind() {
        GridKind::LatitudeS | GridKind::LatitudeAlpha => {
            // Flux through face f: c_f (u_{i+1} - u_i), zero beyond the ends
            // (the weight vanishes there).
            let scale = if grid.kind() == GridKind::LatitudeS {
                crate::grid::TWO_PI
            } else {
                1.0
            };
            let count = u.len();
            let mut flux_prev = 0.0;
            for i in 0..count {
                let flux_next = if i + 1 < count {
                    scale * wf[i] / h * (u[i + 1] - u[i])
                } else {
                    0.0
                };
                out[i] = (flux_next - flux_prev) / m[i];
                flux_prev = flux_next;
            }
        }
        GridKind::DiskSTheta => {
            let rings = grid.ring_count();
            let nt = grid.n_theta();
            let ht = grid.h_theta();
            let pole = grid.pole_index().expect("disk has pole");
            let u_pole = u[pole];
            let mut pole_flux = 0.0;
            for i in 0..rings {
                let s = grid.nodes_s()[i];
                let inv_cos2 = 1.0 / (s.cos() * s.cos());
                let theta_coef = inv_cos2 / (ht * ht);
                // Radial flux coefficients per theta cell.
                let c_lo = if i > 0 { wf[i - 1] * ht / h } else { 0.0 };
                let c_hi = wf[i] * ht / h;
                let row = i * nt;
                let m_row = m[row];
                for j in 0..nt {
                    let idx = row + j;
                    let up = if i + 1 < rings { u[row + nt + j] } else { u_pole };
                    let down = if i > 0 { u[row - nt + j] } else { 0.0 };
                    let mut flux = c_hi * (up - u[idx]);
                    if i > 0 {
                        flux += c_lo * (down - u[idx]);
                    }
                    let jl = if j == 0 { nt - 1 } else { j - 1 };
                    let jr = if j + 1 == nt { 0 } else { j + 1 };
                    out[idx] = flux / m_row
                        + theta_coef * (u[row + jr] - 2.0 * u[idx] + u[row + jl]);
                }
                if i + 1 == rings {
                    let c = wf[rings - 1] * ht / h;
                    for j in 0..nt {
                        pole_flux += c * (u[row + j] - u_pole);
                    }
                }
            }
            out[pole] = pole_flux / m[pole];
        }
    }
}

/// The reduced Laplacian as a new field.
pub fn laplace_reduced(field: &Field) -> Field {
    let mut out = vec![0.0; field.values().len()];
    laplace_into(field, &mut out);
    Field {
        grid: field.grid().clone(),
        values: out,
        epsilon: field.epsilon(),
    }
}

/// Allen-Cahn energy E_eps(u) = ∫ eps/2 |grad u|^2 + W(u)/eps over the whole
/// sphere (orbit factor included).
pub fn energy(field: &Field, pot: &PotentialSpec) -> f64 {
    let grid = field.grid();
    let u = field.values();
    let eps = field.epsilon();
    let h = grid.h_s();
    let wf = grid.w_face();

    let mut grad_term = 0.0;
    match grid.kind() {
        GridKind::LatitudeS | GridKind::LatitudeAlpha => {
            let scale = if grid.kind() == GridKind::LatitudeS {
                crate::grid::TWO_PI
            } else {
                1.0
            };
            for i in 0..u.len() - 1 {
                let g = (u[i + 1] - u[i]) / h;
                grad_term += scale * wf[i] * h * g * g;
            }
        }
        GridKind::DiskSTheta => {
            let rings = grid.ring_count();
            let nt = grid.n_theta();
            let ht = grid.h_theta();
            let u_pole = u[grid.pole_index().expect("disk has pole")];
            for i in 0..rings {
                let row = i * nt;
                // Radial faces above ring i.
                let c = wf[i] * h * ht;
                for j in 0..nt {
                    let up = if i + 1 < rings { u[row + nt + j] } else { u_pole };
                    let g = (up - u[row + j]) / h;
                    grad_term += c * g * g;
                }
                // Angular faces within ring i.
                let s = grid.nodes_s()[i];
                let ct = grid.w_node()[i] * h * ht / (s.cos() * s.cos());
                for j in 0..nt {
                    let jr = if j + 1 == nt { 0 } else { j + 1 };
                    let g = (u[row + jr] - u[row + j]) / ht;
                    grad_term += ct * g * g;
                }
            }
        }
    }

    let m = grid.node_measure();
    let well: f64 = u.iter().zip(m).map(|(&v, w)| (pot.w)(v) * w).sum();
    grid.orbit_factor() * (0.5 * eps * grad_term + well / eps)
}

/// L^2(weighted)-gradient of the energy: g = -(eps Lap u - W'(u)/eps), so
/// that d/dtau E(u + tau h)|_0 = <g, h>_weighted exactly in the discrete
/// setting.
pub fn energy_gradient(field: &Field, pot: &PotentialSpec) -> Field {
    let mut out = vec![0.0; field.values().len()];
    laplace_into(field, &mut out);
    let eps = field.epsilon();
    for (g, &v) in out.iter_mut().zip(field.values()) {
        *g = -(eps * *g - (pot.dw)(v) / eps);
    }
    Field {
        grid: field.grid().clone(),
        values: out,
        epsilon: eps,
    }
}

/// Nodal |grad u|^2, averaging the squares of adjacent face gradients.
fn gradient_square(field: &Field) -> Vec<f64> {
    let grid = field.grid();
    let u = field.values();
    let h = grid.h_s();
    let mut g2 = vec![0.0; u.len()];

    match grid.kind() {
        GridKind::LatitudeS | GridKind::LatitudeAlpha => {
            let count = u.len();
            for i in 0..count {
                let mut acc = 0.0;
                let mut faces = 0.0;
                if i > 0 {
                    let g = (u[i] - u[i - 1]) / h;
                    acc += g * g;
                    faces += 1.0;
                }
                if i + 1 < count {
                    let g = (u[i + 1] - u[i]) / h;
                    acc += g * g;
                    faces += 1.0;
                }
                g2[i] = if faces > 0.0 { acc / faces } else { 0.0 };
            }
        }
        GridKind::DiskSTheta => {
            let rings = grid.ring_count();
            let nt = grid.n_theta();
            let ht = grid.h_theta();
            let pole = grid.pole_index().expect("disk has pole");
            let u_pole = u[pole];
            let mut pole_acc = 0.0;
            for i in 0..rings {
                let row = i * nt;
                let s = grid.nodes_s()[i];
                let inv_cos2 = 1.0 / (s.cos() * s.cos());
                for j in 0..nt {
                    let idx = row + j;
                    let mut acc = 0.0;
                    let mut faces = 0.0;
                    if i > 0 {
                        let g = (u[idx] - u[row - nt + j]) / h;
                        acc += g * g;
                        faces += 1.0;
                    }
                    let up = if i + 1 < rings { u[row + nt + j] } else { u_pole };
                    let g = (up - u[idx]) / h;
                    acc += g * g;
                    faces += 1.0;
                    if i + 1 == rings {
                        pole_acc += g * g;
                    }
                    let jl = if j == 0 { nt - 1 } else { j - 1 };
                    let jr = if j + 1 == nt { 0 } else { j + 1 };
                    let gl = (u[idx] - u[row + jl]) / ht;
                    let gr = (u[row + jr] - u[idx]) / ht;
                    acc += inv_cos2 * 0.5 * (gl * gl + gr * gr);
                    faces += 1.0;
                    g2[idx] = acc / faces;
                }
            }
            g2[pole] = pole_acc / nt as f64;
        }
    }
    g2
}

/// Weight-measure mass (the varifold convention carries a factor 1/2) and
/// the unit-density area estimate mass/sigma. Nodes with vanishing gradient
/// are excluded, so constants report (0, 0).
pub fn weight_measure_mass(field: &Field, pot: &PotentialSpec) -> (f64, f64) {
    let grid = field.grid();
    let eps = field.epsilon();
    let g2 = gradient_square(field);
    let m = grid.node_measure();
    let mut total = 0.0;
    for ((&v, &gg), &w) in field.values().iter().zip(&g2).zip(m) {
        if gg > 0.0 {
            total += (0.5 * eps * gg + (pot.w)(v) / eps) * w;
        }
    }
    let mass = 0.5 * grid.orbit_factor() * total;
    (mass, mass / pot.sigma)
}

/// Rotate a disk field by `shift` theta-cells: out(i, j) = in(i, j - shift).
/// The polar value is fixed by any rotation.
pub fn rotate_theta(field: &Field, shift: usize) -> Result<Field> {
    let grid = field.grid();
    if grid.kind() != GridKind::DiskSTheta {
        return Err(Error::Usage("theta rotation requires a disk field".into()));
    }
    let nt = grid.n_theta();
    let shift = shift % nt;
    let mut values = field.values().to_vec();
    for i in 0..grid.ring_count() {
        let row = i * nt;
        for j in 0..nt {
            let src = (j + nt - shift) % nt;
            values[row + j] = field.values()[row + src];
        }
    }
    Field::from_values(grid.clone(), field.epsilon(), values)
}

/// Embed a 1-D latitude-s field into a disk grid with matching radial layout
/// by copying each ring value around the circle. A theta-independent critical
/// point of the 1-D operator is exactly critical for the disk operator.
pub fn embed_radial(field: &Field, disk: Arc<ReducedGrid>) -> Result<Field> {
    if !disk.radial_matches(field.grid()) {
        return Err(Error::Usage(
            "disk grid does not share the radial layout of the 1-D field".into(),
        ));
    }
    let nt = disk.n_theta();
    let mut values = Vec::with_capacity(disk.value_count());
    for i in 0..disk.ring_count() {
        values.extend(std::iter::repeat(field.values()[i]).take(nt));
    }
    values.push(field.values()[field.grid().value_count() - 1]);
    Field::from_values(disk, field.epsilon(), values)
}

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotMeta {
    n: u32,
    epsilon: f64,
    grid_kind: String,
    n_s: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_theta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pole_value: Option<f64>,
}

/// Write a field snapshot: a CSV of node values plus a JSON sidecar with the
/// grid metadata (same path, .json extension). Disk snapshots list the rings
/// only; the polar value lives in the sidecar.
pub fn write_snapshot(field: &Field, csv_path: &Path) -> Result<()> {
    let grid = field.grid();
    let mut csv = std::io::BufWriter::new(std::fs::File::create(csv_path)?);
    let mut pole_value = None;
    match grid.kind() {
        GridKind::LatitudeS | GridKind::LatitudeAlpha => {
            writeln!(csv, "s,u")?;
            for (s, v) in grid.nodes_s().iter().zip(field.values()) {
                writeln!(csv, "{s},{v}")?;
            }
        }
        GridKind::DiskSTheta => {
            writeln!(csv, "s,theta,u")?;
            let nt = grid.n_theta();
            for i in 0..grid.ring_count() {
                let s = grid.nodes_s()[i];
                for j in 0..nt {
                    writeln!(csv, "{s},{},{}", grid.theta_node(j), field.values()[i * nt + j])?;
                }
            }
            pole_value = Some(field.values()[grid.pole_index().expect("disk has pole")]);
        }
    }
    csv.flush()?;

    let meta = SnapshotMeta {
        n: grid.n(),
        epsilon: field.epsilon(),
        grid_kind: grid.kind().name().to_string(),
        n_s: grid.n_s(),
        n_theta: (grid.kind() == GridKind::DiskSTheta).then(|| grid.n_theta()),
        pole_value,
    };
    let json = serde_json::to_string_pretty(&meta)
        .map_err(|e| Error::Format(format!("sidecar serialization: {e}")))?;
    std::fs::write(csv_path.with_extension("json"), json)?;
    Ok(())
}

/// Read a snapshot written by [`write_snapshot`].
pub fn read_snapshot(csv_path: &Path) -> Result<Field> {
    let meta_text = std::fs::read_to_string(csv_path.with_extension("json"))?;
    let meta: SnapshotMeta =
        serde_json::from_str(&meta_text).map_err(|e| Error::Format(format!("sidecar: {e}")))?;
    let kind: GridKind = meta.grid_kind.parse()?;
    let grid = match kind {
        GridKind::LatitudeS => ReducedGrid::latitude_s(meta.n, meta.n_s)?,
        GridKind::LatitudeAlpha => ReducedGrid::latitude_alpha(meta.n, meta.n_s)?,
        GridKind::DiskSTheta => ReducedGrid::disk(
            meta.n,
            meta.n_s,
            meta.n_theta
                .ok_or_else(|| Error::Format("disk sidecar missing n_theta".into()))?,
        )?,
    };

    let file = std::io::BufReader::new(std::fs::File::open(csv_path)?);
    let mut values = Vec::with_capacity(grid.value_count());
    for (line_no, line) in file.lines().enumerate() {
        let line = line?;
        if line_no == 0 || line.trim().is_empty() {
            continue;
        }
        let value = line
            .rsplit(',')
            .next()
            .ok_or_else(|| Error::Format(format!("bad csv line {}", line_no + 1)))?
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::Format(format!("line {}: {e}", line_no + 1)))?;
        values.push(value);
    }
    if kind == GridKind::DiskSTheta {
        values.push(
            meta.pole_value
                .ok_or_else(|| Error::Format("disk sidecar missing pole_value".into()))?,
        );
    }
    Field::from_values(grid, meta.epsilon, values)
}
