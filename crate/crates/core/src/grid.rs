//! Symmetry-reduced grids on the round sphere S^{n+1}.
//!
//! Three reductions are supported:
//!
//! * `LatitudeS` — functions of the latitude s in [0, pi/2] with
//!   cos^2 s = x_1^2 + x_2^2 (invariant under rotations of both blocks);
//!   weight w(s) = cos s sin^{n-1} s.
//! * `LatitudeAlpha` — functions of x_1 = sin(alpha) alone, alpha in
//!   [-pi/2, pi/2]; weight v(alpha) = cos^n alpha.
//! * `DiskSTheta` — functions of (s, theta), theta the angle in the
//!   (x_1, x_2)-plane (invariant under rotations of the last n coordinates).
//!
//! Discretization is finite volume in divergence form with weights at the
//! half-nodes, so the vanishing of the weight at the coordinate ends supplies
//! the natural flux conditions without special-casing w'/w. For `LatitudeS`
//! and `DiskSTheta` the collapsed theta-circle at s = pi/2 is a genuine point
//! of the reduced domain and is stored as a single shared polar unknown, one
//! radial spacing away from the last ring of cell centers.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::unit_sphere_ln_area;
use crate::linalg::Tridiag;

pub const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;
pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GridKind {
    LatitudeS,
    LatitudeAlpha,
    DiskSTheta,
}

impl GridKind {
    pub fn name(self) -> &'static str {
        match self {
            GridKind::LatitudeS => "latitude-s",
            GridKind::LatitudeAlpha => "latitude-alpha",
            GridKind::DiskSTheta => "disk-s-theta",
        }
    }
}

impl std::str::FromStr for GridKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "latitude-s" => Ok(GridKind::LatitudeS),
            "latitude-alpha" => Ok(GridKind::LatitudeAlpha),
            "disk-s-theta" => Ok(GridKind::DiskSTheta),
            other => Err(Error::Format(format!("unknown grid kind {other:?}"))),
        }
    }
}

/// A discretized symmetry-reduced domain with volume weights.
#[derive(Debug)]
pub struct ReducedGrid {
    n: u32,
    kind: GridKind,
    n_s: usize,
    n_theta: usize,
    h_s: f64,
    h_theta: f64,
    /// Radial node coordinates. For LatitudeS/DiskSTheta the last entry is
    /// the pole s = pi/2; the others are ring cell centers.
    nodes_s: Vec<f64>,
    /// Radial weight at the nodes (zero at the pole entry).
    w_node: Vec<f64>,
    /// Radial weight at the interior faces between consecutive radial nodes.
    w_face: Vec<f64>,
    /// Per-unknown quadrature measure, absolute up to the orbit factor.
    node_measure: Vec<f64>,
}

fn weight_s(n: u32, s: f64) -> f64 {
    s.cos() * s.sin().powi(n as i32 - 1)
}

fn weight_alpha(n: u32, a: f64) -> f64 {
    a.cos().powi(n as i32)
}

impl ReducedGrid {
    /// 1-D latitude grid for fields of s alone: n_s unknowns, the last being
    /// the shared value at s = pi/2.
    pub fn latitude_s(n: u32, n_s: usize) -> Result<Arc<Self>> {
        Self::check(n, n_s)?;
        let h = HALF_PI / (n_s as f64 - 0.5);
        let mut nodes_s: Vec<f64> = (0..n_s - 1).map(|i| (i as f64 + 0.5) * h).collect();
        nodes_s.push(HALF_PI);
        let w_node: Vec<f64> = nodes_s.iter().map(|&s| weight_s(n, s)).collect();
        let w_face: Vec<f64> = (0..n_s - 1).map(|i| weight_s(n, (i as f64 + 1.0) * h)).collect();
        let mut node_measure: Vec<f64> =
            nodes_s[..n_s - 1].iter().map(|&s| TWO_PI * weight_s(n, s) * h).collect();
        node_measure.push(Self::pole_measure(n, h));
        Ok(Arc::new(ReducedGrid {
            n,
            kind: GridKind::LatitudeS,
            n_s,
            n_theta: 1,
            h_s: h,
            h_theta: 0.0,
            nodes_s,
            w_node,
            w_face,
            node_measure,
        }))
    }

    /// 1-D grid in alpha for fields of x_1 alone: n_s cell centers on
    /// [-pi/2, pi/2], no polar unknowns (the weight vanishes at both ends).
    pub fn latitude_alpha(n: u32, n_s: usize) -> Result<Arc<Self>> {
        Self::check(n, n_s)?;
        let h = std::f64::consts::PI / n_s as f64;
        let nodes_s: Vec<f64> =
            (0..n_s).map(|i| -HALF_PI + (i as f64 + 0.5) * h).collect();
        let w_node: Vec<f64> = nodes_s.iter().map(|&a| weight_alpha(n, a)).collect();
        let w_face: Vec<f64> = (0..n_s - 1)
            .map(|i| weight_alpha(n, -HALF_PI + (i as f64 + 1.0) * h))
            .collect();
        let node_measure: Vec<f64> = w_node.iter().map(|&w| w * h).collect();
        Ok(Arc::new(ReducedGrid {
            n,
            kind: GridKind::LatitudeAlpha,
            n_s,
            n_theta: 1,
            h_s: h,
            h_theta: 0.0,
            nodes_s,
            w_node,
            w_face,
            node_measure,
        }))
    }

    /// 2-D (s, theta) grid: (n_s - 1) rings of n_theta cells plus the shared
    /// polar unknown at s = pi/2. Radial layout matches `latitude_s(n, n_s)`.
    pub fn disk(n: u32, n_s: usize, n_theta: usize) -> Result<Arc<Self>> {
        Self::check(n, n_s)?;
        if n_theta < 4 {
            return Err(Error::Domain(format!("disk grid needs n_theta >= 4, got {n_theta}")));
        }
        let radial = Self::latitude_s(n, n_s)?;
        let h_theta = TWO_PI / n_theta as f64;
        let rings = n_s - 1;
        let mut node_measure = Vec::with_capacity(rings * n_theta + 1);
        for i in 0..rings {
            let m = radial.w_node[i] * radial.h_s * h_theta;
            node_measure.extend(std::iter::repeat(m).take(n_theta));
        }
        node_measure.push(Self::pole_measure(n, radial.h_s));
        Ok(Arc::new(ReducedGrid {
            n,
            kind: GridKind::DiskSTheta,
            n_s,
            n_theta,
            h_s: radial.h_s,
            h_theta,
            nodes_s: radial.nodes_s.clone(),
            w_node: radial.w_node.clone(),
            w_face: radial.w_face.clone(),
            node_measure,
        }))
    }

    fn check(n: u32, n_s: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::Domain(format!("reduced grids need n >= 2, got n = {n}")));
        }
        if n_s < 8 {
            return Err(Error::Domain(format!("grid needs n_s >= 8, got {n_s}")));
        }
        Ok(())
    }

    /// Measure of the polar cap cell [pi/2 - h/2, pi/2] over all theta:
    /// the antiderivative of w is sin^n(s)/n, so this is exact.
    fn pole_measure(n: u32, h: f64) -> f64 {
        TWO_PI * (1.0 - (h / 2.0).cos().powi(n as i32)) / n as f64
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn h_s(&self) -> f64 {
        self.h_s
    }

    pub fn h_theta(&self) -> f64 {
        self.h_theta
    }

    pub fn nodes_s(&self) -> &[f64] {
        &self.nodes_s
    }

    pub fn w_node(&self) -> &[f64] {
        &self.w_node
    }

    pub fn w_face(&self) -> &[f64] {
        &self.w_face
    }

    pub fn node_measure(&self) -> &[f64] {
        &self.node_measure
    }

    pub fn theta_node(&self, j: usize) -> f64 {
        j as f64 * self.h_theta
    }

    /// Number of scalar unknowns a field on this grid carries.
    pub fn value_count(&self) -> usize {
        match self.kind {
            GridKind::LatitudeS | GridKind::LatitudeAlpha => self.n_s,
            GridKind::DiskSTheta => (self.n_s - 1) * self.n_theta + 1,
        }
    }

    /// Number of radial ring nodes (excludes the pole where present).
    pub fn ring_count(&self) -> usize {
        match self.kind {
            GridKind::LatitudeAlpha => self.n_s,
            _ => self.n_s - 1,
        }
    }

    pub fn has_pole(&self) -> bool {
        matches!(self.kind, GridKind::LatitudeS | GridKind::DiskSTheta)
    }

    pub fn pole_index(&self) -> Option<usize> {
        self.has_pole().then(|| self.value_count() - 1)
    }

    /// Flattened index of ring node (i, j) on the disk grid.
    pub fn disk_index(&self, i: usize, j: usize) -> usize {
        debug_assert_eq!(self.kind, GridKind::DiskSTheta);
        i * self.n_theta + j
    }

    /// Area of the orbit suppressed by the reduction: S^{n-1} for the
    /// s-based kinds, S^n for the alpha kind (slices {x_1 = sin alpha} are
    /// spheres S^n(cos alpha)).
    pub fn orbit_factor(&self) -> f64 {
        match self.kind {
            GridKind::LatitudeS | GridKind::DiskSTheta => unit_sphere_ln_area(self.n - 1).exp(),
            GridKind::LatitudeAlpha => unit_sphere_ln_area(self.n).exp(),
        }
    }

    /// Quadrature of nodal values against the grid measure (orbit factor not
    /// included).
    pub fn quadrature(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.value_count());
        self.node_measure.iter().zip(values).map(|(m, v)| m * v).sum()
    }

    pub fn total_measure(&self) -> f64 {
        self.node_measure.iter().sum()
    }

    /// Exact reduced volume: the integral of 1 against the continuum weight,
    /// so that `total_measure` should reproduce it to the scheme's order.
    pub fn exact_reduced_volume(&self) -> f64 {
        match self.kind {
            // int_0^{pi/2} 2 pi cos s sin^{n-1} s ds = 2 pi / n
            GridKind::LatitudeS | GridKind::DiskSTheta => TWO_PI / self.n as f64,
            // int_{-pi/2}^{pi/2} cos^n a da = sqrt(pi) Gamma((n+1)/2)/Gamma(n/2+1)
            GridKind::LatitudeAlpha => {
                let n = self.n as f64;
                (0.5 * std::f64::consts::PI.ln() + libm::lgamma((n + 1.0) / 2.0)
                    - libm::lgamma(n / 2.0 + 1.0))
                .exp()
            }
        }
    }

    /// Two grids are layout-compatible when fields can be mapped node-wise
    /// between them (same reduction, dimension and resolution).
    pub fn same_layout(&self, other: &ReducedGrid) -> bool {
        self.n == other.n
            && self.kind == other.kind
            && self.n_s == other.n_s
            && self.n_theta == other.n_theta
    }

    /// Shares the radial layout of a 1-D latitude grid (used when embedding
    /// 1-D states into the disk).
    pub fn radial_matches(&self, radial: &ReducedGrid) -> bool {
        radial.kind == GridKind::LatitudeS && self.n == radial.n && self.n_s == radial.n_s
    }

    /// The radial divergence-form Laplacian as a tridiagonal operator.
    ///
    /// For the latitude kinds this is the full reduced Laplacian. For the
    /// disk it is the per-theta-column radial part, which coincides with the
    /// latitude-s operator. With `include_pole = false` the polar unknown is
    /// dropped and its flux term becomes a Dirichlet diagonal contribution at
    /// the last ring (the regular branch for the theta-modes k >= 1).
    pub fn radial_laplacian(&self, include_pole: bool) -> Tridiag {
        let h = self.h_s;
        match self.kind {
            GridKind::LatitudeAlpha => {
                let n = self.n_s;
                let c: Vec<f64> = self.w_face.iter().map(|&w| w / h).collect();
                let m = &self.node_measure;
                let mut diag = vec![0.0; n];
                let mut sub = vec![0.0; n - 1];
                let mut sup = vec![0.0; n - 1];
                for i in 0..n {
                    let lo = if i > 0 { c[i - 1] } else { 0.0 };
                    let hi = if i + 1 < n { c[i] } else { 0.0 };
                    diag[i] = -(lo + hi) / m[i];
                    if i + 1 < n {
                        sup[i] = hi / m[i];
                        sub[i] = c[i] / m[i + 1];
                    }
                }
                Tridiag { sub, diag, sup }
            }
            GridKind::LatitudeS | GridKind::DiskSTheta => {
                let rings = self.n_s - 1;
                let c: Vec<f64> = self.w_face.iter().map(|&w| TWO_PI * w / h).collect();
                // Radial measures in latitude-s normalization.
                let mut m: Vec<f64> = (0..rings).map(|i| TWO_PI * self.w_node[i] * h).collect();
                m.push(Self::pole_measure(self.n, h));
                let size = if include_pole { rings + 1 } else { rings };
                let mut diag = vec![0.0; size];
                let mut sub = vec![0.0; size - 1];
                let mut sup = vec![0.0; size - 1];
                for i in 0..size {
                    let lo = if i > 0 { c[i - 1] } else { 0.0 };
                    // The flux to the next node exists through face i for
                    // every ring; when the pole is excluded it still drains
                    // through the last face onto the (zero) polar value.
                    let hi = if i < rings { c[i] } else { 0.0 };
                    diag[i] = -(lo + hi) / m[i];
                    if i + 1 < size {
                        sup[i] = c[i] / m[i];
                        sub[i] = c[i] / m[i + 1];
                    }
                }
                Tridiag { sub, diag, sup }
            }
        }
    }
}
