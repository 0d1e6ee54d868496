//! Double-well potential and the one-dimensional heteroclinic profile.

use crate::error::{Error, Result};

/// A smooth double-well potential together with the constants derived from it.
///
/// The contract: `w >= 0`, `w(+-1) = 0`, `dw(+-1) = 0`, `d2w(+-1) > 0`,
/// `sigma = ∫_{-1}^{1} sqrt(w(t)/2) dt`, and the heteroclinic connecting the
/// wells is `tanh(t / (width_factor * eps))`.
#[derive(Clone, Copy)]
pub struct PotentialSpec {
    /// Well value W(t).
    pub w: fn(f64) -> f64,
    /// First derivative W'(t).
    pub dw: fn(f64) -> f64,
    /// Second derivative W''(t).
    pub d2w: fn(f64) -> f64,
    /// Surface-tension constant, the energy of the heteroclinic profile.
    pub sigma: f64,
    /// Width factor c in the profile tanh(t / (c * eps)).
    pub width_factor: f64,
    /// max |W''| over [-1, 1]; bounds the explicit reaction rate.
    pub max_d2w: f64,
}

impl std::fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("sigma", &self.sigma)
            .field("width_factor", &self.width_factor)
            .finish()
    }
}

fn quartic_w(t: f64) -> f64 {
    let s = 1.0 - t * t;
    0.25 * s * s
}

fn quartic_dw(t: f64) -> f64 {
    // W'(t) = t^3 - t
    t * t * t - t
}

fn quartic_d2w(t: f64) -> f64 {
    3.0 * t * t - 1.0
}

impl Default for PotentialSpec {
    /// The standard quartic well W(t) = (1 - t^2)^2 / 4.
    ///
    /// sigma = ∫ (1 - t^2)/(2 sqrt 2) dt = sqrt(2)/3, and the heteroclinic
    /// is tanh(t / (sqrt(2) eps)).
    fn default() -> Self {
        PotentialSpec {
            w: quartic_w,
            dw: quartic_dw,
            d2w: quartic_d2w,
            sigma: std::f64::consts::SQRT_2 / 3.0,
            width_factor: std::f64::consts::SQRT_2,
            max_d2w: 2.0,
        }
    }
}

impl PotentialSpec {
    /// Heteroclinic profile H_eps(t), the bounded solution of
    /// eps^2 H'' = W'(H) with H(+-inf) = +-1 and H(0) = 0.
    pub fn heteroclinic(&self, eps: f64, t: f64) -> Result<f64> {
        if eps <= 0.0 || !eps.is_finite() {
            return Err(Error::Domain(format!("epsilon must be positive, got {eps}")));
        }
        Ok((t / (self.width_factor * eps)).tanh())
    }
}

/// Free-function form of [`PotentialSpec::heteroclinic`].
pub fn heteroclinic_profile(pot: &PotentialSpec, eps: f64, t: f64) -> Result<f64> {
    pot.heteroclinic(eps, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sigma_matches_quadrature() {
        // Independent oracle: high-resolution midpoint quadrature of
        // ∫ sqrt(W/2) over [-1, 1].
        let pot = PotentialSpec::default();
        let n = 200_000;
        let h = 2.0 / n as f64;
        let quad: f64 = (0..n)
            .map(|i| {
                let t = -1.0 + (i as f64 + 0.5) * h;
                ((pot.w)(t) / 2.0).sqrt() * h
            })
            .sum();
        assert_relative_eq!(pot.sigma, quad, max_relative = 1e-9);
        assert_relative_eq!(pot.sigma, 2f64.sqrt() / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn well_contract() {
        let pot = PotentialSpec::default();
        assert_eq!((pot.w)(1.0), 0.0);
        assert_eq!((pot.w)(-1.0), 0.0);
        assert_eq!((pot.dw)(1.0), 0.0);
        assert_eq!((pot.dw)(-1.0), 0.0);
        assert!((pot.d2w)(1.0) > 0.0 && (pot.d2w)(-1.0) > 0.0);
        assert_eq!((pot.d2w)(1.0), 2.0);
        assert_eq!((pot.d2w)(0.0), -1.0);
    }

    #[test]
    fn heteroclinic_residual_small() {
        // |eps^2 H'' - W'(H)| < 1e-10 pointwise, H'' by central differences
        // would lose digits; use the closed-form second derivative of tanh.
        let pot = PotentialSpec::default();
        for &eps in &[0.05, 0.1, 0.2] {
            let c = pot.width_factor * eps;
            for i in 0..1000 {
                let t = -2.0 + 4.0 * (i as f64 + 0.5) / 1000.0;
                let h = pot.heteroclinic(eps, t).unwrap();
                // H'' = -2 tanh sech^2 / c^2 = -2 h (1 - h^2) / c^2
                let hdd = -2.0 * h * (1.0 - h * h) / (c * c);
                let res = eps * eps * hdd - (pot.dw)(h);
                assert!(
                    res.abs() < 1e-10,
                    "residual {res:.3e} at eps={eps}, t={t}"
                );
            }
        }
    }

    #[test]
    fn heteroclinic_examples() {
        let pot = PotentialSpec::default();
        assert_eq!(pot.heteroclinic(0.1, 0.0).unwrap(), 0.0);
        // Far field approaches the well value.
        assert!((pot.heteroclinic(0.1, 50.0).unwrap() - 1.0).abs() < 1e-12);
        // Inverse of the closed form: t = eps*sqrt(2)*atanh(1/2) maps to 1/2.
        let t = 0.1 * 2f64.sqrt() * 0.5f64.atanh();
        assert_relative_eq!(pot.heteroclinic(0.1, t).unwrap(), 0.5, epsilon = 1e-14);
        assert!(pot.heteroclinic(0.0, 1.0).is_err());
        assert!(pot.heteroclinic(-0.1, 1.0).is_err());
    }
}
