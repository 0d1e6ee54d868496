//! Closed-form areas of round spheres and Clifford hypersurfaces, the
//! density-ratio sequences d(n) and a(n), and the auxiliary functions used
//! by the monotonicity lemmas.
//!
//! Every x^x-type term is accumulated in log space: direct powers overflow
//! f64 beyond n ≈ 140. Half-integer factorials go through the log-Gamma
//! function so odd and even dimensions share one code path.

pub mod appendix;

pub use appendix::{verify_appendices, AppendixFailure, AppendixReport};

use crate::error::{Error, Result};

/// ln Area(S^n(1)) = ln 2 + (n+1)/2 ln pi - ln Gamma((n+1)/2).
pub fn unit_sphere_ln_area(n: u32) -> f64 {
    let half = (n as f64 + 1.0) / 2.0;
    std::f64::consts::LN_2 + half * std::f64::consts::PI.ln() - libm::lgamma(half)
}

/// Surface area of the round n-sphere of the given radius.
pub fn sphere_area(n: u32, radius: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("sphere dimension must be >= 1".into()));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("radius must be positive, got {radius}")));
    }
    Ok((unit_sphere_ln_area(n) + n as f64 * radius.ln()).exp())
}

/// A Clifford hypersurface T_{p,q} = S^p(sqrt(p/n)) x S^q(sqrt(q/n))
/// inside S^{n+1}, n = p + q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CliffordSpec {
    pub p: u32,
    pub q: u32,
}

impl CliffordSpec {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p < 1 || q < 1 {
            return Err(Error::Domain(format!(
                "Clifford factors must satisfy p, q >= 1, got ({p}, {q})"
            )));
        }
        Ok(CliffordSpec { p, q })
    }

    /// Hypersurface dimension n = p + q.
    pub fn n(&self) -> u32 {
        self.p + self.q
    }

    /// ln Area(T_{p,q}); the factor radii contribute (k/2) ln(k/n) each.
    pub fn ln_area(&self) -> f64 {
        let n = self.n() as f64;
        let (p, q) = (self.p as f64, self.q as f64);
        unit_sphere_ln_area(self.p) + 0.5 * p * (p.ln() - n.ln())
            + unit_sphere_ln_area(self.q)
            + 0.5 * q * (q.ln() - n.ln())
    }

    pub fn area(&self) -> f64 {
        self.ln_area().exp()
    }
}

/// Area of T_{p,q}; product of the two factor-sphere areas.
pub fn clifford_area(spec: CliffordSpec) -> f64 {
    spec.area()
}

/// Density ratio d(n) = Area(T_{1,n-1}) / Area(S^n).
///
/// Strictly decreasing in n with sqrt(2 pi / e) < d(n) <= pi/2.
pub fn density_ratio(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("density ratio needs n >= 2, got {n}")));
    }
    let t = CliffordSpec::new(1, n - 1)?;
    Ok((t.ln_area() - unit_sphere_ln_area(n)).exp())
}

/// The Clifford hypersurface of least area among all T_{p,q} with p + q = n,
/// found by brute-force argmin over p <= q (areas compared in log space).
pub fn min_clifford(n: u32) -> Result<(CliffordSpec, f64)> {
    if n < 2 {
        return Err(Error::Domain(format!("min_clifford needs n >= 2, got {n}")));
    }
    let mut best: Option<(CliffordSpec, f64)> = None;
    for p in 1..=n / 2 {
        let spec = CliffordSpec::new(p, n - p)?;
        let ln_a = spec.ln_area();
        match best {
            Some((_, cur)) if cur <= ln_a => {}
            _ => best = Some((spec, ln_a)),
        }
    }
    let (spec, ln_a) = best.expect("n >= 2 yields at least one decomposition");
    Ok((spec, ln_a.exp()))
}

/// a_n = Area(T_min^n) / Area(S^n); strictly decreasing with limit sqrt 2.
pub fn min_ratio(n: u32) -> Result<f64> {
    let (spec, _) = min_clifford(n)?;
    Ok((spec.ln_area() - unit_sphere_ln_area(n)).exp())
}

/// The six auxiliary functions of the area-comparison lemmas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum LemmaFn {
    /// h(x) = sqrt((x+1)^{x+3} x^{x-2} / ((x+2)^{x+2} (x-1)^{x-1})), x >= 2;
    /// increasing with limit 1; equals d(n+2)/d(n).
    H,
    /// m(x) = sqrt(x^{2x-2} (x+1)^4 (x+3)^{x+3} / ((x-1)^{x-1} (x+2)^{2x+6})),
    /// x >= 2; increasing with limit 1.
    M,
    /// p(x) = (x+2)^{x+2} / (x^x (x+1)^2), x >= 1; increasing.
    P,
    /// q(x) = sqrt((x-2)^{x-2} (x+1)^{x+1} / ((x-1)^{x-3} x^{x+2})), x >= 3;
    /// decreasing with limit 1.
    Q,
    /// u(x), x >= 1; ratio of consecutive a-sequence quotients (even chain), > 1.
    U,
    /// v(x), x >= 1; ratio of consecutive a-sequence quotients (odd chain), > 1.
    V,
}

impl LemmaFn {
    pub fn domain_start(self) -> f64 {
        match self {
            LemmaFn::H | LemmaFn::M => 2.0,
            LemmaFn::P | LemmaFn::U | LemmaFn::V => 1.0,
            LemmaFn::Q => 3.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LemmaFn::H => "h",
            LemmaFn::M => "m",
            LemmaFn::P => "p",
            LemmaFn::Q => "q",
            LemmaFn::U => "u",
            LemmaFn::V => "v",
        }
    }
}

impl std::str::FromStr for LemmaFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h" => Ok(LemmaFn::H),
            "m" => Ok(LemmaFn::M),
            "p" => Ok(LemmaFn::P),
            "q" => Ok(LemmaFn::Q),
            "u" => Ok(LemmaFn::U),
            "v" => Ok(LemmaFn::V),
            other => Err(Error::Usage(format!(
                "unknown lemma function {other:?}; expected one of h, m, p, q, u, v"
            ))),
        }
    }
}

/// x ln x with the convention 0 ln 0 = 0 (the exponent vanishes there).
fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Evaluate one of the lemma functions at x, in log space.
pub fn lemma_function(name: LemmaFn, x: f64) -> Result<f64> {
    let start = name.domain_start();
    if !(x >= start) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "lemma function {} is defined on [{start}, inf), got x = {x}",
            name.name()
        )));
    }
    let ln = match name {
        LemmaFn::H => {
            0.5 * ((x + 3.0) * (x + 1.0).ln() + (x - 2.0) * x.ln()
                - (x + 2.0) * (x + 2.0).ln()
                - xlnx(x - 1.0))
        }
        LemmaFn::M => {
            0.5 * ((2.0 * x - 2.0) * x.ln() + 4.0 * (x + 1.0).ln()
                + (x + 3.0) * (x + 3.0).ln()
                - xlnx(x - 1.0)
                - (2.0 * x + 6.0) * (x + 2.0).ln())
        }
        LemmaFn::P => (x + 2.0) * (x + 2.0).ln() - xlnx(x) - 2.0 * (x + 1.0).ln(),
        LemmaFn::Q => {
            0.5 * (xlnx(x - 2.0) + (x + 1.0) * (x + 1.0).ln()
                - (x - 3.0) * (x - 1.0).ln()
                - (x + 2.0) * x.ln())
        }
        LemmaFn::U => {
            (16f64).ln()
                + 0.5
                    * ((x + 2.0) * (x + 2.0).ln() + (x + 3.0) * (x + 3.0).ln()
                        + (2.0 * x - 1.0) * (2.0 * x + 1.0).ln()
                        - xlnx(x)
                        - (x - 3.0) * (x + 1.0).ln()
                        - 2.0 * (2.0 * x + 3.0).ln()
                        - (2.0 * x + 5.0) * (2.0 * x + 5.0).ln())
        }
        LemmaFn::V => {
            -(16f64).ln()
                + 0.5
                    * (xlnx(x) + (x + 1.0) * (x + 1.0).ln()
                        + 2.0 * (2.0 * x + 3.0).ln()
                        + (2.0 * x + 7.0) * (2.0 * x + 5.0).ln()
                        - (x + 6.0) * (x + 2.0).ln()
                        - (x + 3.0) * (x + 3.0).ln()
                        - (2.0 * x + 1.0) * (2.0 * x + 1.0).ln())
        }
    };
    Ok(ln.exp())
}
