//! Batch verification of the area inequalities: monotonicity and bounds of
//! the ratio sequences, the pairwise Clifford-area comparisons, the truncated
//! Euler products, and the brute-force minimum against its closed form.

use serde::{Deserialize, Serialize};

use super::{
    density_ratio, lemma_function, min_clifford, min_ratio, unit_sphere_ln_area, CliffordSpec,
    LemmaFn,
};
use crate::error::{Error, Result};

/// Margin used when asserting strict inequalities, so that rounding can
/// neither fake a pass nor hide a genuine tie.
const STRICT_MARGIN: f64 = 1e-12;

/// One failed check: which lemma, at which argument, and what went wrong.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AppendixFailure {
    pub lemma: String,
    pub argument: String,
    pub detail: String,
}

/// Outcome of [`verify_appendices`]; `pass` iff `failures` is empty.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AppendixReport {
    pub checked_range: (u32, u32),
    pub x_samples: u32,
    pub failures: Vec<AppendixFailure>,
    pub pass: bool,
}

impl AppendixReport {
    fn fail(&mut self, lemma: &str, argument: impl std::fmt::Display, detail: String) {
        self.failures.push(AppendixFailure {
            lemma: lemma.to_string(),
            argument: argument.to_string(),
            detail,
        });
    }

    fn finish(mut self) -> Self {
        self.pass = self.failures.is_empty();
        self
    }
}

/// One row of the ratio table emitted alongside the report.
#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub n: u32,
    pub d: f64,
    pub a: f64,
    pub d_lower: f64,
    pub d_upper: f64,
    pub a_lower: f64,
    pub pass: bool,
}

/// The d(n) / a(n) table for 2 <= n <= n_max with the per-row bound checks.
pub fn ratio_table(n_max: u32) -> Result<Vec<RatioRow>> {
    if n_max < 2 {
        return Err(Error::Domain(format!("ratio table needs n_max >= 2, got {n_max}")));
    }
    let d_lower = (2.0 * std::f64::consts::PI / std::f64::consts::E).sqrt();
    let d_upper = std::f64::consts::FRAC_PI_2;
    let a_lower = std::f64::consts::SQRT_2;
    (2..=n_max)
        .map(|n| {
            let d = density_ratio(n)?;
            let a = min_ratio(n)?;
            Ok(RatioRow {
                n,
                d,
                a,
                d_lower,
                d_upper,
                a_lower,
                pass: d > d_lower && d <= d_upper + STRICT_MARGIN && a > a_lower,
            })
        })
        .collect()
}

fn strictly_less(lhs: f64, rhs: f64) -> bool {
    lhs < rhs - STRICT_MARGIN * rhs.abs().max(1.0)
}

/// Run every appendix check for indices up to `n_max`, sampling the lemma
/// functions at `x_samples` points. Failures are collected, not thrown.
pub fn verify_appendices(n_max: u32, x_samples: u32) -> Result<AppendixReport> {
    if n_max < 7 {
        return Err(Error::Domain(format!("verification needs n_max >= 7, got {n_max}")));
    }
    if x_samples < 10 {
        return Err(Error::Domain(format!(
            "verification needs x_samples >= 10, got {x_samples}"
        )));
    }

    let mut report = AppendixReport {
        checked_range: (2, n_max),
        x_samples,
        failures: Vec::new(),
        pass: false,
    };

    check_density_sequence(&mut report, n_max)?;
    check_min_sequence(&mut report, n_max)?;
    check_lemma_functions(&mut report, n_max, x_samples);
    check_pairwise_inequalities(&mut report, n_max);
    check_euler_products(&mut report);
    check_remark_product(&mut report);
    check_min_closed_form(&mut report, n_max.min(40))?;
    check_a_prefix(&mut report)?;
    check_d_ratio_identity(&mut report, n_max.min(100))?;

    Ok(report.finish())
}

/// d strictly decreasing with sqrt(2 pi / e) < d(n) <= pi/2.
fn check_density_sequence(report: &mut AppendixReport, n_max: u32) -> Result<()> {
    let lower = (2.0 * std::f64::consts::PI / std::f64::consts::E).sqrt();
    let upper = std::f64::consts::FRAC_PI_2;
    let mut prev = f64::INFINITY;
    for n in 2..=n_max {
        let d = density_ratio(n)?;
        if !(d > lower) {
            report.fail("d lower bound", n, format!("d({n}) = {d:.15} <= sqrt(2 pi/e)"));
        }
        if d > upper + STRICT_MARGIN {
            report.fail("d upper bound", n, format!("d({n}) = {d:.15} > pi/2"));
        }
        if n > 2 && !strictly_less(d, prev) {
            report.fail(
                "d monotone",
                n,
                format!("d({n}) = {d:.15} not strictly below d({}) = {prev:.15}", n - 1),
            );
        }
        prev = d;
    }
    Ok(())
}

/// a strictly decreasing with a_n > sqrt 2.
fn check_min_sequence(report: &mut AppendixReport, n_max: u32) -> Result<()> {
    let lower = std::f64::consts::SQRT_2;
    let mut prev = f64::INFINITY;
    for n in 2..=n_max {
        let a = min_ratio(n)?;
        if !(a > lower) {
            report.fail("a lower bound", n, format!("a({n}) = {a:.15} <= sqrt 2"));
        }
        if n > 2 && !strictly_less(a, prev) {
            report.fail(
                "a monotone",
                n,
                format!("a({n}) = {a:.15} not strictly below a({}) = {prev:.15}", n - 1),
            );
        }
        prev = a;
    }
    Ok(())
}

/// Sampled monotonicity and bound checks for the six lemma functions.
fn check_lemma_functions(report: &mut AppendixReport, n_max: u32, x_samples: u32) {
    let x_end = (n_max as f64).max(20.0);
    let sample = |start: f64| -> Vec<f64> {
        let span = x_end - start;
        (0..x_samples)
            .map(|i| start + span * i as f64 / (x_samples - 1) as f64)
            .collect()
    };

    // h, m: increasing, < 1.
    for fun in [LemmaFn::H, LemmaFn::M] {
        let mut prev = f64::NEG_INFINITY;
        for &x in &sample(fun.domain_start()) {
            let y = lemma_function(fun, x).expect("x in domain");
            if !(y < 1.0) {
                report.fail(fun.name(), x, format!("{}({x}) = {y:.15} >= 1", fun.name()));
            }
            if !(y > prev) {
                report.fail(fun.name(), x, format!("{}({x}) not increasing", fun.name()));
            }
            prev = y;
        }
    }

    // p: increasing.
    {
        let mut prev = f64::NEG_INFINITY;
        for &x in &sample(LemmaFn::P.domain_start()) {
            let y = lemma_function(LemmaFn::P, x).expect("x in domain");
            if !(y > prev) {
                report.fail("p", x, format!("p({x}) = {y:.15} not increasing"));
            }
            prev = y;
        }
    }

    // q: decreasing, > 1.
    {
        let mut prev = f64::INFINITY;
        for &x in &sample(LemmaFn::Q.domain_start()) {
            let y = lemma_function(LemmaFn::Q, x).expect("x in domain");
            if !(y > 1.0) {
                report.fail("q", x, format!("q({x}) = {y:.15} <= 1"));
            }
            if !(y < prev) {
                report.fail("q", x, format!("q({x}) not decreasing"));
            }
            prev = y;
        }
    }

    // u, v: > 1.
    for fun in [LemmaFn::U, LemmaFn::V] {
        for &x in &sample(fun.domain_start()) {
            let y = lemma_function(fun, x).expect("x in domain");
            if !(y > 1.0) {
                report.fail(fun.name(), x, format!("{}({x}) = {y:.15} <= 1", fun.name()));
            }
        }
    }
}

/// Area(T_{k,l}) < Area(T_{k-2,l+2}) for 3 <= k <= l+1, and
/// Area(T_{k,k}) < Area(T_{k-1,k+1}) for k >= 2, both up to k+l <= n_max.
fn check_pairwise_inequalities(report: &mut AppendixReport, n_max: u32) {
    for k in 3..=n_max {
        for l in (k - 1)..=n_max {
            if k + l > n_max {
                break;
            }
            let ln_a = CliffordSpec { p: k, q: l }.ln_area();
            let ln_b = CliffordSpec { p: k - 2, q: l + 2 }.ln_area();
            if !strictly_less(ln_a, ln_b) {
                report.fail(
                    "+2 ineq",
                    format!("({k},{l})"),
                    format!("ln Area(T_{{{k},{l}}}) = {ln_a:.15} !< ln Area(T_{{{},{}}}) = {ln_b:.15}", k - 2, l + 2),
                );
            }
        }
    }
    let mut k = 2;
    while 2 * k <= n_max {
        let ln_a = CliffordSpec { p: k, q: k }.ln_area();
        let ln_b = CliffordSpec { p: k - 1, q: k + 1 }.ln_area();
        if !strictly_less(ln_a, ln_b) {
            report.fail(
                "+1 ineq",
                k,
                format!("ln Area(T_{{{k},{k}}}) = {ln_a:.15} !< ln Area(T_{{{},{}}}) = {ln_b:.15}", k - 1, k + 1),
            );
        }
        k += 1;
    }
}

/// Truncated Euler products against 2/pi and 2 sqrt(2)/pi, using the tail
/// estimate prod_{i>N}(1 - c/i^2) >= 1 - c pi^2 / (6 N).
fn check_euler_products(report: &mut AppendixReport) {
    const N: u64 = 1_000_000;
    let cases = [
        (0.25, 2.0 / std::f64::consts::PI, "euler product 2/pi"),
        (
            1.0 / 16.0,
            2.0 * std::f64::consts::SQRT_2 / std::f64::consts::PI,
            "euler product 2 sqrt2/pi",
        ),
    ];
    for (c, limit, name) in cases {
        let mut prod = 1.0f64;
        for i in 1..=N {
            let ii = (i * i) as f64;
            prod *= 1.0 - c / ii;
        }
        let tail_bound = c * std::f64::consts::PI.powi(2) / (6.0 * N as f64);
        let bound = limit * tail_bound * 1.01 + 1e-14;
        if (prod - limit).abs() > bound {
            report.fail(
                name,
                N,
                format!("|{prod:.15} - {limit:.15}| = {:.3e} exceeds tail bound {bound:.3e}", (prod - limit).abs()),
            );
        }
    }
}

/// 2 (1 - 1/pi) sqrt(2 pi / e) > 2: the strengthened area bound of the
/// rotational classification.
fn check_remark_product(report: &mut AppendixReport) {
    let value = 2.0 * (1.0 - 1.0 / std::f64::consts::PI)
        * (2.0 * std::f64::consts::PI / std::f64::consts::E).sqrt();
    if !strictly_less(2.0, value) {
        report.fail("remark product", "-", format!("2(1 - 1/pi) sqrt(2 pi/e) = {value:.15} !> 2"));
    }
}

/// Brute-force argmin against the closed form: (n/2, n/2) for even n,
/// ((n-1)/2, (n+1)/2) for odd n.
fn check_min_closed_form(report: &mut AppendixReport, n_max: u32) -> Result<()> {
    for n in 2..=n_max {
        let (spec, _) = min_clifford(n)?;
        let expected = if n % 2 == 0 {
            CliffordSpec { p: n / 2, q: n / 2 }
        } else {
            CliffordSpec { p: (n - 1) / 2, q: (n + 1) / 2 }
        };
        if spec != expected {
            report.fail(
                "min closed form",
                n,
                format!("brute force found ({},{}), closed form says ({},{})", spec.p, spec.q, expected.p, expected.q),
            );
        }
    }
    Ok(())
}

/// a_2 .. a_7 against their closed forms, to 1e-12 relative.
fn check_a_prefix(report: &mut AppendixReport) -> Result<()> {
    let pi = std::f64::consts::PI;
    let expected = [
        (2u32, pi / 2.0),
        (3, 8.0 / (3.0 * 3f64.sqrt())),
        (4, 1.5),
        (5, 48.0 * 15f64.sqrt() / 125.0),
        (6, 15.0 * pi / 32.0),
        (7, 768.0 * 21f64.sqrt() / 2401.0),
    ];
    for (n, a) in expected {
        let got = min_ratio(n)?;
        if ((got - a) / a).abs() > 1e-12 {
            report.fail("a prefix", n, format!("a({n}) = {got:.15}, closed form {a:.15}"));
        }
    }
    Ok(())
}

/// d(n+2)/d(n) = h(n) to 1e-10 relative.
fn check_d_ratio_identity(report: &mut AppendixReport, n_max: u32) -> Result<()> {
    for n in 2..=n_max {
        let lhs = density_ratio(n + 2)? / density_ratio(n)?;
        let rhs = lemma_function(LemmaFn::H, n as f64)?;
        if ((lhs - rhs) / rhs).abs() > 1e-10 {
            report.fail(
                "dn ratio",
                n,
                format!("d({})/d({n}) = {lhs:.15} vs h({n}) = {rhs:.15}", n + 2),
            );
        }
    }
    Ok(())
}

/// Total unit-sphere volume of S^{n+1}, used by callers to sanity-check
/// quadratures against the closed form.
pub fn ambient_volume(n: u32) -> f64 {
    unit_sphere_ln_area(n + 1).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_verification_passes() {
        let report = verify_appendices(200, 100).unwrap();
        assert!(report.pass, "failures: {:#?}", report.failures);
        assert_eq!(report.checked_range, (2, 200));
    }

    #[test]
    fn small_verification_passes() {
        let report = verify_appendices(7, 10).unwrap();
        assert!(report.pass, "failures: {:#?}", report.failures);
    }

    #[test]
    fn preconditions() {
        assert!(verify_appendices(6, 100).is_err());
        assert!(verify_appendices(200, 9).is_err());
    }

    #[test]
    fn table_rows_pass() {
        let rows = ratio_table(50).unwrap();
        assert_eq!(rows.len(), 49);
        assert!(rows.iter().all(|r| r.pass));
        assert!(rows.windows(2).all(|w| w[1].d < w[0].d && w[1].a < w[0].a));
    }
}
