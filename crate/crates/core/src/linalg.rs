//! Small dense kernels for the 1-D solvers: tridiagonal factorization and a
//! symmetric tridiagonal eigensolver (Sturm-sequence bisection plus inverse
//! iteration). The mode problems produced by the separation of variables are
//! symmetric tridiagonal after the measure similarity transform, so nothing
//! heavier is needed.

use crate::error::{Error, Result};

/// Tridiagonal matrix in three diagonals: sub[i] couples row i+1 to i,
/// sup[i] couples row i to i+1.
#[derive(Debug, Clone)]
pub struct Tridiag {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiag {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// y = A x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.sup[i] * x[i + 1];
            }
            y[i] = v;
        }
    }
}

/// LU factors of a tridiagonal matrix (Thomas algorithm, no pivoting).
/// Valid for the diagonally dominant systems produced by the discretizations
/// here; a vanishing pivot reports a numerical error.
#[derive(Debug, Clone)]
pub struct TridiagFactor {
    lower: Vec<f64>,
    diag_inv: Vec<f64>,
    sup: Vec<f64>,
}

impl TridiagFactor {
    pub fn new(m: &Tridiag) -> Result<Self> {
        let n = m.dim();
        let mut lower = vec![0.0; n.saturating_sub(1)];
        let mut diag_inv = vec![0.0; n];
        let mut d = m.diag[0];
        if d == 0.0 {
            return Err(Error::Numerical("tridiagonal pivot is zero at row 0".into()));
        }
        diag_inv[0] = 1.0 / d;
        for i in 1..n {
            let l = m.sub[i - 1] * diag_inv[i - 1];
            lower[i - 1] = l;
            d = m.diag[i] - l * m.sup[i - 1];
            if d == 0.0 {
                return Err(Error::Numerical(format!("tridiagonal pivot is zero at row {i}")));
            }
            diag_inv[i] = 1.0 / d;
        }
        Ok(TridiagFactor { lower, diag_inv, sup: m.sup.clone() })
    }

    /// Solve A x = b in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.diag_inv.len();
        for i in 1..n {
            b[i] -= self.lower[i - 1] * b[i - 1];
        }
        b[n - 1] *= self.diag_inv[n - 1];
        for i in (0..n - 1).rev() {
            b[i] = (b[i] - self.sup[i] * b[i + 1]) * self.diag_inv[i];
        }
    }
}

/// Symmetric tridiagonal eigenproblem: diagonal `d`, off-diagonal `e`.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl SymTridiag {
    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// Number of eigenvalues strictly below x (Sturm sequence count via the
    /// LDL^T pivots).
    fn count_below(&self, x: f64) -> usize {
        let n = self.dim();
        let mut count = 0;
        let mut q = self.d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let ee = self.e[i - 1] * self.e[i - 1];
            // Standard safeguarded recurrence.
            let denom = if q == 0.0 { f64::MIN_POSITIVE } else { q };
            q = self.d[i] - x - ee / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin bounds on the spectrum.
    fn bounds(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.e[i - 1].abs();
            }
            if i + 1 < n {
                r += self.e[i].abs();
            }
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// The `count` smallest eigenvalues, ascending, by bisection on the
    /// Sturm count.
    pub fn lowest_eigenvalues(&self, count: usize) -> Result<Vec<f64>> {
        let n = self.dim();
        if count == 0 || count > n {
            return Err(Error::Usage(format!(
                "requested {count} eigenvalues from a dimension-{n} problem"
            )));
        }
        let (lo, hi) = self.bounds();
        let scale = (hi - lo).max(1.0);
        let tol = 1e-14 * scale;
        let mut out = Vec::with_capacity(count);
        for k in 0..count {
            // Find the (k+1)-th smallest: smallest x with count_below(x) >= k+1.
            let mut a = lo;
            let mut b = hi + tol;
            for _ in 0..120 {
                if b - a <= tol {
                    break;
                }
                let mid = 0.5 * (a + b);
                if self.count_below(mid) >= k + 1 {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            out.push(0.5 * (a + b));
        }
        Ok(out)
    }

    /// Eigenvector for an isolated eigenvalue by shifted inverse iteration.
    /// Returns the vector normalized to unit Euclidean norm.
    pub fn eigenvector(&self, eigenvalue: f64) -> Result<Vec<f64>> {
        let n = self.dim();
        let (lo, hi) = self.bounds();
        let scale = (hi - lo).max(1.0);
        let mut shift_offset = 1e-12 * scale;
        'retry: for _ in 0..6 {
            let shifted = Tridiag {
                sub: self.e.clone(),
                diag: self.d.iter().map(|&d| d - (eigenvalue + shift_offset)).collect(),
                sup: self.e.clone(),
            };
            let factor = match TridiagFactor::new(&shifted) {
                Ok(f) => f,
                Err(_) => {
                    shift_offset *= 17.0;
                    continue 'retry;
                }
            };
            // Deterministic start vector with no accidental symmetry.
            let mut v: Vec<f64> = (0..n).map(|i| (0.7 + i as f64).sin()).collect();
            normalize(&mut v);
            for _ in 0..4 {
                factor.solve_in_place(&mut v);
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !norm.is_finite() || norm == 0.0 {
                    shift_offset *= 17.0;
                    continue 'retry;
                }
                for x in v.iter_mut() {
                    *x /= norm;
                }
            }
            // Residual check: ||A v - lambda v|| should be tiny.
            let a = Tridiag {
                sub: self.e.clone(),
                diag: self.d.clone(),
                sup: self.e.clone(),
            };
            let mut av = vec![0.0; n];
            a.apply(&v, &mut av);
            let res: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - eigenvalue * y) * (x - eigenvalue * y))
                .sum::<f64>()
                .sqrt();
            if res < 1e-8 * scale {
                return Ok(v);
            }
            shift_offset *= 17.0;
        }
        Err(Error::Numerical(format!(
            "inverse iteration failed for eigenvalue {eigenvalue:.6e}"
        )))
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}
