//! Real symmetric tridiagonal matrices and their eigenvalues.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative size below which an off-diagonal entry is treated as zero.
pub const DEFLATION_TOL: f64 = 1e-13;
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub diag: Vec<f64>,
    /// `off[j]` couples `j` and `j + 1`.
    pub off: Vec<f64>,
}

impl TridiagonalOperator {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(format!(
                "tridiagonal shape mismatch: {} diagonal and {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            _ if i == j => self.diag[i],
            _ if j == i + 1 => self.off[i],
            _ if i == j + 1 => self.off[j],
            _ => 0.0,
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut acc = v[i] * self.diag[i];
                if i > 0 {
                    acc += v[i - 1] * self.off[i - 1];
                }
                if i + 1 < n {
                    acc += v[i + 1] * self.off[i];
                }
                acc
            })
            .collect()
    }

    /// Eigenvalues in ascending order, by implicit QL with Wilkinson shifts.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        implicit_ql(&mut d, &mut e)?;
        d.sort_by(f64::total_cmp);
        Ok(d)
    }

    /// Spectral norm `max |eigenvalue|`.
    pub fn norm(&self) -> Result<f64> {
        let ev = self.eigenvalues()?;
        Ok(ev[0].abs().max(ev[ev.len() - 1].abs()))
    }
}

fn implicit_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= DEFLATION_TOL * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::NonConvergent { what: "tridiagonal QL iteration", iterations: sweeps });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Number of eigenvalues below `x` from the Sturm sequence of the LDLᵀ pivots.
    fn count_below(t: &TridiagonalOperator, x: f64) -> usize {
        let mut count = 0;
        let mut pivot = 1.0;
        for i in 0..t.size() {
            let coupling = if i == 0 { 0.0 } else { t.off[i - 1] * t.off[i - 1] };
            pivot = t.diag[i] - x - coupling / pivot;
            if pivot == 0.0 {
                pivot = -1e-300;
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bisect(t: &TridiagonalOperator, idx: usize) -> f64 {
        let bound = t.diag.iter().map(|d| d.abs()).sum::<f64>() + 2.0 * t.off.iter().map(|o| o.abs()).sum::<f64>();
        let (mut lo, mut hi) = (-bound - 1.0, bound + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if count_below(t, mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn known_spectrum_of_the_free_jacobi_matrix() {
        let n = 50;
        let t = TridiagonalOperator::new(vec![0.0; n], vec![0.5; n - 1]).unwrap();
        let ev = t.eigenvalues().unwrap();
        for (i, &v) in ev.iter().enumerate() {
            let exact = -((i + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn one_by_one_and_shape_errors() {
        let t = TridiagonalOperator::new(vec![3.5], vec![]).unwrap();
        assert_eq!(t.eigenvalues().unwrap(), vec![3.5]);
        assert!(TridiagonalOperator::new(vec![1.0, 2.0], vec![]).is_err());
    }

    proptest! {
        #[test]
        fn ql_matches_sturm_bisection(
            diag in proptest::collection::vec(-10.0f64..10.0, 2..40),
            off_seed in proptest::collection::vec(-5.0f64..5.0, 40),
        ) {
            let n = diag.len();
            let t = TridiagonalOperator::new(diag, off_seed[..n - 1].to_vec()).unwrap();
            let ev = t.eigenvalues().unwrap();
            let scale = t.norm().unwrap().max(1.0);
            for (i, &v) in ev.iter().enumerate() {
                prop_assert!((v - bisect(&t, i)).abs() <= 1e-11 * scale);
            }
            let trace: f64 = t.diag.iter().sum();
            prop_assert!((ev.iter().sum::<f64>() - trace).abs() <= 1e-11 * scale * n as f64);
        }
    }
}
