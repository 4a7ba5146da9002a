//! The c-function governing the growth of `Φ_l` at infinity, and its relation
//! to the continuous spectral weight.

use num_complex::Complex64;

use crate::asc::SpectralMeasure;
use crate::error::{Error, Result};
use crate::hyperg::{phi_l_bridged, SpectralParameterL};
use crate::qcore::{qpochhammer_inf, qpochhammer_inf_nonzero, QContext};

/// Factors of a denominator product closer than this to zero raise [`Error::Pole`].
pub const POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CFunValue {
    pub l: Complex64,
    pub value: Complex64,
}

impl CFunValue {
    pub fn new(l: Complex64, ctx: &QContext, tol: f64) -> Result<Self> {
        Ok(Self { l, value: c_function(l, ctx, tol)? })
    }
}

/// `q^{2s}` for complex `s`.
fn q2(s: Complex64, ctx: &QContext) -> Complex64 {
    (s * (2.0 * ctx.q().ln())).exp()
}

/// `c(l) = (q^{2(l+N-1)};q²)_∞ (q^{2(l+n)};q²)_∞ / ((q^{2(2l+N-1)};q²)_∞ (q^{2n};q²)_∞)`.
pub fn c_function(l: Complex64, ctx: &QContext, tol: f64) -> Result<Complex64> {
    let p = ctx.base();
    let big_n = (ctx.dim() - 1) as f64;
    let n = ctx.n() as f64;
    let num = qpochhammer_inf(q2(l + big_n, ctx), p, tol)? * qpochhammer_inf(q2(l + n, ctx), p, tol)?;
    let den = qpochhammer_inf_nonzero(q2(l * 2.0 + big_n, ctx), p, tol, POLE_TOL, "c-function denominator")?
        * qpochhammer_inf(p.powi(ctx.n() as i32), p, tol)?;
    Ok(num / den)
}

/// Which term of `Φ_l(x) ≈ c(l)x^l + c(-l-N+1)x^{-l-N+1}` dominates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticRegime {
    /// `Re l > -(N-1)/2`: `Φ_l(x) ~ c(l) x^l`.
    Direct,
    /// `Re l < -(N-1)/2`: `Φ_l(x) ~ c(-l-N+1) x^{-l-N+1}`.
    Reflected,
}

pub fn regime(l: Complex64, ctx: &QContext) -> Result<AsymptoticRegime> {
    let crit = -((ctx.dim() - 1) as f64) / 2.0;
    if l.re > crit {
        Ok(AsymptoticRegime::Direct)
    } else if l.re < crit {
        Ok(AsymptoticRegime::Reflected)
    } else {
        Err(Error::InvalidParameter("Re l lies on the critical line, where neither term dominates".into()))
    }
}

/// `(Φ_l(q^{-2k}) x^{-s}, c(s))` at `k = kmax`, where `s` is the dominant exponent
/// (`l` or `-l-N+1`).
pub fn asymptotics_check(l: Complex64, kmax: usize, ctx: &QContext) -> Result<(Complex64, Complex64)> {
    let s = match regime(l, ctx)? {
        AsymptoticRegime::Direct => l,
        AsymptoticRegime::Reflected => -l - (ctx.dim() - 1) as f64,
    };
    let target = c_function(s, ctx, crate::qcore::DEFAULT_TOL)?;
    let phi = phi_l_bridged(kmax, &SpectralParameterL::new(l, ctx), ctx);
    Ok((phi * q2(s * kmax as f64, ctx), target))
}

/// `(w(z), 1/(c(l)c(-l-N+1)(q^{2n};q²)²_∞))` for the critical-line `l` with `z = cos θ`,
/// `w` being the unnormalized continuous weight of `measure`.
pub fn wc_identity_check(z: f64, measure: &SpectralMeasure, ctx: &QContext) -> Result<(f64, f64)> {
    if !(z > -1.0 && z < 1.0) {
        return Err(Error::InvalidParameter(format!("z = {z} is outside (-1, 1)")));
    }
    let l = SpectralParameterL::critical(z.acos(), ctx);
    let tol = crate::qcore::DEFAULT_TOL;
    let c1 = c_function(l.l, ctx, tol)?;
    let c2 = c_function(l.reflected(ctx).l, ctx, tol)?;
    let pn = qpochhammer_inf(ctx.base().powi(ctx.n() as i32), ctx.base(), tol)?;
    let rhs = 1.0 / (c1 * c2 * pn * pn);
    Ok((measure.weight_unnormalized(z), rhs.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asc::build_spectral_measure;
    use crate::qcore::{qgamma_complex, DEFAULT_TOL};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn configs() -> Vec<QContext> {
        let mut v = Vec::new();
        for &q in &[0.3, 0.5, 0.7] {
            for big_n in 3..=6 {
                for n in 1..big_n - 1 {
                    v.push(QContext::new(q, n, big_n - n).unwrap());
                }
            }
        }
        v
    }

    fn gamma_form(l: Complex64, ctx: &QContext) -> crate::error::Result<Complex64> {
        let p = ctx.base();
        let n = c(ctx.n() as f64, 0.0);
        let big_n = (ctx.dim() - 1) as f64;
        Ok(qgamma_complex(n, p)? * qgamma_complex(l * 2.0 + big_n, p)?
            / (qgamma_complex(l + n, p)? * qgamma_complex(l + big_n, p)?))
    }

    #[test]
    fn value_at_zero_is_one() {
        for cx in configs() {
            let v = c_function(c(0.0, 0.0), &cx, DEFAULT_TOL).unwrap();
            assert!((v - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn product_and_gamma_forms_agree() {
        let samples = [
            c(0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.3, 1.1), c(-0.4, 0.7), c(1.7, -2.3), c(-1.0, 0.5),
            c(0.1, 0.1), c(3.0, 4.0), c(-0.75, -1.2), c(0.25, 0.0), c(2.5, 0.9), c(-1.5, 3.0), c(0.9, -0.2),
            c(1.3, 0.0), c(0.0, 2.0), c(-0.2, -0.6), c(4.0, 0.0), c(0.6, 5.0), c(-2.2, 1.4),
        ];
        for cx in configs() {
            for &l in &samples {
                let (Ok(prod), Ok(g)) = (c_function(l, &cx, DEFAULT_TOL), gamma_form(l, &cx)) else {
                    continue;
                };
                assert!((prod - g).norm() <= 1e-11 * g.norm(), "{cx:?} l={l} {prod} {g}");
            }
        }
    }

    #[test]
    fn explicit_product_at_one() {
        let cx = QContext::new(0.5, 1, 2).unwrap();
        let p = 0.25;
        let inf = |a: f64| qpochhammer_inf(a, p, DEFAULT_TOL).unwrap();
        let expected = inf(p.powi(3)) * inf(p.powi(2)) / (inf(p.powi(4)) * inf(p));
        assert_relative_eq!(c_function(c(1.0, 0.0), &cx, DEFAULT_TOL).unwrap().re, expected, max_relative = 1e-15);
    }

    #[test]
    fn pole_is_reported() {
        let cx = QContext::new(0.5, 1, 2).unwrap();
        // 2l + N - 1 = 0
        assert!(matches!(c_function(c(-1.0, 0.0), &cx, DEFAULT_TOL), Err(Error::Pole(_))));
        assert!(matches!(c_function(c(-1.5, 0.0), &cx, DEFAULT_TOL), Err(Error::Pole(_))));
    }

    #[test]
    fn asymptotics_examples() {
        let cx = QContext::new(0.5, 1, 2).unwrap();
        for k in [0, 5, 40] {
            let (r, t) = asymptotics_check(c(0.0, 0.0), k, &cx).unwrap();
            assert!((r - 1.0).norm() < 1e-14 && (t - 1.0).norm() < 1e-14);
        }
        let (r, t) = asymptotics_check(c(1.0, 0.0), 40, &cx).unwrap();
        assert!((r - t).norm() < 1e-8);
        let below = c(-((cx.dim() - 1) as f64) / 2.0 - 1.0, 0.0);
        let (r, t) = asymptotics_check(below, 40, &cx).unwrap();
        assert!((r - t).norm() < 1e-8);
        assert!(asymptotics_check(c(-1.0, 2.0), 10, &cx).is_err());
    }

    #[test]
    fn asymptotic_error_decreases_and_converges() {
        for cx in configs() {
            for &l in &[0.25, 0.5, 1.0, 1.5, 2.0] {
                let errs: Vec<f64> = (0..=40)
                    .map(|k| {
                        let (r, t) = asymptotics_check(c(l, 0.0), k, &cx).unwrap();
                        (r - t).norm()
                    })
                    .collect();
                assert!(errs[40] < 1e-8, "{cx:?} l={l} err={}", errs[40]);
                let k0 = 10;
                for k in k0..40 {
                    assert!(errs[k + 1] <= errs[k] || errs[k + 1] < 1e-13, "{cx:?} l={l} k={k}");
                }
            }
        }
    }

    #[test]
    fn weight_is_reciprocal_of_the_c_function_product() {
        for cx in configs() {
            let m = build_spectral_measure(&cx, 1e-14).unwrap();
            for i in 0..20 {
                let z = -0.95 + 1.9 * i as f64 / 19.0;
                let (lhs, rhs) = wc_identity_check(z, &m, &cx).unwrap();
                assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs(), "{cx:?} z={z}");
            }
            for z in [-0.999, 0.999] {
                let (lhs, rhs) = wc_identity_check(z, &m, &cx).unwrap();
                assert!((rhs / lhs - 1.0).abs() < 1e-8);
            }
        }
        let cx = QContext::new(0.5, 2, 2).unwrap();
        let m = build_spectral_measure(&cx, 1e-14).unwrap();
        let (lhs, rhs) = wc_identity_check(0.0, &m, &cx).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
        assert!(wc_identity_check(1.0, &m, &cx).is_err());
    }
}
