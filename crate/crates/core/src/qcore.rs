//! Scalar q-series primitives: q-Pochhammer symbols, the q-Gamma function,
//! the q-Pascal quantity Ψ, the Jackson-type integral on the radial grid and
//! the difference operators `B_±`.

use std::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Default truncation tolerance for infinite products.
pub const DEFAULT_TOL: f64 = 1e-16;

const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;

/// Real or complex scalars accepted by the Pochhammer routines.
pub trait QScalar:
    Copy
    + Add<Output = Self>
    + Mul<Output = Self>
    + Sub<Output = Self>
    + Div<Output = Self>
    + Mul<f64, Output = Self>
{
    fn one() -> Self;
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
}

impl QScalar for f64 {
    fn one() -> Self {
        1.0
    }
    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl QScalar for Complex64 {
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Global parameters of `H_{n,m}` and the normalization constants derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    q: f64,
    n: usize,
    m: usize,
    const1: f64,
    const2: f64,
    const_box: f64,
}

impl QContext {
    pub fn new(q: f64, n: usize, m: usize) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!("q must lie in (0,1), got {q}")));
        }
        if n < 1 {
            return Err(Error::InvalidParameter(format!("n must be >= 1, got {n}")));
        }
        if m < 2 {
            return Err(Error::InvalidParameter(format!("m must be >= 2, got {m}")));
        }
        let big_n = n + m;
        let const1: f64 = (1..m).map(|j| q.powi(-2 * j as i32) - 1.0).product();
        let const2 = 1.0
            / ((q.powi(-2) - 1.0) * (1..n).map(|j| q.powi(-2 * j as i32) - 1.0).product::<f64>());
        let const_box =
            q.powi(2 * n as i32) * (1.0 - q * q) / (1.0 - q.powi(2 * (big_n as i32 - 1)));
        Ok(Self { q, n, m, const1, const2, const_box })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `N = n + m`.
    pub fn dim(&self) -> usize {
        self.n + self.m
    }

    /// The base `q²` of every series on the radial side.
    pub fn base(&self) -> f64 {
        self.q * self.q
    }

    /// Trace normalization `∏_{j=1}^{m-1}(q^{-2j}-1)`, fixing `∫ f_0 = 1`.
    pub fn const1(&self) -> f64 {
        self.const1
    }

    /// Prefactor of the radial density.
    pub fn const2(&self) -> f64 {
        self.const2
    }

    /// `q^{2n}(1-q²)/(1-q^{2(N-1)})`. Placed in front of the divergence form it
    /// gives `const_box` times the pointwise Laplacian (see `laplacian`).
    pub fn const_box(&self) -> f64 {
        self.const_box
    }

    /// `q^{2(n-1)}(1-q²)/(1-q^{2(N-1)})`, the prefactor of the `∂̄`-pairing of radial functions.
    pub fn pairing_prefactor(&self) -> f64 {
        let q = self.q;
        q.powi(2 * (self.n as i32 - 1)) * (1.0 - q * q) / (1.0 - q.powi(2 * (self.dim() as i32 - 1)))
    }

    /// `x = q^{-2k}`.
    pub fn grid_x(&self, k: i64) -> f64 {
        self.q.powi(-2 * k as i32)
    }
}

/// `(a; base)_k = ∏_{i<k}(1 - a·base^i)`; any finite base is accepted.
pub fn qpochhammer<T: QScalar>(a: T, base: f64, k: usize) -> T {
    let mut acc = T::one();
    let mut power = 1.0;
    for _ in 0..k {
        acc = acc * (T::one() - a * power);
        power *= base;
    }
    acc
}

/// Result of an infinite-product evaluation together with its truncation data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfiniteProduct<T> {
    /// The product; may overflow to infinity or underflow to zero even when
    /// `mantissa · 10^exponent10` is meaningful.
    pub value: T,
    pub mantissa: T,
    pub exponent10: i32,
    /// Number of factors multiplied in.
    pub factors: usize,
    /// First-order bound on the relative error of the omitted tail,
    /// `|a|·base^I/(1-base)` where `I` is the first omitted index.
    pub tail_bound: f64,
}

/// `(a; base)_∞` with its truncation data.
///
/// Factors are multiplied until `|a|·base^i < tol`. The partial product is kept
/// in linear space and rescaled by a power of ten whenever it leaves
/// `[1e-100, 1e100]`.
pub fn qpochhammer_inf_detailed<T: QScalar>(a: T, base: f64, tol: f64) -> Result<InfiniteProduct<T>> {
    if !(base > 0.0 && base < 1.0) {
        return Err(Error::InvalidParameter(format!("base must lie in (0,1), got {base}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let cap = (10.0 * tol.ln() / base.ln()).ceil().max(1.0) as usize;
    let a_abs = a.modulus();
    let mut value = T::one();
    let mut scale = 0i32;
    let mut power = 1.0;
    for i in 0..cap {
        let t = a_abs * power;
        if t < tol {
            return Ok(InfiniteProduct {
                value: if scale == 0 { value } else { value * 10f64.powi(scale) },
                mantissa: value,
                exponent10: scale,
                factors: i,
                tail_bound: t / (1.0 - base),
            });
        }
        let mut factor = T::one() - a * power;
        let fmag = factor.modulus();
        if fmag > RESCALE_HIGH {
            let e = fmag.log10().floor() as i32;
            factor = factor * 10f64.powi(-e);
            scale += e;
        }
        value = value * factor;
        let mag = value.modulus();
        if mag == 0.0 {
            return Ok(InfiniteProduct {
                value,
                mantissa: value,
                exponent10: 0,
                factors: i + 1,
                tail_bound: 0.0,
            });
        }
        if !(RESCALE_LOW..=RESCALE_HIGH).contains(&mag) {
            let e = mag.log10().floor() as i32;
            value = value * 10f64.powi(-e);
            scale += e;
        }
        power *= base;
    }
    Err(Error::NonConvergent { what: "infinite q-Pochhammer product", iterations: cap })
}

impl<T: QScalar> InfiniteProduct<T> {
    /// `ln |value|`, finite whenever the product is nonzero.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.modulus().ln() + self.exponent10 as f64 * std::f64::consts::LN_10
    }
}

/// `(a; base)_∞`.
pub fn qpochhammer_inf<T: QScalar>(a: T, base: f64, tol: f64) -> Result<T> {
    qpochhammer_inf_detailed(a, base, tol).map(|p| p.value)
}

/// `(a; base)_∞` that refuses to return a (near) zero: any factor with
/// `|1 - a·base^i| < pole_tol` raises [`Error::Pole`].
pub(crate) fn qpochhammer_inf_nonzero<T: QScalar>(
    a: T,
    base: f64,
    tol: f64,
    pole_tol: f64,
    what: &str,
) -> Result<T> {
    let mut power = 1.0;
    let a_abs = a.modulus();
    while a_abs * power >= 0.5 {
        if (T::one() - a * power).modulus() < pole_tol {
            return Err(Error::Pole(what.to_string()));
        }
        power *= base;
    }
    qpochhammer_inf(a, base, tol)
}

/// `Γ_b(x) = (1-b)^{1-x} (b;b)_∞ / (b^x;b)_∞`.
pub fn qgamma(x: f64, base: f64) -> Result<f64> {
    let num = qpochhammer_inf(base, base, DEFAULT_TOL)?;
    let den = qpochhammer_inf_nonzero(base.powf(x), base, DEFAULT_TOL, 1e-12, "q-Gamma at a nonpositive integer")?;
    Ok((1.0 - base).powf(1.0 - x) * num / den)
}

/// [`qgamma`] for complex argument.
pub fn qgamma_complex(x: Complex64, base: f64) -> Result<Complex64> {
    let ln_b = base.ln();
    let num = qpochhammer_inf(base, base, DEFAULT_TOL)?;
    let bx = (x * ln_b).exp();
    let den = qpochhammer_inf_nonzero(bx, base, DEFAULT_TOL, 1e-12, "q-Gamma at a nonpositive integer")?;
    let pre = ((Complex64::new(1.0, 0.0) - x) * (1.0 - base).ln()).exp();
    Ok(pre * num / den)
}

/// `Ψ(j,k) = (q^{-2};q^{-2})_{j+k} / ((q^{-2};q^{-2})_j (q^{-2};q^{-2})_k)`,
/// the q-Pascal triangle entry (a Gaussian binomial in base `q^{-2}`).
///
/// Evaluated as the telescoped ratio `∏_{i=1}^{k}(1-r^{j+i})/(1-r^i)`, `r = q^{-2}`,
/// which avoids forming the three large products separately.
pub fn qpascal_psi(j: usize, k: usize, ctx: &QContext) -> f64 {
    let r = ctx.q().powi(-2);
    (1..=k)
        .map(|i| (1.0 - r.powi((j + i) as i32)) / (1.0 - r.powi(i as i32)))
        .product()
}

/// `∫_1^∞ f(x) d_{q^{-2}}x = (q^{-2}-1) Σ_k f(q^{-2k}) q^{-2k}`, an exact finite sum.
pub fn qintegral_radial(f: &GridFunction, ctx: &QContext) -> Complex64 {
    let s: Complex64 = f.iter().map(|(k, v)| v * ctx.grid_x(k as i64)).sum();
    s * (ctx.q().powi(-2) - 1.0)
}

/// `(B_- f)(x) = (f(q^{-2}x) - f(x)) / (q^{-2}x - x)` at `x = q^{-2k}` for a
/// function given on the two-sided grid `q^{2Z}` by its index.
pub fn bminus_at<F: Fn(i64) -> Complex64>(f: F, k: i64, q: f64) -> Complex64 {
    let x = q.powi(-2 * k as i32);
    (f(k + 1) - f(k)) / ((q.powi(-2) - 1.0) * x)
}

/// `(B_+ f)(x) = (f(q²x) - f(x)) / (q²x - x)` at `x = q^{-2k}` on the two-sided grid.
pub fn bplus_at<F: Fn(i64) -> Complex64>(f: F, k: i64, q: f64) -> Complex64 {
    let x = q.powi(-2 * k as i32);
    (f(k - 1) - f(k)) / ((q * q - 1.0) * x)
}

/// `B_-` on a grid function at `x = q^{-2k}`.
pub fn bminus(f: &GridFunction, k: usize, ctx: &QContext) -> Complex64 {
    bminus_at(|i| f.get_signed(i), k as i64, ctx.q())
}

/// `B_+` on a grid function at `x = q^{-2k}`; at `k = 0` the value `f(q²)` is
/// read as zero (functions vanish off `q^{-2Z_+}`).
pub fn bplus(f: &GridFunction, k: usize, ctx: &QContext) -> Complex64 {
    bplus_at(|i| f.get_signed(i), k as i64, ctx.q())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ctx(q: f64, n: usize, m: usize) -> QContext {
        QContext::new(q, n, m).unwrap()
    }

    #[test]
    fn context_validation() {
        assert!(QContext::new(1.0, 1, 2).is_err());
        assert!(QContext::new(0.0, 1, 2).is_err());
        assert!(QContext::new(0.5, 0, 2).is_err());
        assert!(QContext::new(0.5, 1, 1).is_err());
        let c = ctx(0.5, 1, 2);
        assert_eq!(c.dim(), 3);
        // n = 1: empty product in const2
        assert_relative_eq!(c.const2(), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(c.const1(), 3.0, max_relative = 1e-15);
        assert!(c.const_box() > 0.0);
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(qpochhammer(0.7, 0.5, 0), 1.0);
        assert_relative_eq!(qpochhammer(0.5, 0.25, 2), 0.4375, max_relative = 1e-15);
        for j in 1..6 {
            assert_eq!(qpochhammer(1.0, 0.3, j), 0.0);
        }
    }

    #[test]
    fn infinite_product_examples() {
        assert_eq!(qpochhammer_inf(0.0, 0.5, 1e-16).unwrap(), 1.0);
        let inf = qpochhammer_inf(0.25, 0.25, 1e-16).unwrap();
        let finite = qpochhammer(0.25, 0.25, 30);
        assert_relative_eq!(inf, finite, max_relative = 1e-14);
        // Γ_{q²}(1) = 1 exercises (q²;q²)_∞ in numerator and denominator
        let q2 = 0.25;
        assert_relative_eq!(qgamma(1.0, q2).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn infinite_product_tail_and_rescaling() {
        let p = qpochhammer_inf_detailed(0.9, 0.5, 1e-16).unwrap();
        assert!(p.tail_bound < 1e-15);
        assert!(p.factors > 40);
        // partial products overflow the linear range for a huge argument
        let big = qpochhammer_inf_detailed(-1e80, 0.5, 1e-16).unwrap();
        assert!(big.value.is_infinite());
        let direct: f64 = (0..400).map(|i| (1e80 * 0.5f64.powi(i)).ln_1p()).sum();
        assert_relative_eq!(big.ln_abs(), direct, max_relative = 1e-12);
        assert!(qpochhammer_inf(0.5, 1.5, 1e-16).is_err());
        assert!(matches!(
            qpochhammer_inf(1e200, 0.9, 1e-16),
            Err(Error::NonConvergent { .. })
        ));
    }

    #[test]
    fn complex_infinite_product() {
        let a = Complex64::new(0.3, 0.4);
        let inf = qpochhammer_inf(a, 0.5, 1e-16).unwrap();
        let finite = qpochhammer(a, 0.5, 80);
        assert!((inf - finite).norm() < 1e-14);
    }

    #[test]
    fn qgamma_values() {
        assert_relative_eq!(qgamma(2.0, 0.25).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(qgamma(3.0, 0.5).unwrap(), 1.5, max_relative = 1e-14);
        assert!(matches!(qgamma(0.0, 0.5), Err(Error::Pole(_))));
        assert!(matches!(qgamma(-2.0, 0.5), Err(Error::Pole(_))));
        let z = qgamma_complex(Complex64::new(3.0, 0.0), 0.5).unwrap();
        assert!((z - 1.5).norm() < 1e-14);
    }

    #[test]
    fn qpascal_examples() {
        assert_eq!(qpascal_psi(0, 5, &ctx(0.5, 1, 2)), 1.0);
        assert_relative_eq!(qpascal_psi(3, 1, &ctx(0.5, 1, 2)), 85.0, max_relative = 1e-15);
    }

    #[test]
    fn qpascal_recurrence() {
        for &q in &[0.3, 0.5, 0.7] {
            let c = ctx(q, 1, 2);
            let r = q.powi(-2);
            for j in 1..=10 {
                for k in 1..=10 {
                    let lhs = qpascal_psi(j, k, &c);
                    let rhs = r.powi(k as i32) * qpascal_psi(j - 1, k, &c) + qpascal_psi(j, k - 1, &c);
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn radial_qintegral_examples() {
        let c = ctx(0.5, 1, 2);
        assert_relative_eq!(qintegral_radial(&GridFunction::indicator(0), &c).re, 3.0);
        assert_relative_eq!(qintegral_radial(&GridFunction::indicator(1), &c).re, 12.0);
        assert_eq!(qintegral_radial(&GridFunction::zero(), &c), Complex64::default());
    }

    #[test]
    fn difference_operator_examples() {
        let c = ctx(0.5, 1, 2);
        let constant = GridFunction::sample(10, |_| Complex64::new(2.5, 0.0));
        for k in 0..10 {
            assert_eq!(bminus(&constant, k, &c), Complex64::default());
        }
        for k in 1..=10 {
            assert_eq!(bplus(&constant, k, &c), Complex64::default());
        }
        let identity = GridFunction::sample(5, |k| Complex64::new(c.grid_x(k as i64), 0.0));
        assert_relative_eq!(bminus(&identity, 0, &c).re, 1.0, max_relative = 1e-15);
        let f0 = GridFunction::indicator(0);
        assert_relative_eq!(bminus(&f0, 0, &c).re, -1.0 / 3.0, max_relative = 1e-15);
        // off-grid convention: f(q²) = 0
        assert_relative_eq!(bplus(&f0, 0, &c).re, 1.0 / (1.0 - 0.25), max_relative = 1e-15);
    }

    /// `∫ u·B_-v = -q² ∫ (B_+u)·v` on the two-sided grid.
    #[test]
    fn summation_by_parts() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &q in &[0.3f64, 0.5, 0.7] {
            for _ in 0..20 {
                let lo = rng.gen_range(-6i64..0);
                let hi = rng.gen_range(1i64..6);
                let u: Vec<f64> = (lo..=hi).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let v: Vec<f64> = (lo..=hi).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let at = |w: &Vec<f64>, i: i64| {
                    if i < lo || i > hi {
                        Complex64::default()
                    } else {
                        Complex64::new(w[(i - lo) as usize], 0.0)
                    }
                };
                let jackson = |g: &dyn Fn(i64) -> Complex64| -> f64 {
                    (lo - 2..=hi + 2)
                        .map(|k| g(k).re * q.powi(-2 * k as i32))
                        .sum::<f64>()
                        * (q.powi(-2) - 1.0)
                };
                let lhs = jackson(&|k| at(&u, k) * bminus_at(|i| at(&v, i), k, q));
                let rhs = -q * q * jackson(&|k| bplus_at(|i| at(&u, i), k, q) * at(&v, k));
                let scale = jackson(&|k| {
                    Complex64::new((at(&u, k) * bminus_at(|i| at(&v, i), k, q)).norm(), 0.0)
                });
                assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1e-300), "{lhs} vs {rhs}");
            }
        }
    }

    proptest! {
        #[test]
        fn pochhammer_cocycle(a in -2.0f64..2.0, b in 0.05f64..0.95, j in 0usize..15, k in 0usize..15) {
            let lhs = qpochhammer(a, b, j + k);
            let rhs = qpochhammer(a, b, j) * qpochhammer(a * b.powi(j as i32), b, k);
            prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1e-300) + 1e-300);
        }

        #[test]
        fn qgamma_functional_equation(x in 0.1f64..6.0, b in 0.1f64..0.9) {
            let ratio = qgamma(x + 1.0, b).unwrap() / qgamma(x, b).unwrap();
            let expected = (1.0 - b.powf(x)) / (1.0 - b);
            prop_assert!((ratio - expected).abs() <= 1e-12 * expected.abs());
        }
    }
}
