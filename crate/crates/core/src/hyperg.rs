//! Basic hypergeometric series and the radial eigenfunctions `Φ_l`.

use num_complex::Complex64;

use crate::asc::ASCParams;
use crate::error::{Error, Result};
use crate::qcore::{qpochhammer, QContext};

const TERMINATION_TOL: f64 = 1e-14;

/// Parameters of `rφs(upper; lower; base, argument)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSeriesSpec {
    pub upper: Vec<Complex64>,
    /// A lower parameter equal to zero contributes a factor 1.
    pub lower: Vec<Complex64>,
    pub base: f64,
    pub argument: Complex64,
    /// Set when some upper parameter is known to be exactly `base^{-K}`: the
    /// series then has exactly `K + 1` terms and is never truncated by tolerance.
    pub terminates_after: Option<usize>,
}

impl PhiSeriesSpec {
    pub fn new(upper: Vec<Complex64>, lower: Vec<Complex64>, base: f64, argument: Complex64) -> Self {
        Self { upper, lower, base, argument, terminates_after: None }
    }

    pub fn terminating(mut self, last_index: usize) -> Self {
        self.terminates_after = Some(last_index);
        self
    }
}

/// Value of a series together with `Σ|term|`, which bounds the rounding
/// error of the summation (`≈ eps·abs_sum`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub abs_sum: f64,
    pub terms: usize,
}

impl SeriesValue {
    /// `abs_sum / |value|`, the amplification of rounding errors.
    pub fn condition(&self) -> f64 {
        self.abs_sum / self.value.norm()
    }
}

/// `rφs`, see [`phi_series_detailed`].
pub fn phi_series(spec: &PhiSeriesSpec, max_terms: usize, tol: f64) -> Result<Complex64> {
    phi_series_detailed(spec, max_terms, tol).map(|s| s.value)
}

/// Sums `Σ_j ∏(upper;base)_j / (∏(lower;base)_j (base;base)_j) · [(-1)^j base^{j(j-1)/2}]^{1+s-r} · argument^j`.
///
/// The summation stops exactly after the last nonzero term of a terminating
/// series and otherwise once `|term| < tol·|sum|` while the term ratio is
/// below one.
pub fn phi_series_detailed(spec: &PhiSeriesSpec, max_terms: usize, tol: f64) -> Result<SeriesValue> {
    let p = spec.base;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("base must lie in (0,1), got {p}")));
    }
    let balance = 1 + spec.lower.len() as i32 - spec.upper.len() as i32;
    let one = Complex64::new(1.0, 0.0);
    let mut term = one;
    let mut sum = one;
    let mut abs_sum = 1.0;
    let mut power = 1.0;
    for j in 0..max_terms {
        if spec.terminates_after == Some(j) {
            return Ok(SeriesValue { value: sum, abs_sum, terms: j + 1 });
        }
        let mut num = one;
        let mut vanishes = false;
        for &a in &spec.upper {
            let f = one - a * power;
            if f == Complex64::default() || (spec.terminates_after.is_none() && f.norm() < TERMINATION_TOL) {
                vanishes = true;
            }
            num *= f;
        }
        if vanishes {
            return Ok(SeriesValue { value: sum, abs_sum, terms: j + 1 });
        }
        let mut den = Complex64::new(1.0 - power * p, 0.0);
        for &b in &spec.lower {
            let f = one - b * power;
            if f.norm() < TERMINATION_TOL {
                return Err(Error::DivisionByZero(format!(
                    "lower parameter {b} makes (b;base)_{} vanish",
                    j + 1
                )));
            }
            den *= f;
        }
        let mut ratio = num / den * spec.argument;
        if balance != 0 {
            ratio *= (-power).powi(balance);
        }
        term *= ratio;
        sum += term;
        abs_sum += term.norm();
        if spec.terminates_after.is_none() && ratio.norm() < 1.0 && term.norm() < tol * sum.norm() {
            return Ok(SeriesValue { value: sum, abs_sum, terms: j + 2 });
        }
        power *= p;
    }
    Err(Error::NonConvergent { what: "basic hypergeometric series", iterations: max_terms })
}

/// The spectral parameter `l` with `e^{iθ} = q^{2l+N-1}` and `z = cos θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameterL {
    pub l: Complex64,
    pub e_plus: Complex64,
    pub z: Complex64,
}

impl SpectralParameterL {
    pub fn new(l: Complex64, ctx: &QContext) -> Self {
        let ln_q = ctx.q().ln();
        let e_plus = ((l * 2.0 + (ctx.dim() - 1) as f64) * ln_q).exp();
        let z = (e_plus + e_plus.inv()) * 0.5;
        Self { l, e_plus, z }
    }

    pub fn real(l: f64, ctx: &QContext) -> Self {
        Self::new(Complex64::new(l, 0.0), ctx)
    }

    /// The point `l = -(N-1)/2 + iθ/(2 ln q)` of the critical line, where `z = cos θ`.
    pub fn critical(theta: f64, ctx: &QContext) -> Self {
        let l = Complex64::new(-((ctx.dim() - 1) as f64) / 2.0, theta / (2.0 * ctx.q().ln()));
        let mut s = Self::new(l, ctx);
        s.z = Complex64::new(theta.cos(), 0.0);
        s
    }

    /// The reflected parameter `-l-(N-1)`, which has the same `z`.
    pub fn reflected(&self, ctx: &QContext) -> Self {
        Self::new(-self.l - (ctx.dim() - 1) as f64, ctx)
    }
}

fn phi_l_spec(k: usize, l: &SpectralParameterL, ctx: &QContext) -> PhiSeriesSpec {
    let ln_q = ctx.q().ln();
    let big_n = (ctx.dim() - 1) as f64;
    let upper = vec![
        Complex64::new(ctx.q().powi(-2 * k as i32), 0.0),
        (l.l * (-2.0 * ln_q)).exp(),
        ((l.l + big_n) * (2.0 * ln_q)).exp(),
    ];
    let lower = vec![Complex64::new(ctx.q().powi(2 * ctx.n() as i32), 0.0), Complex64::default()];
    PhiSeriesSpec::new(upper, lower, ctx.base(), Complex64::new(ctx.base(), 0.0)).terminating(k)
}

/// `Φ_l(q^{-2k})` as the terminating series
/// `₃φ₂(q^{-2k}, q^{-2l}, q^{2(l+N-1)}; q^{2n}, 0; q², q²)`.
///
/// The terms grow like `q^{-2jk}` before cancelling, so for large `k` prefer
/// [`phi_l_bridged`]; [`phi_l_detailed`] reports the condition number.
pub fn phi_l(k: usize, l: &SpectralParameterL, ctx: &QContext) -> Result<Complex64> {
    phi_l_detailed(k, l, ctx).map(|s| s.value)
}

pub fn phi_l_detailed(k: usize, l: &SpectralParameterL, ctx: &QContext) -> Result<SeriesValue> {
    phi_series_detailed(&phi_l_spec(k, l, ctx), k + 1, 0.0)
}

/// `Φ_l(q^{-2k})` for `k = 0..=kmax` through the Al-Salam–Chihara three-term
/// recurrence, `Φ_l(q^{-2k}) = q^{k(N-1)}/(q^{2n};q²)_k · Q_k(z)`.
///
/// The scaling is folded into the recurrence, so no intermediate quantity
/// overflows.
pub fn phi_l_bridged_profile(kmax: usize, z: Complex64, ctx: &QContext) -> Vec<Complex64> {
    let ASCParams { a, b, base: p } = ASCParams::from_ctx(ctx);
    let ab = a * b;
    let mut out = Vec::with_capacity(kmax + 1);
    let mut prev = Complex64::default();
    let mut cur = Complex64::new(1.0, 0.0);
    let mut power = 1.0;
    out.push(cur);
    for _ in 0..kmax {
        let next = (cur * (z * 2.0 - power * (a + b)) * b - prev * (b * b * (1.0 - power)))
            / (1.0 - ab * power);
        prev = cur;
        cur = next;
        out.push(cur);
        power *= p;
    }
    out
}

/// `Φ_l(q^{-2k})` through the bridging identity, stable for every `k`.
pub fn phi_l_bridged(k: usize, l: &SpectralParameterL, ctx: &QContext) -> Complex64 {
    phi_l_bridged_profile(k, l.z, ctx)[k]
}

/// `q^{k(N-1)} / (q^{2n};q²)_k`, the factor relating `Φ_l` to `Q_k`.
pub fn bridge_factor(k: usize, ctx: &QContext) -> f64 {
    let q = ctx.q();
    q.powi((k * (ctx.dim() - 1)) as i32) / qpochhammer(q.powi(2 * ctx.n() as i32), ctx.base(), k)
}
