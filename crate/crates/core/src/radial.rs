//! The radial density `ρ`, the invariant integral of radial functions, and the
//! orthogonal bases `f_j` (grid indicators) and `e_j` (their normalizations).

use num_complex::Complex64;

use crate::grid::GridFunction;
use crate::qcore::{qpochhammer, QContext};

/// `ρ(q^{-2k}) = const2 · x^{m-1} ∏_{j=1}^{n-1}(q^{-2j}x - 1)`.
///
/// Evaluated on demand; the product has only `n - 1` factors, so there is no
/// cache.
pub fn rho(k: usize, ctx: &QContext) -> f64 {
    let q = ctx.q();
    let x = ctx.grid_x(k as i64);
    let prod: f64 = (1..ctx.n()).map(|j| q.powi(-2 * j as i32) * x - 1.0).product();
    ctx.const2() * x.powi(ctx.m() as i32 - 1) * prod
}

/// The measure `ρ(x) d_{q^{-2}}x` on the radial grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDensity {
    pub ctx: QContext,
}

impl RadialDensity {
    pub fn new(ctx: QContext) -> Self {
        Self { ctx }
    }

    pub fn rho(&self, k: usize) -> f64 {
        rho(k, &self.ctx)
    }

    /// The mass `(q^{-2}-1) ρ(q^{-2k}) q^{-2k}` of the grid point `k`.
    pub fn point_mass(&self, k: usize) -> f64 {
        point_mass(k, &self.ctx)
    }
}

/// `(q^{-2}-1) ρ(q^{-2k}) q^{-2k}`, the invariant measure of `{q^{-2k}}`.
pub fn point_mass(k: usize, ctx: &QContext) -> f64 {
    (ctx.q().powi(-2) - 1.0) * rho(k, ctx) * ctx.grid_x(k as i64)
}

/// `∫_1^∞ f(x) ρ(x) d_{q^{-2}}x`, an exact finite sum.
pub fn radial_integral(f: &GridFunction, ctx: &QContext) -> Complex64 {
    f.iter().map(|(k, v)| v * point_mass(k, ctx)).sum()
}

/// `⟨f, g⟩ = ∫ f · conj(g) ρ d_{q^{-2}}x`.
pub fn inner_product(f: &GridFunction, g: &GridFunction, ctx: &QContext) -> Complex64 {
    f.iter().map(|(k, v)| v * g.get(k).conj() * point_mass(k, ctx)).sum()
}

/// `‖f‖²` in `L²(ρ d_{q^{-2}}x)`.
pub fn norm_sq(f: &GridFunction, ctx: &QContext) -> f64 {
    f.iter().map(|(k, v)| v.norm_sqr() * point_mass(k, ctx)).sum()
}

/// `‖f_j‖² = q^{-2j(N-1)} (q^{2j+2};q²)_{n-1} / (q²;q²)_{n-1}`.
pub fn norm_fj(j: usize, ctx: &QContext) -> f64 {
    let q = ctx.q();
    let p = ctx.base();
    let n1 = ctx.n() - 1;
    q.powi(-2 * (j * (ctx.dim() - 1)) as i32) * qpochhammer(p.powi(j as i32 + 1), p, n1)
        / qpochhammer(p, p, n1)
}

/// `c_j` with `e_j = c_j f_j` orthonormal: `q^{j(N-1)} √((q²;q²)_{n-1} / (q^{2j+2};q²)_{n-1})`.
pub fn basis_ej_coeff(j: usize, ctx: &QContext) -> f64 {
    let q = ctx.q();
    let p = ctx.base();
    let n1 = ctx.n() - 1;
    q.powi((j * (ctx.dim() - 1)) as i32)
        * (qpochhammer(p, p, n1) / qpochhammer(p.powi(j as i32 + 1), p, n1)).sqrt()
}

/// Coordinates of `f` in the orthonormal basis `e_0, …, e_jmax`.
pub fn to_e_coords(f: &GridFunction, jmax: usize, ctx: &QContext) -> Vec<Complex64> {
    (0..=jmax).map(|j| f.get(j) / basis_ej_coeff(j, ctx)).collect()
}

/// The grid function `Σ_j coords[j] e_j`.
pub fn from_e_coords(coords: &[Complex64], ctx: &QContext) -> GridFunction {
    coords
        .iter()
        .enumerate()
        .map(|(j, &c)| (j, c * basis_ej_coeff(j, ctx)))
        .collect()
}
