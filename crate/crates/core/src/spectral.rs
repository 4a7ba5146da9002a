//! The unitary transform `U: L²(ρ d_{q^{-2}}x) → L²(dσ̂)` diagonalizing the
//! radial Laplacian, its inverse, and the Plancherel and intertwining checks.

use num_complex::Complex64;

use crate::asc::{orthonormal_at, SpectralMeasure, SpectralPoint};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::laplacian::{box_pointwise, lambda_of_z};
use crate::qcore::{qpochhammer, QContext};
use crate::radial::{basis_ej_coeff, norm_sq};

/// A function on the discretized spectrum: one value per quadrature node and
/// per mass point of its measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    measure: SpectralMeasure,
    /// Values at `measure.nodes()`, in order.
    pub continuous: Vec<Complex64>,
    /// Values at `measure.mass_points()`, in order.
    pub masses: Vec<Complex64>,
}

impl SpectralFunction {
    /// Samples `g` at every point of the measure.
    pub fn from_fn<F: FnMut(SpectralPoint) -> Complex64>(measure: &SpectralMeasure, mut g: F) -> Self {
        let mut continuous = Vec::with_capacity(measure.nodes().len());
        let mut masses = Vec::with_capacity(measure.mass_points().len());
        for (pt, _) in measure.points() {
            match pt {
                SpectralPoint::Continuous { .. } => continuous.push(g(pt)),
                SpectralPoint::Mass { .. } => masses.push(g(pt)),
            }
        }
        Self { measure: measure.clone(), continuous, masses }
    }

    /// Wraps given values; their counts must match the nodes and masses of `measure`.
    pub fn from_values(measure: &SpectralMeasure, continuous: Vec<Complex64>, masses: Vec<Complex64>) -> Result<Self> {
        if continuous.len() != measure.nodes().len() || masses.len() != measure.mass_points().len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} continuous and {} mass values, got {} and {}",
                measure.nodes().len(),
                measure.mass_points().len(),
                continuous.len(),
                masses.len()
            )));
        }
        Ok(Self { measure: measure.clone(), continuous, masses })
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }

    /// `(point, value)` pairs, continuous nodes first.
    pub fn samples(&self) -> impl Iterator<Item = (SpectralPoint, Complex64)> + '_ {
        self.measure
            .points()
            .map(|(pt, _)| pt)
            .zip(self.continuous.iter().chain(self.masses.iter()).copied())
    }

    fn weighted(&self) -> impl Iterator<Item = (SpectralPoint, f64, Complex64)> + '_ {
        self.measure
            .points()
            .zip(self.continuous.iter().chain(self.masses.iter()).copied())
            .map(|((pt, w), v)| (pt, w, v))
    }

    /// `⟨self, other⟩ = ∫ self · conj(other) dσ̂`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok(self
            .weighted()
            .zip(other.continuous.iter().chain(other.masses.iter()))
            .map(|((_, w, a), b)| a * b.conj() * w)
            .sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.weighted().map(|(_, w, v)| w * v.norm_sqr()).sum()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let zip = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        Ok(Self {
            measure: self.measure.clone(),
            continuous: zip(&self.continuous, &other.continuous),
            masses: zip(&self.masses, &other.masses),
        })
    }

    /// Pointwise product with `h(z)`.
    pub fn multiply_by<F: Fn(f64) -> f64>(&self, h: F) -> Self {
        let mut out = self.clone();
        for ((pt, _), v) in self.measure.points().zip(out.continuous.iter_mut().chain(out.masses.iter_mut())) {
            *v *= h(pt.z());
        }
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.measure.nodes().len() != other.measure.nodes().len()
            || self.masses.len() != other.masses.len()
        {
            return Err(Error::InvalidParameter("spectral functions live on different grids".into()));
        }
        Ok(())
    }
}

/// `U f_j = P_j / c_j = q^{-j(N-1)}/(q²;q²)_j · Q_j`, the image of a grid indicator.
pub fn transform_of_indicator(j: usize, point: SpectralPoint, ctx: &QContext) -> f64 {
    let params = crate::asc::ASCParams::from_ctx(ctx);
    orthonormal_at(j, point, &params)[j] / basis_ej_coeff(j, ctx)
}

/// `Uf(z) = ∫ f(x) Φ_{l(z)}(x) ρ(x) d_{q^{-2}}x` at every point of the measure.
///
/// With the bridging identity each grid point contributes
/// `f(q^{-2k}) q^{-k(N-1)}/(q²;q²)_k Q_k(z) = f(q^{-2k}) P_k(z)/c_k`; the
/// orthonormal form is summed, which keeps every term of moderate size.
pub fn transform_forward(f: &GridFunction, measure: &SpectralMeasure, ctx: &QContext) -> SpectralFunction {
    let params = measure.params;
    let kmax = f.max_k().unwrap_or(0);
    let inv_c: Vec<f64> = (0..=kmax).map(|k| 1.0 / basis_ej_coeff(k, ctx)).collect();
    SpectralFunction::from_fn(measure, |pt| {
        let p = orthonormal_at(kmax, pt, &params);
        f.iter().map(|(k, v)| v * (p[k] * inv_c[k])).sum()
    })
}

/// `f(q^{-2j}) = ⟨fhat, U f_j⟩ / ‖f_j‖² = c_j ⟨fhat, P_j⟩` for `j = 0..=jmax`.
pub fn transform_inverse(fhat: &SpectralFunction, ctx: &QContext, jmax: usize) -> GridFunction {
    let params = fhat.measure.params;
    let mut acc = vec![Complex64::default(); jmax + 1];
    for (pt, w, v) in fhat.weighted() {
        let p = orthonormal_at(jmax, pt, &params);
        for (a, pj) in acc.iter_mut().zip(p) {
            *a += v * (w * pj);
        }
    }
    acc.into_iter()
        .enumerate()
        .map(|(j, a)| (j, a * basis_ej_coeff(j, ctx)))
        .collect()
}

/// `(‖f‖², ‖Uf‖²)`, equal by unitarity.
pub fn plancherel_check(f: &GridFunction, measure: &SpectralMeasure, ctx: &QContext) -> (f64, f64) {
    (norm_sq(f, ctx), transform_forward(f, measure, ctx).norm_sq())
}

/// `‖U(□f) - λ(z)·Uf‖` in `L²(dσ̂)`.
pub fn multiplication_equivalence_check(f: &GridFunction, measure: &SpectralMeasure, ctx: &QContext) -> f64 {
    let lhs = transform_forward(&box_pointwise(f, ctx), measure, ctx);
    let rhs = transform_forward(f, measure, ctx).multiply_by(|z| lambda_of_z(z, ctx));
    lhs.sub(&rhs).map(|d| d.norm_sq().sqrt()).unwrap_or(f64::NAN)
}

/// `q^{-j(N-1)}/(q²;q²)_j`, the factor in `U f_j = q^{-j(N-1)}/(q²;q²)_j · Q_j`.
pub fn indicator_transform_factor(j: usize, ctx: &QContext) -> f64 {
    ctx.q().powi(-((j * (ctx.dim() - 1)) as i32)) / qpochhammer(ctx.base(), ctx.base(), j)
}
