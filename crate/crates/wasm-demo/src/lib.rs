//! Browser bindings for three views of the radial theory: eigenfunction
//! profiles, the spectral measure, and the truncated Laplacian spectrum.

use num_complex::Complex64;
use qradial::asc::build_spectral_measure;
use qradial::error::Result;
use qradial::hyperg::{phi_l_bridged_profile, SpectralParameterL};
use qradial::laplacian::{lambda_of_l, lambda_of_z, spectral_band, truncated_spectrum};
use qradial::qcore::QContext;
use wasm_bindgen::prelude::*;

const TOL: f64 = 1e-14;

/// `Φ_l(q^{-2k})` for `k = 0..=kmax` as interleaved `[re, im, re, im, ...]`,
/// followed by `λ(l)` as a final `re, im` pair.
pub fn phi_profile_values(q: f64, n: usize, m: usize, l: Complex64, kmax: usize) -> Result<Vec<f64>> {
    let ctx = QContext::new(q, n, m)?;
    let z = SpectralParameterL::new(l, &ctx).z;
    let lambda = lambda_of_l(l, &ctx);
    Ok(phi_l_bridged_profile(kmax, z, &ctx)
        .into_iter()
        .chain(std::iter::once(lambda))
        .flat_map(|v| [v.re, v.im])
        .collect())
}

/// The spectral measure flattened for plotting.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureView {
    z: Vec<f64>,
    density: Vec<f64>,
    mass_z: Vec<f64>,
    mass_lambda: Vec<f64>,
    mass_weight: Vec<f64>,
    total: f64,
}

#[wasm_bindgen]
impl MeasureView {
    /// Quadrature nodes in `z`, increasing.
    pub fn z(&self) -> Vec<f64> {
        self.z.clone()
    }

    /// Continuous density `dσ/dz` at the nodes.
    pub fn density(&self) -> Vec<f64> {
        self.density.clone()
    }

    pub fn mass_z(&self) -> Vec<f64> {
        self.mass_z.clone()
    }

    /// Laplacian eigenvalue of each mass point.
    pub fn mass_lambda(&self) -> Vec<f64> {
        self.mass_lambda.clone()
    }

    pub fn mass_weight(&self) -> Vec<f64> {
        self.mass_weight.clone()
    }

    /// Total mass, 1 up to quadrature error.
    pub fn total(&self) -> f64 {
        self.total
    }
}

pub fn measure_view(q: f64, n: usize, m: usize) -> Result<MeasureView> {
    let ctx = QContext::new(q, n, m)?;
    let meas = build_spectral_measure(&ctx, TOL)?;
    let mut nodes: Vec<(f64, f64)> = meas
        .nodes()
        .iter()
        .filter(|nd| nd.z.abs() < 1.0)
        .map(|nd| (nd.z, meas.continuous_density(nd.z)))
        .collect();
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (z, density) = nodes.into_iter().unzip();
    let masses = meas.mass_points();
    Ok(MeasureView {
        z,
        density,
        mass_z: masses.iter().map(|p| p.z).collect(),
        mass_lambda: masses.iter().map(|p| lambda_of_z(p.z, &ctx)).collect(),
        mass_weight: masses.iter().map(|p| p.weight).collect(),
        total: meas.total_mass(),
    })
}

/// Eigenvalues of the `size × size` truncation, increasing, followed by the
/// continuous band `[lo, hi]`.
pub fn spectrum_values(q: f64, n: usize, m: usize, size: usize) -> Result<Vec<f64>> {
    let ctx = QContext::new(q, n, m)?;
    let mut ev = truncated_spectrum(size, &ctx)?;
    ev.sort_by(f64::total_cmp);
    let (lo, hi) = spectral_band(&ctx);
    ev.extend([lo, hi]);
    Ok(ev)
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn phi_profile(q: f64, n: usize, m: usize, l_re: f64, l_im: f64, kmax: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(phi_profile_values(q, n, m, Complex64::new(l_re, l_im), kmax))
}

#[wasm_bindgen]
pub fn spectral_measure(q: f64, n: usize, m: usize) -> std::result::Result<MeasureView, JsError> {
    js(measure_view(q, n, m))
}

#[wasm_bindgen]
pub fn laplacian_spectrum(q: f64, n: usize, m: usize, size: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(spectrum_values(q, n, m, size))
}
