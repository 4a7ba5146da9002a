//! The radial Laplacian `□⁽⁰⁾`: pointwise q-difference form, divergence form,
//! tridiagonal matrix in the basis `e_j`, eigenvalues and the Dirichlet form.
//!
//! The pointwise form is the normalization used throughout. In divergence form
//! it reads `ρ^{-1} B_+ [x(q^{-2n}x - 1) ρ B_- f]` with unit constant, and its
//! quadratic form is `q^{-2} ∫ x(1 - q^{-2n}x) conj(B_-g) B_-f ρ d_{q^{-2}}x`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::hyperg::{phi_l_bridged_profile, SpectralParameterL};
use crate::qcore::{bminus, QContext};
use crate::radial::{basis_ej_coeff, point_mass, rho};
pub use crate::tridiag::TridiagonalOperator;

/// Coefficients `[c_-, c_0, c_+]` with
/// `(□f)(q^{-2k}) = c_- f(q^{-2k+2}) + c_0 f(q^{-2k}) + c_+ f(q^{-2k-2})`.
///
/// `c_-` carries the factor `x - 1` and is exactly zero at `k = 0`.
pub fn pointwise_coefficients(k: usize, ctx: &QContext) -> [f64; 3] {
    let q = ctx.q();
    let x = ctx.grid_x(k as i64);
    let q2m = q.powi(2 * ctx.m() as i32 - 2);
    let q2n = q.powi(-2 * ctx.n() as i32);
    let pre = q * q / ((1.0 - q * q).powi(2) * x);
    [
        pre * (x - 1.0) * q2m,
        pre * (1.0 + q2m - q2m * x - q2n * x),
        pre * (q2n * x - 1.0),
    ]
}

fn output_range(f: &GridFunction) -> Option<std::ops::RangeInclusive<usize>> {
    let (lo, hi) = (f.min_k()?, f.max_k()?);
    Some(lo.saturating_sub(1)..=hi + 1)
}

/// `□⁽⁰⁾f` from the pointwise q-difference formula.
pub fn box_pointwise(f: &GridFunction, ctx: &QContext) -> GridFunction {
    let Some(range) = output_range(f) else {
        return GridFunction::zero();
    };
    range
        .map(|k| {
            let [lo, mid, hi] = pointwise_coefficients(k, ctx);
            (k, f.get_signed(k as i64 - 1) * lo + f.get(k) * mid + f.get(k + 1) * hi)
        })
        .collect()
}

/// `x(q^{-2n}x - 1) ρ(x)` at `x = q^{-2k}`, zero at the off-grid point `x = q²`.
fn flux_weight(k: i64, ctx: &QContext) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let x = ctx.grid_x(k);
    x * (ctx.q().powi(-2 * ctx.n() as i32) * x - 1.0) * rho(k as usize, ctx)
}

/// `□⁽⁰⁾f = ρ^{-1} B_+ [x(q^{-2n}x - 1) ρ B_- f]`.
///
/// At `k = 0`, `B_+` reads the flux at `x = q²`, where `x(q^{-2n}x - 1)ρ(x)`
/// vanishes identically, so the off-grid value of `f` never enters.
pub fn box_divergence(f: &GridFunction, ctx: &QContext) -> GridFunction {
    let Some(range) = output_range(f) else {
        return GridFunction::zero();
    };
    let q = ctx.q();
    let flux = |k: i64| {
        if k < 0 {
            Complex64::default()
        } else {
            bminus(f, k as usize, ctx) * flux_weight(k, ctx)
        }
    };
    range
        .map(|k| {
            let x = ctx.grid_x(k as i64);
            let bplus = (flux(k as i64 - 1) - flux(k as i64)) / ((q * q - 1.0) * x);
            (k, bplus / rho(k, ctx))
        })
        .collect()
}

/// The `size × size` truncation of `□⁽⁰⁾` in the orthonormal basis `e_j`.
pub fn box_matrix(size: usize, ctx: &QContext) -> Result<TridiagonalOperator> {
    if size == 0 {
        return Err(Error::InvalidParameter("matrix size must be at least 1".into()));
    }
    let q = ctx.q();
    let (n, big_n) = (ctx.n() as i32, ctx.dim() as i32);
    let scale = q.powi(ctx.m() as i32 - n + 1) / (1.0 - q * q).powi(2);
    let diag = (0..size as i32)
        .map(|j| {
            scale
                * (q.powi(2 * j + big_n - 1) + q.powi(2 * j + 2 * n - (big_n - 1))
                    - q.powi(big_n - 1)
                    - q.powi(1 - big_n))
        })
        .collect();
    let off = (0..size as i32 - 1)
        .map(|j| scale * ((1.0 - q.powi(2 * j + 2)) * (1.0 - q.powi(2 * j + 2 * n))).sqrt())
        .collect();
    TridiagonalOperator::new(diag, off)
}

/// `λ(l) = -q^{2-2n}(1 - q^{-2l})(1 - q^{2l+2(N-1)}) / (1-q²)²`.
pub fn lambda_of_l(l: Complex64, ctx: &QContext) -> Complex64 {
    let q = ctx.q();
    let ln_q = q.ln();
    let one = Complex64::new(1.0, 0.0);
    let t1 = one - (l * (-2.0 * ln_q)).exp();
    let t2 = one - ((l + (ctx.dim() - 1) as f64) * (2.0 * ln_q)).exp();
    -t1 * t2 * q.powi(2 - 2 * ctx.n() as i32) / (1.0 - q * q).powi(2)
}

/// `λ(z) = -q^{2-2n}(1 - 2q^{N-1}z + q^{2(N-1)}) / (1-q²)²`.
pub fn lambda_of_z(z: f64, ctx: &QContext) -> f64 {
    lambda_of_z_complex(Complex64::new(z, 0.0), ctx).re
}

pub fn lambda_of_z_complex(z: Complex64, ctx: &QContext) -> Complex64 {
    let q = ctx.q();
    let b = q.powi(ctx.dim() as i32 - 1);
    -(Complex64::new(1.0 + b * b, 0.0) - z * (2.0 * b)) * q.powi(2 - 2 * ctx.n() as i32)
        / (1.0 - q * q).powi(2)
}

/// The continuous spectrum `[λ(-1), λ(1)]`.
pub fn spectral_band(ctx: &QContext) -> (f64, f64) {
    (lambda_of_z(-1.0, ctx), lambda_of_z(1.0, ctx))
}

fn quadratic_form(f: &GridFunction, g: &GridFunction, ctx: &QContext, prefactor: f64) -> Complex64 {
    let kmax = f.max_k().into_iter().chain(g.max_k()).max();
    let Some(kmax) = kmax else {
        return Complex64::default();
    };
    let q2n = ctx.q().powi(-2 * ctx.n() as i32);
    (0..=kmax)
        .map(|k| {
            let x = ctx.grid_x(k as i64);
            let w = prefactor * x * (1.0 - q2n * x) * point_mass(k, ctx);
            bminus(g, k, ctx).conj() * bminus(f, k, ctx) * w
        })
        .sum()
}

/// `∫ q^{-2} x(1 - q^{-2n}x) conj(B_-g) B_-f ρ d_{q^{-2}}x`, equal to `∫ conj(g) □f ρ d_{q^{-2}}x`.
pub fn dirichlet_form(f: &GridFunction, g: &GridFunction, ctx: &QContext) -> Complex64 {
    quadratic_form(f, g, ctx, ctx.q().powi(-2))
}

/// The same pairing with the prefactor `q^{2(n-1)}(1-q²)/(1-q^{2(N-1)})` of the
/// `∂̄`-pairing of radial functions; equals `const_box · dirichlet_form`.
pub fn pairing_form(f: &GridFunction, g: &GridFunction, ctx: &QContext) -> Complex64 {
    quadratic_form(f, g, ctx, ctx.pairing_prefactor())
}

/// Ascending eigenvalues of [`box_matrix`].
pub fn truncated_spectrum(size: usize, ctx: &QContext) -> Result<Vec<f64>> {
    if size < 2 {
        return Err(Error::InvalidParameter("spectrum needs a matrix of size at least 2".into()));
    }
    box_matrix(size, ctx)?.eigenvalues()
}

/// Entry `(i, j)` of the matrix of `□⁽⁰⁾` in the basis `e_j`, obtained from
/// the pointwise action on `f_j`: `(c_j / c_i) (□f_j)(q^{-2i})`.
pub fn conjugated_entry(i: usize, j: usize, ctx: &QContext) -> f64 {
    let [lo, mid, hi] = pointwise_coefficients(i, ctx);
    let action = match j as i64 - i as i64 {
        0 => mid,
        1 => hi,
        -1 => lo,
        _ => 0.0,
    };
    basis_ej_coeff(j, ctx) / basis_ej_coeff(i, ctx) * action
}

/// `max_{k≤kmax} |□Φ_l - λ(l)Φ_l| / max_{k≤kmax+1} |Φ_l|` with `Φ_l` from the
/// bridged recurrence.
pub fn eigen_equation_residual(l: &SpectralParameterL, kmax: usize, ctx: &QContext) -> f64 {
    let phi = phi_l_bridged_profile(kmax + 1, l.z, ctx);
    let lambda = lambda_of_l(l.l, ctx);
    let scale = phi.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let worst = (0..=kmax)
        .map(|k| {
            let [lo, mid, hi] = pointwise_coefficients(k, ctx);
            let below = if k == 0 { Complex64::default() } else { phi[k - 1] };
            (below * lo + phi[k] * mid + phi[k + 1] * hi - phi[k] * lambda).norm()
        })
        .fold(0.0, f64::max);
    worst / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperg::phi_l;
    use crate::radial::{inner_product, radial_integral};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

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

    fn random_function(rng: &mut ChaCha8Rng, kmax: usize) -> GridFunction {
        let mut f = GridFunction::zero();
        for k in 0..=kmax {
            if rng.gen_bool(0.7) {
                f.set(k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
        f
    }

    fn max_dev(a: &GridFunction, b: &GridFunction) -> f64 {
        a.sub(b).sup_norm() / a.sup_norm().max(b.sup_norm()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn constants_are_annihilated() {
        for cx in configs() {
            for k in 1..40 {
                let s: f64 = pointwise_coefficients(k, &cx).iter().sum();
                let scale: f64 = pointwise_coefficients(k, &cx).iter().map(|c| c.abs()).sum();
                assert!(s.abs() <= 1e-14 * scale);
            }
            let window = GridFunction::sample(20, |_| Complex64::new(1.0, 0.0));
            let out = box_pointwise(&window, &cx);
            for k in 1..20 {
                assert!(out.get(k).norm() < 1e-12);
            }
            let div = box_divergence(&window, &cx);
            for k in 0..20 {
                assert!(div.get(k).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn action_on_f0() {
        for cx in configs() {
            let q = cx.q();
            let out = box_pointwise(&GridFunction::indicator(0), &cx);
            let pre = q * q / (1.0 - q * q).powi(2);
            assert_relative_eq!(out.get(1).re, pre * (1.0 - q * q) * q.powi(2 * cx.m() as i32 - 2), max_relative = 1e-14);
            assert_relative_eq!(out.get(0).re, pre * (1.0 - q.powi(-2 * cx.n() as i32)), max_relative = 1e-14);
            assert_eq!(out.support_len(), 2);
        }
    }

    #[test]
    fn support_propagation() {
        let cx = QContext::new(0.5, 2, 2).unwrap();
        let out = box_divergence(&GridFunction::indicator(5), &cx);
        let keys: Vec<usize> = out.iter().map(|(k, _)| k).collect();
        assert_eq!(keys, vec![4, 5, 6]);
    }

    #[test]
    fn pointwise_and_divergence_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for cx in configs() {
            for _ in 0..30 {
                let f = random_function(&mut rng, 30);
                let dev = max_dev(&box_pointwise(&f, &cx), &box_divergence(&f, &cx));
                assert!(dev < 1e-12, "{dev}");
            }
        }
    }

    /// The alternative divergence-form constant rescales the operator by `const_box`.
    #[test]
    fn alternative_constant_rescales_the_operator() {
        let cx = QContext::new(0.5, 1, 2).unwrap();
        assert_relative_eq!(cx.const_box(), 0.2, max_relative = 1e-14);
        let f = GridFunction::from_real([(0, 1.0), (1, -0.5), (2, 2.0)]);
        let scaled = box_divergence(&f, &cx).scale(Complex64::new(cx.const_box(), 0.0));
        let pointwise = box_pointwise(&f, &cx);
        for k in 0..=3 {
            assert_relative_eq!(scaled.get(k).re, cx.const_box() * pointwise.get(k).re, max_relative = 1e-12);
        }
    }

    #[test]
    fn matrix_matches_conjugated_pointwise_action() {
        for cx in configs() {
            let m = box_matrix(40, &cx).unwrap();
            for i in 0usize..40 {
                for j in i.saturating_sub(2)..(i + 3).min(40) {
                    let c = conjugated_entry(i, j, &cx);
                    let e = m.entry(i, j);
                    assert!((c - e).abs() <= 1e-13 * e.abs().max(m.diag[i].abs()), "({i},{j}) {c} {e}");
                    assert_eq!(m.entry(i, j), m.entry(j, i));
                }
            }
            assert!(m.off.iter().all(|&o| o > 0.0));
        }
        let cx = QContext::new(0.5, 1, 2).unwrap();
        let [_, mid, _] = pointwise_coefficients(0, &cx);
        assert_relative_eq!(box_matrix(1, &cx).unwrap().diag[0], mid, max_relative = 1e-14);
        assert!(box_matrix(0, &cx).is_err());
    }

    #[test]
    fn lambda_parameterizations() {
        let cx = QContext::new(0.5, 1, 2).unwrap();
        assert_eq!(lambda_of_l(Complex64::default(), &cx), Complex64::default());
        let q: f64 = 0.5;
        let expected = -(1.0 - q * q).powi(2) / (1.0 - q * q).powi(2);
        assert_relative_eq!(lambda_of_z(1.0, &cx), expected, max_relative = 1e-15);
        for cx in configs() {
            for i in 0..20 {
                let theta = 0.05 + 3.0 * i as f64 / 19.0;
                let lp = SpectralParameterL::critical(theta, &cx);
                let a = lambda_of_l(lp.l, &cx);
                let b = lambda_of_z(theta.cos(), &cx);
                assert!((a - b).norm() <= 1e-13 * b.abs());
                assert!(b < 0.0);
            }
        }
    }

    #[test]
    fn eigen_equation_on_literal_series() {
        let cx = QContext::new(0.5, 2, 2).unwrap();
        for &l in &[0.4, 1.0] {
            let lp = SpectralParameterL::real(l, &cx);
            let f: GridFunction = (0..=5).map(|k| (k, phi_l(k, &lp, &cx).unwrap())).collect();
            let out = box_pointwise(&f, &cx);
            let lambda = lambda_of_l(lp.l, &cx);
            for k in 0..5 {
                let r = (out.get(k) - f.get(k) * lambda).norm();
                assert!(r <= 1e-10 * f.sup_norm(), "k={k} r={r}");
            }
        }
    }

    #[test]
    fn eigen_equation_bridged() {
        for cx in configs() {
            let mut ls: Vec<SpectralParameterL> =
                [0.2, 0.6, 1.0, 1.5, 2.0].iter().map(|&l| SpectralParameterL::real(l, &cx)).collect();
            ls.extend([0.3, 0.9, 1.6, 2.3, 3.0].iter().map(|&t| SpectralParameterL::critical(t, &cx)));
            for lp in &ls {
                let r = eigen_equation_residual(lp, 40, &cx);
                assert!(r < 1e-10, "{cx:?} l={} r={r}", lp.l);
            }
        }
    }

    #[test]
    fn dirichlet_form_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for cx in configs() {
            for _ in 0..10 {
                let f = random_function(&mut rng, 15);
                let g = random_function(&mut rng, 15);
                let lhs = inner_product(&box_pointwise(&f, &cx), &g, &cx);
                let rhs = dirichlet_form(&f, &g, &cx);
                assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm().max(lhs.norm()), "{lhs} {rhs}");
                let scaled = pairing_form(&f, &g, &cx);
                assert!((scaled - rhs * cx.const_box()).norm() <= 1e-12 * scaled.norm());
            }
        }
    }

    #[test]
    fn dirichlet_form_trivial_cases() {
        let cx = QContext::new(0.7, 1, 3).unwrap();
        let constant = GridFunction::sample(10, |_| Complex64::new(1.0, 0.0));
        let f = GridFunction::from_real([(0, 1.0), (3, 2.0)]);
        // B_- of the window constant only sees the edge k = 10, outside the support of f
        assert_eq!(dirichlet_form(&constant, &f, &cx), Complex64::default());
        assert_eq!(dirichlet_form(&f, &constant, &cx), Complex64::default());
        assert_eq!(dirichlet_form(&f, &GridFunction::zero(), &cx), Complex64::default());
        let d = dirichlet_form(&f, &f, &cx);
        assert_eq!(d.im, 0.0);
        assert!(d.re < 0.0);
    }

    #[test]
    fn form_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for cx in configs() {
            for _ in 0..5 {
                let f = random_function(&mut rng, 12).map(|_, v| Complex64::new(v.re, 0.0));
                let g = random_function(&mut rng, 12).map(|_, v| Complex64::new(v.re, 0.0));
                let a = radial_integral(&g.conj().mul(&box_pointwise(&f, &cx)), &cx);
                let b = radial_integral(&f.conj().mul(&box_pointwise(&g, &cx)), &cx).conj();
                assert!((a - b).norm() <= 1e-11 * a.norm().max(b.norm()));
            }
        }
    }

    #[test]
    fn spectrum_lies_in_the_band_plus_masses() {
        use crate::asc::build_spectral_measure;
        for cx in configs() {
            let (lo, hi) = spectral_band(&cx);
            let ev = truncated_spectrum(200, &cx).unwrap();
            let masses: Vec<f64> = build_spectral_measure(&cx, 1e-14)
                .unwrap()
                .mass_points()
                .iter()
                .map(|m| lambda_of_z(m.z, &cx))
                .collect();
            let tol = 1e-6;
            for &v in &ev {
                let in_band = v >= lo - tol && v <= hi + tol;
                let at_mass = masses.iter().any(|&m| (v - m).abs() <= tol);
                assert!(in_band || at_mass, "{cx:?}: stray eigenvalue {v}, band [{lo},{hi}]");
            }
            for &m in &masses {
                assert!(ev.iter().any(|&v| (v - m).abs() <= tol));
            }
        }
    }

    #[test]
    fn truncated_norms_are_bounded_and_stabilize() {
        for cx in configs() {
            let norms: Vec<f64> = [25, 50, 100, 200, 400]
                .iter()
                .map(|&s| box_matrix(s, &cx).unwrap().norm().unwrap())
                .collect();
            assert!(norms.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0]));
            let (lo, _) = spectral_band(&cx);
            assert!(norms[4] <= lo.abs() * (1.0 + 1e-12));
            assert!((norms[4] - norms[3]).abs() <= 5e-4 * norms[4]);
        }
    }
}
