//! The acceptance battery: thirteen numerical checks, each with a pinned
//! tolerance and a wall-clock limit.

use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asc::{build_spectral_measure, orthonormal_at};
use crate::cfun::{asymptotics_check, wc_identity_check};
use crate::error::Result;
use crate::grid::GridFunction;
use crate::hyperg::SpectralParameterL;
use crate::laplacian::{
    box_divergence, box_matrix, box_pointwise, dirichlet_form, eigen_equation_residual, lambda_of_z,
    spectral_band, truncated_spectrum,
};
use crate::qcore::{qpascal_psi, QContext};
use crate::radial::{from_e_coords, inner_product, norm_sq, radial_integral, to_e_coords};
use crate::repsim::{build_rep, check_relations, radial_equivalence_check};
use crate::spectral::{transform_forward, transform_inverse};

/// Tolerance of the spectral measure used throughout the battery.
pub const MEASURE_TOL: f64 = 1e-14;

/// Which configurations the battery runs on.
#[derive(Debug, Clone, PartialEq)]
pub struct Battery {
    /// Configurations for every criterion except the representation ones.
    pub contexts: Vec<QContext>,
    /// Configurations for the truncated-representation criteria.
    pub rep_contexts: Vec<QContext>,
    /// Truncation bound for the trace integral.
    pub trace_bound: usize,
    /// Truncation bound for the relation checks.
    pub relation_bound: usize,
    pub seed: u64,
}

pub const BATTERY_QS: [f64; 3] = [0.3, 0.5, 0.7];

impl Battery {
    /// Every `(n, m)` with `n + m ≤ 6` and `q ∈ {0.3, 0.5, 0.7}`; the
    /// representation checks on `(1,2)`, `(1,3)`, `(2,2)`.
    pub fn full() -> Self {
        let mut contexts = Vec::new();
        let mut rep_contexts = Vec::new();
        for q in BATTERY_QS {
            for big_n in 3..=6 {
                for n in 1..big_n - 1 {
                    contexts.push(QContext::new(q, n, big_n - n).expect("valid battery parameters"));
                }
            }
            for (n, m) in [(1, 2), (1, 3), (2, 2)] {
                rep_contexts.push(QContext::new(q, n, m).expect("valid battery parameters"));
            }
        }
        Self { contexts, rep_contexts, trace_bound: 30, relation_bound: 20, seed: 2024 }
    }

    /// A single configuration. Representations of dimension above four use a
    /// smaller window, since the index set grows like `M^{N-1}`.
    pub fn single(ctx: QContext, seed: u64) -> Self {
        let (trace_bound, relation_bound) = if ctx.dim() <= 4 { (30, 20) } else { (10, 8) };
        Self { contexts: vec![ctx], rep_contexts: vec![ctx], trace_bound, relation_bound, seed }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    /// Measured quantities against their thresholds.
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} ({:.2} s, limit {} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        )
    }
}

type Check = fn(&Battery) -> Result<(bool, String)>;

/// `(id, title, time limit in seconds, check)`.
pub const CRITERIA: [(usize, &str, u64, Check); 13] = [
    (1, "normalization of the invariant integral", 1, normalization),
    (2, "q-Pascal closed form vs lattice sum", 5, qpascal),
    (3, "trace integral equals radial integral", 60, trace_equality),
    (4, "representation relations", 60, relations),
    (5, "Laplacian route equivalence", 10, route_equivalence),
    (6, "Dirichlet form identity", 10, dirichlet),
    (7, "eigen-equation", 30, eigen_equation),
    (8, "orthonormality including masses", 60, orthonormality),
    (9, "Plancherel and intertwining", 120, plancherel),
    (10, "round-trip inversion", 60, round_trip),
    (11, "boundedness and spectral band", 30, spectral_band_check),
    (12, "asymptotics of eigenfunctions", 10, asymptotics),
    (13, "continuous weight vs c-function", 10, weight_identity),
];

/// Runs one criterion by id (1-based).
pub fn run_criterion(id: usize, battery: &Battery) -> Outcome {
    let (id, title, limit, check) = CRITERIA[id - 1];
    let start = Instant::now();
    let result = check(battery);
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit);
    let (ok, mut detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    if elapsed > limit {
        detail.push_str("; over the time limit");
    }
    Outcome { id, title, passed: ok && elapsed <= limit, detail, elapsed, limit }
}

pub fn run_all(battery: &Battery) -> Vec<Outcome> {
    (1..=CRITERIA.len()).map(|id| run_criterion(id, battery)).collect()
}

/// `Ψ(j,k)` as the literal sum of `q^{-2Σ_s (k-s+1) i_s}` over
/// `i_1..i_k ≥ 0` with `Σ i_s ≤ j`.
pub fn qpascal_lattice_sum(j: usize, k: usize, q: f64) -> f64 {
    fn rec(s: usize, k: usize, budget: usize, r: f64) -> f64 {
        if s > k {
            return 1.0;
        }
        let step = r.powi((k - s + 1) as i32);
        let mut w = 1.0;
        let mut total = 0.0;
        for i in 0..=budget {
            total += w * rec(s + 1, k, budget - i, r);
            w *= step;
        }
        total
    }
    rec(1, k, j, q.powi(-2))
}

/// Random values at each `k ≤ kmax`, each present with probability 0.7.
pub fn random_function(rng: &mut ChaCha8Rng, kmax: usize) -> GridFunction {
    let mut f = GridFunction::zero();
    for k in 0..=kmax {
        if rng.gen_bool(0.7) {
            f.set(k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    f
}

/// Random coordinates in the orthonormal basis `e_0..e_kmax`.
pub fn random_e_function(rng: &mut ChaCha8Rng, kmax: usize, ctx: &QContext) -> GridFunction {
    let coords: Vec<Complex64> =
        (0..=kmax).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    from_e_coords(&coords, ctx)
}

/// Alternates between the two random families.
fn random_mixed(rng: &mut ChaCha8Rng, i: usize, kmax: usize, ctx: &QContext) -> GridFunction {
    if i % 2 == 0 {
        random_function(rng, kmax)
    } else {
        random_e_function(rng, kmax, ctx)
    }
}

fn rel_sup(a: &GridFunction, b: &GridFunction) -> f64 {
    a.sub(b).sup_norm() / a.sup_norm().max(b.sup_norm()).max(f64::MIN_POSITIVE)
}

fn verdict(worst: f64, tol: f64, what: &str) -> (bool, String) {
    (worst < tol, format!("max {what} {worst:.3e} (< {tol:.0e})"))
}

fn normalization(b: &Battery) -> Result<(bool, String)> {
    let worst = b
        .contexts
        .iter()
        .map(|cx| (radial_integral(&GridFunction::indicator(0), cx) - 1.0).norm())
        .fold(0.0, f64::max);
    Ok(verdict(worst, 1e-14, "|∫f_0 - 1|"))
}

fn qpascal(b: &Battery) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut qs: Vec<f64> = b.contexts.iter().map(|c| c.q()).collect();
    qs.dedup();
    for &q in &qs {
        let cx = QContext::new(q, 1, 2)?;
        for j in 0..=8 {
            for k in 0..=8 {
                let closed = qpascal_psi(j, k, &cx);
                let brute = qpascal_lattice_sum(j, k, q);
                worst = worst.max((closed - brute).abs() / brute.abs());
            }
        }
    }
    Ok(verdict(worst, 1e-12, "relative deviation"))
}

fn trace_equality(b: &Battery) -> Result<(bool, String)> {
    let mut rng = b.rng(3);
    let mut ok = true;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut largest_tail: f64 = 0.0;
    for cx in &b.rep_contexts {
        let rep = build_rep(b.trace_bound, cx)?;
        let mut fs = vec![GridFunction::indicator(0), GridFunction::indicator(3)];
        fs.extend((0..8).map(|_| random_function(&mut rng, 6)));
        for f in &fs {
            let c = radial_equivalence_check(f, &rep);
            ok &= c.passes();
            let excess = (c.trace - c.radial).norm() - c.tail_bound - 1e-10 * c.radial.norm();
            worst_excess = worst_excess.max(excess);
            largest_tail = largest_tail.max(c.tail_bound);
        }
    }
    Ok((
        ok,
        format!(
            "M = {}: max(|trace - radial| - tail - 1e-10|radial|) = {worst_excess:.3e} (<= 0), largest tail {largest_tail:.3e}",
            b.trace_bound
        ),
    ))
}

fn relations(b: &Battery) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut worst_name = String::new();
    for cx in &b.rep_contexts {
        let report = check_relations(&build_rep(b.relation_bound, cx)?);
        for (name, &r) in &report.residuals {
            if r >= worst {
                worst = r;
                worst_name = name.clone();
            }
        }
    }
    let (ok, detail) = verdict(worst, 1e-13, "relative residual");
    Ok((ok, format!("M = {}: {detail} [{worst_name}]", b.relation_bound)))
}

fn route_equivalence(b: &Battery) -> Result<(bool, String)> {
    let mut rng = b.rng(5);
    let (mut div_worst, mut mat_worst): (f64, f64) = (0.0, 0.0);
    for cx in &b.contexts {
        let kmax = 30;
        let matrix = box_matrix(kmax + 2, cx)?;
        for i in 0..100 {
            let f = random_mixed(&mut rng, i, kmax, cx);
            let pointwise = box_pointwise(&f, cx);
            div_worst = div_worst.max(rel_sup(&pointwise, &box_divergence(&f, cx)));
            let via_matrix = from_e_coords(&matrix.apply(&to_e_coords(&f, kmax + 1, cx)), cx);
            let a = to_e_coords(&pointwise, kmax + 1, cx);
            let m = to_e_coords(&via_matrix, kmax + 1, cx);
            let scale = a.iter().chain(&m).fold(0.0f64, |s, v| s.max(v.norm()));
            let dev = a.iter().zip(&m).fold(0.0f64, |s, (x, y)| s.max((x - y).norm()));
            mat_worst = mat_worst.max(dev / scale.max(f64::MIN_POSITIVE));
        }
    }
    let worst = div_worst.max(mat_worst);
    Ok((
        worst < 1e-12,
        format!("pointwise vs divergence {div_worst:.3e}, vs matrix {mat_worst:.3e} (< 1e-12)"),
    ))
}

fn dirichlet(b: &Battery) -> Result<(bool, String)> {
    let mut rng = b.rng(6);
    let mut worst: f64 = 0.0;
    for cx in &b.contexts {
        for i in 0..50 {
            let f = random_mixed(&mut rng, i, 15, cx);
            let g = random_mixed(&mut rng, i + 1, 15, cx);
            let lhs = inner_product(&box_pointwise(&f, cx), &g, cx);
            let rhs = dirichlet_form(&f, &g, cx);
            worst = worst.max((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE));
        }
    }
    Ok(verdict(worst, 1e-11, "relative deviation"))
}

/// Real, critical-line and generic complex spectral parameters.
pub fn sampled_parameters(ctx: &QContext) -> Vec<SpectralParameterL> {
    let mut ls: Vec<SpectralParameterL> =
        [0.2, 0.6, 1.0, 1.5, 2.0].iter().map(|&l| SpectralParameterL::real(l, ctx)).collect();
    ls.extend([0.3, 0.9, 1.6, 2.3, 3.0].iter().map(|&t| SpectralParameterL::critical(t, ctx)));
    ls.extend(
        [(0.5, 0.7), (-0.3, 1.9), (1.2, -0.4)].iter().map(|&(re, im)| SpectralParameterL::new(Complex64::new(re, im), ctx)),
    );
    ls
}

fn eigen_equation(b: &Battery) -> Result<(bool, String)> {
    let worst = b
        .contexts
        .iter()
        .flat_map(|cx| sampled_parameters(cx).into_iter().map(move |lp| eigen_equation_residual(&lp, 40, cx)))
        .fold(0.0, f64::max);
    Ok(verdict(worst, 1e-10, "relative residual for k <= 40"))
}

fn orthonormality(b: &Battery) -> Result<(bool, String)> {
    let jmax = 12;
    let mut worst: f64 = 0.0;
    let (mut with_masses, mut without) = (0, 0);
    for cx in &b.contexts {
        let measure = build_spectral_measure(cx, MEASURE_TOL)?;
        if measure.mass_points().is_empty() {
            without += 1;
        } else {
            with_masses += 1;
        }
        let mut gram = vec![[0.0f64; 13]; 13];
        for (pt, w) in measure.points() {
            let p = orthonormal_at(jmax, pt, &measure.params);
            for i in 0..=jmax {
                for j in 0..=jmax {
                    gram[i][j] += w * p[i] * p[j];
                }
            }
        }
        for (i, row) in gram.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                worst = worst.max((g - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    let (ok, detail) = verdict(worst, 1e-7, "|Gram - I|");
    Ok((ok, format!("{detail}; {with_masses} configurations with masses, {without} without")))
}

fn plancherel(b: &Battery) -> Result<(bool, String)> {
    let mut rng = b.rng(9);
    let (mut norm_worst, mut mult_worst): (f64, f64) = (0.0, 0.0);
    for cx in &b.contexts {
        let measure = build_spectral_measure(cx, MEASURE_TOL)?;
        for i in 0..100 {
            let f = random_mixed(&mut rng, i, 20, cx);
            let nf = norm_sq(&f, cx);
            let u = transform_forward(&f, &measure, cx);
            norm_worst = norm_worst.max((u.norm_sq() - nf).abs() / nf);
            let lhs = transform_forward(&box_pointwise(&f, cx), &measure, cx);
            let rhs = u.multiply_by(|z| lambda_of_z(z, cx));
            mult_worst = mult_worst.max(lhs.sub(&rhs)?.norm_sq().sqrt() / nf.sqrt());
        }
    }
    Ok((
        norm_worst < 1e-8 && mult_worst < 1e-8,
        format!("norm deviation {norm_worst:.3e}, intertwining distance / ‖f‖ {mult_worst:.3e} (< 1e-8)"),
    ))
}

fn round_trip(b: &Battery) -> Result<(bool, String)> {
    let mut rng = b.rng(10);
    let mut worst: f64 = 0.0;
    for cx in &b.contexts {
        let measure = build_spectral_measure(cx, MEASURE_TOL)?;
        for i in 0..20 {
            let f = random_mixed(&mut rng, i, 15, cx);
            let back = transform_inverse(&transform_forward(&f, &measure, cx), cx, 15);
            worst = worst.max((norm_sq(&f.sub(&back), cx) / norm_sq(&f, cx)).sqrt());
        }
    }
    Ok(verdict(worst, 1e-8, "relative L2 error"))
}

fn spectral_band_check(b: &Battery) -> Result<(bool, String)> {
    let tol = 1e-6;
    let (mut norm_worst, mut stray_worst, mut missing) = (0.0f64, 0.0f64, 0);
    for cx in &b.contexts {
        let n200 = box_matrix(200, cx)?.norm()?;
        let n400 = box_matrix(400, cx)?.norm()?;
        norm_worst = norm_worst.max((n400 - n200).abs() / n400);
        let (lo, hi) = spectral_band(cx);
        let masses: Vec<f64> = build_spectral_measure(cx, MEASURE_TOL)?
            .mass_points()
            .iter()
            .map(|m| lambda_of_z(m.z, cx))
            .collect();
        let ev = truncated_spectrum(200, cx)?;
        for &v in &ev {
            let band_gap = (lo - v).max(v - hi).max(0.0);
            let mass_gap = masses.iter().map(|&m| (v - m).abs()).fold(f64::INFINITY, f64::min);
            stray_worst = stray_worst.max(band_gap.min(mass_gap));
        }
        missing += masses.iter().filter(|&&m| !ev.iter().any(|&v| (v - m).abs() <= tol)).count();
    }
    Ok((
        norm_worst <= 5e-4 && stray_worst <= tol && missing == 0,
        format!(
            "norm change 200 -> 400 {norm_worst:.3e} (<= 5e-4), distance outside band and masses {stray_worst:.3e} (<= 1e-6), {missing} masses missing"
        ),
    ))
}

fn asymptotics(b: &Battery) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for cx in b.contexts.iter().filter(|c| c.q() <= 0.7) {
        for l in [0.5, 1.0, 2.0] {
            let reflected = -l - (cx.dim() - 1) as f64;
            for s in [l, reflected] {
                let (ratio, target) = asymptotics_check(Complex64::new(s, 0.0), 40, cx)?;
                worst = worst.max((ratio - target).norm());
            }
        }
    }
    Ok(verdict(worst, 1e-8, "|Φ_l(q^-80) x^-l - c| at k = 40"))
}

fn weight_identity(b: &Battery) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for cx in &b.contexts {
        let measure = build_spectral_measure(cx, MEASURE_TOL)?;
        for i in 0..20 {
            let z = -0.95 + 1.9 * i as f64 / 19.0;
            let (lhs, rhs) = wc_identity_check(z, &measure, cx)?;
            worst = worst.max((lhs - rhs).abs() / lhs.abs());
        }
    }
    Ok(verdict(worst, 1e-10, "relative deviation"))
}
