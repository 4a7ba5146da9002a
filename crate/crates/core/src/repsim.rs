//! A truncated matrix model of the Fock-type representation `T` of the
//! hyperbolic-space algebra, the weight operator `Q`, and the trace integral
//! `ν_q(f) = Tr(T(f) Q)` on radial functions.
//!
//! Basis vectors `e(i_1, …, i_{N-1})` have `i_1..i_n ∈ [-M, 0]` and
//! `i_{n+1}..i_{N-1} ∈ [1, M]`. Every generator moves a single index by one
//! step, so each operator has at most one entry per column and is stored that
//! way.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::qcore::QContext;
use crate::radial::radial_integral;

/// Largest index set [`build_rep`] accepts.
pub const DEFAULT_CAPACITY: usize = 4_000_000;

const NONE: u32 = u32::MAX;

/// A sparse matrix with at most one nonzero per column, in compressed-column form.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialOperator {
    row: Vec<u32>,
    value: Vec<f64>,
}

impl MonomialOperator {
    fn with_size(size: usize) -> Self {
        Self { row: vec![NONE; size], value: vec![0.0; size] }
    }

    fn diagonal(value: Vec<f64>) -> Self {
        Self { row: (0..value.len() as u32).collect(), value }
    }

    pub fn size(&self) -> usize {
        self.row.len()
    }

    /// The image `A e_col` as `(row, value)`, or `None` for a zero column.
    pub fn column(&self, col: usize) -> Option<(usize, f64)> {
        match self.row[col] {
            NONE => None,
            r => Some((r as usize, self.value[col])),
        }
    }

    pub fn nnz(&self) -> usize {
        self.row.iter().filter(|&&r| r != NONE).count()
    }

    /// Entry `(r, c)`.
    pub fn entry(&self, r: usize, c: usize) -> f64 {
        match self.column(c) {
            Some((row, v)) if row == r => v,
            _ => 0.0,
        }
    }

    /// The transpose; defined when no two columns share a row, which holds for
    /// every generator.
    pub fn transpose(&self) -> Self {
        let mut t = Self::with_size(self.size());
        for c in 0..self.size() {
            if let Some((r, v)) = self.column(c) {
                t.row[r] = c as u32;
                t.value[r] = v;
            }
        }
        t
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.size()).filter_map(|c| self.column(c).map(|(r, v)| (r, c, v)))
    }
}

/// The representation restricted to the window `|i_j| ≤ M`.
#[derive(Debug, Clone)]
pub struct TruncatedRep {
    ctx: QContext,
    bound: usize,
    /// Inclusive range of each coordinate.
    ranges: Vec<(i64, i64)>,
    t: Vec<MonomialOperator>,
    tstar: Vec<MonomialOperator>,
    qdiag: Vec<f64>,
}

impl TruncatedRep {
    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.qdiag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qdiag.is_empty()
    }

    /// `T(t_j)` for `j = 1..=N`.
    pub fn t(&self, j: usize) -> &MonomialOperator {
        &self.t[j - 1]
    }

    /// `T(t_j*)` for `j = 1..=N`.
    pub fn tstar(&self, j: usize) -> &MonomialOperator {
        &self.tstar[j - 1]
    }

    /// Diagonal of `Q`: `const1 · q^{2Σ_j (N-j) i_j}`.
    pub fn qdiag(&self) -> &[f64] {
        &self.qdiag
    }

    /// The multi-index of basis position `pos`.
    pub fn multi_index(&self, mut pos: usize) -> Vec<i64> {
        let mut out = vec![0; self.ranges.len()];
        for (slot, &(lo, hi)) in out.iter_mut().zip(&self.ranges).rev() {
            let width = (hi - lo + 1) as usize;
            *slot = lo + (pos % width) as i64;
            pos /= width;
        }
        out
    }

    /// The basis position of a multi-index, if it lies in the window.
    pub fn position(&self, index: &[i64]) -> Option<usize> {
        let mut pos = 0;
        for (&i, &(lo, hi)) in index.iter().zip(&self.ranges) {
            if i < lo || i > hi {
                return None;
            }
            pos = pos * (hi - lo + 1) as usize + (i - lo) as usize;
        }
        Some(pos)
    }

    /// Whether `index` is at least two steps from every truncated side, so that
    /// products of up to two raising or lowering steps never leave the window.
    pub fn is_interior(&self, index: &[i64]) -> bool {
        let n = self.ctx.n();
        index.iter().enumerate().all(|(j, &i)| {
            let (lo, hi) = self.ranges[j];
            if j < n {
                i >= lo + 2
            } else {
                i <= hi - 2
            }
        })
    }

    /// `Σ_{k≤n} i_k`, so that `x_{n+1}` acts by `q^{2·radial_sum}`.
    fn radial_sum(&self, index: &[i64]) -> i64 {
        index[..self.ctx.n()].iter().sum()
    }
}

/// Builds the truncated representation with `|i_j| ≤ m_bound`.
pub fn build_rep(m_bound: usize, ctx: &QContext) -> Result<TruncatedRep> {
    build_rep_with_capacity(m_bound, ctx, DEFAULT_CAPACITY)
}

pub fn build_rep_with_capacity(m_bound: usize, ctx: &QContext, capacity: usize) -> Result<TruncatedRep> {
    if m_bound < 2 {
        return Err(Error::InvalidParameter(format!("truncation bound must be at least 2, got {m_bound}")));
    }
    let n = ctx.n();
    let dims = ctx.dim() - 1;
    let mb = m_bound as i64;
    let ranges: Vec<(i64, i64)> = (0..dims).map(|j| if j < n { (-mb, 0) } else { (1, mb) }).collect();
    let size = ranges
        .iter()
        .try_fold(1usize, |acc, &(lo, hi)| acc.checked_mul((hi - lo + 1) as usize))
        .filter(|&s| s <= capacity.min(NONE as usize))
        .ok_or(Error::Capacity { requested: m_bound.saturating_pow(dims as u32), cap: capacity })?;

    let q = ctx.q();
    let big_n = ctx.dim();
    let mut rep = TruncatedRep {
        ctx: *ctx,
        bound: m_bound,
        ranges,
        t: Vec::with_capacity(big_n),
        tstar: Vec::with_capacity(big_n),
        qdiag: Vec::with_capacity(size),
    };
    let indices: Vec<Vec<i64>> = (0..size).map(|p| rep.multi_index(p)).collect();

    for j in 0..dims {
        let mut op = MonomialOperator::with_size(size);
        for (col, idx) in indices.iter().enumerate() {
            let mut target = idx.clone();
            target[j] -= 1;
            let Some(row) = rep.position(&target) else { continue };
            let prefix: i64 = idx[..j].iter().sum();
            let s = q.powi(2 * (idx[j] - 1) as i32);
            let radicand = if j < n { s - 1.0 } else { 1.0 - s };
            let v = q.powi(prefix as i32) * radicand.sqrt();
            if v != 0.0 {
                op.row[col] = row as u32;
                op.value[col] = v;
            }
        }
        rep.tstar.push(op.transpose());
        rep.t.push(op);
    }
    let last = MonomialOperator::diagonal(indices.iter().map(|idx| q.powi(idx.iter().sum::<i64>() as i32)).collect());
    rep.tstar.push(last.clone());
    rep.t.push(last);

    let c1 = ctx.const1();
    rep.qdiag = indices
        .iter()
        .map(|idx| {
            let e: i64 = idx.iter().enumerate().map(|(j, &i)| (big_n - 1 - j) as i64 * i).sum();
            c1 * q.powi(2 * e as i32)
        })
        .collect();
    Ok(rep)
}

/// A word in the generators, applied right to left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Gen {
    T(usize),
    S(usize),
}

type Term = (f64, Vec<Gen>);

fn apply_word(rep: &TruncatedRep, word: &[Gen], col: usize) -> Option<(usize, f64)> {
    let mut pos = col;
    let mut acc = 1.0;
    for g in word.iter().rev() {
        let op = match *g {
            Gen::T(j) => rep.t(j),
            Gen::S(j) => rep.tstar(j),
        };
        let (r, v) = op.column(pos)?;
        pos = r;
        acc *= v;
    }
    Some((pos, acc))
}

/// `max_cols ‖(Σ terms) e_col‖_∞ / Σ_terms ‖term · e_col‖_∞` over interior columns.
fn relative_residual(rep: &TruncatedRep, interior: &[usize], terms: &[Term]) -> f64 {
    let mut worst: f64 = 0.0;
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for &col in interior {
        acc.clear();
        let mut scale = 0.0;
        for (c, word) in terms {
            if let Some((r, v)) = apply_word(rep, word, col) {
                *acc.entry(r).or_default() += c * v;
                scale += (c * v).abs();
            }
        }
        if scale > 0.0 {
            let top = acc.values().fold(0.0f64, |m, v| m.max(v.abs()));
            worst = worst.max(top / scale);
        }
    }
    worst
}

/// `t_j t_j*` summed over `range` with sign `sign`.
fn tt_star(range: std::ops::RangeInclusive<usize>, sign: f64) -> Vec<Term> {
    range.map(|k| (sign, vec![Gen::T(k), Gen::S(k)])).collect()
}

/// Terms of `x_j`.
fn x_terms(j: usize, n: usize, big_n: usize) -> Vec<Term> {
    if j > n {
        tt_star(j..=big_n, 1.0)
    } else {
        let mut v = tt_star(j..=n, -1.0);
        v.extend(tt_star(n + 1..=big_n, 1.0));
        v
    }
}

fn compose(left: &[Term], right: &[Term], scale: f64) -> Vec<Term> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for (a, wa) in left {
        for (b, wb) in right {
            out.push((scale * a * b, wa.iter().chain(wb).copied().collect()));
        }
    }
    out
}

fn negate(terms: Vec<Term>) -> Vec<Term> {
    terms.into_iter().map(|(c, w)| (-c, w)).collect()
}

/// Maximum relative residual of each defining relation on the interior columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub residuals: BTreeMap<String, f64>,
    pub interior_columns: usize,
}

impl RelationReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().fold(0.0, |m, &v| m.max(v))
    }
}

/// Checks every commutation relation of the generators, `T(c) = Id`, the
/// relations between `t_j` and `x_k`, the diagonal form of `T(x_j)`, and the
/// annihilation relations of `f_0`.
pub fn check_relations(rep: &TruncatedRep) -> RelationReport {
    let ctx = rep.ctx;
    let (n, big_n, q) = (ctx.n(), ctx.dim(), ctx.q());
    let interior: Vec<usize> = (0..rep.len()).filter(|&p| rep.is_interior(&rep.multi_index(p))).collect();
    let mut residuals = BTreeMap::new();
    let mut record = |name: &str, value: f64| {
        let slot = residuals.entry(name.to_string()).or_insert(0.0f64);
        *slot = slot.max(value);
    };
    let one = |g: Gen| vec![(1.0, vec![g])];

    for i in 1..=big_n {
        for j in 1..=big_n {
            if i < j {
                let mut terms = compose(&one(Gen::T(i)), &one(Gen::T(j)), 1.0);
                terms.extend(compose(&one(Gen::T(j)), &one(Gen::T(i)), -q));
                record("t_i t_j = q t_j t_i", relative_residual(rep, &interior, &terms));
            }
            if i != j {
                let mut terms = compose(&one(Gen::T(i)), &one(Gen::S(j)), 1.0);
                terms.extend(compose(&one(Gen::S(j)), &one(Gen::T(i)), -q));
                record("t_i t_j* = q t_j* t_i", relative_residual(rep, &interior, &terms));
            }
        }
        let r2 = q.powi(-2) - 1.0;
        let mut terms = vec![(1.0, vec![Gen::T(i), Gen::S(i)]), (-1.0, vec![Gen::S(i), Gen::T(i)])];
        if i > n {
            terms.extend(tt_star(i + 1..=big_n, -r2));
            record("t_i t_i* (i > n)", relative_residual(rep, &interior, &terms));
        } else {
            terms.extend(tt_star(i + 1..=n, -r2));
            terms.extend(tt_star(n + 1..=big_n, r2));
            record("t_i t_i* (i <= n)", relative_residual(rep, &interior, &terms));
        }
    }

    let mut c = x_terms(1, n, big_n);
    c.push((-1.0, vec![]));
    record("T(c) = Id", relative_residual(rep, &interior, &c));

    for j in 1..=big_n {
        for k in 1..=big_n {
            let factor = if j < k { q * q } else { 1.0 };
            let x = x_terms(k, n, big_n);
            let mut terms = compose(&one(Gen::T(j)), &x, 1.0);
            terms.extend(negate(compose(&x, &one(Gen::T(j)), factor)));
            record("t_j x_k = q^2 x_k t_j (j < k), x_k t_j (j >= k)", relative_residual(rep, &interior, &terms));
            if j < k {
                let xj = x_terms(j, n, big_n);
                let mut terms = compose(&xj, &x, 1.0);
                terms.extend(negate(compose(&x, &xj, 1.0)));
                record("x_i x_j = x_j x_i", relative_residual(rep, &interior, &terms));
            }
        }
    }

    let mut diag_worst: f64 = 0.0;
    for j in 1..=big_n {
        let x = x_terms(j, n, big_n);
        for &col in &interior {
            let idx = rep.multi_index(col);
            let expected = q.powi(2 * idx[..j - 1].iter().sum::<i64>() as i32);
            let mut acc = 0.0;
            let mut scale = 0.0;
            for (cf, w) in &x {
                if let Some((r, v)) = apply_word(rep, w, col) {
                    debug_assert_eq!(r, col);
                    acc += cf * v;
                    scale += (cf * v).abs();
                }
            }
            diag_worst = diag_worst.max((acc - expected).abs() / scale.max(expected));
        }
    }
    record("T(x_j) = q^(2 sum_{k<j} i_k)", diag_worst);

    let mut f0_worst: f64 = 0.0;
    for col in 0..rep.len() {
        let in_f0 = |r: usize| rep.radial_sum(&rep.multi_index(r)) == 0;
        for j in 1..=n {
            if in_f0(col) {
                if let Some((_, v)) = rep.tstar(j).column(col) {
                    f0_worst = f0_worst.max(v.abs());
                }
            }
            if let Some((r, v)) = rep.t(j).column(col) {
                if in_f0(r) {
                    f0_worst = f0_worst.max(v.abs());
                }
            }
        }
    }
    record("t_j* f_0 = f_0 t_j = 0 (j <= n)", f0_worst);

    let adjoint = (1..=big_n).all(|j| rep.tstar(j) == &rep.t(j).transpose());
    record("T(t_j*) = T(t_j)^T", if adjoint { 0.0 } else { f64::INFINITY });

    RelationReport { residuals, interior_columns: interior.len() }
}

/// `Tr(T(f) Q)` over the window, with a certified bound on the omitted part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceIntegral {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// `Σ_window f(q^{2Σ_{k≤n} i_k}) Qdiag(i)`.
///
/// The weight factorizes into a part over `i_1..i_n` (where finite support of
/// `f` makes the sum finite) and geometric series with ratio `q^{2(N-j)}` in
/// each remaining coordinate, so the omitted part is bounded by
/// `const1 · (F_in · (G - G_M) + F_out · G)` with `F` the `|f|`-weighted sums
/// inside and outside the window and `G`, `G_M` the full and truncated
/// geometric products.
pub fn trace_integral(f: &GridFunction, rep: &TruncatedRep) -> TraceIntegral {
    let value = (0..rep.len())
        .filter_map(|p| {
            let idx = rep.multi_index(p);
            let k = -rep.radial_sum(&idx);
            let v = f.get(k as usize);
            (v != Complex64::default()).then(|| v * rep.qdiag[p])
        })
        .sum();
    TraceIntegral { value, tail_bound: tail_bound(f, rep) }
}

fn tail_bound(f: &GridFunction, rep: &TruncatedRep) -> f64 {
    let ctx = rep.ctx;
    let (n, big_n, q) = (ctx.n(), ctx.dim(), ctx.q());
    let kmax = f.max_k().unwrap_or(0) as i64;
    let mb = rep.bound as i64;

    // Enumerate i_1..i_n ≤ 0 with Σ i ≥ -kmax.
    let (mut f_in, mut f_out) = (0.0, 0.0);
    let mut idx = vec![0i64; n];
    loop {
        let sum: i64 = idx.iter().sum();
        let v = f.get((-sum) as usize).norm();
        if v > 0.0 {
            let e: i64 = idx.iter().enumerate().map(|(j, &i)| (big_n - 1 - j) as i64 * i).sum();
            let w = v * q.powi(2 * e as i32);
            if idx.iter().all(|&i| i >= -mb) {
                f_in += w;
            } else {
                f_out += w;
            }
        }
        // Odometer step over the simplex.
        let mut j = 0;
        loop {
            if j == n {
                let (g, dropped) = geometric_products(rep);
                return ctx.const1() * (f_in * dropped + f_out * g);
            }
            idx[j] -= 1;
            if idx.iter().sum::<i64>() >= -kmax {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// `(G, G - G_M)` for the coordinates `i_{n+1}..i_{N-1}`; the difference is
/// formed without cancellation.
fn geometric_products(rep: &TruncatedRep) -> (f64, f64) {
    let ctx = rep.ctx;
    let (n, big_n, q) = (ctx.n(), ctx.dim(), ctx.q());
    let mut g = 1.0;
    let mut log_kept = 0.0;
    for j in n + 1..big_n {
        let r = q.powi(2 * (big_n - j) as i32);
        g *= r / (1.0 - r);
        log_kept += (-r.powi(rep.bound as i32)).ln_1p();
    }
    (g, g * -log_kept.exp_m1())
}

/// `(G, G_M)` exposed for tests.
#[cfg(test)]
fn geometric_full_and_truncated(rep: &TruncatedRep) -> (f64, f64) {
    let (g, d) = geometric_products(rep);
    (g, g - d)
}

/// Trace integral, radial integral and tail bound for the same function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialEquivalence {
    pub trace: Complex64,
    pub radial: Complex64,
    pub tail_bound: f64,
}

impl RadialEquivalence {
    /// `|trace - radial| ≤ tail_bound + 1e-10 |radial|`.
    pub fn passes(&self) -> bool {
        (self.trace - self.radial).norm() <= self.tail_bound + 1e-10 * self.radial.norm()
    }
}

pub fn radial_equivalence_check(f: &GridFunction, rep: &TruncatedRep) -> RadialEquivalence {
    let t = trace_integral(f, rep);
    RadialEquivalence { trace: t.value, radial: radial_integral(f, &rep.ctx), tail_bound: t.tail_bound }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_configs() -> Vec<QContext> {
        let mut v = Vec::new();
        for &q in &[0.3, 0.5, 0.7] {
            for (n, m) in [(1, 2), (1, 3), (2, 2)] {
                v.push(QContext::new(q, n, m).unwrap());
            }
        }
        v
    }

    #[test]
    fn index_layout_round_trips() {
        let cx = QContext::new(0.5, 2, 2).unwrap();
        let rep = build_rep(4, &cx).unwrap();
        assert_eq!(rep.len(), 5 * 5 * 4);
        for p in 0..rep.len() {
            assert_eq!(rep.position(&rep.multi_index(p)), Some(p));
        }
        assert_eq!(rep.position(&[1, 0, 1]), None);
        assert_eq!(rep.position(&[0, 0, 0]), None);
        assert!(rep.qdiag().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn bounds_and_capacity() {
        let cx = QContext::new(0.5, 1, 2).unwrap();
        assert!(matches!(build_rep(1, &cx), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_rep_with_capacity(10, &cx, 50), Err(Error::Capacity { .. })));
    }

    /// Zero coefficients sit at the natural boundaries; the truncated sides
    /// only lose transitions.
    #[test]
    fn coefficient_boundary_audit() {
        let cx = QContext::new(0.5, 1, 3).unwrap();
        let rep = build_rep(5, &cx).unwrap();
        let q = cx.q();
        // T(t_1*) annihilates i_1 = 0; T(t_1) lowers without hitting zero.
        let p = rep.position(&[0, 2, 3]).unwrap();
        assert_eq!(rep.tstar(1).column(p), None);
        let (r, v) = rep.t(1).column(p).unwrap();
        assert_eq!(rep.multi_index(r), vec![-1, 2, 3]);
        assert_relative_eq!(v, (q.powi(-2) - 1.0).sqrt(), max_relative = 1e-15);
        // At the truncated side i_1 = -M the lowering transition is dropped.
        assert_eq!(rep.t(1).column(rep.position(&[-5, 2, 3]).unwrap()), None);
        // For n < j < N, T(t_j) vanishes at i_j = 1.
        assert_eq!(rep.t(2).column(rep.position(&[-1, 1, 3]).unwrap()), None);
        let (r, v) = rep.t(3).column(rep.position(&[-1, 4, 3]).unwrap()).unwrap();
        assert_eq!(rep.multi_index(r), vec![-1, 4, 2]);
        assert_relative_eq!(v, q.powi(3) * (1.0 - q.powi(4)).sqrt(), max_relative = 1e-15);
        // T(t_N) = T(t_N*) is diagonal.
        let p = rep.position(&[-2, 1, 4]).unwrap();
        assert_eq!(rep.t(4).column(p), Some((p, q.powi(3))));
        assert_eq!(rep.t(4), rep.tstar(4));
        for j in 1..=4 {
            assert!(rep.t(j).triplets().all(|(_, _, v)| v > 0.0));
        }
    }

    #[test]
    fn x_n_plus_one_is_diagonal() {
        let cx = QContext::new(0.6, 2, 2).unwrap();
        let rep = build_rep(6, &cx).unwrap();
        let terms = x_terms(cx.n() + 1, cx.n(), cx.dim());
        for p in (0..rep.len()).filter(|&p| rep.is_interior(&rep.multi_index(p))) {
            let idx = rep.multi_index(p);
            let v: f64 = terms.iter().filter_map(|(c, w)| apply_word(&rep, w, p).map(|(r, v)| {
                assert_eq!(r, p);
                c * v
            })).sum();
            assert_relative_eq!(v, cx.q().powi(2 * (idx[0] + idx[1]) as i32), max_relative = 1e-13);
        }
    }

    #[test]
    fn relations_hold_on_the_interior() {
        for cx in small_configs() {
            let rep = build_rep(8, &cx).unwrap();
            let report = check_relations(&rep);
            assert!(report.interior_columns > 0);
            assert_eq!(report.residuals.len(), 10);
            for (name, &r) in &report.residuals {
                assert!(r < 1e-13, "{cx:?} {name}: {r}");
            }
        }
    }

    /// The relations fail near the truncated sides, which is why they are
    /// restricted to the interior.
    #[test]
    fn truncation_breaks_the_identity_on_the_boundary() {
        let cx = QContext::new(0.5, 1, 2).unwrap();
        let rep = build_rep(4, &cx).unwrap();
        let all: Vec<usize> = (0..rep.len()).collect();
        let mut c = x_terms(1, 1, 3);
        c.push((-1.0, vec![]));
        assert!(relative_residual(&rep, &all, &c) > 1e-3);
    }

    #[test]
    fn trace_examples() {
        for cx in small_configs() {
            let rep = build_rep(30, &cx).unwrap();
            let t = trace_integral(&GridFunction::indicator(0), &rep);
            assert!((t.value.re - 1.0).abs() <= t.tail_bound + 1e-12);
            assert!(t.tail_bound < 1e-8);
            let zero = trace_integral(&GridFunction::zero(), &rep);
            assert_eq!((zero.value, zero.tail_bound), (Complex64::default(), 0.0));
        }
        let cx = QContext::new(0.5, 1, 2).unwrap();
        let rep = build_rep(30, &cx).unwrap();
        let check = radial_equivalence_check(&GridFunction::indicator(3), &rep);
        assert_relative_eq!(check.radial.re, cx.q().powi(-12), max_relative = 1e-13);
        assert!(check.passes());
    }

    #[test]
    fn tail_bound_is_exact_for_indicators() {
        let cx = QContext::new(0.7, 1, 3).unwrap();
        let rep = build_rep(10, &cx).unwrap();
        let (g, g_m) = geometric_full_and_truncated(&rep);
        assert!(g > g_m);
        for j in 0..5 {
            let f = GridFunction::indicator(j);
            let c = radial_equivalence_check(&f, &rep);
            let gap = (c.radial - c.trace).re;
            assert!(gap > 0.0);
            assert_relative_eq!(gap, c.tail_bound, max_relative = 1e-9);
        }
    }

    #[test]
    fn functions_reaching_past_the_window_are_bounded() {
        let cx = QContext::new(0.5, 2, 2).unwrap();
        let rep = build_rep(3, &cx).unwrap();
        let f = GridFunction::from_real([(0, 1.0), (5, -2.0), (8, 0.5)]);
        let c = radial_equivalence_check(&f, &rep);
        assert!(c.passes());
        assert!(c.tail_bound > 0.0);
    }

    #[test]
    fn tail_bound_shrinks_with_the_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for cx in small_configs() {
            let f = GridFunction::from_real((0..=6).map(|k| (k, rng.gen_range(-1.0..1.0))));
            let mut last = f64::INFINITY;
            for mb in [15, 20, 25, 30] {
                let rep = build_rep(mb, &cx).unwrap();
                let c = radial_equivalence_check(&f, &rep);
                assert!(c.passes(), "{cx:?} M={mb}");
                assert!(c.tail_bound < last || c.tail_bound == 0.0);
                last = c.tail_bound;
            }
        }
    }
}
