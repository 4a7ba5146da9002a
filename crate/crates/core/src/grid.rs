//! Finitely supported functions on the radial grid `q^{-2Z_+}`.
//!
//! A [`GridFunction`] stores `f(q^{-2k})` keyed by the integer `k`; absent keys
//! are zero. Values are complex so that transforms of real and complex inputs
//! share one code path.

use std::collections::BTreeMap;

use num_complex::Complex64;

/// A point `x = q^{-2k}` of the radial grid, carried by its integer exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RadialGridPoint {
    pub k: usize,
}

impl RadialGridPoint {
    pub fn new(k: usize) -> Self {
        Self { k }
    }

    /// The coordinate `x = q^{-2k}`.
    pub fn x(self, q: f64) -> f64 {
        q.powi(-2 * self.k as i32)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridFunction {
    values: BTreeMap<usize, Complex64>,
}

impl GridFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The indicator `f_k` of the single grid point `q^{-2k}`.
    pub fn indicator(k: usize) -> Self {
        let mut f = Self::zero();
        f.set(k, Complex64::new(1.0, 0.0));
        f
    }

    pub fn from_real<I: IntoIterator<Item = (usize, f64)>>(pairs: I) -> Self {
        pairs
            .into_iter()
            .map(|(k, v)| (k, Complex64::new(v, 0.0)))
            .collect()
    }

    /// Samples `g(k)` on `0..=kmax`.
    pub fn sample<F: FnMut(usize) -> Complex64>(kmax: usize, mut g: F) -> Self {
        (0..=kmax).map(|k| (k, g(k))).collect()
    }

    /// Sets `f(q^{-2k})`; storing an exact zero removes the key.
    pub fn set(&mut self, k: usize, value: Complex64) {
        if value == Complex64::new(0.0, 0.0) {
            self.values.remove(&k);
        } else {
            self.values.insert(k, value);
        }
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.values.get(&k).copied().unwrap_or_default()
    }

    /// Value at a signed index; everything off the grid `k >= 0` is zero.
    pub fn get_signed(&self, k: i64) -> Complex64 {
        if k < 0 {
            Complex64::default()
        } else {
            self.get(k as usize)
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_k(&self) -> Option<usize> {
        self.values.keys().next_back().copied()
    }

    pub fn min_k(&self) -> Option<usize> {
        self.values.keys().next().copied()
    }

    pub fn is_real(&self) -> bool {
        self.values.values().all(|v| v.im == 0.0)
    }

    pub fn map<F: FnMut(usize, Complex64) -> Complex64>(&self, mut g: F) -> Self {
        self.iter().map(|(k, v)| (k, g(k, v))).collect()
    }

    pub fn conj(&self) -> Self {
        self.map(|_, v| v.conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|_, v| v * s)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        self.iter().map(|(k, v)| (k, v * other.get(k))).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.set(k, out.get(k) + v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest absolute value, zero for the zero function.
    pub fn sup_norm(&self) -> f64 {
        self.values.values().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

impl FromIterator<(usize, Complex64)> for GridFunction {
    fn from_iter<I: IntoIterator<Item = (usize, Complex64)>>(iter: I) -> Self {
        let mut f = Self::zero();
        for (k, v) in iter {
            f.set(k, v);
        }
        f
    }
}
