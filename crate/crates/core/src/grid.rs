//! Uniform 1-D spatial grid and complex fields sampled on it.

use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::ModelError;
use crate::num::{count, lit, Real};

/// Smallest grid the solvers accept.
pub const MIN_POINTS: usize = 16;

/// Uniform grid on `[x_min, x_max)`; the last sample sits one spacing short
/// of `x_max` so the grid is periodic with period `x_max - x_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T: Real = f64> {
    x_min: T,
    x_max: T,
    n: usize,
}

impl<T: Real> Grid<T> {
    pub fn new(x_min: T, x_max: T, n: usize) -> Result<Self, ModelError> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(ModelError::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min:e}, {x_max:e}]"
            )));
        }
        if n < MIN_POINTS {
            return Err(ModelError::InvalidGrid(format!(
                "need at least {MIN_POINTS} points, got {n}"
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    #[inline]
    pub fn x_min(&self) -> T {
        self.x_min
    }

    #[inline]
    pub fn x_max(&self) -> T {
        self.x_max
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn length(&self) -> T {
        self.x_max - self.x_min
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.length() / count(self.n)
    }

    /// Position of sample `j`.
    #[inline]
    pub fn x(&self, j: usize) -> T {
        self.x_min + count::<T>(j) * self.dx()
    }

    pub fn positions(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n).map(move |j| self.x(j))
    }

    /// Angular wavenumbers in FFT order, Nyquist bin included as negative.
    pub fn wavenumbers(&self) -> Vec<T> {
        let dk = lit::<T>(2.0) * T::PI() / self.length();
        (0..self.n)
            .map(|j| {
                if j < self.n.div_ceil(2) {
                    count::<T>(j) * dk
                } else {
                    -(count::<T>(self.n - j)) * dk
                }
            })
            .collect()
    }

    /// Fractional sample coordinate of `x`.
    #[inline]
    pub fn coordinate(&self, x: T) -> T {
        (x - self.x_min) / self.dx()
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.x_min && x <= self.x_max
    }
}

/// Complex amplitude sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField<T: Real = f64> {
    grid: Grid<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> ComplexField<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        Self {
            grid,
            values: vec![Complex::new(T::zero(), T::zero()); grid.len()],
        }
    }

    pub fn constant(grid: Grid<T>, value: Complex<T>) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid<T>, mut f: impl FnMut(T) -> Complex<T>) -> Self {
        let values = grid.positions().map(&mut f).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid<T>, mut f: impl FnMut(T) -> T) -> Self {
        Self::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    pub fn from_values(grid: Grid<T>, values: Vec<Complex<T>>) -> Result<Self, ModelError> {
        if values.len() != grid.len() {
            return Err(ModelError::InvalidGrid(format!(
                "field has {} samples but grid has {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex<T>> {
        self.values.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Pointwise `|f(x)|²`.
    pub fn intensity(&self) -> Vec<T> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `∫|f|² dx` over the whole periodic grid.
    pub fn norm_sqr(&self) -> T {
        self.values.iter().map(|z| z.norm_sqr()).sum::<T>() * self.grid.dx()
    }

    /// `∫f dx` over the whole periodic grid.
    pub fn integral(&self) -> Complex<T> {
        let s: Complex<T> = self
            .values
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z);
        s * self.grid.dx()
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }
}

impl<T: Real> Index<usize> for ComplexField<T> {
    type Output = Complex<T>;

    fn index(&self, j: usize) -> &Complex<T> {
        &self.values[j]
    }
}

impl<T: Real> IndexMut<usize> for ComplexField<T> {
    fn index_mut(&mut self, j: usize) -> &mut Complex<T> {
        &mut self.values[j]
    }
}
