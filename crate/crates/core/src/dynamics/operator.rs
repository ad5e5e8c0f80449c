//! Atomic generator in momentum-shifted variables,
//! `L = −(ħ/2m)∂ₓₓ − i(ħk/m)∂ₓ + Λ`.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;
use crate::model::HBAR;
use crate::num::{count, lit, mul_neg_i, Real};

/// Discretization of the kinetic and drift terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeScheme {
    /// Fourier differentiation on the periodic grid.
    #[default]
    Spectral,
    /// Fourth-order centred finite differences, periodic wrap.
    FiniteDifference4,
}

pub struct AtomicOperator<T: Real = f64> {
    scheme: DerivativeScheme,
    n: usize,
    dx: T,
    dispersion: T,
    drift: T,
    constant: T,
    multiplier: Vec<T>,
    fft: Arc<dyn Fft<T>>,
    ifft: Arc<dyn Fft<T>>,
    buffer: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: Real> AtomicOperator<T> {
    /// `k` is the momentum transfer, `constant` the scalar Λ.
    pub fn new(grid: &Grid<T>, mass: T, k: T, constant: T, scheme: DerivativeScheme) -> Self {
        let n = grid.len();
        let dispersion = lit::<T>(HBAR) / (lit::<T>(2.0) * mass);
        let drift = lit::<T>(HBAR) * k / mass;
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let scratch_len = fft
            .get_inplace_scratch_len()
            .max(ifft.get_inplace_scratch_len());
        let norm = count::<T>(n);
        let multiplier = grid
            .wavenumbers()
            .into_iter()
            .enumerate()
            .map(|(j, q)| {
                // odd derivatives drop the unpaired Nyquist mode
                let drift_q = if n.is_multiple_of(2) && j == n / 2 { T::zero() } else { drift * q };
                (dispersion * q * q + drift_q + constant) / norm
            })
            .collect();
        Self {
            scheme,
            n,
            dx: grid.dx(),
            dispersion,
            drift,
            constant,
            multiplier,
            fft,
            ifft,
            buffer: vec![Complex::default(); n],
            scratch: vec![Complex::default(); scratch_len],
        }
    }

    pub fn scheme(&self) -> DerivativeScheme {
        self.scheme
    }

    pub fn constant(&self) -> T {
        self.constant
    }

    /// Largest |eigenvalue| of the generator, for time step checks.
    pub fn spectral_radius(&self) -> T {
        let norm = count::<T>(self.n);
        match self.scheme {
            DerivativeScheme::Spectral => self
                .multiplier
                .iter()
                .map(|m| (*m * norm).abs())
                .fold(T::zero(), T::max),
            DerivativeScheme::FiniteDifference4 => {
                let dx = self.dx;
                self.dispersion * lit::<T>(16.0 / 3.0) / (dx * dx)
                    + self.drift.abs() * lit::<T>(1.372) / dx
                    + self.constant.abs()
            }
        }
    }

    /// `out = L·input`.
    pub fn apply(&mut self, input: &[Complex<T>], out: &mut [Complex<T>]) {
        debug_assert_eq!(input.len(), self.n);
        match self.scheme {
            DerivativeScheme::Spectral => {
                self.buffer.copy_from_slice(input);
                self.fft.process_with_scratch(&mut self.buffer, &mut self.scratch);
                for (z, m) in self.buffer.iter_mut().zip(&self.multiplier) {
                    *z *= *m;
                }
                self.ifft.process_with_scratch(&mut self.buffer, &mut self.scratch);
                out.copy_from_slice(&self.buffer);
            }
            DerivativeScheme::FiniteDifference4 => {
                let n = self.n;
                let dx = self.dx;
                let c2 = -self.dispersion / (lit::<T>(12.0) * dx * dx);
                let c1 = self.drift / (lit::<T>(12.0) * dx);
                let (eight, sixteen, thirty) = (lit::<T>(8.0), lit::<T>(16.0), lit::<T>(30.0));
                for j in 0..n {
                    let m2 = input[(j + n - 2) % n];
                    let m1 = input[(j + n - 1) % n];
                    let f0 = input[j];
                    let p1 = input[(j + 1) % n];
                    let p2 = input[(j + 2) % n];
                    let d2 = -p2 + p1 * sixteen - f0 * thirty + m1 * sixteen - m2;
                    let d1 = -p2 + p1 * eight - m1 * eight + m2;
                    out[j] = d2 * c2 + mul_neg_i(d1 * c1) + f0 * self.constant;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane_wave(grid: &Grid<f64>, mode: i32) -> (Vec<Complex<f64>>, f64) {
        let q = 2.0 * std::f64::consts::PI * mode as f64 / grid.length();
        let v = grid
            .positions()
            .map(|x| Complex::from_polar(1.0, q * x))
            .collect();
        (v, q)
    }

    #[test]
    fn plane_waves_are_eigenmodes() {
        let grid = Grid::new(-50e-6, 100e-6, 256).unwrap();
        let (m, k, lam) = (1.4e-25, 1.6e7, 123.0);
        for scheme in [DerivativeScheme::Spectral, DerivativeScheme::FiniteDifference4] {
            let mut op = AtomicOperator::new(&grid, m, k, lam, scheme);
            let (f, q) = plane_wave(&grid, 7);
            let mut out = vec![Complex::default(); 256];
            op.apply(&f, &mut out);
            let expect = match scheme {
                DerivativeScheme::Spectral => HBAR * q * q / (2.0 * m) + HBAR * k * q / m + lam,
                DerivativeScheme::FiniteDifference4 => {
                    let dx = grid.dx();
                    let d2 = (-2.0 * (2.0 * q * dx).cos() + 32.0 * (q * dx).cos() - 30.0)
                        / (12.0 * dx * dx);
                    let d1 = (-(2.0 * q * dx).sin() + 8.0 * (q * dx).sin()) / (6.0 * dx);
                    -HBAR / (2.0 * m) * d2 + HBAR * k / m * d1 + lam
                }
            };
            for (o, fi) in out.iter().zip(&f) {
                assert!((o - fi * expect).norm() < 1e-9 * expect.abs());
            }
        }
    }

    #[test]
    fn fd4_converges_to_spectral() {
        let grid = Grid::<f64>::new(-30.0, 30.0, 512).unwrap();
        let gauss: Vec<_> = grid
            .positions()
            .map(|x| Complex::new((-x * x / 8.0).exp(), 0.0))
            .collect();
        let mut s = AtomicOperator::new(&grid, HBAR, 1.0, 0.0, DerivativeScheme::Spectral);
        let mut f = AtomicOperator::new(&grid, HBAR, 1.0, 0.0, DerivativeScheme::FiniteDifference4);
        let mut a = vec![Complex::default(); 512];
        let mut b = vec![Complex::default(); 512];
        s.apply(&gauss, &mut a);
        f.apply(&gauss, &mut b);
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
    }
}
