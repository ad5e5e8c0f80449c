//! Truncated Fock-basis reference for the closed-form moments.
//!
//! States are built by applying displacement and squeeze generators to the
//! vacuum as exponentials acting on a vector (scaled Taylor series). The
//! truncated generators stay anti-Hermitian, so the state stays normalized;
//! truncation error shows up as population in the highest levels.

use num_complex::Complex;

use super::optics::{OpticalMoments, OpticalStateSpec};
use crate::error::ObservableError;

/// Largest tolerated probability in the top quarter of the basis.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Truncated Fock-space state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amplitudes: Vec<Complex<f64>>,
}

impl FockState {
    pub fn vacuum(dim: usize) -> Self {
        Self::number(dim, 0)
    }

    pub fn number(dim: usize, n: usize) -> Self {
        assert!(n < dim, "level {n} outside dimension {dim}");
        let mut amplitudes = vec![Complex::default(); dim];
        amplitudes[n] = Complex::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<f64>] {
        &self.amplitudes
    }

    /// Builds the state for any spec except `DirectMoments`.
    pub fn from_spec(spec: &OpticalStateSpec<f64>, dim: usize) -> Result<Self, ObservableError> {
        spec.validate()?;
        let state = match *spec {
            OpticalStateSpec::Fock(n) => {
                if n as usize >= dim {
                    return Err(ObservableError::TruncationInsufficient { dim, tail: 1.0 });
                }
                Self::number(dim, n as usize)
            }
            OpticalStateSpec::Coherent(alpha) => Self::vacuum(dim).displaced(alpha),
            OpticalStateSpec::SqueezedCoherent { alpha, r, theta } => Self::vacuum(dim)
                .squeezed(Complex::from_polar(r, theta))
                .displaced(alpha),
            OpticalStateSpec::DirectMoments { .. } => {
                return Err(ObservableError::InvalidState(
                    "direct moments have no state vector".into(),
                ))
            }
        };
        let tail = state.tail_probability();
        if tail > TAIL_TOLERANCE {
            return Err(ObservableError::TruncationInsufficient { dim, tail });
        }
        Ok(state)
    }

    /// `D(α)|ψ⟩`, generator `α b† − α* b`.
    pub fn displaced(&self, alpha: Complex<f64>) -> Self {
        let dim = self.dim();
        let gen = move |v: &[Complex<f64>], out: &mut [Complex<f64>]| {
            for n in 0..dim {
                let mut acc = Complex::default();
                if n > 0 {
                    acc += alpha * (n as f64).sqrt() * v[n - 1];
                }
                if n + 1 < dim {
                    acc -= alpha.conj() * ((n + 1) as f64).sqrt() * v[n + 1];
                }
                out[n] = acc;
            }
        };
        let bound = 2.0 * alpha.norm() * (dim as f64).sqrt();
        self.exp_apply(gen, bound)
    }

    /// `S(ξ)|ψ⟩`, generator `½(ξ* b² − ξ b†²)`.
    pub fn squeezed(&self, xi: Complex<f64>) -> Self {
        let dim = self.dim();
        let gen = move |v: &[Complex<f64>], out: &mut [Complex<f64>]| {
            for n in 0..dim {
                let mut acc = Complex::default();
                if n + 2 < dim {
                    acc += xi.conj() * (((n + 1) * (n + 2)) as f64).sqrt() * v[n + 2];
                }
                if n >= 2 {
                    acc -= xi * ((n * (n - 1)) as f64).sqrt() * v[n - 2];
                }
                out[n] = acc * 0.5;
            }
        };
        let bound = xi.norm() * dim as f64;
        self.exp_apply(gen, bound)
    }

    /// `exp(G)|ψ⟩` for a generator with operator norm at most `bound`.
    fn exp_apply(&self, gen: impl Fn(&[Complex<f64>], &mut [Complex<f64>]), bound: f64) -> Self {
        let steps = (bound / 0.5).ceil().max(1.0) as usize;
        let scale = 1.0 / steps as f64;
        let dim = self.dim();
        let mut v = self.amplitudes.clone();
        let mut term = vec![Complex::default(); dim];
        let mut next = vec![Complex::default(); dim];
        for _ in 0..steps {
            term.copy_from_slice(&v);
            let mut acc = v.clone();
            for k in 1..60 {
                gen(&term, &mut next);
                let f = scale / k as f64;
                let mut size = 0.0f64;
                for (t, x) in term.iter_mut().zip(&next) {
                    *t = x * f;
                    size = size.max(t.norm());
                }
                for (a, t) in acc.iter_mut().zip(&term) {
                    *a += t;
                }
                if size < 1e-18 {
                    break;
                }
            }
            v = acc;
        }
        Self { amplitudes: v }
    }

    /// Probability in the top quarter of the basis.
    pub fn tail_probability(&self) -> f64 {
        let dim = self.dim();
        self.amplitudes[dim - dim / 4..].iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn moments(&self) -> OpticalMoments<f64> {
        let (mut n_bar, mut b2) = (0.0, 0.0);
        for (n, z) in self.amplitudes.iter().enumerate() {
            let p = z.norm_sqr();
            let n = n as f64;
            n_bar += n * p;
            b2 += n * (n - 1.0) * p;
        }
        OpticalMoments { n_bar, bdag2b2: b2 }
    }

    /// `⟨b²⟩`
    pub fn pair_coherence(&self) -> Complex<f64> {
        let a = &self.amplitudes;
        (2..a.len())
            .map(|n| a[n - 2].conj() * a[n] * ((n * (n - 1)) as f64).sqrt())
            .sum()
    }
}

/// Moments from the truncated Fock basis of dimension `dim`.
pub fn truncated_moments(
    spec: &OpticalStateSpec<f64>,
    dim: usize,
) -> Result<OpticalMoments<f64>, ObservableError> {
    if let OpticalStateSpec::DirectMoments { n_bar, bdag2b2 } = *spec {
        spec.validate()?;
        return Ok(OpticalMoments { n_bar, bdag2b2 });
    }
    Ok(FockState::from_spec(spec, dim)?.moments())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_state_is_poissonian() {
        let alpha = Complex::new(1.2, -0.7);
        let s = FockState::vacuum(50).displaced(alpha);
        let mean = alpha.norm_sqr();
        let mut fact = 1.0;
        for (n, z) in s.amplitudes().iter().enumerate().take(20) {
            if n > 0 {
                fact *= n as f64;
            }
            let p = (-mean).exp() * mean.powi(n as i32) / fact;
            assert!((z.norm_sqr() - p).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn squeezed_vacuum_has_even_support() {
        let s = FockState::vacuum(60).squeezed(Complex::new(0.4, 0.2));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        for (n, z) in s.amplitudes().iter().enumerate() {
            if n % 2 == 1 {
                assert!(z.norm() < 1e-15);
            }
        }
        // P(0) = 1/cosh r
        let r = Complex::new(0.4f64, 0.2).norm();
        assert!((s.amplitudes()[0].norm_sqr() - 1.0 / r.cosh()).abs() < 1e-12);
    }

    #[test]
    fn truncation_detected() {
        let spec = OpticalStateSpec::Coherent(Complex::new(5.0, 0.0));
        assert!(matches!(
            truncated_moments(&spec, 30),
            Err(ObservableError::TruncationInsufficient { .. })
        ));
        assert!(truncated_moments(&OpticalStateSpec::Fock(40), 30).is_err());
    }
}
