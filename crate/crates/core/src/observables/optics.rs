//! Photon-number moments of the single occupied input mode `b̂₀`.

use num_complex::Complex;

use crate::error::ObservableError;
use crate::num::{lit, Real};

/// State of the input optical mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpticalStateSpec<T: Real = f64> {
    Fock(u32),
    Coherent(Complex<T>),
    /// `D(α)S(ξ)|0⟩` with `ξ = r·e^{iθ}` and
    /// `S(ξ) = exp(½(ξ* b² − ξ b†²))`.
    SqueezedCoherent { alpha: Complex<T>, r: T, theta: T },
    DirectMoments { n_bar: T, bdag2b2: T },
}

/// `⟨b†b⟩` and `⟨b†b†bb⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalMoments<T: Real = f64> {
    pub n_bar: T,
    pub bdag2b2: T,
}

impl<T: Real> OpticalStateSpec<T> {
    pub fn validate(&self) -> Result<(), ObservableError> {
        let bad = |msg: String| Err(ObservableError::InvalidState(msg));
        match *self {
            OpticalStateSpec::Fock(_) => Ok(()),
            OpticalStateSpec::Coherent(a) => {
                if a.re.is_finite() && a.im.is_finite() {
                    Ok(())
                } else {
                    bad("coherent amplitude must be finite".into())
                }
            }
            OpticalStateSpec::SqueezedCoherent { alpha, r, theta } => {
                if !(alpha.re.is_finite() && alpha.im.is_finite() && theta.is_finite()) {
                    bad("squeezed state parameters must be finite".into())
                } else if !(r.is_finite() && r >= T::zero()) {
                    bad(format!("squeeze magnitude r must be >= 0, got {r:e}"))
                } else {
                    Ok(())
                }
            }
            OpticalStateSpec::DirectMoments { n_bar, bdag2b2 } => {
                if !(n_bar.is_finite() && n_bar >= T::zero()) {
                    return bad(format!("n_bar must be >= 0, got {n_bar:e}"));
                }
                let floor = (n_bar * n_bar - n_bar).max(T::zero());
                if !(bdag2b2.is_finite() && bdag2b2 >= floor) {
                    return bad(format!(
                        "bdag2b2 = {bdag2b2:e} below the bound max(0, n_bar^2 - n_bar) = {floor:e}"
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Closed-form moments.
pub fn optical_moments<T: Real>(spec: &OpticalStateSpec<T>) -> Result<OpticalMoments<T>, ObservableError> {
    spec.validate()?;
    Ok(match *spec {
        OpticalStateSpec::Fock(n) => {
            let n = T::from_u32(n).expect("u32 fits");
            OpticalMoments {
                n_bar: n,
                bdag2b2: n * (n - T::one()),
            }
        }
        OpticalStateSpec::Coherent(a) => {
            let n = a.norm_sqr();
            OpticalMoments { n_bar: n, bdag2b2: n * n }
        }
        OpticalStateSpec::SqueezedCoherent { alpha, r, theta } => {
            let (sh, ch) = (r.sinh(), r.cosh());
            let s2 = sh * sh;
            let a2 = alpha.norm_sqr();
            // ⟨δb²⟩ of the squeezed vacuum
            let m = Complex::from_polar(sh * ch, theta) * -T::one();
            let cross = lit::<T>(2.0) * (alpha.conj() * alpha.conj() * m).re;
            OpticalMoments {
                n_bar: a2 + s2,
                bdag2b2: a2 * a2 + cross + lit::<T>(4.0) * a2 * s2 + lit::<T>(2.0) * s2 * s2 + s2 * ch * ch,
            }
        }
        OpticalStateSpec::DirectMoments { n_bar, bdag2b2 } => OpticalMoments { n_bar, bdag2b2 },
    })
}

/// Normalized input variance `v(N̂₀) = (⟨b†b†bb⟩ − ⟨b†b⟩²)/⟨b†b⟩ + 1`.
pub fn fano<T: Real>(m: &OpticalMoments<T>) -> Result<T, ObservableError> {
    if m.n_bar <= T::zero() {
        return Err(ObservableError::UndefinedForVacuum);
    }
    Ok((m.bdag2b2 - m.n_bar * m.n_bar) / m.n_bar + T::one())
}
