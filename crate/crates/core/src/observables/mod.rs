//! Physical observables from the mode functions and the input photon
//! statistics.

mod fock;
mod optics;

pub use fock::{truncated_moments, FockState, TAIL_TOLERANCE};
pub use optics::{fano, optical_moments, OpticalMoments, OpticalStateSpec};

use crate::dynamics::ModePairState;
use crate::error::ObservableError;
use crate::grid::{ComplexField, Grid};
use crate::model::{DetectorSpec, Model, HBAR};
use crate::num::{lit, Real};

/// Upper bound reported by [`attenuation_factor`].
pub const MAX_ATTENUATION: f64 = 1e12;

/// N_g above `1 + N_G_EXCESS` is flagged.
pub const N_G_EXCESS: f64 = 1e-3;

/// `⟨ψ†ψ⟩ = |g₀|²⟨b†b⟩` and `⟨E†E⟩ = |p₀|²⟨b†b⟩` (m^-1).
#[derive(Debug, Clone, PartialEq)]
pub struct Densities<T: Real = f64> {
    pub atoms: Vec<T>,
    pub photons: Vec<T>,
}

pub fn densities<T: Real>(state: &ModePairState<T>, moments: &OpticalMoments<T>) -> Densities<T> {
    let scale = |f: &ComplexField<T>| f.iter().map(|z| z.norm_sqr() * moments.n_bar).collect();
    Densities {
        atoms: scale(&state.g),
        photons: scale(&state.p),
    }
}

/// Integral over `[a, b]` of the piecewise-linear interpolant of `values`
/// (trapezoid rule with fractional end cells).
pub fn window_integral<T: Real>(grid: &Grid<T>, values: &[T], a: T, b: T) -> T {
    let n = values.len();
    let dx = grid.dx();
    let last = lit::<T>((n - 1) as f64);
    let (sa, sb) = (
        grid.coordinate(a).max(T::zero()).min(last),
        grid.coordinate(b).max(T::zero()).min(last),
    );
    if sb <= sa {
        return T::zero();
    }
    let at = |s: T| {
        let j = s.floor().to_usize().unwrap_or(0).min(n - 2);
        let f = s - lit::<T>(j as f64);
        values[j] * (T::one() - f) + values[j + 1] * f
    };
    let ja = sa.ceil().to_usize().unwrap_or(0);
    let jb = sb.floor().to_usize().unwrap_or(0);
    if ja > jb {
        // both ends inside one cell
        return (at(sa) + at(sb)) / lit(2.0) * (sb - sa) * dx;
    }
    let mut sum = (at(sa) + values[ja]) / lit(2.0) * (lit::<T>(ja as f64) - sa);
    for j in ja..jb {
        sum += (values[j] + values[j + 1]) / lit(2.0);
    }
    sum += (values[jb] + at(sb)) / lit(2.0) * (sb - lit::<T>(jb as f64));
    sum * dx
}

/// `N_g = ∫_{x₁}^{x₂}|g̃₀|²dx`.
pub fn detector_fraction<T: Real>(g: &ComplexField<T>, detector: &DetectorSpec<T>) -> T {
    window_integral(g.grid(), &g.intensity(), detector.x1, detector.x2)
}

/// Detector-number statistics for the input moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamStatistics<T: Real = f64> {
    pub n_g: T,
    /// `⟨N̂⟩ = N_g⟨b†b⟩`
    pub mean_n: T,
    /// `V(N̂) = N_g²(⟨b†b†bb⟩ − ⟨b†b⟩²) + N_g⟨b†b⟩`
    pub var_n: T,
    /// `v(N̂) = N_g·v(N̂₀) + (1 − N_g)`
    pub v: T,
    /// `1 − N_g`
    pub v_fock: T,
}

pub fn beam_statistics<T: Real>(
    n_g: T,
    moments: &OpticalMoments<T>,
) -> Result<BeamStatistics<T>, ObservableError> {
    let v0 = fano(moments)?;
    let n = moments.n_bar;
    Ok(BeamStatistics {
        n_g,
        mean_n: n_g * n,
        var_n: n_g * n_g * (moments.bdag2b2 - n * n) + n_g * n,
        v: n_g * v0 + (T::one() - n_g),
        v_fock: T::one() - n_g,
    })
}

/// `|p̃(x_min)|²/|p̃(x_max)|²`, capped at [`MAX_ATTENUATION`].
pub fn attenuation_factor<T: Real>(p: &ComplexField<T>) -> T {
    let cap = lit::<T>(MAX_ATTENUATION);
    let (inflow, outflow) = (p[0].norm_sqr(), p[p.len() - 1].norm_sqr());
    if inflow == T::zero() {
        return T::one();
    }
    if outflow * cap <= inflow {
        return cap;
    }
    inflow / outflow
}

/// Diagonal weight left for the vacuum parts of the commutators.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorResidual<T: Real = f64> {
    /// `1 − |g̃₀(x)|²·(x₂ − x₁)`
    pub atomic: Vec<T>,
    /// `1 − |p̃₀(x)|²·(mc/ħk)·w`, `w` the probe window
    pub probe: Vec<T>,
}

impl<T: Real> CommutatorResidual<T> {
    pub fn min(&self) -> T {
        self.atomic
            .iter()
            .chain(&self.probe)
            .copied()
            .fold(T::infinity(), T::min)
    }
}

pub fn commutator_residual<T: Real>(state: &ModePairState<T>, model: &Model<T>) -> CommutatorResidual<T> {
    let det = model.detector();
    let atom_w = det.width();
    let photon_w = model.params().speed_of_light / model.recoil_velocity() * det.probe_window;
    CommutatorResidual {
        atomic: state.g.iter().map(|z| T::one() - z.norm_sqr() * atom_w).collect(),
        probe: state.p.iter().map(|z| T::one() - z.norm_sqr() * photon_w).collect(),
    }
}

/// Atomic probability current of the lab-frame field `g̃₀e^{ikx}` at `x`,
/// `(ħ/m)Im(g̃*∂ₓg̃) + (ħk/m)|g̃|²` (s^-1), linearly interpolated between
/// grid points. Derivatives are fourth-order centred differences.
pub fn atom_current<T: Real>(g: &ComplexField<T>, model: &Model<T>, x: T) -> T {
    let grid = g.grid();
    let n = g.len();
    let hm = lit::<T>(HBAR) / model.params().mass;
    let v = model.recoil_velocity();
    let dx = grid.dx();
    let at = |j: usize| {
        let d = (g[j - 2] - g[j - 1] * lit::<T>(8.0) + g[j + 1] * lit::<T>(8.0) - g[j + 2])
            / (lit::<T>(12.0) * dx);
        hm * (g[j].conj() * d).im + v * g[j].norm_sqr()
    };
    let s = grid.coordinate(x).max(lit(2.0)).min(lit((n - 4) as f64));
    let j = s.floor().to_usize().unwrap_or(2);
    let f = s - lit::<T>(j as f64);
    at(j) * (T::one() - f) + at(j + 1) * f
}
