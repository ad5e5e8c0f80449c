//! Physical parameters, derived quantities and the spatial profiles that
//! drive the outcoupling: condensate mode, two-photon coupling, probe
//! normalization and the resonance condition.

use num_complex::Complex;

use crate::error::ModelError;
use crate::grid::{ComplexField, Grid};
use crate::num::{lit, to_f64, Real};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Relative directions of probe and pump beams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Geometry {
    #[default]
    CounterPropagating,
    CoPropagating,
}

/// Two-photon detuning, either absolute or relative to the resonance value δ₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoPhotonDetuning<T: Real = f64> {
    Offset(T),
    Absolute(T),
}

/// How `∫Ω_c(x)dx` is turned into a Rabi rate when balancing the quarter
/// Rabi period against the time atoms need to leave the condensate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateInterpretation {
    /// The integral's numerical value in SI units is used as a rate
    /// (units of metres dropped). Reproduces Ω₂₃ ≈ 2.3×10¹² rad/s with the
    /// default parameters at κ ≈ 1.
    #[default]
    Literal,
    /// The peak coupling `Ω_c(0)`.
    Peak,
    /// The integral divided by the condensate width σ.
    WidthAveraged,
}

/// Source of the coupling calibration factor κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Calibration<T: Real = f64> {
    Fixed(T),
    /// Choose κ such that the optimal pump estimate equals `target`.
    MatchRabiEstimate {
        target: T,
        interpretation: RateInterpretation,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T: Real = f64> {
    /// Atomic mass `m` (kg).
    pub mass: T,
    /// Trap angular frequency `ω_t` (rad/s).
    pub trap_frequency: T,
    /// Atom-probe coupling `g₁₃` (rad/s).
    pub g13: T,
    /// Mean condensate atom number `N`.
    pub atom_number: T,
    /// One-photon detuning `Δ` (rad/s).
    pub one_photon_detuning: T,
    /// Pump Rabi frequency `Ω₂₃` (rad/s).
    pub pump_rabi: T,
    pub two_photon: TwoPhotonDetuning<T>,
    /// Probe wavelength (m).
    pub wavelength: T,
    /// Pump wavelength (m); the probe wavelength when absent.
    pub pump_wavelength: Option<T>,
    pub geometry: Geometry,
    pub calibration: Calibration<T>,
    /// Speed of light (m/s).
    pub speed_of_light: T,
}

impl<T: Real> Default for PhysicalParams<T> {
    fn default() -> Self {
        Self::reference()
    }
}

impl<T: Real> PhysicalParams<T> {
    /// ⁸⁷Rb-like parameter set used for the reference experiments.
    pub fn reference() -> Self {
        Self {
            mass: lit(1.4e-25),
            trap_frequency: lit(20.0),
            g13: lit(28.9),
            atom_number: lit(1.0e6),
            one_photon_detuning: lit(1.0e11),
            pump_rabi: lit(2.1e12),
            two_photon: TwoPhotonDetuning::Offset(T::zero()),
            wavelength: lit(780e-9),
            pump_wavelength: None,
            geometry: Geometry::CounterPropagating,
            calibration: Calibration::MatchRabiEstimate {
                target: lit(2.3e12),
                interpretation: RateInterpretation::Literal,
            },
            speed_of_light: lit(SPEED_OF_LIGHT),
        }
    }

    pub fn with_pump_rabi(mut self, omega23: T) -> Self {
        self.pump_rabi = omega23;
        self
    }

    pub fn with_offset(mut self, offset: T) -> Self {
        self.two_photon = TwoPhotonDetuning::Offset(offset);
        self
    }

    /// Hard invariants; returns the list of soft (adiabatic elimination)
    /// warnings on success.
    pub fn validate(&self) -> Result<Vec<String>, ModelError> {
        fn positive<T: Real>(name: &'static str, v: T) -> Result<(), ModelError> {
            if v.is_finite() && v > T::zero() {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter {
                    name,
                    reason: format!("must be finite and > 0, got {v:e}"),
                })
            }
        }
        fn finite<T: Real>(name: &'static str, v: T) -> Result<(), ModelError> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter {
                    name,
                    reason: "must be finite".into(),
                })
            }
        }
        positive("m", self.mass)?;
        positive("omega_t", self.trap_frequency)?;
        positive("Delta", self.one_photon_detuning)?;
        positive("lambda", self.wavelength)?;
        positive("c", self.speed_of_light)?;
        if let Some(l) = self.pump_wavelength {
            positive("lambda_pump", l)?;
        }
        finite("g13", self.g13)?;
        finite("Omega23", self.pump_rabi)?;
        if !(self.atom_number.is_finite() && self.atom_number >= T::one()) {
            return Err(ModelError::InvalidParameter {
                name: "N",
                reason: format!("must be >= 1, got {:e}", self.atom_number),
            });
        }
        match self.two_photon {
            TwoPhotonDetuning::Offset(v) | TwoPhotonDetuning::Absolute(v) => finite("delta", v)?,
        }
        match self.calibration {
            Calibration::Fixed(k) => positive("kappa", k)?,
            Calibration::MatchRabiEstimate { target, .. } => positive("kappa.target", target)?,
        }

        let mut warnings = Vec::new();
        let margin = lit::<T>(10.0);
        let delta = self.one_photon_detuning;
        let collective = self.g13.abs() * self.atom_number.sqrt() * ground_state_peak(self);
        let kinetic = recoil_frequency(self);
        for (what, scale) in [
            ("|Omega23|", self.pump_rabi.abs()),
            ("|g13|*sqrt(N)*phi0(0)", collective),
            ("recoil frequency", kinetic),
        ] {
            if delta < margin * scale {
                warnings.push(format!(
                    "adiabatic elimination: Delta = {:.3e} rad/s is not >= 10x {what} = {:.3e}",
                    to_f64(delta),
                    to_f64(scale)
                ));
            }
        }
        Ok(warnings)
    }
}

/// Condensate width `σ = √(ħ/mω_t)`.
pub fn condensate_width<T: Real>(params: &PhysicalParams<T>) -> T {
    (lit::<T>(HBAR) / (params.mass * params.trap_frequency)).sqrt()
}

/// `φ₀(0) = (mω_t/πħ)^{1/4}`.
pub fn ground_state_peak<T: Real>(params: &PhysicalParams<T>) -> T {
    (params.mass * params.trap_frequency / (T::PI() * lit::<T>(HBAR))).powf(lit(0.25))
}

/// Harmonic-trap ground state sampled on `grid` and normalized so that
/// `Σ|φ₀|²dx = 1` on the grid.
pub fn condensate_ground_state<T: Real>(
    params: &PhysicalParams<T>,
    grid: &Grid<T>,
) -> Result<ComplexField<T>, ModelError> {
    let sigma = condensate_width(params);
    let peak = ground_state_peak(params);
    let profile = |x: T| peak * (-(x * x) / (lit::<T>(2.0) * sigma * sigma)).exp();

    let edge = profile(grid.x_min()).max(profile(grid.x_max())) / peak;
    if edge > lit(1e-6) {
        return Err(ModelError::GridTooNarrow {
            edge_ratio: to_f64(edge),
        });
    }

    let mut phi0 = ComplexField::from_real_fn(*grid, profile);
    let norm = phi0.norm_sqr().sqrt();
    for z in phi0.values_mut() {
        *z /= norm;
    }
    Ok(phi0)
}

/// Two-photon coupling `Ω_C(x) = κ Ω₂₃* g₁₃ √N φ₀(x) / Δ`.
pub fn coupling_profile<T: Real>(
    params: &PhysicalParams<T>,
    phi0: &ComplexField<T>,
    kappa: T,
) -> ComplexField<T> {
    let factor = coupling_per_amplitude(params) * kappa;
    phi0.scaled(Complex::new(factor, T::zero()))
}

/// `Ω₂₃ g₁₃ √N / Δ`, the coupling per unit condensate amplitude (κ = 1).
fn coupling_per_amplitude<T: Real>(params: &PhysicalParams<T>) -> T {
    params.pump_rabi * params.g13 * params.atom_number.sqrt() / params.one_photon_detuning
}

/// Momentum transfer `k = |k₀ − k_p|` of the Raman process (1/m).
pub fn momentum_transfer<T: Real>(params: &PhysicalParams<T>) -> T {
    let two_pi = lit::<T>(2.0) * T::PI();
    let probe = two_pi / params.wavelength;
    let pump = two_pi / params.pump_wavelength.unwrap_or(params.wavelength);
    match params.geometry {
        Geometry::CounterPropagating => probe + pump,
        Geometry::CoPropagating => (probe - pump).abs(),
    }
}

/// Recoil frequency `ħk²/2m` (rad/s).
pub fn recoil_frequency<T: Real>(params: &PhysicalParams<T>) -> T {
    let k = momentum_transfer(params);
    lit::<T>(HBAR) * k * k / (lit::<T>(2.0) * params.mass)
}

/// Recoil velocity `ħk/m` (m/s).
pub fn recoil_velocity<T: Real>(params: &PhysicalParams<T>) -> T {
    lit::<T>(HBAR) * momentum_transfer(params) / params.mass
}

/// The four contributions to the resonance detuning δ₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceTerms<T: Real = f64> {
    /// `ħk²/2m`
    pub kinetic: T,
    /// `(|g₁₃|²N/Δ)|φ₀(0)|²`
    pub condensate: T,
    /// `|Ω₂₃|²/Δ`, entering with a minus sign.
    pub light_shift: T,
    /// `ω_t`, entering with a minus sign.
    pub trap: T,
}

impl<T: Real> ResonanceTerms<T> {
    /// δ₀ = kinetic + condensate − light shift − trap.
    pub fn total(&self) -> T {
        self.kinetic + self.condensate - self.light_shift - self.trap
    }

    /// Energy of the recoiling atomic mode, `ħk²/2m − |Ω₂₃|²/Δ − ω_t`.
    pub fn atomic_energy(&self) -> T {
        self.kinetic - self.light_shift - self.trap
    }
}

/// Resonance detuning δ₀ split into its contributions.
pub fn resonance_detuning<T: Real>(params: &PhysicalParams<T>, phi0_at_origin: T) -> ResonanceTerms<T> {
    let delta = params.one_photon_detuning;
    ResonanceTerms {
        kinetic: recoil_frequency(params),
        condensate: params.g13 * params.g13 * params.atom_number / delta
            * phi0_at_origin
            * phi0_at_origin,
        light_shift: params.pump_rabi * params.pump_rabi / delta,
        trap: params.trap_frequency,
    }
}

/// Probe amplitude such that `(mc/ħk)·|p_in|²·window = 1` (m^-1/2).
pub fn probe_input_amplitude<T: Real>(params: &PhysicalParams<T>, window: T) -> T {
    (recoil_velocity(params) / (params.speed_of_light * window)).sqrt()
}

/// Balance of the condensate exit time against a quarter Rabi period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiEstimate<T: Real = f64> {
    /// `T_leave = σm/(ħk)` (s).
    pub t_leave: T,
    /// Rate required for `T_Rabi/4 = T_leave`, i.e. `π/(2 T_leave)`.
    pub required_rate: T,
    /// Effective rate per unit Ω₂₃ under the chosen interpretation.
    pub rate_per_pump: T,
    /// The Ω₂₃ that balances the two times (rad/s).
    pub pump_rabi: T,
    pub interpretation: RateInterpretation,
}

/// Time for an atom at the recoil velocity to cross the condensate width.
pub fn exit_time<T: Real>(params: &PhysicalParams<T>) -> T {
    condensate_width(params) / recoil_velocity(params)
}

/// Estimate of the pump Rabi frequency at which atoms perform a quarter Rabi
/// cycle while leaving the condensate. Scales as `1/κ`.
pub fn optimal_pump_rabi_estimate<T: Real>(
    params: &PhysicalParams<T>,
    phi0: &ComplexField<T>,
    kappa: T,
    interpretation: RateInterpretation,
) -> RabiEstimate<T> {
    let t_leave = exit_time(params);
    let required_rate = T::FRAC_PI_2() / t_leave;
    let per_amplitude = kappa * params.g13 * params.atom_number.sqrt() / params.one_photon_detuning;
    let rate_per_pump = per_amplitude
        * match interpretation {
            RateInterpretation::Literal => phi0.integral().re,
            RateInterpretation::Peak => ground_state_peak(params),
            RateInterpretation::WidthAveraged => phi0.integral().re / condensate_width(params),
        };
    RabiEstimate {
        t_leave,
        required_rate,
        rate_per_pump,
        pump_rabi: required_rate / rate_per_pump,
        interpretation,
    }
}

/// Resolves κ from the calibration setting.
pub fn resolve_kappa<T: Real>(params: &PhysicalParams<T>, phi0: &ComplexField<T>) -> T {
    match params.calibration {
        Calibration::Fixed(k) => k,
        Calibration::MatchRabiEstimate {
            target,
            interpretation,
        } => optimal_pump_rabi_estimate(params, phi0, T::one(), interpretation).pump_rabi / target,
    }
}

/// Detector bounds and the probe normalization window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec<T: Real = f64> {
    pub x1: T,
    pub x2: T,
    pub probe_window: T,
}

impl<T: Real> Default for DetectorSpec<T> {
    fn default() -> Self {
        Self {
            x1: lit(0.04e-3),
            x2: lit(0.06e-3),
            probe_window: lit(0.02e-3),
        }
    }
}

impl<T: Real> DetectorSpec<T> {
    pub fn validate(&self, grid: &Grid<T>) -> Result<(), ModelError> {
        let ok = self.x1.is_finite()
            && self.x2.is_finite()
            && grid.x_min() <= self.x1
            && self.x1 < self.x2
            && self.x2 <= grid.x_max();
        if !ok {
            return Err(ModelError::InvalidDetector {
                x1: to_f64(self.x1),
                x2: to_f64(self.x2),
            });
        }
        if !(self.probe_window.is_finite() && self.probe_window > T::zero()) {
            return Err(ModelError::InvalidParameter {
                name: "probe_window",
                reason: "must be finite and > 0".into(),
            });
        }
        Ok(())
    }

    pub fn width(&self) -> T {
        self.x2 - self.x1
    }
}

/// Default simulation grid: [−0.05, 0.10] mm with 4096 points.
pub fn default_grid<T: Real>() -> Grid<T> {
    Grid::new(lit(-0.05e-3), lit(0.10e-3), 4096).expect("valid default grid")
}

/// Everything the dynamics and observables need, derived once from the
/// parameters. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Model<T: Real = f64> {
    params: PhysicalParams<T>,
    grid: Grid<T>,
    detector: DetectorSpec<T>,
    phi0: ComplexField<T>,
    coupling: ComplexField<T>,
    potential: Vec<T>,
    coupling_mid: Vec<Complex<T>>,
    potential_mid: Vec<T>,
    kappa: T,
    k: T,
    probe_amplitude: T,
    resonance: ResonanceTerms<T>,
    warnings: Vec<String>,
}

impl<T: Real> Model<T> {
    pub fn new(
        params: PhysicalParams<T>,
        grid: Grid<T>,
        detector: DetectorSpec<T>,
    ) -> Result<Self, ModelError> {
        let warnings = params.validate()?;
        detector.validate(&grid)?;
        let phi0 = condensate_ground_state(&params, &grid)?;
        let kappa = resolve_kappa(&params, &phi0);
        let coupling = coupling_profile(&params, &phi0, kappa);
        let peak = ground_state_peak(&params);
        let resonance = resonance_detuning(&params, peak);

        // Condensate mean-field shift of the probe, V(x) = (|g|²N/Δ)|φ₀(x)|².
        let v_scale = params.g13 * params.g13 * params.atom_number / params.one_photon_detuning;
        let potential = phi0.iter().map(|z| v_scale * z.norm_sqr()).collect();

        // Mid-point samples from the closed form, rescaled by the same
        // discrete normalization as the on-grid profile.
        let sigma = condensate_width(&params);
        let (jmax, _) = phi0
            .iter()
            .enumerate()
            .fold((0, T::zero()), |(bj, bv), (j, z)| if z.re > bv { (j, z.re) } else { (bj, bv) });
        let xm = grid.x(jmax);
        let rescale = phi0[jmax].re / (peak * (-(xm * xm) / (lit::<T>(2.0) * sigma * sigma)).exp());
        let rescale = if rescale.is_finite() { rescale } else { T::one() };
        let half = grid.dx() / lit(2.0);
        let c_scale = coupling_per_amplitude(&params) * kappa;
        let mut coupling_mid = Vec::with_capacity(grid.len() - 1);
        let mut potential_mid = Vec::with_capacity(grid.len() - 1);
        for j in 0..grid.len() - 1 {
            let x = grid.x(j) + half;
            let phi = rescale * peak * (-(x * x) / (lit::<T>(2.0) * sigma * sigma)).exp();
            coupling_mid.push(Complex::new(c_scale * phi, T::zero()));
            potential_mid.push(v_scale * phi * phi);
        }

        let probe_amplitude = probe_input_amplitude(&params, detector.probe_window);
        Ok(Self {
            k: momentum_transfer(&params),
            params,
            grid,
            detector,
            phi0,
            coupling,
            potential,
            coupling_mid,
            potential_mid,
            kappa,
            probe_amplitude,
            resonance,
            warnings,
        })
    }

    /// Overrides the probe inflow amplitude (used to check linearity).
    pub fn with_probe_amplitude(mut self, amplitude: T) -> Self {
        self.probe_amplitude = amplitude;
        self
    }

    pub fn params(&self) -> &PhysicalParams<T> {
        &self.params
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn detector(&self) -> &DetectorSpec<T> {
        &self.detector
    }

    pub fn phi0(&self) -> &ComplexField<T> {
        &self.phi0
    }

    /// Ω_C(x) on the grid.
    pub fn coupling(&self) -> &ComplexField<T> {
        &self.coupling
    }

    /// Ω_C at the mid-points `x_j + dx/2`, `j = 0..n-1`.
    pub fn coupling_mid(&self) -> &[Complex<T>] {
        &self.coupling_mid
    }

    /// V(x) on the grid.
    pub fn potential(&self) -> &[T] {
        &self.potential
    }

    pub fn potential_mid(&self) -> &[T] {
        &self.potential_mid
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn momentum_transfer(&self) -> T {
        self.k
    }

    pub fn recoil_velocity(&self) -> T {
        recoil_velocity(&self.params)
    }

    pub fn sigma(&self) -> T {
        condensate_width(&self.params)
    }

    pub fn t_leave(&self) -> T {
        exit_time(&self.params)
    }

    pub fn probe_amplitude(&self) -> T {
        self.probe_amplitude
    }

    pub fn resonance(&self) -> &ResonanceTerms<T> {
        &self.resonance
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Absolute two-photon detuning δ (rad/s).
    pub fn two_photon_detuning(&self) -> T {
        match self.params.two_photon {
            TwoPhotonDetuning::Offset(o) => self.resonance.total() + o,
            TwoPhotonDetuning::Absolute(d) => d,
        }
    }

    /// δ − δ₀ (rad/s).
    pub fn detuning_offset(&self) -> T {
        match self.params.two_photon {
            TwoPhotonDetuning::Offset(o) => o,
            TwoPhotonDetuning::Absolute(d) => d - self.resonance.total(),
        }
    }

    /// Constant part of the atomic generator in the frame co-rotating with
    /// the probe drive: `ħk²/2m − |Ω₂₃|²/Δ − ω_t − δ`. Evaluated without
    /// cancelling the large light shift when δ is given as an offset.
    pub fn drive_frame_constant(&self) -> T {
        match self.params.two_photon {
            TwoPhotonDetuning::Offset(o) => -self.resonance.condensate - o,
            TwoPhotonDetuning::Absolute(d) => self.resonance.atomic_energy() - d,
        }
    }

    /// The δ − δ₀ at which the probe drive is resonant with the recoiling
    /// atomic mode (`drive_frame_constant() == 0`).
    pub fn resonant_offset(&self) -> T {
        -self.resonance.condensate
    }

    /// Dimensionless area `∫Ω_C dx / √(v c)` of the coupling seen by the
    /// co-propagating atom and probe fluxes; complete transfer at π/2.
    pub fn pulse_area(&self) -> T {
        self.coupling.integral().norm()
            / (self.recoil_velocity() * self.params.speed_of_light).sqrt()
    }

    pub fn rabi_estimate(&self, interpretation: RateInterpretation) -> RabiEstimate<T> {
        optimal_pump_rabi_estimate(&self.params, &self.phi0, self.kappa, interpretation)
    }
}
