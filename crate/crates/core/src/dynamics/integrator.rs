use num_complex::Complex;

use super::operator::{AtomicOperator, DerivativeScheme};
use super::probe::{self, ProbeStepper};
use super::{EvolutionConfig, ModePairState, StepRecord, Trajectory, TrajectoryDiagnostics};
use crate::error::DynamicsError;
use crate::grid::ComplexField;
use crate::model::Model;
use crate::num::{count, lit, mul_neg_i, phasor, to_f64, Real};

/// Upper bound on `t_final / dt`.
pub const MAX_STEPS: f64 = 1e8;

/// Advances the mode pair in the frame co-rotating with the probe drive.
///
/// Each RK4 stage recomputes the probe envelope from that stage's atomic
/// field, so the derivative is `dg/dt = −i(L g − Ω_C p[g])`.
pub struct Propagator<'m, T: Real = f64> {
    model: &'m Model<T>,
    op: AtomicOperator<T>,
    stepper: ProbeStepper<T>,
    inflow: Complex<T>,
    dt: T,
    k1: Vec<Complex<T>>,
    k2: Vec<Complex<T>>,
    k3: Vec<Complex<T>>,
    k4: Vec<Complex<T>>,
    stage: Vec<Complex<T>>,
    probe: Vec<Complex<T>>,
    lg: Vec<Complex<T>>,
}

impl<'m, T: Real> Propagator<'m, T> {
    pub fn new(model: &'m Model<T>, scheme: DerivativeScheme, dt: T) -> Self {
        let n = model.grid().len();
        let op = AtomicOperator::new(
            model.grid(),
            model.params().mass,
            model.momentum_transfer(),
            model.drive_frame_constant(),
            scheme,
        );
        let zeros = || vec![Complex::default(); n];
        Self {
            model,
            op,
            stepper: ProbeStepper::new(model, T::zero()),
            inflow: Complex::new(model.probe_amplitude(), T::zero()),
            dt,
            k1: zeros(),
            k2: zeros(),
            k3: zeros(),
            k4: zeros(),
            stage: zeros(),
            probe: zeros(),
            lg: zeros(),
        }
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn operator(&self) -> &AtomicOperator<T> {
        &self.op
    }

    /// Initial state: no outcoupled atoms, probe consistent with `g = 0`.
    pub fn initial_state(&mut self) -> ModePairState<T> {
        let grid = *self.model.grid();
        let g = ComplexField::zeros(grid);
        let mut p = vec![Complex::default(); grid.len()];
        self.stepper.integrate(g.values(), self.inflow, &mut p);
        ModePairState {
            t: T::zero(),
            g,
            p: ComplexField::from_values(grid, p).expect("same grid"),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn derivative(
        model: &Model<T>,
        op: &mut AtomicOperator<T>,
        stepper: &ProbeStepper<T>,
        inflow: Complex<T>,
        probe_buf: &mut [Complex<T>],
        lg: &mut [Complex<T>],
        g: &[Complex<T>],
        out: &mut [Complex<T>],
    ) {
        stepper.integrate(g, inflow, probe_buf);
        op.apply(g, lg);
        let om = model.coupling().values();
        for j in 0..g.len() {
            out[j] = mul_neg_i(lg[j] - om[j] * probe_buf[j]);
        }
    }

    /// One classical RK4 step of size `dt`.
    pub fn step(&mut self, state: &mut ModePairState<T>) {
        let dt = self.dt;
        let half = dt / lit(2.0);
        let g = state.g.values_mut();
        let (model, inflow) = (self.model, self.inflow);

        Self::derivative(model, &mut self.op, &self.stepper, inflow, &mut self.probe, &mut self.lg, g, &mut self.k1);
        for ((s, x), k) in self.stage.iter_mut().zip(g.iter()).zip(&self.k1) {
            *s = x + k * half;
        }
        Self::derivative(model, &mut self.op, &self.stepper, inflow, &mut self.probe, &mut self.lg, &self.stage, &mut self.k2);
        for ((s, x), k) in self.stage.iter_mut().zip(g.iter()).zip(&self.k2) {
            *s = x + k * half;
        }
        Self::derivative(model, &mut self.op, &self.stepper, inflow, &mut self.probe, &mut self.lg, &self.stage, &mut self.k3);
        for ((s, x), k) in self.stage.iter_mut().zip(g.iter()).zip(&self.k3) {
            *s = x + k * dt;
        }
        Self::derivative(model, &mut self.op, &self.stepper, inflow, &mut self.probe, &mut self.lg, &self.stage, &mut self.k4);

        let sixth = dt / lit(6.0);
        let two = lit::<T>(2.0);
        for (j, x) in g.iter_mut().enumerate() {
            *x += (self.k1[j] + (self.k2[j] + self.k3[j]) * two + self.k4[j]) * sixth;
        }
        state.t += dt;
        self.stepper.integrate(g, inflow, state.p.values_mut());
    }
}

/// One RK4 step of a drive-frame state.
pub fn rk4_time_step<T: Real>(
    state: &ModePairState<T>,
    model: &Model<T>,
    config: &EvolutionConfig<T>,
) -> Result<ModePairState<T>, DynamicsError> {
    config.validate()?;
    let mut next = state.clone();
    Propagator::new(model, config.scheme, config.dt).step(&mut next);
    if !next.g.is_finite() || !next.p.is_finite() {
        return Err(DynamicsError::NonFinite {
            field: "mode functions",
            step: 1,
            t: to_f64(next.t),
        });
    }
    Ok(next)
}

/// Time derivative of the atomic mode function in the frame rotating at the
/// gauge constant `gauge_constant`, for fields given in that frame.
pub fn atomic_rhs<T: Real>(
    state: &ModePairState<T>,
    model: &Model<T>,
    gauge_constant: T,
    scheme: DerivativeScheme,
) -> Result<ComplexField<T>, DynamicsError> {
    let constant = model.resonance().atomic_energy() - gauge_constant;
    let mut op = AtomicOperator::new(
        model.grid(),
        model.params().mass,
        model.momentum_transfer(),
        constant,
        scheme,
    );
    let n = state.g.len();
    let mut lg = vec![Complex::default(); n];
    op.apply(state.g.values(), &mut lg);
    let om = model.coupling().values();
    let p = state.p.values();
    let out: Vec<_> = (0..n).map(|j| mul_neg_i(lg[j] - om[j] * p[j])).collect();
    if out.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(DynamicsError::NonFinite {
            field: "atomic derivative",
            step: 0,
            t: to_f64(state.t),
        });
    }
    Ok(ComplexField::from_values(*model.grid(), out).expect("same grid"))
}

/// Integrates from the empty-beam initial condition to `t_final`.
///
/// On a non-finite field the run stops; the partial trajectory is returned
/// with `error` set.
pub fn evolve<T: Real>(model: &Model<T>, config: &EvolutionConfig<T>) -> Trajectory<T> {
    let gauge_constant = config.gauge.value(model);
    let frame_rate = config.gauge.frame_rate(model);
    let mut trajectory = Trajectory {
        snapshots: Vec::new(),
        steps: Vec::new(),
        gauge_constant,
        frame_rate,
        dt: config.dt,
        diagnostics: TrajectoryDiagnostics::default(),
        error: None,
    };
    if let Err(e) = config.validate() {
        trajectory.error = Some(e);
        return trajectory;
    }

    let n_steps = config.step_count();
    let stride = config.stride();
    let mut prop = Propagator::new(model, config.scheme, config.dt);
    let radius = prop.operator().spectral_radius() * config.dt;
    if radius > lit(2.8) {
        trajectory.diagnostics.warnings.push(format!(
            "dt·|L| = {:.3} exceeds the RK4 stability limit 2.83",
            to_f64(radius)
        ));
    }

    let c = model.params().speed_of_light;
    let inflow_sq = model.probe_amplitude() * model.probe_amplitude();
    let mut state = prop.initial_state();
    let record = |state: &ModePairState<T>| {
        let p = state.p.values();
        StepRecord {
            t: state.t,
            norm: state.g.norm_sqr(),
            probe_in: p[0].norm_sqr(),
            probe_out: p[p.len() - 1].norm_sqr(),
            flux_residual: T::nan(),
        }
    };
    trajectory.steps.push(record(&state));
    trajectory.snapshots.push(state.rotated(frame_rate));

    for s in 1..=n_steps {
        prop.step(&mut state);
        // fixed-step time without accumulation drift
        state.t = count::<T>(s) * config.dt;
        let rec = record(&state);
        if !(rec.norm.is_finite() && rec.probe_out.is_finite()) {
            trajectory.error = Some(DynamicsError::NonFinite {
                field: if rec.norm.is_finite() { "probe envelope" } else { "atomic mode function" },
                step: s,
                t: to_f64(state.t),
            });
            break;
        }
        trajectory.steps.push(rec);

        // centred difference of ∫|g|² at the previous step
        if s >= 2 {
            let (prev, mid, next) = (&trajectory.steps[s - 2], &trajectory.steps[s - 1], &trajectory.steps[s]);
            let rate = (next.norm - prev.norm) / (lit::<T>(2.0) * config.dt);
            let flux = c * (mid.probe_in - mid.probe_out);
            let scale = mid.norm + c * config.dt * inflow_sq;
            let residual = if scale > T::zero() {
                (rate - flux).abs() * config.dt / scale
            } else {
                T::zero()
            };
            trajectory.steps[s - 1].flux_residual = residual;
            if residual.is_nan() || residual > trajectory.diagnostics.max_flux_residual {
                trajectory.diagnostics.max_flux_residual = residual;
            }
        }

        if s % stride == 0 || s == n_steps {
            check_boundary(&state, &mut trajectory.diagnostics);
            let est = interpolation_check(&state, model);
            if est > trajectory.diagnostics.max_probe_error {
                trajectory.diagnostics.max_probe_error = est;
            }
            trajectory.snapshots.push(state.rotated(frame_rate));
        }
    }

    if trajectory.diagnostics.max_probe_error > lit(1e-6) {
        trajectory.diagnostics.warnings.push(format!(
            "probe cross-propagation error estimate {:.2e} exceeds 1e-6; refine the grid",
            to_f64(trajectory.diagnostics.max_probe_error)
        ));
    }
    if trajectory.diagnostics.boundary_contact {
        trajectory.diagnostics.warnings.push(
            "outcoupled atoms reached the grid boundary (density > 1e-6 of peak within 5 points)"
                .into(),
        );
    }
    trajectory
}

fn check_boundary<T: Real>(state: &ModePairState<T>, diag: &mut TrajectoryDiagnostics<T>) {
    let d = state.g.intensity();
    let peak = d.iter().copied().fold(T::zero(), T::max);
    if peak <= T::zero() {
        return;
    }
    let n = d.len();
    let edge = d[..5].iter().chain(&d[n - 5..]).copied().fold(T::zero(), T::max);
    if edge > lit::<T>(1e-6) * peak && !diag.boundary_contact {
        diag.boundary_contact = true;
        diag.boundary_contact_time = Some(state.t);
    }
}

fn interpolation_check<T: Real>(state: &ModePairState<T>, model: &Model<T>) -> T {
    probe::solve_probe_envelope(&state.g, model, T::zero()).error_estimate
}

/// Unit phasor applied to drive-frame fields to express them in gauge C.
pub(crate) fn frame_phasor<T: Real>(rate: T, t: T) -> Complex<T> {
    phasor(rate * t)
}
