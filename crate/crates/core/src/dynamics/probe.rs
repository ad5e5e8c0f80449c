//! Cross-propagation of the slowly varying probe envelope,
//! `ic·dp/dx = (η − V(x))p − Ω_C*(x)g(x)`, from the inflow boundary at
//! `x_min` to the right edge of the grid.
//!
//! The recurrence is sequential in x. One classical RK4 step per grid cell;
//! the atomic field at cell mid-points comes from cubic Lagrange
//! interpolation (fourth order), the model profiles from their closed forms.

use num_complex::Complex;

use crate::grid::ComplexField;
use crate::model::Model;
use crate::num::{lit, mul_i, Real};

/// Probe envelope and an estimate of the relative interpolation error of
/// the x-integration.
#[derive(Debug, Clone)]
pub struct ProbeSolution<T: Real = f64> {
    pub field: ComplexField<T>,
    pub error_estimate: T,
}

/// Solves the envelope equation for the atomic field `g` with inflow
/// amplitude `model.probe_amplitude()`. `residual_detuning` is η; the
/// evolution works in the drive's co-rotating frame where η = 0.
pub fn solve_probe_envelope<T: Real>(
    g: &ComplexField<T>,
    model: &Model<T>,
    residual_detuning: T,
) -> ProbeSolution<T> {
    let mut out = vec![Complex::default(); g.len()];
    let inflow = Complex::new(model.probe_amplitude(), T::zero());
    integrate(g.values(), model, residual_detuning, inflow, &mut out);
    let error_estimate = interpolation_error(g.values(), model, inflow.norm());
    ProbeSolution {
        field: ComplexField::from_values(*g.grid(), out).expect("same grid"),
        error_estimate,
    }
}

/// Midpoint value from four equally spaced samples by cubic interpolation.
#[inline]
fn midpoint<T: Real>(g: &[Complex<T>], j: usize) -> Complex<T> {
    let n = g.len();
    let (w1, w9, w5, w15) = (lit::<T>(1.0 / 16.0), lit::<T>(9.0 / 16.0), lit::<T>(5.0 / 16.0), lit::<T>(15.0 / 16.0));
    if j == 0 {
        g[0] * w5 + g[1] * w15 - g[2] * w5 + g[3] * w1
    } else if j + 2 >= n {
        // j = n-2: one-sided stencil on the last four samples
        g[n - 4] * w1 - g[n - 3] * w5 + g[n - 2] * w15 + g[n - 1] * w5
    } else {
        (g[j] + g[j + 1]) * w9 - (g[j - 1] + g[j + 2]) * w1
    }
}

/// Per-cell RK4 transfer coefficients for `p' = a(x)p + b(x)` with
/// `a = i(V − η)/c` and `b = iΩ_C* g/c`. Since the step is linear in
/// `(p, g)`, one cell reduces to
/// `p_{j+1} = m_j p_j + s0_j g_j + sh_j g_{j+½} + s1_j g_{j+1}`.
#[derive(Debug, Clone)]
pub(crate) struct ProbeStepper<T: Real = f64> {
    cells: Vec<[Complex<T>; 4]>,
}

impl<T: Real> ProbeStepper<T> {
    pub(crate) fn new(model: &Model<T>, eta: T) -> Self {
        let n = model.grid().len();
        let h = model.grid().dx();
        let half = h / lit(2.0);
        let sixth = h / lit(6.0);
        let two = lit::<T>(2.0);
        let one = Complex::new(T::one(), T::zero());
        let inv_c = T::one() / model.params().speed_of_light;
        let v = model.potential();
        let v_mid = model.potential_mid();
        let om = model.coupling().values();
        let om_mid = model.coupling_mid();
        let coef = |vv: T| Complex::new(T::zero(), (vv - eta) * inv_c);
        let source = |o: Complex<T>| mul_i(o.conj()) * inv_c;

        let cells = (0..n - 1)
            .map(|j| {
                let (a0, ah, a1) = (coef(v[j]), coef(v_mid[j]), coef(v[j + 1]));
                // k_i = α_i p + β0_i b0 + βh_i bh + β1_i b1
                let k1 = [a0, one, Complex::default(), Complex::default()];
                let k2 = [
                    ah * (one + k1[0] * half),
                    ah * k1[1] * half,
                    one,
                    Complex::default(),
                ];
                let k3 = [
                    ah * (one + k2[0] * half),
                    ah * k2[1] * half,
                    ah * k2[2] * half + one,
                    Complex::default(),
                ];
                let k4 = [
                    a1 * (one + k3[0] * h),
                    a1 * k3[1] * h,
                    a1 * k3[2] * h,
                    one,
                ];
                let comb = |i: usize| (k1[i] + (k2[i] + k3[i]) * two + k4[i]) * sixth;
                [
                    one + comb(0),
                    comb(1) * source(om[j]),
                    comb(2) * source(om_mid[j]),
                    comb(3) * source(om[j + 1]),
                ]
            })
            .collect();
        Self { cells }
    }

    pub(crate) fn integrate(&self, g: &[Complex<T>], inflow: Complex<T>, out: &mut [Complex<T>]) {
        let mut p = inflow;
        out[0] = p;
        for (j, c) in self.cells.iter().enumerate() {
            p = c[0] * p + c[1] * g[j] + c[2] * midpoint(g, j) + c[3] * g[j + 1];
            out[j + 1] = p;
        }
    }
}

/// RK4 recurrence from the inflow at `x_min`.
pub(crate) fn integrate<T: Real>(
    g: &[Complex<T>],
    model: &Model<T>,
    eta: T,
    inflow: Complex<T>,
    out: &mut [Complex<T>],
) {
    ProbeStepper::new(model, eta).integrate(g, inflow, out);
}

/// Accumulated midpoint interpolation error, `Σ h·(2/3)(3/128)|Δ⁴b|`,
/// relative to the inflow amplitude.
fn interpolation_error<T: Real>(g: &[Complex<T>], model: &Model<T>, scale: T) -> T {
    let n = g.len();
    let h = model.grid().dx();
    let inv_c = T::one() / model.params().speed_of_light;
    let om = model.coupling().values();
    let b: Vec<Complex<T>> = (0..n).map(|j| om[j].conj() * g[j] * inv_c).collect();
    let (four, six) = (lit::<T>(4.0), lit::<T>(6.0));
    let mut acc = T::zero();
    for j in 2..n.saturating_sub(2) {
        let d4 = b[j - 2] - b[j - 1] * four + b[j] * six - b[j + 1] * four + b[j + 2];
        acc += d4.norm();
    }
    let err = acc * h * lit(1.0 / 64.0);
    if scale > T::zero() {
        err / scale
    } else {
        err
    }
}
