//! Fixed-step classical Runge–Kutta integration of `X_H`.

use crate::field::Hamiltonian;
use crate::HamError;

pub const DEFAULT_MAX_STEP: f64 = 1e-3;

const BLOW_UP: f64 = 1e12;

/// Integrates `ẋ = X_H(t, x)` from `t0` to `t1` (either direction) with
/// equal steps no longer than `max_step`. Sphere components are projected
/// back onto their spheres after every step.
pub fn flow(h: &dyn Hamiltonian, t0: f64, t1: f64, x: &[f64], max_step: f64) -> Result<Vec<f64>, HamError> {
    let mut state = x.to_vec();
    flow_in_place(h, t0, t1, &mut state, max_step)?;
    Ok(state)
}

pub fn flow_in_place(h: &dyn Hamiltonian, t0: f64, t1: f64, state: &mut [f64], max_step: f64) -> Result<(), HamError> {
    if !(max_step > 0.0) {
        return Err(HamError::Invalid(format!("step bound {max_step} must be positive")));
    }
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(());
    }
    let steps = (span.abs() / max_step).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    let n = state.len();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let space = h.space();
    for step in 0..steps {
        let t = t0 + dt * step as f64;
        h.field(t, state, &mut k1);
        for i in 0..n {
            tmp[i] = state[i] + 0.5 * dt * k1[i];
        }
        h.field(t + 0.5 * dt, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = state[i] + 0.5 * dt * k2[i];
        }
        h.field(t + 0.5 * dt, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = state[i] + dt * k3[i];
        }
        h.field(t + dt, &tmp, &mut k4);
        for i in 0..n {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        space.project(state);
        if let Some(bad) = state.iter().find(|v| !v.is_finite() || v.abs() > BLOW_UP) {
            return Err(HamError::StepFailure { t: t + dt, reason: format!("state component {bad} left the finite range") });
        }
    }
    Ok(())
}

/// `φ_H^t(x)`, the flow from time 0.
pub fn flow_map(h: &dyn Hamiltonian, t: f64, x: &[f64], max_step: f64) -> Result<Vec<f64>, HamError> {
    flow(h, 0.0, t, x, max_step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ExprHamiltonian;
    use crate::space::{sphere_radius, PhaseSpace};

    fn r2(src: &str) -> ExprHamiltonian {
        ExprHamiltonian::parse(&PhaseSpace::euclidean(1).unwrap(), src).unwrap()
    }

    #[test]
    fn harmonic_oscillator_rotates_clockwise() {
        let h = r2("(x^2 + y^2)/2");
        let (x0, y0) = (1.0, 0.5);
        for t in [0.3, 1.0, 2.5] {
            let p = flow_map(&h, t, &[x0, y0], DEFAULT_MAX_STEP).unwrap();
            let expected = [x0 * t.cos() + y0 * t.sin(), -x0 * t.sin() + y0 * t.cos()];
            assert!((p[0] - expected[0]).abs() < 1e-12 && (p[1] - expected[1]).abs() < 1e-12, "{p:?} vs {expected:?}");
        }
        // starting on the positive x-axis the orbit enters the lower half-plane
        assert!(flow_map(&h, 0.1, &[1.0, 0.0], DEFAULT_MAX_STEP).unwrap()[1] < 0.0);
    }

    #[test]
    fn constant_hamiltonian_and_zero_time_are_identity() {
        let p = flow_map(&r2("3 + t"), 1.0, &[0.2, -0.7], DEFAULT_MAX_STEP).unwrap();
        assert_eq!(p, vec![0.2, -0.7]);
        let p = flow_map(&r2("x^3*y"), 0.0, &[0.2, -0.7], DEFAULT_MAX_STEP).unwrap();
        assert_eq!(p, vec![0.2, -0.7]);
    }

    #[test]
    fn height_function_rotates_the_sphere() {
        let area: f64 = 2.0;
        let s = PhaseSpace::sphere(area).unwrap();
        let h = ExprHamiltonian::parse(&s, "z").unwrap();
        let r = sphere_radius(area);
        let period = (std::f64::consts::PI * area).sqrt();
        let start = [r * 0.6, 0.0, r * 0.8];
        let back = flow_map(&h, period, &start, DEFAULT_MAX_STEP).unwrap();
        for i in 0..3 {
            assert!((back[i] - start[i]).abs() < 1e-10);
        }
        let quarter = flow_map(&h, period / 4.0, &start, DEFAULT_MAX_STEP).unwrap();
        assert!(quarter[0].abs() < 1e-10 && (quarter[1] - r * 0.6).abs() < 1e-10);
    }

    #[test]
    fn backward_flow_inverts_forward_flow() {
        let h = r2("sin(x)*cos(y) + t*x*y");
        let p = flow(&h, 0.0, 0.8, &[0.3, 0.4], DEFAULT_MAX_STEP).unwrap();
        let q = flow(&h, 0.8, 0.0, &p, DEFAULT_MAX_STEP).unwrap();
        assert!((q[0] - 0.3).abs() < 1e-11 && (q[1] - 0.4).abs() < 1e-11);
    }

    #[test]
    fn blow_up_is_reported() {
        let h = r2("x*y^2");
        assert!(matches!(
            flow_map(&h, 2.0, &[1.0, -1.0], 1e-2),
            Err(HamError::StepFailure { .. })
        ));
    }
}
