//! Fixed-step classical Runge–Kutta integration.

use super::SimError;

/// One classical RK4 step of `ẋ = f(x, u)` with the input held over the step.
pub fn rk4_step<const N: usize, F>(
    dynamics: F,
    state: [f64; N],
    input: f64,
    dt: f64,
) -> Result<[f64; N], SimError>
where
    F: Fn(&[f64; N], f64) -> [f64; N],
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(SimError::InvalidTimeStep { dt, limit: f64::NAN });
    }
    let shifted = |base: &[f64; N], k: &[f64; N], h: f64| -> [f64; N] {
        std::array::from_fn(|i| base[i] + h * k[i])
    };
    let k1 = dynamics(&state, input);
    let k2 = dynamics(&shifted(&state, &k1, 0.5 * dt), input);
    let k3 = dynamics(&shifted(&state, &k2, 0.5 * dt), input);
    let k4 = dynamics(&shifted(&state, &k3, dt), input);
    let next: [f64; N] =
        std::array::from_fn(|i| state[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    if next.iter().all(|v| v.is_finite()) {
        Ok(next)
    } else {
        Err(SimError::NonFinite("rk4 state"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(x: &[f64; 1], _u: f64) -> [f64; 1] {
        [-x[0]]
    }

    #[test]
    fn zero_dynamics_leave_state_unchanged() {
        let x = rk4_step(|_: &[f64; 2], _| [0.0, 0.0], [1.5, -2.0], 0.0, 0.3).unwrap();
        assert_eq!(x, [1.5, -2.0]);
    }

    #[test]
    fn constant_rate_is_exact() {
        let x = rk4_step(|_: &[f64; 1], _| [1.0], [2.0], 0.0, 0.25).unwrap();
        assert_eq!(x, [2.25]);
    }

    #[test]
    fn exponential_decay_single_step() {
        let x = rk4_step(decay, [1.0], 0.0, 0.1).unwrap();
        assert!((x[0] - (-0.1f64).exp()).abs() < 1e-7);
        assert!((x[0] - 0.904837418).abs() < 1e-7);
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |dt: f64| {
            let steps = (1.0 / dt).round() as usize;
            let mut x = [1.0];
            for _ in 0..steps {
                x = rk4_step(decay, x, 0.0, dt).unwrap();
            }
            (x[0] - (-1.0f64).exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio >= 14.0, "ratio {ratio}");
    }

    #[test]
    fn rejects_bad_step_and_blowup() {
        assert!(rk4_step(decay, [1.0], 0.0, 0.0).is_err());
        assert!(matches!(
            rk4_step(|_: &[f64; 1], _| [f64::INFINITY], [1.0], 0.0, 0.1),
            Err(SimError::NonFinite(_))
        ));
    }
}
