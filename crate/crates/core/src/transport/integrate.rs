use crate::error::{Error, Result};
use crate::phase_space::SpinChargeState;

/// A time-stamped state that supports the vector-space operations the
/// explicit integrator needs.
pub trait OdeState: Clone {
    /// `self += a * x`.
    fn axpy(&mut self, a: f64, x: &Self);
    fn all_finite(&self) -> bool;
    fn time(&self) -> f64;
    fn set_time(&mut self, t: f64);
}

impl OdeState for SpinChargeState {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (y, v) in self.s0.iter_mut().zip(&x.s0) {
            *y += a * v;
        }
        for (y, v) in self.spin.iter_mut().zip(&x.spin) {
            y[0] += a * v[0];
            y[1] += a * v[1];
            y[2] += a * v[2];
        }
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }

    fn time(&self) -> f64 {
        self.time
    }

    fn set_time(&mut self, t: f64) {
        self.time = t;
    }
}

/// One classical fourth-order Runge–Kutta step.
///
/// `rhs` receives each stage state with its stage time set and returns the
/// time derivative (whose own time stamp is ignored). Anything derived from
/// the state, such as a self-consistent potential, is recomputed per stage
/// by the caller's `rhs`.
pub fn rk4_step<S, F>(state: &S, dt: f64, mut rhs: F) -> Result<S>
where
    S: OdeState,
    F: FnMut(&S) -> Result<S>,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("run.dt", "must be finite and > 0"));
    }
    let t = state.time();
    let half = 0.5 * dt;

    let k1 = rhs(state)?;
    let mut stage = state.clone();
    stage.axpy(half, &k1);
    stage.set_time(t + half);
    check(&stage, t + half)?;

    let k2 = rhs(&stage)?;
    let mut stage = state.clone();
    stage.axpy(half, &k2);
    stage.set_time(t + half);
    check(&stage, t + half)?;

    let k3 = rhs(&stage)?;
    let mut stage = state.clone();
    stage.axpy(dt, &k3);
    stage.set_time(t + dt);
    check(&stage, t + dt)?;

    let k4 = rhs(&stage)?;
    let mut out = state.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    out.set_time(t + dt);
    check(&out, t + dt)?;
    Ok(out)
}

fn check<S: OdeState>(s: &S, time: f64) -> Result<()> {
    if s.all_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteState { time })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone, Debug, PartialEq)]
    struct Scalar {
        y: f64,
        t: f64,
    }

    impl OdeState for Scalar {
        fn axpy(&mut self, a: f64, x: &Self) {
            self.y += a * x.y;
        }
        fn all_finite(&self) -> bool {
            self.y.is_finite()
        }
        fn time(&self) -> f64 {
            self.t
        }
        fn set_time(&mut self, t: f64) {
            self.t = t;
        }
    }

    fn decay(tau: f64) -> impl FnMut(&Scalar) -> Result<Scalar> {
        move |s: &Scalar| Ok(Scalar { y: -s.y / tau, t: 0.0 })
    }

    #[test]
    fn vanishing_step_is_identity() {
        let s = Scalar { y: 1.25, t: 0.0 };
        let out = rk4_step(&s, 1e-300, decay(1.0)).unwrap();
        assert_eq!(out.y, s.y);
    }

    #[test]
    fn single_step_local_error_is_fifth_order() {
        let tau = 0.7;
        let mut errs = Vec::new();
        for dt in [0.1, 0.05, 0.025] {
            let out = rk4_step(&Scalar { y: 1.0, t: 0.0 }, dt, decay(tau)).unwrap();
            errs.push((out.y - (-dt / tau).exp()).abs());
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 4.8, "local order {order}");
        }
    }

    #[test]
    fn stage_times() {
        let mut seen = Vec::new();
        let s = Scalar { y: 0.0, t: 2.0 };
        rk4_step(&s, 0.5, |st: &Scalar| {
            seen.push(st.t);
            Ok(Scalar { y: 1.0, t: 0.0 })
        })
        .unwrap();
        assert_eq!(seen, vec![2.0, 2.25, 2.25, 2.5]);
    }

    #[test]
    fn rejects_bad_steps_and_blowups() {
        let s = Scalar { y: 1.0, t: 0.0 };
        assert!(rk4_step(&s, 0.0, decay(1.0)).is_err());
        assert!(rk4_step(&s, -1.0, decay(1.0)).is_err());
        let err = rk4_step(&s, 1.0, |_: &Scalar| Ok(Scalar { y: f64::INFINITY, t: 0.0 }));
        assert!(matches!(err, Err(Error::NonFiniteState { .. })));
    }
}
